//! Edge-list text format and versioned binary snapshots.
//!
//! The text format is one edge per line, `"u v"` with `u < v`, in creation
//! order: the three triangle edges first, then the three edges of each
//! insertion step. A well-formed file is a complete transcript of the
//! process, so parsing replays the subdivisions and rejects edge lists no
//! Random Apollonian Network run could have produced.
//!
//! The binary snapshot is `RAN1` | t (u64 LE) | seed (u64 LE) | per-vertex
//! neighbor lists, each as a degree varint followed by the first neighbor
//! and zigzag-encoded deltas, all LEB128. It exists for fast round-trips of
//! large graphs.

use std::collections::HashSet;
use std::io::{BufWriter, Read, Write};

use crate::error::{Error, Result};
use crate::graph::RanGraph;

const MAGIC: &[u8; 4] = b"RAN1";

/// Write the edge list of `graph` in creation order.
pub fn export_edges(graph: &RanGraph, sink: &mut dyn Write) -> Result<()> {
    let mut out = BufWriter::new(sink);
    for (u, v) in graph.edges_in_creation_order() {
        writeln!(out, "{u} {v}").map_err(|e| Error::io("writing edge list", e))?;
    }
    out.flush().map_err(|e| Error::io("flushing edge list", e))
}

/// Parse an edge list produced by [`export_edges`] back into a graph.
///
/// The parsed graph has seed 0 (the seed is not part of the text format).
/// Round trip: export -> import -> export is byte-identical.
pub fn import_edges(source: &mut dyn Read) -> Result<RanGraph> {
    let mut text = String::new();
    source.read_to_string(&mut text).map_err(|e| Error::io("reading edge list", e))?;
    import_edges_str(&text)
}

pub fn import_edges_str(text: &str) -> Result<RanGraph> {
    let parse_line = |line_no: usize, line: &str| -> Result<(u32, u32)> {
        let mut it = line.split_ascii_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse { line: line_no, message: format!("expected \"u v\", got {line:?}") });
        };
        let u: u32 = a
            .parse()
            .map_err(|_| Error::Parse { line: line_no, message: format!("bad label {a:?}") })?;
        let v: u32 = b
            .parse()
            .map_err(|_| Error::Parse { line: line_no, message: format!("bad label {b:?}") })?;
        if u == 0 || v == 0 || u >= v {
            return Err(Error::Parse { line: line_no, message: format!("edge ({u}, {v}) must satisfy 0 < u < v") });
        }
        Ok((u, v))
    };

    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        edges.push((i + 1, parse_line(i + 1, line)?));
    }

    if edges.len() < 3 || edges.len() % 3 != 0 {
        return Err(Error::Parse {
            line: edges.len(),
            message: format!("edge count {} is not of the form 3t + 3", edges.len()),
        });
    }
    let t = (edges.len() / 3 - 1) as u64;

    let triangle: Vec<(u32, u32)> = edges[..3].iter().map(|&(_, e)| e).collect();
    if triangle != [(1, 2), (1, 3), (2, 3)] {
        return Err(Error::Parse {
            line: edges[0].0,
            message: "file must start with the triangle edges 1 2 / 1 3 / 2 3".into(),
        });
    }

    let n = (t + 3) as usize;
    let mut adjacency: Vec<Vec<u32>> = Vec::with_capacity(n);
    adjacency.push(vec![2, 3]);
    adjacency.push(vec![1, 3]);
    adjacency.push(vec![1, 2]);
    let mut degrees = vec![2u32, 2, 2];

    // Replay the subdivision process: each inserted vertex must land in a
    // currently active face.
    let mut active: HashSet<[u32; 3]> = HashSet::with_capacity(2 * t as usize + 1);
    active.insert([1, 2, 3]);

    for step in 1..=t {
        let v = (step + 3) as u32;
        let chunk = &edges[3 * step as usize..3 * step as usize + 3];
        let mut corners = [0u32; 3];
        for (slot, &(line_no, (u, w))) in corners.iter_mut().zip(chunk) {
            if w != v {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected the three edges of vertex {v}, found ({u}, {w})"),
                });
            }
            *slot = u;
        }
        let line_no = chunk[0].0;
        if !(corners[0] < corners[1] && corners[1] < corners[2]) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("face corners {corners:?} must be strictly increasing"),
            });
        }
        if !active.remove(&corners) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("({}, {}, {}) is not an active face at step {step}", corners[0], corners[1], corners[2]),
            });
        }
        let [a, b, c] = corners;
        active.insert([a, b, v]);
        active.insert([a, c, v]);
        active.insert([b, c, v]);

        adjacency.push(vec![a, b, c]);
        adjacency[(a - 1) as usize].push(v);
        adjacency[(b - 1) as usize].push(v);
        adjacency[(c - 1) as usize].push(v);
        degrees.push(3);
        degrees[(a - 1) as usize] += 1;
        degrees[(b - 1) as usize] += 1;
        degrees[(c - 1) as usize] += 1;
    }

    Ok(RanGraph::from_parts(t, 0, adjacency, degrees))
}

fn push_varint(out: &mut Vec<u8>, mut x: u64) {
    while x >= 0x80 {
        out.push((x as u8 & 0x7f) | 0x80);
        x >>= 7;
    }
    out.push(x as u8);
}

fn zigzag(x: i64) -> u64 {
    ((x << 1) ^ (x >> 63)) as u64
}

fn unzigzag(x: u64) -> i64 {
    ((x >> 1) as i64) ^ -((x & 1) as i64)
}

struct ByteCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> ByteCursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.pos + len > self.data.len() {
            return Err(Error::Snapshot("unexpected end of data".into()));
        }
        let slice = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(slice)
    }

    fn read_u64_le(&mut self) -> Result<u64> {
        let bytes = self.take(8)?;
        Ok(u64::from_le_bytes(bytes.try_into().unwrap()))
    }

    fn read_varint(&mut self) -> Result<u64> {
        let mut x = 0u64;
        let mut shift = 0u32;
        loop {
            let byte = *self
                .data
                .get(self.pos)
                .ok_or_else(|| Error::Snapshot("truncated varint".into()))?;
            self.pos += 1;
            if shift >= 64 {
                return Err(Error::Snapshot("varint too long".into()));
            }
            x |= ((byte & 0x7f) as u64) << shift;
            if byte & 0x80 == 0 {
                return Ok(x);
            }
            shift += 7;
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.data.len()
    }
}

/// Write the binary snapshot of `graph`.
pub fn write_snapshot(graph: &RanGraph, sink: &mut dyn Write) -> Result<()> {
    let mut buf = Vec::with_capacity(32 + graph.m() * 2);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&graph.t().to_le_bytes());
    buf.extend_from_slice(&graph.seed().to_le_bytes());
    for v in 1..=graph.n() as u32 {
        let neighbors = graph.neighbors(v).expect("label in range");
        push_varint(&mut buf, neighbors.len() as u64);
        let mut prev = 0i64;
        for (i, &w) in neighbors.iter().enumerate() {
            if i == 0 {
                push_varint(&mut buf, w as u64);
            } else {
                push_varint(&mut buf, zigzag(w as i64 - prev));
            }
            prev = w as i64;
        }
    }
    sink.write_all(&buf).map_err(|e| Error::io("writing snapshot", e))
}

/// Read a binary snapshot back into a graph.
pub fn read_snapshot(source: &mut dyn Read) -> Result<RanGraph> {
    let mut data = Vec::new();
    source.read_to_end(&mut data).map_err(|e| Error::io("reading snapshot", e))?;
    let mut cur = ByteCursor { data: &data, pos: 0 };

    if cur.take(4)? != MAGIC {
        return Err(Error::Snapshot("bad magic, expected RAN1".into()));
    }
    let t = cur.read_u64_le()?;
    let seed = cur.read_u64_le()?;
    let n = t
        .checked_add(3)
        .filter(|&n| n <= u32::MAX as u64)
        .ok_or_else(|| Error::Snapshot(format!("unsupported step count {t}")))? as usize;

    let mut adjacency = Vec::with_capacity(n);
    let mut degrees = Vec::with_capacity(n);
    let mut total = 0u64;
    for _ in 0..n {
        let deg = cur.read_varint()?;
        if deg == 0 || deg > n as u64 {
            return Err(Error::Snapshot(format!("degree {deg} out of range")));
        }
        total += deg;
        let mut list = Vec::with_capacity(deg as usize);
        let mut prev = 0i64;
        for i in 0..deg {
            let value = if i == 0 {
                cur.read_varint()? as i64
            } else {
                prev + unzigzag(cur.read_varint()?)
            };
            if value < 1 || value > n as i64 {
                return Err(Error::Snapshot(format!("neighbor label {value} out of range")));
            }
            list.push(value as u32);
            prev = value;
        }
        degrees.push(deg as u32);
        adjacency.push(list);
    }
    if !cur.at_end() {
        return Err(Error::Snapshot("trailing bytes after adjacency data".into()));
    }
    if total != 6 * t + 6 {
        return Err(Error::Snapshot(format!("degree sum {total}, expected {}", 6 * t + 6)));
    }
    Ok(RanGraph::from_parts(t, seed, adjacency, degrees))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_graph, GeneratorConfig};
    use proptest::prelude::*;

    fn export_string(graph: &RanGraph) -> String {
        let mut buf = Vec::new();
        export_edges(graph, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn triangle_exports_three_lines() {
        let graph = generate_graph(0, 0).unwrap();
        assert_eq!(export_string(&graph), "1 2\n1 3\n2 3\n");
    }

    #[test]
    fn t1_exports_six_lines() {
        let graph = generate_graph(1, 0).unwrap();
        let text = export_string(&graph);
        assert_eq!(text.lines().count(), 6);
        assert_eq!(text, "1 2\n1 3\n2 3\n1 4\n2 4\n3 4\n");
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let graph = generate_graph(257, 99).unwrap();
        let text = export_string(&graph);
        let parsed = import_edges_str(&text).unwrap();
        assert_eq!(export_string(&parsed), text);
        assert_eq!(parsed.n(), graph.n());
        assert_eq!(parsed.m(), graph.m());
    }

    #[test]
    fn rejects_missing_triangle() {
        let err = import_edges_str("1 2\n1 4\n2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn rejects_non_face_insertion() {
        // Vertex 5 claims face (1, 2, 3), which was consumed by vertex 4.
        let text = "1 2\n1 3\n2 3\n1 4\n2 4\n3 4\n1 5\n2 5\n3 5\n";
        let err = import_edges_str(text).unwrap_err();
        assert!(err.to_string().contains("not an active face"), "{err}");
    }

    #[test]
    fn rejects_garbage() {
        assert!(import_edges_str("").is_err());
        assert!(import_edges_str("1 2\n").is_err());
        assert!(import_edges_str("a b\nc d\ne f\n").is_err());
        assert!(import_edges_str("2 1\n1 3\n2 3\n").is_err());
    }

    #[test]
    fn snapshot_round_trip_preserves_everything() {
        let graph = crate::graph::generate(&GeneratorConfig::new(300, 1234)).unwrap().graph;
        let mut buf = Vec::new();
        write_snapshot(&graph, &mut buf).unwrap();
        let parsed = read_snapshot(&mut buf.as_slice()).unwrap();
        assert_eq!(parsed, graph);
        assert_eq!(parsed.seed(), 1234);
    }

    #[test]
    fn snapshot_rejects_bad_magic() {
        let graph = generate_graph(5, 0).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&graph, &mut buf).unwrap();
        buf[0] = b'X';
        assert!(matches!(read_snapshot(&mut buf.as_slice()), Err(Error::Snapshot(_))));
    }

    #[test]
    fn snapshot_rejects_truncation() {
        let graph = generate_graph(5, 0).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&graph, &mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_snapshot(&mut buf.as_slice()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn edge_list_round_trip(t in 0u64..120, seed in any::<u64>()) {
            let graph = generate_graph(t, seed).unwrap();
            let text = export_string(&graph);
            let parsed = import_edges_str(&text).unwrap();
            prop_assert_eq!(export_string(&parsed), text);
        }

        #[test]
        fn snapshot_round_trip(t in 0u64..120, seed in any::<u64>()) {
            let graph = generate_graph(t, seed).unwrap();
            let mut buf = Vec::new();
            write_snapshot(&graph, &mut buf).unwrap();
            let parsed = read_snapshot(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(parsed, graph);
        }
    }
}
