//! Random Apollonian Network generation.
//!
//! The process starts from a triangle on vertices 1,2,3 and, at each step
//! `j = 1..=t_max`, picks one of the currently active triangular faces
//! uniformly at random, inserts vertex `j + 3` inside it, and connects the
//! new vertex to the three face corners. The picked face is replaced by its
//! three children. After `t` steps the graph has `n = t + 3` vertices,
//! `m = 3t + 3` edges and `2t + 1` active faces, and is maximal planar.
//!
//! Face removal uses swap-replace: the picked slot is overwritten with one
//! child and the other two children are appended, so the active set stays a
//! flat array with O(1) update and exact uniform sampling by index.

use crate::error::{Error, Result};
use crate::rng::RanRng;

/// Largest supported step count; inserted vertex labels must fit in u32.
pub const MAX_STEPS: u64 = (u32::MAX - 4) as u64;

/// Default memory budget for generation (8 GiB).
pub const DEFAULT_MEM_LIMIT: u64 = 8 << 30;

/// Estimated bytes of working state per generation step (adjacency lists,
/// degrees, face store, genealogy, amortized growth slack).
const BYTES_PER_STEP: u64 = 176;

/// Configuration of one generation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    /// Number of insertion steps; 0 yields the initial triangle.
    pub t_max: u64,
    /// RNG seed. Identical (t_max, seed) produce bit-identical graphs.
    pub seed: u64,
    /// Memory budget in bytes; `None` means [`DEFAULT_MEM_LIMIT`].
    pub mem_limit: Option<u64>,
}

impl GeneratorConfig {
    pub fn new(t_max: u64, seed: u64) -> Self {
        GeneratorConfig { t_max, seed, mem_limit: None }
    }

    fn check_budget(&self) -> Result<()> {
        if self.t_max > MAX_STEPS {
            return Err(Error::StepLimit { t_max: self.t_max, max: MAX_STEPS });
        }
        let limit = self.mem_limit.unwrap_or(DEFAULT_MEM_LIMIT);
        let required = self.t_max.saturating_mul(BYTES_PER_STEP).saturating_add(4096);
        if required > limit {
            return Err(Error::MemoryBudget { t: self.t_max, required, limit });
        }
        Ok(())
    }
}

/// One active (or historical) triangular face.
///
/// Corners satisfy `a < b < c` and are pairwise adjacent in the graph. The
/// initial face has depth 1; every child face has its parent's depth plus 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub depth: u32,
    /// Index of this face's node in the [`FaceGenealogy`].
    pub node_id: u32,
}

impl Face {
    pub fn corners(&self) -> [u32; 3] {
        [self.a, self.b, self.c]
    }
}

/// Flat array of the active faces, supporting O(1) uniform sampling.
///
/// After `t` steps it holds exactly `2t + 1` faces, and each is picked with
/// probability `1 / (2t + 1)` at the next step.
#[derive(Debug, Clone, Default)]
pub struct FaceStore {
    active: Vec<Face>,
}

impl FaceStore {
    pub fn count(&self) -> usize {
        self.active.len()
    }

    pub fn get(&self, index: usize) -> Face {
        self.active[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Face> {
        self.active.iter()
    }

    pub fn max_depth(&self) -> u32 {
        self.active.iter().map(|f| f.depth).max().unwrap_or(0)
    }
}

const NO_NODE: u32 = u32::MAX;

/// One node of the subdivision genealogy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenealogyNode {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub depth: u32,
    parent: u32,
    first_child: u32,
}

impl GenealogyNode {
    pub fn parent(&self) -> Option<u32> {
        (self.parent != NO_NODE).then_some(self.parent)
    }

    /// The three children, created consecutively, or `None` for a leaf.
    pub fn children(&self) -> Option<[u32; 3]> {
        (self.first_child != NO_NODE)
            .then(|| [self.first_child, self.first_child + 1, self.first_child + 2])
    }

    pub fn is_leaf(&self) -> bool {
        self.first_child == NO_NODE
    }
}

/// Parent/child records of all face subdivisions.
///
/// Subdividing a face turns its node into an internal node with exactly
/// three children, so after `t` steps the tree has `t` internal nodes and
/// `2t + 1` leaves; the leaves are exactly the active faces.
#[derive(Debug, Clone)]
pub struct FaceGenealogy {
    nodes: Vec<GenealogyNode>,
    max_depth: u32,
}

impl FaceGenealogy {
    fn new() -> Self {
        let root = GenealogyNode { a: 1, b: 2, c: 3, depth: 1, parent: NO_NODE, first_child: NO_NODE };
        FaceGenealogy { nodes: vec![root], max_depth: 1 }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // there is always the root face
    }

    pub fn node(&self, id: u32) -> &GenealogyNode {
        &self.nodes[id as usize]
    }

    pub fn root(&self) -> &GenealogyNode {
        &self.nodes[0]
    }

    /// Maximum face depth over all nodes (always realized by a leaf).
    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.len() - self.leaf_count()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GenealogyNode> {
        self.nodes.iter()
    }
}

/// Immutable Random Apollonian Network after `t` steps.
///
/// Vertex labels are 1-based: 1,2,3 are the initial triangle, and the
/// vertex inserted at step `j` has label `j + 3`. Neighbor lists are kept
/// in edge-creation order; the first three neighbors of an inserted vertex
/// are exactly the corners of the face it subdivided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RanGraph {
    t: u64,
    seed: u64,
    adjacency: Vec<Vec<u32>>,
    degrees: Vec<u32>,
}

impl RanGraph {
    pub fn t(&self) -> u64 {
        self.t
    }

    /// Seed the graph was generated from (0 for graphs parsed from an
    /// edge list, where the seed is unknown).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn m(&self) -> usize {
        (self.degrees.iter().map(|&d| d as u64).sum::<u64>() / 2) as usize
    }

    fn check_label(&self, v: u32) -> Result<()> {
        if v == 0 || v as usize > self.n() {
            return Err(Error::VertexOutOfRange { label: v, n: self.n() as u32 });
        }
        Ok(())
    }

    /// Degree of vertex `v` (1-based label).
    pub fn degree(&self, v: u32) -> Result<u32> {
        self.check_label(v)?;
        Ok(self.degrees[(v - 1) as usize])
    }

    /// All degrees, indexed by label minus 1.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn neighbors(&self, v: u32) -> Result<&[u32]> {
        self.check_label(v)?;
        Ok(&self.adjacency[(v - 1) as usize])
    }

    /// Step at which `v` was inserted: 0 for the initial triangle,
    /// `v - 3` otherwise.
    pub fn insertion_step(&self, v: u32) -> u64 {
        if v <= 3 { 0 } else { (v - 3) as u64 }
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        let (u, v) = if self.degrees[(u - 1) as usize] <= self.degrees[(v - 1) as usize] {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[(u - 1) as usize].contains(&v)
    }

    /// Edges as `(u, v)` with `u < v`, in creation order: the initial
    /// triangle first, then the three edges of each insertion step.
    pub fn edges_in_creation_order(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let triangle = [(1u32, 2u32), (1, 3), (2, 3)].into_iter();
        let steps = (4..=self.n() as u32).flat_map(move |v| {
            let nb = &self.adjacency[(v - 1) as usize];
            [(nb[0], v), (nb[1], v), (nb[2], v)].into_iter()
        });
        triangle.chain(steps)
    }

    /// Bytes of heap memory held by the graph (capacity accounting).
    pub fn memory_footprint(&self) -> u64 {
        let mut bytes = (self.adjacency.capacity() * std::mem::size_of::<Vec<u32>>()) as u64;
        for list in &self.adjacency {
            bytes += (list.capacity() * 4) as u64;
        }
        bytes + (self.degrees.capacity() * 4) as u64
    }

    pub(crate) fn from_parts(t: u64, seed: u64, adjacency: Vec<Vec<u32>>, degrees: Vec<u32>) -> Self {
        RanGraph { t, seed, adjacency, degrees }
    }
}

/// Compressed sparse row view of a graph, 0-based, for BFS and matvec.
#[derive(Debug, Clone)]
pub struct Csr {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Csr {
    pub fn from_graph(graph: &RanGraph) -> Self {
        let n = graph.n();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u32);
        let mut total = 0u32;
        for list in &graph.adjacency {
            total += list.len() as u32;
            offsets.push(total);
        }
        let mut targets = Vec::with_capacity(total as usize);
        for list in &graph.adjacency {
            targets.extend(list.iter().map(|&w| w - 1));
        }
        Csr { offsets, targets }
    }

    /// Build from explicit 0-based edge pairs.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut deg = vec![0u32; n];
        for &(u, v) in edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u32);
        let mut total = 0u32;
        for &d in &deg {
            total += d;
            offsets.push(total);
        }
        let mut cursor: Vec<u32> = offsets[..n].to_vec();
        let mut targets = vec![0u32; total as usize];
        for &(u, v) in edges {
            targets[cursor[u as usize] as usize] = v;
            cursor[u as usize] += 1;
            targets[cursor[v as usize] as usize] = u;
            cursor[v as usize] += 1;
        }
        Csr { offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, u: u32) -> &[u32] {
        &self.targets[self.offsets[u as usize] as usize..self.offsets[u as usize + 1] as usize]
    }
}

/// Record of a single insertion step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsertionRecord {
    /// Step index, 1-based.
    pub step: u64,
    /// Index in the active face array that was picked.
    pub chosen_index: usize,
    /// The face that was subdivided.
    pub chosen_face: Face,
    /// Label of the inserted vertex (`step + 3`).
    pub new_vertex: u32,
}

/// Result of a finished generation run.
#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: RanGraph,
    pub faces: FaceStore,
    pub genealogy: FaceGenealogy,
}

/// In-progress generation state; drives the process step by step.
#[derive(Debug, Clone)]
pub struct GeneratorState {
    rng: RanRng,
    seed: u64,
    t: u64,
    adjacency: Vec<Vec<u32>>,
    degrees: Vec<u32>,
    faces: FaceStore,
    genealogy: FaceGenealogy,
}

impl GeneratorState {
    pub fn new(seed: u64) -> Self {
        let mut state = GeneratorState {
            rng: RanRng::new(seed),
            seed,
            t: 0,
            adjacency: Vec::new(),
            degrees: Vec::new(),
            faces: FaceStore::default(),
            genealogy: FaceGenealogy::new(),
        };
        state.install_triangle();
        state
    }

    /// Reset to the initial triangle under a new seed, keeping allocations.
    pub fn reset(&mut self, seed: u64) {
        self.rng = RanRng::new(seed);
        self.seed = seed;
        self.t = 0;
        self.adjacency.truncate(3);
        for list in &mut self.adjacency {
            list.clear();
        }
        self.degrees.clear();
        self.faces.active.clear();
        self.genealogy.nodes.clear();
        self.genealogy.max_depth = 1;
        self.genealogy.nodes.push(GenealogyNode {
            a: 1,
            b: 2,
            c: 3,
            depth: 1,
            parent: NO_NODE,
            first_child: NO_NODE,
        });
        self.install_triangle();
    }

    fn install_triangle(&mut self) {
        while self.adjacency.len() < 3 {
            self.adjacency.push(Vec::new());
        }
        self.adjacency[0].extend([2, 3]);
        self.adjacency[1].extend([1, 3]);
        self.adjacency[2].extend([1, 2]);
        self.degrees.extend([2, 2, 2]);
        self.faces.active.push(Face { a: 1, b: 2, c: 3, depth: 1, node_id: 0 });
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn m(&self) -> u64 {
        3 * self.t + 3
    }

    pub fn face_count(&self) -> usize {
        self.faces.count()
    }

    pub fn faces(&self) -> &FaceStore {
        &self.faces
    }

    pub fn genealogy(&self) -> &FaceGenealogy {
        &self.genealogy
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Neighbor list of vertex `v` (1-based) in the current graph.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[(v - 1) as usize]
    }

    /// Perform one step: sample a face uniformly and subdivide it.
    pub fn step(&mut self) -> InsertionRecord {
        let index = self.rng.index(self.faces.count());
        self.subdivide(index)
    }

    /// Subdivide the face at `index` in the active array.
    ///
    /// Exposed separately from [`step`](Self::step) so tests can drive the
    /// process with an explicit (possibly biased) face chooser.
    pub fn subdivide(&mut self, index: usize) -> InsertionRecord {
        let face = self.faces.active[index];
        self.t += 1;
        let v = (self.t + 3) as u32;

        self.adjacency.push(vec![face.a, face.b, face.c]);
        self.adjacency[(face.a - 1) as usize].push(v);
        self.adjacency[(face.b - 1) as usize].push(v);
        self.adjacency[(face.c - 1) as usize].push(v);
        self.degrees.push(3);
        self.degrees[(face.a - 1) as usize] += 1;
        self.degrees[(face.b - 1) as usize] += 1;
        self.degrees[(face.c - 1) as usize] += 1;

        let depth = face.depth + 1;
        let first = self.genealogy.nodes.len() as u32;
        for (x, y) in [(face.a, face.b), (face.a, face.c), (face.b, face.c)] {
            self.genealogy.nodes.push(GenealogyNode {
                a: x,
                b: y,
                c: v,
                depth,
                parent: face.node_id,
                first_child: NO_NODE,
            });
        }
        self.genealogy.nodes[face.node_id as usize].first_child = first;
        if depth > self.genealogy.max_depth {
            self.genealogy.max_depth = depth;
        }

        self.faces.active[index] = Face { a: face.a, b: face.b, c: v, depth, node_id: first };
        self.faces.active.push(Face { a: face.a, b: face.c, c: v, depth, node_id: first + 1 });
        self.faces.active.push(Face { a: face.b, b: face.c, c: v, depth, node_id: first + 2 });

        debug_assert_eq!(self.adjacency.len() as u64, self.t + 3);
        debug_assert_eq!(self.faces.count() as u64, 2 * self.t + 1);
        debug_assert_eq!(self.genealogy.nodes.len() as u64, 3 * self.t + 1);

        InsertionRecord { step: self.t, chosen_index: index, chosen_face: face, new_vertex: v }
    }

    /// Freeze the state into its immutable parts.
    pub fn finish(self) -> Generated {
        Generated {
            graph: RanGraph { t: self.t, seed: self.seed, adjacency: self.adjacency, degrees: self.degrees },
            faces: self.faces,
            genealogy: self.genealogy,
        }
    }
}

/// Generate a Random Apollonian Network.
///
/// Deterministic: the output is a pure function of `(t_max, seed)`.
pub fn generate(config: &GeneratorConfig) -> Result<Generated> {
    config.check_budget()?;
    let mut state = GeneratorState::new(config.seed);
    for _ in 0..config.t_max {
        state.step();
    }
    Ok(state.finish())
}

/// Convenience wrapper returning only the graph.
pub fn generate_graph(t_max: u64, seed: u64) -> Result<RanGraph> {
    generate(&GeneratorConfig::new(t_max, seed)).map(|g| g.graph)
}
