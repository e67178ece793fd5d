//! Dual-graph machinery for assemblies: contour graphs, connected regions,
//! shape multiplicity, k-goodness, and the exact feasibility probability of
//! a partial assembly under a uniformly random carving.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::puzzle::{Assembly, Carving, Dir, HalfEdge, Jig, JigSystem, Pos};

/// A dual-graph edge: the common side of the two adjacent occupied cells
/// `a` and `b` (`a < b` in row-major order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DualEdge {
    pub a: Pos,
    pub b: Pos,
}

impl DualEdge {
    fn new(a: Pos, b: Pos) -> DualEdge {
        if a <= b {
            DualEdge { a, b }
        } else {
            DualEdge { a: b, b: a }
        }
    }

    /// Direction from `a` to `b` (East or South by normalization).
    pub fn dir(&self) -> Dir {
        if self.a.0 == self.b.0 {
            Dir::East
        } else {
            Dir::South
        }
    }

    /// Endpoints of the corresponding lattice-corner segment. Corner
    /// `(i, j)` is the point where row boundary `i` meets column boundary
    /// `j`, for `i, j` in `0..=n`.
    pub fn corners(&self) -> (Pos, Pos) {
        let (r, c) = self.a;
        match self.dir() {
            Dir::East => ((r, c + 1), (r + 1, c + 1)),
            _ => ((r + 1, c), (r + 1, c + 1)),
        }
    }
}

/// The subgraph of an assembly's dual graph consisting of all edges whose
/// half-edges were not facing each other in the planted assembly. Its
/// connected components (via shared lattice corners) are the contours.
#[derive(Debug, Clone)]
pub struct ContourGraph {
    n: usize,
    edges: Vec<DualEdge>,
    half_edges: Vec<(HalfEdge, HalfEdge)>,
    contours: Vec<Vec<usize>>,
}

impl ContourGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[DualEdge] {
        &self.edges
    }

    /// Half-edge pair across each contour edge, parallel to [`edges`].
    ///
    /// [`edges`]: ContourGraph::edges
    pub fn half_edges(&self) -> &[(HalfEdge, HalfEdge)] {
        &self.half_edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge indices of each contour.
    pub fn contours(&self) -> &[Vec<usize>] {
        &self.contours
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Grid overlay for debugging: cells are drawn as boxes, contour edges
    /// as `#`, other dual edges by their plain glyph. The format is
    /// diagnostic only.
    pub fn render(&self, a: &Assembly) -> String {
        let n = self.n;
        let contour: BTreeSet<DualEdge> = self.edges.iter().copied().collect();
        let mut out = String::new();
        for r in 0..=n {
            // horizontal boundary row r
            for c in 0..n {
                let edge = r > 0
                    && r < n
                    && a.get((r - 1, c)).is_some()
                    && a.get((r, c)).is_some();
                let glyph = if edge && contour.contains(&DualEdge::new((r - 1, c), (r, c))) {
                    "###"
                } else if edge {
                    "---"
                } else {
                    "   "
                };
                out.push('+');
                out.push_str(glyph);
            }
            out.push_str("+\n");
            if r == n {
                break;
            }
            for c in 0..=n {
                let edge = c > 0
                    && c < n
                    && a.get((r, c - 1)).is_some()
                    && a.get((r, c)).is_some();
                if edge && contour.contains(&DualEdge::new((r, c - 1), (r, c))) {
                    out.push('#');
                } else if edge {
                    out.push('|');
                } else {
                    out.push(' ');
                }
                if c < n {
                    out.push_str(if a.get((r, c)).is_some() { " . " } else { "   " });
                }
            }
            out.push('\n');
        }
        out
    }
}

/// All dual edges of `a`: one per pair of adjacent occupied cells.
pub fn dual_edges(a: &Assembly) -> Vec<DualEdge> {
    let n = a.n();
    let mut edges = Vec::new();
    for (pos, _) in a.cells() {
        for dir in [Dir::East, Dir::South] {
            if let Some(next) = dir.step(pos, n) {
                if a.get(next).is_some() {
                    edges.push(DualEdge::new(pos, next));
                }
            }
        }
    }
    edges.sort();
    edges
}

/// Builds the contour graph of an assembly. Purely combinatorial: an edge is
/// a contour edge iff its two half-edges do not face each other in the
/// planted assembly.
pub fn contour_graph(a: &Assembly) -> ContourGraph {
    let n = a.n();
    let mut edges = Vec::new();
    let mut half_edges = Vec::new();
    for e in dual_edges(a) {
        let dir = e.dir();
        let h1 = a.half_edge(e.a, dir).unwrap();
        let h2 = a.half_edge(e.b, dir.opposite()).unwrap();
        if h1.planted_partner(n) != Some(h2) {
            edges.push(e);
            half_edges.push((h1, h2));
        }
    }
    // contours: connected components over shared lattice corners
    let mut corner_to_edges: HashMap<Pos, Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        let (u, v) = e.corners();
        corner_to_edges.entry(u).or_default().push(i);
        corner_to_edges.entry(v).or_default().push(i);
    }
    let mut seen = vec![false; edges.len()];
    let mut contours = Vec::new();
    for start in 0..edges.len() {
        if seen[start] {
            continue;
        }
        let mut component = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            component.push(i);
            let (u, v) = edges[i].corners();
            for corner in [u, v] {
                for &j in &corner_to_edges[&corner] {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        component.sort();
        contours.push(component);
    }
    contours.sort();
    ContourGraph { n, edges, half_edges, contours }
}

/// Partitions the occupied cells into connected regions: maximal groups
/// reachable without crossing a contour edge. Verifies that each region
/// moves rigidly (one common rotation, planted displacements rotated
/// accordingly) and errors if that fails.
pub fn connected_regions(a: &Assembly) -> Result<Vec<Vec<Pos>>> {
    let n = a.n();
    let cg = contour_graph(a);
    let contour: BTreeSet<DualEdge> = cg.edges().iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut regions = Vec::new();
    for (start, _) in a.cells() {
        if seen.contains(&start) {
            continue;
        }
        let mut region = Vec::new();
        let mut stack = vec![start];
        seen.insert(start);
        while let Some(pos) = stack.pop() {
            region.push(pos);
            for dir in Dir::ALL {
                let Some(next) = dir.step(pos, n) else { continue };
                if a.get(next).is_none()
                    || seen.contains(&next)
                    || contour.contains(&DualEdge::new(pos, next))
                {
                    continue;
                }
                seen.insert(next);
                stack.push(next);
            }
        }
        region.sort();
        verify_rigid(a, &region)?;
        regions.push(region);
    }
    regions.sort();
    Ok(regions)
}

/// Within a region all pieces must share one rotation `k`, and planted
/// displacements must be the assembly displacements rotated by `k`
/// clockwise.
fn verify_rigid(a: &Assembly, region: &[Pos]) -> Result<()> {
    let first = region[0];
    let base = a.get(first).unwrap();
    for &pos in region {
        let pl = a.get(pos).unwrap();
        if pl.rotation != base.rotation {
            return Err(Error::internal(format!(
                "region holds mixed rotations at {first:?} and {pos:?}"
            )));
        }
        let d = (
            pos.0 as i64 - first.0 as i64,
            pos.1 as i64 - first.1 as i64,
        );
        let expect = rotate_vec_cw(d, base.rotation);
        let got = (
            pl.origin.0 as i64 - base.origin.0 as i64,
            pl.origin.1 as i64 - base.origin.1 as i64,
        );
        if expect != got {
            return Err(Error::internal(format!(
                "region displacement mismatch at {pos:?}: expected {expect:?}, got {got:?}"
            )));
        }
    }
    Ok(())
}

/// Rotates a (row, col) displacement by `k` quarter turns clockwise, the
/// inverse of the piece rotation.
fn rotate_vec_cw(v: (i64, i64), k: u8) -> (i64, i64) {
    let mut v = v;
    for _ in 0..(k % 4) {
        // clockwise in (row, col): (r, c) -> (c, -r)
        v = (v.1, -v.0);
    }
    v
}

/// The type of a dual edge under `(a, w)`: the unordered pair of
/// complementary jigs across it, keyed by the smaller value.
pub fn edge_type(a: &Assembly, e: DualEdge, w: &Carving, sys: &JigSystem) -> Jig {
    let h = a.half_edge(e.a, e.dir()).unwrap();
    let jig = w.piece(h.origin.0, h.origin.1, sys).side(h.side);
    sys.edge_type(jig)
}

/// Shape multiplicity of an edge set: the number of disjoint same-type
/// pairs, summed as floor(count/2) per edge type.
pub fn shape_multiplicity(a: &Assembly, edges: &[DualEdge], w: &Carving, sys: &JigSystem) -> u64 {
    let mut counts: BTreeMap<Jig, u64> = BTreeMap::new();
    for &e in edges {
        *counts.entry(edge_type(a, e, w, sys)).or_insert(0) += 1;
    }
    counts.values().map(|&c| c / 2).sum()
}

/// Whether every `k`x`k` window of the complete assembly `a` has shape
/// multiplicity at most 1 when the window touches the puzzle boundary and
/// at most 2 otherwise. `a` must be feasible with respect to `w`.
///
/// Windows are slid column by column with incremental type-count updates,
/// O(k) per shift.
pub fn is_k_good(a: &Assembly, w: &Carving, sys: &JigSystem, k: usize) -> Result<bool> {
    let n = a.n();
    if !a.is_complete() {
        return Err(Error::IncompleteAssembly);
    }
    if k % 2 != 0 || k < 2 {
        return Err(Error::invalid(format!("k must be even and positive, got {k}")));
    }
    if k > n {
        return Err(Error::invalid(format!("window k = {k} exceeds grid side n = {n}")));
    }

    // precompute edge types; horiz[r][c] joins (r,c)-(r,c+1), vert[r][c]
    // joins (r,c)-(r+1,c)
    let horiz: Vec<Vec<Jig>> = (0..n)
        .map(|r| {
            (0..n - 1)
                .map(|c| edge_type(a, DualEdge::new((r, c), (r, c + 1)), w, sys))
                .collect()
        })
        .collect();
    let vert: Vec<Vec<Jig>> = (0..n - 1)
        .map(|r| {
            (0..n)
                .map(|c| edge_type(a, DualEdge::new((r, c), (r + 1, c)), w, sys))
                .collect()
        })
        .collect();

    let mut counts: HashMap<Jig, u64> = HashMap::new();
    let add = |counts: &mut HashMap<Jig, u64>, sm: &mut u64, t: Jig| {
        let c = counts.entry(t).or_insert(0);
        if *c % 2 == 1 {
            *sm += 1;
        }
        *c += 1;
    };
    let remove = |counts: &mut HashMap<Jig, u64>, sm: &mut u64, t: Jig| {
        let c = counts.get_mut(&t).unwrap();
        if *c % 2 == 0 {
            *sm -= 1;
        }
        *c -= 1;
    };

    for i in 0..=(n - k) {
        counts.clear();
        let mut sm: u64 = 0;
        // window (i, 0)
        for r in i..i + k {
            for c in 0..k - 1 {
                add(&mut counts, &mut sm, horiz[r][c]);
            }
        }
        for r in i..i + k - 1 {
            for c in 0..k {
                add(&mut counts, &mut sm, vert[r][c]);
            }
        }
        for j in 0..=(n - k) {
            if j > 0 {
                // drop column j-1, adopt column j+k-1
                for r in i..i + k {
                    remove(&mut counts, &mut sm, horiz[r][j - 1]);
                    add(&mut counts, &mut sm, horiz[r][j + k - 2]);
                }
                for r in i..i + k - 1 {
                    remove(&mut counts, &mut sm, vert[r][j - 1]);
                    add(&mut counts, &mut sm, vert[r][j + k - 1]);
                }
            }
            let touches_boundary = i == 0 || j == 0 || i + k == n || j + k == n;
            let cap = if touches_boundary { 1 } else { 2 };
            if sm > cap {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Kind of a component in the alternating old/new half-edge graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    Path,
    Cycle,
}

#[derive(Debug, Clone)]
pub struct AltComponent {
    pub kind: ComponentKind,
    pub new_edges: usize,
    /// Vertex indices into [`OldNewGraph::vertices`].
    pub vertices: Vec<usize>,
}

/// The abstract graph on half-edges across the contour graph: a new edge
/// joins the two half-edges of each contour edge, an old edge joins
/// half-edges facing each other in the planted assembly. Every vertex meets
/// exactly one new edge and at most one old edge, so the graph decomposes
/// into alternating paths and cycles.
#[derive(Debug, Clone)]
pub struct OldNewGraph {
    pub vertices: Vec<HalfEdge>,
    pub new_edges: Vec<(usize, usize)>,
    pub old_edges: Vec<(usize, usize)>,
    pub components: Vec<AltComponent>,
}

impl OldNewGraph {
    pub fn cycle_count(&self) -> usize {
        self.components
            .iter()
            .filter(|c| c.kind == ComponentKind::Cycle)
            .count()
    }
}

/// Builds the old/new graph of a (partial) assembly and decomposes it,
/// checking the structural invariants along the way.
pub fn old_new_graph(a: &Assembly) -> Result<OldNewGraph> {
    let n = a.n();
    let cg = contour_graph(a);
    let mut vertices = Vec::new();
    let mut vertex_index: BTreeMap<HalfEdge, usize> = BTreeMap::new();
    let mut intern = |h: HalfEdge, vertices: &mut Vec<HalfEdge>| -> usize {
        *vertex_index.entry(h).or_insert_with(|| {
            vertices.push(h);
            vertices.len() - 1
        })
    };
    let mut new_edges = Vec::new();
    for &(h1, h2) in cg.half_edges() {
        let u = intern(h1, &mut vertices);
        let v = intern(h2, &mut vertices);
        new_edges.push((u.min(v), u.max(v)));
    }
    let mut old_edges = Vec::new();
    for (u, h) in vertices.iter().enumerate() {
        if let Some(partner) = h.planted_partner(n) {
            if let Some(&v) = vertex_index.get(&partner) {
                if u < v {
                    old_edges.push((u, v));
                }
            }
        }
    }

    // invariants of the construction
    let mut new_deg = vec![0usize; vertices.len()];
    for &(u, v) in &new_edges {
        new_deg[u] += 1;
        new_deg[v] += 1;
    }
    if new_deg.iter().any(|&d| d != 1) {
        return Err(Error::internal("a half-edge faces more than one partner"));
    }
    let new_set: BTreeSet<(usize, usize)> = new_edges.iter().copied().collect();
    if old_edges.iter().any(|e| new_set.contains(e)) {
        return Err(Error::internal(
            "a vertex pair is joined by both an old and a new edge",
        ));
    }

    // decompose into alternating components
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for &(u, v) in new_edges.iter().chain(old_edges.iter()) {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; vertices.len()];
    let mut components = Vec::new();
    for start in 0..vertices.len() {
        if seen[start] {
            continue;
        }
        let mut verts = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            verts.push(u);
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        verts.sort();
        let endpoints = verts.iter().filter(|&&u| adj[u].len() == 1).count();
        let kind = if endpoints == 0 { ComponentKind::Cycle } else { ComponentKind::Path };
        let vert_set: BTreeSet<usize> = verts.iter().copied().collect();
        let new_count = new_edges
            .iter()
            .filter(|(u, _)| vert_set.contains(u))
            .count();
        if kind == ComponentKind::Cycle && new_count < 2 {
            return Err(Error::internal("cycle with fewer than two new edges"));
        }
        components.push(AltComponent { kind, new_edges: new_count, vertices: verts });
    }
    components.sort_by_key(|c| c.vertices.first().copied());
    Ok(OldNewGraph { vertices, new_edges, old_edges, components })
}

/// Exact probability that a partial assembly is feasible under a uniformly
/// random carving, together with report-friendly companions.
#[derive(Debug, Clone)]
pub struct FeasibilityProbability {
    /// `q^-(E - c)` with `E` contour edges and `c` alternating cycles.
    pub exact: BigRational,
    pub log10: f64,
    pub contour_edges: usize,
    pub cycles: usize,
}

/// Computes the exact feasibility probability of `a` over uniform carvings.
///
/// Each alternating component is feasible independently: a path with `E'`
/// new edges fits with probability `q^-E'`, a cycle with `q^-(E'-1)`, so the
/// total is `q^-(E-c)`.
pub fn exact_feasibility_probability(
    a: &Assembly,
    sys: &JigSystem,
) -> Result<FeasibilityProbability> {
    let graph = old_new_graph(a)?;
    let e = graph.new_edges.len();
    let c = graph.cycle_count();
    let exponent = e - c;
    let q = BigInt::from(sys.q());
    let exact = BigRational::new(BigInt::one(), q.pow(exponent as u32));
    Ok(FeasibilityProbability {
        exact,
        log10: -(exponent as f64) * (sys.q() as f64).log10(),
        contour_edges: e,
        cycles: c,
    })
}
