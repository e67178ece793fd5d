//! Exhaustive enumeration of connected subgraphs of the square lattice up
//! to translation, tabulated by edge count and number of bounded faces.
//!
//! Growth proceeds level by level: every connected graph with `E+1` edges
//! contains a connected subgraph with `E` edges (drop a leaf edge of a
//! spanning tree), so extending each canonical form by one incident edge
//! reaches everything. Canonical form = edge set translated so that the
//! lexicographically least vertex is the origin.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;

use crate::combinatorics::subgraph_count_bound;
use crate::error::{Error, Result};

/// Hard cap on the enumeration depth; the table at 8 edges already holds
/// tens of thousands of forms per level.
pub const MAX_ENUMERATION_EDGES: usize = 8;

/// Lattice point `(x, y)`.
pub type Point = (i32, i32);

/// A unit lattice edge, endpoints ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeEdge {
    pub a: Point,
    pub b: Point,
}

impl LatticeEdge {
    fn new(a: Point, b: Point) -> LatticeEdge {
        if a <= b {
            LatticeEdge { a, b }
        } else {
            LatticeEdge { a: b, b: a }
        }
    }

    fn translate(&self, dx: i32, dy: i32) -> LatticeEdge {
        LatticeEdge {
            a: (self.a.0 + dx, self.a.1 + dy),
            b: (self.b.0 + dx, self.b.1 + dy),
        }
    }
}

/// Geometry of one enumerated subgraph.
#[derive(Debug, Clone)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    /// Bounded faces, found by flood-filling the complement.
    pub faces: usize,
    /// Side-incidences of graph edges on the unbounded face.
    pub outer_perimeter: usize,
    /// `sum over v of (4 - deg v)`.
    pub degree_deficiency: i64,
}

/// One sample subgraph per `(E, F)` cell of the table.
#[derive(Debug, Clone)]
pub struct SubgraphWitness {
    pub edges: Vec<LatticeEdge>,
    pub stats: GraphStats,
}

/// Counts of connected lattice subgraphs per `(edges, bounded faces)`, with
/// the analytic bound for each realized cell.
#[derive(Debug, Clone)]
pub struct SubgraphTable {
    pub max_edges: usize,
    pub counts: BTreeMap<(usize, usize), u64>,
    pub witnesses: BTreeMap<(usize, usize), SubgraphWitness>,
}

impl SubgraphTable {
    pub fn count(&self, e: usize, f: usize) -> u64 {
        self.counts.get(&(e, f)).copied().unwrap_or(0)
    }

    pub fn bound(&self, e: usize, f: usize) -> Result<BigUint> {
        subgraph_count_bound(e as u64, f as u64)
    }

    /// Total forms with exactly `e` edges.
    pub fn total_with_edges(&self, e: usize) -> u64 {
        self.counts
            .iter()
            .filter(|((ee, _), _)| *ee == e)
            .map(|(_, &c)| c)
            .sum()
    }
}

fn vertices_of(edges: &[LatticeEdge]) -> Vec<Point> {
    let mut vs: Vec<Point> = edges.iter().flat_map(|e| [e.a, e.b]).collect();
    vs.sort();
    vs.dedup();
    vs
}

fn canonicalize(edges: &mut Vec<LatticeEdge>) {
    let (mx, my) = vertices_of(edges)
        .into_iter()
        .min()
        .expect("non-empty edge set");
    for e in edges.iter_mut() {
        *e = e.translate(-mx, -my);
    }
    edges.sort();
}

/// Flood-fill analysis of unit cells. Cell `(x, y)` is the unit square with
/// lower-left corner `(x, y)`; two side-adjacent cells communicate unless
/// the graph edge between them is present. Bounded faces are the cell
/// components not reachable from the padded outside ring, and each graph
/// edge contributes one perimeter incidence to the face on each of its two
/// sides.
fn analyze(edges: &[LatticeEdge]) -> GraphStats {
    let vs = vertices_of(edges);
    if edges.is_empty() {
        return GraphStats {
            vertices: vs.len().max(1),
            edges: 0,
            faces: 0,
            outer_perimeter: 0,
            degree_deficiency: 4 * vs.len().max(1) as i64,
        };
    }
    let edge_set: HashSet<LatticeEdge> = edges.iter().copied().collect();
    let min_x = vs.iter().map(|p| p.0).min().unwrap() - 1;
    let max_x = vs.iter().map(|p| p.0).max().unwrap();
    let min_y = vs.iter().map(|p| p.1).min().unwrap() - 1;
    let max_y = vs.iter().map(|p| p.1).max().unwrap();
    let width = (max_x - min_x + 1) as usize;
    let height = (max_y - min_y + 1) as usize;
    let idx = |x: i32, y: i32| ((y - min_y) as usize) * width + (x - min_x) as usize;

    // union cells not separated by a graph edge
    let mut component: Vec<usize> = (0..width * height).collect();
    fn find(component: &mut Vec<usize>, mut i: usize) -> usize {
        while component[i] != i {
            component[i] = component[component[i]];
            i = component[i];
        }
        i
    }
    let union = |component: &mut Vec<usize>, a: usize, b: usize| {
        let ra = find(component, a);
        let rb = find(component, b);
        if ra != rb {
            component[ra] = rb;
        }
    };
    for y in min_y..=max_y {
        for x in min_x..=max_x {
            // right neighbour, blocked by vertical edge at x+1
            if x < max_x && !edge_set.contains(&LatticeEdge::new((x + 1, y), (x + 1, y + 1))) {
                union(&mut component, idx(x, y), idx(x + 1, y));
            }
            // upper neighbour, blocked by horizontal edge at y+1
            if y < max_y && !edge_set.contains(&LatticeEdge::new((x, y + 1), (x + 1, y + 1))) {
                union(&mut component, idx(x, y), idx(x, y + 1));
            }
        }
    }
    let outside = find(&mut component, idx(min_x, min_y));

    let mut face_sides: HashMap<usize, usize> = HashMap::new();
    for e in edges {
        let (c1, c2) = if e.a.0 == e.b.0 {
            // vertical edge at x = a.0 between cells left and right
            ((e.a.0 - 1, e.a.1), (e.a.0, e.a.1))
        } else {
            // horizontal edge at y = a.1 between cells below and above
            ((e.a.0, e.a.1 - 1), (e.a.0, e.a.1))
        };
        for (x, y) in [c1, c2] {
            let root = find(&mut component, idx(x, y));
            *face_sides.entry(root).or_insert(0) += 1;
        }
    }
    let outer_perimeter = face_sides.get(&outside).copied().unwrap_or(0);
    let bounded: Vec<usize> = {
        let mut roots: HashSet<usize> = HashSet::new();
        for y in min_y..=max_y {
            for x in min_x..=max_x {
                let r = find(&mut component, idx(x, y));
                if r != outside {
                    roots.insert(r);
                }
            }
        }
        roots.into_iter().collect()
    };

    let mut degree: HashMap<Point, i64> = HashMap::new();
    for e in edges {
        *degree.entry(e.a).or_insert(0) += 1;
        *degree.entry(e.b).or_insert(0) += 1;
    }
    let degree_deficiency = vs.iter().map(|v| 4 - degree[v]).sum();

    GraphStats {
        vertices: vs.len(),
        edges: edges.len(),
        faces: bounded.len(),
        outer_perimeter,
        degree_deficiency,
    }
}

/// Enumerates every connected subgraph with at most `max_edges` edges,
/// invoking `visit` once per canonical form. The `E = 0` single-vertex
/// graph is included.
pub fn enumerate_with(
    max_edges: usize,
    mut visit: impl FnMut(&[LatticeEdge], &GraphStats) -> Result<()>,
) -> Result<()> {
    if max_edges > MAX_ENUMERATION_EDGES {
        return Err(Error::invalid(format!(
            "enumeration is capped at {MAX_ENUMERATION_EDGES} edges, got {max_edges}"
        )));
    }
    visit(&[], &analyze(&[]))?;
    if max_edges == 0 {
        return Ok(());
    }
    let mut level: Vec<Vec<LatticeEdge>> = vec![
        vec![LatticeEdge::new((0, 0), (1, 0))],
        vec![LatticeEdge::new((0, 0), (0, 1))],
    ];
    for g in &level {
        visit(g, &analyze(g))?;
    }
    for _ in 2..=max_edges {
        let mut next: HashSet<Vec<LatticeEdge>> = HashSet::new();
        for g in &level {
            for v in vertices_of(g) {
                for neighbour in [
                    (v.0 + 1, v.1),
                    (v.0 - 1, v.1),
                    (v.0, v.1 + 1),
                    (v.0, v.1 - 1),
                ] {
                    let e = LatticeEdge::new(v, neighbour);
                    if g.contains(&e) {
                        continue;
                    }
                    let mut extended = g.clone();
                    extended.push(e);
                    canonicalize(&mut extended);
                    next.insert(extended);
                }
            }
        }
        level = next.into_iter().collect();
        level.sort();
        for g in &level {
            visit(g, &analyze(g))?;
        }
    }
    Ok(())
}

/// Builds the subgraph table up to `max_edges`, checking the Euler and
/// degree-deficiency identities for every enumerated graph and the count
/// bound for every `(E, F)` cell.
pub fn enumerate_lattice_subgraphs(max_edges: usize) -> Result<SubgraphTable> {
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut witnesses: BTreeMap<(usize, usize), SubgraphWitness> = BTreeMap::new();
    enumerate_with(max_edges, |edges, stats| {
        let (v, e, f) = (stats.vertices as i64, stats.edges as i64, stats.faces as i64);
        if v - e + f != 1 {
            return Err(Error::internal(format!(
                "Euler identity fails: V={v}, E={e}, F={f} for {edges:?}"
            )));
        }
        if stats.degree_deficiency != 4 * v - 2 * e || stats.degree_deficiency != 2 * e - 4 * f + 4
        {
            return Err(Error::internal(format!(
                "degree deficiency {} off for V={v}, E={e}, F={f}",
                stats.degree_deficiency
            )));
        }
        let key = (stats.edges, stats.faces);
        *counts.entry(key).or_insert(0) += 1;
        witnesses
            .entry(key)
            .or_insert_with(|| SubgraphWitness { edges: edges.to_vec(), stats: stats.clone() });
        Ok(())
    })?;
    for (&(e, f), &count) in &counts {
        let bound = subgraph_count_bound(e as u64, f as u64)?;
        if BigUint::from(count) > bound {
            return Err(Error::internal(format!(
                "count {count} exceeds bound {bound} at (E, F) = ({e}, {f})"
            )));
        }
    }
    Ok(SubgraphTable { max_edges, counts, witnesses })
}
