//! Core domain types: jig systems, carvings, pieces, piece boxes and
//! assemblies, plus the similarity relation between solutions.
//!
//! Conventions used throughout the crate:
//!
//! * Cells of the `n`x`n` grid are addressed `(row, col)` with `(0, 0)` in
//!   the top-left corner, row growing downwards.
//! * A piece's sides are listed in the cyclic order N, E, S, W.
//! * Orientation `k` in `Z_4` means the piece is rotated by `90k` degrees
//!   counterclockwise relative to its planted orientation, so one
//!   counterclockwise step maps the side tuple `(N, E, S, W)` to
//!   `(E, S, W, N)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A jig type. Valid values are `1..=q` for the ambient [`JigSystem`].
pub type Jig = u32;

/// Grid position `(row, col)`.
pub type Pos = (usize, usize);

// ---------------------------------------------------------------------------
// Directions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::North, Dir::East, Dir::South, Dir::West];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Dir {
        Self::ALL[i % 4]
    }

    pub fn opposite(self) -> Dir {
        Self::from_index(self.index() + 2)
    }

    /// Row/col displacement of the neighbouring cell in this direction.
    pub fn delta(self) -> (isize, isize) {
        match self {
            Dir::North => (-1, 0),
            Dir::East => (0, 1),
            Dir::South => (1, 0),
            Dir::West => (0, -1),
        }
    }

    /// The neighbour of `pos` in this direction inside an `n`x`n` grid.
    pub fn step(self, pos: Pos, n: usize) -> Option<Pos> {
        let (dr, dc) = self.delta();
        let r = pos.0 as isize + dr;
        let c = pos.1 as isize + dc;
        if r < 0 || c < 0 || r >= n as isize || c >= n as isize {
            None
        } else {
            Some((r as usize, c as usize))
        }
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dir::North => "N",
            Dir::East => "E",
            Dir::South => "S",
            Dir::West => "W",
        };
        f.write_str(s)
    }
}

// ---------------------------------------------------------------------------
// Jig systems
// ---------------------------------------------------------------------------

/// The jig alphabet `1..=q` together with the fitting involution `iota`.
///
/// A jig of type `j` fits exactly with jigs of type `iota(j)`; `iota` being
/// an involution makes fitting symmetric. Edge-matching puzzles are the
/// special case `iota = id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JigSystem {
    q: Jig,
    iota: Vec<Jig>,
}

impl JigSystem {
    pub fn new(q: Jig, iota: Vec<Jig>) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("q must be at least 1"));
        }
        if iota.len() != q as usize {
            return Err(Error::invalid(format!(
                "iota has {} entries, expected {}",
                iota.len(),
                q
            )));
        }
        for (i, &j) in iota.iter().enumerate() {
            if j < 1 || j > q {
                return Err(Error::JigOutOfRange { jig: j, q });
            }
            let back = iota[j as usize - 1];
            if back != i as Jig + 1 {
                return Err(Error::NotAnInvolution {
                    jig: i as Jig + 1,
                    round_trip: iota[back as usize - 1],
                });
            }
        }
        Ok(JigSystem { q, iota })
    }

    /// The edge-matching system: every jig type fits itself.
    pub fn identity(q: Jig) -> Result<Self> {
        Self::new(q, (1..=q).collect())
    }

    pub fn q(&self) -> Jig {
        self.q
    }

    /// `iota(j)`. Panics if `j` is out of range; use [`JigSystem::fits`] for
    /// checked queries on untrusted values.
    pub fn iota(&self, j: Jig) -> Jig {
        self.iota[j as usize - 1]
    }

    pub fn iota_table(&self) -> &[Jig] {
        &self.iota
    }

    /// Whether a jig of type `a` fits next to a jig of type `b`.
    pub fn fits(&self, a: Jig, b: Jig) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.iota(a) == b)
    }

    pub fn check(&self, j: Jig) -> Result<()> {
        if j < 1 || j > self.q {
            Err(Error::JigOutOfRange { jig: j, q: self.q })
        } else {
            Ok(())
        }
    }

    /// Number of self-fitting jig types (fixed points of `iota`).
    pub fn self_fitting(&self) -> Jig {
        self.iota
            .iter()
            .enumerate()
            .filter(|(i, &j)| j == *i as Jig + 1)
            .count() as Jig
    }

    /// Canonical key of a dual-edge type: `min(j, iota(j))` identifies the
    /// unordered pair `{j, iota(j)}`.
    pub fn edge_type(&self, j: Jig) -> Jig {
        self.iota(j).min(j)
    }

    /// Short label for reports: `identity`, `paired`, or `mixed:<s>` with
    /// `s` the number of self-fitting types.
    pub fn iota_label(&self) -> String {
        let s = self.self_fitting();
        if s == self.q {
            "identity".to_string()
        } else if s == self.q % 2 {
            "paired".to_string()
        } else {
            format!("mixed:{s}")
        }
    }
}

// ---------------------------------------------------------------------------
// Pieces
// ---------------------------------------------------------------------------

/// Rotational symmetry class of a piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Symmetry {
    /// All four rotations are distinct.
    Asymmetric,
    /// Opposite sides equal (N = S, E = W) but not all four.
    HalfTurn,
    /// All four sides equal.
    QuarterTurn,
}

impl Symmetry {
    /// Size of the rotation orbit: 4, 2 or 1.
    pub fn orbit_len(self) -> usize {
        match self {
            Symmetry::Asymmetric => 4,
            Symmetry::HalfTurn => 2,
            Symmetry::QuarterTurn => 1,
        }
    }
}

/// A jigsaw piece: four jig types in cyclic order N, E, S, W.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Piece {
    sides: [Jig; 4],
}

impl Piece {
    pub fn new(north: Jig, east: Jig, south: Jig, west: Jig) -> Piece {
        Piece {
            sides: [north, east, south, west],
        }
    }

    pub fn sides(&self) -> [Jig; 4] {
        self.sides
    }

    pub fn side(&self, dir: Dir) -> Jig {
        self.sides[dir.index()]
    }

    /// The piece rotated `k` quarter turns counterclockwise.
    pub fn rotated_ccw(&self, k: u8) -> Piece {
        let k = (k % 4) as usize;
        let mut sides = [0; 4];
        for (i, slot) in sides.iter_mut().enumerate() {
            *slot = self.sides[(i + k) % 4];
        }
        Piece { sides }
    }

    /// The jig presented in direction `dir` when the piece is placed with
    /// orientation `k`.
    pub fn facing(&self, dir: Dir, k: u8) -> Jig {
        self.sides[(dir.index() + k as usize) % 4]
    }

    /// Lexicographically least rotation.
    pub fn canonical(&self) -> Piece {
        let mut best = *self;
        for k in 1..4 {
            let r = self.rotated_ccw(k);
            if r < best {
                best = r;
            }
        }
        best
    }

    pub fn symmetry(&self) -> Symmetry {
        let [n, e, s, w] = self.sides;
        if n == e && e == s && s == w {
            Symmetry::QuarterTurn
        } else if n == s && e == w {
            Symmetry::HalfTurn
        } else {
            Symmetry::Asymmetric
        }
    }

    /// Canonical form and symmetry class in one call.
    pub fn canonicalize(&self) -> (Piece, Symmetry) {
        (self.canonical(), self.symmetry())
    }

    /// The distinct rotations of this piece (4, 2 or 1 tuples).
    pub fn distinct_rotations(&self) -> Vec<Piece> {
        let mut out = Vec::with_capacity(4);
        for k in 0..4 {
            let r = self.rotated_ccw(k);
            if !out.contains(&r) {
                out.push(r);
            }
        }
        out
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [n, e, s, w] = self.sides;
        write!(f, "({n},{e},{s},{w})")
    }
}

// ---------------------------------------------------------------------------
// Carvings
// ---------------------------------------------------------------------------

/// An assignment of jig types to all `2n(n+1)` piece-edge sides of the grid.
///
/// Storage is piece-side oriented:
///
/// * `north[r][c]` (`r` in `0..=n`, `c` in `0..n`) is the horizontal edge
///   between row `r-1` and row `r`. For `r < n` it stores the north side of
///   the piece below, cell `(r, c)`; the piece above presents `iota` of it
///   on its south side. The bottom boundary row `r = n` stores the south
///   side of cell `(n-1, c)` directly.
/// * `west[r][c]` (`r` in `0..n`, `c` in `0..=n`) is the vertical edge
///   between column `c-1` and column `c`. For `c < n` it stores the west
///   side of cell `(r, c)`; the east boundary column `c = n` stores the
///   east side of cell `(r, n-1)` directly.
///
/// Facing sides are complementary by construction, so the planted assembly
/// of any carving is feasible.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Carving {
    n: usize,
    north: Vec<Jig>,
    west: Vec<Jig>,
}

impl Carving {
    /// Builds a carving from row-major `north` ((n+1) * n values) and
    /// `west` (n * (n+1) values) arrays, validating every entry.
    pub fn from_flat(n: usize, north: Vec<Jig>, west: Vec<Jig>, sys: &JigSystem) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("grid side n must be at least 1"));
        }
        if north.len() != (n + 1) * n {
            return Err(Error::invalid(format!(
                "north stores {} values, expected {}",
                north.len(),
                (n + 1) * n
            )));
        }
        if west.len() != n * (n + 1) {
            return Err(Error::invalid(format!(
                "west stores {} values, expected {}",
                west.len(),
                n * (n + 1)
            )));
        }
        for &j in north.iter().chain(west.iter()) {
            sys.check(j)?;
        }
        Ok(Carving { n, north, west })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of stored edge values, `2n(n+1)`.
    pub fn edge_count(&self) -> usize {
        2 * self.n * (self.n + 1)
    }

    pub fn north_at(&self, r: usize, c: usize) -> Jig {
        debug_assert!(r <= self.n && c < self.n);
        self.north[r * self.n + c]
    }

    pub fn west_at(&self, r: usize, c: usize) -> Jig {
        debug_assert!(r < self.n && c <= self.n);
        self.west[r * (self.n + 1) + c]
    }

    pub fn north_flat(&self) -> &[Jig] {
        &self.north
    }

    pub fn west_flat(&self) -> &[Jig] {
        &self.west
    }

    /// The side tuple of the piece planted at cell `(r, c)`.
    pub fn piece(&self, r: usize, c: usize, sys: &JigSystem) -> Piece {
        let n = self.n;
        let north = self.north_at(r, c);
        let south = if r + 1 < n {
            sys.iota(self.north_at(r + 1, c))
        } else {
            self.north_at(n, c)
        };
        let west = self.west_at(r, c);
        let east = if c + 1 < n {
            sys.iota(self.west_at(r, c + 1))
        } else {
            self.west_at(r, n)
        };
        Piece::new(north, east, south, west)
    }

    /// Grid of all planted side tuples, row-major.
    pub fn piece_grid(&self, sys: &JigSystem) -> Vec<Piece> {
        let n = self.n;
        let mut grid = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                grid.push(self.piece(r, c, sys));
            }
        }
        grid
    }

    /// Reads a carving back off a grid of oriented side tuples whose facing
    /// sides are complementary.
    pub(crate) fn from_piece_grid(n: usize, grid: &[Piece]) -> Carving {
        debug_assert_eq!(grid.len(), n * n);
        let at = |r: usize, c: usize| grid[r * n + c];
        let mut north = vec![0; (n + 1) * n];
        let mut west = vec![0; n * (n + 1)];
        for c in 0..n {
            for r in 0..n {
                north[r * n + c] = at(r, c).side(Dir::North);
            }
            north[n * n + c] = at(n - 1, c).side(Dir::South);
        }
        for r in 0..n {
            for c in 0..n {
                west[r * (n + 1) + c] = at(r, c).side(Dir::West);
            }
            west[r * (n + 1) + n] = at(r, n - 1).side(Dir::East);
        }
        Carving { n, north, west }
    }

    /// The carving of the puzzle after a global quarter turn
    /// counterclockwise.
    pub fn rotate90(&self, sys: &JigSystem) -> Carving {
        let n = self.n;
        let grid = self.piece_grid(sys);
        let mut rotated = vec![Piece::new(0, 0, 0, 0); n * n];
        for r in 0..n {
            for c in 0..n {
                // cell (r, c) moves to (n-1-c, r) under a CCW turn
                rotated[(n - 1 - c) * n + r] = grid[r * n + c].rotated_ccw(1);
            }
        }
        Carving::from_piece_grid(n, &rotated)
    }

    /// All four global rotations, starting with `self`.
    pub fn rotations(&self, sys: &JigSystem) -> [Carving; 4] {
        let r1 = self.rotate90(sys);
        let r2 = r1.rotate90(sys);
        let r3 = r2.rotate90(sys);
        [self.clone(), r1, r2, r3]
    }

    /// Lexicographically least of the four global rotations; the canonical
    /// representative of this carving's similarity class.
    pub fn canonical(&self, sys: &JigSystem) -> Carving {
        self.rotations(sys).into_iter().min().unwrap()
    }
}

/// Whether two carvings are similar, i.e. equal up to a global rotation.
pub fn similar(w1: &Carving, w2: &Carving, sys: &JigSystem) -> Result<bool> {
    if w1.n() != w2.n() {
        return Err(Error::SizeMismatch {
            left: w1.n(),
            right: w2.n(),
        });
    }
    Ok(w1.rotations(sys).iter().any(|r| r == w2))
}

// ---------------------------------------------------------------------------
// Piece boxes
// ---------------------------------------------------------------------------

/// The unordered multiset of a puzzle's pieces: canonical piece tuples with
/// multiplicities summing to `n^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceBox {
    n: usize,
    counts: BTreeMap<Piece, u64>,
}

impl PieceBox {
    pub fn from_counts(n: usize, counts: BTreeMap<Piece, u64>) -> Result<Self> {
        let total: u64 = counts.values().sum();
        let expected = (n * n) as u64;
        if total != expected {
            return Err(Error::BoxSizeMismatch { total, n, expected });
        }
        for piece in counts.keys() {
            if piece.canonical() != *piece {
                return Err(Error::invalid(format!(
                    "box key {piece} is not in canonical form"
                )));
            }
        }
        Ok(PieceBox { n, counts })
    }

    /// Accumulates arbitrary pieces, canonicalizing each.
    pub fn from_pieces(n: usize, pieces: impl IntoIterator<Item = Piece>) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for p in pieces {
            *counts.entry(p.canonical()).or_insert(0) += 1;
        }
        Self::from_counts(n, counts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> u64 {
        (self.n * self.n) as u64
    }

    pub fn counts(&self) -> &BTreeMap<Piece, u64> {
        &self.counts
    }

    pub fn distinct_types(&self) -> usize {
        self.counts.len()
    }

    /// Number of unordered pairs of cells holding equal canonical pieces.
    pub fn duplicate_pairs(&self) -> u64 {
        self.counts.values().map(|&m| m * (m - 1) / 2).sum()
    }

    /// Number of pieces with half- or quarter-turn symmetry.
    pub fn symmetric_pieces(&self) -> u64 {
        self.counts
            .iter()
            .filter(|(p, _)| p.symmetry() != Symmetry::Asymmetric)
            .map(|(_, &m)| m)
            .sum()
    }
}

// ---------------------------------------------------------------------------
// Assemblies
// ---------------------------------------------------------------------------

/// Where a piece came from and how it is rotated relative to planted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    /// Planted position of the piece occupying this cell.
    pub origin: Pos,
    /// Quarter turns counterclockwise relative to planted.
    pub rotation: u8,
}

/// A placement of some (partial) or all (complete) pieces into the grid.
///
/// An assembly is purely combinatorial: it records which planted piece sits
/// where and how it is rotated, independent of any carving.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembly {
    n: usize,
    cells: BTreeMap<Pos, Placement>,
}

impl Assembly {
    pub fn from_placements(
        n: usize,
        placements: impl IntoIterator<Item = (Pos, Placement)>,
    ) -> Result<Self> {
        let mut cells = BTreeMap::new();
        let mut origins = std::collections::BTreeSet::new();
        for (pos, pl) in placements {
            if pos.0 >= n || pos.1 >= n {
                return Err(Error::invalid(format!(
                    "cell {pos:?} outside the {n}x{n} grid"
                )));
            }
            if pl.origin.0 >= n || pl.origin.1 >= n {
                return Err(Error::invalid(format!(
                    "origin {:?} outside the {n}x{n} grid",
                    pl.origin
                )));
            }
            if pl.rotation > 3 {
                return Err(Error::invalid("rotation must be in 0..4"));
            }
            if !origins.insert(pl.origin) {
                return Err(Error::invalid(format!(
                    "origin {:?} placed more than once",
                    pl.origin
                )));
            }
            if cells.insert(pos, pl).is_some() {
                return Err(Error::invalid(format!("cell {pos:?} placed more than once")));
            }
        }
        Ok(Assembly { n, cells })
    }

    /// The original assembly: every piece at its planted position,
    /// unrotated.
    pub fn planted(n: usize) -> Assembly {
        let cells = (0..n)
            .flat_map(|r| (0..n).map(move |c| ((r, c), Placement { origin: (r, c), rotation: 0 })))
            .collect();
        Assembly { n, cells }
    }

    /// The planted assembly rotated globally by `k` quarter turns
    /// counterclockwise.
    pub fn global_rotation(n: usize, k: u8) -> Assembly {
        let k = k % 4;
        let mut cells = BTreeMap::new();
        for r in 0..n {
            for c in 0..n {
                // planted cell (r, c) lands on rot^k(r, c)
                let mut pos = (r, c);
                for _ in 0..k {
                    pos = (n - 1 - pos.1, pos.0);
                }
                cells.insert(pos, Placement { origin: (r, c), rotation: k });
            }
        }
        Assembly { n, cells }
    }

    /// The planted assembly with the pieces at `a` and `b` exchanged.
    pub fn planted_with_swap(n: usize, a: Pos, b: Pos) -> Result<Assembly> {
        if a.0 >= n || a.1 >= n || b.0 >= n || b.1 >= n {
            return Err(Error::invalid("swap cells outside the grid"));
        }
        if a == b {
            return Err(Error::invalid("swap cells must differ"));
        }
        let mut asm = Assembly::planted(n);
        asm.cells.insert(a, Placement { origin: b, rotation: 0 });
        asm.cells.insert(b, Placement { origin: a, rotation: 0 });
        Ok(asm)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, pos: Pos) -> Option<Placement> {
        self.cells.get(&pos).copied()
    }

    pub fn cells(&self) -> impl Iterator<Item = (Pos, Placement)> + '_ {
        self.cells.iter().map(|(&p, &pl)| (p, pl))
    }

    /// Complete means every cell is occupied; origins are then a bijection
    /// because they are pairwise distinct by construction.
    pub fn is_complete(&self) -> bool {
        self.cells.len() == self.n * self.n
    }

    /// The side tuple shown by the piece occupying `pos`, for carving `w`.
    pub fn oriented_piece(&self, pos: Pos, w: &Carving, sys: &JigSystem) -> Option<Piece> {
        let pl = self.get(pos)?;
        Some(w.piece(pl.origin.0, pl.origin.1, sys).rotated_ccw(pl.rotation))
    }

    /// The planted half-edge (piece and physical side) that faces direction
    /// `dir` at cell `pos`.
    pub fn half_edge(&self, pos: Pos, dir: Dir) -> Option<HalfEdge> {
        let pl = self.get(pos)?;
        let side = Dir::from_index(dir.index() + pl.rotation as usize);
        Some(HalfEdge { origin: pl.origin, side })
    }
}

/// A side of a planted piece, identified by the piece's planted position and
/// the side's planted direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdge {
    pub origin: Pos,
    pub side: Dir,
}

impl HalfEdge {
    /// The half-edge this one faces in the planted assembly, if any
    /// (boundary sides face nothing).
    pub fn planted_partner(&self, n: usize) -> Option<HalfEdge> {
        let pos = self.side.step(self.origin, n)?;
        Some(HalfEdge { origin: pos, side: self.side.opposite() })
    }
}

/// Reads the carving induced by reassembling `w`'s pieces according to the
/// complete assembly `a`. Errors if `a` is incomplete or infeasible.
pub fn carving_of_assembly(a: &Assembly, w: &Carving, sys: &JigSystem) -> Result<Carving> {
    if a.n() != w.n() {
        return Err(Error::SizeMismatch { left: a.n(), right: w.n() });
    }
    if !a.is_complete() {
        return Err(Error::IncompleteAssembly);
    }
    let n = a.n();
    let mut grid = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            grid.push(a.oriented_piece((r, c), w, sys).unwrap());
        }
    }
    // all facing pairs must be complementary before reading the carving off
    for r in 0..n {
        for c in 0..n {
            let here = grid[r * n + c];
            if c + 1 < n {
                let east = grid[r * n + c + 1];
                if sys.iota(here.side(Dir::East)) != east.side(Dir::West) {
                    return Err(Error::InfeasibleAssembly);
                }
            }
            if r + 1 < n {
                let south = grid[(r + 1) * n + c];
                if sys.iota(here.side(Dir::South)) != south.side(Dir::North) {
                    return Err(Error::InfeasibleAssembly);
                }
            }
        }
    }
    Ok(Carving::from_piece_grid(n, &grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys_id(q: Jig) -> JigSystem {
        JigSystem::identity(q).unwrap()
    }

    fn carving_1x1(n: Jig, e: Jig, s: Jig, w: Jig, sys: &JigSystem) -> Carving {
        // north rows: [N], [S]; west cols: [W, E]
        Carving::from_flat(1, vec![n, s], vec![w, e], sys).unwrap()
    }

    #[test]
    fn fits_matches_involution() {
        let id = sys_id(3);
        assert!(id.fits(3, 3).unwrap());
        assert!(!id.fits(1, 2).unwrap());

        let paired = JigSystem::new(2, vec![2, 1]).unwrap();
        assert!(paired.fits(1, 2).unwrap());
        assert!(!paired.fits(1, 1).unwrap());
        assert!(matches!(
            paired.fits(0, 1),
            Err(Error::JigOutOfRange { .. })
        ));
        assert!(matches!(
            paired.fits(1, 7),
            Err(Error::JigOutOfRange { .. })
        ));
    }

    #[test]
    fn involution_validation() {
        assert!(matches!(
            JigSystem::new(3, vec![3, 2, 2]),
            Err(Error::NotAnInvolution { .. })
        ));
        assert!(matches!(
            JigSystem::new(2, vec![1, 3]),
            Err(Error::JigOutOfRange { .. })
        ));
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(
            Piece::new(1, 1, 1, 1).canonicalize(),
            (Piece::new(1, 1, 1, 1), Symmetry::QuarterTurn)
        );
        assert_eq!(
            Piece::new(1, 2, 1, 2).canonicalize(),
            (Piece::new(1, 2, 1, 2), Symmetry::HalfTurn)
        );
        assert_eq!(
            Piece::new(2, 3, 4, 1).canonicalize(),
            (Piece::new(1, 2, 3, 4), Symmetry::Asymmetric)
        );
    }

    #[test]
    fn canonicalize_idempotent() {
        for n in 1..4 {
            for e in 1..4 {
                for s in 1..4 {
                    for w in 1..4 {
                        let p = Piece::new(n, e, s, w);
                        let c = p.canonical();
                        assert_eq!(c.canonical(), c);
                        assert_eq!(p.distinct_rotations().len(), p.symmetry().orbit_len());
                    }
                }
            }
        }
    }

    #[test]
    fn piece_derivation_is_consistent() {
        // 2x2 carving with all distinct values 1..12
        let sys = sys_id(12);
        let north: Vec<Jig> = (1..=6).collect();
        let west: Vec<Jig> = (7..=12).collect();
        let w = Carving::from_flat(2, north, west, &sys).unwrap();
        // facing sides complementary on both interior edges
        let p00 = w.piece(0, 0, &sys);
        let p01 = w.piece(0, 1, &sys);
        let p10 = w.piece(1, 0, &sys);
        assert_eq!(sys.iota(p00.side(Dir::East)), p01.side(Dir::West));
        assert_eq!(sys.iota(p00.side(Dir::South)), p10.side(Dir::North));
        // boundary sides are stored directly
        assert_eq!(p00.side(Dir::North), w.north_at(0, 0));
        assert_eq!(p10.side(Dir::South), w.north_at(2, 0));
        assert_eq!(p01.side(Dir::East), w.west_at(0, 2));
    }

    #[test]
    fn similarity_on_1x1() {
        let sys = sys_id(4);
        let w = carving_1x1(1, 2, 3, 4, &sys);
        let other = carving_1x1(1, 2, 4, 3, &sys);
        assert!(similar(&w, &w, &sys).unwrap());
        assert!(similar(&w, &w.rotate90(&sys), &sys).unwrap());
        // hand enumeration: rotations of (1,2,3,4) are (2,3,4,1), (3,4,1,2),
        // (4,1,2,3); (1,2,4,3) is none of them
        assert!(!similar(&w, &other, &sys).unwrap());
    }

    #[test]
    fn similar_rejects_size_mismatch() {
        let sys = sys_id(2);
        let w1 = Carving::from_flat(1, vec![1, 1], vec![1, 1], &sys).unwrap();
        let w2 = Carving::from_flat(2, vec![1; 6], vec![1; 6], &sys).unwrap();
        assert!(matches!(
            similar(&w1, &w2, &sys),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn rotation_of_1x1_shifts_tuple() {
        let sys = sys_id(4);
        let w = carving_1x1(1, 2, 3, 4, &sys);
        let r = w.rotate90(&sys);
        assert_eq!(r.piece(0, 0, &sys), Piece::new(2, 3, 4, 1));
        // four rotations return to start
        let back = r.rotate90(&sys).rotate90(&sys).rotate90(&sys);
        assert_eq!(back, w);
    }

    #[test]
    fn carving_of_planted_is_identity() {
        let sys = sys_id(5);
        let north: Vec<Jig> = (0..12).map(|i| (i % 5) + 1).collect();
        let west: Vec<Jig> = (0..12).map(|i| ((i * 2) % 5) + 1).collect();
        let w = Carving::from_flat(3, north, west, &sys).unwrap();
        let planted = Assembly::planted(3);
        assert_eq!(carving_of_assembly(&planted, &w, &sys).unwrap(), w);
        for k in 1..4 {
            let rot = Assembly::global_rotation(3, k);
            let expect = match k {
                1 => w.rotate90(&sys),
                2 => w.rotate90(&sys).rotate90(&sys),
                _ => w.rotate90(&sys).rotate90(&sys).rotate90(&sys),
            };
            assert_eq!(carving_of_assembly(&rot, &w, &sys).unwrap(), expect);
        }
    }

    #[test]
    fn carving_of_swapped_duplicates_is_unchanged() {
        // q = 1 makes every piece identical
        let sys = sys_id(1);
        let w = Carving::from_flat(3, vec![1; 12], vec![1; 12], &sys).unwrap();
        let asm = Assembly::planted_with_swap(3, (0, 0), (2, 2)).unwrap();
        assert_eq!(carving_of_assembly(&asm, &w, &sys).unwrap(), w);
    }

    #[test]
    fn carving_of_infeasible_assembly_errors() {
        let sys = sys_id(9);
        let north: Vec<Jig> = (1..=6).collect();
        let west: Vec<Jig> = (1..=6).map(|v| ((v + 2) % 9) + 1).collect();
        let w = Carving::from_flat(2, north, west, &sys).unwrap();
        let swapped = Assembly::planted_with_swap(2, (0, 0), (1, 1)).unwrap();
        assert!(matches!(
            carving_of_assembly(&swapped, &w, &sys),
            Err(Error::InfeasibleAssembly)
        ));
    }

    #[test]
    fn box_counts_validate() {
        let mut counts = BTreeMap::new();
        counts.insert(Piece::new(1, 1, 1, 1), 3);
        assert!(matches!(
            PieceBox::from_counts(2, counts.clone()),
            Err(Error::BoxSizeMismatch { .. })
        ));
        counts.insert(Piece::new(2, 1, 1, 1), 1);
        assert!(matches!(
            PieceBox::from_counts(2, counts),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn iota_labels() {
        assert_eq!(sys_id(4).iota_label(), "identity");
        let paired = JigSystem::new(4, vec![2, 1, 4, 3]).unwrap();
        assert_eq!(paired.iota_label(), "paired");
        let mixed = JigSystem::new(4, vec![1, 2, 4, 3]).unwrap();
        assert_eq!(mixed.iota_label(), "mixed:2");
    }
}
