//! Feasibility checking and exact enumeration of the solutions of a box,
//! deduplicated at carving level (the similarity quotient), plus a tiny
//! brute-force oracle for cross-checking.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::puzzle::{Assembly, Carving, Dir, Jig, JigSystem, Piece, PieceBox};

/// Search budget. Node counts are deterministic; the wall-clock timeout is
/// not and is reported as such.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub timeout: Option<Duration>,
}

impl SearchBudget {
    pub const UNLIMITED: SearchBudget = SearchBudget { max_nodes: u64::MAX, timeout: None };

    pub fn nodes(max_nodes: u64) -> SearchBudget {
        SearchBudget { max_nodes, timeout: None }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self::UNLIMITED
    }
}

/// Why the search returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The whole tree was explored.
    Exhausted,
    /// The requested number of distinct carvings was reached.
    LimitReached,
    /// The node budget ran out (deterministic).
    NodeBudget,
    /// The wall-clock timeout fired (not deterministic).
    Timeout,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Canonical (rotation-minimal) carvings of all solutions found.
    pub distinct_carvings: BTreeSet<Carving>,
    /// True iff the search tree was fully explored, in which case
    /// `distinct_carvings` is the complete set of similarity classes.
    pub exhausted: bool,
    pub nodes_expanded: u64,
    /// Unordered pairs of cells holding equal canonical pieces (X).
    pub duplicate_pairs: u64,
    /// Pieces with half- or quarter-turn symmetry (Y).
    pub symmetric_pieces: u64,
    pub stop: StopReason,
}

/// Whether every pair of adjacent occupied cells in `a` presents
/// complementary jigs under carving `w`. Boundary sides and sides facing
/// unoccupied cells are unconstrained.
pub fn is_feasible(a: &Assembly, w: &Carving, sys: &JigSystem) -> bool {
    let n = a.n();
    let tuples: HashMap<_, _> = a
        .cells()
        .map(|(pos, _)| (pos, a.oriented_piece(pos, w, sys).unwrap()))
        .collect();
    for (&pos, piece) in &tuples {
        for dir in [Dir::East, Dir::South] {
            let Some(next) = dir.step(pos, n) else { continue };
            let Some(neighbour) = tuples.get(&next) else { continue };
            if sys.iota(piece.side(dir)) != neighbour.side(dir.opposite()) {
                return false;
            }
        }
    }
    true
}

/// Marker slot for a required jig value that no oriented piece presents.
const NO_SUPPLY: u32 = u32::MAX;

/// One rotation of one box type, as actually placeable in the grid.
///
/// Supply slots are interned over the values that actually occur among the
/// oriented tuples, so placement bookkeeping is flat array arithmetic. The
/// `*_req_*` fields are the slots this tuple's east/south neighbours will
/// draw from.
#[derive(Clone, Copy)]
struct Oriented {
    tuple: Piece,
    type_idx: u32,
    w_slot: u32,
    n_slot: u32,
    wn_slot: u32,
    east_req_value: Jig,
    east_req_w_slot: u32,
    south_req_value: Jig,
    south_req_n_slot: u32,
}

struct CandidateIndex {
    oriented: Vec<Oriented>,
    orientations_of_type: Vec<Vec<u32>>,
    pool: Vec<u32>,
    by_wn: HashMap<(Jig, Jig), (u32, u32)>,
    by_w: HashMap<Jig, (u32, u32)>,
    by_n: HashMap<Jig, (u32, u32)>,
    all: (u32, u32),
    wn_slot_of: HashMap<(Jig, Jig), u32>,
    w_slots: usize,
    n_slots: usize,
    wn_slots: usize,
}

impl CandidateIndex {
    fn build(types: &[(Piece, u64)], sys: &JigSystem) -> CandidateIndex {
        struct Interner<K> {
            slots: HashMap<K, u32>,
        }
        impl<K: std::hash::Hash + Eq + Copy> Interner<K> {
            fn new() -> Self {
                Interner { slots: HashMap::new() }
            }
            fn intern(&mut self, key: K) -> u32 {
                let next = self.slots.len() as u32;
                *self.slots.entry(key).or_insert(next)
            }
            fn get(&self, key: K) -> u32 {
                self.slots.get(&key).copied().unwrap_or(NO_SUPPLY)
            }
        }

        let mut w_intern = Interner::new();
        let mut n_intern = Interner::new();
        let mut wn_intern = Interner::new();
        let mut tuples: Vec<(Piece, u32)> = Vec::new();
        let mut orientations_of_type = Vec::with_capacity(types.len());
        for (t, (piece, _)) in types.iter().enumerate() {
            let mut indices = Vec::new();
            for tuple in piece.distinct_rotations() {
                indices.push(tuples.len() as u32);
                tuples.push((tuple, t as u32));
                w_intern.intern(tuple.side(Dir::West));
                n_intern.intern(tuple.side(Dir::North));
                wn_intern.intern((tuple.side(Dir::West), tuple.side(Dir::North)));
            }
            orientations_of_type.push(indices);
        }
        let oriented: Vec<Oriented> = tuples
            .iter()
            .map(|&(tuple, type_idx)| {
                let east_req = sys.iota(tuple.side(Dir::East));
                let south_req = sys.iota(tuple.side(Dir::South));
                Oriented {
                    tuple,
                    type_idx,
                    w_slot: w_intern.get(tuple.side(Dir::West)),
                    n_slot: n_intern.get(tuple.side(Dir::North)),
                    wn_slot: wn_intern.get((tuple.side(Dir::West), tuple.side(Dir::North))),
                    east_req_value: east_req,
                    east_req_w_slot: w_intern.get(east_req),
                    south_req_value: south_req,
                    south_req_n_slot: n_intern.get(south_req),
                }
            })
            .collect();

        // group oriented tuples by the (west, north) jigs they present
        let mut wn: HashMap<(Jig, Jig), Vec<u32>> = HashMap::new();
        let mut w_only: HashMap<Jig, Vec<u32>> = HashMap::new();
        let mut n_only: HashMap<Jig, Vec<u32>> = HashMap::new();
        for (i, o) in oriented.iter().enumerate() {
            let w = o.tuple.side(Dir::West);
            let n = o.tuple.side(Dir::North);
            wn.entry((w, n)).or_default().push(i as u32);
            w_only.entry(w).or_default().push(i as u32);
            n_only.entry(n).or_default().push(i as u32);
        }
        let mut pool = Vec::new();
        let mut intern = |list: Vec<u32>| -> (u32, u32) {
            let start = pool.len() as u32;
            let len = list.len() as u32;
            pool.extend(list);
            (start, len)
        };
        let by_wn = wn.into_iter().map(|(k, v)| (k, intern(v))).collect();
        let by_w = w_only.into_iter().map(|(k, v)| (k, intern(v))).collect();
        let by_n = n_only.into_iter().map(|(k, v)| (k, intern(v))).collect();
        let all = intern((0..oriented.len() as u32).collect());
        let (w_slots, n_slots, wn_slots) = (
            w_intern.slots.len(),
            n_intern.slots.len(),
            wn_intern.slots.len(),
        );
        CandidateIndex {
            oriented,
            orientations_of_type,
            pool,
            by_wn,
            by_w,
            by_n,
            all,
            wn_slot_of: wn_intern.slots,
            w_slots,
            n_slots,
            wn_slots,
        }
    }
}

enum Flow {
    Continue,
    Stop,
}

struct Search<'a> {
    n: usize,
    sys: &'a JigSystem,
    index: CandidateIndex,
    remaining: Vec<u64>,
    /// Remaining supply per presented (west, north) pair / west / north jig
    /// slot, counting each orientation of each remaining piece once. Zero
    /// supply lets the search cut a branch before descending into it.
    avail_wn: Vec<i64>,
    avail_w: Vec<i64>,
    avail_n: Vec<i64>,
    grid: Vec<u32>,
    found: BTreeSet<Carving>,
    nodes: u64,
    limit: usize,
    max_nodes: u64,
    deadline: Option<Instant>,
    stop: StopReason,
}

impl Search<'_> {
    fn tuple_at(&self, cell: usize) -> Piece {
        self.index.oriented[self.grid[cell] as usize].tuple
    }

    fn adjust_supply(&mut self, type_idx: usize, delta: i64) {
        for &o in &self.index.orientations_of_type[type_idx] {
            let o = &self.index.oriented[o as usize];
            self.avail_wn[o.wn_slot as usize] += delta;
            self.avail_w[o.w_slot as usize] += delta;
            self.avail_n[o.n_slot as usize] += delta;
        }
    }

    /// True when placing oriented tuple `o` at `(r, c)` starves a
    /// neighbouring cell of every remaining candidate: the cell below needs
    /// a matching north side, the cell to the east a matching (west, north)
    /// pair.
    fn starves_neighbour(&self, r: usize, c: usize, o: &Oriented) -> bool {
        let n = self.n;
        if r + 1 < n
            && (o.south_req_n_slot == NO_SUPPLY || self.avail_n[o.south_req_n_slot as usize] == 0)
        {
            return true;
        }
        if c + 1 < n {
            if r == 0 {
                if o.east_req_w_slot == NO_SUPPLY || self.avail_w[o.east_req_w_slot as usize] == 0
                {
                    return true;
                }
            } else {
                let above = &self.index.oriented[self.grid[(r - 1) * n + c + 1] as usize];
                let slot = self
                    .index
                    .wn_slot_of
                    .get(&(o.east_req_value, above.south_req_value))
                    .copied()
                    .unwrap_or(NO_SUPPLY);
                if slot == NO_SUPPLY || self.avail_wn[slot as usize] == 0 {
                    return true;
                }
            }
        }
        false
    }

    fn record_solution(&mut self) -> Flow {
        let tuples: Vec<Piece> = (0..self.n * self.n).map(|i| self.tuple_at(i)).collect();
        let carving = Carving::from_piece_grid(self.n, &tuples).canonical(self.sys);
        self.found.insert(carving);
        if self.limit > 0 && self.found.len() >= self.limit {
            self.stop = StopReason::LimitReached;
            Flow::Stop
        } else {
            Flow::Continue
        }
    }

    fn dfs(&mut self, cell: usize) -> Flow {
        let n = self.n;
        if cell == n * n {
            return self.record_solution();
        }
        let (r, c) = (cell / n, cell % n);
        let west_req = (c > 0).then(|| self.sys.iota(self.tuple_at(cell - 1).side(Dir::East)));
        let north_req = (r > 0).then(|| self.sys.iota(self.tuple_at(cell - n).side(Dir::South)));
        let (start, len) = match (west_req, north_req) {
            (Some(w), Some(nr)) => match self.index.by_wn.get(&(w, nr)) {
                Some(&range) => range,
                None => return Flow::Continue,
            },
            (Some(w), None) => match self.index.by_w.get(&w) {
                Some(&range) => range,
                None => return Flow::Continue,
            },
            (None, Some(nr)) => match self.index.by_n.get(&nr) {
                Some(&range) => range,
                None => return Flow::Continue,
            },
            (None, None) => self.index.all,
        };
        for i in start..start + len {
            let cand = self.index.pool[i as usize];
            let type_idx = self.index.oriented[cand as usize].type_idx as usize;
            if self.remaining[type_idx] == 0 {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                self.stop = StopReason::NodeBudget;
                return Flow::Stop;
            }
            if self.nodes % 1024 == 0 {
                if let Some(deadline) = self.deadline {
                    if Instant::now() >= deadline {
                        self.stop = StopReason::Timeout;
                        return Flow::Stop;
                    }
                }
            }
            self.remaining[type_idx] -= 1;
            self.adjust_supply(type_idx, -1);
            self.grid[cell] = cand;
            let oriented = self.index.oriented[cand as usize];
            let flow = if self.starves_neighbour(r, c, &oriented) {
                Flow::Continue
            } else {
                self.dfs(cell + 1)
            };
            self.remaining[type_idx] += 1;
            self.adjust_supply(type_idx, 1);
            if let Flow::Stop = flow {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }
}

/// Enumerates the carvings of all solutions of `box_`, up to similarity.
///
/// Cells are filled in row-major order; candidates are indexed by the
/// (west, north) jig pair they must present, with a wildcard dimension on
/// the first row and column. Solutions differing by duplicate-piece
/// permutations, symmetric-piece rotations or a global rotation collapse
/// automatically because only the canonical induced carving is recorded.
///
/// `limit = 0` enumerates everything; otherwise the search stops as soon as
/// `limit` distinct carvings are known (`exhausted` is then false).
pub fn enumerate_solution_carvings(
    box_: &PieceBox,
    sys: &JigSystem,
    limit: usize,
    budget: SearchBudget,
) -> Result<SolveResult> {
    let n = box_.n();
    let total: u64 = box_.counts().values().sum();
    if total != (n * n) as u64 {
        return Err(Error::BoxSizeMismatch { total, n, expected: (n * n) as u64 });
    }
    for piece in box_.counts().keys() {
        for &side in &piece.sides() {
            sys.check(side)?;
        }
    }
    let types: Vec<(Piece, u64)> = box_.counts().iter().map(|(&p, &m)| (p, m)).collect();
    let index = CandidateIndex::build(&types, sys);
    let remaining: Vec<u64> = types.iter().map(|&(_, m)| m).collect();
    let mut avail_wn = vec![0i64; index.wn_slots];
    let mut avail_w = vec![0i64; index.w_slots];
    let mut avail_n = vec![0i64; index.n_slots];
    for o in &index.oriented {
        let m = types[o.type_idx as usize].1 as i64;
        avail_wn[o.wn_slot as usize] += m;
        avail_w[o.w_slot as usize] += m;
        avail_n[o.n_slot as usize] += m;
    }
    let mut search = Search {
        n,
        sys,
        index,
        remaining,
        avail_wn,
        avail_w,
        avail_n,
        grid: vec![u32::MAX; n * n],
        found: BTreeSet::new(),
        nodes: 0,
        limit,
        max_nodes: budget.max_nodes,
        deadline: budget.timeout.map(|t| Instant::now() + t),
        stop: StopReason::Exhausted,
    };
    let flow = search.dfs(0);
    let exhausted = matches!(flow, Flow::Continue);
    Ok(SolveResult {
        distinct_carvings: search.found,
        exhausted,
        nodes_expanded: search.nodes,
        duplicate_pairs: box_.duplicate_pairs(),
        symmetric_pieces: box_.symmetric_pieces(),
        stop: if exhausted { StopReason::Exhausted } else { search.stop },
    })
}

/// Brute-force oracle: walks every placement bijection and orientation
/// vector, filters by feasibility, and dedups carvings exactly like the
/// main solver. Examines `(n^2)! * 4^(n^2)` configurations, so it refuses
/// grids beyond 2x2.
pub fn naive_enumerate(box_: &PieceBox, sys: &JigSystem) -> Result<SolveResult> {
    let n = box_.n();
    if n > 2 {
        return Err(Error::invalid(format!(
            "naive enumeration is capped at n = 2, got n = {n}"
        )));
    }
    let mut pieces = Vec::new();
    for (&piece, &m) in box_.counts() {
        for _ in 0..m {
            pieces.push(piece);
        }
    }
    let cells = n * n;
    let mut found = BTreeSet::new();
    let mut configs = 0u64;
    for perm in (0..cells).permutations(cells) {
        for code in 0..4u32.pow(cells as u32) {
            configs += 1;
            let tuples: Vec<Piece> = (0..cells)
                .map(|i| pieces[perm[i]].rotated_ccw(((code >> (2 * i)) & 3) as u8))
                .collect();
            let mut ok = true;
            'fit: for r in 0..n {
                for c in 0..n {
                    let here = tuples[r * n + c];
                    if c + 1 < n
                        && sys.iota(here.side(Dir::East)) != tuples[r * n + c + 1].side(Dir::West)
                    {
                        ok = false;
                        break 'fit;
                    }
                    if r + 1 < n
                        && sys.iota(here.side(Dir::South))
                            != tuples[(r + 1) * n + c].side(Dir::North)
                    {
                        ok = false;
                        break 'fit;
                    }
                }
            }
            if ok {
                found.insert(Carving::from_piece_grid(n, &tuples).canonical(sys));
            }
        }
    }
    Ok(SolveResult {
        distinct_carvings: found,
        exhausted: true,
        nodes_expanded: configs,
        duplicate_pairs: box_.duplicate_pairs(),
        symmetric_pieces: box_.symmetric_pieces(),
        stop: StopReason::Exhausted,
    })
}

/// Classification of a carving's solution set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// At least two non-similar solutions exist.
    MultipleNonsimilar,
    /// Search exhausted with a single similarity class: unique edge
    /// assembly.
    UniqueEdgeAssembly,
    /// The budget ran out before a verdict.
    Undecided,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::MultipleNonsimilar => "MULTIPLE_NONSIMILAR",
            Verdict::UniqueEdgeAssembly => "UEA",
            Verdict::Undecided => "UNDECIDED",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyOutcome {
    pub verdict: Verdict,
    /// Unique vertex assembly: UEA with no duplicate and no symmetric
    /// pieces, so the only solutions are the four rotations of planted.
    pub uva: bool,
    pub duplicate_pairs: u64,
    pub symmetric_pieces: u64,
    pub distinct_found: usize,
    pub nodes_expanded: u64,
    pub exhausted: bool,
    pub stop: StopReason,
}

/// Classifies a carving by enumerating its box with the given limit
/// (2 suffices to decide "is there a second similarity class").
pub fn classify(
    w: &Carving,
    sys: &JigSystem,
    limit: usize,
    budget: SearchBudget,
) -> ClassifyOutcome {
    let box_ = crate::sampler::box_of(w, sys);
    let result = enumerate_solution_carvings(&box_, sys, limit, budget)
        .expect("box of a carving is well formed");
    let verdict = if result.distinct_carvings.len() >= 2 {
        Verdict::MultipleNonsimilar
    } else if result.exhausted {
        Verdict::UniqueEdgeAssembly
    } else {
        Verdict::Undecided
    };
    ClassifyOutcome {
        verdict,
        uva: verdict == Verdict::UniqueEdgeAssembly
            && result.duplicate_pairs == 0
            && result.symmetric_pieces == 0,
        duplicate_pairs: result.duplicate_pairs,
        symmetric_pieces: result.symmetric_pieces,
        distinct_found: result.distinct_carvings.len(),
        nodes_expanded: result.nodes_expanded,
        exhausted: result.exhausted,
        stop: result.stop,
    }
}
