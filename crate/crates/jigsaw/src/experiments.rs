//! Seeded Monte Carlo campaigns: classification rates across the threshold,
//! duplicate/symmetry statistics, k-goodness rates and feasibility
//! probability cross-checks.
//!
//! Trial `i` of a run draws from the child stream `(seed, i)`, and all
//! aggregation is integer-valued and order-independent, so results are
//! byte-identical at any parallelism degree.

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::combinatorics::uea_probability_bound;
use crate::error::Result;
use crate::puzzle::{Assembly, JigSystem};
use crate::sampler::{box_of, sample_carving, RngStream};
use crate::solver::{classify, SearchBudget, Verdict};
use crate::structure::{exact_feasibility_probability, is_k_good};

/// Wilson score interval for a binomial rate.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Aggregated outcome of a classification campaign at one `(n, q)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub n: usize,
    pub q: u32,
    pub iota_kind: String,
    pub trials: u64,
    pub seed: u64,
    pub budget: SearchBudget,
    pub uea: u64,
    pub multiple: u64,
    pub undecided: u64,
    pub uva: u64,
    pub sum_duplicate_pairs: u64,
    pub sum_symmetric: u64,
    pub sum_nodes: u64,
}

impl TrialStats {
    pub fn uea_rate(&self) -> f64 {
        self.uea as f64 / self.trials as f64
    }

    pub fn uva_rate(&self) -> f64 {
        self.uva as f64 / self.trials as f64
    }

    pub fn multiple_rate(&self) -> f64 {
        self.multiple as f64 / self.trials as f64
    }

    pub fn undecided_rate(&self) -> f64 {
        self.undecided as f64 / self.trials as f64
    }

    pub fn mean_duplicate_pairs(&self) -> f64 {
        self.sum_duplicate_pairs as f64 / self.trials as f64
    }

    pub fn mean_symmetric(&self) -> f64 {
        self.sum_symmetric as f64 / self.trials as f64
    }

    pub fn mean_nodes(&self) -> f64 {
        self.sum_nodes as f64 / self.trials as f64
    }

    pub fn wilson_uea(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.uea, self.trials, z)
    }

    pub fn csv_header() -> &'static str {
        "n,q,iota_kind,trials,uea_rate,uva_rate,undecided_rate,mean_x,mean_y,mean_nodes,uea_bound_log10"
    }

    pub fn csv_row(&self) -> String {
        let bound_log10 = uea_probability_bound(self.n as u64, self.q as u64).1;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.q,
            self.iota_kind,
            self.trials,
            self.uea_rate(),
            self.uva_rate(),
            self.undecided_rate(),
            self.mean_duplicate_pairs(),
            self.mean_symmetric(),
            self.mean_nodes(),
            bound_log10,
        )
    }
}

/// Samples `trials` carvings and classifies each with the given limit and
/// budget. Deterministic for fixed `(seed, parameters, budget)`.
pub fn run_trials(
    n: usize,
    sys: &JigSystem,
    trials: u64,
    seed: u64,
    limit: usize,
    budget: SearchBudget,
) -> TrialStats {
    let outcomes: Vec<(Verdict, bool, u64, u64, u64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::child(seed, i);
            let w = sample_carving(n, sys, &mut rng);
            let out = classify(&w, sys, limit, budget);
            (
                out.verdict,
                out.uva,
                out.duplicate_pairs,
                out.symmetric_pieces,
                out.nodes_expanded,
            )
        })
        .collect();
    let mut stats = TrialStats {
        n,
        q: sys.q(),
        iota_kind: sys.iota_label(),
        trials,
        seed,
        budget,
        uea: 0,
        multiple: 0,
        undecided: 0,
        uva: 0,
        sum_duplicate_pairs: 0,
        sum_symmetric: 0,
        sum_nodes: 0,
    };
    for (verdict, uva, x, y, nodes) in outcomes {
        match verdict {
            Verdict::UniqueEdgeAssembly => stats.uea += 1,
            Verdict::MultipleNonsimilar => stats.multiple += 1,
            Verdict::Undecided => stats.undecided += 1,
        }
        stats.uva += uva as u64;
        stats.sum_duplicate_pairs += x;
        stats.sum_symmetric += y;
        stats.sum_nodes += nodes;
    }
    stats
}

/// One [`run_trials`] per `q`, with the per-`q` seed mixed from the master
/// seed so rows are statistically independent yet reproducible.
pub fn sweep(
    n: usize,
    qs: &[u32],
    kind: crate::sampler::IotaKind,
    trials: u64,
    seed: u64,
    limit: usize,
    budget: SearchBudget,
) -> Result<Vec<TrialStats>> {
    let mut rows = Vec::with_capacity(qs.len());
    for &q in qs {
        let sys = kind.make(q)?;
        rows.push(run_trials(n, &sys, trials, mix_seed(seed, q as u64), limit, budget));
    }
    Ok(rows)
}

/// SplitMix64 step, used to derive per-row seeds.
fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Duplicate/symmetry statistics only, no solving; cheap enough for
/// hundred-thousand-trial runs at any `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceStatSample {
    pub trials: u64,
    pub sum_duplicate_pairs: u64,
    pub sum_sq_duplicate_pairs: u128,
    pub sum_symmetric: u64,
    pub sum_sq_symmetric: u128,
}

impl PieceStatSample {
    pub fn mean_duplicate_pairs(&self) -> f64 {
        self.sum_duplicate_pairs as f64 / self.trials as f64
    }

    pub fn mean_symmetric(&self) -> f64 {
        self.sum_symmetric as f64 / self.trials as f64
    }

    /// Standard error of the duplicate-pair mean.
    pub fn sem_duplicate_pairs(&self) -> f64 {
        sem(self.sum_duplicate_pairs, self.sum_sq_duplicate_pairs, self.trials)
    }

    pub fn sem_symmetric(&self) -> f64 {
        sem(self.sum_symmetric, self.sum_sq_symmetric, self.trials)
    }
}

fn sem(sum: u64, sum_sq: u128, trials: u64) -> f64 {
    let n = trials as f64;
    let mean = sum as f64 / n;
    let var = (sum_sq as f64 / n - mean * mean).max(0.0);
    (var / n).sqrt()
}

/// Samples carvings and records X and Y per trial.
pub fn piece_stat_trials(n: usize, sys: &JigSystem, trials: u64, seed: u64) -> PieceStatSample {
    let per_trial: Vec<(u64, u64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::child(seed, i);
            let w = sample_carving(n, sys, &mut rng);
            let box_ = box_of(&w, sys);
            (box_.duplicate_pairs(), box_.symmetric_pieces())
        })
        .collect();
    let mut sample = PieceStatSample {
        trials,
        sum_duplicate_pairs: 0,
        sum_sq_duplicate_pairs: 0,
        sum_symmetric: 0,
        sum_sq_symmetric: 0,
    };
    for (x, y) in per_trial {
        sample.sum_duplicate_pairs += x;
        sample.sum_sq_duplicate_pairs += (x as u128) * (x as u128);
        sample.sum_symmetric += y;
        sample.sum_sq_symmetric += (y as u128) * (y as u128);
    }
    sample
}

/// Fraction of sampled carvings whose planted assembly is `k`-good.
#[derive(Debug, Clone)]
pub struct KGoodStats {
    pub n: usize,
    pub q: u32,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    pub good: u64,
}

impl KGoodStats {
    pub fn rate(&self) -> f64 {
        self.good as f64 / self.trials as f64
    }

    pub fn wilson(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.good, self.trials, z)
    }
}

pub fn kgood_rate(
    n: usize,
    sys: &JigSystem,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<KGoodStats> {
    let planted = Assembly::planted(n);
    // validate arguments once up front
    {
        let mut rng = RngStream::child(seed, 0);
        let w = sample_carving(n, sys, &mut rng);
        is_k_good(&planted, &w, sys, k)?;
    }
    let good = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::child(seed, i);
            let w = sample_carving(n, sys, &mut rng);
            is_k_good(&planted, &w, sys, k).unwrap() as u64
        })
        .sum();
    Ok(KGoodStats { n, q: sys.q(), k, trials, seed, good })
}

/// Empirical feasibility probability of an assembly next to its exact
/// value.
#[derive(Debug, Clone)]
pub struct FeasibilityMc {
    pub trials: u64,
    pub seed: u64,
    pub feasible: u64,
    pub exact: f64,
    pub exact_log10: f64,
    pub contour_edges: usize,
    pub cycles: usize,
}

impl FeasibilityMc {
    pub fn empirical(&self) -> f64 {
        self.feasible as f64 / self.trials as f64
    }

    pub fn abs_diff(&self) -> f64 {
        (self.empirical() - self.exact).abs()
    }

    /// Binomial standard deviation of the empirical rate at the exact
    /// probability.
    pub fn sigma(&self) -> f64 {
        (self.exact * (1.0 - self.exact) / self.trials as f64).sqrt()
    }

    pub fn sigma_distance(&self) -> f64 {
        let s = self.sigma();
        if s == 0.0 {
            if self.abs_diff() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs_diff() / s
        }
    }
}

/// Samples carvings and tests feasibility of `a` under each, reporting the
/// empirical rate against the exact probability.
pub fn feasibility_mc(
    a: &Assembly,
    sys: &JigSystem,
    trials: u64,
    seed: u64,
) -> Result<FeasibilityMc> {
    let exact = exact_feasibility_probability(a, sys)?;
    let n = a.n();
    let feasible = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::child(seed, i);
            let w = sample_carving(n, sys, &mut rng);
            crate::solver::is_feasible(a, &w, sys) as u64
        })
        .sum();
    Ok(FeasibilityMc {
        trials,
        seed,
        feasible,
        exact: exact.exact.to_f64().unwrap_or(0.0),
        exact_log10: exact.log10,
        contour_edges: exact.contour_edges,
        cycles: exact.cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{make_jig_system, IotaKind};

    #[test]
    fn wilson_matches_reference_values() {
        let (lo, hi) = wilson_interval(5, 100, 1.96);
        assert!((lo - 0.02154336145631356).abs() < 1e-9);
        assert!((hi - 0.11175196527208817).abs() < 1e-9);
        assert_eq!(wilson_interval(0, 0, 1.96), (0.0, 1.0));
    }

    #[test]
    fn rates_partition_and_uva_below_uea() {
        let sys = make_jig_system(3, 3).unwrap();
        let stats = run_trials(2, &sys, 50, 17, 2, SearchBudget::UNLIMITED);
        assert_eq!(stats.uea + stats.multiple + stats.undecided, stats.trials);
        assert!(stats.uva <= stats.uea);
        assert_eq!(stats.undecided, 0); // unlimited budget, run terminated
    }

    #[test]
    fn q1_trials_are_all_uea_never_uva() {
        let sys = make_jig_system(1, 1).unwrap();
        let stats = run_trials(3, &sys, 10, 3, 2, SearchBudget::UNLIMITED);
        assert_eq!(stats.uea, 10);
        assert_eq!(stats.uva, 0);
    }

    #[test]
    fn single_cell_puzzles_are_uva() {
        let sys = make_jig_system(4, 0).unwrap();
        let stats = run_trials(1, &sys, 20, 5, 2, SearchBudget::UNLIMITED);
        assert_eq!(stats.uva, 20);
    }

    #[test]
    fn trials_are_deterministic_across_thread_counts() {
        let sys = make_jig_system(2, 2).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| run_trials(2, &sys, 40, 99, 2, SearchBudget::UNLIMITED))
        };
        let serial = run(1);
        let parallel = run(4);
        assert_eq!(serial, parallel);
        assert_eq!(serial.csv_row(), parallel.csv_row());
    }

    #[test]
    fn sweep_emits_one_row_per_q() {
        let rows = sweep(
            2,
            &[1, 2],
            IotaKind::Identity,
            10,
            7,
            2,
            SearchBudget::UNLIMITED,
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].q, 1);
        assert_eq!(rows[1].q, 2);
        assert!(TrialStats::csv_header().starts_with("n,q,iota_kind"));
    }

    #[test]
    fn piece_stats_match_exact_expectation_small() {
        let sys = make_jig_system(2, 2).unwrap();
        let sample = piece_stat_trials(3, &sys, 4000, 123);
        let exact = crate::combinatorics::expected_piece_stats(3, &sys).unwrap();
        let e_y = exact.expected_symmetric.to_f64().unwrap();
        let e_x = exact.expected_duplicate_pairs.to_f64().unwrap();
        assert!((sample.mean_symmetric() - e_y).abs() <= 3.0 * sample.sem_symmetric());
        assert!(
            (sample.mean_duplicate_pairs() - e_x).abs() <= 3.0 * sample.sem_duplicate_pairs()
        );
    }

    #[test]
    fn kgood_rejects_bad_window() {
        let sys = make_jig_system(4, 4).unwrap();
        assert!(kgood_rate(3, &sys, 4, 5, 1).is_err());
    }

    #[test]
    fn kgood_rate_near_one_with_many_types() {
        // q far above the birthday scale for 2n(n+1) edges
        let n = 6;
        let q = 100_000;
        let sys = make_jig_system(q, q).unwrap();
        let stats = kgood_rate(n, &sys, 2, 40, 11).unwrap();
        assert!(stats.rate() > 0.9, "rate {}", stats.rate());
    }

    #[test]
    fn feasibility_mc_contour_free_is_exactly_one() {
        let sys = make_jig_system(3, 3).unwrap();
        let a = Assembly::planted(3);
        let mc = feasibility_mc(&a, &sys, 500, 2).unwrap();
        assert_eq!(mc.feasible, 500);
        assert_eq!(mc.exact, 1.0);
        assert_eq!(mc.sigma_distance(), 0.0);
    }

    #[test]
    fn mix_seed_changes_with_salt() {
        assert_ne!(mix_seed(1, 2), mix_seed(1, 3));
        assert_eq!(mix_seed(1, 2), mix_seed(1, 2));
    }
}
