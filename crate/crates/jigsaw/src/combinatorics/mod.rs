//! Closed-form counts, expectations and probability bounds, all in exact
//! big-integer / rational arithmetic with `log10` companions for reporting
//! (the raw magnitudes underflow doubles long before interesting sizes).

pub mod lattice;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::puzzle::JigSystem;

/// Binomial coefficient over arbitrary-size tops.
pub fn binomial(top: &BigUint, k: u64) -> BigUint {
    let mut result = BigUint::one();
    for i in 0..k {
        let i_big = BigUint::from(i);
        if *top <= i_big {
            return BigUint::zero();
        }
        result = result * (top - &i_big) / BigUint::from(i + 1);
    }
    result
}

/// Accurate `log10` of a big natural number via its top bits.
pub fn log10_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log10();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap();
    (top as f64).log10() + shift as f64 * std::f64::consts::LOG10_2
}

/// `log10` of a positive rational.
pub fn log10_ratio(x: &BigRational) -> f64 {
    log10_biguint(x.numer().magnitude()) - log10_biguint(x.denom().magnitude())
}

/// Number of piece types on `q` jig types: `(q^4 + q^2 + 2q) / 4` (the
/// rotation-orbit count: q quarter-symmetric, (q^2-q)/2 half-symmetric
/// orbits, (q^4-q^2)/4 asymmetric orbits).
pub fn count_piece_types(q: u64) -> BigUint {
    let q = BigUint::from(q);
    let total = q.pow(4) + q.pow(2) + 2u32 * &q;
    debug_assert!((&total % 4u32).is_zero());
    total / 4u32
}

/// Number of possible boxes of an `n`x`n` puzzle, solvable or not: multisets
/// of `n^2` pieces drawn from the available types.
pub fn count_boxes(n: u64, q: u64) -> BigUint {
    let types = count_piece_types(q);
    let cells = n * n;
    binomial(&(types + BigUint::from(cells - 1)), cells)
}

/// Upper bound on the probability of a unique edge assembly: at most four
/// carvings share a box, so `P(UEA) <= 4 * boxes * q^-2n(n+1)`. Exact for
/// every `n`, not only asymptotically.
pub fn uea_probability_bound(n: u64, q: u64) -> (BigRational, f64) {
    let numer = BigInt::from(4u32 * count_boxes(n, q));
    let denom = BigInt::from(q).pow((2 * n * (n + 1)) as u32);
    let bound = BigRational::new(numer, denom);
    let log10 = log10_ratio(&bound);
    (bound, log10)
}

/// Exact expectations of the duplicate-pair count X and the symmetric-piece
/// count Y over a uniformly random carving.
#[derive(Debug, Clone)]
pub struct PieceStats {
    /// `E[X]`: expected unordered pairs of cells with equal canonical
    /// pieces.
    pub expected_duplicate_pairs: BigRational,
    /// `E[Y] = n^2 / q^2`: expected pieces with rotational symmetry.
    pub expected_symmetric: BigRational,
    /// Probability that two pieces sharing no edge are duplicates.
    pub p_duplicate_nonadjacent: BigRational,
    /// Probability that two planted-adjacent pieces are duplicates.
    pub p_duplicate_adjacent: BigRational,
}

/// Computes [`PieceStats`]. The non-adjacent pair probability averages the
/// rotation-orbit size over a uniform tuple:
/// `(4q^4 - 2q^2 - q) / q^8`. Adjacent pairs share one edge; summing the
/// match count over the shared jig exactly gives
/// `((s+3)q^3 - (s+1)q - s) / q^7` with `s` the number of self-fitting
/// types, which is why the involution is a parameter here.
pub fn expected_piece_stats(n: u64, sys: &JigSystem) -> Result<PieceStats> {
    if n < 2 {
        return Err(Error::invalid("piece statistics need n >= 2"));
    }
    let q = sys.q() as u64;
    let s = sys.self_fitting() as u64;
    let big = |v: u64| BigInt::from(v);

    let p_na = BigRational::new(
        big(4) * big(q).pow(4) - big(2) * big(q).pow(2) - big(q),
        big(q).pow(8),
    );
    let p_adj = BigRational::new(
        big(s + 3) * big(q).pow(3) - big(s + 1) * big(q) - big(s),
        big(q).pow(7),
    );

    let cells = n * n;
    let pairs = cells * (cells - 1) / 2;
    let adjacent = 2 * n * (n - 1);
    let e_x = BigRational::from(big(pairs - adjacent)) * &p_na
        + BigRational::from(big(adjacent)) * &p_adj;
    let e_y = BigRational::new(big(cells), big(q * q));
    Ok(PieceStats {
        expected_duplicate_pairs: e_x,
        expected_symmetric: e_y,
        p_duplicate_nonadjacent: p_na,
        p_duplicate_adjacent: p_adj,
    })
}

/// Upper bound on `P(X = 0)`: `exp(-(n^4 - 2n^2) / (8 q^4))`. Useful as a
/// comparison curve in duplicate-statistics plots.
pub fn dup_zero_bound(n: u64, q: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("dup_zero_bound needs n >= 2"));
    }
    let n = n as f64;
    let q = q as f64;
    Ok((-(n.powi(4) - 2.0 * n * n) / (8.0 * q.powi(4))).exp())
}

/// Factorial as a big integer.
pub fn factorial(k: u64) -> BigUint {
    let mut result = BigUint::one();
    for i in 2..=k {
        result *= BigUint::from(i);
    }
    result
}

/// `log10` of the heuristic expected number of solutions of a puzzle with
/// independently carved pieces: `4^(n^2) (n^2)! / q^(2n(n-1))`. The sign
/// flips near `q = (2/sqrt(e)) n`.
pub fn expected_solutions_log10(n: u64, q: u64) -> f64 {
    let cells = n * n;
    let numer = BigUint::from(4u32).pow(cells as u32) * factorial(cells);
    log10_biguint(&numer) - (2 * n * (n - 1)) as f64 * (q as f64).log10()
}

/// `log10` of the heuristic expected number of ways to build a `k`x`k`
/// square from `n^2` independently carved pieces:
/// `4^(k^2) (n^2)^(k^2) / q^(2k(k-1))`. The sign flips near `q = 2n`.
pub fn window_solutions_log10(n: u64, q: u64, k: u64) -> Result<f64> {
    if k < 1 || k > n {
        return Err(Error::invalid(format!("window side k = {k} must satisfy 1 <= k <= n")));
    }
    let k2 = k * k;
    Ok(k2 as f64 * 4f64.log10() + k2 as f64 * ((n * n) as f64).log10()
        - (2 * k * (k - 1)) as f64 * (q as f64).log10())
}

/// Upper bound on the number of connected lattice subgraphs with `e` edges
/// and `f` bounded faces, up to translation: `C(3e - 4f + 4, 2e - 4f + 4)`.
pub fn subgraph_count_bound(e: u64, f: u64) -> Result<BigUint> {
    if 2 * e + 4 < 4 * f {
        return Err(Error::invalid(format!(
            "ill-formed bound parameters: need 2e - 4f + 4 >= 0, got e = {e}, f = {f}"
        )));
    }
    let top = 3 * e + 4 - 4 * f;
    let k = 2 * e + 4 - 4 * f;
    Ok(binomial(&BigUint::from(top), k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzle::Piece;
    use crate::sampler::make_jig_system;
    use itertools::Itertools;

    // brute force: canonical orbit count over all q^4 tuples
    fn orbit_count(q: u32) -> u64 {
        let mut seen = std::collections::BTreeSet::new();
        for (n, e, s, w) in (0..4).map(|_| 1..=q).multi_cartesian_product().map(|v| (v[0], v[1], v[2], v[3])) {
            seen.insert(Piece::new(n, e, s, w).canonical());
        }
        seen.len() as u64
    }

    #[test]
    fn piece_type_counts_match_orbit_enumeration() {
        for q in 1..=6u64 {
            assert_eq!(
                count_piece_types(q),
                BigUint::from(orbit_count(q as u32)),
                "q = {q}"
            );
        }
    }

    #[test]
    fn box_counts() {
        assert_eq!(count_boxes(1, 1), BigUint::one());
        assert_eq!(count_boxes(1, 2), BigUint::from(6u32));
        assert_eq!(count_boxes(2, 2), BigUint::from(126u32));
    }

    // independent multiset walk: choose non-decreasing sequences of types
    #[test]
    fn box_count_matches_multiset_enumeration() {
        fn multisets(types: u64, size: u64) -> u64 {
            fn rec(first: u64, types: u64, left: u64) -> u64 {
                if left == 0 {
                    return 1;
                }
                (first..types).map(|t| rec(t, types, left - 1)).sum()
            }
            rec(0, types, size)
        }
        assert_eq!(multisets(6, 4), 126);
        assert_eq!(count_boxes(2, 2), BigUint::from(multisets(6, 4)));
        assert_eq!(count_boxes(1, 3), BigUint::from(multisets(24, 1)));
    }

    #[test]
    fn uea_bound_values() {
        let (bound, log10) = uea_probability_bound(2, 2);
        assert_eq!(bound, BigRational::new(504.into(), 4096.into()));
        assert!((log10 - (504f64 / 4096.0).log10()).abs() < 1e-12);

        let (_, log10) = uea_probability_bound(10, 4);
        assert!((-85.0..=-81.0).contains(&log10), "got {log10}");
    }

    #[test]
    fn uea_bound_decreases_in_q_below_type_saturation() {
        // the bound falls in q while the piece-type count stays small next
        // to n^2; once q^4/4 overtakes n^2 the binomial term wins and the
        // bound turns vacuous, so the scan stops near q = sqrt(2n)
        for (n, q_max) in [(6u64, 3u64), (10, 4)] {
            let logs: Vec<f64> = (2..=q_max).map(|q| uea_probability_bound(n, q).1).collect();
            for pair in logs.windows(2) {
                assert!(pair[1] < pair[0], "n = {n}: {logs:?}");
            }
        }
    }

    #[test]
    fn nonadjacent_duplicate_probability() {
        let sys = make_jig_system(2, 2).unwrap();
        let stats = expected_piece_stats(2, &sys).unwrap();
        assert_eq!(
            stats.p_duplicate_nonadjacent,
            BigRational::new(27.into(), 128.into())
        );
    }

    // oracle: enumerate the shared jig and all six free sides
    fn p_adjacent_brute(sys: &JigSystem) -> BigRational {
        let q = sys.q();
        let mut hits: u64 = 0;
        let mut total: u64 = 0;
        for e in 1..=q {
            for free in (0..6).map(|_| 1..=q).multi_cartesian_product() {
                let a = Piece::new(free[0], e, free[1], free[2]);
                let b = Piece::new(free[3], free[4], free[5], sys.iota(e));
                total += 1;
                if a.canonical() == b.canonical() {
                    hits += 1;
                }
            }
        }
        BigRational::new(hits.into(), total.into())
    }

    #[test]
    fn adjacent_duplicate_probability_matches_brute_force() {
        for (q, s) in [(2, 2), (2, 0), (3, 3), (3, 1), (4, 0)] {
            let sys = make_jig_system(q, s).unwrap();
            let stats = expected_piece_stats(2, &sys).unwrap();
            assert_eq!(
                stats.p_duplicate_adjacent,
                p_adjacent_brute(&sys),
                "q = {q}, s = {s}"
            );
        }
    }

    #[test]
    fn expected_y_examples() {
        let sys = make_jig_system(10, 10).unwrap();
        let stats = expected_piece_stats(10, &sys).unwrap();
        assert_eq!(stats.expected_symmetric, BigRational::one());
        assert!(expected_piece_stats(1, &sys).is_err());
    }

    #[test]
    fn dup_zero_bound_values() {
        assert!((dup_zero_bound(2, 1).unwrap() - (-1f64).exp()).abs() < 1e-12);
        assert!((dup_zero_bound(10, 10).unwrap() - 0.8847059049434836).abs() < 1e-9);
        // tends to zero in n for fixed q
        assert!(dup_zero_bound(200, 3).unwrap() < 1e-12);
    }

    #[test]
    fn expected_solutions_values() {
        // n = 1: 4 * 1! / q^0 = 4
        assert!((expected_solutions_log10(1, 7) - 4f64.log10()).abs() < 1e-12);
        // n = 2, q = 2: 4^4 * 24 / 2^4 = 384
        assert!((expected_solutions_log10(2, 2) - 384f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn expected_solutions_sign_change_at_threshold() {
        // the flip sits at (2/sqrt(e)) n up to a q^(2n) correction, which at
        // n = 50 pushes it from 60.7 to between 66 and 67
        let n = 50u64;
        let threshold = 2.0 * n as f64 / std::f64::consts::E.sqrt();
        let below = threshold.floor() as u64 - 2;
        assert!(expected_solutions_log10(n, below) > 0.0);
        assert!(expected_solutions_log10(n, 66) > 0.0);
        assert!(expected_solutions_log10(n, 67) < 0.0);
        assert!(expected_solutions_log10(n, 70) < 0.0);
    }

    #[test]
    fn window_solutions_values() {
        // k = 1: 4 n^2
        assert!((window_solutions_log10(3, 5, 1).unwrap() - 36f64.log10()).abs() < 1e-12);
        // k = n = 2, q = 2: 4^4 * 4^4 / 2^4 = 4096
        assert!((window_solutions_log10(2, 2, 2).unwrap() - 4096f64.log10()).abs() < 1e-12);
        assert!(window_solutions_log10(2, 2, 3).is_err());

        // sign change near q = 2n for a large window; the q^(2k) correction
        // shifts the flip a little above 2n
        let (n, k) = (40u64, 40u64);
        assert!(window_solutions_log10(n, 2 * n - 8, k).unwrap() > 0.0);
        assert!(window_solutions_log10(n, 2 * n + 20, k).unwrap() < 0.0);
    }

    #[test]
    fn subgraph_bound_values() {
        assert_eq!(subgraph_count_bound(1, 0).unwrap(), BigUint::from(7u32));
        assert_eq!(subgraph_count_bound(4, 1).unwrap(), BigUint::from(495u32));
        assert_eq!(subgraph_count_bound(0, 0).unwrap(), BigUint::one());
        assert!(subgraph_count_bound(1, 2).is_err());
    }

    #[test]
    fn log10_handles_huge_values() {
        let x = BigUint::from(10u32).pow(5000);
        assert!((log10_biguint(&x) - 5000.0).abs() < 1e-6);
    }
}
