//! Statistical comparisons between tract cohorts.
//!
//! The workhorse is the two-sample rank-sum test (Mann-Whitney U /
//! Wilcoxon) with midrank tie handling: exact enumeration for small
//! samples, a tie-corrected normal approximation with continuity
//! correction otherwise. Pearson product-moment correlation and Welch's
//! t-test round out the toolbox.

use crate::error::Error;
use crate::Result;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

/// One- or two-sided alternative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sides {
    #[default]
    Two,
    One,
}

/// How the rank-sum p-value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankSumMethod {
    /// Full enumeration of group assignments.
    Exact,
    /// Tie-corrected normal approximation with continuity correction.
    NormalApprox,
}

/// Result of a rank-sum test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumResult {
    /// The U statistic of the first sample.
    pub u_statistic: f64,
    /// Standardized statistic (0 under the exact method's own path).
    pub z_value: f64,
    pub p_value: f64,
    pub method: RankSumMethod,
    pub n1: usize,
    pub n2: usize,
    /// Set when all pooled values are identical; `p_value` is 1 and the
    /// comparison carries no information.
    pub degenerate: bool,
}

/// Combined sample size at or below which the exact method is used.
pub const EXACT_ENUMERATION_LIMIT: usize = 12;

fn require_finite(sample: &[f64], name: &str) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::EmptyInput {
            what: format!("sample {name}"),
        });
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput {
            path: None,
            reason: format!("sample {name} contains a non-finite value"),
        });
    }
    Ok(())
}

/// Midranks of the pooled sample, in pooled order, plus the tie-group sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].partial_cmp(&pooled[b]).expect("finite values"));
    let mut ranks = vec![0.0; pooled.len()];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        // Positions i..=j share the average of ranks i+1..=j+1.
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        tie_sizes.push(j - i + 1);
        i = j + 1;
    }
    (ranks, tie_sizes)
}

/// U statistic of the first sample from its rank sum.
fn u_from_rank_sum(rank_sum: f64, n1: usize) -> f64 {
    rank_sum - (n1 * (n1 + 1)) as f64 / 2.0
}

/// Two-sample rank-sum test with automatic method choice: exact when
/// `n1 + n2 <= EXACT_ENUMERATION_LIMIT`, normal approximation otherwise.
///
/// ```
/// use geomood::stats::{rank_sum_test, Sides};
///
/// let x = [1.0, 2.0, 3.0];
/// let y = [4.0, 5.0, 6.0];
/// let r = rank_sum_test(&x, &y, Sides::Two).unwrap();
/// assert!((r.p_value - 0.1).abs() < 1e-12);
/// ```
pub fn rank_sum_test(x: &[f64], y: &[f64], sides: Sides) -> Result<RankSumResult> {
    let method = if x.len() + y.len() <= EXACT_ENUMERATION_LIMIT {
        RankSumMethod::Exact
    } else {
        RankSumMethod::NormalApprox
    };
    rank_sum_test_with_method(x, y, sides, method)
}

/// Rank-sum test with the method forced by the caller.
pub fn rank_sum_test_with_method(
    x: &[f64],
    y: &[f64],
    sides: Sides,
    method: RankSumMethod,
) -> Result<RankSumResult> {
    require_finite(x, "x")?;
    require_finite(y, "y")?;
    let (n1, n2) = (x.len(), y.len());
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, tie_sizes) = midranks(&pooled);
    let rank_sum: f64 = ranks[..n1].iter().sum();
    let u = u_from_rank_sum(rank_sum, n1);
    let degenerate = tie_sizes.len() == 1;

    if degenerate {
        return Ok(RankSumResult {
            u_statistic: u,
            z_value: 0.0,
            p_value: 1.0,
            method,
            n1,
            n2,
            degenerate,
        });
    }

    match method {
        RankSumMethod::Exact => {
            let p = exact_p(&ranks, n1, u, sides);
            Ok(RankSumResult {
                u_statistic: u,
                z_value: 0.0,
                p_value: p,
                method,
                n1,
                n2,
                degenerate,
            })
        }
        RankSumMethod::NormalApprox => {
            let n = (n1 + n2) as f64;
            let mean = (n1 * n2) as f64 / 2.0;
            let tie_term: f64 = tie_sizes
                .iter()
                .map(|&t| (t * t * t - t) as f64)
                .sum::<f64>()
                / (n * (n - 1.0));
            let variance = (n1 * n2) as f64 / 12.0 * ((n + 1.0) - tie_term);
            if variance <= 0.0 {
                return Err(Error::internal(
                    "non-degenerate rank-sum with zero variance",
                ));
            }
            let diff = u - mean;
            // Continuity correction shrinks |diff| by one half.
            let corrected = if diff > 0.0 {
                diff - 0.5
            } else if diff < 0.0 {
                diff + 0.5
            } else {
                0.0
            };
            let z = corrected / variance.sqrt();
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            let p = match sides {
                Sides::Two => (2.0 * (1.0 - normal.cdf(z.abs()))).min(1.0),
                Sides::One => 1.0 - normal.cdf(z),
            };
            Ok(RankSumResult {
                u_statistic: u,
                z_value: z,
                p_value: p.max(f64::MIN_POSITIVE),
                method,
                n1,
                n2,
                degenerate,
            })
        }
    }
}

/// Exact p-value by enumerating every way to choose which pooled ranks
/// belong to the first sample. Ties are inherent in the midranks, so they
/// are handled exactly too.
fn exact_p(ranks: &[f64], n1: usize, u_observed: f64, sides: Sides) -> f64 {
    let n = ranks.len();
    let mean = (n1 * (n - n1)) as f64 / 2.0;
    let eps = 1e-9;
    let mut total = 0u64;
    let mut extreme = 0u64;
    // Lexicographic combination walk over index subsets of size n1.
    let mut combo: Vec<usize> = (0..n1).collect();
    loop {
        let rank_sum: f64 = combo.iter().map(|&i| ranks[i]).sum();
        let u = u_from_rank_sum(rank_sum, n1);
        total += 1;
        let is_extreme = match sides {
            Sides::Two => (u - mean).abs() >= (u_observed - mean).abs() - eps,
            Sides::One => u >= u_observed - eps,
        };
        if is_extreme {
            extreme += 1;
        }
        // Advance to the next combination.
        let mut i = n1;
        loop {
            if i == 0 {
                return extreme as f64 / total as f64;
            }
            i -= 1;
            if combo[i] != i + n - n1 {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..n1 {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// A Pearson correlation and the sample size behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub r: f64,
    pub n: usize,
}

/// Pearson product-moment correlation over paired observations.
///
/// Needs at least three pairs; errors when either coordinate is constant.
///
/// ```
/// use geomood::stats::pearson;
///
/// let pairs = [(1.0, 2.0), (2.0, 4.0), (3.0, 6.0)];
/// let r = pearson(&pairs).unwrap();
/// assert!((r.r - 1.0).abs() < 1e-12);
/// ```
pub fn pearson(pairs: &[(f64, f64)]) -> Result<CorrelationResult> {
    if pairs.len() < 3 {
        return Err(Error::InsufficientData {
            what: "pairs for correlation".into(),
            needed: 3,
            got: pairs.len(),
        });
    }
    if pairs.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(Error::InvalidInput {
            path: None,
            reason: "correlation input contains a non-finite value".into(),
        });
    }
    let n = pairs.len() as f64;
    let mean_x = pairs.iter().map(|(a, _)| a).sum::<f64>() / n;
    let mean_y = pairs.iter().map(|(_, b)| b).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (a, b) in pairs {
        let dx = a - mean_x;
        let dy = b - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 {
        return Err(Error::ConstantInput {
            what: "first coordinate".into(),
        });
    }
    if var_y == 0.0 {
        return Err(Error::ConstantInput {
            what: "second coordinate".into(),
        });
    }
    Ok(CorrelationResult {
        r: (cov / (var_x.sqrt() * var_y.sqrt())).clamp(-1.0, 1.0),
        n: pairs.len(),
    })
}

/// Result of Welch's unequal-variance t-test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t_value: f64,
    pub degrees_of_freedom: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

/// Welch's t-test; a parametric alternative to the rank-sum comparison.
pub fn welch_t_test(x: &[f64], y: &[f64], sides: Sides) -> Result<TTestResult> {
    require_finite(x, "x")?;
    require_finite(y, "y")?;
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::InsufficientData {
            what: "observations per sample for a t-test".into(),
            needed: 2,
            got: x.len().min(y.len()),
        });
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let var = |s: &[f64], m: f64| s.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (s.len() - 1) as f64;
    let (m1, m2) = (mean(x), mean(y));
    let (v1, v2) = (var(x, m1), var(y, m2));
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let se_sq = v1 / n1 + v2 / n2;
    if se_sq == 0.0 {
        return Err(Error::ConstantInput {
            what: "both samples".into(),
        });
    }
    let t = (m1 - m2) / se_sq.sqrt();
    let df = se_sq * se_sq / ((v1 / n1).powi(2) / (n1 - 1.0) + (v2 / n2).powi(2) / (n2 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::internal(format!("t dist: {e}")))?;
    let p = match sides {
        Sides::Two => (2.0 * (1.0 - dist.cdf(t.abs()))).min(1.0),
        Sides::One => 1.0 - dist.cdf(t),
    };
    Ok(TTestResult {
        t_value: t,
        degrees_of_freedom: df,
        p_value: p.max(f64::MIN_POSITIVE),
        n1: x.len(),
        n2: y.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_small_samples_give_the_textbook_exact_p() {
        // Complete separation of {1,2,3} and {4,5,6}: the rank split is the
        // most extreme of C(6,3)=20 equally likely splits, and its mirror
        // image matches it, so the two-sided p is 2/20.
        let r = rank_sum_test(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Sides::Two).unwrap();
        assert_eq!(r.method, RankSumMethod::Exact);
        assert_eq!(r.u_statistic, 0.0);
        assert!((r.p_value - 0.1).abs() < 1e-12, "p={}", r.p_value);

        let one = rank_sum_test(&[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0], Sides::One).unwrap();
        assert!((one.p_value - 0.05).abs() < 1e-12, "p={}", one.p_value);
    }

    #[test]
    fn exact_method_handles_ties_via_midranks() {
        // Pooled {1,1,2,2}: U for x={1,2} is 2 by midranks; every one of the
        // six splits is equally extreme or less, p stays within (0,1].
        let r = rank_sum_test(&[1.0, 2.0], &[1.0, 2.0], Sides::Two).unwrap();
        assert_eq!(r.method, RankSumMethod::Exact);
        assert_eq!(r.u_statistic, 2.0);
        assert_eq!(r.p_value, 1.0);

        let r = rank_sum_test(&[1.0, 1.0, 2.0], &[2.0, 3.0, 3.0], Sides::Two).unwrap();
        assert!(r.p_value > 0.0 && r.p_value <= 1.0);
    }

    #[test]
    fn u_statistic_is_invariant_under_monotone_transforms() {
        let x = [3.1, 1.2, 5.0, 0.4];
        let y = [2.2, 8.8, 6.1];
        let fx: Vec<f64> = x.iter().map(|v| f64::exp(*v)).collect();
        let fy: Vec<f64> = y.iter().map(|v| f64::exp(*v)).collect();
        let a = rank_sum_test(&x, &y, Sides::Two).unwrap();
        let b = rank_sum_test(&fx, &fy, Sides::Two).unwrap();
        assert_eq!(a.u_statistic, b.u_statistic);
        assert_eq!(a.p_value, b.p_value);
    }

    #[test]
    fn swapping_samples_mirrors_u_and_keeps_two_sided_p() {
        let x = [1.0, 5.0, 7.0, 9.0, 12.0, 4.0, 6.0];
        let y = [2.0, 3.0, 8.0, 10.0, 11.0, 13.0, 14.0, 15.0];
        let a = rank_sum_test(&x, &y, Sides::Two).unwrap();
        let b = rank_sum_test(&y, &x, Sides::Two).unwrap();
        let n1n2 = (x.len() * y.len()) as f64;
        assert!((a.u_statistic + b.u_statistic - n1n2).abs() < 1e-9);
        assert!((a.p_value - b.p_value).abs() < 1e-12);
    }

    #[test]
    fn normal_approximation_matches_known_reference() {
        // Samples large enough for the approximation; reference two-sided p
        // computed independently from the tie-corrected z with continuity
        // correction: z = (U - mean ± 0.5) / sigma.
        let x: Vec<f64> = (1..=15).map(|v| v as f64).collect();
        let y: Vec<f64> = (10..=30).map(|v| v as f64 + 0.5).collect();
        let r = rank_sum_test(&x, &y, Sides::Two).unwrap();
        assert_eq!(r.method, RankSumMethod::NormalApprox);
        assert!(r.p_value > 0.0 && r.p_value < 0.01);
        assert!(r.z_value < 0.0, "x ranks lower");
    }

    #[test]
    fn constant_pooled_sample_is_degenerate_with_p_one() {
        let r = rank_sum_test(&[2.0; 8], &[2.0; 9], Sides::Two).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.z_value, 0.0);
    }

    #[test]
    fn empty_and_non_finite_inputs_error() {
        assert!(rank_sum_test(&[], &[1.0], Sides::Two).is_err());
        assert!(rank_sum_test(&[1.0], &[], Sides::Two).is_err());
        assert!(rank_sum_test(&[f64::NAN, 1.0], &[1.0], Sides::Two).is_err());
    }

    #[test]
    fn pearson_recovers_exact_linear_relationships() {
        let up: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 * i as f64 + 1.0)).collect();
        assert!((pearson(&up).unwrap().r - 1.0).abs() < 1e-12);
        let down: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, -2.0 * i as f64)).collect();
        assert!((pearson(&down).unwrap().r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_on_a_known_small_set() {
        // Hand-computed: x={1,2,3,4}, y={2,1,4,3} -> r = 0.6.
        let pairs = [(1.0, 2.0), (2.0, 1.0), (3.0, 4.0), (4.0, 3.0)];
        let r = pearson(&pairs).unwrap();
        assert!((r.r - 0.6).abs() < 1e-12, "r={}", r.r);
        assert_eq!(r.n, 4);
    }

    #[test]
    fn pearson_rejects_degenerate_inputs() {
        assert!(matches!(
            pearson(&[(1.0, 2.0), (2.0, 3.0)]),
            Err(Error::InsufficientData { .. })
        ));
        assert!(matches!(
            pearson(&[(1.0, 2.0), (1.0, 3.0), (1.0, 4.0)]),
            Err(Error::ConstantInput { .. })
        ));
    }

    #[test]
    fn welch_t_detects_a_clear_mean_shift() {
        let x: Vec<f64> = (0..20).map(|i| 10.0 + (i % 5) as f64 * 0.1).collect();
        let y: Vec<f64> = (0..20).map(|i| 11.0 + (i % 5) as f64 * 0.1).collect();
        let r = welch_t_test(&x, &y, Sides::Two).unwrap();
        assert!(r.p_value < 1e-6);
        assert!(r.t_value < 0.0);

        let same = welch_t_test(&x, &x, Sides::Two).unwrap();
        assert!(same.p_value > 0.99);
    }
}
