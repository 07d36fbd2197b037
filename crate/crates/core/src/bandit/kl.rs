/// `x ln(x / y)` with `0 ln 0 = 0` and `x ln(x / 0) = +inf` for `x > 0`.
fn xlogx_over(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 0.0 {
        f64::INFINITY
    } else {
        x * (x / y).ln()
    }
}

/// KL divergence between Bernoulli(p) and Bernoulli(q).
pub fn kl_divergence_bernoulli(p: f64, q: f64) -> f64 {
    (xlogx_over(p, q) + xlogx_over(1.0 - p, 1.0 - q)).max(0.0)
}

/// Largest `q in [mean, 1]` with `d(mean, q) <= ln(t) / n`.
///
/// Bisection runs until the bracket stops shrinking in floating point, which is far tighter
/// than the 1e-9 needed by callers and keeps the divergence residual small even when the
/// root sits next to 1.
pub fn kl_ucb_index(mean: f64, n: f64, t: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&mean) && n > 0.0 && t >= 1.0);
    if mean >= 1.0 {
        return 1.0;
    }
    let budget = t.ln() / n;
    kl_upper_bound(mean, budget)
}

/// Largest `q in [mean, 1]` with `d(mean, q) <= budget`. Returns exactly 1 when even the
/// largest double below 1 satisfies the budget.
pub fn kl_upper_bound(mean: f64, budget: f64) -> f64 {
    const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;
    if mean >= 1.0 || budget >= kl_divergence_bernoulli(mean, BELOW_ONE) {
        return 1.0;
    }
    let (mut lo, mut hi) = (mean, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if kl_divergence_bernoulli(mean, mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn divergence_values() {
        assert_eq!(kl_divergence_bernoulli(0.5, 0.5), 0.0);
        assert_abs_diff_eq!(kl_divergence_bernoulli(0.0, 0.5), std::f64::consts::LN_2, epsilon = 1e-15);
        // 0.25 ln(1/3) + 0.75 ln 3 = 0.5 ln 3
        assert_abs_diff_eq!(kl_divergence_bernoulli(0.25, 0.75), 0.549_306_144_334_054_8, epsilon = 1e-15);
        assert_eq!(kl_divergence_bernoulli(0.3, 1.0), f64::INFINITY);
        assert_eq!(kl_divergence_bernoulli(1.0, 1.0), 0.0);
    }

    #[test]
    fn index_closed_forms() {
        assert_eq!(kl_ucb_index(1.0, 3.0, 50.0), 1.0);
        // p = 0: -ln(1 - q) = ln(t)/n  =>  q = 1 - t^(-1/n)
        assert_abs_diff_eq!(
            kl_ucb_index(0.0, 1.0, std::f64::consts::E),
            1.0 - (-1f64).exp(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(kl_ucb_index(0.0, 4.0, 1000.0), 1.0 - 1000f64.powf(-0.25), epsilon = 1e-12);
        // zero budget: the index collapses onto the mean up to the flatness of d near q = p
        assert_abs_diff_eq!(kl_ucb_index(0.3, 5.0, 1.0), 0.3, epsilon = 1e-7);
    }

    #[test]
    fn index_matches_grid_scan() {
        let (mean, n, t) = (0.5, 10.0, 100.0);
        let budget = f64::ln(t) / n;
        let grid = (0..=1_000_000)
            .map(|i| i as f64 * 1e-6)
            .filter(|q| *q >= mean && kl_divergence_bernoulli(mean, *q) <= budget)
            .fold(mean, f64::max);
        assert_abs_diff_eq!(kl_ucb_index(mean, n, t), grid, epsilon = 2e-6);
    }

    proptest! {
        #[test]
        fn index_dominates_mean(mean in 0.0f64..1.0, n in 1.0f64..1e4, t in 2.0f64..1e6) {
            let q = kl_ucb_index(mean, n, t);
            prop_assert!(q > mean);
            prop_assert!(q <= 1.0);
        }

        #[test]
        fn index_monotone_in_t_and_n(mean in 0.0f64..1.0, n in 1.0f64..1e3, t in 1.0f64..1e5) {
            prop_assert!(kl_ucb_index(mean, n, t * 2.0) >= kl_ucb_index(mean, n, t));
            prop_assert!(kl_ucb_index(mean, n * 2.0, t) <= kl_ucb_index(mean, n, t));
        }

        #[test]
        fn divergence_increases_away_from_p(p in 0.0f64..0.99, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let q1 = p + (1.0 - p) * lo * 0.999;
            let q2 = p + (1.0 - p) * hi * 0.999;
            prop_assume!(q2 > q1);
            prop_assert!(kl_divergence_bernoulli(p, q2) > kl_divergence_bernoulli(p, q1));
            prop_assert_eq!(kl_divergence_bernoulli(p, p), 0.0);
        }
    }
}
