//! Small numerical kernels shared by the assessors and the growth engine.

/// `ln( sum_i w_i exp(y_i) / sum_i w_i )` for finite `y` and positive `w`.
///
/// The shift by `max y` keeps the exponentials in range. When the result is
/// close to the maximum (the common case for small `|gamma|`), the sum is
/// accumulated as `expm1` terms and finished with `ln_1p`, which keeps full
/// relative precision as the spread of `y` shrinks to zero.
pub fn log_mean_exp(weights: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), ys.len());
    debug_assert!(!ys.is_empty());
    let max = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = weights.iter().sum();
    let mut deficit = 0.0;
    for (w, y) in weights.iter().zip(ys) {
        deficit += w * (y - max).exp_m1();
    }
    let deficit = deficit / total;
    if deficit > -0.5 {
        max + deficit.ln_1p()
    } else {
        let mass: f64 = weights.iter().zip(ys).map(|(w, y)| w * (y - max).exp()).sum();
        max + (mass / total).ln()
    }
}

/// Weighted mean of finite values, clamped into `[min, max]` of the inputs.
///
/// The clamp makes constants map to themselves exactly and keeps the result
/// monotone in the inputs despite rounding.
pub fn weighted_mean(weights: &[f64], xs: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), xs.len());
    debug_assert!(!xs.is_empty());
    let mut num = 0.0;
    let mut den = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (w, x) in weights.iter().zip(xs) {
        num += w * x;
        den += w;
        lo = lo.min(*x);
        hi = hi.max(*x);
    }
    (num / den).clamp(lo, hi)
}

/// Correctly rounded sum of finite floats (Shewchuk's partials algorithm).
pub fn exact_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in xs {
        let mut kept = 0;
        for i in 0..partials.len() {
            let mut y = partials[i];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }
    // Round the partials from the top, fixing up half-way cases.
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        n -= 1;
        let x = hi;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_mean_exp_matches_direct_evaluation() {
        let w = [0.5, 0.5];
        let y = [0.0, 3f64.ln()];
        assert!((log_mean_exp(&w, &y) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log_mean_exp_survives_huge_exponents() {
        let w = [1.0, 1.0];
        let y = [4000.0, 4000.0];
        assert_eq!(log_mean_exp(&w, &y), 4000.0);
        let y = [-4000.0, 0.0];
        assert!((log_mean_exp(&w, &y) - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log_mean_exp_small_spread_is_accurate() {
        // ln E[exp(g x)] / g -> E[x] as g -> 0
        let w = [0.25, 0.75];
        let g = 1e-9;
        let x = [1.0, 3.0];
        let ys: Vec<f64> = x.iter().map(|v| g * v).collect();
        let v = log_mean_exp(&w, &ys) / g;
        assert!((v - 2.5).abs() < 1e-7, "{v}");
    }

    #[test]
    fn weighted_mean_of_constant_is_exact() {
        let w = [0.1, 0.2, 0.7];
        let x = [0.1, 0.1, 0.1];
        assert_eq!(weighted_mean(&w, &x), 0.1);
    }

    #[test]
    fn exact_sum_cancels_symmetric_terms() {
        let xs = [0.1, -0.3, 0.2, 0.3, -0.1, -0.2];
        assert_eq!(exact_sum(xs), 0.0);
        assert_eq!(exact_sum([1e100, 1.0, -1e100]), 1.0);
        assert_eq!(exact_sum(std::iter::empty()), 0.0);
        assert_eq!(exact_sum([0.1; 10]), 1.0);
    }
}
