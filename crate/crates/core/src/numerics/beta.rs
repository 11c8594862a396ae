use crate::error::{Error, Result};

const TINY: f64 = 1e-300;
const EPS: f64 = 1e-16;

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// Regularized incomplete beta function `I_x(a, b)` for `a, b > 0`.
///
/// Lentz's continued fraction, evaluated on whichever side of the mean
/// converges fastest.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!(
            "incomplete beta needs positive shapes, got a = {a}, b = {b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("incomplete beta at x = {x} outside [0, 1]")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((ln_front.exp() * continued_fraction(x, a, b) / a).clamp(0.0, 1.0))
    } else {
        let y = 1.0 - x;
        let tail = ln_front.exp() * continued_fraction(y, b, a) / b;
        Ok((1.0 - tail).clamp(0.0, 1.0))
    }
}

fn continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let guard = |v: f64| if v.abs() < TINY { TINY } else { v };

    let mut c = 1.0;
    let mut d = 1.0 / guard(1.0 - qab * x / qap);
    let mut h = d;
    // Convergence takes O(sqrt(max(a, b))) terms.
    let max_iter = 200 + 20 * (a.max(b).sqrt() as usize);
    for m in 1..=max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / guard(1.0 + aa * d);
        c = guard(1.0 + aa / c);
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / guard(1.0 + aa * d);
        c = guard(1.0 + aa / c);
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

fn check_counts(k: u64, n: u64, p: f64) -> Result<()> {
    if k > n {
        return Err(Error::domain(format!("binomial count k = {k} exceeds n = {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("binomial probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// `P[Bin(n, p) <= k]` via `I_{1-p}(n - k, k + 1)`.
pub fn binomial_cdf(k: u64, n: u64, p: f64) -> Result<f64> {
    check_counts(k, n, p)?;
    if k == n || p == 0.0 {
        return Ok(1.0);
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    // I_{1-p}(n-k, k+1) = 1 - I_p(k+1, n-k); evaluate the latter directly so
    // that 1 - p is never formed.
    Ok(1.0 - regularized_incomplete_beta(p, (k + 1) as f64, (n - k) as f64)?)
}

/// `P[Bin(n, p) >= k]` via `I_p(k, n - k + 1)`.
pub fn binomial_sf(k: u64, n: u64, p: f64) -> Result<f64> {
    check_counts(k, n, p)?;
    if k == 0 || p == 1.0 {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    regularized_incomplete_beta(p, k as f64, (n - k + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct summation in exact integer arithmetic for the binomial
    /// coefficients, f64 only for the powers.
    fn direct_cdf(k: u64, n: u64, p: f64) -> f64 {
        let mut total = 0.0;
        let mut coeff: u128 = 1;
        for i in 0..=k {
            if i > 0 {
                coeff = coeff * (n - i + 1) as u128 / i as u128;
            }
            total += coeff as f64 * p.powi(i as i32) * (1.0 - p).powi((n - i) as i32);
        }
        total
    }

    #[test]
    fn reference_values() {
        assert_eq!(binomial_cdf(10, 10, 0.3).unwrap(), 1.0);
        assert!((binomial_cdf(0, 10, 0.5).unwrap() - 0.000_976_562_5).abs() < 1e-15);
        // exact rational summation (python Fraction)
        assert!((binomial_cdf(50, 100, 0.5).unwrap() - 0.539_794_618_693_589_4).abs() < 1e-12);
        assert!((binomial_cdf(9, 30, 0.3).unwrap() - 0.588_808_685_240_722).abs() < 1e-12);
    }

    #[test]
    fn matches_direct_sum_for_small_n() {
        for n in 1..=30u64 {
            for &p in &[0.0, 1e-3, 0.05, 0.3, 0.5, 0.77, 0.999, 1.0] {
                for k in 0..=n {
                    let got = binomial_cdf(k, n, p).unwrap();
                    let want = direct_cdf(k, n, p);
                    assert!((got - want).abs() <= 1e-10, "n={n} k={k} p={p}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn sf_complements_cdf() {
        for &(k, n, p) in &[(3u64, 20u64, 0.2), (50, 100, 0.5), (0, 5, 0.1), (7, 7, 0.9)] {
            let sf = binomial_sf(k, n, p).unwrap();
            let cdf_below = if k == 0 { 0.0 } else { binomial_cdf(k - 1, n, p).unwrap() };
            assert!((sf + cdf_below - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn incomplete_beta_symmetry_and_edges() {
        let v = regularized_incomplete_beta(0.3, 2.5, 4.0).unwrap();
        let w = regularized_incomplete_beta(0.7, 4.0, 2.5).unwrap();
        assert!((v + w - 1.0).abs() < 1e-14);
        assert_eq!(regularized_incomplete_beta(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(regularized_incomplete_beta(1.0, 1.0, 1.0).unwrap(), 1.0);
        // I_x(1, 1) = x
        assert!((regularized_incomplete_beta(0.42, 1.0, 1.0).unwrap() - 0.42).abs() < 1e-15);
        assert!(regularized_incomplete_beta(0.5, 0.0, 1.0).is_err());
        assert!(binomial_cdf(11, 10, 0.5).is_err());
    }
}
