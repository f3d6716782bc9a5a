//! Correlation statistics and the peak velocity baseline.

use super::LearnError;
use crate::normalize::compensated_sum;

/// Sample Pearson correlation of two equal-length vectors.
pub fn pearson_r(a: &[f64], b: &[f64]) -> Result<f64, LearnError> {
    if a.len() != b.len() {
        return Err(LearnError::DimError {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.len() < 3 {
        return Err(LearnError::TooFewSamples);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(LearnError::NonFiniteInput);
    }
    let n = a.len() as f64;
    let mean_a = compensated_sum(a) / n;
    let mean_b = compensated_sum(b) / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(LearnError::DegenerateCorrelation);
    }
    Ok((cov / libm::sqrt(var_a * var_b)).clamp(-1.0, 1.0))
}

/// Two-sided p-value for a Pearson correlation `r` over `n` samples, from
/// the t statistic `t = r·√((n-2)/(1-r²))` with `n-2` degrees of freedom.
///
/// Uses the identity `p = I_x(ν/2, 1/2)` with `x = ν/(ν+t²) = 1-r²`, with
/// the regularized incomplete beta evaluated through a log-space prefactor,
/// so values far below f64's cancellation limit (down past 1e-30) come out
/// exact to full relative precision instead of flushing to zero.
pub fn pearson_p_value(r: f64, n: usize) -> Result<f64, LearnError> {
    if n < 3 {
        return Err(LearnError::TooFewSamples);
    }
    if !r.is_finite() || r.abs() > 1.0 {
        return Err(LearnError::InvalidCorrelation);
    }
    if r.abs() == 1.0 {
        return Ok(0.0);
    }
    let df = (n - 2) as f64;
    let x = 1.0 - r * r;
    Ok(incomplete_beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0))
}

/// Maximum absolute difference between adjacent samples.
pub fn peak_velocity_index(signal: &[f64]) -> Result<f64, LearnError> {
    if signal.len() < 2 {
        return Err(LearnError::TooShort);
    }
    Ok(signal
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max))
}

/// Lanczos-style log gamma (Numerical Recipes coefficients, ~1e-13
/// relative for x > 0).
fn ln_gamma(x: f64) -> f64 {
    const COF: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_9e-2,
        -0.539_523_938_495_3e-5,
    ];
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * libm::log(tmp);
    let mut ser = 1.000_000_000_190_015;
    let mut y = x;
    for c in COF {
        y += 1.0;
        ser += c / y;
    }
    -tmp + libm::log(2.506_628_274_631_000_5 * ser / x)
}

/// Regularized incomplete beta `I_x(a, b)` via the Lentz continued
/// fraction with a log-space prefactor.
fn incomplete_beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)
        + a * libm::log(x)
        + b * libm::log(1.0 - x);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    const EPS: f64 = 3e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn pearson_trivial_cases() {
        let v = [1.0, 2.0, 3.0, 5.0];
        assert!((pearson_r(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        assert!((pearson_r(&v, &neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_hand_computed_value() {
        // cov = 5.5, var_a = 5, var_b = 8.75 -> r = 5.5/sqrt(43.75).
        let r = pearson_r(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 5.0]).unwrap();
        assert!((r - 0.8315).abs() <= 1e-4, "r = {r}");
    }

    #[test]
    fn pearson_rejects_degenerate_input() {
        assert_eq!(
            pearson_r(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            LearnError::DegenerateCorrelation
        );
        assert_eq!(
            pearson_r(&[1.0, 2.0], &[1.0, 2.0]).unwrap_err(),
            LearnError::TooFewSamples
        );
        assert_eq!(
            pearson_r(&[1.0, 2.0, 3.0], &[1.0, 2.0]).unwrap_err(),
            LearnError::DimError { expected: 3, got: 2 }
        );
    }

    #[test]
    fn p_value_brackets_published_regression_rows() {
        // r = 0.8493 over 60 subjects: published p = 9.85e-18.
        let p = pearson_p_value(0.8493, 60).unwrap();
        assert!(
            (6.6e-18..=1.5e-17).contains(&p),
            "p(0.8493, 60) = {p:e} outside bracket"
        );
        // r = 0.9006 over 60 subjects: published p = 1.1847e-22.
        let p = pearson_p_value(0.9006, 60).unwrap();
        assert!(
            (7.9e-23..=1.8e-22).contains(&p),
            "p(0.9006, 60) = {p:e} outside bracket"
        );
    }

    #[test]
    fn p_value_exact_endpoints() {
        assert_eq!(pearson_p_value(0.0, 60).unwrap(), 1.0);
        assert_eq!(pearson_p_value(1.0, 60).unwrap(), 0.0);
        assert_eq!(pearson_p_value(-1.0, 10).unwrap(), 0.0);
        assert_eq!(
            pearson_p_value(0.5, 2).unwrap_err(),
            LearnError::TooFewSamples
        );
        assert_eq!(
            pearson_p_value(1.5, 10).unwrap_err(),
            LearnError::InvalidCorrelation
        );
    }

    #[test]
    fn p_value_is_monotone_in_r_and_n() {
        let mut prev = 1.0 + 1e-12;
        for i in 1..20 {
            let r = i as f64 * 0.05 - 0.001;
            let p = pearson_p_value(r, 30).unwrap();
            assert!(p < prev, "p({r}, 30) = {p} not below {prev}");
            prev = p;
        }
        let mut prev = 1.0;
        for n in [4usize, 8, 16, 32, 64, 128] {
            let p = pearson_p_value(0.4, n).unwrap();
            assert!(p < prev, "p(0.4, {n}) = {p} not below {prev}");
            prev = p;
        }
    }

    /// Independent oracle: two-sided t p-value as a ratio of cosine-power
    /// integrals, p = ∫_{θ_t}^{π/2} cos^{ν-1} / ∫_0^{π/2} cos^{ν-1}
    /// (substituting x = √ν·tanθ in the t density). Composite Simpson; no
    /// gamma functions shared with the implementation.
    fn p_value_by_quadrature(t: f64, df: f64) -> f64 {
        let integral = |lo: f64, hi: f64| -> f64 {
            let panels = 16384;
            let h = (hi - lo) / panels as f64;
            let f = |theta: f64| libm::pow(libm::cos(theta), df - 1.0);
            let mut acc = f(lo) + f(hi);
            for k in 1..panels {
                acc += f(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        let half_pi = core::f64::consts::FRAC_PI_2;
        let theta_t = libm::atan(t / libm::sqrt(df));
        integral(theta_t, half_pi) / integral(0.0, half_pi)
    }

    #[test]
    fn p_value_matches_quadrature_oracle() {
        for &df in &[5.0, 58.0, 100.0] {
            for &t in &[0.5, 2.0, 5.0, 12.0] {
                // Invert t back to (r, n): r² = t²/(t² + df).
                let r = t / libm::sqrt(t * t + df);
                let n = df as usize + 2;
                let ours = pearson_p_value(r, n).unwrap();
                let oracle = p_value_by_quadrature(t, df);
                assert!(
                    (ours - oracle).abs() <= 1e-3 * oracle,
                    "df={df} t={t}: {ours:e} vs oracle {oracle:e}"
                );
            }
        }
    }

    #[test]
    fn peak_velocity_examples() {
        assert_eq!(peak_velocity_index(&[0.0, 1.0, 3.0, 4.0]).unwrap(), 2.0);
        assert_eq!(peak_velocity_index(&[2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert_eq!(peak_velocity_index(&[0.0, -5.0, 0.0]).unwrap(), 5.0);
        assert_eq!(
            peak_velocity_index(&[1.0]).unwrap_err(),
            LearnError::TooShort
        );
    }
}
