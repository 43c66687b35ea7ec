use num_complex::Complex64 as C64;
use super::{check_coefficients, AnalyticsError, AnalyticsResult};

/// `|αβ|^m / (|α|^m + |β|^m)²`, evaluated through `t = min/max` so that large
/// `m` does not underflow: the ratio equals `t^m / (1 + t^m)²`.
fn balance(alpha: f64, beta: f64, m: f64) -> f64 {
    let (lo, hi) = if alpha <= beta { (alpha, beta) } else { (beta, alpha) };
    let tm = (lo / hi).powf(m);
    tm / ((1.0 + tm) * (1.0 + tm))
}

/// Closed-form yield term `Y_n` exactly as printed:
///
/// ```text
/// Y₁ = |αβ|²
/// Y₂ = ½ (1 − 2|αβ|²) |αβ|⁴ / (|α|⁴ + |β|⁴)²
/// Y₃ = ¼ (1 − 2|αβ|²) [1 − |αβ|⁴/(|α|⁴ + |β|⁴)²] |αβ|⁸ / (|α|⁸ + |β|⁸)²
/// Yₙ = 2^{1−n} (1 − 2|αβ|²) ∏_{j=3}^{n−1} [1 − 2|αβ|^{2^{j−1}}/(|α|^{2^{j−1}} + |β|^{2^{j−1}})²]
///          · |αβ|^{2ⁿ} / (|α|^{2ⁿ} + |β|^{2ⁿ})²            (n ≥ 4)
/// ```
///
/// Y₃ and the general product are not what exact enumeration of the
/// iterated protocol gives; see [`super::yield_oracle`].
pub fn yield_term(alpha: C64, beta: C64, n: usize) -> AnalyticsResult<f64> {
    check_coefficients(alpha, beta)?;
    if n == 0 {
        return Err(AnalyticsError::Domain("yield terms start at n = 1".into()));
    }
    let (a, b) = (alpha.norm(), beta.norm());
    let ab2 = (a * b).powi(2);
    let first_failure = 1.0 - 2.0 * ab2;
    let pow2 = |k: usize| 2f64.powi(k as i32);
    Ok(match n {
        1 => ab2,
        2 => 0.5 * first_failure * balance(a, b, 4.0),
        3 => 0.25 * first_failure * (1.0 - balance(a, b, 4.0)) * balance(a, b, 8.0),
        _ => {
            let product: f64 = (3..n)
                .map(|j| 1.0 - 2.0 * balance(a, b, pow2(j - 1)))
                .product();
            first_failure * product * balance(a, b, pow2(n)) / pow2(n - 1)
        }
    })
}
