//! Gauss hypergeometric series and the rounding correlation function `f₃`.

use crate::error::RoundingError;
use crate::scalar::Real;

const MAX_TERMS: usize = 100_000;

/// `₂F₁(a, b; c; z)` by its power series with the term recurrence
/// `t_{k+1} = t_k (a+k)(b+k) z / ((c+k)(k+1))`.
///
/// Only meant for `|z| ≤ 1/2`, where the terms shrink at least geometrically.
/// `c` must not be a non-positive integer.
pub fn hyp2f1_series<T: Real>(a: T, b: T, c: T, z: T) -> T {
    let mut term = T::one();
    let mut sum = T::one();
    let cutoff = T::eps().min(T::lit(1e-16));
    for k in 0..MAX_TERMS {
        let kk = T::from_count(k);
        term = term * (a + kk) * (b + kk) / ((c + kk) * (kk + T::one())) * z;
        sum += term;
        if term.abs() <= cutoff * sum.abs() {
            break;
        }
    }
    sum
}

/// `₂F₁(1/2, 1/2; 5/2; z)` on `[0, 1]`.
///
/// Below `z = 1/2` the series is summed directly. Above it the connection
/// formula around `z = 1` is used:
///
/// ```text
/// F(z) = (3π/8) · F(1/2, 1/2; −1/2; 1−z) + (1−z)^{3/2} · F(2, 2; 5/2; 1−z)
/// ```
///
/// which reduces to Gauss's value `3π/8` at `z = 1`.
pub fn hyp2f1_half_half_five_halves<T: Real>(z: T) -> T {
    let half = T::lit(0.5);
    let gauss = T::lit(3.0) * T::pi() / T::lit(8.0);
    if z <= half {
        return hyp2f1_series(half, half, T::lit(2.5), z);
    }
    let w = T::one() - z;
    if w <= T::zero() {
        return gauss;
    }
    gauss * hyp2f1_series(half, half, -half, w)
        + w * w.sqrt() * hyp2f1_series(T::lit(2.0), T::lit(2.0), T::lit(2.5), w)
}

/// Expected Bloch-vector inner product after random 3-dimensional projection
/// of two unit vectors with inner product `x`:
///
/// ```text
/// f₃(x) = (2/3) (Γ(2)/Γ(3/2))² · x · ₂F₁(1/2, 1/2; 5/2; x²) = (8/(3π)) x ₂F₁(…)
/// ```
///
/// Odd, strictly increasing, `f₃(±1) = ±1`.
pub fn f3<T: Real>(x: T) -> Result<T, RoundingError> {
    if !(x.abs() <= T::one()) {
        return Err(RoundingError::Domain(x.as_f64()));
    }
    let prefactor = T::lit(8.0) / (T::lit(3.0) * T::pi());
    Ok(prefactor * x * hyp2f1_half_half_five_halves(x * x))
}

/// `f₃` with the argument clamped into `[−1, 1]`, for inner products of
/// numerically normalized vectors.
pub fn f3_clamped<T: Real>(x: T) -> T {
    let c = x.max(-T::one()).min(T::one());
    f3(c).expect("clamped argument")
}
