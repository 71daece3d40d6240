use serde::Serialize;

use crate::scalar::Real;
use crate::special::f3_clamped;

/// Resolution of the max-min search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec<T> {
    /// Spacing of the dense `x` grid on `[−1, 1/3)`; `x = −1/3` is always added.
    pub x_step: T,
    /// Bracket width at which the golden-section refinement in `x` stops.
    pub x_tol: T,
    /// Equally spaced samples of `p` on `[0, 1]`, endpoints included.
    pub p_samples: usize,
    pub p_tol: T,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        GridSpec { x_step: T::lit(1e-4), x_tol: T::lit(1e-8), p_samples: 101, p_tol: T::lit(1e-9) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InnerMinimum<T> {
    pub p: T,
    /// Minimizing edge inner product `x = v_i·v_j`.
    pub x: T,
    pub ratio: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioCertificate<T> {
    pub scale: T,
    /// Weight of `h⁺` in the matching branch, `(3/4)·2·scale`.
    pub matching_coefficient: T,
    pub grid: GridSpec<T>,
    pub p_star: T,
    pub alpha_star: T,
    pub x_star: T,
    /// `α(p)` at the sampled `p`.
    pub curve: Vec<InnerMinimum<T>>,
    /// Whether the sampled curve has nonpositive second differences.
    pub concave: bool,
}

/// Worst-case edge ratio for mixing weight `p` at inner product `x`:
///
/// ```text
/// [p(1 − f₃(x))/4 + (1 − p)(1/4 + c·(−(1+3x)/4)⁺)] / ((1 − 3x)/4)
/// ```
///
/// with `c = (3/2)·scale`.
pub fn edge_ratio<T: Real>(p: T, x: T, scale: T) -> T {
    let parts = Parts::at(x, T::lit(1.5) * scale);
    parts.ratio(p)
}

#[derive(Clone, Copy)]
struct Parts<T> {
    x: T,
    product: T,
    matching: T,
    sdp: T,
}

impl<T: Real> Parts<T> {
    fn at(x: T, coeff: T) -> Self {
        let quarter = T::lit(0.25);
        let three = T::lit(3.0);
        let h_plus = (-(T::one() + three * x) * quarter).max(T::zero());
        Parts {
            x,
            product: (T::one() - f3_clamped(x)) * quarter,
            matching: quarter + coeff * h_plus,
            sdp: (T::one() - three * x) * quarter,
        }
    }

    fn ratio(&self, p: T) -> T {
        (p * self.product + (T::one() - p) * self.matching) / self.sdp
    }
}

/// Golden-section minimum of `f` on `[a, b]`, stopping at bracket width `tol`.
fn golden_min<T: Real>(mut f: impl FnMut(T) -> T, mut a: T, mut b: T, tol: T) -> (T, T) {
    let r = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// The `x` grid with the `p`-independent parts of the ratio precomputed.
pub struct InnerProblem<T> {
    coeff: T,
    grid: GridSpec<T>,
    parts: Vec<Parts<T>>,
}

impl<T: Real> InnerProblem<T> {
    pub fn new(scale: T, grid: GridSpec<T>) -> Self {
        assert!(scale > T::zero() && scale <= T::one(), "scale must lie in (0, 1]");
        assert!(grid.x_step > T::zero() && grid.p_samples >= 3);
        let coeff = T::lit(1.5) * scale;
        let third = T::one() / T::lit(3.0);
        let mut xs = Vec::new();
        let mut k = 0usize;
        loop {
            let x = -T::one() + T::from_count(k) * grid.x_step;
            if x >= third - grid.x_step * T::lit(1e-3) {
                break;
            }
            xs.push(x);
            k += 1;
        }
        xs.push(-third);
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        xs.dedup();
        let parts = xs.into_iter().map(|x| Parts::at(x, coeff)).collect();
        InnerProblem { coeff, grid, parts }
    }

    /// `min_x` of [`edge_ratio`] at fixed `p`.
    pub fn minimize(&self, p: T) -> InnerMinimum<T> {
        let (mut best, mut best_ratio) = (0, self.parts[0].ratio(p));
        for (k, part) in self.parts.iter().enumerate().skip(1) {
            let r = part.ratio(p);
            if r < best_ratio {
                best = k;
                best_ratio = r;
            }
        }
        let lo = self.parts[best.saturating_sub(1)].x;
        let hi = self.parts[(best + 1).min(self.parts.len() - 1)].x;
        let (x, r) = golden_min(|x| Parts::at(x, self.coeff).ratio(p), lo, hi, self.grid.x_tol);
        if r < best_ratio {
            InnerMinimum { p, x, ratio: r }
        } else {
            InnerMinimum { p, x: self.parts[best].x, ratio: best_ratio }
        }
    }
}

/// Minimum over `x` with `p` pinned, e.g. `p = 1` for the product branch alone.
pub fn inner_minimum<T: Real>(p: T, scale: T, grid: GridSpec<T>) -> InnerMinimum<T> {
    InnerProblem::new(scale, grid).minimize(p)
}

/// `α = max_p min_x edge_ratio(p, x)`.
///
/// `α(p)` is a pointwise minimum of functions affine in `p`, hence concave,
/// so a golden-section search around the best sample finds the maximum.
pub fn certify_alpha<T: Real>(scale: T, grid: GridSpec<T>) -> RatioCertificate<T> {
    let problem = InnerProblem::new(scale, grid);
    let last = T::from_count(grid.p_samples - 1);
    let curve: Vec<InnerMinimum<T>> =
        (0..grid.p_samples).map(|k| problem.minimize(T::from_count(k) / last)).collect();
    let best = (1..curve.len()).fold(0, |b, k| if curve[k].ratio > curve[b].ratio { k } else { b });
    let lo = curve[best.saturating_sub(1)].p;
    let hi = curve[(best + 1).min(curve.len() - 1)].p;
    let (p, _) = golden_min(|p| -problem.minimize(p).ratio, lo, hi, grid.p_tol);
    let refined = problem.minimize(p);
    let star = if refined.ratio >= curve[best].ratio { refined } else { curve[best] };
    let slack = T::lit(1e-9);
    let concave = curve.windows(3).all(|w| w[0].ratio + w[2].ratio <= T::two() * w[1].ratio + slack);
    RatioCertificate {
        scale,
        matching_coefficient: problem.coeff,
        grid,
        p_star: star.p,
        alpha_star: star.ratio,
        x_star: star.x,
        curve,
        concave,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_only_minimum_is_half_at_kink() {
        let m = inner_minimum(0.0f64, 0.8, GridSpec::default());
        assert!((m.ratio - 0.5).abs() < 1e-12);
        assert!((m.x + 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn golden_finds_kink() {
        // A kink keeps the minimizer well conditioned; a smooth minimum is
        // only located to about √ε.
        let (x, fx) = golden_min(|x: f64| (x - 0.3).abs() + 1.0, -1.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9);
        assert!((fx - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ratio_at_antipodal_vectors() {
        // x = −1: product branch gives 1/2, matching branch (1 + 2c)/4.
        assert!((edge_ratio(1.0f64, -1.0, 0.8) - 0.5).abs() < 1e-15);
        assert!((edge_ratio(0.0f64, -1.0, 0.8) - 0.85).abs() < 1e-15);
        assert!((edge_ratio(0.0f64, -1.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn certificate_dominates_curve() {
        let grid = GridSpec { x_step: 1e-3, x_tol: 1e-8, p_samples: 21, p_tol: 1e-7 };
        let c = certify_alpha(0.8f64, grid);
        assert!(c.concave);
        assert!(c.curve.iter().all(|m| m.ratio <= c.alpha_star));
        assert!((c.matching_coefficient - 1.2).abs() < 1e-15);
    }
}
