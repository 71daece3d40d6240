//! Douglas–Rachford splitting for the moment relaxation.
//!
//! The problem is `max ⟨C, X⟩` over `X ⪰ 0` in the affine set `L` (unit
//! diagonal, class equalities, anticommuting pairs at zero). With
//! `f = −⟨C, ·⟩ + ι_L` and `g = ι_psd` each iteration is
//!
//! ```text
//! X = prox_{tf}(Z)      (class averaging plus an objective step)
//! Y = Π_psd(2X − Z)     (eigendecomposition, clamp)
//! Z = Z + Y − X
//! ```
//!
//! The fixed-point iteration on `Z` is sped up by safeguarded Anderson
//! acceleration: an extrapolated point is kept only if its residual `‖Y − X‖`
//! does not exceed that of the point it came from.
//!
//! `S = (Y − 2X + Z)/t` is a PSD dual iterate. After projecting `C + S` onto
//! the orthogonal complement of the free class directions, the certificate
//! `const + tr(S) + N·max(0, −λ_min(S))` bounds the optimum from above.
//!
//! With the symmetry reduction enabled every iterate is invariant under the
//! signed axis permutations (see the `symmetry` module) and lives in block
//! coordinates; otherwise there is one block in the original basis.

use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::SdpError;
use crate::graph::WeightedGraph;
use crate::scalar::Real;

use super::moment::MomentStructure;
use super::solution::SdpSolution;
use super::symmetry::Reduction;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions<T> {
    pub tol: T,
    pub max_iter: usize,
    pub symmetry_reduction: bool,
    /// Step `t` in units of the largest edge weight.
    pub step: T,
    pub check_every: usize,
    /// Anderson acceleration memory; 0 runs plain Douglas–Rachford.
    pub anderson_memory: usize,
    pub balance_every: usize,
    pub balance_ratio: f64,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tol: T::lit(1e-6),
            max_iter: 200_000,
            symmetry_reduction: true,
            step: T::lit(10.0),
            check_every: 10,
            anderson_memory: 20,
            balance_every: 50,
            balance_ratio: 10.0,
        }
    }
}

struct Split<T> {
    /// Positive part `Π_psd(W)`.
    pos: Vec<DMatrix<T>>,
    /// `Π_psd(−W) = Π_psd(W) − W`.
    neg: Vec<DMatrix<T>>,
}

/// `W = W₊ − W₋` per block, forming the smaller factor explicitly.
fn split_psd<T: Real>(w: &[DMatrix<T>]) -> Split<T> {
    let mut pos = Vec::with_capacity(w.len());
    let mut neg = Vec::with_capacity(w.len());
    for wb in w {
        let k = wb.nrows();
        if k == 0 {
            pos.push(wb.clone());
            neg.push(wb.clone());
            continue;
        }
        let eig = SymmetricEigen::new(wb.clone());
        let npos = eig.eigenvalues.iter().filter(|&&l| l > T::zero()).count();
        let take_pos = npos <= k - npos;
        let idx: Vec<usize> =
            (0..k).filter(|&i| (eig.eigenvalues[i] > T::zero()) == take_pos).collect();
        let mut f = DMatrix::<T>::zeros(k, idx.len());
        for (c, &i) in idx.iter().enumerate() {
            let s = eig.eigenvalues[i].abs().sqrt();
            f.column_mut(c).copy_from(&(eig.eigenvectors.column(i) * s));
        }
        let part = &f * f.transpose();
        if take_pos {
            neg.push(&part - wb);
            pos.push(part);
        } else {
            pos.push(wb + &part);
            neg.push(part);
        }
    }
    Split { pos, neg }
}

fn min_eigenvalue<T: Real>(m: &DMatrix<T>) -> T {
    if m.nrows() == 0 {
        return T::zero();
    }
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(T::max_value().unwrap(), |a, b| a.min(b))
}

struct Dual<T> {
    residual: T,
    objective: T,
    certified: T,
}

pub fn solve_sdp<T: Real>(
    structure: &MomentStructure<T>,
    g: &WeightedGraph<T>,
    opts: &SolverOptions<T>,
) -> Result<SdpSolution<T>, SdpError> {
    if g.num_vertices() != structure.num_qubits() {
        return Err(SdpError::DimensionMismatch { graph: g.num_vertices(), structure: structure.num_qubits() });
    }
    if !(opts.tol > T::zero()) || !(opts.step > T::zero()) {
        return Err(SdpError::InvalidTolerance);
    }
    let red = Reduction::new(structure, opts.symmetry_reduction);
    let constant = structure.objective().constant;
    let dim = T::from_count(structure.dim());
    let check_every = opts.check_every.max(1);

    let mut z: Blocks<T> = red.blocks.iter().map(|&k| DMatrix::identity(k, k)).collect();
    let mut x: Blocks<T> = z.clone();
    let mut y_free = vec![T::zero(); red.free.len()];
    // Objective steps are relative to the heaviest edge, so rescaling all
    // weights leaves the iteration unchanged.
    let wmax = g.edges().iter().fold(T::zero(), |a, e| a.max(e.w));
    let mut t = if wmax > T::zero() { opts.step / wmax } else { opts.step };
    let mut pending: Option<T> = None;
    let mut last_rescale = 0usize;
    let mut last = (T::zero(), T::zero(), T::zero());
    let mut accel = Anderson::new(opts.anderson_memory);
    // Last accepted point and its fixed-point residual `g = Y − X`.
    let mut anchor: Option<(Blocks<T>, Blocks<T>, T)> = None;
    let mut accepted = 0usize;

    for iter in 1..=opts.max_iter {
        // X = prox_{tf}(Z)
        for xb in x.iter_mut() {
            xb.fill(T::zero());
            xb.fill_diagonal(T::one());
        }
        for (oc, yv) in red.free.iter().zip(y_free.iter_mut()) {
            let v = (inner(&oc.entries, &z) + t * oc.coeff) / oc.norm2;
            *yv = v;
            for &(b, i, j, a) in &oc.entries {
                x[b][(i, j)] += v * a;
                if i != j {
                    x[b][(j, i)] += v * a;
                }
            }
        }

        if let Some(f) = pending.take() {
            // prox_{ft}(X + f(Z − X)) = prox_t(Z) = X, so X stays valid.
            for (zb, xb) in z.iter_mut().zip(&x) {
                *zb = xb + (&*zb - xb) * f;
            }
            t *= f;
            // The fixed-point map changed: old differences no longer apply.
            accel.clear();
            anchor = None;
        }

        let w: Blocks<T> = x.iter().zip(&z).map(|(xb, zb)| xb * T::two() - zb).collect();
        let split = split_psd(&w);
        let g_res: Blocks<T> = split.pos.iter().zip(&x).map(|(yb, xb)| yb - xb).collect();
        let primal = norm(&g_res);

        if let Some((za, ga, na)) = &anchor {
            if primal > *na {
                // Safeguard: the extrapolated point did worse than the plain
                // step would have from the anchor.
                z = za.iter().zip(ga).map(|(a, b)| a + b).collect();
                accel.clear();
                anchor = None;
                continue;
            }
        }
        accepted += 1;

        if accepted.is_multiple_of(check_every) || iter == opts.max_iter {
            let p_obj = constant + red.free.iter().zip(&y_free).fold(T::zero(), |a, (oc, &y)| a + oc.coeff * y);
            let dual = dual_iterate(&red, &split.neg, t, constant, dim, false);
            let scale = T::one().max(p_obj.abs());
            let gap = (p_obj - dual.objective).abs() / scale;
            last = (primal, dual.residual, gap);
            if dual.residual <= opts.tol && gap <= opts.tol {
                // The returned matrix is X itself: equalities hold exactly, so
                // only its most negative eigenvalue remains to be checked.
                let psd = -x.iter().map(min_eigenvalue).fold(T::zero(), |a, b| a.min(b));
                if psd <= opts.tol {
                    let cert = dual_iterate(&red, &split.neg, t, constant, dim, true);
                    return finish(structure, &red, &y_free, cert.certified, primal, dual.residual, gap, iter);
                }
            }
            // Residual balancing, kept rare because every rescale discards
            // the acceleration history.
            let ratio = T::lit(opts.balance_ratio);
            if accepted - last_rescale >= opts.balance_every
                && (primal > ratio * dual.residual || dual.residual > ratio * primal)
            {
                let f = (dual.residual / primal).sqrt().max(T::lit(0.1)).min(T::lit(10.0));
                pending = Some(f);
                last_rescale = accepted;
            }
        }

        match accel.step(&z, &g_res) {
            Some(extrapolated) => {
                anchor = Some((z, g_res, primal));
                z = extrapolated;
            }
            None => {
                for (zb, gb) in z.iter_mut().zip(&g_res) {
                    *zb += gb;
                }
                anchor = None;
            }
        }
    }
    Err(SdpError::NonConvergence {
        iterations: opts.max_iter,
        primal_residual: last.0.as_f64(),
        dual_residual: last.1.as_f64(),
        gap: last.2.as_f64(),
    })
}

type Blocks<T> = Vec<DMatrix<T>>;

fn dot<T: Real>(a: &[DMatrix<T>], b: &[DMatrix<T>]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (p, q)| acc + p.dot(q))
}

fn norm<T: Real>(a: &[DMatrix<T>]) -> T {
    dot(a, a).sqrt()
}

/// Type-II Anderson acceleration of the map `z ↦ z + g(z)`.
///
/// Keeps the last `memory` differences of iterates and residuals and
/// extrapolates with the least-squares combination that best cancels the
/// current residual. The Gram matrix of the residual differences is updated
/// one row at a time.
struct Anderson<T> {
    memory: usize,
    prev: Option<(Blocks<T>, Blocks<T>)>,
    dz: VecDeque<Blocks<T>>,
    dg: VecDeque<Blocks<T>>,
    gram: VecDeque<VecDeque<T>>,
}

impl<T: Real> Anderson<T> {
    fn new(memory: usize) -> Self {
        Anderson { memory, prev: None, dz: VecDeque::new(), dg: VecDeque::new(), gram: VecDeque::new() }
    }

    fn clear(&mut self) {
        self.prev = None;
        self.dz.clear();
        self.dg.clear();
        self.gram.clear();
    }

    /// Records `(z, g)` and returns the extrapolated next iterate, or `None`
    /// when there is no history yet (the caller then takes the plain step).
    fn step(&mut self, z: &[DMatrix<T>], g: &[DMatrix<T>]) -> Option<Blocks<T>> {
        if self.memory == 0 {
            return None;
        }
        if let Some((pz, pg)) = self.prev.take() {
            if self.dz.len() == self.memory {
                self.dz.pop_front();
                self.dg.pop_front();
                self.gram.pop_front();
                for row in self.gram.iter_mut() {
                    row.pop_front();
                }
            }
            let new_dg: Blocks<T> = g.iter().zip(&pg).map(|(a, b)| a - b).collect();
            let row: VecDeque<T> = self.dg.iter().map(|d| dot(d, &new_dg)).collect();
            for (r, &v) in self.gram.iter_mut().zip(&row) {
                r.push_back(v);
            }
            let mut row = row;
            row.push_back(dot(&new_dg, &new_dg));
            self.gram.push_back(row);
            self.dg.push_back(new_dg);
            self.dz.push_back(z.iter().zip(&pz).map(|(a, b)| a - b).collect());
        }
        self.prev = Some((z.to_vec(), g.to_vec()));
        let m = self.dg.len();
        if m == 0 {
            return None;
        }
        let mut gram = DMatrix::<T>::from_fn(m, m, |i, j| self.gram[i][j]);
        let rhs = nalgebra::DVector::<T>::from_iterator(m, self.dg.iter().map(|d| dot(d, g)));
        let reg = T::lit(1e-10) * gram.trace().max(T::eps());
        for i in 0..m {
            gram[(i, i)] += reg;
        }
        let gamma = gram.cholesky()?.solve(&rhs);
        if gamma.iter().any(|c| !c.is_finite()) {
            self.clear();
            return None;
        }
        let mut out: Blocks<T> = z.iter().zip(g).map(|(a, b)| a + b).collect();
        for (k, &c) in gamma.iter().enumerate() {
            for ((ob, zb), gb) in out.iter_mut().zip(&self.dz[k]).zip(&self.dg[k]) {
                *ob -= (zb + gb) * c;
            }
        }
        Some(out)
    }
}

/// `⟨A, M⟩` for `A` given by its upper-triangle entries.
fn inner<T: Real>(entries: &[(usize, usize, usize, T)], m: &[DMatrix<T>]) -> T {
    entries.iter().fold(T::zero(), |acc, &(b, i, j, a)| {
        if i == j {
            acc + a * m[b][(i, i)]
        } else {
            acc + a * (m[b][(i, j)] + m[b][(j, i)])
        }
    })
}

/// Dual quantities from `S = Π_psd(−W)/t`.
fn dual_iterate<T: Real>(
    red: &Reduction<T>,
    neg: &[DMatrix<T>],
    t: T,
    constant: T,
    dim: T,
    certify: bool,
) -> Dual<T> {
    let trace = neg.iter().fold(T::zero(), |a, m| a + m.trace()) / t;
    let mut residual = T::zero();
    let mut deltas = Vec::with_capacity(red.free.len());
    for oc in &red.free {
        let d = oc.coeff + inner(&oc.entries, neg) / t;
        residual += d * d / oc.norm2;
        deltas.push(d);
    }
    let objective = constant + trace;
    let mut certified = objective;
    if certify {
        let mut s: Vec<DMatrix<T>> = neg.iter().map(|m| m / t).collect();
        for (oc, &d) in red.free.iter().zip(&deltas) {
            let shift = d / oc.norm2;
            for &(b, i, j, a) in &oc.entries {
                s[b][(i, j)] -= a * shift;
                if i != j {
                    s[b][(j, i)] -= a * shift;
                }
            }
        }
        let lam = s.iter().map(min_eigenvalue).fold(T::zero(), |a, b| a.min(b));
        certified = objective + dim * (-lam).max(T::zero());
    }
    Dual { residual: residual.sqrt(), objective, certified }
}

#[allow(clippy::too_many_arguments)]
fn finish<T: Real>(
    structure: &MomentStructure<T>,
    red: &Reduction<T>,
    y_free: &[T],
    nu_upper: T,
    primal: T,
    dual: T,
    gap: T,
    iterations: usize,
) -> Result<SdpSolution<T>, SdpError> {
    let mut values = vec![T::zero(); structure.classes().len()];
    for (oc, &y) in red.free.iter().zip(y_free) {
        for &(c, sg) in &oc.members {
            values[c] = sg * y;
        }
    }
    let mut sol = SdpSolution::from_moments(structure, values)?;
    sol.set_solver_diagnostics(nu_upper, primal, dual, gap, iterations);
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use crate::sdp::moment::{build_moment_structure, Level};

    fn solve(g: &WeightedGraph<f64>, level: Level, reduce: bool) -> SdpSolution<f64> {
        let s = build_moment_structure(g, level).unwrap();
        let opts = SolverOptions { symmetry_reduction: reduce, ..SolverOptions::default() };
        solve_sdp(&s, g, &opts).unwrap()
    }

    #[test]
    fn k2_value() {
        let sol = solve(&complete(2, 1.0), Level::Two, true);
        assert!((sol.nu() - 1.0).abs() < 1e-5, "{}", sol.nu());
        assert!(sol.nu_upper().unwrap() >= 1.0 - 1e-9);
        assert!(sol.residuals().psd <= 1e-6);
    }

    #[test]
    fn triangle_value() {
        let sol = solve(&complete(3, 1.0), Level::Two, true);
        assert!((sol.nu() - 1.5).abs() < 1e-5, "{}", sol.nu());
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            assert!((sol.g(i, j) - 0.5).abs() < 1e-4);
        }
    }

    #[test]
    fn empty_graph_value() {
        let sol = solve(&WeightedGraph::empty(3), Level::Two, true);
        assert_eq!(sol.nu(), 0.0);
    }

    #[test]
    fn reduction_matches_full_solve() {
        let g = WeightedGraph::new(4, [(0, 1, 0.7), (1, 2, 0.4), (2, 3, 1.0), (0, 3, 0.2), (1, 3, 0.9)]).unwrap();
        let a = solve(&g, Level::Two, true);
        let b = solve(&g, Level::Two, false);
        assert!((a.nu() - b.nu()).abs() < 1e-5, "{} vs {}", a.nu(), b.nu());
    }

    #[test]
    fn level_one_dominates_level_two() {
        let g = complete(4, 1.0);
        let l1 = solve(&g, Level::One, true);
        let l2 = solve(&g, Level::Two, true);
        assert!(l1.nu() >= l2.nu() - 1e-5);
    }

    #[test]
    fn reports_non_convergence() {
        let g = complete(3, 1.0);
        let s = build_moment_structure(&g, Level::Two).unwrap();
        let opts = SolverOptions { max_iter: 3, ..SolverOptions::default() };
        assert!(matches!(solve_sdp(&s, &g, &opts), Err(SdpError::NonConvergence { iterations: 3, .. })));
    }

    #[test]
    fn rejects_bad_tolerance() {
        let g = complete(2, 1.0);
        let s = build_moment_structure(&g, Level::Two).unwrap();
        let opts = SolverOptions { tol: 0.0, ..SolverOptions::default() };
        assert_eq!(solve_sdp(&s, &g, &opts).unwrap_err(), SdpError::InvalidTolerance);
    }
}
