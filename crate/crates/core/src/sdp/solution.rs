use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::SdpError;
use crate::graph::WeightedGraph;
use crate::scalar::Real;

use super::moment::{Level, MomentStructure};

/// Per-edge SDP quantities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EdgeValues<T> {
    pub u: usize,
    pub v: usize,
    pub w: T,
    pub g: T,
    pub h: T,
    pub h_plus: T,
}

/// Solver diagnostics. All zero for solutions built directly from moments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residuals<T> {
    /// `‖X − Π_psd(X)‖`-type distance between the affine iterate and the cone iterate.
    pub primal: T,
    /// Norm of the dual-feasibility defect before correction.
    pub dual: T,
    /// Relative primal/dual objective gap at termination.
    pub gap: T,
    /// `max(0, −λ_min(M))`.
    pub psd: T,
    /// `max |g_ij − (1 − 3 v_i·v_j)/4|` over all pairs.
    pub vector_consistency: T,
    pub iterations: usize,
}

impl<T: Real> Default for Residuals<T> {
    fn default() -> Self {
        let z = T::zero();
        Residuals { primal: z, dual: z, gap: z, psd: z, vector_consistency: z, iterations: 0 }
    }
}

/// Moment matrix with its factorization and the derived pair quantities.
#[derive(Clone, Debug)]
pub struct SdpSolution<T: Real> {
    n: usize,
    level: Level,
    moments: Vec<T>,
    moment_matrix: DMatrix<T>,
    factors: DMatrix<T>,
    vertex_vectors: DMatrix<T>,
    pair_g: DMatrix<T>,
    nu: T,
    nu_upper: Option<T>,
    residuals: Residuals<T>,
}

impl<T: Real> SdpSolution<T> {
    /// Builds a solution from one value per moment class.
    ///
    /// The factor `F` with `FFᵀ ≈ M` comes from the eigendecomposition of `M`
    /// with negative eigenvalues clamped to zero; `v(P)` is row `P` of `F`.
    pub fn from_moments(structure: &MomentStructure<T>, moments: Vec<T>) -> Result<Self, SdpError> {
        let expected = structure.classes().len();
        if moments.len() != expected {
            return Err(SdpError::ValueCount { expected, found: moments.len() });
        }
        let n = structure.num_qubits();
        let moment_matrix = structure.assemble(&moments);
        let d = moment_matrix.nrows();
        let eig = SymmetricEigen::new(moment_matrix.clone());
        let min_eig = eig.eigenvalues.iter().copied().fold(T::zero(), |a, b| a.min(b));
        let top = eig.eigenvalues.iter().copied().fold(T::zero(), |a, b| a.max(b));
        // Eigenvalues at rounding level are zeroed: their square roots would
        // otherwise put noise of order √ε into the vectors.
        let floor = T::eps() * T::from_count(d.max(1)) * top;
        let mut factors = eig.eigenvectors;
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            let s = if lam > floor { lam.sqrt() } else { T::zero() };
            factors.column_mut(k).scale_mut(s);
        }

        let inv_sqrt3 = T::one() / T::lit(3.0).sqrt();
        let mut vertex_vectors = DMatrix::<T>::zeros(n, 3 * d);
        for i in 0..n {
            for (a, row) in structure.qubit_rows(i).into_iter().enumerate() {
                for k in 0..d {
                    vertex_vectors[(i, a * d + k)] = factors[(row, k)] * inv_sqrt3;
                }
            }
        }

        let quarter = T::lit(0.25);
        let mut pair_g = DMatrix::<T>::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let [cx, cy, cz] = structure.pair_classes(i, j);
                let g = (T::one() - moments[cx] - moments[cy] - moments[cz]) * quarter;
                pair_g[(i, j)] = g;
                pair_g[(j, i)] = g;
            }
        }

        let nu = structure.objective().eval(&moments);
        let mut sol = SdpSolution {
            n,
            level: structure.level(),
            moments,
            moment_matrix,
            factors,
            vertex_vectors,
            pair_g,
            nu,
            nu_upper: None,
            residuals: Residuals::default(),
        };
        sol.residuals.psd = (-min_eig).max(T::zero());
        sol.residuals.vector_consistency = sol.consistency();
        Ok(sol)
    }

    fn consistency(&self) -> T {
        let mut worst = T::zero();
        let quarter = T::lit(0.25);
        for i in 0..self.n {
            for j in i + 1..self.n {
                let from_vectors = (T::one() - T::lit(3.0) * self.vertex_dot(i, j)) * quarter;
                worst = worst.max((self.pair_g[(i, j)] - from_vectors).abs());
            }
        }
        worst
    }

    pub(crate) fn set_solver_diagnostics(&mut self, nu_upper: T, primal: T, dual: T, gap: T, iterations: usize) {
        self.nu_upper = Some(nu_upper);
        self.residuals.primal = primal;
        self.residuals.dual = dual;
        self.residuals.gap = gap;
        self.residuals.iterations = iterations;
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> Level {
        self.level
    }

    /// Objective value `ν = Σ w_ij g_ij`.
    pub fn nu(&self) -> T {
        self.nu
    }

    /// Certified upper bound on the relaxation optimum from the solver's dual
    /// iterate, when the solution came from [`solve_sdp`](super::solve_sdp).
    pub fn nu_upper(&self) -> Option<T> {
        self.nu_upper
    }

    pub fn residuals(&self) -> &Residuals<T> {
        &self.residuals
    }

    /// One value per moment class, in class order.
    pub fn moments(&self) -> &[T] {
        &self.moments
    }

    pub fn moment_matrix(&self) -> &DMatrix<T> {
        &self.moment_matrix
    }

    /// Rows are the vectors `v(P)` in basis order.
    pub fn factors(&self) -> &DMatrix<T> {
        &self.factors
    }

    /// Row `i` is `v_i = (v(X_i) ‖ v(Y_i) ‖ v(Z_i)) / √3`.
    pub fn vertex_vectors(&self) -> &DMatrix<T> {
        &self.vertex_vectors
    }

    pub fn vertex_dot(&self, i: usize, j: usize) -> T {
        self.vertex_vectors.row(i).dot(&self.vertex_vectors.row(j))
    }

    /// `g_ij` for any pair of distinct vertices, edge or not.
    pub fn g(&self, i: usize, j: usize) -> T {
        self.pair_g[(i, j)]
    }

    pub fn h(&self, i: usize, j: usize) -> T {
        self.g(i, j) - T::lit(0.5)
    }

    pub fn h_plus(&self, i: usize, j: usize) -> T {
        self.h(i, j).max(T::zero())
    }

    pub fn edge_values(&self, g: &WeightedGraph<T>) -> Vec<EdgeValues<T>> {
        g.edges()
            .iter()
            .map(|e| EdgeValues { u: e.u, v: e.v, w: e.w, g: self.g(e.u, e.v), h: self.h(e.u, e.v), h_plus: self.h_plus(e.u, e.v) })
            .collect()
    }
}
