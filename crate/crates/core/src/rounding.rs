//! Product-state rounding of the SDP vertex vectors.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::RoundingError;
use crate::graph::WeightedGraph;
use crate::scalar::Real;
use crate::sdp::SdpSolution;
use crate::special::f3_clamped;

/// Norms below this trigger a resample of the projection.
const DEGENERATE_NORM: f64 = 1e-12;

/// One unit Bloch vector per qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState<T> {
    bloch: Vec<[T; 3]>,
}

impl<T: Real> ProductState<T> {
    pub fn new(bloch: Vec<[T; 3]>) -> Result<Self, RoundingError> {
        let tol = T::lit(1e-12).max(T::eps() * T::lit(16.0));
        for (i, u) in bloch.iter().enumerate() {
            let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
            if !((norm - T::one()).abs() <= tol) {
                return Err(RoundingError::NotUnit(i));
            }
        }
        Ok(ProductState { bloch })
    }

    pub fn bloch(&self) -> &[[T; 3]] {
        &self.bloch
    }

    pub fn num_qubits(&self) -> usize {
        self.bloch.len()
    }
}

/// Seed plus stream for ChaCha8; independent trials use distinct streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        RngSeed { seed, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        RngSeed { stream, ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Projects every `v_i` through one shared Gaussian `3 × d` matrix and
/// normalizes: `u_i = R v_i / ‖R v_i‖`.
pub fn gp_round<T: Real>(sol: &SdpSolution<T>, seed: RngSeed) -> ProductState<T> {
    let v = sol.vertex_vectors();
    let (n, d) = v.shape();
    let mut rng = seed.rng();
    loop {
        let r = DMatrix::<T>::from_fn(d, 3, |_, _| {
            let s: f64 = StandardNormal.sample(&mut rng);
            T::lit(s)
        });
        let u = v * r;
        let mut bloch = Vec::with_capacity(n);
        for i in 0..n {
            let row = [u[(i, 0)], u[(i, 1)], u[(i, 2)]];
            let norm = (row[0] * row[0] + row[1] * row[1] + row[2] * row[2]).sqrt();
            if !(norm >= T::lit(DEGENERATE_NORM)) {
                break;
            }
            bloch.push(row.map(|c| c / norm));
        }
        if bloch.len() == n {
            return ProductState { bloch };
        }
    }
}

/// `Σ w_ij (1 − u_i·u_j)/4`.
pub fn product_state_energy<T: Real>(state: &ProductState<T>, g: &WeightedGraph<T>) -> Result<T, RoundingError> {
    if state.num_qubits() != g.num_vertices() {
        return Err(RoundingError::DimensionMismatch { state: state.num_qubits(), graph: g.num_vertices() });
    }
    let quarter = T::lit(0.25);
    Ok(g.edges().iter().fold(T::zero(), |acc, e| {
        let (a, b) = (&state.bloch[e.u], &state.bloch[e.v]);
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        acc + e.w * (T::one() - dot) * quarter
    }))
}

/// Expected energy of [`gp_round`]: `Σ w_ij (1 − f₃(v_i·v_j))/4`.
pub fn expected_product_energy<T: Real>(sol: &SdpSolution<T>, g: &WeightedGraph<T>) -> T {
    let quarter = T::lit(0.25);
    g.edges()
        .iter()
        .fold(T::zero(), |acc, e| acc + e.w * (T::one() - f3_clamped(sol.vertex_dot(e.u, e.v))) * quarter)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestProduct<T> {
    pub state: ProductState<T>,
    pub energy: T,
    /// Stream index of the winning trial.
    pub trial: u64,
}

/// Best of `trials` roundings, trial `k` using stream `k` of `seed`.
/// Ties go to the lowest trial index, so the result does not depend on
/// scheduling.
pub fn best_of_trials<T: Real>(
    sol: &SdpSolution<T>,
    g: &WeightedGraph<T>,
    seed: u64,
    trials: u64,
) -> Result<BestProduct<T>, RoundingError> {
    if trials == 0 {
        return Err(RoundingError::NoTrials);
    }
    if sol.num_qubits() != g.num_vertices() {
        return Err(RoundingError::DimensionMismatch { state: sol.num_qubits(), graph: g.num_vertices() });
    }
    let base = RngSeed::new(seed);
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let state = gp_round(sol, base.with_stream(k));
            let energy = product_state_energy(&state, g)?;
            Ok(BestProduct { state, energy, trial: k })
        })
        .try_reduce_with(|a, b| {
            let keep_a = a.energy > b.energy || (a.energy == b.energy && a.trial < b.trial);
            Ok(if keep_a { a } else { b })
        })
        .expect("at least one trial")
}
