//! Brute-force ground truth for small instances.
//!
//! The Hamiltonian `Σ w_ij (I − X_iX_j − Y_iY_j − Z_iZ_j)/4` is real in the
//! computational basis: each edge term is the projector onto the singlet of
//! its two qubits. Basis index bit `q` is the state of qubit `q`.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::OracleError;
use crate::graph::WeightedGraph;
use crate::scalar::Real;
use crate::state::QuantumStateDescription;

/// 2^12 × 2^12 doubles is about 130 MB.
pub const DEFAULT_QUBIT_CAP: usize = 12;

#[derive(Clone, Debug)]
pub struct DenseHamiltonian<T: Real> {
    n: usize,
    matrix: DMatrix<T>,
}

impl<T: Real> DenseHamiltonian<T> {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport<T> {
    pub lambda_max: T,
    /// `‖Hx − λx‖` for the returned eigenvector.
    pub residual: T,
    /// Hamming weight of the magnetization sector holding the maximizer.
    pub sector: usize,
}

pub fn build_hamiltonian<T: Real>(g: &WeightedGraph<T>, cap: usize) -> Result<DenseHamiltonian<T>, OracleError> {
    let n = g.num_vertices();
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::<T>::zeros(dim, dim);
    let half = T::lit(0.5);
    for e in g.edges() {
        let flip = (1usize << e.u) | (1usize << e.v);
        let hw = e.w * half;
        for a in 0..dim {
            let bu = a >> e.u & 1;
            let bv = a >> e.v & 1;
            if bu != bv {
                m[(a, a)] += hw;
                m[(a ^ flip, a)] -= hw;
            }
        }
    }
    Ok(DenseHamiltonian { n, matrix: m })
}

/// Largest eigenvalue, computed sector by sector.
///
/// Every edge term preserves the number of set bits, so the matrix is block
/// diagonal over Hamming weights. Each block goes through a dense symmetric
/// eigensolve and the winning eigenvector is checked against the full matrix.
pub fn max_energy<T: Real>(h: &DenseHamiltonian<T>) -> Result<EnergyReport<T>, OracleError> {
    let dim = h.matrix.nrows();
    let mut best: Option<(T, usize, DVector<T>)> = None;
    for weight in 0..=h.n {
        let states: Vec<usize> = (0..dim).filter(|a| a.count_ones() as usize == weight).collect();
        let k = states.len();
        let block = DMatrix::from_fn(k, k, |r, c| h.matrix[(states[r], states[c])]);
        let eig = SymmetricEigen::new(block);
        let (arg, &lam) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite eigenvalues"))
            .expect("nonempty sector");
        if best.as_ref().is_none_or(|(l, _, _)| lam > *l) {
            let mut full = DVector::zeros(dim);
            for (r, &s) in states.iter().enumerate() {
                full[s] = eig.eigenvectors[(r, arg)];
            }
            best = Some((lam, weight, full));
        }
    }
    let (lambda_max, sector, x) = best.expect("at least one sector");
    let residual = (&h.matrix * &x - &x * lambda_max).norm();
    let scale = h.matrix.norm().max(T::one());
    let bound = scale * T::lit(1e-9).max(T::eps() * T::lit(1e3));
    if residual > bound {
        return Err(OracleError::Residual { residual: residual.as_f64(), bound: bound.as_f64() });
    }
    Ok(EnergyReport { lambda_max, residual, sector })
}

/// Exact `Tr(ρH)` for a product or matching state.
///
/// `ρ` is never stored; each entry `ρ_ab` is the product of its 1- and
/// 2-qubit factor entries and is only formed where `H_ba ≠ 0`.
pub fn energy_of_description<T: Real>(
    h: &DenseHamiltonian<T>,
    state: &QuantumStateDescription<T>,
) -> Result<T, OracleError> {
    let n = state.num_qubits();
    if n != h.n {
        return Err(OracleError::DimensionMismatch { state: n, hamiltonian: h.n });
    }
    let factors = density_factors(state);
    let dim = h.matrix.nrows();
    let mut acc = T::zero();
    for a in 0..dim {
        for b in 0..dim {
            let hba = h.matrix[(b, a)];
            if hba == T::zero() {
                continue;
            }
            let mut rho = Complex::new(T::one(), T::zero());
            for f in &factors {
                rho *= f.entry(a, b);
                if rho.re == T::zero() && rho.im == T::zero() {
                    break;
                }
            }
            acc += rho.re * hba;
        }
    }
    Ok(acc)
}

enum Factor<T: Real> {
    /// 2×2 density matrix on one qubit.
    Qubit { q: usize, m: [[Complex<T>; 2]; 2] },
    /// Singlet projector on a pair.
    Singlet { i: usize, j: usize },
}

impl<T: Real> Factor<T> {
    fn entry(&self, a: usize, b: usize) -> Complex<T> {
        match *self {
            Factor::Qubit { q, ref m } => m[a >> q & 1][b >> q & 1],
            Factor::Singlet { i, j } => {
                let ra = (a >> i & 1, a >> j & 1);
                let rb = (b >> i & 1, b >> j & 1);
                let half = T::lit(0.5);
                let v = match (ra, rb) {
                    ((0, 1), (0, 1)) | ((1, 0), (1, 0)) => half,
                    ((0, 1), (1, 0)) | ((1, 0), (0, 1)) => -half,
                    _ => T::zero(),
                };
                Complex::new(v, T::zero())
            }
        }
    }
}

fn density_factors<T: Real>(state: &QuantumStateDescription<T>) -> Vec<Factor<T>> {
    let half = T::lit(0.5);
    let c = |re: T, im: T| Complex::new(re, im);
    match state {
        QuantumStateDescription::Product(p) => p
            .bloch()
            .iter()
            .enumerate()
            .map(|(q, u)| {
                let [x, y, z] = *u;
                let m = [
                    [c(half * (T::one() + z), T::zero()), c(half * x, -half * y)],
                    [c(half * x, half * y), c(half * (T::one() - z), T::zero())],
                ];
                Factor::Qubit { q, m }
            })
            .collect(),
        QuantumStateDescription::Matching(m) => {
            let mixed = [[c(half, T::zero()), c(T::zero(), T::zero())], [c(T::zero(), T::zero()), c(half, T::zero())]];
            m.pairs()
                .iter()
                .map(|&(i, j)| Factor::Singlet { i, j })
                .chain(m.unmatched().iter().map(|&q| Factor::Qubit { q, m: mixed }))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use crate::matching::Matching;
    use crate::rounding::ProductState;

    fn sorted_eigs(h: &DenseHamiltonian<f64>) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(h.matrix.clone()).eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    #[test]
    fn k2_is_the_singlet_projector() {
        let h = build_hamiltonian(&complete(2, 1.0), DEFAULT_QUBIT_CAP).unwrap();
        let e = sorted_eigs(&h);
        for (got, want) in e.iter().zip([1.0, 0.0, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(h.matrix[(1, 1)], 0.5);
        assert_eq!(h.matrix[(2, 1)], -0.5);
        assert!((max_energy(&h).unwrap().lambda_max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_graph_gives_zero_matrix() {
        let h = build_hamiltonian(&WeightedGraph::<f64>::empty(3), DEFAULT_QUBIT_CAP).unwrap();
        assert!(h.matrix.iter().all(|&x| x == 0.0));
        assert_eq!(max_energy(&h).unwrap().lambda_max, 0.0);
    }

    #[test]
    fn unit_triangle_spectrum() {
        let h = build_hamiltonian(&complete(3, 1.0), DEFAULT_QUBIT_CAP).unwrap();
        let e = sorted_eigs(&h);
        for (k, got) in e.iter().enumerate() {
            let want = if k < 4 { 1.5 } else { 0.0 };
            assert!((got - want).abs() < 1e-12, "eigenvalue {k}: {got}");
        }
        assert!((max_energy(&h).unwrap().lambda_max - 1.5).abs() < 1e-12);
    }

    #[test]
    fn matrix_is_symmetric_and_psd() {
        let g = crate::graph::WeightedGraph::new(4, [(0, 1, 0.3), (1, 2, 0.9), (2, 3, 0.2), (0, 3, 0.7), (0, 2, 0.5)])
            .unwrap();
        let h = build_hamiltonian(&g, DEFAULT_QUBIT_CAP).unwrap();
        assert_eq!(h.matrix, h.matrix.transpose());
        assert!(sorted_eigs(&h).last().unwrap() > &-1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let g = WeightedGraph::<f64>::empty(5);
        assert_eq!(build_hamiltonian(&g, 4).unwrap_err(), OracleError::TooLarge { n: 5, cap: 4 });
    }

    #[test]
    fn unit_star_fixture() {
        // K_{1,3}: the centre can only pair with one leaf at a time; total spin
        // algebra gives λ_max = 2 (centre spin 1/2 against leaf spin 3/2).
        let h = build_hamiltonian(&star(3, 1.0f64), DEFAULT_QUBIT_CAP).unwrap();
        let r = max_energy(&h).unwrap();
        assert!((r.lambda_max - 2.0).abs() < 1e-12);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn energies_of_simple_descriptions() {
        let g = complete(2, 1.0f64);
        let h = build_hamiltonian(&g, DEFAULT_QUBIT_CAP).unwrap();
        let singlet = Matching::new(&g, vec![0]).unwrap();
        let e = energy_of_description(&h, &QuantumStateDescription::Matching(singlet)).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
        let mixed = Matching::new(&g, vec![]).unwrap();
        let e = energy_of_description(&h, &QuantumStateDescription::Matching(mixed)).unwrap();
        assert!((e - 0.25).abs() < 1e-15);
        let s = (1.0f64 / 3.0).sqrt();
        let anti = ProductState::new(vec![[s, s, s], [-s, -s, -s]]).unwrap();
        let e = energy_of_description(&h, &QuantumStateDescription::Product(anti)).unwrap();
        assert!((e - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let h = build_hamiltonian(&complete(3, 1.0), DEFAULT_QUBIT_CAP).unwrap();
        let m = Matching::new(&complete(2, 1.0), vec![0]).unwrap();
        assert!(matches!(
            energy_of_description(&h, &QuantumStateDescription::Matching(m)),
            Err(OracleError::DimensionMismatch { state: 2, hamiltonian: 3 })
        ));
    }
}
