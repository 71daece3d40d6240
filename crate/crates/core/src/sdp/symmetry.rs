//! Axis symmetries of the relaxation.
//!
//! A signed permutation of the axes applied on every qubit maps Pauli strings
//! to signed Pauli strings and keeps commutation and real product phases, so
//! it permutes the moment classes up to sign. The objective only involves
//! `X_iX_j + Y_iY_j + Z_iZ_j`, which every such map fixes. The 24 maps with
//! determinant one are conjugations by local Cliffords; the other 24 compose
//! them with transposition, which acts on moment matrices as `M ↦ DMD` for a
//! diagonal sign matrix `D`. Averaging any optimum over the group gives an
//! invariant optimum, so the solver only works with invariant matrices.
//!
//! Invariant matrices commute with every element of the group algebra, so the
//! eigenspaces of one generic symmetric element `H = Σ c_g (P_g + P_gᵀ)`
//! block-diagonalize all of them at once. `H` never mixes different orbits of
//! basis strings, which keeps the new basis vectors sparse.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pauli::{Axis, PauliString};
use crate::scalar::Real;

use super::moment::MomentStructure;

/// Eigenvalues of `H` closer than this (relative to its norm) are treated as one.
const CLUSTER_GAP: f64 = 1e-7;
/// Block-coordinate entries below this are rounding noise of exact zeros.
const PRUNE: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
struct AxisMap {
    perm: [Axis; 3],
    sign: [i8; 3],
}

impl AxisMap {
    fn identity() -> Self {
        AxisMap { perm: Axis::ALL, sign: [1; 3] }
    }

    fn all() -> Vec<AxisMap> {
        use Axis::*;
        let perms = [[X, Y, Z], [Y, Z, X], [Z, X, Y], [Y, X, Z], [X, Z, Y], [Z, Y, X]];
        let mut out = Vec::with_capacity(48);
        for perm in perms {
            for bits in 0..8u8 {
                let sign = [0, 1, 2].map(|k| if bits >> k & 1 == 1 { -1 } else { 1 });
                out.push(AxisMap { perm, sign });
            }
        }
        out
    }

    fn apply(&self, p: &PauliString) -> (i8, PauliString) {
        let mut sign = 1i8;
        let factors: Vec<(usize, Axis)> = p
            .support()
            .map(|(q, a)| {
                let k = a.ordinal() as usize;
                sign *= self.sign[k];
                (q, self.perm[k])
            })
            .collect();
        let image = PauliString::new(p.num_qubits(), &factors).expect("axis maps keep the support");
        (sign, image)
    }
}

/// One free variable of the reduced problem: classes tied together by the
/// group, and the matching matrix `A` in block coordinates.
pub(crate) struct OrbitClass<T> {
    /// `(class, σ)` with `y_class = σ · y`.
    pub members: Vec<(usize, T)>,
    /// Upper-triangle entries `(block, i, j, A_ij)`, `i ≤ j`.
    pub entries: Vec<(usize, usize, usize, T)>,
    /// `⟨A, A⟩`.
    pub norm2: T,
    /// Objective coefficient of `y`.
    pub coeff: T,
}

pub(crate) struct Reduction<T> {
    pub blocks: Vec<usize>,
    pub free: Vec<OrbitClass<T>>,
}

impl<T: Real> Reduction<T> {
    /// With `enabled` false the group is trivial: one block in the original
    /// basis and one variable per class.
    pub fn new(s: &MomentStructure<T>, enabled: bool) -> Self {
        let group = if enabled { AxisMap::all() } else { vec![AxisMap::identity()] };
        let columns = block_basis(s, &group);
        let blocks: Vec<usize> = columns.iter().map(Vec::len).collect();

        // basis index -> (block, column, coefficient)
        let mut touch: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); s.dim()];
        for (b, cols) in columns.iter().enumerate() {
            for (k, col) in cols.iter().enumerate() {
                for &(r, u) in col {
                    touch[r].push((b, k, u));
                }
            }
        }

        let mut coeffs = vec![0.0f64; s.classes().len()];
        for &(c, a) in &s.objective().terms {
            coeffs[c] += a.as_f64();
        }

        let mut seen = vec![false; s.classes().len()];
        let mut free = Vec::new();
        for c in 0..s.classes().len() {
            if seen[c] {
                continue;
            }
            let mut members: Vec<(usize, i8)> = Vec::new();
            let mut vanishes = false;
            for g in &group {
                let (sg, image) = g.apply(&s.classes()[c].moment);
                let id = s.class_of(&image).expect("classes are closed under axis maps");
                match members.iter().find(|m| m.0 == id) {
                    Some(&(_, prev)) => vanishes |= prev != sg,
                    None => members.push((id, sg)),
                }
            }
            for &(id, _) in &members {
                seen[id] = true;
            }
            if vanishes {
                continue;
            }
            members.sort_unstable();

            let mut acc: HashMap<(usize, usize, usize), f64> = HashMap::new();
            for &(id, sg) in &members {
                for e in &s.classes()[id].entries {
                    let v = f64::from(sg * e.sign);
                    for &(b1, k, u) in &touch[e.row] {
                        for &(b2, l, w) in &touch[e.col] {
                            if b1 != b2 {
                                continue;
                            }
                            let add = if k == l { 2.0 * u * v * w } else { u * v * w };
                            *acc.entry((b1, k.min(l), k.max(l))).or_insert(0.0) += add;
                        }
                    }
                }
            }
            let mut entries: Vec<(usize, usize, usize, f64)> =
                acc.into_iter().filter(|e| e.1.abs() > PRUNE).map(|((b, i, j), v)| (b, i, j, v)).collect();
            entries.sort_by_key(|e| (e.0, e.1, e.2));
            let norm2: f64 = entries.iter().map(|&(_, i, j, v)| if i == j { v * v } else { 2.0 * v * v }).sum();
            let coeff: f64 = members.iter().map(|&(id, sg)| f64::from(sg) * coeffs[id]).sum();
            free.push(OrbitClass {
                members: members.into_iter().map(|(id, sg)| (id, T::lit(f64::from(sg)))).collect(),
                entries: entries.into_iter().map(|(b, i, j, v)| (b, i, j, T::lit(v))).collect(),
                norm2: T::lit(norm2),
                coeff: T::lit(coeff),
            });
        }
        Reduction { blocks, free }
    }
}

/// Orthonormal basis of each block as sparse columns `(basis index, coefficient)`.
fn block_basis<T: Real>(s: &MomentStructure<T>, group: &[AxisMap]) -> Vec<Vec<Vec<(usize, f64)>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let weights: Vec<f64> = group.iter().map(|_| rng.random_range(0.5..1.5)).collect();
    let scale: f64 = 2.0 * weights.iter().sum::<f64>();

    // (eigenvalue, sparse eigenvector) over all orbits
    let mut pieces: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    let mut seen = vec![false; s.dim()];
    for start in 0..s.dim() {
        if seen[start] {
            continue;
        }
        let mut orbit: Vec<usize> = Vec::new();
        for g in group {
            let (_, image) = g.apply(&s.basis()[start]);
            let k = s.index_of(&image).expect("basis is closed under axis maps");
            if !orbit.contains(&k) {
                orbit.push(k);
            }
        }
        orbit.sort_unstable();
        let local = |k: usize| orbit.binary_search(&k).expect("orbit member");
        let m = orbit.len();
        let mut h = DMatrix::<f64>::zeros(m, m);
        for (g, &c) in group.iter().zip(&weights) {
            for (col, &k) in orbit.iter().enumerate() {
                seen[k] = true;
                let (sg, image) = g.apply(&s.basis()[k]);
                let row = local(s.index_of(&image).expect("basis is closed under axis maps"));
                h[(row, col)] += c * f64::from(sg);
            }
        }
        let h = &h + h.transpose();
        let eig = SymmetricEigen::new(h);
        for j in 0..m {
            let vec = (0..m)
                .filter(|&r| eig.eigenvectors[(r, j)].abs() > PRUNE)
                .map(|r| (orbit[r], eig.eigenvectors[(r, j)]))
                .collect();
            pieces.push((eig.eigenvalues[j], vec));
        }
    }

    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut blocks: Vec<Vec<Vec<(usize, f64)>>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (lam, vec) in pieces {
        if blocks.is_empty() || lam - last > CLUSTER_GAP * scale {
            blocks.push(Vec::new());
        }
        last = lam;
        blocks.last_mut().expect("just pushed").push(vec);
    }
    blocks
}
