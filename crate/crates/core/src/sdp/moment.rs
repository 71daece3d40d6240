use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::SdpError;
use crate::graph::WeightedGraph;
use crate::pauli::{enumerate_p1, enumerate_p2, Axis, PauliString};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Level {
    One,
    Two,
}

impl Level {
    pub fn as_u8(self) -> u8 {
        match self {
            Level::One => 1,
            Level::Two => 2,
        }
    }
}

impl TryFrom<u8> for Level {
    type Error = SdpError;

    fn try_from(k: u8) -> Result<Self, SdpError> {
        match k {
            1 => Ok(Level::One),
            2 => Ok(Level::Two),
            other => Err(SdpError::InvalidLevel(other)),
        }
    }
}

/// Upper-triangle position of a class member and its sign relative to the
/// class moment: `M[row, col] = sign · y_class`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassEntry {
    pub row: usize,
    pub col: usize,
    pub sign: i8,
}

/// All index pairs `(P, Q)` with `PQ = ±R` for one Pauli string `R ≠ I`.
#[derive(Clone, Debug)]
pub struct MomentClass {
    pub moment: PauliString,
    pub entries: Vec<ClassEntry>,
}

/// Objective as an affine functional of the class values.
#[derive(Clone, Debug)]
pub struct Objective<T> {
    pub constant: T,
    pub terms: Vec<(usize, T)>,
}

impl<T: Real> Objective<T> {
    pub fn eval(&self, values: &[T]) -> T {
        self.terms.iter().fold(self.constant, |acc, &(c, a)| acc + a * values[c])
    }
}

/// Index set and entry identifications of the moment matrix.
///
/// Classes are the connected components of the relation "`P₁Q₁ = ±P₂Q₂`"
/// over commuting index pairs; each component is labelled by its product
/// string, so the closure is computed by grouping on that label. The diagonal
/// (`PP = I`) is fixed to one and anticommuting pairs are fixed to zero.
#[derive(Clone, Debug)]
pub struct MomentStructure<T> {
    n: usize,
    level: Level,
    basis: Vec<PauliString>,
    basis_index: HashMap<PauliString, usize>,
    classes: Vec<MomentClass>,
    class_index: HashMap<PauliString, usize>,
    zero_pairs: Vec<(usize, usize)>,
    objective: Objective<T>,
}

pub fn build_moment_structure<T: Real>(g: &WeightedGraph<T>, level: Level) -> Result<MomentStructure<T>, SdpError> {
    let n = g.num_vertices();
    let basis = match level {
        Level::One => enumerate_p1(n)?,
        Level::Two => enumerate_p2(n)?,
    };
    let basis_index: HashMap<PauliString, usize> = basis.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut classes: Vec<MomentClass> = Vec::new();
    let mut class_index: HashMap<PauliString, usize> = HashMap::new();
    let mut zero_pairs = Vec::new();
    for (row, p) in basis.iter().enumerate() {
        for (col, q) in basis.iter().enumerate().skip(row + 1) {
            if !p.commutes(q)? {
                zero_pairs.push((row, col));
                continue;
            }
            let (phase, r) = p.multiply(q)?;
            let sign = phase.sign().expect("commuting Paulis multiply to a real phase");
            let id = *class_index.entry(r).or_insert_with(|| {
                classes.push(MomentClass { moment: r, entries: Vec::new() });
                classes.len() - 1
            });
            classes[id].entries.push(ClassEntry { row, col, sign });
        }
    }

    let quarter = T::lit(0.25);
    let mut constant = T::zero();
    let mut coeffs: HashMap<usize, T> = HashMap::new();
    for e in g.edges() {
        constant += e.w * quarter;
        for axis in Axis::ALL {
            let r = PauliString::new(n, &[(e.u, axis), (e.v, axis)])?;
            let c = class_index[&r];
            *coeffs.entry(c).or_insert(T::zero()) -= e.w * quarter;
        }
    }
    let mut terms: Vec<(usize, T)> = coeffs.into_iter().collect();
    terms.sort_by_key(|t| t.0);

    Ok(MomentStructure {
        n,
        level,
        basis,
        basis_index,
        classes,
        class_index,
        zero_pairs,
        objective: Objective { constant, terms },
    })
}

impl<T: Real> MomentStructure<T> {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn basis(&self) -> &[PauliString] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn classes(&self) -> &[MomentClass] {
        &self.classes
    }

    pub fn zero_pairs(&self) -> &[(usize, usize)] {
        &self.zero_pairs
    }

    pub fn objective(&self) -> &Objective<T> {
        &self.objective
    }

    pub fn index_of(&self, p: &PauliString) -> Option<usize> {
        self.basis_index.get(p).copied()
    }

    pub fn class_of(&self, moment: &PauliString) -> Option<usize> {
        self.class_index.get(moment).copied()
    }

    /// Class ids of `X_iX_j`, `Y_iY_j`, `Z_iZ_j`.
    pub fn pair_classes(&self, i: usize, j: usize) -> [usize; 3] {
        Axis::ALL.map(|a| {
            let r = PauliString::new(self.n, &[(i, a), (j, a)]).expect("valid pair");
            self.class_index[&r]
        })
    }

    /// Basis positions of `X_i`, `Y_i`, `Z_i`.
    pub fn qubit_rows(&self, i: usize) -> [usize; 3] {
        Axis::ALL.map(|a| {
            let p = PauliString::single(self.n, i, a).expect("valid qubit");
            self.basis_index[&p]
        })
    }

    /// Class values `y_R = f(R)` for a candidate moment functional, e.g. the
    /// expectation values of a physical state.
    pub fn values_from(&self, f: impl Fn(&PauliString) -> T) -> Vec<T> {
        self.classes.iter().map(|c| f(&c.moment)).collect()
    }

    /// The moment matrix of a class assignment.
    pub fn assemble(&self, values: &[T]) -> DMatrix<T> {
        let d = self.dim();
        let mut m = DMatrix::<T>::identity(d, d);
        for (c, class) in self.classes.iter().enumerate() {
            for e in &class.entries {
                let v = if e.sign > 0 { values[c] } else { -values[c] };
                m[(e.row, e.col)] = v;
                m[(e.col, e.row)] = v;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::complete;

    #[test]
    fn single_qubit_level_one_is_identity() {
        let g = WeightedGraph::<f64>::empty(1);
        let s = build_moment_structure(&g, Level::One).unwrap();
        assert_eq!(s.dim(), 4);
        // I pairs with X, Y, Z (classes); X, Y, Z pairwise anticommute.
        assert_eq!(s.zero_pairs().len(), 3);
        assert_eq!(s.classes().len(), 3);
        let m = s.assemble(&[0.0; 3]);
        assert_eq!(m, DMatrix::identity(4, 4));
    }

    #[test]
    fn k2_level_two_sign_pattern() {
        let s = build_moment_structure(&complete(2, 1.0), Level::Two).unwrap();
        assert_eq!(s.dim(), 16);
        let xx = PauliString::parse(2, "X0*X1").unwrap();
        let yy = PauliString::parse(2, "Y0*Y1").unwrap();
        let zz = PauliString::parse(2, "Z0*Z1").unwrap();
        let c = s.class_of(&zz).unwrap();
        let (ixx, iyy, iz) = (s.index_of(&xx).unwrap(), s.index_of(&yy).unwrap(), s.index_of(&zz).unwrap());
        let entries = &s.classes()[c].entries;
        let find = |r: usize, col: usize| entries.iter().find(|e| e.row == r.min(col) && e.col == r.max(col));
        assert_eq!(find(0, iz).unwrap().sign, 1);
        assert_eq!(find(ixx, iyy).unwrap().sign, -1);
    }

    #[test]
    fn k2_level_two_class_count_fixture() {
        // Each of the 15 non-identity two-qubit Paulis anticommutes with 8 others,
        // giving 60 zero pairs; every commuting pair multiplies to one of the 15.
        let s = build_moment_structure(&complete(2, 1.0), Level::Two).unwrap();
        assert_eq!(s.classes().len(), 15);
        assert_eq!(s.zero_pairs().len(), 60);
        let members: usize = s.classes().iter().map(|c| c.entries.len()).sum();
        assert_eq!(members + s.zero_pairs().len(), 120);
    }

    #[test]
    fn objective_terms_for_k2() {
        let s = build_moment_structure(&complete(2, 2.0), Level::Two).unwrap();
        let obj = s.objective();
        assert_eq!(obj.constant, 0.5);
        assert_eq!(obj.terms.len(), 3);
        assert!(obj.terms.iter().all(|&(_, a)| a == -0.5));
        let singlet = s.values_from(|r| match r.to_string().as_str() {
            "X0*X1" | "Y0*Y1" | "Z0*Z1" => -1.0,
            _ => 0.0,
        });
        assert_eq!(obj.eval(&singlet), 2.0);
    }

    #[test]
    fn zero_pairs_are_exactly_anticommuting() {
        let s = build_moment_structure(&complete(3, 1.0), Level::Two).unwrap();
        let b = s.basis();
        for &(r, c) in s.zero_pairs() {
            assert!(!b[r].commutes(&b[c]).unwrap());
        }
        for class in s.classes() {
            for e in &class.entries {
                assert!(b[e.row].commutes(&b[e.col]).unwrap());
                let (ph, prod) = b[e.row].multiply(&b[e.col]).unwrap();
                assert_eq!(prod, class.moment);
                assert_eq!(ph.sign(), Some(e.sign));
            }
        }
    }
}
