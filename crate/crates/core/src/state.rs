use serde::Serialize;

use crate::matching::Matching;
use crate::rounding::ProductState;
use crate::scalar::Real;

/// The two output ansätze: a product of single-qubit states, or singlets on a
/// matching with every other qubit maximally mixed.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumStateDescription<T: Real> {
    Product(ProductState<T>),
    Matching(Matching),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Product,
    Matching,
}

impl<T: Real> QuantumStateDescription<T> {
    pub fn num_qubits(&self) -> usize {
        match self {
            QuantumStateDescription::Product(p) => p.num_qubits(),
            QuantumStateDescription::Matching(m) => m.num_vertices(),
        }
    }

    pub fn kind(&self) -> StateKind {
        match self {
            QuantumStateDescription::Product(_) => StateKind::Product,
            QuantumStateDescription::Matching(_) => StateKind::Matching,
        }
    }
}
