//! Exact algebra of Pauli strings with bounded support.
//!
//! Each qubit carries a symplectic pair of bits `(x, z)`: `X = (1, 0)`,
//! `Z = (0, 1)`, `Y = (1, 1)`. Products and commutation reduce to bitwise
//! operations on two `u64` masks, so at most [`MAX_QUBITS`] qubits are
//! representable.

use std::fmt;
use std::ops::Mul;

use crate::error::PauliError;

pub const MAX_QUBITS: usize = 64;

/// Largest support produced by multiplying two 2-local strings.
pub const MAX_SUPPORT: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Axis::X => (true, false),
            Axis::Y => (true, true),
            Axis::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Option<Axis> {
        match (x, z) {
            (false, false) => None,
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
        }
    }

    pub(crate) fn ordinal(self) -> u8 {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// Power of `i`: the phase `i^k` with `k` mod 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u8) -> Phase {
        Phase(k % 4)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `Some(±1)` for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

/// Tensor product of single-qubit Paulis on `n` qubits.
///
/// Identity factors are absent from the masks, so structural equality is
/// operator equality.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Result<Self, PauliError> {
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits { n, max: MAX_QUBITS });
        }
        Ok(PauliString { n: n as u8, x: 0, z: 0 })
    }

    pub fn single(n: usize, qubit: usize, axis: Axis) -> Result<Self, PauliError> {
        Self::new(n, &[(qubit, axis)])
    }

    /// Builds a string from `(qubit, axis)` pairs in any order.
    pub fn new(n: usize, factors: &[(usize, Axis)]) -> Result<Self, PauliError> {
        let mut p = Self::identity(n)?;
        if factors.len() > MAX_SUPPORT {
            return Err(PauliError::SupportTooLarge { size: factors.len(), max: MAX_SUPPORT });
        }
        for &(q, axis) in factors {
            if q >= n {
                return Err(PauliError::QubitOutOfRange { qubit: q, n });
            }
            let bit = 1u64 << q;
            if (p.x | p.z) & bit != 0 {
                return Err(PauliError::DuplicateQubit(q));
            }
            let (xb, zb) = axis.bits();
            if xb {
                p.x |= bit;
            }
            if zb {
                p.z |= bit;
            }
        }
        Ok(p)
    }

    /// Parses the `X0*Y3` rendering; `I` is the identity.
    pub fn parse(n: usize, text: &str) -> Result<Self, PauliError> {
        let text = text.trim();
        if text == "I" {
            return Self::identity(n);
        }
        let mut factors = Vec::new();
        for tok in text.split('*') {
            let mut chars = tok.chars();
            let axis = match chars.next() {
                Some('X') => Axis::X,
                Some('Y') => Axis::Y,
                Some('Z') => Axis::Z,
                _ => return Err(PauliError::Syntax(text.to_string())),
            };
            let q: usize = chars.as_str().parse().map_err(|_| PauliError::Syntax(text.to_string()))?;
            factors.push((q, axis));
        }
        Self::new(n, &factors)
    }

    pub fn num_qubits(&self) -> usize {
        self.n as usize
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x | self.z == 0
    }

    pub fn axis(&self, qubit: usize) -> Option<Axis> {
        if qubit >= 64 {
            return None;
        }
        Axis::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    /// Support entries in increasing qubit order.
    pub fn support(&self) -> impl Iterator<Item = (usize, Axis)> + '_ {
        let mut mask = self.x | self.z;
        std::iter::from_fn(move || {
            if mask == 0 {
                return None;
            }
            let q = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            self.axis(q).map(|a| (q, a))
        })
    }

    fn check_dims(&self, other: &PauliString) -> Result<(), PauliError> {
        if self.n != other.n {
            return Err(PauliError::DimensionMismatch { left: self.n as usize, right: other.n as usize });
        }
        Ok(())
    }

    /// `self · other = phase · result`.
    pub fn multiply(&self, other: &PauliString) -> Result<(Phase, PauliString), PauliError> {
        self.check_dims(other)?;
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let size = (x | z).count_ones() as usize;
        if size > MAX_SUPPORT {
            return Err(PauliError::SupportTooLarge { size, max: MAX_SUPPORT });
        }
        // Only qubits where both act non-trivially with different axes contribute ±i.
        let mut overlap = (self.x | self.z) & (other.x | other.z);
        let mut exponent = 0u8;
        while overlap != 0 {
            let q = overlap.trailing_zeros() as usize;
            overlap &= overlap - 1;
            let (a, b) = match (self.axis(q), other.axis(q)) {
                (Some(a), Some(b)) => (a, b),
                _ => continue,
            };
            if a != b {
                // XY = iZ, YZ = iX, ZX = iY; the reverse order picks up -i.
                exponent += if (b.ordinal() + 3 - a.ordinal()) % 3 == 1 { 1 } else { 3 };
            }
        }
        Ok((Phase::from_exponent(exponent), PauliString { n: self.n, x, z }))
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool, PauliError> {
        self.check_dims(other)?;
        let anti = (self.x & other.z) ^ (self.z & other.x);
        Ok(anti.count_ones().is_multiple_of(2))
    }

    /// Signs of conjugation by the global Paulis `Z^⊗n` and `X^⊗n`, packed as
    /// two parity bits. Products multiply sectors by XOR.
    pub fn global_sector(&self) -> u8 {
        let flips_under_z = (self.x.count_ones() % 2) as u8;
        let flips_under_x = (self.z.count_ones() % 2) as u8;
        flips_under_z | flips_under_x << 1
    }

    /// Parity of the number of `Y` factors, i.e. the sign `P^T = ±P`.
    /// Multiplicative (XOR) over products of commuting strings.
    pub fn transpose_parity(&self) -> u8 {
        ((self.x & self.z).count_ones() % 2) as u8
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for (q, a) in self.support() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "{}{}", a.letter(), q)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({}; n={})", self, self.n)
    }
}

/// Identity followed by the 3n single-qubit strings, ordered by (qubit, axis).
pub fn enumerate_p1(n: usize) -> Result<Vec<PauliString>, PauliError> {
    let mut out = Vec::with_capacity(1 + 3 * n);
    out.push(PauliString::identity(n)?);
    for q in 0..n {
        for a in Axis::ALL {
            out.push(PauliString::single(n, q, a)?);
        }
    }
    Ok(out)
}

/// All strings with support at most two.
///
/// Order: identity, weight one by (qubit, axis), then weight two
/// lexicographically by (first qubit, first axis, second qubit, second axis).
/// Length is `1 + 3n + 9n(n-1)/2`.
pub fn enumerate_p2(n: usize) -> Result<Vec<PauliString>, PauliError> {
    let mut out = enumerate_p1(n)?;
    out.reserve(9 * n * n.saturating_sub(1) / 2);
    for q1 in 0..n {
        for a1 in Axis::ALL {
            for q2 in q1 + 1..n {
                for a2 in Axis::ALL {
                    out.push(PauliString::new(n, &[(q1, a1), (q2, a2)])?);
                }
            }
        }
    }
    Ok(out)
}
