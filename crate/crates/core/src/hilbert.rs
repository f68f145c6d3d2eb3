//! Composite space of three internal levels and a truncated phonon ladder.
//!
//! Composite states are laid out internal-fastest: the flat index of
//! `|level, n⟩` is `3·n + level.ordinal()`. A composite operator built by
//! [`embed`] is therefore `phonon_op ⊗ internal_op` in Kronecker order.

use std::fmt;

use faer::{c64, Col, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ONE, ZERO};

/// Dense complex matrix used for operators, density matrices and superoperators.
pub type ComplexMatrix = Mat<c64>;

pub const INTERNAL_DIM: usize = 3;

/// Which pair of ground states spans the internal space next to `|e⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// Bare ground states `|g⟩`, `|r⟩`.
    Gre,
    /// Dark and bright superpositions `|d⟩`, `|b⟩`.
    Dbe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InternalLevel {
    G,
    R,
    D,
    B,
    /// The excited state, shared by both representations.
    E,
}

impl InternalLevel {
    pub fn ordinal(self) -> usize {
        match self {
            InternalLevel::G | InternalLevel::D => 0,
            InternalLevel::R | InternalLevel::B => 1,
            InternalLevel::E => 2,
        }
    }

    /// `None` for `|e⟩`, which belongs to both representations.
    pub fn representation(self) -> Option<Representation> {
        match self {
            InternalLevel::G | InternalLevel::R => Some(Representation::Gre),
            InternalLevel::D | InternalLevel::B => Some(Representation::Dbe),
            InternalLevel::E => None,
        }
    }

    pub fn levels(rep: Representation) -> [InternalLevel; INTERNAL_DIM] {
        match rep {
            Representation::Gre => [InternalLevel::G, InternalLevel::R, InternalLevel::E],
            Representation::Dbe => [InternalLevel::D, InternalLevel::B, InternalLevel::E],
        }
    }

    fn label(self) -> char {
        match self {
            InternalLevel::G => 'g',
            InternalLevel::R => 'r',
            InternalLevel::D => 'd',
            InternalLevel::B => 'b',
            InternalLevel::E => 'e',
        }
    }
}

/// Highest phonon number kept in the truncated ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct FockCutoff(usize);

impl FockCutoff {
    /// Smallest cutoff that still represents `|d,2⟩`.
    pub const MIN: usize = 2;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < Self::MIN {
            return Err(Error::config(format!(
                "Fock cutoff n_max = {n_max} is below the minimum of {}",
                Self::MIN
            )));
        }
        Ok(Self(n_max))
    }

    pub fn n_max(self) -> usize {
        self.0
    }

    /// Dimension of the phonon factor, `n_max + 1`.
    pub fn phonon_dim(self) -> usize {
        self.0 + 1
    }

    /// Dimension of the composite space, `3·(n_max + 1)`.
    pub fn dim(self) -> usize {
        INTERNAL_DIM * self.phonon_dim()
    }
}

impl TryFrom<usize> for FockCutoff {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<FockCutoff> for usize {
    fn from(c: FockCutoff) -> usize {
        c.0
    }
}

/// A composite basis label `|level, phonon⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub level: InternalLevel,
    pub phonon: usize,
}

impl BasisIndex {
    pub const fn new(level: InternalLevel, phonon: usize) -> Self {
        Self { level, phonon }
    }

    pub fn flat(self) -> usize {
        INTERNAL_DIM * self.phonon + self.level.ordinal()
    }

    pub fn from_flat(flat: usize, rep: Representation, cutoff: FockCutoff) -> Option<Self> {
        if flat >= cutoff.dim() {
            return None;
        }
        let level = InternalLevel::levels(rep)[flat % INTERNAL_DIM];
        Some(Self::new(level, flat / INTERNAL_DIM))
    }

    pub fn ket(self, cutoff: FockCutoff) -> Col<c64> {
        let f = self.flat();
        Col::from_fn(cutoff.dim(), |i| if i == f { ONE } else { ZERO })
    }

    /// `|self⟩⟨self|` on the composite space.
    pub fn projector(self, cutoff: FockCutoff) -> ComplexMatrix {
        let f = self.flat();
        let n = cutoff.dim();
        Mat::from_fn(n, n, |i, j| if i == f && j == f { ONE } else { ZERO })
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}⟩", self.level.label(), self.phonon)
    }
}

/// Phonon lowering operator, `⟨n−1|â|n⟩ = √n`.
pub fn annihilation(cutoff: FockCutoff) -> ComplexMatrix {
    let n = cutoff.phonon_dim();
    Mat::from_fn(n, n, |i, j| {
        if j == i + 1 {
            c64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

pub fn creation(cutoff: FockCutoff) -> ComplexMatrix {
    linalg::adjoint(annihilation(cutoff).as_ref())
}

/// `â†â`, diagonal `0, 1, …, n_max`.
pub fn number(cutoff: FockCutoff) -> ComplexMatrix {
    let n = cutoff.phonon_dim();
    Mat::from_fn(n, n, |i, j| if i == j { c64::new(i as f64, 0.0) } else { ZERO })
}

/// `â + â†`.
pub fn quadrature(cutoff: FockCutoff) -> ComplexMatrix {
    let a = annihilation(cutoff);
    &a + a.adjoint()
}

/// Position operator `(â + â†)/√(2·mass_freq_scale)`, where the scale is `Mν`.
pub fn position(cutoff: FockCutoff, mass_freq_scale: f64) -> Result<ComplexMatrix> {
    if !(mass_freq_scale > 0.0) {
        return Err(Error::config(format!(
            "position scale must be positive, got {mass_freq_scale}"
        )));
    }
    let k = 1.0 / (2.0 * mass_freq_scale).sqrt();
    Ok(linalg::scaled(quadrature(cutoff).as_ref(), c64::new(k, 0.0)))
}

/// Internal `|to⟩⟨from|` as a 3×3 matrix.
///
/// Levels are placed by ordinal, so `|g⟩⟨e|` and `|d⟩⟨e|` give the same matrix;
/// the representation is a property of how the result is interpreted.
pub fn transition(to: InternalLevel, from: InternalLevel) -> ComplexMatrix {
    let (r, c) = (to.ordinal(), from.ordinal());
    Mat::from_fn(INTERNAL_DIM, INTERNAL_DIM, |i, j| {
        if i == r && j == c {
            ONE
        } else {
            ZERO
        }
    })
}

/// `internal_op ⊗ phonon_op` under the internal-fastest layout.
pub fn embed(internal_op: &ComplexMatrix, phonon_op: &ComplexMatrix) -> Result<ComplexMatrix> {
    if internal_op.nrows() != INTERNAL_DIM || internal_op.ncols() != INTERNAL_DIM {
        return Err(Error::Dimension(format!(
            "internal operator must be 3×3, got {}×{}",
            internal_op.nrows(),
            internal_op.ncols()
        )));
    }
    if phonon_op.nrows() != phonon_op.ncols() || phonon_op.nrows() < FockCutoff::MIN + 1 {
        return Err(Error::Dimension(format!(
            "phonon operator must be square with dimension ≥ {}, got {}×{}",
            FockCutoff::MIN + 1,
            phonon_op.nrows(),
            phonon_op.ncols()
        )));
    }
    Ok(linalg::kron(phonon_op.as_ref(), internal_op.as_ref()))
}

/// `1 ⊗ â†â` on the composite space.
pub fn composite_number(cutoff: FockCutoff) -> ComplexMatrix {
    embed(&linalg::identity(INTERNAL_DIM), &number(cutoff)).expect("dimensions are fixed")
}
