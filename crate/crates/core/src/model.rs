//! Hamiltonians of the `A1 - B - A2` chain and of the three-level atom, plus
//! the rotation to the bright (`A`) and dark (`C`) modes.
//!
//! Mode order in every three-mode basis is `(A1, B, A2)`; in the reduced
//! two-mode space it is `(A1, A2)`.

use nalgebra::DMatrix;

use crate::fock::FockBasis;
use crate::{CMatrix, Error, Result, C64};

pub const A1_MODE: usize = 0;
pub const B_MODE: usize = 1;
pub const A2_MODE: usize = 2;

/// Couplings `kappa1`, `kappa2` and detuning `delta` of mode `B`, all in
/// inverse time units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub kappa1: f64,
    pub kappa2: f64,
    pub delta: f64,
}

impl ChainParams {
    pub fn new(kappa1: f64, kappa2: f64, delta: f64) -> Self {
        Self { kappa1, kappa2, delta }
    }

    /// Couplings with total strength `kappa` split at angle `theta`.
    pub fn from_angle(kappa: f64, theta: f64, delta: f64) -> Self {
        Self { kappa1: kappa * theta.cos(), kappa2: kappa * theta.sin(), delta }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa1.is_finite() && self.kappa2.is_finite() && self.delta.is_finite()) {
            return Err(Error::InvalidArgument("chain parameters must be finite".into()));
        }
        if self.kappa1 * self.kappa1 + self.kappa2 * self.kappa2 == 0.0 {
            return Err(Error::NoCoupling);
        }
        Ok(())
    }

    pub fn derived(&self) -> Result<DerivedModeParams> {
        derived_mode_params(self)
    }
}

/// Rotation angle and effective coupling of the bright mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedModeParams {
    pub theta: f64,
    pub kappa: f64,
}

/// `kappa = sqrt(kappa1^2 + kappa2^2)`, `cos(theta) = kappa1/kappa`,
/// `sin(theta) = kappa2/kappa`.
pub fn derived_mode_params(params: &ChainParams) -> Result<DerivedModeParams> {
    let kappa = params.kappa1.hypot(params.kappa2);
    if kappa == 0.0 {
        return Err(Error::NoCoupling);
    }
    Ok(DerivedModeParams { theta: params.kappa2.atan2(params.kappa1), kappa })
}

fn require_modes(basis: &FockBasis, modes: usize) -> Result<()> {
    if basis.mode_count() != modes {
        return Err(Error::InvalidArgument(format!("expected a {modes}-mode basis, got {} modes", basis.mode_count())));
    }
    Ok(())
}

/// Matrix of `a_to^dagger a_from` on `basis`. Transitions leaving the basis
/// are dropped.
pub fn hop_operator(basis: &FockBasis, from: usize, to: usize) -> CMatrix {
    let mut m = CMatrix::zeros(basis.len(), basis.len());
    for (col, s) in basis.states().iter().enumerate() {
        if s[from] == 0 {
            continue;
        }
        let mut t = s.clone();
        let amp = if from == to {
            s[from] as f64
        } else {
            t[from] -= 1;
            t[to] += 1;
            (s[from] as f64).sqrt() * (t[to] as f64).sqrt()
        };
        if let Some(row) = basis.index_of(&t) {
            m[(row, col)] += C64::new(amp, 0.0);
        }
    }
    m
}

/// Matrix of the annihilation operator of `mode` on `basis` (maps each
/// state to the one with a quantum removed, when present in the basis).
pub fn annihilation_operator(basis: &FockBasis, mode: usize) -> CMatrix {
    let mut m = CMatrix::zeros(basis.len(), basis.len());
    for (col, s) in basis.states().iter().enumerate() {
        if s[mode] == 0 {
            continue;
        }
        let mut t = s.clone();
        t[mode] -= 1;
        if let Some(row) = basis.index_of(&t) {
            m[(row, col)] = C64::new((s[mode] as f64).sqrt(), 0.0);
        }
    }
    m
}

/// Diagonal matrix of the occupation of `mode`.
pub fn number_operator(basis: &FockBasis, mode: usize) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        basis.len(),
        basis.states().iter().map(|s| C64::new(s[mode] as f64, 0.0)),
    ))
}

/// `H = k1 (a1^dag b + a1 b^dag) + k2 (a2^dag b + a2 b^dag) - delta b^dag b`
/// on a basis over `(A1, B, A2)`.
pub fn chain_hamiltonian(params: &ChainParams, basis: &FockBasis) -> Result<CMatrix> {
    require_modes(basis, 3)?;
    let k1 = C64::new(params.kappa1, 0.0);
    let k2 = C64::new(params.kappa2, 0.0);
    let h = (hop_operator(basis, B_MODE, A1_MODE) + hop_operator(basis, A1_MODE, B_MODE)) * k1
        + (hop_operator(basis, B_MODE, A2_MODE) + hop_operator(basis, A2_MODE, B_MODE)) * k2
        - number_operator(basis, B_MODE) * C64::new(params.delta, 0.0);
    Ok(h)
}

/// Three-level Hamiltonian in the basis `(|A1>, |B>, |A2>)`.
pub fn atomic_hamiltonian(params: &ChainParams) -> CMatrix {
    let (k1, k2, d) = (params.kappa1, params.kappa2, params.delta);
    DMatrix::from_row_slice(
        3,
        3,
        &[
            C64::new(0.0, 0.0),
            C64::new(k1, 0.0),
            C64::new(0.0, 0.0),
            C64::new(k1, 0.0),
            C64::new(-d, 0.0),
            C64::new(k2, 0.0),
            C64::new(0.0, 0.0),
            C64::new(k2, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn binomial(n: u32, k: u32) -> f64 {
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}

/// Representation on `basis` of the rotation of modes `first`, `second`
/// into `a = cos(theta) a_first + sin(theta) a_second` and
/// `c = -sin(theta) a_first + cos(theta) a_second`.
///
/// Maps amplitudes in the original number basis to amplitudes in the
/// rotated one, indexed with `(n_a, n_c)` in the slots of
/// `(first, second)`. Exactly unitary whenever the basis contains every
/// tuple reachable by redistributing quanta between the two modes
/// (sectors and bounded bases); on a per-mode truncation, amplitude that
/// would land outside the basis is dropped.
pub fn mode_rotation(theta: f64, basis: &FockBasis, first: usize, second: usize) -> Result<CMatrix> {
    let m = basis.mode_count();
    if first >= m || second >= m || first == second {
        return Err(Error::InvalidArgument(format!("rotation modes ({first}, {second}) invalid for {m} modes")));
    }
    let (c, s) = (theta.cos(), theta.sin());
    let mut u = CMatrix::zeros(basis.len(), basis.len());
    for (col, occ) in basis.states().iter().enumerate() {
        let (n1, n2) = (occ[first], occ[second]);
        let total = n1 + n2;
        let norm_in = ln_factorial(n1) + ln_factorial(n2);
        for na in 0..=total {
            let nc = total - na;
            let mut t = occ.clone();
            t[first] = na;
            t[second] = nc;
            let Some(row) = basis.index_of(&t) else { continue };
            // a1^dag = c a^dag - s c^dag, a2^dag = s a^dag + c c^dag
            let mut sum = 0.0;
            for k in na.saturating_sub(n2)..=n1.min(na) {
                let l = na - k;
                sum += binomial(n1, k)
                    * binomial(n2, l)
                    * c.powi(k as i32)
                    * (-s).powi((n1 - k) as i32)
                    * s.powi(l as i32)
                    * c.powi((n2 - l) as i32);
            }
            let scale = (0.5 * (ln_factorial(na) + ln_factorial(nc) - norm_in)).exp();
            u[(row, col)] = C64::new(scale * sum, 0.0);
        }
    }
    Ok(u)
}

/// Rotation on a two-mode `(A1, A2)` basis.
pub fn mode_rotation_unitary(theta: f64, basis: &FockBasis) -> Result<CMatrix> {
    require_modes(basis, 2)?;
    mode_rotation(theta, basis, 0, 1)
}
