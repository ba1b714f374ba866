//! Exact step operators: `exp(-iH dt)`, its compression to the `B` vacuum,
//! the Kraus operators of a `B` photon-number readout, and the bright-mode
//! dephasing.

use std::sync::Arc;

use nalgebra::SymmetricEigen;

use crate::fock::{max_abs, FockBasis, StateVector};
use crate::model::{chain_hamiltonian, mode_rotation_unitary, ChainParams, B_MODE};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Hermiticity tolerance, relative to the largest entry of `H` (floored at 1).
pub const HERMITIAN_TOL: f64 = 1e-12;

/// `exp(-i H dt)` from the Hermitian eigendecomposition of `H`.
pub fn unitary_step(h: &CMatrix, dt: f64) -> Result<CMatrix> {
    if dt < 0.0 {
        return Err(Error::NegativeTimeStep(dt));
    }
    if !h.is_square() {
        return Err(Error::InvalidArgument("Hamiltonian must be square".into()));
    }
    let defect = max_abs(&(h - h.adjoint()));
    if defect > HERMITIAN_TOL * max_abs(h).max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    if dt == 0.0 {
        return Ok(CMatrix::identity(h.nrows(), h.ncols()));
    }
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = eig.eigenvalues.map(|e| C64::from_polar(1.0, -e * dt));
    let mut scaled = v.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[k];
    }
    Ok(scaled * v.adjoint())
}

/// Operator on the `(A1, A2)` space obtained by dropping mode `B`.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    pub basis: Arc<FockBasis>,
    pub matrix: CMatrix,
}

/// Kraus operators `K_n = <n|_B U |0>_B`, `n = 0..=b_cutoff`.
#[derive(Debug, Clone)]
pub struct KrausSet {
    pub basis: Arc<FockBasis>,
    pub operators: Vec<CMatrix>,
}

impl KrausSet {
    /// `sum_n K_n^dagger K_n`.
    pub fn completeness(&self) -> CMatrix {
        let d = self.basis.len();
        self.operators.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k)
    }
}

fn require_chain_basis(full: &FockBasis) -> Result<()> {
    if full.mode_count() != 3 {
        return Err(Error::InvalidArgument(format!(
            "expected a basis over (A1, B, A2), got {} modes",
            full.mode_count()
        )));
    }
    Ok(())
}

fn with_b(reduced: &[u32], b: u32) -> [u32; 3] {
    [reduced[0], b, reduced[1]]
}

/// Matrix elements `<out|_{A} <b|_B U |0>_B |in>_A` for all `b <= b_cutoff`
/// between states of `reduced`. `U` is over `full`; pairs that leave either
/// basis are skipped.
fn compress(u: &CMatrix, full: &FockBasis, reduced: &FockBasis, b_cutoff: u32, out: &mut [CMatrix]) {
    let inputs: Vec<(usize, usize)> =
        reduced.states().iter().enumerate().filter_map(|(c, s)| full.index_of(&with_b(s, 0)).map(|f| (c, f))).collect();
    for (row_full, s) in full.states().iter().enumerate() {
        let b = s[B_MODE];
        if b > b_cutoff {
            continue;
        }
        let Some(r) = reduced.index_of(&[s[0], s[2]]) else { continue };
        let k = &mut out[b as usize];
        for &(c, col_full) in &inputs {
            let v = u[(row_full, col_full)];
            if v != C64::new(0.0, 0.0) {
                k[(r, c)] = v;
            }
        }
    }
}

/// `<0|_B exp(-i H dt) |0>_B` for `H` over `full` = `(A1, B, A2)`.
pub fn vacuum_projected_step(h: &CMatrix, full: &FockBasis, dt: f64) -> Result<ModeOperator> {
    let kraus = kraus_set(h, full, dt, 0)?;
    let KrausSet { basis, mut operators } = kraus;
    Ok(ModeOperator { basis, matrix: operators.swap_remove(0) })
}

/// Kraus operators of a `B` photon-number readout after one step of `H`.
///
/// The reduced basis is `full` without mode `B`. Completeness holds on any
/// excitation sector that `full` contains entirely and whose total does not
/// exceed `b_cutoff`.
pub fn kraus_set(h: &CMatrix, full: &FockBasis, dt: f64, b_cutoff: u32) -> Result<KrausSet> {
    require_chain_basis(full)?;
    if h.nrows() != full.len() {
        return Err(Error::InvalidArgument("Hamiltonian does not match basis".into()));
    }
    let u = unitary_step(h, dt)?;
    let reduced = Arc::new(full.without_mode(B_MODE)?);
    let d = reduced.len();
    let mut operators = vec![CMatrix::zeros(d, d); b_cutoff as usize + 1];
    compress(&u, full, &reduced, b_cutoff, &mut operators);
    Ok(KrausSet { basis: reduced, operators })
}

/// Kraus operators on an arbitrary `(A1, A2)` basis, assembled sector by
/// sector: `H` conserves the total excitation, so each total present in
/// `reduced` is propagated exactly in its own three-mode sector.
pub fn sector_kraus_set(params: &ChainParams, dt: f64, reduced: &Arc<FockBasis>, b_cutoff: u32) -> Result<KrausSet> {
    if reduced.mode_count() != 2 {
        return Err(Error::InvalidArgument("reduced basis must cover (A1, A2)".into()));
    }
    let d = reduced.len();
    let mut operators = vec![CMatrix::zeros(d, d); b_cutoff as usize + 1];
    for total in reduced.totals() {
        let full = FockBasis::sector(3, total)?;
        let u = unitary_step(&chain_hamiltonian(params, &full)?, dt)?;
        compress(&u, &full, reduced, b_cutoff, &mut operators);
    }
    Ok(KrausSet { basis: reduced.clone(), operators })
}

/// Bright-mode phase `exp(i phi n_a)` in a precomputed rotated frame.
#[derive(Debug, Clone)]
pub struct Dephaser {
    rotation: CMatrix,
    rotation_adj: CMatrix,
    bright_occupation: Vec<f64>,
}

impl Dephaser {
    pub fn new(theta: f64, basis: &FockBasis) -> Result<Self> {
        let rotation = mode_rotation_unitary(theta, basis)?;
        Ok(Self {
            rotation_adj: rotation.adjoint(),
            rotation,
            bright_occupation: basis.states().iter().map(|s| s[0] as f64).collect(),
        })
    }

    fn diagonal(&self, phi: f64) -> CVector {
        CVector::from_iterator(
            self.bright_occupation.len(),
            self.bright_occupation.iter().map(|&n| C64::from_polar(1.0, phi * n)),
        )
    }

    pub fn apply(&self, amplitudes: &CVector, phi: f64) -> CVector {
        if phi == 0.0 {
            return amplitudes.clone();
        }
        let rotated = (&self.rotation * amplitudes).component_mul(&self.diagonal(phi));
        &self.rotation_adj * rotated
    }

    /// Full matrix `R^dagger diag(e^{i phi n_a}) R`.
    pub fn matrix(&self, phi: f64) -> CMatrix {
        let mut scaled = self.rotation.clone();
        let diag = self.diagonal(phi);
        for (r, mut row) in scaled.row_iter_mut().enumerate() {
            row *= diag[r];
        }
        &self.rotation_adj * scaled
    }
}

/// `exp(i phi_j a^dagger a)` with `a = cos(theta) a1 + sin(theta) a2`.
pub fn apply_dephasing(state: &StateVector, phi_j: f64, theta: f64) -> Result<StateVector> {
    let dephaser = Dephaser::new(theta, state.basis())?;
    StateVector::new(state.basis().clone(), dephaser.apply(state.amplitudes(), phi_j))
}
