//! Three-level `V` atom: `|A1>`, `|A2>` coupled through `|B>`, with `|B>`
//! monitored. Independent of the Fock machinery; used to cross-check it.

use super::propagate::unitary_step;
use crate::model::{atomic_hamiltonian, ChainParams};
use crate::{CMatrix, Error, Result, C64};

/// Amplitudes on `(|A1>, |A2>)` after each of `phases.len()` steps of
/// duration `dt`, starting from `|A1>`. Each step applies `exp(-iH dt)`,
/// discards the `|B>` component and multiplies the bright state
/// `cos(theta)|A1> + sin(theta)|A2>` by `e^{i phi_j}`.
pub fn run_atomic(params: &ChainParams, dt: f64, phases: &[f64]) -> Result<Vec<[C64; 2]>> {
    if dt < 0.0 {
        return Err(Error::NegativeTimeStep(dt));
    }
    let u = unitary_step(&atomic_hamiltonian(params), dt)?;
    // rows/cols 0 and 2 are |A1>, |A2>
    let block = CMatrix::from_fn(2, 2, |r, c| u[(2 * r, 2 * c)]);
    let theta = params.derived().map_or(0.0, |d| d.theta);
    let bright = [C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0)];

    let mut psi = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let mut out = Vec::with_capacity(phases.len());
    for &phi in phases {
        psi = [block[(0, 0)] * psi[0] + block[(0, 1)] * psi[1], block[(1, 0)] * psi[0] + block[(1, 1)] * psi[1]];
        if phi != 0.0 {
            let overlap = bright[0] * psi[0] + bright[1] * psi[1];
            let kick = (C64::from_polar(1.0, phi) - 1.0) * overlap;
            psi = [psi[0] + kick * bright[0], psi[1] + kick * bright[1]];
        }
        out.push(psi);
    }
    Ok(out)
}
