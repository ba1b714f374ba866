//! Occupation-number bases, pure and mixed states, and bipartite measures.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::SymmetricEigen;

use crate::{CMatrix, CVector, Error, Result, C64};

/// Occupation tuple, one entry per mode.
pub type Occupation = Vec<u32>;

/// Which occupation tuples a basis contains.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// All tuples whose entries sum to `total`.
    Sector { total: u32 },
    /// All tuples with `n_k <= cutoffs[k]`.
    Truncated { cutoffs: Vec<u32> },
    /// All tuples whose entries sum to at most `max_total`: the direct sum of
    /// sectors `0..=max_total`.
    Bounded { max_total: u32 },
}

/// Enumerated multimode occupation-number basis.
///
/// Ordering:
/// * `Sector`: descending lexicographic, so `(1,0,0), (0,1,0), (0,0,1)`.
/// * `Truncated`: ascending lexicographic (mixed radix, last mode fastest);
///   a single-mode basis is indexed by its occupation.
/// * `Bounded`: by total excitation ascending, each sector in its own order.
#[derive(Clone)]
pub struct FockBasis {
    mode_count: usize,
    kind: BasisKind,
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl fmt::Debug for FockBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockBasis")
            .field("mode_count", &self.mode_count)
            .field("kind", &self.kind)
            .field("len", &self.states.len())
            .finish()
    }
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.mode_count == other.mode_count && self.kind == other.kind
    }
}

fn push_sector(prefix: &mut Vec<u32>, modes_left: usize, remaining: u32, out: &mut Vec<Occupation>) {
    if modes_left == 1 {
        prefix.push(remaining);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in (0..=remaining).rev() {
        prefix.push(k);
        push_sector(prefix, modes_left - 1, remaining - k, out);
        prefix.pop();
    }
}

fn sector_states(mode_count: usize, total: u32) -> Vec<Occupation> {
    let mut out = Vec::new();
    push_sector(&mut Vec::with_capacity(mode_count), mode_count, total, &mut out);
    out
}

impl FockBasis {
    fn from_states(mode_count: usize, kind: BasisKind, states: Vec<Occupation>) -> Self {
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Self { mode_count, kind, states, index }
    }

    /// Fixed-total sector. Has `C(total + m - 1, m - 1)` elements.
    pub fn sector(mode_count: usize, total: u32) -> Result<Self> {
        if mode_count == 0 {
            return Err(Error::InvalidArgument("mode_count must be at least 1".into()));
        }
        let states = sector_states(mode_count, total);
        Ok(Self::from_states(mode_count, BasisKind::Sector { total }, states))
    }

    /// Per-mode truncated product basis.
    pub fn truncated(cutoffs: &[u32]) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(Error::InvalidArgument("at least one mode cutoff is required".into()));
        }
        let mut states = Vec::new();
        let mut current = vec![0u32; cutoffs.len()];
        loop {
            states.push(current.clone());
            // mixed-radix increment, last mode fastest
            let mut k = cutoffs.len();
            loop {
                if k == 0 {
                    return Ok(Self::from_states(
                        cutoffs.len(),
                        BasisKind::Truncated { cutoffs: cutoffs.to_vec() },
                        states,
                    ));
                }
                k -= 1;
                if current[k] < cutoffs[k] {
                    current[k] += 1;
                    break;
                }
                current[k] = 0;
            }
        }
    }

    /// All tuples with total excitation at most `max_total`.
    pub fn bounded(mode_count: usize, max_total: u32) -> Result<Self> {
        if mode_count == 0 {
            return Err(Error::InvalidArgument("mode_count must be at least 1".into()));
        }
        let states = (0..=max_total).flat_map(|n| sector_states(mode_count, n)).collect();
        Ok(Self::from_states(mode_count, BasisKind::Bounded { max_total }, states))
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, index: usize) -> &[u32] {
        &self.states[index]
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn contains(&self, occupation: &[u32]) -> bool {
        self.index.contains_key(occupation)
    }

    /// Basis of the remaining modes after dropping `mode`, of the same kind.
    /// For a sector this keeps the total; it is the set of tuples that had
    /// vacuum in the dropped mode.
    pub fn without_mode(&self, mode: usize) -> Result<Self> {
        if mode >= self.mode_count || self.mode_count < 2 {
            return Err(Error::InvalidArgument(format!(
                "cannot drop mode {mode} from a {}-mode basis",
                self.mode_count
            )));
        }
        match &self.kind {
            BasisKind::Sector { total } => Self::sector(self.mode_count - 1, *total),
            BasisKind::Bounded { max_total } => Self::bounded(self.mode_count - 1, *max_total),
            BasisKind::Truncated { cutoffs } => {
                let mut c = cutoffs.clone();
                c.remove(mode);
                Self::truncated(&c)
            }
        }
    }

    /// Distinct total excitation numbers present, ascending.
    pub fn totals(&self) -> Vec<u32> {
        let mut t: Vec<u32> = self.states.iter().map(|s| s.iter().sum()).collect();
        t.sort_unstable();
        t.dedup();
        t
    }
}

/// Complex amplitudes over a basis. Not necessarily normalized: for
/// post-selected evolution the squared norm is the success probability.
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(basis: Arc<FockBasis>, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for a basis of {} states",
                amplitudes.len(),
                basis.len()
            )));
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn from_fn(basis: Arc<FockBasis>, f: impl Fn(&[u32]) -> C64) -> Self {
        let amplitudes = CVector::from_iterator(basis.len(), basis.states().iter().map(|s| f(s)));
        Self { basis, amplitudes }
    }

    /// Unit vector at `occupation`.
    pub fn fock(basis: Arc<FockBasis>, occupation: &[u32]) -> Result<Self> {
        let i = basis.index_of(occupation).ok_or_else(|| Error::NotInBasis(occupation.to_vec()))?;
        let mut amplitudes = CVector::zeros(basis.len());
        amplitudes[i] = C64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes })
    }

    /// Single-mode Glauber coherent state truncated to `n <= cutoff`.
    pub fn coherent(alpha: C64, cutoff: u32) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidArgument("cutoff must be at least 1".into()));
        }
        let basis = Arc::new(FockBasis::truncated(&[cutoff])?);
        let amplitudes = coherent_amplitudes(alpha, cutoff);
        Ok(Self { basis, amplitudes: CVector::from_vec(amplitudes) })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    /// Amplitude at `occupation`, zero when it is not in the basis.
    pub fn amplitude(&self, occupation: &[u32]) -> C64 {
        self.basis.index_of(occupation).map_or(C64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { basis: self.basis.clone(), amplitudes: &self.amplitudes * factor }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(C64::new(1.0 / n.sqrt(), 0.0)))
    }

    /// Apply a matrix over the same basis.
    pub fn apply(&self, op: &CMatrix) -> Self {
        Self { basis: self.basis.clone(), amplitudes: op * &self.amplitudes }
    }

    /// Normalized mean and variance of the occupation of `mode`.
    pub fn mode_moments(&self, mode: usize) -> Result<(f64, f64)> {
        let norm = self.norm_sqr();
        if norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let (mut m1, mut m2) = (0.0, 0.0);
        for (s, a) in self.basis.states().iter().zip(self.amplitudes.iter()) {
            let n = s[mode] as f64;
            let w = a.norm_sqr();
            m1 += w * n;
            m2 += w * n * n;
        }
        let mean = m1 / norm;
        Ok((mean, m2 / norm - mean * mean))
    }

    /// Reduced density matrix of the modes in `group` (after normalizing),
    /// together with the sub-occupations labelling its rows.
    pub fn reduced_density(&self, group: &[usize]) -> Result<(Vec<Occupation>, CMatrix)> {
        let norm = self.norm_sqr();
        if norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let m = self.basis.mode_count();
        if group.iter().any(|&g| g >= m) {
            return Err(Error::InvalidArgument(format!("mode group {group:?} out of range")));
        }
        let rest: Vec<usize> = (0..m).filter(|k| !group.contains(k)).collect();

        let mut left: Vec<Occupation> = Vec::new();
        let mut left_ix: HashMap<Occupation, usize> = HashMap::new();
        let mut right_ix: HashMap<Occupation, usize> = HashMap::new();
        let mut entries = Vec::with_capacity(self.basis.len());
        for (s, a) in self.basis.states().iter().zip(self.amplitudes.iter()) {
            let l: Occupation = group.iter().map(|&g| s[g]).collect();
            let r: Occupation = rest.iter().map(|&g| s[g]).collect();
            let li = *left_ix.entry(l.clone()).or_insert_with(|| {
                left.push(l);
                left.len() - 1
            });
            let n_right = right_ix.len();
            let ri = *right_ix.entry(r).or_insert(n_right);
            entries.push((li, ri, *a));
        }
        let mut psi = CMatrix::zeros(left.len(), right_ix.len());
        for (li, ri, a) in entries {
            psi[(li, ri)] += a;
        }
        let rho = &psi * psi.adjoint() / C64::new(norm, 0.0);
        Ok((left, rho))
    }

    /// Von Neumann entropy (nats) of the reduced state of `group`.
    pub fn entanglement_entropy(&self, group: &[usize]) -> Result<f64> {
        let (_, rho) = self.reduced_density(group)?;
        Ok(von_neumann_entropy(&rho))
    }

    /// `Tr(rho^2)` of the reduced state of `group`.
    pub fn reduced_purity(&self, group: &[usize]) -> Result<f64> {
        let (_, rho) = self.reduced_density(group)?;
        Ok(purity(&rho))
    }
}

/// `e^{-|alpha|^2/2} alpha^n / sqrt(n!)` for `n = 0..=cutoff`.
pub fn coherent_amplitudes(alpha: C64, cutoff: u32) -> Vec<C64> {
    let mut out = Vec::with_capacity(cutoff as usize + 1);
    let mut term = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    out.push(term);
    for n in 1..=cutoff {
        term = term * alpha / (n as f64).sqrt();
        out.push(term);
    }
    out
}

/// Eigenvalues below this are dropped from `p ln p`.
pub const ENTROPY_EIGEN_FLOOR: f64 = 1e-12;

/// Von Neumann entropy in nats of a Hermitian matrix with unit trace.
pub fn von_neumann_entropy(rho: &CMatrix) -> f64 {
    let eig = SymmetricEigen::new(rho.clone());
    let s: f64 = eig.eigenvalues.iter().filter(|&&p| p > ENTROPY_EIGEN_FLOOR).map(|&p| -p * p.ln()).sum();
    s.max(0.0)
}

pub fn purity(rho: &CMatrix) -> f64 {
    (rho * rho).trace().re
}

/// Mixed state over a basis.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    basis: Arc<FockBasis>,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(basis: Arc<FockBasis>, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != basis.len() || matrix.ncols() != basis.len() {
            return Err(Error::InvalidArgument(format!(
                "{}x{} matrix for a basis of {} states",
                matrix.nrows(),
                matrix.ncols(),
                basis.len()
            )));
        }
        Ok(Self { basis, matrix })
    }

    /// `|psi><psi|`, keeping the state's norm as the trace.
    pub fn from_pure(state: &StateVector) -> Self {
        let a = state.amplitudes();
        Self { basis: state.basis().clone(), matrix: a * a.adjoint() }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Largest entry of `|rho - rho^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Sub-block on the basis states whose total excitation is `total`.
    pub fn sector_block(&self, total: u32) -> (Vec<usize>, CMatrix) {
        let idx: Vec<usize> =
            (0..self.basis.len()).filter(|&i| self.basis.state(i).iter().sum::<u32>() == total).collect();
        let block = CMatrix::from_fn(idx.len(), idx.len(), |r, c| self.matrix[(idx[r], idx[c])]);
        (idx, block)
    }
}

/// Largest modulus among the entries of `m`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
