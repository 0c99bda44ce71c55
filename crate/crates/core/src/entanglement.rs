//! Wootters concurrence and its X-state form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron2, max_abs, pauli_y, psd_sqrt};
use crate::state::DensityMatrix4;
use crate::teleport::{fmax_general, XStateParams};

const SPECTRUM_TOL: f64 = 1e-10;
const PURE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConcurrenceBranch {
    /// Attained by the inner term δ − √(ad).
    DeltaBranch,
    /// Attained by the corner term α − √(bc).
    AlphaBranch,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceResult {
    pub value: f64,
    pub branch: ConcurrenceBranch,
}

/// Wootters concurrence. The square roots of the eigenvalues of
/// ρ (σʸ⊗σʸ) ρ* (σʸ⊗σʸ) are taken as singular values of
/// √ρ (σʸ⊗σʸ) √ρ*, which stays accurate near rank deficiency.
pub fn concurrence(rho: &DensityMatrix4) -> Result<f64> {
    let min = rho.min_eigenvalue();
    if min < -SPECTRUM_TOL {
        return Err(Error::SpectrumError(min));
    }
    // a pure state is its own square root; skipping the eigendecomposition keeps Bell states exact
    let m = &rho.matrix;
    let root = if max_abs(&(m * m - m)) <= PURE_TOL { *m } else { psd_sqrt(m) };
    let yy = kron2(&pauli_y(), &pauli_y());
    let r = root * yy * root.conjugate();
    let mut sv: Vec<f64> = r.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok((sv[0] - sv[1] - sv[2] - sv[3]).clamp(0.0, 1.0))
}

pub fn concurrence_xstate(x: &XStateParams) -> ConcurrenceResult {
    let inner = x.delta - (x.a * x.d).max(0.0).sqrt();
    let corner = x.alpha - (x.b * x.c).max(0.0).sqrt();
    let (value, branch) = if inner <= 0.0 && corner <= 0.0 {
        (0.0, ConcurrenceBranch::Zero)
    } else if inner >= corner {
        (2.0 * inner, ConcurrenceBranch::DeltaBranch)
    } else {
        (2.0 * corner, ConcurrenceBranch::AlphaBranch)
    };
    ConcurrenceResult {
        value: value.min(1.0),
        branch,
    }
}

/// (2 + C − (√b − √c)²)/3, the maximal fidelity written through the
/// concurrence. Holds when the inner coherence vanishes, the corner term sets
/// a positive concurrence, and a + d ≥ b + c.
pub fn fmax_concurrence_relation(x: &XStateParams) -> Result<f64> {
    if x.delta > 1e-12 {
        return Err(Error::DomainError(format!("inner coherence {:e} is not zero", x.delta)));
    }
    let conc = concurrence_xstate(x);
    if conc.branch != ConcurrenceBranch::AlphaBranch || conc.value <= 0.0 {
        return Err(Error::DomainError("concurrence is not set by the corner coherence".into()));
    }
    if x.a + x.d < x.b + x.c {
        return Err(Error::DomainError("outer populations a + d are below b + c".into()));
    }
    let gap = x.b.max(0.0).sqrt() - x.c.max(0.0).sqrt();
    Ok((2.0 + conc.value - gap * gap) / 3.0)
}

/// Difference between the relation and the general bound; diagnostic helper.
pub fn relation_residual(x: &XStateParams) -> Result<f64> {
    Ok(fmax_concurrence_relation(x)? - fmax_general(&x.to_state()))
}
