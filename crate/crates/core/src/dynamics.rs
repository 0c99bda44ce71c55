//! Reservoir rates, the non-secular Redfield dissipator, the Liouvillian in
//! Liouville space and its steady state and propagator.

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, Error, Result};
use crate::linalg::{c, hermitize, kron4, max_abs, sandwich, unvectorize, vectorize, Mat4, SuperOp, C64, I};
use crate::model::{
    eigensystem, local_sigma_x, lowering_part, transition_operators, EigenSystem, Qubit, QubitTransitions,
    SystemParams, TransitionSet,
};
use crate::state::{Basis, DensityMatrix4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bosonic,
    Fermionic,
}

/// How a raw coupling constant g becomes the flat spectral rate γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GMapping {
    /// γ = g
    Identity,
    /// γ = g²
    Square,
    /// γ = π g²
    #[default]
    PiSquare,
}

impl GMapping {
    pub const ALL: [GMapping; 3] = [GMapping::Identity, GMapping::Square, GMapping::PiSquare];

    pub fn gamma(self, g: f64) -> f64 {
        match self {
            GMapping::Identity => g,
            GMapping::Square => g * g,
            GMapping::PiSquare => std::f64::consts::PI * g * g,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GMapping::Identity => "identity",
            GMapping::Square => "square",
            GMapping::PiSquare => "pi-square",
        }
    }
}

impl std::str::FromStr for GMapping {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(GMapping::Identity),
            "square" => Ok(GMapping::Square),
            "pi-square" => Ok(GMapping::PiSquare),
            other => Err(Error::InvalidParameter {
                name: "g_mapping",
                reason: format!("unknown mapping `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub statistics: Statistics,
    pub temperature: f64,
    pub mu: f64,
    pub gamma: f64,
}

impl ReservoirSpec {
    pub fn new(statistics: Statistics, temperature: f64, mu: f64, gamma: f64) -> Result<Self> {
        let r = ReservoirSpec {
            statistics,
            temperature,
            mu,
            gamma,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn bosonic(temperature: f64, gamma: f64) -> Result<Self> {
        Self::new(Statistics::Bosonic, temperature, 0.0, gamma)
    }

    pub fn fermionic(temperature: f64, mu: f64, gamma: f64) -> Result<Self> {
        Self::new(Statistics::Fermionic, temperature, mu, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("temperature", self.temperature)?;
        require_finite("mu", self.mu)?;
        require_finite("gamma", self.gamma)?;
        if self.temperature <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "temperature",
                reason: format!("must be positive, got {}", self.temperature),
            });
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must be non-negative, got {}", self.gamma),
            });
        }
        if self.statistics == Statistics::Bosonic && self.mu != 0.0 {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: format!("bosonic reservoirs need mu = 0, got {}", self.mu),
            });
        }
        Ok(())
    }
}

/// Bose-Einstein or Fermi-Dirac occupation at frequency `omega`.
pub fn occupation(omega: f64, r: &ReservoirSpec) -> Result<f64> {
    let x = (omega - r.mu) / r.temperature;
    match r.statistics {
        Statistics::Bosonic => {
            if omega <= 0.0 {
                return Err(Error::DivergentOccupation(omega));
            }
            Ok(1.0 / x.exp_m1())
        }
        Statistics::Fermionic => Ok(if x > 0.0 {
            let e = (-x).exp();
            e / (1.0 + e)
        } else {
            1.0 / (x.exp() + 1.0)
        }),
    }
}

/// Absorption and emission rates (α, β) at frequency `omega`.
pub fn rates(omega: f64, r: &ReservoirSpec) -> Result<(f64, f64)> {
    let n = occupation(omega, r)?;
    let beta = match r.statistics {
        Statistics::Bosonic => r.gamma * (1.0 + n),
        Statistics::Fermionic => r.gamma * (1.0 - n),
    };
    Ok((r.gamma * n, beta))
}

/// `ρ ↦ A ρ B + (A ρ B)†`.
fn with_conjugate(a: &Mat4, b: &Mat4) -> SuperOp {
    sandwich(a, b) + sandwich(&b.adjoint(), &a.adjoint())
}

fn qubit_dissipator(q: &QubitTransitions, eps_minus: f64, eps_plus: f64, r: &ReservoirSpec) -> Result<SuperOp> {
    let (am, bm) = rates(eps_minus, r)?;
    let (ap, bp) = rates(eps_plus, r)?;
    let eta = &q.eta;
    let xi = &q.xi;
    let (eta_d, xi_d) = (eta.adjoint(), xi.adjoint());
    let id = Mat4::identity();

    let absorb_minus = with_conjugate(&eta_d, eta) + with_conjugate(&eta_d, xi)
        - with_conjugate(&(eta * eta_d), &id)
        - with_conjugate(&(xi * eta_d), &id);
    let absorb_plus = with_conjugate(&xi_d, xi) + with_conjugate(&eta_d, xi)
        - with_conjugate(&(xi * xi_d), &id)
        - with_conjugate(&(eta * xi_d), &id);
    let emit_minus = with_conjugate(eta, &eta_d) + with_conjugate(eta, &xi_d)
        - with_conjugate(&(eta_d * eta), &id)
        - with_conjugate(&(xi_d * eta), &id);
    let emit_plus = with_conjugate(xi, &xi_d) + with_conjugate(eta, &xi_d)
        - with_conjugate(&(xi_d * xi), &id)
        - with_conjugate(&(eta_d * xi), &id);

    Ok(absorb_minus * c(am) + absorb_plus * c(ap) + emit_minus * c(bm) + emit_plus * c(bp))
}

/// Eigenbasis dissipator of both reservoirs, built from the transition-operator
/// expression term by term (each term paired with its Hermitian conjugate).
pub fn build_dissipator(ts: &TransitionSet, r_a: &ReservoirSpec, r_b: &ReservoirSpec) -> Result<SuperOp> {
    r_a.validate()?;
    r_b.validate()?;
    if ts.eps_minus <= 0.0 {
        return Err(Error::NonPositiveTransitionFrequency(ts.eps_minus));
    }
    Ok(qubit_dissipator(&ts.a, ts.eps_minus, ts.eps_plus, r_a)?
        + qubit_dissipator(&ts.b, ts.eps_minus, ts.eps_plus, r_b)?)
}

/// Independent Born-Markov construction: the coupling operator σˣ_j is split
/// into Bohr-frequency components read off the eigenbasis matrix elements,
/// without using the transition-operator lists. Diagnostic only.
pub fn redfield_reference(eig: &EigenSystem, r_a: &ReservoirSpec, r_b: &ReservoirSpec) -> Result<SuperOp> {
    let mut total = SuperOp::zeros();
    for (qubit, r) in [(Qubit::A, r_a), (Qubit::B, r_b)] {
        let a_op = lowering_part(eig, &eig.to_eigen(&local_sigma_x(qubit)));
        let a_d = a_op.adjoint();
        for m in 0..4 {
            for n in 0..4 {
                let amp = a_op[(m, n)];
                if amp.norm() < 1e-15 {
                    continue;
                }
                let omega = eig.energies[n] - eig.energies[m];
                let (alpha, beta) = rates(omega, r)?;
                let mut comp = Mat4::zeros();
                comp[(m, n)] = amp;
                let comp_d = comp.adjoint();
                let emit = with_conjugate(&comp, &a_d) - with_conjugate(&(a_d * comp), &Mat4::identity());
                let absorb = with_conjugate(&comp_d, &a_op) - with_conjugate(&(a_op * comp_d), &Mat4::identity());
                total += emit * c(beta) + absorb * c(alpha);
            }
        }
    }
    Ok(total)
}

/// Largest entrywise difference between the shipped dissipator and the
/// reference construction.
pub fn dissipator_discrepancy(params: &SystemParams, r_a: &ReservoirSpec, r_b: &ReservoirSpec) -> Result<f64> {
    let eig = eigensystem(params)?;
    let ts = transition_operators(&eig)?;
    let shipped = build_dissipator(&ts, r_a, r_b)?;
    let reference = redfield_reference(&eig, r_a, r_b)?;
    Ok(max_abs(&(shipped - reference)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Liouvillian {
    pub matrix: SuperOp,
    pub basis: Basis,
    pub eigen: EigenSystem,
}

impl Liouvillian {
    /// Superoperator mapping vec(ρ_eigen) to vec(ρ_local).
    fn eigen_to_local(&self) -> SuperOp {
        let u = self.eigen.eigenvectors;
        sandwich(&u, &u.adjoint())
    }

    pub fn to_basis(&self, target: Basis) -> Self {
        let matrix = match (self.basis, target) {
            (Basis::Eigen, Basis::Local) => {
                let s = self.eigen_to_local();
                s * self.matrix * s.adjoint()
            }
            (Basis::Local, Basis::Eigen) => {
                let s = self.eigen_to_local();
                s.adjoint() * self.matrix * s
            }
            _ => self.matrix,
        };
        Liouvillian {
            matrix,
            basis: target,
            eigen: self.eigen,
        }
    }

    pub fn apply(&self, rho: &Mat4) -> Mat4 {
        unvectorize(&(self.matrix * vectorize(rho)))
    }
}

/// Coherent part −i[H, ·] for an eigenbasis (diagonal) Hamiltonian.
fn coherent_part(h: &Mat4) -> SuperOp {
    let id = Mat4::identity();
    (kron4(&id, h) - kron4(&h.transpose(), &id)) * (-I)
}

pub fn build_liouvillian(params: &SystemParams, r_a: &ReservoirSpec, r_b: &ReservoirSpec) -> Result<Liouvillian> {
    let eig = eigensystem(params)?;
    let ts = transition_operators(&eig)?;
    let h = Mat4::from_diagonal(&nalgebra::Vector4::from_iterator(eig.energies.iter().map(|&e| c(e))));
    let matrix = coherent_part(&h) + build_dissipator(&ts, r_a, r_b)?;
    Ok(Liouvillian {
        matrix,
        basis: Basis::Eigen,
        eigen: eig,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Written in the basis of the Liouvillian it was solved from.
    pub rho: DensityMatrix4,
    /// ‖L vec(ρ)‖₂ after Hermitization and normalization.
    pub residual: f64,
    pub min_eigenvalue: f64,
    /// Singular values of L, ascending.
    pub singular_values: [f64; 16],
}

impl SteadyState {
    pub fn null_space_gap(&self) -> f64 {
        self.singular_values[1] / self.singular_values[0].max(f64::MIN_POSITIVE)
    }
}

pub fn steady_state(l: &Liouvillian, positivity_tol: f64) -> Result<SteadyState> {
    let svd = l.matrix.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..16).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let mut singular_values = [0.0; 16];
    for (slot, &k) in singular_values.iter_mut().zip(&order) {
        *slot = svd.singular_values[k];
    }
    let (smallest, second, largest) = (singular_values[0], singular_values[1], singular_values[15]);
    if second < (1e3 * smallest).max(1e-12 * largest) {
        return Err(Error::DegenerateSteadyState { smallest, second });
    }

    let null = v_t.row(order[0]).adjoint();
    let raw = hermitize(&unvectorize(&null.into_owned()));
    let tr = raw.trace();
    if tr.norm() < 1e-300 {
        return Err(Error::InvalidState("steady-state null vector has zero trace".into()));
    }
    let matrix = raw.unscale(tr.re);
    let residual = (l.matrix * vectorize(&matrix)).norm();
    let rho = DensityMatrix4::from_raw(matrix, l.basis);
    let min_eigenvalue = rho.min_eigenvalue();
    if min_eigenvalue < -positivity_tol {
        return Err(Error::PositivityViolation {
            min_eigenvalue,
            time: None,
        });
    }
    Ok(SteadyState {
        rho,
        residual,
        min_eigenvalue,
        singular_values,
    })
}

/// exp(L t) as a superoperator.
pub fn propagator(l: &Liouvillian, t: f64) -> SuperOp {
    (l.matrix * c(t)).exp()
}

/// ρ(t) = exp(L t) ρ₀, returned in the basis of `rho0`.
pub fn propagate(l: &Liouvillian, rho0: &DensityMatrix4, t: f64, positivity_tol: f64) -> Result<DensityMatrix4> {
    require_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("time must be non-negative, got {t}"),
        });
    }
    if t == 0.0 {
        return Ok(*rho0);
    }
    let start = rho0.to_basis(l.basis, &l.eigen);
    let evolved = unvectorize(&(propagator(l, t) * vectorize(&start.matrix)));
    let out = DensityMatrix4::from_raw(hermitize(&evolved), l.basis).to_basis(rho0.basis, &l.eigen);
    let (min_eigenvalue, ok) = positivity_check(&out, positivity_tol);
    if !ok {
        return Err(Error::PositivityViolation {
            min_eigenvalue,
            time: Some(t),
        });
    }
    Ok(out)
}

pub fn positivity_check(rho: &DensityMatrix4, tol: f64) -> (f64, bool) {
    let min = rho.min_eigenvalue();
    (min, min >= -tol)
}

/// Eigenvalues of a general complex superoperator, from its Schur form.
pub fn superop_eigenvalues(m: &SuperOp) -> Vec<C64> {
    let (_, t) = nalgebra::Schur::new(*m).unpack();
    (0..16).map(|k| t[(k, k)]).collect()
}
