//! Two coupled qubits with XY (flip-flop) coupling: Hamiltonian, analytic
//! eigensystem, coupling phase and eigenbasis transition operators.
//!
//! Local basis order is |00⟩, |01⟩, |10⟩, |11⟩ with qubit A first, and
//! σᶻ = diag(−1, +1) so that |0⟩ is the lower level of each qubit.
//! Eigenstates are labelled as
//!
//! ```text
//! |1⟩ = |00⟩                      E₁ = −ε̄
//! |2⟩ = cosθ|01⟩ − sinθ|10⟩       E₂ = −Ω
//! |3⟩ = sinθ|01⟩ + cosθ|10⟩       E₃ = +Ω
//! |4⟩ = |11⟩                      E₄ = +ε̄
//! ```
//!
//! with ε̄ = (ε_A + ε_B)/2, Ω = ½√((ε_B − ε_A)² + λ²) and tan 2θ = −λ/(ε_B − ε_A).

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, Error, Result};
use crate::linalg::{c, kron2, pauli_x, pauli_z_ground_first, sigma_minus, sigma_plus, Mat2, Mat4, ONE, ZERO};

/// Relative width of the band around Ω = ε̄ that is rejected as the phase boundary.
pub const PHASE_BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub epsilon_a: f64,
    pub epsilon_b: f64,
    pub lambda: f64,
}

impl SystemParams {
    pub fn new(epsilon_a: f64, epsilon_b: f64, lambda: f64) -> Result<Self> {
        let p = SystemParams {
            epsilon_a,
            epsilon_b,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("epsilon_a", self.epsilon_a)?;
        require_finite("epsilon_b", self.epsilon_b)?;
        require_finite("lambda", self.lambda)?;
        for (name, v) in [("epsilon_a", self.epsilon_a), ("epsilon_b", self.epsilon_b)] {
            if v <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("qubit splitting must be positive, got {v}"),
                });
            }
        }
        Ok(())
    }

    /// Mean splitting ε̄.
    pub fn ebar(&self) -> f64 {
        0.5 * (self.epsilon_a + self.epsilon_b)
    }

    /// Rabi frequency Ω = ½√((ε_B − ε_A)² + λ²).
    pub fn omega(&self) -> f64 {
        0.5 * (self.epsilon_b - self.epsilon_a).hypot(self.lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingPhase {
    /// Ω < ε̄: E₁ < E₂ < E₃ < E₄, product ground state |00⟩.
    Weak,
    /// Ω > ε̄: E₂ < E₁ < E₄ < E₃, entangled ground state |2⟩.
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub params: SystemParams,
    /// E₁..E₄ in label order (not sorted).
    pub energies: [f64; 4],
    pub ebar: f64,
    pub omega: f64,
    pub theta: f64,
    pub phase: CouplingPhase,
    /// Columns are |1⟩..|4⟩ expressed in the local basis.
    pub eigenvectors: Mat4,
}

impl EigenSystem {
    /// Local-basis operator expressed in the eigenbasis: U† A U.
    pub fn to_eigen(&self, local: &Mat4) -> Mat4 {
        self.eigenvectors.adjoint() * local * self.eigenvectors
    }

    /// Eigenbasis operator expressed in the local basis: U A U†.
    pub fn to_local(&self, eigen: &Mat4) -> Mat4 {
        self.eigenvectors * eigen * self.eigenvectors.adjoint()
    }
}

/// (ε_A/2)σᶻ_A + (ε_B/2)σᶻ_B + (λ/2)(σ⁺_Aσ⁻_B + σ⁻_Aσ⁺_B) in the local basis.
pub fn build_hamiltonian(params: &SystemParams) -> Mat4 {
    let ebar = params.ebar();
    let half_detuning = 0.5 * (params.epsilon_b - params.epsilon_a);
    let mut h = Mat4::zeros();
    h[(0, 0)] = c(-ebar);
    h[(1, 1)] = c(half_detuning);
    h[(2, 2)] = c(-half_detuning);
    h[(3, 3)] = c(ebar);
    h[(1, 2)] = c(0.5 * params.lambda);
    h[(2, 1)] = c(0.5 * params.lambda);
    h
}

/// Same Hamiltonian assembled from Pauli tensor products; kept as an
/// independent construction route for checks.
pub fn build_hamiltonian_from_paulis(params: &SystemParams) -> Mat4 {
    let id = Mat2::identity();
    let sz = pauli_z_ground_first();
    let (sp, sm) = (sigma_plus(), sigma_minus());
    kron2(&sz, &id).scale(0.5 * params.epsilon_a)
        + kron2(&id, &sz).scale(0.5 * params.epsilon_b)
        + (kron2(&sp, &sm) + kron2(&sm, &sp)).scale(0.5 * params.lambda)
}

pub fn eigensystem(params: &SystemParams) -> Result<EigenSystem> {
    params.validate()?;
    let ebar = params.ebar();
    let omega = params.omega();
    let phase = classify(ebar, omega)?;

    let detuning = params.epsilon_b - params.epsilon_a;
    // 2θ = atan2(λ, −Δ) gives sin 2θ = λ/2Ω, cos 2θ = −Δ/2Ω; the fully
    // degenerate point takes the symmetric value π/4.
    let theta = if params.lambda == 0.0 && detuning == 0.0 {
        std::f64::consts::FRAC_PI_4
    } else {
        0.5 * params.lambda.atan2(-detuning)
    };
    let (s, co) = theta.sin_cos();

    let mut u = Mat4::zeros();
    u[(0, 0)] = ONE;
    u[(1, 1)] = c(co);
    u[(2, 1)] = c(-s);
    u[(1, 2)] = c(s);
    u[(2, 2)] = c(co);
    u[(3, 3)] = ONE;

    Ok(EigenSystem {
        params: *params,
        energies: [-ebar, -omega, omega, ebar],
        ebar,
        omega,
        theta,
        phase,
        eigenvectors: u,
    })
}

fn classify(ebar: f64, omega: f64) -> Result<CouplingPhase> {
    if (omega - ebar).abs() < PHASE_BOUNDARY_TOL * ebar.abs() {
        return Err(Error::PhaseBoundary { omega, ebar });
    }
    Ok(if omega < ebar {
        CouplingPhase::Weak
    } else {
        CouplingPhase::Strong
    })
}

pub fn coupling_phase(params: &SystemParams) -> Result<CouplingPhase> {
    params.validate()?;
    classify(params.ebar(), params.omega())
}

/// The two transition operators of one qubit: `eta` carries the
/// frequency ε₋ and `xi` carries ε₊.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitTransitions {
    pub eta: Mat4,
    pub xi: Mat4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionSet {
    pub a: QubitTransitions,
    pub b: QubitTransitions,
    pub eps_minus: f64,
    pub eps_plus: f64,
    pub phase: CouplingPhase,
}

impl TransitionSet {
    pub fn qubit(&self, which: Qubit) -> &QubitTransitions {
        match which {
            Qubit::A => &self.a,
            Qubit::B => &self.b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    A,
    B,
}

/// |i⟩⟨j| in the eigenbasis, 1-based labels.
fn ketbra(i: usize, j: usize) -> Mat4 {
    let mut m = Mat4::zeros();
    m[(i - 1, j - 1)] = ONE;
    m
}

pub fn transition_operators(eig: &EigenSystem) -> Result<TransitionSet> {
    let (s, co) = eig.theta.sin_cos();
    let xi_a = (ketbra(2, 4) + ketbra(1, 3)).scale(co);
    let xi_b = (ketbra(1, 3) - ketbra(2, 4)).scale(s);
    let (eta_a, eta_b, eps_minus, eps_plus) = match eig.phase {
        CouplingPhase::Weak => (
            (ketbra(3, 4) - ketbra(1, 2)).scale(s),
            (ketbra(3, 4) + ketbra(1, 2)).scale(co),
            eig.ebar - eig.omega,
            eig.ebar + eig.omega,
        ),
        CouplingPhase::Strong => (
            (ketbra(4, 3) - ketbra(2, 1)).scale(s),
            (ketbra(4, 3) + ketbra(2, 1)).scale(co),
            eig.omega - eig.ebar,
            eig.omega + eig.ebar,
        ),
    };
    if eps_minus <= 0.0 {
        return Err(Error::NonPositiveTransitionFrequency(eps_minus));
    }
    Ok(TransitionSet {
        a: QubitTransitions { eta: eta_a, xi: xi_a },
        b: QubitTransitions { eta: eta_b, xi: xi_b },
        eps_minus,
        eps_plus,
        phase: eig.phase,
    })
}

/// Local σˣ of one qubit, in the local basis.
pub fn local_sigma_x(which: Qubit) -> Mat4 {
    let id = Mat2::identity();
    match which {
        Qubit::A => kron2(&pauli_x(), &id),
        Qubit::B => kron2(&id, &pauli_x()),
    }
}

/// Local σ⁻ of one qubit, in the local basis.
pub fn local_sigma_minus(which: Qubit) -> Mat4 {
    let id = Mat2::identity();
    match which {
        Qubit::A => kron2(&sigma_minus(), &id),
        Qubit::B => kron2(&id, &sigma_minus()),
    }
}

/// Keeps the entries ⟨m|A|n⟩ with E_n > E_m, i.e. the energy-lowering part
/// of an eigenbasis operator.
pub fn lowering_part(eig: &EigenSystem, op_eigen: &Mat4) -> Mat4 {
    Mat4::from_fn(|m, n| {
        if eig.energies[n] > eig.energies[m] {
            op_eigen[(m, n)]
        } else {
            ZERO
        }
    })
}
