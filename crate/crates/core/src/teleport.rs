//! Standard one-qubit teleportation through a two-qubit resource: a
//! brute-force circuit oracle plus the closed forms valid for X-shaped resources.

use std::fmt;

use nalgebra::{Matrix3, SMatrix, Vector2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, gauss_legendre, kron2, pauli_x, pauli_y, pauli_z, singular_values3, Ket4, Mat2, Mat4, C64, ZERO,
};
use crate::state::DensityMatrix4;

pub const DEFAULT_QUADRATURE_ORDER: usize = 64;
pub const DEFAULT_X_TOL: f64 = 1e-10;
/// Magnitude below which a coherence phase is reported as 0.
const PHASE_FLOOR: f64 = 1e-14;

type Mat8 = SMatrix<C64, 8, 8>;

/// Pure input qubit cos(θ/2)|0⟩ + e^{−iφ} sin(θ/2)|1⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputState {
    pub theta: f64,
    pub phi: f64,
}

impl InputState {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("must lie in [0, pi], got {theta}"),
            });
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi",
                reason: format!("must be finite, got {phi}"),
            });
        }
        Ok(InputState {
            theta,
            phi: phi.rem_euclid(std::f64::consts::TAU),
        })
    }

    /// Uniform on the Bloch sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let cos_theta: f64 = rng.random_range(-1.0..=1.0);
        InputState {
            theta: cos_theta.clamp(-1.0, 1.0).acos(),
            phi: rng.random_range(0.0..std::f64::consts::TAU),
        }
    }

    pub fn ket(&self) -> Vector2<C64> {
        let (s, co) = (0.5 * self.theta).sin_cos();
        Vector2::new(c(co), C64::from_polar(s, -self.phi))
    }
}

/// Bell-state label (m, n) naming both the declared resource and the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Protocol {
    pub m: u8,
    pub n: u8,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [
        Protocol { m: 0, n: 0 },
        Protocol { m: 0, n: 1 },
        Protocol { m: 1, n: 0 },
        Protocol { m: 1, n: 1 },
    ];

    pub fn new(m: u8, n: u8) -> Result<Self> {
        if m > 1 || n > 1 {
            return Err(Error::InvalidParameter {
                name: "protocol",
                reason: format!("bits must be 0 or 1, got ({m}, {n})"),
            });
        }
        Ok(Protocol { m, n })
    }

    pub fn index(self) -> usize {
        (2 * self.m + self.n) as usize
    }

    /// Protocols 00 and 10 use the 1–4 coherence; 01 and 11 the 2–3 coherence.
    pub fn uses_corner_coherence(self) -> bool {
        self.n == 0
    }

    /// +1 for 00 and 01, −1 for 10 and 11.
    fn sign(self) -> f64 {
        if self.m == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.m, self.n)
    }
}

impl std::str::FromStr for Protocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .filter(|ch| !matches!(ch, '(' | ')' | ',' | ' '))
            .map(|ch| ch.to_digit(2).map(|d| d as u8))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvalidParameter {
                name: "protocol",
                reason: format!("cannot parse `{s}`"),
            })?;
        match bits[..] {
            [m, n] => Protocol::new(m, n),
            _ => Err(Error::InvalidParameter {
                name: "protocol",
                reason: format!("cannot parse `{s}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    I,
    X,
    Z,
    /// X·Z, i.e. Z applied first.
    XZ,
}

impl Gate {
    pub fn matrix(self) -> Mat2 {
        match self {
            Gate::I => Mat2::identity(),
            Gate::X => pauli_x(),
            Gate::Z => pauli_z(),
            Gate::XZ => pauli_x() * pauli_z(),
        }
    }
}

pub fn bell_state(m: u8, n: u8) -> Ket4 {
    let r = c(std::f64::consts::FRAC_1_SQRT_2);
    let sign = if m & 1 == 0 { r } else { -r };
    if n & 1 == 0 {
        Ket4::new(r, ZERO, ZERO, sign)
    } else {
        Ket4::new(ZERO, r, sign, ZERO)
    }
}

/// Bob's correction for declared resource `resource` after outcome `outcome`.
pub fn recovery_gate(resource: Protocol, outcome: Protocol) -> Gate {
    // XOR of the labels picks the gate, which reproduces the recovery table.
    let flip = outcome.n ^ resource.n;
    let phase = outcome.m ^ resource.m;
    match (flip, phase) {
        (0, 0) => Gate::I,
        (1, 0) => Gate::X,
        (0, 1) => Gate::Z,
        _ => Gate::XZ,
    }
}

/// The eight real parameters of an X-shaped resource: populations a..d,
/// corner coherence α e^{iβ} at (1,4) and inner coherence δ e^{iε} at (2,3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl XStateParams {
    pub fn validate(&self) -> Result<()> {
        let p = [self.a, self.b, self.c, self.d, self.alpha, self.beta, self.delta, self.epsilon];
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite X-state parameter".into()));
        }
        let sum = self.a + self.b + self.c + self.d;
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("populations sum to {sum}")));
        }
        if [self.a, self.b, self.c, self.d].iter().any(|&v| v < -1e-10) || self.alpha < 0.0 || self.delta < 0.0 {
            return Err(Error::InvalidState("negative population or coherence magnitude".into()));
        }
        if self.alpha > (self.a * self.d).max(0.0).sqrt() + 1e-10 || self.delta > (self.b * self.c).max(0.0).sqrt() + 1e-10 {
            return Err(Error::InvalidState("coherence exceeds positivity bound".into()));
        }
        Ok(())
    }

    pub fn to_state(&self) -> DensityMatrix4 {
        let mut m = Mat4::from_diagonal(&Ket4::new(c(self.a), c(self.b), c(self.c), c(self.d)));
        m[(0, 3)] = C64::from_polar(self.alpha, self.beta);
        m[(3, 0)] = m[(0, 3)].conj();
        m[(1, 2)] = C64::from_polar(self.delta, self.epsilon);
        m[(2, 1)] = m[(1, 2)].conj();
        DensityMatrix4::from_raw(m, crate::state::Basis::Local)
    }

    /// Random valid X-state: Dirichlet(1,1,1,1) populations, coherences
    /// uniform below their positivity bounds, uniform phases.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let w: Vec<f64> = (0..4).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let s: f64 = w.iter().sum();
        let (a, b, cc, d) = (w[0] / s, w[1] / s, w[2] / s, w[3] / s);
        XStateParams {
            a,
            b,
            c: cc,
            d,
            alpha: (a * d).sqrt() * rng.random::<f64>(),
            beta: rng.random_range(0.0..std::f64::consts::TAU),
            delta: (b * cc).sqrt() * rng.random::<f64>(),
            epsilon: rng.random_range(0.0..std::f64::consts::TAU),
        }
    }

    /// Effective corner coherence α cosβ.
    pub fn corner(&self) -> f64 {
        self.alpha * self.beta.cos()
    }

    /// Effective inner coherence δ cosε.
    pub fn inner(&self) -> f64 {
        self.delta * self.epsilon.cos()
    }
}

fn kron_2_4(a: &Mat2, b: &Mat4) -> Mat8 {
    a.kronecker(b)
}

/// Fidelity of the full protocol simulated on the three-qubit state |ψ⟩⟨ψ| ⊗ ρ:
/// Bell projection of the input and Alice's qubit, Bob's correction from the
/// recovery table of `protocol`, and the overlap with |ψ⟩ summed over outcomes.
pub fn teleport_oracle(rho: &DensityMatrix4, input: &InputState, protocol: Protocol) -> Result<f64> {
    DensityMatrix4::local(rho.matrix)?;
    let psi = input.ket();
    let total = kron_2_4(&(psi * psi.adjoint()), &rho.matrix);
    let mut fidelity = 0.0;
    for outcome in Protocol::ALL {
        let bell = bell_state(outcome.m, outcome.n);
        let projector: Mat8 = (bell * bell.adjoint()).kronecker(&Mat2::identity());
        let projected = projector * total * projector;
        let mut bob = Mat2::zeros();
        for k in 0..4 {
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                bob[(i, j)] += projected[(2 * k + i, 2 * k + j)];
            }
        }
        let u = recovery_gate(protocol, outcome).matrix();
        let corrected = u * bob * u.adjoint();
        fidelity += (psi.adjoint() * corrected * psi)[(0, 0)].re;
    }
    Ok(fidelity)
}

/// f_mn, the coefficient of cos 2θ in F_mn; zero means the fidelity does not depend on θ.
pub fn f_coefficient(x: &XStateParams, phi: f64, protocol: Protocol) -> f64 {
    let s = protocol.sign();
    let c2 = (2.0 * phi).cos();
    if protocol.uses_corner_coherence() {
        x.a - x.b - x.c + x.d - s * 2.0 * x.corner() - s * 2.0 * x.inner() * c2
    } else {
        -x.a + x.b + x.c - x.d - s * 2.0 * x.inner() - s * 2.0 * x.corner() * c2
    }
}

pub fn fidelity_xstate(x: &XStateParams, input: &InputState, protocol: Protocol) -> f64 {
    let s = protocol.sign();
    let c2 = (2.0 * input.phi).cos();
    let f = f_coefficient(x, input.phi, protocol);
    let ct = (2.0 * input.theta).cos();
    let base = if protocol.uses_corner_coherence() {
        x.b + x.c + 3.0 * (x.a + x.d) + s * 2.0 * x.corner() + s * 2.0 * x.inner() * c2
    } else {
        x.a + x.d + 3.0 * (x.b + x.c) + s * 2.0 * x.inner() + s * 2.0 * x.corner() * c2
    };
    0.25 * (base + ct * f)
}

pub fn average_fidelity_closed(x: &XStateParams, protocol: Protocol) -> f64 {
    let s = protocol.sign();
    if protocol.uses_corner_coherence() {
        (1.0 + x.a + x.d + s * 2.0 * x.corner()) / 3.0
    } else {
        (1.0 + x.b + x.c + s * 2.0 * x.inner()) / 3.0
    }
}

/// Bloch-sphere average of the oracle fidelity: Gauss-Legendre in cosθ and
/// `order` equispaced points in φ.
pub fn average_fidelity_quadrature(rho: &DensityMatrix4, protocol: Protocol, order: usize) -> Result<f64> {
    if order == 0 {
        return Err(Error::InvalidParameter {
            name: "quadrature_order",
            reason: "must be positive".into(),
        });
    }
    let (nodes, weights) = gauss_legendre(order);
    let dphi = std::f64::consts::TAU / order as f64;
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        let theta = x.clamp(-1.0, 1.0).acos();
        let mut ring = 0.0;
        for k in 0..order {
            let input = InputState {
                theta,
                phi: k as f64 * dphi,
            };
            ring += teleport_oracle(rho, &input, protocol)?;
        }
        sum += w * ring / order as f64;
    }
    Ok(0.5 * sum)
}

/// Correlation matrix T_mn = Tr(ρ σ_n ⊗ σ_m).
pub fn correlation_matrix(rho: &DensityMatrix4) -> Matrix3<f64> {
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    Matrix3::from_fn(|m, n| (rho.matrix * kron2(&paulis[n], &paulis[m])).trace().re)
}

/// Maximal average fidelity over local unitary corrections, from the
/// singular values of the correlation matrix.
pub fn fmax_general(rho: &DensityMatrix4) -> f64 {
    let sv = singular_values3(&correlation_matrix(rho));
    0.5 * (1.0 + (sv[0] + sv[1] + sv[2]) / 3.0)
}

/// Closed form of the maximal fidelity; valid only for real coherences.
pub fn fmax_xstate(x: &XStateParams) -> Result<f64> {
    let (sin_beta, sin_epsilon) = (x.beta.sin(), x.epsilon.sin());
    if (x.alpha > PHASE_FLOOR && sin_beta.abs() > 1e-10) || (x.delta > PHASE_FLOOR && sin_epsilon.abs() > 1e-10) {
        return Err(Error::PhaseDomain { sin_beta, sin_epsilon });
    }
    let (al, de) = (x.corner(), x.inner());
    let sum = (x.a - x.b - x.c + x.d).abs() + 2.0 * (al - de).abs() + 2.0 * (al + de).abs();
    Ok(0.5 * (1.0 + sum / 3.0))
}

/// Reads the X parameters off a state whose off-X entries are below `tol`.
pub fn extract_xstate(rho: &DensityMatrix4, tol: f64) -> Result<XStateParams> {
    let max_off = rho.off_x_magnitude();
    if max_off > tol {
        return Err(Error::NotXForm { max_off });
    }
    let m = &rho.matrix;
    let polar = |z: C64| {
        let r = z.norm();
        if r < PHASE_FLOOR {
            (r, 0.0)
        } else {
            (r, z.arg().rem_euclid(std::f64::consts::TAU))
        }
    };
    let (alpha, beta) = polar(m[(0, 3)]);
    let (delta, epsilon) = polar(m[(1, 2)]);
    Ok(XStateParams {
        a: m[(0, 0)].re,
        b: m[(1, 1)].re,
        c: m[(2, 2)].re,
        d: m[(3, 3)].re,
        alpha,
        beta,
        delta,
        epsilon,
    })
}

fn argmax_lexicographic(values: &[f64; 4]) -> Protocol {
    let mut best = 0;
    for k in 1..4 {
        if values[k] > values[best] {
            best = k;
        }
    }
    Protocol::ALL[best]
}

/// Protocol with the highest average fidelity; closed forms on X-states,
/// quadrature otherwise. Exact ties go to the lexicographically first label.
pub fn select_protocol(rho: &DensityMatrix4, quadrature_order: usize) -> Result<Protocol> {
    Ok(argmax_lexicographic(&average_fidelities(rho, quadrature_order)?))
}

pub fn average_fidelities(rho: &DensityMatrix4, quadrature_order: usize) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    match extract_xstate(rho, DEFAULT_X_TOL) {
        Ok(x) => {
            for p in Protocol::ALL {
                out[p.index()] = average_fidelity_closed(&x, p);
            }
        }
        Err(_) => {
            for p in Protocol::ALL {
                out[p.index()] = average_fidelity_quadrature(rho, p, quadrature_order)?;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolFidelity {
    pub protocol: Protocol,
    pub fidelity: f64,
    /// Absent when the resource is not of X form.
    pub f_coefficient: Option<f64>,
    pub average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub input: InputState,
    pub protocols: Vec<ProtocolFidelity>,
    pub fmax_general: f64,
    pub fmax_xstate: Option<f64>,
    pub concurrence: f64,
    pub selected: Protocol,
    pub xstate: Option<XStateParams>,
}

pub fn fidelity_report(rho: &DensityMatrix4, input: &InputState, quadrature_order: usize) -> Result<FidelityReport> {
    let xstate = extract_xstate(rho, DEFAULT_X_TOL).ok();
    let averages = average_fidelities(rho, quadrature_order)?;
    let mut protocols = Vec::with_capacity(4);
    for p in Protocol::ALL {
        protocols.push(ProtocolFidelity {
            protocol: p,
            fidelity: teleport_oracle(rho, input, p)?,
            f_coefficient: xstate.map(|x| f_coefficient(&x, input.phi, p)),
            average: averages[p.index()],
        });
    }
    Ok(FidelityReport {
        input: *input,
        protocols,
        fmax_general: fmax_general(rho),
        fmax_xstate: xstate.and_then(|x| fmax_xstate(&x).ok()),
        concurrence: crate::entanglement::concurrence(rho)?,
        selected: argmax_lexicographic(&averages),
        xstate,
    })
}

/// Bell state as X parameters.
pub fn bell_xstate(m: u8, n: u8) -> XStateParams {
    let phase = if m & 1 == 0 { 0.0 } else { std::f64::consts::PI };
    let (pop_outer, pop_inner, alpha, delta) = if n & 1 == 0 { (0.5, 0.0, 0.5, 0.0) } else { (0.0, 0.5, 0.0, 0.5) };
    XStateParams {
        a: pop_outer,
        b: pop_inner,
        c: pop_inner,
        d: pop_outer,
        alpha,
        beta: if n & 1 == 0 { phase } else { 0.0 },
        delta,
        epsilon: if n & 1 == 1 { phase } else { 0.0 },
    }
}

/// Werner state p|β00⟩⟨β00| + (1−p)I/4.
pub fn werner_xstate(p: f64) -> XStateParams {
    let outer = 0.25 * (1.0 + p);
    let inner = 0.25 * (1.0 - p);
    XStateParams {
        a: outer,
        b: inner,
        c: inner,
        d: outer,
        alpha: 0.5 * p,
        beta: 0.0,
        delta: 0.0,
        epsilon: 0.0,
    }
}
