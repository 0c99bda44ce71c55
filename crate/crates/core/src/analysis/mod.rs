//! Parameter and time sweeps, fixed-point search along an axis, input-spread
//! certification and the figure presets.

pub mod figures;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{build_liouvillian, propagate, steady_state, Liouvillian, ReservoirSpec, Statistics};
use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::linalg::vectorize;
use crate::model::SystemParams;
use crate::state::{Basis, DensityMatrix4, DEFAULT_POSITIVITY_TOL};
use crate::teleport::{
    average_fidelities, extract_xstate, f_coefficient, fmax_general, teleport_oracle, InputState, Protocol,
    XStateParams, DEFAULT_QUADRATURE_ORDER, DEFAULT_X_TOL,
};

pub use figures::{reproduce_figure, FigureId, FigureOptions, FigureOutput, Headline};

pub const DEFAULT_ROOT_TOL: f64 = 1e-9;
pub const DEFAULT_AXIS_TOL: f64 = 1e-10;
pub const DEFAULT_COHERENCE_TOL: f64 = 1e-8;
pub const DEFAULT_SPREAD_SAMPLES: usize = 1000;

/// Sweepable knobs. Differences are ratios to the fixed mean and are split
/// symmetrically: T_A = T̄(1 + r/2), T_B = T̄(1 − r/2), likewise for μ and ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parameter {
    #[serde(rename = "delta_T")]
    DeltaT,
    #[serde(rename = "delta_mu")]
    DeltaMu,
    #[serde(rename = "delta_eps")]
    DeltaEps,
    #[serde(rename = "T_bar")]
    TBar,
    #[serde(rename = "mu_bar")]
    MuBar,
    #[serde(rename = "eps_bar")]
    EpsBar,
    #[serde(rename = "lambda")]
    Lambda,
    #[serde(rename = "time")]
    Time,
}

impl Parameter {
    pub fn id(self) -> &'static str {
        match self {
            Parameter::DeltaT => "delta_T",
            Parameter::DeltaMu => "delta_mu",
            Parameter::DeltaEps => "delta_eps",
            Parameter::TBar => "T_bar",
            Parameter::MuBar => "mu_bar",
            Parameter::EpsBar => "eps_bar",
            Parameter::Lambda => "lambda",
            Parameter::Time => "time",
        }
    }

    /// CSV column name; ratio knobs say so.
    pub fn column(self) -> &'static str {
        match self {
            Parameter::DeltaT => "delta_T_ratio",
            Parameter::DeltaMu => "delta_mu_ratio",
            Parameter::DeltaEps => "delta_eps_ratio",
            other => other.id(),
        }
    }
}

impl std::str::FromStr for Parameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| Error::InvalidParameter {
            name: "parameter",
            reason: format!("unknown sweep parameter `{s}`"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Resource {
    Steady,
    /// Evolved for `time` from the Bell state labelled `initial`.
    Transient { time: f64, initial: Protocol },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub statistics: Statistics,
    pub eps_bar: f64,
    pub delta_eps: f64,
    pub t_bar: f64,
    pub delta_t: f64,
    pub mu_bar: f64,
    pub delta_mu: f64,
    pub lambda: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub resource: Resource,
    /// Azimuth at which the f coefficients are reported.
    pub phi: f64,
    pub positivity_tol: f64,
    pub quadrature_order: usize,
}

impl Scenario {
    /// Symmetric pair with equal reservoirs and rate `gamma` on both sides.
    pub fn symmetric(statistics: Statistics, eps: f64, lambda: f64, temperature: f64, mu: f64, gamma: f64) -> Self {
        Scenario {
            statistics,
            eps_bar: eps,
            delta_eps: 0.0,
            t_bar: temperature,
            delta_t: 0.0,
            mu_bar: mu,
            delta_mu: 0.0,
            lambda,
            gamma_a: gamma,
            gamma_b: gamma,
            resource: Resource::Steady,
            phi: 0.0,
            positivity_tol: DEFAULT_POSITIVITY_TOL,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
        }
    }

    /// Builds the knob form from absolute qubit and reservoir values.
    pub fn from_absolute(system: &SystemParams, r_a: &ReservoirSpec, r_b: &ReservoirSpec) -> Result<Self> {
        system.validate()?;
        r_a.validate()?;
        r_b.validate()?;
        if r_a.statistics != r_b.statistics {
            return Err(Error::Semantic("both reservoirs must share the same statistics".into()));
        }
        let ratio = |x: f64, y: f64| {
            let mean = 0.5 * (x + y);
            if mean == 0.0 {
                if x == y {
                    Ok((0.0, 0.0))
                } else {
                    Err(Error::Semantic("difference with zero mean cannot be written as a ratio".into()))
                }
            } else {
                Ok((mean, (x - y) / mean))
            }
        };
        let (eps_bar, delta_eps) = ratio(system.epsilon_a, system.epsilon_b)?;
        let (t_bar, delta_t) = ratio(r_a.temperature, r_b.temperature)?;
        let (mu_bar, delta_mu) = ratio(r_a.mu, r_b.mu)?;
        let mut s = Scenario::symmetric(r_a.statistics, eps_bar, system.lambda, t_bar, mu_bar, r_a.gamma);
        s.delta_eps = delta_eps;
        s.delta_t = delta_t;
        s.delta_mu = delta_mu;
        s.gamma_b = r_b.gamma;
        Ok(s)
    }

    pub fn with(mut self, parameter: Parameter, value: f64) -> Result<Self> {
        self.set(parameter, value)?;
        Ok(self)
    }

    pub fn set(&mut self, parameter: Parameter, value: f64) -> Result<()> {
        match parameter {
            Parameter::DeltaT => self.delta_t = value,
            Parameter::DeltaMu => self.delta_mu = value,
            Parameter::DeltaEps => self.delta_eps = value,
            Parameter::TBar => self.t_bar = value,
            Parameter::MuBar => self.mu_bar = value,
            Parameter::EpsBar => self.eps_bar = value,
            Parameter::Lambda => self.lambda = value,
            Parameter::Time => match &mut self.resource {
                Resource::Transient { time, .. } => *time = value,
                Resource::Steady => {
                    return Err(Error::InvalidParameter {
                        name: "time",
                        reason: "time axis needs a transient resource".into(),
                    })
                }
            },
        }
        Ok(())
    }

    pub fn get(&self, parameter: Parameter) -> Option<f64> {
        Some(match parameter {
            Parameter::DeltaT => self.delta_t,
            Parameter::DeltaMu => self.delta_mu,
            Parameter::DeltaEps => self.delta_eps,
            Parameter::TBar => self.t_bar,
            Parameter::MuBar => self.mu_bar,
            Parameter::EpsBar => self.eps_bar,
            Parameter::Lambda => self.lambda,
            Parameter::Time => match self.resource {
                Resource::Transient { time, .. } => time,
                Resource::Steady => return None,
            },
        })
    }

    pub fn transient(mut self, time: f64, initial: Protocol) -> Self {
        self.resource = Resource::Transient { time, initial };
        self
    }

    pub fn system(&self) -> Result<SystemParams> {
        let half = 0.5 * self.delta_eps;
        SystemParams::new(self.eps_bar * (1.0 + half), self.eps_bar * (1.0 - half), self.lambda)
    }

    pub fn reservoirs(&self) -> Result<(ReservoirSpec, ReservoirSpec)> {
        let ht = 0.5 * self.delta_t;
        let hm = 0.5 * self.delta_mu;
        let (mu_a, mu_b) = match self.statistics {
            Statistics::Bosonic => (0.0, 0.0),
            Statistics::Fermionic => (self.mu_bar * (1.0 + hm), self.mu_bar * (1.0 - hm)),
        };
        if self.statistics == Statistics::Bosonic && self.mu_bar != 0.0 {
            return Err(Error::Semantic(format!("bosonic reservoirs need mu = 0, got {}", self.mu_bar)));
        }
        Ok((
            ReservoirSpec::new(self.statistics, self.t_bar * (1.0 + ht), mu_a, self.gamma_a)?,
            ReservoirSpec::new(self.statistics, self.t_bar * (1.0 - ht), mu_b, self.gamma_b)?,
        ))
    }

    pub fn liouvillian(&self) -> Result<Liouvillian> {
        let (r_a, r_b) = self.reservoirs()?;
        build_liouvillian(&self.system()?, &r_a, &r_b)
    }
}

/// Health numbers of a solved state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// ‖L vec(ρ)‖₂; only for steady states.
    pub residual: Option<f64>,
    /// σ₂/σ₁ of the Liouvillian; only for steady states.
    pub null_gap: Option<f64>,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    /// Largest off-diagonal magnitude in the energy eigenbasis.
    pub eigen_coherence: f64,
    /// Largest entry outside the X pattern in the local basis.
    pub off_x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solved {
    pub local: DensityMatrix4,
    pub eigen: DensityMatrix4,
    pub liouvillian: Liouvillian,
    pub diagnostics: Diagnostics,
}

pub fn solve(scenario: &Scenario) -> Result<Solved> {
    let l = scenario.liouvillian()?;
    let (eigen, residual, null_gap) = match scenario.resource {
        Resource::Steady => {
            let ss = steady_state(&l, scenario.positivity_tol)?;
            (ss.rho, Some(ss.residual), Some(ss.null_space_gap()))
        }
        Resource::Transient { time, initial } => {
            let rho0 = DensityMatrix4::bell(initial.m, initial.n);
            let out = propagate(&l, &rho0, time, scenario.positivity_tol)?.to_basis(Basis::Eigen, &l.eigen);
            (out, None, None)
        }
    };
    let local = eigen.to_basis(Basis::Local, &l.eigen);
    let residual = residual.map(|r| r.max((l.matrix * vectorize(&eigen.matrix)).norm()));
    let diagnostics = Diagnostics {
        residual,
        null_gap,
        trace_error: (local.trace() - 1.0).abs(),
        min_eigenvalue: local.min_eigenvalue(),
        eigen_coherence: eigen.max_coherence(),
        off_x: local.off_x_magnitude(),
    };
    Ok(Solved {
        local,
        eigen,
        liouvillian: l,
        diagnostics,
    })
}

/// Everything reported for one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub fmax: f64,
    /// F̄ for protocols 00, 01, 10, 11.
    pub averages: [f64; 4],
    /// f coefficients at the scenario's φ; absent for non-X states.
    pub f: Option<[f64; 4]>,
    pub concurrence: f64,
    pub xstate: Option<XStateParams>,
    pub diagnostics: Diagnostics,
}

impl PointRecord {
    pub fn average(&self, p: Protocol) -> f64 {
        self.averages[p.index()]
    }

    pub fn f(&self, p: Protocol) -> Option<f64> {
        self.f.map(|f| f[p.index()])
    }
}

pub fn record_for(rho: &DensityMatrix4, phi: f64, quadrature_order: usize, diagnostics: Diagnostics) -> Result<PointRecord> {
    let xstate = extract_xstate(rho, DEFAULT_X_TOL).ok();
    let f = xstate.map(|x| Protocol::ALL.map(|p| f_coefficient(&x, phi, p)));
    Ok(PointRecord {
        fmax: fmax_general(rho),
        averages: average_fidelities(rho, quadrature_order)?,
        f,
        concurrence: concurrence(rho)?,
        xstate,
        diagnostics,
    })
}

pub fn evaluate(scenario: &Scenario) -> Result<PointRecord> {
    let solved = solve(scenario)?;
    record_for(&solved.local, scenario.phi, scenario.quadrature_order, solved.diagnostics)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub parameter: Parameter,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn new(parameter: Parameter, lo: f64, hi: f64, count: usize) -> Result<Self> {
        let axis = SweepAxis {
            parameter,
            lo,
            hi,
            count,
        };
        axis.validate()?;
        Ok(axis)
    }

    /// A collapsed range (lo == hi) is allowed and repeats one point.
    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidParameter {
                name: "count",
                reason: format!("axis needs at least 2 points, got {}", self.count),
            });
        }
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo > self.hi {
            return Err(Error::InvalidParameter {
                name: "range",
                reason: format!("need finite lo <= hi, got [{}, {}]", self.lo, self.hi),
            });
        }
        Ok(())
    }

    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * k as f64 / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.value(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    pub outcome: std::result::Result<PointRecord, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<SweepAxis>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    pub fn ok_rows(&self) -> impl Iterator<Item = (&[f64], &PointRecord)> {
        self.rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().map(|rec| (r.coords.as_slice(), rec)))
    }

    pub fn to_table(&self) -> Table {
        let mut columns: Vec<String> = self.axes.iter().map(|a| a.parameter.column().to_string()).collect();
        columns.extend(RECORD_COLUMNS.iter().map(|s| s.to_string()));
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut cells: Vec<Cell> = row.coords.iter().map(|&v| Cell::Num(v)).collect();
                match &row.outcome {
                    Ok(rec) => {
                        cells.push(Cell::Text("ok".into()));
                        cells.extend(record_cells(rec));
                    }
                    Err(e) => {
                        cells.push(Cell::Text(e.tag().into()));
                        cells.extend((1..RECORD_COLUMNS.len()).map(|_| Cell::Num(f64::NAN)));
                    }
                }
                cells
            })
            .collect();
        Table { columns, rows }
    }
}

pub const RECORD_COLUMNS: [&str; 24] = [
    "status",
    "Fmax",
    "Fbar00",
    "Fbar01",
    "Fbar10",
    "Fbar11",
    "f00",
    "f01",
    "f10",
    "f11",
    "concurrence",
    "a",
    "b",
    "c",
    "d",
    "alpha",
    "beta",
    "delta",
    "epsilon",
    "min_eigenvalue",
    "residual",
    "null_gap",
    "eigen_coherence",
    "off_x",
];

fn record_cells(rec: &PointRecord) -> Vec<Cell> {
    let nan = f64::NAN;
    let mut out = vec![rec.fmax];
    out.extend(rec.averages);
    out.extend(rec.f.unwrap_or([nan; 4]));
    out.push(rec.concurrence);
    match rec.xstate {
        Some(x) => out.extend([x.a, x.b, x.c, x.d, x.alpha, x.beta, x.delta, x.epsilon]),
        None => out.extend([nan; 8]),
    }
    let d = rec.diagnostics;
    out.extend([
        d.min_eigenvalue,
        d.residual.unwrap_or(nan),
        d.null_gap.unwrap_or(nan),
        d.eigen_coherence,
        d.off_x,
    ]);
    out.into_iter().map(Cell::Num).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

/// Column-named grid ready for CSV emission.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k].num().unwrap_or(f64::NAN)).collect())
    }
}

/// Product grid of one or two axes; the first axis varies slowest. Points are
/// evaluated in parallel and returned in grid order; failures are kept as
/// tagged rows.
pub fn sweep(base: &Scenario, axes: &[SweepAxis]) -> Result<SweepResult> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::InvalidParameter {
            name: "axes",
            reason: format!("expected 1 or 2 axes, got {}", axes.len()),
        });
    }
    for a in axes {
        a.validate()?;
        base.with(a.parameter, a.value(0))?;
    }
    let coords: Vec<Vec<f64>> = match axes {
        [a] => a.values().into_iter().map(|x| vec![x]).collect(),
        [a, b] => {
            let bv = b.values();
            a.values()
                .into_iter()
                .flat_map(|x| bv.iter().map(move |&y| vec![x, y]))
                .collect()
        }
        _ => unreachable!(),
    };
    let rows = coords
        .into_par_iter()
        .map(|coords| {
            let mut s = *base;
            let outcome = axes
                .iter()
                .zip(&coords)
                .try_for_each(|(a, &v)| s.set(a.parameter, v))
                .and_then(|_| evaluate(&s));
            SweepRow { coords, outcome }
        })
        .collect();
    Ok(SweepResult {
        axes: axes.to_vec(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub min: f64,
    pub max: f64,
    pub spread: f64,
}

/// Extremes of the protocol fidelity over `n_samples` seeded uniform inputs.
pub fn fidelity_spread(rho: &DensityMatrix4, protocol: Protocol, n_samples: usize, seed: u64) -> Result<Spread> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..n_samples {
        let f = teleport_oracle(rho, &InputState::random(&mut rng), protocol)?;
        min = min.min(f);
        max = max.max(f);
    }
    Ok(Spread {
        min,
        max,
        spread: max - min,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointOptions {
    pub root_tol: f64,
    pub axis_tol: f64,
    pub coherence_tol: f64,
    pub spread_samples: usize,
    pub seed: u64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            root_tol: DEFAULT_ROOT_TOL,
            axis_tol: DEFAULT_AXIS_TOL,
            coherence_tol: DEFAULT_COHERENCE_TOL,
            spread_samples: DEFAULT_SPREAD_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointRecord {
    pub parameter: Parameter,
    pub location: f64,
    pub protocol: Protocol,
    /// |f_mn| at the returned location.
    pub residual: f64,
    /// F̄_mn at the fixed point.
    pub fidelity: f64,
    pub spread: Spread,
    pub fmax: f64,
    pub gap_to_fmax: f64,
    /// |δ cosε| for protocols 00/10, |α cosβ| for 01/11.
    pub opposing_coherence: f64,
    /// Phase of the surviving coherence.
    pub surviving_phase: f64,
    /// Opposing coherence below tolerance, so the fidelity is input independent.
    pub genuine: bool,
}

/// Brackets sign changes of `f` on the grid and bisects each one. Grid
/// points where `f` fails are skipped; grid points already within `root_tol`
/// are returned as is.
pub fn bracket_roots<F>(f: F, axis: &SweepAxis, root_tol: f64, axis_tol: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    axis.validate()?;
    let xs = axis.values();
    let fs: Vec<Option<f64>> = xs.par_iter().map(|&x| f(x).ok()).collect();
    let on_root = |v: Option<f64>| v.is_some_and(|v| v.abs() <= root_tol);
    let mut roots = Vec::new();
    for k in 0..xs.len() {
        if on_root(fs[k]) {
            roots.push(xs[k]);
            continue;
        }
        if k + 1 == xs.len() || on_root(fs[k + 1]) {
            continue;
        }
        let (Some(f0), Some(f1)) = (fs[k], fs[k + 1]) else { continue };
        if f0.signum() == f1.signum() {
            continue;
        }
        roots.push(bisect(&f, xs[k], xs[k + 1], f0, root_tol, axis_tol)?);
    }
    Ok(roots)
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64, root_tol: f64, axis_tol: f64) -> Result<f64> {
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.abs() <= root_tol || (hi - lo) <= axis_tol {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

fn f_along(base: &Scenario, parameter: Parameter, protocol: Protocol) -> impl Fn(f64) -> Result<f64> + Sync + '_ {
    move |x| {
        let rec = evaluate(&base.with(parameter, x)?)?;
        rec.f(protocol).ok_or(Error::NotXForm {
            max_off: rec.diagnostics.off_x,
        })
    }
}

/// Characterizes the point `scenario` as a candidate fixed point of `protocol`.
pub fn certify_fixed_point(
    scenario: &Scenario,
    parameter: Parameter,
    protocol: Protocol,
    opts: &FixedPointOptions,
) -> Result<FixedPointRecord> {
    let solved = solve(scenario)?;
    let rec = record_for(&solved.local, scenario.phi, scenario.quadrature_order, solved.diagnostics)?;
    let x = rec.xstate.ok_or(Error::NotXForm {
        max_off: rec.diagnostics.off_x,
    })?;
    let (opposing, surviving_phase) = if protocol.uses_corner_coherence() {
        (x.inner().abs(), x.beta)
    } else {
        (x.corner().abs(), x.epsilon)
    };
    let spread = fidelity_spread(&solved.local, protocol, opts.spread_samples, opts.seed)?;
    let fidelity = rec.average(protocol);
    Ok(FixedPointRecord {
        parameter,
        location: scenario.get(parameter).unwrap_or(f64::NAN),
        protocol,
        residual: f_coefficient(&x, scenario.phi, protocol).abs(),
        fidelity,
        spread,
        fmax: rec.fmax,
        gap_to_fmax: rec.fmax - fidelity,
        opposing_coherence: opposing,
        surviving_phase,
        genuine: opposing <= opts.coherence_tol,
    })
}

/// Zeros of f_mn along `axis`, each certified with an input-spread check.
pub fn find_fixed_points(
    base: &Scenario,
    axis: &SweepAxis,
    protocol: Protocol,
    opts: &FixedPointOptions,
) -> Result<Vec<FixedPointRecord>> {
    base.with(axis.parameter, axis.lo)?;
    let roots = bracket_roots(f_along(base, axis.parameter, protocol), axis, opts.root_tol, opts.axis_tol)?;
    if roots.is_empty() {
        return Err(Error::NoBracket);
    }
    roots
        .into_iter()
        .map(|x| certify_fixed_point(&base.with(axis.parameter, x)?, axis.parameter, protocol, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::GMapping;
    use crate::teleport::werner_xstate;

    fn fig2_base() -> Scenario {
        Scenario::symmetric(Statistics::Bosonic, 10.0, 30.0, 2.0, 0.0, GMapping::PiSquare.gamma(0.05))
    }

    #[test]
    fn knobs_split_symmetrically() {
        let s = fig2_base()
            .with(Parameter::DeltaT, 0.5)
            .unwrap()
            .with(Parameter::DeltaEps, -0.4)
            .unwrap();
        let p = s.system().unwrap();
        assert!((p.epsilon_a - 8.0).abs() < 1e-14 && (p.epsilon_b - 12.0).abs() < 1e-14);
        let (a, b) = s.reservoirs().unwrap();
        assert!((a.temperature - 2.5).abs() < 1e-14 && (b.temperature - 1.5).abs() < 1e-14);
        assert!(s.with(Parameter::Time, 1.0).is_err());
    }

    #[test]
    fn absolute_round_trip() {
        let p = SystemParams::new(12.0, 8.0, 6.0).unwrap();
        let ra = ReservoirSpec::fermionic(1.5, 11.0, 0.01).unwrap();
        let rb = ReservoirSpec::fermionic(0.5, 9.0, 0.02).unwrap();
        let s = Scenario::from_absolute(&p, &ra, &rb).unwrap();
        let q = s.system().unwrap();
        let (a, b) = s.reservoirs().unwrap();
        assert!((q.epsilon_a - 12.0).abs() < 1e-13 && (q.epsilon_b - 8.0).abs() < 1e-13);
        assert!((a.mu - 11.0).abs() < 1e-13 && (b.temperature - 0.5).abs() < 1e-13);
        assert_eq!(b.gamma, 0.02);
    }

    #[test]
    fn parameter_ids_parse() {
        for p in [Parameter::DeltaT, Parameter::MuBar, Parameter::Time, Parameter::Lambda] {
            assert_eq!(p.id().parse::<Parameter>().unwrap(), p);
        }
        assert!("delta_t".parse::<Parameter>().is_err());
    }

    #[test]
    fn axis_validation_and_values() {
        assert!(SweepAxis::new(Parameter::DeltaT, 0.0, 1.0, 1).is_err());
        assert!(SweepAxis::new(Parameter::DeltaT, 1.0, 0.0, 3).is_err());
        let a = SweepAxis::new(Parameter::DeltaT, -1.0, 1.0, 5).unwrap();
        assert_eq!(a.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let flat = SweepAxis::new(Parameter::DeltaT, 0.3, 0.3, 2).unwrap();
        assert_eq!(flat.values(), vec![0.3, 0.3]);
    }

    #[test]
    fn degenerate_sweep_reproduces_direct_solve() {
        let base = fig2_base();
        let axis = SweepAxis::new(Parameter::DeltaEps, 0.4, 0.4, 2).unwrap();
        let res = sweep(&base, &[axis]).unwrap();
        assert_eq!(res.rows.len(), 2);
        let direct = evaluate(&base.with(Parameter::DeltaEps, 0.4).unwrap()).unwrap();
        for row in &res.rows {
            assert_eq!(row.outcome.as_ref().unwrap(), &direct);
        }
    }

    #[test]
    fn sweep_keeps_grid_order_and_tags_failures() {
        let base = fig2_base();
        let a = SweepAxis::new(Parameter::DeltaT, -0.5, 0.5, 3).unwrap();
        // the last value sends T_B to a non-positive temperature
        let b = SweepAxis::new(Parameter::DeltaEps, 0.0, 0.5, 2).unwrap();
        let bad = SweepAxis::new(Parameter::DeltaT, 1.0, 2.0, 2).unwrap();
        let res = sweep(&base, &[a, b]).unwrap();
        assert_eq!(res.rows.len(), 6);
        assert_eq!(res.rows[1].coords, vec![-0.5, 0.5]);
        assert_eq!(res.rows[2].coords, vec![0.0, 0.0]);
        let res = sweep(&base, &[bad]).unwrap();
        assert_eq!(res.failures(), 1);
        let table = res.to_table();
        assert_eq!(table.columns[0], "delta_T_ratio");
        assert_eq!(table.rows[1][1], Cell::Text("InvalidParameter".into()));
        assert!(sweep(&base, &[]).is_err());
    }

    #[test]
    fn werner_family_is_fixed_everywhere() {
        let axis = SweepAxis::new(Parameter::Lambda, 0.0, 1.0, 11).unwrap();
        let f = |p: f64| Ok(f_coefficient(&werner_xstate(p), 0.3, Protocol::ALL[0]));
        let roots = bracket_roots(f, &axis, 1e-9, 1e-10).unwrap();
        assert_eq!(roots, axis.values());
        for p in [0.0, 0.5, 1.0] {
            let s = fidelity_spread(&werner_xstate(p).to_state(), Protocol::ALL[0], 200, 1).unwrap();
            assert!(s.spread <= 1e-12);
        }
    }

    #[test]
    fn bisection_meets_tolerance() {
        let axis = SweepAxis::new(Parameter::Lambda, 0.0, 3.0, 7).unwrap();
        let roots = bracket_roots(|x: f64| Ok(x.cos()), &axis, 1e-9, 1e-10).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].cos().abs() <= 1e-9);
    }

    #[test]
    fn fig2_fixed_point() {
        let base = fig2_base();
        let axis = SweepAxis::new(Parameter::DeltaEps, 0.5, 1.5, 21).unwrap();
        let fps = find_fixed_points(&base, &axis, Protocol::ALL[3], &FixedPointOptions::default()).unwrap();
        assert_eq!(fps.len(), 1);
        let fp = fps[0];
        // numpy prototype: 1.0244380, F11 = Fmax = 0.94907726
        assert!((fp.location - 1.024_438_0).abs() < 1e-6, "{}", fp.location);
        assert!(fp.residual <= 1e-9);
        assert!(fp.genuine);
        assert!(fp.spread.spread <= 1e-8);
        assert!((fp.fidelity - 0.949_077_26).abs() < 1e-7);
        assert!(fp.gap_to_fmax.abs() < 1e-6);
        assert!((fp.surviving_phase - std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn no_bracket_is_reported() {
        let base = fig2_base();
        let axis = SweepAxis::new(Parameter::DeltaEps, 0.0, 0.3, 4).unwrap();
        assert!(matches!(
            find_fixed_points(&base, &axis, Protocol::ALL[3], &FixedPointOptions::default()),
            Err(Error::NoBracket)
        ));
    }
}
