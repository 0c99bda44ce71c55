//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always print; exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use redfield_teleport::analysis::figures::{FIG10_TIME, FIG11_TIME, FIG8_TIME};
use redfield_teleport::analysis::{
    reproduce_figure, solve, sweep, FigureId, FigureOptions, Parameter, Scenario, SweepAxis,
};
use redfield_teleport::dynamics::{propagate, GMapping, Statistics};
use redfield_teleport::entanglement::{concurrence, concurrence_xstate, fmax_concurrence_relation};
use redfield_teleport::linalg::{kron2, Mat2, C64};
use redfield_teleport::state::{Basis, DensityMatrix4};
use redfield_teleport::teleport::{
    average_fidelities, average_fidelity_closed, average_fidelity_quadrature, extract_xstate, fidelity_xstate,
    fmax_general, fmax_xstate, teleport_oracle, InputState, Protocol, XStateParams, DEFAULT_X_TOL,
};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = XStateParams::random(&mut r);
        let rho = x.to_state();
        for _ in 0..20 {
            let input = InputState::random(&mut r);
            for p in Protocol::ALL {
                let oracle = teleport_oracle(&rho, &input, p).unwrap();
                worst = worst.max((oracle - fidelity_xstate(&x, &input, p)).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-10 && secs < 10.0,
        format!("max |closed - oracle| = {worst:.2e} (tol 1e-10) over 8000 cases in {secs:.2} s (limit 10 s)"),
    )
}

fn c2_average_equivalence() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = XStateParams::random(&mut r);
        let rho = x.to_state();
        for p in Protocol::ALL {
            let q = average_fidelity_quadrature(&rho, p, 64).unwrap();
            worst = worst.max((q - average_fidelity_closed(&x, p)).abs());
        }
    }
    outcome(worst <= 1e-8, format!("max |quadrature - closed| = {worst:.2e} (tol 1e-8) on 100 X-states"))
}

fn random_mixed_qubit(r: &mut ChaCha8Rng) -> Mat2 {
    let g = Mat2::from_fn(|_, _| C64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5));
    let m = g * g.adjoint();
    let tr = (m[(0, 0)] + m[(1, 1)]).re;
    m.unscale(tr)
}

fn random_general_state(r: &mut ChaCha8Rng) -> DensityMatrix4 {
    let g = redfield_teleport::linalg::Mat4::from_fn(|_, _| C64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5));
    let m = g * g.adjoint();
    let tr = redfield_teleport::linalg::trace(&m).re;
    DensityMatrix4::from_raw(m.unscale(tr), Basis::Local)
}

fn c3_horodecki() -> Outcome {
    let mut r = rng(3);
    let mut states: Vec<DensityMatrix4> = (0..200).map(|_| XStateParams::random(&mut r).to_state()).collect();
    states.extend((0..10).map(|_| random_general_state(&mut r)));
    states.extend(Protocol::ALL.iter().map(|p| DensityMatrix4::bell(p.m, p.n)));
    let mut worst_excess = f64::NEG_INFINITY;
    for rho in &states {
        let f = average_fidelities(rho, 32).unwrap();
        let fm = fmax_general(rho);
        for v in f {
            worst_excess = worst_excess.max(v - fm);
        }
    }
    let mut worst_eq: f64 = 0.0;
    for _ in 0..500 {
        let mut x = XStateParams::random(&mut r);
        x.beta = if r.random::<bool>() { 0.0 } else { PI };
        x.epsilon = if r.random::<bool>() { 0.0 } else { PI };
        worst_eq = worst_eq.max((fmax_xstate(&x).unwrap() - fmax_general(&x.to_state())).abs());
    }
    outcome(
        worst_excess <= 1e-10 && worst_eq <= 1e-12,
        format!(
            "max(Fbar_mn - Fmax) = {worst_excess:.2e} (slack 1e-10) on {} states; max |Fmax_x - Fmax| = {worst_eq:.2e} (tol 1e-12) on 500 real-phase X-states",
            states.len()
        ),
    )
}

fn c4_concurrence() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x = XStateParams::random(&mut r);
        worst = worst.max((concurrence_xstate(&x).value - concurrence(&x.to_state()).unwrap()).abs());
    }
    let bells: Vec<f64> = Protocol::ALL
        .iter()
        .map(|p| concurrence(&DensityMatrix4::bell(p.m, p.n)).unwrap())
        .collect();
    let mixed = concurrence(&DensityMatrix4::maximally_mixed()).unwrap();
    let bell_exact = bells.iter().all(|&c| c == 1.0);
    outcome(
        worst <= 1e-12 && bell_exact && mixed == 0.0,
        format!("max |X formula - Wootters| = {worst:.2e} (tol 1e-12) on 1000 states; Bell -> {bells:?}; I/4 -> {mixed}"),
    )
}

fn sc(stat: Statistics, lambda: f64, t: f64, mu: f64) -> Scenario {
    Scenario::symmetric(stat, 10.0, lambda, t, mu, GMapping::default().gamma(0.05))
}

/// Parameter sets of the steady-state figure presets with their swept axes.
fn steady_grids() -> Vec<(String, Scenario, Vec<SweepAxis>)> {
    let ax = |p, n| SweepAxis::new(p, -1.8, 1.8, n).unwrap();
    let mut out = Vec::new();
    for t in [1.0, 5.0, 10.0] {
        let s = sc(Statistics::Bosonic, 30.0, t, 0.0);
        out.push((format!("fig1a T={t}"), s, vec![ax(Parameter::DeltaT, 37)]));
        out.push((format!("fig1b T={t}"), s, vec![ax(Parameter::DeltaEps, 37)]));
    }
    let s2 = sc(Statistics::Bosonic, 30.0, 2.0, 0.0);
    out.push(("fig2".into(), s2, vec![ax(Parameter::DeltaEps, 37)]));
    out.push(("fig3".into(), s2, vec![ax(Parameter::DeltaT, 19), ax(Parameter::DeltaEps, 19)]));
    for (mu, t) in [(10.0, 0.1), (10.0, 1.0), (12.0, 1.0), (8.0, 1.0)] {
        out.push((format!("fig4 mu={mu} T={t}"), sc(Statistics::Fermionic, 6.0, t, mu), vec![ax(Parameter::DeltaMu, 37)]));
    }
    for (t, mu) in [(1.0, 10.0), (2.4, 10.0), (10.0, 8.0), (1.0, 8.0)] {
        out.push((format!("fig5 T={t} mu={mu}"), sc(Statistics::Fermionic, 6.0, t, mu), vec![ax(Parameter::DeltaT, 37)]));
    }
    let s6 = sc(Statistics::Fermionic, 6.0, 1.0, 8.0);
    out.push(("fig6a".into(), s6, vec![ax(Parameter::DeltaT, 19), ax(Parameter::DeltaMu, 19)]));
    out.push(("fig6b".into(), s6, vec![ax(Parameter::DeltaEps, 19), ax(Parameter::DeltaT, 19)]));
    let s7 = sc(Statistics::Fermionic, 6.0, 1.5, 10.0);
    out.push(("fig7".into(), s7, vec![ax(Parameter::DeltaMu, 19), ax(Parameter::DeltaEps, 19)]));
    out
}

fn c5_steady_health() -> Outcome {
    let (mut points, mut failures) = (0usize, Vec::new());
    let (mut residual, mut trace_err, mut min_eig, mut gap) = (0f64, 0f64, f64::INFINITY, f64::INFINITY);
    for (name, s, axes) in steady_grids() {
        let res = sweep(&s, &axes).unwrap();
        for row in &res.rows {
            points += 1;
            match &row.outcome {
                Ok(rec) => {
                    let d = rec.diagnostics;
                    residual = residual.max(d.residual.unwrap());
                    trace_err = trace_err.max(d.trace_error);
                    min_eig = min_eig.min(d.min_eigenvalue);
                    gap = gap.min(d.null_gap.unwrap());
                }
                Err(e) => failures.push(format!("{name} at {:?}: {}", row.coords, e.tag())),
            }
        }
    }
    let pass = failures.is_empty() && residual <= 1e-10 && trace_err <= 1e-12 && min_eig >= -1e-8 && gap >= 1e3;
    let mut detail = format!(
        "{points} points: max residual {residual:.2e} (1e-10), max trace error {trace_err:.2e} (1e-12), min eigenvalue {min_eig:.2e} (>= -1e-8), smallest singular-value gap {gap:.2e} (>= 1e3, one-dimensional null space)"
    );
    if !failures.is_empty() {
        detail += &format!("; {} failed points, first: {}", failures.len(), failures[0]);
    }
    outcome(pass, detail)
}

fn c6_equilibrium_decoupling() -> Outcome {
    let mut cases = Vec::new();
    for (ea, eb, lam) in [(10.0, 10.0, 30.0), (12.0, 8.0, 30.0), (12.0, 8.0, 6.0), (10.0, 10.0, 0.5), (15.0, 5.0, 40.0)] {
        for t in [0.3, 2.0, 10.0] {
            cases.push(Scenario::symmetric(Statistics::Bosonic, 10.0, lam, t, 0.0, 0.05).with(Parameter::DeltaEps, 0.0).unwrap());
            let mut s = Scenario::symmetric(Statistics::Bosonic, 0.5 * (ea + eb), lam, t, 0.0, 0.05);
            s.delta_eps = (ea - eb) / s.eps_bar;
            cases.push(s);
            let mut f = Scenario::symmetric(Statistics::Fermionic, 0.5 * (ea + eb), lam, t, 9.0, 0.03);
            f.delta_eps = (ea - eb) / f.eps_bar;
            cases.push(f);
        }
    }
    let mut worst: f64 = 0.0;
    for s in &cases {
        worst = worst.max(solve(s).unwrap().diagnostics.eigen_coherence);
    }
    outcome(worst <= 1e-10, format!("max eigenbasis coherence {worst:.2e} (tol 1e-10) over {} equilibrium cases", cases.len()))
}

fn status(h: Option<&redfield_teleport::analysis::Headline>) -> (bool, f64) {
    h.map_or((false, f64::NAN), |h| (h.pass == Some(true), h.value))
}

fn c7_fig2() -> Outcome {
    let start = Instant::now();
    let out = reproduce_figure(FigureId::Fig2, &FigureOptions::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (p1, loc) = status(out.headline("crossing"));
    let (p2, spread) = status(out.headline("crossing_spread"));
    let (p3, gap) = status(out.headline("crossing_gap_to_fmax"));
    outcome(
        p1 && p2 && p3 && secs < 60.0,
        format!(
            "crossing at |deps/eps| = {loc:.6} (1.0244 +- 0.02), spread {spread:.2e} (1e-8), Fmax - F11 = {gap:.2e} (1e-6), {secs:.2} s (limit 60 s)"
        ),
    )
}

fn c8_fig3() -> Outcome {
    let out = reproduce_figure(FigureId::Fig3, &FigureOptions::default()).unwrap();
    let (p1, peak) = status(out.headline("line_peak"));
    let (p2, global) = status(out.headline("global_max"));
    let (p3, asym) = status(out.headline("central_asymmetry"));
    let (_, loc) = status(out.headline("line_peak_outer"));
    let (_, loc_abs) = status(out.headline("line_peak_outer_absolute"));
    outcome(
        p1 && p2 && p3,
        format!(
            "line peak {peak:.6} (0.95284 +- 5e-3), global max {global:.6} (0.95287 +- 5e-3), central asymmetry {asym:.2e} (1e-8); peak at |dT/T| = {loc:.4}, |dT| = {loc_abs:.4} (reference 0.4752, reported only)"
        ),
    )
}

fn c9_fig7() -> Outcome {
    let out = reproduce_figure(FigureId::Fig7, &FigureOptions::default()).unwrap();
    let (p1, peak) = status(out.headline("line_peak"));
    let (p2, global) = status(out.headline("global_max"));
    let (p3, loc) = status(out.headline("line_peak_outer"));
    outcome(
        p1 && p2 && p3,
        format!("line peak {peak:.6} (0.8575 +- 5e-3), global max {global:.6} (0.8583 +- 5e-3), peak at |dmu/mu| = {loc:.4} (0.1706 +- 0.02)"),
    )
}

fn c10_transient_zeros() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (id, target) in [(FigureId::Fig8, FIG8_TIME), (FigureId::Fig10, FIG10_TIME), (FigureId::Fig11, FIG11_TIME)] {
        let out = reproduce_figure(id, &FigureOptions::default()).unwrap();
        let mut tier1 = Vec::new();
        for m in GMapping::ALL {
            let h = out.headline(&format!("zero_in_window_{}", m.name())).unwrap();
            pass &= h.pass == Some(true);
            tier1.push(format!("{}={:.5}", m.name(), h.value));
        }
        let (p_loc, loc) = status(out.headline("zero_time"));
        let (p_spread, spread) = status(out.headline("zero_time_spread"));
        pass &= p_loc && p_spread;
        let mut part = format!(
            "{id} [tier1 {}; tier2 {loc:.6} vs {target} (+-0.02), spread {spread:.1e} (1e-8)]",
            tier1.join(" ")
        );
        if id == FigureId::Fig11 {
            let ring = out.headline("f00_ring_closed").unwrap();
            pass &= ring.pass == Some(true);
            part += &format!(" ring closed: {} ({})", ring.pass == Some(true), ring.note);
        }
        parts.push(part);
    }
    outcome(pass, parts.join("; "))
}

fn c11_relation() -> Outcome {
    let mut worst: f64 = 0.0;
    let (mut applied, mut total) = (0, 0);
    let mut max_inner: f64 = 0.0;
    let bases = [
        Scenario::symmetric(Statistics::Bosonic, 10.0, 0.0, 2.0, 0.0, GMapping::default().gamma(0.05)),
        Scenario::symmetric(Statistics::Bosonic, 10.0, 0.0, 2.0, 0.0, 0.05)
            .with(Parameter::DeltaT, 0.8)
            .unwrap()
            .with(Parameter::DeltaEps, 0.3)
            .unwrap(),
        Scenario::symmetric(Statistics::Fermionic, 10.0, 0.0, 1.0, 8.0, GMapping::default().gamma(0.1))
            .with(Parameter::DeltaMu, -0.5)
            .unwrap(),
    ];
    for s in bases {
        let l = s.liouvillian().unwrap();
        let rho0 = DensityMatrix4::bell(0, 0);
        for k in 0..60 {
            let t = 0.37 * k as f64;
            let rho = propagate(&l, &rho0, t, 1e-8).unwrap();
            total += 1;
            let x = extract_xstate(&rho, DEFAULT_X_TOL).unwrap();
            max_inner = max_inner.max(x.delta);
            if let Ok(v) = fmax_concurrence_relation(&x) {
                applied += 1;
                worst = worst.max((v - fmax_general(&rho)).abs());
            }
        }
    }
    outcome(
        worst <= 1e-10 && applied > 0,
        format!("max |relation - Fmax| = {worst:.2e} (tol 1e-10) on {applied}/{total} entangled transient states; max |rho23| = {max_inner:.1e}"),
    )
}

fn c12_monotone() -> Outcome {
    let out = reproduce_figure(FigureId::Fig1a, &FigureOptions::default()).unwrap();
    let checks: Vec<_> = out.headlines.iter().filter(|h| h.name.starts_with("fmax_monotone")).collect();
    let pass = checks.len() == 3 && checks.iter().all(|h| h.pass == Some(true)) && out.failures == 0;
    let parts: Vec<String> = checks.iter().map(|h| format!("{} rise {:.2e}", h.name, h.value)).collect();
    outcome(pass, format!("{} ({} grid failures)", parts.join(", "), out.failures))
}

fn c13_classical_bound() -> Outcome {
    let mut r = rng(13);
    let mut worst_product = f64::NEG_INFINITY;
    for k in 0..40 {
        let rho = if k % 2 == 0 {
            DensityMatrix4::from_raw(kron2(&random_mixed_qubit(&mut r), &random_mixed_qubit(&mut r)), Basis::Local)
        } else {
            DensityMatrix4::product(r.random_range(0..2), r.random_range(0..2))
        };
        let f = average_fidelities(&rho, 32).unwrap();
        worst_product = worst_product.max(f.iter().copied().fold(fmax_general(&rho), f64::max));
    }
    let mut worst_bell: f64 = 0.0;
    for p in Protocol::ALL {
        let rho = DensityMatrix4::bell(p.m, p.n);
        for _ in 0..1000 {
            let input = InputState::random(&mut r);
            worst_bell = worst_bell.max((teleport_oracle(&rho, &input, p).unwrap() - 1.0).abs());
        }
    }
    outcome(
        worst_product <= 2.0 / 3.0 + 1e-10 && worst_bell <= 1e-12,
        format!("max fidelity of 40 product resources {worst_product:.12} (<= 2/3 + 1e-10); max |F - 1| for Bell resources {worst_bell:.2e} over 4000 inputs"),
    )
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("average-fidelity equivalence", c2_average_equivalence),
        ("Horodecki consistency", c3_horodecki),
        ("concurrence", c4_concurrence),
        ("steady-state health", c5_steady_health),
        ("equilibrium decoupling", c6_equilibrium_decoupling),
        ("fig2 crossing", c7_fig2),
        ("fig3 fixed-point line", c8_fig3),
        ("fig7 fixed-point line", c9_fig7),
        ("transient zero times", c10_transient_zeros),
        ("concurrence relation", c11_relation),
        ("fig1a monotonicity", c12_monotone),
        ("classical bound", c13_classical_bound),
    ];
    // honour `cargo test -- <filter>` loosely: run everything unless the filter names a criterion
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    let mut ran = 0;
    for (k, (title, f)) in criteria.iter().enumerate() {
        let id = k + 1;
        if let Some(flt) = &filter {
            if !title.contains(flt.as_str()) && flt != &id.to_string() {
                continue;
            }
        }
        ran += 1;
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("[{tag}] {id:>2} {title}: {} [{:.1} s]", o.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
