//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails for a reason not already understood
//! (known discrepancies are listed in `KNOWN_PROPERTY_MISMATCHES`).

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use parapulse::analysis::{
    avg_gate_fidelity, default_property_table, evaluate_cell, haar_mc_fidelity, phase_diagram, suite,
    suppression_order, ErrorAxis, FidelityParams, Grid, PreparedCompetitor, SweepSettings,
};
use parapulse::jet::ErrorDirection;
use parapulse::numsearch::{presets, two_stage_search, Hypercube, SearchProblem, Slot, DEFAULT_HALF_WIDTH, THETA_MAX};
use parapulse::robust::{
    pc_benchmark_angles, ra1, ra2, ra2_constraints, ra2_with, rep_check, rz1, score1, score_n, score_n_sequence,
    score_n_with, sr1_in_ra1, sr1_in_up1, sr1_in_uz1, suz_n, suz_phase_solutions, theorem1_construct, up1, up_n,
    up_n_sequence, up_n_with, uz_n, uz_phase_solutions, FamilyRoot, RepKind, RobustFamilySolution, SolveOptions,
    TrsHalfSequence,
};
use parapulse::sequences::{
    basic_pc, basic_zc, bb1, benchmark_target, benchmark_targets, corpse, evaluate, evaluate_jet, scorbutus,
    scrofulous, short_corpse, ControlScheme, PulseElement, PulseSequence,
};
use parapulse::su2::{global_pulse, trace_overlap, wrap_2pi, z_pulse, ErrorParams, Su2};
use parapulse::tables::table;
use parapulse::Result;

/// Property-table rows whose published values this library does not
/// reproduce; each is explained in the README.
const KNOWN_PROPERTY_MISMATCHES: &[(ControlScheme, &str)] =
    &[(ControlScheme::PC, "SCORBUTUS*"), (ControlScheme::ZC, "SCORBUTUS*"), (ControlScheme::ZC, "Basic")];

struct Outcome {
    pass: bool,
    /// Failure already understood and documented.
    known: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, known: false, detail }
    }
}

fn ideal(theta: f64, phi: f64) -> Su2 {
    global_pulse(theta, phi, ErrorParams::ZERO)
}

fn u0(seq: &PulseSequence) -> Su2 {
    evaluate(seq, ErrorParams::ZERO)
}

/// Largest defect of the claimed expansion `U(ζ) = target + O(ζ^{n+1})`:
/// `1 − overlap` at zero error and the norms of Taylor coefficients 1..=n.
fn taylor_defect(seq: &PulseSequence, target: Su2, dir: ErrorDirection, n: usize) -> f64 {
    let j = evaluate_jet::<8>(seq, dir);
    let c0 = j.coeff(0);
    let overlap = c0.iter().zip(target.components()).map(|(a, b)| a * b).sum::<f64>().abs();
    (1..=n).map(|k| norm(j.coeff(k))).fold(1.0 - overlap, f64::max)
}

fn norm(v: [f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Zero-error exactness of every builder.
fn exactness() -> Result<Outcome> {
    // (label, achieved overlap, tolerance)
    let mut checks: Vec<(String, f64, f64)> = Vec::new();
    let mut check = |label: String, seq: &PulseSequence, target: Su2, tol: f64| {
        checks.push((label, trace_overlap(u0(seq), target), tol));
    };
    let targets = benchmark_targets();
    let generic = [0.37, 1.91, 5.2];
    for scheme in [ControlScheme::PC, ControlScheme::AC, ControlScheme::ZC] {
        for t in &targets {
            check(format!("Basic {scheme} {}", t.name), &t.basic(scheme), t.unitary, 1e-10);
        }
    }
    for &(theta, phi) in &[(PI / 2.0, 0.3), (PI, 0.0), (0.7, 2.2)] {
        check(format!("SCORE1 closed form θ={theta:.3}"), &score1(theta, phi)?, ideal(theta, phi), 1e-10);
        for n in 1..=4 {
            let sol = score_n(theta, phi, n)?;
            check(format!("SCORE{n} θ={theta:.3}"), &sol.sequence, ideal(theta, phi), 1e-10);
        }
        check(format!("RA1 θ={theta:.3}"), &ra1(theta, phi)?, ideal(theta, phi), 1e-10);
        check(format!("RA2 θ={theta:.3}"), &ra2(theta, phi)?.sequence, ideal(theta, phi), 1e-10);
        check(format!("SR1inRA1 θ={theta:.3}"), &sr1_in_ra1(theta, phi)?, ideal(theta, phi), 1e-10);
        check(format!("RZ1 θ={theta:.3}"), &rz1(theta)?, z_pulse(theta, ErrorParams::ZERO), 1e-10);
        for (name, f) in [
            ("BB1", bb1 as fn(f64, f64) -> Result<PulseSequence>),
            ("CORPSE", corpse),
            ("sCORPSE", short_corpse),
            ("SCROFULOUS", scrofulous),
            ("SCORBUTUS", scorbutus),
        ] {
            check(format!("{name} θ={theta:.3}"), &f(theta, phi)?, ideal(theta, phi), 1e-10);
        }
    }
    let pc_angles: Vec<[f64; 3]> = targets.iter().map(|t| t.pc).chain([generic]).collect();
    for [a, b, g] in pc_angles {
        let target = u0(&basic_pc(a, b, g));
        check(format!("UP1 {a:.3},{b:.3},{g:.3}"), &up1(a, b, g).sequence, target, 1e-10);
        check(format!("UP2 {a:.3},{b:.3},{g:.3}"), &up_n(a, b, g, 2)?.sequence, target, 1e-10);
        check(format!("SR1inUP1 {a:.3},{b:.3},{g:.3}"), &sr1_in_up1(a, b, g)?, target, 1e-10);
    }
    let zc_angles: Vec<[f64; 3]> = targets.iter().map(|t| t.zc).chain([generic]).collect();
    for [a, b, g] in zc_angles {
        let target = u0(&basic_zc(a, b, g));
        for n in 1..=5 {
            check(format!("UZ{n} {a:.3},{b:.3},{g:.3}"), &uz_n(a, b, g, n)?.sequence, target, 1e-10);
            check(format!("sUZ{n} {a:.3},{b:.3},{g:.3}"), &suz_n(a, b, g, n)?.sequence, target, 1e-10);
        }
        check(format!("SR1inUZ1 {a:.3},{b:.3},{g:.3}"), &sr1_in_uz1(a, b, g)?, target, 1e-10);
    }
    // Published numerical sequences: their areas are printed to 5 decimals.
    for p in presets() {
        for name in p.targets() {
            let problem = p.problem(name, DEFAULT_HALF_WIDTH, 0, 0)?;
            let areas = p.published(name).expect("tabulated target");
            let seq = problem.to_sequence(&areas)?;
            check(format!("{} {name} (published)", p.name), &seq, problem.target, 1e-4);
        }
    }
    // Everything the benchmark suites build.
    for scheme in [ControlScheme::PC, ControlScheme::AC, ControlScheme::ZC] {
        for c in suite(scheme) {
            let tol = if c.label.starts_with("nU") { 1e-4 } else { 1e-10 };
            for t in &targets {
                check(format!("suite {scheme} {} {}", c.label, t.name), &c.build(t)?, t.unitary, tol);
            }
        }
    }
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, f, tol)| !(1.0 - f <= *tol))
        .map(|(l, f, _)| format!("{l}: 1 - overlap = {:.2e}", 1.0 - f))
        .collect();
    let worst_exact = checks.iter().filter(|c| c.2 < 1e-9).map(|c| 1.0 - c.1).fold(0.0, f64::max);
    let worst_pub = checks.iter().filter(|c| c.2 > 1e-9).map(|c| 1.0 - c.1).fold(0.0, f64::max);
    Ok(Outcome::new(
        bad.is_empty(),
        format!(
            "{} builders; worst 1 - overlap {worst_exact:.1e} (exact), {worst_pub:.1e} (published areas){}",
            checks.len(),
            if bad.is_empty() { String::new() } else { format!("; failing: {}", bad.join("; ")) }
        ),
    ))
}

/// Fitted infidelity slopes equal 2(n+1).
fn order_suite() -> Result<Outcome> {
    // (label, sequence, target, axis, expected order; None = at least 1)
    let mut cases: Vec<(String, PulseSequence, Su2, ErrorAxis, Option<usize>)> = Vec::new();
    let (theta, phi) = (PI / 2.0, 0.3);
    for n in 1..=4 {
        cases.push((
            format!("SCORE{n}/δ"),
            score_n(theta, phi, n)?.sequence,
            ideal(theta, phi),
            ErrorAxis::Delta,
            Some(n),
        ));
    }
    let h = benchmark_target("H").expect("benchmark target");
    let [a, b, g] = h.pc;
    let pc_target = u0(&basic_pc(a, b, g));
    cases.push(("UP1/ε".into(), up1(a, b, g).sequence, pc_target, ErrorAxis::Epsilon, Some(1)));
    cases.push(("UP2/ε".into(), up_n(a, b, g, 2)?.sequence, pc_target, ErrorAxis::Epsilon, Some(2)));
    let [za, zb, zg] = h.zc;
    let zc_target = u0(&basic_zc(za, zb, zg));
    for n in 1..=5 {
        cases.push((format!("UZ{n}/ε"), uz_n(za, zb, zg, n)?.sequence, zc_target, ErrorAxis::Epsilon, Some(n)));
        cases.push((format!("sUZ{n}/ε"), suz_n(za, zb, zg, n)?.sequence, zc_target, ErrorAxis::Epsilon, Some(n)));
    }
    cases.push(("RA1/ε".into(), ra1(theta, phi)?, ideal(theta, phi), ErrorAxis::Epsilon, Some(1)));
    cases.push(("RA2/ε".into(), ra2(theta, phi)?.sequence, ideal(theta, phi), ErrorAxis::Epsilon, Some(2)));
    cases.push(("RZ1/ε_s".into(), rz1(theta)?, z_pulse(theta, ErrorParams::ZERO), ErrorAxis::EpsilonS, Some(1)));
    let sr: [(&str, PulseSequence, Su2); 3] = [
        ("SR1inUP1", sr1_in_up1(a, b, g)?, pc_target),
        ("SR1inUZ1", sr1_in_uz1(za, zb, zg)?, zc_target),
        ("SR1inRA1", sr1_in_ra1(theta, phi)?, ideal(theta, phi)),
    ];
    for (name, seq, target) in sr {
        for axis in [ErrorAxis::Epsilon, ErrorAxis::Delta, ErrorAxis::Diagonal] {
            cases.push((format!("{name}/{}", axis.name()), seq.clone(), target, axis, None));
        }
    }
    let mut bad = Vec::new();
    let mut summary = Vec::new();
    for (label, seq, target, axis, want) in &cases {
        match suppression_order(seq, *target, *axis) {
            Ok(fit) => {
                let ok = match want {
                    Some(n) => fit.order == Some(*n),
                    None => fit.order.is_some_and(|k| k >= 1),
                };
                summary.push(format!("{label} {:.2}", fit.slope));
                if !ok {
                    bad.push(format!("{label}: slope {:.3}", fit.slope));
                }
            }
            Err(e) => bad.push(format!("{label}: {e}")),
        }
    }
    Ok(Outcome::new(
        bad.is_empty(),
        format!(
            "{} sequences; slopes [{}]{}",
            cases.len(),
            summary.join(", "),
            if bad.is_empty() { String::new() } else { format!("; failing: {}", bad.join("; ")) }
        ),
    ))
}

/// Random TRS halves fed through the ZC construction keep their order.
fn theorem1_property() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7125);
    let cases: Vec<(usize, f64, f64, [f64; 3], u64)> = (0..100)
        .map(|i| {
            let n = 1 + i % 2;
            let theta = rng.gen_range(0.2..TAU - 0.2);
            let phi = rng.gen_range(0.0..TAU);
            let euler = [rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)];
            (n, theta, phi, euler, rng.gen())
        })
        .collect();
    // Ok(Ok(order)): certified by the slope fit. Ok(Err(note)): the fit is
    // inconclusive but the Taylor coefficients vanish through order n.
    let results: Vec<std::result::Result<std::result::Result<usize, String>, String>> = cases
        .par_iter()
        .map(|&(n, theta, phi, [a, b, g], seed)| {
            let half = TrsHalfSequence::solve(theta, phi, n, seed).map_err(|e| format!("θ={theta:.3} n={n}: {e}"))?;
            let (t, p) = half.rotation();
            let target = u0(&PulseSequence::new(
                ControlScheme::ZC,
                vec![
                    PulseElement::z(a),
                    PulseElement::global(t / 2.0, p),
                    PulseElement::z(b),
                    PulseElement::global(t / 2.0, p),
                    PulseElement::z(g),
                ],
                "ideal",
            ));
            let seq = theorem1_construct(&half, a, b, g);
            let fit = suppression_order(&seq, target, ErrorAxis::Epsilon).map_err(|e| format!("θ={theta:.3}: {e}"))?;
            if let Some(k) = fit.order.filter(|&k| k >= n) {
                return Ok(Ok(k));
            }
            let defect = taylor_defect(&seq, target, ErrorDirection::AMPLITUDE, n);
            let j = evaluate_jet::<8>(&seq, ErrorDirection::AMPLITUDE);
            let (next, after) = (norm(j.coeff(n + 1)), norm(j.coeff(n + 2)));
            let note = format!(
                "θ={theta:.3} n={n}: slope {:.2}; Taylor coefficients 1..={n} ≤ {defect:.1e}, |c{}| = {next:.2}, |c{}| = {after:.1}",
                fit.slope,
                n + 1,
                n + 2
            );
            if defect < 1e-8 { Ok(Err(note)) } else { Err(note) }
        })
        .collect();
    let bad: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    let taylor_only: Vec<&String> = results.iter().filter_map(|r| r.as_ref().ok()?.as_ref().err()).collect();
    let orders: Vec<usize> = results.iter().filter_map(|r| r.as_ref().ok()?.as_ref().ok().copied()).collect();
    let mut detail = format!(
        "{}/100 certified by the slope fit (orders {}..={})",
        orders.len(),
        orders.iter().min().unwrap_or(&0),
        orders.iter().max().unwrap_or(&0)
    );
    for note in &taylor_only {
        let _ = write!(detail, "\n      slope fit inconclusive, exact Taylor order holds: {note}");
    }
    for note in &bad {
        let _ = write!(detail, "\n      failed: {note}");
    }
    if !taylor_only.is_empty() {
        detail.push_str(
            "\n      (a large next-but-one coefficient puts the fit window in the pre-asymptotic regime: \
             the leading term only dominates below the 1e-13 infidelity floor)",
        );
    }
    Ok(Outcome { pass: bad.is_empty() && taylor_only.is_empty(), known: bad.is_empty(), detail })
}

/// SCORE1 is amplitude-REP.
fn rep() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4e9);
    let mut worst: f64 = 0.0;
    let mut fails = 0;
    for _ in 0..20 {
        let theta = rng.gen_range(0.05 * PI..1.95 * PI);
        let phi = rng.gen_range(0.0..TAU);
        let r = rep_check(score1, theta, phi, RepKind::Epsilon)?;
        worst = worst.max(r.deviation);
        if !(r.pass && r.deviation < 1e-7) {
            fails += 1;
        }
    }
    Ok(Outcome::new(fails == 0, format!("20 random rotations; max deviation {worst:.2e}")))
}

/// Closed-form average gate fidelity against Haar-sampled states.
fn closed_form_vs_mc() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf1d);
    let mut worst_sigma: f64 = 0.0;
    let mut fails = 0;
    let targets = benchmark_targets();
    for i in 0..20 {
        let t = &targets[i % 4];
        let scheme = [ControlScheme::PC, ControlScheme::AC, ControlScheme::ZC][i % 3];
        let seq = t.basic(scheme);
        let err = ErrorParams::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
        let fp = FidelityParams::new(rng.gen_range(0.0..0.05))?;
        let closed = avg_gate_fidelity(&seq, t.unitary, err, fp);
        let mc = haar_mc_fidelity(&seq, t.unitary, err, fp, 100_000, rng.gen())?;
        let sigma = (closed - mc.mean).abs() / mc.stderr;
        worst_sigma = worst_sigma.max(sigma);
        if sigma >= 3.0 {
            fails += 1;
        }
    }
    Ok(Outcome::new(fails == 0, format!("20 triples × 1e5 samples; worst |closed − MC| = {worst_sigma:.2} σ")))
}

/// One published row checked against every root a generically seeded
/// solver finds.
struct RowCheck {
    label: String,
    matched: bool,
    /// Unmatched, but every root found is valid and so are the printed values.
    ambiguous: bool,
    note: String,
}

/// `roots` are `(params, residual)`, best first; `printed` is the Taylor
/// defect of the printed values, when the family exposes a sequence builder.
fn check_row(label: String, want: &[f64], roots: Vec<(Vec<f64>, f64)>, printed: Option<f64>) -> RowCheck {
    let tol = 1e-3 * PI;
    let distance = |p: &[f64]| {
        p.iter()
            .zip(want)
            .map(|(a, b)| {
                let d = wrap_2pi(a - b);
                d.min(TAU - d)
            })
            .fold(0.0, f64::max)
    };
    let (idx, d) = roots
        .iter()
        .enumerate()
        .map(|(i, (p, _))| (i, distance(p)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("at least one root");
    let matched = d < tol;
    let roots_valid = roots.iter().all(|r| r.1 < 1e-10);
    let printed_valid = printed.is_some_and(|v| v < 1e-3);
    let note = if matched {
        if idx == 0 {
            String::new()
        } else {
            format!("matched alternative root #{idx}")
        }
    } else {
        let mut note = format!(
            "no root within tolerance; closest of {} roots off by {:.2e}π (residual {:.1e}); best root {:?}/π (residual {:.1e})",
            roots.len(),
            d / PI,
            roots[idx].1,
            roots[0].0.iter().map(|v| (v / PI * 1e5).round() / 1e5).collect::<Vec<_>>(),
            roots[0].1
        );
        if let Some(v) = printed {
            let _ = write!(note, "; printed values satisfy the conditions to {v:.1e}");
        }
        note
    };
    RowCheck { label, matched, ambiguous: !matched && roots_valid && printed_valid, note }
}

fn solution_roots(sol: &RobustFamilySolution) -> Vec<(Vec<f64>, f64)> {
    std::iter::once((sol.params.clone(), sol.residual))
        .chain(sol.alternatives.iter().map(|r| (r.params.clone(), r.residual)))
        .collect()
}

fn family_roots(roots: &[FamilyRoot]) -> Vec<(Vec<f64>, f64)> {
    roots.iter().map(|r| (r.params.clone(), r.residual)).collect()
}

/// Published tables reproduced by generically seeded solvers.
fn table_regression() -> Result<Outcome> {
    let opts = |salt: u64| SolveOptions::generic(256, 0xab1e ^ salt);
    type Job = Box<dyn Fn() -> Result<RowCheck> + Send + Sync>;
    let mut jobs: Vec<Job> = Vec::new();
    for row in &table("scoren").expect("embedded").rows {
        let theta = row.key_value().expect("numeric key") * PI;
        for n in 1..=4 {
            let want = row.radians(n - 1);
            let key = row.key.clone();
            jobs.push(Box::new(move || {
                let sol = score_n_with(theta, 0.0, n, &opts(n as u64))?;
                let printed = taylor_defect(
                    &score_n_sequence(theta, 0.0, &want)?,
                    ideal(theta, 0.0),
                    ErrorDirection::DETUNING,
                    n,
                );
                Ok(check_row(format!("SCORE{n} θ={key}π"), &want, solution_roots(&sol), Some(printed)))
            }));
        }
    }
    for row in &table("uzn").expect("embedded").rows {
        let n = row.key_value().expect("numeric key") as usize;
        let want = row.radians(0);
        jobs.push(Box::new(move || {
            let roots = uz_phase_solutions(n, &opts(100 + n as u64))?;
            Ok(check_row(format!("UZ{n}"), &want, family_roots(&roots), None))
        }));
    }
    for row in &table("suzn").expect("embedded").rows {
        let n = row.key_value().expect("numeric key") as usize;
        let want = row.radians(0);
        jobs.push(Box::new(move || {
            let roots = suz_phase_solutions(n, &opts(200 + n as u64))?;
            Ok(check_row(format!("sUZ{n}"), &want, family_roots(&roots), None))
        }));
    }
    for row in &table("ra2").expect("embedded").rows {
        let theta = row.key_value().expect("numeric key") * PI;
        let want = row.radians(0);
        let key = row.key.clone();
        jobs.push(Box::new(move || {
            let sol = ra2_with(theta, 0.0, &opts(300))?;
            let printed =
                ra2_constraints([want[0], want[1], want[2]], theta).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            Ok(check_row(format!("RA2 θ={key}π"), &want, solution_roots(&sol), Some(printed)))
        }));
    }
    for row in &table("up").expect("embedded").rows {
        // The phases belong to the benchmark representatives of the angles.
        let (_, [a, b, g]) =
            pc_benchmark_angles().into_iter().find(|(name, _)| *name == row.key).expect("benchmark target");
        for n in 1..=2 {
            let want = row.radians(n);
            let key = row.key.clone();
            jobs.push(Box::new(move || {
                let roots = if n == 1 {
                    solution_roots(&up1(a, b, g))
                } else {
                    solution_roots(&up_n_with(a, b, g, n, &opts(400))?)
                };
                let printed = taylor_defect(
                    &up_n_sequence(a, b, g, &want)?,
                    u0(&basic_pc(a, b, g)),
                    ErrorDirection::AMPLITUDE,
                    n,
                );
                Ok(check_row(format!("UP{n} {key}"), &want, roots, Some(printed)))
            }));
        }
    }
    let rows: Vec<RowCheck> = jobs.par_iter().map(|job| job()).collect::<Result<_>>()?;
    let matched = rows.iter().filter(|r| r.matched).count();
    let ambiguous = rows.iter().filter(|r| r.ambiguous).count();
    let via_alternative = rows.iter().filter(|r| r.matched && !r.note.is_empty()).count();
    let mut detail = format!(
        "{matched}/{} published rows reproduced within 1e-3π ({via_alternative} by a root other than the solver's first \
         choice), {ambiguous} reported as branch ambiguity",
        rows.len()
    );
    for r in rows.iter().filter(|r| !r.matched) {
        let _ = write!(detail, "\n      {}: {}", r.label, r.note);
    }
    Ok(Outcome::new(matched + ambiguous == rows.len(), detail))
}

/// Headline fidelity and phase-diagram share.
fn headline() -> Result<Outcome> {
    let competitors: Vec<PreparedCompetitor> =
        suite(ControlScheme::PC).iter().map(|c| PreparedCompetitor::new(c, 5.0)).collect::<Result<_>>()?;
    let cell = evaluate_cell(&competitors, 0.03, 0.03, &SweepSettings::new(1e-5));
    let best = &competitors[cell.winner].label;
    let diagram = phase_diagram(&suite(ControlScheme::PC), Grid::default(), SweepSettings::new(5e-5))?;
    let share = diagram.summary().robust_family_fraction;
    Ok(Outcome::new(
        cell.best > 0.999 && share > 0.5,
        format!(
            "best at ε=δ=0.03, γ=1e-5: {best} F = {:.5}; robust-family share of 41×41 PC diagram at γ=5e-5: {:.1}%",
            cell.best,
            100.0 * share
        ),
    ))
}

/// Pulse counts and areas of the published property table.
fn bookkeeping() -> Result<Outcome> {
    let rows = default_property_table()?;
    let mut unexpected = Vec::new();
    let mut known = Vec::new();
    for (p, got) in &rows {
        if got.k == p.k && (got.t - p.t).abs() <= 0.05 {
            continue;
        }
        let line =
            format!("{} {}: k {} (published {}), T {:.2}π (published {}π)", p.scheme, p.label, got.k, p.k, got.t, p.t);
        if KNOWN_PROPERTY_MISMATCHES.contains(&(p.scheme, p.label)) {
            known.push(line);
        } else {
            unexpected.push(line);
        }
    }
    let ok = rows.len() - known.len() - unexpected.len();
    let mut detail = format!("{ok}/{} rows reproduced", rows.len());
    for l in known.iter() {
        let _ = write!(detail, "\n      known: {l}");
    }
    for l in unexpected.iter() {
        let _ = write!(detail, "\n      unexpected: {l}");
    }
    Ok(Outcome { pass: known.is_empty() && unexpected.is_empty(), known: unexpected.is_empty(), detail })
}

/// Numerical searches on the preset problems.
fn search() -> Result<Outcome> {
    // Corner fidelities equal to this precision count as ties.
    const TIE: f64 = 1e-10;
    let mut bad = Vec::new();
    let mut runs = 0;
    let mut worst_grad: f64 = 0.0;
    let mut worst_f0: f64 = 1.0;
    let mut worst_pub_grad: f64 = 0.0;
    let mut margins = Vec::new();
    let mut ties = Vec::new();
    for p in presets() {
        for name in p.targets() {
            let mut problem = p.problem(name, DEFAULT_HALF_WIDTH, 256, 0x5ea7)?;
            let published = problem.initial.clone();
            // Random starts only; the published areas are checked separately.
            problem.initial.clear();
            let tag = format!("{} {name}", p.name);
            runs += 1;
            let r = match two_stage_search(&problem) {
                Ok(r) => r,
                Err(e) => {
                    bad.push(format!("{tag}: {e}"));
                    continue;
                }
            };
            worst_f0 = worst_f0.min(r.fidelity_at_zero);
            worst_grad = worst_grad.max(r.gradient_norm);
            let basic = benchmark_target(name).expect("benchmark target").basic(p.scheme);
            let basic_min = problem
                .hypercube
                .corners()
                .iter()
                .map(|&c| trace_overlap(evaluate(&basic, c), problem.target))
                .fold(1.0, f64::min);
            let found_min = r.corner_fidelities.iter().copied().fold(1.0, f64::min);
            margins.push(found_min - basic_min);
            if (found_min - basic_min).abs() < TIE {
                ties.push(tag.clone());
            }
            if !(r.fidelity_at_zero >= 1.0 - 1e-6 && r.gradient_norm < 1e-6 && found_min >= basic_min - TIE) {
                bad.push(format!(
                    "{tag}: F0 {:.9}, grad {:.1e}, min corner {found_min:.6} vs basic {basic_min:.6}",
                    r.fidelity_at_zero, r.gradient_norm
                ));
            }
            for areas in &published {
                let g = problem.assess(areas, 0).gradient_norm;
                worst_pub_grad = worst_pub_grad.max(g);
                if g >= 1e-3 {
                    bad.push(format!("{tag}: published areas have gradient {g:.2e}"));
                }
            }
        }
    }
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Outcome::new(
        bad.is_empty(),
        format!(
            "{runs} searches × 256 seeds; worst F0 {worst_f0:.9}, worst gradient {worst_grad:.1e}, \
             smallest min-corner gain over basic {min_margin:.2e}{}; published rows: max gradient {worst_pub_grad:.1e}{}",
            if ties.is_empty() { String::new() } else { format!(" (ties with basic: {})", ties.join(", ")) },
            if bad.is_empty() { String::new() } else { format!("; failing: {}", bad.join("; ")) }
        ),
    ))
}

fn random_problem(scheme: ControlScheme, rng: &mut ChaCha8Rng) -> SearchProblem {
    let m = rng.gen_range(3..=9);
    let slots = (0..m)
        .map(|i| match scheme {
            ControlScheme::ZC if i % 2 == 0 => Slot::Z,
            ControlScheme::ZC => Slot::XyRotation { phi: rng.gen_range(0.0..TAU) },
            _ => Slot::Global { phi: rng.gen_range(0.0..TAU) },
        })
        .collect();
    let target = Su2::from_axis_angle([rng.gen(), rng.gen(), rng.gen::<f64>() + 0.1], rng.gen_range(0.1..PI));
    SearchProblem {
        label: "random".into(),
        scheme,
        target,
        slots,
        hypercube: Hypercube::new(0.05, 0.05, 0.05).expect("valid"),
        seeds: 1,
        rng_seed: 0,
        initial: vec![],
    }
}

/// Analytic ∂U/∂θ against central differences.
fn jacobian() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1ac0b);
    let mut worst: f64 = 0.0;
    for scheme in [ControlScheme::AC, ControlScheme::ZC] {
        for _ in 0..50 {
            let p = random_problem(scheme, &mut rng);
            let thetas: Vec<f64> = (0..p.slots.len()).map(|_| rng.gen_range(0.0..THETA_MAX)).collect();
            let err = ErrorParams::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
            let (du, _) = p.jacobian(&thetas, err);
            let h = 1e-5;
            for (i, d) in du.iter().enumerate() {
                let (mut a, mut b) = (thetas.clone(), thetas.clone());
                a[i] += h;
                b[i] -= h;
                let (ua, ub) = (p.unitary(&a, err).components(), p.unitary(&b, err).components());
                for c in 0..4 {
                    worst = worst.max(((ua[c] - ub[c]) / (2.0 * h) - d[c]).abs());
                }
            }
        }
    }
    Ok(Outcome::new(worst < 1e-8, format!("50 AC + 50 ZC sequences; max deviation {worst:.2e}")))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("zero-error exactness", exactness),
        ("order certification", order_suite),
        ("TRS construction keeps its order", theorem1_property),
        ("SCORE1 amplitude REP", rep),
        ("closed-form fidelity vs Monte Carlo", closed_form_vs_mc),
        ("table regression (generic seeds)", table_regression),
        ("headline fidelity and phase diagram", headline),
        ("property table", bookkeeping),
        ("preset searches", search),
        ("analytic Jacobian", jacobian),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {n}: {status} — {name}: {} ({:.1} s)", outcome.detail, start.elapsed().as_secs_f64());
        if !outcome.pass && !outcome.known {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria failed unexpectedly");
        std::process::exit(1);
    }
}
