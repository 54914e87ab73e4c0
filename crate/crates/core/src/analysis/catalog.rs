//! Named competitor sequences for each control scheme, built for the
//! four-target benchmark ensemble, and their published pulse counts and areas.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numsearch::preset;
use crate::robust::{
    ra1, rz1, score1, score_n, score_n_sequence, sr1_in_ra1, sr1_in_up1, sr1_in_uz1, suz_n, up1, up_n, uz_n,
};
use crate::sequences::{
    bb1, benchmark_targets, corpse, scorbutus, scrofulous, short_corpse, stats_with_slowdown, BenchmarkTarget,
    ControlScheme, PulseElement, PulseSequence, DEFAULT_Z_SLOWDOWN,
};

type Builder = Arc<dyn Fn(&BenchmarkTarget) -> Result<PulseSequence> + Send + Sync>;
type Inner = fn(f64, f64) -> Result<PulseSequence>;

/// A sequence family instantiated per benchmark target.
#[derive(Clone)]
pub struct Competitor {
    pub label: &'static str,
    pub scheme: ControlScheme,
    /// Whether the sequence is one of this library's robust families (as
    /// opposed to the basic sequence or a literature pulse).
    pub robust_family: bool,
    build: Builder,
}

impl std::fmt::Debug for Competitor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Competitor").field("label", &self.label).field("scheme", &self.scheme).finish()
    }
}

impl Competitor {
    pub fn build(&self, target: &BenchmarkTarget) -> Result<PulseSequence> {
        Ok((self.build)(target)?.with_label(self.label))
    }

    /// Sequences for all benchmark targets, in ensemble order.
    pub fn build_all(&self) -> Result<Vec<PulseSequence>> {
        benchmark_targets().iter().map(|t| self.build(t)).collect()
    }
}

fn competitor<F>(label: &'static str, scheme: ControlScheme, robust_family: bool, f: F) -> Competitor
where
    F: Fn(&BenchmarkTarget) -> Result<PulseSequence> + Send + Sync + 'static,
{
    Competitor { label, scheme, robust_family, build: Arc::new(f) }
}

/// `seq` with every non-zero global pulse replaced by `inner(θ, φ)`;
/// zero-area pulses are dropped.
pub fn replace_pulses<F>(seq: &PulseSequence, inner: F) -> Result<PulseSequence>
where
    F: Fn(f64, f64) -> Result<PulseSequence>,
{
    let scheme = seq.scheme();
    seq.replace_globals(
        |_, theta, phi| {
            if theta == 0.0 {
                Ok(Some(PulseSequence::empty(scheme)))
            } else {
                inner(theta, phi).map(Some)
            }
        },
    )
}

/// Basic sequence with every non-zero global pulse replaced by `inner(θ, φ)`.
fn replaced(label: &'static str, scheme: ControlScheme, robust_family: bool, inner: Inner) -> Competitor {
    competitor(label, scheme, robust_family, move |t| replace_pulses(&t.basic(scheme), inner))
}

/// RZ1 for any signed angle: negating every Z angle implements `Z(−θ)`.
pub fn rz1_signed(theta: f64) -> Result<PulseSequence> {
    let seq = rz1(theta.abs())?;
    if theta >= 0.0 {
        return Ok(seq);
    }
    let el = seq
        .elements()
        .iter()
        .map(|e| match *e {
            PulseElement::LocalZ { angle } => PulseElement::z(-angle),
            g => g,
        })
        .collect();
    PulseSequence::try_new(ControlScheme::ZC, el, "RZ1")
}

/// ZC sequence with every non-zero Z rotation replaced by RZ1, then merged:
/// neighbouring π/2 pulses combine or cancel and Z rotations add.
pub fn replace_z_rotations(seq: &PulseSequence) -> Result<PulseSequence> {
    let mut el = Vec::new();
    for e in seq.elements() {
        match *e {
            PulseElement::LocalZ { angle } if angle != 0.0 => el.extend_from_slice(rz1_signed(angle)?.elements()),
            PulseElement::LocalZ { .. } => {}
            g => el.push(g),
        }
    }
    Ok(PulseSequence::try_new(ControlScheme::ZC, el, "RZ1*")?.merged(true))
}

fn searched(label: &'static str, scheme: ControlScheme) -> Competitor {
    competitor(label, scheme, true, move |t| {
        let p = preset(label).expect("catalog presets exist");
        let thetas = p
            .published(t.name)
            .ok_or_else(|| Error::InvalidArgument(format!("{label} has no entry for {}", t.name)))?;
        p.problem(t.name, 0.0, 0, 0)?.to_sequence(&thetas)
    })
}

/// SCORE2 on its shortest certified root: in a parallel benchmark the
/// duration matters more than the size of the third-order residual.
fn score2(theta: f64, phi: f64) -> Result<PulseSequence> {
    let sol = score_n(theta, phi, 2)?;
    let shortest = sol
        .alternatives
        .iter()
        .filter(|r| r.area < sol.sequence.global_area() - 1e-9)
        .min_by(|a, b| a.area.total_cmp(&b.area));
    match shortest {
        Some(r) => score_n_sequence(theta, phi, &r.params),
        None => Ok(sol.sequence),
    }
}

/// Competitors for one scheme, in the published table order.
pub fn suite(scheme: ControlScheme) -> Vec<Competitor> {
    use ControlScheme::*;
    let basic = competitor("Basic", scheme, false, move |t| Ok(t.basic(scheme)));
    match scheme {
        PC => vec![
            basic,
            competitor("UP1", PC, true, |t| {
                let [a, b, g] = t.pc;
                Ok(up1(a, b, g).sequence)
            }),
            competitor("UP2", PC, true, |t| {
                let [a, b, g] = t.pc;
                Ok(up_n(a, b, g, 2)?.sequence)
            }),
            replaced("SCROFULOUS", PC, false, scrofulous),
            replaced("BB1", PC, false, bb1),
            replaced("SCORE1*", PC, true, score1),
            replaced("SCORE2*", PC, true, score2),
            replaced("CORPSE", PC, false, corpse),
            replaced("sCORPSE*", PC, false, short_corpse),
            competitor("SR1inUP1", PC, true, |t| {
                let [a, b, g] = t.pc;
                sr1_in_up1(a, b, g)
            }),
            replaced("SCORBUTUS*", PC, false, scorbutus),
        ],
        ZC => vec![
            basic,
            competitor("UZ1", ZC, true, |t| {
                let [a, b, g] = t.zc;
                Ok(uz_n(a, b, g, 1)?.sequence)
            }),
            competitor("UZ2", ZC, true, |t| {
                let [a, b, g] = t.zc;
                Ok(uz_n(a, b, g, 2)?.sequence)
            }),
            competitor("sUZ1", ZC, true, |t| {
                let [a, b, g] = t.zc;
                Ok(suz_n(a, b, g, 1)?.sequence)
            }),
            competitor("sUZ2", ZC, true, |t| {
                let [a, b, g] = t.zc;
                Ok(suz_n(a, b, g, 2)?.sequence)
            }),
            replaced("SCROFULOUS", ZC, false, scrofulous),
            replaced("BB1", ZC, false, bb1),
            replaced("SCORE1*", ZC, true, score1),
            replaced("SCORE2*", ZC, true, score2),
            replaced("CORPSE*", ZC, false, corpse),
            replaced("sCORPSE*", ZC, false, short_corpse),
            competitor("SR1inUZ1", ZC, true, |t| {
                let [a, b, g] = t.zc;
                sr1_in_uz1(a, b, g)
            }),
            replaced("SCORBUTUS*", ZC, false, scorbutus),
            competitor("RZ1*", ZC, true, |t| replace_z_rotations(&t.basic(ZC))),
            searched("nUZ-SE", ZC),
            searched("nUZ-SORE", ZC),
            searched("nUZ-SAE", ZC),
            searched("nUZ-SAORE", ZC),
        ],
        AC => vec![
            basic,
            searched("nUA-AE", AC),
            replaced("RA1*", AC, true, ra1),
            searched("nUA-ORE", AC),
            replaced("SCORE1*", AC, true, score1),
            replaced("SCORE2*", AC, true, score2),
            replaced("CORPSE*", AC, false, corpse),
            replaced("sCORPSE*", AC, false, short_corpse),
            searched("nUA-AORE1", AC),
            searched("nUA-AORE2", AC),
            replaced("SR1inRA1*", AC, true, sr1_in_ra1),
        ],
    }
}

/// Looks up a competitor by label (case-insensitive).
pub fn find_competitor(scheme: ControlScheme, label: &str) -> Result<Competitor> {
    let all = suite(scheme);
    if let Some(c) = all.iter().find(|c| c.label.eq_ignore_ascii_case(label)) {
        return Ok(c.clone());
    }
    let names: Vec<&str> = all.iter().map(|c| c.label).collect();
    Err(Error::InvalidArgument(format!("unknown {scheme} competitor '{label}'; choose from {}", names.join(", "))))
}

/// Pulse count and area of a competitor over the benchmark ensemble: the
/// largest `k` and the longest duration (in units of π/Ω, Z rotations
/// weighted by `z_slowdown`) over the four targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleProperties {
    pub k: usize,
    pub t: f64,
}

pub fn ensemble_properties(c: &Competitor, z_slowdown: f64) -> Result<EnsembleProperties> {
    let seqs = c.build_all()?;
    Ok(EnsembleProperties {
        k: seqs.iter().map(|s| s.len()).max().unwrap_or(0),
        t: seqs.iter().map(|s| stats_with_slowdown(s, z_slowdown).duration / PI).fold(0.0, f64::max),
    })
}

/// One row of the published property table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedProperties {
    pub scheme: ControlScheme,
    pub label: &'static str,
    pub k: usize,
    pub t: f64,
}

pub fn published_properties() -> Vec<PublishedProperties> {
    use ControlScheme::*;
    let rows: [(ControlScheme, &str, usize, f64); 40] = [
        (PC, "Basic", 3, 2.0),
        (PC, "UP1", 5, 6.0),
        (PC, "UP2", 7, 10.0),
        (PC, "SCROFULOUS", 9, 7.6),
        (PC, "BB1", 12, 14.0),
        (PC, "SCORE1*", 9, 8.4),
        (PC, "SCORE2*", 15, 12.3),
        (PC, "CORPSE", 9, 12.4),
        (PC, "sCORPSE*", 9, 6.4),
        (PC, "SR1inUP1", 11, 12.4),
        (PC, "SCORBUTUS*", 15, 13.7),
        (ZC, "Basic", 5, 2.5),
        (ZC, "UZ1", 7, 17.5),
        (ZC, "UZ2", 9, 21.5),
        (ZC, "sUZ1", 7, 15.5),
        (ZC, "sUZ2", 9, 17.5),
        (ZC, "SCROFULOUS", 9, 17.1),
        (ZC, "BB1", 11, 21.5),
        (ZC, "SCORE1*", 9, 18.6),
        (ZC, "SCORE2*", 13, 20.6),
        (ZC, "CORPSE*", 9, 20.6),
        (ZC, "sCORPSE*", 9, 16.6),
        (ZC, "SR1inUZ1", 11, 22.6),
        (ZC, "SCORBUTUS*", 13, 21.2),
        (ZC, "RZ1*", 34, 90.1),
        (ZC, "nUZ-SE", 12, 41.4),
        (ZC, "nUZ-SORE", 13, 43.8),
        (ZC, "nUZ-SAE", 13, 44.6),
        (ZC, "nUZ-SAORE", 16, 51.0),
        (AC, "Basic", 3, 2.25),
        (AC, "nUA-AE", 6, 8.5),
        (AC, "RA1*", 18, 15.8),
        (AC, "nUA-ORE", 6, 12.1),
        (AC, "SCORE1*", 9, 8.6),
        (AC, "SCORE2*", 15, 13.2),
        (AC, "CORPSE*", 9, 13.1),
        (AC, "sCORPSE*", 9, 7.1),
        (AC, "nUA-AORE1", 8, 9.1),
        (AC, "nUA-AORE2", 8, 11.5),
        (AC, "SR1inRA1*", 24, 22.1),
    ];
    rows.iter().map(|&(scheme, label, k, t)| PublishedProperties { scheme, label, k, t }).collect()
}

/// Computed properties next to the published ones, for every table row.
pub fn property_table(z_slowdown: f64) -> Result<Vec<(PublishedProperties, EnsembleProperties)>> {
    published_properties()
        .into_iter()
        .map(|p| Ok((p, ensemble_properties(&find_competitor(p.scheme, p.label)?, z_slowdown)?)))
        .collect()
}

/// [`property_table`] with the default Z slowdown.
pub fn default_property_table() -> Result<Vec<(PublishedProperties, EnsembleProperties)>> {
    property_table(DEFAULT_Z_SLOWDOWN)
}
