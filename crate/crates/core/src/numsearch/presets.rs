//! Named search problems and the `key = value` problem file format.

use std::f64::consts::PI;

use super::{Hypercube, SearchProblem, Slot, DEFAULT_SEEDS};
use crate::error::{Error, Result};
use crate::sequences::{benchmark_target, ControlScheme, EulerTarget};
use crate::su2::Su2;
use crate::tables::{self, Table};

/// Default half-width of every active error axis.
pub const DEFAULT_HALF_WIDTH: f64 = 0.05;

/// A published slot pattern with its error axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub scheme: ControlScheme,
    pub slots: Vec<Slot>,
    /// Which of `(ε, δ, ε_s)` the search protects against.
    pub axes: [bool; 3],
    table: &'static str,
}

impl Preset {
    pub fn hypercube(&self, half_width: f64) -> Hypercube {
        let w = |on: bool| if on { half_width } else { 0.0 };
        Hypercube { epsilon: w(self.axes[0]), delta: w(self.axes[1]), epsilon_s: w(self.axes[2]) }
    }

    fn table(&self) -> &'static Table {
        tables::table(self.table).expect("preset tables are embedded")
    }

    /// Published areas (radians) for a benchmark target, if tabulated.
    pub fn published(&self, target: &str) -> Option<Vec<f64>> {
        let key = benchmark_target(target)?.name;
        self.table().row(key).map(|r| r.radians(1))
    }

    /// Names of the tabulated targets.
    pub fn targets(&self) -> Vec<&'static str> {
        self.table().rows.iter().filter(|r| r.key != "phases").map(|r| r.key.as_str()).collect()
    }

    /// Search problem for a benchmark target, seeded with the published areas.
    pub fn problem(&self, target: &str, half_width: f64, seeds: usize, rng_seed: u64) -> Result<SearchProblem> {
        let t = benchmark_target(target).ok_or_else(|| Error::InvalidArgument(format!("unknown target '{target}'")))?;
        Ok(SearchProblem {
            label: self.name.to_string(),
            scheme: self.scheme,
            target: t.unitary,
            slots: self.slots.clone(),
            hypercube: self.hypercube(half_width),
            seeds,
            rng_seed,
            initial: self.published(target).into_iter().collect(),
        })
    }
}

const PRESETS: [(&str, &str, ControlScheme, [bool; 3]); 8] = [
    ("nUZ-SE", "nuz-se", ControlScheme::ZC, [false, false, true]),
    ("nUZ-SORE", "nuz-sore", ControlScheme::ZC, [false, true, true]),
    ("nUZ-SAE", "nuz-sae", ControlScheme::ZC, [true, false, true]),
    ("nUZ-SAORE", "nuz-saore", ControlScheme::ZC, [true, true, true]),
    ("nUA-AE", "nua-ae", ControlScheme::AC, [true, false, false]),
    ("nUA-ORE", "nua-ore", ControlScheme::AC, [false, true, false]),
    ("nUA-AORE1", "nua-aore1", ControlScheme::AC, [true, true, false]),
    ("nUA-AORE2", "nua-aore2", ControlScheme::AC, [true, true, false]),
];

fn slots_from_phases(scheme: ControlScheme, phases: &[Option<f64>]) -> Vec<Slot> {
    phases
        .iter()
        .map(|p| match (scheme, p) {
            (_, None) => Slot::Z,
            (ControlScheme::ZC, Some(p)) => Slot::XyRotation { phi: p * PI },
            (_, Some(p)) => Slot::Global { phi: p * PI },
        })
        .collect()
}

pub fn presets() -> Vec<Preset> {
    PRESETS
        .iter()
        .map(|&(name, table, scheme, axes)| {
            let t = tables::table(table).expect("preset tables are embedded");
            let phases = &t.row("phases").expect("preset tables list their phases").fields[0];
            Preset { name, scheme, slots: slots_from_phases(scheme, phases), axes, table }
        })
        .collect()
}

pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name.eq_ignore_ascii_case(name))
}

fn number(line: usize, v: &str) -> Result<f64> {
    let v = v.trim();
    let parsed = match v.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok().zip(b.trim().parse::<f64>().ok()).map(|(a, b)| a / b),
        None => v.parse().ok(),
    };
    parsed.filter(|x| x.is_finite()).ok_or(Error::Parse { line, message: format!("bad number '{v}'") })
}

fn parse_target(line: usize, v: &str) -> Result<Su2> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    match parts.as_slice() {
        [conv, a, b, c] if conv.eq_ignore_ascii_case("zyz") || conv.eq_ignore_ascii_case("xyx") => {
            let [a, b, c] = [number(line, a)? * PI, number(line, b)? * PI, number(line, c)? * PI];
            let e =
                if conv.eq_ignore_ascii_case("zyz") { EulerTarget::zyz(a, b, c) } else { EulerTarget::xyx(a, b, c) };
            Ok(e.unitary())
        }
        _ => benchmark_target(v.trim())
            .map(|t| t.unitary)
            .ok_or(Error::Parse { line, message: format!("unknown target '{v}'") }),
    }
}

/// Parses a problem description:
///
/// ```text
/// # comments and blank lines are ignored
/// preset = nUZ-SE          # or: scheme = ZC and phases = -, 1/2, -, 1/2
/// target = H               # or: zyz a b c / xyx a b c (units of π)
/// epsilon_s = 0.05         # epsilon, delta, epsilon_s override the preset box
/// seeds = 256
/// rng_seed = 7
/// ```
pub fn parse_problem(text: &str) -> Result<SearchProblem> {
    let mut scheme = None;
    let mut phases: Option<Vec<Option<f64>>> = None;
    let mut preset_: Option<Preset> = None;
    let mut target = None;
    let mut target_name = None;
    let mut widths: [Option<f64>; 3] = [None; 3];
    let mut seeds = DEFAULT_SEEDS;
    let mut rng_seed = 0u64;
    let mut label = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or_default().trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or(Error::Parse { line, message: format!("expected 'key = value', got '{content}'") })?;
        let (k, v) = (k.trim().to_ascii_lowercase(), v.trim());
        match k.as_str() {
            "scheme" => {
                scheme = Some(v.parse::<ControlScheme>().map_err(|e| Error::Parse { line, message: e.to_string() })?)
            }
            "preset" => {
                preset_ = Some(preset(v).ok_or(Error::Parse { line, message: format!("unknown preset '{v}'") })?)
            }
            "phases" => {
                phases = Some(
                    v.split([',', ' '])
                        .filter(|t| !t.trim().is_empty())
                        .map(|t| if t.trim() == "-" { Ok(None) } else { number(line, t).map(Some) })
                        .collect::<Result<_>>()?,
                )
            }
            "target" => {
                target = Some(parse_target(line, v)?);
                target_name = Some(v.to_string());
            }
            "epsilon" => widths[0] = Some(number(line, v)?),
            "delta" => widths[1] = Some(number(line, v)?),
            "epsilon_s" => widths[2] = Some(number(line, v)?),
            "seeds" => {
                seeds = v.parse().map_err(|_| Error::Parse { line, message: format!("bad seed count '{v}'") })?
            }
            "rng_seed" => {
                rng_seed = v.parse().map_err(|_| Error::Parse { line, message: format!("bad rng seed '{v}'") })?
            }
            "label" => label = Some(v.to_string()),
            _ => return Err(Error::Parse { line, message: format!("unknown key '{k}'") }),
        }
    }
    let target = target.ok_or(Error::Parse { line: 0, message: "missing 'target'".into() })?;
    let (scheme, slots, base, initial, default_label) = match (&preset_, phases) {
        (Some(_), Some(_)) => {
            return Err(Error::Parse { line: 0, message: "give either 'preset' or 'phases', not both".into() })
        }
        (Some(p), None) => {
            if scheme.is_some_and(|s| s != p.scheme) {
                return Err(Error::Parse { line: 0, message: format!("preset {} is {}", p.name, p.scheme) });
            }
            let initial = target_name.and_then(|n| p.published(&n)).into_iter().collect();
            (p.scheme, p.slots.clone(), p.hypercube(DEFAULT_HALF_WIDTH), initial, p.name.to_string())
        }
        (None, Some(ph)) => {
            let scheme = scheme.ok_or(Error::Parse { line: 0, message: "'phases' needs 'scheme'".into() })?;
            (scheme, slots_from_phases(scheme, &ph), Hypercube::default(), Vec::new(), "search".to_string())
        }
        (None, None) => return Err(Error::Parse { line: 0, message: "missing 'preset' or 'phases'".into() }),
    };
    let hypercube = Hypercube::new(
        widths[0].unwrap_or(base.epsilon),
        widths[1].unwrap_or(base.delta),
        widths[2].unwrap_or(base.epsilon_s),
    )
    .map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
    let problem = SearchProblem {
        label: label.unwrap_or(default_label),
        scheme,
        target,
        slots,
        hypercube,
        seeds,
        rng_seed,
        initial,
    };
    problem.validate().map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
    Ok(problem)
}
