//! Resolving `--family`, `--scheme` and target flags into a sequence.

use std::fmt;

use crate::analysis::{replace_pulses, replace_z_rotations, rz1_signed};
use crate::error::{Error, Result};
use crate::robust::{ra1, ra2, score_n, sr1_in_ra1, sr1_in_up1, sr1_in_uz1, suz_n, up_n, uz_n};
use crate::sequences::{
    basic_ac, basic_pc, basic_zc, bb1, benchmark_target, corpse, evaluate, scorbutus, scrofulous, short_corpse,
    ControlScheme, PulseSequence,
};
use crate::su2::{global_pulse, z_pulse, ErrorParams, Su2};

use ControlScheme::{AC, PC, ZC};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Basic,
    Up,
    Score,
    Uz,
    Suz,
    Ra,
    Rz,
    Sr1InUp1,
    Sr1InUz1,
    Sr1InRa1,
    Bb1,
    Corpse,
    ShortCorpse,
    Scrofulous,
    Scorbutus,
}

impl FamilyKind {
    const ALL: [FamilyKind; 15] = [
        FamilyKind::Basic,
        FamilyKind::Up,
        FamilyKind::Score,
        FamilyKind::Uz,
        FamilyKind::Suz,
        FamilyKind::Ra,
        FamilyKind::Rz,
        FamilyKind::Sr1InUp1,
        FamilyKind::Sr1InUz1,
        FamilyKind::Sr1InRa1,
        FamilyKind::Bb1,
        FamilyKind::Corpse,
        FamilyKind::ShortCorpse,
        FamilyKind::Scrofulous,
        FamilyKind::Scorbutus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Basic => "basic",
            FamilyKind::Up => "UP",
            FamilyKind::Score => "SCORE",
            FamilyKind::Uz => "UZ",
            FamilyKind::Suz => "sUZ",
            FamilyKind::Ra => "RA",
            FamilyKind::Rz => "RZ",
            FamilyKind::Sr1InUp1 => "SR1inUP1",
            FamilyKind::Sr1InUz1 => "SR1inUZ1",
            FamilyKind::Sr1InRa1 => "SR1inRA1",
            FamilyKind::Bb1 => "BB1",
            FamilyKind::Corpse => "CORPSE",
            FamilyKind::ShortCorpse => "sCORPSE",
            FamilyKind::Scrofulous => "SCROFULOUS",
            FamilyKind::Scorbutus => "SCORBUTUS",
        }
    }

    /// Schemes whose local controls can realize the family.
    pub fn schemes(self) -> &'static [ControlScheme] {
        match self {
            FamilyKind::Basic | FamilyKind::Score | FamilyKind::Corpse | FamilyKind::ShortCorpse => &[PC, AC, ZC],
            FamilyKind::Up | FamilyKind::Sr1InUp1 => &[PC],
            FamilyKind::Uz | FamilyKind::Suz | FamilyKind::Rz | FamilyKind::Sr1InUz1 => &[ZC],
            FamilyKind::Ra | FamilyKind::Sr1InRa1 => &[AC],
            FamilyKind::Bb1 | FamilyKind::Scrofulous | FamilyKind::Scorbutus => &[PC, ZC],
        }
    }

    /// Orders the family is defined for; fixed-order families have one.
    fn orders(self) -> std::ops::RangeInclusive<usize> {
        match self {
            FamilyKind::Basic => 0..=0,
            FamilyKind::Up => 1..=crate::robust::MAX_UP_ORDER,
            FamilyKind::Score => 1..=crate::robust::MAX_SCORE_ORDER,
            FamilyKind::Uz | FamilyKind::Suz => 1..=crate::robust::MAX_UZ_ORDER,
            FamilyKind::Ra => 1..=2,
            _ => 1..=1,
        }
    }

    /// Whether the family realizes a single rotation `[θ]_φ` (or `Z(θ)`).
    fn takes_rotation(self) -> bool {
        !matches!(
            self,
            FamilyKind::Basic
                | FamilyKind::Up
                | FamilyKind::Uz
                | FamilyKind::Suz
                | FamilyKind::Sr1InUp1
                | FamilyKind::Sr1InUz1
        )
    }

    /// Rotation builder for the families that replace a single pulse.
    fn pulse_builder(self, n: usize) -> Option<Box<dyn Fn(f64, f64) -> Result<PulseSequence>>> {
        Some(match self {
            FamilyKind::Score => Box::new(move |t, p| Ok(score_n(t, p, n)?.sequence)),
            FamilyKind::Ra if n == 1 => Box::new(ra1),
            FamilyKind::Ra => Box::new(|t, p| Ok(ra2(t, p)?.sequence)),
            FamilyKind::Sr1InRa1 => Box::new(sr1_in_ra1),
            FamilyKind::Bb1 => Box::new(bb1),
            FamilyKind::Corpse => Box::new(corpse),
            FamilyKind::ShortCorpse => Box::new(short_corpse),
            FamilyKind::Scrofulous => Box::new(scrofulous),
            FamilyKind::Scorbutus => Box::new(scorbutus),
            _ => return None,
        })
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn family_names() -> String {
    FamilyKind::ALL.iter().map(|f| f.name()).collect::<Vec<_>>().join(", ")
}

/// Parses `UP`, `SCORE2`, `sr1inup1`, ... into a family and an optional order.
pub fn parse_family(s: &str) -> Result<(FamilyKind, Option<usize>)> {
    let lower = s.trim().to_ascii_lowercase();
    let find = |name: &str| FamilyKind::ALL.into_iter().find(|f| f.name().to_ascii_lowercase() == name);
    if let Some(f) = find(&lower) {
        return Ok((f, None));
    }
    let stem = lower.trim_end_matches(|c: char| c.is_ascii_digit());
    if let (Some(f), Ok(n)) = (find(stem), lower[stem.len()..].parse::<usize>()) {
        return Ok((f, Some(n)));
    }
    Err(Error::InvalidArgument(format!("unknown family '{s}'; choose from {}", family_names())))
}

/// What the sequence should implement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetSpec {
    /// The scheme's basic-sequence angles in radians: `(α, β, γ)` of the PC
    /// sequence, ZYZ for ZC, XYX for AC.
    Angles([f64; 3]),
    /// One of the benchmark targets (H, Z(pi/4), X(pi/2), Y(pi/2)).
    Named(&'static str),
    /// A single rotation `[θ]_φ`, or `Z(θ)` for RZ.
    Rotation { theta: f64, phi: f64 },
}

impl TargetSpec {
    /// From CLI flags: `--target` with three angles (π units) or a benchmark
    /// name, or `--theta`/`--phi` (π units).
    pub fn from_flags(target: Option<&[String]>, theta: Option<f64>, phi: Option<f64>) -> Result<Option<Self>> {
        let pi = std::f64::consts::PI;
        match (target, theta) {
            (Some(_), Some(_)) => Err(Error::InvalidArgument("give either --target or --theta, not both".into())),
            (Some([name]), None) => {
                let t = benchmark_target(name).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "unknown target '{name}'; give three angles in units of π or one of H, Z(pi/4), X(pi/2), Y(pi/2)"
                    ))
                })?;
                Ok(Some(TargetSpec::Named(t.name)))
            }
            (Some([a, b, c]), None) => {
                let parse = |s: &String| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::InvalidArgument(format!("target angle '{s}' is not a number")))
                };
                Ok(Some(TargetSpec::Angles([parse(a)? * pi, parse(b)? * pi, parse(c)? * pi])))
            }
            (Some(_), None) => Err(Error::InvalidArgument("--target takes three angles or one target name".into())),
            (None, Some(theta)) => Ok(Some(TargetSpec::Rotation { theta: theta * pi, phi: phi.unwrap_or(0.0) * pi })),
            (None, None) if phi.is_some() => Err(Error::InvalidArgument("--phi needs --theta".into())),
            (None, None) => Ok(None),
        }
    }

    fn angles(self, scheme: ControlScheme) -> Option<[f64; 3]> {
        match self {
            TargetSpec::Angles(a) => Some(a),
            TargetSpec::Named(n) => benchmark_target(n).map(|t| t.angles(scheme)),
            TargetSpec::Rotation { .. } => None,
        }
    }

    /// The target unitary under `scheme`'s angle convention.
    pub fn unitary(self, scheme: ControlScheme, z_rotation: bool) -> Su2 {
        match self {
            TargetSpec::Named(n) => benchmark_target(n).expect("validated name").unitary,
            TargetSpec::Angles(a) => evaluate(&basic(scheme, a), ErrorParams::ZERO),
            TargetSpec::Rotation { theta, .. } if z_rotation => z_pulse(theta, ErrorParams::ZERO),
            TargetSpec::Rotation { theta, phi } => global_pulse(theta, phi, ErrorParams::ZERO),
        }
    }
}

fn basic(scheme: ControlScheme, [a, b, g]: [f64; 3]) -> PulseSequence {
    match scheme {
        PC => basic_pc(a, b, g),
        AC => basic_ac(a, b, g),
        ZC => basic_zc(a, b, g),
    }
}

/// A fully resolved family request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyRequest {
    pub family: FamilyKind,
    pub order: usize,
    pub scheme: ControlScheme,
    pub target: TargetSpec,
}

impl FamilyRequest {
    /// Validates the family/scheme/order/target combination. The scheme
    /// defaults to the first one the family supports.
    pub fn new(
        family: &str,
        n: Option<usize>,
        scheme: Option<ControlScheme>,
        target: Option<TargetSpec>,
    ) -> Result<Self> {
        let (family, embedded) = parse_family(family)?;
        let order = match (embedded, n) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::InvalidArgument(format!("--n {b} contradicts the order in '{family}{a}'")))
            }
            (a, b) => a.or(b).unwrap_or(*family.orders().start()),
        };
        if !family.orders().contains(&order) {
            let r = family.orders();
            return Err(Error::InvalidArgument(format!(
                "{family} is defined for orders {}..={}, not {order}",
                r.start(),
                r.end()
            )));
        }
        let scheme = scheme.unwrap_or(family.schemes()[0]);
        if !family.schemes().contains(&scheme) {
            let ok: Vec<String> = family.schemes().iter().map(|s| s.to_string()).collect();
            return Err(Error::InvalidArgument(format!(
                "{family} cannot be realized under {scheme} control (valid: {})",
                ok.join(", ")
            )));
        }
        let target = target.ok_or_else(|| {
            Error::InvalidArgument(if family.takes_rotation() {
                format!("{family} needs --target or --theta")
            } else {
                format!("{family} needs --target")
            })
        })?;
        if matches!(target, TargetSpec::Rotation { .. }) && !family.takes_rotation() {
            return Err(Error::InvalidArgument(format!(
                "{family} implements full gates; give --target (three angles or a name)"
            )));
        }
        Ok(FamilyRequest { family, order, scheme, target })
    }

    pub fn label(&self) -> String {
        match self.family {
            FamilyKind::Up | FamilyKind::Score | FamilyKind::Uz | FamilyKind::Suz | FamilyKind::Ra | FamilyKind::Rz => {
                format!("{}{}", self.family, self.order)
            }
            f => f.to_string(),
        }
    }

    pub fn target_unitary(&self) -> Su2 {
        self.target.unitary(self.scheme, self.family == FamilyKind::Rz)
    }

    /// Builds the sequence.
    pub fn build(&self) -> Result<Synthesized> {
        let mut params = None;
        let mut residual = 0.0;
        let mut take = |sol: crate::robust::RobustFamilySolution| {
            params = Some(sol.params);
            residual = sol.residual;
            sol.sequence
        };
        let seq = match (self.family, self.target) {
            (FamilyKind::Rz, TargetSpec::Rotation { theta, .. }) => rz1_signed(theta)?,
            (FamilyKind::Rz, t) => replace_z_rotations(&basic(ZC, t.angles(ZC).expect("gate target")))?,
            (FamilyKind::Score, TargetSpec::Rotation { theta, phi }) => take(score_n(theta, phi, self.order)?),
            (FamilyKind::Ra, TargetSpec::Rotation { theta, phi }) if self.order == 2 => take(ra2(theta, phi)?),
            (f, TargetSpec::Rotation { theta, phi }) => {
                f.pulse_builder(self.order).expect("rotation families have builders")(theta, phi)?
            }
            (f, t) => {
                let [a, b, g] = t.angles(self.scheme).expect("gate target");
                match f {
                    FamilyKind::Basic => basic(self.scheme, [a, b, g]),
                    FamilyKind::Up => take(up_n(a, b, g, self.order)?),
                    FamilyKind::Uz => take(uz_n(a, b, g, self.order)?),
                    FamilyKind::Suz => take(suz_n(a, b, g, self.order)?),
                    FamilyKind::Sr1InUp1 => sr1_in_up1(a, b, g)?,
                    FamilyKind::Sr1InUz1 => sr1_in_uz1(a, b, g)?,
                    f => {
                        let inner = f.pulse_builder(self.order).expect("rotation families have builders");
                        replace_pulses(&basic(self.scheme, [a, b, g]), inner)?
                    }
                }
            }
        };
        let sequence = seq.with_scheme(self.scheme)?.with_label(self.label());
        Ok(Synthesized { sequence, target: self.target_unitary(), params, residual })
    }
}

#[derive(Debug, Clone)]
pub struct Synthesized {
    pub sequence: PulseSequence,
    pub target: Su2,
    /// Solved family parameters (radians), for solver-based families.
    pub params: Option<Vec<f64>>,
    /// Largest residual of the solved conditions; zero for closed forms.
    pub residual: f64,
}
