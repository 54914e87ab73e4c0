//! Phase diagrams: which competitor has the best ensemble-averaged fidelity
//! at each point of an (ε, δ) grid.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::catalog::Competitor;
use super::fidelity::fidelity_from_overlap;
use crate::error::{Error, Result};
use crate::parallel::with_thread_cap;
use crate::sequences::{benchmark_targets, evaluate, parallel_duration, PulseSequence, DEFAULT_Z_SLOWDOWN};
use crate::su2::{ErrorParams, Su2};

/// Fidelity differences below this count as ties.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub eps_max: f64,
    pub delta_max: f64,
    /// Points per axis, including both ends.
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { eps_max: 0.1, delta_max: 0.1, points: 41 }
    }
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2
            || !(self.eps_max.is_finite() && self.eps_max > 0.0 && self.delta_max.is_finite() && self.delta_max > 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "grid needs ≥ 2 points per axis and positive extents: {self:?}"
            )));
        }
        Ok(())
    }

    fn value(max: f64, i: usize, n: usize) -> f64 {
        max * i as f64 / (n - 1) as f64
    }

    /// Cell coordinates, δ varying fastest.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let n = self.points;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (Self::value(self.eps_max, i, n), Self::value(self.delta_max, j, n))))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub gamma: f64,
    pub z_slowdown: f64,
    /// Fixed Stark error applied at every cell.
    pub epsilon_s: f64,
}

impl SweepSettings {
    pub fn new(gamma: f64) -> Self {
        SweepSettings { gamma, z_slowdown: DEFAULT_Z_SLOWDOWN, epsilon_s: 0.0 }
    }
}

/// A competitor prepared for evaluation: one sequence per benchmark target
/// and the parallel duration of the ensemble.
#[derive(Debug, Clone)]
pub struct PreparedCompetitor {
    pub label: String,
    pub robust_family: bool,
    pub sequences: Vec<PulseSequence>,
    pub targets: Vec<Su2>,
    pub duration: f64,
}

impl PreparedCompetitor {
    pub fn new(c: &Competitor, z_slowdown: f64) -> Result<Self> {
        let sequences = c.build_all()?;
        Ok(PreparedCompetitor {
            label: c.label.to_string(),
            robust_family: c.robust_family,
            duration: parallel_duration(&sequences, z_slowdown),
            targets: benchmark_targets().iter().map(|t| t.unitary).collect(),
            sequences,
        })
    }

    /// Fidelity averaged over the targets and the four sign combinations of (ε, δ).
    pub fn averaged_fidelity(&self, eps: f64, delta: f64, settings: &SweepSettings) -> f64 {
        let mut sum = 0.0;
        for (seq, target) in self.sequences.iter().zip(&self.targets) {
            for (se, sd) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let err = ErrorParams::new(se * eps, sd * delta, settings.epsilon_s);
                let overlap = evaluate(seq, err).dot(target).abs();
                sum += fidelity_from_overlap(overlap, self.duration, settings.gamma);
            }
        }
        sum / (4 * self.sequences.len()) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub eps: f64,
    pub delta: f64,
    /// Index into [`PhaseDiagram::labels`].
    pub winner: usize,
    pub best: f64,
    pub fidelities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    pub gamma: f64,
    pub grid: Grid,
    pub labels: Vec<String>,
    pub robust_family: Vec<bool>,
    pub durations: Vec<f64>,
    pub cells: Vec<Cell>,
}

/// Index of the best competitor: highest fidelity, then shorter duration,
/// then label order.
pub fn pick_winner(fidelities: &[f64], durations: &[f64], labels: &[String]) -> usize {
    let mut best = 0;
    for i in 1..fidelities.len() {
        let d = fidelities[i] - fidelities[best];
        let better = if d.abs() < TIE_TOL {
            match durations[i].total_cmp(&durations[best]) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => labels[i] < labels[best],
            }
        } else {
            d > 0.0
        };
        if better {
            best = i;
        }
    }
    best
}

pub fn evaluate_cell(competitors: &[PreparedCompetitor], eps: f64, delta: f64, settings: &SweepSettings) -> Cell {
    let fidelities: Vec<f64> = competitors.iter().map(|c| c.averaged_fidelity(eps, delta, settings)).collect();
    let durations: Vec<f64> = competitors.iter().map(|c| c.duration).collect();
    let labels: Vec<String> = competitors.iter().map(|c| c.label.clone()).collect();
    let winner = pick_winner(&fidelities, &durations, &labels);
    Cell { eps, delta, winner, best: fidelities[winner], fidelities }
}

/// Evaluates every grid cell in parallel (capped by `PULSE_THREADS`).
pub fn phase_diagram(competitors: &[Competitor], grid: Grid, settings: SweepSettings) -> Result<PhaseDiagram> {
    grid.validate()?;
    if competitors.is_empty() {
        return Err(Error::InvalidArgument("no competitors".into()));
    }
    if !(settings.gamma.is_finite() && settings.gamma >= 0.0) {
        return Err(Error::InvalidArgument(format!("decoherence rate must be finite and ≥ 0, got {}", settings.gamma)));
    }
    let prepared: Vec<PreparedCompetitor> =
        competitors.iter().map(|c| PreparedCompetitor::new(c, settings.z_slowdown)).collect::<Result<_>>()?;
    let coords = grid.cells();
    let cells: Vec<Cell> =
        with_thread_cap(|| coords.par_iter().map(|&(e, d)| evaluate_cell(&prepared, e, d, &settings)).collect());
    Ok(PhaseDiagram {
        gamma: settings.gamma,
        grid,
        labels: prepared.iter().map(|c| c.label.clone()).collect(),
        robust_family: prepared.iter().map(|c| c.robust_family).collect(),
        durations: prepared.iter().map(|c| c.duration).collect(),
        cells,
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WinnerStats {
    pub label: String,
    pub cells: usize,
    pub fraction: f64,
    pub robust_family: bool,
    pub duration: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DiagramSummary {
    pub gamma: f64,
    pub grid_points: usize,
    pub eps_max: f64,
    pub delta_max: f64,
    pub cells: usize,
    pub winners: Vec<WinnerStats>,
    /// Share of cells won by the library's robust families.
    pub robust_family_fraction: f64,
    pub best_fidelity_min: f64,
    pub best_fidelity_max: f64,
}

impl PhaseDiagram {
    pub fn summary(&self) -> DiagramSummary {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for c in &self.cells {
            *counts.entry(c.winner).or_default() += 1;
        }
        let total = self.cells.len();
        let winners: Vec<WinnerStats> = counts
            .iter()
            .map(|(&i, &n)| WinnerStats {
                label: self.labels[i].clone(),
                cells: n,
                fraction: n as f64 / total as f64,
                robust_family: self.robust_family[i],
                duration: self.durations[i],
            })
            .collect();
        let robust: usize = winners.iter().filter(|w| w.robust_family).map(|w| w.cells).sum();
        DiagramSummary {
            gamma: self.gamma,
            grid_points: self.grid.points,
            eps_max: self.grid.eps_max,
            delta_max: self.grid.delta_max,
            cells: total,
            winners,
            robust_family_fraction: robust as f64 / total as f64,
            best_fidelity_min: self.cells.iter().map(|c| c.best).fold(f64::INFINITY, f64::min),
            best_fidelity_max: self.cells.iter().map(|c| c.best).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// CSV with columns `eps, delta, gamma, winner_label, best_F, F_<label>…`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header =
            vec!["eps".to_string(), "delta".into(), "gamma".into(), "winner_label".into(), "best_F".into()];
        header.extend(self.labels.iter().map(|l| format!("F_{l}")));
        w.write_record(&header).map_err(csv_err)?;
        for c in &self.cells {
            let mut row = vec![
                format!("{:.12e}", c.eps),
                format!("{:.12e}", c.delta),
                format!("{:.12e}", self.gamma),
                self.labels[c.winner].clone(),
                format!("{:.15}", c.best),
            ];
            row.extend(c.fidelities.iter().map(|f| format!("{f:.15}")));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.summary()).map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::catalog::suite;
    use crate::sequences::ControlScheme;

    fn small_pc() -> Vec<Competitor> {
        suite(ControlScheme::PC).into_iter().filter(|c| ["Basic", "UP1", "SCORE1*", "BB1"].contains(&c.label)).collect()
    }

    #[test]
    fn basic_wins_at_the_origin() {
        let d = phase_diagram(&small_pc(), Grid { eps_max: 0.1, delta_max: 0.1, points: 3 }, SweepSettings::new(1e-4))
            .unwrap();
        assert_eq!(d.cells.len(), 9);
        assert_eq!(d.labels[d.cells[0].winner], "Basic");
        for c in &d.cells {
            assert!(c.fidelities.iter().all(|&f| f <= c.best && (0.5..=1.0).contains(&f)));
        }
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("eps,delta,gamma,winner_label,best_F,F_Basic,F_UP1,"));
        assert_eq!(text.lines().count(), 10);
        let s = d.summary();
        assert_eq!(s.winners.iter().map(|w| w.cells).sum::<usize>(), 9);
    }

    #[test]
    fn averaging_is_even_in_both_errors() {
        let prepared = PreparedCompetitor::new(&small_pc()[1], DEFAULT_Z_SLOWDOWN).unwrap();
        let s = SweepSettings::new(2e-5);
        let a = prepared.averaged_fidelity(0.04, 0.07, &s);
        assert_eq!(a, prepared.averaged_fidelity(-0.04, 0.07, &s));
        assert_eq!(a, prepared.averaged_fidelity(0.04, -0.07, &s));
    }

    #[test]
    fn ties_go_to_the_shorter_then_the_label() {
        let labels = vec!["b".to_string(), "a".to_string(), "c".to_string()];
        assert_eq!(pick_winner(&[0.9, 0.9, 0.9], &[2.0, 2.0, 1.0], &labels), 2);
        assert_eq!(pick_winner(&[0.9, 0.9, 0.8], &[2.0, 2.0, 1.0], &labels), 1);
        assert_eq!(pick_winner(&[0.9, 0.95, 0.8], &[1.0, 2.0, 1.0], &labels), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(phase_diagram(&[], Grid::default(), SweepSettings::new(0.0)).is_err());
        assert!(phase_diagram(&small_pc(), Grid { points: 1, ..Grid::default() }, SweepSettings::new(0.0)).is_err());
    }
}
