//! Fidelity metrics, suppression-order certification, the benchmark catalogue
//! and the phase-diagram sweep.

mod catalog;
mod diagram;
mod fidelity;
mod order;

pub use catalog::{
    default_property_table, ensemble_properties, find_competitor, property_table, published_properties, replace_pulses,
    replace_z_rotations, rz1_signed, suite, Competitor, EnsembleProperties, PublishedProperties,
};
pub use diagram::{
    evaluate_cell, phase_diagram, pick_winner, Cell, DiagramSummary, Grid, PhaseDiagram, PreparedCompetitor,
    SweepSettings, WinnerStats, TIE_TOL,
};
pub use fidelity::{
    avg_gate_fidelity, avg_gate_fidelity_for, fidelity_from_overlap, haar_mc_fidelity, FidelityParams, McEstimate,
};
pub use order::{fit_order, min_pulse_bound, suppression_order, ErrorAxis, OrderFit, INFIDELITY_FLOOR, SLOPE_WINDOW};
