//! Selection of the DM leg orientation.
//!
//! Reversing a leg flips the sign of its DM term. Phase-insensitive observables
//! cannot always tell the choices apart, so each candidate is evolved and its
//! one-particle amplitudes compared with the closed form η/(2√2), ξ/(2√2) at a
//! few probe times, allowing one global phase per probe.

use serde::Serialize;

use crate::analytic;
use crate::dynamics::{one_particle_amplitudes, OneParticleAmplitudes, Propagator, DEFAULT_LEAKAGE_TOL};
use crate::error::Result;
use crate::linalg::C64;
use crate::model::{build_hamiltonian, initial_state, CouplingGraph, ModelParams};

pub const PROBE_D: f64 = 0.6;
pub const PROBE_TIMES: [f64; 3] = [0.5, 1.0, 2.0];
pub const MATCH_TOL: f64 = 1e-8;

/// max_j |e^{iφ}·numeric_j − reference_j| with the best global phase φ.
pub fn phase_fitted_distance(numeric: &OneParticleAmplitudes, reference: &OneParticleAmplitudes) -> f64 {
    let overlap: C64 = numeric
        .b
        .iter()
        .zip(&reference.b)
        .map(|(n, r)| n.conj() * r)
        .sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    numeric
        .b
        .iter()
        .zip(&reference.b)
        .map(|(n, r)| (n * phase - r).norm())
        .fold(0.0, f64::max)
}

/// Worst phase-fitted amplitude mismatch of `graph` against the closed form.
pub fn amplitude_residual(graph: &CouplingGraph, d: f64, times: &[f64]) -> Result<f64> {
    let h = build_hamiltonian(&ModelParams::new(d)?, graph)?;
    let prop = Propagator::new(&h, &initial_state())?;
    let mut worst = 0.0f64;
    for &t in times {
        let numeric = one_particle_amplitudes(&prop.evolve(t), DEFAULT_LEAKAGE_TOL)?;
        let reference = analytic::amplitudes(t, d)?;
        worst = worst.max(phase_fitted_distance(&numeric, &reference));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub graph: CouplingGraph,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Calibration {
    pub candidates: Vec<Candidate>,
    /// Index into `candidates` of the best match.
    pub selected: usize,
}

impl Calibration {
    pub fn best(&self) -> &Candidate {
        &self.candidates[self.selected]
    }

    pub fn is_match(&self) -> bool {
        self.best().residual <= MATCH_TOL
    }
}

/// Tries the four leg orientations at the standard probe points.
pub fn calibrate_leg_orientation() -> Result<Calibration> {
    let mut candidates = Vec::with_capacity(4);
    for (f1, f2) in [(false, false), (false, true), (true, false), (true, true)] {
        let graph = CouplingGraph::ladder_with_orientation(f1, f2);
        let residual = amplitude_residual(&graph, PROBE_D, &PROBE_TIMES)?;
        candidates.push(Candidate { graph, residual });
    }
    let selected = candidates
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.residual.total_cmp(&b.1.residual))
        .map(|(i, _)| i)
        .expect("four candidates");
    Ok(Calibration { candidates, selected })
}
