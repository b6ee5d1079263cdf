//! Detection of entanglement-transfer and W-state events, and parameter sweeps.
//!
//! Events are bracketed on a coarse time grid and refined by bisection on
//! purely numeric quantities: the population of the last rung for transfers
//! (its time derivative i⟨[H, N₃₄]⟩ changes sign at a maximum) and the
//! population imbalance between the two rungs for W states. The closed-form
//! times are attached afterwards as predictions.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, PairClass, SpectralParams};
use crate::dynamics::{one_particle_amplitudes, Propagator, DEFAULT_LEAKAGE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::measures::{pair_concurrence, total_spin_expectation, two_point_correlation};
use crate::model::{build_hamiltonian, initial_state, spin_operator, CouplingGraph, ModelParams};
use crate::state::{all_pairs, Axis, QuantumState, Site, DIM};

pub const DEFAULT_COARSE_DT: f64 = 0.01;
pub const REFINE_WIDTH: f64 = 1e-13;
const MAX_BISECTIONS: usize = 200;
/// Detections closer than this are the same event.
pub const MERGE_WINDOW: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Transfer,
    WState,
}

impl EventKind {
    pub fn label(self) -> &'static str {
        match self {
            EventKind::Transfer => "transfer",
            EventKind::WState => "w_state",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub kind: EventKind,
    pub n: u32,
    pub t_detected: f64,
    pub t_predicted: f64,
    /// Worst violation of the defining condition at `t_detected`.
    pub residual: f64,
    /// Phase-maximized W fidelity, for W events.
    pub fidelity: Option<f64>,
}

impl EventRecord {
    pub fn timing_error(&self) -> f64 {
        (self.t_detected - self.t_predicted).abs()
    }
}

fn number_operator(sites: [usize; 2]) -> ComplexMatrix {
    // n = Sᶻ + ½
    let mut n = ComplexMatrix::zeros(DIM, DIM);
    for s in sites {
        let site = Site::new(s).expect("literal site");
        n = &n + &spin_operator(site, Axis::Z);
        n = &n + &ComplexMatrix::identity(DIM).scale(C64::new(0.5, 0.0));
    }
    n
}

fn expect(psi: &QuantumState, m: &ComplexMatrix) -> f64 {
    crate::dynamics::expectation(psi, m)
}

/// Evolved trajectory of the ladder for one D, with the operators event refinement needs.
pub struct Trajectory {
    pub d: f64,
    prop: Propagator,
    n12: ComplexMatrix,
    n34: ComplexMatrix,
    /// i[H, N₃₄], the rate of change of the last-rung population.
    dn34: ComplexMatrix,
}

impl Trajectory {
    pub fn new(d: f64, graph: &CouplingGraph) -> Result<Self> {
        let h = build_hamiltonian(&ModelParams::new(d)?, graph)?;
        let prop = Propagator::new(&h, &initial_state())?;
        let n12 = number_operator([1, 2]);
        let n34 = number_operator([3, 4]);
        let dn34 = h.commutator(&n34).scale(C64::new(0.0, 1.0));
        Ok(Trajectory { d, prop, n12, n34, dn34 })
    }

    pub fn ladder(d: f64) -> Result<Self> {
        Self::new(d, &CouplingGraph::ladder())
    }

    pub fn propagator(&self) -> &Propagator {
        &self.prop
    }

    pub fn state(&self, t: f64) -> QuantumState {
        self.prop.evolve(t)
    }

    fn last_rung_population(&self, t: f64) -> f64 {
        expect(&self.state(t), &self.n34)
    }

    fn last_rung_rate(&self, t: f64) -> f64 {
        expect(&self.state(t), &self.dn34)
    }

    fn rung_imbalance(&self, t: f64) -> f64 {
        let psi = self.state(t);
        expect(&psi, &self.n12) - expect(&psi, &self.n34)
    }

    /// Max of 1 − C₃₄, C₁₂ and the four leg-class concurrences.
    pub fn transfer_residual(&self, t: f64) -> Result<f64> {
        let psi = self.state(t);
        let mut worst = 1.0 - pair_concurrence(&psi, 3, 4)?;
        for (p, q) in all_pairs() {
            if (p.index(), q.index()) != (3, 4) {
                worst = worst.max(pair_concurrence(&psi, p.index(), q.index())?);
            }
        }
        Ok(worst)
    }

    /// Max |C − ½| over all six pairs, and the W fidelity.
    pub fn w_residual(&self, t: f64) -> Result<(f64, f64)> {
        let psi = self.state(t);
        let mut worst = 0.0f64;
        for (p, q) in all_pairs() {
            worst = worst.max((pair_concurrence(&psi, p.index(), q.index())? - 0.5).abs());
        }
        let fidelity = one_particle_amplitudes(&psi, DEFAULT_LEAKAGE_TOL)?.w_fidelity();
        Ok((worst, fidelity))
    }
}

/// Bisects `f` on [lo, hi] given f(lo) and f(hi) of opposite sign (or zero).
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= REFINE_WIDTH {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_scan(d: f64, t_max: f64, coarse_dt: f64) -> Result<SpectralParams> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::validation(format!("t_max = {t_max} must be positive")));
    }
    if !(coarse_dt > 0.0 && coarse_dt.is_finite()) {
        return Err(Error::validation(format!("coarse dt = {coarse_dt} must be positive")));
    }
    SpectralParams::new(d)
}

fn merge_duplicates(mut events: Vec<EventRecord>) -> Vec<EventRecord> {
    events.sort_by(|a, b| a.t_detected.total_cmp(&b.t_detected));
    let mut out: Vec<EventRecord> = Vec::with_capacity(events.len());
    for e in events {
        match out.last_mut() {
            Some(prev) if (e.t_detected - prev.t_detected).abs() < MERGE_WINDOW => {
                if e.residual < prev.residual {
                    *prev = e;
                }
            }
            _ => out.push(e),
        }
    }
    out
}

fn grid(t_max: f64, dt: f64) -> Vec<f64> {
    let steps = (t_max / dt + 1e-9).floor() as usize;
    (0..=steps).map(|k| k as f64 * dt).collect()
}

impl Trajectory {
    pub fn find_transfer_events(&self, t_max: f64, coarse_dt: f64, tol: f64) -> Result<Vec<EventRecord>> {
        let sp = check_scan(self.d, t_max, coarse_dt)?;
        let ts = grid(t_max, coarse_dt);
        let pop: Vec<f64> = ts.iter().map(|&t| self.last_rung_population(t)).collect();
        let mut events = Vec::new();
        for k in 1..ts.len().saturating_sub(1) {
            if !(pop[k] > pop[k - 1] && pop[k] >= pop[k + 1]) {
                continue;
            }
            let t = bisect(|t| self.last_rung_rate(t), ts[k - 1], ts[k + 1]);
            let residual = self.transfer_residual(t)?;
            if residual > tol {
                continue;
            }
            let n = ((t * (sp.mu + sp.nu) / (2.0 * std::f64::consts::PI) - 1.0) / 2.0)
                .round()
                .max(0.0) as u32;
            events.push(EventRecord {
                kind: EventKind::Transfer,
                n,
                t_detected: t,
                t_predicted: analytic::transfer_time(self.d, n)?,
                residual,
                fidelity: None,
            });
        }
        Ok(merge_duplicates(events))
    }

    pub fn find_w_events(&self, t_max: f64, coarse_dt: f64, tol: f64) -> Result<Vec<EventRecord>> {
        let sp = check_scan(self.d, t_max, coarse_dt)?;
        let ts = grid(t_max, coarse_dt);
        let g: Vec<f64> = ts.iter().map(|&t| self.rung_imbalance(t)).collect();
        let mut events = Vec::new();
        for k in 0..ts.len().saturating_sub(1) {
            let crosses = (g[k] > 0.0) != (g[k + 1] > 0.0) || g[k] == 0.0;
            if !crosses {
                continue;
            }
            let t = bisect(|t| self.rung_imbalance(t), ts[k], ts[k + 1]);
            let (residual, fidelity) = self.w_residual(t)?;
            if residual > tol || fidelity < 1.0 - tol {
                continue;
            }
            let n = ((t * (sp.mu + sp.nu) / std::f64::consts::PI - 1.0) / 2.0)
                .round()
                .max(0.0) as u32;
            events.push(EventRecord {
                kind: EventKind::WState,
                n,
                t_detected: t,
                t_predicted: analytic::w_time(self.d, n)?,
                residual,
                fidelity: Some(fidelity),
            });
        }
        Ok(merge_duplicates(events))
    }
}

pub fn find_transfer_events(d: f64, t_max: f64, coarse_dt: f64, tol: f64) -> Result<Vec<EventRecord>> {
    Trajectory::ladder(d)?.find_transfer_events(t_max, coarse_dt, tol)
}

pub fn find_w_events(d: f64, t_max: f64, coarse_dt: f64, tol: f64) -> Result<Vec<EventRecord>> {
    Trajectory::ladder(d)?.find_w_events(t_max, coarse_dt, tol)
}

/// One (D, t) sample of the observables behind the entanglement surfaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: f64,
    pub t: f64,
    pub c_first: f64,
    pub c_last: f64,
    pub c_leg: f64,
    /// [xx, yy, zz] for the pair (1,2).
    pub chi_first: [f64; 3],
    /// [xx, yy, zz] for the pair (3,4).
    pub chi_last: [f64; 3],
    /// [xx, yy, zz] for the pair (1,3).
    pub chi_leg: [f64; 3],
    pub s_tot_z: f64,
}

pub fn sweep_row(d: f64, t: f64, psi: &QuantumState) -> Result<SweepRow> {
    let chi = |pc: PairClass| -> Result<[f64; 3]> {
        let (p, q) = pc.representative();
        let mut out = [0.0; 3];
        for (slot, axis) in out.iter_mut().zip(Axis::ALL) {
            *slot = two_point_correlation(psi, p, q, axis, axis)?;
        }
        Ok(out)
    };
    Ok(SweepRow {
        d,
        t,
        c_first: pair_concurrence(psi, 1, 2)?,
        c_last: pair_concurrence(psi, 3, 4)?,
        c_leg: pair_concurrence(psi, 1, 3)?,
        chi_first: chi(PairClass::FirstRung)?,
        chi_last: chi(PairClass::LastRung)?,
        chi_leg: chi(PairClass::Leg)?,
        s_tot_z: total_spin_expectation(psi, Axis::Z),
    })
}

/// Drops repeated D values (keeping first occurrences) and logs a warning if any were found.
pub fn dedup_d_grid(d_grid: &[f64]) -> Vec<f64> {
    let mut seen = HashSet::new();
    let out: Vec<f64> = d_grid
        .iter()
        .copied()
        .filter(|d| seen.insert(d.to_bits()))
        .collect();
    if out.len() != d_grid.len() {
        log::warn!(
            "D grid contained {} duplicate value(s); they were removed",
            d_grid.len() - out.len()
        );
    }
    out
}

pub fn sweep(d_grid: &[f64], t_grid: &[f64]) -> Result<Vec<SweepRow>> {
    if d_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::validation("sweep grids must be non-empty"));
    }
    if let Some(bad) = d_grid.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(Error::validation(format!("sweep D = {bad} must be positive")));
    }
    let ds = dedup_d_grid(d_grid);
    let blocks: Vec<Vec<SweepRow>> = ds
        .par_iter()
        .map(|&d| {
            let traj = Trajectory::ladder(d)?;
            t_grid
                .iter()
                .map(|&t| sweep_row(d, t, &traj.state(t)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

/// Closed-form W times t_w(D, n) on a D grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WTimeCurves {
    pub d: Vec<f64>,
    /// curves[n][i] = t_w(d[i], n).
    pub curves: Vec<Vec<f64>>,
}

impl WTimeCurves {
    /// Each curve strictly decreasing along an ascending D grid.
    pub fn curves_decreasing(&self) -> bool {
        self.curves
            .iter()
            .all(|c| c.windows(2).all(|w| w[1] < w[0]))
    }

    /// t_w(D, n) < t_w(D, n+1) at every D.
    pub fn curves_ordered(&self) -> bool {
        self.curves
            .windows(2)
            .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| a < b))
    }
}

pub fn w_time_curves(d_grid: &[f64], n_max: u32) -> Result<WTimeCurves> {
    if d_grid.is_empty() {
        return Err(Error::validation("D grid must be non-empty"));
    }
    let curves = (0..=n_max)
        .map(|n| d_grid.iter().map(|&d| analytic::w_time(d, n)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(WTimeCurves {
        d: d_grid.to_vec(),
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn transfer_events_at_unit_d() {
        let ev = find_transfer_events(1.0, 10.0, DEFAULT_COARSE_DT, 1e-9).unwrap();
        assert_eq!(ev.len(), 2);
        assert!((ev[0].t_detected - PI / SQRT_2).abs() < 1e-9);
        assert!((ev[1].t_detected - 3.0 * PI / SQRT_2).abs() < 1e-9);
        assert_eq!((ev[0].n, ev[1].n), (0, 1));
        assert!(ev.iter().all(|e| e.residual <= 1e-9));
    }

    #[test]
    fn w_events_at_unit_d() {
        let ev = find_w_events(1.0, 10.0, DEFAULT_COARSE_DT, 1e-9).unwrap();
        assert!(!ev.is_empty());
        assert!((ev[0].t_detected - PI / (2.0 * SQRT_2)).abs() < 1e-9);
        for e in &ev {
            assert!(e.residual <= 1e-9);
            assert!(e.fidelity.unwrap() >= 1.0 - 1e-9);
            assert!(e.timing_error() < 1e-8);
        }
    }

    #[test]
    fn empty_when_horizon_too_short() {
        let ev = find_transfer_events(1.0, 1.0, DEFAULT_COARSE_DT, 1e-9).unwrap();
        assert!(ev.is_empty());
        assert!(find_transfer_events(0.0, 1.0, DEFAULT_COARSE_DT, 1e-9).is_err());
        assert!(find_w_events(1.0, -1.0, DEFAULT_COARSE_DT, 1e-9).is_err());
    }

    #[test]
    fn merge_keeps_smaller_residual() {
        let mk = |t: f64, r: f64| EventRecord {
            kind: EventKind::Transfer,
            n: 0,
            t_detected: t,
            t_predicted: 1.0,
            residual: r,
            fidelity: None,
        };
        let merged = merge_duplicates(vec![mk(1.0, 1e-10), mk(1.0 + 1e-8, 1e-12), mk(2.0, 0.0)]);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].residual, 1e-12);
    }

    #[test]
    fn degenerate_sweep_matches_measures() {
        let rows = sweep(&[0.5], &[0.0]).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert!((r.c_first - 1.0).abs() < 1e-12);
        assert!(r.c_last.abs() < 1e-12 && r.c_leg.abs() < 1e-12);
        assert!((r.s_tot_z + 1.0).abs() < 1e-12);
        let psi = Trajectory::ladder(0.5).unwrap().state(0.0);
        assert_eq!(r, &sweep_row(0.5, 0.0, &psi).unwrap());
    }

    #[test]
    fn sweep_ordering_and_dedup() {
        let rows = sweep(&[0.6, 1.2, 0.6], &[0.0, 0.5]).unwrap();
        let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.d, r.t)).collect();
        assert_eq!(keys, vec![(0.6, 0.0), (0.6, 0.5), (1.2, 0.0), (1.2, 0.5)]);
        assert!(sweep(&[], &[0.0]).is_err());
        assert!(sweep(&[0.0], &[0.0]).is_err());
    }

    #[test]
    fn w_curves_layout() {
        let ds: Vec<f64> = (1..=40).map(|k| k as f64 * 0.1).collect();
        let c = w_time_curves(&ds, 9).unwrap();
        assert_eq!(c.curves.len(), 10);
        assert!(c.curves_decreasing() && c.curves_ordered());
        let i = 9; // d = 1.0
        for n in 0..10 {
            let expect = (2 * n + 1) as f64 * PI / (2.0 * SQRT_2);
            assert!((c.curves[n][i] - expect).abs() < 1e-12);
        }
    }
}
