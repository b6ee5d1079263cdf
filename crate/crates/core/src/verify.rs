//! Full invariant and oracle suite over a (D, t) grid.
//!
//! Every numeric observable is compared with an independent closed-form route.
//! Checks decide the exit status; audits are informational measurements of
//! claims that the numerics contradict (they are reported, not enforced).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{self, PairClass, SpectralParams};
use crate::calibration::phase_fitted_distance;
use crate::detect::{EventKind, EventRecord, Trajectory, DEFAULT_COARSE_DT};
use crate::dynamics::{expectation, one_particle_amplitudes, sector_leakage, time_grid, DEFAULT_LEAKAGE_TOL};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eig;
use crate::measures::{concurrence_one_particle, pair_concurrence, total_spin_expectation, two_point_correlation};
use crate::model::{build_hamiltonian, one_particle_block, sz_total_commutator, CouplingGraph, ModelParams};
use crate::state::{all_pairs, Axis};

pub const STANDARD_D: [f64; 5] = [0.2, 0.6, 1.0, 1.5, 2.0];

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub graph: CouplingGraph,
    pub d_values: Vec<f64>,
    pub t_max: f64,
    pub dt: f64,
    /// Tolerance for concurrence, correlation and event-condition checks.
    pub tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            graph: CouplingGraph::ladder(),
            d_values: STANDARD_D.to_vec(),
            t_max: 30.0,
            dt: 0.01,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub worst: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Audit {
    pub name: String,
    pub value: f64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub d_values: Vec<f64>,
    pub t_max: f64,
    pub dt: f64,
    pub checks: Vec<Check>,
    pub audits: Vec<Audit>,
    pub sector_leakage: f64,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let ds: Vec<String> = self.d_values.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(
            out,
            "laddyn verify: D = {{{}}}, t in [0, {}] step {}",
            ds.join(", "),
            self.t_max,
            self.dt
        );
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(
                out,
                "[{}] {:width$}  worst {:.3e}  (limit {:.0e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.worst,
                c.threshold,
            );
        }
        let _ = writeln!(out, "sector leakage: {:.3e}", self.sector_leakage);
        let _ = writeln!(out, "informational:");
        for a in &self.audits {
            let _ = writeln!(out, "  {}: {:.6e}  ({})", a.name, a.value, a.note);
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "summary: {passed}/{} checks passed", self.checks.len());
        out
    }
}

/// Running maxima keyed by metric name.
#[derive(Debug, Default, Clone)]
struct Worst(BTreeMap<&'static str, f64>);

impl Worst {
    fn note(&mut self, key: &'static str, value: f64) {
        let v = if value.is_nan() { f64::INFINITY } else { value };
        let e = self.0.entry(key).or_insert(0.0);
        *e = e.max(v);
    }

    fn merge(mut self, other: Worst) -> Worst {
        for (k, v) in other.0 {
            self.note(k, v);
        }
        self
    }

    fn get(&self, key: &str) -> f64 {
        self.0.get(key).copied().unwrap_or(0.0)
    }
}

const K_HERM: &str = "hamiltonian hermitian";
const K_SPEC: &str = "one-particle spectrum vs ±mu/2, ±nu/2";
const K_SPEC_ID: &str = "sector identities mu*nu = D^2, mu^2+nu^2 = 4+2D^2";
const K_NORM: &str = "state norm";
const K_LEAK: &str = "sector leakage";
const K_ENERGY: &str = "energy conservation";
const K_SYM: &str = "amplitude symmetry b1=b2, b3=b4";
const K_AMP: &str = "amplitudes vs closed form (phase fitted)";
const K_CONC: &str = "concurrence vs closed form, all pairs";
const K_SHORT: &str = "Wootters vs 2|b_p b_q|";
const K_COMPL: &str = "C12 + C34 = 1";
const K_TABLE: &str = "rung correlations and leg zz vs closed form";
const K_AMPCORR: &str = "all correlations vs amplitude closed form";
const K_SZ: &str = "<S^z_tot> = -1";
const K_SXY: &str = "<S^x_tot>, <S^y_tot> = 0";
const K_TR_TIME: &str = "transfer events: detected vs predicted";
const K_TR_MISS: &str = "transfer events: missed predictions";
const K_W_TIME: &str = "W events: detected vs predicted";
const K_W_MISS: &str = "W events: missed predictions";
const K_W_FID: &str = "W events: 1 - fidelity";
const K_INTERLEAVE: &str = "two W events between consecutive transfers, t_w(n) = t_tr(n)/2";
const K_W_ZZ: &str = "W events: |zz| all pairs";
const K_W_XX: &str = "W events: rung |xx| = |yy| = 1/8";
const K_TR_ZZ: &str = "transfer events: zz34 = -1/4, zz12 = +1/4";
const K_ALG: &str = "algebraic identities, 100 D in (0,4]";
const K_CURVES: &str = "W-time curves monotone and ordered";

const A_LEG_XX: &str = "leg xx/yy vs tabulated 1/8 sin((mu+nu)t/2), max deviation";
const A_CROSS: &str = "cross-axis correlations, max |chi^ab|";
const A_W_LEG_XX: &str = "W events: max ||leg xx| - 1/8|";
const A_ONE_W: &str = "transfer intervals with exactly one W event";

fn collect_grid(cfg: &VerifyConfig, d: f64) -> Result<Worst> {
    let mut w = Worst::default();
    let h = build_hamiltonian(&ModelParams::new(d)?, &cfg.graph)?;
    w.note(K_HERM, h.max_abs_diff(&h.adjoint()));

    let sp = SpectralParams::new(d)?;
    let block = hermitian_eig(&one_particle_block(&h))?;
    let e = &block.eigenvalues;
    let expect = [-sp.mu / 2.0, -sp.nu / 2.0, sp.nu / 2.0, sp.mu / 2.0];
    for (a, b) in e.iter().zip(expect) {
        w.note(K_SPEC, (a - b).abs());
    }
    let (mu_n, nu_n) = (e[3] - e[0], e[2] - e[1]);
    w.note(K_SPEC_ID, (mu_n * nu_n - d * d).abs());
    w.note(K_SPEC_ID, (mu_n * mu_n + nu_n * nu_n - 4.0 - 2.0 * d * d).abs());

    let traj = Trajectory::new(d, &cfg.graph)?;
    let e0 = traj.propagator().energy();
    let pairs = all_pairs();

    for t in time_grid(0.0, cfg.t_max, cfg.dt)? {
        let psi = traj.state(t);
        w.note(K_NORM, (psi.norm() - 1.0).abs());
        w.note(K_LEAK, sector_leakage(&psi));
        w.note(K_ENERGY, (expectation(&psi, &h) - e0).abs());

        let b = one_particle_amplitudes(&psi, DEFAULT_LEAKAGE_TOL)?;
        w.note(K_SYM, (b.b[0] - b.b[1]).norm().max((b.b[2] - b.b[3]).norm()));
        let closed = analytic::amplitudes(t, d)?;
        w.note(K_AMP, phase_fitted_distance(&b, &closed));

        let mut conc = BTreeMap::new();
        for &(p, q) in &pairs {
            let (pi, qi) = (p.index(), q.index());
            let pc = PairClass::of(p, q)?;
            let c = pair_concurrence(&psi, pi, qi)?;
            conc.insert((pi, qi), c);
            w.note(K_CONC, (c - analytic::concurrence_formula(pc, t, d)?).abs());
            w.note(K_SHORT, (c - concurrence_one_particle(&b, pi, qi)?).abs());

            for alpha in Axis::ALL {
                for beta in Axis::ALL {
                    let chi = two_point_correlation(&psi, pi, qi, alpha, beta)?;
                    w.note(K_AMPCORR, (chi - analytic::correlation_from_amplitudes(p, q, alpha, beta, t, d)?).abs());
                    if alpha != beta {
                        w.note(A_CROSS, chi.abs());
                        continue;
                    }
                    let tab = analytic::correlation_formula(pc, alpha, t, d)?;
                    if pc == PairClass::Leg && alpha != Axis::Z {
                        w.note(A_LEG_XX, (chi - tab).abs());
                    } else {
                        w.note(K_TABLE, (chi - tab).abs());
                    }
                }
            }
        }
        w.note(K_COMPL, (conc[&(1, 2)] + conc[&(3, 4)] - 1.0).abs());
        w.note(K_SZ, (total_spin_expectation(&psi, Axis::Z) + 1.0).abs());
        w.note(K_SXY, total_spin_expectation(&psi, Axis::X).abs());
        w.note(K_SXY, total_spin_expectation(&psi, Axis::Y).abs());
    }

    collect_events(cfg, d, &traj, &mut w)?;
    Ok(w)
}

fn missed(events: &[EventRecord], predicted: impl Iterator<Item = f64>) -> f64 {
    predicted
        .filter(|t| !events.iter().any(|e| (e.t_detected - t).abs() < 1e-6))
        .count() as f64
}

fn collect_events(cfg: &VerifyConfig, d: f64, traj: &Trajectory, w: &mut Worst) -> Result<()> {
    let tol = cfg.tolerance;
    let transfers = traj.find_transfer_events(cfg.t_max, DEFAULT_COARSE_DT, tol)?;
    let ws = traj.find_w_events(cfg.t_max, DEFAULT_COARSE_DT, tol)?;
    // predictions strictly inside the scan window, where a bracket always exists
    let inside = |t: &f64| *t > DEFAULT_COARSE_DT && *t < cfg.t_max - DEFAULT_COARSE_DT;
    let predicted = |f: fn(f64, u32) -> Result<f64>| -> Result<Vec<f64>> {
        let mut out = Vec::new();
        let mut n = 0;
        loop {
            let t = f(d, n)?;
            if t > cfg.t_max {
                return Ok(out);
            }
            out.push(t);
            n += 1;
        }
    };
    let pred_tr = predicted(analytic::transfer_time)?;
    let pred_w = predicted(analytic::w_time)?;

    w.note(K_TR_MISS, missed(&transfers, pred_tr.iter().copied().filter(inside)));
    w.note(K_W_MISS, missed(&ws, pred_w.iter().copied().filter(inside)));

    for e in &transfers {
        w.note(K_TR_TIME, e.timing_error());
        let psi = traj.state(e.t_detected);
        w.note(K_TR_ZZ, (two_point_correlation(&psi, 3, 4, Axis::Z, Axis::Z)? + 0.25).abs());
        w.note(K_TR_ZZ, (two_point_correlation(&psi, 1, 2, Axis::Z, Axis::Z)? - 0.25).abs());
    }
    for e in &ws {
        w.note(K_W_TIME, e.timing_error());
        w.note(K_W_FID, 1.0 - e.fidelity.unwrap_or(0.0));
        let psi = traj.state(e.t_detected);
        for (p, q) in all_pairs() {
            let (pi, qi) = (p.index(), q.index());
            w.note(K_W_ZZ, two_point_correlation(&psi, pi, qi, Axis::Z, Axis::Z)?.abs());
            for axis in [Axis::X, Axis::Y] {
                let v = two_point_correlation(&psi, pi, qi, axis, axis)?.abs();
                if PairClass::of(p, q)? == PairClass::Leg {
                    w.note(A_W_LEG_XX, (v - 0.125).abs());
                } else {
                    w.note(K_W_XX, (v - 0.125).abs());
                }
            }
        }
    }

    let mut timeline: Vec<(f64, EventKind)> = transfers
        .iter()
        .chain(&ws)
        .map(|e| (e.t_detected, e.kind))
        .collect();
    timeline.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tr_idx: Vec<usize> = timeline
        .iter()
        .enumerate()
        .filter(|(_, e)| e.1 == EventKind::Transfer)
        .map(|(i, _)| i)
        .collect();
    // W states occur on the way out and on the way back, so each transfer
    // period holds two of them
    let mut bad = 0.0;
    let mut single = 0.0;
    for pair in tr_idx.windows(2) {
        let between = timeline[pair[0] + 1..pair[1]]
            .iter()
            .filter(|e| e.1 == EventKind::WState)
            .count();
        if between != 2 {
            bad += 1.0;
        }
        if between == 1 {
            single += 1.0;
        }
    }
    w.note(A_ONE_W, single);
    if transfers.is_empty() {
        bad += 1.0;
    }
    w.note(K_INTERLEAVE, bad);
    for e in &ws {
        let tr = analytic::transfer_time(d, e.n)?;
        w.note(K_INTERLEAVE, (e.t_predicted - tr / 2.0).abs());
    }
    Ok(())
}

/// μν = D², μ²+ν² = 4+2D², |η|²+|ξ|² = 4, η(0) = 2, ξ(0) = 0 on 100 points of (0, 4].
pub fn algebraic_identity_residual() -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 1..=100 {
        let d = 0.04 * k as f64;
        let sp = SpectralParams::new(d)?;
        worst = worst.max((sp.mu * sp.nu - d * d).abs());
        worst = worst.max((sp.mu * sp.mu + sp.nu * sp.nu - 4.0 - 2.0 * d * d).abs());
        let (eta0, xi0) = analytic::eta_xi(0.0, d)?;
        worst = worst.max((eta0 - 2.0).norm()).max(xi0.norm());
        for j in 0..=30 {
            let (eta, xi) = analytic::eta_xi(j as f64, d)?;
            worst = worst.max((eta.norm_sqr() + xi.norm_sqr() - 4.0).abs());
        }
    }
    Ok(worst)
}

/// 0 when every W-time curve is strictly decreasing in D, the curves are ordered
/// in n and t_w(D, n) = (2n+1)·t_w(D, 0); otherwise the number of violations.
pub fn w_curve_violations(n_max: u32) -> Result<f64> {
    let ds: Vec<f64> = (1..=40).map(|k| k as f64 / 10.0).collect();
    let curves = crate::detect::w_time_curves(&ds, n_max)?;
    let mut bad = 0.0;
    if !curves.curves_decreasing() {
        bad += 1.0;
    }
    if !curves.curves_ordered() {
        bad += 1.0;
    }
    for (n, curve) in curves.curves.iter().enumerate() {
        for (i, &t) in curve.iter().enumerate() {
            if t != (2 * n + 1) as f64 * curves.curves[0][i] {
                bad += 1.0;
            }
        }
    }
    Ok(bad)
}

pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.d_values.is_empty() {
        return Err(Error::validation("verify needs at least one D value"));
    }
    let worst = cfg
        .d_values
        .par_iter()
        .map(|&d| collect_grid(cfg, d))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(Worst::default(), Worst::merge);

    let tol = cfg.tolerance;
    let thresholds: [(&'static str, f64); 24] = [
        (K_HERM, 1e-14),
        (K_SPEC, 1e-10),
        (K_SPEC_ID, 1e-10),
        (K_NORM, 1e-12),
        (K_LEAK, 1e-12),
        (K_ENERGY, 1e-10),
        (K_SYM, 1e-10),
        (K_AMP, tol),
        (K_CONC, tol),
        (K_SHORT, tol),
        (K_COMPL, tol),
        (K_TABLE, tol),
        (K_AMPCORR, tol),
        (K_SZ, 1e-10),
        (K_SXY, 1e-10),
        (K_TR_TIME, 1e-8),
        (K_TR_MISS, 0.0),
        (K_W_TIME, 1e-8),
        (K_W_MISS, 0.0),
        (K_W_FID, tol),
        (K_INTERLEAVE, 1e-12),
        (K_W_ZZ, tol),
        (K_W_XX, tol),
        (K_TR_ZZ, tol),
    ];
    let mut checks: Vec<Check> = thresholds
        .iter()
        .map(|&(name, threshold)| {
            let v = worst.get(name);
            Check {
                name: name.to_string(),
                worst: v,
                threshold,
                passed: v <= threshold,
            }
        })
        .collect();
    let alg = algebraic_identity_residual()?;
    checks.push(Check {
        name: K_ALG.into(),
        worst: alg,
        threshold: 1e-10,
        passed: alg <= 1e-10,
    });
    let curves = w_curve_violations(9)?;
    checks.push(Check {
        name: K_CURVES.into(),
        worst: curves,
        threshold: 0.0,
        passed: curves == 0.0,
    });

    let commutator = cfg
        .d_values
        .iter()
        .map(|&d| Ok(sz_total_commutator(&build_hamiltonian(&ModelParams::new(d)?, &cfg.graph)?)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let audits = vec![
        Audit {
            name: "[H, S^z_tot] max entry".into(),
            value: commutator,
            note: if commutator < 1e-12 {
                "H conserves total magnetization".into()
            } else {
                "H does not conserve total magnetization".into()
            },
        },
        Audit {
            name: A_LEG_XX.into(),
            value: worst.get(A_LEG_XX),
            note: "numerics give -(D/omega)/8 sin((mu+nu)t/2) for the 1->3 leg orientation".into(),
        },
        Audit {
            name: A_CROSS.into(),
            value: worst.get(A_CROSS),
            note: "leg-class xy/yx correlations carry the remaining (1/omega)/8 sin((mu+nu)t/2)".into(),
        },
        Audit {
            name: A_W_LEG_XX.into(),
            value: worst.get(A_W_LEG_XX),
            note: "leg |xx| at W events equals D/(8 omega), not 1/8".into(),
        },
        Audit {
            name: A_ONE_W.into(),
            value: worst.get(A_ONE_W),
            note: "W times are odd multiples of pi/(mu+nu) and transfers odd multiples of twice that".into(),
        },
    ];
    Ok(VerifyReport {
        d_values: cfg.d_values.clone(),
        t_max: cfg.t_max,
        dt: cfg.dt,
        checks,
        audits,
        sector_leakage: worst.get(K_LEAK),
    })
}
