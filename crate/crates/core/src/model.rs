//! Spin operators, ladder topology and the Hamiltonian.
//!
//! H = J·Σ_rungs (SˣᵢSˣⱼ + SʸᵢSʸⱼ) + D·Σ_legs (SˣᵢSʸⱼ − SʸᵢSˣⱼ)
//!
//! with S = ½σ and ħ = 1. Times are in units of ħ/J and D in units of J.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, C64};
use crate::state::{Axis, QuantumState, Site, DIM, N_SITES};

/// Coupling strengths. `j` is 1 in every reproduction run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub j: f64,
    pub d: f64,
}

impl ModelParams {
    pub fn new(d: f64) -> Result<Self> {
        Self::with_exchange(1.0, d)
    }

    pub fn with_exchange(j: f64, d: f64) -> Result<Self> {
        if !j.is_finite() {
            return Err(Error::validation(format!("exchange J = {j} is not finite")));
        }
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::validation(format!(
                "DM strength D = {d} must be finite and non-negative"
            )));
        }
        Ok(ModelParams { j, d })
    }
}

/// Unordered XX bond on a rung.
pub type RungBond = (Site, Site);

/// Ordered DM bond (from, to): contributes D·(S_from × S_to)_z.
pub type LegBond = (Site, Site);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingGraph {
    pub rung_bonds: Vec<RungBond>,
    pub leg_bonds: Vec<LegBond>,
}

fn s(i: usize) -> Site {
    Site::new(i).expect("literal site index")
}

fn unordered(a: Site, b: Site) -> (Site, Site) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CouplingGraph {
    /// The four-site ladder: rungs close a 4-cycle, legs run 1→3 and 2→4.
    ///
    /// The leg orientation is the one selected by
    /// [`crate::calibration::calibrate_leg_orientation`].
    pub fn ladder() -> Self {
        CouplingGraph {
            rung_bonds: vec![(s(1), s(2)), (s(2), s(3)), (s(3), s(4)), (s(4), s(1))],
            leg_bonds: vec![(s(1), s(3)), (s(2), s(4))],
        }
    }

    /// Ladder with each leg reversed when the matching flag is set.
    pub fn ladder_with_orientation(flip_first: bool, flip_second: bool) -> Self {
        let mut g = Self::ladder();
        for (bond, flip) in g.leg_bonds.iter_mut().zip([flip_first, flip_second]) {
            if flip {
                *bond = (bond.1, bond.0);
            }
        }
        g
    }

    pub fn new(rung_bonds: Vec<RungBond>, leg_bonds: Vec<LegBond>) -> Result<Self> {
        let g = CouplingGraph {
            rung_bonds,
            leg_bonds,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (kind, &(a, b)) in self
            .rung_bonds
            .iter()
            .map(|b| ("rung", b))
            .chain(self.leg_bonds.iter().map(|b| ("leg", b)))
        {
            if a == b {
                return Err(Error::validation(format!("{kind} bond ({a},{b}) is a self-bond")));
            }
            if !seen.insert(unordered(a, b)) {
                return Err(Error::validation(format!(
                    "bond ({a},{b}) appears more than once across rung and leg sets"
                )));
            }
        }
        Ok(())
    }

    /// Parses a topology file: lines `rung i j` or `leg i j`, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rungs = Vec::new();
        let mut legs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::validation(format!("topology line {}: '{raw}'", lineno + 1));
            if fields.len() != 3 {
                return Err(bad());
            }
            let a = Site::new(fields[1].parse().map_err(|_| bad())?)?;
            let b = Site::new(fields[2].parse().map_err(|_| bad())?)?;
            match fields[0] {
                "rung" => rungs.push((a, b)),
                "leg" => legs.push((a, b)),
                _ => return Err(bad()),
            }
        }
        Self::new(rungs, legs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.rung_bonds {
            out.push_str(&format!("rung {a} {b}\n"));
        }
        for (a, b) in &self.leg_bonds {
            out.push_str(&format!("leg {a} {b}\n"));
        }
        out
    }
}

fn local_spin(axis: Axis) -> ComplexMatrix {
    // local basis ordered (|0⟩ = ↓, |1⟩ = ↑) to match the bit layout
    let h = 0.5;
    match axis {
        Axis::X => ComplexMatrix::from_real_rows(&[[0.0, h], [h, 0.0]]),
        Axis::Y => ComplexMatrix::from_rows(&[
            [C64::new(0.0, 0.0), C64::new(0.0, h)],
            [C64::new(0.0, -h), C64::new(0.0, 0.0)],
        ]),
        Axis::Z => ComplexMatrix::from_real_rows(&[[-h, 0.0], [0.0, h]]),
    }
}

/// Ŝ^axis at `site`, embedded in the 16-dimensional space.
pub fn spin_operator(site: Site, axis: Axis) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let local = local_spin(axis);
    (1..=N_SITES).fold(ComplexMatrix::identity(1), |acc, k| {
        kron(&acc, if k == site.index() { &local } else { &id })
    })
}

/// Index-checked variant of [`spin_operator`].
pub fn spin_operator_at(site: usize, axis: Axis) -> Result<ComplexMatrix> {
    Ok(spin_operator(Site::new(site)?, axis))
}

pub fn total_spin_operator(axis: Axis) -> ComplexMatrix {
    Site::all().fold(ComplexMatrix::zeros(DIM, DIM), |acc, s| {
        &acc + &spin_operator(s, axis)
    })
}

pub fn build_hamiltonian(params: &ModelParams, graph: &CouplingGraph) -> Result<ComplexMatrix> {
    graph.validate()?;
    let mut h = ComplexMatrix::zeros(DIM, DIM);
    let j = C64::new(params.j, 0.0);
    let d = C64::new(params.d, 0.0);
    for &(a, b) in &graph.rung_bonds {
        let xx = &spin_operator(a, Axis::X) * &spin_operator(b, Axis::X);
        let yy = &spin_operator(a, Axis::Y) * &spin_operator(b, Axis::Y);
        h = &h + &(&xx + &yy).scale(j);
    }
    for &(a, b) in &graph.leg_bonds {
        let xy = &spin_operator(a, Axis::X) * &spin_operator(b, Axis::Y);
        let yx = &spin_operator(a, Axis::Y) * &spin_operator(b, Axis::X);
        h = &h + &(&xy - &yx).scale(d);
    }
    Ok(h)
}

/// Basis indices of |1000⟩, |0100⟩, |0010⟩, |0001⟩ in site order.
pub fn one_particle_indices() -> [usize; N_SITES] {
    let mut out = [0; N_SITES];
    for (slot, site) in out.iter_mut().zip(Site::all()) {
        *slot = site.mask();
    }
    out
}

/// Restriction of H to the single-excitation subspace, in site order.
pub fn one_particle_hamiltonian(params: &ModelParams, graph: &CouplingGraph) -> Result<ComplexMatrix> {
    let h = build_hamiltonian(params, graph)?;
    Ok(one_particle_block(&h))
}

pub fn one_particle_block(h: &ComplexMatrix) -> ComplexMatrix {
    let idx = one_particle_indices();
    let mut out = ComplexMatrix::zeros(N_SITES, N_SITES);
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            out[(r, c)] = h[(i, j)];
        }
    }
    out
}

/// (|1000⟩ + |0100⟩)/√2: a Bell pair on the first rung, |00⟩ on the last.
pub fn initial_state() -> QuantumState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = [C64::new(0.0, 0.0); DIM];
    amps[0b1000] = C64::new(h, 0.0);
    amps[0b0100] = C64::new(h, 0.0);
    QuantumState::new(amps).expect("normalized by construction")
}

/// Largest entry of [H, Ŝᶻ_tot].
pub fn sz_total_commutator(h: &ComplexMatrix) -> f64 {
    h.commutator(&total_spin_operator(Axis::Z)).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eig;

    #[test]
    fn spin_z_traceless_and_eigen() {
        let sz1 = spin_operator(s(1), Axis::Z);
        assert_eq!(sz1.trace(), C64::new(0.0, 0.0));
        let psi = QuantumState::basis("1000").unwrap();
        let out = sz1.mat_vec(psi.amplitudes());
        assert_eq!(out[0b1000], C64::new(0.5, 0.0));
    }

    #[test]
    fn spin_algebra() {
        let sx = spin_operator(s(2), Axis::X);
        let sy = spin_operator(s(2), Axis::Y);
        let sz = spin_operator(s(2), Axis::Z);
        let lhs = sx.commutator(&sy);
        let rhs = sz.scale(C64::new(0.0, 1.0));
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn spin_operators_hermitian_with_half_spectrum() {
        for site in Site::all() {
            for axis in Axis::ALL {
                let op = spin_operator(site, axis);
                let e = hermitian_eig(&op).unwrap();
                let neg = e.eigenvalues.iter().filter(|&&l| (l + 0.5).abs() < 1e-12).count();
                let pos = e.eigenvalues.iter().filter(|&&l| (l - 0.5).abs() < 1e-12).count();
                assert_eq!((neg, pos), (8, 8));
            }
        }
        assert!(spin_operator_at(0, Axis::X).is_err());
    }

    #[test]
    fn matrix_operator_matches_bit_action() {
        let mut amps = [C64::new(0.0, 0.0); DIM];
        for (i, a) in amps.iter_mut().enumerate() {
            *a = C64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.05);
        }
        for site in Site::all() {
            for axis in Axis::ALL {
                let m = spin_operator(site, axis).mat_vec(&amps);
                let b = crate::state::apply_spin(site, axis, &amps);
                for (x, y) in m.iter().zip(b.iter()) {
                    assert!((x - y).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn xx_hopping_element() {
        let h = build_hamiltonian(&ModelParams::new(0.0).unwrap(), &CouplingGraph::ladder()).unwrap();
        assert!((h[(0b1000, 0b0100)] - C64::new(0.5, 0.0)).norm() < 1e-15);
        for d in [0.0, 0.6, 3.0] {
            let h = build_hamiltonian(&ModelParams::new(d).unwrap(), &CouplingGraph::ladder()).unwrap();
            assert_eq!(h[(0, 0)], C64::new(0.0, 0.0));
            assert!(h.is_hermitian(1e-14));
        }
    }

    #[test]
    fn one_particle_block_at_zero_d() {
        let h1 = one_particle_hamiltonian(&ModelParams::new(0.0).unwrap(), &CouplingGraph::ladder())
            .unwrap();
        let ring = ComplexMatrix::from_real_rows(&[
            [0.0, 0.5, 0.0, 0.5],
            [0.5, 0.0, 0.5, 0.0],
            [0.0, 0.5, 0.0, 0.5],
            [0.5, 0.0, 0.5, 0.0],
        ]);
        assert!(h1.max_abs_diff(&ring) < 1e-15);
        assert_eq!(h1.trace(), C64::new(0.0, 0.0));
    }

    #[test]
    fn one_particle_spectrum_at_unit_d() {
        let h1 = one_particle_hamiltonian(&ModelParams::new(1.0).unwrap(), &CouplingGraph::ladder())
            .unwrap();
        let e = hermitian_eig(&h1).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        let expect = [-(r2 + 1.0) / 2.0, -(r2 - 1.0) / 2.0, (r2 - 1.0) / 2.0, (r2 + 1.0) / 2.0];
        for (a, b) in e.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        // spectrum of the block is contained in the full spectrum
        let full = hermitian_eig(
            &build_hamiltonian(&ModelParams::new(1.0).unwrap(), &CouplingGraph::ladder()).unwrap(),
        )
        .unwrap();
        for l in &e.eigenvalues {
            assert!(full.eigenvalues.iter().any(|m| (m - l).abs() < 1e-10));
        }
    }

    #[test]
    fn initial_state_amplitudes() {
        let psi = initial_state();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((psi.amplitude("1000").unwrap().re - h).abs() < 1e-16);
        assert_eq!(psi.amplitude("0010").unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn graph_validation() {
        assert!(CouplingGraph::ladder().validate().is_ok());
        assert!(CouplingGraph::new(vec![(s(1), s(1))], vec![]).is_err());
        assert!(CouplingGraph::new(vec![(s(1), s(3))], vec![(s(3), s(1))]).is_err());
        assert!(ModelParams::new(-0.1).is_err());
        assert!(ModelParams::new(f64::NAN).is_err());
    }

    #[test]
    fn topology_text_round_trip() {
        let g = CouplingGraph::ladder_with_orientation(false, true);
        let parsed = CouplingGraph::parse(&g.to_text()).unwrap();
        assert_eq!(parsed, g);
        assert!(CouplingGraph::parse("rung 1 9\n").is_err());
        assert!(CouplingGraph::parse("bond 1 2\n").is_err());
        let with_comments = "# ladder\nrung 1 2 # first\n\nleg 1 3\n";
        assert_eq!(CouplingGraph::parse(with_comments).unwrap().leg_bonds.len(), 1);
    }

    #[test]
    fn magnetization_conserved_by_hamiltonian() {
        let h = build_hamiltonian(&ModelParams::new(0.6).unwrap(), &CouplingGraph::ladder()).unwrap();
        assert!(sz_total_commutator(&h) < 1e-14);
    }
}
