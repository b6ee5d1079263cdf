//! Spectral time evolution: ψ(t) = Σᵢ cᵢ e^{−iEᵢt} |Eᵢ⟩.
//!
//! Each time point is computed independently from the cached expansion, so
//! there is no step-to-step error accumulation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, EigenSystem, C64};
use crate::model::one_particle_indices;
use crate::state::{excitation_count, QuantumState, Site, DIM, N_SITES};

pub const DEFAULT_LEAKAGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Propagator {
    eig: EigenSystem,
    coeffs: Vec<C64>,
}

impl Propagator {
    pub fn new(h: &ComplexMatrix, psi0: &QuantumState) -> Result<Self> {
        if h.rows() != DIM {
            return Err(Error::validation(format!(
                "Hamiltonian must be {DIM}×{DIM}, got {}×{}",
                h.rows(),
                h.cols()
            )));
        }
        let eig = hermitian_eig(h)?;
        let coeffs = (0..DIM)
            .map(|i| {
                (0..DIM)
                    .map(|b| eig.eigenvectors[(b, i)].conj() * psi0.amplitudes()[b])
                    .sum()
            })
            .collect();
        Ok(Propagator { eig, coeffs })
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.eig
    }

    /// cᵢ = ⟨Eᵢ|ψ(0)⟩.
    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn evolve(&self, t: f64) -> QuantumState {
        let mut amps = [C64::new(0.0, 0.0); DIM];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let w = c * C64::from_polar(1.0, -self.eig.eigenvalues[i] * t);
            for (b, a) in amps.iter_mut().enumerate() {
                *a += w * self.eig.eigenvectors[(b, i)];
            }
        }
        QuantumState::from_raw(amps)
    }

    /// States on the inclusive grid t_start, t_start + dt, … ≤ t_end.
    pub fn evolve_series(
        &self,
        t_start: f64,
        t_end: f64,
        dt: f64,
    ) -> Result<Vec<(f64, QuantumState)>> {
        let grid = time_grid(t_start, t_end, dt)?;
        Ok(grid.into_par_iter().map(|t| (t, self.evolve(t))).collect())
    }

    /// ⟨ψ(0)|H|ψ(0)⟩, conserved along the trajectory.
    pub fn energy(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.eig.eigenvalues)
            .map(|(c, e)| c.norm_sqr() * e)
            .sum()
    }
}

pub fn make_propagator(h: &ComplexMatrix, psi0: &QuantumState) -> Result<Propagator> {
    Propagator::new(h, psi0)
}

/// Inclusive time grid. The endpoint is kept when it lies within 1e-9·dt of a grid point.
pub fn time_grid(t_start: f64, t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::validation(format!("time step dt = {dt} must be positive")));
    }
    if !(t_start.is_finite() && t_end.is_finite()) || t_end < t_start {
        return Err(Error::validation(format!(
            "time range [{t_start}, {t_end}] is empty or not finite"
        )));
    }
    let steps = ((t_end - t_start) / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| t_start + k as f64 * dt).collect())
}

/// ⟨ψ|M|ψ⟩ for a Hermitian `m`.
pub fn expectation(psi: &QuantumState, m: &ComplexMatrix) -> f64 {
    let mv = m.mat_vec(psi.amplitudes());
    psi.amplitudes()
        .iter()
        .zip(&mv)
        .map(|(a, b)| a.conj() * b)
        .sum::<C64>()
        .re
}

/// Probability weight outside the single-excitation subspace.
pub fn sector_leakage(psi: &QuantumState) -> f64 {
    psi.amplitudes()
        .iter()
        .enumerate()
        .filter(|(b, _)| excitation_count(*b) != 1)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// b₁..b₄: the amplitude of the single up-spin at each site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneParticleAmplitudes {
    pub b: [C64; N_SITES],
}

impl OneParticleAmplitudes {
    pub fn at(&self, site: Site) -> C64 {
        self.b[site.index() - 1]
    }

    pub fn weight(&self) -> f64 {
        self.b.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Overlap with the best-phased W state, (Σⱼ|bⱼ|)²/4.
    pub fn w_fidelity(&self) -> f64 {
        let s: f64 = self.b.iter().map(|z| z.norm()).sum();
        s * s / N_SITES as f64
    }
}

pub fn one_particle_amplitudes(psi: &QuantumState, leakage_tol: f64) -> Result<OneParticleAmplitudes> {
    let leaked = sector_leakage(psi);
    if leaked > leakage_tol {
        return Err(Error::SectorLeakage {
            weight: leaked,
            tolerance: leakage_tol,
        });
    }
    let idx = one_particle_indices();
    let mut b = [C64::new(0.0, 0.0); N_SITES];
    for (slot, &i) in b.iter_mut().zip(&idx) {
        *slot = psi.amplitudes()[i];
    }
    Ok(OneParticleAmplitudes { b })
}
