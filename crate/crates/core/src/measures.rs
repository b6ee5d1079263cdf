//! Observables computed from states: concurrence, two-point correlations and
//! total-spin expectations.

use serde::{Deserialize, Serialize};

use crate::dynamics::OneParticleAmplitudes;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, partial_trace_to_pair, pauli, ComplexMatrix, C64};
use crate::state::{apply_spin, site_pair, Axis, QuantumState, Site};

/// Tolerance for accepting a 4×4 matrix as a density operator.
pub const DENSITY_TOL: f64 = 1e-10;

/// Eigenvalues of ρ below this (relative to its trace) are treated as exact zeros.
const RANK_CUTOFF: f64 = 1e-14;

/// Imaginary part of ⟨ψ|O|ψ⟩ tolerated for a Hermitian observable.
const IMAG_TOL: f64 = 1e-10;

fn check_density(rho: &ComplexMatrix) -> Result<()> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::validation(format!(
            "two-qubit density matrix must be 4×4, got {}×{}",
            rho.rows(),
            rho.cols()
        )));
    }
    rho.check_hermitian(DENSITY_TOL)?;
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
        return Err(Error::validation(format!("density matrix trace {tr} ≠ 1")));
    }
    Ok(())
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// The λᵢ (square roots of the eigenvalues of ρ·ρ̃) are obtained as the
/// singular values of τ = Xᵀ(σʸ⊗σʸ)X with ρ = XX†, read off from the
/// Hermitian dilation [[0, τ], [τ†, 0]]. This keeps λᵢ accurate to machine
/// precision even when they are close to zero, where taking square roots of
/// eigenvalues of ρ·ρ̃ would lose half the digits.
pub fn wootters_concurrence(rho: &ComplexMatrix) -> Result<f64> {
    check_density(rho)?;
    let eig = hermitian_eig(rho)?;
    if let Some(&min) = eig.eigenvalues.first() {
        if min < -DENSITY_TOL {
            return Err(Error::validation(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
    }

    let kept: Vec<usize> = (0..4)
        .filter(|&k| eig.eigenvalues[k] > RANK_CUTOFF)
        .collect();
    let r = kept.len();
    if r == 0 {
        return Err(Error::NumericalFailure("density matrix has no positive eigenvalue".into()));
    }
    let mut x = ComplexMatrix::zeros(4, r);
    for (col, &k) in kept.iter().enumerate() {
        let s = eig.eigenvalues[k].sqrt();
        for i in 0..4 {
            x[(i, col)] = eig.eigenvectors[(i, k)] * s;
        }
    }
    let spin_flip = kron(&pauli::y(), &pauli::y());
    let tau = &(&x.transpose() * &spin_flip) * &x;

    let mut dil = ComplexMatrix::zeros(2 * r, 2 * r);
    for i in 0..r {
        for j in 0..r {
            dil[(i, r + j)] = tau[(i, j)];
            dil[(r + j, i)] = tau[(i, j)].conj();
        }
    }
    let sv = hermitian_eig(&dil)?;
    let mut lambdas: Vec<f64> = sv.eigenvalues[r..].iter().rev().map(|&l| l.max(0.0)).collect();
    lambdas.resize(4, 0.0);

    let c = lambdas[0] - lambdas[1..].iter().sum::<f64>();
    if c > 1.0 + 1e-9 {
        return Err(Error::NumericalFailure(format!("concurrence {c} exceeds 1")));
    }
    Ok(c.clamp(0.0, 1.0))
}

/// Concurrence of the reduced state of sites `p`, `q`.
pub fn pair_concurrence(psi: &QuantumState, p: usize, q: usize) -> Result<f64> {
    // concurrence is symmetric under qubit exchange; fix the order so (p,q) and (q,p) agree bitwise
    let (a, b) = site_pair(p, q)?;
    wootters_concurrence(&partial_trace_to_pair(psi, a.index(), b.index())?)
}

/// 2·|b_p·b_q|, exact for states confined to the one-particle sector.
pub fn concurrence_one_particle(amps: &OneParticleAmplitudes, p: usize, q: usize) -> Result<f64> {
    let (a, b) = site_pair(p, q)?;
    Ok(2.0 * (amps.at(a) * amps.at(b)).norm())
}

/// ⟨ψ|Ŝᵅ_p Ŝᵝ_q|ψ⟩ for distinct sites.
pub fn two_point_correlation(psi: &QuantumState, p: usize, q: usize, alpha: Axis, beta: Axis) -> Result<f64> {
    let (sp, sq) = (Site::new(p)?, Site::new(q)?);
    if sp == sq {
        return Err(Error::validation(format!(
            "two-point correlation needs distinct sites, got ({p},{q})"
        )));
    }
    let amps = psi.amplitudes();
    let right = apply_spin(sq, beta, amps);
    let left = apply_spin(sp, alpha, amps);
    let z: C64 = left.iter().zip(&right).map(|(l, r)| l.conj() * r).sum();
    if z.im.abs() > IMAG_TOL {
        return Err(Error::NumericalFailure(format!(
            "correlation ⟨S{}_{p} S{}_{q}⟩ has imaginary part {:e}",
            alpha.label(),
            beta.label(),
            z.im
        )));
    }
    Ok(z.re)
}

/// ⟨ψ|Σ_p Ŝᵅ_p|ψ⟩.
pub fn total_spin_expectation(psi: &QuantumState, alpha: Axis) -> f64 {
    let amps = psi.amplitudes();
    Site::all()
        .map(|s| {
            let v = apply_spin(s, alpha, amps);
            amps.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<C64>().re
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairObservables {
    pub pair: (usize, usize),
    pub concurrence: f64,
    /// chi[α][β] = ⟨Ŝᵅ_p Ŝᵝ_q⟩ with axes ordered x, y, z.
    pub chi: [[f64; 3]; 3],
}

pub fn pair_observables(psi: &QuantumState, p: usize, q: usize) -> Result<PairObservables> {
    let concurrence = pair_concurrence(psi, p, q)?;
    let mut chi = [[0.0; 3]; 3];
    for (i, a) in Axis::ALL.into_iter().enumerate() {
        for (j, b) in Axis::ALL.into_iter().enumerate() {
            chi[i][j] = two_point_correlation(psi, p, q, a, b)?;
        }
    }
    Ok(PairObservables {
        pair: (p, q),
        concurrence,
        chi,
    })
}
