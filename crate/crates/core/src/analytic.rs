//! Closed-form solution for the Bell⊗|00⟩ initial state.
//!
//! With ω = √(1+D²), μ = √(2+D²+2ω), ν = √(2+D²−2ω) the state stays in the
//! one-particle sector with b₁ = b₂ = η/(2√2) and b₃ = b₄ = ξ/(2√2). All
//! expressions here require D > 0; D = 0 is handled by the numeric propagator.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{Axis, Site};
use crate::dynamics::OneParticleAmplitudes;
use crate::linalg::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub d: f64,
    pub omega: f64,
    pub mu: f64,
    pub nu: f64,
}

fn check_domain(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "closed forms need D > 0 (got {d}); use the numeric propagator for D = 0"
        )))
    }
}

impl SpectralParams {
    pub fn new(d: f64) -> Result<Self> {
        check_domain(d)?;
        let omega = (1.0 + d * d).sqrt();
        let mu = (2.0 + d * d + 2.0 * omega).sqrt();
        // μν = D² exactly; the direct form of ν cancels catastrophically for small D
        let nu = d * d / mu;
        Ok(SpectralParams { d, omega, mu, nu })
    }

    /// (μ + ν)/2.
    pub fn beat(&self) -> f64 {
        (self.mu + self.nu) / 2.0
    }

    /// Common period 4π/(μ+ν) of every observable below.
    pub fn period(&self) -> f64 {
        4.0 * PI / (self.mu + self.nu)
    }
}

pub fn spectral_params(d: f64) -> Result<SpectralParams> {
    SpectralParams::new(d)
}

/// η(t, D) and ξ(t, D).
pub fn eta_xi(t: f64, d: f64) -> Result<(C64, C64)> {
    let SpectralParams { omega, mu, nu, .. } = SpectralParams::new(d)?;
    let (sm, cm) = (mu * t / 2.0).sin_cos();
    let (sn, cn) = (nu * t / 2.0).sin_cos();
    let i = C64::new(0.0, 1.0);

    let eta = C64::new(cm + cn, 0.0)
        - i / omega * ((omega + omega * omega) / mu * sm + (omega - omega * omega) / nu * sn);

    let bracket = i * d * d * (cm - cn) + (omega + 1.0) * nu * sm + (omega - 1.0) * mu * sn;
    let xi = -(i + d) / (omega * d * d) * bracket;
    Ok((eta, xi))
}

/// Closed-form b₁..b₄.
pub fn amplitudes(t: f64, d: f64) -> Result<OneParticleAmplitudes> {
    let (eta, xi) = eta_xi(t, d)?;
    let k = 1.0 / (2.0 * std::f64::consts::SQRT_2);
    Ok(OneParticleAmplitudes {
        b: [eta * k, eta * k, xi * k, xi * k],
    })
}

/// Which closed-form curve a pair follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairClass {
    FirstRung,
    LastRung,
    Leg,
}

impl PairClass {
    pub const ALL: [PairClass; 3] = [PairClass::FirstRung, PairClass::LastRung, PairClass::Leg];

    /// (1,2) → FirstRung, (3,4) → LastRung, everything else → Leg.
    pub fn of(p: Site, q: Site) -> Result<Self> {
        let (a, b) = if p < q { (p, q) } else { (q, p) };
        match (a.index(), b.index()) {
            (x, y) if x == y => Err(Error::validation(format!("pair ({x},{y}) is not distinct"))),
            (1, 2) => Ok(PairClass::FirstRung),
            (3, 4) => Ok(PairClass::LastRung),
            _ => Ok(PairClass::Leg),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PairClass::FirstRung => "first",
            PairClass::LastRung => "last",
            PairClass::Leg => "leg",
        }
    }

    /// Representative pair used in tabulated output.
    pub fn representative(self) -> (usize, usize) {
        match self {
            PairClass::FirstRung => (1, 2),
            PairClass::LastRung => (3, 4),
            PairClass::Leg => (1, 3),
        }
    }
}

pub fn concurrence_formula(pc: PairClass, t: f64, d: f64) -> Result<f64> {
    let sp = SpectralParams::new(d)?;
    let x = (sp.mu + sp.nu) * t / 4.0;
    Ok(match pc {
        PairClass::FirstRung => x.cos().powi(2),
        PairClass::LastRung => x.sin().powi(2),
        PairClass::Leg => 0.5 * (2.0 * x).sin().abs(),
    })
}

/// Same-axis correlation χ^{αα} as tabulated for each pair class.
///
/// The leg entry ⅛·sin((μ+ν)t/2) is evaluated verbatim. It does not agree with
/// the correlations implied by the closed-form amplitudes, see
/// [`correlation_from_amplitudes`].
pub fn correlation_formula(pc: PairClass, axis: Axis, t: f64, d: f64) -> Result<f64> {
    let sp = SpectralParams::new(d)?;
    let x = (sp.mu + sp.nu) * t / 4.0;
    Ok(match (pc, axis) {
        (PairClass::FirstRung, Axis::X | Axis::Y) => 0.25 * x.cos().powi(2),
        (PairClass::FirstRung, Axis::Z) => -0.25 * (2.0 * x).cos(),
        (PairClass::Leg, Axis::X | Axis::Y) => 0.125 * (2.0 * x).sin(),
        (PairClass::Leg, Axis::Z) => 0.0,
        (PairClass::LastRung, Axis::X | Axis::Y) => 0.25 * x.sin().powi(2),
        (PairClass::LastRung, Axis::Z) => 0.25 * (2.0 * x).cos(),
    })
}

/// Cross-axis correlation χ^{αβ}, α ≠ β, claimed to vanish for every pair.
pub fn cross_correlation_formula(_pc: PairClass, alpha: Axis, beta: Axis, _t: f64, d: f64) -> Result<f64> {
    check_domain(d)?;
    if alpha == beta {
        return Err(Error::validation("cross correlation needs two different axes"));
    }
    Ok(0.0)
}

/// ⟨Ŝᵅ_p Ŝᵝ_q⟩ for a one-particle state with amplitudes `b`.
///
/// In the single-excitation sector σˣσˣ and σʸσʸ both reduce to
/// 2·Re(b̄_p b_q), σˣσʸ to −2·Im(b̄_p b_q), and σᶻσᶻ to 1 − 2(|b_p|² + |b_q|²)
/// (for unit total weight); terms that change the excitation number vanish.
pub fn sector_correlation(b: &OneParticleAmplitudes, p: Site, q: Site, alpha: Axis, beta: Axis) -> f64 {
    let (bp, bq) = (b.at(p), b.at(q));
    let hop = bp.conj() * bq;
    let w = b.weight();
    let v = match (alpha, beta) {
        (Axis::X, Axis::X) | (Axis::Y, Axis::Y) => 2.0 * hop.re,
        (Axis::X, Axis::Y) => -2.0 * hop.im,
        (Axis::Y, Axis::X) => 2.0 * hop.im,
        (Axis::Z, Axis::Z) => w - 2.0 * (bp.norm_sqr() + bq.norm_sqr()),
        _ => 0.0,
    };
    v / 4.0
}

/// Correlations evaluated from the closed-form amplitudes η, ξ.
pub fn correlation_from_amplitudes(p: Site, q: Site, alpha: Axis, beta: Axis, t: f64, d: f64) -> Result<f64> {
    if p == q {
        return Err(Error::validation("correlation needs two distinct sites"));
    }
    Ok(sector_correlation(&amplitudes(t, d)?, p, q, alpha, beta))
}

/// t_tr = (2n+1)·2π/(μ+ν).
pub fn transfer_time(d: f64, n: u32) -> Result<f64> {
    Ok(2.0 * w_time(d, n)?)
}

/// Low mantissa bits cleared from the W-time quantum π/(μ+ν).
const QUANTUM_SPARE_BITS: u32 = 6;

/// π/(μ+ν) rounded to 47 significant bits (relative change below 1e-14), so
/// odd multiples up to 63 are exact products and t_w(D,n)/t_w(D,0) is exactly 2n+1.
pub fn w_time_quantum(d: f64) -> Result<f64> {
    let sp = SpectralParams::new(d)?;
    let q = PI / (sp.mu + sp.nu);
    let mask = (1u64 << QUANTUM_SPARE_BITS) - 1;
    Ok(f64::from_bits((q.to_bits() + mask.div_ceil(2)) & !mask))
}

/// t_w = (2n+1)·π/(μ+ν), half the matching transfer time.
pub fn w_time(d: f64, n: u32) -> Result<f64> {
    Ok((2 * n + 1) as f64 * w_time_quantum(d)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_time_ratios_are_exact() {
        for k in 1..=40 {
            let d = k as f64 / 10.0;
            let t0 = w_time(d, 0).unwrap();
            assert!((t0 / (PI / (2.0 * SpectralParams::new(d).unwrap().beat())) - 1.0).abs() < 1e-14);
            for n in 0..=31 {
                assert_eq!(w_time(d, n).unwrap() / t0, (2 * n + 1) as f64);
            }
        }
    }
    use std::f64::consts::SQRT_2;

    fn site(i: usize) -> Site {
        Site::new(i).unwrap()
    }

    #[test]
    fn unit_d_params() {
        let sp = spectral_params(1.0).unwrap();
        assert!((sp.omega - SQRT_2).abs() < 1e-15);
        assert!((sp.mu - (1.0 + SQRT_2)).abs() < 1e-14);
        assert!((sp.nu - (SQRT_2 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn small_d_nu_series() {
        // ν = D²/μ; to leading order μ → 2, so ν ≈ D²/2 with relative correction O(D²)
        let d = 1e-3;
        let sp = spectral_params(d).unwrap();
        assert!((sp.nu / (d * d / 2.0) - 1.0).abs() < 1e-6);
        // identity checks on the returned values
        assert!((sp.mu * sp.nu - d * d).abs() < 1e-18);
    }

    #[test]
    fn identities_at_point_six() {
        let sp = spectral_params(0.6).unwrap();
        assert!((sp.mu * sp.nu - 0.36).abs() < 1e-12);
        assert!((sp.mu * sp.mu + sp.nu * sp.nu - (4.0 + 2.0 * 0.36)).abs() < 1e-12);
        assert!(sp.mu >= sp.nu);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(spectral_params(0.0), Err(Error::Domain(_))));
        assert!(matches!(eta_xi(1.0, -1.0), Err(Error::Domain(_))));
        assert!(concurrence_formula(PairClass::Leg, 1.0, 0.0).is_err());
        assert!(transfer_time(0.0, 0).is_err());
        assert!(w_time(f64::NAN, 0).is_err());
    }

    #[test]
    fn eta_xi_at_origin() {
        for d in [0.1, 0.6, 2.0] {
            let (eta, xi) = eta_xi(0.0, d).unwrap();
            assert!((eta - C64::new(2.0, 0.0)).norm() < 1e-15);
            assert!(xi.norm() < 1e-15);
        }
    }

    #[test]
    fn eta_xi_at_first_w_time() {
        let tw = w_time(0.6, 0).unwrap();
        let (eta, xi) = eta_xi(tw, 0.6).unwrap();
        assert!((eta.norm() - SQRT_2).abs() < 1e-10);
        assert!((xi.norm() - SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn concurrence_examples() {
        assert_eq!(concurrence_formula(PairClass::FirstRung, 0.0, 0.6).unwrap(), 1.0);
        for d in [0.3, 1.0, 2.5] {
            for n in 0..4 {
                let tw = w_time(d, n).unwrap();
                for pc in PairClass::ALL {
                    assert!((concurrence_formula(pc, tw, d).unwrap() - 0.5).abs() < 1e-12);
                }
            }
        }
        let ttr = transfer_time(1.0, 0).unwrap();
        assert!((ttr - PI / SQRT_2).abs() < 2e-14);
        assert!((ttr - 2.221441469079183).abs() < 1e-12);
        assert!((concurrence_formula(PairClass::LastRung, ttr, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlation_table_examples() {
        assert_eq!(correlation_formula(PairClass::FirstRung, Axis::Z, 0.0, 0.6).unwrap(), -0.25);
        for n in 0..3 {
            let tw = w_time(0.6, n).unwrap();
            for pc in PairClass::ALL {
                assert!(correlation_formula(pc, Axis::Z, tw, 0.6).unwrap().abs() < 1e-12);
                let xx = correlation_formula(pc, Axis::X, tw, 0.6).unwrap();
                assert!((xx.abs() - 0.125).abs() < 1e-12);
            }
        }
        // tabulated leg sign alternates with n
        let odd = w_time(0.6, 1).unwrap();
        assert!(correlation_formula(PairClass::Leg, Axis::X, odd, 0.6).unwrap() < 0.0);
        assert!(cross_correlation_formula(PairClass::Leg, Axis::X, Axis::X, 1.0, 0.6).is_err());
    }

    #[test]
    fn event_times() {
        let t0 = transfer_time(1.0, 0).unwrap();
        assert!((transfer_time(1.0, 1).unwrap() - 3.0 * t0).abs() < 1e-14);
        assert!((w_time(1.0, 0).unwrap() - PI / (2.0 * SQRT_2)).abs() < 1e-14);
        assert!((w_time(1.0, 0).unwrap() - 1.1107207345395915).abs() < 1e-12);
        for d in [0.2, 0.6, 3.3] {
            for n in 0..5 {
                assert_eq!(w_time(d, n).unwrap(), transfer_time(d, n).unwrap() / 2.0);
            }
        }
        assert!(transfer_time(0.5, 0).unwrap() > transfer_time(0.6, 0).unwrap());
    }

    #[test]
    fn pair_classes() {
        use PairClass::*;
        let cases = [((1, 2), FirstRung), ((3, 4), LastRung), ((1, 3), Leg), ((2, 4), Leg), ((2, 3), Leg), ((1, 4), Leg)];
        for ((p, q), pc) in cases {
            assert_eq!(PairClass::of(site(p), site(q)).unwrap(), pc);
            assert_eq!(PairClass::of(site(q), site(p)).unwrap(), pc);
        }
        assert!(PairClass::of(site(2), site(2)).is_err());
    }

    #[test]
    fn amplitude_correlations_match_rung_rows() {
        for &t in &[0.0, 0.4, 1.7, 9.3] {
            for (p, q, pc) in [(1, 2, PairClass::FirstRung), (3, 4, PairClass::LastRung)] {
                for axis in Axis::ALL {
                    let a = correlation_from_amplitudes(site(p), site(q), axis, axis, t, 0.6).unwrap();
                    let b = correlation_formula(pc, axis, t, 0.6).unwrap();
                    assert!((a - b).abs() < 1e-12, "{pc:?} {axis:?} t={t}: {a} vs {b}");
                }
            }
            let zz = correlation_from_amplitudes(site(1), site(3), Axis::Z, Axis::Z, t, 0.6).unwrap();
            assert!(zz.abs() < 1e-12);
        }
    }
}
