//! Four-qubit basis conventions and state vectors.
//!
//! Qubit 1 is the most significant bit: the basis index of `|s1 s2 s3 s4⟩` is
//! `8·s1 + 4·s2 + 2·s3 + s4`, with `s = 1` meaning spin up.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

pub const N_SITES: usize = 4;
pub const DIM: usize = 1 << N_SITES;

/// Tolerance on Σ|aᵢ|² − 1 accepted by [`QuantumState::new`].
pub const NORM_TOL: f64 = 1e-12;

/// A ladder site, numbered 1..=4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Site(u8);

impl Site {
    pub fn new(index: usize) -> Result<Self> {
        if (1..=N_SITES).contains(&index) {
            Ok(Site(index as u8))
        } else {
            Err(Error::validation(format!(
                "site index {index} out of range 1..={N_SITES}"
            )))
        }
    }

    pub fn all() -> impl Iterator<Item = Site> {
        (1..=N_SITES as u8).map(Site)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Bit mask of this site inside a basis index.
    pub fn mask(self) -> usize {
        1 << (N_SITES - self.index())
    }
}

impl TryFrom<usize> for Site {
    type Error = Error;
    fn try_from(value: usize) -> Result<Self> {
        Site::new(value)
    }
}

impl From<Site> for usize {
    fn from(s: Site) -> usize {
        s.index()
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Validated unordered pair of distinct sites, stored with `p < q`.
pub fn site_pair(p: usize, q: usize) -> Result<(Site, Site)> {
    let (a, b) = (Site::new(p)?, Site::new(q)?);
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Ok((a, b)),
        std::cmp::Ordering::Greater => Ok((b, a)),
        std::cmp::Ordering::Equal => Err(Error::validation(format!(
            "pair ({p},{q}) must name two distinct sites"
        ))),
    }
}

/// The six unordered pairs in lexicographic order.
pub fn all_pairs() -> Vec<(Site, Site)> {
    let mut out = Vec::with_capacity(6);
    for p in 1..=N_SITES {
        for q in p + 1..=N_SITES {
            out.push((Site(p as u8), Site(q as u8)));
        }
    }
    out
}

/// Spin component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::validation(format!("unknown spin axis '{other}'"))),
        }
    }
}

/// Normalized 16-component amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amps: [C64; DIM],
}

impl QuantumState {
    pub fn new(amps: [C64; DIM]) -> Result<Self> {
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::validation(format!(
                "state norm² = {norm2} deviates from 1 by more than {NORM_TOL:e}"
            )));
        }
        Ok(QuantumState { amps })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        let arr: [C64; DIM] = amps.try_into().map_err(|_| {
            Error::validation(format!("state needs {DIM} amplitudes, got {}", amps.len()))
        })?;
        Self::new(arr)
    }

    /// Scales `amps` to unit norm.
    pub fn normalized(mut amps: [C64; DIM]) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::validation("cannot normalize a zero or non-finite vector"));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::new(amps)
    }

    /// Computational basis state from a bit string such as `"1000"`.
    pub fn basis(bits: &str) -> Result<Self> {
        let index = basis_index(bits)?;
        let mut amps = [C64::new(0.0, 0.0); DIM];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub(crate) fn from_raw(amps: [C64; DIM]) -> Self {
        QuantumState { amps }
    }

    pub fn amplitudes(&self) -> &[C64; DIM] {
        &self.amps
    }

    pub fn amplitude(&self, bits: &str) -> Result<C64> {
        Ok(self.amps[basis_index(bits)?])
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &QuantumState) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Basis index of a four-character bit string, qubit 1 first.
pub fn basis_index(bits: &str) -> Result<usize> {
    if bits.len() != N_SITES || !bits.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::validation(format!(
            "basis label '{bits}' must be {N_SITES} characters of 0/1"
        )));
    }
    Ok(usize::from_str_radix(bits, 2).expect("validated binary string"))
}

/// Number of up spins in a basis index.
pub fn excitation_count(index: usize) -> u32 {
    (index as u32).count_ones()
}

/// Applies (½·σ^axis) at `site` to a raw amplitude vector.
pub(crate) fn apply_spin(site: Site, axis: Axis, amps: &[C64; DIM]) -> [C64; DIM] {
    let mask = site.mask();
    let mut out = [C64::new(0.0, 0.0); DIM];
    for (b, &a) in amps.iter().enumerate() {
        let up = b & mask != 0;
        match axis {
            Axis::Z => out[b] += a * if up { 0.5 } else { -0.5 },
            Axis::X => out[b ^ mask] += a * 0.5,
            // σ^y|↑⟩ = i|↓⟩, σ^y|↓⟩ = −i|↑⟩
            Axis::Y => out[b ^ mask] += a * C64::new(0.0, if up { 0.5 } else { -0.5 }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_bounds() {
        assert!(Site::new(0).is_err());
        assert!(Site::new(5).is_err());
        assert_eq!(Site::new(1).unwrap().mask(), 8);
        assert_eq!(Site::new(4).unwrap().mask(), 1);
    }

    #[test]
    fn pair_ordering_and_errors() {
        let (a, b) = site_pair(3, 1).unwrap();
        assert_eq!((a.index(), b.index()), (1, 3));
        assert!(site_pair(2, 2).is_err());
        assert!(site_pair(0, 2).is_err());
        assert_eq!(all_pairs().len(), 6);
    }

    #[test]
    fn basis_labels() {
        assert_eq!(basis_index("1000").unwrap(), 8);
        assert_eq!(basis_index("0001").unwrap(), 1);
        assert!(basis_index("102").is_err());
        let s = QuantumState::basis("0100").unwrap();
        assert_eq!(s.amplitude("0100").unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_unnormalized() {
        let amps = [C64::new(0.5, 0.0); DIM];
        assert!(QuantumState::new(amps).is_err());
        assert!(QuantumState::normalized(amps).is_ok());
    }
}
