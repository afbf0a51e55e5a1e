//! Eigenvalue sampling on the positive orthant of the unit n-sphere.
//!
//! Reduced-density-operator spectra are generated by drawing a point on the
//! n-sphere and squaring its Cartesian coordinates, which guarantees
//! nonnegative eigenvalues summing to one. Two samplers are provided:
//!
//! * [`sample_uniform`] draws the n-1 spherical angles i.i.d. uniformly on
//!   [0, π/2], covering the positive orthant uniformly in angle space;
//! * [`sample_gaussian`] draws each angle from an independent Gaussian
//!   centered on the maximally entangled point (all coordinates 1/√n), with
//!   a common width σ controlling how far spectra stray from flat.
//!
//! Gaussian draws are deliberately not clamped to the orthant: squaring the
//! coordinates folds every orthant onto the same eigenvalue set, so sign
//! excursions are harmless.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mps::SchmidtSpectrum;

/// Spherical coordinates of a point on the unit n-sphere (n-1 angles).
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalAngles {
    phi: Vec<f64>,
}

impl SphericalAngles {
    /// Wraps n-1 angles for an ambient dimension n >= 2.
    pub fn new(phi: Vec<f64>) -> Result<Self> {
        if phi.is_empty() {
            return Err(Error::InvalidDimension { n: 1, min: 2 });
        }
        Ok(Self { phi })
    }

    pub fn ambient_dim(&self) -> usize {
        self.phi.len() + 1
    }

    pub fn angles(&self) -> &[f64] {
        &self.phi
    }
}

/// Squared sphere coordinates: n nonnegative reals summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueSet {
    lambda: Vec<f64>,
    ordered: bool,
}

impl EigenvalueSet {
    /// Validates nonnegativity and normalization (loose tolerance; the
    /// samplers themselves stay within ~n·ε of exact normalization).
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() < 2 {
            return Err(Error::InvalidDimension {
                n: lambda.len(),
                min: 2,
            });
        }
        for (i, &v) in lambda.iter().enumerate() {
            if v < 0.0 || v.is_nan() {
                return Err(Error::NegativeEigenvalue { index: i, value: v });
            }
        }
        let sum: f64 = lambda.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self {
            lambda,
            ordered: false,
        })
    }

    pub(crate) fn from_raw(lambda: Vec<f64>, ordered: bool) -> Self {
        Self { lambda, ordered }
    }

    pub fn values(&self) -> &[f64] {
        &self.lambda
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// True when the entries are known to be sorted in descending order.
    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    /// Returns a copy sorted in descending order.
    pub fn sorted_descending(&self) -> Self {
        let mut lambda = self.lambda.clone();
        lambda.sort_unstable_by(|a, b| b.partial_cmp(a).expect("no NaN eigenvalues"));
        Self {
            lambda,
            ordered: true,
        }
    }
}

/// Gaussian width; the infinite sentinel selects uniform sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    Finite(f64),
    Infinite,
}

impl Sigma {
    pub fn from_f64(value: f64) -> Self {
        if value.is_infinite() {
            Sigma::Infinite
        } else {
            Sigma::Finite(value)
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Sigma::Infinite)
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Sigma::Finite(v) => *v,
            Sigma::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Finite(v) => write!(f, "{v}"),
            Sigma::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Sigma {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(Sigma::Infinite),
            other => other
                .parse::<f64>()
                .map(Sigma::from_f64)
                .map_err(|e| format!("invalid sigma {other:?}: {e}")),
        }
    }
}

// JSON has no infinity literal, so the sentinel round-trips as the string
// "inf" while finite widths stay plain numbers.
impl Serialize for Sigma {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sigma::Finite(v) => serializer.serialize_f64(*v),
            Sigma::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Sigma {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct SigmaVisitor;
        impl Visitor<'_> for SigmaVisitor {
            type Value = Sigma;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Sigma, E> {
                Ok(Sigma::from_f64(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Sigma, E> {
                Ok(Sigma::from_f64(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Sigma, E> {
                Ok(Sigma::from_f64(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Sigma, E> {
                Sigma::from_str(v).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_any(SigmaVisitor)
    }
}

/// Full definition of one σ-ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    /// Gaussian width; `Sigma::Infinite` selects uniform sampling.
    pub sigma: Sigma,
    /// Chain length L (number of qubits).
    pub sites: usize,
    /// Local Hilbert space dimension d.
    pub local_dim: usize,
    /// Bond-dimension cap χ.
    pub chi_max: usize,
    /// Eigenvalues at or below this threshold are truncated.
    pub trunc_threshold: f64,
    /// Master seed; all randomness derives from it.
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::InvalidSpec(format!(
                "sites = {}, need >= 2",
                self.sites
            )));
        }
        if self.local_dim < 2 {
            return Err(Error::InvalidSpec(format!(
                "local_dim = {}, need >= 2",
                self.local_dim
            )));
        }
        if self.chi_max < 1 {
            return Err(Error::InvalidSpec("chi_max = 0, need >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.trunc_threshold) {
            return Err(Error::InvalidSpec(format!(
                "trunc_threshold = {}, need in [0, 1)",
                self.trunc_threshold
            )));
        }
        if let Sigma::Finite(s) = self.sigma {
            if !(s > 0.0) {
                return Err(Error::InvalidSpec(format!("sigma = {s}, need > 0 or inf")));
            }
        }
        Ok(())
    }
}

/// Converts spherical coordinates to Cartesian coordinates on the unit
/// n-sphere: x_1 = cos φ_1, x_k = (Π_{j<k} sin φ_j) cos φ_k, x_n = Π_j sin φ_j.
pub fn spherical_to_cartesian(angles: &SphericalAngles) -> Vec<f64> {
    let phi = angles.angles();
    let n = angles.ambient_dim();
    let mut x = vec![0.0; n];
    let mut sin_prod = 1.0;
    for (k, &p) in phi.iter().enumerate() {
        x[k] = sin_prod * p.cos();
        sin_prod *= p.sin();
    }
    x[n - 1] = sin_prod;
    x
}

/// Inverse transform using the two-argument arctangent. Angles left undefined
/// by a vanishing coordinate tail are set to zero.
pub fn cartesian_to_spherical(x: &[f64]) -> Result<SphericalAngles> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidDimension { n, min: 2 });
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVector);
    }
    // Backward-accumulated tail norms: tail[k] = sqrt(x_k^2 + ... + x_{n-1}^2).
    let mut tail = vec![0.0; n + 1];
    for k in (0..n).rev() {
        tail[k] = x[k].mul_add(x[k], tail[k + 1]);
    }
    let mut phi = Vec::with_capacity(n - 1);
    for k in 0..n - 2 {
        // atan2(0, 0) = 0 resolves the degenerate case.
        phi.push(tail[k + 1].sqrt().atan2(x[k]));
    }
    phi.push(x[n - 1].atan2(x[n - 2]));
    SphericalAngles::new(phi)
}

/// Uniform eigenvalue sampling: n-1 angles i.i.d. on [0, π/2], converted to
/// Cartesian coordinates and squared. The raw coordinate order is preserved.
pub fn sample_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<EigenvalueSet> {
    if n < 2 {
        return Err(Error::InvalidDimension { n, min: 2 });
    }
    let dist = Uniform::new(0.0, FRAC_PI_2).expect("valid uniform range");
    let phi: Vec<f64> = (0..n - 1).map(|_| dist.sample(rng)).collect();
    let angles = SphericalAngles::new(phi)?;
    Ok(squared_coordinates(&angles))
}

/// Spherical coordinates of the maximally entangled point x_i = 1/√n:
/// φ_i = arccos(1/√(n-i+1)).
pub fn maximally_entangled_angles(n: usize) -> Result<SphericalAngles> {
    if n < 2 {
        return Err(Error::InvalidDimension { n, min: 2 });
    }
    let phi: Vec<f64> = (1..n)
        .map(|i| (1.0 / ((n - i + 1) as f64).sqrt()).acos())
        .collect();
    SphericalAngles::new(phi)
}

/// Gaussian eigenvalue sampling: each angle independently normal with width
/// σ around the maximally entangled point. Angles are not clamped to the
/// orthant; squaring makes sign excursions harmless.
pub fn sample_gaussian<R: Rng + ?Sized>(n: usize, sigma: f64, rng: &mut R) -> Result<EigenvalueSet> {
    if n < 2 {
        return Err(Error::InvalidDimension { n, min: 2 });
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidSpec(format!("sigma = {sigma}, need > 0")));
    }
    let phi: Vec<f64> = (1..n)
        .map(|i| {
            let mean = (1.0 / ((n - i + 1) as f64).sqrt()).acos();
            Normal::new(mean, sigma).expect("valid normal").sample(rng)
        })
        .collect();
    let angles = SphericalAngles::new(phi)?;
    Ok(squared_coordinates(&angles))
}

/// Dispatches on the width: finite → Gaussian, infinite → uniform.
pub fn sample_eigenvalues<R: Rng + ?Sized>(
    n: usize,
    sigma: Sigma,
    rng: &mut R,
) -> Result<EigenvalueSet> {
    match sigma {
        Sigma::Finite(s) => sample_gaussian(n, s, rng),
        Sigma::Infinite => sample_uniform(n, rng),
    }
}

fn squared_coordinates(angles: &SphericalAngles) -> EigenvalueSet {
    let x = spherical_to_cartesian(angles);
    let lambda: Vec<f64> = x.iter().map(|v| v * v).collect();
    EigenvalueSet::from_raw(lambda, false)
}

/// Sorts descending, drops eigenvalues at or below `threshold` and beyond
/// rank `chi_max`, renormalizes, and takes square roots to produce a unit
/// Schmidt spectrum.
pub fn truncate_and_order(
    lam: &EigenvalueSet,
    chi_max: usize,
    threshold: f64,
) -> Result<SchmidtSpectrum> {
    let sorted = lam.sorted_descending();
    let mut kept: Vec<f64> = sorted
        .values()
        .iter()
        .copied()
        .take_while(|&v| v > threshold)
        .collect();
    kept.truncate(chi_max.max(1));
    if kept.is_empty() {
        return Err(Error::EmptySpectrum { threshold });
    }
    let total: f64 = kept.iter().sum();
    let values: Vec<f64> = kept.iter().map(|v| (v / total).sqrt()).collect();
    Ok(SchmidtSpectrum::from_raw(values))
}
