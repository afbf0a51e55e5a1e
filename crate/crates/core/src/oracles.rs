//! Closed-form reference quantities used as ground truth in tests and
//! diagnostics: von Neumann entropy, Page's mean entropy for Haar-random
//! states, the mean entropy under uniform sphere sampling, and the expected
//! eigenvalue decay. All entropies are in nats (natural logarithm).

use crate::error::{Error, Result};
use crate::sphere::EigenvalueSet;

const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Entropy in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropyValue {
    nats: f64,
}

impl EntropyValue {
    pub fn new(nats: f64) -> Self {
        Self { nats }
    }

    pub fn nats(&self) -> f64 {
        self.nats
    }

    /// Conversion for comparisons against base-2 statements: S / ln 2.
    pub fn bits(&self) -> f64 {
        self.nats / std::f64::consts::LN_2
    }
}

/// Von Neumann entropy -Σ λ ln λ with the convention 0·ln 0 = 0.
pub fn von_neumann_entropy(lam: &EigenvalueSet) -> Result<EntropyValue> {
    entropy_of(lam.values())
}

/// Same as [`von_neumann_entropy`] for a bare probability vector.
pub fn entropy_of(values: &[f64]) -> Result<EntropyValue> {
    let mut s = 0.0;
    for (i, &v) in values.iter().enumerate() {
        if v < 0.0 {
            return Err(Error::NegativeEigenvalue { index: i, value: v });
        }
        if v > 0.0 {
            s -= v * v.ln();
        }
    }
    Ok(EntropyValue::new(s))
}

/// Page's mean entanglement entropy of a subsystem of `subsys_qubits` sites
/// in a Haar-random pure state on `total_qubits` sites with local dimension
/// `d`:
///
/// S(m, n) = Σ_{k=n+1}^{mn} 1/k − (m − 1) / (2n),
///
/// with m = d^|A| ≤ n = d^|B|. Requires |A| ≤ |B|.
pub fn page_mean_entropy(
    subsys_qubits: usize,
    total_qubits: usize,
    d: usize,
) -> Result<EntropyValue> {
    if subsys_qubits == 0 || subsys_qubits > total_qubits {
        return Err(Error::InvalidBipartition {
            subsys: subsys_qubits,
            complement: total_qubits.saturating_sub(subsys_qubits),
        });
    }
    let complement = total_qubits - subsys_qubits;
    if subsys_qubits > complement {
        return Err(Error::InvalidBipartition {
            subsys: subsys_qubits,
            complement,
        });
    }
    let db = complement as f64;
    let da = subsys_qubits as f64;
    let n = (d as f64).powf(db);
    let m = (d as f64).powf(da);
    let harmonic_range = harmonic(m * n) - harmonic(n);
    Ok(EntropyValue::new(harmonic_range - (m - 1.0) / (2.0 * n)))
}

/// Harmonic number H_x, exact summation for small x and the asymptotic
/// expansion beyond (absolute error far below 1e-12 at the switch point).
fn harmonic(x: f64) -> f64 {
    if x <= 2_097_152.0 {
        let k_max = x as u64;
        let mut h = 0.0;
        // Summing small terms first keeps the floating-point error down.
        for k in (1..=k_max).rev() {
            h += 1.0 / k as f64;
        }
        h
    } else {
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        x.ln() + EULER_MASCHERONI + 0.5 * inv - inv2 / 12.0 + inv2 * inv2 / 120.0
    }
}

/// Mean entropy under uniform sphere sampling for subsystem dimension n:
/// ⟨S_n⟩ = (ln 2 − 1/2)(4 − 2^{3−n}).
pub fn uniform_mean_entropy(subsys_dim: usize) -> Result<EntropyValue> {
    if subsys_dim < 2 {
        return Err(Error::InvalidDimension {
            n: subsys_dim,
            min: 2,
        });
    }
    let a = std::f64::consts::LN_2 - 0.5;
    let tail = (3.0 - subsys_dim as f64).exp2();
    Ok(EntropyValue::new(a * (4.0 - tail)))
}

/// Large-n limit of [`uniform_mean_entropy`]: 4 ln 2 − 2.
pub fn uniform_mean_entropy_limit() -> EntropyValue {
    EntropyValue::new(4.0 * std::f64::consts::LN_2 - 2.0)
}

/// Expected unordered eigenvalue under uniform sampling: E[Λ_i] = 2^{-i} for
/// i < n and 2^{-(n-1)} for i = n (the last two coincide).
pub fn expected_unordered_eigenvalue(i: usize, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension { n, min: 2 });
    }
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    if i < n {
        Ok((-(i as f64)).exp2())
    } else {
        Ok((-(n as f64) + 1.0).exp2())
    }
}
