//! Builds a matrix product state compatible with a target sequence of
//! Schmidt spectra.
//!
//! The warmup recursion walks the chain left to right. At each bond it draws
//! a Haar-random isometry `Q`, forms the bond environment
//! `X = Σ Ω Q` from the previous bond's spectrum and gauge remainder, takes
//! its SVD `X = Y Δ Z`, and solves `R R† = Z† Δ⁻¹ S² Δ⁻¹ Z` for the factor
//! that forces the new bond's singular values onto the target `S`. The
//! eigendecomposition route lets us clip small negative eigenvalues instead
//! of failing like a Cholesky would. The left singular vectors `Y` become
//! the stored left-canonical site tensor, and the terminal site closes the
//! chain with a co-isometry so the last bond and the norm are exact.
//!
//! The warmup fixes a gauge that generally cannot honor all earlier bonds at
//! once (the quantum marginal problem), so a sweeping stage follows: passes
//! alternate right-to-left and left-to-right, and at each bond the measured
//! singular values are replaced by the targets, pulling the whole chain
//! toward the requested spectra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::mps::{
    canonicalize_left, extract_spectrum, haar_random_isometry, vec_distance, CanonicalForm,
    MatrixProductState, SchmidtSpectrum, SiteTensor,
};
use crate::sphere::{sample_eigenvalues, truncate_and_order, EnsembleSpec};
use rand::Rng;

/// Relative cutoff below which environment singular values are treated as
/// zero when inverting Δ. Targets truncated near 1e-16 produce near-singular
/// environments, so the inverse must be guarded.
const PINV_CUTOFF: f64 = 1e-12;

/// Largest sphere dimension a single bond draw may request; beyond this the
/// per-draw allocations become unreasonable.
const MAX_SAMPLE_DIM: usize = 1 << 22;

/// Target Schmidt spectra for every internal bond of an L-site chain;
/// index b-1 holds the spectrum for bond b (between sites b and b+1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpectra {
    spectra: Vec<SchmidtSpectrum>,
    local_dim: usize,
}

impl TargetSpectra {
    /// Validates that each spectrum's rank fits the structural ceiling
    /// min(d^b, d^{L-b}) and that adjacent ranks differ by at most a factor
    /// of d, which the warmup recursion requires.
    pub fn new(spectra: Vec<SchmidtSpectrum>, local_dim: usize) -> Result<Self> {
        if local_dim < 2 {
            return Err(Error::InvalidDimension {
                n: local_dim,
                min: 2,
            });
        }
        if spectra.is_empty() {
            return Err(Error::DimensionMismatch(
                "need at least one bond spectrum (L >= 2)".into(),
            ));
        }
        let sites = spectra.len() + 1;
        for (idx, s) in spectra.iter().enumerate() {
            let bond = idx + 1;
            let cap = structural_cap(local_dim, bond, sites);
            if s.len() > cap {
                return Err(Error::DimensionMismatch(format!(
                    "bond {bond}: rank {} exceeds structural ceiling {cap}",
                    s.len()
                )));
            }
        }
        let dims: Vec<usize> = spectra.iter().map(|s| s.len()).collect();
        for b in 0..dims.len() + 1 {
            let left = if b == 0 { 1 } else { dims[b - 1] };
            let right = if b == dims.len() { 1 } else { dims[b] };
            if right > local_dim * left || left > local_dim * right {
                return Err(Error::DimensionMismatch(format!(
                    "bonds {b}, {}: ranks ({left}, {right}) infeasible for d = {local_dim}",
                    b + 1
                )));
            }
        }
        Ok(Self { spectra, local_dim })
    }

    /// Samples L-1 spectra for the given ensemble: uniform or Gaussian
    /// eigenvalues on the sphere of dimension min(d^b, d^{L-b}), truncated to
    /// χ and the threshold. Ranks are then clamped so that adjacent bonds
    /// stay within a factor of d of each other (re-truncating and
    /// renormalizing where needed), which keeps the chain constructible.
    pub fn sample<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<Self> {
        spec.validate()?;
        let d = spec.local_dim;
        let sites = spec.sites;
        let mut spectra = Vec::with_capacity(sites - 1);
        for bond in 1..sites {
            let n = structural_cap(d, bond, sites);
            if n > MAX_SAMPLE_DIM {
                return Err(Error::InvalidSpec(format!(
                    "bond {bond}: sampling dimension {n} exceeds the supported {MAX_SAMPLE_DIM}"
                )));
            }
            let lam = sample_eigenvalues(n, spec.sigma, rng)?;
            spectra.push(truncate_and_order(&lam, spec.chi_max, spec.trunc_threshold)?);
        }
        let mut ranks: Vec<usize> = spectra.iter().map(|s| s.len()).collect();
        let count = ranks.len();
        for b in 0..count {
            let left = if b == 0 { 1 } else { ranks[b - 1] };
            ranks[b] = ranks[b].min(d * left);
        }
        for b in (0..count).rev() {
            let right = if b + 1 == count { 1 } else { ranks[b + 1] };
            ranks[b] = ranks[b].min(d * right);
        }
        for (s, &r) in spectra.iter_mut().zip(&ranks) {
            if s.len() > r {
                *s = truncate_spectrum(s, r);
            }
        }
        Self::new(spectra, d)
    }

    pub fn bond_count(&self) -> usize {
        self.spectra.len()
    }

    pub fn sites(&self) -> usize {
        self.spectra.len() + 1
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Spectrum at 1-based bond b.
    pub fn spectrum(&self, bond: usize) -> &SchmidtSpectrum {
        &self.spectra[bond - 1]
    }

    pub fn spectra(&self) -> &[SchmidtSpectrum] {
        &self.spectra
    }

    /// Bond dimensions m_0 ... m_L implied by the target ranks.
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.spectra.len() + 2);
        dims.push(1);
        dims.extend(self.spectra.iter().map(|s| s.len()));
        dims.push(1);
        dims
    }
}

/// min(d^b, d^{L-b}), saturating well above any practical bond dimension.
fn structural_cap(d: usize, bond: usize, sites: usize) -> usize {
    let e = bond.min(sites - bond) as u32;
    let mut cap = 1usize;
    for _ in 0..e {
        cap = cap.saturating_mul(d);
        if cap >= 1 << 40 {
            break;
        }
    }
    cap
}

fn truncate_spectrum(s: &SchmidtSpectrum, rank: usize) -> SchmidtSpectrum {
    let kept = &s.values()[..rank];
    let total: f64 = kept.iter().map(|v| v * v).sum();
    let norm = total.sqrt();
    SchmidtSpectrum::from_raw(kept.iter().map(|v| v / norm).collect())
}

/// Sweeping controls. `delta` is the convergence threshold on the summed
/// per-bond singular-value deviations measured during a pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub max_sweeps: usize,
    pub delta: f64,
    /// When set, gives up after this many consecutive passes without a
    /// relative improvement of at least `stall_rel_improvement` in the best
    /// error seen. Converging runs are unaffected; plateaued ones exit early.
    pub stall_window: Option<usize>,
    pub stall_rel_improvement: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 500,
            delta: 1e-4,
            stall_window: None,
            stall_rel_improvement: 0.01,
        }
    }
}

/// Outcome of a construction run. The state is unit-norm and left-canonical
/// regardless of the convergence flag; errors compare eigenvalue sets
/// (squared Schmidt values) bond by bond, and `total_error` is their mean
/// over all bipartitions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstructionReport {
    #[serde(skip, default = "placeholder_state")]
    pub psi: MatrixProductState,
    pub targets: TargetSpectra,
    pub per_bond_error: Vec<f64>,
    pub total_error: f64,
    pub sweeps_used: usize,
    pub converged: bool,
    /// Total magnitude clipped from negative eigenvalues while enforcing
    /// positive semidefiniteness during warmup; a nonzero value flags an
    /// infeasible gauge, not a fatal error.
    pub warmup_psd_clip: f64,
    pub seed: Option<u64>,
}

fn placeholder_state() -> MatrixProductState {
    MatrixProductState::product_state(&[0, 0], 2).expect("static product state")
}

impl ConstructionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

#[derive(Debug)]
pub struct WarmupOutcome {
    pub psi: MatrixProductState,
    /// Accumulated negative-eigenvalue clipping magnitude.
    pub psd_clip: f64,
}

/// Site-by-site warmup: returns a unit-norm left-canonical MPS whose bond
/// dimensions equal the target ranks and whose spectra locally match the
/// targets in the drawn gauge.
pub fn warmup<R: Rng + ?Sized>(
    targets: &TargetSpectra,
    spec: &EnsembleSpec,
    rng: &mut R,
) -> Result<WarmupOutcome> {
    spec.validate()?;
    let d = spec.local_dim;
    if targets.local_dim() != d || targets.sites() != spec.sites {
        return Err(Error::DimensionMismatch(
            "targets do not match the ensemble spec".into(),
        ));
    }
    let sites_count = targets.sites();
    let dims = targets.bond_dims();
    let mut sites: Vec<SiteTensor> = Vec::with_capacity(sites_count);
    let mut clip_total = 0.0;

    // Gauge remainder W and spectrum S carried from the previous bond.
    let mut w = CMat::from_fn(1, 1, |_, _| num_complex::Complex64::new(1.0, 0.0));
    let mut s_prev: Vec<f64> = vec![1.0];

    for i in 0..sites_count {
        let m_l = dims[i];
        let sw = linalg::diag_mul(&s_prev, &w);
        if i + 1 == sites_count {
            // Terminal closure: a Haar co-isometry keeps the trailing chain
            // right-canonical, so the last bond's spectrum and the norm are
            // exact.
            let k = haar_random_isometry(d, m_l, rng)?.adjoint().to_owned();
            let c = &sw * &k;
            let nrm = linalg::frob(&c);
            if nrm < 1e-300 {
                return Err(Error::DegenerateState);
            }
            let blocks: Vec<CMat> = (0..d)
                .map(|s| CMat::from_fn(m_l, 1, |r, _| c[(r, s)] / nrm))
                .collect();
            sites.push(SiteTensor::new(blocks)?);
        } else {
            let m_r = dims[i + 1];
            let s_next = targets.spectrum(i + 1).values().to_vec();
            let q = haar_random_isometry(d * m_l, m_r, rng)?;
            // X = Σ Ω Q with Σ Ω = I_d ⊗ (S W); apply blockwise.
            let mut x = CMat::zeros(d * m_l, m_r);
            for s in 0..d {
                let qs = CMat::from_fn(m_l, m_r, |r, c| q[(s * m_l + r, c)]);
                let prod = &sw * &qs;
                for r in 0..m_l {
                    for c in 0..m_r {
                        x[(s * m_l + r, c)] = prod[(r, c)];
                    }
                }
            }
            let (mut y, delta, mut zh) = linalg::svd_thin(&x)?;
            linalg::gauge_fix_svd(&mut y, &mut zh);
            let d_max = delta.first().copied().unwrap_or(0.0);
            let cutoff = PINV_CUTOFF * d_max;
            let rank = delta.iter().filter(|&&v| v > cutoff).count();
            if rank < m_r {
                return Err(Error::RankDeficientBond {
                    bond: i + 1,
                    available: rank,
                    required: m_r,
                });
            }
            // H = Z† Δ⁻¹ S² Δ⁻¹ Z, Hermitian and PSD up to roundoff.
            let mid: Vec<f64> = s_next
                .iter()
                .zip(&delta)
                .map(|(s, dl)| (s / dl) * (s / dl))
                .collect();
            let h = &zh.adjoint().to_owned() * &linalg::diag_mul(&mid, &zh);
            let (evals, evecs) = linalg::eigh(&h)?;
            let clipped: Vec<f64> = evals
                .iter()
                .map(|&e| {
                    if e < 0.0 {
                        clip_total += -e;
                        0.0
                    } else {
                        e
                    }
                })
                .collect();
            let sqrt_e: Vec<f64> = clipped.iter().map(|e| e.sqrt()).collect();
            let r_factor = linalg::mul_diag(&evecs, &sqrt_e);
            // Next gauge remainder W' = S'⁻¹ Δ Z R.
            let coef: Vec<f64> = delta
                .iter()
                .zip(&s_next)
                .map(|(dl, s)| dl / s)
                .collect();
            let w_next = linalg::diag_mul(&coef, &(&zh * &r_factor));
            sites.push(SiteTensor::from_vertical(&y, d)?);
            w = w_next;
            s_prev = s_next;
        }
    }
    let psi = MatrixProductState::new(sites, CanonicalForm::Left)?;
    Ok(WarmupOutcome {
        psi,
        psd_clip: clip_total,
    })
}

/// Alternating right-to-left / left-to-right sweeps. During a pass, each
/// bond's measured singular values are compared against the targets
/// (accumulating ε = Σ_l ε_l) and then replaced by the targets, which is the
/// mechanism pulling the chain toward the requested spectra. Stops when
/// ε < delta or the pass budget is exhausted.
pub fn sweep(
    psi: &MatrixProductState,
    targets: &TargetSpectra,
    max_sweeps: usize,
    delta: f64,
) -> Result<ConstructionReport> {
    sweep_with_options(
        psi,
        targets,
        &SweepOptions {
            max_sweeps,
            delta,
            ..SweepOptions::default()
        },
    )
}

pub fn sweep_with_options(
    psi: &MatrixProductState,
    targets: &TargetSpectra,
    opts: &SweepOptions,
) -> Result<ConstructionReport> {
    let d = psi.local_dim();
    let l = psi.len();
    if targets.sites() != l || targets.local_dim() != d {
        return Err(Error::DimensionMismatch(
            "targets do not match the state".into(),
        ));
    }
    if psi.bond_dims() != targets.bond_dims() {
        return Err(Error::DimensionMismatch(format!(
            "state bond dims {:?} do not match target ranks {:?}",
            psi.bond_dims(),
            targets.bond_dims()
        )));
    }
    let start = if psi.canonical_form() == CanonicalForm::Left {
        psi.clone()
    } else {
        canonicalize_left(psi)?
    };
    let mut sites: Vec<SiteTensor> = (0..l).map(|i| start.site(i).clone()).collect();

    let mut converged = false;
    let mut sweeps_used = 0;
    let mut best_eps = f64::INFINITY;
    let mut stall_count = 0usize;

    for pass in 0..opts.max_sweeps {
        let mut eps_sum = 0.0;
        if pass % 2 == 0 {
            // Right-to-left: center starts at the last site.
            for i in (1..l).rev() {
                let m = sites[i].stack_horizontal();
                let (mut u, svals, mut vh) = linalg::svd_thin(&m)?;
                linalg::gauge_fix_svd(&mut u, &mut vh);
                let t = targets.spectrum(i).values();
                eps_sum += vec_distance(t, &svals);
                sites[i] = SiteTensor::from_horizontal(&vh, d)?;
                let carry = linalg::mul_diag(&u, t);
                sites[i - 1] = sites[i - 1].multiply_right(&carry);
            }
        } else {
            for i in 0..l - 1 {
                let m = sites[i].stack_vertical();
                let (mut u, svals, mut vh) = linalg::svd_thin(&m)?;
                linalg::gauge_fix_svd(&mut u, &mut vh);
                let t = targets.spectrum(i + 1).values();
                eps_sum += vec_distance(t, &svals);
                sites[i] = SiteTensor::from_vertical(&u, d)?;
                let carry = linalg::diag_mul(t, &vh);
                sites[i + 1] = sites[i + 1].multiply_left(&carry);
            }
        }
        sweeps_used += 1;
        if eps_sum < opts.delta {
            converged = true;
            break;
        }
        if let Some(window) = opts.stall_window {
            if eps_sum < best_eps * (1.0 - opts.stall_rel_improvement) {
                best_eps = eps_sum;
                stall_count = 0;
            } else {
                stall_count += 1;
                if stall_count >= window {
                    break;
                }
            }
        }
    }

    let final_psi = canonicalize_left(&MatrixProductState::new(sites, CanonicalForm::None)?)?;
    let mut per_bond_error = Vec::with_capacity(l - 1);
    for bond in 1..l {
        let measured = extract_spectrum(&final_psi, bond)?;
        per_bond_error.push(measured.eigenvalue_distance(targets.spectrum(bond)));
    }
    let total_error = per_bond_error.iter().sum::<f64>() / per_bond_error.len() as f64;
    Ok(ConstructionReport {
        psi: final_psi,
        targets: targets.clone(),
        per_bond_error,
        total_error,
        sweeps_used,
        converged,
        warmup_psd_clip: 0.0,
        seed: None,
    })
}

/// End-to-end construction: samples targets for the ensemble spec, runs the
/// warmup, then sweeps. The report embeds the targets, the seed, and the
/// warmup PSD-clipping magnitude.
pub fn build_state<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<ConstructionReport> {
    build_state_with(spec, rng, &SweepOptions::default())
}

pub fn build_state_with<R: Rng + ?Sized>(
    spec: &EnsembleSpec,
    rng: &mut R,
    opts: &SweepOptions,
) -> Result<ConstructionReport> {
    let targets = TargetSpectra::sample(spec, rng)?;
    let wu = warmup(&targets, spec, rng)?;
    let mut report = sweep_with_options(&wu.psi, &targets, opts)?;
    report.warmup_psd_clip = wu.psd_clip;
    report.seed = Some(spec.seed);
    Ok(report)
}
