//! Ensemble-level Monte Carlo statistics: mean ordered spectra, log-spectrum
//! regressions, the σ_critical phase boundary, admission rates, and entropy /
//! bond-dimension surfaces.
//!
//! Every estimator derives one random substream per sample index and reduces
//! partial results in a fixed chunk order, so outputs are bit-identical for a
//! given seed regardless of the worker-thread count. Means are reported with
//! standard errors; acceptance-style comparisons should be made in SE units.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{build_state_with, SweepOptions};
use crate::error::{Error, Result};
use crate::oracles::entropy_of;
use crate::rng::StreamFactory;
use crate::sphere::{sample_eigenvalues, EnsembleSpec, Sigma};

/// Samples per parallel work item; fixed so that chunk boundaries (and hence
/// floating-point reduction order) do not depend on the thread count.
const CHUNK: u64 = 256;

/// Running mean/variance accumulator per vector component (Welford, with
/// Chan's merge for combining chunks).
#[derive(Debug, Clone)]
struct VecStats {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl VecStats {
    fn new(dim: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    fn push(&mut self, values: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for (i, &v) in values.iter().enumerate() {
            let d = v - self.mean[i];
            self.mean[i] += d / n;
            self.m2[i] += d * (v - self.mean[i]);
        }
    }

    fn merge(mut self, other: VecStats) -> VecStats {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * nb / n;
            self.m2[i] += other.m2[i] + d * d * na * nb / n;
        }
        self.count += other.count;
        self
    }

    fn standard_errors(&self) -> Vec<f64> {
        if self.count < 2 {
            return vec![f64::NAN; self.mean.len()];
        }
        let n = self.count as f64;
        self.m2
            .iter()
            .map(|m2| (m2 / (n - 1.0) / n).sqrt())
            .collect()
    }
}

/// Evaluates `f` once per sample index over chunked, order-stable parallel
/// reduction into component-wise means and standard errors.
fn chunked_vector_mean<F>(dim: usize, n_samples: u64, f: F) -> VecStats
where
    F: Fn(u64, &mut Vec<f64>) + Sync,
{
    let n_chunks = n_samples.div_ceil(CHUNK);
    let partials: Vec<VecStats> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n_samples);
            let mut stats = VecStats::new(dim);
            let mut buf = vec![0.0; dim];
            for idx in lo..hi {
                f(idx, &mut buf);
                stats.push(&buf);
            }
            stats
        })
        .collect();
    partials
        .into_iter()
        .fold(VecStats::new(dim), VecStats::merge)
}

/// Element-wise mean of descending-ordered eigenvalue draws, with standard
/// errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeanSpectrum {
    pub mean: Vec<f64>,
    pub standard_error: Vec<f64>,
    pub n_samples: u64,
}

/// Draws `n_samples` eigenvalue sets, sorts each in descending order, and
/// returns the element-wise mean.
pub fn mean_ordered_spectrum(
    n: usize,
    sigma: Sigma,
    n_samples: u64,
    factory: &StreamFactory,
) -> Result<MeanSpectrum> {
    if n_samples == 0 {
        return Err(Error::InvalidSpec("n_samples = 0".into()));
    }
    if n < 2 {
        return Err(Error::InvalidDimension { n, min: 2 });
    }
    let stats = chunked_vector_mean(n, n_samples, |idx, buf| {
        let mut rng = factory.stream(idx);
        let lam = sample_eigenvalues(n, sigma, &mut rng)
            .expect("validated dimensions")
            .sorted_descending();
        buf.copy_from_slice(lam.values());
    });
    Ok(MeanSpectrum {
        mean: stats.mean.clone(),
        standard_error: stats.standard_errors(),
        n_samples,
    })
}

/// Mean von Neumann entropy of raw eigenvalue draws at dimension `n`,
/// returned as (mean, standard error).
pub fn mean_entropy(
    n: usize,
    sigma: Sigma,
    n_samples: u64,
    factory: &StreamFactory,
) -> Result<(f64, f64)> {
    if n_samples == 0 {
        return Err(Error::InvalidSpec("n_samples = 0".into()));
    }
    let stats = chunked_vector_mean(1, n_samples, |idx, buf| {
        let mut rng = factory.stream(idx);
        let lam = sample_eigenvalues(n, sigma, &mut rng).expect("validated dimensions");
        buf[0] = entropy_of(lam.values()).expect("nonnegative eigenvalues").nats();
    });
    Ok((stats.mean[0], stats.standard_errors()[0]))
}

/// Mean count of eigenvalues above `trunc`, returned as (mean, SE).
pub fn mean_effective_rank(
    n: usize,
    sigma: Sigma,
    trunc: f64,
    n_samples: u64,
    factory: &StreamFactory,
) -> Result<(f64, f64)> {
    if n_samples == 0 {
        return Err(Error::InvalidSpec("n_samples = 0".into()));
    }
    let stats = chunked_vector_mean(1, n_samples, |idx, buf| {
        let mut rng = factory.stream(idx);
        let lam = sample_eigenvalues(n, sigma, &mut rng).expect("validated dimensions");
        buf[0] = lam.values().iter().filter(|&&v| v > trunc).count() as f64;
    });
    Ok((stats.mean[0], stats.standard_errors()[0]))
}

/// Ordinary-least-squares fit of ln(λ̄_i) against the 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub slope_a: f64,
    pub intercept_b: f64,
    pub r_squared: f64,
}

/// Fits ln(values[i]) against i = 1..=len. All entries must be positive.
/// A zero-variance input (all logs equal) fits perfectly flat by convention:
/// slope 0, R² = 1.
pub fn fit_log_spectrum(values: &[f64]) -> Result<RegressionReport> {
    let pairs: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v > 0.0 {
                Ok(((i + 1) as f64, v.ln()))
            } else {
                Err(Error::NonPositiveEntry { index: i, value: v })
            }
        })
        .collect::<Result<_>>()?;
    fit_points(&pairs)
}

/// Same fit, excluding entries at or below `threshold` while keeping the
/// surviving entries' original indices. Avoids -inf logs from truncated
/// spectra.
pub fn fit_log_spectrum_above(values: &[f64], threshold: f64) -> Result<RegressionReport> {
    let pairs: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > threshold)
        .map(|(i, &v)| ((i + 1) as f64, v.ln()))
        .collect();
    if pairs.is_empty() {
        return Err(Error::EmptySpectrum { threshold });
    }
    fit_points(&pairs)
}

fn fit_points(pairs: &[(f64, f64)]) -> Result<RegressionReport> {
    let n = pairs.len() as f64;
    let x_mean = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut sst = 0.0;
    for &(x, y) in pairs {
        sxy += (x - x_mean) * (y - y_mean);
        sxx += (x - x_mean) * (x - x_mean);
        sst += (y - y_mean) * (y - y_mean);
    }
    if sst == 0.0 || sxx == 0.0 {
        return Ok(RegressionReport {
            slope_a: 0.0,
            intercept_b: y_mean,
            r_squared: 1.0,
        });
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let mut ss_res = 0.0;
    for &(x, y) in pairs {
        let r = y - (slope * x + intercept);
        ss_res += r * r;
    }
    Ok(RegressionReport {
        slope_a: slope,
        intercept_b: intercept,
        r_squared: 1.0 - ss_res / sst,
    })
}

/// One grid point of the σ scan behind the phase diagram.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SigmaScanRow {
    pub sigma: f64,
    pub slope_a: f64,
    pub intercept_b: f64,
    pub r_squared: f64,
}

/// Result of minimizing R² over a σ grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseDiagramPoint {
    pub n: usize,
    pub sigma_critical: f64,
    pub r_squared_min: f64,
    /// Set when the minimum sits on the first or last grid point, i.e. no
    /// interior minimum was found.
    pub at_endpoint: bool,
}

/// Regression scan over a σ grid at fixed subsystem dimension `n`. Entries
/// of the mean spectrum at or below `trunc` are excluded from each fit.
pub fn sigma_scan(
    n: usize,
    sigma_grid: &[f64],
    n_samples: u64,
    trunc: f64,
    factory: &StreamFactory,
) -> Result<Vec<SigmaScanRow>> {
    sigma_grid
        .iter()
        .enumerate()
        .map(|(g, &sigma)| {
            let sub = factory.subfactory(g as u64);
            let spectrum = mean_ordered_spectrum(n, Sigma::Finite(sigma), n_samples, &sub)?;
            let fit = fit_log_spectrum_above(&spectrum.mean, trunc)?;
            Ok(SigmaScanRow {
                sigma,
                slope_a: fit.slope_a,
                intercept_b: fit.intercept_b,
                r_squared: fit.r_squared,
            })
        })
        .collect()
}

/// Finds σ_critical = argmin R² over the grid; an endpoint minimum is
/// flagged rather than rejected.
pub fn find_sigma_critical(
    n: usize,
    sigma_grid: &[f64],
    n_samples: u64,
    trunc: f64,
    factory: &StreamFactory,
) -> Result<(PhaseDiagramPoint, Vec<SigmaScanRow>)> {
    if sigma_grid.len() < 3 {
        return Err(Error::InvalidSpec(format!(
            "sigma grid needs >= 3 points, got {}",
            sigma_grid.len()
        )));
    }
    let rows = sigma_scan(n, sigma_grid, n_samples, trunc, factory)?;
    let mut min_idx = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.r_squared < rows[min_idx].r_squared {
            min_idx = i;
        }
    }
    let point = PhaseDiagramPoint {
        n,
        sigma_critical: rows[min_idx].sigma,
        r_squared_min: rows[min_idx].r_squared,
        at_endpoint: min_idx == 0 || min_idx == rows.len() - 1,
    };
    Ok((point, rows))
}

/// Construction success statistics at tolerance ε.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissionReport {
    pub epsilon: f64,
    pub n_states: usize,
    /// Exactly (count of errors < ε) / n_states.
    pub rate: f64,
    /// Per-state spectrum-matching errors (mean two-norm eigenvalue
    /// deviation over all bipartitions); infinite for failed constructions.
    pub errors: Vec<f64>,
    /// How many states also reached sweep convergence.
    pub converged_states: usize,
}

/// Runs `build_state` once per state index on a derived substream and
/// reports the fraction with error below ε. Construction failures count as
/// non-admitted.
pub fn admission_rate(
    spec: &EnsembleSpec,
    epsilon: f64,
    n_states: usize,
    factory: &StreamFactory,
) -> Result<AdmissionReport> {
    admission_rate_with(spec, epsilon, n_states, factory, &SweepOptions::default())
}

pub fn admission_rate_with(
    spec: &EnsembleSpec,
    epsilon: f64,
    n_states: usize,
    factory: &StreamFactory,
    opts: &SweepOptions,
) -> Result<AdmissionReport> {
    if n_states == 0 {
        return Err(Error::InvalidSpec("n_states = 0".into()));
    }
    spec.validate()?;
    let outcomes: Vec<(f64, bool)> = (0..n_states as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = factory.stream(idx);
            match build_state_with(spec, &mut rng, opts) {
                Ok(report) => (report.total_error, report.converged),
                Err(_) => (f64::INFINITY, false),
            }
        })
        .collect();
    let errors: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let converged_states = outcomes.iter().filter(|o| o.1).count();
    let admitted = errors.iter().filter(|&&e| e < epsilon).count();
    Ok(AdmissionReport {
        epsilon,
        n_states,
        rate: admitted as f64 / n_states as f64,
        errors,
        converged_states,
    })
}

/// Mean surface over (subsystem size l, σ) cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Surface {
    pub subsystem_sizes: Vec<usize>,
    pub sigmas: Vec<Sigma>,
    /// mean[l_index][sigma_index]
    pub mean: Vec<Vec<f64>>,
    pub standard_error: Vec<Vec<f64>>,
    pub n_samples: u64,
}

/// Mean von Neumann entropy of spectra drawn at n = 2^l for each (l, σ).
pub fn entropy_surface(
    l_max: usize,
    sigma_grid: &[Sigma],
    n_samples: u64,
    factory: &StreamFactory,
) -> Result<Surface> {
    surface(l_max, sigma_grid, n_samples, factory, |n, sigma, sub| {
        mean_entropy(n, sigma, n_samples, sub)
    })
}

/// Mean effective rank (eigenvalues above `trunc`) at n = 2^l per (l, σ).
pub fn bond_dimension_surface(
    l_max: usize,
    sigma_grid: &[Sigma],
    trunc: f64,
    n_samples: u64,
    factory: &StreamFactory,
) -> Result<Surface> {
    surface(l_max, sigma_grid, n_samples, factory, |n, sigma, sub| {
        mean_effective_rank(n, sigma, trunc, n_samples, sub)
    })
}

fn surface<F>(
    l_max: usize,
    sigma_grid: &[Sigma],
    n_samples: u64,
    factory: &StreamFactory,
    cell: F,
) -> Result<Surface>
where
    F: Fn(usize, Sigma, &StreamFactory) -> Result<(f64, f64)>,
{
    if l_max < 1 {
        return Err(Error::InvalidSpec("l_max = 0".into()));
    }
    if sigma_grid.is_empty() {
        return Err(Error::InvalidSpec("empty sigma grid".into()));
    }
    let mut mean = Vec::with_capacity(l_max);
    let mut se = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let n = 1usize << l;
        let mut row_mean = Vec::with_capacity(sigma_grid.len());
        let mut row_se = Vec::with_capacity(sigma_grid.len());
        for (g, &sigma) in sigma_grid.iter().enumerate() {
            let sub = factory.subfactory(((l - 1) * sigma_grid.len() + g) as u64);
            let (m, s) = cell(n, sigma, &sub)?;
            row_mean.push(m);
            row_se.push(s);
        }
        mean.push(row_mean);
        se.push(row_se);
    }
    Ok(Surface {
        subsystem_sizes: (1..=l_max).collect(),
        sigmas: sigma_grid.to_vec(),
        mean,
        standard_error: se,
        n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_exact_exponential() {
        let values: Vec<f64> = (1..=32).map(|i| (-0.5 * i as f64).exp()).collect();
        let fit = fit_log_spectrum(&values).unwrap();
        assert!((fit.slope_a + 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_constant_spectrum_convention() {
        let fit = fit_log_spectrum(&[0.25; 8]).unwrap();
        assert_eq!(fit.slope_a, 0.0);
        assert_eq!(fit.r_squared, 1.0);
        assert!((fit.intercept_b - 0.25f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_nonpositive() {
        assert!(matches!(
            fit_log_spectrum(&[0.5, 0.0, 0.2]),
            Err(Error::NonPositiveEntry { index: 1, .. })
        ));
    }

    #[test]
    fn fit_above_threshold_keeps_indices() {
        // Exact exponential with a truncated tail still fits exactly when
        // the excluded entries keep their original index positions.
        let mut values: Vec<f64> = (1..=20).map(|i| (-2.0 * i as f64).exp()).collect();
        for v in values.iter_mut().skip(15) {
            *v = 0.0;
        }
        let fit = fit_log_spectrum_above(&values, 0.0).unwrap();
        assert!((fit.slope_a + 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_synthetic_recovery_property() {
        // 100 random (a, b) pairs recovered to 1e-10 with R^2 = 1.
        let factory = StreamFactory::new(8);
        use rand::Rng;
        for trial in 0..100u64 {
            let mut rng = factory.stream(trial);
            let a = -2.0 * rng.random::<f64>() - 0.01;
            let b = 4.0 * rng.random::<f64>() - 2.0;
            let values: Vec<f64> = (1..=24).map(|i| (a * i as f64 + b).exp()).collect();
            let fit = fit_log_spectrum(&values).unwrap();
            assert!((fit.slope_a - a).abs() < 1e-10);
            assert!((fit.intercept_b - b).abs() < 1e-10);
            assert!((fit.r_squared - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn mean_spectrum_flat_limit() {
        let factory = StreamFactory::new(4);
        let ms =
            mean_ordered_spectrum(16, Sigma::Finite(1e-9), 50, &factory).unwrap();
        for &v in &ms.mean {
            assert!((v - 1.0 / 16.0).abs() < 1e-6);
        }
    }

    #[test]
    fn mean_spectrum_uniform_pair_quadrature() {
        // 1-D quadrature oracle for n = 2: E[max] and E[min] of
        // (cos²φ, sin²φ) over φ uniform on [0, π/2]: 1/2 ± 1/π.
        let expect_max = 0.5 + 1.0 / std::f64::consts::PI;
        let expect_min = 0.5 - 1.0 / std::f64::consts::PI;
        let factory = StreamFactory::new(6);
        let ms = mean_ordered_spectrum(2, Sigma::Infinite, 200_000, &factory).unwrap();
        let sum: f64 = ms.mean.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(
            (ms.mean[0] - expect_max).abs() < 3.0 * ms.standard_error[0],
            "{} vs {expect_max}",
            ms.mean[0]
        );
        assert!((ms.mean[1] - expect_min).abs() < 3.0 * ms.standard_error[1]);
    }

    #[test]
    fn mean_spectrum_thread_invariance() {
        let factory = StreamFactory::new(12);
        let base = mean_ordered_spectrum(8, Sigma::Infinite, 1000, &factory).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let alt = pool
            .install(|| mean_ordered_spectrum(8, Sigma::Infinite, 1000, &factory))
            .unwrap();
        assert_eq!(base.mean, alt.mean);
        assert_eq!(base.standard_error, alt.standard_error);
    }

    #[test]
    fn admission_rate_trivial_epsilon() {
        let spec = EnsembleSpec {
            sigma: Sigma::Finite(1e-9),
            sites: 4,
            local_dim: 2,
            chi_max: 4,
            trunc_threshold: 1e-16,
            seed: 3,
        };
        let factory = StreamFactory::new(spec.seed);
        let report = admission_rate(&spec, f64::INFINITY, 8, &factory).unwrap();
        assert_eq!(report.rate, 1.0);
        assert_eq!(report.errors.len(), 8);
    }

    #[test]
    fn admission_rate_deterministic_and_thread_invariant() {
        let spec = EnsembleSpec {
            sigma: Sigma::Infinite,
            sites: 5,
            local_dim: 2,
            chi_max: 4,
            trunc_threshold: 1e-16,
            seed: 21,
        };
        let opts = SweepOptions {
            max_sweeps: 30,
            delta: 1e-4,
            ..Default::default()
        };
        let factory = StreamFactory::new(spec.seed);
        let a = admission_rate_with(&spec, 1e-4, 16, &factory, &opts).unwrap();
        let b = admission_rate_with(&spec, 1e-4, 16, &factory, &opts).unwrap();
        assert_eq!(a.errors, b.errors);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let c = pool
            .install(|| admission_rate_with(&spec, 1e-4, 16, &factory, &opts))
            .unwrap();
        assert_eq!(a.errors, c.errors);
        assert_eq!(a.rate, c.rate);
    }

    #[test]
    fn entropy_surface_flat_column() {
        let factory = StreamFactory::new(5);
        let surf = entropy_surface(4, &[Sigma::Finite(1e-9)], 10, &factory).unwrap();
        for (row, &l) in surf.mean.iter().zip(&surf.subsystem_sizes) {
            let expect = l as f64 * std::f64::consts::LN_2;
            assert!((row[0] - expect).abs() < 1e-4, "l = {l}: {}", row[0]);
        }
    }

    #[test]
    fn rank_surface_limits() {
        let factory = StreamFactory::new(7);
        let surf =
            bond_dimension_surface(4, &[Sigma::Finite(1e-9)], 1e-16, 10, &factory).unwrap();
        for (row, &l) in surf.mean.iter().zip(&surf.subsystem_sizes) {
            assert_eq!(row[0], (1usize << l) as f64, "l = {l}");
        }
        // trunc = 0 keeps everything.
        let surf = bond_dimension_surface(3, &[Sigma::Infinite], 0.0, 10, &factory).unwrap();
        for (row, &l) in surf.mean.iter().zip(&surf.subsystem_sizes) {
            assert_eq!(row[0], (1usize << l) as f64, "l = {l}");
        }
    }

    #[test]
    fn sigma_critical_interior_flagging() {
        // Deterministic scan plus endpoint detection on a grid that sits
        // entirely in the area-law regime, where R^2 rises monotonically and
        // the minimum lands on the first grid point.
        let factory = StreamFactory::new(42);
        let grid = [0.01, 0.05, 0.25];
        let (point, rows) = find_sigma_critical(16, &grid, 200, 1e-16, &factory).unwrap();
        assert_eq!(rows.len(), 3);
        let (p2, _) = find_sigma_critical(16, &grid, 200, 1e-16, &factory).unwrap();
        assert_eq!(point.sigma_critical, p2.sigma_critical);
        assert_eq!(point.r_squared_min, p2.r_squared_min);

        let monotone_grid = [0.4, 0.7, 1.0];
        let (endpoint, _) =
            find_sigma_critical(16, &monotone_grid, 400, 1e-16, &factory).unwrap();
        assert!(endpoint.at_endpoint, "expected an endpoint minimum");
    }

    #[test]
    fn entropy_surface_uniform_column_matches_closed_form() {
        // The sigma = inf column reproduces the closed-form mean entropy of
        // uniform sphere sampling within 3 SE at every subsystem size.
        let factory = StreamFactory::new(31);
        let surf = entropy_surface(6, &[Sigma::Infinite], 2000, &factory).unwrap();
        for ((row, se), &l) in surf
            .mean
            .iter()
            .zip(&surf.standard_error)
            .zip(&surf.subsystem_sizes)
        {
            let oracle = crate::oracles::uniform_mean_entropy(1 << l).unwrap().nats();
            assert!(
                (row[0] - oracle).abs() < 3.0 * se[0],
                "l = {l}: {} vs {oracle} (se {})",
                row[0],
                se[0]
            );
        }
    }

    #[test]
    fn entropy_decreases_with_sigma() {
        // Statistical trend at fixed l: wider distributions mean less
        // entanglement, within 3 SE slack per step.
        let factory = StreamFactory::new(77);
        let grid = [
            Sigma::Finite(0.05),
            Sigma::Finite(0.2),
            Sigma::Finite(1.0),
            Sigma::Infinite,
        ];
        let surf = entropy_surface(4, &grid, 400, &factory).unwrap();
        let row = &surf.mean[3];
        let se = &surf.standard_error[3];
        for g in 1..grid.len() {
            let slack = 3.0 * (se[g - 1].powi(2) + se[g].powi(2)).sqrt();
            assert!(
                row[g] <= row[g - 1] + slack,
                "entropy rose from {} to {} between grid points {g}",
                row[g - 1],
                row[g]
            );
        }
        assert!(row[0] > row[grid.len() - 1]);
    }
}
