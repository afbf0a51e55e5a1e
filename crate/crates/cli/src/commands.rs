//! Subcommand implementations. Each command resolves its effective
//! parameters, runs the corresponding library routine, and writes data
//! tables plus JSON sidecars into the output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use sigmens::construct::{build_state_with, sweep_with_options, ConstructionReport, SweepOptions};
use sigmens::diagnostics::{
    admission_rate_with, bond_dimension_surface, entropy_surface, find_sigma_critical,
    mean_ordered_spectrum,
};
use sigmens::mps::MatrixProductState;
use sigmens::oracles;
use sigmens::rng::StreamFactory;
use sigmens::sphere::{EnsembleSpec, Sigma};
use sigmens::table::{DataTable, Sidecar};

use crate::CliError;

fn write_pair(
    out: &Path,
    stem: &str,
    table: &DataTable,
    mut sidecar: Sidecar,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Config(format!("output dir: {e}")))?;
    sidecar.columns = table.column_names();
    table
        .write_file(out.join(format!("{stem}.txt")))
        .map_err(CliError::Core)?;
    sidecar
        .write_file(out.join(format!("{stem}.meta.json")))
        .map_err(CliError::Core)?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SampleSpectraParams {
    pub n: usize,
    pub sigma: Sigma,
    pub samples: u64,
    pub seed: u64,
}

pub fn sample_spectra(params: SampleSpectraParams, out: &Path) -> Result<i32, CliError> {
    if params.n < 2 {
        return Err(CliError::Config(format!(
            "invalid dimension: n = {}, need n >= 2",
            params.n
        )));
    }
    let factory = StreamFactory::new(params.seed);
    let ms = mean_ordered_spectrum(params.n, params.sigma, params.samples, &factory)
        .map_err(CliError::Core)?;
    let mut table = DataTable::new();
    table
        .push_column("index", (1..=params.n).map(|i| i as f64).collect())
        .map_err(CliError::Core)?;
    table
        .push_column("mean_lambda", ms.mean.clone())
        .map_err(CliError::Core)?;
    let mut sidecar = Sidecar::new(
        "sample-spectra",
        serde_json::to_value(&params).map_err(|e| CliError::Config(e.to_string()))?,
    );
    sidecar.seed = Some(params.seed);
    sidecar.n_samples = Some(params.samples);
    sidecar
        .standard_errors
        .insert("mean_lambda".into(), ms.standard_error);
    write_pair(out, "mean_spectrum", &table, sidecar)?;
    Ok(0)
}

#[derive(Debug, Serialize)]
pub struct BuildParams {
    pub length: usize,
    pub sigma: Sigma,
    pub chi: usize,
    pub trunc: f64,
    pub seed: u64,
    pub max_sweeps: usize,
    pub delta: f64,
}

pub fn build(params: BuildParams, out: &Path) -> Result<i32, CliError> {
    let spec = EnsembleSpec {
        sigma: params.sigma,
        sites: params.length,
        local_dim: 2,
        chi_max: params.chi,
        trunc_threshold: params.trunc,
        seed: params.seed,
    };
    spec.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let opts = SweepOptions {
        max_sweeps: params.max_sweeps,
        delta: params.delta,
        ..SweepOptions::default()
    };
    let mut rng = StreamFactory::new(params.seed).stream(0);
    let report = build_state_with(&spec, &mut rng, &opts).map_err(CliError::Core)?;
    write_report(&report, &params, "build", out)?;
    Ok(if report.converged { 0 } else { 3 })
}

fn write_report<P: Serialize>(
    report: &ConstructionReport,
    params: &P,
    command: &str,
    out: &Path,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Config(format!("output dir: {e}")))?;
    report
        .psi
        .write_checkpoint(out.join("state.mps"))
        .map_err(CliError::Core)?;
    std::fs::write(
        out.join("report.json"),
        report.to_json().map_err(CliError::Core)?,
    )
    .map_err(|e| CliError::Core(e.into()))?;
    let mut sidecar = Sidecar::new(
        command,
        serde_json::to_value(params).map_err(|e| CliError::Config(e.to_string()))?,
    );
    sidecar.seed = report.seed;
    sidecar.columns = vec!["report.json".into(), "state.mps".into()];
    sidecar
        .write_file(out.join(format!("{command}.meta.json")))
        .map_err(CliError::Core)?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SweepParams {
    pub state: PathBuf,
    pub report: PathBuf,
    pub max_sweeps: usize,
    pub delta: f64,
}

pub fn sweep_cmd(params: SweepParams, out: &Path) -> Result<i32, CliError> {
    let psi = MatrixProductState::read_checkpoint(&params.state)
        .map_err(|e| CliError::Config(format!("state {}: {e}", params.state.display())))?;
    let prev_text = std::fs::read_to_string(&params.report)
        .map_err(|e| CliError::Config(format!("report {}: {e}", params.report.display())))?;
    let prev = ConstructionReport::from_json(&prev_text)
        .map_err(|e| CliError::Config(format!("report {}: {e}", params.report.display())))?;
    if psi.bond_dims() != prev.targets.bond_dims() {
        return Err(CliError::Config(
            "state bond dimensions do not match the report's targets".into(),
        ));
    }
    let opts = SweepOptions {
        max_sweeps: params.max_sweeps,
        delta: params.delta,
        ..SweepOptions::default()
    };
    let mut report =
        sweep_with_options(&psi, &prev.targets, &opts).map_err(CliError::Core)?;
    report.seed = prev.seed;
    report.warmup_psd_clip = prev.warmup_psd_clip;
    write_report(&report, &params, "sweep", out)?;
    Ok(if report.converged { 0 } else { 3 })
}

#[derive(Debug, Serialize)]
pub struct AdmissionParams {
    pub length: Vec<usize>,
    pub chi: Vec<usize>,
    pub sigma: Vec<Sigma>,
    pub eps: f64,
    pub states: usize,
    pub trunc: f64,
    pub seed: u64,
    pub max_sweeps: usize,
    pub delta: f64,
    pub stall_window: Option<usize>,
}

pub fn admission(params: AdmissionParams, out: &Path) -> Result<i32, CliError> {
    if params.length.is_empty() || params.chi.is_empty() || params.sigma.is_empty() {
        return Err(CliError::Config(
            "admission needs at least one length, chi, and sigma".into(),
        ));
    }
    let opts = SweepOptions {
        max_sweeps: params.max_sweeps,
        delta: params.delta,
        stall_window: params.stall_window,
        ..SweepOptions::default()
    };
    let factory = StreamFactory::new(params.seed);
    let mut table = DataTable::new();
    let mut extra = BTreeMap::new();
    let mut cell = 0u64;
    let rate_for = |sigma: Sigma, length: usize, chi: usize, cell: u64| {
        let spec = EnsembleSpec {
            sigma,
            sites: length,
            local_dim: 2,
            chi_max: chi,
            trunc_threshold: params.trunc,
            seed: params.seed,
        };
        admission_rate_with(&spec, params.eps, params.states, &factory.subfactory(cell), &opts)
    };
    if params.sigma.len() > 1 {
        // Rate as a function of sigma at fixed L and chi.
        if params.length.len() != 1 || params.chi.len() != 1 {
            return Err(CliError::Config(
                "sigma scan requires exactly one length and one chi".into(),
            ));
        }
        let finite: Vec<f64> = params
            .sigma
            .iter()
            .map(|s| match s {
                Sigma::Finite(v) => Ok(*v),
                Sigma::Infinite => Err(CliError::Config(
                    "sigma scan requires finite sigma values".into(),
                )),
            })
            .collect::<Result<_, _>>()?;
        table
            .push_column("sigma", finite)
            .map_err(CliError::Core)?;
        let mut rates = Vec::new();
        let mut convs = Vec::new();
        for &s in &params.sigma {
            let rep = rate_for(s, params.length[0], params.chi[0], cell).map_err(CliError::Core)?;
            rates.push(rep.rate);
            convs.push(rep.converged_states as f64);
            cell += 1;
        }
        table.push_column("rate", rates).map_err(CliError::Core)?;
        extra.insert("converged_states".to_string(), convs);
    } else {
        // Rate as a function of L, one column per chi.
        table
            .push_column("L", params.length.iter().map(|&l| l as f64).collect())
            .map_err(CliError::Core)?;
        for &chi in &params.chi {
            let mut rates = Vec::new();
            for &length in &params.length {
                let rep = rate_for(params.sigma[0], length, chi, cell).map_err(CliError::Core)?;
                rates.push(rep.rate);
                cell += 1;
            }
            table
                .push_column(format!("rate_chi{chi}"), rates)
                .map_err(CliError::Core)?;
        }
    }
    let mut sidecar = Sidecar::new(
        "admission",
        serde_json::to_value(&params).map_err(|e| CliError::Config(e.to_string()))?,
    );
    sidecar.seed = Some(params.seed);
    sidecar.n_samples = Some(params.states as u64);
    sidecar.standard_errors = extra;
    write_pair(out, "admission", &table, sidecar)?;
    Ok(0)
}

#[derive(Debug, Serialize)]
pub struct PhaseDiagramParams {
    pub n: Vec<usize>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub points: usize,
    pub samples: u64,
    pub trunc: f64,
    pub seed: u64,
}

pub fn phase_diagram(params: PhaseDiagramParams, out: &Path) -> Result<i32, CliError> {
    if params.n.is_empty() {
        return Err(CliError::Config("phase-diagram needs at least one n".into()));
    }
    if !(params.sigma_min > 0.0) || params.sigma_max <= params.sigma_min {
        return Err(CliError::Config(format!(
            "invalid sigma range [{}, {}]",
            params.sigma_min, params.sigma_max
        )));
    }
    if params.points < 3 {
        return Err(CliError::Config("need at least 3 grid points".into()));
    }
    let grid: Vec<f64> = (0..params.points)
        .map(|i| {
            let t = i as f64 / (params.points - 1) as f64;
            (params.sigma_min.ln() + t * (params.sigma_max.ln() - params.sigma_min.ln())).exp()
        })
        .collect();
    let factory = StreamFactory::new(params.seed);
    let value = serde_json::to_value(&params).map_err(|e| CliError::Config(e.to_string()))?;
    if params.n.len() == 1 {
        // Full regression scan at a single n: sigma, slope, R^2 per row.
        let (point, rows) = find_sigma_critical(
            params.n[0],
            &grid,
            params.samples,
            params.trunc,
            &factory,
        )
        .map_err(CliError::Core)?;
        let mut table = DataTable::new();
        table
            .push_column("sigma", rows.iter().map(|r| r.sigma).collect())
            .map_err(CliError::Core)?;
        table
            .push_column("slope", rows.iter().map(|r| r.slope_a).collect())
            .map_err(CliError::Core)?;
        table
            .push_column("r_squared", rows.iter().map(|r| r.r_squared).collect())
            .map_err(CliError::Core)?;
        let mut sidecar = Sidecar::new("phase-diagram", value);
        sidecar.seed = Some(params.seed);
        sidecar.n_samples = Some(params.samples);
        sidecar.params["sigma_critical"] = json!(point.sigma_critical);
        sidecar.params["r_squared_min"] = json!(point.r_squared_min);
        sidecar.params["at_endpoint"] = json!(point.at_endpoint);
        write_pair(out, "sigma_scan", &table, sidecar)?;
    } else {
        // sigma_critical as a function of n (phase-diagram boundary).
        let mut crit = Vec::new();
        let mut r2 = Vec::new();
        for (i, &n) in params.n.iter().enumerate() {
            let (point, _) = find_sigma_critical(
                n,
                &grid,
                params.samples,
                params.trunc,
                &factory.subfactory(i as u64),
            )
            .map_err(CliError::Core)?;
            crit.push(point.sigma_critical);
            r2.push(point.r_squared_min);
        }
        let mut table = DataTable::new();
        table
            .push_column("n", params.n.iter().map(|&n| n as f64).collect())
            .map_err(CliError::Core)?;
        table
            .push_column("sigma_critical", crit)
            .map_err(CliError::Core)?;
        table
            .push_column("r_squared_min", r2)
            .map_err(CliError::Core)?;
        let mut sidecar = Sidecar::new("phase-diagram", value);
        sidecar.seed = Some(params.seed);
        sidecar.n_samples = Some(params.samples);
        write_pair(out, "phase_diagram", &table, sidecar)?;
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
pub struct SurfacesParams {
    pub l_max: usize,
    pub sigma_grid: Vec<Sigma>,
    pub samples: u64,
    pub trunc: f64,
    pub seed: u64,
}

pub fn surfaces(params: SurfacesParams, out: &Path) -> Result<i32, CliError> {
    if params.l_max < 1 {
        return Err(CliError::Config("l-max must be >= 1".into()));
    }
    let factory = StreamFactory::new(params.seed);
    let value = serde_json::to_value(&params).map_err(|e| CliError::Config(e.to_string()))?;

    let ent = entropy_surface(params.l_max, &params.sigma_grid, params.samples, &factory)
        .map_err(CliError::Core)?;
    let rank = bond_dimension_surface(
        params.l_max,
        &params.sigma_grid,
        params.trunc,
        params.samples,
        &factory.subfactory(u64::MAX),
    )
    .map_err(CliError::Core)?;

    for (stem, surf) in [("entropy_surface", &ent), ("bond_dimension_surface", &rank)] {
        let mut table = DataTable::new();
        table
            .push_column(
                "l",
                surf.subsystem_sizes.iter().map(|&l| l as f64).collect(),
            )
            .map_err(CliError::Core)?;
        let mut sidecar = Sidecar::new("surfaces", value.clone());
        for (g, sigma) in surf.sigmas.iter().enumerate() {
            let name = format!("sigma={sigma}");
            table
                .push_column(
                    name.clone(),
                    surf.mean.iter().map(|row| row[g]).collect(),
                )
                .map_err(CliError::Core)?;
            sidecar.standard_errors.insert(
                name,
                surf.standard_error.iter().map(|row| row[g]).collect(),
            );
        }
        sidecar.seed = Some(params.seed);
        sidecar.n_samples = Some(params.samples);
        write_pair(out, stem, &table, sidecar)?;
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
pub struct OracleCheckParams {
    pub n: Vec<usize>,
    pub length: Option<usize>,
    pub local_dim: usize,
}

pub fn oracle_check(params: OracleCheckParams) -> Result<i32, CliError> {
    use std::fmt::Write as _;
    let mut text = String::new();
    for &n in &params.n {
        let s = oracles::uniform_mean_entropy(n).map_err(CliError::Core)?;
        let _ = writeln!(text, "uniform_mean_entropy(n={n}) = {}", s.nats());
        for i in 1..=n.min(8) {
            let e = oracles::expected_unordered_eigenvalue(i, n).map_err(CliError::Core)?;
            let _ = writeln!(text, "expected_eigenvalue(i={i}, n={n}) = {e}");
        }
    }
    let _ = writeln!(
        text,
        "uniform_mean_entropy_limit = {}",
        oracles::uniform_mean_entropy_limit().nats()
    );
    if let Some(length) = params.length {
        for a in 1..=length / 2 {
            let s = oracles::page_mean_entropy(a, length, params.local_dim)
                .map_err(CliError::Core)?;
            let _ = writeln!(
                text,
                "page_mean_entropy(|A|={a}, L={length}, d={}) = {}",
                params.local_dim,
                s.nats()
            );
        }
    }
    // Tolerate a closed pipe (e.g. `| head`).
    use std::io::Write as _;
    match std::io::stdout().write_all(text.as_bytes()) {
        Ok(()) => Ok(0),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(0),
        Err(e) => Err(CliError::Core(e.into())),
    }
}
