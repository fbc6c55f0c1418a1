//! End-to-end experiment execution and the reference table sweeps.

use std::path::PathBuf;
use std::time::Instant;

use crate::admm::{multichannel_solve, split_channels, stack_channels, ConvergenceTrace, Fidelity, TvFlavor};
use crate::error::{Error, Result};
use crate::experiments::config::{Example, ExperimentConfig};
use crate::experiments::images::{flower_scene, head_phantom};
use crate::experiments::metrics::{relative_error, snr, snr_clamped};
use crate::experiments::pnm::{read_pnm, write_pnm};
use crate::experiments::report::{write_traces, SummaryRow};
use crate::linalg::DenseMatrix;
use crate::operators::{cross_channel_matrix, gaussian_toeplitz, multichannel_blur, phillips_problem};

/// Clean and degraded data plus the blur factors of one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentProblem {
    pub clean: Vec<DenseMatrix>,
    pub observed: Vec<DenseMatrix>,
    pub mix: DenseMatrix,
    pub row_blur: DenseMatrix,
    pub col_blur: DenseMatrix,
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub config: ExperimentConfig,
    pub restored: Vec<DenseMatrix>,
    /// One trace per independently solved channel, otherwise a single one.
    pub traces: Vec<ConvergenceTrace>,
    pub summary: SummaryRow,
    /// SNR of the restoration clamped to `[0, 1]`; absent for Phillips.
    pub snr_clamped: Option<f64>,
    pub wall_s: f64,
    /// Files written by the run.
    pub written: Vec<PathBuf>,
}

impl ReportBundle {
    pub fn iterations(&self) -> usize {
        self.summary.iters
    }

    pub fn metric(&self) -> f64 {
        self.summary.metric_value
    }
}

fn blur_factor(sigma: f64, band: usize, dim: usize) -> Result<DenseMatrix> {
    if sigma == 0.0 {
        Ok(DenseMatrix::identity(dim))
    } else {
        gaussian_toeplitz(sigma, band, dim)
    }
}

fn luminance(channels: Vec<DenseMatrix>) -> DenseMatrix {
    match channels.len() {
        3 => {
            let mut y = channels[0].scaled(0.299);
            y.axpy(0.587, &channels[1]);
            y.axpy(0.114, &channels[2]);
            y
        }
        _ => channels.into_iter().next().expect("decoder returns at least one channel"),
    }
}

fn ground_truth(config: &ExperimentConfig) -> Result<Vec<DenseMatrix>> {
    let rgb = matches!(config.example, Example::Rgb | Example::CrossChannel);
    match (&config.input, config.example) {
        (Some(_), Example::Phillips) => Err(Error::Config("the phillips example takes no input image".into())),
        (None, Example::Phillips) => Ok(vec![phillips_problem(config.size)?.x_true]),
        (Some(path), _) => {
            let channels = read_pnm(path)?;
            if rgb {
                if channels.len() != 3 {
                    return Err(Error::Config(format!("{} is not an RGB image", path.display())));
                }
                Ok(channels)
            } else {
                Ok(vec![luminance(channels)])
            }
        }
        (None, _) if rgb => Ok(flower_scene(config.size)?.to_vec()),
        (None, _) => Ok(vec![head_phantom(config.size)?]),
    }
}

/// Loads or generates the ground truth, blurs it and adds noise.
pub fn build_problem(config: &ExperimentConfig) -> Result<ExperimentProblem> {
    config.validate()?;
    let clean = ground_truth(config)?;
    let k = clean.len();
    let (m, n) = clean[0].shape();
    let (row_blur, col_blur) = if config.example == Example::Phillips {
        let p = phillips_problem(config.size)?;
        (p.h2, p.h1)
    } else {
        (blur_factor(config.sigma, config.band, m)?, blur_factor(config.sigma, config.band, n)?)
    };
    let mix = if config.cross_channel && k == 3 {
        cross_channel_matrix()
    } else {
        DenseMatrix::identity(k)
    };
    let blurred = multichannel_blur(&mix, &row_blur, &col_blur)?.apply(&stack_channels(&clean)?)?;
    let observed = if config.noise.level > 0.0 {
        config.noise.apply(&blurred)?
    } else {
        blurred
    };
    Ok(ExperimentProblem {
        observed: split_channels(&observed, k)?,
        clean,
        mix,
        row_blur,
        col_blur,
    })
}

/// Builds the problem, restores it, computes the metric and writes the
/// configured outputs. A numeric failure still writes the partial trace.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ReportBundle> {
    let problem = build_problem(config)?;
    let start = Instant::now();
    let out = multichannel_solve(
        &problem.mix,
        &problem.row_blur,
        &problem.col_blur,
        &problem.observed,
        config.solver,
        config.mode,
    );
    let out = match out {
        Ok(o) => o,
        Err(Error::NumericFailure { iteration, trace }) => {
            if let Some(path) = &config.trace {
                write_traces(path, std::slice::from_ref(&trace))?;
            }
            return Err(Error::NumericFailure { iteration, trace });
        }
        Err(e) => return Err(e),
    };
    let wall_s = start.elapsed().as_secs_f64();

    let restored_all = stack_channels(&out.channels)?;
    let clean_all = stack_channels(&problem.clean)?;
    let phillips = config.example == Example::Phillips;
    let (metric_name, metric_value, clamped) = if phillips {
        ("relative_error", relative_error(&restored_all, &clean_all)?, None)
    } else {
        ("snr", snr(&restored_all, &clean_all)?, Some(snr_clamped(&restored_all, &clean_all)?))
    };
    let summary = SummaryRow {
        experiment: config.example.label().to_string(),
        mode: config.mode.label().to_string(),
        tv: config.solver.tv.label().to_string(),
        mu: config.solver.mu,
        beta: config.solver.beta,
        rho: (config.mode == Fidelity::L1).then_some(config.solver.rho),
        noise: config.noise.level,
        iters: out.iterations(),
        metric_name: metric_name.to_string(),
        metric_value,
    };

    let mut written = Vec::new();
    if let Some(path) = &config.output {
        if phillips {
            let peak = restored_all.max_abs();
            let scale = if peak > 0.0 { 1.0 / peak } else { 1.0 };
            let scaled: Vec<DenseMatrix> = out.channels.iter().map(|c| c.scaled(scale)).collect();
            write_pnm(path, &scaled)?;
        } else {
            write_pnm(path, &out.channels)?;
        }
        written.push(path.clone());
    }
    if let Some(path) = &config.trace {
        written.extend(write_traces(path, &out.traces)?);
    }
    Ok(ReportBundle {
        config: config.clone(),
        restored: out.channels,
        traces: out.traces,
        summary,
        snr_clamped: clamped,
        wall_s,
        written,
    })
}

/// Published outcome of one table row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub iterations: usize,
    /// SNR in decibels, or the relative error for Phillips rows.
    pub metric: f64,
}

#[derive(Debug, Clone)]
pub struct TableEntry {
    pub config: ExperimentConfig,
    pub reference: Reference,
}

/// Number of reference tables.
pub const TABLE_COUNT: usize = 4;

/// Title of a reference table.
pub fn table_title(table: usize) -> Option<&'static str> {
    match table {
        1 => Some("grayscale TV/L1, salt-and-pepper noise"),
        2 => Some("RGB within-channel TV/L1, salt-and-pepper noise"),
        3 => Some("grayscale TV/L2, white Gaussian noise"),
        4 => Some("phillips TV/L2, white Gaussian noise"),
        _ => None,
    }
}

/// The configurations of a reference table, each with both TV flavours
/// (anisotropic first).
pub fn table_configs(table: usize) -> Result<Vec<TableEntry>> {
    // (noise level, mu, beta, [(iters, metric) aniso, iso])
    type Row = (f64, f64, f64, [(usize, f64); 2]);
    let (example, rows): (Example, &[Row]) = match table {
        1 => (
            Example::Grayscale,
            &[
                (0.1, 0.05, 50.0, [(56, 23.55), (141, 22.64)]),
                (0.2, 0.1, 50.0, [(51, 21.38), (106, 20.16)]),
                (0.3, 0.2, 50.0, [(48, 19.21), (87, 17.66)]),
            ],
        ),
        2 => (
            Example::Rgb,
            &[
                (0.1, 0.1, 80.0, [(13, 24.66), (14, 24.32)]),
                (0.2, 0.125, 80.0, [(17, 23.00), (17, 22.71)]),
                (0.3, 0.125, 80.0, [(19, 20.90), (19, 21.13)]),
            ],
        ),
        3 => (
            Example::Gaussian,
            &[
                (0.001, 0.0001, 0.1, [(53, 18.32), (52, 18.32)]),
                (0.01, 0.001, 30.0, [(20, 15.70), (21, 15.60)]),
            ],
        ),
        4 => (
            Example::Phillips,
            &[
                (0.001, 0.0001, 0.1, [(12, 4.01e-2), (9, 4.71e-2)]),
                (0.01, 0.001, 30.0, [(13, 3.99e-2), (13, 3.98e-2)]),
                (0.1, 0.1, 40.0, [(15, 4.07e-2), (15, 4.07e-2)]),
            ],
        ),
        _ => return Err(Error::Config(format!("no table {table}; choose 1 to {TABLE_COUNT}"))),
    };
    let mut entries = Vec::with_capacity(2 * rows.len());
    for &(level, mu, beta, refs) in rows {
        for (tv, (iterations, metric)) in [TvFlavor::Anisotropic, TvFlavor::Isotropic].into_iter().zip(refs) {
            let mut config = ExperimentConfig::preset(example);
            config.noise.level = level;
            config.solver.mu = mu;
            config.solver.beta = beta;
            config.solver.tv = tv;
            entries.push(TableEntry {
                config,
                reference: Reference { iterations, metric },
            });
        }
    }
    Ok(entries)
}
