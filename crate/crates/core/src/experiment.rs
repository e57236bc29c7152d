//! Monte-Carlo sweeps of normalized channel-estimation MSE.
//!
//! Every trial draws its own channel from a random stream keyed by
//! `(seed, grid index, trial index)`, and every scheme under test gets a
//! separate stream for its random design and receiver noise. Trials can run
//! in any order on any number of workers; per-trial results are reduced in
//! trial order so the output is bit-identical.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{cascade, link_gains, sample_link_set, ChannelRealization};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::scheme1::{simulate_rx_scheme1, Scheme1Estimator};
use crate::scheme2::{simulate_rx_scheme2, RxModel, Scheme2Estimator};
use crate::training::{Scheme1Design, Scheme2Design};

/// Redraws allowed for a random benchmark design that turns out singular.
pub const MAX_DESIGN_RETRIES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    Scheme1Optimal,
    Scheme1RandomReflection,
    Scheme1RandomPilot,
    Scheme2Optimal,
    Scheme2RandomReflection,
    Scheme2RandomPilot,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] = [
        SchemeId::Scheme1Optimal,
        SchemeId::Scheme1RandomReflection,
        SchemeId::Scheme1RandomPilot,
        SchemeId::Scheme2Optimal,
        SchemeId::Scheme2RandomReflection,
        SchemeId::Scheme2RandomPilot,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::Scheme1Optimal => "scheme1_optimal",
            SchemeId::Scheme1RandomReflection => "scheme1_random_reflection",
            SchemeId::Scheme1RandomPilot => "scheme1_random_pilot",
            SchemeId::Scheme2Optimal => "scheme2_optimal",
            SchemeId::Scheme2RandomReflection => "scheme2_random_reflection",
            SchemeId::Scheme2RandomPilot => "scheme2_random_pilot",
        }
    }

    fn stream_tag(self) -> u64 {
        match self {
            SchemeId::Scheme1Optimal => 1,
            SchemeId::Scheme1RandomReflection => 2,
            SchemeId::Scheme1RandomPilot => 3,
            SchemeId::Scheme2Optimal => 4,
            SchemeId::Scheme2RandomReflection => 5,
            SchemeId::Scheme2RandomPilot => 6,
        }
    }

    fn is_scheme1(self) -> bool {
        matches!(
            self,
            SchemeId::Scheme1Optimal | SchemeId::Scheme1RandomReflection | SchemeId::Scheme1RandomPilot
        )
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Grid values are SNR in dB.
    #[serde(rename = "snr_db", alias = "snr_db_grid")]
    SnrDb,
    /// Grid values are the Rician factor in dB; SNR is held fixed.
    #[serde(rename = "kappa_db", alias = "kappa_db_grid")]
    KappaDb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub base: SystemConfig,
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub schemes: Vec<SchemeId>,
    /// SNR used when sweeping over the Rician factor.
    pub snr_db: f64,
    /// Record wall-clock seconds per row. Off keeps exports reproducible.
    pub record_timing: bool,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("sweep grid is empty".into()));
        }
        if let Some(v) = self.grid.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite grid value {v}")));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidParameter("no schemes selected".into()));
        }
        Ok(())
    }

    /// System configuration at one grid point, with `P` calibrated to the
    /// point's SNR.
    pub fn config_at(&self, axis_value: f64) -> Result<SystemConfig> {
        let mut cfg = self.base.clone();
        let snr_db = match self.axis {
            SweepAxis::SnrDb => axis_value,
            SweepAxis::KappaDb => {
                cfg.kappa = db_to_linear(axis_value);
                self.snr_db
            }
        };
        cfg.power = power_for_snr(&cfg, snr_db)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub scheme: SchemeId,
    pub mse_sim: f64,
    pub mse_analytic: f64,
    pub trials: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn get(&self, axis_value: f64, scheme: SchemeId) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.axis_value == axis_value && r.scheme == scheme)
    }

    /// Rows of one scheme in grid order.
    pub fn curve(&self, scheme: SchemeId) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.scheme == scheme).collect()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Closed-form `E||d + Q theta||^2 = M0 gamma0^2 D1^-a1 D2^-a2 + gamma0 D3^-a3`.
pub fn expected_rx_power(config: &SystemConfig) -> f64 {
    let irs = config.m0 as f64
        * config.gamma0.powi(2)
        * config.d1.powf(-config.alpha1)
        * config.d2.powf(-config.alpha2);
    irs + config.gamma0 * config.d3.powf(-config.alpha3)
}

/// Budget `P` that yields the requested per-sample receive SNR,
/// `SNR = P E||h||^2 / (sigma2 (N + L_cp))`.
pub fn power_for_snr(config: &SystemConfig, snr_db: f64) -> Result<f64> {
    let rx = expected_rx_power(config);
    if !(rx > 0.0) {
        return Err(Error::InvalidParameter("expected receive power is not positive".into()));
    }
    Ok(db_to_linear(snr_db) * config.sigma2 * config.training_duration_scheme2() as f64 / rx)
}

/// Inverse of [`power_for_snr`].
pub fn snr_db_for_power(config: &SystemConfig, power: f64) -> f64 {
    linear_to_db(
        power * expected_rx_power(config)
            / (config.sigma2 * config.training_duration_scheme2() as f64),
    )
}

/// Ratio of summed squared errors to summed channel power.
pub fn normalized_mse(errors_sq_sum: f64, channel_power_sum: f64) -> Result<f64> {
    if !(channel_power_sum > 0.0) {
        return Err(Error::DegenerateChannel);
    }
    Ok(errors_sq_sum / channel_power_sum)
}

/// Independent random stream for `(seed, tag, grid point, trial)`.
pub fn trial_rng(seed: u64, tag: u64, grid: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(((grid as u64) << 32) | trial as u64);
    rng
}

const CHANNEL_TAG: u64 = 0;

/// Designs shared by all trials of one grid point.
struct GridContext {
    config: SystemConfig,
    scheme1_optimal: Option<Scheme1Estimator>,
    scheme1_optimal_design: Option<Scheme1Design>,
    scheme2_optimal: Option<Scheme2Estimator>,
    scheme2_optimal_design: Option<Scheme2Design>,
}

impl GridContext {
    fn new(config: SystemConfig, schemes: &[SchemeId]) -> Result<Self> {
        let (mut s1, mut s1d, mut s2, mut s2d) = (None, None, None, None);
        if schemes.contains(&SchemeId::Scheme1Optimal) {
            let d = Scheme1Design::optimal(&config, config.gamma1())?;
            s1 = Some(Scheme1Estimator::new(&d)?);
            s1d = Some(d);
        }
        if schemes.contains(&SchemeId::Scheme2Optimal) {
            let d = Scheme2Design::optimal(&config, config.gamma2())?;
            s2 = Some(Scheme2Estimator::new(&d)?);
            s2d = Some(d);
        }
        Ok(Self {
            config,
            scheme1_optimal: s1,
            scheme1_optimal_design: s1d,
            scheme2_optimal: s2,
            scheme2_optimal_design: s2d,
        })
    }
}

/// Squared error and its analytic expectation for one scheme in one trial.
#[derive(Debug, Clone, Copy, Default)]
struct TrialOutcome {
    err_sq: f64,
    analytic_err_sq: f64,
}

fn with_retries<T>(scheme: SchemeId, mut attempt: impl FnMut() -> Result<T>) -> Result<T> {
    for _ in 0..=MAX_DESIGN_RETRIES {
        match attempt() {
            Err(Error::SingularSystem { .. }) => continue,
            other => return other,
        }
    }
    Err(Error::RetriesExhausted {
        scheme: scheme.to_string(),
        retries: MAX_DESIGN_RETRIES,
    })
}

fn run_scheme_trial(
    ctx: &GridContext,
    scheme: SchemeId,
    links: &crate::channel::LinkSet,
    realization: &ChannelRealization,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome> {
    let cfg = &ctx.config;
    let sigma2 = cfg.sigma2;
    let coeffs = cfg.num_coefficients() as f64;
    if scheme.is_scheme1() {
        let owned;
        let (design, estimator) = match scheme {
            SchemeId::Scheme1Optimal => (
                ctx.scheme1_optimal_design.as_ref().expect("prepared"),
                ctx.scheme1_optimal.as_ref().expect("prepared"),
            ),
            _ => {
                owned = with_retries(scheme, || {
                    let d = if scheme == SchemeId::Scheme1RandomReflection {
                        Scheme1Design::random_reflection(cfg, cfg.gamma1(), rng)?
                    } else {
                        Scheme1Design::random_pilot(cfg, cfg.gamma1(), rng)?
                    };
                    let e = Scheme1Estimator::new(&d)?;
                    Ok((d, e))
                })?;
                (&owned.0, &owned.1)
            }
        };
        let obs = simulate_rx_scheme1(design, realization, sigma2, rng)?;
        let est = estimator.estimate(&obs)?;
        Ok(TrialOutcome {
            err_sq: est.squared_error(realization)?,
            analytic_err_sq: estimator.analytic_mse(sigma2)? * coeffs,
        })
    } else {
        let owned;
        let (design, estimator) = match scheme {
            SchemeId::Scheme2Optimal => (
                ctx.scheme2_optimal_design.as_ref().expect("prepared"),
                ctx.scheme2_optimal.as_ref().expect("prepared"),
            ),
            _ => {
                owned = with_retries(scheme, || {
                    let d = if scheme == SchemeId::Scheme2RandomReflection {
                        Scheme2Design::random_reflection(cfg, cfg.gamma2(), rng)?
                    } else {
                        Scheme2Design::random_pilot(cfg, cfg.gamma2(), rng)?
                    };
                    let e = Scheme2Estimator::general(&d)?;
                    Ok((d, e))
                })?;
                (&owned.0, &owned.1)
            }
        };
        let obs = simulate_rx_scheme2(design, links, sigma2, rng, RxModel::Physical)?;
        let est = estimator.estimate(&obs.y)?;
        Ok(TrialOutcome {
            err_sq: est.squared_error(realization)?,
            analytic_err_sq: estimator.analytic_mse(sigma2) * coeffs,
        })
    }
}

pub fn run_sweep(scenario: &ScenarioConfig) -> Result<SweepResult> {
    run_sweep_with(scenario, Execution::default())
}

pub fn run_sweep_with(scenario: &ScenarioConfig, exec: Execution) -> Result<SweepResult> {
    scenario.validate()?;
    let mut rows = Vec::with_capacity(scenario.grid.len() * scenario.schemes.len());
    for (grid_idx, &axis_value) in scenario.grid.iter().enumerate() {
        let started = Instant::now();
        let ctx = GridContext::new(scenario.config_at(axis_value)?, &scenario.schemes)?;
        let l = ctx.config.max_delay_spread();

        let per_trial: Vec<Result<(f64, Vec<TrialOutcome>)>> =
            exec.map_indexed(scenario.trials, |trial| {
                let mut rng = trial_rng(scenario.seed, CHANNEL_TAG, grid_idx, trial);
                let links = sample_link_set(&ctx.config, &mut rng)?;
                let realization = cascade(&links, l)?;
                let outcomes = scenario
                    .schemes
                    .iter()
                    .map(|&scheme| {
                        let mut rng =
                            trial_rng(scenario.seed, scheme.stream_tag(), grid_idx, trial);
                        run_scheme_trial(&ctx, scheme, &links, &realization, &mut rng)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((realization.power(), outcomes))
            });

        let mut power_sum = 0.0;
        let mut sums = vec![TrialOutcome::default(); scenario.schemes.len()];
        for result in per_trial {
            let (power, outcomes) = result?;
            power_sum += power;
            for (acc, o) in sums.iter_mut().zip(outcomes) {
                acc.err_sq += o.err_sq;
                acc.analytic_err_sq += o.analytic_err_sq;
            }
        }
        let seconds = if scenario.record_timing {
            started.elapsed().as_secs_f64()
        } else {
            0.0
        };
        for (&scheme, acc) in scenario.schemes.iter().zip(&sums) {
            rows.push(SweepRow {
                axis_value,
                scheme,
                mse_sim: normalized_mse(acc.err_sq, power_sum)?,
                mse_analytic: normalized_mse(acc.analytic_err_sq, power_sum)?,
                trials: scenario.trials,
                seconds,
            });
        }
    }
    Ok(SweepResult { rows })
}

pub const CSV_HEADER: &str = "axis,scheme,mse_sim,mse_analytic,trials,seconds";

/// Writes the result as CSV. Floats use the shortest representation that
/// round-trips exactly.
pub fn write_csv<W: Write>(result: &SweepResult, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &result.rows {
        writeln!(
            out,
            "{:?},{},{:?},{:?},{},{:?}",
            r.axis_value, r.scheme, r.mse_sim, r.mse_analytic, r.trials, r.seconds
        )?;
    }
    out.flush()
}

pub fn export_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_csv(result, BufWriter::new(file)).map_err(io_err)
}

/// Per-link gains as `(direct, per-subsurface cascaded)` expectations.
pub fn expected_link_powers(config: &SystemConfig) -> Result<(f64, f64)> {
    let (direct, bs_irs, irs_user) = link_gains(config)?;
    Ok((direct, bs_irs * irs_user))
}
