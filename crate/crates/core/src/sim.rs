//! Writes-until-erasure simulation of a rewriting code on one block.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cellmod::{cost_states, modulate, CellError, CellState};
use crate::limits::log2_big;
use crate::presets::Preset;
use crate::rmcodes::{random_index, RewriteCode, RmError};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SimError {
    #[error("bad simulation config: {0}")]
    ConfigError(String),
    #[error(transparent)]
    Scheme(#[from] RmError),
    #[error(transparent)]
    Cell(#[from] CellError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub preset: String,
    /// Highest level a cell may reach before the block is erased.
    pub max_level: f64,
    pub trials: usize,
    pub seed: u64,
    /// Safety cap on writes per trial.
    pub max_writes: usize,
}

impl SimConfig {
    pub fn new(preset: &str, max_level: f64, trials: usize, seed: u64) -> Self {
        Self {
            preset: preset.into(),
            max_level,
            trials,
            seed,
            max_writes: 100_000,
        }
    }
}

/// Why a trial stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The next write would exceed the level limit.
    LevelLimit,
    /// The encoder found no codeword for the drawn message.
    EncodeFailure,
    WriteCap,
}

/// One trial: the cost of every write after the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub costs: Vec<u64>,
    pub stop: StopReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub schema: u32,
    pub preset: String,
    pub q: usize,
    pub z: usize,
    pub r: usize,
    #[serde(with = "crate::bigser")]
    pub k_r: BigUint,
    pub max_level: f64,
    pub seed: u64,
    pub trials: usize,
    /// Top level after the first write.
    pub gamma_first: f64,
    /// Writes after the first, per trial.
    pub writes: Vec<usize>,
    pub mean_writes: f64,
    pub min_writes: usize,
    pub max_writes: usize,
    /// `mean_writes * log2(K_R) / n`.
    pub bits_per_cell: f64,
    /// `cost_histogram[c]` counts writes of cost `c`.
    pub cost_histogram: Vec<u64>,
    pub encode_failures: usize,
    pub decode_errors: usize,
}

/// Runs the simulation; trials use independent generator streams.
pub fn simulate(cfg: &SimConfig) -> Result<SimReport, SimError> {
    simulate_with_log(cfg).map(|(report, _)| report)
}

pub fn simulate_with_log(cfg: &SimConfig) -> Result<(SimReport, Vec<TrialLog>), SimError> {
    let preset = Preset::named(&cfg.preset)
        .ok_or_else(|| SimError::ConfigError(format!("unknown preset {:?}", cfg.preset)))?;
    let code = preset.build()?;
    simulate_code(code.as_ref(), cfg)
}

/// As [`simulate_with_log`], for an already assembled scheme.
pub fn simulate_code<C: RewriteCode + ?Sized>(
    code: &C,
    cfg: &SimConfig,
) -> Result<(SimReport, Vec<TrialLog>), SimError> {
    let q = code.q();
    if !(cfg.max_level.is_finite() && cfg.max_level >= (q - 1) as f64) {
        return Err(SimError::ConfigError(format!("max level {} is below q - 1 = {}", cfg.max_level, q - 1)));
    }
    if cfg.trials == 0 {
        return Err(SimError::ConfigError("need at least one trial".into()));
    }
    let sigma0 = code.initial();
    let x0 = modulate(&sigma0, &CellState::<f64>::zeros(code.n()))?;
    let gamma_first = x0.max_level();
    let k_r = code.message_count();
    let outcomes: Vec<Result<(TrialLog, usize), SimError>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(trial as u64);
            let mut sigma = sigma0.clone();
            let mut x = x0.clone();
            let mut costs = Vec::new();
            let mut decode_errors = 0;
            let stop = loop {
                if costs.len() >= cfg.max_writes {
                    break StopReason::WriteCap;
                }
                let m = random_index(&mut rng, &k_r);
                let pi = match code.encode(&m, &sigma) {
                    Ok(pi) => pi,
                    Err(RmError::IngredientFailure { .. } | RmError::RewriteFailure { .. }) => {
                        break StopReason::EncodeFailure
                    }
                    Err(e) => return Err(e.into()),
                };
                let next = modulate(&pi, &x)?;
                if next.max_level() > cfg.max_level {
                    break StopReason::LevelLimit;
                }
                let cost = cost_states(&x, &pi)?;
                if code.decode(&pi).ok() != Some(m) {
                    decode_errors += 1;
                }
                costs.push(cost as u64);
                x = next;
                sigma = pi;
            };
            Ok((TrialLog { costs, stop }, decode_errors))
        })
        .collect();
    let mut logs = Vec::with_capacity(cfg.trials);
    let mut decode_errors = 0;
    for o in outcomes {
        let (log, errs) = o?;
        decode_errors += errs;
        logs.push(log);
    }
    let writes: Vec<usize> = logs.iter().map(|l| l.costs.len()).collect();
    let mut cost_histogram = Vec::new();
    for &c in logs.iter().flat_map(|l| &l.costs) {
        let c = c as usize;
        if cost_histogram.len() <= c {
            cost_histogram.resize(c + 1, 0);
        }
        cost_histogram[c] += 1;
    }
    let mean_writes = writes.iter().sum::<usize>() as f64 / cfg.trials as f64;
    let report = SimReport {
        schema: 1,
        preset: cfg.preset.clone(),
        q,
        z: code.z(),
        r: code.r(),
        max_level: cfg.max_level,
        seed: cfg.seed,
        trials: cfg.trials,
        gamma_first,
        mean_writes,
        min_writes: writes.iter().copied().min().unwrap_or(0),
        max_writes: writes.iter().copied().max().unwrap_or(0),
        bits_per_cell: mean_writes * log2_big(&k_r) / code.n() as f64,
        writes,
        cost_histogram,
        encode_failures: logs.iter().filter(|l| l.stop == StopReason::EncodeFailure).count(),
        decode_errors,
        k_r,
    };
    Ok((report, logs))
}

/// `trial,write,cost` rows, one per write, with a header.
pub fn costs_csv(logs: &[TrialLog]) -> String {
    let mut out = String::from("trial,write,cost\n");
    for (t, log) in logs.iter().enumerate() {
        for (w, c) in log.costs.iter().enumerate() {
            out.push_str(&format!("{t},{},{c}\n", w + 1));
        }
    }
    out
}
