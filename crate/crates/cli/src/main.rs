use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand};
use num_bigint::BigUint;
use rankmod::cellmod::{cost_perms, cost_states, demodulate, modulate, parse_state_file, prop1_check, DemodResult};
use rankmod::limits::{
    ball_enumerate, ball_size, capacity_rm, capacity_wom, strong_wom_oracle, CapacityReport,
};
use rankmod::permlib::all_perms;
use rankmod::presets::{Preset, PRESET_NAMES};
use rankmod::rmcodes::scheme_rate;
use rankmod::sim::{costs_csv, simulate_with_log, SimConfig};
use rankmod::womlib::WomTable;
use rankmod::{CellState, MsPermutation, MultisetSpec};

#[derive(Parser)]
#[command(name = "rankmod", version, about = "Rank-modulation rewriting codes for flash memory")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Demodulate each row of a cell-state CSV file.
    Demod {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        z: usize,
        file: PathBuf,
    },
    /// Program a permutation onto a state (all-zero cells by default).
    Modulate {
        /// Inverse form, e.g. 1,1,2,2,3,3.
        #[arg(long)]
        perm: String,
        /// CSV file whose first row is the current state.
        state: Option<PathBuf>,
    },
    /// Rewrite cost between two permutations, or from a state file.
    Cost {
        #[arg(long, conflicts_with = "state")]
        from: Option<String>,
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        to: String,
    },
    /// Size of the cost-r ball.
    Ball {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        z: usize,
        #[arg(long)]
        r: usize,
        /// Also count the ball around the first permutation by enumeration.
        #[arg(long)]
        verify: bool,
    },
    /// Rewriting or WOM capacity.
    Capacity {
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, requires = "r")]
        q: Option<usize>,
        #[arg(long, requires = "q")]
        z: Option<usize>,
        #[arg(long, requires = "wx", conflicts_with = "r")]
        ws: Option<f64>,
        #[arg(long, requires = "ws")]
        wx: Option<f64>,
    },
    /// Encode a message with a preset scheme.
    Encode {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        message: BigUint,
        /// Current permutation; the preset's initial state by default.
        #[arg(long)]
        state: Option<String>,
    },
    /// Decode a stored permutation with a preset scheme.
    Decode {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        perm: String,
    },
    /// Exhaustive verification oracles.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
    /// Writes-until-erasure simulation.
    Simulate {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        max_level: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-write costs as CSV.
        #[arg(long)]
        costs: Option<PathBuf>,
    },
    /// List the preset schemes.
    Presets,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Strong WOM property of a code table (the built-in 6-cell table by default).
    Wom { table: Option<PathBuf> },
    /// Closed-form ball size against enumeration, over every center.
    Ball {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        z: usize,
        #[arg(long)]
        r: usize,
    },
    /// State cost against permutation cost over integer states with unit gaps.
    Prop1 {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        z: usize,
    },
}

/// Exits with clap's usage-error status.
/// `println!` that exits quietly when stdout is a closed pipe.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout(), $($arg)*) {
            std::process::exit(if e.kind() == std::io::ErrorKind::BrokenPipe { 0 } else { 1 });
        }
    }};
}

fn usage(msg: &str) -> ! {
    Cli::command().error(ErrorKind::MissingRequiredArgument, msg).exit()
}

fn parse_perm(text: &str) -> Result<MsPermutation, String> {
    let inv = text
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad rank {t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    MsPermutation::from_inv(inv).map_err(|e| e.to_string())
}

fn read_states(path: &PathBuf) -> Result<Vec<CellState<f64>>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_state_file(&text)
}

fn levels_csv(x: &CellState<f64>) -> String {
    x.levels().iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn emit(json: bool, value: serde_json::Value, text: String) {
    if json {
        say!("{value}");
    } else {
        say!("{text}");
    }
}

fn build(name: &str) -> Result<Box<dyn rankmod::RewriteCode>, String> {
    Preset::named(name)
        .ok_or_else(|| format!("unknown preset {name:?}; try one of {}", PRESET_NAMES.join(", ")))?
        .build()
        .map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<(), String> {
    let json = cli.json;
    let err = |e: &dyn std::fmt::Display| e.to_string();
    match cli.cmd {
        Cmd::Demod { q, z, file } => {
            for x in read_states(&file)? {
                let out = match demodulate(&x, q, z).map_err(|e| err(&e))? {
                    DemodResult::Valid(p) => p.to_string(),
                    DemodResult::Illegal => "F".into(),
                };
                emit(json, serde_json::json!({ "perm": out }), out.clone());
            }
        }
        Cmd::Modulate { perm, state } => {
            let pi = parse_perm(&perm)?;
            let s = match state {
                Some(path) => read_states(&path)?
                    .into_iter()
                    .next()
                    .ok_or_else(|| format!("{} has no state row", path.display()))?,
                None => CellState::zeros(pi.n()),
            };
            let x = modulate(&pi, &s).map_err(|e| err(&e))?;
            emit(json, serde_json::json!({ "levels": x.levels() }), levels_csv(&x));
        }
        Cmd::Cost { from, state, to } => {
            let pi = parse_perm(&to)?;
            let cost = match (from, state) {
                (Some(from), _) => cost_perms(&parse_perm(&from)?, &pi).map_err(|e| err(&e))? as f64,
                (None, Some(path)) => {
                    let s = read_states(&path)?
                        .into_iter()
                        .next()
                        .ok_or_else(|| format!("{} has no state row", path.display()))?;
                    cost_states(&s, &pi).map_err(|e| err(&e))?
                }
                (None, None) => usage("give --from or --state"),
            };
            emit(json, serde_json::json!({ "cost": cost }), cost.to_string());
        }
        Cmd::Ball { q, z, r, verify } => {
            let size = ball_size(q, z, r).map_err(|e| err(&e))?;
            if verify {
                let spec = MultisetSpec::uniform(q, z).map_err(|e| err(&e))?;
                let center = MsPermutation::new(spec.clone(), spec.first_inv()).map_err(|e| err(&e))?;
                let count = ball_enumerate(&center, r).map_err(|e| err(&e))?.len();
                let agree = BigUint::from(count) == size;
                emit(
                    json,
                    serde_json::json!({ "closed_form": size.to_string(), "enumerated": count, "agree": agree }),
                    format!("{size} (closed form) {} {count} (enumerated)", if agree { "==" } else { "!=" }),
                );
                if !agree {
                    return Err("closed form and enumeration disagree".into());
                }
            } else if json {
                let report = CapacityReport::new(q, z, r).map_err(|e| err(&e))?;
                say!("{}", serde_json::to_string(&report).expect("serializable"));
            } else {
                say!("{size}");
            }
        }
        Cmd::Capacity { r, q, z, ws, wx } => match (r, q, z, ws, wx) {
            (Some(r), Some(q), Some(z), _, _) => {
                let report = CapacityReport::new(q, z, r).map_err(|e| err(&e))?;
                let text = format!(
                    "C_R = {:?}\nC_W = {:?}\n|B| = {}\nrate bound = {:?}",
                    report.c_r, report.c_w, report.ball_size, report.rate_bound
                );
                emit(json, serde_json::to_value(&report).expect("serializable"), text);
            }
            (Some(r), None, None, _, _) => {
                let c = capacity_rm::<f64>(r).map_err(|e| err(&e))?;
                emit(json, serde_json::json!({ "r": r, "c_r": c }), format!("C_R = {c:?}"));
            }
            (None, _, _, Some(ws), Some(wx)) => {
                let c = capacity_wom(ws, wx).map_err(|e| err(&e))?;
                emit(json, serde_json::json!({ "w_s": ws, "w_x": wx, "c_w": c }), format!("C_W = {c:?}"));
            }
            _ => usage("give --r (optionally with --q and --z) or --ws and --wx"),
        },
        Cmd::Encode { preset, message, state } => {
            let code = build(&preset)?;
            let sigma = match state {
                Some(s) => parse_perm(&s)?,
                None => code.initial(),
            };
            let pi = code.encode(&message, &sigma).map_err(|e| err(&e))?;
            let cost = cost_perms(&sigma, &pi).map_err(|e| err(&e))?;
            emit(
                json,
                serde_json::json!({ "perm": pi.to_string(), "cost": cost }),
                pi.to_string(),
            );
        }
        Cmd::Decode { preset, perm } => {
            let code = build(&preset)?;
            let m = code.decode(&parse_perm(&perm)?).map_err(|e| err(&e))?;
            emit(json, serde_json::json!({ "message": m.to_string() }), m.to_string());
        }
        Cmd::Oracle { which } => oracle(json, which)?,
        Cmd::Simulate { preset, max_level, trials, out, costs } => {
            let cfg = SimConfig::new(&preset, max_level, trials, cli.seed);
            let (report, logs) = simulate_with_log(&cfg).map_err(|e| err(&e))?;
            let text = serde_json::to_string_pretty(&report).expect("serializable");
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?,
                None => say!("{text}"),
            }
            if let Some(path) = costs {
                std::fs::write(&path, costs_csv(&logs)).map_err(|e| format!("{}: {e}", path.display()))?;
            }
        }
        Cmd::Presets => {
            for name in PRESET_NAMES {
                let code = build(name)?;
                let rate = scheme_rate(code.as_ref());
                say!(
                    "{name}: q={} z={} r={} K_R={} rate={:.4}",
                    code.q(),
                    code.z(),
                    code.r(),
                    code.message_count(),
                    rate.rate
                );
            }
        }
    }
    Ok(())
}

fn oracle(json: bool, which: OracleCmd) -> Result<(), String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let ok = match which {
        OracleCmd::Wom { table } => {
            let table = match table {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
                }
                None => WomTable::example(),
            };
            let words = table.words().map_err(|e| err(&e))?;
            let ok = strong_wom_oracle(&table.params(), &words).map_err(|e| err(&e))?;
            emit(json, serde_json::json!({ "valid": ok }), format!("strong WOM property: {ok}"));
            ok
        }
        OracleCmd::Ball { q, z, r } => {
            let size = ball_size(q, z, r).map_err(|e| err(&e))?;
            let spec = MultisetSpec::uniform(q, z).map_err(|e| err(&e))?;
            rankmod::limits::guarded_count(&spec).map_err(|e| err(&e))?;
            let mut centers = 0u64;
            let mut mismatches = 0u64;
            for sigma in all_perms(&spec) {
                centers += 1;
                if BigUint::from(ball_enumerate(&sigma, r).map_err(|e| err(&e))?.len()) != size {
                    mismatches += 1;
                }
            }
            emit(
                json,
                serde_json::json!({ "ball_size": size.to_string(), "centers": centers, "mismatches": mismatches }),
                format!("{size} at all {centers} centers, {mismatches} mismatches"),
            );
            mismatches == 0
        }
        OracleCmd::Prop1 { q, z } => {
            let spec = MultisetSpec::uniform(q, z).map_err(|e| err(&e))?;
            rankmod::limits::guarded_count(&spec).map_err(|e| err(&e))?;
            let mut cases = 0u64;
            let mut failures = 0u64;
            // Every cell of rank i sits at the rank maximum; consecutive
            // maxima differ by 1 or 2.
            for sigma in all_perms(&spec) {
                for gaps in 0..1u32 << (q - 1) {
                    let tops: Vec<f64> = (0..q)
                        .map(|i| (0..i).map(|k| 1 + (gaps >> k & 1)).sum::<u32>() as f64)
                        .collect();
                    let levels: Vec<f64> = sigma.inv().iter().map(|&rank| tops[rank - 1]).collect();
                    let s = CellState::new(levels).map_err(|e| err(&e))?;
                    for pi in all_perms(&spec) {
                        cases += 1;
                        let rep = prop1_check(&s, &pi).map_err(|e| err(&e))?;
                        if !rep.holds() {
                            failures += 1;
                        }
                    }
                }
            }
            emit(
                json,
                serde_json::json!({ "cases": cases, "failures": failures }),
                format!("{cases} cases, {failures} failures"),
            );
            failures == 0
        }
    };
    if ok {
        Ok(())
    } else {
        Err("oracle check failed".into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
