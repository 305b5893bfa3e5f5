//! The `mulmin` command line: solve, verify, scale, nashmap, gen, ensemble.
//!
//! Exit codes: 0 success, 1 verify found a violation, 2 unusable input
//! (bad arguments or game file), 3 solver failure or exceeded budget.
//! Machine-format output is byte-deterministic for a fixed invocation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::minimax::{
    bounds_report, build_dual, build_primal, quality, solve_minimax, verify_saddle, MinimaxSolution,
};
use crate::multilinear::{MixedProfile, MixedStrategy};
use crate::nashmap::{nash_map, profile_distance, state, NashMapState};
use crate::oracle::{support_combinations, support_enumeration, EquilibriumCertificate};
use crate::report::{
    bounds_json, certificates_json, ensemble_scale_row, ensemble_solve_row, nashmap_csv,
    quality_json, saddle_json, scaling_trace_csv, shape_token, solution_json, Json,
    ENSEMBLE_SCALE_HEADER, ENSEMBLE_SOLVE_HEADER,
};
use crate::scaling::{random_weights, scaling_iterate, ScalingOptions, StopReason};
use crate::tensor::{GameShape, PayoffTensor};
use crate::{Error, Result};

/// Support-combination budget above which the oracle is not consulted.
const ORACLE_BUDGET: usize = 4096;

#[derive(Parser)]
#[command(
    name = "mulmin",
    version,
    about = "Approximate equilibria of finite games through a minimax relaxation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Default, ValueEnum)]
enum Format {
    /// Readable summary.
    #[default]
    Human,
    /// Deterministic JSON with 17-digit floats.
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one game and report the solution, its quality, and its bounds.
    Solve {
        /// Game file (.mmg).
        game: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Print both linear programs to stderr before solving.
        #[arg(long)]
        dump_lp: bool,
        /// Random saddle checks on top of the exact vertex sweep.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Run the invariant suite on one game; exits 1 on any violation.
    Verify {
        game: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Walk the weight rescaling iteration and emit the trace as CSV.
    Scale {
        game: PathBuf,
        /// Starting weights, comma-separated; defaults to uniform.
        #[arg(long, conflicts_with = "random_d")]
        d0: Option<String>,
        /// Draw the starting weights at random (uses --seed).
        #[arg(long)]
        random_d: bool,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 1e-9)]
        conv_tol: f64,
        #[arg(long, default_value_t = 1e-9)]
        pos_tol: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate the gain map and emit the residual trace as CSV.
    Nashmap {
        game: PathBuf,
        /// Starting profile: per-player probability lists, players separated
        /// by ';' (e.g. "0.25,0.75;0.5,0.5"); defaults to uniform.
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random game file.
    Gen {
        /// Strategy counts, comma-separated (e.g. "2,2,3").
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        hi: f64,
        /// Where to write the game file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve or scale a seeded batch of random games; one CSV row per game.
    Ensemble {
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Base seed; game k uses seed + k - 1.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        mode: EnsembleMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Default, ValueEnum)]
enum EnsembleMode {
    #[default]
    Solve,
    Scale,
}

/// Parse the process arguments and run; the binary's whole body.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mulmin: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::InvalidArgument(_) | Error::OutOfRange(_) => 2,
        Error::SolverFailure(_) | Error::BudgetExceeded(_) => 3,
    }
}

fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::Solve {
            game,
            format,
            dump_lp,
            samples,
            seed,
        } => cmd_solve(&game, format, dump_lp, samples, seed),
        Command::Verify {
            game,
            samples,
            seed,
        } => cmd_verify(&game, samples, seed),
        Command::Scale {
            game,
            d0,
            random_d,
            seed,
            iters,
            conv_tol,
            pos_tol,
            out,
        } => cmd_scale(
            &game,
            d0.as_deref(),
            random_d,
            seed,
            iters,
            conv_tol,
            pos_tol,
            out.as_deref(),
        ),
        Command::Nashmap {
            game,
            start,
            iters,
            tol,
            out,
        } => cmd_nashmap(&game, start.as_deref(), iters, tol, out.as_deref()),
        Command::Gen {
            shape,
            seed,
            lo,
            hi,
            out,
        } => cmd_gen(&shape, seed, lo, hi, &out),
        Command::Ensemble {
            shape,
            count,
            seed,
            mode,
            out,
        } => cmd_ensemble(&shape, count, seed, mode, out.as_deref()),
    }
}

fn parse_floats(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|cell| {
            cell.trim().parse::<f64>().map_err(|_| {
                Error::InvalidArgument(format!(
                    "{what}: cannot parse '{}' as a number",
                    cell.trim()
                ))
            })
        })
        .collect()
}

fn parse_shape(text: &str) -> Result<GameShape> {
    let counts = text
        .split(',')
        .map(|cell| {
            cell.trim().parse::<usize>().map_err(|_| {
                Error::InvalidArgument(format!(
                    "shape: cannot parse '{}' as a strategy count",
                    cell.trim()
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    GameShape::new(counts)
}

fn parse_profile(text: &str, shape: &GameShape) -> Result<MixedProfile> {
    let strategies = text
        .split(';')
        .map(|part| MixedStrategy::new(parse_floats(part, "start profile")?))
        .collect::<Result<Vec<_>>>()?;
    let profile = MixedProfile::new(strategies)?;
    profile.check_shape(shape)?;
    Ok(profile)
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Certificates for games the oracle can afford, newest methods last;
/// oversized games get an empty list, never an error.
fn oracle_certificates(tensor: &PayoffTensor) -> Result<Vec<EquilibriumCertificate>> {
    if support_combinations(tensor) > ORACLE_BUDGET as u128 {
        return Ok(Vec::new());
    }
    support_enumeration(tensor, ORACLE_BUDGET)
}

fn load_game(path: &Path) -> Result<PayoffTensor> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    PayoffTensor::load_game(&text)
}

fn cmd_solve(
    game: &Path,
    format: Format,
    dump_lp: bool,
    samples: usize,
    seed: u64,
) -> Result<ExitCode> {
    let t = load_game(game)?;
    if dump_lp {
        eprint!("{}", build_primal(&t).to_lp_text());
        eprint!("{}", build_dual(&t).to_lp_text());
    }
    let sol = solve_minimax(&t)?;
    let q = quality(&t, &sol.derived_profile)?;
    let certs = oracle_certificates(&t)?;
    let reference = certs.first().map(|c| c.profile.clone());
    let bounds = bounds_report(&t, &sol, reference.as_ref())?;
    let saddle = verify_saddle(&t, &sol, samples, seed)?;

    match format {
        Format::Machine => {
            let doc = Json::Obj(vec![
                ("schema", Json::Str("mulmin.solve.v1".into())),
                ("solution", solution_json(t.shape(), &sol)),
                ("quality", quality_json(&q)),
                ("saddle", saddle_json(&saddle)),
                ("bounds", bounds_json(&bounds)),
                ("reference", certificates_json(&certs)),
            ]);
            print!("{}", doc.render());
        }
        Format::Human => print_human_solve(&t, &sol, &q, &saddle, &bounds, &certs),
    }
    Ok(ExitCode::SUCCESS)
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn print_human_solve(
    t: &PayoffTensor,
    sol: &MinimaxSolution,
    q: &crate::minimax::QualityReport,
    saddle: &crate::minimax::SaddleReport,
    bounds: &crate::minimax::BoundsReport,
    certs: &[EquilibriumCertificate],
) {
    println!(
        "shape {}  ({} profiles)",
        t.shape(),
        t.shape().total_profiles()
    );
    match sol.duality_gap {
        Some(gap) => println!(
            "value {}  (duality gap {gap:.2e}, {} pivots)",
            sol.value, sol.pivots
        ),
        None => println!(
            "value {}  ({} pivots, cross-check skipped)",
            sol.value, sol.pivots
        ),
    }
    println!("selector weights [{}]", join_floats(sol.selector.weights()));
    println!(
        "profile weights: {} of {} above threshold",
        sol.support_size,
        sol.profile_weights.len()
    );
    for (i, s) in sol.derived_profile.strategies().iter().enumerate() {
        println!(
            "derived strategy, player {}: [{}]",
            i + 1,
            join_floats(s.probs())
        );
    }
    match q.ratio {
        Some(r) => println!("quality: additive gap {}, ratio {r}", q.additive_gap),
        None => println!("quality: additive gap {}, ratio undefined", q.additive_gap),
    }
    if saddle.passed {
        println!("saddle checks: pass ({} checks)", saddle.checks);
    } else {
        println!(
            "saddle checks: FAIL (worst violation {}; the optimal weights are correlated and their marginals leak value)",
            saddle.worst_violation
        );
    }
    println!(
        "payoffs at derived profile: min {}, selector-combined {}",
        bounds.min_expected, bounds.combined_at_derived
    );
    match bounds.average_bound {
        Some(b) if bounds.average_bound_applies => {
            println!("average-payoff cap {b} (preconditions verified at the reference)")
        }
        Some(b) => println!("average-payoff cap {b} (preconditions not verified)"),
        None => println!("average-payoff cap undefined (a selector weight vanishes)"),
    }
    if certs.is_empty() {
        println!("reference equilibria: none (game above oracle budget)");
    } else {
        for c in certs {
            let cells: Vec<String> = c
                .profile
                .strategies()
                .iter()
                .map(|s| format!("[{}]", join_floats(s.probs())))
                .collect();
            println!(
                "reference equilibrium ({}, residual {:.1e}): {}",
                c.kind.label(),
                c.residual,
                cells.join(" x ")
            );
        }
    }
}

struct CheckList {
    lines: Vec<String>,
    violations: usize,
}

impl CheckList {
    fn new() -> Self {
        CheckList {
            lines: Vec::new(),
            violations: 0,
        }
    }

    fn record(&mut self, name: &str, passed: bool, detail: String) {
        if passed {
            self.lines.push(format!("ok        {name}: {detail}"));
        } else {
            self.violations += 1;
            self.lines.push(format!("VIOLATION {name}: {detail}"));
        }
    }

    fn skip(&mut self, name: &str, why: String) {
        self.lines.push(format!("skipped   {name}: {why}"));
    }
}

fn cmd_verify(game: &Path, samples: usize, seed: u64) -> Result<ExitCode> {
    let t = load_game(game)?;
    let sol = solve_minimax(&t)?;
    let n = t.num_players();
    let scale = t.max_abs().max(1.0);
    let mut checks = CheckList::new();

    match sol.duality_gap {
        Some(gap) => checks.record(
            "duality_gap",
            gap <= 1e-8 * scale,
            format!("front/back optima differ by {gap:.3e}"),
        ),
        None => checks.skip(
            "duality_gap",
            "profile count above cross-check limit".into(),
        ),
    }

    checks.record(
        "support_bound",
        sol.support_size <= n + 1,
        format!(
            "{} weights above threshold, cap {}",
            sol.support_size,
            n + 1
        ),
    );

    let total: f64 = sol.profile_weights.iter().sum();
    let min_w = sol
        .profile_weights
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    checks.record(
        "weight_simplex",
        (total - 1.0).abs() <= 1e-12 && min_w >= -1e-15,
        format!("weights sum to 1{:+.3e}, smallest {min_w:.3e}", total - 1.0),
    );

    // marginals taken directly from the weights, before any renormalizing
    let mut marginal_sum_err: f64 = 0.0;
    let mut marginal_min = f64::INFINITY;
    for i in 0..n {
        let mut marginal = vec![0.0; t.shape().strategy_count(i)];
        for (flat, pure) in t.shape().profiles().enumerate() {
            marginal[pure.actions()[i]] += sol.profile_weights[flat];
        }
        let s: f64 = marginal.iter().sum();
        marginal_sum_err = marginal_sum_err.max((s - 1.0).abs());
        marginal_min = marginal_min.min(marginal.iter().copied().fold(f64::INFINITY, f64::min));
    }
    checks.record(
        "marginals",
        marginal_sum_err <= 1e-12 && marginal_min >= -1e-15,
        format!("worst sum error {marginal_sum_err:.3e}, smallest entry {marginal_min:.3e}"),
    );

    // the selector caps the combined payoff at every pure profile, so it
    // caps it on every product profile
    let x = sol.selector.weights();
    let mut worst_cap = f64::NEG_INFINITY;
    for flat in 0..t.shape().total_profiles() {
        let combined: f64 = (0..n).map(|i| x[i] * t.payoff_flat(i, flat)).sum();
        worst_cap = worst_cap.max(combined - sol.value);
    }
    checks.record(
        "selector_cap",
        worst_cap <= 1e-7 * scale,
        format!("worst pure-profile excess {worst_cap:.3e}"),
    );

    let mut worst_floor = f64::INFINITY;
    for i in 0..n {
        let avg: f64 = (0..t.shape().total_profiles())
            .map(|flat| sol.profile_weights[flat] * t.payoff_flat(i, flat))
            .sum();
        worst_floor = worst_floor.min(avg - sol.value);
    }
    checks.record(
        "weight_floor",
        worst_floor >= -1e-7 * scale,
        format!("worst player shortfall {:.3e}", -worst_floor),
    );

    let bounds = bounds_report(&t, &sol, None)?;
    checks.record(
        "derived_equality",
        (bounds.min_expected - sol.value).abs() <= 1e-7 * scale,
        format!(
            "min payoff at derived profile {} vs value {}",
            bounds.min_expected, sol.value
        ),
    );

    let saddle = verify_saddle(&t, &sol, samples, seed)?;
    checks.record(
        "saddle",
        saddle.passed,
        format!(
            "worst violation {:.3e} over {} checks",
            saddle.worst_violation, saddle.checks
        ),
    );

    if support_combinations(&t) <= ORACLE_BUDGET as u128 {
        let certs = support_enumeration(&t, ORACLE_BUDGET)?;
        if certs.is_empty() {
            checks.skip("reference_bounds", "oracle found no certificate".into());
        }
        for (k, cert) in certs.iter().enumerate() {
            let tag = k + 1;
            let combined = t.combined_value(&sol.selector, &cert.profile)?;
            checks.record(
                &format!("reference_bound_{tag}"),
                combined <= sol.value + 1e-7 * scale,
                format!(
                    "combined payoff at reference {combined} vs value {}",
                    sol.value
                ),
            );

            let rb = bounds_report(&t, &sol, Some(&cert.profile))?;
            match (rb.average_bound, rb.average_bound_applies) {
                (Some(cap), true) => {
                    let avg = rb.average_at_reference.expect("reference given");
                    checks.record(
                        &format!("average_cap_{tag}"),
                        avg <= cap + 1e-7 * scale,
                        format!("average reference payoff {avg} vs cap {cap}"),
                    );
                }
                _ => checks.skip(
                    &format!("average_cap_{tag}"),
                    "preconditions not met (vanishing weight or negative payoff)".into(),
                ),
            }

            let image = nash_map(&t, &cert.profile)?;
            let moved = profile_distance(&image, &cert.profile);
            checks.record(
                &format!("map_fixed_point_{tag}"),
                cert.residual <= 1e-9 && moved <= 1e-9,
                format!("residual {:.3e}, map moved {moved:.3e}", cert.residual),
            );

            let mut worst_identity: f64 = 0.0;
            for i in 0..n {
                let base = t.expected_payoff(i, &cert.profile)?;
                let dev = t.deviation_values(i, &cert.profile)?;
                let weighted: f64 = cert
                    .profile
                    .strategy(i)
                    .probs()
                    .iter()
                    .zip(&dev)
                    .map(|(p, v)| p * (v - base))
                    .sum();
                worst_identity = worst_identity.max(weighted.abs());
            }
            checks.record(
                &format!("deviation_identity_{tag}"),
                worst_identity <= 1e-10,
                format!("worst weighted deviation sum {worst_identity:.3e}"),
            );
        }
    } else {
        checks.skip("reference_bounds", "game above oracle budget".into());
    }

    for line in &checks.lines {
        println!("{line}");
    }
    println!(
        "verify: {} checks, {} violations",
        checks.lines.len(),
        checks.violations
    );
    Ok(if checks.violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_scale(
    game: &Path,
    d0: Option<&str>,
    random_d: bool,
    seed: u64,
    iters: usize,
    conv_tol: f64,
    pos_tol: f64,
    out: Option<&Path>,
) -> Result<ExitCode> {
    if conv_tol <= 0.0 || pos_tol <= 0.0 {
        return Err(Error::InvalidArgument(
            "tolerances must be strictly positive".into(),
        ));
    }
    let t = load_game(game)?;
    let n = t.num_players();
    let start = match (d0, random_d) {
        (Some(text), _) => parse_floats(text, "weights")?,
        (None, true) => random_weights(n, seed, pos_tol)?,
        (None, false) => vec![1.0 / n as f64; n],
    };
    let options = ScalingOptions {
        max_iters: iters,
        conv_tol,
        pos_tol,
        minimax: Default::default(),
    };
    let trace = scaling_iterate(&t, &start, &options)?;
    write_text(out, &scaling_trace_csv(n, &trace))?;
    if let StopReason::SolverFailure(msg) = &trace.stop_reason {
        eprintln!("mulmin: walk stopped early: {msg}");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_nashmap(
    game: &Path,
    start: Option<&str>,
    iters: usize,
    tol: f64,
    out: Option<&Path>,
) -> Result<ExitCode> {
    if tol <= 0.0 {
        return Err(Error::InvalidArgument(
            "tol must be strictly positive".into(),
        ));
    }
    let t = load_game(game)?;
    let p0 = match start {
        Some(text) => parse_profile(text, t.shape())?,
        None => MixedProfile::uniform(t.shape()),
    };
    let mut states: Vec<NashMapState> = vec![state(&t, &p0)?];
    for _ in 0..iters {
        let current = states.last().expect("starts non-empty");
        if current.residual <= tol {
            break;
        }
        let next = nash_map(&t, &current.profile)?;
        states.push(state(&t, &next)?);
    }
    write_text(out, &nashmap_csv(&states))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(shape: &str, seed: u64, lo: f64, hi: f64, out: &Path) -> Result<ExitCode> {
    let shape = parse_shape(shape)?;
    let t = PayoffTensor::random(shape, seed, lo, hi)?;
    write_text(Some(out), &t.save_game())?;
    eprintln!(
        "mulmin: wrote {} game ({} payoffs) to {}",
        shape_token(t.shape()),
        t.num_players() * t.shape().total_profiles(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_ensemble(
    shape: &str,
    count: usize,
    seed: u64,
    mode: EnsembleMode,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let shape = parse_shape(shape)?;
    let mut text = String::new();
    match mode {
        EnsembleMode::Solve => {
            text.push_str(ENSEMBLE_SOLVE_HEADER);
            text.push('\n');
            for k in 0..count {
                let game_seed = seed + k as u64;
                let t = PayoffTensor::random(shape.clone(), game_seed, -1.0, 1.0)?;
                let sol = solve_minimax(&t)?;
                let q = quality(&t, &sol.derived_profile)?;
                let _ = writeln!(
                    text,
                    "{}",
                    ensemble_solve_row(k + 1, game_seed, &shape, &sol, &q)
                );
            }
        }
        EnsembleMode::Scale => {
            text.push_str(ENSEMBLE_SCALE_HEADER);
            text.push('\n');
            let options = ScalingOptions::default();
            for k in 0..count {
                let game_seed = seed + k as u64;
                let t = PayoffTensor::random(shape.clone(), game_seed, -1.0, 1.0)?;
                let start = random_weights(t.num_players(), game_seed, options.pos_tol)?;
                let trace = scaling_iterate(&t, &start, &options)?;
                let _ = writeln!(
                    text,
                    "{}",
                    ensemble_scale_row(k + 1, game_seed, &shape, &trace)
                );
            }
        }
    }
    write_text(out, &text)?;
    Ok(ExitCode::SUCCESS)
}
