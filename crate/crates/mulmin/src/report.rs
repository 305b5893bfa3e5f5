//! Machine-readable output: a small JSON emitter with a fixed field order
//! and exact float round-tripping, plus the CSV trace formats.
//!
//! Serde is deliberately not used here: the machine format promises byte
//! identity across runs and 17 significant digits on every float, which is
//! easier to guarantee with an emitter that owns every byte it writes.

use crate::minimax::{BoundsReport, MinimaxSolution, QualityReport, SaddleReport};
use crate::multilinear::MixedProfile;
use crate::nashmap::NashMapState;
use crate::oracle::EquilibriumCertificate;
use crate::scaling::{ScalingStep, ScalingTrace, StopReason};
use crate::tensor::GameShape;

/// Render a float with 17 significant digits, enough for bit-exact
/// round-trips through text. Non-finite values are spelled out; they never
/// appear in healthy output.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// A JSON value with insertion-ordered object fields.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(&'static str, Json)>),
}

impl Json {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(k) => out.push_str(&k.to_string()),
            Json::Num(x) => {
                if x.is_finite() {
                    out.push_str(&fmt_f64(*x));
                } else {
                    out.push_str("null");
                }
            }
            Json::Str(s) => write_escaped(out, s),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    item.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (k, (key, value)) in fields.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    write_escaped(out, key);
                    out.push_str(": ");
                    value.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn push_indent(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn num_list(values: &[f64]) -> Json {
    Json::Arr(values.iter().map(|&x| Json::Num(x)).collect())
}

fn opt_num(value: Option<f64>) -> Json {
    match value {
        Some(x) => Json::Num(x),
        None => Json::Null,
    }
}

/// A mixed profile as an array of per-player probability arrays.
pub fn profile_json(profile: &MixedProfile) -> Json {
    Json::Arr(
        profile
            .strategies()
            .iter()
            .map(|s| num_list(s.probs()))
            .collect(),
    )
}

pub fn shape_json(shape: &GameShape) -> Json {
    Json::Arr(
        shape
            .strategy_counts()
            .iter()
            .map(|&c| Json::Int(c as i64))
            .collect(),
    )
}

pub fn solution_json(shape: &GameShape, s: &MinimaxSolution) -> Json {
    Json::Obj(vec![
        ("shape", shape_json(shape)),
        ("value", Json::Num(s.value)),
        ("selector", num_list(s.selector.weights())),
        ("profile_weights", num_list(&s.profile_weights)),
        ("derived_profile", profile_json(&s.derived_profile)),
        ("support_size", Json::Int(s.support_size as i64)),
        (
            "support",
            Json::Arr(
                s.support(crate::minimax::SUPPORT_THRESHOLD)
                    .iter()
                    .map(|&flat| Json::Int(flat as i64 + 1))
                    .collect(),
            ),
        ),
        ("duality_gap", opt_num(s.duality_gap)),
        ("pivots", Json::Int(s.pivots as i64)),
    ])
}

pub fn quality_json(q: &QualityReport) -> Json {
    Json::Obj(vec![
        (
            "players",
            Json::Arr(
                q.players
                    .iter()
                    .map(|p| {
                        Json::Obj(vec![
                            ("expected", Json::Num(p.expected)),
                            ("best_response_value", Json::Num(p.best_response_value)),
                            ("additive_gap", Json::Num(p.additive_gap)),
                            ("ratio", opt_num(p.ratio)),
                        ])
                    })
                    .collect(),
            ),
        ),
        ("additive_gap", Json::Num(q.additive_gap)),
        ("ratio", opt_num(q.ratio)),
    ])
}

pub fn bounds_json(b: &BoundsReport) -> Json {
    Json::Obj(vec![
        ("expected_at_derived", num_list(&b.expected_at_derived)),
        ("min_expected", Json::Num(b.min_expected)),
        ("combined_at_derived", Json::Num(b.combined_at_derived)),
        ("value", Json::Num(b.value)),
        ("selector_min", Json::Num(b.selector_min)),
        ("average_bound", opt_num(b.average_bound)),
        ("average_bound_applies", Json::Bool(b.average_bound_applies)),
        ("combined_at_reference", opt_num(b.combined_at_reference)),
        ("average_at_reference", opt_num(b.average_at_reference)),
    ])
}

pub fn saddle_json(r: &SaddleReport) -> Json {
    Json::Obj(vec![
        ("passed", Json::Bool(r.passed)),
        ("worst_violation", Json::Num(r.worst_violation)),
        ("checks", Json::Int(r.checks as i64)),
    ])
}

pub fn certificate_json(c: &EquilibriumCertificate) -> Json {
    Json::Obj(vec![
        ("kind", Json::Str(c.kind.label().into())),
        ("residual", Json::Num(c.residual)),
        ("profile", profile_json(&c.profile)),
    ])
}

pub fn certificates_json(certs: &[EquilibriumCertificate]) -> Json {
    Json::Obj(vec![
        ("count", Json::Int(certs.len() as i64)),
        (
            "certificates",
            Json::Arr(certs.iter().map(certificate_json).collect()),
        ),
    ])
}

impl StopReason {
    /// Stable lowercase token used in text output.
    pub fn label(&self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::BoundaryHit => "boundary_hit",
            StopReason::MaxIters => "max_iters",
            StopReason::SolverFailure(_) => "solver_failure",
        }
    }
}

fn push_cell(row: &mut String, cell: &str) {
    if !row.is_empty() {
        row.push(',');
    }
    row.push_str(cell);
}

/// The walk as CSV. One row per step, `iter` counting from 1; `t` is empty
/// when no ratio is defined and `stop_reason` is filled only on the last
/// row.
pub fn scaling_trace_csv(players: usize, trace: &ScalingTrace) -> String {
    let mut out = String::new();
    let mut header = String::from("iter");
    for i in 1..=players {
        push_cell(&mut header, &format!("d{i}"));
    }
    push_cell(&mut header, "sigma");
    push_cell(&mut header, "value");
    for i in 1..=players {
        push_cell(&mut header, &format!("dprime{i}"));
    }
    push_cell(&mut header, "bound_rhs");
    push_cell(&mut header, "t");
    push_cell(&mut header, "eps");
    push_cell(&mut header, "stop_reason");
    out.push_str(&header);
    out.push('\n');

    for (k, step) in trace.steps.iter().enumerate() {
        let last = k + 1 == trace.steps.len();
        out.push_str(&scaling_row(
            step,
            if last { Some(&trace.stop_reason) } else { None },
        ));
        out.push('\n');
    }
    out
}

fn scaling_row(step: &ScalingStep, stop: Option<&StopReason>) -> String {
    let mut row = String::new();
    push_cell(&mut row, &(step.iteration + 1).to_string());
    for &d in &step.weights {
        push_cell(&mut row, &fmt_f64(d));
    }
    push_cell(&mut row, &fmt_f64(step.sigma));
    push_cell(&mut row, &fmt_f64(step.solution.value));
    for &d in &step.next_weights {
        push_cell(&mut row, &fmt_f64(d));
    }
    push_cell(&mut row, &fmt_f64(step.bound_rhs));
    push_cell(
        &mut row,
        &step.quality_ratio.map(fmt_f64).unwrap_or_default(),
    );
    push_cell(&mut row, &fmt_f64(step.additive_gap));
    push_cell(&mut row, stop.map(StopReason::label).unwrap_or(""));
    row
}

/// The gain-map walk as CSV: `iteration` counts map applications, so the
/// starting profile is iteration 0. `c{i}` columns hold the per-player
/// gain sums.
pub fn nashmap_csv(states: &[NashMapState]) -> String {
    let mut out = String::new();
    let players = states.first().map_or(0, |s| s.gain_sums.len());
    let mut header = String::from("iteration");
    push_cell(&mut header, "residual");
    for i in 1..=players {
        push_cell(&mut header, &format!("c{i}"));
    }
    out.push_str(&header);
    out.push('\n');
    for (k, s) in states.iter().enumerate() {
        let mut row = String::new();
        push_cell(&mut row, &k.to_string());
        push_cell(&mut row, &fmt_f64(s.residual));
        for &c in &s.gain_sums {
            push_cell(&mut row, &fmt_f64(c));
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub const ENSEMBLE_SOLVE_HEADER: &str = "game,seed,shape,value,duality_gap,support_size,t,eps";

pub const ENSEMBLE_SCALE_HEADER: &str = "game,seed,shape,steps,stop_reason,value,bound_rhs,t,eps";

/// Shape token used in CSV cells: counts joined by `x`, no commas.
pub fn shape_token(shape: &GameShape) -> String {
    shape
        .strategy_counts()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join("x")
}

/// One `game` row of the solve-mode ensemble CSV.
pub fn ensemble_solve_row(
    game: usize,
    seed: u64,
    shape: &GameShape,
    solution: &MinimaxSolution,
    quality: &QualityReport,
) -> String {
    let mut row = String::new();
    push_cell(&mut row, &game.to_string());
    push_cell(&mut row, &seed.to_string());
    push_cell(&mut row, &shape_token(shape));
    push_cell(&mut row, &fmt_f64(solution.value));
    push_cell(
        &mut row,
        &solution.duality_gap.map(fmt_f64).unwrap_or_default(),
    );
    push_cell(&mut row, &solution.support_size.to_string());
    push_cell(&mut row, &quality.ratio.map(fmt_f64).unwrap_or_default());
    push_cell(&mut row, &fmt_f64(quality.additive_gap));
    row
}

/// One `game` row of the scale-mode ensemble CSV; final-step values, empty
/// cells when the trace has no steps.
pub fn ensemble_scale_row(
    game: usize,
    seed: u64,
    shape: &GameShape,
    trace: &ScalingTrace,
) -> String {
    let mut row = String::new();
    push_cell(&mut row, &game.to_string());
    push_cell(&mut row, &seed.to_string());
    push_cell(&mut row, &shape_token(shape));
    push_cell(&mut row, &trace.steps.len().to_string());
    push_cell(&mut row, trace.stop_reason.label());
    match trace.last_step() {
        Some(step) => {
            push_cell(&mut row, &fmt_f64(step.solution.value));
            push_cell(&mut row, &fmt_f64(step.bound_rhs));
            push_cell(
                &mut row,
                &step.quality_ratio.map(fmt_f64).unwrap_or_default(),
            );
            push_cell(&mut row, &fmt_f64(step.additive_gap));
        }
        None => {
            for _ in 0..4 {
                push_cell(&mut row, "");
            }
        }
    }
    row
}
