//! The minimax relaxation: scalarize the game with selector weights, bound
//! the scalarized payoff by a pair of linear programs, and read a candidate
//! profile out of the optimal profile weights.
//!
//! Front side: `min_x max_I sum_i a(i, I) x_i`, a small LP over the player
//! simplex. Back side: `max_q min_i sum_I a(i, I) q_I`, an LP over
//! distributions on pure profiles. Both share the optimal value; the
//! selector `x*` is recovered from the back side's row duals, and the
//! candidate profile `p*` takes per-player marginals of `q*`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lp::{DenseSimplex, LinearProgram, LpSolver, LpStatus, Relation, SimplexOptions};
use crate::multilinear::{flat_dirichlet, MixedProfile, MixedStrategy, SelectorWeights};
use crate::tensor::{GameShape, PayoffTensor};
use crate::{Error, Result};

/// Relative tolerance on the front/back value agreement cross-check.
const GAP_TOL: f64 = 1e-8;

/// Allowed slack when certifying the saddle inequalities.
pub const SADDLE_SLACK: f64 = 1e-7;

/// Expected payoffs below this have no meaningful multiplicative quality.
const RATIO_FLOOR: f64 = 1e-9;

/// Weights above this count toward the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct MinimaxOptions {
    pub simplex: SimplexOptions,
    /// Solve the front-side LP too and compare values, when the profile
    /// count does not exceed this. Zero disables the cross-check.
    pub cross_check_limit: usize,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        MinimaxOptions {
            simplex: SimplexOptions::default(),
            cross_check_limit: 4096,
        }
    }
}

/// Optimal data of the relaxation for one game.
#[derive(Debug, Clone)]
pub struct MinimaxSolution {
    /// The shared optimal value of both sides.
    pub value: f64,
    /// Optimal selector weights `x*`, recovered from the back side's duals.
    pub selector: SelectorWeights,
    /// Optimal distribution `q*` over pure profiles, canonical order.
    pub profile_weights: Vec<f64>,
    /// Marginals of `q*`: the candidate mixed profile `p*`.
    pub derived_profile: MixedProfile,
    /// Number of profiles with weight above [`SUPPORT_THRESHOLD`]. A basic
    /// optimum never needs more than `n + 1`.
    pub support_size: usize,
    /// `|front value - back value|` when the cross-check ran.
    pub duality_gap: Option<f64>,
    /// Pivots spent on the back-side solve.
    pub pivots: usize,
}

impl MinimaxSolution {
    /// Flat profile indices carrying weight above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        (0..self.profile_weights.len())
            .filter(|&k| self.profile_weights[k] > threshold)
            .collect()
    }
}

/// Front-side LP: variables `x_1..x_n` and a free bound `d`; minimize `d`
/// subject to `sum_i a(i, I) x_i <= d` per profile and `sum_i x_i = 1`.
pub fn build_primal(tensor: &PayoffTensor) -> LinearProgram {
    let n = tensor.num_players();
    let nhat = tensor.shape().total_profiles();
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LinearProgram::new(objective);
    lp.mark_free(n);
    for flat in 0..nhat {
        let mut coeffs = vec![0.0; n + 1];
        for (i, c) in coeffs.iter_mut().take(n).enumerate() {
            *c = tensor.payoff_flat(i, flat);
        }
        coeffs[n] = -1.0;
        lp.push(coeffs, Relation::Le, 0.0);
    }
    lp.push(
        (0..=n).map(|j| if j < n { 1.0 } else { 0.0 }).collect(),
        Relation::Eq,
        1.0,
    );
    let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    names.push("d".into());
    lp.names = Some(names);
    lp
}

/// Back-side LP: variables `q_I` and a free bound `l`; maximize `l` subject
/// to `sum_I a(i, I) q_I >= l` per player and `sum_I q_I = 1`.
pub fn build_dual(tensor: &PayoffTensor) -> LinearProgram {
    let n = tensor.num_players();
    let nhat = tensor.shape().total_profiles();
    let mut objective = vec![0.0; nhat + 1];
    objective[nhat] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    lp.mark_free(nhat);
    for i in 0..n {
        let mut coeffs = vec![0.0; nhat + 1];
        for (flat, c) in coeffs.iter_mut().take(nhat).enumerate() {
            *c = tensor.payoff_flat(i, flat);
        }
        coeffs[nhat] = -1.0;
        lp.push(coeffs, Relation::Ge, 0.0);
    }
    lp.push(
        (0..=nhat)
            .map(|j| if j < nhat { 1.0 } else { 0.0 })
            .collect(),
        Relation::Eq,
        1.0,
    );
    let mut names: Vec<String> = tensor.shape().profiles().map(|p| format!("q{p}")).collect();
    names.push("l".into());
    lp.names = Some(names);
    lp
}

/// Per-player marginals of a distribution over pure profiles.
pub fn derived_profile(shape: &GameShape, profile_weights: &[f64]) -> Result<MixedProfile> {
    let nhat = shape.total_profiles();
    if profile_weights.len() != nhat {
        return Err(Error::InvalidArgument(format!(
            "{} profile weights for {} profiles",
            profile_weights.len(),
            nhat
        )));
    }
    let mut marginals: Vec<Vec<f64>> = shape
        .strategy_counts()
        .iter()
        .map(|&c| vec![0.0; c])
        .collect();
    for (flat, pure) in shape.profiles().enumerate() {
        let w = profile_weights[flat];
        if !w.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "profile weight {} is not finite",
                flat + 1
            )));
        }
        for (i, &a) in pure.actions().iter().enumerate() {
            marginals[i][a] += w;
        }
    }
    let strategies = marginals
        .into_iter()
        .map(MixedStrategy::from_unnormalized)
        .collect::<Result<Vec<_>>>()?;
    MixedProfile::new(strategies)
}

/// Solve the relaxation with default options.
pub fn solve_minimax(tensor: &PayoffTensor) -> Result<MinimaxSolution> {
    solve_minimax_with(tensor, &MinimaxOptions::default())
}

pub fn solve_minimax_with(
    tensor: &PayoffTensor,
    options: &MinimaxOptions,
) -> Result<MinimaxSolution> {
    let n = tensor.num_players();
    let nhat = tensor.shape().total_profiles();
    let solver = DenseSimplex {
        options: options.simplex,
    };

    let back = build_dual(tensor);
    let sol = solver.solve(&back)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::SolverFailure(format!(
            "back-side solve ended {:?} after {} pivots",
            sol.status, sol.pivots
        )));
    }
    let value = sol.objective;
    let mut profile_weights = sol.variables[..nhat].to_vec();
    for w in &mut profile_weights {
        // basic solutions can sit a hair below zero
        if *w < 0.0 {
            *w = 0.0;
        }
    }
    // under a maximized objective the player-row shadow prices come out
    // nonpositive; their negations are the optimal selector weights
    let selector = SelectorWeights::from_unnormalized(sol.duals[..n].iter().map(|y| -y).collect())?;
    let derived = derived_profile(tensor.shape(), &profile_weights)?;
    let support_size = profile_weights
        .iter()
        .filter(|&&w| w > SUPPORT_THRESHOLD)
        .count();

    let duality_gap = if nhat <= options.cross_check_limit && options.cross_check_limit > 0 {
        let front = build_primal(tensor);
        let fsol = solver.solve(&front)?;
        if fsol.status != LpStatus::Optimal {
            return Err(Error::SolverFailure(format!(
                "front-side solve ended {:?} after {} pivots",
                fsol.status, fsol.pivots
            )));
        }
        let gap = (fsol.objective - value).abs();
        let tol = GAP_TOL * tensor.max_abs().max(1.0);
        if gap > tol {
            return Err(Error::SolverFailure(format!(
                "front and back values disagree by {gap:e} (tolerance {tol:e})"
            )));
        }
        Some(gap)
    } else {
        None
    };

    Ok(MinimaxSolution {
        value,
        selector,
        profile_weights,
        derived_profile: derived,
        support_size,
        duality_gap,
        pivots: sol.pivots,
    })
}

/// Outcome of sweeping the saddle inequalities around a solution.
#[derive(Debug, Clone, Copy)]
pub struct SaddleReport {
    /// True when no check exceeded [`SADDLE_SLACK`].
    pub passed: bool,
    /// Largest signed violation seen; negative means all checks had slack.
    pub worst_violation: f64,
    /// Number of inequality checks performed.
    pub checks: usize,
}

/// Certify `A_0[x*, p] <= mid <= A_0[x, p*]` around `mid = A_0[x*, p*]`.
///
/// The left inequality is exhausted exactly: by multilinearity it holds for
/// every product profile iff it holds at every pure profile. The right side
/// is likewise swept over the selector vertices, where it reads
/// `A_i[p*] >= mid`. On top of the exact sweeps, `samples` random
/// `(x, p)` pairs drawn from flat Dirichlet distributions re-test both
/// sides; they can only re-confirm what the sweeps decide, but they exercise
/// interior points too.
///
/// A failure here is not a solver bug by itself: `mid` evaluates `q*`'s
/// marginals, and a correlated `q*` can leak value in the passage to
/// marginals so that no saddle exists at `p*`. See the bounds report for
/// inequalities that survive regardless.
pub fn verify_saddle(
    tensor: &PayoffTensor,
    solution: &MinimaxSolution,
    samples: usize,
    seed: u64,
) -> Result<SaddleReport> {
    solution.derived_profile.check_shape(tensor.shape())?;
    if solution.selector.len() != tensor.num_players() {
        return Err(Error::InvalidArgument(format!(
            "{} selector weights for {} players",
            solution.selector.len(),
            tensor.num_players()
        )));
    }
    let n = tensor.num_players();
    let x = solution.selector.weights();
    let p = &solution.derived_profile;
    let mid = tensor.combined_value(&solution.selector, p)?;

    let mut worst = f64::NEG_INFINITY;
    let mut checks = 0usize;

    // pure-profile sweep of the left side
    for flat in 0..tensor.shape().total_profiles() {
        let combined: f64 = (0..n).map(|i| x[i] * tensor.payoff_flat(i, flat)).sum();
        worst = worst.max(combined - mid);
        checks += 1;
    }
    // selector-vertex sweep of the right side
    for i in 0..n {
        let expected = tensor.expected_payoff(i, p)?;
        worst = worst.max(mid - expected);
        checks += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let xr = SelectorWeights::new(flat_dirichlet(&mut rng, n))?;
        let strategies = tensor
            .shape()
            .strategy_counts()
            .iter()
            .map(|&c| MixedStrategy::new(flat_dirichlet(&mut rng, c)))
            .collect::<Result<Vec<_>>>()?;
        let pr = MixedProfile::new(strategies)?;
        worst = worst.max(tensor.combined_value(&solution.selector, &pr)? - mid);
        worst = worst.max(mid - tensor.combined_value(&xr, p)?);
        checks += 2;
    }

    Ok(SaddleReport {
        passed: worst <= SADDLE_SLACK,
        worst_violation: worst,
        checks,
    })
}

/// How far one player is from best-responding at a profile.
#[derive(Debug, Clone, Copy)]
pub struct PlayerQuality {
    /// `A_i[p]`, the payoff at the profile.
    pub expected: f64,
    /// `max_j A_i[p | e_j]`, the best unilateral deviation payoff.
    pub best_response_value: f64,
    /// `best_response_value - expected`, clamped to be nonnegative.
    pub additive_gap: f64,
    /// `best_response_value / expected`, only when `expected` is safely
    /// positive; `None` otherwise since the ratio loses meaning at or below
    /// zero.
    pub ratio: Option<f64>,
}

/// Per-player and aggregate approximation quality of a profile.
#[derive(Debug, Clone)]
pub struct QualityReport {
    pub players: Vec<PlayerQuality>,
    /// Largest additive gap over players: the profile is an
    /// `additive_gap`-approximate equilibrium.
    pub additive_gap: f64,
    /// Largest defined per-player ratio, when any exists.
    pub ratio: Option<f64>,
}

/// Measure how close a profile is to an equilibrium of the game.
pub fn quality(tensor: &PayoffTensor, profile: &MixedProfile) -> Result<QualityReport> {
    profile.check_shape(tensor.shape())?;
    let mut players = Vec::with_capacity(tensor.num_players());
    for i in 0..tensor.num_players() {
        let expected = tensor.expected_payoff(i, profile)?;
        let (_, best_response_value) = tensor.best_response(i, profile)?;
        // the profile's own payoff is a convex combination of deviation
        // payoffs, so the raw gap is nonnegative up to roundoff
        let additive_gap = (best_response_value - expected).max(0.0);
        let ratio = if expected > RATIO_FLOOR {
            Some(best_response_value / expected)
        } else {
            None
        };
        players.push(PlayerQuality {
            expected,
            best_response_value,
            additive_gap,
            ratio,
        });
    }
    let additive_gap = players.iter().map(|q| q.additive_gap).fold(0.0, f64::max);
    let ratio = players
        .iter()
        .filter_map(|q| q.ratio)
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.max(r)))
        });
    Ok(QualityReport {
        players,
        additive_gap,
        ratio,
    })
}

/// Payoff guarantees that survive even when the saddle check fails.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    /// `A_i[p*]` per player at the derived profile.
    pub expected_at_derived: Vec<f64>,
    /// The smallest of those.
    pub min_expected: f64,
    /// `A_0[x*, p*]`, the selector-weighted payoff at the derived profile.
    /// Never exceeds `value`, but can fall strictly below it.
    pub combined_at_derived: f64,
    /// The relaxation's optimal value.
    pub value: f64,
    /// Smallest selector weight; the average bound divides by it.
    pub selector_min: f64,
    /// `value / (n * selector_min)` when `selector_min` is safely positive.
    /// Caps the average equilibrium payoff `(1/n) sum_i A_i[p]` at any
    /// profile `p` where every player's payoff is nonnegative.
    pub average_bound: Option<f64>,
    /// True only when the cap provably applies to `reference`: the selector
    /// is strictly positive, a reference was given, and every player's
    /// payoff there is nonnegative.
    pub average_bound_applies: bool,
    /// `A_0[x*, p_ref]` at the reference profile, when given. Never exceeds
    /// `value` by selector feasibility.
    pub combined_at_reference: Option<f64>,
    /// `(1/n) sum_i A_i[p_ref]`, the quantity the average bound caps.
    pub average_at_reference: Option<f64>,
}

/// Evaluate the guarantees a solution carries, optionally against a
/// reference equilibrium. Preconditions are flagged, never enforced.
pub fn bounds_report(
    tensor: &PayoffTensor,
    solution: &MinimaxSolution,
    reference: Option<&MixedProfile>,
) -> Result<BoundsReport> {
    solution.derived_profile.check_shape(tensor.shape())?;
    if let Some(r) = reference {
        r.check_shape(tensor.shape())?;
    }
    let n = tensor.num_players();
    let expected_at_derived = (0..n)
        .map(|i| tensor.expected_payoff(i, &solution.derived_profile))
        .collect::<Result<Vec<_>>>()?;
    let min_expected = expected_at_derived
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let combined_at_derived =
        tensor.combined_value(&solution.selector, &solution.derived_profile)?;
    let selector_min = solution.selector.min_weight();
    let average_bound = if selector_min > SUPPORT_THRESHOLD {
        Some(solution.value / (n as f64 * selector_min))
    } else {
        None
    };

    let mut combined_at_reference = None;
    let mut average_at_reference = None;
    let mut reference_nonnegative = false;
    if let Some(r) = reference {
        combined_at_reference = Some(tensor.combined_value(&solution.selector, r)?);
        let mut sum = 0.0;
        let mut min_ref = f64::INFINITY;
        for i in 0..n {
            let e = tensor.expected_payoff(i, r)?;
            sum += e;
            min_ref = min_ref.min(e);
        }
        average_at_reference = Some(sum / n as f64);
        reference_nonnegative = min_ref >= 0.0;
    }

    Ok(BoundsReport {
        expected_at_derived,
        min_expected,
        combined_at_derived,
        value: solution.value,
        selector_min,
        average_bound,
        average_bound_applies: average_bound.is_some()
            && reference.is_some()
            && reference_nonnegative,
        combined_at_reference,
        average_at_reference,
    })
}
