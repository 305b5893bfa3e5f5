//! Player-weight rescaling: multiply each player's payoffs by a positive
//! weight, re-solve, and feed the optimal selector back into the weights.
//!
//! Scaling player `i` by `d_i > 0` leaves best responses and equilibria
//! untouched while moving the relaxation's optimum around. The update
//! `d'_i = d_i x*_i(d) / sigma` with `sigma = sum_i d_i x*_i(d)` keeps the
//! weights on the simplex and stops exactly when the scaled game's selector
//! is uniform. Each step also evaluates the derived profile against the
//! original game, so a trace shows whether the walk finds better candidate
//! profiles than the single unscaled solve.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::minimax::{quality, solve_minimax_with, MinimaxOptions, MinimaxSolution};
use crate::multilinear::flat_dirichlet;
use crate::tensor::PayoffTensor;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct ScalingOptions {
    /// Maximum number of solve-and-update steps per trace.
    pub max_iters: usize,
    /// Declare convergence when no weight moves by more than this.
    pub conv_tol: f64,
    /// Stop when a weight falls to this or below; the scaled game is
    /// effectively losing a player.
    pub pos_tol: f64,
    pub minimax: MinimaxOptions,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        ScalingOptions {
            max_iters: 100,
            conv_tol: 1e-9,
            pos_tol: 1e-9,
            minimax: MinimaxOptions::default(),
        }
    }
}

/// Why a trace ended.
#[derive(Debug, Clone, PartialEq)]
pub enum StopReason {
    /// The weights reached a fixed point: the scaled selector is uniform.
    Converged,
    /// A weight fell to the positivity floor.
    BoundaryHit,
    /// The step budget ran out first.
    MaxIters,
    /// A solve failed mid-trace; the steps before it are kept.
    SolverFailure(String),
}

/// One solve-and-update step of the walk.
#[derive(Debug, Clone)]
pub struct ScalingStep {
    /// 0-based position in the trace.
    pub iteration: usize,
    /// Weights `d` this step solved under.
    pub weights: Vec<f64>,
    /// Solution of the scaled game.
    pub solution: MinimaxSolution,
    /// `sum_i d_i x*_i(d)`, the normalizer of the update.
    pub sigma: f64,
    /// Updated weights `d'`.
    pub next_weights: Vec<f64>,
    /// `sum_i d'_i A_i[p*(d)]` against the unscaled payoffs. Never exceeds
    /// `solution.value / sigma`.
    pub bound_rhs: f64,
    /// Largest best-response ratio of `p*(d)` in the unscaled game, when
    /// defined.
    pub quality_ratio: Option<f64>,
    /// Largest additive best-response gap of `p*(d)` in the unscaled game.
    pub additive_gap: f64,
}

/// A full walk: the steps taken and why it stopped.
#[derive(Debug, Clone)]
pub struct ScalingTrace {
    pub steps: Vec<ScalingStep>,
    pub stop_reason: StopReason,
}

impl ScalingTrace {
    pub fn last_step(&self) -> Option<&ScalingStep> {
        self.steps.last()
    }
}

fn check_weights(tensor: &PayoffTensor, weights: &[f64]) -> Result<()> {
    if weights.len() != tensor.num_players() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {} players",
            weights.len(),
            tensor.num_players()
        )));
    }
    for (i, &d) in weights.iter().enumerate() {
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "weight {} is {}, need a strictly positive finite value",
                i + 1,
                d
            )));
        }
    }
    Ok(())
}

/// The rescaled game: player `i`'s payoffs multiplied by `weights[i]`.
pub fn scale(tensor: &PayoffTensor, weights: &[f64]) -> Result<PayoffTensor> {
    check_weights(tensor, weights)?;
    let nhat = tensor.shape().total_profiles();
    let mut payoffs = Vec::with_capacity(tensor.num_players() * nhat);
    for (i, &d) in weights.iter().enumerate() {
        for flat in 0..nhat {
            payoffs.push(d * tensor.payoff_flat(i, flat));
        }
    }
    PayoffTensor::new(tensor.shape().clone(), payoffs)
}

/// Solve the game scaled by `weights` and compute the weight update plus
/// the derived profile's standing in the unscaled game.
pub fn scaling_step(
    tensor: &PayoffTensor,
    weights: &[f64],
    options: &ScalingOptions,
) -> Result<ScalingStep> {
    let scaled = scale(tensor, weights)?;
    let solution = solve_minimax_with(&scaled, &options.minimax)?;
    let x = solution.selector.weights();
    let sigma: f64 = weights.iter().zip(x).map(|(d, xi)| d * xi).sum();
    // sigma >= min_i d_i > 0 because the selector sums to one, so only a
    // weight vector already at the boundary can make it collapse
    let next_weights: Vec<f64> = if sigma <= options.pos_tol {
        weights.to_vec()
    } else {
        weights
            .iter()
            .zip(x)
            .map(|(d, xi)| d * xi / sigma)
            .collect()
    };
    let mut bound_rhs = 0.0;
    for (i, &dn) in next_weights.iter().enumerate() {
        bound_rhs += dn * tensor.expected_payoff(i, &solution.derived_profile)?;
    }
    let q = quality(tensor, &solution.derived_profile)?;
    Ok(ScalingStep {
        iteration: 0,
        weights: weights.to_vec(),
        solution,
        sigma,
        next_weights,
        bound_rhs,
        quality_ratio: q.ratio,
        additive_gap: q.additive_gap,
    })
}

/// Run the walk from `start` until convergence, the boundary, the step
/// budget, or a failed solve.
pub fn scaling_iterate(
    tensor: &PayoffTensor,
    start: &[f64],
    options: &ScalingOptions,
) -> Result<ScalingTrace> {
    check_weights(tensor, start)?;
    let mut weights = start.to_vec();
    let mut steps = Vec::new();
    for iteration in 0..options.max_iters {
        let mut step = match scaling_step(tensor, &weights, options) {
            Ok(step) => step,
            // keep what the walk produced so far; the caller sees both the
            // partial trace and the reason it ends early
            Err(Error::SolverFailure(msg)) => {
                return Ok(ScalingTrace {
                    steps,
                    stop_reason: StopReason::SolverFailure(msg),
                })
            }
            Err(other) => return Err(other),
        };
        step.iteration = iteration;
        let moved = step
            .weights
            .iter()
            .zip(&step.next_weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let floor = step
            .next_weights
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let sigma_collapsed = step.sigma <= options.pos_tol;
        weights = step.next_weights.clone();
        steps.push(step);
        if floor <= options.pos_tol || sigma_collapsed {
            return Ok(ScalingTrace {
                steps,
                stop_reason: StopReason::BoundaryHit,
            });
        }
        if moved <= options.conv_tol {
            return Ok(ScalingTrace {
                steps,
                stop_reason: StopReason::Converged,
            });
        }
    }
    Ok(ScalingTrace {
        steps,
        stop_reason: StopReason::MaxIters,
    })
}

/// A random strictly positive starting point on the weight simplex.
pub fn random_weights(players: usize, seed: u64, pos_tol: f64) -> Result<Vec<f64>> {
    if players == 0 {
        return Err(Error::InvalidArgument(
            "need at least one player for weights".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // a flat draw almost never touches the boundary; retry the rare one
    for _ in 0..64 {
        let draw = flat_dirichlet(&mut rng, players);
        if draw.iter().all(|&d| d > pos_tol) {
            return Ok(draw);
        }
    }
    Err(Error::SolverFailure(format!(
        "no interior weight vector for {players} players after 64 draws"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimax::solve_minimax;
    use crate::tensor::GameShape;
    use proptest::prelude::*;

    fn shape(counts: &[usize]) -> GameShape {
        GameShape::new(counts.to_vec()).unwrap()
    }

    fn matching_pennies() -> PayoffTensor {
        PayoffTensor::new(
            shape(&[2, 2]),
            vec![1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0],
        )
        .unwrap()
    }

    fn prisoners_dilemma() -> PayoffTensor {
        PayoffTensor::new(shape(&[2, 2]), vec![3.0, 0.0, 5.0, 1.0, 3.0, 5.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn scale_multiplies_per_player() {
        let t = prisoners_dilemma();
        let s = scale(&t, &[2.0, 0.5]).unwrap();
        assert_eq!(s.player_slice(0), &[6.0, 0.0, 10.0, 2.0]);
        assert_eq!(s.player_slice(1), &[1.5, 2.5, 0.0, 0.5]);
    }

    #[test]
    fn scale_rejects_bad_weights() {
        let t = matching_pennies();
        assert!(scale(&t, &[1.0]).is_err());
        assert!(scale(&t, &[1.0, 0.0]).is_err());
        assert!(scale(&t, &[1.0, -2.0]).is_err());
        assert!(scale(&t, &[1.0, f64::NAN]).is_err());
        assert!(scale(&t, &[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn uniform_weights_divide_the_value_by_the_player_count() {
        for seed in [3u64, 14, 159] {
            let t = PayoffTensor::random(shape(&[3, 2, 4]), seed, -1.0, 1.0).unwrap();
            let n = t.num_players() as f64;
            let plain = solve_minimax(&t).unwrap();
            let scaled = solve_minimax(&scale(&t, &[1.0 / n; 3]).unwrap()).unwrap();
            assert!((scaled.value - plain.value / n).abs() <= 1e-8);
        }
    }

    #[test]
    fn pennies_is_a_fixed_point_of_the_walk() {
        let t = matching_pennies();
        let trace = scaling_iterate(&t, &[0.5, 0.5], &ScalingOptions::default()).unwrap();
        assert_eq!(trace.stop_reason, StopReason::Converged);
        assert_eq!(trace.steps.len(), 1);
        let step = &trace.steps[0];
        assert_eq!(step.iteration, 0);
        assert!((step.sigma - 0.5).abs() < 1e-9);
        for (d, dn) in step.weights.iter().zip(&step.next_weights) {
            assert!((d - dn).abs() <= 1e-9);
        }
        // the scaled value is half of the unscaled zero
        assert!(step.solution.value.abs() < 1e-9);
    }

    #[test]
    fn an_irrelevant_player_drives_the_weights_to_the_boundary() {
        // player 1's payoffs are identically zero, so the optimal selector
        // puts nothing on player 2 and the update erases their weight
        let t = PayoffTensor::new(
            shape(&[2, 2]),
            vec![0.0, 0.0, 0.0, 0.0, -1.0, 1.0, 1.0, -1.0],
        )
        .unwrap();
        let trace = scaling_iterate(&t, &[0.5, 0.5], &ScalingOptions::default()).unwrap();
        assert_eq!(trace.stop_reason, StopReason::BoundaryHit);
        assert_eq!(trace.steps.len(), 1);
        let step = &trace.steps[0];
        assert!(step.next_weights[1] <= 1e-9);
        assert!((step.next_weights[0] - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn a_zero_step_budget_stops_immediately() {
        let t = matching_pennies();
        let options = ScalingOptions {
            max_iters: 0,
            ..ScalingOptions::default()
        };
        let trace = scaling_iterate(&t, &[0.5, 0.5], &options).unwrap();
        assert_eq!(trace.stop_reason, StopReason::MaxIters);
        assert!(trace.steps.is_empty());
        assert!(trace.last_step().is_none());
    }

    #[test]
    fn iterate_rejects_bad_starts() {
        let t = matching_pennies();
        let options = ScalingOptions::default();
        assert!(scaling_iterate(&t, &[1.0], &options).is_err());
        assert!(scaling_iterate(&t, &[0.0, 1.0], &options).is_err());
    }

    #[test]
    fn one_player_walks_stay_put() {
        let t = PayoffTensor::new(shape(&[3]), vec![1.0, 5.0, 2.0]).unwrap();
        let trace = scaling_iterate(&t, &[1.0], &ScalingOptions::default()).unwrap();
        assert_eq!(trace.stop_reason, StopReason::Converged);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].next_weights, vec![1.0]);
        assert!((trace.steps[0].solution.value - 5.0).abs() < 1e-9);
    }

    #[test]
    fn random_weights_are_seeded_and_interior() {
        let a = random_weights(4, 7, 1e-9).unwrap();
        let b = random_weights(4, 7, 1e-9).unwrap();
        assert_eq!(a, b);
        let c = random_weights(4, 8, 1e-9).unwrap();
        assert_ne!(a, c);
        assert!((a.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(a.iter().all(|&d| d > 1e-9));
        assert!(random_weights(0, 7, 1e-9).is_err());
    }

    fn arb_game() -> impl Strategy<Value = PayoffTensor> {
        (prop::collection::vec(1usize..4, 1..4), any::<u64>()).prop_map(|(counts, seed)| {
            PayoffTensor::random(GameShape::new(counts).unwrap(), seed, -5.0, 5.0).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        // scaling multiplies deviation gaps without moving equilibria
        #[test]
        fn deviation_gaps_scale_linearly(t in arb_game(), seed in any::<u64>()) {
            let n = t.num_players();
            let weights = random_weights(n, seed, 1e-9).unwrap();
            let scaled = scale(&t, &weights).unwrap();
            let p = crate::multilinear::MixedProfile::uniform(t.shape());
            for (i, &wi) in weights.iter().enumerate() {
                let base = t.expected_payoff(i, &p).unwrap();
                let sbase = scaled.expected_payoff(i, &p).unwrap();
                let dev = t.deviation_values(i, &p).unwrap();
                let sdev = scaled.deviation_values(i, &p).unwrap();
                for j in 0..dev.len() {
                    let gap = dev[j] - base;
                    let sgap = sdev[j] - sbase;
                    let scale_err = (sgap - wi * gap).abs();
                    prop_assert!(scale_err <= 1e-12 * gap.abs().max(1.0));
                }
            }
        }

        // each step's update lands on the simplex and its report obeys the
        // one-sided guarantees that hold regardless of leak effects
        #[test]
        fn steps_stay_consistent(t in arb_game(), seed in any::<u64>()) {
            let n = t.num_players();
            let start = random_weights(n, seed, 1e-9).unwrap();
            let options = ScalingOptions { max_iters: 5, ..ScalingOptions::default() };
            let trace = scaling_iterate(&t, &start, &options).unwrap();
            for step in &trace.steps {
                let total: f64 = step.next_weights.iter().sum();
                prop_assert!((total - 1.0).abs() <= 1e-9);
                prop_assert!(step.next_weights.iter().all(|&d| d >= -1e-15));
                prop_assert!(step.sigma > 0.0);
                // selector feasibility of the scaled solve caps the
                // weighted payoff sum at the derived profile
                prop_assert!(
                    step.bound_rhs <= step.solution.value / step.sigma + 1e-7,
                    "bound_rhs {} vs value/sigma {}",
                    step.bound_rhs,
                    step.solution.value / step.sigma
                );
                prop_assert!(step.additive_gap >= 0.0);
            }
        }
    }
}
