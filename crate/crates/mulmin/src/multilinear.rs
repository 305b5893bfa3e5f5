//! Mixed strategies, mixed profiles, and multilinear payoff evaluation.
//!
//! For a mixed profile `p = (p^1, ..., p^n)` the expected payoff of player
//! `i` is the multilinear form `A_i[p] = sum_I a(i, I) * prod_k p^k_{I_k}`.
//! Combining the players with selector weights `x` on the unit simplex gives
//! the scalarization `A_0[x, p] = sum_i x_i * A_i[p]` that the minimax
//! relaxation optimizes.

use rand::Rng;

use crate::tensor::{GameShape, PayoffTensor, PureProfile};
use crate::{Error, Result};

/// Tolerance for accepting an externally supplied probability vector.
const SIMPLEX_TOL: f64 = 1e-12;

fn check_simplex(weights: &[f64], what: &str) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidArgument(format!("{what} must be non-empty")));
    }
    for (k, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "{what} entry {} is {}, need a nonnegative finite value",
                k + 1,
                w
            )));
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidArgument(format!(
            "{what} sums to {sum}, need 1 within {SIMPLEX_TOL}"
        )));
    }
    Ok(())
}

fn normalize(mut weights: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::InvalidArgument(format!("{what} must be non-empty")));
    }
    for (k, w) in weights.iter_mut().enumerate() {
        if !w.is_finite() || *w < -1e-9 {
            return Err(Error::InvalidArgument(format!(
                "{what} entry {} is {}, need a nonnegative finite value",
                k + 1,
                w
            )));
        }
        // numeric noise below zero is clamped, real negatives were rejected
        if *w < 0.0 {
            *w = 0.0;
        }
    }
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{what} sums to {sum}, cannot normalize"
        )));
    }
    for w in &mut weights {
        *w /= sum;
    }
    Ok(weights)
}

/// A probability distribution over one player's pure actions.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    /// Entries must be nonnegative and sum to 1 within `1e-12`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_simplex(&probs, "mixed strategy")?;
        Ok(MixedStrategy { probs })
    }

    /// Rescale nonnegative weights onto the simplex. Accepts the slightly
    /// off-one sums produced by finite-precision solvers.
    pub fn from_unnormalized(weights: Vec<f64>) -> Result<Self> {
        Ok(MixedStrategy {
            probs: normalize(weights, "mixed strategy")?,
        })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidArgument(
                "mixed strategy must be non-empty".into(),
            ));
        }
        Ok(MixedStrategy {
            probs: vec![1.0 / len as f64; len],
        })
    }

    /// Point mass on one action (0-based).
    pub fn pure(len: usize, action: usize) -> Result<Self> {
        if action >= len {
            return Err(Error::OutOfRange(format!(
                "action {} out of range ({} strategies)",
                action + 1,
                len
            )));
        }
        let mut probs = vec![0.0; len];
        probs[action] = 1.0;
        Ok(MixedStrategy { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Indices of actions with probability strictly above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        (0..self.probs.len())
            .filter(|&j| self.probs[j] > threshold)
            .collect()
    }
}

/// One mixed strategy per player.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile {
    strategies: Vec<MixedStrategy>,
}

impl MixedProfile {
    pub fn new(strategies: Vec<MixedStrategy>) -> Result<Self> {
        if strategies.is_empty() {
            return Err(Error::InvalidArgument(
                "a profile needs at least one player".into(),
            ));
        }
        Ok(MixedProfile { strategies })
    }

    /// Every player uniform over their actions.
    pub fn uniform(shape: &GameShape) -> Self {
        let strategies = shape
            .strategy_counts()
            .iter()
            .map(|&c| MixedStrategy::uniform(c).expect("counts are positive"))
            .collect();
        MixedProfile { strategies }
    }

    /// Embed a pure profile as point masses.
    pub fn pure(shape: &GameShape, profile: &PureProfile) -> Result<Self> {
        shape.validate_profile(profile)?;
        let strategies = profile
            .actions()
            .iter()
            .zip(shape.strategy_counts())
            .map(|(&a, &c)| MixedStrategy::pure(c, a).expect("validated above"))
            .collect();
        Ok(MixedProfile { strategies })
    }

    pub fn strategy(&self, player: usize) -> &MixedStrategy {
        &self.strategies[player]
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.strategies
    }

    pub fn num_players(&self) -> usize {
        self.strategies.len()
    }

    /// Replace one player's strategy, leaving the rest untouched.
    pub fn with_strategy(&self, player: usize, strategy: MixedStrategy) -> Self {
        let mut strategies = self.strategies.clone();
        strategies[player] = strategy;
        MixedProfile { strategies }
    }

    /// Error unless the profile has one strategy per player with the right
    /// number of entries for `shape`.
    pub fn check_shape(&self, shape: &GameShape) -> Result<()> {
        if self.strategies.len() != shape.num_players() {
            return Err(Error::InvalidArgument(format!(
                "profile has {} players, game has {}",
                self.strategies.len(),
                shape.num_players()
            )));
        }
        for (k, s) in self.strategies.iter().enumerate() {
            if s.len() != shape.strategy_count(k) {
                return Err(Error::InvalidArgument(format!(
                    "player {} strategy has {} entries, game has {}",
                    k + 1,
                    s.len(),
                    shape.strategy_count(k)
                )));
            }
        }
        Ok(())
    }
}

/// A probability distribution over players: the weights `x` in `A_0[x, p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectorWeights {
    weights: Vec<f64>,
}

impl SelectorWeights {
    /// Entries must be nonnegative and sum to 1 within `1e-12`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_simplex(&weights, "selector weights")?;
        Ok(SelectorWeights { weights })
    }

    /// Rescale nonnegative weights onto the simplex.
    pub fn from_unnormalized(weights: Vec<f64>) -> Result<Self> {
        Ok(SelectorWeights {
            weights: normalize(weights, "selector weights")?,
        })
    }

    pub fn uniform(players: usize) -> Result<Self> {
        if players == 0 {
            return Err(Error::InvalidArgument(
                "selector weights must be non-empty".into(),
            ));
        }
        Ok(SelectorWeights {
            weights: vec![1.0 / players as f64; players],
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Smallest weight; positive iff every player gets mass.
    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Membership in the interior of the simplex (no vanishing weight).
    pub fn is_strictly_positive(&self) -> bool {
        self.min_weight() > 0.0
    }
}

/// One draw from the flat Dirichlet distribution on the `len`-simplex:
/// normalized unit exponentials, which make the draw uniform over the
/// simplex.
pub fn flat_dirichlet<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    assert!(len > 0, "cannot sample an empty simplex");
    loop {
        let mut draws: Vec<f64> = (0..len)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let sum: f64 = draws.iter().sum();
        // a zero sum needs every uniform draw to hit exactly 0
        if sum > 0.0 && sum.is_finite() {
            for d in &mut draws {
                *d /= sum;
            }
            return draws;
        }
    }
}

impl PayoffTensor {
    /// Expected payoff `A_i[p]` of one player under a mixed profile.
    pub fn expected_payoff(&self, player: usize, profile: &MixedProfile) -> Result<f64> {
        self.shape().validate_player(player)?;
        profile.check_shape(self.shape())?;
        let mut total = 0.0;
        for (flat, pure) in self.shape().profiles().enumerate() {
            let mut weight = 1.0;
            for (k, &a) in pure.actions().iter().enumerate() {
                weight *= profile.strategy(k).probs()[a];
            }
            if weight != 0.0 {
                total += weight * self.payoff_flat(player, flat);
            }
        }
        Ok(total)
    }

    /// `A_i[p | e_j]` for every action `j` of `player`: the payoffs of the
    /// unilateral pure deviations, all other players following `profile`.
    pub fn deviation_values(&self, player: usize, profile: &MixedProfile) -> Result<Vec<f64>> {
        self.shape().validate_player(player)?;
        profile.check_shape(self.shape())?;
        let mut values = vec![0.0; self.shape().strategy_count(player)];
        for (flat, pure) in self.shape().profiles().enumerate() {
            let mut weight = 1.0;
            for (k, &a) in pure.actions().iter().enumerate() {
                if k != player {
                    weight *= profile.strategy(k).probs()[a];
                }
            }
            if weight != 0.0 {
                values[pure.actions()[player]] += weight * self.payoff_flat(player, flat);
            }
        }
        Ok(values)
    }

    /// `A_i[p | x]`: the expected payoff with `player`'s strategy replaced
    /// by `x`, everyone else following `profile`. Linear in `x`.
    pub fn unilateral_payoff(
        &self,
        player: usize,
        profile: &MixedProfile,
        x: &MixedStrategy,
    ) -> Result<f64> {
        self.shape().validate_player(player)?;
        if x.len() != self.shape().strategy_count(player) {
            return Err(Error::InvalidArgument(format!(
                "deviation strategy has {} entries, player {} has {}",
                x.len(),
                player + 1,
                self.shape().strategy_count(player)
            )));
        }
        self.expected_payoff(player, &profile.with_strategy(player, x.clone()))
    }

    /// `A_i[p | e_j]` for a single action `j` (0-based).
    pub fn unilateral_value(
        &self,
        player: usize,
        profile: &MixedProfile,
        action: usize,
    ) -> Result<f64> {
        if action >= self.shape().strategy_count(player) {
            return Err(Error::OutOfRange(format!(
                "action {} out of range for player {} ({} strategies)",
                action + 1,
                player + 1,
                self.shape().strategy_count(player)
            )));
        }
        Ok(self.deviation_values(player, profile)?[action])
    }

    /// The scalarized payoff `A_0[x, p] = sum_i x_i * A_i[p]`.
    pub fn combined_value(&self, x: &SelectorWeights, profile: &MixedProfile) -> Result<f64> {
        if x.len() != self.num_players() {
            return Err(Error::InvalidArgument(format!(
                "selector has {} weights, game has {} players",
                x.len(),
                self.num_players()
            )));
        }
        let mut total = 0.0;
        for (i, &w) in x.weights().iter().enumerate() {
            if w != 0.0 {
                total += w * self.expected_payoff(i, profile)?;
            }
        }
        Ok(total)
    }

    /// Best pure deviation for `player` against `profile`: the action with
    /// the largest `A_i[p | e_j]`, lowest index on ties, and its value.
    pub fn best_response(&self, player: usize, profile: &MixedProfile) -> Result<(usize, f64)> {
        let values = self.deviation_values(player, profile)?;
        let mut best = 0;
        for j in 1..values.len() {
            if values[j] > values[best] {
                best = j;
            }
        }
        Ok((best, values[best]))
    }
}
