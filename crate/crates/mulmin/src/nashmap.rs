//! The gain map: a continuous self-map of the profile space whose fixed
//! points are exactly the equilibria.
//!
//! For each player `i` and action `j` the gain is
//! `G^i_j = max(0, A_i[p | e_j] - A_i[p])`, the payoff improvement from
//! deviating to the pure action. The map shifts probability toward gaining
//! actions: `f(p)^i_j = (p^i_j + G^i_j) / (1 + sum_k G^i_k)`. The residual
//! `max_{i,j} G^i_j` is zero precisely at equilibrium.

use crate::multilinear::{MixedProfile, MixedStrategy};
use crate::tensor::PayoffTensor;
use crate::Result;

/// Deviation gains `G^i_j` for one player, all nonnegative.
pub fn gains(tensor: &PayoffTensor, player: usize, profile: &MixedProfile) -> Result<Vec<f64>> {
    let base = tensor.expected_payoff(player, profile)?;
    let dev = tensor.deviation_values(player, profile)?;
    Ok(dev.into_iter().map(|v| (v - base).max(0.0)).collect())
}

/// Largest gain over all players and actions. Zero iff `profile` is an
/// equilibrium; small values certify an approximate one.
pub fn residual(tensor: &PayoffTensor, profile: &MixedProfile) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..tensor.num_players() {
        for g in gains(tensor, i, profile)? {
            worst = worst.max(g);
        }
    }
    Ok(worst)
}

/// One application of the gain map. The image is always a valid profile:
/// numerators are nonnegative and each denominator is at least one.
pub fn nash_map(tensor: &PayoffTensor, profile: &MixedProfile) -> Result<MixedProfile> {
    let mut strategies = Vec::with_capacity(tensor.num_players());
    for i in 0..tensor.num_players() {
        let g = gains(tensor, i, profile)?;
        let total: f64 = g.iter().sum();
        let probs: Vec<f64> = profile
            .strategy(i)
            .probs()
            .iter()
            .zip(&g)
            .map(|(p, gj)| (p + gj) / (1.0 + total))
            .collect();
        strategies.push(MixedStrategy::from_unnormalized(probs)?);
    }
    MixedProfile::new(strategies)
}

/// Sup-norm distance between two profiles over all players and actions.
pub fn profile_distance(a: &MixedProfile, b: &MixedProfile) -> f64 {
    let mut worst: f64 = 0.0;
    for (sa, sb) in a.strategies().iter().zip(b.strategies()) {
        for (x, y) in sa.probs().iter().zip(sb.probs()) {
            worst = worst.max((x - y).abs());
        }
    }
    worst
}

/// A profile together with everything the gain map computes there.
#[derive(Debug, Clone)]
pub struct NashMapState {
    pub profile: MixedProfile,
    /// `G^i_j` per player and action.
    pub gains: Vec<Vec<f64>>,
    /// `sum_j G^i_j` per player, the map's denominators minus one.
    pub gain_sums: Vec<f64>,
    /// Largest single gain.
    pub residual: f64,
}

/// Evaluate the gain map's data at one profile without applying the map.
pub fn state(tensor: &PayoffTensor, profile: &MixedProfile) -> Result<NashMapState> {
    let mut all_gains = Vec::with_capacity(tensor.num_players());
    let mut gain_sums = Vec::with_capacity(tensor.num_players());
    let mut worst: f64 = 0.0;
    for i in 0..tensor.num_players() {
        let g = gains(tensor, i, profile)?;
        gain_sums.push(g.iter().sum());
        for &gj in &g {
            worst = worst.max(gj);
        }
        all_gains.push(g);
    }
    Ok(NashMapState {
        profile: profile.clone(),
        gains: all_gains,
        gain_sums,
        residual: worst,
    })
}

/// Apply the gain map repeatedly from `start`, stopping once the residual
/// drops to `tol` or after `max_iters` applications. Returns the final
/// state and the residual at every visited profile, starting with `start`.
///
/// The map is continuous on a compact set, so fixed points exist, but
/// iteration carries no convergence guarantee; the trace lets callers see
/// cycling or stalling for what it is.
pub fn iterate(
    tensor: &PayoffTensor,
    start: &MixedProfile,
    max_iters: usize,
    tol: f64,
) -> Result<(NashMapState, Vec<f64>)> {
    let mut current = state(tensor, start)?;
    let mut trace = vec![current.residual];
    for _ in 0..max_iters {
        if current.residual <= tol {
            break;
        }
        let next = nash_map(tensor, &current.profile)?;
        current = state(tensor, &next)?;
        trace.push(current.residual);
    }
    Ok((current, trace))
}
