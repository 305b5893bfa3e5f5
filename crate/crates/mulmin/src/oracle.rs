//! Independent brute-force verifiers used to check the fast paths: pure
//! equilibrium scans, closed-form 2x2 mixed points, support enumeration with
//! a damped Newton refiner, and a grid sweep of the selector simplex.
//!
//! The enumeration paths favor soundness over completeness: everything
//! returned is verified against the deviation-gain residual, but a root the
//! refiner fails to reach is silently skipped.

use crate::multilinear::{MixedProfile, MixedStrategy};
use crate::nashmap::{profile_distance, residual};
use crate::tensor::{PayoffTensor, PureProfile};
use crate::{Error, Result};

/// Largest deviation gain a certificate may carry.
pub const CERTIFICATE_TOL: f64 = 1e-9;

/// How a certificate was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    /// Exhaustive scan over pure profiles.
    Pure,
    /// Closed-form indifference solve on a [2,2] game.
    ClosedForm2x2,
    /// Newton-refined support enumeration.
    SupportEnumeration,
}

impl EquilibriumKind {
    /// Stable lowercase token used in text output.
    pub fn label(&self) -> &'static str {
        match self {
            EquilibriumKind::Pure => "pure",
            EquilibriumKind::ClosedForm2x2 => "closed_form_2x2",
            EquilibriumKind::SupportEnumeration => "support_enumeration",
        }
    }
}

/// A profile the oracle vouches for: its worst deviation gain, measured by
/// the independent gain evaluator, is at most [`CERTIFICATE_TOL`].
#[derive(Debug, Clone)]
pub struct EquilibriumCertificate {
    pub profile: MixedProfile,
    pub kind: EquilibriumKind,
    /// Largest gain at the profile; never above [`CERTIFICATE_TOL`].
    pub residual: f64,
}

fn certify(
    tensor: &PayoffTensor,
    profile: MixedProfile,
    kind: EquilibriumKind,
) -> Result<Option<EquilibriumCertificate>> {
    let r = residual(tensor, &profile)?;
    if r <= CERTIFICATE_TOL {
        Ok(Some(EquilibriumCertificate {
            profile,
            kind,
            residual: r,
        }))
    } else {
        Ok(None)
    }
}

/// All pure equilibria in canonical profile order. A profile qualifies when
/// no player can gain more than `tol` by a unilateral pure deviation.
pub fn pure_equilibria(tensor: &PayoffTensor, tol: f64) -> Vec<PureProfile> {
    let shape = tensor.shape();
    let mut found = Vec::new();
    'profiles: for (flat, profile) in shape.profiles().enumerate() {
        for i in 0..shape.num_players() {
            let here = tensor.payoff_flat(i, flat);
            for j in 0..shape.strategy_count(i) {
                let there = shape.flat_index_unchecked(profile.with_action(i, j).actions());
                if tensor.payoff_flat(i, there) > here + tol {
                    continue 'profiles;
                }
            }
        }
        found.push(profile);
    }
    found
}

/// The pure equilibria wrapped as certificates, residuals re-measured on
/// the mixed embedding.
pub fn pure_certificates(tensor: &PayoffTensor) -> Result<Vec<EquilibriumCertificate>> {
    let mut certs = Vec::new();
    for profile in pure_equilibria(tensor, 0.0) {
        let embedded = MixedProfile::pure(tensor.shape(), &profile)?;
        if let Some(c) = certify(tensor, embedded, EquilibriumKind::Pure)? {
            certs.push(c);
        }
    }
    Ok(certs)
}

/// Closed-form interior mixed point of a 2x2 two-player game: each side
/// mixes to make the opponent indifferent. Returns None when a player's
/// indifference equation degenerates or the solution leaves the open
/// simplex, and never returns an unverified point.
pub fn mixed_2x2(tensor: &PayoffTensor) -> Result<Option<EquilibriumCertificate>> {
    let shape = tensor.shape();
    if shape.strategy_counts() != [2, 2] {
        return Err(Error::InvalidArgument(format!(
            "closed-form mixed point needs a [2,2] game, got {}",
            shape
        )));
    }
    let a = tensor.player_slice(0); // a[2*j + k] = payoff of player 1 at (j, k)
    let b = tensor.player_slice(1);

    // s makes player 2 indifferent, t makes player 1 indifferent
    let db = b[0] - b[1] - b[2] + b[3];
    let da = a[0] - a[1] - a[2] + a[3];
    if db == 0.0 || da == 0.0 {
        return Ok(None);
    }
    let s = (b[3] - b[2]) / db;
    let t = (a[3] - a[1]) / da;
    if !(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0) {
        return Ok(None);
    }
    let profile = MixedProfile::new(vec![
        MixedStrategy::new(vec![s, 1.0 - s])?,
        MixedStrategy::new(vec![t, 1.0 - t])?,
    ])?;
    certify(tensor, profile, EquilibriumKind::ClosedForm2x2)
}

/// Number of per-player support combinations a full enumeration visits.
pub fn support_combinations(tensor: &PayoffTensor) -> u128 {
    tensor
        .shape()
        .strategy_counts()
        .iter()
        .map(|&c| (1u128 << c) - 1)
        .product()
}

/// Equilibria found by support enumeration. Every support combination gets
/// an indifference-plus-normalization square system, solved by damped
/// Newton from the uniform-on-support start; candidates must pass the
/// certificate residual gate before being reported. Deduplicated to `1e-8`
/// in the sup norm, ordered by support enumeration order. Refuses outright
/// when the combination count exceeds `budget`; a truncated enumeration
/// would silently weaken every downstream check.
pub fn support_enumeration(
    tensor: &PayoffTensor,
    budget: usize,
) -> Result<Vec<EquilibriumCertificate>> {
    let shape = tensor.shape();
    let n = shape.num_players();
    let combos = support_combinations(tensor);
    if combos > budget as u128 {
        return Err(Error::BudgetExceeded(format!(
            "support enumeration needs {combos} combinations, budget allows {budget}"
        )));
    }
    let mut found: Vec<EquilibriumCertificate> = Vec::new();

    // odometer over per-player nonempty action subsets, bitmasks ascending
    let mut masks: Vec<u32> = vec![1; n];
    loop {
        let supports: Vec<Vec<usize>> = masks
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                (0..shape.strategy_count(i))
                    .filter(|&j| m & (1 << j) != 0)
                    .collect()
            })
            .collect();
        if let Some(profile) = refine_on_support(tensor, &supports)? {
            if found
                .iter()
                .all(|c| profile_distance(&c.profile, &profile) > 1e-8)
            {
                if let Some(c) = certify(tensor, profile, EquilibriumKind::SupportEnumeration)? {
                    found.push(c);
                }
            }
        }

        let mut k = n;
        loop {
            if k == 0 {
                return Ok(found);
            }
            k -= 1;
            masks[k] += 1;
            if masks[k] < (1 << shape.strategy_count(k)) {
                break;
            }
            masks[k] = 1;
        }
    }
}

/// Newton solve of the square system: every supported action of a player
/// pays the same unknown amount, supports sum to one, off-support entries
/// stay zero. Returns a simplex point or None when the iteration fails.
fn refine_on_support(
    tensor: &PayoffTensor,
    supports: &[Vec<usize>],
) -> Result<Option<MixedProfile>> {
    let shape = tensor.shape();
    let n = shape.num_players();

    // uniform start on each support
    let mut probs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut v = vec![0.0; shape.strategy_count(i)];
            for &j in &supports[i] {
                v[j] = 1.0 / supports[i].len() as f64;
            }
            v
        })
        .collect();
    let mut values: Vec<f64> = (0..n)
        .map(|i| {
            let dev = raw_deviation_values(tensor, i, &probs);
            supports[i].iter().map(|&j| dev[j]).sum::<f64>() / supports[i].len() as f64
        })
        .collect();

    let dim: usize = supports.iter().map(|s| s.len()).sum::<usize>() + n;
    let mut f = eval_system(tensor, supports, &probs, &values);
    let mut fnorm = inf_norm(&f);

    for _ in 0..50 {
        if fnorm <= 1e-12 {
            break;
        }
        let jac = eval_jacobian(tensor, supports, &probs);
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let Some(step) = solve_dense(jac, rhs, dim) else {
            return Ok(None); // singular system, support inconsistent
        };

        let mut alpha = 1.0;
        let mut improved = false;
        for _ in 0..25 {
            let (tp, tv) = apply_step(supports, &probs, &values, &step, alpha);
            let tf = eval_system(tensor, supports, &tp, &tv);
            let tn = inf_norm(&tf);
            if tn < fnorm {
                probs = tp;
                values = tv;
                f = tf;
                fnorm = tn;
                improved = true;
                break;
            }
            alpha /= 2.0;
        }
        if !improved {
            return Ok(None);
        }
    }
    if fnorm > 1e-12 {
        return Ok(None);
    }

    // the system does not know about the simplex; enforce it now
    let mut strategies = Vec::with_capacity(n);
    for p in &probs {
        if p.iter().any(|&w| !(-1e-9..=1.0 + 1e-9).contains(&w)) {
            return Ok(None);
        }
        let clamped: Vec<f64> = p.iter().map(|&w| w.max(0.0)).collect();
        match MixedStrategy::from_unnormalized(clamped) {
            Ok(s) => strategies.push(s),
            Err(_) => return Ok(None),
        }
    }
    Ok(Some(MixedProfile::new(strategies)?))
}

/// `A_i[p | e_j]` for all `j`, evaluated on raw probability vectors that may
/// sit slightly off the simplex mid-iteration.
fn raw_deviation_values(tensor: &PayoffTensor, player: usize, probs: &[Vec<f64>]) -> Vec<f64> {
    let shape = tensor.shape();
    let mut values = vec![0.0; shape.strategy_count(player)];
    for (flat, pure) in shape.profiles().enumerate() {
        let mut weight = 1.0;
        for (k, &a) in pure.actions().iter().enumerate() {
            if k != player {
                weight *= probs[k][a];
            }
        }
        if weight != 0.0 {
            values[pure.actions()[player]] += weight * tensor.payoff_flat(player, flat);
        }
    }
    values
}

fn eval_system(
    tensor: &PayoffTensor,
    supports: &[Vec<usize>],
    probs: &[Vec<f64>],
    values: &[f64],
) -> Vec<f64> {
    let n = supports.len();
    let mut f = Vec::new();
    for i in 0..n {
        let dev = raw_deviation_values(tensor, i, probs);
        for &j in &supports[i] {
            f.push(dev[j] - values[i]);
        }
    }
    for i in 0..n {
        let s: f64 = supports[i].iter().map(|&j| probs[i][j]).sum();
        f.push(s - 1.0);
    }
    f
}

/// Jacobian of [`eval_system`] in the variable order: supported entries of
/// player 1, player 2, ..., then the per-player payoff unknowns.
fn eval_jacobian(tensor: &PayoffTensor, supports: &[Vec<usize>], probs: &[Vec<f64>]) -> Vec<f64> {
    let shape = tensor.shape();
    let n = supports.len();
    let offsets: Vec<usize> = supports
        .iter()
        .scan(0, |acc, s| {
            let here = *acc;
            *acc += s.len();
            Some(here)
        })
        .collect();
    let nsup: usize = supports.iter().map(|s| s.len()).sum();
    let dim = nsup + n;
    let mut jac = vec![0.0; dim * dim];

    let mut row = 0;
    for i in 0..n {
        for &j in &supports[i] {
            // d(A_i[p | e_j]) / d(p^m_l) sums payoff-weighted products over
            // profiles pinning both coordinates
            for (flat, pure) in shape.profiles().enumerate() {
                if pure.actions()[i] != j {
                    continue;
                }
                let a = tensor.payoff_flat(i, flat);
                if a == 0.0 {
                    continue;
                }
                for m in 0..n {
                    if m == i {
                        continue;
                    }
                    let l = pure.actions()[m];
                    let Some(pos) = supports[m].iter().position(|&x| x == l) else {
                        continue; // off-support coordinate is frozen at zero
                    };
                    let mut weight = 1.0;
                    for (k, &ak) in pure.actions().iter().enumerate() {
                        if k != i && k != m {
                            weight *= probs[k][ak];
                        }
                    }
                    jac[row * dim + offsets[m] + pos] += a * weight;
                }
            }
            jac[row * dim + nsup + i] = -1.0;
            row += 1;
        }
    }
    for i in 0..n {
        for pos in 0..supports[i].len() {
            jac[row * dim + offsets[i] + pos] = 1.0;
        }
        row += 1;
    }
    jac
}

fn apply_step(
    supports: &[Vec<usize>],
    probs: &[Vec<f64>],
    values: &[f64],
    step: &[f64],
    alpha: f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut new_probs = probs.to_vec();
    let mut k = 0;
    for (i, support) in supports.iter().enumerate() {
        for &j in support {
            new_probs[i][j] += alpha * step[k];
            k += 1;
        }
    }
    let new_values: Vec<f64> = values
        .iter()
        .map(|v| {
            let out = v + alpha * step[k];
            k += 1;
            out
        })
        .collect();
    (new_probs, new_values)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Gaussian elimination with partial pivoting on a row-major square matrix.
/// None when the matrix is numerically singular.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, dim: usize) -> Option<Vec<f64>> {
    for col in 0..dim {
        let mut piv = col;
        for r in col + 1..dim {
            if a[r * dim + col].abs() > a[piv * dim + col].abs() {
                piv = r;
            }
        }
        if a[piv * dim + col].abs() < 1e-12 {
            return None;
        }
        if piv != col {
            for j in 0..dim {
                a.swap(col * dim + j, piv * dim + j);
            }
            b.swap(col, piv);
        }
        let d = a[col * dim + col];
        for r in col + 1..dim {
            let factor = a[r * dim + col] / d;
            if factor != 0.0 {
                for j in col..dim {
                    a[r * dim + j] -= factor * a[col * dim + j];
                }
                b[r] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; dim];
    for col in (0..dim).rev() {
        let mut s = b[col];
        for j in col + 1..dim {
            s -= a[col * dim + j] * x[j];
        }
        x[col] = s / a[col * dim + col];
    }
    Some(x)
}

/// Selector-grid sweep result.
#[derive(Debug, Clone)]
pub struct GridMinimax {
    /// Smallest worst-case scalarized payoff over the grid.
    pub value: f64,
    /// The grid point attaining it.
    pub selector: Vec<f64>,
}

/// Sweep selector weights `x = k / resolution` over the player simplex and
/// take the smallest `max_I sum_i a(i, I) x_i`. An upper bound on the
/// relaxation optimum that tightens as the grid refines; intended for few
/// players, errors out when the grid would exceed the point budget.
pub fn grid_minimax(tensor: &PayoffTensor, resolution: usize) -> Result<GridMinimax> {
    if resolution == 0 {
        return Err(Error::InvalidArgument(
            "grid resolution must be positive".into(),
        ));
    }
    let n = tensor.num_players();
    if n > 3 {
        return Err(Error::InvalidArgument(format!(
            "selector grid sweep supports at most 3 players, got {n}"
        )));
    }
    let points = simplex_grid_size(resolution, n);
    if points > 20_000_000 {
        return Err(Error::BudgetExceeded(format!(
            "selector grid needs {points} points at resolution {resolution} for {n} players"
        )));
    }
    let nhat = tensor.shape().total_profiles();

    let mut best_value = f64::INFINITY;
    let mut best = vec![0.0; n];
    let mut parts = vec![0usize; n]; // first n-1 entries free, last is the remainder
    loop {
        let used: usize = parts[..n - 1].iter().sum();
        if used <= resolution {
            parts[n - 1] = resolution - used;
            let x: Vec<f64> = parts
                .iter()
                .map(|&k| k as f64 / resolution as f64)
                .collect();
            let mut worst = f64::NEG_INFINITY;
            for flat in 0..nhat {
                let mut combined = 0.0;
                for (i, &xi) in x.iter().enumerate() {
                    combined += xi * tensor.payoff_flat(i, flat);
                }
                worst = worst.max(combined);
            }
            if worst < best_value {
                best_value = worst;
                best = x;
            }
        }

        // advance the free part of the odometer
        let mut k = n - 1;
        loop {
            if k == 0 {
                return Ok(GridMinimax {
                    value: best_value,
                    selector: best,
                });
            }
            k -= 1;
            parts[k] += 1;
            if parts[k] <= resolution {
                break;
            }
            parts[k] = 0;
        }
    }
}

fn simplex_grid_size(resolution: usize, n: usize) -> u128 {
    // C(resolution + n - 1, n - 1)
    let mut size: u128 = 1;
    for k in 1..n {
        size = size * (resolution + k) as u128 / k as u128;
    }
    size
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

    fn battle_of_sexes() -> PayoffTensor {
        PayoffTensor::new(shape(&[2, 2]), vec![2.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 2.0]).unwrap()
    }

    #[test]
    fn dilemma_has_exactly_mutual_defection() {
        let eq = pure_equilibria(&prisoners_dilemma(), 0.0);
        assert_eq!(eq, vec![PureProfile::new(vec![1, 1])]);
    }

    #[test]
    fn pennies_has_no_pure_equilibrium() {
        assert!(pure_equilibria(&matching_pennies(), 0.0).is_empty());
    }

    #[test]
    fn sexes_has_both_coordinated_outcomes() {
        let eq = pure_equilibria(&battle_of_sexes(), 0.0);
        assert_eq!(
            eq,
            vec![PureProfile::new(vec![0, 0]), PureProfile::new(vec![1, 1])]
        );
    }

    #[test]
    fn mixed_2x2_on_the_classics() {
        let c = mixed_2x2(&matching_pennies()).unwrap().unwrap();
        assert!((c.profile.strategy(0).probs()[0] - 0.5).abs() < 1e-12);
        assert!((c.profile.strategy(1).probs()[0] - 0.5).abs() < 1e-12);
        assert_eq!(c.kind, EquilibriumKind::ClosedForm2x2);
        assert_eq!(c.residual, 0.0);

        let c = mixed_2x2(&battle_of_sexes()).unwrap().unwrap();
        assert!((c.profile.strategy(0).probs()[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((c.profile.strategy(1).probs()[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!(c.residual <= 1e-12);

        // dominant strategies leave no interior indifference point
        assert!(mixed_2x2(&prisoners_dilemma()).unwrap().is_none());

        let three = PayoffTensor::zeros(shape(&[2, 2, 2]));
        assert!(mixed_2x2(&three).is_err());
    }

    #[test]
    fn pure_certificates_embed_the_scan() {
        let certs = pure_certificates(&prisoners_dilemma()).unwrap();
        assert_eq!(certs.len(), 1);
        assert_eq!(certs[0].kind, EquilibriumKind::Pure);
        assert_eq!(certs[0].residual, 0.0);
        assert_eq!(certs[0].profile.strategy(0).probs(), &[0.0, 1.0]);
        assert!(pure_certificates(&matching_pennies()).unwrap().is_empty());
    }

    #[test]
    fn support_enumeration_refuses_over_budget() {
        assert_eq!(support_combinations(&matching_pennies()), 9);
        assert!(matches!(
            support_enumeration(&matching_pennies(), 8),
            Err(Error::BudgetExceeded(_))
        ));
        let big = PayoffTensor::zeros(shape(&[3, 3, 3]));
        assert_eq!(support_combinations(&big), 343);
        assert!(support_enumeration(&big, 342).is_err());
    }

    #[test]
    fn support_enumeration_counts_on_the_classics() {
        let eq = support_enumeration(&matching_pennies(), 16).unwrap();
        assert_eq!(eq.len(), 1);
        let uniform = MixedProfile::uniform(matching_pennies().shape());
        assert!(profile_distance(&eq[0].profile, &uniform) < 1e-9);
        assert_eq!(eq[0].kind, EquilibriumKind::SupportEnumeration);

        let eq = support_enumeration(&prisoners_dilemma(), 16).unwrap();
        assert_eq!(eq.len(), 1);
        assert_eq!(eq[0].profile.strategy(0).probs(), &[0.0, 1.0]);

        let eq = support_enumeration(&battle_of_sexes(), 16).unwrap();
        assert_eq!(eq.len(), 3);
    }

    #[test]
    fn support_enumeration_agrees_with_pure_scan() {
        let games = [
            matching_pennies(),
            prisoners_dilemma(),
            battle_of_sexes(),
            PayoffTensor::random(shape(&[2, 2, 2]), 7, -1.0, 1.0).unwrap(),
            PayoffTensor::random(shape(&[3, 3]), 11, -1.0, 1.0).unwrap(),
        ];
        for t in games {
            let pure = pure_equilibria(&t, 0.0);
            let all = support_enumeration(&t, 64).unwrap();
            for profile in pure {
                let embedded = MixedProfile::pure(t.shape(), &profile).unwrap();
                assert!(
                    all.iter()
                        .any(|c| profile_distance(&c.profile, &embedded) <= 1e-8),
                    "pure equilibrium {profile} missing from enumeration"
                );
            }
        }
    }

    #[test]
    fn three_player_enumeration_verifies() {
        let t = PayoffTensor::random(shape(&[2, 2, 2]), 123, -1.0, 1.0).unwrap();
        let certs = support_enumeration(&t, 64).unwrap();
        assert!(!certs.is_empty());
        for c in certs {
            assert!(c.residual <= CERTIFICATE_TOL);
            assert_eq!(residual(&t, &c.profile).unwrap(), c.residual);
        }
    }

    #[test]
    fn grid_finds_the_pennies_center() {
        let g = grid_minimax(&matching_pennies(), 10).unwrap();
        assert_eq!(g.value, 0.0);
        assert_eq!(g.selector, vec![0.5, 0.5]);
    }

    #[test]
    fn grid_single_player_takes_the_max() {
        let t = PayoffTensor::new(shape(&[2]), vec![3.0, 5.0]).unwrap();
        let g = grid_minimax(&t, 10).unwrap();
        assert_eq!(g.value, 5.0);
    }

    #[test]
    fn grid_refuses_too_many_players_or_points() {
        let four = PayoffTensor::zeros(shape(&[2, 2, 2, 2]));
        assert!(matches!(
            grid_minimax(&four, 10),
            Err(Error::InvalidArgument(_))
        ));
        let three = PayoffTensor::zeros(shape(&[2, 2, 2]));
        assert!(matches!(
            grid_minimax(&three, 10_000),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(grid_minimax(&three, 100).is_ok());
        assert!(matches!(
            grid_minimax(&three, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        // nested grids tighten monotonically toward the LP optimum and stay
        // within the diameter bound n * max|a| / resolution above it
        #[test]
        fn grid_envelope_brackets_the_optimum(seed in any::<u64>()) {
            let t = PayoffTensor::random(shape(&[2, 2]), seed, -1.0, 1.0).unwrap();
            let sol = solve_minimax(&t).unwrap();
            let coarse = grid_minimax(&t, 10).unwrap().value;
            let fine = grid_minimax(&t, 100).unwrap().value;
            prop_assert!(coarse >= fine - 1e-12);
            prop_assert!(fine >= sol.value - 1e-9);
            let c = 2.0 * t.max_abs();
            prop_assert!(coarse - sol.value <= c / 10.0 + 1e-9);
            prop_assert!(fine - sol.value <= c / 100.0 + 1e-9);
        }

        #[test]
        fn enumerated_points_pass_the_residual_gate(seed in any::<u64>()) {
            let t = PayoffTensor::random(shape(&[3, 2]), seed, -2.0, 2.0).unwrap();
            for c in support_enumeration(&t, 32).unwrap() {
                prop_assert!(c.residual <= CERTIFICATE_TOL);
                prop_assert!(residual(&t, &c.profile).unwrap() <= CERTIFICATE_TOL);
            }
        }
    }
}
