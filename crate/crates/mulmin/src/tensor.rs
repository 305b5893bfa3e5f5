//! Payoff tensor storage, profile indexing, and the `.mmg` game file format.
//!
//! A game with `n` players, player `i` having `n_i` pure actions, is stored as
//! `n` dense subtensors over the common profile space of size
//! `nhat = n_1 * ... * n_n`. Profiles are flattened row-major with the last
//! player's index moving fastest; that order is canonical for files, LP
//! columns, and the dual weight vector `q`.

use std::fmt;
use std::str::FromStr;

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Number of players and per-player action counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameShape {
    counts: Vec<usize>,
}

impl GameShape {
    /// Build a shape from per-player action counts. Every count must be >= 1
    /// and there must be at least one player.
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidArgument(
                "a game needs at least one player".into(),
            ));
        }
        if let Some(i) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidArgument(format!(
                "player {} has zero strategies",
                i + 1
            )));
        }
        Ok(GameShape { counts })
    }

    pub fn num_players(&self) -> usize {
        self.counts.len()
    }

    /// Action count for one player (0-based).
    pub fn strategy_count(&self, player: usize) -> usize {
        self.counts[player]
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.counts
    }

    /// Total number of pure profiles (the product of all action counts).
    pub fn total_profiles(&self) -> usize {
        self.counts.iter().product()
    }

    /// Flat index of a profile under the canonical row-major order.
    pub fn flat_index(&self, profile: &PureProfile) -> Result<usize> {
        self.validate_profile(profile)?;
        Ok(self.flat_index_unchecked(profile.actions()))
    }

    pub(crate) fn flat_index_unchecked(&self, actions: &[usize]) -> usize {
        let mut flat = 0;
        for (k, &a) in actions.iter().enumerate() {
            flat = flat * self.counts[k] + a;
        }
        flat
    }

    /// Profile at a flat index (inverse of [`GameShape::flat_index`]).
    pub fn profile_at(&self, mut flat: usize) -> PureProfile {
        debug_assert!(flat < self.total_profiles());
        let mut actions = vec![0; self.counts.len()];
        for k in (0..self.counts.len()).rev() {
            actions[k] = flat % self.counts[k];
            flat /= self.counts[k];
        }
        PureProfile::new(actions)
    }

    /// All profiles in canonical order (row-major, last player fastest).
    pub fn profiles(&self) -> ProfileIter<'_> {
        ProfileIter {
            shape: self,
            next: Some(vec![0; self.counts.len()]),
        }
    }

    pub fn validate_profile(&self, profile: &PureProfile) -> Result<()> {
        if profile.actions().len() != self.counts.len() {
            return Err(Error::OutOfRange(format!(
                "profile has {} coordinates, game has {} players",
                profile.actions().len(),
                self.counts.len()
            )));
        }
        for (k, (&a, &c)) in profile.actions().iter().zip(&self.counts).enumerate() {
            if a >= c {
                return Err(Error::OutOfRange(format!(
                    "action {} out of range for player {} (has {} strategies)",
                    a + 1,
                    k + 1,
                    c
                )));
            }
        }
        Ok(())
    }

    pub fn validate_player(&self, player: usize) -> Result<()> {
        if player >= self.counts.len() {
            return Err(Error::OutOfRange(format!(
                "player {} out of range ({} players)",
                player + 1,
                self.counts.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for GameShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, c) in self.counts.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// One pure action per player, 0-based. All text I/O is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PureProfile {
    actions: Vec<usize>,
}

impl PureProfile {
    pub fn new(actions: Vec<usize>) -> Self {
        PureProfile { actions }
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    /// Profile with the given player's action replaced.
    pub fn with_action(&self, player: usize, action: usize) -> Self {
        let mut actions = self.actions.clone();
        actions[player] = action;
        PureProfile { actions }
    }
}

impl fmt::Display for PureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.actions.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a + 1)?;
        }
        write!(f, ")")
    }
}

/// Iterator over all profiles of a shape in canonical order.
pub struct ProfileIter<'a> {
    shape: &'a GameShape,
    next: Option<Vec<usize>>,
}

impl Iterator for ProfileIter<'_> {
    type Item = PureProfile;

    fn next(&mut self) -> Option<PureProfile> {
        let current = self.next.take()?;
        let out = PureProfile::new(current.clone());
        let mut bumped = current;
        // odometer increment, last coordinate fastest
        for k in (0..bumped.len()).rev() {
            bumped[k] += 1;
            if bumped[k] < self.shape.counts[k] {
                self.next = Some(bumped);
                return Some(out);
            }
            bumped[k] = 0;
        }
        Some(out)
    }
}

/// The payoff tensor `A_0 = (a(i, I))`: player `i`'s payoffs stored
/// contiguously in canonical profile order.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTensor {
    shape: GameShape,
    payoffs: Vec<f64>,
}

impl PayoffTensor {
    /// Build a tensor from `n * nhat` payoffs, player-major then canonical
    /// profile order. Rejects non-finite entries and size mismatches.
    pub fn new(shape: GameShape, payoffs: Vec<f64>) -> Result<Self> {
        let expected = shape.num_players() * shape.total_profiles();
        if payoffs.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "expected {} payoffs for shape {}, got {}",
                expected,
                shape,
                payoffs.len()
            )));
        }
        if let Some(k) = payoffs.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "payoff {} is not finite",
                k
            )));
        }
        Ok(PayoffTensor { shape, payoffs })
    }

    pub fn zeros(shape: GameShape) -> Self {
        let len = shape.num_players() * shape.total_profiles();
        PayoffTensor {
            shape,
            payoffs: vec![0.0; len],
        }
    }

    pub fn shape(&self) -> &GameShape {
        &self.shape
    }

    pub fn num_players(&self) -> usize {
        self.shape.num_players()
    }

    /// `a(player, profile)` with full range checking.
    pub fn get_payoff(&self, player: usize, profile: &PureProfile) -> Result<f64> {
        self.shape.validate_player(player)?;
        let flat = self.shape.flat_index(profile)?;
        Ok(self.payoff_flat(player, flat))
    }

    /// `a(player, I)` by flat profile index. Hot path, no checks in release.
    #[inline]
    pub fn payoff_flat(&self, player: usize, flat: usize) -> f64 {
        debug_assert!(player < self.shape.num_players());
        debug_assert!(flat < self.shape.total_profiles());
        self.payoffs[player * self.shape.total_profiles() + flat]
    }

    /// Player `i`'s subtensor in canonical profile order.
    pub fn player_slice(&self, player: usize) -> &[f64] {
        let nhat = self.shape.total_profiles();
        &self.payoffs[player * nhat..(player + 1) * nhat]
    }

    /// Largest payoff magnitude over all players and profiles.
    pub fn max_abs(&self) -> f64 {
        self.payoffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Deterministic random game: entries i.i.d. uniform on `[lo, hi]`, drawn
    /// in storage order from a ChaCha8 stream seeded with `seed`. Identical
    /// arguments give identical tensors on every platform.
    pub fn random(shape: GameShape, seed: u64, lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "need lo < hi, got lo = {lo}, hi = {hi}"
            )));
        }
        let dist = Uniform::new_inclusive(lo, hi)
            .map_err(|e| Error::InvalidArgument(format!("bad payoff range: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = shape.num_players() * shape.total_profiles();
        let payoffs = (0..len).map(|_| dist.sample(&mut rng)).collect();
        Ok(PayoffTensor { shape, payoffs })
    }

    /// Canonical `.mmg` serialization. `load_game(save_game(t))` reproduces
    /// `t` bit-exactly: floats print with Rust's shortest round-trip `{}`.
    pub fn save_game(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("players {}\n", self.shape.num_players()));
        out.push_str("shape");
        for c in self.shape.strategy_counts() {
            out.push_str(&format!(" {c}"));
        }
        out.push('\n');
        for player in 0..self.shape.num_players() {
            out.push_str(&format!("payoffs {}\n", player + 1));
            let slice = self.player_slice(player);
            for (k, v) in slice.iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parse the `.mmg` format. Lines starting with `#` are comments.
    pub fn load_game(text: &str) -> Result<Self> {
        let mut tokens = Tokenizer::new(text);

        tokens.expect_keyword("players")?;
        let n: usize = tokens.parse_next("player count")?;
        if n == 0 {
            return tokens.fail("player count must be at least 1");
        }

        tokens.expect_keyword("shape")?;
        let mut counts = Vec::with_capacity(n);
        for _ in 0..n {
            let c: usize = tokens.parse_next("strategy count")?;
            if c == 0 {
                return tokens.fail("strategy count must be at least 1");
            }
            counts.push(c);
        }
        let shape = GameShape::new(counts)?;
        let nhat = shape.total_profiles();

        let mut payoffs = Vec::with_capacity(n * nhat);
        for player in 1..=n {
            tokens.expect_keyword("payoffs")?;
            let idx: usize = tokens.parse_next("player index")?;
            if idx != player {
                return tokens.fail(&format!(
                    "expected payoffs block for player {player}, got {idx}"
                ));
            }
            for _ in 0..nhat {
                let v: f64 = tokens.parse_next("payoff")?;
                if !v.is_finite() {
                    return tokens.fail("payoff must be finite");
                }
                payoffs.push(v);
            }
        }
        if let Some((line, col, tok)) = tokens.next_token() {
            return Err(Error::Parse {
                line,
                col,
                message: format!("unexpected trailing token `{tok}`"),
            });
        }
        PayoffTensor::new(shape, payoffs)
    }
}

/// Whitespace tokenizer tracking line and column for parse errors.
struct Tokenizer<'a> {
    lines: Vec<&'a str>,
    line: usize, // 0-based cursor
    col: usize,
    last_line: usize, // 1-based position of the token most recently returned
    last_col: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(text: &'a str) -> Self {
        Tokenizer {
            lines: text.lines().collect(),
            line: 0,
            col: 0,
            last_line: 1,
            last_col: 1,
        }
    }

    fn next_token(&mut self) -> Option<(usize, usize, &'a str)> {
        loop {
            if self.line >= self.lines.len() {
                return None;
            }
            let text = self.lines[self.line];
            let rest = &text[self.col..];
            let trimmed = rest.trim_start();
            let skipped = rest.len() - trimmed.len();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                self.line += 1;
                self.col = 0;
                continue;
            }
            let start = self.col + skipped;
            let end = trimmed
                .find(char::is_whitespace)
                .map(|k| start + k)
                .unwrap_or(text.len());
            self.col = end;
            self.last_line = self.line + 1;
            self.last_col = start + 1;
            return Some((self.line + 1, start + 1, &text[start..end]));
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        match self.next_token() {
            Some((_, _, tok)) if tok == kw => Ok(()),
            Some((line, col, tok)) => Err(Error::Parse {
                line,
                col,
                message: format!("expected `{kw}`, got `{tok}`"),
            }),
            None => Err(Error::Parse {
                line: self.lines.len().max(1),
                col: 1,
                message: format!("expected `{kw}`, got end of input"),
            }),
        }
    }

    fn parse_next<T: FromStr>(&mut self, what: &str) -> Result<T> {
        match self.next_token() {
            Some((line, col, tok)) => tok.parse().map_err(|_| Error::Parse {
                line,
                col,
                message: format!("expected {what}, got `{tok}`"),
            }),
            None => Err(Error::Parse {
                line: self.lines.len().max(1),
                col: 1,
                message: format!("expected {what}, got end of input"),
            }),
        }
    }

    fn fail<T>(&self, message: &str) -> Result<T> {
        Err(Error::Parse {
            line: self.last_line,
            col: self.last_col,
            message: message.into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shape(counts: &[usize]) -> GameShape {
        GameShape::new(counts.to_vec()).unwrap()
    }

    #[test]
    fn profile_iter_2x2_order() {
        let s = shape(&[2, 2]);
        let got: Vec<_> = s.profiles().map(|p| p.actions().to_vec()).collect();
        assert_eq!(got, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn profile_iter_singleton() {
        let s = shape(&[1, 1, 1]);
        let got: Vec<_> = s.profiles().collect();
        assert_eq!(got, vec![PureProfile::new(vec![0, 0, 0])]);
    }

    #[test]
    fn profile_iter_2x3_third_profile() {
        let s = shape(&[2, 3]);
        let got: Vec<_> = s.profiles().collect();
        assert_eq!(got.len(), 6);
        // third emitted is (1,3) in 1-based notation
        assert_eq!(got[2].actions(), &[0, 2]);
    }

    #[test]
    fn flat_index_round_trips() {
        let s = shape(&[3, 2, 4]);
        for (k, p) in s.profiles().enumerate() {
            assert_eq!(s.flat_index(&p).unwrap(), k);
            assert_eq!(s.profile_at(k), p);
        }
    }

    #[test]
    fn get_payoff_zero_tensor() {
        let t = PayoffTensor::zeros(shape(&[2, 3]));
        for p in t.shape().profiles() {
            for i in 0..2 {
                assert_eq!(t.get_payoff(i, &p).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn get_payoff_one_player_lookup() {
        let t = PayoffTensor::new(shape(&[2]), vec![3.0, 5.0]).unwrap();
        assert_eq!(t.get_payoff(0, &PureProfile::new(vec![1])).unwrap(), 5.0);
    }

    #[test]
    fn get_payoff_range_errors() {
        let t = PayoffTensor::zeros(shape(&[2, 2]));
        assert!(t.get_payoff(2, &PureProfile::new(vec![0, 0])).is_err());
        assert!(t.get_payoff(0, &PureProfile::new(vec![0, 2])).is_err());
        assert!(t.get_payoff(0, &PureProfile::new(vec![0])).is_err());
    }

    #[test]
    fn random_game_deterministic() {
        let a = PayoffTensor::random(shape(&[2, 2]), 42, -1.0, 1.0).unwrap();
        let b = PayoffTensor::random(shape(&[2, 2]), 42, -1.0, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_game_seed_sensitivity() {
        let a = PayoffTensor::random(shape(&[2, 2]), 42, -1.0, 1.0).unwrap();
        let b = PayoffTensor::random(shape(&[2, 2]), 43, -1.0, 1.0).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn random_game_rejects_bad_range() {
        assert!(PayoffTensor::random(shape(&[2, 2]), 1, 1.0, 1.0).is_err());
        assert!(PayoffTensor::random(shape(&[2, 2]), 1, 2.0, 1.0).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(PayoffTensor::new(shape(&[2]), vec![1.0, f64::NAN]).is_err());
        assert!(PayoffTensor::new(shape(&[2]), vec![f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn rejects_wrong_count() {
        assert!(PayoffTensor::new(shape(&[2, 2]), vec![0.0; 7]).is_err());
    }

    #[test]
    fn load_rejects_malformed() {
        // wrong keyword
        let e = PayoffTensor::load_game("player 2\n").unwrap_err();
        assert!(matches!(
            e,
            Error::Parse {
                line: 1,
                col: 1,
                ..
            }
        ));
        // non-numeric payoff, position reported
        let e = PayoffTensor::load_game("players 1\nshape 2\npayoffs 1\n1.0 oops\n").unwrap_err();
        match e {
            Error::Parse { line, col, .. } => {
                assert_eq!((line, col), (4, 5));
            }
            other => panic!("unexpected error {other:?}"),
        }
        // truncated payoff block
        assert!(PayoffTensor::load_game("players 1\nshape 2\npayoffs 1\n1.0\n").is_err());
        // trailing garbage
        assert!(PayoffTensor::load_game("players 1\nshape 2\npayoffs 1\n1 2\nextra\n").is_err());
        // infinity is not a payoff
        assert!(PayoffTensor::load_game("players 1\nshape 2\npayoffs 1\n1 inf\n").is_err());
    }

    #[test]
    fn load_accepts_comments_and_multiline() {
        let text =
            "# a game\nplayers 2\nshape 2 2\n# p1\npayoffs 1\n1 -1\n-1 1\npayoffs 2\n-1 1 1 -1\n";
        let t = PayoffTensor::load_game(text).unwrap();
        assert_eq!(t.player_slice(0), &[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(t.player_slice(1), &[-1.0, 1.0, 1.0, -1.0]);
    }

    fn arb_shape() -> impl Strategy<Value = GameShape> {
        prop::collection::vec(1usize..4, 1..4).prop_map(|c| GameShape::new(c).unwrap())
    }

    fn arb_tensor() -> impl Strategy<Value = PayoffTensor> {
        (arb_shape(), any::<u64>())
            .prop_map(|(s, seed)| PayoffTensor::random(s, seed, -10.0, 10.0).unwrap())
    }

    proptest! {
        #[test]
        fn save_load_round_trip(t in arb_tensor()) {
            let back = PayoffTensor::load_game(&t.save_game()).unwrap();
            prop_assert_eq!(back, t);
        }

        #[test]
        fn profiles_are_distinct_and_complete(s in arb_shape()) {
            let all: Vec<_> = s.profiles().collect();
            prop_assert_eq!(all.len(), s.total_profiles());
            let set: std::collections::HashSet<_> = all.iter().cloned().collect();
            prop_assert_eq!(set.len(), all.len());
        }

        #[test]
        fn payoff_addressing_matches_flat_layout(t in arb_tensor()) {
            for (flat, p) in t.shape().profiles().enumerate() {
                for i in 0..t.num_players() {
                    prop_assert_eq!(t.get_payoff(i, &p).unwrap(), t.payoff_flat(i, flat));
                }
            }
        }
    }
}
