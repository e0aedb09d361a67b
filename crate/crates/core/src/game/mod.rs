//! Finite normal-form games, pure and mixed profiles, and subgames.
//!
//! Payoffs live in one dense array in row-major profile order (player 0's
//! strategy index varies slowest); entry `profile * N + i` is player `i`'s
//! payoff at that profile.

mod dominance;
mod equilibrium;
mod generate;
mod io;
mod profile;

pub use dominance::iterated_strict_dominance;
pub use equilibrium::{solve_linear, zero_sum_interior_equilibrium};
pub use generate::{random_game, GameClass};
pub use io::{load_game, save_game};
pub use profile::{comparable, MixedProfile, PureProfile, SubgameSpec, SIMPLEX_TOL};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    name: Option<String>,
    counts: Vec<usize>,
    labels: Vec<Vec<String>>,
    payoffs: Vec<f64>,
}

impl Game {
    /// Builds a game from strategy counts and a flat payoff tensor of length
    /// `N * prod(counts)`. Strategy labels default to `s0, s1, ...`.
    pub fn new(counts: Vec<usize>, payoffs: Vec<f64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Shape("a game needs at least one player".into()));
        }
        if let Some(i) = counts.iter().position(|&c| c == 0) {
            return Err(Error::Shape(format!("player {i} has no strategies")));
        }
        let n = counts.len();
        let profiles: usize = counts.iter().product();
        if payoffs.len() != n * profiles {
            return Err(Error::Shape(format!(
                "expected {} payoff entries ({profiles} profiles x {n} players), found {}",
                n * profiles,
                payoffs.len()
            )));
        }
        if let Some(k) = payoffs.iter().position(|v| !v.is_finite()) {
            return Err(Error::Shape(format!(
                "payoff entry {k} (profile {}, player {}) is not finite",
                k / n,
                k % n
            )));
        }
        let labels = counts
            .iter()
            .map(|&c| (0..c).map(|s| format!("s{s}")).collect())
            .collect();
        Ok(Game {
            name: None,
            counts,
            labels,
            payoffs,
        })
    }

    /// Two-player game from row/column payoff matrices `a[i][j]`, `b[i][j]`.
    pub fn bimatrix(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Self> {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        if b.len() != rows || a.iter().chain(b).any(|r| r.len() != cols) {
            return Err(Error::Shape("bimatrix payoff matrices differ in shape".into()));
        }
        let mut payoffs = Vec::with_capacity(2 * rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                payoffs.push(a[i][j]);
                payoffs.push(b[i][j]);
            }
        }
        Game::new(vec![rows, cols], payoffs)
    }

    /// Two-player zero-sum game with row payoffs `a` (column player gets `-a`).
    pub fn zero_sum(a: &[Vec<f64>]) -> Result<Self> {
        let b: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
        Game::bimatrix(a, &b)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.len() != self.counts.len()
            || labels.iter().zip(&self.counts).any(|(l, &c)| l.len() != c)
        {
            return Err(Error::Shape("strategy labels do not match strategy counts".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn num_players(&self) -> usize {
        self.counts.len()
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn num_profiles(&self) -> usize {
        self.payoffs.len() / self.counts.len()
    }

    /// Raw payoff tensor in row-major profile order.
    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn shape_string(&self) -> String {
        self.counts
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("x")
    }

    /// Row-major index of a pure profile. Panics on out-of-range strategies;
    /// callers validate profiles first.
    pub fn profile_index(&self, strategies: &[usize]) -> usize {
        debug_assert_eq!(strategies.len(), self.counts.len());
        strategies
            .iter()
            .zip(&self.counts)
            .fold(0, |acc, (&s, &c)| {
                debug_assert!(s < c);
                acc * c + s
            })
    }

    pub fn profile_at(&self, mut index: usize) -> PureProfile {
        let mut strategies = vec![0; self.counts.len()];
        for (slot, &c) in strategies.iter_mut().zip(&self.counts).rev() {
            *slot = index % c;
            index /= c;
        }
        PureProfile::new(strategies)
    }

    pub fn profiles(&self) -> impl Iterator<Item = PureProfile> + '_ {
        (0..self.num_profiles()).map(|k| self.profile_at(k))
    }

    pub fn payoff(&self, profile: usize, player: usize) -> f64 {
        self.payoffs[profile * self.counts.len() + player]
    }

    pub fn payoff_vector(&self, profile: &PureProfile) -> Result<&[f64]> {
        self.check_profile(profile)?;
        let n = self.counts.len();
        let k = self.profile_index(profile.strategies());
        Ok(&self.payoffs[k * n..(k + 1) * n])
    }

    pub fn check_profile(&self, profile: &PureProfile) -> Result<()> {
        if profile.len() != self.counts.len() {
            return Err(Error::Shape(format!(
                "profile has {} entries, game has {} players",
                profile.len(),
                self.counts.len()
            )));
        }
        for (i, (&s, &c)) in profile.strategies().iter().zip(&self.counts).enumerate() {
            if s >= c {
                return Err(Error::Shape(format!(
                    "player {i} strategy {s} out of range (0..{c})"
                )));
            }
        }
        Ok(())
    }

    pub fn check_mixed(&self, x: &MixedProfile) -> Result<()> {
        if x.strategy_counts() != self.counts {
            return Err(Error::Shape(format!(
                "mixed profile shape {:?} does not match game shape {:?}",
                x.strategy_counts(),
                self.counts
            )));
        }
        Ok(())
    }

    /// Expected payoff vector under independent mixing.
    pub fn expected_utility(&self, x: &MixedProfile) -> Result<Vec<f64>> {
        self.check_mixed(x)?;
        let n = self.counts.len();
        let mut out = vec![0.0; n];
        for (k, p) in self.profiles().enumerate() {
            let w: f64 = p
                .strategies()
                .iter()
                .enumerate()
                .map(|(i, &s)| x.player(i)[s])
                .product();
            if w == 0.0 {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o += w * self.payoffs[k * n + i];
            }
        }
        Ok(out)
    }

    /// True iff no two `i`-comparable profiles give player `i` equal payoffs.
    pub fn is_strict(&self) -> bool {
        self.comparable_pairs().all(|(p, q, i)| {
            self.payoff(p, i) != self.payoff(q, i)
        })
    }

    /// All unordered comparable pairs `(p, q, player)` with `p < q` as profile
    /// indices.
    pub fn comparable_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let strides = self.strides();
        (0..self.num_profiles()).flat_map(move |k| {
            let profile = self.profile_at(k);
            let strides = strides.clone();
            (0..self.counts.len()).flat_map(move |i| {
                let s = profile.strategies()[i];
                let stride = strides[i];
                (s + 1..self.counts[i]).map(move |t| (k, k + (t - s) * stride, i))
            })
        })
    }

    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.counts.len()];
        for i in (0..self.counts.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.counts[i + 1];
        }
        strides
    }

    /// The subgame on `spec`, with the index maps needed to lift profiles back.
    pub fn restrict(&self, spec: &SubgameSpec) -> Result<RestrictedGame> {
        spec.validate(&self.counts)?;
        let n = self.counts.len();
        let counts: Vec<usize> = spec.sets().iter().map(Vec::len).collect();
        let mut payoffs = Vec::with_capacity(n * counts.iter().product::<usize>());
        for local in spec.profiles() {
            let k = self.profile_index(local.strategies());
            payoffs.extend_from_slice(&self.payoffs[k * n..(k + 1) * n]);
        }
        let labels = spec
            .sets()
            .iter()
            .enumerate()
            .map(|(i, set)| set.iter().map(|&s| self.labels[i][s].clone()).collect())
            .collect();
        let mut game = Game::new(counts, payoffs)?.with_labels(labels)?;
        game.name = self.name.as_ref().map(|n| format!("{n}|{}", spec));
        Ok(RestrictedGame {
            game,
            spec: spec.clone(),
            parent_counts: self.counts.clone(),
        })
    }
}

/// A subgame together with the strategy maps back into its parent game.
#[derive(Debug, Clone)]
pub struct RestrictedGame {
    pub game: Game,
    pub spec: SubgameSpec,
    parent_counts: Vec<usize>,
}

impl RestrictedGame {
    pub fn lift_pure(&self, local: &PureProfile) -> PureProfile {
        PureProfile::new(
            local
                .strategies()
                .iter()
                .enumerate()
                .map(|(i, &s)| self.spec.sets()[i][s])
                .collect(),
        )
    }

    /// Embeds a subgame mixed profile into the parent strategy space, with zero
    /// mass on strategies outside the subgame.
    pub fn lift_mixed(&self, local: &MixedProfile) -> MixedProfile {
        let dists = self
            .parent_counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut d = vec![0.0; c];
                for (k, &s) in self.spec.sets()[i].iter().enumerate() {
                    d[s] = local.player(i)[k];
                }
                d
            })
            .collect();
        MixedProfile::new_unchecked(dists)
    }

    /// Projects a parent mixed profile onto the subgame coordinates (mass
    /// outside the subgame is dropped, not renormalized).
    pub fn project_mixed(&self, x: &MixedProfile) -> MixedProfile {
        let dists = self
            .spec
            .sets()
            .iter()
            .enumerate()
            .map(|(i, set)| set.iter().map(|&s| x.player(i)[s]).collect())
            .collect();
        MixedProfile::new_unchecked(dists)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp() -> Game {
        Game::zero_sum(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()
    }

    #[test]
    fn profile_indexing_is_row_major() {
        let g = Game::new(vec![2, 3], vec![0.0; 12]).unwrap();
        assert_eq!(g.profile_index(&[0, 0]), 0);
        assert_eq!(g.profile_index(&[0, 2]), 2);
        assert_eq!(g.profile_index(&[1, 0]), 3);
        for k in 0..6 {
            assert_eq!(g.profile_index(g.profile_at(k).strategies()), k);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Game::new(vec![2, 2], vec![0.0; 7]).is_err());
        assert!(Game::new(vec![2, 0], vec![]).is_err());
        assert!(Game::new(vec![], vec![]).is_err());
        assert!(Game::new(vec![1], vec![f64::NAN]).is_err());
    }

    #[test]
    fn expected_utility_examples() {
        let g = mp();
        let u = g.expected_utility(&MixedProfile::uniform(&[2, 2])).unwrap();
        assert_eq!(u, vec![0.0, 0.0]);

        let co = Game::bimatrix(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        // 0.25 * (1 + 0 + 0 + 1) per player
        let u = co.expected_utility(&MixedProfile::uniform(&[2, 2])).unwrap();
        assert_eq!(u, vec![0.5, 0.5]);

        for p in g.profiles() {
            let v = MixedProfile::vertex(&[2, 2], &p).unwrap();
            assert_eq!(g.expected_utility(&v).unwrap(), g.payoff_vector(&p).unwrap());
        }
    }

    #[test]
    fn expected_utility_shape_mismatch() {
        let g = mp();
        assert!(g.expected_utility(&MixedProfile::uniform(&[3, 2])).is_err());
    }

    #[test]
    fn strictness() {
        assert!(mp().is_strict());
        let tied = Game::zero_sum(&[vec![1.0, -1.0], vec![1.0, 1.0]]).unwrap();
        assert!(!tied.is_strict());
        let single = Game::new(vec![1, 1], vec![3.0, 4.0]).unwrap();
        assert!(single.is_strict());
    }

    #[test]
    fn comparable_pair_count_matches_formula() {
        let g = Game::new(vec![2, 3, 4], vec![0.0; 3 * 24]).unwrap();
        // sum_i C(|S_i|,2) * prod_{j != i} |S_j|
        let expected = 12 + 3 * 8 + 6 * 6;
        assert_eq!(g.comparable_pairs().count(), expected);
    }

    #[test]
    fn restrict_examples() {
        let g = mp();
        let full = g.restrict(&SubgameSpec::full(&[2, 2])).unwrap();
        assert_eq!(full.game.payoffs(), g.payoffs());

        let edge = g
            .restrict(&SubgameSpec::new(vec![vec![0], vec![0, 1]]).unwrap())
            .unwrap();
        assert_eq!(edge.game.strategy_counts(), &[1, 2]);
        assert_eq!(edge.game.payoffs(), &[1.0, -1.0, -1.0, 1.0]);

        let point = g
            .restrict(&SubgameSpec::new(vec![vec![1], vec![0]]).unwrap())
            .unwrap();
        assert_eq!(point.game.payoffs(), &[-1.0, 1.0]);
        assert_eq!(
            point.lift_pure(&PureProfile::new(vec![0, 0])).strategies(),
            &[1, 0]
        );
    }

    #[test]
    fn restrict_rejects_empty_subset() {
        assert!(SubgameSpec::new(vec![vec![], vec![0]]).is_err());
    }
}
