use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-player tolerance on `sum == 1` for a valid mixed profile.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// One strategy index per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PureProfile(Vec<usize>);

impl PureProfile {
    pub fn new(strategies: Vec<usize>) -> Self {
        PureProfile(strategies)
    }

    pub fn strategies(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(s; p_{-i})`: this profile with player `i` switched to `s`.
    pub fn deviate(&self, player: usize, s: usize) -> PureProfile {
        let mut v = self.0.clone();
        v[player] = s;
        PureProfile(v)
    }

    /// The antiprofile `p_{-i}`: every coordinate except player `i`'s.
    pub fn antiprofile(&self, player: usize) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != player)
            .map(|(_, &s)| s)
            .collect()
    }

    /// Node id used in DOT output: strategy indices joined by `_`.
    pub fn node_id(&self) -> String {
        self.0
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("_")
    }
}

impl fmt::Display for PureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// The unique player in whose strategy `p` and `q` differ, if they differ in
/// exactly one coordinate.
pub fn comparable(p: &PureProfile, q: &PureProfile) -> Result<Option<usize>> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!(
            "profiles of different lengths ({} vs {})",
            p.len(),
            q.len()
        )));
    }
    let mut diff = p.0.iter().zip(&q.0).enumerate().filter(|(_, (a, b))| a != b);
    Ok(match (diff.next(), diff.next()) {
        (Some((i, _)), None) => Some(i),
        _ => None,
    })
}

/// A probability vector per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile {
    dists: Vec<Vec<f64>>,
}

impl MixedProfile {
    pub fn new(dists: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerance(dists, SIMPLEX_TOL)
    }

    /// Like [`MixedProfile::new`] but accepting per-player sums within `tol` of 1.
    pub fn with_tolerance(dists: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        if dists.is_empty() {
            return Err(Error::InvalidProfile("no players".into()));
        }
        for (i, d) in dists.iter().enumerate() {
            if d.is_empty() {
                return Err(Error::InvalidProfile(format!("player {i} has no strategies")));
            }
            if let Some(s) = d.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidProfile(format!(
                    "player {i} strategy {s} has probability {}",
                    d[s]
                )));
            }
            let sum: f64 = d.iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(Error::InvalidProfile(format!(
                    "player {i} probabilities sum to {sum}"
                )));
            }
        }
        Ok(MixedProfile { dists })
    }

    pub(crate) fn new_unchecked(dists: Vec<Vec<f64>>) -> Self {
        MixedProfile { dists }
    }

    pub fn uniform(counts: &[usize]) -> Self {
        MixedProfile {
            dists: counts.iter().map(|&c| vec![1.0 / c as f64; c]).collect(),
        }
    }

    pub fn vertex(counts: &[usize], profile: &PureProfile) -> Result<Self> {
        if profile.len() != counts.len() {
            return Err(Error::Shape("profile length differs from player count".into()));
        }
        let mut dists = Vec::with_capacity(counts.len());
        for (i, (&c, &s)) in counts.iter().zip(profile.strategies()).enumerate() {
            if s >= c {
                return Err(Error::Shape(format!("player {i} strategy {s} out of range")));
            }
            let mut d = vec![0.0; c];
            d[s] = 1.0;
            dists.push(d);
        }
        Ok(MixedProfile { dists })
    }

    /// Rebuilds a profile from a flat coordinate vector laid out player by
    /// player, accepting per-player sums within 1e-9 of 1.
    pub fn from_flat(counts: &[usize], flat: &[f64]) -> Result<Self> {
        if flat.len() != counts.iter().sum::<usize>() {
            return Err(Error::Shape(format!(
                "flat state has {} entries, expected {}",
                flat.len(),
                counts.iter().sum::<usize>()
            )));
        }
        let mut dists = Vec::with_capacity(counts.len());
        let mut at = 0;
        for &c in counts {
            dists.push(flat[at..at + c].to_vec());
            at += c;
        }
        Self::with_tolerance(dists, 1e-9)
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.dists.iter().flatten().copied().collect()
    }

    pub fn num_players(&self) -> usize {
        self.dists.len()
    }

    pub fn strategy_counts(&self) -> Vec<usize> {
        self.dists.iter().map(Vec::len).collect()
    }

    pub fn player(&self, i: usize) -> &[f64] {
        &self.dists[i]
    }

    pub fn dists(&self) -> &[Vec<f64>] {
        &self.dists
    }

    /// Infinity-norm distance; panics if shapes differ.
    pub fn distance(&self, other: &MixedProfile) -> f64 {
        assert_eq!(self.strategy_counts(), other.strategy_counts());
        self.dists
            .iter()
            .flatten()
            .zip(other.dists.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Per-player sets of strategies with probability above `tol`.
    pub fn support_subgame(&self, tol: f64) -> Result<SubgameSpec> {
        let sets: Vec<Vec<usize>> = self
            .dists
            .iter()
            .map(|d| (0..d.len()).filter(|&s| d[s] > tol).collect())
            .collect();
        if let Some(i) = sets.iter().position(Vec::is_empty) {
            return Err(Error::InvalidProfile(format!(
                "player {i} has empty support at tolerance {tol}"
            )));
        }
        SubgameSpec::new(sets)
    }
}

impl fmt::Display for MixedProfile {
    /// CLI syntax: players separated by `;`, probabilities by `,`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.dists.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            for (k, v) in d.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

/// A nonempty, sorted subset of strategies for each player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubgameSpec {
    sets: Vec<Vec<usize>>,
}

impl SubgameSpec {
    pub fn new(mut sets: Vec<Vec<usize>>) -> Result<Self> {
        for (i, set) in sets.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(Error::Shape(format!("player {i} has an empty strategy subset")));
            }
        }
        Ok(SubgameSpec { sets })
    }

    pub fn full(counts: &[usize]) -> Self {
        SubgameSpec {
            sets: counts.iter().map(|&c| (0..c).collect()).collect(),
        }
    }

    pub fn singleton(profile: &PureProfile) -> Self {
        SubgameSpec {
            sets: profile.strategies().iter().map(|&s| vec![s]).collect(),
        }
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn validate(&self, counts: &[usize]) -> Result<()> {
        if self.sets.len() != counts.len() {
            return Err(Error::Shape(format!(
                "subgame has {} players, game has {}",
                self.sets.len(),
                counts.len()
            )));
        }
        for (i, (set, &c)) in self.sets.iter().zip(counts).enumerate() {
            if set.is_empty() {
                return Err(Error::Shape(format!("player {i} has an empty strategy subset")));
            }
            if let Some(&s) = set.iter().find(|&&s| s >= c) {
                return Err(Error::Shape(format!("player {i} strategy {s} out of range")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, player: usize, s: usize) -> bool {
        self.sets[player].binary_search(&s).is_ok()
    }

    pub fn contains_profile(&self, p: &PureProfile) -> bool {
        p.strategies()
            .iter()
            .enumerate()
            .all(|(i, &s)| self.contains(i, s))
    }

    /// True iff every set of `self` is a subset of the matching set of `other`.
    pub fn is_subset_of(&self, other: &SubgameSpec) -> bool {
        self.sets
            .iter()
            .enumerate()
            .all(|(i, set)| set.iter().all(|&s| other.contains(i, s)))
    }

    pub fn num_profiles(&self) -> usize {
        self.sets.iter().map(Vec::len).product()
    }

    /// Profiles of the subgame in local (subgame) coordinates, row-major.
    pub fn local_profiles(&self) -> impl Iterator<Item = PureProfile> + '_ {
        let counts: Vec<usize> = self.sets.iter().map(Vec::len).collect();
        (0..self.num_profiles()).map(move |mut k| {
            let mut v = vec![0; counts.len()];
            for (slot, &c) in v.iter_mut().zip(&counts).rev() {
                *slot = k % c;
                k /= c;
            }
            PureProfile(v)
        })
    }

    /// Profiles of the subgame in parent-game coordinates, row-major.
    pub fn profiles(&self) -> impl Iterator<Item = PureProfile> + '_ {
        self.local_profiles().map(move |local| {
            PureProfile(
                local
                    .0
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| self.sets[i][k])
                    .collect(),
            )
        })
    }
}

impl fmt::Display for SubgameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, set) in self.sets.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            for (k, s) in set.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for SubgameSpec {
    type Err = Error;

    /// Parses `0,1;2` (players separated by `;`, strategies by `,`).
    fn from_str(text: &str) -> Result<Self> {
        let sets = text
            .split(';')
            .enumerate()
            .map(|(i, part)| {
                part.split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.parse::<usize>().map_err(|e| {
                            crate::error::parse_err("subgame", format!("player {i}: `{t}`: {e}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        SubgameSpec::new(sets)
    }
}
