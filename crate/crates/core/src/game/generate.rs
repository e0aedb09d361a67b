use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Game;
use crate::error::{Error, Result};

/// Payoff family drawn by [`random_game`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameClass {
    /// Every payoff i.i.d. uniform on `[0, 1)`.
    Uniform,
    /// Two players, `u_2 = -u_1`.
    ZeroSum,
    /// All players share one uniform payoff per profile (an exact potential game).
    IdenticalInterest,
}

impl std::str::FromStr for GameClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GameClass::Uniform),
            "zero_sum" | "zero-sum" => Ok(GameClass::ZeroSum),
            "identical_interest" | "identical-interest" => Ok(GameClass::IdenticalInterest),
            other => Err(Error::Precondition(format!("unknown game class `{other}`"))),
        }
    }
}

/// Deterministic random game: the same `(counts, seed, class)` always yields a
/// bit-identical tensor.
pub fn random_game(counts: &[usize], seed: u64, class: GameClass) -> Result<Game> {
    let n = counts.len();
    if class == GameClass::ZeroSum && n != 2 {
        return Err(Error::Precondition(format!(
            "zero-sum games need exactly 2 players, got {n}"
        )));
    }
    let profiles: usize = counts.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut payoffs = Vec::with_capacity(n * profiles);
    for _ in 0..profiles {
        match class {
            GameClass::Uniform => payoffs.extend((0..n).map(|_| rng.gen::<f64>())),
            GameClass::ZeroSum => {
                let v = rng.gen::<f64>();
                payoffs.extend([v, -v]);
            }
            GameClass::IdenticalInterest => {
                let v = rng.gen::<f64>();
                payoffs.extend(std::iter::repeat_n(v, n));
            }
        }
    }
    Ok(Game::new(counts.to_vec(), payoffs)?.with_name(format!("random-{seed}")))
}
