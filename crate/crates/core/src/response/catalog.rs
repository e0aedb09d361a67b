//! Named games with fixed payoff tensors.
//!
//! | name            | shape | description                                        |
//! |-----------------|-------|----------------------------------------------------|
//! | `mp`            | 2x2   | Matching Pennies, +-1 zero-sum                     |
//! | `rps`           | 3x3   | Rock-Paper-Scissors, 0/+-1 zero-sum                |
//! | `co`            | 2x2   | Coordination, (1,1) on the diagonal, 0 elsewhere   |
//! | `sd`            | 2x2   | Single dominance: only the row player has a dominant strategy |
//! | `dd`            | 2x2   | Double dominance: both players have dominant strategies |
//! | `inner_diamond` | 3x3   | zero-sum, unique sink is the pure profile (0,0)    |
//! | `outer_diamond` | 3x3   | zero-sum, source (1,1), the other eight profiles form the sink |
//! | `cmmp`          | 2x2x2 | Circular matching/mismatching pennies              |
//!
//! The diamond tensors are one small-integer representative of each of the two
//! 3x3 zero-sum response graphs (without dominated strategies) that are not
//! strongly connected.

use super::super::game::Game;
use crate::error::{Error, Result};

pub const CATALOG_NAMES: &[&str] = &[
    "mp",
    "rps",
    "co",
    "sd",
    "dd",
    "inner_diamond",
    "outer_diamond",
    "cmmp",
];

fn labels(names: &[&[&str]]) -> Vec<Vec<String>> {
    names
        .iter()
        .map(|p| p.iter().map(|s| s.to_string()).collect())
        .collect()
}

pub fn catalog(name: &str) -> Result<Game> {
    let game = match name {
        "mp" => Game::zero_sum(&[vec![1.0, -1.0], vec![-1.0, 1.0]])?
            .with_labels(labels(&[&["H", "T"], &["H", "T"]]))?,
        "rps" => Game::zero_sum(&[
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ])?
        .with_labels(labels(&[&["R", "P", "S"], &["R", "P", "S"]]))?,
        "co" => Game::bimatrix(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
        )?
        .with_labels(labels(&[&["A", "B"], &["A", "B"]]))?,
        "sd" => Game::bimatrix(
            &[vec![1.0, 1.0], vec![0.0, 0.0]],
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
        )?,
        "dd" => Game::bimatrix(
            &[vec![1.0, 1.0], vec![0.0, 0.0]],
            &[vec![1.0, 0.0], vec![1.0, 0.0]],
        )?,
        "inner_diamond" => Game::zero_sum(&[
            vec![-1.0, 1.0, 0.0],
            vec![-2.0, -4.0, 1.0],
            vec![-3.0, 3.0, -5.0],
        ])?,
        "outer_diamond" => Game::zero_sum(&[
            vec![-2.0, 2.0, 4.0],
            vec![-1.0, 0.0, -2.0],
            vec![2.0, 1.0, -3.0],
        ])?,
        "cmmp" => circular_pennies()?,
        other => {
            return Err(Error::UnknownGame {
                name: other.to_string(),
                available: CATALOG_NAMES.join(", "),
            })
        }
    };
    Ok(game.with_name(name))
}

/// Player 0 wants to match player 1, player 1 wants to match player 2, and
/// player 2 wants to mismatch player 0. Payoffs are +-1.
fn circular_pennies() -> Result<Game> {
    let mut payoffs = Vec::with_capacity(24);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let sign = |win: bool| if win { 1.0 } else { -1.0 };
                payoffs.extend([sign(a == b), sign(b == c), sign(c != a)]);
            }
        }
    }
    Game::new(vec![2, 2, 2], payoffs)
}
