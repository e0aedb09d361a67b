//! JSON game files.
//!
//! ```json
//! {
//!   "name": "mp",
//!   "players": 2,
//!   "strategies": [["H", "T"], ["H", "T"]],
//!   "payoffs": [[1, -1], [-1, 1], [-1, 1], [1, -1]]
//! }
//! ```
//!
//! `payoffs` holds one length-N vector per pure profile in row-major order
//! (player 0's strategy varies slowest).

use serde::Deserialize;
use serde_json::Value;

use super::Game;
use crate::error::{parse_err, Result};

#[derive(Deserialize)]
struct GameFile {
    name: Option<String>,
    players: Value,
    strategies: Value,
    payoffs: Value,
}

pub fn load_game(text: &str) -> Result<Game> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| parse_err("json", e.to_string()))?;

    let players = file
        .players
        .as_u64()
        .filter(|&n| n >= 1)
        .ok_or_else(|| parse_err("players", "expected a positive integer"))? as usize;

    let strategies: Vec<Vec<String>> = serde_json::from_value(file.strategies)
        .map_err(|e| parse_err("strategies", format!("expected arrays of strings: {e}")))?;
    if strategies.len() != players {
        return Err(parse_err(
            "strategies",
            format!("expected {players} strategy lists, found {}", strategies.len()),
        ));
    }
    if let Some(i) = strategies.iter().position(Vec::is_empty) {
        return Err(parse_err("strategies", format!("player {i} has no strategies")));
    }
    let counts: Vec<usize> = strategies.iter().map(Vec::len).collect();
    let profiles: usize = counts.iter().product();

    let rows = file
        .payoffs
        .as_array()
        .ok_or_else(|| parse_err("payoffs", "expected an array of payoff vectors"))?;
    if rows.len() != profiles {
        return Err(parse_err(
            "payoffs",
            format!("expected {profiles} profiles, found {}", rows.len()),
        ));
    }
    let mut payoffs = Vec::with_capacity(profiles * players);
    for (k, row) in rows.iter().enumerate() {
        let field = format!("payoffs[{k}]");
        let row = row
            .as_array()
            .ok_or_else(|| parse_err(&field, "expected an array of numbers"))?;
        if row.len() != players {
            return Err(parse_err(
                &field,
                format!("expected {players} payoffs, found {}", row.len()),
            ));
        }
        for v in row {
            let v = v
                .as_f64()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(&field, format!("`{v}` is not a finite number")))?;
            payoffs.push(v);
        }
    }

    let mut game = Game::new(counts, payoffs)?.with_labels(strategies)?;
    if let Some(name) = file.name {
        game = game.with_name(name);
    }
    Ok(game)
}

/// Serializes a game in the file format; floats use the shortest
/// representation that parses back to the identical `f64`.
pub fn save_game(game: &Game) -> String {
    let n = game.num_players();
    let mut out = String::from("{\n");
    if let Some(name) = game.name() {
        out.push_str(&format!("  \"name\": {},\n", json(name)));
    }
    out.push_str(&format!("  \"players\": {n},\n"));
    out.push_str(&format!("  \"strategies\": {},\n", json(game.labels())));
    out.push_str("  \"payoffs\": [\n");
    let rows = game.payoffs().chunks(n).collect::<Vec<_>>();
    for (k, row) in rows.iter().enumerate() {
        let sep = if k + 1 == rows.len() { "" } else { "," };
        out.push_str(&format!("    {}{sep}\n", json(row)));
    }
    out.push_str("  ]\n}\n");
    out
}

fn json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}
