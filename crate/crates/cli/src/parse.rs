use anyhow::{bail, Context, Result};
use sinkchain::{MixedProfile, SubgameSpec};

/// Parses `0.9,0.1;0.5,0.5` (players split by `;`, probabilities by `,`) or
/// the literal `uniform`.
pub fn parse_mixed(text: &str, counts: &[usize]) -> Result<MixedProfile> {
    let text = text.trim();
    if text == "uniform" {
        return Ok(MixedProfile::uniform(counts));
    }
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != counts.len() {
        bail!(
            "expected {} players separated by ';', found {}",
            counts.len(),
            parts.len()
        );
    }
    let mut dists = Vec::with_capacity(counts.len());
    for (i, (part, &c)) in parts.iter().zip(counts).enumerate() {
        let probs = part
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .with_context(|| format!("player {i}: `{t}` is not a number"))
            })
            .collect::<Result<Vec<f64>>>()?;
        if probs.len() != c {
            bail!("player {i}: expected {c} probabilities, found {}", probs.len());
        }
        if let Some(s) = probs.iter().position(|&v| v < 0.0) {
            bail!("player {i}: strategy {s} has negative probability {}", probs[s]);
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            bail!("player {i}: probabilities sum to {sum}, expected 1");
        }
        dists.push(probs);
    }
    Ok(MixedProfile::new(dists)?)
}

/// Parses `0;0,1` and checks it against the game shape.
pub fn parse_subgame(text: &str, counts: &[usize]) -> Result<SubgameSpec> {
    let y: SubgameSpec = text.parse()?;
    if y.sets().len() != counts.len() {
        bail!("subgame lists {} players, game has {}", y.sets().len(), counts.len());
    }
    for (i, (set, &c)) in y.sets().iter().zip(counts).enumerate() {
        if let Some(&s) = set.iter().find(|&&s| s >= c) {
            bail!("player {i}: strategy {s} out of range (player has {c})");
        }
    }
    Ok(y)
}

/// Parses `2x3` or `2x2x2`.
pub fn parse_shape(text: &str) -> Result<Vec<usize>> {
    let shape = text
        .split(['x', 'X'])
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad shape component `{t}`")))
        .collect::<Result<Vec<_>>>()?;
    if shape.is_empty() || shape.contains(&0) {
        bail!("shape `{text}` needs positive strategy counts");
    }
    Ok(shape)
}
