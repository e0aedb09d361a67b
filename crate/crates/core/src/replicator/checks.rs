use super::{integrate, Field, IntegratorConfig, Trajectory};
use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile, SubgameSpec};

/// Integrates `x0` in the full game and in the subgame `y` (lifted back) and
/// returns the largest infinity-norm gap between matching samples.
pub fn subgame_invariance_check(
    game: &Game,
    y: &SubgameSpec,
    x0: &MixedProfile,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    game.check_mixed(x0)?;
    y.validate(game.strategy_counts())?;
    for (p, d) in x0.dists().iter().enumerate() {
        if let Some(s) = (0..d.len()).find(|&s| d[s] != 0.0 && !y.contains(p, s)) {
            return Err(Error::Precondition(format!(
                "start puts mass {} on player {p} strategy {s}, outside the subgame",
                d[s]
            )));
        }
    }
    let sub = game.restrict(y)?;
    let full = integrate(game, x0, cfg, false)?;
    let local = integrate(&sub.game, &sub.project_mixed(x0), cfg, false)?;
    let mut worst: f64 = 0.0;
    for k in 0..full.len() {
        let lifted = sub.lift_mixed(&local.state(k));
        worst = worst.max(full.state(k).distance(&lifted));
    }
    Ok(worst)
}

/// Divergence of the field in log-ratio coordinates
/// `y^p_s = ln(x^p_s / x^p_0)`, by central differences with step `h`.
/// The replicator flow preserves volume in these coordinates, so the exact
/// value is zero for every game.
pub fn interior_divergence(game: &Game, x: &MixedProfile, h: f64) -> Result<f64> {
    game.check_mixed(x)?;
    if !(h > 0.0) {
        return Err(Error::Precondition(format!("step must be positive, got {h}")));
    }
    if let Some(v) = x.dists().iter().flatten().find(|&&v| v < 10.0 * h) {
        return Err(Error::Precondition(format!(
            "coordinate {v} is within 10h of the boundary"
        )));
    }
    let field = Field::new(game);
    let y0 = to_log_ratio(x);
    let mut div = 0.0;
    let mut k = 0;
    for d in x.dists() {
        for _ in 1..d.len() {
            let mut plus = y0.clone();
            let mut minus = y0.clone();
            plus[k] += h;
            minus[k] -= h;
            let fp = log_ratio_velocity(&field, &from_log_ratio(x, &plus));
            let fm = log_ratio_velocity(&field, &from_log_ratio(x, &minus));
            div += (fp[k] - fm[k]) / (2.0 * h);
            k += 1;
        }
    }
    Ok(div)
}

fn to_log_ratio(x: &MixedProfile) -> Vec<f64> {
    x.dists()
        .iter()
        .flat_map(|d| d[1..].iter().map(move |&v| (v / d[0]).ln()))
        .collect()
}

fn from_log_ratio(shape: &MixedProfile, y: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0;
    for d in shape.dists() {
        let weights: Vec<f64> = std::iter::once(1.0)
            .chain(y[k..k + d.len() - 1].iter().map(|v| v.exp()))
            .collect();
        k += d.len() - 1;
        let total: f64 = weights.iter().sum();
        out.extend(weights.iter().map(|w| w / total));
    }
    out
}

// dy^p_s/dt = xdot_s / x_s - xdot_0 / x_0
fn log_ratio_velocity(field: &Field, x: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; x.len()];
    field.eval(x, &mut v);
    let mut out = Vec::new();
    for (&off, &c) in field.offsets().iter().zip(field.counts()) {
        let base = v[off] / x[off];
        out.extend((1..c).map(|s| v[off + s] / x[off + s] - base));
    }
    out
}

/// `sum_p KL(xstar^p || x^p)`; infinite if `x` drops a strategy `xstar` uses.
pub fn kl_divergence(xstar: &MixedProfile, x: &[f64]) -> f64 {
    xstar
        .dists()
        .iter()
        .flatten()
        .zip(x)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| a * (a / b).ln())
        .sum()
}

/// Largest change of [`kl_divergence`] from its starting value along a
/// trajectory; the sum is a constant of motion around an interior
/// equilibrium of a zero-sum game.
pub fn kl_drift(traj: &Trajectory, xstar: &MixedProfile) -> f64 {
    let mut states = traj.states();
    let Some(first) = states.next() else {
        return 0.0;
    };
    let k0 = kl_divergence(xstar, first);
    states.fold(0.0, |m, x| m.max((kl_divergence(xstar, x) - k0).abs()))
}
