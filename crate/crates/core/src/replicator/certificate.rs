//! Trapping-region certificate for attracting subgames.
//!
//! For a subgame `Y`, the neighborhood `Y_M` is the set of profiles that put
//! less than `M` on every strategy outside `Y`. The certificate computes an
//! explicit `M` such that every outside coordinate strictly decreases inside
//! `Y_M`, which makes `Y_M` a trapping region and `Y` an attractor.
//!
//! For player `p`, outside strategy `s` and inside strategy `t`:
//!
//! * `alpha[s,t]` is the max of `u(s;q) - u(t;q)` over antiprofiles `q` inside `Y`;
//! * `beta[s,t]` is the same max over antiprofiles with an outside strategy;
//! * `gamma[s]` is the max of `u(s;q) - u(t;q)` over outside `t` and all `q`;
//! * `alpha[s]` is the max of `alpha[s,t]` over inside `t`.
//!
//! With `Q` outside antiprofiles and `L` outside strategies of `p`,
//! `xdot_s <= x_s (alpha[s] + M D)` where
//! `D = -L alpha[s] - Q sum_t alpha[s,t] + Q sum_t max(beta[s,t], 0) + L max(gamma[s], 0)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Field, Flow};
use crate::error::{Error, Result};
use crate::game::{Game, SubgameSpec};
use crate::response::{build_response_graph, escaping_arc};

pub const DEFAULT_AUDIT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutsideConstants {
    pub strategy: usize,
    /// Indexed like the player's inside strategies.
    pub alpha: Vec<f64>,
    /// `None` when every antiprofile lies inside the subgame.
    pub beta: Vec<Option<f64>>,
    pub alpha_s: f64,
    pub gamma: f64,
    pub d: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlayerConstants {
    pub player: usize,
    pub inside: Vec<usize>,
    pub outside: Vec<usize>,
    /// Number of antiprofiles of the other players that leave the subgame.
    pub q: usize,
    /// Number of this player's strategies outside the subgame.
    pub l: usize,
    pub strategies: Vec<OutsideConstants>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditSummary {
    pub samples: usize,
    pub seed: u64,
    pub violations: usize,
    /// Largest outside-coordinate velocity seen; negative when the audit passes.
    pub max_outside_velocity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrappingCertificate {
    pub subgame: SubgameSpec,
    pub players: Vec<PlayerConstants>,
    pub m: f64,
    pub audit: AuditSummary,
}

impl TrappingCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

pub fn trapping_certificate(game: &Game, y: &SubgameSpec) -> Result<TrappingCertificate> {
    trapping_certificate_with(game, y, DEFAULT_AUDIT_SAMPLES, 0)
}

/// [`trapping_certificate`] with an explicit audit size and seed.
pub fn trapping_certificate_with(
    game: &Game,
    y: &SubgameSpec,
    samples: usize,
    seed: u64,
) -> Result<TrappingCertificate> {
    let counts = game.strategy_counts();
    y.validate(counts)?;
    if !game.is_strict() {
        return Err(Error::Precondition("trapping certificates need a strict game".into()));
    }
    if y.num_profiles() == game.num_profiles() {
        return Err(Error::Precondition("the subgame is the whole game".into()));
    }
    let rg = build_response_graph(game);
    let nodes: Vec<u32> = y.profiles().map(|p| rg.node(&p)).collect();
    if let Some(arc) = escaping_arc(&rg, &nodes) {
        return Err(Error::NotAttracting {
            from: rg.profile(arc.tail).to_string(),
            to: rg.profile(arc.head).to_string(),
            player: arc.player,
        });
    }

    let n = counts.len();
    let strides = game.strides();
    let mut players = Vec::with_capacity(n);
    let mut m = f64::INFINITY;
    for p in 0..n {
        let inside = y.sets()[p].clone();
        let outside: Vec<usize> = (0..counts[p]).filter(|&s| !y.contains(p, s)).collect();
        // antiprofiles as profile indices with p playing 0, split by membership
        let (anti_in, anti_out): (Vec<usize>, Vec<usize>) = game
            .profiles()
            .enumerate()
            .filter(|(_, q)| q.strategies()[p] == 0)
            .map(|(k, q)| {
                let inside = q
                    .strategies()
                    .iter()
                    .enumerate()
                    .all(|(j, &s)| j == p || y.contains(j, s));
                (k, inside)
            })
            .fold((Vec::new(), Vec::new()), |(mut a, mut b), (k, inside)| {
                if inside { a.push(k) } else { b.push(k) }
                (a, b)
            });
        let diff = |s: usize, t: usize, k: usize| {
            game.payoff(k + s * strides[p], p) - game.payoff(k + t * strides[p], p)
        };
        let max_over = |s: usize, t: usize, set: &[usize]| {
            set.iter().map(|&k| diff(s, t, k)).reduce(f64::max)
        };
        let q = anti_out.len();
        let l = outside.len();
        let all: Vec<usize> = anti_in.iter().chain(&anti_out).copied().collect();
        let mut strategies = Vec::with_capacity(l);
        for &s in &outside {
            let alpha: Vec<f64> = inside
                .iter()
                .map(|&t| max_over(s, t, &anti_in).expect("subgame antiprofiles are nonempty"))
                .collect();
            if let Some(k) = alpha.iter().position(|&a| a >= 0.0) {
                return Err(Error::Certificate(format!(
                    "alpha for player {p}, outside {s}, inside {} is {} >= 0, \
                     contradicting the attracting hypothesis",
                    inside[k], alpha[k]
                )));
            }
            let beta: Vec<Option<f64>> =
                inside.iter().map(|&t| max_over(s, t, &anti_out)).collect();
            let gamma = outside
                .iter()
                .filter_map(|&t| max_over(s, t, &all))
                .fold(f64::NEG_INFINITY, f64::max);
            let alpha_s = alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let (lf, qf) = (l as f64, q as f64);
            let d = -lf * alpha_s - qf * alpha.iter().sum::<f64>()
                + qf * beta.iter().map(|b| b.unwrap_or(0.0).max(0.0)).sum::<f64>()
                + lf * gamma.max(0.0);
            let cap = 0.5 / q.max(1) as f64;
            let m_s = if d > 0.0 { cap.min(-alpha_s / (2.0 * d)) } else { cap };
            m = m.min(m_s);
            strategies.push(OutsideConstants { strategy: s, alpha, beta, alpha_s, gamma, d, m: m_s });
        }
        players.push(PlayerConstants { player: p, inside, outside, q, l, strategies });
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::Certificate(format!("radius {m} is not positive")));
    }

    let audit = audit(game, y, m, samples, seed);
    if audit.violations > 0 {
        return Err(Error::Certificate(format!(
            "{} of {} sampled points in the M = {m} neighborhood have a non-negative \
             outside velocity (max {}); the bound is wrong",
            audit.violations, audit.samples, audit.max_outside_velocity
        )));
    }
    Ok(TrappingCertificate { subgame: y.clone(), players, m, audit })
}

/// Random point of the open neighborhood `Y_M`: outside coordinates in
/// `(0, M)`, the remaining mass spread over inside strategies. A quarter of
/// the draws push outside coordinates close to `M`.
pub(crate) fn sample_neighborhood(
    counts: &[usize],
    y: &SubgameSpec,
    m: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let near_edge = rng.gen_bool(0.25);
    let mut x = Vec::with_capacity(counts.iter().sum());
    for (p, &c) in counts.iter().enumerate() {
        let outside: Vec<usize> = (0..c).filter(|&s| !y.contains(p, s)).collect();
        let mut d = vec![0.0; c];
        let out_mass = loop {
            let mut total = 0.0;
            for &s in &outside {
                let u: f64 = if near_edge {
                    1.0 - 1e-6 * rng.gen::<f64>()
                } else {
                    rng.gen_range(f64::EPSILON..1.0)
                };
                d[s] = m * u;
                total += d[s];
            }
            if total < 1.0 {
                break total;
            }
        };
        let weights: Vec<f64> = y.sets()[p]
            .iter()
            .map(|_| -(1.0 - rng.gen::<f64>()).ln())
            .collect();
        let wsum: f64 = weights.iter().sum();
        for (&s, w) in y.sets()[p].iter().zip(&weights) {
            d[s] = (1.0 - out_mass) * w / wsum;
        }
        x.extend(d);
    }
    x
}

fn audit(game: &Game, y: &SubgameSpec, m: f64, samples: usize, seed: u64) -> AuditSummary {
    let field = Field::new(game);
    let counts = game.strategy_counts();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = vec![0.0; field.dim()];
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x = sample_neighborhood(counts, y, m, &mut rng);
        field.eval(&x, &mut v);
        let mut bad = false;
        for (p, (&off, &c)) in field.offsets().iter().zip(counts).enumerate() {
            for s in (0..c).filter(|&s| !y.contains(p, s)) {
                worst = worst.max(v[off + s]);
                bad |= !(v[off + s] < 0.0);
            }
        }
        violations += usize::from(bad);
    }
    AuditSummary { samples, seed, violations, max_outside_velocity: worst }
}

/// Simulation check of a certified neighborhood: every sampled start must
/// shrink all outside coordinates at every step and end with little mass
/// outside the subgame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub samples: usize,
    pub t_max: f64,
    pub dt: f64,
    /// Largest outside coordinate at `t_max` over all samples.
    pub max_final_outside: f64,
    /// Samples where some outside coordinate grew during a step.
    pub non_monotone: usize,
}

impl ConvergenceReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.non_monotone == 0 && self.max_final_outside <= tol
    }
}

pub fn converge_check(
    game: &Game,
    y: &SubgameSpec,
    m: f64,
    samples: usize,
    t_max: f64,
    seed: u64,
) -> Result<ConvergenceReport> {
    y.validate(game.strategy_counts())?;
    let dt = 0.01;
    let flow = Flow::new(game, false);
    let counts = game.strategy_counts();
    let outside: Vec<usize> = flow
        .field()
        .offsets()
        .iter()
        .zip(counts)
        .enumerate()
        .flat_map(|(p, (&off, &c))| {
            (0..c).filter(move |&s| !y.contains(p, s)).map(move |s| off + s)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ConvergenceReport {
        samples,
        t_max,
        dt,
        max_final_outside: 0.0,
        non_monotone: 0,
    };
    for _ in 0..samples {
        let mut x = sample_neighborhood(counts, y, m, &mut rng);
        let mut prev: Vec<f64> = outside.iter().map(|&i| x[i]).collect();
        let mut grew = false;
        flow.advance_with(&mut x, t_max, dt, |_, state| {
            for (k, &i) in outside.iter().enumerate() {
                grew |= state[i] > prev[k];
                prev[k] = state[i];
            }
        })?;
        report.non_monotone += usize::from(grew);
        let last = outside.iter().map(|&i| x[i]).fold(0.0, f64::max);
        report.max_final_outside = report.max_final_outside.max(last);
    }
    Ok(report)
}
