//! The replicator dynamic
//! `dx^p_s/dt = x^p_s (U_p(s; x_-p) - sum_t x^p_t U_p(t; x_-p))`,
//! its fixed-step RK4 flow, and numerical checks built on it.

mod certificate;
mod checks;
mod flow;

pub use certificate::{
    converge_check, trapping_certificate, trapping_certificate_with, AuditSummary,
    ConvergenceReport, OutsideConstants, PlayerConstants, TrappingCertificate,
    DEFAULT_AUDIT_SAMPLES,
};
pub use checks::{interior_divergence, kl_divergence, kl_drift, subgame_invariance_check};
pub use flow::{integrate, Flow, IntegratorConfig, Trajectory, UNDERFLOW_FLOOR};

use crate::error::Result;
use crate::game::{Game, MixedProfile};

/// Flattened payoff data for fast field evaluation. States are flat vectors
/// laid out player by player.
#[derive(Debug, Clone)]
pub struct Field {
    counts: Vec<usize>,
    offsets: Vec<usize>,
    strides: Vec<usize>,
    payoffs: Vec<f64>,
    // strategy of each player in each profile, row-major
    profiles: Vec<usize>,
    // two-player games: row player's matrix and the column player's matrix
    // transposed, both row-major
    bimatrix: Option<(Vec<f64>, Vec<f64>)>,
}

impl Field {
    pub fn new(game: &Game) -> Self {
        let counts = game.strategy_counts().to_vec();
        let mut offsets = Vec::with_capacity(counts.len());
        let mut at = 0;
        for &c in &counts {
            offsets.push(at);
            at += c;
        }
        let profiles = game
            .profiles()
            .flat_map(|p| p.strategies().to_vec())
            .collect();
        let bimatrix = (counts.len() == 2).then(|| {
            let (r, c) = (counts[0], counts[1]);
            let pay = game.payoffs();
            let a = (0..r * c).map(|k| pay[2 * k]).collect();
            let bt = (0..r * c).map(|k| pay[2 * ((k % r) * c + k / r) + 1]).collect();
            (a, bt)
        });
        Field {
            bimatrix,
            strides: game.strides(),
            offsets,
            payoffs: game.payoffs().to_vec(),
            profiles,
            counts,
        }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Length of a flat state.
    pub fn dim(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn num_players(&self) -> usize {
        self.counts.len()
    }

    /// `u[offset_p + s] = U_p(s; x_-p)`.
    pub fn utilities(&self, x: &[f64], u: &mut [f64]) {
        if let Some((a, bt)) = &self.bimatrix {
            let (r, c) = (self.counts[0], self.counts[1]);
            let (x0, x1) = x.split_at(r);
            let (u0, u1) = u.split_at_mut(r);
            for (s, row) in a.chunks_exact(c).enumerate() {
                u0[s] = row.iter().zip(x1).map(|(p, q)| p * q).sum();
            }
            for (t, col) in bt.chunks_exact(r).enumerate() {
                u1[t] = col.iter().zip(x0).map(|(p, q)| p * q).sum();
            }
            return;
        }
        let n = self.counts.len();
        u.fill(0.0);
        for (k, strategies) in self.profiles.chunks_exact(n).enumerate() {
            for p in 0..n {
                let mut w = 1.0;
                for (j, &s) in strategies.iter().enumerate() {
                    if j != p {
                        w *= x[self.offsets[j] + s];
                    }
                }
                u[self.offsets[p] + strategies[p]] += w * self.payoffs[k * n + p];
            }
        }
    }

    /// Writes the replicator velocity at `x` into `out`, using `u` as scratch.
    pub fn eval_with(&self, x: &[f64], out: &mut [f64], u: &mut [f64]) {
        if let Some((a, bt)) = &self.bimatrix {
            macro_rules! fixed {
                ($(($r:literal, $c:literal)),*) => {
                    match (self.counts[0], self.counts[1]) {
                        $(($r, $c) => return bimatrix_velocity::<$r, $c>(a, bt, x, out),)*
                        _ => {}
                    }
                };
            }
            fixed!((2, 2), (2, 3), (3, 2), (3, 3), (2, 4), (4, 2), (3, 4), (4, 3), (4, 4));
        }
        self.utilities(x, u);
        for (&off, &c) in self.offsets.iter().zip(&self.counts) {
            let (xs, us, os) = (&x[off..off + c], &u[off..off + c], &mut out[off..off + c]);
            let mut mean = 0.0;
            for s in 0..c {
                mean += xs[s] * us[s];
            }
            for s in 0..c {
                os[s] = xs[s] * (us[s] - mean);
            }
        }
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        let mut u = vec![0.0; x.len()];
        self.eval_with(x, out, &mut u);
    }

    /// The pairwise form: `x_s sum_t x_t sum_q x_q (u(s;q) - u(t;q))` over
    /// antiprofiles `q` of the other players, evaluated term by term.
    pub fn eval_pairwise(&self, x: &[f64], out: &mut [f64]) {
        let n = self.counts.len();
        for p in 0..n {
            let (off, c, stride) = (self.offsets[p], self.counts[p], self.strides[p]);
            // antiprofiles are represented by the profiles where p plays 0
            let anti: Vec<(usize, f64)> = self
                .profiles
                .chunks_exact(n)
                .enumerate()
                .filter(|(_, st)| st[p] == 0)
                .map(|(k, st)| {
                    let w = st
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != p)
                        .map(|(j, &s)| x[self.offsets[j] + s])
                        .product();
                    (k, w)
                })
                .collect();
            for s in 0..c {
                let mut total = 0.0;
                for t in 0..c {
                    let mut inner = 0.0;
                    for &(k, w) in &anti {
                        let us = self.payoffs[(k + s * stride) * n + p];
                        let ut = self.payoffs[(k + t * stride) * n + p];
                        inner += w * (us - ut);
                    }
                    total += x[off + t] * inner;
                }
                out[off + s] = x[off + s] * total;
            }
        }
    }
}

/// Two-player velocity with the shape known at compile time. Sums run in the
/// same order as the general path, so results are bit-identical.
#[inline]
fn bimatrix_velocity<const R: usize, const C: usize>(a: &[f64], bt: &[f64], x: &[f64], out: &mut [f64]) {
    let (a, bt, x, out) = (&a[..R * C], &bt[..R * C], &x[..R + C], &mut out[..R + C]);
    let mut u0 = [0.0; R];
    let mut u1 = [0.0; C];
    for s in 0..R {
        for t in 0..C {
            u0[s] += a[s * C + t] * x[R + t];
        }
    }
    for t in 0..C {
        for s in 0..R {
            u1[t] += bt[t * R + s] * x[s];
        }
    }
    let mut mean0 = 0.0;
    for s in 0..R {
        mean0 += x[s] * u0[s];
    }
    let mut mean1 = 0.0;
    for t in 0..C {
        mean1 += x[R + t] * u1[t];
    }
    for s in 0..R {
        out[s] = x[s] * (u0[s] - mean0);
    }
    for t in 0..C {
        out[R + t] = x[R + t] * (u1[t] - mean1);
    }
}

fn split(counts: &[usize], flat: &[f64]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(counts.len());
    let mut at = 0;
    for &c in counts {
        out.push(flat[at..at + c].to_vec());
        at += c;
    }
    out
}

/// Replicator velocity at `x`, one vector per player.
pub fn replicator_field(game: &Game, x: &MixedProfile) -> Result<Vec<Vec<f64>>> {
    game.check_mixed(x)?;
    let field = Field::new(game);
    let mut out = vec![0.0; field.dim()];
    field.eval(&x.to_flat(), &mut out);
    Ok(split(game.strategy_counts(), &out))
}

/// The same velocity computed through the pairwise payoff-difference form.
pub fn replicator_field_alt(game: &Game, x: &MixedProfile) -> Result<Vec<Vec<f64>>> {
    game.check_mixed(x)?;
    let field = Field::new(game);
    let mut out = vec![0.0; field.dim()];
    field.eval_pairwise(&x.to_flat(), &mut out);
    Ok(split(game.strategy_counts(), &out))
}

/// Infinity norm of a per-player tangent vector.
pub fn norm_inf(v: &[Vec<f64>]) -> f64 {
    v.iter().flatten().fold(0.0, |m, a| m.max(a.abs()))
}
