use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::Field;
use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Step size.
    pub dt: f64,
    /// Integration horizon.
    pub t_max: f64,
    /// Per-player sum drift that triggers renormalization.
    pub renorm_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { dt: 0.01, t_max: 10.0, renorm_tol: 1e-9 }
    }
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_max: f64) -> Result<Self> {
        let cfg = IntegratorConfig { dt, t_max, ..Default::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Precondition(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::Precondition(format!(
                "t_max must be non-negative, got {}",
                self.t_max
            )));
        }
        Ok(())
    }

    /// Step lengths covering `[0, t_max]`: whole steps of `dt`, then one
    /// shorter step if `dt` does not divide the horizon.
    fn steps(&self) -> (usize, f64) {
        let ratio = self.t_max / self.dt;
        let whole = (ratio + 1e-9).floor();
        let rest = self.t_max - whole * self.dt;
        (whole as usize, if rest > 1e-12 * self.dt.max(1.0) { rest } else { 0.0 })
    }
}

/// Coordinates below this are set to exactly zero after each step. Faces of
/// the simplex are invariant, and subnormal arithmetic near attracting
/// vertices is two orders of magnitude slower than normal arithmetic.
pub const UNDERFLOW_FLOOR: f64 = 1e-250;

/// Fixed-step RK4 integrator for one game, forward or time-reversed.
#[derive(Debug, Clone)]
pub struct Flow {
    field: Field,
    sign: f64,
    renorm_tol: f64,
}

/// Scratch space for [`Flow::step`].
#[derive(Debug, Clone)]
struct Stages {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
    u: Vec<f64>,
}

impl Stages {
    fn new(dim: usize) -> Self {
        Stages {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
            u: vec![0.0; dim],
        }
    }
}

impl Flow {
    pub fn new(game: &Game, reversed: bool) -> Self {
        Self::from_field(Field::new(game), reversed)
    }

    pub fn from_field(field: Field, reversed: bool) -> Self {
        Flow {
            field,
            sign: if reversed { -1.0 } else { 1.0 },
            renorm_tol: 1e-9,
        }
    }

    pub fn with_renorm_tol(mut self, tol: f64) -> Self {
        self.renorm_tol = tol;
        self
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    fn stage(&self, x: &[f64], out: &mut [f64], u: &mut [f64]) {
        self.field.eval_with(x, out, u);
        if self.sign < 0.0 {
            out.iter_mut().for_each(|v| *v = -*v);
        }
    }

    fn step(&self, x: &mut [f64], h: f64, st: &mut Stages) {
        let n = x.len();
        let [k1, k2, k3, k4] = &mut st.k;
        let (k1, k2, k3, k4, tmp) = (&mut k1[..n], &mut k2[..n], &mut k3[..n], &mut k4[..n], &mut st.tmp[..n]);
        self.stage(x, k1, &mut st.u);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        self.stage(tmp, k2, &mut st.u);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        self.stage(tmp, k3, &mut st.u);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        self.stage(tmp, k4, &mut st.u);
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    fn finish_step(&self, x: &mut [f64], t: f64) -> Result<()> {
        for (&off, &c) in self.field.offsets().iter().zip(self.field.counts()) {
            let xs = &mut x[off..off + c];
            let mut sum = 0.0;
            let mut negative = false;
            for v in xs.iter_mut() {
                if v.abs() < UNDERFLOW_FLOOR {
                    *v = 0.0;
                }
                sum += *v;
                negative |= *v < 0.0;
            }
            // NaN and infinities propagate into the sum
            if !sum.is_finite() {
                return Err(Error::NonFinite { time: t });
            }
            if (sum - 1.0).abs() > self.renorm_tol || negative {
                xs.iter_mut().for_each(|v| *v = v.max(0.0));
                let sum: f64 = xs.iter().sum();
                if !(sum > 0.0) {
                    return Err(Error::NonFinite { time: t });
                }
                xs.iter_mut().for_each(|v| *v /= sum);
            }
        }
        Ok(())
    }

    /// Advances the flat state `x` by time `t` in steps of `dt` without
    /// recording intermediate samples.
    pub fn advance(&self, x: &mut [f64], t: f64, dt: f64) -> Result<()> {
        let cfg = IntegratorConfig { dt, t_max: t, renorm_tol: self.renorm_tol };
        cfg.validate()?;
        let (whole, rest) = cfg.steps();
        let mut st = Stages::new(x.len());
        for k in 0..whole {
            self.step(x, dt, &mut st);
            self.finish_step(x, (k + 1) as f64 * dt)?;
        }
        if rest > 0.0 {
            self.step(x, rest, &mut st);
            self.finish_step(x, t)?;
        }
        Ok(())
    }

    /// Like [`Flow::advance`], calling `visit(time, state)` after every step.
    pub fn advance_with(
        &self,
        x: &mut [f64],
        t: f64,
        dt: f64,
        mut visit: impl FnMut(f64, &[f64]),
    ) -> Result<()> {
        let cfg = IntegratorConfig { dt, t_max: t, renorm_tol: self.renorm_tol };
        cfg.validate()?;
        let (whole, rest) = cfg.steps();
        let mut st = Stages::new(x.len());
        for k in 0..whole {
            let time = (k + 1) as f64 * dt;
            self.step(x, dt, &mut st);
            self.finish_step(x, time)?;
            visit(time, x);
        }
        if rest > 0.0 {
            self.step(x, rest, &mut st);
            self.finish_step(x, t)?;
            visit(t, x);
        }
        Ok(())
    }
}

/// Sampled orbit: `times[k]` and the flat state after `k` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    counts: Vec<usize>,
    times: Vec<f64>,
    states: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn flat_state(&self, k: usize) -> &[f64] {
        let d: usize = self.counts.iter().sum();
        &self.states[k * d..(k + 1) * d]
    }

    pub fn state(&self, k: usize) -> MixedProfile {
        MixedProfile::from_flat(&self.counts, self.flat_state(k))
            .expect("integrator keeps states on the simplex")
    }

    pub fn last(&self) -> MixedProfile {
        self.state(self.len() - 1)
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.states.chunks_exact(self.counts.iter().sum())
    }

    /// CSV with header `t,<player>_<strategy>,...` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for (p, &c) in self.counts.iter().enumerate() {
            for s in 0..c {
                write!(out, ",{p}_{s}").unwrap();
            }
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(self.states()) {
            write!(out, "{t:.16e}").unwrap();
            for v in x {
                write!(out, ",{v:.16e}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Integrates from `x0` over `[0, cfg.t_max]`, recording every step. With
/// `reversed` the field is negated.
pub fn integrate(
    game: &Game,
    x0: &MixedProfile,
    cfg: &IntegratorConfig,
    reversed: bool,
) -> Result<Trajectory> {
    game.check_mixed(x0)?;
    cfg.validate()?;
    let flow = Flow::new(game, reversed).with_renorm_tol(cfg.renorm_tol);
    let mut x = x0.to_flat();
    let (whole, rest) = cfg.steps();
    let n = whole + usize::from(rest > 0.0) + 1;
    let mut times = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n * x.len());
    times.push(0.0);
    states.extend_from_slice(&x);
    flow.advance_with(&mut x, cfg.t_max, cfg.dt, |t, state| {
        times.push(t);
        states.extend_from_slice(state);
    })?;
    Ok(Trajectory {
        counts: game.strategy_counts().to_vec(),
        times,
        states,
    })
}
