use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::boxmap::{BoxMapParams, Sampler};
use super::cover::{box_count, build_cover_with_budget, DEFAULT_BOX_BUDGET};
use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile};

/// Explicit `(epsilon, t)`-chain `x = points[0], ..., points[n] = y`: each
/// point flows for `t` and then jumps to the next one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainWitness {
    pub strategy_counts: Vec<usize>,
    pub epsilon: f64,
    pub t: f64,
    pub kappa: usize,
    pub points: Vec<Vec<f64>>,
    /// Flow time before each jump.
    pub times: Vec<f64>,
    /// Infinity-norm size of each jump; `jumps[i]` follows `points[i]`.
    pub jumps: Vec<f64>,
}

impl ChainWitness {
    pub fn num_jumps(&self) -> usize {
        self.jumps.len()
    }

    pub fn max_jump(&self) -> f64 {
        self.jumps.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

/// Searches for an `(epsilon, t)`-chain from `x` to `y`.
///
/// Boxes are built at `kappa = ceil(4 / epsilon)` so that a box and its
/// padding fit in half a jump. A breadth-first search runs over box samples:
/// a sample may follow another when it lies within `epsilon` of the other's
/// time-`t` image. `max_steps` caps the samples expanded. `Ok(None)` means
/// no chain was found at this resolution.
pub fn epsilon_chain_witness(
    game: &Game,
    x: &MixedProfile,
    y: &MixedProfile,
    epsilon: f64,
    t: f64,
    max_steps: usize,
) -> Result<Option<ChainWitness>> {
    epsilon_chain_witness_with_budget(game, x, y, epsilon, t, max_steps, DEFAULT_BOX_BUDGET)
}

pub fn epsilon_chain_witness_with_budget(
    game: &Game,
    x: &MixedProfile,
    y: &MixedProfile,
    epsilon: f64,
    t: f64,
    max_steps: usize,
    budget: usize,
) -> Result<Option<ChainWitness>> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Precondition(format!("flow time must be positive, got {t}")));
    }
    game.check_mixed(x)?;
    game.check_mixed(y)?;
    let counts = game.strategy_counts();
    let kappa = (4.0 / epsilon).ceil() as usize;
    let cover = match build_cover_with_budget(counts, kappa, budget) {
        Err(Error::Budget { boxes, budget, suggested_kappa }) => {
            return Err(Error::ResolutionBudget {
                boxes,
                budget,
                suggested_epsilon: 4.0 / suggested_kappa as f64,
            })
        }
        other => other?,
    };
    debug_assert!(box_count(counts, kappa) <= u32::MAX as u128);
    let params = BoxMapParams { t, ..BoxMapParams::default() };
    let sampler = Sampler::new(game, &cover, params)?;
    let (x, y) = (x.to_flat(), y.to_flat());

    let finish = |points: Vec<Vec<f64>>, images: Vec<Vec<f64>>| {
        let jumps: Vec<f64> =
            images.iter().zip(points.iter().skip(1)).map(|(a, b)| sup_distance(a, b)).collect();
        debug_assert!(jumps.iter().all(|&j| j < epsilon));
        ChainWitness {
            strategy_counts: counts.to_vec(),
            epsilon,
            t,
            kappa,
            times: vec![t; jumps.len()],
            jumps,
            points,
        }
    };

    let x_image = sampler.image(&x)?;
    if sup_distance(&x_image, &y) < epsilon {
        return Ok(Some(finish(vec![x, y], vec![x_image])));
    }

    // node = (box, sample index); parent links rebuild the chain
    type Node = (u64, usize);
    type Flowed = HashMap<u64, Vec<(Vec<f64>, Vec<f64>)>>;
    let mut flowed: Flowed = HashMap::new();
    let mut parent: HashMap<Node, Option<Node>> = HashMap::new();
    let mut queue: VecDeque<Node> = VecDeque::new();
    let mut near = Vec::new();

    let mut enqueue_from = |from: Option<Node>,
                            image: &[f64],
                            flowed: &mut Flowed,
                            parent: &mut HashMap<Node, Option<Node>>,
                            queue: &mut VecDeque<Node>|
     -> Result<()> {
        cover.boxes_near(image, epsilon, &mut near);
        for &b in near.iter() {
            if let Entry::Vacant(e) = flowed.entry(b) {
                e.insert(sampler.flowed(b)?);
            }
            for (i, (s, _)) in flowed[&b].iter().enumerate() {
                if sup_distance(s, image) < epsilon && !parent.contains_key(&(b, i)) {
                    parent.insert((b, i), from);
                    queue.push_back((b, i));
                }
            }
        }
        Ok(())
    };

    enqueue_from(None, &x_image, &mut flowed, &mut parent, &mut queue)?;
    let mut steps = 0;
    while let Some(node) = queue.pop_front() {
        if steps >= max_steps {
            break;
        }
        steps += 1;
        let image = flowed[&node.0][node.1].1.clone();
        if sup_distance(&image, &y) < epsilon {
            let mut path = vec![node];
            let mut at = node;
            while let Some(Some(prev)) = parent.get(&at) {
                path.push(*prev);
                at = *prev;
            }
            path.reverse();
            let mut points = vec![x];
            let mut images = vec![x_image];
            for (b, i) in path {
                let (s, img) = &flowed[&b][i];
                points.push(s.clone());
                images.push(img.clone());
            }
            points.push(y);
            return Ok(Some(finish(points, images)));
        }
        enqueue_from(Some(node), &image, &mut flowed, &mut parent, &mut queue)?;
    }
    Ok(None)
}
