use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cover::BoxCover;
use crate::error::{Error, Result};
use crate::game::Game;
use crate::replicator::Flow;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxMapParams {
    /// Flow time per arc.
    pub t: f64,
    pub dt: f64,
    /// Random interior samples per box, on top of the corners and the center.
    pub random_samples: usize,
    /// Padding radius; `None` means the box diameter.
    pub rho: Option<f64>,
    pub seed: u64,
}

impl Default for BoxMapParams {
    fn default() -> Self {
        BoxMapParams { t: 1.0, dt: 0.01, random_samples: 8, rho: None, seed: 0 }
    }
}

/// Digraph on boxes: `b -> b'` when the time-`t` image of some sample of `b`
/// lies within `rho` of the bounding box of `b'`.
#[derive(Debug, Clone)]
pub struct BoxMapGraph {
    pub cover: BoxCover,
    pub params: BoxMapParams,
    pub rho: f64,
    /// Samples flowed per box.
    pub samples_per_box: usize,
    pub adjacency: Vec<Vec<u32>>,
}

impl BoxMapGraph {
    pub fn num_arcs(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn successors(&self, b: u32) -> &[u32] {
        &self.adjacency[b as usize]
    }

    pub fn has_arc(&self, from: u32, to: u32) -> bool {
        self.adjacency[from as usize].binary_search(&to).is_ok()
    }
}

/// Flows the samples of one box and returns `(sample, image)` pairs.
pub(crate) struct Sampler<'a> {
    cover: &'a BoxCover,
    flow: Flow,
    params: BoxMapParams,
}

impl<'a> Sampler<'a> {
    pub(crate) fn new(game: &Game, cover: &'a BoxCover, params: BoxMapParams) -> Result<Self> {
        if !(params.t > 0.0) {
            return Err(Error::Precondition(format!("flow time must be positive, got {}", params.t)));
        }
        if !(params.dt > 0.0) {
            return Err(Error::Precondition(format!("dt must be positive, got {}", params.dt)));
        }
        game.check_mixed(&crate::game::MixedProfile::uniform(cover.strategy_counts()))?;
        Ok(Sampler { cover, flow: Flow::new(game, false), params })
    }

    pub(crate) fn samples(&self, id: u64) -> Vec<Vec<f64>> {
        let mut points = self.cover.corners(id);
        points.push(self.cover.center(id));
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
        rng.set_stream(id);
        for _ in 0..self.params.random_samples {
            points.push(self.cover.sample(id, &mut rng));
        }
        points
    }

    pub(crate) fn image(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = x.to_vec();
        self.flow.advance(&mut y, self.params.t, self.params.dt)?;
        Ok(y)
    }

    pub(crate) fn flowed(&self, id: u64) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        self.samples(id)
            .into_iter()
            .map(|x| {
                let y = self.image(&x).map_err(|e| Error::BoxFlow { box_id: id, source: Box::new(e) })?;
                Ok((x, y))
            })
            .collect()
    }
}

pub fn box_map(game: &Game, cover: &BoxCover, params: BoxMapParams) -> Result<BoxMapGraph> {
    let sampler = Sampler::new(game, cover, params)?;
    let rho = params.rho.unwrap_or_else(|| cover.delta());
    let samples_per_box = sampler.samples(0).len();
    let adjacency: Vec<Vec<u32>> = (0..cover.num_boxes())
        .into_par_iter()
        .map(|id| {
            let mut out = Vec::new();
            let mut near = Vec::new();
            for (_, image) in sampler.flowed(id)? {
                cover.boxes_near(&image, rho, &mut near);
                out.extend(near.iter().map(|&b| b as u32));
            }
            out.sort_unstable();
            out.dedup();
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(BoxMapGraph {
        cover: cover.clone(),
        params,
        rho,
        samples_per_box,
        adjacency,
    })
}
