//! Box covers of the strategy space.
//!
//! Each simplex with `c = d + 1` strategies is cut into the Freudenthal (Kuhn)
//! grid of denominator `kappa`. In suffix-sum coordinates
//! `z_j = kappa * (x_j + ... + x_d)`, `j = 1..=d`, the simplex is the region
//! `kappa >= z_1 >= ... >= z_d >= 0`; a cell is a nonincreasing integer base
//! `a` together with an ordering `pi` of the fractional parts, and its
//! vertices are `a, a + e_pi(0), a + e_pi(0) + e_pi(1), ...`. There are
//! `kappa^d` cells, all with infinity-norm diameter `1/kappa` in `x`.
//! A box is one cell per player.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

pub const DEFAULT_BOX_BUDGET: usize = 5_000_000;

const NO_CELL: u32 = u32::MAX;

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// All permutations of `0..d` in lexicographic order.
fn permutations(d: usize) -> Vec<Vec<u8>> {
    use itertools::Itertools;
    (0..d as u8).permutations(d).collect()
}

// Lexicographic rank of a permutation (Lehmer code).
fn perm_rank(perm: &[u8]) -> usize {
    let d = perm.len();
    let mut rank = 0;
    for i in 0..d {
        let smaller = perm[i + 1..].iter().filter(|&&p| p < perm[i]).count();
        rank += smaller * factorial(d - 1 - i);
    }
    rank
}

/// Freudenthal grid on one simplex.
#[derive(Debug, Clone)]
pub struct SimplexGrid {
    strategies: usize,
    kappa: usize,
    // per cell: d+1 lattice vertices of `strategies` integers summing to kappa
    vertices: Vec<u32>,
    // per cell: integer bounding box, lo then hi
    bounds: Vec<u32>,
    perms: Vec<Vec<u8>>,
    // dense map from (base, perm rank) to cell id
    lookup: Vec<u32>,
}

impl SimplexGrid {
    pub fn new(strategies: usize, kappa: usize) -> Self {
        assert!(strategies >= 1 && kappa >= 1);
        let d = strategies - 1;
        let perms = permutations(d);
        let bases = kappa.pow(d as u32);
        let mut lookup = vec![NO_CELL; bases * perms.len()];
        let mut vertices = Vec::new();
        let mut bounds = Vec::new();
        let mut cells = 0u32;
        let mut base = vec![0usize; d];
        for code in 0..bases {
            // base digits, coordinate j at weight kappa^j
            let mut r = code;
            for a in base.iter_mut() {
                *a = r % kappa;
                r /= kappa;
            }
            if base.windows(2).any(|w| w[0] < w[1]) {
                continue;
            }
            for (rank, perm) in perms.iter().enumerate() {
                if !Self::consistent(&base, perm) {
                    continue;
                }
                lookup[code * perms.len() + rank] = cells;
                cells += 1;
                let mut z: Vec<usize> = base.clone();
                let start = vertices.len();
                Self::push_lattice(&z, kappa, &mut vertices);
                for &k in perm {
                    z[k as usize] += 1;
                    Self::push_lattice(&z, kappa, &mut vertices);
                }
                let verts = &vertices[start..];
                for s in 0..strategies {
                    bounds.push(verts.iter().skip(s).step_by(strategies).copied().min().unwrap());
                }
                for s in 0..strategies {
                    bounds.push(verts.iter().skip(s).step_by(strategies).copied().max().unwrap());
                }
            }
        }
        debug_assert_eq!(cells as usize, kappa.pow(d as u32));
        SimplexGrid { strategies, kappa, vertices, bounds, perms, lookup }
    }

    // equal base entries must keep their fractional order, so the
    // earlier coordinate has to come first in the permutation
    fn consistent(base: &[usize], perm: &[u8]) -> bool {
        let mut pos = vec![0; perm.len()];
        for (i, &k) in perm.iter().enumerate() {
            pos[k as usize] = i;
        }
        (0..base.len().saturating_sub(1)).all(|j| base[j] != base[j + 1] || pos[j] < pos[j + 1])
    }

    fn push_lattice(z: &[usize], kappa: usize, out: &mut Vec<u32>) {
        let d = z.len();
        if d == 0 {
            out.push(kappa as u32);
            return;
        }
        out.push((kappa - z[0]) as u32);
        for j in 0..d - 1 {
            out.push((z[j] - z[j + 1]) as u32);
        }
        out.push(z[d - 1] as u32);
    }

    pub fn strategies(&self) -> usize {
        self.strategies
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn num_cells(&self) -> usize {
        self.vertices.len() / (self.strategies * self.strategies)
    }

    /// Lattice vertices of a cell: `strategies` nonnegative integers summing
    /// to `kappa` each; divide by `kappa` for coordinates.
    pub fn lattice_vertices(&self, cell: u32) -> impl Iterator<Item = &[u32]> {
        let c = self.strategies;
        let start = cell as usize * c * c;
        self.vertices[start..start + c * c].chunks_exact(c)
    }

    pub fn vertex_points(&self, cell: u32) -> Vec<Vec<f64>> {
        let k = self.kappa as f64;
        self.lattice_vertices(cell)
            .map(|v| v.iter().map(|&a| a as f64 / k).collect())
            .collect()
    }

    /// Integer bounding box `(lo, hi)` in lattice units.
    pub fn lattice_bounds(&self, cell: u32) -> (&[u32], &[u32]) {
        let c = self.strategies;
        let start = cell as usize * 2 * c;
        (&self.bounds[start..start + c], &self.bounds[start + c..start + 2 * c])
    }

    fn suffix_coords(&self, x: &[f64]) -> Vec<f64> {
        let d = self.strategies - 1;
        let k = self.kappa as f64;
        let mut z = vec![0.0; d];
        let mut acc = 0.0;
        for j in (0..d).rev() {
            acc += x[j + 1];
            z[j] = (acc * k).clamp(0.0, k);
        }
        for j in 1..d {
            z[j] = z[j].min(z[j - 1]);
        }
        z
    }

    fn key(&self, base: &[usize], perm: &[u8]) -> usize {
        let code = base.iter().rev().fold(0, |acc, &a| acc * self.kappa + a);
        code * self.perms.len() + perm_rank(perm)
    }

    /// The cell containing `x` (a point of this simplex); points on shared
    /// faces go to one of their cells deterministically.
    pub fn locate(&self, x: &[f64]) -> u32 {
        let d = self.strategies - 1;
        if d == 0 {
            return 0;
        }
        let z = self.suffix_coords(x);
        let base: Vec<usize> = z
            .iter()
            .map(|&v| (v.floor() as usize).min(self.kappa - 1))
            .collect();
        let frac: Vec<f64> = z.iter().zip(&base).map(|(v, &a)| v - a as f64).collect();
        let mut perm: Vec<u8> = (0..d as u8).collect();
        perm.sort_by(|&i, &j| {
            frac[j as usize]
                .partial_cmp(&frac[i as usize])
                .unwrap()
                .then(i.cmp(&j))
        });
        let cell = self.lookup[self.key(&base, &perm)];
        debug_assert_ne!(cell, NO_CELL);
        cell
    }

    /// Whether the closed cell contains `x`, up to `tol` in suffix coordinates.
    pub fn contains(&self, cell: u32, x: &[f64], tol: f64) -> bool {
        let d = self.strategies - 1;
        if d == 0 {
            return true;
        }
        let verts: Vec<&[u32]> = self.lattice_vertices(cell).collect();
        // recover base and order from the vertex walk
        let zs = |v: &[u32]| -> Vec<i64> {
            (0..d).map(|j| v[j + 1..].iter().map(|&a| a as i64).sum()).collect()
        };
        let base = zs(verts[0]);
        let mut order = Vec::with_capacity(d);
        for w in verts.windows(2) {
            let (z0, z1) = (zs(w[0]), zs(w[1]));
            order.push((0..d).find(|&j| z1[j] != z0[j]).unwrap());
        }
        let z = self.suffix_coords(x);
        let f: Vec<f64> = z.iter().zip(&base).map(|(v, &a)| v - a as f64).collect();
        f.iter().all(|&v| v >= -tol && v <= 1.0 + tol)
            && order.windows(2).all(|w| f[w[0]] + tol >= f[w[1]])
    }

    /// Cells whose bounding box meets the closed infinity-norm ball of radius
    /// `rho` around `x`.
    pub fn cells_near(&self, x: &[f64], rho: f64, out: &mut Vec<u32>) {
        out.clear();
        let c = self.strategies;
        let d = c - 1;
        if d == 0 {
            out.push(0);
            return;
        }
        let k = self.kappa as f64;
        let mut lo = vec![0usize; d];
        let mut hi = vec![0usize; d];
        let mut acc = 0.0;
        for j in (0..d).rev() {
            acc += x[j + 1];
            // a suffix sum moves by at most rho per coordinate on the shorter side
            let width = (c - 1 - j).min(j + 1) as f64 * rho;
            let zl = ((acc - width) * k).clamp(0.0, k);
            let zh = ((acc + width) * k).clamp(0.0, k);
            lo[j] = (zl.floor() as usize).min(self.kappa - 1);
            hi[j] = (zh.floor() as usize).min(self.kappa - 1);
        }
        let slack = 1e-12;
        let mut base = lo.clone();
        loop {
            if base.windows(2).all(|w| w[0] >= w[1]) {
                let code = base.iter().rev().fold(0, |acc, &a| acc * self.kappa + a);
                for rank in 0..self.perms.len() {
                    let cell = self.lookup[code * self.perms.len() + rank];
                    if cell == NO_CELL {
                        continue;
                    }
                    let (blo, bhi) = self.lattice_bounds(cell);
                    let hit = (0..c).all(|s| {
                        blo[s] as f64 / k <= x[s] + rho + slack
                            && bhi[s] as f64 / k >= x[s] - rho - slack
                    });
                    if hit {
                        out.push(cell);
                    }
                }
            }
            // odometer over the base ranges
            let mut j = 0;
            loop {
                if j == d {
                    out.sort_unstable();
                    return;
                }
                if base[j] < hi[j] {
                    base[j] += 1;
                    break;
                }
                base[j] = lo[j];
                j += 1;
            }
        }
    }

    /// Uniformly random point of a cell.
    pub fn sample<R: Rng>(&self, cell: u32, rng: &mut R, out: &mut [f64]) {
        let c = self.strategies;
        let weights: Vec<f64> = (0..c).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let total: f64 = weights.iter().sum();
        out.fill(0.0);
        let k = self.kappa as f64;
        for (v, w) in self.lattice_vertices(cell).zip(&weights) {
            for s in 0..c {
                out[s] += w / total * v[s] as f64 / k;
            }
        }
    }

    pub fn center(&self, cell: u32, out: &mut [f64]) {
        let c = self.strategies;
        out.fill(0.0);
        let scale = 1.0 / (c as f64 * self.kappa as f64);
        for v in self.lattice_vertices(cell) {
            for s in 0..c {
                out[s] += v[s] as f64 * scale;
            }
        }
    }
}

/// Product cover of the strategy space; box ids are mixed-radix over the
/// per-player cell ids, player 0 slowest.
#[derive(Debug, Clone)]
pub struct BoxCover {
    counts: Vec<usize>,
    kappa: usize,
    grids: Vec<Arc<SimplexGrid>>,
    offsets: Vec<usize>,
    strides: Vec<u64>,
    total: u64,
}

/// Number of boxes a cover of this shape would have.
pub fn box_count(counts: &[usize], kappa: usize) -> u128 {
    counts
        .iter()
        .map(|&c| (kappa as u128).saturating_pow(c as u32 - 1))
        .fold(1u128, |a, b| a.saturating_mul(b))
}

pub fn build_cover(counts: &[usize], kappa: usize) -> Result<BoxCover> {
    build_cover_with_budget(counts, kappa, DEFAULT_BOX_BUDGET)
}

pub fn build_cover_with_budget(counts: &[usize], kappa: usize, budget: usize) -> Result<BoxCover> {
    if kappa == 0 {
        return Err(Error::Precondition("kappa must be at least 1".into()));
    }
    if counts.is_empty() || counts.contains(&0) {
        return Err(Error::Shape(format!("invalid strategy counts {counts:?}")));
    }
    let boxes = box_count(counts, kappa);
    let limit = (budget as u128).min(u32::MAX as u128);
    if boxes > limit {
        let dims: u32 = counts.iter().map(|&c| c as u32 - 1).sum();
        let mut suggested = (limit as f64).powf(1.0 / dims as f64).floor() as usize;
        while suggested > 1 && box_count(counts, suggested) > limit {
            suggested -= 1;
        }
        return Err(Error::Budget { boxes, budget, suggested_kappa: suggested.max(1) });
    }
    let mut cache: Vec<(usize, Arc<SimplexGrid>)> = Vec::new();
    let grids: Vec<Arc<SimplexGrid>> = counts
        .iter()
        .map(|&c| {
            if let Some((_, g)) = cache.iter().find(|(k, _)| *k == c) {
                return g.clone();
            }
            let g = Arc::new(SimplexGrid::new(c, kappa));
            cache.push((c, g.clone()));
            g
        })
        .collect();
    let mut offsets = Vec::with_capacity(counts.len());
    let mut at = 0;
    for &c in counts {
        offsets.push(at);
        at += c;
    }
    let mut strides = vec![1u64; counts.len()];
    for p in (0..counts.len().saturating_sub(1)).rev() {
        strides[p] = strides[p + 1] * grids[p + 1].num_cells() as u64;
    }
    Ok(BoxCover {
        counts: counts.to_vec(),
        kappa,
        grids,
        offsets,
        strides,
        total: boxes as u64,
    })
}

impl BoxCover {
    pub fn strategy_counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Infinity-norm diameter of every box (and of its bounding box).
    pub fn delta(&self) -> f64 {
        1.0 / self.kappa as f64
    }

    pub fn num_boxes(&self) -> u64 {
        self.total
    }

    pub fn grid(&self, player: usize) -> &SimplexGrid {
        &self.grids[player]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn dim(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn cells(&self, id: u64) -> Vec<u32> {
        self.strides
            .iter()
            .zip(&self.grids)
            .map(|(&s, g)| ((id / s) % g.num_cells() as u64) as u32)
            .collect()
    }

    pub fn box_id(&self, cells: &[u32]) -> u64 {
        cells.iter().zip(&self.strides).map(|(&c, &s)| c as u64 * s).sum()
    }

    fn player_slice<'a>(&self, x: &'a [f64], p: usize) -> &'a [f64] {
        &x[self.offsets[p]..self.offsets[p] + self.counts[p]]
    }

    /// The box containing the flat state `x`.
    pub fn locate(&self, x: &[f64]) -> u64 {
        (0..self.counts.len())
            .map(|p| self.grids[p].locate(self.player_slice(x, p)) as u64 * self.strides[p])
            .sum()
    }

    pub fn contains(&self, id: u64, x: &[f64], tol: f64) -> bool {
        self.cells(id)
            .iter()
            .enumerate()
            .all(|(p, &c)| self.grids[p].contains(c, self.player_slice(x, p), tol))
    }

    /// Boxes whose bounding box meets the closed infinity-norm ball of radius
    /// `rho` around `x`, sorted.
    pub fn boxes_near(&self, x: &[f64], rho: f64, out: &mut Vec<u64>) {
        out.clear();
        out.push(0);
        let mut cells = Vec::new();
        let mut next = Vec::new();
        for p in 0..self.counts.len() {
            self.grids[p].cells_near(self.player_slice(x, p), rho, &mut cells);
            next.clear();
            for &id in out.iter() {
                for &c in &cells {
                    next.push(id + c as u64 * self.strides[p]);
                }
            }
            std::mem::swap(out, &mut next);
        }
        out.sort_unstable();
    }

    /// All corner points of a box (products of cell vertices).
    pub fn corners(&self, id: u64) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::with_capacity(self.dim())];
        for (p, &c) in self.cells(id).iter().enumerate() {
            let verts = self.grids[p].vertex_points(c);
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    verts.iter().map(move |v| {
                        let mut x = prefix.clone();
                        x.extend_from_slice(v);
                        x
                    })
                })
                .collect();
        }
        points
    }

    pub fn center(&self, id: u64) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for (p, &c) in self.cells(id).iter().enumerate() {
            let (o, n) = (self.offsets[p], self.counts[p]);
            self.grids[p].center(c, &mut x[o..o + n]);
        }
        x
    }

    pub fn sample<R: Rng>(&self, id: u64, rng: &mut R) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for (p, &c) in self.cells(id).iter().enumerate() {
            let (o, n) = (self.offsets[p], self.counts[p]);
            self.grids[p].sample(c, rng, &mut x[o..o + n]);
        }
        x
    }

    /// Box containing the pure profile with these strategies.
    pub fn vertex_box(&self, strategies: &[usize]) -> u64 {
        let mut x = vec![0.0; self.dim()];
        for (p, &s) in strategies.iter().enumerate() {
            x[self.offsets[p] + s] = 1.0;
        }
        self.locate(&x)
    }

    /// Per player, the smallest lattice mass (in units of `1/kappa`) that any
    /// vertex of the box's cell puts outside `inside[p]`.
    pub fn min_outside_mass(&self, id: u64, inside: &[Vec<usize>]) -> Vec<u32> {
        self.cells(id)
            .iter()
            .enumerate()
            .map(|(p, &c)| {
                self.grids[p]
                    .lattice_vertices(c)
                    .map(|v| {
                        (0..v.len())
                            .filter(|s| !inside[p].contains(s))
                            .map(|s| v[s])
                            .sum::<u32>()
                    })
                    .min()
                    .unwrap()
            })
            .collect()
    }
}
