//! Isomorphism of response graphs that respects the product structure: a
//! node map must come from relabeling each player's strategies, optionally
//! combined with a permutation of players holding equally many strategies.

use itertools::Itertools;

use super::{build_response_graph, ResponseGraph};
use crate::game::{random_game, Game, GameClass};

/// `player_map[i]` is the player of the target graph that plays the role of
/// player `i`; `strategy_maps[i][s]` is the image of player `i`'s strategy `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isomorphism {
    pub player_map: Vec<usize>,
    pub strategy_maps: Vec<Vec<usize>>,
}

impl Isomorphism {
    /// Image of node `v` of `a` as a node of `b`.
    pub fn map_node(&self, a: &ResponseGraph, b: &ResponseGraph, v: u32) -> u32 {
        let p = a.profile(v);
        let mut q = vec![0; p.len()];
        for (i, &s) in p.strategies().iter().enumerate() {
            q[self.player_map[i]] = self.strategy_maps[i][s];
        }
        b.node(&crate::game::PureProfile::new(q))
    }
}

fn degree_signature(g: &ResponseGraph) -> Vec<(usize, usize)> {
    let mut indegree = vec![0; g.num_nodes()];
    for arc in g.arcs() {
        indegree[arc.head as usize] += 1;
    }
    (0..g.num_nodes())
        .map(|v| (g.successors(v as u32).len(), indegree[v]))
        .sorted()
        .collect()
}

/// Searches exhaustively over player and strategy relabelings. Intended for
/// desk-scale graphs (up to 16 nodes).
pub fn find_isomorphism(a: &ResponseGraph, b: &ResponseGraph) -> Option<Isomorphism> {
    let ca = a.strategy_counts();
    let cb = b.strategy_counts();
    if ca.len() != cb.len()
        || a.num_nodes() != b.num_nodes()
        || a.arcs().len() != b.arcs().len()
        || degree_signature(a) != degree_signature(b)
    {
        return None;
    }
    let n = ca.len();
    let b_arcs: std::collections::HashSet<(u32, u32)> =
        b.arcs().iter().map(|x| (x.tail, x.head)).collect();

    for player_map in (0..n).permutations(n) {
        if (0..n).any(|i| ca[i] != cb[player_map[i]]) {
            continue;
        }
        let per_player = ca.iter().map(|&c| (0..c).permutations(c).collect::<Vec<_>>());
        for strategy_maps in per_player.multi_cartesian_product() {
            let iso = Isomorphism {
                player_map: player_map.clone(),
                strategy_maps,
            };
            if a
                .arcs()
                .iter()
                .all(|x| b_arcs.contains(&(iso.map_node(a, b, x.tail), iso.map_node(a, b, x.head))))
            {
                return Some(iso);
            }
        }
    }
    None
}

pub fn graphs_isomorphic(a: &ResponseGraph, b: &ResponseGraph) -> bool {
    find_isomorphism(a, b).is_some()
}

/// First strict random game of `class` (seeds `seed`, `seed + 1`, ...) whose
/// response graph is isomorphic to `target`, within `attempts` draws.
pub fn realize_graph(
    target: &ResponseGraph,
    class: GameClass,
    attempts: usize,
    seed: u64,
) -> Option<Game> {
    let counts = target.strategy_counts();
    (0..attempts as u64).find_map(|k| {
        let game = random_game(counts, seed.wrapping_add(k), class).ok()?;
        if !game.is_strict() {
            return None;
        }
        graphs_isomorphic(&build_response_graph(&game), target).then_some(game)
    })
}
