//! Response graphs: arcs between profiles that differ in one player's
//! strategy, pointing toward the weakly preferred one for that player.

mod catalog;
mod dot;
mod iso;

pub use catalog::{catalog, CATALOG_NAMES};
pub use dot::to_dot;
pub use iso::{find_isomorphism, graphs_isomorphic, realize_graph, Isomorphism};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{iterated_strict_dominance, random_game, Game, GameClass, MixedProfile, PureProfile, SubgameSpec};
use crate::graph::Condensation;

/// A response-graph arc `tail -> head` along which `player` deviates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Arc {
    pub tail: u32,
    pub head: u32,
    pub player: usize,
}

#[derive(Debug, Clone)]
pub struct ResponseGraph {
    counts: Vec<usize>,
    strict: bool,
    arcs: Vec<Arc>,
    adjacency: Vec<Vec<u32>>,
}

/// Arc `p -> q` exists iff `p`, `q` are `i`-comparable and `u_i(p) <= u_i(q)`;
/// ties produce arcs both ways.
pub fn build_response_graph(game: &Game) -> ResponseGraph {
    let mut arcs = Vec::new();
    for (p, q, i) in game.comparable_pairs() {
        let (up, uq) = (game.payoff(p, i), game.payoff(q, i));
        if up <= uq {
            arcs.push(Arc { tail: p as u32, head: q as u32, player: i });
        }
        if uq <= up {
            arcs.push(Arc { tail: q as u32, head: p as u32, player: i });
        }
    }
    ResponseGraph::from_arcs(game.strategy_counts().to_vec(), arcs, game.is_strict())
}

impl ResponseGraph {
    pub(crate) fn from_arcs(counts: Vec<usize>, mut arcs: Vec<Arc>, strict: bool) -> Self {
        arcs.sort_unstable();
        let n: usize = counts.iter().product();
        let mut adjacency = vec![Vec::new(); n];
        for a in &arcs {
            adjacency[a.tail as usize].push(a.head);
        }
        ResponseGraph { counts, strict, arcs, adjacency }
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    /// Whether the underlying game was strict.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }

    pub fn successors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn has_arc(&self, tail: u32, head: u32) -> bool {
        self.adjacency[tail as usize].contains(&head)
    }

    pub fn profile(&self, v: u32) -> PureProfile {
        let mut k = v as usize;
        let mut s = vec![0; self.counts.len()];
        for (slot, &c) in s.iter_mut().zip(&self.counts).rev() {
            *slot = k % c;
            k /= c;
        }
        PureProfile::new(s)
    }

    pub fn node(&self, p: &PureProfile) -> u32 {
        p.strategies()
            .iter()
            .zip(&self.counts)
            .fold(0usize, |acc, (&s, &c)| acc * c + s) as u32
    }

    pub fn node_set(&self, nodes: &[u32]) -> Vec<bool> {
        let mut set = vec![false; self.num_nodes()];
        for &v in nodes {
            set[v as usize] = true;
        }
        set
    }
}

/// Strongly connected components of a response graph.
#[derive(Debug, Clone)]
pub struct SccDecomposition {
    condensation: Condensation,
}

pub fn scc_decomposition(rg: &ResponseGraph) -> SccDecomposition {
    SccDecomposition {
        condensation: Condensation::new(rg.adjacency()),
    }
}

impl SccDecomposition {
    pub fn len(&self) -> usize {
        self.condensation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.condensation.is_empty()
    }

    pub fn component_of(&self, v: u32) -> usize {
        self.condensation.component_of[v as usize] as usize
    }

    /// Components in reverse topological order (sinks first).
    pub fn components(&self) -> &[Vec<u32>] {
        &self.condensation.components
    }

    pub fn component(&self, c: usize) -> &[u32] {
        &self.condensation.components[c]
    }

    /// Condensation arcs `(from, to)` between component ids.
    pub fn condensation_arcs(&self) -> Vec<(usize, usize)> {
        self.condensation
            .successors
            .iter()
            .enumerate()
            .flat_map(|(c, s)| s.iter().map(move |&d| (c, d as usize)))
            .collect()
    }

    pub fn is_sink(&self, c: usize) -> bool {
        self.condensation.is_sink(c)
    }

    pub fn sink_components(&self) -> Vec<usize> {
        self.condensation.sinks().collect()
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.len() == 1
    }
}

/// True iff no arc leaves `nodes`.
pub fn is_attracting(rg: &ResponseGraph, nodes: &[u32]) -> bool {
    escaping_arc(rg, nodes).is_none()
}

/// Some arc from inside `nodes` to outside, if one exists.
pub fn escaping_arc(rg: &ResponseGraph, nodes: &[u32]) -> Option<Arc> {
    let inside = rg.node_set(nodes);
    rg.arcs()
        .iter()
        .find(|a| inside[a.tail as usize] && !inside[a.head as usize])
        .copied()
}

/// The subgame whose profile set is exactly `nodes`, if `nodes` is a product set.
pub fn component_is_subgame(rg: &ResponseGraph, nodes: &[u32]) -> Option<SubgameSpec> {
    if nodes.is_empty() {
        return None;
    }
    let n = rg.strategy_counts().len();
    let mut sets = vec![Vec::new(); n];
    for &v in nodes {
        for (i, &s) in rg.profile(v).strategies().iter().enumerate() {
            sets[i].push(s);
        }
    }
    let spec = SubgameSpec::new(sets).ok()?;
    let inside = rg.node_set(nodes);
    let distinct = {
        let mut v = nodes.to_vec();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    if spec.num_profiles() == distinct && spec.profiles().all(|p| inside[rg.node(&p) as usize]) {
        Some(spec)
    } else {
        None
    }
}

/// The content of a node set: mixed profiles whose support product lies in it,
/// described by its maximal product boxes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentContent {
    pub nodes: Vec<u32>,
    pub boxes: Vec<SubgameSpec>,
}

pub fn content(rg: &ResponseGraph, nodes: &[u32]) -> ComponentContent {
    let inside = rg.node_set(nodes);
    let counts = rg.strategy_counts();
    let n = counts.len();
    let within = |masks: &[u64]| -> bool { product_within(rg, masks, &inside) };

    // grow boxes one strategy at a time from every member profile; a box that
    // no single-strategy extension keeps inside the set is maximal
    let mut visited = std::collections::HashSet::new();
    let mut maximal = std::collections::BTreeSet::new();
    let mut todo: Vec<Vec<u64>> = Vec::new();
    for &v in nodes {
        let p = rg.profile(v);
        todo.push(p.strategies().iter().map(|&s| 1u64 << s).collect());
    }
    while let Some(masks) = todo.pop() {
        if !visited.insert(masks.clone()) {
            continue;
        }
        let mut extended = false;
        for i in 0..n {
            for s in 0..counts[i] {
                if masks[i] & (1 << s) != 0 {
                    continue;
                }
                let mut next = masks.clone();
                next[i] |= 1 << s;
                if within(&next) {
                    extended = true;
                    if !visited.contains(&next) {
                        todo.push(next);
                    }
                }
            }
        }
        if !extended {
            maximal.insert(masks);
        }
    }
    let boxes = maximal
        .into_iter()
        .map(|masks| {
            SubgameSpec::new(
                masks
                    .iter()
                    .zip(counts)
                    .map(|(&m, &c)| (0..c).filter(|&s| m & (1 << s) != 0).collect())
                    .collect(),
            )
            .expect("boxes are nonempty")
        })
        .collect();
    let mut nodes = nodes.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    ComponentContent { nodes, boxes }
}

fn product_within(rg: &ResponseGraph, masks: &[u64], inside: &[bool]) -> bool {
    let sets: Vec<Vec<usize>> = masks
        .iter()
        .zip(rg.strategy_counts())
        .map(|(&m, &c)| (0..c).filter(|&s| m & (1 << s) != 0).collect())
        .collect();
    SubgameSpec::new(sets)
        .map(|y| y.profiles().all(|p| inside[rg.node(&p) as usize]))
        .unwrap_or(false)
}

impl ComponentContent {
    /// Whether `x` belongs to the content: the product of its per-player
    /// supports (at `tol`) lies inside the node set.
    pub fn contains(&self, x: &MixedProfile, tol: f64) -> bool {
        let Ok(support) = x.support_subgame(tol) else {
            return false;
        };
        self.boxes.iter().any(|b| support.is_subset_of(b))
    }
}

pub fn content_member(c: &ComponentContent, x: &MixedProfile, tol: f64) -> bool {
    c.contains(x, tol)
}

/// Graph sinks (nodes without outgoing arcs); for strict games these are
/// exactly the pure Nash equilibria.
pub fn pure_nash(rg: &ResponseGraph) -> Result<Vec<u32>> {
    if !rg.is_strict() {
        return Err(Error::Precondition(
            "pure Nash equilibria are only read off the graph for strict games".into(),
        ));
    }
    Ok((0..rg.num_nodes() as u32)
        .filter(|&v| rg.successors(v).is_empty())
        .collect())
}

/// A topological order of the nodes, or `None` if the graph has a cycle.
pub fn topological_order(rg: &ResponseGraph) -> Option<Vec<u32>> {
    let n = rg.num_nodes();
    let mut indegree = vec![0usize; n];
    for a in rg.arcs() {
        indegree[a.head as usize] += 1;
    }
    let mut ready: Vec<u32> = (0..n as u32).filter(|&v| indegree[v as usize] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        order.push(v);
        for &w in rg.successors(v) {
            indegree[w as usize] -= 1;
            if indegree[w as usize] == 0 {
                ready.push(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Acyclicity of the response graph; for strict games this decides whether the
/// game is preference-potential.
pub fn is_dag(rg: &ResponseGraph) -> bool {
    topological_order(rg).is_some()
}

/// Identical-interest game whose common payoff is each node's topological
/// rank. Its response graph equals `rg` whenever `rg` is a strict DAG.
pub fn potential_from_dag(rg: &ResponseGraph) -> Option<Game> {
    let order = topological_order(rg)?;
    let n = rg.strategy_counts().len();
    let mut rank = vec![0.0; rg.num_nodes()];
    for (r, &v) in order.iter().enumerate() {
        rank[v as usize] = r as f64;
    }
    let payoffs = rank.iter().flat_map(|&r| std::iter::repeat_n(r, n)).collect();
    Game::new(rg.strategy_counts().to_vec(), payoffs).ok()
}

/// Whether some 2x2 subgame of a two-player graph has the Coordination shape
/// (two sinks). Such a subgame cannot occur in a preference-zero-sum game.
pub fn has_coordination_subgame(rg: &ResponseGraph) -> bool {
    let counts = rg.strategy_counts();
    if counts.len() != 2 {
        return false;
    }
    let node = |i: usize, j: usize| (i * counts[1] + j) as u32;
    for i in 0..counts[0] {
        for k in i + 1..counts[0] {
            for j in 0..counts[1] {
                for l in j + 1..counts[1] {
                    let corners = [node(i, j), node(i, l), node(k, j), node(k, l)];
                    let sinks = corners
                        .iter()
                        .filter(|&&v| {
                            rg.successors(v).iter().all(|w| !corners.contains(w))
                        })
                        .count();
                    if sinks == 2 {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Outcome of checking that sink components of random strict 2xn games are subgames.
///
/// The statement only holds once dominated strategies are gone: a dominated
/// column can sit on a path that leaves and re-enters a cycle, which puts it
/// in the sink component without its whole row pair. `violations` therefore
/// counts failures on the game reduced by iterated strict dominance, while
/// `unreduced_violations` counts failures on the raw graph for reference.
#[derive(Debug, Clone, Serialize)]
pub struct SubgameCheckReport {
    pub n: usize,
    pub games: usize,
    pub violations: usize,
    pub unreduced_violations: usize,
    /// Payoff tensors of games violating the reduced check.
    pub counterexamples: Vec<Vec<f64>>,
}

impl SubgameCheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn sinks_are_subgames(game: &Game) -> bool {
    let rg = build_response_graph(game);
    let scc = scc_decomposition(&rg);
    scc.sink_components()
        .into_iter()
        .all(|c| component_is_subgame(&rg, scc.component(c)).is_some())
}

/// Draws `count` random strict 2xn games (seeds `seed + k`, non-strict draws
/// skipped) and checks that every sink component is a product set.
pub fn check_2xn_sink_subgames(n: usize, count: usize, seed: u64) -> SubgameCheckReport {
    let mut report = SubgameCheckReport {
        n,
        games: 0,
        violations: 0,
        unreduced_violations: 0,
        counterexamples: Vec::new(),
    };
    let mut k = 0u64;
    while report.games < count {
        let game = random_game(&[2, n], seed.wrapping_add(k), GameClass::Uniform)
            .expect("2xn shape is valid");
        k += 1;
        if !game.is_strict() {
            continue;
        }
        report.games += 1;
        if !sinks_are_subgames(&game) {
            report.unreduced_violations += 1;
        }
        let reduced = game
            .restrict(&iterated_strict_dominance(&game))
            .expect("survivors form a valid subgame")
            .game;
        if !sinks_are_subgames(&reduced) {
            report.violations += 1;
            report.counterexamples.push(game.payoffs().to_vec());
        }
    }
    report
}
