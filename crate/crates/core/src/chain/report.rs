use std::fmt::Write;
use std::time::Instant;

use serde::Serialize;

use super::boxmap::{box_map, BoxMapGraph, BoxMapParams};
use super::cover::{build_cover_with_budget, BoxCover, DEFAULT_BOX_BUDGET};
use super::morse::{morse_decomposition, MorseDecomposition};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::response::{build_response_graph, content, scc_decomposition, ResponseGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Verdict {
    #[serde(rename = "holds")]
    Holds,
    #[serde(rename = "unresolved-at-resolution")]
    Unresolved,
    #[serde(rename = "violated")]
    Violated,
}

impl Verdict {
    /// The worst of several verdicts (violated over unresolved over holds).
    pub fn worst(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        verdicts.into_iter().max().unwrap_or(Verdict::Holds)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Unresolved => "unresolved-at-resolution",
            Verdict::Violated => "violated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolution {
    pub kappa: usize,
    pub t: f64,
    pub dt: f64,
    pub delta: f64,
    pub rho: f64,
    /// Jump size realized by box paths, `delta + rho`.
    pub epsilon: f64,
    pub samples_per_box: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorseSetSummary {
    pub id: usize,
    pub size: usize,
    pub sink: bool,
    /// Whether the set contains the vertex box of a profile in a sink component.
    pub has_sink_vertex: bool,
    pub boxes: Vec<u32>,
}

/// How one sink component `H` of the response graph shows up in the box map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinkCorrespondence {
    pub profiles: Vec<String>,
    pub vertex_boxes: Vec<u32>,
    /// The Morse set holding every vertex box of `H`, if they share one.
    pub morse_set: Option<usize>,
    /// All vertex boxes lie in one sink Morse set.
    pub existence: Verdict,
    /// Maximal subgames inside `H`.
    pub content: Vec<String>,
    /// Boxes whose closure meets the content.
    pub content_boxes: usize,
    pub content_boxes_in_morse: usize,
    pub content_containment: Verdict,
    pub morse_boxes: usize,
    /// Boxes of the Morse set within one box layer of the content.
    pub morse_boxes_within_layer: usize,
    /// The Morse set equals the content up to one box layer.
    pub conjecture2: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub box_map_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub game: Option<String>,
    pub shape: Vec<usize>,
    pub resolution: Resolution,
    pub num_boxes: u64,
    pub num_arcs: usize,
    pub transient_boxes: usize,
    pub morse_sets: Vec<MorseSetSummary>,
    pub sinks: Vec<usize>,
    pub sink_scc_count: usize,
    pub sink_morse_count: usize,
    pub correspondence: Vec<SinkCorrespondence>,
    /// Sink Morse sets and sink components correspond one to one.
    pub conjecture1: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl ChainReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON without timing, identical across runs with the same inputs.
    pub fn analytical_json(&self) -> String {
        let mut copy = self.clone();
        copy.timing = None;
        copy.to_json()
    }

    /// Worst verdict over every check in the report.
    pub fn overall(&self) -> Verdict {
        Verdict::worst(
            self.correspondence
                .iter()
                .flat_map(|c| [c.existence, c.content_containment, c.conjecture2])
                .chain([self.conjecture1]),
        )
    }

    pub fn any_violated(&self) -> bool {
        self.overall() == Verdict::Violated
    }
}

/// Box closures meeting a set of faces, and those within one layer of them.
struct FaceBoxes {
    touching: Vec<bool>,
    within_layer: Vec<bool>,
}

fn face_boxes(cover: &BoxCover, faces: &[Vec<Vec<usize>>]) -> FaceBoxes {
    let n = cover.num_boxes() as usize;
    let mut touching = vec![false; n];
    let mut within_layer = vec![false; n];
    for b in 0..n {
        for face in faces {
            let mass = cover.min_outside_mass(b as u64, face);
            touching[b] |= mass.iter().all(|&m| m == 0);
            within_layer[b] |= mass.iter().all(|&m| m <= 1);
        }
    }
    FaceBoxes { touching, within_layer }
}

fn vertex_boxes(cover: &BoxCover, rg: &ResponseGraph, nodes: &[u32]) -> Vec<u32> {
    let mut boxes: Vec<u32> = nodes
        .iter()
        .map(|&v| cover.vertex_box(rg.profile(v).strategies()) as u32)
        .collect();
    boxes.sort_unstable();
    boxes.dedup();
    boxes
}

/// Whether every box whose closure meets the content of the sink component
/// `nodes` lies in one sink Morse set that also holds the component's vertex
/// boxes. Unresolved when the vertex boxes do not share a sink Morse set.
pub fn content_containment_check(
    game: &Game,
    nodes: &[u32],
    bmg: &BoxMapGraph,
    md: &MorseDecomposition,
) -> Verdict {
    let rg = build_response_graph(game);
    correspondence(&rg, nodes, bmg, md).content_containment
}

fn correspondence(
    rg: &ResponseGraph,
    nodes: &[u32],
    bmg: &BoxMapGraph,
    md: &MorseDecomposition,
) -> SinkCorrespondence {
    let cover = &bmg.cover;
    let vboxes = vertex_boxes(cover, rg, nodes);
    let sets: Vec<Option<usize>> = vboxes.iter().map(|&b| md.morse_of_box(b)).collect();
    let morse_set = match sets.first() {
        Some(&Some(m)) if sets.iter().all(|&s| s == Some(m)) => Some(m),
        _ => None,
    };
    let existence = match morse_set {
        Some(m) if md.is_sink(m) => Verdict::Holds,
        _ => Verdict::Unresolved,
    };
    let c = content(rg, nodes);
    let faces: Vec<Vec<Vec<usize>>> = c.boxes.iter().map(|y| y.sets().to_vec()).collect();
    let fb = face_boxes(cover, &faces);
    let content_boxes: Vec<u32> = (0..fb.touching.len() as u32)
        .filter(|&b| fb.touching[b as usize])
        .collect();
    let in_morse = |b: u32| morse_set.is_some() && md.morse_of_box(b) == morse_set;
    let content_boxes_in_morse = content_boxes.iter().filter(|&&b| in_morse(b)).count();
    let (morse_boxes, within) = match morse_set {
        Some(m) => {
            let boxes = md.boxes(m);
            (boxes.len(), boxes.iter().filter(|&&b| fb.within_layer[b as usize]).count())
        }
        None => (0, 0),
    };
    let all_in = content_boxes_in_morse == content_boxes.len();
    let content_containment = match existence {
        Verdict::Holds if all_in => Verdict::Holds,
        Verdict::Holds => Verdict::Violated,
        _ => Verdict::Unresolved,
    };
    let conjecture2 = match existence {
        Verdict::Holds if !all_in => Verdict::Violated,
        Verdict::Holds if within == morse_boxes => Verdict::Holds,
        _ => Verdict::Unresolved,
    };
    SinkCorrespondence {
        profiles: nodes.iter().map(|&v| rg.profile(v).to_string()).collect(),
        vertex_boxes: vboxes,
        morse_set,
        existence,
        content: c.boxes.iter().map(ToString::to_string).collect(),
        content_boxes: content_boxes.len(),
        content_boxes_in_morse,
        content_containment,
        morse_boxes,
        morse_boxes_within_layer: within,
        conjecture2,
    }
}

/// Matches the sink components of the response graph with the sink Morse
/// sets of a box map of the same game.
pub fn sink_chain_estimate(game: &Game, bmg: &BoxMapGraph, md: &MorseDecomposition) -> ChainReport {
    let rg = build_response_graph(game);
    let scc = scc_decomposition(&rg);
    let sink_components = scc.sink_components();
    let correspondence: Vec<SinkCorrespondence> = sink_components
        .iter()
        .map(|&c| self::correspondence(&rg, scc.component(c), bmg, md))
        .collect();

    let sink_vertex_boxes: Vec<u32> = correspondence
        .iter()
        .flat_map(|c| c.vertex_boxes.iter().copied())
        .collect();
    let sinks = md.sinks();
    let morse_sets: Vec<MorseSetSummary> = (0..md.len())
        .map(|m| MorseSetSummary {
            id: m,
            size: md.boxes(m).len(),
            sink: md.is_sink(m),
            has_sink_vertex: sink_vertex_boxes.iter().any(|&b| md.morse_of_box(b) == Some(m)),
            boxes: md.boxes(m).to_vec(),
        })
        .collect();

    let orphan_sink = sinks.iter().any(|&m| !morse_sets[m].has_sink_vertex);
    let mut assigned: Vec<usize> = correspondence
        .iter()
        .filter(|c| c.existence == Verdict::Holds)
        .filter_map(|c| c.morse_set)
        .collect();
    assigned.sort_unstable();
    assigned.dedup();
    let conjecture1 = if orphan_sink {
        Verdict::Violated
    } else if sinks.len() == sink_components.len()
        && assigned.len() == sink_components.len()
        && correspondence.iter().all(|c| c.existence == Verdict::Holds)
    {
        Verdict::Holds
    } else {
        Verdict::Unresolved
    };

    let cover = &bmg.cover;
    let delta = cover.delta();
    ChainReport {
        game: game.name().map(str::to_string),
        shape: game.strategy_counts().to_vec(),
        resolution: Resolution {
            kappa: cover.kappa(),
            t: bmg.params.t,
            dt: bmg.params.dt,
            delta,
            rho: bmg.rho,
            epsilon: delta + bmg.rho,
            samples_per_box: bmg.samples_per_box,
            seed: bmg.params.seed,
        },
        num_boxes: cover.num_boxes(),
        num_arcs: bmg.num_arcs(),
        transient_boxes: md.transient_boxes().len(),
        morse_sets,
        sink_morse_count: sinks.len(),
        sinks,
        sink_scc_count: sink_components.len(),
        correspondence,
        conjecture1,
        timing: None,
    }
}

/// Everything in one call: cover, box map, Morse sets, report with timing.
pub fn chain_report(
    game: &Game,
    kappa: usize,
    params: BoxMapParams,
) -> Result<(ChainReport, BoxMapGraph, MorseDecomposition)> {
    chain_report_with_budget(game, kappa, params, DEFAULT_BOX_BUDGET)
}

pub fn chain_report_with_budget(
    game: &Game,
    kappa: usize,
    params: BoxMapParams,
    budget: usize,
) -> Result<(ChainReport, BoxMapGraph, MorseDecomposition)> {
    let start = Instant::now();
    let cover = build_cover_with_budget(game.strategy_counts(), kappa, budget)?;
    let bmg = box_map(game, &cover, params)?;
    let box_map_seconds = start.elapsed().as_secs_f64();
    let md = morse_decomposition(&bmg);
    let mut report = sink_chain_estimate(game, &bmg, &md);
    report.timing = Some(Timing {
        box_map_seconds,
        total_seconds: start.elapsed().as_secs_f64(),
    });
    Ok((report, bmg, md))
}

/// Flow time multiplier between refinement rounds.
pub const FLOW_TIME_FACTOR: f64 = 5.0;
/// Largest integration step used when refinement stretches the flow time.
pub const MAX_REFINED_DT: f64 = 0.1;

/// Rebuilds the box map at finer resolution until every sink component owns
/// its own sink Morse set.
///
/// At each `kappa` (starting from the given one and doubling up to
/// `max_kappa`) the flow time grows by [`FLOW_TIME_FACTOR`] from `params.t`
/// up to `max_t`. Near the boundary the replicator speed is of order
/// `x * gap`, so small payoff gaps need flow time of order `1 / gap` before
/// the padding stops bridging neighboring basins; a basin thinner than a box
/// needs a finer cover instead. The step grows with the time (capped at
/// [`MAX_REFINED_DT`]) so the cost per arc stays bounded.
///
/// Returns the first resolved report, or the last one tried. The report
/// records the resolution it was computed at.
pub fn refine_resolution(
    game: &Game,
    kappa: usize,
    params: BoxMapParams,
    max_t: f64,
    max_kappa: usize,
    budget: usize,
) -> Result<(ChainReport, BoxMapGraph, MorseDecomposition)> {
    if !(max_t.is_finite() && max_t >= params.t) {
        return Err(Error::Precondition(format!("max flow time {max_t} is below the flow time {}", params.t)));
    }
    if max_kappa < kappa {
        return Err(Error::Precondition(format!("max kappa {max_kappa} is below kappa {kappa}")));
    }
    let steps = params.t / params.dt;
    let mut k = kappa;
    loop {
        let mut p = params;
        loop {
            let out = chain_report_with_budget(game, k, p, budget)?;
            if out.0.conjecture1 == Verdict::Holds {
                return Ok(out);
            }
            let next = p.t * FLOW_TIME_FACTOR;
            if next > max_t * (1.0 + 1e-12) {
                if 2 * k > max_kappa {
                    return Ok(out);
                }
                break;
            }
            p.t = next;
            p.dt = (next / steps).min(MAX_REFINED_DT).max(params.dt);
        }
        k *= 2;
    }
}

/// Graphviz rendering of the Morse graph: one node per Morse set (sinks
/// filled grey), arcs for reachability not implied by a third set.
pub fn morse_dot(md: &MorseDecomposition, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", name.replace('"', "'")).unwrap();
    writeln!(out, "  node [shape=box];").unwrap();
    for m in 0..md.len() {
        let style = if md.is_sink(m) { ", style=filled, fillcolor=lightgrey" } else { "" };
        writeln!(out, "  \"M{m}\" [label=\"M{m} ({} boxes)\"{style}];", md.boxes(m).len()).unwrap();
    }
    for (a, b) in md.morse_graph() {
        writeln!(out, "  \"M{a}\" -> \"M{b}\";").unwrap();
    }
    out.push_str("}\n");
    out
}
