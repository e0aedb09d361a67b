use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::game::{Game, MixedProfile, SubgameSpec};
use crate::replicator::{trapping_certificate, Flow};
use crate::response::{build_response_graph, catalog, scc_decomposition};

fn run(game: &Game, kappa: usize) -> (BoxMapGraph, MorseDecomposition) {
    let cover = build_cover(game.strategy_counts(), kappa).unwrap();
    let bmg = box_map(game, &cover, BoxMapParams::default()).unwrap();
    let md = morse_decomposition(&bmg);
    (bmg, md)
}

fn flat(d: &[&[f64]]) -> MixedProfile {
    MixedProfile::new(d.iter().map(|v| v.to_vec()).collect()).unwrap()
}

fn dirichlet(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

#[test]
fn cell_counts_are_kappa_to_the_dimension() {
    for strategies in 1..=4 {
        for kappa in 1..=6 {
            let g = SimplexGrid::new(strategies, kappa);
            assert_eq!(g.num_cells(), kappa.pow(strategies as u32 - 1), "{strategies} {kappa}");
        }
    }
}

#[test]
fn cells_have_lattice_corners_summing_to_kappa() {
    let g = SimplexGrid::new(3, 5);
    let mut seen = BTreeSet::new();
    for c in 0..g.num_cells() as u32 {
        let verts: Vec<Vec<u32>> = g.lattice_vertices(c).map(<[u32]>::to_vec).collect();
        assert_eq!(verts.len(), 3);
        for v in &verts {
            assert_eq!(v.iter().sum::<u32>(), 5);
        }
        let key: BTreeSet<Vec<u32>> = verts.into_iter().collect();
        assert!(seen.insert(key), "duplicate cell");
    }
}

#[test]
fn locate_agrees_with_contains() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (strategies, kappa) in [(2, 7), (3, 6), (4, 4)] {
        let g = SimplexGrid::new(strategies, kappa);
        for _ in 0..2000 {
            let x = dirichlet(&mut rng, strategies);
            let c = g.locate(&x);
            assert!(g.contains(c, &x, 1e-12), "{x:?} not in its cell {c}");
            let hits = (0..g.num_cells() as u32).filter(|&d| g.contains(d, &x, 0.0)).count();
            assert_eq!(hits, 1, "interior point {x:?} in {hits} cells");
        }
        let mut near = Vec::new();
        for c in 0..g.num_cells() as u32 {
            let mut x = vec![0.0; strategies];
            g.sample(c, &mut rng, &mut x);
            assert_eq!(g.locate(&x), c);
            g.center(c, &mut x);
            assert_eq!(g.locate(&x), c);
            g.cells_near(&x, 0.0, &mut near);
            assert!(near.contains(&c));
        }
    }
}

#[test]
fn cover_sizes() {
    assert_eq!(build_cover(&[2, 2], 16).unwrap().num_boxes(), 256);
    assert_eq!(build_cover(&[2, 2], 1).unwrap().num_boxes(), 1);
    assert_eq!(build_cover(&[3, 3], 8).unwrap().num_boxes(), 4096);
    assert_eq!(build_cover(&[2, 2, 2], 4).unwrap().num_boxes(), 64);
    let c = build_cover(&[3, 3], 8).unwrap();
    assert_eq!(c.delta(), 0.125);
    assert!(matches!(build_cover(&[2, 2], 0), Err(Error::Precondition(_))));
}

#[test]
fn budget_error_suggests_kappa() {
    match build_cover_with_budget(&[3, 3], 100, 1000) {
        Err(Error::Budget { boxes, budget, suggested_kappa }) => {
            assert_eq!(boxes, 100_000_000);
            assert_eq!(budget, 1000);
            assert_eq!(suggested_kappa, 5);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(build_cover_with_budget(&[3, 3], 5, 625).is_ok());
}

#[test]
fn box_ids_round_trip() {
    let cover = build_cover(&[2, 3, 2], 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for id in 0..cover.num_boxes() {
        assert_eq!(cover.box_id(&cover.cells(id)), id);
        let x = cover.sample(id, &mut rng);
        assert_eq!(cover.locate(&x), id);
        assert!(cover.contains(id, &cover.center(id), 0.0));
        for corner in cover.corners(id) {
            assert!(cover.contains(id, &corner, 1e-12));
        }
    }
}

#[test]
fn boxes_near_is_conservative() {
    let cover = build_cover(&[3, 2], 6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut near = Vec::new();
    for _ in 0..300 {
        let mut x = dirichlet(&mut rng, 3);
        x.extend(dirichlet(&mut rng, 2));
        let rho = rng.gen_range(0.0..0.3);
        cover.boxes_near(&x, rho, &mut near);
        // any point within rho must land in a listed box
        for _ in 0..20 {
            let mut z = x.clone();
            let mut a: Vec<f64> = (0..3).map(|i| z[i] + rng.gen_range(-rho..=rho)).collect();
            let mut b: Vec<f64> = (3..5).map(|i| z[i] + rng.gen_range(-rho..=rho)).collect();
            if a.iter().chain(&b).any(|&v| v < 0.0) {
                continue;
            }
            let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
            a.iter_mut().for_each(|v| *v /= sa);
            b.iter_mut().for_each(|v| *v /= sb);
            z = a.into_iter().chain(b).collect();
            if z.iter().zip(&x).any(|(u, v)| (u - v).abs() > rho) {
                continue;
            }
            assert!(near.contains(&cover.locate(&z)));
        }
    }
}

#[test]
fn vertex_boxes_have_self_arcs() {
    for name in ["co", "dd", "mp"] {
        let g = catalog(name).unwrap();
        let (bmg, _) = run(&g, 16);
        for p in g.profiles() {
            let b = bmg.cover.vertex_box(p.strategies()) as u32;
            assert!(bmg.has_arc(b, b), "{name} {p}");
        }
    }
}

#[test]
fn matching_pennies_boxes_all_have_successors() {
    let (bmg, md) = run(&catalog("mp").unwrap(), 16);
    assert!((0..256).all(|b| !bmg.successors(b).is_empty()));
    assert_eq!(md.len(), 1);
    assert_eq!(md.sinks(), vec![0]);
    assert_eq!(md.boxes(0).len(), 256);
    assert!(md.transient_boxes().is_empty());
}

#[test]
fn coordination_has_two_vertex_sinks() {
    let g = catalog("co").unwrap();
    let (bmg, md) = run(&g, 16);
    let sinks = md.sinks();
    assert_eq!(sinks.len(), 2);
    let mut vertex_sinks: Vec<usize> = [[0, 0], [1, 1]]
        .iter()
        .map(|s| md.morse_of_box(bmg.cover.vertex_box(s) as u32).unwrap())
        .collect();
    vertex_sinks.sort_unstable();
    assert_eq!(vertex_sinks, sinks);
    // the mixed equilibrium is recurrent but never in a sink
    let mut near = Vec::new();
    bmg.cover.boxes_near(&[0.5, 0.5, 0.5, 0.5], 0.0, &mut near);
    for &b in &near {
        assert!(md.morse_of_box(b as u32).is_none_or(|m| !md.is_sink(m)));
    }
    // off-diagonal vertices are saddles, not sinks
    for s in [[0, 1], [1, 0]] {
        let m = md.morse_of_box(bmg.cover.vertex_box(&s) as u32).unwrap();
        assert!(!md.is_sink(m));
    }
}

#[test]
fn dominance_games_have_one_vertex_sink() {
    for (name, ne) in [("dd", [0, 0]), ("sd", [0, 0])] {
        let g = catalog(name).unwrap();
        let (bmg, md) = run(&g, 16);
        assert_eq!(md.sinks().len(), 1, "{name}");
        let m = md.sinks()[0];
        assert_eq!(md.morse_of_box(bmg.cover.vertex_box(&ne) as u32), Some(m), "{name}");
        assert!(md.boxes(m).len() <= 4, "{name}: {}", md.boxes(m).len());
    }
}

#[test]
fn morse_sets_are_disjoint_and_condensation_is_acyclic() {
    let (bmg, md) = run(&catalog("co").unwrap(), 12);
    let mut seen = vec![false; bmg.cover.num_boxes() as usize];
    for m in 0..md.len() {
        for &b in md.boxes(m) {
            assert!(!seen[b as usize]);
            seen[b as usize] = true;
            assert_eq!(md.morse_of_box(b), Some(m));
        }
    }
    for &b in &md.transient_boxes() {
        assert!(!seen[b as usize]);
        assert_eq!(md.morse_of_box(b), None);
    }
    let arcs = md.morse_graph();
    for &(a, b) in &arcs {
        assert!(!md.is_sink(a));
        assert!(!arcs.contains(&(b, a)));
    }
}

#[test]
fn sampled_images_land_in_adjacent_boxes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for name in ["mp", "co", "sd"] {
        let g = catalog(name).unwrap();
        let (bmg, _) = run(&g, 16);
        let flow = Flow::new(&g, false);
        for _ in 0..1000 {
            let b = rng.gen_range(0..bmg.cover.num_boxes());
            let mut x = bmg.cover.sample(b, &mut rng);
            flow.advance(&mut x, 1.0, 0.01).unwrap();
            let target = bmg.cover.locate(&x) as u32;
            assert!(bmg.has_arc(b as u32, target), "{name}: box {b} -> {target}");
        }
    }
}

#[test]
fn coordination_arcs_near_a_sink_vertex_do_not_move_away() {
    let g = catalog("co").unwrap();
    let kappa = 16u32;
    let (bmg, _) = run(&g, kappa as usize);
    let cover = &bmg.cover;
    // infinity distance (lattice units) from the box to the vertex (s, s)
    let dist = |b: u32, s: usize| -> u32 {
        cover
            .cells(b as u64)
            .iter()
            .enumerate()
            .map(|(p, &c)| kappa - cover.grid(p).lattice_bounds(c).1[s])
            .max()
            .unwrap()
    };
    for s in 0..2 {
        let vertex = cover.vertex_box(&[s, s]) as u32;
        let adjacent: Vec<u32> =
            (0..cover.num_boxes() as u32).filter(|&b| b != vertex && dist(b, s) <= 1).collect();
        assert_eq!(adjacent.len(), 3);
        for b in adjacent {
            for &succ in bmg.successors(b) {
                assert!(dist(succ, s) <= dist(b, s), "{b} -> {succ}");
            }
        }
    }
}

#[test]
fn refinement_keeps_sinks_apart() {
    for name in ["co", "cmmp", "dd", "sd"] {
        let g = catalog(name).unwrap();
        let rg = build_response_graph(&g);
        let scc = scc_decomposition(&rg);
        let coarse = run(&g, 8);
        let fine = run(&g, 16);
        let assign = |(bmg, md): &(BoxMapGraph, MorseDecomposition)| -> Vec<Option<usize>> {
            scc.sink_components()
                .iter()
                .map(|&c| md.morse_of_box(bmg.cover.vertex_box(rg.profile(scc.component(c)[0]).strategies()) as u32))
                .collect()
        };
        let (a, b) = (assign(&coarse), assign(&fine));
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                if a[i].is_some() && a[i] != a[j] {
                    assert_ne!(b[i], b[j], "{name}: sinks {i} and {j} merged on refinement");
                }
            }
        }
    }
}

#[test]
fn certified_attractors_are_never_left() {
    let kappa = 64;
    for (name, sets) in [("dd", vec![vec![0], vec![0]]), ("co", vec![vec![0], vec![0]]), ("co", vec![vec![1], vec![1]])] {
        let g = catalog(name).unwrap();
        let y = SubgameSpec::new(sets).unwrap();
        let cert = trapping_certificate(&g, &y).unwrap();
        let m = (cert.m * kappa as f64).floor() as u32;
        assert!(m >= 2, "{name}: layer does not fit");
        let (bmg, _) = run(&g, kappa);
        let cover = &bmg.cover;
        let outside_bound = |b: u32, lo: bool| -> u32 {
            let mut worst = 0;
            for (p, &c) in cover.cells(b as u64).iter().enumerate() {
                let (l, h) = cover.grid(p).lattice_bounds(c);
                for s in 0..cover.strategy_counts()[p] {
                    if !y.contains(p, s) {
                        worst = worst.max(if lo { l[s] } else { h[s] });
                    }
                }
            }
            worst
        };
        let n = cover.num_boxes() as u32;
        let mut todo: Vec<u32> = (0..n).filter(|&b| outside_bound(b, false) <= m).collect();
        assert!(!todo.is_empty());
        let mut seen = vec![false; n as usize];
        while let Some(b) = todo.pop() {
            if std::mem::replace(&mut seen[b as usize], true) {
                continue;
            }
            assert!(outside_bound(b, true) <= m, "{name}: box {b} outside the trapping region");
            todo.extend_from_slice(bmg.successors(b));
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let g = catalog("sd").unwrap();
    let (a, _, _) = chain_report(&g, 12, BoxMapParams { seed: 4, ..Default::default() }).unwrap();
    let (b, _, _) = chain_report(&g, 12, BoxMapParams { seed: 4, ..Default::default() }).unwrap();
    assert!(a.timing.is_some());
    assert_eq!(a.analytical_json(), b.analytical_json());
    assert!(!a.analytical_json().contains("timing"));
    assert!(a.to_json().contains("timing"));
}

#[test]
fn matching_pennies_report() {
    let g = catalog("mp").unwrap();
    let (bmg, md) = run(&g, 16);
    let r = sink_chain_estimate(&g, &bmg, &md);
    assert_eq!((r.sink_scc_count, r.sink_morse_count), (1, 1));
    assert_eq!(r.conjecture1, Verdict::Holds);
    let c = &r.correspondence[0];
    assert_eq!(c.existence, Verdict::Holds);
    assert_eq!(c.content_boxes, 256);
    assert_eq!(c.content_containment, Verdict::Holds);
    assert_eq!(c.conjecture2, Verdict::Holds);
    assert_eq!(r.overall(), Verdict::Holds);
    assert_eq!(r.resolution.epsilon, 0.125);
    let all: Vec<u32> = (0..4).collect();
    assert_eq!(content_containment_check(&g, &all, &bmg, &md), Verdict::Holds);
}

#[test]
fn coordination_report() {
    let g = catalog("co").unwrap();
    let (bmg, md) = run(&g, 16);
    let r = sink_chain_estimate(&g, &bmg, &md);
    assert_eq!((r.sink_scc_count, r.sink_morse_count), (2, 2));
    assert_eq!(r.conjecture1, Verdict::Holds);
    for c in &r.correspondence {
        assert_eq!(c.content_boxes, 1);
        assert_eq!(c.content_containment, Verdict::Holds);
        assert_eq!(c.conjecture2, Verdict::Holds);
    }
    let dot = morse_dot(&md, "co");
    assert_eq!(dot.matches("fillcolor=lightgrey").count(), 2);
}

#[test]
fn longer_flow_time_separates_a_shallow_basin() {
    // identical interest; the (1,1) basin is small and its edges are slow
    let u = [0.94, 0.24, 0.26, 0.39];
    let g = Game::new(vec![2, 2], u.iter().flat_map(|&v| [v, v]).collect()).unwrap();
    let (r, _, _) = chain_report(&g, 16, BoxMapParams::default()).unwrap();
    assert_eq!(r.sink_scc_count, 2);
    assert_ne!(r.conjecture1, Verdict::Holds);

    let (r, bmg, md) = refine_resolution(&g, 16, BoxMapParams::default(), 100.0, 16, DEFAULT_BOX_BUDGET).unwrap();
    assert_eq!(r.conjecture1, Verdict::Holds);
    assert!(r.resolution.t > 1.0 && r.resolution.t <= 100.0);
    assert!(r.resolution.dt <= MAX_REFINED_DT);
    let mut sets: Vec<usize> =
        [[0, 0], [1, 1]].iter().map(|s| md.morse_of_box(bmg.cover.vertex_box(s) as u32).unwrap()).collect();
    sets.sort_unstable();
    assert_eq!(sets, md.sinks());

    // stops at the caps rather than overshooting them
    let (r, _, _) = refine_resolution(&g, 16, BoxMapParams::default(), 4.0, 31, DEFAULT_BOX_BUDGET).unwrap();
    assert_eq!((r.resolution.kappa, r.resolution.t), (16, 1.0));
    assert!(refine_resolution(&g, 16, BoxMapParams::default(), 0.5, 16, DEFAULT_BOX_BUDGET).is_err());
    assert!(refine_resolution(&g, 16, BoxMapParams::default(), 4.0, 8, DEFAULT_BOX_BUDGET).is_err());

    // already resolved games are not refined
    let co = catalog("co").unwrap();
    let (r, _, _) = refine_resolution(&co, 16, BoxMapParams::default(), 100.0, 64, DEFAULT_BOX_BUDGET).unwrap();
    assert_eq!((r.resolution.kappa, r.resolution.t), (16, 1.0));
}

#[test]
fn split_vertex_boxes_are_unresolved() {
    // check a sink component of one game against the box map of another
    let co = catalog("co").unwrap();
    let mp = catalog("mp").unwrap();
    let (bmg, md) = run(&co, 16);
    let all: Vec<u32> = (0..4).collect();
    assert_eq!(content_containment_check(&mp, &all, &bmg, &md), Verdict::Unresolved);
    assert_eq!(serde_json::to_string(&Verdict::Unresolved).unwrap(), "\"unresolved-at-resolution\"");
    assert_eq!(Verdict::worst([Verdict::Holds, Verdict::Unresolved]), Verdict::Unresolved);
    assert_eq!(Verdict::worst([Verdict::Violated, Verdict::Unresolved]), Verdict::Violated);
}

#[test]
fn orphan_sink_morse_set_is_a_violation() {
    // a dominance game checked against the box map of coordination: the
    // sink at (1,1) holds no sink vertex of the dominance game
    let dd = catalog("dd").unwrap();
    let co = catalog("co").unwrap();
    let (bmg, md) = run(&co, 16);
    let r = sink_chain_estimate(&dd, &bmg, &md);
    assert_eq!(r.conjecture1, Verdict::Violated);
    assert!(r.any_violated());
}

#[test]
fn witness_follows_a_response_arc() {
    let g = catalog("mp").unwrap();
    let x = flat(&[&[1.0, 0.0], &[1.0, 0.0]]);
    let y = flat(&[&[1.0, 0.0], &[0.0, 1.0]]);
    let w = epsilon_chain_witness(&g, &x, &y, 0.05, 1.0, 200_000).unwrap().expect("witness");
    assert_eq!(w.kappa, 80);
    assert_eq!(w.points.first().unwrap(), &x.to_flat());
    assert_eq!(w.points.last().unwrap(), &y.to_flat());
    assert_eq!(w.points.len(), w.jumps.len() + 1);
    assert!(w.times.iter().all(|&t| t >= 1.0));
    // recheck every jump with a fresh flow
    let flow = Flow::new(&g, false);
    for (i, jump) in w.jumps.iter().enumerate() {
        let mut z = w.points[i].clone();
        flow.advance(&mut z, w.times[i], 0.01).unwrap();
        let d = z.iter().zip(&w.points[i + 1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(d < 0.05);
        assert!((d - jump).abs() < 1e-12);
    }
}

#[test]
fn witness_from_a_fixed_point_to_itself_is_trivial() {
    let g = catalog("co").unwrap();
    let x = flat(&[&[1.0, 0.0], &[1.0, 0.0]]);
    let w = epsilon_chain_witness(&g, &x, &x, 0.1, 1.0, 10).unwrap().unwrap();
    assert_eq!(w.num_jumps(), 1);
    assert_eq!(w.max_jump(), 0.0);
}

#[test]
fn no_witness_out_of_an_attractor() {
    let g = catalog("co").unwrap();
    let x = flat(&[&[1.0, 0.0], &[1.0, 0.0]]);
    let y = flat(&[&[0.0, 1.0], &[0.0, 1.0]]);
    assert!(epsilon_chain_witness(&g, &x, &y, 0.01, 1.0, 1_000_000).unwrap().is_none());
}

#[test]
fn witness_rejects_bad_inputs() {
    let g = catalog("co").unwrap();
    let x = MixedProfile::uniform(&[2, 2]);
    assert!(matches!(epsilon_chain_witness(&g, &x, &x, 0.0, 1.0, 1), Err(Error::Precondition(_))));
    assert!(matches!(epsilon_chain_witness(&g, &x, &x, 0.1, -1.0, 1), Err(Error::Precondition(_))));
    match epsilon_chain_witness_with_budget(&g, &x, &x, 0.001, 1.0, 1, 10_000) {
        Err(Error::ResolutionBudget { suggested_epsilon, .. }) => assert_eq!(suggested_epsilon, 0.04),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn small_scan_has_no_violations() {
    let r = conjecture_scan(&[2, 2], 30, 1, 8, 1.0).unwrap();
    assert_eq!(r.scanned + r.skipped_non_strict, 30);
    assert_eq!(r.conjecture1.total(), r.scanned);
    assert_eq!(r.conjecture1.violated, 0);
    assert!(r.findings.is_empty());
    assert!(r.to_json().contains("\"unresolved-at-resolution\""));
}
