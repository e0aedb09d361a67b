use std::fmt::Write;

use super::{ResponseGraph, SccDecomposition};

/// Graphviz rendering. Nodes are named by their strategy indices joined with
/// `_`, arcs carry the deviating player as `label`, and each sink component is
/// drawn as a filled `cluster_k` subgraph.
pub fn to_dot(rg: &ResponseGraph, scc: &SccDecomposition, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", name.replace('"', "'")).unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    let mut in_sink = vec![false; rg.num_nodes()];
    for (k, c) in scc.sink_components().into_iter().enumerate() {
        writeln!(out, "  subgraph cluster_{k} {{").unwrap();
        writeln!(out, "    style=filled;").unwrap();
        writeln!(out, "    color=lightgrey;").unwrap();
        for &v in scc.component(c) {
            in_sink[v as usize] = true;
            writeln!(out, "    \"{}\";", rg.profile(v).node_id()).unwrap();
        }
        writeln!(out, "  }}").unwrap();
    }
    for v in 0..rg.num_nodes() as u32 {
        if !in_sink[v as usize] {
            writeln!(out, "  \"{}\";", rg.profile(v).node_id()).unwrap();
        }
    }
    for a in rg.arcs() {
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [label={}];",
            rg.profile(a.tail).node_id(),
            rg.profile(a.head).node_id(),
            a.player
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
