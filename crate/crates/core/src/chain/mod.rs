//! Box covers of the strategy space and the digraph induced by the time-`t`
//! flow on them. Strongly connected pieces of that digraph (Morse sets) are
//! outer approximations of chain components at the chosen resolution.

mod boxmap;
mod cover;
mod morse;
mod report;
mod scan;
mod witness;

#[cfg(test)]
mod tests;

pub use boxmap::{box_map, BoxMapGraph, BoxMapParams};
pub use cover::{box_count, build_cover, build_cover_with_budget, BoxCover, SimplexGrid, DEFAULT_BOX_BUDGET};
pub use morse::{morse_decomposition, MorseDecomposition};
pub use report::{
    chain_report, chain_report_with_budget, content_containment_check, morse_dot, refine_resolution,
    sink_chain_estimate, ChainReport, MorseSetSummary, Resolution, SinkCorrespondence, Timing, Verdict,
    FLOW_TIME_FACTOR, MAX_REFINED_DT,
};
pub use scan::{conjecture_scan, ScanFinding, ScanReport, VerdictCounts};
pub use witness::{epsilon_chain_witness, epsilon_chain_witness_with_budget, ChainWitness};
