use serde::Serialize;

use super::boxmap::{box_map, BoxMapParams};
use super::cover::build_cover;
use super::morse::morse_decomposition;
use super::report::{sink_chain_estimate, Verdict};
use crate::error::Result;
use crate::game::{random_game, save_game, GameClass};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub holds: usize,
    pub violated: usize,
    #[serde(rename = "unresolved-at-resolution")]
    pub unresolved: usize,
}

impl VerdictCounts {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Holds => self.holds += 1,
            Verdict::Violated => self.violated += 1,
            Verdict::Unresolved => self.unresolved += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.holds + self.violated + self.unresolved
    }
}

/// A scanned game with at least one violated verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanFinding {
    pub game_seed: u64,
    pub conjecture1: Verdict,
    pub conjecture2: Verdict,
    pub content_containment: Verdict,
    /// The game in file format, ready to be written out.
    pub game: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub shape: Vec<usize>,
    pub count: usize,
    pub seed: u64,
    pub kappa: usize,
    pub t: f64,
    pub scanned: usize,
    pub skipped_non_strict: usize,
    /// Sink Morse sets and sink components correspond one to one.
    pub conjecture1: VerdictCounts,
    /// Sink Morse sets equal the content up to one box layer (worst over sinks).
    pub conjecture2: VerdictCounts,
    pub content_containment: VerdictCounts,
    pub findings: Vec<ScanFinding>,
}

impl ScanReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan report serializes")
    }

    pub fn violated(&self) -> usize {
        self.findings.len()
    }
}

/// Analyzes `count` random uniform games of the given shape (game `k` uses
/// seed `seed + k`; non-strict draws are skipped) and tallies the verdicts.
pub fn conjecture_scan(shape: &[usize], count: usize, seed: u64, kappa: usize, t: f64) -> Result<ScanReport> {
    let cover = build_cover(shape, kappa)?;
    let params = BoxMapParams { t, seed, ..BoxMapParams::default() };
    let mut report = ScanReport {
        shape: shape.to_vec(),
        count,
        seed,
        kappa,
        t,
        scanned: 0,
        skipped_non_strict: 0,
        conjecture1: VerdictCounts::default(),
        conjecture2: VerdictCounts::default(),
        content_containment: VerdictCounts::default(),
        findings: Vec::new(),
    };
    for k in 0..count as u64 {
        let game_seed = seed.wrapping_add(k);
        let game = random_game(shape, game_seed, GameClass::Uniform)?;
        if !game.is_strict() {
            report.skipped_non_strict += 1;
            continue;
        }
        let bmg = box_map(&game, &cover, params)?;
        let md = morse_decomposition(&bmg);
        let chain = sink_chain_estimate(&game, &bmg, &md);
        let c2 = Verdict::worst(chain.correspondence.iter().map(|c| c.conjecture2));
        let cc = Verdict::worst(chain.correspondence.iter().map(|c| c.content_containment));
        report.scanned += 1;
        report.conjecture1.add(chain.conjecture1);
        report.conjecture2.add(c2);
        report.content_containment.add(cc);
        if [chain.conjecture1, c2, cc].contains(&Verdict::Violated) {
            report.findings.push(ScanFinding {
                game_seed,
                conjecture1: chain.conjecture1,
                conjecture2: c2,
                content_containment: cc,
                game: save_game(&game),
            });
        }
    }
    Ok(report)
}
