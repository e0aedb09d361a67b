use super::boxmap::BoxMapGraph;
use crate::graph::Condensation;

/// Nontrivial strongly connected components of a box map (at least two
/// boxes, or one box with a self-arc), ordered sinks first.
#[derive(Debug, Clone)]
pub struct MorseDecomposition {
    condensation: Condensation,
    /// Condensation component of each Morse set.
    components: Vec<usize>,
    morse_of_component: Vec<Option<u32>>,
}

pub fn morse_decomposition(bmg: &BoxMapGraph) -> MorseDecomposition {
    let condensation = Condensation::new(&bmg.adjacency);
    let mut components = Vec::new();
    let mut morse_of_component = vec![None; condensation.len()];
    for c in 0..condensation.len() {
        if condensation.components[c].len() >= 2 || condensation.has_internal_arc[c] {
            morse_of_component[c] = Some(components.len() as u32);
            components.push(c);
        }
    }
    MorseDecomposition { condensation, components, morse_of_component }
}

impl MorseDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Boxes of Morse set `m`, sorted.
    pub fn boxes(&self, m: usize) -> &[u32] {
        &self.condensation.components[self.components[m]]
    }

    pub fn morse_of_box(&self, b: u32) -> Option<usize> {
        self.morse_of_component[self.condensation.component_of[b as usize] as usize]
            .map(|m| m as usize)
    }

    /// No arc leaves the Morse set.
    pub fn is_sink(&self, m: usize) -> bool {
        self.condensation.is_sink(self.components[m])
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.len()).filter(|&m| self.is_sink(m)).collect()
    }

    pub fn transient_boxes(&self) -> Vec<u32> {
        (0..self.condensation.component_of.len() as u32)
            .filter(|&b| self.morse_of_box(b).is_none())
            .collect()
    }

    /// Pairs `(m, n)` such that Morse set `n` is reachable from `m`
    /// (possibly through transient boxes) and no third Morse set lies
    /// between them.
    pub fn morse_graph(&self) -> Vec<(usize, usize)> {
        let reach: Vec<Vec<usize>> = (0..self.len())
            .map(|m| {
                let seen = self.condensation.reachable_from(self.components[m]);
                (0..self.len()).filter(|&n| seen[self.components[n]]).collect()
            })
            .collect();
        let mut arcs = Vec::new();
        for (m, targets) in reach.iter().enumerate() {
            for &n in targets {
                let through = targets.iter().any(|&k| k != n && reach[k].contains(&n));
                if !through {
                    arcs.push((m, n));
                }
            }
        }
        arcs
    }
}
