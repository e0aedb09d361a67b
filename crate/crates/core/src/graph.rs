//! Strongly connected components and condensation for adjacency-list digraphs.

/// Tarjan's algorithm without recursion. Components come out in reverse
/// topological order of the condensation: every component appears after all
/// components reachable from it, so sinks come first.
pub fn tarjan_scc(adjacency: &[Vec<u32>]) -> Vec<Vec<u32>> {
    const UNVISITED: u32 = u32::MAX;
    let n = adjacency.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next = 0u32;
    let mut components = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = next;
        low[root as usize] = next;
        next += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(top) = call.last_mut() {
            let v = top.0;
            let vi = v as usize;
            if let Some(&w) = adjacency[vi].get(top.1) {
                top.1 += 1;
                let wi = w as usize;
                if index[wi] == UNVISITED {
                    index[wi] = next;
                    low[wi] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[wi] = true;
                    call.push((w, 0));
                } else if on_stack[wi] {
                    low[vi] = low[vi].min(index[wi]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                let pi = parent as usize;
                low[pi] = low[pi].min(low[vi]);
            }
            if low[vi] == index[vi] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }
    components
}

/// SCC decomposition with the induced acyclic condensation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    /// Component id of every node.
    pub component_of: Vec<u32>,
    /// Node sets, in reverse topological order (sinks first).
    pub components: Vec<Vec<u32>>,
    /// Sorted, deduplicated successor components of each component.
    pub successors: Vec<Vec<u32>>,
    /// Whether some node of the component has an arc to a node of the same component.
    pub has_internal_arc: Vec<bool>,
}

impl Condensation {
    pub fn new(adjacency: &[Vec<u32>]) -> Self {
        let components = tarjan_scc(adjacency);
        let mut component_of = vec![0u32; adjacency.len()];
        for (c, nodes) in components.iter().enumerate() {
            for &v in nodes {
                component_of[v as usize] = c as u32;
            }
        }
        let mut successors = vec![Vec::new(); components.len()];
        let mut has_internal_arc = vec![false; components.len()];
        for (v, outs) in adjacency.iter().enumerate() {
            let cv = component_of[v];
            for &w in outs {
                let cw = component_of[w as usize];
                if cw == cv {
                    has_internal_arc[cv as usize] = true;
                } else {
                    successors[cv as usize].push(cw);
                }
            }
        }
        for s in &mut successors {
            s.sort_unstable();
            s.dedup();
        }
        Condensation {
            component_of,
            components,
            successors,
            has_internal_arc,
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_sink(&self, c: usize) -> bool {
        self.successors[c].is_empty()
    }

    pub fn sinks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&c| self.is_sink(c))
    }

    /// Components reachable from `c` (excluding `c`) in the condensation.
    pub fn reachable_from(&self, c: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut todo = vec![c];
        while let Some(x) = todo.pop() {
            for &y in &self.successors[x] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    todo.push(y as usize);
                }
            }
        }
        seen
    }
}

/// Nodes reachable from `start` (including it).
pub fn reachable(adjacency: &[Vec<u32>], start: &[u32]) -> Vec<bool> {
    let mut seen = vec![false; adjacency.len()];
    let mut todo: Vec<u32> = Vec::new();
    for &s in start {
        if !seen[s as usize] {
            seen[s as usize] = true;
            todo.push(s);
        }
    }
    while let Some(v) = todo.pop() {
        for &w in &adjacency[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                todo.push(w);
            }
        }
    }
    seen
}
