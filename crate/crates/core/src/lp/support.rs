//! Bipartite support graphs of assignment-shaped LP solutions and their
//! orientation with in-degree at most one.

use std::collections::VecDeque;

use super::LpError;

/// Entries at or below this value are treated as zero.
pub const SUPPORT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Job(usize),
    Machine(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportEdge {
    pub job: usize,
    pub machine: usize,
    pub value: f64,
}

/// Jobs on one side, machines on the other, an edge per positive `x_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportGraph {
    pub jobs: usize,
    pub machines: usize,
    pub edges: Vec<SupportEdge>,
}

/// Keeps the entries `(job, machine, x)` with `x > 1e-9`.
pub fn build_support_graph(x: &[(usize, usize, f64)], jobs: usize, machines: usize) -> SupportGraph {
    let edges = x
        .iter()
        .filter(|&&(_, _, v)| v > SUPPORT_TOLERANCE)
        .map(|&(job, machine, value)| SupportEdge { job, machine, value })
        .collect();
    SupportGraph { jobs, machines, edges }
}

impl SupportGraph {
    fn node_count(&self) -> usize {
        self.jobs + self.machines
    }

    fn node(&self, idx: usize) -> Node {
        if idx < self.jobs {
            Node::Job(idx)
        } else {
            Node::Machine(idx - self.jobs)
        }
    }

    fn ends(&self, e: usize) -> (usize, usize) {
        let edge = &self.edges[e];
        (edge.job, self.jobs + edge.machine)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for e in 0..self.edges.len() {
            let (a, b) = self.ends(e);
            adj[a].push(e);
            adj[b].push(e);
        }
        adj
    }

    /// Node sets of the connected components that contain at least one edge,
    /// each sorted, ordered by smallest node.
    pub fn components(&self) -> Vec<Vec<Node>> {
        self.component_indices().into_iter().map(|c| c.into_iter().map(|v| self.node(v)).collect()).collect()
    }

    fn component_indices(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.node_count()];
        let mut out = Vec::new();
        for start in 0..self.node_count() {
            if seen[start] || adj[start].is_empty() {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &e in &adj[v] {
                    let (a, b) = self.ends(e);
                    let w = if a == v { b } else { a };
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// True iff every component has at most as many edges as nodes.
    pub fn is_pseudoforest(&self) -> bool {
        self.check_pseudoforest().is_ok()
    }

    fn check_pseudoforest(&self) -> Result<(), LpError> {
        let mut comp_of = vec![usize::MAX; self.node_count()];
        let comps = self.component_indices();
        for (c, nodes) in comps.iter().enumerate() {
            for &v in nodes {
                comp_of[v] = c;
            }
        }
        let mut edge_count = vec![0usize; comps.len()];
        for e in 0..self.edges.len() {
            edge_count[comp_of[self.ends(e).0]] += 1;
        }
        for (nodes, &edges) in comps.iter().zip(&edge_count) {
            if edges > nodes.len() {
                return Err(LpError::NotPseudoforest {
                    nodes: nodes.len(),
                    edges,
                });
            }
        }
        Ok(())
    }
}

/// Arc direction for every support edge; each node has at most one in-arc.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoforestOrientation {
    /// Head of each edge, aligned with `SupportGraph::edges`.
    pub heads: Vec<Node>,
    jobs: usize,
    in_arc: Vec<Option<usize>>,
    out_arcs: Vec<Vec<usize>>,
}

impl PseudoforestOrientation {
    fn idx(&self, node: Node) -> usize {
        match node {
            Node::Job(j) => j,
            Node::Machine(i) => self.jobs + i,
        }
    }

    /// Edge index of the unique arc entering `node`.
    pub fn in_arc(&self, node: Node) -> Option<usize> {
        self.in_arc[self.idx(node)]
    }

    /// Edge indices of the arcs leaving `node`, ascending.
    pub fn out_arcs(&self, node: Node) -> &[usize] {
        &self.out_arcs[self.idx(node)]
    }

    pub fn in_degree(&self, node: Node) -> usize {
        usize::from(self.in_arc(node).is_some())
    }
}

/// Orients a pseudoforest so that every node has in-degree at most one.
///
/// Tree components are rooted at their lowest machine; see
/// [`orient_pseudoforest_with`].
pub fn orient_pseudoforest(graph: &SupportGraph) -> Result<PseudoforestOrientation, LpError> {
    orient_pseudoforest_with(graph, |_| false)
}

/// Like [`orient_pseudoforest`], but a tree component is rooted at its first
/// node (jobs before machines, ascending) for which `prefer_root` holds,
/// falling back to its lowest machine. Trees are oriented away from the
/// root; in a component with one cycle the cycle is oriented consistently
/// and the attached trees away from it.
pub fn orient_pseudoforest_with<F: Fn(Node) -> bool>(
    graph: &SupportGraph,
    prefer_root: F,
) -> Result<PseudoforestOrientation, LpError> {
    graph.check_pseudoforest()?;
    let n = graph.node_count();
    let adj = graph.adjacency();
    let mut head: Vec<Option<usize>> = vec![None; graph.edges.len()];

    for comp in graph.component_indices() {
        let edge_count: usize = comp.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
        let mut sources: Vec<usize> = Vec::new();
        if edge_count + 1 == comp.len() {
            let root = comp
                .iter()
                .copied()
                .find(|&v| prefer_root(graph.node(v)))
                .or_else(|| comp.iter().copied().find(|&v| v >= graph.jobs))
                .unwrap_or(comp[0]);
            sources.push(root);
        } else {
            let mut degree: Vec<usize> = (0..n).map(|v| adj[v].len()).collect();
            let mut removed = vec![false; n];
            let mut leaves: Vec<usize> = comp.iter().copied().filter(|&v| degree[v] == 1).collect();
            while let Some(v) = leaves.pop() {
                removed[v] = true;
                for &e in &adj[v] {
                    let (a, b) = graph.ends(e);
                    let w = if a == v { b } else { a };
                    if !removed[w] {
                        degree[w] -= 1;
                        if degree[w] == 1 {
                            leaves.push(w);
                        }
                    }
                }
            }
            let start = *comp.iter().find(|&&v| !removed[v]).expect("cycle exists");
            let mut prev_edge = usize::MAX;
            let mut v = start;
            loop {
                sources.push(v);
                let e = *adj[v]
                    .iter()
                    .find(|&&e| {
                        let (a, b) = graph.ends(e);
                        let w = if a == v { b } else { a };
                        e != prev_edge && !removed[w] && head[e].is_none()
                    })
                    .expect("cycle continues");
                let (a, b) = graph.ends(e);
                let w = if a == v { b } else { a };
                head[e] = Some(w);
                prev_edge = e;
                v = w;
                if v == start {
                    break;
                }
            }
        }
        let mut queue: VecDeque<usize> = sources.into_iter().collect();
        let mut reached = vec![false; n];
        for &v in &queue {
            reached[v] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &e in &adj[v] {
                if head[e].is_some() {
                    continue;
                }
                let (a, b) = graph.ends(e);
                let w = if a == v { b } else { a };
                head[e] = Some(w);
                if !reached[w] {
                    reached[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }

    let mut in_arc = vec![None; n];
    let mut out_arcs = vec![Vec::new(); n];
    let mut heads = Vec::with_capacity(head.len());
    for (e, h) in head.into_iter().enumerate() {
        let h = h.expect("every edge oriented");
        let (a, b) = graph.ends(e);
        let tail = if h == a { b } else { a };
        debug_assert!(in_arc[h].is_none());
        in_arc[h] = Some(e);
        out_arcs[tail].push(e);
        heads.push(graph.node(h));
    }
    Ok(PseudoforestOrientation {
        heads,
        jobs: graph.jobs,
        in_arc,
        out_arcs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(jobs: usize, machines: usize, edges: &[(usize, usize)]) -> SupportGraph {
        let x: Vec<_> = edges.iter().map(|&(j, i)| (j, i, 0.5)).collect();
        build_support_graph(&x, jobs, machines)
    }

    #[test]
    fn drops_tiny_entries() {
        let g = build_support_graph(&[(0, 0, 1.0), (0, 1, 1e-12)], 1, 2);
        assert_eq!(g.edges.len(), 1);
    }

    #[test]
    fn path_orientation() {
        // machine 0 - job 0 - machine 1
        let g = graph(1, 2, &[(0, 0), (0, 1)]);
        let o = orient_pseudoforest(&g).unwrap();
        assert_eq!(o.in_arc(Node::Machine(0)), None);
        assert_eq!(o.in_degree(Node::Job(0)), 1);
        assert_eq!(o.in_degree(Node::Machine(1)), 1);
        assert_eq!(o.out_arcs(Node::Job(0)), &[1]);
    }

    #[test]
    fn four_cycle_has_unit_indegrees() {
        let g = graph(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(g.components().len(), 1);
        let o = orient_pseudoforest(&g).unwrap();
        for node in [Node::Job(0), Node::Job(1), Node::Machine(0), Node::Machine(1)] {
            assert_eq!(o.in_degree(node), 1);
        }
    }

    #[test]
    fn cycle_with_pendant_tree() {
        let g = graph(3, 3, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 1), (2, 2)]);
        let o = orient_pseudoforest(&g).unwrap();
        assert_eq!(o.in_degree(Node::Job(2)), 1);
        assert_eq!(o.in_degree(Node::Machine(2)), 1);
        assert_eq!(o.heads.len(), 6);
    }

    #[test]
    fn preferred_root() {
        let g = graph(2, 1, &[(0, 0), (1, 0)]);
        let o = orient_pseudoforest_with(&g, |n| n == Node::Job(1)).unwrap();
        assert_eq!(o.in_arc(Node::Job(1)), None);
        assert_eq!(o.in_degree(Node::Job(0)), 1);
    }

    #[test]
    fn rejects_two_cycles() {
        let g = graph(3, 2, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]);
        assert!(!g.is_pseudoforest());
        assert_eq!(
            orient_pseudoforest(&g).unwrap_err(),
            LpError::NotPseudoforest { nodes: 5, edges: 6 }
        );
    }
}
