//! Orientations giving every node at least half of its degree as in-degree.

/// Undirected multigraph; self-loops and parallel edges allowed.
///
/// A self-loop adds 1 to its node's degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Head node of every edge, indexed like [`MultiGraph::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    pub heads: Vec<usize>,
}

impl MultiGraph {
    pub fn new(nodes: usize) -> Self {
        MultiGraph { nodes, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> usize {
        assert!(a < self.nodes && b < self.nodes, "edge endpoint out of range");
        self.edges.push((a, b));
        self.edges.len() - 1
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes];
        for &(a, b) in &self.edges {
            d[a] += 1;
            if a != b {
                d[b] += 1;
            }
        }
        d
    }
}

impl Orientation {
    pub fn in_degrees(&self, nodes: usize) -> Vec<usize> {
        let mut d = vec![0; nodes];
        for &h in &self.heads {
            d[h] += 1;
        }
        d
    }
}

/// Orients `graph` so that every node `v` has in-degree at least
/// `floor(d(v) / 2)`.
///
/// Self-loops point into their node. The remaining edges are made Eulerian
/// per component by pairing odd-degree nodes with artificial edges; the
/// edges are then split into closed trails, each walked from its lowest
/// node and oriented along the walk, which balances in- and out-degree at
/// every node. Dropping the artificial edges costs each node at most one
/// in-arc.
pub fn orient_half_indegree(graph: &MultiGraph) -> Orientation {
    let n = graph.nodes;
    let mut heads = vec![usize::MAX; graph.edges.len()];

    // Working edge list: real non-loop edges first, then artificial ones.
    let mut work: Vec<(usize, usize)> = Vec::new();
    let mut real_id: Vec<Option<usize>> = Vec::new();
    let mut degree = vec![0usize; n];
    let mut dsu = Dsu::new(n);
    for (id, &(a, b)) in graph.edges.iter().enumerate() {
        if a == b {
            heads[id] = a;
        } else {
            work.push((a, b));
            real_id.push(Some(id));
            degree[a] += 1;
            degree[b] += 1;
            dsu.union(a, b);
        }
    }

    let mut pending: Vec<Option<usize>> = vec![None; n];
    for v in 0..n {
        if degree[v] % 2 == 1 {
            let root = dsu.find(v);
            match pending[root].take() {
                Some(u) => {
                    work.push((u, v));
                    real_id.push(None);
                }
                None => pending[root] = Some(v),
            }
        }
    }

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(a, b)) in work.iter().enumerate() {
        incident[a].push(e);
        incident[b].push(e);
    }
    let mut used = vec![false; work.len()];
    let mut cursor = vec![0usize; n];

    for start in 0..n {
        loop {
            while cursor[start] < incident[start].len() && used[incident[start][cursor[start]]] {
                cursor[start] += 1;
            }
            if cursor[start] == incident[start].len() {
                break;
            }
            // Walk a closed trail from `start`; all degrees are even so the
            // walk can only get stuck back at `start`.
            let mut v = start;
            loop {
                while cursor[v] < incident[v].len() && used[incident[v][cursor[v]]] {
                    cursor[v] += 1;
                }
                if cursor[v] == incident[v].len() {
                    break;
                }
                let e = incident[v][cursor[v]];
                used[e] = true;
                let (a, b) = work[e];
                let w = if a == v { b } else { a };
                if let Some(id) = real_id[e] {
                    heads[id] = w;
                }
                v = w;
            }
        }
    }
    debug_assert!(heads.iter().all(|&h| h != usize::MAX));
    Orientation { heads }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, v: usize) -> usize {
        let mut r = v;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut cur = v;
        while self.0[cur] != r {
            let next = self.0[cur];
            self.0[cur] = r;
            cur = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}
