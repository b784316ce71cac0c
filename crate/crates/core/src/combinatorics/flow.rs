//! Maximum-profit flow by successive shortest paths.

/// Directed network with integer capacities and real per-unit costs.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    nodes: usize,
    to: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

const EPS: f64 = 1e-12;

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            nodes,
            to: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: f64) {
        self.adj[from].push(self.to.len());
        self.to.push(to);
        self.cap.push(cap);
        self.cost.push(cost);
        self.adj[to].push(self.to.len());
        self.to.push(from);
        self.cap.push(0);
        self.cost.push(-cost);
    }

    /// Sends flow from `source` to `sink` along cheapest augmenting paths
    /// while they have negative cost, i.e. minimizes total cost with free
    /// flow value. Returns `(flow, cost)`.
    ///
    /// Residual costs may be negative, so paths are found with
    /// Bellman-Ford; the network must not contain a negative cycle.
    pub fn min_cost_free_flow(&mut self, source: usize, sink: usize) -> (i64, f64) {
        let mut flow = 0;
        let mut total = 0.0;
        loop {
            let mut dist = vec![f64::INFINITY; self.nodes];
            let mut via = vec![usize::MAX; self.nodes];
            dist[source] = 0.0;
            for _ in 0..self.nodes {
                let mut changed = false;
                for v in 0..self.nodes {
                    if dist[v] == f64::INFINITY {
                        continue;
                    }
                    for &e in &self.adj[v] {
                        let w = self.to[e];
                        if self.cap[e] > 0 && dist[v] + self.cost[e] < dist[w] - EPS {
                            dist[w] = dist[v] + self.cost[e];
                            via[w] = e;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            if dist[sink] >= -EPS {
                break;
            }
            let mut push = i64::MAX;
            let mut v = sink;
            while v != source {
                let e = via[v];
                push = push.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = sink;
            while v != source {
                let e = via[v];
                self.cap[e] -= push;
                self.cap[e ^ 1] += push;
                v = self.to[e ^ 1];
            }
            flow += push;
            total += push as f64 * dist[sink];
        }
        (flow, total)
    }
}
