//! Edmonds-Karp maximum flow on a dense capacity matrix.

use std::collections::VecDeque;

pub(crate) struct FlowNetwork {
    n: usize,
    cap: Vec<f64>,
    flow: Vec<f64>,
}

impl FlowNetwork {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            n,
            cap: vec![0.0; n * n],
            flow: vec![0.0; n * n],
        }
    }

    pub(crate) fn add_capacity(&mut self, from: usize, to: usize, c: f64) {
        self.cap[from * self.n + to] += c;
    }

    pub(crate) fn flow(&self, from: usize, to: usize) -> f64 {
        self.flow[from * self.n + to] - self.flow[to * self.n + from]
    }

    fn residual(&self, u: usize, v: usize) -> f64 {
        self.cap[u * self.n + v] - self.flow[u * self.n + v] + self.flow[v * self.n + u]
    }

    /// Pushes the maximum flow from `s` to `t`. Residuals at or below `eps`
    /// count as saturated.
    pub(crate) fn max_flow(&mut self, s: usize, t: usize, eps: f64) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        loop {
            let mut parent = vec![usize::MAX; n];
            parent[s] = s;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for v in 0..n {
                    if parent[v] == usize::MAX && self.residual(u, v) > eps {
                        parent[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if parent[t] == usize::MAX {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while v != s {
                let u = parent[v];
                push = push.min(self.residual(u, v));
                v = u;
            }
            let mut v = t;
            while v != s {
                let u = parent[v];
                // cancel reverse flow first
                let back = self.flow[v * n + u].min(push);
                self.flow[v * n + u] -= back;
                self.flow[u * n + v] += push - back;
                v = u;
            }
            total += push;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        // CLRS example, max flow 23
        let edges = [
            (0, 1, 16.0),
            (0, 2, 13.0),
            (1, 3, 12.0),
            (2, 1, 4.0),
            (2, 4, 14.0),
            (3, 2, 9.0),
            (3, 5, 20.0),
            (4, 3, 7.0),
            (4, 5, 4.0),
        ];
        let mut g = FlowNetwork::new(6);
        for (u, v, c) in edges {
            g.add_capacity(u, v, c);
        }
        assert_eq!(g.max_flow(0, 5, 1e-12), 23.0);
        let out: f64 = (0..6).map(|v| g.flow(0, v)).sum();
        assert_eq!(out, 23.0);
    }
}
