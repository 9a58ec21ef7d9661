use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

/// Simple undirected graph on vertices `0..n`, edges are specified entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnderlyingGraph {
    n: usize,
    adj: Vec<bool>,
}

impl UnderlyingGraph {
    pub fn empty(n: usize) -> Self {
        UnderlyingGraph {
            n,
            adj: vec![false; n * n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u * self.n + v] = true;
            self.adj[v * self.n + u] = true;
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u * self.n + v] = false;
        self.adj[v * self.n + u] = false;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.adj[v * self.n + u])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count() / 2
    }

    /// Edges `(u, v)` with `u < v` in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Non-adjacent pairs `(u, v)` with `u < v` in row-major order.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if !self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn complement(&self) -> UnderlyingGraph {
        let mut g = Self::empty(self.n);
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(a, &u)| set[a + 1..].iter().all(|&v| u != v && self.has_edge(u, v)))
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() * 2 == self.n * self.n.saturating_sub(1)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Shortest path from `from` to `to` avoiding `blocked` vertices (BFS,
    /// smallest-index neighbours first). Endpoints must not be blocked.
    pub fn shortest_path_avoiding(
        &self,
        from: usize,
        to: usize,
        blocked: &[bool],
    ) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.n];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for u in self.neighbors(v) {
                if prev[u] == usize::MAX && !blocked[u] {
                    prev[u] = v;
                    queue.push_back(u);
                }
            }
        }
        None
    }

    /// All maximal cliques (Bron-Kerbosch with pivoting), each sorted, the
    /// list sorted lexicographically. Isolated vertices appear as singletons.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let p: Vec<usize> = (0..self.n).collect();
        self.bron_kerbosch(&mut Vec::new(), p, Vec::new(), &mut out);
        for c in &mut out {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    fn bron_kerbosch(
        &self,
        r: &mut Vec<usize>,
        p: Vec<usize>,
        x: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() {
            if x.is_empty() {
                out.push(r.clone());
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| self.has_edge(u, v)).count())
            .unwrap();
        let candidates: Vec<usize> = p
            .iter()
            .copied()
            .filter(|&v| !self.has_edge(pivot, v))
            .collect();
        let mut p = p;
        let mut x = x;
        for v in candidates {
            let np = p.iter().copied().filter(|&u| self.has_edge(u, v)).collect();
            let nx = x.iter().copied().filter(|&u| self.has_edge(u, v)).collect();
            r.push(v);
            self.bron_kerbosch(r, np, nx, out);
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
    }

    /// Induced subgraph on `idx`, relabelled `0..idx.len()` in the given order.
    pub fn induced(&self, idx: &[usize]) -> UnderlyingGraph {
        let mut g = Self::empty(idx.len());
        for (a, &u) in idx.iter().enumerate() {
            for (b, &v) in idx.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }
}
