//! Small directed-graph toolkit used by the shift machinery.

use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn from_successors(mut succ: Vec<Vec<usize>>) -> Self {
        let n = succ.len();
        let mut pred = vec![Vec::new(); n];
        for (u, out) in succ.iter_mut().enumerate() {
            out.sort_unstable();
            out.dedup();
            for &v in out.iter() {
                pred[v].push(u);
            }
        }
        Digraph { succ, pred }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.succ[u].binary_search(&v).is_ok()
    }

    fn reach(&self, start: usize, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            let next = if forward { &self.succ[u] } else { &self.pred[u] };
            for &v in next {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        // a single vertex needs its loop to carry a cycle
        if self.len() == 1 {
            return self.has_edge(0, 0);
        }
        self.reach(0, true).iter().all(|&b| b) && self.reach(0, false).iter().all(|&b| b)
    }

    /// Vertices mutually reachable with `v` (its strongly connected component).
    pub fn component_of(&self, v: usize) -> Vec<usize> {
        let fwd = self.reach(v, true);
        let bwd = self.reach(v, false);
        (0..self.len()).filter(|&u| fwd[u] && bwd[u]).collect()
    }

    /// Shortest path (at least one edge) from `from` to a vertex satisfying `target`.
    /// Returned path includes both endpoints. Ties resolve towards smaller indices.
    pub fn shortest_path_to(&self, from: usize, target: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let n = self.len();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &v in &self.succ[from] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = from;
                queue.push_back(v);
            }
        }
        while let Some(u) = queue.pop_front() {
            if target(u) {
                let mut path = vec![u];
                let mut cur = u;
                loop {
                    let p = parent[cur];
                    path.push(p);
                    if p == from && path.len() > 1 {
                        break;
                    }
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &v in &self.succ[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// `layers[t][u]` is true when a walk of exactly `t` edges leads from `u` to `target`.
    pub fn layers_to(&self, target: usize, max_len: usize) -> Vec<Vec<bool>> {
        let n = self.len();
        let mut layers = Vec::with_capacity(max_len + 1);
        let mut cur = vec![false; n];
        cur[target] = true;
        layers.push(cur.clone());
        for _ in 0..max_len {
            let mut next = vec![false; n];
            for (v, &hit) in cur.iter().enumerate() {
                if hit {
                    for &u in &self.pred[v] {
                        next[u] = true;
                    }
                }
            }
            layers.push(next.clone());
            cur = next;
        }
        layers
    }

    /// A closed walk of exactly `len` edges through `v`, as the vertex list `v, .., v`.
    pub fn closed_walk(&self, v: usize, len: usize) -> Option<Vec<usize>> {
        if len == 0 {
            return Some(vec![v]);
        }
        let layers = self.layers_to(v, len);
        if !layers[len][v] {
            return None;
        }
        let mut walk = vec![v];
        let mut cur = v;
        for remaining in (0..len).rev() {
            let next = *self.succ[cur].iter().find(|&&w| layers[remaining][w])?;
            walk.push(next);
            cur = next;
        }
        Some(walk)
    }

    /// `out[v][k]` for `k <= max_len`: a closed walk of length `k` passes through `v`.
    pub fn closed_walk_lengths(&self, max_len: usize) -> Vec<Vec<bool>> {
        (0..self.len())
            .map(|v| {
                let layers = self.layers_to(v, max_len);
                (0..=max_len).map(|k| k > 0 && layers[k][v]).collect()
            })
            .collect()
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
