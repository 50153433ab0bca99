use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SimError;
use crate::problem::Label;

/// An edge `{u, v}`; `u` is endpoint 1 and `v` endpoint 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub port_u: usize,
    pub port_v: usize,
    pub color: Option<usize>,
    /// Labels on the `u` and `v` halves.
    pub labels: [Option<Label>; 2],
}

impl Edge {
    pub fn other(&self, w: usize) -> usize {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }

    fn side(&self, w: usize) -> usize {
        if w == self.u {
            0
        } else {
            1
        }
    }

    pub fn port(&self, w: usize) -> usize {
        if w == self.u {
            self.port_u
        } else {
            self.port_v
        }
    }
}

/// A port-numbered tree fragment with optional edge coloring and half-edge
/// labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTree {
    pub delta: usize,
    n: usize,
    edges: Vec<Edge>,
    /// Incident edges of each node, sorted by port.
    adj: Vec<Vec<usize>>,
}

impl LabeledTree {
    /// Builds a tree from `(u, v, port_u, port_v)` tuples.
    pub fn new(n: usize, delta: usize, edges: &[(usize, usize, usize, usize)]) -> Result<Self, SimError> {
        if n == 0 {
            return Err(SimError::Empty);
        }
        let edges: Vec<Edge> = edges
            .iter()
            .map(|&(u, v, port_u, port_v)| Edge {
                u,
                v,
                port_u,
                port_v,
                color: None,
                labels: [None, None],
            })
            .collect();
        let t = Self::from_edges(n, delta, edges)?;
        t.validate(false)?;
        Ok(t)
    }

    /// Builds a tree from full edge records, colors and labels included.
    pub fn from_edge_records(
        n: usize,
        delta: usize,
        edges: Vec<Edge>,
        symmetric_ports: bool,
    ) -> Result<Self, SimError> {
        if n == 0 {
            return Err(SimError::Empty);
        }
        let t = Self::from_edges(n, delta, edges)?;
        t.validate(symmetric_ports)?;
        Ok(t)
    }

    fn from_edges(n: usize, delta: usize, edges: Vec<Edge>) -> Result<Self, SimError> {
        let mut adj = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n || e.u == e.v {
                return Err(SimError::Malformed("edge endpoint out of range"));
            }
            adj[e.u].push(i);
            adj[e.v].push(i);
        }
        for (w, list) in adj.iter_mut().enumerate() {
            list.sort_by_key(|&i| edges[i].port(w));
            if list.len() > delta {
                return Err(SimError::DegreeExceeded { node: w });
            }
        }
        Ok(LabeledTree { delta, n, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn degree(&self, w: usize) -> usize {
        self.adj[w].len()
    }

    /// Incident edges in port order.
    pub fn incident(&self, w: usize) -> &[usize] {
        &self.adj[w]
    }

    pub fn neighbors(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[w].iter().map(move |&e| self.edges[e].other(w))
    }

    pub fn has_coloring(&self) -> bool {
        self.edges.iter().all(|e| e.color.is_some())
    }

    pub fn label(&self, w: usize, e: usize) -> Option<&Label> {
        let edge = &self.edges[e];
        edge.labels[edge.side(w)].as_ref()
    }

    pub fn set_label(&mut self, w: usize, e: usize, l: Label) {
        let edge = &mut self.edges[e];
        let side = edge.side(w);
        edge.labels[side] = Some(l);
    }

    pub fn clear_labels(&mut self) {
        for e in &mut self.edges {
            e.labels = [None, None];
        }
    }

    /// Labels around `w` in port order.
    pub fn node_labels(&self, w: usize) -> Result<Vec<Label>, SimError> {
        self.adj[w]
            .iter()
            .map(|&e| {
                self.label(w, e)
                    .cloned()
                    .ok_or(SimError::MissingLabel { node: w, edge: e })
            })
            .collect()
    }

    /// Sort key for tie-breaking among the half-edges of `w`: color, then
    /// port.
    pub(crate) fn tie_key(&self, w: usize, e: usize) -> (usize, usize) {
        let edge = &self.edges[e];
        (edge.color.unwrap_or(0), edge.port(w))
    }

    /// Checks connectivity, acyclicity, port ranges and coloring properness.
    /// With `symmetric_ports`, each edge's port equals its color on both
    /// ends instead of ports being `1..=deg`.
    pub fn validate(&self, symmetric_ports: bool) -> Result<(), SimError> {
        if self.edges.len() + 1 != self.n {
            return Err(SimError::Malformed("a tree on n nodes has n-1 edges"));
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(w) = queue.pop_front() {
            for z in self.neighbors(w) {
                if !seen[z] {
                    seen[z] = true;
                    count += 1;
                    queue.push_back(z);
                }
            }
        }
        if count != self.n {
            return Err(SimError::Malformed("not connected"));
        }
        for w in 0..self.n {
            let mut ports: Vec<usize> = self.adj[w].iter().map(|&e| self.edges[e].port(w)).collect();
            ports.sort_unstable();
            let ok = if symmetric_ports {
                ports.windows(2).all(|p| p[0] < p[1]) && ports.iter().all(|&p| 1 <= p && p <= self.delta)
            } else {
                ports.iter().enumerate().all(|(i, &p)| p == i + 1)
            };
            if !ok {
                return Err(SimError::Malformed("ports at a node are not distinct in range"));
            }
            let mut colors: Vec<usize> = self.adj[w].iter().filter_map(|&e| self.edges[e].color).collect();
            colors.sort_unstable();
            if colors.windows(2).any(|c| c[0] == c[1]) || colors.iter().any(|&c| c == 0 || c > self.delta) {
                return Err(SimError::Malformed("edge coloring is not proper"));
            }
        }
        if symmetric_ports {
            for e in &self.edges {
                if e.port_u != e.port_v || e.color != Some(e.port_u) {
                    return Err(SimError::Malformed("symmetric ports must equal the edge color"));
                }
            }
        }
        Ok(())
    }
}

/// Random recursive tree: node `i` attaches to a uniform earlier node of
/// degree below `delta`; ports are then shuffled at every node. With
/// `symmetric`, the tree is properly colored and every edge gets its color
/// as port on both endpoints.
pub fn random_tree(n: usize, delta: usize, seed: u64, symmetric: bool) -> Result<LabeledTree, SimError> {
    if n == 0 {
        return Err(SimError::Empty);
    }
    if (delta == 0 && n > 1) || (delta == 1 && n > 2) {
        return Err(SimError::Infeasible);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degree = vec![0usize; n];
    let mut pairs = Vec::with_capacity(n.saturating_sub(1));
    let mut open: Vec<usize> = vec![0];
    for i in 1..n {
        let k = rng.random_range(0..open.len());
        let parent = open[k];
        pairs.push((parent, i));
        degree[parent] += 1;
        degree[i] += 1;
        if degree[parent] == delta {
            open.swap_remove(k);
        }
        if degree[i] < delta {
            open.push(i);
        }
    }
    let mut ports: Vec<Vec<usize>> = degree
        .iter()
        .map(|&d| {
            let mut p: Vec<usize> = (1..=d).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    let mut edges = Vec::with_capacity(pairs.len());
    for &(u, v) in &pairs {
        let pu = ports[u].pop().expect("port");
        let pv = ports[v].pop().expect("port");
        edges.push(Edge {
            u,
            v,
            port_u: pu,
            port_v: pv,
            color: None,
            labels: [None, None],
        });
    }
    let t = LabeledTree::from_edges(n, delta, edges)?;
    if symmetric {
        Ok(symmetric_ports(&proper_edge_coloring(&t)?))
    } else {
        Ok(t)
    }
}

fn symmetric_ports(t: &LabeledTree) -> LabeledTree {
    let edges = t
        .edges
        .iter()
        .map(|e| {
            let c = e.color.expect("colored");
            Edge {
                port_u: c,
                port_v: c,
                ..e.clone()
            }
        })
        .collect();
    LabeledTree::from_edges(t.n, t.delta, edges).expect("same shape")
}

/// The complete tree of the given depth: the root has `delta` children and
/// every other internal node `delta - 1`.
pub fn complete_tree(delta: usize, depth: usize) -> Result<LabeledTree, SimError> {
    if delta < 2 {
        return Err(SimError::Infeasible);
    }
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut n = 1;
    for _ in 0..depth {
        let mut next = Vec::new();
        for &w in &frontier {
            let children = if w == 0 { delta } else { delta - 1 };
            let first_port = if w == 0 { 1 } else { 2 };
            for c in 0..children {
                edges.push(Edge {
                    u: w,
                    v: n,
                    port_u: first_port + c,
                    port_v: 1,
                    color: None,
                    labels: [None, None],
                });
                next.push(n);
                n += 1;
            }
        }
        frontier = next;
    }
    LabeledTree::from_edges(n, delta, edges)
}

/// Greedy proper coloring with colors `1..=delta` in BFS order from node 0:
/// each node gives its uncolored edges, in port order, the smallest colors
/// not used around it.
pub fn proper_edge_coloring(t: &LabeledTree) -> Result<LabeledTree, SimError> {
    let mut out = t.clone();
    for e in &mut out.edges {
        e.color = None;
    }
    let mut seen = vec![false; t.n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(w) = queue.pop_front() {
        let mut used: Vec<usize> = out.adj[w].iter().filter_map(|&e| out.edges[e].color).collect();
        for &e in &t.adj[w] {
            if out.edges[e].color.is_some() {
                continue;
            }
            let c = (1..=t.delta)
                .find(|c| !used.contains(c))
                .ok_or(SimError::DegreeExceeded { node: w })?;
            used.push(c);
            out.edges[e].color = Some(c);
            let z = out.edges[e].other(w);
            if !seen[z] {
                seen[z] = true;
                queue.push_back(z);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node() {
        let t = random_tree(1, 3, 7, false).unwrap();
        assert_eq!(t.n(), 1);
        assert!(t.edges().is_empty());
        assert!(matches!(random_tree(0, 3, 7, false), Err(SimError::Empty)));
    }

    #[test]
    fn complete_tree_count() {
        let t = complete_tree(3, 2).unwrap();
        assert_eq!(t.n(), 10);
        t.validate(false).unwrap();
        assert_eq!(t.degree(0), 3);
        assert_eq!(t.degree(1), 3);
    }

    #[test]
    fn random_trees_are_valid_and_seeded() {
        for seed in 0..20 {
            let t = random_tree(60, 4, seed, false).unwrap();
            t.validate(false).unwrap();
            assert_eq!(t, random_tree(60, 4, seed, false).unwrap());
            let c = proper_edge_coloring(&t).unwrap();
            assert!(c.has_coloring());
            c.validate(false).unwrap();
        }
        assert_ne!(random_tree(60, 4, 1, false).unwrap(), random_tree(60, 4, 2, false).unwrap());
    }

    #[test]
    fn symmetric_mode() {
        let t = random_tree(40, 4, 3, true).unwrap();
        t.validate(true).unwrap();
        assert!(t.edges().iter().all(|e| e.port_u == e.port_v));
    }

    #[test]
    fn star_and_path_colorings() {
        let star = LabeledTree::new(5, 4, &[(0, 1, 1, 1), (0, 2, 2, 1), (0, 3, 3, 1), (0, 4, 4, 1)]).unwrap();
        let c = proper_edge_coloring(&star).unwrap();
        let colors: Vec<usize> = c.edges().iter().map(|e| e.color.unwrap()).collect();
        assert_eq!(colors, [1, 2, 3, 4]);

        let path = LabeledTree::new(5, 2, &[(0, 1, 1, 1), (1, 2, 2, 1), (2, 3, 2, 1), (3, 4, 2, 1)]).unwrap();
        let c = proper_edge_coloring(&path).unwrap();
        let colors: Vec<usize> = c.edges().iter().map(|e| e.color.unwrap()).collect();
        assert_eq!(colors, [1, 2, 1, 2]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(LabeledTree::new(3, 2, &[(0, 1, 1, 1)]).is_err());
        assert!(LabeledTree::new(3, 2, &[(0, 1, 1, 1), (0, 2, 1, 1)]).is_err());
        assert!(matches!(
            LabeledTree::new(4, 2, &[(0, 1, 1, 1), (0, 2, 2, 1), (0, 3, 3, 1)]),
            Err(SimError::DegreeExceeded { node: 0 })
        ));
    }
}
