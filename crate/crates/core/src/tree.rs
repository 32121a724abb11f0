//! Plain finite trees with BFS distances.

use std::collections::VecDeque;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tree {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

/// All-pairs distance table.
#[derive(Clone, Debug)]
pub struct Distances {
    n: usize,
    d: Vec<u32>,
}

impl Distances {
    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.d[a * self.n + b]
    }
}

impl Tree {
    pub fn with_vertices(n: usize) -> Self {
        Tree { adj: vec![Vec::new(); n], edges: Vec::new() }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut t = Self::with_vertices(n);
        for &(a, b) in edges {
            t.add_edge(a, b);
        }
        t
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> usize {
        self.adj[a].push(b);
        self.adj[b].push(a);
        self.edges.push((a, b));
        self.edges.len() - 1
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn leaves(&self) -> Vec<usize> {
        if self.len() == 1 {
            return vec![0];
        }
        (0..self.len()).filter(|&v| self.degree(v) == 1).collect()
    }

    /// True when connected and acyclic.
    pub fn is_tree(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        self.edges.len() + 1 == self.len() && self.distances_from(0).iter().all(|&d| d != u32::MAX)
    }

    pub fn distances_from(&self, s: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distances(&self) -> Distances {
        let n = self.len();
        let mut d = Vec::with_capacity(n * n);
        for s in 0..n {
            d.extend(self.distances_from(s));
        }
        Distances { n, d }
    }

    /// Vertices on the side of `a` after deleting edge `e = (a, b)`.
    pub fn side_of_edge(&self, e: usize) -> Vec<bool> {
        let (a, b) = self.edges[e];
        let mut side = vec![false; self.len()];
        side[a] = true;
        let mut stack = vec![a];
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !side[w] && !(v == a && w == b) {
                    side[w] = true;
                    stack.push(w);
                }
            }
        }
        side
    }

    /// Vertices of the geodesic from `a` to `b`, inclusive.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.len()];
        parent[a] = a;
        let mut q = VecDeque::from([a]);
        while let Some(v) = q.pop_front() {
            if v == b {
                break;
            }
            for &w in &self.adj[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    q.push_back(w);
                }
            }
        }
        let mut p = vec![b];
        let mut v = b;
        while v != a {
            v = parent[v];
            p.push(v);
        }
        p.reverse();
        p
    }
}
