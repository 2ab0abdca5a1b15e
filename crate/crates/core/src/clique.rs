//! Simple undirected graphs and exact clique search.

use serde::Serialize;

/// Undirected simple graph on `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    num_edges: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], num_edges: 0 }
    }

    /// Builds from an edge list; duplicate edges are kept once, loops dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            if u != v {
                g.adj[u as usize].push(v);
                g.adj[v as usize].push(u);
            }
        }
        g.normalize();
        g
    }

    pub(crate) fn push_edge_unchecked(&mut self, u: u32, v: u32) {
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
    }

    pub(crate) fn normalize(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
            list.dedup();
        }
        self.num_edges = self.adj.iter().map(Vec::len).sum::<usize>() / 2;
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn neighbours(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Edges (u, v) with u < v in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u as u32).map(move |&v| (u as u32, v)))
    }

    /// Whether no edge appears in both graphs.
    pub fn is_edge_disjoint(&self, other: &Graph) -> bool {
        self.edges().all(|(u, v)| !other.has_edge(u, v))
    }

    /// "p edge N M" then "e u v" per edge, 1-based, edges in lexicographic order.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.num_vertices(), self.num_edges());
        for (u, v) in self.edges() {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        out
    }
}

struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet { words: vec![0; n.div_ceil(64)] }
    }

    fn insert(&mut self, i: u32) {
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &BitSet) -> BitSet {
        BitSet { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    fn and_count(&self, other: &BitSet) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(wi as u32 * 64 + b)
            })
        })
    }

    fn contains(&self, i: u32) -> bool {
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    fn remove(&mut self, i: u32) {
        self.words[(i / 64) as usize] &= !(1 << (i % 64));
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueReport {
    pub passed: bool,
    pub clique_size: usize,
    /// A clique of the forbidden size, when one exists.
    pub clique: Option<Vec<u32>>,
}

/// Pass iff the graph contains no clique on `m` vertices.
///
/// Bron–Kerbosch with Tomita pivoting, pruned when |R| + |P| < m and stopped
/// at the first clique of size m.
pub fn verify_clique_free(graph: &Graph, m: usize) -> CliqueReport {
    let clique = find_clique(graph, m);
    CliqueReport { passed: clique.is_none(), clique_size: m, clique }
}

pub fn find_clique(graph: &Graph, m: usize) -> Option<Vec<u32>> {
    if m == 0 {
        return Some(Vec::new());
    }
    let n = graph.num_vertices();
    let rows: Vec<BitSet> = (0..n)
        .map(|v| {
            let mut b = BitSet::new(n);
            for &u in graph.neighbours(v as u32) {
                b.insert(u);
            }
            b
        })
        .collect();
    let mut p = BitSet::new(n);
    for v in 0..n as u32 {
        // a vertex of degree < m − 1 lies in no m-clique
        if graph.neighbours(v).len() + 1 >= m {
            p.insert(v);
        }
    }
    let mut r = Vec::new();
    search(&rows, &mut r, p, m)
}

fn search(rows: &[BitSet], r: &mut Vec<u32>, mut p: BitSet, m: usize) -> Option<Vec<u32>> {
    if r.len() >= m {
        return Some(r[..m].to_vec());
    }
    if r.len() + p.len() < m || p.is_empty() {
        return None;
    }
    let pivot = p.iter().max_by_key(|&u| rows[u as usize].and_count(&p)).expect("p is nonempty");
    let candidates: Vec<u32> = p.iter().filter(|&v| v == pivot || !rows[pivot as usize].contains(v)).collect();
    for v in candidates {
        r.push(v);
        let found = search(rows, r, p.and(&rows[v as usize]), m);
        r.pop();
        if found.is_some() {
            return found;
        }
        p.remove(v);
    }
    None
}

/// All cliques on exactly `m` vertices, each sorted, in lexicographic order.
pub fn enumerate_cliques(graph: &Graph, m: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if m == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut stack = Vec::with_capacity(m);
    for v in 0..graph.num_vertices() as u32 {
        let higher: Vec<u32> = graph.neighbours(v).iter().copied().filter(|&u| u > v).collect();
        stack.push(v);
        extend(graph, &mut stack, &higher, m, &mut out);
        stack.pop();
    }
    out
}

fn extend(graph: &Graph, stack: &mut Vec<u32>, candidates: &[u32], m: usize, out: &mut Vec<Vec<u32>>) {
    if stack.len() == m {
        out.push(stack.clone());
        return;
    }
    for (i, &v) in candidates.iter().enumerate() {
        let next: Vec<u32> = candidates[i + 1..].iter().copied().filter(|&u| graph.has_edge(v, u)).collect();
        stack.push(v);
        extend(graph, stack, &next, m, out);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: u32) -> Graph {
        Graph::from_edges(n as usize, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    #[test]
    fn edgeless_graph_has_no_edge() {
        let g = Graph::new(5);
        assert!(verify_clique_free(&g, 2).passed);
        assert!(!verify_clique_free(&g, 1).passed);
    }

    #[test]
    fn complete_graph_clique_counts() {
        let g = complete(6);
        assert_eq!(g.num_edges(), 15);
        assert_eq!(enumerate_cliques(&g, 3).len(), 20);
        assert!(!verify_clique_free(&g, 6).passed);
        assert!(verify_clique_free(&g, 7).passed);
    }

    #[test]
    fn five_cycle_is_triangle_free() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert!(verify_clique_free(&g, 3).passed);
        assert_eq!(enumerate_cliques(&g, 2).len(), 5);
    }

    #[test]
    fn found_clique_is_a_clique() {
        // two K4's sharing a vertex plus noise
        let mut edges = vec![];
        for s in [[0u32, 1, 2, 3], [3, 4, 5, 6]] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((s[i], s[j]));
                }
            }
        }
        edges.push((0, 6));
        let g = Graph::from_edges(8, edges);
        let c = find_clique(&g, 4).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(g.has_edge(c[i], c[j]));
            }
        }
        assert!(find_clique(&g, 5).is_none());
    }

    #[test]
    fn dimacs_is_one_based() {
        let g = Graph::from_edges(3, [(0, 1), (2, 1)]);
        assert_eq!(g.to_dimacs(), "p edge 3 2\ne 1 2\ne 2 3\n");
    }
}
