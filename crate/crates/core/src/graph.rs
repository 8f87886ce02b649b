//! Finite undirected multigraphs: distances, blocks, circuit counts and the
//! four-point hyperbolicity constant.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU32, Ordering};

pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    pub edges: Vec<(u32, u32)>,
    /// Per vertex: (neighbour, edge id).
    pub adj: Vec<Vec<(u32, u32)>>,
}

impl Graph {
    pub fn new(n: usize) -> Graph {
        Graph { edges: vec![], adj: vec![vec![]; n] }
    }

    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Graph {
        let mut g = Graph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_vertex(&mut self) -> u32 {
        self.adj.push(vec![]);
        (self.adj.len() - 1) as u32
    }

    pub fn add_edge(&mut self, a: u32, b: u32) -> u32 {
        let id = self.edges.len() as u32;
        self.edges.push((a, b));
        self.adj[a as usize].push((b, id));
        if a != b {
            self.adj[b as usize].push((a, id));
        }
        id
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn find_edge(&self, a: u32, b: u32) -> Option<u32> {
        self.adj[a as usize].iter().find(|(x, _)| *x == b).map(|(_, e)| *e)
    }

    pub fn bfs(&self, src: u32) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.num_vertices()];
        dist[src as usize] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(x) = q.pop_front() {
            let d = dist[x as usize] + 1;
            for &(y, _) in &self.adj[x as usize] {
                if dist[y as usize] == UNREACHABLE {
                    dist[y as usize] = d;
                    q.push_back(y);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.num_vertices() == 0 || self.bfs(0).iter().all(|&d| d != UNREACHABLE)
    }

    /// Induced subgraph on `verts`, with the old-to-new vertex map.
    pub fn induced(&self, verts: &[u32]) -> (Graph, Vec<u32>) {
        let mut map = vec![UNREACHABLE; self.num_vertices()];
        for (i, &v) in verts.iter().enumerate() {
            map[v as usize] = i as u32;
        }
        let mut g = Graph::new(verts.len());
        for &(a, b) in &self.edges {
            let (x, y) = (map[a as usize], map[b as usize]);
            if x != UNREACHABLE && y != UNREACHABLE {
                g.add_edge(x, y);
            }
        }
        (g, map)
    }

    /// Biconnected components as sorted vertex lists (bridges included).
    pub fn blocks(&self) -> Vec<Vec<u32>> {
        let n = self.num_vertices();
        let mut disc = vec![UNREACHABLE; n];
        let mut low = vec![0u32; n];
        let mut time = 0u32;
        let mut estack: Vec<u32> = Vec::new();
        let mut out = Vec::new();
        for root in 0..n {
            if disc[root] != UNREACHABLE {
                continue;
            }
            if self.adj[root].is_empty() {
                out.push(vec![root as u32]);
                disc[root] = time;
                time += 1;
                continue;
            }
            // (vertex, parent edge, next adjacency index)
            let mut stack: Vec<(u32, u32, usize)> = vec![(root as u32, UNREACHABLE, 0)];
            disc[root] = time;
            low[root] = time;
            time += 1;
            while let Some(&mut (v, pe, ref mut i)) = stack.last_mut() {
                let vu = v as usize;
                if *i < self.adj[vu].len() {
                    let (w, e) = self.adj[vu][*i];
                    *i += 1;
                    if e == pe {
                        continue;
                    }
                    let wu = w as usize;
                    if disc[wu] == UNREACHABLE {
                        estack.push(e);
                        disc[wu] = time;
                        low[wu] = time;
                        time += 1;
                        stack.push((w, e, 0));
                    } else if disc[wu] < disc[vu] {
                        estack.push(e);
                        low[vu] = low[vu].min(disc[wu]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        let pu = p as usize;
                        low[pu] = low[pu].min(low[vu]);
                        if low[vu] >= disc[pu] {
                            let mut verts = Vec::new();
                            while let Some(e) = estack.pop() {
                                let (a, b) = self.edges[e as usize];
                                verts.push(a);
                                verts.push(b);
                                if e == pe {
                                    break;
                                }
                            }
                            verts.sort_unstable();
                            verts.dedup();
                            out.push(verts);
                        }
                    }
                }
            }
        }
        out
    }

    /// Embedded cycles of length at most `n` through edge `e`.
    pub fn circuits_through(&self, e: u32, n: usize) -> u64 {
        let (u, v) = self.edges[e as usize];
        if u == v {
            return u64::from(n >= 1);
        }
        if n < 2 {
            return 0;
        }
        let du = self.bfs(u);
        let mut visited = vec![false; self.num_vertices()];
        visited[v as usize] = true;
        let mut count = 0u64;
        self.count_paths(v, u, e, n - 1, 0, &du, &mut visited, &mut count);
        count
    }

    #[allow(clippy::too_many_arguments)]
    fn count_paths(
        &self,
        x: u32,
        target: u32,
        skip: u32,
        max: usize,
        len: usize,
        du: &[u32],
        visited: &mut [bool],
        count: &mut u64,
    ) {
        for &(y, eid) in &self.adj[x as usize] {
            if eid == skip {
                continue;
            }
            if y == target {
                *count += 1;
                continue;
            }
            let yu = y as usize;
            if visited[yu] || du[yu] == UNREACHABLE || len + 1 + du[yu] as usize > max {
                continue;
            }
            visited[yu] = true;
            self.count_paths(y, target, skip, max, len + 1, du, visited, count);
            visited[yu] = false;
        }
    }

    /// All-pairs distances as a dense row-major matrix.
    pub fn distances(&self) -> Vec<u32> {
        let n = self.num_vertices();
        let mut out = vec![0u32; n * n];
        run_parallel(n, |s| self.bfs(s as u32))
            .into_iter()
            .enumerate()
            .for_each(|(s, row)| out[s * n..(s + 1) * n].copy_from_slice(&row));
        out
    }

    /// Twice the four-point hyperbolicity constant, exact: the maximum over
    /// blocks, each scanned over distance-sorted pairs with early exit.
    pub fn twice_delta(&self) -> u32 {
        let mut best = 0u32;
        let mut blocks = self.blocks();
        blocks.sort_by_key(|b| std::cmp::Reverse(b.len()));
        for b in blocks {
            if b.len() < 4 {
                continue;
            }
            let (sub, _) = self.induced(&b);
            best = best.max(sub.twice_delta_connected(best));
        }
        best
    }

    /// Four-point scan of a connected graph, returning max(`floor`, 2δ).
    fn twice_delta_connected(&self, floor: u32) -> u32 {
        let n = self.num_vertices();
        let d = self.distances();
        let mut pairs: Vec<(u32, u32, u32)> = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((d[a * n + b], a as u32, b as u32));
            }
        }
        pairs.sort_unstable_by_key(|x| std::cmp::Reverse(x.0));
        let best = AtomicU32::new(floor);
        let chunks = 64usize.min(pairs.len().max(1));
        let pairs = &pairs;
        let d = &d;
        run_parallel(chunks, |c| {
            let mut i = c;
            while i < pairs.len() {
                let (dab, a, b) = pairs[i];
                if 2 * dab <= best.load(Ordering::Relaxed) {
                    break;
                }
                let (a, b) = (a as usize, b as usize);
                let mut local = best.load(Ordering::Relaxed);
                for &(dcd, c, e) in &pairs[..i] {
                    let (c, e) = (c as usize, e as usize);
                    let s1 = dab + dcd;
                    let s2 = d[a * n + c] + d[b * n + e];
                    let s3 = d[a * n + e] + d[b * n + c];
                    let m = s2.max(s3);
                    if s1 > m && s1 - m > local {
                        local = s1 - m;
                    }
                }
                best.fetch_max(local, Ordering::Relaxed);
                i += chunks;
            }
        });
        best.load(Ordering::Relaxed)
    }
}

/// Runs `f` on `0..n` across the available cores, collecting in order.
pub fn run_parallel<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let threads = std::thread::available_parallelism().map(|x| x.get()).unwrap_or(1).min(n.max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<(usize, T)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                s.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= n {
                            break;
                        }
                        local.push((i, f(i)));
                    }
                    local
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    results.sort_by_key(|(i, _)| *i);
    results.into_iter().map(|(_, t)| t).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> Graph {
        Graph::from_edges(n as usize, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    fn complete(n: u32) -> Graph {
        let mut e = vec![];
        for a in 0..n {
            for b in a + 1..n {
                e.push((a, b));
            }
        }
        Graph::from_edges(n as usize, &e)
    }

    #[test]
    fn circuit_counts() {
        assert_eq!(cycle(6).circuits_through(0, 8), 1);
        assert_eq!(cycle(6).circuits_through(0, 5), 0);
        let tree = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]);
        assert_eq!(tree.circuits_through(1, 10), 0);
        // two triangles and two 4-cycles contain a given edge of K4
        assert_eq!(complete(4).circuits_through(0, 4), 4);
        assert_eq!(complete(4).circuits_through(0, 3), 2);
    }

    #[test]
    fn deltas() {
        let tree = Graph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
        assert_eq!(tree.twice_delta(), 0);
        assert_eq!(cycle(6).twice_delta(), 2);
        assert_eq!(cycle(4).twice_delta(), 2);
        assert_eq!(complete(5).twice_delta(), 0);
    }

    #[test]
    fn blocks_of_bowtie() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]);
        let mut b = g.blocks();
        b.sort();
        assert_eq!(b, vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5]]);
    }
}
