//! Quasiconvexity witnesses L̄ ⊆ K̄ for tamely generated subgroups, exact
//! κ measurement on windows, and the hypothesis pipeline.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::bass_serre::{coset_form, Splitting, TreeError, TreeWindow};
use crate::fine::{quotient, CopyKind, FineError, FineWindow, Quotient};
use crate::gog::{GogError, GraphOfGroups, Item, NormalForm};
use crate::graph::{run_parallel, Graph, UNREACHABLE};
use crate::group::{GroupElement, GroupKind};
use crate::input::TameSpec;
use crate::subgroup::Subgroup;

pub const DEFAULT_MAX_GEODESICS: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QcError {
    #[error(transparent)]
    Gog(#[from] GogError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Fine(#[from] FineError),
    #[error("disconnected selection: {0}")]
    DisconnectedSelection(String),
    #[error("empty subgraph")]
    EmptySubgraph,
}

/// Geodesic cap, overridable through `BSK_MAX_GEODESICS`.
pub fn geodesic_cap() -> u64 {
    std::env::var("BSK_MAX_GEODESICS").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_MAX_GEODESICS)
}

/// A selected tree vertex `c·G_v` with `H_v ≤ G_v`.
#[derive(Clone, Debug)]
pub struct Selected {
    pub vertex: usize,
    pub tree_vertex: usize,
    /// `y` with `c·γ_v = rep·y`, the offset of the coset inside the copy.
    pub shift: GroupElement,
    pub subgroup: Subgroup,
    /// Generators of `H_v` conjugated into G.
    pub conjugated: Vec<NormalForm>,
}

#[derive(Clone, Debug)]
pub struct TamePresentation {
    pub id: String,
    pub selected: Vec<Selected>,
    pub connecting: Vec<NormalForm>,
}

impl TamePresentation {
    pub fn resolve(g: &GraphOfGroups, t: &TreeWindow, spec: &TameSpec) -> Result<TamePresentation, QcError> {
        let mut selected = Vec::new();
        for s in &spec.vertices {
            let v = g.vertex_index(&s.vertex)?;
            let c = g.normal_form(&g.parse_global(&s.coset)?);
            let mut items = g.items_of(&c);
            items.extend(g.tree_path(g.base, v).into_iter().map(|(e, f)| Item::Edge(e, f)));
            let nf = g.normal_form_items(g.base, &items)?;
            let tree_vertex = t
                .lookup(&coset_form(g, &nf))
                .ok_or_else(|| TreeError::SelectionOutsideWindow(format!("{} at {}", s.coset, s.vertex)))?;
            let grp = &g.vertices[v].group;
            let gens = s
                .generators
                .iter()
                .map(|w| {
                    grp.parse_word(w)
                        .and_then(|w| grp.reduce(&w))
                        .map_err(|source| GogError::Group { context: format!("tame presentation {}", spec.id), source })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let subgroup = Subgroup::new(grp, &gens);
            let back = g.inverse_items(&nf);
            let conjugated = gens
                .iter()
                .filter(|x| !grp.is_identity(x))
                .map(|x| {
                    let mut it = g.items_of(&nf);
                    it.push(Item::Syllable(v, x.clone()));
                    it.extend(back.iter().cloned());
                    g.normal_form_items(g.base, &it)
                })
                .collect::<Result<Vec<_>, _>>()?;
            selected.push(Selected { vertex: v, tree_vertex, shift: nf.last().clone(), subgroup, conjugated });
        }
        let connecting = spec
            .connecting
            .iter()
            .map(|w| Ok(g.normal_form(&g.parse_global(w)?)))
            .collect::<Result<Vec<_>, QcError>>()?;
        Ok(TamePresentation { id: spec.id.clone(), selected, connecting })
    }

    pub fn generators(&self) -> Vec<NormalForm> {
        let mut out: Vec<NormalForm> = self.selected.iter().flat_map(|s| s.conjugated.iter().cloned()).collect();
        out.extend(self.connecting.iter().cloned());
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kappa {
    pub kappa: u32,
    /// Largest d_L̄/d_K̄ over pairs, as (numerator, denominator).
    pub distortion: (u32, u32),
    pub max_geodesics: u64,
    pub capped: bool,
    pub pairs: usize,
}

impl Kappa {
    pub fn distortion_string(&self) -> String {
        let (n, d) = self.distortion;
        if d == 0 {
            "inf".into()
        } else if n % d == 0 {
            format!("{}", n / d)
        } else {
            let gcd = gcd(n, d);
            format!("{}/{}", n / gcd, d / gcd)
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Debug)]
pub struct QuasiconvexWitness {
    pub radius: usize,
    pub window: usize,
    pub tree: Splitting,
    /// Vertices of L in K.
    pub k_vertices: BTreeSet<u32>,
    /// L̄ as K̄ vertex and edge ids.
    pub vertices: BTreeSet<u32>,
    pub edges: BTreeSet<u32>,
    /// Size of each local piece Lᵢ before the H-closure.
    pub local_sizes: Vec<usize>,
}

/// Builds L = F_H ∪ H·Lᵢ in K and its image L̄ in K̄.
pub fn build_l(
    g: &GraphOfGroups,
    t: &TreeWindow,
    k: &FineWindow,
    q: &Quotient,
    h: &TamePresentation,
) -> Result<QuasiconvexWitness, QcError> {
    let gens = h.generators();
    let seeds: Vec<usize> = h.selected.iter().map(|s| s.tree_vertex).collect();
    let stabilized: Vec<bool> = h.selected.iter().map(|s| !s.subgroup.is_trivial()).collect();
    let tree = t.minimal_subtree(g, &gens, &seeds, &stabilized);
    let mut required: HashMap<usize, BTreeSet<u32>> = HashMap::new();
    for &te in &tree.edges {
        let (a, b) = k.forest.edges[te];
        for f in [a, b] {
            let kv = k.forest.vertices[f].k_vertex;
            required.entry(k.copy_of(kv)).or_default().insert(kv);
        }
    }
    let mut graphs: HashMap<usize, Graph> = HashMap::new();
    let mut l: BTreeSet<u32> = BTreeSet::new();
    let mut local_sizes = Vec::new();
    for s in &h.selected {
        let ci = s.tree_vertex;
        let mut pts: BTreeSet<u32> = local_points(g, k, ci, s);
        pts.extend(required.get(&ci).into_iter().flatten().copied());
        connect_in_copy(k, ci, &mut pts, &mut graphs);
        local_sizes.push(pts.len());
        l.extend(pts);
    }
    for &tv in &tree.vertices {
        if let Some(r) = required.get(&tv) {
            l.extend(r.iter().copied());
        }
    }
    let mut all = gens.clone();
    for x in &gens {
        all.push(g.normal_form_items(g.base, &g.inverse_items(x))?);
    }
    let mut queue: VecDeque<u32> = l.iter().copied().collect();
    while let Some(z) = queue.pop_front() {
        for x in &all {
            if let Some(y) = k.act(g, t, x, z) {
                if l.insert(y) {
                    queue.push_back(y);
                }
            }
        }
    }
    let mut by_copy: HashMap<usize, BTreeSet<u32>> = HashMap::new();
    for &z in &l {
        by_copy.entry(k.copy_of(z)).or_default().insert(z);
    }
    let mut copies: Vec<usize> = by_copy.keys().copied().collect();
    copies.sort_unstable();
    for ci in copies {
        let mut pts = by_copy.remove(&ci).unwrap();
        connect_in_copy(k, ci, &mut pts, &mut graphs);
        l.extend(pts);
    }
    let vertices: BTreeSet<u32> = l.iter().map(|&z| q.class_of[z as usize]).collect();
    let edges: BTreeSet<u32> = k
        .vertex_edges()
        .enumerate()
        .filter(|(_, (_, a, b))| l.contains(a) && l.contains(b))
        .map(|(i, _)| i as u32)
        .collect();
    let lv: Vec<u32> = vertices.iter().copied().collect();
    let seen = restricted_bfs(&q.graph, &edges, lv[0]);
    if let Some(&bad) = lv.iter().find(|&&v| seen[v as usize] == UNREACHABLE) {
        return Err(QcError::DisconnectedSelection(format!(
            "K̄ vertex {bad} of L̄ is not joined to the rest inside (R={}, L={})",
            t.radius, t.window
        )));
    }
    Ok(QuasiconvexWitness { radius: t.radius, window: t.window, tree, k_vertices: l, vertices, edges, local_sizes })
}

/// Lᵢ before closure: a cone point for parabolic H_v, the core-graph image
/// for free H_v, the coset elements otherwise.
fn local_points(g: &GraphOfGroups, k: &FineWindow, ci: usize, s: &Selected) -> BTreeSet<u32> {
    let c = &k.copies[ci];
    let tpl = &k.templates[c.template];
    let grp = &g.vertices[s.vertex].group;
    let off = c.offset;
    if tpl.kind == CopyKind::Singleton {
        return BTreeSet::from([off]);
    }
    if s.subgroup.is_whole_group() {
        return (0..tpl.num_vertices() as u32).map(|i| off + i).collect();
    }
    let y = &s.shift;
    if s.subgroup.is_trivial() {
        return tpl.element_id(y).map(|i| off + i).into_iter().collect();
    }
    let periph = &g.vertices[s.vertex].peripherals;
    if let Some(kk) = (0..periph.len())
        .find(|&kk| !periph[kk].subgroup.is_trivial() && s.subgroup.is_subgroup_of(&periph[kk].subgroup))
    {
        return tpl.chosen(g, kk, y).map(|i| off + i).into_iter().collect();
    }
    let yi = grp.invert(y);
    let mut pts: BTreeSet<u32> = BTreeSet::new();
    for (i, z) in tpl.elements.iter().enumerate() {
        let w = grp.mul(&yi, z);
        let inside = match &grp.kind {
            GroupKind::Free => s.subgroup.core().unwrap().trace(&grp.word_of(&w)).is_some(),
            _ => s.subgroup.contains(&w),
        };
        if inside {
            pts.insert(off + i as u32);
        }
    }
    // cones met at least twice carry geodesics between coset points
    let mut hits: HashMap<u32, usize> = HashMap::new();
    for &(a, b) in &tpl.edges[tpl.cayley_edges..] {
        if pts.contains(&(off + a)) {
            *hits.entry(b).or_default() += 1;
        }
    }
    pts.extend(hits.into_iter().filter(|&(_, n)| n >= 2).map(|(b, _)| off + b));
    pts
}

/// Joins every point of `pts` inside copy `ci` by greedy shortest paths.
fn connect_in_copy(k: &FineWindow, ci: usize, pts: &mut BTreeSet<u32>, graphs: &mut HashMap<usize, Graph>) {
    if pts.len() <= 1 {
        return;
    }
    let c = &k.copies[ci];
    let off = c.offset;
    let gr = graphs.entry(c.template).or_insert_with(|| k.templates[c.template].graph());
    let local: BTreeSet<u32> = pts.iter().map(|&z| z - off).collect();
    let mut joined: BTreeSet<u32> = BTreeSet::new();
    let first = *local.iter().next().unwrap();
    flood(gr, &local, first, &mut joined);
    let mut added: BTreeSet<u32> = BTreeSet::new();
    while let Some(&target) = local.iter().find(|z| !joined.contains(z)) {
        // multi-source BFS from the joined part to the nearest missing point
        let n = gr.num_vertices();
        let mut prev = vec![UNREACHABLE; n];
        let mut q: VecDeque<u32> = VecDeque::new();
        for &z in &joined {
            prev[z as usize] = z;
            q.push_back(z);
        }
        let mut hit = None;
        while let Some(x) = q.pop_front() {
            if local.contains(&x) && !joined.contains(&x) {
                hit = Some(x);
                break;
            }
            for &(y, _) in &gr.adj[x as usize] {
                if prev[y as usize] == UNREACHABLE {
                    prev[y as usize] = x;
                    q.push_back(y);
                }
            }
        }
        let Some(mut x) = hit else {
            joined.insert(target);
            continue;
        };
        while prev[x as usize] != x {
            added.insert(x);
            joined.insert(x);
            x = prev[x as usize];
        }
        let everything: BTreeSet<u32> = local.union(&added).copied().collect();
        let start = *joined.iter().next().unwrap();
        joined.clear();
        flood(gr, &everything, start, &mut joined);
    }
    pts.extend(added.into_iter().map(|z| z + off));
}

fn flood(gr: &Graph, allowed: &BTreeSet<u32>, start: u32, out: &mut BTreeSet<u32>) {
    let mut q = VecDeque::from([start]);
    out.insert(start);
    while let Some(x) = q.pop_front() {
        for &(y, _) in &gr.adj[x as usize] {
            if allowed.contains(&y) && out.insert(y) {
                q.push_back(y);
            }
        }
    }
}

fn restricted_bfs(gr: &Graph, edges: &BTreeSet<u32>, src: u32) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; gr.num_vertices()];
    dist[src as usize] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(x) = q.pop_front() {
        for &(y, e) in &gr.adj[x as usize] {
            if edges.contains(&e) && dist[y as usize] == UNREACHABLE {
                dist[y as usize] = dist[x as usize] + 1;
                q.push_back(y);
            }
        }
    }
    dist
}

/// Exact κ: the largest distance to L̄ of a vertex on some K̄-geodesic
/// between two L̄ vertices.
pub fn measure_kappa(
    kbar: &Graph,
    vertices: &BTreeSet<u32>,
    edges: &BTreeSet<u32>,
    cap: u64,
) -> Result<Kappa, QcError> {
    if vertices.is_empty() {
        return Err(QcError::EmptySubgraph);
    }
    let n = kbar.num_vertices();
    let mut dl = vec![UNREACHABLE; n];
    let mut q: VecDeque<u32> = VecDeque::new();
    for &v in vertices {
        dl[v as usize] = 0;
        q.push_back(v);
    }
    while let Some(x) = q.pop_front() {
        for &(y, _) in &kbar.adj[x as usize] {
            if dl[y as usize] == UNREACHABLE {
                dl[y as usize] = dl[x as usize] + 1;
                q.push_back(y);
            }
        }
    }
    let lv: Vec<u32> = vertices.iter().copied().collect();
    let per: Vec<(u32, (u32, u32), u64, bool)> = run_parallel(lv.len(), |i| {
        let p = lv[i];
        let mut dist = vec![UNREACHABLE; n];
        let mut best = vec![0u32; n];
        let mut count = vec![0u64; n];
        let mut order = Vec::with_capacity(n);
        dist[p as usize] = 0;
        count[p as usize] = 1;
        best[p as usize] = dl[p as usize];
        let mut q = VecDeque::from([p]);
        while let Some(x) = q.pop_front() {
            order.push(x);
            for &(y, _) in &kbar.adj[x as usize] {
                let yu = y as usize;
                if dist[yu] == UNREACHABLE {
                    dist[yu] = dist[x as usize] + 1;
                    best[yu] = dl[yu];
                    q.push_back(y);
                }
                if dist[yu] == dist[x as usize] + 1 {
                    count[yu] = (count[yu] + count[x as usize]).min(cap);
                    best[yu] = best[yu].max(best[x as usize]);
                }
            }
        }
        let dlbar = restricted_bfs(kbar, edges, p);
        let mut kappa = 0;
        let mut ratio = (0u32, 1u32);
        let mut geo = 0u64;
        for &qv in &lv[i + 1..] {
            let qu = qv as usize;
            kappa = kappa.max(best[qu]);
            geo = geo.max(count[qu]);
            let (a, b) = if dlbar[qu] == UNREACHABLE { (1, 0) } else { (dlbar[qu], dist[qu]) };
            if (a as u64) * (ratio.1 as u64) > (ratio.0 as u64) * (b as u64) {
                ratio = (a, b);
            }
        }
        (kappa, ratio, geo, geo >= cap)
    });
    let mut out =
        Kappa { kappa: 0, distortion: (1, 1), max_geodesics: 0, capped: false, pairs: lv.len() * (lv.len() - 1) / 2 };
    if lv.len() == 1 {
        out.max_geodesics = 1;
    }
    for (kappa, r, geo, capped) in per {
        out.kappa = out.kappa.max(kappa);
        if (r.0 as u64) * (out.distortion.1 as u64) > (out.distortion.0 as u64) * (r.1 as u64) {
            out.distortion = r;
        }
        out.max_geodesics = out.max_geodesics.max(geo);
        out.capped |= capped;
    }
    Ok(out)
}

/// One theorem hypothesis evaluated on the decidable classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    pub name: &'static str,
    pub statement: &'static str,
    pub holds: bool,
    pub witness: Option<String>,
}

pub fn check_hypotheses(g: &GraphOfGroups) -> Vec<Hypothesis> {
    let rep = g.validate();
    let a = rep.ends.iter().find(|e| !e.total);
    let c = rep.vertices.iter().find(|v| !v.edge_images_malnormal);
    let b_witness: Vec<String> = g
        .edges
        .iter()
        .flat_map(|e| {
            e.ends.iter().map(move |ee| match &ee.image.group.kind {
                GroupKind::Free => format!("{}: finitely generated in a free group", e.id),
                GroupKind::Abelian { .. } => format!("{}: subgroup of an abelian group", e.id),
                GroupKind::Finite(_) => format!("{}: subgroup of a finite group", e.id),
            })
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    vec![
        Hypothesis {
            name: "a",
            statement: "each edge group is total",
            holds: a.is_none(),
            witness: a.map(|e| {
                format!(
                    "edge {} end {} at {}: {}",
                    e.edge,
                    e.end,
                    e.vertex,
                    e.total_witness.clone().unwrap_or_default()
                )
            }),
        },
        Hypothesis {
            name: "b",
            statement: "each edge group is relatively quasiconvex",
            holds: true,
            witness: (!b_witness.is_empty()).then(|| b_witness.join("; ")),
        },
        Hypothesis {
            name: "c",
            statement: "edge groups at each vertex are almost malnormal",
            holds: c.is_none(),
            witness: c.map(|v| format!("vertex {}: {}", v.vertex, v.edge_images_witness.clone().unwrap_or_default())),
        },
    ]
}

#[derive(Clone, Debug)]
pub struct QcRun {
    pub radius: usize,
    pub window: usize,
    pub witness: QuasiconvexWitness,
    pub kappa: Kappa,
}

#[derive(Clone, Debug)]
pub struct QcVerdict {
    pub hypotheses: Vec<Hypothesis>,
    pub skipped: bool,
    pub runs: Vec<QcRun>,
    pub stable: bool,
    pub verdict: String,
}

impl QcVerdict {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.holds)
    }
}

/// One window run: build K̄ and L̄ and measure κ.
pub fn run_window(g: &GraphOfGroups, spec: &TameSpec, radius: usize, window: usize) -> Result<QcRun, QcError> {
    let t = TreeWindow::build(g, radius, window)?;
    let k = FineWindow::build(g, &t)?;
    let q = quotient(&k);
    let h = TamePresentation::resolve(g, &t, spec)?;
    let witness = build_l(g, &t, &k, &q, &h)?;
    let kappa = measure_kappa(&q.graph, &witness.vertices, &witness.edges, geodesic_cap())?;
    Ok(QcRun { radius, window, witness, kappa })
}

pub fn verify_relative_quasiconvexity(
    g: &GraphOfGroups,
    spec: &TameSpec,
    windows: &[(usize, usize)],
    skip_hypotheses: bool,
) -> Result<QcVerdict, QcError> {
    let hypotheses = check_hypotheses(g);
    let failed: Vec<&Hypothesis> = hypotheses.iter().filter(|h| !h.holds).collect();
    if !failed.is_empty() && !skip_hypotheses {
        let names: Vec<String> = failed
            .iter()
            .map(|h| format!("({}) {} fails: {}", h.name, h.statement, h.witness.clone().unwrap_or_default()))
            .collect();
        return Ok(QcVerdict { hypotheses, skipped: false, runs: vec![], stable: false, verdict: names.join("; ") });
    }
    let mut ws = windows.to_vec();
    ws.sort_unstable();
    ws.dedup();
    let runs = ws.iter().map(|&(r, l)| run_window(g, spec, r, l)).collect::<Result<Vec<_>, _>>()?;
    let stable = runs.len() >= 2 && runs[runs.len() - 1].kappa.kappa == runs[runs.len() - 2].kappa.kappa;
    let kappa = runs.last().map(|r| r.kappa.kappa).unwrap_or(0);
    let witness =
        if stable { format!("witness stable at κ={kappa}") } else { format!("witness not stable (last κ={kappa})") };
    let head = if failed.is_empty() {
        "hypotheses hold".to_string()
    } else {
        let names: Vec<String> = failed.iter().map(|h| format!("({})", h.name)).collect();
        format!("hypotheses {} fail and were skipped, no soundness claim", names.join(", "))
    };
    let skipped = !failed.is_empty();
    Ok(QcVerdict { hypotheses, skipped, runs, stable, verdict: format!("{head}; {witness}") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gog::fixtures::example;
    use crate::input::SelectedSpec;

    fn cycle(n: u32) -> Graph {
        Graph::from_edges(n as usize, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    fn tame(vertex_gens: &[&str], connecting: &[&str]) -> TameSpec {
        TameSpec {
            id: "H".into(),
            vertices: vec![SelectedSpec {
                vertex: "v".into(),
                coset: "1".into(),
                generators: vertex_gens.iter().map(|s| s.to_string()).collect(),
            }],
            connecting: connecting.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn kappa_on_small_graphs() {
        let c = cycle(6);
        let single = BTreeSet::from([0]);
        assert_eq!(measure_kappa(&c, &single, &BTreeSet::new(), 100).unwrap().kappa, 0);
        let all: BTreeSet<u32> = (0..6).collect();
        let edges: BTreeSet<u32> = (0..6).collect();
        assert_eq!(measure_kappa(&c, &all, &edges, 100).unwrap().kappa, 0);
        // path 0-1-2-3 between antipodes; the other geodesic 0-5-4-3 strays by 1
        let path: BTreeSet<u32> = (0..4).collect();
        let pe: BTreeSet<u32> = (0..3).collect();
        let k = measure_kappa(&c, &path, &pe, 100).unwrap();
        assert_eq!(k.kappa, 1);
        assert_eq!(k.max_geodesics, 2);
        assert_eq!(k.distortion, (1, 1));
        assert_eq!(measure_kappa(&c, &BTreeSet::new(), &BTreeSet::new(), 1), Err(QcError::EmptySubgraph));
    }

    #[test]
    fn geodesic_cap_flags() {
        let c = cycle(6);
        let ends = BTreeSet::from([0, 3]);
        let k = measure_kappa(&c, &ends, &BTreeSet::new(), 2).unwrap();
        assert!(k.capped);
        assert_eq!(k.distortion_string(), "inf");
    }

    #[test]
    fn parabolic_witness_is_a_point() {
        let g = example();
        let run = run_window(&g, &tame(&["ab"], &["t"]), 2, 4).unwrap();
        assert_eq!(run.witness.vertices.len(), 1);
        assert_eq!(run.kappa.kappa, 0);
    }

    #[test]
    fn vertex_group_witness_is_convex() {
        let g = example();
        let run = run_window(&g, &tame(&["a", "b"], &[]), 2, 4).unwrap();
        assert_eq!(run.kappa.kappa, 0);
        assert!(run.witness.vertices.len() > 100);
    }

    #[test]
    fn cyclic_witness_is_axis() {
        let g = example();
        let run = run_window(&g, &tame(&["a"], &[]), 1, 3).unwrap();
        assert_eq!(run.witness.vertices.len(), 7);
        assert_eq!(run.witness.tree.vertices.len(), 1);
    }

    #[test]
    fn example_hypotheses() {
        let g = example();
        let hs = check_hypotheses(&g);
        assert!(!hs[0].holds && hs[1].holds && !hs[2].holds);
        let v = verify_relative_quasiconvexity(&g, &tame(&["a"], &[]), &[(1, 3), (1, 4)], false).unwrap();
        assert!(v.runs.is_empty() && v.verdict.starts_with("(a)"));
        let v = verify_relative_quasiconvexity(&g, &tame(&["a"], &[]), &[(1, 3), (1, 4)], true).unwrap();
        assert!(v.skipped && v.stable);
    }
}
