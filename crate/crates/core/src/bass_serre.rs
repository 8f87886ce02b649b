//! Finite windows of the Bass-Serre tree, the partial action of the
//! fundamental group on them and minimal invariant subtrees.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::gog::{GraphOfGroups, Item, NormalForm};
use crate::group::{GroupElement, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("word window {window} is below the minimum {needed}")]
    WindowTooSmall { window: usize, needed: usize },
    #[error("tree vertex {0} is not in the window")]
    NotInWindow(usize),
    #[error("selected vertex `{0}` lies outside the window")]
    SelectionOutsideWindow(String),
}

/// A coset `g·G_v`, stored as a normal form whose last syllable is trivial.
#[derive(Clone, Debug)]
pub struct TreeVertex {
    pub form: NormalForm,
    pub vertex: usize,
    pub depth: usize,
    /// Length of the representative: syllable lengths plus stable letters.
    pub len: usize,
    pub parent: Option<(usize, usize)>,
}

/// A tree edge `g·G_e`, oriented from its ι-end to its τ-end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug)]
pub struct TreeWindow {
    pub radius: usize,
    pub window: usize,
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<TreeEdge>,
    /// Incident tree edges per tree vertex.
    pub incident: Vec<Vec<usize>>,
    index: HashMap<NormalForm, usize>,
}

/// Canonical coset key of a path word: drop the last syllable.
pub fn coset_form(g: &GraphOfGroups, nf: &NormalForm) -> NormalForm {
    let mut f = nf.clone();
    let v = f.end_vertex(g);
    *f.syllables.last_mut().unwrap() = g.vertices[v].group.identity();
    f
}

/// Canonical left coset representatives of each edge image inside its
/// vertex group, sorted ShortLex and bounded by `max_len`.
fn coset_reps(g: &GraphOfGroups, max_len: usize) -> Vec<[Vec<GroupElement>; 2]> {
    let mut balls: HashMap<usize, Vec<GroupElement>> = HashMap::new();
    g.edges
        .iter()
        .map(|e| {
            let mut out: [Vec<GroupElement>; 2] = [vec![], vec![]];
            for (k, end) in e.ends.iter().enumerate() {
                let vg = &g.vertices[end.vertex].group;
                let ball = balls.entry(end.vertex).or_insert_with(|| vg.ball(max_len));
                out[k] = ball.iter().filter(|x| &end.image.left_rep(x).0 == *x).cloned().collect();
            }
            out
        })
        .collect()
}

/// New vertex found from a parent: parent, coset key, length, edge, direction.
type Candidate = (usize, NormalForm, usize, usize, bool);

impl TreeWindow {
    /// Breadth-first window of radius `radius` whose coset representatives
    /// have total length at most `window`.
    pub fn build(g: &GraphOfGroups, radius: usize, window: usize) -> Result<TreeWindow, TreeError> {
        if window < 1 {
            return Err(TreeError::WindowTooSmall { window, needed: 1 });
        }
        let reps = coset_reps(g, window);
        let base = g.identity_form(g.base);
        let mut w = TreeWindow {
            radius,
            window,
            vertices: vec![TreeVertex { form: base.clone(), vertex: g.base, depth: 0, len: 0, parent: None }],
            edges: vec![],
            incident: vec![vec![]],
            index: HashMap::from([(base, 0)]),
        };
        let mut layer = vec![0usize];
        for depth in 1..=radius {
            let mut found: Vec<Candidate> = Vec::new();
            let mut fresh: BTreeSet<NormalForm> = BTreeSet::new();
            for &p in &layer {
                let pv = w.vertices[p].vertex;
                let plen = w.vertices[p].len;
                for (ei, e) in g.edges.iter().enumerate() {
                    for forward in [true, false] {
                        if e.source(forward) != pv {
                            continue;
                        }
                        let cost = plen + usize::from(!e.in_tree);
                        if cost > window {
                            continue;
                        }
                        let k = if forward { 0 } else { 1 };
                        for r in &reps[ei][k] {
                            if cost + g.vertices[pv].group.length(r) > window {
                                continue;
                            }
                            let mut items = g.items_of(&w.vertices[p].form);
                            items.push(Item::Syllable(pv, r.clone()));
                            items.push(Item::Edge(ei, forward));
                            let nf = g.normal_form_items(g.base, &items).expect("legal path");
                            let key = coset_form(g, &nf);
                            if w.index.contains_key(&key) || !fresh.insert(key.clone()) {
                                continue;
                            }
                            let len = g.nf_length(&key);
                            found.push((p, key, len, ei, forward));
                        }
                    }
                }
            }
            let mut keyed: Vec<((Word, usize), Candidate)> =
                found.into_iter().map(|f| ((g.to_global(&f.1), f.1.end_vertex(g)), f)).collect();
            keyed.sort_by(|a, b| a.0.cmp(&b.0));
            let mut next = Vec::new();
            for (_, (p, key, len, ei, forward)) in keyed {
                let idx = w.vertices.len();
                let te = w.edges.len();
                let (from, to) = if forward { (p, idx) } else { (idx, p) };
                w.edges.push(TreeEdge { edge: ei, from, to });
                w.incident[p].push(te);
                w.incident.push(vec![te]);
                w.vertices.push(TreeVertex {
                    vertex: key.end_vertex(g),
                    form: key.clone(),
                    depth,
                    len,
                    parent: Some((p, te)),
                });
                w.index.insert(key, idx);
                next.push(idx);
            }
            layer = next;
        }
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn lookup(&self, form: &NormalForm) -> Option<usize> {
        self.index.get(form).copied()
    }

    /// Element carrying the base vertex to tree vertex `i`, as a loop at the base.
    pub fn representative(&self, g: &GraphOfGroups, i: usize) -> NormalForm {
        let f = &self.vertices[i].form;
        let mut items = g.items_of(f);
        for (e, d) in g.tree_path(f.end_vertex(g), g.base) {
            items.push(Item::Edge(e, d));
        }
        g.normal_form_items(g.base, &items).expect("legal path")
    }

    /// Stabilizer descriptor `(h, v)` meaning `h·G_v·h⁻¹`.
    pub fn vertex_stabilizer(&self, g: &GraphOfGroups, i: usize) -> Result<(NormalForm, usize), TreeError> {
        if i >= self.len() {
            return Err(TreeError::NotInWindow(i));
        }
        Ok((self.representative(g, i), self.vertices[i].vertex))
    }

    /// Whether the element `x` (a loop at the base) fixes tree vertex `i`.
    pub fn stabilizes(&self, g: &GraphOfGroups, x: &NormalForm, i: usize) -> bool {
        let f = &self.vertices[i].form;
        let mut items: Vec<Item> = g.inverse_items(f);
        items.extend(g.items_of(x));
        items.extend(g.items_of(f));
        let start = f.end_vertex(g);
        g.normal_form_items(start, &items).expect("legal path").edges.is_empty()
    }

    /// Image of tree vertex `i` under `x`, when it lies in the window.
    pub fn act(&self, g: &GraphOfGroups, x: &NormalForm, i: usize) -> Option<usize> {
        let mut items = g.items_of(x);
        items.extend(g.items_of(&self.vertices[i].form));
        let nf = g.normal_form_items(g.base, &items).expect("legal path");
        self.lookup(&coset_form(g, &nf))
    }

    /// Tree edge joining two window vertices, if any.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.incident[a].iter().copied().find(|&te| {
            let e = &self.edges[te];
            (e.from == a && e.to == b) || (e.from == b && e.to == a)
        })
    }

    pub fn act_edge(&self, g: &GraphOfGroups, x: &NormalForm, te: usize) -> Option<usize> {
        let e = &self.edges[te];
        let a = self.act(g, x, e.from)?;
        let b = self.act(g, x, e.to)?;
        self.edge_between(a, b).filter(|&t| self.edges[t].from == a)
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[i].iter().map(move |&te| {
            let e = &self.edges[te];
            if e.from == i {
                e.to
            } else {
                e.from
            }
        })
    }

    pub fn label(&self, g: &GraphOfGroups, i: usize) -> String {
        let v = &self.vertices[i];
        format!("{}·G_{}", g.display_nf(&v.form), g.vertices[v.vertex].id)
    }

    pub fn dot(&self, g: &GraphOfGroups) -> String {
        let mut s = String::from("graph T {\n");
        for i in 0..self.len() {
            let shape = if i == 0 { ", shape=doublecircle" } else { "" };
            s += &format!("  n{i} [label=\"{}\"{shape}];\n", self.label(g, i));
        }
        for e in &self.edges {
            s += &format!("  n{} -- n{} [label=\"{}\"];\n", e.from, e.to, g.edges[e.edge].id);
        }
        s + "}\n"
    }

    /// In-window orbit of `seeds` under the group generated by `gens`.
    pub fn orbit(&self, g: &GraphOfGroups, gens: &[NormalForm], seeds: &[usize]) -> BTreeSet<usize> {
        let all = with_inverses(g, gens);
        let mut seen: BTreeSet<usize> = seeds.iter().copied().collect();
        let mut q: VecDeque<usize> = seeds.iter().copied().collect();
        while let Some(i) = q.pop_front() {
            for x in &all {
                if let Some(j) = self.act(g, x, i) {
                    if seen.insert(j) {
                        q.push_back(j);
                    }
                }
            }
        }
        seen
    }

    /// Smallest subtree containing `set`, as (vertices, edges).
    pub fn span(&self, set: &BTreeSet<usize>) -> (BTreeSet<usize>, BTreeSet<usize>) {
        let mut alive: Vec<bool> = vec![true; self.len()];
        let mut deg: Vec<usize> = self.incident.iter().map(|x| x.len()).collect();
        let mut q: VecDeque<usize> = (0..self.len()).filter(|&i| deg[i] <= 1 && !set.contains(&i)).collect();
        if set.is_empty() {
            return (BTreeSet::new(), BTreeSet::new());
        }
        while let Some(i) = q.pop_front() {
            if !alive[i] {
                continue;
            }
            alive[i] = false;
            for j in self.neighbors(i) {
                if alive[j] {
                    deg[j] -= 1;
                    if deg[j] <= 1 && !set.contains(&j) {
                        q.push_back(j);
                    }
                }
            }
        }
        let verts: BTreeSet<usize> = (0..self.len()).filter(|&i| alive[i]).collect();
        let edges = (0..self.edges.len()).filter(|&t| alive[self.edges[t].from] && alive[self.edges[t].to]).collect();
        (verts, edges)
    }

    /// Minimal subtree spanned by the in-window orbit of `selected` under
    /// `gens`, with the induced orbit decomposition.
    pub fn minimal_subtree(
        &self,
        g: &GraphOfGroups,
        gens: &[NormalForm],
        selected: &[usize],
        stabilized: &[bool],
    ) -> Splitting {
        let orbit = self.orbit(g, gens, selected);
        let (verts, edges) = self.span(&orbit);
        let all = with_inverses(g, gens);
        let vertex_orbits = classes(&verts, |i| all.iter().filter_map(|x| self.act(g, x, i)).collect());
        let edge_orbits = classes(&edges, |t| all.iter().filter_map(|x| self.act_edge(g, x, t)).collect());
        let stabilized_orbits = vertex_orbits
            .iter()
            .filter(|o| selected.iter().zip(stabilized).any(|(s, &nt)| nt && o.contains(s)))
            .count();
        Splitting { vertices: verts, edges, vertex_orbits, edge_orbits, stabilized_orbits }
    }
}

fn with_inverses(g: &GraphOfGroups, gens: &[NormalForm]) -> Vec<NormalForm> {
    let mut all = Vec::new();
    for x in gens {
        all.push(x.clone());
        all.push(g.normal_form_items(g.base, &g.inverse_items(x)).expect("legal path"));
    }
    all
}

/// Connected classes of `set` under the given adjacency.
fn classes(set: &BTreeSet<usize>, step: impl Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in set {
        if seen.contains(&s) {
            continue;
        }
        let mut class = vec![];
        let mut q = VecDeque::from([s]);
        seen.insert(s);
        while let Some(x) = q.pop_front() {
            class.push(x);
            for y in step(x) {
                if set.contains(&y) && seen.insert(y) {
                    q.push_back(y);
                }
            }
        }
        class.sort();
        out.push(class);
    }
    out
}

/// In-window picture of the minimal invariant subtree and its quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
    pub vertex_orbits: Vec<Vec<usize>>,
    pub edge_orbits: Vec<Vec<usize>>,
    pub stabilized_orbits: usize,
}
