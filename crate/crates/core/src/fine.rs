//! Vertex fine graphs, the tree of spaces K over a tree window, the
//! parabolic forest and the quotient K̄ collapsing parabolic trees.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::bass_serre::{coset_form, TreeWindow};
use crate::gog::{End, GraphOfGroups, Item, NormalForm};
use crate::graph::Graph;
use crate::group::{GroupElement, GroupKind};
use crate::stallings::is_malnormal_collection;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FineError {
    #[error("peripherals of vertex `{vertex}` are not malnormal ({witness})")]
    PeripheralNotMalnormal { vertex: String, witness: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CopyKind {
    Coned,
    Singleton,
    Finite,
}

/// A (G_v; ℙ_v)-graph window: elements of length at most `radius`, Cayley
/// edges, and one cone per nontrivial peripheral coset meeting the ball.
#[derive(Clone, Debug)]
pub struct VertexGraph {
    pub vertex: usize,
    pub radius: usize,
    pub kind: CopyKind,
    pub elements: Vec<GroupElement>,
    pub cones: Vec<(usize, GroupElement)>,
    pub edges: Vec<(u32, u32)>,
    pub cayley_edges: usize,
    elem_index: HashMap<GroupElement, u32>,
    cone_index: HashMap<(usize, GroupElement), u32>,
}

impl VertexGraph {
    pub fn num_vertices(&self) -> usize {
        self.elements.len() + self.cones.len()
    }

    pub fn is_cone(&self, id: u32) -> bool {
        id as usize >= self.elements.len()
    }

    pub fn element_id(&self, x: &GroupElement) -> Option<u32> {
        self.elem_index.get(x).copied()
    }

    pub fn cone_id(&self, k: usize, key: &GroupElement) -> Option<u32> {
        self.cone_index.get(&(k, key.clone())).copied()
    }

    /// Chosen vertex for the coset `r·P_k`: its cone, the element itself for
    /// a trivial peripheral, or the only vertex of a singleton.
    pub fn chosen(&self, g: &GraphOfGroups, k: usize, r: &GroupElement) -> Option<u32> {
        if self.kind == CopyKind::Singleton {
            return Some(0);
        }
        let p = &g.vertices[self.vertex].peripherals[k].subgroup;
        if p.is_trivial() {
            self.element_id(r)
        } else {
            self.cone_id(k, &p.coset_key(r))
        }
    }

    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.num_vertices(), &self.edges)
    }

    pub fn label(&self, g: &GraphOfGroups, id: u32) -> String {
        let vg = &g.vertices[self.vertex].group;
        if self.is_cone(id) {
            let (k, key) = &self.cones[id as usize - self.elements.len()];
            format!("{}·{}", vg.display(key), g.vertices[self.vertex].peripherals[*k].id)
        } else if self.kind == CopyKind::Singleton {
            g.vertices[self.vertex].id.clone()
        } else {
            vg.display(&self.elements[id as usize])
        }
    }
}

/// Builds the vertex graph of `v` at the given radius.
pub fn build_vertex_graph(g: &GraphOfGroups, v: usize, radius: usize) -> Result<VertexGraph, FineError> {
    let vert = &g.vertices[v];
    let grp = &vert.group;
    let nontrivial: Vec<usize> =
        (0..vert.peripherals.len()).filter(|&k| !vert.peripherals[k].subgroup.is_trivial()).collect();
    if grp.is_free() && !nontrivial.is_empty() {
        let cores: Vec<_> = nontrivial.iter().map(|&k| vert.peripherals[k].subgroup.core().unwrap().clone()).collect();
        let verdict = is_malnormal_collection(&cores);
        if !verdict.holds {
            let (w, i, j) = verdict.witness.unwrap();
            return Err(FineError::PeripheralNotMalnormal {
                vertex: vert.id.clone(),
                witness: format!(
                    "g = {}, {} and {}",
                    w.display(&grp.symbols),
                    vert.peripherals[nontrivial[i]].id,
                    vert.peripherals[nontrivial[j]].id
                ),
            });
        }
    }
    let whole = vert.peripherals.iter().any(|p| p.subgroup.is_whole_group());
    let high_rank_abelian =
        matches!(&grp.kind, GroupKind::Abelian { orders } if orders.iter().filter(|&&d| d == 0).count() >= 2);
    let kind = if whole || high_rank_abelian {
        CopyKind::Singleton
    } else if grp.is_finite() {
        CopyKind::Finite
    } else {
        CopyKind::Coned
    };
    let empty = VertexGraph {
        vertex: v,
        radius,
        kind,
        elements: vec![],
        cones: vec![],
        edges: vec![],
        cayley_edges: 0,
        elem_index: HashMap::new(),
        cone_index: HashMap::new(),
    };
    if kind == CopyKind::Singleton {
        let id = grp.identity();
        return Ok(VertexGraph { elements: vec![id.clone()], elem_index: HashMap::from([(id, 0)]), ..empty });
    }
    let elements = match kind {
        CopyKind::Finite => {
            let n = grp.elements().map(|e| e.len()).unwrap_or(1);
            grp.ball(n)
        }
        _ => grp.ball(radius),
    };
    let elem_index: HashMap<GroupElement, u32> =
        elements.iter().enumerate().map(|(i, x)| (x.clone(), i as u32)).collect();
    let mut edge_set = BTreeSet::new();
    let mut edges = Vec::new();
    for (i, x) in elements.iter().enumerate() {
        for l in grp.generator_letters() {
            let y = grp.mul(x, &grp.letter_element(l));
            if let Some(&j) = elem_index.get(&y) {
                let key = (i.min(j as usize), i.max(j as usize));
                if key.0 != key.1 && edge_set.insert(key) {
                    edges.push((i as u32, j));
                }
            }
        }
    }
    let cayley_edges = edges.len();
    let mut cone_keys: Vec<(usize, crate::group::Word, GroupElement)> = Vec::new();
    let mut members: HashMap<(usize, GroupElement), Vec<u32>> = HashMap::new();
    for &k in &nontrivial {
        let p = &vert.peripherals[k].subgroup;
        for (i, x) in elements.iter().enumerate() {
            let key = p.coset_key(x);
            let e = members.entry((k, key.clone())).or_default();
            if e.is_empty() {
                cone_keys.push((k, grp.word_of(&key), key));
            }
            e.push(i as u32);
        }
    }
    cone_keys.sort();
    let base = elements.len() as u32;
    let mut cones = Vec::new();
    let mut cone_index = HashMap::new();
    for (c, (k, _, key)) in cone_keys.into_iter().enumerate() {
        let id = base + c as u32;
        for &m in &members[&(k, key.clone())] {
            edges.push((m, id));
        }
        cone_index.insert((k, key.clone()), id);
        cones.push((k, key));
    }
    Ok(VertexGraph { elements, cones, edges, cayley_edges, elem_index, cone_index, ..empty })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Copy {
    pub tree_vertex: usize,
    pub template: usize,
    pub offset: u32,
}

/// A vertex of the parabolic forest: a peripheral coset in one copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestVertex {
    pub tree_vertex: usize,
    pub peripheral: usize,
    pub key: GroupElement,
    pub k_vertex: u32,
}

#[derive(Clone, Debug)]
pub struct ParabolicForest {
    pub vertices: Vec<ForestVertex>,
    /// One edge per tree-window edge: (ι-side, τ-side) forest vertices.
    pub edges: Vec<(usize, usize)>,
    pub component: Vec<usize>,
    pub num_components: usize,
    index: HashMap<(usize, usize, GroupElement), usize>,
}

impl ParabolicForest {
    pub fn lookup(&self, tree_vertex: usize, peripheral: usize, key: &GroupElement) -> Option<usize> {
        self.index.get(&(tree_vertex, peripheral, key.clone())).copied()
    }

    pub fn component_members(&self, c: usize) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&i| self.component[i] == c).collect()
    }
}

/// The tree of spaces K over a tree window.
#[derive(Clone, Debug)]
pub struct FineWindow {
    pub radius: usize,
    pub window: usize,
    pub templates: Vec<VertexGraph>,
    pub copies: Vec<Copy>,
    pub num_vertices: usize,
    /// Edge-space edges, one per tree edge, between chosen vertices.
    pub space_edges: Vec<(u32, u32)>,
    pub forest: ParabolicForest,
}

impl FineWindow {
    pub fn build(g: &GraphOfGroups, t: &TreeWindow) -> Result<FineWindow, FineError> {
        let mut templates: Vec<VertexGraph> = Vec::new();
        let mut tindex: HashMap<(usize, usize), usize> = HashMap::new();
        let mut copies = Vec::new();
        let mut offset = 0u32;
        for (i, tv) in t.vertices.iter().enumerate() {
            let radius = t.window.saturating_sub(tv.len);
            let key = (tv.vertex, radius);
            let ti = match tindex.get(&key) {
                Some(&ti) => ti,
                None => {
                    templates.push(build_vertex_graph(g, tv.vertex, radius)?);
                    tindex.insert(key, templates.len() - 1);
                    templates.len() - 1
                }
            };
            copies.push(Copy { tree_vertex: i, template: ti, offset });
            offset += templates[ti].num_vertices() as u32;
        }
        let mut fv: Vec<ForestVertex> = Vec::new();
        let mut index: HashMap<(usize, usize, GroupElement), usize> = HashMap::new();
        let mut add = |tvi: usize, k: usize, r: &GroupElement, fv: &mut Vec<ForestVertex>| -> usize {
            let copy = &copies[tvi];
            let tpl = &templates[copy.template];
            let p = &g.vertices[tpl.vertex].peripherals[k].subgroup;
            let key = p.coset_key(r);
            *index.entry((tvi, k, key.clone())).or_insert_with(|| {
                let local = tpl.chosen(g, k, r).expect("attachment point lies in the copy");
                fv.push(ForestVertex { tree_vertex: tvi, peripheral: k, key, k_vertex: copy.offset + local });
                fv.len() - 1
            })
        };
        let mut fedges = Vec::new();
        let mut space_edges = Vec::new();
        for te in &t.edges {
            let edge = &g.edges[te.edge];
            // the child was reached from the parent through a coset representative
            let (parent, child) = match t.vertices[te.to].parent {
                Some((p, _)) if p == te.from => (te.from, te.to),
                _ => (te.to, te.from),
            };
            let forward = parent == te.from;
            let start = edge.start_end(forward);
            let finish = edge.finish_end(forward);
            // recover r from the child's form: child = parent · r · e^±
            let cf = &t.vertices[child].form;
            let r = cf.syllables[cf.syllables.len() - 2].clone();
            let pid = add(parent, start.container, &r, &mut fv);
            let cid = add(child, finish.container, &g.vertices[finish.vertex].group.identity(), &mut fv);
            let (a, b) = if forward { (pid, cid) } else { (cid, pid) };
            fedges.push((a, b));
            space_edges.push((fv[a].k_vertex, fv[b].k_vertex));
        }
        let n = fv.len();
        let mut dsu = Dsu::new(n);
        for &(a, b) in &fedges {
            dsu.union(a, b);
        }
        let mut comp_of_root = HashMap::new();
        let component: Vec<usize> = (0..n)
            .map(|i| {
                let r = dsu.find(i);
                let next = comp_of_root.len();
                *comp_of_root.entry(r).or_insert(next)
            })
            .collect();
        let forest =
            ParabolicForest { vertices: fv, edges: fedges, component, num_components: comp_of_root.len(), index };
        Ok(FineWindow {
            radius: t.radius,
            window: t.window,
            templates,
            copies,
            num_vertices: offset as usize,
            space_edges,
            forest,
        })
    }

    pub fn copy_of(&self, k_vertex: u32) -> usize {
        self.copies.partition_point(|c| c.offset <= k_vertex) - 1
    }

    pub fn template(&self, copy: usize) -> &VertexGraph {
        &self.templates[self.copies[copy].template]
    }

    /// Vertex-space edges as K-vertex pairs, tagged with their copy.
    pub fn vertex_edges(&self) -> impl Iterator<Item = (usize, u32, u32)> + '_ {
        self.copies.iter().enumerate().flat_map(move |(ci, c)| {
            self.templates[c.template].edges.iter().map(move |&(a, b)| (ci, c.offset + a, c.offset + b))
        })
    }

    pub fn k_graph(&self) -> Graph {
        let mut gr = Graph::new(self.num_vertices);
        for (_, a, b) in self.vertex_edges() {
            gr.add_edge(a, b);
        }
        for &(a, b) in &self.space_edges {
            gr.add_edge(a, b);
        }
        gr
    }

    pub fn k_label(&self, g: &GraphOfGroups, t: &TreeWindow, k: u32) -> String {
        let ci = self.copy_of(k);
        let c = &self.copies[ci];
        format!("{} | {}", t.label(g, c.tree_vertex), self.templates[c.template].label(g, k - c.offset))
    }

    pub fn is_cone(&self, k: u32) -> bool {
        let c = &self.copies[self.copy_of(k)];
        self.templates[c.template].is_cone(k - c.offset)
    }

    /// Group element or cone coset carried by a K-vertex, as a form whose
    /// last syllable is the local coordinate.
    pub fn form_of(&self, t: &TreeWindow, kv: u32) -> NormalForm {
        let ci = self.copy_of(kv);
        let c = &self.copies[ci];
        let tpl = &self.templates[c.template];
        let local = kv - c.offset;
        let mut form = t.vertices[c.tree_vertex].form.clone();
        if tpl.kind != CopyKind::Singleton {
            *form.syllables.last_mut().unwrap() = if tpl.is_cone(local) {
                tpl.cones[local as usize - tpl.elements.len()].1.clone()
            } else {
                tpl.elements[local as usize].clone()
            };
        }
        form
    }

    /// Partial action of G on K-vertices.
    pub fn act(&self, g: &GraphOfGroups, t: &TreeWindow, x: &NormalForm, kv: u32) -> Option<u32> {
        let ci = self.copy_of(kv);
        let c = &self.copies[ci];
        let tpl = &self.templates[c.template];
        let local = kv - c.offset;
        let mut items = g.items_of(x);
        items.extend(g.items_of(&self.form_of(t, kv)));
        let nf = g.normal_form_items(g.base, &items).ok()?;
        let tv = t.lookup(&coset_form(g, &nf))?;
        let target = &self.copies[tv];
        let ttpl = &self.templates[target.template];
        let image = if ttpl.kind == CopyKind::Singleton {
            0
        } else if tpl.is_cone(local) {
            let k = tpl.cones[local as usize - tpl.elements.len()].0;
            let key = g.vertices[ttpl.vertex].peripherals[k].subgroup.coset_key(nf.last());
            ttpl.cone_id(k, &key)?
        } else {
            ttpl.element_id(nf.last())?
        };
        Some(target.offset + image)
    }

    pub fn dot_k(&self, g: &GraphOfGroups, t: &TreeWindow) -> String {
        let mut s = String::from("graph K {\n");
        for k in 0..self.num_vertices as u32 {
            let shape = if self.is_cone(k) { ", shape=diamond" } else { "" };
            s += &format!("  k{k} [label=\"{}\"{shape}];\n", self.k_label(g, t, k));
        }
        for (_, a, b) in self.vertex_edges() {
            s += &format!("  k{a} -- k{b};\n");
        }
        for &(a, b) in &self.space_edges {
            s += &format!("  k{a} -- k{b} [style=dashed];\n");
        }
        s + "}\n"
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// K̄: K with every edge space contracted.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub graph: Graph,
    pub class_of: Vec<u32>,
    /// Forest component collapsed into each K̄ vertex, if any.
    pub class_component: Vec<Option<usize>>,
    pub class_has_cone: Vec<bool>,
    /// Copy index of every K̄ edge.
    pub edge_copy: Vec<usize>,
}

pub fn quotient(k: &FineWindow) -> Quotient {
    let n = k.num_vertices;
    let mut dsu = Dsu::new(n);
    for &(a, b) in &k.space_edges {
        dsu.union(a as usize, b as usize);
    }
    let mut class_of = vec![0u32; n];
    let mut ids: HashMap<usize, u32> = HashMap::new();
    for (v, c) in class_of.iter_mut().enumerate() {
        let r = dsu.find(v);
        let next = ids.len() as u32;
        *c = *ids.entry(r).or_insert(next);
    }
    let m = ids.len();
    let mut class_component = vec![None; m];
    for (i, f) in k.forest.vertices.iter().enumerate() {
        class_component[class_of[f.k_vertex as usize] as usize] = Some(k.forest.component[i]);
    }
    let mut class_has_cone = vec![false; m];
    for v in 0..n as u32 {
        if k.is_cone(v) {
            class_has_cone[class_of[v as usize] as usize] = true;
        }
    }
    let mut graph = Graph::new(m);
    let mut edge_copy = Vec::new();
    for (ci, a, b) in k.vertex_edges() {
        graph.add_edge(class_of[a as usize], class_of[b as usize]);
        edge_copy.push(ci);
    }
    Quotient { graph, class_of, class_component, class_has_cone, edge_copy }
}

impl Quotient {
    pub fn dot(&self, k: &FineWindow, g: &GraphOfGroups, t: &TreeWindow, highlight: &BTreeSet<u32>) -> String {
        let mut first: Vec<Option<u32>> = vec![None; self.graph.num_vertices()];
        for (v, &c) in self.class_of.iter().enumerate() {
            first[c as usize].get_or_insert(v as u32);
        }
        let mut s = String::from("graph Kbar {\n");
        for (c, f) in first.iter().enumerate() {
            let mut attrs = match self.class_component[c] {
                Some(comp) => format!("label=\"S{comp}\", component={comp}"),
                None => format!("label=\"{}\"", k.k_label(g, t, f.unwrap())),
            };
            if self.class_has_cone[c] {
                attrs += ", shape=diamond";
            }
            if highlight.contains(&(c as u32)) {
                attrs += ", color=red";
            }
            s += &format!("  c{c} [{attrs}];\n");
        }
        for &(a, b) in &self.graph.edges {
            s += &format!("  c{a} -- c{b};\n");
        }
        s + "}\n"
    }

    /// Whether every block of K̄ with a circuit uses edges of a single copy.
    pub fn blocks_within_copies(&self) -> bool {
        let mut of_vertex: Vec<Vec<usize>> = vec![vec![]; self.graph.num_vertices()];
        for (bi, block) in self.graph.blocks().iter().enumerate() {
            for &v in block {
                of_vertex[v as usize].push(bi);
            }
        }
        let mut copy: HashMap<usize, usize> = HashMap::new();
        for (e, &(a, b)) in self.graph.edges.iter().enumerate() {
            let Some(&bi) = of_vertex[a as usize].iter().find(|x| of_vertex[b as usize].contains(x)) else {
                continue;
            };
            if *copy.entry(bi).or_insert(self.edge_copy[e]) != self.edge_copy[e] {
                return false;
            }
        }
        true
    }

    /// K̄ edge from the base element to the chosen vertex of the first
    /// container at the base vertex.
    pub fn base_cone_edge(&self, k: &FineWindow, g: &GraphOfGroups) -> Option<u32> {
        let tpl = k.template(0);
        let v = tpl.vertex;
        let container =
            g.edges.iter().flat_map(|e| e.ends.iter()).find(|end| end.vertex == v).map(|end| end.container)?;
        let id = g.vertices[v].group.identity();
        let one = tpl.element_id(&id)?;
        let chosen = tpl.chosen(g, container, &id)?;
        let idx = tpl.edges.iter().position(|&(a, b)| (a, b) == (one, chosen) || (b, a) == (one, chosen))?;
        Some(idx as u32)
    }
}

pub fn check_fine(graph: &Graph, edge: u32, n: usize) -> u64 {
    graph.circuits_through(edge, n)
}

/// Twice the four-point δ of a connected graph.
pub fn check_hyperbolic(graph: &Graph) -> u32 {
    graph.twice_delta()
}

/// Φ: vertices are (Γ-vertex, peripheral index) pairs, with one edge per
/// Γ-edge joining its declared containers.
pub fn phi_vertices(g: &GraphOfGroups) -> Vec<(usize, usize)> {
    let mut phi = Vec::new();
    for (v, vert) in g.vertices.iter().enumerate() {
        for p in 0..vert.peripherals.len() {
            phi.push((v, p));
        }
    }
    phi
}

pub fn phi_edge(g: &GraphOfGroups, e: usize) -> ((usize, usize), (usize, usize)) {
    let ed = &g.edges[e];
    ((ed.ends[0].vertex, ed.ends[0].container), (ed.ends[1].vertex, ed.ends[1].container))
}

/// A connected component of Φ with a BFS spanning tree rooted at its least
/// vertex and path words from the base to every member.
#[derive(Clone, Debug)]
pub struct PhiComponent {
    pub members: Vec<(usize, usize)>,
    pub lifts: Vec<Vec<Item>>,
    /// Spanning-tree parent of each member: (member position, Γ-edge).
    pub parent: Vec<Option<(usize, usize)>>,
    pub tree_edges: BTreeSet<usize>,
    pub edges: Vec<usize>,
}

impl PhiComponent {
    pub fn position(&self, x: (usize, usize)) -> Option<usize> {
        self.members.iter().position(|&y| y == x)
    }

    /// Γ-edges on the spanning-tree path between two members.
    pub fn chain(&self, a: usize, b: usize) -> Vec<usize> {
        let up = |mut x: usize| {
            let mut path = vec![(x, None)];
            while let Some((p, e)) = self.parent[x] {
                path.push((p, Some(e)));
                x = p;
            }
            path
        };
        let (pa, pb) = (up(a), up(b));
        let meet = pa.iter().position(|(x, _)| pb.iter().any(|(y, _)| y == x)).unwrap();
        let mb = pb.iter().position(|(y, _)| *y == pa[meet].0).unwrap();
        let mut out: Vec<usize> = pa[1..=meet].iter().map(|(_, e)| e.unwrap()).collect();
        out.extend(pb[1..=mb].iter().rev().map(|(_, e)| e.unwrap()));
        out
    }
}

pub fn phi_components(g: &GraphOfGroups) -> Vec<PhiComponent> {
    let phi = phi_vertices(g);
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut out = Vec::new();
    for &root in &phi {
        if !seen.insert(root) {
            continue;
        }
        let mut c = PhiComponent {
            members: vec![root],
            lifts: vec![g.tree_path(g.base, root.0).into_iter().map(|(e, f)| Item::Edge(e, f)).collect()],
            parent: vec![None],
            tree_edges: BTreeSet::new(),
            edges: vec![],
        };
        let mut i = 0;
        while i < c.members.len() {
            let x = c.members[i];
            for e in 0..g.edges.len() {
                let (a, b) = phi_edge(g, e);
                for (from, to, f) in [(a, b, true), (b, a, false)] {
                    if from == x && seen.insert(to) {
                        let mut l = c.lifts[i].clone();
                        l.push(Item::Edge(e, f));
                        c.members.push(to);
                        c.lifts.push(l);
                        c.parent.push(Some((i, e)));
                        c.tree_edges.insert(e);
                    }
                }
            }
            i += 1;
        }
        c.edges = (0..g.edges.len()).filter(|&e| c.members.contains(&phi_edge(g, e).0)).collect();
        out.push(c);
    }
    out
}

pub(crate) fn inverse_items(g: &GraphOfGroups, items: &[Item]) -> Vec<Item> {
    items
        .iter()
        .rev()
        .map(|it| match it {
            Item::Syllable(v, x) => Item::Syllable(*v, g.vertices[*v].group.invert(x)),
            Item::Edge(e, f) => Item::Edge(*e, !f),
        })
        .collect()
}

fn closed_at(g: &GraphOfGroups, v: usize, items: Vec<Item>) -> NormalForm {
    g.normal_form_items(v, &items).expect("legal path")
}

/// Generators of `γ P γ⁻¹` for the peripheral `x = (v, p)` lifted along `γ`.
pub fn conjugated_generators(g: &GraphOfGroups, lift: &[Item], x: (usize, usize)) -> Vec<NormalForm> {
    let (v, p) = x;
    let grp = &g.vertices[v].group;
    g.vertices[v].peripherals[p]
        .subgroup
        .gens
        .iter()
        .filter(|s| !grp.is_identity(s))
        .map(|s| {
            let mut items = lift.to_vec();
            items.push(Item::Syllable(v, s.clone()));
            items.extend(inverse_items(g, lift));
            closed_at(g, g.base, items)
        })
        .collect()
}

/// Whether `h` lies in `γ P γ⁻¹`.
pub fn conjugate_inside(g: &GraphOfGroups, h: &NormalForm, lift: &[Item], x: (usize, usize)) -> bool {
    let (v, p) = x;
    let mut items = inverse_items(g, lift);
    items.extend(g.items_of(h));
    items.extend(lift.iter().cloned());
    let nf = closed_at(g, v, items);
    nf.edges.is_empty() && g.vertices[v].peripherals[p].subgroup.contains(&nf.syllables[0])
}

/// Stabilizer of one orbit of parabolic trees.
#[derive(Clone, Debug)]
pub struct ParabolicTree {
    /// Least Φ-vertex of the component; its cone at the lift is the root.
    pub root: (usize, usize),
    pub component: PhiComponent,
    pub generators: Vec<NormalForm>,
    pub finite: bool,
    /// In-window forest component containing the root cone.
    pub representative: Option<usize>,
    pub truncated: bool,
}

/// One parabolic tree stabilizer per component of Φ.
pub fn parabolic_tree_stabilizers(
    g: &GraphOfGroups,
    t: Option<&TreeWindow>,
    k: Option<&FineWindow>,
) -> Vec<ParabolicTree> {
    let mut out = Vec::new();
    for comp in phi_components(g) {
        let conj: Vec<Vec<NormalForm>> =
            comp.members.iter().zip(&comp.lifts).map(|(&x, l)| conjugated_generators(g, l, x)).collect();
        let inside =
            |i: usize, j: usize| conj[i].iter().all(|h| conjugate_inside(g, h, &comp.lifts[j], comp.members[j]));
        // drop member subgroups contained in another, keeping the earlier of equals
        let mut dropped = vec![false; comp.members.len()];
        let mut gens: Vec<NormalForm> = Vec::new();
        for i in 0..comp.members.len() {
            let redundant =
                (0..comp.members.len()).any(|j| j != i && !dropped[j] && inside(i, j) && !(j > i && inside(j, i)));
            if redundant {
                dropped[i] = true;
                continue;
            }
            for h in &conj[i] {
                if !gens.contains(h) {
                    gens.push(h.clone());
                }
            }
        }
        let mut has_cycle = false;
        for &e in &comp.edges {
            if comp.tree_edges.contains(&e) {
                continue;
            }
            has_cycle = true;
            let (a, b) = phi_edge(g, e);
            let (ia, ib) = (comp.position(a).unwrap(), comp.position(b).unwrap());
            let mut items = comp.lifts[ia].clone();
            items.push(Item::Edge(e, true));
            items.extend(inverse_items(g, &comp.lifts[ib]));
            let h = closed_at(g, g.base, items);
            if !h.is_trivial_in(g) && !gens.contains(&h) {
                gens.push(h);
            }
        }
        let finite = !has_cycle && collapses_to_finite(g, &comp);
        let root = comp.members[0];
        let (representative, truncated) = match (t, k) {
            (Some(t), Some(k)) => window_component(g, t, k, root, &comp.lifts[0], &comp.members),
            _ => (None, true),
        };
        out.push(ParabolicTree { root, component: comp, generators: gens, finite, representative, truncated });
    }
    out
}

impl ParabolicTree {
    /// Exact membership in the stabilizer: follows the tree geodesic from the
    /// root cone to its translate, checking every edge is a forest edge.
    pub fn contains(&self, g: &GraphOfGroups, x: &NormalForm) -> bool {
        let (v0, k0) = self.root;
        let key = |v: usize, k: usize, r: &GroupElement| g.vertices[v].peripherals[k].subgroup.coset_key(r);
        let lift = &self.component.lifts[0];
        let mut items = inverse_items(g, lift);
        items.extend(g.items_of(x));
        items.extend(lift.iter().cloned());
        let y = closed_at(g, v0, items);
        let mut cur = (v0, k0, key(v0, k0, &g.vertices[v0].group.identity()));
        for (i, &(e, f)) in y.edges.iter().enumerate() {
            let edge = &g.edges[e];
            let (s, t) = (edge.start_end(f), edge.finish_end(f));
            if cur != (s.vertex, s.container, key(s.vertex, s.container, &y.syllables[i])) {
                return false;
            }
            cur = (t.vertex, t.container, key(t.vertex, t.container, &g.vertices[t.vertex].group.identity()));
        }
        cur == (v0, k0, key(v0, k0, y.last()))
    }
}

/// A tree component is finite when all its members are finite and, from some
/// root, every child end's image equals its container.
fn collapses_to_finite(g: &GraphOfGroups, comp: &PhiComponent) -> bool {
    let finite_p = |(v, p): (usize, usize)| {
        let s = &g.vertices[v].peripherals[p].subgroup;
        s.is_trivial() || s.group.is_finite()
    };
    if !comp.members.iter().all(|&x| finite_p(x)) {
        return false;
    }
    'roots: for &r in &comp.members {
        let mut depth: HashMap<(usize, usize), usize> = HashMap::from([(r, 0)]);
        let mut q = VecDeque::from([r]);
        while let Some(x) = q.pop_front() {
            for &e in &comp.edges {
                let (a, b) = phi_edge(g, e);
                for (from, to) in [(a, b), (b, a)] {
                    if from == x && !depth.contains_key(&to) {
                        depth.insert(to, depth[&x] + 1);
                        q.push_back(to);
                    }
                }
            }
        }
        for &e in &comp.edges {
            let (a, b) = phi_edge(g, e);
            let (child, end) = if depth[&a] > depth[&b] { (a, 0) } else { (b, 1) };
            if !g.edges[e].ends[end].image.same_as(&g.vertices[child.0].peripherals[child.1].subgroup) {
                continue 'roots;
            }
        }
        return true;
    }
    false
}

/// Finds the in-window forest component of the root cone and decides
/// whether it is truncated by the window.
fn window_component(
    g: &GraphOfGroups,
    t: &TreeWindow,
    k: &FineWindow,
    root: (usize, usize),
    lift: &[Item],
    members: &[(usize, usize)],
) -> (Option<usize>, bool) {
    let nf = g.normal_form_items(g.base, lift).expect("legal path");
    let Some(tv) = t.lookup(&coset_form(g, &nf)) else {
        return (None, true);
    };
    let id = g.vertices[root.0].group.identity();
    let key = g.vertices[root.0].peripherals[root.1].subgroup.coset_key(&id);
    let Some(fvi) = k.forest.lookup(tv, root.1, &key) else {
        return (None, members.len() > 1 || has_ends(g, root));
    };
    let comp = k.forest.component[fvi];
    let mut count: HashMap<(usize, usize, End), usize> = HashMap::new();
    for (te, &(a, b)) in k.forest.edges.iter().enumerate() {
        let e = t.edges[te].edge;
        if k.forest.component[a] == comp {
            *count.entry((a, e, End::From)).or_default() += 1;
            *count.entry((b, e, End::To)).or_default() += 1;
        }
    }
    let mut truncated = false;
    for i in k.forest.component_members(comp) {
        let f = &k.forest.vertices[i];
        let v = t.vertices[f.tree_vertex].vertex;
        let p = &g.vertices[v].peripherals[f.peripheral].subgroup;
        for (e, edge) in g.edges.iter().enumerate() {
            for (end, ee) in [(End::From, &edge.ends[0]), (End::To, &edge.ends[1])] {
                if ee.vertex != v || ee.container != f.peripheral {
                    continue;
                }
                let have = count.get(&(i, e, end)).copied().unwrap_or(0);
                match ee.image.index_in(p) {
                    Some(idx) if have >= idx => {}
                    _ => truncated = true,
                }
            }
        }
    }
    (Some(comp), truncated)
}

fn has_ends(g: &GraphOfGroups, x: (usize, usize)) -> bool {
    g.edges.iter().flat_map(|e| e.ends.iter()).any(|ee| ee.vertex == x.0 && ee.container == x.1)
}

/// Whether `x` carries the root of a parabolic tree into its own component.
pub fn stabilizes_component(
    g: &GraphOfGroups,
    t: &TreeWindow,
    k: &FineWindow,
    comp: usize,
    x: &NormalForm,
) -> Option<bool> {
    let members = k.forest.component_members(comp);
    let f = &k.forest.vertices[*members.first()?];
    let image = act_on_cone(g, t, k, x, f)?;
    Some(k.forest.component[image] == comp)
}

/// Partial action on forest vertices.
pub fn act_on_cone(
    g: &GraphOfGroups,
    t: &TreeWindow,
    k: &FineWindow,
    x: &NormalForm,
    f: &ForestVertex,
) -> Option<usize> {
    let mut form = t.vertices[f.tree_vertex].form.clone();
    *form.syllables.last_mut().unwrap() = f.key.clone();
    let mut items = g.items_of(x);
    items.extend(g.items_of(&form));
    let nf = g.normal_form_items(g.base, &items).ok()?;
    let tv = t.lookup(&coset_form(g, &nf))?;
    let v = t.vertices[tv].vertex;
    let key = g.vertices[v].peripherals[f.peripheral].subgroup.coset_key(nf.last());
    k.forest.lookup(tv, f.peripheral, &key)
}
