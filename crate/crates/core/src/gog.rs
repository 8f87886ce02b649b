//! Finite graphs of groups: validation, path-word normal forms and the
//! word problem in the fundamental group.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::abelian::rational_rank;
use crate::group::{parse_word, GroupDesc, GroupElement, GroupError, GroupKind, Letter, Word};
use crate::stallings::{is_malnormal_collection, is_total, CoreGraph};
use crate::subgroup::{Hom, HomDefect, Subgroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GogError {
    #[error("{context}: {source}")]
    Group { context: String, source: GroupError },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("symbol `{0}` is used by more than one generator")]
    DuplicateSymbol(String),
    #[error("edge `{edge}` ({end}): no peripheral `{id}` at that vertex")]
    UnknownPeripheral { edge: String, end: End, id: String },
    #[error("edge `{edge}` ({end}): no image given for generator `{gen}`")]
    MissingMapEntry { edge: String, end: End, gen: String },
    #[error("edge `{edge}` ({end}): the map does not respect the relations of the edge group")]
    NotHomomorphism { edge: String, end: End },
    #[error("edge `{edge}` ({end}): injection is not a monomorphism")]
    InjectionNotMono { edge: String, end: End },
    #[error("edge `{edge}` ({end}): image does not lie in the declared container")]
    ContainerViolation { edge: String, end: End },
    #[error("the underlying graph is disconnected")]
    DisconnectedGraph,
    #[error("spanning tree is invalid: {0}")]
    BadSpanningTree(String),
    #[error("illegal path: {0}")]
    IllegalPath(String),
}

/// The two ends of an edge: `From` is ι(e), `To` is τ(e).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    From,
    To,
}

impl std::fmt::Display for End {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            End::From => "from",
            End::To => "to",
        })
    }
}

/// Unvalidated description of a peripheral subgroup of a vertex group.
#[derive(Clone, Debug)]
pub struct PeripheralSpec {
    pub id: String,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct VertexSpec {
    pub id: String,
    pub group: GroupDesc,
    pub peripherals: Vec<PeripheralSpec>,
}

#[derive(Clone, Debug)]
pub struct EdgeSpec {
    pub id: String,
    pub group: GroupDesc,
    pub from: String,
    pub to: String,
    pub from_map: BTreeMap<String, String>,
    pub to_map: BTreeMap<String, String>,
    pub from_container: String,
    pub to_container: String,
    pub stable_letter: Option<String>,
}

#[derive(Clone, Debug)]
pub struct GogSpec {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    pub spanning_tree: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Peripheral {
    pub id: String,
    pub subgroup: Subgroup,
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub id: String,
    pub group: GroupDesc,
    pub peripherals: Vec<Peripheral>,
}

#[derive(Clone, Debug)]
pub struct EdgeEnd {
    pub vertex: usize,
    pub hom: Hom,
    pub image: Subgroup,
    pub container: usize,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub id: String,
    pub group: GroupDesc,
    /// Index 0 is ι(e), index 1 is τ(e).
    pub ends: [EdgeEnd; 2],
    pub in_tree: bool,
    pub stable_letter: Option<String>,
}

impl Edge {
    pub fn end(&self, end: End) -> &EdgeEnd {
        match end {
            End::From => &self.ends[0],
            End::To => &self.ends[1],
        }
    }

    /// Vertex at which a traversal in the given direction starts.
    pub fn source(&self, forward: bool) -> usize {
        if forward {
            self.ends[0].vertex
        } else {
            self.ends[1].vertex
        }
    }

    pub fn target(&self, forward: bool) -> usize {
        self.source(!forward)
    }

    /// The end at which a traversal in the given direction starts.
    pub fn start_end(&self, forward: bool) -> &EdgeEnd {
        if forward {
            &self.ends[0]
        } else {
            &self.ends[1]
        }
    }

    pub fn finish_end(&self, forward: bool) -> &EdgeEnd {
        self.start_end(!forward)
    }
}

/// A letter of the global alphabet of the fundamental group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sym {
    Vertex { vertex: usize, gen: u32 },
    Stable { edge: usize },
}

/// A validated graph of groups with base vertex 0.
#[derive(Clone, Debug)]
pub struct GraphOfGroups {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub base: usize,
    pub symbols: Vec<String>,
    syms: Vec<Sym>,
    /// Step from the tree parent: (edge, traversed forward).
    parent: Vec<Option<(usize, bool)>>,
    depth: Vec<usize>,
}

/// Reduced path word `g₀ e₁^ε₁ g₁ ⋯ e_k^ε_k g_k` with canonical coset
/// representatives in every syllable but the last.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalForm {
    pub start: usize,
    pub syllables: Vec<GroupElement>,
    pub edges: Vec<(usize, bool)>,
}

impl NormalForm {
    pub fn is_trivial_in(&self, g: &GraphOfGroups) -> bool {
        self.edges.is_empty() && g.vertices[self.start].group.is_identity(&self.syllables[0])
    }

    pub fn vertex_at(&self, g: &GraphOfGroups, i: usize) -> usize {
        if i == 0 {
            self.start
        } else {
            let (e, f) = self.edges[i - 1];
            g.edges[e].target(f)
        }
    }

    pub fn end_vertex(&self, g: &GraphOfGroups) -> usize {
        self.vertex_at(g, self.edges.len())
    }

    pub fn last(&self) -> &GroupElement {
        self.syllables.last().unwrap()
    }
}

/// One item of a raw path word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Syllable(usize, GroupElement),
    Edge(usize, bool),
}

/// Per-end hypothesis verdicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndReport {
    pub edge: String,
    pub end: End,
    pub vertex: String,
    pub container: String,
    pub parabolic: bool,
    pub maximal: bool,
    pub total: bool,
    pub total_witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexReport {
    pub vertex: String,
    pub peripherals_malnormal: bool,
    pub peripherals_witness: Option<String>,
    pub edge_images_malnormal: bool,
    pub edge_images_witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub ends: Vec<EndReport>,
    pub vertices: Vec<VertexReport>,
}

fn group_err(context: String) -> impl FnOnce(GroupError) -> GogError {
    move |source| GogError::Group { context, source }
}

fn parse_element(g: &GroupDesc, text: &str, context: String) -> Result<GroupElement, GogError> {
    let w = g.parse_word(text).map_err(group_err(context.clone()))?;
    g.reduce(&w).map_err(group_err(context))
}

impl GraphOfGroups {
    pub fn new(spec: &GogSpec) -> Result<GraphOfGroups, GogError> {
        let mut ids = BTreeSet::new();
        let mut vindex = BTreeMap::new();
        let mut vertices = Vec::new();
        for (i, vs) in spec.vertices.iter().enumerate() {
            if !ids.insert(vs.id.clone()) {
                return Err(GogError::DuplicateId(vs.id.clone()));
            }
            vindex.insert(vs.id.clone(), i);
            let mut peripherals = Vec::new();
            let mut pids = BTreeSet::new();
            for p in &vs.peripherals {
                if !pids.insert(p.id.clone()) {
                    return Err(GogError::DuplicateId(p.id.clone()));
                }
                let gens = p
                    .generators
                    .iter()
                    .map(|w| parse_element(&vs.group, w, format!("peripheral `{}` of `{}`", p.id, vs.id)))
                    .collect::<Result<Vec<_>, _>>()?;
                peripherals.push(Peripheral { id: p.id.clone(), subgroup: Subgroup::new(&vs.group, &gens) });
            }
            vertices.push(Vertex { id: vs.id.clone(), group: vs.group.clone(), peripherals });
        }
        if vertices.is_empty() {
            return Err(GogError::DisconnectedGraph);
        }
        let tree: BTreeSet<&String> = spec.spanning_tree.iter().collect();
        for t in &tree {
            if !spec.edges.iter().any(|e| &&e.id == t) {
                return Err(GogError::UnknownEdge((*t).clone()));
            }
        }
        let mut edges = Vec::new();
        for es in &spec.edges {
            if !ids.insert(es.id.clone()) {
                return Err(GogError::DuplicateId(es.id.clone()));
            }
            let mut ends = Vec::new();
            for (end, vid, map, cont) in [
                (End::From, &es.from, &es.from_map, &es.from_container),
                (End::To, &es.to, &es.to_map, &es.to_container),
            ] {
                let v = *vindex.get(vid).ok_or_else(|| GogError::UnknownVertex(vid.clone()))?;
                let vg = &vertices[v].group;
                let mut images = Vec::new();
                for l in es.group.generator_letters() {
                    let name = &es.group.symbols[l.gen as usize];
                    let text = map.get(name).ok_or_else(|| GogError::MissingMapEntry {
                        edge: es.id.clone(),
                        end,
                        gen: name.clone(),
                    })?;
                    images.push(parse_element(vg, text, format!("edge `{}` ({end}) image of `{name}`", es.id))?);
                }
                let hom = Hom { source: es.group.clone(), target: vg.clone(), images: images.clone() };
                let edge = es.id.clone();
                hom.check_homomorphism().map_err(|_| GogError::NotHomomorphism { edge: edge.clone(), end })?;
                hom.check_injective().map_err(|d| match d {
                    HomDefect::NotHomomorphism => GogError::NotHomomorphism { edge: edge.clone(), end },
                    HomDefect::NotInjective => GogError::InjectionNotMono { edge: edge.clone(), end },
                })?;
                let image = Subgroup::image(vg, &images, &es.group, &es.group.generator_letters())
                    .map_err(|_| GogError::InjectionNotMono { edge: edge.clone(), end })?;
                let container = vertices[v]
                    .peripherals
                    .iter()
                    .position(|p| &p.id == cont)
                    .ok_or_else(|| GogError::UnknownPeripheral { edge: edge.clone(), end, id: cont.clone() })?;
                if !image.is_subgroup_of(&vertices[v].peripherals[container].subgroup) {
                    return Err(GogError::ContainerViolation { edge, end });
                }
                ends.push(EdgeEnd { vertex: v, hom, image, container });
            }
            let [from, to]: [EdgeEnd; 2] = ends.try_into().unwrap();
            let in_tree = tree.contains(&es.id);
            edges.push(Edge {
                id: es.id.clone(),
                group: es.group.clone(),
                ends: [from, to],
                in_tree,
                stable_letter: if in_tree {
                    None
                } else {
                    Some(es.stable_letter.clone().unwrap_or_else(|| es.id.clone()))
                },
            });
        }

        let n = vertices.len();
        let mut seen = vec![false; n];
        let mut q = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = q.pop_front() {
            for e in &edges {
                for (a, b) in [(e.ends[0].vertex, e.ends[1].vertex), (e.ends[1].vertex, e.ends[0].vertex)] {
                    if a == u && !seen[b] {
                        seen[b] = true;
                        q.push_back(b);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(GogError::DisconnectedGraph);
        }

        if tree.len() != n - 1 {
            return Err(GogError::BadSpanningTree(format!("{} edges for {} vertices", tree.len(), n)));
        }
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        depth[0] = 0;
        let mut q = VecDeque::from([0usize]);
        while let Some(u) = q.pop_front() {
            for (i, e) in edges.iter().enumerate().filter(|(_, e)| e.in_tree) {
                for forward in [true, false] {
                    if e.source(forward) == u && depth[e.target(forward)] == usize::MAX {
                        let w = e.target(forward);
                        depth[w] = depth[u] + 1;
                        parent[w] = Some((i, forward));
                        q.push_back(w);
                    }
                }
            }
        }
        if depth.contains(&usize::MAX) {
            return Err(GogError::BadSpanningTree("tree edges do not span".into()));
        }

        let mut symbols = Vec::new();
        let mut syms = Vec::new();
        for (v, vert) in vertices.iter().enumerate() {
            for (gen, s) in vert.group.symbols.iter().enumerate() {
                symbols.push(s.clone());
                syms.push(Sym::Vertex { vertex: v, gen: gen as u32 });
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if let Some(s) = &e.stable_letter {
                symbols.push(s.clone());
                syms.push(Sym::Stable { edge: i });
            }
        }
        let mut uniq = BTreeSet::new();
        for s in &symbols {
            if !uniq.insert(s) {
                return Err(GogError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(GraphOfGroups { vertices, edges, base: 0, symbols, syms, parent, depth })
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize, GogError> {
        self.vertices.iter().position(|v| v.id == id).ok_or_else(|| GogError::UnknownVertex(id.into()))
    }

    pub fn edge_index(&self, id: &str) -> Result<usize, GogError> {
        self.edges.iter().position(|e| e.id == id).ok_or_else(|| GogError::UnknownEdge(id.into()))
    }

    pub fn sym(&self, gen: u32) -> Sym {
        self.syms[gen as usize]
    }

    /// Global letter of a vertex-group letter.
    pub fn vertex_letter(&self, v: usize, l: Letter) -> Letter {
        let idx = self.syms.iter().position(|s| *s == Sym::Vertex { vertex: v, gen: l.gen }).expect("vertex letter");
        Letter::new(idx as u32, l.inv)
    }

    pub fn stable_symbol(&self, e: usize) -> Option<u32> {
        self.syms.iter().position(|s| *s == Sym::Stable { edge: e }).map(|i| i as u32)
    }

    pub fn parse_global(&self, text: &str) -> Result<Word, GogError> {
        parse_word(&self.symbols, text).map_err(group_err(format!("word `{text}`")))
    }

    pub fn display_global(&self, w: &Word) -> String {
        w.display(&self.symbols)
    }

    /// Tree path between two vertices of Γ as edge traversals.
    pub fn tree_path(&self, from: usize, to: usize) -> Vec<(usize, bool)> {
        let (mut a, mut b) = (from, to);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while self.depth[a] > self.depth[b] {
            let (e, f) = self.parent[a].unwrap();
            up.push((e, !f));
            a = self.edges[e].source(f);
        }
        while self.depth[b] > self.depth[a] {
            let (e, f) = self.parent[b].unwrap();
            down.push((e, f));
            b = self.edges[e].source(f);
        }
        while a != b {
            let (e, f) = self.parent[a].unwrap();
            up.push((e, !f));
            a = self.edges[e].source(f);
            let (e, f) = self.parent[b].unwrap();
            down.push((e, f));
            b = self.edges[e].source(f);
        }
        down.reverse();
        up.extend(down);
        up
    }

    /// Path items of a global word, starting and ending at `start`.
    pub fn path_items(&self, start: usize, w: &Word) -> Vec<Item> {
        let mut items = Vec::new();
        let mut cur = start;
        let walk = |items: &mut Vec<Item>, cur: &mut usize, to: usize| {
            for (e, f) in self.tree_path(*cur, to) {
                items.push(Item::Edge(e, f));
            }
            *cur = to;
        };
        for &l in &w.0 {
            match self.sym(l.gen) {
                Sym::Vertex { vertex, gen } => {
                    walk(&mut items, &mut cur, vertex);
                    let g = &self.vertices[vertex].group;
                    items.push(Item::Syllable(vertex, g.letter_element(Letter::new(gen, l.inv))));
                }
                Sym::Stable { edge } => {
                    let forward = !l.inv;
                    walk(&mut items, &mut cur, self.edges[edge].source(forward));
                    items.push(Item::Edge(edge, forward));
                    cur = self.edges[edge].target(forward);
                }
            }
        }
        walk(&mut items, &mut cur, start);
        items
    }

    pub fn identity_form(&self, v: usize) -> NormalForm {
        NormalForm { start: v, syllables: vec![self.vertices[v].group.identity()], edges: vec![] }
    }

    fn push_syllable(&self, nf: &mut NormalForm, v: usize, x: &GroupElement) -> Result<(), GogError> {
        let cur = nf.end_vertex(self);
        if cur != v {
            return Err(GogError::IllegalPath(format!(
                "syllable in `{}` while at `{}`",
                self.vertices[v].id, self.vertices[cur].id
            )));
        }
        let g = &self.vertices[v].group;
        let last = nf.syllables.last_mut().unwrap();
        *last = g.multiply(last, x).map_err(group_err(format!("syllable in `{}`", self.vertices[v].id)))?;
        Ok(())
    }

    fn push_edge(&self, nf: &mut NormalForm, e: usize, forward: bool) -> Result<(), GogError> {
        let edge = &self.edges[e];
        let cur = nf.end_vertex(self);
        if edge.source(forward) != cur {
            return Err(GogError::IllegalPath(format!(
                "edge `{}` does not start at `{}`",
                edge.id, self.vertices[cur].id
            )));
        }
        if let Some(&(pe, pf)) = nf.edges.last() {
            if pe == e && pf != forward {
                let at = edge.start_end(forward);
                let last = nf.last();
                if at.image.contains(last) {
                    let c = at.image.preimage(last).expect("image member has a preimage");
                    let moved = edge.finish_end(forward).hom.apply_word(&c);
                    nf.syllables.pop();
                    nf.edges.pop();
                    let v = nf.end_vertex(self);
                    let g = &self.vertices[v].group;
                    let prev = nf.syllables.last_mut().unwrap();
                    *prev = g.mul(prev, &moved);
                    return Ok(());
                }
            }
        }
        nf.edges.push((e, forward));
        nf.syllables.push(self.vertices[edge.target(forward)].group.identity());
        Ok(())
    }

    /// Moves edge-group factors rightward so that every syllable but the
    /// last is the ShortLex-least representative of its left coset.
    fn canonicalize(&self, nf: &mut NormalForm) {
        for i in 0..nf.edges.len() {
            let (e, f) = nf.edges[i];
            let edge = &self.edges[e];
            let at = edge.start_end(f);
            let (rep, a) = at.image.left_rep(&nf.syllables[i]);
            let c = at.image.preimage(&a).expect("image member has a preimage");
            let moved = edge.finish_end(f).hom.apply_word(&c);
            nf.syllables[i] = rep;
            let g = &self.vertices[edge.target(f)].group;
            nf.syllables[i + 1] = g.mul(&moved, &nf.syllables[i + 1]);
        }
    }

    /// Normal form of a raw path word starting at `start`.
    pub fn normal_form_items(&self, start: usize, items: &[Item]) -> Result<NormalForm, GogError> {
        let mut nf = self.identity_form(start);
        for it in items {
            match it {
                Item::Syllable(v, x) => self.push_syllable(&mut nf, *v, x)?,
                Item::Edge(e, f) => self.push_edge(&mut nf, *e, *f)?,
            }
        }
        self.canonicalize(&mut nf);
        Ok(nf)
    }

    /// Normal form of a global word as a loop at the base vertex.
    pub fn normal_form(&self, w: &Word) -> NormalForm {
        self.normal_form_items(self.base, &self.path_items(self.base, w)).expect("global words give legal paths")
    }

    pub fn normal_form_str(&self, text: &str) -> Result<NormalForm, GogError> {
        Ok(self.normal_form(&self.parse_global(text)?))
    }

    pub fn items_of(&self, nf: &NormalForm) -> Vec<Item> {
        let mut items = Vec::new();
        for i in 0..nf.syllables.len() {
            let v = nf.vertex_at(self, i);
            if !self.vertices[v].group.is_identity(&nf.syllables[i]) {
                items.push(Item::Syllable(v, nf.syllables[i].clone()));
            }
            if let Some(&(e, f)) = nf.edges.get(i) {
                items.push(Item::Edge(e, f));
            }
        }
        items
    }

    pub fn inverse_items(&self, nf: &NormalForm) -> Vec<Item> {
        self.items_of(nf)
            .into_iter()
            .rev()
            .map(|it| match it {
                Item::Syllable(v, x) => Item::Syllable(v, self.vertices[v].group.invert(&x)),
                Item::Edge(e, f) => Item::Edge(e, !f),
            })
            .collect()
    }

    /// Product of a path word from `x.start` with one continuing from its end.
    pub fn multiply(&self, x: &NormalForm, y: &NormalForm) -> Result<NormalForm, GogError> {
        let mut items = self.items_of(x);
        items.extend(self.items_of(y));
        self.normal_form_items(x.start, &items)
    }

    /// Global word of a loop at the base vertex.
    pub fn to_global(&self, nf: &NormalForm) -> Word {
        let mut out = Vec::new();
        for it in self.items_of(nf) {
            match it {
                Item::Syllable(v, x) => {
                    for l in self.vertices[v].group.word_of(&x).0 {
                        out.push(self.vertex_letter(v, l));
                    }
                }
                Item::Edge(e, f) => {
                    if let Some(s) = self.stable_symbol(e) {
                        out.push(Letter::new(s, !f));
                    }
                }
            }
        }
        Word(out)
    }

    pub fn display_nf(&self, nf: &NormalForm) -> String {
        let mut parts = Vec::new();
        for it in self.items_of(nf) {
            match it {
                Item::Syllable(v, x) => parts.push(self.vertices[v].group.display(&x)),
                Item::Edge(e, f) => {
                    if let Some(s) = &self.edges[e].stable_letter {
                        parts.push(if f { s.clone() } else { format!("{s}^-1") });
                    }
                }
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }

    /// Length of the global word: syllable lengths plus stable letters.
    pub fn nf_length(&self, nf: &NormalForm) -> usize {
        let syl: usize =
            (0..nf.syllables.len()).map(|i| self.vertices[nf.vertex_at(self, i)].group.length(&nf.syllables[i])).sum();
        syl + nf.edges.iter().filter(|(e, _)| !self.edges[*e].in_tree).count()
    }

    /// Generators of `G_v` extracted from global generators: edge-group
    /// images at `v` followed by every `v`-syllable of their normal forms.
    pub fn vertex_generators(&self, global_gens: &[Word], v: &str) -> Result<Vec<GroupElement>, GogError> {
        let vi = self.vertex_index(v)?;
        let g = &self.vertices[vi].group;
        let mut out: Vec<GroupElement> = Vec::new();
        let push = |x: GroupElement, out: &mut Vec<GroupElement>| {
            if !g.is_identity(&x) && !out.contains(&x) {
                out.push(x);
            }
        };
        for e in &self.edges {
            for end in &e.ends {
                if end.vertex == vi {
                    for x in &end.image.gens {
                        push(x.clone(), &mut out);
                    }
                }
            }
        }
        for w in global_gens {
            let nf = self.normal_form(w);
            for i in 0..nf.syllables.len() {
                if nf.vertex_at(self, i) == vi {
                    push(nf.syllables[i].clone(), &mut out);
                }
            }
        }
        Ok(out)
    }

    /// Hypothesis verdicts for every edge end and vertex.
    pub fn validate(&self) -> ValidationReport {
        let mut ends = Vec::new();
        for e in &self.edges {
            for (end, ee) in [(End::From, &e.ends[0]), (End::To, &e.ends[1])] {
                let vert = &self.vertices[ee.vertex];
                let cont = &vert.peripherals[ee.container];
                let (total, total_witness) = totality(&vert.group, &ee.image, &vert.peripherals);
                ends.push(EndReport {
                    edge: e.id.clone(),
                    end,
                    vertex: vert.id.clone(),
                    container: cont.id.clone(),
                    parabolic: ee.image.is_subgroup_of(&cont.subgroup),
                    maximal: ee.image.same_as(&cont.subgroup),
                    total,
                    total_witness,
                });
            }
        }
        let mut vertices = Vec::new();
        for (vi, v) in self.vertices.iter().enumerate() {
            let ps: Vec<&Subgroup> = v.peripherals.iter().map(|p| &p.subgroup).collect();
            let (pm, pw) = malnormality(&v.group, &ps);
            let imgs: Vec<&Subgroup> = self
                .edges
                .iter()
                .flat_map(|e| e.ends.iter())
                .filter(|ee| ee.vertex == vi)
                .map(|ee| &ee.image)
                .collect();
            let (em, ew) = malnormality(&v.group, &imgs);
            vertices.push(VertexReport {
                vertex: v.id.clone(),
                peripherals_malnormal: pm,
                peripherals_witness: pw,
                edge_images_malnormal: em,
                edge_images_witness: ew,
            });
        }
        ValidationReport { ends, vertices }
    }
}

fn free_projection(g: &GroupDesc, s: &Subgroup) -> Vec<Vec<i64>> {
    let GroupKind::Abelian { orders } = &g.kind else { unreachable!() };
    s.gens
        .iter()
        .map(|x| match x {
            GroupElement::Abelian(v) => v.iter().zip(orders).filter(|(_, &d)| d == 0).map(|(a, _)| *a).collect(),
            _ => unreachable!(),
        })
        .collect()
}

fn abelian_rank(g: &GroupDesc, s: &Subgroup) -> usize {
    rational_rank(&free_projection(g, s))
}

/// Whether `h ∩ Pᵍ` is `Pᵍ` or finite for every peripheral `P` and every `g`.
pub fn totality(g: &GroupDesc, h: &Subgroup, peripherals: &[Peripheral]) -> (bool, Option<String>) {
    match &g.kind {
        GroupKind::Free => {
            let cores: Vec<CoreGraph> = peripherals.iter().map(|p| p.subgroup.core().unwrap().clone()).collect();
            let v = is_total(h.core().unwrap(), &cores);
            let w =
                v.witness.map(|(w, k, _)| format!("g = {}, peripheral {}", w.display(&g.symbols), peripherals[k].id));
            (v.holds, w)
        }
        GroupKind::Abelian { .. } => {
            for p in peripherals {
                let rp = abelian_rank(g, &p.subgroup);
                let rh = abelian_rank(g, h);
                let mut joint = free_projection(g, h);
                joint.extend(free_projection(g, &p.subgroup));
                let finite = rational_rank(&joint) == rp + rh;
                if !finite && !p.subgroup.is_subgroup_of(h) {
                    return (false, Some(format!("g = 1, peripheral {}", p.id)));
                }
            }
            (true, None)
        }
        GroupKind::Finite(_) => (true, None),
    }
}

/// Almost malnormality of a collection in its vertex group.
pub fn malnormality(g: &GroupDesc, subs: &[&Subgroup]) -> (bool, Option<String>) {
    match &g.kind {
        GroupKind::Free => {
            let cores: Vec<CoreGraph> = subs.iter().map(|s| s.core().unwrap().clone()).collect();
            let v = is_malnormal_collection(&cores);
            let w = v.witness.map(|(w, i, j)| format!("g = {}, pair ({i}, {j})", w.display(&g.symbols)));
            (v.holds, w)
        }
        GroupKind::Abelian { .. } => {
            for (i, s) in subs.iter().enumerate() {
                let ri = abelian_rank(g, s);
                if ri > 0 && !s.is_whole_group() {
                    let g0 = g
                        .generator_letters()
                        .into_iter()
                        .map(|l| g.letter_element(l))
                        .find(|x| !s.contains(x))
                        .unwrap();
                    return (false, Some(format!("g = {}, pair ({i}, {i})", g.display(&g0))));
                }
                for (j, t) in subs.iter().enumerate().take(i) {
                    let mut joint = free_projection(g, s);
                    joint.extend(free_projection(g, t));
                    if rational_rank(&joint) < ri + abelian_rank(g, t) {
                        return (false, Some(format!("g = 1, pair ({j}, {i})")));
                    }
                }
            }
            (true, None)
        }
        GroupKind::Finite(_) => (true, None),
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    pub fn periph(id: &str, gens: &[&str]) -> PeripheralSpec {
        PeripheralSpec { id: id.into(), generators: gens.iter().map(|s| s.to_string()).collect() }
    }

    /// ⟨a, b, t | t⁻¹(ab)²t = (ab)³⟩.
    pub fn example_spec() -> GogSpec {
        GogSpec {
            vertices: vec![VertexSpec {
                id: "v".into(),
                group: GroupDesc::free(&["a", "b"]),
                peripherals: vec![periph("W", &["ab"])],
            }],
            edges: vec![EdgeSpec {
                id: "e".into(),
                group: GroupDesc::free(&["c"]),
                from: "v".into(),
                to: "v".into(),
                from_map: map(&[("c", "(ab)^2")]),
                to_map: map(&[("c", "(ab)^3")]),
                from_container: "W".into(),
                to_container: "W".into(),
                stable_letter: Some("t".into()),
            }],
            spanning_tree: vec![],
        }
    }

    pub fn example() -> GraphOfGroups {
        GraphOfGroups::new(&example_spec()).unwrap()
    }

    /// F(a) * F(b) over the trivial group.
    pub fn free_product() -> GraphOfGroups {
        GraphOfGroups::new(&GogSpec {
            vertices: vec![
                VertexSpec { id: "A".into(), group: GroupDesc::free(&["a"]), peripherals: vec![periph("1", &[])] },
                VertexSpec { id: "B".into(), group: GroupDesc::free(&["b"]), peripherals: vec![periph("1", &[])] },
            ],
            edges: vec![EdgeSpec {
                id: "e".into(),
                group: GroupDesc::trivial(),
                from: "A".into(),
                to: "B".into(),
                from_map: map(&[]),
                to_map: map(&[]),
                from_container: "1".into(),
                to_container: "1".into(),
                stable_letter: None,
            }],
            spanning_tree: vec!["e".into()],
        })
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn example_is_valid() {
        let g = example();
        let r = g.validate();
        assert!(r.ends.iter().all(|e| e.parabolic && !e.maximal && !e.total));
        assert!(r.vertices[0].peripherals_malnormal);
        assert!(!r.vertices[0].edge_images_malnormal);
    }

    #[test]
    fn trivial_image_is_rejected() {
        let mut s = example_spec();
        s.edges[0].to_map = map(&[("c", "1")]);
        assert!(matches!(GraphOfGroups::new(&s), Err(GogError::InjectionNotMono { end: End::To, .. })));
    }

    #[test]
    fn container_is_checked() {
        let mut s = example_spec();
        s.vertices[0].peripherals = vec![periph("A", &["a"])];
        s.edges[0].from_container = "A".into();
        s.edges[0].to_container = "A".into();
        assert!(matches!(GraphOfGroups::new(&s), Err(GogError::ContainerViolation { end: End::From, .. })));
    }

    #[test]
    fn disconnected_is_rejected() {
        let mut s = example_spec();
        s.vertices.push(VertexSpec { id: "w".into(), group: GroupDesc::free(&["x"]), peripherals: vec![] });
        assert_eq!(GraphOfGroups::new(&s).unwrap_err(), GogError::DisconnectedGraph);
    }

    #[test]
    fn normal_form_examples() {
        let g = example();
        let vg = &g.vertices[0].group;
        let w3 = vg.display(&vg.reduce(&vg.parse_word("(ab)^3").unwrap()).unwrap());
        assert_eq!(g.display_nf(&g.normal_form_str("t^-1 (ab)^2 t").unwrap()), w3);
        let nf = g.normal_form_str("t^-1 a t").unwrap();
        assert_eq!(nf.edges.len(), 2);
        assert_eq!(g.display_nf(&nf), "t^-1 a t");
        assert!(g.normal_form_str("a a^-1").unwrap().is_trivial_in(&g));
        assert!(g.normal_form_str("t (ab)^3 t^-1 (ab)^-2").unwrap().is_trivial_in(&g));
    }

    #[test]
    fn vertex_generators_example() {
        let g = example();
        let gens: Vec<Word> = ["a", "b", "t"].iter().map(|s| g.parse_global(s).unwrap()).collect();
        let got = g.vertex_generators(&gens, "v").unwrap();
        let vg = &g.vertices[0].group;
        let shown: Vec<String> = got.iter().map(|x| vg.display(x)).collect();
        let want: Vec<String> = ["(ab)^2", "(ab)^3", "a", "b"]
            .iter()
            .map(|s| vg.display(&vg.reduce(&vg.parse_word(s).unwrap()).unwrap()))
            .collect();
        assert_eq!(shown, want);
        let at = g.vertex_generators(&[g.parse_global("a t").unwrap()], "v").unwrap();
        assert!(at.contains(&vg.reduce(&vg.parse_word("a").unwrap()).unwrap()));
        assert!(matches!(g.vertex_generators(&gens, "zz"), Err(GogError::UnknownVertex(_))));
    }

    #[test]
    fn free_product_normal_forms() {
        let g = free_product();
        let nf = g.normal_form_str("a b a^-1 b^-1").unwrap();
        assert_eq!(nf.edges.len(), 4);
        assert!(g.normal_form_str("a b b^-1 a^-1").unwrap().is_trivial_in(&g));
        assert_eq!(g.display_nf(&nf), "a b a^-1 b^-1");
    }
}
