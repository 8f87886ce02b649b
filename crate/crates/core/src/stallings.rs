//! Folded core graphs of finitely generated subgroups of free groups.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::group::{GroupDesc, GroupElement, Letter, Word};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum StallingsError {
    #[error("group is not free")]
    NotFreeGroup,
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("the generator map has a nontrivial kernel")]
    NotInjective,
}

/// A folded, trimmed subgroup graph with base vertex 0.
///
/// Half-edges are indexed by letter key; the optional tags record, for every
/// half-edge, a word over a source alphabet so that the tag product along a
/// loop at the base is a preimage of the loop label.
#[derive(Clone, Debug)]
pub struct CoreGraph {
    rank: usize,
    adj: Vec<Vec<Option<u32>>>,
    tags: Option<Vec<Vec<Word>>>,
}

impl PartialEq for CoreGraph {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.adj == other.adj
    }
}

impl Eq for CoreGraph {}

struct RawEdge {
    from: usize,
    gen: u32,
    to: usize,
    tag: Word,
}

impl CoreGraph {
    /// Folds the petals of `generators` in the free group of the given rank.
    pub fn from_words(rank: usize, generators: &[Word]) -> CoreGraph {
        let tags: Vec<Word> = generators.iter().map(|_| Word::empty()).collect();
        fold(rank, generators, &tags, &|_| true).expect("untagged folding cannot fail")
    }

    /// Folds with tags; `tag_trivial` decides whether a tag word is the identity
    /// of the source group. Fails when a fold identifies two half-edges whose
    /// tags differ, which witnesses a nontrivial kernel.
    pub fn tagged(
        rank: usize,
        generators: &[Word],
        tags: &[Word],
        tag_trivial: &dyn Fn(&Word) -> bool,
    ) -> Result<CoreGraph, StallingsError> {
        fold(rank, generators, tags, tag_trivial)
    }

    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|r| r.iter().filter(|x| x.is_some()).count()).sum::<usize>() / 2
    }

    /// Rank of the represented subgroup.
    pub fn subgroup_rank(&self) -> usize {
        self.num_edges() + 1 - self.num_vertices()
    }

    pub fn is_trivial(&self) -> bool {
        self.num_edges() == 0
    }

    pub fn target(&self, v: usize, l: Letter) -> Option<usize> {
        self.adj[v].get(l.key()).copied().flatten().map(|x| x as usize)
    }

    /// Positive edges `(from, generator, to)` in vertex and letter order.
    pub fn edges(&self) -> Vec<(usize, u32, usize)> {
        let mut out = Vec::new();
        for (v, row) in self.adj.iter().enumerate() {
            for g in 0..self.rank as u32 {
                if let Some(w) = row[Letter::pos(g).key()] {
                    out.push((v, g, w as usize));
                }
            }
        }
        out
    }

    /// Follows `w` from `start` as far as possible: (letters read, end vertex).
    pub fn read_from(&self, start: usize, w: &Word) -> (usize, usize) {
        let mut v = start;
        for (i, &l) in w.0.iter().enumerate() {
            match self.target(v, l) {
                Some(x) => v = x,
                None => return (i, v),
            }
        }
        (w.len(), v)
    }

    pub fn trace(&self, w: &Word) -> Option<usize> {
        let (n, v) = self.read_from(0, w);
        (n == w.len()).then_some(v)
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        self.trace(&w.free_reduce()) == Some(0)
    }

    pub fn membership(&self, w: &GroupElement) -> Result<bool, StallingsError> {
        match w {
            GroupElement::Free(word) if word.0.iter().all(|l| (l.gen as usize) < self.rank) => {
                Ok(self.contains_word(word))
            }
            _ => Err(StallingsError::GroupMismatch),
        }
    }

    /// Tag product along the loop reading `w`, when `w` is a member.
    pub fn preimage(&self, w: &Word) -> Option<Word> {
        let tags = self.tags.as_ref()?;
        let w = w.free_reduce();
        let mut v = 0;
        let mut acc = Vec::new();
        for &l in &w.0 {
            let x = self.target(v, l)?;
            acc.extend_from_slice(&tags[v][l.key()].0);
            v = x;
        }
        (v == 0).then(|| Word(acc).free_reduce())
    }

    /// Distances to the base vertex.
    fn dist_to_base(&self) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.num_vertices()];
        d[0] = 0;
        let mut q = VecDeque::from([0usize]);
        while let Some(v) = q.pop_front() {
            for x in self.adj[v].iter().flatten() {
                let x = *x as usize;
                if d[x] == usize::MAX {
                    d[x] = d[v] + 1;
                    q.push_back(x);
                }
            }
        }
        d
    }

    /// ShortLex-least geodesic word from `v` to the base.
    pub fn geodesic_to_base(&self, v: usize) -> Word {
        let d = self.dist_to_base();
        let mut out = Vec::new();
        let mut cur = v;
        while cur != 0 {
            let (key, next) = self.adj[cur]
                .iter()
                .enumerate()
                .filter_map(|(k, t)| t.map(|t| (k, t as usize)))
                .find(|&(_, t)| d[t] + 1 == d[cur])
                .expect("core graph is connected");
            out.push(Letter::from_key(key));
            cur = next;
        }
        Word(out)
    }

    /// ShortLex-least geodesic word from the base to `v`.
    pub fn geodesic_from_base(&self, v: usize) -> Word {
        // least word from base to v is the reverse-inverse of a least word
        // from v to base only up to ties, so search forward explicitly
        let d = self.dist_to_base();
        let mut best: Vec<Option<Word>> = vec![None; self.num_vertices()];
        best[0] = Some(Word::empty());
        let mut order: Vec<usize> = (0..self.num_vertices()).collect();
        order.sort_by_key(|&x| d[x]);
        for &x in &order {
            let Some(wx) = best[x].clone() else { continue };
            for (k, t) in self.adj[x].iter().enumerate() {
                if let Some(t) = t {
                    let t = *t as usize;
                    if d[t] == d[x] + 1 {
                        let mut w = wx.clone();
                        w.0.push(Letter::from_key(k));
                        if best[t].as_ref().is_none_or(|b| w < *b) {
                            best[t] = Some(w);
                        }
                    }
                }
            }
        }
        best[v].clone().expect("core graph is connected")
    }

    /// Splits `g` as `rep · a` with `a` in the subgroup and `rep` the
    /// ShortLex-least element of the left coset `g·H`.
    pub fn left_coset_rep(&self, g: &Word) -> (Word, Word) {
        let g = g.free_reduce();
        let ginv = g.inverse();
        let (n, x) = self.read_from(0, &ginv);
        let s = Word(ginv.0[n..].to_vec());
        let rep = s.inverse().concat(&self.geodesic_to_base(x)).free_reduce();
        let a = rep.inverse().concat(&g).free_reduce();
        debug_assert!(self.contains_word(&a));
        (rep, a)
    }

    /// Free basis read off a BFS spanning tree.
    pub fn basis(&self) -> Vec<Word> {
        let n = self.num_vertices();
        let mut path: Vec<Option<Word>> = vec![None; n];
        let mut tree_edge = vec![vec![false; 2 * self.rank]; n];
        path[0] = Some(Word::empty());
        let mut q = VecDeque::from([0usize]);
        while let Some(v) = q.pop_front() {
            for k in 0..2 * self.rank {
                if let Some(t) = self.adj[v][k] {
                    let t = t as usize;
                    if path[t].is_none() {
                        let mut w = path[v].clone().unwrap();
                        w.0.push(Letter::from_key(k));
                        path[t] = Some(w);
                        tree_edge[v][k] = true;
                        tree_edge[t][Letter::from_key(k).inverse().key()] = true;
                        q.push_back(t);
                    }
                }
            }
        }
        let mut out = Vec::new();
        for (u, g, v) in self.edges() {
            let k = Letter::pos(g).key();
            if tree_edge[u][k] {
                continue;
            }
            let w = path[u]
                .clone()
                .unwrap()
                .concat(&Word::letter(Letter::pos(g)))
                .concat(&path[v].clone().unwrap().inverse());
            out.push(w.free_reduce());
        }
        out
    }

    /// Whether every loop of `self` is a loop of `other`.
    pub fn is_subgroup_of(&self, other: &CoreGraph) -> bool {
        self.basis().iter().all(|w| other.contains_word(w))
    }

    pub fn dot(&self, symbols: &[String], name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph {name} {{");
        for v in 0..self.num_vertices() {
            if v == 0 {
                let _ = writeln!(s, "  v0 [shape=doublecircle, label=\"base\"];");
            } else {
                let _ = writeln!(s, "  v{v} [shape=circle, label=\"{v}\"];");
            }
        }
        for (u, g, v) in self.edges() {
            let label = symbols.get(g as usize).cloned().unwrap_or_else(|| format!("x{g}"));
            let _ = writeln!(s, "  v{u} -> v{v} [label=\"{label}\"];");
        }
        s.push_str("}\n");
        s
    }
}

/// Edge id, far end and label read from the near end.
type HalfEdge = (usize, usize, Word);

fn fold(
    rank: usize,
    generators: &[Word],
    tags: &[Word],
    tag_trivial: &dyn Fn(&Word) -> bool,
) -> Result<CoreGraph, StallingsError> {
    let mut edges: Vec<RawEdge> = Vec::new();
    let mut n = 1usize;
    for (w, t) in generators.iter().zip(tags) {
        let w = w.free_reduce();
        if w.is_empty() {
            if !tag_trivial(t) {
                return Err(StallingsError::NotInjective);
            }
            continue;
        }
        let mut prev = 0usize;
        for (i, &l) in w.0.iter().enumerate() {
            let next = if i + 1 == w.len() {
                0
            } else {
                n += 1;
                n - 1
            };
            let tag = if i == 0 { t.clone() } else { Word::empty() };
            if l.inv {
                edges.push(RawEdge { from: next, gen: l.gen, to: prev, tag: tag.inverse() });
            } else {
                edges.push(RawEdge { from: prev, gen: l.gen, to: next, tag });
            }
            prev = next;
        }
    }
    let mut alive = vec![true; n];
    loop {
        // half-edge index: (vertex, key) -> list of (edge id, far end, tag from the vertex)
        let mut index: BTreeMap<(usize, usize), Vec<HalfEdge>> = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            index.entry((e.from, Letter::pos(e.gen).key())).or_default().push((i, e.to, e.tag.clone()));
            index.entry((e.to, Letter::new(e.gen, true).key())).or_default().push((i, e.from, e.tag.inverse()));
        }
        let Some((_, list)) = index.iter().find(|(_, l)| l.len() >= 2) else {
            break;
        };
        let (i1, mut v1, mut t1) = list[0].clone();
        let (i2, mut v2, mut t2) = list[1].clone();
        if i1 == i2 {
            // a loop u -x-> u read in both directions; not a fold
            unreachable!("a single edge cannot give two half-edges with the same key");
        }
        if v1 == v2 {
            let lp = t2.concat(&t1.inverse()).free_reduce();
            if !tag_trivial(&lp) {
                return Err(StallingsError::NotInjective);
            }
            edges.remove(i2);
            continue;
        }
        if v2 == 0 {
            std::mem::swap(&mut v1, &mut v2);
            std::mem::swap(&mut t1, &mut t2);
        }
        let d = t1.inverse().concat(&t2).free_reduce();
        let dinv = d.inverse();
        for e in edges.iter_mut() {
            if e.from == v2 {
                e.tag = d.concat(&e.tag).free_reduce();
                e.from = v1;
            }
            if e.to == v2 {
                e.tag = e.tag.concat(&dinv).free_reduce();
                e.to = v1;
            }
        }
        alive[v2] = false;
    }
    // trim hanging trees away from the base
    loop {
        let mut deg = vec![0usize; n];
        for e in &edges {
            deg[e.from] += 1;
            deg[e.to] += 1;
        }
        let dead: Vec<usize> = (1..n).filter(|&v| alive[v] && deg[v] <= 1).collect();
        if dead.is_empty() {
            break;
        }
        for &v in &dead {
            alive[v] = false;
        }
        edges.retain(|e| alive[e.from] && alive[e.to]);
    }
    // canonical numbering by BFS in letter order
    let mut half: HashMap<(usize, usize), (usize, Word)> = HashMap::new();
    for e in &edges {
        half.insert((e.from, Letter::pos(e.gen).key()), (e.to, e.tag.clone()));
        half.insert((e.to, Letter::new(e.gen, true).key()), (e.from, e.tag.inverse()));
    }
    let mut num: HashMap<usize, usize> = HashMap::from([(0, 0)]);
    let mut order = vec![0usize];
    let mut q = VecDeque::from([0usize]);
    while let Some(v) = q.pop_front() {
        for k in 0..2 * rank {
            if let Some((t, _)) = half.get(&(v, k)) {
                if !num.contains_key(t) {
                    num.insert(*t, order.len());
                    order.push(*t);
                    q.push_back(*t);
                }
            }
        }
    }
    let m = order.len();
    let mut adj = vec![vec![None; 2 * rank]; m];
    let mut tg = vec![vec![Word::empty(); 2 * rank]; m];
    for (&(v, k), (t, tag)) in &half {
        adj[num[&v]][k] = Some(num[t] as u32);
        tg[num[&v]][k] = tag.clone();
    }
    Ok(CoreGraph { rank, adj, tags: Some(tg) })
}

/// Folded core graph of the subgroup generated by `generators`.
pub fn core_graph(group: &GroupDesc, generators: &[Word]) -> Result<CoreGraph, StallingsError> {
    if !group.is_free() {
        return Err(StallingsError::NotFreeGroup);
    }
    Ok(CoreGraph::from_words(group.rank(), generators))
}

/// A component of the fiber product with nontrivial loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackComponent {
    /// Vertex pairs of the component.
    pub vertices: Vec<(usize, usize)>,
    /// Double-coset witness `g`: the loops represent `H₁ ∩ g⁻¹H₂g`.
    pub witness: Word,
    /// Core graph of `H₁ ∩ g⁻¹H₂g`.
    pub intersection: CoreGraph,
    pub rank: usize,
    /// Whether the component contains the pair of base vertices.
    pub diagonal: bool,
}

/// Components of the fiber product carrying nontrivial intersections.
pub fn pullback(c1: &CoreGraph, c2: &CoreGraph) -> Result<Vec<PullbackComponent>, StallingsError> {
    if c1.rank != c2.rank {
        return Err(StallingsError::GroupMismatch);
    }
    let rank = c1.rank;
    let (n1, n2) = (c1.num_vertices(), c2.num_vertices());
    let id = |u: usize, v: usize| u * n2 + v;
    let mut comp = vec![usize::MAX; n1 * n2];
    let p1: Vec<Word> = (0..n1).map(|v| c1.geodesic_from_base(v)).collect();
    let p2: Vec<Word> = (0..n2).map(|v| c2.geodesic_from_base(v)).collect();
    let mut out = Vec::new();
    for start in 0..n1 * n2 {
        if comp[start] != usize::MAX {
            continue;
        }
        let cid = start;
        comp[start] = cid;
        let mut verts = vec![(start / n2, start % n2)];
        let mut q = VecDeque::from([(start / n2, start % n2)]);
        let mut half_edges = 0usize;
        while let Some((u, v)) = q.pop_front() {
            for k in 0..2 * rank {
                let l = Letter::from_key(k);
                if let (Some(a), Some(b)) = (c1.target(u, l), c2.target(v, l)) {
                    half_edges += 1;
                    if comp[id(a, b)] == usize::MAX {
                        comp[id(a, b)] = cid;
                        verts.push((a, b));
                        q.push_back((a, b));
                    }
                }
            }
        }
        let e = half_edges / 2;
        if e < verts.len() {
            continue;
        }
        // choose the vertex with ShortLex-least witness
        let (u, v, g) = verts
            .iter()
            .map(|&(u, v)| (u, v, p2[v].concat(&p1[u].inverse()).free_reduce()))
            .min_by(|a, b| a.2.cmp(&b.2))
            .unwrap();
        let loops = component_loops(c1, c2, (u, v), rank);
        let alpha = &p1[u];
        let conj: Vec<Word> = loops.iter().map(|w| alpha.concat(w).concat(&alpha.inverse()).free_reduce()).collect();
        let intersection = CoreGraph::from_words(rank, &conj);
        verts.sort();
        out.push(PullbackComponent {
            diagonal: verts.binary_search(&(0, 0)).is_ok(),
            vertices: verts,
            witness: g,
            rank: intersection.subgroup_rank(),
            intersection,
        });
    }
    out.sort_by(|a, b| a.witness.cmp(&b.witness));
    Ok(out)
}

/// Free basis of the loops at `base` inside the product component.
fn component_loops(c1: &CoreGraph, c2: &CoreGraph, base: (usize, usize), rank: usize) -> Vec<Word> {
    let mut path: HashMap<(usize, usize), Word> = HashMap::from([(base, Word::empty())]);
    let mut q = VecDeque::from([base]);
    let mut tree: std::collections::HashSet<((usize, usize), usize)> = std::collections::HashSet::new();
    let mut order = vec![base];
    while let Some((u, v)) = q.pop_front() {
        for k in 0..2 * rank {
            let l = Letter::from_key(k);
            if let (Some(a), Some(b)) = (c1.target(u, l), c2.target(v, l)) {
                if !path.contains_key(&(a, b)) {
                    let mut w = path[&(u, v)].clone();
                    w.0.push(l);
                    path.insert((a, b), w);
                    tree.insert(((u, v), k));
                    tree.insert(((a, b), l.inverse().key()));
                    q.push_back((a, b));
                    order.push((a, b));
                }
            }
        }
    }
    let mut out = Vec::new();
    for &(u, v) in &order {
        for g in 0..rank as u32 {
            let l = Letter::pos(g);
            if let (Some(a), Some(b)) = (c1.target(u, l), c2.target(v, l)) {
                if tree.contains(&((u, v), l.key())) {
                    continue;
                }
                let w = path[&(u, v)].concat(&Word::letter(l)).concat(&path[&(a, b)].inverse());
                out.push(w.free_reduce());
            }
        }
    }
    out
}

/// Outcome of a hypothesis check with an optional witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// `(g, i, j)`: `H_i ∩ g⁻¹ H_j g` is nontrivial where it should not be.
    pub witness: Option<(Word, usize, usize)>,
}

/// Malnormality of a collection of subgroups of a free group.
pub fn is_malnormal_collection(subgroups: &[CoreGraph]) -> Verdict {
    for i in 0..subgroups.len() {
        for j in i..subgroups.len() {
            let comps = pullback(&subgroups[i], &subgroups[j]).expect("same ambient group");
            for c in comps {
                if i == j && c.diagonal {
                    continue;
                }
                return Verdict { holds: false, witness: Some((c.witness, i, j)) };
            }
        }
    }
    Verdict { holds: true, witness: None }
}

/// Conjugate `g⁻¹ H g` of a subgroup.
pub fn conjugate(c: &CoreGraph, g: &Word) -> CoreGraph {
    let gens: Vec<Word> = c.basis().iter().map(|w| g.inverse().concat(w).concat(g).free_reduce()).collect();
    CoreGraph::from_words(c.rank, &gens)
}

/// Totality of `h` with respect to `peripherals`: each `h ∩ g⁻¹Pg` is trivial
/// or all of `g⁻¹Pg`. The witness is `(g, k, 0)` for peripheral `k`.
pub fn is_total(h: &CoreGraph, peripherals: &[CoreGraph]) -> Verdict {
    for (k, p) in peripherals.iter().enumerate() {
        for c in pullback(h, p).expect("same ambient group") {
            let full = conjugate(p, &c.witness);
            if c.intersection != full {
                return Verdict { holds: false, witness: Some((c.witness, k, 0)) };
            }
        }
    }
    Verdict { holds: true, witness: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupDesc {
        GroupDesc::free(&["a", "b"])
    }

    fn core(ws: &[&str]) -> CoreGraph {
        let g = f2();
        let words: Vec<Word> = ws.iter().map(|w| g.parse_word(w).unwrap()).collect();
        core_graph(&g, &words).unwrap()
    }

    fn w(s: &str) -> Word {
        f2().parse_word(s).unwrap()
    }

    #[test]
    fn single_loop() {
        let c = core(&["a"]);
        assert_eq!(c.num_vertices(), 1);
        assert_eq!(c.edges(), vec![(0, 0, 0)]);
    }

    #[test]
    fn two_petals_fold_to_lollipop() {
        let c = core(&["a", "b a b^-1"]);
        assert_eq!(c.num_vertices(), 2);
        assert_eq!(c.edges(), vec![(0, 0, 0), (0, 1, 1), (1, 0, 1)]);
        assert!(c.contains_word(&w("b a^2 b^-1")));
    }

    #[test]
    fn independent_generators_give_rank_two() {
        let c = core(&["ab", "ba"]);
        assert_eq!(c.subgroup_rank(), 2);
    }

    #[test]
    fn cyclic_membership() {
        let c = core(&["ab"]);
        assert!(c.contains_word(&w("(ab)^3")));
        assert!(!c.contains_word(&w("a")));
        let z = GroupDesc::abelian(&["x"], 1, &[]).unwrap();
        assert_eq!(c.membership(&z.identity()), Err(StallingsError::GroupMismatch));
        assert_eq!(core_graph(&z, &[]).unwrap_err(), StallingsError::NotFreeGroup);
    }

    #[test]
    fn pullback_examples() {
        let pa = pullback(&core(&["a"]), &core(&["a"])).unwrap();
        assert_eq!(pa.len(), 1);
        assert!(pa[0].diagonal);
        assert_eq!(pa[0].intersection, core(&["a"]));
        assert!(pullback(&core(&["a"]), &core(&["b"])).unwrap().is_empty());
        let p = pullback(&core(&["a^2"]), &core(&["a^3"])).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].intersection, core(&["a^6"]));
    }

    #[test]
    fn malnormal_examples() {
        assert!(is_malnormal_collection(&[core(&["ab"])]).holds);
        let v = is_malnormal_collection(&[core(&["a^2"])]);
        assert!(!v.holds);
        assert_eq!(v.witness, Some((w("a"), 0, 0)));
        assert!(is_malnormal_collection(&[core(&["a"]), core(&["b"])]).holds);
        assert!(is_malnormal_collection(&[core(&[])]).holds);
    }

    #[test]
    fn total_examples() {
        assert!(is_total(&core(&["a"]), &[core(&["a"])]).holds);
        let v = is_total(&core(&["a^2"]), &[core(&["a"])]);
        assert!(!v.holds);
        assert_eq!(v.witness, Some((Word::empty(), 0, 0)));
        assert!(is_total(&core(&["b"]), &[core(&["a"])]).holds);
        assert!(is_total(&core(&[]), &[core(&["a"])]).holds);
    }

    #[test]
    fn coset_reps_are_shortlex_least() {
        let c = core(&["ab"]);
        let (rep, a) = c.left_coset_rep(&w("b^-1 a^-1 a b a"));
        assert_eq!(rep, w("a"));
        assert!(a.is_empty());
        let c2 = core(&["(ab)^2"]);
        let (rep, _) = c2.left_coset_rep(&w("(ab)^-1"));
        assert_eq!(rep, w("ab"));
    }

    #[test]
    fn tags_give_preimages() {
        let e = GroupDesc::free(&["c"]);
        let gens = [w("(ab)^2")];
        let tags = [e.parse_word("c").unwrap()];
        let c = CoreGraph::tagged(2, &gens, &tags, &|t| t.free_reduce().is_empty()).unwrap();
        assert_eq!(c.preimage(&w("(ab)^6")), Some(e.parse_word("c^3").unwrap()));
        assert_eq!(c.preimage(&w("(ab)^-2")), Some(e.parse_word("c^-1").unwrap()));
        assert_eq!(c.preimage(&w("ab")), None);
    }

    #[test]
    fn tags_detect_kernel() {
        let e = GroupDesc::free(&["c", "d"]);
        let gens = [w("a^2"), w("a^3")];
        let tags = [e.parse_word("c").unwrap(), e.parse_word("d").unwrap()];
        let r = CoreGraph::tagged(2, &gens, &tags, &|t| t.free_reduce().is_empty());
        assert_eq!(r.unwrap_err(), StallingsError::NotInjective);
        let gens = [w("a b"), w("b a")];
        assert!(CoreGraph::tagged(2, &gens, &tags, &|t| t.free_reduce().is_empty()).is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use std::collections::HashSet;

        fn word_strategy(max: usize) -> impl Strategy<Value = Word> {
            proptest::collection::vec((0u32..2, any::<bool>()), 1..=max)
                .prop_map(|v| Word(v.into_iter().map(|(g, i)| Letter::new(g, i)).collect()).free_reduce())
        }

        /// Reduced products of at most `syl` generator letters.
        fn brute_members(gens: &[Word], syl: usize, maxlen: usize) -> HashSet<Word> {
            let mut letters: Vec<Word> = Vec::new();
            for g in gens {
                letters.push(g.clone());
                letters.push(g.inverse());
            }
            let mut seen: HashSet<Word> = HashSet::from([Word::empty()]);
            let mut layer = vec![Word::empty()];
            for _ in 0..syl {
                let mut next = Vec::new();
                for x in &layer {
                    for l in &letters {
                        let y = x.concat(l).free_reduce();
                        if y.len() <= maxlen + 8 && seen.insert(y.clone()) {
                            next.push(y);
                        }
                    }
                }
                layer = next;
            }
            seen.into_iter().filter(|w| w.len() <= maxlen).collect()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]
            #[test]
            fn folding_is_confluent(gens in proptest::collection::vec(word_strategy(5), 1..=3), rot in 0usize..3) {
                let mut perm = gens.clone();
                let k = rot % perm.len();
                perm.rotate_left(k);
                perm.reverse();
                prop_assert_eq!(CoreGraph::from_words(2, &gens), CoreGraph::from_words(2, &perm));
            }

            #[test]
            fn membership_matches_enumeration(gens in proptest::collection::vec(word_strategy(3), 1..=2), probe in word_strategy(8)) {
                let c = CoreGraph::from_words(2, &gens);
                let members = brute_members(&gens, 6, 8);
                if members.contains(&probe) {
                    prop_assert!(c.contains_word(&probe));
                }
                for m in members.iter().take(50) {
                    prop_assert!(c.contains_word(m));
                }
            }

            #[test]
            fn pullback_loops_lie_in_both(g1 in proptest::collection::vec(word_strategy(4), 1..=2), g2 in proptest::collection::vec(word_strategy(4), 1..=2)) {
                let c1 = CoreGraph::from_words(2, &g1);
                let c2 = CoreGraph::from_words(2, &g2);
                for comp in pullback(&c1, &c2).unwrap() {
                    let conj = conjugate(&c2, &comp.witness);
                    for w in comp.intersection.basis() {
                        prop_assert!(c1.contains_word(&w));
                        prop_assert!(conj.contains_word(&w));
                    }
                }
            }

            #[test]
            fn coset_rep_is_least_in_coset(gens in proptest::collection::vec(word_strategy(3), 1..=2), g in word_strategy(5)) {
                let c = CoreGraph::from_words(2, &gens);
                let (rep, a) = c.left_coset_rep(&g);
                prop_assert!(c.contains_word(&a));
                prop_assert_eq!(rep.concat(&a).free_reduce(), g.clone());
                // no shorter-or-smaller element of gH among words up to |rep|
                let f = GroupDesc::free(&["a", "b"]);
                for x in f.ball(rep.len()) {
                    let GroupElement::Free(xw) = x else { unreachable!() };
                    if xw < rep {
                        prop_assert!(!c.contains_word(&xw.inverse().concat(&g)));
                    }
                }
            }
        }
    }
}
