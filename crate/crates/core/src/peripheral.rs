//! Peripheral structures: ℚ from parabolic trees, union minus repeats, and
//! extension and transfer checks.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bass_serre::TreeWindow;
use crate::fine::{
    conjugate_inside, conjugated_generators, inverse_items, parabolic_tree_stabilizers, phi_components, phi_edge,
    FineWindow, ParabolicTree,
};
use crate::gog::{End, GraphOfGroups, Item, NormalForm};
use crate::group::{GroupElement, GroupKind, Letter, Word};
use crate::input::TameSpec;
use crate::quasiconvex::{run_window, QcError, QuasiconvexWitness, TamePresentation};
use crate::stallings::pullback;
use crate::subgroup::Subgroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PeripheralError {
    #[error("edge `{edge}` end {end} is not parabolic in its declared container")]
    HypothesisFailure { edge: String, end: End },
    #[error("edge `{edge}` end {end} is not maximal in its declared container")]
    MaximalityFailure { edge: String, end: End },
    #[error("edge `{first}` is not isolated from `{second}` ({witness})")]
    IsolationFailure { first: String, second: String, witness: String },
    #[error("peripheral `{0}` lies in no member of the extension")]
    NotAnExtension(String),
    #[error("no witness for the intersection with `{extension}` at coset {coset}")]
    MissingIntersectionWitness { extension: String, coset: String },
    #[error(transparent)]
    Qc(#[from] QcError),
}

/// Membership oracle of a peripheral member.
#[derive(Clone, Debug)]
pub enum Oracle {
    Tree(Box<ParabolicTree>),
    /// `γ P γ⁻¹` for a vertex peripheral.
    Conjugate {
        lift: Vec<Item>,
        member: (usize, usize),
    },
}

#[derive(Clone, Debug)]
pub struct PeripheralDesc {
    pub id: String,
    pub generators: Vec<NormalForm>,
    pub provenance: String,
    pub finite: bool,
    pub truncated: bool,
    pub oracle: Oracle,
}

impl PeripheralDesc {
    pub fn contains(&self, g: &GraphOfGroups, x: &NormalForm) -> bool {
        match &self.oracle {
            Oracle::Tree(t) => t.contains(g, x),
            Oracle::Conjugate { lift, member } => conjugate_inside(g, x, lift, *member),
        }
    }

    /// Whether every generator of `self` lies in `other`.
    pub fn inside(&self, g: &GraphOfGroups, other: &PeripheralDesc) -> bool {
        self.generators.iter().all(|h| other.contains(g, h))
    }
}

/// A dropped repeat with the edge chain identifying it with its keeper.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Removed {
    pub id: String,
    pub kept: String,
    pub chain: Vec<String>,
    /// The chain's conjugation carries the removed generators into the keeper.
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct PeripheralStructure {
    pub members: Vec<PeripheralDesc>,
    pub removed: Vec<Removed>,
}

impl PeripheralStructure {
    pub fn infinite(&self) -> impl Iterator<Item = &PeripheralDesc> {
        self.members.iter().filter(|m| !m.finite)
    }
}

fn member_name(g: &GraphOfGroups, (v, p): (usize, usize)) -> String {
    format!("{}.{}", g.vertices[v].id, g.vertices[v].peripherals[p].id)
}

fn is_finite_member(g: &GraphOfGroups, (v, p): (usize, usize)) -> bool {
    let s = &g.vertices[v].peripherals[p].subgroup;
    s.is_trivial() || g.vertices[v].group.is_finite()
}

fn check_parabolic(g: &GraphOfGroups) -> Result<(), PeripheralError> {
    for e in &g.edges {
        for (end, ee) in [(End::From, &e.ends[0]), (End::To, &e.ends[1])] {
            if !ee.image.is_subgroup_of(&g.vertices[ee.vertex].peripherals[ee.container].subgroup) {
                return Err(PeripheralError::HypothesisFailure { edge: e.id.clone(), end });
            }
        }
    }
    Ok(())
}

/// ⋃ℙ_v with every member conjugated to the base along the spanning tree.
pub fn vertex_peripherals(g: &GraphOfGroups) -> PeripheralStructure {
    let mut members = Vec::new();
    for (v, vert) in g.vertices.iter().enumerate() {
        let lift: Vec<Item> = g.tree_path(g.base, v).into_iter().map(|(e, f)| Item::Edge(e, f)).collect();
        for p in 0..vert.peripherals.len() {
            members.push(PeripheralDesc {
                id: member_name(g, (v, p)),
                generators: conjugated_generators(g, &lift, (v, p)),
                provenance: format!("vertex {}", vert.id),
                finite: is_finite_member(g, (v, p)),
                truncated: false,
                oracle: Oracle::Conjugate { lift: lift.clone(), member: (v, p) },
            });
        }
    }
    PeripheralStructure { members, removed: vec![] }
}

/// ℚ: one stabilizer per parabolic tree orbit.
pub fn compute_q(
    g: &GraphOfGroups,
    t: Option<&TreeWindow>,
    k: Option<&FineWindow>,
) -> Result<PeripheralStructure, PeripheralError> {
    check_parabolic(g)?;
    let members = parabolic_tree_stabilizers(g, t, k)
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let names: Vec<String> = s.component.members.iter().map(|&x| member_name(g, x)).collect();
            PeripheralDesc {
                id: format!("Q{}", i + 1),
                generators: s.generators.clone(),
                provenance: names.join(", "),
                finite: s.finite,
                truncated: s.truncated,
                oracle: Oracle::Tree(Box::new(s)),
            }
        })
        .collect();
    Ok(PeripheralStructure { members, removed: vec![] })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Every edge group maximal parabolic at both ends.
    MaximalBothEnds,
    /// Outgoing edge groups maximal and isolated from the other edge groups.
    MaximalOutgoing,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::MaximalBothEnds => "maximal at both ends",
            Variant::MaximalOutgoing => "maximal outgoing, isolated",
        })
    }
}

/// Whether some conjugate of `x` inside the vertex group lies in `y`.
fn conjugate_into(g: &GraphOfGroups, v: usize, x: &Subgroup, y: &Subgroup) -> Option<String> {
    let grp = &g.vertices[v].group;
    match &grp.kind {
        GroupKind::Free => {
            let (cx, cy) = (x.core().unwrap(), y.core().unwrap());
            pullback(cx, cy)
                .expect("same ambient group")
                .into_iter()
                .find(|c| cx.is_subgroup_of(&c.intersection))
                .map(|c| format!("g = {}", c.witness.display(&grp.symbols)))
        }
        _ => x.is_subgroup_of(y).then(|| "g = 1".to_string()),
    }
}

fn infinite_image(g: &GraphOfGroups, e: usize) -> bool {
    !g.edges[e].group.is_finite()
}

/// Picks the corollary variant whose hypotheses hold.
pub fn select_variant(g: &GraphOfGroups) -> Result<Variant, PeripheralError> {
    check_parabolic(g)?;
    let maximal = |e: usize, end: usize| {
        g.edges[e].ends[end]
            .image
            .same_as(&g.vertices[g.edges[e].ends[end].vertex].peripherals[g.edges[e].ends[end].container].subgroup)
    };
    if (0..g.edges.len()).all(|e| maximal(e, 0) && maximal(e, 1)) {
        return Ok(Variant::MaximalBothEnds);
    }
    for e in 0..g.edges.len() {
        if infinite_image(g, e) && !maximal(e, 0) {
            return Err(PeripheralError::MaximalityFailure { edge: g.edges[e].id.clone(), end: End::From });
        }
    }
    for e in (0..g.edges.len()).filter(|&e| infinite_image(g, e)) {
        let out = &g.edges[e].ends[0];
        for d in (0..g.edges.len()).filter(|&d| infinite_image(g, d)) {
            for (end, other) in g.edges[d].ends.iter().enumerate() {
                if (d == e && end == 0) || other.vertex != out.vertex {
                    continue;
                }
                if let Some(w) = conjugate_into(g, out.vertex, &other.image, &out.image) {
                    return Err(PeripheralError::IsolationFailure {
                        first: g.edges[e].id.clone(),
                        second: format!("{} {}", g.edges[d].id, if end == 0 { End::From } else { End::To }),
                        witness: w,
                    });
                }
            }
        }
    }
    Ok(Variant::MaximalOutgoing)
}

/// ⋃ℙ_v minus repeats: one retained peripheral per Φ-component.
pub fn compute_union_minus_repeats(g: &GraphOfGroups) -> Result<(Variant, PeripheralStructure), PeripheralError> {
    let variant = select_variant(g)?;
    let mut members = Vec::new();
    let mut removed = Vec::new();
    for comp in phi_components(g) {
        let keep: Vec<usize> = match variant {
            Variant::MaximalBothEnds => vec![0],
            Variant::MaximalOutgoing => {
                let outgoing: BTreeSet<(usize, usize)> =
                    comp.edges.iter().filter(|&&e| infinite_image(g, e)).map(|&e| phi_edge(g, e).0).collect();
                (0..comp.members.len()).filter(|&i| !outgoing.contains(&comp.members[i])).collect()
            }
        };
        for &i in &keep {
            let x = comp.members[i];
            members.push(PeripheralDesc {
                id: member_name(g, x),
                generators: conjugated_generators(g, &comp.lifts[i], x),
                provenance: format!("vertex {}", g.vertices[x.0].id),
                finite: is_finite_member(g, x),
                truncated: false,
                oracle: Oracle::Conjugate { lift: comp.lifts[i].clone(), member: x },
            });
        }
        for i in (0..comp.members.len()).filter(|i| !keep.contains(i)) {
            let x = comp.members[i];
            let j = match variant {
                Variant::MaximalBothEnds => 0,
                Variant::MaximalOutgoing => {
                    let e = *comp.edges.iter().find(|&&e| phi_edge(g, e).0 == x).unwrap();
                    comp.position(phi_edge(g, e).1).unwrap()
                }
            };
            let y = comp.members[j];
            let gens = conjugated_generators(g, &comp.lifts[i], x);
            removed.push(Removed {
                id: member_name(g, x),
                kept: member_name(g, y),
                chain: comp.chain(i, j).into_iter().map(|e| g.edges[e].id.clone()).collect(),
                verified: gens.iter().all(|h| conjugate_inside(g, h, &comp.lifts[j], y)),
            });
        }
    }
    members.sort_by_key(|m| match m.oracle {
        Oracle::Conjugate { member, .. } => member,
        Oracle::Tree(_) => (usize::MAX, usize::MAX),
    });
    Ok((variant, PeripheralStructure { members, removed }))
}

/// Whether the infinite members of `a` and `b` match as subgroups.
pub fn structures_agree(g: &GraphOfGroups, a: &PeripheralStructure, b: &PeripheralStructure) -> bool {
    let fa: Vec<&PeripheralDesc> = a.infinite().collect();
    let fb: Vec<&PeripheralDesc> = b.infinite().collect();
    fa.len() == fb.len() && fa.iter().all(|x| fb.iter().any(|y| x.inside(g, y) && y.inside(g, x)))
}

/// Reduced words over the global alphabet of length at most `n`, ShortLex.
pub fn global_ball(g: &GraphOfGroups, n: usize) -> Vec<Word> {
    let letters: Vec<Letter> =
        (0..g.symbols.len() as u32).flat_map(|s| [Letter::pos(s), Letter::new(s, true)]).collect();
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.0.last().is_some_and(|&x| x == l.inverse()) {
                    continue;
                }
                let mut v = w.clone();
                v.0.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Bounded search for a conjugator `c` with `c Mᵢ c⁻¹ ⊆ Mⱼ` between distinct
/// infinite members; `None` means no repeat up to length `n`.
pub fn repeat_search(g: &GraphOfGroups, s: &PeripheralStructure, n: usize) -> Option<(String, String, String)> {
    let inf: Vec<&PeripheralDesc> = s.infinite().collect();
    if inf.len() < 2 {
        return None;
    }
    for w in global_ball(g, n) {
        let c = g.normal_form(&w);
        let ci = g.normal_form_items(g.base, &g.inverse_items(&c)).expect("legal path");
        for a in &inf {
            let conj: Vec<NormalForm> =
                a.generators.iter().map(|h| g.multiply(&g.multiply(&c, h).unwrap(), &ci).unwrap()).collect();
            for b in &inf {
                if a.id != b.id && conj.iter().all(|h| b.contains(g, h)) {
                    return Some((a.id.clone(), b.id.clone(), g.display_global(&w)));
                }
            }
        }
    }
    None
}

/// Verdict of a check that may only be decided on part of its input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Holds,
    Fails(String),
    Undecided(String),
}

#[derive(Clone, Debug)]
pub struct ExtensionVerdict {
    /// Per infinite member of ℙ: the member of 𝔼 containing it, if decided.
    pub containment: Vec<(String, Decision)>,
    pub malnormal: Decision,
    /// Per member of 𝔼: κ on each window and stability.
    pub quasiconvex: Vec<(String, Vec<u32>, bool)>,
    pub valid: bool,
}

/// A single conjugated vertex subgroup `c H_v c⁻¹`, the decidable shape.
struct VertexMember {
    vertex: usize,
    tree_vertex: usize,
    local: Subgroup,
    conj: NormalForm,
}

fn vertex_member(g: &GraphOfGroups, t: &TreeWindow, e: &TameSpec) -> Result<Option<VertexMember>, PeripheralError> {
    if e.vertices.len() != 1 || !e.connecting.is_empty() {
        return Ok(None);
    }
    let h = TamePresentation::resolve(g, t, e)?;
    let s = &h.selected[0];
    let grp = &g.vertices[s.vertex].group;
    let yi = grp.invert(&s.shift);
    let local =
        Subgroup::new(grp, &s.subgroup.gens.iter().map(|x| grp.mul(&grp.mul(&s.shift, x), &yi)).collect::<Vec<_>>());
    let conj = t.vertices[s.tree_vertex].form.clone();
    Ok(Some(VertexMember { vertex: s.vertex, tree_vertex: s.tree_vertex, local, conj }))
}

impl VertexMember {
    fn contains(&self, g: &GraphOfGroups, x: &NormalForm) -> bool {
        let mut items = g.inverse_items(&self.conj);
        items.extend(g.items_of(x));
        items.extend(g.items_of(&self.conj));
        match g.normal_form_items(self.vertex, &items) {
            Ok(nf) => nf.edges.is_empty() && self.local.contains(&nf.syllables[0]),
            Err(_) => false,
        }
    }
}

/// Window-scale totality of vertex groups against `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalityProbe {
    pub radius: usize,
    pub checked: usize,
    /// Conjugates `Q^c` meeting `G_v` in an infinite-order element without
    /// lying in `G_v`.
    pub failures: Vec<String>,
}

/// Probes whether every vertex group `G_v` is total against the members of
/// `s`: for conjugators and vertex elements of length at most `n`, a
/// conjugate meeting `G_v` in an element of infinite order must lie in `G_v`.
pub fn totality_probe(g: &GraphOfGroups, s: &PeripheralStructure, n: usize) -> TotalityProbe {
    let mut checked = 0;
    let mut failures = Vec::new();
    let conjugators: Vec<(Word, NormalForm, NormalForm)> = global_ball(g, n)
        .into_iter()
        .map(|w| {
            let c = g.normal_form(&w);
            let ci = g.normal_form_items(g.base, &g.inverse_items(&c)).expect("legal path");
            (w, c, ci)
        })
        .collect();
    for (v, vert) in g.vertices.iter().enumerate() {
        let free_coords: Vec<bool> = match &vert.group.kind {
            GroupKind::Finite(_) => continue,
            GroupKind::Abelian { orders } => orders.iter().map(|&d| d == 0).collect(),
            _ => vec![],
        };
        let lift: Vec<Item> = g.tree_path(g.base, v).into_iter().map(|(e, f)| Item::Edge(e, f)).collect();
        let back = inverse_items(g, &lift);
        let infinite_order = |x: &GroupElement| match x {
            GroupElement::Abelian(c) => c.iter().zip(&free_coords).any(|(&a, &f)| f && a != 0),
            _ => !vert.group.is_identity(x),
        };
        let embed = |x: &GroupElement| {
            let mut items = lift.clone();
            items.push(Item::Syllable(v, x.clone()));
            items.extend(back.iter().cloned());
            g.normal_form_items(g.base, &items).expect("legal path")
        };
        let in_vertex = |y: &NormalForm| {
            let mut items = back.clone();
            items.extend(g.items_of(y));
            items.extend(lift.iter().cloned());
            g.normal_form_items(v, &items).is_ok_and(|nf| nf.edges.is_empty())
        };
        let ball: Vec<NormalForm> = vert.group.ball(n).iter().filter(|x| infinite_order(x)).map(embed).collect();
        for q in s.infinite() {
            for (w, c, ci) in &conjugators {
                checked += 1;
                let meets = ball.iter().any(|x| q.contains(g, &g.multiply(&g.multiply(c, x).unwrap(), ci).unwrap()));
                if !meets {
                    continue;
                }
                let inside =
                    q.generators.iter().all(|h| in_vertex(&g.multiply(&g.multiply(ci, h).unwrap(), c).unwrap()));
                if !inside {
                    failures.push(format!("{} meets {}^{} without containing it", vert.id, q.id, g.display_global(w)));
                }
            }
        }
    }
    TotalityProbe { radius: n, checked, failures }
}

/// Checks that `ext` extends `base` and is almost malnormal and relatively
/// quasiconvex on the given windows.
pub fn check_extension(
    g: &GraphOfGroups,
    base: &PeripheralStructure,
    ext: &[TameSpec],
    windows: &[(usize, usize)],
) -> Result<ExtensionVerdict, PeripheralError> {
    let (r, l) = *windows.iter().max().expect("at least one window");
    let t = TreeWindow::build(g, r, l).map_err(QcError::from)?;
    let shapes: Vec<Option<VertexMember>> = ext.iter().map(|e| vertex_member(g, &t, e)).collect::<Result<_, _>>()?;
    let mut containment = Vec::new();
    for p in base.infinite() {
        let mut decision = Decision::Undecided("no decidable member of the extension".into());
        let mut all_decidable = true;
        for (e, shape) in ext.iter().zip(&shapes) {
            match shape {
                Some(m) if p.generators.iter().all(|h| m.contains(g, h)) => {
                    decision = Decision::Holds;
                    break;
                }
                Some(_) => {}
                None => all_decidable = false,
            }
            let _ = e;
        }
        if decision != Decision::Holds {
            if all_decidable {
                return Err(PeripheralError::NotAnExtension(p.id.clone()));
            }
            decision = Decision::Undecided("membership in members with connecting elements".into());
        }
        containment.push((p.id.clone(), decision));
    }
    let identity = shapes.iter().all(|m| {
        m.as_ref().is_some_and(|m| {
            let gens: Vec<NormalForm> = m
                .local
                .gens
                .iter()
                .map(|x| {
                    let mut items = g.items_of(&m.conj);
                    items.push(Item::Syllable(m.vertex, x.clone()));
                    items.extend(g.inverse_items(&m.conj));
                    g.normal_form_items(g.base, &items).expect("legal path")
                })
                .collect();
            base.infinite()
                .any(|p| gens.iter().all(|h| p.contains(g, h)) && p.generators.iter().all(|h| m.contains(g, h)))
        })
    });
    let malnormal = if identity { Decision::Holds } else { extension_malnormality(g, ext, &shapes) };
    let mut quasiconvex = Vec::new();
    for e in ext {
        let mut ks = Vec::new();
        for &(r, l) in windows {
            ks.push(run_window(g, e, r, l)?.kappa.kappa);
        }
        let stable = ks.len() >= 2 && ks[ks.len() - 1] == ks[ks.len() - 2];
        quasiconvex.push((e.id.clone(), ks, stable));
    }
    let valid = malnormal == Decision::Holds
        && containment.iter().all(|(_, d)| *d == Decision::Holds)
        && quasiconvex.iter().all(|(_, _, s)| *s);
    Ok(ExtensionVerdict { containment, malnormal, quasiconvex, valid })
}

fn extension_malnormality(g: &GraphOfGroups, ext: &[TameSpec], shapes: &[Option<VertexMember>]) -> Decision {
    if let Some(i) = shapes.iter().position(|s| s.is_none()) {
        return Decision::Undecided(format!("member {} has connecting elements", ext[i].id));
    }
    let ms: Vec<&VertexMember> = shapes.iter().map(|s| s.as_ref().unwrap()).collect();
    for (i, m) in ms.iter().enumerate() {
        let grp = &g.vertices[m.vertex].group;
        let same: Vec<&Subgroup> =
            ms.iter().filter(|o| o.vertex == m.vertex && o.tree_vertex == m.tree_vertex).map(|o| &o.local).collect();
        if !m.local.is_whole_group() {
            let (ok, w) = crate::gog::malnormality(grp, &same);
            if !ok {
                return Decision::Fails(format!(
                    "{} in vertex {}: {}",
                    ext[i].id,
                    g.vertices[m.vertex].id,
                    w.unwrap_or_default()
                ));
            }
        }
        // outside G_v the member meets its conjugates inside edge groups
        for e in &g.edges {
            for ee in e.ends.iter().filter(|ee| ee.vertex == m.vertex) {
                if ee.image.group.is_finite() || ee.image.is_trivial() {
                    continue;
                }
                let meets = match &grp.kind {
                    GroupKind::Free => !pullback(m.local.core().unwrap(), ee.image.core().unwrap())
                        .expect("same ambient group")
                        .is_empty(),
                    _ => !m.local.is_trivial(),
                };
                if meets {
                    let why =
                        format!("{} meets the infinite edge group {} at {}", ext[i].id, e.id, g.vertices[m.vertex].id);
                    return if m.local.is_whole_group() { Decision::Fails(why) } else { Decision::Undecided(why) };
                }
            }
        }
    }
    Decision::Holds
}

/// A declared class of intersections `H ∩ Eᵍ` for the backward transfer.
#[derive(Clone, Debug)]
pub struct IntersectionClass {
    pub extension: String,
    pub coset: String,
    pub parabolic: bool,
    pub witness: Option<QuasiconvexWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferVerdict {
    pub identity_extension: bool,
    /// H quasiconvex relative to ℙ implies quasiconvex relative to 𝔼.
    pub forward: bool,
    /// Classes covered for the backward direction, with how.
    pub covered: Vec<(String, String, &'static str)>,
    pub backward: bool,
}

/// Records the transfer between ℙ and 𝔼 for a witnessed subgroup.
pub fn transfer_quasiconvexity(
    g: &GraphOfGroups,
    hw: &QuasiconvexWitness,
    base: &PeripheralStructure,
    ext: &PeripheralStructure,
    intersections: &[IntersectionClass],
) -> Result<TransferVerdict, PeripheralError> {
    let identity_extension = structures_agree(g, base, ext);
    let forward = !hw.vertices.is_empty();
    if identity_extension {
        return Ok(TransferVerdict { identity_extension, forward, covered: vec![], backward: forward });
    }
    let mut covered = Vec::new();
    for c in intersections {
        let how = if c.parabolic {
            "parabolic, point witness"
        } else if c.witness.as_ref().is_some_and(|w| !w.vertices.is_empty()) {
            "supplied witness"
        } else {
            return Err(PeripheralError::MissingIntersectionWitness {
                extension: c.extension.clone(),
                coset: c.coset.clone(),
            });
        };
        covered.push((c.extension.clone(), c.coset.clone(), how));
    }
    Ok(TransferVerdict { identity_extension, forward, covered, backward: true })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::gog::fixtures::{map, periph};
    use crate::gog::{EdgeSpec, GogSpec, VertexSpec};
    use crate::group::GroupDesc;

    #[allow(clippy::too_many_arguments)]
    fn edge(id: &str, from: &str, to: &str, fm: &str, tm: &str, fc: &str, tc: &str, tree: bool) -> EdgeSpec {
        EdgeSpec {
            id: id.into(),
            group: GroupDesc::free(&["x"]),
            from: from.into(),
            to: to.into(),
            from_map: map(&[("x", fm)]),
            to_map: map(&[("x", tm)]),
            from_container: fc.into(),
            to_container: tc.into(),
            stable_letter: (!tree).then(|| "t".to_string()),
        }
    }

    /// F(a,b) *_{⟨a⟩ = ⟨c²⟩} F(c,d) with ℙ₁ = {⟨a⟩, ⟨b⟩}, ℙ₂ = {⟨c⟩}.
    pub fn absorbed_amalgam() -> GraphOfGroups {
        GraphOfGroups::new(&GogSpec {
            vertices: vec![
                VertexSpec {
                    id: "A".into(),
                    group: GroupDesc::free(&["a", "b"]),
                    peripherals: vec![periph("P1", &["a"]), periph("R", &["b"])],
                },
                VertexSpec {
                    id: "B".into(),
                    group: GroupDesc::free(&["c", "d"]),
                    peripherals: vec![periph("P2", &["c"])],
                },
            ],
            edges: vec![edge("e", "A", "B", "a", "c^2", "P1", "P2", true)],
            spanning_tree: vec!["e".into()],
        })
        .unwrap()
    }

    /// F(a,b) *_{⟨ab⟩ᵗ = ⟨(ab)²⟩}.
    pub fn self_hnn() -> GraphOfGroups {
        GraphOfGroups::new(&GogSpec {
            vertices: vec![VertexSpec {
                id: "v".into(),
                group: GroupDesc::free(&["a", "b"]),
                peripherals: vec![periph("P", &["ab"])],
            }],
            edges: vec![edge("e", "v", "v", "ab", "(ab)^2", "P", "P", false)],
            spanning_tree: vec![],
        })
        .unwrap()
    }

    /// F(a,b) *_{⟨a⟩ = ⟨c⟩} F(c,d), maximal at both ends.
    pub fn both_maximal() -> GraphOfGroups {
        GraphOfGroups::new(&GogSpec {
            vertices: vec![
                VertexSpec {
                    id: "A".into(),
                    group: GroupDesc::free(&["a", "b"]),
                    peripherals: vec![periph("P1", &["a"])],
                },
                VertexSpec {
                    id: "B".into(),
                    group: GroupDesc::free(&["c", "d"]),
                    peripherals: vec![periph("P2", &["c"])],
                },
            ],
            edges: vec![edge("e", "A", "B", "a", "c", "P1", "P2", true)],
            spanning_tree: vec!["e".into()],
        })
        .unwrap()
    }
}
