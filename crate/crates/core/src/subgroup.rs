//! Subgroups of vertex groups with membership, coset representatives and
//! preimages under edge injections, uniformly over the supported classes.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::abelian::{rational_rank, Lattice};
use crate::group::{GroupDesc, GroupElement, GroupKind, Letter, Word};
use crate::stallings::{CoreGraph, StallingsError};

#[derive(Clone, Debug)]
enum Data {
    Free(CoreGraph),
    Abelian(Lattice),
    Finite { members: BTreeSet<u32>, pre: HashMap<u32, Word> },
}

/// A finitely generated subgroup of `group`.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: GroupDesc,
    pub gens: Vec<GroupElement>,
    data: Data,
    source: Option<Vec<Letter>>,
}

/// Cap on coset enumeration when computing indices.
const INDEX_CAP: usize = 512;

impl Subgroup {
    pub fn new(group: &GroupDesc, gens: &[GroupElement]) -> Subgroup {
        Self::build(group, gens, None).expect("untagged construction cannot fail")
    }

    /// The image of a homomorphism, with preimages expressed over
    /// `source_letters` (one per entry of `gens`). Fails if the tagged fold
    /// detects a kernel.
    pub fn image(
        group: &GroupDesc,
        gens: &[GroupElement],
        source: &GroupDesc,
        source_letters: &[Letter],
    ) -> Result<Subgroup, StallingsError> {
        Self::build(group, gens, Some((source, source_letters)))
    }

    fn build(
        group: &GroupDesc,
        gens: &[GroupElement],
        source: Option<(&GroupDesc, &[Letter])>,
    ) -> Result<Subgroup, StallingsError> {
        let data = match &group.kind {
            GroupKind::Free => {
                let words: Vec<Word> = gens.iter().map(|g| group.word_of(g)).collect();
                match source {
                    Some((src, letters)) => {
                        let tags: Vec<Word> = letters.iter().map(|&l| Word::letter(l)).collect();
                        let trivial = |t: &Word| src.reduce(t).map(|x| src.is_identity(&x)).unwrap_or(false);
                        Data::Free(CoreGraph::tagged(group.rank(), &words, &tags, &trivial)?)
                    }
                    None => Data::Free(CoreGraph::from_words(group.rank(), &words)),
                }
            }
            GroupKind::Abelian { orders } => {
                let basis: Vec<Vec<i64>> = gens
                    .iter()
                    .map(|g| match g {
                        GroupElement::Abelian(v) => v.clone(),
                        _ => panic!("group element of the wrong kind"),
                    })
                    .collect();
                Data::Abelian(Lattice::new(orders, &basis))
            }
            GroupKind::Finite(_) => {
                let letters: Vec<Letter> = match source {
                    Some((_, l)) => l.to_vec(),
                    None => (0..gens.len() as u32).map(Letter::pos).collect(),
                };
                let id = group.identity();
                let GroupElement::Finite(id_i) = id else { unreachable!() };
                let mut pre: HashMap<u32, Word> = HashMap::from([(id_i, Word::empty())]);
                let mut q = VecDeque::from([id_i]);
                while let Some(x) = q.pop_front() {
                    let wx = pre[&x].clone();
                    for (g, &l) in gens.iter().zip(&letters) {
                        for (y, l) in [(g.clone(), l), (group.invert(g), l.inverse())] {
                            let GroupElement::Finite(z) = group.mul(&GroupElement::Finite(x), &y) else {
                                unreachable!()
                            };
                            if let std::collections::hash_map::Entry::Vacant(e) = pre.entry(z) {
                                let mut w = wx.clone();
                                w.0.push(l);
                                e.insert(w.free_reduce());
                                q.push_back(z);
                            }
                        }
                    }
                }
                Data::Finite { members: pre.keys().copied().collect(), pre }
            }
        };
        Ok(Subgroup { group: group.clone(), gens: gens.to_vec(), data, source: source.map(|(_, l)| l.to_vec()) })
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        match (&self.data, x) {
            (Data::Free(c), GroupElement::Free(w)) => c.contains_word(w),
            (Data::Abelian(l), GroupElement::Abelian(v)) => l.contains(v),
            (Data::Finite { members, .. }, GroupElement::Finite(i)) => members.contains(i),
            _ => false,
        }
    }

    pub fn core(&self) -> Option<&CoreGraph> {
        match &self.data {
            Data::Free(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.iter().all(|g| self.group.is_identity(g))
    }

    /// Whether every element of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.gens.iter().all(|g| other.contains(g))
    }

    pub fn same_as(&self, other: &Subgroup) -> bool {
        self.is_subgroup_of(other) && other.is_subgroup_of(self)
    }

    pub fn is_whole_group(&self) -> bool {
        self.group.generator_letters().iter().all(|&l| self.contains(&self.group.letter_element(l)))
    }

    /// Writes `g = rep · a` with `a ∈ self` and `rep` ShortLex-least in `g·self`.
    pub fn left_rep(&self, g: &GroupElement) -> (GroupElement, GroupElement) {
        let grp = &self.group;
        let rep = match (&self.data, g) {
            (Data::Free(c), GroupElement::Free(w)) => GroupElement::Free(c.left_coset_rep(w).0),
            (Data::Abelian(l), GroupElement::Abelian(v)) => {
                let key = l.coset_key(v);
                let bound = grp.length(&GroupElement::Abelian(key.clone()));
                grp.ball(bound)
                    .into_iter()
                    .find(|h| match h {
                        GroupElement::Abelian(hv) => l.coset_key(hv) == key,
                        _ => false,
                    })
                    .expect("the canonical residue lies in the ball")
            }
            (Data::Finite { members, .. }, _) => members
                .iter()
                .map(|&m| grp.mul(g, &GroupElement::Finite(m)))
                .min_by(|x, y| grp.shortlex_cmp(x, y))
                .unwrap(),
            _ => panic!("group element of the wrong kind"),
        };
        let a = grp.mul(&grp.invert(&rep), g);
        (rep, a)
    }

    /// Canonical key of the left coset `g·self`.
    pub fn coset_key(&self, g: &GroupElement) -> GroupElement {
        self.left_rep(g).0
    }

    /// Preimage word over the source letters of an element of an image subgroup.
    pub fn preimage(&self, a: &GroupElement) -> Option<Word> {
        let letters = self.source.as_ref()?;
        if !self.contains(a) {
            return None;
        }
        match (&self.data, a) {
            (Data::Free(c), GroupElement::Free(w)) => c.preimage(w),
            (Data::Abelian(l), GroupElement::Abelian(v)) => {
                let (_, coef) = l.reduce(v);
                let mut out = Vec::new();
                for (k, &letter) in coef.iter().zip(letters) {
                    let l = if *k < 0 { letter.inverse() } else { letter };
                    for _ in 0..k.unsigned_abs() {
                        out.push(l);
                    }
                }
                Some(Word(out))
            }
            (Data::Finite { pre, .. }, GroupElement::Finite(i)) => pre.get(i).cloned(),
            _ => None,
        }
    }

    /// Index of `self` in `sup` when finite and at most a fixed cap.
    pub fn index_in(&self, sup: &Subgroup) -> Option<usize> {
        let grp = &self.group;
        if let (Data::Abelian(l), Data::Abelian(s)) = (&self.data, &sup.data) {
            if l.free_rank() < s.free_rank() {
                return None;
            }
            if let (Some(a), Some(b)) = (l.index(), s.index()) {
                return usize::try_from(a / b).ok().filter(|&n| n <= INDEX_CAP);
            }
        }
        let mut seen: BTreeSet<GroupElement> = BTreeSet::new();
        let start = self.coset_key(&grp.identity());
        seen.insert(start.clone());
        let mut q = VecDeque::from([start]);
        while let Some(r) = q.pop_front() {
            for s in &sup.gens {
                for s in [s.clone(), grp.invert(s)] {
                    let k = self.coset_key(&grp.mul(&s, &r));
                    if seen.insert(k.clone()) {
                        if seen.len() > INDEX_CAP {
                            return None;
                        }
                        q.push_back(k);
                    }
                }
            }
        }
        Some(seen.len())
    }
}

/// A homomorphism given by images of the source generators.
#[derive(Clone, Debug)]
pub struct Hom {
    pub source: GroupDesc,
    pub target: GroupDesc,
    /// Aligned with `source.generator_letters()`.
    pub images: Vec<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomDefect {
    /// The relations of the source are not respected.
    NotHomomorphism,
    /// A nontrivial element maps to the identity.
    NotInjective,
}

/// Cap on enumerated torsion when deciding injectivity.
const TORSION_CAP: u128 = 1 << 20;

impl Hom {
    fn image_of_letter(&self, l: Letter) -> GroupElement {
        let pos =
            self.source.generator_letters().iter().position(|g| g.gen == l.gen).expect("letter is a source generator");
        let x = &self.images[pos];
        if l.inv {
            self.target.invert(x)
        } else {
            x.clone()
        }
    }

    /// Image of a word over the source generators. For finite sources, any
    /// element name may appear and is expanded through its canonical word.
    pub fn apply_word(&self, w: &Word) -> GroupElement {
        let gens: BTreeSet<u32> = self.source.generator_letters().iter().map(|l| l.gen).collect();
        let mut acc = self.target.identity();
        for &l in &w.0 {
            let x = if gens.contains(&l.gen) {
                self.image_of_letter(l)
            } else {
                let e = self.source.letter_element(l);
                self.apply_word(&self.source.word_of(&e))
            };
            acc = self.target.mul(&acc, &x);
        }
        acc
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        self.apply_word(&self.source.word_of(x))
    }

    pub fn check_homomorphism(&self) -> Result<(), HomDefect> {
        let t = &self.target;
        match &self.source.kind {
            GroupKind::Free => Ok(()),
            GroupKind::Abelian { orders } => {
                for (i, (x, &order)) in self.images.iter().zip(orders).enumerate() {
                    for y in &self.images[..i] {
                        if t.mul(x, y) != t.mul(y, x) {
                            return Err(HomDefect::NotHomomorphism);
                        }
                    }
                    if order > 0 && !t.is_identity(&t.pow(x, order as i64)) {
                        return Err(HomDefect::NotHomomorphism);
                    }
                }
                Ok(())
            }
            GroupKind::Finite(_) => {
                let elems = self.source.elements().unwrap();
                let img: Vec<GroupElement> = elems.iter().map(|x| self.apply(x)).collect();
                for (i, x) in elems.iter().enumerate() {
                    for (j, y) in elems.iter().enumerate() {
                        let GroupElement::Finite(k) = self.source.mul(x, y) else { unreachable!() };
                        if img[k as usize] != t.mul(&img[i], &img[j]) {
                            return Err(HomDefect::NotHomomorphism);
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Decides injectivity; assumes `check_homomorphism` passed.
    pub fn check_injective(&self) -> Result<(), HomDefect> {
        let (s, t) = (&self.source, &self.target);
        if s.is_trivial() {
            return Ok(());
        }
        let fail = Err(HomDefect::NotInjective);
        match (&s.kind, &t.kind) {
            (GroupKind::Free, GroupKind::Free) => {
                let letters = s.generator_letters();
                Subgroup::image(t, &self.images, s, &letters).map(|_| ()).map_err(|_| HomDefect::NotInjective)
            }
            (GroupKind::Free, _) => {
                if s.rank() == 1 && !t.is_finite() && has_infinite_order(t, &self.images[0]) {
                    Ok(())
                } else {
                    fail
                }
            }
            (GroupKind::Abelian { orders }, _) => {
                let free: Vec<usize> = (0..orders.len()).filter(|&i| orders[i] == 0).collect();
                let tors: Vec<usize> = (0..orders.len()).filter(|&i| orders[i] > 0).collect();
                match &t.kind {
                    GroupKind::Free => {
                        if !tors.is_empty() || free.len() > 1 {
                            return fail;
                        }
                        if t.is_identity(&self.images[free[0]]) {
                            return fail;
                        }
                    }
                    GroupKind::Abelian { orders: tord } => {
                        let proj: Vec<Vec<i64>> = free
                            .iter()
                            .map(|&i| match &self.images[i] {
                                GroupElement::Abelian(v) => {
                                    v.iter().zip(tord).filter(|(_, &d)| d == 0).map(|(x, _)| *x).collect()
                                }
                                _ => unreachable!(),
                            })
                            .collect();
                        if !free.is_empty() && rational_rank(&proj) < free.len() {
                            return fail;
                        }
                    }
                    GroupKind::Finite(_) => {
                        if !free.is_empty() {
                            return fail;
                        }
                    }
                }
                let size: u128 = tors.iter().map(|&i| orders[i] as u128).product();
                if size > TORSION_CAP {
                    return fail;
                }
                let mut counter = vec![0i64; tors.len()];
                loop {
                    let mut v = vec![0i64; orders.len()];
                    for (k, &i) in tors.iter().enumerate() {
                        v[i] = counter[k];
                    }
                    if counter.iter().any(|&c| c != 0) && t.is_identity(&self.apply(&GroupElement::Abelian(v))) {
                        return fail;
                    }
                    let mut k = 0;
                    loop {
                        if k == tors.len() {
                            return Ok(());
                        }
                        counter[k] += 1;
                        if counter[k] == orders[tors[k]] as i64 {
                            counter[k] = 0;
                            k += 1;
                        } else {
                            break;
                        }
                    }
                }
            }
            (GroupKind::Finite(_), _) => {
                for x in s.elements().unwrap() {
                    if !s.is_identity(&x) && t.is_identity(&self.apply(&x)) {
                        return fail;
                    }
                }
                Ok(())
            }
        }
    }
}

fn has_infinite_order(t: &GroupDesc, x: &GroupElement) -> bool {
    match (&t.kind, x) {
        (GroupKind::Free, _) => !t.is_identity(x),
        (GroupKind::Abelian { orders }, GroupElement::Abelian(v)) => {
            v.iter().zip(orders).any(|(&a, &d)| d == 0 && a != 0)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(g: &GroupDesc, s: &str) -> GroupElement {
        g.reduce(&g.parse_word(s).unwrap()).unwrap()
    }

    #[test]
    fn free_coset_reps_and_preimages() {
        let f = GroupDesc::free(&["a", "b"]);
        let c = GroupDesc::free(&["c"]);
        let img = Subgroup::image(&f, &[el(&f, "(ab)^3")], &c, &c.generator_letters()).unwrap();
        assert_eq!(img.preimage(&el(&f, "(ab)^-6")), Some(c.parse_word("c^-2").unwrap()));
        let (rep, a) = img.left_rep(&el(&f, "(ab)^2"));
        assert_eq!(f.display(&rep), "b^-1 a^-1");
        assert!(img.contains(&a));
    }

    #[test]
    fn abelian_coset_reps() {
        let z2 = GroupDesc::abelian(&["x", "y"], 2, &[]).unwrap();
        let s = Subgroup::new(&z2, &[el(&z2, "x")]);
        let (rep, _) = s.left_rep(&el(&z2, "x^5 y^-2"));
        assert_eq!(z2.display(&rep), "y^-2");
        let s2 = Subgroup::new(&z2, &[el(&z2, "x^2"), el(&z2, "y^3")]);
        assert_eq!(s2.index_in(&Subgroup::new(&z2, &[el(&z2, "x"), el(&z2, "y")])), Some(6));
    }

    #[test]
    fn free_index() {
        let f = GroupDesc::free(&["a", "b"]);
        let p = Subgroup::new(&f, &[el(&f, "ab")]);
        let a = Subgroup::new(&f, &[el(&f, "(ab)^3")]);
        assert_eq!(a.index_in(&p), Some(3));
        assert_eq!(Subgroup::new(&f, &[el(&f, "a")]).index_in(&Subgroup::new(&f, &[el(&f, "a"), el(&f, "b")])), None);
    }

    #[test]
    fn injectivity_rules() {
        let f = GroupDesc::free(&["a", "b"]);
        let c = GroupDesc::free(&["c"]);
        let z2 = GroupDesc::abelian(&["x", "y"], 2, &[]).unwrap();
        let ok = Hom { source: c.clone(), target: f.clone(), images: vec![el(&f, "(ab)^2")] };
        assert_eq!(ok.check_injective(), Ok(()));
        let bad = Hom { source: c.clone(), target: f.clone(), images: vec![f.identity()] };
        assert_eq!(bad.check_injective(), Err(HomDefect::NotInjective));
        let f2 = GroupDesc::free(&["c", "d"]);
        let bad2 = Hom { source: f2, target: f.clone(), images: vec![el(&f, "a^2"), el(&f, "a^3")] };
        assert_eq!(bad2.check_injective(), Err(HomDefect::NotInjective));
        let zz = Hom { source: z2.clone(), target: z2.clone(), images: vec![el(&z2, "x y"), el(&z2, "x y^-1")] };
        assert_eq!(zz.check_homomorphism(), Ok(()));
        assert_eq!(zz.check_injective(), Ok(()));
        let zf = Hom { source: z2.clone(), target: f.clone(), images: vec![el(&f, "a"), el(&f, "b")] };
        assert_eq!(zf.check_homomorphism(), Err(HomDefect::NotHomomorphism));
        let z = GroupDesc::abelian(&["u"], 1, &[]).unwrap();
        let zin =
            Hom { source: z, target: z2, images: vec![el(&GroupDesc::abelian(&["x", "y"], 2, &[]).unwrap(), "x^2")] };
        assert_eq!(zin.check_injective(), Ok(()));
    }

    #[test]
    fn torsion_injectivity() {
        let z4 = GroupDesc::abelian(&["u"], 0, &[4]).unwrap();
        let z2 = GroupDesc::abelian(&["v"], 0, &[2]).unwrap();
        let h = Hom { source: z2.clone(), target: z4.clone(), images: vec![el(&z4, "u^2")] };
        assert_eq!(h.check_homomorphism(), Ok(()));
        assert_eq!(h.check_injective(), Ok(()));
        let k = Hom { source: z4, target: z2.clone(), images: vec![el(&z2, "v")] };
        assert_eq!(k.check_homomorphism(), Ok(()));
        assert_eq!(k.check_injective(), Err(HomDefect::NotInjective));
    }
}
