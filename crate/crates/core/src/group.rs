//! Canonical arithmetic for free groups, finitely generated abelian groups and
//! finite groups given by multiplication tables.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

/// A generator symbol index together with an exponent sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u32,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: u32, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn pos(gen: u32) -> Self {
        Letter { gen, inv: false }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    /// Position in the order a < a⁻¹ < b < b⁻¹ < ...
    pub fn key(self) -> usize {
        2 * self.gen as usize + self.inv as usize
    }

    pub fn from_key(key: usize) -> Self {
        Letter { gen: (key / 2) as u32, inv: key % 2 == 1 }
    }
}

/// A finite sequence of letters. Ordered ShortLex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    /// Free reduction: cancels adjacent `x x⁻¹` pairs.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    /// Renders the word with the given symbol table, e.g. `a b^-1`.
    pub fn display(&self, symbols: &[String]) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let run = (j - i) as i64;
            let name = symbols.get(l.gen as usize).cloned().unwrap_or_else(|| format!("?{}", l.gen));
            let exp = if l.inv { -run } else { run };
            if exp == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{name}^{exp}"));
            }
            i = j;
        }
        parts.join(" ")
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("malformed word `{0}`")]
    MalformedWord(String),
    #[error("invalid group description: {0}")]
    InvalidGroup(String),
}

/// Multiplication table of a finite group plus the derived data needed for
/// canonical words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    pub table: Vec<Vec<u32>>,
    pub identity: u32,
    pub inverse: Vec<u32>,
    pub generators: Vec<u32>,
    words: Vec<Word>,
}

impl FiniteTable {
    pub fn new(table: Vec<Vec<u32>>, generators: Option<Vec<u32>>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::InvalidGroup("empty multiplication table".into()));
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&x| x as usize >= n) {
                return Err(GroupError::InvalidGroup("table is not square over its elements".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] as usize == x && table[x][e] as usize == x))
            .ok_or_else(|| GroupError::InvalidGroup("no identity element".into()))? as u32;
        let mut inverse = vec![0u32; n];
        for x in 0..n {
            let y = (0..n)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or_else(|| GroupError::InvalidGroup(format!("element {x} has no inverse")))?;
            inverse[x] = y as u32;
        }
        for x in 0..n {
            for y in 0..n {
                let xy = table[x][y] as usize;
                for z in 0..n {
                    if table[xy][z] != table[x][table[y][z] as usize] {
                        return Err(GroupError::InvalidGroup("table is not associative".into()));
                    }
                }
            }
        }
        let generators = match generators {
            Some(g) => {
                if g.iter().any(|&x| x as usize >= n) {
                    return Err(GroupError::InvalidGroup("generator out of range".into()));
                }
                g
            }
            None => (0..n as u32).filter(|&x| x != identity).collect(),
        };
        let mut ft = FiniteTable { table, identity, inverse, generators, words: Vec::new() };
        ft.words = ft.bfs_words()?;
        Ok(ft)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.table[x as usize][y as usize]
    }

    pub fn letter_value(&self, l: Letter) -> u32 {
        if l.inv {
            self.inverse[l.gen as usize]
        } else {
            l.gen
        }
    }

    fn cayley_letters(&self) -> Vec<Letter> {
        let mut v = Vec::new();
        for &g in &self.generators {
            v.push(Letter::new(g, false));
            v.push(Letter::new(g, true));
        }
        v.sort();
        v
    }

    fn bfs_words(&self) -> Result<Vec<Word>, GroupError> {
        let n = self.order();
        let mut words: Vec<Option<Word>> = vec![None; n];
        words[self.identity as usize] = Some(Word::empty());
        let mut queue = VecDeque::from([self.identity]);
        let letters = self.cayley_letters();
        while let Some(x) = queue.pop_front() {
            let wx = words[x as usize].clone().unwrap();
            for &l in &letters {
                let y = self.mul(x, self.letter_value(l));
                if words[y as usize].is_none() {
                    let mut w = wx.clone();
                    w.0.push(l);
                    words[y as usize] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        words
            .into_iter()
            .map(|w| w.ok_or_else(|| GroupError::InvalidGroup("generators do not generate the group".into())))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Free,
    /// One entry per coordinate: 0 for a ℤ factor, d ≥ 2 for ℤ/d.
    Abelian {
        orders: Vec<u64>,
    },
    Finite(FiniteTable),
}

/// A vertex or edge group: an alphabet and one of the supported classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDesc {
    pub symbols: Vec<String>,
    pub kind: GroupKind,
}

/// Canonical payload of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Free(Word),
    Abelian(Vec<i64>),
    Finite(u32),
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Free(w) => write!(f, "{:?}", w.0),
            GroupElement::Abelian(v) => write!(f, "{v:?}"),
            GroupElement::Finite(i) => write!(f, "#{i}"),
        }
    }
}

impl GroupDesc {
    pub fn free(symbols: &[&str]) -> Self {
        GroupDesc { symbols: symbols.iter().map(|s| s.to_string()).collect(), kind: GroupKind::Free }
    }

    /// ℤ^rank ⊕ ⊕ ℤ/dᵢ with one symbol per coordinate, free coordinates first.
    pub fn abelian(symbols: &[&str], rank: usize, torsion: &[u64]) -> Result<Self, GroupError> {
        if symbols.len() != rank + torsion.len() {
            return Err(GroupError::InvalidGroup("one symbol per coordinate expected".into()));
        }
        if torsion.iter().any(|&d| d < 2) {
            return Err(GroupError::InvalidGroup("torsion orders must be at least 2".into()));
        }
        let mut orders = vec![0u64; rank];
        orders.extend_from_slice(torsion);
        Ok(GroupDesc { symbols: symbols.iter().map(|s| s.to_string()).collect(), kind: GroupKind::Abelian { orders } })
    }

    pub fn finite(names: &[&str], table: Vec<Vec<u32>>, generators: Option<Vec<u32>>) -> Result<Self, GroupError> {
        if names.len() != table.len() {
            return Err(GroupError::InvalidGroup("one name per table row expected".into()));
        }
        Ok(GroupDesc {
            symbols: names.iter().map(|s| s.to_string()).collect(),
            kind: GroupKind::Finite(FiniteTable::new(table, generators)?),
        })
    }

    pub fn trivial() -> Self {
        GroupDesc { symbols: Vec::new(), kind: GroupKind::Free }
    }

    pub fn is_free(&self) -> bool {
        matches!(self.kind, GroupKind::Free)
    }

    pub fn rank(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbol_index(&self, s: &str) -> Option<u32> {
        self.symbols.iter().position(|x| x == s).map(|i| i as u32)
    }

    /// Parses words such as `a b^-1`, `ab^-1`, `(ab)^2`, `1`.
    pub fn parse_word(&self, text: &str) -> Result<Word, GroupError> {
        parse_word(&self.symbols, text)
    }

    pub fn display_word(&self, w: &Word) -> String {
        w.display(&self.symbols)
    }

    pub fn display(&self, x: &GroupElement) -> String {
        self.display_word(&self.word_of(x))
    }

    fn check_letters(&self, w: &Word) -> Result<(), GroupError> {
        for l in &w.0 {
            if l.gen as usize >= self.symbols.len() {
                return Err(GroupError::UnknownSymbol(format!("#{}", l.gen)));
            }
        }
        Ok(())
    }

    fn check(&self, x: &GroupElement) -> Result<(), GroupError> {
        let ok = match (&self.kind, x) {
            (GroupKind::Free, GroupElement::Free(w)) => w.0.iter().all(|l| (l.gen as usize) < self.rank()),
            (GroupKind::Abelian { orders }, GroupElement::Abelian(v)) => v.len() == orders.len(),
            (GroupKind::Finite(t), GroupElement::Finite(i)) => (*i as usize) < t.order(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(GroupError::GroupMismatch)
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &self.kind {
            GroupKind::Free => GroupElement::Free(Word::empty()),
            GroupKind::Abelian { orders } => GroupElement::Abelian(vec![0; orders.len()]),
            GroupKind::Finite(t) => GroupElement::Finite(t.identity),
        }
    }

    pub fn is_identity(&self, x: &GroupElement) -> bool {
        *x == self.identity()
    }

    pub fn reduce(&self, raw: &Word) -> Result<GroupElement, GroupError> {
        self.check_letters(raw)?;
        Ok(self.reduce_unchecked(raw))
    }

    fn reduce_unchecked(&self, raw: &Word) -> GroupElement {
        match &self.kind {
            GroupKind::Free => GroupElement::Free(raw.free_reduce()),
            GroupKind::Abelian { orders } => {
                let mut v = vec![0i64; orders.len()];
                for l in &raw.0 {
                    v[l.gen as usize] += if l.inv { -1 } else { 1 };
                }
                GroupElement::Abelian(normalize_vec(orders, v))
            }
            GroupKind::Finite(t) => {
                let mut x = t.identity;
                for &l in &raw.0 {
                    x = t.mul(x, t.letter_value(l));
                }
                GroupElement::Finite(x)
            }
        }
    }

    pub fn letter_element(&self, l: Letter) -> GroupElement {
        self.reduce_unchecked(&Word::letter(l))
    }

    pub fn multiply(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul(x, y))
    }

    /// Product without membership checks; both arguments must belong to `self`.
    pub fn mul(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        match (&self.kind, x, y) {
            (GroupKind::Free, GroupElement::Free(a), GroupElement::Free(b)) => GroupElement::Free(mul_free(a, b)),
            (GroupKind::Abelian { orders }, GroupElement::Abelian(a), GroupElement::Abelian(b)) => {
                GroupElement::Abelian(normalize_vec(orders, a.iter().zip(b).map(|(p, q)| p + q).collect()))
            }
            (GroupKind::Finite(t), GroupElement::Finite(a), GroupElement::Finite(b)) => {
                GroupElement::Finite(t.mul(*a, *b))
            }
            _ => panic!("group element of the wrong kind"),
        }
    }

    pub fn invert(&self, x: &GroupElement) -> GroupElement {
        match (&self.kind, x) {
            (GroupKind::Free, GroupElement::Free(w)) => GroupElement::Free(w.inverse()),
            (GroupKind::Abelian { orders }, GroupElement::Abelian(v)) => {
                GroupElement::Abelian(normalize_vec(orders, v.iter().map(|a| -a).collect()))
            }
            (GroupKind::Finite(t), GroupElement::Finite(i)) => GroupElement::Finite(t.inverse[*i as usize]),
            _ => panic!("group element of the wrong kind"),
        }
    }

    pub fn pow(&self, x: &GroupElement, k: i64) -> GroupElement {
        let base = if k < 0 { self.invert(x) } else { x.clone() };
        let mut acc = self.identity();
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        acc
    }

    /// The ShortLex-least word over the Cayley generators representing `x`.
    pub fn word_of(&self, x: &GroupElement) -> Word {
        match (&self.kind, x) {
            (GroupKind::Free, GroupElement::Free(w)) => w.clone(),
            (GroupKind::Abelian { orders }, GroupElement::Abelian(v)) => {
                let mut letters = Vec::new();
                for (i, (&a, &d)) in v.iter().zip(orders).enumerate() {
                    let e = balanced(a, d);
                    for _ in 0..e.unsigned_abs() {
                        letters.push(Letter::new(i as u32, e < 0));
                    }
                }
                Word(letters)
            }
            (GroupKind::Finite(t), GroupElement::Finite(i)) => t.words[*i as usize].clone(),
            _ => panic!("group element of the wrong kind"),
        }
    }

    /// Word length with respect to the Cayley generators.
    pub fn length(&self, x: &GroupElement) -> usize {
        match (&self.kind, x) {
            (GroupKind::Free, GroupElement::Free(w)) => w.len(),
            (GroupKind::Abelian { orders }, GroupElement::Abelian(v)) => {
                v.iter().zip(orders).map(|(&a, &d)| balanced(a, d).unsigned_abs() as usize).sum()
            }
            (GroupKind::Finite(t), GroupElement::Finite(i)) => t.words[*i as usize].len(),
            _ => panic!("group element of the wrong kind"),
        }
    }

    pub fn shortlex_cmp(&self, x: &GroupElement, y: &GroupElement) -> Ordering {
        self.word_of(x).cmp(&self.word_of(y))
    }

    /// Generators used for the Cayley graph, as positive letters.
    pub fn generator_letters(&self) -> Vec<Letter> {
        match &self.kind {
            GroupKind::Free | GroupKind::Abelian { .. } => (0..self.rank() as u32).map(Letter::pos).collect(),
            GroupKind::Finite(t) => t.generators.iter().map(|&g| Letter::pos(g)).collect(),
        }
    }

    /// Generator letters and their inverses in ShortLex letter order.
    pub fn cayley_letters(&self) -> Vec<Letter> {
        let mut v: Vec<Letter> = self.generator_letters().into_iter().flat_map(|l| [l, l.inverse()]).collect();
        v.sort();
        v
    }

    pub fn is_finite(&self) -> bool {
        match &self.kind {
            GroupKind::Free => self.rank() == 0,
            GroupKind::Abelian { orders } => orders.iter().all(|&d| d > 0),
            GroupKind::Finite(_) => true,
        }
    }

    pub fn is_trivial(&self) -> bool {
        match &self.kind {
            GroupKind::Free => self.rank() == 0,
            GroupKind::Abelian { orders } => orders.is_empty(),
            GroupKind::Finite(t) => t.order() == 1,
        }
    }

    /// All elements, for finite groups only.
    pub fn elements(&self) -> Option<Vec<GroupElement>> {
        match &self.kind {
            GroupKind::Finite(t) => Some((0..t.order() as u32).map(GroupElement::Finite).collect()),
            GroupKind::Abelian { orders } if orders.iter().all(|&d| d > 0) => {
                let mut out = vec![vec![]];
                for &d in orders {
                    let mut next = Vec::new();
                    for v in &out {
                        for k in 0..d as i64 {
                            let mut w: Vec<i64> = v.clone();
                            w.push(k);
                            next.push(w);
                        }
                    }
                    out = next;
                }
                Some(out.into_iter().map(GroupElement::Abelian).collect())
            }
            GroupKind::Free if self.rank() == 0 => Some(vec![self.identity()]),
            _ => None,
        }
    }

    /// Elements of length at most `radius`, sorted ShortLex by canonical word.
    pub fn ball(&self, radius: usize) -> Vec<GroupElement> {
        let letters = self.cayley_letters();
        let mut seen = std::collections::HashSet::new();
        let id = self.identity();
        seen.insert(id.clone());
        let mut layer = vec![id.clone()];
        let mut out = vec![id];
        for _ in 0..radius {
            let mut next = Vec::new();
            for x in &layer {
                for &l in &letters {
                    let y = self.mul(x, &self.letter_element(l));
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        let mut keyed: Vec<(Word, GroupElement)> = out.into_iter().map(|x| (self.word_of(&x), x)).collect();
        keyed.sort();
        keyed.into_iter().map(|(_, x)| x).collect()
    }
}

fn mul_free(a: &Word, b: &Word) -> Word {
    let mut k = 0;
    while k < a.len() && k < b.len() && a.0[a.len() - 1 - k] == b.0[k].inverse() {
        k += 1;
    }
    let mut v = a.0[..a.len() - k].to_vec();
    v.extend_from_slice(&b.0[k..]);
    Word(v)
}

fn normalize_vec(orders: &[u64], mut v: Vec<i64>) -> Vec<i64> {
    for (a, &d) in v.iter_mut().zip(orders) {
        if d > 0 {
            *a = a.rem_euclid(d as i64);
        }
    }
    v
}

/// Representative of `a` mod `d` of least absolute value, positive on ties.
fn balanced(a: i64, d: u64) -> i64 {
    if d == 0 {
        return a;
    }
    let d = d as i64;
    let r = a.rem_euclid(d);
    if 2 * r > d {
        r - d
    } else {
        r
    }
}

/// Word parser shared by every group kind.
pub fn parse_word(symbols: &[String], text: &str) -> Result<Word, GroupError> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let w = parse_seq(symbols, &chars, &mut pos, text)?;
    if pos != chars.len() {
        return Err(GroupError::MalformedWord(text.to_string()));
    }
    Ok(w)
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && (chars[*pos].is_whitespace() || chars[*pos] == '*' || chars[*pos] == '·') {
        *pos += 1;
    }
}

fn parse_seq(symbols: &[String], chars: &[char], pos: &mut usize, text: &str) -> Result<Word, GroupError> {
    let mut out = Vec::new();
    loop {
        skip_ws(chars, pos);
        if *pos >= chars.len() || chars[*pos] == ')' {
            return Ok(Word(out));
        }
        let item = if chars[*pos] == '(' {
            *pos += 1;
            let inner = parse_seq(symbols, chars, pos, text)?;
            if *pos >= chars.len() || chars[*pos] != ')' {
                return Err(GroupError::MalformedWord(text.to_string()));
            }
            *pos += 1;
            inner
        } else {
            parse_symbol(symbols, chars, pos, text)?
        };
        let exp = parse_exponent(chars, pos, text)?;
        out.extend(item.pow(exp).0);
    }
}

fn parse_symbol(symbols: &[String], chars: &[char], pos: &mut usize, text: &str) -> Result<Word, GroupError> {
    let rest: String = chars[*pos..].iter().collect();
    let best = symbols
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty() && rest.starts_with(s.as_str()))
        .max_by_key(|(_, s)| s.chars().count());
    if let Some((i, s)) = best {
        *pos += s.chars().count();
        return Ok(Word::letter(Letter::pos(i as u32)));
    }
    if chars[*pos] == '1' {
        *pos += 1;
        return Ok(Word::empty());
    }
    let token: String = chars[*pos..].iter().take_while(|c| c.is_alphanumeric() || **c == '_').collect();
    if token.is_empty() {
        Err(GroupError::MalformedWord(text.to_string()))
    } else {
        Err(GroupError::UnknownSymbol(token))
    }
}

fn parse_exponent(chars: &[char], pos: &mut usize, text: &str) -> Result<i64, GroupError> {
    if *pos < chars.len() && chars[*pos] == '⁻' {
        *pos += 1;
        if *pos < chars.len() && chars[*pos] == '¹' {
            *pos += 1;
            return Ok(-1);
        }
        return Err(GroupError::MalformedWord(text.to_string()));
    }
    if *pos >= chars.len() || chars[*pos] != '^' {
        return Ok(1);
    }
    *pos += 1;
    let start = *pos;
    if *pos < chars.len() && (chars[*pos] == '-' || chars[*pos] == '+') {
        *pos += 1;
    }
    while *pos < chars.len() && chars[*pos].is_ascii_digit() {
        *pos += 1;
    }
    let s: String = chars[start..*pos].iter().collect();
    s.parse::<i64>().map_err(|_| GroupError::MalformedWord(text.to_string()))
}
