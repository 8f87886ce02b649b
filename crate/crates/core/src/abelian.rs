//! Subgroups of ℤʳ ⊕ ⊕ℤ/dᵢ via Hermite normal form over ℤ.

/// Row-echelon basis of a subgroup, with torsion relations folded in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    orders: Vec<u64>,
    n_basis: usize,
    /// (pivot column, row, coefficients over basis ++ torsion relations)
    rows: Vec<(usize, Vec<i128>, Vec<i128>)>,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

fn combine(x: &[i128], y: &[i128], p: i128, q: i128) -> Vec<i128> {
    x.iter().zip(y).map(|(a, b)| p * a + q * b).collect()
}

impl Lattice {
    pub fn new(orders: &[u64], basis: &[Vec<i64>]) -> Self {
        let dim = orders.len();
        let torsion: Vec<usize> = (0..dim).filter(|&i| orders[i] > 0).collect();
        let ncoef = basis.len() + torsion.len();
        let mut pending: Vec<(Vec<i128>, Vec<i128>)> = Vec::new();
        for (i, b) in basis.iter().enumerate() {
            let mut c = vec![0i128; ncoef];
            c[i] = 1;
            pending.push((b.iter().map(|&x| x as i128).collect(), c));
        }
        for (k, &col) in torsion.iter().enumerate() {
            let mut r = vec![0i128; dim];
            r[col] = orders[col] as i128;
            let mut c = vec![0i128; ncoef];
            c[basis.len() + k] = 1;
            pending.push((r, c));
        }
        let mut rows: Vec<(usize, Vec<i128>, Vec<i128>)> = Vec::new();
        for col in 0..dim {
            let mut pivot: Option<(Vec<i128>, Vec<i128>)> = None;
            let mut rest = Vec::new();
            for (r, c) in pending.drain(..) {
                if r[col] == 0 {
                    rest.push((r, c));
                    continue;
                }
                match pivot.take() {
                    None => pivot = Some((r, c)),
                    Some((pr, pc)) => {
                        let (a, b) = (pr[col], r[col]);
                        let (g, x, y) = ext_gcd(a, b);
                        let new_p = (combine(&pr, &r, x, y), combine(&pc, &c, x, y));
                        let (u, v) = (b / g, -a / g);
                        let other = (combine(&pr, &r, u, v), combine(&pc, &c, u, v));
                        debug_assert_eq!(other.0[col], 0);
                        debug_assert_eq!(new_p.0[col], g);
                        rest.push(other);
                        pivot = Some(new_p);
                    }
                }
            }
            pending = rest;
            if let Some((mut r, mut c)) = pivot {
                if r[col] < 0 {
                    r.iter_mut().for_each(|x| *x = -*x);
                    c.iter_mut().for_each(|x| *x = -*x);
                }
                rows.push((col, r, c));
            }
        }
        // reduce entries above pivots
        for i in (0..rows.len()).rev() {
            let (col, pr, pc) = rows[i].clone();
            for row in &mut rows[..i] {
                let q = row.1[col].div_euclid(pr[col]);
                if q != 0 {
                    row.1 = combine(&row.1, &pr, 1, -q);
                    row.2 = combine(&row.2, &pc, 1, -q);
                }
            }
        }
        Lattice { orders: orders.to_vec(), n_basis: basis.len(), rows }
    }

    /// Returns the canonical residue of `v` and coefficients over the basis with
    /// `v = residue + Σ coeff_i basis_i` in the group.
    pub fn reduce(&self, v: &[i64]) -> (Vec<i64>, Vec<i128>) {
        let mut r: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        let ncoef = self.rows.first().map(|x| x.2.len()).unwrap_or(self.n_basis);
        let mut coef = vec![0i128; ncoef];
        for (col, pr, pc) in &self.rows {
            let q = r[*col].div_euclid(pr[*col]);
            if q != 0 {
                for (a, b) in r.iter_mut().zip(pr) {
                    *a -= q * b;
                }
                for (a, b) in coef.iter_mut().zip(pc) {
                    *a += q * b;
                }
            }
        }
        let residue = r
            .iter()
            .zip(&self.orders)
            .map(|(&x, &d)| if d > 0 { x.rem_euclid(d as i128) as i64 } else { x as i64 })
            .collect();
        coef.truncate(self.n_basis);
        (residue, coef)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).0.iter().all(|&x| x == 0)
    }

    /// Canonical representative of the coset `v + L`.
    pub fn coset_key(&self, v: &[i64]) -> Vec<i64> {
        self.reduce(v).0
    }

    /// Number of pivots on free coordinates.
    pub fn free_rank(&self) -> usize {
        self.rows.iter().filter(|(c, _, _)| self.orders[*c] == 0).count()
    }

    /// Index in the ambient group, or `None` when infinite.
    pub fn index(&self) -> Option<u128> {
        let mut idx: u128 = 1;
        for col in 0..self.orders.len() {
            match self.rows.iter().find(|(c, _, _)| *c == col) {
                Some((_, r, _)) => idx = idx.checked_mul(r[col] as u128)?,
                None => return None,
            }
        }
        Some(idx)
    }

    pub fn dim(&self) -> usize {
        self.orders.len()
    }
}

/// Rank over ℚ of a list of integer vectors.
pub fn rational_rank(vectors: &[Vec<i64>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let dim = vectors[0].len();
    Lattice::new(&vec![0; dim], vectors).rows.len()
}

/// Whether `target` lies in the subgroup of ℤʳ ⊕ ⊕ℤ/dᵢ generated by `basis`.
pub fn abelian_membership(orders: &[u64], target: &[i64], basis: &[Vec<i64>]) -> bool {
    Lattice::new(orders, basis).contains(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn membership_examples() {
        assert!(abelian_membership(&[0, 0], &[2, 4], &[vec![1, 2]]));
        assert!(!abelian_membership(&[0, 0], &[1, 0], &[vec![0, 1]]));
        assert!(abelian_membership(&[0, 0], &[2, 2], &[vec![2, 0], vec![0, 2]]));
    }

    #[test]
    fn torsion_membership() {
        // in ℤ ⊕ ℤ/4, (0,2) = 2·(0,1) and (1,3) + (1,3) = (2,2)
        assert!(abelian_membership(&[0, 4], &[0, 2], &[vec![0, 1]]));
        assert!(abelian_membership(&[0, 4], &[2, 2], &[vec![1, 3]]));
        assert!(!abelian_membership(&[0, 4], &[1, 0], &[vec![1, 3]]));
        assert!(abelian_membership(&[0, 4], &[4, 0], &[vec![1, 3]]));
    }

    #[test]
    fn coefficients_reconstruct() {
        let basis = vec![vec![2, 3], vec![4, 1]];
        let l = Lattice::new(&[0, 0], &basis);
        let (res, c) = l.reduce(&[6, 4]);
        assert_eq!(res, vec![0, 0]);
        assert_eq!((c[0] * 2 + c[1] * 4, c[0] * 3 + c[1]), (6, 4));
        assert_eq!(l.index(), Some(10));
    }

    fn brute(orders: &[u64], target: &[i64], basis: &[Vec<i64>]) -> bool {
        let n = basis.len();
        let mut coeffs = vec![-5i64; n];
        loop {
            let mut s = vec![0i64; target.len()];
            for (c, b) in coeffs.iter().zip(basis) {
                for (x, y) in s.iter_mut().zip(b) {
                    *x += c * y;
                }
            }
            let eq =
                s.iter().zip(target).zip(orders).all(
                    |((a, b), &d)| {
                        if d > 0 {
                            (a - b).rem_euclid(d as i64) == 0
                        } else {
                            a == b
                        }
                    },
                );
            if eq {
                return true;
            }
            let mut i = 0;
            loop {
                if i == n {
                    return false;
                }
                coeffs[i] += 1;
                if coeffs[i] > 5 {
                    coeffs[i] = -5;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn agrees_with_small_combinations(
            dim in 1usize..=3,
            torsion in proptest::collection::vec(prop_oneof![Just(0u64), 2u64..=5], 3),
            raw in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 1..=3),
            target in proptest::collection::vec(-4i64..=4, 3),
        ) {
            let basis: Vec<Vec<i64>> = raw.iter().map(|v| v[..dim].to_vec()).collect();
            let orders = torsion[..dim].to_vec();
            let t = &target[..dim];
            let member = abelian_membership(&orders, t, &basis);
            if brute(&orders, t, &basis) {
                prop_assert!(member);
            }
            if member {
                let (_, c) = Lattice::new(&orders, &basis).reduce(t);
                let mut s = vec![0i128; dim];
                for (k, b) in c.iter().zip(&basis) {
                    for (x, y) in s.iter_mut().zip(b) { *x += k * (*y as i128); }
                }
                for i in 0..dim {
                    let diff = s[i] - t[i] as i128;
                    if orders[i] > 0 {
                        prop_assert_eq!(diff.rem_euclid(orders[i] as i128), 0);
                    } else {
                        prop_assert_eq!(diff, 0);
                    }
                }
            }
        }
    }
}
