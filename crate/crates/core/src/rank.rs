//! Exact rank of integer vectors by fraction-free elimination.

use alloc::vec::Vec;

use num_integer::Integer;

/// Row-echelon basis grown one vector at a time.
///
/// Every stored row has a pivot column and a zero in the pivot columns of all
/// rows inserted before it. A candidate is reduced against the rows in
/// insertion order with `v <- a v - b r` (no division) and then divided by
/// the gcd of its entries, which keeps entries small for 0/1 input.
#[derive(Debug, Clone, Default)]
pub struct IncrementalBasis {
    width: usize,
    rows: Vec<(usize, Vec<i128>)>,
}

impl IncrementalBasis {
    pub fn new(width: usize) -> Self {
        IncrementalBasis { width, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is independent of the basis; returns whether it was.
    ///
    /// # Panics
    /// If `v.len()` differs from the basis width, or an entry overflows
    /// `i128` (not reachable for 0/±1 input at the supported sizes).
    pub fn insert(&mut self, v: &[i64]) -> bool {
        assert_eq!(v.len(), self.width, "vector width mismatch");
        let mut cand: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for (pivot, row) in &self.rows {
            let b = cand[*pivot];
            if b == 0 {
                continue;
            }
            let a = row[*pivot];
            let g = a.gcd(&b);
            let (a, b) = (a / g, b / g);
            if a != 1 {
                cand[..*pivot].iter_mut().for_each(|c| *c *= a);
            }
            // Rows are zero left of their pivot.
            for (c, &r) in cand[*pivot..].iter_mut().zip(&row[*pivot..]) {
                *c = a.checked_mul(*c).and_then(|x| x.checked_sub(b.checked_mul(r)?)).expect("rank overflow");
            }
            normalize(&mut cand);
        }
        match cand.iter().position(|&x| x != 0) {
            Some(pivot) => {
                self.rows.push((pivot, cand));
                true
            }
            None => false,
        }
    }
}

fn normalize(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// Rank of a list of integer vectors.
pub fn integer_rank(vectors: &[Vec<i64>]) -> usize {
    let Some(first) = vectors.first() else { return 0 };
    let mut basis = IncrementalBasis::new(first.len());
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}

/// Affine rank (dimension of the affine hull) of a point set, stopping once
/// `cap` is reached. Returns 0 for an empty set.
pub fn affine_rank<I>(points: I, cap: usize) -> usize
where
    I: IntoIterator<Item = Vec<i64>>,
{
    let mut points = points.into_iter();
    let Some(origin) = points.next() else { return 0 };
    let mut basis = IncrementalBasis::new(origin.len());
    let mut diff = alloc::vec![0i64; origin.len()];
    for p in points {
        if basis.rank() >= cap {
            break;
        }
        for ((d, &x), &o) in diff.iter_mut().zip(&p).zip(&origin) {
            *d = x - o;
        }
        basis.insert(&diff);
    }
    basis.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    /// Gaussian elimination with partial pivoting, tolerance 1e-8.
    fn float_rank(vectors: &[Vec<i64>]) -> usize {
        let mut m: Vec<Vec<f64>> = vectors.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect();
        let cols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())) else { break };
            if m[p][c].abs() < 1e-8 {
                continue;
            }
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank {
                    let f = m[r][c] / m[rank][c];
                    for k in c..cols {
                        let sub = f * m[rank][k];
                        m[r][k] -= sub;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn small_cases() {
        assert_eq!(integer_rank(&[]), 0);
        assert_eq!(integer_rank(&[vec![0, 0, 0]]), 0);
        assert_eq!(integer_rank(&[vec![1, 2, 3], vec![2, 4, 6]]), 1);
        assert_eq!(integer_rank(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, -1]]), 2);
        assert_eq!(integer_rank(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]), 3);
    }

    #[test]
    fn affine_rank_of_simplex() {
        let pts = vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]];
        assert_eq!(affine_rank(pts.clone(), usize::MAX), 3);
        assert_eq!(affine_rank(pts, 2), 2);
        assert_eq!(affine_rank(Vec::<Vec<i64>>::new(), 5), 0);
        // Collinear points
        assert_eq!(affine_rank(vec![vec![1, 1], vec![2, 2], vec![3, 3]], 5), 1);
    }

    proptest! {
        #[test]
        fn matches_float_rank(rows in proptest::collection::vec(proptest::collection::vec(-1i64..=1, 7), 1..10)) {
            prop_assert_eq!(integer_rank(&rows), float_rank(&rows));
        }

        #[test]
        fn matches_float_rank_binary(rows in proptest::collection::vec(proptest::collection::vec(0i64..=1, 12), 1..16)) {
            prop_assert_eq!(integer_rank(&rows), float_rank(&rows));
        }
    }
}
