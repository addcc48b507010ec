//! Dense linear algebra over the rationals.

use num_traits::{One, Zero};

use super::Rational;

/// Row-major dense matrix over `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: Vec<Vec<Rational>>,
    ncols: usize,
}

impl QMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>, ncols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");
        QMatrix { rows, ncols }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        QMatrix {
            rows: vec![vec![Rational::zero(); ncols]; nrows],
            ncols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = Rational::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.rows[i][j] = v;
    }

    pub fn into_rows(self) -> Vec<Vec<Rational>> {
        self.rows
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.ncols, self.nrows());
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t.rows[j][i] = v.clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.ncols, other.nrows(), "matrix product shape");
        let mut out = QMatrix::zeros(self.nrows(), other.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in other.rows[k].iter().enumerate() {
                    if !b.is_zero() {
                        out.rows[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.ncols, v.len(), "matrix-vector shape");
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Reduced row echelon form in place; returns pivot columns. Pivots are
    /// chosen leftmost-first, rows in their original order.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        self.rref_with(None)
    }

    /// Like [`rref_in_place`](Self::rref_in_place) but applies every row
    /// operation to `companion` as well (so `companion` accumulates the
    /// transform when it starts as the identity).
    pub fn rref_with(&mut self, mut companion: Option<&mut QMatrix>) -> Vec<usize> {
        let nrows = self.nrows();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == nrows {
                break;
            }
            let Some(p) = (r..nrows).find(|&i| !self.rows[i][c].is_zero()) else {
                continue;
            };
            self.rows.swap(r, p);
            if let Some(comp) = companion.as_deref_mut() {
                comp.rows.swap(r, p);
            }
            let inv = self.rows[r][c].recip();
            for v in self.rows[r].iter_mut() {
                *v *= &inv;
            }
            if let Some(comp) = companion.as_deref_mut() {
                for v in comp.rows[r].iter_mut() {
                    *v *= &inv;
                }
            }
            for i in 0..nrows {
                if i == r || self.rows[i][c].is_zero() {
                    continue;
                }
                let f = self.rows[i][c].clone();
                let (pivot_row, target) = borrow_two(&mut self.rows, r, i);
                for (t, p) in target.iter_mut().zip(pivot_row.iter()) {
                    if !p.is_zero() {
                        *t -= &f * p;
                    }
                }
                if let Some(comp) = companion.as_deref_mut() {
                    let (pivot_row, target) = borrow_two(&mut comp.rows, r, i);
                    for (t, p) in target.iter_mut().zip(pivot_row.iter()) {
                        if !p.is_zero() {
                            *t -= &f * p;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// Basis of `{c : M c = 0}`, one vector per free column, with that free
    /// variable set to 1 and the others to 0.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let mut r = self.clone();
        let pivots = r.rref_in_place();
        let mut basis = Vec::new();
        for free in (0..self.ncols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Rational::zero(); self.ncols];
            v[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.rows[row][free].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// A solution of `M c = b` (free variables set to zero), if one exists.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.nrows(), "right-hand side length");
        let mut aug = QMatrix::zeros(self.nrows(), self.ncols + 1);
        for i in 0..self.nrows() {
            aug.rows[i][..self.ncols].clone_from_slice(&self.rows[i]);
            aug.rows[i][self.ncols] = b[i].clone();
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.ncols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.ncols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.rows[row][self.ncols].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if self.nrows() != self.ncols {
            return None;
        }
        let mut a = self.clone();
        let mut inv = QMatrix::identity(self.ncols);
        let pivots = a.rref_with(Some(&mut inv));
        (pivots.len() == self.ncols).then_some(inv)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        self.rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }
}

fn borrow_two<T>(v: &mut [T], a: usize, b: usize) -> (&T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&hi[0], &mut lo[b])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn m(rows: &[&[i64]]) -> QMatrix {
        let ncols = rows[0].len();
        QMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect(),
            ncols,
        )
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(a.rank(), 1);
        let k = a.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1], &[7, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QMatrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[1, -1]]);
        assert_eq!(a.solve(&[q(3), q(1)]).unwrap(), vec![q(2), q(1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(b.solve(&[q(1), q(3)]).is_none());
    }

    #[test]
    fn companion_tracks_row_operations() {
        let a = m(&[&[0, 0], &[1, 2], &[2, 4]]);
        let mut r = a.clone();
        let mut t = QMatrix::identity(3);
        r.rref_with(Some(&mut t));
        assert_eq!(t.mul(&a), r);
    }
}
