//! Dense matrices over `Q(i)`: Gauss–Jordan inversion, rank, determinant and
//! the signature of Hermitian forms by exact congruence reduction.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::jet::Gauss;

#[derive(Clone, PartialEq, Eq)]
pub struct GaussMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Gauss>,
}

/// Inertia of a Hermitian form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn is_nondegenerate(&self) -> bool {
        self.zero == 0
    }

    pub fn is_definite(&self) -> bool {
        self.zero == 0 && (self.positive == 0 || self.negative == 0)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.zero == 0 && self.negative == 0
    }
}

impl GaussMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GaussMatrix {
            rows,
            cols,
            data: vec![Gauss::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Gauss::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Gauss) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        GaussMatrix { rows, cols, data }
    }

    pub fn diagonal(entries: &[Gauss]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                entries[i].clone()
            } else {
                Gauss::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Gauss] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.conj_transpose()
    }

    pub fn mul(&self, o: &GaussMatrix) -> GaussMatrix {
        assert_eq!(self.cols, o.rows, "matrix dimension mismatch");
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = Gauss::zero();
            for k in 0..self.cols {
                acc += &(&self[(i, k)] * &o[(k, j)]);
            }
            acc
        })
    }

    pub fn sub(&self, o: &GaussMatrix) -> GaussMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        GaussMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Row echelon form by exact elimination; returns (rank, determinant sign
    /// bookkeeping folded into the determinant when square).
    fn eliminate(&self) -> (usize, Gauss) {
        let mut a = self.clone();
        let mut det = Gauss::one();
        let mut rank = 0;
        for col in 0..a.cols {
            let Some(p) = (rank..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
                det = Gauss::zero();
                continue;
            };
            if p != rank {
                a.swap_rows(p, rank);
                det = -det;
            }
            let pivot = a[(rank, col)].clone();
            det = &det * &pivot;
            let pinv = pivot.inv().unwrap();
            for r in rank + 1..a.rows {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = &a[(r, col)] * &pinv;
                for c in col..a.cols {
                    let v = &f * &a[(rank, c)];
                    a[(r, c)] -= &v;
                }
            }
            rank += 1;
            if rank == a.rows {
                break;
            }
        }
        if !self.is_square() || rank < self.rows {
            det = Gauss::zero();
        }
        (rank, det)
    }

    pub fn rank(&self) -> usize {
        self.eliminate().0
    }

    /// Panics unless square.
    pub fn determinant(&self) -> Gauss {
        assert!(self.is_square());
        if self.rows == 0 {
            return Gauss::one();
        }
        self.eliminate().1
    }

    /// Inverse by Gauss–Jordan elimination, `None` when singular.
    pub fn inverse(&self) -> Option<GaussMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = GaussMatrix::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            let pinv = a[(col, col)].inv().unwrap();
            for c in 0..n {
                a[(col, c)] = &a[(col, c)] * &pinv;
                inv[(col, c)] = &inv[(col, c)] * &pinv;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for c in 0..n {
                    let v = &f * &a[(col, c)];
                    a[(r, c)] -= &v;
                    let w = &f * &inv[(col, c)];
                    inv[(r, c)] -= &w;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// Signature of a Hermitian matrix by symmetric (congruence) pivoting.
    ///
    /// Each step picks the lowest-index nonzero diagonal pivot. When the
    /// remaining diagonal vanishes but some `a_jk != 0`, row `j` gets
    /// `a_jk` times row `k` added (and the conjugate column operation), which
    /// makes the new diagonal entry `2 |a_jk|^2 > 0`.
    pub fn hermitian_signature(&self) -> Signature {
        assert!(self.is_hermitian(), "signature requires a Hermitian matrix");
        let mut a = self.clone();
        let n = a.rows;
        let mut sig = Signature {
            positive: 0,
            negative: 0,
            zero: 0,
        };
        let mut k = 0;
        while k < n {
            let pivot = (k..n).find(|&i| !a[(i, i)].is_zero());
            let p = match pivot {
                Some(p) => p,
                None => {
                    let off = (k..n)
                        .flat_map(|j| (k..n).map(move |l| (j, l)))
                        .find(|&(j, l)| j != l && !a[(j, l)].is_zero());
                    let Some((j, l)) = off else {
                        sig.zero += n - k;
                        break;
                    };
                    let c = a[(j, l)].clone();
                    // row_j += c row_l ; col_j += conj(c) col_l
                    for col in 0..n {
                        let v = &c * &a[(l, col)];
                        a[(j, col)] += &v;
                    }
                    let cc = c.conj();
                    for row in 0..n {
                        let v = &a[(row, l)] * &cc;
                        a[(row, j)] += &v;
                    }
                    j
                }
            };
            a.swap_rows(p, k);
            a.swap_cols(p, k);
            let d = a[(k, k)].clone();
            debug_assert!(d.is_real());
            if d.re.is_positive() {
                sig.positive += 1;
            } else {
                sig.negative += 1;
            }
            let dinv = d.inv().unwrap();
            for r in k + 1..n {
                if a[(r, k)].is_zero() {
                    continue;
                }
                let f = &a[(r, k)] * &dinv;
                for c in k..n {
                    let v = &f * &a[(k, c)];
                    a[(r, c)] -= &v;
                }
                // symmetric column update keeps the trailing block Hermitian
                let fc = f.conj();
                for rr in k..n {
                    let v = &a[(rr, k)] * &fc;
                    a[(rr, r)] -= &v;
                }
            }
            k += 1;
        }
        sig
    }
}

impl std::ops::Index<(usize, usize)> for GaussMatrix {
    type Output = Gauss;
    fn index(&self, (i, j): (usize, usize)) -> &Gauss {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for GaussMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Gauss {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for GaussMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|c| c.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for GaussMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|c| c.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[(i64, i64)]]) -> GaussMatrix {
        let n = rows.len();
        let c = rows[0].len();
        GaussMatrix::from_fn(n, c, |i, j| {
            Gauss::complex((rows[i][j].0, 1), (rows[i][j].1, 1))
        })
    }

    #[test]
    fn inverse_and_det() {
        let a = m(&[&[(2, 0), (1, 1)], &[(0, -1), (3, 0)]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), GaussMatrix::identity(2));
        // det = 6 - (1+i)(-i) = 6 + i - 1... = 6 - (-i - i^2) = 6 + i - 1
        assert_eq!(a.determinant(), Gauss::complex((5, 1), (1, 1)));
        let s = m(&[&[(1, 0), (2, 0)], &[(2, 0), (4, 0)]]);
        assert!(s.inverse().is_none());
        assert_eq!(s.rank(), 1);
        assert!(s.determinant().is_zero());
    }

    #[test]
    fn signatures() {
        let d = m(&[&[(1, 0), (0, 0)], &[(0, 0), (-1, 0)]]);
        assert_eq!(
            d.hermitian_signature(),
            Signature {
                positive: 1,
                negative: 1,
                zero: 0
            }
        );
        // hyperbolic plane with zero diagonal
        let h = m(&[&[(0, 0), (0, 1)], &[(0, -1), (0, 0)]]);
        assert_eq!(
            h.hermitian_signature(),
            Signature {
                positive: 1,
                negative: 1,
                zero: 0
            }
        );
        let z = GaussMatrix::zeros(3, 3);
        assert_eq!(z.hermitian_signature().zero, 3);
        let p = m(&[
            &[(2, 0), (1, 1), (0, 0)],
            &[(1, -1), (3, 0), (0, 0)],
            &[(0, 0), (0, 0), (0, 0)],
        ]);
        assert_eq!(
            p.hermitian_signature(),
            Signature {
                positive: 2,
                negative: 0,
                zero: 1
            }
        );
    }
}
