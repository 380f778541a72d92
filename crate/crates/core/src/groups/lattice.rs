//! Integer matrices and full-rank lattices in column-style Hermite normal form.
//!
//! A lattice is stored as a lower-triangular basis `H` whose columns span it,
//! with positive diagonal and `0 <= H[i][j] < H[i][i]` for `j < i`. Two
//! generating sets span the same lattice iff their normal forms are equal.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ChainError::validation("matrix rows have different lengths"));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().cloned().map(Into::into))
            .collect();
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !a[(r, k)].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    a.data.swap(k * n + j, swap * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Result of a column Hermite reduction: `input * transform = [hnf | 0]`.
pub struct HermiteReduction {
    pub hnf: IntMatrix,
    pub transform: IntMatrix,
}

/// Column-style Hermite normal form of the lattice spanned by the columns of
/// `gens` (an `n x k` matrix, `k >= n`). Fails when the span is not of full
/// rank `n`.
pub fn hermite_reduce(gens: &IntMatrix) -> Result<HermiteReduction> {
    let n = gens.rows();
    let k = gens.cols();
    let mut a = gens.clone();
    let mut u = IntMatrix::identity(k);
    if k < n {
        return Err(ChainError::validation(format!(
            "{k} generators cannot span a rank-{n} lattice"
        )));
    }
    for r in 0..n {
        for c in r + 1..k {
            if a[(r, c)].is_zero() {
                continue;
            }
            let x = a[(r, r)].clone();
            let y = a[(r, c)].clone();
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let yg = &y / &g;
            let xg = &x / &g;
            combine_columns(&mut a, r, c, &s, &t, &yg, &xg);
            combine_columns(&mut u, r, c, &s, &t, &yg, &xg);
        }
        if a[(r, r)].is_zero() {
            return Err(ChainError::validation(
                "lattice generators do not have full rank (index would be infinite)",
            ));
        }
        if a[(r, r)].is_negative() {
            negate_column(&mut a, r);
            negate_column(&mut u, r);
        }
        for j in 0..r {
            let q = a[(r, j)].div_floor(&a[(r, r)]);
            if !q.is_zero() {
                sub_column_multiple(&mut a, j, r, &q);
                sub_column_multiple(&mut u, j, r, &q);
            }
        }
    }
    let mut hnf = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            hnf[(i, j)] = a[(i, j)].clone();
        }
    }
    Ok(HermiteReduction { hnf, transform: u })
}

// (col_r, col_c) <- (s*col_r + t*col_c, -yg*col_r + xg*col_c); determinant 1.
fn combine_columns(m: &mut IntMatrix, r: usize, c: usize, s: &BigInt, t: &BigInt, yg: &BigInt, xg: &BigInt) {
    for i in 0..m.rows() {
        let cr = m[(i, r)].clone();
        let cc = m[(i, c)].clone();
        m[(i, r)] = s * &cr + t * &cc;
        m[(i, c)] = xg * &cc - yg * &cr;
    }
}

fn negate_column(m: &mut IntMatrix, j: usize) {
    for i in 0..m.rows() {
        let v = -m[(i, j)].clone();
        m[(i, j)] = v;
    }
}

fn sub_column_multiple(m: &mut IntMatrix, target: usize, src: usize, q: &BigInt) {
    for i in 0..m.rows() {
        let v = q * &m[(i, src)];
        m[(i, target)] -= v;
    }
}

/// A full-rank sublattice of `Z^n`, canonically in Hermite normal form.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    basis: IntMatrix,
}

impl Lattice {
    /// Lattice spanned by the given column vectors.
    pub fn from_generators(rank: usize, gens: &[Vec<BigInt>]) -> Result<Self> {
        let m = IntMatrix::from_columns(rank, gens);
        Self::from_matrix(&m)
    }

    /// Lattice spanned by the columns of `m`.
    pub fn from_matrix(m: &IntMatrix) -> Result<Self> {
        Ok(Lattice {
            basis: hermite_reduce(m)?.hnf,
        })
    }

    pub fn full(rank: usize) -> Self {
        Lattice {
            basis: IntMatrix::identity(rank),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Index of the lattice in `Z^n`.
    pub fn index(&self) -> BigInt {
        (0..self.rank()).fold(BigInt::one(), |acc, i| acc * &self.basis[(i, i)])
    }

    /// Canonical representative of `v + L`, with `0 <= r_i < H[i][i]`.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut r = v.to_vec();
        for i in 0..self.rank() {
            let q = r[i].div_floor(&self.basis[(i, i)]);
            if !q.is_zero() {
                for (row, x) in r.iter_mut().enumerate().skip(i) {
                    *x -= &q * &self.basis[(row, i)];
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Integer coordinates of `v` in the normal-form basis, if `v` is in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let n = self.rank();
        let mut x: Vec<BigInt> = Vec::with_capacity(n);
        for (i, vi) in v.iter().enumerate().take(n) {
            let mut rhs = vi.clone();
            for (j, xj) in x.iter().enumerate() {
                rhs -= &self.basis[(i, j)] * xj;
            }
            let (q, rem) = rhs.div_rem(&self.basis[(i, i)]);
            if !rem.is_zero() {
                return None;
            }
            x.push(q);
        }
        Some(x)
    }

    /// Image of the lattice under an integer matrix of nonzero determinant.
    pub fn transform(&self, m: &IntMatrix) -> Result<Lattice> {
        Lattice::from_matrix(&m.mul(&self.basis))
    }

    /// `self` is a sublattice of `other`.
    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.basis.columns().iter().all(|c| other.contains(c))
    }

    /// Gcd of the entries of row `i` of the basis (invariant of the lattice).
    pub fn row_gcd(&self, i: usize) -> BigInt {
        self.basis
            .row(i)
            .iter()
            .fold(BigInt::zero(), |acc, x| acc.gcd(x))
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice{:?}", self.basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_is_canonical() {
        let a = Lattice::from_generators(2, &[big(&[6, 4]), big(&[6, 9])]).unwrap();
        let b = Lattice::from_generators(2, &[big(&[12, 13]), big(&[6, 9]), big(&[0, 30])]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.index(), BigInt::from(30));
        let h = a.basis();
        assert!(h[(0, 1)].is_zero());
        assert!(h[(1, 0)] >= BigInt::zero() && h[(1, 0)] < h[(1, 1)]);
    }

    #[test]
    fn membership_and_reduction() {
        let l = Lattice::from_generators(2, &[big(&[6, 4]), big(&[6, 9])]).unwrap();
        assert!(l.contains(&big(&[6, 4])));
        assert!(l.contains(&big(&[12, 13])));
        assert!(!l.contains(&big(&[1, 0])));
        let r = l.reduce(&big(&[-7, 100]));
        assert!(l.contains(&[&BigInt::from(-7) - &r[0], &BigInt::from(100) - &r[1]]));
    }

    #[test]
    fn rank_deficient_is_rejected() {
        assert!(Lattice::from_generators(2, &[big(&[1, 2]), big(&[2, 4])]).is_err());
    }

    #[test]
    fn determinant() {
        let m = IntMatrix::from_rows(&[vec![6, 6], vec![4, 9]]).unwrap();
        assert_eq!(m.det(), BigInt::from(30));
        let p = IntMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        assert_eq!(p.det(), BigInt::from(1));
    }

    #[test]
    fn transform_tracks_columns() {
        let g = IntMatrix::from_rows(&[vec![4, 6, 2], vec![2, 3, 7]]).unwrap();
        let red = hermite_reduce(&g).unwrap();
        let prod = g.mul(&red.transform);
        for i in 0..2 {
            for j in 0..3 {
                let expect = if j < 2 { red.hnf[(i, j)].clone() } else { BigInt::zero() };
                assert_eq!(prod[(i, j)], expect);
            }
        }
    }
}
