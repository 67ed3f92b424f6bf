//! Exact integer and rational linear algebra for alphabet-sized matrices.
//!
//! Everything here is exact: determinants use Bareiss elimination, the
//! characteristic polynomial uses the division-free Berkowitz recurrence,
//! and Krylov dependencies are solved over the rationals.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense matrix of arbitrary-precision integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. Panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Self { rows: rows.len(), cols, data }
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() })
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

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        self.require_square()?;
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn column_sums(&self) -> Vec<BigInt> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].clone()).sum()).collect()
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|x| x.is_positive())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Dimension(format!("{}x{} matrix is not square", self.rows, self.cols)))
        }
    }
}

impl Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Polynomial with integer coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, m: &IntegerMatrix) -> Result<IntegerMatrix> {
        m.require_square()?;
        let d = m.rows();
        let mut acc = IntegerMatrix::zeros(d, d);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m)?;
            for i in 0..d {
                acc[(i, i)] += c;
            }
        }
        Ok(acc)
    }

    /// `Σ a_i M^i v` without forming matrix powers.
    pub fn eval_matrix_vec(&self, m: &IntegerMatrix, v: &[BigInt]) -> Result<Vec<BigInt>> {
        let mut acc = vec![BigInt::zero(); v.len()];
        for c in self.coeffs.iter().rev() {
            acc = m.mul_vec(&acc)?;
            for (a, x) in acc.iter_mut().zip(v) {
                *a += c * x;
            }
        }
        Ok(acc)
    }

    /// Division by a monic polynomial; exact over the integers.
    pub fn div_rem_monic(&self, divisor: &IntPolynomial) -> Result<(IntPolynomial, IntPolynomial)> {
        if !divisor.is_monic() {
            return Err(Error::InvalidArgument("divisor must be monic".into()));
        }
        let dd = divisor.degree().unwrap_or(0);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((IntPolynomial::zero(), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let lead = rem[k + dd].clone();
            if lead.is_zero() {
                continue;
            }
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &lead * c;
            }
            quot[k] = lead;
        }
        rem.truncate(dd);
        Ok((IntPolynomial::new(quot), IntPolynomial::new(rem)))
    }

    /// gcd of the absolute values of `a_0..a_{deg-1}` (the non-leading
    /// coefficients). `gcd(0, x) = |x|`.
    pub fn lower_coeff_gcd(&self) -> BigInt {
        let n = self.coeffs.len().saturating_sub(1);
        self.coeffs[..n].iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = !abs.is_one() || i == 0;
            if show_coeff {
                write!(f, "{abs}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("X")?,
                _ => write!(f, "X^{i}")?,
            }
        }
        Ok(())
    }
}

/// Vector of reduced fractions with positive denominators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalVector(pub Vec<BigRational>);

impl RationalVector {
    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|q| q.is_integer())
    }

    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.0.iter().map(|q| q.is_integer().then(|| q.to_integer())).collect()
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &IntegerMatrix) -> Result<BigInt> {
    m.require_square()?;
    let n = m.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.to_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(sign * &a[n - 1][n - 1])
}

/// `det(X·I − M)` via the Berkowitz recurrence; monic, integer coefficients.
pub fn char_poly(m: &IntegerMatrix) -> Result<IntPolynomial> {
    m.require_square()?;
    let n = m.rows();
    // Coefficients kept highest degree first while building.
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for k in 0..n {
        // Leading principal block of size k+1; split off the last row/col.
        let a_kk = m[(k, k)].clone();
        let col: Vec<BigInt> = (0..k).map(|i| m[(i, k)].clone()).collect();
        let row: Vec<BigInt> = (0..k).map(|j| m[(k, j)].clone()).collect();
        // Toeplitz column: 1, -a_kk, -R·C, -R·A·C, -R·A²·C, ...
        let mut t = Vec::with_capacity(k + 2);
        t.push(BigInt::one());
        t.push(-a_kk);
        let mut v = col;
        for _ in 0..k {
            let dot: BigInt = row.iter().zip(&v).map(|(r, x)| r * x).sum();
            t.push(-dot);
            v = (0..k)
                .map(|i| (0..k).map(|j| &m[(i, j)] * &v[j]).sum())
                .collect();
        }
        let mut next = vec![BigInt::zero(); k + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                if i >= j {
                    *slot += &t[i - j] * cj;
                }
            }
        }
        c = next;
    }
    c.reverse();
    Ok(IntPolynomial::new(c))
}

/// The dependency found when the Krylov sequence `e, Me, M²e, …` stops
/// being free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KrylovRelation {
    /// Largest `i` with `{e, …, M^i e}` linearly independent.
    pub r: usize,
    /// `c_0..c_r` with `M^{r+1} e = Σ c_i M^i e`.
    pub coefficients: RationalVector,
    /// `e, Me, …, M^{r+1} e`.
    pub vectors: Vec<Vec<BigInt>>,
}

/// Krylov rank and relation for the all-ones start vector.
pub fn krylov(m: &IntegerMatrix) -> Result<KrylovRelation> {
    m.require_square()?;
    let d = m.rows();
    if d == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let e = vec![BigInt::one(); d];
    krylov_from(m, e)
}

pub(crate) fn krylov_from(m: &IntegerMatrix, start: Vec<BigInt>) -> Result<KrylovRelation> {
    let mut vectors = vec![start];
    loop {
        let next = m.mul_vec(vectors.last().expect("non-empty"))?;
        if let Some(c) = solve_in_span(&vectors, &next) {
            let r = vectors.len() - 1;
            vectors.push(next);
            return Ok(KrylovRelation { r, coefficients: RationalVector(c), vectors });
        }
        vectors.push(next);
        if vectors.len() > m.rows() + 1 {
            return Err(Error::Dimension("Krylov sequence exceeded the dimension".into()));
        }
    }
}

/// Solves `Σ x_i basis[i] = target` over ℚ when `basis` is free; `None`
/// when `target` is outside the span.
fn solve_in_span(basis: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigRational>> {
    let k = basis.len();
    let d = target.len();
    // Augmented d × (k+1) system.
    let mut a: Vec<Vec<BigRational>> = (0..d)
        .map(|row| {
            let mut r: Vec<BigRational> =
                basis.iter().map(|b| BigRational::from_integer(b[row].clone())).collect();
            r.push(BigRational::from_integer(target[row].clone()));
            r
        })
        .collect();
    let mut pivots = Vec::with_capacity(k);
    let mut row = 0;
    for col in 0..=k {
        let Some(p) = (row..d).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        if col == k {
            // Inconsistent: target has a component outside the span.
            return None;
        }
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = a[row].clone();
        for (i, r) in a.iter_mut().enumerate() {
            if i != row && !r[col].is_zero() {
                let f = r[col].clone();
                for (x, y) in r[col..=k].iter_mut().zip(&pivot[col..=k]) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() < k {
        // The basis itself is dependent; callers only pass free families.
        return None;
    }
    let mut x = vec![BigRational::zero(); k];
    for (r, &col) in pivots.iter().enumerate() {
        x[col] = a[r][k].clone();
    }
    Some(x)
}

/// Rank over ℚ of a family of integer vectors.
pub fn rank(vectors: &[Vec<BigInt>]) -> usize {
    let Some(d) = vectors.first().map(Vec::len) else {
        return 0;
    };
    let mut a: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| v.iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    let mut rank = 0;
    for col in 0..d {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank].clone();
        for r in a.iter_mut().skip(rank + 1) {
            if !r[col].is_zero() {
                let f = &r[col] / &pivot[col];
                for (x, y) in r[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn det_examples() {
        let m = IntegerMatrix::from_rows(&[[1, 1, 0], [2, 2, 1], [1, 1, 1]]);
        assert_eq!(det(&m).unwrap(), bi(0));
        assert_eq!(det(&IntegerMatrix::from_rows(&[[1, 1], [1, 0]])).unwrap(), bi(-1));
        assert_eq!(det(&IntegerMatrix::identity(5)).unwrap(), bi(1));
        assert_eq!(det(&IntegerMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap(), bi(-1));
        assert!(det(&IntegerMatrix::from_rows(&[[1, 2, 3]])).is_err());
    }

    #[test]
    fn char_poly_examples() {
        let fib = IntegerMatrix::from_rows(&[[1, 1], [1, 0]]);
        assert_eq!(char_poly(&fib).unwrap(), IntPolynomial::from_i64(&[-1, -1, 1]));
        let diag = IntegerMatrix::from_rows(&[[2, 0], [0, 3]]);
        assert_eq!(char_poly(&diag).unwrap(), IntPolynomial::from_i64(&[6, -5, 1]));
        let zeta = IntegerMatrix::from_rows(&[[1, 1, 0], [2, 2, 1], [1, 1, 1]]);
        assert_eq!(char_poly(&zeta).unwrap(), IntPolynomial::from_i64(&[0, 2, -4, 1]));
    }

    #[test]
    fn krylov_examples() {
        let zeta = IntegerMatrix::from_rows(&[[1, 1, 0], [2, 2, 1], [1, 1, 1]]);
        let k = krylov(&zeta).unwrap();
        assert_eq!(k.r, 2);
        assert_eq!(k.vectors[1], vec![bi(2), bi(5), bi(3)]);
        assert_eq!(k.vectors[2], vec![bi(7), bi(17), bi(10)]);
        assert_eq!(k.coefficients.to_integers().unwrap(), vec![bi(0), bi(-2), bi(4)]);

        let fib = IntegerMatrix::from_rows(&[[1, 1], [1, 0]]);
        let k = krylov(&fib).unwrap();
        assert_eq!(k.r, 1);
        assert_eq!(k.coefficients.to_integers().unwrap(), vec![bi(1), bi(1)]);

        let k = krylov(&IntegerMatrix::identity(3)).unwrap();
        assert_eq!(k.r, 0);
        assert_eq!(k.coefficients.to_integers().unwrap(), vec![bi(1)]);
    }

    #[test]
    fn polynomial_display_and_division() {
        let q = IntPolynomial::from_i64(&[0, 2, -4, 1]);
        assert_eq!(q.to_string(), "X^3 - 4X^2 + 2X");
        assert_eq!(IntPolynomial::from_i64(&[-1, -1, 1]).to_string(), "X^2 - X - 1");
        assert_eq!(IntPolynomial::from_i64(&[-2, 1]).to_string(), "X - 2");
        // (X^2 - 1) = (X - 1)(X + 1)
        let p = IntPolynomial::from_i64(&[-1, 0, 1]);
        let (quot, rem) = p.div_rem_monic(&IntPolynomial::from_i64(&[-1, 1])).unwrap();
        assert_eq!(quot, IntPolynomial::from_i64(&[1, 1]));
        assert!(rem.is_zero());
        assert_eq!(q.lower_coeff_gcd(), bi(2));
    }

    #[test]
    fn rank_counts_independent_vectors() {
        let v = vec![vec![bi(1), bi(1)], vec![bi(2), bi(2)], vec![bi(0), bi(1)]];
        assert_eq!(rank(&v), 2);
    }
}
