//! Exact integer and rational linear algebra: fraction-free elimination, kernels,
//! determinants, linear solves, Smith normal form, definiteness, and an exact simplex
//! feasibility test.

use std::ops::{Index, IndexMut};

use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RationalMatrix = Matrix<Rational>;

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    /// All rows must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let r = rows.len();
        let data: Vec<T> = rows.into_iter().flat_map(|row| {
            assert_eq!(row.len(), cols, "ragged matrix");
            row
        }).collect();
        Matrix { rows: r, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::filled(n, n, T::zero());
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + std::ops::Mul<Output = T>,
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
{
    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::filled(self.rows, other.cols, T::zero());
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] = out[(i, j)].clone() + t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[Vec<i64>], cols: usize) -> Self {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
            cols,
        )
    }

    pub fn to_rational(&self) -> RationalMatrix {
        self.map(|x| Rational::from_integer(x.clone()))
    }
}

/// How pivot rows are chosen during elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pivoting {
    /// First row with a nonzero entry in the pivot column.
    #[default]
    FirstNonzero,
    /// Row with the smallest nonzero absolute value in the pivot column.
    SmallestMagnitude,
}

/// Fraction-free (Bareiss) reduction of an integer matrix to row echelon form.
/// Returns the pivot columns and the number of row swaps.
fn bareiss_echelon(m: &mut IntMatrix, pivoting: Pivoting) -> (Vec<usize>, usize) {
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut r = 0;
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        let candidates = (r..m.rows()).filter(|&i| !m[(i, c)].is_zero());
        let p = match pivoting {
            Pivoting::FirstNonzero => candidates.min(),
            Pivoting::SmallestMagnitude => candidates.min_by_key(|&i| m[(i, c)].abs()),
        };
        let Some(p) = p else { continue };
        if p != r {
            m.swap_rows(p, r);
            swaps += 1;
        }
        let piv = m[(r, c)].clone();
        for i in r + 1..m.rows() {
            let factor = m[(i, c)].clone();
            for j in c + 1..m.cols() {
                let num = &piv * &m[(i, j)] - &factor * &m[(r, j)];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                m[(i, j)] = q;
            }
            m[(i, c)] = BigInt::zero();
        }
        // entries left of the pivot in rows below are already zero; rescale nothing else
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    (pivots, swaps)
}

/// Clears denominators row by row; the row space (hence kernel and rank) is unchanged.
fn integer_rows(a: &RationalMatrix) -> IntMatrix {
    let mut out = Matrix::filled(a.rows(), a.cols(), BigInt::zero());
    for i in 0..a.rows() {
        let l = a.row(i).iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        for j in 0..a.cols() {
            let v = &a[(i, j)] * Rational::from_integer(l.clone());
            out[(i, j)] = v.to_integer();
        }
    }
    out
}

pub fn rank(a: &RationalMatrix) -> usize {
    let mut m = integer_rows(a);
    bareiss_echelon(&mut m, Pivoting::default()).0.len()
}

pub fn int_rank(a: &IntMatrix) -> usize {
    let mut m = a.clone();
    bareiss_echelon(&mut m, Pivoting::default()).0.len()
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn int_determinant(a: &IntMatrix) -> BigInt {
    assert_eq!(a.rows(), a.cols(), "determinant of a non-square matrix");
    let n = a.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let (pivots, swaps) = bareiss_echelon(&mut m, Pivoting::default());
    if pivots.len() < n {
        return BigInt::zero();
    }
    // With full rank the last Bareiss pivot is the determinant up to the row-swap sign.
    let d = m[(n - 1, n - 1)].clone();
    if swaps % 2 == 1 {
        -d
    } else {
        d
    }
}

pub fn determinant(a: &RationalMatrix) -> Rational {
    assert_eq!(a.rows(), a.cols(), "determinant of a non-square matrix");
    let mut m = a.clone();
    let n = m.rows();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap_rows(p, c);
            det = -det;
        }
        let piv = m[(c, c)].clone();
        det *= &piv;
        for i in c + 1..n {
            if m[(i, c)].is_zero() {
                continue;
            }
            let f = &m[(i, c)] / &piv;
            for j in c..n {
                let t = &f * &m[(c, j)];
                m[(i, j)] -= t;
            }
        }
    }
    det
}

/// Basis of the right kernel `{v : A v = 0}`, one vector per non-pivot column.
pub fn kernel_basis(a: &RationalMatrix, pivoting: Pivoting) -> Vec<Vec<Rational>> {
    let cols = a.cols();
    let mut m = integer_rows(a);
    let (pivots, _) = bareiss_echelon(&mut m, pivoting);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate().rev() {
                let mut s = Rational::zero();
                for j in pc + 1..cols {
                    if !v[j].is_zero() && !m[(r, j)].is_zero() {
                        s += Rational::from_integer(m[(r, j)].clone()) * &v[j];
                    }
                }
                v[pc] = -s / Rational::from_integer(m[(r, pc)].clone());
            }
            v
        })
        .collect()
}

/// Some solution of `A x = b`, or `None` when the system is inconsistent.
pub fn solve(a: &RationalMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(a.rows(), b.len());
    let rows = a.rows();
    let cols = a.cols();
    let mut m = Matrix::filled(rows, cols + 1, Rational::zero());
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = a[(i, j)].clone();
        }
        m[(i, cols)] = b[i].clone();
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
        m.swap_rows(p, r);
        let inv = m[(r, c)].recip();
        for j in c..=cols {
            m[(r, j)] = &m[(r, j)] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[(i, c)].is_zero() {
                let f = m[(i, c)].clone();
                for j in c..=cols {
                    let t = &f * &m[(r, j)];
                    m[(i, j)] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if (r..rows).any(|i| !m[(i, cols)].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[(i, cols)].clone();
    }
    Some(x)
}

/// Inverse of a square rational matrix, if it is invertible.
pub fn inverse(a: &RationalMatrix) -> Option<RationalMatrix> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        cols.push(solve(a, &e)?);
    }
    if rank(a) < n {
        return None;
    }
    Some(Matrix::from_rows(cols, n).transpose())
}

/// All leading principal minors positive. The k-th minor is the product of the first k
/// pivots of elimination without row exchanges.
pub fn is_positive_definite(g: &RationalMatrix) -> Result<bool> {
    if g.rows() != g.cols() || g != &g.transpose() {
        return Err(Error::Inconsistent("Gram matrix is not symmetric".into()));
    }
    Ok(leading_principal_minors(g).iter().all(|d| d.is_positive()))
}

pub fn leading_principal_minors(g: &RationalMatrix) -> Vec<Rational> {
    let n = g.rows();
    let mut m = g.clone();
    let mut minors = Vec::with_capacity(n);
    let mut acc = Rational::one();
    for c in 0..n {
        let piv = m[(c, c)].clone();
        acc *= &piv;
        minors.push(acc.clone());
        if piv.is_zero() {
            // later minors are computed directly
            for k in c + 1..n {
                let sub = Matrix::from_rows(
                    (0..=k).map(|i| (0..=k).map(|j| g[(i, j)].clone()).collect()).collect(),
                    k + 1,
                );
                minors.push(determinant(&sub));
            }
            return minors;
        }
        for i in c + 1..n {
            if m[(i, c)].is_zero() {
                continue;
            }
            let f = &m[(i, c)] / &piv;
            for j in c..n {
                let t = &f * &m[(c, j)];
                m[(i, j)] -= t;
            }
        }
    }
    minors
}

/// Smith normal form `A = U · D · V` with `U`, `V` unimodular and `d_1 | d_2 | …`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn all_ones(&self) -> bool {
        self.diagonal.iter().all(|d| d.is_one())
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    // invariants: A = u · d · v
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    // row_i += k·row_j on d  ⇒  u: col_j −= k·col_i
    fn add_row(d: &mut IntMatrix, u: &mut IntMatrix, i: usize, j: usize, k: &BigInt) {
        for c in 0..d.cols() {
            let t = k * &d[(j, c)];
            d[(i, c)] += t;
        }
        for r in 0..u.rows() {
            let t = k * &u[(r, i)];
            u[(r, j)] -= t;
        }
    }
    // col_i += k·col_j on d  ⇒  v: row_j −= k·row_i
    fn add_col(d: &mut IntMatrix, v: &mut IntMatrix, i: usize, j: usize, k: &BigInt) {
        for r in 0..d.rows() {
            let t = k * &d[(r, j)];
            d[(r, i)] += t;
        }
        for c in 0..v.cols() {
            let t = k * &v[(i, c)];
            v[(j, c)] -= t;
        }
    }

    let steps = rows.min(cols);
    for t in 0..steps {
        // bring the smallest nonzero entry of the trailing block to (t, t)
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !d[(i, j)].is_zero()
                        && best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            d.swap_rows(t, bi);
            u.swap_cols(t, bi);
            d.swap_cols(t, bj);
            v.swap_rows(t, bj);

            let mut clean = true;
            for i in t + 1..rows {
                let q = -(d[(i, t)].div_floor(&d[(t, t)]));
                if !q.is_zero() {
                    add_row(&mut d, &mut u, i, t, &q);
                }
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = -(d[(t, j)].div_floor(&d[(t, t)]));
                if !q.is_zero() {
                    add_col(&mut d, &mut v, j, t, &q);
                }
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold any entry not divisible by the pivot into row t
            let piv = d[(t, t)].clone();
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&d[(i, j)] % &piv).is_zero());
            match bad {
                Some((i, _)) => add_row(&mut d, &mut u, t, i, &BigInt::one()),
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            for c in 0..cols {
                d[(t, c)] = -d[(t, c)].clone();
            }
            for r in 0..rows {
                u[(r, t)] = -u[(r, t)].clone();
            }
        }
    }
    let diagonal = (0..steps).map(|i| d[(i, i)].clone()).collect();
    SmithForm { diagonal, d, u, v }
}

/// Exact feasibility of `{x : A_ge x ≥ b_ge, A_eq x = b_eq}` with free variables, by
/// phase-one simplex over the rationals with Bland's rule.
pub fn lp_feasible(ge: &[(Vec<Rational>, Rational)], eq: &[(Vec<Rational>, Rational)]) -> bool {
    let k = ge.iter().chain(eq).map(|(a, _)| a.len()).max().unwrap_or(0);
    let rows = ge.len() + eq.len();
    if rows == 0 {
        return true;
    }
    let slack0 = 2 * k;
    let art0 = slack0 + ge.len();
    let ncols = art0 + rows;
    let rhs = ncols;
    let mut t = Matrix::filled(rows, ncols + 1, Rational::zero());
    for (r, (a, b, slack)) in ge
        .iter()
        .map(|(a, b)| (a, b, true))
        .chain(eq.iter().map(|(a, b)| (a, b, false)))
        .enumerate()
    {
        let sign = if b.is_negative() { -Rational::one() } else { Rational::one() };
        for (j, x) in a.iter().enumerate() {
            t[(r, j)] = &sign * x;
            t[(r, k + j)] = -(&sign * x);
        }
        if slack {
            t[(r, slack0 + r)] = -sign.clone();
        }
        t[(r, art0 + r)] = Rational::one();
        t[(r, rhs)] = &sign * b;
    }
    let mut basis: Vec<usize> = (0..rows).map(|r| art0 + r).collect();
    let mut cost = vec![Rational::zero(); ncols + 1];
    for j in (0..art0).chain(std::iter::once(rhs)) {
        cost[j] = -(0..rows).fold(Rational::zero(), |acc, r| acc + &t[(r, j)]);
    }
    while let Some(e) = (0..ncols).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for r in 0..rows {
            if t[(r, e)].is_positive() {
                let q = &t[(r, rhs)] / &t[(r, e)];
                let better = match &leave {
                    None => true,
                    Some((lr, lq)) => q < *lq || (q == *lq && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, q));
                }
            }
        }
        let Some((l, _)) = leave else { break };
        let inv = t[(l, e)].recip();
        for j in 0..=ncols {
            t[(l, j)] = &t[(l, j)] * &inv;
        }
        for r in 0..rows {
            if r != l && !t[(r, e)].is_zero() {
                let f = t[(r, e)].clone();
                for j in 0..=ncols {
                    let s = &f * &t[(l, j)];
                    t[(r, j)] -= s;
                }
            }
        }
        if !cost[e].is_zero() {
            let f = cost[e].clone();
            for (j, c) in cost.iter_mut().enumerate() {
                *c -= &f * &t[(l, j)];
            }
        }
        basis[l] = e;
    }
    cost[rhs].is_zero()
}
