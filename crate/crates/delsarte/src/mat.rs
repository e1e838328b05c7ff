//! Exact integer and rational matrices.
//!
//! Everything in this crate that touches a lattice goes through this module:
//! determinants are computed fraction-free (Bareiss), inverses over `BigRational`,
//! and lattice quotients via Hermite and Smith normal forms.  No floating point,
//! no fixed-width overflow: entries are `BigInt` throughout.
//!
//! The Smith reduction uses a fixed pivot rule (smallest nonzero absolute value,
//! ties broken in row-major order) so that the transform matrices `U`, `V` are
//! byte-for-byte reproducible across runs and platforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major, arbitrary shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    /// Zero matrix of the given shape.
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Scalar multiple of the identity.
    pub fn scalar(n: usize, s: &BigInt) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = s.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Convenience constructor from machine integers (fixtures, tests).
    pub fn from_i64s<const M: usize, const N: usize>(a: [[i64; N]; M]) -> Self {
        IntMat::from_rows(
            a.iter()
                .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
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

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.rows, other.rows, "hstack: row mismatch");
        let mut m = IntMat::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// `[self | v]` for a single extra column.
    pub fn augment_col(&self, v: &[BigInt]) -> IntMat {
        assert_eq!(self.rows, v.len(), "augment_col: length mismatch");
        let col = IntMat::from_rows(v.iter().map(|x| vec![x.clone()]).collect());
        self.hstack(&col)
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "mul: shape mismatch");
        let mut m = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    m[(i, j)] += t;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "mul_vec: length mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row_a -= q * row_b`
    fn row_sub(&mut self, a: usize, q: &BigInt, b: usize) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = q * &self[(b, j)];
            self[(a, j)] -= t;
        }
    }

    /// `col_a -= q * col_b`
    fn col_sub(&mut self, a: usize, q: &BigInt, b: usize) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = q * &self[(i, b)];
            self[(i, a)] -= t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let t = -self[(i, j)].clone();
            self[(i, j)] = t;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let t = -self[(i, j)].clone();
            self[(i, j)] = t;
        }
    }

    /// Determinant by the Bareiss fraction-free algorithm.  All intermediate
    /// divisions are exact, so the computation stays in `BigInt`.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "det: matrix not square");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut w = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if w[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !w[(i, k)].is_zero()) {
                    Some(i) => {
                        w.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &w[(i, j)] * &w[(k, k)] - &w[(i, k)] * &w[(k, j)];
                    w[(i, j)] = &num / &prev;
                }
                w[(i, k)] = BigInt::zero();
            }
            prev = w[(k, k)].clone();
        }
        sign * w[(n - 1, n - 1)].clone()
    }

    /// Exact inverse over the rationals.  Errors with `SingularMatrix` when
    /// the determinant vanishes.
    pub fn rational_inverse(&self) -> Result<RatMat> {
        assert!(self.is_square(), "rational_inverse: matrix not square");
        let n = self.rows;
        let mut a = RatMat::from_int(self);
        let mut inv = RatMat::identity(n);
        for k in 0..n {
            let pivot = (k..n).find(|&i| !a[(i, k)].is_zero());
            let Some(p) = pivot else {
                return Err(Error::SingularMatrix);
            };
            a.swap_rows(k, p);
            inv.swap_rows(k, p);
            let scale = a[(k, k)].recip();
            a.scale_row(k, &scale);
            inv.scale_row(k, &scale);
            for i in 0..n {
                if i == k || a[(i, k)].is_zero() {
                    continue;
                }
                let q = a[(i, k)].clone();
                a.row_sub(i, &q, k);
                inv.row_sub(i, &q, k);
            }
        }
        Ok(inv)
    }

    /// Solve `self * x = rhs` exactly over the rationals (square systems).
    pub fn solve_exact(&self, rhs: &[BigInt]) -> Result<Vec<BigRational>> {
        let inv = self.rational_inverse()?;
        Ok(inv.mul_int_vec(rhs))
    }

    /// Canonical column-style Hermite normal form.
    ///
    /// Only column operations are applied, so the column lattice is preserved.
    /// The result is in column echelon form: pivot rows strictly increase
    /// left to right, pivots are positive, entries to the left of a pivot in
    /// its row are reduced to `[0, pivot)`, and zero columns are pushed to
    /// the right.  Returns the transformed matrix together with the list of
    /// pivot rows (one per pivot column, in order).
    pub fn hermite_columns(&self) -> (IntMat, Vec<usize>) {
        let mut h = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0; // next pivot column
        for i in 0..h.rows {
            if next == h.cols {
                break;
            }
            // Euclid across columns next.. in row i until at most one nonzero.
            loop {
                let nz: Vec<usize> = (next..h.cols).filter(|&j| !h[(i, j)].is_zero()).collect();
                if nz.len() <= 1 {
                    break;
                }
                let &jmin = nz
                    .iter()
                    .min_by_key(|&&j| h[(i, j)].abs())
                    .expect("nonempty");
                for &j in &nz {
                    if j == jmin {
                        continue;
                    }
                    let q = &h[(i, j)] / &h[(i, jmin)];
                    h.col_sub(j, &q, jmin);
                }
            }
            if let Some(j0) = (next..h.cols).find(|&j| !h[(i, j)].is_zero()) {
                h.swap_cols(next, j0);
                if h[(i, next)].is_negative() {
                    h.negate_col(next);
                }
                // Reduce earlier pivot columns against this one in row i.
                let p = h[(i, next)].clone();
                for j in 0..next {
                    let q = h[(i, j)].div_floor(&p);
                    h.col_sub(j, &q, next);
                }
                pivots.push(i);
                next += 1;
            }
        }
        (h, pivots)
    }

    /// Smith normal form `U * self * V = D` with `U`, `V` unimodular and `D`
    /// diagonal, nonnegative, each entry dividing the next.
    pub fn smith_normal_form(&self) -> Snf {
        let (r, c) = (self.rows, self.cols);
        let mut d = self.clone();
        let mut u = IntMat::identity(r);
        let mut v = IntMat::identity(c);
        let steps = r.min(c);

        for k in 0..steps {
            // Fixed pivot rule: smallest nonzero |entry| in the trailing
            // submatrix, first in row-major order on ties.
            let Some((pi, pj)) = pivot_min_abs(&d, k) else {
                break;
            };
            d.swap_rows(k, pi);
            u.swap_rows(k, pi);
            d.swap_cols(k, pj);
            v.swap_cols(k, pj);

            loop {
                // Clear column k below the pivot.
                for i in k + 1..r {
                    while !d[(i, k)].is_zero() {
                        if d[(i, k)].abs() < d[(k, k)].abs() {
                            d.swap_rows(i, k);
                            u.swap_rows(i, k);
                        }
                        // After the conditional swap the quotient is nonzero,
                        // and the remainder is strictly smaller: Euclid.
                        let q = &d[(i, k)] / &d[(k, k)];
                        d.row_sub(i, &q, k);
                        u.row_sub(i, &q, k);
                    }
                }
                // Clear row k right of the pivot (may dirty the column again).
                for j in k + 1..c {
                    while !d[(k, j)].is_zero() {
                        if d[(k, j)].abs() < d[(k, k)].abs() {
                            d.swap_cols(j, k);
                            v.swap_cols(j, k);
                        }
                        let q = &d[(k, j)] / &d[(k, k)];
                        d.col_sub(j, &q, k);
                        v.col_sub(j, &q, k);
                    }
                }
                let col_clean = (k + 1..r).all(|i| d[(i, k)].is_zero());
                let row_clean = (k + 1..c).all(|j| d[(k, j)].is_zero());
                if !(col_clean && row_clean) {
                    continue;
                }
                // Absorb any entry the pivot does not divide, so the final
                // diagonal forms a divisibility chain.
                let bad = (k + 1..r)
                    .flat_map(|i| (k + 1..c).map(move |j| (i, j)))
                    .find(|&(i, j)| !d[(i, j)].mod_floor(&d[(k, k)].abs()).is_zero());
                match bad {
                    Some((i, _)) => {
                        let minus_one = -BigInt::one();
                        d.row_sub(k, &minus_one, i); // row_k += row_i
                        u.row_sub(k, &minus_one, i);
                    }
                    None => break,
                }
            }
            if d[(k, k)].is_negative() {
                d.negate_row(k);
                u.negate_row(k);
            }
        }
        Snf { u, d, v }
    }

    /// Basis of the integer kernel `{x : self * x = 0}`, as matrix columns.
    /// The basis is saturated: it generates the full lattice of integer
    /// kernel vectors, because the columns of the unimodular `V` from the
    /// Smith form map onto a basis of the rational kernel intersected
    /// with the integer lattice.
    pub fn kernel_basis(&self) -> IntMat {
        let snf = self.smith_normal_form();
        let rank = snf.rank();
        let n = self.cols;
        let mut basis = IntMat::zero(n, n - rank);
        for (bj, j) in (rank..n).enumerate() {
            for i in 0..n {
                basis[(i, bj)] = snf.v[(i, j)].clone();
            }
        }
        basis
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl std::fmt::Display for IntMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

fn pivot_min_abs(d: &IntMat, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..d.rows() {
        for j in k..d.cols() {
            if d[(i, j)].is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some(b) => {
                    if d[(i, j)].abs() < d[b].abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

/// Result of a Smith reduction: `u * m * v = d`.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// A full-rank column lattice in Hermite form, for repeated membership tests.
#[derive(Debug, Clone)]
pub struct ColumnLattice {
    h: IntMat,
    pivots: Vec<usize>,
}

impl ColumnLattice {
    /// Errors with `SingularMatrix` unless the columns of `l` span a
    /// finite-index sublattice of `Z^rows`.
    pub fn new(l: &IntMat) -> Result<Self> {
        let (h, pivots) = l.hermite_columns();
        if pivots.len() != l.rows() {
            return Err(Error::SingularMatrix);
        }
        Ok(ColumnLattice { h, pivots })
    }

    /// Canonical Hermite basis (the pivot columns of the reduced form).
    pub fn basis(&self) -> IntMat {
        let n = self.h.rows();
        let mut b = IntMat::zero(n, n);
        for c in 0..n {
            for i in 0..n {
                b[(i, c)] = self.h[(i, c)].clone();
            }
        }
        b
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        assert_eq!(self.h.rows(), v.len(), "contains: length mismatch");
        let mut rem: Vec<BigInt> = v.to_vec();
        for (c, &r) in self.pivots.iter().enumerate() {
            // Echelon shape: rows above r are already cleared, so rem[r]
            // must be consumed exactly by column c.
            let (q, s) = rem[r].div_rem(&self.h[(r, c)]);
            if !s.is_zero() {
                return false;
            }
            for (i, x) in rem.iter_mut().enumerate() {
                *x -= &q * &self.h[(i, c)];
            }
        }
        rem.iter().all(|x| x.is_zero())
    }
}

/// Is `v` in the column lattice of `l`?  One-shot form of `ColumnLattice`.
pub fn hnf_membership(l: &IntMat, v: &[BigInt]) -> Result<bool> {
    Ok(ColumnLattice::new(l)?.contains(v))
}

/// Dense rational matrix, used for exact inverses and solves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_int(m: &IntMat) -> Self {
        RatMat {
            rows: m.rows(),
            cols: m.cols(),
            data: (0..m.rows())
                .flat_map(|i| {
                    (0..m.cols()).map(move |j| BigRational::from_integer(m[(i, j)].clone()))
                })
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, s: &BigRational) {
        for j in 0..self.cols {
            let t = &self[(i, j)] * s;
            self[(i, j)] = t;
        }
    }

    fn row_sub(&mut self, a: usize, q: &BigRational, b: usize) {
        for j in 0..self.cols {
            let t = q * &self[(b, j)];
            self[(a, j)] -= t;
        }
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows, "mul: shape mismatch");
        let mut m = RatMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self[(i, k)] * &other[(k, j)];
                    m[(i, j)] += t;
                }
            }
        }
        m
    }

    pub fn mul_int(&self, other: &IntMat) -> RatMat {
        self.mul(&RatMat::from_int(other))
    }

    pub fn mul_int_vec(&self, v: &[BigInt]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len(), "mul_int_vec: length mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| &self[(i, j)] * BigRational::from_integer(v[j].clone()))
                    .sum()
            })
            .collect()
    }

    pub fn scale(&self, s: &BigRational) -> RatMat {
        let mut m = self.clone();
        for x in &mut m.data {
            *x *= s;
        }
        m
    }

    /// Sum of the entries in row `i` (the "charge" of a row of an inverse
    /// exponent matrix).
    pub fn row_sum(&self, i: usize) -> BigRational {
        (0..self.cols).map(|j| self[(i, j)].clone()).sum()
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// Convert to an integer matrix; `None` if any entry has a denominator.
    pub fn to_int_checked(&self) -> Option<IntMat> {
        if !self.is_integral() {
            return None;
        }
        let mut m = IntMat::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].to_integer();
            }
        }
        Some(m)
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        (0..self.rows).all(|i| {
            (0..self.cols).all(|j| {
                if i == j {
                    self[(i, j)].is_one()
                } else {
                    self[(i, j)].is_zero()
                }
            })
        })
    }
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}
