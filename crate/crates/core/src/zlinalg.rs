//! Exact integer linear algebra.
//!
//! Everything downstream (abelianizations, coinvariants, `H^1`/`H^2`, the
//! obstruction quotient) reduces to cokernels of integer matrices, so this
//! module is the single engine behind all of them. Entries are `BigInt`;
//! the elimination below can grow intermediate entries well past `i64`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
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
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn scalar(n: usize, c: i64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::from(c);
        }
        m
    }

    /// Builds a matrix from rows of machine integers. All rows must have the
    /// same length; `cols` must be given for the zero-row case.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.data[i * cols + j] = BigInt::from(v);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, columns: &[Vec<BigInt>]) -> Result<Self> {
        let mut m = Self::zeros(dim, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: col.len(),
                });
            }
            for (i, v) in col.iter().enumerate() {
                m.data[i * m.cols + j] = v.clone();
            }
        }
        Ok(m)
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

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * &v[j])
                    .fold(BigInt::zero(), |acc, x| acc + x)
            })
            .collect())
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &IntMatrix, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Result<IntMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn neg(&self) -> IntMatrix {
        self.scale(&BigInt::from(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut cols = self.columns();
        cols.extend(other.columns());
        IntMatrix::from_columns(self.rows, &cols)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        Ok(sign * a.get(n - 1, n - 1))
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    /// Inverse of a unimodular matrix, read off from its Smith decomposition:
    /// `U M V = I` gives `M^{-1} = V U`.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::NotUnimodular);
        }
        let snf = smith_normal_form(self);
        if !snf.d.is_identity() {
            return Err(Error::NotUnimodular);
        }
        snf.v.mul(&snf.u)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(src, j) * c;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += c * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, c: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, src) * c;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.data[i * self.cols + j] = v;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `U * M * V = D` with `U`, `V` unimodular and `D` diagonal, `d_1 | d_2 | ...`.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries `d_1, ..., d_min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smith normal form by repeated pivoting on the smallest nonzero entry.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        'pivot: loop {
            // smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let e = a.get(i, j);
                    if e.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| e.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'pivot;
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            let p = a.get(t, t).clone();
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = -a.get(i, t).div_floor(&p);
                a.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = -a.get(t, j).div_floor(&p);
                a.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }
            // pivot must divide the whole trailing block
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break 'pivot,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }

    SmithDecomposition { u, d: a, v }
}

/// A finitely generated abelian group given by invariant factors, together
/// with the map sending ambient vectors to canonical coordinates.
///
/// Factors are listed torsion first (`d_1 | d_2 | ...`, each `>= 2`), then
/// one `0` per infinite cyclic summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    factors: Vec<BigInt>,
    projection: IntMatrix,
}

impl AbelianGroup {
    /// The group `Z/d_1 + ... ` with identity coordinates; unit factors dropped.
    pub fn from_factors(factors: &[BigInt]) -> Self {
        let n = factors.len();
        let mut rel = IntMatrix::zeros(n, n);
        for (i, d) in factors.iter().enumerate() {
            rel.set(i, i, d.abs());
        }
        cokernel(&rel)
    }

    pub fn free(rank: usize) -> Self {
        cokernel(&IntMatrix::zeros(rank, 0))
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.iter().filter(|d| d.is_zero()).count()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_zero()).cloned().collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.rank() > 0 {
            return None;
        }
        Some(self.factors.iter().fold(BigInt::one(), |acc, d| acc * d))
    }

    pub fn ambient_dim(&self) -> usize {
        self.projection.cols()
    }

    pub fn projection(&self) -> &IntMatrix {
        &self.projection
    }

    /// Canonical coordinates of an ambient vector: torsion coordinates reduced
    /// into `[0, d)`, free coordinates unreduced.
    pub fn coordinates(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        let raw = self.projection.mul_vec(v)?;
        Ok(raw
            .into_iter()
            .zip(&self.factors)
            .map(|(c, d)| if d.is_zero() { c } else { c.mod_floor(d) })
            .collect())
    }

    pub fn is_zero_class(&self, v: &[BigInt]) -> Result<bool> {
        Ok(self.coordinates(v)?.iter().all(Zero::is_zero))
    }

    /// Direct sum, renormalised to invariant-factor form.
    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut f = self.factors.clone();
        f.extend(other.factors.iter().cloned());
        AbelianGroup::from_factors(&f)
    }

    /// Isomorphism type only.
    pub fn is_isomorphic(&self, other: &AbelianGroup) -> bool {
        self.factors == other.factors
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank() {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let torsion = self.torsion();
        let mut i = 0;
        while i < torsion.len() {
            let d = &torsion[i];
            let run = torsion[i..].iter().take_while(|e| *e == d).count();
            if run == 1 {
                parts.push(format!("Z/{d}"));
            } else {
                parts.push(format!("(Z/{d})^{run}"));
            }
            i += run;
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `Z^rows / im(M)`.
pub fn cokernel(m: &IntMatrix) -> AbelianGroup {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let mut torsion_rows = Vec::new();
    let mut free_rows = Vec::new();
    for i in 0..m.rows() {
        let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            free_rows.push(i);
        } else if !d.is_one() {
            torsion_rows.push((i, d));
        }
    }
    let mut factors = Vec::new();
    let mut proj_rows = Vec::new();
    for (i, d) in torsion_rows {
        factors.push(d);
        proj_rows.push(snf.u.row(i));
    }
    for i in free_rows {
        factors.push(BigInt::zero());
        proj_rows.push(snf.u.row(i));
    }
    let mut projection = IntMatrix::zeros(proj_rows.len(), m.rows());
    for (i, row) in proj_rows.into_iter().enumerate() {
        for (j, e) in row.into_iter().enumerate() {
            projection.set(i, j, e);
        }
    }
    AbelianGroup { factors, projection }
}

fn check_dims(dim: usize, gens: &[Vec<BigInt>]) -> Result<()> {
    for g in gens {
        if g.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: g.len(),
            });
        }
    }
    Ok(())
}

/// Decides `v ∈ span_Z(gens)`; on success returns coefficients `c` with
/// `Σ c_i gens_i = v`.
pub fn submodule_membership(gens: &[Vec<BigInt>], v: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    let dim = v.len();
    check_dims(dim, gens)?;
    let m = IntMatrix::from_columns(dim, gens)?;
    let snf = smith_normal_form(&m);
    let diag = snf.diagonal();
    let y = snf.u.mul_vec(v)?;
    let mut w = vec![BigInt::zero(); gens.len()];
    for (i, yi) in y.iter().enumerate() {
        let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            if !yi.is_zero() {
                return Ok(None);
            }
        } else {
            let (q, r) = yi.div_rem(&d);
            if !r.is_zero() {
                return Ok(None);
            }
            w[i] = q;
        }
    }
    Ok(Some(snf.v.mul_vec(&w)?))
}

/// Class of `v` in `Z^dim / span(gens)` together with the quotient group.
pub fn quotient_class(v: &[BigInt], gens: &[Vec<BigInt>]) -> Result<(AbelianGroup, Vec<BigInt>)> {
    check_dims(v.len(), gens)?;
    let group = cokernel(&IntMatrix::from_columns(v.len(), gens)?);
    let coords = group.coordinates(v)?;
    Ok((group, coords))
}

/// A `Z`-basis of `ker M` (as columns), read from the trailing columns of `V`.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    (r..m.cols()).map(|j| snf.v.column(j)).collect()
}
