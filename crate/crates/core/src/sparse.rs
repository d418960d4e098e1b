//! Sparse matrices over GF(p) with counted matrix-vector products.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::RoleCost;
use crate::error::Error;
use crate::field::{Field, Scalar};

pub type DenseVector = Vec<Scalar>;

/// Arithmetic cost of one product with a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ApplyCost {
    pub mu: u64,
}

/// Square sparse matrix in row-major compressed form.
///
/// Entries are sorted by `(row, col)`, unique, and nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    field: Field,
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Scalar>,
    mu: u64,
}

impl SparseMatrix {
    /// Normalizes a triplet list: sorts, merges duplicates, drops zeros.
    pub fn from_triplets(
        field: Field,
        n: usize,
        mut triplets: Vec<(usize, usize, Scalar)>,
    ) -> Result<Self, Error> {
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= n || c >= n) {
            return Err(Error::InvalidParameter(format!(
                "entry ({r}, {c}) outside a {n}x{n} matrix"
            )));
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, Scalar)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            let v = field.element(v.value());
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 = field.add(last.2, v),
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| !e.2.is_zero());

        let mut row_ptr = vec![0usize; n + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let nonempty = (0..n).filter(|&i| row_ptr[i + 1] > row_ptr[i]).count() as u64;
        let mu = 2 * merged.len() as u64 - nonempty;
        Ok(SparseMatrix {
            field,
            n,
            row_ptr,
            cols: merged.iter().map(|e| e.1).collect(),
            vals: merged.iter().map(|e| e.2).collect(),
            mu,
        })
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Self::diagonal(field, &vec![Scalar::ONE; n])
    }

    pub fn diagonal(field: Field, diag: &[Scalar]) -> Self {
        let t = diag.iter().enumerate().map(|(i, &d)| (i, i, d)).collect();
        Self::from_triplets(field, diag.len(), t).expect("diagonal indices are in range")
    }

    pub fn zero(field: Field, n: usize) -> Self {
        Self::from_triplets(field, n, Vec::new()).expect("empty")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn apply_cost(&self) -> ApplyCost {
        ApplyCost { mu: self.mu }
    }

    pub fn mu(&self) -> u64 {
        self.mu
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Scalar)> + '_ {
        (0..self.n).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    fn check_len(&self, v: &[Scalar]) -> Result<(), Error> {
        if v.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: v.len() });
        }
        Ok(())
    }

    /// `A v`
    pub fn matvec(&self, v: &[Scalar], cost: &mut RoleCost) -> Result<DenseVector, Error> {
        self.check_len(v)?;
        let f = &self.field;
        let out = (0..self.n)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .fold(Scalar::ZERO, |acc, k| f.mul_add(acc, self.vals[k], v[self.cols[k]]))
            })
            .collect();
        cost.matvecs += 1;
        cost.field_ops += self.mu;
        Ok(out)
    }

    /// `u^T A`, scattered row by row without forming the transpose.
    pub fn vecmat(&self, u: &[Scalar], cost: &mut RoleCost) -> Result<DenseVector, Error> {
        self.check_len(u)?;
        let f = &self.field;
        let mut out = vec![Scalar::ZERO; self.n];
        for (r, &ur) in u.iter().enumerate() {
            if ur.is_zero() {
                continue;
            }
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                out[c] = f.mul_add(out[c], ur, self.vals[k]);
            }
        }
        cost.vecmats += 1;
        cost.field_ops += self.mu;
        Ok(out)
    }

    /// `D A` for a diagonal `D`; the sparsity pattern is unchanged.
    pub fn scale_rows(&self, d: &[Scalar]) -> Result<Self, Error> {
        self.check_len(d)?;
        let mut out = self.clone();
        for (r, &dr) in d.iter().enumerate() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.vals[k] = self.field.mul(dr, self.vals[k]);
            }
        }
        // zero scalings would break the no-zero invariant
        if d.iter().any(|x| x.is_zero()) {
            return Self::from_triplets(self.field, self.n, out.entries().collect());
        }
        Ok(out)
    }

    /// `lambda I - A`
    pub fn shifted_negation(&self, lambda: Scalar) -> Self {
        let f = self.field;
        let mut t: Vec<(usize, usize, Scalar)> =
            self.entries().map(|(r, c, v)| (r, c, f.neg(v))).collect();
        t.extend((0..self.n).map(|i| (i, i, lambda)));
        Self::from_triplets(f, self.n, t).expect("indices already validated")
    }

    /// Deterministic random instance with exactly `nnz_per_row` distinct
    /// columns per row and uniform nonzero values.
    pub fn random(field: Field, n: usize, nnz_per_row: usize, seed: u64) -> Result<Self, Error> {
        if nnz_per_row == 0 || nnz_per_row > n {
            return Err(Error::InvalidParameter(format!(
                "nnz_per_row must lie in [1, {n}], got {nnz_per_row}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = field.modulus();
        let mut t = Vec::with_capacity(n * nnz_per_row);
        for r in 0..n {
            for c in sample(&mut rng, n, nnz_per_row).into_iter() {
                t.push((r, c, Scalar::from_canonical(rng.gen_range(1..p))));
            }
        }
        Self::from_triplets(field, n, t)
    }

    /// Canonical byte encoding: `p, n, nnz` then `(row, col, value)` triples,
    /// all as 8-byte little-endian words.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(24 + 24 * self.nnz());
        out.extend_from_slice(&self.field.modulus().to_le_bytes());
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(&(self.nnz() as u64).to_le_bytes());
        for (r, c, v) in self.entries() {
            out.extend_from_slice(&(r as u64).to_le_bytes());
            out.extend_from_slice(&(c as u64).to_le_bytes());
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn to_matrix_market(&self) -> String {
        let mut s = String::with_capacity(32 * (self.nnz() + 3));
        s.push_str("%%MatrixMarket matrix coordinate integer general\n");
        let _ = writeln!(s, "% modulus {}", self.field.modulus());
        let _ = writeln!(s, "{} {} {}", self.n, self.n, self.nnz());
        for (r, c, v) in self.entries() {
            let _ = writeln!(s, "{} {} {}", r + 1, c + 1, v);
        }
        s
    }

    pub fn parse_matrix_market(text: &str) -> Result<Self, Error> {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

        match lines.next() {
            Some((_, "%%MatrixMarket matrix coordinate integer general")) => {}
            Some((ln, other)) => return Err(err(ln, format!("unexpected banner {other:?}"))),
            None => return Err(err(1, "empty file".into())),
        }
        let (ln, modline) = lines.next().ok_or_else(|| err(2, "missing modulus line".into()))?;
        let p: u64 = modline
            .strip_prefix("% modulus ")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| err(ln, format!("expected '% modulus <p>', got {modline:?}")))?;
        let field = Field::new(p).map_err(|e| err(ln, e.to_string()))?;

        let (ln, dims) = lines.next().ok_or_else(|| err(3, "missing size line".into()))?;
        let nums: Vec<usize> = dims
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .map_err(|e| err(ln, format!("bad size line: {e}")))?;
        let [rows, cols, nnz] = nums[..] else {
            return Err(err(ln, "size line needs three integers".into()));
        };
        if rows != cols {
            return Err(err(ln, format!("matrix must be square, got {rows}x{cols}")));
        }
        let n = rows;

        let mut t = Vec::with_capacity(nnz);
        let mut last: Option<(usize, usize)> = None;
        for (ln, line) in lines {
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(err(ln, "entry needs <row> <col> <value>".into()));
            }
            let idx = |s: &str| -> Result<usize, Error> {
                let v: usize = s.parse().map_err(|e| err(ln, format!("bad index {s:?}: {e}")))?;
                if v == 0 || v > n {
                    return Err(err(ln, format!("index {v} outside [1, {n}]")));
                }
                Ok(v - 1)
            };
            let (r, c) = (idx(toks[0])?, idx(toks[1])?);
            let v: u64 = toks[2].parse().map_err(|e| err(ln, format!("bad value: {e}")))?;
            let v = field
                .canonical(v)
                .ok_or_else(|| err(ln, format!("value {v} not reduced modulo {p}")))?;
            if v.is_zero() {
                return Err(err(ln, "explicit zero entry".into()));
            }
            if last.is_some_and(|prev| prev >= (r, c)) {
                return Err(err(ln, format!("entry ({}, {}) out of order or duplicated", r + 1, c + 1)));
            }
            last = Some((r, c));
            t.push((r, c, v));
        }
        if t.len() != nnz {
            return Err(err(3, format!("header declares {nnz} entries, found {}", t.len())));
        }
        Self::from_triplets(field, n, t)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, Error> {
        Self::parse_matrix_market(&fs::read_to_string(path)?)
    }

    pub fn store(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        fs::write(path, self.to_matrix_market())?;
        Ok(())
    }
}

/// A matrix used either as `A` or as `A^T`, optionally preceded by a
/// diagonal row scaling (`D A`).
///
/// Applying the transposed orientation to a column vector `w` computes
/// `A^T w = (w^T A)^T`, i.e. a vector-matrix product.
#[derive(Clone, Copy, Debug)]
pub struct Operator<'a> {
    matrix: &'a SparseMatrix,
    scale: Option<&'a [Scalar]>,
    transposed: bool,
}

impl<'a> Operator<'a> {
    pub fn new(matrix: &'a SparseMatrix) -> Self {
        Operator { matrix, scale: None, transposed: false }
    }

    /// `D A` applied as a black box: one product with `A` plus `n` scalings.
    pub fn scaled(matrix: &'a SparseMatrix, diag: &'a [Scalar]) -> Result<Self, Error> {
        matrix.check_len(diag)?;
        Ok(Operator { matrix, scale: Some(diag), transposed: false })
    }

    pub fn t(self) -> Self {
        Operator { transposed: !self.transposed, ..self }
    }

    pub fn is_transposed(&self) -> bool {
        self.transposed
    }

    pub fn matrix(&self) -> &'a SparseMatrix {
        self.matrix
    }

    pub fn field(&self) -> Field {
        self.matrix.field
    }

    pub fn dim(&self) -> usize {
        self.matrix.n
    }

    /// Cost of one application.
    pub fn mu(&self) -> u64 {
        self.matrix.mu + if self.scale.is_some() { self.matrix.n as u64 } else { 0 }
    }

    fn scale_vec(&self, d: &[Scalar], v: &mut [Scalar], cost: &mut RoleCost) {
        let f = &self.matrix.field;
        for (x, &di) in v.iter_mut().zip(d) {
            *x = f.mul(*x, di);
        }
        cost.field_ops += v.len() as u64;
    }

    pub fn apply(&self, v: &[Scalar], cost: &mut RoleCost) -> Result<DenseVector, Error> {
        match (self.transposed, self.scale) {
            (false, None) => self.matrix.matvec(v, cost),
            (true, None) => self.matrix.vecmat(v, cost),
            (false, Some(d)) => {
                let mut out = self.matrix.matvec(v, cost)?;
                self.scale_vec(d, &mut out, cost);
                Ok(out)
            }
            (true, Some(d)) => {
                self.matrix.check_len(v)?;
                let mut w = v.to_vec();
                self.scale_vec(d, &mut w, cost);
                self.matrix.vecmat(&w, cost)
            }
        }
    }

    /// `op^k v` by `k` successive applications.
    pub fn power(&self, v: &[Scalar], k: usize, cost: &mut RoleCost) -> Result<DenseVector, Error> {
        let mut cur = v.to_vec();
        for _ in 0..k {
            cur = self.apply(&cur, cost)?;
        }
        Ok(cur)
    }

    /// Row-major dense copy of the operator.
    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let n = self.dim();
        let f = self.field();
        let mut out = vec![vec![Scalar::ZERO; n]; n];
        for (r, c, v) in self.matrix.entries() {
            let v = match self.scale {
                Some(d) => f.mul(d[r], v),
                None => v,
            };
            if self.transposed {
                out[c][r] = v;
            } else {
                out[r][c] = v;
            }
        }
        out
    }
}

/// `sum u_i v_i`, counted as `2n - 1` operations.
pub fn dot(field: &Field, u: &[Scalar], v: &[Scalar], cost: &mut RoleCost) -> Result<Scalar, Error> {
    if u.len() != v.len() {
        return Err(Error::Dimension { expected: u.len(), got: v.len() });
    }
    cost.field_ops += (2 * u.len() as u64).saturating_sub(1);
    Ok(u.iter().zip(v).fold(Scalar::ZERO, |acc, (&a, &b)| field.mul_add(acc, a, b)))
}

/// `acc += c * v`, counted as `2n` operations.
pub fn axpy(field: &Field, acc: &mut [Scalar], c: Scalar, v: &[Scalar], cost: &mut RoleCost) {
    debug_assert_eq!(acc.len(), v.len());
    cost.field_ops += 2 * v.len() as u64;
    for (a, &x) in acc.iter_mut().zip(v) {
        *a = field.mul_add(*a, c, x);
    }
}
