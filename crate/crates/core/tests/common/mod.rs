//! Independent reference computations. Everything here works on raw `u64`
//! residues with `u128` products and never calls the library's arithmetic.

#![allow(dead_code)]

use kcert::field::{Field, FieldSpec, Scalar};
use kcert::sparse::SparseMatrix;

pub const P61: u64 = (1 << 61) - 1;

pub fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn addm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

pub fn subm(a: u64, b: u64, p: u64) -> u64 {
    addm(a, p - b % p, p)
}

pub fn powm(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, p);
        }
        b = mulm(b, b, p);
        e >>= 1;
    }
    r
}

pub fn invm(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p));
    powm(a, p - 2, p)
}

pub type Dense = Vec<Vec<u64>>;

pub fn to_dense(a: &SparseMatrix) -> Dense {
    let n = a.dim();
    let mut m = vec![vec![0u64; n]; n];
    for (i, j, v) in a.entries() {
        m[i][j] = v.value();
    }
    m
}

pub fn vals(v: &[Scalar]) -> Vec<u64> {
    v.iter().map(|x| x.value()).collect()
}

pub fn scalars(f: &Field, v: &[u64]) -> Vec<Scalar> {
    v.iter().map(|&x| f.element(x)).collect()
}

pub fn matvec(a: &Dense, v: &[u64], p: u64) -> Vec<u64> {
    a.iter().map(|row| row.iter().zip(v).fold(0, |acc, (&x, &y)| addm(acc, mulm(x, y, p), p))).collect()
}

pub fn transpose(a: &Dense) -> Dense {
    let n = a.len();
    (0..n).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn power(a: &Dense, v: &[u64], d: usize, p: u64) -> Vec<u64> {
    let mut cur = v.to_vec();
    for _ in 0..d {
        cur = matvec(a, &cur, p);
    }
    cur
}

pub fn dotm(u: &[u64], v: &[u64], p: u64) -> u64 {
    u.iter().zip(v).fold(0, |acc, (&x, &y)| addm(acc, mulm(x, y, p), p))
}

/// `s[i] = u^T A^i v`
pub fn sequence(a: &Dense, u: &[u64], v: &[u64], delta: usize, p: u64) -> Vec<u64> {
    let mut cur = v.to_vec();
    let mut s = vec![dotm(u, &cur, p)];
    for _ in 0..delta {
        cur = matvec(a, &cur, p);
        s.push(dotm(u, &cur, p));
    }
    s
}

/// `sum_i r_i (A^T)^i u`
pub fn combination(a: &Dense, u: &[u64], r: &[u64], p: u64) -> Vec<u64> {
    let at = transpose(a);
    let mut t = vec![0u64; u.len()];
    let mut cur = u.to_vec();
    for (i, &ri) in r.iter().enumerate() {
        if i > 0 {
            cur = matvec(&at, &cur, p);
        }
        for (tj, &cj) in t.iter_mut().zip(&cur) {
            *tj = addm(*tj, mulm(ri, cj, p), p);
        }
    }
    t
}

/// Determinant by Gaussian elimination with row swaps.
pub fn det(a: &Dense, p: u64) -> u64 {
    let n = a.len();
    let mut m = a.clone();
    let mut d = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| m[r][c] != 0) else {
            return 0;
        };
        if piv != c {
            m.swap(piv, c);
            d = subm(0, d, p);
        }
        d = mulm(d, m[c][c], p);
        let inv = invm(m[c][c], p);
        for r in c + 1..n {
            if m[r][c] == 0 {
                continue;
            }
            let f = mulm(m[r][c], inv, p);
            let (top, bottom) = m.split_at_mut(r);
            for (x, &y) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                *x = subm(*x, mulm(f, y, p), p);
            }
        }
    }
    d
}

/// Characteristic polynomial `det(xI - A)` by evaluating at `n + 1`
/// points and Lagrange interpolation. Coefficients low to high.
pub fn charpoly(a: &Dense, p: u64) -> Vec<u64> {
    let n = a.len();
    let xs: Vec<u64> = (0..=n as u64).collect();
    let ys: Vec<u64> = xs
        .iter()
        .map(|&x| {
            let mut m = a.iter().map(|row| row.iter().map(|&v| subm(0, v, p)).collect::<Vec<_>>()).collect::<Dense>();
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = addm(row[i], x, p);
            }
            det(&m, p)
        })
        .collect();
    interpolate(&xs, &ys, p)
}

pub fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addm(out[i + j], mulm(x, y, p), p);
        }
    }
    out
}

pub fn interpolate(xs: &[u64], ys: &[u64], p: u64) -> Vec<u64> {
    let m = xs.len();
    let mut out = vec![0u64; m];
    for i in 0..m {
        let mut basis = vec![1u64];
        let mut denom = 1u64;
        for j in 0..m {
            if i != j {
                basis = poly_mul(&basis, &[subm(0, xs[j], p), 1], p);
                denom = mulm(denom, subm(xs[i], xs[j], p), p);
            }
        }
        let c = mulm(ys[i], invm(denom, p), p);
        for (o, b) in out.iter_mut().zip(&basis) {
            *o = addm(*o, mulm(c, *b, p), p);
        }
    }
    out
}

/// Minimal polynomial of `A`: the first power `A^d` that is a linear
/// combination of `I, ..., A^{d-1}`, found by elimination on flattened
/// matrices. Coefficients low to high, monic.
pub fn minpoly(a: &Dense, p: u64) -> Vec<u64> {
    let n = a.len();
    let flat = |m: &Dense| m.iter().flatten().copied().collect::<Vec<u64>>();
    let mul = |x: &Dense, y: &Dense| -> Dense {
        (0..n).map(|i| (0..n).map(|j| (0..n).fold(0, |acc, k| addm(acc, mulm(x[i][k], y[k][j], p), p))).collect()).collect()
    };
    let mut ident = vec![vec![0u64; n]; n];
    for (i, row) in ident.iter_mut().enumerate() {
        row[i] = 1;
    }
    // echelon basis of flattened powers, each row tracking its combination
    let mut basis: Vec<(Vec<u64>, Vec<u64>, usize)> = Vec::new();
    let mut pw = ident;
    for d in 0..=n {
        let mut v = flat(&pw);
        let mut combo = vec![0u64; d + 1];
        combo[d] = 1;
        for (row, rc, pivot) in &basis {
            let f = v[*pivot];
            if f != 0 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x = subm(*x, mulm(f, *y, p), p);
                }
                for (x, y) in combo.iter_mut().zip(rc) {
                    *x = subm(*x, mulm(f, *y, p), p);
                }
            }
        }
        match v.iter().position(|&x| x != 0) {
            None => return combo,
            Some(pivot) => {
                let inv = invm(v[pivot], p);
                let v: Vec<u64> = v.iter().map(|&x| mulm(x, inv, p)).collect();
                let combo: Vec<u64> = combo.iter().map(|&x| mulm(x, inv, p)).collect();
                basis.push((v, combo, pivot));
            }
        }
        pw = mul(&pw, a);
    }
    unreachable!("Cayley-Hamilton bounds the degree by n")
}

/// Companion matrix of the monic polynomial with low coefficients `c`
/// (`x^n + c[n-1] x^{n-1} + ... + c[0]`).
pub fn companion(f: Field, c: &[u64]) -> SparseMatrix {
    let n = c.len();
    let p = f.modulus();
    let mut t = Vec::new();
    for i in 1..n {
        t.push((i, i - 1, f.element(1)));
    }
    for (i, &ci) in c.iter().enumerate() {
        if ci % p != 0 {
            t.push((i, n - 1, f.element(subm(0, ci, p))));
        }
    }
    SparseMatrix::from_triplets(f, n, t).unwrap()
}

pub fn spec(p: u64) -> FieldSpec {
    FieldSpec::new(p).unwrap()
}

pub fn field(p: u64) -> Field {
    Field::new(p).unwrap()
}

/// Binomial standard deviation of an empirical rate over `trials`.
pub fn sigma(rate: f64, trials: usize) -> f64 {
    (rate * (1.0 - rate) / trials as f64).sqrt()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}
