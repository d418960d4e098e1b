//! Honest computation of Krylov spaces and sequences.

use crate::engine::RoleCost;
use crate::error::Error;
use crate::field::Scalar;
use crate::sparse::{dot, DenseVector, Operator};

/// `Seq(n) = 2 n mu + 4 n^2`, the cost of `2n` sequence terms.
pub fn seq_cost(n: u64, mu: u64) -> u64 {
    2 * n * mu + 4 * n * n
}

/// `s[i] = u^T op^i v0` for `i = 0..=delta`.
pub fn compute_sequence(
    op: &Operator<'_>,
    u: &[Scalar],
    v0: &[Scalar],
    delta: usize,
    cost: &mut RoleCost,
) -> Result<Vec<Scalar>, Error> {
    let f = op.field();
    let mut s = Vec::with_capacity(delta + 1);
    let mut v = v0.to_vec();
    s.push(dot(&f, u, &v, cost)?);
    for _ in 0..delta {
        v = op.apply(&v, cost)?;
        s.push(dot(&f, u, &v, cost)?);
    }
    Ok(s)
}

/// `op^d v`
pub fn compute_power(op: &Operator<'_>, v: &[Scalar], d: usize, cost: &mut RoleCost) -> Result<DenseVector, Error> {
    op.power(v, d, cost)
}

/// `[v0, op v0, ..., op^{count-1} v0]`
pub fn krylov_list(
    op: &Operator<'_>,
    v0: &[Scalar],
    count: usize,
    cost: &mut RoleCost,
) -> Result<Vec<DenseVector>, Error> {
    let mut out: Vec<DenseVector> = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    out.push(v0.to_vec());
    for i in 1..count {
        let next = op.apply(&out[i - 1], cost)?;
        out.push(next);
    }
    Ok(out)
}
