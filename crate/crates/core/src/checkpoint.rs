//! Baby-step/giant-step certificate: the prover sends the sequence with a
//! checkpoint vector every `K` steps; the verifier checks the checkpoints
//! with a secret projection `X` and each block of the sequence with a secret
//! combination `R`.

use crate::field::Scalar;
use crate::prover::combination;
use crate::session::{Context, Query, Step};
use crate::sparse::{axpy, DenseVector, Operator};

/// `round(sqrt(3 n delta / (mu + n)))`, clamped to `[1, min(n, delta)]`.
pub fn choose_k(n: u64, delta: u64, mu: u64) -> usize {
    let raw = (3.0 * n as f64 * delta as f64 / (mu + n) as f64).sqrt().round();
    clamp_k(raw, n.min(delta))
}

pub(crate) fn clamp_k(raw: f64, hi: u64) -> usize {
    (raw as u64).clamp(1, hi.max(1)) as usize
}

/// `2K(mu + n) + ceil(delta / K)(2K + 6n)`
pub fn verifier_bound(n: u64, delta: u64, mu: u64, k: u64) -> u64 {
    2 * k * (mu + n) + delta.div_ceil(k) * (2 * k + 6 * n)
}

/// The prover's commitment: `s[0..=mK]` for `m = ceil(delta / K)` and the
/// checkpoints `W_0..W_m` (`W_0 = V_0` is known to the verifier and not
/// transmitted). Whole blocks are committed even past `delta`.
#[derive(Clone, Debug)]
pub struct Committed {
    pub s: Vec<Scalar>,
    pub w: Vec<DenseVector>,
    pub stride: usize,
    pub delta: usize,
}

impl Committed {
    /// The certified prefix `s[0..=delta]`.
    pub fn into_sequence(mut self) -> Vec<Scalar> {
        self.s.truncate(self.delta + 1);
        self.s
    }
}

/// Number of blocks for a sequence of `delta + 1` terms.
pub fn blocks(delta: usize, stride: usize) -> usize {
    delta.div_ceil(stride).max(1)
}

pub fn commit(
    ctx: &mut Context<'_>,
    op: Operator<'_>,
    u: &[Scalar],
    v0: &[Scalar],
    delta: usize,
    stride: usize,
) -> Step<Committed> {
    let n = op.dim();
    let m = blocks(delta, stride);
    let mut payload =
        ctx.ask(Query::Checkpoints { op, u, v: v0, delta, stride }, &[(1, m * stride + 1), (m, n)])?.into_iter();
    let s = payload.next().expect("shape checked");
    let mut w = Vec::with_capacity(m + 1);
    w.push(v0.to_vec());
    w.extend(payload);
    Ok(Committed { s, w, stride, delta })
}

/// Checks every checkpoint against `Z = (A^T)^K X` and every block of `K`
/// terms against `T = sum r_i (A^T)^i U`; the final term `s[mK]` is
/// compared with `U^T W_m` directly.
pub fn check(
    ctx: &mut Context<'_>,
    c: &Committed,
    u: &[Scalar],
    x: &[Scalar],
    z: &[Scalar],
    r: &[Scalar],
    t: &[Scalar],
) -> Step<()> {
    let k = c.stride;
    let m = c.w.len() - 1;
    for j in 0..m {
        let lhs = ctx.dot(x, &c.w[j + 1])?;
        let rhs = ctx.dot(z, &c.w[j])?;
        ctx.test(lhs, rhs, "checkpoint", &[j + 1])?;
        let lhs = ctx.dot(r, &c.s[j * k..(j + 1) * k])?;
        let rhs = ctx.dot(t, &c.w[j])?;
        ctx.test(lhs, rhs, "sequence-block", &[j])?;
    }
    let last = ctx.dot(u, &c.w[m])?;
    ctx.require(c.s[m * k] == last, 1, "sequence-end", &[m])
}

/// `Z = (A^T)^K X` computed by the verifier itself.
pub fn local_z(ctx: &mut Context<'_>, op: Operator<'_>, x: &[Scalar], k: usize) -> Step<DenseVector> {
    Ok(op.t().power(x, k, ctx.cost())?)
}

/// `T = sum_{i<K} r_i (A^T)^i U` computed by the verifier itself.
pub fn local_t(ctx: &mut Context<'_>, op: Operator<'_>, u: &[Scalar], r: &[Scalar]) -> Step<DenseVector> {
    Ok(combination(op, u, r, ctx.cost())?)
}

/// The full protocol with `Z` and `T` computed locally. Returns the
/// certified sequence `s[0..=delta]`.
pub fn verify(
    ctx: &mut Context<'_>,
    op: Operator<'_>,
    u: &[Scalar],
    v0: &[Scalar],
    delta: usize,
    k: usize,
) -> Step<Vec<Scalar>> {
    let n = op.dim();
    let c = commit(ctx, op, u, v0, delta, k)?;
    let x = ctx.secret_avoiding(n, u);
    let r = ctx.secret(k);
    let z = local_z(ctx, op, &x, k)?;
    let t = local_t(ctx, op, u, &r)?;
    check(ctx, &c, u, &x, &z, &r, &t)?;
    Ok(c.into_sequence())
}

/// `T = sum_i r_i list_i` for a certified list of row vectors.
pub(crate) fn combine_rows(ctx: &mut Context<'_>, rows: &[DenseVector], r: &[Scalar]) -> DenseVector {
    let f = ctx.field();
    let mut t = vec![Scalar::ZERO; rows.first().map_or(0, Vec::len)];
    for (row, &ri) in rows.iter().zip(r) {
        axpy(&f, &mut t, ri, row, ctx.cost());
    }
    t
}
