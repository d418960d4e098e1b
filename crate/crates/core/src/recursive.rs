//! Delegated verification: Krylov-list checking, the dense variant where
//! `Z` and `T` are lists certified by the prover, and the k-level recursion.

use num_rational::Ratio;

use crate::checkpoint::{self, clamp_k, combine_rows};
use crate::error::Error;
use crate::field::Scalar;
use crate::session::{tag, Context, Halt, Query, Step};
use crate::sparse::{DenseVector, Operator};

/// Checks `list[i] = op list[i-1]` with one secret projection `Y`:
/// `H = Y^T op` once, then `H list[i-1] == Y^T list[i]`.
pub fn check_krylov_space(ctx: &mut Context<'_>, op: Operator<'_>, list: &[DenseVector], label: &str) -> Step<()> {
    if list.len() < 2 {
        return Ok(());
    }
    let y = ctx.secret(op.dim());
    let h = ctx.apply(&op.t(), &y)?;
    for i in 1..list.len() {
        let lhs = ctx.dot(&h, &list[i - 1])?;
        let rhs = ctx.dot(&y, &list[i])?;
        ctx.test(lhs, rhs, label, &[i])?;
    }
    Ok(())
}

/// Asks for `[op start, ..., op^{count-1} start]` and certifies it.
pub fn certified_list(
    ctx: &mut Context<'_>,
    op: Operator<'_>,
    start: &[Scalar],
    count: usize,
    label: &str,
) -> Step<Vec<DenseVector>> {
    let n = op.dim();
    let tail = ctx.ask(Query::KrylovList { op, start, count }, &[(count.saturating_sub(1), n)])?;
    let mut list = Vec::with_capacity(count);
    list.push(start.to_vec());
    list.extend(tail);
    check_krylov_space(ctx, op, &list, label)?;
    Ok(list)
}

/// `round(sqrt(0.6 delta))`, clamped to `[1, delta]`.
pub fn choose_k_dense(delta: u64) -> usize {
    clamp_k((0.6 * delta as f64).sqrt().round(), delta)
}

/// `2 mu + 10 K n + ceil(delta / K)(2K + 6n)`
pub fn dense_bound(n: u64, delta: u64, mu: u64, k: u64) -> u64 {
    2 * mu + 10 * k * n + delta.div_ceil(k) * (2 * k + 6 * n)
}

/// Checkpoint protocol with `Z` and `T` delegated as certified lists,
/// requested only after the checkpoints are committed.
pub fn verify_dense(
    ctx: &mut Context<'_>,
    op: Operator<'_>,
    u: &[Scalar],
    v0: &[Scalar],
    delta: usize,
    k: usize,
) -> Step<Vec<Scalar>> {
    seq_level(ctx, op, u, v0, delta, &[k], 0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSchedule {
    pub k: usize,
    /// `(1/k, ..., (k-1)/k)`
    pub exponents: Vec<Ratio<i64>>,
    /// `round(n^{j/k})` in increasing order.
    pub strides: Vec<usize>,
    /// Strides used by the protocol, outermost first; each is a multiple
    /// of the next so that power chains land exactly on their targets.
    pub nested: Vec<usize>,
}

/// Solves the tridiagonal exponent system `2a_i - a_{i-1} - a_{i+1} = 0`,
/// last row `= 1`, in exact arithmetic.
pub fn solve_exponents(k: usize) -> Vec<Ratio<i64>> {
    let m = k - 1;
    if m == 0 {
        return Vec::new();
    }
    // forward elimination on (sub = -1, diag = 2, super = -1)
    let mut diag = vec![Ratio::from_integer(2i64); m];
    let mut rhs = vec![Ratio::from_integer(0i64); m];
    rhs[m - 1] = Ratio::from_integer(1);
    for i in 1..m {
        let factor = Ratio::from_integer(-1) / diag[i - 1];
        diag[i] -= factor * Ratio::from_integer(-1);
        rhs[i] = rhs[i] - factor * rhs[i - 1];
    }
    let mut x = vec![Ratio::from_integer(0i64); m];
    x[m - 1] = rhs[m - 1] / diag[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = (rhs[i] + x[i + 1]) / diag[i];
    }
    x
}

/// Residual of the exponent system at `x`.
pub fn exponent_residual(x: &[Ratio<i64>]) -> Vec<Ratio<i64>> {
    let m = x.len();
    (0..m)
        .map(|i| {
            let two = Ratio::from_integer(2);
            let mut r = two * x[i];
            if i > 0 {
                r -= x[i - 1];
            }
            if i + 1 < m {
                r -= x[i + 1];
            }
            if i + 1 == m {
                r -= Ratio::from_integer(1);
            }
            r
        })
        .collect()
}

pub fn level_schedule(k: usize, n: usize) -> Result<LevelSchedule, Error> {
    if !(2..=8).contains(&k) || n < 2 {
        return Err(Error::InvalidParameter(format!("level schedule needs 2 <= k <= 8 and n >= 2, got k={k}, n={n}")));
    }
    let exponents = solve_exponents(k);
    debug_assert!(exponent_residual(&exponents).iter().all(|r| *r == Ratio::from_integer(0)));
    let strides: Vec<usize> = exponents
        .iter()
        .map(|e| ((n as f64).powf(*e.numer() as f64 / *e.denom() as f64).round() as usize).max(1))
        .collect();
    let mut nested: Vec<usize> = Vec::with_capacity(strides.len());
    for &s in &strides {
        let aligned = match nested.last() {
            Some(&inner) => ((s as f64 / inner as f64).round() as usize).max(1) * inner,
            None => s,
        };
        nested.push(aligned);
    }
    nested.reverse();
    Ok(LevelSchedule { k, exponents, strides, nested })
}

/// The k-level protocol with the given nested strides.
pub fn verify_klevel(
    ctx: &mut Context<'_>,
    op: Operator<'_>,
    u: &[Scalar],
    v0: &[Scalar],
    delta: usize,
    strides: &[usize],
) -> Step<Vec<Scalar>> {
    if strides.is_empty() || strides.contains(&0) || strides.windows(2).any(|w| w[0] % w[1] != 0) {
        return Err(Error::InvalidParameter(format!("k-level strides {strides:?} must be positive and nested")).into());
    }
    seq_level(ctx, op, u, v0, delta, strides, 0)
}

/// Strides at or below this size are handled by the verifier directly.
const LOCAL_STRIDE: usize = 4;

fn seq_level(
    ctx: &mut Context<'_>,
    op: Operator<'_>,
    u: &[Scalar],
    v0: &[Scalar],
    delta: usize,
    strides: &[usize],
    level: usize,
) -> Step<Vec<Scalar>> {
    let (k, rest) = (strides[0], &strides[1..]);
    let c = checkpoint::commit(ctx, op, u, v0, delta, k)?;
    let x = ctx.send_avoiding(tag::X, u)?;
    let z = power_level(ctx, op.t(), &x, k, rest, level)?;
    let t_delegated = !rest.is_empty() && k > LOCAL_STRIDE;
    let r = if t_delegated { ctx.send(tag::R, &[k], false)?.remove(0) } else { ctx.secret(k) };
    let t = combination_level(ctx, op, u, &r, rest, level)?;
    checkpoint::check(ctx, &c, u, &x, &z, &r, &t).map_err(|h| relabel(h, level))?;
    Ok(c.into_sequence())
}

/// `op^k x`, certified.
fn power_level(
    ctx: &mut Context<'_>,
    op: Operator<'_>,
    x: &[Scalar],
    k: usize,
    strides: &[usize],
    level: usize,
) -> Step<DenseVector> {
    if strides.is_empty() {
        let list = certified_list(ctx, op, x, k + 1, "z-list").map_err(|h| relabel(h, level))?;
        return Ok(list.last().expect("k + 1 vectors").clone());
    }
    if k <= LOCAL_STRIDE {
        return Ok(op.power(x, k, ctx.cost())?);
    }
    let (k2, rest) = (strides[0], &strides[1..]);
    let n = op.dim();
    let chain = ctx.ask(Query::PowerChain { op, start: x, exponent: k, stride: k2 }, &[(k / k2, n)])?;
    let x2 = ctx.send(tag::X, &[n], false)?.remove(0);
    let z2 = power_level(ctx, op.t(), &x2, k2, rest, level + 1)?;
    let mut prev: &[Scalar] = x;
    for (j, cj) in chain.iter().enumerate() {
        let lhs = ctx.dot(&x2, cj)?;
        let rhs = ctx.dot(&z2, prev)?;
        ctx.test(lhs, rhs, "power-chain", &[level, j + 1])?;
        prev = cj;
    }
    Ok(chain.last().cloned().unwrap_or_else(|| x.to_vec()))
}

/// `sum_i r_i (op^T)^i u`, certified.
fn combination_level(
    ctx: &mut Context<'_>,
    op: Operator<'_>,
    u: &[Scalar],
    r: &[Scalar],
    strides: &[usize],
    level: usize,
) -> Step<DenseVector> {
    let k = r.len();
    if strides.is_empty() {
        let rows = certified_list(ctx, op.t(), u, k, "t-list").map_err(|h| relabel(h, level))?;
        return Ok(combine_rows(ctx, &rows, r));
    }
    if k <= LOCAL_STRIDE {
        return checkpoint::local_t(ctx, op, u, r);
    }
    let n = op.dim();
    let t = ctx.ask(Query::Combination { op, u, r }, &[(1, n)])?.remove(0);
    let psi = ctx.send(tag::PSI, &[n], false)?.remove(0);
    let gamma = seq_level(ctx, op, u, &psi, k - 1, strides, level + 1)?;
    let lhs = ctx.dot(r, &gamma)?;
    let rhs = ctx.dot(&t, &psi)?;
    ctx.test(lhs, rhs, "combination", &[level])?;
    Ok(t)
}

/// Prefixes the recursion level to a rejection raised below the top.
fn relabel(h: Halt, level: usize) -> Halt {
    match h {
        Halt::Reject(mut r) if level > 0 => {
            r.location.insert(0, level);
            Halt::Reject(r)
        }
        other => other,
    }
}
