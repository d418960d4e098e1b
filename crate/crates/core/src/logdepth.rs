//! Logarithmic-depth certificates: large powers `A^d V` (logarithmic and
//! single matrix-vector variants) and the mutually recursive sequence and
//! combination certificates built on them.

use crate::error::Error;
use crate::field::Scalar;
use crate::session::{tag, Context, Query, Step};
use crate::sparse::{DenseVector, Operator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PowerVariant {
    /// One round per halving; a matrix product at every odd level.
    Log,
    /// Tracks `A^{2^t} V` as well; exactly one product overall.
    Single,
}

impl PowerVariant {
    pub fn code(self) -> u64 {
        match self {
            PowerVariant::Log => 0,
            PowerVariant::Single => 1,
        }
    }

    pub fn from_code(c: u64) -> Option<Self> {
        match c {
            0 => Some(PowerVariant::Log),
            1 => Some(PowerVariant::Single),
            _ => None,
        }
    }
}

/// `ceil(log2 d)` for `d >= 1`.
pub fn ceil_log2(d: usize) -> u32 {
    if d <= 1 {
        0
    } else {
        usize::BITS - (d - 1).leading_zeros()
    }
}

/// Exponent `t` used for the single-product variant.
pub fn single_t(d: usize) -> u32 {
    ceil_log2(d).max(1)
}

/// Checks `z = op^d v` and `z_half = op^{floor(d/2)} v`.
pub fn verify_power_log(
    ctx: &mut Context<'_>,
    op: Operator<'_>,
    v: &[Scalar],
    d: usize,
    z: &[Scalar],
    z_half: &[Scalar],
    depth: usize,
) -> Step<()> {
    let n = op.dim();
    if d <= 1 {
        ctx.require(z_half == v, n as u64, "power-log", &[depth, 0])?;
        let expected = if d == 1 { ctx.apply(&op, v)? } else { v.to_vec() };
        return ctx.require(z == expected.as_slice(), n as u64, "power-log", &[depth, 0]);
    }
    let w = ctx.send(tag::W, &[n], false)?.remove(0);
    let mut child = ctx.ask(Query::PowerLog { op: op.t(), v: &w, d: d / 2 }, &[(2, n)])?;
    let (y_half, y) = (child.pop().expect("two"), child.pop().expect("two"));
    verify_power_log(ctx, op.t(), &w, d / 2, &y, &y_half, depth + 1)?;

    let lhs = ctx.dot(&w, z_half)?;
    let rhs = ctx.dot(&y, v)?;
    ctx.test(lhs, rhs, "power-log", &[depth, 1])?;
    let lhs = ctx.dot(&w, z)?;
    let rhs = if d.is_multiple_of(2) {
        ctx.dot(&y, z_half)?
    } else {
        let az = ctx.apply(&op, z_half)?;
        ctx.dot(&y, &az)?
    };
    ctx.test(lhs, rhs, "power-log", &[depth, 2])
}

/// Checks `z_t = op^{2^t} v`, `z = op^d v`, `z_tm1 = op^{2^{t-1}} v`.
#[allow(clippy::too_many_arguments)]
pub fn verify_power_single(
    ctx: &mut Context<'_>,
    op: Operator<'_>,
    v: &[Scalar],
    d: usize,
    t: u32,
    z_t: &[Scalar],
    z: &[Scalar],
    z_tm1: &[Scalar],
    depth: usize,
) -> Step<()> {
    let n = op.dim();
    if t == 0 || d == 0 || d > 1usize << t {
        return Err(Error::InvalidParameter(format!("power certificate needs 1 <= d <= 2^t, got d={d}, t={t}")).into());
    }
    if t == 1 {
        let w = ctx.secret(n);
        let y = ctx.apply(&op.t(), &w)?;
        let lhs = ctx.dot(&w, z_tm1)?;
        let rhs = ctx.dot(&y, v)?;
        ctx.test(lhs, rhs, "power-single", &[depth, 1])?;
        let lhs = ctx.dot(&w, z_t)?;
        let rhs = ctx.dot(&y, z_tm1)?;
        ctx.test(lhs, rhs, "power-single", &[depth, 3])?;
        let target = if d == 2 { z_t } else { z_tm1 };
        return ctx.require(z == target, n as u64, "power-single", &[depth, 2]);
    }
    let half = 1usize << (t - 1);
    let d2 = if d > half { d - half } else { d };
    let w = ctx.send(tag::W, &[n], false)?.remove(0);
    let child = ctx.ask(Query::PowerSingle { op: op.t(), v: &w, d: d2, t: t - 1 }, &[(3, n)])?;
    let (y_tm1, y, y_tm2) = (&child[0], &child[1], &child[2]);
    verify_power_single(ctx, op.t(), &w, d2, t - 1, y_tm1, y, y_tm2, depth + 1)?;

    let lhs = ctx.dot(&w, z_tm1)?;
    let rhs = ctx.dot(y_tm1, v)?;
    ctx.test(lhs, rhs, "power-single", &[depth, 1])?;
    let lhs = ctx.dot(&w, z)?;
    let rhs = if d > half { ctx.dot(y, z_tm1)? } else { ctx.dot(y, v)? };
    ctx.test(lhs, rhs, "power-single", &[depth, 2])?;
    let lhs = ctx.dot(&w, z_t)?;
    let rhs = ctx.dot(y_tm1, z_tm1)?;
    ctx.test(lhs, rhs, "power-single", &[depth, 3])
}

/// Asks for and checks a power certificate; returns the certified `op^d v`.
pub fn certify_power(
    ctx: &mut Context<'_>,
    variant: PowerVariant,
    op: Operator<'_>,
    v: &[Scalar],
    d: usize,
    depth: usize,
) -> Step<DenseVector> {
    let n = op.dim();
    match variant {
        PowerVariant::Log => {
            let mut c = ctx.ask(Query::PowerLog { op, v, d }, &[(2, n)])?;
            let (z_half, z) = (c.pop().expect("two"), c.pop().expect("two"));
            verify_power_log(ctx, op, v, d, &z, &z_half, depth)?;
            Ok(z)
        }
        PowerVariant::Single => {
            if d == 0 {
                return Ok(v.to_vec());
            }
            let t = single_t(d);
            let mut c = ctx.ask(Query::PowerSingle { op, v, d, t }, &[(3, n)])?;
            verify_power_single(ctx, op, v, d, t, &c[0], &c[1], &c[2], depth)?;
            Ok(c.swap_remove(1))
        }
    }
}

/// Even length used for a request of `d + 1` terms.
pub fn padded_length(d: usize) -> usize {
    (d + d % 2).max(2)
}

/// Certifies `s[i] = u^T op^i v` for `i = 0..=d`.
pub fn certify_sequence(
    ctx: &mut Context<'_>,
    variant: PowerVariant,
    op: Operator<'_>,
    u: &[Scalar],
    v: &[Scalar],
    d: usize,
    depth: usize,
) -> Step<Vec<Scalar>> {
    let n = op.dim();
    let e = padded_length(d);
    let mut c = ctx.ask(Query::SequenceCert { op, u, v, e }, &[(2, n), (1, e + 1)])?;
    let mut s = c.pop().expect("three");
    let (w_half, w) = (c.pop().expect("three"), c.pop().expect("three"));
    verify_sequence_cert(ctx, variant, op, u, v, e, &w, &w_half, &s, depth)?;
    s.truncate(d + 1);
    Ok(s)
}

/// Checks `w = op^e v`, `w_half = op^{e/2} v` and the `e + 1` terms `s`.
#[allow(clippy::too_many_arguments)]
pub fn verify_sequence_cert(
    ctx: &mut Context<'_>,
    variant: PowerVariant,
    op: Operator<'_>,
    u: &[Scalar],
    v: &[Scalar],
    e: usize,
    w: &[Scalar],
    w_half: &[Scalar],
    s: &[Scalar],
    depth: usize,
) -> Step<()> {
    let n = op.dim() as u64;
    if e == 2 {
        let x = ctx.dot(u, v)?;
        ctx.require(s[0] == x, 1, "seq-base", &[e, 0])?;
        let av = ctx.apply(&op, v)?;
        ctx.require(w_half == av.as_slice(), n, "seq-base", &[e, 1])?;
        let x = ctx.dot(u, w_half)?;
        ctx.require(s[1] == x, 1, "seq-base", &[e, 2])?;
        let aw = ctx.apply(&op, w_half)?;
        ctx.require(w == aw.as_slice(), n, "seq-base", &[e, 3])?;
        let x = ctx.dot(u, w)?;
        return ctx.require(s[2] == x, 1, "seq-base", &[e, 4]);
    }
    let h = e / 2;
    let x = ctx.send(tag::X, &[op.dim()], false)?.remove(0);
    let z = certify_power(ctx, variant, op.t(), &x, h, depth + 1)?;
    let lhs = ctx.dot(&x, w_half)?;
    let rhs = ctx.dot(&z, v)?;
    ctx.test(lhs, rhs, "seq", &[e, 1])?;
    let lhs = ctx.dot(&x, w)?;
    let rhs = ctx.dot(&z, w_half)?;
    ctx.test(lhs, rhs, "seq", &[e, 2])?;

    let r = ctx.send(tag::R, &[h + 1], false)?.remove(0);
    let t = certify_combination(ctx, variant, op, u, &r, h, depth + 1)?;
    let lhs = ctx.dot(&r, &s[..=h])?;
    let rhs = ctx.dot(&t, v)?;
    ctx.test(lhs, rhs, "seq", &[e, 3])?;
    let lhs = ctx.dot(&r, &s[h..=e])?;
    let rhs = ctx.dot(&t, w_half)?;
    ctx.test(lhs, rhs, "seq", &[e, 4])
}

/// Certifies `T = sum_{i=0}^{d} r_i (op^T)^i u` (with `r.len() == d + 1`).
pub fn certify_combination(
    ctx: &mut Context<'_>,
    variant: PowerVariant,
    op: Operator<'_>,
    u: &[Scalar],
    r: &[Scalar],
    d: usize,
    depth: usize,
) -> Step<DenseVector> {
    let n = op.dim();
    if r.len() != d + 1 {
        return Err(Error::Dimension { expected: d + 1, got: r.len() }.into());
    }
    let t = ctx.ask(Query::Combination { op, u, r }, &[(1, n)])?.remove(0);
    if d == 0 {
        let f = ctx.field();
        let expected: Vec<Scalar> = u.iter().map(|&x| f.mul(r[0], x)).collect();
        ctx.cost().field_ops += n as u64;
        ctx.require(t == expected, n as u64, "combination", &[d])?;
        return Ok(t);
    }
    let psi = ctx.send(tag::PSI, &[n], false)?.remove(0);
    let gamma = certify_sequence(ctx, variant, op, u, &psi, d, depth + 1)?;
    let lhs = ctx.dot(r, &gamma)?;
    let rhs = ctx.dot(&t, &psi)?;
    ctx.test(lhs, rhs, "combination", &[d])?;
    Ok(t)
}

/// `1/2 mu log2^2(d) + 4 n log2^2(d)`
pub fn sequence_log_prediction(n: u64, mu: u64, d: u64) -> f64 {
    let l = (d as f64).log2();
    0.5 * mu as f64 * l * l + 4.0 * n as f64 * l * l
}

/// `mu log2(d) + 6 n log2^2(d)`
pub fn sequence_single_prediction(n: u64, mu: u64, d: u64) -> f64 {
    let l = (d as f64).log2();
    mu as f64 * l + 6.0 * n as f64 * l * l
}
