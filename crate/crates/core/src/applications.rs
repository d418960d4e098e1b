//! Minimal polynomial, determinant and characteristic polynomial, each
//! reduced to one or more certified Krylov sequences.

use crate::checkpoint::{self, choose_k};
use crate::error::Error;
use crate::field::Scalar;
use crate::logdepth::{certify_sequence, PowerVariant};
use crate::poly::{minpoly_of_sequence, DensePolynomial};
use crate::recursive::{choose_k_dense, level_schedule, verify_dense, verify_klevel};
use crate::session::{reject, tag, Context, Query, Step};
use crate::sparse::{Operator, SparseMatrix};

/// Preconditioning attempts before giving up on a degree-deficient
/// minimal polynomial.
pub const DET_RETRIES: usize = 3;

/// Which sequence certificate backs an application.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqProtocol {
    /// Verifier computes `Z` and `T` itself; `None` picks `K` automatically.
    Checkpoint { k: Option<usize> },
    /// `Z` and `T` delegated as certified lists.
    Dense { k: Option<usize> },
    /// Recursive delegation over `levels` levels.
    KLevel { levels: usize },
    Sequence(PowerVariant),
}

impl Default for SeqProtocol {
    fn default() -> Self {
        SeqProtocol::Sequence(PowerVariant::Single)
    }
}

impl SeqProtocol {
    /// Certifies `s[i] = u^T op^i v0` for `i = 0..=delta`.
    pub fn certify(
        &self,
        ctx: &mut Context<'_>,
        op: Operator<'_>,
        u: &[Scalar],
        v0: &[Scalar],
        delta: usize,
    ) -> Step<Vec<Scalar>> {
        let n = op.dim();
        if delta == 0 {
            let s0 = ctx.dot(u, v0)?;
            return Ok(vec![s0]);
        }
        match *self {
            SeqProtocol::Checkpoint { k } => {
                let k = k.unwrap_or_else(|| choose_k(n as u64, delta as u64, op.mu()));
                checkpoint::verify(ctx, op, u, v0, delta, k.min(delta))
            }
            SeqProtocol::Dense { k } => {
                let k = k.unwrap_or_else(|| choose_k_dense(delta as u64));
                verify_dense(ctx, op, u, v0, delta, k.min(delta))
            }
            SeqProtocol::KLevel { levels } => {
                let schedule = level_schedule(levels, n.max(2))?;
                verify_klevel(ctx, op, u, v0, delta, &schedule.nested)
            }
            SeqProtocol::Sequence(variant) => certify_sequence(ctx, variant, op, u, v0, delta, 0),
        }
    }
}

/// Sends `count` projection pairs, takes the prover's claimed minimal
/// polynomial, certifies `2n` terms per pair and compares the claim with
/// the lcm of the recovered generators.
pub fn certify_minpoly(
    ctx: &mut Context<'_>,
    op: Operator<'_>,
    seq: SeqProtocol,
    count: usize,
) -> Step<DensePolynomial> {
    let n = op.dim();
    if count == 0 {
        return Err(Error::InvalidParameter("at least one projection pair is needed".into()).into());
    }
    let flat = ctx.send(tag::PROJECTIONS, &vec![n; 2 * count], false)?;
    let pairs: Vec<(Vec<Scalar>, Vec<Scalar>)> =
        flat.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect();
    let len = 2 * n;
    let claim = ctx.ask_unchecked(Query::MinPolyClaim { op, projections: &pairs, len })?;
    let claimed = match claim.as_slice() {
        [c] if (1..=n + 1).contains(&c.len()) && c.last() == Some(&Scalar::ONE) => {
            DensePolynomial::from_coeffs(c.clone())
        }
        _ => return Err(Error::malformed("minimal polynomial claim must be one monic vector of degree at most n").into()),
    };

    let f = ctx.field();
    let mut acc = DensePolynomial::one();
    for (u, v) in &pairs {
        let s = seq.certify(ctx, op, u, v, len - 1)?;
        let g = minpoly_of_sequence(&f, &s[..len]);
        ctx.cost().field_ops += (len * len) as u64;
        acc = acc.lcm(&f, &g);
    }
    ctx.require(acc == claimed, claimed.coeffs().len() as u64, "minpoly-mismatch", &[])?;
    Ok(claimed)
}

/// Certified determinant: either a kernel witness for `0`, or the
/// constant term of the minimal polynomial of `diag(d) a` when that has
/// degree `n`.
pub fn certify_det(ctx: &mut Context<'_>, a: &SparseMatrix, seq: SeqProtocol, projections: usize) -> Step<Scalar> {
    let n = a.dim();
    let f = ctx.field();
    let claim = ctx.ask_unchecked(Query::DetClaim { op: Operator::new(a) })?;
    match claim.as_slice() {
        [d, w] if d.len() == 1 && d[0].is_zero() && w.len() == n => {
            ctx.require(w.iter().any(|x| !x.is_zero()), n as u64, "kernel-witness", &[0])?;
            let aw = ctx.apply(&Operator::new(a), w)?;
            ctx.require(aw.iter().all(|x| x.is_zero()), n as u64, "kernel-witness", &[1])?;
            return Ok(Scalar::ZERO);
        }
        [d] if d.len() == 1 => {}
        _ => return Err(Error::malformed("determinant claim must be [d] or [0, kernel vector]").into()),
    }
    let claimed = claim[0][0];

    for attempt in 0..DET_RETRIES {
        let diag = ctx.send(tag::PRECONDITIONER, &[n], true)?.remove(0);
        let op = Operator::scaled(a, &diag)?;
        let g = certify_minpoly(ctx, op, seq, projections)?;
        if g.degree() != Some(n) {
            continue;
        }
        // det(DA) = (-1)^n g(0)
        let mut prod = Scalar::ONE;
        for &d in &diag {
            prod = f.mul(prod, d);
        }
        let mut det = f.div(g.coeff(0), prod).expect("preconditioner entries are nonzero");
        if n % 2 == 1 {
            det = f.neg(det);
        }
        ctx.cost().field_ops += n as u64 + 2;
        ctx.require(det == claimed, 1, "det-mismatch", &[attempt])?;
        return Ok(det);
    }
    reject("degree-deficient", &[DET_RETRIES])
}

/// Certified characteristic polynomial: the prover commits `g`, the
/// verifier picks `lambda` and checks `g(lambda) = det(lambda I - a)`.
pub fn certify_charpoly(
    ctx: &mut Context<'_>,
    a: &SparseMatrix,
    seq: SeqProtocol,
    projections: usize,
) -> Step<DensePolynomial> {
    let n = a.dim();
    let claim = ctx.ask_unchecked(Query::CharPolyClaim { op: Operator::new(a) })?;
    let g = match claim.as_slice() {
        [c] if c.len() == n + 1 && c[n] == Scalar::ONE => DensePolynomial::from_coeffs(c.clone()),
        _ => return Err(Error::malformed("characteristic polynomial claim must be monic of degree n").into()),
    };
    let lambda = ctx.send(tag::LAMBDA, &[1], false)?.remove(0)[0];
    let shifted = a.shifted_negation(lambda);
    let det = certify_det(ctx, &shifted, seq, projections)?;
    let f = ctx.field();
    let value = g.eval(&f, lambda);
    ctx.cost().field_ops += 2 * n as u64;
    ctx.test_weighted(value, det, n as u64, "charpoly-eval", &[])?;
    Ok(g)
}
