//! Honest and deliberately faulty provers.

use crate::dense::{charpoly_hessenberg, det_and_kernel};
use crate::engine::{Message, RoleCost};
use crate::error::Error;
use crate::field::Scalar;
use crate::poly::{minpoly_of_sequence, DensePolynomial};
use crate::sequence::compute_sequence;
use crate::session::{Query, Responder, Step};
use crate::sparse::{axpy, dot, DenseVector, Operator};

/// Computes every commitment from scratch.
#[derive(Clone, Copy, Debug, Default)]
pub struct HonestProver;

impl Responder for HonestProver {
    fn respond(&mut self, query: &Query<'_>, cost: &mut RoleCost) -> Result<Vec<Vec<Scalar>>, Error> {
        match *query {
            Query::Checkpoints { op, u, v, delta, stride } => checkpoints(op, u, v, delta, stride, cost),
            Query::KrylovList { op, start, count } => {
                let mut out = Vec::with_capacity(count.saturating_sub(1));
                let mut cur = start.to_vec();
                for _ in 1..count {
                    cur = op.apply(&cur, cost)?;
                    out.push(cur.clone());
                }
                Ok(out)
            }
            Query::PowerChain { op, start, exponent, stride } => {
                if stride == 0 || exponent % stride != 0 {
                    return Err(Error::Prover(format!("stride {stride} does not divide {exponent}")));
                }
                let mut out = Vec::with_capacity(exponent / stride);
                let mut cur = start.to_vec();
                for _ in 0..exponent / stride {
                    cur = op.power(&cur, stride, cost)?;
                    out.push(cur.clone());
                }
                Ok(out)
            }
            Query::Combination { op, u, r } => Ok(vec![combination(op, u, r, cost)?]),
            Query::SequenceCert { op, u, v, e } => {
                let f = op.field();
                let mut s = Vec::with_capacity(e + 1);
                let mut cur = v.to_vec();
                let mut half = Vec::new();
                s.push(dot(&f, u, &cur, cost)?);
                for i in 1..=e {
                    cur = op.apply(&cur, cost)?;
                    s.push(dot(&f, u, &cur, cost)?);
                    if i == e / 2 {
                        half = cur.clone();
                    }
                }
                if e == 0 {
                    half = cur.clone();
                }
                Ok(vec![cur, half, s])
            }
            Query::PowerLog { op, v, d } => {
                let half = op.power(v, d / 2, cost)?;
                let full = op.power(&half, d - d / 2, cost)?;
                Ok(vec![full, half])
            }
            Query::PowerSingle { op, v, d, t } => {
                let top = 1usize << t;
                let mid = top / 2;
                let mut cur = v.to_vec();
                let (mut z, mut z_mid) = (Vec::new(), Vec::new());
                for i in 1..=top {
                    cur = op.apply(&cur, cost)?;
                    if i == d {
                        z = cur.clone();
                    }
                    if i == mid {
                        z_mid = cur.clone();
                    }
                }
                if d == 0 {
                    z = v.to_vec();
                }
                if z.is_empty() {
                    return Err(Error::Prover(format!("exponent {d} exceeds 2^{t}")));
                }
                Ok(vec![cur, z, z_mid])
            }
            Query::MinPolyClaim { op, projections, len } => {
                let f = op.field();
                let mut acc = DensePolynomial::one();
                for (u, v) in projections {
                    let s = compute_sequence(&op, u, v, len.saturating_sub(1), cost)?;
                    let g = minpoly_of_sequence(&f, &s);
                    acc = acc.lcm(&f, &g);
                }
                Ok(vec![acc.into_coeffs()])
            }
            Query::DetClaim { op } => {
                let f = op.field();
                match det_and_kernel(&f, &op.to_dense(), cost) {
                    (d, None) => Ok(vec![vec![d]]),
                    (_, Some(w)) => Ok(vec![vec![Scalar::ZERO], w]),
                }
            }
            Query::CharPolyClaim { op } => {
                let f = op.field();
                Ok(vec![charpoly_hessenberg(&f, &op.to_dense(), cost).into_coeffs()])
            }
        }
    }
}

fn checkpoints(
    op: Operator<'_>,
    u: &[Scalar],
    v: &[Scalar],
    delta: usize,
    stride: usize,
    cost: &mut RoleCost,
) -> Result<Vec<Vec<Scalar>>, Error> {
    if stride == 0 {
        return Err(Error::Prover("zero stride".into()));
    }
    let f = op.field();
    let m = crate::checkpoint::blocks(delta, stride);
    let mut s = Vec::with_capacity(m * stride + 1);
    let mut out = Vec::with_capacity(m + 1);
    let mut cur = v.to_vec();
    s.push(dot(&f, u, &cur, cost)?);
    for i in 1..=m * stride {
        cur = op.apply(&cur, cost)?;
        s.push(dot(&f, u, &cur, cost)?);
        if i % stride == 0 {
            out.push(cur.clone());
        }
    }
    out.insert(0, s);
    Ok(out)
}

/// `sum_i r_i (op^T)^i u`
pub fn combination(op: Operator<'_>, u: &[Scalar], r: &[Scalar], cost: &mut RoleCost) -> Result<DenseVector, Error> {
    let f = op.field();
    let rows = op.t();
    let mut t = vec![Scalar::ZERO; u.len()];
    let mut cur = u.to_vec();
    for (i, &ri) in r.iter().enumerate() {
        if i > 0 {
            cur = rows.apply(&cur, cost)?;
        }
        axpy(&f, &mut t, ri, &cur, cost);
    }
    Ok(t)
}

/// Adds `delta` to one coordinate of one commitment; everything else is
/// computed honestly.
#[derive(Clone, Debug)]
pub struct Tampered {
    pub tag: u8,
    /// Which response carrying `tag` to alter (0 = first).
    pub occurrence: usize,
    pub vector: usize,
    pub coordinate: usize,
    pub delta: Scalar,
    seen: usize,
}

impl Tampered {
    pub fn new(tag: u8, occurrence: usize, vector: usize, coordinate: usize, delta: Scalar) -> Self {
        Tampered { tag, occurrence, vector, coordinate, delta, seen: 0 }
    }

    /// Whether the alteration has been applied.
    pub fn fired(&self) -> bool {
        self.seen > self.occurrence
    }
}

impl Responder for Tampered {
    fn respond(&mut self, query: &Query<'_>, cost: &mut RoleCost) -> Result<Vec<Vec<Scalar>>, Error> {
        let mut payload = HonestProver.respond(query, cost)?;
        if query.tag() == self.tag {
            if self.seen == self.occurrence {
                let f = match query {
                    Query::Checkpoints { op, .. }
                    | Query::KrylovList { op, .. }
                    | Query::PowerChain { op, .. }
                    | Query::Combination { op, .. }
                    | Query::SequenceCert { op, .. }
                    | Query::PowerLog { op, .. }
                    | Query::PowerSingle { op, .. }
                    | Query::MinPolyClaim { op, .. }
                    | Query::DetClaim { op }
                    | Query::CharPolyClaim { op } => op.field(),
                };
                let slot = &mut payload[self.vector][self.coordinate];
                *slot = f.add(*slot, self.delta);
            }
            self.seen += 1;
        }
        Ok(payload)
    }

    fn observe(&mut self, _message: &Message) -> Step<()> {
        Ok(())
    }
}
