//! A verifier-driven protocol session.
//!
//! Verifier code asks the prover for commitments through [`Query`] values and
//! draws challenges from the session's [`ChallengeSource`]. Every message,
//! in either direction, lands in the transcript and (in Fiat-Shamir mode) in
//! the hash chain before the next challenge is derived.

use crate::engine::{
    soundness_bound, ChallengeSource, CostLedger, Direction, Header, Message, Rejection, RoleCost,
    Transcript, VerifierOutcome,
};
use crate::error::Error;
use crate::field::{Field, FieldSpec, Scalar};
use crate::sparse::{dot, DenseVector, Operator};

/// Why a verification stopped early.
#[derive(Debug)]
pub enum Halt {
    Reject(Rejection),
    Error(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Error(e)
    }
}

pub type Step<T> = Result<T, Halt>;

fn shape_matches(payload: &[Vec<Scalar>], shape: &[(usize, usize)]) -> bool {
    let total: usize = shape.iter().map(|g| g.0).sum();
    if payload.len() != total {
        return false;
    }
    let mut it = payload.iter();
    shape.iter().all(|&(count, len)| it.by_ref().take(count).all(|v| v.len() == len))
}

pub fn reject<T>(check_id: &str, location: &[usize]) -> Step<T> {
    Err(Halt::Reject(Rejection { check_id: check_id.to_string(), location: location.to_vec() }))
}

/// Message tags.
pub mod tag {
    pub const CHECKPOINTS: u8 = 0x21;
    pub const KRYLOV_LIST: u8 = 0x22;
    pub const POWER_CHAIN: u8 = 0x23;
    pub const COMBINATION: u8 = 0x24;
    pub const SEQUENCE_CERT: u8 = 0x25;
    pub const POWER_LOG: u8 = 0x26;
    pub const POWER_SINGLE: u8 = 0x27;
    pub const MINPOLY_CLAIM: u8 = 0x28;
    pub const DET_CLAIM: u8 = 0x29;
    pub const CHARPOLY_CLAIM: u8 = 0x2a;

    pub const PROJECTIONS: u8 = 0x41;
    pub const X: u8 = 0x42;
    pub const R: u8 = 0x43;
    pub const PSI: u8 = 0x44;
    pub const W: u8 = 0x45;
    pub const PRECONDITIONER: u8 = 0x47;
    pub const LAMBDA: u8 = 0x48;
    pub const INPUT: u8 = 0x49;
}

/// A request for a prover commitment. Vectors are column vectors; a row
/// vector `u^T A^i` is represented by `(A^T)^i u`, i.e. by the transposed
/// operator.
#[derive(Clone, Copy, Debug)]
pub enum Query<'q> {
    /// `[s_0..s_delta, W_1, ..., W_m]` with `W_j = op^{j*stride} v`,
    /// `m = ceil(delta / stride)`.
    Checkpoints { op: Operator<'q>, u: &'q [Scalar], v: &'q [Scalar], delta: usize, stride: usize },
    /// `[op v, ..., op^{count-1} v]`.
    KrylovList { op: Operator<'q>, start: &'q [Scalar], count: usize },
    /// `[op^{stride} v, op^{2 stride} v, ..., op^{exponent} v]`; `stride | exponent`.
    PowerChain { op: Operator<'q>, start: &'q [Scalar], exponent: usize, stride: usize },
    /// `[sum_i r_i (op^T)^i u]`.
    Combination { op: Operator<'q>, u: &'q [Scalar], r: &'q [Scalar] },
    /// `[op^e v, op^{e/2} v, (u^T op^i v)_{i=0..e}]` for even `e`.
    SequenceCert { op: Operator<'q>, u: &'q [Scalar], v: &'q [Scalar], e: usize },
    /// `[op^d v, op^{floor(d/2)} v]`.
    PowerLog { op: Operator<'q>, v: &'q [Scalar], d: usize },
    /// `[op^{2^t} v, op^d v, op^{2^{t-1}} v]`.
    PowerSingle { op: Operator<'q>, v: &'q [Scalar], d: usize, t: u32 },
    /// `[lcm of the minimal polynomials of (u_k^T op^i v_k)_{i < len}]`.
    MinPolyClaim { op: Operator<'q>, projections: &'q [(DenseVector, DenseVector)], len: usize },
    /// `[[det]]`, or `[[0], w]` with `op w = 0`, `w != 0`.
    DetClaim { op: Operator<'q> },
    /// `[charpoly coefficients]`.
    CharPolyClaim { op: Operator<'q> },
}

impl Query<'_> {
    pub fn tag(&self) -> u8 {
        match self {
            Query::Checkpoints { .. } => tag::CHECKPOINTS,
            Query::KrylovList { .. } => tag::KRYLOV_LIST,
            Query::PowerChain { .. } => tag::POWER_CHAIN,
            Query::Combination { .. } => tag::COMBINATION,
            Query::SequenceCert { .. } => tag::SEQUENCE_CERT,
            Query::PowerLog { .. } => tag::POWER_LOG,
            Query::PowerSingle { .. } => tag::POWER_SINGLE,
            Query::MinPolyClaim { .. } => tag::MINPOLY_CLAIM,
            Query::DetClaim { .. } => tag::DET_CLAIM,
            Query::CharPolyClaim { .. } => tag::CHARPOLY_CLAIM,
        }
    }
}

/// The prover side of a session.
pub trait Responder {
    fn respond(&mut self, query: &Query<'_>, cost: &mut RoleCost) -> Result<Vec<Vec<Scalar>>, Error>;

    /// Sees every challenge the verifier sends.
    fn observe(&mut self, _message: &Message) -> Step<()> {
        Ok(())
    }
}

pub struct Context<'p> {
    spec: FieldSpec,
    transcript: Transcript,
    ledger: CostLedger,
    source: ChallengeSource,
    prover: &'p mut dyn Responder,
    last: Option<Direction>,
}

impl<'p> Context<'p> {
    pub fn new(spec: FieldSpec, header: Header, source: ChallengeSource, prover: &'p mut dyn Responder) -> Self {
        Context { spec, transcript: Transcript::new(header), ledger: CostLedger::default(), source, prover, last: None }
    }

    pub fn field(&self) -> Field {
        self.spec.field()
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_parts(self) -> (Transcript, CostLedger) {
        (self.transcript, self.ledger)
    }

    pub fn cost(&mut self) -> &mut RoleCost {
        &mut self.ledger.verifier
    }

    fn append(&mut self, message: Message) {
        if message.direction == Direction::ProverToVerifier && self.last != Some(Direction::ProverToVerifier) {
            self.ledger.rounds += 1;
        }
        self.last = Some(message.direction);
        self.ledger.comm_field_elements += message.scalar_count();
        self.source.absorb(&message.encode());
        self.transcript.messages.push(message);
    }

    /// Obtains and records a prover commitment. `shape` lists groups of
    /// `(count, length)`: `count` consecutive vectors of the given length.
    pub fn ask(&mut self, query: Query<'_>, shape: &[(usize, usize)]) -> Step<Vec<Vec<Scalar>>> {
        let payload = self.prover.respond(&query, &mut self.ledger.prover)?;
        if !shape_matches(&payload, shape) {
            return Err(Error::malformed(format!(
                "response to tag {:#04x} has shape {:?}, expected {:?}",
                query.tag(),
                payload.iter().map(Vec::len).collect::<Vec<_>>(),
                shape
            ))
            .into());
        }
        self.append(Message { direction: Direction::ProverToVerifier, tag: query.tag(), payload: payload.clone() });
        Ok(payload)
    }

    /// Like [`ask`](Self::ask) for responses whose shape the caller validates.
    pub fn ask_unchecked(&mut self, query: Query<'_>) -> Step<Vec<Vec<Scalar>>> {
        let payload = self.prover.respond(&query, &mut self.ledger.prover)?;
        self.append(Message { direction: Direction::ProverToVerifier, tag: query.tag(), payload: payload.clone() });
        Ok(payload)
    }

    /// A challenge vector that stays with the verifier.
    pub fn secret(&mut self, len: usize) -> DenseVector {
        self.source.vector(len, false)
    }

    /// A secret challenge vector different from `avoid` (given up after a
    /// few draws, which only matters for degenerate sample sets).
    pub fn secret_avoiding(&mut self, len: usize, avoid: &[Scalar]) -> DenseVector {
        let mut v = self.source.vector(len, false);
        for _ in 0..64 {
            if v != avoid {
                break;
            }
            v = self.source.vector(len, false);
        }
        v
    }

    /// Challenge vectors sent to the prover as one message.
    pub fn send(&mut self, tag: u8, lens: &[usize], nonzero: bool) -> Step<Vec<DenseVector>> {
        let payload: Vec<DenseVector> = lens.iter().map(|&l| self.source.vector(l, nonzero)).collect();
        self.deliver(tag, payload)
    }

    /// A single challenge vector, different from `avoid`, sent to the prover.
    pub fn send_avoiding(&mut self, tag: u8, avoid: &[Scalar]) -> Step<DenseVector> {
        let v = self.secret_avoiding(avoid.len(), avoid);
        Ok(self.deliver(tag, vec![v])?.pop().expect("one vector"))
    }

    fn deliver(&mut self, tag: u8, payload: Vec<DenseVector>) -> Step<Vec<DenseVector>> {
        let message = Message { direction: Direction::VerifierToProver, tag, payload };
        self.prover.observe(&message)?;
        let payload = message.payload.clone();
        self.append(message);
        Ok(payload)
    }

    /// Records a probabilistic equality test `lhs == rhs`.
    pub fn test(&mut self, lhs: Scalar, rhs: Scalar, check_id: &str, location: &[usize]) -> Step<()> {
        self.test_weighted(lhs, rhs, 1, check_id, location)
    }

    /// A test whose false-accept probability is `weight / |S|` (e.g. a
    /// degree-`weight` polynomial identity checked at one random point).
    pub fn test_weighted(
        &mut self,
        lhs: Scalar,
        rhs: Scalar,
        weight: u64,
        check_id: &str,
        location: &[usize],
    ) -> Step<()> {
        self.ledger.tests += weight;
        self.ledger.verifier.field_ops += 1;
        if lhs != rhs {
            return reject(check_id, location);
        }
        Ok(())
    }

    /// A deterministic check, such as vector equality.
    pub fn require(&mut self, ok: bool, comparisons: u64, check_id: &str, location: &[usize]) -> Step<()> {
        self.ledger.verifier.field_ops += comparisons;
        if !ok {
            return reject(check_id, location);
        }
        Ok(())
    }

    /// Counted dot product on the verifier's account.
    pub fn dot(&mut self, u: &[Scalar], v: &[Scalar]) -> Step<Scalar> {
        let f = self.field();
        Ok(dot(&f, u, v, &mut self.ledger.verifier)?)
    }

    /// Counted operator application on the verifier's account.
    pub fn apply(&mut self, op: &Operator<'_>, v: &[Scalar]) -> Step<DenseVector> {
        Ok(op.apply(v, &mut self.ledger.verifier)?)
    }

    pub fn outcome(&self, result: Step<()>) -> Result<VerifierOutcome, Error> {
        match result {
            Ok(()) => Ok(VerifierOutcome::Accept { soundness_error_bound: soundness_bound(self.ledger.tests, &self.spec) }),
            Err(Halt::Reject(r)) => Ok(VerifierOutcome::Reject(r)),
            Err(Halt::Error(e)) => Err(e),
        }
    }
}
