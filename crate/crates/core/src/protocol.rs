//! Top-level sessions: header encoding, running a protocol against a
//! prover, and replaying a stored Fiat-Shamir transcript.

use std::fmt;

use crate::applications::{certify_charpoly, certify_det, certify_minpoly, SeqProtocol};
use crate::engine::{ChallengeSource, CostLedger, Direction, Header, Message, Mode, RoleCost, Transcript, VerifierOutcome};
use crate::error::Error;
use crate::field::{FieldSpec, Scalar};
use crate::logdepth::{certify_combination, certify_power, single_t, verify_power_single, PowerVariant};
use crate::poly::DensePolynomial;
use crate::session::{reject, tag, Context, Query, Responder, Step};
use crate::sparse::{DenseVector, Operator, SparseMatrix};

/// Largest sequence length or power accepted from a header.
pub const MAX_DEGREE: u64 = 1 << 20;
pub const MAX_LEVELS: usize = 8;
pub const MAX_PROJECTIONS: usize = 16;

/// A complete protocol instance. Automatic parameters are resolved before
/// the header is written, so a header always determines the verifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    Checkpoint { delta: usize, k: usize },
    Dense { delta: usize, k: usize },
    KLevel { delta: usize, levels: usize },
    PowerLog { d: usize },
    PowerSingle { d: usize, t: u32 },
    Sequence { delta: usize, variant: PowerVariant },
    Combination { d: usize, variant: PowerVariant },
    MinPoly { seq: SeqProtocol, projections: usize },
    Det { seq: SeqProtocol, projections: usize },
    CharPoly { seq: SeqProtocol, projections: usize },
}

impl Protocol {
    pub fn tag(&self) -> u8 {
        match self {
            Protocol::Checkpoint { .. } => 0x01,
            Protocol::Dense { .. } => 0x02,
            Protocol::KLevel { .. } => 0x03,
            Protocol::PowerLog { .. } => 0x04,
            Protocol::PowerSingle { .. } => 0x05,
            Protocol::Sequence { .. } => 0x06,
            Protocol::Combination { .. } => 0x07,
            Protocol::MinPoly { .. } => 0x10,
            Protocol::Det { .. } => 0x11,
            Protocol::CharPoly { .. } => 0x12,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Checkpoint { .. } => "checkpoint",
            Protocol::Dense { .. } => "dense",
            Protocol::KLevel { .. } => "klevel",
            Protocol::PowerLog { .. } => "power-log",
            Protocol::PowerSingle { .. } => "power-single",
            Protocol::Sequence { variant: PowerVariant::Log, .. } => "seq-log",
            Protocol::Sequence { variant: PowerVariant::Single, .. } => "seq-single",
            Protocol::Combination { .. } => "combination",
            Protocol::MinPoly { .. } => "minpoly",
            Protocol::Det { .. } => "det",
            Protocol::CharPoly { .. } => "charpoly",
        }
    }

    pub fn params(&self) -> Vec<u64> {
        let u = |x: usize| x as u64;
        match *self {
            Protocol::Checkpoint { delta, k } | Protocol::Dense { delta, k } => vec![u(delta), u(k)],
            Protocol::KLevel { delta, levels } => vec![u(delta), u(levels)],
            Protocol::PowerLog { d } => vec![u(d)],
            Protocol::PowerSingle { d, t } => vec![u(d), u64::from(t)],
            Protocol::Sequence { delta, variant } => vec![u(delta), variant.code()],
            Protocol::Combination { d, variant } => vec![u(d), variant.code()],
            Protocol::MinPoly { seq, projections }
            | Protocol::Det { seq, projections }
            | Protocol::CharPoly { seq, projections } => {
                let (kind, param) = encode_seq(seq);
                vec![kind, param, u(projections)]
            }
        }
    }

    pub fn from_header(tag: u8, params: &[u64]) -> Result<Self, Error> {
        let bad = || Error::MalformedTranscript(format!("bad parameters {params:?} for protocol tag {tag:#04x}"));
        let word = |i: usize| -> Result<usize, Error> {
            params.get(i).map(|&x| x as usize).filter(|&x| x as u64 <= MAX_DEGREE).ok_or_else(bad)
        };
        let variant = |i: usize| params.get(i).and_then(|&c| PowerVariant::from_code(c)).ok_or_else(bad);
        let expected = match tag {
            0x04 => 1,
            0x10..=0x12 => 3,
            _ => 2,
        };
        if params.len() != expected {
            return Err(bad());
        }
        let p = match tag {
            0x01 => Protocol::Checkpoint { delta: word(0)?, k: word(1)? },
            0x02 => Protocol::Dense { delta: word(0)?, k: word(1)? },
            0x03 => Protocol::KLevel { delta: word(0)?, levels: word(1)? },
            0x04 => Protocol::PowerLog { d: word(0)? },
            0x05 => Protocol::PowerSingle { d: word(0)?, t: u32::try_from(word(1)?).map_err(|_| bad())? },
            0x06 => Protocol::Sequence { delta: word(0)?, variant: variant(1)? },
            0x07 => Protocol::Combination { d: word(0)?, variant: variant(1)? },
            0x10..=0x12 => {
                let seq = decode_seq(params[0], params[1]).ok_or_else(bad)?;
                let projections = word(2)?;
                match tag {
                    0x10 => Protocol::MinPoly { seq, projections },
                    0x11 => Protocol::Det { seq, projections },
                    _ => Protocol::CharPoly { seq, projections },
                }
            }
            _ => return Err(Error::MalformedTranscript(format!("unknown protocol tag {tag:#04x}"))),
        };
        Ok(p)
    }

    /// Checks parameter ranges against a matrix of dimension `n`.
    pub fn validate(&self, n: usize) -> Result<(), Error> {
        let err = |m: String| Err(Error::InvalidParameter(m));
        let max = MAX_DEGREE as usize;
        if n == 0 {
            return err("the matrix must have at least one row".into());
        }
        match *self {
            Protocol::Checkpoint { delta, k } | Protocol::Dense { delta, k } => {
                if delta == 0 || delta > max {
                    return err(format!("delta must be in 1..={max}, got {delta}"));
                }
                let hi = if matches!(self, Protocol::Checkpoint { .. }) { n.min(delta) } else { delta };
                if k == 0 || k > hi {
                    return err(format!("K must be in 1..={hi}, got {k}"));
                }
            }
            Protocol::KLevel { delta, levels } => {
                if delta == 0 || delta > max {
                    return err(format!("delta must be in 1..={max}, got {delta}"));
                }
                if !(2..=MAX_LEVELS).contains(&levels) {
                    return err(format!("levels must be in 2..={MAX_LEVELS}, got {levels}"));
                }
            }
            Protocol::PowerLog { d } | Protocol::Combination { d, .. } => {
                let lo = usize::from(matches!(self, Protocol::PowerLog { .. }));
                if d < lo || d > max {
                    return err(format!("d must be in {lo}..={max}, got {d}"));
                }
            }
            Protocol::PowerSingle { d, t } => {
                if d == 0 || d > max {
                    return err(format!("d must be in 1..={max}, got {d}"));
                }
                if t == 0 || t > single_t(max) || (1usize << t) < d {
                    return err(format!("t={t} must satisfy 1 <= t and 2^t >= d"));
                }
            }
            Protocol::Sequence { delta, .. } => {
                if delta == 0 || delta > max {
                    return err(format!("delta must be in 1..={max}, got {delta}"));
                }
            }
            Protocol::MinPoly { seq, projections }
            | Protocol::Det { seq, projections }
            | Protocol::CharPoly { seq, projections } => {
                if projections == 0 || projections > MAX_PROJECTIONS {
                    return err(format!("projections must be in 1..={MAX_PROJECTIONS}, got {projections}"));
                }
                if 2 * n as u64 > MAX_DEGREE {
                    return err(format!("dimension {n} too large for a 2n-term sequence"));
                }
                match seq {
                    SeqProtocol::KLevel { levels } if !(2..=MAX_LEVELS).contains(&levels) => {
                        return err(format!("levels must be in 2..={MAX_LEVELS}, got {levels}"));
                    }
                    SeqProtocol::Checkpoint { k: Some(k) } if k == 0 || k > n => {
                        return err(format!("K must be in 1..={n}, got {k}"));
                    }
                    SeqProtocol::Dense { k: Some(k) } if k == 0 || k > 2 * n => {
                        return err(format!("K must be in 1..={}, got {k}", 2 * n));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}", self.name(), self.params())
    }
}

fn encode_seq(seq: SeqProtocol) -> (u64, u64) {
    let k = |k: Option<usize>| k.map_or(0, |k| k as u64);
    match seq {
        SeqProtocol::Checkpoint { k: kk } => (0x01, k(kk)),
        SeqProtocol::Dense { k: kk } => (0x02, k(kk)),
        SeqProtocol::KLevel { levels } => (0x03, levels as u64),
        SeqProtocol::Sequence(v) => (0x06, v.code()),
    }
}

fn decode_seq(kind: u64, param: u64) -> Option<SeqProtocol> {
    let k = |p: u64| if p == 0 { None } else { usize::try_from(p).ok() };
    match kind {
        0x01 => Some(SeqProtocol::Checkpoint { k: k(param) }),
        0x02 => Some(SeqProtocol::Dense { k: k(param) }),
        0x03 => usize::try_from(param).ok().map(|levels| SeqProtocol::KLevel { levels }),
        0x06 => PowerVariant::from_code(param).map(SeqProtocol::Sequence),
        _ => None,
    }
}

/// What a successful run certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certified {
    Sequence(Vec<Scalar>),
    Vector(DenseVector),
    Polynomial(DensePolynomial),
    Scalar(Scalar),
}

impl fmt::Display for Certified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Scalar]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        match self {
            Certified::Sequence(s) if s.len() > 8 => {
                write!(f, "sequence of {} terms: {} ...", s.len(), join(&s[..8]))
            }
            Certified::Sequence(s) => write!(f, "sequence {}", join(s)),
            Certified::Vector(v) => write!(f, "vector {}", join(v)),
            Certified::Polynomial(p) => write!(f, "polynomial {}", join(p.coeffs())),
            Certified::Scalar(x) => write!(f, "value {x}"),
        }
    }
}

pub struct RunOutput {
    pub transcript: Transcript,
    pub ledger: CostLedger,
    pub outcome: VerifierOutcome,
    pub result: Option<Certified>,
}

/// Builds the header for `protocol`; `nonce` and the sample-set size are
/// appended after the protocol parameters.
pub fn header(matrix: &SparseMatrix, spec: &FieldSpec, protocol: &Protocol, nonce: u64) -> Header {
    let mut params = protocol.params();
    params.push(nonce);
    params.push(spec.sample_set_size());
    Header { tag: protocol.tag(), modulus: spec.field().modulus(), dim: matrix.dim() as u64, params }
}

/// Runs `protocol` on `matrix` with the verifier in `mode` against `prover`.
pub fn run(
    matrix: &SparseMatrix,
    spec: FieldSpec,
    protocol: Protocol,
    mode: Mode,
    nonce: u64,
    prover: &mut dyn Responder,
) -> Result<RunOutput, Error> {
    if spec.field() != matrix.field() {
        return Err(Error::InvalidParameter(format!(
            "matrix is over GF({}), session over GF({})",
            matrix.field().modulus(),
            spec.field().modulus()
        )));
    }
    protocol.validate(matrix.dim())?;
    if spec.sample_set_size() < 2 {
        return Err(Error::InvalidParameter("the sample set needs at least two elements".into()));
    }
    let header = header(matrix, &spec, &protocol, nonce);
    let source = match mode {
        Mode::Interactive { seed } => ChallengeSource::interactive(&spec, seed),
        Mode::FiatShamir => ChallengeSource::fiat_shamir(&spec, &[&matrix.canonical_bytes(), &header.encode()]),
    };
    let mut ctx = Context::new(spec, header, source, prover);
    let step = drive(&mut ctx, matrix, protocol);
    let (status, result) = match step {
        Ok(r) => (Ok(()), Some(r)),
        Err(h) => (Err(h), None),
    };
    let outcome = ctx.outcome(status)?;
    let (transcript, ledger) = ctx.into_parts();
    Ok(RunOutput { transcript, ledger, outcome, result })
}

fn drive(ctx: &mut Context<'_>, matrix: &SparseMatrix, protocol: Protocol) -> Step<Certified> {
    let n = matrix.dim();
    let op = Operator::new(matrix);
    let seq_top = |ctx: &mut Context<'_>, seq: SeqProtocol, delta: usize| -> Step<Certified> {
        let mut uv = ctx.send(tag::PROJECTIONS, &[n, n], false)?;
        let v0 = uv.pop().expect("two");
        let u = uv.pop().expect("two");
        Ok(Certified::Sequence(seq.certify(ctx, op, &u, &v0, delta)?))
    };
    match protocol {
        Protocol::Checkpoint { delta, k } => seq_top(ctx, SeqProtocol::Checkpoint { k: Some(k) }, delta),
        Protocol::Dense { delta, k } => seq_top(ctx, SeqProtocol::Dense { k: Some(k) }, delta),
        Protocol::KLevel { delta, levels } => seq_top(ctx, SeqProtocol::KLevel { levels }, delta),
        Protocol::Sequence { delta, variant } => seq_top(ctx, SeqProtocol::Sequence(variant), delta),
        Protocol::PowerLog { d } => {
            let v = ctx.send(tag::INPUT, &[n], false)?.remove(0);
            Ok(Certified::Vector(certify_power(ctx, PowerVariant::Log, op, &v, d, 0)?))
        }
        Protocol::PowerSingle { d, t } => {
            let v = ctx.send(tag::INPUT, &[n], false)?.remove(0);
            let mut c = ctx.ask(Query::PowerSingle { op, v: &v, d, t }, &[(3, n)])?;
            verify_power_single(ctx, op, &v, d, t, &c[0], &c[1], &c[2], 0)?;
            Ok(Certified::Vector(c.swap_remove(1)))
        }
        Protocol::Combination { d, variant } => {
            let mut ur = ctx.send(tag::INPUT, &[n, d + 1], false)?;
            let r = ur.pop().expect("two");
            let u = ur.pop().expect("two");
            Ok(Certified::Vector(certify_combination(ctx, variant, op, &u, &r, d, 0)?))
        }
        Protocol::MinPoly { seq, projections } => {
            Ok(Certified::Polynomial(certify_minpoly(ctx, op, seq, projections)?))
        }
        Protocol::Det { seq, projections } => Ok(Certified::Scalar(certify_det(ctx, matrix, seq, projections)?)),
        Protocol::CharPoly { seq, projections } => {
            Ok(Certified::Polynomial(certify_charpoly(ctx, matrix, seq, projections)?))
        }
    }
}

/// Plays back the prover messages of a stored transcript and checks that
/// every recorded challenge is the one the verifier derives.
pub struct ReplayResponder {
    messages: Vec<Message>,
    cursor: usize,
}

impl ReplayResponder {
    pub fn new(transcript: &Transcript) -> Self {
        ReplayResponder { messages: transcript.messages.clone(), cursor: 0 }
    }

    pub fn finished(&self) -> bool {
        self.cursor == self.messages.len()
    }

    fn next(&mut self, direction: Direction, tag: u8) -> Result<&Message, Error> {
        let m = self.messages.get(self.cursor).ok_or_else(|| {
            Error::MalformedTranscript(format!("transcript ends before message {} (tag {tag:#04x})", self.cursor))
        })?;
        if m.direction != direction || m.tag != tag {
            return Err(Error::MalformedTranscript(format!(
                "message {} has tag {:#04x}, expected {tag:#04x}",
                self.cursor, m.tag
            )));
        }
        self.cursor += 1;
        Ok(m)
    }
}

impl Responder for ReplayResponder {
    fn respond(&mut self, query: &Query<'_>, _cost: &mut RoleCost) -> Result<Vec<Vec<Scalar>>, Error> {
        Ok(self.next(Direction::ProverToVerifier, query.tag())?.payload.clone())
    }

    fn observe(&mut self, message: &Message) -> Step<()> {
        let at = self.cursor;
        let recorded = self.next(Direction::VerifierToProver, message.tag)?;
        if recorded.payload != message.payload {
            return reject("challenge-binding", &[at]);
        }
        Ok(())
    }
}

/// Re-runs the verifier over a serialized Fiat-Shamir transcript.
pub fn verify_transcript(matrix: &SparseMatrix, bytes: &[u8]) -> Result<RunOutput, Error> {
    let transcript = Transcript::from_bytes(bytes)?;
    let h = &transcript.header;
    if h.modulus != matrix.field().modulus() || h.dim != matrix.dim() as u64 {
        return Err(Error::MalformedTranscript(format!(
            "transcript is for n={} over GF({}), matrix is n={} over GF({})",
            h.dim,
            h.modulus,
            matrix.dim(),
            matrix.field().modulus()
        )));
    }
    if h.params.len() < 2 {
        return Err(Error::MalformedTranscript("header lacks nonce and sample set".into()));
    }
    let (proto_params, tail) = h.params.split_at(h.params.len() - 2);
    let protocol = Protocol::from_header(h.tag, proto_params)?;
    let (nonce, sample_set) = (tail[0], tail[1]);
    let spec = FieldSpec::from_field(matrix.field())
        .with_sample_set(sample_set)
        .map_err(|e| Error::MalformedTranscript(format!("sample set: {e}")))?;
    protocol.validate(matrix.dim()).map_err(|e| Error::MalformedTranscript(e.to_string()))?;

    let mut replay = ReplayResponder::new(&transcript);
    let out = run(matrix, spec, protocol, Mode::FiatShamir, nonce, &mut replay)?;
    if out.outcome.is_accept() {
        if !replay.finished() {
            return Err(Error::MalformedTranscript("trailing messages after the verifier finished".into()));
        }
        if out.transcript.to_bytes() != bytes {
            return Err(Error::MalformedTranscript("transcript is not in canonical form".into()));
        }
    }
    Ok(out)
}

/// Command-line style protocol options; unset values take defaults
/// derived from the matrix.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub delta: Option<usize>,
    pub k: Option<usize>,
    pub levels: Option<usize>,
    pub variant: Option<String>,
    pub projections: Option<usize>,
}

fn parse_variant(v: Option<&str>) -> Result<PowerVariant, Error> {
    match v {
        None | Some("single") => Ok(PowerVariant::Single),
        Some("log") => Ok(PowerVariant::Log),
        Some(other) => Err(Error::InvalidParameter(format!("unknown power variant {other:?} (log|single)"))),
    }
}

fn split_levels(name: &str) -> Result<(&str, Option<usize>), Error> {
    match name.split_once(':') {
        Some((base, k)) => {
            let k = k.parse().map_err(|_| Error::InvalidParameter(format!("bad level count in {name:?}")))?;
            Ok((base, Some(k)))
        }
        None => Ok((name, None)),
    }
}

/// Resolves a protocol name (`checkpoint`, `dense`, `klevel[:k]`,
/// `seq-log`, `seq-single`, `power-log`, `power-single`, `combination`,
/// `minpoly`, `det`, `charpoly`) against `matrix`.
pub fn resolve(name: &str, opts: &Options, matrix: &SparseMatrix) -> Result<Protocol, Error> {
    let n = matrix.dim();
    let mu = matrix.mu();
    let delta = opts.delta.unwrap_or(2 * n);
    let (base, suffix) = split_levels(name)?;
    let levels = suffix.or(opts.levels).unwrap_or(2);
    let variant = opts.variant.as_deref();
    let protocol = match base {
        "checkpoint" => Protocol::Checkpoint {
            delta,
            k: opts.k.unwrap_or_else(|| crate::checkpoint::choose_k(n as u64, delta as u64, mu)),
        },
        "dense" => {
            Protocol::Dense { delta, k: opts.k.unwrap_or_else(|| crate::recursive::choose_k_dense(delta as u64)) }
        }
        "klevel" => Protocol::KLevel { delta, levels },
        "seq-log" => Protocol::Sequence { delta, variant: PowerVariant::Log },
        "seq-single" => Protocol::Sequence { delta, variant: PowerVariant::Single },
        "sequence" => Protocol::Sequence { delta, variant: parse_variant(variant)? },
        "power-log" => Protocol::PowerLog { d: delta },
        "power-single" => Protocol::PowerSingle { d: delta, t: single_t(delta.max(1)) },
        "combination" => Protocol::Combination { d: delta, variant: parse_variant(variant)? },
        "minpoly" | "det" | "charpoly" => {
            let seq = match variant.map(split_levels).transpose()? {
                None => SeqProtocol::default(),
                Some(("checkpoint", _)) => SeqProtocol::Checkpoint { k: opts.k },
                Some(("dense", _)) => SeqProtocol::Dense { k: opts.k },
                Some(("klevel", k)) => SeqProtocol::KLevel { levels: k.or(opts.levels).unwrap_or(2) },
                Some((v, _)) => SeqProtocol::Sequence(parse_variant(Some(v))?),
            };
            let projections = opts.projections.unwrap_or(1);
            match base {
                "minpoly" => Protocol::MinPoly { seq, projections },
                "det" => Protocol::Det { seq, projections },
                _ => Protocol::CharPoly { seq, projections },
            }
        }
        _ => return Err(Error::InvalidParameter(format!("unknown protocol {name:?}"))),
    };
    protocol.validate(n)?;
    Ok(protocol)
}
