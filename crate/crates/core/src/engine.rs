//! Transcripts, challenge derivation, cost ledgers and verifier outcomes.

use std::fmt;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::field::{Field, FieldSpec, Scalar};

pub const MAGIC: &[u8; 4] = b"KCT1";
const DOMAIN: &[u8] = b"kcert/fiat-shamir/v1";

/// Operation counters for one role.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RoleCost {
    pub field_ops: u64,
    /// Products `A v`.
    pub matvecs: u64,
    /// Products `u^T A`.
    pub vecmats: u64,
}

impl RoleCost {
    /// Total number of products with the matrix in either orientation.
    pub fn applications(&self) -> u64 {
        self.matvecs + self.vecmats
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CostLedger {
    pub prover: RoleCost,
    pub verifier: RoleCost,
    pub comm_field_elements: u64,
    /// Number of maximal runs of consecutive prover messages.
    pub rounds: u64,
    /// Probabilistic dot-product tests run by the verifier.
    pub tests: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    ProverToVerifier,
    VerifierToProver,
}

impl Direction {
    fn byte(self) -> u8 {
        match self {
            Direction::ProverToVerifier => 0x01,
            Direction::VerifierToProver => 0x02,
        }
    }

    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0x01 => Some(Direction::ProverToVerifier),
            0x02 => Some(Direction::VerifierToProver),
            _ => None,
        }
    }
}

/// One transcript entry. The payload is a list of scalar vectors; a single
/// scalar is a vector of length one and a polynomial is its coefficient list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub direction: Direction,
    pub tag: u8,
    pub payload: Vec<Vec<Scalar>>,
}

impl Message {
    pub fn scalar_count(&self) -> u64 {
        self.payload.iter().map(|v| v.len() as u64).sum()
    }

    fn payload_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 8 * (self.payload.len() + self.scalar_count() as usize));
        out.extend_from_slice(&(self.payload.len() as u64).to_le_bytes());
        for v in &self.payload {
            out.extend_from_slice(&(v.len() as u64).to_le_bytes());
            for s in v {
                out.extend_from_slice(&s.to_le_bytes());
            }
        }
        out
    }

    pub fn encode(&self) -> Vec<u8> {
        let payload = self.payload_bytes();
        let mut out = Vec::with_capacity(10 + payload.len());
        out.push(self.direction.byte());
        out.push(self.tag);
        out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&payload);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Header {
    pub tag: u8,
    pub modulus: u64,
    pub dim: u64,
    pub params: Vec<u64>,
}

impl Header {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(25 + 8 * self.params.len());
        out.push(self.tag);
        out.extend_from_slice(&self.modulus.to_le_bytes());
        out.extend_from_slice(&self.dim.to_le_bytes());
        out.extend_from_slice(&(self.params.len() as u64).to_le_bytes());
        for p in &self.params {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }
}

/// Append-only message log with a canonical byte encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub header: Header,
    pub messages: Vec<Message>,
}

impl Transcript {
    pub fn new(header: Header) -> Self {
        Transcript { header, messages: Vec::new() }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.extend_from_slice(&self.header.encode());
        for m in &self.messages {
            out.extend_from_slice(&m.encode());
        }
        out
    }

    /// Round index of every message: a new round starts with each prover
    /// message that follows a verifier message (or opens the transcript).
    pub fn round_indices(&self) -> Vec<u64> {
        let mut round = 0;
        let mut prev = None;
        self.messages
            .iter()
            .map(|m| {
                if m.direction == Direction::ProverToVerifier && prev != Some(Direction::ProverToVerifier) {
                    round += 1;
                }
                prev = Some(m.direction);
                round
            })
            .collect()
    }

    /// Parses and validates a transcript; every scalar must be canonical
    /// for the modulus named in the header.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::MalformedTranscript("bad magic".into()));
        }
        let tag = r.byte()?;
        let modulus = r.word()?;
        let field = Field::new(modulus)
            .map_err(|e| Error::MalformedTranscript(format!("header modulus: {e}")))?;
        let dim = r.word()?;
        let count = r.word()?;
        if count > r.remaining() as u64 / 8 {
            return Err(Error::MalformedTranscript("parameter count exceeds input".into()));
        }
        let params = (0..count).map(|_| r.word()).collect::<Result<_, _>>()?;
        let header = Header { tag, modulus, dim, params };

        let mut messages = Vec::new();
        while r.remaining() > 0 {
            let direction = Direction::from_byte(r.byte()?)
                .ok_or_else(|| Error::MalformedTranscript(format!("bad direction at byte {}", r.pos - 1)))?;
            let tag = r.byte()?;
            let len = r.word()?;
            if len > r.remaining() as u64 {
                return Err(Error::MalformedTranscript("payload length exceeds input".into()));
            }
            let body = r.take(len as usize)?;
            let payload = parse_payload(body, &field)?;
            messages.push(Message { direction, tag, payload });
        }
        Ok(Transcript { header, messages })
    }
}

fn parse_payload(body: &[u8], field: &Field) -> Result<Vec<Vec<Scalar>>, Error> {
    let mut r = Reader { bytes: body, pos: 0 };
    let nvec = r.word()?;
    if nvec > r.remaining() as u64 / 8 {
        return Err(Error::MalformedTranscript("vector count exceeds payload".into()));
    }
    let mut out = Vec::with_capacity(nvec as usize);
    for _ in 0..nvec {
        let len = r.word()?;
        if len > r.remaining() as u64 / 8 {
            return Err(Error::MalformedTranscript("vector length exceeds payload".into()));
        }
        let v = (0..len)
            .map(|_| {
                let w = r.word()?;
                field
                    .canonical(w)
                    .ok_or_else(|| Error::MalformedTranscript(format!("scalar {w} not reduced")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(v);
    }
    if r.remaining() != 0 {
        return Err(Error::MalformedTranscript("trailing bytes in payload".into()));
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, k: usize) -> Result<&'a [u8], Error> {
        if self.remaining() < k {
            return Err(Error::MalformedTranscript("unexpected end of input".into()));
        }
        let s = &self.bytes[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn byte(&mut self) -> Result<u8, Error> {
        Ok(self.take(1)?[0])
    }

    fn word(&mut self) -> Result<u64, Error> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

/// How challenges are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Verifier-private PRNG; nothing the prover sends influences it.
    Interactive { seed: u64 },
    /// Challenges hash the matrix, header and every message so far.
    FiatShamir,
}

pub struct ChallengeSource {
    sample_set: u64,
    inner: SourceState,
}

enum SourceState {
    Interactive(Box<ChaCha20Rng>),
    FiatShamir { state: Sha256, counter: u64 },
}

impl ChallengeSource {
    pub fn interactive(spec: &FieldSpec, seed: u64) -> Self {
        ChallengeSource {
            sample_set: spec.sample_set_size(),
            inner: SourceState::Interactive(Box::new(ChaCha20Rng::seed_from_u64(seed))),
        }
    }

    /// Starts a hash chain bound to `context` (matrix and header bytes).
    pub fn fiat_shamir(spec: &FieldSpec, context: &[&[u8]]) -> Self {
        let mut state = Sha256::new();
        state.update(DOMAIN);
        for part in context {
            state.update((part.len() as u64).to_le_bytes());
            state.update(part);
        }
        ChallengeSource { sample_set: spec.sample_set_size(), inner: SourceState::FiatShamir { state, counter: 0 } }
    }

    pub fn is_fiat_shamir(&self) -> bool {
        matches!(self.inner, SourceState::FiatShamir { .. })
    }

    /// Feeds a message into the hash chain; no effect in interactive mode.
    pub fn absorb(&mut self, bytes: &[u8]) {
        if let SourceState::FiatShamir { state, .. } = &mut self.inner {
            state.update(bytes);
        }
    }

    /// `len` elements of the sample set `{0, ..., |S| - 1}`, optionally
    /// excluding zero.
    pub fn vector(&mut self, len: usize, nonzero: bool) -> Vec<Scalar> {
        let m = self.sample_set;
        assert!(!nonzero || m > 1, "a one-element sample set has no nonzero element");
        match &mut self.inner {
            SourceState::Interactive(rng) => (0..len)
                .map(|_| {
                    let lo = u64::from(nonzero);
                    Scalar::from_canonical(rng.gen_range(lo..m))
                })
                .collect(),
            SourceState::FiatShamir { state, counter } => {
                let mut base = state.clone();
                base.update(b"challenge");
                base.update(counter.to_le_bytes());
                let base: [u8; 32] = base.finalize().into();
                *counter += 1;
                let mut stream = HashStream { base, block: 0, buf: [0; 32], used: 32 };
                let limit = u64::MAX - u64::MAX % m;
                let mut out = Vec::with_capacity(len);
                while out.len() < len {
                    let w = stream.next_word();
                    if w >= limit {
                        continue;
                    }
                    let v = w % m;
                    if nonzero && v == 0 {
                        continue;
                    }
                    out.push(Scalar::from_canonical(v));
                }
                out
            }
        }
    }

    pub fn scalar(&mut self) -> Scalar {
        self.vector(1, false)[0]
    }
}

struct HashStream {
    base: [u8; 32],
    block: u64,
    buf: [u8; 32],
    used: usize,
}

impl HashStream {
    fn next_word(&mut self) -> u64 {
        if self.used == 32 {
            let mut h = Sha256::new();
            h.update(self.base);
            h.update(self.block.to_le_bytes());
            self.buf = h.finalize().into();
            self.block += 1;
            self.used = 0;
        }
        let w = u64::from_le_bytes(self.buf[self.used..self.used + 8].try_into().expect("8 bytes"));
        self.used += 8;
        w
    }
}

/// `min(1, tests / |S|)`
pub fn soundness_bound(tests: u64, spec: &FieldSpec) -> Ratio<u64> {
    let s = spec.sample_set_size();
    if tests >= s {
        Ratio::from_integer(1)
    } else {
        Ratio::new(tests, s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub check_id: String,
    pub location: Vec<usize>,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "check {:?} failed at {:?}", self.check_id, self.location)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifierOutcome {
    Accept { soundness_error_bound: Ratio<u64> },
    Reject(Rejection),
}

impl VerifierOutcome {
    pub fn is_accept(&self) -> bool {
        matches!(self, VerifierOutcome::Accept { .. })
    }

    pub fn rejection(&self) -> Option<&Rejection> {
        match self {
            VerifierOutcome::Reject(r) => Some(r),
            VerifierOutcome::Accept { .. } => None,
        }
    }
}

impl fmt::Display for VerifierOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifierOutcome::Accept { soundness_error_bound } => {
                write!(f, "ACCEPT (soundness error <= {soundness_error_bound})")
            }
            VerifierOutcome::Reject(r) => write!(f, "REJECT ({r})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn sample_transcript() -> Transcript {
        let mut t = Transcript::new(Header { tag: 1, modulus: 101, dim: 3, params: vec![4, 2] });
        t.messages.push(Message {
            direction: Direction::VerifierToProver,
            tag: 0x41,
            payload: vec![vec![Scalar::from_canonical(3); 3]],
        });
        t.messages.push(Message {
            direction: Direction::ProverToVerifier,
            tag: 0x21,
            payload: vec![vec![Scalar::ONE, Scalar::ZERO], vec![]],
        });
        t
    }

    #[test]
    fn serialization_is_canonical_and_round_trips() {
        let t = sample_transcript();
        assert_eq!(t.to_bytes(), t.to_bytes());
        assert_eq!(Transcript::from_bytes(&t.to_bytes()).unwrap(), t);
        assert_eq!(t.round_indices(), vec![0, 1]);
    }

    #[test]
    fn parsing_rejects_damage() {
        let bytes = sample_transcript().to_bytes();
        assert!(Transcript::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(Transcript::from_bytes(&bad).is_err());
        // magic 4, header 41, message prefix 10, vector count 8, length 8
        let first_scalar = 4 + 41 + 10 + 8 + 8;
        assert_eq!(bytes[first_scalar], 3);
        let mut big = bytes.clone();
        big[first_scalar + 1] = 1;
        assert!(Transcript::from_bytes(&big).is_err());
    }

    #[test]
    fn fiat_shamir_is_deterministic_and_sensitive() {
        let s = spec(101);
        let mut a = ChallengeSource::fiat_shamir(&s, &[b"ctx"]);
        let mut b = ChallengeSource::fiat_shamir(&s, &[b"ctx"]);
        a.absorb(b"commitment");
        b.absorb(b"commitment");
        assert_eq!(a.vector(16, false), b.vector(16, false));
        assert_eq!(a.vector(0, false), Vec::<Scalar>::new());

        let mut c = ChallengeSource::fiat_shamir(&s, &[b"ctx"]);
        c.absorb(b"commitmenu");
        let mut d = ChallengeSource::fiat_shamir(&s, &[b"ctx"]);
        d.absorb(b"commitment");
        assert_ne!(c.vector(16, false), d.vector(16, false));
    }

    #[test]
    fn challenges_stay_in_the_sample_set() {
        let s = FieldSpec::new(crate::field::MERSENNE_61).unwrap().with_sample_set(1000).unwrap();
        let mut fs = ChallengeSource::fiat_shamir(&s, &[]);
        let mut it = ChallengeSource::interactive(&s, 7);
        for src in [&mut fs, &mut it] {
            let v = src.vector(10_000, false);
            assert!(v.iter().all(|x| x.value() < 1000));
            assert!(src.vector(1000, true).iter().all(|x| !x.is_zero()));
        }
        let one = spec(101).with_sample_set(1).unwrap();
        assert!(ChallengeSource::interactive(&one, 3).vector(50, false).iter().all(|x| x.is_zero()));
        assert!(ChallengeSource::fiat_shamir(&one, &[]).vector(50, false).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn interactive_seed_reproduces() {
        let s = spec(101);
        let a = ChallengeSource::interactive(&s, 42).scalar();
        assert_eq!(a, ChallengeSource::interactive(&s, 42).scalar());
    }

    fn chi_square_p_value_ok(counts: &[u64], total: u64) -> bool {
        // df = 100; the 0.999 quantile of chi-square(100) is about 149.4
        let k = counts.len() as f64;
        let expected = total as f64 / k;
        let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        stat < 149.45
    }

    #[test]
    fn draws_are_uniform() {
        let s = spec(101);
        for mut src in [ChallengeSource::interactive(&s, 5), ChallengeSource::fiat_shamir(&s, &[b"u"])] {
            let mut counts = vec![0u64; 101];
            for x in src.vector(100_000, false) {
                counts[x.value() as usize] += 1;
            }
            assert!(chi_square_p_value_ok(&counts, 100_000), "{counts:?}");
        }
    }

    #[test]
    fn soundness_bound_examples() {
        let s = spec(101);
        assert_eq!(soundness_bound(0, &s), Ratio::from_integer(0));
        assert_eq!(soundness_bound(1, &s), Ratio::new(1, 101));
        assert_eq!(soundness_bound(200, &s), Ratio::from_integer(1));
    }
}
