mod common;

use common::*;
use kcert::checkpoint::{choose_k, verifier_bound};
use kcert::engine::{Mode, RoleCost};
use kcert::field::Scalar;
use kcert::logdepth::PowerVariant;
use kcert::protocol::{run, Certified, Protocol, RunOutput};
use kcert::prover::{HonestProver, Tampered};
use kcert::recursive::level_schedule;
use kcert::sequence::seq_cost;
use kcert::session::{tag, Query, Responder};
use kcert::sparse::{Operator, SparseMatrix};
use proptest::prelude::*;

fn honest(a: &SparseMatrix, protocol: Protocol, seed: u64) -> RunOutput {
    let spec = kcert::field::FieldSpec::from_field(a.field());
    run(a, spec, protocol, Mode::Interactive { seed }, 0, &mut HonestProver).unwrap()
}

fn challenge_input(out: &RunOutput, tag: u8) -> Vec<Vec<u64>> {
    let m = out.transcript.messages.iter().find(|m| m.tag == tag).expect("input message");
    m.payload.iter().map(|v| vals(v)).collect()
}

fn every_protocol(n: usize) -> Vec<Protocol> {
    let delta = 2 * n;
    vec![
        Protocol::Checkpoint { delta, k: 3.min(n) },
        Protocol::Dense { delta, k: 4 },
        Protocol::KLevel { delta, levels: 2 },
        Protocol::KLevel { delta, levels: 3 },
        Protocol::PowerLog { d: 13 },
        Protocol::PowerSingle { d: 11, t: 4 },
        Protocol::Sequence { delta, variant: PowerVariant::Log },
        Protocol::Sequence { delta, variant: PowerVariant::Single },
        Protocol::Combination { d: 8, variant: PowerVariant::Single },
        Protocol::Combination { d: 5, variant: PowerVariant::Log },
    ]
}

#[test]
fn honest_runs_certify_the_oracle_values() {
    let f = field(P61);
    for seed in 0..4u64 {
        let n = 6 + seed as usize;
        let a = SparseMatrix::random(f, n, 3, seed).unwrap();
        let dense = to_dense(&a);
        for protocol in every_protocol(n) {
            let out = honest(&a, protocol, seed);
            assert!(out.outcome.is_accept(), "{protocol}: {}", out.outcome);
            match (protocol, out.result.clone().unwrap()) {
                (
                    Protocol::Checkpoint { delta, .. }
                    | Protocol::Dense { delta, .. }
                    | Protocol::KLevel { delta, .. }
                    | Protocol::Sequence { delta, .. },
                    Certified::Sequence(s),
                ) => {
                    let uv = challenge_input(&out, tag::PROJECTIONS);
                    assert_eq!(vals(&s), sequence(&dense, &uv[0], &uv[1], delta, P61), "{protocol}");
                }
                (Protocol::PowerLog { d } | Protocol::PowerSingle { d, .. }, Certified::Vector(z)) => {
                    let v = &challenge_input(&out, tag::INPUT)[0];
                    assert_eq!(vals(&z), power(&dense, v, d, P61), "{protocol}");
                }
                (Protocol::Combination { .. }, Certified::Vector(t)) => {
                    let ur = challenge_input(&out, tag::INPUT);
                    assert_eq!(vals(&t), combination(&dense, &ur[0], &ur[1], P61), "{protocol}");
                }
                (p, r) => panic!("unexpected result {r} for {p}"),
            }
        }
    }
}

#[test]
fn fiat_shamir_runs_accept() {
    let a = SparseMatrix::random(field(P61), 10, 2, 7).unwrap();
    for protocol in every_protocol(10) {
        let spec = kcert::field::FieldSpec::from_field(a.field());
        let out = run(&a, spec, protocol, Mode::FiatShamir, 1, &mut HonestProver).unwrap();
        assert!(out.outcome.is_accept(), "{protocol}: {}", out.outcome);
    }
}

#[test]
fn power_log_d13_rounds_and_matvecs() {
    let a = SparseMatrix::random(field(P61), 8, 3, 2).unwrap();
    let out = honest(&a, Protocol::PowerLog { d: 13 }, 4);
    assert!(out.outcome.is_accept());
    assert_eq!(out.ledger.rounds, 4);
    assert!(out.ledger.verifier.matvecs + out.ledger.verifier.vecmats <= 5);
    assert!(out.ledger.comm_field_elements <= 3 * 8 * 4 + 8);
}

#[test]
fn power_single_uses_one_product() {
    let a = SparseMatrix::random(field(P61), 8, 3, 3).unwrap();
    let out = honest(&a, Protocol::PowerSingle { d: 11, t: 4 }, 5);
    assert!(out.outcome.is_accept());
    assert_eq!(out.ledger.verifier.applications(), 1);
    let out = honest(&a, Protocol::PowerSingle { d: 2, t: 1 }, 5);
    assert!(out.outcome.is_accept());
}

#[test]
fn power_single_base_checks_z_against_z1() {
    let a = SparseMatrix::random(field(101), 4, 2, 3).unwrap();
    let spec = spec(101);
    // vector 1 of the response is Z; at d = 2 it must equal Z_1
    let mut bad = Tampered::new(tag::POWER_SINGLE, 0, 1, 0, Scalar::ONE);
    let out = run(&a, spec, Protocol::PowerSingle { d: 2, t: 1 }, Mode::Interactive { seed: 1 }, 0, &mut bad).unwrap();
    let r = out.outcome.rejection().expect("rejected");
    assert_eq!((r.check_id.as_str(), r.location.as_slice()), ("power-single", &[0usize, 2][..]));
}

#[test]
fn sequence_single_matvecs_are_logarithmic() {
    let n = 64;
    let a = SparseMatrix::random(field(P61), n, 4, 11).unwrap();
    let out = honest(&a, Protocol::Sequence { delta: 2 * n, variant: PowerVariant::Single }, 1);
    assert!(out.outcome.is_accept());
    let levels = (2.0 * n as f64).log2().ceil() as u64;
    assert!(out.ledger.verifier.applications() <= levels + 2, "{:?}", out.ledger.verifier);
}

#[test]
fn prover_costs_stay_within_fixed_multiples() {
    let n = 64;
    let a = SparseMatrix::random(field(P61), n, 4, 12).unwrap();
    let seq = seq_cost(n as u64, a.mu()) as f64;
    for (variant, limit) in [(PowerVariant::Log, 5.5), (PowerVariant::Single, 7.5)] {
        let out = honest(&a, Protocol::Sequence { delta: 2 * n, variant }, 2);
        let ratio = out.ledger.prover.field_ops as f64 / seq;
        assert!(ratio <= limit, "{variant:?}: {ratio}");
    }
}

#[test]
fn checkpoint_commitments_match_powers() {
    let n = 8;
    let a = SparseMatrix::random(field(P61), n, 3, 9).unwrap();
    let dense = to_dense(&a);
    let out = honest(&a, Protocol::Checkpoint { delta: 16, k: 3 }, 3);
    assert!(out.outcome.is_accept());
    let v0 = &challenge_input(&out, tag::PROJECTIONS)[1];
    let cps = out.transcript.messages.iter().find(|m| m.tag == tag::CHECKPOINTS).unwrap();
    for (j, w) in cps.payload[1..].iter().enumerate() {
        assert_eq!(vals(w), power(&dense, v0, 3 * (j + 1), P61));
    }
}

#[test]
fn checkpoint_verifier_stays_under_its_bound() {
    for n in [16usize, 48] {
        let a = SparseMatrix::random(field(P61), n, 3, n as u64).unwrap();
        let delta = 2 * n;
        let k = choose_k(n as u64, delta as u64, a.mu());
        let out = honest(&a, Protocol::Checkpoint { delta, k }, 1);
        let bound = verifier_bound(n as u64, delta as u64, a.mu(), k as u64);
        let ops = out.ledger.verifier.field_ops;
        assert!(ops <= bound && 2 * ops >= bound, "n={n}: {ops} vs {bound}");
    }
}

#[test]
fn checkpoint_communication_is_exact() {
    // n per checkpoint, mK+1 sequence terms, plus the projections U and V0
    for (n, delta, k) in [(16usize, 32usize, 4usize), (16, 32, 5), (9, 7, 3), (12, 24, 12)] {
        let a = SparseMatrix::random(field(P61), n, 2, n as u64).unwrap();
        let out = honest(&a, Protocol::Checkpoint { delta, k }, 1);
        assert!(out.outcome.is_accept());
        let m = delta.div_ceil(k);
        assert_eq!(out.ledger.comm_field_elements as usize, n * m + m * k + 1 + 2 * n, "n={n} delta={delta} K={k}");
    }
}

#[test]
fn two_level_verifier_applies_the_matrix_at_most_four_times() {
    for n in [16usize, 64, 256] {
        let a = SparseMatrix::random(field(P61), n, 3, 3).unwrap();
        let out = honest(&a, Protocol::KLevel { delta: 2 * n, levels: 2 }, 2);
        assert!(out.outcome.is_accept());
        assert!(out.ledger.verifier.applications() <= 4, "n={n}");
    }
}

#[test]
fn power_certificate_communication_is_logarithmic() {
    let n = 8;
    let a = SparseMatrix::random(field(P61), n, 3, 11).unwrap();
    for d in 2..=64usize {
        let lg = d.next_power_of_two().trailing_zeros() as usize;
        let log = honest(&a, Protocol::PowerLog { d }, d as u64);
        let single = honest(&a, Protocol::PowerSingle { d, t: kcert::logdepth::single_t(d) }, d as u64);
        assert!(log.outcome.is_accept() && single.outcome.is_accept());
        // the input v and the claimed output message are not part of the certificate
        let cert = |out: &RunOutput| {
            let claim = out.transcript.messages[1].scalar_count();
            out.ledger.comm_field_elements as usize - n - claim as usize
        };
        let (log_comm, single_comm) = (cert(&log), cert(&single));
        assert!(log_comm <= 3 * n * lg, "log d={d}: {log_comm}");
        assert!(single_comm <= 4 * n * lg, "single d={d}: {single_comm}");
    }
}

#[test]
fn tampering_is_caught() {
    let n = 8;
    let a = SparseMatrix::random(field(P61), n, 3, 21).unwrap();
    let one = Scalar::ONE;
    let cases = [
        (Protocol::Checkpoint { delta: 16, k: 4 }, Tampered::new(tag::CHECKPOINTS, 0, 2, 1, one), "checkpoint"),
        (Protocol::Checkpoint { delta: 16, k: 4 }, Tampered::new(tag::CHECKPOINTS, 0, 0, 5, one), "sequence-block"),
        (Protocol::Dense { delta: 16, k: 4 }, Tampered::new(tag::KRYLOV_LIST, 0, 1, 0, one), "z-list"),
        (Protocol::PowerLog { d: 13 }, Tampered::new(tag::POWER_LOG, 0, 1, 0, one), "power-log"),
        (Protocol::PowerSingle { d: 11, t: 4 }, Tampered::new(tag::POWER_SINGLE, 0, 0, 0, one), "power-single"),
        (
            Protocol::Sequence { delta: 8, variant: PowerVariant::Single },
            Tampered::new(tag::SEQUENCE_CERT, 0, 2, 3, one),
            "seq",
        ),
        (
            Protocol::Combination { d: 8, variant: PowerVariant::Log },
            Tampered::new(tag::COMBINATION, 0, 0, 0, one),
            "combination",
        ),
    ];
    for (protocol, mut prover, check) in cases {
        let spec = kcert::field::FieldSpec::from_field(a.field());
        let out = run(&a, spec, protocol, Mode::Interactive { seed: 3 }, 0, &mut prover).unwrap();
        assert!(prover.fired(), "{protocol}");
        let r = out.outcome.rejection().unwrap_or_else(|| panic!("{protocol} accepted"));
        assert_eq!(r.check_id, check, "{protocol}");
    }
}

#[test]
fn klevel_strides_match_schedule() {
    let s = level_schedule(2, 64).unwrap();
    assert_eq!(s.nested, vec![8]);
    let a = SparseMatrix::random(field(P61), 64, 3, 5).unwrap();
    for levels in [2, 3, 4] {
        let out = honest(&a, Protocol::KLevel { delta: 128, levels }, 6);
        assert!(out.outcome.is_accept(), "k={levels}");
    }
}

#[test]
fn invalid_parameters_are_refused() {
    let a = SparseMatrix::identity(field(101), 4);
    let spec = spec(101);
    for protocol in [
        Protocol::Checkpoint { delta: 8, k: 0 },
        Protocol::Checkpoint { delta: 8, k: 5 },
        Protocol::PowerSingle { d: 5, t: 2 },
        Protocol::PowerLog { d: 0 },
        Protocol::KLevel { delta: 8, levels: 9 },
        Protocol::Sequence { delta: 0, variant: PowerVariant::Log },
    ] {
        assert!(run(&a, spec, protocol, Mode::FiatShamir, 0, &mut HonestProver).is_err(), "{protocol}");
    }
}

#[test]
fn honest_prover_power_claims_match_oracle() {
    let a = SparseMatrix::random(field(P61), 8, 3, 8).unwrap();
    let dense = to_dense(&a);
    let v: Vec<u64> = (1..=8).collect();
    let sv = scalars(&a.field(), &v);
    let mut c = RoleCost::default();
    let out = HonestProver.respond(&Query::PowerSingle { op: Operator::new(&a), v: &sv, d: 11, t: 4 }, &mut c).unwrap();
    assert_eq!(vals(&out[0]), power(&dense, &v, 16, P61));
    assert_eq!(vals(&out[1]), power(&dense, &v, 11, P61));
    assert_eq!(vals(&out[2]), power(&dense, &v, 8, P61));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn completeness_over_random_instances(
        n in 2usize..12,
        nnz in 1usize..4,
        seed in any::<u64>(),
        delta in 1usize..30,
        which in 0usize..6,
    ) {
        let a = SparseMatrix::random(field(1_000_003), n, nnz.min(n), seed).unwrap();
        let protocol = match which {
            0 => Protocol::Checkpoint { delta, k: 1 + seed as usize % n.min(delta) },
            1 => Protocol::Dense { delta, k: 1 + seed as usize % delta },
            2 => Protocol::KLevel { delta, levels: 2 + seed as usize % 3 },
            3 => Protocol::Sequence { delta, variant: PowerVariant::Log },
            4 => Protocol::PowerSingle { d: delta, t: kcert::logdepth::single_t(delta) + (seed % 2) as u32 },
            _ => Protocol::Combination { d: delta, variant: PowerVariant::Single },
        };
        let out = honest(&a, protocol, seed);
        prop_assert!(out.outcome.is_accept(), "{}: {}", protocol, out.outcome);
    }
}
