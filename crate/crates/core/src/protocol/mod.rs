//! Identification protocols.
//!
//! Setup builds the device and the verifier's challenge-response database;
//! the device is then handed to the prover, optionally passing through an
//! adversary's bounded query window. The high-resource variants verify
//! returned quantum states directly. The low-resource variant sends
//! challenges together with either the valid response or a trap, and judges
//! only the prover's classical outcome string.

mod config;
mod cver;
mod database;
mod prover;
mod session;
mod transcript;

pub(crate) use config::integral;
pub use config::{Mode, Protocol, ProtocolConfig};
pub use cver::{
    count_within, cver, cver_accept_probability, cver_report, place_traps, poisson_binomial, CverReport, OutcomeString,
    TrapPlacement,
};
pub use database::{encode, CrpDatabase, CrpRecord};
pub use prover::{HonestProver, HrvProver, LrvProver, LrvRound, ResponseState};
pub use session::{
    hrv_run, hrv_setup, lrv_run, lrv_setup, run_honest, setup, trial_seed, Setup, Verifier, EXACT_ACCEPT_TOL,
};
pub use transcript::{Channel, Ledger, Message, MessageKind, Party, RoundRecord, Transcript, VerificationResult};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{haar_random_state, PureState};
    use crate::seed::{SeedStream, SimRng};

    fn cfg(protocol: Protocol, n: u32, k: usize, rounds: usize, copies: u32, mode: Mode) -> ProtocolConfig {
        ProtocolConfig { n, k, rounds, copies, mode, ..ProtocolConfig::defaults(protocol) }
    }

    struct HaarResponder;

    impl HrvProver for HaarResponder {
        fn respond(&mut self, challenge: &PureState, rng: &mut SimRng) -> crate::Result<ResponseState> {
            Ok(haar_random_state(challenge.dim(), rng).into())
        }
    }

    struct Fixed(OutcomeString);

    impl LrvProver for Fixed {
        fn respond(&mut self, _: &[LrvRound], _: &mut SimRng) -> crate::Result<OutcomeString> {
            Ok(self.0.clone())
        }
    }

    #[test]
    fn setup_bookkeeping() {
        let c = cfg(Protocol::HrvSwap, 4, 8, 4, 4, Mode::Sampled);
        let mut s = hrv_setup(&c, SeedStream::new(1)).unwrap();
        assert_eq!(s.verifier.database().len(), 8);
        assert_eq!(s.verifier.database().response_copies(), 32);
        let learned = s.transit(|hook| {
            assert_eq!(hook.window(), 40);
            hook.used()
        });
        assert_eq!(learned, 0);
        let mut zero = c.clone();
        zero.transit_window = Some(0);
        let mut s = hrv_setup(&zero, SeedStream::new(1)).unwrap();
        assert!(s.transit(|hook| hook.qeval(&PureState::basis(hook.dim(), 0))).is_err());
    }

    #[test]
    fn honest_exact_runs_accept() {
        for protocol in [Protocol::HrvSwap, Protocol::HrvGswap] {
            for n in 3..=4 {
                let c = cfg(protocol, n, 16, 8, 8, Mode::Exact);
                let r = run_honest(protocol, &c, SeedStream::new(u64::from(n))).unwrap();
                assert!(r.accepted);
                assert!((r.accept_probability.unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ledgers_match_message_and_copy_counts() {
        let (n_rounds, m) = (4usize, 3u32);
        for protocol in Protocol::ALL {
            let mut c = cfg(protocol, 4, 16, n_rounds, m, Mode::Sampled);
            if protocol == Protocol::Lrv {
                c.copies = 1;
            }
            let r = run_honest(protocol, &c, SeedStream::new(9)).unwrap();
            let l = &r.transcript.ledger;
            let nm = (n_rounds as u64) * u64::from(m);
            match protocol {
                Protocol::HrvSwap => {
                    assert_eq!(l.copies_consumed, nm);
                    assert_eq!(l.quantum_messages, 2 * nm as usize);
                    assert_eq!(l.classical_messages, 0);
                    assert_eq!(l.prover_queries, nm);
                }
                Protocol::HrvGswap => {
                    assert_eq!(l.copies_consumed, nm);
                    assert_eq!(l.quantum_messages, 2 * n_rounds);
                    assert_eq!(l.prover_queries, n_rounds as u64);
                }
                Protocol::Lrv => {
                    assert_eq!(l.copies_consumed, n_rounds as u64);
                    assert_eq!(l.quantum_messages, n_rounds);
                    assert_eq!(l.classical_messages, 1);
                }
            }
            assert!(r.accepted || protocol == Protocol::Lrv);
        }
    }

    #[test]
    fn challenges_are_distinct_records() {
        let c = cfg(Protocol::HrvSwap, 3, 16, 8, 2, Mode::Sampled);
        let r = run_honest(Protocol::HrvSwap, &c, SeedStream::new(3)).unwrap();
        let mut recs: Vec<usize> = r.per_round.iter().filter(|x| x.repetition == 0).map(|x| x.record).collect();
        recs.sort_unstable();
        recs.dedup();
        assert_eq!(recs.len(), 8);
    }

    #[test]
    fn copies_run_out() {
        let c = cfg(Protocol::HrvGswap, 3, 8, 8, 2, Mode::Sampled);
        let Setup { mut verifier, mut device } = hrv_setup(&c, SeedStream::new(4)).unwrap();
        let mut rng = verifier.run_rng();
        let mut prover = HonestProver::new(&mut device);
        hrv_run(&mut verifier, Protocol::HrvGswap, &mut prover, &mut rng).unwrap();
        assert!(matches!(
            hrv_run(&mut verifier, Protocol::HrvGswap, &mut prover, &mut rng),
            Err(crate::Error::CopiesExhausted { .. })
        ));
    }

    #[test]
    fn honest_lrv_valid_rounds_report_zero() {
        for mode in [Mode::Sampled, Mode::Exact] {
            let c = ProtocolConfig { rounds: 16, k: 16, tau: 4.0, mode, ..ProtocolConfig::defaults(Protocol::Lrv) };
            for seed in 0..20 {
                let r = run_honest(Protocol::Lrv, &c, SeedStream::new(seed)).unwrap();
                for round in r.per_round.iter().filter(|x| x.b == Some(1)) {
                    match mode {
                        Mode::Sampled => assert_eq!(round.outcome.unwrap().outcome_bit, 0),
                        Mode::Exact => assert!((round.accept_probability.unwrap() - 1.0).abs() < 1e-12),
                    }
                }
                for round in r.per_round.iter().filter(|x| x.b == Some(0)) {
                    if mode == Mode::Exact {
                        assert!((round.accept_probability.unwrap() - 0.5).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn lrv_all_zero_string_is_rejected() {
        for seed in 0..50 {
            let c = ProtocolConfig { rounds: 8, k: 8, tau: 1.0, ..ProtocolConfig::defaults(Protocol::Lrv) };
            let Setup { mut verifier, .. } = lrv_setup(&c, SeedStream::new(seed)).unwrap();
            let mut rng = verifier.run_rng();
            let r = lrv_run(&mut verifier, &mut Fixed(OutcomeString::zeros(8)), &mut rng).unwrap();
            assert!(!r.accepted);
        }
    }

    #[test]
    fn exact_mode_needs_probabilities() {
        let c = ProtocolConfig { mode: Mode::Exact, ..ProtocolConfig::defaults(Protocol::Lrv) };
        let Setup { mut verifier, .. } = lrv_setup(&c, SeedStream::new(1)).unwrap();
        let mut rng = verifier.run_rng();
        assert!(lrv_run(&mut verifier, &mut Fixed(OutcomeString::zeros(8)), &mut rng).is_err());
    }

    #[test]
    fn haar_responder_exact_probability() {
        // per test F^2 is small, so (1/2 + F^2/2)^(NM) is close to 2^-(NM)
        let c = cfg(Protocol::HrvSwap, 4, 4, 2, 3, Mode::Exact);
        let Setup { mut verifier, .. } = hrv_setup(&c, SeedStream::new(2)).unwrap();
        let mut rng = verifier.run_rng();
        let r = hrv_run(&mut verifier, Protocol::HrvSwap, &mut HaarResponder, &mut rng).unwrap();
        let direct: f64 = r.per_round.iter().map(|x| 0.5 + 0.5 * x.fidelity_sq.unwrap()).product();
        assert!((r.accept_probability.unwrap() - direct).abs() < 1e-15);
        assert!(!r.accepted);
    }

    #[test]
    fn runs_are_reproducible() {
        for protocol in Protocol::ALL {
            let c = ProtocolConfig::defaults(protocol);
            let a = run_honest(protocol, &c, SeedStream::new(5)).unwrap();
            let b = run_honest(protocol, &c, SeedStream::new(5)).unwrap();
            assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        }
    }
}
