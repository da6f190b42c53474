use rand::seq::index::sample;

use super::config::{Mode, Protocol, ProtocolConfig};
use super::cver::{cver_accept_probability, cver_report, place_traps};
use super::database::CrpDatabase;
use super::prover::{HonestProver, HrvProver, LrvProver, LrvRound};
use super::transcript::{Channel, Ledger, MessageKind, Party, RoundRecord, Transcript, VerificationResult};
use crate::equality::{fidelity_sq, sample_with_probability, TestKind};
use crate::error::{Error, Result};
use crate::qpuf::{qgen, DeviceDescriptor, QPufDevice, TransitHook};
use crate::seed::{SeedStream, SimRng};

/// Exact-mode verdicts accept when the acceptance probability is this close
/// to 1.
pub const EXACT_ACCEPT_TOL: f64 = 1e-10;

const DEVICE: u64 = 1;
const DATABASE: u64 = 2;
const RUN: u64 = 3;

/// The verifier's state after setup.
#[derive(Clone, Debug)]
pub struct Verifier {
    protocol: Protocol,
    cfg: ProtocolConfig,
    seed: SeedStream,
    database: CrpDatabase,
    device: DeviceDescriptor,
    setup_queries: u64,
    transit_queries: u64,
}

impl Verifier {
    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.cfg
    }

    pub fn database(&self) -> &CrpDatabase {
        &self.database
    }

    pub fn setup_queries(&self) -> u64 {
        self.setup_queries
    }

    /// Stream for the identification phase of this session.
    pub fn run_rng(&self) -> SimRng {
        self.seed.child(RUN).rng()
    }
}

/// Setup output: the verifier and the device about to be handed over.
pub struct Setup {
    pub verifier: Verifier,
    pub device: QPufDevice,
}

impl Setup {
    /// Lets `f` use the device during transit with the configured window.
    pub fn transit<T>(&mut self, f: impl FnOnce(&mut TransitHook<'_>) -> T) -> T {
        let window = self.verifier.cfg.transit_window();
        let mut hook = TransitHook::new(&mut self.device, window);
        let out = f(&mut hook);
        self.verifier.transit_queries += hook.used();
        out
    }
}

/// Builds the device and a database of `K` records with `M` copies each.
pub fn hrv_setup(cfg: &ProtocolConfig, seed: SeedStream) -> Result<Setup> {
    setup(Protocol::HrvSwap, cfg, seed)
}

/// Like [`hrv_setup`] but also stores a trap response per record.
pub fn lrv_setup(cfg: &ProtocolConfig, seed: SeedStream) -> Result<Setup> {
    setup(Protocol::Lrv, cfg, seed)
}

pub fn setup(protocol: Protocol, cfg: &ProtocolConfig, seed: SeedStream) -> Result<Setup> {
    cfg.validate(protocol)?;
    let dim = cfg.dim()?;
    let mut device = qgen(dim, seed.child(DEVICE)).with_budget(cfg.device_budget);
    let with_traps = protocol == Protocol::Lrv;
    let database = CrpDatabase::build(&mut device, cfg.k, cfg.copies, with_traps, seed.child(DATABASE))?;
    Ok(Setup {
        verifier: Verifier {
            protocol,
            cfg: cfg.clone(),
            seed,
            database,
            device: device.descriptor(),
            setup_queries: device.query_count(),
            transit_queries: 0,
        },
        device,
    })
}

fn new_transcript(v: &Verifier, protocol: Protocol) -> Transcript {
    Transcript {
        protocol,
        config: v.cfg.clone(),
        seed: v.seed.seed(),
        device: v.device.clone(),
        ledger: Ledger { setup_queries: v.setup_queries, transit_queries: v.transit_queries, ..Ledger::default() },
        messages: Vec::new(),
    }
}

/// High-resource identification.
///
/// `N` distinct records are drawn uniformly. With [`Protocol::HrvSwap`] each
/// challenge is sent `M` times and every answer is SWAP-tested against one
/// stored copy; with [`Protocol::HrvGswap`] each challenge is sent once and
/// GSWAP-tested against all `M` copies. The verifier accepts iff every test
/// accepts.
pub fn hrv_run(
    verifier: &mut Verifier,
    variant: Protocol,
    prover: &mut dyn HrvProver,
    rng: &mut SimRng,
) -> Result<VerificationResult> {
    if variant == Protocol::Lrv {
        return Err(Error::InvalidConfig("hrv_run needs an hrv variant".into()));
    }
    let cfg = verifier.cfg.clone();
    cfg.validate(variant)?;
    let mut transcript = new_transcript(verifier, variant);
    let chosen = sample(rng, verifier.database.len(), cfg.rounds).into_vec();
    let (kind, sends, per_test) = match variant {
        Protocol::HrvSwap => (TestKind::Swap, cfg.copies, 1),
        _ => (TestKind::Gswap { m: cfg.copies }, 1, cfg.copies),
    };
    let start_queries = prover.queries();
    let mut per_round = Vec::new();
    let mut accept_probability = 1.0;
    let mut all_accept = true;
    for &record in &chosen {
        for repetition in 0..sends {
            let round = per_round.len();
            let challenge = verifier.database.record(record).challenge.clone();
            transcript.push(Party::Verifier, Channel::Quantum, MessageKind::Challenge, Some(round), Some(record));
            let response = prover.respond(&challenge, rng)?;
            transcript.push(Party::Prover, Channel::Quantum, MessageKind::Response, Some(round), Some(record));
            let f2 = fidelity_sq(response.as_state_ref(), &verifier.database.record(record).response)?;
            let p = kind.accept_from_fidelity_sq(f2);
            let outcome = match cfg.mode {
                Mode::Exact => {
                    accept_probability *= p;
                    None
                }
                Mode::Sampled => {
                    verifier.database.take_response(record, per_test)?;
                    transcript.ledger.copies_consumed += u64::from(per_test);
                    let o = sample_with_probability(p, rng);
                    all_accept &= o.accept;
                    Some(o)
                }
            };
            per_round.push(RoundRecord {
                round,
                record,
                repetition,
                b: None,
                fidelity_sq: Some(f2),
                accept_probability: Some(p),
                outcome,
            });
        }
    }
    transcript.ledger.prover_queries = prover.queries() - start_queries;
    let (accepted, accept_probability) = match cfg.mode {
        Mode::Exact => (accept_probability >= 1.0 - EXACT_ACCEPT_TOL, Some(accept_probability)),
        Mode::Sampled => (all_accept, None),
    };
    Ok(VerificationResult {
        accepted,
        accept_probability,
        per_round,
        placement: None,
        outcome_string: None,
        cver: None,
        transcript,
    })
}

/// Low-resource identification.
///
/// `N` distinct records are drawn and `pN` rounds are marked to carry the
/// valid response; the rest carry the trap. The prover answers with one bit
/// per round and the verifier applies the classical verdict.
pub fn lrv_run(verifier: &mut Verifier, prover: &mut dyn LrvProver, rng: &mut SimRng) -> Result<VerificationResult> {
    let cfg = verifier.cfg.clone();
    cfg.validate(Protocol::Lrv)?;
    let mut transcript = new_transcript(verifier, Protocol::Lrv);
    let chosen = sample(rng, verifier.database.len(), cfg.rounds).into_vec();
    let placement = place_traps(cfg.rounds, cfg.p, rng)?;
    let mut rounds = Vec::with_capacity(cfg.rounds);
    for (i, &record) in chosen.iter().enumerate() {
        let rec = verifier.database.record(record);
        let reference = if placement.is_valid_round(i) {
            rec.response.clone()
        } else {
            rec.trap_response.clone().ok_or(Error::CopiesExhausted { record })?
        };
        rounds.push(LrvRound { challenge: rec.challenge.clone(), reference });
        transcript.push(Party::Verifier, Channel::Quantum, MessageKind::ChallengeWithReference, Some(i), Some(record));
    }
    let start_queries = prover.queries();
    let round_record = |i: usize, p0: Option<f64>, bit: Option<u8>| RoundRecord {
        round: i,
        record: chosen[i],
        repetition: 0,
        b: Some(placement.marks()[i]),
        fidelity_sq: None,
        accept_probability: p0,
        outcome: bit.map(|b| crate::equality::TestOutcome::from_accept(b == 0)),
    };
    let mut result = match cfg.mode {
        Mode::Sampled => {
            for (i, &record) in chosen.iter().enumerate() {
                if placement.is_valid_round(i) {
                    verifier.database.take_response(record, 1)?;
                } else {
                    verifier.database.take_trap(record)?;
                }
                transcript.ledger.copies_consumed += 1;
            }
            let s = prover.respond(&rounds, rng)?;
            if s.len() != cfg.rounds {
                return Err(Error::DimensionMismatch { expected: cfg.rounds, actual: s.len() });
            }
            transcript.push(Party::Prover, Channel::Classical, MessageKind::OutcomeString, None, None);
            let report = cver_report(&s, &placement, cfg.tau, cfg.kappa);
            let per_round = (0..cfg.rounds).map(|i| round_record(i, None, Some(s.bits()[i]))).collect();
            VerificationResult {
                accepted: report.accepted,
                accept_probability: None,
                per_round,
                placement: Some(placement.clone()),
                outcome_string: Some(s),
                cver: Some(report),
                transcript,
            }
        }
        Mode::Exact => {
            let zeros = prover
                .zero_probabilities(&rounds)?
                .ok_or_else(|| Error::Precondition("a prover with per-round probabilities for exact mode".into()))?;
            transcript.push(Party::Prover, Channel::Classical, MessageKind::OutcomeString, None, None);
            let ones: Vec<f64> = zeros.iter().map(|z| 1.0 - z).collect();
            let p = cver_accept_probability(&ones, &placement, cfg.tau, cfg.kappa);
            let per_round = (0..cfg.rounds).map(|i| round_record(i, Some(zeros[i]), None)).collect();
            VerificationResult {
                accepted: p >= 1.0 - EXACT_ACCEPT_TOL,
                accept_probability: Some(p),
                per_round,
                placement: Some(placement.clone()),
                outcome_string: None,
                cver: None,
                transcript,
            }
        }
    };
    result.transcript.ledger.prover_queries = prover.queries() - start_queries;
    Ok(result)
}

/// Setup plus one run with the honest device holder as prover.
pub fn run_honest(protocol: Protocol, cfg: &ProtocolConfig, seed: SeedStream) -> Result<VerificationResult> {
    let Setup { mut verifier, mut device } = setup(protocol, cfg, seed)?;
    let mut rng = verifier.run_rng();
    let mut prover = HonestProver::new(&mut device);
    match protocol {
        Protocol::Lrv => lrv_run(&mut verifier, &mut prover, &mut rng),
        _ => hrv_run(&mut verifier, protocol, &mut prover, &mut rng),
    }
}

/// Seed of trial `index` under a root seed.
pub fn trial_seed(root: u64, index: u64) -> SeedStream {
    SeedStream::new(root).child(index)
}
