use rand::Rng;

use crate::error::{Error, Result};
use crate::qpuf::QPufDevice;
use crate::qstate::{haar_random_state, orthogonal_state, Dimension, PureState};
use crate::seed::SeedStream;

/// One challenge with its stored response copies and optional trap.
#[derive(Clone, Debug)]
pub struct CrpRecord {
    /// The classical string the challenge was encoded from.
    pub label: u64,
    pub challenge: PureState,
    pub response: PureState,
    pub copies_remaining: u32,
    /// Response to a state orthogonal to the challenge.
    pub trap_response: Option<PureState>,
    pub trap_copies_remaining: u32,
}

/// The verifier's local store.
#[derive(Clone, Debug)]
pub struct CrpDatabase {
    records: Vec<CrpRecord>,
}

const LABELS: u64 = 1;
const CHALLENGES: u64 = 2;
const TRAPS: u64 = 3;

impl CrpDatabase {
    /// Encodes `k` random classical strings as Haar challenges and queries
    /// the device `copies` times per challenge (and per trap, if requested).
    pub fn build(device: &mut QPufDevice, k: usize, copies: u32, with_traps: bool, seed: SeedStream) -> Result<Self> {
        let dim = device.dim();
        let mut label_rng = seed.child(LABELS).rng();
        let mut records = Vec::with_capacity(k);
        for i in 0..k {
            // Label and challenge come from per-record substreams so the
            // database is a pure function of (seed, index).
            let label = label_rng.random_range(0..dim.size() as u64);
            let challenge = encode(dim, seed.child(CHALLENGES), i);
            let response = query_copies(device, &challenge, copies)?;
            let trap_response = if with_traps {
                let perp = orthogonal_state(&challenge, &mut seed.child(TRAPS).substream(i as u64))?;
                Some(query_copies(device, &perp, copies)?)
            } else {
                None
            };
            records.push(CrpRecord {
                label,
                challenge,
                response,
                copies_remaining: copies,
                trap_copies_remaining: if with_traps { copies } else { 0 },
                trap_response,
            });
        }
        Ok(Self { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[CrpRecord] {
        &self.records
    }

    pub fn record(&self, index: usize) -> &CrpRecord {
        &self.records[index]
    }

    /// Total response copies still stored (traps excluded).
    pub fn response_copies(&self) -> u64 {
        self.records.iter().map(|r| u64::from(r.copies_remaining)).sum()
    }

    /// Total stored copies including traps.
    pub fn total_copies(&self) -> u64 {
        self.records.iter().map(|r| u64::from(r.copies_remaining) + u64::from(r.trap_copies_remaining)).sum()
    }

    pub fn take_response(&mut self, index: usize, count: u32) -> Result<()> {
        let r = &mut self.records[index];
        if r.copies_remaining < count {
            return Err(Error::CopiesExhausted { record: index });
        }
        r.copies_remaining -= count;
        Ok(())
    }

    pub fn take_trap(&mut self, index: usize) -> Result<()> {
        let r = &mut self.records[index];
        if r.trap_response.is_none() || r.trap_copies_remaining == 0 {
            return Err(Error::CopiesExhausted { record: index });
        }
        r.trap_copies_remaining -= 1;
        Ok(())
    }
}

/// The Haar encoding of the `index`-th classical string.
pub fn encode(dim: Dimension, seed: SeedStream, index: usize) -> PureState {
    haar_random_state(dim, &mut seed.substream(index as u64))
}

// Copies of a pure response are identical, so one stored state plus a count
// represents them; the ledger is still charged once per copy.
fn query_copies(device: &mut QPufDevice, state: &PureState, copies: u32) -> Result<PureState> {
    device.qeval_repeated(state, copies.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpuf::{privileged, qgen};
    use crate::qstate::fidelity;

    #[test]
    fn database_bookkeeping() {
        let dim = Dimension::new(4).unwrap();
        let mut dev = qgen(dim, SeedStream::new(1));
        let db = CrpDatabase::build(&mut dev, 8, 4, false, SeedStream::new(2)).unwrap();
        assert_eq!(db.len(), 8);
        assert_eq!(db.response_copies(), 32);
        assert_eq!(dev.query_count(), 32);
        for r in db.records() {
            let f = fidelity(&privileged::true_response(&dev, &r.challenge), &r.response).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn traps_are_orthogonal_to_responses() {
        let dim = Dimension::new(3).unwrap();
        let mut dev = qgen(dim, SeedStream::new(3));
        let mut db = CrpDatabase::build(&mut dev, 5, 1, true, SeedStream::new(4)).unwrap();
        for r in db.records() {
            let trap = r.trap_response.as_ref().unwrap();
            assert!(fidelity(trap, &r.response).unwrap() < 1e-10);
        }
        db.take_trap(0).unwrap();
        assert!(matches!(db.take_trap(0), Err(Error::CopiesExhausted { record: 0 })));
        db.take_response(1, 1).unwrap();
        assert!(db.take_response(1, 1).is_err());
    }

    #[test]
    fn setup_respects_device_budget() {
        let dim = Dimension::new(2).unwrap();
        let mut dev = qgen(dim, SeedStream::new(5)).with_budget(Some(10));
        assert!(matches!(
            CrpDatabase::build(&mut dev, 4, 4, false, SeedStream::new(6)),
            Err(Error::BudgetExhausted { .. })
        ));
    }
}
