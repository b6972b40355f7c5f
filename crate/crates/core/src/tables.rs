//! Equivalence tables and the two-bank frame rotation.

use crate::merger::TableWrite;
use crate::{Error, Label, LabelGroup, Result};

/// Map from every label to an equal-or-smaller representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceTable {
    cells: Vec<Label>,
}

impl EquivalenceTable {
    /// Table with `2^bits` cells, each pointing at itself.
    pub fn identity(bits: u32) -> Self {
        Self {
            cells: (0..1u32 << bits).collect(),
        }
    }

    pub fn from_cells(cells: Vec<Label>) -> Self {
        Self { cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Label] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, label: Label) -> Label {
        self.cells[label as usize]
    }

    pub fn reset_identity(&mut self) {
        for (i, c) in self.cells.iter_mut().enumerate() {
            *c = i as Label;
        }
    }

    pub fn record_merger(&mut self, w: TableWrite) {
        debug_assert!(w.address > w.data, "table write must point downward: {w:?}");
        self.cells[w.address as usize] = w.data;
    }

    /// Chain drain write: the data side goes through the table, the address does not.
    pub fn resolve_chain_entry(&mut self, larger: Label, smaller: Label) {
        debug_assert!(larger > smaller);
        self.cells[larger as usize] = self.cells[smaller as usize];
    }

    pub fn recode_group(&self, g: LabelGroup) -> LabelGroup {
        g.map(|l| self.get(l))
    }

    /// In-place pass in ascending label order, `t[x] = t[t[x]]`.
    ///
    /// Cells only ever point downward, so by the time `x` is visited its target
    /// already holds a root and one pass compresses every path.
    pub fn final_recode(&mut self) {
        for x in 0..self.cells.len() {
            let t = self.cells[x] as usize;
            self.cells[x] = self.cells[t];
        }
    }

    /// First label where `t[t[x]] != t[x]`, if any.
    pub fn first_non_idempotent(&self) -> Option<Label> {
        (0..self.cells.len() as Label).find(|&x| self.get(self.get(x)) != self.get(x))
    }

    /// First label where `t[x] > x`, if any.
    pub fn first_upward(&self) -> Option<Label> {
        (0..self.cells.len() as Label).find(|&x| self.get(x) > x)
    }

    /// `(address, data)` pairs in ascending address order.
    pub fn entries(&self) -> impl Iterator<Item = (Label, Label)> + '_ {
        self.cells.iter().enumerate().map(|(a, &d)| (a as Label, d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BankPhase {
    Operating,
    FinalRecode,
    Initialising,
    Ready,
}

/// Two tables used alternately by successive frames. While one operates the
/// other is final-recoded and re-initialised, one cell per cycle each.
#[derive(Debug, Clone)]
pub struct BankPair {
    banks: [EquivalenceTable; 2],
    phase: [BankPhase; 2],
    remaining: [u64; 2],
    active: usize,
}

impl BankPair {
    pub fn new(bits: u32) -> Self {
        let t = EquivalenceTable::identity(bits);
        Self {
            banks: [t.clone(), t],
            phase: [BankPhase::Ready; 2],
            remaining: [0; 2],
            active: 1,
        }
    }

    pub fn active_index(&self) -> usize {
        self.active
    }

    pub fn phase(&self, bank: usize) -> BankPhase {
        self.phase[bank]
    }

    pub fn active(&self) -> &EquivalenceTable {
        &self.banks[self.active]
    }

    pub fn active_mut(&mut self) -> &mut EquivalenceTable {
        &mut self.banks[self.active]
    }

    /// Cycles to final-recode and re-initialise one bank.
    pub fn retire_cost(&self) -> u64 {
        2 * self.banks[0].len() as u64
    }

    /// Lets `cycles` pass for the standby bank.
    pub fn advance_standby(&mut self, mut cycles: u64) {
        let s = 1 - self.active;
        let size = self.banks[s].len() as u64;
        while cycles > 0 {
            match self.phase[s] {
                BankPhase::FinalRecode | BankPhase::Initialising => {
                    let step = cycles.min(self.remaining[s]);
                    cycles -= step;
                    self.remaining[s] -= step;
                    if self.remaining[s] == 0 {
                        if self.phase[s] == BankPhase::FinalRecode {
                            self.phase[s] = BankPhase::Initialising;
                            self.remaining[s] = size;
                        } else {
                            self.phase[s] = BankPhase::Ready;
                        }
                    }
                }
                BankPhase::Operating | BankPhase::Ready => break,
            }
        }
    }

    /// Frame start: the ready standby bank starts operating.
    pub fn swap(&mut self) -> Result<()> {
        let s = 1 - self.active;
        if self.phase[s] != BankPhase::Ready {
            let size = self.banks[s].len() as u64;
            let left = match self.phase[s] {
                BankPhase::FinalRecode => self.remaining[s] + size,
                _ => self.remaining[s],
            };
            return Err(Error::InterframeBudget {
                needed: self.retire_cost(),
                available: self.retire_cost() - left,
            });
        }
        self.active = s;
        self.phase[s] = BankPhase::Operating;
        Ok(())
    }

    /// Frame end: final-recodes the operating bank, returns the result and
    /// schedules the bank's re-initialisation.
    pub fn retire(&mut self) -> EquivalenceTable {
        let a = self.active;
        self.banks[a].final_recode();
        let finished = self.banks[a].clone();
        self.banks[a].reset_identity();
        self.phase[a] = BankPhase::FinalRecode;
        self.remaining[a] = self.banks[a].len() as u64;
        finished
    }

    /// Abandons the operating bank's content after a failed frame.
    pub fn discard_active(&mut self) {
        let a = self.active;
        self.banks[a].reset_identity();
        self.phase[a] = BankPhase::Ready;
        self.remaining[a] = 0;
        self.active = 1 - a;
        if self.phase[self.active] == BankPhase::Operating {
            self.phase[self.active] = BankPhase::Ready;
        }
    }
}
