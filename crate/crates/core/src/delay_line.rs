//! One-row circular buffer of label groups.

use crate::LabelGroup;

#[derive(Debug, Clone)]
pub struct DelayLine {
    slots: Vec<LabelGroup>,
    cursor: usize,
}

impl DelayLine {
    /// `len` must be at least 1.
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "delay line needs at least one slot");
        Self {
            slots: vec![LabelGroup::zero(); len],
            cursor: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Read-first exchange: returns the slot at the cursor, stores `input`
    /// there and advances.
    pub fn exchange(&mut self, input: LabelGroup) -> LabelGroup {
        let out = std::mem::replace(&mut self.slots[self.cursor], input);
        self.cursor = (self.cursor + 1) % self.slots.len();
        out
    }

    /// Slot that `exchange` will return after `ahead` further calls.
    pub fn peek(&self, ahead: usize) -> LabelGroup {
        self.slots[(self.cursor + ahead) % self.slots.len()]
    }
}
