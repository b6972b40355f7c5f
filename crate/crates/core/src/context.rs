//! Sliding previous-row window and left label for each incoming group.

use crate::recode::recode_label;
use crate::{Label, LabelGroup, Merger, PixelGroup};

/// The labels a group needs: L5..L0 from the row above, G on the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NeighbourContext {
    /// L5 (column 4g-1) through L0 (column 4g+4).
    pub prev_row: [Label; 6],
    /// G, the label of column 4g-1 in the current row.
    pub left: Label,
    pub pixels: [bool; 4],
    pub row: usize,
    pub group: usize,
    pub last_in_row: bool,
}

/// Previous-row groups at the current position and one to the right, as read
/// from the delay line through the equivalence table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PreviousRow {
    pub here: LabelGroup,
    pub ahead: LabelGroup,
}

#[derive(Debug, Clone)]
pub struct ContextState {
    groups_per_row: usize,
    row: usize,
    group: usize,
    window: [Label; 6],
    left: Label,
    shifts: u64,
}

impl ContextState {
    pub fn new(groups_per_row: usize) -> Self {
        Self {
            groups_per_row,
            row: 0,
            group: 0,
            window: [0; 6],
            left: 0,
            shifts: 0,
        }
    }

    pub fn row(&self) -> usize {
        self.row
    }

    pub fn group(&self) -> usize {
        self.group
    }

    pub fn window(&self) -> [Label; 6] {
        self.window
    }

    pub fn shifts(&self) -> u64 {
        self.shifts
    }

    /// Position of the group `step_valid` will be called with next.
    pub fn is_last_in_row(&self) -> bool {
        self.group + 1 == self.groups_per_row
    }

    /// Shifts the window by one group and builds the context for `input`.
    pub fn step_valid(
        &mut self,
        input: &PixelGroup,
        above: PreviousRow,
        pending: &[Merger],
    ) -> NeighbourContext {
        let first_row = self.row == 0;
        let first = self.group == 0;
        let last = self.is_last_in_row();
        let rc = |l: Label| recode_label(l, pending);

        let mut w = [0; 6];
        if !first_row {
            if !first {
                w[0] = rc(self.window[4]);
            }
            for i in 0..4 {
                w[i + 1] = rc(above.here.labels[i]);
            }
            if !last {
                w[5] = rc(above.ahead.labels[0]);
            }
        }
        let left = if first { 0 } else { rc(self.left) };

        let ctx = NeighbourContext {
            prev_row: w,
            left,
            pixels: input.pixels,
            row: self.row,
            group: self.group,
            last_in_row: last,
        };
        self.window = w;
        self.left = left;
        self.shifts += 1;
        if last {
            self.row += 1;
            self.group = 0;
        } else {
            self.group += 1;
        }
        ctx
    }

    /// Stores the label that becomes G for the next group.
    pub fn set_left(&mut self, label: Label) {
        self.left = label;
    }

    /// Substitutes a resolved chain entry into the held labels without shifting.
    pub fn step_chain_recode(&mut self, m: Merger) {
        let sub = |l: &mut Label| {
            if *l == m.larger {
                *l = m.smaller;
            }
        };
        self.window.iter_mut().for_each(sub);
        sub(&mut self.left);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lit() -> PixelGroup {
        PixelGroup {
            pixels: [true; 4],
            valid: true,
            ..Default::default()
        }
    }

    fn above(here: [Label; 4], ahead: [Label; 4]) -> PreviousRow {
        PreviousRow {
            here: LabelGroup::new(here),
            ahead: LabelGroup::new(ahead),
        }
    }

    #[test]
    fn first_row_is_zero() {
        let mut s = ContextState::new(3);
        let c = s.step_valid(&lit(), above([5; 4], [6; 4]), &[]);
        assert_eq!(c.prev_row, [0; 6]);
        assert_eq!(c.left, 0);
    }

    #[test]
    fn pending_merger_recodes_window() {
        let mut s = ContextState::new(2);
        s.step_valid(&lit(), PreviousRow::default(), &[]);
        s.step_valid(&lit(), PreviousRow::default(), &[]);
        let c = s.step_valid(
            &lit(),
            above([4, 0, 4, 2], [3, 0, 0, 0]),
            &[Merger::new(4, 1)],
        );
        assert_eq!(c.prev_row, [0, 1, 0, 1, 2, 3]);
    }

    #[test]
    fn chain_recode_in_place() {
        let mut s = ContextState::new(2);
        s.window = [0, 7, 5, 7, 0, 9];
        s.step_chain_recode(Merger::new(7, 5));
        assert_eq!(s.window, [0, 5, 5, 5, 0, 9]);
        s.step_chain_recode(Merger::new(7, 5));
        assert_eq!(s.window, [0, 5, 5, 5, 0, 9]);
        s.step_chain_recode(Merger::new(8, 2));
        assert_eq!(s.window, [0, 5, 5, 5, 0, 9]);
    }

    proptest! {
        #[test]
        fn edge_zeroing(gpr in 1usize..6, rows in 1usize..4, seed in any::<u64>()) {
            let mut s = ContextState::new(gpr);
            let mut x = seed | 1;
            let mut next = || { x ^= x << 13; x ^= x >> 7; x ^= x << 17; (x % 9) as Label };
            for _ in 0..rows * gpr {
                let a = above([next(), next(), next(), next()], [next(), 0, 0, 0]);
                s.set_left(next());
                let c = s.step_valid(&lit(), a, &[]);
                if c.row == 0 {
                    prop_assert_eq!(c.prev_row, [0; 6]);
                }
                if c.group == 0 {
                    prop_assert_eq!(c.prev_row[0], 0);
                    prop_assert_eq!(c.left, 0);
                }
                if c.group + 1 == gpr {
                    prop_assert_eq!(c.prev_row[5], 0);
                }
            }
            prop_assert_eq!(s.shifts(), (rows * gpr) as u64);
        }
    }
}
