//! Turns a group's mergers into table writes and chain pushes.

use arrayvec::ArrayVec;

use crate::{Label, Merger};

/// Equivalence-table write: `t[address] = data`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableWrite {
    pub address: Label,
    pub data: Label,
}

/// Chain stack entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StackPush {
    pub larger: Label,
    pub smaller: Label,
}

impl From<Merger> for TableWrite {
    fn from(m: Merger) -> Self {
        Self {
            address: m.larger,
            data: m.smaller,
        }
    }
}

impl From<Merger> for StackPush {
    fn from(m: Merger) -> Self {
        Self {
            larger: m.larger,
            smaller: m.smaller,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    pub writes: ArrayVec<TableWrite, 2>,
    pub pushes: ArrayVec<StackPush, 2>,
    /// Pause cycles: the table takes one write per cycle.
    pub extra_cycles: u32,
}

pub fn schedule(mergers: &[Merger]) -> Schedule {
    debug_assert!(mergers.len() <= 2);
    let mut s = Schedule::default();
    for &m in mergers {
        s.writes.push(m.into());
        if m.chain {
            s.pushes.push(m.into());
        }
    }
    s.extra_cycles = u32::from(mergers.len() == 2);
    s
}
