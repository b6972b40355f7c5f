//! Per-row merger chains: the chain stack and the row's merge record.

use std::collections::HashMap;

use crate::merger::StackPush;
use crate::{Error, Label, Merger, Result};

/// Bounded store of chain entries, emptied at every end of line.
#[derive(Debug, Clone)]
pub struct ChainStack {
    entries: Vec<StackPush>,
    capacity: usize,
}

impl ChainStack {
    pub fn new(capacity: usize) -> Self {
        Self {
            entries: Vec::with_capacity(capacity),
            capacity,
        }
    }

    /// Two entries per group is the most one row can produce.
    pub fn for_row(groups_per_row: usize) -> Self {
        Self::new(2 * groups_per_row)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[StackPush] {
        &self.entries
    }

    pub fn push(&mut self, e: StackPush) -> Result<()> {
        if self.entries.len() >= self.capacity {
            return Err(Error::StackOverflow {
                capacity: self.capacity,
            });
        }
        self.entries.push(e);
        Ok(())
    }

    /// Pops every entry, top first, leaving the stack empty.
    ///
    /// An entry is pushed no later than the entry of the label it points to,
    /// so reading from the top resolves each target before its dependants.
    pub fn drain(&mut self) -> impl Iterator<Item = StackPush> + '_ {
        self.entries.drain(..).rev()
    }
}

/// What happened to labels during the current row.
///
/// Tracks which labels were merged away (their table cell now points at a
/// label that was a root when the row started) and, for every merge target,
/// the labels redirected onto it. When a target is itself merged later in the
/// row, those earlier cells hold a stale datum and must go through the chain.
#[derive(Debug, Clone)]
pub struct RowMemory {
    redirected: Vec<bool>,
    stacked: Vec<bool>,
    dependants: HashMap<Label, Vec<Label>>,
    touched: Vec<Label>,
}

impl RowMemory {
    pub fn new(bits: u32) -> Self {
        let size = 1usize << bits;
        Self {
            redirected: vec![false; size],
            stacked: vec![false; size],
            dependants: HashMap::new(),
            touched: Vec::new(),
        }
    }

    /// Label was merged away earlier in this row.
    #[inline]
    pub fn is_redirected(&self, label: Label) -> bool {
        self.redirected[label as usize]
    }

    pub fn has_dependants(&self, label: Label) -> bool {
        self.dependants.contains_key(&label)
    }

    /// Entries for labels merged into `target` this row that are not on the stack yet.
    pub fn take_dependants(&mut self, target: Label) -> Vec<StackPush> {
        let Some(children) = self.dependants.remove(&target) else {
            return Vec::new();
        };
        children
            .into_iter()
            .filter(|&c| !std::mem::replace(&mut self.stacked[c as usize], true))
            .map(|c| StackPush {
                larger: c,
                smaller: target,
            })
            .collect()
    }

    pub fn note_merger(&mut self, m: Merger) {
        let l = m.larger as usize;
        self.redirected[l] = true;
        self.stacked[l] |= m.chain;
        self.touched.push(m.larger);
        self.dependants.entry(m.smaller).or_default().push(m.larger);
    }

    /// Follows this row's redirections from `label` through `table`.
    #[inline]
    pub fn resolve(&self, table: &crate::EquivalenceTable, label: Label) -> Label {
        let mut l = table.get(label);
        while self.redirected[l as usize] {
            l = table.get(l);
        }
        l
    }

    pub fn clear(&mut self) {
        for l in self.touched.drain(..) {
            self.redirected[l as usize] = false;
            self.stacked[l as usize] = false;
        }
        self.dependants.clear();
    }
}
