//! Bypass recoding with mergers that are not in the table yet.

use crate::{Label, LabelGroup, Merger};

#[inline]
pub(crate) fn recode_label(label: Label, pending: &[Merger]) -> Label {
    pending
        .iter()
        .find(|m| m.larger == label)
        .map_or(label, |m| m.smaller)
}

/// Replaces every label equal to a pending merger's larger side with its smaller side.
/// Both mergers apply at once; after normalisation their larger labels differ.
pub fn recode_with_pending(g: LabelGroup, pending: &[Merger]) -> LabelGroup {
    if pending.is_empty() {
        return g;
    }
    g.map(|l| recode_label(l, pending))
}
