//! Sequential label assignment for the four pixels of a group.

use arrayvec::ArrayVec;

use crate::chain::RowMemory;
use crate::recode::recode_label;
use crate::{Error, Label, LabelGroup, NeighbourContext, Result};

/// Two labels found to belong to one component. `larger` is redirected to `smaller`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Merger {
    pub larger: Label,
    pub smaller: Label,
    /// Route to the chain stack as well as the table.
    pub chain: bool,
}

impl Merger {
    pub fn new(larger: Label, smaller: Label) -> Self {
        debug_assert!(
            larger > smaller && smaller > 0,
            "bad merger {larger}->{smaller}"
        );
        Self {
            larger,
            smaller,
            chain: false,
        }
    }

    /// Orders two distinct labels into a merger.
    pub fn between(a: Label, b: Label) -> Self {
        Self::new(a.max(b), a.min(b))
    }

    pub fn chained(self) -> Self {
        Self {
            chain: true,
            ..self
        }
    }

    fn same_pair(&self, other: &Merger) -> bool {
        self.larger == other.larger && self.smaller == other.smaller
    }
}

/// Global per-frame label counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelCounter {
    value: Label,
    max: Label,
}

impl LabelCounter {
    pub fn new(bits: u32) -> Self {
        Self {
            value: 0,
            max: (1 << bits) - 1,
        }
    }

    pub fn reset(&mut self) {
        self.value = 0;
    }

    pub fn value(&self) -> Label {
        self.value
    }

    pub fn max(&self) -> Label {
        self.max
    }

    pub fn fresh(&mut self) -> Result<Label> {
        if self.value >= self.max {
            return Err(Error::LabelExhausted { max: self.max });
        }
        self.value += 1;
        Ok(self.value)
    }
}

/// Causal neighbourhood of one pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PixelNeighbours {
    pub upper_left: Label,
    pub up: Label,
    pub upper_right: Label,
    pub left: Label,
}

impl PixelNeighbours {
    fn distinct(&self) -> u8 {
        let mut seen: ArrayVec<Label, 4> = ArrayVec::new();
        for l in [self.upper_left, self.up, self.upper_right, self.left] {
            if l != 0 && !seen.contains(&l) {
                seen.push(l);
            }
        }
        seen.len() as u8
    }
}

fn join(a: Label, b: Label) -> (Label, Option<Merger>) {
    if a == b {
        (a, None)
    } else {
        (a.min(b), Some(Merger::between(a, b)))
    }
}

/// Labels one pixel. The pixel above wins outright since it touches every
/// other neighbour; the upper-right pixel is the only one that can bring a
/// second label in, so at most one merger comes out.
pub fn pixel_label(
    n: PixelNeighbours,
    pixel: bool,
    counter: &mut LabelCounter,
) -> Result<(Label, Option<Merger>)> {
    if !pixel {
        return Ok((0, None));
    }
    let out = if n.up != 0 {
        (n.up, None)
    } else if n.upper_right != 0 {
        if n.upper_left != 0 {
            join(n.upper_right, n.upper_left)
        } else if n.left != 0 {
            join(n.upper_right, n.left)
        } else {
            (n.upper_right, None)
        }
    } else if n.upper_left != 0 {
        (n.upper_left, None)
    } else if n.left != 0 {
        (n.left, None)
    } else {
        (counter.fresh()?, None)
    };
    Ok(out)
}

/// Normalises the two mergers of one group so that both can be written
/// directly. Returns the rewritten pair and their chain flags.
pub fn analyse_mergers(mut m1: Merger, mut m2: Merger) -> (Merger, Merger, bool, bool) {
    if m1.larger == m2.larger {
        if m1.smaller > m2.smaller {
            m1.larger = m1.smaller;
            m1.smaller = m2.smaller;
        } else {
            m2.larger = m2.smaller;
            m2.smaller = m1.smaller;
        }
        (m1, m2, true, true)
    } else if m1.larger == m2.smaller {
        m2.smaller = m1.smaller;
        (m1, m2, false, false)
    } else if m1.smaller == m2.larger {
        m1.smaller = m2.smaller;
        (m1, m2, true, true)
    } else {
        (m1, m2, true, false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignerOutput {
    /// Labels as assigned, before the group's own mergers are applied.
    pub labels: LabelGroup,
    pub mergers: ArrayVec<Merger, 2>,
    /// Distinct mergers raised by the four pixels before normalisation.
    pub raw_mergers: usize,
    pub pause: bool,
    pub next_left: Label,
    /// Largest number of distinct labels any pixel of the group saw.
    pub max_neighbour_labels: u8,
}

/// Labels P3..P0 in order, each pixel seeing its left neighbour's fresh label.
///
/// A merger is chain-flagged when normalisation asks for it or when labels
/// merged into its larger side earlier in the row: those earlier cells will
/// need their data refreshed when the line drains.
pub fn assign_group(
    ctx: &NeighbourContext,
    counter: &mut LabelCounter,
    last_mergers: &[Merger],
    row: &RowMemory,
) -> Result<AssignerOutput> {
    let prev = ctx.prev_row.map(|l| recode_label(l, last_mergers));
    let mut left = recode_label(ctx.left, last_mergers);

    let mut labels = [0; 4];
    let mut raw: ArrayVec<Merger, 4> = ArrayVec::new();
    let mut max_neighbour_labels = 0;
    for i in 0..4 {
        let n = PixelNeighbours {
            upper_left: prev[i],
            up: prev[i + 1],
            upper_right: prev[i + 2],
            left,
        };
        let (label, merger) = pixel_label(n, ctx.pixels[i], counter)?;
        if ctx.pixels[i] {
            max_neighbour_labels = max_neighbour_labels.max(n.distinct());
        }
        if let Some(m) = merger {
            if !raw.iter().any(|r| r.same_pair(&m)) {
                raw.push(m);
            }
        }
        labels[i] = label;
        left = label;
    }

    let chained = |m: Merger, flag: bool| {
        if flag || row.has_dependants(m.larger) {
            m.chained()
        } else {
            m
        }
    };
    let mut mergers = ArrayVec::new();
    match raw.as_slice() {
        [] => {}
        [m] => mergers.push(chained(*m, false)),
        [m1, m2] => {
            let (a, b, fa, fb) = analyse_mergers(*m1, *m2);
            mergers.push(chained(a, fa));
            mergers.push(chained(b, fb));
        }
        more => {
            return Err(Error::ConflictArity {
                row: ctx.row,
                group: ctx.group,
                count: more.len(),
            })
        }
    }

    Ok(AssignerOutput {
        labels: LabelGroup::new(labels),
        pause: mergers.len() == 2,
        raw_mergers: raw.len(),
        mergers,
        next_left: if ctx.last_in_row { 0 } else { labels[3] },
        max_neighbour_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(prev_row: [Label; 6], left: Label, pixels: [bool; 4]) -> NeighbourContext {
        NeighbourContext {
            prev_row,
            left,
            pixels,
            row: 1,
            group: 1,
            last_in_row: false,
        }
    }

    fn only(ul: Label, u: Label, ur: Label, l: Label) -> PixelNeighbours {
        PixelNeighbours {
            upper_left: ul,
            up: u,
            upper_right: ur,
            left: l,
        }
    }

    #[test]
    fn fresh_label_from_empty_neighbourhood() {
        let mut c = LabelCounter::new(10);
        assert_eq!(
            pixel_label(only(0, 0, 0, 0), true, &mut c).unwrap(),
            (1, None)
        );
        assert_eq!(c.value(), 1);
    }

    #[test]
    fn background_pixel() {
        let mut c = LabelCounter::new(10);
        assert_eq!(
            pixel_label(only(3, 3, 3, 3), false, &mut c).unwrap(),
            (0, None)
        );
        assert_eq!(c.value(), 0);
    }

    #[test]
    fn conflict_one_and_four() {
        let mut c = LabelCounter::new(10);
        let (l, m) = pixel_label(only(1, 0, 4, 0), true, &mut c).unwrap();
        assert_eq!((l, m), (1, Some(Merger::new(4, 1))));
    }

    #[test]
    fn conflict_four_and_seven() {
        let mut c = LabelCounter::new(10);
        let (l, m) = pixel_label(only(0, 0, 7, 4), true, &mut c).unwrap();
        assert_eq!((l, m), (4, Some(Merger::new(7, 4))));
    }

    #[test]
    fn exhaustion_at_max_label() {
        let mut c = LabelCounter::new(2);
        for expect in 1..=3 {
            assert_eq!(c.fresh().unwrap(), expect);
        }
        assert_eq!(c.fresh(), Err(Error::LabelExhausted { max: 3 }));
    }

    #[test]
    fn counter_reset_restarts_numbering() {
        let mut c = LabelCounter::new(4);
        c.fresh().unwrap();
        c.fresh().unwrap();
        c.reset();
        assert_eq!(c.fresh().unwrap(), 1);
    }

    #[test]
    fn merger_analysis_branches() {
        let m = Merger::new;
        assert_eq!(
            analyse_mergers(m(4, 1), m(7, 4)),
            (m(4, 1), m(7, 1), false, false)
        );
        assert_eq!(
            analyse_mergers(m(9, 4), m(9, 2)),
            (m(4, 2), m(9, 2), true, true)
        );
        assert_eq!(
            analyse_mergers(m(5, 3), m(3, 2)),
            (m(5, 2), m(3, 2), true, true)
        );
        assert_eq!(
            analyse_mergers(m(4, 2), m(8, 6)),
            (m(4, 2), m(8, 6), true, false)
        );
    }

    #[test]
    fn two_conflict_group_pauses() {
        // Previous row 1 . 4 . 7 . over a fully lit group.
        let mut c = LabelCounter::new(10);
        c.fresh().unwrap();
        let out = assign_group(
            &ctx([1, 0, 4, 0, 7, 0], 0, [true; 4]),
            &mut c,
            &[],
            &RowMemory::new(10),
        )
        .unwrap();
        assert_eq!(out.labels.labels, [1, 4, 4, 7]);
        assert_eq!(out.raw_mergers, 2);
        assert_eq!(
            out.mergers.as_slice(),
            &[Merger::new(4, 1), Merger::new(7, 1)]
        );
        assert!(out.pause);
        assert_eq!(out.next_left, 7);
    }

    #[test]
    fn background_group() {
        let mut c = LabelCounter::new(10);
        let out = assign_group(
            &ctx([0; 6], 0, [false; 4]),
            &mut c,
            &[],
            &RowMemory::new(10),
        )
        .unwrap();
        assert_eq!(out.labels.labels, [0; 4]);
        assert!(out.mergers.is_empty());
        assert!(!out.pause);
    }

    #[test]
    fn repeated_pair_counts_once() {
        // 1 . 4 . 1 . : both P3 and P1 see the same pair.
        let mut c = LabelCounter::new(10);
        let out = assign_group(
            &ctx([1, 0, 4, 0, 1, 0], 0, [true; 4]),
            &mut c,
            &[],
            &RowMemory::new(10),
        )
        .unwrap();
        assert_eq!(out.mergers.as_slice(), &[Merger::new(4, 1)]);
        assert!(!out.pause);
    }

    #[test]
    fn pending_mergers_recode_context() {
        let mut c = LabelCounter::new(10);
        let out = assign_group(
            &ctx([0, 4, 0, 0, 0, 0], 0, [true, false, false, false]),
            &mut c,
            &[Merger::new(4, 1)],
            &RowMemory::new(10),
        )
        .unwrap();
        assert_eq!(out.labels.labels, [1, 0, 0, 0]);
    }

    #[test]
    fn last_group_clears_left() {
        let mut c = LabelCounter::new(10);
        let mut k = ctx([0; 6], 0, [true; 4]);
        k.last_in_row = true;
        let out = assign_group(&k, &mut c, &[], &RowMemory::new(10)).unwrap();
        assert_eq!(out.labels.labels, [1, 1, 1, 1]);
        assert_eq!(out.next_left, 0);
    }

    #[test]
    fn merger_with_row_dependants_is_chained() {
        let mut row = RowMemory::new(4);
        row.note_merger(Merger::new(9, 7));
        let mut c = LabelCounter::new(4);
        let out = assign_group(
            &ctx([7, 0, 5, 0, 0, 0], 0, [true, false, false, false]),
            &mut c,
            &[],
            &row,
        )
        .unwrap();
        assert_eq!(out.mergers.as_slice(), &[Merger::new(7, 5).chained()]);
    }
}
