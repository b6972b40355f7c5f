//! Frame lifecycle and cycle accounting.

use arrayvec::ArrayVec;
use serde::Serialize;
use thiserror::Error as ThisError;

use crate::context::PreviousRow;
use crate::{
    assign_group, pack_frame, recode_with_pending, schedule, AssignerOutput, BankPair, BinaryImage,
    ChainStack, ContextState, DelayLine, EquivalenceTable, Error, Label, LabelCounter, LabelGroup,
    LabelImage, Merger, NeighbourContext, PixelGroup, Result, RowMemory, StackPush,
    PIXELS_PER_GROUP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EngineConfig {
    pub label_bits: u32,
    pub width: usize,
    pub height: usize,
    pub clock_hz: u64,
    pub fps: u64,
    /// Fixed cycles spent at every end of line besides the chain entries.
    pub drain_overhead: u64,
    /// Chain stack size; `None` means two entries per group of a row.
    pub stack_capacity: Option<usize>,
}

impl EngineConfig {
    pub const DEFAULT_LABEL_BITS: u32 = 10;
    pub const DEFAULT_CLOCK_HZ: u64 = 133_300_000;
    pub const DEFAULT_FPS: u64 = 60;
    pub const DEFAULT_DRAIN_OVERHEAD: u64 = 2;
    pub const MAX_LABEL_BITS: u32 = 24;

    pub fn new(width: usize, height: usize) -> Self {
        Self {
            label_bits: Self::DEFAULT_LABEL_BITS,
            width,
            height,
            clock_hz: Self::DEFAULT_CLOCK_HZ,
            fps: Self::DEFAULT_FPS,
            drain_overhead: Self::DEFAULT_DRAIN_OVERHEAD,
            stack_capacity: None,
        }
    }

    pub fn for_image(img: &BinaryImage) -> Self {
        Self::new(img.width(), img.height())
    }

    pub fn with_label_bits(self, label_bits: u32) -> Self {
        Self { label_bits, ..self }
    }

    pub fn groups_per_row(&self) -> usize {
        self.width / PIXELS_PER_GROUP
    }

    /// Clock cycles available per frame.
    pub fn frame_budget(&self) -> u64 {
        self.clock_hz / self.fps
    }

    pub fn max_label(&self) -> Label {
        (1 << self.label_bits) - 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || !self.width.is_multiple_of(PIXELS_PER_GROUP) {
            return Err(Error::Dimension { width: self.width });
        }
        if !(1..=Self::MAX_LABEL_BITS).contains(&self.label_bits) {
            return Err(Error::LabelBits(self.label_bits));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FrameStats {
    /// One per consumed group.
    pub active_cycles: u64,
    /// One per group that raised two mergers.
    pub pause_cycles: u64,
    /// Chain entries plus the per-line overhead, summed over lines.
    pub drain_cycles: u64,
    /// Final recode plus re-initialisation of the retiring bank.
    pub interframe_cycles: u64,
    /// Beats offered with `tvalid` low.
    pub idle_cycles: u64,
    pub chain_entries: u64,
    pub peak_label: Label,
    /// Groups with 0, 1 and 2 mergers.
    pub conflict_histogram: [u64; 3],
    pub consumed_groups: u64,
    pub max_group_mergers: usize,
    pub max_neighbour_labels: u8,
}

impl FrameStats {
    pub fn total(&self) -> u64 {
        self.active_cycles + self.pause_cycles + self.drain_cycles
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameResult {
    pub provisional: LabelImage,
    pub final_table: EquivalenceTable,
    pub final_image: LabelImage,
    pub stats: FrameStats,
}

/// A frame that was abandoned, with the statistics gathered up to that point.
#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
#[error("{error}")]
pub struct FrameFailure {
    pub error: Error,
    pub stats: Box<FrameStats>,
}

impl From<Error> for FrameFailure {
    fn from(error: Error) -> Self {
        Self {
            error,
            stats: Box::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RealtimeVerdict {
    pub budget: u64,
    pub total: u64,
    pub interframe: u64,
    /// `budget - total - interframe`; negative when over.
    pub slack: i64,
    pub pass: bool,
    /// The retiring bank alone fits in a frame period.
    pub bank_ready: bool,
}

pub fn realtime_check(stats: &FrameStats, cfg: &EngineConfig) -> RealtimeVerdict {
    let budget = cfg.frame_budget();
    let used = stats.total() + stats.interframe_cycles;
    RealtimeVerdict {
        budget,
        total: stats.total(),
        interframe: stats.interframe_cycles,
        slack: budget as i64 - used as i64,
        pass: used <= budget,
        bank_ready: stats.interframe_cycles <= budget,
    }
}

pub fn second_pass(provisional: &LabelImage, t: &EquivalenceTable) -> LabelImage {
    let data = provisional.data().iter().map(|&l| t.get(l)).collect();
    LabelImage::new(provisional.width(), provisional.height(), data)
        .expect("same dimensions as the provisional image")
}

/// One labelled group, for observers.
#[derive(Debug, Clone)]
pub struct GroupEvent {
    pub ctx: NeighbourContext,
    pub output: AssignerOutput,
    /// Chain entries pushed while committing this group, in push order.
    pub pushes: Vec<StackPush>,
    /// Labels sent down the delay line and to the output.
    pub emitted: LabelGroup,
}

/// One end-of-line drain, for observers.
#[derive(Debug, Clone)]
pub struct LineEvent {
    pub row: usize,
    pub drained: Vec<StackPush>,
    pub window: [Label; 6],
}

/// Hooks into the serial loop. Both methods default to doing nothing.
pub trait Probe {
    fn group(&mut self, _event: &GroupEvent) {}
    fn line_end(&mut self, _event: &LineEvent) {}
}

impl Probe for () {}

/// Records every event.
#[derive(Debug, Clone, Default)]
pub struct Recorder {
    pub groups: Vec<GroupEvent>,
    pub lines: Vec<LineEvent>,
}

impl Probe for Recorder {
    fn group(&mut self, event: &GroupEvent) {
        self.groups.push(event.clone());
    }

    fn line_end(&mut self, event: &LineEvent) {
        self.lines.push(event.clone());
    }
}

/// The labelling engine. Holds the table banks across frames.
#[derive(Debug, Clone)]
pub struct Engine {
    cfg: EngineConfig,
    banks: BankPair,
    frames: u64,
}

impl Engine {
    pub fn new(cfg: EngineConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            banks: BankPair::new(cfg.label_bits),
            frames: 0,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn process_frame(&mut self, img: &BinaryImage) -> Result<FrameResult, FrameFailure> {
        self.process_frame_with(img, &mut ())
    }

    pub fn process_frame_with(
        &mut self,
        img: &BinaryImage,
        probe: &mut impl Probe,
    ) -> Result<FrameResult, FrameFailure> {
        if img.width() != self.cfg.width || img.height() != self.cfg.height {
            return Err(Error::SizeMismatch {
                got_width: img.width(),
                got_height: img.height(),
                want_width: self.cfg.width,
                want_height: self.cfg.height,
            }
            .into());
        }
        let groups = pack_frame(img)?;
        self.process_stream(groups, probe)
    }

    /// Runs one frame from a beat stream. Beats with `valid` low are bubbles.
    pub fn process_stream(
        &mut self,
        groups: impl IntoIterator<Item = PixelGroup>,
        probe: &mut impl Probe,
    ) -> Result<FrameResult, FrameFailure> {
        if self.frames > 0 {
            self.banks.advance_standby(self.cfg.frame_budget());
        }
        self.frames += 1;
        self.banks.swap()?;

        let mut run = FrameRun::new(&self.cfg);
        if let Err(error) = run.stream(groups, self.banks.active_mut(), probe) {
            self.banks.discard_active();
            return Err(FrameFailure {
                error,
                stats: Box::new(run.stats),
            });
        }

        let final_table = self.banks.retire();
        run.stats.interframe_cycles = self.banks.retire_cost();
        if let Some(label) = final_table.first_non_idempotent() {
            return Err(FrameFailure {
                error: Error::UnresolvedChain { label },
                stats: Box::new(run.stats),
            });
        }
        let provisional = LabelImage::new(self.cfg.width, self.cfg.height, run.provisional)
            .expect("provisional buffer sized from the config");
        let final_image = second_pass(&provisional, &final_table);
        Ok(FrameResult {
            provisional,
            final_table,
            final_image,
            stats: run.stats,
        })
    }
}

struct FrameRun {
    groups_per_row: usize,
    expected: u64,
    drain_overhead: u64,
    ctx: ContextState,
    delay: DelayLine,
    counter: LabelCounter,
    stack: ChainStack,
    row: RowMemory,
    pending: ArrayVec<Merger, 2>,
    provisional: Vec<Label>,
    stats: FrameStats,
    /// Cycles with `tready` low still to come.
    stall: u64,
}

impl FrameRun {
    fn new(cfg: &EngineConfig) -> Self {
        let gpr = cfg.groups_per_row();
        Self {
            groups_per_row: gpr,
            expected: (gpr * cfg.height) as u64,
            drain_overhead: cfg.drain_overhead,
            ctx: ContextState::new(gpr),
            delay: DelayLine::new(gpr),
            counter: LabelCounter::new(cfg.label_bits),
            stack: cfg
                .stack_capacity
                .map_or_else(|| ChainStack::for_row(gpr), ChainStack::new),
            row: RowMemory::new(cfg.label_bits),
            pending: ArrayVec::new(),
            provisional: vec![0; cfg.width * cfg.height],
            stats: FrameStats::default(),
            stall: 0,
        }
    }

    fn stream(
        &mut self,
        groups: impl IntoIterator<Item = PixelGroup>,
        table: &mut EquivalenceTable,
        probe: &mut impl Probe,
    ) -> Result<()> {
        let mut source = groups.into_iter();
        while self.stats.consumed_groups < self.expected {
            if self.stall > 0 {
                // Not ready: the offered beat stays with the source.
                self.stall -= 1;
                continue;
            }
            let Some(g) = source.next() else {
                return Err(Error::Framing(format!(
                    "stream ended after {} of {} groups",
                    self.stats.consumed_groups, self.expected
                )));
            };
            if !g.valid {
                self.stats.idle_cycles += 1;
                continue;
            }
            self.accept(g, table, probe)?;
        }
        if source.any(|g| g.valid) {
            return Err(Error::Framing(format!(
                "more than {} groups in frame",
                self.expected
            )));
        }
        Ok(())
    }

    fn accept(
        &mut self,
        g: PixelGroup,
        table: &mut EquivalenceTable,
        probe: &mut impl Probe,
    ) -> Result<()> {
        let index = self.stats.consumed_groups;
        if g.sof != (index == 0) {
            return Err(Error::Framing(format!(
                "sof flag mismatch on group {index}"
            )));
        }
        if index == 0 {
            self.counter.reset();
        }
        let last = self.ctx.is_last_in_row();
        if g.eol != last {
            return Err(Error::Framing(format!(
                "eol flag mismatch on group {index}"
            )));
        }

        let (y, x) = (self.ctx.row(), self.ctx.group());
        let above = if y == 0 {
            PreviousRow::default()
        } else {
            let read = |g: LabelGroup| g.map(|l| self.row.resolve(table, l));
            PreviousRow {
                here: read(self.delay.peek(0)),
                ahead: if last {
                    LabelGroup::zero()
                } else {
                    read(self.delay.peek(1))
                },
            }
        };
        let ctx = self.ctx.step_valid(&g, above, &self.pending);
        let out = assign_group(&ctx, &mut self.counter, &self.pending, &self.row)?;

        let sched = schedule(&out.mergers);
        let mut chained = sched.pushes.iter();
        let mut pushes = Vec::new();
        for (m, w) in out.mergers.iter().zip(&sched.writes) {
            for d in self.row.take_dependants(m.larger) {
                self.stack.push(d)?;
                pushes.push(d);
            }
            table.record_merger(*w);
            if m.chain {
                let p = *chained.next().expect("one push per chained merger");
                self.stack.push(p)?;
                pushes.push(p);
            }
            self.row.note_merger(*m);
        }

        let mut emitted = recode_with_pending(out.labels, &out.mergers);
        emitted.sof = g.sof;
        emitted.eol = g.eol;
        let at = (y * self.groups_per_row + x) * PIXELS_PER_GROUP;
        self.provisional[at..at + PIXELS_PER_GROUP].copy_from_slice(&emitted.labels);
        self.delay.exchange(emitted);
        self.ctx.set_left(out.next_left);
        self.pending = out.mergers.clone();

        let s = &mut self.stats;
        s.consumed_groups += 1;
        s.active_cycles += 1;
        s.pause_cycles += u64::from(sched.extra_cycles);
        s.conflict_histogram[out.mergers.len()] += 1;
        s.max_group_mergers = s.max_group_mergers.max(out.raw_mergers);
        s.max_neighbour_labels = s.max_neighbour_labels.max(out.max_neighbour_labels);
        s.peak_label = self.counter.value();
        self.stall += u64::from(sched.extra_cycles);

        probe.group(&GroupEvent {
            ctx,
            output: out,
            pushes,
            emitted,
        });

        if last {
            self.drain_line(y, table, probe);
        }
        Ok(())
    }

    fn drain_line(&mut self, row: usize, table: &mut EquivalenceTable, probe: &mut impl Probe) {
        let drained: Vec<StackPush> = self.stack.drain().collect();
        for d in &drained {
            table.resolve_chain_entry(d.larger, d.smaller);
            let resolved = Merger {
                larger: d.larger,
                smaller: table.get(d.larger),
                chain: false,
            };
            self.ctx.step_chain_recode(resolved);
        }
        let cycles = drained.len() as u64 + self.drain_overhead;
        self.stats.drain_cycles += cycles;
        self.stats.chain_entries += drained.len() as u64;
        self.stall += cycles;
        self.row.clear();
        self.pending.clear();
        probe.line_end(&LineEvent {
            row,
            drained,
            window: self.ctx.window(),
        });
    }
}
