//! Streaming connected component labelling at four pixels per clock.
//!
//! The engine consumes a binary image as a stream of [`PixelGroup`]s, assigns
//! provisional labels group by group, records label mergers in a
//! double-banked [`EquivalenceTable`], repairs merger chains between lines and
//! rewrites the provisional image through the final table. Every step is
//! charged to a cycle budget so a frame can be checked against a video rate.
//!
//! ```
//! use quadlabel::{BinaryImage, Engine, EngineConfig};
//!
//! let img = BinaryImage::from_rows(&["1100", "0011"]).unwrap();
//! let mut engine = Engine::new(EngineConfig::for_image(&img)).unwrap();
//! let result = engine.process_frame(&img).unwrap();
//! assert_eq!(result.final_image.data(), &[1, 1, 0, 0, 0, 0, 1, 1]);
//! ```

pub mod assigner;
pub mod chain;
pub mod context;
pub mod delay_line;
mod error;
pub mod merger;
pub mod oracle;
pub mod patterns;
pub mod pipeline;
pub mod pnm;
pub mod recode;
pub mod stream;
pub mod tables;

pub use assigner::{
    analyse_mergers, assign_group, pixel_label, AssignerOutput, LabelCounter, Merger,
};
pub use chain::{ChainStack, RowMemory};
pub use context::{ContextState, NeighbourContext, PreviousRow};
pub use delay_line::DelayLine;
pub use error::{Error, Result};
pub use merger::{schedule, Schedule, StackPush, TableWrite};
pub use oracle::{equivalent_up_to_relabeling, label_reference};
pub use patterns::{generate, Pattern, PatternError};
pub use pipeline::{
    realtime_check, second_pass, Engine, EngineConfig, FrameFailure, FrameResult, FrameStats,
    GroupEvent, LineEvent, Probe, RealtimeVerdict, Recorder,
};
pub use recode::recode_with_pending;
pub use stream::{pack_frame, unpack_labels, BinaryImage, LabelGroup, LabelImage, PixelGroup};
pub use tables::{BankPair, BankPhase, EquivalenceTable};

/// A component label. `0` is background.
pub type Label = u32;

/// Pixels carried by one stream beat.
pub const PIXELS_PER_GROUP: usize = 4;
