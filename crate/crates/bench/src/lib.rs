//! Frames shared by the benchmarks.

use quadlabel::{generate, BinaryImage, Pattern};

/// Patterns worth timing, each drawn at `width` x `height`.
pub fn workload(width: usize, height: usize) -> Vec<(&'static str, BinaryImage)> {
    [
        Pattern::Blank,
        Pattern::Comb { labels: 1023 },
        Pattern::CheckerboardPairs,
        Pattern::Spiral,
        Pattern::Random {
            density: 0.3,
            seed: 11,
        },
    ]
    .into_iter()
    .filter_map(|p| Some((p.name(), generate(&p, width, height).ok()?)))
    .collect()
}
