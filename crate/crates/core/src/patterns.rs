//! Deterministic test images: the worked merger situations and stress patterns.
//!
//! Fixed-size patterns are drawn in the top-left corner of a larger blank frame.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::BinaryImage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pattern {
    Blank,
    /// One group meeting three separate components above it (labels 1, 4, 7).
    DoubleMerger,
    /// A row sweeping a staircase of `links + 1` bars, one merger per group,
    /// each merging into the label the previous one merged into.
    AscendingChain {
        links: usize,
    },
    /// One group whose two mergers share a label (5, 3 and 2).
    GroupChain,
    /// Bands of single-pixel teeth joined by a bar; `labels` teeth in total.
    /// Every group on a bar row raises two mergers.
    Comb {
        labels: usize,
    },
    /// Horizontal pixel pairs on a diagonal checkerboard, tied to a left border.
    CheckerboardPairs,
    /// Square spiral corridor.
    Spiral,
    Random {
        density: f64,
        seed: u64,
    },
    /// `components` isolated pixels on a two-pixel grid.
    MaxLabels {
        components: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatternError {
    #[error("width {0} is not a positive multiple of 4")]
    Width(usize),
    #[error("{pattern} needs at least {min_width}x{min_height}, got {width}x{height}")]
    TooSmall {
        pattern: &'static str,
        min_width: usize,
        min_height: usize,
        width: usize,
        height: usize,
    },
    #[error("invalid parameter: {0}")]
    Param(String),
}

const DOUBLE_MERGER: [&str; 4] = [
    "0001000000101000",
    "0001010000000010",
    "0101010100000000",
    "0000111100000000",
];

const GROUP_CHAIN: [&str; 6] = [
    "0000000000000010",
    "0000000100000000",
    "0000010100000000",
    "0000010100000010",
    "0001010100000000",
    "0000111100000000",
];

/// Filler pixels inserted before successive staircase bars, so that five bars
/// come out labelled 2, 4, 5, 7 and 9.
const CHAIN_FILLERS: [bool; 5] = [true, true, false, true, true];

impl Pattern {
    pub const NAMES: [&'static str; 9] = [
        "blank",
        "double_merger",
        "ascending_chain",
        "group_chain",
        "comb",
        "checkerboard_pairs",
        "spiral",
        "random",
        "max_labels",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Pattern::Blank => "blank",
            Pattern::DoubleMerger => "double_merger",
            Pattern::AscendingChain { .. } => "ascending_chain",
            Pattern::GroupChain => "group_chain",
            Pattern::Comb { .. } => "comb",
            Pattern::CheckerboardPairs => "checkerboard_pairs",
            Pattern::Spiral => "spiral",
            Pattern::Random { .. } => "random",
            Pattern::MaxLabels { .. } => "max_labels",
        }
    }

    /// Smallest frame the pattern fits in.
    pub fn min_size(&self) -> (usize, usize) {
        match *self {
            Pattern::DoubleMerger => (16, DOUBLE_MERGER.len()),
            Pattern::GroupChain => (16, GROUP_CHAIN.len()),
            Pattern::AscendingChain { links } => {
                let fillers = (0..=links).filter(|j| CHAIN_FILLERS[j % 5]).count();
                (4 * (links + 2), links + 1 + fillers + 1)
            }
            _ => (4, 1),
        }
    }
}

fn stamp(img: &mut BinaryImage, rows: &[&str]) {
    for (y, row) in rows.iter().enumerate() {
        for (x, c) in row.bytes().enumerate() {
            img.set(x, y, c == b'1');
        }
    }
}

fn ascending_chain(img: &mut BinaryImage, links: usize) {
    let bars = links + 1;
    let filler_x = 4 * bars + 2;
    let mut y = 0;
    let mut starts = vec![0; bars];
    for j in 0..bars {
        if CHAIN_FILLERS[j % 5] {
            img.set(filler_x, y, true);
            y += 1;
        }
        // Rightmost bar first, so labels fall from right to left.
        starts[bars - 1 - j] = y;
        y += 1;
    }
    let sweep = y;
    for (i, &top) in starts.iter().enumerate() {
        for row in top..sweep {
            for x in 4 * i..4 * i + 3 {
                img.set(x, row, true);
            }
        }
    }
    for x in 0..4 * bars - 1 {
        img.set(x, sweep, true);
    }
}

fn comb(img: &mut BinaryImage, mut labels: usize) {
    const TEETH_ROWS: usize = 7;
    let (w, h) = (img.width(), img.height());
    let mut top = 0;
    while labels > 0 && top + TEETH_ROWS < h {
        let teeth = labels.min(w / 2);
        labels -= teeth;
        for t in 0..teeth {
            for y in top..top + TEETH_ROWS {
                img.set(2 * t + 1, y, true);
            }
        }
        for x in 0..2 * teeth {
            img.set(x, top + TEETH_ROWS, true);
        }
        top += TEETH_ROWS + 2;
    }
}

fn checkerboard_pairs(img: &mut BinaryImage) {
    for y in 0..img.height() {
        img.set(0, y, true);
        for x in 0..img.width() {
            if (x / 2 + y) % 2 == 0 {
                img.set(x, y, true);
            }
        }
    }
}

fn spiral(img: &mut BinaryImage) {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let dirs = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let (mut x, mut y) = (0i64, 0i64);
    img.set(0, 0, true);
    for i in 0.. {
        let shrink = 2 * ((i as i64 - 1).max(0) / 2);
        let len = if i % 2 == 0 {
            w - 1 - shrink
        } else {
            h - 1 - shrink
        };
        if len < 1 {
            break;
        }
        let (dx, dy) = dirs[i % 4];
        for _ in 0..len {
            x += dx;
            y += dy;
            img.set(x as usize, y as usize, true);
        }
    }
}

/// Draws `pattern` into a `width` x `height` frame.
pub fn generate(
    pattern: &Pattern,
    width: usize,
    height: usize,
) -> Result<BinaryImage, PatternError> {
    if width == 0 || !width.is_multiple_of(4) {
        return Err(PatternError::Width(width));
    }
    let (min_width, min_height) = pattern.min_size();
    let fits = match *pattern {
        Pattern::MaxLabels { components } => (height.div_ceil(2)) * (width / 2) >= components,
        _ => width >= min_width && height >= min_height,
    };
    if !fits || height == 0 {
        return Err(PatternError::TooSmall {
            pattern: pattern.name(),
            min_width,
            min_height,
            width,
            height,
        });
    }

    let mut img = BinaryImage::blank(width, height);
    match *pattern {
        Pattern::Blank => {}
        Pattern::DoubleMerger => stamp(&mut img, &DOUBLE_MERGER),
        Pattern::GroupChain => stamp(&mut img, &GROUP_CHAIN),
        Pattern::AscendingChain { links } => {
            if links == 0 {
                return Err(PatternError::Param(
                    "ascending_chain needs at least one link".into(),
                ));
            }
            ascending_chain(&mut img, links);
        }
        Pattern::Comb { labels } => comb(&mut img, labels),
        Pattern::CheckerboardPairs => checkerboard_pairs(&mut img),
        Pattern::Spiral => spiral(&mut img),
        Pattern::Random { density, seed } => {
            if !(0.0..=1.0).contains(&density) {
                return Err(PatternError::Param(format!(
                    "density {density} outside 0..1"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for y in 0..height {
                for x in 0..width {
                    img.set(x, y, rng.random_bool(density));
                }
            }
        }
        Pattern::MaxLabels { components } => {
            let spots = (0..height)
                .step_by(2)
                .flat_map(|y| (0..width).step_by(2).map(move |x| (x, y)));
            for (x, y) in spots.take(components) {
                img.set(x, y, true);
            }
        }
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label_reference;

    fn components(img: &BinaryImage) -> u32 {
        label_reference(img).max_label()
    }

    #[test]
    fn random_is_reproducible() {
        let p = Pattern::Random {
            density: 0.5,
            seed: 7,
        };
        let a = generate(&p, 64, 32).unwrap();
        assert_eq!(a, generate(&p, 64, 32).unwrap());
        assert_ne!(
            a,
            generate(
                &Pattern::Random {
                    density: 0.5,
                    seed: 8
                },
                64,
                32
            )
            .unwrap()
        );
        let fg = a.foreground_count() as f64 / (64.0 * 32.0);
        assert!((0.4..0.6).contains(&fg), "density {fg}");
    }

    #[test]
    fn merger_patterns_have_expected_components() {
        assert_eq!(
            components(&generate(&Pattern::DoubleMerger, 16, 4).unwrap()),
            5
        );
        assert_eq!(
            components(&generate(&Pattern::GroupChain, 16, 6).unwrap()),
            3
        );
        let chain = generate(&Pattern::AscendingChain { links: 4 }, 24, 10).unwrap();
        assert_eq!(Pattern::AscendingChain { links: 4 }.min_size(), (24, 10));
        assert_eq!(components(&chain), 5);
    }

    #[test]
    fn max_labels_counts_components() {
        let img = generate(&Pattern::MaxLabels { components: 1023 }, 64, 64).unwrap();
        assert_eq!(components(&img), 1023);
        assert!(generate(&Pattern::MaxLabels { components: 1025 }, 64, 64).is_err());
    }

    #[test]
    fn comb_uses_label_budget() {
        let img = generate(&Pattern::Comb { labels: 50 }, 32, 40).unwrap();
        assert_eq!(components(&img), 4);
        assert_eq!(img.foreground_count(), 50 * 7 + 3 * 32 + 4);
    }

    #[test]
    fn checkerboard_and_spiral_are_connected() {
        for p in [Pattern::CheckerboardPairs, Pattern::Spiral] {
            let img = generate(&p, 32, 24).unwrap();
            assert_eq!(components(&img), 1, "{}", p.name());
        }
    }

    #[test]
    fn size_and_param_errors() {
        assert_eq!(generate(&Pattern::Blank, 6, 4), Err(PatternError::Width(6)));
        assert!(matches!(
            generate(&Pattern::DoubleMerger, 12, 4),
            Err(PatternError::TooSmall { .. })
        ));
        assert!(matches!(
            generate(
                &Pattern::Random {
                    density: 1.5,
                    seed: 0
                },
                4,
                4
            ),
            Err(PatternError::Param(_))
        ));
    }
}
