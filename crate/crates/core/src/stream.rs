//! Four-pixel stream beats and the whole-image containers they come from.

use serde::Serialize;

use crate::{Error, Label, Result, PIXELS_PER_GROUP};

/// One stream beat: four pixels, P3 (leftmost) first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PixelGroup {
    pub pixels: [bool; 4],
    /// Start of frame (`tuser`).
    pub sof: bool,
    /// End of line (`tlast`).
    pub eol: bool,
    /// Beat carries data (`tvalid`).
    pub valid: bool,
}

impl PixelGroup {
    /// A bubble: `tvalid` low, nothing transferred.
    pub fn idle() -> Self {
        Self::default()
    }
}

/// Labels for one group, P3 first, with framing mirrored from the input beat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LabelGroup {
    pub labels: [Label; 4],
    pub sof: bool,
    pub eol: bool,
}

impl LabelGroup {
    pub fn new(labels: [Label; 4]) -> Self {
        Self {
            labels,
            sof: false,
            eol: false,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn map(self, f: impl Fn(Label) -> Label) -> Self {
        Self {
            labels: self.labels.map(f),
            ..self
        }
    }
}

/// Row-major binary image. Values are 0 (background) or 1 (foreground).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::BufferLength {
                expected: width * height,
                got: data.len(),
            });
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(Error::NotBinary { index, value });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn blank(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0; width * height],
        }
    }

    /// Builds an image from strings of `0`/`1` (any other character is background).
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let width = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(width * rows.len());
        for row in rows {
            if row.len() != width {
                return Err(Error::BufferLength {
                    expected: width,
                    got: row.len(),
                });
            }
            data.extend(row.bytes().map(|b| u8::from(b == b'1')));
        }
        Self::new(width, rows.len(), data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x] != 0
    }

    pub fn set(&mut self, x: usize, y: usize, on: bool) {
        self.data[y * self.width + x] = u8::from(on);
    }

    pub fn foreground_count(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }
}

/// Row-major label image. `0` marks background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelImage {
    width: usize,
    height: usize,
    data: Vec<Label>,
}

impl LabelImage {
    pub fn new(width: usize, height: usize, data: Vec<Label>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::BufferLength {
                expected: width * height,
                got: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[Label] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> Label {
        self.data[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[Label] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn max_label(&self) -> Label {
        self.data.iter().copied().max().unwrap_or(0)
    }
}

/// Splits an image into its beat stream: `width / 4` groups per row, sof on the
/// first group, eol on the last group of every row.
pub fn pack_frame(img: &BinaryImage) -> Result<Vec<PixelGroup>> {
    let width = img.width();
    if width == 0 || !width.is_multiple_of(PIXELS_PER_GROUP) {
        return Err(Error::Dimension { width });
    }
    let per_row = width / PIXELS_PER_GROUP;
    let groups = img
        .data()
        .chunks_exact(PIXELS_PER_GROUP)
        .enumerate()
        .map(|(i, px)| PixelGroup {
            pixels: [px[0] != 0, px[1] != 0, px[2] != 0, px[3] != 0],
            sof: i == 0,
            eol: i % per_row == per_row - 1,
            valid: true,
        })
        .collect();
    Ok(groups)
}

/// Reassembles a label stream into an image.
pub fn unpack_labels(groups: &[LabelGroup], width: usize, height: usize) -> Result<LabelImage> {
    if width == 0 || !width.is_multiple_of(PIXELS_PER_GROUP) {
        return Err(Error::Dimension { width });
    }
    let expected = width / PIXELS_PER_GROUP * height;
    if groups.len() != expected {
        return Err(Error::Framing(format!(
            "expected {expected} label groups, got {}",
            groups.len()
        )));
    }
    let data = groups.iter().flat_map(|g| g.labels).collect();
    LabelImage::new(width, height, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_group_frame() {
        let img = BinaryImage::new(4, 1, vec![1, 0, 1, 1]).unwrap();
        let groups = pack_frame(&img).unwrap();
        assert_eq!(groups.len(), 1);
        let g = groups[0];
        assert_eq!(g.pixels, [true, false, true, true]);
        assert!(g.sof && g.eol && g.valid);
    }

    #[test]
    fn framing_flags_on_two_rows() {
        let groups = pack_frame(&BinaryImage::blank(8, 2)).unwrap();
        assert_eq!(groups.len(), 4);
        let sof: Vec<bool> = groups.iter().map(|g| g.sof).collect();
        let eol: Vec<bool> = groups.iter().map(|g| g.eol).collect();
        assert_eq!(sof, [true, false, false, false]);
        assert_eq!(eol, [false, true, false, true]);
    }

    #[test]
    fn uhd_group_count() {
        let groups = pack_frame(&BinaryImage::blank(3840, 2160)).unwrap();
        assert_eq!(groups.len(), 2_073_600);
    }

    #[test]
    fn width_must_be_multiple_of_four() {
        let img = BinaryImage::new(2, 1, vec![1, 0]).unwrap();
        assert_eq!(pack_frame(&img), Err(Error::Dimension { width: 2 }));
    }

    #[test]
    fn unpack_single_group() {
        let img = unpack_labels(&[LabelGroup::new([0, 1, 1, 0])], 4, 1).unwrap();
        assert_eq!(img.data(), &[0, 1, 1, 0]);
    }

    #[test]
    fn unpack_underflow_is_framing_error() {
        assert!(matches!(unpack_labels(&[], 4, 1), Err(Error::Framing(_))));
    }

    #[test]
    fn rejects_non_binary_values() {
        assert_eq!(
            BinaryImage::new(4, 1, vec![0, 1, 2, 0]),
            Err(Error::NotBinary { index: 2, value: 2 })
        );
    }

    #[test]
    fn pack_unpack_round_trip() {
        let img = BinaryImage::from_rows(&["10110001", "01100110", "00011111"]).unwrap();
        let groups: Vec<LabelGroup> = pack_frame(&img)
            .unwrap()
            .iter()
            .map(|g| LabelGroup::new(g.pixels.map(Label::from)))
            .collect();
        let back = unpack_labels(&groups, 8, 3).unwrap();
        let bytes: Vec<u8> = back.data().iter().map(|&l| l as u8).collect();
        assert_eq!(bytes, img.data());
    }
}
