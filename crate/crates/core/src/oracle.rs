//! Reference labelling and the relabelling-equivalence check.

use std::collections::HashMap;

use crate::{BinaryImage, Error, Label, LabelImage, Result};

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new() -> Self {
        Self { parent: Vec::new() }
    }

    fn make(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Two-pass 8-connected labelling. Components are numbered 1.. in the raster
/// order of their first pixel.
pub fn label_reference(img: &BinaryImage) -> LabelImage {
    let (w, h) = (img.width(), img.height());
    let mut provisional = vec![usize::MAX; w * h];
    let mut sets = DisjointSet::new();

    for y in 0..h {
        for x in 0..w {
            if !img.get(x, y) {
                continue;
            }
            let mut here = None;
            let neighbours = [(-1, -1), (0, -1), (1, -1), (-1, 0)];
            for (dx, dy) in neighbours {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx < 0 || ny < 0 || nx >= w as isize {
                    continue;
                }
                let n = provisional[ny as usize * w + nx as usize];
                if n == usize::MAX {
                    continue;
                }
                match here {
                    None => here = Some(n),
                    Some(l) => sets.union(l, n),
                }
            }
            provisional[y * w + x] = here.unwrap_or_else(|| sets.make());
        }
    }

    let mut numbering: HashMap<usize, Label> = HashMap::new();
    let data = provisional
        .iter()
        .map(|&p| {
            if p == usize::MAX {
                return 0;
            }
            let root = sets.find(p);
            let next = numbering.len() as Label + 1;
            *numbering.entry(root).or_insert(next)
        })
        .collect();
    LabelImage::new(w, h, data).expect("sized from the input image")
}

/// True when a bijection between the nonzero labels of `a` and `b` maps one
/// image onto the other and background coincides.
pub fn equivalent_up_to_relabeling(a: &LabelImage, b: &LabelImage) -> Result<bool> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch);
    }
    let mut forward: HashMap<Label, Label> = HashMap::new();
    let mut backward: HashMap<Label, Label> = HashMap::new();
    for (&x, &y) in a.data().iter().zip(b.data()) {
        if (x == 0) != (y == 0) {
            return Ok(false);
        }
        if x == 0 {
            continue;
        }
        if *forward.entry(x).or_insert(y) != y || *backward.entry(y).or_insert(x) != x {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn img(rows: &[&str]) -> BinaryImage {
        BinaryImage::from_rows(rows).unwrap()
    }

    fn labels(w: usize, h: usize, data: &[Label]) -> LabelImage {
        LabelImage::new(w, h, data.to_vec()).unwrap()
    }

    #[test]
    fn single_pixel() {
        let l = label_reference(&img(&["0100"]));
        assert_eq!(l.data(), &[0, 1, 0, 0]);
    }

    #[test]
    fn diagonal_touch_is_connected() {
        let l = label_reference(&img(&["10", "01"]));
        assert_eq!(l.data(), &[1, 0, 0, 1]);
    }

    #[test]
    fn plus_sign_is_one_component() {
        let l = label_reference(&img(&["00100", "00100", "11111", "00100", "00100"]));
        assert_eq!(l.max_label(), 1);
        assert_eq!(l.data().iter().filter(|&&v| v == 1).count(), 9);
    }

    #[test]
    fn first_touch_numbering() {
        let l = label_reference(&img(&["0001", "1001", "1111"]));
        assert_eq!(l.data(), &[0, 0, 0, 1, 1, 0, 0, 1, 1, 1, 1, 1]);
        let l = label_reference(&img(&["0001", "1000"]));
        assert_eq!(l.data(), &[0, 0, 0, 1, 2, 0, 0, 0]);
    }

    #[test]
    fn relabeling_checks() {
        let a = labels(4, 1, &[1, 0, 2, 2]);
        assert!(equivalent_up_to_relabeling(&a, &a).unwrap());
        assert!(equivalent_up_to_relabeling(&a, &labels(4, 1, &[2, 0, 1, 1])).unwrap());
        assert!(!equivalent_up_to_relabeling(&a, &labels(4, 1, &[1, 0, 1, 1])).unwrap());
        assert!(!equivalent_up_to_relabeling(&labels(4, 1, &[1, 0, 1, 1]), &a).unwrap());
        assert!(!equivalent_up_to_relabeling(&a, &labels(4, 1, &[1, 1, 2, 2])).unwrap());
        assert_eq!(
            equivalent_up_to_relabeling(&a, &labels(2, 2, &[1, 0, 2, 2])),
            Err(Error::DimensionMismatch)
        );
    }

    fn arb_image() -> impl Strategy<Value = BinaryImage> {
        (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
            proptest::collection::vec(0u8..2, w * h)
                .prop_map(move |d| BinaryImage::new(w, h, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn reference_is_a_fixed_point(img in arb_image()) {
            let l = label_reference(&img);
            let bin = BinaryImage::new(img.width(), img.height(), l.data().iter().map(|&v| u8::from(v != 0)).collect()).unwrap();
            prop_assert_eq!(label_reference(&bin), l);
        }

        #[test]
        fn components_are_connected_and_separated(img in arb_image()) {
            let l = label_reference(&img);
            let (w, h) = (img.width(), img.height());
            // Touching foreground pixels share a label.
            for y in 0..h {
                for x in 0..w {
                    if l.get(x, y) == 0 { continue; }
                    for (dx, dy) in [(1isize, 0isize), (-1, 1), (0, 1), (1, 1)] {
                        let (nx, ny) = (x as isize + dx, y as isize + dy);
                        if nx >= 0 && (nx as usize) < w && (ny as usize) < h {
                            let n = l.get(nx as usize, ny as usize);
                            prop_assert!(n == 0 || n == l.get(x, y));
                        }
                    }
                }
            }
        }

        #[test]
        fn relabeling_is_symmetric(img in arb_image(), shift in 1u32..50) {
            let a = label_reference(&img);
            let b = LabelImage::new(a.width(), a.height(), a.data().iter().map(|&v| if v == 0 { 0 } else { v + shift }).collect()).unwrap();
            prop_assert!(equivalent_up_to_relabeling(&a, &b).unwrap());
            prop_assert!(equivalent_up_to_relabeling(&b, &a).unwrap());
        }
    }
}
