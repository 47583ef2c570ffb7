//! Connected-component labeling shared by the cleanup and metrics stages.

use crate::image_io::BinaryImage;

/// Pixel neighborhood used when growing components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub fn as_u8(self) -> u8 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

impl TryFrom<u8> for Connectivity {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(format!("connectivity must be 4 or 8, got {other}")),
        }
    }
}

/// Component labels for a binary image: background pixels get 0, foreground
/// pixels the 1-based id of their component.
pub struct ComponentLabels {
    pub labels: Vec<u32>,
    /// Pixel count per component, indexed by id - 1.
    pub areas: Vec<usize>,
}

impl ComponentLabels {
    pub fn count(&self) -> usize {
        self.areas.len()
    }
}

/// Flood-fill labeling of the foreground.
pub fn label_components(bin: &BinaryImage, connectivity: Connectivity) -> ComponentLabels {
    let w = bin.width() as usize;
    let h = bin.height() as usize;
    let data = bin.data();
    let mut labels = vec![0u32; data.len()];
    let mut areas = Vec::new();
    let mut stack = Vec::new();

    for start in 0..data.len() {
        if data[start] == 0 || labels[start] != 0 {
            continue;
        }
        let id = areas.len() as u32 + 1;
        let mut area = 0usize;
        labels[start] = id;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            area += 1;
            let x = idx % w;
            let y = idx / w;
            let mut visit = |nx: usize, ny: usize| {
                let n = ny * w + nx;
                if data[n] == 1 && labels[n] == 0 {
                    labels[n] = id;
                    stack.push(n);
                }
            };
            if x > 0 {
                visit(x - 1, y);
            }
            if x + 1 < w {
                visit(x + 1, y);
            }
            if y > 0 {
                visit(x, y - 1);
            }
            if y + 1 < h {
                visit(x, y + 1);
            }
            if connectivity == Connectivity::Eight {
                if x > 0 && y > 0 {
                    visit(x - 1, y - 1);
                }
                if x + 1 < w && y > 0 {
                    visit(x + 1, y - 1);
                }
                if x > 0 && y + 1 < h {
                    visit(x - 1, y + 1);
                }
                if x + 1 < w && y + 1 < h {
                    visit(x + 1, y + 1);
                }
            }
        }
        areas.push(area);
    }
    ComponentLabels { labels, areas }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(w: u32, h: u32, data: Vec<u8>) -> BinaryImage {
        BinaryImage::new(w, h, data).unwrap()
    }

    #[test]
    fn empty_image_has_no_components() {
        let b = bin(4, 3, vec![0; 12]);
        assert_eq!(label_components(&b, Connectivity::Eight).count(), 0);
    }

    #[test]
    fn diagonal_pixels_depend_on_connectivity() {
        let b = bin(2, 2, vec![1, 0, 0, 1]);
        assert_eq!(label_components(&b, Connectivity::Eight).count(), 1);
        assert_eq!(label_components(&b, Connectivity::Four).count(), 2);
    }

    #[test]
    fn areas_counted() {
        #[rustfmt::skip]
        let b = bin(5, 3, vec![
            1, 1, 0, 0, 1,
            1, 0, 0, 0, 1,
            0, 0, 0, 0, 1,
        ]);
        let l = label_components(&b, Connectivity::Four);
        assert_eq!(l.count(), 2);
        let mut areas = l.areas.clone();
        areas.sort();
        assert_eq!(areas, vec![3, 3]);
    }
}
