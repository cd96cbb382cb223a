//! Two-pass connected-component labeling with a union-find over provisional
//! labels.

use crate::error::{Error, Result};
use crate::imaging::BinaryImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    pub fn from_neighbours(n: u8) -> Result<Self> {
        match n {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(Error::InvalidConfig(format!(
                "connectivity must be 4 or 8, got {other}"
            ))),
        }
    }

    pub fn neighbours(self) -> u8 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

/// Per-pixel component labels. Label 0 is background; components are
/// numbered `1..=K` in order of their first pixel in row-major scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    sizes: Vec<usize>,
}

impl ComponentMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label_at(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    /// Pixel counts indexed by `label - 1`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size_of(&self, label: u32) -> Option<usize> {
        label
            .checked_sub(1)
            .and_then(|i| self.sizes.get(i as usize).copied())
    }

    pub fn mask_of(&self, label: u32) -> BinaryImage {
        let px = self.labels.iter().map(|&l| u8::from(l == label)).collect();
        BinaryImage::new(self.width, self.height, px).expect("label map has valid dimensions")
    }
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        // slot 0 is the background and never unioned
        DisjointSet { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller id as root
        match ra.cmp(&rb) {
            std::cmp::Ordering::Less => self.parent[rb as usize] = ra,
            std::cmp::Ordering::Greater => self.parent[ra as usize] = rb,
            std::cmp::Ordering::Equal => {}
        }
    }
}

pub fn label_components(mask: &BinaryImage, connectivity: Connectivity) -> ComponentMap {
    let (w, h) = (mask.width(), mask.height());
    let px = mask.pixels();
    let mut labels = vec![0u32; w * h];
    let mut sets = DisjointSet::new();

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if px[i] == 0 {
                continue;
            }
            // already-visited neighbours: W, NW, N, NE
            let mut neigh = [0u32; 4];
            let mut n = 0;
            if x > 0 && labels[i - 1] != 0 {
                neigh[n] = labels[i - 1];
                n += 1;
            }
            if y > 0 {
                let up = i - w;
                if labels[up] != 0 {
                    neigh[n] = labels[up];
                    n += 1;
                }
                if connectivity == Connectivity::Eight {
                    if x > 0 && labels[up - 1] != 0 {
                        neigh[n] = labels[up - 1];
                        n += 1;
                    }
                    if x + 1 < w && labels[up + 1] != 0 {
                        neigh[n] = labels[up + 1];
                        n += 1;
                    }
                }
            }
            if n == 0 {
                labels[i] = sets.make();
            } else {
                let min = *neigh[..n].iter().min().unwrap();
                labels[i] = min;
                for &l in &neigh[..n] {
                    sets.union(min, l);
                }
            }
        }
    }

    // second pass: resolve roots and renumber in first-encounter order
    let mut final_id = vec![0u32; sets.parent.len()];
    let mut sizes = Vec::new();
    for l in labels.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = sets.find(*l) as usize;
        if final_id[root] == 0 {
            sizes.push(0);
            final_id[root] = sizes.len() as u32;
        }
        *l = final_id[root];
        sizes[*l as usize - 1] += 1;
    }

    ComponentMap {
        width: w,
        height: h,
        labels,
        sizes,
    }
}

/// Mask of the component with the most pixels; ties go to the lowest label.
pub fn largest_component(cm: &ComponentMap) -> Result<BinaryImage> {
    let mut best: Option<(u32, usize)> = None;
    for (i, &size) in cm.sizes.iter().enumerate() {
        if best.is_none_or(|(_, s)| size > s) {
            best = Some((i as u32 + 1, size));
        }
    }
    let (label, _) = best.ok_or(Error::NoForeground)?;
    Ok(cm.mask_of(label))
}
