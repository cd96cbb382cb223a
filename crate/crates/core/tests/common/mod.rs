//! Independent reference implementations used by the integration and
//! acceptance tests. Each one is written the slow, obvious way.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::Rng;

/// Recursive flood fill over a row-major 0/1 mask. Components are numbered
/// from 1 in scan order of their first pixel; background stays 0.
pub fn flood_fill_labels(mask: &[u8], width: usize, height: usize, eight: bool) -> Vec<u32> {
    fn fill(
        mask: &[u8],
        labels: &mut [u32],
        (w, h): (usize, usize),
        eight: bool,
        x: i64,
        y: i64,
        label: u32,
    ) {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            return;
        }
        let i = y as usize * w + x as usize;
        if mask[i] == 0 || labels[i] != 0 {
            return;
        }
        labels[i] = label;
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                if (dx, dy) == (0, 0) || (!eight && dx != 0 && dy != 0) {
                    continue;
                }
                fill(mask, labels, (w, h), eight, x + dx, y + dy, label);
            }
        }
    }

    let mut labels = vec![0u32; mask.len()];
    let mut next = 0;
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            if mask[i] != 0 && labels[i] == 0 {
                next += 1;
                fill(
                    mask,
                    &mut labels,
                    (width, height),
                    eight,
                    x as i64,
                    y as i64,
                    next,
                );
            }
        }
    }
    labels
}

/// True when two labelings induce the same partition of the pixels, with
/// background fixed at 0 in both.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd: HashMap<u32, u32> = HashMap::new();
    let mut back: HashMap<u32, u32> = HashMap::new();
    for (&p, &q) in a.iter().zip(b) {
        if (p == 0) != (q == 0) {
            return false;
        }
        if *fwd.entry(p).or_insert(q) != q || *back.entry(q).or_insert(p) != p {
            return false;
        }
    }
    true
}

/// Textbook integer midpoint circle about the origin, mirrored to all eight
/// octants.
pub fn midpoint_circle(r: i64) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    let (mut x, mut y) = (0i64, r);
    let mut d = 1 - r;
    while x <= y {
        for (px, py) in [(x, y), (y, x)] {
            for (sx, sy) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                out.insert((sx * px, sy * py));
            }
        }
        if d < 0 {
            d += 2 * x + 3;
        } else {
            d += 2 * (x - y) + 5;
            y -= 1;
        }
        x += 1;
    }
    out
}

/// One level of the 2D Haar transform written out per output coefficient:
/// for the 2x2 block `p q / r s`, LL=(p+q+r+s)/4, HL=(p-q+r-s)/4,
/// LH=(p+q-r-s)/4, HH=(p-q-r+s)/4. Returns `(ll, hl, lh, hh)` planes.
pub fn haar_quad_formula(
    data: &[f64],
    width: usize,
    height: usize,
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let (hw, hh) = (width / 2, height / 2);
    let mut out = (
        Vec::with_capacity(hw * hh),
        Vec::with_capacity(hw * hh),
        Vec::with_capacity(hw * hh),
        Vec::with_capacity(hw * hh),
    );
    for y in 0..hh {
        for x in 0..hw {
            let p = data[2 * y * width + 2 * x];
            let q = data[2 * y * width + 2 * x + 1];
            let r = data[(2 * y + 1) * width + 2 * x];
            let s = data[(2 * y + 1) * width + 2 * x + 1];
            out.0.push((p + q + r + s) / 4.0);
            out.1.push((p - q + r - s) / 4.0);
            out.2.push((p + q - r - s) / 4.0);
            out.3.push((p - q - r + s) / 4.0);
        }
    }
    out
}

/// Sum of x, sum of y and count over the set pixels, by direct double loop.
pub fn double_sum_moments(mask: &[u8], width: usize, height: usize) -> (u64, u64, u64) {
    let (mut sx, mut sy, mut m) = (0u64, 0u64, 0u64);
    for y in 0..height {
        for x in 0..width {
            let f = u64::from(mask[y * width + x]);
            sx += f * x as u64;
            sy += f * y as u64;
            m += f;
        }
    }
    (sx, sy, m)
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Subject of the first gallery row with the smallest L1 distance.
pub fn brute_force_argmin<'a>(probe: &[f64], gallery: &'a [(String, Vec<f64>)]) -> &'a str {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, (_, g)) in gallery.iter().enumerate() {
        let d = l1(probe, g);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    &gallery[best].0
}

pub fn random_mask<R: Rng>(rng: &mut R, len: usize, density: f64) -> Vec<u8> {
    (0..len).map(|_| u8::from(rng.gen_bool(density))).collect()
}

/// Quantized-looking series: integers in 0..=255.
pub fn random_series<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| f64::from(rng.gen_range(0u8..=255)))
        .collect()
}
