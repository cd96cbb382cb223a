//! Unnormalized Haar transform: pair averages `(a + b) / 2` and half
//! differences `(a - b) / 2`, plus the recursive quad (LL/LH/HL/HH) pyramid.
//!
//! Inputs are 8-bit samples, so every coefficient is a dyadic rational with
//! few fractional bits and `f64` represents all of them exactly. The inverse
//! therefore reproduces the source bit for bit.

use std::fmt;

use crate::error::{Error, Result};
use crate::imaging::GrayImage;

/// One Haar analysis step: `(averages, details)`.
pub fn haar_step_1d(signal: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if signal.is_empty() || !signal.len().is_multiple_of(2) {
        return Err(Error::OddLength(signal.len()));
    }
    let half = signal.len() / 2;
    let mut avg = Vec::with_capacity(half);
    let mut det = Vec::with_capacity(half);
    for pair in signal.chunks_exact(2) {
        avg.push((pair[0] + pair[1]) / 2.0);
        det.push((pair[0] - pair[1]) / 2.0);
    }
    Ok((avg, det))
}

/// Inverse of [`haar_step_1d`]: `s[2k] = avg[k] + det[k]`,
/// `s[2k+1] = avg[k] - det[k]`.
pub fn haar_inverse_step_1d(avg: &[f64], det: &[f64]) -> Result<Vec<f64>> {
    if avg.len() != det.len() {
        return Err(Error::LengthMismatch(format!(
            "{} averages vs {} details",
            avg.len(),
            det.len()
        )));
    }
    Ok(avg
        .iter()
        .zip(det)
        .flat_map(|(&a, &d)| [a + d, a - d])
        .collect())
}

/// Full 1D decomposition: recurse on the averages until one remains. The
/// output is `[overall mean, coarsest detail, ..., finest details]`.
pub fn haar_full_1d(signal: &[f64]) -> Result<Vec<f64>> {
    if !signal.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(signal.len()));
    }
    let mut out = signal.to_vec();
    let mut len = signal.len();
    while len > 1 {
        let (avg, det) = haar_step_1d(&out[..len])?;
        let half = len / 2;
        out[..half].copy_from_slice(&avg);
        out[half..len].copy_from_slice(&det);
        len = half;
    }
    Ok(out)
}

pub fn haar_inverse_full_1d(coeffs: &[f64]) -> Result<Vec<f64>> {
    if !coeffs.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(coeffs.len()));
    }
    let mut out = coeffs.to_vec();
    let mut len = 1;
    while len < coeffs.len() {
        let merged = haar_inverse_step_1d(&out[..len], &out[len..2 * len])?;
        out[..2 * len].copy_from_slice(&merged);
        len *= 2;
    }
    Ok(out)
}

/// Row-major raster of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width * height != data.len() {
            return Err(Error::InvalidDimensions(format!(
                "{width}x{height} needs {} values, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Plane {
            width,
            height,
            data,
        })
    }

    pub fn from_gray(img: &GrayImage) -> Self {
        Plane {
            width: img.width(),
            height: img.height(),
            data: img.pixels().iter().map(|&p| f64::from(p)).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Round half up and clamp to `[0, 255]`.
    pub fn to_gray_rounded(&self) -> GrayImage {
        self.to_gray_offset(0.0)
    }

    /// Detail coefficients shifted by +128 so zero maps to mid-gray.
    pub fn to_gray_detail(&self) -> GrayImage {
        self.to_gray_offset(128.0)
    }

    fn to_gray_offset(&self, offset: f64) -> GrayImage {
        let px = self
            .data
            .iter()
            .map(|&v| (v + offset + 0.5).floor().clamp(0.0, 255.0) as u8)
            .collect();
        GrayImage::new(self.width, self.height, px).expect("plane dimensions are consistent")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandKind {
    /// approximation
    LL,
    /// low-pass along rows, high-pass along columns (horizontal detail)
    LH,
    /// high-pass along rows, low-pass along columns (vertical detail)
    HL,
    /// diagonal detail
    HH,
}

impl fmt::Display for BandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BandKind::LL => "LL",
            BandKind::LH => "LH",
            BandKind::HL => "HL",
            BandKind::HH => "HH",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subband {
    pub kind: BandKind,
    pub level: u8,
    pub plane: Plane,
}

impl Subband {
    /// PGM-ready view: LL rounded, details offset by +128.
    pub fn to_gray(&self) -> GrayImage {
        match self.kind {
            BandKind::LL => self.plane.to_gray_rounded(),
            _ => self.plane.to_gray_detail(),
        }
    }
}

/// The four subbands of one decomposition level.
#[derive(Debug, Clone, PartialEq)]
pub struct Quad {
    pub ll: Subband,
    pub lh: Subband,
    pub hl: Subband,
    pub hh: Subband,
}

/// One 2D level: a Haar step along every row (averages left, details
/// right), then along every column of the result (averages top, details
/// bottom). Quadrants: LL top-left, HL top-right, LH bottom-left, HH
/// bottom-right.
pub fn quad_decompose(img: &Plane) -> Result<Quad> {
    quad_decompose_at(img, 1)
}

fn quad_decompose_at(img: &Plane, level: u8) -> Result<Quad> {
    let (w, h) = (img.width, img.height);
    if w == 0 || h == 0 || w % 2 != 0 || h % 2 != 0 {
        return Err(Error::OddDimension {
            width: w,
            height: h,
        });
    }
    let (hw, hh) = (w / 2, h / 2);

    let mut rows = vec![0.0; w * h];
    for (src, dst) in img.data.chunks_exact(w).zip(rows.chunks_exact_mut(w)) {
        let (avg, det) = haar_step_1d(src)?;
        dst[..hw].copy_from_slice(&avg);
        dst[hw..].copy_from_slice(&det);
    }

    let mut out = vec![0.0; w * h];
    let mut column = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            column[y] = rows[y * w + x];
        }
        let (avg, det) = haar_step_1d(&column)?;
        for y in 0..hh {
            out[y * w + x] = avg[y];
            out[(y + hh) * w + x] = det[y];
        }
    }

    let quadrant = |x0: usize, y0: usize, kind: BandKind| {
        let mut data = Vec::with_capacity(hw * hh);
        for y in y0..y0 + hh {
            data.extend_from_slice(&out[y * w + x0..y * w + x0 + hw]);
        }
        Subband {
            kind,
            level,
            plane: Plane {
                width: hw,
                height: hh,
                data,
            },
        }
    };
    Ok(Quad {
        ll: quadrant(0, 0, BandKind::LL),
        hl: quadrant(hw, 0, BandKind::HL),
        lh: quadrant(0, hh, BandKind::LH),
        hh: quadrant(hw, hh, BandKind::HH),
    })
}

/// Inverse of one quad level: columns first, then rows.
fn quad_reconstruct(q: &Quad) -> Result<Plane> {
    let (hw, hh) = (q.ll.plane.width, q.ll.plane.height);
    for band in [&q.lh, &q.hl, &q.hh] {
        if band.plane.width != hw || band.plane.height != hh {
            return Err(Error::MalformedPyramid(format!(
                "{} band is {}x{}, LL is {hw}x{hh}",
                band.kind, band.plane.width, band.plane.height
            )));
        }
    }
    let (w, h) = (2 * hw, 2 * hh);

    // reassemble the quadrant layout, then undo the column pass
    let mut cols = vec![0.0; w * h];
    for x in 0..w {
        let (top, bottom) = if x < hw {
            (&q.ll, &q.lh)
        } else {
            (&q.hl, &q.hh)
        };
        let bx = x % hw;
        let avg: Vec<f64> = (0..hh).map(|y| top.plane.get(bx, y)).collect();
        let det: Vec<f64> = (0..hh).map(|y| bottom.plane.get(bx, y)).collect();
        let merged = haar_inverse_step_1d(&avg, &det)?;
        for (y, v) in merged.into_iter().enumerate() {
            cols[y * w + x] = v;
        }
    }

    let mut data = Vec::with_capacity(w * h);
    for row in cols.chunks_exact(w) {
        data.extend(haar_inverse_step_1d(&row[..hw], &row[hw..])?);
    }
    Ok(Plane {
        width: w,
        height: h,
        data,
    })
}

/// Quad decompositions from level 1 down to the deepest requested level.
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    levels: Vec<Quad>,
    source_width: usize,
    source_height: usize,
}

impl Pyramid {
    pub fn from_levels(levels: Vec<Quad>, source_width: usize, source_height: usize) -> Self {
        Pyramid {
            levels,
            source_width,
            source_height,
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Quad] {
        &self.levels
    }

    /// Quad at `level` (1-based).
    pub fn level(&self, level: usize) -> Option<&Quad> {
        level.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    /// Approximation band at `level` (1-based).
    pub fn ll(&self, level: usize) -> Option<&Subband> {
        self.level(level).map(|q| &q.ll)
    }

    pub fn source_dims(&self) -> (usize, usize) {
        (self.source_width, self.source_height)
    }
}

pub fn decompose_to_level(img: &Plane, level: u8) -> Result<Pyramid> {
    let div = 1usize
        .checked_shl(u32::from(level))
        .filter(|_| level >= 1)
        .ok_or(Error::InsufficientDivisibility {
            width: img.width,
            height: img.height,
            level,
        })?;
    if img.width == 0
        || img.height == 0
        || !img.width.is_multiple_of(div)
        || !img.height.is_multiple_of(div)
    {
        return Err(Error::InsufficientDivisibility {
            width: img.width,
            height: img.height,
            level,
        });
    }
    let mut levels: Vec<Quad> = Vec::with_capacity(level as usize);
    for l in 1..=level {
        let quad = match levels.last() {
            None => quad_decompose_at(img, l)?,
            Some(prev) => quad_decompose_at(&prev.ll.plane, l)?,
        };
        levels.push(quad);
    }
    Ok(Pyramid {
        levels,
        source_width: img.width,
        source_height: img.height,
    })
}

pub fn reconstruct(p: &Pyramid) -> Result<Plane> {
    let deepest = p
        .levels
        .last()
        .ok_or_else(|| Error::MalformedPyramid("no levels".into()))?;
    let mut ll = deepest.ll.plane.clone();
    for (i, quad) in p.levels.iter().enumerate().rev() {
        if ll.width != quad.ll.plane.width || ll.height != quad.ll.plane.height {
            return Err(Error::MalformedPyramid(format!(
                "level {} LL is {}x{}, expected {}x{}",
                i + 1,
                quad.ll.plane.width,
                quad.ll.plane.height,
                ll.width,
                ll.height
            )));
        }
        let q = Quad {
            ll: Subband {
                kind: BandKind::LL,
                level: quad.ll.level,
                plane: ll,
            },
            lh: quad.lh.clone(),
            hl: quad.hl.clone(),
            hh: quad.hh.clone(),
        };
        ll = quad_reconstruct(&q)?;
    }
    if (ll.width, ll.height) != (p.source_width, p.source_height) {
        return Err(Error::MalformedPyramid(format!(
            "reconstructs to {}x{}, source was {}x{}",
            ll.width, ll.height, p.source_width, p.source_height
        )));
    }
    Ok(ll)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(w: usize, h: usize, v: &[f64]) -> Plane {
        Plane::new(w, h, v.to_vec()).unwrap()
    }

    #[test]
    fn worked_example_step() {
        let (a, d) = haar_step_1d(&[10.0, 4.0, 9.0, 5.0]).unwrap();
        assert_eq!((a, d), (vec![7.0, 7.0], vec![3.0, 2.0]));
        let (a, d) = haar_step_1d(&[7.0, 7.0]).unwrap();
        assert_eq!((a, d), (vec![7.0], vec![0.0]));
    }

    #[test]
    fn worked_example_full() {
        assert_eq!(
            haar_full_1d(&[10.0, 4.0, 9.0, 5.0]).unwrap(),
            vec![7.0, 0.0, 3.0, 2.0]
        );
        assert_eq!(haar_full_1d(&[6.0; 4]).unwrap(), vec![6.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            haar_inverse_step_1d(&[7.0, 7.0], &[3.0, 2.0]).unwrap(),
            vec![10.0, 4.0, 9.0, 5.0]
        );
    }

    #[test]
    fn length_errors() {
        assert!(matches!(
            haar_step_1d(&[1.0, 2.0, 3.0]),
            Err(Error::OddLength(3))
        ));
        assert!(matches!(haar_step_1d(&[]), Err(Error::OddLength(0))));
        assert!(matches!(
            haar_full_1d(&[1.0; 6]),
            Err(Error::NotPowerOfTwo(6))
        ));
    }

    #[test]
    fn full_round_trip_length_eight() {
        let s = [3.0, 250.0, 17.0, 0.0, 99.0, 100.0, 255.0, 1.0];
        let c = haar_full_1d(&s).unwrap();
        assert_eq!(haar_inverse_full_1d(&c).unwrap(), s.to_vec());
    }

    #[test]
    fn two_by_two_block() {
        let q = quad_decompose(&plane(2, 2, &[1.0, 2.0, 3.0, 6.0])).unwrap();
        assert_eq!(q.ll.plane.data(), &[3.0]);
        // rows: [1.5, -0.5], [4.5, -1.5]; cols: avg [3, -1], det [-1.5, 0.5]
        assert_eq!(q.hl.plane.data(), &[-1.0]);
        assert_eq!(q.lh.plane.data(), &[-1.5]);
        assert_eq!(q.hh.plane.data(), &[0.5]);
    }

    #[test]
    fn constant_plane_has_zero_details() {
        let q = quad_decompose(&plane(4, 6, &[42.0; 24])).unwrap();
        assert!(q.ll.plane.data().iter().all(|&v| v == 42.0));
        for b in [&q.lh, &q.hl, &q.hh] {
            assert!(b.plane.data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn odd_dimensions_rejected() {
        assert!(matches!(
            quad_decompose(&plane(3, 2, &[0.0; 6])),
            Err(Error::OddDimension { .. })
        ));
        assert!(matches!(
            decompose_to_level(&plane(6, 8, &[0.0; 48]), 2),
            Err(Error::InsufficientDivisibility { .. })
        ));
    }

    #[test]
    fn qvga_input_halves_twice() {
        let img = Plane::new(320, 240, vec![1.0; 320 * 240]).unwrap();
        let p = decompose_to_level(&img, 2).unwrap();
        let ll2 = p.ll(2).unwrap();
        assert_eq!((ll2.plane.width(), ll2.plane.height()), (80, 60));
        assert_eq!(p.ll(1).unwrap(), &quad_decompose(&img).unwrap().ll);
    }

    #[test]
    fn constant_pyramid_reconstructs() {
        let img = plane(8, 8, &[5.0; 64]);
        let p = decompose_to_level(&img, 3).unwrap();
        assert_eq!(reconstruct(&p).unwrap(), img);
    }

    #[test]
    fn malformed_pyramids() {
        assert!(matches!(
            reconstruct(&Pyramid::from_levels(vec![], 4, 4)),
            Err(Error::MalformedPyramid(_))
        ));
        let img = plane(4, 4, &[1.0; 16]);
        let mut q = quad_decompose(&img).unwrap();
        q.hh.plane = plane(1, 1, &[0.0]);
        assert!(matches!(
            reconstruct(&Pyramid::from_levels(vec![q], 4, 4)),
            Err(Error::MalformedPyramid(_))
        ));
    }

    #[test]
    fn subband_export() {
        let b = Subband {
            kind: BandKind::HL,
            level: 1,
            plane: plane(3, 1, &[-127.5, 0.0, 12.5]),
        };
        assert_eq!(b.to_gray().pixels(), &[1, 128, 141]);
        let ll = Subband {
            kind: BandKind::LL,
            level: 1,
            plane: plane(2, 1, &[12.5, 254.75]),
        };
        assert_eq!(ll.to_gray().pixels(), &[13, 255]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn even_plane() -> impl Strategy<Value = Plane> {
            (1usize..12, 1usize..12).prop_flat_map(|(hw, hh)| {
                proptest::collection::vec(0u8..=255, 4 * hw * hh).prop_map(move |v| {
                    Plane::new(2 * hw, 2 * hh, v.into_iter().map(f64::from).collect()).unwrap()
                })
            })
        }

        fn quad_plane() -> impl Strategy<Value = Plane> {
            (1usize..8, 1usize..8).prop_flat_map(|(qw, qh)| {
                proptest::collection::vec(0u8..=255, 16 * qw * qh).prop_map(move |v| {
                    Plane::new(4 * qw, 4 * qh, v.into_iter().map(f64::from).collect()).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn linearity(a in even_plane(), seed in any::<u64>(), alpha in -8i32..8, beta in -8i32..8) {
                // dyadic coefficients keep every product exact
                let (alpha, beta) = (alpha as f64 / 4.0, beta as f64 / 2.0);
                let b: Vec<f64> = (0..a.data().len())
                    .map(|i| ((seed.wrapping_mul(i as u64 + 1) >> 7) % 256) as f64)
                    .collect();
                let b = Plane::new(a.width(), a.height(), b).unwrap();
                let mix = Plane::new(
                    a.width(),
                    a.height(),
                    a.data().iter().zip(b.data()).map(|(x, y)| alpha * x + beta * y).collect(),
                ).unwrap();
                let (qa, qb, qm) = (quad_decompose(&a).unwrap(), quad_decompose(&b).unwrap(), quad_decompose(&mix).unwrap());
                for (ba, bb, bm) in [(&qa.ll, &qb.ll, &qm.ll), (&qa.lh, &qb.lh, &qm.lh), (&qa.hl, &qb.hl, &qm.hl), (&qa.hh, &qb.hh, &qm.hh)] {
                    for ((x, y), m) in ba.plane.data().iter().zip(bb.plane.data()).zip(bm.plane.data()) {
                        prop_assert_eq!(alpha * x + beta * y, *m);
                    }
                }
            }

            #[test]
            fn mean_preserved_and_bands_bounded(img in quad_plane()) {
                let p = decompose_to_level(&img, 2).unwrap();
                for q in p.levels() {
                    prop_assert_eq!(q.ll.plane.mean(), img.mean());
                    prop_assert!(q.ll.plane.data().iter().all(|&v| (0.0..=255.0).contains(&v)));
                    for band in [&q.lh, &q.hl, &q.hh] {
                        prop_assert!(band.plane.data().iter().all(|&v| (-127.5..=127.5).contains(&v)));
                    }
                }
                let ll2 = p.ll(2).unwrap();
                prop_assert_eq!(ll2.plane.data().len() * 16, img.data().len());
            }

            #[test]
            fn round_trip(img in quad_plane()) {
                for level in 1..=2 {
                    let p = decompose_to_level(&img, level).unwrap();
                    prop_assert_eq!(reconstruct(&p).unwrap(), img.clone());
                }
            }
        }
    }
}
