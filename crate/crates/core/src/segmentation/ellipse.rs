//! Elliptical face region: axis derivation from the mask, boundary
//! rasterization and the masked crop.

use super::Centroid;
use crate::error::{Error, Result};
use crate::imaging::{BinaryImage, GrayImage};

/// Axis-aligned ellipse on the pixel grid.
///
/// `semi_minor` is the horizontal semi-axis (centroid to ear) and
/// `semi_major` the vertical one (centroid to forehead). The names follow
/// face anatomy; nothing forces `semi_major >= semi_minor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EllipseSpec {
    center_x: usize,
    center_y: usize,
    semi_minor: usize,
    semi_major: usize,
}

impl EllipseSpec {
    pub fn new(
        center_x: usize,
        center_y: usize,
        semi_minor: usize,
        semi_major: usize,
    ) -> Result<Self> {
        if semi_minor == 0 || semi_major == 0 {
            return Err(Error::InvalidEllipse(format!(
                "semi-axes must be >= 1, got minor={semi_minor} major={semi_major}"
            )));
        }
        Ok(EllipseSpec {
            center_x,
            center_y,
            semi_minor,
            semi_major,
        })
    }

    pub fn center(&self) -> (usize, usize) {
        (self.center_x, self.center_y)
    }

    pub fn semi_minor(&self) -> usize {
        self.semi_minor
    }

    pub fn semi_major(&self) -> usize {
        self.semi_major
    }

    /// `ry² dx² + rx² dy² - rx² ry²` for an offset from the center; `<= 0`
    /// inside or on the ellipse.
    #[inline]
    pub fn implicit(&self, dx: i64, dy: i64) -> i64 {
        let rx2 = (self.semi_minor as i64).pow(2);
        let ry2 = (self.semi_major as i64).pow(2);
        ry2 * dx * dx + rx2 * dy * dy - rx2 * ry2
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        let dx = x as i64 - self.center_x as i64;
        let dy = y as i64 - self.center_y as i64;
        self.implicit(dx, dy) <= 0
    }
}

/// Measure the ellipse axes from the mask around the rounded centroid.
///
/// The horizontal semi-axis is the distance to the farthest foreground pixel
/// in the centroid's row (either side); the vertical one is the distance up
/// to the topmost foreground pixel in the centroid's column. Both are
/// clamped so the ellipse stays inside the image, then floored at 1.
pub fn derive_ellipse(mask: &BinaryImage, c: &Centroid) -> Result<EllipseSpec> {
    if c.mass() == 0 {
        return Err(Error::NoForeground);
    }
    let (w, h) = (mask.width(), mask.height());
    let (cx, cy) = c.rounded();
    if cx >= w || cy >= h {
        return Err(Error::OutOfBounds(format!(
            "centroid ({cx}, {cy}) outside {w}x{h} mask"
        )));
    }

    let horizontal = (0..w)
        .filter(|&x| mask.is_set(x, cy))
        .map(|x| x.abs_diff(cx))
        .max()
        .unwrap_or(0);
    let vertical = (0..=cy)
        .find(|&y| mask.is_set(cx, y))
        .map(|top| cy - top)
        .unwrap_or(0);

    let semi_minor = horizontal.min(cx).min(w - 1 - cx).max(1);
    let semi_major = vertical.min(cy).min(h - 1 - cy).max(1);
    EllipseSpec::new(cx, cy, semi_minor, semi_major)
}

/// Midpoint (Bresenham-style) ellipse boundary, as absolute pixel
/// coordinates. Points may have negative coordinates if the ellipse runs off
/// the grid; the set is sorted and deduplicated.
pub fn rasterize_ellipse(spec: &EllipseSpec) -> Vec<(i64, i64)> {
    let mut quadrant = Vec::new();
    let rx = spec.semi_minor as i64;
    let ry = spec.semi_major as i64;
    let rx2 = rx * rx;
    let ry2 = ry * ry;

    // Decision variables are kept at 4x scale so the quarter-pixel midpoint
    // offsets stay integral.
    let (mut x, mut y) = (0i64, ry);
    let mut dx = 0i64; // 2 ry² x
    let mut dy = 2 * rx2 * y; // 2 rx² y
    let mut d1 = 4 * ry2 - 4 * rx2 * ry + rx2;
    while dx < dy {
        quadrant.push((x, y));
        x += 1;
        dx += 2 * ry2;
        if d1 < 0 {
            d1 += 4 * (dx + ry2);
        } else {
            y -= 1;
            dy -= 2 * rx2;
            d1 += 4 * (dx - dy + ry2);
        }
    }

    let mut d2 = ry2 * (2 * x + 1) * (2 * x + 1) + 4 * rx2 * (y - 1) * (y - 1) - 4 * rx2 * ry2;
    while y >= 0 {
        quadrant.push((x, y));
        y -= 1;
        dy -= 2 * rx2;
        if d2 > 0 {
            d2 += 4 * (rx2 - dy);
        } else {
            x += 1;
            dx += 2 * ry2;
            d2 += 4 * (dx - dy + rx2);
        }
    }

    let (cx, cy) = (spec.center_x as i64, spec.center_y as i64);
    let mut points: Vec<(i64, i64)> = quadrant
        .into_iter()
        .flat_map(|(qx, qy)| {
            [
                (cx + qx, cy + qy),
                (cx - qx, cy + qy),
                (cx + qx, cy - qy),
                (cx - qx, cy - qy),
            ]
        })
        .collect();
    points.sort_unstable();
    points.dedup();
    points
}

/// Face cut to the ellipse bounding box. Pixels outside the ellipse are 0.
/// Width and height are zero-padded on the right/bottom to multiples of 4 so
/// two Haar levels divide evenly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceCrop {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
    mask: Vec<u8>,
    ellipse_width: usize,
    ellipse_height: usize,
}

impl FaceCrop {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn mask(&self) -> &[u8] {
        &self.mask
    }

    /// Bounding box of the ellipse before padding.
    pub fn ellipse_dims(&self) -> (usize, usize) {
        (self.ellipse_width, self.ellipse_height)
    }

    pub fn interior_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m != 0).count()
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage::new(self.width, self.height, self.pixels.clone())
            .expect("crop has consistent dimensions")
    }

    pub fn mask_image(&self) -> BinaryImage {
        BinaryImage::new(self.width, self.height, self.mask.clone())
            .expect("crop has consistent dimensions")
    }
}

fn pad_to_four(n: usize) -> usize {
    n.div_ceil(4) * 4
}

pub fn crop_face(gray: &GrayImage, spec: &EllipseSpec) -> Result<FaceCrop> {
    let (cx, cy) = spec.center();
    let (rx, ry) = (spec.semi_minor(), spec.semi_major());
    if cx < rx || cy < ry || cx + rx >= gray.width() || cy + ry >= gray.height() {
        return Err(Error::OutOfBounds(format!(
            "ellipse at ({cx}, {cy}) with semi-axes {rx}x{ry} exceeds {}x{} image",
            gray.width(),
            gray.height()
        )));
    }
    let (x0, y0) = (cx - rx, cy - ry);
    let (ew, eh) = (2 * rx + 1, 2 * ry + 1);
    let (w, h) = (pad_to_four(ew), pad_to_four(eh));

    let mut pixels = vec![0u8; w * h];
    let mut mask = vec![0u8; w * h];
    for y in 0..eh {
        for x in 0..ew {
            if spec.contains(x0 + x, y0 + y) {
                pixels[y * w + x] = gray.get(x0 + x, y0 + y);
                mask[y * w + x] = 1;
            }
        }
    }
    Ok(FaceCrop {
        width: w,
        height: h,
        pixels,
        mask,
        ellipse_width: ew,
        ellipse_height: eh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmentation::centroid;

    #[test]
    fn square_mask_axes() {
        let m = BinaryImage::from_fn(11, 11, |_, _| true);
        let c = centroid(&m).unwrap();
        let e = derive_ellipse(&m, &c).unwrap();
        assert_eq!(e.center(), (5, 5));
        assert_eq!((e.semi_minor(), e.semi_major()), (5, 5));
    }

    #[test]
    fn single_pixel_floors_axes_to_one() {
        let m = BinaryImage::from_fn(9, 9, |x, y| x == 4 && y == 4);
        let e = derive_ellipse(&m, &centroid(&m).unwrap()).unwrap();
        assert_eq!((e.semi_minor(), e.semi_major()), (1, 1));
    }

    #[test]
    fn filled_ellipse_axes_recovered() {
        let (a, b) = (20i64, 30i64);
        let (cx, cy) = (40i64, 50i64);
        let m = BinaryImage::from_fn(81, 101, |x, y| {
            let dx = x as i64 - cx;
            let dy = y as i64 - cy;
            b * b * dx * dx + a * a * dy * dy <= a * a * b * b
        });
        let e = derive_ellipse(&m, &centroid(&m).unwrap()).unwrap();
        assert_eq!(e.center(), (40, 50));
        assert!(e.semi_minor().abs_diff(20) <= 1);
        assert!(e.semi_major().abs_diff(30) <= 1);
    }

    #[test]
    fn axes_clamped_near_border() {
        // wide bar touching the left edge near the top: centroid row 1
        let m = BinaryImage::from_fn(20, 10, |_, y| y <= 2);
        let e = derive_ellipse(&m, &centroid(&m).unwrap()).unwrap();
        let (cx, cy) = e.center();
        assert!(cx >= e.semi_minor() && cx + e.semi_minor() < 20);
        assert!(cy >= e.semi_major() && cy + e.semi_major() < 10);
    }

    #[test]
    fn unit_ellipse_is_four_axis_pixels() {
        let e = EllipseSpec::new(5, 5, 1, 1).unwrap();
        assert_eq!(rasterize_ellipse(&e), vec![(4, 5), (5, 4), (5, 6), (6, 5)]);
    }

    #[test]
    fn zero_axis_rejected() {
        assert!(EllipseSpec::new(3, 3, 0, 2).is_err());
    }

    #[test]
    fn constant_crop() {
        let g = GrayImage::from_fn(64, 64, |_, _| 128);
        let e = EllipseSpec::new(30, 32, 10, 14).unwrap();
        let crop = crop_face(&g, &e).unwrap();
        assert_eq!(crop.ellipse_dims(), (21, 29));
        assert_eq!((crop.width(), crop.height()), (24, 32));
        for (p, m) in crop.pixels().iter().zip(crop.mask()) {
            assert_eq!(*p, if *m == 1 { 128 } else { 0 });
        }
    }

    #[test]
    fn crop_out_of_bounds() {
        let g = GrayImage::from_fn(16, 16, |_, _| 1);
        let e = EllipseSpec::new(3, 8, 4, 2).unwrap();
        assert!(matches!(crop_face(&g, &e), Err(Error::OutOfBounds(_))));
    }

    #[test]
    fn interior_area_close_to_analytic() {
        let g = GrayImage::from_fn(200, 200, |_, _| 200);
        for (a, b) in [(20usize, 20usize), (20, 35), (40, 25), (60, 90)] {
            let e = EllipseSpec::new(100, 100, a, b).unwrap();
            let n = crop_face(&g, &e).unwrap().interior_count() as f64;
            let area = std::f64::consts::PI * a as f64 * b as f64;
            assert!(
                (n - area).abs() / area < 0.05,
                "a={a} b={b} n={n} area={area}"
            );
        }
    }

    #[test]
    fn crop_of_crop_is_identical() {
        let g = GrayImage::from_fn(80, 70, |x, y| ((x * 7 + y * 13) % 251) as u8);
        let e = EllipseSpec::new(40, 35, 15, 22).unwrap();
        let first = crop_face(&g, &e).unwrap();
        let rebased = EllipseSpec::new(15, 22, 15, 22).unwrap();
        let second = crop_face(&first.to_gray(), &rebased).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn mask_matches_exhaustive_interior_scan() {
        let g = GrayImage::from_fn(50, 50, |_, _| 9);
        let e = EllipseSpec::new(25, 24, 7, 11).unwrap();
        let crop = crop_face(&g, &e).unwrap();
        for y in 0..crop.height() {
            for x in 0..crop.width() {
                let dx = x as f64 - 7.0;
                let dy = y as f64 - 11.0;
                let inside = dx * dx / 49.0 + dy * dy / 121.0 <= 1.0;
                assert_eq!(crop.mask()[y * crop.width() + x] == 1, inside, "({x},{y})");
            }
        }
    }
}
