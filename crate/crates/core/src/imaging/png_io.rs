use std::io::Cursor;

use png::{BitDepth, ColorType, Decoder, Transformations};

use super::{ColorImage, DecodedImage, GrayImage};
use crate::error::{Error, Result};

/// Decode an 8-bit grayscale or RGB PNG. Other bit depths and color types
/// are rejected rather than converted.
pub(super) fn decode_png(bytes: &[u8]) -> Result<DecodedImage> {
    let mut decoder = Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::MalformedFile(format!("png: {e}")))?;

    let info = reader.info();
    if info.bit_depth != BitDepth::Eight {
        return Err(Error::UnsupportedDepth(format!(
            "png bit depth {:?}, only 8-bit is supported",
            info.bit_depth
        )));
    }
    let color_type = info.color_type;
    if !matches!(color_type, ColorType::Grayscale | ColorType::Rgb) {
        return Err(Error::MalformedFile(format!(
            "png color type {color_type:?}, only grayscale and RGB are supported"
        )));
    }

    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::MalformedFile("png: image too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::MalformedFile(format!("png: {e}")))?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let channels = if color_type == ColorType::Rgb { 3 } else { 1 };

    let mut samples = Vec::with_capacity(w * h * channels);
    for row in buf.chunks(frame.line_size).take(h) {
        samples.extend_from_slice(&row[..w * channels]);
    }
    if channels == 1 {
        Ok(DecodedImage::Gray(GrayImage::new(w, h, samples)?))
    } else {
        let px = samples
            .chunks_exact(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        Ok(DecodedImage::Color(ColorImage::new(w, h, px)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encode(w: u32, h: u32, color: ColorType, depth: BitDepth, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, w, h);
            enc.set_color(color);
            enc.set_depth(depth);
            let mut writer = enc.write_header().unwrap();
            writer.write_image_data(data).unwrap();
        }
        out
    }

    #[test]
    fn gray_png() {
        let bytes = encode(
            2,
            2,
            ColorType::Grayscale,
            BitDepth::Eight,
            &[0, 10, 20, 30],
        );
        let img = super::super::decode_image(&bytes).unwrap();
        assert_eq!(
            img,
            DecodedImage::Gray(GrayImage::new(2, 2, vec![0, 10, 20, 30]).unwrap())
        );
    }

    #[test]
    fn rgb_png() {
        let bytes = encode(1, 2, ColorType::Rgb, BitDepth::Eight, &[255, 0, 0, 1, 2, 3]);
        match decode_png(&bytes).unwrap() {
            DecodedImage::Color(c) => assert_eq!(c.pixels(), &[[255, 0, 0], [1, 2, 3]]),
            other => panic!("expected color, got {other:?}"),
        }
    }

    #[test]
    fn sixteen_bit_png_rejected() {
        let bytes = encode(1, 1, ColorType::Grayscale, BitDepth::Sixteen, &[1, 2]);
        assert!(matches!(
            decode_png(&bytes),
            Err(Error::UnsupportedDepth(_))
        ));
    }

    #[test]
    fn truncated_png_is_malformed() {
        let bytes = encode(4, 4, ColorType::Grayscale, BitDepth::Eight, &[7; 16]);
        let cut = &bytes[..bytes.len() - 20];
        assert!(matches!(decode_png(cut), Err(Error::MalformedFile(_))));
    }
}
