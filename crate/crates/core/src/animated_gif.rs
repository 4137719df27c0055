//! GIF89a encoder: one global palette from median-cut quantization over all
//! frames, LZW-compressed full frames, infinite looping.

use std::collections::HashMap;

use thiserror::Error;

use crate::render::RasterImage;

const MAX_COLORS: usize = 256;
const MIN_CODE_SIZE: u8 = 8;
const MAX_CODE: u16 = 4095;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GifError {
    #[error("no frames to encode")]
    NoFrames,
    #[error("frame {index} is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    DimensionMismatch { index: usize, want_w: u32, want_h: u32, got_w: u32, got_h: u32 },
    #[error("image dimension {0} exceeds the GIF limit of 65535")]
    TooLarge(u32),
}

/// Per-frame delay in hundredths of a second.
pub fn frame_delay_cs(fps: u32) -> u16 {
    (100.0 / fps.max(1) as f64).round() as u16
}

type Color = [u8; 3];

fn rgb(px: &[u8]) -> Color {
    [px[0], px[1], px[2]]
}

/// Color histogram over every frame, sorted by color for determinism.
fn histogram(frames: &[RasterImage]) -> Vec<(Color, u64)> {
    let mut counts: HashMap<Color, u64> = HashMap::new();
    for f in frames {
        let mut run: Option<(Color, u64)> = None;
        for px in f.pixels.chunks_exact(4) {
            let c = rgb(px);
            match &mut run {
                Some((rc, n)) if *rc == c => *n += 1,
                _ => {
                    if let Some((rc, n)) = run {
                        *counts.entry(rc).or_default() += n;
                    }
                    run = Some((c, 1));
                }
            }
        }
        if let Some((rc, n)) = run {
            *counts.entry(rc).or_default() += n;
        }
    }
    let mut out: Vec<_> = counts.into_iter().collect();
    out.sort_unstable();
    out
}

struct ColorBox {
    entries: Vec<(Color, u64)>,
}

impl ColorBox {
    fn range(&self, ch: usize) -> u8 {
        let lo = self.entries.iter().map(|e| e.0[ch]).min().unwrap_or(0);
        let hi = self.entries.iter().map(|e| e.0[ch]).max().unwrap_or(0);
        hi - lo
    }

    /// Widest channel, ties to the lower channel index (r, g, b).
    fn widest(&self) -> (usize, u8) {
        let mut best = (0, self.range(0));
        for ch in 1..3 {
            let r = self.range(ch);
            if r > best.1 {
                best = (ch, r);
            }
        }
        best
    }

    fn mean(&self) -> Color {
        let total: u64 = self.entries.iter().map(|e| e.1).sum();
        let mut acc = [0u64; 3];
        for (c, n) in &self.entries {
            for k in 0..3 {
                acc[k] += c[k] as u64 * n;
            }
        }
        acc.map(|a| ((a + total / 2) / total) as u8)
    }
}

/// Median cut: split the box with the widest channel range (ties to the earlier
/// box) at the pixel-weighted median of that channel, until `max` boxes.
pub fn median_cut(hist: &[(Color, u64)], max: usize) -> Vec<Color> {
    if hist.len() <= max {
        return hist.iter().map(|e| e.0).collect();
    }
    let mut boxes = vec![ColorBox { entries: hist.to_vec() }];
    while boxes.len() < max {
        let Some((idx, ch)) = boxes
            .iter()
            .enumerate()
            .filter(|(_, b)| b.entries.len() > 1)
            .map(|(i, b)| (i, b.widest()))
            .fold(None, |best: Option<(usize, usize, u8)>, (i, (ch, r))| match best {
                Some((_, _, br)) if br >= r => best,
                _ => Some((i, ch, r)),
            })
            .map(|(i, ch, _)| (i, ch))
        else {
            break;
        };
        let mut entries = std::mem::take(&mut boxes[idx].entries);
        entries.sort_by_key(|e| (e.0[ch], e.0));
        let total: u64 = entries.iter().map(|e| e.1).sum();
        let mut acc = 0;
        let mut cut = 1;
        for (i, e) in entries.iter().enumerate() {
            acc += e.1;
            if acc * 2 >= total {
                cut = (i + 1).clamp(1, entries.len() - 1);
                break;
            }
        }
        let upper = entries.split_off(cut);
        boxes[idx].entries = entries;
        boxes.insert(idx + 1, ColorBox { entries: upper });
    }
    boxes.iter().map(ColorBox::mean).collect()
}

fn nearest(palette: &[Color], c: Color) -> u8 {
    let dist = |p: &Color| (0..3).map(|k| (p[k] as i32 - c[k] as i32).pow(2)).sum::<i32>();
    let mut best = 0;
    for (i, p) in palette.iter().enumerate().skip(1) {
        if dist(p) < dist(&palette[best]) {
            best = i;
        }
    }
    best as u8
}

struct BitWriter {
    out: Vec<u8>,
    acc: u32,
    bits: u8,
}

impl BitWriter {
    fn write(&mut self, code: u16, size: u8) {
        self.acc |= (code as u32) << self.bits;
        self.bits += size;
        while self.bits >= 8 {
            self.out.push(self.acc as u8);
            self.acc >>= 8;
            self.bits -= 8;
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.bits > 0 {
            self.out.push(self.acc as u8);
        }
        self.out
    }
}

/// Variable-width LZW as GIF uses it; the dictionary is a dense
/// `(prefix code, next index) -> code` table reset only where it was written.
pub fn lzw_encode(indices: &[u8], min_code_size: u8) -> Vec<u8> {
    let clear: u16 = 1 << min_code_size;
    let eoi = clear + 1;
    let mut table = vec![0u16; (MAX_CODE as usize + 1) * 256];
    let mut written: Vec<usize> = Vec::new();
    let mut w = BitWriter { out: Vec::new(), acc: 0, bits: 0 };
    let mut size = min_code_size + 1;
    let mut next = eoi + 1;
    w.write(clear, size);
    let Some((&first, rest)) = indices.split_first() else {
        w.write(eoi, size);
        return w.finish();
    };
    let mut prefix = first as u16;
    for &k in rest {
        let slot = prefix as usize * 256 + k as usize;
        let found = table[slot];
        if found != 0 {
            prefix = found;
            continue;
        }
        w.write(prefix, size);
        if next <= MAX_CODE {
            table[slot] = next;
            written.push(slot);
            if next == 1 << size && size < 12 {
                size += 1;
            }
            next += 1;
        } else {
            w.write(clear, size);
            for s in written.drain(..) {
                table[s] = 0;
            }
            size = min_code_size + 1;
            next = eoi + 1;
        }
        prefix = k as u16;
    }
    w.write(prefix, size);
    w.write(eoi, size);
    w.finish()
}

fn push_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn push_sub_blocks(out: &mut Vec<u8>, data: &[u8]) {
    for chunk in data.chunks(255) {
        out.push(chunk.len() as u8);
        out.extend_from_slice(chunk);
    }
    out.push(0);
}

pub fn encode_gif(frames: &[RasterImage], fps: u32) -> Result<Vec<u8>, GifError> {
    let first = frames.first().ok_or(GifError::NoFrames)?;
    let (w, h) = (first.width, first.height);
    for (index, f) in frames.iter().enumerate() {
        if (f.width, f.height) != (w, h) {
            return Err(GifError::DimensionMismatch {
                index,
                want_w: w,
                want_h: h,
                got_w: f.width,
                got_h: f.height,
            });
        }
    }
    for d in [w, h] {
        if d > u16::MAX as u32 {
            return Err(GifError::TooLarge(d));
        }
    }

    let hist = histogram(frames);
    let palette = median_cut(&hist, MAX_COLORS);
    let lookup: HashMap<Color, u8> = hist.iter().map(|(c, _)| (*c, nearest(&palette, *c))).collect();

    let mut out = Vec::new();
    out.extend_from_slice(b"GIF89a");
    push_u16(&mut out, w as u16);
    push_u16(&mut out, h as u16);
    // global table present, 8-bit color resolution, 256 entries
    out.extend_from_slice(&[0xF7, 0, 0]);
    for i in 0..MAX_COLORS {
        out.extend_from_slice(&palette.get(i).copied().unwrap_or([0, 0, 0]));
    }
    // NETSCAPE2.0 application extension, loop count 0 = forever
    out.extend_from_slice(&[0x21, 0xFF, 0x0B]);
    out.extend_from_slice(b"NETSCAPE2.0");
    out.extend_from_slice(&[0x03, 0x01, 0x00, 0x00, 0x00]);

    let delay = frame_delay_cs(fps);
    let mut indices = Vec::with_capacity(w as usize * h as usize);
    for f in frames {
        indices.clear();
        let mut last: Option<(Color, u8)> = None;
        for px in f.pixels.chunks_exact(4) {
            let c = rgb(px);
            let idx = match last {
                Some((lc, li)) if lc == c => li,
                _ => lookup[&c],
            };
            last = Some((c, idx));
            indices.push(idx);
        }
        // graphic control: disposal "leave in place", no transparency
        out.extend_from_slice(&[0x21, 0xF9, 0x04, 0x04]);
        push_u16(&mut out, delay);
        out.extend_from_slice(&[0x00, 0x00]);
        out.push(0x2C);
        push_u16(&mut out, 0);
        push_u16(&mut out, 0);
        push_u16(&mut out, w as u16);
        push_u16(&mut out, h as u16);
        out.push(0x00);
        out.push(MIN_CODE_SIZE);
        push_sub_blocks(&mut out, &lzw_encode(&indices, MIN_CODE_SIZE));
    }
    out.push(0x3B);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decode(bytes: &[u8]) -> Vec<::gif::Frame<'static>> {
        let mut opts = ::gif::DecodeOptions::new();
        opts.set_color_output(::gif::ColorOutput::RGBA);
        let mut dec = opts.read_info(bytes).unwrap();
        let mut frames = Vec::new();
        while let Some(f) = dec.read_next_frame().unwrap() {
            frames.push(f.clone());
        }
        frames
    }

    fn noise_frame(w: u32, h: u32, seed: u64) -> RasterImage {
        let mut rng = crate::rng::SplitMix64::new(seed);
        let pixels = (0..w * h).flat_map(|_| {
            let v = rng.next_u64();
            [v as u8, (v >> 8) as u8, (v >> 16) as u8, 255]
        });
        RasterImage { width: w, height: h, pixels: pixels.collect() }
    }

    #[test]
    fn solid_frame_is_lossless() {
        let f = RasterImage::filled(7, 5, [12, 200, 99]);
        let bytes = encode_gif(std::slice::from_ref(&f), 20).unwrap();
        assert_eq!(&bytes[..6], b"GIF89a");
        let frames = decode(&bytes);
        assert_eq!(frames.len(), 1);
        assert_eq!(&frames[0].buffer[..], &f.pixels[..]);
        assert_eq!(frames[0].delay, 5);
    }

    #[test]
    fn few_colors_round_trip_exactly() {
        let mut f = RasterImage::filled(64, 48, [255, 255, 255]);
        for (i, px) in f.pixels.chunks_exact_mut(4).enumerate() {
            let c = (i * 7 % 200) as u8;
            px.copy_from_slice(&[c, 255 - c, c / 2, 255]);
        }
        let frames = vec![f.clone(), RasterImage::filled(64, 48, [1, 2, 3])];
        let decoded = decode(&encode_gif(&frames, 10).unwrap());
        assert_eq!(decoded.len(), 2);
        assert_eq!(&decoded[0].buffer[..], &f.pixels[..]);
        assert_eq!(&decoded[1].buffer[..4], &[1, 2, 3, 255]);
    }

    #[test]
    fn many_colors_quantize_and_decode() {
        let frames: Vec<_> = (0..3).map(|s| noise_frame(120, 90, s)).collect();
        let bytes = encode_gif(&frames, 20).unwrap();
        assert_eq!(bytes, encode_gif(&frames, 20).unwrap());
        let decoded = decode(&bytes);
        assert_eq!(decoded.len(), 3);
        // every decoded pixel is close to its input under a 256-color cut of uniform noise
        let mut err = 0f64;
        for (d, f) in decoded.iter().zip(&frames) {
            for (a, b) in d.buffer.iter().zip(&f.pixels) {
                err += (*a as f64 - *b as f64).abs();
            }
        }
        let mean = err / (3.0 * 120.0 * 90.0 * 4.0);
        assert!(mean < 24.0, "mean abs error {mean}");
    }

    #[test]
    fn lzw_handles_table_overflow() {
        // long random runs force several clear codes
        let mut rng = crate::rng::SplitMix64::new(9);
        let data: Vec<u8> = (0..200_000).map(|_| rng.below(256) as u8).collect();
        let frame = RasterImage {
            width: 500,
            height: 400,
            pixels: data.iter().flat_map(|&v| [v, v, v, 255]).collect(),
        };
        let decoded = decode(&encode_gif(std::slice::from_ref(&frame), 20).unwrap());
        assert_eq!(&decoded[0].buffer[..], &frame.pixels[..]);
    }

    #[test]
    fn loop_flag_and_errors() {
        let bytes = encode_gif(&[RasterImage::filled(2, 2, [0, 0, 0])], 20).unwrap();
        assert!(bytes.windows(11).any(|w| w == b"NETSCAPE2.0"));
        let dec = ::gif::DecodeOptions::new().read_info(&bytes[..]).unwrap();
        assert_eq!(dec.repeat(), ::gif::Repeat::Infinite);
        assert_eq!(encode_gif(&[], 20), Err(GifError::NoFrames));
        let bad = [RasterImage::filled(2, 2, [0, 0, 0]), RasterImage::filled(3, 2, [0, 0, 0])];
        assert!(matches!(encode_gif(&bad, 20), Err(GifError::DimensionMismatch { index: 1, .. })));
        assert_eq!(frame_delay_cs(20), 5);
        assert_eq!(frame_delay_cs(30), 3);
    }

    #[test]
    fn median_cut_is_exact_below_limit() {
        let hist = vec![([0, 0, 0], 5), ([10, 0, 0], 1), ([0, 0, 255], 2)];
        assert_eq!(median_cut(&hist, 256), vec![[0, 0, 0], [10, 0, 0], [0, 0, 255]]);
        let two = median_cut(&hist, 2);
        assert_eq!(two.len(), 2);
    }
}
