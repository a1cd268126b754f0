//! IONGRID: the self-describing binary container for 2-D map stacks.
//!
//! Layout (little-endian throughout):
//!
//! ```text
//! magic    4 bytes  "IONG"
//! version  u16      currently 1
//! cadence  u32      seconds between nominal frames
//! n_frames u32
//! C, H, W  u16 each
//! names    per channel: u16 byte length + UTF-8 bytes
//! frames   n_frames x { u64 UTC epoch seconds,
//!                       C*H*W f32, row-major, north-to-south,
//!                       west-to-east from longitude -180 }
//! ```

use std::path::Path;

use crate::astro::UnixTime;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

use super::frame::StateFrame;

pub const MAGIC: &[u8; 4] = b"IONG";
pub const VERSION: u16 = 1;

/// A parsed map stack: frames in timestamp order plus the header metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct GridStack {
    pub cadence_s: u32,
    pub channel_names: Vec<String>,
    pub h: usize,
    pub w: usize,
    pub frames: Vec<StateFrame>,
}

impl GridStack {
    pub fn n_channels(&self) -> usize {
        self.channel_names.len()
    }
}

pub fn write_grid_stack(path: &Path, stack: &GridStack) -> Result<()> {
    let c = stack.n_channels();
    if c > u16::MAX as usize || stack.h > u16::MAX as usize || stack.w > u16::MAX as usize {
        return Err(Error::Format("grid dimensions exceed u16 header fields".into()));
    }
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&stack.cadence_s.to_le_bytes());
    buf.extend_from_slice(&(stack.frames.len() as u32).to_le_bytes());
    buf.extend_from_slice(&(c as u16).to_le_bytes());
    buf.extend_from_slice(&(stack.h as u16).to_le_bytes());
    buf.extend_from_slice(&(stack.w as u16).to_le_bytes());
    for name in &stack.channel_names {
        let bytes = name.as_bytes();
        if bytes.len() > u16::MAX as usize {
            return Err(Error::Format(format!("channel name '{name}' too long")));
        }
        buf.extend_from_slice(&(bytes.len() as u16).to_le_bytes());
        buf.extend_from_slice(bytes);
    }
    let plane = c * stack.h * stack.w;
    let mut prev: Option<UnixTime> = None;
    for f in &stack.frames {
        if f.t < 0 {
            return Err(Error::Format(format!(
                "timestamp {} predates the epoch; the container stores u64 seconds",
                f.t
            )));
        }
        if let Some(p) = prev {
            if f.t <= p {
                return Err(Error::Format(format!(
                    "frames not in strictly increasing timestamp order at {} -> {}",
                    p, f.t
                )));
            }
        }
        prev = Some(f.t);
        if f.values.numel() != plane {
            return Err(Error::Format(format!(
                "frame at {} holds {} values, header implies {}",
                f.t,
                f.values.numel(),
                plane
            )));
        }
        buf.extend_from_slice(&(f.t as u64).to_le_bytes());
        for &v in f.values.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    std::fs::write(path, buf)?;
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Format(format!(
                "truncated file: {what} needs bytes {}..{} but the file holds {}",
                self.pos,
                self.pos + n,
                self.buf.len()
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

pub fn read_grid_stack(path: &Path) -> Result<GridStack> {
    let buf = std::fs::read(path)?;
    let mut cur = Cursor { buf: &buf, pos: 0 };

    let magic = cur.take(4, "magic")?;
    if magic != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:02x?}, expected {:02x?}",
            magic, MAGIC
        )));
    }
    let version = cur.u16("version")?;
    if version != VERSION {
        return Err(Error::Format(format!(
            "unsupported container version {version}, expected {VERSION}"
        )));
    }
    let cadence_s = cur.u32("cadence")?;
    let n_frames = cur.u32("frame count")? as usize;
    let c = cur.u16("channel count")? as usize;
    let h = cur.u16("height")? as usize;
    let w = cur.u16("width")? as usize;
    if c == 0 || h == 0 || w == 0 {
        return Err(Error::Format(format!(
            "degenerate dimensions C={c} H={h} W={w} in header"
        )));
    }
    let mut channel_names = Vec::with_capacity(c);
    for i in 0..c {
        let len = cur.u16(&format!("length of channel name {i}"))? as usize;
        let bytes = cur.take(len, &format!("channel name {i}"))?;
        let name = std::str::from_utf8(bytes)
            .map_err(|_| Error::Format(format!("channel name {i} is not valid UTF-8")))?;
        channel_names.push(name.to_string());
    }

    let plane = c * h * w;
    let expected = cur.pos + n_frames * (8 + plane * 4);
    if buf.len() != expected {
        return Err(Error::Format(format!(
            "size mismatch: header implies {expected} bytes, file holds {} (frame section starts at offset {})",
            buf.len(),
            cur.pos
        )));
    }

    let mut frames = Vec::with_capacity(n_frames);
    let mut prev: Option<u64> = None;
    for i in 0..n_frames {
        let t = cur.u64(&format!("timestamp of frame {i}"))?;
        if let Some(p) = prev {
            if t <= p {
                return Err(Error::Format(format!(
                    "frame {i} timestamp {t} not after previous {p}"
                )));
            }
        }
        prev = Some(t);
        let raw = cur.take(plane * 4, &format!("data of frame {i}"))?;
        let mut data = Vec::with_capacity(plane);
        for chunk in raw.chunks_exact(4) {
            data.push(f32::from_le_bytes(chunk.try_into().unwrap()));
        }
        frames.push(StateFrame {
            t: t as UnixTime,
            values: Tensor::from_vec(&[c, h, w], data)?,
        });
    }
    Ok(GridStack { cadence_s, channel_names, h, w, frames })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_stack(seed: u64, n_frames: usize) -> GridStack {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, h, w) = (3usize, 4usize, 6usize);
        let frames = (0..n_frames)
            .map(|i| StateFrame {
                t: 1_400_000_000 + (i as i64) * 900,
                values: Tensor::from_vec(
                    &[c, h, w],
                    (0..c * h * w).map(|_| rng.random::<f32>() * 100.0 - 50.0).collect(),
                )
                .unwrap(),
            })
            .collect();
        GridStack {
            cadence_s: 900,
            channel_names: vec!["tec".into(), "kp".into(), "sza_cos".into()],
            h,
            w,
            frames,
        }
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stack.iongrid");
        let stack = random_stack(1, 3);
        write_grid_stack(&path, &stack).unwrap();
        let back = read_grid_stack(&path).unwrap();
        assert_eq!(back.channel_names, stack.channel_names);
        assert_eq!(back.cadence_s, 900);
        for (a, b) in stack.frames.iter().zip(&back.frames) {
            assert_eq!(a.t, b.t);
            // compare bits, not float equality, to catch NaN/sign corruption
            for (x, y) in a.values.data().iter().zip(b.values.data()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn truncation_names_expected_and_actual_sizes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stack.iongrid");
        write_grid_stack(&path, &random_stack(2, 2)).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 5);
        std::fs::write(&path, &bytes).unwrap();
        let err = read_grid_stack(&path).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
        let msg = err.to_string();
        assert!(msg.contains("bytes"), "{msg}");
    }

    #[test]
    fn bad_magic_and_version_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stack.iongrid");
        write_grid_stack(&path, &random_stack(3, 1)).unwrap();
        let good = std::fs::read(&path).unwrap();

        let mut bad = good.clone();
        bad[0] = b'X';
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(read_grid_stack(&path), Err(Error::Format(_))));

        let mut bad = good.clone();
        bad[4] = 99;
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(read_grid_stack(&path), Err(Error::Format(_))));
    }

    #[test]
    fn header_channel_list_survives_verbatim() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stack.iongrid");
        let mut stack = random_stack(4, 1);
        stack.channel_names = vec!["tec".into(), "weird name µ".into(), "".into()];
        write_grid_stack(&path, &stack).unwrap();
        let back = read_grid_stack(&path).unwrap();
        assert_eq!(back.channel_names, stack.channel_names);
    }
}
