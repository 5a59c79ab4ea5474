//! Field snapshot container.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic      8 bytes   b"FBSNAP\0\x01"
//! hlen       u64       length of the JSON header in bytes
//! header     hlen      UTF-8 JSON, see `SnapshotHeader`
//! data       components × N^n × (re: f64, im: f64)
//! ```
//!
//! Coefficients follow the grid's mode ordering: row-major with axis 0
//! slowest, FFT order `0..N/2-1, -N/2..-1` along each axis, convention
//! `f(x) = Σ_k f̂_k e^{iξ_k·x}` with `ξ = 2πk/L`.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{Field, ScalarField, VectorField};
use super::grid::{make_grid, SpectralGrid};
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"FBSNAP\0\x01";
pub const SNAPSHOT_FORMAT: &str = "fracboussinesq-field";
pub const SNAPSHOT_VERSION: u32 = 1;
pub const MODE_ORDERING: &str = "row-major, axis 0 slowest, FFT order per axis";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotHeader {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub modes: usize,
    pub length: f64,
    pub real: bool,
    pub components: usize,
    pub solenoidal: bool,
    pub ordering: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSnapshot {
    pub header: SnapshotHeader,
    pub channels: Vec<Vec<Complex64>>,
}

impl FieldSnapshot {
    fn from_parts<F: Field>(f: &F, real: bool, solenoidal: bool) -> Self {
        let grid = f.grid();
        FieldSnapshot {
            header: SnapshotHeader {
                format: SNAPSHOT_FORMAT.into(),
                version: SNAPSHOT_VERSION,
                n: grid.dim(),
                modes: grid.modes(),
                length: grid.length(),
                real,
                components: f.channel_count(),
                solenoidal,
                ordering: MODE_ORDERING.into(),
            },
            channels: (0..f.channel_count()).map(|c| f.channel(c).to_vec()).collect(),
        }
    }

    pub fn from_scalar(f: &ScalarField) -> Self {
        Self::from_parts(f, f.is_real(), false)
    }

    pub fn from_vector(u: &VectorField) -> Self {
        Self::from_parts(u, u.is_real(), u.is_solenoidal())
    }

    pub fn grid(&self) -> Result<Arc<SpectralGrid>> {
        make_grid(self.header.n, self.header.modes, self.header.length)
    }

    /// Rebuilds the field on `grid`, which must match the header.
    pub fn to_scalar(&self, grid: &Arc<SpectralGrid>) -> Result<ScalarField> {
        self.check_grid(grid)?;
        if self.header.components != 1 {
            return Err(Error::Format(format!(
                "expected a scalar snapshot, found {} components",
                self.header.components
            )));
        }
        ScalarField::from_coeffs(grid, self.channels[0].clone(), self.header.real)
    }

    pub fn to_vector(&self, grid: &Arc<SpectralGrid>) -> Result<VectorField> {
        self.check_grid(grid)?;
        if self.header.components != grid.dim() {
            return Err(Error::Format(format!(
                "expected {} components, found {}",
                grid.dim(),
                self.header.components
            )));
        }
        let comps = self
            .channels
            .iter()
            .map(|c| ScalarField::from_coeffs(grid, c.clone(), self.header.real))
            .collect::<Result<Vec<_>>>()?;
        let u = VectorField::new(comps)?;
        if self.header.solenoidal {
            u.assume_solenoidal()
        } else {
            Ok(u)
        }
    }

    fn check_grid(&self, grid: &SpectralGrid) -> Result<()> {
        let h = &self.header;
        if h.n != grid.dim() || h.modes != grid.modes() || h.length != grid.length() {
            return Err(Error::GridMismatch {
                left: format!("n={} N={} L={}", h.n, h.modes, h.length),
                right: grid.describe(),
            });
        }
        Ok(())
    }

    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        let header = serde_json::to_vec(&self.header).map_err(std::io::Error::other)?;
        w.write_all(SNAPSHOT_MAGIC)?;
        w.write_all(&(header.len() as u64).to_le_bytes())?;
        w.write_all(&header)?;
        let mut buf = Vec::with_capacity(self.channels.iter().map(|c| c.len() * 16).sum());
        for chan in &self.channels {
            for z in chan {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        w.write_all(&buf)
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let fmt_err = |e: std::io::Error| Error::Format(e.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(fmt_err)?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(Error::Format("bad snapshot magic".into()));
        }
        let mut len = [0u8; 8];
        r.read_exact(&mut len).map_err(fmt_err)?;
        let hlen = u64::from_le_bytes(len) as usize;
        if hlen > 1 << 20 {
            return Err(Error::Format(format!("header length {hlen} is implausible")));
        }
        let mut hbytes = vec![0u8; hlen];
        r.read_exact(&mut hbytes).map_err(fmt_err)?;
        let header: SnapshotHeader = serde_json::from_slice(&hbytes)?;
        if header.format != SNAPSHOT_FORMAT || header.version != SNAPSHOT_VERSION {
            return Err(Error::Format(format!(
                "unsupported container {} v{}",
                header.format, header.version
            )));
        }
        // validates n, N, L before sizing the payload
        let grid = SpectralGrid::new(header.n, header.modes, header.length)?;
        if header.components == 0 || header.components > header.n {
            return Err(Error::Format(format!("{} components", header.components)));
        }
        let mut channels = Vec::with_capacity(header.components);
        let mut raw = vec![0u8; grid.len() * 16];
        for _ in 0..header.components {
            r.read_exact(&mut raw).map_err(fmt_err)?;
            let chan = raw
                .chunks_exact(16)
                .map(|b| {
                    let re = f64::from_le_bytes(b[..8].try_into().expect("8 bytes"));
                    let im = f64::from_le_bytes(b[8..].try_into().expect("8 bytes"));
                    Complex64::new(re, im)
                })
                .collect();
            channels.push(chan);
        }
        Ok(FieldSnapshot { header, channels })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(&mut std::io::BufReader::new(file))
    }
}

/// Fields that can be written to and rebuilt from a snapshot.
pub trait SnapshotField: Field {
    fn to_snapshot(&self) -> FieldSnapshot;
    fn from_snapshot(snap: &FieldSnapshot, grid: &Arc<SpectralGrid>) -> Result<Self>;
}

impl SnapshotField for ScalarField {
    fn to_snapshot(&self) -> FieldSnapshot {
        FieldSnapshot::from_scalar(self)
    }

    fn from_snapshot(snap: &FieldSnapshot, grid: &Arc<SpectralGrid>) -> Result<Self> {
        snap.to_scalar(grid)
    }
}

impl SnapshotField for VectorField {
    fn to_snapshot(&self) -> FieldSnapshot {
        FieldSnapshot::from_vector(self)
    }

    fn from_snapshot(snap: &FieldSnapshot, grid: &Arc<SpectralGrid>) -> Result<Self> {
        snap.to_vector(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_solenoidal, NormSpec, NormTarget, SpectrumSpec};
    use std::f64::consts::PI;

    #[test]
    fn vector_round_trip_is_bitwise() {
        let g = make_grid(3, 8, 2.0 * PI).unwrap();
        let spec = SpectrumSpec::new(
            1.0,
            2.0,
            0.0,
            NormTarget {
                norm: NormSpec::Hdot { s: 0.0 },
                value: 1.0,
            },
        );
        let u = random_solenoidal(&g, &spec, 5).unwrap();
        let snap = FieldSnapshot::from_vector(&u);
        let mut bytes = Vec::new();
        snap.write_to(&mut bytes).unwrap();
        let back = FieldSnapshot::read_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(back, snap);
        let v = back.to_vector(&back.grid().unwrap()).unwrap();
        assert!(v.is_solenoidal());
        for c in 0..3 {
            assert_eq!(v.channel(c), u.channel(c));
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(FieldSnapshot::read_from(&mut &b"not a snapshot at all"[..]).is_err());
        let g = make_grid(2, 8, 1.0).unwrap();
        let snap = FieldSnapshot::from_scalar(&ScalarField::zeros(&g, true));
        let mut bytes = Vec::new();
        snap.write_to(&mut bytes).unwrap();
        bytes.truncate(bytes.len() - 3);
        assert!(FieldSnapshot::read_from(&mut bytes.as_slice()).is_err());
    }

    #[test]
    fn scalar_on_wrong_grid_is_rejected() {
        let g = make_grid(2, 8, 1.0).unwrap();
        let other = make_grid(2, 8, 2.0).unwrap();
        let snap = FieldSnapshot::from_scalar(&ScalarField::zeros(&g, true));
        assert!(snap.to_scalar(&other).is_err());
        assert!(snap.to_vector(&g).is_err());
    }
}
