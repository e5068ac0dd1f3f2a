//! Physical-space snapshots.
//!
//! A snapshot file is a sequence of field records. Each record is a text
//! header
//!
//! ```text
//! field <name>
//! n <points per axis>
//! components <count>
//! time <t>
//! byte_order little-endian
//! element f64
//! data
//! ```
//!
//! followed by `components · n³` little-endian `f64` samples, component by
//! component, with `x₁` varying fastest.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::spectral::{Components, Grid, SpectralScalar};

/// One field read back from a snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotField {
    pub name: String,
    pub n: usize,
    pub time: f64,
    /// Physical samples per component, indexed `[i1, i2, i3]`.
    pub samples: Vec<Array3<f64>>,
}

impl SnapshotField {
    /// Spectral coefficients of the stored samples.
    pub fn to_spectral<F: Components>(&self, grid: &Grid) -> Result<F> {
        let comps = self
            .samples
            .iter()
            .map(|s| SpectralScalar::forward(grid, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(F::from_components(comps))
    }
}

/// Appends one field record to `out`.
pub fn write_field<W: Write, F: Components>(
    out: &mut W,
    grid: &Grid,
    name: &str,
    time: f64,
    field: &F,
) -> Result<()> {
    let n = grid.n();
    let comps = field.components();
    write!(
        out,
        "field {name}\nn {n}\ncomponents {}\ntime {time:e}\nbyte_order little-endian\nelement f64\ndata\n",
        comps.len()
    )?;
    let mut bytes = Vec::with_capacity(8 * n * n * n);
    for c in comps {
        let phys = c.inverse(grid);
        bytes.clear();
        for i3 in 0..n {
            for i2 in 0..n {
                for i1 in 0..n {
                    bytes.extend_from_slice(&phys[(i1, i2, i3)].to_le_bytes());
                }
            }
        }
        out.write_all(&bytes)?;
    }
    Ok(())
}

fn header_line<R: BufRead>(r: &mut R, key: &str) -> Result<Option<String>> {
    let mut line = String::new();
    if r.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    let line = line.trim_end_matches('\n');
    match line.split_once(' ') {
        Some((k, v)) if k == key => Ok(Some(v.to_string())),
        _ if line == key => Ok(Some(String::new())),
        _ => Err(Error::Snapshot(format!("expected `{key}`, found `{line}`"))),
    }
}

fn required<R: BufRead>(r: &mut R, key: &str) -> Result<String> {
    header_line(r, key)?.ok_or_else(|| Error::Snapshot(format!("truncated before `{key}`")))
}

fn number<T: std::str::FromStr>(v: &str, key: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Snapshot(format!("bad {key} `{v}`")))
}

/// Reads every field record from `input`.
pub fn read_fields<R: Read>(input: R) -> Result<Vec<SnapshotField>> {
    let mut r = BufReader::new(input);
    let mut out = Vec::new();
    while let Some(name) = header_line(&mut r, "field")? {
        let n: usize = number(&required(&mut r, "n")?, "n")?;
        let count: usize = number(&required(&mut r, "components")?, "components")?;
        let time: f64 = number(&required(&mut r, "time")?, "time")?;
        let order = required(&mut r, "byte_order")?;
        let element = required(&mut r, "element")?;
        if order != "little-endian" || element != "f64" {
            return Err(Error::Snapshot(format!("unsupported encoding {order}/{element}")));
        }
        required(&mut r, "data")?;
        let mut samples = Vec::with_capacity(count);
        let mut buf = vec![0u8; 8 * n * n * n];
        for _ in 0..count {
            r.read_exact(&mut buf)
                .map_err(|e| Error::Snapshot(format!("field {name}: {e}")))?;
            let mut a = Array3::<f64>::zeros((n, n, n));
            let mut chunks = buf.chunks_exact(8);
            for i3 in 0..n {
                for i2 in 0..n {
                    for i1 in 0..n {
                        let b: [u8; 8] = chunks.next().unwrap().try_into().unwrap();
                        a[(i1, i2, i3)] = f64::from_le_bytes(b);
                    }
                }
            }
            samples.push(a);
        }
        out.push(SnapshotField { name, n, time, samples });
    }
    Ok(out)
}

pub fn read_file(path: &Path) -> Result<Vec<SnapshotField>> {
    read_fields(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random, SpectralSymTensor, SpectralVector};
    use rand::SeedableRng;

    #[test]
    fn round_trip_is_lossless_for_band_limited_fields() {
        let g = Grid::new(8).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let u = random::solenoidal(&g, &mut rng, 2.0);
        let tau = random::sym_tensor(&g, &mut rng, 2.0);
        let mut bytes = Vec::new();
        write_field(&mut bytes, &g, "u", 1.5, &u).unwrap();
        write_field(&mut bytes, &g, "tau", 1.5, &tau).unwrap();
        let fields = read_fields(bytes.as_slice()).unwrap();
        assert_eq!(fields.len(), 2);
        assert_eq!(fields[1].name, "tau");
        assert_eq!(fields[1].time, 1.5);
        let u2: SpectralVector = fields[0].to_spectral(&g).unwrap();
        let t2: SpectralSymTensor = fields[1].to_spectral(&g).unwrap();
        assert!(u2.difference(&u).l2_norm() < 1e-12);
        assert!(t2.difference(&tau).l2_norm() < 1e-12);
    }

    #[test]
    fn x1_varies_fastest() {
        let g = Grid::new(8).unwrap();
        let mut f = SpectralScalar::zeros(&g);
        f.set_mode(&g, [1, 0, 0], num_complex::Complex64::new(0.5, 0.0));
        let mut bytes = Vec::new();
        write_field(&mut bytes, &g, "c", 0.0, &f).unwrap();
        let start = bytes.len() - 8 * 512;
        let second = f64::from_le_bytes(bytes[start + 8..start + 16].try_into().unwrap());
        assert!((second - (g.spacing()).cos()).abs() < 1e-15);
    }

    #[test]
    fn truncated_data_is_an_error() {
        let g = Grid::new(8).unwrap();
        let mut bytes = Vec::new();
        write_field(&mut bytes, &g, "c", 0.0, &SpectralScalar::zeros(&g)).unwrap();
        bytes.truncate(bytes.len() - 1);
        assert!(matches!(read_fields(bytes.as_slice()), Err(Error::Snapshot(_))));
    }
}
