//! Fields on `T^n_t x T^1_x` stored as x-Fourier coefficients.
//!
//! Each x-frequency `xi` carries the values of `u^(t, xi)` on the uniform
//! tensor grid of `nt` points per t-variable (row-major, `t_1` slowest).
//! Values on the grid determine a trigonometric polynomial of degree below
//! `nt / 2` in each variable, so spectral operations are exact on such data.
//!
//! Binary layout (`.thff`, little endian):
//!
//! | offset | type    | content                           |
//! |--------|---------|-----------------------------------|
//! | 0      | [u8; 4] | magic `THFF`                      |
//! | 4      | u32     | format version (1)                |
//! | 8      | u32     | n                                 |
//! | 12     | u32     | nt                                |
//! | 16     | u64     | number of frequency blocks        |
//! | 24     | i64     | xi_min (0 when empty)             |
//! | 32     | i64     | xi_max (0 when empty)             |
//! | 40     | blocks  | per block: i64 xi, then nt^n (re, im) f64 pairs |

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::{uniform_grid, Real};
use crate::spectral;

const MAGIC: &[u8; 4] = b"THFF";
const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FieldError {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("malformed field: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierField<T: Real = f64> {
    n: usize,
    nt: usize,
    modes: BTreeMap<i64, Vec<Complex<T>>>,
}

impl<T: Real> FourierField<T> {
    pub fn zero(n: usize, nt: usize) -> Self {
        Self { n, nt, modes: BTreeMap::new() }
    }

    /// Samples `f(xi, t)` on the grid for each `xi`.
    pub fn from_fn(n: usize, nt: usize, xis: impl IntoIterator<Item = i64>, f: impl Fn(i64, &[T]) -> Complex<T>) -> Self {
        let mut out = Self::zero(n, nt);
        let grid = uniform_grid::<T>(nt);
        let mut t = vec![T::zero(); n];
        for xi in xis {
            let mut values = Vec::with_capacity(out.grid_len());
            for idx in 0..out.grid_len() {
                out.fill_point(idx, &grid, &mut t);
                values.push(f(xi, &t));
            }
            out.modes.insert(xi, values);
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    /// `nt^n`.
    pub fn grid_len(&self) -> usize {
        self.nt.pow(self.n as u32)
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.nt; self.n]
    }

    /// Multi-index of a flat grid position.
    pub fn grid_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        for d in (0..self.n).rev() {
            idx[d] = flat % self.nt;
            flat /= self.nt;
        }
        idx
    }

    fn fill_point(&self, flat: usize, grid: &[T], t: &mut [T]) {
        let mut rest = flat;
        for d in (0..self.n).rev() {
            t[d] = grid[rest % self.nt];
            rest /= self.nt;
        }
    }

    /// Coordinates of a flat grid position.
    pub fn grid_point(&self, flat: usize) -> Vec<T> {
        let grid = uniform_grid::<T>(self.nt);
        let mut t = vec![T::zero(); self.n];
        self.fill_point(flat, &grid, &mut t);
        t
    }

    pub fn xis(&self) -> impl Iterator<Item = i64> + '_ {
        self.modes.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn xi_range(&self) -> Option<(i64, i64)> {
        Some((*self.modes.keys().next()?, *self.modes.keys().next_back()?))
    }

    pub fn get(&self, xi: i64) -> Option<&[Complex<T>]> {
        self.modes.get(&xi).map(Vec::as_slice)
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, &[Complex<T>])> {
        self.modes.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    pub fn insert(&mut self, xi: i64, values: Vec<Complex<T>>) -> Result<(), FieldError> {
        if values.len() != self.grid_len() {
            return Err(FieldError::GridMismatch(format!("block of {} values for a grid of {}", values.len(), self.grid_len())));
        }
        self.modes.insert(xi, values);
        Ok(())
    }

    pub fn check_compatible(&self, other: &Self) -> Result<(), FieldError> {
        if self.n != other.n || self.nt != other.nt {
            return Err(FieldError::GridMismatch(format!(
                "(n, nt) = ({}, {}) vs ({}, {})",
                self.n, self.nt, other.n, other.nt
            )));
        }
        Ok(())
    }

    /// `a * self + b * other` over the union of frequencies.
    pub fn combine(&self, a: Complex<T>, other: &Self, b: Complex<T>) -> Result<Self, FieldError> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.n, self.nt);
        let zero = vec![Complex::new(T::zero(), T::zero()); self.grid_len()];
        for xi in self.modes.keys().chain(other.modes.keys()) {
            if out.modes.contains_key(xi) {
                continue;
            }
            let x = self.modes.get(xi).unwrap_or(&zero);
            let y = other.modes.get(xi).unwrap_or(&zero);
            out.modes.insert(*xi, x.iter().zip(y).map(|(p, q)| *p * a + *q * b).collect());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        let one = Complex::new(T::one(), T::zero());
        self.combine(one, other, -one)
    }

    /// `max |u^(t, xi)|` over the grid and all frequencies.
    pub fn max_abs(&self) -> T {
        self.modes.values().fold(T::zero(), |m, v| m.max(crate::scalar::max_abs(v)))
    }

    /// `(xi, max_t |u^(t, xi)|)` for every stored frequency.
    pub fn sup_table(&self) -> Vec<(i64, T)> {
        self.modes.iter().map(|(k, v)| (*k, crate::scalar::max_abs(v))).collect()
    }

    /// Spectral derivative in `t_axis` of every block.
    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = self.clone();
        let shape = self.shape();
        for values in out.modes.values_mut() {
            spectral::along_axis(values, &shape, axis, false);
            let stride: usize = shape[axis + 1..].iter().product();
            for (flat, z) in values.iter_mut().enumerate() {
                let k = (flat / stride) % self.nt;
                let eta = spectral::freq_of(k, self.nt);
                *z = if self.nt % 2 == 0 && k == self.nt / 2 {
                    Complex::new(T::zero(), T::zero())
                } else {
                    *z * Complex::new(T::zero(), T::from_i64_lossy(eta))
                };
            }
            spectral::along_axis(values, &shape, axis, true);
        }
        out
    }

    /// Fourier coefficients in the listed t-axes (FFT order along those
    /// axes, grid values along the others).
    pub fn to_coefficients(&self, axes: &[usize]) -> Self {
        self.transform(axes, false)
    }

    /// Inverse of [`FourierField::to_coefficients`].
    pub fn from_coefficients(&self, axes: &[usize]) -> Self {
        self.transform(axes, true)
    }

    fn transform(&self, axes: &[usize], inverse: bool) -> Self {
        let mut out = self.clone();
        let shape = self.shape();
        for values in out.modes.values_mut() {
            for &axis in axes {
                spectral::along_axis(values, &shape, axis, inverse);
            }
        }
        out
    }

    /// Trigonometric interpolation of block `xi` at an arbitrary point.
    pub fn eval(&self, xi: i64, t: &[T]) -> Option<Complex<T>> {
        let values = self.modes.get(&xi)?;
        let all: Vec<usize> = (0..self.n).collect();
        let mut coeffs = values.clone();
        let shape = self.shape();
        for &axis in &all {
            spectral::along_axis(&mut coeffs, &shape, axis, false);
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for (flat, c) in coeffs.iter().enumerate() {
            let idx = self.grid_index(flat);
            let mut phase = T::zero();
            let mut weight = T::one();
            for (d, k) in idx.iter().enumerate() {
                let eta = spectral::freq_of(*k, self.nt);
                if self.nt % 2 == 0 && *k == self.nt / 2 {
                    // split the Nyquist mode so real data stays real
                    weight = weight * (T::from_i64_lossy(eta) * t[d]).cos();
                    continue;
                }
                phase = phase + T::from_i64_lossy(eta) * t[d];
            }
            acc += *c * crate::scalar::cis(phase) * weight;
        }
        Some(acc)
    }

    pub fn map_blocks(&self, f: impl Fn(i64, &[Complex<T>]) -> Vec<Complex<T>>) -> Self {
        let modes = self.modes.iter().map(|(k, v)| (*k, f(*k, v))).collect();
        Self { n: self.n, nt: self.nt, modes }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonBlock {
    xi: i64,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct JsonField {
    n: usize,
    nt: usize,
    #[serde(default)]
    xi_min: Option<i64>,
    #[serde(default)]
    xi_max: Option<i64>,
    modes: Vec<JsonBlock>,
}

impl<T: Real> Serialize for FourierField<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let range = self.xi_range();
        JsonField {
            n: self.n,
            nt: self.nt,
            xi_min: range.map(|r| r.0),
            xi_max: range.map(|r| r.1),
            modes: self
                .modes
                .iter()
                .map(|(xi, v)| JsonBlock {
                    xi: *xi,
                    re: v.iter().map(|z| z.re.as_f64()).collect(),
                    im: v.iter().map(|z| z.im.as_f64()).collect(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for FourierField<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = JsonField::deserialize(deserializer)?;
        if raw.nt == 0 {
            return Err(D::Error::custom("nt must be positive"));
        }
        let mut out = FourierField::zero(raw.n, raw.nt);
        for block in raw.modes {
            if block.re.len() != block.im.len() {
                return Err(D::Error::custom(format!("xi = {}: re/im lengths differ", block.xi)));
            }
            let values = block.re.iter().zip(&block.im).map(|(r, i)| Complex::new(T::lit(*r), T::lit(*i))).collect();
            out.insert(block.xi, values).map_err(D::Error::custom)?;
        }
        Ok(out)
    }
}

impl FourierField<f64> {
    pub fn write_binary(&self, mut w: impl Write) -> Result<(), FieldError> {
        let (lo, hi) = self.xi_range().unwrap_or((0, 0));
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&(self.nt as u32).to_le_bytes())?;
        w.write_all(&(self.modes.len() as u64).to_le_bytes())?;
        w.write_all(&lo.to_le_bytes())?;
        w.write_all(&hi.to_le_bytes())?;
        for (xi, values) in &self.modes {
            w.write_all(&xi.to_le_bytes())?;
            for z in values {
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self, FieldError> {
        let mut head = [0u8; 40];
        r.read_exact(&mut head)?;
        if &head[..4] != MAGIC {
            return Err(FieldError::Malformed("bad magic".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(head[o..o + 4].try_into().expect("4 bytes"));
        if u32_at(4) != VERSION {
            return Err(FieldError::Malformed(format!("unsupported version {}", u32_at(4))));
        }
        let (n, nt) = (u32_at(8) as usize, u32_at(12) as usize);
        if nt == 0 {
            return Err(FieldError::Malformed("nt must be positive".into()));
        }
        let count = u64::from_le_bytes(head[16..24].try_into().expect("8 bytes"));
        let mut out = Self::zero(n, nt);
        let mut buf8 = [0u8; 8];
        for _ in 0..count {
            r.read_exact(&mut buf8)?;
            let xi = i64::from_le_bytes(buf8);
            let mut values = Vec::with_capacity(out.grid_len());
            for _ in 0..out.grid_len() {
                r.read_exact(&mut buf8)?;
                let re = f64::from_le_bytes(buf8);
                r.read_exact(&mut buf8)?;
                values.push(Complex::new(re, f64::from_le_bytes(buf8)));
            }
            out.modes.insert(xi, values);
        }
        Ok(out)
    }
}
