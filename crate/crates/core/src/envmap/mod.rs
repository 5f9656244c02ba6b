//! Equirectangular radiance maps.
//!
//! Texel `(col, row)` has its center at `u = (col + 0.5)/W`, `v = (row + 0.5)/H`,
//! with `u = 0.5 + φ/2π` and `v = θ/π`. The frontal direction +Z therefore sits
//! at the image center and +Y on the top row.

mod rgbe;

use rayon::prelude::*;

pub use rgbe::{decode_radiance_hdr, encode_radiance_hdr, rgb_from_rgbe, rgbe_from_rgb, RgbeTexel};
pub(crate) use rgbe::{decode_texels, encode_raster};

use crate::color::Rgb;
use crate::error::{Error, Result};
use crate::geometry::{spherical_from_dir, Direction};
use crate::scalar::{CompensatedSum, Real};

/// Linear HDR environment image with `width = 2 · height`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadianceMap<T> {
    width: usize,
    height: usize,
    texels: Vec<Rgb<T>>,
}

impl<T: Real> RadianceMap<T> {
    pub fn new(width: usize, height: usize, texels: Vec<Rgb<T>>) -> Result<Self> {
        if height == 0 || width != 2 * height {
            return Err(Error::invalid(
                "radiance map",
                format!("{width}x{height} does not satisfy width = 2·height > 0"),
            ));
        }
        if texels.len() != width * height {
            return Err(Error::dims(format!(
                "{} texels for a {width}x{height} map",
                texels.len()
            )));
        }
        if let Some(i) = texels
            .iter()
            .position(|t| !t.is_finite() || t.min_component() < T::zero())
        {
            return Err(Error::invalid(
                "radiance map",
                format!("texel {i} is negative or non-finite"),
            ));
        }
        Ok(RadianceMap { width, height, texels })
    }

    pub fn constant(height: usize, value: Rgb<T>) -> Result<Self> {
        Self::new(2 * height, height, vec![value; 2 * height * height])
    }

    /// Evaluates `f` at every texel-center direction.
    pub fn from_fn(height: usize, f: impl Fn(Direction<T>) -> Rgb<T>) -> Result<Self> {
        let width = 2 * height;
        let mut texels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                texels.push(f(texel_direction(width, height, col, row)));
            }
        }
        Self::new(width, height, texels)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }
    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn texels(&self) -> &[Rgb<T>] {
        &self.texels
    }

    #[inline]
    pub fn texel(&self, col: usize, row: usize) -> Rgb<T> {
        self.texels[row * self.width + col]
    }

    pub fn set_texel(&mut self, col: usize, row: usize, value: Rgb<T>) -> Result<()> {
        if !value.is_finite() || value.min_component() < T::zero() {
            return Err(Error::invalid("radiance map", "texel must be finite and non-negative"));
        }
        self.texels[row * self.width + col] = value;
        Ok(())
    }

    pub fn texel_direction(&self, col: usize, row: usize) -> Direction<T> {
        texel_direction(self.width, self.height, col, row)
    }

    pub fn scaled(&self, s: T) -> Result<Self> {
        Self::new(self.width, self.height, self.texels.iter().map(|t| *t * s).collect())
    }

    /// Texel-wise sum; dimensions must match.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::dims("radiance maps differ in size"));
        }
        Self::new(
            self.width,
            self.height,
            self.texels.iter().zip(&other.texels).map(|(a, b)| *a + *b).collect(),
        )
    }

    /// Box-filters by an integer factor in both axes.
    pub fn downsample(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.height.is_multiple_of(factor) {
            return Err(Error::domain(format!(
                "downsample factor {factor} does not divide height {}",
                self.height
            )));
        }
        if factor == 1 {
            return Ok(self.clone());
        }
        let (w, h) = (self.width / factor, self.height / factor);
        let norm = T::one() / T::of((factor * factor) as f64);
        let mut out = Vec::with_capacity(w * h);
        for row in 0..h {
            for col in 0..w {
                let mut acc = Rgb::zero();
                for dr in 0..factor {
                    for dc in 0..factor {
                        acc += self.texel(col * factor + dc, row * factor + dr);
                    }
                }
                out.push(acc * norm);
            }
        }
        Self::new(w, h, out)
    }

    pub fn cast<U: Real>(&self) -> RadianceMap<U> {
        RadianceMap {
            width: self.width,
            height: self.height,
            texels: self.texels.iter().map(|t| t.cast()).collect(),
        }
    }
}

pub(crate) fn texel_direction<T: Real>(width: usize, height: usize, col: usize, row: usize) -> Direction<T> {
    let u = (T::of(col as f64) + T::of(0.5)) / T::of(width as f64);
    let v = (T::of(row as f64) + T::of(0.5)) / T::of(height as f64);
    let theta = v * T::PI();
    let phi = (u - T::of(0.5)) * T::TAU();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Direction::new_unchecked(st * sp, ct, st * cp)
}

/// Equirectangular coordinates of a direction; `u ∈ [0, 1)`, `v ∈ [0, 1]`.
pub fn dir_to_uv<T: Real>(d: Direction<T>) -> (T, T) {
    let s = spherical_from_dir(d);
    let mut u = T::of(0.5) + s.phi() / T::TAU();
    if u >= T::one() {
        u -= T::one();
    }
    (u, s.theta() / T::PI())
}

/// Bilinear lookup with horizontal wrap and vertical clamp.
pub fn sample_bilinear<T: Real>(map: &RadianceMap<T>, d: Direction<T>) -> Rgb<T> {
    let (u, v) = dir_to_uv(d);
    sample_uv(map, u, v)
}

pub(crate) fn sample_uv<T: Real>(map: &RadianceMap<T>, u: T, v: T) -> Rgb<T> {
    let (w, h) = (map.width, map.height);
    let x = u * T::of(w as f64) - T::of(0.5);
    let y = v * T::of(h as f64) - T::of(0.5);
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let wi = w as i64;
    let c0 = (x0.to_i64().unwrap_or(0)).rem_euclid(wi) as usize;
    let c1 = (c0 + 1) % w;
    let clamp_row = |r: i64| r.clamp(0, h as i64 - 1) as usize;
    let yi = y0.to_i64().unwrap_or(0);
    let r0 = clamp_row(yi);
    let r1 = clamp_row(yi + 1);
    let top = map.texel(c0, r0) * (T::one() - fx) + map.texel(c1, r0) * fx;
    let bottom = map.texel(c0, r1) * (T::one() - fx) + map.texel(c1, r1) * fx;
    top * (T::one() - fy) + bottom * fy
}

/// Exact solid angle of any texel in `row`: the latitude band area divided by the width.
pub fn texel_solid_angle<T: Real>(map: &RadianceMap<T>, row: usize) -> Result<T> {
    if row >= map.height {
        return Err(Error::domain(format!("row {row} outside [0, {})", map.height)));
    }
    Ok(row_solid_angle(map.width, map.height, row))
}

pub(crate) fn row_solid_angle<T: Real>(width: usize, height: usize, row: usize) -> T {
    // (2π/W)(cos θ_top − cos θ_bottom) = (2π/W)·2·sin θ_row·sin(π/2H)
    let h = T::of(height as f64);
    let theta = T::PI() * (T::of(row as f64) + T::of(0.5)) / h;
    let half_band = T::PI() / (T::of(2.0) * h);
    T::TAU() / T::of(width as f64) * T::of(2.0) * theta.sin() * half_band.sin()
}

/// Rotates the environment content about +Y by `yaw`.
///
/// Yaws that are whole multiples of the texel width are a lossless column shift;
/// anything else resamples linearly along each row.
pub fn rotate_env<T: Real>(map: &RadianceMap<T>, yaw: T) -> RadianceMap<T> {
    let w = map.width;
    let shift = yaw.to_f64_lossy() * w as f64 / std::f64::consts::TAU;
    let nearest = shift.round();
    if (shift - nearest).abs() <= 1e-9 * shift.abs().max(1.0) {
        let k = (nearest as i64).rem_euclid(w as i64) as usize;
        let mut texels = Vec::with_capacity(map.texels.len());
        for row in 0..map.height {
            let line = &map.texels[row * w..(row + 1) * w];
            // new[col] = old[col − k]
            texels.extend_from_slice(&line[w - k..]);
            texels.extend_from_slice(&line[..w - k]);
        }
        return RadianceMap {
            width: w,
            height: map.height,
            texels,
        };
    }
    let offset = shift - shift.floor();
    let whole = shift.floor() as i64;
    let frac = T::of(offset);
    let mut texels = Vec::with_capacity(map.texels.len());
    for row in 0..map.height {
        for col in 0..w {
            // source position col − shift, between columns col − whole − 1 and col − whole
            let hi = (col as i64 - whole).rem_euclid(w as i64) as usize;
            let lo = (col as i64 - whole - 1).rem_euclid(w as i64) as usize;
            texels.push(map.texel(lo, row) * frac + map.texel(hi, row) * (T::one() - frac));
        }
    }
    RadianceMap {
        width: w,
        height: map.height,
        texels,
    }
}

/// Σ E·Ω per channel.
pub fn total_energy<T: Real>(map: &RadianceMap<T>) -> Rgb<T> {
    let w = map.width;
    let per_row: Vec<[f64; 3]> = (0..map.height)
        .into_par_iter()
        .map(|row| {
            let omega = row_solid_angle::<f64>(w, map.height, row);
            let mut acc = [CompensatedSum::new(); 3];
            for t in &map.texels[row * w..(row + 1) * w] {
                for (c, a) in acc.iter_mut().enumerate() {
                    a.add(t.get(c).to_f64_lossy() * omega);
                }
            }
            acc.map(|a| a.value())
        })
        .collect();
    let mut total = [CompensatedSum::new(); 3];
    for r in per_row {
        for c in 0..3 {
            total[c].add(r[c]);
        }
    }
    Rgb::new(
        T::of(total[0].value()),
        T::of(total[1].value()),
        T::of(total[2].value()),
    )
}
