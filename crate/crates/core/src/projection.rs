//! Environment-to-rig projection: per-light weights for linear OLAT compositing.
//!
//! Cone weights integrate the environment over every texel whose center lies
//! inside a light's illumination cone (texel-center membership, no partial
//! coverage). Point weights sample the environment once along the light axis
//! and scale by the cone solid angle so both modes share units.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::Rgb;
use crate::envmap::{row_solid_angle, sample_bilinear, RadianceMap};
use crate::error::{Channel, Error, Result};
use crate::geometry::{spherical_from_dir, LightRig};
use crate::scalar::{CompensatedSum, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionMode {
    Cone,
    Point,
}

/// Per-light weights: a scalar diffuse weight and an RGB specular weight.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WeightEntry<T> {
    pub w_diff: T,
    pub w_spec: Rgb<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightSet<T> {
    mode: ProjectionMode,
    normalized_to: Option<Rgb<T>>,
    entries: Vec<WeightEntry<T>>,
    /// Lights whose cone contained no texel center.
    uncovered: Vec<usize>,
}

impl<T: Real> WeightSet<T> {
    /// Builds an unnormalized set; every component must be finite and ≥ 0.
    pub fn new(mode: ProjectionMode, entries: Vec<WeightEntry<T>>) -> Result<Self> {
        validate_entries(&entries)?;
        Ok(WeightSet {
            mode,
            normalized_to: None,
            entries,
            uncovered: Vec::new(),
        })
    }

    /// Diffuse-only weights with `w_spec = w_diff·(1,1,1)`.
    pub fn gray(mode: ProjectionMode, weights: &[T]) -> Result<Self> {
        Self::new(
            mode,
            weights
                .iter()
                .map(|&w| WeightEntry {
                    w_diff: w,
                    w_spec: Rgb::splat(w),
                })
                .collect(),
        )
    }

    pub fn mode(&self) -> ProjectionMode {
        self.mode
    }
    pub fn normalized_to(&self) -> Option<Rgb<T>> {
        self.normalized_to
    }
    pub fn entries(&self) -> &[WeightEntry<T>] {
        &self.entries
    }
    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
    pub fn uncovered(&self) -> &[usize] {
        &self.uncovered
    }

    /// Σ w_spec per channel.
    pub fn spec_sum(&self) -> Rgb<T> {
        let mut acc = [CompensatedSum::new(); 3];
        for e in &self.entries {
            for (c, a) in acc.iter_mut().enumerate() {
                a.add(e.w_spec.get(c).to_f64_lossy());
            }
        }
        Rgb::new(T::of(acc[0].value()), T::of(acc[1].value()), T::of(acc[2].value()))
    }

    pub fn scaled(&self, s: T) -> Result<Self> {
        let entries: Vec<_> = self
            .entries
            .iter()
            .map(|e| WeightEntry {
                w_diff: e.w_diff * s,
                w_spec: e.w_spec * s,
            })
            .collect();
        validate_entries(&entries)?;
        Ok(WeightSet {
            entries,
            normalized_to: self.normalized_to.map(|t| t * s),
            ..self.clone()
        })
    }

    /// Reorders entries so that `new[k] = old[perm[k]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.entries.len() {
            return Err(Error::dims("permutation length"));
        }
        Ok(WeightSet {
            entries: perm.iter().map(|&p| self.entries[p]).collect(),
            uncovered: Vec::new(),
            ..self.clone()
        })
    }
}

fn validate_entries<T: Real>(entries: &[WeightEntry<T>]) -> Result<()> {
    for (i, e) in entries.iter().enumerate() {
        let ok = e.w_diff.is_finite()
            && e.w_diff >= T::zero()
            && e.w_spec.is_finite()
            && e.w_spec.min_component() >= T::zero();
        if !ok {
            return Err(Error::invalid(
                "weight set",
                format!("entry {i} is negative or non-finite"),
            ));
        }
    }
    Ok(())
}

struct TexelGrid {
    width: usize,
    height: usize,
    sin_theta: Vec<f64>,
    cos_theta: Vec<f64>,
    sin_phi: Vec<f64>,
    cos_phi: Vec<f64>,
    omega: Vec<f64>,
}

impl TexelGrid {
    fn new(width: usize, height: usize) -> Self {
        let rows = 0..height;
        let theta: Vec<f64> = rows
            .clone()
            .map(|r| std::f64::consts::PI * (r as f64 + 0.5) / height as f64)
            .collect();
        let phi: Vec<f64> = (0..width)
            .map(|c| ((c as f64 + 0.5) / width as f64 - 0.5) * std::f64::consts::TAU)
            .collect();
        TexelGrid {
            width,
            height,
            sin_theta: theta.iter().map(|t| t.sin()).collect(),
            cos_theta: theta.iter().map(|t| t.cos()).collect(),
            sin_phi: phi.iter().map(|p| p.sin()).collect(),
            cos_phi: phi.iter().map(|p| p.cos()).collect(),
            omega: rows.map(|r| row_solid_angle(width, height, r)).collect(),
        }
    }

    /// Rows whose latitude band can intersect a cone around `theta_axis`.
    fn candidate_rows(&self, theta_axis: f64, half_angle: f64) -> std::ops::Range<usize> {
        let h = self.height as f64;
        let band = std::f64::consts::PI / h;
        let lo = ((theta_axis - half_angle) / band - 1.0).floor().max(0.0) as usize;
        let hi = (((theta_axis + half_angle) / band + 1.0).ceil() as usize).min(self.height);
        lo..hi
    }
}

/// Integrates the environment over each light's cone (texel-center membership).
pub fn project_cone_weights<T: Real>(map: &RadianceMap<T>, rig: &LightRig<T>) -> WeightSet<T> {
    let grid = TexelGrid::new(map.width(), map.height());
    let raw: Vec<(Rgb<f64>, bool)> = rig
        .lights()
        .par_iter()
        .map(|light| {
            let axis = light.dir().cast::<f64>();
            let (ax, ay, az) = (axis.x(), axis.y(), axis.z());
            let half = light.cone_half_angle().to_f64_lossy();
            let cos_half = half.cos();
            let theta_axis = spherical_from_dir(axis).theta();
            let mut acc = [CompensatedSum::new(); 3];
            let mut covered = false;
            for row in grid.candidate_rows(theta_axis, half) {
                let (st, ct) = (grid.sin_theta[row], grid.cos_theta[row]);
                let omega = grid.omega[row];
                for col in 0..grid.width {
                    let dot = st * grid.sin_phi[col] * ax + ct * ay + st * grid.cos_phi[col] * az;
                    if dot >= cos_half {
                        covered = true;
                        let e = map.texel(col, row);
                        for (c, a) in acc.iter_mut().enumerate() {
                            a.add(e.get(c).to_f64_lossy() * omega);
                        }
                    }
                }
            }
            let gain = light.intensity().cast::<f64>();
            (Rgb::new(acc[0].value(), acc[1].value(), acc[2].value()) * gain, covered)
        })
        .collect();
    let uncovered = raw
        .iter()
        .enumerate()
        .filter(|(_, (_, covered))| !covered)
        .map(|(i, _)| i)
        .collect();
    WeightSet {
        mode: ProjectionMode::Cone,
        normalized_to: None,
        entries: raw
            .into_iter()
            .map(|(w, _)| WeightEntry {
                w_diff: T::zero(),
                w_spec: w.cast(),
            })
            .collect(),
        uncovered,
    }
}

/// `E(l_i) · Ω_i · intensity_i` with a bilinear lookup along each light axis.
pub fn project_point_weights<T: Real>(map: &RadianceMap<T>, rig: &LightRig<T>) -> WeightSet<T> {
    let entries = rig
        .lights()
        .iter()
        .map(|l| WeightEntry {
            w_diff: T::zero(),
            w_spec: sample_bilinear(map, l.dir()) * l.solid_angle() * l.intensity(),
        })
        .collect();
    WeightSet {
        mode: ProjectionMode::Point,
        normalized_to: None,
        entries,
        uncovered: Vec::new(),
    }
}

pub fn project_weights<T: Real>(map: &RadianceMap<T>, rig: &LightRig<T>, mode: ProjectionMode) -> WeightSet<T> {
    match mode {
        ProjectionMode::Cone => project_cone_weights(map, rig),
        ProjectionMode::Point => project_point_weights(map, rig),
    }
}

/// Per-channel rescale so that Σ w_spec equals `target`.
pub fn normalize_weights<T: Real>(ws: &WeightSet<T>, target: Rgb<T>) -> Result<WeightSet<T>> {
    check_target(target)?;
    let sum = ws.spec_sum();
    let mut scale = [0.0f64; 3];
    for (c, ch) in Channel::ALL.into_iter().enumerate() {
        let s = sum.get(c).to_f64_lossy();
        if !(s > 0.0) {
            return Err(Error::ZeroSumChannel { channel: ch });
        }
        scale[c] = target.get(c).to_f64_lossy() / s;
    }
    rescale(ws, scale, target)
}

/// Single luminance-matched scale applied to all channels (the scalar variant).
pub fn normalize_weights_scalar<T: Real>(ws: &WeightSet<T>, target: Rgb<T>) -> Result<WeightSet<T>> {
    check_target(target)?;
    let sum = ws.spec_sum().luminance().to_f64_lossy();
    if !(sum > 0.0) {
        let ch = Channel::ALL
            .into_iter()
            .enumerate()
            .find(|(c, _)| !(ws.spec_sum().get(*c) > T::zero()))
            .map_or(Channel::Green, |(_, ch)| ch);
        return Err(Error::ZeroSumChannel { channel: ch });
    }
    let s = target.luminance().to_f64_lossy() / sum;
    let mut out = rescale(ws, [s; 3], target)?;
    out.normalized_to = Some(ws.spec_sum() * T::of(s));
    Ok(out)
}

fn check_target<T: Real>(target: Rgb<T>) -> Result<()> {
    if !target.is_finite() || target.min_component() < T::zero() {
        return Err(Error::invalid(
            "normalization target",
            "must be finite and non-negative",
        ));
    }
    Ok(())
}

fn rescale<T: Real>(ws: &WeightSet<T>, scale: [f64; 3], target: Rgb<T>) -> Result<WeightSet<T>> {
    let has_diffuse = ws.entries.iter().any(|e| e.w_diff > T::zero());
    let entries = ws
        .entries
        .iter()
        .map(|e| {
            let w = e.w_spec.cast::<f64>();
            let spec: Rgb<T> = Rgb::new(w.r * scale[0], w.g * scale[1], w.b * scale[2]).cast();
            WeightEntry {
                w_diff: if has_diffuse { spec.luminance() } else { T::zero() },
                w_spec: spec,
            }
        })
        .collect();
    Ok(WeightSet {
        mode: ws.mode,
        normalized_to: Some(target),
        entries,
        uncovered: ws.uncovered.clone(),
    })
}

/// Fills `w_diff` with the Rec. 709 luminance of `w_spec`.
pub fn split_diffuse_specular<T: Real>(ws: &WeightSet<T>) -> WeightSet<T> {
    WeightSet {
        entries: ws
            .entries
            .iter()
            .map(|e| WeightEntry {
                w_diff: e.w_spec.luminance(),
                w_spec: e.w_spec,
            })
            .collect(),
        ..ws.clone()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightFileEntry {
    index: usize,
    w_diff: f64,
    w_spec: [f64; 3],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightFile {
    mode: ProjectionMode,
    normalized_to: Option<[f64; 3]>,
    weights: Vec<WeightFileEntry>,
}

impl<T: Real> WeightSet<T> {
    pub fn to_json(&self) -> Result<String> {
        let file = WeightFile {
            mode: self.mode,
            normalized_to: self.normalized_to.map(|t| t.cast::<f64>().to_array()),
            weights: self
                .entries
                .iter()
                .enumerate()
                .map(|(index, e)| WeightFileEntry {
                    index,
                    w_diff: e.w_diff.to_f64_lossy(),
                    w_spec: e.w_spec.cast::<f64>().to_array(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: WeightFile = serde_json::from_str(s)?;
        for (pos, w) in file.weights.iter().enumerate() {
            if w.index != pos {
                return Err(Error::invalid(
                    "weight file",
                    format!("weights[{pos}] has index {}, expected {pos}", w.index),
                ));
            }
        }
        let entries = file
            .weights
            .iter()
            .map(|w| WeightEntry {
                w_diff: T::of(w.w_diff),
                w_spec: Rgb::from_array(w.w_spec.map(T::of)),
            })
            .collect::<Vec<_>>();
        validate_entries(&entries)?;
        Ok(WeightSet {
            mode: file.mode,
            normalized_to: file.normalized_to.map(|t| Rgb::from_array(t.map(T::of))),
            entries,
            uncovered: Vec::new(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut s = self.to_json()?;
        s.push('\n');
        std::fs::write(path, s).map_err(|e| Error::io(path, e))
    }
}
