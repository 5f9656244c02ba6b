//! Analytic light-stage simulator: an orthographic shaded sphere lit by each rig
//! light in turn, or by a full environment through dense quadrature.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::Rgb;
use crate::compositor::OlatStack;
use crate::envmap::{row_solid_angle, RadianceMap};
use crate::error::{Error, Result};
use crate::geometry::{Direction, LightRig};
use crate::image::{LinearImage, Matte};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShadingModel {
    Lambert,
    BlinnPhong,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    albedo: Rgb<f64>,
    specular_strength: f64,
    shininess: f64,
    model: ShadingModel,
}

impl Material {
    pub fn lambert(albedo: Rgb<f64>) -> Result<Self> {
        Self::new(albedo, 0.0, 1.0, ShadingModel::Lambert)
    }

    pub fn new(albedo: Rgb<f64>, specular_strength: f64, shininess: f64, model: ShadingModel) -> Result<Self> {
        if !(albedo.min_component() >= 0.0 && albedo.max_component() <= 1.0) {
            return Err(Error::domain("albedo must lie in [0, 1]"));
        }
        if !(specular_strength >= 0.0 && specular_strength.is_finite()) {
            return Err(Error::domain("specular strength must be finite and non-negative"));
        }
        if !(shininess >= 1.0 && shininess.is_finite()) {
            return Err(Error::domain("shininess must be at least 1"));
        }
        Ok(Material {
            albedo,
            specular_strength,
            shininess,
            model,
        })
    }

    pub fn albedo(&self) -> Rgb<f64> {
        self.albedo
    }
    pub fn model(&self) -> ShadingModel {
        self.model
    }

    /// Reflected radiance per unit incident irradiance from direction `l`
    /// (cosine included), seen from +Z.
    #[inline]
    fn response(&self, n: [f64; 3], l: [f64; 3]) -> Rgb<f64> {
        let ndl = n[0] * l[0] + n[1] * l[1] + n[2] * l[2];
        if ndl <= 0.0 {
            return Rgb::zero();
        }
        let diffuse = self.albedo * (ndl / std::f64::consts::PI);
        if self.model == ShadingModel::Lambert || self.specular_strength == 0.0 {
            return diffuse;
        }
        let h = [l[0], l[1], l[2] + 1.0];
        let len = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
        if len < 1e-12 {
            return diffuse;
        }
        let ndh = ((n[0] * h[0] + n[1] * h[1] + n[2] * h[2]) / len).max(0.0);
        diffuse + Rgb::splat(self.specular_strength * ndh.powf(self.shininess) * ndl)
    }
}

/// Sphere centered in a square orthographic view spanning `[-1, 1]²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereScene {
    radius: f64,
    resolution: usize,
    solid_angle_unit: f64,
}

impl SphereScene {
    pub fn new(radius: f64, resolution: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain("sphere radius must be positive"));
        }
        if resolution == 0 {
            return Err(Error::domain("resolution must be non-zero"));
        }
        Ok(SphereScene {
            radius,
            resolution,
            solid_angle_unit: 1.0,
        })
    }

    /// Solid angle (sr) that maps to unit OLAT exposure; slice values scale by `Ω_i / unit`.
    pub fn with_solid_angle_unit(self, unit: f64) -> Result<Self> {
        if !(unit > 0.0 && unit.is_finite()) {
            return Err(Error::domain("solid-angle unit must be positive"));
        }
        Ok(SphereScene {
            solid_angle_unit: unit,
            ..self
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn resolution(&self) -> usize {
        self.resolution
    }
    pub fn solid_angle_unit(&self) -> f64 {
        self.solid_angle_unit
    }

    /// Outward normal at pixel `(x, y)`, or `None` off the sphere.
    pub fn normal(&self, x: usize, y: usize) -> Option<[f64; 3]> {
        let n = self.resolution as f64;
        let px = ((x as f64 + 0.5) / n * 2.0 - 1.0) / self.radius;
        let py = (1.0 - (y as f64 + 0.5) / n * 2.0) / self.radius;
        let rr = px * px + py * py;
        (rr <= 1.0).then(|| [px, py, (1.0 - rr).sqrt()])
    }

    pub fn coverage<T: Real>(&self) -> Matte<T> {
        let n = self.resolution;
        let alpha = (0..n * n)
            .map(|i| {
                if self.normal(i % n, i / n).is_some() {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect();
        Matte::new(n, n, alpha).expect("coverage is binary")
    }

    fn render<T: Real>(&self, shade: impl Fn([f64; 3]) -> Rgb<f64> + Sync) -> LinearImage<T> {
        let n = self.resolution;
        let mut out = vec![T::zero(); n * n * 3];
        out.par_chunks_mut(3 * n).enumerate().for_each(|(y, row)| {
            for (x, px) in row.chunks_exact_mut(3).enumerate() {
                if let Some(nrm) = self.normal(x, y) {
                    px.copy_from_slice(&shade(nrm).cast::<T>().to_array());
                }
            }
        });
        LinearImage::new(n, n, out).expect("shading is finite and non-negative")
    }
}

/// One slice per light: `(Ω_i / unit) · response(n, l_i)`; matte is the sphere coverage.
pub fn render_sphere_olat<T: Real>(scene: &SphereScene, rig: &LightRig<T>, material: &Material) -> OlatStack<T> {
    let images = rig
        .lights()
        .iter()
        .map(|light| {
            let l = light.dir().cast::<f64>().to_array();
            let gain = light.solid_angle().to_f64_lossy() / scene.solid_angle_unit;
            scene.render(|n| material.response(n, l) * gain)
        })
        .collect();
    OlatStack::new(rig.clone(), images, Some(scene.coverage()), None).expect("slices share the scene resolution")
}

/// Brute-force `Σ_texels E·Ω·response` at every sphere pixel.
pub fn render_sphere_env<T: Real>(scene: &SphereScene, map: &RadianceMap<T>, material: &Material) -> LinearImage<T> {
    let (w, h) = (map.width(), map.height());
    let mut dirs = Vec::new();
    let mut radiance = Vec::new();
    for row in 0..h {
        let omega: f64 = row_solid_angle(w, h, row);
        for col in 0..w {
            let e = map.texel(col, row).cast::<f64>();
            if e.max_component() > 0.0 {
                dirs.push(crate::envmap::texel_direction::<f64>(w, h, col, row).to_array());
                radiance.push(e * omega);
            }
        }
    }
    scene.render(|n| {
        let mut acc = [0.0f64; 3];
        for (l, e) in dirs.iter().zip(&radiance) {
            let f = material.response(n, *l);
            acc[0] += e.r * f.r;
            acc[1] += e.g * f.g;
            acc[2] += e.b * f.b;
        }
        Rgb::from_array(acc)
    })
}

/// Direction of the view ray reversed (toward the camera).
pub fn view_direction<T: Real>() -> Direction<T> {
    Direction::front()
}
