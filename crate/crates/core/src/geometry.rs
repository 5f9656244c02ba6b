//! Light-stage coordinate conventions and rig construction.
//!
//! Right-handed frame, +Y up, +Z toward the default frontal camera. Spherical
//! coordinates use the inclination `theta` from +Y and the azimuth `phi` in the
//! XZ plane measured from +Z toward +X, so `phi = 0` is the frontal light.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::color::Rgb;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unit 3-vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction<T> {
    x: T,
    y: T,
    z: T,
}

impl<T: Real> Direction<T> {
    /// Accepts components that are already unit-norm (within [`Real::unit_tolerance`]).
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !n2.is_finite() || (n2 - T::one()).abs() > T::of(2.0) * T::unit_tolerance() {
            return Err(Error::domain(format!("direction ({x}, {y}, {z}) is not unit-norm")));
        }
        Ok(Direction { x, y, z })
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalize(x: T, y: T, z: T) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        Ok(Direction {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub(crate) fn new_unchecked(x: T, y: T, z: T) -> Self {
        Direction { x, y, z }
    }

    pub fn up() -> Self {
        Direction::new_unchecked(T::zero(), T::one(), T::zero())
    }

    pub fn front() -> Self {
        Direction::new_unchecked(T::zero(), T::zero(), T::one())
    }

    #[inline]
    pub fn x(&self) -> T {
        self.x
    }
    #[inline]
    pub fn y(&self) -> T {
        self.y
    }
    #[inline]
    pub fn z(&self) -> T {
        self.z
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Angle between two directions, accurate for nearly parallel vectors.
    pub fn angle_to(&self, o: &Self) -> T {
        let cx = self.y * o.z - self.z * o.y;
        let cy = self.z * o.x - self.x * o.z;
        let cz = self.x * o.y - self.y * o.x;
        let cross = (cx * cx + cy * cy + cz * cz).sqrt();
        cross.atan2(self.dot(o))
    }

    /// Rotation about +Y; a positive yaw carries +Z toward +X.
    pub fn rotate_yaw(&self, yaw: T) -> Self {
        let (s, c) = yaw.sin_cos();
        Direction::new_unchecked(self.x * c + self.z * s, self.y, -self.x * s + self.z * c)
    }

    pub fn cast<U: Real>(&self) -> Direction<U> {
        Direction::new_unchecked(
            U::of(self.x.to_f64_lossy()),
            U::of(self.y.to_f64_lossy()),
            U::of(self.z.to_f64_lossy()),
        )
    }
}

/// Inclination/azimuth pair; `theta ∈ [0, π]`, `phi ∈ (−π, π]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalCoords<T> {
    theta: T,
    phi: T,
}

impl<T: Real> SphericalCoords<T> {
    /// `phi` is wrapped into `(−π, π]`; `theta` must already lie in `[0, π]`.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::domain("spherical coordinates must be finite"));
        }
        if theta < T::zero() || theta > T::PI() {
            return Err(Error::domain(format!("theta {theta} outside [0, π]")));
        }
        Ok(SphericalCoords {
            theta,
            phi: wrap_phi(phi),
        })
    }

    pub fn from_degrees(theta_deg: T, phi_deg: T) -> Result<Self> {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    #[inline]
    pub fn theta(&self) -> T {
        self.theta
    }
    #[inline]
    pub fn phi(&self) -> T {
        self.phi
    }
}

fn wrap_phi<T: Real>(phi: T) -> T {
    let two_pi = T::TAU();
    let mut p = phi % two_pi;
    if p <= -T::PI() {
        p += two_pi;
    } else if p > T::PI() {
        p -= two_pi;
    }
    p
}

pub fn dir_from_spherical<T: Real>(s: SphericalCoords<T>) -> Direction<T> {
    let (st, ct) = s.theta.sin_cos();
    let (sp, cp) = s.phi.sin_cos();
    Direction::new_unchecked(st * sp, ct, st * cp)
}

/// Inverse of [`dir_from_spherical`]; at the poles `phi` is 0.
pub fn spherical_from_dir<T: Real>(d: Direction<T>) -> SphericalCoords<T> {
    let rho = (d.x * d.x + d.z * d.z).sqrt();
    let theta = rho.atan2(d.y);
    let phi = if rho == T::zero() {
        T::zero()
    } else {
        let p = d.x.atan2(d.z);
        // atan2(-0, -1) is -π
        if p <= -T::PI() {
            T::PI()
        } else {
            p
        }
    };
    SphericalCoords { theta, phi }
}

/// Solid angle of a cone, `2π(1 − cos α)`, for `α ∈ (0, π]`.
pub fn cone_solid_angle<T: Real>(half_angle: T) -> Result<T> {
    if !(half_angle > T::zero() && half_angle <= T::PI()) {
        return Err(Error::domain(format!("cone half-angle {half_angle} outside (0, π]")));
    }
    // 4π sin²(α/2) is the cancellation-free form of 2π(1 − cos α)
    let s = (half_angle * T::of(0.5)).sin();
    Ok(T::of(4.0) * T::PI() * s * s)
}

/// One calibrated stage light.
#[derive(Clone, Debug, PartialEq)]
pub struct Light<T> {
    index: usize,
    dir: Direction<T>,
    cone_half_angle: T,
    intensity: Rgb<T>,
}

impl<T: Real> Light<T> {
    pub fn new(index: usize, dir: Direction<T>, cone_half_angle: T, intensity: Rgb<T>) -> Result<Self> {
        if !(cone_half_angle > T::zero() && cone_half_angle < T::FRAC_PI_2()) {
            return Err(Error::domain(format!(
                "light {index}: cone half-angle {cone_half_angle} outside (0, π/2)"
            )));
        }
        if !(intensity.min_component() > T::zero()) || !intensity.is_finite() {
            return Err(Error::domain(format!(
                "light {index}: intensity components must be positive and finite"
            )));
        }
        Ok(Light {
            index,
            dir,
            cone_half_angle,
            intensity,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }
    pub fn dir(&self) -> Direction<T> {
        self.dir
    }
    pub fn cone_half_angle(&self) -> T {
        self.cone_half_angle
    }
    pub fn intensity(&self) -> Rgb<T> {
        self.intensity
    }

    pub fn solid_angle(&self) -> T {
        cone_solid_angle(self.cone_half_angle).expect("validated at construction")
    }
}

/// Ordered set of lights with indices `0..N`.
#[derive(Clone, Debug, PartialEq)]
pub struct LightRig<T> {
    lights: Vec<Light<T>>,
}

impl<T: Real> LightRig<T> {
    pub fn new(lights: Vec<Light<T>>) -> Result<Self> {
        if lights.is_empty() {
            return Err(Error::domain("a rig needs at least one light"));
        }
        for (pos, l) in lights.iter().enumerate() {
            if l.index != pos {
                return Err(Error::domain(format!(
                    "rig indices must be 0..N in order: position {pos} holds index {}",
                    l.index
                )));
            }
        }
        Ok(LightRig { lights })
    }

    pub fn lights(&self) -> &[Light<T>] {
        &self.lights
    }

    pub fn len(&self) -> usize {
        self.lights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lights.is_empty()
    }

    pub fn light(&self, i: usize) -> Option<&Light<T>> {
        self.lights.get(i)
    }

    /// Mean cone solid angle over the rig.
    pub fn mean_solid_angle(&self) -> T {
        let s: T = self.lights.iter().map(|l| l.solid_angle()).sum();
        s / T::of(self.lights.len() as f64)
    }

    /// Mean angular distance from each light to its nearest neighbour.
    pub fn mean_nearest_neighbor_angle(&self) -> T {
        if self.lights.len() < 2 {
            return T::zero();
        }
        let mut total = T::zero();
        for (i, a) in self.lights.iter().enumerate() {
            let nearest = self
                .lights
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, b)| a.dir.angle_to(&b.dir))
                .fold(T::infinity(), T::min);
            total += nearest;
        }
        total / T::of(self.lights.len() as f64)
    }

    pub fn cast<U: Real>(&self) -> LightRig<U> {
        LightRig {
            lights: self
                .lights
                .iter()
                .map(|l| Light {
                    index: l.index,
                    dir: l.dir.cast(),
                    cone_half_angle: U::of(l.cone_half_angle.to_f64_lossy()),
                    intensity: l.intensity.cast(),
                })
                .collect(),
        }
    }
}

/// Golden-angle spiral over the full sphere, from +Y (first light) to −Y (last).
pub fn build_fibonacci_rig<T: Real>(count: usize, cone_half_angle: T) -> Result<LightRig<T>> {
    if count == 0 {
        return Err(Error::domain("rig light count must be at least 1"));
    }
    let golden_angle = T::PI() * (T::of(3.0) - T::of(5.0).sqrt());
    let lights = (0..count)
        .map(|i| {
            let y = if count == 1 {
                T::one()
            } else {
                T::one() - T::of(2.0) * T::of(i as f64) / T::of((count - 1) as f64)
            };
            let r = (T::one() - y * y).max(T::zero()).sqrt();
            let (sp, cp) = (golden_angle * T::of(i as f64)).sin_cos();
            let dir = Direction::normalize(r * sp, y, r * cp)?;
            Light::new(i, dir, cone_half_angle, Rgb::one())
        })
        .collect::<Result<Vec<_>>>()?;
    LightRig::new(lights)
}

/// Rotates every light about +Y by `yaw`.
pub fn rotate_rig<T: Real>(rig: &LightRig<T>, yaw: T) -> LightRig<T> {
    LightRig {
        lights: rig
            .lights
            .iter()
            .map(|l| Light {
                dir: l.dir.rotate_yaw(yaw),
                ..l.clone()
            })
            .collect(),
    }
}

/// One entry of the rig JSON file. Angles are in degrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigFileEntry {
    pub index: usize,
    pub theta: f64,
    pub phi: f64,
    pub cone_half_angle_deg: f64,
    pub intensity: [f64; 3],
}

impl<T: Real> LightRig<T> {
    pub fn to_file_entries(&self) -> Vec<RigFileEntry> {
        self.lights
            .iter()
            .map(|l| {
                let s = spherical_from_dir(l.dir);
                RigFileEntry {
                    index: l.index,
                    theta: s.theta.to_f64_lossy().to_degrees(),
                    phi: s.phi.to_f64_lossy().to_degrees(),
                    cone_half_angle_deg: l.cone_half_angle.to_f64_lossy().to_degrees(),
                    intensity: l.intensity.cast::<f64>().to_array(),
                }
            })
            .collect()
    }

    pub fn from_file_entries(entries: &[RigFileEntry]) -> Result<Self> {
        let lights = entries
            .iter()
            .map(|e| {
                let s = SphericalCoords::new(T::of(e.theta.to_radians()), T::of(e.phi.to_radians()))?;
                Light::new(
                    e.index,
                    dir_from_spherical(s),
                    T::of(e.cone_half_angle_deg.to_radians()),
                    Rgb::from_array(e.intensity.map(T::of)),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        LightRig::new(lights)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file_entries())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let entries: Vec<RigFileEntry> = serde_json::from_str(s)?;
        Self::from_file_entries(&entries)
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
