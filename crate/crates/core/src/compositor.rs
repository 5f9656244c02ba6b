//! Linear OLAT composition, tone mapping, background rendering and matting.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::Rgb;
use crate::envmap::{sample_bilinear, RadianceMap};
use crate::error::{Error, Result};
use crate::geometry::{Direction, LightRig};
use crate::image::{ensure_same_dims, DisplayImage, LinearImage, Matte};
use crate::projection::WeightSet;
use crate::scalar::Real;

/// One image per rig light, plus optional matte and uniform-lit frame.
#[derive(Clone, Debug)]
pub struct OlatStack<T> {
    rig: LightRig<T>,
    images: Vec<LinearImage<T>>,
    alpha: Option<Matte<T>>,
    uniform: Option<LinearImage<T>>,
}

impl<T: Real> OlatStack<T> {
    pub fn new(
        rig: LightRig<T>,
        images: Vec<LinearImage<T>>,
        alpha: Option<Matte<T>>,
        uniform: Option<LinearImage<T>>,
    ) -> Result<Self> {
        if images.len() != rig.len() {
            return Err(Error::dims(format!(
                "{} images for a {}-light rig",
                images.len(),
                rig.len()
            )));
        }
        let dims = images[0].dims();
        for (i, img) in images.iter().enumerate() {
            ensure_same_dims(dims, img.dims())
                .map_err(|_| Error::dims(format!("image {i} is {}x{}", img.width(), img.height())))?;
        }
        if let Some(m) = &alpha {
            ensure_same_dims(dims, m.dims())?;
        }
        if let Some(u) = &uniform {
            ensure_same_dims(dims, u.dims())?;
        }
        Ok(OlatStack {
            rig,
            images,
            alpha,
            uniform,
        })
    }

    pub fn rig(&self) -> &LightRig<T> {
        &self.rig
    }
    pub fn images(&self) -> &[LinearImage<T>] {
        &self.images
    }
    pub fn image(&self, i: usize) -> Option<&LinearImage<T>> {
        self.images.get(i)
    }
    pub fn alpha(&self) -> Option<&Matte<T>> {
        self.alpha.as_ref()
    }
    pub fn uniform(&self) -> Option<&LinearImage<T>> {
        self.uniform.as_ref()
    }
    pub fn len(&self) -> usize {
        self.images.len()
    }
    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
    pub fn dims(&self) -> (usize, usize) {
        self.images[0].dims()
    }

    /// Joint reordering of lights and images: `new[k] = old[perm[k]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if perm.len() != self.len()
            || perm
                .iter()
                .any(|&p| p >= seen.len() || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::invalid("permutation", "not a permutation of the light indices"));
        }
        let lights = perm
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                let l = &self.rig.lights()[p];
                crate::geometry::Light::new(k, l.dir(), l.cone_half_angle(), l.intensity())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OlatStack {
            rig: LightRig::new(lights)?,
            images: perm.iter().map(|&p| self.images[p].clone()).collect(),
            alpha: self.alpha.clone(),
            uniform: self.uniform.clone(),
        })
    }

    pub fn with_uniform(mut self, uniform: LinearImage<T>) -> Result<Self> {
        ensure_same_dims(self.dims(), uniform.dims())?;
        self.uniform = Some(uniform);
        Ok(self)
    }
}

const CHUNK: usize = 3 * 2048;

/// Weighted sum of the stack with per-light RGB gains, accumulated in f64 with
/// compensated summation in fixed light order.
fn accumulate<T: Real>(images: &[LinearImage<T>], gains: &[[f64; 3]]) -> LinearImage<T> {
    let (w, h) = images[0].dims();
    let active: Vec<(&[T], [f64; 3])> = images
        .iter()
        .zip(gains)
        .filter(|(_, k)| k.iter().any(|&v| v != 0.0))
        .map(|(img, k)| (img.samples(), *k))
        .collect();
    let mut out = vec![T::zero(); w * h * 3];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let start = ci * CHUNK;
        let n = chunk.len();
        let mut sum = vec![0.0f64; n];
        let mut comp = vec![0.0f64; n];
        for (src, k) in &active {
            let src = &src[start..start + n];
            for ((px, s), c) in src
                .chunks_exact(3)
                .zip(sum.chunks_exact_mut(3))
                .zip(comp.chunks_exact_mut(3))
            {
                for ch in 0..3 {
                    let x = px[ch].to_f64_lossy() * k[ch];
                    let t = s[ch] + x;
                    if s[ch].abs() >= x.abs() {
                        c[ch] += (s[ch] - t) + x;
                    } else {
                        c[ch] += (x - t) + s[ch];
                    }
                    s[ch] = t;
                }
            }
        }
        for ((o, s), c) in chunk.iter_mut().zip(&sum).zip(&comp) {
            *o = T::of(s + c);
        }
    });
    LinearImage::from_raw_unchecked(w, h, out)
}

/// `α·Σ w_diff·I + (1−α)·Σ w_spec ⊙ I`.
pub fn composite_relit<T: Real>(stack: &OlatStack<T>, ws: &WeightSet<T>, alpha_blend: T) -> Result<LinearImage<T>> {
    if ws.len() != stack.len() {
        return Err(Error::dims(format!(
            "{} weights for a {}-image stack",
            ws.len(),
            stack.len()
        )));
    }
    if !(alpha_blend >= T::zero() && alpha_blend <= T::one()) {
        return Err(Error::domain(format!("alpha_blend {alpha_blend} outside [0, 1]")));
    }
    let a = alpha_blend.to_f64_lossy();
    // w_spec + α(w_diff − w_spec): exact when the two terms coincide
    let gains: Vec<[f64; 3]> = ws
        .entries()
        .iter()
        .map(|e| {
            let d = e.w_diff.to_f64_lossy();
            let s = e.w_spec.cast::<f64>();
            [s.r + a * (d - s.r), s.g + a * (d - s.g), s.b + a * (d - s.b)]
        })
        .collect();
    Ok(accumulate(stack.images(), &gains))
}

/// Per-pixel mean of all OLAT images.
pub fn synthesize_uniform<T: Real>(stack: &OlatStack<T>) -> LinearImage<T> {
    let sum = accumulate(stack.images(), &vec![[1.0; 3]; stack.len()]);
    let n = T::of(stack.len() as f64);
    let (w, h) = sum.dims();
    LinearImage::from_raw_unchecked(w, h, sum.into_samples().into_iter().map(|v| v / n).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToneOperator {
    Reinhard,
    Clamp,
}

impl FromStr for ToneOperator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reinhard" => Ok(ToneOperator::Reinhard),
            "clamp" => Ok(ToneOperator::Clamp),
            other => Err(Error::invalid("tone operator", format!("unknown operator {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToneMapParams<T> {
    exposure: T,
    operator: ToneOperator,
}

impl<T: Real> ToneMapParams<T> {
    pub fn new(exposure: T, operator: ToneOperator) -> Result<Self> {
        if !(exposure > T::zero() && exposure.is_finite()) {
            return Err(Error::domain(format!("exposure must be positive, got {exposure}")));
        }
        Ok(ToneMapParams { exposure, operator })
    }
    pub fn exposure(&self) -> T {
        self.exposure
    }
    pub fn operator(&self) -> ToneOperator {
        self.operator
    }
}

/// Maps exposure-scaled linear RGB into `[0, 1]`.
///
/// Reinhard compresses luminance as `L/(1+L)` and scales each channel by the
/// same factor; channels that still exceed 1 are clipped.
pub fn tone_map<T: Real>(img: &LinearImage<T>, p: ToneMapParams<T>) -> DisplayImage<T> {
    let e = p.exposure;
    let one = T::one();
    let mut out = img.samples().to_vec();
    out.par_chunks_mut(3).for_each(|px| {
        let c = Rgb::new(px[0], px[1], px[2]) * e;
        let m = match p.operator {
            ToneOperator::Clamp => c,
            ToneOperator::Reinhard => c * (one / (one + c.luminance())),
        };
        px[0] = m.r.min(one);
        px[1] = m.g.min(one);
        px[2] = m.b.min(one);
    });
    DisplayImage::from_linear_unchecked(LinearImage::from_raw_unchecked(img.width(), img.height(), out))
}

/// Pinhole camera looking into an environment at infinity.
///
/// Unrotated, it looks along +Z with +Y up (image right is −X). Pitch tilts
/// the view up about the camera's right axis, then yaw turns +Z toward +X.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraModel {
    pub focal_length_mm: f64,
    pub sensor_width_mm: f64,
    pub width: usize,
    pub height: usize,
    #[serde(default)]
    pub yaw: f64,
    #[serde(default)]
    pub pitch: f64,
}

impl CameraModel {
    pub fn new(focal_length_mm: f64, sensor_width_mm: f64, width: usize, height: usize) -> Result<Self> {
        CameraModel {
            focal_length_mm,
            sensor_width_mm,
            width,
            height,
            yaw: 0.0,
            pitch: 0.0,
        }
        .validated()
    }

    pub fn with_orientation(self, yaw: f64, pitch: f64) -> Result<Self> {
        CameraModel { yaw, pitch, ..self }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.focal_length_mm > 0.0 && self.focal_length_mm.is_finite()) {
            return Err(Error::domain("focal length must be positive"));
        }
        if !(self.sensor_width_mm > 0.0 && self.sensor_width_mm.is_finite()) {
            return Err(Error::domain("sensor width must be positive"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::domain("camera resolution must be non-zero"));
        }
        if !(self.yaw.is_finite() && self.pitch.is_finite()) {
            return Err(Error::domain("camera orientation must be finite"));
        }
        Ok(self)
    }

    pub fn horizontal_fov(&self) -> f64 {
        2.0 * (self.sensor_width_mm / (2.0 * self.focal_length_mm)).atan()
    }

    /// World-space ray through the center of pixel `(x, y)`.
    pub fn ray(&self, x: usize, y: usize) -> Direction<f64> {
        let pitch_only = |v: [f64; 3]| {
            let (s, c) = self.pitch.sin_cos();
            // rotation about the right axis (−X), positive pitch raises +Z toward +Y
            [v[0], v[1] * c + v[2] * s, -v[1] * s + v[2] * c]
        };
        let pixel = self.sensor_width_mm / self.width as f64;
        let sx = (x as f64 + 0.5 - self.width as f64 / 2.0) * pixel;
        let sy = (self.height as f64 / 2.0 - y as f64 - 0.5) * pixel;
        let cam = pitch_only([-sx, sy, self.focal_length_mm]);
        Direction::normalize(cam[0], cam[1], cam[2])
            .expect("focal length keeps the ray non-zero")
            .rotate_yaw(self.yaw)
    }
}

pub fn horizontal_fov(cam: &CameraModel) -> f64 {
    cam.horizontal_fov()
}

/// Renders the environment as seen through `cam`.
pub fn render_background<T: Real>(map: &RadianceMap<T>, cam: &CameraModel) -> LinearImage<T> {
    let (w, h) = (cam.width, cam.height);
    let mut out = vec![T::zero(); w * h * 3];
    out.par_chunks_mut(3 * w).enumerate().for_each(|(y, row)| {
        for (x, px) in row.chunks_exact_mut(3).enumerate() {
            let c = sample_bilinear(map, cam.ray(x, y).cast());
            px.copy_from_slice(&c.to_array());
        }
    });
    LinearImage::from_raw_unchecked(w, h, out)
}

/// `matte·fg + (1−matte)·bg`.
pub fn alpha_composite<T: Real>(
    fg: &DisplayImage<T>,
    matte: &Matte<T>,
    bg: &DisplayImage<T>,
) -> Result<DisplayImage<T>> {
    ensure_same_dims(fg.dims(), matte.dims())?;
    ensure_same_dims(fg.dims(), bg.dims())?;
    let one = T::one();
    let out = fg
        .samples()
        .chunks_exact(3)
        .zip(bg.samples().chunks_exact(3))
        .zip(matte.values())
        .flat_map(|((f, b), &a)| [0, 1, 2].map(|c| (a * f[c] + (one - a) * b[c]).min(one).max(T::zero())))
        .collect();
    Ok(DisplayImage::from_linear_unchecked(LinearImage::from_raw_unchecked(
        fg.width(),
        fg.height(),
        out,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_fibonacci_rig;
    use crate::projection::{ProjectionMode, WeightEntry};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_stack(n: usize, w: usize, h: usize, seed: u64) -> OlatStack<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rig = build_fibonacci_rig(n, 0.2).unwrap();
        let images = (0..n)
            .map(|_| LinearImage::new(w, h, (0..w * h * 3).map(|_| rng.random::<f64>()).collect()).unwrap())
            .collect();
        OlatStack::new(rig, images, None, None).unwrap()
    }

    fn random_weights(n: usize, seed: u64, gray: bool) -> WeightSet<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries = (0..n)
            .map(|_| {
                let d: f64 = rng.random();
                let s = if gray {
                    Rgb::splat(d)
                } else {
                    Rgb::new(rng.random(), rng.random(), rng.random())
                };
                WeightEntry { w_diff: d, w_spec: s }
            })
            .collect();
        WeightSet::new(ProjectionMode::Cone, entries).unwrap()
    }

    fn max_rel_diff(a: &LinearImage<f64>, b: &LinearImage<f64>) -> f64 {
        a.samples()
            .iter()
            .zip(b.samples())
            .map(|(x, y)| (x - y).abs() / y.abs().max(1e-300))
            .fold(0.0, f64::max)
    }

    #[test]
    fn stack_invariants() {
        let s = random_stack(3, 4, 2, 1);
        let rig = s.rig().clone();
        let mut imgs = s.images().to_vec();
        assert!(OlatStack::new(rig.clone(), imgs[..2].to_vec(), None, None).is_err());
        imgs[1] = LinearImage::black(2, 4);
        assert!(OlatStack::new(rig.clone(), imgs, None, None).is_err());
        let bad_matte = Matte::filled(3, 3, 1.0).unwrap();
        assert!(OlatStack::new(rig, s.images().to_vec(), Some(bad_matte), None).is_err());
    }

    #[test]
    fn zero_weights_give_black() {
        let s = random_stack(5, 3, 3, 2);
        let ws = WeightSet::gray(ProjectionMode::Cone, &[0.0; 5]).unwrap();
        let out = composite_relit(&s, &ws, 0.8).unwrap();
        assert!(out.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn one_hot_selects_slice_exactly() {
        let s = random_stack(6, 5, 4, 3);
        for k in 0..6 {
            let mut w = [0.0; 6];
            w[k] = 1.0;
            let ws = WeightSet::gray(ProjectionMode::Cone, &w).unwrap();
            for a in [0.0, 0.37, 0.8, 1.0] {
                assert_eq!(composite_relit(&s, &ws, a).unwrap(), s.images()[k]);
            }
        }
    }

    #[test]
    fn gray_weights_ignore_alpha_blend() {
        for seed in 0..5 {
            let s = random_stack(12, 6, 5, seed);
            let ws = random_weights(12, seed + 100, true);
            let base = composite_relit(&s, &ws, 0.0).unwrap();
            for a in [0.25, 0.8, 1.0] {
                assert!(max_rel_diff(&composite_relit(&s, &ws, a).unwrap(), &base) < 1e-9);
            }
        }
    }

    #[test]
    fn blend_matches_direct_formula() {
        let s = random_stack(7, 4, 3, 9);
        let ws = random_weights(7, 10, false);
        let a = 0.3;
        let out = composite_relit(&s, &ws, a).unwrap();
        for y in 0..3 {
            for x in 0..4 {
                let mut diff = Rgb::zero();
                let mut spec = Rgb::zero();
                for (img, e) in s.images().iter().zip(ws.entries()) {
                    diff += img.pixel(x, y) * e.w_diff;
                    spec += img.pixel(x, y) * e.w_spec;
                }
                let want = diff * a + spec * (1.0 - a);
                assert!((out.pixel(x, y) - want).map(f64::abs).max_component() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_is_mean_and_matches_flat_weights() {
        let s = random_stack(9, 4, 4, 5);
        let u = synthesize_uniform(&s);
        let flat = WeightSet::gray(ProjectionMode::Cone, &[1.0 / 9.0; 9]).unwrap();
        let c = composite_relit(&s, &flat, 1.0).unwrap();
        assert!(max_rel_diff(&u, &c) < 1e-12);

        let img = s.images()[0].clone();
        let same = OlatStack::new(s.rig().clone(), vec![img.clone(); 9], None, None).unwrap();
        assert!(max_rel_diff(&synthesize_uniform(&same), &img) < 1e-15);

        let rig = build_fibonacci_rig(2, 0.2).unwrap();
        let two = OlatStack::new(
            rig,
            vec![LinearImage::black(2, 2), LinearImage::filled(2, 2, Rgb::one()).unwrap()],
            None,
            None,
        )
        .unwrap();
        assert!(synthesize_uniform(&two).samples().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn composite_is_additive_homogeneous_and_permutation_invariant() {
        let s = random_stack(10, 5, 5, 7);
        let wa = random_weights(10, 8, true);
        let wb = random_weights(10, 9, true);
        let sum: Vec<f64> = wa
            .entries()
            .iter()
            .zip(wb.entries())
            .map(|(a, b)| a.w_diff + b.w_diff)
            .collect();
        let wab = WeightSet::gray(ProjectionMode::Cone, &sum).unwrap();
        let lhs = composite_relit(&s, &wab, 1.0).unwrap();
        let rhs = composite_relit(&s, &wa, 1.0)
            .unwrap()
            .add(&composite_relit(&s, &wb, 1.0).unwrap())
            .unwrap();
        assert!(max_rel_diff(&lhs, &rhs) < 1e-6);

        let scaled = composite_relit(&s, &wa.scaled(3.5).unwrap(), 1.0).unwrap();
        assert!(max_rel_diff(&scaled, &composite_relit(&s, &wa, 1.0).unwrap().scaled(3.5).unwrap()) < 1e-14);

        let perm = [3, 1, 9, 0, 2, 8, 4, 7, 6, 5];
        let p = composite_relit(&s.permuted(&perm).unwrap(), &wa.permuted(&perm).unwrap(), 1.0).unwrap();
        assert!(max_rel_diff(&p, &composite_relit(&s, &wa, 1.0).unwrap()) < 1e-6);
    }

    #[test]
    fn composite_rejects_mismatch() {
        let s = random_stack(4, 2, 2, 1);
        assert!(composite_relit(&s, &random_weights(3, 1, true), 0.5).is_err());
        assert!(composite_relit(&s, &random_weights(4, 1, true), 1.5).is_err());
    }

    #[test]
    fn chunk_boundaries_do_not_matter() {
        // width chosen so that pixel rows straddle accumulation chunks
        let s = random_stack(3, 1001, 7, 11);
        let ws = random_weights(3, 12, false);
        let out = composite_relit(&s, &ws, 0.4).unwrap();
        for &(x, y) in &[(0, 0), (682, 2), (683, 2), (1000, 6)] {
            let mut want = Rgb::zero();
            for (img, e) in s.images().iter().zip(ws.entries()) {
                let k = e.w_spec.map(|v| v * 0.6) + Rgb::splat(0.4 * e.w_diff);
                want += img.pixel(x, y) * k;
            }
            assert!((out.pixel(x, y) - want).map(f64::abs).max_component() < 1e-12);
        }
    }

    #[test]
    fn tone_map_examples() {
        let black = LinearImage::<f64>::black(2, 2);
        for op in [ToneOperator::Reinhard, ToneOperator::Clamp] {
            let p = ToneMapParams::new(1.0, op).unwrap();
            assert!(tone_map(&black, p).samples().iter().all(|&v| v == 0.0));
        }
        let white = LinearImage::filled(1, 1, Rgb::<f64>::one()).unwrap();
        let r = tone_map(&white, ToneMapParams::new(1.0, ToneOperator::Reinhard).unwrap());
        assert!((r.pixel(0, 0).luminance() - 0.5).abs() < 1e-12);
        let c = tone_map(
            &white.scaled(3.0).unwrap(),
            ToneMapParams::new(0.25, ToneOperator::Clamp).unwrap(),
        );
        assert_eq!(c.pixel(0, 0), Rgb::splat(0.75));
        assert!(ToneMapParams::new(0.0, ToneOperator::Clamp).is_err());
        assert_eq!("clamp".parse::<ToneOperator>().unwrap(), ToneOperator::Clamp);
        assert!("aces".parse::<ToneOperator>().is_err());
    }

    #[test]
    fn reinhard_preserves_chroma_below_clip() {
        let img = LinearImage::filled(1, 1, Rgb::new(0.4f64, 0.2, 0.1)).unwrap();
        let out = tone_map(&img, ToneMapParams::new(2.0, ToneOperator::Reinhard).unwrap()).pixel(0, 0);
        assert!((out.r / out.g - 2.0).abs() < 1e-12 && (out.g / out.b - 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn tone_map_bounded_and_monotone(
            r in 0.0f64..1e4, g in 0.0f64..1e4, b in 0.0f64..1e4,
            bump in 0.0f64..10.0, ch in 0usize..3, e in 0.01f64..100.0,
        ) {
            let base = Rgb::new(r, g, b);
            let mut more = base.to_array();
            more[ch] += bump;
            for op in [ToneOperator::Reinhard, ToneOperator::Clamp] {
                let p = ToneMapParams::new(e, op).unwrap();
                let lo = tone_map(&LinearImage::filled(1, 1, base).unwrap(), p).pixel(0, 0);
                let hi = tone_map(&LinearImage::filled(1, 1, Rgb::from_array(more)).unwrap(), p).pixel(0, 0);
                prop_assert!(lo.max_component() <= 1.0 && lo.min_component() >= 0.0);
                prop_assert!(hi.get(ch) >= lo.get(ch) - 1e-12);
            }
        }
    }

    #[test]
    fn fov_of_35mm_full_frame() {
        let cam = CameraModel::new(35.0, 36.0, 64, 48).unwrap();
        assert!((cam.horizontal_fov().to_degrees() - 54.43).abs() < 0.01);
        assert!((horizontal_fov(&cam) - 2.0 * (36.0f64 / 70.0).atan()).abs() < 1e-15);
        assert!(CameraModel::new(0.0, 36.0, 4, 4).is_err());
        assert!(CameraModel::new(35.0, -1.0, 4, 4).is_err());
    }

    #[test]
    fn camera_axes() {
        let cam = CameraModel::new(35.0, 36.0, 101, 51).unwrap();
        let c = cam.ray(50, 25);
        assert!((c.z() - 1.0).abs() < 1e-15);
        // image right is −X, image top is +Y
        assert!(cam.ray(100, 25).x() < 0.0 && cam.ray(50, 0).y() > 0.0);
        let edge = cam.ray(100, 25).angle_to(&cam.ray(0, 25));
        let expected = 2.0 * ((36.0 - 36.0 / 101.0) / 70.0f64).atan();
        assert!((edge - expected).abs() < 1e-12);
        let turned = cam.with_orientation(std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        assert!((turned.ray(50, 25).x() - 1.0).abs() < 1e-12);
        let up = cam.with_orientation(0.0, 0.3).unwrap().ray(50, 25);
        assert!((up.y() - 0.3f64.sin()).abs() < 1e-12 && up.x().abs() < 1e-15);
    }

    #[test]
    fn background_examples() {
        let c = Rgb::new(0.2, 0.4, 0.6);
        let cam = CameraModel::new(35.0, 36.0, 31, 21).unwrap();
        let flat = render_background(&RadianceMap::constant(16, c).unwrap(), &cam);
        assert!(flat.pixels().all(|p| (p - c).map(f64::abs).max_component() < 1e-12));

        let m = RadianceMap::from_fn(64, |d| Rgb::new(1.0 + d.x(), 1.0 + d.y(), 1.0 + d.z())).unwrap();
        let img = render_background(&m, &cam);
        let want = sample_bilinear(&m, Direction::front());
        assert!((img.pixel(15, 10) - want).map(f64::abs).max_component() < 1e-12);
    }

    #[test]
    fn alpha_composite_examples() {
        let fg = DisplayImage::new(2, 1, vec![1.0; 6]).unwrap();
        let bg = DisplayImage::new(2, 1, vec![0.0; 6]).unwrap();
        let one = Matte::filled(2, 1, 1.0).unwrap();
        let zero = Matte::filled(2, 1, 0.0).unwrap();
        let half = Matte::filled(2, 1, 0.5).unwrap();
        assert_eq!(alpha_composite(&fg, &one, &bg).unwrap(), fg);
        assert_eq!(alpha_composite(&fg, &zero, &bg).unwrap(), bg);
        assert!(alpha_composite(&fg, &half, &bg)
            .unwrap()
            .samples()
            .iter()
            .all(|&v| v == 0.5));
        assert!(alpha_composite(&fg, &Matte::filled(1, 1, 0.5).unwrap(), &bg).is_err());
    }
}
