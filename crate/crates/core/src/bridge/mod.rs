//! Stochastic bridge between uniform-lit and single-light latents: interpolant,
//! drift target, LBM loss, one-step transport and the image-space auxiliary losses.

mod fit;

pub use fit::{
    draw_samples, fit_linear_velocity, fit_on_samples, noise_floor, run_demo, AffineToy, BridgePair, DemoConfig,
    DemoReport, LinearVelocityField, TSchedule,
};

use std::collections::BTreeMap;
use std::ops::Deref;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{ensure_same_dims, LinearImage, Matte};
use crate::metrics::energy_ratio_error;
use crate::scalar::{CompensatedSum, Real};

/// Finite latent vector.
#[derive(Clone, Debug, PartialEq)]
pub struct LatentVec<T>(Vec<T>);

impl<T: Real> LatentVec<T> {
    pub fn new(v: Vec<T>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::domain("latent dimension must be at least 1"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("latent components must be finite"));
        }
        Ok(LatentVec(v))
    }

    pub fn zeros(dim: usize) -> Self {
        LatentVec(vec![T::zero(); dim.max(1)])
    }

    pub fn standard_normal(dim: usize, rng: &mut impl Rng) -> Self {
        LatentVec((0..dim.max(1)).map(|_| T::of(StandardNormal.sample(rng))).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn squared_distance(&self, o: &Self) -> f64 {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| (a.to_f64_lossy() - b.to_f64_lossy()).powi(2))
            .sum()
    }
}

impl<T> Deref for LatentVec<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::dims(format!("latent dimensions {a} vs {b}")));
    }
    Ok(())
}

/// Direction conditioning `(sinθ, cosθ, sinφ, cosφ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LightCondition<T>([T; 4]);

impl<T: Real> LightCondition<T> {
    pub fn new(c: [T; 4]) -> Result<Self> {
        let tol = 1e-9;
        let circle = |a: T, b: T| ((a * a + b * b).to_f64_lossy() - 1.0).abs() <= tol;
        if !(c.iter().all(|v| v.is_finite()) && circle(c[0], c[1]) && circle(c[2], c[3])) {
            return Err(Error::domain("light condition pairs must lie on the unit circle"));
        }
        Ok(LightCondition(c))
    }

    pub fn components(&self) -> [T; 4] {
        self.0
    }
}

pub fn encode_light_condition<T: Real>(theta: T, phi: T) -> Result<LightCondition<T>> {
    if !(theta.is_finite() && phi.is_finite()) {
        return Err(Error::domain("angles must be finite"));
    }
    Ok(LightCondition([theta.sin(), theta.cos(), phi.sin(), phi.cos()]))
}

fn check_t<T: Real>(t: T) -> Result<()> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::domain(format!("t = {t} outside [0, 1]")));
    }
    Ok(())
}

/// `(1−t)·z_u + t·z_l + σ·√(t(1−t))·noise`.
pub fn bridge_interpolate<T: Real>(
    z_u: &LatentVec<T>,
    z_l: &LatentVec<T>,
    t: T,
    sigma: T,
    noise: &LatentVec<T>,
) -> Result<LatentVec<T>> {
    same_dim(z_u.dim(), z_l.dim())?;
    same_dim(z_u.dim(), noise.dim())?;
    check_t(t)?;
    if !(sigma >= T::zero()) {
        return Err(Error::domain("sigma must be non-negative"));
    }
    let one = T::one();
    let k = sigma * (t * (one - t)).sqrt();
    Ok(LatentVec(
        z_u.iter()
            .zip(z_l.iter())
            .zip(noise.iter())
            .map(|((u, l), e)| (one - t) * *u + t * *l + k * *e)
            .collect(),
    ))
}

/// `(z_l − z_t)/(1−t)`.
pub fn target_drift<T: Real>(z_l: &LatentVec<T>, z_t: &LatentVec<T>, t: T) -> Result<LatentVec<T>> {
    same_dim(z_l.dim(), z_t.dim())?;
    if t >= T::one() {
        return Err(Error::SingularTime { t: t.to_f64_lossy() });
    }
    check_t(t)?;
    let s = T::one() - t;
    Ok(LatentVec(
        z_l.iter().zip(z_t.iter()).map(|(l, z)| (*l - *z) / s).collect(),
    ))
}

/// A draw from the bridge, keeping the noise that produced `z_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct BridgeSample<T> {
    z_u: LatentVec<T>,
    z_l: LatentVec<T>,
    t: T,
    sigma: T,
    noise: LatentVec<T>,
    z_t: LatentVec<T>,
    c: LightCondition<T>,
}

impl<T: Real> BridgeSample<T> {
    pub fn new(
        z_u: LatentVec<T>,
        z_l: LatentVec<T>,
        c: LightCondition<T>,
        t: T,
        sigma: T,
        noise: LatentVec<T>,
    ) -> Result<Self> {
        if t >= T::one() {
            return Err(Error::SingularTime { t: t.to_f64_lossy() });
        }
        let z_t = bridge_interpolate(&z_u, &z_l, t, sigma, &noise)?;
        Ok(BridgeSample {
            z_u,
            z_l,
            t,
            sigma,
            noise,
            z_t,
            c,
        })
    }

    pub fn draw(
        z_u: LatentVec<T>,
        z_l: LatentVec<T>,
        c: LightCondition<T>,
        t: T,
        sigma: T,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let noise = LatentVec::standard_normal(z_u.dim(), rng);
        Self::new(z_u, z_l, c, t, sigma, noise)
    }

    pub fn z_u(&self) -> &LatentVec<T> {
        &self.z_u
    }
    pub fn z_l(&self) -> &LatentVec<T> {
        &self.z_l
    }
    pub fn z_t(&self) -> &LatentVec<T> {
        &self.z_t
    }
    pub fn noise(&self) -> &LatentVec<T> {
        &self.noise
    }
    pub fn t(&self) -> T {
        self.t
    }
    pub fn sigma(&self) -> T {
        self.sigma
    }
    pub fn condition(&self) -> &LightCondition<T> {
        &self.c
    }

    pub fn target(&self) -> LatentVec<T> {
        target_drift(&self.z_l, &self.z_t, self.t).expect("t < 1 by construction")
    }
}

/// A velocity field `v(z, t, c)`.
pub trait DriftModel<T: Real>: Sync {
    fn drift(&self, z: &[T], t: T, c: &LightCondition<T>) -> Vec<T>;
}

impl<T: Real, F> DriftModel<T> for F
where
    F: Fn(&[T], T, &LightCondition<T>) -> Vec<T> + Sync,
{
    fn drift(&self, z: &[T], t: T, c: &LightCondition<T>) -> Vec<T> {
        self(z, t, c)
    }
}

/// Batch mean of `‖v(z_t, t, c) − (z_l − z_t)/(1−t)‖²`.
pub fn lbm_loss<T: Real, M: DriftModel<T> + ?Sized>(field: &M, batch: &[BridgeSample<T>]) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let per_sample = batch
        .par_iter()
        .map(|s| {
            let v = field.drift(&s.z_t, s.t, &s.c);
            same_dim(v.len(), s.z_t.dim())?;
            let target = s.target();
            Ok(v.iter()
                .zip(target.iter())
                .map(|(a, b)| (a.to_f64_lossy() - b.to_f64_lossy()).powi(2))
                .sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?;
    let total: CompensatedSum = per_sample.into_iter().collect();
    Ok(total.value() / batch.len() as f64)
}

/// `z + (1−t)·v(z, t, c)`.
pub fn transport_at<T: Real, M: DriftModel<T> + ?Sized>(
    field: &M,
    z: &LatentVec<T>,
    t: T,
    c: &LightCondition<T>,
) -> Result<LatentVec<T>> {
    check_t(t)?;
    let v = field.drift(z, t, c);
    same_dim(v.len(), z.dim())?;
    let s = T::one() - t;
    LatentVec::new(z.iter().zip(&v).map(|(a, b)| *a + s * *b).collect())
}

/// Single forward pass from `t = 0`: `z_u + v(z_u, 0, c)`.
pub fn one_step_transport<T: Real, M: DriftModel<T> + ?Sized>(
    field: &M,
    z_u: &LatentVec<T>,
    c: &LightCondition<T>,
) -> Result<LatentVec<T>> {
    transport_at(field, z_u, T::zero(), c)
}

/// `min(1, κ·I/Ī)` on pixel luminance.
pub fn pixel_weight_mask<T: Real>(img: &LinearImage<T>, kappa: T) -> Result<Matte<T>> {
    if !(kappa > T::zero()) {
        return Err(Error::domain("kappa must be positive"));
    }
    let lum: Vec<f64> = img.pixels().map(|p| p.luminance().to_f64_lossy()).collect();
    let mean = lum.iter().copied().collect::<CompensatedSum>().value() / lum.len().max(1) as f64;
    if !(mean > 0.0) {
        return Err(Error::DegenerateMean);
    }
    let k = kappa.to_f64_lossy();
    let w = lum
        .iter()
        .map(|&l| T::of(if l == 0.0 { 0.0 } else { (k * l / mean).min(1.0) }))
        .collect();
    Matte::new(img.width(), img.height(), w)
}

/// Mean of `mask·|pred − gt|` over pixels and channels.
pub fn weighted_pixel_loss<T: Real>(pred: &LinearImage<T>, gt: &LinearImage<T>, mask: &Matte<T>) -> Result<f64> {
    ensure_same_dims(pred.dims(), gt.dims())?;
    ensure_same_dims(pred.dims(), mask.dims())?;
    let acc: CompensatedSum = pred
        .samples()
        .iter()
        .zip(gt.samples())
        .enumerate()
        .map(|(i, (p, g))| mask.values()[i / 3].to_f64_lossy() * (p.to_f64_lossy() - g.to_f64_lossy()).abs())
        .collect();
    Ok(acc.value() / pred.samples().len() as f64)
}

/// `| ‖pred‖₁/‖gt‖₁ − 1 |`.
pub fn energy_loss<T: Real>(pred: &LinearImage<T>, gt: &LinearImage<T>) -> Result<f64> {
    energy_ratio_error(pred, gt)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossWeights {
    lambda_pix: f64,
    lambda_energy: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            lambda_pix: 1.0,
            lambda_energy: 0.1,
        }
    }
}

impl LossWeights {
    pub fn new(lambda_pix: f64, lambda_energy: f64) -> Result<Self> {
        if !(lambda_pix >= 0.0 && lambda_energy >= 0.0 && lambda_pix.is_finite() && lambda_energy.is_finite()) {
            return Err(Error::domain("loss weights must be finite and non-negative"));
        }
        Ok(LossWeights {
            lambda_pix,
            lambda_energy,
        })
    }
    pub fn lambda_pix(&self) -> f64 {
        self.lambda_pix
    }
    pub fn lambda_energy(&self) -> f64 {
        self.lambda_energy
    }
}

/// `lbm + λ_pix·pix + λ_energy·energy`.
pub fn combine_losses(lbm: f64, pix: f64, energy: f64, lw: &LossWeights) -> Result<f64> {
    if !(lbm >= 0.0 && pix >= 0.0 && energy >= 0.0) {
        return Err(Error::domain("loss terms must be non-negative"));
    }
    Ok(lbm + lw.lambda_pix * pix + lw.lambda_energy * energy)
}

/// An extra image-space loss term, e.g. an identity-preservation network.
pub trait LossProvider: Send + Sync {
    fn evaluate(&self, pred: &LinearImage<f64>, gt: &LinearImage<f64>) -> Result<f64>;
}

/// Keyed auxiliary losses with their weights. `"id"` is the slot reserved for
/// identity preservation; no provider is bundled.
#[derive(Default)]
pub struct LossRegistry {
    providers: BTreeMap<String, (f64, Box<dyn LossProvider>)>,
}

impl LossRegistry {
    pub const IDENTITY_KEY: &'static str = "id";

    pub fn register(&mut self, key: &str, weight: f64, provider: Box<dyn LossProvider>) -> Result<()> {
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::domain("loss weight must be finite and non-negative"));
        }
        if self.providers.contains_key(key) {
            return Err(Error::invalid(
                "loss registry",
                format!("key {key:?} already registered"),
            ));
        }
        self.providers.insert(key.to_string(), (weight, provider));
        Ok(())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.providers.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.providers.is_empty()
    }

    /// Weighted sum of all registered terms (0 when empty).
    pub fn weighted_total(&self, pred: &LinearImage<f64>, gt: &LinearImage<f64>) -> Result<f64> {
        let mut total = 0.0;
        for (w, p) in self.providers.values() {
            total += w * p.evaluate(pred, gt)?;
        }
        Ok(total)
    }
}
