//! Affine velocity field `v = A·z + a_t·t + B·c + d`, its least-squares fit and
//! the affine toy problem used to exercise it.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    encode_light_condition, lbm_loss, one_step_transport, BridgeSample, DriftModel, LatentVec, LightCondition,
};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest accepted condition number of the equilibrated normal matrix.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearVelocityField {
    a: DMatrix<f64>,
    a_t: DVector<f64>,
    b: DMatrix<f64>,
    d: DVector<f64>,
}

impl LinearVelocityField {
    pub fn zero(dim: usize) -> Self {
        LinearVelocityField {
            a: DMatrix::zeros(dim, dim),
            a_t: DVector::zeros(dim),
            b: DMatrix::zeros(dim, 4),
            d: DVector::zeros(dim),
        }
    }

    pub fn from_parts(a: DMatrix<f64>, a_t: DVector<f64>, b: DMatrix<f64>, d: DVector<f64>) -> Result<Self> {
        let n = d.len();
        if a.shape() != (n, n) || a_t.len() != n || b.shape() != (n, 4) {
            return Err(Error::dims("affine field blocks"));
        }
        Ok(LinearVelocityField { a, a_t, b, d })
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn a_t(&self) -> &DVector<f64> {
        &self.a_t
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn d(&self) -> &DVector<f64> {
        &self.d
    }

    fn eval(&self, z: &[f64], t: f64, c: [f64; 4]) -> DVector<f64> {
        let z = DVector::from_column_slice(z);
        &self.a * z + &self.a_t * t + &self.b * DVector::from_column_slice(&c) + &self.d
    }
}

impl<T: Real> DriftModel<T> for LinearVelocityField {
    fn drift(&self, z: &[T], t: T, c: &LightCondition<T>) -> Vec<T> {
        let z: Vec<f64> = z.iter().map(|v| v.to_f64_lossy()).collect();
        let c = c.components().map(|v| v.to_f64_lossy());
        self.eval(&z, t.to_f64_lossy(), c).iter().map(|&v| T::of(v)).collect()
    }
}

/// Times at which each pair is sampled during fitting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TSchedule {
    /// `t = k/steps` for `k = 0..steps`.
    Grid { steps: usize },
    /// `per_pair` independent draws from `U[0, t_max)`.
    Uniform { per_pair: usize, t_max: f64 },
}

impl TSchedule {
    fn validate(&self) -> Result<()> {
        match *self {
            TSchedule::Grid { steps: 0 } => Err(Error::domain("grid schedule needs at least one step")),
            TSchedule::Uniform { per_pair, t_max } if per_pair == 0 || !(t_max > 0.0 && t_max < 1.0) => {
                Err(Error::domain("uniform schedule needs per_pair ≥ 1 and t_max in (0, 1)"))
            }
            _ => Ok(()),
        }
    }

    fn times(&self, rng: &mut impl Rng) -> Vec<f64> {
        match *self {
            TSchedule::Grid { steps } => (0..steps).map(|k| k as f64 / steps as f64).collect(),
            TSchedule::Uniform { per_pair, t_max } => (0..per_pair).map(|_| rng.random_range(0.0..t_max)).collect(),
        }
    }
}

/// A paired `(z_u, z_l, c)` training example.
#[derive(Clone, Debug, PartialEq)]
pub struct BridgePair<T> {
    pub z_u: LatentVec<T>,
    pub z_l: LatentVec<T>,
    pub c: LightCondition<T>,
}

pub fn draw_samples<T: Real>(
    pairs: &[BridgePair<T>],
    sigma: f64,
    schedule: &TSchedule,
    rng: &mut impl Rng,
) -> Result<Vec<BridgeSample<T>>> {
    schedule.validate()?;
    let mut out = Vec::new();
    for p in pairs {
        for t in schedule.times(rng) {
            out.push(BridgeSample::draw(
                p.z_u.clone(),
                p.z_l.clone(),
                p.c,
                T::of(t),
                T::of(sigma),
                rng,
            )?);
        }
    }
    Ok(out)
}

/// Least-squares affine field over `[z_t, t, c, 1]` features, solved through
/// Jacobi-equilibrated normal equations.
pub fn fit_on_samples<T: Real>(samples: &[BridgeSample<T>]) -> Result<LinearVelocityField> {
    let first = samples.first().ok_or(Error::EmptyBatch)?;
    let d = first.z_t().dim();
    let p = d + 6;
    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DMatrix::<f64>::zeros(p, d);
    let mut phi = vec![0.0; p];
    for s in samples {
        if s.z_t().dim() != d {
            return Err(Error::dims("samples mix latent dimensions"));
        }
        for (k, v) in s.z_t().iter().enumerate() {
            phi[k] = v.to_f64_lossy();
        }
        phi[d] = s.t().to_f64_lossy();
        for (k, v) in s.condition().components().iter().enumerate() {
            phi[d + 1 + k] = v.to_f64_lossy();
        }
        phi[d + 5] = 1.0;
        let y = s.target();
        for i in 0..p {
            for j in i..p {
                gram[(i, j)] += phi[i] * phi[j];
            }
            for (j, yj) in y.iter().enumerate() {
                rhs[(i, j)] += phi[i] * yj.to_f64_lossy();
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            gram[(i, j)] = gram[(j, i)];
        }
    }

    let scale = DVector::from_iterator(p, (0..p).map(|i| gram[(i, i)]));
    if scale.iter().any(|&g| !(g > 0.0)) {
        let rank = scale.iter().filter(|&&g| g > 0.0).count();
        return Err(Error::RankDeficient {
            condition: f64::INFINITY,
            rank,
            params: p,
        });
    }
    let scale = scale.map(|g| 1.0 / g.sqrt());
    let sd = DMatrix::from_diagonal(&scale);
    let eq = &sd * &gram * &sd;
    let eig = SymmetricEigen::new(eq.clone());
    let lmax = eig.eigenvalues.max();
    let lmin = eig.eigenvalues.min();
    let condition = if lmin > 0.0 { lmax / lmin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        let rank = eig.eigenvalues.iter().filter(|&&l| l > lmax / MAX_CONDITION).count();
        return Err(Error::RankDeficient {
            condition,
            rank,
            params: p,
        });
    }
    let chol = Cholesky::new(eq).ok_or(Error::RankDeficient {
        condition,
        rank: p - 1,
        params: p,
    })?;
    // rows of `coef` index features, columns index latent components
    let coef = &sd * chol.solve(&(&sd * rhs));
    let w = coef.transpose();
    Ok(LinearVelocityField {
        a: w.columns(0, d).into_owned(),
        a_t: w.column(d).into_owned(),
        b: w.columns(d + 1, 4).into_owned(),
        d: w.column(d + 5).into_owned(),
    })
}

/// Draws bridge samples for every pair and fits the affine field to them.
pub fn fit_linear_velocity<T: Real>(
    pairs: &[BridgePair<T>],
    sigma: f64,
    schedule: &TSchedule,
    rng: &mut impl Rng,
) -> Result<LinearVelocityField> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::domain("sigma must be finite and non-negative"));
    }
    fit_on_samples(&draw_samples(pairs, sigma, schedule, rng)?)
}

/// Expected irreducible LBM loss from the bridge noise: `σ²·d·mean(t/(1−t))`.
pub fn noise_floor<T: Real>(samples: &[BridgeSample<T>]) -> Result<f64> {
    let first = samples.first().ok_or(Error::EmptyBatch)?;
    let d = first.z_t().dim() as f64;
    let mean = samples
        .iter()
        .map(|s| {
            let (t, sigma) = (s.t().to_f64_lossy(), s.sigma().to_f64_lossy());
            sigma * sigma * t / (1.0 - t)
        })
        .sum::<f64>()
        / samples.len() as f64;
    Ok(d * mean)
}

/// Ground truth `z_l = z_u + M·c + b` over a fixed set of light conditions.
#[derive(Clone, Debug)]
pub struct AffineToy {
    m: DMatrix<f64>,
    b: DVector<f64>,
    conditions: Vec<LightCondition<f64>>,
}

impl AffineToy {
    pub fn random(dim: usize, n_conditions: usize, rng: &mut impl Rng) -> Result<Self> {
        if dim == 0 || n_conditions == 0 {
            return Err(Error::domain("toy needs dim ≥ 1 and at least one condition"));
        }
        let m = DMatrix::from_fn(dim, 4, |_, _| rng.random_range(-1.0..1.0));
        let b = DVector::from_fn(dim, |_, _| rng.random_range(-0.5..0.5));
        let conditions = (0..n_conditions)
            .map(|_| {
                let theta = rng.random_range(0.0..std::f64::consts::PI);
                let phi = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                encode_light_condition(theta, phi)
            })
            .collect::<Result<_>>()?;
        Ok(AffineToy { m, b, conditions })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn conditions(&self) -> &[LightCondition<f64>] {
        &self.conditions
    }

    pub fn relight(&self, z_u: &LatentVec<f64>, c: &LightCondition<f64>) -> LatentVec<f64> {
        let shift = &self.m * DVector::from_column_slice(&c.components()) + &self.b;
        LatentVec::new(z_u.iter().zip(shift.iter()).map(|(u, s)| u + s).collect()).expect("finite toy data")
    }

    /// Pairs cycle through the conditions; `z_u` is standard normal.
    pub fn pairs(&self, n: usize, rng: &mut impl Rng) -> Vec<BridgePair<f64>> {
        (0..n)
            .map(|i| {
                let c = self.conditions[i % self.conditions.len()];
                let z_u = LatentVec::standard_normal(self.dim(), rng);
                let z_l = self.relight(&z_u, &c);
                BridgePair { z_u, z_l, c }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemoConfig {
    pub dim: usize,
    pub pairs: usize,
    pub conditions: usize,
    pub sigma: f64,
    pub schedule: TSchedule,
    pub seed: u64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            dim: 8,
            pairs: 1000,
            conditions: 20,
            sigma: 0.0,
            schedule: TSchedule::Grid { steps: 10 },
            seed: 0,
        }
    }
}

/// Losses are measured on a fresh held-out set drawn from the same toy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DemoReport {
    pub fitted_loss: f64,
    pub train_loss: f64,
    pub transport_mse: f64,
    pub sigma_floor_estimate: f64,
}

pub fn run_demo(cfg: &DemoConfig) -> Result<DemoReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let toy = AffineToy::random(cfg.dim, cfg.conditions, &mut rng)?;
    let train = toy.pairs(cfg.pairs, &mut rng);
    let train_samples = draw_samples(&train, cfg.sigma, &cfg.schedule, &mut rng)?;
    let field = fit_on_samples(&train_samples)?;

    let held_out = toy.pairs(cfg.pairs, &mut rng);
    let eval = draw_samples(&held_out, cfg.sigma, &cfg.schedule, &mut rng)?;
    let mut sq = 0.0;
    for p in &held_out {
        sq += one_step_transport(&field, &p.z_u, &p.c)?.squared_distance(&p.z_l);
    }
    Ok(DemoReport {
        fitted_loss: lbm_loss(&field, &eval)?,
        train_loss: lbm_loss(&field, &train_samples)?,
        transport_mse: sq / (held_out.len() * cfg.dim) as f64,
        sigma_floor_estimate: noise_floor(&eval)?,
    })
}
