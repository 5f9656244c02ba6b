//! Full-reference image metrics: PSNR, SSIM, relative RMSE and energy ratio.

use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::image::{ensure_same_dims, DisplayImage, LinearImage, Matte};
use crate::scalar::{CompensatedSum, Real};

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

fn mask_weights<T: Real>(img: &LinearImage<T>, mask: Option<&Matte<T>>) -> Result<Option<Vec<f64>>> {
    match mask {
        None => Ok(None),
        Some(m) => {
            ensure_same_dims(img.dims(), m.dims())?;
            Ok(Some(m.values().iter().map(|v| v.to_f64_lossy()).collect()))
        }
    }
}

fn mse<T: Real>(a: &LinearImage<T>, b: &LinearImage<T>, mask: Option<&Matte<T>>) -> Result<f64> {
    ensure_same_dims(a.dims(), b.dims())?;
    let weights = mask_weights(a, mask)?;
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for (i, (x, y)) in a.samples().iter().zip(b.samples()).enumerate() {
        let w = weights.as_ref().map_or(1.0, |m| m[i / 3]);
        let d = x.to_f64_lossy() - y.to_f64_lossy();
        num.add(w * d * d);
        den.add(w);
    }
    if !(den.value() > 0.0) {
        return Err(Error::invalid("mask", "selects no pixels"));
    }
    Ok(num.value() / den.value())
}

fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (1.0 / mse).log10()
    }
}

/// Peak-1 PSNR in dB; identical images give `f64::INFINITY`.
pub fn psnr<T: Real>(a: &DisplayImage<T>, b: &DisplayImage<T>) -> Result<f64> {
    psnr_linear(a.as_linear(), b.as_linear())
}

pub fn psnr_linear<T: Real>(a: &LinearImage<T>, b: &LinearImage<T>) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b, None)?))
}

/// PSNR with per-pixel squared errors weighted by the matte.
pub fn psnr_masked<T: Real>(a: &LinearImage<T>, b: &LinearImage<T>, mask: &Matte<T>) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b, Some(mask))?))
}

pub fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let c = (SSIM_WINDOW / 2) as f64;
    let mut g = [0.0; SSIM_WINDOW];
    for (i, v) in g.iter_mut().enumerate() {
        let x = i as f64 - c;
        *v = (-x * x / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = g.iter().sum();
    g.map(|v| v / s)
}

/// Valid-mode separable filter of a single-channel plane.
fn filter_valid(plane: &[f64], w: usize, h: usize, g: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let (ow, oh) = (w + 1 - SSIM_WINDOW, h + 1 - SSIM_WINDOW);
    let mut horiz = vec![0.0; ow * h];
    for y in 0..h {
        let row = &plane[y * w..(y + 1) * w];
        for x in 0..ow {
            horiz[y * ow + x] = g.iter().zip(&row[x..x + SSIM_WINDOW]).map(|(k, v)| k * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = g.iter().enumerate().map(|(k, gk)| gk * horiz[(y + k) * ow + x]).sum();
        }
    }
    out
}

/// Per-channel SSIM maps over valid window positions.
fn ssim_maps<T: Real>(a: &LinearImage<T>, b: &LinearImage<T>) -> Result<(usize, usize, [Vec<f64>; 3])> {
    ensure_same_dims(a.dims(), b.dims())?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::domain(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {w}x{h}"
        )));
    }
    let g = gaussian_window();
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let maps = [0, 1, 2].map(|c| {
        let pa: Vec<f64> = a
            .samples()
            .iter()
            .skip(c)
            .step_by(3)
            .map(|v| v.to_f64_lossy())
            .collect();
        let pb: Vec<f64> = b
            .samples()
            .iter()
            .skip(c)
            .step_by(3)
            .map(|v| v.to_f64_lossy())
            .collect();
        let prod = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).collect::<Vec<_>>();
        let mu_a = filter_valid(&pa, w, h, &g);
        let mu_b = filter_valid(&pb, w, h, &g);
        let aa = filter_valid(&prod(&pa, &pa), w, h, &g);
        let bb = filter_valid(&prod(&pb, &pb), w, h, &g);
        let ab = filter_valid(&prod(&pa, &pb), w, h, &g);
        (0..mu_a.len())
            .map(|i| {
                let (ma, mb) = (mu_a[i], mu_b[i]);
                let va = aa[i] - ma * ma;
                let vb = bb[i] - mb * mb;
                let cov = ab[i] - ma * mb;
                ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2))
            })
            .collect()
    });
    Ok((w + 1 - SSIM_WINDOW, h + 1 - SSIM_WINDOW, maps))
}

/// Single-scale SSIM (11×11 Gaussian window, σ = 1.5, dynamic range 1), mean
/// over valid windows and channels.
pub fn ssim<T: Real>(a: &DisplayImage<T>, b: &DisplayImage<T>) -> Result<f64> {
    ssim_linear(a.as_linear(), b.as_linear())
}

pub fn ssim_linear<T: Real>(a: &LinearImage<T>, b: &LinearImage<T>) -> Result<f64> {
    let (_, _, maps) = ssim_maps(a, b)?;
    let mut acc = CompensatedSum::new();
    let mut n = 0usize;
    for m in &maps {
        for v in m {
            acc.add(*v);
            n += 1;
        }
    }
    Ok(acc.value() / n as f64)
}

/// SSIM averaged with each window weighted by the matte at its center.
pub fn ssim_masked<T: Real>(a: &LinearImage<T>, b: &LinearImage<T>, mask: &Matte<T>) -> Result<f64> {
    ensure_same_dims(a.dims(), mask.dims())?;
    let (ow, oh, maps) = ssim_maps(a, b)?;
    let half = SSIM_WINDOW / 2;
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for y in 0..oh {
        for x in 0..ow {
            let w = mask.at(x + half, y + half).to_f64_lossy();
            for m in &maps {
                num.add(w * m[y * ow + x]);
                den.add(w);
            }
        }
    }
    if !(den.value() > 0.0) {
        return Err(Error::invalid("mask", "covers no SSIM window center"));
    }
    Ok(num.value() / den.value())
}

/// `‖a − b‖₂ / ‖b‖₂`.
pub fn relative_rmse<T: Real>(a: &LinearImage<T>, b: &LinearImage<T>) -> Result<f64> {
    rel_rmse_impl(a, b, None)
}

pub fn relative_rmse_masked<T: Real>(a: &LinearImage<T>, b: &LinearImage<T>, mask: &Matte<T>) -> Result<f64> {
    rel_rmse_impl(a, b, Some(mask))
}

fn rel_rmse_impl<T: Real>(a: &LinearImage<T>, b: &LinearImage<T>, mask: Option<&Matte<T>>) -> Result<f64> {
    ensure_same_dims(a.dims(), b.dims())?;
    let weights = mask_weights(a, mask)?;
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for (i, (x, y)) in a.samples().iter().zip(b.samples()).enumerate() {
        let w = weights.as_ref().map_or(1.0, |m| m[i / 3]);
        let (x, y) = (x.to_f64_lossy(), y.to_f64_lossy());
        num.add(w * (x - y) * (x - y));
        den.add(w * y * y);
    }
    if !(den.value() > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    Ok((num.value() / den.value()).sqrt())
}

/// `| ‖a‖₁ / ‖b‖₁ − 1 |`.
pub fn energy_ratio_error<T: Real>(a: &LinearImage<T>, b: &LinearImage<T>) -> Result<f64> {
    ensure_same_dims(a.dims(), b.dims())?;
    let gt = b.l1_norm().to_f64_lossy();
    if !(gt > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    Ok((a.l1_norm().to_f64_lossy() / gt - 1.0).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Psnr,
    Ssim,
    Energy,
    RelRmse,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Psnr, Metric::Ssim, Metric::Energy, Metric::RelRmse];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Psnr => "psnr",
            Metric::Ssim => "ssim",
            Metric::Energy => "energy",
            Metric::RelRmse => "relrmse",
        }
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid("metric", format!("unknown metric {s:?}")))
    }
}

fn ser_db<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_infinite() => s.serialize_str("inf"),
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_none(),
    }
}

/// Requested metrics; absent entries were not computed. Infinite PSNR serializes as `"inf"`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MetricReport {
    #[serde(serialize_with = "ser_db", skip_serializing_if = "Option::is_none")]
    pub psnr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ssim: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_ratio_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_rmse: Option<f64>,
}

/// Computes `metrics` comparing `pred` against `gt`. PSNR and SSIM read the
/// display pair; energy and relative RMSE read the linear pair.
pub fn evaluate<T: Real>(
    display: (&LinearImage<T>, &LinearImage<T>),
    linear: (&LinearImage<T>, &LinearImage<T>),
    metrics: &[Metric],
    mask: Option<&Matte<T>>,
) -> Result<MetricReport> {
    let mut r = MetricReport::default();
    for m in metrics {
        match m {
            Metric::Psnr => {
                r.psnr_db = Some(match mask {
                    Some(k) => psnr_masked(display.0, display.1, k)?,
                    None => psnr_linear(display.0, display.1)?,
                })
            }
            Metric::Ssim => {
                r.ssim = Some(match mask {
                    Some(k) => ssim_masked(display.0, display.1, k)?,
                    None => ssim_linear(display.0, display.1)?,
                })
            }
            Metric::Energy => {
                r.energy_ratio_err = Some(match mask {
                    Some(k) => energy_ratio_error(&apply_mask(linear.0, k)?, &apply_mask(linear.1, k)?)?,
                    None => energy_ratio_error(linear.0, linear.1)?,
                })
            }
            Metric::RelRmse => {
                r.rel_rmse = Some(match mask {
                    Some(k) => relative_rmse_masked(linear.0, linear.1, k)?,
                    None => relative_rmse(linear.0, linear.1)?,
                })
            }
        }
    }
    Ok(r)
}

fn apply_mask<T: Real>(img: &LinearImage<T>, mask: &Matte<T>) -> Result<LinearImage<T>> {
    ensure_same_dims(img.dims(), mask.dims())?;
    let samples = img
        .samples()
        .iter()
        .enumerate()
        .map(|(i, v)| *v * mask.values()[i / 3])
        .collect();
    LinearImage::new(img.width(), img.height(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Rgb;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_display(w: usize, h: usize, rng: &mut ChaCha8Rng) -> DisplayImage<f64> {
        DisplayImage::new(w, h, (0..w * h * 3).map(|_| rng.random()).collect()).unwrap()
    }

    fn brute_force_ssim(a: &LinearImage<f64>, b: &LinearImage<f64>) -> f64 {
        let (w, h) = a.dims();
        let g = gaussian_window();
        let (c1, c2) = (1e-4, 9e-4);
        let mut total = 0.0;
        let mut n = 0;
        for c in 0..3 {
            for y0 in 0..=h - 11 {
                for x0 in 0..=w - 11 {
                    let (mut ma, mut mb) = (0.0, 0.0);
                    for j in 0..11 {
                        for i in 0..11 {
                            let k = g[i] * g[j];
                            ma += k * a.pixel(x0 + i, y0 + j).get(c);
                            mb += k * b.pixel(x0 + i, y0 + j).get(c);
                        }
                    }
                    let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
                    for j in 0..11 {
                        for i in 0..11 {
                            let k = g[i] * g[j];
                            let da = a.pixel(x0 + i, y0 + j).get(c) - ma;
                            let db = b.pixel(x0 + i, y0 + j).get(c) - mb;
                            va += k * da * da;
                            vb += k * db * db;
                            cov += k * da * db;
                        }
                    }
                    total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                    n += 1;
                }
            }
        }
        total / n as f64
    }

    #[test]
    fn psnr_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_display(8, 8, &mut rng);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        let zero = DisplayImage::new(4, 4, vec![0.0; 48]).unwrap();
        let one = DisplayImage::new(4, 4, vec![1.0; 48]).unwrap();
        assert_eq!(psnr(&zero, &one).unwrap(), 0.0);
        let mut s = vec![0.0; 300];
        s[..3].copy_from_slice(&[1.0; 3]);
        let b = DisplayImage::new(10, 10, s).unwrap();
        let z = DisplayImage::new(10, 10, vec![0.0; 300]).unwrap();
        assert_eq!(psnr(&b, &z).unwrap(), 20.0);
        assert!(psnr(&a, &zero).is_err());
    }

    #[test]
    fn psnr_decreases_with_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base: Vec<f64> = (0..16 * 16 * 3).map(|_| 0.25 + 0.5 * rng.random::<f64>()).collect();
        let noise: Vec<f64> = (0..base.len()).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let clean = DisplayImage::new(16, 16, base.clone()).unwrap();
        let scores: Vec<f64> = [0.01, 0.05, 0.2]
            .iter()
            .map(|amp| {
                let noisy = base.iter().zip(&noise).map(|(b, n)| b + amp * n).collect();
                psnr(&DisplayImage::new(16, 16, noisy).unwrap(), &clean).unwrap()
            })
            .collect();
        assert!(scores[0] > scores[1] && scores[1] > scores[2], "{scores:?}");
    }

    #[test]
    fn ssim_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_display(20, 16, &mut rng);
        assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-9);
        let zero = DisplayImage::new(12, 12, vec![0.0; 432]).unwrap();
        let one = DisplayImage::new(12, 12, vec![1.0; 432]).unwrap();
        let c1 = SSIM_K1 * SSIM_K1;
        assert!((ssim(&zero, &one).unwrap() - c1 / (1.0 + c1)).abs() < 1e-12);
        let small = DisplayImage::new(10, 12, vec![0.0; 360]).unwrap();
        assert!(ssim(&small, &small).is_err());
    }

    #[test]
    fn ssim_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..3 {
            let a = random_display(32, 32, &mut rng);
            let b = random_display(32, 32, &mut rng);
            let fast = ssim(&a, &b).unwrap();
            let slow = brute_force_ssim(a.as_linear(), b.as_linear());
            assert!((fast - slow).abs() < 1e-6, "{fast} vs {slow}");
        }
    }

    #[test]
    fn full_mask_matches_unmasked() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_display(16, 14, &mut rng).into_linear();
        let b = random_display(16, 14, &mut rng).into_linear();
        let m = Matte::filled(16, 14, 1.0).unwrap();
        assert!((psnr_masked(&a, &b, &m).unwrap() - psnr_linear(&a, &b).unwrap()).abs() < 1e-12);
        assert!((ssim_masked(&a, &b, &m).unwrap() - ssim_linear(&a, &b).unwrap()).abs() < 1e-12);
        assert!((relative_rmse_masked(&a, &b, &m).unwrap() - relative_rmse(&a, &b).unwrap()).abs() < 1e-12);
        assert!(psnr_masked(&a, &b, &Matte::filled(16, 14, 0.0).unwrap()).is_err());
    }

    #[test]
    fn relative_rmse_examples() {
        let b = LinearImage::from_fn(4, 3, |x, y| Rgb::new(1.0 + x as f64, 2.0, 0.5 + y as f64)).unwrap();
        assert_eq!(relative_rmse(&b, &b).unwrap(), 0.0);
        assert!((relative_rmse(&b.scaled(1.1).unwrap(), &b).unwrap() - 0.1).abs() < 1e-12);
        assert!((relative_rmse(&LinearImage::black(4, 3), &b).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            relative_rmse(&b, &LinearImage::black(4, 3)),
            Err(Error::ZeroEnergy)
        ));
        assert_eq!(energy_ratio_error(&b.scaled(2.0).unwrap(), &b).unwrap(), 1.0);
    }

    #[test]
    fn report_serialization() {
        let r = MetricReport {
            psnr_db: Some(f64::INFINITY),
            ssim: Some(1.0),
            ..Default::default()
        };
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["psnr_db"], "inf");
        assert!(v.get("rel_rmse").is_none());
        assert_eq!("relrmse".parse::<Metric>().unwrap(), Metric::RelRmse);
        assert!("lpips".parse::<Metric>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn metrics_are_symmetric_and_bounded(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_display(13, 12, &mut rng);
            let b = random_display(13, 12, &mut rng);
            prop_assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
            let (s1, s2) = (ssim(&a, &b).unwrap(), ssim(&b, &a).unwrap());
            prop_assert!((s1 - s2).abs() < 1e-15);
            prop_assert!(s1 <= 1.0);
            prop_assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-9);
        }
    }
}
