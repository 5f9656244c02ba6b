//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when a hard criterion fails. Criterion 10 is soft: a miss is
//! reported but does not fail the run.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lightstage::bridge::{
    combine_losses, energy_loss, pixel_weight_mask, run_demo, weighted_pixel_loss, DemoConfig, LossWeights, TSchedule,
};
use lightstage::envmap::{decode_radiance_hdr, encode_radiance_hdr, rgbe_from_rgb};
use lightstage::metrics::{gaussian_window, psnr, ssim, Metric, SSIM_K1, SSIM_K2, SSIM_WINDOW};
use lightstage::projection::{project_cone_weights, project_point_weights};
use lightstage::stack_io::{read_png, save_stack, slice_path};
use lightstage::{
    build_fibonacci_rig, composite_relit, normalize_weights, render_sphere_env, render_sphere_olat,
    split_diffuse_specular, texel_solid_angle, total_energy, DisplayImage, Error, LightRig, LightRigF64, LinearImage,
    LinearImageF64, Material, Matte, OlatStack, OlatStackF64, ProjectionMode, RadianceMapF64, Rgb, SphereScene,
    WeightSet, WeightSetF64,
};
use lightstage_cli::commands::sweep_step;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pass thresholds, one block per criterion.
mod tol {
    pub const LINEARITY_REL_RMSE: f64 = 0.03;
    pub const CONE_CAPTURE_MIN: f64 = 0.99;
    pub const POINT_CAPTURE_MAX: f64 = 0.50;
    pub const ROTATION_REL_RMSE: f64 = 0.02;
    pub const BRIDGE_EXACT: f64 = 1e-10;
    pub const BRIDGE_FLOOR_REL: f64 = 0.05;
    pub const RGBE_REL: f64 = 0.5 / 256.0;
    pub const SOLID_ANGLE_REL: f64 = 1e-6;
    pub const SSIM_SELF: f64 = 1e-9;
    pub const SSIM_VS_BRUTE: f64 = 1e-6;
    pub const GRAY_INVARIANCE: f64 = 1e-9;
    pub const COMPOSITE_SERIAL_S: f64 = 5.0;
    pub const COMPOSITE_PARALLEL_S: f64 = 1.5;
}

/// Shared scene: 156-light rig, 128² Lambertian sphere and a smooth 512×256 environment.
struct Fixture {
    rig: LightRigF64,
    scene: SphereScene,
    material: Material,
    stack: OlatStackF64,
    env: RadianceMapF64,
}

impl Fixture {
    fn new() -> Self {
        let rig = build_fibonacci_rig(156, 15f64.to_radians()).unwrap();
        let scene = SphereScene::new(0.9, 128)
            .unwrap()
            .with_solid_angle_unit(rig.mean_solid_angle())
            .unwrap();
        let material = Material::lambert(Rgb::splat(0.8)).unwrap();
        let stack = render_sphere_olat(&scene, &rig, &material);
        let lobe_axis = [0.5, 0.6, 0.6f64];
        let n = lobe_axis.iter().map(|v| v * v).sum::<f64>().sqrt();
        let a = lobe_axis.map(|v| v / n);
        let env = RadianceMapF64::from_fn(256, |d| {
            let base = 0.6 + 0.3 * d.y();
            let cos = d.x() * a[0] + d.y() * a[1] + d.z() * a[2];
            Rgb::new(base, base * 0.9, base * 0.8) + Rgb::new(1.0, 0.8, 0.6) * (3.0 * (cos - 1.0)).exp()
        })
        .unwrap();
        Fixture {
            rig,
            scene,
            material,
            stack,
            env,
        }
    }
}

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Check {
    Check {
        pass,
        detail: detail.into(),
    }
}

fn normalized_cone_weights(env: &RadianceMapF64, rig: &LightRigF64) -> WeightSetF64 {
    let ws = normalize_weights(&project_cone_weights(env, rig), total_energy(env)).unwrap();
    split_diffuse_specular(&ws)
}

fn linearity(fx: &Fixture) -> Check {
    let ws = normalized_cone_weights(&fx.env, &fx.rig);
    let relit = composite_relit(&fx.stack, &ws, 0.0).unwrap();
    let truth = render_sphere_env(&fx.scene, &fx.env, &fx.material);
    let err = lightstage::relative_rmse(&relit, &truth).unwrap();
    check(
        err < tol::LINEARITY_REL_RMSE,
        format!("relative_rmse {err:.5} (limit {})", tol::LINEARITY_REL_RMSE),
    )
}

/// Off-axis 2×2 block inside the cone of `light` whose texel centers all sit
/// at least two texels from every light axis, so bilinear point lookups see
/// black. `target` is the preferred angular offset from the axis; the block
/// closest to it wins.
fn off_axis_block(env: &RadianceMapF64, rig: &LightRigF64, light: usize, target: f64) -> (usize, usize) {
    let (w, h) = (env.width(), env.height());
    let texel = PI / h as f64;
    let axis = rig.lights()[light].dir();
    let cos_half = rig.lights()[light].cone_half_angle().cos();
    let mut best: Option<((usize, usize), f64)> = None;
    for row in 0..h - 1 {
        for col in 0..w - 1 {
            let cells = [(col, row), (col + 1, row), (col, row + 1), (col + 1, row + 1)];
            let ok = cells.iter().all(|&(c, r)| {
                let d = env.texel_direction(c, r);
                d.dot(&axis) >= cos_half && rig.lights().iter().all(|l| d.angle_to(&l.dir()) >= 2.0 * texel)
            });
            if ok {
                let score = (env.texel_direction(col, row).angle_to(&axis) - target).abs();
                if best.is_none_or(|(_, s)| score < s) {
                    best = Some(((col, row), score));
                }
            }
        }
    }
    best.expect("an off-axis block exists").0
}

/// Fraction of the brute-force energy recovered by cone and by point weights
/// for a lit block at `(col, row)`.
fn capture(fx: &Fixture, col: usize, row: usize) -> (f64, f64) {
    let mut env = RadianceMapF64::constant(256, Rgb::zero()).unwrap();
    for (c, r) in [(col, row), (col + 1, row), (col, row + 1), (col + 1, row + 1)] {
        env.set_texel(c, r, Rgb::splat(100.0)).unwrap();
    }
    let truth = render_sphere_env(&fx.scene, &env, &fx.material).l1_norm();
    let cone = composite_relit(&fx.stack, &normalized_cone_weights(&env, &fx.rig), 0.8).unwrap();
    let raw_point = project_point_weights(&env, &fx.rig);
    // a point lookup that misses the block leaves nothing to normalize
    let point_ws = match normalize_weights(&raw_point, total_energy(&env)) {
        Ok(ws) => split_diffuse_specular(&ws),
        Err(Error::ZeroSumChannel { .. }) => raw_point,
        Err(e) => panic!("{e}"),
    };
    let point = composite_relit(&fx.stack, &point_ws, 0.8).unwrap();
    (cone.l1_norm() / truth, point.l1_norm() / truth)
}

fn cone_vs_point(fx: &Fixture) -> Check {
    let frontal = fx
        .rig
        .lights()
        .iter()
        .max_by(|a, b| a.dir().z().total_cmp(&b.dir().z()))
        .unwrap()
        .index();
    let env = RadianceMapF64::constant(256, Rgb::zero()).unwrap();
    let axis = fx.rig.lights()[frontal].dir();
    let (col, row) = off_axis_block(&env, &fx.rig, frontal, 0.0);
    let (rc, rp) = capture(fx, col, row);
    let off = env.texel_direction(col, row).angle_to(&axis).to_degrees();
    // informative: overlapping neighbours dilute a block deeper in the cone
    let half = fx.rig.lights()[frontal].cone_half_angle();
    let (mc, mr) = off_axis_block(&env, &fx.rig, frontal, half / 2.0);
    let (mid_cone, _) = capture(fx, mc, mr);
    check(
        rc >= tol::CONE_CAPTURE_MIN && rp < tol::POINT_CAPTURE_MAX,
        format!(
            "block {off:.1} deg off light {frontal}: cone captures {:.2}% (min {}%), point {:.2}% (max {}%); \
             at half-cone offset cone captures {:.2}%",
            100.0 * rc,
            100.0 * tol::CONE_CAPTURE_MIN,
            100.0 * rp,
            100.0 * tol::POINT_CAPTURE_MAX,
            100.0 * mid_cone
        ),
    )
}

fn rotation(fx: &Fixture) -> Check {
    let mut worst: f64 = 0.0;
    for k in 0..8 {
        let yaw = 2.0 * PI * k as f64 / 8.0;
        let (_, err) = sweep_step(&fx.stack, &fx.env, ProjectionMode::Cone, 0.8, yaw).unwrap();
        worst = worst.max(err);
    }
    check(
        worst < tol::ROTATION_REL_RMSE,
        format!(
            "8 yaw steps, max relative_rmse {worst:.3e} (limit {})",
            tol::ROTATION_REL_RMSE
        ),
    )
}

fn bridge() -> Check {
    let start = Instant::now();
    let exact = run_demo(&DemoConfig::default()).unwrap();
    let exact_time = start.elapsed();
    let noisy = run_demo(&DemoConfig {
        sigma: 0.1,
        pairs: 10_000,
        schedule: TSchedule::Grid { steps: 10 },
        ..DemoConfig::default()
    })
    .unwrap();
    let gap = (noisy.fitted_loss / noisy.sigma_floor_estimate - 1.0).abs();
    check(
        exact.fitted_loss < tol::BRIDGE_EXACT
            && exact.transport_mse < tol::BRIDGE_EXACT
            && gap <= tol::BRIDGE_FLOOR_REL
            && exact_time < Duration::from_secs(5),
        format!(
            "sigma=0: loss {:.1e}, transport mse {:.1e} in {:.2} s; sigma=0.1, 1e4 pairs: loss {:.5} vs floor {:.5} ({:.2}% off, limit {}%)",
            exact.fitted_loss,
            exact.transport_mse,
            exact_time.as_secs_f64(),
            noisy.fitted_loss,
            noisy.sigma_floor_estimate,
            100.0 * gap,
            100.0 * tol::BRIDGE_FLOOR_REL
        ),
    )
}

fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> LinearImageF64 {
    let scale: f64 = rng.random_range(0.1..10.0);
    LinearImage::new(
        w,
        h,
        (0..w * h * 3)
            .map(|_| {
                if rng.random_bool(0.1) {
                    0.0
                } else {
                    scale * rng.random::<f64>()
                }
            })
            .collect(),
    )
    .unwrap()
}

fn loss_identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    for trial in 0..100 {
        let (w, h) = (rng.random_range(4..24), rng.random_range(4..24));
        let gt = random_image(&mut rng, w, h);
        let pred = random_image(&mut rng, w, h);
        let kappa = rng.random_range(0.25..4.0);
        let mask = pixel_weight_mask(&gt, kappa).unwrap();
        if !mask.values().iter().all(|v| (0.0..=1.0).contains(v)) {
            failures.push(format!("mask range, trial {trial}"));
        }
        let doubled = gt.scaled(2.0).unwrap();
        if energy_loss(&doubled, &gt).unwrap() != 1.0 {
            failures.push(format!("energy_loss(2gt, gt), trial {trial}"));
        }
        let weighted = weighted_pixel_loss(&pred, &gt, &mask).unwrap();
        let l1 = weighted_pixel_loss(&pred, &gt, &Matte::filled(w, h, 1.0).unwrap()).unwrap();
        if weighted > l1 {
            failures.push(format!("weighted > L1, trial {trial}"));
        }
    }
    let lw = LossWeights::new(2.0, 0.5).unwrap();
    if combine_losses(0.5, 0.25, 2.0, &lw).unwrap() != 2.0 {
        failures.push("combine_losses(0.5, 0.25, 2; 2, 0.5) != 2".into());
    }
    if combine_losses(1.0, 0.5, 0.25, &LossWeights::default()).unwrap() != 1.0 + 0.5 + 0.1 * 0.25 {
        failures.push("combine_losses with default weights".into());
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            "100 random images: mask in [0,1], energy_loss(2gt)=1, weighted <= L1; combine_losses hand values"
                .to_string()
        } else {
            failures.join("; ")
        },
    )
}

fn codec_and_quadrature() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let h = 71;
    let texels: Vec<Rgb<f64>> = (0..2 * h * h)
        .map(|_| {
            let mag = 2f64.powf(rng.random_range(-20.0..20.0));
            Rgb::new(rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()) * mag
        })
        .collect();
    let map = RadianceMapF64::new(2 * h, h, texels).unwrap();
    let back: RadianceMapF64 = decode_radiance_hdr(&encode_radiance_hdr(&map)).unwrap();
    let mut worst: f64 = 0.0;
    for (a, b) in map.texels().iter().zip(back.texels()) {
        let e = rgbe_from_rgb(*a).e;
        let scale = 2f64.powi(e as i32 - 128);
        for c in 0..3 {
            worst = worst.max((a.get(c) - b.get(c)).abs() / scale);
        }
    }
    let mut quad_worst: f64 = 0.0;
    for h in [64, 256] {
        let m = RadianceMapF64::constant(h, Rgb::zero()).unwrap();
        let sum: f64 = (0..h)
            .map(|r| texel_solid_angle(&m, r).unwrap() * m.width() as f64)
            .sum();
        quad_worst = quad_worst.max((sum / (4.0 * PI) - 1.0).abs());
    }
    check(
        worst <= tol::RGBE_REL && quad_worst <= tol::SOLID_ANGLE_REL,
        format!(
            "{} texels: max error {:.3e} of the exponent scale (limit {:.3e}); 4pi sum rel error {:.1e} at H=64,256 (limit {:.0e})",
            map.texels().len(),
            worst,
            tol::RGBE_REL,
            quad_worst,
            tol::SOLID_ANGLE_REL
        ),
    )
}

/// Direct SSIM: explicit 2D Gaussian window, two-pass moments at every valid position.
fn ssim_direct(a: &LinearImageF64, b: &LinearImageF64) -> f64 {
    let (w, h) = a.dims();
    let n = SSIM_WINDOW;
    let sigma = 1.5f64;
    let mut kernel = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            let (dx, dy) = (i as f64 - 5.0, j as f64 - 5.0);
            kernel[j * n + i] = (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
        }
    }
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= total);
    let (c1, c2) = ((SSIM_K1 * 1.0).powi(2), (SSIM_K2 * 1.0).powi(2));
    let mut acc = 0.0;
    let mut count = 0;
    for c in 0..3 {
        for y0 in 0..=h - n {
            for x0 in 0..=w - n {
                let at = |img: &LinearImageF64, i: usize, j: usize| img.pixel(x0 + i, y0 + j).get(c);
                let (mut ma, mut mb) = (0.0, 0.0);
                for j in 0..n {
                    for i in 0..n {
                        ma += kernel[j * n + i] * at(a, i, j);
                        mb += kernel[j * n + i] * at(b, i, j);
                    }
                }
                let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
                for j in 0..n {
                    for i in 0..n {
                        let (da, db) = (at(a, i, j) - ma, at(b, i, j) - mb);
                        va += kernel[j * n + i] * da * da;
                        vb += kernel[j * n + i] * db * db;
                        cov += kernel[j * n + i] * da * db;
                    }
                }
                acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                count += 1;
            }
        }
    }
    acc / count as f64
}

fn metric_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    assert!((gaussian_window().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    let mut self_err: f64 = 0.0;
    let mut brute_err: f64 = 0.0;
    for _ in 0..5 {
        let a: DisplayImage<f64> = DisplayImage::new(32, 32, (0..32 * 32 * 3).map(|_| rng.random()).collect()).unwrap();
        let b = DisplayImage::new(
            32,
            32,
            a.samples()
                .iter()
                .map(|v: &f64| (v + 0.2 * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0))
                .collect(),
        )
        .unwrap();
        self_err = self_err.max((ssim(&a, &a).unwrap() - 1.0).abs());
        brute_err = brute_err.max((ssim(&a, &b).unwrap() - ssim_direct(a.as_linear(), b.as_linear())).abs());
    }
    let mut s = vec![0.0; 300];
    s[..3].copy_from_slice(&[1.0; 3]);
    let one_lit = DisplayImage::new(10, 10, s).unwrap();
    let black = DisplayImage::new(10, 10, vec![0.0; 300]).unwrap();
    let db = psnr(&one_lit, &black).unwrap();
    check(
        self_err <= tol::SSIM_SELF && brute_err <= tol::SSIM_VS_BRUTE && db == 20.0,
        format!(
            "|ssim(a,a)-1| {self_err:.1e} (limit {:.0e}); vs direct {brute_err:.1e} (limit {:.0e}); psnr at MSE 0.01 = {db} dB",
            tol::SSIM_SELF,
            tol::SSIM_VS_BRUTE
        ),
    )
}

fn random_stack(rng: &mut ChaCha8Rng, lights: usize, w: usize, h: usize) -> OlatStack<f64> {
    let rig = build_fibonacci_rig(lights, 0.3).unwrap();
    let images = (0..lights)
        .map(|_| LinearImage::new(w, h, (0..w * h * 3).map(|_| 2.0 * rng.random::<f64>()).collect()).unwrap())
        .collect();
    OlatStack::new(rig, images, None, None).unwrap()
}

fn blend_algebra(fx: &Fixture) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let n = rng.random_range(2..40);
        let (w, h) = (rng.random_range(1..50), rng.random_range(1..50));
        let stack = random_stack(&mut rng, n, w, h);
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let ws = WeightSet::gray(ProjectionMode::Cone, &w).unwrap();
        let base = composite_relit(&stack, &ws, 0.0).unwrap();
        for alpha in [0.25, 0.5, 0.8, 1.0] {
            let c = composite_relit(&stack, &ws, alpha).unwrap();
            for (p, q) in c.samples().iter().zip(base.samples()) {
                worst = worst.max((p - q).abs());
            }
        }
    }

    let dir = tempfile::tempdir().unwrap();
    save_stack(dir.path(), &fx.stack).unwrap();
    fx.rig.save(&dir.path().join("rig.json")).unwrap();
    let pick = 77;
    let mut w = vec![0.0; fx.rig.len()];
    w[pick] = 1.0;
    let weights = dir.path().join("onehot.json");
    WeightSet::gray(ProjectionMode::Cone, &w)
        .unwrap()
        .save(&weights)
        .unwrap();
    let out = dir.path().join("relit.png");
    let status = Command::new(env!("CARGO_BIN_EXE_lightstage"))
        .args(["--quiet", "relight", "--tonemap", "clamp", "--exposure", "1", "--stack"])
        .arg(dir.path())
        .arg("--weights")
        .arg(&weights)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    let same = status.success() && pngs_equal(&out, &slice_path(dir.path(), pick));
    check(
        worst <= tol::GRAY_INVARIANCE && same,
        format!(
            "gray weights: max change over alpha {worst:.1e} (limit {:.0e}); CLI one-hot light {pick}: {}",
            tol::GRAY_INVARIANCE,
            if same { "bit-exact" } else { "differs" }
        ),
    )
}

fn pngs_equal(a: &Path, b: &Path) -> bool {
    let (x, y): (LinearImageF64, LinearImageF64) = (read_png(a).unwrap(), read_png(b).unwrap());
    x == y
}

fn reproducibility_statement(earlier: &[bool]) -> Check {
    let no_lpips = "lpips".parse::<Metric>().is_err();
    check(
        earlier.iter().all(|&p| p) && no_lpips,
        "benchmark scores (LPIPS 0.115, PSNR 22.12, SSIM 0.82) and network training results need the full \
         capture dataset and trained models and are not reproducible at desk scale; criteria 1-8 stand in as the contract, LPIPS is not offered",
    )
}

fn composite_timing() -> Check {
    let (w, h, n) = (1024, 768, 156);
    let base: Vec<f32> = (0..w * h * 3)
        .map(|i| ((i * 2654435761usize) % 65536) as f32 / 65536.0)
        .collect();
    let img = LinearImage::new(w, h, base).unwrap();
    let rig: LightRig<f32> = build_fibonacci_rig(n, 0.26).unwrap();
    let stack = OlatStack::new(rig, vec![img; n], None, None).unwrap();
    let weights: Vec<f32> = (0..n).map(|i| (i % 7) as f32 / 7.0 + 0.01).collect();
    let ws = WeightSet::gray(ProjectionMode::Cone, &weights).unwrap();

    let serial_pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let t = Instant::now();
    serial_pool.install(|| composite_relit(&stack, &ws, 0.8f32).unwrap());
    let serial = t.elapsed().as_secs_f64();
    let t = Instant::now();
    composite_relit(&stack, &ws, 0.8f32).unwrap();
    let parallel = t.elapsed().as_secs_f64();
    let cores = std::thread::available_parallelism().map_or(1, |c| c.get());
    check(
        serial < tol::COMPOSITE_SERIAL_S && parallel < tol::COMPOSITE_PARALLEL_S,
        format!(
            "156 x 1024x768: 1 thread {serial:.2} s (target {}), pool of {} {parallel:.2} s (target {} on 8 cores)",
            tol::COMPOSITE_SERIAL_S,
            rayon::current_num_threads().min(cores),
            tol::COMPOSITE_PARALLEL_S
        ),
    )
}

fn report(id: usize, name: &str, soft: bool, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        check(false, format!("panicked: {msg}"))
    });
    let verdict = match (outcome.pass, soft) {
        (true, _) => "PASS",
        (false, false) => "FAIL",
        (false, true) => "FAIL (soft, warning only)",
    };
    println!(
        "{verdict} [{id:>2}] {name}: {} [{:.1} s]",
        outcome.detail,
        start.elapsed().as_secs_f64()
    );
    outcome.pass || soft
}

fn main() {
    let fx = Fixture::new();
    let mut hard = vec![
        report(1, "linearity and composition fidelity", false, || linearity(&fx)),
        report(2, "cone versus point projection", false, || cone_vs_point(&fx)),
        report(3, "rotation consistency", false, || rotation(&fx)),
        report(4, "bridge exactness and noise floor", false, bridge),
        report(5, "loss identities", false, loss_identities),
        report(6, "RGBE codec and solid-angle quadrature", false, codec_and_quadrature),
        report(7, "metric oracles", false, metric_oracles),
        report(8, "blend algebra and one-hot CLI path", false, || blend_algebra(&fx)),
    ];
    let earlier = hard.clone();
    hard.push(report(9, "benchmark-number reproducibility", false, || {
        reproducibility_statement(&earlier)
    }));
    drop(fx);
    report(10, "composite performance", true, composite_timing);

    let failed = hard.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} of {} hard criteria passed",
        hard.len() - failed,
        hard.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
