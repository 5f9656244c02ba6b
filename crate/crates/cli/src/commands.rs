use std::path::{Path, PathBuf};

use lightstage::bridge::{run_demo, DemoConfig, TSchedule};
use lightstage::compositor::horizontal_fov;
use lightstage::metrics::{evaluate, Metric};
use lightstage::projection::{normalize_weights_scalar, project_weights};
use lightstage::stack_io::{
    load_stack, read_envmap, read_hdr_image, read_matte, read_png, save_stack, write_hdr_image, write_png,
};
use lightstage::{
    alpha_composite, build_fibonacci_rig, composite_relit, normalize_weights, relative_rmse, render_background,
    render_sphere_env, render_sphere_olat, rotate_env, rotate_rig, split_diffuse_specular, synthesize_uniform,
    tone_map, total_energy, CameraModel, DisplayImage, LightRigF64, LinearImageF64, Material, ProjectionMode,
    RadianceMapF64, Rgb, ShadingModel, SphereScene, ToneMapParams, ToneOperator, WeightSetF64,
};
use serde_json::{json, Value};

use crate::args::*;
use crate::config::{or_default, required, PipelineConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::{read_manifest, write_manifest};

pub const DEFAULT_ALPHA_BLEND: f64 = 0.8;
pub const DEFAULT_EXPOSURE: f64 = 1.0;

/// What a command produced, before it is wrapped into a run report.
pub struct Outcome {
    pub params: Value,
    pub results: Value,
    pub artifacts: Vec<PathBuf>,
    /// Directory that also receives `report.json`.
    pub report_dir: Option<PathBuf>,
}

pub struct Context {
    pub config: PipelineConfig,
    pub seed: u64,
}

pub fn dispatch(cmd: &Command, ctx: &Context) -> CliResult<Outcome> {
    match cmd {
        Command::GenRig(a) => gen_rig(a, ctx),
        Command::Project(a) => project(a, ctx),
        Command::Relight(a) => relight(a, ctx),
        Command::RenderBg(a) => render_bg(a, ctx),
        Command::Oracle(a) => oracle(a, ctx),
        Command::Eval(a) => eval(a, ctx),
        Command::BridgeDemo(a) => bridge_demo(a, ctx),
        Command::RotateSweep(a) => rotate_sweep(a, ctx),
        Command::Manifest(ManifestCommand::Validate(a)) => manifest_validate(a),
        Command::Manifest(ManifestCommand::Fmt(a)) => manifest_fmt(a),
    }
}

fn show(p: &Path) -> String {
    p.display().to_string()
}

fn create_parent(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::parse(format!("{}: {e}", dir.display())))
        }
        _ => Ok(()),
    }
}

fn is_hdr(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("hdr"))
}

fn load_rig(path: &Path) -> CliResult<LightRigF64> {
    LightRigF64::load(path).map_err(|e| CliError::from(e).context(show(path)))
}

fn load_env(path: &Path, downsample: usize) -> CliResult<RadianceMapF64> {
    let map: RadianceMapF64 = read_envmap(path).map_err(|e| CliError::from(e).context(show(path)))?;
    if downsample > 1 {
        Ok(map.downsample(downsample)?)
    } else {
        Ok(map)
    }
}

fn stack_rig(flag: &Option<PathBuf>, ctx: &Context, stack: &Path) -> PathBuf {
    flag.clone()
        .or_else(|| ctx.config.rig.clone())
        .unwrap_or_else(|| stack.join("rig.json"))
}

fn tone_params(t: &ToneArgs, ctx: &Context) -> CliResult<ToneMapParams<f64>> {
    let exposure = or_default(t.exposure, &ctx.config.exposure, DEFAULT_EXPOSURE);
    let op = or_default(
        t.tonemap.map(ToneOperator::from),
        &ctx.config.tonemap,
        ToneOperator::Reinhard,
    );
    Ok(ToneMapParams::new(exposure, op)?)
}

fn tone_json(p: &ToneMapParams<f64>) -> Value {
    json!({ "exposure": p.exposure(), "tonemap": p.operator() })
}

fn alpha_blend(flag: Option<f64>, ctx: &Context) -> CliResult<f64> {
    let a = or_default(flag, &ctx.config.alpha_blend, DEFAULT_ALPHA_BLEND);
    if !(0.0..=1.0).contains(&a) {
        return Err(CliError::validation(format!("alpha_blend {a} outside [0, 1]")));
    }
    Ok(a)
}

/// `.hdr` keeps the linear image; any other extension gets a tone-mapped PNG.
fn write_image(path: &Path, img: &LinearImageF64, tone: &ToneMapParams<f64>) -> CliResult<()> {
    create_parent(path)?;
    if is_hdr(path) {
        write_hdr_image(path, img)?;
    } else {
        write_png(path, &tone_map(img, *tone))?;
    }
    Ok(())
}

fn gen_rig(a: &GenRigArgs, ctx: &Context) -> CliResult<Outcome> {
    let out = required(a.out.clone(), &ctx.config.output, "out")?;
    let rig = build_fibonacci_rig(a.count, a.cone_deg.to_radians())?;
    create_parent(&out)?;
    rig.save(&out)?;
    Ok(Outcome {
        params: json!({ "count": a.count, "cone_deg": a.cone_deg, "out": show(&out) }),
        results: json!({
            "lights": rig.len(),
            "cone_solid_angle_sr": rig.mean_solid_angle(),
            "mean_nearest_neighbor_deg": rig.mean_nearest_neighbor_angle().to_degrees(),
        }),
        artifacts: vec![out],
        report_dir: None,
    })
}

/// Projects, normalizes to the map's energy as requested, then splits diffuse/specular.
pub fn weights_for(
    env: &RadianceMapF64,
    rig: &LightRigF64,
    mode: ProjectionMode,
    norm: NormalizeArg,
) -> CliResult<WeightSetF64> {
    let raw = project_weights(env, rig, mode);
    let target = total_energy(env);
    let ws = match norm {
        NormalizeArg::Channel => normalize_weights(&raw, target)?,
        NormalizeArg::Scalar => normalize_weights_scalar(&raw, target)?,
        NormalizeArg::None => raw,
    };
    Ok(split_diffuse_specular(&ws))
}

fn project(a: &ProjectArgs, ctx: &Context) -> CliResult<Outcome> {
    let env_path = required(a.env.clone(), &ctx.config.env, "env")?;
    let rig_path = required(a.rig.clone(), &ctx.config.rig, "rig")?;
    let out = required(a.out.clone(), &ctx.config.weights, "out")?;
    let mode = or_default(a.mode.map(ProjectionMode::from), &ctx.config.mode, ProjectionMode::Cone);
    if a.downsample == 0 {
        return Err(CliError::usage("--downsample must be at least 1"));
    }
    let env = load_env(&env_path, a.downsample)?;
    let rig = load_rig(&rig_path)?;
    let ws = weights_for(&env, &rig, mode, a.normalize)?;
    create_parent(&out)?;
    ws.save(&out)?;
    Ok(Outcome {
        params: json!({
            "env": show(&env_path),
            "rig": show(&rig_path),
            "mode": mode,
            "normalize": format!("{:?}", a.normalize).to_lowercase(),
            "downsample": a.downsample,
            "out": show(&out),
        }),
        results: json!({
            "lights": ws.len(),
            "env_resolution": [env.width(), env.height()],
            "total_energy": total_energy(&env).to_array(),
            "spec_sum": ws.spec_sum().to_array(),
            "uncovered": ws.uncovered(),
        }),
        artifacts: vec![out],
        report_dir: None,
    })
}

fn relight(a: &RelightArgs, ctx: &Context) -> CliResult<Outcome> {
    let stack_dir = required(a.stack.clone(), &ctx.config.stack, "stack")?;
    let weights_path = required(a.weights.clone(), &ctx.config.weights, "weights")?;
    let out = required(a.out.clone(), &ctx.config.output, "out")?;
    let rig_path = stack_rig(&a.rig, ctx, &stack_dir);
    let alpha = alpha_blend(a.alpha_blend, ctx)?;
    let tone = tone_params(&a.tone, ctx)?;

    let rig = load_rig(&rig_path)?;
    let stack = load_stack(&stack_dir, &rig).map_err(|e| CliError::from(e).context(show(&stack_dir)))?;
    let ws = WeightSetF64::load(&weights_path).map_err(|e| CliError::from(e).context(show(&weights_path)))?;
    let relit = composite_relit(&stack, &ws, alpha)?;

    match &a.background {
        Some(bg_path) => {
            if is_hdr(&out) {
                return Err(CliError::usage(
                    "--background composites display images; choose a .png output",
                ));
            }
            let matte = stack.alpha().ok_or_else(|| {
                CliError::validation(format!("{}: no alpha.png for background compositing", show(&stack_dir)))
            })?;
            let bg = DisplayImage::try_from_linear(read_png::<f64>(bg_path)?)?;
            let fg = tone_map(&relit, tone);
            create_parent(&out)?;
            write_png(&out, &alpha_composite(&fg, matte, &bg)?)?;
        }
        None => write_image(&out, &relit, &tone)?,
    }
    Ok(Outcome {
        params: json!({
            "stack": show(&stack_dir),
            "rig": show(&rig_path),
            "weights": show(&weights_path),
            "alpha_blend": alpha,
            "tone": tone_json(&tone),
            "background": a.background.as_deref().map(show),
            "out": show(&out),
        }),
        results: json!({
            "lights": stack.len(),
            "resolution": [relit.width(), relit.height()],
            "mode": ws.mode(),
            "energy": relit.l1_norm(),
        }),
        artifacts: vec![out],
        report_dir: None,
    })
}

fn render_bg(a: &RenderBgArgs, ctx: &Context) -> CliResult<Outcome> {
    let env_path = required(a.env.clone(), &ctx.config.env, "env")?;
    let out = required(a.out.clone(), &ctx.config.output, "out")?;
    let tone = tone_params(&a.tone, ctx)?;
    let cam = CameraModel::new(a.focal_mm, a.sensor_mm, a.width, a.height)?
        .with_orientation(a.yaw_deg.to_radians(), a.pitch_deg.to_radians())?;
    let env = load_env(&env_path, 1)?;
    let img = render_background(&env, &cam);
    write_image(&out, &img, &tone)?;
    Ok(Outcome {
        params: json!({
            "env": show(&env_path),
            "camera": cam,
            "tone": tone_json(&tone),
            "out": show(&out),
        }),
        results: json!({ "horizontal_fov_deg": horizontal_fov(&cam).to_degrees() }),
        artifacts: vec![out],
        report_dir: None,
    })
}

fn oracle(a: &OracleArgs, ctx: &Context) -> CliResult<Outcome> {
    let out = required(a.out.clone(), &ctx.config.output, "out")?;
    let rig_path = a.rig.clone().or_else(|| ctx.config.rig.clone());
    let rig = match &rig_path {
        Some(p) => load_rig(p)?,
        None => build_fibonacci_rig(156, 15f64.to_radians())?,
    };
    let unit = match a.solid_angle_unit.as_str() {
        "rig-mean" => rig.mean_solid_angle(),
        s => s.parse::<f64>().map_err(|_| {
            CliError::usage(format!(
                "--solid-angle-unit: expected \"rig-mean\" or a number, got {s:?}"
            ))
        })?,
    };
    let [r, g, b] = a.albedo[..] else {
        return Err(CliError::usage(format!(
            "--albedo takes 3 values, got {}",
            a.albedo.len()
        )));
    };
    let albedo = Rgb::new(r, g, b);
    let material = match a.material {
        MaterialArg::Lambert => Material::lambert(albedo)?,
        MaterialArg::BlinnPhong => Material::new(albedo, a.ks, a.shininess, ShadingModel::BlinnPhong)?,
    };
    let scene = SphereScene::new(a.radius, a.resolution)?.with_solid_angle_unit(unit)?;

    let stack = render_sphere_olat::<f64>(&scene, &rig, &material);
    let uniform = synthesize_uniform(&stack);
    let stack = stack.with_uniform(uniform)?;
    let peak = stack
        .images()
        .iter()
        .flat_map(|img| img.samples().iter().copied())
        .fold(0.0f64, f64::max);
    if peak > 1.0 {
        return Err(CliError::validation(format!(
            "OLAT peak {peak} exceeds the PNG range [0, 1]; raise --solid-angle-unit"
        )));
    }
    std::fs::create_dir_all(&out).map_err(|e| CliError::parse(format!("{}: {e}", out.display())))?;
    save_stack(&out, &stack)?;
    let rig_out = out.join("rig.json");
    rig.save(&rig_out)?;

    let mut artifacts = vec![
        out.join("stack"),
        out.join("alpha.png"),
        out.join("uniform.png"),
        rig_out,
    ];
    let mut env_params = Value::Null;
    if let Some(env_path) = a.env.clone().or_else(|| ctx.config.env.clone()) {
        let env = load_env(&env_path, 1)?;
        let gt = render_sphere_env(&scene, &env, &material);
        let gt_path = out.join("ground_truth.hdr");
        write_hdr_image(&gt_path, &gt)?;
        artifacts.push(gt_path);
        env_params = json!(show(&env_path));
    }
    Ok(Outcome {
        params: json!({
            "rig": rig_path.as_deref().map(show),
            "resolution": a.resolution,
            "radius": a.radius,
            "material": format!("{:?}", a.material).to_lowercase(),
            "albedo": albedo.to_array(),
            "ks": a.ks,
            "shininess": a.shininess,
            "solid_angle_unit": unit,
            "env": env_params,
            "out": show(&out),
        }),
        results: json!({ "lights": rig.len(), "peak_sample": peak }),
        artifacts,
        report_dir: Some(out),
    })
}

/// Linear and display versions of an input: `.hdr` is linear and gets tone
/// mapped, PNG is already display-referred.
fn load_eval_image(path: &Path, tone: &ToneMapParams<f64>) -> CliResult<(LinearImageF64, LinearImageF64)> {
    if is_hdr(path) {
        let lin: LinearImageF64 = read_hdr_image(path).map_err(|e| CliError::from(e).context(show(path)))?;
        let disp = tone_map(&lin, *tone).into_linear();
        Ok((lin, disp))
    } else {
        let img: LinearImageF64 = read_png(path).map_err(|e| CliError::from(e).context(show(path)))?;
        Ok((img.clone(), img))
    }
}

fn eval(a: &EvalArgs, ctx: &Context) -> CliResult<Outcome> {
    let metrics = a
        .metrics
        .iter()
        .map(|m| m.trim().parse::<Metric>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::usage(e.to_string()))?;
    let tone = tone_params(&a.tone, ctx)?;
    let (pred_lin, pred_disp) = load_eval_image(&a.pred, &tone)?;
    let (gt_lin, gt_disp) = load_eval_image(&a.gt, &tone)?;
    let mask = a
        .masked
        .as_deref()
        .map(|p| read_matte::<f64>(p).map_err(|e| CliError::from(e).context(show(p))))
        .transpose()?;
    let report = evaluate((&pred_disp, &gt_disp), (&pred_lin, &gt_lin), &metrics, mask.as_ref())?;
    Ok(Outcome {
        params: json!({
            "pred": show(&a.pred),
            "gt": show(&a.gt),
            "metrics": metrics.iter().map(|m| m.name()).collect::<Vec<_>>(),
            "masked": a.masked.as_deref().map(show),
            "tone": tone_json(&tone),
        }),
        results: serde_json::to_value(report).map_err(|e| CliError::validation(e.to_string()))?,
        artifacts: Vec::new(),
        report_dir: None,
    })
}

fn bridge_demo(a: &BridgeDemoArgs, ctx: &Context) -> CliResult<Outcome> {
    if a.steps == 0 {
        return Err(CliError::usage("--steps must be at least 1"));
    }
    let cfg = DemoConfig {
        dim: a.dim,
        pairs: a.pairs,
        conditions: a.conditions,
        sigma: a.sigma,
        schedule: TSchedule::Grid { steps: a.steps },
        seed: ctx.seed,
    };
    let report = run_demo(&cfg)?;
    Ok(Outcome {
        params: json!({
            "dim": a.dim,
            "pairs": a.pairs,
            "conditions": a.conditions,
            "sigma": a.sigma,
            "steps": a.steps,
            "seed": ctx.seed,
        }),
        results: serde_json::to_value(report).map_err(|e| CliError::validation(e.to_string()))?,
        artifacts: Vec::new(),
        report_dir: None,
    })
}

/// Relights under `rotate_env(env, yaw)` and under the same stack with weights
/// from `rotate_rig(rig, -yaw)`; returns (env-path image, relative RMSE).
pub fn sweep_step(
    stack: &lightstage::OlatStackF64,
    env: &RadianceMapF64,
    mode: ProjectionMode,
    alpha: f64,
    yaw: f64,
) -> CliResult<(LinearImageF64, f64)> {
    let rig = stack.rig();
    let by_env = weights_for(&rotate_env(env, yaw), rig, mode, NormalizeArg::Channel)?;
    let by_rig = weights_for(env, &rotate_rig(rig, -yaw), mode, NormalizeArg::Channel)?;
    let a = composite_relit(stack, &by_env, alpha)?;
    let b = composite_relit(stack, &by_rig, alpha)?;
    let err = relative_rmse(&a, &b)?;
    Ok((a, err))
}

fn rotate_sweep(a: &RotateSweepArgs, ctx: &Context) -> CliResult<Outcome> {
    let stack_dir = required(a.stack.clone(), &ctx.config.stack, "stack")?;
    let env_path = required(a.env.clone(), &ctx.config.env, "env")?;
    let out = required(a.out.clone(), &ctx.config.output, "out")?;
    let rig_path = stack_rig(&a.rig, ctx, &stack_dir);
    let mode = or_default(a.mode.map(ProjectionMode::from), &ctx.config.mode, ProjectionMode::Cone);
    let alpha = alpha_blend(a.alpha_blend, ctx)?;
    let tone = tone_params(&a.tone, ctx)?;
    let yaws_deg = match a.yaws_deg.clone().or_else(|| ctx.config.yaw_sweep_deg.clone()) {
        Some(y) if !y.is_empty() => y,
        Some(_) => return Err(CliError::usage("empty yaw list")),
        None if a.steps == 0 => return Err(CliError::usage("--steps must be at least 1")),
        None => (0..a.steps).map(|k| 360.0 * k as f64 / a.steps as f64).collect(),
    };
    if let Some(y) = yaws_deg.iter().find(|y| !y.is_finite()) {
        return Err(CliError::validation(format!("yaw {y} is not finite")));
    }

    let rig = load_rig(&rig_path)?;
    let stack = load_stack(&stack_dir, &rig).map_err(|e| CliError::from(e).context(show(&stack_dir)))?;
    let env = load_env(&env_path, 1)?;
    std::fs::create_dir_all(&out).map_err(|e| CliError::parse(format!("{}: {e}", out.display())))?;

    let mut steps = Vec::with_capacity(yaws_deg.len());
    let mut artifacts = Vec::with_capacity(yaws_deg.len());
    let mut worst = 0.0f64;
    for (k, &yaw_deg) in yaws_deg.iter().enumerate() {
        let (img, err) = sweep_step(&stack, &env, mode, alpha, yaw_deg.to_radians())?;
        let path = out.join(format!("step_{k:02}.png"));
        write_image(&path, &img, &tone)?;
        artifacts.push(path);
        worst = worst.max(err);
        steps.push(json!({ "yaw_deg": yaw_deg, "rel_rmse": err }));
    }
    Ok(Outcome {
        params: json!({
            "stack": show(&stack_dir),
            "rig": show(&rig_path),
            "env": show(&env_path),
            "mode": mode,
            "alpha_blend": alpha,
            "yaws_deg": yaws_deg,
            "tone": tone_json(&tone),
            "out": show(&out),
        }),
        results: json!({ "steps": steps, "max_rel_rmse": worst }),
        artifacts,
        report_dir: Some(out),
    })
}

fn manifest_validate(a: &ManifestValidateArgs) -> CliResult<Outcome> {
    let m = read_manifest(&a.path)?;
    let rig = a.rig.as_deref().map(load_rig).transpose()?;
    let summary = m.validate(rig.as_ref()).map_err(|e| e.context(show(&a.path)))?;
    Ok(Outcome {
        params: json!({ "path": show(&a.path), "rig": a.rig.as_deref().map(show) }),
        results: serde_json::to_value(summary).map_err(|e| CliError::validation(e.to_string()))?,
        artifacts: Vec::new(),
        report_dir: None,
    })
}

fn manifest_fmt(a: &ManifestFmtArgs) -> CliResult<Outcome> {
    let m = read_manifest(&a.path)?;
    let out = a.out.clone().unwrap_or_else(|| a.path.clone());
    write_manifest(&out, &m)?;
    Ok(Outcome {
        params: json!({ "path": show(&a.path), "out": show(&out) }),
        results: json!({ "entries": m.entries.len(), "relit": m.relit.len() }),
        artifacts: vec![out],
        report_dir: None,
    })
}
