//! Light-stage relighting toolkit.
//!
//! An environment map is projected onto a spherical rig of lights to obtain
//! per-light weights, and one-light-at-a-time (OLAT) captures are combined
//! linearly with those weights. An analytic sphere renderer supplies ground
//! truth, and a small bridge-transport kernel models single-step
//! uniform-to-directional relighting in latent space.
//!
//! Conventions: right-handed frame, +Y up, +Z frontal. Polar angle θ is
//! measured from +Y and azimuth φ = atan2(x, z) lies in (−π, π].
//!
//! Numeric types are generic over [`Real`] (`f32` or `f64`); the aliases below
//! name the common instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bridge;
pub mod color;
pub mod compositor;
pub mod envmap;
pub mod error;
pub mod geometry;
pub mod image;
pub mod metrics;
pub mod oracle;
pub mod projection;
pub mod scalar;
pub mod stack_io;

pub use color::Rgb;
pub use compositor::{
    alpha_composite, composite_relit, render_background, synthesize_uniform, tone_map, CameraModel, OlatStack,
    ToneMapParams, ToneOperator,
};
pub use envmap::{rotate_env, sample_bilinear, texel_solid_angle, total_energy, RadianceMap};
pub use error::{Channel, Error, HdrError, Result};
pub use geometry::{
    build_fibonacci_rig, cone_solid_angle, dir_from_spherical, rotate_rig, spherical_from_dir, Direction, Light,
    LightRig, SphericalCoords,
};
pub use image::{DisplayImage, LinearImage, Matte};
pub use metrics::{psnr, relative_rmse, ssim, MetricReport};
pub use oracle::{render_sphere_env, render_sphere_olat, Material, ShadingModel, SphereScene};
pub use projection::{
    normalize_weights, project_cone_weights, project_point_weights, split_diffuse_specular, ProjectionMode,
    WeightEntry, WeightSet,
};
pub use scalar::{CompensatedSum, Real};

pub type DirectionF32 = Direction<f32>;
pub type DirectionF64 = Direction<f64>;
pub type LightRigF32 = LightRig<f32>;
pub type LightRigF64 = LightRig<f64>;
pub type RadianceMapF32 = RadianceMap<f32>;
pub type RadianceMapF64 = RadianceMap<f64>;
pub type LinearImageF32 = LinearImage<f32>;
pub type LinearImageF64 = LinearImage<f64>;
pub type OlatStackF32 = OlatStack<f32>;
pub type OlatStackF64 = OlatStack<f64>;
pub type WeightSetF32 = WeightSet<f32>;
pub type WeightSetF64 = WeightSet<f64>;
