//! RGB image containers.

use crate::color::Rgb;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major linear RGB image; samples are finite and non-negative.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearImage<T> {
    width: usize,
    height: usize,
    samples: Vec<T>,
}

impl<T: Real> LinearImage<T> {
    pub fn new(width: usize, height: usize, samples: Vec<T>) -> Result<Self> {
        if samples.len() != width * height * 3 {
            return Err(Error::dims(format!(
                "{} samples for a {width}x{height} RGB image",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite() || *s < T::zero()) {
            return Err(Error::invalid(
                "linear image",
                format!("sample {i} is negative or non-finite"),
            ));
        }
        Ok(LinearImage { width, height, samples })
    }

    pub fn black(width: usize, height: usize) -> Self {
        LinearImage {
            width,
            height,
            samples: vec![T::zero(); width * height * 3],
        }
    }

    pub fn filled(width: usize, height: usize, c: Rgb<T>) -> Result<Self> {
        let samples = (0..width * height).flat_map(|_| c.to_array()).collect();
        Self::new(width, height, samples)
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> Rgb<T>) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                samples.extend(f(x, y).to_array());
            }
        }
        Self::new(width, height, samples)
    }

    pub(crate) fn from_raw_unchecked(width: usize, height: usize, samples: Vec<T>) -> Self {
        debug_assert_eq!(samples.len(), width * height * 3);
        LinearImage { width, height, samples }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }
    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }
    pub fn samples(&self) -> &[T] {
        &self.samples
    }
    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> Rgb<T> {
        let i = 3 * (y * self.width + x);
        Rgb::new(self.samples[i], self.samples[i + 1], self.samples[i + 2])
    }

    pub fn pixels(&self) -> impl Iterator<Item = Rgb<T>> + '_ {
        self.samples.chunks_exact(3).map(|p| Rgb::new(p[0], p[1], p[2]))
    }

    pub fn scaled(&self, s: T) -> Result<Self> {
        Self::new(self.width, self.height, self.samples.iter().map(|v| *v * s).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_same_dims(self.dims(), other.dims())?;
        Self::new(
            self.width,
            self.height,
            self.samples.iter().zip(&other.samples).map(|(a, b)| *a + *b).collect(),
        )
    }

    /// Sum of all samples (the L1 norm, since samples are non-negative).
    pub fn l1_norm(&self) -> T {
        let mut acc = crate::scalar::CompensatedSum::new();
        for s in &self.samples {
            acc.add(s.to_f64_lossy());
        }
        T::of(acc.value())
    }

    pub fn cast<U: Real>(&self) -> LinearImage<U> {
        LinearImage {
            width: self.width,
            height: self.height,
            samples: self.samples.iter().map(|s| U::of(s.to_f64_lossy())).collect(),
        }
    }
}

/// Display-referred RGB image with samples in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplayImage<T>(LinearImage<T>);

impl<T: Real> DisplayImage<T> {
    pub fn new(width: usize, height: usize, samples: Vec<T>) -> Result<Self> {
        let img = LinearImage::new(width, height, samples)?;
        Self::try_from_linear(img)
    }

    pub fn try_from_linear(img: LinearImage<T>) -> Result<Self> {
        if let Some(i) = img.samples.iter().position(|s| *s > T::one()) {
            return Err(Error::invalid("display image", format!("sample {i} exceeds 1")));
        }
        Ok(DisplayImage(img))
    }

    pub(crate) fn from_linear_unchecked(img: LinearImage<T>) -> Self {
        DisplayImage(img)
    }

    pub fn as_linear(&self) -> &LinearImage<T> {
        &self.0
    }

    pub fn into_linear(self) -> LinearImage<T> {
        self.0
    }

    pub fn width(&self) -> usize {
        self.0.width
    }
    pub fn height(&self) -> usize {
        self.0.height
    }
    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }
    pub fn samples(&self) -> &[T] {
        &self.0.samples
    }
    pub fn pixel(&self, x: usize, y: usize) -> Rgb<T> {
        self.0.pixel(x, y)
    }
}

/// Single-channel opacity in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matte<T> {
    width: usize,
    height: usize,
    alpha: Vec<T>,
}

impl<T: Real> Matte<T> {
    pub fn new(width: usize, height: usize, alpha: Vec<T>) -> Result<Self> {
        if alpha.len() != width * height {
            return Err(Error::dims(format!(
                "{} alpha values for a {width}x{height} matte",
                alpha.len()
            )));
        }
        if let Some(i) = alpha.iter().position(|a| !(*a >= T::zero() && *a <= T::one())) {
            return Err(Error::invalid("matte", format!("alpha {i} outside [0, 1]")));
        }
        Ok(Matte { width, height, alpha })
    }

    pub fn filled(width: usize, height: usize, a: T) -> Result<Self> {
        Self::new(width, height, vec![a; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
    pub fn values(&self) -> &[T] {
        &self.alpha
    }
    pub fn at(&self, x: usize, y: usize) -> T {
        self.alpha[y * self.width + x]
    }
}

pub(crate) fn ensure_same_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::dims(format!("{}x{} vs {}x{}", a.0, a.1, b.0, b.1)));
    }
    Ok(())
}
