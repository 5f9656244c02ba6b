use std::ops::{Add, AddAssign, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Rec. 709 luma coefficients.
pub const LUMA_709: [f64; 3] = [0.2126, 0.7152, 0.0722];

/// Linear RGB triple.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rgb<T> {
    pub r: T,
    pub g: T,
    pub b: T,
}

impl<T: Real> Rgb<T> {
    #[inline]
    pub const fn new(r: T, g: T, b: T) -> Self {
        Rgb { r, g, b }
    }

    #[inline]
    pub fn splat(v: T) -> Self {
        Rgb { r: v, g: v, b: v }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::splat(T::zero())
    }

    #[inline]
    pub fn one() -> Self {
        Self::splat(T::one())
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Rgb::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.r, self.g, self.b]
    }

    #[inline]
    pub fn get(self, c: usize) -> T {
        match c {
            0 => self.r,
            1 => self.g,
            _ => self.b,
        }
    }

    #[inline]
    pub fn map(self, f: impl Fn(T) -> T) -> Self {
        Rgb::new(f(self.r), f(self.g), f(self.b))
    }

    #[inline]
    pub fn zip(self, o: Self, f: impl Fn(T, T) -> T) -> Self {
        Rgb::new(f(self.r, o.r), f(self.g, o.g), f(self.b, o.b))
    }

    /// Rec. 709 luminance.
    #[inline]
    pub fn luminance(self) -> T {
        T::of(LUMA_709[0]) * self.r + T::of(LUMA_709[1]) * self.g + T::of(LUMA_709[2]) * self.b
    }

    pub fn max_component(self) -> T {
        self.r.max(self.g).max(self.b)
    }

    pub fn min_component(self) -> T {
        self.r.min(self.g).min(self.b)
    }

    pub fn is_finite(self) -> bool {
        self.r.is_finite() && self.g.is_finite() && self.b.is_finite()
    }

    pub fn cast<U: Real>(self) -> Rgb<U> {
        Rgb::new(
            U::of(self.r.to_f64_lossy()),
            U::of(self.g.to_f64_lossy()),
            U::of(self.b.to_f64_lossy()),
        )
    }
}

impl<T: Real> Add for Rgb<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        self.zip(o, |a, b| a + b)
    }
}

impl<T: Real> AddAssign for Rgb<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Rgb<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        self.zip(o, |a, b| a - b)
    }
}

impl<T: Real> Mul<T> for Rgb<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        self.map(|a| a * s)
    }
}

/// Component-wise product.
impl<T: Real> Mul for Rgb<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        self.zip(o, |a, b| a * b)
    }
}
