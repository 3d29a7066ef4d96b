//! Field abstraction shared by every routine in the crate.
//!
//! All linear algebra and recovery code is written once against [`Scalar`]
//! and instantiated for real (`f32`, `f64`) and complex (`Complex<f32>`,
//! `Complex<f64>`) fields. The real case is self-conjugate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, Num, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Real number type underlying a [`Scalar`] field.
pub trait RealScalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl RealScalar for f32 {}
impl RealScalar for f64 {}

/// Element of the field the measurement matrix and signals live in.
pub trait Scalar:
    Num
    + Copy
    + Debug
    + Default
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Send
    + Sync
    + 'static
{
    type Real: RealScalar;

    /// Whether the field carries an imaginary part.
    const IS_COMPLEX: bool;

    fn from_real(re: Self::Real) -> Self;
    /// Builds a field element; the imaginary part is dropped for real fields.
    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn conj(self) -> Self;

    /// `|z|^2 = z * conj(z)`.
    fn abs_sqr(self) -> Self::Real {
        let (re, im) = (self.re(), self.im());
        re * re + im * im
    }

    fn modulus(self) -> Self::Real {
        let (re, im) = (self.re(), self.im());
        re.hypot(im)
    }

    fn scale(self, factor: Self::Real) -> Self {
        self * Self::from_real(factor)
    }

    fn is_finite(self) -> bool {
        self.re().is_finite() && self.im().is_finite()
    }

    /// Uniform random element of unit modulus: a random sign for real
    /// fields, a uniform phase on the unit circle for complex ones.
    fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Standard Gaussian sample with `E|z|^2 = 1`; circularly symmetric in
    /// the complex case.
    fn random_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            const IS_COMPLEX: bool = false;

            #[inline]
            fn from_real(re: $t) -> Self {
                re
            }
            #[inline]
            fn from_parts(re: $t, _im: $t) -> Self {
                re
            }
            #[inline]
            fn re(self) -> $t {
                self
            }
            #[inline]
            fn im(self) -> $t {
                0.0
            }
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn abs_sqr(self) -> $t {
                self * self
            }
            #[inline]
            fn modulus(self) -> $t {
                self.abs()
            }
            fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            fn random_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
                let z: f64 = StandardNormal.sample(rng);
                z as $t
            }
        }
    };
}

impl<T: RealScalar> Scalar for Complex<T> {
    type Real = T;
    const IS_COMPLEX: bool = true;

    #[inline]
    fn from_real(re: T) -> Self {
        Complex::new(re, T::zero())
    }
    #[inline]
    fn from_parts(re: T, im: T) -> Self {
        Complex::new(re, im)
    }
    #[inline]
    fn re(self) -> T {
        self.re
    }
    #[inline]
    fn im(self) -> T {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }
    #[inline]
    fn scale(self, factor: T) -> Self {
        Complex::new(self.re * factor, self.im * factor)
    }
    fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        Complex::new(T::lit(theta.cos()), T::lit(theta.sin()))
    }
    fn random_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex::new(T::lit(re * s), T::lit(im * s))
    }
}

impl_real_scalar!(f32);
impl_real_scalar!(f64);

/// Hermitian inner product `<a, b> = sum conj(a_i) * b_i`.
#[inline]
pub fn dot_conj<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x.conj() * y)
}

/// Euclidean norm.
#[inline]
pub fn norm<S: Scalar>(v: &[S]) -> S::Real {
    v.iter().map(|z| z.abs_sqr()).sum::<S::Real>().sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy<S: Scalar>(alpha: S, x: &[S], y: &mut [S]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
