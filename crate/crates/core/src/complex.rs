use core::ops::{Add, Div, Mul, Neg, Sub};

/// A complex number held as two IEEE-754 binary64 components.
///
/// This is the unit of the PE datapath and of every memory word. All
/// arithmetic is spelled out component-wise so that results are reproducible
/// bit for bit, independent of how a compiler might otherwise reassociate.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexWord {
    pub re: f64,
    pub im: f64,
}

impl ComplexWord {
    pub const ZERO: Self = Self::new(0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0);

    #[inline]
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// `e^{i theta}` from binary64 `cos`/`sin`.
    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        Self::new(libm::cos(theta), libm::sin(theta))
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// Multiplication by `i`: a component swap and one negation, exact.
    #[inline]
    pub fn mul_i(self) -> Self {
        Self::new(-self.im, self.re)
    }

    /// Multiplication by `-i`, exact.
    #[inline]
    pub fn mul_neg_i(self) -> Self {
        Self::new(self.im, -self.re)
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    pub fn abs(self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    /// Largest component-wise distance, the metric used by all tolerance checks.
    #[inline]
    pub fn max_abs_diff(self, other: Self) -> f64 {
        let dr = self.re - other.re;
        let di = self.im - other.im;
        let dr = if dr < 0.0 { -dr } else { dr };
        let di = if di < 0.0 { -di } else { di };
        if dr > di {
            dr
        } else {
            di
        }
    }

    /// Bitwise identity of both components (distinguishes `0.0` and `-0.0`).
    #[inline]
    pub fn bit_eq(self, other: Self) -> bool {
        self.re.to_bits() == other.re.to_bits() && self.im.to_bits() == other.im.to_bits()
    }
}

impl Add for ComplexWord {
    type Output = Self;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for ComplexWord {
    type Output = Self;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for ComplexWord {
    type Output = Self;

    /// `(ac - bd, ad + bc)`, four multiplies and two adds as in the PE.
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

/// Textbook quotient `(ac + bd, bc - ad) / (c^2 + d^2)`. The caller rules
/// out a zero divisor.
impl Div for ComplexWord {
    type Output = Self;

    #[inline]
    fn div(self, rhs: Self) -> Self {
        let den = rhs.norm_sq();
        Self::new(
            (self.re * rhs.re + self.im * rhs.im) / den,
            (self.im * rhs.re - self.re * rhs.im) / den,
        )
    }
}

impl Neg for ComplexWord {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl From<(f64, f64)> for ComplexWord {
    fn from((re, im): (f64, f64)) -> Self {
        Self::new(re, im)
    }
}
