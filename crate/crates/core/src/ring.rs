//! Ring transforms over `Q[x]/(x^n + 1)`.
//!
//! A real polynomial of size `n` is determined by its values at the `n/2`
//! roots `omega(k) = exp(i*pi*(2k+1)/n)`, `k < n/2`, of `x^n + 1` in the upper
//! half plane; the other half are complex conjugates. Two representations of
//! those values exist:
//!
//! * [`SpectrumOrder::NaturalEval`], produced by the quadratic-time oracle
//!   [`fft_ref`], with `values[k] = a(omega(k))`.
//! * [`SpectrumOrder::FalconInternal`], produced by the in-place network
//!   [`fft_inplace`]. Slot `s` holds `a(omega(r))` for the root index
//!   `r = internal_root_index(n, s)`; when `r >= n/2` this is the conjugate of
//!   `NaturalEval` entry `n - 1 - r`.
//!
//! [`Spectrum::to_natural`] and [`Spectrum::from_natural`] convert between
//! the two. Pointwise arithmetic works in either order as long as both
//! operands agree.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::sim::pe_butterfly;
use crate::twiddle::{root_exponent, TwiddleSource, TwiddleTable};
use crate::{log2, ComplexWord, Error, Result, S_MAX};

/// Transform direction of the processor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Order of the values held in a [`Spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumOrder {
    NaturalEval,
    FalconInternal,
}

fn check_size(n: usize) -> Result<()> {
    if n.is_power_of_two() && (2..=S_MAX).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidSize {
            n,
            min: 2,
            max: S_MAX,
        })
    }
}

/// Real polynomial of power-of-two size `2..=1024` with finite coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        check_size(coeffs.len())?;
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// The size `n`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `max |a_j|`.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `max |a_j - b_j|`; sizes must agree.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_lengths(self.len(), other.len())?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// `alpha * self + beta * other`.
    pub fn lin_comb(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        check_lengths(self.len(), other.len())?;
        Self::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        )
    }
}

fn check_lengths(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::LengthMismatch { left, right })
    }
}

/// `n/2` complex values representing a size-`n` polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<ComplexWord>,
    order: SpectrumOrder,
}

impl Spectrum {
    pub fn new(values: Vec<ComplexWord>, order: SpectrumOrder) -> Result<Self> {
        check_size(2 * values.len())?;
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values, order })
    }

    pub(crate) fn from_parts(values: Vec<ComplexWord>, order: SpectrumOrder) -> Self {
        Self { values, order }
    }

    pub fn values(&self) -> &[ComplexWord] {
        &self.values
    }

    pub fn into_values(self) -> Vec<ComplexWord> {
        self.values
    }

    pub fn order(&self) -> SpectrumOrder {
        self.order
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Size `n` of the polynomial this spectrum represents.
    pub fn n(&self) -> usize {
        2 * self.values.len()
    }

    /// `max |s_k - t_k|` over slots; order and length must agree.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_lengths(self.len(), other.len())?;
        check_order(other.order, self.order)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max(a.max_abs_diff(*b))))
    }

    /// Values at all `n` roots `omega(0..n)`, filled in by conjugate symmetry.
    pub fn full_evaluation(&self) -> Vec<ComplexWord> {
        let natural = self.to_natural();
        let n = self.n();
        (0..n)
            .map(|k| {
                if k < n / 2 {
                    natural.values[k]
                } else {
                    natural.values[n - 1 - k].conj()
                }
            })
            .collect()
    }

    /// Reorders (and conjugates where needed) into `NaturalEval`.
    pub fn to_natural(&self) -> Spectrum {
        match self.order {
            SpectrumOrder::NaturalEval => self.clone(),
            SpectrumOrder::FalconInternal => {
                let n = self.n();
                let mut out = vec![ComplexWord::ZERO; n / 2];
                for (s, v) in self.values.iter().enumerate() {
                    let r = internal_root_index(n, s);
                    if r < n / 2 {
                        out[r] = *v;
                    } else {
                        out[n - 1 - r] = v.conj();
                    }
                }
                Spectrum::from_parts(out, SpectrumOrder::NaturalEval)
            }
        }
    }

    /// Brings a spectrum into `FalconInternal` order.
    pub fn to_internal(&self) -> Spectrum {
        match self.order {
            SpectrumOrder::FalconInternal => self.clone(),
            SpectrumOrder::NaturalEval => Spectrum::from_natural(self),
        }
    }

    /// `FalconInternal` spectrum holding the same polynomial as `natural`.
    pub fn from_natural(natural: &Spectrum) -> Spectrum {
        if natural.order == SpectrumOrder::FalconInternal {
            return natural.clone();
        }
        let n = natural.n();
        let values = (0..n / 2)
            .map(|s| {
                let r = internal_root_index(n, s);
                if r < n / 2 {
                    natural.values[r]
                } else {
                    natural.values[n - 1 - r].conj()
                }
            })
            .collect();
        Spectrum::from_parts(values, SpectrumOrder::FalconInternal)
    }
}

fn check_order(found: SpectrumOrder, expected: SpectrumOrder) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::OrderMismatch { expected, found })
    }
}

/// Root index `r` such that `FalconInternal` slot `s` of a size-`n`
/// transform holds `a(omega(r))`, `0 <= r < n`.
pub fn internal_root_index(n: usize, s: usize) -> usize {
    debug_assert!(s < n / 2);
    // angle of the slot's root, in units of pi/1024
    let e = (root_exponent(n / 2 + (s >> 1)) as usize + (s & 1) * S_MAX) % (2 * S_MAX);
    (e * n / S_MAX - 1) / 2
}

/// `omega(k) = exp(i*pi*(2k+1)/n)`, a root of `x^n + 1`.
pub fn omega(k: usize, n: usize) -> Result<ComplexWord> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::InvalidSize {
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    if k >= n {
        return Err(Error::OutOfRange {
            what: "root index",
            index: k,
            limit: n,
        });
    }
    Ok(ComplexWord::from_angle(PI * (2 * k + 1) as f64 / n as f64))
}

/// `exp(i*pi*e/n)` for `e = 0..2n`.
fn roots_2n(n: usize) -> Vec<ComplexWord> {
    (0..2 * n)
        .map(|e| ComplexWord::from_angle(PI * e as f64 / n as f64))
        .collect()
}

/// Direct evaluation `values[k] = sum_j a_j * omega(k)^j` for `k < n/2`.
pub fn fft_ref(a: &Polynomial) -> Spectrum {
    let n = a.len();
    let roots = roots_2n(n);
    let values = (0..n / 2)
        .map(|k| {
            a.coeffs
                .iter()
                .enumerate()
                .fold(ComplexWord::ZERO, |acc, (j, &c)| {
                    acc + roots[(j * (2 * k + 1)) % (2 * n)].scale(c)
                })
        })
        .collect();
    Spectrum::from_parts(values, SpectrumOrder::NaturalEval)
}

/// Interpolates a `NaturalEval` spectrum.
///
/// Pairing each value with its conjugate at `omega(n-1-k)` turns the
/// `n`-point inverse into `a_j = (2/n) * Re sum_{k<n/2} s_k * omega(k)^(-j)`.
pub fn ifft_ref(s: &Spectrum) -> Result<Polynomial> {
    check_order(s.order, SpectrumOrder::NaturalEval)?;
    let n = s.n();
    let roots = roots_2n(n);
    let scale = 2.0 / n as f64;
    let coeffs = (0..n)
        .map(|j| {
            let sum = s
                .values
                .iter()
                .enumerate()
                .fold(ComplexWord::ZERO, |acc, (k, v)| {
                    acc + *v * roots[(j * (2 * k + 1)) % (2 * n)].conj()
                });
            scale * sum.re
        })
        .collect();
    Polynomial::new(coeffs)
}

/// Packs `w_k = a_k + i*a_{k+n/2}`.
pub fn pack(a: &Polynomial) -> Vec<ComplexWord> {
    let hn = a.len() / 2;
    (0..hn)
        .map(|k| ComplexWord::new(a.coeffs[k], a.coeffs[k + hn]))
        .collect()
}

/// Inverse of [`pack`].
pub fn unpack(words: &[ComplexWord]) -> Vec<f64> {
    words
        .iter()
        .map(|w| w.re)
        .chain(words.iter().map(|w| w.im))
        .collect()
}

/// Operand indices `(j, j + 2^sg_r)` of butterfly `bt` at stage `sg`.
pub fn butterfly_operands(n: usize, sg: usize, bt: usize) -> (usize, usize) {
    let stages = log2(n) as usize - 1;
    let ht = 1 << (stages - 1 - sg);
    let j = bt + (bt / ht) * ht;
    (j, j + ht)
}

/// Runs the butterfly network over packed words.
///
/// Forward executes stages `0..log2(n)-1` with Cooley-Tukey butterflies,
/// inverse runs them backwards with Gentleman-Sande butterflies and
/// conjugated twiddles. No scaling is applied.
pub fn network_inplace<S: TwiddleSource + ?Sized>(
    words: &mut [ComplexWord],
    src: &S,
    dir: Direction,
) -> Result<()> {
    let n = 2 * words.len();
    check_size(n)?;
    let stages = log2(n) as usize - 1;
    let mut run = |sg: usize| -> Result<()> {
        for bt in 0..n / 4 {
            let (i0, i1) = butterfly_operands(n, sg, bt);
            let w = src.twiddle(n, sg, bt, dir)?;
            let (x, y) = pe_butterfly(words[i0], words[i1], w, dir);
            words[i0] = x;
            words[i1] = y;
        }
        Ok(())
    };
    match dir {
        Direction::Forward => (0..stages).try_for_each(&mut run),
        Direction::Inverse => (0..stages).rev().try_for_each(&mut run),
    }
}

/// In-place transform with the full twiddle table.
pub fn fft_inplace(a: &Polynomial) -> Spectrum {
    fft_inplace_with(a, &TwiddleTable::full()).expect("full table serves every size")
}

/// In-place transform drawing twiddles from `src`.
pub fn fft_inplace_with<S: TwiddleSource + ?Sized>(a: &Polynomial, src: &S) -> Result<Spectrum> {
    let mut words = pack(a);
    network_inplace(&mut words, src, Direction::Forward)?;
    Ok(Spectrum::from_parts(words, SpectrumOrder::FalconInternal))
}

/// Inverse of [`fft_inplace`]; needs a `FalconInternal` spectrum.
pub fn ifft_inplace(s: &Spectrum) -> Result<Polynomial> {
    ifft_inplace_with(s, &TwiddleTable::full())
}

pub fn ifft_inplace_with<S: TwiddleSource + ?Sized>(s: &Spectrum, src: &S) -> Result<Polynomial> {
    check_order(s.order, SpectrumOrder::FalconInternal)?;
    let mut words = s.values.clone();
    network_inplace(&mut words, src, Direction::Inverse)?;
    let scale = 2.0 / s.n() as f64;
    for w in &mut words {
        *w = w.scale(scale);
    }
    Polynomial::new(unpack(&words))
}

/// Elementwise operation in the transform domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointwiseOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn pointwise_op(s1: &Spectrum, s2: &Spectrum, op: PointwiseOp) -> Result<Spectrum> {
    check_lengths(s1.len(), s2.len())?;
    check_order(s2.order, s1.order)?;
    if op == PointwiseOp::Div {
        let indices: Vec<usize> = s2
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_zero())
            .map(|(k, _)| k)
            .collect();
        if !indices.is_empty() {
            return Err(Error::DivideByZero { indices });
        }
    }
    let values = s1
        .values
        .iter()
        .zip(&s2.values)
        .map(|(&x, &y)| match op {
            PointwiseOp::Add => x + y,
            PointwiseOp::Sub => x - y,
            PointwiseOp::Mul => x * y,
            PointwiseOp::Div => x / y,
        })
        .collect();
    Ok(Spectrum::from_parts(values, s1.order))
}

/// Schoolbook product modulo `x^n + 1`.
pub fn polymul_negacyclic_oracle(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    check_lengths(a.len(), b.len())?;
    let n = a.len();
    let mut c = vec![0.0; n];
    for (i, &ai) in a.coeffs.iter().enumerate() {
        for (j, &bj) in b.coeffs.iter().enumerate() {
            if i + j < n {
                c[i + j] += ai * bj;
            } else {
                c[i + j - n] -= ai * bj;
            }
        }
    }
    Polynomial::new(c)
}

/// Product modulo `x^n + 1` through the transform domain.
pub fn polymul_via_fft(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    check_lengths(a.len(), b.len())?;
    let prod = pointwise_op(&fft_inplace(a), &fft_inplace(b), PointwiseOp::Mul)?;
    ifft_inplace(&prod)
}
