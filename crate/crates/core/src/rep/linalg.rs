//! Complex numbers and 2x2 matrices over a [`RepScalar`].

use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::RepScalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Complex<S> {
    pub re: S,
    pub im: S,
}

impl<S: RepScalar> Complex<S> {
    pub fn new(re: S, im: S) -> Self {
        Complex { re, im }
    }

    pub fn from_f64(re: f64, im: f64, bits: u32) -> Self {
        Complex { re: S::from_f64(re, bits), im: S::from_f64(im, bits) }
    }

    pub fn zero(bits: u32) -> Self {
        Self::from_f64(0.0, 0.0, bits)
    }

    pub fn one(bits: u32) -> Self {
        Self::from_f64(1.0, 0.0, bits)
    }

    pub fn bits(&self) -> u32 {
        self.re.bits()
    }

    pub fn conj(&self) -> Self {
        Complex { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> S {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn abs(&self) -> S {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: &S) -> Self {
        Complex { re: self.re.clone() * k.clone(), im: self.im.clone() * k.clone() }
    }

    /// `None` when dividing by zero.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let den = other.norm_sqr();
        if den.to_f64() == 0.0 {
            return None;
        }
        let num = self.clone() * other.conj();
        Some(Complex { re: num.re / den.clone(), im: num.im / den })
    }

    /// Same value at another precision.
    pub fn with_bits<T: RepScalar>(&self, bits: u32) -> Complex<T> {
        Complex {
            re: T::parse_decimal(&self.re.to_decimal(), bits).expect("decimal output parses"),
            im: T::parse_decimal(&self.im.to_decimal(), bits).expect("decimal output parses"),
        }
    }
}

impl<S: RepScalar> Add for Complex<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Complex { re: self.re + o.re, im: self.im + o.im }
    }
}

impl<S: RepScalar> Sub for Complex<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Complex { re: self.re - o.re, im: self.im - o.im }
    }
}

impl<S: RepScalar> Mul for Complex<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Complex {
            re: self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl<S: RepScalar> Neg for Complex<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Complex { re: -self.re, im: -self.im }
    }
}

/// `[[e[0], e[1]], [e[2], e[3]]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix2<S> {
    pub e: [Complex<S>; 4],
}

impl<S: RepScalar> Matrix2<S> {
    pub fn new(a: Complex<S>, b: Complex<S>, c: Complex<S>, d: Complex<S>) -> Self {
        Matrix2 { e: [a, b, c, d] }
    }

    pub fn identity(bits: u32) -> Self {
        Self::new(Complex::one(bits), Complex::zero(bits), Complex::zero(bits), Complex::one(bits))
    }

    pub fn zero(bits: u32) -> Self {
        Self::new(Complex::zero(bits), Complex::zero(bits), Complex::zero(bits), Complex::zero(bits))
    }

    pub fn bits(&self) -> u32 {
        self.e[0].bits()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let [a, b, c, d] = &self.e;
        let [p, q, r, s] = &o.e;
        Self::new(
            a.clone() * p.clone() + b.clone() * r.clone(),
            a.clone() * q.clone() + b.clone() * s.clone(),
            c.clone() * p.clone() + d.clone() * r.clone(),
            c.clone() * q.clone() + d.clone() * s.clone(),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut e = self.e.clone();
        for (x, y) in e.iter_mut().zip(&o.e) {
            *x = x.clone() + y.clone();
        }
        Matrix2 { e }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut e = self.e.clone();
        for (x, y) in e.iter_mut().zip(&o.e) {
            *x = x.clone() - y.clone();
        }
        Matrix2 { e }
    }

    pub fn det(&self) -> Complex<S> {
        let [a, b, c, d] = &self.e;
        a.clone() * d.clone() - b.clone() * c.clone()
    }

    pub fn trace(&self) -> Complex<S> {
        self.e[0].clone() + self.e[3].clone()
    }

    /// `[[d, -b], [-c, a]]`, the inverse of a unimodular matrix.
    pub fn adjugate(&self) -> Self {
        let [a, b, c, d] = &self.e;
        Self::new(d.clone(), -b.clone(), -c.clone(), a.clone())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> S {
        let mut it = self.e.iter().map(Complex::abs);
        let first = it.next().expect("four entries");
        it.fold(first, |m, x| if x > m { x } else { m })
    }

    /// Frobenius norm, an upper bound for the operator norm.
    pub fn frobenius(&self) -> S {
        let mut it = self.e.iter().map(Complex::norm_sqr);
        let first = it.next().expect("four entries");
        it.fold(first, |acc, x| acc + x).sqrt()
    }

    /// Max-entry distance.
    pub fn distance(&self, o: &Self) -> S {
        self.sub(o).max_abs()
    }

    pub fn distance_from_identity(&self) -> S {
        self.distance(&Self::identity(self.bits()))
    }

    pub fn with_bits<T: RepScalar>(&self, bits: u32) -> Matrix2<T> {
        let [a, b, c, d] = &self.e;
        Matrix2::new(a.with_bits(bits), b.with_bits(bits), c.with_bits(bits), d.with_bits(bits))
    }
}

/// Solves `A x = y` for a small complex system by Gaussian elimination with
/// partial pivoting. `None` if a pivot vanishes.
pub fn solve_linear<S: RepScalar>(mut a: Vec<Vec<Complex<S>>>, mut y: Vec<Complex<S>>) -> Option<Vec<Complex<S>>> {
    let n = y.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i][col].norm_sqr().to_f64().partial_cmp(&a[j][col].norm_sqr().to_f64()).expect("finite")
            })
            .expect("nonempty range");
        a.swap(col, pivot);
        y.swap(col, pivot);
        let p = a[col][col].clone();
        if p.norm_sqr().to_f64() == 0.0 {
            return None;
        }
        for row in col + 1..n {
            let f = a[row][col].checked_div(&p)?;
            let (top, rest) = a.split_at_mut(row);
            for (dst, src) in rest[0][col..n].iter_mut().zip(&top[col][col..n]) {
                *dst = dst.clone() - f.clone() * src.clone();
            }
            y[row] = y[row].clone() - f * y[col].clone();
        }
    }
    let mut x: Vec<Complex<S>> = vec![Complex::zero(y[0].bits()); n];
    for row in (0..n).rev() {
        let mut acc = y[row].clone();
        for (ak, xk) in a[row][row + 1..n].iter().zip(&x[row + 1..n]) {
            acc = acc - ak.clone() * xk.clone();
        }
        x[row] = acc.checked_div(&a[row][row])?;
    }
    Some(x)
}
