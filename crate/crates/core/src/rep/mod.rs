//! Parabolic `SL(2, C)` representations of `<b, t | r(n)>`.
//!
//! `t` goes to `[[1, 1], [0, 1]]` and `b` to a unimodular matrix found by a
//! damped Newton (Levenberg-Marquardt) solve: first in `f64` from seeded
//! random starts, then refined at the requested precision. A representation
//! is numeric evidence only; it can show a word is nontrivial, never that it
//! is trivial.

mod linalg;
mod scalar;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentation::{knot_group, TwistKnotParams};
use crate::word::bt::{B, T};
use crate::word::{Letter, Word};

pub use linalg::{solve_linear, Complex, Matrix2};
pub use scalar::RepScalar;

pub const DEFAULT_PRECISION: u32 = 212;
pub const MIN_PRECISION: u32 = 128;
/// Starts tried before giving up.
pub const RETRY_BUDGET: usize = 64;
/// `||[b, t] - I||` above this counts as non-commuting.
pub const COMMUTATOR_FLOOR: f64 = 1e-6;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum RepError {
    #[error("precision must be at least {MIN_PRECISION} bits, got {0}")]
    Precision(u32),
    #[error("no convergence after {0} starts")]
    NoConvergence(usize),
    #[error("only reducible solutions after {0} starts")]
    OnlyReducible(usize),
    #[error("tolerance {tol:e} is not above the noise floor {floor:e}")]
    ToleranceTooSmall { tol: f64, floor: f64 },
    #[error("bad number `{0}`")]
    BadNumber(String),
    #[error("word is not over `b t`")]
    Alphabet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Representation<S> {
    pub n: i64,
    pub seed: u64,
    pub precision_bits: u32,
    pub image_t: Matrix2<S>,
    pub image_b: Matrix2<S>,
    /// Max entry deviation of the relator image from `I`, or `|det b - 1|`
    /// if that is larger.
    pub residual: S,
}

impl<S: RepScalar> Representation<S> {
    /// Builds a representation from images and measures its residual.
    pub fn from_images(n: TwistKnotParams, seed: u64, image_t: Matrix2<S>, image_b: Matrix2<S>) -> Self {
        let precision_bits = image_b.bits();
        let mut rep = Representation {
            n: n.n(),
            seed,
            precision_bits,
            image_t,
            image_b,
            residual: S::zero(precision_bits),
        };
        let relator = relator_word(n);
        let rel = rep.evaluate(&relator).distance_from_identity();
        let det = (rep.image_b.det() - Complex::one(precision_bits)).abs();
        rep.residual = if det > rel { det } else { rel };
        rep
    }

    fn image(&self, l: Letter) -> Matrix2<S> {
        let m = if l.gen() == 0 { &self.image_b } else { &self.image_t };
        if l.is_inverse() {
            m.adjugate()
        } else {
            m.clone()
        }
    }

    /// Image of a word over `b t`, with inverses as adjugates.
    pub fn evaluate(&self, w: &Word) -> Matrix2<S> {
        self.evaluate_letters(w.letters())
    }

    pub fn evaluate_letters(&self, letters: &[Letter]) -> Matrix2<S> {
        letters
            .iter()
            .fold(Matrix2::identity(self.precision_bits), |acc, &l| acc.mul(&self.image(l)))
    }

    pub fn residual_f64(&self) -> f64 {
        self.residual.to_f64()
    }

    /// `||[b, t] - I||`, max-entry.
    pub fn commutator_deviation(&self) -> f64 {
        self.evaluate(&crate::word::bt::d()).distance_from_identity().to_f64()
    }

    pub fn is_irreducible(&self) -> bool {
        self.commutator_deviation() > COMMUTATOR_FLOOR
    }

    /// Per-letter error allowance: the relator residual or the unit
    /// roundoff, whichever is larger.
    pub fn noise(&self) -> f64 {
        self.residual_f64().max(S::unit_roundoff(self.precision_bits))
    }

    /// `10 * noise * length`, ignoring growth of the partial products.
    pub fn linear_bound(&self, length: usize) -> f64 {
        10.0 * self.noise() * length.max(1) as f64
    }

    /// How far the image of a trivial word may drift from `I`:
    /// [`linear_bound`](Self::linear_bound) scaled by the largest squared
    /// Frobenius norm of a prefix image. An error introduced at a letter is
    /// amplified by the prefix on the left and its inverse on the right.
    pub fn accumulation_bound(&self, letters: &[Letter]) -> f64 {
        let mut acc = Matrix2::identity(self.precision_bits);
        let mut worst = 1.0f64;
        for &l in letters {
            acc = acc.mul(&self.image(l));
            let f = acc.frobenius().to_f64();
            worst = worst.max(f * f);
        }
        self.linear_bound(letters.len()) * worst
    }

    /// Whether the image of `w` is further than `tol` from `I`. `true` is a
    /// witness that `w != 1` in the group; `false` says nothing.
    pub fn distinguish_from_identity(&self, w: &Word, tol: f64) -> Result<bool, RepError> {
        let floor = 100.0 * self.residual_f64() * w.len() as f64;
        if tol.is_nan() || tol <= floor {
            return Err(RepError::ToleranceTooSmall { tol, floor });
        }
        Ok(self.evaluate(w).distance_from_identity().to_f64() > tol)
    }

    pub fn to_record(&self) -> RepresentationRecord {
        RepresentationRecord {
            n: self.n,
            seed: self.seed,
            precision_bits: self.precision_bits,
            residual: self.residual.to_decimal(),
            image_t: matrix_record(&self.image_t),
            image_b: matrix_record(&self.image_b),
        }
    }
}

/// The eliminated relator `r(n)`.
pub fn relator_word(n: TwistKnotParams) -> Word {
    knot_group(n).relator_words()[0].clone()
}

pub fn evaluate<S: RepScalar>(rep: &Representation<S>, w: &Word) -> Matrix2<S> {
    rep.evaluate(w)
}

pub fn distinguish_from_identity<S: RepScalar>(rep: &Representation<S>, w: &Word, tol: f64) -> Result<bool, RepError> {
    rep.distinguish_from_identity(w, tol)
}

fn parabolic_t<S: RepScalar>(bits: u32) -> Matrix2<S> {
    Matrix2::new(Complex::one(bits), Complex::one(bits), Complex::zero(bits), Complex::one(bits))
}

/// Residual vector of the system `r(n) = I`, `det b = 1` in the unknown
/// entries `z = (p, q, r, s)` of the image of `b`, with its Jacobian.
fn system<S: RepScalar>(relator: &[Letter], z: &[Complex<S>; 4]) -> (Vec<Complex<S>>, Vec<Vec<Complex<S>>>) {
    let bits = z[0].bits();
    let tm = parabolic_t::<S>(bits);
    let ti = tm.adjugate();
    let bm = Matrix2 { e: z.clone() };
    let bi = bm.adjugate();
    let unit = |k: usize, sign: f64| {
        let mut m = Matrix2::<S>::zero(bits);
        m.e[k] = Complex::from_f64(sign, 0.0, bits);
        m
    };
    // d(b)/dz_k is the k-th unit matrix; the adjugate permutes and negates.
    let db: Vec<Matrix2<S>> = (0..4).map(|k| unit(k, 1.0)).collect();
    let dbi: Vec<Matrix2<S>> = vec![unit(3, 1.0), unit(1, -1.0), unit(2, -1.0), unit(0, 1.0)];

    let mut m = Matrix2::identity(bits);
    let mut dm: Vec<Matrix2<S>> = vec![Matrix2::zero(bits); 4];
    for &l in relator {
        let (x, dx) = match (l == B, l == B.inv(), l == T) {
            (true, _, _) => (&bm, Some(&db)),
            (_, true, _) => (&bi, Some(&dbi)),
            (_, _, true) => (&tm, None),
            _ => (&ti, None),
        };
        for (k, d) in dm.iter_mut().enumerate() {
            let mut next = d.mul(x);
            if let Some(dx) = dx {
                next = next.add(&m.mul(&dx[k]));
            }
            *d = next;
        }
        m = m.mul(x);
    }
    let one = Complex::one(bits);
    let [p, q, r, s] = z.clone();
    let mut f = vec![m.e[0].clone() - one.clone(), m.e[1].clone(), m.e[2].clone(), m.e[3].clone() - one.clone()];
    f.push(p.clone() * s.clone() - q.clone() * r.clone() - one);
    let mut jac: Vec<Vec<Complex<S>>> = (0..4).map(|i| (0..4).map(|k| dm[k].e[i].clone()).collect()).collect();
    jac.push(vec![s, -r, -q, p]);
    (f, jac)
}

fn norm<S: RepScalar>(v: &[Complex<S>]) -> S {
    let bits = v[0].bits();
    v.iter().fold(S::zero(bits), |acc, x| acc + x.norm_sqr()).sqrt()
}

/// One Levenberg-Marquardt step with damping `lambda * ||F||`.
fn lm_step<S: RepScalar>(f: &[Complex<S>], jac: &[Vec<Complex<S>>], z: &[Complex<S>; 4], lambda: f64) -> Option<[Complex<S>; 4]> {
    let bits = z[0].bits();
    let mu = norm(f) * S::from_f64(lambda, bits);
    let mut a = vec![vec![Complex::zero(bits); 4]; 4];
    let mut g = vec![Complex::zero(bits); 4];
    for (row, fi) in jac.iter().zip(f) {
        for i in 0..4 {
            let ci = row[i].conj();
            for k in 0..4 {
                a[i][k] = a[i][k].clone() + ci.clone() * row[k].clone();
            }
            g[i] = g[i].clone() - ci * fi.clone();
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i].re = row[i].re.clone() + mu.clone();
    }
    let delta = solve_linear(a, g)?;
    let mut out = z.clone();
    for (x, d) in out.iter_mut().zip(delta) {
        *x = x.clone() + d;
    }
    Some(out)
}

/// Runs damped Newton from `z` until `||F||` drops below `target` or stops
/// improving. Returns the final point and its `||F||`.
fn newton<S: RepScalar>(relator: &[Letter], mut z: [Complex<S>; 4], target: f64, max_iter: usize) -> ([Complex<S>; 4], f64) {
    let (mut f, mut jac) = system(relator, &z);
    let mut fnorm = norm(&f).to_f64();
    let mut lambda = 1.0;
    let mut stalls = 0;
    for _ in 0..max_iter {
        if fnorm < target || !fnorm.is_finite() {
            break;
        }
        let Some(next) = lm_step(&f, &jac, &z, lambda) else { break };
        let (f2, jac2) = system(relator, &next);
        let n2 = norm(&f2).to_f64();
        if n2 < fnorm {
            z = next;
            f = f2;
            jac = jac2;
            fnorm = n2;
            lambda = (lambda / 10.0).max(1e-12);
            stalls = 0;
        } else {
            lambda *= 10.0;
            stalls += 1;
            if stalls > 12 {
                break;
            }
        }
        if z.iter().any(|x| x.abs().to_f64() > 1e8) {
            break;
        }
    }
    (z, fnorm)
}

/// `10^-(bits / 4)`, the residual a solve at `bits` must reach.
pub fn residual_threshold(bits: u32) -> f64 {
    10f64.powf(-(bits as f64) * 0.25)
}

/// Solves for an irreducible parabolic representation at `precision_bits`.
pub fn solve_representation(n: TwistKnotParams, precision_bits: u32, seed: u64) -> Result<RepresentationMp, RepError> {
    if precision_bits < MIN_PRECISION {
        return Err(RepError::Precision(precision_bits));
    }
    solve_in::<rug::Float>(n, precision_bits, seed)
}

/// The solver over any scalar type. The residual must reach
/// [`residual_threshold`] of the scalar's effective precision.
pub fn solve_in<S: RepScalar>(n: TwistKnotParams, precision_bits: u32, seed: u64) -> Result<Representation<S>, RepError> {
    let bits = S::effective_bits(precision_bits);
    let relator = relator_word(n);
    let letters = relator.letters();
    let threshold = residual_threshold(bits);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reducible = 0;
    for _ in 0..RETRY_BUDGET {
        let start: [Complex<f64>; 4] = std::array::from_fn(|_| {
            Complex::from_f64(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), 53)
        });
        let (z, res) = newton(letters, start, 1e-12, 400);
        if res.is_nan() || res >= 1e-9 {
            continue;
        }
        let z: [Complex<S>; 4] = std::array::from_fn(|k| z[k].with_bits(bits));
        // Quadratic convergence: a handful of steps from f64 accuracy.
        let (z, _) = newton(letters, z, threshold * S::unit_roundoff(bits).max(1e-300), 60);
        let rep = Representation::from_images(n, seed, parabolic_t(bits), Matrix2 { e: z });
        if rep.residual_f64().is_nan() || rep.residual_f64() >= threshold {
            continue;
        }
        if !rep.is_irreducible() {
            reducible += 1;
            continue;
        }
        return Ok(rep);
    }
    if reducible > 0 {
        Err(RepError::OnlyReducible(RETRY_BUDGET))
    } else {
        Err(RepError::NoConvergence(RETRY_BUDGET))
    }
}

pub type RepresentationF64 = Representation<f64>;
pub type RepresentationMp = Representation<rug::Float>;
pub type Matrix2F64 = Matrix2<f64>;
pub type Matrix2Mp = Matrix2<rug::Float>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexRecord {
    pub re: String,
    pub im: String,
}

/// Entries in row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationRecord {
    pub n: i64,
    pub seed: u64,
    pub precision_bits: u32,
    pub residual: String,
    pub image_t: [ComplexRecord; 4],
    pub image_b: [ComplexRecord; 4],
}

fn matrix_record<S: RepScalar>(m: &Matrix2<S>) -> [ComplexRecord; 4] {
    std::array::from_fn(|k| ComplexRecord { re: m.e[k].re.to_decimal(), im: m.e[k].im.to_decimal() })
}

fn parse_matrix<S: RepScalar>(rec: &[ComplexRecord; 4], bits: u32) -> Result<Matrix2<S>, RepError> {
    let num = |s: &str| S::parse_decimal(s, bits).ok_or_else(|| RepError::BadNumber(s.to_string()));
    let mut e = Vec::with_capacity(4);
    for c in rec {
        e.push(Complex::new(num(&c.re)?, num(&c.im)?));
    }
    let [a, b, c, d]: [Complex<S>; 4] = e.try_into().expect("four entries");
    Ok(Matrix2::new(a, b, c, d))
}

impl RepresentationRecord {
    /// Rebuilds the representation; the stored residual is kept as given.
    pub fn to_representation<S: RepScalar>(&self) -> Result<Representation<S>, RepError> {
        let bits = self.precision_bits;
        Ok(Representation {
            n: self.n,
            seed: self.seed,
            precision_bits: S::effective_bits(bits),
            image_t: parse_matrix(&self.image_t, bits)?,
            image_b: parse_matrix(&self.image_b, bits)?,
            residual: S::parse_decimal(&self.residual, bits).ok_or_else(|| RepError::BadNumber(self.residual.clone()))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::bt::{b, d, t};
    use crate::word::Alphabet;

    fn p(n: i64) -> TwistKnotParams {
        TwistKnotParams::new(n).unwrap()
    }

    #[test]
    fn solves_small_n() {
        for n in 1..=3 {
            let rep = solve_representation(p(n), DEFAULT_PRECISION, 7).unwrap();
            assert!(rep.residual_f64() < 1e-53, "n = {n}: {}", rep.residual_f64());
            assert!(rep.is_irreducible());
            assert_eq!(rep.image_t, parabolic_t(212));
            assert!(rep.image_b.det().re.to_f64() - 1.0 < 1e-50);
            assert!(rep.distinguish_from_identity(&d(), 1e-6).unwrap());
            assert!(!rep.distinguish_from_identity(&relator_word(p(n)), 1e-6).unwrap());
        }
    }

    #[test]
    fn f64_solve() {
        let rep = solve_in::<f64>(p(1), 53, 3).unwrap();
        assert!(rep.residual < residual_threshold(53));
        assert!(rep.is_irreducible());
    }

    #[test]
    fn evaluation_laws() {
        let rep = solve_representation(p(2), 128, 1).unwrap();
        assert_eq!(rep.evaluate(&Word::empty()), Matrix2::identity(128));
        let bt = Alphabet::bt();
        let tt = rep.evaluate_letters(bt.parse("t").unwrap().concat(&t(-1)).letters());
        assert_eq!(tt, Matrix2::identity(128));
        let w = bt.parse("tbbTb").unwrap();
        let g = bt.parse("bT").unwrap();
        let lhs = rep.evaluate(&w.conjugate(&g));
        let rhs = rep.evaluate(&g).adjugate().mul(&rep.evaluate(&w)).mul(&rep.evaluate(&g));
        assert!(lhs.distance(&rhs).to_f64() < 1e-30);
    }

    #[test]
    fn precondition_and_empty_word() {
        let rep = solve_representation(p(1), 128, 5).unwrap();
        assert!(!rep.distinguish_from_identity(&Word::empty(), 1e-300).unwrap());
        assert!(matches!(rep.distinguish_from_identity(&b(3), 0.0), Err(RepError::ToleranceTooSmall { .. })));
        assert_eq!(solve_representation(p(1), 64, 0), Err(RepError::Precision(64)));
    }

    #[test]
    fn record_round_trip() {
        let rep = solve_representation(p(1), 212, 11).unwrap();
        let rec = rep.to_record();
        let json = serde_json::to_string(&rec).unwrap();
        let back: RepresentationRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
        let rebuilt: RepresentationMp = back.to_representation().unwrap();
        assert_eq!(rebuilt, rep);
    }

    #[test]
    fn deterministic() {
        let a = solve_representation(p(2), 128, 42).unwrap();
        let b = solve_representation(p(2), 128, 42).unwrap();
        assert_eq!(a, b);
    }
}
