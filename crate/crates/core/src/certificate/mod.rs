//! Products of conjugates of `D = [t, b]` and their verification.
//!
//! The builders assemble, for each `n`, explicit products
//! `D^(g_1) ... D^(g_m)` equal to `b^n`, to `b^-n`, and (concatenated) to the
//! identity in `<b, t | r(n)>`. Each builder also emits a [`ProofTrace`]
//! that reaches the identity from `expand(cp) * target^-1` using only free
//! moves and the base relation, so verification is a replay.

mod builders;
pub mod claims;
mod record;
pub mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rep::{Representation, RepScalar};
use crate::rewrite::{KbLimits, RewriteSystem, TrivialityVerdict, UnknownReason};
use crate::word::bt::{b, d};
use crate::word::{Letter, Word};

pub use builders::{bn_certificate, bn_inverse_certificate, identity_certificate, Certificate, Target};
pub use claims::{verify_claim, ClaimError};
pub use record::{CertificateRecord, RecordError, TraceStepRecord};
pub use trace::{Direction, ProofTrace, TraceError, TraceStep};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("a product of conjugates needs at least one conjugator")]
    EmptyProduct,
    #[error("parameter must be at least 1, got {0}")]
    NonPositive(i64),
}

/// `base^(g_1) base^(g_2) ... base^(g_m)` with `m >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugateProduct {
    base: Word,
    conjugators: Vec<Word>,
}

impl ConjugateProduct {
    pub fn new(base: Word, conjugators: Vec<Word>) -> Result<Self, CertificateError> {
        if conjugators.is_empty() {
            return Err(CertificateError::EmptyProduct);
        }
        Ok(ConjugateProduct { base, conjugators })
    }

    /// Conjugates of `D = [t, b]`.
    pub fn of_d(conjugators: Vec<Word>) -> Result<Self, CertificateError> {
        Self::new(d(), conjugators)
    }

    pub fn base(&self) -> &Word {
        &self.base
    }

    pub fn conjugators(&self) -> &[Word] {
        &self.conjugators
    }

    pub fn len(&self) -> usize {
        self.conjugators.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn expand(&self) -> Word {
        self.conjugators
            .iter()
            .fold(Word::empty(), |acc, g| acc.concat(&self.base.conjugate(g)))
    }

    /// Replaces every `g_i` by `g_i h`, which conjugates the whole product by `h`.
    pub fn conjugate(&self, h: &Word) -> ConjugateProduct {
        ConjugateProduct {
            base: self.base.clone(),
            conjugators: self.conjugators.iter().map(|g| g.concat(h)).collect(),
        }
    }

    /// Concatenation of the two products; the bases must agree.
    pub fn then(&self, other: &ConjugateProduct) -> ConjugateProduct {
        assert_eq!(self.base, other.base, "products over different bases");
        let mut conjugators = self.conjugators.clone();
        conjugators.extend(other.conjugators.iter().cloned());
        ConjugateProduct { base: self.base.clone(), conjugators }
    }
}

pub fn conjugate_product(cp: &ConjugateProduct, h: &Word) -> ConjugateProduct {
    cp.conjugate(h)
}

pub fn expand(cp: &ConjugateProduct) -> Word {
    cp.expand()
}

/// `[t, b^m] = D D^b ... D^(b^(m-1))`.
pub fn commutator_power_expansion(m: i64) -> Result<ConjugateProduct, CertificateError> {
    if m < 1 {
        return Err(CertificateError::NonPositive(m));
    }
    ConjugateProduct::of_d((0..m).map(b).collect())
}

/// The letters that trace verification starts from: `expand(cp)` followed
/// by `target^-1`, without cancelling across the seam.
pub fn trace_start(cp: &ConjugateProduct, target: &Word) -> Vec<Letter> {
    let mut start = cp.expand().into_letters();
    start.extend_from_slice(target.inverse().letters());
    start
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Trace,
    Rewrite,
    Representation,
}

/// Numeric comparison of `expand(cp)` and the target under a representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepEvidence {
    /// Max-entry distance between the images of `expand(cp)` and `target`.
    pub deviation: f64,
    /// Accumulation bound the deviation is compared against.
    pub bound: f64,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum UnknownCause {
    Rewrite(UnknownReason),
    Evidence(RepEvidence),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum VerificationResult {
    Confirmed(Method),
    Unknown(UnknownCause),
}

impl VerificationResult {
    pub fn is_confirmed(&self) -> bool {
        matches!(self, VerificationResult::Confirmed(_))
    }
}

/// What to verify with.
pub enum Verifier<'a, S: RepScalar> {
    Trace { trace: &'a ProofTrace, n: i64 },
    Rewrite { system: &'a RewriteSystem },
    Representation { rep: &'a Representation<S> },
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("trace replay failed: {0}")]
    Trace(#[from] TraceError),
}

pub fn verify_certificate<S: RepScalar>(
    cp: &ConjugateProduct,
    target: &Word,
    verifier: Verifier<'_, S>,
) -> Result<VerificationResult, VerifyError> {
    match verifier {
        Verifier::Trace { trace, n } => {
            trace.check(&trace_start(cp, target), n)?;
            Ok(VerificationResult::Confirmed(Method::Trace))
        }
        Verifier::Rewrite { system } => Ok(match system.equal_in_group(&cp.expand(), target) {
            TrivialityVerdict::Confirmed(_) => VerificationResult::Confirmed(Method::Rewrite),
            TrivialityVerdict::Unknown(r) => VerificationResult::Unknown(UnknownCause::Rewrite(r)),
        }),
        Verifier::Representation { rep } => {
            let deviation = rep.evaluate(&cp.expand()).distance(&rep.evaluate(target)).to_f64();
            let bound = rep.accumulation_bound(&trace_start(cp, target));
            Ok(VerificationResult::Unknown(UnknownCause::Evidence(RepEvidence {
                deviation,
                bound,
                consistent: deviation <= bound,
            })))
        }
    }
}

/// Trace verification with the certificate's own trace.
pub fn verify_by_trace(cert: &Certificate) -> Result<VerificationResult, VerifyError> {
    verify_certificate::<f64>(&cert.product, &cert.target_word(), Verifier::Trace { trace: &cert.trace, n: cert.n })
}

/// Rewrite verification against a freshly completed system for `<b, t | r(n)>`.
pub fn verify_by_rewrite(cert: &Certificate, limits: KbLimits) -> VerificationResult {
    let pres = crate::presentation::knot_group(crate::presentation::TwistKnotParams::new(cert.n).expect("n >= 1"));
    let system = crate::rewrite::knuth_bendix(&pres, limits);
    verify_certificate::<f64>(&cert.product, &cert.target_word(), Verifier::Rewrite { system: &system })
        .expect("rewrite verification does not fail")
}

/// `[b^-1, t]` and `D^(b^-1)` agree as free words.
pub fn nr_remark_check() -> bool {
    b(-1).commutator(&crate::word::bt::t(1)) == d().conjugate(&b(-1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::bt::t;
    use crate::word::Alphabet;

    fn f(w: &Word) -> String {
        Alphabet::bt().format(w)
    }

    #[test]
    fn commutator_expansions() {
        let cp = commutator_power_expansion(1).unwrap();
        assert_eq!(cp.conjugators(), &[Word::empty()]);
        assert_eq!(cp.expand(), d());
        let cp = commutator_power_expansion(2).unwrap();
        assert_eq!(f(&cp.expand()), "TBBtbb");
        for m in 1..=50 {
            assert_eq!(commutator_power_expansion(m).unwrap().expand(), t(1).commutator(&b(m)));
        }
        assert_eq!(commutator_power_expansion(0), Err(CertificateError::NonPositive(0)));
    }

    #[test]
    fn products_and_conjugation() {
        assert_eq!(ConjugateProduct::of_d(vec![]), Err(CertificateError::EmptyProduct));
        let g = Alphabet::bt().parse("tBB").unwrap();
        let cp = ConjugateProduct::of_d(vec![g.clone(), g.clone()]).unwrap();
        let dg = d().conjugate(&g);
        assert_eq!(cp.expand(), dg.concat(&dg));
        let h = Alphabet::bt().parse("bT").unwrap();
        assert_eq!(cp.conjugate(&h).expand(), cp.expand().conjugate(&h));
        assert_eq!(cp.conjugate(&Word::empty()), cp);
        assert_eq!(cp.conjugate(&h).conjugate(&h.inverse()), cp);
        let k = t(2);
        assert_eq!(cp.conjugate(&h).conjugate(&k), cp.conjugate(&h.concat(&k)));
    }

    #[test]
    fn remark() {
        assert!(nr_remark_check());
        assert_eq!(f(&d().conjugate(&b(-1))), "bTBt");
    }

    #[test]
    fn expansion_trace_is_all_free() {
        for m in 1..=10 {
            let cp = commutator_power_expansion(m).unwrap();
            let target = t(1).commutator(&b(m));
            let start = trace_start(&cp, &target);
            let trace = trace::trace_from_relators(&start, &trace::RelatorProduct::default(), 1);
            assert!(trace.all_free());
            assert!(!trace.is_empty());
            let r = verify_certificate::<f64>(&cp, &target, Verifier::Trace { trace: &trace, n: 1 });
            assert_eq!(r, Ok(VerificationResult::Confirmed(Method::Trace)));
        }
    }
}
