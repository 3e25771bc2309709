use serde::{Deserialize, Serialize};

use super::claims::{claim1_conjugator, claim3_conjugator};
use super::trace::{chain_relators, trace_from_relators, ProofTrace, RelatorProduct};
use super::{trace_start, ConjugateProduct};
use crate::presentation::TwistKnotParams;
use crate::word::bt::{b, prod, t};
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// `b^n`
    Bn,
    /// `b^-n`
    BnInv,
    /// the identity
    Identity,
}

impl Target {
    pub fn word(self, n: i64) -> Word {
        match self {
            Target::Bn => b(n),
            Target::BnInv => b(-n),
            Target::Identity => Word::empty(),
        }
    }
}

/// A product of conjugates of `D` equal to `target` in `<b, t | r(n)>`,
/// with a trace proving it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub n: i64,
    pub target: Target,
    pub product: ConjugateProduct,
    pub trace: ProofTrace,
    /// Relator conjugates whose product is `expand(product) * target^-1`.
    pub relators: RelatorProduct,
}

impl Certificate {
    pub fn target_word(&self) -> Word {
        self.target.word(self.n)
    }

    fn assemble(n: i64, target: Target, product: ConjugateProduct, relators: RelatorProduct) -> Self {
        let start = trace_start(&product, &target.word(n));
        let trace = trace_from_relators(&start, &relators, n);
        Certificate { n, target, product, trace, relators }
    }
}

/// `[t, b^m]^g` as `m` conjugates of `D`: conjugators `b^j g`, `j < m`.
fn commutator_conjugators(m: i64, g: &Word) -> Vec<Word> {
    (0..m).map(|j| b(j).concat(g)).collect()
}

/// `Z_k = t^(n-1) b^(n-1) (TB)^k [t, b^n] T^(n-1-k)`, the `k`-th line of the
/// derivation that moves `[t, b^n]` to the right.
fn forward_stage(n: i64, k: i64) -> Word {
    let tb_inv = t(-1).concat(&b(-1));
    prod(&[&t(n - 1), &b(n - 1), &tb_inv.pow(k), &t(1).commutator(&b(n)), &t(-(n - 1 - k))])
}

/// `Z'_k = T^(n-1) B^(n-1) (tb)^k [T, B^n] t^(n-1-k)`, the mirrored derivation.
fn mirror_stage(n: i64, k: i64) -> Word {
    let tb = t(1).concat(&b(1));
    prod(&[&t(-(n - 1)), &b(-(n - 1)), &tb.pow(k), &t(-1).commutator(&b(-n)), &t(n - 1 - k)])
}

/// Conjugators (before the final conjugation by `t^n`) writing
/// `t^(n-1) b^(n-1) (TB)^(n-1) [t, b^n]` as a product of conjugates of `D`.
fn positive_conjugators(n: i64) -> Vec<Word> {
    let mut out = Vec::new();
    if n == 1 {
        // The remainder is empty; only [t, b] = D is left.
    } else if n == 2 {
        // Claim 1 leaves D^(BT) and an empty tail.
        out.push(claim1_conjugator(2));
    } else {
        out.push(claim1_conjugator(n));
        // Claim 2: [T, B^m]^(T^(m-1)) for m = n-1 down to 2, with
        // [T, B^m] = [t, b^m]^(B^m T).
        for m in (2..n).rev() {
            out.extend(commutator_conjugators(m, &b(-m).concat(&t(-m))));
        }
    }
    out.extend(commutator_conjugators(n, &Word::empty()));
    out
}

/// Conjugators (before conjugation by `T^n`) for
/// `T^(n-1) B^(n-1) (tb)^(n-1) [T, B^n]`.
fn negative_conjugators(n: i64) -> Vec<Word> {
    let mut out = Vec::new();
    if n == 1 {
        // Only [T, B] = D^(BT) is left.
    } else if n == 2 {
        // Claim 3's leading conjugate is D^(BTbt), which is D itself.
        out.push(claim3_conjugator(2));
    } else {
        out.push(claim3_conjugator(n));
        // Claim 4: [t, b^m]^(t^(m-1)) for m = n-1 down to 2.
        for m in (2..n).rev() {
            out.extend(commutator_conjugators(m, &t(m - 1)));
        }
    }
    out.extend(commutator_conjugators(n, &b(-n).concat(&t(-1))));
    out
}

/// `b^n` as a product of conjugates of `D`.
pub fn bn_certificate(n: TwistKnotParams) -> Certificate {
    let n = n.n();
    let product = ConjugateProduct::of_d(positive_conjugators(n))
        .expect("nonempty")
        .conjugate(&t(n));

    // b^n = T (t b^n T) t = T (b^(n-1) T B^n t b^n) t = (Z_0)^(t^n) = ... = (Z_(n-1))^(t^n)
    let mut stages = vec![product.expand()];
    for k in (0..n).rev() {
        stages.push(forward_stage(n, k).conjugate(&t(n)));
    }
    stages.push(prod(&[&t(-1), &b(n - 1), &t(-1), &b(-n), &t(1), &b(n), &t(1)]));
    stages.push(b(n));
    let relators = chain_relators(&stages, n).expect("derivation links are base-relation steps");
    Certificate::assemble(n, Target::Bn, product, relators)
}

/// `b^-n` as a product of conjugates of `D`.
pub fn bn_inverse_certificate(n: TwistKnotParams) -> Certificate {
    let n = n.n();
    let product = ConjugateProduct::of_d(negative_conjugators(n))
        .expect("nonempty")
        .conjugate(&t(-n));

    // B^n = t (T B^n t) T = t (B^(n-1) t b^n T B^n) T = (Z'_0)^(T^n) = ... = (Z'_(n-1))^(T^n)
    let mut stages = vec![product.expand()];
    for k in (0..n).rev() {
        stages.push(mirror_stage(n, k).conjugate(&t(-n)));
    }
    stages.push(prod(&[&t(1), &b(-(n - 1)), &t(1), &b(n), &t(-1), &b(-n), &t(-1)]));
    stages.push(b(-n));
    let relators = chain_relators(&stages, n).expect("derivation links are base-relation steps");
    Certificate::assemble(n, Target::BnInv, product, relators)
}

/// The identity as a product of conjugates of `D`: the `b^n` certificate
/// followed by the `b^-n` one.
pub fn identity_certificate(n: TwistKnotParams) -> Certificate {
    let plus = bn_certificate(n);
    let minus = bn_inverse_certificate(n);
    let product = plus.product.then(&minus.product);
    // expand(P+) expand(P-) = (R+ b^n)(R- b^-n) = R+ (b^n R- b^-n)
    let mut relators = plus.relators.clone();
    let bn = b(n.n());
    relators.append(RelatorProduct {
        factors: minus.relators.factors.iter().map(|(u, e)| (bn.concat(u), *e)).collect(),
    });
    Certificate::assemble(n.n(), Target::Identity, product, relators)
}
