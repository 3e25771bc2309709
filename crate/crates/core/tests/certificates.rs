use twist_torsion::certificate::trace::ProofTrace;
use twist_torsion::certificate::{
    bn_certificate, bn_inverse_certificate, identity_certificate, trace_start, verify_by_rewrite, verify_by_trace,
    verify_certificate, CertificateRecord, ConjugateProduct, TraceError, TraceStep, UnknownCause, VerificationResult,
    Verifier, VerifyError,
};
use twist_torsion::presentation::{knot_group, TwistKnotParams};
use twist_torsion::rep::{solve_representation, DEFAULT_PRECISION};
use twist_torsion::rewrite::{knuth_bendix, KbLimits};
use twist_torsion::word::bt::b;
use twist_torsion::word::{Alphabet, Word};

fn p(n: i64) -> TwistKnotParams {
    TwistKnotParams::new(n).unwrap()
}

#[test]
fn every_base_move_is_the_base_relation() {
    for n in 1..=6 {
        let cert = identity_certificate(p(n));
        for s in &cert.trace.steps {
            if let TraceStep::BaseMove { n: m, .. } = s {
                assert_eq!(*m, n);
            }
        }
        assert_eq!(cert.trace.base_moves() as i64, 2 * n);
    }
}

#[test]
fn transport_preserves_triviality() {
    let bt = Alphabet::bt();
    for n in 1..=3 {
        let cert = identity_certificate(p(n));
        assert!(verify_by_trace(&cert).unwrap().is_confirmed());
        let sys = knuth_bendix(&knot_group(p(n)), KbLimits::default());
        for h in ["b", "T", "tBt", "BBtTT"] {
            let h = bt.parse(h).unwrap();
            let moved = cert.product.conjugate(&h);
            let r = verify_certificate::<f64>(&moved, &Word::empty(), Verifier::Rewrite { system: &sys }).unwrap();
            assert!(r.is_confirmed(), "n = {n}");
        }
    }
}

#[test]
fn corrupted_conjugator_is_rejected() {
    let cert = bn_certificate(p(2));
    let mut gs = cert.product.conjugators().to_vec();
    gs[1] = gs[1].concat(&b(1));
    let bad = ConjugateProduct::of_d(gs).unwrap();
    let r = verify_certificate::<f64>(&bad, &b(2), Verifier::Trace { trace: &cert.trace, n: 2 });
    let Err(VerifyError::Trace(e)) = r else { panic!("replay should fail: {r:?}") };
    let step = match e {
        TraceError::OutOfRange { step, .. }
        | TraceError::NotInversePair { step, .. }
        | TraceError::FactorMismatch { step, .. }
        | TraceError::WrongTwist { step, .. } => Some(step),
        TraceError::NotEmpty(_) => None,
    };
    if let Some(step) = step {
        assert!(step < cert.trace.len());
    }
    let rep = solve_representation(p(2), DEFAULT_PRECISION, 0).unwrap();
    let v = verify_certificate(&bad, &b(2), Verifier::Representation { rep: &rep }).unwrap();
    let VerificationResult::Unknown(UnknownCause::Evidence(e)) = v else { panic!("evidence only") };
    assert!(!e.consistent);
    assert!(e.deviation > 1e-6);
}

#[test]
fn representation_is_never_confirmation() {
    let cert = identity_certificate(p(1));
    let rep = solve_representation(p(1), DEFAULT_PRECISION, 0).unwrap();
    let v = verify_certificate(&cert.product, &Word::empty(), Verifier::Representation { rep: &rep }).unwrap();
    let VerificationResult::Unknown(UnknownCause::Evidence(e)) = v else { panic!("evidence only") };
    assert!(e.consistent);
}

#[test]
fn forged_trace_fails() {
    let cert = bn_inverse_certificate(p(3));
    let mut steps = cert.trace.steps.clone();
    steps.pop();
    let short = ProofTrace { steps };
    let start = trace_start(&cert.product, &cert.target_word());
    assert!(matches!(short.check(&start, 3), Err(TraceError::NotEmpty(_))));
    assert!(matches!(cert.trace.check(&start, 4), Err(TraceError::WrongTwist { .. }) | Err(TraceError::FactorMismatch { .. })));
}

#[test]
fn records_round_trip_for_all_targets() {
    for n in 1..=4 {
        for cert in [bn_certificate(p(n)), bn_inverse_certificate(p(n)), identity_certificate(p(n))] {
            let json = serde_json::to_string(&CertificateRecord::from_certificate(&cert, true)).unwrap();
            let back: CertificateRecord = serde_json::from_str(&json).unwrap();
            let rebuilt = back.to_certificate().unwrap();
            assert!(verify_by_trace(&rebuilt).unwrap().is_confirmed());
        }
    }
}

#[test]
fn rewrite_confirms_small_certificates() {
    for n in 1..=2 {
        for cert in [bn_certificate(p(n)), bn_inverse_certificate(p(n)), identity_certificate(p(n))] {
            assert!(verify_by_rewrite(&cert, KbLimits::default()).is_confirmed());
        }
    }
}
