//! JSON form of certificates. Words use letter notation over `b t`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::builders::{Certificate, Target};
use super::trace::{Direction, ProofTrace, RelatorProduct, TraceStep};
use super::ConjugateProduct;
use crate::word::{Alphabet, WordError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceStepRecord {
    FreeInsert { position: usize, letter: String },
    FreeDelete { position: usize },
    Base { position: usize, direction: Direction, n: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub n: i64,
    pub target: Target,
    pub base: String,
    pub conjugators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceStepRecord>>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RecordError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("`{0}` is not a single letter")]
    NotALetter(String),
    #[error("certificate has no conjugators")]
    Empty,
    #[error("certificate has no trace")]
    NoTrace,
}

impl CertificateRecord {
    pub fn from_certificate(cert: &Certificate, with_trace: bool) -> Self {
        let bt = Alphabet::bt();
        CertificateRecord {
            n: cert.n,
            target: cert.target,
            base: bt.format(cert.product.base()),
            conjugators: cert.product.conjugators().iter().map(|g| bt.format(g)).collect(),
            trace: with_trace.then(|| trace_to_records(&cert.trace)),
        }
    }

    pub fn product(&self) -> Result<ConjugateProduct, RecordError> {
        let bt = Alphabet::bt();
        let base = bt.parse(&self.base)?;
        let conjugators = self
            .conjugators
            .iter()
            .map(|g| bt.parse(g))
            .collect::<Result<Vec<_>, _>>()?;
        ConjugateProduct::new(base, conjugators).map_err(|_| RecordError::Empty)
    }

    pub fn proof_trace(&self) -> Result<Option<ProofTrace>, RecordError> {
        self.trace.as_ref().map(|steps| trace_from_records(steps)).transpose()
    }

    /// Rebuilds the certificate. The relator decomposition is not part of
    /// the record and is left empty.
    pub fn to_certificate(&self) -> Result<Certificate, RecordError> {
        let trace = self.proof_trace()?.ok_or(RecordError::NoTrace)?;
        Ok(Certificate {
            n: self.n,
            target: self.target,
            product: self.product()?,
            trace,
            relators: RelatorProduct::default(),
        })
    }
}

pub fn trace_to_records(trace: &ProofTrace) -> Vec<TraceStepRecord> {
    let bt = Alphabet::bt();
    trace
        .steps
        .iter()
        .map(|s| match *s {
            TraceStep::FreeInsert { position, letter } => {
                TraceStepRecord::FreeInsert { position, letter: bt.letter_name(letter) }
            }
            TraceStep::FreeDelete { position } => TraceStepRecord::FreeDelete { position },
            TraceStep::BaseMove { position, direction, n } => TraceStepRecord::Base { position, direction, n },
        })
        .collect()
}

pub fn trace_from_records(records: &[TraceStepRecord]) -> Result<ProofTrace, RecordError> {
    let bt = Alphabet::bt();
    let steps = records
        .iter()
        .map(|r| {
            Ok(match r {
                TraceStepRecord::FreeInsert { position, letter } => {
                    let w = bt.parse(letter)?;
                    if w.len() != 1 {
                        return Err(RecordError::NotALetter(letter.clone()));
                    }
                    TraceStep::FreeInsert { position: *position, letter: w.letters()[0] }
                }
                TraceStepRecord::FreeDelete { position } => TraceStep::FreeDelete { position: *position },
                TraceStepRecord::Base { position, direction, n } => {
                    TraceStep::BaseMove { position: *position, direction: *direction, n: *n }
                }
            })
        })
        .collect::<Result<Vec<_>, RecordError>>()?;
    Ok(ProofTrace { steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{identity_certificate, verify_by_trace};
    use crate::presentation::TwistKnotParams;

    #[test]
    fn json_round_trip() {
        for n in 1..=3 {
            let cert = identity_certificate(TwistKnotParams::new(n).unwrap());
            let rec = CertificateRecord::from_certificate(&cert, true);
            let json = serde_json::to_string(&rec).unwrap();
            let back: CertificateRecord = serde_json::from_str(&json).unwrap();
            assert_eq!(back, rec);
            let rebuilt = back.to_certificate().unwrap();
            assert_eq!(rebuilt.product, cert.product);
            assert_eq!(rebuilt.trace, cert.trace);
            assert!(verify_by_trace(&rebuilt).unwrap().is_confirmed());
        }
    }

    #[test]
    fn record_shape() {
        let cert = identity_certificate(TwistKnotParams::new(1).unwrap());
        let rec = CertificateRecord::from_certificate(&cert, false);
        let v = serde_json::to_value(&rec).unwrap();
        assert_eq!(v["n"], 1);
        assert_eq!(v["base"], "TBtb");
        assert_eq!(v["conjugators"], serde_json::json!(["t", "BTT"]));
        assert!(v.get("trace").is_none());
        let with = serde_json::to_value(CertificateRecord::from_certificate(&cert, true)).unwrap();
        let kinds: Vec<&str> = with["trace"].as_array().unwrap().iter().map(|s| s["kind"].as_str().unwrap()).collect();
        assert!(kinds.contains(&"base"));
        assert!(kinds.contains(&"free_insert"));
    }

    #[test]
    fn bad_letters_rejected() {
        let steps = vec![TraceStepRecord::FreeInsert { position: 0, letter: "tb".into() }];
        assert_eq!(trace_from_records(&steps), Err(RecordError::NotALetter("tb".into())));
    }
}
