//! The four free-group identities used to decompose `b^n` and `b^-n`.

use thiserror::Error;

use crate::word::bt::{b, d, prod, t};
use crate::word::Word;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ClaimError {
    #[error("no claim numbered {0}; claims are 1 to 4")]
    UnknownClaim(u8),
    #[error("claim {id} needs n >= {min}, got {n}")]
    BelowThreshold { id: u8, n: i64, min: i64 },
}

pub fn claim_threshold(id: u8) -> Result<i64, ClaimError> {
    match id {
        1 | 3 => Ok(2),
        2 | 4 => Ok(3),
        _ => Err(ClaimError::UnknownClaim(id)),
    }
}

fn pair(x: &Word, y: &Word, k: i64) -> Word {
    x.concat(y).pow(k)
}

/// `t^(n-1) b^(n-1) (TB)^(n-1)`, the factor left over after pushing `[t, b^n]`
/// through the conjugated base relation.
pub fn positive_remainder(n: i64) -> Word {
    prod(&[&t(n - 1), &b(n - 1), &pair(&t(-1), &b(-1), n - 1)])
}

/// `T^(n-1) B^(n-1) (tb)^(n-1)`, the mirror of [`positive_remainder`].
pub fn negative_remainder(n: i64) -> Word {
    prod(&[&t(-(n - 1)), &b(-(n - 1)), &pair(&t(1), &b(1), n - 1)])
}

/// Conjugator of the leading `D` in Claim 1: `(bt)^(n-2) B^(n-1) T^(n-1)`.
pub fn claim1_conjugator(n: i64) -> Word {
    prod(&[&pair(&b(1), &t(1), n - 2), &b(-(n - 1)), &t(-(n - 1))])
}

/// Tail of Claim 1: `t^(n-1) b^(n-1) (TB)^(n-2) B T`.
pub fn claim1_tail(n: i64) -> Word {
    prod(&[&t(n - 1), &b(n - 1), &pair(&t(-1), &b(-1), n - 2), &b(-1), &t(-1)])
}

/// Conjugator of the leading `D` in Claim 3: `(BT)^(n-1) b^(n-1) t^(n-1)`.
pub fn claim3_conjugator(n: i64) -> Word {
    prod(&[&pair(&b(-1), &t(-1), n - 1), &b(n - 1), &t(n - 1)])
}

/// Tail of Claim 3: `T^(n-1) B^(n-1) (tb)^(n-2) b t`.
pub fn claim3_tail(n: i64) -> Word {
    prod(&[&t(-(n - 1)), &b(-(n - 1)), &pair(&t(1), &b(1), n - 2), &b(1), &t(1)])
}

/// `[T, B^(n-1)]^(T^(n-2)) ... [T, B^2]^T`.
pub fn claim2_product(n: i64) -> Word {
    (2..n).rev().fold(Word::empty(), |acc, m| {
        acc.concat(&t(-1).commutator(&b(-m)).conjugate(&t(-(m - 1))))
    })
}

/// `[t, b^(n-1)]^(t^(n-2)) ... [t, b^2]^t`.
pub fn claim4_product(n: i64) -> Word {
    (2..n).rev().fold(Word::empty(), |acc, m| {
        acc.concat(&t(1).commutator(&b(m)).conjugate(&t(m - 1)))
    })
}

/// Both sides of a claim as words over `b t`.
pub fn claim_sides(id: u8, n: i64) -> Result<(Word, Word), ClaimError> {
    let min = claim_threshold(id)?;
    if n < min {
        return Err(ClaimError::BelowThreshold { id, n, min });
    }
    Ok(match id {
        1 => (positive_remainder(n), d().conjugate(&claim1_conjugator(n)).concat(&claim1_tail(n))),
        2 => (claim1_tail(n), claim2_product(n)),
        3 => (negative_remainder(n), d().conjugate(&claim3_conjugator(n)).concat(&claim3_tail(n))),
        _ => (claim3_tail(n), claim4_product(n)),
    })
}

/// Whether the claim holds as an identity of free-group words.
pub fn verify_claim(id: u8, n: i64) -> Result<bool, ClaimError> {
    let (lhs, rhs) = claim_sides(id, n)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;

    #[test]
    fn small_cases() {
        let bt = Alphabet::bt();
        let (lhs, rhs) = claim_sides(1, 2).unwrap();
        assert_eq!(bt.format(&lhs), "tbTB");
        assert_eq!(bt.format(&rhs), "tbTB");
        assert_eq!(rhs, d().conjugate(&bt.parse("BT").unwrap()));
        assert!(claim1_tail(2).is_empty());
        assert!(claim3_tail(2).is_empty());
        let (lhs, _) = claim_sides(2, 3).unwrap();
        assert_eq!(lhs, bt.parse("t^2 b^2 (T B) B T").unwrap());
        assert_eq!(lhs, bt.parse("[T, B^2]^T").unwrap());
    }

    #[test]
    fn all_claims_hold() {
        for n in 2..=30 {
            assert_eq!(verify_claim(1, n), Ok(true));
            assert_eq!(verify_claim(3, n), Ok(true));
        }
        for n in 3..=30 {
            assert_eq!(verify_claim(2, n), Ok(true));
            assert_eq!(verify_claim(4, n), Ok(true));
        }
    }

    #[test]
    fn claims_are_mirror_images() {
        for n in 2..=12 {
            assert_eq!(positive_remainder(n).flip_signs(), negative_remainder(n));
            assert_eq!(claim1_tail(n).flip_signs(), claim3_tail(n));
        }
        for n in 3..=12 {
            assert_eq!(claim2_product(n).flip_signs(), claim4_product(n));
        }
    }

    #[test]
    fn thresholds() {
        assert_eq!(verify_claim(1, 1), Err(ClaimError::BelowThreshold { id: 1, n: 1, min: 2 }));
        assert!(verify_claim(2, 2).is_err());
        assert!(verify_claim(4, 2).is_err());
        assert!(verify_claim(3, 2).unwrap());
        assert_eq!(verify_claim(5, 4), Err(ClaimError::UnknownClaim(5)));
    }
}
