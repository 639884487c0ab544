//! Lexicographic order and sign for real vectors.
//!
//! These generalise scalar comparison and scalar sign to incoming weight
//! vectors of multi-input units. Inputs must be finite.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Compare two equal-length vectors lexicographically: the first differing
/// component decides.
pub fn lex_compare(u: &[f64], v: &[f64]) -> Result<Ordering> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            context: "lexicographic comparison",
            expected: u.len(),
            found: v.len(),
        });
    }
    for (a, b) in u.iter().zip(v) {
        match a
            .partial_cmp(b)
            .expect("lex_compare requires finite components")
        {
            Ordering::Equal => continue,
            ord => return Ok(ord),
        }
    }
    Ok(Ordering::Equal)
}

/// Sign of `v` under lexicographic comparison with the zero vector:
/// `+1`, `0`, or `-1`. For length-1 vectors this is the scalar sign.
pub fn lex_sign(v: &[f64]) -> i8 {
    for &x in v {
        if x > 0.0 {
            return 1;
        }
        if x < 0.0 {
            return -1;
        }
    }
    0
}
