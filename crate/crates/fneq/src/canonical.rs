//! Three-stage canonicalisation: reduce redundant units in place, negate
//! the remaining units to lexicographically positive incoming weights, and
//! sort. Functionally equivalent parameters map to the same canonical form,
//! which makes equivalence decidable by componentwise comparison.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lex::{lex_compare, lex_sign};
use crate::param::{Parameter, ToleranceConfig};
use crate::reducibility::stage1_fixpoint;

/// Canonical parameter together with what each stage did: the zeroed-unit
/// set from stage 1, the per-unit sign flips from stage 2 (`+1` for
/// unflipped and zeroed units), and the stage-3 sort permutation
/// (`permutation[k]` is the pre-sort index of the unit at position `k`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalizationRecord {
    pub canonical: Parameter,
    pub zeroed: BTreeSet<usize>,
    pub signs: Vec<i8>,
    pub permutation: Vec<usize>,
}

/// Sort order for stage 3: decreasing lexicographic incoming weights,
/// ties broken by decreasing bias, then by original index (stable).
pub(crate) fn sort_order(p: &Parameter) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.hidden_count()).collect();
    order.sort_by(|&i, &j| {
        lex_compare(&p.unit(j).incoming, &p.unit(i).incoming)
            .expect("units share the input dimension")
            .then_with(|| {
                p.unit(j)
                    .bias
                    .partial_cmp(&p.unit(i).bias)
                    .expect("finite biases")
            })
            .then_with(|| i.cmp(&j))
    });
    order
}

pub(crate) fn apply_order(p: &Parameter, order: &[usize]) -> Parameter {
    let units = order.iter().map(|&i| p.unit(i).clone()).collect();
    Parameter::new(p.input_dim(), p.output_dim(), units, p.output_bias().to_vec())
        .expect("reordering preserves validity")
}

/// Map a parameter to the canonical representative of its functional
/// equivalence class.
///
/// The canonical form has every redundant unit zeroed, every live unit with
/// lexicographically positive incoming weights, units sorted as in
/// [`sort_order`], and all blank units trailing. Canonicalisation preserves
/// the function and is idempotent.
pub fn canonicalize(w: &Parameter, tol: &ToleranceConfig) -> CanonicalizationRecord {
    let (mut p, zeroed) = stage1_fixpoint(w, tol);

    let mut signs = vec![1i8; p.hidden_count()];
    for i in 0..p.hidden_count() {
        if zeroed.contains(&i) {
            continue;
        }
        let s = lex_sign(&p.unit(i).incoming);
        debug_assert_ne!(s, 0, "live units have nonzero incoming weights after stage 1");
        if s < 0 {
            p.units[i] = p.units[i].negated();
            signs[i] = -1;
        }
    }

    let permutation = sort_order(&p);
    let canonical = apply_order(&p, &permutation);

    CanonicalizationRecord {
        canonical,
        zeroed,
        signs,
        permutation,
    }
}

/// Decide functional equivalence of two same-shape parameters by comparing
/// canonical forms componentwise within `tol.weight_tol`.
pub fn equivalent(w: &Parameter, w2: &Parameter, tol: &ToleranceConfig) -> Result<bool> {
    if w.shape() != w2.shape() {
        return Err(Error::ShapeMismatch(format!(
            "expected identical shapes, got (n={}, m={}, h={}) vs (n={}, m={}, h={})",
            w.shape().n,
            w.shape().m,
            w.shape().h,
            w2.shape().n,
            w2.shape().m,
            w2.shape().h,
        )));
    }
    let a = canonicalize(w, tol).canonical;
    let b = canonicalize(w2, tol).canonical;
    Ok(a.allclose(&b, tol.weight_tol))
}
