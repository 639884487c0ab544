//! Detection and elimination of structural redundancy among hidden units.
//!
//! A parameter is reducible when a unit has a zero outgoing weight vector,
//! a zero incoming weight vector, or duplicates another unit's incoming
//! weights and bias exactly or with both signs flipped. Each case admits a
//! single-step reduction that preserves the implemented function.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::param::{vecs_close, vecs_neg_close, Parameter, ToleranceConfig};

/// The four redundancy conditions, in detection priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// The unit's outgoing weight vector is zero.
    ZeroOutgoing,
    /// The unit's incoming weight vector is zero (a constant unit).
    ZeroIncoming,
    /// Two units share incoming weights and bias.
    Duplicate,
    /// Two units have sign-opposed incoming weights and bias.
    Negated,
}

impl ConditionKind {
    /// Roman-numeral label used in diagnostics.
    pub fn label(self) -> &'static str {
        match self {
            ConditionKind::ZeroOutgoing => "i",
            ConditionKind::ZeroIncoming => "ii",
            ConditionKind::Duplicate => "iii",
            ConditionKind::Negated => "iv",
        }
    }
}

/// Which redundancy condition fires and at which unit indices.
///
/// `unit` is the unit that gets dropped or zeroed by the reduction; the
/// pair conditions also carry the `partner` that absorbs its contribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducibilityWitness {
    ZeroOutgoing { unit: usize },
    ZeroIncoming { unit: usize },
    Duplicate { unit: usize, partner: usize },
    Negated { unit: usize, partner: usize },
}

impl ReducibilityWitness {
    pub fn kind(&self) -> ConditionKind {
        match self {
            ReducibilityWitness::ZeroOutgoing { .. } => ConditionKind::ZeroOutgoing,
            ReducibilityWitness::ZeroIncoming { .. } => ConditionKind::ZeroIncoming,
            ReducibilityWitness::Duplicate { .. } => ConditionKind::Duplicate,
            ReducibilityWitness::Negated { .. } => ConditionKind::Negated,
        }
    }

    /// Index of the unit removed or zeroed by the reduction.
    pub fn unit(&self) -> usize {
        match *self {
            ReducibilityWitness::ZeroOutgoing { unit }
            | ReducibilityWitness::ZeroIncoming { unit }
            | ReducibilityWitness::Duplicate { unit, .. }
            | ReducibilityWitness::Negated { unit, .. } => unit,
        }
    }

    /// Absorbing unit for the pair conditions.
    pub fn partner(&self) -> Option<usize> {
        match *self {
            ReducibilityWitness::Duplicate { partner, .. }
            | ReducibilityWitness::Negated { partner, .. } => Some(partner),
            _ => None,
        }
    }
}

/// Find the first redundancy among units outside `zeroed`, scanning
/// condition-major: zero outgoing with smallest index, then zero incoming,
/// then duplicate pairs in lexicographic index order, then negated pairs.
/// Comparisons use `tol.weight_tol`. Returns `None` when irreducible.
pub fn find_redundancy(
    w: &Parameter,
    zeroed: &BTreeSet<usize>,
    tol: &ToleranceConfig,
) -> Option<ReducibilityWitness> {
    let wt = tol.weight_tol;
    let live: Vec<usize> = (0..w.hidden_count()).filter(|i| !zeroed.contains(i)).collect();

    for &i in &live {
        if w.unit(i).outgoing.iter().all(|v| v.abs() <= wt) {
            return Some(ReducibilityWitness::ZeroOutgoing { unit: i });
        }
    }
    for &i in &live {
        if w.unit(i).incoming.iter().all(|v| v.abs() <= wt) {
            return Some(ReducibilityWitness::ZeroIncoming { unit: i });
        }
    }
    for (pos, &i) in live.iter().enumerate() {
        for &j in &live[pos + 1..] {
            if vecs_close(&w.unit(i).incoming, &w.unit(j).incoming, wt)
                && (w.unit(i).bias - w.unit(j).bias).abs() <= wt
            {
                return Some(ReducibilityWitness::Duplicate { unit: i, partner: j });
            }
        }
    }
    for (pos, &i) in live.iter().enumerate() {
        for &j in &live[pos + 1..] {
            if vecs_neg_close(&w.unit(i).incoming, &w.unit(j).incoming, wt)
                && (w.unit(i).bias + w.unit(j).bias).abs() <= wt
            {
                return Some(ReducibilityWitness::Negated { unit: i, partner: j });
            }
        }
    }
    None
}

pub(crate) fn check_witness(
    w: &Parameter,
    witness: &ReducibilityWitness,
    tol: &ToleranceConfig,
) -> Result<()> {
    let h = w.hidden_count();
    let wt = tol.weight_tol;
    let index_ok = |i: usize| -> Result<()> {
        if i >= h {
            Err(Error::IndexOutOfRange { index: i, h })
        } else {
            Ok(())
        }
    };
    let stale = |what: &str| Error::StaleWitness(format!("condition ({what}) no longer holds"));
    match *witness {
        ReducibilityWitness::ZeroOutgoing { unit } => {
            index_ok(unit)?;
            if !w.unit(unit).outgoing.iter().all(|v| v.abs() <= wt) {
                return Err(stale("i"));
            }
        }
        ReducibilityWitness::ZeroIncoming { unit } => {
            index_ok(unit)?;
            if !w.unit(unit).incoming.iter().all(|v| v.abs() <= wt) {
                return Err(stale("ii"));
            }
        }
        ReducibilityWitness::Duplicate { unit, partner } => {
            index_ok(unit)?;
            index_ok(partner)?;
            if unit == partner {
                return Err(Error::IndicesEqual(unit));
            }
            if !(vecs_close(&w.unit(unit).incoming, &w.unit(partner).incoming, wt)
                && (w.unit(unit).bias - w.unit(partner).bias).abs() <= wt)
            {
                return Err(stale("iii"));
            }
        }
        ReducibilityWitness::Negated { unit, partner } => {
            index_ok(unit)?;
            index_ok(partner)?;
            if unit == partner {
                return Err(Error::IndicesEqual(unit));
            }
            if !(vecs_neg_close(&w.unit(unit).incoming, &w.unit(partner).incoming, wt)
                && (w.unit(unit).bias + w.unit(partner).bias).abs() <= wt)
            {
                return Err(stale("iv"));
            }
        }
    }
    Ok(())
}

/// Remove the witnessed unit, producing a functionally equal parameter with
/// one hidden unit fewer: a constant unit folds into the output bias, and a
/// duplicated (or sign-opposed) unit merges into its partner's outgoing
/// weights with a `+=` (resp. `-=`).
pub fn reduce_once(
    w: &Parameter,
    witness: &ReducibilityWitness,
    tol: &ToleranceConfig,
) -> Result<Parameter> {
    check_witness(w, witness, tol)?;
    let mut units = w.units().to_vec();
    let mut output_bias = w.output_bias().to_vec();
    match *witness {
        ReducibilityWitness::ZeroOutgoing { .. } => {}
        ReducibilityWitness::ZeroIncoming { unit } => {
            let act = units[unit].bias.tanh();
            for (d, a) in output_bias.iter_mut().zip(&units[unit].outgoing) {
                *d += a * act;
            }
        }
        ReducibilityWitness::Duplicate { unit, partner } => {
            let absorbed = units[unit].outgoing.clone();
            for (a, v) in units[partner].outgoing.iter_mut().zip(&absorbed) {
                *a += v;
            }
        }
        ReducibilityWitness::Negated { unit, partner } => {
            let absorbed = units[unit].outgoing.clone();
            for (a, v) in units[partner].outgoing.iter_mut().zip(&absorbed) {
                *a -= v;
            }
        }
    }
    units.remove(witness.unit());
    Parameter::new(w.input_dim(), w.output_dim(), units, output_bias)
}

/// Apply the same reduction while keeping the unit in place as an all-zero
/// triple, marking it in the `zeroed` set. The hidden-unit count is
/// unchanged and the function is preserved.
pub fn reduce_in_place(
    w: &Parameter,
    witness: &ReducibilityWitness,
    zeroed: &BTreeSet<usize>,
    tol: &ToleranceConfig,
) -> Result<(Parameter, BTreeSet<usize>)> {
    check_witness(w, witness, tol)?;
    if zeroed.contains(&witness.unit()) {
        return Err(Error::StaleWitness(format!(
            "unit {} is already zeroed",
            witness.unit()
        )));
    }
    if let Some(p) = witness.partner() {
        if zeroed.contains(&p) {
            return Err(Error::StaleWitness(format!("partner unit {p} is already zeroed")));
        }
    }
    let reduced = apply_stage1_branch(w, witness);
    let mut zeroed = zeroed.clone();
    zeroed.insert(witness.unit());
    Ok((reduced, zeroed))
}

/// The value edit of one in-place reduction step, without validation.
///
/// The witnessed unit always ends as an exact all-zero triple so that later
/// stages can rely on zeroed units being blank.
pub(crate) fn apply_stage1_branch(w: &Parameter, witness: &ReducibilityWitness) -> Parameter {
    let mut p = w.clone();
    match *witness {
        ReducibilityWitness::ZeroOutgoing { unit } => {
            p.units[unit].zero_out();
        }
        ReducibilityWitness::ZeroIncoming { unit } => {
            let act = p.units[unit].bias.tanh();
            let outgoing = p.units[unit].outgoing.clone();
            for (d, a) in p.output_bias.iter_mut().zip(&outgoing) {
                *d += a * act;
            }
            p.units[unit].zero_out();
        }
        ReducibilityWitness::Duplicate { unit, partner } => {
            let absorbed = p.units[unit].outgoing.clone();
            for (a, v) in p.units[partner].outgoing.iter_mut().zip(&absorbed) {
                *a += v;
            }
            p.units[unit].zero_out();
        }
        ReducibilityWitness::Negated { unit, partner } => {
            let absorbed = p.units[unit].outgoing.clone();
            for (a, v) in p.units[partner].outgoing.iter_mut().zip(&absorbed) {
                *a -= v;
            }
            p.units[unit].zero_out();
        }
    }
    p
}

/// Run in-place reductions to fixpoint. Returns the reduced parameter and
/// the set of zeroed units. Terminates in at most `h` iterations since each
/// step zeroes exactly one live unit.
pub fn stage1_fixpoint(w: &Parameter, tol: &ToleranceConfig) -> (Parameter, BTreeSet<usize>) {
    let mut p = w.clone();
    let mut zeroed = BTreeSet::new();
    while let Some(witness) = find_redundancy(&p, &zeroed, tol) {
        let (next, z) = reduce_in_place(&p, &witness, &zeroed, tol)
            .expect("witness found by the same scan cannot be stale");
        p = next;
        zeroed = z;
    }
    (p, zeroed)
}

/// Minimal number of hidden units required to implement the function.
pub fn rank(w: &Parameter, tol: &ToleranceConfig) -> usize {
    let (_, zeroed) = stage1_fixpoint(w, tol);
    w.hidden_count() - zeroed.len()
}

/// Repeatedly drop redundant units until irreducible, producing the minimal
/// functionally equal parameter with `rank(w)` hidden units.
pub fn reduce_to_minimal(w: &Parameter, tol: &ToleranceConfig) -> Parameter {
    let mut p = w.clone();
    let none = BTreeSet::new();
    while let Some(witness) = find_redundancy(&p, &none, tol) {
        p = reduce_once(&p, &witness, tol).expect("witness found by the same scan cannot be stale");
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::{functions_equal, HiddenUnit};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn zero_outgoing_is_detected_first() {
        let w = Parameter::from_scalars(&[(0.0, 1.0, 0.0)], 0.0);
        assert_eq!(
            find_redundancy(&w, &BTreeSet::new(), &tol()),
            Some(ReducibilityWitness::ZeroOutgoing { unit: 0 })
        );
    }

    #[test]
    fn negated_pair_is_detected() {
        let w = Parameter::from_scalars(&[(1.0, 1.0, 0.5), (2.0, -1.0, -0.5)], 0.0);
        assert_eq!(
            find_redundancy(&w, &BTreeSet::new(), &tol()),
            Some(ReducibilityWitness::Negated { unit: 0, partner: 1 })
        );
    }

    #[test]
    fn zeroed_units_are_ignored() {
        let w = Parameter::from_scalars(&[(0.0, 0.0, 0.0), (1.0, 2.0, 0.5)], 0.0);
        let zeroed: BTreeSet<usize> = [0].into_iter().collect();
        assert_eq!(find_redundancy(&w, &zeroed, &tol()), None);
    }

    #[test]
    fn irreducible_parameter_has_no_witness() {
        let w = Parameter::from_scalars(&[(1.0, 1.0, 0.0), (1.0, 2.0, 0.0)], 0.0);
        assert_eq!(find_redundancy(&w, &BTreeSet::new(), &tol()), None);
    }

    #[test]
    fn reduce_once_folds_constant_unit_into_output_bias() {
        let w = Parameter::from_scalars(&[(1.0, 0.0, 0.5)], 0.0);
        let witness = find_redundancy(&w, &BTreeSet::new(), &tol()).unwrap();
        assert_eq!(witness.kind(), ConditionKind::ZeroIncoming);
        let reduced = reduce_once(&w, &witness, &tol()).unwrap();
        assert_eq!(reduced.hidden_count(), 0);
        assert_eq!(reduced.output_bias(), &[0.46211715726000974]);
        assert_eq!(reduced.output_bias()[0], (0.5f64).tanh());
    }

    #[test]
    fn reduce_once_merges_duplicate_units() {
        let w = Parameter::from_scalars(&[(1.0, 2.0, 0.5), (1.0, 2.0, 0.5)], 0.0);
        let witness = find_redundancy(&w, &BTreeSet::new(), &tol()).unwrap();
        assert_eq!(witness.kind(), ConditionKind::Duplicate);
        let reduced = reduce_once(&w, &witness, &tol()).unwrap();
        assert_eq!(reduced.hidden_count(), 1);
        assert_eq!(reduced.unit(0).outgoing, vec![2.0]);
    }

    #[test]
    fn reduce_once_merges_negated_pair() {
        let w = Parameter::from_scalars(&[(1.0, 1.0, 0.5), (2.0, -1.0, -0.5)], 0.0);
        let witness = find_redundancy(&w, &BTreeSet::new(), &tol()).unwrap();
        let reduced = reduce_once(&w, &witness, &tol()).unwrap();
        assert_eq!(reduced.hidden_count(), 1);
        assert_eq!(reduced.unit(0).outgoing, vec![1.0]);
        assert_eq!(reduced.unit(0).incoming, vec![-1.0]);
        assert_eq!(reduced.unit(0).bias, -0.5);
    }

    #[test]
    fn reduce_once_rejects_stale_witness() {
        let w = Parameter::from_scalars(&[(1.0, 1.0, 0.0)], 0.0);
        let err = reduce_once(
            &w,
            &ReducibilityWitness::ZeroOutgoing { unit: 0 },
            &tol(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::StaleWitness(_)));
    }

    #[test]
    fn reduce_in_place_zeroes_the_blanked_unit() {
        let w = Parameter::from_scalars(&[(0.0, 3.0, 1.0)], 0.0);
        let witness = ReducibilityWitness::ZeroOutgoing { unit: 0 };
        let (p, zeroed) = reduce_in_place(&w, &witness, &BTreeSet::new(), &tol()).unwrap();
        assert!(p.unit(0).is_blank(0.0));
        assert_eq!(zeroed.into_iter().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn reduce_in_place_doubles_partner_and_preserves_function() {
        let w = Parameter::from_scalars(&[(1.0, 2.0, 0.5), (1.0, 2.0, 0.5)], 0.25);
        let witness = find_redundancy(&w, &BTreeSet::new(), &tol()).unwrap();
        let (p, _) = reduce_in_place(&w, &witness, &BTreeSet::new(), &tol()).unwrap();
        assert_eq!(p.unit(1).outgoing, vec![2.0]);
        assert!(p.unit(0).is_blank(0.0));
        assert!(functions_equal(&w, &p, &tol(), 3).unwrap());
    }

    #[test]
    fn reduce_in_place_leaves_other_units_untouched() {
        let w = Parameter::new(
            2,
            1,
            vec![
                HiddenUnit::new(vec![1.0], vec![0.5, 0.5], 0.1),
                HiddenUnit::new(vec![2.0], vec![0.5, 0.5], 0.1),
                HiddenUnit::new(vec![-1.0], vec![1.0, -1.0], 0.7),
            ],
            vec![0.0],
        )
        .unwrap();
        let witness = find_redundancy(&w, &BTreeSet::new(), &tol()).unwrap();
        assert_eq!(witness, ReducibilityWitness::Duplicate { unit: 0, partner: 1 });
        let (p, _) = reduce_in_place(&w, &witness, &BTreeSet::new(), &tol()).unwrap();
        assert_eq!(p.unit(2), w.unit(2));
        assert_eq!(p.unit(1).incoming, w.unit(1).incoming);
        assert_eq!(p.unit(1).bias, w.unit(1).bias);
    }

    #[test]
    fn rank_of_all_blank_parameter_is_zero() {
        let w = Parameter::from_scalars(&[(0.0, 0.0, 0.0), (0.0, 0.0, 0.0)], 1.5);
        assert_eq!(rank(&w, &tol()), 0);
    }

    #[test]
    fn rank_of_planted_duplicate_is_one() {
        let w = Parameter::from_scalars(&[(1.0, 2.0, 0.5), (1.0, 2.0, 0.5)], 0.0);
        assert_eq!(rank(&w, &tol()), 1);
    }

    #[test]
    fn stage1_terminates_within_h_iterations() {
        let w = Parameter::from_scalars(
            &[(1.0, 0.0, 0.3), (0.0, 1.0, 0.1), (2.0, 2.0, 0.5), (1.0, 2.0, 0.5)],
            0.0,
        );
        let (p, zeroed) = stage1_fixpoint(&w, &tol());
        assert_eq!(zeroed.len(), 3);
        assert_eq!(rank(&w, &tol()), 1);
        assert!(functions_equal(&w, &p, &tol(), 11).unwrap());
    }

    #[test]
    fn reduce_to_minimal_reaches_rank_units() {
        let w = Parameter::from_scalars(&[(1.0, 2.0, 0.5), (1.0, 2.0, 0.5)], 0.0);
        let minimal = reduce_to_minimal(&w, &tol());
        assert_eq!(minimal.hidden_count(), 1);
        assert!(functions_equal(&w, &minimal, &tol(), 5).unwrap());
    }
}
