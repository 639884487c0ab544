//! Seeded test-instance generation: plain random parameters, minimal edits
//! planting a chosen redundancy, and parameters of prescribed rank.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::param::{HiddenUnit, Parameter, Shape, ToleranceConfig};
use crate::reducibility::{rank, ConditionKind};

fn draw_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-2.0..=2.0)).collect()
}

fn draw_unit(rng: &mut ChaCha8Rng, shape: Shape) -> HiddenUnit {
    HiddenUnit::new(
        draw_vec(rng, shape.m),
        draw_vec(rng, shape.n),
        rng.random_range(-2.0..=2.0),
    )
}

/// Deterministic pseudo-random parameter with components in `[-2, 2]`.
/// Carries no planted redundancy, so it is irreducible with probability 1.
pub fn random_parameter(shape: Shape, seed: u64) -> Parameter {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let units = (0..shape.h).map(|_| draw_unit(&mut rng, shape)).collect();
    let d = draw_vec(&mut rng, shape.m);
    Parameter::new(shape.n, shape.m, units, d).expect("drawn components are finite")
}

/// Minimally edit `w` so the named redundancy condition holds exactly at the
/// given indices. The pair conditions copy unit `unit`'s incoming weights
/// and bias onto `partner` (negating both for [`ConditionKind::Negated`]).
pub fn plant_redundancy(
    w: &Parameter,
    condition: ConditionKind,
    unit: usize,
    partner: Option<usize>,
) -> Result<Parameter> {
    let h = w.hidden_count();
    if unit >= h {
        return Err(Error::IndexOutOfRange { index: unit, h });
    }
    let mut p = w.clone();
    match condition {
        ConditionKind::ZeroOutgoing | ConditionKind::ZeroIncoming => {
            if partner.is_some() {
                return Err(Error::InvalidArgument(
                    "single-unit conditions take no partner index".into(),
                ));
            }
            let target = match condition {
                ConditionKind::ZeroOutgoing => &mut p.units[unit].outgoing,
                _ => &mut p.units[unit].incoming,
            };
            target.iter_mut().for_each(|v| *v = 0.0);
        }
        ConditionKind::Duplicate | ConditionKind::Negated => {
            let partner = partner.ok_or_else(|| {
                Error::InvalidArgument("pair conditions require a partner index".into())
            })?;
            if partner >= h {
                return Err(Error::IndexOutOfRange { index: partner, h });
            }
            if partner == unit {
                return Err(Error::IndicesEqual(unit));
            }
            let src = if condition == ConditionKind::Duplicate {
                (w.unit(unit).incoming.clone(), w.unit(unit).bias)
            } else {
                (
                    w.unit(unit).incoming.iter().map(|v| -v).collect(),
                    -w.unit(unit).bias,
                )
            };
            p.units[partner].incoming = src.0;
            p.units[partner].bias = src.1;
        }
    }
    Ok(p)
}

/// Deterministic pseudo-random parameter of the given shape whose rank is
/// exactly `target_rank`, verified before returning.
///
/// The construction draws an irreducible core of `target_rank` units and
/// pads with redundant units: blanks, zero-outgoing units, constant units,
/// and (sign-flipped) splits of core units, then shuffles unit order.
pub fn random_with_rank(
    shape: Shape,
    target_rank: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Parameter> {
    if target_rank > shape.h {
        return Err(Error::InvalidArgument(format!(
            "requested rank {target_rank} exceeds hidden-unit count {}",
            shape.h
        )));
    }
    for attempt in 0..32u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut units: Vec<HiddenUnit> = (0..target_rank).map(|_| draw_unit(&mut rng, shape)).collect();
        for _ in target_rank..shape.h {
            let recipe_count = if target_rank > 0 { 5 } else { 3 };
            let unit = match rng.random_range(0..recipe_count) {
                0 => HiddenUnit::zero(shape.n, shape.m),
                1 => HiddenUnit::new(vec![0.0; shape.m], draw_vec(&mut rng, shape.n), rng.random_range(-2.0..=2.0)),
                2 => HiddenUnit::new(draw_vec(&mut rng, shape.m), vec![0.0; shape.n], rng.random_range(-2.0..=2.0)),
                kind => {
                    // Split a core unit in two, preserving the summed
                    // outgoing weight (with a sign flip for kind 4).
                    let parent = rng.random_range(0..target_rank);
                    let split = draw_vec(&mut rng, shape.m);
                    if kind == 3 {
                        for (a, s) in units[parent].outgoing.iter_mut().zip(&split) {
                            *a -= s;
                        }
                        HiddenUnit::new(split, units[parent].incoming.clone(), units[parent].bias)
                    } else {
                        for (a, s) in units[parent].outgoing.iter_mut().zip(&split) {
                            *a += s;
                        }
                        HiddenUnit::new(
                            split,
                            units[parent].incoming.iter().map(|v| -v).collect(),
                            -units[parent].bias,
                        )
                    }
                }
            };
            units.push(unit);
        }
        units.shuffle(&mut rng);
        let d = draw_vec(&mut rng, shape.m);
        let candidate = Parameter::new(shape.n, shape.m, units, d).expect("finite components");
        if rank(&candidate, tol) == target_rank {
            return Ok(candidate);
        }
    }
    Err(Error::InvalidArgument(format!(
        "could not generate a rank-{target_rank} parameter for h = {} from seed {seed}",
        shape.h
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reducibility::{find_redundancy, ReducibilityWitness};
    use std::collections::BTreeSet;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn random_parameter_is_deterministic() {
        let shape = Shape::new(2, 3, 4).unwrap();
        assert_eq!(random_parameter(shape, 9), random_parameter(shape, 9));
        assert_ne!(random_parameter(shape, 9), random_parameter(shape, 10));
    }

    #[test]
    fn random_parameter_with_no_hidden_units() {
        let shape = Shape::new(2, 1, 0).unwrap();
        let w = random_parameter(shape, 3);
        assert_eq!(w.hidden_count(), 0);
        assert_eq!(w.output_bias().len(), 1);
    }

    #[test]
    fn random_parameter_is_irreducible() {
        let shape = Shape::new(1, 1, 4).unwrap();
        let w = random_parameter(shape, 42);
        assert_eq!(find_redundancy(&w, &BTreeSet::new(), &tol()), None);
    }

    #[test]
    fn plant_zero_outgoing() {
        let shape = Shape::new(2, 2, 3).unwrap();
        let w = random_parameter(shape, 1);
        let planted = plant_redundancy(&w, ConditionKind::ZeroOutgoing, 2, None).unwrap();
        assert!(planted.unit(2).outgoing.iter().all(|&v| v == 0.0));
        assert_eq!(planted.unit(2).incoming, w.unit(2).incoming);
    }

    #[test]
    fn plant_duplicate_copies_incoming_and_bias() {
        let shape = Shape::new(2, 1, 4).unwrap();
        let w = random_parameter(shape, 2);
        let planted = plant_redundancy(&w, ConditionKind::Duplicate, 0, Some(2)).unwrap();
        assert_eq!(planted.unit(2).incoming, planted.unit(0).incoming);
        assert_eq!(planted.unit(2).bias, planted.unit(0).bias);
    }

    #[test]
    fn planted_negated_pair_is_found() {
        let shape = Shape::new(2, 2, 3).unwrap();
        let w = random_parameter(shape, 5);
        let planted = plant_redundancy(&w, ConditionKind::Negated, 0, Some(1)).unwrap();
        assert_eq!(
            find_redundancy(&planted, &BTreeSet::new(), &tol()),
            Some(ReducibilityWitness::Negated { unit: 0, partner: 1 })
        );
    }

    #[test]
    fn plant_rejects_bad_indices() {
        let w = random_parameter(Shape::new(1, 1, 2).unwrap(), 0);
        assert!(plant_redundancy(&w, ConditionKind::ZeroOutgoing, 5, None).is_err());
        assert!(plant_redundancy(&w, ConditionKind::Duplicate, 0, Some(0)).is_err());
        assert!(plant_redundancy(&w, ConditionKind::Duplicate, 0, None).is_err());
    }

    #[test]
    fn random_with_rank_hits_target() {
        let cfg = tol();
        for (h, r) in [(4usize, 2usize), (2, 2), (3, 0), (5, 1), (6, 3)] {
            let shape = Shape::new(2, 2, h).unwrap();
            let w = random_with_rank(shape, r, 77 + h as u64, &cfg).unwrap();
            assert_eq!(rank(&w, &cfg), r, "h = {h}, target rank {r}");
        }
    }

    #[test]
    fn random_with_rank_rejects_infeasible_target() {
        let shape = Shape::new(1, 1, 2).unwrap();
        assert!(random_with_rank(shape, 3, 0, &tol()).is_err());
    }
}
