//! Unit negation and exchange transformations. These generate the discrete
//! symmetries of the parameter space: both preserve the implemented
//! function for any parameter.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::param::Parameter;

/// A single symmetry move on hidden units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitTransform {
    Negate(usize),
    Exchange(usize, usize),
}

impl UnitTransform {
    pub fn apply(&self, w: &Parameter) -> Result<Parameter> {
        match *self {
            UnitTransform::Negate(i) => negate_unit(w, i),
            UnitTransform::Exchange(i, j) => exchange_units(w, i, j),
        }
    }
}

fn index_ok(w: &Parameter, i: usize) -> Result<()> {
    if i >= w.hidden_count() {
        Err(Error::IndexOutOfRange {
            index: i,
            h: w.hidden_count(),
        })
    } else {
        Ok(())
    }
}

/// Flip the sign of unit `i`'s outgoing weights, incoming weights, and bias.
/// Function-preserving because tanh is odd.
pub fn negate_unit(w: &Parameter, i: usize) -> Result<Parameter> {
    index_ok(w, i)?;
    let mut p = w.clone();
    p.units[i] = p.units[i].negated();
    Ok(p)
}

/// Swap the weight triples of units `i` and `j`.
pub fn exchange_units(w: &Parameter, i: usize, j: usize) -> Result<Parameter> {
    index_ok(w, i)?;
    index_ok(w, j)?;
    if i == j {
        return Err(Error::IndicesEqual(i));
    }
    let mut p = w.clone();
    p.units.swap(i, j);
    Ok(p)
}

/// Apply a sequence of transforms left to right.
pub fn apply_all(w: &Parameter, transforms: &[UnitTransform]) -> Result<Parameter> {
    let mut p = w.clone();
    for t in transforms {
        p = t.apply(&p)?;
    }
    Ok(p)
}

/// A deterministic pseudo-random composition of negations and exchanges,
/// for building equivalent test parameters.
pub fn random_transforms(h: usize, count: usize, seed: u64) -> Vec<UnitTransform> {
    if h == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            if h >= 2 && rng.random_range(0..2) == 0 {
                let i = rng.random_range(0..h);
                let mut j = rng.random_range(0..h - 1);
                if j >= i {
                    j += 1;
                }
                UnitTransform::Exchange(i, j)
            } else {
                UnitTransform::Negate(rng.random_range(0..h))
            }
        })
        .collect()
}
