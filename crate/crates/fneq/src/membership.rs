//! Description of the full functional equivalence class of a parameter.
//!
//! A canonicalisation trace records what could happen to each unit on the
//! way to the canonical form: a sign flip, and a fate — either folding into
//! the output bias or landing in one of the canonical unit positions. Every
//! member of the class satisfies the block conditions induced by some trace
//! against the canonical form, which yields a brute-force membership oracle
//! at small hidden-unit counts.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::canonical::canonicalize;
use crate::error::{Error, Result};
use crate::param::{HiddenUnit, Parameter, ToleranceConfig};
use crate::reducibility::rank;

/// Maximum hidden-unit count accepted by [`in_class_bruteforce`]; the trace
/// count grows roughly as `2^h (h+1)^h`.
pub const DEFAULT_TRACE_ENUMERATION_CAP: usize = 4;

/// Where a unit ends up during canonicalisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitFate {
    /// Folded into the output bias (constant units).
    OutputBias,
    /// Contributes to the canonical unit at this position (0-based).
    Slot(usize),
}

/// Sign vector plus unit-fate map of order `order`: the fates must cover
/// every live canonical position `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalizationTrace {
    pub signs: Vec<i8>,
    pub fates: Vec<UnitFate>,
    pub order: usize,
}

impl CanonicalizationTrace {
    /// The identity trace for a canonical parameter of rank `r` on `h`
    /// units: no sign flips, unit `i` assigned to position `i`.
    pub fn identity(h: usize, r: usize) -> Result<Self> {
        if r > h {
            return Err(Error::InvalidArgument(format!(
                "order {r} exceeds unit count {h}"
            )));
        }
        Ok(CanonicalizationTrace {
            signs: vec![1; h],
            fates: (0..h).map(UnitFate::Slot).collect(),
            order: r,
        })
    }
}

// Debug representation: `sigma` is the sign vector, `tau` maps each unit to
// 0 for an output-bias fold or to the 1-based canonical position.
impl Serialize for CanonicalizationTrace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let tau: Vec<usize> = self
            .fates
            .iter()
            .map(|f| match f {
                UnitFate::OutputBias => 0,
                UnitFate::Slot(k) => k + 1,
            })
            .collect();
        let mut s = serializer.serialize_struct("CanonicalizationTrace", 2)?;
        s.serialize_field("sigma", &self.signs)?;
        s.serialize_field("tau", &tau)?;
        s.end()
    }
}

fn validate_trace(trace: &CanonicalizationTrace, h: usize) -> Result<()> {
    if trace.signs.len() != h || trace.fates.len() != h {
        return Err(Error::InvalidArgument(format!(
            "trace covers {} units, parameter has {h}",
            trace.signs.len().max(trace.fates.len())
        )));
    }
    if trace.order > h {
        return Err(Error::InvalidArgument(format!(
            "trace order {} exceeds unit count {h}",
            trace.order
        )));
    }
    if !trace.signs.iter().all(|&s| s == 1 || s == -1) {
        return Err(Error::InvalidArgument("trace signs must be +1 or -1".into()));
    }
    let mut covered = vec![false; h];
    for fate in &trace.fates {
        if let UnitFate::Slot(k) = fate {
            if *k >= h {
                return Err(Error::InvalidArgument(format!(
                    "trace references canonical position {k}, unit count is {h}"
                )));
            }
            covered[*k] = true;
        }
    }
    if !covered.iter().take(trace.order).all(|&c| c) {
        return Err(Error::InvalidArgument(format!(
            "trace of order {} must cover every live canonical position",
            trace.order
        )));
    }
    Ok(())
}

/// Enumerate every trace of order `r` on `h` units exactly once, in a fixed
/// order: fate maps as an odometer (last unit fastest) with bias-fold before
/// the positions, then sign vectors as an odometer with `+1` before `-1`.
pub fn enumerate_traces(h: usize, r: usize) -> Result<Vec<CanonicalizationTrace>> {
    if r > h {
        return Err(Error::InvalidArgument(format!(
            "order {r} exceeds unit count {h}"
        )));
    }
    let mut traces = Vec::new();
    let mut digits = vec![0usize; h]; // 0 = bias fold, v = position v-1
    loop {
        let mut covered = vec![false; r];
        for &v in &digits {
            if v >= 1 && v - 1 < r {
                covered[v - 1] = true;
            }
        }
        if covered.iter().all(|&c| c) {
            let fates: Vec<UnitFate> = digits
                .iter()
                .map(|&v| {
                    if v == 0 {
                        UnitFate::OutputBias
                    } else {
                        UnitFate::Slot(v - 1)
                    }
                })
                .collect();
            for mask in 0u64..(1 << h) {
                let signs: Vec<i8> = (0..h)
                    .map(|i| if mask >> i & 1 == 0 { 1 } else { -1 })
                    .collect();
                traces.push(CanonicalizationTrace {
                    signs,
                    fates: fates.clone(),
                    order: r,
                });
            }
        }
        // Advance the odometer.
        let mut pos = h;
        loop {
            if pos == 0 {
                return Ok(traces);
            }
            pos -= 1;
            if digits[pos] < h {
                digits[pos] += 1;
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Rank of a canonical parameter: the number of non-blank units.
fn canonical_rank(canonical: &Parameter, tol: &ToleranceConfig) -> usize {
    canonical
        .units()
        .iter()
        .filter(|u| !u.is_blank(tol.weight_tol))
        .count()
}

/// Test whether `candidate` satisfies the block conditions of `trace`
/// against `canonical`:
///
/// - units fated to the output bias must have zero incoming weights, and
///   their constant contributions plus `d` must reproduce the canonical
///   output bias (a function-value identity, checked at `func_tol`);
/// - units fated to a live position must sign-match that canonical unit's
///   incoming weights and bias, with signed outgoing weights summing to the
///   canonical outgoing vector;
/// - units fated to a blank position must be pairwise sign-matched with
///   signed outgoing weights summing to zero.
///
/// Weight conditions use `weight_tol`.
pub fn trace_membership(
    candidate: &Parameter,
    canonical: &Parameter,
    trace: &CanonicalizationTrace,
    tol: &ToleranceConfig,
) -> Result<bool> {
    if candidate.shape() != canonical.shape() {
        return Err(Error::ShapeMismatch(
            "candidate and canonical parameter must share a shape".into(),
        ));
    }
    let h = candidate.hidden_count();
    validate_trace(trace, h)?;
    let r = canonical_rank(canonical, tol);
    if trace.order != r {
        return Err(Error::TraceOrderMismatch {
            trace_order: trace.order,
            rank: r,
        });
    }

    let wt = tol.weight_tol;
    let m = candidate.output_dim();
    let sign = |i: usize| trace.signs[i] as f64;

    let mut bias_block = Vec::new();
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); h];
    for (i, fate) in trace.fates.iter().enumerate() {
        match fate {
            UnitFate::OutputBias => bias_block.push(i),
            UnitFate::Slot(k) => blocks[*k].push(i),
        }
    }

    // Bias-fold block.
    let mut fold = candidate.output_bias().to_vec();
    for &i in &bias_block {
        let unit = candidate.unit(i);
        if !unit.incoming.iter().all(|v| v.abs() <= wt) {
            return Ok(false);
        }
        let act = unit.bias.tanh();
        for (f, a) in fold.iter_mut().zip(&unit.outgoing) {
            *f += a * act;
        }
    }
    for (f, delta) in fold.iter().zip(canonical.output_bias()) {
        if (f - delta).abs() > tol.func_tol {
            return Ok(false);
        }
    }

    // Blocks reproducing live canonical units.
    for (k, block) in blocks.iter().enumerate().take(r) {
        let target = canonical.unit(k);
        let mut signed_sum = vec![0.0; m];
        for &i in block {
            let unit = candidate.unit(i);
            let s = sign(i);
            for (b, beta) in unit.incoming.iter().zip(&target.incoming) {
                if (s * b - beta).abs() > wt {
                    return Ok(false);
                }
            }
            if (s * unit.bias - target.bias).abs() > wt {
                return Ok(false);
            }
            for (acc, a) in signed_sum.iter_mut().zip(&unit.outgoing) {
                *acc += s * a;
            }
        }
        for (acc, alpha) in signed_sum.iter().zip(&target.outgoing) {
            if (acc - alpha).abs() > wt {
                return Ok(false);
            }
        }
    }

    // Mutually cancelling blocks on blank positions.
    for block in blocks.iter().skip(r) {
        let mut signed_sum = vec![0.0; m];
        for (pos, &i) in block.iter().enumerate() {
            let unit = candidate.unit(i);
            let si = sign(i);
            for &j in &block[pos + 1..] {
                let other = candidate.unit(j);
                let sj = sign(j);
                let matched = unit
                    .incoming
                    .iter()
                    .zip(&other.incoming)
                    .all(|(bi, bj)| (si * bi - sj * bj).abs() <= wt)
                    && (si * unit.bias - sj * other.bias).abs() <= wt;
                if !matched {
                    return Ok(false);
                }
            }
            for (acc, a) in signed_sum.iter_mut().zip(&unit.outgoing) {
                *acc += si * a;
            }
        }
        if signed_sum.iter().any(|v| v.abs() > wt) {
            return Ok(false);
        }
    }

    Ok(true)
}

/// Brute-force class membership: does some trace of the right order place
/// `candidate` in the class of `w`? Intended for small `h`; refuses to
/// enumerate beyond [`DEFAULT_TRACE_ENUMERATION_CAP`].
pub fn in_class_bruteforce(
    candidate: &Parameter,
    w: &Parameter,
    tol: &ToleranceConfig,
) -> Result<bool> {
    in_class_bruteforce_with_cap(candidate, w, tol, DEFAULT_TRACE_ENUMERATION_CAP)
}

/// [`in_class_bruteforce`] with an explicit enumeration cap.
pub fn in_class_bruteforce_with_cap(
    candidate: &Parameter,
    w: &Parameter,
    tol: &ToleranceConfig,
    cap: usize,
) -> Result<bool> {
    if candidate.shape() != w.shape() {
        return Err(Error::ShapeMismatch(
            "candidate and reference parameter must share a shape".into(),
        ));
    }
    let h = w.hidden_count();
    if h > cap {
        return Err(Error::EnumerationCap { h, cap });
    }
    let canonical = canonicalize(w, tol).canonical;
    let r = rank(w, tol);
    for trace in enumerate_traces(h, r)? {
        if trace_membership(candidate, &canonical, &trace, tol)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A pseudo-random valid trace of order `r` on `h` units.
pub fn random_trace(h: usize, r: usize, seed: u64) -> Result<CanonicalizationTrace> {
    if r > h {
        return Err(Error::InvalidArgument(format!(
            "order {r} exceeds unit count {h}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..h).collect();
    order.shuffle(&mut rng);
    let mut fates = vec![UnitFate::OutputBias; h];
    for (k, &i) in order.iter().take(r).enumerate() {
        fates[i] = UnitFate::Slot(k);
    }
    for &i in order.iter().skip(r) {
        let v = rng.random_range(0..=h);
        fates[i] = if v == 0 {
            UnitFate::OutputBias
        } else {
            UnitFate::Slot(v - 1)
        };
    }
    let signs = (0..h)
        .map(|_| if rng.random_range(0..2u8) == 0 { 1 } else { -1 })
        .collect();
    Ok(CanonicalizationTrace {
        signs,
        fates,
        order: r,
    })
}

/// Generate a pseudo-random member of the class that follows `trace`
/// exactly: free components are drawn, then one unit per block is solved so
/// the block condition holds. The result is functionally equivalent to
/// `canonical`.
pub fn sample_class_member(
    canonical: &Parameter,
    trace: &CanonicalizationTrace,
    seed: u64,
) -> Result<Parameter> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_class_member_with(canonical, trace, &mut |_| rng.random_range(-2.0..=2.0))
}

/// [`sample_class_member`] with an explicit source of free values. The
/// source is called once per free scalar in a fixed order; a source that
/// always returns zero reproduces `canonical` itself under the identity
/// trace.
pub fn sample_class_member_with(
    canonical: &Parameter,
    trace: &CanonicalizationTrace,
    draw: &mut dyn FnMut(usize) -> f64,
) -> Result<Parameter> {
    let h = canonical.hidden_count();
    let n = canonical.input_dim();
    let m = canonical.output_dim();
    validate_trace(trace, h)?;
    let tol = ToleranceConfig::default();
    let r = canonical_rank(canonical, &tol);
    if trace.order != r {
        return Err(Error::TraceOrderMismatch {
            trace_order: trace.order,
            rank: r,
        });
    }

    let mut bias_block = Vec::new();
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); h];
    for (i, fate) in trace.fates.iter().enumerate() {
        match fate {
            UnitFate::OutputBias => bias_block.push(i),
            UnitFate::Slot(k) => blocks[*k].push(i),
        }
    }
    for (k, block) in blocks.iter().enumerate().take(r) {
        if block.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "no unit is assigned to live canonical position {k}"
            )));
        }
    }

    let mut counter = 0usize;
    let mut draw1 = move |()| {
        let v = draw(counter);
        counter += 1;
        v
    };
    let sign = |i: usize| trace.signs[i] as f64;
    let mut units: Vec<HiddenUnit> = vec![HiddenUnit::zero(n, m); h];

    for (k, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            continue;
        }
        // Shared incoming weights and bias for the block, up to sign.
        let (shared_incoming, shared_bias, target_outgoing) = if k < r {
            let t = canonical.unit(k);
            (t.incoming.clone(), t.bias, t.outgoing.clone())
        } else {
            let b: Vec<f64> = (0..n).map(|_| draw1(())).collect();
            let c = draw1(());
            (b, c, vec![0.0; m])
        };
        let mut signed_sum = vec![0.0; m];
        for (pos, &i) in block.iter().enumerate() {
            let s = sign(i);
            let incoming: Vec<f64> = shared_incoming.iter().map(|b| s * b).collect();
            let bias = s * shared_bias;
            let outgoing: Vec<f64> = if pos + 1 < block.len() {
                let a: Vec<f64> = (0..m).map(|_| draw1(())).collect();
                for (acc, v) in signed_sum.iter_mut().zip(&a) {
                    *acc += s * v;
                }
                a
            } else {
                // Solve the last unit so the signed sum meets the target.
                target_outgoing
                    .iter()
                    .zip(&signed_sum)
                    .map(|(alpha, acc)| s * (alpha - acc))
                    .collect()
            };
            units[i] = HiddenUnit::new(outgoing, incoming, bias);
        }
    }

    let mut output_bias = canonical.output_bias().to_vec();
    for &i in &bias_block {
        let outgoing: Vec<f64> = (0..m).map(|_| draw1(())).collect();
        let bias = draw1(());
        let act = bias.tanh();
        for (d, a) in output_bias.iter_mut().zip(&outgoing) {
            *d -= a * act;
        }
        units[i] = HiddenUnit::new(outgoing, vec![0.0; n], bias);
    }

    Parameter::new(n, m, units, output_bias)
}
