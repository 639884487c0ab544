//! Piecewise-linear equal-function paths between equivalent parameters.
//!
//! Every constructor in this module produces paths whose every point
//! implements the same function as the starting parameter. The basic
//! manoeuvre transfers a unit's weights into a blank unit in three
//! segments; negation and transposition gadgets compose it; and reducible
//! parameters connect to their canonical form, or to each other, through
//! these gadgets. Parameters whose rank is at most half the hidden-unit
//! count admit a short path of at most seven segments.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::canonical::{canonicalize, equivalent, sort_order};
use crate::error::{Error, Result};
use crate::lex::lex_sign;
use crate::param::{Parameter, ToleranceConfig};
use crate::reducibility::{
    apply_stage1_branch, check_witness, find_redundancy, stage1_fixpoint, ReducibilityWitness,
};
use crate::sampling::sample_inputs;

/// Segments whose endpoints coincide within this bound are pruned.
pub const WAYPOINT_PRUNE_EPS: f64 = 1e-15;

/// An ordered sequence of same-shape waypoints; each segment is the
/// componentwise linear interpolation of its endpoints. Consecutive
/// waypoints are distinct after construction-time pruning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PiecewiseLinearPath {
    waypoints: Vec<Parameter>,
}

impl PiecewiseLinearPath {
    /// Build a path from explicit waypoints, validating shape consistency
    /// and pruning degenerate segments.
    pub fn new(waypoints: Vec<Parameter>) -> Result<Self> {
        let Some(first) = waypoints.first() else {
            return Err(Error::InvalidArgument(
                "a path requires at least one waypoint".into(),
            ));
        };
        let shape = first.shape();
        if !waypoints.iter().all(|w| w.shape() == shape) {
            return Err(Error::ShapeMismatch(
                "all waypoints of a path must share a shape".into(),
            ));
        }
        Ok(Self::pruned(waypoints))
    }

    /// The trivial path standing at one parameter.
    pub fn single(w: Parameter) -> Self {
        PiecewiseLinearPath { waypoints: vec![w] }
    }

    pub(crate) fn pruned(waypoints: Vec<Parameter>) -> Self {
        debug_assert!(!waypoints.is_empty());
        let last_original = waypoints.last().cloned();
        let mut kept: Vec<Parameter> = Vec::with_capacity(waypoints.len());
        for wp in waypoints {
            match kept.last() {
                Some(prev) if prev.max_component_diff(&wp) <= WAYPOINT_PRUNE_EPS => {}
                _ => kept.push(wp),
            }
        }
        // Pruning may drop the exact final waypoint in favour of a
        // within-epsilon predecessor; restore it so endpoints are exact.
        if kept.len() > 1 {
            let last = last_original.expect("non-empty");
            if kept.last() != Some(&last) {
                *kept.last_mut().expect("non-empty") = last;
            }
        }
        PiecewiseLinearPath { waypoints: kept }
    }

    pub fn waypoints(&self) -> &[Parameter] {
        &self.waypoints
    }

    pub fn segment_count(&self) -> usize {
        self.waypoints.len() - 1
    }

    pub fn start(&self) -> &Parameter {
        self.waypoints.first().expect("paths are non-empty")
    }

    pub fn end(&self) -> &Parameter {
        self.waypoints.last().expect("paths are non-empty")
    }

    /// Point on segment `segment` at interpolation parameter `t` in [0, 1].
    pub fn point_at(&self, segment: usize, t: f64) -> Parameter {
        self.waypoints[segment].lerp(&self.waypoints[segment + 1], t)
    }
}

/// Result of sampling a path against a reference function.
#[derive(Debug, Clone, PartialEq)]
pub struct PathVerificationReport {
    pub ok: bool,
    /// Worst absolute function deviation over all sampled (segment, t, x).
    pub max_deviation: f64,
    pub worst_segment: usize,
    /// Effective number of t-samples per segment (always odd, so the
    /// midpoint t = 0.5 is included along with the endpoints).
    pub samples_per_segment: usize,
    pub segment_deviations: Vec<f64>,
}

/// Path file format shared with the CLI: the reference parameter whose
/// function the path must preserve, plus the waypoint list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathFile {
    pub reference: Parameter,
    pub waypoints: Vec<Parameter>,
}

impl PathFile {
    pub fn new(reference: Parameter, path: &PiecewiseLinearPath) -> Self {
        PathFile {
            reference,
            waypoints: path.waypoints().to_vec(),
        }
    }

    pub fn path(&self) -> Result<PiecewiseLinearPath> {
        let path = PiecewiseLinearPath::new(self.waypoints.clone())?;
        if path.start().shape() != self.reference.shape() {
            return Err(Error::ShapeMismatch(
                "waypoints do not match the reference parameter's shape".into(),
            ));
        }
        Ok(path)
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

fn lowest_blank(w: &Parameter, tol: &ToleranceConfig, exclude: &[usize]) -> Option<usize> {
    (0..w.hidden_count())
        .find(|&k| !exclude.contains(&k) && w.unit(k).is_blank(tol.weight_tol))
}

/// Raw waypoints of the blank-exchange manoeuvre: load unit `k`'s incoming
/// weights, transfer the outgoing weight, then clear unit `i`'s incoming
/// weights. Includes the starting parameter; three segments before pruning.
fn blank_exchange_waypoints(w: &Parameter, i: usize, k: usize, negate: bool) -> Vec<Parameter> {
    let s = if negate { -1.0 } else { 1.0 };

    let mut wp1 = w.clone();
    wp1.units[k].incoming = w.unit(i).incoming.iter().map(|v| s * v).collect();
    wp1.units[k].bias = s * w.unit(i).bias;

    let mut wp2 = wp1.clone();
    wp2.units[k].outgoing = wp1.unit(i).outgoing.iter().map(|v| s * v).collect();
    wp2.units[i].outgoing.iter_mut().for_each(|v| *v = 0.0);

    let mut wp3 = wp2.clone();
    wp3.units[i].incoming.iter_mut().for_each(|v| *v = 0.0);
    wp3.units[i].bias = 0.0;

    vec![w.clone(), wp1, wp2, wp3]
}

/// Move unit `i`'s weights into the blank unit `k` (negating them in
/// transit when `negate` is set), leaving unit `i` blank. Three segments;
/// every point implements the same function as `w`.
pub fn blank_exchange_path(
    w: &Parameter,
    i: usize,
    k: usize,
    negate: bool,
    tol: &ToleranceConfig,
) -> Result<PiecewiseLinearPath> {
    index_ok(w, i)?;
    index_ok(w, k)?;
    if i == k {
        return Err(Error::IndicesEqual(i));
    }
    if !w.unit(k).is_blank(tol.weight_tol) {
        return Err(Error::NotBlank(k));
    }
    Ok(PiecewiseLinearPath::pruned(blank_exchange_waypoints(
        w, i, k, negate,
    )))
}

fn negation_waypoints(w: &Parameter, i: usize, k: usize) -> Vec<Parameter> {
    let mut wps = blank_exchange_waypoints(w, i, k, false);
    let moved = wps.last().expect("non-empty").clone();
    wps.extend(blank_exchange_waypoints(&moved, k, i, true).into_iter().skip(1));
    wps
}

/// Negate unit `i` through the blank unit `k`: a blank-exchange followed by
/// a negative blank-exchange back. Six segments.
pub fn negation_path(
    w: &Parameter,
    i: usize,
    k: usize,
    tol: &ToleranceConfig,
) -> Result<PiecewiseLinearPath> {
    index_ok(w, i)?;
    index_ok(w, k)?;
    if i == k {
        return Err(Error::IndicesEqual(i));
    }
    if !w.unit(k).is_blank(tol.weight_tol) {
        return Err(Error::NotBlank(k));
    }
    Ok(PiecewiseLinearPath::pruned(negation_waypoints(w, i, k)))
}

fn transposition_waypoints(
    w: &Parameter,
    i: usize,
    j: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<Parameter>> {
    let blank_i = w.unit(i).is_blank(tol.weight_tol);
    let blank_j = w.unit(j).is_blank(tol.weight_tol);
    if blank_j {
        return Ok(blank_exchange_waypoints(w, i, j, false));
    }
    if blank_i {
        return Ok(blank_exchange_waypoints(w, j, i, false));
    }
    let k = lowest_blank(w, tol, &[i, j]).ok_or_else(|| {
        Error::InvalidArgument(
            "transposing two non-blank units requires a spare blank unit".into(),
        )
    })?;
    // Park unit i in k, move j into i, then retrieve i's weights into j.
    let mut wps = blank_exchange_waypoints(w, i, k, false);
    let step1 = wps.last().expect("non-empty").clone();
    wps.extend(blank_exchange_waypoints(&step1, j, i, false).into_iter().skip(1));
    let step2 = wps.last().expect("non-empty").clone();
    wps.extend(blank_exchange_waypoints(&step2, k, j, false).into_iter().skip(1));
    Ok(wps)
}

/// Swap the weight triples of units `i` and `j` along an equal-function
/// path: three segments when one of them is blank, nine otherwise (using
/// the lowest-index spare blank unit as temporary storage).
pub fn transposition_path(
    w: &Parameter,
    i: usize,
    j: usize,
    tol: &ToleranceConfig,
) -> Result<PiecewiseLinearPath> {
    index_ok(w, i)?;
    index_ok(w, j)?;
    if i == j {
        return Err(Error::IndicesEqual(i));
    }
    Ok(PiecewiseLinearPath::pruned(transposition_waypoints(
        w, i, j, tol,
    )?))
}

fn reduction_waypoints(w: &Parameter, witness: &ReducibilityWitness) -> Vec<Parameter> {
    let end = apply_stage1_branch(w, witness);
    match *witness {
        ReducibilityWitness::ZeroOutgoing { .. } => vec![w.clone(), end],
        ReducibilityWitness::ZeroIncoming { unit } => {
            let mut mid = w.clone();
            let act = mid.units[unit].bias.tanh();
            let outgoing = mid.units[unit].outgoing.clone();
            for (d, a) in mid.output_bias.iter_mut().zip(&outgoing) {
                *d += a * act;
            }
            mid.units[unit].outgoing.iter_mut().for_each(|v| *v = 0.0);
            vec![w.clone(), mid, end]
        }
        ReducibilityWitness::Duplicate { unit, partner } => {
            let mut mid = w.clone();
            let absorbed = mid.units[unit].outgoing.clone();
            for (a, v) in mid.units[partner].outgoing.iter_mut().zip(&absorbed) {
                *a += v;
            }
            mid.units[unit].outgoing.iter_mut().for_each(|v| *v = 0.0);
            vec![w.clone(), mid, end]
        }
        ReducibilityWitness::Negated { unit, partner } => {
            let mut mid = w.clone();
            let absorbed = mid.units[unit].outgoing.clone();
            for (a, v) in mid.units[partner].outgoing.iter_mut().zip(&absorbed) {
                *a -= v;
            }
            mid.units[unit].outgoing.iter_mut().for_each(|v| *v = 0.0);
            vec![w.clone(), mid, end]
        }
    }
}

/// Equal-function path realising one in-place reduction step. A zero
/// outgoing weight takes a single segment; the other conditions first move
/// the outgoing weight mass (folding constants into the output bias, or
/// merging into the partner), then clear the incoming weights and bias.
/// The endpoint equals the in-place reduction of `w` by `witness`.
pub fn reduction_subpath(
    w: &Parameter,
    witness: &ReducibilityWitness,
    tol: &ToleranceConfig,
) -> Result<PiecewiseLinearPath> {
    check_witness(w, witness, tol)?;
    Ok(PiecewiseLinearPath::pruned(reduction_waypoints(w, witness)))
}

fn append_segments(waypoints: &mut Vec<Parameter>, mut gadget: Vec<Parameter>) {
    debug_assert!(waypoints.last() == gadget.first(), "gadget must start at the current parameter");
    waypoints.extend(gadget.drain(1..));
}

/// Connect a reducible parameter to its canonical form by an equal-function
/// path: reduction sub-paths to the stage-1 fixpoint, a six-segment
/// negation gadget per sign flip, and transposition gadgets realising the
/// sort permutation. Irreducible parameters are rejected: their classes are
/// discrete.
pub fn path_to_canonical(w: &Parameter, tol: &ToleranceConfig) -> Result<PiecewiseLinearPath> {
    let h = w.hidden_count();
    let mut waypoints = vec![w.clone()];
    let mut cur = w.clone();
    let mut zeroed = BTreeSet::new();

    while let Some(witness) = find_redundancy(&cur, &zeroed, tol) {
        append_segments(&mut waypoints, reduction_waypoints(&cur, &witness));
        cur = waypoints.last().expect("non-empty").clone();
        zeroed.insert(witness.unit());
    }
    if zeroed.is_empty() {
        return Err(Error::DiscreteClass);
    }

    for i in 0..h {
        if zeroed.contains(&i) || lex_sign(&cur.unit(i).incoming) >= 0 {
            continue;
        }
        let k = lowest_blank(&cur, tol, &[i])
            .expect("a reduced parameter with a zeroed unit has a blank unit");
        append_segments(&mut waypoints, negation_waypoints(&cur, i, k));
        cur = waypoints.last().expect("non-empty").clone();
    }

    let order = sort_order(&cur);
    let mut at: Vec<usize> = (0..h).collect();
    for pos in 0..h {
        let want = order[pos];
        let src = at.iter().position(|&o| o == want).expect("permutation");
        if src == pos {
            continue;
        }
        append_segments(&mut waypoints, transposition_waypoints(&cur, pos, src, tol)?);
        cur = waypoints.last().expect("non-empty").clone();
        at.swap(pos, src);
    }

    debug_assert!(
        cur.allclose(&canonicalize(w, tol).canonical, 1e-9),
        "path endpoint must reach the canonical form"
    );
    Ok(PiecewiseLinearPath::pruned(waypoints))
}

/// Connect two equivalent reducible parameters through the shared canonical
/// form. Endpoints reproduce `w` and `w2` exactly. For irreducible inputs
/// the class is discrete: only the trivial path `w == w2` exists.
pub fn connect(w: &Parameter, w2: &Parameter, tol: &ToleranceConfig) -> Result<PiecewiseLinearPath> {
    if !equivalent(w, w2, tol)? {
        return Err(Error::NotEquivalent);
    }
    let (_, zeroed) = stage1_fixpoint(w, tol);
    if zeroed.is_empty() {
        if w.allclose(w2, tol.weight_tol) {
            return Ok(PiecewiseLinearPath::single(w.clone()));
        }
        return Err(Error::DiscreteClass);
    }
    let forward = path_to_canonical(w, tol)?;
    let back = path_to_canonical(w2, tol)?;
    let mut waypoints = forward.waypoints().to_vec();
    waypoints.extend(back.waypoints().iter().rev().cloned());
    Ok(PiecewiseLinearPath::pruned(waypoints))
}

/// Connect two equivalent parameters with at most seven segments, provided
/// the rank is at most half the hidden-unit count.
///
/// The construction jumps the outgoing weights and output bias to their
/// reduced values, parks the units shared by both reduced supports in spare
/// blank units, loads the second parameter's reduced incoming weights,
/// shifts the outgoing weights across, and reverses the reduction on the
/// other side. Degenerate segments are pruned.
pub fn seven_segment_path(
    w: &Parameter,
    w2: &Parameter,
    tol: &ToleranceConfig,
) -> Result<PiecewiseLinearPath> {
    if !equivalent(w, w2, tol)? {
        return Err(Error::NotEquivalent);
    }
    if w == w2 {
        return Ok(PiecewiseLinearPath::single(w.clone()));
    }
    let h = w.hidden_count();
    let (u, z) = stage1_fixpoint(w, tol);
    let (u2, z2) = stage1_fixpoint(w2, tol);
    let r = h - z.len();
    let r2 = h - z2.len();
    if r != r2 {
        return Err(Error::RankMismatch(r, r2));
    }
    if 2 * r > h {
        return Err(Error::RankTooHigh { rank: r, h });
    }

    // Storage assignment: units live on both sides are parked in units
    // blank on both sides. The rank bound guarantees enough storage.
    let shared_live: Vec<usize> = (0..h).filter(|i| !z.contains(i) && !z2.contains(i)).collect();
    let shared_blank: Vec<usize> = (0..h).filter(|i| z.contains(i) && z2.contains(i)).collect();
    assert!(
        shared_live.len() <= shared_blank.len(),
        "rank <= h/2 must leave enough shared blank units for storage"
    );
    let pairs: Vec<(usize, usize)> = shared_live.iter().copied().zip(shared_blank.iter().copied()).collect();
    let in_storage: BTreeSet<usize> = pairs.iter().map(|&(_, j)| j).collect();

    // (1) Jump outgoing weights and output bias to the reduced values.
    let mut wp1 = w.clone();
    for i in 0..h {
        wp1.units[i].outgoing = u.unit(i).outgoing.clone();
    }
    wp1.output_bias = u.output_bias().to_vec();

    // (2) Load storage units with the incoming weights they will carry;
    // clear the remaining blank units' incoming weights.
    let mut wp2 = wp1.clone();
    for &(i, j) in &pairs {
        wp2.units[j].incoming = u.unit(i).incoming.clone();
        wp2.units[j].bias = u.unit(i).bias;
    }
    for &j in &z {
        if !in_storage.contains(&j) {
            wp2.units[j].incoming.iter_mut().for_each(|v| *v = 0.0);
            wp2.units[j].bias = 0.0;
        }
    }

    // (3) Shift the outgoing weights into storage.
    let mut wp3 = wp2.clone();
    for &(i, j) in &pairs {
        wp3.units[j].outgoing = u.unit(i).outgoing.clone();
        wp3.units[i].outgoing.iter_mut().for_each(|v| *v = 0.0);
    }

    // (4) Load the second side's reduced incoming weights on its live units.
    let mut wp4 = wp3.clone();
    for i in 0..h {
        if !z2.contains(&i) {
            wp4.units[i].incoming = u2.unit(i).incoming.clone();
            wp4.units[i].bias = u2.unit(i).bias;
        }
    }

    // (5) Shift all outgoing weights to the second side's reduced values.
    let mut wp5 = wp4.clone();
    for i in 0..h {
        wp5.units[i].outgoing = u2.unit(i).outgoing.clone();
    }

    // (6) Restore the second side's incoming weights on its blank units.
    let mut wp6 = wp5.clone();
    for &i in &z2 {
        wp6.units[i].incoming = w2.unit(i).incoming.clone();
        wp6.units[i].bias = w2.unit(i).bias;
    }

    // (7) Jump outgoing weights and output bias to the endpoint.
    let wp7 = w2.clone();
    debug_assert!(
        (0..h).all(|i| wp6.unit(i).incoming == wp7.unit(i).incoming && wp6.unit(i).bias == wp7.unit(i).bias),
        "the final segment only moves outgoing weights and the output bias"
    );

    Ok(PiecewiseLinearPath::pruned(vec![
        w.clone(),
        wp1,
        wp2,
        wp3,
        wp4,
        wp5,
        wp6,
        wp7,
    ]))
}

/// Sample every segment of `path` against `reference` at
/// `samples_per_segment` interpolation points (rounded up to an odd count
/// so t = 0, 0.5, 1 are always included) and `tol.sample_count` inputs.
/// The path passes when the worst deviation stays within `tol.func_tol`.
pub fn verify_path(
    path: &PiecewiseLinearPath,
    reference: &Parameter,
    tol: &ToleranceConfig,
    samples_per_segment: usize,
    seed: u64,
) -> Result<PathVerificationReport> {
    if path.start().shape() != reference.shape() {
        return Err(Error::ShapeMismatch(
            "path waypoints do not match the reference parameter's shape".into(),
        ));
    }
    let sps = {
        let at_least = samples_per_segment.max(3);
        if at_least % 2 == 0 {
            at_least + 1
        } else {
            at_least
        }
    };
    let ts: Vec<f64> = (0..sps).map(|j| j as f64 / (sps - 1) as f64).collect();
    let inputs = sample_inputs(
        reference.input_dim(),
        tol.sample_count,
        tol.sample_radius,
        seed,
    );
    let ref_outputs: Vec<Vec<f64>> = inputs
        .iter()
        .map(|x| reference.evaluate(x))
        .collect::<Result<_>>()?;

    let segment_count = path.segment_count().max(1);
    let mut segment_deviations = vec![0.0f64; segment_count];
    for (s, seg_dev) in segment_deviations.iter_mut().enumerate() {
        for &t in &ts {
            let point = if path.segment_count() == 0 {
                path.start().clone()
            } else {
                path.point_at(s, t)
            };
            for (x, y_ref) in inputs.iter().zip(&ref_outputs) {
                let y = point.evaluate(x)?;
                let dev = y
                    .iter()
                    .zip(y_ref)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if dev > *seg_dev {
                    *seg_dev = dev;
                }
            }
            if path.segment_count() == 0 {
                break;
            }
        }
    }

    let (worst_segment, &max_deviation) = segment_deviations
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.partial_cmp(b).expect("finite deviations"))
        .expect("at least one segment");
    Ok(PathVerificationReport {
        ok: max_deviation <= tol.func_tol,
        max_deviation,
        worst_segment,
        samples_per_segment: sps,
        segment_deviations,
    })
}
