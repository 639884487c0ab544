//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Tolerances and sample counts are pinned here; the tests fail rather than
//! loosen them.

use std::collections::BTreeSet;
use std::time::Instant;

use fneq::{
    apply_all, blank_exchange_path, canonicalize, enumerate_traces, equivalent, find_redundancy,
    functions_equal, in_class_bruteforce, lex_compare, lex_sign, negation_path, path_to_canonical,
    plant_redundancy, random_parameter, random_trace, random_transforms, random_with_rank, rank,
    reduce_once, reduction_subpath, sample_class_member, seven_segment_path, stage1_fixpoint,
    transposition_path, verify_path, CanonicalizationTrace, ConditionKind, Parameter, Shape,
    ToleranceConfig, UnitFate,
};

fn default_tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn pass(line: &str) {
    println!("acceptance: {line}: PASS");
}

/// Deterministic sweep over n, m in 1..=3, h in 0..=6, ranks 0..=h.
fn shape_rank_cases(count: usize) -> Vec<(Shape, usize, u64)> {
    let mut cases = Vec::with_capacity(count);
    let mut seed = 0u64;
    while cases.len() < count {
        for n in 1..=3usize {
            for m in 1..=3usize {
                for h in 0..=6usize {
                    for r in 0..=h {
                        if cases.len() == count {
                            return cases;
                        }
                        cases.push((Shape::new(n, m, h).unwrap(), r, seed));
                        seed += 1;
                    }
                }
            }
        }
    }
    cases
}

#[test]
fn criterion_1_canonicalization_soundness() {
    let started = Instant::now();
    let tol = default_tol();
    assert_eq!(tol.func_tol, 1e-7);
    assert_eq!(tol.sample_count, 128);

    for (shape, r, seed) in shape_rank_cases(1000) {
        let w = random_with_rank(shape, r, seed, &tol).expect("generation succeeds");
        let canonical = canonicalize(&w, &tol).canonical;
        assert!(
            functions_equal(&w, &canonical, &tol, seed ^ 0xABCD).unwrap(),
            "canonical form changed the function for shape {shape:?}, rank {r}, seed {seed}"
        );
    }

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "soundness sweep took {elapsed:?}, budget is 10 s"
    );
    pass("criterion 1: canonicalisation soundness on 1000 parameters");
}

#[test]
fn criterion_2_canonicalization_consistency() {
    let tol = default_tol();
    for (shape, r, seed) in shape_rank_cases(500) {
        let w = random_with_rank(shape, r, seed, &tol).expect("generation succeeds");
        let reference = canonicalize(&w, &tol).canonical;
        for k in 0..10u64 {
            let transforms = random_transforms(shape.h, 8, seed.wrapping_mul(10) + k);
            let moved = apply_all(&w, &transforms).unwrap();
            let canonical = canonicalize(&moved, &tol).canonical;
            let diff = reference.max_component_diff(&canonical);
            assert!(
                diff <= 1e-12,
                "canonical forms diverge by {diff} for shape {shape:?}, rank {r}, seed {seed}, composition {k}"
            );
        }
    }
    pass("criterion 2: canonical forms invariant under 500 x 10 transform compositions");
}

#[test]
fn criterion_3_class_membership_oracle_agreement() {
    let tol = default_tol();

    assert_eq!(enumerate_traces(1, 1).unwrap().len(), 2);
    assert_eq!(enumerate_traces(2, 2).unwrap().len(), 8);
    assert_eq!(enumerate_traces(2, 1).unwrap().len(), 20);

    let mut disagreements = 0usize;
    for i in 0..200u64 {
        let h = 1 + (i % 3) as usize;
        let r = ((i / 3) as usize) % (h + 1);
        let shape = Shape::new(1, 1, h).unwrap();
        let w = random_with_rank(shape, r, 1000 + i, &tol).expect("generation succeeds");
        let candidate = match i % 4 {
            0 => apply_all(&w, &random_transforms(h, 6, i)).unwrap(),
            1 => {
                let canonical = canonicalize(&w, &tol).canonical;
                let trace = random_trace(h, r, 2000 + i).unwrap();
                sample_class_member(&canonical, &trace, 3000 + i).unwrap()
            }
            2 => {
                let (reduced, _) = stage1_fixpoint(&w, &tol);
                apply_all(&reduced, &random_transforms(h, 4, 4000 + i)).unwrap()
            }
            _ => {
                let mut perturbed = w.clone();
                let mut bias = perturbed.output_bias().to_vec();
                bias[0] += 0.5;
                perturbed = Parameter::new(1, 1, perturbed.units().to_vec(), bias).unwrap();
                perturbed
            }
        };
        let expected = i % 4 != 3;
        let by_canonical = equivalent(&candidate, &w, &tol).unwrap();
        let by_bruteforce = in_class_bruteforce(&candidate, &w, &tol).unwrap();
        assert_eq!(
            by_canonical, expected,
            "canonical-form equivalence verdict wrong at case {i}"
        );
        if by_canonical != by_bruteforce {
            disagreements += 1;
        }
    }
    assert_eq!(disagreements, 0, "the two deciders must agree on every pair");
    pass("criterion 3: brute-force class membership agrees with canonical equivalence on 200 pairs");
}

#[test]
fn criterion_4_path_to_canonical_closure() {
    let tol = ToleranceConfig {
        sample_count: 64,
        ..default_tol()
    };
    let mut produced = 0usize;
    let mut i = 0u64;
    while produced < 200 {
        let h = 1 + (i % 5) as usize;
        let n = 1 + ((i / 5) % 3) as usize;
        let m = 1 + ((i / 15) % 3) as usize;
        let r = (i % h as u64) as usize; // r < h, so the parameter is reducible
        i += 1;
        let shape = Shape::new(n, m, h).unwrap();
        let w = random_with_rank(shape, r, 5000 + i, &tol).expect("generation succeeds");
        let path = path_to_canonical(&w, &tol).expect("reducible parameters are path-connected");
        let report = verify_path(&path, &w, &tol, 9, 6000 + i).unwrap();
        assert!(
            report.ok && report.max_deviation <= 1e-7,
            "path deviates by {} (segment {}) for shape {shape:?}, rank {r}",
            report.max_deviation,
            report.worst_segment
        );
        produced += 1;
    }
    pass("criterion 4: 200 canonicalisation paths verified within 1e-7");
}

#[test]
fn criterion_5_seven_segment_bound() {
    let tol = default_tol();
    for i in 0..100u64 {
        let h = [2usize, 4, 6][(i % 3) as usize];
        let r = (i as usize / 3) % (h / 2 + 1);
        let shape = Shape::new(1 + (i % 2) as usize, 1 + (i % 3) as usize, h).unwrap();
        let base = random_with_rank(shape, r, 7000 + i, &tol).expect("generation succeeds");
        let canonical = canonicalize(&base, &tol).canonical;

        let trace_a = random_trace(h, r, 7100 + i).unwrap();
        let w = sample_class_member(&canonical, &trace_a, 7200 + i).unwrap();
        let trace_b = random_trace(h, r, 7300 + i).unwrap();
        let member = sample_class_member(&canonical, &trace_b, 7400 + i).unwrap();
        let w2 = apply_all(&member, &random_transforms(h, 5, 7500 + i)).unwrap();
        assert_eq!(rank(&w, &tol), r, "sampled member must keep rank {r} at case {i}");

        let path = seven_segment_path(&w, &w2, &tol).expect("rank bound holds by construction");
        assert!(
            path.segment_count() <= 7,
            "got {} segments at case {i}",
            path.segment_count()
        );
        let report = verify_path(&path, &w, &tol, 9, 7600 + i).unwrap();
        assert!(
            report.ok && report.max_deviation <= 1e-7,
            "short path deviates by {} at case {i}",
            report.max_deviation
        );
        assert_eq!(path.start(), &w, "paths must start exactly at the first endpoint");
        assert_eq!(path.end(), &w2, "paths must end exactly at the second endpoint");
    }

    // A deliberately generic pair where every one of the seven segments
    // moves: both sides fold a unit into the output bias, merge a pair, and
    // disagree on signs and unit placement.
    let tolg = default_tol();
    let shape = Shape::new(2, 2, 4).unwrap();
    let base = random_with_rank(shape, 2, 424242, &tolg).unwrap();
    let canonical = canonicalize(&base, &tolg).canonical;
    let trace_w = CanonicalizationTrace {
        signs: vec![1, 1, 1, 1],
        fates: vec![
            UnitFate::Slot(0),
            UnitFate::Slot(0),
            UnitFate::Slot(1),
            UnitFate::OutputBias,
        ],
        order: 2,
    };
    let trace_w2 = CanonicalizationTrace {
        signs: vec![1, -1, 1, 1],
        fates: vec![
            UnitFate::OutputBias,
            UnitFate::Slot(1),
            UnitFate::Slot(0),
            UnitFate::Slot(0),
        ],
        order: 2,
    };
    let w = sample_class_member(&canonical, &trace_w, 11).unwrap();
    let w2 = sample_class_member(&canonical, &trace_w2, 13).unwrap();
    let path = seven_segment_path(&w, &w2, &tolg).unwrap();
    assert_eq!(
        path.segment_count(),
        7,
        "the generic construction uses all seven segments"
    );
    let report = verify_path(&path, &w, &tolg, 9, 17).unwrap();
    assert!(report.ok, "generic 7-segment path deviates by {}", report.max_deviation);

    pass("criterion 5: 100 short paths within 7 segments, verified at 1e-7");
}

#[test]
fn criterion_6_subpath_segment_budgets() {
    let tol = default_tol();

    // Blank-exchange manoeuvre: 3 segments.
    let shape = Shape::new(2, 3, 3).unwrap();
    let mut w = random_parameter(shape, 81);
    w = plant_redundancy(&w, ConditionKind::ZeroOutgoing, 2, None).unwrap();
    let (w, zeroed) = stage1_fixpoint(&w, &tol);
    assert_eq!(zeroed.len(), 1);
    let path = blank_exchange_path(&w, 0, 2, false, &tol).unwrap();
    assert_eq!(path.segment_count(), 3);
    let negative = blank_exchange_path(&w, 0, 2, true, &tol).unwrap();
    assert_eq!(negative.segment_count(), 3);

    // Stage-2 negation gadget: 6 segments.
    let gadget = negation_path(&w, 1, 2, &tol).unwrap();
    assert_eq!(gadget.segment_count(), 6);

    // Transposition of two non-blank units through a blank: 9 segments.
    let swap = transposition_path(&w, 0, 1, &tol).unwrap();
    assert_eq!(swap.segment_count(), 9);
    // With a blank side: 3 segments.
    let short_swap = transposition_path(&w, 0, 2, &tol).unwrap();
    assert_eq!(short_swap.segment_count(), 3);

    // Stage-1 reduction branches: 1 / 2 / 2 / 2 segments.
    let base = random_parameter(Shape::new(2, 2, 4).unwrap(), 82);
    let conditions = [
        (ConditionKind::ZeroOutgoing, None, 1usize),
        (ConditionKind::ZeroIncoming, None, 2),
        (ConditionKind::Duplicate, Some(2), 2),
        (ConditionKind::Negated, Some(3), 2),
    ];
    for (kind, partner, expected) in conditions {
        let planted = plant_redundancy(&base, kind, 0, partner).unwrap();
        let witness = find_redundancy(&planted, &BTreeSet::new(), &tol).unwrap();
        assert_eq!(witness.kind(), kind);
        let sub = reduction_subpath(&planted, &witness, &tol).unwrap();
        assert_eq!(
            sub.segment_count(),
            expected,
            "stage-1 branch ({}) segment budget",
            kind.label()
        );
        let report = verify_path(&sub, &planted, &tol, 9, 83).unwrap();
        assert!(report.ok);
    }

    pass("criterion 6: gadget segment budgets are exactly 3 / 6 / 9 / (1,2,2,2)");
}

#[test]
fn criterion_7_single_step_reductions_preserve_function() {
    let tol = ToleranceConfig {
        func_tol: 1e-9,
        ..default_tol()
    };
    assert_eq!(tol.sample_count, 128);
    for i in 0..100u64 {
        let n = 1 + (i % 3) as usize;
        let m = 1 + ((i / 3) % 3) as usize;
        let h = 2 + (i % 4) as usize;
        let base = random_parameter(Shape::new(n, m, h).unwrap(), 9000 + i);
        let unit = (i as usize) % h;
        let partner = (unit + 1 + (i as usize / h) % (h - 1)) % h;
        for kind in [
            ConditionKind::ZeroOutgoing,
            ConditionKind::ZeroIncoming,
            ConditionKind::Duplicate,
            ConditionKind::Negated,
        ] {
            let pair = match kind {
                ConditionKind::Duplicate | ConditionKind::Negated => Some(partner),
                _ => None,
            };
            let planted = plant_redundancy(&base, kind, unit, pair).unwrap();
            let witness = find_redundancy(&planted, &BTreeSet::new(), &tol).unwrap();
            assert_eq!(witness.kind(), kind, "instance {i} must witness condition ({})", kind.label());
            let reduced = reduce_once(&planted, &witness, &tol).unwrap();
            assert_eq!(reduced.hidden_count(), h - 1);
            assert!(
                functions_equal(&planted, &reduced, &tol, 9500 + i).unwrap(),
                "single-step reduction of condition ({}) changed the function at instance {i}",
                kind.label()
            );
        }
    }
    pass("criterion 7: all four single-step reductions preserve the function at 1e-9");
}

#[test]
fn criterion_8_lexicographic_total_order() {
    let vals = [-1.0f64, 0.0, 1.0];
    let mut grid = Vec::new();
    for &x in &vals {
        for &y in &vals {
            for &z in &vals {
                grid.push(vec![x, y, z]);
            }
        }
    }
    assert_eq!(grid.len(), 27);

    use std::cmp::Ordering;
    for u in &grid {
        assert_eq!(lex_compare(u, u).unwrap(), Ordering::Equal);
        let neg: Vec<f64> = u.iter().map(|a| -a).collect();
        assert_eq!(lex_sign(u), -lex_sign(&neg), "lex sign antisymmetry at {u:?}");
    }
    for u in &grid {
        for v in &grid {
            let uv = lex_compare(u, v).unwrap();
            let vu = lex_compare(v, u).unwrap();
            assert_eq!(uv, vu.reverse(), "antisymmetry at {u:?}, {v:?}");
            if uv == Ordering::Equal {
                assert_eq!(u, v, "distinct vectors must not compare equal");
            }
        }
    }
    for u in &grid {
        for v in &grid {
            for w in &grid {
                let uv = lex_compare(u, v).unwrap();
                let vw = lex_compare(v, w).unwrap();
                if uv != Ordering::Greater && vw != Ordering::Greater {
                    assert_ne!(
                        lex_compare(u, w).unwrap(),
                        Ordering::Greater,
                        "transitivity at {u:?}, {v:?}, {w:?}"
                    );
                }
            }
        }
    }
    pass("criterion 8: lexicographic order axioms hold exhaustively on the 27-vector grid");
}
