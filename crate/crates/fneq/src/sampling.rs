//! Deterministic input sampling for function comparison.
//!
//! Inputs come from a seeded additive low-discrepancy sequence rather than
//! i.i.d. draws, alternating between the full sampling radius (tanh
//! saturation) and the unit cube (the active region near the origin).

/// Generate `count` inputs in `[-radius, radius]^n`, deterministic in `seed`.
///
/// Even-indexed points use the full radius, odd-indexed points are confined
/// to `[-min(radius, 1), min(radius, 1)]^n`.
pub(crate) fn sample_inputs(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let alphas = weyl_alphas(n);
    let mut state = seed;
    let shifts: Vec<f64> = (0..n).map(|_| unit_float(splitmix64(&mut state))).collect();
    let near = radius.min(1.0);
    (0..count)
        .map(|k| {
            let scale = if k % 2 == 0 { radius } else { near };
            (0..n)
                .map(|j| {
                    let u = (shifts[j] + (k as f64 + 1.0) * alphas[j]).fract();
                    (2.0 * u - 1.0) * scale
                })
                .collect()
        })
        .collect()
}

/// Irrational step sizes from the generalised golden ratio: the positive
/// root of `x^(n+1) = x + 1`.
fn weyl_alphas(n: usize) -> Vec<f64> {
    let exponent = 1.0 / (n as f64 + 1.0);
    let mut g = 1.5f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(exponent);
    }
    (1..=n).map(|j| (1.0 / g.powi(j as i32)).fract()).collect()
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit_float(bits: u64) -> f64 {
    (bits >> 11) as f64 / (1u64 << 53) as f64
}
