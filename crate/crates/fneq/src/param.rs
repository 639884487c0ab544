//! Parameter representation and evaluation for single-hidden-layer tanh
//! networks, plus the tolerance configuration shared by every operation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::sample_inputs;

/// Architecture dimensions: `n` inputs, `m` outputs, `h` hidden units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub n: usize,
    pub m: usize,
    pub h: usize,
}

impl Shape {
    pub fn new(n: usize, m: usize, h: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::ShapeMismatch(format!(
                "input and output dimensions must be positive, got n = {n}, m = {m}"
            )));
        }
        Ok(Shape { n, m, h })
    }

    /// Number of scalar components in the flattened parameter vector.
    pub fn flat_len(&self) -> usize {
        (self.n + self.m + 1) * self.h + self.m
    }
}

/// One hidden unit: outgoing weight vector (length `m`), incoming weight
/// vector (length `n`), and a scalar bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenUnit {
    #[serde(rename = "a")]
    pub outgoing: Vec<f64>,
    #[serde(rename = "b")]
    pub incoming: Vec<f64>,
    #[serde(rename = "c")]
    pub bias: f64,
}

impl HiddenUnit {
    pub fn new(outgoing: Vec<f64>, incoming: Vec<f64>, bias: f64) -> Self {
        HiddenUnit {
            outgoing,
            incoming,
            bias,
        }
    }

    /// True when every component of the unit is within `tol` of zero.
    pub fn is_blank(&self, tol: f64) -> bool {
        self.outgoing.iter().all(|v| v.abs() <= tol)
            && self.incoming.iter().all(|v| v.abs() <= tol)
            && self.bias.abs() <= tol
    }

    pub(crate) fn negated(&self) -> HiddenUnit {
        HiddenUnit {
            outgoing: self.outgoing.iter().map(|v| -v).collect(),
            incoming: self.incoming.iter().map(|v| -v).collect(),
            bias: -self.bias,
        }
    }

    pub(crate) fn zero(n: usize, m: usize) -> HiddenUnit {
        HiddenUnit {
            outgoing: vec![0.0; m],
            incoming: vec![0.0; n],
            bias: 0.0,
        }
    }

    pub(crate) fn zero_out(&mut self) {
        self.outgoing.iter_mut().for_each(|v| *v = 0.0);
        self.incoming.iter_mut().for_each(|v| *v = 0.0);
        self.bias = 0.0;
    }
}

/// Weights and biases of one network.
///
/// The implemented function is
/// `f(x) = d + sum_i a_i * tanh(b_i . x + c_i)`,
/// where `a_i` is each unit's outgoing vector, `b_i` its incoming vector,
/// `c_i` its bias, and `d` the output bias vector.
///
/// Serialises to JSON as
/// `{"n":1,"m":1,"h":2,"units":[{"a":[...],"b":[...],"c":0.5},...],"d":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParameterRepr", into = "ParameterRepr")]
pub struct Parameter {
    pub(crate) shape: Shape,
    pub(crate) units: Vec<HiddenUnit>,
    pub(crate) output_bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ParameterRepr {
    n: usize,
    m: usize,
    h: usize,
    units: Vec<HiddenUnit>,
    d: Vec<f64>,
}

impl TryFrom<ParameterRepr> for Parameter {
    type Error = Error;

    fn try_from(repr: ParameterRepr) -> Result<Self> {
        if repr.h != repr.units.len() {
            return Err(Error::ShapeMismatch(format!(
                "field `h` is {} but {} units are present",
                repr.h,
                repr.units.len()
            )));
        }
        Parameter::new(repr.n, repr.m, repr.units, repr.d)
    }
}

impl From<Parameter> for ParameterRepr {
    fn from(p: Parameter) -> Self {
        ParameterRepr {
            n: p.shape.n,
            m: p.shape.m,
            h: p.shape.h,
            units: p.units,
            d: p.output_bias,
        }
    }
}

impl Parameter {
    /// Build a parameter, validating dimensions and finiteness.
    pub fn new(n: usize, m: usize, units: Vec<HiddenUnit>, output_bias: Vec<f64>) -> Result<Self> {
        let shape = Shape::new(n, m, units.len())?;
        if output_bias.len() != m {
            return Err(Error::LengthMismatch {
                context: "output bias `d`",
                expected: m,
                found: output_bias.len(),
            });
        }
        for unit in &units {
            if unit.outgoing.len() != m {
                return Err(Error::LengthMismatch {
                    context: "outgoing weights `a`",
                    expected: m,
                    found: unit.outgoing.len(),
                });
            }
            if unit.incoming.len() != n {
                return Err(Error::LengthMismatch {
                    context: "incoming weights `b`",
                    expected: n,
                    found: unit.incoming.len(),
                });
            }
            if !unit.outgoing.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite("outgoing weights `a`"));
            }
            if !unit.incoming.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite("incoming weights `b`"));
            }
            if !unit.bias.is_finite() {
                return Err(Error::NonFinite("unit bias `c`"));
            }
        }
        if !output_bias.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("output bias `d`"));
        }
        Ok(Parameter {
            shape,
            units,
            output_bias,
        })
    }

    /// Convenience constructor for the scalar case `n = m = 1`:
    /// units given as `(a, b, c)` triples.
    pub fn from_scalars(units: &[(f64, f64, f64)], d: f64) -> Parameter {
        let units = units
            .iter()
            .map(|&(a, b, c)| HiddenUnit::new(vec![a], vec![b], c))
            .collect();
        Parameter::new(1, 1, units, vec![d]).expect("scalar units are well-formed")
    }

    /// A hidden-layer-free network computing the constant `d`.
    pub fn constant(n: usize, output_bias: Vec<f64>) -> Result<Parameter> {
        let m = output_bias.len();
        Parameter::new(n, m, Vec::new(), output_bias)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn input_dim(&self) -> usize {
        self.shape.n
    }

    pub fn output_dim(&self) -> usize {
        self.shape.m
    }

    pub fn hidden_count(&self) -> usize {
        self.shape.h
    }

    pub fn units(&self) -> &[HiddenUnit] {
        &self.units
    }

    pub fn unit(&self, i: usize) -> &HiddenUnit {
        &self.units[i]
    }

    pub fn output_bias(&self) -> &[f64] {
        &self.output_bias
    }

    /// Evaluate the network at `x`.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.shape.n {
            return Err(Error::LengthMismatch {
                context: "input vector",
                expected: self.shape.n,
                found: x.len(),
            });
        }
        let mut out = self.output_bias.clone();
        for unit in &self.units {
            let pre: f64 = unit
                .incoming
                .iter()
                .zip(x)
                .map(|(b, xi)| b * xi)
                .sum::<f64>()
                + unit.bias;
            let act = pre.tanh();
            for (o, a) in out.iter_mut().zip(&unit.outgoing) {
                *o += a * act;
            }
        }
        Ok(out)
    }

    /// Flatten into the component order `(a_1, b_1, c_1, ..., a_h, b_h, c_h, d)`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.shape.flat_len());
        for unit in &self.units {
            flat.extend_from_slice(&unit.outgoing);
            flat.extend_from_slice(&unit.incoming);
            flat.push(unit.bias);
        }
        flat.extend_from_slice(&self.output_bias);
        flat
    }

    /// Rebuild from a flattened component vector.
    pub fn from_flat(n: usize, m: usize, h: usize, flat: &[f64]) -> Result<Parameter> {
        let shape = Shape::new(n, m, h)?;
        if flat.len() != shape.flat_len() {
            return Err(Error::LengthMismatch {
                context: "flattened parameter",
                expected: shape.flat_len(),
                found: flat.len(),
            });
        }
        let mut units = Vec::with_capacity(h);
        let mut pos = 0;
        for _ in 0..h {
            let outgoing = flat[pos..pos + m].to_vec();
            pos += m;
            let incoming = flat[pos..pos + n].to_vec();
            pos += n;
            let bias = flat[pos];
            pos += 1;
            units.push(HiddenUnit::new(outgoing, incoming, bias));
        }
        let output_bias = flat[pos..].to_vec();
        Parameter::new(n, m, units, output_bias)
    }

    /// Componentwise linear interpolation `(1 - t) * self + t * other`.
    ///
    /// Panics when shapes differ; interpolation is only meaningful between
    /// parameters of identical shape.
    pub fn lerp(&self, other: &Parameter, t: f64) -> Parameter {
        assert_eq!(self.shape, other.shape, "lerp requires identical shapes");
        let lerp1 = |a: f64, b: f64| (1.0 - t) * a + t * b;
        let units = self
            .units
            .iter()
            .zip(&other.units)
            .map(|(u, v)| HiddenUnit {
                outgoing: u
                    .outgoing
                    .iter()
                    .zip(&v.outgoing)
                    .map(|(&a, &b)| lerp1(a, b))
                    .collect(),
                incoming: u
                    .incoming
                    .iter()
                    .zip(&v.incoming)
                    .map(|(&a, &b)| lerp1(a, b))
                    .collect(),
                bias: lerp1(u.bias, v.bias),
            })
            .collect();
        let output_bias = self
            .output_bias
            .iter()
            .zip(&other.output_bias)
            .map(|(&a, &b)| lerp1(a, b))
            .collect();
        Parameter {
            shape: self.shape,
            units,
            output_bias,
        }
    }

    /// Largest absolute componentwise difference. Panics on shape mismatch.
    pub fn max_component_diff(&self, other: &Parameter) -> f64 {
        assert_eq!(self.shape, other.shape, "comparison requires identical shapes");
        self.flatten()
            .iter()
            .zip(other.flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// True when shapes match and all components agree within `tol`.
    pub fn allclose(&self, other: &Parameter, tol: f64) -> bool {
        self.shape == other.shape && self.max_component_diff(other) <= tol
    }
}

/// Comparison and sampling tolerances governing all approximate equality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Absolute tolerance for weight comparisons.
    pub weight_tol: f64,
    /// Absolute tolerance for function-value comparisons.
    pub func_tol: f64,
    /// Number of inputs sampled when comparing functions.
    pub sample_count: usize,
    /// Inputs are drawn from the hypercube `[-sample_radius, sample_radius]^n`.
    pub sample_radius: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            weight_tol: 1e-9,
            func_tol: 1e-7,
            sample_count: 128,
            sample_radius: 5.0,
        }
    }
}

/// Decide whether two parameters implement the same function, by sampling.
///
/// Inputs may differ in hidden-unit count but must agree in `n` and `m`.
/// Returns true iff the max-norm difference of the two outputs stays within
/// `tol.func_tol` on every sampled input. Deterministic given `seed`.
pub fn functions_equal(
    w: &Parameter,
    w2: &Parameter,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<bool> {
    if w.shape.n != w2.shape.n || w.shape.m != w2.shape.m {
        return Err(Error::ShapeMismatch(format!(
            "cannot compare functions with n = {}, m = {} against n = {}, m = {}",
            w.shape.n, w.shape.m, w2.shape.n, w2.shape.m
        )));
    }
    let inputs = sample_inputs(w.shape.n, tol.sample_count, tol.sample_radius, seed);
    for x in &inputs {
        let ya = w.evaluate(x)?;
        let yb = w2.evaluate(x)?;
        let dev = ya
            .iter()
            .zip(&yb)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if dev > tol.func_tol {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn vecs_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

pub(crate) fn vecs_neg_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x + y).abs() <= tol)
}
