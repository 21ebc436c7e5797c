use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeff_ring::Scalar;
use crate::structure::{ChartModel, Differential, Relation, StructureModel};

use super::NumericError;

pub type CoeffFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type DomainFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;
type SamplerFn = Arc<dyn Fn(&mut ChaCha8Rng) -> Vec<f64> + Send + Sync>;

/// A chart given numerically: each 1-form as the list of its coefficients
/// on the coordinate differentials, each function as a value.
#[derive(Clone)]
pub struct NumericChart {
    name: String,
    coordinates: Vec<String>,
    oneforms: Vec<(String, CoeffFn)>,
    functions: Vec<(String, ScalarFn)>,
    domain: DomainFn,
    sampler: SamplerFn,
}

impl std::fmt::Debug for NumericChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NumericChart")
            .field("name", &self.name)
            .field("coordinates", &self.coordinates)
            .field("oneforms", &self.oneforms.iter().map(|(n, _)| n).collect::<Vec<_>>())
            .field("functions", &self.functions.iter().map(|(n, _)| n).collect::<Vec<_>>())
            .finish()
    }
}

impl NumericChart {
    pub fn new(
        name: impl Into<String>,
        coordinates: &[&str],
        domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
        sampler: impl Fn(&mut ChaCha8Rng) -> Vec<f64> + Send + Sync + 'static,
    ) -> NumericChart {
        NumericChart {
            name: name.into(),
            coordinates: coordinates.iter().map(|c| c.to_string()).collect(),
            oneforms: Vec::new(),
            functions: Vec::new(),
            domain: Arc::new(domain),
            sampler: Arc::new(sampler),
        }
    }

    pub fn oneform(
        mut self,
        name: impl Into<String>,
        coeffs: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> NumericChart {
        self.oneforms.push((name.into(), Arc::new(coeffs)));
        self
    }

    pub fn function(
        mut self,
        name: impl Into<String>,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> NumericChart {
        self.functions.push((name.into(), Arc::new(value)));
        self
    }

    /// Numeric mode of an exact chart: coefficients are evaluated in double
    /// precision and the chart's domain conditions are checked at each point.
    pub fn from_chart(
        chart: &ChartModel,
        sampler: impl Fn(&mut ChaCha8Rng) -> Vec<f64> + Send + Sync + 'static,
    ) -> NumericChart {
        let n = chart.coordinates().len();
        let constraints: Vec<(Scalar, Relation)> = chart
            .model()
            .constraints()
            .iter()
            .map(|c| (c.expr.clone(), c.relation))
            .collect();
        let coords: Vec<&str> = chart.coordinates().iter().map(String::as_str).collect();
        let mut out = NumericChart::new(
            chart.name(),
            &coords,
            move |x| {
                constraints.iter().all(|(e, r)| {
                    let v = e.eval_f64(x);
                    match r {
                        Relation::NonZero => v != 0.0 && v.is_finite(),
                        Relation::Positive => v > 0.0,
                    }
                })
            },
            sampler,
        );
        for (name, form) in chart.definitions() {
            let terms: Vec<(usize, Scalar)> = form
                .terms()
                .map(|(mi, c)| (mi.indices().next().expect("1-form term"), c.clone()))
                .collect();
            out = out.oneform(name.clone(), move |x| {
                let mut v = vec![0.0; n];
                for (k, c) in &terms {
                    v[*k] += c.eval_f64(x);
                }
                v
            });
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.coordinates.len() && x.iter().all(|v| v.is_finite()) && (self.domain)(x)
    }

    /// `n` points drawn from the chart's sampling box; the same seed gives
    /// the same points.
    pub fn sample_points(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Vec::with_capacity(n);
        while pts.len() < n {
            let p = (self.sampler)(&mut rng);
            if self.in_domain(&p) {
                pts.push(p);
            }
        }
        pts
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

/// CHART_GOURSAT in numeric mode, sampled on x ∈ (1.5, 2.5), y ∈ (−0.5, 0.5),
/// u, v ∈ (0.5, 1.5), s ∈ (−1, 1).
pub fn goursat_numeric(chart: &ChartModel) -> NumericChart {
    NumericChart::from_chart(chart, |rng| {
        vec![
            uniform(rng, 1.5, 2.5),
            uniform(rng, -0.5, 0.5),
            uniform(rng, 0.5, 1.5),
            uniform(rng, 0.5, 1.5),
            uniform(rng, -1.0, 1.0),
        ]
    })
}

/// The τ coframing with R, S on coordinates (x, y, z, α, f), x > y, S = e^α.
///
/// r = ln(2 cosh α + 2) − f and R = −(x−y)S e^f / ((x−y)e^f + S + 1); the
/// contact form is τ⁰ = e^{−r}(dz − p dx − q dy) with p = −(α + e^α),
/// q = ln(W + 1) − W − 1, W = e^{r+α}/((e^α + 1)(x − y)).
pub fn tau_numeric() -> NumericChart {
    fn parts(x: &[f64]) -> (f64, f64, f64, f64, f64) {
        let (d, a, f) = (x[0] - x[1], x[3], x[4]);
        let s = a.exp();
        let e = f.exp();
        let r = (2.0 * a.cosh() + 2.0).ln() - f;
        let rr = -d * s * e / (d * e + s + 1.0);
        (d, s, e, r, rr)
    }
    fn a_form(x: &[f64]) -> [f64; 5] {
        let (d, _, e, _, _) = parts(x);
        [-2.0 / d - e, -1.0 / (e * d * d), 0.0, 0.0, -1.0]
    }
    fn t2(x: &[f64]) -> [f64; 5] {
        let (d, s, e, _, rr) = parts(x);
        let a = x[3];
        let dr = [0.0, 0.0, 0.0, a.sinh() / (a.cosh() + 1.0), -1.0];
        let t1 = [e, 0.0, 0.0, 0.0, 0.0];
        let t3 = [0.0, 1.0 / (e * d * d), 0.0, 0.0, 0.0];
        let af = a_form(x);
        let mut out = [0.0; 5];
        for k in 0..5 {
            let b = dr[k] + (s / rr) * t1[k] - s * t3[k];
            out[k] = s * (b - af[k]) / (1.0 - s);
        }
        out
    }
    NumericChart::new(
        "chart_tau",
        &["x", "y", "z", "alpha", "f"],
        |x| {
            let (d, _, _, _, rr) = parts(x);
            d > 0.0 && x[3].abs() > 1e-3 && rr != 0.0 && rr != 1.0
        },
        |rng| {
            vec![
                uniform(rng, 1.2, 2.2),
                uniform(rng, -0.4, 0.4),
                uniform(rng, -1.0, 1.0),
                uniform(rng, 0.3, 1.2),
                uniform(rng, -0.4, 0.4),
            ]
        },
    )
    .oneform("t0", |x| {
        let (d, s, _, r, _) = parts(x);
        let a = x[3];
        let p = -(a + s);
        let w = (r + a).exp() / ((s + 1.0) * d);
        let q = w.ln_1p() - w - 1.0;
        let k = (-r).exp();
        vec![-k * p, -k * q, k, 0.0, 0.0]
    })
    .oneform("t1", |x| vec![x[4].exp(), 0.0, 0.0, 0.0, 0.0])
    .oneform("t2", |x| t2(x).to_vec())
    .oneform("t3", |x| {
        let (d, _, e, _, _) = parts(x);
        vec![0.0, 1.0 / (e * d * d), 0.0, 0.0, 0.0]
    })
    .oneform("t4", |x| {
        let af = a_form(x);
        let t = t2(x);
        (0..5).map(|k| af[k] - t[k]).collect()
    })
    .function("R", |x| parts(x).4)
    .function("S", |x| x[3].exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct FdOutcome {
    pub identity: String,
    pub max_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FdReport {
    pub chart: String,
    pub target: String,
    pub h: f64,
    pub tolerance: f64,
    pub points: usize,
    /// Largest deviation of a finite-difference d from its structure
    /// equation.
    pub max_error: f64,
    /// Largest finite-difference d of a structure-equation right side.
    pub max_d2: f64,
    pub outcomes: Vec<FdOutcome>,
    pub passed: bool,
}

// One rule of the target, with terms over indices into the chart's 1-forms.
struct Rule {
    identity: String,
    lhs: Lhs,
    terms: Vec<(Vec<usize>, Scalar)>,
}

enum Lhs {
    OneForm(usize),
    Function(usize),
}

struct Compiled<'a> {
    chart: &'a NumericChart,
    rules: Vec<Rule>,
    // chart function index for each target ring variable
    vars: Vec<usize>,
}

fn compile<'a>(chart: &'a NumericChart, target: &StructureModel) -> Result<Compiled<'a>, NumericError> {
    let basis = target.basis();
    if !basis.connection_names().is_empty() || !basis.opaque_names().is_empty() {
        return Err(NumericError::Model(format!(
            "`{}` is not an {{e}}-structure",
            target.name()
        )));
    }
    let mut form_index = Vec::new();
    for name in basis.coframe_names() {
        let i = chart
            .oneforms
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| NumericError::Model(format!("chart has no 1-form `{name}`")))?;
        form_index.push(i);
    }
    let vars = target
        .ring()
        .variables()
        .iter()
        .map(|v| {
            chart
                .functions
                .iter()
                .position(|(n, _)| n == v)
                .ok_or_else(|| NumericError::Model(format!("chart has no function `{v}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let terms = |f: &crate::exterior::Form| {
        f.terms()
            .map(|(mi, c)| (mi.indices().map(|i| form_index[i]).collect(), c.clone()))
            .collect()
    };
    let mut rules = Vec::new();
    for (name, form) in target.drules() {
        let k = basis.index(name).expect("rule for a basis form");
        rules.push(Rule {
            identity: format!("d {name}"),
            lhs: Lhs::OneForm(form_index[k]),
            terms: terms(form),
        });
    }
    for f in target.functions() {
        let Differential::Declared(form) = &f.differential else {
            return Err(NumericError::Model(format!("`{}` has no declared differential", f.name)));
        };
        let i = chart
            .functions
            .iter()
            .position(|(n, _)| *n == f.name)
            .ok_or_else(|| NumericError::Model(format!("chart has no function `{}`", f.name)))?;
        rules.push(Rule {
            identity: format!("d {}", f.name),
            lhs: Lhs::Function(i),
            terms: terms(form),
        });
    }
    Ok(Compiled { chart, rules, vars })
}

type Tensor = Vec<f64>;

impl Compiled<'_> {
    fn n(&self) -> usize {
        self.chart.coordinates.len()
    }

    fn check(&self, x: &[f64]) -> Result<(), NumericError> {
        if self.chart.in_domain(x) {
            Ok(())
        } else {
            Err(NumericError::Domain(format!(
                "point {x:?} is outside the domain of `{}`",
                self.chart.name
            )))
        }
    }

    /// Right side of a rule at `x`: a 1-form (length n) or a 2-form
    /// (n×n antisymmetric, row-major).
    fn rhs(&self, rule: &Rule, x: &[f64]) -> Tensor {
        let n = self.n();
        let forms: Vec<Vec<f64>> = self.chart.oneforms.iter().map(|(_, f)| f(x)).collect();
        let values: Vec<f64> = self.vars.iter().map(|&i| (self.chart.functions[i].1)(x)).collect();
        match rule.lhs {
            Lhs::Function(_) => {
                let mut out = vec![0.0; n];
                for (idx, c) in &rule.terms {
                    let c = c.eval_f64(&values);
                    for (o, v) in out.iter_mut().zip(&forms[idx[0]]) {
                        *o += c * v;
                    }
                }
                out
            }
            Lhs::OneForm(_) => {
                let mut out = vec![0.0; n * n];
                for (idx, c) in &rule.terms {
                    let c = c.eval_f64(&values);
                    let (a, b) = (&forms[idx[0]], &forms[idx[1]]);
                    for i in 0..n {
                        for j in 0..n {
                            out[i * n + j] += c * (a[i] * b[j] - a[j] * b[i]);
                        }
                    }
                }
                out
            }
        }
    }

    fn lhs_value(&self, rule: &Rule, x: &[f64]) -> Tensor {
        match rule.lhs {
            Lhs::OneForm(i) => (self.chart.oneforms[i].1)(x),
            Lhs::Function(i) => vec![(self.chart.functions[i].1)(x)],
        }
    }

    /// Central-difference partials ∂_a T for every coordinate a.
    fn partials(
        &self,
        x: &[f64],
        h: f64,
        eval: impl Fn(&[f64]) -> Tensor,
    ) -> Result<Vec<Tensor>, NumericError> {
        (0..self.n())
            .map(|a| {
                let mut plus = x.to_vec();
                let mut minus = x.to_vec();
                plus[a] += h;
                minus[a] -= h;
                self.check(&plus)?;
                self.check(&minus)?;
                let (p, m) = (eval(&plus), eval(&minus));
                Ok(p.iter().zip(&m).map(|(p, m)| (p - m) / (2.0 * h)).collect())
            })
            .collect()
    }

    /// Finite-difference d of the rule's left side, in the shape of its
    /// right side.
    fn d_lhs(&self, rule: &Rule, x: &[f64], h: f64) -> Result<Tensor, NumericError> {
        let n = self.n();
        let da = self.partials(x, h, |y| self.lhs_value(rule, y))?;
        Ok(match rule.lhs {
            Lhs::Function(_) => da.iter().map(|t| t[0]).collect(),
            Lhs::OneForm(_) => {
                let mut out = vec![0.0; n * n];
                for a in 0..n {
                    for b in 0..n {
                        out[a * n + b] = da[a][b] - da[b][a];
                    }
                }
                out
            }
        })
    }

    /// Finite-difference d of the rule's right side; zero for an exact chart.
    fn d_rhs(&self, rule: &Rule, x: &[f64], h: f64) -> Result<f64, NumericError> {
        let n = self.n();
        let da = self.partials(x, h, |y| self.rhs(rule, y))?;
        let mut worst: f64 = 0.0;
        match rule.lhs {
            Lhs::Function(_) => {
                for a in 0..n {
                    for b in a + 1..n {
                        worst = worst.max((da[a][b] - da[b][a]).abs());
                    }
                }
            }
            Lhs::OneForm(_) => {
                for a in 0..n {
                    for b in a + 1..n {
                        for c in b + 1..n {
                            let v = da[a][b * n + c] - da[b][a * n + c] + da[c][a * n + b];
                            worst = worst.max(v.abs());
                        }
                    }
                }
            }
        }
        Ok(worst)
    }

    fn at_point(&self, x: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>), NumericError> {
        self.check(x)?;
        let mut errs = Vec::with_capacity(self.rules.len());
        let mut d2 = Vec::with_capacity(self.rules.len());
        for rule in &self.rules {
            let lhs = self.d_lhs(rule, x, h)?;
            let rhs = self.rhs(rule, x);
            let e = lhs.iter().zip(&rhs).map(|(l, r)| (l - r).abs()).fold(0.0, f64::max);
            errs.push(e);
            d2.push(self.d_rhs(rule, x, h)?);
        }
        Ok((errs, d2))
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Compares central-difference exterior derivatives of the chart's 1-forms
/// and functions with the right sides of `target`'s structure equations at
/// every point, and also checks that each right side is numerically closed.
pub fn fd_closure_check(
    chart: &NumericChart,
    target: &StructureModel,
    points: &[Vec<f64>],
    h: f64,
    tolerance: f64,
) -> Result<FdReport, NumericError> {
    if !(h > 0.0) {
        return Err(NumericError::Domain(format!("step must be positive, got {h}")));
    }
    let compiled = compile(chart, target)?;
    let per_point = points
        .par_iter()
        .map(|x| compiled.at_point(x, h))
        .collect::<Result<Vec<_>, _>>()?;
    let k = compiled.rules.len();
    let mut errs = vec![0.0f64; k];
    let mut d2 = vec![0.0f64; k];
    for (e, d) in &per_point {
        for i in 0..k {
            errs[i] = nan_max(errs[i], e[i]);
            d2[i] = nan_max(d2[i], d[i]);
        }
    }
    let mut outcomes = Vec::with_capacity(2 * k);
    for (rule, e) in compiled.rules.iter().zip(&errs) {
        outcomes.push(FdOutcome {
            identity: rule.identity.clone(),
            max_error: *e,
            passed: *e <= tolerance,
        });
    }
    for (rule, e) in compiled.rules.iter().zip(&d2) {
        outcomes.push(FdOutcome {
            identity: format!("d({})", rule.identity),
            max_error: *e,
            passed: *e <= tolerance,
        });
    }
    let max_error = errs.iter().copied().fold(0.0, nan_max);
    let max_d2 = d2.iter().copied().fold(0.0, nan_max);
    Ok(FdReport {
        chart: chart.name.clone(),
        target: target.name().to_string(),
        h,
        tolerance,
        points: points.len(),
        max_error,
        max_d2,
        passed: outcomes.iter().all(|o| o.passed),
        outcomes,
    })
}

/// Ratio of the maximal structure-equation error at step h to that at h/2;
/// close to 4 for a second-order scheme once truncation dominates round-off.
pub fn convergence_factor(
    chart: &NumericChart,
    target: &StructureModel,
    points: &[Vec<f64>],
    h: f64,
) -> Result<f64, NumericError> {
    let coarse = fd_closure_check(chart, target, points, h, f64::INFINITY)?;
    let fine = fd_closure_check(chart, target, points, h / 2.0, f64::INFINITY)?;
    Ok(coarse.max_error / fine.max_error)
}
