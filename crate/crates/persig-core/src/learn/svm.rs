//! L1-regularized linear models by deterministic cyclic coordinate descent.
//!
//! Objective: `‖w‖₁ + C · Σᵢ loss(xᵢ, yᵢ)` with squared hinge loss for
//! classification and ε-insensitive absolute loss for regression. The bias
//! is unpenalized.
//!
//! Classification coordinates take a Newton step on the smooth part, soft
//! thresholded by the L1 term, then backtrack until sufficient decrease —
//! so the objective never increases. Regression coordinates minimize their
//! piecewise-linear 1D restriction exactly by a breakpoint scan, which is
//! monotone by construction. Iteration order is fixed and nothing is
//! randomized: identical inputs give bit-identical models.

use alloc::vec::Vec;

use super::matrix::ColMatrix;
use super::LearnError;

const LINE_SEARCH_SIGMA: f64 = 0.01;
const LINE_SEARCH_STEPS: usize = 40;
const CURVATURE_FLOOR: f64 = 1e-12;

/// One linear decision function.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    /// Raw decision value `w·x + b`.
    pub fn decision(&self, x: &[f64]) -> Result<f64, LearnError> {
        if x.len() != self.weights.len() {
            return Err(LearnError::DimError {
                expected: self.weights.len(),
                got: x.len(),
            });
        }
        let mut acc = self.bias;
        for (w, v) in self.weights.iter().zip(x) {
            if *w != 0.0 {
                acc += w * v;
            }
        }
        Ok(acc)
    }

    pub fn nonzero_weights(&self) -> usize {
        self.weights.iter().filter(|w| **w != 0.0).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub max_epochs: usize,
    /// Relative objective change below which training stops.
    pub tol: f64,
    /// Record the `(weights, bias)` iterate after every epoch; used by tests
    /// that recompute the objective independently.
    pub trace_iterates: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            max_epochs: 1000,
            tol: 1e-6,
            trace_iterates: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub model: LinearModel,
    /// Objective value at initialization and after every epoch.
    pub objective_trace: Vec<f64>,
    /// `(weights, bias)` matching `objective_trace`, when requested.
    pub iterates: Vec<(Vec<f64>, f64)>,
    pub epochs: usize,
}

fn validate_problem(x: &ColMatrix, targets: &[f64], c: f64) -> Result<(), LearnError> {
    if x.n_rows() != targets.len() {
        return Err(LearnError::DimError {
            expected: x.n_rows(),
            got: targets.len(),
        });
    }
    if x.n_rows() < 2 {
        return Err(LearnError::TooFewSamples);
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(LearnError::InvalidHyperparameter);
    }
    if !x.is_finite() || targets.iter().any(|t| !t.is_finite()) {
        return Err(LearnError::NonFiniteInput);
    }
    Ok(())
}

fn l1_norm(w: &[f64]) -> f64 {
    w.iter().map(|v| v.abs()).sum()
}

/// `‖w‖₁ + C · Σ max(0, 1 - yᵢ(w·xᵢ + b))²`.
pub fn squared_hinge_objective(x: &ColMatrix, y: &[f64], c: f64, w: &[f64], b: f64) -> f64 {
    let s = decision_values(x, w, b);
    let loss: f64 = y
        .iter()
        .zip(&s)
        .map(|(&yi, &si)| {
            let m = 1.0 - yi * si;
            if m > 0.0 {
                m * m
            } else {
                0.0
            }
        })
        .sum();
    l1_norm(w) + c * loss
}

/// `‖w‖₁ + C · Σ max(0, |yᵢ - (w·xᵢ + b)| - ε)`.
pub fn svr_objective(x: &ColMatrix, y: &[f64], c: f64, epsilon: f64, w: &[f64], b: f64) -> f64 {
    let s = decision_values(x, w, b);
    let loss: f64 = y
        .iter()
        .zip(&s)
        .map(|(&yi, &si)| ((yi - si).abs() - epsilon).max(0.0))
        .sum();
    l1_norm(w) + c * loss
}

fn decision_values(x: &ColMatrix, w: &[f64], b: f64) -> Vec<f64> {
    let mut s = alloc::vec![b; x.n_rows()];
    for (j, &wj) in w.iter().enumerate() {
        if wj == 0.0 {
            continue;
        }
        for (si, &xij) in s.iter_mut().zip(x.col(j)) {
            if xij != 0.0 {
                *si += wj * xij;
            }
        }
    }
    s
}

/// Trains the squared-hinge classifier. `y` must be -1/+1 with both classes
/// present.
pub fn train_squared_hinge(
    x: &ColMatrix,
    y: &[f64],
    c: f64,
    opts: &TrainOptions,
) -> Result<TrainResult, LearnError> {
    validate_problem(x, y, c)?;
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(LearnError::InvalidTarget);
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(LearnError::DegenerateLabels);
    }

    let (n, d) = (x.n_rows(), x.n_cols());
    let mut w = alloc::vec![0.0; d];
    let mut b = 0.0;
    let mut s = alloc::vec![0.0; n];

    let mut trace = Vec::new();
    let mut iterates = Vec::new();
    trace.push(squared_hinge_objective(x, y, c, &w, b));
    if opts.trace_iterates {
        iterates.push((w.clone(), b));
    }

    let mut epochs = 0;
    for _ in 0..opts.max_epochs {
        epochs += 1;
        for j in 0..d {
            let col = x.col(j);
            let mut g = 0.0;
            let mut h = 0.0;
            for i in 0..n {
                let xij = col[i];
                if xij == 0.0 {
                    continue;
                }
                let m = 1.0 - y[i] * s[i];
                if m > 0.0 {
                    g -= 2.0 * c * y[i] * xij * m;
                    h += 2.0 * c * xij * xij;
                }
            }
            let wj = w[j];
            if h == 0.0 && wj == 0.0 {
                continue;
            }
            let h = h.max(CURVATURE_FLOOR);
            // Newton direction for the L1 subproblem.
            let dir = if g + 1.0 <= h * wj {
                -(g + 1.0) / h
            } else if g - 1.0 >= h * wj {
                -(g - 1.0) / h
            } else {
                -wj
            };
            if dir == 0.0 {
                continue;
            }
            let descent = g * dir + (wj + dir).abs() - wj.abs();
            if descent >= 0.0 {
                continue;
            }
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..LINE_SEARCH_STEPS {
                let delta = lambda * dir;
                let mut change = (wj + delta).abs() - wj.abs();
                for i in 0..n {
                    let xij = col[i];
                    if xij == 0.0 {
                        continue;
                    }
                    let m_old = 1.0 - y[i] * s[i];
                    let m_new = m_old - y[i] * delta * xij;
                    let l_old = if m_old > 0.0 { m_old * m_old } else { 0.0 };
                    let l_new = if m_new > 0.0 { m_new * m_new } else { 0.0 };
                    change += c * (l_new - l_old);
                }
                if change <= LINE_SEARCH_SIGMA * lambda * descent {
                    accepted = Some(delta);
                    break;
                }
                lambda *= 0.5;
            }
            if let Some(delta) = accepted {
                w[j] = wj + delta;
                for (si, &xij) in s.iter_mut().zip(col) {
                    if xij != 0.0 {
                        *si += delta * xij;
                    }
                }
            }
        }

        // Bias step: plain Newton with backtracking, no penalty.
        let mut g = 0.0;
        let mut h = 0.0;
        for i in 0..n {
            let m = 1.0 - y[i] * s[i];
            if m > 0.0 {
                g -= 2.0 * c * y[i] * m;
                h += 2.0 * c;
            }
        }
        if g != 0.0 {
            let h = h.max(CURVATURE_FLOOR);
            let dir = -g / h;
            let descent = g * dir;
            let mut lambda = 1.0;
            for _ in 0..LINE_SEARCH_STEPS {
                let delta = lambda * dir;
                let mut change = 0.0;
                for i in 0..n {
                    let m_old = 1.0 - y[i] * s[i];
                    let m_new = m_old - y[i] * delta;
                    let l_old = if m_old > 0.0 { m_old * m_old } else { 0.0 };
                    let l_new = if m_new > 0.0 { m_new * m_new } else { 0.0 };
                    change += c * (l_new - l_old);
                }
                if change <= LINE_SEARCH_SIGMA * lambda * descent {
                    b += delta;
                    for si in s.iter_mut() {
                        *si += delta;
                    }
                    break;
                }
                lambda *= 0.5;
            }
        }

        // Resync decision values to kill incremental drift, then check
        // convergence on the exact objective.
        s = decision_values(x, &w, b);
        let obj = squared_hinge_objective(x, y, c, &w, b);
        let prev = *trace.last().expect("trace seeded");
        trace.push(obj);
        if opts.trace_iterates {
            iterates.push((w.clone(), b));
        }
        if (prev - obj).abs() <= opts.tol * prev.max(f64::MIN_POSITIVE) {
            break;
        }
    }

    Ok(TrainResult {
        model: LinearModel { weights: w, bias: b },
        objective_trace: trace,
        iterates,
        epochs,
    })
}

/// Exact minimizer of the convex piecewise-linear function
/// `pen·|w + δ| + C·Σ max(0, |rᵢ - δ·aᵢ| - ε)` over δ, by scanning its
/// breakpoints in order until the running slope turns nonnegative.
///
/// `terms` yields `(aᵢ, rᵢ)` for the samples with `aᵢ != 0`. Returns the
/// leftmost minimizer, which makes the sweep deterministic.
fn piecewise_linear_argmin(
    w: f64,
    pen: f64,
    c: f64,
    epsilon: f64,
    terms: impl Iterator<Item = (f64, f64)>,
    events: &mut Vec<(f64, f64)>,
) -> f64 {
    events.clear();
    let mut base_slope = -pen;
    if pen > 0.0 {
        events.push((-w, 2.0 * pen));
    }
    for (a, r) in terms {
        let jump = c * a.abs();
        base_slope -= jump;
        let p = (r - epsilon) / a;
        let q = (r + epsilon) / a;
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        events.push((lo, jump));
        events.push((hi, jump));
    }
    if events.is_empty() {
        return 0.0;
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut slope = base_slope;
    let mut best = events[events.len() - 1].0;
    for &(pos, jump) in events.iter() {
        slope += jump;
        if slope >= 0.0 {
            best = pos;
            break;
        }
    }
    best
}

/// Trains the ε-insensitive absolute-loss regressor.
pub fn train_svr(
    x: &ColMatrix,
    y: &[f64],
    c: f64,
    epsilon: f64,
    opts: &TrainOptions,
) -> Result<TrainResult, LearnError> {
    validate_problem(x, y, c)?;
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(LearnError::InvalidHyperparameter);
    }

    let (n, d) = (x.n_rows(), x.n_cols());
    let mut w = alloc::vec![0.0; d];
    let mut b = 0.0;
    // Residuals r = y - (w·x + b).
    let mut r: Vec<f64> = y.to_vec();
    let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * n + 1);

    let mut trace = Vec::new();
    let mut iterates = Vec::new();
    trace.push(svr_objective(x, y, c, epsilon, &w, b));
    if opts.trace_iterates {
        iterates.push((w.clone(), b));
    }

    let mut epochs = 0;
    for _ in 0..opts.max_epochs {
        epochs += 1;
        for j in 0..d {
            let col = x.col(j);
            // Cheap optimality test at δ = 0 before paying for the sort.
            if zero_is_optimal(w[j], 1.0, c, epsilon, col, &r) {
                continue;
            }
            let delta = piecewise_linear_argmin(
                w[j],
                1.0,
                c,
                epsilon,
                col.iter()
                    .zip(r.iter())
                    .filter(|(a, _)| **a != 0.0)
                    .map(|(&a, &ri)| (a, ri)),
                &mut events,
            );
            if delta != 0.0 {
                w[j] += delta;
                for (ri, &a) in r.iter_mut().zip(col) {
                    if a != 0.0 {
                        *ri -= delta * a;
                    }
                }
            }
        }

        // Bias: unpenalized exact step over the same breakpoint structure.
        let ones = alloc::vec![1.0; n];
        if !zero_is_optimal(0.0, 0.0, c, epsilon, &ones, &r) {
            let delta = piecewise_linear_argmin(
                0.0,
                0.0,
                c,
                epsilon,
                r.iter().map(|&ri| (1.0, ri)),
                &mut events,
            );
            if delta != 0.0 {
                b += delta;
                for ri in r.iter_mut() {
                    *ri -= delta;
                }
            }
        }

        // Resync residuals, then convergence check on the exact objective.
        let s = decision_values(x, &w, b);
        for (ri, (&yi, &si)) in r.iter_mut().zip(y.iter().zip(&s)) {
            *ri = yi - si;
        }
        let obj = svr_objective(x, y, c, epsilon, &w, b);
        let prev = *trace.last().expect("trace seeded");
        trace.push(obj);
        if opts.trace_iterates {
            iterates.push((w.clone(), b));
        }
        if (prev - obj).abs() <= opts.tol * prev.max(f64::MIN_POSITIVE) {
            break;
        }
    }

    Ok(TrainResult {
        model: LinearModel { weights: w, bias: b },
        objective_trace: trace,
        iterates,
        epochs,
    })
}

/// One-sided derivative test: δ = 0 minimizes the piecewise-linear
/// restriction iff the left derivative is ≤ 0 and the right derivative ≥ 0.
fn zero_is_optimal(w: f64, pen: f64, c: f64, epsilon: f64, col: &[f64], r: &[f64]) -> bool {
    let mut right = if w > 0.0 {
        pen
    } else if w < 0.0 {
        -pen
    } else {
        pen
    };
    let mut left = if w > 0.0 {
        pen
    } else if w < 0.0 {
        -pen
    } else {
        -pen
    };
    for (&a, &ri) in col.iter().zip(r) {
        if a == 0.0 {
            continue;
        }
        let excess = ri.abs() - epsilon;
        if excess > 0.0 {
            // Outside the tube: the loss term is locally linear.
            let slope = -c * a * if ri > 0.0 { 1.0 } else { -1.0 };
            right += slope;
            left += slope;
        } else if excess == 0.0 {
            // On the tube edge: only the growing side contributes.
            let slope = -c * a * if ri > 0.0 { 1.0 } else { -1.0 };
            right += slope.max(0.0);
            left += slope.min(0.0);
        }
    }
    left <= 0.0 && 0.0 <= right
}

/// Targets for the umbrella trainer.
pub enum TrainTargets<'a> {
    /// 0/1 class per sample; 1 is the positive class.
    Binary(&'a [usize]),
    /// Class index per sample plus the total class count; one-vs-rest.
    MultiClass {
        labels: &'a [usize],
        n_classes: usize,
    },
    Regression(&'a [f64]),
}

/// A trained task: binary, one-vs-rest, or regression.
#[derive(Debug, Clone, PartialEq)]
pub enum TaskModel {
    Binary(LinearModel),
    OneVsRest(Vec<LinearModel>),
    Regression(LinearModel),
}

/// Trains one-vs-rest models, one per class index.
pub fn train_one_vs_rest(
    x: &ColMatrix,
    labels: &[usize],
    n_classes: usize,
    c: f64,
    opts: &TrainOptions,
) -> Result<Vec<TrainResult>, LearnError> {
    if labels.iter().any(|&l| l >= n_classes) {
        return Err(LearnError::InvalidTarget);
    }
    let mut distinct = alloc::vec![false; n_classes];
    for &l in labels {
        distinct[l] = true;
    }
    if distinct.iter().filter(|d| **d).count() < 2 {
        return Err(LearnError::DegenerateLabels);
    }
    (0..n_classes)
        .map(|k| {
            let y: Vec<f64> = labels
                .iter()
                .map(|&l| if l == k { 1.0 } else { -1.0 })
                .collect();
            if y.iter().all(|&v| v == -1.0) {
                // Class absent from this training split: fit the constant
                // "never this class" scorer instead of erroring the fold.
                return Ok(TrainResult {
                    model: LinearModel {
                        weights: alloc::vec![0.0; x.n_cols()],
                        bias: -1.0,
                    },
                    objective_trace: alloc::vec![],
                    iterates: alloc::vec![],
                    epochs: 0,
                });
            }
            train_squared_hinge(x, &y, c, opts)
        })
        .collect()
}

/// Spec-level trainer: squared hinge for classification (one-vs-rest when
/// more than two classes), ε-insensitive absolute loss for regression.
pub fn train_l1_svm(
    x: &ColMatrix,
    targets: &TrainTargets<'_>,
    c: f64,
    epsilon: f64,
    opts: &TrainOptions,
) -> Result<TaskModel, LearnError> {
    match targets {
        TrainTargets::Binary(labels) => {
            if labels.iter().any(|&l| l > 1) {
                return Err(LearnError::InvalidTarget);
            }
            let y: Vec<f64> = labels
                .iter()
                .map(|&l| if l == 1 { 1.0 } else { -1.0 })
                .collect();
            if y.iter().all(|&v| v == y.first().copied().unwrap_or(1.0)) {
                return Err(LearnError::DegenerateLabels);
            }
            Ok(TaskModel::Binary(train_squared_hinge(x, &y, c, opts)?.model))
        }
        TrainTargets::MultiClass { labels, n_classes } => Ok(TaskModel::OneVsRest(
            train_one_vs_rest(x, labels, *n_classes, c, opts)?
                .into_iter()
                .map(|r| r.model)
                .collect(),
        )),
        TrainTargets::Regression(y) => {
            Ok(TaskModel::Regression(train_svr(x, y, c, epsilon, opts)?.model))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prediction {
    Class(usize),
    Score(f64),
}

/// Applies a trained task model.
///
/// Binary: decision value 0 maps to the positive class. One-vs-rest: argmax
/// of decision values, ties to the lowest class index. Regression: negative
/// raw scores are fixed to zero.
pub fn predict(model: &TaskModel, x: &[f64]) -> Result<Prediction, LearnError> {
    match model {
        TaskModel::Binary(m) => {
            let dv = m.decision(x)?;
            Ok(Prediction::Class(if dv >= 0.0 { 1 } else { 0 }))
        }
        TaskModel::OneVsRest(models) => {
            let mut best = 0usize;
            let mut best_dv = f64::NEG_INFINITY;
            for (k, m) in models.iter().enumerate() {
                let dv = m.decision(x)?;
                if dv > best_dv {
                    best_dv = dv;
                    best = k;
                }
            }
            Ok(Prediction::Class(best))
        }
        TaskModel::Regression(m) => Ok(Prediction::Score(m.decision(x)?.max(0.0))),
    }
}
