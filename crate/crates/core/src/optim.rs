//! BFGS quasi-Newton minimizer with a strong-Wolfe line search
//! (bracketing plus cubic-interpolation zoom).

use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig<S> {
    /// Infinity-norm gradient threshold.
    pub grad_tol: S,
    pub max_iters: usize,
    pub wolfe_c1: S,
    pub wolfe_c2: S,
    pub max_linesearch_steps: usize,
}

impl<S: Scalar> Default for OptimizerConfig<S> {
    fn default() -> Self {
        Self {
            grad_tol: S::lit(1e-8),
            max_iters: 1000,
            wolfe_c1: S::lit(1e-4),
            wolfe_c2: S::lit(0.9),
            max_linesearch_steps: 40,
        }
    }
}

impl<S: Scalar> OptimizerConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if !(S::zero() < self.wolfe_c1 && self.wolfe_c1 < self.wolfe_c2 && self.wolfe_c2 < S::one())
        {
            return Err(Error::InvalidConfig("need 0 < c1 < c2 < 1".into()));
        }
        if self.grad_tol <= S::zero() || self.max_iters == 0 {
            return Err(Error::InvalidConfig("grad_tol > 0 and max_iters >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationStatus {
    GradConverged,
    MaxIters,
    LineSearchFailed,
}

#[derive(Debug, Clone, Copy)]
pub struct IterationRecord<S> {
    pub iteration: usize,
    pub cost: S,
    pub grad_inf_norm: S,
    pub step_length: S,
}

#[derive(Debug, Clone)]
pub struct OptimizationTrace<S> {
    pub records: Vec<IterationRecord<S>>,
    pub status: TerminationStatus,
}

pub struct Minimum<S> {
    pub x: Vec<S>,
    pub cost: S,
    pub trace: OptimizationTrace<S>,
}

fn inf_norm<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |m, &x| m.max(x.abs()))
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Minimize `f` with gradient `g` from `x0`.
pub fn minimize<S, F, G>(mut f: F, mut g: G, x0: &[S], cfg: &OptimizerConfig<S>) -> Result<Minimum<S>>
where
    S: Scalar,
    F: FnMut(&[S]) -> S,
    G: FnMut(&[S]) -> Vec<S>,
{
    cfg.validate()?;
    let d = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut grad = g(&x);
    if !fx.is_finite() || grad.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("cost or gradient at x0".into()));
    }

    // inverse Hessian approximation, identity at start
    let mut h_inv: Vec<Vec<S>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect();
    let mut first_update = true;

    let mut records = Vec::new();
    let mut status = TerminationStatus::MaxIters;

    for iteration in 0..cfg.max_iters {
        let gnorm = inf_norm(&grad);
        if gnorm <= cfg.grad_tol {
            status = TerminationStatus::GradConverged;
            records.push(IterationRecord { iteration, cost: fx, grad_inf_norm: gnorm, step_length: S::zero() });
            break;
        }

        // p = -H g
        let p: Vec<S> = (0..d)
            .map(|i| -dot(&h_inv[i], &grad))
            .collect();
        let mut slope = dot(&grad, &p);
        let p = if slope >= S::zero() {
            // not a descent direction (stale curvature); restart on -g
            let p: Vec<S> = grad.iter().map(|&v| -v).collect();
            slope = dot(&grad, &p);
            for i in 0..d {
                for j in 0..d {
                    h_inv[i][j] = if i == j { S::one() } else { S::zero() };
                }
            }
            first_update = true;
            p
        } else {
            p
        };

        let alpha0 = if iteration == 0 {
            (S::one() / inf_norm(&grad).max(S::one())).min(S::one())
        } else {
            S::one()
        };

        let ls = strong_wolfe(&mut f, &mut g, &x, fx, &grad, &p, slope, alpha0, cfg);
        let (alpha, x_new, f_new, g_new) = match ls {
            Some(t) => t,
            None => {
                status = TerminationStatus::LineSearchFailed;
                records.push(IterationRecord { iteration, cost: fx, grad_inf_norm: gnorm, step_length: S::zero() });
                break;
            }
        };

        let s_vec: Vec<S> = x_new.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let y_vec: Vec<S> = g_new.iter().zip(&grad).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s_vec, &y_vec);
        let y_norm = dot(&y_vec, &y_vec).sqrt();
        let s_norm = dot(&s_vec, &s_vec).sqrt();

        // curvature safeguard: skip the update on near-zero s^T y
        if sy > S::lit(1e-10) * y_norm * s_norm {
            if first_update {
                let scale = sy / dot(&y_vec, &y_vec);
                for i in 0..d {
                    for j in 0..d {
                        h_inv[i][j] = if i == j { scale } else { S::zero() };
                    }
                }
                first_update = false;
            }
            bfgs_update(&mut h_inv, &s_vec, &y_vec, sy);
        }

        x = x_new;
        fx = f_new;
        grad = g_new;
        records.push(IterationRecord {
            iteration,
            cost: fx,
            grad_inf_norm: inf_norm(&grad),
            step_length: alpha,
        });
    }

    if status == TerminationStatus::MaxIters && inf_norm(&grad) <= cfg.grad_tol {
        status = TerminationStatus::GradConverged;
    }
    Ok(Minimum {
        x,
        cost: fx,
        trace: OptimizationTrace { records, status },
    })
}

/// Standard rank-two inverse-Hessian update.
fn bfgs_update<S: Scalar>(h: &mut [Vec<S>], s: &[S], y: &[S], sy: S) {
    let d = s.len();
    let rho = S::one() / sy;
    // hy = H y
    let hy: Vec<S> = (0..d).map(|i| dot(&h[i], y)).collect();
    let yhy = dot(y, &hy);
    let coeff = (S::one() + rho * yhy) * rho;
    for i in 0..d {
        for j in 0..d {
            h[i][j] = h[i][j] + coeff * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

type LineSearchResult<S> = Option<(S, Vec<S>, S, Vec<S>)>;

/// Strong-Wolfe line search along direction `p` (Nocedal-Wright style
/// bracketing then zoom with cubic interpolation).
#[allow(clippy::too_many_arguments)]
fn strong_wolfe<S, F, G>(
    f: &mut F,
    g: &mut G,
    x: &[S],
    f0: S,
    g0: &[S],
    p: &[S],
    slope0: S,
    alpha0: S,
    cfg: &OptimizerConfig<S>,
) -> LineSearchResult<S>
where
    S: Scalar,
    F: FnMut(&[S]) -> S,
    G: FnMut(&[S]) -> Vec<S>,
{
    let eval = |alpha: S, f: &mut F, g: &mut G| {
        let xt: Vec<S> = x.iter().zip(p).map(|(&xi, &pi)| xi + alpha * pi).collect();
        let ft = f(&xt);
        let gt = g(&xt);
        let st = dot(&gt, p);
        (xt, ft, gt, st)
    };

    let c1 = cfg.wolfe_c1;
    let c2 = cfg.wolfe_c2;
    let mut alpha_prev = S::zero();
    let mut f_prev = f0;
    let mut slope_prev = slope0;
    let mut alpha = alpha0;
    let alpha_max = S::lit(1e10);

    for i in 0..cfg.max_linesearch_steps {
        let (xt, ft, gt, st) = eval(alpha, f, g);
        if !ft.is_finite() {
            alpha = (alpha_prev + alpha) * S::lit(0.5);
            continue;
        }
        if ft > f0 + c1 * alpha * slope0 || (i > 0 && ft >= f_prev) {
            return zoom(f, g, x, f0, g0, p, slope0, alpha_prev, f_prev, slope_prev, alpha, ft, cfg);
        }
        if st.abs() <= -c2 * slope0 {
            return Some((alpha, xt, ft, gt));
        }
        if st >= S::zero() {
            return zoom(f, g, x, f0, g0, p, slope0, alpha, ft, st, alpha_prev, f_prev, cfg);
        }
        alpha_prev = alpha;
        f_prev = ft;
        slope_prev = st;
        alpha = (alpha * S::lit(2.0)).min(alpha_max);
    }
    None
}

/// Cubic-interpolation minimizer of the model through two endpoint values and
/// slopes; falls back to bisection when degenerate.
fn cubic_min<S: Scalar>(a: S, fa: S, sa: S, b: S, fb: S, sb: S) -> S {
    let d1 = sa + sb - S::lit(3.0) * (fa - fb) / (a - b);
    let disc = d1 * d1 - sa * sb;
    if disc >= S::zero() {
        let d2 = disc.sqrt() * if b > a { S::one() } else { -S::one() };
        let denom = sb - sa + S::lit(2.0) * d2;
        if denom.abs() > S::epsilon() {
            let t = b - (b - a) * ((sb + d2 - d1) / denom);
            let lo = a.min(b);
            let hi = a.max(b);
            if t > lo && t < hi {
                return t;
            }
        }
    }
    (a + b) * S::lit(0.5)
}

#[allow(clippy::too_many_arguments)]
fn zoom<S, F, G>(
    f: &mut F,
    g: &mut G,
    x: &[S],
    f0: S,
    _g0: &[S],
    p: &[S],
    slope0: S,
    mut alpha_lo: S,
    mut f_lo: S,
    mut slope_lo: S,
    mut alpha_hi: S,
    mut f_hi: S,
    cfg: &OptimizerConfig<S>,
) -> LineSearchResult<S>
where
    S: Scalar,
    F: FnMut(&[S]) -> S,
    G: FnMut(&[S]) -> Vec<S>,
{
    let c1 = cfg.wolfe_c1;
    let c2 = cfg.wolfe_c2;
    let mut slope_hi = S::nan();
    for _ in 0..cfg.max_linesearch_steps {
        let alpha = if slope_hi.is_finite() {
            cubic_min(alpha_lo, f_lo, slope_lo, alpha_hi, f_hi, slope_hi)
        } else {
            (alpha_lo + alpha_hi) * S::lit(0.5)
        };
        let width = (alpha_hi - alpha_lo).abs();
        if width < S::lit(1e-16) * (S::one() + alpha_lo.abs()) {
            break;
        }
        let xt: Vec<S> = x.iter().zip(p).map(|(&xi, &pi)| xi + alpha * pi).collect();
        let ft = f(&xt);
        let gt = g(&xt);
        let st = dot(&gt, p);
        if ft > f0 + c1 * alpha * slope0 || ft >= f_lo {
            alpha_hi = alpha;
            f_hi = ft;
            slope_hi = st;
        } else {
            if st.abs() <= -c2 * slope0 {
                return Some((alpha, xt, ft, gt));
            }
            if st * (alpha_hi - alpha_lo) >= S::zero() {
                alpha_hi = alpha_lo;
                f_hi = f_lo;
                slope_hi = slope_lo;
            }
            alpha_lo = alpha;
            f_lo = ft;
            slope_lo = st;
        }
    }
    // accept the best sufficient-decrease point found even if the curvature
    // condition was not certified
    if f_lo < f0 && alpha_lo > S::zero() {
        let xt: Vec<S> = x.iter().zip(p).map(|(&xi, &pi)| xi + alpha_lo * pi).collect();
        let ft = f(&xt);
        let gt = g(&xt);
        return Some((alpha_lo, xt, ft, gt));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn scalar_quadratic() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2);
        let g = |x: &[f64]| vec![2.0 * (x[0] - 3.0)];
        let m = minimize(f, g, &[0.0], &OptimizerConfig::default()).unwrap();
        assert_relative_eq!(m.x[0], 3.0, epsilon = 1e-8);
        assert!(m.trace.records.len() <= 6, "took {} iterations", m.trace.records.len());
        assert_eq!(m.trace.status, TerminationStatus::GradConverged);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let g = |x: &[f64]| {
            vec![
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ]
        };
        let m = minimize(f, g, &[-1.2, 1.0], &OptimizerConfig::default()).unwrap();
        assert_relative_eq!(m.x[0], 1.0, epsilon = 1e-6);
        assert_relative_eq!(m.x[1], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn one_qubit_te_cost() {
        // cost of the single-qubit Ry ansatz against I - X: 1 - sin(theta)
        let f = |x: &[f64]| 1.0 - x[0].sin();
        let g = |x: &[f64]| vec![-x[0].cos()];
        let m = minimize(f, g, &[0.1], &OptimizerConfig::default()).unwrap();
        assert_relative_eq!(m.x[0], std::f64::consts::FRAC_PI_2, epsilon = 1e-7);
        assert_relative_eq!(m.cost, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn accepted_costs_monotone() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let g = |x: &[f64]| {
            vec![
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ]
        };
        let m = minimize(f, g, &[-1.2, 1.0], &OptimizerConfig::default()).unwrap();
        for w in m.trace.records.windows(2) {
            assert!(w[1].cost <= w[0].cost + 1e-14, "cost increased: {:?}", w);
        }
    }

    #[test]
    fn scale_invariant_argmin() {
        let mk = |c: f64| {
            let f = move |x: &[f64]| c * ((x[0] - 2.0).powi(2) + 3.0 * (x[1] + 1.0).powi(2));
            let g = move |x: &[f64]| vec![c * 2.0 * (x[0] - 2.0), c * 6.0 * (x[1] + 1.0)];
            minimize(f, g, &[5.0, 5.0], &OptimizerConfig::default()).unwrap()
        };
        let a = mk(1.0);
        let b = mk(250.0);
        let tol = 10.0 * OptimizerConfig::<f64>::default().grad_tol;
        assert!((a.x[0] - b.x[0]).abs() < tol && (a.x[1] - b.x[1]).abs() < tol);
    }

    #[test]
    fn convex_quadratic_fast_convergence() {
        // d-dimensional diagonal quadratic with a near-exact line search:
        // a handful of iterations past the exact-search bound of d + 1
        let d = 4;
        let coef = [1.0, 3.0, 7.0, 0.5];
        let f = move |x: &[f64]| x.iter().zip(coef).map(|(xi, c)| c * xi * xi).sum::<f64>();
        let g = move |x: &[f64]| x.iter().zip(coef).map(|(xi, c)| 2.0 * c * xi).collect();
        let cfg = OptimizerConfig {
            wolfe_c2: 0.1,
            ..OptimizerConfig::default()
        };
        let m = minimize(f, g, &[1.0, -2.0, 0.5, 3.0], &cfg).unwrap();
        assert!(m.cost < 1e-12);
        let productive = m.trace.records.iter().filter(|r| r.step_length > 0.0).count();
        assert!(productive <= 3 * (d + 1), "took {productive} productive iterations");
    }

    #[test]
    fn non_finite_start_rejected() {
        let f = |_: &[f64]| f64::NAN;
        let g = |_: &[f64]| vec![0.0];
        assert!(minimize(f, g, &[0.0], &OptimizerConfig::default()).is_err());
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = OptimizerConfig { wolfe_c1: 0.95, ..OptimizerConfig::<f64>::default() };
        let f = |x: &[f64]| x[0] * x[0];
        let g = |x: &[f64]| vec![2.0 * x[0]];
        assert!(minimize(f, g, &[1.0], &cfg).is_err());
    }
}
