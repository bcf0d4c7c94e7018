//! Dense BFGS quasi-Newton minimizer with a strong-Wolfe line search.
//!
//! Written in-repo so model fitting carries no external solver
//! dependency. The parameter dimension of every model fitted by this
//! crate is small (tens), so a dense inverse-Hessian approximation is
//! simpler and more accurate than a limited-memory variant.

/// Stopping thresholds and line-search constants.
#[derive(Debug, Clone)]
pub struct BfgsOptions {
    /// Relative gradient threshold: stop when `|g|_∞ < grad_tol·(1+|f|)`.
    pub grad_tol: f64,
    /// Stop when the accepted step is shorter than this in sup norm.
    pub step_tol: f64,
    pub max_iter: usize,
    /// Armijo (sufficient decrease) constant.
    pub c1: f64,
    /// Curvature constant.
    pub c2: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-6,
            step_tol: 1e-12,
            max_iter: 500,
            c1: 1e-4,
            c2: 0.9,
        }
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GradTol,
    StepTol,
    MaxIter,
    LineSearchFail,
}

/// Final iterate and diagnostics of one minimization.
#[derive(Debug, Clone)]
pub struct OptimResult {
    pub theta: Vec<f64>,
    pub objective: f64,
    /// Sup norm of the gradient at the final iterate.
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Objective value at the start and after every accepted step.
    pub trace: Vec<f64>,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn is_finite_pair(f: f64, g: &[f64]) -> bool {
    f.is_finite() && g.iter().all(|v| v.is_finite())
}

/// One evaluated line-search point.
struct Probe {
    alpha: f64,
    x: Vec<f64>,
    f: f64,
    g: Vec<f64>,
    dphi: f64,
}

enum SearchOutcome {
    /// Both Wolfe conditions hold; iteration continues from here.
    Wolfe(Probe),
    /// Sufficient decrease was found but the curvature condition could
    /// not be met before the bracket collapsed; take the point and stop.
    BestEffort(Probe),
    Failed,
}

/// Minimizes `f_and_grad` from `x0` by BFGS.
///
/// The inverse-Hessian approximation starts at the identity and is
/// updated with the standard rank-two formula, skipping updates whose
/// curvature `yᵀs` is not safely positive. Non-finite trial values make
/// the line search backtrack; if no finite point is reachable the best
/// iterate so far is returned with `termination = LineSearchFail`.
pub fn bfgs_minimize<F>(mut f_and_grad: F, x0: &[f64], opts: &BfgsOptions) -> OptimResult
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let d = x0.len();
    let (f0, g0) = f_and_grad(x0);
    if !is_finite_pair(f0, &g0) {
        return OptimResult {
            theta: x0.to_vec(),
            objective: f0,
            grad_norm: inf_norm(&g0),
            iterations: 0,
            converged: false,
            termination: Termination::LineSearchFail,
            trace: vec![f0],
        };
    }
    if d == 0 {
        return OptimResult {
            theta: Vec::new(),
            objective: f0,
            grad_norm: 0.0,
            iterations: 0,
            converged: true,
            termination: Termination::GradTol,
            trace: vec![f0],
        };
    }

    let mut x = x0.to_vec();
    let mut f = f0;
    let mut g = g0;
    let mut trace = vec![f];
    // Row-major d×d inverse-Hessian approximation.
    let mut h = identity(d);
    let mut first_update = true;

    let finish = |x: Vec<f64>,
                  f: f64,
                  g: &[f64],
                  iterations: usize,
                  termination: Termination,
                  trace: Vec<f64>| {
        OptimResult {
            theta: x,
            objective: f,
            grad_norm: inf_norm(g),
            iterations,
            converged: matches!(termination, Termination::GradTol | Termination::StepTol),
            termination,
            trace,
        }
    };

    for iter in 0..opts.max_iter {
        if inf_norm(&g) < opts.grad_tol * (1.0 + f.abs()) {
            return finish(x, f, &g, iter, Termination::GradTol, trace);
        }

        let mut direction = neg_mat_vec(&h, &g, d);
        let mut dphi0 = dot(&g, &direction);
        if dphi0 >= 0.0 {
            // Numerical breakdown of H; restart from steepest descent.
            h = identity(d);
            direction = g.iter().map(|v| -v).collect();
            dphi0 = dot(&g, &direction);
        }

        let outcome = line_search(&mut f_and_grad, &x, f, &g, &direction, dphi0, opts);
        let (probe, wolfe_ok) = match outcome {
            SearchOutcome::Wolfe(p) => (p, true),
            SearchOutcome::BestEffort(p) => (p, false),
            SearchOutcome::Failed => {
                return finish(x, f, &g, iter, Termination::LineSearchFail, trace)
            }
        };

        debug_assert!(
            probe.f <= f + opts.c1 * probe.alpha * dphi0 + 1e-10 * (1.0 + f.abs()),
            "accepted step violates sufficient decrease"
        );
        if wolfe_ok {
            debug_assert!(
                probe.dphi >= opts.c2 * dphi0 - 1e-10 * dphi0.abs(),
                "accepted step violates curvature condition"
            );
        }

        let step: Vec<f64> = probe.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = probe.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let step_len = inf_norm(&step);
        x = probe.x;
        f = probe.f;
        g = probe.g;
        trace.push(f);

        if !wolfe_ok {
            return finish(x, f, &g, iter + 1, Termination::LineSearchFail, trace);
        }
        if step_len < opts.step_tol {
            return finish(x, f, &g, iter + 1, Termination::StepTol, trace);
        }

        let ys = dot(&y, &step);
        let guard = 1e-10 * dot(&y, &y).sqrt() * dot(&step, &step).sqrt();
        if ys > guard {
            if first_update {
                // Calibrate the unit initialization to the objective's
                // curvature scale before the first update; otherwise
                // badly scaled problems need hundreds of updates just to
                // learn the magnitude.
                let yy = dot(&y, &y);
                if yy > 0.0 {
                    let scale = ys / yy;
                    for v in h.iter_mut() {
                        *v *= scale;
                    }
                }
                first_update = false;
            }
            bfgs_update(&mut h, &step, &y, ys, d);
        }
    }
    finish(x, f, &g, opts.max_iter, Termination::MaxIter, trace)
}

fn identity(d: usize) -> Vec<f64> {
    let mut h = vec![0.0; d * d];
    for i in 0..d {
        h[i * d + i] = 1.0;
    }
    h
}

fn neg_mat_vec(h: &[f64], v: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d];
    for i in 0..d {
        out[i] = -dot(&h[i * d..(i + 1) * d], v);
    }
    out
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ` with `ρ = 1/yᵀs`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], ys: f64, d: usize) {
    let rho = 1.0 / ys;
    let mut hy = vec![0.0; d];
    for i in 0..d {
        hy[i] = dot(&h[i * d..(i + 1) * d], y);
    }
    let yhy = dot(y, &hy);
    let coef = rho * (1.0 + rho * yhy);
    for i in 0..d {
        for j in 0..d {
            h[i * d + j] +=
                coef * s[i] * s[j] - rho * (s[i] * hy[j] + hy[i] * s[j]);
        }
    }
}

const MAX_BRACKET: usize = 40;
const MAX_ZOOM: usize = 50;
const MAX_NONFINITE_BACKTRACKS: usize = 60;

fn line_search<F>(
    f_and_grad: &mut F,
    x: &[f64],
    f0: f64,
    _g0: &[f64],
    direction: &[f64],
    dphi0: f64,
    opts: &BfgsOptions,
) -> SearchOutcome
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut probe = |alpha: f64| -> Option<Probe> {
        let xa: Vec<f64> = x
            .iter()
            .zip(direction)
            .map(|(xi, di)| xi + alpha * di)
            .collect();
        let (fa, ga) = f_and_grad(&xa);
        if !is_finite_pair(fa, &ga) {
            return None;
        }
        let dphi = dot(&ga, direction);
        Some(Probe {
            alpha,
            x: xa,
            f: fa,
            g: ga,
            dphi,
        })
    };

    let armijo = |p: &Probe| p.f <= f0 + opts.c1 * p.alpha * dphi0;
    let strong_curvature = |p: &Probe| p.dphi.abs() <= -opts.c2 * dphi0;

    // Refine an acceptable point once by quadratic interpolation; exact
    // for quadratic objectives, a cheap improvement otherwise.
    let refine = |p: Probe,
                  probe: &mut dyn FnMut(f64) -> Option<Probe>|
     -> Probe {
        if p.dphi.abs() <= 1e-3 * dphi0.abs() {
            return p;
        }
        let denom = p.dphi - dphi0;
        if denom <= 0.0 {
            return p;
        }
        let alpha_q = p.alpha * -dphi0 / denom;
        if !(alpha_q.is_finite() && alpha_q > 0.0) {
            return p;
        }
        match probe(alpha_q) {
            Some(r)
                if r.f < p.f
                    && r.f <= f0 + opts.c1 * r.alpha * dphi0
                    && r.dphi.abs() <= -opts.c2 * dphi0 =>
            {
                r
            }
            _ => p,
        }
    };

    // Bracketing phase: grow alpha until the minimum is bracketed or a
    // strong-Wolfe point appears.
    let mut prev: Option<Probe> = None;
    let mut alpha = 1.0;
    let mut nonfinite = 0usize;
    let mut first = true;
    for _ in 0..MAX_BRACKET + MAX_NONFINITE_BACKTRACKS {
        let current = match probe(alpha) {
            Some(p) => p,
            None => {
                nonfinite += 1;
                if nonfinite > MAX_NONFINITE_BACKTRACKS {
                    return SearchOutcome::Failed;
                }
                let floor = prev.as_ref().map_or(0.0, |p| p.alpha);
                alpha = 0.5 * (floor + alpha);
                if alpha <= f64::MIN_POSITIVE {
                    return SearchOutcome::Failed;
                }
                continue;
            }
        };
        let worse_than_prev = prev.as_ref().is_some_and(|p| current.f >= p.f);
        if !armijo(&current) || (!first && worse_than_prev) {
            let lo = prev.unwrap_or(Probe {
                alpha: 0.0,
                x: x.to_vec(),
                f: f0,
                g: Vec::new(),
                dphi: dphi0,
            });
            return zoom(lo, current, f0, dphi0, opts, &mut probe);
        }
        if strong_curvature(&current) {
            return SearchOutcome::Wolfe(refine(current, &mut probe));
        }
        if current.dphi >= 0.0 {
            let lo = prev.unwrap_or(Probe {
                alpha: 0.0,
                x: x.to_vec(),
                f: f0,
                g: Vec::new(),
                dphi: dphi0,
            });
            return zoom(current, lo, f0, dphi0, opts, &mut probe);
        }
        alpha = current.alpha * 2.0;
        prev = Some(current);
        first = false;
    }
    match prev {
        // Descent kept improving but curvature never flattened within the
        // bracket budget; take what we have.
        Some(p) if armijo(&p) => SearchOutcome::BestEffort(p),
        _ => SearchOutcome::Failed,
    }
}

/// Shrinks a bracket `[lo, hi]` (in the sense of Wolfe bracketing, not
/// ordering) until a strong-Wolfe point is found.
fn zoom(
    mut lo: Probe,
    mut hi: Probe,
    f0: f64,
    dphi0: f64,
    opts: &BfgsOptions,
    probe: &mut impl FnMut(f64) -> Option<Probe>,
) -> SearchOutcome {
    let armijo = |p: &Probe| p.f <= f0 + opts.c1 * p.alpha * dphi0;
    for round in 0..MAX_ZOOM {
        let width = (hi.alpha - lo.alpha).abs();
        if width < f64::EPSILON * (1.0 + lo.alpha.abs()) {
            break;
        }
        // Quadratic interpolation through (lo.f, lo.dphi) and hi.f;
        // periodic bisection guarantees geometric shrinkage.
        let mut alpha_next = if round % 4 == 3 {
            0.5 * (lo.alpha + hi.alpha)
        } else {
            let h = hi.alpha - lo.alpha;
            let denom = 2.0 * (hi.f - lo.f - lo.dphi * h);
            if denom.abs() > 0.0 {
                lo.alpha - lo.dphi * h * h / denom
            } else {
                0.5 * (lo.alpha + hi.alpha)
            }
        };
        let (lo_a, hi_a) = if lo.alpha < hi.alpha {
            (lo.alpha, hi.alpha)
        } else {
            (hi.alpha, lo.alpha)
        };
        // A wildly asymmetric bracket (say hi has astronomically large f)
        // interpolates essentially onto an endpoint and would stall the
        // shrinkage; bisect instead.
        let margin = 1e-3 * width;
        if !(alpha_next.is_finite() && alpha_next > lo_a + margin && alpha_next < hi_a - margin) {
            alpha_next = 0.5 * (lo.alpha + hi.alpha);
        }
        let current = match probe(alpha_next) {
            Some(p) => p,
            None => {
                // Shrink toward the finite lo endpoint.
                hi = Probe {
                    alpha: alpha_next,
                    x: Vec::new(),
                    f: f64::INFINITY,
                    g: Vec::new(),
                    dphi: f64::INFINITY,
                };
                continue;
            }
        };
        if !armijo(&current) || current.f >= lo.f {
            hi = current;
        } else {
            if current.dphi.abs() <= -opts.c2 * dphi0 {
                return SearchOutcome::Wolfe(current);
            }
            if current.dphi * (hi.alpha - lo.alpha) >= 0.0 {
                hi = Probe {
                    alpha: lo.alpha,
                    x: std::mem::take(&mut lo.x),
                    f: lo.f,
                    g: std::mem::take(&mut lo.g),
                    dphi: lo.dphi,
                };
            }
            lo = current;
        }
    }
    if lo.alpha > 0.0 && armijo(&lo) && !lo.x.is_empty() {
        SearchOutcome::BestEffort(lo)
    } else {
        SearchOutcome::Failed
    }
}
