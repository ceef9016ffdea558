//! BFGS maximization with a strong-Wolfe line search.
//!
//! Gradients are either supplied analytically or approximated by central
//! differences. Internally the routine minimizes the negated objective; the
//! public interface speaks in maximization terms throughout.

/// Line-search and stopping configuration.
#[derive(Clone, Copy, Debug)]
pub struct QuasiNewtonConfig {
    /// Armijo constant (sufficient increase).
    pub c1: f64,
    /// Curvature constant; `0 < c1 < c2 < 1`.
    pub c2: f64,
    pub max_iters: usize,
    /// Terminate when the gradient max-norm falls below this.
    pub grad_tol: f64,
    /// Central-difference step.
    pub fd_step: f64,
}

impl Default for QuasiNewtonConfig {
    fn default() -> Self {
        Self { c1: 1e-4, c2: 0.9, max_iters: 500, grad_tol: 1e-9, fd_step: 1e-6 }
    }
}

/// Outcome of a quasi-Newton run. `converged` reports the gradient test;
/// hitting the iteration cap or a NaN objective leaves it false and returns
/// the best iterate seen.
#[derive(Clone, Debug)]
pub struct QnResult {
    pub value: f64,
    pub x: Vec<f64>,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximizes `f` with central-difference gradients.
pub fn maximize_qn<F>(f: F, x0: &[f64], cfg: &QuasiNewtonConfig) -> QnResult
where
    F: Fn(&[f64]) -> f64,
{
    let h = cfg.fd_step;
    let grad = |x: &[f64]| {
        let mut g = vec![0.0; x.len()];
        let mut xp = x.to_vec();
        for i in 0..x.len() {
            let xi = x[i];
            xp[i] = xi + h;
            let fp = f(&xp);
            xp[i] = xi - h;
            let fm = f(&xp);
            xp[i] = xi;
            g[i] = (fp - fm) / (2.0 * h);
        }
        g
    };
    bfgs(&f, &grad, x0, cfg)
}

/// Maximizes `f` with a supplied analytic gradient.
pub fn maximize_qn_with_grad<F, G>(f: F, grad: G, x0: &[f64], cfg: &QuasiNewtonConfig) -> QnResult
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    bfgs(&f, &grad, x0, cfg)
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

fn bfgs<F, G>(f: &F, grad: &G, x0: &[f64], cfg: &QuasiNewtonConfig) -> QnResult
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return QnResult { value: fx, x, grad_norm: f64::NAN, iterations: 0, converged: false };
    }
    let mut g = grad(&x);
    // Inverse Hessian estimate of the negated objective.
    let mut h_inv = vec![0.0; n * n];
    for i in 0..n {
        h_inv[i * n + i] = 1.0;
    }
    let mut best = QnResult {
        value: fx,
        x: x.clone(),
        grad_norm: max_norm(&g),
        iterations: 0,
        converged: false,
    };

    for iter in 0..cfg.max_iters {
        let gnorm = max_norm(&g);
        if fx >= best.value {
            best = QnResult { value: fx, x: x.clone(), grad_norm: gnorm, iterations: iter, converged: false };
        }
        if gnorm < cfg.grad_tol {
            best.converged = true;
            best.grad_norm = gnorm;
            return best;
        }
        // Ascent direction d = H_inv * g.
        let mut d = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += h_inv[i * n + j] * g[j];
            }
            d[i] = s;
        }
        let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope <= 0.0 {
            // Curvature estimate went bad; restart from steepest ascent.
            d.copy_from_slice(&g);
            slope = g.iter().map(|v| v * v).sum();
            for i in 0..n {
                for j in 0..n {
                    h_inv[i * n + j] = if i == j { 1.0 } else { 0.0 };
                }
            }
        }
        let Some((t, fx_new)) = wolfe_search(f, &x, &d, fx, slope, cfg) else {
            // Line search failed to make progress; report best so far.
            return best;
        };
        let x_new: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + t * di).collect();
        if !fx_new.is_finite() {
            return best;
        }
        let g_new = grad(&x_new);
        // BFGS update on the minimization problem: y = -(g_new - g).
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g.iter().zip(&g_new).map(|(old, new)| old - new).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let s_norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if sy > 1e-10 * s_norm * y_norm {
            bfgs_update(&mut h_inv, &s, &y, sy, n);
        }
        x = x_new;
        fx = fx_new;
        g = g_new;
    }
    if fx >= best.value {
        best = QnResult {
            value: fx,
            x,
            grad_norm: max_norm(&g),
            iterations: cfg.max_iters,
            converged: false,
        };
    }
    best.iterations = cfg.max_iters;
    best
}

/// `H <- (I - r s yᵀ) H (I - r y sᵀ) + r s sᵀ` with `r = 1/(yᵀs)`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, n: usize) {
    let rho = 1.0 / sy;
    // hy = H y, yhy = yᵀ H y
    let mut hy = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += h[i * n + j] * y[j];
        }
        hy[i] = acc;
    }
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    let c = rho * rho * yhy + rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += c * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

/// Strong Wolfe search on `phi(t) = f(x + t d)` (maximization form).
/// Returns `(t, f(x + t d))` or `None` when no acceptable step exists.
fn wolfe_search<F>(
    f: &F,
    x: &[f64],
    d: &[f64],
    f0: f64,
    slope0: f64,
    cfg: &QuasiNewtonConfig,
) -> Option<(f64, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    let phi = |t: f64| {
        let xt: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + t * di).collect();
        f(&xt)
    };
    // Derivative of phi by central difference on the step scale.
    let dphi = |t: f64| {
        let h = 1e-7 * (1.0 + t.abs());
        (phi(t + h) - phi(t - h)) / (2.0 * h)
    };
    let mut t_prev = 0.0;
    let mut f_prev = f0;
    let mut t = 1.0;
    let max_expand = 20;

    for i in 0..max_expand {
        let ft = phi(t);
        if !ft.is_finite() {
            // Shrink back into the finite region.
            t = 0.5 * (t_prev + t);
            continue;
        }
        if ft < f0 + cfg.c1 * t * slope0 || (i > 0 && ft <= f_prev) {
            return zoom(&phi, &dphi, t_prev, f_prev, t, f0, slope0, cfg);
        }
        let dt = dphi(t);
        if dt.abs() <= cfg.c2 * slope0 {
            return Some((t, ft));
        }
        if dt <= 0.0 {
            return zoom(&phi, &dphi, t, ft, t_prev, f0, slope0, cfg);
        }
        t_prev = t;
        f_prev = ft;
        t *= 2.0;
    }
    let ft = phi(t);
    if ft > f0 { Some((t, ft)) } else { None }
}

#[allow(clippy::too_many_arguments)]
fn zoom<P, D>(
    phi: &P,
    dphi: &D,
    mut lo: f64,
    mut f_lo: f64,
    mut hi: f64,
    f0: f64,
    slope0: f64,
    cfg: &QuasiNewtonConfig,
) -> Option<(f64, f64)>
where
    P: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    for _ in 0..50 {
        let t = 0.5 * (lo + hi);
        if (hi - lo).abs() < 1e-16 * (1.0 + lo.abs()) {
            break;
        }
        let ft = phi(t);
        if !ft.is_finite() || ft < f0 + cfg.c1 * t * slope0 || ft <= f_lo {
            hi = t;
        } else {
            let dt = dphi(t);
            if dt.abs() <= cfg.c2 * slope0 {
                return Some((t, ft));
            }
            if dt * (hi - lo) <= 0.0 {
                hi = lo;
            }
            lo = t;
            f_lo = ft;
        }
    }
    if f_lo > f0 { Some((lo, f_lo)) } else { None }
}
