//! Quasi-Newton trust-region minimization.
//!
//! The local model is `m(p) = f + gᵀp + ½ pᵀBp` with `B` a BFGS Hessian
//! approximation (its inverse is maintained alongside for the Newton point).
//! Steps come from Powell's dogleg inside the current radius and are
//! accepted only if the ratio of actual to predicted reduction exceeds
//! [`TrustRegionOptions::accept_ratio`].

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct TrustRegionOptions {
    /// Upper bound on trial steps.
    pub max_iterations: usize,
    /// Converged once `‖g‖_∞` falls to this.
    pub gradient_tolerance: f64,
    /// Minimum actual/predicted reduction ratio for accepting a step.
    pub accept_ratio: f64,
    pub initial_radius: f64,
    pub max_radius: f64,
    /// Give up once the radius shrinks below this.
    pub min_radius: f64,
}

impl Default for TrustRegionOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            gradient_tolerance: 1e-9,
            accept_ratio: 0.1,
            initial_radius: 0.1,
            max_radius: 10.0,
            min_radius: 1e-14,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GradientTolerance,
    MaxIterations,
    RadiusCollapsed,
    NonFinite,
}

#[derive(Clone, Debug)]
pub struct TrustRegionReport {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub accepted_steps: usize,
    pub termination: Termination,
    /// Objective after each accepted step (the first entry is the start).
    pub trace: Vec<f64>,
}

/// Minimizes `f`, where `f(x, g)` returns the value and writes the gradient into `g`.
pub fn minimize(
    mut f: impl FnMut(&[f64], &mut [f64]) -> f64,
    x0: &[f64],
    opts: &TrustRegionOptions,
) -> TrustRegionReport {
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let mut g = DVector::zeros(n);
    let mut value = f(x.as_slice(), g.as_mut_slice());
    let mut trace = vec![value];
    let mut b = DMatrix::<f64>::identity(n, n);
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut first_update = true;
    let mut radius = opts.initial_radius;
    let mut g_trial = DVector::zeros(n);
    let mut accepted = 0;
    let mut iterations = 0;

    let termination = loop {
        if !value.is_finite() {
            break Termination::NonFinite;
        }
        if g.amax() <= opts.gradient_tolerance {
            break Termination::GradientTolerance;
        }
        if iterations >= opts.max_iterations {
            break Termination::MaxIterations;
        }
        if radius < opts.min_radius {
            break Termination::RadiusCollapsed;
        }
        iterations += 1;

        let bg = &b * &g;
        let step = dogleg(&g, &bg, &h, radius);
        let predicted = -(g.dot(&step) + 0.5 * step.dot(&(&b * &step)));
        let x_trial = &x + &step;
        let v_trial = f(x_trial.as_slice(), g_trial.as_mut_slice());
        let actual = value - v_trial;
        let step_norm = step.norm();
        let ratio = if predicted > 0.0 { actual / predicted } else { -1.0 };

        if !v_trial.is_finite() || ratio < 0.25 {
            radius = 0.25 * step_norm.min(radius);
        } else if ratio > 0.75 && step_norm > 0.99 * radius {
            radius = (2.0 * radius).min(opts.max_radius);
        }

        if v_trial.is_finite() {
            // Curvature information is valid whether or not the step is taken.
            let y = &g_trial - &g;
            let sy = step.dot(&y);
            if sy > 1e-12 * step_norm * y.norm() {
                if first_update {
                    let scale = sy / y.dot(&y);
                    h = DMatrix::identity(n, n) * scale;
                    b = DMatrix::identity(n, n) / scale;
                    first_update = false;
                }
                bfgs_update(&mut b, &mut h, &step, &y, sy);
            }
        }

        if v_trial.is_finite() && ratio > opts.accept_ratio {
            x = x_trial;
            value = v_trial;
            std::mem::swap(&mut g, &mut g_trial);
            accepted += 1;
            trace.push(value);
        }
    };

    TrustRegionReport {
        gradient_norm: g.amax(),
        x: x.as_slice().to_vec(),
        value,
        iterations,
        accepted_steps: accepted,
        termination,
        trace,
    }
}

fn dogleg(g: &DVector<f64>, bg: &DVector<f64>, h: &DMatrix<f64>, radius: f64) -> DVector<f64> {
    let newton = -(h * g);
    if newton.norm() <= radius {
        return newton;
    }
    let gbg = g.dot(bg);
    let gg = g.dot(g);
    if gbg <= 0.0 {
        return -g * (radius / g.norm());
    }
    let cauchy = -g * (gg / gbg);
    let cn = cauchy.norm();
    if cn >= radius {
        return cauchy * (radius / cn);
    }
    // Walk from the Cauchy point toward the Newton point until the boundary.
    let d = &newton - &cauchy;
    let a = d.dot(&d);
    let bq = 2.0 * cauchy.dot(&d);
    let c = cauchy.dot(&cauchy) - radius * radius;
    let tau = (-bq + (bq * bq - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a);
    cauchy + d * tau
}

fn bfgs_update(
    b: &mut DMatrix<f64>,
    h: &mut DMatrix<f64>,
    s: &DVector<f64>,
    y: &DVector<f64>,
    sy: f64,
) {
    let bs = &*b * s;
    let sbs = s.dot(&bs);
    if sbs > 0.0 {
        b.ger(-1.0 / sbs, &bs, &bs, 1.0);
    }
    b.ger(1.0 / sy, y, y, 1.0);

    let rho = 1.0 / sy;
    let hy = &*h * y;
    let yhy = y.dot(&hy);
    h.ger(-rho, &hy, s, 1.0);
    h.ger(-rho, s, &hy, 1.0);
    h.ger(rho * rho * yhy + rho, s, s, 1.0);
}
