use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop once `½‖r‖²` falls below this.
    pub cost_tolerance: f64,
    /// Central-difference step for the Jacobian.
    pub jacobian_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            cost_tolerance: 1e-28,
            jacobian_step: 1e-7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LmReport {
    pub x: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
}

/// Levenberg–Marquardt for `min ½‖r(x)‖²` with a central-difference Jacobian.
pub fn levenberg_marquardt(
    residual: impl Fn(&[f64], &mut Vec<f64>),
    x0: &[f64],
    opts: &LmOptions,
) -> LmReport {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = Vec::new();
    residual(&x, &mut r);
    let m = r.len();
    let cost = |r: &[f64]| 0.5 * r.iter().map(|v| v * v).sum::<f64>();
    let mut c = cost(&r);
    let mut mu = 1e-3;
    let mut jac = DMatrix::<f64>::zeros(m, n);
    let (mut rp, mut rm, mut trial) = (Vec::new(), Vec::new(), Vec::new());
    let mut it = 0;
    while it < opts.max_iterations && c > opts.cost_tolerance {
        it += 1;
        for j in 0..n {
            let h = opts.jacobian_step * x[j].abs().max(1.0);
            let xj = x[j];
            x[j] = xj + h;
            residual(&x, &mut rp);
            x[j] = xj - h;
            residual(&x, &mut rm);
            x[j] = xj;
            for i in 0..m {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * rv;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += mu * (1.0 + jtj[(k, k)]);
            }
            let Some(step) = a.cholesky().map(|ch| ch.solve(&(-&jtr))) else {
                mu *= 10.0;
                continue;
            };
            let xt: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            residual(&xt, &mut trial);
            let ct = cost(&trial);
            if ct < c {
                x = xt;
                std::mem::swap(&mut r, &mut trial);
                c = ct;
                mu = (mu / 3.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    LmReport {
        x,
        cost: c,
        iterations: it,
    }
}
