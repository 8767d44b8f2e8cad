#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    /// Maximum number of objective evaluations (including the initial point).
    pub max_evaluations: usize,
    pub initial_step: f64,
    /// Stop when the simplex spread in function value drops below this.
    pub tolerance: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 500,
            initial_step: 0.2,
            tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NelderMeadReport {
    pub x: Vec<f64>,
    pub value: f64,
    pub initial_value: f64,
    pub evaluations: usize,
    /// Best value after each evaluation.
    pub trace: Vec<f64>,
}

/// Derivative-free Nelder–Mead minimization within an evaluation budget.
///
/// The initial point is a simplex vertex, so the returned value never
/// exceeds `f(x0)`. A zero budget still evaluates `x0`.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> NelderMeadReport {
    let n = x0.len();
    let mut trace = Vec::new();
    let mut best = f64::INFINITY;
    let mut evals = 0usize;
    let mut eval = |x: &[f64], trace: &mut Vec<f64>, evals: &mut usize| {
        let v = f(x);
        *evals += 1;
        best = best.min(v);
        trace.push(best);
        v
    };
    let f0 = eval(x0, &mut trace, &mut evals);
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..n {
        if evals >= opts.max_evaluations {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x, &mut trace, &mut evals);
        simplex.push((x, v));
    }
    if simplex.len() == n + 1 && n > 0 {
        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
        while evals < opts.max_evaluations {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[n].1 - simplex[0].1 < opts.tolerance {
                break;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|k| simplex[..n].iter().map(|v| v.0[k]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (w - c))
                    .collect()
            };
            let xr = along(-alpha);
            let fr = eval(&xr, &mut trace, &mut evals);
            if fr < simplex[0].1 {
                if evals >= opts.max_evaluations {
                    simplex[n] = (xr, fr);
                    break;
                }
                let xe = along(-gamma);
                let fe = eval(&xe, &mut trace, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                if evals >= opts.max_evaluations {
                    break;
                }
                let (xc, fc) = if fr < simplex[n].1 {
                    let xc = along(-rho);
                    let fc = eval(&xc, &mut trace, &mut evals);
                    (xc, fc)
                } else {
                    let xc = along(rho);
                    let fc = eval(&xc, &mut trace, &mut evals);
                    (xc, fc)
                };
                if fc < simplex[n].1.min(fr) {
                    simplex[n] = (xc, fc);
                } else {
                    let x_best = simplex[0].0.clone();
                    for v in simplex.iter_mut().skip(1) {
                        if evals >= opts.max_evaluations {
                            break;
                        }
                        for (xi, bi) in v.0.iter_mut().zip(&x_best) {
                            *xi = bi + sigma * (*xi - bi);
                        }
                        v.1 = eval(&v.0, &mut trace, &mut evals);
                    }
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadReport {
        x,
        value,
        initial_value: f0,
        evaluations: evals,
        trace,
    }
}
