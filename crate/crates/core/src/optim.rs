//! Derivative-free Nelder-Mead simplex minimizer.

/// Standard reflection / expansion / contraction / shrink coefficients.
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Stop when `f_worst - f_best <= ftol * (|f_best| + ftol)`.
    pub ftol: f64,
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            ftol: 1e-8,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

impl NelderMead {
    pub fn minimize<F>(&self, mut f: F, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut evaluations = 0usize;
        let mut eval = |x: &[f64]| {
            evaluations += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let dim = x0.len();
        if dim == 0 {
            let value = eval(x0);
            return Minimum {
                x: vec![],
                value,
                iterations: 0,
                evaluations: 1,
                converged: true,
            };
        }

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
        simplex.push(x0.to_vec());
        for i in 0..dim {
            let mut v = x0.to_vec();
            v[i] += if v[i].abs() > 1.0 { self.initial_step * v[i].abs() } else { self.initial_step };
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            let mut order: Vec<usize> = (0..=dim).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let best = values[0];
            let worst = values[dim];
            if best.is_finite() && (worst - best) <= self.ftol * (best.abs() + self.ftol) {
                converged = true;
                break;
            }
            let diameter = simplex[1..]
                .iter()
                .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0f64, f64::max);
            if best.is_finite() && diameter < 1e-13 {
                converged = true;
                break;
            }
            iterations += 1;

            let centroid: Vec<f64> = (0..dim)
                .map(|j| simplex[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[dim])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(REFLECT);
            let fr = eval(&xr);
            if fr < values[0] {
                let xe = along(REFLECT * EXPAND);
                let fe = eval(&xe);
                if fe < fr {
                    simplex[dim] = xe;
                    values[dim] = fe;
                } else {
                    simplex[dim] = xr;
                    values[dim] = fr;
                }
                continue;
            }
            if fr < values[dim - 1] {
                simplex[dim] = xr;
                values[dim] = fr;
                continue;
            }
            let (xc, fc) = if fr < values[dim] {
                let xc = along(REFLECT * CONTRACT);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-CONTRACT);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < values[dim].min(fr) {
                simplex[dim] = xc;
                values[dim] = fc;
                continue;
            }
            let best_x = simplex[0].clone();
            for i in 1..=dim {
                for j in 0..dim {
                    simplex[i][j] = best_x[j] + SHRINK * (simplex[i][j] - best_x[j]);
                }
                values[i] = eval(&simplex[i]);
            }
        }

        let (bi, _) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("simplex is nonempty");
        Minimum {
            x: simplex[bi].clone(),
            value: values[bi],
            iterations,
            evaluations,
            converged,
        }
    }

    /// Minimize, then restart from the optimum with a fresh simplex until a
    /// restart no longer improves the objective.
    pub fn minimize_with_restarts<F>(&self, mut f: F, x0: &[f64], restarts: usize) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut best = self.minimize(&mut f, x0);
        let mut total_iter = best.iterations;
        let mut total_eval = best.evaluations;
        let mut all_converged = best.converged;
        let mut step = self.initial_step;
        for _ in 0..restarts {
            step *= 0.5;
            let again = NelderMead {
                initial_step: step,
                ..self.clone()
            }
            .minimize(&mut f, &best.x);
            total_iter += again.iterations;
            total_eval += again.evaluations;
            let improved = best.value - again.value > self.ftol * (best.value.abs() + self.ftol);
            if again.value <= best.value {
                all_converged = again.converged;
                best = again;
            }
            if !improved {
                break;
            }
        }
        best.iterations = total_iter;
        best.evaluations = total_eval;
        best.converged = all_converged;
        best
    }
}
