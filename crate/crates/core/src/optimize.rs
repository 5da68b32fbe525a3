//! Deterministic Nelder–Mead simplex minimization.

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct NelderMead {
    /// Evaluation budget for this call.
    pub max_evals: usize,
    /// Converged once `f_worst − f_best ≤ f_tol` across the simplex.
    pub f_tol: f64,
    /// Stop early once the best value reaches this.
    pub f_target: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_evals: 10_000,
            f_tol: 1e-12,
            f_target: f64::NEG_INFINITY,
        }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

impl NelderMead {
    /// Minimizes `f` from `x0` with an axis-aligned initial simplex of the
    /// given step sizes. After convergence the simplex is rebuilt around the
    /// best point; the search stops when a rebuilt simplex brings no
    /// improvement beyond `f_tol` or the budget runs out.
    pub fn minimize<F>(&self, mut f: F, x0: &[f64], steps: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        assert_eq!(x0.len(), steps.len(), "one step per coordinate");
        let mut evals = 0;
        let mut best = (x0.to_vec(), f64::INFINITY);
        let mut converged = false;
        let mut scale = 1.0;
        let n = x0.len();
        // Each pass needs at least the n + 1 simplex evaluations.
        while evals + n < self.max_evals {
            let start = best.0.clone();
            let s: Vec<f64> = steps.iter().map(|v| v * scale).collect();
            let (x, fx, used, conv) = self.run_once(&mut f, &start, &s, self.max_evals - evals);
            evals += used;
            let improved = best.1 - fx > self.f_tol;
            if fx < best.1 {
                best = (x, fx);
            }
            converged = conv;
            if !conv || !improved || best.1 <= self.f_target {
                break;
            }
            scale *= 0.5;
        }
        Minimum {
            x: best.0,
            f: best.1,
            evals,
            converged,
        }
    }

    fn run_once<F>(&self, f: &mut F, x0: &[f64], steps: &[f64], budget: usize) -> (Vec<f64>, f64, usize, bool)
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), eval(x0, &mut evals)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += steps[i];
            let fx = eval(&x, &mut evals);
            simplex.push((x, fx));
        }

        let mut converged = false;
        // One iteration costs at most n + 2 evaluations (reflect, contract, shrink).
        while evals + n + 2 <= budget {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let f_best = simplex[0].1;
            let f_worst = simplex[n].1;
            if f_worst - f_best <= self.f_tol || f_best <= self.f_target {
                converged = true;
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(REFLECT);
            let fr = eval(&xr, &mut evals);
            if fr < f_best {
                let xe = along(REFLECT * EXPAND);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            // Outside contraction when the reflection beats the worst point,
            // inside otherwise.
            let (xc, fc) = if fr < f_worst {
                let x = along(REFLECT * CONTRACT);
                let fx = eval(&x, &mut evals);
                (x, fx)
            } else {
                let x = along(-CONTRACT);
                let fx = eval(&x, &mut evals);
                (x, fx)
            };
            if fc < fr.min(f_worst) {
                simplex[n] = (xc, fc);
                continue;
            }
            let x_best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = x_best
                    .iter()
                    .zip(&vertex.0)
                    .map(|(b, v)| b + SHRINK * (v - b))
                    .collect();
                let fx = eval(&x, &mut evals);
                *vertex = (x, fx);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, fx) = simplex.swap_remove(0);
        (x, fx, evals, converged)
    }
}
