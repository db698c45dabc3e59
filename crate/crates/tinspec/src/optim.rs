//! Minimal derivative-free simplex minimizer used by the RAR fit.

/// Nelder-Mead with standard coefficients. Returns (argmin, min, evals).
/// `target` stops the search early once the objective drops below it.
pub(crate) fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    target: f64,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::MAX
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if best < target || (worst - best).abs() <= 1e-14 * (1.0 + best.abs()) {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let point = |coef: f64| -> Vec<f64> {
            (0..n).map(|j| centroid[j] + coef * (simplex[n].0[j] - centroid[j])).collect()
        };

        let xr = point(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = point(-2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = if fr < simplex[n].1 { point(-0.5) } else { point(0.5) };
            let fc = eval(&xc, &mut evals);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                // Shrink toward the best vertex.
                let best_x = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for (vj, bj) in v.0.iter_mut().zip(&best_x) {
                        *vj = bj + 0.5 * (*vj - bj);
                    }
                    v.1 = eval(&v.0, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let (x, fx) = simplex.swap_remove(0);
    (x, fx, evals)
}
