//! Downhill simplex minimization.

#[derive(Clone, Copy, Debug)]
pub(crate) struct NelderMead {
    pub max_iter: usize,
    pub f_tol: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
}

impl NelderMead {
    /// Minimizes `f` from the initial simplex `x0, x0 + steps[k] e_k`.
    pub fn minimize(&self, mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], steps: &[f64]) -> Minimum {
        let dim = x0.len();
        assert_eq!(steps.len(), dim, "one step per coordinate");
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        simplex.push((x0.to_vec(), f(x0)));
        for k in 0..dim {
            let mut x = x0.to_vec();
            x[k] += steps[k];
            let v = f(&x);
            simplex.push((x, v));
        }

        for _ in 0..self.max_iter {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best, worst) = (simplex[0].1, simplex[dim].1);
            if (worst - best).abs() <= self.f_tol {
                break;
            }
            let centroid: Vec<f64> =
                (0..dim).map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64).collect();
            let along = |t: f64, worst: &[f64]| -> Vec<f64> {
                centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect()
            };

            let xr = along(1.0, &simplex[dim].0);
            let fr = f(&xr);
            if fr < simplex[0].1 {
                let xe = along(2.0, &simplex[dim].0);
                let fe = f(&xe);
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[dim].1 {
                let xc = along(0.5, &simplex[dim].0);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(-0.5, &simplex[dim].0);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < fr.min(simplex[dim].1) {
                simplex[dim] = (xc, fc);
                continue;
            }
            // shrink towards the best vertex
            let x_best = simplex[0].0.clone();
            for (x, v) in simplex.iter_mut().skip(1) {
                for (xi, bi) in x.iter_mut().zip(&x_best) {
                    *xi = bi + 0.5 * (*xi - bi);
                }
                *v = f(x);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum { x, value }
    }
}
