//! Derivative-free local minimization (Nelder–Mead simplex).

#[derive(Clone, Copy, Debug)]
pub(crate) struct NelderMead {
    pub max_iter: usize,
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            max_iter: 400,
            f_tol: 1e-12,
            x_tol: 1e-10,
        }
    }
}

impl NelderMead {
    /// Minimizes `f` starting from `x0` with an axis-aligned initial simplex of size `step`.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64], step: f64) -> (Vec<f64>, f64) {
        let d = x0.len();
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
        simplex.push(x0.to_vec());
        for i in 0..d {
            let mut v = x0.to_vec();
            v[i] += step;
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

        for _ in 0..self.max_iter {
            let mut idx: Vec<usize> = (0..=d).collect();
            idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
            values = idx.iter().map(|&i| values[i]).collect();

            let spread = (values[d] - values[0]).abs();
            let size = simplex[1..]
                .iter()
                .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread <= self.f_tol * (1.0 + values[0].abs()) && size <= self.x_tol {
                break;
            }
            if size <= self.x_tol * 1e-3 {
                break;
            }

            let centroid: Vec<f64> = (0..d)
                .map(|k| simplex[..d].iter().map(|v| v[k]).sum::<f64>() / d as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[d])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(1.0);
            let fr = f(&xr);
            if fr < values[0] {
                let xe = along(2.0);
                let fe = f(&xe);
                if fe < fr {
                    simplex[d] = xe;
                    values[d] = fe;
                } else {
                    simplex[d] = xr;
                    values[d] = fr;
                }
            } else if fr < values[d - 1] {
                simplex[d] = xr;
                values[d] = fr;
            } else {
                let (xc, fc) = if fr < values[d] {
                    let xc = along(0.5);
                    let fc = f(&xc);
                    (xc, fc)
                } else {
                    let xc = along(-0.5);
                    let fc = f(&xc);
                    (xc, fc)
                };
                if fc < values[d].min(fr) {
                    simplex[d] = xc;
                    values[d] = fc;
                } else {
                    for i in 1..=d {
                        let v: Vec<f64> = simplex[i]
                            .iter()
                            .zip(&simplex[0])
                            .map(|(a, b)| b + 0.5 * (a - b))
                            .collect();
                        values[i] = f(&v);
                        simplex[i] = v;
                    }
                }
            }
        }
        let best = (0..=d).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
        (simplex[best].clone(), values[best])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_rosenbrock_minimum() {
        let nm = NelderMead { max_iter: 5000, ..Default::default() };
        let (x, v) = nm.minimize(
            |p| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            &[-1.2, 1.0],
            0.5,
        );
        assert!(v < 1e-8, "{v}");
        assert!((x[0] - 1.0).abs() < 1e-3 && (x[1] - 1.0).abs() < 1e-3);
    }
}
