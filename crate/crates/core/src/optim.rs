//! Derivative-free minimization over the unit box `[0, 1]^d`.
//!
//! Nelder-Mead with the dimension-adaptive coefficients of Gao and Han,
//! trial points clipped onto the box, restarted around the incumbent until
//! a restart stops paying off, then polished by compass search. Compass
//! search moves one coordinate at a time, so it can settle exactly on faces
//! and corners of the box where deterministic solutions live.

#[derive(Debug, Clone)]
pub struct BoxOptions {
    /// Budget of objective evaluations across all phases.
    pub max_evals: usize,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Simplex is converged when the spread of its values falls below this.
    pub f_tol: f64,
    /// ... and its vertices lie within this distance of the best one.
    pub x_tol: f64,
    /// Nelder-Mead restarts around the incumbent.
    pub max_restarts: usize,
    /// Smallest compass step.
    pub min_compass_step: f64,
}

impl Default for BoxOptions {
    fn default() -> Self {
        Self {
            max_evals: 20_000,
            initial_step: 0.25,
            f_tol: 1e-12,
            x_tol: 1e-9,
            max_restarts: 4,
            min_compass_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoxMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

struct Counted<F> {
    f: F,
    evals: usize,
    limit: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn call(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    fn exhausted(&self) -> bool {
        self.evals >= self.limit
    }
}

fn clip(x: &mut [f64]) {
    for v in x.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
}

/// Minimizes `f` over `[0, 1]^d` starting from `x0`.
pub fn minimize_unit_box<F>(f: F, x0: &[f64], options: &BoxOptions) -> BoxMinimum
where
    F: FnMut(&[f64]) -> f64,
{
    let mut counted = Counted {
        f,
        evals: 0,
        limit: options.max_evals.max(1),
    };
    let mut x = x0.to_vec();
    clip(&mut x);
    if x.is_empty() {
        let value = counted.call(&x);
        return BoxMinimum { x, value, evals: counted.evals };
    }
    let mut value = counted.call(&x);

    for _ in 0..=options.max_restarts {
        if counted.exhausted() {
            break;
        }
        let (nx, nv) = nelder_mead(&mut counted, &x, value, options);
        let gain = value - nv;
        if nv < value {
            x = nx;
            value = nv;
        }
        if gain <= options.f_tol.max(1e-12 * value.abs()) {
            break;
        }
    }
    compass(&mut counted, &mut x, &mut value, options);
    BoxMinimum { x, value, evals: counted.evals }
}

fn nelder_mead<F>(f: &mut Counted<F>, x0: &[f64], f0: f64, options: &BoxOptions) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] = if p[i] + options.initial_step <= 1.0 {
            p[i] + options.initial_step
        } else {
            p[i] - options.initial_step
        };
        let v = f.call(&p);
        simplex.push((p, v));
    }

    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    while !f.exhausted() {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = worst - best;
        let size = simplex[1..]
            .iter()
            .map(|(p, _)| {
                p.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if size <= options.x_tol || (spread <= options.f_tol && size <= 1e-3) {
            break;
        }

        centroid.fill(0.0);
        for (p, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / nf;
            }
        }
        let along = |coef: f64, out: &mut Vec<f64>, worst_point: &[f64]| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(worst_point) {
                *o = (c + coef * (c - w)).clamp(0.0, 1.0);
            }
        };

        let worst_point = simplex[n].0.clone();
        along(alpha, &mut trial, &worst_point);
        let fr = f.call(&trial);
        if fr < simplex[0].1 {
            let reflected = trial.clone();
            along(alpha * gamma, &mut trial, &worst_point);
            let fe = f.call(&trial);
            simplex[n] = if fe < fr { (trial.clone(), fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (trial.clone(), fr);
            continue;
        }
        let (coef, bound) = if fr < worst { (alpha * rho, fr) } else { (-rho, worst) };
        along(coef, &mut trial, &worst_point);
        let fc = f.call(&trial);
        if fc < bound {
            simplex[n] = (trial.clone(), fc);
            continue;
        }
        // shrink towards the best vertex
        let best_point = simplex[0].0.clone();
        for (p, v) in simplex[1..].iter_mut() {
            for (x, b) in p.iter_mut().zip(&best_point) {
                *x = b + sigma * (*x - b);
            }
            *v = f.call(p);
            if f.exhausted() {
                break;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v)
}

fn compass<F>(f: &mut Counted<F>, x: &mut [f64], value: &mut f64, options: &BoxOptions)
where
    F: FnMut(&[f64]) -> f64,
{
    let mut step = options.initial_step;
    let mut probe = x.to_vec();
    while step >= options.min_compass_step && !f.exhausted() {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let moved = (x[i] + dir * step).clamp(0.0, 1.0);
                if moved == x[i] {
                    continue;
                }
                probe[i] = moved;
                let v = f.call(&probe);
                if v < *value {
                    x[i] = moved;
                    *value = v;
                    improved = true;
                    break;
                }
                probe[i] = x[i];
            }
            if f.exhausted() {
                return;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
}
