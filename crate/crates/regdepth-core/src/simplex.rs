//! Derivative-free minimizer for the non-smooth objectives in this crate:
//! a fixed-contract Nelder-Mead without an expansion step, plus
//! deterministic restarts around the incumbent.

use nalgebra::DVector;

/// Contract constants: reflection 1.0, contraction 0.5, shrink 0.5.
const REFLECT: f64 = 1.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Iteration cap per restart.
    pub max_iters: usize,
    /// Restarts around the incumbent with shrinking initial steps.
    pub restarts: usize,
    /// Converged when the simplex diameter drops below `tol * (1 + ||best||)`.
    pub tol: f64,
    /// Initial step as a fraction of `1 + |coordinate|`.
    pub initial_step: f64,
    /// Stalled when a window of iterations improves the best value by less
    /// than `stall_tol * |best|` while the simplex diameter stays put.
    /// Smooth minima are exempt: their diameter contracts geometrically.
    pub stall_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iters: 10_000,
            restarts: 5,
            tol: 1e-10,
            initial_step: 0.25,
            stall_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub point: DVector<f64>,
    pub value: f64,
    pub evals: usize,
}

fn guard(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn diameter(vertices: &[DVector<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            d = d.max((&vertices[i] - &vertices[j]).norm());
        }
    }
    d
}

fn run_once<F: FnMut(&DVector<f64>) -> f64>(
    f: &mut F,
    start: &DVector<f64>,
    step: f64,
    opts: &SimplexOptions,
    evals: &mut usize,
) -> (DVector<f64>, f64) {
    let p = start.len();
    let mut vertices: Vec<DVector<f64>> = Vec::with_capacity(p + 1);
    vertices.push(start.clone());
    for j in 0..p {
        let mut v = start.clone();
        v[j] += step * (1.0 + start[j].abs());
        vertices.push(v);
    }
    let mut values: Vec<f64> = vertices
        .iter()
        .map(|v| {
            *evals += 1;
            guard(f(v))
        })
        .collect();

    // On piecewise-linear ridges the reflect step can crawl: it keeps the
    // simplex size while the best value inches down by ~1e-10 of itself
    // per window. Honest descent gains orders of magnitude more, and at
    // smooth minima the diameter contracts geometrically, so both clauses
    // must hold over a full window before the run stops.
    let stall_window = 4 * (p + 1);
    let mut anchor_value = f64::INFINITY;
    let mut anchor_diameter = f64::INFINITY;

    for iter in 0..opts.max_iters {
        let mut order: Vec<usize> = (0..vertices.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let second_worst = order[p - 1];
        let worst = order[p];

        let diam = diameter(&vertices);
        if diam < opts.tol * (1.0 + vertices[best].norm()) {
            break;
        }
        if iter % stall_window == 0 {
            let gain = anchor_value - values[best];
            if iter > 0
                && gain <= opts.stall_tol * values[best].abs().max(f64::MIN_POSITIVE)
                && diam > 0.9 * anchor_diameter
            {
                break;
            }
            anchor_value = values[best];
            anchor_diameter = diam;
        }

        let mut centroid = DVector::zeros(p);
        for &i in &order[..p] {
            centroid += &vertices[i];
        }
        centroid /= p as f64;

        let reflected = &centroid + (&centroid - &vertices[worst]) * REFLECT;
        *evals += 1;
        let f_reflected = guard(f(&reflected));

        if f_reflected < values[second_worst] {
            vertices[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }

        let contracted = if f_reflected < values[worst] {
            &centroid + (&reflected - &centroid) * CONTRACT
        } else {
            &centroid + (&vertices[worst] - &centroid) * CONTRACT
        };
        *evals += 1;
        let f_contracted = guard(f(&contracted));
        if f_contracted < values[worst].min(f_reflected) {
            vertices[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }

        let best_point = vertices[best].clone();
        for i in 0..vertices.len() {
            if i == best {
                continue;
            }
            vertices[i] = &best_point + (&vertices[i] - &best_point) * SHRINK;
            *evals += 1;
            values[i] = guard(f(&vertices[i]));
        }
    }

    let mut bi = 0;
    for i in 1..values.len() {
        if values[i] < values[bi] {
            bi = i;
        }
    }
    (vertices[bi].clone(), values[bi])
}

/// Minimize `f` from `start`. Each restart rebuilds the simplex around the
/// incumbent with the initial step scaled by `0.2^k`, and a restart's
/// result is taken only on strict improvement.
pub fn minimize<F: FnMut(&DVector<f64>) -> f64>(
    mut f: F,
    start: &DVector<f64>,
    opts: &SimplexOptions,
) -> SimplexResult {
    let mut evals = 0usize;
    let mut best_point = start.clone();
    let mut best_value = {
        evals += 1;
        guard(f(start))
    };
    for k in 0..=opts.restarts {
        let step = opts.initial_step * 0.2f64.powi(k as i32);
        let (point, value) = run_once(&mut f, &best_point, step, opts, &mut evals);
        if value < best_value {
            best_point = point;
            best_value = value;
        }
    }
    SimplexResult {
        point: best_point,
        value: best_value,
        evals,
    }
}
