//! Nelder–Mead minimization with restarts.

/// Result of [`minimize`].
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
}

/// Minimizes `f` from `x0`, restarting from the best vertex with a fresh
/// simplex until a restart improves the value by less than `ftol`.
pub(crate) fn minimize<F>(f: &F, x0: &[f64], step: f64, ftol: f64, max_evals: usize) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = Minimum {
        x: x0.to_vec(),
        f: f(x0),
        evals: 1,
    };
    let mut scale = step;
    for _ in 0..64 {
        if best.evals >= max_evals {
            break;
        }
        let run = simplex(f, &best.x, scale, ftol, max_evals - best.evals);
        let gain = best.f - run.f;
        best.evals += run.evals;
        if run.f < best.f {
            best.x = run.x;
            best.f = run.f;
        }
        if gain < ftol {
            break;
        }
        scale = (scale * 0.5).max(1e-4);
    }
    best
}

fn simplex<F>(f: &F, x0: &[f64], step: f64, ftol: f64, max_evals: usize) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let mut order: Vec<usize> = (0..=n).collect();

    while evals < max_evals {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (lo, hi, second) = (order[0], order[n], order[n - 1]);
        if (vals[hi] - vals[lo]).abs() <= ftol * 0.1 {
            break;
        }
        let mut centroid = vec![0.0; n];
        for &k in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&pts[k]) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[hi])
                .map(|(c, h)| c + t * (h - c))
                .collect()
        };

        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[lo] {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[hi] = xe;
                vals[hi] = fe;
            } else {
                pts[hi] = xr;
                vals[hi] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[hi] = xr;
            vals[hi] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[hi] {
            let x = along(-0.5);
            let v = f(&x);
            (x, v)
        } else {
            let x = along(0.5);
            let v = f(&x);
            (x, v)
        };
        evals += 1;
        if fc < vals[hi].min(fr) {
            pts[hi] = xc;
            vals[hi] = fc;
            continue;
        }
        let best = pts[lo].clone();
        for k in 0..=n {
            if k == lo {
                continue;
            }
            for (p, b) in pts[k].iter_mut().zip(&best) {
                *p = b + 0.5 * (*p - b);
            }
            vals[k] = f(&pts[k]);
        }
        evals += n;
    }
    let lo = (0..=n)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap();
    Minimum {
        x: pts[lo].clone(),
        f: vals[lo],
        evals,
    }
}
