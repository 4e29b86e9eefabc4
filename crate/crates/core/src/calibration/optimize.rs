//! Derivative-free minimizers used by the calibration: golden-section search
//! on an interval and a box-clamped Nelder-Mead simplex.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// `n` points spaced evenly in log between `lo` and `hi`, both included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi > lo && n >= 2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = sanitize(f(c));
    let mut fd = sanitize(f(d));
    let mut evaluations = 2;
    let mut iterations = 0;
    while (b - a) > tol && iterations < max_iter {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = sanitize(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = sanitize(f(d));
        }
        evaluations += 1;
        iterations += 1;
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Minimum {
        x: vec![x],
        value,
        evaluations,
        iterations,
        converged: (b - a) <= tol,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Converged when `max f - min f` over the simplex drops below this.
    pub spread_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            spread_tolerance: 1e-6,
            max_iterations: 500,
        }
    }
}

/// Nelder-Mead over the box `[lower, upper]`; trial points are clamped into
/// the box. The initial simplex is `start` plus one vertex per coordinate
/// displaced by `step[i]` (flipped inwards when it would leave the box).
pub fn nelder_mead<F>(
    mut f: F,
    start: &[f64],
    step: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &NelderMeadOptions,
) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    assert!(n > 0 && step.len() == n && lower.len() == n && upper.len() == n);
    let clamp = |x: &mut [f64]| {
        for i in 0..n {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };

    let mut evaluations = 0;
    let mut eval = |x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        sanitize(f(x))
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut x0 = start.to_vec();
    clamp(&mut x0);
    let f0 = eval(&x0, &mut evaluations);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut x = x0.clone();
        x[i] += step[i];
        if x[i] > upper[i] {
            x[i] = x0[i] - step[i];
        }
        clamp(&mut x);
        let fx = eval(&x, &mut evaluations);
        simplex.push((x, fx));
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        // stable sort keeps the result independent of evaluation order
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread < opts.spread_tolerance {
            converged = true;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for i in 0..n {
                centroid[i] += x[i] / n as f64;
            }
        }
        let towards = |coef: f64, from: &[f64]| -> Vec<f64> {
            let mut p: Vec<f64> = (0..n)
                .map(|i| centroid[i] + coef * (from[i] - centroid[i]))
                .collect();
            clamp(&mut p);
            p
        };

        let worst = simplex[n].0.clone();
        let f_best = simplex[0].1;
        let f_second_worst = simplex[n - 1].1;
        let f_worst = simplex[n].1;

        let xr = towards(-opts.reflection, &worst);
        let fr = eval(&xr, &mut evaluations);
        if fr < f_best {
            let xe = towards(-opts.reflection * opts.expansion, &worst);
            let fe = eval(&xe, &mut evaluations);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second_worst {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = towards(-opts.reflection * opts.contraction, &worst);
            let fc = eval(&xc, &mut evaluations);
            (xc, fc)
        } else {
            let xc = towards(opts.contraction, &worst);
            let fc = eval(&xc, &mut evaluations);
            (xc, fc)
        };
        if fc < fr.min(f_worst) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut x: Vec<f64> = (0..n)
                .map(|i| best[i] + opts.shrink * (vertex.0[i] - best[i]))
                .collect();
            clamp(&mut x);
            let fx = eval(&x, &mut evaluations);
            *vertex = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        evaluations,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = log_grid(10.0, 5000.0, 5);
        assert_eq!(g[0], 10.0);
        assert_eq!(g[4], 5000.0);
        assert!((g[2] - (10.0f64 * 5000.0).sqrt()).abs() < 1e-9);
        assert_eq!(
            linear_grid(600.0, 4000.0, 5),
            vec![600.0, 1450.0, 2300.0, 3150.0, 4000.0]
        );
    }

    #[test]
    fn golden_section_parabola() {
        let m = golden_section(|x| (x - 812.3).powi(2), 10.0, 5000.0, 1.0, 200);
        assert!(m.converged);
        assert!((m.x[0] - 812.3).abs() < 1.0);
    }

    #[test]
    fn golden_section_treats_nan_as_worst() {
        let m = golden_section(
            |x| if x > 50.0 { f64::NAN } else { (x - 20.0).abs() },
            0.0,
            100.0,
            1e-3,
            200,
        );
        assert!((m.x[0] - 20.0).abs() < 1e-2);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions {
            spread_tolerance: 1e-14,
            max_iterations: 5000,
            ..Default::default()
        };
        let m = nelder_mead(
            rosen,
            &[-1.2, 1.0],
            &[0.5, 0.5],
            &[-5.0, -5.0],
            &[5.0, 5.0],
            &opts,
        );
        assert!(m.converged);
        assert!(
            (m.x[0] - 1.0).abs() < 1e-3 && (m.x[1] - 1.0).abs() < 1e-3,
            "{:?}",
            m.x
        );
    }

    #[test]
    fn nelder_mead_respects_box() {
        let f = |x: &[f64]| (x[0] - 10.0).powi(2) + (x[1] + 10.0).powi(2);
        let m = nelder_mead(
            f,
            &[0.5, 0.5],
            &[0.25, 0.25],
            &[0.0, 0.0],
            &[1.0, 1.0],
            &NelderMeadOptions::default(),
        );
        assert!(
            (m.x[0] - 1.0).abs() < 1e-3 && m.x[1].abs() < 1e-3,
            "{:?}",
            m.x
        );
    }

    #[test]
    fn nelder_mead_is_deterministic() {
        let f = |x: &[f64]| (x[0] - 0.3).abs() + (x[1] - 0.7).powi(2) + (x[2] * 3.0).sin();
        let run = || {
            nelder_mead(
                f,
                &[0.5, 0.5, 0.5],
                &[0.1, 0.1, 0.1],
                &[0.0; 3],
                &[1.0; 3],
                &NelderMeadOptions::default(),
            )
        };
        assert_eq!(run(), run());
    }
}
