//! Mesh-refinement studies and small curve utilities.
//!
//! The arc study solves the same 45° cantilever arc on a ladder of
//! meshes plus a fine self-converged reference and reports the
//! relative L2 centerline error per level together with the observed
//! convergence orders.  Levels are independent, so they run on scoped
//! worker threads when asked to.

use crate::norms::{l2_error, FiberCurve};
use crate::run::{run_scenario, BenchError, RunOutcome};
use crate::scenarios::{generate_arc_benchmark, ArcVariant};

/// Outcome of one refinement ladder.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    /// `(element count, relative L2 error)` per level, coarse to fine.
    pub levels: Vec<(usize, f64)>,
    /// `log2(e_i / e_{i+1})` between consecutive levels — the observed
    /// order under mesh halving.
    pub orders: Vec<f64>,
}

/// Map `f` over `0..count` on up to `threads` scoped workers,
/// preserving order.  Worker panics propagate.
pub fn parallel_map<T, F>(count: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = threads.max(1).min(count.max(1));
    let mut out: Vec<Option<T>> = (0..count).map(|_| None).collect();
    if workers <= 1 {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = Some(f(i));
        }
    } else {
        let results = std::thread::scope(|scope| {
            let f = &f;
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    scope.spawn(move || {
                        let mut local = Vec::new();
                        let mut i = w;
                        while i < count {
                            local.push((i, f(i)));
                            i += workers;
                        }
                        local
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("study worker panicked"))
                .collect::<Vec<_>>()
        });
        for (i, v) in results {
            out[i] = Some(v);
        }
    }
    out.into_iter().map(|o| o.expect("every index mapped")).collect()
}

/// Solve the arc on every level plus an `n_ref`-element reference and
/// measure each level against it.  The reference always uses the
/// locking-free reduced quadrature, whatever the levels use — a locked
/// reference would corrupt the thing being measured.
pub fn arc_study(
    variant: ArcVariant,
    reduced: bool,
    levels: &[usize],
    n_ref: usize,
    threads: usize,
) -> Result<ConvergenceStudy, BenchError> {
    assert!(levels.windows(2).all(|w| w[1] > w[0]), "levels must increase");
    assert!(n_ref > *levels.last().expect("at least one level"));
    let mut tasks: Vec<(usize, bool)> = levels.iter().map(|&n| (n, reduced)).collect();
    tasks.push((n_ref, true));
    let mut outcomes: Vec<Result<RunOutcome, BenchError>> =
        parallel_map(tasks.len(), threads, |i| {
            let (n, red) = tasks[i];
            run_scenario(&generate_arc_benchmark(n, variant, red))
        });
    let reference = outcomes.pop().expect("reference task")?;
    let ref_curve = FiberCurve::from_model(&reference.model, &reference.final_state, 0);
    let mut table = Vec::with_capacity(levels.len());
    for (outcome, &n) in outcomes.into_iter().zip(levels) {
        let outcome = outcome?;
        let curve = FiberCurve::from_model(&outcome.model, &outcome.final_state, 0);
        table.push((n, l2_error(&curve, &ref_curve)));
    }
    let orders = table
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).log2())
        .collect();
    Ok(ConvergenceStudy {
        levels: table,
        orders,
    })
}

// ---------------------------------------------------------------------
// Curve utilities
// ---------------------------------------------------------------------

/// Linear interpolation on a strictly increasing `(x, y)` table.
/// Panics outside the table — extrapolating a measured curve silently
/// is how comparisons go wrong.
pub fn interp_linear(curve: &[(f64, f64)], x: f64) -> f64 {
    assert!(curve.len() >= 2, "need at least two points");
    let (x0, _) = curve[0];
    let (x1, _) = curve[curve.len() - 1];
    assert!(
        (x0..=x1).contains(&x),
        "query {x} outside the table [{x0}, {x1}]"
    );
    for w in curve.windows(2) {
        let ((a, ya), (b, yb)) = (w[0], w[1]);
        if x <= b {
            return ya + (yb - ya) * (x - a) / (b - a);
        }
    }
    curve[curve.len() - 1].1
}

/// Coefficient of determination of the best straight-line fit through
/// `(x, y)` points: 1 means perfectly linear.
pub fn r_squared_linear(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    assert!(points.len() >= 3, "an R² over fewer than 3 points is vacuous");
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in points {
        sxx += (x - mean_x).powi(2);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y).powi(2);
    }
    assert!(sxx > 0.0, "all abscissae coincide");
    if syy == 0.0 {
        // A constant is a perfect line.
        return 1.0;
    }
    let ss_res = syy - sxy * sxy / sxx;
    1.0 - ss_res / syy
}
