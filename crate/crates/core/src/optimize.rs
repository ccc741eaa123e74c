//! Small one-dimensional numerical routines used by the scans.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes a unimodal function on `[lo, hi]` by golden-section search.
///
/// Stops when the bracket is narrower than `rel_tol * max(|x|, abs_floor)`.
/// Returns `(x_min, f(x_min))`.
pub fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> (f64, f64) {
    let abs_floor = 1e-300_f64.max((hi - lo).abs() * 1e-15);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rel_tol * mid.abs().max(abs_floor) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Scans `grid`, then refines the best bracket with golden-section search.
pub fn grid_then_golden<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], rel_tol: f64) -> (f64, f64) {
    assert!(grid.len() >= 2, "grid needs at least two points");
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let (ibest, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let lo = grid[ibest.saturating_sub(1)];
    let hi = grid[(ibest + 1).min(grid.len() - 1)];
    let (x, fx) = golden_section(&mut f, lo, hi, rel_tol);
    if fx <= vals[ibest] {
        (x, fx)
    } else {
        (grid[ibest], vals[ibest])
    }
}

/// Bisection on a predicate that is `false` below and `true` above the
/// threshold. Returns the midpoint once the bracket is below `rel_tol`.
pub fn bisect_predicate<F: FnMut(f64) -> bool>(
    mut above: F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= rel_tol * mid.abs() {
            return mid;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ordinary least-squares fit `y = slope * x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// `n` points spaced evenly from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `n` points spaced logarithmically from `a` to `b` inclusive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 1.3).powi(2) + 2.0, 0.0, 5.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-14);
    }

    #[test]
    fn bisect_threshold() {
        let t = bisect_predicate(|x| x > std::f64::consts::PI, 0.0, 10.0, 1e-12);
        assert!((t - std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn fit_recovers_power_law() {
        let x = logspace(1.0, 1e4, 9);
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-0.75)).collect();
        assert!((log_log_slope(&x, &y) + 0.75).abs() < 1e-12);
    }
}
