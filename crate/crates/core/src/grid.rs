//! Parameter grids used by the optimized bounds.

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive (both positive).
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

pub const GRID_POINTS: usize = 50;
pub const FREE_PARAM_POINTS: usize = 30;

/// Orders for the error-exponent bound; α = 1 is excluded by 1e-3.
pub fn exponent_alphas() -> Vec<f64> {
    linspace(1.001, 2.0, GRID_POINTS)
}

/// Orders for the strong-converse and packing bounds; both endpoints of
/// [½, 1] are excluded by 1e-3.
pub fn converse_alphas() -> Vec<f64> {
    linspace(0.501, 0.999, GRID_POINTS)
}

/// Default c grid for the one-shot converse and the converse bound.
pub fn c_grid() -> Vec<f64> {
    logspace(1e-2, 1e2, FREE_PARAM_POINTS)
}
