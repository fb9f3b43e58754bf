//! Closed-interval uniform grids.

/// Node `k` of a `res`-point grid on `[lo, hi]`, endpoints inclusive.
///
/// Endpoints are returned exactly, and a grid symmetric about zero
/// (`lo == -hi`) is exactly antisymmetric: node `k` is the negation of node
/// `res - 1 - k`, with an exact zero in the middle for odd `res`.
pub fn node(lo: f64, hi: f64, res: usize, k: usize) -> f64 {
    debug_assert!(res >= 2 && k < res);
    let last = res - 1;
    if k == 0 {
        lo
    } else if k == last {
        hi
    } else if lo == -hi {
        let steps = 2 * k as i64 - last as i64;
        hi * steps as f64 / last as f64
    } else {
        lo + (hi - lo) * k as f64 / last as f64
    }
}

pub fn linspace(lo: f64, hi: f64, res: usize) -> Vec<f64> {
    match res {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..res).map(|k| node(lo, hi, res, k)).collect(),
    }
}
