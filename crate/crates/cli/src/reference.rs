//! Tabulated reference values that the computed tables are checked against.

/// Nonzero oscillator Bethe roots for `N = 1, 2, 3` (scale 1).
pub fn qho_roots(n: usize) -> Option<Vec<f64>> {
    match n {
        1 => Some(vec![0.0]),
        2 => Some(vec![-0.5f64.sqrt(), 0.5f64.sqrt()]),
        3 => Some(vec![-1.5f64.sqrt(), 0.0, 1.5f64.sqrt()]),
        _ => None,
    }
}

/// Hydrogen Bethe roots for principal number `n = 2, 3, 4` and `l = 0`.
pub fn hydrogen_roots(n: usize) -> Option<Vec<f64>> {
    let s3 = 3f64.sqrt();
    match n {
        2 => Some(vec![2.0]),
        3 => Some(vec![1.5 * (3.0 - s3), 1.5 * (3.0 + s3)]),
        4 => Some(vec![1.871, 6.618, 15.517]),
        _ => None,
    }
}

/// `|x|` levels: the exact column.
pub const ABS_TRUE: [f64; 10] = [
    1.01879, 2.33811, 3.2482, 4.08795, 4.8201, 5.52056, 6.16311, 6.78311, 7.3721, 7.94413,
];

/// `|x|` levels: the naive Bohr–Sommerfeld column.
pub const ABS_NAIVE: [f64; 10] = [
    1.1154602372253557,
    2.320250794710102,
    3.2616255199180713,
    4.081810015382323,
    4.826316143499807,
    5.517163872783549,
    6.167128465231806,
    6.784454480834836,
    7.374853108941933,
    7.942486663292496,
];

/// Voros spectrum `theta_n` at `E = 1`, `u2 = 1e-8`, `l = 1e-5`: computed column.
pub const VOROS_COMPUTED: [f64; 8] = [
    0.02852, 1.26107, 1.76443, 2.11220, 2.35925, 2.56402, 2.72669, 2.87390,
];

/// Voros spectrum: exact column.
pub const VOROS_TRUE: [f64; 8] = [
    0.02792, 1.27401, 1.76715, 2.11207, 2.35919, 2.56272, 2.72787, 2.87165,
];
