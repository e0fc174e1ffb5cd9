//! Reference Monte Carlo values used by the regression checks and the
//! `tables` command.
//!
//! Critical values are on the `π^{-d/2}` scale and keyed by the upper-tail
//! level they estimate. Rejection rates are percentages at `α = 0.05`.

/// `β` grid of [`CRITICAL_VALUES`].
pub const CRITICAL_BETAS: [f64; 7] = [2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 10.0];

/// `(d, n, α, values over CRITICAL_BETAS)`.
pub const CRITICAL_VALUES: [(usize, usize, f64, [f64; 7]); 36] = [
    (2, 20, 0.10, [0.213, 0.751e-1, 3.269e-2, 1.639e-2, 5.408e-3, 2.266e-3, 2.241e-4]),
    (2, 20, 0.05, [0.339, 1.147e-1, 4.857e-2, 2.380e-2, 7.638e-3, 3.150e-3, 3.025e-4]),
    (2, 50, 0.10, [0.391, 1.246e-1, 5.098e-2, 2.436e-2, 7.594e-3, 3.078e-3, 2.875e-4]),
    (2, 50, 0.05, [0.661, 1.997e-1, 7.802e-2, 3.624e-2, 10.917e-3, 4.330e-3, 3.897e-4]),
    (2, 100, 0.10, [0.511, 1.539e-1, 6.073e-2, 2.838e-2, 8.620e-3, 3.429e-3, 3.111e-4]),
    (2, 100, 0.05, [0.868, 2.432e-1, 9.168e-2, 4.153e-2, 12.094e-3, 4.724e-3, 4.143e-4]),
    (2, 200, 0.10, [0.612, 1.757e-1, 6.719e-2, 3.085e-2, 9.181e-3, 3.616e-3, 3.232e-4]),
    (2, 200, 0.05, [1.028, 2.726e-1, 9.908e-2, 4.382e-2, 12.528e-3, 4.845e-3, 4.221e-4]),
    (2, 300, 0.10, [0.679, 1.894e-1, 7.114e-2, 3.223e-2, 9.466e-3, 3.719e-3, 3.296e-4]),
    (2, 300, 0.05, [1.132, 2.878e-1, 10.259e-2, 4.518e-2, 12.748e-3, 4.905e-3, 4.232e-4]),
    (2, 400, 0.10, [0.701, 1.925e-1, 7.165e-2, 3.248e-2, 9.502e-3, 3.721e-3, 3.283e-4]),
    (2, 400, 0.05, [1.148, 2.868e-1, 10.084e-2, 4.417e-2, 12.521e-3, 4.843e-3, 4.187e-4]),
    (3, 20, 0.10, [0.356, 1.066e-1, 4.095e-2, 1.851e-2, 5.218e-3, 1.942e-3, 1.413e-4]),
    (3, 20, 0.05, [0.520, 1.504e-1, 5.629e-2, 2.503e-2, 6.886e-3, 2.518e-3, 1.773e-4]),
    (3, 50, 0.10, [0.719, 1.906e-1, 6.760e-2, 2.894e-2, 7.598e-3, 2.709e-3, 1.828e-4]),
    (3, 50, 0.05, [1.153, 2.879e-1, 9.789e-2, 4.073e-2, 10.317e-3, 3.593e-3, 2.334e-4]),
    (3, 100, 0.10, [0.988, 2.433e-1, 8.258e-2, 3.426e-2, 8.696e-3, 3.043e-3, 1.992e-4]),
    (3, 100, 0.05, [1.646, 3.732e-1, 11.943e-2, 4.788e-2, 11.572e-3, 3.945e-3, 2.489e-4]),
    (3, 200, 0.10, [1.232, 2.851e-1, 9.322e-2, 3.781e-2, 9.365e-3, 3.231e-3, 2.078e-4]),
    (3, 200, 0.05, [2.046, 4.319e-1, 13.243e-2, 5.167e-2, 12.210e-3, 4.123e-3, 2.567e-4]),
    (3, 300, 0.10, [1.332, 2.979e-1, 9.555e-2, 3.849e-2, 9.431e-3, 3.242e-3, 2.072e-4]),
    (3, 300, 0.05, [2.187, 4.441e-1, 13.364e-2, 5.156e-2, 12.105e-3, 4.073e-3, 2.527e-4]),
    (3, 400, 0.10, [1.397, 3.061e-1, 9.725e-2, 3.893e-2, 9.509e-3, 3.260e-3, 2.084e-4]),
    (3, 400, 0.05, [2.245, 4.481e-1, 13.341e-2, 5.122e-2, 12.010e-3, 4.046e-3, 2.519e-4]),
    (5, 20, 0.10, [0.597, 1.347e-1, 4.130e-2, 1.554e-2, 3.275e-3, 0.971e-3, 3.884e-5]),
    (5, 20, 0.05, [0.774, 1.691e-1, 5.089e-2, 1.886e-2, 3.900e-3, 1.142e-3, 4.474e-5]),
    (5, 50, 0.10, [1.519, 2.868e-1, 7.862e-2, 2.731e-2, 5.215e-3, 1.460e-3, 5.283e-5]),
    (5, 50, 0.05, [2.332, 4.130e-1, 10.801e-2, 3.633e-2, 6.633e-3, 1.809e-3, 6.260e-5]),
    (5, 100, 0.10, [2.315, 3.947e-1, 10.132e-2, 3.381e-2, 6.134e-3, 1.667e-3, 5.768e-5]),
    (5, 100, 0.05, [3.782, 5.884e-1, 14.199e-2, 4.530e-2, 7.779e-3, 2.051e-3, 6.782e-5]),
    (5, 200, 0.10, [3.047, 4.744e-1, 11.541e-2, 3.736e-2, 6.565e-3, 1.755e-3, 5.962e-5]),
    (5, 200, 0.05, [4.969, 6.964e-1, 15.880e-2, 4.896e-2, 8.131e-3, 2.112e-3, 6.875e-5]),
    (5, 300, 0.10, [3.346, 5.016e-1, 11.974e-2, 3.829e-2, 6.636e-3, 1.769e-3, 5.985e-5]),
    (5, 300, 0.05, [5.445, 7.343e-1, 16.307e-2, 4.960e-2, 8.119e-3, 2.100e-3, 6.832e-5]),
    (5, 400, 0.10, [3.608, 5.234e-1, 12.292e-2, 3.889e-2, 6.679e-3, 1.776e-3, 5.997e-5]),
    (5, 400, 0.05, [5.838, 7.586e-1, 16.477e-2, 4.958e-2, 8.085e-3, 2.085e-3, 6.821e-5]),
];

/// Sample size of the i.i.d. power grid.
pub const IID_POWER_N: usize = 50;

/// `β` grid for `T_{n,β}` in [`IID_POWER`].
pub const IID_POWER_BETAS: [f64; 6] = [3.0, 3.5, 4.0, 5.0, 6.0, 10.0];

/// Smoothing parameters of the BHEP comparator in [`IID_POWER`].
pub const IID_POWER_HW_BETAS: [f64; 3] = [0.1, 0.5, 1.0];

/// `(alternative, d, T_{n,β} power over IID_POWER_BETAS, BHEP power)`.
pub const IID_POWER: [(&str, usize, [f64; 6], [f64; 3]); 18] = [
    ("ase:1.75", 2, [72.47, 72.62, 72.43, 72.08, 71.59, 70.34], [67.29, 67.75, 59.91]),
    ("ase:1.75", 3, [82.70, 82.78, 82.76, 82.69, 82.52, 81.92], [79.07, 78.16, 68.60]),
    ("ase:1.75", 5, [90.51, 90.86, 90.95, 91.25, 91.32, 91.05], [88.89, 87.46, 75.71]),
    ("ase:1.85", 2, [54.43, 54.39, 54.35, 53.91, 53.55, 52.59], [50.00, 48.17, 39.35]),
    ("ase:1.85", 3, [62.72, 62.67, 62.61, 62.46, 62.39, 61.58], [57.95, 54.67, 42.44]),
    ("ase:1.85", 5, [75.31, 75.52, 75.65, 75.96, 76.03, 75.63], [71.81, 66.66, 47.82]),
    ("ase:1.95", 2, [24.67, 24.62, 24.52, 24.22, 24.11, 23.56], [22.44, 20.78, 15.38]),
    ("ase:1.95", 3, [29.31, 29.37, 29.47, 29.12, 28.91, 28.45], [26.37, 24.04, 16.79]),
    ("ase:1.95", 5, [38.28, 38.39, 38.37, 38.27, 38.00, 37.55], [33.99, 29.35, 17.39]),
    ("t:5", 2, [58.77, 58.82, 58.74, 58.26, 57.82, 56.21], [51.44, 54.20, 47.58]),
    ("t:5", 3, [40.59, 40.76, 40.98, 41.11, 41.34, 41.31], [39.69, 37.79, 28.99]),
    ("t:5", 5, [87.14, 87.80, 88.43, 89.17, 89.59, 89.76], [86.36, 87.21, 77.92]),
    ("t:7", 2, [42.33, 42.21, 42.16, 41.86, 41.43, 39.68], [36.19, 36.30, 28.97]),
    ("t:7", 3, [55.23, 55.49, 55.51, 55.62, 55.30, 54.38], [49.20, 48.82, 37.89]),
    ("t:7", 5, [71.51, 72.50, 73.17, 74.07, 74.47, 74.30], [69.35, 67.75, 51.33]),
    ("t:10", 2, [28.80, 28.82, 28.73, 28.29, 27.99, 27.12], [24.48, 22.94, 16.23]),
    ("t:10", 3, [38.34, 38.56, 38.58, 38.51, 38.33, 37.00], [32.97, 30.55, 20.84]),
    ("t:10", 5, [51.64, 52.38, 53.01, 53.91, 54.25, 54.33], [48.85, 45.36, 28.41]),
];

/// Sample size and volatility persistence of the GARCH grid.
pub const GARCH_N: usize = 300;
pub const GARCH_GAMMA: f64 = 0.4;

/// `β` grid for `T^G_{n,β}` in [`GARCH_REJECTIONS`].
pub const GARCH_BETAS: [f64; 5] = [2.1, 2.2, 2.3, 2.4, 2.5];

/// Smoothing parameters of the BHEP comparator in [`GARCH_REJECTIONS`].
pub const GARCH_HW_BETAS: [f64; 4] = [1.0, 1.5, 2.0, 2.5];

/// `(innovations, d, r, T^G rejections over GARCH_BETAS, BHEP rejections)`.
pub const GARCH_REJECTIONS: [(&str, usize, f64, [f64; 5], [f64; 4]); 16] = [
    ("normal", 2, 0.0, [4.96, 4.85, 4.81, 4.79, 4.73], [5.06, 4.80, 4.97, 4.82]),
    ("normal", 2, 0.3, [4.14, 4.33, 4.38, 4.40, 4.27], [4.95, 5.45, 5.36, 5.29]),
    ("normal", 3, 0.0, [4.54, 4.71, 4.73, 4.74, 4.73], [4.64, 4.64, 4.88, 4.51]),
    ("normal", 3, 0.3, [4.96, 4.85, 4.81, 4.79, 4.73], [5.06, 4.80, 4.97, 4.82]),
    ("t:10", 2, 0.0, [61.85, 61.20, 59.25, 57.55, 55.50], [26.70, 36.70, 37.20, 34.85]),
    ("t:10", 2, 0.3, [66.95, 66.80, 65.85, 64.15, 61.35], [20.50, 31.70, 32.10, 30.60]),
    ("t:10", 3, 0.0, [81.45, 80.95, 80.15, 79.65, 78.20], [45.75, 55.40, 50.95, 43.80]),
    ("t:10", 3, 0.3, [78.30, 78.05, 78.20, 77.20, 77.15], [42.40, 55.70, 52.85, 44.00]),
    ("gn:1.65", 2, 0.0, [22.40, 21.05, 20.10, 18.95, 17.85], [8.65, 15.20, 16.45, 16.75]),
    ("gn:1.65", 2, 0.3, [18.30, 17.80, 17.70, 16.80, 16.10], [8.00, 14.00, 16.00, 14.30]),
    ("gn:1.65", 3, 0.0, [17.55, 18.40, 18.10, 17.80, 16.90], [9.10, 14.85, 15.35, 15.60]),
    ("gn:1.65", 3, 0.3, [20.00, 19.65, 19.85, 19.80, 18.90], [9.70, 13.95, 15.55, 15.15]),
    ("aep:0.4,1.182,1.820", 2, 0.0, [56.75, 55.50, 53.35, 51.10, 49.00], [29.55, 49.85, 52.85, 51.45]),
    ("aep:0.4,1.182,1.820", 2, 0.3, [52.70, 51.20, 49.65, 47.90, 45.75], [26.35, 45.20, 50.00, 49.20]),
    ("aep:0.4,1.182,1.820", 3, 0.0, [55.40, 55.85, 54.85, 53.75, 51.65], [38.25, 54.25, 55.45, 49.25]),
    ("aep:0.4,1.182,1.820", 3, 0.3, [59.55, 59.30, 58.75, 57.15, 57.00], [33.15, 53.65, 53.90, 49.70]),
];

/// Critical value for `(d, n, β, α)` if the grid has it.
pub fn critical_value(d: usize, n: usize, beta: f64, alpha: f64) -> Option<f64> {
    let j = CRITICAL_BETAS.iter().position(|&b| b == beta)?;
    CRITICAL_VALUES
        .iter()
        .find(|(dd, nn, a, _)| *dd == d && *nn == n && (*a - alpha).abs() < 1e-12)
        .map(|row| row.3[j])
}

/// i.i.d. power (percent) of `T_{n,β}` for an alternative string such as `t:10`.
pub fn iid_power(alt: &str, d: usize, beta: f64) -> Option<f64> {
    let j = IID_POWER_BETAS.iter().position(|&b| b == beta)?;
    IID_POWER
        .iter()
        .find(|(a, dd, _, _)| *a == alt && *dd == d)
        .map(|row| row.2[j])
}

/// GARCH rejection rate (percent) of `T^G_{n,β}`.
pub fn garch_rejection(innovations: &str, d: usize, r: f64, beta: f64) -> Option<f64> {
    let j = GARCH_BETAS.iter().position(|&b| b == beta)?;
    GARCH_REJECTIONS
        .iter()
        .find(|(a, dd, rr, _, _)| *a == innovations && *dd == d && *rr == r)
        .map(|row| row.3[j])
}
