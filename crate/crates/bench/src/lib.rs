//! Fixtures shared by the benchmarks.

use theta_core::exactlin::{Matrix, Scalar};
use theta_core::pairs::{DualPairSpec, Slot};

/// The pairs the acceptance suite spends most of its time on.
pub fn fixture_pairs() -> Vec<(&'static str, DualPairSpec)> {
    vec![
        ("sp2_o22", DualPairSpec::r(1, 2, 2, Slot::First)),
        ("sp2_o33", DualPairSpec::r(1, 3, 3, Slot::First)),
        ("u11_u22", DualPairSpec::c(1, 1, 2, 2, Slot::First)),
        ("ostar2_sp11", DualPairSpec::h(1, 1, 1, Slot::First)),
        ("sp2c_o4c", DualPairSpec::cx(1, 4, Slot::First)),
    ]
}

/// Dense `n x n` Gaussian-integer matrix with a fixed pattern of small entries.
pub fn dense_matrix(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |r, c| {
        let k = (r * 7 + c * 3 + r * c) as i64;
        Scalar::gauss(k % 5 - 2, (k / 5) % 3 - 1)
    })
}
