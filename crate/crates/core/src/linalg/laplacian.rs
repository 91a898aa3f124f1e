use crate::linalg::{SparseSpdMatrix, SpectralBounds};

/// Coordinates `(x1, x2)` of interior grid point `index` on the uniform grid
/// with `m` interior points per dimension, `h = 1/(m+1)`.
///
/// Ordering is row-major: `index = row * m + col`, where `col` runs along
/// the horizontal coordinate `x1` and `row` along `x2`.
pub fn grid_point(m: usize, index: usize) -> (f64, f64) {
    let h = 1.0 / (m as f64 + 1.0);
    let (row, col) = (index / m, index % m);
    ((col as f64 + 1.0) * h, (row as f64 + 1.0) * h)
}

/// Five-point finite-difference matrix of `-Laplace` on `(0,1)^2` with
/// homogeneous Dirichlet conditions: `4/h^2` on the diagonal and `-1/h^2`
/// for grid neighbours.
///
/// The analytic extreme eigenvalues `(4/h^2)(sin^2(k pi h/2) + sin^2(l pi h/2))`
/// are attached as cached spectral bounds, widened by 1%.
pub fn assemble_laplacian_2d(m: usize) -> SparseSpdMatrix {
    assert!(m >= 1, "need at least one interior point per dimension");
    let h = 1.0 / (m as f64 + 1.0);
    let inv_h2 = 1.0 / (h * h);
    let n = m * m;
    let mut t = Vec::with_capacity(5 * n);
    for row in 0..m {
        for col in 0..m {
            let i = row * m + col;
            t.push((i, i, 4.0 * inv_h2));
            if col > 0 {
                t.push((i, i - 1, -inv_h2));
            }
            if col + 1 < m {
                t.push((i, i + 1, -inv_h2));
            }
            if row > 0 {
                t.push((i, i - m, -inv_h2));
            }
            if row + 1 < m {
                t.push((i, i + m, -inv_h2));
            }
        }
    }
    let s = |j: usize| (j as f64 * std::f64::consts::PI * h / 2.0).sin().powi(2);
    let lmin = 8.0 * inv_h2 * s(1);
    let lmax = 8.0 * inv_h2 * s(m);
    SparseSpdMatrix::from_triplets(n, &t)
        .expect("five-point stencil is symmetric")
        .with_bounds(SpectralBounds::widened(lmin, lmax, 0.01))
        .expect("analytic bounds are ordered")
}
