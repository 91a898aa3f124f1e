use crate::error::{Error, Result};
use crate::linalg::{pcg_masked, SparseSpdMatrix};
use crate::DenseVector;

use super::data::{classify_sets, ViProblemData, ViSolution};

const MAX_SWEEPS: usize = 200;
const STALL_SWEEPS: usize = 5;
const PROX_ITERS: usize = 20_000;
/// Residual checks inside the proximal-gradient fallback.
const PROX_CHECK_EVERY: usize = 10;
const MAX_REFINEMENTS: usize = 3;

fn soft(x: f64, t: f64) -> f64 {
    x.signum() * (x.abs() - t).max(0.0)
}

/// `max_i A_ii |y_i - soft(y_i - r_i/A_ii, nu/A_ii)|` over `max(1, |u|_inf)`
/// with `r = Ay - u`; zero exactly at the solution.
fn natural_residual(
    a: &SparseSpdMatrix,
    nu: f64,
    u: &DenseVector,
    y: &DenseVector,
    ay: &DenseVector,
) -> f64 {
    let diag = a.diagonal();
    let mut worst: f64 = 0.0;
    for i in 0..y.len() {
        let d = diag[i];
        let r = ay[i] - u[i];
        let p = soft(y[i] - r / d, nu / d);
        worst = worst.max(d * (y[i] - p).abs());
    }
    worst / u.amax().max(1.0)
}

struct Guess {
    active: Vec<bool>,
    sign: Vec<f64>,
}

impl Guess {
    /// Sets from the predictor `z_i = nu q_i + A_ii y_i`.
    fn from_predictor(a: &SparseSpdMatrix, nu: f64, y: &DenseVector, q: &DenseVector) -> Self {
        let diag = a.diagonal();
        let mut active = vec![false; y.len()];
        let mut sign = vec![0.0; y.len()];
        for i in 0..y.len() {
            let z = nu * q[i] + diag[i] * y[i];
            if z.abs() <= nu {
                active[i] = true;
            } else {
                sign[i] = z.signum();
            }
        }
        Self { active, sign }
    }

    fn same(&self, other: &Guess) -> bool {
        self.active == other.active && self.sign == other.sign
    }
}

/// Solves the VI from a cold start (`y = 0`).
pub fn solve_vi(data: &ViProblemData, u: &DenseVector, tol: f64) -> Result<ViSolution> {
    solve_vi_warm(data, u, tol, None)
}

/// Primal-dual active-set iteration, optionally warm started from the sets
/// of a previous solution.
///
/// Each sweep fixes `y = 0` on the guessed active set, solves the reduced
/// SPD system `A_cc y_c = u_c - nu s_c` on the complement, recovers
/// `q = (u - Ay)/nu` and reclassifies. If the residual stalls for five
/// sweeps, accelerated proximal-gradient iterations with step
/// `1/lambda_max` run until the residual drops a hundredfold, or to `tol`, before
/// returning to the active-set sweeps.
pub fn solve_vi_warm(
    data: &ViProblemData,
    u: &DenseVector,
    tol: f64,
    warm: Option<&ViSolution>,
) -> Result<ViSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let a = data.a.as_ref();
    let n = a.dim();
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.len(),
        });
    }
    let nu = data.nu;
    let cg_tol = (0.01 * tol).max(1e-15);
    let cg_iter = 20 * n + 100;

    let mut guess = match warm {
        Some(w) if w.y.len() == n => Guess::from_predictor(a, nu, &w.y, &w.q),
        _ => Guess::from_predictor(a, nu, &DenseVector::zeros(n), &(u / nu)),
    };
    let mut best = f64::INFINITY;
    let mut stall = 0;
    let mut last = None;

    for _sweep in 0..MAX_SWEEPS {
        let rhs = DenseVector::from_fn(n, |i, _| {
            if guess.active[i] {
                0.0
            } else {
                u[i] - nu * guess.sign[i]
            }
        });
        let mut y = solve_masked(a, &guess.active, &rhs, cg_tol, cg_iter)?;
        let mut ay = a.mul_vec(&y);
        // Iterative refinement of the reduced system; CG alone stalls a
        // little above the tightest tolerances.
        for _ in 0..MAX_REFINEMENTS {
            let r =
                DenseVector::from_fn(n, |i, _| if guess.active[i] { 0.0 } else { rhs[i] - ay[i] });
            if r.amax() <= 1e-3 * tol * u.amax().max(1.0) {
                break;
            }
            y += solve_masked(a, &guess.active, &r, cg_tol, cg_iter)?;
            ay = a.mul_vec(&y);
        }
        let q = (u - &ay) / nu;
        let res = natural_residual(a, nu, u, &y, &ay);
        if res <= tol {
            return Ok(finish(data, y, q, res));
        }
        let next = Guess::from_predictor(a, nu, &y, &q);
        if res < best * (1.0 - 1e-3) {
            best = res;
            stall = 0;
        } else {
            stall += 1;
        }
        let fixed = next.same(&guess);
        last = Some(res);
        if stall >= STALL_SWEEPS || fixed {
            let (y_pg, q_pg, res_pg) = prox_gradient(a, nu, u, y, tol, 1e-2 * res)?;
            if res_pg <= tol {
                return Ok(finish(data, y_pg, q_pg, res_pg));
            }
            guess = Guess::from_predictor(a, nu, &y_pg, &q_pg);
            stall = 0;
            best = f64::INFINITY;
        } else {
            guess = next;
        }
    }
    Err(Error::NotConverged {
        solver: "vi active set",
        iterations: MAX_SWEEPS,
        residual: last.unwrap_or(f64::INFINITY),
    })
}

fn solve_masked(
    a: &SparseSpdMatrix,
    mask: &[bool],
    rhs: &DenseVector,
    tol: f64,
    max_iter: usize,
) -> Result<DenseVector> {
    if mask.iter().all(|&m| m) {
        return Ok(DenseVector::zeros(a.dim()));
    }
    let out = pcg_masked(a, Some(mask), rhs, tol, max_iter);
    // The refinement loop and the natural residual judge accuracy; only a
    // solve that failed to make progress is an error.
    if !out.converged && !(out.residual < 1e-6) {
        return Err(Error::NotConverged {
            solver: "vi reduced cg",
            iterations: out.iterations,
            residual: out.residual,
        });
    }
    Ok(out.x)
}

/// FISTA with gradient restart from `y`. Stops once the natural residual
/// is at most `tol` and at most `target`, or after `PROX_ITERS` steps when
/// it is at least below `target`.
fn prox_gradient(
    a: &SparseSpdMatrix,
    nu: f64,
    u: &DenseVector,
    mut y: DenseVector,
    tol: f64,
    target: f64,
) -> Result<(DenseVector, DenseVector, f64)> {
    let step = 1.0 / a.cached_bounds()?.lambda_max_upper;
    let mut z = y.clone();
    let mut t = 1.0_f64;
    let mut res = f64::INFINITY;
    for it in 1..=PROX_ITERS {
        let grad = a.mul_vec(&z) - u;
        let next = DenseVector::from_fn(y.len(), |i, _| soft(z[i] - step * grad[i], step * nu));
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        // Restart when the momentum points uphill.
        let uphill = (&z - &next).dot(&(&next - &y)) > 0.0;
        if uphill {
            z = next.clone();
            t = 1.0;
        } else {
            z = &next + (&next - &y) * ((t - 1.0) / t_next);
            t = t_next;
        }
        y = next;
        if it % PROX_CHECK_EVERY == 0 {
            res = natural_residual(a, nu, u, &y, &a.mul_vec(&y));
            if res <= tol || (res <= target && it >= 10 * PROX_CHECK_EVERY) {
                break;
            }
        }
    }
    let ay = a.mul_vec(&y);
    if !res.is_finite() {
        res = natural_residual(a, nu, u, &y, &ay);
    }
    let q = (u - ay) / nu;
    Ok((y, q, res))
}

fn finish(data: &ViProblemData, y: DenseVector, q: DenseVector, residual: f64) -> ViSolution {
    let sets = classify_sets(&y, &q, data.act_tol);
    ViSolution {
        y,
        q,
        sets,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{assemble_laplacian_2d, SparseSpdMatrix};
    use crate::DenseMatrix;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> DenseVector {
        DenseVector::from_row_slice(x)
    }

    fn scalar() -> ViProblemData {
        ViProblemData::new(SparseSpdMatrix::diagonal_matrix(&[2.0]).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn scalar_examples() {
        let s = solve_vi(&scalar(), &v(&[3.0]), 1e-12).unwrap();
        assert!((s.y[0] - 1.0).abs() < 1e-14 && (s.q[0] - 1.0).abs() < 1e-14);
        assert_eq!(s.sets.inactive.as_slice(), &[0]);

        let s = solve_vi(&scalar(), &v(&[0.5]), 1e-12).unwrap();
        assert_eq!(s.y[0], 0.0);
        assert!((s.q[0] - 0.5).abs() < 1e-15);
        assert_eq!(s.sets.strongly_active.as_slice(), &[0]);
    }

    #[test]
    fn decoupled_biactive() {
        let data = ViProblemData::new(SparseSpdMatrix::diagonal_matrix(&[2.0, 2.0]).unwrap(), 1.0)
            .unwrap();
        let s = solve_vi(&data, &v(&[3.0, 1.0]), 1e-12).unwrap();
        assert!((s.y - v(&[1.0, 0.0])).norm() < 1e-14);
        assert!((s.q - v(&[1.0, 1.0])).norm() < 1e-14);
        assert_eq!(s.sets.biactive.as_slice(), &[1]);
    }

    #[test]
    fn soft_threshold_closed_form() {
        let data = scalar();
        for k in -40..=40 {
            let u = k as f64 * 0.125;
            let s = solve_vi(&data, &v(&[u]), 1e-12).unwrap();
            let want = if u >= 1.0 {
                0.5 * (u - 1.0)
            } else if u <= -1.0 {
                0.5 * (u + 1.0)
            } else {
                0.0
            };
            assert!((s.y[0] - want).abs() < 1e-14, "u={u}");
        }
    }

    #[test]
    fn laplacian_with_large_nu_is_zero() {
        let a = assemble_laplacian_2d(4);
        let data = ViProblemData::new(a, 50.0).unwrap();
        let u = DenseVector::from_fn(16, |i, _| 30.0 * ((i as f64) * 0.7).sin());
        let s = solve_vi(&data, &u, 1e-12).unwrap();
        assert_eq!(s.y.amax(), 0.0);
    }

    #[test]
    fn warm_start_reaches_same_solution() {
        let data = ViProblemData::new(assemble_laplacian_2d(6), 10.0).unwrap();
        let u = DenseVector::from_fn(36, |i, _| 400.0 * ((i as f64) * 0.37).cos());
        let cold = solve_vi(&data, &u, 1e-12).unwrap();
        let u2 = &u * 1.01;
        let warm = solve_vi_warm(&data, &u2, 1e-12, Some(&cold)).unwrap();
        let cold2 = solve_vi(&data, &u2, 1e-12).unwrap();
        assert!((warm.y - cold2.y).amax() < 1e-12);
    }

    #[test]
    fn prox_gradient_fallback_reaches_tolerance_alone() {
        let a = assemble_laplacian_2d(20);
        let u = DenseVector::from_fn(400, |i, _| 60.0 * ((i as f64) * 0.113).sin());
        let (y, _, res) = prox_gradient(&a, 4.0, &u, DenseVector::zeros(400), 1e-10, 0.0).unwrap();
        assert!(res <= 1e-10, "{res}");
        let data = ViProblemData::new(a, 4.0).unwrap();
        let exact = solve_vi(&data, &u, 1e-12).unwrap();
        assert!((y - exact.y).amax() < 1e-8);
    }

    #[test]
    fn warm_start_from_opposite_signs() {
        // Every index changes sign or status; the sweeps alone may cycle here.
        let data = ViProblemData::new(assemble_laplacian_2d(30), 4.0).unwrap();
        let u = DenseVector::from_fn(900, |i, _| 3000.0 * ((i as f64) * 0.05).sin());
        let first = solve_vi(&data, &u, 1e-9).unwrap();
        let flipped = u.map(|v| -0.5 * v + 3.0);
        let warm = solve_vi_warm(&data, &flipped, 1e-9, Some(&first)).unwrap();
        let cold = solve_vi(&data, &flipped, 1e-9).unwrap();
        assert!(warm.residual <= 1e-9);
        assert!((&warm.y - &cold.y).amax() < 1e-8 * (1.0 + cold.y.amax()));
    }

    fn random_spd(n: usize, entries: &[f64]) -> SparseSpdMatrix {
        let m = DenseMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
        let a = &m * m.transpose() + DenseMatrix::identity(n, n) * 0.5;
        SparseSpdMatrix::from_dense(&a).unwrap()
    }

    fn objective(a: &SparseSpdMatrix, nu: f64, u: &DenseVector, y: &DenseVector) -> f64 {
        0.5 * y.dot(&a.mul_vec(y)) - u.dot(y) + nu * y.iter().map(|v| v.abs()).sum::<f64>()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn solution_satisfies_complementarity(n in 1usize..7,
                                              entries in proptest::collection::vec(-1.0f64..1.0, 36),
                                              us in proptest::collection::vec(-4.0f64..4.0, 6),
                                              nu in 0.1f64..3.0) {
            let a = random_spd(n, &entries);
            let u = DenseVector::from_fn(n, |i, _| us[i]);
            let data = ViProblemData::new(a.clone(), nu).unwrap();
            let s = solve_vi(&data, &u, 1e-12).unwrap();
            prop_assert!(s.residual <= 1e-12);
            let eq = a.mul_vec(&s.y) + &s.q * nu - &u;
            prop_assert!(eq.amax() <= 1e-10 * (1.0 + u.amax()));
            for i in 0..n {
                prop_assert!(s.q[i].abs() <= 1.0 + 1e-9);
                prop_assert!((s.y[i] * s.q[i] - s.y[i].abs()).abs() <= 1e-9);
            }
            // Local optimality spot check against perturbations.
            let f0 = objective(&a, nu, &u, &s.y);
            for k in 0..500 {
                let p = DenseVector::from_fn(n, |i, _| 1e-3 * (((k * 31 + i * 17) as f64) * 0.618).sin());
                prop_assert!(objective(&a, nu, &u, &(&s.y + p)) >= f0 - 1e-12);
            }
        }
    }
}
