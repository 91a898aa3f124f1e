use crate::error::{Error, Result};
use crate::linalg::{reduced_solve, IndexSet};
use crate::models::GradientBundle;
use crate::DenseVector;

use super::data::{LipschitzConstants, ViProblemData, ViSolution};
use super::solver::solve_vi;

/// Largest possibly biactive set whose powerset is enumerated.
pub const DEFAULT_POWERSET_CAP: usize = 14;
/// Largest biactive set accepted by [`directional_derivative_oracle`].
pub const ORACLE_MAX_BIACTIVE: usize = 8;

/// `G h` for `G = A(N)^{-1} chi(N)`: zero on `N`, reduced solve elsewhere.
pub fn bouligand_apply(
    data: &ViProblemData,
    n_set: &IndexSet,
    h: &DenseVector,
) -> Result<DenseVector> {
    reduced_solve(&data.a, n_set, h)
}

/// `G' grad_y + grad_u` with `G' = chi(N) A(N)^{-1}`; the adjoint vanishes
/// on `N`.
pub fn adjoint_gradient(
    data: &ViProblemData,
    n_set: &IndexSet,
    grad_y: &DenseVector,
    grad_u: &DenseVector,
) -> Result<DenseVector> {
    if grad_u.len() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            found: grad_u.len(),
        });
    }
    Ok(reduced_solve(&data.a, n_set, grad_y)? + grad_u)
}

/// `{i : |y_i| < l_y delta  and  ||q_i| - 1| < l_q delta}`.
pub fn possibly_biactive(sol: &ViSolution, lip: &LipschitzConstants, delta: f64) -> IndexSet {
    let ty = lip.l_y * delta;
    let tq = lip.l_q * delta;
    IndexSet::from_predicate(sol.y.len(), |i| {
        sol.y[i].abs() < ty && (sol.q[i].abs() - 1.0).abs() < tq
    })
}

/// Enumeration policy for the gradient bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BundlePolicy {
    pub cap: usize,
    /// Above the cap, use a reduced family of subsets instead of failing.
    /// Runs using it carry no convergence guarantee.
    pub allow_sampling: bool,
    /// Worker threads for the independent adjoint solves.
    pub workers: usize,
}

impl Default for BundlePolicy {
    fn default() -> Self {
        Self {
            cap: DEFAULT_POWERSET_CAP,
            allow_sampling: false,
            workers: 1,
        }
    }
}

/// Gradient bundle over all elements of the approximate subdifferential at
/// radius `delta`.
///
/// With `P` the possibly biactive set, the elements are `N = (A \ P) u B0`
/// for every `B0` subset of `P`, where `A = A_s u B` is the active set at
/// `u`. Every index that can change status inside the ball belongs to `P`,
/// so each Bouligand element at a point of the ball is enumerated. Subsets
/// are visited in binary counting order over sorted `P`; the second return
/// value reports whether the family was sampled.
pub fn gradient_bundle(
    data: &ViProblemData,
    sol: &ViSolution,
    lip: &LipschitzConstants,
    delta: f64,
    grad_y: &DenseVector,
    grad_u: &DenseVector,
    policy: &BundlePolicy,
) -> Result<(GradientBundle, bool)> {
    let p = possibly_biactive(sol, lip, delta);
    let base = sol.sets.active().difference(&p);
    let pv = p.as_slice().to_vec();
    let (subsets, sampled): (Vec<IndexSet>, bool) = if pv.len() <= policy.cap {
        let subsets = (0u64..(1u64 << pv.len()))
            .map(|mask| {
                pv.iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &i)| i)
                    .collect()
            })
            .collect();
        (subsets, false)
    } else if policy.allow_sampling {
        // Empty, full, the one at u, and single toggles of the one at u.
        let at_u: IndexSet = pv
            .iter()
            .copied()
            .filter(|&i| sol.sets.active().contains(i))
            .collect();
        let mut subsets = vec![IndexSet::empty(), p.clone(), at_u.clone()];
        for &i in &pv {
            let toggled: IndexSet = if at_u.contains(i) {
                at_u.iter().filter(|&j| j != i).collect()
            } else {
                at_u.iter().chain(std::iter::once(i)).collect()
            };
            subsets.push(toggled);
        }
        (subsets, true)
    } else {
        return Err(Error::BiactiveSetTooLarge {
            size: pv.len(),
            cap: policy.cap,
        });
    };

    let sets: Vec<IndexSet> = subsets.iter().map(|b0| base.union(b0)).collect();
    let grads = parallel_map(&sets, policy.workers, |n_set| {
        adjoint_gradient(data, n_set, grad_y, grad_u)
    })?;
    let bundle = GradientBundle::with_provenance(grads, subsets.into_iter().map(Some).collect())?;
    Ok((bundle, sampled))
}

/// Order-preserving map over scoped worker threads.
fn parallel_map<T: Sync, R: Send>(
    items: &[T],
    workers: usize,
    f: impl Fn(&T) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    let workers = workers.max(1).min(items.len().max(1));
    if workers == 1 || items.len() < 8 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let f = &f;
    let parts: Vec<Result<Vec<R>>> = std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(f).collect::<Result<Vec<R>>>()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bundle worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(items.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Directional derivative `S'(u; h)` by brute force over the biactive set.
///
/// `eta` solves the VI on the cone `K = {v : v_i = 0 on A_s, v_i q_i >= 0
/// on B}`. Each biactive component is either fixed to zero or free; for
/// each pattern the reduced system is solved and the cone conditions
/// `eta_i q_i >= 0` (free) and `(A eta - h)_i q_i >= 0` (fixed) are checked.
/// Test-scale only (`|B| <= 8`).
pub fn directional_derivative_oracle(
    data: &ViProblemData,
    u: &DenseVector,
    h: &DenseVector,
) -> Result<DenseVector> {
    let sol = solve_vi(data, u, 1e-13)?;
    let b: Vec<usize> = sol.sets.biactive.as_slice().to_vec();
    if b.len() > ORACLE_MAX_BIACTIVE {
        return Err(Error::OracleFailure(format!(
            "{} biactive indices exceed the oracle limit {ORACLE_MAX_BIACTIVE}",
            b.len()
        )));
    }
    let scale = 1e-9 * (1.0 + h.amax());
    for mask in 0u32..(1u32 << b.len()) {
        let fixed: IndexSet = b
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        let n_set = sol.sets.strongly_active.union(&fixed);
        let eta = reduced_solve(&data.a, &n_set, h)?;
        let w = data.a.mul_vec(&eta) - h;
        let ok = b.iter().all(|&i| {
            if fixed.contains(i) {
                w[i] * sol.q[i] >= -scale
            } else {
                eta[i] * sol.q[i] >= -scale
            }
        });
        if ok {
            return Ok(eta);
        }
    }
    Err(Error::OracleFailure(
        "no sign pattern satisfies the cone conditions".into(),
    ))
}
