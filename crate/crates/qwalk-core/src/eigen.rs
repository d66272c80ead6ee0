//! Dense complex eigendecomposition via Householder Hessenberg reduction
//! and explicit single-shift QR iteration with Wilkinson shifts.
//!
//! Sized for the collapsed step operators (dimension a few hundred at
//! most). The step operators are unitary, hence normal: eigenvectors of
//! numerically coincident eigenvalues are re-orthonormalized within their
//! cluster, and every returned pair satisfies `||M v - lambda v|| <= 1e-8`
//! or the decomposition reports failure.

use crate::cmatrix::CMatrix;
use crate::C64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("QR iteration failed to converge (active block {lo}..{hi} after {sweeps} sweeps)")]
    NoConvergence { lo: usize, hi: usize, sweeps: usize },
    #[error("eigenpair residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
}

/// Residual tolerance every returned eigenpair must meet.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Eigenvalues with matching unit eigenvectors.
///
/// Each eigenvector is phase-fixed: its largest-magnitude component is
/// real and positive, so repeated runs and comparisons are deterministic.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

struct Givens {
    c: f64,
    s: C64,
}

/// Rotation with `[c, s; -conj(s), c] [f; g] = [r; 0]`, `c` real.
fn givens(f: C64, g: C64) -> (Givens, C64) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return (Givens { c: 1.0, s: C64::new(0.0, 0.0) }, f);
    }
    if fn_ == 0.0 {
        // r = |g|, rotate g up with unit modulus phase
        let s = g.conj() / gn;
        return (Givens { c: 0.0, s }, C64::new(gn, 0.0));
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / d;
    let phase = f / fn_;
    let s = phase * g.conj() / d;
    (Givens { c, s }, phase * d)
}

fn apply_givens_rows(h: &mut CMatrix, g: &Givens, r1: usize, r2: usize, col_from: usize) {
    let n = h.dim();
    for c in col_from..n {
        let x = h[(r1, c)];
        let y = h[(r2, c)];
        h[(r1, c)] = g.c * x + g.s * y;
        h[(r2, c)] = -g.s.conj() * x + g.c * y;
    }
}

fn apply_givens_cols(h: &mut CMatrix, g: &Givens, c1: usize, c2: usize, row_to: usize) {
    for r in 0..=row_to {
        let x = h[(r, c1)];
        let y = h[(r, c2)];
        h[(r, c1)] = g.c * x + g.s.conj() * y;
        h[(r, c2)] = -g.s * x + g.c * y;
    }
}

/// Reduce to upper Hessenberg form by Householder reflections, accumulating
/// the unitary similarity in `q` (which must start as identity).
fn hessenberg(h: &mut CMatrix, q: &mut CMatrix) {
    let n = h.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        // build reflector for column k, rows k+1..n
        let mut norm_x = 0.0f64;
        for r in k + 1..n {
            norm_x += h[(r, k)].norm_sqr();
        }
        norm_x = norm_x.sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm_x;
        // v = x - alpha e1
        let mut v = vec![C64::new(0.0, 0.0); n];
        for r in k + 1..n {
            v[r] = h[(r, k)];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;

        // H <- P H : rows k+1..n, P = I - beta v v^H
        for c in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for r in k + 1..n {
                dot += v[r].conj() * h[(r, c)];
            }
            dot *= beta;
            for r in k + 1..n {
                let vr = v[r];
                h[(r, c)] -= vr * dot;
            }
        }
        // H <- H P : columns k+1..n
        for r in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for c in k + 1..n {
                dot += h[(r, c)] * v[c];
            }
            dot *= beta;
            for c in k + 1..n {
                h[(r, c)] -= dot * v[c].conj();
            }
        }
        // Q <- Q P
        for r in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for c in k + 1..n {
                dot += q[(r, c)] * v[c];
            }
            dot *= beta;
            for c in k + 1..n {
                q[(r, c)] -= dot * v[c].conj();
            }
        }
        // clean the annihilated entries
        h[(k + 1, k)] = alpha;
        for r in k + 2..n {
            h[(r, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Eigenvalue of the trailing 2x2 closest to its bottom-right entry.
fn wilkinson_shift(h: &CMatrix, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Schur decomposition `M = Q T Q^H` with `T` upper triangular.
fn schur(mut h: CMatrix, mut q: CMatrix) -> Result<(CMatrix, CMatrix), EigenError> {
    let n = h.dim();
    if n <= 1 {
        return Ok((h, q));
    }
    let scale = h.max_abs().max(1e-300);
    let negligible = |h: &CMatrix, k: usize| -> bool {
        let bound = f64::EPSILON * (h[(k, k)].norm() + h[(k + 1, k + 1)].norm()).max(scale * f64::EPSILON);
        h[(k + 1, k)].norm() <= bound
    };

    let mut hi = n - 1;
    let mut sweeps_here = 0usize;
    let mut total = 0usize;
    let max_total = 120 * n;
    loop {
        // deflate converged subdiagonals at the active bottom
        while hi > 0 && negligible(&h, hi - 1) {
            h[(hi, hi - 1)] = C64::new(0.0, 0.0);
            hi -= 1;
            sweeps_here = 0;
        }
        if hi == 0 {
            break;
        }
        // find start of the active unreduced block
        let mut lo = hi;
        while lo > 0 && !negligible(&h, lo - 1) {
            lo -= 1;
        }
        if lo > 0 {
            h[(lo, lo - 1)] = C64::new(0.0, 0.0);
        }

        let shift = if sweeps_here > 0 && sweeps_here.is_multiple_of(12) {
            // stagnation: deterministic exceptional shift
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };

        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (g, r) = givens(h[(k, k)], h[(k + 1, k)]);
            h[(k, k)] = r;
            h[(k + 1, k)] = C64::new(0.0, 0.0);
            apply_givens_rows(&mut h, &g, k, k + 1, k + 1);
            rotations.push(g);
        }
        for (k, g) in (lo..hi).zip(&rotations) {
            apply_givens_cols(&mut h, g, k, k + 1, k + 1);
            // accumulate Q <- Q G^H
            let qn = q.dim();
            for r in 0..qn {
                let x = q[(r, k)];
                let y = q[(r, k + 1)];
                q[(r, k)] = g.c * x + g.s.conj() * y;
                q[(r, k + 1)] = -g.s * x + g.c * y;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }

        sweeps_here += 1;
        total += 1;
        if sweeps_here > 60 || total > max_total {
            return Err(EigenError::NoConvergence {
                lo,
                hi,
                sweeps: sweeps_here,
            });
        }
    }
    Ok((h, q))
}

/// Unit eigenvector of triangular `t` for the eigenvalue at diagonal
/// position `k`, by back-substitution, then mapped through `q`.
fn triangular_eigenvector(t: &CMatrix, q: &CMatrix, k: usize) -> Vec<C64> {
    let n = t.dim();
    let lambda = t[(k, k)];
    let tiny = f64::EPSILON * t.max_abs().max(1.0);
    let mut y = vec![C64::new(0.0, 0.0); n];
    y[k] = C64::new(1.0, 0.0);
    for i in (0..k).rev() {
        let mut s = C64::new(0.0, 0.0);
        for j in i + 1..=k {
            s += t[(i, j)] * y[j];
        }
        let mut d = t[(i, i)] - lambda;
        if d.norm() < tiny {
            d = C64::new(tiny, 0.0);
        }
        y[i] = -s / d;
        // guard against overflow on pathologically graded matrices
        let yn = y[i].norm();
        if yn > 1e100 {
            for v in y.iter_mut() {
                *v /= yn;
            }
        }
    }
    let mut v = q.mul_vec(&y);
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

fn phase_fix(v: &mut [C64]) {
    let mut best = 0usize;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        let zn = z.norm();
        if zn > best_norm {
            best_norm = zn;
            best = i;
        }
    }
    if best_norm <= 0.0 {
        return;
    }
    let phase = v[best] / best_norm;
    let rot = phase.conj();
    for z in v.iter_mut() {
        *z *= rot;
    }
}

/// Full eigendecomposition with residual validation.
pub fn eigen_decompose(m: &CMatrix) -> Result<Eigen, EigenError> {
    let n = m.dim();
    if n == 0 {
        return Ok(Eigen {
            values: vec![],
            vectors: vec![],
        });
    }
    let mut h = m.clone();
    let mut q = CMatrix::identity(n);
    hessenberg(&mut h, &mut q);
    let (t, q) = schur(h, q)?;

    let values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let mut vectors: Vec<Vec<C64>> = (0..n).map(|k| triangular_eigenvector(&t, &q, k)).collect();

    // Re-orthonormalize within clusters of numerically equal eigenvalues.
    // For normal matrices the cluster spans an invariant subspace, so
    // Gram-Schmidt inside it keeps every vector an eigenvector.
    let cluster_tol = 1e-8 * t.max_abs().max(1.0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        (values[a].re, values[a].im)
            .partial_cmp(&(values[b].re, values[b].im))
            .unwrap()
    });
    let mut g = 0;
    while g < n {
        let mut e = g + 1;
        while e < n && (values[order[e]] - values[order[g]]).norm() < cluster_tol {
            e += 1;
        }
        if e - g > 1 {
            for a in g..e {
                for b in g..a {
                    let (ia, ib) = (order[a], order[b]);
                    let proj: C64 = vectors[ib]
                        .iter()
                        .zip(&vectors[ia])
                        .map(|(x, y)| x.conj() * y)
                        .sum();
                    let vb = vectors[ib].clone();
                    for (za, zb) in vectors[ia].iter_mut().zip(vb) {
                        *za -= proj * zb;
                    }
                }
                let ia = order[a];
                let norm = vectors[ia].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    for z in vectors[ia].iter_mut() {
                        *z /= norm;
                    }
                }
            }
        }
        g = e;
    }

    for v in &mut vectors {
        phase_fix(v);
    }

    // validate residuals
    for (lam, v) in values.iter().zip(&vectors) {
        let mv = m.mul_vec(v);
        let residual = mv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - lam * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > RESIDUAL_TOLERANCE {
            return Err(EigenError::ResidualTooLarge {
                residual,
                tolerance: RESIDUAL_TOLERANCE,
            });
        }
    }

    // canonical order: ascending principal argument, then magnitude
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        let ka = (values[a].arg(), values[a].norm());
        let kb = (values[b].arg(), values[b].norm());
        ka.partial_cmp(&kb).unwrap()
    });
    let values_sorted = idx.iter().map(|&i| values[i]).collect();
    let vectors_sorted = idx.iter().map(|&i| std::mem::take(&mut vectors[i])).collect();
    Ok(Eigen {
        values: values_sorted,
        vectors: vectors_sorted,
    })
}

/// Eigenvalues only (same algorithm, vectors skipped).
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>, EigenError> {
    let n = m.dim();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut h = m.clone();
    let mut q = CMatrix::identity(n);
    hessenberg(&mut h, &mut q);
    let (t, _) = schur(h, q)?;
    let mut values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    values.sort_by(|a, b| {
        (a.arg(), a.norm())
            .partial_cmp(&(b.arg(), b.norm()))
            .unwrap()
    });
    Ok(values)
}
