//! Eigensolvers: cyclic Jacobi for Hermitian matrices (eigenvalues and an
//! orthonormal frame) and a shifted-QR Hessenberg iteration for general
//! complex eigenvalues, with closed-form paths for n <= 3 used by the hot
//! phase-grid scans.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::Result;

const JACOBI_MAX_SWEEPS: usize = 60;

/// Eigenvalues (ascending) and orthonormal eigenvector columns of a
/// Hermitian matrix. Only the Hermitian part of the input is read.
pub fn hermitian_eig(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = h.rows();
    assert!(h.is_square());
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    jacobi_iterate(&mut a, Some(&mut v), n);
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let frame = v.select_columns(&order);
    (values, frame)
}

/// Eigenvalues only (ascending); skips the eigenvector accumulation.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    assert!(h.is_square());
    let mut a = h.hermitian_part();
    jacobi_iterate(&mut a, None, n);
    let mut diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    diag.sort_by(|x, y| x.partial_cmp(y).unwrap());
    diag
}

/// Largest eigenvalue of the Hermitian part of `h`.
pub fn hermitian_lambda_max(h: &ComplexMatrix) -> f64 {
    match h.rows() {
        0 => 0.0,
        1 => h[(0, 0)].re,
        2 => {
            // closed form for the 2x2 Hermitian [a, b; conj(b), d]
            let a = 0.5 * (h[(0, 0)].re + h[(0, 0)].re);
            let d = 0.5 * (h[(1, 1)].re + h[(1, 1)].re);
            let b = 0.5 * (h[(0, 1)] + h[(1, 0)].conj());
            let mid = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            mid + rad
        }
        _ => *hermitian_eigenvalues(h).last().unwrap(),
    }
}

fn off_diag_sqr(a: &ComplexMatrix, n: usize) -> f64 {
    let mut s = 0.0;
    for r in 0..n {
        for c in (r + 1)..n {
            s += a[(r, c)].norm_sqr();
        }
    }
    2.0 * s
}

fn jacobi_iterate(a: &mut ComplexMatrix, mut v: Option<&mut ComplexMatrix>, n: usize) {
    if n <= 1 {
        return;
    }
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let stop = (1e-15 * scale) * (1e-15 * scale);
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diag_sqr(a, n) <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let beta = apq.norm();
                if beta <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // phase of the off-diagonal entry; rotation absorbs it so the
                // 2x2 reduces to the real symmetric case
                let phase = apq / beta;
                let tau = (aqq - app) / (2.0 * beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phase * (t * c);
                // columns: col_p <- c*col_p - conj(s)*col_q ; col_q <- s*col_p + c*col_q
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - s.conj() * aiq;
                    a[(i, q)] = s * aip + c * aiq;
                }
                // rows: row_p <- c*row_p - s*row_q ; row_q <- conj(s)*row_p + c*row_q
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = c * apj - s * aqj;
                    a[(q, j)] = s.conj() * apj + c * aqj;
                }
                // exact zeros on the annihilated pair, keep Hermitian structure
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                if let Some(ref mut vm) = v {
                    for i in 0..n {
                        let vip = vm[(i, p)];
                        let viq = vm[(i, q)];
                        vm[(i, p)] = c * vip - s.conj() * viq;
                        vm[(i, q)] = s * vip + c * viq;
                    }
                }
            }
        }
    }
}

/// All eigenvalues of a general square complex matrix.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    m.check_square()?;
    m.check_finite()?;
    Ok(match m.rows() {
        0 => vec![],
        1 => vec![m[(0, 0)]],
        2 => eig2(m),
        3 => eig3(m),
        _ => qr_eigenvalues(m),
    })
}

fn eig2(m: &ComplexMatrix) -> Vec<Complex64> {
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (tr * tr - 4.0 * det).sqrt();
    vec![0.5 * (tr + disc), 0.5 * (tr - disc)]
}

/// Roots of the 3x3 characteristic polynomial via the depressed cubic,
/// polished by two Newton steps each.
fn eig3(m: &ComplexMatrix) -> Vec<Complex64> {
    let a = m[(0, 0)];
    let b = m[(0, 1)];
    let c = m[(0, 2)];
    let d = m[(1, 0)];
    let e = m[(1, 1)];
    let f = m[(1, 2)];
    let g = m[(2, 0)];
    let h = m[(2, 1)];
    let i = m[(2, 2)];
    // lambda^3 - p2 lambda^2 + p1 lambda - p0
    let p2 = a + e + i;
    let p1 = (a * e - b * d) + (a * i - c * g) + (e * i - f * h);
    let p0 = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);

    // depressed: t^3 + p t + q with lambda = t + p2/3
    let shift = p2 / 3.0;
    let p = p1 - p2 * p2 / 3.0;
    let q = -p0 + p1 * shift - 2.0 * shift * shift * shift;
    // q here equals f(shift) where f(l) = l^3 - p2 l^2 + p1 l - p0
    let half_q = 0.5 * q;
    let disc = (half_q * half_q + p * p * p / 27.0).sqrt();
    // pick the larger-magnitude cube-root argument for stability
    let u3a = -half_q + disc;
    let u3b = -half_q - disc;
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
    let mut roots = if u3.norm() == 0.0 {
        vec![shift, shift, shift]
    } else {
        let u = u3.cbrt();
        let omega = Complex64::new(-0.5, 0.75f64.sqrt());
        let mut out = Vec::with_capacity(3);
        let mut uk = u;
        for _ in 0..3 {
            let t = uk - p / (3.0 * uk);
            out.push(t + shift);
            uk *= omega;
        }
        out
    };
    // Newton polish on the characteristic polynomial
    for r in roots.iter_mut() {
        for _ in 0..2 {
            let fval = ((*r - p2) * *r + p1) * *r - p0;
            let dval = (3.0 * *r - 2.0 * p2) * *r + p1;
            if dval.norm() > 1e-300 {
                let step = fval / dval;
                if step.norm().is_finite() {
                    *r -= step;
                }
            }
        }
    }
    roots
}

/// Hessenberg reduction followed by shifted QR, eigenvalues only.
fn qr_eigenvalues(m: &ComplexMatrix) -> Vec<Complex64> {
    let n = m.rows();
    let mut h = hessenberg(m);
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block is 0..hi
    let mut stall = 0usize;
    let max_total = 60 * n.max(1);
    let mut total = 0usize;
    while hi > 0 {
        if hi == 1 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // deflate converged subdiagonals from the bottom
        let mut deflated = false;
        for k in (1..hi).rev() {
            let small = 1e-16 * (h[(k - 1, k - 1)].norm() + h[(k, k)].norm()) + 1e-300;
            if h[(k, k - 1)].norm() <= small {
                if k == hi - 1 {
                    eigs.push(h[(hi - 1, hi - 1)]);
                    hi -= 1;
                    deflated = true;
                    stall = 0;
                }
                break;
            }
        }
        if deflated {
            continue;
        }
        if hi == 2 {
            let sub = h.submatrix(0, 0, 2, 2);
            eigs.extend(eig2(&sub));
            break;
        }
        total += 1;
        stall += 1;
        if total > max_total {
            // return the best available estimates rather than looping forever;
            // the diagonal of a nearly-triangular iterate
            for k in 0..hi {
                eigs.push(h[(k, k)]);
            }
            break;
        }
        // Wilkinson shift from the trailing 2x2, exceptional shift on stall
        let mu = if stall.is_multiple_of(17) {
            h[(hi - 1, hi - 1)] + Complex64::new(h[(hi - 1, hi - 2)].norm(), 0.0)
        } else {
            let t2 = h.submatrix(hi - 2, hi - 2, 2, 2);
            let ev = eig2(&t2);
            let target = h[(hi - 1, hi - 1)];
            if (ev[0] - target).norm() <= (ev[1] - target).norm() {
                ev[0]
            } else {
                ev[1]
            }
        };
        qr_step(&mut h, hi, mu);
    }
    eigs
}

/// One explicit single-shift QR step on the leading `hi` block using Givens
/// rotations: H <- R Q + mu I where Q R = H - mu I.
fn qr_step(h: &mut ComplexMatrix, hi: usize, mu: Complex64) {
    let n = h.rows();
    for k in 0..hi {
        h[(k, k)] -= mu;
    }
    // store rotations; (c real, s complex) acting on rows/cols (k, k+1)
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - 1);
    for k in 0..hi - 1 {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let (c, s) = givens(a, b);
        rots.push((c, s));
        // apply G* to rows k, k+1 (columns k..n)
        for j in k..n {
            let hkj = h[(k, j)];
            let hk1j = h[(k + 1, j)];
            h[(k, j)] = c * hkj + s.conj() * hk1j;
            h[(k + 1, j)] = -s * hkj + c * hk1j;
        }
        h[(k + 1, k)] = Complex64::new(0.0, 0.0);
    }
    // H <- R Q: apply rotations on the right
    for (k, (c, s)) in rots.iter().enumerate() {
        for i in 0..(k + 2).min(hi) {
            let hik = h[(i, k)];
            let hik1 = h[(i, k + 1)];
            h[(i, k)] = c * hik + s * hik1;
            h[(i, k + 1)] = -s.conj() * hik + c * hik1;
        }
    }
    for k in 0..hi {
        h[(k, k)] += mu;
    }
}

/// Givens pair (c, s) with c real >= 0, c^2 + |s|^2 = 1 and -s*a + c*b = 0,
/// so the row rotation [[c, conj(s)], [-s, c]] annihilates the second entry.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b / bn);
    }
    let r = (an * an + bn * bn).sqrt();
    let c = an / r;
    let s = (a.conj() / an) * b / r;
    (c, s)
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        // build reflector for column k, rows k+1..n
        let mut x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm <= 1e-300 {
            continue;
        }
        let x0 = x[0];
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * xnorm
        } else {
            Complex64::new(-xnorm, 0.0)
        };
        x[0] -= alpha;
        let vnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm <= 1e-300 {
            continue;
        }
        for z in x.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2vv*) H (I - 2vv*)
        // left: rows k+1..n
        for j in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (i, vi) in x.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + i, j)];
            }
            let dot = 2.0 * dot;
            for (i, vi) in x.iter().enumerate() {
                let val = h[(k + 1 + i, j)] - dot * vi;
                h[(k + 1 + i, j)] = val;
            }
        }
        // right: cols k+1..n
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (j, vj) in x.iter().enumerate() {
                dot += h[(i, k + 1 + j)] * *vj;
            }
            let dot = 2.0 * dot;
            for (j, vj) in x.iter().enumerate() {
                let val = h[(i, k + 1 + j)] - dot * vj.conj();
                h[(i, k + 1 + j)] = val;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
        h[(k + 1, k)] = alpha;
    }
    h
}

/// Largest singular value via the Hermitian eigenproblem of A*A (or AA*,
/// whichever is smaller).
pub fn largest_singular_value(a: &ComplexMatrix) -> f64 {
    if a.is_zero_shape() {
        return 0.0;
    }
    let g = if a.rows() >= a.cols() {
        &a.adjoint() * a
    } else {
        a * &a.adjoint()
    };
    hermitian_lambda_max(&g).max(0.0).sqrt()
}

/// Orthonormalize the columns of `a` in place (modified Gram-Schmidt with
/// one re-orthogonalization pass). Returns the retained column count; columns
/// with residual norm below `tol` are dropped.
pub fn orthonormalize_columns(a: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let n = a.rows();
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    for c in 0..a.cols() {
        let mut v = a.column(c);
        for _pass in 0..2 {
            for u in &cols {
                let mut dot = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    dot += u[i].conj() * v[i];
                }
                for i in 0..n {
                    v[i] -= dot * u[i];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > tol {
            for z in v.iter_mut() {
                *z /= norm;
            }
            cols.push(v);
        }
    }
    let mut out = ComplexMatrix::zeros(n, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z = z ^ (z >> 31);
            (z as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        let g = ComplexMatrix::from_fn(n, n, |_, _| c(next(), next()));
        orthonormalize_columns(&g, 1e-12)
    }

    #[test]
    fn jacobi_diagonalizes_random_hermitian() {
        let n = 7;
        let u = random_unitary(n, 3);
        let mut g = &u * &u.adjoint();
        // perturb into a generic Hermitian matrix
        let b = ComplexMatrix::from_fn(n, n, |r, ci| c((r * ci) as f64 * 0.1, (r as f64 - ci as f64) * 0.2));
        g = &g + &b.hermitian_part();
        let (vals, frame) = hermitian_eig(&g);
        // orthonormal frame
        let gram = &frame.adjoint() * &frame;
        assert!((&gram - &ComplexMatrix::identity(n)).max_abs() < 1e-12);
        // reconstruction
        let lam = ComplexMatrix::diagonal(&vals.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        let rebuilt = &(&frame * &lam) * &frame.adjoint();
        let h = g.hermitian_part();
        assert!((&rebuilt - &h).max_abs() < 1e-10 * h.frobenius_norm().max(1.0));
        // ascending
        for w in vals.windows(2) {
            assert!(w[0] <= w[1] + 1e-14);
        }
    }

    #[test]
    fn eigenvalues_recover_conjugated_diagonal() {
        for n in [2usize, 3, 5, 9] {
            let d: Vec<Complex64> = (0..n)
                .map(|i| c(0.3 * i as f64 - 0.5, 0.1 * (i * i) as f64 - 0.2))
                .collect();
            let u = random_unitary(n, 17 + n as u64);
            let m = &(&u * &ComplexMatrix::diagonal(&d)) * &u.adjoint();
            let mut got = eigenvalues(&m).unwrap();
            let mut want = d.clone();
            let key = |z: &Complex64| (z.re, z.im);
            got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            want.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            for (g, w) in got.iter().zip(want.iter()) {
                assert!(
                    (g - w).norm() < 1e-9,
                    "n={n}: eigenvalue {g} vs expected {w}"
                );
            }
        }
    }

    #[test]
    fn eigenvalues_of_defective_jordan_block() {
        // non-diagonalizable: all eigenvalues 0.5
        let mut j = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            j[(i, i)] = c(0.5, 0.0);
            if i + 1 < 4 {
                j[(i, i + 1)] = c(1.0, 0.0);
            }
        }
        let eigs = eigenvalues(&j).unwrap();
        for e in eigs {
            assert!((e - c(0.5, 0.0)).norm() < 1e-3, "defective cluster: {e}");
        }
    }

    #[test]
    fn largest_singular_value_of_diagonal() {
        let m = ComplexMatrix::diagonal(&[c(0.3, 0.0), c(-0.9, 0.0)]);
        assert!((largest_singular_value(&m) - 0.9).abs() < 1e-13);
    }

    #[test]
    fn orthonormalize_gives_isometric_frame() {
        let g = ComplexMatrix::from_fn(6, 4, |r, ci| c((r + ci) as f64, (r as f64) * 0.3 - ci as f64));
        let q = orthonormalize_columns(&g, 1e-12);
        let gram = &q.adjoint() * &q;
        assert!((&gram - &ComplexMatrix::identity(q.cols())).max_abs() < 1e-12);
    }
}
