//! Dense complex linear-algebra primitives every other module builds on:
//! operator/spectral/numerical radii, PSD square roots, defect operators and
//! their range bases, SOT power limits, and joint diagonalization of
//! commuting normal families.

mod eig;
mod matrix;

pub use eig::{
    eigenvalues, hermitian_eig, hermitian_eigenvalues, hermitian_lambda_max,
    largest_singular_value, orthonormalize_columns,
};
pub use matrix::ComplexMatrix;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Contraction-state slack: operators within this of the unit ball are
/// accepted as contractions.
pub const CONTRACTION_SLACK: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix with an orthonormal frame.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    /// Ascending real eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvector columns, aligned with `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianSpectrum {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        h.check_square()?;
        h.check_finite()?;
        let residual = (h - &h.adjoint()).max_abs();
        if residual > 1e-10 * h.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian { residual });
        }
        let (eigenvalues, eigenvectors) = hermitian_eig(h);
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Rebuild `V diag(f(lambda)) V*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&x| Complex64::new(f(x), 0.0))
            .collect();
        let lam = ComplexMatrix::diagonal(&d);
        &(&self.eigenvectors * &lam) * &self.eigenvectors.adjoint()
    }
}

/// Orthonormal basis of a subspace of an ambient coordinate space.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub ambient_dim: usize,
    /// Isometric column frame (ambient_dim x rank).
    pub frame: ComplexMatrix,
    pub rank_tolerance: f64,
}

impl SubspaceBasis {
    pub fn rank(&self) -> usize {
        self.frame.cols()
    }

    /// Full orthonormal basis of the ambient space itself.
    pub fn full(n: usize) -> Self {
        Self {
            ambient_dim: n,
            frame: ComplexMatrix::identity(n),
            rank_tolerance: 0.0,
        }
    }

    /// Compression B* M B of an ambient operator to the subspace.
    pub fn compress(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &(&self.frame.adjoint() * m) * &self.frame
    }

    /// Extension B X B* of a subspace operator to the ambient space.
    pub fn extend(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &(&self.frame * x) * &self.frame.adjoint()
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let gram = &self.frame.adjoint() * &self.frame;
        (&gram - &ComplexMatrix::identity(self.rank())).max_abs()
    }
}

/// Operator norm (largest singular value).
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    a.check_finite()?;
    Ok(largest_singular_value(a))
}

/// Operator norm without the finiteness gate, for internal residuals.
pub(crate) fn op_norm(a: &ComplexMatrix) -> f64 {
    largest_singular_value(a)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &ComplexMatrix) -> Result<f64> {
    a.check_square()?;
    a.check_finite()?;
    Ok(eigenvalues(a)?
        .into_iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Numerical radius w(A) = sup over unit vectors of |<Ax, x>|, computed as
/// the maximum over the circle of the largest eigenvalue of the Hermitian
/// part of e^{i theta} A, on a uniform grid with golden-section refinement of
/// every near-maximal bracket. The result is within `tol` of the true value
/// and never exceeds it.
pub fn numerical_radius(a: &ComplexMatrix, tol: f64) -> Result<f64> {
    a.check_square()?;
    a.check_finite()?;
    if tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "numerical radius tolerance must be positive, got {tol}"
        )));
    }
    let lip = largest_singular_value(a);
    if lip == 0.0 {
        return Ok(0.0);
    }
    let f = |theta: f64| -> f64 {
        let phase = Complex64::from_polar(1.0, theta);
        hermitian_lambda_max(&a.scale(phase))
    };
    let grid = 720usize;
    let h = std::f64::consts::TAU / grid as f64;
    let values: Vec<f64> = (0..grid).map(|k| f(k as f64 * h)).collect();
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // refine every local-max bracket that could still contain the argmax
    let cutoff = best - 2.0 * lip * h;
    let mut result = best;
    for k in 0..grid {
        let prev = values[(k + grid - 1) % grid];
        let next = values[(k + 1) % grid];
        if values[k] >= prev && values[k] >= next && values[k] >= cutoff {
            let center = k as f64 * h;
            result = result.max(golden_max(&f, center - h, center + h, tol / lip.max(1.0)));
        }
    }
    Ok(result)
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = f1.max(f2);
    for _ in 0..80 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        best = best.max(f1.max(f2));
    }
    best
}

/// Hermitian PSD square root with clipping of slightly negative eigenvalues.
pub fn psd_sqrt(h: &ComplexMatrix, clip_tol: f64) -> Result<ComplexMatrix> {
    let spec = HermitianSpectrum::new(h)?;
    let min = spec.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -clip_tol {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
            clip_tol,
        });
    }
    Ok(spec.map(|x| if x < 0.0 { 0.0 } else { x.sqrt() }))
}

/// Defect operator D_T = (I - T*T)^{1/2} together with an orthonormal basis
/// of its range. `rank_tol` defaults to max(1e-10 * ||I - T*T||, 1e-12)
/// applied to the eigenvalues of I - T*T.
pub fn defect_pair(
    t: &ComplexMatrix,
    rank_tol: Option<f64>,
) -> Result<(ComplexMatrix, SubspaceBasis)> {
    t.check_square()?;
    t.check_finite()?;
    let norm = largest_singular_value(t);
    if norm > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContraction { norm });
    }
    let n = t.rows();
    let gram = &ComplexMatrix::identity(n) - &(&t.adjoint() * t);
    let spec = HermitianSpectrum::new(&gram)?;
    let gnorm = spec
        .eigenvalues
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    let clip = (1e-10 * norm.max(1.0).powi(2)).max(1e-12);
    if let Some(&min) = spec.eigenvalues.first() {
        if min < -clip {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                clip_tol: clip,
            });
        }
    }
    let tol = rank_tol.unwrap_or_else(|| (1e-10 * gnorm).max(1e-12));
    let d = spec.map(|x| if x < 0.0 { 0.0 } else { x.sqrt() });
    let keep: Vec<usize> = (0..n).filter(|&i| spec.eigenvalues[i] > tol).collect();
    let frame = spec.eigenvectors.select_columns(&keep);
    Ok((
        d,
        SubspaceBasis {
            ambient_dim: n,
            frame,
            rank_tolerance: tol,
        },
    ))
}

/// The sequence A_k = P_k P_k* with P_{k+1} = P_k^2 starting from P_0 = T,
/// i.e. A_k = T^(2^k) T*^(2^k), up to and including the first step where
/// consecutive iterates differ by at most `tol`.
pub fn sot_limit_iterates(
    t: &ComplexMatrix,
    tol: f64,
    max_doublings: usize,
) -> Result<Vec<ComplexMatrix>> {
    t.check_square()?;
    t.check_finite()?;
    let norm = largest_singular_value(t);
    if norm > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContraction { norm });
    }
    let mut p = t.clone();
    let mut a = &p * &p.adjoint();
    let mut iterates = vec![a.clone()];
    let mut residual = f64::INFINITY;
    for _ in 0..max_doublings {
        p = &p * &p;
        let next = &p * &p.adjoint();
        residual = op_norm(&(&next - &a));
        a = next;
        iterates.push(a.clone());
        if residual <= tol {
            return Ok(iterates);
        }
    }
    Err(Error::NoConvergence {
        steps: max_doublings,
        residual,
    })
}

/// Q = (SOT-lim T^n T*^n)^{1/2} by power doubling.
pub fn sot_limit_q(t: &ComplexMatrix, tol: f64, max_doublings: usize) -> Result<ComplexMatrix> {
    let iterates = sot_limit_iterates(t, tol, max_doublings)?;
    let last = iterates.last().expect("at least one iterate");
    // the limit of a decreasing PSD sequence bounded by I; clip generously
    psd_sqrt(last, (10.0 * tol).max(1e-10))
}

/// Result of simultaneously diagonalizing a commuting normal family.
#[derive(Debug, Clone)]
pub struct JointDiagonalization {
    /// Common unitary frame U.
    pub frame: ComplexMatrix,
    /// Per-matrix spectra: `spectra[i][k]` is the k-th diagonal entry of
    /// U* N_i U; column k across all i is one joint eigenvalue tuple.
    pub spectra: Vec<Vec<Complex64>>,
    /// Max off-diagonal residual of U* N_i U over the family.
    pub off_diag_residual: f64,
}

impl JointDiagonalization {
    /// Joint eigenvalue tuples, one per basis column.
    pub fn joint_tuples(&self) -> Vec<Vec<Complex64>> {
        let n = self.frame.cols();
        (0..n)
            .map(|k| self.spectra.iter().map(|s| s[k]).collect())
            .collect()
    }
}

/// Simultaneously diagonalize a family of pairwise-commuting normal
/// matrices: eigendecompose a random real combination of the Hermitian and
/// skew parts, cluster degenerate eigenvalues, and refine per cluster with
/// fresh combinations. Deterministically seeded.
pub fn joint_diagonalize(tuple: &[ComplexMatrix], tol: f64) -> Result<JointDiagonalization> {
    if tuple.is_empty() {
        return Err(Error::InvalidArgument(
            "joint diagonalization needs at least one matrix".into(),
        ));
    }
    let n = tuple[0].rows();
    for m in tuple {
        m.check_square()?;
        m.check_finite()?;
        if m.rows() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", m.rows(), m.cols()),
            });
        }
    }
    let norms: Vec<f64> = tuple.iter().map(op_norm).collect();
    let max_norm = norms.iter().cloned().fold(0.0, f64::max);
    for (i, m) in tuple.iter().enumerate() {
        let res = op_norm(&m.commutator(&m.adjoint()));
        let scale = (norms[i] * norms[i]).max(1.0);
        if res > tol * scale {
            return Err(Error::NotNormal {
                residual: res,
                tol: tol * scale,
            });
        }
        for (j, other) in tuple.iter().enumerate().skip(i + 1) {
            let res = op_norm(&m.commutator(other));
            let scale = (norms[i] * norms[j]).max(1.0);
            if res > tol * scale {
                return Err(Error::NotCommuting {
                    residual: res,
                    tol: tol * scale,
                });
            }
        }
    }

    // Hermitian and skew parts all commute for a *-commuting normal family.
    let mut parts: Vec<ComplexMatrix> = Vec::with_capacity(2 * tuple.len());
    for m in tuple {
        let adj = m.adjoint();
        parts.push((m + &adj).scale_re(0.5));
        parts.push((m - &adj).scale(Complex64::new(0.0, -0.5)));
    }

    let mut rng = SplitMix64::new(0x9e37_79b9_7f4a_7c15);
    let mut frame = ComplexMatrix::identity(n);
    let mut clusters: Vec<Vec<usize>> = vec![(0..n).collect()];
    let max_rounds = 2 * parts.len() + 4;
    for _round in 0..max_rounds {
        let mut next_clusters: Vec<Vec<usize>> = Vec::new();
        let mut split_any = false;
        for cluster in &clusters {
            if cluster.len() <= 1 {
                next_clusters.push(cluster.clone());
                continue;
            }
            let sub = frame.select_columns(cluster);
            let combo = random_combination(&parts, &sub, &mut rng);
            let (vals, vecs) = hermitian_eig(&combo);
            let scale = vals.iter().map(|x| x.abs()).fold(1.0, f64::max);
            let gap = 1e-7 * scale;
            // rotate the cluster columns by the eigenframe
            let rotated = &sub * &vecs;
            for (slot, &col) in cluster.iter().enumerate() {
                for r in 0..n {
                    frame[(r, col)] = rotated[(r, slot)];
                }
            }
            // partition by eigenvalue gaps
            let mut groups: Vec<Vec<usize>> = vec![vec![cluster[0]]];
            for k in 1..cluster.len() {
                if (vals[k] - vals[k - 1]).abs() > gap {
                    groups.push(Vec::new());
                }
                groups.last_mut().unwrap().push(cluster[k]);
            }
            if groups.len() > 1 {
                split_any = true;
            }
            next_clusters.extend(groups);
        }
        clusters = next_clusters;
        if !split_any && clusters.iter().all(|c| c.len() <= 1) {
            break;
        }
        if !split_any {
            // multi-dimensional clusters that no combination separates carry
            // genuinely equal joint eigenvalues; a couple of retries guard
            // against an unlucky draw
            if _round > parts.len() {
                break;
            }
        }
    }

    let mut spectra = Vec::with_capacity(tuple.len());
    let mut off = 0.0f64;
    for m in tuple {
        let rotated = &(&frame.adjoint() * m) * &frame;
        let mut diag = Vec::with_capacity(n);
        for k in 0..n {
            diag.push(rotated[(k, k)]);
        }
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    off = off.max(rotated[(r, c)].norm());
                }
            }
        }
        spectra.push(diag);
    }
    let _ = max_norm;
    Ok(JointDiagonalization {
        frame,
        spectra,
        off_diag_residual: off,
    })
}

fn random_combination(
    parts: &[ComplexMatrix],
    basis: &ComplexMatrix,
    rng: &mut SplitMix64,
) -> ComplexMatrix {
    let r = basis.cols();
    let mut combo = ComplexMatrix::zeros(r, r);
    for p in parts {
        let alpha = rng.next_f64() * 2.0 - 1.0;
        let compressed = &(&basis.adjoint() * p) * basis;
        combo = &combo + &compressed.scale_re(alpha);
    }
    combo.hermitian_part()
}

/// Deterministic 64-bit splittable generator used wherever reproducible
/// pseudo-randomness is needed.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [-1, 1).
    pub fn next_signed(&mut self) -> f64 {
        self.next_f64() * 2.0 - 1.0
    }

    pub fn next_complex(&mut self) -> Complex64 {
        Complex64::new(self.next_signed(), self.next_signed())
    }

    /// Unimodular scalar with uniform phase.
    pub fn next_phase(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, self.next_f64() * std::f64::consts::TAU)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(n: usize, rng: &mut SplitMix64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| rng.next_complex())
    }

    fn random_unitary(n: usize, rng: &mut SplitMix64) -> ComplexMatrix {
        orthonormalize_columns(&random_matrix(n, rng), 1e-12)
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
        assert!((operator_norm(&ComplexMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-13);
        let d = ComplexMatrix::diagonal(&[c(0.3, 0.0), c(-0.9, 0.0)]);
        assert!((operator_norm(&d).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn spectral_radius_examples() {
        let nil = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
        assert!(spectral_radius(&nil).unwrap() < 1e-12);
        let u = ComplexMatrix::diagonal(&[
            Complex64::from_polar(1.0, 0.3),
            Complex64::from_polar(1.0, -1.7),
        ]);
        assert!((spectral_radius(&u).unwrap() - 1.0).abs() < 1e-12);
        let d = ComplexMatrix::diagonal(&[c(0.2, 0.0), c(0.5, 0.5)]);
        // |0.5 + 0.5i| = 1/sqrt(2)
        assert!((spectral_radius(&d).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        // non-square input rejected
        assert!(spectral_radius(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn numerical_radius_examples() {
        // nilpotent 2x2: the Hermitian part of e^{i t} N has eigenvalues +-1/2
        let nil = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
        let w = numerical_radius(&nil, 1e-8).unwrap();
        assert!((w - 0.5).abs() < 1e-7, "w = {w}");
        assert_eq!(numerical_radius(&ComplexMatrix::zeros(2, 2), 1e-8).unwrap(), 0.0);
        assert!(numerical_radius(&nil, 0.0).is_err());
        // Hermitian case: w equals the spectral radius
        let mut rng = SplitMix64::new(11);
        let h = random_matrix(4, &mut rng).hermitian_part();
        let w = numerical_radius(&h, 1e-9).unwrap();
        let r = spectral_radius(&h).unwrap();
        assert!((w - r).abs() < 1e-7, "hermitian w {w} vs rho {r}");
    }

    #[test]
    fn numerical_radius_dense_grid_oracle() {
        // independent oracle: plain dense grid eigensolve, no refinement
        let mut rng = SplitMix64::new(42);
        let a = random_matrix(3, &mut rng);
        let dense: f64 = (0..20_000)
            .map(|k| {
                let theta = k as f64 * std::f64::consts::TAU / 20_000.0;
                hermitian_lambda_max(&a.scale(Complex64::from_polar(1.0, theta)))
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let w = numerical_radius(&a, 1e-9).unwrap();
        assert!(w + 1e-8 >= dense, "w {w} below dense oracle {dense}");
        assert!(w <= dense + 1e-5, "w {w} above dense oracle {dense}");
    }

    #[test]
    fn sandwich_inequalities_hold_on_random_matrices() {
        let mut rng = SplitMix64::new(7);
        let tol = 1e-6;
        for k in 0..100 {
            let n = 2 + (k % 4);
            let a = random_matrix(n, &mut rng);
            let r = spectral_radius(&a).unwrap();
            let w = numerical_radius(&a, tol).unwrap();
            let norm = operator_norm(&a).unwrap();
            assert!(r <= w + tol, "rho {r} vs w {w}");
            assert!(w <= norm + tol, "w {w} vs norm {norm}");
            assert!(norm <= 2.0 * w + 2.0 * tol, "norm {norm} vs 2w {w}");
        }
    }

    #[test]
    fn psd_sqrt_examples() {
        let id = ComplexMatrix::identity(3);
        assert!((&psd_sqrt(&id, 1e-12).unwrap() - &id).max_abs() < 1e-13);
        let h = ComplexMatrix::diagonal(&[c(0.64, 0.0), c(0.25, 0.0)]);
        let s = psd_sqrt(&h, 1e-12).unwrap();
        let want = ComplexMatrix::diagonal(&[c(0.8, 0.0), c(0.5, 0.0)]);
        assert!((&s - &want).max_abs() < 1e-13);
        // clip case
        let h = ComplexMatrix::diagonal(&[c(-1e-14, 0.0), c(1.0, 0.0)]);
        let s = psd_sqrt(&h, 1e-12).unwrap();
        assert_eq!(s[(0, 0)], c(0.0, 0.0));
        assert!((s[(1, 1)] - c(1.0, 0.0)).norm() < 1e-13);
        // genuinely indefinite input is rejected
        let h = ComplexMatrix::diagonal(&[c(-0.5, 0.0), c(1.0, 0.0)]);
        assert!(matches!(psd_sqrt(&h, 1e-10), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn defect_pair_examples() {
        let mut rng = SplitMix64::new(5);
        let u = random_unitary(4, &mut rng);
        let (d, basis) = defect_pair(&u, None).unwrap();
        assert!(d.max_abs() < 1e-7);
        assert_eq!(basis.rank(), 0);

        let z = ComplexMatrix::zeros(3, 3);
        let (d, basis) = defect_pair(&z, None).unwrap();
        assert!((&d - &ComplexMatrix::identity(3)).max_abs() < 1e-13);
        assert_eq!(basis.rank(), 3);

        let t = ComplexMatrix::scalar(c(0.6, 0.0));
        let (d, basis) = defect_pair(&t, None).unwrap();
        assert!((d[(0, 0)] - c(0.8, 0.0)).norm() < 1e-13);
        assert_eq!(basis.rank(), 1);

        // expansive operator rejected
        let big = ComplexMatrix::scalar(c(1.5, 0.0));
        assert!(matches!(defect_pair(&big, None), Err(Error::NotContraction { .. })));
    }

    #[test]
    fn defect_commutation_identity() {
        // T D_T = D_{T*} T for contractions
        let mut rng = SplitMix64::new(23);
        for _ in 0..10 {
            let raw = random_matrix(4, &mut rng);
            let t = raw.scale_re(0.45 / op_norm(&raw).max(1e-9));
            let (d, _) = defect_pair(&t, None).unwrap();
            let (dstar, _) = defect_pair(&t.adjoint(), None).unwrap();
            let res = op_norm(&(&(&t * &d) - &(&dstar * &t)));
            assert!(res <= 1e-10 * op_norm(&t).max(1.0), "residual {res}");
        }
    }

    #[test]
    fn sot_limit_examples() {
        let mut rng = SplitMix64::new(31);
        let u = random_unitary(3, &mut rng);
        let q = sot_limit_q(&u, 1e-12, 64).unwrap();
        assert!((&q - &ComplexMatrix::identity(3)).max_abs() < 1e-9);

        let raw = random_matrix(3, &mut rng);
        let t = raw.scale_re(0.6 / op_norm(&raw).max(1e-9));
        let q = sot_limit_q(&t, 1e-13, 64).unwrap();
        assert!(q.max_abs() < 1e-6, "strictly stable part must vanish");

        let t = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.5, 0.0)]);
        let q = sot_limit_q(&t, 1e-13, 64).unwrap();
        let want = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((&q - &want).max_abs() < 1e-10);
    }

    #[test]
    fn sot_limit_monotone_in_psd_order() {
        let mut rng = SplitMix64::new(77);
        let raw = random_matrix(4, &mut rng);
        let t = raw.scale_re(0.97 / op_norm(&raw).max(1e-9));
        let tol = 1e-12;
        let iterates = sot_limit_iterates(&t, tol, 80).unwrap();
        for w in iterates.windows(2) {
            let diff = &w[0] - &w[1]; // A_k - A_{k+1} should be >= -tol
            let min = hermitian_eigenvalues(&diff.hermitian_part())[0];
            assert!(min >= -tol * 10.0, "monotonicity violated: {min}");
        }
    }

    #[test]
    fn sot_limit_reports_no_convergence() {
        let t = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.999, 0.0)]);
        assert!(matches!(
            sot_limit_q(&t, 1e-16, 2),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn joint_diagonalize_examples() {
        // single diagonal matrix
        let d = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let jd = joint_diagonalize(std::slice::from_ref(&d), 1e-10).unwrap();
        assert!(jd.off_diag_residual < 1e-10);

        // pair of diagonals: joint spectrum {(1,3),(2,4)}
        let e = ComplexMatrix::diagonal(&[c(3.0, 0.0), c(4.0, 0.0)]);
        let jd = joint_diagonalize(&[d, e], 1e-10).unwrap();
        let mut tuples = jd.joint_tuples();
        tuples.sort_by(|a, b| a[0].re.partial_cmp(&b[0].re).unwrap());
        assert!((tuples[0][0] - c(1.0, 0.0)).norm() < 1e-10);
        assert!((tuples[0][1] - c(3.0, 0.0)).norm() < 1e-10);
        assert!((tuples[1][0] - c(2.0, 0.0)).norm() < 1e-10);
        assert!((tuples[1][1] - c(4.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn joint_diagonalize_recovers_conjugated_diagonals() {
        let mut rng = SplitMix64::new(101);
        let n = 5;
        let dvals: Vec<Complex64> = (0..n).map(|_| rng.next_complex()).collect();
        let evals: Vec<Complex64> = (0..n).map(|_| rng.next_complex()).collect();
        let u = random_unitary(n, &mut rng);
        let a = &(&u * &ComplexMatrix::diagonal(&dvals)) * &u.adjoint();
        let b = &(&u * &ComplexMatrix::diagonal(&evals)) * &u.adjoint();
        let jd = joint_diagonalize(&[a.clone(), b.clone()], 1e-8).unwrap();
        assert!(jd.off_diag_residual < 1e-8, "off {}", jd.off_diag_residual);
        // recovered joint pairs match {(d_k, e_k)} as a multiset
        let mut got = jd.joint_tuples();
        let mut want: Vec<Vec<Complex64>> = (0..n).map(|k| vec![dvals[k], evals[k]]).collect();
        let key = |t: &Vec<Complex64>| (t[0].re, t[0].im, t[1].re, t[1].im);
        got.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        want.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g[0] - w[0]).norm() < 1e-8);
            assert!((g[1] - w[1]).norm() < 1e-8);
        }
        // round-trip: U diag U* rebuilds the inputs
        let lam = ComplexMatrix::diagonal(&jd.spectra[0]);
        let rebuilt = &(&jd.frame * &lam) * &jd.frame.adjoint();
        assert!((&rebuilt - &a).max_abs() < 1e-8);
    }

    #[test]
    fn joint_diagonalize_rejects_bad_inputs() {
        let nil = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
        assert!(matches!(
            joint_diagonalize(std::slice::from_ref(&nil), 1e-10),
            Err(Error::NotNormal { .. })
        ));
        let a = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let b = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(
            joint_diagonalize(&[a, b], 1e-10),
            Err(Error::NotCommuting { .. })
        ));
    }

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(123);
        let mut b = SplitMix64::new(123);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
