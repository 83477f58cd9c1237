//! Structured singular values over block-scalar structures, the
//! symmetrization maps into the Gamma domains, and the boundary-set checks.
//!
//! For E = {diag(z_1 I_{r_1}, ..., z_s I_{r_s})} the reciprocal-infimum
//! definition of mu gives two computable sides: every unimodular structured
//! phase matrix Phi yields the certified lower bound rho(A Phi), and every
//! positive block scaling D commuting with E yields the upper bound
//! ||D A D^{-1}||.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, ComplexMatrix};
use crate::threads;

/// Block-scalar uncertainty structure: s scalar blocks of sizes r_1..r_s.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockStructure {
    pub n: usize,
    pub block_sizes: Vec<usize>,
}

impl BlockStructure {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() || block_sizes.contains(&0) {
            return Err(Error::InvalidArgument(
                "block structure needs at least one nonempty block".into(),
            ));
        }
        Ok(Self {
            n: block_sizes.iter().sum(),
            block_sizes,
        })
    }

    pub fn blocks(&self) -> usize {
        self.block_sizes.len()
    }

    /// Block index of each ambient coordinate.
    fn coordinate_blocks(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n);
        for (b, &r) in self.block_sizes.iter().enumerate() {
            out.extend(std::iter::repeat_n(b, r));
        }
        out
    }

    pub fn check_matches(&self, a: &ComplexMatrix) -> Result<()> {
        if a.rows() != self.n || a.cols() != self.n {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0}", self.n),
                found: format!("{}x{}", a.rows(), a.cols()),
            });
        }
        Ok(())
    }
}

/// Certified bracket for mu with the witnesses attaining each side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MuBounds {
    pub lower: f64,
    pub upper: f64,
    /// Unimodular block phases attaining the lower bound, rotated so that
    /// X = diag(phases) / lower satisfies det(I - A X) = 0.
    pub phase_witness: Vec<[f64; 2]>,
    /// Per-block scaling magnitudes (det D_j)^(1/r_j), first block = 1.
    pub scaling_witness: Vec<f64>,
    /// Full positive-definite scaling blocks attaining the upper bound,
    /// entries as [re, im] row-major per block. Equal to scalar multiples of
    /// the identity on size-1 blocks.
    pub scaling_blocks: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Which Gamma domain a symmetrized point lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaVariant {
    /// 7 coordinates from a 3x3 witness, three scalar blocks.
    E3311,
    /// 5 coordinates from a 3x3 witness, blocks of sizes 1 and 2.
    E3212,
    /// 3 coordinates from a 2x2 witness.
    E2211,
}

impl GammaVariant {
    pub fn coord_len(self) -> usize {
        match self {
            GammaVariant::E3311 => 7,
            GammaVariant::E3212 => 5,
            GammaVariant::E2211 => 3,
        }
    }

    pub fn structure(self) -> BlockStructure {
        let sizes = match self {
            GammaVariant::E3311 => vec![1, 1, 1],
            GammaVariant::E3212 => vec![1, 2],
            GammaVariant::E2211 => vec![1, 1],
        };
        BlockStructure::new(sizes).expect("static structure")
    }
}

/// A point of a Gamma domain, optionally carrying the witness matrix whose
/// symmetrization it is.
#[derive(Debug, Clone)]
pub struct GammaPoint {
    pub variant: GammaVariant,
    pub coords: Vec<Complex64>,
    pub witness: Option<ComplexMatrix>,
}

/// Lower bound: max over sampled unimodular structured phases of rho(A Phi),
/// grid-scanned then polished coordinate-wise. Every probe is itself a valid
/// lower bound, so the returned value is certified. The returned witness is
/// rotated so that X = diag(witness) / lower makes I - A X singular.
pub fn mu_lower(
    a: &ComplexMatrix,
    st: &BlockStructure,
    phase_grid: usize,
) -> Result<(f64, Vec<Complex64>)> {
    st.check_matches(a)?;
    a.check_finite()?;
    if phase_grid == 0 {
        return Err(Error::InvalidArgument("phase grid must be positive".into()));
    }
    let s = st.blocks();
    let ones = vec![Complex64::new(1.0, 0.0); s];
    if a.max_abs() == 0.0 {
        return Ok((0.0, ones));
    }
    let coord_block = st.coordinate_blocks();
    let rho = |phases: &[f64]| -> f64 {
        let col_phase: Vec<Complex64> = coord_block
            .iter()
            .map(|&b| {
                if b == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::from_polar(1.0, phases[b - 1])
                }
            })
            .collect();
        let scaled = ComplexMatrix::from_fn(st.n, st.n, |r, c| a[(r, c)] * col_phase[c]);
        kernel::eigenvalues(&scaled)
            .map(|eigs| eigs.into_iter().map(|z| z.norm()).fold(0.0, f64::max))
            .unwrap_or(0.0)
    };

    let free = s - 1;
    if free == 0 {
        let best = rho(&[]);
        let mut witness = ones;
        rotate_witness_to_critical(a, st, best, &mut witness);
        return Ok((best, witness));
    }
    let total: usize = phase_grid.pow(free as u32);
    let h = std::f64::consts::TAU / phase_grid as f64;
    let decode = |mut idx: usize| -> Vec<f64> {
        let mut phases = vec![0.0; free];
        for p in phases.iter_mut() {
            *p = (idx % phase_grid) as f64 * h;
            idx /= phase_grid;
        }
        phases
    };
    let (best_val, best_idx) = threads::pool().install(|| {
        (0..total)
            .into_par_iter()
            .map(|idx| (rho(&decode(idx)), idx))
            .reduce(
                || (f64::NEG_INFINITY, usize::MAX),
                |acc, item| {
                    if item.0 > acc.0 || (item.0 == acc.0 && item.1 < acc.1) {
                        item
                    } else {
                        acc
                    }
                },
            )
    });

    // coordinate-wise golden-section polish around the best grid point
    let mut phases = decode(best_idx);
    let mut best = best_val;
    for _round in 0..4 {
        for j in 0..free {
            let center = phases[j];
            let f = |x: f64| {
                let mut p = phases.clone();
                p[j] = x;
                rho(&p)
            };
            let (val, x) = golden_argmax(&f, center - h, center + h, 1e-10);
            if val > best {
                best = val;
                phases[j] = x;
            }
        }
    }
    let mut witness = vec![Complex64::new(1.0, 0.0)];
    witness.extend(phases.iter().map(|&p| Complex64::from_polar(1.0, p)));
    rotate_witness_to_critical(a, st, best, &mut witness);
    Ok((best, witness))
}

/// Fold the global phase into the witness so that X = Phi / lower attains
/// det(I - A X) = 0: rotate so the critical eigenvalue of A Phi lands on the
/// positive real axis. Spectral radii are invariant under this rotation.
fn rotate_witness_to_critical(
    a: &ComplexMatrix,
    st: &BlockStructure,
    lower: f64,
    witness: &mut [Complex64],
) {
    if lower <= 0.0 {
        return;
    }
    let coord_block = st.coordinate_blocks();
    let scaled = ComplexMatrix::from_fn(st.n, st.n, |r, c| a[(r, c)] * witness[coord_block[c]]);
    let Ok(eigs) = kernel::eigenvalues(&scaled) else {
        return;
    };
    let Some(top) = eigs
        .into_iter()
        .max_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap())
    else {
        return;
    };
    if top.norm() == 0.0 {
        return;
    }
    let rot = (top / top.norm()).conj();
    for w in witness.iter_mut() {
        *w *= rot;
    }
}

fn golden_argmax(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut best, mut arg) = if f1 >= f2 { (f1, x1) } else { (f2, x2) };
    for _ in 0..90 {
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
        if f1 > best {
            best = f1;
            arg = x1;
        }
        if f2 > best {
            best = f2;
            arg = x2;
        }
    }
    (best, arg)
}

/// Upper bound: min over positive definite scalings D in the commutant of E
/// of ||D A D^{-1}|| (scalar on size-1 blocks, full Hermitian on repeated
/// blocks). Computed by bisection on gamma: D A D^{-1} has norm at most gamma
/// exactly when A* P A - gamma^2 P is negative semidefinite with P = D^2, a
/// pointwise-linear matrix inequality in P, so each feasibility test is a
/// convex lambda_max minimization solved by Polyak subgradient steps. The
/// returned value re-evaluates ||D A D^{-1}|| at the found witness, so it is
/// a certified upper bound regardless of optimizer quality.
pub fn mu_upper(
    a: &ComplexMatrix,
    st: &BlockStructure,
    iters: usize,
) -> Result<(f64, Vec<ComplexMatrix>)> {
    st.check_matches(a)?;
    a.check_finite()?;
    let identity_blocks: Vec<ComplexMatrix> =
        st.block_sizes.iter().map(|&r| ComplexMatrix::identity(r)).collect();
    if a.max_abs() == 0.0 {
        return Ok((0.0, identity_blocks));
    }
    if iters == 0 {
        return Err(Error::InvalidArgument("iteration count must be positive".into()));
    }

    let scaler = BlockScaler::new(st);
    let mut p = scaler.identity_params();
    let mut best_feasible = p.clone();

    // gamma bracket: rho(A) is a lower bound (Phi = I is admissible) and
    // ||A|| an upper one (D = I)
    let mut hi = kernel::largest_singular_value(a);
    let mut lo = kernel::eigenvalues(a)?
        .into_iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if hi <= 0.0 {
        return Ok((0.0, identity_blocks));
    }
    let mut best_gamma = hi;
    for _ in 0..iters.max(24) {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let gamma = 0.5 * (lo + hi);
        match scaler.find_feasible(a, gamma, &p) {
            Some(found) => {
                p = found.clone();
                best_feasible = found;
                // certified norm at this witness
                let exact = scaler.certified_norm(a, &best_feasible);
                best_gamma = best_gamma.min(exact);
                hi = gamma.min(exact);
            }
            None => {
                lo = gamma;
            }
        }
    }
    let exact = scaler.certified_norm(a, &best_feasible);
    best_gamma = best_gamma.min(exact);
    let blocks = scaler.scaling_blocks(&best_feasible);
    Ok((best_gamma, blocks))
}

/// Hermitian block parametrization of P = D^2 in the commutant of the block
/// structure, with the first block pinned to the identity scale.
struct BlockScaler {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    /// flattened parameter layout per block: r*r real coordinates
    param_offsets: Vec<usize>,
    nparams: usize,
    n: usize,
}

impl BlockScaler {
    fn new(st: &BlockStructure) -> Self {
        let sizes = st.block_sizes.clone();
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for &r in &sizes {
            offsets.push(acc);
            acc += r;
        }
        let mut param_offsets = Vec::with_capacity(sizes.len());
        let mut pacc = 0;
        for &r in &sizes {
            param_offsets.push(pacc);
            pacc += r * r;
        }
        Self {
            sizes,
            offsets,
            param_offsets,
            nparams: pacc,
            n: st.n,
        }
    }

    fn identity_params(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.nparams];
        for (b, &r) in self.sizes.iter().enumerate() {
            for i in 0..r {
                x[self.param_offsets[b] + i * r + i] = 1.0;
            }
        }
        x
    }

    /// Hermitian block b from its r*r real coordinates: diagonal entries are
    /// the coordinates (i,i); for i < j, coordinate (i,j) is the real part and
    /// (j,i) the imaginary part of the (i,j) entry.
    fn block(&self, x: &[f64], b: usize) -> ComplexMatrix {
        let r = self.sizes[b];
        let base = self.param_offsets[b];
        ComplexMatrix::from_fn(r, r, |i, j| {
            if i == j {
                Complex64::new(x[base + i * r + i], 0.0)
            } else if i < j {
                Complex64::new(x[base + i * r + j], x[base + j * r + i])
            } else {
                Complex64::new(x[base + j * r + i], -x[base + i * r + j])
            }
        })
    }

    fn assemble(&self, x: &[f64]) -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(self.n, self.n);
        for b in 0..self.sizes.len() {
            let blk = self.block(x, b);
            let off = self.offsets[b];
            for i in 0..self.sizes[b] {
                for j in 0..self.sizes[b] {
                    p[(off + i, off + j)] = blk[(i, j)];
                }
            }
        }
        p
    }

    /// lambda_max(A* P A - gamma^2 P) and its top eigenvector.
    fn objective(&self, a: &ComplexMatrix, gamma: f64, x: &[f64]) -> (f64, Vec<Complex64>) {
        let p = self.assemble(x);
        let m = &(&(&a.adjoint() * &p) * a) - &p.scale_re(gamma * gamma);
        let (vals, vecs) = kernel::hermitian_eig(&m);
        let k = vals.len() - 1;
        (vals[k], vecs.column(k))
    }

    /// Subgradient of lambda_max with respect to the block coordinates:
    /// d/dp_k = v* (A* E_k A - gamma^2 E_k) v with E_k the basis element.
    fn subgradient(&self, a: &ComplexMatrix, gamma: f64, v: &[Complex64]) -> Vec<f64> {
        let av = a.apply(v);
        let g2 = gamma * gamma;
        let mut grad = vec![0.0; self.nparams];
        for b in 0..self.sizes.len() {
            let r = self.sizes[b];
            let off = self.offsets[b];
            let base = self.param_offsets[b];
            for i in 0..r {
                // diagonal basis element e_ii
                let term = av[off + i].norm_sqr() - g2 * v[off + i].norm_sqr();
                grad[base + i * r + i] = term;
                for j in (i + 1)..r {
                    // real part basis: e_ij + e_ji
                    let re_term = 2.0
                        * ((av[off + i].conj() * av[off + j]).re
                            - g2 * (v[off + i].conj() * v[off + j]).re);
                    grad[base + i * r + j] = re_term;
                    // imaginary part basis: i e_ij - i e_ji
                    let im_term = -2.0
                        * ((av[off + i].conj() * av[off + j]).im
                            - g2 * (v[off + i].conj() * v[off + j]).im);
                    grad[base + j * r + i] = im_term;
                }
            }
        }
        grad
    }

    /// Free coordinates: every block coordinate except the pinned first
    /// diagonal entry of block 0 (overall scale).
    fn free_indices(&self) -> Vec<usize> {
        (1..self.nparams).collect()
    }

    /// Combined convex oracle: max of the feasibility objective
    /// lambda_max(A* P A - gamma^2 P) and the positivity barrier
    /// eps - lambda_min(P_j). Returns the value and a subgradient
    /// restricted to the free coordinates.
    fn oracle(&self, a: &ComplexMatrix, gamma: f64, x: &[f64]) -> (f64, Vec<f64>) {
        const EPS_PD: f64 = 1e-9;
        let (g1, v1) = self.objective(a, gamma, x);
        let mut worst_block = usize::MAX;
        let mut g2 = f64::NEG_INFINITY;
        let mut vmin: Vec<Complex64> = Vec::new();
        for b in 0..self.sizes.len() {
            let blk = self.block(x, b);
            let (vals, vecs) = kernel::hermitian_eig(&blk);
            let cand = EPS_PD - vals[0];
            if cand > g2 {
                g2 = cand;
                worst_block = b;
                vmin = vecs.column(0);
            }
        }
        let free = self.free_indices();
        if g1 >= g2 {
            let full = self.subgradient(a, gamma, &v1);
            (g1, free.iter().map(|&k| full[k]).collect())
        } else {
            // subgradient of -lambda_min of the violating block
            let b = worst_block;
            let r = self.sizes[b];
            let base = self.param_offsets[b];
            let mut full = vec![0.0; self.nparams];
            for i in 0..r {
                full[base + i * r + i] = -vmin[i].norm_sqr();
                for j in (i + 1)..r {
                    full[base + i * r + j] = -2.0 * (vmin[i].conj() * vmin[j]).re;
                    full[base + j * r + i] = 2.0 * (vmin[i].conj() * vmin[j]).im;
                }
            }
            (g2, free.iter().map(|&k| full[k]).collect())
        }
    }

    /// Search for structured P > 0 with A* P A <= gamma^2 P: a short Polyak
    /// warm-start pass, then the ellipsoid method on the convex combined
    /// oracle (globally convergent; the sizes here are tiny).
    fn find_feasible(&self, a: &ComplexMatrix, gamma: f64, warm: &[f64]) -> Option<Vec<f64>> {
        let free = self.free_indices();
        let assemble = |y: &[f64]| -> Vec<f64> {
            let mut x = vec![0.0; self.nparams];
            x[0] = 1.0;
            for (slot, &k) in free.iter().enumerate() {
                x[k] = y[slot];
            }
            x
        };
        let mut y: Vec<f64> = free.iter().map(|&k| warm[k]).collect();
        // normalize the warm start by its pinned coordinate when sensible
        if warm[0].abs() > 1e-8 {
            for v in y.iter_mut() {
                *v /= warm[0];
            }
        }
        let (g0, _) = self.oracle(a, gamma, &assemble(&y));
        if g0 <= 0.0 {
            return Some(assemble(&y));
        }
        if free.is_empty() {
            return None;
        }
        // Polyak pass with target zero: cheap and often sufficient
        let mut yp = y.clone();
        for _ in 0..60 {
            let x = assemble(&yp);
            let (g, s) = self.oracle(a, gamma, &x);
            if g <= 0.0 {
                return Some(x);
            }
            let norm2: f64 = s.iter().map(|t| t * t).sum();
            if norm2 <= 1e-300 {
                break;
            }
            let step = 1.2 * g / norm2;
            for (v, si) in yp.iter_mut().zip(s.iter()) {
                *v -= step * si;
            }
        }
        // deep-cut ellipsoid phase: the feasible set lies in the half-space
        // s . (y - center) <= -g, so the cut depth alpha = g / sqrt(s^T B s)
        // accelerates shrinkage and certifies infeasibility when alpha >= 1.
        let n = free.len();
        if n == 1 {
            return self.feasible_1d(a, gamma, &assemble(&y));
        }
        let nf = n as f64;
        let radius: f64 = 1e4;
        let mut center = y.clone();
        let mut bmat = vec![0.0f64; n * n];
        for i in 0..n {
            bmat[i * n + i] = radius * radius;
        }
        let max_iter = 700 * n;
        let mut resets = 0usize;
        for _ in 0..max_iter {
            let x = assemble(&center);
            let (g, s) = self.oracle(a, gamma, &x);
            if g <= 0.0 {
                return Some(x);
            }
            let mut bs = vec![0.0f64; n];
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += bmat[i * n + j] * s[j];
                }
                bs[i] = acc;
            }
            let denom: f64 = s.iter().zip(bs.iter()).map(|(a_, b_)| a_ * b_).sum();
            if denom <= 0.0 || !denom.is_finite() {
                // numerical degeneration of B: restart as a shrunken ball
                if resets >= 3 {
                    break;
                }
                resets += 1;
                let trace: f64 = (0..n).map(|i| bmat[i * n + i]).sum::<f64>().abs();
                let r2 = (trace / nf).max(1e-20);
                bmat.iter_mut().for_each(|v| *v = 0.0);
                for i in 0..n {
                    bmat[i * n + i] = r2;
                }
                continue;
            }
            let scale = denom.sqrt();
            let alpha = (g / scale).min(1.5);
            if alpha >= 1.0 {
                // the entire ellipsoid violates the cut: certified infeasible
                return None;
            }
            let tau = (1.0 + nf * alpha) / (nf + 1.0);
            let sigma = 2.0 * (1.0 + nf * alpha) / ((nf + 1.0) * (1.0 + alpha));
            let delta = nf * nf * (1.0 - alpha * alpha) / (nf * nf - 1.0);
            for i in 0..n {
                center[i] -= tau * bs[i] / scale;
            }
            for i in 0..n {
                for j in 0..i {
                    let v = delta * (0.5 * (bmat[i * n + j] + bmat[j * n + i]) - sigma * bs[i] * bs[j] / denom);
                    bmat[i * n + j] = v;
                    bmat[j * n + i] = v;
                }
                bmat[i * n + i] = delta * (bmat[i * n + i] - sigma * bs[i] * bs[i] / denom);
            }
            let trace: f64 = (0..n).map(|i| bmat[i * n + i]).sum();
            if trace <= 1e-24 || !trace.is_finite() {
                break;
            }
        }
        None
    }

    /// One free coordinate: the objective is convex in it, so golden-section
    /// descent over a wide bracket is exact enough.
    fn feasible_1d(&self, a: &ComplexMatrix, gamma: f64, x0: &[f64]) -> Option<Vec<f64>> {
        let free = self.free_indices();
        let k = free[0];
        let eval = |v: f64| -> f64 {
            let mut x = x0.to_vec();
            x[0] = 1.0;
            x[k] = v;
            self.oracle(a, gamma, &x).0
        };
        // golden-section descent on a log scale over a wide bracket
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let (mut llo, mut lhi) = ((1e-9f64).ln(), (1e6f64).ln());
        let mut x1 = lhi - INV_PHI * (lhi - llo);
        let mut x2 = llo + INV_PHI * (lhi - llo);
        let mut f1 = eval(x1.exp());
        let mut f2 = eval(x2.exp());
        for _ in 0..160 {
            if f1.min(f2) <= 0.0 {
                break;
            }
            if f1 > f2 {
                llo = x1;
                x1 = x2;
                f1 = f2;
                x2 = llo + INV_PHI * (lhi - llo);
                f2 = eval(x2.exp());
            } else {
                lhi = x2;
                x2 = x1;
                f2 = f1;
                x1 = lhi - INV_PHI * (lhi - llo);
                f1 = eval(x1.exp());
            }
        }
        if f1.min(f2) <= 0.0 {
            let best = if f1 <= f2 { x1 } else { x2 };
            let mut x = x0.to_vec();
            x[0] = 1.0;
            x[k] = best.exp();
            Some(x)
        } else {
            None
        }
    }

    /// ||D A D^{-1}|| at D = P^{1/2} for the given parameters; an exact upper
    /// bound certificate.
    fn certified_norm(&self, a: &ComplexMatrix, x: &[f64]) -> f64 {
        let (d, dinv) = self.sqrt_and_inv(x);
        kernel::largest_singular_value(&(&(&d * a) * &dinv))
    }

    fn sqrt_and_inv(&self, x: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
        let mut d = ComplexMatrix::zeros(self.n, self.n);
        let mut dinv = ComplexMatrix::zeros(self.n, self.n);
        for b in 0..self.sizes.len() {
            let blk = self.block(x, b);
            let (vals, vecs) = kernel::hermitian_eig(&blk);
            let sq: Vec<Complex64> = vals
                .iter()
                .map(|&t| Complex64::new(t.max(1e-12).sqrt(), 0.0))
                .collect();
            let isq: Vec<Complex64> = vals
                .iter()
                .map(|&t| Complex64::new(1.0 / t.max(1e-12).sqrt(), 0.0))
                .collect();
            let sqm = &(&vecs * &ComplexMatrix::diagonal(&sq)) * &vecs.adjoint();
            let isqm = &(&vecs * &ComplexMatrix::diagonal(&isq)) * &vecs.adjoint();
            let off = self.offsets[b];
            for i in 0..self.sizes[b] {
                for j in 0..self.sizes[b] {
                    d[(off + i, off + j)] = sqm[(i, j)];
                    dinv[(off + i, off + j)] = isqm[(i, j)];
                }
            }
        }
        (d, dinv)
    }

    /// The pd blocks of D = P^{1/2}, normalized so the first block has unit
    /// mean eigenvalue.
    fn scaling_blocks(&self, x: &[f64]) -> Vec<ComplexMatrix> {
        let mut blocks = Vec::with_capacity(self.sizes.len());
        for b in 0..self.sizes.len() {
            let blk = self.block(x, b);
            let (vals, vecs) = kernel::hermitian_eig(&blk);
            let sq: Vec<Complex64> = vals
                .iter()
                .map(|&t| Complex64::new(t.max(1e-12).sqrt(), 0.0))
                .collect();
            blocks.push(&(&vecs * &ComplexMatrix::diagonal(&sq)) * &vecs.adjoint());
        }
        let scale = blocks[0]
            .data()
            .first()
            .map(|z| z.re)
            .filter(|&t| t > 1e-12)
            .unwrap_or(1.0);
        blocks.iter().map(|b| b.scale_re(1.0 / scale)).collect()
    }
}

/// Both sides of the bracket.
pub fn mu_bounds(
    a: &ComplexMatrix,
    st: &BlockStructure,
    phase_grid: usize,
    iters: usize,
) -> Result<MuBounds> {
    let (lower, phases) = mu_lower(a, st, phase_grid)?;
    let (upper, blocks) = mu_upper(a, st, iters)?;
    let scaling_witness: Vec<f64> = blocks
        .iter()
        .map(|b| {
            let vals = kernel::hermitian_eigenvalues(b);
            let mean_log =
                vals.iter().map(|v| v.max(1e-300).ln()).sum::<f64>() / vals.len().max(1) as f64;
            mean_log.exp()
        })
        .collect();
    let scaling_blocks = blocks
        .iter()
        .map(|b| {
            (0..b.rows())
                .map(|r| (0..b.cols()).map(|c| [b[(r, c)].re, b[(r, c)].im]).collect())
                .collect()
        })
        .collect();
    Ok(MuBounds {
        lower,
        upper,
        phase_witness: phases.iter().map(|z| [z.re, z.im]).collect(),
        scaling_witness,
        scaling_blocks,
    })
}

fn det2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    a * d - b * c
}

fn det3(m: &ComplexMatrix) -> Complex64 {
    m[(0, 0)] * det2(m[(1, 1)], m[(1, 2)], m[(2, 1)], m[(2, 2)])
        - m[(0, 1)] * det2(m[(1, 0)], m[(1, 2)], m[(2, 0)], m[(2, 2)])
        + m[(0, 2)] * det2(m[(1, 0)], m[(1, 1)], m[(2, 0)], m[(2, 1)])
}

/// Seven coordinates of a 3x3 witness: diagonal entries, pairwise principal
/// 2x2 minors, and the determinant.
pub fn symmetrize7(a: &ComplexMatrix) -> Result<GammaPoint> {
    expect_shape(a, 3)?;
    let coords = vec![
        a[(0, 0)],
        a[(1, 1)],
        det2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]),
        a[(2, 2)],
        det2(a[(0, 0)], a[(0, 2)], a[(2, 0)], a[(2, 2)]),
        det2(a[(1, 1)], a[(1, 2)], a[(2, 1)], a[(2, 2)]),
        det3(a),
    ];
    Ok(GammaPoint {
        variant: GammaVariant::E3311,
        coords,
        witness: Some(a.clone()),
    })
}

/// Five coordinates of a 3x3 witness for the (1,2)-block structure.
pub fn symmetrize5(a: &ComplexMatrix) -> Result<GammaPoint> {
    expect_shape(a, 3)?;
    let coords = vec![
        a[(0, 0)],
        det2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)])
            + det2(a[(0, 0)], a[(0, 2)], a[(2, 0)], a[(2, 2)]),
        det3(a),
        a[(1, 1)] + a[(2, 2)],
        det2(a[(1, 1)], a[(1, 2)], a[(2, 1)], a[(2, 2)]),
    ];
    Ok(GammaPoint {
        variant: GammaVariant::E3212,
        coords,
        witness: Some(a.clone()),
    })
}

/// Three coordinates of a 2x2 witness: diagonal entries and determinant.
pub fn symmetrize3(a: &ComplexMatrix) -> Result<GammaPoint> {
    expect_shape(a, 2)?;
    let coords = vec![
        a[(0, 0)],
        a[(1, 1)],
        det2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]),
    ];
    Ok(GammaPoint {
        variant: GammaVariant::E2211,
        coords,
        witness: Some(a.clone()),
    })
}

fn expect_shape(a: &ComplexMatrix, n: usize) -> Result<()> {
    if a.rows() != n || a.cols() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    a.check_finite()
}

/// One boundary condition with its residual.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryCondition {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

/// Outcome of a distinguished-boundary membership check.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryReport {
    pub conditions: Vec<BoundaryCondition>,
    pub pass: bool,
}

impl BoundaryReport {
    fn from_conditions(conditions: Vec<BoundaryCondition>) -> Self {
        let pass = conditions.iter().all(|c| c.pass);
        Self { conditions, pass }
    }
}

/// Boundary set of the 7-coordinate domain: |x7| = 1 together with the three
/// conjugate-symmetry identities x1 = conj(x6) x7, x3 = conj(x4) x7,
/// x5 = conj(x2) x7. Gamma membership itself is checked only through the
/// witness when one is present.
pub fn k_set_check(p: &GammaPoint, tol: f64) -> Result<BoundaryReport> {
    if p.variant != GammaVariant::E3311 || p.coords.len() != 7 {
        return Err(Error::ShapeMismatch {
            expected: "7 coordinates (E3311)".into(),
            found: format!("{} coordinates ({:?})", p.coords.len(), p.variant),
        });
    }
    let x = &p.coords;
    let mut conds = vec![
        condition("|x7| = 1", (x[6].norm() - 1.0).abs(), tol),
        condition("x1 = conj(x6) x7", (x[0] - x[5].conj() * x[6]).norm(), tol),
        condition("x3 = conj(x4) x7", (x[2] - x[3].conj() * x[6]).norm(), tol),
        condition("x5 = conj(x2) x7", (x[4] - x[1].conj() * x[6]).norm(), tol),
    ];
    if let Some(c) = witness_condition(p, tol)? {
        conds.push(c);
    }
    Ok(BoundaryReport::from_conditions(conds))
}

/// Boundary set of the 5-coordinate domain: |x3| = 1 with x1 = conj(y2) x3
/// and x2 = conj(y1) x3.
pub fn k1_set_check(p: &GammaPoint, tol: f64) -> Result<BoundaryReport> {
    if p.variant != GammaVariant::E3212 || p.coords.len() != 5 {
        return Err(Error::ShapeMismatch {
            expected: "5 coordinates (E3212)".into(),
            found: format!("{} coordinates ({:?})", p.coords.len(), p.variant),
        });
    }
    let x = &p.coords;
    let mut conds = vec![
        condition("|x3| = 1", (x[2].norm() - 1.0).abs(), tol),
        condition("x1 = conj(y2) x3", (x[0] - x[4].conj() * x[2]).norm(), tol),
        condition("x2 = conj(y1) x3", (x[1] - x[3].conj() * x[2]).norm(), tol),
    ];
    if let Some(c) = witness_condition(p, tol)? {
        conds.push(c);
    }
    Ok(BoundaryReport::from_conditions(conds))
}

fn condition(name: &str, residual: f64, tol: f64) -> BoundaryCondition {
    BoundaryCondition {
        name: name.into(),
        residual,
        pass: residual <= tol,
    }
}

fn witness_condition(p: &GammaPoint, tol: f64) -> Result<Option<BoundaryCondition>> {
    let Some(witness) = &p.witness else {
        return Ok(None);
    };
    let st = p.variant.structure();
    let (upper, _) = mu_upper(witness, &st, 64)?;
    Ok(Some(BoundaryCondition {
        name: "witness mu <= 1".into(),
        residual: (upper - 1.0).max(0.0),
        pass: upper <= 1.0 + tol,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::SplitMix64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(n: usize, rng: &mut SplitMix64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| rng.next_complex())
    }

    /// Independent minor-expansion oracle: permanent-style Leibniz sum.
    fn det_leibniz(m: &ComplexMatrix) -> Complex64 {
        let n = m.rows();
        let mut total = Complex64::new(0.0, 0.0);
        let mut perm: Vec<usize> = (0..n).collect();
        // Heap's algorithm over all permutations with sign tracking
        fn go(
            k: usize,
            perm: &mut Vec<usize>,
            sign: &mut f64,
            m: &ComplexMatrix,
            total: &mut Complex64,
        ) {
            let n = perm.len();
            if k == n {
                let mut prod = Complex64::new(*sign, 0.0);
                for (r, &p) in perm.iter().enumerate() {
                    prod *= m[(r, p)];
                }
                *total += prod;
                return;
            }
            for i in k..n {
                perm.swap(k, i);
                let mut s = if k == i { *sign } else { -*sign };
                go(k + 1, perm, &mut s, m, total);
                perm.swap(k, i);
            }
        }
        let mut sign = 1.0;
        go(0, &mut perm, &mut sign, m, &mut total);
        total
    }

    #[test]
    fn mu_lower_zero_and_scalar_cases() {
        let st = BlockStructure::new(vec![1, 1, 1]).unwrap();
        let (lo, _) = mu_lower(&ComplexMatrix::zeros(3, 3), &st, 8).unwrap();
        assert_eq!(lo, 0.0);

        // s = 1: lower equals the spectral radius at any grid
        let st1 = BlockStructure::new(vec![3]).unwrap();
        let mut rng = SplitMix64::new(2);
        let a = random_matrix(3, &mut rng);
        let (lo, _) = mu_lower(&a, &st1, 1).unwrap();
        let rho = kernel::spectral_radius(&a).unwrap();
        assert!((lo - rho).abs() < 1e-12);
    }

    #[test]
    fn mu_bracket_diagonal_closed_form() {
        let st = BlockStructure::new(vec![1, 1, 1]).unwrap();
        let a = ComplexMatrix::diagonal(&[c(0.3, 0.4), c(-0.7, 0.1), c(0.2, -0.6)]);
        let want = [0.5f64, (0.5f64).hypot(0.2 / 0.5), 0.0][0]; // |0.3+0.4i| = 0.5
        let maxmod = [c(0.3, 0.4).norm(), c(-0.7, 0.1).norm(), c(0.2, -0.6).norm()]
            .into_iter()
            .fold(0.0f64, f64::max);
        let _ = want;
        let (lo, _) = mu_lower(&a, &st, 16).unwrap();
        let (up, _) = mu_upper(&a, &st, 64).unwrap();
        assert!((lo - maxmod).abs() < 1e-6, "lower {lo} vs {maxmod}");
        assert!((up - maxmod).abs() < 1e-6, "upper {up} vs {maxmod}");
        assert!(lo <= up + 1e-9);
    }

    #[test]
    fn mu_upper_zero_case() {
        let st = BlockStructure::new(vec![1, 2]).unwrap();
        let (up, w) = mu_upper(&ComplexMatrix::zeros(3, 3), &st, 8).unwrap();
        assert_eq!(up, 0.0);
        assert_eq!(w.len(), 2);
        assert!((&w[1] - &ComplexMatrix::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn mu_upper_normal_single_block() {
        // for a normal matrix with s = 1, the only scalings are multiples of
        // the identity, so upper = ||A|| = rho(A) = lower
        let mut rng = SplitMix64::new(9);
        let st = BlockStructure::new(vec![3]).unwrap();
        let u = kernel::orthonormalize_columns(&random_matrix(3, &mut rng), 1e-12);
        let d = ComplexMatrix::diagonal(&[c(0.4, 0.1), c(-0.2, 0.7), c(0.3, -0.3)]);
        let a = &(&u * &d) * &u.adjoint();
        let (lo, _) = mu_lower(&a, &st, 1).unwrap();
        let (up, _) = mu_upper(&a, &st, 8).unwrap();
        assert!(up - lo <= 1e-4, "normal bracket width {}", up - lo);
    }

    #[test]
    fn mu_bracket_random_matrices() {
        let mut rng = SplitMix64::new(33);
        for sizes in [vec![1usize, 1, 1], vec![1, 2], vec![1, 1]] {
            let st = BlockStructure::new(sizes).unwrap();
            for k in 0..8 {
                let a = random_matrix(st.n, &mut rng);
                let b = mu_bounds(&a, &st, 64, 64).unwrap();
                assert!(b.lower <= b.upper + 1e-9, "bracket inverted");
                let rel = (b.upper - b.lower) / b.upper.max(1e-12);
                assert!(rel < 1e-3, "loose bracket at case {k}: {rel}");
            }
        }
    }

    #[test]
    fn oracle_subgradient_matches_finite_differences() {
        let mut rng = SplitMix64::new(99);
        let a = random_matrix(3, &mut rng);
        let st = BlockStructure::new(vec![1, 2]).unwrap();
        let scaler = BlockScaler::new(&st);
        let x = vec![1.0, 1.3, 0.2, -0.1, 0.8];
        let (g0, grad) = scaler.oracle(&a, 1.3, &x);
        let h = 1e-7;
        for k in 1..x.len() {
            let mut xp = x.clone();
            xp[k] += h;
            let (gp, _) = scaler.oracle(&a, 1.3, &xp);
            let fd = (gp - g0) / h;
            assert!(
                (grad[k - 1] - fd).abs() < 1e-5 * (1.0 + fd.abs()),
                "coordinate {k}: analytic {} vs fd {fd}",
                grad[k - 1]
            );
        }
    }

    #[test]
    fn mu_upper_witness_certifies_value() {
        // rebuilding ||D A D^{-1}|| from the returned blocks reproduces upper
        let mut rng = SplitMix64::new(87);
        let st = BlockStructure::new(vec![1, 2]).unwrap();
        let a = random_matrix(3, &mut rng);
        let (up, blocks) = mu_upper(&a, &st, 48).unwrap();
        let d = blocks[0].direct_sum(&blocks[1]);
        let spec = kernel::hermitian_eig(&d);
        let inv = ComplexMatrix::diagonal(
            &spec.0.iter().map(|&v| c(1.0 / v, 0.0)).collect::<Vec<_>>(),
        );
        let dinv = &(&spec.1 * &inv) * &spec.1.adjoint();
        let rebuilt = kernel::largest_singular_value(&(&(&d * &a) * &dinv));
        assert!((rebuilt - up).abs() <= 1e-9 * up.max(1.0), "{rebuilt} vs {up}");
    }

    #[test]
    fn mu_scaling_covariance() {
        let mut rng = SplitMix64::new(57);
        let st = BlockStructure::new(vec![1, 1, 1]).unwrap();
        let a = random_matrix(3, &mut rng);
        let cscale = c(0.37, -1.21);
        let scaled = a.scale(cscale);
        let (lo1, _) = mu_lower(&a, &st, 32).unwrap();
        let (lo2, _) = mu_lower(&scaled, &st, 32).unwrap();
        assert!((lo2 - cscale.norm() * lo1).abs() < 1e-8 * lo2.max(1.0));
        let (up1, _) = mu_upper(&a, &st, 64).unwrap();
        let (up2, _) = mu_upper(&scaled, &st, 64).unwrap();
        assert!((up2 - cscale.norm() * up1).abs() < 1e-8 * up2.max(1.0));
    }

    #[test]
    fn mu_lower_monotone_in_grid() {
        let mut rng = SplitMix64::new(91);
        let st = BlockStructure::new(vec![1, 2]).unwrap();
        let a = random_matrix(3, &mut rng);
        let mut prev = 0.0;
        for grid in [8usize, 16, 32, 64] {
            let (lo, _) = mu_lower(&a, &st, grid).unwrap();
            assert!(lo >= prev - 1e-9, "grid {grid}: {lo} < {prev}");
            prev = lo;
        }
    }

    #[test]
    fn mu_witness_consistency() {
        // det(I - A X / lower) with X the returned phase witness vanishes
        let mut rng = SplitMix64::new(15);
        for sizes in [vec![1usize, 1, 1], vec![1, 2], vec![3]] {
            let st = BlockStructure::new(sizes).unwrap();
            let a = random_matrix(st.n, &mut rng);
            let (lo, phases) = mu_lower(&a, &st, 64).unwrap();
            assert!(lo > 0.0);
            let coord_block: Vec<usize> = st
                .block_sizes
                .iter()
                .enumerate()
                .flat_map(|(b, &r)| std::iter::repeat_n(b, r))
                .collect();
            let x = ComplexMatrix::from_fn(st.n, st.n, |r, c| {
                if r == c {
                    phases[coord_block[r]] / lo
                } else {
                    c64_zero()
                }
            });
            let det = det_leibniz(&(&ComplexMatrix::identity(st.n) - &(&a * &x)));
            assert!(det.norm() < 1e-6, "witness determinant {det}");
        }
    }

    fn c64_zero() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    #[test]
    fn symmetrize_examples_and_oracle() {
        let id = ComplexMatrix::identity(3);
        let p7 = symmetrize7(&id).unwrap();
        for k in 0..7 {
            assert!((p7.coords[k] - c(1.0, 0.0)).norm() < 1e-15);
        }
        let p5 = symmetrize5(&id).unwrap();
        let want5 = [1.0, 2.0, 1.0, 2.0, 1.0];
        for k in 0..5 {
            assert!((p5.coords[k] - c(want5[k], 0.0)).norm() < 1e-15);
        }
        let z3 = ComplexMatrix::zeros(3, 3);
        assert!(symmetrize7(&z3).unwrap().coords.iter().all(|z| z.norm() == 0.0));
        assert!(symmetrize5(&z3).unwrap().coords.iter().all(|z| z.norm() == 0.0));

        let d = ComplexMatrix::diagonal(&[c(0.2, 0.1), c(-0.4, 0.3), c(0.5, -0.2)]);
        let (a, b, cc) = (d[(0, 0)], d[(1, 1)], d[(2, 2)]);
        let p = symmetrize7(&d).unwrap();
        let want = [a, b, a * b, cc, a * cc, b * cc, a * b * cc];
        for k in 0..7 {
            assert!((p.coords[k] - want[k]).norm() < 1e-15);
        }
        let p = symmetrize5(&d).unwrap();
        let want = [a, a * b + a * cc, a * b * cc, b + cc, b * cc];
        for k in 0..5 {
            assert!((p.coords[k] - want[k]).norm() < 1e-15);
        }

        let two = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
        let p = symmetrize3(&two).unwrap();
        assert!(p.coords.iter().all(|z| z.norm() == 0.0));
        let d2 = ComplexMatrix::diagonal(&[c(0.3, 0.2), c(-0.1, 0.4)]);
        let p = symmetrize3(&d2).unwrap();
        assert!((p.coords[2] - d2[(0, 0)] * d2[(1, 1)]).norm() < 1e-15);

        // polynomial-map oracle on random matrices: determinant by Leibniz sum
        let mut rng = SplitMix64::new(4);
        for _ in 0..10 {
            let m = random_matrix(3, &mut rng);
            let p = symmetrize7(&m).unwrap();
            assert!((p.coords[6] - det_leibniz(&m)).norm() < 1e-13);
            let minor01 = det_leibniz(&m.submatrix(0, 0, 2, 2));
            assert!((p.coords[2] - minor01).norm() < 1e-13);
            let p5 = symmetrize5(&m).unwrap();
            assert!((p5.coords[2] - det_leibniz(&m)).norm() < 1e-13);
        }
        // shape errors
        assert!(symmetrize7(&ComplexMatrix::identity(2)).is_err());
        assert!(symmetrize3(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn boundary_checks() {
        // all-ones point lies in the boundary set
        let ones = GammaPoint {
            variant: GammaVariant::E3311,
            coords: vec![c(1.0, 0.0); 7],
            witness: None,
        };
        assert!(k_set_check(&ones, 1e-10).unwrap().pass);

        // breaking |x7| = 1 is reported on that condition
        let mut bad = ones.clone();
        bad.coords[6] = c(0.5, 0.0);
        let report = k_set_check(&bad, 1e-10).unwrap();
        assert!(!report.pass);
        assert!(!report.conditions[0].pass);

        // unitary-diagonal witnesses land in the boundary sets
        let mut rng = SplitMix64::new(8);
        for _ in 0..5 {
            let phases: Vec<Complex64> = (0..3).map(|_| rng.next_phase()).collect();
            let u = ComplexMatrix::diagonal(&phases);
            let p7 = symmetrize7(&u).unwrap();
            let r = k_set_check(&p7, 1e-8).unwrap();
            assert!(r.pass, "k check failed: {:?}", r.conditions);
            let p5 = symmetrize5(&u).unwrap();
            let r = k1_set_check(&p5, 1e-8).unwrap();
            assert!(r.pass, "k1 check failed: {:?}", r.conditions);
        }

        // k1: all-ones style point
        let p = GammaPoint {
            variant: GammaVariant::E3212,
            coords: vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)],
            witness: None,
        };
        assert!(k1_set_check(&p, 1e-10).unwrap().pass);
        let mut bad = p.clone();
        bad.coords[2] = c(0.0, 0.0);
        assert!(!k1_set_check(&bad, 1e-10).unwrap().pass);
    }
}
