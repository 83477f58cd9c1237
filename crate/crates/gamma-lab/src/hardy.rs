//! Truncated Hardy-space machinery: block shifts, analytic (degree-one)
//! pencils, the characteristic-function series and its Toeplitz
//! realization, the defect embedding W, and the intertwining checks that
//! tie a fundamental family on one defect space to its partner on the other.
//!
//! Vectors of the truncated space are stored level-major: level n occupies
//! coordinates n*d .. (n+1)*d.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fundamental::CommutingTuple7;
use crate::kernel::{self, defect_pair, psd_sqrt, ComplexMatrix, SubspaceBasis};

/// N coefficient levels of an E-valued Hardy space with fiber dimension d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedHardySpace {
    pub levels: usize,
    pub fiber_dim: usize,
}

impl TruncatedHardySpace {
    pub fn new(levels: usize, fiber_dim: usize) -> Self {
        Self { levels, fiber_dim }
    }

    pub fn total_dim(&self) -> usize {
        self.levels * self.fiber_dim
    }
}

/// Degree-one matrix symbol C0 + C1 z.
#[derive(Debug, Clone)]
pub struct AnalyticPencil {
    pub c0: ComplexMatrix,
    pub c1: ComplexMatrix,
}

impl AnalyticPencil {
    pub fn new(c0: ComplexMatrix, c1: ComplexMatrix) -> Result<Self> {
        c0.check_square()?;
        c1.check_square()?;
        c0.check_same_shape(&c1)?;
        Ok(Self { c0, c1 })
    }

    pub fn fiber_dim(&self) -> usize {
        self.c0.rows()
    }
}

/// Lower-triangular block Toeplitz operator on a truncated Hardy space,
/// defined by its symbol coefficients c_0..c_K (each mapping the input fiber
/// to the output fiber).
#[derive(Debug, Clone)]
pub struct BlockToeplitzOperator {
    pub coefficients: Vec<ComplexMatrix>,
    pub levels: usize,
}

impl BlockToeplitzOperator {
    /// Dense realization: block (m, k) is c_{m-k} for m >= k.
    pub fn realize(&self) -> ComplexMatrix {
        let out_fiber = self.coefficients[0].rows();
        let in_fiber = self.coefficients[0].cols();
        let n = self.levels;
        let mut m = ComplexMatrix::zeros(n * out_fiber, n * in_fiber);
        for lvl_out in 0..n {
            for lvl_in in 0..=lvl_out {
                let k = lvl_out - lvl_in;
                if k >= self.coefficients.len() {
                    continue;
                }
                let blk = &self.coefficients[k];
                for r in 0..out_fiber {
                    for c in 0..in_fiber {
                        m[(lvl_out * out_fiber + r, lvl_in * in_fiber + c)] = blk[(r, c)];
                    }
                }
            }
        }
        m
    }
}

/// Which form of the characteristic function to expand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaConvention {
    /// -T + z D_{T*} (I - z T*)^{-1} D_T: the analytic term carries the
    /// extra factor z. This is the convention under which
    /// W W* + M_Theta M_Theta* = I holds.
    ShiftedAnalytic,
    /// -T + D_{T*} (I - z T*)^{-1} D_T without the z factor; kept only to
    /// demonstrate that it breaks the completeness identity (already at
    /// T = 0 it leaves the constants uncovered).
    LiteralResolvent,
}

/// Power-series coefficients of the characteristic function, compressed to
/// the defect bases.
#[derive(Debug, Clone)]
pub struct ThetaSeries {
    /// c_0..c_K, each codomain-rank x domain-rank.
    pub coefficients: Vec<ComplexMatrix>,
    /// Basis of the defect space of T (the domain fiber).
    pub domain: SubspaceBasis,
    /// Basis of the defect space of T* (the codomain fiber).
    pub codomain: SubspaceBasis,
    /// Bound on the norm sum of the dropped coefficients; infinite when no
    /// geometric decay certificate exists.
    pub tail_bound: f64,
    pub convention: ThetaConvention,
}

impl ThetaSeries {
    /// Evaluate the series at a point of the closed disc.
    pub fn evaluate(&self, z: Complex64) -> ComplexMatrix {
        let r_out = self.codomain.rank();
        let r_in = self.domain.rank();
        let mut acc = ComplexMatrix::zeros(r_out, r_in);
        let mut zk = Complex64::new(1.0, 0.0);
        for c in &self.coefficients {
            acc = &acc + &c.scale(zk);
            zk *= z;
        }
        acc
    }
}

/// Block forward shift on N levels; the top coefficient is annihilated.
pub fn truncated_shift(sp: TruncatedHardySpace) -> ComplexMatrix {
    let d = sp.fiber_dim;
    let n = sp.levels;
    let mut m = ComplexMatrix::zeros(n * d, n * d);
    for lvl in 0..n.saturating_sub(1) {
        for j in 0..d {
            m[((lvl + 1) * d + j, lvl * d + j)] = Complex64::new(1.0, 0.0);
        }
    }
    m
}

/// Block bidiagonal realization of multiplication by C0 + C1 z.
pub fn pencil_operator(p: &AnalyticPencil, sp: TruncatedHardySpace) -> Result<ComplexMatrix> {
    if p.fiber_dim() != sp.fiber_dim {
        return Err(Error::ShapeMismatch {
            expected: format!("fiber {}", sp.fiber_dim),
            found: format!("fiber {}", p.fiber_dim()),
        });
    }
    let d = sp.fiber_dim;
    let n = sp.levels;
    let mut m = ComplexMatrix::zeros(n * d, n * d);
    for lvl in 0..n {
        for r in 0..d {
            for c in 0..d {
                m[(lvl * d + r, lvl * d + c)] = p.c0[(r, c)];
                if lvl + 1 < n {
                    m[((lvl + 1) * d + r, lvl * d + c)] = p.c1[(r, c)];
                }
            }
        }
    }
    Ok(m)
}

/// Characteristic-function coefficients of a contraction, in the corrected
/// convention: c_0 = -T restricted to the defect space and
/// c_k = D_{T*} T*^(k-1) D_T for k >= 1.
pub fn theta_series(t: &ComplexMatrix, terms: usize) -> Result<ThetaSeries> {
    theta_series_with_convention(t, terms, ThetaConvention::ShiftedAnalytic)
}

pub fn theta_series_with_convention(
    t: &ComplexMatrix,
    terms: usize,
    convention: ThetaConvention,
) -> Result<ThetaSeries> {
    let (d_t, domain) = defect_pair(t, None)?;
    let (d_star, codomain) = defect_pair(&t.adjoint(), None)?;
    let bt = &domain.frame;
    let bs = &codomain.frame;
    let r_in = domain.rank();
    let r_out = codomain.rank();
    let mut coefficients = Vec::with_capacity(terms + 1);
    if r_in == 0 || r_out == 0 {
        let tail_bound = 0.0;
        return Ok(ThetaSeries {
            coefficients,
            domain,
            codomain,
            tail_bound,
            convention,
        });
    }
    let d_t_in = &d_t * bt; // n x r_in
    let left = &bs.adjoint() * &d_star; // r_out x n
    let tstar = t.adjoint();
    match convention {
        ThetaConvention::ShiftedAnalytic => {
            coefficients.push(&bs.adjoint() * &(&(-t) * bt));
            let mut power = ComplexMatrix::identity(t.rows());
            for _k in 1..=terms {
                coefficients.push(&(&left * &power) * &d_t_in);
                power = &power * &tstar;
            }
        }
        ThetaConvention::LiteralResolvent => {
            let c0 = &(&bs.adjoint() * &(&(-t) * bt)) + &(&left * &d_t_in);
            coefficients.push(c0);
            let mut power = tstar.clone();
            for _k in 1..=terms {
                coefficients.push(&(&left * &power) * &d_t_in);
                power = &power * &tstar;
            }
        }
    }
    // geometric decay certificate from the spectral radius
    let rho = kernel::spectral_radius(t)?;
    let tail_bound = if rho < 1.0 - 1e-9 {
        let pk = kernel::op_norm(&t.pow(terms as u64));
        kernel::op_norm(&d_star) * pk * kernel::op_norm(&d_t) / (1.0 - rho)
    } else {
        f64::INFINITY
    };
    Ok(ThetaSeries {
        coefficients,
        domain,
        codomain,
        tail_bound,
        convention,
    })
}

/// Lower-triangular block Toeplitz realization of the series on N levels.
pub fn theta_toeplitz(th: &ThetaSeries, levels: usize) -> Result<BlockToeplitzOperator> {
    if th.domain.rank() == 0 || th.codomain.rank() == 0 {
        return Ok(BlockToeplitzOperator {
            coefficients: vec![ComplexMatrix::zeros(th.codomain.rank(), th.domain.rank())],
            levels,
        });
    }
    if th.coefficients.len() < levels {
        return Err(Error::InsufficientCoefficients {
            needed: levels,
            have: th.coefficients.len(),
        });
    }
    Ok(BlockToeplitzOperator {
        coefficients: th.coefficients[..levels].to_vec(),
        levels,
    })
}

/// Pointwise boundary defect (I - Theta(omega)* Theta(omega))^{1/2} with the
/// series summed adaptively until its tail certificate is negligible.
pub fn delta_sample(t: &ComplexMatrix, omega: Complex64) -> Result<ComplexMatrix> {
    if (omega.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "evaluation point must be unimodular, |omega| = {}",
            omega.norm()
        )));
    }
    let mut terms = 64usize;
    let mut th = theta_series(t, terms)?;
    if th.domain.rank() == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    while !th.tail_bound.is_finite() || th.tail_bound > 1e-11 {
        if terms >= 4096 || !th.tail_bound.is_finite() {
            break;
        }
        terms *= 2;
        th = theta_series(t, terms)?;
    }
    let theta = th.evaluate(omega);
    let gram = &ComplexMatrix::identity(th.domain.rank()) - &(&theta.adjoint() * &theta);
    let clip = (10.0 * th.tail_bound.min(1.0)).max(1e-8);
    psd_sqrt(&gram, clip)
}

/// The defect embedding W: rows are D_{T*} T*^n for n = 0..N-1, expressed in
/// the defect basis of T*. Satisfies W* W = I - T^N T*^N exactly.
pub fn build_w(t: &ComplexMatrix, levels: usize) -> Result<ComplexMatrix> {
    let (d_star, codomain) = defect_pair(&t.adjoint(), None)?;
    Ok(build_w_with(t, levels, &d_star, &codomain))
}

fn build_w_with(
    t: &ComplexMatrix,
    levels: usize,
    d_star: &ComplexMatrix,
    codomain: &SubspaceBasis,
) -> ComplexMatrix {
    let n = t.rows();
    let r = codomain.rank();
    let mut w = ComplexMatrix::zeros(levels * r, n);
    let left = &codomain.frame.adjoint() * d_star; // r x n
    let tstar = t.adjoint();
    let mut power = ComplexMatrix::identity(n);
    for lvl in 0..levels {
        let row = &left * &power;
        for i in 0..r {
            for j in 0..n {
                w[(lvl * r + i, j)] = row[(i, j)];
            }
        }
        power = &power * &tstar;
    }
    w
}

/// Diagnostics for the completeness identity W W* + M M* = I on the
/// truncated space.
#[derive(Debug, Clone)]
pub struct WPropertyReport {
    /// Operator-norm residual of W W* + M_Theta M_Theta* - I on all N levels.
    /// The compression of the identity to the truncation is exact (every
    /// factor is analytic), so this is rounding-level when the convention is
    /// the corrected one.
    pub residual: f64,
    /// ||T^N||, the mass the truncated W fails to capture.
    pub tail_bound: f64,
    pub levels: usize,
}

/// Residual of W W* + M_Theta M_Theta* = I on N levels.
pub fn w_property_residual(t: &ComplexMatrix, levels: usize) -> Result<WPropertyReport> {
    w_property_residual_with_convention(t, levels, ThetaConvention::ShiftedAnalytic)
}

pub fn w_property_residual_with_convention(
    t: &ComplexMatrix,
    levels: usize,
    convention: ThetaConvention,
) -> Result<WPropertyReport> {
    if levels == 0 {
        return Err(Error::InvalidArgument("need at least one level".into()));
    }
    let th = theta_series_with_convention(t, levels.saturating_sub(1).max(1), convention)?;
    let r = th.codomain.rank();
    let dim = levels * r;
    let tail_bound = kernel::op_norm(&t.pow(levels as u64));
    if r == 0 {
        // unitary T: both W and Theta vanish along with the ambient space
        return Ok(WPropertyReport {
            residual: 0.0,
            tail_bound,
            levels,
        });
    }
    let (d_star, _) = defect_pair(&t.adjoint(), None)?;
    let w = build_w_with(t, levels, &d_star, &th.codomain);
    let m = theta_toeplitz(&th, levels)?.realize();
    let sum = &(&w * &w.adjoint()) + &(&m * &m.adjoint());
    let residual = kernel::op_norm(&(&sum - &ComplexMatrix::identity(dim)));
    Ok(WPropertyReport {
        residual,
        tail_bound,
        levels,
    })
}

/// Per-identity residuals of the coefficient-level intertwining
/// (F~_i* + F~_{7-i} z) Theta(z) = Theta(z) (F_i + F_{7-i}* z) through the
/// given degree.
pub fn intertwine_residual7(
    ftilde: &[ComplexMatrix],
    f: &[ComplexMatrix],
    th: &ThetaSeries,
    deg: usize,
) -> Result<Vec<f64>> {
    if ftilde.len() != 6 || f.len() != 6 {
        return Err(Error::ShapeMismatch {
            expected: "6 + 6 symbols".into(),
            found: format!("{} + {}", ftilde.len(), f.len()),
        });
    }
    if th.coefficients.len() < deg + 1 {
        return Err(Error::InsufficientCoefficients {
            needed: deg + 1,
            have: th.coefficients.len(),
        });
    }
    let mut out = Vec::with_capacity(6);
    for i in 0..6 {
        out.push(pencil_intertwine_residual(
            &ftilde[i], &ftilde[5 - i], &f[i], &f[5 - i], th, deg,
        ));
    }
    Ok(out)
}

/// Coefficient residual of (A* + B z) Theta(z) = Theta(z) (C + E* z).
fn pencil_intertwine_residual(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    e: &ComplexMatrix,
    th: &ThetaSeries,
    deg: usize,
) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..=deg {
        let ck = &th.coefficients[k];
        let lhs_low = &a.adjoint() * ck;
        let rhs_low = ck * c;
        let mut diff = &lhs_low - &rhs_low;
        if k > 0 {
            let ckm = &th.coefficients[k - 1];
            diff = &diff + &(&(b * ckm) - &(ckm * &e.adjoint()));
        }
        worst = worst.max(kernel::op_norm(&diff));
    }
    worst
}

/// The four 5-tuple intertwining identities, coefficient-level, through the
/// given degree. `ghat` lives on the defect space of S_3*, `g` on that of
/// S_3; both in the order (G_1, G_2, G~_1, G~_2).
#[allow(clippy::too_many_arguments)]
pub fn intertwine_residual5(
    ghat: (&ComplexMatrix, &ComplexMatrix, &ComplexMatrix, &ComplexMatrix),
    g: (&ComplexMatrix, &ComplexMatrix, &ComplexMatrix, &ComplexMatrix),
    th: &ThetaSeries,
    deg: usize,
) -> Result<Vec<f64>> {
    if th.coefficients.len() < deg + 1 {
        return Err(Error::InsufficientCoefficients {
            needed: deg + 1,
            have: th.coefficients.len(),
        });
    }
    let (gh1, gh2, ght1, ght2) = ghat;
    let (g1, g2, gt1, gt2) = g;
    // (A* + B z) Theta = Theta (C + E* z) instances per the four identities
    let cases = [
        (gh1, ght2, g1, gt2),
        (gh2, ght1, g2, gt1),
        (ght1, gh2, gt1, g2),
        (ght2, gh1, gt2, g1),
    ];
    Ok(cases
        .iter()
        .map(|(a, b, c, e)| pencil_intertwine_residual(a, b, c, e, th, deg))
        .collect())
}

/// A functional-model compression: the orthogonal complement of the range of
/// the truncated characteristic-function operator, with the shift and the
/// degree-one pencils compressed onto it.
#[derive(Debug, Clone)]
pub struct CompressedModel {
    pub tuple: CommutingTuple7,
    /// Dimension of the computed model space.
    pub model_dim: usize,
    /// Dimension of the state space the model should reproduce.
    pub state_dim: usize,
    /// Orthonormal basis of the model space inside the truncated Hardy space.
    pub basis: ComplexMatrix,
}

/// Compress the 7-tuple model (pencils over the defect fiber of T*, shift in
/// the last slot) to the orthogonal complement of the numerical range of the
/// truncated Toeplitz realization of Theta. Requires a spectral radius
/// strictly below one so the tail ||T^N|| certifies the rank cut.
pub fn compress_pure_model(
    ftilde: &[ComplexMatrix],
    t7: &ComplexMatrix,
    levels: usize,
) -> Result<CompressedModel> {
    if ftilde.len() != 6 {
        return Err(Error::ShapeMismatch {
            expected: "6 symbols".into(),
            found: format!("{}", ftilde.len()),
        });
    }
    let rho = kernel::spectral_radius(t7)?;
    if rho >= 1.0 - 1e-9 {
        return Err(Error::NotPure {
            spectral_radius: rho,
        });
    }
    let th = theta_series(t7, levels.saturating_sub(1).max(1))?;
    let r_star = th.codomain.rank();
    for f in ftilde {
        if f.rows() != r_star || f.cols() != r_star {
            return Err(Error::ShapeMismatch {
                expected: format!("{r_star}x{r_star} symbols on the defect fiber"),
                found: format!("{}x{}", f.rows(), f.cols()),
            });
        }
    }
    let m = theta_toeplitz(&th, levels)?.realize();
    let tail = kernel::op_norm(&t7.pow(levels as u64));
    let sigma_cut = (3.0 * tail.sqrt()).max(1e-8);
    // left singular directions of M below the cut span the model space
    let gram = &m * &m.adjoint();
    let (vals, vecs) = kernel::hermitian_eig(&gram);
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&i| vals[i].max(0.0).sqrt() <= sigma_cut)
        .collect();
    let basis = vecs.select_columns(&keep);
    let sp = TruncatedHardySpace::new(levels, r_star);
    let compress = |op: &ComplexMatrix| &(&basis.adjoint() * op) * &basis;
    let mut mats = Vec::with_capacity(7);
    for i in 0..6 {
        let pencil = AnalyticPencil::new(ftilde[i].adjoint(), ftilde[5 - i].clone())?;
        mats.push(compress(&pencil_operator(&pencil, sp)?));
    }
    mats.push(compress(&truncated_shift(sp)));
    Ok(CompressedModel {
        tuple: CommutingTuple7::new(mats)?,
        model_dim: keep.len(),
        state_dim: t7.rows(),
        basis,
    })
}
