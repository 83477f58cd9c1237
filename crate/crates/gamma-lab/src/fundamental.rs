//! Fundamental equations of commuting 7- and 5-tuples: least-squares
//! solution on the defect space of the last coordinate, recurrence
//! verification, pencil numerical-radius gates, and the commutativity
//! condition families the admissible constructions require.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{
    self, defect_pair, numerical_radius, ComplexMatrix, SubspaceBasis, CONTRACTION_SLACK,
};

/// Commuting 7-tuple (T_1..T_7).
#[derive(Debug, Clone)]
pub struct CommutingTuple7 {
    pub t: Vec<ComplexMatrix>,
    pub commutation_residual: f64,
}

impl CommutingTuple7 {
    pub fn new(t: Vec<ComplexMatrix>) -> Result<Self> {
        if t.len() != 7 {
            return Err(Error::ShapeMismatch {
                expected: "7 matrices".into(),
                found: format!("{}", t.len()),
            });
        }
        let n = t[0].rows();
        for m in &t {
            m.check_square()?;
            m.check_finite()?;
            if m.rows() != n {
                return Err(Error::ShapeMismatch {
                    expected: format!("{n}x{n}"),
                    found: format!("{}x{}", m.rows(), m.cols()),
                });
            }
        }
        let mut res = 0.0f64;
        for i in 0..7 {
            for j in (i + 1)..7 {
                res = res.max(kernel::op_norm(&t[i].commutator(&t[j])));
            }
        }
        Ok(Self {
            t,
            commutation_residual: res,
        })
    }

    pub fn dim(&self) -> usize {
        self.t[0].rows()
    }

    /// The adjoint tuple (T_1*, ..., T_7*).
    pub fn adjoint(&self) -> Self {
        Self {
            t: self.t.iter().map(|m| m.adjoint()).collect(),
            commutation_residual: self.commutation_residual,
        }
    }

    /// Conjugated tuple (U T_i U*).
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.t.iter().map(|m| &(u * m) * &u.adjoint()).collect())
    }
}

/// Commuting 5-tuple (S_1, S_2, S_3, S~_1, S~_2).
#[derive(Debug, Clone)]
pub struct CommutingTuple5 {
    pub s: Vec<ComplexMatrix>,
    pub stilde: Vec<ComplexMatrix>,
    pub commutation_residual: f64,
}

impl CommutingTuple5 {
    pub fn new(s: Vec<ComplexMatrix>, stilde: Vec<ComplexMatrix>) -> Result<Self> {
        if s.len() != 3 || stilde.len() != 2 {
            return Err(Error::ShapeMismatch {
                expected: "3 + 2 matrices".into(),
                found: format!("{} + {}", s.len(), stilde.len()),
            });
        }
        let n = s[0].rows();
        let all = || s.iter().chain(stilde.iter());
        for m in all() {
            m.check_square()?;
            m.check_finite()?;
            if m.rows() != n {
                return Err(Error::ShapeMismatch {
                    expected: format!("{n}x{n}"),
                    found: format!("{}x{}", m.rows(), m.cols()),
                });
            }
        }
        let family: Vec<&ComplexMatrix> = all().collect();
        let mut res = 0.0f64;
        for i in 0..family.len() {
            for j in (i + 1)..family.len() {
                res = res.max(kernel::op_norm(&family[i].commutator(family[j])));
            }
        }
        Ok(Self {
            s,
            stilde,
            commutation_residual: res,
        })
    }

    pub fn dim(&self) -> usize {
        self.s[0].rows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            s: self.s.iter().map(|m| m.adjoint()).collect(),
            stilde: self.stilde.iter().map(|m| m.adjoint()).collect(),
            commutation_residual: self.commutation_residual,
        }
    }
}

/// Solved fundamental operators F_1..F_6 of a 7-tuple, expressed on an
/// orthonormal basis of the defect space of T_7.
#[derive(Debug, Clone)]
pub struct FundamentalSet7 {
    /// 6 operators, each rank x rank in defect-basis coordinates.
    pub f: Vec<ComplexMatrix>,
    pub basis: SubspaceBasis,
    /// The full-space defect operator D_{T_7}.
    pub defect: ComplexMatrix,
    /// Residual of D F_i D = T_i - T_{7-i}* T_7 per equation.
    pub residuals: Vec<f64>,
}

impl FundamentalSet7 {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// F_i extended to the ambient space (zero off the defect space).
    pub fn extended(&self, i: usize) -> ComplexMatrix {
        self.basis.extend(&self.f[i])
    }
}

/// Solved fundamental operators (G_1, G_2, G~_1, G~_2) of a 5-tuple on the
/// defect space of S_3. The stored G_2 and G~_1 solve the halved equations;
/// the pencils of the isometry model reference 2 G_2 and 2 G~_1.
#[derive(Debug, Clone)]
pub struct FundamentalSet5 {
    pub g1: ComplexMatrix,
    pub g2: ComplexMatrix,
    pub gt1: ComplexMatrix,
    pub gt2: ComplexMatrix,
    pub basis: SubspaceBasis,
    pub defect: ComplexMatrix,
    /// Residuals for the equations solved by (G_1, G~_2, G_2, G~_1) in that
    /// order.
    pub residuals: Vec<f64>,
}

impl FundamentalSet5 {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Inverse of the (positive definite) compression of D to the defect basis,
/// with eigenvalues below `cut` treated as zero.
fn pinv_on_basis(d_on_basis: &ComplexMatrix, cut: f64) -> ComplexMatrix {
    let (vals, vecs) = kernel::hermitian_eig(d_on_basis);
    let inv: Vec<Complex64> = vals
        .iter()
        .map(|&v| {
            if v > cut {
                Complex64::new(1.0 / v, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    &(&vecs * &ComplexMatrix::diagonal(&inv)) * &vecs.adjoint()
}

/// Least-squares solve of D X D = RHS on the defect basis.
fn solve_sandwich(
    rhs: &ComplexMatrix,
    defect: &ComplexMatrix,
    basis: &SubspaceBasis,
) -> (ComplexMatrix, f64) {
    let d_bb = basis.compress(defect);
    let cut = basis.rank_tolerance.sqrt() * 0.5;
    let dinv = pinv_on_basis(&d_bb, cut);
    let x = &(&dinv * &basis.compress(rhs)) * &dinv;
    let rebuilt = &(defect * &basis.extend(&x)) * defect;
    let residual = kernel::op_norm(&(&rebuilt - rhs));
    (x, residual)
}

/// Solve T_i - T_{7-i}* T_7 = D_{T_7} F_i D_{T_7} for i = 1..6.
///
/// With a rank-zero defect (T_7 an isometry) the returned set is empty and
/// the residuals are the norms of the left-hand sides, which vanish exactly
/// when the tuple satisfies the isometry relations.
pub fn solve_fundamental7(t: &CommutingTuple7, _tol: f64) -> Result<FundamentalSet7> {
    let t7 = &t.t[6];
    let (defect, basis) = defect_pair(t7, None)?;
    let mut f = Vec::with_capacity(6);
    let mut residuals = Vec::with_capacity(6);
    for i in 0..6 {
        let rhs = &t.t[i] - &(&t.t[5 - i].adjoint() * t7);
        if basis.rank() == 0 {
            residuals.push(kernel::op_norm(&rhs));
        } else {
            let (x, res) = solve_sandwich(&rhs, &defect, &basis);
            f.push(x);
            residuals.push(res);
        }
    }
    Ok(FundamentalSet7 {
        f,
        basis,
        defect,
        residuals,
    })
}

/// Solve the four 5-tuple equations: S_1 - S~_2* S_3 = D G_1 D,
/// S~_2 - S_1* S_3 = D G~_2 D, S_2/2 - (S~_1*/2) S_3 = D G_2 D and
/// S~_1/2 - (S_2*/2) S_3 = D G~_1 D, on the defect space of S_3.
pub fn solve_fundamental5(s: &CommutingTuple5, tol: f64) -> Result<FundamentalSet5> {
    let s3 = &s.s[2];
    let gates = [
        (kernel::op_norm(&s.s[0]), 1.0, "S1"),
        (kernel::op_norm(&s.stilde[1]), 1.0, "S~2"),
        (kernel::op_norm(&s.s[1]), 2.0, "S2"),
        (kernel::op_norm(&s.stilde[0]), 2.0, "S~1"),
    ];
    for (norm, cap, name) in gates {
        if norm > cap + tol.max(CONTRACTION_SLACK) {
            return Err(Error::InvalidArgument(format!(
                "norm gate violated: ||{name}|| = {norm:.12} > {cap}"
            )));
        }
    }
    let (defect, basis) = defect_pair(s3, None)?;
    let rhs = [
        &s.s[0] - &(&s.stilde[1].adjoint() * s3),
        &s.stilde[1] - &(&s.s[0].adjoint() * s3),
        &s.s[1].scale_re(0.5) - &(&s.stilde[0].adjoint().scale_re(0.5) * s3),
        &s.stilde[0].scale_re(0.5) - &(&s.s[1].adjoint().scale_re(0.5) * s3),
    ];
    let mut solved = Vec::with_capacity(4);
    let mut residuals = Vec::with_capacity(4);
    for r in rhs.iter() {
        if basis.rank() == 0 {
            solved.push(ComplexMatrix::zeros(0, 0));
            residuals.push(kernel::op_norm(r));
        } else {
            let (x, res) = solve_sandwich(r, &defect, &basis);
            solved.push(x);
            residuals.push(res);
        }
    }
    let gt1 = solved.pop().expect("four solves");
    let g2 = solved.pop().expect("four solves");
    let gt2 = solved.pop().expect("four solves");
    let g1 = solved.pop().expect("four solves");
    Ok(FundamentalSet5 {
        g1,
        g2,
        gt1,
        gt2,
        basis,
        defect,
        residuals,
    })
}

/// Residuals of the recurrences D T_i = F_i D + F_{7-i}* D T_7 that
/// characterize the fundamental operators uniquely.
pub fn verify_recurrence7(t: &CommutingTuple7, f: &FundamentalSet7) -> Result<Vec<f64>> {
    if f.basis.rank() == 0 {
        return Ok(vec![0.0; 6]);
    }
    let t7 = &t.t[6];
    let d = &f.defect;
    let mut out = Vec::with_capacity(6);
    for i in 0..6 {
        let lhs = d * &t.t[i];
        let rhs = &(&f.extended(i) * d) + &(&(&f.extended(5 - i).adjoint() * d) * t7);
        out.push(kernel::op_norm(&(&lhs - &rhs)));
    }
    Ok(out)
}

/// Residuals of the four 5-tuple recurrences D S_1 = G_1 D + G~_2* D S_3,
/// D S~_2 = G~_2 D + G_1* D S_3, D (S_2/2) = G_2 D + G~_1* D S_3 and
/// D (S~_1/2) = G~_1 D + G_2* D S_3.
pub fn verify_recurrence5(s: &CommutingTuple5, g: &FundamentalSet5) -> Result<Vec<f64>> {
    if g.basis.rank() == 0 {
        return Ok(vec![0.0; 4]);
    }
    let s3 = &s.s[2];
    let d = &g.defect;
    let ext = |x: &ComplexMatrix| g.basis.extend(x);
    let checks = [
        (d * &s.s[0], &g.g1, &g.gt2),
        (d * &s.stilde[1], &g.gt2, &g.g1),
        (d * &s.s[1].scale_re(0.5), &g.g2, &g.gt1),
        (d * &s.stilde[0].scale_re(0.5), &g.gt1, &g.g2),
    ];
    let mut out = Vec::with_capacity(4);
    for (lhs, a, b) in checks {
        let rhs = &(&ext(a) * d) + &(&(&ext(b).adjoint() * d) * s3);
        out.push(kernel::op_norm(&(&lhs - &rhs)));
    }
    Ok(out)
}

/// Max over a unimodular grid of the numerical radius of C0 + C1 z. The
/// supremum over the closed disc of the pencil's numerical radius is
/// attained on the circle, and the grid error is controlled by the
/// Lipschitz constant ||C1||.
pub fn pencil_numerical_radius(
    c0: &ComplexMatrix,
    c1: &ComplexMatrix,
    grid_z: usize,
    tol: f64,
) -> Result<f64> {
    c0.check_square()?;
    c1.check_square()?;
    c0.check_same_shape(c1)?;
    if grid_z == 0 {
        return Err(Error::InvalidArgument("z grid must be positive".into()));
    }
    let mut best: f64 = 0.0;
    for k in 0..grid_z {
        let z = Complex64::from_polar(1.0, k as f64 * std::f64::consts::TAU / grid_z as f64);
        let pencil = c0 + &c1.scale(z);
        best = best.max(numerical_radius(&pencil, tol)?);
    }
    Ok(best)
}

/// One named residual within a condition-family report.
#[derive(Debug, Clone)]
pub struct ConditionResidual {
    pub name: String,
    pub residual: f64,
}

/// Residual report for a family of operator identities.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub items: Vec<ConditionResidual>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ConditionReport {
    fn new(items: Vec<ConditionResidual>, tol: f64) -> Self {
        let max_residual = items.iter().map(|i| i.residual).fold(0.0, f64::max);
        Self {
            items,
            max_residual,
            tol,
            pass: max_residual <= tol,
        }
    }
}

/// The two condition families on a prospective fundamental family F_1..F_6:
/// [F_i, F_j] = 0 and [F_i*, F_{7-j}] = [F_j*, F_{7-i}].
pub fn commutativity_conditions7(f: &[ComplexMatrix], tol: f64) -> Result<ConditionReport> {
    if f.len() != 6 {
        return Err(Error::ShapeMismatch {
            expected: "6 matrices".into(),
            found: format!("{}", f.len()),
        });
    }
    let mut items = Vec::new();
    for i in 0..6 {
        for j in (i + 1)..6 {
            items.push(ConditionResidual {
                name: format!("[F{}, F{}] = 0", i + 1, j + 1),
                residual: kernel::op_norm(&f[i].commutator(&f[j])),
            });
        }
    }
    for i in 0..6 {
        for j in (i + 1)..6 {
            let lhs = &(&f[i].adjoint() * &f[5 - j]) - &(&f[5 - j] * &f[i].adjoint());
            let rhs = &(&f[j].adjoint() * &f[5 - i]) - &(&f[5 - i] * &f[j].adjoint());
            items.push(ConditionResidual {
                name: format!("[F{}*, F{}] = [F{}*, F{}]", i + 1, 6 - j, j + 1, 6 - i),
                residual: kernel::op_norm(&(&lhs - &rhs)),
            });
        }
    }
    Ok(ConditionReport::new(items, tol))
}

/// The 5-tuple condition families on (G_1, G_2, G~_1, G~_2): the six
/// vanishing commutators and the six pairwise-equal self-commutator
/// identities.
pub fn commutativity_conditions5(
    g1: &ComplexMatrix,
    g2: &ComplexMatrix,
    gt1: &ComplexMatrix,
    gt2: &ComplexMatrix,
    tol: f64,
) -> Result<ConditionReport> {
    let zero_pairs: [(&str, &ComplexMatrix, &ComplexMatrix); 6] = [
        ("[G1, G~1] = 0", g1, gt1),
        ("[G1, G~2] = 0", g1, gt2),
        ("[G2, G~1] = 0", g2, gt1),
        ("[G2, G~2] = 0", g2, gt2),
        ("[G1, G2] = 0", g1, g2),
        ("[G~1, G~2] = 0", gt1, gt2),
    ];
    let mut items = Vec::new();
    for (name, a, b) in zero_pairs {
        items.push(ConditionResidual {
            name: name.into(),
            residual: kernel::op_norm(&a.commutator(b)),
        });
    }
    let comm = |a: &ComplexMatrix, b: &ComplexMatrix| a.commutator(b);
    let equal_pairs: [(&str, ComplexMatrix, ComplexMatrix); 6] = [
        ("[G1, G1*] = [G~2, G~2*]", comm(g1, &g1.adjoint()), comm(gt2, &gt2.adjoint())),
        ("[G2, G2*] = [G~1, G~1*]", comm(g2, &g2.adjoint()), comm(gt1, &gt1.adjoint())),
        ("[G1, G~1*] = [G2, G~2*]", comm(g1, &gt1.adjoint()), comm(g2, &gt2.adjoint())),
        ("[G~1, G1*] = [G~2, G2*]", comm(gt1, &g1.adjoint()), comm(gt2, &g2.adjoint())),
        ("[G1, G2*] = [G~1, G~2*]", comm(g1, &g2.adjoint()), comm(gt1, &gt2.adjoint())),
        ("[G1*, G2] = [G~1*, G~2]", comm(&g1.adjoint(), g2), comm(&gt1.adjoint(), gt2)),
    ];
    for (name, lhs, rhs) in equal_pairs {
        items.push(ConditionResidual {
            name: name.into(),
            residual: kernel::op_norm(&(&lhs - &rhs)),
        });
    }
    Ok(ConditionReport::new(items, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::SplitMix64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_tuple7(values: [Complex64; 7]) -> CommutingTuple7 {
        CommutingTuple7::new(values.iter().map(|&v| ComplexMatrix::scalar(v)).collect()).unwrap()
    }

    #[test]
    fn scalar_solve_matches_closed_form() {
        let t = [
            c(0.31, 0.11),
            c(-0.22, 0.05),
            c(0.14, -0.40),
            c(0.05, 0.21),
            c(-0.33, -0.08),
            c(0.27, 0.19),
            c(0.5, 0.0),
        ];
        let tuple = scalar_tuple7(t);
        let set = solve_fundamental7(&tuple, 1e-10).unwrap();
        assert_eq!(set.basis.rank(), 1);
        for i in 0..6 {
            let want = (t[i] - t[5 - i].conj() * t[6]) / 0.75;
            let got = set.f[i][(0, 0)];
            assert!((got - want).norm() < 1e-12, "F{} {got} vs {want}", i + 1);
            assert!(set.residuals[i] < 1e-12);
        }
        // recurrence residuals vanish for the exact solution
        let rec = verify_recurrence7(&tuple, &set).unwrap();
        assert!(rec.iter().all(|&r| r < 1e-12), "{rec:?}");
    }

    #[test]
    fn perturbed_fundamental_detected_by_recurrence() {
        let t = [
            c(0.31, 0.11),
            c(-0.22, 0.05),
            c(0.14, -0.40),
            c(0.05, 0.21),
            c(-0.33, -0.08),
            c(0.27, 0.19),
            c(0.5, 0.0),
        ];
        let tuple = scalar_tuple7(t);
        let mut set = solve_fundamental7(&tuple, 1e-10).unwrap();
        set.f[0] = &set.f[0] + &ComplexMatrix::scalar(c(0.1, 0.0));
        let rec = verify_recurrence7(&tuple, &set).unwrap();
        let dnorm = kernel::op_norm(&set.defect);
        assert!(
            rec[0] >= 0.09 * dnorm * dnorm,
            "perturbation too small: {} vs {}",
            rec[0],
            0.09 * dnorm * dnorm
        );
    }

    #[test]
    fn isometry_input_has_rank_zero_defect() {
        // T_i = T_{7-i}* T_7 with T_7 unitary: all residuals vanish at rank 0
        let mut rng = SplitMix64::new(3);
        let phases: Vec<Complex64> = (0..3).map(|_| rng.next_phase()).collect();
        let t7 = ComplexMatrix::diagonal(&phases);
        // pick commuting diagonal T_i satisfying the relations: T_{7-i} = conj(T_i) T_7
        let pair = |a: &ComplexMatrix| -> ComplexMatrix { &a.conj_entries() * &t7 };
        let t3 = ComplexMatrix::diagonal(&(0..3).map(|_| rng.next_complex()).collect::<Vec<_>>());
        let t4 = pair(&t3);
        let t1 = ComplexMatrix::diagonal(&(0..3).map(|_| rng.next_complex()).collect::<Vec<_>>());
        let t6 = pair(&t1);
        let t2 = ComplexMatrix::diagonal(&(0..3).map(|_| rng.next_complex()).collect::<Vec<_>>());
        let t5 = pair(&t2);
        let tuple =
            CommutingTuple7::new(vec![t1, t2, t3.clone(), t4.clone(), t5, t6, t7.clone()]).unwrap();
        // check the relations hold: T_i - T_{7-i}* T_7 = 0
        let set = solve_fundamental7(&tuple, 1e-10).unwrap();
        assert_eq!(set.basis.rank(), 0);
        assert!(set.max_residual() < 1e-12, "{:?}", set.residuals);
        assert!(verify_recurrence7(&tuple, &set).unwrap().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn scalar_solve5_matches_closed_form() {
        let s1 = c(0.21, 0.33);
        let s2 = c(-0.44, 0.12);
        let s3 = c(0.5, 0.0);
        let st1 = c(0.15, -0.62);
        let st2 = c(0.37, 0.05);
        let tuple = CommutingTuple5::new(
            vec![
                ComplexMatrix::scalar(s1),
                ComplexMatrix::scalar(s2),
                ComplexMatrix::scalar(s3),
            ],
            vec![ComplexMatrix::scalar(st1), ComplexMatrix::scalar(st2)],
        )
        .unwrap();
        let set = solve_fundamental5(&tuple, 1e-10).unwrap();
        let want_g1 = (s1 - st2.conj() * s3) / 0.75;
        let want_gt2 = (st2 - s1.conj() * s3) / 0.75;
        let want_g2 = (0.5 * s2 - 0.5 * st1.conj() * s3) / 0.75;
        let want_gt1 = (0.5 * st1 - 0.5 * s2.conj() * s3) / 0.75;
        assert!((set.g1[(0, 0)] - want_g1).norm() < 1e-12);
        assert!((set.gt2[(0, 0)] - want_gt2).norm() < 1e-12);
        assert!((set.g2[(0, 0)] - want_g2).norm() < 1e-12);
        assert!((set.gt1[(0, 0)] - want_gt1).norm() < 1e-12);
        assert!(set.max_residual() < 1e-12);
        let rec = verify_recurrence5(&tuple, &set).unwrap();
        assert!(rec.iter().all(|&r| r < 1e-12), "{rec:?}");
    }

    #[test]
    fn norm_gates_enforced_for_5_tuple() {
        let tuple = CommutingTuple5::new(
            vec![
                ComplexMatrix::scalar(c(1.5, 0.0)), // ||S1|| > 1
                ComplexMatrix::scalar(c(0.0, 0.0)),
                ComplexMatrix::scalar(c(0.5, 0.0)),
            ],
            vec![
                ComplexMatrix::scalar(c(0.0, 0.0)),
                ComplexMatrix::scalar(c(0.0, 0.0)),
            ],
        )
        .unwrap();
        assert!(solve_fundamental5(&tuple, 1e-8).is_err());
    }

    #[test]
    fn dual_solver_agreement_on_defect_space() {
        // independent route: vectorized normal equations for min ||D X D - R||
        let mut rng = SplitMix64::new(41);
        let raw = ComplexMatrix::from_fn(3, 3, |_, _| rng.next_complex());
        let t7 = raw.scale_re(0.7 / kernel::op_norm(&raw));
        let mut mats: Vec<ComplexMatrix> = (0..6)
            .map(|_| {
                let m = ComplexMatrix::from_fn(3, 3, |_, _| rng.next_complex());
                m.scale_re(0.4 / kernel::op_norm(&m))
            })
            .collect();
        mats.push(t7.clone());
        // tuple need not commute for the solver itself; build directly
        let tuple = CommutingTuple7 {
            t: mats,
            commutation_residual: 0.0,
        };
        let set = solve_fundamental7(&tuple, 1e-10).unwrap();
        let r = set.basis.rank();
        assert!(r > 0);
        // normal equations in the defect basis: (L ⊗ L) vec(X) = vec(B* R B)
        // with L = B* D B Hermitian; solve via eigendecomposition of L
        let l = set.basis.compress(&set.defect);
        let (lv, lu) = kernel::hermitian_eig(&l);
        for i in 0..6 {
            let rhs = &tuple.t[i] - &(&tuple.t[5 - i].adjoint() * &t7);
            let b = set.basis.compress(&rhs);
            // X = U diag-solve U* with X_{pq} = (U* B U)_{pq} / (l_p l_q)
            let bu = &(&lu.adjoint() * &b) * &lu;
            let x = ComplexMatrix::from_fn(r, r, |p, q| {
                let denom = lv[p] * lv[q];
                if denom > 1e-12 {
                    bu[(p, q)] / denom
                } else {
                    c(0.0, 0.0)
                }
            });
            let x = &(&lu * &x) * &lu.adjoint();
            assert!(
                (&x - &set.f[i]).max_abs() < 1e-8,
                "routes disagree on F{}",
                i + 1
            );
        }
    }

    #[test]
    fn pencil_radius_examples() {
        let c0 = ComplexMatrix::scalar(c(0.3, 0.4));
        let zero = ComplexMatrix::zeros(1, 1);
        let w0 = pencil_numerical_radius(&c0, &zero, 16, 1e-8).unwrap();
        assert!((w0 - 0.5).abs() < 1e-7);

        let id = ComplexMatrix::identity(2);
        let z2 = ComplexMatrix::zeros(2, 2);
        let w = pencil_numerical_radius(&z2, &id, 8, 1e-8).unwrap();
        assert!((w - 1.0).abs() < 1e-7);

        let half = ComplexMatrix::scalar(c(0.5, 0.0));
        let w = pencil_numerical_radius(&half, &half, 32, 1e-8).unwrap();
        assert!((w - 1.0).abs() < 1e-6, "w = {w}");
    }

    #[test]
    fn commutativity_condition_families() {
        // diagonal family: both families vanish identically
        let mut rng = SplitMix64::new(19);
        let diag: Vec<ComplexMatrix> = (0..6)
            .map(|_| {
                ComplexMatrix::diagonal(&(0..3).map(|_| rng.next_complex()).collect::<Vec<_>>())
            })
            .collect();
        let rep = commutativity_conditions7(&diag, 1e-12).unwrap();
        assert!(rep.pass, "diagonal family fails: {:?}", rep.max_residual);

        // polynomials in one Hermitian matrix: first family zero, second
        // family residual reported (not asserted zero)
        let h = ComplexMatrix::from_fn(3, 3, |_, _| rng.next_complex()).hermitian_part();
        let fam: Vec<ComplexMatrix> = (0..6)
            .map(|k| {
                let mut acc = ComplexMatrix::identity(3).scale_re(0.1 * k as f64);
                acc = &acc + &h.scale_re(0.2 + 0.1 * k as f64);
                acc = &acc + &(&h * &h).scale_re(0.05 * (k + 1) as f64);
                acc
            })
            .collect();
        let rep = commutativity_conditions7(&fam, 1e-10).unwrap();
        let first_family_max = rep
            .items
            .iter()
            .filter(|i| i.name.ends_with("= 0"))
            .map(|i| i.residual)
            .fold(0.0f64, f64::max);
        assert!(first_family_max < 1e-10, "Hermitian calculus must commute");

        // generic non-commuting pair fails
        let mut bad = diag.clone();
        bad[0] = ComplexMatrix::from_fn(3, 3, |_, _| rng.next_complex());
        let rep = commutativity_conditions7(&bad, 1e-10).unwrap();
        assert!(!rep.pass);

        // 5-family: scalars pass, perturbation fails
        let g1 = ComplexMatrix::scalar(c(0.3, 0.1));
        let g2 = ComplexMatrix::scalar(c(-0.2, 0.4));
        let gt1 = ComplexMatrix::scalar(c(0.1, -0.3));
        let gt2 = ComplexMatrix::scalar(c(0.5, 0.2));
        let rep = commutativity_conditions5(&g1, &g2, &gt1, &gt2, 1e-12).unwrap();
        assert!(rep.pass);
        let m1 = ComplexMatrix::from_fn(2, 2, |r, cc| c((r + cc) as f64, 0.0));
        let m2 = ComplexMatrix::from_fn(2, 2, |r, cc| c(r as f64 - cc as f64, 1.0));
        let i2 = ComplexMatrix::identity(2);
        let rep = commutativity_conditions5(&m1, &m2, &i2, &i2, 1e-10).unwrap();
        assert!(!rep.pass);
    }
}
