//! The converse construction: from a pure last coordinate and an admissible
//! symbol family on its adjoint defect space, build the commuting tuple
//! whose fundamental operators recover the symbols; and the circulant
//! boundary unitaries obtained by sampling the pencils at roots of unity.

use num_complex::Complex64;

use super::{gamma_isometry_check5, gamma_isometry_check7};
use crate::error::{Error, Result};
use crate::fundamental::{
    commutativity_conditions5, commutativity_conditions7, pencil_numerical_radius,
    solve_fundamental5, solve_fundamental7, CommutingTuple5, CommutingTuple7, FundamentalSet5,
    FundamentalSet7,
};
use crate::hardy::{build_w, pencil_operator, AnalyticPencil, TruncatedHardySpace};
use crate::kernel::{self, defect_pair, ComplexMatrix};
use crate::report::CheckSet;

/// Result of the 7-family converse construction.
#[derive(Debug, Clone)]
pub struct AdmissibleConstruction7 {
    pub tuple: CommutingTuple7,
    /// Fundamental set re-solved from the constructed tuple (on the defect
    /// space of T_7).
    pub recovered: FundamentalSet7,
    pub checks: CheckSet,
}

/// Result of the 5-family converse construction.
#[derive(Debug, Clone)]
pub struct AdmissibleConstruction5 {
    pub tuple: CommutingTuple5,
    pub recovered: FundamentalSet5,
    pub checks: CheckSet,
}

fn tail_tolerance(t7: &ComplexMatrix, levels: usize, tol: f64) -> f64 {
    let tail = kernel::op_norm(&t7.pow(levels as u64));
    tol.max(20.0 * tail)
}

/// Build T_i = W* M(F~_i* + F~_{7-i} z) W on the state space of a pure T_7,
/// then verify: hypothesis gates (commutativity families, pencil numerical
/// radii), commutation of the constructed tuple, the adjoint-side
/// fundamental identities T_i* - T_{7-i} T_7* = D* F~_i D*, and (optionally)
/// that the re-solved fundamental set matches a supplied partner family.
pub fn admissible_construct7(
    t7: &ComplexMatrix,
    ftilde: &[ComplexMatrix],
    levels: usize,
    tol: f64,
    partner: Option<&[ComplexMatrix]>,
) -> Result<AdmissibleConstruction7> {
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
    let (d_star, codomain) = defect_pair(&t7.adjoint(), None)?;
    let r = codomain.rank();
    for f in ftilde {
        if f.rows() != r || f.cols() != r {
            return Err(Error::ShapeMismatch {
                expected: format!("{r}x{r} symbols on the adjoint defect fiber"),
                found: format!("{}x{}", f.rows(), f.cols()),
            });
        }
    }
    let mut checks = CheckSet::new();
    let hyp = commutativity_conditions7(ftilde, tol)?;
    checks.add(
        "symbol commutativity",
        "[F~_i, F~_j] = 0 and [F~_i*, F~_{7-j}] = [F~_j*, F~_{7-i}]",
        hyp.max_residual,
        tol,
    );
    for i in 0..6 {
        let w = pencil_numerical_radius(&ftilde[i].adjoint(), &ftilde[5 - i], 32, 1e-6)?;
        checks.add(
            format!("pencil radius {}", i + 1),
            format!("w(F~_{0}* + F~_{1} z) <= 1", i + 1, 6 - i),
            (w - 1.0).max(0.0),
            tol.max(1e-6),
        );
    }

    let w = build_w(t7, levels)?;
    let sp = TruncatedHardySpace::new(levels, r);
    let mut mats = Vec::with_capacity(7);
    for i in 0..6 {
        let pencil = AnalyticPencil::new(ftilde[i].adjoint(), ftilde[5 - i].clone())?;
        let op = pencil_operator(&pencil, sp)?;
        mats.push(&(&w.adjoint() * &op) * &w);
    }
    mats.push(t7.clone());
    let tuple = CommutingTuple7::new(mats)?;
    let eff = tail_tolerance(t7, levels, tol);
    checks.add(
        "commutation",
        "T_i T_j = T_j T_i",
        tuple.commutation_residual,
        eff,
    );
    for i in 0..6 {
        let lhs = &tuple.t[i].adjoint() - &(&tuple.t[5 - i] * &t7.adjoint());
        let rhs = &(&d_star * &codomain.extend(&ftilde[i])) * &d_star;
        checks.add(
            format!("adjoint fundamental {}", i + 1),
            format!("T_{0}* - T_{1} T_7* = D* F~_{0} D*", i + 1, 6 - i),
            kernel::op_norm(&(&lhs - &rhs)),
            eff,
        );
    }
    let recovered = solve_fundamental7(&tuple, tol)?;
    if let Some(expected) = partner {
        if expected.len() != 6 {
            return Err(Error::ShapeMismatch {
                expected: "6 partner symbols".into(),
                found: format!("{}", expected.len()),
            });
        }
        for i in 0..6 {
            let diff = if recovered.basis.rank() == 0 {
                kernel::op_norm(&expected[i])
            } else {
                kernel::op_norm(&(&recovered.f[i] - &expected[i]))
            };
            checks.add(
                format!("partner recovery {}", i + 1),
                format!("solved F_{} matches the intertwined partner", i + 1),
                diff,
                eff.max(1e-6),
            );
        }
    }
    Ok(AdmissibleConstruction7 {
        tuple,
        recovered,
        checks,
    })
}

/// The 5-family converse construction with the five-symbol pencils over the
/// adjoint defect fiber of a pure S_3.
pub fn admissible_construct5(
    s3: &ComplexMatrix,
    ghat: (&ComplexMatrix, &ComplexMatrix, &ComplexMatrix, &ComplexMatrix),
    levels: usize,
    tol: f64,
    partner: Option<(&ComplexMatrix, &ComplexMatrix, &ComplexMatrix, &ComplexMatrix)>,
) -> Result<AdmissibleConstruction5> {
    let rho = kernel::spectral_radius(s3)?;
    if rho >= 1.0 - 1e-9 {
        return Err(Error::NotPure {
            spectral_radius: rho,
        });
    }
    let (gh1, gh2, ght1, ght2) = ghat;
    let (d_star, codomain) = defect_pair(&s3.adjoint(), None)?;
    let r = codomain.rank();
    for m in [gh1, gh2, ght1, ght2] {
        if m.rows() != r || m.cols() != r {
            return Err(Error::ShapeMismatch {
                expected: format!("{r}x{r} symbols on the adjoint defect fiber"),
                found: format!("{}x{}", m.rows(), m.cols()),
            });
        }
    }
    let mut checks = CheckSet::new();
    let hyp = commutativity_conditions5(gh1, gh2, ght1, ght2, tol)?;
    checks.add(
        "symbol commutativity",
        "vanishing and pairwise-equal commutator families",
        hyp.max_residual,
        tol,
    );
    for (name, c0, c1) in [
        ("w(G^_1* + G~^_2 z)", gh1, ght2),
        ("w(G^_2* + G~^_1 z)", gh2, ght1),
    ] {
        let w = pencil_numerical_radius(&c0.adjoint(), c1, 32, 1e-6)?;
        checks.add(
            format!("pencil radius {name}"),
            format!("{name} <= 1"),
            (w - 1.0).max(0.0),
            tol.max(1e-6),
        );
    }

    let w = build_w(s3, levels)?;
    let sp = TruncatedHardySpace::new(levels, r);
    let compress = |c0: ComplexMatrix, c1: ComplexMatrix| -> Result<ComplexMatrix> {
        let op = pencil_operator(&AnalyticPencil::new(c0, c1)?, sp)?;
        Ok(&(&w.adjoint() * &op) * &w)
    };
    let s1 = compress(gh1.adjoint(), ght2.clone())?;
    let s2 = compress(gh2.adjoint().scale_re(2.0), ght1.scale_re(2.0))?;
    let st1 = compress(ght1.adjoint().scale_re(2.0), gh2.scale_re(2.0))?;
    let st2 = compress(ght2.adjoint(), gh1.clone())?;
    let tuple = CommutingTuple5::new(vec![s1, s2, s3.clone()], vec![st1, st2])?;
    let eff = tail_tolerance(s3, levels, tol);
    checks.add(
        "commutation",
        "pairwise commuting including S_i S~_j = S~_j S_i",
        tuple.commutation_residual,
        eff,
    );
    let ext = |x: &ComplexMatrix| &(&d_star * &codomain.extend(x)) * &d_star;
    let identities = [
        ("S_1* - S~_2 S_3* = D* G^_1 D*", &tuple.s[0].adjoint() - &(&tuple.stilde[1] * &s3.adjoint()), ext(gh1)),
        ("S~_2* - S_1 S_3* = D* G~^_2 D*", &tuple.stilde[1].adjoint() - &(&tuple.s[0] * &s3.adjoint()), ext(ght2)),
        (
            "S_2*/2 - (S~_1/2) S_3* = D* G^_2 D*",
            &tuple.s[1].adjoint().scale_re(0.5) - &(&tuple.stilde[0].scale_re(0.5) * &s3.adjoint()),
            ext(gh2),
        ),
        (
            "S~_1*/2 - (S_2/2) S_3* = D* G~^_1 D*",
            &tuple.stilde[0].adjoint().scale_re(0.5) - &(&tuple.s[1].scale_re(0.5) * &s3.adjoint()),
            ext(ght1),
        ),
    ];
    for (law, lhs, rhs) in identities {
        checks.add(
            "adjoint fundamental",
            law,
            kernel::op_norm(&(&lhs - &rhs)),
            eff,
        );
    }
    let recovered = solve_fundamental5(&tuple, tol)?;
    if let Some((p1, p2, pt1, pt2)) = partner {
        let pairs = [
            ("G_1", &recovered.g1, p1),
            ("G_2", &recovered.g2, p2),
            ("G~_1", &recovered.gt1, pt1),
            ("G~_2", &recovered.gt2, pt2),
        ];
        for (name, got, want) in pairs {
            checks.add(
                format!("partner recovery {name}"),
                format!("solved {name} matches the intertwined partner"),
                (&(*got).clone() - want).max_abs(),
                eff.max(1e-6),
            );
        }
    }
    Ok(AdmissibleConstruction5 {
        tuple,
        recovered,
        checks,
    })
}

/// Circulant boundary unitary of the 7-family: a direct sum over the M-th
/// roots of unity of the sampled pencils, with the last coordinate exactly
/// unitary. Requires the pencil norm conditions on the sampled grid.
pub fn circulant_gamma_unitary7(
    ftilde: &[ComplexMatrix],
    modes: usize,
) -> Result<(CommutingTuple7, CheckSet)> {
    if ftilde.len() != 6 {
        return Err(Error::ShapeMismatch {
            expected: "6 symbols".into(),
            found: format!("{}", ftilde.len()),
        });
    }
    if modes == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    let d = ftilde[0].rows();
    let omegas: Vec<Complex64> = (0..modes)
        .map(|k| Complex64::from_polar(1.0, k as f64 * std::f64::consts::TAU / modes as f64))
        .collect();
    // norm gates per sampled frequency
    for i in 0..6 {
        for &om in &omegas {
            let fiber = &ftilde[i].adjoint() + &ftilde[5 - i].scale(om);
            let norm = kernel::op_norm(&fiber);
            if norm > 1.0 + 1e-12 {
                return Err(Error::PencilNormViolation { index: i + 1, norm });
            }
        }
    }
    let mut mats = Vec::with_capacity(7);
    for i in 0..6 {
        let blocks: Vec<ComplexMatrix> = omegas
            .iter()
            .map(|&om| &ftilde[i].adjoint() + &ftilde[5 - i].scale(om))
            .collect();
        mats.push(block_diag(&blocks));
    }
    let shift_blocks: Vec<ComplexMatrix> = omegas
        .iter()
        .map(|&om| ComplexMatrix::identity(d).scale(om))
        .collect();
    mats.push(block_diag(&shift_blocks));
    let tuple = CommutingTuple7::new(mats)?;
    let mut checks = gamma_isometry_check7(&tuple, 1e-12, 0);
    // normality of each sampled fiber, reported per frequency
    for i in 0..6 {
        for (k, &om) in omegas.iter().enumerate() {
            let fiber = &ftilde[i].adjoint() + &ftilde[5 - i].scale(om);
            checks.add(
                format!("fiber normality ({}, mode {k})", i + 1),
                "sampled pencil commutes with its adjoint",
                kernel::op_norm(&fiber.commutator(&fiber.adjoint())),
                1e-10,
            );
        }
    }
    Ok((tuple, checks))
}

/// Circulant boundary unitary of the 5-family from the five-symbol pencils.
pub fn circulant_gamma_unitary5(
    g: (&ComplexMatrix, &ComplexMatrix, &ComplexMatrix, &ComplexMatrix),
    modes: usize,
) -> Result<(CommutingTuple5, CheckSet)> {
    if modes == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    let (g1, g2, gt1, gt2) = g;
    let d = g1.rows();
    let omegas: Vec<Complex64> = (0..modes)
        .map(|k| Complex64::from_polar(1.0, k as f64 * std::f64::consts::TAU / modes as f64))
        .collect();
    let sample = |c0: &ComplexMatrix, c1: &ComplexMatrix, om: Complex64| -> ComplexMatrix {
        &c0.adjoint() + &c1.scale(om)
    };
    for (idx, (c0, c1, cap)) in [(g1, gt2, 1.0), (g2, gt1, 1.0)].iter().enumerate() {
        for &om in &omegas {
            let norm = kernel::op_norm(&sample(c0, c1, om));
            if norm > cap + 1e-12 {
                return Err(Error::PencilNormViolation {
                    index: idx + 1,
                    norm,
                });
            }
        }
    }
    let build = |c0: &ComplexMatrix, c1: &ComplexMatrix, scale: f64| -> ComplexMatrix {
        let blocks: Vec<ComplexMatrix> = omegas
            .iter()
            .map(|&om| sample(c0, c1, om).scale_re(scale))
            .collect();
        block_diag(&blocks)
    };
    let s1 = build(g1, gt2, 1.0);
    let s2 = build(g2, gt1, 2.0);
    let s3 = block_diag(
        &omegas
            .iter()
            .map(|&om| ComplexMatrix::identity(d).scale(om))
            .collect::<Vec<_>>(),
    );
    let st1 = build(gt1, g2, 2.0);
    let st2 = build(gt2, g1, 1.0);
    let tuple = CommutingTuple5::new(vec![s1, s2, s3], vec![st1, st2])?;
    let checks = gamma_isometry_check5(&tuple, 1e-12, 0);
    Ok((tuple, checks))
}

fn block_diag(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let mut acc = blocks[0].clone();
    for b in &blocks[1..] {
        acc = acc.direct_sum(b);
    }
    acc
}
