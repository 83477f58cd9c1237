//! Canonical boundary unitaries from the asymptotic limit operator Q, the
//! Douglas embedding built on top of them, and the unitary-equivalence
//! invariance test on joint spectra.

use num_complex::Complex64;

use super::{gamma_unitary_check5, gamma_unitary_check7};
use crate::error::Result;
use crate::fundamental::{
    solve_fundamental5, solve_fundamental7, verify_recurrence5, verify_recurrence7,
    CommutingTuple5, CommutingTuple7, FundamentalSet7,
};
use crate::hardy::build_w;
use crate::kernel::{self, joint_diagonalize, sot_limit_q, ComplexMatrix};
use crate::mu::{k1_set_check, k_set_check, GammaPoint, GammaVariant};
use crate::report::{Check, CheckSet};

/// The boundary unitary extracted from a contraction tuple on the range of
/// the asymptotic limit Q = (lim T^n T*^n)^{1/2}. In finite dimensions Q is
/// the orthogonal projection onto the unitary part, the compressed isometry
/// is already unitary, and no further dilation step is needed.
#[derive(Debug, Clone)]
pub struct CanonicalUnitary {
    /// Orthonormal basis of Ran Q (ambient x rank).
    pub basis: ComplexMatrix,
    /// The unitary tuple on Ran Q, in tuple order; empty when rank is zero.
    pub ops: Vec<ComplexMatrix>,
    pub rank: usize,
    /// Joint eigenvalue tuples of the unitary family.
    pub joint_spectrum: Vec<Vec<Complex64>>,
    pub checks: CheckSet,
}

fn limit_projection_basis(t_last: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let q = sot_limit_q(t_last, 1e-13, 64)?;
    let (vals, vecs) = kernel::hermitian_eig(&q);
    // the limit of T^n T*^n is the projection onto the unitary summand, so
    // its eigenvalues cluster at 0 and 1
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
    Ok((q, vecs.select_columns(&keep)))
}

/// Compress the adjoint action through Q: the operator X on Ran Q with
/// X (Q h) = Q T* h, computed via the pseudoinverse of B* Q.
fn compress_through_q(
    q: &ComplexMatrix,
    basis: &ComplexMatrix,
    t: &ComplexMatrix,
) -> ComplexMatrix {
    // X (B* Q) = B* Q T*  =>  X = B* Q T* Q B (B* Q^2 B)^{-1}
    let bq = &basis.adjoint() * q; // r x n
    let rhs = &(&bq * &t.adjoint()) * &(q * basis); // r x r
    let gram = &bq * &(q * basis); // r x r Hermitian pd
    let (vals, vecs) = kernel::hermitian_eig(&gram);
    let inv: Vec<Complex64> = vals
        .iter()
        .map(|&v| {
            if v > 1e-12 {
                Complex64::new(1.0 / v, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let ginv = &(&vecs * &ComplexMatrix::diagonal(&inv)) * &vecs.adjoint();
    let x = &rhs * &ginv;
    x.adjoint() // return N itself, not N*
}

/// Canonical boundary unitary of a 7-tuple: Q-range basis, the compressed
/// tuple, the unitary/normality/pairing residuals and the joint-spectrum
/// boundary membership. A rank-zero Q (strictly stable last coordinate)
/// yields a valid empty unitary.
pub fn canonical_unitary7(t: &CommutingTuple7, tol: f64) -> Result<CanonicalUnitary> {
    let (q, basis) = limit_projection_basis(&t.t[6])?;
    let rank = basis.cols();
    let mut checks = CheckSet::new();
    if rank == 0 {
        checks.push(Check::flag(
            "rank",
            "strictly stable last coordinate: empty unitary part",
            true,
        ));
        return Ok(CanonicalUnitary {
            basis,
            ops: vec![],
            rank,
            joint_spectrum: vec![],
            checks,
        });
    }
    let ops: Vec<ComplexMatrix> = t
        .t
        .iter()
        .map(|m| compress_through_q(&q, &basis, m))
        .collect();
    let tuple = CommutingTuple7::new(ops.clone())?;
    checks.extend(gamma_unitary_check7(&tuple, tol));
    for i in 0..6 {
        let diff = &(&ops[6].adjoint() * &ops[i]) - &ops[5 - i].adjoint();
        checks.add(
            format!("adjoint pairing N_{}", i + 1),
            format!("N_7* N_{} = N_{}*", i + 1, 6 - i),
            kernel::op_norm(&diff),
            tol,
        );
    }
    let jd = joint_diagonalize(&ops, tol.max(1e-10))?;
    checks.add(
        "joint diagonalization",
        "common unitary frame off-diagonal residual",
        jd.off_diag_residual,
        10.0 * tol.max(1e-10) * 4.0,
    );
    let joint = jd.joint_tuples();
    for (k, coords) in joint.iter().enumerate() {
        let p = GammaPoint {
            variant: GammaVariant::E3311,
            coords: coords.clone(),
            witness: None,
        };
        let rep = k_set_check(&p, tol)?;
        for cond in rep.conditions {
            checks.add(
                format!("spectrum point {k}: {}", cond.name),
                "boundary-set identity on the joint spectrum",
                cond.residual,
                tol,
            );
        }
    }
    Ok(CanonicalUnitary {
        basis,
        ops,
        rank,
        joint_spectrum: joint,
        checks,
    })
}

/// Canonical boundary unitary of a 5-tuple, with the K_1 identities on the
/// joint spectrum.
pub fn canonical_unitary5(s: &CommutingTuple5, tol: f64) -> Result<CanonicalUnitary> {
    let (q, basis) = limit_projection_basis(&s.s[2])?;
    let rank = basis.cols();
    let mut checks = CheckSet::new();
    if rank == 0 {
        checks.push(Check::flag(
            "rank",
            "strictly stable last coordinate: empty unitary part",
            true,
        ));
        return Ok(CanonicalUnitary {
            basis,
            ops: vec![],
            rank,
            joint_spectrum: vec![],
            checks,
        });
    }
    let all: Vec<ComplexMatrix> = s
        .s
        .iter()
        .chain(s.stilde.iter())
        .map(|m| compress_through_q(&q, &basis, m))
        .collect();
    let tuple = CommutingTuple5::new(all[..3].to_vec(), all[3..].to_vec())?;
    checks.extend(gamma_unitary_check5(&tuple, tol));
    let jd = joint_diagonalize(&all, tol.max(1e-10))?;
    checks.add(
        "joint diagonalization",
        "common unitary frame off-diagonal residual",
        jd.off_diag_residual,
        10.0 * tol.max(1e-10) * 4.0,
    );
    let joint = jd.joint_tuples();
    for (k, coords) in joint.iter().enumerate() {
        let p = GammaPoint {
            variant: GammaVariant::E3212,
            coords: coords.clone(),
            witness: None,
        };
        let rep = k1_set_check(&p, tol)?;
        for cond in rep.conditions {
            checks.add(
                format!("spectrum point {k}: {}", cond.name),
                "boundary-set identity on the joint spectrum",
                cond.residual,
                tol,
            );
        }
    }
    Ok(CanonicalUnitary {
        basis,
        ops: all,
        rank,
        joint_spectrum: joint,
        checks,
    })
}

/// Compare the canonical joint spectra of a tuple and its conjugation by a
/// unitary, as multisets within `tol`. Returns the verdict and the worst
/// matched distance.
pub fn unitary_equivalence_invariance(
    t: &CommutingTuple7,
    u: &ComplexMatrix,
    tol: f64,
) -> Result<(bool, f64)> {
    let a = canonical_unitary7(t, tol)?;
    let b = canonical_unitary7(&t.conjugate(u)?, tol)?;
    Ok(match_multisets(&a.joint_spectrum, &b.joint_spectrum, tol))
}

/// Greedy nearest matching of joint-eigenvalue multisets. Distance between
/// tuples is the max coordinate modulus difference.
pub(crate) fn match_multisets(
    a: &[Vec<Complex64>],
    b: &[Vec<Complex64>],
    tol: f64,
) -> (bool, f64) {
    if a.len() != b.len() {
        return (false, f64::INFINITY);
    }
    let dist = |x: &[Complex64], y: &[Complex64]| -> f64 {
        x.iter()
            .zip(y.iter())
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max)
    };
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        for (j, y) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = dist(x, y);
            if d < best {
                best = d;
                best_j = j;
            }
        }
        if best_j == usize::MAX {
            return (false, f64::INFINITY);
        }
        used[best_j] = true;
        worst = worst.max(best);
    }
    (worst <= tol, worst)
}

/// The Douglas embedding of a 7-tuple: the observability-style row stacked
/// over Q, with the intertwining and recurrence residuals that certify it.
#[derive(Debug, Clone)]
pub struct DouglasEmbedding {
    /// The Hardy-space half of the embedding (N levels over the defect
    /// space of T_7*).
    pub o_row: ComplexMatrix,
    /// The asymptotic limit operator Q.
    pub q: ComplexMatrix,
    /// Stacked embedding [O; Q].
    pub pi: ComplexMatrix,
    /// ||Pi* Pi - I|| = the tail the truncated row fails to capture.
    pub isometry_residual: f64,
    /// Residuals of D T_i* = F~_i D + F~_{7-i}* D T_7* on the adjoint defect.
    pub recurrence_residuals: Vec<f64>,
    /// Residuals of Q T_i* = N_i* Q against the canonical unitary.
    pub q_intertwine_residuals: Vec<f64>,
    pub canonical: CanonicalUnitary,
}

/// Assemble the Douglas embedding and verify its defining identities.
pub fn douglas_embedding(t: &CommutingTuple7, levels: usize, tol: f64) -> Result<DouglasEmbedding> {
    let t7 = &t.t[6];
    let o_row = build_w(t7, levels)?;
    let q = sot_limit_q(t7, 1e-13, 64)?;
    let pi = ComplexMatrix::from_blocks(&[vec![o_row.clone()], vec![q.clone()]]);
    let n = t.dim();
    let isometry_residual = kernel::op_norm(&(&(&pi.adjoint() * &pi) - &ComplexMatrix::identity(n)));
    // adjoint-side fundamental recurrences on the defect of T_7*
    let adj = t.adjoint();
    let ftilde = solve_fundamental7(&adj, tol)?;
    let recurrence_residuals = verify_recurrence7(&adj, &ftilde)?;
    // Q-side intertwining against the canonical unitary
    let canonical = canonical_unitary7(t, tol)?;
    let q_intertwine_residuals: Vec<f64> = if canonical.rank == 0 {
        t.t.iter().map(|m| kernel::op_norm(&(&q * &m.adjoint()))).collect()
    } else {
        t.t.iter()
            .enumerate()
            .map(|(i, m)| {
                let lhs = &q * &m.adjoint();
                let n_ext = &(&canonical.basis * &canonical.ops[i].adjoint()) * &canonical.basis.adjoint();
                let rhs = &n_ext * &q;
                kernel::op_norm(&(&lhs - &rhs))
            })
            .collect()
    };
    Ok(DouglasEmbedding {
        o_row,
        q,
        pi,
        isometry_residual,
        recurrence_residuals,
        q_intertwine_residuals,
        canonical,
    })
}

/// Residuals of T_i* - T_{7-i} T_7* = D_{T_7*} F~_i D_{T_7*} for a
/// fundamental set solved on the adjoint tuple: the recovery identities the
/// Douglas row is built from.
pub fn fundamental_recovery_check(t: &CommutingTuple7, ftilde: &FundamentalSet7) -> Vec<f64> {
    let t7 = &t.t[6];
    (0..6)
        .map(|i| {
            let lhs = &t.t[i].adjoint() - &(&t.t[5 - i] * &t7.adjoint());
            let rhs = if ftilde.basis.rank() == 0 {
                ComplexMatrix::zeros(t.dim(), t.dim())
            } else {
                &(&ftilde.defect * &ftilde.extended(i)) * &ftilde.defect
            };
            kernel::op_norm(&(&lhs - &rhs))
        })
        .collect()
}

/// 5-tuple analogue of the recovery identities, against the fundamental set
/// of the adjoint tuple.
pub fn fundamental_recovery_check5(
    s: &CommutingTuple5,
    ghat: &crate::fundamental::FundamentalSet5,
) -> Vec<f64> {
    let s3 = &s.s[2];
    let ext = |x: &ComplexMatrix| {
        if ghat.basis.rank() == 0 {
            ComplexMatrix::zeros(s.dim(), s.dim())
        } else {
            &(&ghat.defect * &ghat.basis.extend(x)) * &ghat.defect
        }
    };
    vec![
        kernel::op_norm(&(&(&s.s[0].adjoint() - &(&s.stilde[1] * &s3.adjoint())) - &ext(&ghat.g1))),
        kernel::op_norm(
            &(&(&s.stilde[1].adjoint() - &(&s.s[0] * &s3.adjoint())) - &ext(&ghat.gt2)),
        ),
        kernel::op_norm(
            &(&(&s.s[1].adjoint().scale_re(0.5) - &(&s.stilde[0].scale_re(0.5) * &s3.adjoint()))
                - &ext(&ghat.g2)),
        ),
        kernel::op_norm(
            &(&(&s.stilde[0].adjoint().scale_re(0.5) - &(&s.s[1].scale_re(0.5) * &s3.adjoint()))
                - &ext(&ghat.gt1)),
        ),
    ]
}

/// Convenience: recurrence residuals of the adjoint 5-tuple (the identities
/// the 5-family Douglas row uses).
pub fn douglas_recurrences5(s: &CommutingTuple5, tol: f64) -> Result<Vec<f64>> {
    let adj = s.adjoint();
    let ghat = solve_fundamental5(&adj, tol)?;
    verify_recurrence5(&adj, &ghat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        boundary_unitary5, boundary_unitary7, compressed_contraction5, compressed_contraction7,
        direct_sum7, random_unitary,
    };

    #[test]
    fn unitary_input_is_its_own_canonical_unitary() {
        let t = boundary_unitary7(3, 3).unwrap();
        let cu = canonical_unitary7(&t, 1e-8).unwrap();
        assert_eq!(cu.rank, 3);
        assert!(cu.checks.pass(), "failed: {:#?}", cu.checks.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        // the compressed ops reproduce the originals up to the basis rotation
        let back = &(&cu.basis * &cu.ops[6]) * &cu.basis.adjoint();
        assert!((&back - &t.t[6]).max_abs() < 1e-8);
    }

    #[test]
    fn stable_input_has_empty_unitary_part() {
        let (t, _) = compressed_contraction7(3, 2, 3).unwrap();
        let cu = canonical_unitary7(&t, 1e-8).unwrap();
        assert_eq!(cu.rank, 0);
        assert!(cu.ops.is_empty());
        assert!(cu.checks.pass());
    }

    #[test]
    fn mixed_sum_recovers_unitary_summand() {
        let unit = boundary_unitary7(11, 2).unwrap();
        let (stable, _) = compressed_contraction7(13, 2, 3).unwrap();
        let mixed = direct_sum7(&unit, &stable).unwrap();
        let cu = canonical_unitary7(&mixed, 1e-8).unwrap();
        assert_eq!(cu.rank, 2, "Q-rank must equal the unitary dimension");
        assert!(cu.checks.pass(), "failed: {:#?}", cu.checks.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        // joint spectrum matches the unitary summand's diagonal
        let want: Vec<Vec<Complex64>> = (0..2)
            .map(|k| (0..7).map(|i| unit.t[i][(k, k)]).collect())
            .collect();
        let (ok, dist) = match_multisets(&cu.joint_spectrum, &want, 1e-8);
        assert!(ok, "spectrum mismatch, distance {dist}");
    }

    #[test]
    fn conjugation_invariance_and_control() {
        let unit = boundary_unitary7(21, 2).unwrap();
        let (stable, _) = compressed_contraction7(23, 1, 4).unwrap();
        let mixed = direct_sum7(&unit, &stable).unwrap();
        let u = random_unitary(5, mixed.dim());
        let (ok, dist) = unitary_equivalence_invariance(&mixed, &u, 1e-8).unwrap();
        assert!(ok, "invariance failed with distance {dist}");

        // control: distinct unitary parts are detected
        let other = boundary_unitary7(99, 2).unwrap();
        let a = canonical_unitary7(&mixed, 1e-8).unwrap();
        let b = canonical_unitary7(&direct_sum7(&other, &stable).unwrap(), 1e-8).unwrap();
        let (same, _) = match_multisets(&a.joint_spectrum, &b.joint_spectrum, 1e-8);
        assert!(!same, "distinct unitary parts must not match");
    }

    #[test]
    fn canonical_unitary_of_5_tuple() {
        let s = boundary_unitary5(7, 2).unwrap();
        let cu = canonical_unitary5(&s, 1e-8).unwrap();
        assert_eq!(cu.rank, 2);
        assert!(cu.checks.pass(), "failed: {:#?}", cu.checks.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        let (stable, _) = compressed_contraction5(5, 1, 3).unwrap();
        let cu = canonical_unitary5(&stable, 1e-8).unwrap();
        assert_eq!(cu.rank, 0);
    }

    #[test]
    fn douglas_embedding_cases() {
        // unitary tuple: O-row vanishes and Pi = Q = I
        let t = boundary_unitary7(3, 2).unwrap();
        let d = douglas_embedding(&t, 8, 1e-8).unwrap();
        assert_eq!(d.o_row.rows(), 0);
        assert!((&d.q - &ComplexMatrix::identity(2)).max_abs() < 1e-9);
        assert!(d.isometry_residual < 1e-9);
        assert!(d.q_intertwine_residuals.iter().all(|&r| r < 1e-8));

        // strictly stable: Q = 0, Pi = W, isometry residual = ||T_7^N||^2
        let (t, _) = compressed_contraction7(17, 2, 3).unwrap();
        let d = douglas_embedding(&t, 8, 1e-8).unwrap();
        assert!(d.q.max_abs() < 1e-9);
        assert!(d.isometry_residual < 1e-12, "nilpotent tail must vanish");
        assert!(d.recurrence_residuals.iter().all(|&r| r < 1e-9));

        // mixed sum: residual bounded by the pure part's tail only
        let unit = boundary_unitary7(5, 2).unwrap();
        let mixed = direct_sum7(&unit, &t).unwrap();
        let d = douglas_embedding(&mixed, 8, 1e-8).unwrap();
        assert!(d.isometry_residual < 1e-10, "{}", d.isometry_residual);
        assert!(d.q_intertwine_residuals.iter().all(|&r| r < 1e-8));
    }

    #[test]
    fn recovery_identities_from_adjoint_solve() {
        let (t, _) = compressed_contraction7(37, 2, 4).unwrap();
        let adj = t.adjoint();
        let ftilde = solve_fundamental7(&adj, 1e-10).unwrap();
        let res = fundamental_recovery_check(&t, &ftilde);
        assert!(res.iter().all(|&r| r < 1e-10), "{res:?}");

        let (s, _) = compressed_contraction5(39, 2, 4).unwrap();
        let ghat = solve_fundamental5(&s.adjoint(), 1e-8).unwrap();
        let res = fundamental_recovery_check5(&s, &ghat);
        assert!(res.iter().all(|&r| r < 1e-10), "{res:?}");
    }
}
