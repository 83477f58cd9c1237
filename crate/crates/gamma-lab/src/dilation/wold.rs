//! Certification of a claimed shift-plus-unitary block decomposition of a
//! 7-tuple: the top block must be a truncated pencil model over the declared
//! Hardy structure, the bottom block a boundary unitary, and the cross
//! blocks must vanish. An automatic splitter is deliberately not provided;
//! truncation blurs the pure part, so the op certifies a supplied split.

use super::{gamma_isometry_check7, gamma_unitary_check7};
use crate::error::{Error, Result};
use crate::fundamental::{CommutingTuple5, CommutingTuple7};
use crate::hardy::TruncatedHardySpace;
use crate::kernel::{self, ComplexMatrix};
use crate::report::CheckSet;
use num_complex::Complex64;

/// Verify that `v`, presented as block-diagonal over
/// (truncated Hardy space, unitary remainder), realizes the isometry model
/// form: pencil blocks on top, boundary unitary on the bottom, vanishing
/// coupling. Residuals are itemized so an injected perturbation is located.
pub fn wold_verify7(v: &CommutingTuple7, hardy: TruncatedHardySpace, tol: f64) -> Result<CheckSet> {
    let total = v.dim();
    let top = hardy.total_dim();
    if top > total {
        return Err(Error::ShapeMismatch {
            expected: format!("pencil block of dim <= {total}"),
            found: format!("{top}"),
        });
    }
    let bottom = total - top;
    let mut checks = CheckSet::new();

    // coupling blocks
    for (i, m) in v.t.iter().enumerate() {
        if top == 0 || bottom == 0 {
            break;
        }
        let tr = m.submatrix(0, top, top, bottom);
        let bl = m.submatrix(top, 0, bottom, top);
        checks.add(
            format!("coupling V_{} top-right", i + 1),
            "block-diagonal split",
            kernel::op_norm(&tr),
            tol,
        );
        checks.add(
            format!("coupling V_{} bottom-left", i + 1),
            "block-diagonal split",
            kernel::op_norm(&bl),
            tol,
        );
    }

    if top > 0 {
        let tops: Vec<ComplexMatrix> = v.t.iter().map(|m| m.submatrix(0, 0, top, top)).collect();
        checks.extend(pencil_model_checks(&tops, hardy, tol)?);
        let top_tuple = CommutingTuple7::new(tops)?;
        let mut iso = gamma_isometry_check7(&top_tuple, tol, hardy.fiber_dim);
        for c in iso.checks.iter_mut() {
            c.name = format!("pencil block: {}", c.name);
        }
        checks.extend(iso);
    }
    if bottom > 0 {
        let bottoms: Vec<ComplexMatrix> = v
            .t
            .iter()
            .map(|m| m.submatrix(top, top, bottom, bottom))
            .collect();
        let bot_tuple = CommutingTuple7::new(bottoms)?;
        let mut uni = gamma_unitary_check7(&bot_tuple, tol);
        for c in uni.checks.iter_mut() {
            c.name = format!("unitary block: {}", c.name);
        }
        checks.extend(uni);
    }
    Ok(checks)
}

/// Structure checks on a claimed truncated pencil model: the last slot is
/// the block shift, the others are bidiagonal block Toeplitz operators whose
/// diagonal/subdiagonal symbols are constant, pair as C1_i = C0_{7-i}*, and
/// satisfy the circle norm bound.
fn pencil_model_checks(
    tops: &[ComplexMatrix],
    hardy: TruncatedHardySpace,
    tol: f64,
) -> Result<CheckSet> {
    let d = hardy.fiber_dim;
    let n = hardy.levels;
    let mut checks = CheckSet::new();
    let shift = crate::hardy::truncated_shift(hardy);
    checks.add(
        "pencil block: shift slot",
        "V_7 block equals the truncated block shift",
        (&tops[6] - &shift).max_abs(),
        tol,
    );
    let mut c0s: Vec<ComplexMatrix> = Vec::with_capacity(6);
    let mut c1s: Vec<ComplexMatrix> = Vec::with_capacity(6);
    for (i, m) in tops.iter().take(6).enumerate() {
        // constancy of the block diagonals and vanishing elsewhere
        let c0 = m.submatrix(0, 0, d, d);
        let c1 = if n > 1 {
            m.submatrix(d, 0, d, d)
        } else {
            ComplexMatrix::zeros(d, d)
        };
        let mut structure = 0.0f64;
        for lo in 0..n {
            for li in 0..n {
                let blk = m.submatrix(lo * d, li * d, d, d);
                let want = if lo == li {
                    c0.clone()
                } else if lo == li + 1 {
                    c1.clone()
                } else {
                    ComplexMatrix::zeros(d, d)
                };
                structure = structure.max((&blk - &want).max_abs());
            }
        }
        checks.add(
            format!("pencil block: Toeplitz structure {}", i + 1),
            "constant block diagonal and subdiagonal, zero elsewhere",
            structure,
            tol,
        );
        c0s.push(c0);
        c1s.push(c1);
    }
    for i in 0..6 {
        checks.add(
            format!("pencil block: symbol pairing {}", i + 1),
            format!("C1_{} = C0_{}*", i + 1, 6 - i),
            (&c1s[i] - &c0s[5 - i].adjoint()).max_abs(),
            tol,
        );
        let norm = circle_norm(&c0s[i], &c1s[i], 64);
        checks.add(
            format!("pencil block: symbol norm {}", i + 1),
            "sup over the circle of ||C0 + C1 z|| <= 1",
            (norm - 1.0).max(0.0),
            tol.max(1e-8),
        );
    }
    Ok(checks)
}

fn circle_norm(c0: &ComplexMatrix, c1: &ComplexMatrix, grid: usize) -> f64 {
    (0..grid)
        .map(|k| {
            let z = Complex64::from_polar(1.0, k as f64 * std::f64::consts::TAU / grid as f64);
            kernel::op_norm(&(c0 + &c1.scale(z)))
        })
        .fold(0.0, f64::max)
}

/// 5-family analogue: pencil model on top (five-symbol layout),
/// boundary unitary on the bottom, vanishing coupling.
pub fn wold_verify5(s: &CommutingTuple5, hardy: TruncatedHardySpace, tol: f64) -> Result<CheckSet> {
    let total = s.dim();
    let top = hardy.total_dim();
    if top > total {
        return Err(Error::ShapeMismatch {
            expected: format!("pencil block of dim <= {total}"),
            found: format!("{top}"),
        });
    }
    let bottom = total - top;
    let mut checks = CheckSet::new();
    let all: Vec<&ComplexMatrix> = s.s.iter().chain(s.stilde.iter()).collect();
    let names = ["S_1", "S_2", "S_3", "S~_1", "S~_2"];
    for (name, m) in names.iter().zip(all.iter()) {
        if top == 0 || bottom == 0 {
            break;
        }
        checks.add(
            format!("coupling {name} top-right"),
            "block-diagonal split",
            kernel::op_norm(&m.submatrix(0, top, top, bottom)),
            tol,
        );
        checks.add(
            format!("coupling {name} bottom-left"),
            "block-diagonal split",
            kernel::op_norm(&m.submatrix(top, 0, bottom, top)),
            tol,
        );
    }
    if top > 0 {
        let tops: Vec<ComplexMatrix> = all.iter().map(|m| m.submatrix(0, 0, top, top)).collect();
        let tup = CommutingTuple5::new(tops[..3].to_vec(), tops[3..].to_vec())?;
        let mut iso = super::gamma_isometry_check5(&tup, tol, hardy.fiber_dim);
        for c in iso.checks.iter_mut() {
            c.name = format!("pencil block: {}", c.name);
        }
        checks.extend(iso);
        let shift = crate::hardy::truncated_shift(hardy);
        checks.add(
            "pencil block: shift slot",
            "S_3 block equals the truncated block shift",
            (&tops[2] - &shift).max_abs(),
            tol,
        );
    }
    if bottom > 0 {
        let bottoms: Vec<ComplexMatrix> = all
            .iter()
            .map(|m| m.submatrix(top, top, bottom, bottom))
            .collect();
        let tup = CommutingTuple5::new(bottoms[..3].to_vec(), bottoms[3..].to_vec())?;
        let mut uni = super::gamma_unitary_check5(&tup, tol);
        for c in uni.checks.iter_mut() {
            c.name = format!("unitary block: {}", c.name);
        }
        checks.extend(uni);
    }
    Ok(checks)
}
