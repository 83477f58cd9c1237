//! Block lower-triangular isometric lifts on state + truncated Hardy space.
//! The lift identity Pi T_i* = V_i* Pi is structural (block triangularity),
//! so it holds to rounding at every truncation level.

use crate::error::{Error, Result};
use crate::fundamental::{CommutingTuple5, CommutingTuple7, FundamentalSet5, FundamentalSet7};
use crate::hardy::{pencil_operator, truncated_shift, AnalyticPencil, TruncatedHardySpace};
use crate::kernel::{self, ComplexMatrix, SplitMix64, SubspaceBasis};

/// An assembled block lift: every operator is [[T, 0], [*, pencil]] on
/// state + N Hardy levels over the defect fiber.
#[derive(Debug, Clone)]
pub struct SchafferDilation {
    pub state_dim: usize,
    pub hardy: TruncatedHardySpace,
    pub defect_basis: SubspaceBasis,
    /// Lifted operators in tuple order (7 for the 7-family, 5 ordered
    /// S_1, S_2, S_3, S~_1, S~_2 for the 5-family).
    pub ops: Vec<ComplexMatrix>,
    /// Max over i of ||Pi T_i* - V_i* Pi||; structurally zero.
    pub lift_residual: f64,
    /// ||V_last* V_last - I|| restricted to the top Hardy level: the
    /// truncation boundary where the lift stops being isometric.
    pub boundary_defect: f64,
}

impl SchafferDilation {
    /// The inclusion h -> (h, 0).
    pub fn embedding(&self) -> ComplexMatrix {
        let total = self.state_dim + self.hardy.total_dim();
        ComplexMatrix::from_fn(total, self.state_dim, |r, c| {
            if r == c {
                num_complex::Complex64::new(1.0, 0.0)
            } else {
                num_complex::Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Top-left corner of the lifted operator `i` (the original tuple entry).
    pub fn corner(&self, i: usize) -> ComplexMatrix {
        self.ops[i].submatrix(0, 0, self.state_dim, self.state_dim)
    }
}

fn assemble_lift(
    t: &ComplexMatrix,
    first_row_block: &ComplexMatrix, // fiber x state, lands on level 0
    tail: &ComplexMatrix,            // Hardy-space block
    hardy: TruncatedHardySpace,
) -> ComplexMatrix {
    let n = t.cols();
    let r = hardy.fiber_dim;
    let hd = hardy.total_dim();
    let mut lower = ComplexMatrix::zeros(hd, n);
    for i in 0..r.min(hd) {
        for j in 0..n {
            lower[(i, j)] = first_row_block[(i, j)];
        }
    }
    ComplexMatrix::from_blocks(&[
        vec![t.clone(), ComplexMatrix::zeros(n, hd)],
        vec![lower, tail.clone()],
    ])
}

fn lift_residual(ops: &[ComplexMatrix], originals: &[&ComplexMatrix], state_dim: usize) -> f64 {
    // Pi T* = V* Pi reads: the first state_dim columns of V* equal T* padded
    // by zeros, i.e. the top-left corner of V is T and the top-right is 0.
    let mut worst = 0.0f64;
    for (v, t) in ops.iter().zip(originals.iter()) {
        let corner = v.submatrix(0, 0, state_dim, state_dim);
        worst = worst.max((&corner - *t).max_abs());
        let top_right = v.submatrix(0, state_dim, state_dim, v.cols() - state_dim);
        worst = worst.max(top_right.max_abs());
    }
    worst
}

fn boundary_defect(last: &ComplexMatrix, state_dim: usize, hardy: TruncatedHardySpace) -> f64 {
    if hardy.total_dim() == 0 || hardy.levels == 0 {
        return 0.0;
    }
    let total = last.rows();
    let gram = &(&last.adjoint() * last) - &ComplexMatrix::identity(total);
    let top = state_dim + (hardy.levels - 1) * hardy.fiber_dim;
    let blk = gram.submatrix(top, top, hardy.fiber_dim, hardy.fiber_dim);
    kernel::op_norm(&blk)
}

/// Assemble the 7-family lift: V_i = [[T_i, 0], [F_{7-i}* D, M(F_i + F_{7-i}* z)]]
/// and V_7 = [[T_7, 0], [D, M_z]] on state + N Hardy levels over the defect
/// space of T_7.
pub fn schaffer7(
    t: &CommutingTuple7,
    f: &FundamentalSet7,
    levels: usize,
    tol: f64,
) -> Result<SchafferDilation> {
    if levels < 2 {
        return Err(Error::InvalidArgument("need at least two levels".into()));
    }
    if f.max_residual() > tol {
        return Err(Error::InvalidArgument(format!(
            "fundamental residual {:.3e} above tolerance {tol:.3e}: the lift identity would not certify",
            f.max_residual()
        )));
    }
    let n = t.dim();
    let r = f.basis.rank();
    let hardy = TruncatedHardySpace::new(levels, r);
    let bd = &f.basis.frame.adjoint() * &f.defect; // r x n
    let sym = |i: usize| -> ComplexMatrix {
        if r == 0 {
            ComplexMatrix::zeros(0, 0)
        } else {
            f.f[i].clone()
        }
    };
    let mut ops = Vec::with_capacity(7);
    for i in 0..6 {
        let pencil = AnalyticPencil::new(sym(i), sym(5 - i).adjoint())?;
        let tail = pencil_operator(&pencil, hardy)?;
        let row = &sym(5 - i).adjoint() * &bd;
        ops.push(assemble_lift(&t.t[i], &row, &tail, hardy));
    }
    ops.push(assemble_lift(
        &t.t[6],
        &bd,
        &truncated_shift(hardy),
        hardy,
    ));
    let originals: Vec<&ComplexMatrix> = t.t.iter().collect();
    let lift = lift_residual(&ops, &originals, n);
    let defect = boundary_defect(&ops[6], n, hardy);
    Ok(SchafferDilation {
        state_dim: n,
        hardy,
        defect_basis: f.basis.clone(),
        ops,
        lift_residual: lift,
        boundary_defect: defect,
    })
}

/// Assemble the 5-family lift with the five-symbol pencils, the halved
/// fundamental operators carrying their factors of two explicitly:
/// W_1 = [[S_1, 0], [G~_2* D, M(G_1 + G~_2* z)]],
/// W_2 = [[S_2, 0], [2 G~_1* D, M(2G_2 + 2G~_1* z)]],
/// W_3 = [[S_3, 0], [D, M_z]],
/// W~_1 = [[S~_1, 0], [2 G_2* D, M(2G~_1 + 2G_2* z)]],
/// W~_2 = [[S~_2, 0], [G_1* D, M(G~_2 + G_1* z)]].
pub fn schaffer5(
    s: &CommutingTuple5,
    g: &FundamentalSet5,
    levels: usize,
    tol: f64,
) -> Result<SchafferDilation> {
    if levels < 2 {
        return Err(Error::InvalidArgument("need at least two levels".into()));
    }
    if g.max_residual() > tol {
        return Err(Error::InvalidArgument(format!(
            "fundamental residual {:.3e} above tolerance {tol:.3e}",
            g.max_residual()
        )));
    }
    let n = s.dim();
    let r = g.basis.rank();
    let hardy = TruncatedHardySpace::new(levels, r);
    let bd = &g.basis.frame.adjoint() * &g.defect;
    let build = |orig: &ComplexMatrix,
                 row_sym: ComplexMatrix,
                 c0: ComplexMatrix,
                 c1: ComplexMatrix|
     -> Result<ComplexMatrix> {
        let tail = pencil_operator(&AnalyticPencil::new(c0, c1)?, hardy)?;
        let row = &row_sym * &bd;
        Ok(assemble_lift(orig, &row, &tail, hardy))
    };
    let w1 = build(
        &s.s[0],
        g.gt2.adjoint(),
        g.g1.clone(),
        g.gt2.adjoint(),
    )?;
    let w2 = build(
        &s.s[1],
        g.gt1.adjoint().scale_re(2.0),
        g.g2.scale_re(2.0),
        g.gt1.adjoint().scale_re(2.0),
    )?;
    let w3 = assemble_lift(&s.s[2], &bd, &truncated_shift(hardy), hardy);
    let wt1 = build(
        &s.stilde[0],
        g.g2.adjoint().scale_re(2.0),
        g.gt1.scale_re(2.0),
        g.g2.adjoint().scale_re(2.0),
    )?;
    let wt2 = build(
        &s.stilde[1],
        g.g1.adjoint(),
        g.gt2.clone(),
        g.g1.adjoint(),
    )?;
    let ops = vec![w1, w2, w3, wt1, wt2];
    let originals: Vec<&ComplexMatrix> = s.s.iter().chain(s.stilde.iter()).collect();
    let lift = lift_residual(&ops, &originals, n);
    let defect = boundary_defect(&ops[2], n, hardy);
    Ok(SchafferDilation {
        state_dim: n,
        hardy,
        defect_basis: g.basis.clone(),
        ops,
        lift_residual: lift,
        boundary_defect: defect,
    })
}

/// Max over sampled monomials p with total degree <= max_deg of
/// ||P_state p(V) Pi - p(T)||. Block triangularity makes this exact up to
/// rounding; the degree budget guards the truncation contract.
pub fn dilation_identity_check(
    d: &SchafferDilation,
    originals: &[ComplexMatrix],
    max_deg: usize,
) -> Result<f64> {
    if originals.len() != d.ops.len() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} originals", d.ops.len()),
            found: format!("{}", originals.len()),
        });
    }
    if d.hardy.levels < 2 || max_deg > d.hardy.levels - 2 {
        return Err(Error::DegreeTooLarge {
            degree: max_deg,
            max_degree: d.hardy.levels.saturating_sub(2),
        });
    }
    let n = d.state_dim;
    let mut worst = 0.0f64;
    let mut rng = SplitMix64::new(0xD11A_7E5C_0000_0001);
    let mut check_word = |word: &[usize]| {
        let total = d.state_dim + d.hardy.total_dim();
        let mut pv = ComplexMatrix::identity(total);
        let mut pt = ComplexMatrix::identity(n);
        for &idx in word {
            pv = &pv * &d.ops[idx];
            pt = &pt * &originals[idx];
        }
        let corner = pv.submatrix(0, 0, n, n);
        worst = worst.max(kernel::op_norm(&(&corner - &pt)));
    };
    check_word(&[]);
    // all powers of the shift slot plus random mixed words
    let last = d.ops.len() - 1;
    for k in 1..=max_deg {
        check_word(&vec![last; k]);
    }
    for _ in 0..48 {
        let deg = 1 + (rng.next_u64() as usize) % max_deg.max(1);
        let word: Vec<usize> = (0..deg)
            .map(|_| (rng.next_u64() as usize) % d.ops.len())
            .collect();
        check_word(&word);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::{solve_fundamental5, solve_fundamental7};
    use crate::generators::{compressed_contraction5, compressed_contraction7};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_tuple(lambda: f64) -> CommutingTuple7 {
        let vals = [
            c(0.21, 0.14),
            c(-0.15, 0.02),
            c(0.05, -0.33),
            c(0.12, 0.21),
            c(-0.28, -0.04),
            c(0.31, 0.08),
            c(lambda, 0.0),
        ];
        CommutingTuple7::new(vals.iter().map(|&v| ComplexMatrix::scalar(v)).collect()).unwrap()
    }

    #[test]
    fn scalar_lift_blocks_and_powers() {
        let t = scalar_tuple(0.5);
        let f = solve_fundamental7(&t, 1e-10).unwrap();
        let n = 6;
        let d = schaffer7(&t, &f, n, 1e-8).unwrap();
        assert_eq!(d.ops[6].rows(), 1 + n);
        assert!(d.lift_residual < 1e-15, "lift {}", d.lift_residual);
        // P_state V_7^k |_state = lambda^k exactly for k <= N
        for k in 0..=n as u64 {
            let p = d.ops[6].pow(k);
            let got = p[(0, 0)];
            let want = c(0.5f64.powi(k as i32), 0.0);
            assert!((got - want).norm() < 1e-14, "power {k}: {got} vs {want}");
        }
        // boundary defect is the top-level truncation loss
        assert!((d.boundary_defect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isometry_input_gives_trivial_lift() {
        // zero-defect input: the Hardy fiber is empty and V_i = T_i
        let mut rng = SplitMix64::new(5);
        let phases: Vec<Complex64> = (0..2).map(|_| rng.next_phase()).collect();
        let t7 = ComplexMatrix::diagonal(&phases);
        let pair = |a: &ComplexMatrix| -> ComplexMatrix { &a.conj_entries() * &t7 };
        let mk = |rng: &mut SplitMix64| {
            ComplexMatrix::diagonal(&(0..2).map(|_| rng.next_complex()).collect::<Vec<_>>())
        };
        let t1 = mk(&mut rng);
        let t6 = pair(&t1);
        let t2 = mk(&mut rng);
        let t5 = pair(&t2);
        let t3 = mk(&mut rng);
        let t4 = pair(&t3);
        let t = CommutingTuple7::new(vec![t1.clone(), t2, t3, t4, t5, t6, t7]).unwrap();
        let f = solve_fundamental7(&t, 1e-10).unwrap();
        assert_eq!(f.basis.rank(), 0);
        let d = schaffer7(&t, &f, 4, 1e-8).unwrap();
        assert_eq!(d.hardy.fiber_dim, 0);
        assert_eq!(d.ops[0].rows(), 2);
        assert!((&d.ops[0] - &t1).max_abs() < 1e-15);
        assert_eq!(d.boundary_defect, 0.0);
    }

    #[test]
    fn generated_tuple_dilation_identity() {
        let (t, _) = compressed_contraction7(23, 2, 4).unwrap();
        let f = solve_fundamental7(&t, 1e-10).unwrap();
        let d = schaffer7(&t, &f, 16, 1e-8).unwrap();
        assert!(d.lift_residual < 1e-13);
        let res = dilation_identity_check(&d, &t.t, 8).unwrap();
        assert!(res < 1e-11, "dilation identity residual {res}");
        // degree too large for the truncation is rejected
        assert!(dilation_identity_check(&d, &t.t, 15).is_err());
    }

    #[test]
    fn schaffer_corner_recovers_fundamentals() {
        let (t, _) = compressed_contraction7(31, 3, 4).unwrap();
        let f = solve_fundamental7(&t, 1e-10).unwrap();
        let d = schaffer7(&t, &f, 6, 1e-8).unwrap();
        // re-solving on the extracted corners returns the input set
        let corners = CommutingTuple7::new((0..7).map(|i| d.corner(i)).collect()).unwrap();
        let f2 = solve_fundamental7(&corners, 1e-10).unwrap();
        for i in 0..6 {
            assert!(
                (&f.f[i] - &f2.f[i]).max_abs() < 1e-10,
                "corner recovery failed on F{}",
                i + 1
            );
        }
    }

    #[test]
    fn five_family_lift() {
        let (s, _) = compressed_contraction5(29, 2, 4).unwrap();
        let g = solve_fundamental5(&s, 1e-8).unwrap();
        let d = schaffer5(&s, &g, 12, 1e-8).unwrap();
        assert!(d.lift_residual < 1e-13, "lift {}", d.lift_residual);
        let originals: Vec<ComplexMatrix> =
            s.s.iter().chain(s.stilde.iter()).cloned().collect();
        let res = dilation_identity_check(&d, &originals, 6).unwrap();
        assert!(res < 1e-11, "identity residual {res}");
    }

    #[test]
    fn rejects_bad_fundamental_residuals() {
        // a unitary last coordinate has a rank-zero defect, so the equation
        // is solvable only if the pairing relations already hold; generic
        // diagonal contractions leave a real residual and the lift refuses
        let mut rng = SplitMix64::new(91);
        let phases: Vec<Complex64> = (0..2).map(|_| rng.next_phase()).collect();
        let mut mats: Vec<ComplexMatrix> = (0..6)
            .map(|_| {
                ComplexMatrix::diagonal(
                    &(0..2).map(|_| rng.next_complex().scale(0.4)).collect::<Vec<_>>(),
                )
            })
            .collect();
        mats.push(ComplexMatrix::diagonal(&phases));
        let t = CommutingTuple7::new(mats).unwrap();
        let f = solve_fundamental7(&t, 1e-10).unwrap();
        assert_eq!(f.basis.rank(), 0);
        assert!(f.max_residual() > 1e-6);
        assert!(schaffer7(&t, &f, 4, 1e-8).is_err());
    }
}
