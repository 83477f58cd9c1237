//! Deterministic, seedable constructors of guaranteed-valid test objects:
//! diagonal symbol families whose pencil norms are budgeted slot by slot,
//! compressed pencil-model contractions, scalar tuples from domain points,
//! and diagonal boundary unitaries.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fundamental::{CommutingTuple5, CommutingTuple7};
use crate::hardy::{pencil_operator, truncated_shift, AnalyticPencil, TruncatedHardySpace};
use crate::kernel::{orthonormalize_columns, ComplexMatrix, SplitMix64};
use crate::mu::{mu_upper, symmetrize5, symmetrize7, GammaPoint};

/// Six diagonal symbols with |f_i(k)| + |f_{7-i}(k)| <= 1 in every slot, so
/// every pencil F_i* + F_{7-i} z has supremum norm at most one on the circle
/// and both commutativity families vanish identically.
pub fn diag_symbol_family7(seed: u64, dim: usize) -> Vec<ComplexMatrix> {
    let mut rng = SplitMix64::new(seed ^ 0x7A31_9C4D_0000_0001);
    let mut slots: Vec<Vec<Complex64>> = (0..6).map(|_| Vec::with_capacity(dim)).collect();
    for _k in 0..dim {
        for pair in 0..3 {
            let total = 0.30 + 0.65 * rng.next_f64();
            let split = 0.15 + 0.70 * rng.next_f64();
            let a = total * split;
            let b = total * (1.0 - split);
            slots[pair].push(Complex64::from_polar(a, rng.next_f64() * std::f64::consts::TAU));
            slots[5 - pair].push(Complex64::from_polar(b, rng.next_f64() * std::f64::consts::TAU));
        }
    }
    slots.into_iter().map(|d| ComplexMatrix::diagonal(&d)).collect()
}

/// Diagonal (G_1, G_2, G~_1, G~_2) with slotwise budgets
/// |g_1| + |g~_2| <= 1 and |g_2| + |g~_1| <= 1.
pub fn diag_symbol_family5(
    seed: u64,
    dim: usize,
) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let mut rng = SplitMix64::new(seed ^ 0x7A31_9C4D_0000_0002);
    let mut g1 = Vec::with_capacity(dim);
    let mut g2 = Vec::with_capacity(dim);
    let mut gt1 = Vec::with_capacity(dim);
    let mut gt2 = Vec::with_capacity(dim);
    for _k in 0..dim {
        for (first, second) in [(&mut g1, &mut gt2), (&mut g2, &mut gt1)] {
            let total = 0.30 + 0.65 * rng.next_f64();
            let split = 0.15 + 0.70 * rng.next_f64();
            first.push(Complex64::from_polar(
                total * split,
                rng.next_f64() * std::f64::consts::TAU,
            ));
            second.push(Complex64::from_polar(
                total * (1.0 - split),
                rng.next_f64() * std::f64::consts::TAU,
            ));
        }
    }
    (
        ComplexMatrix::diagonal(&g1),
        ComplexMatrix::diagonal(&g2),
        ComplexMatrix::diagonal(&gt1),
        ComplexMatrix::diagonal(&gt2),
    )
}

/// Pencil-model contraction on `levels` coefficient levels: T_i multiplies
/// by F_i* + F_{7-i} z (truncated) and T_7 is the truncated shift. The tuple
/// commutes exactly and T_7 is nilpotent, hence pure. Returns the tuple and
/// the diagonal symbols used.
pub fn compressed_contraction7(
    seed: u64,
    dim: usize,
    levels: usize,
) -> Result<(CommutingTuple7, Vec<ComplexMatrix>)> {
    let symbols = diag_symbol_family7(seed, dim);
    let sp = TruncatedHardySpace::new(levels, dim);
    let mut mats = Vec::with_capacity(7);
    for i in 0..6 {
        let pencil = AnalyticPencil::new(symbols[i].adjoint(), symbols[5 - i].clone())?;
        mats.push(pencil_operator(&pencil, sp)?);
    }
    mats.push(truncated_shift(sp));
    Ok((CommutingTuple7::new(mats)?, symbols))
}

/// 5-tuple analogue with the five-symbol pencil layout: S_1 = M(G_1* + G~_2 z),
/// S_2 = M(2G_2* + 2G~_1 z), S_3 = shift, S~_1 = M(2G~_1* + 2G_2 z),
/// S~_2 = M(G~_2* + G_1 z), truncated to `levels`.
#[allow(clippy::type_complexity)]
pub fn compressed_contraction5(
    seed: u64,
    dim: usize,
    levels: usize,
) -> Result<(
    CommutingTuple5,
    (ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix),
)> {
    let (g1, g2, gt1, gt2) = diag_symbol_family5(seed, dim);
    let sp = TruncatedHardySpace::new(levels, dim);
    let op = |c0: ComplexMatrix, c1: ComplexMatrix| -> Result<ComplexMatrix> {
        pencil_operator(&AnalyticPencil::new(c0, c1)?, sp)
    };
    let s1 = op(g1.adjoint(), gt2.clone())?;
    let s2 = op(g2.adjoint().scale_re(2.0), gt1.scale_re(2.0))?;
    let s3 = truncated_shift(sp);
    let st1 = op(gt1.adjoint().scale_re(2.0), g2.scale_re(2.0))?;
    let st2 = op(gt2.adjoint(), g1.clone())?;
    Ok((
        CommutingTuple5::new(vec![s1, s2, s3], vec![st1, st2])?,
        (g1, g2, gt1, gt2),
    ))
}

/// Scalar 7-tuple carried by a domain point with a witness matrix.
pub fn scalar_tuple7(point: &GammaPoint) -> Result<CommutingTuple7> {
    let witness = point
        .witness
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("point carries no witness matrix".into()))?;
    let st = point.variant.structure();
    let (upper, _) = mu_upper(witness, &st, 48)?;
    if upper > 1.0 + 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "witness is not in the domain: mu upper bound {upper:.12} > 1"
        )));
    }
    CommutingTuple7::new(point.coords.iter().map(|&z| ComplexMatrix::scalar(z)).collect())
}

/// Scalar 5-tuple carried by a domain point with a witness matrix.
pub fn scalar_tuple5(point: &GammaPoint) -> Result<CommutingTuple5> {
    let witness = point
        .witness
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("point carries no witness matrix".into()))?;
    let st = point.variant.structure();
    let (upper, _) = mu_upper(witness, &st, 48)?;
    if upper > 1.0 + 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "witness is not in the domain: mu upper bound {upper:.12} > 1"
        )));
    }
    let s = point.coords[..3].iter().map(|&z| ComplexMatrix::scalar(z)).collect();
    let stilde = point.coords[3..5].iter().map(|&z| ComplexMatrix::scalar(z)).collect();
    CommutingTuple5::new(s, stilde)
}

/// Diagonal boundary unitary of the 7-family: a direct sum of `points`
/// scalar tuples symmetrized from unitary diagonal witnesses, so the joint
/// spectrum lies in the distinguished boundary set by construction.
pub fn boundary_unitary7(seed: u64, points: usize) -> Result<CommutingTuple7> {
    let mut rng = SplitMix64::new(seed ^ 0x7A31_9C4D_0000_0003);
    let mut diag: Vec<Vec<Complex64>> = (0..7).map(|_| Vec::with_capacity(points)).collect();
    for _ in 0..points {
        let phases: Vec<Complex64> = (0..3).map(|_| rng.next_phase()).collect();
        let p = symmetrize7(&ComplexMatrix::diagonal(&phases))?;
        for (slot, &z) in p.coords.iter().enumerate() {
            diag[slot].push(z);
        }
    }
    CommutingTuple7::new(diag.into_iter().map(|d| ComplexMatrix::diagonal(&d)).collect())
}

/// Diagonal boundary unitary of the 5-family.
pub fn boundary_unitary5(seed: u64, points: usize) -> Result<CommutingTuple5> {
    let mut rng = SplitMix64::new(seed ^ 0x7A31_9C4D_0000_0004);
    let mut diag: Vec<Vec<Complex64>> = (0..5).map(|_| Vec::with_capacity(points)).collect();
    for _ in 0..points {
        let phases: Vec<Complex64> = (0..3).map(|_| rng.next_phase()).collect();
        let p = symmetrize5(&ComplexMatrix::diagonal(&phases))?;
        for (slot, &z) in p.coords.iter().enumerate() {
            diag[slot].push(z);
        }
    }
    let mut mats: Vec<Vec<ComplexMatrix>> = diag
        .into_iter()
        .map(|d| vec![ComplexMatrix::diagonal(&d)])
        .collect();
    let st2 = mats.pop().unwrap().pop().unwrap();
    let st1 = mats.pop().unwrap().pop().unwrap();
    let s: Vec<ComplexMatrix> = mats.into_iter().map(|mut v| v.pop().unwrap()).collect();
    CommutingTuple5::new(s, vec![st1, st2])
}

/// Coordinatewise direct sum of two 7-tuples.
pub fn direct_sum7(a: &CommutingTuple7, b: &CommutingTuple7) -> Result<CommutingTuple7> {
    CommutingTuple7::new(
        a.t.iter()
            .zip(b.t.iter())
            .map(|(x, y)| x.direct_sum(y))
            .collect(),
    )
}

/// Coordinatewise direct sum of two 5-tuples.
pub fn direct_sum5(a: &CommutingTuple5, b: &CommutingTuple5) -> Result<CommutingTuple5> {
    CommutingTuple5::new(
        a.s.iter().zip(b.s.iter()).map(|(x, y)| x.direct_sum(y)).collect(),
        a.stilde
            .iter()
            .zip(b.stilde.iter())
            .map(|(x, y)| x.direct_sum(y))
            .collect(),
    )
}

/// Haar-ish random unitary from a seed (orthonormalized Gaussian frame).
pub fn random_unitary(seed: u64, n: usize) -> ComplexMatrix {
    let mut rng = SplitMix64::new(seed ^ 0x7A31_9C4D_0000_0005);
    let g = ComplexMatrix::from_fn(n, n, |_, _| rng.next_complex());
    orthonormalize_columns(&g, 1e-12)
}

/// The constructor families exposed by [`GeneratorSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    DiagIsometry7,
    DiagIsometry5,
    Compressed7,
    Compressed5,
    Scalar7,
    Scalar5,
    CirculantUnitary7,
    CirculantUnitary5,
}

/// A declarative recipe for a guaranteed-valid test object. Identical specs
/// produce bitwise-identical output.
#[derive(Debug, Clone, Copy)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub seed: u64,
    pub fiber_dim: usize,
    /// Levels for compressed kinds, modes for circulant kinds; ignored by
    /// the others.
    pub levels: usize,
}

/// What a generator spec produces.
#[derive(Debug, Clone)]
pub enum GeneratedObject {
    Symbols7(Vec<ComplexMatrix>),
    Symbols5((ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix)),
    Tuple7(CommutingTuple7),
    Tuple5(CommutingTuple5),
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<GeneratedObject> {
        Ok(match self.kind {
            GeneratorKind::DiagIsometry7 => {
                GeneratedObject::Symbols7(diag_symbol_family7(self.seed, self.fiber_dim))
            }
            GeneratorKind::DiagIsometry5 => {
                GeneratedObject::Symbols5(diag_symbol_family5(self.seed, self.fiber_dim))
            }
            GeneratorKind::Compressed7 => GeneratedObject::Tuple7(
                compressed_contraction7(self.seed, self.fiber_dim, self.levels.max(1))?.0,
            ),
            GeneratorKind::Compressed5 => GeneratedObject::Tuple5(
                compressed_contraction5(self.seed, self.fiber_dim, self.levels.max(1))?.0,
            ),
            GeneratorKind::Scalar7 => {
                GeneratedObject::Tuple7(scalar_tuple7(&symmetrize7(&seeded_witness(self.seed))?)?)
            }
            GeneratorKind::Scalar5 => {
                GeneratedObject::Tuple5(scalar_tuple5(&symmetrize5(&seeded_witness(self.seed))?)?)
            }
            GeneratorKind::CirculantUnitary7 => {
                let f = diag_symbol_family7(self.seed, self.fiber_dim);
                GeneratedObject::Tuple7(
                    crate::dilation::circulant_gamma_unitary7(&f, self.levels.max(1))?.0,
                )
            }
            GeneratorKind::CirculantUnitary5 => {
                let (g1, g2, gt1, gt2) = diag_symbol_family5(self.seed, self.fiber_dim);
                GeneratedObject::Tuple5(
                    crate::dilation::circulant_gamma_unitary5(
                        (&g1, &g2, &gt1, &gt2),
                        self.levels.max(1),
                    )?
                    .0,
                )
            }
        })
    }
}

/// Diagonal contraction witness inside the domain, for the scalar kinds.
fn seeded_witness(seed: u64) -> ComplexMatrix {
    let mut rng = SplitMix64::new(seed ^ 0x5CA1_A800_0000_0000);
    ComplexMatrix::diagonal(
        &(0..3)
            .map(|_| Complex64::from_polar(0.95 * rng.next_f64(), rng.next_f64() * std::f64::consts::TAU))
            .collect::<Vec<_>>(),
    )
}
