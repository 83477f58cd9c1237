//! Dilation constructions and their verifiers: Schaffer block lifts,
//! Douglas embeddings, canonical boundary unitaries, the admissible converse
//! construction, circulant boundary unitaries, and Wold-form certification.

mod admissible;
mod canonical;
mod schaffer;
mod wold;

pub use admissible::{
    admissible_construct5, admissible_construct7, circulant_gamma_unitary5,
    circulant_gamma_unitary7, AdmissibleConstruction5, AdmissibleConstruction7,
};
pub use canonical::{
    canonical_unitary5, canonical_unitary7, douglas_embedding, douglas_recurrences5,
    fundamental_recovery_check, fundamental_recovery_check5, unitary_equivalence_invariance,
    CanonicalUnitary, DouglasEmbedding,
};
pub use schaffer::{dilation_identity_check, schaffer5, schaffer7, SchafferDilation};
pub use wold::{wold_verify5, wold_verify7};

use crate::fundamental::{CommutingTuple5, CommutingTuple7};
use crate::kernel::{self, ComplexMatrix};
use crate::report::CheckSet;

/// Compression to the leading `dim - edge` coordinates; for truncated Hardy
/// models the defect of an identity is supported on the top level only, so
/// excluding it certifies the identity exactly.
fn banded(m: &ComplexMatrix, edge: usize) -> ComplexMatrix {
    let keep_r = m.rows().saturating_sub(edge);
    let keep_c = m.cols().saturating_sub(edge);
    m.submatrix(0, 0, keep_r, keep_c)
}

/// Isometry-family residuals of a 7-tuple: last coordinate isometric, the
/// pairing identities V_i = V_{7-i}* V_7, contraction gates and commutation.
/// `edge_dim` trailing coordinates are excluded from the identity residuals
/// (the truncation edge of a Hardy model); pass 0 for genuine isometries.
pub fn gamma_isometry_check7(v: &CommutingTuple7, tol: f64, edge_dim: usize) -> CheckSet {
    let mut set = CheckSet::new();
    set.add(
        "commutation",
        "V_i V_j = V_j V_i",
        v.commutation_residual,
        tol,
    );
    let v7 = &v.t[6];
    let ident = ComplexMatrix::identity(v7.rows());
    let isom = &(&v7.adjoint() * v7) - &ident;
    set.add(
        "isometry",
        "V_7* V_7 = I",
        kernel::op_norm(&banded(&isom, edge_dim)),
        tol,
    );
    for i in 0..6 {
        let diff = &v.t[i] - &(&v.t[5 - i].adjoint() * v7);
        set.add(
            format!("pairing V_{}", i + 1),
            format!("V_{} = V_{}* V_7", i + 1, 6 - i),
            kernel::op_norm(&banded(&diff, edge_dim)),
            tol,
        );
    }
    for i in 0..6 {
        let norm = kernel::op_norm(&v.t[i]);
        set.add(
            format!("contraction V_{}", i + 1),
            format!("||V_{}|| <= 1", i + 1),
            (norm - 1.0).max(0.0),
            tol,
        );
    }
    set
}

/// Isometry-family residuals of a 5-tuple: W_3 isometric, the four pairing
/// identities, and the norm gates ||S_1||, ||S~_2|| <= 1, ||S_2||,
/// ||S~_1|| <= 2.
pub fn gamma_isometry_check5(w: &CommutingTuple5, tol: f64, edge_dim: usize) -> CheckSet {
    let mut set = CheckSet::new();
    set.add(
        "commutation",
        "pairwise commuting including S_i S~_j = S~_j S_i",
        w.commutation_residual,
        tol,
    );
    let s3 = &w.s[2];
    let ident = ComplexMatrix::identity(s3.rows());
    let isom = &(&s3.adjoint() * s3) - &ident;
    set.add(
        "isometry",
        "S_3* S_3 = I",
        kernel::op_norm(&banded(&isom, edge_dim)),
        tol,
    );
    let pairings: [(&str, &str, ComplexMatrix); 4] = [
        ("pairing S_1", "S_1 = S~_2* S_3", &w.s[0] - &(&w.stilde[1].adjoint() * s3)),
        ("pairing S_2", "S_2 = S~_1* S_3", &w.s[1] - &(&w.stilde[0].adjoint() * s3)),
        ("pairing S~_1", "S~_1 = S_2* S_3", &w.stilde[0] - &(&w.s[1].adjoint() * s3)),
        ("pairing S~_2", "S~_2 = S_1* S_3", &w.stilde[1] - &(&w.s[0].adjoint() * s3)),
    ];
    for (name, law, diff) in pairings {
        set.add(name, law, kernel::op_norm(&banded(&diff, edge_dim)), tol);
    }
    let gates = [
        ("gate S_1", &w.s[0], 1.0),
        ("gate S_2", &w.s[1], 2.0),
        ("gate S~_1", &w.stilde[0], 2.0),
        ("gate S~_2", &w.stilde[1], 1.0),
    ];
    for (name, m, cap) in gates {
        set.add(
            name,
            format!("norm bounded by {cap}"),
            (kernel::op_norm(m) - cap).max(0.0),
            tol,
        );
    }
    set
}

/// Boundary-unitary residuals of a 7-tuple: N_7 unitary, every N_i normal,
/// the adjoint pairing N_7* N_i = N_{7-i}*, and commutation.
pub fn gamma_unitary_check7(n: &CommutingTuple7, tol: f64) -> CheckSet {
    let mut set = gamma_isometry_check7(n, tol, 0);
    let n7 = &n.t[6];
    let ident = ComplexMatrix::identity(n7.rows());
    set.add(
        "coisometry",
        "N_7 N_7* = I",
        kernel::op_norm(&(&(n7 * &n7.adjoint()) - &ident)),
        tol,
    );
    for i in 0..6 {
        set.add(
            format!("normality N_{}", i + 1),
            format!("[N_{0}, N_{0}*] = 0", i + 1),
            kernel::op_norm(&n.t[i].commutator(&n.t[i].adjoint())),
            tol,
        );
    }
    set
}

/// Boundary-unitary residuals of a 5-tuple.
pub fn gamma_unitary_check5(m: &CommutingTuple5, tol: f64) -> CheckSet {
    let mut set = gamma_isometry_check5(m, tol, 0);
    let m3 = &m.s[2];
    let ident = ComplexMatrix::identity(m3.rows());
    set.add(
        "coisometry",
        "M_3 M_3* = I",
        kernel::op_norm(&(&(m3 * &m3.adjoint()) - &ident)),
        tol,
    );
    for (name, mat) in [
        ("normality M_1", &m.s[0]),
        ("normality M_2", &m.s[1]),
        ("normality M~_1", &m.stilde[0]),
        ("normality M~_2", &m.stilde[1]),
    ] {
        set.add(
            name,
            "commutes with its adjoint",
            kernel::op_norm(&mat.commutator(&mat.adjoint())),
            tol,
        );
    }
    set
}
