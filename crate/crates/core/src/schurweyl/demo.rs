use serde::Serialize;

use crate::error::Result;
use crate::io::{MatrixJson, VectorJson};
use crate::qcore::linalg::{max_abs, max_abs_diff, real, CMatrix, CVector};
use crate::schurweyl::{young_projector, CollectiveTwirl, Partition, Permutation};

/// `3 P^{2,1}` for three qubits, basis `|000>, .., |111>`.
pub const REFERENCE_P21_TIMES_3: [[i8; 8]; 8] = [
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 2, -1, 0, -1, 0, 0, 0],
    [0, -1, 2, 0, -1, 0, 0, 0],
    [0, 0, 0, 2, 0, -1, -1, 0],
    [0, -1, -1, 0, 2, 0, 0, 0],
    [0, 0, 0, -1, 0, 2, -1, 0],
    [0, 0, 0, -1, 0, -1, 2, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
];

pub fn reference_p21() -> CMatrix {
    CMatrix::from_fn(8, 8, |i, j| real(REFERENCE_P21_TIMES_3[i][j] as f64 / 3.0))
}

/// Mixed-symmetry block vector, `(0, -2, 1, -sqrt3, 1, sqrt3, 0, 0) / (2 sqrt3)`.
pub fn reference_x21() -> CVector {
    let s3 = 3f64.sqrt();
    let v = [0.0, -2.0, 1.0, -s3, 1.0, s3, 0.0, 0.0];
    CVector::from_iterator(8, v.iter().map(|&x| real(x / (2.0 * s3))))
}

/// Symmetric block vector, `(0, 1, 1, 1, 1, 1, 1, 0) / sqrt6`.
pub fn reference_x3() -> CVector {
    let v = [0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0];
    CVector::from_iterator(8, v.iter().map(|&x| real(x / 6f64.sqrt())))
}

#[derive(Clone, Debug, Serialize)]
pub struct DemoResiduals {
    /// `max |P^{2,1} - reference|`
    pub p21_vs_reference: f64,
    /// `max |P^{3} - (1/6) sum_pi P_pi|`
    pub p3_vs_direct_sum: f64,
    /// `max |P^{1,1,1}|`
    pub p111_norm: f64,
    /// `max |P^{2,1} x21 - x21|`
    pub x21_in_block: f64,
    /// `max |P^{3} x3 - x3|`
    pub x3_in_block: f64,
    /// `max |G(|x21><x21|) - P^{2,1}/4|`
    pub x21_block_twirl: f64,
    /// `max |G(|x3><x3|) - P^{3}/4|`
    pub x3_block_twirl: f64,
    /// `max |G(|x><x|) - 1/8|`
    pub twirl_vs_maximally_mixed: f64,
}

impl DemoResiduals {
    pub fn max(&self) -> f64 {
        [
            self.p21_vs_reference,
            self.p3_vs_direct_sum,
            self.p111_norm,
            self.x21_in_block,
            self.x3_in_block,
            self.x21_block_twirl,
            self.x3_block_twirl,
            self.twirl_vs_maximally_mixed,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Three-qubit worked example of the collective twirl.
#[derive(Clone, Debug, Serialize)]
pub struct ThreeQubitDemo {
    pub p21: MatrixJson,
    pub p3: MatrixJson,
    pub x21: VectorJson,
    pub x3: VectorJson,
    pub x: VectorJson,
    pub twirled: MatrixJson,
    pub residuals: DemoResiduals,
}

pub fn three_qubit_demo() -> Result<ThreeQubitDemo> {
    let part = |p: &[usize]| Partition::new(p.to_vec());
    let p21 = young_projector(&part(&[2, 1])?, 3, 2)?;
    let p3 = young_projector(&part(&[3])?, 3, 2)?;
    let p111 = young_projector(&part(&[1, 1, 1])?, 3, 2)?;

    let mut direct = CMatrix::zeros(8, 8);
    for pi in Permutation::all(3) {
        for (i, m) in pi.index_map(2).into_iter().enumerate() {
            direct[(m, i)] += real(1.0 / 6.0);
        }
    }

    let twirl = CollectiveTwirl::new(3, 2)?;
    let x21 = reference_x21();
    let x3 = reference_x3();
    let x = (&x21 + &x3) / real(2f64.sqrt());
    let twirled = twirl.apply_matrix(&(&x * x.adjoint()))?;
    let block_twirl = |v: &CVector, p: &CMatrix| -> Result<f64> {
        Ok(max_abs_diff(&twirl.apply_matrix(&(v * v.adjoint()))?, &(p / real(4.0))))
    };

    let residuals = DemoResiduals {
        p21_vs_reference: max_abs_diff(&p21, &reference_p21()),
        p3_vs_direct_sum: max_abs_diff(&p3, &direct),
        p111_norm: max_abs(&p111),
        x21_in_block: (&p21 * &x21 - &x21).camax(),
        x3_in_block: (&p3 * &x3 - &x3).camax(),
        x21_block_twirl: block_twirl(&x21, &p21)?,
        x3_block_twirl: block_twirl(&x3, &p3)?,
        twirl_vs_maximally_mixed: max_abs_diff(&twirled, &(CMatrix::identity(8, 8) / real(8.0))),
    };

    Ok(ThreeQubitDemo {
        p21: (&p21).into(),
        p3: (&p3).into(),
        x21: (&x21).into(),
        x3: (&x3).into(),
        x: (&x).into(),
        twirled: (&twirled).into(),
        residuals,
    })
}
