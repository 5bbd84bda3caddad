//! Gate unitaries and their closed-form transfer matrices.

use crate::linalg::{pauli_rotation, ComplexMatrix};
use crate::pauli::Axis;
use crate::ptm::{ptm_from_unitary, Ptm};

/// `exp(-i·angle·P/2)` for a single-qubit axis.
pub fn rotation(axis: Axis, angle: f64) -> ComplexMatrix {
    pauli_rotation(&axis.matrix(), angle)
}

/// PTM of a single-qubit Pauli rotation: an SO(3) rotation of the Bloch vector.
pub fn rotation_ptm(axis: Axis, angle: f64) -> Ptm {
    let (s, c) = angle.sin_cos();
    let rows = match axis {
        Axis::X => [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, c, -s],
            [0.0, 0.0, s, c],
        ],
        Axis::Y => [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, c, 0.0, s],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, -s, 0.0, c],
        ],
        Axis::Z => [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, c, -s, 0.0],
            [0.0, s, c, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    };
    Ptm::from_rows(rows)
}

/// CNOT with the control as the most-significant qubit.
pub fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

/// Controlled `Ry(angle)`, control most significant.
pub fn controlled_ry(angle: f64) -> ComplexMatrix {
    let (s, c) = (angle / 2.0).sin_cos();
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, c, -s],
        &[0.0, 0.0, s, c],
    ])
}

/// `exp(-i·angle·Z⊗Z/2)`.
pub fn rzz(angle: f64) -> ComplexMatrix {
    let zz = Axis::Z.matrix().kron(&Axis::Z.matrix());
    pauli_rotation(&zz, angle)
}

pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]])
}

pub fn phase_s() -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        2,
        vec![
            1.0.into(),
            0.0.into(),
            0.0.into(),
            num_complex::Complex64::new(0.0, 1.0),
        ],
    )
    .expect("static shape")
}

pub fn cnot_ptm() -> Ptm {
    ptm_from_unitary(&cnot()).expect("CNOT is unitary")
}

pub fn controlled_ry_ptm(angle: f64) -> Ptm {
    ptm_from_unitary(&controlled_ry(angle)).expect("controlled rotation is unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::embed_operator;
    use crate::ptm::compose;

    #[test]
    fn closed_form_rotations_match_unitary_route() {
        for axis in Axis::ALL {
            for &a in &[0.0, 0.3, -1.7, 2.9, std::f64::consts::PI] {
                let fast = rotation_ptm(axis, a);
                let slow = ptm_from_unitary(&rotation(axis, a)).unwrap();
                assert!(fast.max_abs_diff(&slow) < 1e-14, "{axis} {a}");
            }
        }
    }

    #[test]
    fn rzz_compiles_to_cnot_rz_cnot() {
        for &a in &[0.4, -2.2, 1.0] {
            let rz_t = rotation_ptm(Axis::Z, a).embed(&[1], 2);
            let compiled = compose(&[cnot_ptm(), rz_t, cnot_ptm()]).unwrap();
            let direct = ptm_from_unitary(&rzz(a)).unwrap();
            assert!(compiled.max_abs_diff(&direct) < 1e-13);
            // Same identity at the unitary level.
            let rz = embed_operator(&rotation(Axis::Z, a), &[1], 2);
            let u = cnot().matmul(&rz).matmul(&cnot());
            assert!(u.max_abs_diff(&rzz(a)) < 1e-14);
        }
    }

    #[test]
    fn controlled_ry_is_unitary() {
        assert!(controlled_ry(0.3).unitarity_error() < 1e-15);
        assert!(controlled_ry_ptm(0.0).max_abs_diff(&Ptm::identity(2)) < 1e-14);
    }
}
