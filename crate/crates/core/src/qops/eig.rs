use faer::{Mat, Side};

use super::{tol, DenseOperator, QopsError};
use crate::C64;

/// Largest dimension handed to the dense eigensolvers.
pub const MAX_EIG_DIM: usize = 1 << 14;

/// Eigenvalues of the rotated Hermitian part closer than this are treated as one
/// cluster and separated by a second rotation.
const CLUSTER_GAP: f64 = 1e-5;

/// Rotation angles tried in turn by [`eig_unitary`]; the later ones only run if
/// the residual check fails for the first.
const ROTATIONS: [f64; 4] = [0.381_966_011_250_105_1, 2.236_067_977_5, -1.131_370_849_9, 0.927_295_218];

fn check_hermitian(op: &DenseOperator) -> Result<(), QopsError> {
    if op.dim() > MAX_EIG_DIM {
        return Err(QopsError::TooLarge(op.dim()));
    }
    if !op.is_hermitian_flagged() {
        let err = op.hermiticity_error();
        if err > tol::HERMITICITY {
            return Err(QopsError::NotHermitian(err));
        }
    }
    Ok(())
}

fn solve(mat: &Mat<C64>) -> Result<(Vec<f64>, Mat<C64>), QopsError> {
    let evd = mat
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| QopsError::Eigensolver(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let vals: Vec<f64> = (0..mat.nrows()).map(|i| s[i].re).collect();
    let vecs = evd.U().to_owned();
    Ok(sorted(vals, vecs))
}

fn sorted(vals: Vec<f64>, vecs: Mat<C64>) -> (Vec<f64>, Mat<C64>) {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    if order.iter().enumerate().all(|(i, &j)| i == j) {
        return (vals, vecs);
    }
    let v2 = Mat::from_fn(vecs.nrows(), vecs.ncols(), |i, j| vecs[(i, order[j])]);
    (order.iter().map(|&j| vals[j]).collect(), v2)
}

/// Ascending eigenvalues with orthonormal eigenvector columns.
pub fn eig_hermitian(op: &DenseOperator) -> Result<(Vec<f64>, Mat<C64>), QopsError> {
    check_hermitian(op)?;
    solve(op.mat())
}

/// Ascending eigenvalues only.
pub fn eigvals_hermitian(op: &DenseOperator) -> Result<Vec<f64>, QopsError> {
    check_hermitian(op)?;
    let mut vals: Vec<f64> = op
        .mat()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| QopsError::Eigensolver(format!("{e:?}")))?;
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Hermitian part of `e^{-i angle} U`, eigenvalues `cos(phi - angle)`.
fn rotated_hermitian_part(u: &Mat<C64>, angle: f64) -> Mat<C64> {
    let r = C64::from_polar(1.0, -angle);
    let n = u.nrows();
    Mat::from_fn(n, n, |i, j| (r * u[(i, j)] + (r * u[(j, i)]).conj()) * 0.5)
}

fn attempt(u: &Mat<C64>, angle: f64) -> Result<(Vec<f64>, Mat<C64>), f64> {
    let n = u.nrows();
    let a = rotated_hermitian_part(u, angle);
    let (vals, mut vecs) = solve(&a).map_err(|_| f64::INFINITY)?;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && vals[end] - vals[end - 1] < CLUSTER_GAP {
            end += 1;
        }
        if end - start > 1 {
            // The cluster spans an invariant subspace; a second rotation by one
            // radian separates eigenphases that the first one folded together.
            let m = end - start;
            let vc = vecs.subcols(start, m).to_owned();
            let b = rotated_hermitian_part(u, angle + 1.0);
            let mut bc = vc.adjoint() * &b * &vc;
            for j in 0..m {
                for i in 0..j {
                    let v = (bc[(i, j)] + bc[(j, i)].conj()) * 0.5;
                    bc[(i, j)] = v;
                    bc[(j, i)] = v.conj();
                }
            }
            let (_, w) = solve(&bc).map_err(|_| f64::INFINITY)?;
            let rotated = &vc * &w;
            vecs.subcols_mut(start, m).copy_from(&rotated);
        }
        start = end;
    }
    let uv = u * &vecs;
    let mut phases = Vec::with_capacity(n);
    let mut worst = 0.0f64;
    for j in 0..n {
        let lam: C64 = (0..n).map(|i| vecs[(i, j)].conj() * uv[(i, j)]).sum();
        let mut phi = lam.arg();
        if phi <= -std::f64::consts::PI {
            phi = std::f64::consts::PI;
        }
        let e = C64::from_polar(1.0, phi);
        let res: f64 = (0..n)
            .map(|i| (uv[(i, j)] - e * vecs[(i, j)]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(res);
        phases.push(phi);
    }
    if worst > tol::EIG_RESIDUAL {
        return Err(worst);
    }
    Ok(sorted(phases, vecs))
}

/// Eigenphases in `(-pi, pi]`, ascending, with orthonormal eigenvectors.
///
/// Diagonalises a rotated Hermitian part of `U`, splits near-degenerate clusters
/// with a second rotation and accepts the result only if every pair passes the
/// residual check `||U v - e^{i phi} v|| < tol::EIG_RESIDUAL`.
pub fn eig_unitary(op: &DenseOperator) -> Result<(Vec<f64>, Mat<C64>), QopsError> {
    if op.dim() > MAX_EIG_DIM {
        return Err(QopsError::TooLarge(op.dim()));
    }
    if !op.is_unitary_flagged() {
        let err = op.unitarity_error();
        if err > tol::UNITARITY {
            return Err(QopsError::NotUnitary(err));
        }
    }
    let mut worst = f64::INFINITY;
    for &angle in &ROTATIONS {
        match attempt(op.mat(), angle) {
            Ok(out) => return Ok(out),
            Err(res) => worst = worst.min(res),
        }
    }
    Err(QopsError::Eigensolver(format!(
        "unitary eigen-residual {worst:.3e} above tolerance"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pauli_z() {
        let z = DenseOperator::from_rows([[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]]);
        let (vals, _) = eig_hermitian(&z).unwrap();
        assert_eq!(vals, vec![-1.0, 1.0]);
    }

    #[test]
    fn rank_two_projector() {
        let psi = [c(0., 0.), c(0.5, 0.), c(-(0.75f64).sqrt(), 0.), c(0., 0.)];
        let e11 = [c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)];
        let p = DenseOperator::outer(&psi, &psi).add(&DenseOperator::outer(&e11, &e11));
        let (vals, vecs) = eig_hermitian(&p).unwrap();
        for (v, e) in vals.iter().zip([0.0, 0.0, 1.0, 1.0]) {
            assert!((v - e).abs() < 1e-14);
        }
        for j in 0..4 {
            let col: Vec<C64> = (0..4).map(|i| vecs[(i, j)]).collect();
            let pv = p.apply(&col);
            let res: f64 = pv.iter().zip(&col).map(|(a, b)| (a - b * vals[j]).norm_sqr()).sum();
            assert!(res.sqrt() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DenseOperator::from_rows([[c(1., 0.), c(1., 0.)], [c(0., 0.), c(1., 0.)]]);
        assert!(matches!(eig_hermitian(&m), Err(QopsError::NotHermitian(_))));
        assert!(matches!(eig_unitary(&m), Err(QopsError::NotUnitary(_))));
    }

    #[test]
    fn identity_phases() {
        let (ph, _) = eig_unitary(&DenseOperator::identity(8)).unwrap();
        assert!(ph.iter().all(|p| p.abs() < 1e-12));
    }

    #[test]
    fn diag_one_i() {
        let d = DenseOperator::from_rows([[c(1., 0.), c(0., 0.)], [c(0., 0.), c(0., 1.)]]);
        let (ph, _) = eig_unitary(&d).unwrap();
        assert!(ph[0].abs() < 1e-12);
        assert!((ph[1] - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn minus_identity_maps_to_pi() {
        let m = DenseOperator::identity(3).scale(c(-1., 0.));
        let (ph, _) = eig_unitary(&m).unwrap();
        assert!(ph.iter().all(|p| (p - std::f64::consts::PI).abs() < 1e-12));
    }

    #[test]
    fn mirrored_and_degenerate_phases() {
        // phases symmetric about the first rotation angle, plus a threefold cluster
        let a = ROTATIONS[0];
        let phases = [a + 0.4, a - 0.4, 1.0, 1.0, 1.0, -2.0, a + 0.4 + 1e-7];
        let n = phases.len();
        let q = Mat::from_fn(n, n, |i, j| c(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i + 2 * j) % 5) as f64))
            .qr()
            .compute_Q();
        let d = Mat::from_fn(n, n, |i, j| if i == j { C64::from_polar(1.0, phases[i]) } else { c(0., 0.) });
        let u = DenseOperator::new(&q * &d * q.adjoint());
        let (ph, vecs) = eig_unitary(&u).unwrap();
        let mut expect = phases.to_vec();
        expect.sort_by(f64::total_cmp);
        for (p, e) in ph.iter().zip(&expect) {
            assert!((p - e).abs() < 1e-9, "{p} vs {e}");
        }
        let gram = vecs.adjoint() * &vecs;
        for i in 0..n {
            for j in 0..n {
                let t = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - c(t, 0.)).norm() < 1e-10);
            }
        }
    }
}
