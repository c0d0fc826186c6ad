//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of a square complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    let schur = m.clone().schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Smallest real part over the spectrum; the drift is stable iff this is positive.
pub fn min_real_eigenvalue(m: &CMat) -> f64 {
    eigenvalues(m)
        .into_iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let sym = (m + m.adjoint()) * c(0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    frobenius(&(m - m.adjoint()))
}

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Column-major vectorization, `vec(X)[i + n*j] = X[i][j]`.
pub fn vectorize(m: &CMat) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_iterator(m.len(), m.iter().copied())
}

pub fn unvectorize(v: &nalgebra::DVector<C64>, n: usize) -> CMat {
    CMat::from_iterator(n, n, v.iter().copied())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectorize_roundtrip_is_column_major() {
        let m = CMat::from_fn(3, 3, |i, j| c((i + 10 * j) as f64));
        let v = vectorize(&m);
        assert_eq!(v[1], c(1.0));
        assert_eq!(v[3], c(10.0));
        assert_eq!(unvectorize(&v, 3), m);
    }

    #[test]
    fn eigenvalues_of_triangular_matrix_are_its_diagonal() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 2.0), c(5.0), c(0.0), C64::new(-3.0, 0.5)],
        );
        let mut ev = eigenvalues(&m);
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - C64::new(-3.0, 0.5)).norm() < 1e-12);
        assert!((ev[1] - C64::new(1.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn condition_of_identity_is_one() {
        assert!((condition_number(&CMat::identity(4, 4)) - 1.0).abs() < 1e-14);
    }
}
