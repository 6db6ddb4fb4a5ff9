//! Small dense linear solves (partial pivoting) for the oracle systems.

use crate::error::{Error, Result};
use crate::real::{Cplx, Real};

/// Solve A x = b in place for a real square system.
pub fn solve_real<F: Real>(a: &mut [Vec<F>], b: &mut [F]) -> Result<()> {
    let n = b.len();
    let mut max_pivot = F::zero();
    let mut min_pivot = F::infinity();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        let pa = p.abs();
        max_pivot = max_pivot.max(pa);
        min_pivot = min_pivot.min(pa);
        if pa == F::zero() {
            return Err(Error::SingularSystem { pivot_ratio: 0.0 });
        }
        for row in col + 1..n {
            let f = a[row][col] / p;
            if f == F::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] = a[row][k] - f * v;
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let ratio = (min_pivot / max_pivot).to_f64().unwrap();
    if ratio < 1e-14 {
        return Err(Error::SingularSystem { pivot_ratio: ratio });
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s = s - a[col][k] * b[k];
        }
        b[col] = s / a[col][col];
    }
    Ok(())
}

/// Solve A x = b in place for a complex square system.
pub fn solve_complex<F: Real>(a: &mut [Vec<Cplx<F>>], b: &mut [Cplx<F>]) -> Result<()> {
    let n = b.len();
    let mut max_pivot = F::zero();
    let mut min_pivot = F::infinity();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i][col].norm_sqr().partial_cmp(&a[j][col].norm_sqr()).unwrap()
            })
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        let pa = p.norm_sqr().sqrt();
        max_pivot = max_pivot.max(pa);
        min_pivot = min_pivot.min(pa);
        if pa == F::zero() {
            return Err(Error::SingularSystem { pivot_ratio: 0.0 });
        }
        for row in col + 1..n {
            let f = a[row][col] / p;
            if f == Cplx::new(F::zero(), F::zero()) {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] = a[row][k] - f * v;
            }
            let bc = b[col];
            b[row] = b[row] - f * bc;
        }
    }
    let ratio = (min_pivot / max_pivot).to_f64().unwrap();
    if ratio < 1e-14 {
        return Err(Error::SingularSystem { pivot_ratio: ratio });
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s = s - a[col][k] * b[k];
        }
        b[col] = s / a[col][col];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn real_solve_roundtrip() {
        let a0 = vec![vec![2.0, 1.0, -1.0], vec![-3.0, -1.0, 2.0], vec![-2.0, 1.0, 2.0]];
        let x_true = [1.0, -2.0, 3.0];
        let mut b: Vec<f64> =
            (0..3).map(|i| (0..3).map(|j| a0[i][j] * x_true[j]).sum()).collect();
        let mut a = a0.clone();
        solve_real(&mut a, &mut b).unwrap();
        for (xi, ti) in b.iter().zip(x_true) {
            assert_relative_eq!(*xi, ti, max_relative = 1e-12);
        }
    }

    #[test]
    fn complex_solve_roundtrip() {
        let a0 = vec![
            vec![Complex64::new(2.0, 1.0), Complex64::new(0.0, -1.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(3.0, -2.0)],
        ];
        let x_true = [Complex64::new(1.0, 1.0), Complex64::new(-2.0, 0.5)];
        let mut b: Vec<Complex64> =
            (0..2).map(|i| (0..2).map(|j| a0[i][j] * x_true[j]).sum()).collect();
        let mut a = a0.clone();
        solve_complex(&mut a, &mut b).unwrap();
        for (xi, ti) in b.iter().zip(x_true) {
            assert!((xi - ti).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_detected() {
        let mut a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let mut b = vec![1.0, 2.0];
        assert!(solve_real(&mut a, &mut b).is_err());
    }
}
