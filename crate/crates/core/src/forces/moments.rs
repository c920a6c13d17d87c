use nalgebra::{Matrix3, SymmetricEigen};
use serde::Serialize;

use crate::scalar::Real;
use crate::spectral::RealVectorField;

/// `M_{jk} = ∫ u_j u_k`, computed with the cell-volume quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentMatrix<T = f64> {
    pub entries: [[T; 3]; 3],
}

impl<T: Real> MomentMatrix<T> {
    pub fn zero() -> Self {
        Self {
            entries: [[T::zero(); 3]; 3],
        }
    }

    pub fn trace(&self) -> T {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2]
    }

    /// Frobenius norm of `M − (tr M/3) I`.
    pub fn deviatoric_norm(&self) -> T {
        let m = self.trace() / T::lit(3.0);
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let d = if i == j { m } else { T::zero() };
                let v = self.entries[i][j] - d;
                s += v * v;
            }
        }
        s.sqrt()
    }

    /// Traceless part `M − (tr M/3) I`.
    pub fn deviatoric(&self) -> [[T; 3]; 3] {
        let m = self.trace() / T::lit(3.0);
        let mut d = self.entries;
        for (i, row) in d.iter_mut().enumerate() {
            row[i] -= m;
        }
        d
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [T; 3] {
        let m = Matrix3::from_fn(|i, j| self.entries[i][j].as_f64());
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        [T::lit(ev[0]), T::lit(ev[1]), T::lit(ev[2])]
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            entries: self.entries.map(|row| row.map(|v| v * a)),
        }
    }
}

/// Quadrature of the nine products `u_j u_k`.
pub fn moment_matrix<T: Real>(u: &RealVectorField<T>) -> MomentMatrix<T> {
    let dv = u.grid.cell_volume();
    let mut m = MomentMatrix::zero();
    for j in 0..3 {
        for k in j..3 {
            let s: T = u.components[j]
                .iter()
                .zip(&u.components[k])
                .map(|(&a, &b)| a * b)
                .sum();
            m.entries[j][k] = s * dv;
            m.entries[k][j] = s * dv;
        }
    }
    m
}

/// `‖M − (tr M/3)I‖_F / tr M`, or 0 when the trace vanishes.
pub fn scalar_deviation<T: Real>(m: &MomentMatrix<T>) -> T {
    let tr = m.trace();
    if tr <= T::zero() {
        return T::zero();
    }
    m.deviatoric_norm() / tr
}
