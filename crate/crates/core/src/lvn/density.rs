use nalgebra::DMatrix;

use crate::network::spin;
use crate::quantum::{symmetric_eigen, HermitianOperator, IsingFamily, Projector};
use crate::scalar::Real;
use crate::Result;

/// Density operator ρ = re + i·im at normalized time s.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState<T> {
    pub re: DMatrix<T>,
    pub im: DMatrix<T>,
    pub s: T,
}

impl<T: Real> DensityState<T> {
    /// P / tr P.
    pub fn from_projector(p: &Projector<T>, s: T) -> Self {
        let m = p.to_matrix();
        let d = m.nrows();
        Self { re: m / T::of(p.rank() as f64), im: DMatrix::zeros(d, d), s }
    }

    pub fn from_real(re: DMatrix<T>, s: T) -> Self {
        let d = re.nrows();
        Self { re, im: DMatrix::zeros(d, d), s }
    }

    /// |ψ⟩⟨ψ| for ψ = u + iv.
    pub fn pure(u: &[T], v: &[T], s: T) -> Self {
        let d = u.len();
        Self {
            re: DMatrix::from_fn(d, d, |a, b| u[a] * u[b] + v[a] * v[b]),
            im: DMatrix::from_fn(d, d, |a, b| v[a] * u[b] - u[a] * v[b]),
            s,
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_real(DMatrix::identity(dim, dim) / T::of(dim as f64), T::zero())
    }

    pub fn dim(&self) -> usize {
        self.re.nrows()
    }

    pub fn n_cells(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> T {
        self.re.trace()
    }

    /// tr ρ² = Σ|ρ_ab|² for Hermitian ρ.
    pub fn purity(&self) -> T {
        self.re.norm_squared() + self.im.norm_squared()
    }

    pub fn hermitize(&mut self) {
        let d = self.dim();
        hermitize_parts(self.re.as_mut_slice(), self.im.as_mut_slice(), d);
    }

    pub fn hermiticity_error(&self) -> T {
        HermitianOperator::complex(self.re.clone(), self.im.clone()).hermiticity_error()
    }

    /// Smallest eigenvalue, from the real 2d×2d embedding [[R, −I], [I, R]].
    pub fn min_eigenvalue(&self) -> Result<T> {
        let d = self.dim();
        let emb = DMatrix::from_fn(2 * d, 2 * d, |r, c| match (r < d, c < d) {
            (true, true) => self.re[(r, c)],
            (true, false) => -self.im[(r, c - d)],
            (false, true) => self.im[(r - d, c)],
            (false, false) => self.re[(r - d, c - d)],
        });
        Ok(symmetric_eigen(&emb, 1)?.values[0])
    }

    /// tr(ρ O).
    pub fn expectation(&self, op: &HermitianOperator<T>) -> T {
        let mut acc = T::zero();
        let d = self.dim();
        for a in 0..d {
            for b in 0..d {
                acc += self.re[(a, b)] * op.re()[(b, a)] - self.im[(a, b)] * op.im()[(b, a)];
            }
        }
        acc
    }

    /// tr(ρ H̃(A, B)) without forming H̃.
    pub fn energy(&self, fam: &IsingFamily<T>, a: T, b: T) -> T {
        let t = a * T::of(0.5);
        let mut e = T::zero();
        for c in 0..self.dim() {
            e += b * fam.problem()[c] * self.re[(c, c)];
            for i in 0..fam.n_cells() {
                e -= t * self.re[(c, c ^ (1 << i))];
            }
        }
        e
    }

    /// Per-cell (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩).
    pub fn cell_expectations(&self) -> Vec<[T; 3]> {
        cell_expectations_mixed(self.re.as_slice(), self.im.as_slice(), self.dim())
    }
}

pub(crate) fn hermitize_parts<T: Real>(re: &mut [T], im: &mut [T], d: usize) {
    let half = T::of(0.5);
    for c in 0..d {
        im[c * d + c] = T::zero();
        for r in c + 1..d {
            let (lo, up) = (c * d + r, r * d + c);
            let x = (re[lo] + re[up]) * half;
            re[lo] = x;
            re[up] = x;
            let y = (im[lo] - im[up]) * half;
            im[lo] = y;
            im[up] = -y;
        }
    }
}

/// Column-major real/imaginary parts of ρ → Bloch components per cell.
pub(crate) fn cell_expectations_mixed<T: Real>(re: &[T], im: &[T], d: usize) -> Vec<[T; 3]> {
    let n = d.trailing_zeros() as usize;
    let at = |m: &[T], r: usize, c: usize| m[c * d + r];
    (0..n)
        .map(|i| {
            let m = 1 << i;
            let (mut x, mut y, mut z) = (T::zero(), T::zero(), T::zero());
            for c in 0..d {
                x += at(re, c, c ^ m);
                z += at(re, c, c) * T::of(spin(c, i) as f64);
                if c & m == 0 {
                    y -= T::of(2.0) * at(im, c, c ^ m);
                }
            }
            [x, y, z]
        })
        .collect()
}

/// Bloch components per cell for a pure state ψ = u + iv.
pub(crate) fn cell_expectations_pure<T: Real>(u: &[T], v: &[T]) -> Vec<[T; 3]> {
    let d = u.len();
    let n = d.trailing_zeros() as usize;
    (0..n)
        .map(|i| {
            let m = 1 << i;
            let (mut x, mut y, mut z) = (T::zero(), T::zero(), T::zero());
            for c in 0..d {
                let p = c ^ m;
                x += u[c] * u[p] + v[c] * v[p];
                z += (u[c] * u[c] + v[c] * v[c]) * T::of(spin(c, i) as f64);
                if c & m == 0 {
                    y += T::of(2.0) * (u[c] * v[p] - v[c] * u[p]);
                }
            }
            [x, y, z]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Single-cell Pauli matrices in the basis (bit 0 → σ_z = +1, bit 1 → −1).
    fn pauli() -> [HermitianOperator<f64>; 3] {
        let z = DMatrix::zeros(2, 2);
        [
            HermitianOperator::complex(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]), z.clone()),
            HermitianOperator::complex(z.clone(), DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])),
            HermitianOperator::complex(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]), z),
        ]
    }

    fn kron_single(op: &HermitianOperator<f64>, cell: usize, n: usize) -> HermitianOperator<f64> {
        let d = 1 << n;
        let m = 1 << cell;
        let pick = |src: &DMatrix<f64>| {
            DMatrix::from_fn(d, d, |r, c| {
                if (r & !m) != (c & !m) {
                    0.0
                } else {
                    src[((r >> cell) & 1, (c >> cell) & 1)]
                }
            })
        };
        HermitianOperator::complex(pick(op.re()), pick(op.im()))
    }

    #[test]
    fn bloch_components_match_pauli_traces() {
        let n = 3;
        let d = 1 << n;
        let u: Vec<f64> = (0..d).map(|k| (k as f64 * 0.7).cos()).collect();
        let v: Vec<f64> = (0..d).map(|k| (k as f64 * 1.3).sin()).collect();
        let norm = (u.iter().chain(&v).map(|x| x * x).sum::<f64>()).sqrt();
        let u: Vec<f64> = u.iter().map(|x| x / norm).collect();
        let v: Vec<f64> = v.iter().map(|x| x / norm).collect();
        let rho = DensityState::pure(&u, &v, 0.0);
        let mixed = rho.cell_expectations();
        let pure = cell_expectations_pure(&u, &v);
        let paulis = pauli();
        for i in 0..n {
            for a in 0..3 {
                let want = rho.expectation(&kron_single(&paulis[a], i, n));
                assert!((mixed[i][a] - want).abs() < 1e-13, "cell {i} axis {a}");
                assert!((pure[i][a] - want).abs() < 1e-13);
            }
        }
        assert!((rho.trace() - 1.0).abs() < 1e-13 && (rho.purity() - 1.0).abs() < 1e-13);
        assert!(rho.min_eigenvalue().unwrap() > -1e-12);
    }

    #[test]
    fn hermitize_symmetrizes() {
        let mut r = DensityState::<f64>::from_real(DMatrix::from_row_slice(2, 2, &[0.5, 0.2, 0.1, 0.5]), 0.0);
        r.im = DMatrix::from_row_slice(2, 2, &[0.1, 0.3, -0.1, 0.0]);
        r.hermitize();
        assert_eq!(r.hermiticity_error(), 0.0);
        assert!((r.re[(0, 1)] - 0.15).abs() < 1e-15 && (r.im[(0, 1)] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn mixed_state_bounds() {
        let r = DensityState::<f64>::maximally_mixed(8);
        assert!((r.purity() - 0.125).abs() < 1e-15);
        assert!((r.min_eigenvalue().unwrap() - 0.125).abs() < 1e-12);
    }
}
