//! QCA networks: cells, drivers, kink energies and classical ground states.

mod geometry;
mod ground;
mod library;

pub use geometry::{compute_kink_matrix, kink_energy, square, CellGeometry, CellKind};
pub use ground::{classical_ground, effective_bias, ClassicalGround, MAX_ENUMERATION_CELLS};
pub use library::{build_device, device_file, INVERTER_DX, CellRecord, DeviceFile, DeviceSpec, KinkOverride, DEFAULT_CUTOFF};

use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;
use crate::{Error, Result};

/// σ_z eigenvalue of cell `i` in computational basis state `config`
/// (bit clear → +1).
#[inline]
pub fn spin(config: usize, i: usize) -> i8 {
    if config >> i & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Fixed-polarization input and its couplings to the normal cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Driver<T> {
    pub label: String,
    pub polarization: T,
    pub coupling: DVector<T>,
}

/// Problem instance: kink matrix, biases folded in from drivers, outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct QcaNetwork<T> {
    name: String,
    labels: Vec<String>,
    kink: DMatrix<T>,
    drivers: Vec<Driver<T>>,
    bias: DVector<T>,
    outputs: Vec<usize>,
}

impl<T: Real> QcaNetwork<T> {
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        kink: DMatrix<T>,
        drivers: Vec<Driver<T>>,
        outputs: Vec<usize>,
    ) -> Result<Self> {
        let n = kink.nrows();
        if n == 0 || kink.ncols() != n {
            return Err(Error::InvalidParameter("kink matrix must be square and nonempty".into()));
        }
        if labels.len() != n {
            return Err(Error::InvalidParameter("one label per cell required".into()));
        }
        for i in 0..n {
            if kink[(i, i)] != T::zero() {
                return Err(Error::InvalidParameter("kink matrix diagonal must vanish".into()));
            }
            for j in 0..i {
                if kink[(i, j)] != kink[(j, i)] {
                    return Err(Error::InvalidParameter("kink matrix must be symmetric".into()));
                }
            }
        }
        if drivers.iter().any(|d| d.coupling.len() != n) {
            return Err(Error::InvalidParameter("driver coupling length mismatch".into()));
        }
        if outputs.is_empty() || outputs.iter().any(|&o| o >= n) {
            return Err(Error::InvalidParameter("outputs must be a nonempty set of cell indices".into()));
        }
        let mut outputs = outputs;
        outputs.sort_unstable();
        outputs.dedup();
        let mut bias = DVector::zeros(n);
        for d in &drivers {
            bias.axpy(d.polarization, &d.coupling, T::one());
        }
        Ok(Self { name: name.into(), labels, kink, drivers, bias, outputs })
    }

    /// Network from a bare kink matrix and bias vector; the bias is carried by
    /// a single virtual driver of polarization +1.
    pub fn from_parts(kink: DMatrix<T>, bias: DVector<T>, outputs: Vec<usize>) -> Result<Self> {
        let n = kink.nrows();
        let labels = (0..n).map(|i| format!("c{i}")).collect();
        let drivers = if bias.iter().all(|b| *b == T::zero()) {
            Vec::new()
        } else {
            vec![Driver { label: "bias".into(), polarization: T::one(), coupling: bias }]
        };
        Self::new("custom", labels, kink, drivers, outputs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_cells(&self) -> usize {
        self.kink.nrows()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn kink(&self) -> &DMatrix<T> {
        &self.kink
    }

    pub fn bias(&self) -> &DVector<T> {
        &self.bias
    }

    pub fn drivers(&self) -> &[Driver<T>] {
        &self.drivers
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// Nonzero couplings (i < j, E_ij).
    pub fn pairs(&self) -> Vec<(usize, usize, T)> {
        let n = self.n_cells();
        let mut v = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let e = self.kink[(i, j)];
                if e != T::zero() {
                    v.push((i, j, e));
                }
            }
        }
        v
    }

    /// (1/2)[Σ h_i σ_i − Σ_{i<j} E_ij σ_i σ_j] for one basis configuration.
    pub fn classical_energy(&self, config: usize) -> T {
        let n = self.n_cells();
        let mut e = T::zero();
        for i in 0..n {
            let si = T::of(spin(config, i) as f64);
            e += self.bias[i] * si;
            for j in i + 1..n {
                e -= self.kink[(i, j)] * si * T::of(spin(config, j) as f64);
            }
        }
        e * T::of(0.5)
    }

    /// Classical energies of all 2^N configurations, built incrementally.
    pub fn classical_energies(&self, max_cells: usize) -> Result<Vec<T>> {
        let n = self.n_cells();
        if n > max_cells {
            return Err(Error::TooLarge { n, max: max_cells });
        }
        let dim = 1usize << n;
        let mut e = vec![T::zero(); dim];
        e[0] = self.classical_energy(0);
        for c in 1..dim {
            // flip the lowest set bit b of c, starting from c with b cleared
            let b = c.trailing_zeros() as usize;
            let prev = c & !(1 << b);
            let mut field = -self.bias[b];
            for j in 0..n {
                if j != b {
                    field += self.kink[(b, j)] * T::of(spin(prev, j) as f64);
                }
            }
            e[c] = e[prev] + field;
        }
        Ok(e)
    }

    /// Same network with a different output set.
    pub fn with_outputs(mut self, outputs: Vec<usize>) -> Result<Self> {
        if outputs.is_empty() || outputs.iter().any(|&o| o >= self.n_cells()) {
            return Err(Error::InvalidParameter("invalid output set".into()));
        }
        self.outputs = outputs;
        Ok(self)
    }

    /// Converts to another scalar type.
    pub fn cast<U: Real>(&self) -> QcaNetwork<U> {
        let c = |x: T| U::of(x.as_f64());
        QcaNetwork {
            name: self.name.clone(),
            labels: self.labels.clone(),
            kink: self.kink.map(c),
            drivers: self
                .drivers
                .iter()
                .map(|d| Driver { label: d.label.clone(), polarization: c(d.polarization), coupling: d.coupling.map(c) })
                .collect(),
            bias: self.bias.map(c),
            outputs: self.outputs.clone(),
        }
    }
}
