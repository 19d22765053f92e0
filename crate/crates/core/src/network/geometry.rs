//! Cell geometry and the point-charge kink-energy model.

use nalgebra::DMatrix;

use crate::scalar::Real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Normal,
    Driver,
}

/// Four-dot cell. Dots 0 and 2 are occupied when the polarization is +1,
/// dots 1 and 3 when it is -1; the dots are listed around the square.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry<T> {
    center: [T; 2],
    dot_offsets: [[T; 2]; 4],
    kind: CellKind,
    driver_polarization: Option<T>,
}

const DOT_SIGNS: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

impl<T: Real> CellGeometry<T> {
    pub fn new(
        center: [T; 2],
        dot_offsets: [[T; 2]; 4],
        kind: CellKind,
        driver_polarization: Option<T>,
    ) -> Result<Self> {
        check_square(&dot_offsets)?;
        match (kind, driver_polarization) {
            (CellKind::Driver, Some(p)) => {
                if p.abs() > T::one() {
                    return Err(Error::InvalidParameter(format!(
                        "driver polarization {} outside [-1, 1]",
                        p.as_f64()
                    )));
                }
            }
            (CellKind::Normal, None) => {}
            _ => {
                return Err(Error::InvalidParameter(
                    "driver polarization must be given for drivers and only for drivers".into(),
                ))
            }
        }
        Ok(Self { center, dot_offsets, kind, driver_polarization })
    }

    /// Normal cell with the default square of dots (`half_side` from the center).
    pub fn normal(center: [T; 2], half_side: T) -> Self {
        Self { center, dot_offsets: square(half_side), kind: CellKind::Normal, driver_polarization: None }
    }

    pub fn driver(center: [T; 2], half_side: T, polarization: T) -> Self {
        Self {
            center,
            dot_offsets: square(half_side),
            kind: CellKind::Driver,
            driver_polarization: Some(polarization),
        }
    }

    pub fn center(&self) -> [T; 2] {
        self.center
    }

    pub fn dot_offsets(&self) -> &[[T; 2]; 4] {
        &self.dot_offsets
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn driver_polarization(&self) -> Option<T> {
        self.driver_polarization
    }

    fn dots(&self) -> [[T; 2]; 4] {
        let c = self.center;
        self.dot_offsets.map(|o| [c[0] + o[0], c[1] + o[1]])
    }

    /// Applies a rigid motion: rotation by `angle` about the origin, then a shift.
    pub fn transformed(&self, angle: T, shift: [T; 2]) -> Self {
        let (sn, cs) = angle.sin_cos();
        let rot = |p: [T; 2]| [cs * p[0] - sn * p[1], sn * p[0] + cs * p[1]];
        let c = rot(self.center);
        Self {
            center: [c[0] + shift[0], c[1] + shift[1]],
            dot_offsets: self.dot_offsets.map(rot),
            ..self.clone()
        }
    }
}

/// Dots at the corners of a square, counter-clockwise from the upper right.
pub fn square<T: Real>(h: T) -> [[T; 2]; 4] {
    [[h, h], [-h, h], [-h, -h], [h, -h]]
}

fn dist<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

fn check_square<T: Real>(d: &[[T; 2]; 4]) -> Result<()> {
    let sides = [dist(d[0], d[1]), dist(d[1], d[2]), dist(d[2], d[3]), dist(d[3], d[0])];
    let diags = [dist(d[0], d[2]), dist(d[1], d[3])];
    let tol = T::tol(1e-9) * sides[0];
    let square = sides[0] > T::zero()
        && sides.iter().all(|&s| (s - sides[0]).abs() <= tol)
        && (diags[0] - diags[1]).abs() <= tol
        // the diagonal condition alone admits a rhombus only if the sides differ
        && (diags[0] - sides[0] * T::of(2.0).sqrt()).abs() <= tol * T::of(2.0);
    if square {
        Ok(())
    } else {
        Err(Error::InvalidParameter("dot offsets do not form a square".into()))
    }
}

/// Unnormalized U(anti-aligned) - U(aligned) for two cells: each dot carries
/// its occupation minus one half, so a cell of polarization P has dot charges
/// ±P/2 and the energy is bilinear in the two polarizations.
fn raw_kink<T: Real>(a: &CellGeometry<T>, b: &CellGeometry<T>) -> Option<T> {
    let (da, db) = (a.dots(), b.dots());
    let mut sum = T::zero();
    for (i, &pa) in da.iter().enumerate() {
        for (j, &pb) in db.iter().enumerate() {
            let r = dist(pa, pb);
            if r <= T::default_epsilon() {
                return None;
            }
            sum += T::of(DOT_SIGNS[i] * DOT_SIGNS[j]) / r;
        }
    }
    Some(-sum * T::of(0.5))
}

/// Normalization anchor: the cell's own dot layout repeated at one pitch along x.
fn anchor<T: Real>(cell: &CellGeometry<T>, pitch: T) -> T {
    let mut other = cell.clone();
    other.center = [cell.center[0] + pitch, cell.center[1]];
    raw_kink(cell, &other).expect("pitch separates the anchor pair")
}

/// Kink energy between two cells in units of the in-line nearest-neighbour
/// value at `pitch`.
pub fn kink_energy<T: Real>(a: &CellGeometry<T>, b: &CellGeometry<T>, pitch: T) -> Option<T> {
    raw_kink(a, b).map(|e| e / anchor(a, pitch))
}

/// Pairwise kink energies for all cells given, normalized to the in-line
/// neighbour at `pitch`; entries with magnitude below `cutoff` are zeroed.
pub fn compute_kink_matrix<T: Real>(
    cells: &[CellGeometry<T>],
    cutoff: T,
    pitch: T,
) -> Result<DMatrix<T>> {
    if cells.len() < 2 {
        return Err(Error::InvalidParameter("kink matrix needs at least two cells".into()));
    }
    if cutoff < T::zero() || pitch <= T::zero() {
        return Err(Error::InvalidParameter("cutoff must be >= 0 and pitch > 0".into()));
    }
    let n = cells.len();
    let norm = anchor(&cells[0], pitch);
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let e = raw_kink(&cells[i], &cells[j]).ok_or(Error::CoincidentDots(i, j))? / norm;
            if e.abs() >= cutoff {
                k[(i, j)] = e;
                k[(j, i)] = e;
            }
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(x: f64, y: f64) -> CellGeometry<f64> {
        CellGeometry::normal([x, y], 0.25)
    }

    // Direct evaluation of the 16 Coulomb terms for both polarization pairs.
    fn oracle(c1: [f64; 2], c2: [f64; 2]) -> f64 {
        let off = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
        let q = |p: i32| if p > 0 { [0.5, -0.5, 0.5, -0.5] } else { [-0.5, 0.5, -0.5, 0.5] };
        let u = |p1: i32, p2: i32| {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    let dx = c1[0] + 0.25 * off[i][0] - c2[0] - 0.25 * off[j][0];
                    let dy = c1[1] + 0.25 * off[i][1] - c2[1] - 0.25 * off[j][1];
                    s += q(p1)[i] * q(p2)[j] / (dx * dx + dy * dy).sqrt();
                }
            }
            s
        };
        u(1, -1) - u(1, 1)
    }

    #[test]
    fn inline_neighbour_is_unit() {
        let e = kink_energy(&cell(0.0, 0.0), &cell(1.0, 0.0), 1.0).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_direct_coulomb_sum() {
        let nn = oracle([0.0, 0.0], [1.0, 0.0]);
        for &(x, y) in &[(1.0, 1.0), (2.0, 0.0), (2.0, 1.0), (2.0, 2.0), (3.0, -1.5)] {
            let e = kink_energy(&cell(0.0, 0.0), &cell(x, y), 1.0).unwrap();
            assert!((e - oracle([0.0, 0.0], [x, y]) / nn).abs() < 1e-13, "{x} {y}");
        }
        let diag = oracle([0.0, 0.0], [1.0, 1.0]) / nn;
        assert!((diag + 0.2231).abs() < 1e-3);
    }

    #[test]
    fn cutoff_drops_second_neighbours() {
        let cells = [cell(0.0, 0.0), cell(2.0, 0.0), cell(1.0, 1.0)];
        let k = compute_kink_matrix(&cells, 0.15, 1.0).unwrap();
        assert_eq!(k[(0, 1)], 0.0);
        assert!(k[(0, 2)] < -0.2);
        let k0 = compute_kink_matrix(&cells, 0.0, 1.0).unwrap();
        assert!(k0[(0, 1)] > 0.0 && k0[(0, 1)] < 0.15);
    }

    #[test]
    fn coincident_dots_rejected() {
        let cells = [cell(0.0, 0.0), cell(0.5, 0.0)];
        assert!(matches!(compute_kink_matrix(&cells, 0.0, 1.0), Err(Error::CoincidentDots(0, 1))));
    }

    #[test]
    fn non_square_offsets_rejected() {
        let bad = [[0.3, 0.25], [-0.25, 0.25], [-0.25, -0.25], [0.25, -0.25]];
        assert!(CellGeometry::new([0.0, 0.0], bad, CellKind::Normal, None).is_err());
        let rhombus = [[0.5, 0.0], [0.0, 0.25], [-0.5, 0.0], [0.0, -0.25]];
        assert!(CellGeometry::new([0.0, 0.0], rhombus, CellKind::Normal, None).is_err());
        assert!(CellGeometry::new([0.0, 0.0], square(0.25), CellKind::Driver, None::<f64>).is_err());
    }

    #[test]
    fn single_precision_agrees() {
        let a = CellGeometry::<f32>::normal([0.0, 0.0], 0.25);
        let b = CellGeometry::<f32>::normal([1.0, 1.0], 0.25);
        let e32 = kink_energy(&a, &b, 1.0).unwrap() as f64;
        let e64 = kink_energy(&cell(0.0, 0.0), &cell(1.0, 1.0), 1.0).unwrap();
        assert!((e32 - e64).abs() < 1e-5);
    }
}
