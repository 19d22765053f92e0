//! Standard devices and the JSON device-file format.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::geometry::{compute_kink_matrix, square, CellGeometry, CellKind};
use super::{Driver, QcaNetwork};
use crate::scalar::Real;
use crate::{Error, Result};

/// Interactions weaker than this (in nearest-neighbour units) are ignored.
pub const DEFAULT_CUTOFF: f64 = 0.15;
/// Dot half-spacing relative to the cell pitch (dot separation a = p/2).
pub const DOT_HALF_SIDE: f64 = 0.25;

/// Output-cell displacement of the calibrated inverter, in pitches.
pub const INVERTER_DX: f64 = 0.026;

const INVERTER_JSON: &str = include_str!("../../devices/inverter.json");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeviceSpec {
    Wire(usize),
    Inverter,
    /// Inputs (A, B, C); B is the arm opposite the output.
    Majority([bool; 3]),
    File(PathBuf),
}

impl FromStr for DeviceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower.ends_with(".json") {
            return Ok(DeviceSpec::File(PathBuf::from(s.trim())));
        }
        if lower == "inverter" || lower == "inv" {
            return Ok(DeviceSpec::Inverter);
        }
        if let Some(rest) = lower.strip_prefix("wire") {
            let rest = rest.trim_start_matches(['-', '_']);
            let n: usize = rest.parse().map_err(|_| Error::UnknownDevice(s.into()))?;
            if n < 1 {
                return Err(Error::InvalidParameter("wire length must be at least 1".into()));
            }
            return Ok(DeviceSpec::Wire(n));
        }
        if let Some(rest) = lower.strip_prefix("maj") {
            let bits: Vec<char> = rest.trim_start_matches(['-', '_']).chars().collect();
            if bits.len() == 3 && bits.iter().all(|c| *c == '0' || *c == '1') {
                return Ok(DeviceSpec::Majority([bits[0] == '1', bits[1] == '1', bits[2] == '1']));
            }
        }
        Err(Error::UnknownDevice(s.into()))
    }
}

impl std::fmt::Display for DeviceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeviceSpec::Wire(n) => write!(f, "Wire-{n}"),
            DeviceSpec::Inverter => write!(f, "Inverter"),
            DeviceSpec::Majority(b) => {
                write!(f, "Maj-{}{}{}", b[0] as u8, b[1] as u8, b[2] as u8)
            }
            DeviceSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CellKindRecord {
    #[default]
    Normal,
    Driver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub label: String,
    pub center: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dot_offsets: Option<[[f64; 2]; 4]>,
    #[serde(default)]
    pub kind: CellKindRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<f64>,
}

/// Replaces the geometric kink energy between two labelled cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinkOverride {
    pub a: String,
    pub b: String,
    pub value: f64,
}

fn default_pitch() -> f64 {
    1.0
}

fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceFile {
    pub name: String,
    #[serde(default = "default_pitch")]
    pub pitch: f64,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    pub cells: Vec<CellRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kinks: Vec<KinkOverride>,
    /// When set, `kinks` is the complete interaction graph and geometry only
    /// places the cells.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub frozen_kinks: bool,
    /// Output cell labels; defaults to the rightmost normal cell(s).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
}

impl DeviceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::DeviceFile(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("device file serializes")
    }

    pub fn wire(n: usize) -> Self {
        let mut cells = vec![driver("D", [0.0, 0.0], 1.0)];
        cells.extend((1..=n).map(|i| normal(&format!("c{i}"), [i as f64, 0.0])));
        Self::plain(format!("Wire-{n}"), cells)
    }

    pub fn majority(inputs: [bool; 3]) -> Self {
        let p = |b: bool| if b { 1.0 } else { -1.0 };
        let cells = vec![
            driver("A", [0.0, 2.0], p(inputs[0])),
            driver("B", [-2.0, 0.0], p(inputs[1])),
            driver("C", [0.0, -2.0], p(inputs[2])),
            normal("a", [0.0, 1.0]),
            normal("b", [-1.0, 0.0]),
            normal("c", [0.0, -1.0]),
            normal("center", [0.0, 0.0]),
            normal("out", [1.0, 0.0]),
        ];
        let b = |x: bool| x as u8;
        Self::plain(format!("Maj-{}{}{}", b(inputs[0]), b(inputs[1]), b(inputs[2])), cells)
    }

    /// Split-branch inverter: the two branches rejoin diagonally on an output
    /// cell displaced by `dx` pitches from the lattice site.
    pub fn inverter_layout(dx: f64) -> Self {
        let cells = vec![
            driver("D", [0.0, 0.0], 1.0),
            normal("c1", [1.0, 0.0]),
            normal("c2", [2.0, 0.0]),
            normal("u1", [2.0, 1.0]),
            normal("u2", [3.0, 1.0]),
            normal("l1", [2.0, -1.0]),
            normal("l2", [3.0, -1.0]),
            normal("out", [4.0 + dx, 0.0]),
        ];
        Self::plain("Inverter".into(), cells)
    }

    /// Library inverter: calibrated geometry with its kink graph frozen.
    pub fn inverter() -> Self {
        Self::from_json(INVERTER_JSON).expect("embedded inverter description is valid")
    }

    fn plain(name: String, cells: Vec<CellRecord>) -> Self {
        Self { name, pitch: 1.0, cutoff: DEFAULT_CUTOFF, cells, kinks: Vec::new(), frozen_kinks: false, outputs: None }
    }

    pub fn build<T: Real>(&self) -> Result<QcaNetwork<T>> {
        let geoms = self
            .cells
            .iter()
            .map(|c| {
                let offsets = c.dot_offsets.unwrap_or_else(|| square(DOT_HALF_SIDE * self.pitch));
                let kind = match c.kind {
                    CellKindRecord::Normal => CellKind::Normal,
                    CellKindRecord::Driver => CellKind::Driver,
                };
                CellGeometry::new(
                    [T::of(c.center[0]), T::of(c.center[1])],
                    offsets.map(|o| [T::of(o[0]), T::of(o[1])]),
                    kind,
                    c.polarization.map(T::of),
                )
                .map_err(|e| Error::DeviceFile(format!("cell `{}`: {e}", c.label)))
            })
            .collect::<Result<Vec<_>>>()?;
        let index = |label: &str| {
            self.cells
                .iter()
                .position(|c| c.label == label)
                .ok_or_else(|| Error::DeviceFile(format!("unknown cell label `{label}`")))
        };
        for (i, c) in self.cells.iter().enumerate() {
            if self.cells[..i].iter().any(|o| o.label == c.label) {
                return Err(Error::DeviceFile(format!("duplicate label `{}`", c.label)));
            }
        }
        let total = geoms.len();
        let mut full = if total >= 2 && !self.frozen_kinks {
            compute_kink_matrix(&geoms, T::of(self.cutoff), T::of(self.pitch))?
        } else {
            DMatrix::zeros(total, total)
        };
        for o in &self.kinks {
            let (i, j) = (index(&o.a)?, index(&o.b)?);
            if i == j {
                return Err(Error::DeviceFile("kink override on a single cell".into()));
            }
            full[(i, j)] = T::of(o.value);
            full[(j, i)] = T::of(o.value);
        }
        let normals: Vec<usize> = (0..total).filter(|&i| geoms[i].kind() == CellKind::Normal).collect();
        if normals.is_empty() {
            return Err(Error::DeviceFile("device has no normal cells".into()));
        }
        let n = normals.len();
        let kink = DMatrix::from_fn(n, n, |a, b| full[(normals[a], normals[b])]);
        let drivers = (0..total)
            .filter(|&i| geoms[i].kind() == CellKind::Driver)
            .map(|d| Driver {
                label: self.cells[d].label.clone(),
                polarization: geoms[d].driver_polarization().unwrap_or_else(T::zero),
                coupling: DVector::from_fn(n, |a, _| full[(normals[a], d)]),
            })
            .collect();
        let outputs = match &self.outputs {
            Some(labels) => labels
                .iter()
                .map(|l| {
                    let i = index(l)?;
                    normals
                        .iter()
                        .position(|&k| k == i)
                        .ok_or_else(|| Error::DeviceFile(format!("output `{l}` is not a normal cell")))
                })
                .collect::<Result<Vec<_>>>()?,
            None => {
                let xmax = normals.iter().map(|&i| self.cells[i].center[0]).fold(f64::NEG_INFINITY, f64::max);
                (0..n).filter(|&a| (self.cells[normals[a]].center[0] - xmax).abs() < 1e-9).collect()
            }
        };
        let labels = normals.iter().map(|&i| self.cells[i].label.clone()).collect();
        QcaNetwork::new(self.name.clone(), labels, kink, drivers, outputs)
    }
}

fn normal(label: &str, center: [f64; 2]) -> CellRecord {
    CellRecord { label: label.into(), center, dot_offsets: None, kind: CellKindRecord::Normal, polarization: None }
}

fn driver(label: &str, center: [f64; 2], p: f64) -> CellRecord {
    CellRecord {
        label: label.into(),
        center,
        dot_offsets: None,
        kind: CellKindRecord::Driver,
        polarization: Some(p),
    }
}

pub fn device_file(spec: &DeviceSpec) -> Result<DeviceFile> {
    Ok(match spec {
        DeviceSpec::Wire(0) => return Err(Error::InvalidParameter("wire length must be at least 1".into())),
        DeviceSpec::Wire(n) => DeviceFile::wire(*n),
        DeviceSpec::Inverter => DeviceFile::inverter(),
        DeviceSpec::Majority(b) => DeviceFile::majority(*b),
        DeviceSpec::File(p) => DeviceFile::load(p)?,
    })
}

pub fn build_device<T: Real>(spec: &DeviceSpec) -> Result<QcaNetwork<T>> {
    device_file(spec)?.build()
}
