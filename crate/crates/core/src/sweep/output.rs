//! CSV tables with C-style `%.10e` numbers.

use std::fmt::Write as _;

use super::contour::Contour;
use super::frequency::{FrequencySweep, GammaMax};
use super::map::Map2d;
use super::scaling::WireScaling;

/// `printf("%.10e", x)`: ten fraction digits, signed two-digit exponent.
pub fn fmt_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.10e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::Num(x.unwrap_or(f64::NAN))
    }
}

#[derive(Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => fmt_sci(*x),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

fn status(g: Option<&GammaMax>) -> String {
    g.map_or("na".into(), |g| serde_json::to_value(g.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
}

impl FrequencySweep {
    /// One row per (dissipation, Γ) point.
    pub fn points_table(&self) -> Table {
        let mut t = Table::new(&["dissipation", "gamma", "delta", "q_a", "q_cl", "q_l", "error"]);
        for run in &self.runs {
            for p in &run.points {
                t.push(vec![
                    run.dissipation.clone().into(),
                    p.gamma.into(),
                    p.delta.into(),
                    p.q_a.into(),
                    p.q_cl.into(),
                    p.q_l.into(),
                    p.error.clone().unwrap_or_default().into(),
                ]);
            }
        }
        t
    }

    /// Γ_max and Γ_max/4 per dissipation and metric.
    pub fn summary_table(&self) -> Table {
        let mut t = Table::new(&["dissipation", "metric", "status", "gamma_max", "operating"]);
        for run in &self.runs {
            for m in super::Metric::ALL {
                let g = run.gamma_max.get(m);
                t.push(vec![
                    run.dissipation.clone().into(),
                    m.name().into(),
                    status(g).into(),
                    g.and_then(|g| g.gamma_max).into(),
                    g.and_then(|g| g.operating).into(),
                ]);
            }
        }
        t
    }
}

impl Map2d {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["dissipation", "gamma", "delta", "q_a", "q_cl", "q_l", "diagonal", "error"]);
        for run in &self.runs {
            for (p, &diag) in run.points.iter().zip(&run.on_diagonal) {
                t.push(vec![
                    run.dissipation.clone().into(),
                    p.gamma.into(),
                    p.delta.into(),
                    p.q_a.into(),
                    p.q_cl.into(),
                    p.q_l.into(),
                    usize::from(diag).into(),
                    p.error.clone().unwrap_or_default().into(),
                ]);
            }
        }
        t
    }
}

impl Contour {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["dissipation", "delta", "gamma_max", "status", "segment"]);
        for run in &self.runs {
            t.push(vec![
                run.dissipation.clone().into(),
                0.0.into(),
                run.coherent.gamma_max.into(),
                status(Some(&run.coherent)).into(),
                0usize.into(),
            ]);
            for p in &run.points {
                let st = serde_json::to_value(p.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                t.push(vec![run.dissipation.clone().into(), p.delta.into(), p.gamma_max.into(), st.into(), p.segment.into()]);
            }
        }
        t
    }
}

impl WireScaling {
    /// Γ_max per (schedule, N), then one fit row per schedule with N = 0.
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["schedule", "n", "gamma_max", "nu", "nu_std_error", "nu1"]);
        for row in &self.rows {
            for (n, g) in &row.gamma_max {
                t.push(vec![row.schedule.short_name().into(), (*n).into(), g.gamma_max.into(), f64::NAN.into(), f64::NAN.into(), row.nu1.into()]);
            }
            t.push(vec![
                row.schedule.short_name().into(),
                0usize.into(),
                f64::NAN.into(),
                row.fit.as_ref().map(|f| f.nu).into(),
                row.fit.as_ref().map(|f| f.std_error).into(),
                row.nu1.into(),
            ]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponents() {
        assert_eq!(fmt_sci(1.5e-3), "1.5000000000e-03");
        assert_eq!(fmt_sci(0.0), "0.0000000000e+00");
        assert_eq!(fmt_sci(-2.0e120), "-2.0000000000e+120");
        assert_eq!(fmt_sci(12345.678), "1.2345678000e+04");
        assert_eq!(fmt_sci(f64::NAN), "nan");
    }

    #[test]
    fn csv_quoting() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Text("x,y".into()), 1.0.into()]);
        assert_eq!(t.to_csv(), "a,b\n\"x,y\",1.0000000000e+00\n");
    }
}
