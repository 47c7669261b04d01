//! CSV tables with fixed headers; reals carry 12 significant digits.

use std::io;
use std::path::Path;

use qrdyn_core::{
    CommutationReport, CompositionSample, DilatationEstimate, GrowthProfile, PitsReport, RickmanBoundReport, Vector,
};
use qrdyn_core::growth::RatioSample;

/// `%.12g`: shortest of fixed or scientific notation, trailing zeros dropped.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    trim_zeros(&format!("{x:.*}", (11 - exp) as usize)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header plus rows of preformatted cells.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }

    pub fn to_string(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8")
    }
}

fn coords(x: Vector, dim: usize) -> Vec<String> {
    x.0[..dim].iter().map(|&c| fmt_real(c)).collect()
}

fn point_header(dim: usize) -> &'static [&'static str] {
    if dim == 2 {
        &["x", "y"]
    } else {
        &["x", "y", "z"]
    }
}

pub fn growth_table(p: &GrowthProfile) -> Table {
    let mut t = Table::new(&["r", "M"]);
    for s in &p.samples {
        t.push(vec![fmt_real(s.r), fmt_real(s.m)]);
    }
    t
}

pub fn ratio_table(ratios: &[RatioSample]) -> Table {
    let mut t = Table::new(&["r", "ratio", "log_ratio"]);
    for s in ratios {
        t.push(vec![fmt_real(s.r), fmt_real(s.ratio), fmt_real(s.log_ratio)]);
    }
    t
}

pub fn composition_table(c: &[CompositionSample]) -> Table {
    let mut t = Table::new(&["r", "c_hat"]);
    for s in c {
        t.push(vec![fmt_real(s.r), fmt_real(s.c_hat)]);
    }
    t
}

pub fn rickman_table(r: &RickmanBoundReport) -> Table {
    let mut t = Table::new(&["deg", "k_i", "k_o", "n1", "n2", "fitted_a", "fitted_b", "pass"]);
    t.push(vec![
        r.deg.to_string(),
        fmt_real(r.k_i),
        fmt_real(r.k_o),
        fmt_real(r.n1),
        fmt_real(r.n2),
        fmt_real(r.fitted_a),
        fmt_real(r.fitted_b),
        r.pass.to_string(),
    ]);
    t
}

pub fn commutation_table(r: &CommutationReport) -> Table {
    let mut t = Table::new(&["sample_count", "rejected", "max_residual", "mean_residual"]);
    t.push(vec![
        r.sample_count.to_string(),
        r.rejected.to_string(),
        fmt_real(r.max_residual),
        fmt_real(r.mean_residual),
    ]);
    t
}

/// Low cells (`cells`), cover centres and the scalar summary row.
pub fn pits_tables(r: &PitsReport, dim: usize) -> (Table, Table, Table) {
    let mut cells = Table::new(point_header(dim));
    for &c in &r.low_cells {
        cells.push(coords(c, dim));
    }
    let mut centers = Table::new(point_header(dim));
    for &c in &r.cover_centers {
        centers.push(coords(c, dim));
    }
    let mut summary = Table::new(&["r", "lambda", "alpha", "epsilon", "grid_density", "low_cell_count", "cover_count"]);
    summary.push(vec![
        fmt_real(r.r),
        fmt_real(r.lambda),
        fmt_real(r.alpha),
        fmt_real(r.epsilon),
        r.grid_density.to_string(),
        r.low_cell_count.to_string(),
        r.cover_count.to_string(),
    ]);
    (cells, centers, summary)
}

pub fn dilatation_table(e: &DilatationEstimate, dim: usize) -> Table {
    let mut header = point_header(dim).to_vec();
    header.extend(["sigma_max", "sigma_min", "jac_det", "k_o", "k_i"]);
    let mut t = Table::new(&header);
    for s in &e.samples {
        let mut row = coords(s.point, dim);
        row.extend([s.sigma_max, s.sigma_min, s.jac_det, s.k_o, s.k_i].map(fmt_real));
        t.push(row);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_real(1.0), "1");
        assert_eq!(fmt_real(4.0), "4");
        assert_eq!(fmt_real(-0.5), "-0.5");
        assert_eq!(fmt_real(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_real(123456789012.0), "123456789012");
        assert_eq!(fmt_real(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt_real(2.5e-7), "2.5e-07");
        assert_eq!(fmt_real(1e-5), "1e-05");
        assert_eq!(fmt_real(0.0001), "0.0001");
        assert_eq!(fmt_real(f64::INFINITY), "inf");
        assert_eq!(fmt_real(9.9999999999999e5), "1000000");
    }

    #[test]
    fn growth_csv_lines() {
        let p = GrowthProfile {
            map_id: "power(n=2)".into(),
            samples: vec![
                qrdyn_core::GrowthSample { r: 1.0, m: 1.0, log_m: 0.0 },
                qrdyn_core::GrowthSample { r: 2.0, m: 4.0, log_m: 4f64.ln() },
            ],
            sphere_samples: 4096,
        };
        assert_eq!(growth_table(&p).to_string(), "r,M\n1,1\n2,4\n");
    }

    #[test]
    fn empty_pits_report() {
        let r = PitsReport {
            r: 10.0,
            lambda: 2.0,
            alpha: 1.5,
            epsilon: 0.1,
            grid_density: 64,
            low_cell_count: 0,
            cover_count: 0,
            low_cells: vec![],
            cover_centers: vec![],
        };
        let (cells, centers, summary) = pits_tables(&r, 2);
        assert_eq!(cells.to_string(), "x,y\n");
        assert_eq!(centers.to_string(), "x,y\n");
        assert_eq!(summary.to_string(), "r,lambda,alpha,epsilon,grid_density,low_cell_count,cover_count\n10,2,1.5,0.1,64,0,0\n");
    }

    #[test]
    fn commutation_row() {
        let r = CommutationReport { sample_count: 10, rejected: 1, max_residual: 0.25, mean_residual: 0.125, argmax: Vector::ZERO };
        let text = commutation_table(&r).to_string();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().nth(1), Some("10,1,0.25,0.125"));
    }
}
