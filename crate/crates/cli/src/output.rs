use std::io::Write;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Round-trip safe rendering with 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyRecord {
    pub geometry: String,
    pub model: String,
    pub z: f64,
    pub energy: f64,
    pub tail_bound: f64,
    pub terms_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_joule: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct SweepRecord {
    pub ell: f64,
    pub model: String,
    pub E_exact: Option<f64>,
    pub E_expansion: Option<f64>,
    pub E_pfa: Option<f64>,
    pub F_exact: Option<f64>,
    pub beta: Option<f64>,
    pub tail_bound: Option<f64>,
    pub terms_used: Option<usize>,
    pub status: String,
}

pub const SWEEP_HEADER: [&str; 10] = [
    "ell",
    "model",
    "E_exact",
    "E_expansion",
    "E_pfa",
    "F_exact",
    "beta",
    "tail_bound",
    "terms_used",
    "status",
];

#[derive(Debug, Clone, Serialize)]
pub struct ConstantRecord {
    pub name: String,
    pub published: Option<f64>,
    pub computed: f64,
    pub fitted: Option<f64>,
    /// `|computed - published|`, or `|fitted - published|` when a fit exists.
    pub deviation: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn json_lines<T: Serialize>(out: &mut impl Write, rows: &[T]) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, rows)?;
    writeln!(out)
}

pub fn write_energy(
    out: &mut impl Write,
    rec: &EnergyRecord,
    format: Format,
) -> std::io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rec)?;
            writeln!(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec![
                "geometry",
                "model",
                "z",
                "energy",
                "tail_bound",
                "terms_used",
            ];
            let mut row = vec![
                rec.geometry.clone(),
                rec.model.clone(),
                float(rec.z),
                float(rec.energy),
                float(rec.tail_bound),
                rec.terms_used.to_string(),
            ];
            if let Some(j) = rec.energy_joule {
                header.push("energy_J");
                row.push(float(j));
            }
            w.write_record(&header)?;
            w.write_record(&row)?;
            w.flush()
        }
    }
}

pub fn write_sweep(
    out: &mut impl Write,
    rows: &[SweepRecord],
    format: Format,
) -> std::io::Result<()> {
    match format {
        Format::Json => json_lines(out, rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(SWEEP_HEADER)?;
            for r in rows {
                w.write_record([
                    float(r.ell),
                    r.model.clone(),
                    opt_float(r.E_exact),
                    opt_float(r.E_expansion),
                    opt_float(r.E_pfa),
                    opt_float(r.F_exact),
                    opt_float(r.beta),
                    opt_float(r.tail_bound),
                    r.terms_used.map(|n| n.to_string()).unwrap_or_default(),
                    r.status.clone(),
                ])?;
            }
            w.flush()
        }
    }
}

pub fn write_constants(
    out: &mut impl Write,
    rows: &[ConstantRecord],
    format: Format,
) -> std::io::Result<()> {
    match format {
        Format::Json => json_lines(out, rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["name", "published", "computed", "fitted", "deviation"])?;
            for r in rows {
                w.write_record([
                    r.name.clone(),
                    opt_float(r.published),
                    float(r.computed),
                    opt_float(r.fitted),
                    opt_float(r.deviation),
                ])?;
            }
            w.flush()
        }
    }
}

pub fn write_checks(
    out: &mut impl Write,
    rows: &[CheckRecord],
    format: Format,
) -> std::io::Result<()> {
    match format {
        Format::Json => json_lines(out, rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["check", "status", "detail"])?;
            for r in rows {
                let status = if r.passed { "PASS" } else { "FAIL" };
                w.write_record([r.name.as_str(), status, r.detail.as_str()])?;
            }
            w.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23] {
            let s = float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn sweep_csv_layout() {
        let row = SweepRecord {
            ell: 1.0,
            model: "drude".into(),
            E_exact: Some(-0.5),
            E_expansion: None,
            E_pfa: Some(-0.15),
            F_exact: Some(-0.2),
            beta: Some(-0.1),
            tail_bound: Some(1e-13),
            terms_used: Some(12),
            status: "expansion: out of range".into(),
        };
        let mut buf = Vec::new();
        write_sweep(&mut buf, &[row], Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_HEADER.join(","));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 10);
        assert_eq!(fields[3], "");
        assert_eq!(fields[8], "12");
    }
}
