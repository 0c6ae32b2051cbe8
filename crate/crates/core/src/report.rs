//! Deterministic CSV/JSON serialization of every report type.
//!
//! Floats are written with 12 significant digits in both formats, struct
//! fields keep declaration order and maps are sorted, so identical inputs
//! produce byte-identical files.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::basins::{BasinReport, SweepReport};
use crate::cycles::CycleCensus;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::game::DominanceReport;
use crate::metrics::AnnotatedTrajectory;
use crate::stability::FixedPointReport;

/// Output encoding of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown format {other:?}, expected \"csv\" or \"json\""
            ))),
        }
    }
}

/// Any serializable engine output.
#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Trajectory(&'a Trajectory),
    AnnotatedTrajectory(&'a AnnotatedTrajectory),
    FixedPoints(&'a [FixedPointReport]),
    Basin(&'a BasinReport),
    Sweep(&'a SweepReport),
    Census(&'a CycleCensus),
    Dominance(&'a DominanceReport),
}

/// Formats a float with 12 significant digits (`%.12g`-style): positional
/// for moderate exponents, scientific otherwise, trailing zeros trimmed.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".to_string()
        } else if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let formatted = format!("{:.11e}", v);
    let (mantissa, exp) = formatted.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("numeric exponent");
    let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');

    if !(-4..12).contains(&exp) {
        return format!("{mantissa}e{exp}");
    }

    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = digits.chars().filter(|c| *c != '.').collect();
    let point = exp + 1; // decimal point position within the digit string

    let mut out = String::from(sign);
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..-point {
            out.push('0');
        }
        out.push_str(&digits);
    } else if (point as usize) >= digits.len() {
        out.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    out
}

// ---------------------------------------------------------------------------
// JSON: serde_json with 12-significant-digit floats and pretty indentation
// ---------------------------------------------------------------------------

struct SigFigFormatter {
    pretty: serde_json::ser::PrettyFormatter<'static>,
}

impl SigFigFormatter {
    fn new() -> Self {
        SigFigFormatter {
            pretty: serde_json::ser::PrettyFormatter::new(),
        }
    }
}

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        writer.write_all(fmt_float(value as f64).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter::new());
    value.serialize(&mut serializer).expect("in-memory JSON serialization");
    out.push(b'\n');
    out
}

/// Real/imaginary pair of one eigenvalue in reports.
#[derive(Serialize)]
struct EigenPair {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct FixedPointJson<'a> {
    location: [f64; 3],
    kind: &'a crate::stability::PointKind,
    eigenvalues: [EigenPair; 3],
    classification: &'a crate::stability::Stability,
    label: &'a Option<String>,
}

fn fixed_points_json(points: &[FixedPointReport]) -> Vec<u8> {
    let view: Vec<FixedPointJson> = points
        .iter()
        .map(|p| FixedPointJson {
            location: p.location.as_array(),
            kind: &p.kind,
            eigenvalues: p.eigenvalues.map(|e| EigenPair { re: e.re, im: e.im }),
            classification: &p.classification,
            label: &p.label,
        })
        .collect();
    to_json(&view)
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    scenario: &'a str,
    params: &'a crate::game::GameParameters,
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

fn trajectory_rows(traj: &Trajectory) -> Vec<Vec<f64>> {
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| vec![t, s.x1, 1.0 - s.x1, s.yg1, 1.0 - s.yg1, s.yb1, 1.0 - s.yb1])
        .collect()
}

fn annotated_rows(ann: &AnnotatedTrajectory) -> Vec<Vec<f64>> {
    ann.samples
        .iter()
        .map(|s| {
            vec![
                s.t,
                s.state.x1,
                1.0 - s.state.x1,
                s.state.yg1,
                1.0 - s.state.yg1,
                s.state.yb1,
                1.0 - s.state.yb1,
                s.frequencies.tp,
                s.frequencies.tn,
                s.frequencies.fp,
                s.frequencies.fn_,
                s.social_cost,
            ]
        })
        .collect()
}

const TRAJECTORY_COLUMNS: [&str; 7] = ["t", "x1", "x2", "yG1", "yG2", "yB1", "yB2"];
const METRIC_COLUMNS: [&str; 5] = ["tp", "tn", "fp", "fn", "social_cost"];

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

fn csv_rows(columns: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut out = Vec::new();
    writeln!(out, "{}", columns.join(",")).expect("in-memory write");
    for row in rows {
        writeln!(out, "{}", row.join(",")).expect("in-memory write");
    }
    out
}

fn trajectory_csv(traj: &Trajectory) -> Vec<u8> {
    csv_rows(
        &TRAJECTORY_COLUMNS,
        trajectory_rows(traj)
            .into_iter()
            .map(|row| row.into_iter().map(fmt_float).collect()),
    )
}

fn annotated_csv(ann: &AnnotatedTrajectory) -> Vec<u8> {
    let columns: Vec<&str> = TRAJECTORY_COLUMNS.iter().chain(METRIC_COLUMNS.iter()).copied().collect();
    csv_rows(
        &columns,
        annotated_rows(ann)
            .into_iter()
            .map(|row| row.into_iter().map(fmt_float).collect()),
    )
}

fn fixed_points_csv(points: &[FixedPointReport]) -> Vec<u8> {
    let columns = [
        "label", "kind", "classification", "x1", "yG1", "yB1", "re1", "im1", "re2", "im2", "re3", "im3",
    ];
    csv_rows(
        &columns,
        points.iter().map(|p| {
            let mut row = vec![
                p.label.clone().unwrap_or_default(),
                serde_variant_name(&p.kind),
                serde_variant_name(&p.classification),
            ];
            row.extend(p.location.as_array().map(fmt_float));
            for e in &p.eigenvalues {
                row.push(fmt_float(e.re));
                row.push(fmt_float(e.im));
            }
            row
        }),
    )
}

fn serde_variant_name<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value)
        .expect("variant serializes")
        .trim_matches('"')
        .to_string()
}

fn basin_csv(report: &BasinReport) -> Vec<u8> {
    csv_rows(
        &["endpoint", "count", "fraction"],
        report
            .counts
            .iter()
            .map(|(k, &v)| vec![k.clone(), v.to_string(), fmt_float(report.fractions[k])]),
    )
}

fn sweep_csv(report: &SweepReport) -> Vec<u8> {
    let mut rows: Vec<Vec<String>> = Vec::new();
    for cell in &report.cells {
        if let Some(basin) = &cell.report {
            for (endpoint, fraction) in &basin.fractions {
                rows.push(vec![
                    fmt_float(cell.rho_over_lambda),
                    fmt_float(cell.r),
                    endpoint.clone(),
                    fmt_float(*fraction),
                ]);
            }
        }
    }
    csv_rows(&["rho_over_lambda", "r", "endpoint", "fraction"], rows.into_iter())
}

fn census_csv(census: &CycleCensus) -> Vec<u8> {
    let columns = [
        "index", "period", "avg_x1", "avg_yG1", "avg_yB1", "amp_x1", "amp_yG1", "amp_yB1", "center_distance",
    ];
    csv_rows(
        &columns,
        census.cycles.iter().enumerate().map(|(i, c)| {
            vec![
                i.to_string(),
                fmt_float(c.period),
                fmt_float(c.time_average.x1),
                fmt_float(c.time_average.yg1),
                fmt_float(c.time_average.yb1),
                fmt_float(c.amplitude[0]),
                fmt_float(c.amplitude[1]),
                fmt_float(c.amplitude[2]),
                c.center_distance.map(fmt_float).unwrap_or_default(),
            ]
        }),
    )
}

fn dominance_csv(report: &DominanceReport) -> Vec<u8> {
    csv_rows(
        &["scenario", "equal_vs_good", "dominated_vs_bad", "strict_entries"],
        std::iter::once(vec![
            report.scenario.clone(),
            report.equal_vs_good.to_string(),
            report.dominated_vs_bad.to_string(),
            report.strict_entries.to_string(),
        ]),
    )
}

/// Serializes a report to bytes. Identical inputs produce identical bytes.
pub fn render_report(report: &Report, format: ReportFormat) -> Vec<u8> {
    match (report, format) {
        (Report::Trajectory(t), ReportFormat::Csv) => trajectory_csv(t),
        (Report::Trajectory(t), ReportFormat::Json) => to_json(&TrajectoryJson {
            scenario: t.scenario.name(),
            params: &t.params,
            columns: TRAJECTORY_COLUMNS.to_vec(),
            rows: trajectory_rows(t),
        }),
        (Report::AnnotatedTrajectory(a), ReportFormat::Csv) => annotated_csv(a),
        (Report::AnnotatedTrajectory(a), ReportFormat::Json) => to_json(&TrajectoryJson {
            scenario: a.scenario.name(),
            params: &a.params,
            columns: TRAJECTORY_COLUMNS.iter().chain(METRIC_COLUMNS.iter()).copied().collect(),
            rows: annotated_rows(a),
        }),
        (Report::FixedPoints(p), ReportFormat::Csv) => fixed_points_csv(p),
        (Report::FixedPoints(p), ReportFormat::Json) => fixed_points_json(p),
        (Report::Basin(b), ReportFormat::Csv) => basin_csv(b),
        (Report::Basin(b), ReportFormat::Json) => to_json(b),
        (Report::Sweep(s), ReportFormat::Csv) => sweep_csv(s),
        (Report::Sweep(s), ReportFormat::Json) => to_json(s),
        (Report::Census(c), ReportFormat::Csv) => census_csv(c),
        (Report::Census(c), ReportFormat::Json) => to_json(c),
        (Report::Dominance(d), ReportFormat::Csv) => dominance_csv(d),
        (Report::Dominance(d), ReportFormat::Json) => to_json(d),
    }
}

/// Renders a report and writes it to `path`; I/O failures carry the path.
pub fn emit_report(report: &Report, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = render_report(report, format);
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, PopulationState};
    use crate::game::{GameParameters, Scenario};

    #[test]
    fn float_formatting_is_g_style_with_12_significant_digits() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(-0.15), "-0.15");
        assert_eq!(fmt_float(100.0), "100");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(5.0 / 6.0), "0.833333333333");
        assert_eq!(fmt_float(1e-5), "1e-5");
        assert_eq!(fmt_float(-1.23456789012e13), "-1.23456789012e13");
        assert_eq!(fmt_float(0.0001), "0.0001");
        assert_eq!(fmt_float(123456.789), "123456.789");
    }

    #[test]
    fn trajectory_csv_header_matches_the_interface_contract() {
        let s0 = PopulationState::new(0.5, 0.5, 0.5).unwrap();
        let traj = integrate(&s0, &Scenario::Baseline, &GameParameters::default(), 1.0, 0.01, 10).unwrap();
        let bytes = render_report(&Report::Trajectory(&traj), ReportFormat::Csv);
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.starts_with("t,x1,x2,yG1,yG2,yB1,yB2\n"), "{text}");

        let ann = crate::metrics::annotate_trajectory(&traj);
        let bytes = render_report(&Report::AnnotatedTrajectory(&ann), ReportFormat::Csv);
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.starts_with("t,x1,x2,yG1,yG2,yB1,yB2,tp,tn,fp,fn,social_cost\n"), "{text}");
    }

    #[test]
    fn rendering_twice_is_byte_identical() {
        let p = GameParameters::default();
        let basin = crate::basins::basin_sizes(&Scenario::Baseline, &p, 4, 50.0, 0.01).unwrap();
        let a = render_report(&Report::Basin(&basin), ReportFormat::Json);
        let b = render_report(&Report::Basin(&basin), ReportFormat::Json);
        assert_eq!(a, b);
        let a = render_report(&Report::Basin(&basin), ReportFormat::Csv);
        let b = render_report(&Report::Basin(&basin), ReportFormat::Csv);
        assert_eq!(a, b);
    }

    #[test]
    fn stability_json_exposes_re_im_pairs() {
        let points = crate::stability::enumerate_fixed_points(&Scenario::Baseline, &GameParameters::default());
        let bytes = render_report(&Report::FixedPoints(&points), ReportFormat::Json);
        let value: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        let first = &value.as_array().unwrap()[0];
        assert!(first["eigenvalues"][0]["re"].is_number());
        assert!(first["eigenvalues"][0]["im"].is_number());
        assert!(first["location"].is_array());
        assert!(first["classification"].is_string());
    }

    #[test]
    fn sweep_csv_has_one_row_per_ratio_rate_endpoint() {
        let p = GameParameters::default();
        let sweep =
            crate::basins::sweep_basins(&Scenario::Baseline, &p, &[0.2], &[1.0], 3, 50.0, 0.01).unwrap();
        let bytes = render_report(&Report::Sweep(&sweep), ReportFormat::Csv);
        let text = String::from_utf8(bytes).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "rho_over_lambda,r,endpoint,fraction");
        let endpoints = sweep.cells[0].report.as_ref().unwrap().fractions.len();
        assert_eq!(text.lines().count(), 1 + endpoints);
    }

    #[test]
    fn emit_report_writes_files_and_reports_io_errors_with_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("basin.json");
        let p = GameParameters::default();
        let basin = crate::basins::basin_sizes(&Scenario::Baseline, &p, 3, 50.0, 0.01).unwrap();
        emit_report(&Report::Basin(&basin), ReportFormat::Json, &path).unwrap();
        assert!(path.exists());

        let bad = dir.path().join("missing_dir").join("x.json");
        let err = emit_report(&Report::Basin(&basin), ReportFormat::Json, &bad).unwrap_err();
        assert!(err.to_string().contains("missing_dir"));
    }
}
