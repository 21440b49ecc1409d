//! CSV tables. Every float column is written twice: rounded to four
//! significant digits under its own name, and exactly under `<name>_full`.

use std::io::{Read, Write};

use o3flow::benchmarks::{NewtonianComparison, NewtonianPoint, StudyRow, SweepPoint, TimingRow};

pub type TableResult<T> = Result<T, Box<dyn std::error::Error>>;

/// Four significant digits, fixed notation for moderate magnitudes.
pub fn sig4(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.3e}");
    let exp: i32 = sci.split('e').nth(1).unwrap().parse().unwrap();
    if (-3..4).contains(&exp) {
        format!("{:.*}", (3 - exp) as usize, x)
    } else {
        sci
    }
}

/// Shortest representation that parses back to the same value.
fn full(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>, f: fn(f64) -> String) -> String {
    x.map(f).unwrap_or_default()
}

fn parse_f64(s: &str) -> TableResult<f64> {
    Ok(s.trim().parse()?)
}

fn parse_opt(s: &str) -> TableResult<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(s).map(Some)
    }
}

/// Header of a table whose float columns are `floats` and whose remaining
/// columns are `plain`, in display order followed by the `_full` columns.
fn header(floats: &[&str], plain: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = floats.iter().chain(plain).map(|s| s.to_string()).collect();
    h.extend(floats.iter().map(|s| format!("{s}_full")));
    h
}

fn write_table<W: Write>(out: W, header: Vec<String>, rows: Vec<Vec<String>>) -> TableResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a table back as records indexed by column name.
struct Records {
    header: Vec<String>,
    rows: Vec<csv::StringRecord>,
}

impl Records {
    fn read<R: Read>(input: R) -> TableResult<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.iter().map(String::from).collect();
        let rows = r.records().collect::<Result<Vec<_>, _>>()?;
        Ok(Records { header, rows })
    }

    fn col(&self, name: &str) -> TableResult<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| format!("column {name:?} missing").into())
    }

    fn get<'a>(&self, row: &'a csv::StringRecord, name: &str) -> TableResult<&'a str> {
        Ok(row.get(self.col(name)?).unwrap_or(""))
    }
}

fn parse_bool(s: &str) -> TableResult<bool> {
    Ok(s.trim().parse()?)
}

const STUDY_FLOATS: [&str; 7] = [
    "h",
    "l2_err_u",
    "l2_rate_u",
    "h1_err_u",
    "h1_rate_u",
    "l2_err_p",
    "l2_rate_p",
];

pub fn write_study<W: Write>(out: W, rows: &[StudyRow]) -> TableResult<()> {
    let body = rows
        .iter()
        .map(|r| {
            let vals = [
                Some(r.h),
                Some(r.l2_err_u),
                r.l2_rate_u,
                Some(r.h1_err_u),
                r.h1_rate_u,
                Some(r.l2_err_p),
                r.l2_rate_p,
            ];
            let mut rec: Vec<String> = vals.iter().map(|v| opt(*v, sig4)).collect();
            rec.push(r.converged.to_string());
            rec.extend(vals.iter().map(|v| opt(*v, full)));
            rec
        })
        .collect();
    write_table(out, header(&STUDY_FLOATS, &["converged"]), body)
}

pub fn read_study<R: Read>(input: R) -> TableResult<Vec<StudyRow>> {
    let t = Records::read(input)?;
    let f = |row, name: &str| -> TableResult<Option<f64>> { parse_opt(t.get(row, &format!("{name}_full"))?) };
    let req = |row, name: &str| -> TableResult<f64> { f(row, name)?.ok_or_else(|| format!("{name} is empty").into()) };
    t.rows
        .iter()
        .map(|row| {
            Ok(StudyRow {
                h: req(row, "h")?,
                l2_err_u: req(row, "l2_err_u")?,
                l2_rate_u: f(row, "l2_rate_u")?,
                h1_err_u: req(row, "h1_err_u")?,
                h1_rate_u: f(row, "h1_rate_u")?,
                l2_err_p: req(row, "l2_err_p")?,
                l2_rate_p: f(row, "l2_rate_p")?,
                converged: parse_bool(t.get(row, "converged")?)?,
            })
        })
        .collect()
}

const SWEEP_FLOATS: [&str; 4] = ["wi", "lambda1", "final_residual", "seconds"];

pub fn write_sweep<W: Write>(out: W, points: &[SweepPoint]) -> TableResult<()> {
    let body = points
        .iter()
        .map(|p| {
            let vals = [p.wi, p.lambda1, p.final_residual, p.seconds];
            let mut rec: Vec<String> = vals.iter().map(|v| sig4(*v)).collect();
            rec.push(p.converged.to_string());
            rec.push(p.iterations.to_string());
            rec.push(p.note.clone().unwrap_or_default());
            rec.extend(vals.iter().map(|v| full(*v)));
            rec
        })
        .collect();
    write_table(out, header(&SWEEP_FLOATS, &["converged", "iterations", "note"]), body)
}

pub fn read_sweep<R: Read>(input: R) -> TableResult<Vec<SweepPoint>> {
    let t = Records::read(input)?;
    t.rows
        .iter()
        .map(|row| {
            let f = |name: &str| parse_f64(t.get(row, &format!("{name}_full"))?);
            let note = t.get(row, "note")?;
            Ok(SweepPoint {
                wi: f("wi")?,
                lambda1: f("lambda1")?,
                converged: parse_bool(t.get(row, "converged")?)?,
                iterations: t.get(row, "iterations")?.trim().parse()?,
                final_residual: f("final_residual")?,
                seconds: f("seconds")?,
                note: (!note.is_empty()).then(|| note.to_string()),
            })
        })
        .collect()
}

const NEWTONIAN_FLOATS: [&str; 2] = ["lambda1", "h1_difference"];

pub fn write_newtonian<W: Write>(out: W, points: &[NewtonianPoint]) -> TableResult<()> {
    let body = points
        .iter()
        .map(|p| {
            let vals = [p.lambda1, p.h1_difference];
            let mut rec: Vec<String> = vals.iter().map(|v| sig4(*v)).collect();
            rec.push(p.converged.to_string());
            rec.push(p.note.clone().unwrap_or_default());
            rec.extend(vals.iter().map(|v| full(*v)));
            rec
        })
        .collect();
    write_table(out, header(&NEWTONIAN_FLOATS, &["converged", "note"]), body)
}

pub fn read_newtonian<R: Read>(input: R) -> TableResult<Vec<NewtonianPoint>> {
    let t = Records::read(input)?;
    t.rows
        .iter()
        .map(|row| {
            let note = t.get(row, "note")?;
            Ok(NewtonianPoint {
                lambda1: parse_f64(t.get(row, "lambda1_full")?)?,
                h1_difference: parse_f64(t.get(row, "h1_difference_full")?)?,
                converged: parse_bool(t.get(row, "converged")?)?,
                note: (!note.is_empty()).then(|| note.to_string()),
            })
        })
        .collect()
}

/// One-row summary of a Newtonian comparison.
pub fn write_slope<W: Write>(out: W, c: &NewtonianComparison) -> TableResult<()> {
    let n = c.points.iter().filter(|p| p.converged && p.lambda1 > 0.0).count();
    write_table(
        out,
        header(&["slope"], &["fitted_points"]),
        vec![vec![opt(c.slope, sig4), n.to_string(), opt(c.slope, full)]],
    )
}

pub fn read_slope<R: Read>(input: R) -> TableResult<Option<f64>> {
    let t = Records::read(input)?;
    let row = t.rows.first().ok_or("empty slope table")?;
    parse_opt(t.get(row, "slope_full")?)
}

const TIMING_FLOATS: [&str; 6] = ["h", "srtd_mean", "srtd_std", "evss_mean", "evss_std", "ratio"];

pub fn write_timing<W: Write>(out: W, rows: &[TimingRow]) -> TableResult<()> {
    let body = rows
        .iter()
        .map(|r| {
            let ((sm, ss), (em, es)) = (r.srtd(), r.evss());
            let vals = [r.h, sm, ss, em, es, r.ratio()];
            let mut rec: Vec<String> = vals.iter().map(|v| sig4(*v)).collect();
            rec.push(r.converged.to_string());
            rec.push(r.srtd_seconds.len().min(r.evss_seconds.len()).to_string());
            rec.extend(vals.iter().map(|v| full(*v)));
            rec
        })
        .collect();
    write_table(out, header(&TIMING_FLOATS, &["converged", "repeats"]), body)
}

/// Per-iteration residuals; `increments` may be empty.
pub fn write_history<W: Write>(out: W, residuals: &[f64], increments: &[f64]) -> TableResult<()> {
    let with_inc = !increments.is_empty();
    let floats: &[&str] = if with_inc {
        &["residual", "increment"]
    } else {
        &["residual"]
    };
    let body = residuals
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let vals: Vec<f64> = if with_inc { vec![r, increments[i]] } else { vec![r] };
            let mut rec: Vec<String> = vals.iter().map(|v| sig4(*v)).collect();
            rec.push((i + 1).to_string());
            rec.extend(vals.iter().map(|v| full(*v)));
            rec
        })
        .collect();
    write_table(out, header(floats, &["iteration"]), body)
}
