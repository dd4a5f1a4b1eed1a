//! CSV encodings of trajectories and paths.
//!
//! Flow trajectories: `s,x1..xn,J,speed`, one row per breakpoint, `speed`
//! being `|w'_+(s)|`. Paths: `t,x1..xn,J,stable`, one row per knot; a jump
//! is two rows with the same `t` (left limit first). A finite horizon past
//! the last knot is a final row repeating the terminal value.

use std::path::Path;

use rateflow::energy::{is_stable, EnergyFunctional};
use rateflow::eris::{ErisPath, Interpolation, Knot};
use rateflow::gsflow::{GsTrajectory, Method};
use rateflow::{Space, SpaceVec};

use crate::exit::CliError;

/// Which object a CSV file holds, read from its first header field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvKind {
    Flow,
    Path,
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn header(time: &str, dim: usize, tail: &str) -> Vec<String> {
    let mut h = vec![time.to_string()];
    h.extend((1..=dim).map(|i| format!("x{i}")));
    h.push("J".into());
    h.push(tail.into());
    h
}

fn write_rows(path: &Path, header: Vec<String>, rows: Vec<Vec<String>>) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Solver(anyhow::anyhow!("writing {}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Solver(e.into()))?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(io)?;
    w.write_record(&header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Solver(e.into()))
}

fn row(time: f64, u: &SpaceVec, j: &dyn EnergyFunctional, last: String) -> Vec<String> {
    let mut r = vec![fmt_f64(time)];
    r.extend(u.coords().iter().map(|&x| fmt_f64(x)));
    r.push(fmt_f64(j.value(u)));
    r.push(last);
    r
}

pub fn write_flow(path: &Path, traj: &GsTrajectory, j: &dyn EnergyFunctional) -> Result<(), CliError> {
    let rows = traj
        .times()
        .iter()
        .zip(traj.values())
        .map(|(&s, u)| row(s, u, j, fmt_f64(traj.right_derivative(s).norm())))
        .collect();
    write_rows(path, header("s", traj.space().dim(), "speed"), rows)
}

pub fn write_path(path: &Path, p: &ErisPath, j: &dyn EnergyFunctional) -> Result<(), CliError> {
    let stable = |u: &SpaceVec, t: f64| if is_stable(j, u, t) { "1" } else { "0" }.to_string();
    let mut rows = Vec::new();
    for k in p.knots() {
        if k.is_jump() {
            rows.push(row(k.t, &k.left, j, stable(&k.left, k.t)));
        }
        rows.push(row(k.t, &k.right, j, stable(&k.right, k.t)));
    }
    if p.horizon().is_finite() && p.horizon() > p.last_knot_time() {
        let u = p.terminal();
        rows.push(row(p.horizon(), u, j, stable(u, p.horizon())));
    }
    write_rows(path, header("t", p.space().dim(), "stable"), rows)
}

struct Table {
    kind: CsvKind,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
    last: Vec<f64>,
}

fn malformed(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::config(format!("malformed file {}: {msg}", path.display()))
}

fn read_table(path: &Path, dim: usize) -> Result<Table, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| malformed(path, e))?;
    let h: Vec<String> = r.headers().map_err(|e| malformed(path, e))?.iter().map(str::to_string).collect();
    let kind = match h.first().map(String::as_str) {
        Some("s") => CsvKind::Flow,
        Some("t") => CsvKind::Path,
        _ => return Err(malformed(path, "first column must be `s` or `t`")),
    };
    let tail = if kind == CsvKind::Flow { "speed" } else { "stable" };
    let time = if kind == CsvKind::Flow { "s" } else { "t" };
    if h != header(time, dim, tail) {
        return Err(malformed(path, format!("expected header {}", header(time, dim, tail).join(","))));
    }
    let mut t = Table { kind, times: Vec::new(), values: Vec::new(), last: Vec::new() };
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| malformed(path, e))?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| malformed(path, format!("row {}: {e}", line + 2)))?;
        if nums[..=dim].iter().any(|x| !x.is_finite()) {
            return Err(malformed(path, format!("row {}: non-finite entry", line + 2)));
        }
        t.times.push(nums[0]);
        t.values.push(nums[1..=dim].to_vec());
        t.last.push(nums[dim + 2]);
    }
    if t.times.is_empty() {
        return Err(malformed(path, "no data rows"));
    }
    if t.times[0] != 0.0 && kind == CsvKind::Path {
        return Err(malformed(path, "a path must start at t = 0"));
    }
    Ok(t)
}

/// Reads the first header field only.
pub fn sniff(path: &Path) -> Result<CsvKind, CliError> {
    let mut r = csv::ReaderBuilder::new().from_path(path).map_err(|e| malformed(path, e))?;
    match r.headers().map_err(|e| malformed(path, e))?.get(0) {
        Some("s") => Ok(CsvKind::Flow),
        Some("t") => Ok(CsvKind::Path),
        _ => Err(malformed(path, "first column must be `s` or `t`")),
    }
}

fn vectors(space: &Space, rows: Vec<Vec<f64>>) -> Result<Vec<SpaceVec>, CliError> {
    rows.into_iter().map(|c| space.vec(c).map_err(|e| CliError::Config(e.into()))).collect()
}

pub fn read_flow(path: &Path, space: &Space) -> Result<GsTrajectory, CliError> {
    let t = read_table(path, space.dim())?;
    if t.kind != CsvKind::Flow {
        return Err(malformed(path, "expected a flow trajectory (`s` column)"));
    }
    if t.times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(malformed(path, "flow times must be strictly increasing"));
    }
    let at_rest = *t.last.last().unwrap() == 0.0;
    let values = vectors(space, t.values)?;
    Ok(GsTrajectory::sampled(t.times, values, Method::Imported, None, at_rest))
}

pub fn read_path(path: &Path, space: &Space) -> Result<ErisPath, CliError> {
    let t = read_table(path, space.dim())?;
    if t.kind != CsvKind::Path {
        return Err(malformed(path, "expected a path (`t` column)"));
    }
    let values = vectors(space, t.values)?;
    let mut knots: Vec<Knot> = Vec::new();
    let mut i = 0;
    while i < t.times.len() {
        if i + 1 < t.times.len() && t.times[i + 1] == t.times[i] {
            if i + 2 < t.times.len() && t.times[i + 2] == t.times[i] {
                return Err(malformed(path, format!("more than two rows at t = {}", t.times[i])));
            }
            knots.push(Knot { t: t.times[i], left: values[i].clone(), right: values[i + 1].clone() });
            i += 2;
        } else {
            knots.push(Knot::continuous(t.times[i], values[i].clone()));
            i += 1;
        }
    }
    let mut horizon = f64::INFINITY;
    if knots.len() > 1 {
        let n = knots.len();
        let last = &knots[n - 1];
        if !last.is_jump() && last.right == knots[n - 2].right {
            horizon = last.t;
            knots.pop();
        }
    }
    let constant = knots.windows(2).all(|w| w[0].right == w[1].left);
    let interp = if constant { Interpolation::PiecewiseConstant } else { Interpolation::PiecewiseLinear };
    let p = ErisPath::new(knots, interp).map_err(|e| malformed(path, e))?;
    p.with_horizon(horizon).map_err(|e| malformed(path, e))
}
