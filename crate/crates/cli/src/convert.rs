use std::path::{Path, PathBuf};

use rateflow::bridge::{eris_to_gs, gs_to_eris};
use rateflow::gsflow::sup_distance;
use rateflow::{tol, Error};
use serde::Serialize;

use crate::config::load_functional;
use crate::exit::{CliError, Outcome};
use crate::io;
use crate::run::{jump_records, write_json, JumpRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvertDirection {
    Gs2eris,
    Eris2gs,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvertReport {
    pub direction: ConvertDirection,
    pub input: PathBuf,
    pub output: PathBuf,
    pub roundtrip_residual: f64,
    pub jumps: Vec<JumpRecord>,
}

fn default_output(input: &Path, direction: ConvertDirection) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "converted".into());
    let suffix = match direction {
        ConvertDirection::Gs2eris => "eris",
        ConvertDirection::Eris2gs => "gs",
    };
    input.with_file_name(format!("{stem}.{suffix}.csv"))
}

/// Converts a trajectory file through the reparametrization bridge and
/// reports how far the image is from mapping back onto the input.
pub fn convert(
    input: &Path,
    direction: ConvertDirection,
    config: &Path,
    output: Option<&Path>,
) -> Result<Outcome, CliError> {
    let j = load_functional(config)?;
    let output = output.map(Path::to_path_buf).unwrap_or_else(|| default_output(input, direction));
    let (residual, jumps) = match direction {
        ConvertDirection::Gs2eris => {
            let traj = io::read_flow(input, j.space())?;
            let path = gs_to_eris(&traj).map_err(CliError::from_solver)?;
            io::write_path(&output, &path, j.as_ref())?;
            let back = eris_to_gs(&path, j.as_ref()).map_err(CliError::from_solver)?;
            (sup_distance(&traj, &back), jump_records(&path))
        }
        ConvertDirection::Eris2gs => {
            let path = io::read_path(input, j.space())?;
            let traj = match eris_to_gs(&path, j.as_ref()) {
                Ok(t) => t,
                Err(e @ Error::NotEnergetic { .. }) => {
                    eprintln!("FAIL input is not energetic: {e}");
                    return Ok(Outcome::ChecksFailed);
                }
                Err(e) => return Err(CliError::from_solver(e)),
            };
            io::write_flow(&output, &traj, j.as_ref())?;
            let back = gs_to_eris(&traj).map_err(CliError::from_solver)?;
            let horizon = if path.horizon().is_finite() {
                path.horizon()
            } else {
                2.0 * path.last_knot_time().max(back.last_knot_time()) + 1.0
            };
            (path.sup_distance(&back, horizon, tol::JUMP_GUARD), jump_records(&path))
        }
    };
    let report_path = output.with_extension("report.json");
    let report = ConvertReport { direction, input: input.to_path_buf(), output, roundtrip_residual: residual, jumps };
    write_json(&report_path, &report)?;
    eprintln!("roundtrip residual {residual:e}");
    Ok(Outcome::Pass)
}
