use std::path::PathBuf;

use clap::Subcommand;
use oqs_core::channels::{
    choi_from_kraus, dilate, is_cptp, kraus_from_choi, ppt_min_eig, ChannelFile, DilationFile,
    CHANNEL_TOL, KRAUS_TRUNCATION,
};
use oqs_core::random::{random_channel, random_state};
use oqs_core::states::DensityMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{emit, json_line, read_json, CmdResult, Failure};

#[derive(Debug, Subcommand)]
pub enum ChannelCommand {
    /// Checks complete positivity and trace preservation of a channel file.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = CHANNEL_TOL)]
        tol: f64,
    },
    /// Kraus operators of a channel file.
    Kraus {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unitary dilation of a channel file.
    Dilate {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partial-transpose test of a bipartite density matrix.
    Ppt {
        file: PathBuf,
        /// Factor dimensions `dA,dB`.
        #[arg(long, value_parser = parse_dims)]
        dims: (usize, usize),
    },
    /// Round trip and dilation checks on random channels.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected dA,dB, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

pub fn run(cmd: ChannelCommand) -> CmdResult {
    match cmd {
        ChannelCommand::Verify { file, tol } => {
            let f: ChannelFile = read_json(&file)?;
            let choi = f.choi_candidate()?;
            let report = is_cptp(&choi, f.dim(), tol)?;
            emit(
                None,
                &json_line(&json!({
                    "cp": report.cp,
                    "tp": report.tp,
                    "min_choi_eigenvalue": report.min_choi_eig,
                    "tp_residual": report.tp_residual,
                    "tol": tol,
                })),
            )?;
            if report.cp && report.tp {
                Ok(())
            } else {
                Err(Failure::Violation(format!(
                    "not CPTP: min Choi eigenvalue {:e}, trace-preservation residual {:e}",
                    report.min_choi_eig, report.tp_residual
                )))
            }
        }
        ChannelCommand::Kraus { file, out } => {
            let ch = read_json::<ChannelFile>(&file)?.into_channel()?;
            let kraus = kraus_from_choi(&ch, KRAUS_TRUNCATION)?;
            let value = serde_json::to_value(ChannelFile::from(&kraus))
                .map_err(|e| Failure::Usage(e.to_string()))?;
            emit(out.as_ref(), &json_line(&value))
        }
        ChannelCommand::Dilate { file, out } => {
            let ch = read_json::<ChannelFile>(&file)?.into_channel()?;
            let dil = dilate(&ch)?;
            let value = serde_json::to_value(DilationFile::from(&dil))
                .map_err(|e| Failure::Usage(e.to_string()))?;
            match out {
                Some(path) => {
                    emit(Some(&path), &json_line(&value))?;
                    emit(
                        None,
                        &json_line(&json!({
                            "dim": dil.dim(),
                            "dim_r": dil.dim_r(),
                            "unitarity_deviation": dil.unitarity_deviation(),
                        })),
                    )
                }
                None => emit(None, &json_line(&value)),
            }
        }
        ChannelCommand::Ppt { file, dims } => {
            let rho = DensityMatrix::new(read_json(&file)?)?;
            let min = ppt_min_eig(&rho, dims.0, dims.1)?;
            let ppt = min >= -CHANNEL_TOL;
            emit(
                None,
                &json_line(&json!({ "min_eigenvalue": min, "ppt": ppt })),
            )?;
            if ppt {
                Ok(())
            } else {
                Err(Failure::Violation(format!(
                    "partial transpose has eigenvalue {min:e}: state is entangled"
                )))
            }
        }
        ChannelCommand::Selftest { seed, dim, count } => {
            if dim == 0 || count == 0 {
                return Err(Failure::Usage("dim and count must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (mut round_trip, mut completeness, mut unitarity, mut action) =
                (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            let mut max_kraus = 0;
            for _ in 0..count {
                let ch = random_channel(dim, &mut rng);
                let k = kraus_from_choi(&ch, KRAUS_TRUNCATION)?;
                max_kraus = max_kraus.max(k.len());
                completeness = completeness.max(k.completeness_residual());
                round_trip = round_trip.max(choi_from_kraus(&k).choi().max_abs_diff(ch.choi()));
                let dil = dilate(&ch)?;
                unitarity = unitarity.max(dil.unitarity_deviation());
                for _ in 0..5 {
                    let rho = random_state(dim, &mut rng);
                    let diff = dil
                        .apply(&rho)?
                        .matrix()
                        .max_abs_diff(ch.apply(&rho)?.matrix());
                    action = action.max(diff);
                }
            }
            let pass = round_trip < 1e-10
                && completeness < 1e-9
                && unitarity < 1e-10
                && action < 1e-9
                && max_kraus <= dim * dim;
            emit(
                None,
                &json_line(&json!({
                    "seed": seed,
                    "dim": dim,
                    "count": count,
                    "choi_round_trip": round_trip,
                    "completeness": completeness,
                    "unitarity": unitarity,
                    "dilation_action": action,
                    "max_kraus_count": max_kraus,
                    "pass": pass,
                })),
            )?;
            if pass {
                Ok(())
            } else {
                Err(Failure::Violation("self-test tolerances exceeded".into()))
            }
        }
    }
}
