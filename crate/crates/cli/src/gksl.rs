use std::path::PathBuf;

use clap::Subcommand;
use oqs_core::gksl::{
    evolve, gksl_decompose, superop_from_generator, GeneratorFile, OperatorBasis, SuperoperatorFile,
};
use oqs_core::integrate::uniform_grid;
use oqs_core::io::csv_row;
use oqs_core::states::DensityMatrix;
use serde::Deserialize;
use serde_json::json;

use crate::{emit, json_line, read_json, CmdResult, Failure};

#[derive(Debug, Subcommand)]
pub enum GkslCommand {
    /// Hamiltonian and jump operators of a generator. Accepts a superoperator
    /// file `{"dim", "superop"}` or a generator file `{"dim", "H", "jumps"}`.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density matrix under e^{tL} on a time grid (CSV).
    Evolve {
        /// Generator file.
        file: PathBuf,
        /// Initial density matrix.
        #[arg(long)]
        rho0: PathBuf,
        #[arg(long)]
        tmax: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DecomposeInput {
    Superoperator(SuperoperatorFile),
    Generator(GeneratorFile),
}

pub fn run(cmd: GkslCommand) -> CmdResult {
    match cmd {
        GkslCommand::Decompose { file, out } => {
            let l = match read_json::<DecomposeInput>(&file)? {
                DecomposeInput::Superoperator(f) => f.into_superoperator()?,
                DecomposeInput::Generator(f) => superop_from_generator(&f.into_generator()?),
            };
            let dec = gksl_decompose(&l, &OperatorBasis::gell_mann(l.dim()))?;
            let generator = serde_json::to_value(GeneratorFile::from(&dec.generator))
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let rates: Vec<f64> = dec.generator.jumps().iter().map(|j| j.gamma).collect();
            let report = json!({
                "generator": generator,
                "rates": rates,
                "a_eigenvalues": dec.a_eigenvalues,
                "residual": dec.residual,
                "consistency_residual": dec.consistency_residual,
            });
            emit(out.as_ref(), &json_line(&report))
        }
        GkslCommand::Evolve {
            file,
            rho0,
            tmax,
            steps,
            out,
        } => {
            let g = read_json::<GeneratorFile>(&file)?.into_generator()?;
            let rho0 = DensityMatrix::new(read_json(&rho0)?)?;
            if rho0.dim() != g.dim() {
                return Err(Failure::Usage(format!(
                    "initial state is {0}x{0}, generator acts on dimension {1}",
                    rho0.dim(),
                    g.dim()
                )));
            }
            let d = g.dim();
            let mut csv = String::from("t");
            for i in 0..d {
                for j in 0..d {
                    csv.push_str(&format!(",re_rho_{i}{j},im_rho_{i}{j}"));
                }
            }
            csv.push('\n');
            for t in uniform_grid(tmax, steps)? {
                let rho = evolve(&g, &rho0, t)?;
                let mut row = vec![t];
                for z in rho.matrix().entries() {
                    row.push(z.re);
                    row.push(z.im);
                }
                csv.push_str(&csv_row(&row));
                csv.push('\n');
            }
            emit(out.as_ref(), &csv)
        }
    }
}
