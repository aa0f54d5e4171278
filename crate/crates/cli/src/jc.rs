use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use num_complex::Complex64;
use oqs_core::integrate::uniform_grid;
use oqs_core::io::csv_row;
use oqs_core::jaynes_cummings::{
    c1_exact, integrate_master, rates, sample_reservoir, simulate_discrete, trajectory_exact,
    trajectory_volterra, JCParams, JCTrajectory,
};

use crate::{emit, CmdResult, Failure};

#[derive(Debug, Subcommand)]
pub enum JcCommand {
    /// Excited amplitude, rates and reduced state on a time grid (CSV).
    Simulate {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decay rate γ(t) and frequency shift S(t) (CSV).
    Rates {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrete-reservoir amplitude next to the closed form (CSV).
    Oracle {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        grid: Grid,
        /// Number of reservoir modes.
        #[arg(long, default_value_t = 2000)]
        modes: usize,
        /// Half-width of the sampled window in units of Γ.
        #[arg(long, default_value_t = 40.0)]
        halfwidth: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    /// Closed-form amplitude.
    Exact,
    /// Runge-Kutta on the time-local master equation.
    Master,
    /// Integro-differential equation with the Lorentzian kernel.
    Volterra,
}

#[derive(Debug, Args)]
pub struct Model {
    /// Coupling strength g.
    #[arg(long)]
    g: f64,
    /// Lorentzian width Γ.
    #[arg(long = "gamma-width")]
    gamma_width: f64,
    /// Detuning Δ = ω₀ − ω_c.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta: f64,
    /// Cavity centre frequency ω_c.
    #[arg(long = "omega-c", default_value_t = 100.0)]
    omega_c: f64,
    /// Initial excited amplitude, `re` or `re,im`.
    #[arg(long, default_value = "1", value_parser = parse_complex, allow_negative_numbers = true)]
    c1: Complex64,
    /// Ground amplitude, `re` or `re,im`.
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_negative_numbers = true)]
    c0: Complex64,
}

#[derive(Debug, Args)]
pub struct Grid {
    /// Final time.
    #[arg(long)]
    tmax: f64,
    /// Number of grid intervals.
    #[arg(long)]
    steps: usize,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got {s:?}")),
    }
}

impl Model {
    fn params(&self) -> Result<JCParams, Failure> {
        Ok(JCParams::with_detuning(
            self.g,
            self.gamma_width,
            self.delta,
            self.omega_c,
            self.c1,
            self.c0,
        )?)
    }
}

impl Grid {
    fn points(&self) -> Result<Vec<f64>, Failure> {
        Ok(uniform_grid(self.tmax, self.steps)?)
    }
}

fn finish(traj: JCTrajectory, out: Option<&PathBuf>) -> CmdResult {
    emit(out, &traj.to_csv())?;
    match traj.flag {
        Some(e) => Err(Failure::Violation(format!("trajectory stopped early: {e}"))),
        None => Ok(()),
    }
}

pub fn run(cmd: JcCommand) -> CmdResult {
    match cmd {
        JcCommand::Simulate {
            model,
            grid,
            method,
            out,
        } => {
            let p = model.params()?;
            let grid = grid.points()?;
            let traj = match method {
                Method::Exact => trajectory_exact(&p, &grid)?,
                Method::Master => integrate_master(&p, &grid)?,
                Method::Volterra => trajectory_volterra(&p, &grid)?,
            };
            finish(traj, out.as_ref())
        }
        JcCommand::Rates { model, grid, out } => {
            let p = model.params()?;
            let mut csv = String::from("t,gamma,S\n");
            let mut flag = None;
            for t in grid.points()? {
                match rates(t, &p) {
                    Ok(r) => {
                        csv.push_str(&csv_row(&[t, r.gamma, r.s]));
                        csv.push('\n');
                    }
                    Err(e @ oqs_core::Error::AmplitudeZero { .. }) => {
                        flag = Some(e);
                        break;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            emit(out.as_ref(), &csv)?;
            match flag {
                Some(e) => Err(Failure::Violation(format!("rates stopped early: {e}"))),
                None => Ok(()),
            }
        }
        JcCommand::Oracle {
            model,
            grid,
            modes,
            halfwidth,
            out,
        } => {
            let p = model.params()?;
            let grid = grid.points()?;
            let res = sample_reservoir(&p, modes, halfwidth)?;
            let sol = simulate_discrete(&res, &p, &grid)?;
            let mut csv = String::from(
                "t,re_c1_discrete,im_c1_discrete,re_c1_exact,im_c1_exact,abs_dev,excitation_norm\n",
            );
            let norms = sol.excitation_norm();
            for (i, &t) in grid.iter().enumerate() {
                let exact = c1_exact(t, &p)?;
                let c = sol.c1[i];
                csv.push_str(&csv_row(&[
                    t,
                    c.re,
                    c.im,
                    exact.re,
                    exact.im,
                    (c - exact).norm(),
                    norms[i],
                ]));
                csv.push('\n');
            }
            emit(out.as_ref(), &csv)
        }
    }
}
