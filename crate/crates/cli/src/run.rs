//! Subcommand bodies. Each returns the CSV text it would print.

use rayon::prelude::*;

use giant_atoms::dde_model::{path_report, PathStatus, SUPPRESSION_TOL};
use giant_atoms::integrator::steady_state_with_window;
use giant_atoms::{build_equations, canonicalize, integrate, solve_markovian, EquationSet, SteadyState, Trajectory};

use crate::config::{ConfigError, Scenario, SweepMode};
use crate::format::{csv_row, sig9};

pub fn equations(s: &Scenario) -> Result<EquationSet, ConfigError> {
    Ok(canonicalize(&build_equations(&s.build_layout()?, 1.0), SUPPRESSION_TOL))
}

/// Integrates a scenario on its dt grid. Delay-free systems go through the
/// matrix exponential.
pub fn trajectory(s: &Scenario) -> Result<Trajectory, ConfigError> {
    let set = equations(s)?;
    let init = s.initial.state();
    let traj = if set.is_markovian() {
        solve_markovian(&set, init, s.t_end, s.dt)?
    } else {
        integrate(&set, init, s.t_end, s.dt)?
    };
    Ok(traj)
}

pub struct Simulation {
    pub csv: String,
    pub steady: SteadyState,
}

pub fn simulate(s: &Scenario, gamma: f64) -> Result<Simulation, ConfigError> {
    if s.sweep.is_some() {
        return Err(ConfigError::Invalid(
            "config has a [sweep] section; use the sweep subcommand".into(),
        ));
    }
    let traj = trajectory(s)?;
    let mut csv = csv_row(["t", "re_ca", "im_ca", "re_cb", "im_cb", "pop_a", "pop_b", "concurrence"]);
    for (&t, [ca, cb]) in traj.times.iter().zip(&traj.amps) {
        let c = giant_atoms::concurrence(*ca, *cb);
        csv.push_str(&csv_row(
            [t / gamma, ca.re, ca.im, cb.re, cb.im, ca.norm_sqr(), cb.norm_sqr(), c].map(sig9),
        ));
    }
    Ok(Simulation {
        csv,
        steady: steady_state_with_window(&traj, s.window),
    })
}

/// Long-format sweep table. Grid points run in parallel; rows come out in
/// grid order.
pub fn sweep(s: &Scenario, gamma: f64) -> Result<String, ConfigError> {
    let Some(spec) = &s.sweep else {
        return Err(ConfigError::Invalid("config has no [sweep] section".into()));
    };
    let axis_values: Vec<Vec<f64>> = spec.axes.iter().map(|a| a.values()).collect();
    let mut grid: Vec<Vec<f64>> = vec![vec![]];
    for values in &axis_values {
        grid = grid
            .iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    let sample_times: Vec<f64> = match spec.samples {
        1 => vec![s.t_end],
        n => (0..n).map(|k| s.t_end * k as f64 / (n - 1) as f64).collect(),
    };
    let blocks: Vec<String> = grid
        .par_iter()
        .map(|point| {
            let scenario = spec
                .axes
                .iter()
                .zip(point)
                .fold(s.clone(), |acc, (axis, &v)| acc.with_axis(axis.name, v));
            let traj = trajectory(&scenario)?;
            let keys: Vec<String> = point.iter().map(|&v| sig9(v)).collect();
            let mut block = String::new();
            match spec.mode {
                SweepMode::Time => {
                    for &t in &sample_times {
                        let [ca, cb] = traj.at(t);
                        let mut row = keys.clone();
                        row.push(sig9(t / gamma));
                        row.push(sig9(giant_atoms::concurrence(ca, cb)));
                        block.push_str(&csv_row(row));
                    }
                }
                SweepMode::Steady => {
                    let ss = steady_state_with_window(&traj, scenario.window);
                    let mut row = keys;
                    row.push(sig9(ss.value));
                    row.push(ss.converged.to_string());
                    block.push_str(&csv_row(row));
                }
            }
            Ok(block)
        })
        .collect::<Result<_, ConfigError>>()?;
    let mut header: Vec<&str> = spec.axes.iter().map(|a| a.name.as_str()).collect();
    match spec.mode {
        SweepMode::Time => header.extend(["t", "concurrence"]),
        SweepMode::Steady => header.extend(["steady_state", "converged"]),
    }
    let mut out = csv_row(header);
    out.extend(blocks);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PathFormat {
    Table,
    Csv,
}

pub fn paths(s: &Scenario, format: PathFormat) -> Result<String, ConfigError> {
    let raw = build_equations(&s.build_layout()?, 1.0);
    let report = path_report(&raw, &canonicalize(&raw, SUPPRESSION_TOL));
    let mut out = String::new();
    match format {
        PathFormat::Csv => {
            out.push_str(&csv_row([
                "source", "target", "delay", "re_coeff", "im_coeff", "status",
            ]));
            for e in &report.entries {
                out.push_str(&csv_row([
                    e.source.to_string(),
                    e.target.to_string(),
                    sig9(e.delay),
                    sig9(e.coefficient.re),
                    sig9(e.coefficient.im),
                    e.status.to_string(),
                ]));
            }
        }
        PathFormat::Table => {
            out.push_str(&format!(
                "{:<6} {:<6} {:>14} {:>30}  {}\n",
                "source", "target", "delay", "coefficient", "status"
            ));
            for e in &report.entries {
                let coeff = format!(
                    "{} {} {}i",
                    sig9(e.coefficient.re),
                    if e.coefficient.im < 0.0 { '-' } else { '+' },
                    sig9(e.coefficient.im.abs())
                );
                out.push_str(&format!(
                    "{:<6} {:<6} {:>14} {:>30}  {}\n",
                    e.source.to_string(),
                    e.target.to_string(),
                    sig9(e.delay),
                    coeff,
                    e.status
                ));
            }
            let active = report.entries.iter().filter(|e| e.status == PathStatus::Active).count();
            out.push_str(&format!(
                "{active} active, {} suppressed\n",
                report.entries.len() - active
            ));
        }
    }
    Ok(out)
}

pub struct VerifyReport {
    pub csv: String,
    pub failures: usize,
    pub total: usize,
}

pub fn verify(tolerance: Option<f64>, only: Option<&str>) -> Result<VerifyReport, ConfigError> {
    let outcomes = giant_atoms::verify::run(tolerance, only)?;
    let mut csv = csv_row(["check", "max_error", "tolerance", "status"]);
    for o in &outcomes {
        csv.push_str(&csv_row([
            o.name.to_string(),
            sig9(o.max_error),
            sig9(o.tolerance),
            if o.passed { "pass" } else { "fail" }.to_string(),
        ]));
    }
    Ok(VerifyReport {
        csv,
        failures: outcomes.iter().filter(|o| !o.passed).count(),
        total: outcomes.len(),
    })
}
