//! Oracle-versus-simulator check matrix.
//!
//! Each check runs the simulator in the validity domain of one closed form
//! and reports the largest absolute deviation. A check passes when that
//! deviation is strictly below its tolerance.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::dde_model::{build_equations, canonicalize, DelayTerm, EquationSet, SUPPRESSION_TOL};
use crate::error::{Error, Result};
use crate::geometry::{nested_layout, standard_layout, Atom, CouplingPhases, Topology};
use crate::integrator::{integrate, solve_markovian, steady_state, InitialState, Trajectory, DEFAULT_DT};
use crate::oracles::{self, OracleResult, Parity};

const MARKOV_T_END: f64 = 10.0;
const MARKOV_SAMPLE: f64 = 0.01;
const STEADY_T_END: f64 = 50.0;
const STEADY_DELAYS: [f64; 2] = [0.2, 0.8];
const PIECEWISE_DELAY: f64 = 0.8;

/// θ0 ∈ {0, π/4, …, 2π}.
pub fn theta_grid() -> Vec<f64> {
    (0..=8).map(|k| k as f64 * FRAC_PI_4).collect()
}

/// Canonical equations of a standard layout at Γ = 1.
pub fn standard_equations(topology: Topology, theta0: f64, tau0: f64, phases: CouplingPhases) -> Result<EquationSet> {
    let layout = standard_layout(topology, theta0, tau0, phases)?;
    Ok(canonicalize(&build_equations(&layout, 1.0), SUPPRESSION_TOL))
}

/// Largest |concurrence − oracle| over a trajectory.
pub fn max_deviation(traj: &Trajectory, oracle: impl Fn(f64) -> Result<OracleResult>) -> Result<f64> {
    traj.times
        .iter()
        .zip(traj.concurrence())
        .try_fold(0.0f64, |acc, (&t, c)| Ok(acc.max((c - oracle(t)?.value).abs())))
}

/// Largest pointwise amplitude difference between two trajectories.
pub fn trajectory_distance(a: &Trajectory, b: &Trajectory) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x[0] - y[0]).norm().max((x[1] - y[1]).norm()))
        .fold(0.0, f64::max)
}

/// Largest coefficient error between an equation set and an expected list of
/// (target, source, coefficient, delay). Infinite on a structural mismatch.
pub fn term_list_error(set: &EquationSet, expected: &[(Atom, Atom, Complex64, f64)]) -> f64 {
    if set.terms.len() != expected.len() || set.instantaneous_decay != [-set.gamma; 2] {
        return f64::INFINITY;
    }
    expected
        .iter()
        .map(
            |&(target, source, coefficient, delay)| match set.find(target, source, delay) {
                Some(t) => (t.coefficient - coefficient).norm(),
                None => f64::INFINITY,
            },
        )
        .fold(0.0, f64::max)
}

/// Term list with the same coefficient and delay in both directions.
pub fn symmetric_terms(paths: &[(Complex64, Complex64, f64)]) -> Vec<(Atom, Atom, Complex64, f64)> {
    paths
        .iter()
        .flat_map(|&(a_from_b, b_from_a, delay)| {
            [(Atom::A, Atom::B, a_from_b, delay), (Atom::B, Atom::A, b_from_a, delay)]
        })
        .collect()
}

fn markov_check(
    topologies: &[Topology],
    phases: CouplingPhases,
    inits: &[InitialState],
    oracle: impl Fn(f64, f64, usize) -> Result<OracleResult>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &topology in topologies {
        for theta in theta_grid() {
            let set = standard_equations(topology, theta, 0.0, phases)?;
            for (k, &init) in inits.iter().enumerate() {
                let traj = solve_markovian(&set, init, MARKOV_T_END, MARKOV_SAMPLE)?;
                worst = worst.max(max_deviation(&traj, |t| oracle(theta, t, k))?);
            }
        }
    }
    Ok(worst)
}

fn steady_check(
    topology: Topology,
    theta0: f64,
    phases: CouplingPhases,
    inits: &[(InitialState, f64)],
    oracle: impl Fn(f64, f64) -> Result<OracleResult>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for tau in STEADY_DELAYS {
        let set = standard_equations(topology, theta0, tau, phases)?;
        for &(init, phi) in inits {
            let traj = integrate(&set, init, STEADY_T_END, DEFAULT_DT)?;
            let ss = steady_state(&traj);
            worst = worst.max((ss.value - oracle(tau, phi)?.value).abs());
        }
    }
    Ok(worst)
}

fn nested_i_markov() -> Result<f64> {
    markov_check(
        &[Topology::Nested],
        CouplingPhases::nested_case_i(),
        &[InitialState::plus()],
        |th, t, _| oracles::nested_i_markov(th, t),
    )
}

fn nested_ii_markov() -> Result<f64> {
    markov_check(
        &[Topology::Nested],
        CouplingPhases::nested_case_ii(),
        &[InitialState::plus()],
        |th, t, _| oracles::nested_ii_markov(th, t),
    )
}

const SB: [Topology; 2] = [Topology::Separate, Topology::Braided];

fn sb_i_plus_markov() -> Result<f64> {
    markov_check(&SB, CouplingPhases::sb_case_i(), &[InitialState::plus()], |th, t, _| {
        oracles::sb_i_markov(th, t, Parity::Plus)
    })
}

fn sb_i_minus_markov() -> Result<f64> {
    markov_check(
        &SB,
        CouplingPhases::sb_case_i(),
        &[InitialState::minus()],
        |th, t, _| oracles::sb_i_markov(th, t, Parity::Minus),
    )
}

fn sb_ii_markov() -> Result<f64> {
    markov_check(
        &SB,
        CouplingPhases::sb_case_ii(),
        &[InitialState::plus(), InitialState::minus()],
        |th, t, _| oracles::sb_ii_markov(th, t),
    )
}

fn separate_special_markov() -> Result<f64> {
    let mut worst = 0.0f64;
    for theta in [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2, 2.0 * PI] {
        let set = standard_equations(Topology::Separate, theta, 0.0, CouplingPhases::separate_robust())?;
        let traj = solve_markovian(&set, InitialState::plus(), MARKOV_T_END, MARKOV_SAMPLE)?;
        worst = worst.max(max_deviation(&traj, |t| oracles::separate_special_markov(theta, t))?);
    }
    Ok(worst)
}

/// Max error of the delay integrator against the three-window closed form.
pub fn separate_piecewise_error(theta0: f64, tau0: f64, dt: f64) -> Result<f64> {
    let set = standard_equations(Topology::Separate, theta0, tau0, CouplingPhases::separate_robust())?;
    let traj = integrate(&set, InitialState::plus(), 3.0 * tau0, dt)?;
    max_deviation(&traj, |t| oracles::separate_piecewise(theta0, tau0, t.min(3.0 * tau0)))
}

fn separate_piecewise() -> Result<f64> {
    [0.0, FRAC_PI_4, FRAC_PI_2, PI].iter().try_fold(0.0f64, |acc, &th| {
        Ok(acc.max(separate_piecewise_error(th, PIECEWISE_DELAY, DEFAULT_DT)?))
    })
}

fn nested_i_steady() -> Result<f64> {
    steady_check(
        Topology::Nested,
        PI,
        CouplingPhases::nested_case_i(),
        &[(InitialState::plus(), 0.0)],
        |tau, _| oracles::nested_i_steady(tau),
    )
}

fn nested_ii_steady() -> Result<f64> {
    steady_check(
        Topology::Nested,
        FRAC_PI_2,
        CouplingPhases::nested_case_ii(),
        &[(InitialState::plus(), 0.0)],
        |tau, _| oracles::nested_ii_steady(tau),
    )
}

fn sb_i_steady() -> Result<f64> {
    let a = steady_check(
        Topology::Separate,
        PI,
        CouplingPhases::sb_case_i(),
        &[(InitialState::plus(), 0.0)],
        |tau, _| oracles::sb_i_steady(tau),
    )?;
    let b = steady_check(
        Topology::Braided,
        PI,
        CouplingPhases::sb_case_i(),
        &[(InitialState::plus(), 0.0)],
        |tau, _| oracles::sb_i_steady(tau),
    )?;
    Ok(a.max(b))
}

fn sb_ii_steady() -> Result<f64> {
    steady_check(
        Topology::Separate,
        PI,
        CouplingPhases::sb_case_ii(),
        &[(InitialState::plus(), 0.0), (InitialState::minus(), 0.0)],
        |tau, _| oracles::sb_ii_steady(tau),
    )
}

fn sb_ii_steady_phase() -> Result<f64> {
    let inits: Vec<(InitialState, f64)> = [-FRAC_PI_2, 0.0, FRAC_PI_2]
        .iter()
        .map(|&phi| (InitialState::with_phase(phi), phi))
        .collect();
    steady_check(
        Topology::Braided,
        PI,
        CouplingPhases::sb_case_ii(),
        &inits,
        oracles::sb_ii_steady_phase,
    )
}

const REDUCTION_THETA: [f64; 4] = [0.3, FRAC_PI_2, 2.0, PI];
const REDUCTION_TAU: f64 = 0.8;

fn reduction(
    topologies: &[Topology],
    phases: CouplingPhases,
    expected: impl Fn(f64, f64) -> Vec<(Atom, Atom, Complex64, f64)>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &topology in topologies {
        for theta in REDUCTION_THETA {
            let set = standard_equations(topology, theta, REDUCTION_TAU, phases)?;
            worst = worst.max(term_list_error(&set, &expected(theta, REDUCTION_TAU)));
        }
    }
    Ok(worst)
}

/// Nested case I: one path per direction, −Γe^{iθ0} at τ0.
pub fn expected_nested_i(theta: f64, tau: f64) -> Vec<(Atom, Atom, Complex64, f64)> {
    let c = -Complex64::cis(theta);
    symmetric_terms(&[(c, c, tau)])
}

/// Nested case II: one path per direction, −Γe^{2iθ0} at 2τ0.
pub fn expected_nested_ii(theta: f64, tau: f64) -> Vec<(Atom, Atom, Complex64, f64)> {
    let c = -Complex64::cis(2.0 * theta);
    symmetric_terms(&[(c, c, 2.0 * tau)])
}

/// Separate/braided case I: −(Γ/2)e^{iθ0} at τ0 and −(Γ/2)e^{3iθ0} at 3τ0.
pub fn expected_sb_i(theta: f64, tau: f64) -> Vec<(Atom, Atom, Complex64, f64)> {
    let c1 = -0.5 * Complex64::cis(theta);
    let c3 = -0.5 * Complex64::cis(3.0 * theta);
    symmetric_terms(&[(c1, c1, tau), (c3, c3, 3.0 * tau)])
}

/// Separate/braided case II: ±i(Γ/2)e^{iθ0} at τ0 and ±i(Γ/2)e^{3iθ0} at 3τ0,
/// + in the equation of atom a.
pub fn expected_sb_ii(theta: f64, tau: f64) -> Vec<(Atom, Atom, Complex64, f64)> {
    let i = Complex64::i();
    let c1 = 0.5 * i * Complex64::cis(theta);
    let c3 = 0.5 * i * Complex64::cis(3.0 * theta);
    symmetric_terms(&[(c1, -c1, tau), (c3, -c3, 3.0 * tau)])
}

fn reduction_nested_i() -> Result<f64> {
    reduction(&[Topology::Nested], CouplingPhases::nested_case_i(), expected_nested_i)
}

fn reduction_nested_ii() -> Result<f64> {
    reduction(
        &[Topology::Nested],
        CouplingPhases::nested_case_ii(),
        expected_nested_ii,
    )
}

fn reduction_sb_i() -> Result<f64> {
    reduction(&SB, CouplingPhases::sb_case_i(), expected_sb_i)
}

fn reduction_sb_ii() -> Result<f64> {
    reduction(&SB, CouplingPhases::sb_case_ii(), expected_sb_ii)
}

fn sb_equivalence() -> Result<f64> {
    let mut worst = 0.0f64;
    for phases in [CouplingPhases::sb_case_i(), CouplingPhases::sb_case_ii()] {
        for theta in [FRAC_PI_2, PI] {
            let sep = standard_equations(Topology::Separate, theta, 0.8, phases)?;
            let bra = standard_equations(Topology::Braided, theta, 0.8, phases)?;
            for init in [InitialState::plus(), InitialState::minus()] {
                let a = integrate(&sep, init, 10.0, DEFAULT_DT)?;
                let b = integrate(&bra, init, 10.0, DEFAULT_DT)?;
                worst = worst.max(trajectory_distance(&a, &b));
            }
        }
    }
    Ok(worst)
}

/// Nested case-I layouts with θ_β = π, Γτ_β = 0.8 and `count` values of θ_α
/// spread over [0, 2π], τ_α = θ_α τ_β/θ_β.
pub fn theta_alpha_sweep(count: usize) -> Result<Vec<EquationSet>> {
    let (theta_beta, tau_beta) = (PI, 0.8);
    (0..count)
        .map(|k| {
            let theta_alpha = 2.0 * PI * k as f64 / (count - 1).max(1) as f64;
            let tau_alpha = theta_alpha * tau_beta / theta_beta;
            let layout = nested_layout(
                theta_alpha,
                tau_alpha,
                theta_beta,
                tau_beta,
                CouplingPhases::nested_case_i(),
            )?;
            Ok(canonicalize(&build_equations(&layout, 1.0), SUPPRESSION_TOL))
        })
        .collect()
}

fn theta_alpha_immunity() -> Result<f64> {
    let sets = theta_alpha_sweep(11)?;
    let reference = integrate(&sets[0], InitialState::plus(), 10.0, DEFAULT_DT)?.concurrence();
    let mut worst = 0.0f64;
    for set in &sets[1..] {
        let c = integrate(set, InitialState::plus(), 10.0, DEFAULT_DT)?.concurrence();
        let d = c.iter().zip(&reference).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Two small atoms exchanging photons over one path: −Γe^{iθ0} at τ0.
pub fn small_atom_pair(theta0: f64, tau0: f64) -> EquationSet {
    let c = -Complex64::cis(theta0);
    EquationSet::new(
        1.0,
        vec![
            DelayTerm {
                target: Atom::A,
                source: Atom::B,
                coefficient: c,
                delay: tau0,
            },
            DelayTerm {
                target: Atom::B,
                source: Atom::A,
                coefficient: c,
                delay: tau0,
            },
        ],
    )
}

fn small_atom_equivalence() -> Result<f64> {
    let mut worst = 0.0f64;
    for theta in [0.0, FRAC_PI_2, 2.0, PI] {
        for tau in [0.2, 0.8] {
            let nested = standard_equations(Topology::Nested, theta, tau, CouplingPhases::nested_case_i())?;
            for init in [InitialState::plus(), InitialState::eg()] {
                let a = integrate(&nested, init, 10.0, DEFAULT_DT)?;
                let b = integrate(&small_atom_pair(theta, tau), init, 10.0, DEFAULT_DT)?;
                worst = worst.max(trajectory_distance(&a, &b));
            }
        }
    }
    Ok(worst)
}

pub struct Check {
    pub name: &'static str,
    pub tolerance: f64,
    pub description: &'static str,
    run: fn() -> Result<f64>,
}

impl Check {
    pub fn run(&self) -> Result<f64> {
        (self.run)()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn checks() -> Vec<Check> {
    macro_rules! check {
        ($name:literal, $tol:expr, $f:ident, $desc:literal) => {
            Check {
                name: $name,
                tolerance: $tol,
                description: $desc,
                run: $f,
            }
        };
    }
    vec![
        check!(
            "nested_I_markov",
            1e-8,
            nested_i_markov,
            "nested case I, Γτ0=0, θ0 grid, Γt ≤ 10"
        ),
        check!(
            "nested_II_markov",
            1e-8,
            nested_ii_markov,
            "nested case II, Γτ0=0, θ0 grid, Γt ≤ 10"
        ),
        check!(
            "sb_I_plus_markov",
            1e-8,
            sb_i_plus_markov,
            "separate+braided case I, |+⟩, Γτ0=0"
        ),
        check!(
            "sb_I_minus_markov",
            1e-8,
            sb_i_minus_markov,
            "separate+braided case I, |−⟩, Γτ0=0"
        ),
        check!(
            "sb_II_markov",
            1e-8,
            sb_ii_markov,
            "separate+braided case II, |±⟩, Γτ0=0"
        ),
        check!(
            "separate_special_markov",
            1e-8,
            separate_special_markov,
            "separate robust phases, θ0 ∈ {nπ, π/2+nπ}"
        ),
        check!(
            "separate_piecewise",
            1e-4,
            separate_piecewise,
            "separate robust phases, Γτ0=0.8, t ≤ 3τ0, dt=1e-3"
        ),
        check!(
            "nested_I_steady",
            1e-3,
            nested_i_steady,
            "nested case I, θ0=π, Γτ0 ∈ {0.2, 0.8}"
        ),
        check!(
            "nested_II_steady",
            1e-3,
            nested_ii_steady,
            "nested case II, θ0=π/2, Γτ0 ∈ {0.2, 0.8}"
        ),
        check!(
            "sb_I_steady",
            1e-3,
            sb_i_steady,
            "separate+braided case I, θ0=π, Γτ0 ∈ {0.2, 0.8}"
        ),
        check!(
            "sb_II_steady",
            1e-3,
            sb_ii_steady,
            "separate case II, θ0=π, |±⟩, Γτ0 ∈ {0.2, 0.8}"
        ),
        check!(
            "sb_II_steady_phase",
            1e-3,
            sb_ii_steady_phase,
            "braided case II, θ0=π, φ ∈ {−π/2, 0, π/2}"
        ),
        check!(
            "reduction_nested_I",
            1e-12,
            reduction_nested_i,
            "nested case I term list"
        ),
        check!(
            "reduction_nested_II",
            1e-12,
            reduction_nested_ii,
            "nested case II term list"
        ),
        check!(
            "reduction_sb_I",
            1e-12,
            reduction_sb_i,
            "separate+braided case I term list"
        ),
        check!(
            "reduction_sb_II",
            1e-12,
            reduction_sb_ii,
            "separate+braided case II term list"
        ),
        check!(
            "sb_equivalence",
            1e-10,
            sb_equivalence,
            "separate vs braided trajectories, cases I and II"
        ),
        check!(
            "theta_alpha_immunity",
            1e-10,
            theta_alpha_immunity,
            "nested case I, 11 values of θ_α"
        ),
        check!(
            "small_atom_equivalence",
            1e-12,
            small_atom_equivalence,
            "nested case I vs two small atoms"
        ),
    ]
}

/// Runs the matrix, optionally with one tolerance for every check and/or
/// restricted to the check called `only`.
pub fn run(tolerance: Option<f64>, only: Option<&str>) -> Result<Vec<CheckOutcome>> {
    let selected: Vec<Check> = checks()
        .into_iter()
        .filter(|c| only.is_none_or(|name| c.name == name))
        .collect();
    if let (Some(name), true) = (only, selected.is_empty()) {
        return Err(Error::UnknownCheck(name.to_string()));
    }
    selected
        .iter()
        .map(|c| {
            let tol = tolerance.unwrap_or(c.tolerance);
            let max_error = c.run()?;
            Ok(CheckOutcome {
                name: c.name,
                max_error,
                tolerance: tol,
                passed: max_error < tol,
            })
        })
        .collect()
}
