//! Time evolution of the two excitation amplitudes.
//!
//! [`integrate`] is a method-of-steps solver: classical RK4 on a uniform
//! grid, with every delayed argument read back from a piecewise cubic
//! Hermite history (node values plus node derivatives). Steps are split at
//! delay activation times and at their sums, so no step straddles a
//! derivative discontinuity and each history segment is smooth.
//!
//! [`solve_markovian`] handles the all-delays-zero limit exactly through the
//! 2×2 matrix exponential.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::dde_model::{DelayTerm, EquationSet, DELAY_KEY_TOL};
use crate::error::{Error, Result};
use crate::observables::concurrence;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_WINDOW: f64 = 5.0;
/// Max−min spread of the concurrence inside the window for convergence.
pub const STEADY_SPREAD: f64 = 1e-6;

/// Breakpoints up to this many summed delays are resolved exactly. Beyond
/// that the discontinuity sits in the fifth derivative, below RK4's order.
const BREAKPOINT_DEPTH: usize = 4;
const MAX_SUBSTEPS: usize = 100_000;

type Amps = [Complex64; 2];
type Mat2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub c_a0: Complex64,
    pub c_b0: Complex64,
}

impl InitialState {
    pub fn new(c_a0: Complex64, c_b0: Complex64) -> Result<Self> {
        let norm = c_a0.norm_sqr() + c_b0.norm_sqr();
        if norm.is_nan() || norm > 1.0 + 1e-12 {
            return Err(Error::NormExceeded(norm));
        }
        Ok(Self { c_a0, c_b0 })
    }

    /// (|eg⟩ + |ge⟩)/√2
    pub fn plus() -> Self {
        Self::with_phase(0.0)
    }

    /// (|eg⟩ − |ge⟩)/√2
    pub fn minus() -> Self {
        Self {
            c_a0: Complex64::new(FRAC_1_SQRT_2, 0.0),
            c_b0: Complex64::new(-FRAC_1_SQRT_2, 0.0),
        }
    }

    /// Atom a excited, atom b in its ground state.
    pub fn eg() -> Self {
        Self {
            c_a0: Complex64::new(1.0, 0.0),
            c_b0: Complex64::new(0.0, 0.0),
        }
    }

    pub fn ge() -> Self {
        Self {
            c_a0: Complex64::new(0.0, 0.0),
            c_b0: Complex64::new(1.0, 0.0),
        }
    }

    /// (|eg⟩ + e^{iφ}|ge⟩)/√2
    pub fn with_phase(phi: f64) -> Self {
        Self {
            c_a0: Complex64::new(FRAC_1_SQRT_2, 0.0),
            c_b0: Complex64::from_polar(FRAC_1_SQRT_2, phi),
        }
    }

    pub fn amplitudes(&self) -> Amps {
        [self.c_a0, self.c_b0]
    }
}

/// Amplitudes on the uniform grid `times[k] = k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub amps: Vec<[Complex64; 2]>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn concurrence(&self) -> Vec<f64> {
        crate::observables::concurrence_series(self)
    }

    /// Index of the grid point nearest to `t`, clamped to the grid.
    pub fn index_at(&self, t: f64) -> usize {
        let k = (t / self.dt).round();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.len().saturating_sub(1))
        }
    }

    pub fn at(&self, t: f64) -> [Complex64; 2] {
        self.amps[self.index_at(t)]
    }

    pub fn concurrence_at(&self, t: f64) -> f64 {
        let [a, b] = self.at(t);
        concurrence(a, b)
    }
}

fn validate_grid(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite() && t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidStep { dt, t_end });
    }
    Ok((t_end / dt + 1e-9).floor() as usize)
}

/// Instantaneous part of the right-hand side: local decay plus any
/// zero-delay terms.
fn instantaneous_matrix(eqset: &EquationSet) -> Mat2 {
    let zero = Complex64::new(0.0, 0.0);
    let mut m = [[zero; 2]; 2];
    for (slot, decay) in eqset.instantaneous_decay.iter().enumerate() {
        m[slot][slot] += decay;
    }
    for t in eqset.terms.iter().filter(|t| t.delay <= DELAY_KEY_TOL) {
        m[t.target.slot()][t.source.slot()] += t.coefficient;
    }
    m
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    t0: f64,
    t1: f64,
    y0: Amps,
    y1: Amps,
    f0: Amps,
    f1: Amps,
}

impl Segment {
    fn eval(&self, s: f64) -> Amps {
        let h = self.t1 - self.t0;
        let u = (s - self.t0) / h;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = (u3 - 2.0 * u2 + u) * h;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = (u3 - u2) * h;
        std::array::from_fn(|i| self.y0[i] * h00 + self.f0[i] * h10 + self.y1[i] * h01 + self.f1[i] * h11)
    }
}

/// Dense record of the solution so far.
struct History {
    initial: Amps,
    segments: Vec<Segment>,
}

impl History {
    fn value_at(&self, s: f64) -> Amps {
        let (first, last) = match (self.segments.first(), self.segments.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return self.initial,
        };
        // Queries never lie ahead of the last node except by round-off; the
        // delayed terms are gated, so nothing before t = 0 is physical.
        if s <= first.t0 {
            return self.initial;
        }
        if s >= last.t1 {
            return last.y1;
        }
        let idx = self.segments.partition_point(|g| g.t1 < s);
        self.segments[idx].eval(s)
    }
}

struct Rhs<'a> {
    inst: Mat2,
    /// Delayed terms sorted by delay; a prefix is active at any time.
    delayed: &'a [DelayTerm],
}

impl Rhs<'_> {
    fn eval(&self, t: f64, y: &Amps, active: usize, history: &History) -> Amps {
        let m = &self.inst;
        let mut out = [m[0][0] * y[0] + m[0][1] * y[1], m[1][0] * y[0] + m[1][1] * y[1]];
        for term in &self.delayed[..active] {
            let past = history.value_at(t - term.delay);
            out[term.target.slot()] += term.coefficient * past[term.source.slot()];
        }
        out
    }
}

fn axpy(y: &Amps, h: f64, k: &Amps) -> Amps {
    [y[0] + k[0] * h, y[1] + k[1] * h]
}

/// Sums of up to `BREAKPOINT_DEPTH` delays not exceeding `t_end`, sorted and
/// deduplicated within `snap`.
fn breakpoints(delays: &[f64], t_end: f64, snap: f64) -> Vec<f64> {
    let mut all: Vec<f64> = Vec::new();
    let mut level = vec![0.0];
    for _ in 0..BREAKPOINT_DEPTH {
        let mut next: Vec<f64> = level
            .iter()
            .flat_map(|b| delays.iter().map(move |d| b + d))
            .filter(|&s| s <= t_end + snap)
            .collect();
        next.sort_by(f64::total_cmp);
        next.dedup_by(|a, b| (*a - *b).abs() <= snap);
        if next.is_empty() {
            break;
        }
        all.extend_from_slice(&next);
        level = next;
    }
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() <= snap);
    all
}

/// Integrates the delay equations of `eqset` from `init` up to `t_end` and
/// samples the amplitudes every `dt`.
///
/// A term with delay d is active for t ≥ d. When the shortest nonzero delay
/// is below `dt`, each grid interval is subdivided so that delayed lookups
/// always hit stored history.
pub fn integrate(eqset: &EquationSet, init: InitialState, t_end: f64, dt: f64) -> Result<Trajectory> {
    let n_grid = validate_grid(t_end, dt)?;

    let mut delayed: Vec<DelayTerm> = eqset
        .terms
        .iter()
        .filter(|t| t.delay > DELAY_KEY_TOL)
        .copied()
        .collect();
    delayed.sort_by(|a, b| a.delay.total_cmp(&b.delay));
    if eqset
        .terms
        .iter()
        .any(|t| !(t.coefficient.is_finite() && t.delay.is_finite()))
    {
        return Err(Error::NonFinite { t: 0.0 });
    }

    let substeps = match delayed.first() {
        Some(shortest) if shortest.delay < dt => (dt / shortest.delay).ceil() as usize,
        _ => 1,
    };
    if substeps > MAX_SUBSTEPS {
        return Err(Error::InvalidStep { dt, t_end });
    }
    let h = dt / substeps as f64;
    let snap = 1e-7 * h;

    let mut distinct: Vec<f64> = delayed.iter().map(|t| t.delay).collect();
    distinct.dedup_by(|a, b| (*a - *b).abs() <= snap);
    let breaks = breakpoints(&distinct, t_end, snap);

    let rhs = Rhs {
        inst: instantaneous_matrix(eqset),
        delayed: &delayed,
    };
    let active_at = |t: f64| delayed.partition_point(|term| term.delay <= t + snap);

    let mut y = init.amplitudes();
    let mut history = History {
        initial: y,
        segments: Vec::with_capacity(n_grid * substeps),
    };
    let mut times = Vec::with_capacity(n_grid + 1);
    let mut amps = Vec::with_capacity(n_grid + 1);
    times.push(0.0);
    amps.push(y);

    let mut next_break = 0usize;
    // Derivative at the current node, carried over when the active set is
    // unchanged across the node.
    let mut carried: Option<(usize, Amps)> = None;

    for k in 0..n_grid {
        let base = k as f64 * dt;
        for j in 0..substeps {
            let t_a = base + j as f64 * h;
            let t_b = if j + 1 == substeps {
                (k + 1) as f64 * dt
            } else {
                base + (j + 1) as f64 * h
            };
            while next_break < breaks.len() && breaks[next_break] <= t_a + snap {
                next_break += 1;
            }
            let mut s0 = t_a;
            loop {
                let s1 = match breaks.get(next_break) {
                    Some(&b) if b < t_b - snap => {
                        next_break += 1;
                        b
                    }
                    _ => t_b,
                };
                let active = active_at(s0);
                let hs = s1 - s0;
                let k1 = match carried {
                    Some((n, f)) if n == active => f,
                    _ => rhs.eval(s0, &y, active, &history),
                };
                let mid = s0 + 0.5 * hs;
                let k2 = rhs.eval(mid, &axpy(&y, 0.5 * hs, &k1), active, &history);
                let k3 = rhs.eval(mid, &axpy(&y, 0.5 * hs, &k2), active, &history);
                let k4 = rhs.eval(s1, &axpy(&y, hs, &k3), active, &history);
                let y1: Amps = std::array::from_fn(|i| y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (hs / 6.0));
                if !(y1[0].is_finite() && y1[1].is_finite()) {
                    return Err(Error::NonFinite { t: s1 });
                }
                let f1 = rhs.eval(s1, &y1, active, &history);
                history.segments.push(Segment {
                    t0: s0,
                    t1: s1,
                    y0: y,
                    y1,
                    f0: k1,
                    f1,
                });
                carried = Some((active, f1));
                y = y1;
                s0 = s1;
                if s1 >= t_b {
                    break;
                }
            }
        }
        times.push((k + 1) as f64 * dt);
        amps.push(y);
    }

    Ok(Trajectory { dt, times, amps })
}

/// exp(M t) for a 2×2 complex matrix.
///
/// With M = μI + A, A traceless, A² = δ²I and the eigenvalues are μ ± δ, so
/// exp(Mt) = e^{μt}[cosh(δt) I + sinh(δt)/δ · A]. When the eigenvalues
/// coincide (relative gap below 1e-9) M is treated as a Jordan block:
/// exp(Mt) = e^{μt}(I + A t).
pub fn expm2(m: &Mat2, t: f64) -> Mat2 {
    let mu = (m[0][0] + m[1][1]) * 0.5;
    let a = [[m[0][0] - mu, m[0][1]], [m[1][0], m[1][1] - mu]];
    let delta = (a[0][0] * a[0][0] + a[0][1] * a[1][0]).sqrt();
    let scale = (mu + delta).norm().max((mu - delta).norm());
    let (c, s) = if 2.0 * delta.norm() <= 1e-9 * scale || delta.norm() == 0.0 {
        (Complex64::new(1.0, 0.0), Complex64::new(t, 0.0))
    } else {
        let x = delta * t;
        (x.cosh(), x.sinh() / delta)
    };
    let e = (mu * t).exp();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let id = [[one, zero], [zero, one]];
    std::array::from_fn(|i| std::array::from_fn(|j| e * (id[i][j] * c + a[i][j] * s)))
}

/// Exact solution of a set whose delays are all zero, sampled every
/// `dt_sample` up to `t_end`.
pub fn solve_markovian(eqset: &EquationSet, init: InitialState, t_end: f64, dt_sample: f64) -> Result<Trajectory> {
    let n = validate_grid(t_end, dt_sample)?;
    if let Some(t) = eqset.terms.iter().find(|t| t.delay > DELAY_KEY_TOL) {
        return Err(Error::NonzeroDelay(t.delay));
    }
    let m = instantaneous_matrix(eqset);
    let x0 = init.amplitudes();
    let mut times = Vec::with_capacity(n + 1);
    let mut amps = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = k as f64 * dt_sample;
        let u = expm2(&m, t);
        times.push(t);
        amps.push([u[0][0] * x0[0] + u[0][1] * x0[1], u[1][0] * x0[0] + u[1][1] * x0[1]]);
    }
    Ok(Trajectory {
        dt: dt_sample,
        times,
        amps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub value: f64,
    pub converged: bool,
}

/// Steady-state concurrence over the default window of 5/Γ.
pub fn steady_state(traj: &Trajectory) -> SteadyState {
    steady_state_with_window(traj, DEFAULT_WINDOW)
}

/// Mean concurrence over the final `window` if it varies by less than
/// [`STEADY_SPREAD`] there; otherwise the last value, unconverged.
pub fn steady_state_with_window(traj: &Trajectory, window: f64) -> SteadyState {
    let series = traj.concurrence();
    let Some(&last) = series.last() else {
        return SteadyState {
            value: 0.0,
            converged: false,
        };
    };
    let duration = traj.times.last().copied().unwrap_or(0.0);
    if duration < window - 1e-9 {
        return SteadyState {
            value: last,
            converged: false,
        };
    }
    let start = traj.index_at(duration - window);
    let tail = &series[start..];
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
        (lo.min(c), hi.max(c))
    });
    if hi - lo < STEADY_SPREAD {
        SteadyState {
            value: tail.iter().sum::<f64>() / tail.len() as f64,
            converged: true,
        }
    } else {
        SteadyState {
            value: last,
            converged: false,
        }
    }
}
