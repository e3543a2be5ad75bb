//! Delay-equation terms generated from a layout.
//!
//! Each ordered pair of distinct coupling points (p of atom j, q of atom j′)
//! contributes a photon path q → p:
//!
//! ```text
//! dc_j/dt  ⊃  −(Γ/2) · e^{i(φ_p − φ_q)} · e^{iθ_pq} · c_j′(t − τ_pq) · Θ(t − τ_pq)
//! ```
//!
//! on top of the local decay −Γ c_j. Paths that share the same
//! (target, source, delay) interfere; [`canonicalize`] sums them and drops the
//! ones that cancel.

use std::fmt;

use num_complex::Complex64;

use crate::geometry::{metrics_between, Atom, Layout};

/// Coefficients below `SUPPRESSION_TOL · Γ` are treated as cancelled.
pub const SUPPRESSION_TOL: f64 = 1e-12;

/// Delays closer than this (in units of 1/Γ) belong to the same path.
pub const DELAY_KEY_TOL: f64 = 1e-12;

/// One delayed contribution `coefficient · c_source(t − delay) · Θ(t − delay)`
/// to the equation of `target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayTerm {
    pub target: Atom,
    pub source: Atom,
    pub coefficient: Complex64,
    pub delay: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquationSet {
    pub gamma: f64,
    /// Instantaneous coefficient of c_j in dc_j/dt, indexed by [`Atom::slot`].
    pub instantaneous_decay: [f64; 2],
    pub terms: Vec<DelayTerm>,
}

impl EquationSet {
    /// Two atoms decaying at rate `gamma` plus the given delayed terms.
    pub fn new(gamma: f64, terms: Vec<DelayTerm>) -> Self {
        Self {
            gamma,
            instantaneous_decay: [-gamma; 2],
            terms,
        }
    }

    /// Terms acting on `target`.
    pub fn terms_for(&self, target: Atom) -> impl Iterator<Item = &DelayTerm> {
        self.terms.iter().filter(move |t| t.target == target)
    }

    pub fn max_delay(&self) -> f64 {
        self.terms.iter().map(|t| t.delay).fold(0.0, f64::max)
    }

    pub fn is_markovian(&self) -> bool {
        self.terms.iter().all(|t| t.delay == 0.0)
    }

    /// Copy with every delay set to zero; the Markovian limit of the same
    /// path structure.
    pub fn with_zero_delays(&self) -> Self {
        let mut out = self.clone();
        for t in out.terms.iter_mut() {
            t.delay = 0.0;
        }
        out
    }

    /// Term for (target, source, delay), if present.
    pub fn find(&self, target: Atom, source: Atom, delay: f64) -> Option<&DelayTerm> {
        self.terms
            .iter()
            .find(|t| t.target == target && t.source == source && (t.delay - delay).abs() <= DELAY_KEY_TOL)
    }
}

/// Builds the raw, uncanonicalized equation set of `layout`.
///
/// The result holds one term per ordered pair of distinct points: 4 same-atom
/// and 8 cross-atom terms.
pub fn build_equations(layout: &Layout, gamma: f64) -> EquationSet {
    let points = layout.points();
    let mut terms = Vec::with_capacity(12);
    for p in points {
        for q in points {
            if p.id() == q.id() {
                continue;
            }
            let m = metrics_between(p, q);
            let phase = (p.coupling_phase - q.coupling_phase) + m.phase_shift;
            terms.push(DelayTerm {
                target: p.atom,
                source: q.atom,
                coefficient: -0.5 * gamma * Complex64::cis(phase),
                delay: m.delay,
            });
        }
    }
    EquationSet::new(gamma, terms)
}

fn sort_key(a: &DelayTerm, b: &DelayTerm) -> std::cmp::Ordering {
    a.target
        .cmp(&b.target)
        .then(a.source.cmp(&b.source))
        .then(a.delay.total_cmp(&b.delay))
}

/// Sums terms by (target, source, delay) in sorted order. Returns the groups
/// without dropping any.
fn merge(terms: &[DelayTerm]) -> Vec<DelayTerm> {
    let mut sorted = terms.to_vec();
    sorted.sort_by(sort_key);
    let mut merged: Vec<DelayTerm> = Vec::with_capacity(sorted.len());
    for t in sorted {
        match merged.last_mut() {
            Some(last)
                if last.target == t.target
                    && last.source == t.source
                    && (t.delay - last.delay).abs() <= DELAY_KEY_TOL =>
            {
                last.coefficient += t.coefficient;
            }
            _ => merged.push(t),
        }
    }
    merged
}

/// Merges terms sharing (target, source, delay) and removes those whose
/// merged coefficient is below `tolerance · Γ`. Output is sorted by
/// (target, source, delay).
pub fn canonicalize(eqset: &EquationSet, tolerance: f64) -> EquationSet {
    let cutoff = tolerance * eqset.gamma.abs();
    let terms = merge(&eqset.terms)
        .into_iter()
        .filter(|t| t.coefficient.norm() >= cutoff)
        .collect();
    EquationSet { terms, ..eqset.clone() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStatus {
    Active,
    Suppressed,
}

impl fmt::Display for PathStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathStatus::Active => "active",
            PathStatus::Suppressed => "suppressed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEntry {
    pub source: Atom,
    pub target: Atom,
    pub delay: f64,
    pub coefficient: Complex64,
    pub status: PathStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathReport {
    pub entries: Vec<PathEntry>,
}

impl PathReport {
    pub fn active(&self) -> impl Iterator<Item = &PathEntry> {
        self.entries.iter().filter(|e| e.status == PathStatus::Active)
    }

    pub fn suppressed(&self) -> impl Iterator<Item = &PathEntry> {
        self.entries.iter().filter(|e| e.status == PathStatus::Suppressed)
    }
}

/// One entry per distinct (source, target, delay) path of `raw`, marked
/// active when `canonical` still carries it.
pub fn path_report(raw: &EquationSet, canonical: &EquationSet) -> PathReport {
    let entries = merge(&raw.terms)
        .into_iter()
        .map(|group| match canonical.find(group.target, group.source, group.delay) {
            Some(t) => PathEntry {
                source: group.source,
                target: group.target,
                delay: group.delay,
                coefficient: t.coefficient,
                status: PathStatus::Active,
            },
            None => PathEntry {
                source: group.source,
                target: group.target,
                delay: group.delay,
                coefficient: group.coefficient,
                status: PathStatus::Suppressed,
            },
        })
        .collect();
    PathReport { entries }
}
