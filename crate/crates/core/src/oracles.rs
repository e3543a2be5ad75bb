//! Closed-form concurrence curves for the phase-engineered configurations.
//!
//! All arguments are dimensionless: `gt` is Γt, `gtau` is Γτ₀. Every result
//! carries the domain in which the formula holds, and evaluating outside it
//! is an [`Error::OutOfDomain`].

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::observables::{chi_concurrence, ChiPair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub validity_domain: &'static str,
}

/// Initial-state parity for the separate/braided case-I curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Plus,
    Minus,
}

pub mod domain {
    pub const NESTED_I_MARKOV: &str = "nested, case-I phases, Γτ0 = 0, initial |+⟩, Γt ≥ 0";
    pub const NESTED_I_STEADY: &str = "nested, case-I phases, θ0 = π, initial |+⟩, Γt → ∞";
    pub const NESTED_II_MARKOV: &str = "nested, case-II phases, Γτ0 = 0, initial |+⟩, Γt ≥ 0";
    pub const NESTED_II_STEADY: &str = "nested, case-II phases, θ0 = π/2, initial |+⟩, Γt → ∞";
    pub const SEPARATE_SPECIAL: &str = "separate, robust phases, Γτ0 = 0, initial |+⟩, θ0 ∈ {nπ, π/2 + nπ}";
    pub const SEPARATE_PIECEWISE: &str = "separate, robust phases, initial |+⟩, 0 ≤ t ≤ 3τ0";
    pub const SB_I_MARKOV: &str = "separate or braided, sb case-I phases, Γτ0 = 0, initial |±⟩";
    pub const SB_I_STEADY: &str = "separate or braided, sb case-I phases, θ0 = π, initial |+⟩, Γt → ∞";
    pub const SB_II_MARKOV: &str = "separate or braided, sb case-II phases, Γτ0 = 0, initial |±⟩";
    pub const SB_II_STEADY: &str = "separate or braided, sb case-II phases, θ0 = π, initial |±⟩, Γt → ∞";
    pub const SB_II_STEADY_PHASE: &str =
        "separate or braided, sb case-II phases, θ0 = π, initial (|eg⟩ + e^{iφ}|ge⟩)/√2, Γt → ∞";
}

fn ok(value: f64, validity_domain: &'static str) -> Result<OracleResult> {
    Ok(OracleResult { value, validity_domain })
}

fn require(cond: bool, oracle: &'static str, domain: &'static str, reason: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            oracle,
            domain,
            reason: reason(),
        })
    }
}

fn require_time(gt: f64, oracle: &'static str, domain: &'static str) -> Result<()> {
    require(gt.is_finite() && gt >= 0.0, oracle, domain, || {
        format!("Γt = {gt} must be ≥ 0")
    })
}

fn require_delay(gtau: f64, oracle: &'static str, domain: &'static str) -> Result<()> {
    require(gtau.is_finite() && gtau >= 0.0, oracle, domain, || {
        format!("Γτ0 = {gtau} must be ≥ 0")
    })
}

/// e^{−2Γ(1 + cos θ0)t}
pub fn nested_i_markov(theta0: f64, gt: f64) -> Result<OracleResult> {
    require_time(gt, "nested_I_markov", domain::NESTED_I_MARKOV)?;
    ok((-2.0 * (1.0 + theta0.cos()) * gt).exp(), domain::NESTED_I_MARKOV)
}

/// 1/(1 + Γτ0)²
pub fn nested_i_steady(gtau: f64) -> Result<OracleResult> {
    require_delay(gtau, "nested_I_steady", domain::NESTED_I_STEADY)?;
    ok(1.0 / (1.0 + gtau).powi(2), domain::NESTED_I_STEADY)
}

/// e^{−2Γ[1 + cos 2θ0]t}
pub fn nested_ii_markov(theta0: f64, gt: f64) -> Result<OracleResult> {
    require_time(gt, "nested_II_markov", domain::NESTED_II_MARKOV)?;
    ok(
        (-2.0 * (1.0 + (2.0 * theta0).cos()) * gt).exp(),
        domain::NESTED_II_MARKOV,
    )
}

/// 1/(1 + 2Γτ0)²
pub fn nested_ii_steady(gtau: f64) -> Result<OracleResult> {
    require_delay(gtau, "nested_II_steady", domain::NESTED_II_STEADY)?;
    ok(1.0 / (1.0 + 2.0 * gtau).powi(2), domain::NESTED_II_STEADY)
}

/// Markovian separate configuration at the two special phase families:
/// e^{−4Γt} at θ0 = nπ and e^{−2Γt}(2Γt + 1) at θ0 = π/2 + nπ.
pub fn separate_special_markov(theta0: f64, gt: f64) -> Result<OracleResult> {
    const NAME: &str = "separate_special_markov";
    require_time(gt, NAME, domain::SEPARATE_SPECIAL)?;
    let r = theta0.rem_euclid(PI);
    let tol = 1e-9;
    if r < tol || PI - r < tol {
        ok((-4.0 * gt).exp(), domain::SEPARATE_SPECIAL)
    } else if (r - FRAC_PI_2).abs() < tol {
        ok((-2.0 * gt).exp() * (2.0 * gt + 1.0), domain::SEPARATE_SPECIAL)
    } else {
        Err(Error::OutOfDomain {
            oracle: NAME,
            domain: domain::SEPARATE_SPECIAL,
            reason: format!("θ0 = {theta0} is neither nπ nor π/2 + nπ"),
        })
    }
}

/// Separate configuration with the robust phases and initial |+⟩, on the
/// first three delay windows, assembled from χ± in closed form.
pub fn separate_piecewise(theta0: f64, gtau: f64, gt: f64) -> Result<OracleResult> {
    const NAME: &str = "separate_piecewise";
    const D: &str = domain::SEPARATE_PIECEWISE;
    require_time(gt, NAME, D)?;
    require_delay(gtau, NAME, D)?;
    require(gt <= 3.0 * gtau + 1e-12, NAME, D, || {
        format!("Γt = {gt} beyond 3Γτ0 = {}", 3.0 * gtau)
    })?;
    let (t, tau) = (gt, gtau);
    let value = if t < tau {
        (-2.0 * t).exp()
    } else if t < 2.0 * tau {
        let s = t - tau;
        let first = (-2.0 * t).exp() - 0.25 * s * s * (-2.0 * s).exp();
        let second = s * (-(2.0 * t - tau)).exp() * theta0.cos();
        first.hypot(second)
    } else {
        let i = Complex64::i();
        let e2 = Complex64::cis(2.0 * theta0);
        let u = t - 2.0 * tau;
        let chi_plus = (-t).exp() * (1.0 + (2.0 * tau).exp() * (-e2 * u + 0.125 * e2 * u * u));
        let chi_minus = -0.5 * i * (t - tau) * Complex64::cis(theta0) * (-(t - tau)).exp();
        chi_concurrence(ChiPair { chi_plus, chi_minus })
    };
    ok(value, D)
}

/// e^{−2Γ[1 ± (½cos θ0 + ½cos 3θ0)]t}, + for |+⟩ and − for |−⟩.
pub fn sb_i_markov(theta0: f64, gt: f64, parity: Parity) -> Result<OracleResult> {
    require_time(gt, "sb_I_markov", domain::SB_I_MARKOV)?;
    let sign = match parity {
        Parity::Plus => 1.0,
        Parity::Minus => -1.0,
    };
    let shift = 0.5 * theta0.cos() + 0.5 * (3.0 * theta0).cos();
    ok((-2.0 * (1.0 + sign * shift) * gt).exp(), domain::SB_I_MARKOV)
}

/// 1/(1 + 2Γτ0)²
pub fn sb_i_steady(gtau: f64) -> Result<OracleResult> {
    require_delay(gtau, "sb_I_steady", domain::SB_I_STEADY)?;
    ok(1.0 / (1.0 + 2.0 * gtau).powi(2), domain::SB_I_STEADY)
}

/// e^{−2Γt}·√(cos²[2 Im z] + sinh²[2 Re z]) with z = Γt e^{2iθ0} cos θ0.
pub fn sb_ii_markov(theta0: f64, gt: f64) -> Result<OracleResult> {
    require_time(gt, "sb_II_markov", domain::SB_II_MARKOV)?;
    let z = gt * Complex64::cis(2.0 * theta0) * theta0.cos();
    let value = (-2.0 * gt).exp() * (2.0 * z.im).cos().hypot((2.0 * z.re).sinh());
    ok(value, domain::SB_II_MARKOV)
}

/// 1/(2(1 + 2Γτ0)²)
pub fn sb_ii_steady(gtau: f64) -> Result<OracleResult> {
    require_delay(gtau, "sb_II_steady", domain::SB_II_STEADY)?;
    ok(0.5 / (1.0 + 2.0 * gtau).powi(2), domain::SB_II_STEADY)
}

/// (1 + sin φ)/(2(1 + 2Γτ0)²)
pub fn sb_ii_steady_phase(gtau: f64, phi: f64) -> Result<OracleResult> {
    require_delay(gtau, "sb_II_steady_phase", domain::SB_II_STEADY_PHASE)?;
    ok(
        (1.0 + phi.sin()) * 0.5 / (1.0 + 2.0 * gtau).powi(2),
        domain::SB_II_STEADY_PHASE,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(r: Result<OracleResult>) -> f64 {
        r.unwrap().value
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn nested_examples() {
        for t in [0.0, 1.0, 7.5] {
            close(v(nested_i_markov(PI, t)), 1.0, 1e-15);
            close(v(nested_ii_markov(FRAC_PI_2, t)), 1.0, 1e-15);
            close(v(nested_ii_markov(3.0 * FRAC_PI_2, t)), 1.0, 1e-14);
        }
        close(v(nested_i_markov(0.0, 1.0)), 0.0183156, 1e-7);
        close(v(nested_i_markov(FRAC_PI_2, 1.0)), 0.135335, 1e-6);
        close(v(nested_ii_markov(0.0, 1.0)), (-4.0f64).exp(), 1e-15);
        close(v(nested_i_steady(0.0)), 1.0, 0.0);
        close(v(nested_i_steady(0.8)), 0.308642, 1e-6);
        close(v(nested_i_steady(1.0)), 0.25, 0.0);
        close(v(nested_ii_steady(0.0)), 1.0, 0.0);
        close(v(nested_ii_steady(0.8)), 0.147929, 1e-6);
        close(v(nested_ii_steady(0.4)), v(nested_i_steady(0.8)), 1e-15);
        assert!(nested_i_steady(-0.1).is_err());
        assert!(nested_ii_steady(-0.1).is_err());
    }

    #[test]
    fn separate_special_examples() {
        close(v(separate_special_markov(0.0, 1.0)), (-4.0f64).exp(), 1e-15);
        close(v(separate_special_markov(FRAC_PI_2, 0.0)), 1.0, 0.0);
        close(v(separate_special_markov(FRAC_PI_2, 1.0)), 0.406006, 1e-6);
        close(v(separate_special_markov(3.0 * FRAC_PI_2, 1.0)), 0.406006, 1e-6);
        close(v(separate_special_markov(2.0 * PI, 1.0)), (-4.0f64).exp(), 1e-15);
        assert!(matches!(
            separate_special_markov(1.0, 1.0),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn separate_piecewise_examples() {
        for theta in [0.0, 1.0, 2.5] {
            close(v(separate_piecewise(theta, 0.8, 0.5)), (-1.0f64).exp(), 1e-15);
        }
        close(v(separate_piecewise(FRAC_PI_2, 0.8, 1.0)), 0.128632, 1e-6);
        assert!(separate_piecewise(0.0, 0.8, 2.41).is_err());
        assert!(separate_piecewise(0.0, 0.8, 2.4).is_ok());
    }

    #[test]
    fn separate_piecewise_is_continuous_at_segment_joins() {
        for theta in [0.0, 0.7, FRAC_PI_2, PI, 4.0] {
            for tau in [0.3, 0.8, 2.0] {
                for join in [tau, 2.0 * tau] {
                    let left = v(separate_piecewise(theta, tau, join * (1.0 - 1e-15)));
                    let right = v(separate_piecewise(theta, tau, join));
                    close(left, right, 1e-12);
                }
            }
        }
    }

    #[test]
    fn sb_examples() {
        for t in [0.0, 2.0, 9.0] {
            close(v(sb_i_markov(PI, t, Parity::Plus)), 1.0, 1e-14);
            close(v(sb_i_markov(2.0 * PI, t, Parity::Minus)), 1.0, 1e-14);
            close(v(sb_ii_markov(FRAC_PI_2, t)), (-2.0 * t).exp(), 1e-14);
            close(v(sb_ii_markov(PI, t)), (-2.0 * t).exp() * (2.0 * t).cosh(), 1e-14);
        }
        // Exponent 1 + ½ + ½ = 2 at θ0 = 0.
        close(v(sb_i_markov(0.0, 1.0, Parity::Plus)), (-4.0f64).exp(), 1e-15);
        close(v(sb_i_markov(0.0, 1.0, Parity::Minus)), 1.0, 1e-15);
        close(v(sb_ii_markov(PI, 1.0)), 0.509158, 1e-6);
        close(v(sb_ii_markov(PI, 1.0)), 0.5 * (1.0 + (-4.0f64).exp()), 1e-15);
        close(v(sb_i_steady(0.8)), v(nested_ii_steady(0.8)), 0.0);
        close(v(sb_ii_steady(0.0)), 0.5, 0.0);
        close(v(sb_ii_steady(0.8)), 0.0739645, 1e-7);
        close(v(sb_ii_steady(0.2)), 0.255102, 1e-6);
        for tau in [0.0, 0.2, 0.8] {
            close(v(sb_ii_steady_phase(tau, -FRAC_PI_2)), 0.0, 1e-16);
            close(v(sb_ii_steady_phase(tau, 0.0)), v(sb_ii_steady(tau)), 1e-16);
        }
        close(v(sb_ii_steady_phase(0.8, FRAC_PI_2)), 0.147929, 1e-6);
    }

    #[test]
    fn consistency_web() {
        // Long-time limit of the case-II curve at θ0 = π equals the zero-delay steady value.
        close(v(sb_ii_markov(PI, 40.0)), v(sb_ii_steady(0.0)), 1e-12);
        for theta in [0.0, 1.0, PI] {
            close(v(nested_i_markov(theta, 0.0)), 1.0, 0.0);
        }
    }

    #[test]
    fn values_stay_in_unit_interval() {
        let mut theta = 0.0;
        while theta <= 2.0 * PI {
            for t in [0.0, 0.3, 1.0, 2.4, 10.0] {
                let values = [
                    v(nested_i_markov(theta, t)),
                    v(nested_ii_markov(theta, t)),
                    v(sb_i_markov(theta, t, Parity::Plus)),
                    v(sb_i_markov(theta, t, Parity::Minus)),
                    v(sb_ii_markov(theta, t)),
                    v(separate_piecewise(theta, 0.8, t.min(2.4))),
                ];
                for x in values {
                    assert!((0.0..=1.0 + 1e-12).contains(&x), "θ={theta} t={t}: {x}");
                }
            }
            theta += 0.05;
        }
    }
}
