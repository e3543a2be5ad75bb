//! Density matrix and concurrence of the single-excitation two-atom state.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrator::Trajectory;

/// Slack on the norm precondition for round-off from integration.
const NORM_SLACK: f64 = 1e-12;

/// Concurrence of the X-state built from amplitudes `(c_a, c_b)`: 2|c_a c_b*|.
pub fn concurrence(c_a: Complex64, c_b: Complex64) -> f64 {
    2.0 * (c_a * c_b.conj()).norm()
}

/// Reduced two-atom density matrix in the basis {|ee⟩, |eg⟩, |ge⟩, |gg⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitXState {
    pub rho: [[Complex64; 4]; 4],
}

impl TwoQubitXState {
    pub fn trace(&self) -> Complex64 {
        (0..4).map(|k| self.rho[k][k]).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..4).all(|i| (0..4).all(|j| (self.rho[i][j] - self.rho[j][i].conj()).norm() <= tol))
    }

    /// Eigenvalues from the block structure: ρ_ee, ρ_gg and the two
    /// eigenvalues of the Hermitian {|eg⟩, |ge⟩} block. Ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let p = self.rho[1][1].re;
        let q = self.rho[2][2].re;
        let off = self.rho[1][2].norm();
        let mean = 0.5 * (p + q);
        let half_gap = (0.25 * (p - q) * (p - q) + off * off).sqrt();
        let mut ev = [self.rho[0][0].re, self.rho[3][3].re, mean - half_gap, mean + half_gap];
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Wootters concurrence for an X-state with vanishing |ee⟩ population.
    pub fn concurrence(&self) -> f64 {
        2.0 * self.rho[1][2].norm()
    }
}

pub fn density_matrix(c_a: Complex64, c_b: Complex64) -> Result<TwoQubitXState> {
    let pop_a = c_a.norm_sqr();
    let pop_b = c_b.norm_sqr();
    let norm = pop_a + pop_b;
    if norm.is_nan() || norm > 1.0 + NORM_SLACK {
        return Err(Error::NormExceeded(norm));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut rho = [[zero; 4]; 4];
    rho[1][1] = Complex64::new(pop_a, 0.0);
    rho[1][2] = c_a * c_b.conj();
    rho[2][1] = c_a.conj() * c_b;
    rho[2][2] = Complex64::new(pop_b, 0.0);
    rho[3][3] = Complex64::new(1.0 - norm, 0.0);
    Ok(TwoQubitXState { rho })
}

/// Symmetric and antisymmetric amplitudes χ± = (c_a ± c_b)/√2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiPair {
    pub chi_plus: Complex64,
    pub chi_minus: Complex64,
}

pub fn to_chi(c_a: Complex64, c_b: Complex64) -> ChiPair {
    ChiPair {
        chi_plus: (c_a + c_b) * FRAC_1_SQRT_2,
        chi_minus: (c_a - c_b) * FRAC_1_SQRT_2,
    }
}

/// Concurrence written in χ±: | |χ₊|² − |χ₋|² + 2i·Im(χ₊ χ₋*) |.
pub fn chi_concurrence(chi: ChiPair) -> f64 {
    let re = chi.chi_plus.norm_sqr() - chi.chi_minus.norm_sqr();
    let im = 2.0 * (chi.chi_plus * chi.chi_minus.conj()).im;
    re.hypot(im)
}

/// Pointwise concurrence along a trajectory.
pub fn concurrence_series(traj: &Trajectory) -> Vec<f64> {
    traj.amps.iter().map(|[a, b]| concurrence(*a, *b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dde_model::{build_equations, canonicalize, EquationSet, SUPPRESSION_TOL};
    use crate::geometry::{standard_layout, CouplingPhases, Topology};
    use crate::integrator::{integrate, solve_markovian, InitialState};
    use nalgebra::Matrix4;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    type C = Complex64;

    fn random_pair(rng: &mut impl Rng) -> (C, C) {
        // Uniform over the unit ball of C² restricted to norm ≤ 1.
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let r = rng.gen_range(0.0..1.0f64).sqrt();
        let s = r / n;
        (C::new(v[0] * s, v[1] * s), C::new(v[2] * s, v[3] * s))
    }

    /// Eigenvalue definition of concurrence: λ_i from √ρ ρ̃ √ρ with
    /// ρ̃ = (σy⊗σy) ρ* (σy⊗σy).
    fn wootters(rho: &TwoQubitXState) -> f64 {
        let m = Matrix4::from_fn(|i, j| rho.rho[i][j]);
        let sy = nalgebra::Matrix2::new(C::new(0.0, 0.0), C::new(0.0, -1.0), C::new(0.0, 1.0), C::new(0.0, 0.0));
        let yy = sy.kronecker(&sy);
        let tilde = yy * m.conjugate() * yy;
        let eig = m.symmetric_eigen();
        let sqrt_diag = nalgebra::Matrix4::from_diagonal(&eig.eigenvalues.map(|x| C::new(x.max(0.0).sqrt(), 0.0)));
        let sqrt_rho = eig.eigenvectors * sqrt_diag * eig.eigenvectors.adjoint();
        let r = sqrt_rho * tilde * sqrt_rho;
        let r = (r + r.adjoint()) * C::new(0.5, 0.0);
        let mut lambdas: Vec<f64> = r
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|x| x.max(0.0).sqrt())
            .collect();
        lambdas.sort_by(|a, b| b.total_cmp(a));
        (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
    }

    #[test]
    fn concurrence_examples() {
        let h = C::new(FRAC_1_SQRT_2, 0.0);
        assert!((concurrence(h, h) - 1.0).abs() < 1e-15);
        assert_eq!(concurrence(C::new(1.0, 0.0), C::new(0.0, 0.0)), 0.0);
        for phi in [0.3, 1.0, PI, 5.0] {
            assert!((concurrence(h, C::from_polar(FRAC_1_SQRT_2, phi)) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn density_matrix_examples() {
        let zero = C::new(0.0, 0.0);
        let vac = density_matrix(zero, zero).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == 3 && j == 3 { 1.0 } else { 0.0 };
                assert_eq!(vac.rho[i][j], C::new(expected, 0.0));
            }
        }
        let h = C::new(FRAC_1_SQRT_2, 0.0);
        let plus = density_matrix(h, h).unwrap();
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert!((plus.rho[i][j] - C::new(0.5, 0.0)).norm() < 1e-15);
        }
        assert!(plus.rho[3][3].norm() < 1e-15);
        assert!(matches!(
            density_matrix(C::new(1.0, 0.0), C::new(0.5, 0.0)),
            Err(Error::NormExceeded(_))
        ));
    }

    #[test]
    fn closed_form_matches_eigenvalue_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let (a, b) = random_pair(&mut rng);
            let rho = density_matrix(a, b).unwrap();
            let w = wootters(&rho);
            assert!((w - concurrence(a, b)).abs() < 1e-7, "{w} vs {}", concurrence(a, b));
            assert!((rho.concurrence() - concurrence(a, b)).abs() < 1e-15);
        }
    }

    #[test]
    fn block_eigenvalues_match_dense_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (a, b) = random_pair(&mut rng);
            let rho = density_matrix(a, b).unwrap();
            let mut dense: Vec<f64> = Matrix4::from_fn(|i, j| rho.rho[i][j])
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .collect();
            dense.sort_by(f64::total_cmp);
            for (x, y) in dense.iter().zip(rho.eigenvalues()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chi_examples() {
        let h = C::new(FRAC_1_SQRT_2, 0.0);
        let chi = to_chi(h, h);
        assert!((chi.chi_plus - C::new(1.0, 0.0)).norm() < 1e-15);
        assert!(chi.chi_minus.norm() < 1e-15);
        assert!((chi_concurrence(chi) - 1.0).abs() < 1e-15);
        let chi = to_chi(h, -h);
        assert!(chi.chi_plus.norm() < 1e-15);
        assert!((chi.chi_minus - C::new(1.0, 0.0)).norm() < 1e-15);
        assert!((chi_concurrence(chi) - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn chi_route_agrees(re_a in -1.0..1.0f64, im_a in -1.0..1.0f64, re_b in -1.0..1.0f64, im_b in -1.0..1.0f64) {
            let (a, b) = (C::new(re_a, im_a), C::new(re_b, im_b));
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt().max(1.0);
            let (a, b) = (a / n, b / n);
            let chi = to_chi(a, b);
            prop_assert!((chi.chi_plus.norm_sqr() + chi.chi_minus.norm_sqr() - a.norm_sqr() - b.norm_sqr()).abs() < 1e-14);
            prop_assert!((chi_concurrence(chi) - concurrence(a, b)).abs() < 1e-12);
            let c = concurrence(a, b);
            prop_assert!(c <= a.norm_sqr() + b.norm_sqr() + 1e-15);
            let rho = density_matrix(a, b).unwrap();
            prop_assert!(rho.is_hermitian(0.0));
            prop_assert!((rho.trace() - C::new(1.0, 0.0)).norm() < 1e-14);
            prop_assert!(rho.eigenvalues()[0] >= -1e-12);
        }

        #[test]
        fn global_phase_invariance(re_a in -0.7..0.7f64, im_a in -0.7..0.7f64, re_b in -0.7..0.7f64, im_b in -0.7..0.7f64, alpha in -10.0..10.0f64) {
            let (a, b) = (C::new(re_a, im_a), C::new(re_b, im_b));
            let g = C::cis(alpha);
            prop_assert!((concurrence(g * a, g * b) - concurrence(a, b)).abs() < 1e-14);
        }
    }

    #[test]
    fn series_of_constant_and_isolated_trajectories() {
        let h = C::new(FRAC_1_SQRT_2, 0.0);
        let traj = Trajectory {
            dt: 0.5,
            times: vec![0.0, 0.5, 1.0],
            amps: vec![[h, h]; 3],
        };
        assert_eq!(concurrence_series(&traj).len(), 3);
        assert!(concurrence_series(&traj).iter().all(|c| (c - 1.0).abs() < 1e-15));

        let isolated = EquationSet::new(1.0, vec![]);
        let traj = integrate(&isolated, InitialState::plus(), 3.0, 1e-3).unwrap();
        for (t, c) in traj.times.iter().zip(concurrence_series(&traj)) {
            assert!((c - (-2.0 * t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn nested_case_i_markovian_at_quarter_turn() {
        let layout = standard_layout(Topology::Nested, FRAC_PI_2, 0.0, CouplingPhases::nested_case_i()).unwrap();
        let set = canonicalize(&build_equations(&layout, 1.0), SUPPRESSION_TOL);
        let traj = solve_markovian(&set, InitialState::plus(), 5.0, 0.01).unwrap();
        for (t, c) in traj.times.iter().zip(concurrence_series(&traj)) {
            assert!((c - (-2.0 * t).exp()).abs() < 1e-12);
        }
    }
}
