//! Coupling-point layouts on the waveguide.
//!
//! Every point carries cumulative coordinates measured from the leftmost
//! point: an accumulated phase k₀x and an accumulated propagation time x/v_g
//! (in units of 1/Γ). Pairwise phase shifts and delays are absolute
//! differences of these coordinates. Phase and delay are independent inputs,
//! so a layout can hold, e.g., a zero phase gap with a finite delay.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    A,
    B,
}

impl Atom {
    pub const BOTH: [Atom; 2] = [Atom::A, Atom::B];

    /// Position of this atom's amplitude in a `[c_a, c_b]` pair.
    pub fn slot(self) -> usize {
        match self {
            Atom::A => 0,
            Atom::B => 1,
        }
    }

    pub fn other(self) -> Atom {
        match self {
            Atom::A => Atom::B,
            Atom::B => Atom::A,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Atom::A => "a",
            Atom::B => "b",
        })
    }
}

/// Identifies coupling point `index` (1 or 2) of `atom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PointId {
    pub atom: Atom,
    pub index: u8,
}

impl PointId {
    pub const A1: PointId = PointId {
        atom: Atom::A,
        index: 1,
    };
    pub const A2: PointId = PointId {
        atom: Atom::A,
        index: 2,
    };
    pub const B1: PointId = PointId {
        atom: Atom::B,
        index: 1,
    };
    pub const B2: PointId = PointId {
        atom: Atom::B,
        index: 2,
    };

    pub fn new(atom: Atom, index: u8) -> Self {
        Self { atom, index }
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.atom, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingPoint {
    pub atom: Atom,
    pub index: u8,
    /// Accumulated phase k₀x from the leftmost point, radians.
    pub phase_coord: f64,
    /// Accumulated propagation time from the leftmost point, units of 1/Γ.
    pub delay_coord: f64,
    /// Coupling phase φ imprinted at this point, radians.
    pub coupling_phase: f64,
}

impl CouplingPoint {
    pub fn id(&self) -> PointId {
        PointId::new(self.atom, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    Separate,
    Braided,
    Nested,
}

impl Topology {
    /// Atom order along the waveguide used by [`standard_layout`].
    ///
    /// For the nested topology atom `a` sits inside atom `b`.
    fn standard_order(self) -> [PointId; 4] {
        use PointId as P;
        match self {
            Topology::Separate => [P::A1, P::A2, P::B1, P::B2],
            Topology::Braided => [P::A1, P::B1, P::A2, P::B2],
            Topology::Nested => [P::B1, P::A1, P::A2, P::B2],
        }
    }

    fn classify(labels: [Atom; 4]) -> Topology {
        let [p, q, r, s] = labels;
        if p == q {
            Topology::Separate
        } else if p == r {
            Topology::Braided
        } else {
            debug_assert!(p == s && q == r);
            Topology::Nested
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Separate => "separate",
            Topology::Braided => "braided",
            Topology::Nested => "nested",
        })
    }
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separate" => Ok(Topology::Separate),
            "braided" => Ok(Topology::Braided),
            "nested" => Ok(Topology::Nested),
            other => Err(Error::InvalidLayout(format!(
                "unknown topology {other:?} (expected separate, braided or nested)"
            ))),
        }
    }
}

/// The four coupling phases φ_a1, φ_a2, φ_b1, φ_b2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingPhases {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl CouplingPhases {
    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64) -> Self {
        Self { a1, a2, b1, b2 }
    }

    pub fn uniform(phi: f64) -> Self {
        Self::new(phi, phi, phi, phi)
    }

    /// Nested configuration, case I: φ_a1 = φ_b1 = 0, φ_a2 = φ_b2 = π/2.
    pub fn nested_case_i() -> Self {
        Self::new(0.0, FRAC_PI_2, 0.0, FRAC_PI_2)
    }

    /// Nested configuration, case II: φ_a1 = φ_b2 = 0, φ_a2 = φ_b1 = π/2.
    pub fn nested_case_ii() -> Self {
        Self::new(0.0, FRAC_PI_2, FRAC_PI_2, 0.0)
    }

    /// Separate configuration with θ-robust dynamics. Same values as
    /// [`CouplingPhases::nested_case_i`].
    pub fn separate_robust() -> Self {
        Self::nested_case_i()
    }

    /// Separate/braided equivalence, case I: φ_a1 = φ_b2 = 0, φ_a2 = φ_b1 = π/2.
    pub fn sb_case_i() -> Self {
        Self::new(0.0, FRAC_PI_2, FRAC_PI_2, 0.0)
    }

    /// Separate/braided equivalence, case II: φ_a1 = φ_b1 = 0,
    /// φ_a2 = 3π/2, φ_b2 = π/2.
    pub fn sb_case_ii() -> Self {
        Self::new(0.0, 3.0 * FRAC_PI_2, 0.0, FRAC_PI_2)
    }

    pub fn get(&self, id: PointId) -> Result<f64> {
        match (id.atom, id.index) {
            (Atom::A, 1) => Ok(self.a1),
            (Atom::A, 2) => Ok(self.a2),
            (Atom::B, 1) => Ok(self.b1),
            (Atom::B, 2) => Ok(self.b2),
            _ => Err(Error::UnknownPoint(id.to_string())),
        }
    }

    pub fn shifted(&self, delta: f64) -> Self {
        Self::new(self.a1 + delta, self.a2 + delta, self.b1 + delta, self.b2 + delta)
    }
}

/// Phase shift and delay between two coupling points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetrics {
    pub phase_shift: f64,
    pub delay: f64,
}

/// Four coupling points ordered along the waveguide, two per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    points: [CouplingPoint; 4],
}

fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeParameter { name, value })
    }
}

impl Layout {
    /// Builds a layout from explicit points.
    ///
    /// Points are sorted by phase coordinate (ties broken by delay
    /// coordinate, then input order). Each atom must own exactly the indices
    /// 1 and 2, and the delay coordinates must be non-decreasing in that
    /// order.
    pub fn from_points(points: Vec<CouplingPoint>) -> Result<Self> {
        let mut points: [CouplingPoint; 4] = points
            .try_into()
            .map_err(|p: Vec<_>| Error::InvalidLayout(format!("expected 4 coupling points, got {}", p.len())))?;
        for p in &points {
            check_non_negative("phase_coord", p.phase_coord)?;
            check_non_negative("delay_coord", p.delay_coord)?;
            if !p.coupling_phase.is_finite() {
                return Err(Error::InvalidLayout(format!(
                    "coupling phase of {} is not finite",
                    p.id()
                )));
            }
        }
        for atom in Atom::BOTH {
            for index in [1, 2] {
                let n = points.iter().filter(|p| p.atom == atom && p.index == index).count();
                if n != 1 {
                    return Err(Error::InvalidLayout(format!(
                        "atom {atom} must have exactly one point with index {index}, found {n}"
                    )));
                }
            }
        }
        points.sort_by(|p, q| {
            p.phase_coord
                .total_cmp(&q.phase_coord)
                .then(p.delay_coord.total_cmp(&q.delay_coord))
        });
        if points.windows(2).any(|w| w[1].delay_coord < w[0].delay_coord) {
            return Err(Error::InvalidLayout(
                "delay coordinates must follow the phase-coordinate ordering".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[CouplingPoint; 4] {
        &self.points
    }

    pub fn point(&self, id: PointId) -> Result<&CouplingPoint> {
        self.points
            .iter()
            .find(|p| p.id() == id)
            .ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    pub fn topology(&self) -> Topology {
        Topology::classify(self.points.map(|p| p.atom))
    }

    pub fn coupling_phases(&self) -> CouplingPhases {
        let phase = |id| self.point(id).map(|p| p.coupling_phase).unwrap_or(0.0);
        CouplingPhases::new(
            phase(PointId::A1),
            phase(PointId::A2),
            phase(PointId::B1),
            phase(PointId::B2),
        )
    }

    /// Same geometry with new coupling phases.
    pub fn with_coupling_phases(&self, phases: CouplingPhases) -> Self {
        let mut out = self.clone();
        for p in out.points.iter_mut() {
            // Every point of a validated layout has index 1 or 2.
            p.coupling_phase = phases.get(p.id()).unwrap_or(p.coupling_phase);
        }
        out
    }

    /// Shifts every point by the same phase and delay offset.
    pub fn translated(&self, phase_offset: f64, delay_offset: f64) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| CouplingPoint {
                phase_coord: p.phase_coord + phase_offset,
                delay_coord: p.delay_coord + delay_offset,
                ..*p
            })
            .collect();
        Self::from_points(points)
    }

    pub fn pair_metrics(&self, i: PointId, j: PointId) -> Result<PairMetrics> {
        let (p, q) = (self.point(i)?, self.point(j)?);
        Ok(metrics_between(p, q))
    }
}

pub(crate) fn metrics_between(p: &CouplingPoint, q: &CouplingPoint) -> PairMetrics {
    PairMetrics {
        phase_shift: (p.phase_coord - q.phase_coord).abs(),
        delay: (p.delay_coord - q.delay_coord).abs(),
    }
}

/// Four equally spaced points in the standard atom order of `topology`.
pub fn standard_layout(topology: Topology, gap_phase: f64, gap_delay: f64, phases: CouplingPhases) -> Result<Layout> {
    check_non_negative("gap_phase", gap_phase)?;
    check_non_negative("gap_delay", gap_delay)?;
    let points = topology
        .standard_order()
        .iter()
        .enumerate()
        .map(|(k, id)| {
            Ok(CouplingPoint {
                atom: id.atom,
                index: id.index,
                phase_coord: k as f64 * gap_phase,
                delay_coord: k as f64 * gap_delay,
                coupling_phase: phases.get(*id)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Layout::from_points(points)
}

/// Nested layout with atom `a` inside atom `b`.
///
/// The outer-to-inner gaps on both sides are (`theta_beta`, `tau_beta`) and
/// the gap between the two points of the inner atom is
/// (`theta_alpha`, `tau_alpha`).
pub fn nested_layout(
    theta_alpha: f64,
    tau_alpha: f64,
    theta_beta: f64,
    tau_beta: f64,
    phases: CouplingPhases,
) -> Result<Layout> {
    check_non_negative("theta_alpha", theta_alpha)?;
    check_non_negative("tau_alpha", tau_alpha)?;
    check_non_negative("theta_beta", theta_beta)?;
    check_non_negative("tau_beta", tau_beta)?;
    let coords = [
        (PointId::B1, 0.0, 0.0),
        (PointId::A1, theta_beta, tau_beta),
        (PointId::A2, theta_beta + theta_alpha, tau_beta + tau_alpha),
        (
            PointId::B2,
            theta_beta + theta_alpha + theta_beta,
            tau_beta + tau_alpha + tau_beta,
        ),
    ];
    let points = coords
        .iter()
        .map(|&(id, phase_coord, delay_coord)| {
            Ok(CouplingPoint {
                atom: id.atom,
                index: id.index,
                phase_coord,
                delay_coord,
                coupling_phase: phases.get(id)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Layout::from_points(points)
}

pub fn pair_metrics(layout: &Layout, i: PointId, j: PointId) -> Result<PairMetrics> {
    layout.pair_metrics(i, j)
}

/// Reduces an angle to [0, 2π).
pub fn wrap_phase(phi: f64) -> f64 {
    phi.rem_euclid(2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn sep_phases() -> CouplingPhases {
        CouplingPhases::new(0.0, FRAC_PI_2, 0.0, FRAC_PI_2)
    }

    #[test]
    fn standard_separate_is_uniformly_spaced() {
        let l = standard_layout(Topology::Separate, PI, 0.8, sep_phases()).unwrap();
        let phases: Vec<f64> = l.points().iter().map(|p| p.phase_coord).collect();
        assert_eq!(phases, vec![0.0, PI, 2.0 * PI, 3.0 * PI]);
        let atoms: Vec<Atom> = l.points().iter().map(|p| p.atom).collect();
        assert_eq!(atoms, vec![Atom::A, Atom::A, Atom::B, Atom::B]);
        assert_eq!(l.topology(), Topology::Separate);
    }

    #[test]
    fn standard_nested_puts_atom_a_inside() {
        let l = standard_layout(Topology::Nested, PI, 0.8, sep_phases()).unwrap();
        let atoms: Vec<Atom> = l.points().iter().map(|p| p.atom).collect();
        assert_eq!(atoms, vec![Atom::B, Atom::A, Atom::A, Atom::B]);
        for w in l.points().windows(2) {
            let m = metrics_between(&w[0], &w[1]);
            assert!((m.phase_shift - PI).abs() < 1e-15);
            assert!((m.delay - 0.8).abs() < 1e-15);
        }
        assert_eq!(l.topology(), Topology::Nested);
    }

    #[test]
    fn braided_collocated_has_zero_metrics() {
        let l = standard_layout(Topology::Braided, 0.0, 0.0, CouplingPhases::uniform(1.3)).unwrap();
        assert_eq!(l.topology(), Topology::Braided);
        for p in l.points() {
            for q in l.points() {
                let m = l.pair_metrics(p.id(), q.id()).unwrap();
                assert_eq!((m.phase_shift, m.delay), (0.0, 0.0));
            }
        }
    }

    #[test]
    fn negative_gaps_rejected() {
        assert!(matches!(
            standard_layout(Topology::Separate, -0.1, 0.8, sep_phases()),
            Err(Error::NegativeParameter { name: "gap_phase", .. })
        ));
        assert!(standard_layout(Topology::Separate, 0.1, -0.8, sep_phases()).is_err());
        assert!(standard_layout(Topology::Separate, 0.1, f64::NAN, sep_phases()).is_err());
        assert!(nested_layout(1.0, -1.0, 1.0, 1.0, sep_phases()).is_err());
    }

    #[test]
    fn pair_metrics_examples() {
        let l = standard_layout(Topology::Separate, FRAC_PI_2, 0.8, sep_phases()).unwrap();
        let m = l.pair_metrics(PointId::A1, PointId::A2).unwrap();
        assert_eq!((m.phase_shift, m.delay), (FRAC_PI_2, 0.8));
        let m = l.pair_metrics(PointId::A1, PointId::B2).unwrap();
        assert!((m.phase_shift - 3.0 * FRAC_PI_2).abs() < 1e-15);
        assert!((m.delay - 2.4).abs() < 1e-15);
        let m = l.pair_metrics(PointId::B1, PointId::B1).unwrap();
        assert_eq!((m.phase_shift, m.delay), (0.0, 0.0));
        // Symmetric in its arguments.
        assert_eq!(
            l.pair_metrics(PointId::B2, PointId::A2).unwrap(),
            l.pair_metrics(PointId::A2, PointId::B2).unwrap()
        );
    }

    #[test]
    fn unknown_point_is_an_error() {
        let l = standard_layout(Topology::Separate, 1.0, 1.0, sep_phases()).unwrap();
        let err = l.pair_metrics(PointId::new(Atom::A, 3), PointId::A1).unwrap_err();
        assert_eq!(err, Error::UnknownPoint("a3".into()));
    }

    #[test]
    fn nested_layout_matches_standard_when_gaps_equal() {
        let phases = CouplingPhases::nested_case_i();
        let a = standard_layout(Topology::Nested, 1.1, 0.7, phases).unwrap();
        let b = nested_layout(1.1, 0.7, 1.1, 0.7, phases).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nested_layout_collapsed_inner_atom() {
        let l = nested_layout(0.0, 0.0, PI, 0.8, CouplingPhases::nested_case_i()).unwrap();
        let a1 = l.point(PointId::A1).unwrap();
        let a2 = l.point(PointId::A2).unwrap();
        assert_eq!(a1.phase_coord, a2.phase_coord);
        assert_eq!(a1.delay_coord, a2.delay_coord);
        assert_eq!(l.topology(), Topology::Nested);
    }

    #[test]
    fn from_points_validation() {
        let mk = |atom, index, x: f64, t: f64| CouplingPoint {
            atom,
            index,
            phase_coord: x,
            delay_coord: t,
            coupling_phase: 0.0,
        };
        // Wrong count.
        assert!(Layout::from_points(vec![mk(Atom::A, 1, 0.0, 0.0)]).is_err());
        // Atom a owns three points.
        assert!(Layout::from_points(vec![
            mk(Atom::A, 1, 0.0, 0.0),
            mk(Atom::A, 2, 1.0, 1.0),
            mk(Atom::A, 2, 2.0, 2.0),
            mk(Atom::B, 1, 3.0, 3.0),
        ])
        .is_err());
        // Delay ordering contradicts phase ordering.
        assert!(Layout::from_points(vec![
            mk(Atom::A, 1, 0.0, 0.0),
            mk(Atom::A, 2, 1.0, 2.0),
            mk(Atom::B, 1, 2.0, 1.0),
            mk(Atom::B, 2, 3.0, 3.0),
        ])
        .is_err());
        // Unsorted input is sorted.
        let l = Layout::from_points(vec![
            mk(Atom::B, 2, 3.0, 3.0),
            mk(Atom::A, 1, 0.0, 0.0),
            mk(Atom::B, 1, 1.0, 1.0),
            mk(Atom::A, 2, 2.0, 2.0),
        ])
        .unwrap();
        assert_eq!(l.topology(), Topology::Braided);
    }

    #[test]
    fn mirrored_sequences_classify_the_same() {
        use Atom::*;
        assert_eq!(Topology::classify([B, B, A, A]), Topology::Separate);
        assert_eq!(Topology::classify([B, A, B, A]), Topology::Braided);
        assert_eq!(Topology::classify([A, B, B, A]), Topology::Nested);
    }

    fn gaps() -> impl Strategy<Value = [(f64, f64); 3]> {
        prop::array::uniform3((0.0..10.0f64, 0.0..5.0f64))
    }

    fn layout_from_gaps(order: [PointId; 4], gaps: [(f64, f64); 3]) -> Layout {
        let mut x = 0.0;
        let mut t = 0.0;
        let mut points = Vec::new();
        for (k, id) in order.iter().enumerate() {
            if k > 0 {
                x += gaps[k - 1].0;
                t += gaps[k - 1].1;
            }
            points.push(CouplingPoint {
                atom: id.atom,
                index: id.index,
                phase_coord: x,
                delay_coord: t,
                coupling_phase: 0.0,
            });
        }
        Layout::from_points(points).unwrap()
    }

    proptest! {
        #[test]
        fn metrics_are_additive(g in gaps(), topo in 0usize..3) {
            let topo = [Topology::Separate, Topology::Braided, Topology::Nested][topo];
            let l = layout_from_gaps(topo.standard_order(), g);
            let p = l.points();
            for i in 0..4 {
                for j in i..4 {
                    for k in j..4 {
                        let ij = metrics_between(&p[i], &p[j]);
                        let jk = metrics_between(&p[j], &p[k]);
                        let ik = metrics_between(&p[i], &p[k]);
                        let scale = p[3].phase_coord.max(p[3].delay_coord).max(1.0);
                        prop_assert!((ij.phase_shift + jk.phase_shift - ik.phase_shift).abs() <= 4.0 * f64::EPSILON * scale);
                        prop_assert!((ij.delay + jk.delay - ik.delay).abs() <= 4.0 * f64::EPSILON * scale);
                    }
                }
            }
        }

        #[test]
        fn topology_survives_translation(g in gaps(), dx in 0.0..100.0f64, dt in 0.0..50.0f64, topo in 0usize..3) {
            let topo = [Topology::Separate, Topology::Braided, Topology::Nested][topo];
            let l = layout_from_gaps(topo.standard_order(), g);
            prop_assert_eq!(l.topology(), topo);
            prop_assert_eq!(l.translated(dx, dt).unwrap().topology(), topo);
        }
    }
}
