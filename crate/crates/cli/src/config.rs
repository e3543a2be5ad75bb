//! Scenario files: TOML with the sections [layout], [phases], [initial],
//! [integrator] and an optional [sweep].
//!
//! Angles may be written as numbers or as multiples of pi ("pi/2",
//! "3pi/2", "-0.5pi", "2*pi").

use std::fmt;
use std::num::NonZeroUsize;
use std::path::Path;
use std::str::FromStr;

use giant_atoms::geometry::{nested_layout, standard_layout};
use giant_atoms::integrator::{DEFAULT_DT, DEFAULT_WINDOW};
use giant_atoms::{Atom, CouplingPhases, CouplingPoint, InitialState, Layout, Topology};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] giant_atoms::Error),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

/// An angle in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

impl FromStr for Angle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let compact: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_lowercase();
        let err = || format!("cannot read {s:?} as an angle");
        let Some(pos) = compact.find("pi") else {
            return compact.parse().map(Angle).map_err(|_| err());
        };
        let (head, tail) = (&compact[..pos], &compact[pos + 2..]);
        let head = head.strip_suffix('*').unwrap_or(head);
        let factor = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|_| err())?,
        };
        let divisor = match tail {
            "" => 1.0,
            t => t
                .strip_prefix('/')
                .and_then(|d| d.parse::<f64>().ok())
                .ok_or_else(err)?,
        };
        let value = factor * std::f64::consts::PI / divisor;
        if value.is_finite() {
            Ok(Angle(value))
        } else {
            Err(err())
        }
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Angle;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a multiple of pi such as \"3pi/2\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                v.parse().map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// Finite, non-negative real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonNegative(pub f64);

impl<'de> Deserialize<'de> for NonNegative {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let Angle(v) = Angle::deserialize(d)?;
        if v.is_finite() && v >= 0.0 {
            Ok(NonNegative(v))
        } else {
            Err(de::Error::custom(format!("expected a non-negative value, got {v}")))
        }
    }
}

/// Finite, strictly positive real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Positive(pub f64);

impl<'de> Deserialize<'de> for Positive {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let NonNegative(v) = NonNegative::deserialize(d)?;
        if v > 0.0 {
            Ok(Positive(v))
        } else {
            Err(de::Error::custom("expected a positive value"))
        }
    }
}

fn from_str_field<'de, D, T>(d: D) -> Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: fmt::Display,
{
    String::deserialize(d)?.parse().map_err(de::Error::custom)
}

fn from_str_opt<'de, D, T>(d: D) -> Result<Option<T>, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: fmt::Display,
{
    from_str_field(d).map(Some)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialSpec {
    Plus,
    Minus,
    Eg,
    Ge,
    Phase(f64),
}

impl InitialSpec {
    pub fn state(self) -> InitialState {
        match self {
            InitialSpec::Plus => InitialState::plus(),
            InitialSpec::Minus => InitialState::minus(),
            InitialSpec::Eg => InitialState::eg(),
            InitialSpec::Ge => InitialState::ge(),
            InitialSpec::Phase(phi) => InitialState::with_phase(phi),
        }
    }
}

impl FromStr for InitialSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "plus" | "+" => Ok(InitialSpec::Plus),
            "minus" | "-" => Ok(InitialSpec::Minus),
            "eg" => Ok(InitialSpec::Eg),
            "ge" => Ok(InitialSpec::Ge),
            other => match other.strip_prefix("phase:") {
                Some(phi) => Ok(InitialSpec::Phase(phi.parse::<Angle>()?.0)),
                None => Err(format!(
                    "unknown initial state {other:?}; expected plus, minus, eg, ge or phase:<angle>"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum PhasePreset {
    #[serde(rename = "nested-case-I")]
    NestedCaseI,
    #[serde(rename = "nested-case-II")]
    NestedCaseII,
    #[serde(rename = "sep-case-IV")]
    SepCaseIV,
    #[serde(rename = "sb-case-I")]
    SbCaseI,
    #[serde(rename = "sb-case-II")]
    SbCaseII,
}

impl PhasePreset {
    pub fn phases(self) -> CouplingPhases {
        match self {
            PhasePreset::NestedCaseI => CouplingPhases::nested_case_i(),
            PhasePreset::NestedCaseII => CouplingPhases::nested_case_ii(),
            PhasePreset::SepCaseIV => CouplingPhases::separate_robust(),
            PhasePreset::SbCaseI => CouplingPhases::sb_case_i(),
            PhasePreset::SbCaseII => CouplingPhases::sb_case_ii(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Theta0,
    Tau0,
    ThetaAlpha,
    PhiA1,
    PhiA2,
    PhiB1,
    PhiB2,
    InitPhase,
}

impl AxisName {
    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::Theta0 => "theta0",
            AxisName::Tau0 => "tau0",
            AxisName::ThetaAlpha => "theta_alpha",
            AxisName::PhiA1 => "phi_a1",
            AxisName::PhiA2 => "phi_a2",
            AxisName::PhiB1 => "phi_b1",
            AxisName::PhiB2 => "phi_b2",
            AxisName::InitPhase => "init_phase",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    #[default]
    Time,
    Steady,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    #[serde(deserialize_with = "from_str_field")]
    atom: AtomName,
    index: u8,
    phase: NonNegative,
    delay: NonNegative,
}

#[derive(Debug, Clone, Copy)]
struct AtomName(Atom);

impl FromStr for AtomName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "a" => Ok(AtomName(Atom::A)),
            "b" => Ok(AtomName(Atom::B)),
            _ => Err(format!("unknown atom {s:?}; expected \"a\" or \"b\"")),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayout {
    #[serde(default, deserialize_with = "from_str_opt")]
    topology: Option<Topology>,
    theta0: Option<NonNegative>,
    tau0: Option<NonNegative>,
    theta_alpha: Option<NonNegative>,
    tau_alpha: Option<NonNegative>,
    theta_beta: Option<NonNegative>,
    tau_beta: Option<NonNegative>,
    points: Option<Vec<RawPoint>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhases {
    preset: Option<PhasePreset>,
    a1: Option<Angle>,
    a2: Option<Angle>,
    b1: Option<Angle>,
    b2: Option<Angle>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    #[serde(deserialize_with = "from_str_field")]
    state: InitialSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    t_end: NonNegative,
    dt: Option<Positive>,
    window: Option<Positive>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: AxisName,
    pub start: Angle,
    pub stop: Angle,
    pub count: NonZeroUsize,
}

impl AxisSpec {
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count.get();
        let (a, b) = (self.start.0, self.stop.0);
        if n == 1 {
            return vec![a];
        }
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(default)]
    mode: SweepMode,
    samples: Option<NonZeroUsize>,
    axes: Vec<AxisSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    layout: RawLayout,
    phases: Option<RawPhases>,
    initial: Option<RawInitial>,
    integrator: RawIntegrator,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayoutSpec {
    Standard {
        topology: Topology,
        theta0: f64,
        tau0: f64,
    },
    /// `tau_alpha = None` means τ_α = θ_α τ_β / θ_β.
    Nested {
        theta_alpha: f64,
        tau_alpha: Option<f64>,
        theta_beta: f64,
        tau_beta: f64,
    },
    /// (atom, index, phase coordinate, delay coordinate)
    Points(Vec<(Atom, u8, f64, f64)>),
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub samples: usize,
    pub axes: Vec<AxisSpec>,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub layout: LayoutSpec,
    pub phases: CouplingPhases,
    pub initial: InitialSpec,
    pub t_end: f64,
    pub dt: f64,
    pub window: f64,
    pub sweep: Option<SweepSpec>,
}

const DEFAULT_SAMPLES: usize = 101;

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        let layout = resolve_layout(raw.layout)?;
        let phases = resolve_phases(raw.phases.unwrap_or_default())?;
        let initial = raw.initial.map_or(InitialSpec::Plus, |i| i.state);
        let sweep = raw
            .sweep
            .map(|s| {
                if s.axes.is_empty() || s.axes.len() > 2 {
                    return invalid(format!("[sweep] needs 1 or 2 axes, got {}", s.axes.len()));
                }
                Ok(SweepSpec {
                    mode: s.mode,
                    samples: s.samples.map_or(DEFAULT_SAMPLES, NonZeroUsize::get),
                    axes: s.axes,
                })
            })
            .transpose()?;
        let scenario = Scenario {
            layout,
            phases,
            initial,
            t_end: raw.integrator.t_end.0,
            dt: raw.integrator.dt.map_or(DEFAULT_DT, |p| p.0),
            window: raw.integrator.window.map_or(DEFAULT_WINDOW, |p| p.0),
            sweep,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            ConfigError::Parse(p) => ConfigError::Invalid(format!("{}: {p}", path.display())),
            ConfigError::Invalid(m) => ConfigError::Invalid(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.build_layout()?;
        let Some(sweep) = &self.sweep else { return Ok(()) };
        if sweep.axes.len() == 2 && sweep.axes[0].name == sweep.axes[1].name {
            return invalid(format!("[sweep] axis {} listed twice", sweep.axes[0].name.as_str()));
        }
        for axis in &sweep.axes {
            let ok = match (axis.name, &self.layout) {
                (AxisName::Theta0 | AxisName::Tau0, LayoutSpec::Standard { .. }) => true,
                (AxisName::ThetaAlpha, LayoutSpec::Nested { .. }) => true,
                (AxisName::Theta0 | AxisName::Tau0 | AxisName::ThetaAlpha, _) => false,
                _ => true,
            };
            if !ok {
                return invalid(format!(
                    "[sweep] axis {} does not apply to this kind of [layout]",
                    axis.name.as_str()
                ));
            }
            let (lo, hi) = (axis.start.0.min(axis.stop.0), axis.start.0.max(axis.stop.0));
            if matches!(axis.name, AxisName::Theta0 | AxisName::Tau0 | AxisName::ThetaAlpha) && lo < 0.0 {
                return invalid(format!("[sweep] axis {} must stay non-negative", axis.name.as_str()));
            }
            if !hi.is_finite() {
                return invalid(format!("[sweep] axis {} is not finite", axis.name.as_str()));
            }
        }
        if sweep.mode == SweepMode::Time && sweep.samples > 1 {
            let spacing = self.t_end / (sweep.samples - 1) as f64;
            let steps = spacing / self.dt;
            if (steps - steps.round()).abs() > 1e-6 || steps.round() < 1.0 {
                return invalid(format!(
                    "[sweep] sample spacing {spacing} is not a multiple of dt = {}",
                    self.dt
                ));
            }
        }
        Ok(())
    }

    pub fn build_layout(&self) -> Result<Layout, ConfigError> {
        let layout = match &self.layout {
            LayoutSpec::Standard { topology, theta0, tau0 } => standard_layout(*topology, *theta0, *tau0, self.phases)?,
            LayoutSpec::Nested {
                theta_alpha,
                tau_alpha,
                theta_beta,
                tau_beta,
            } => {
                let tau_alpha = match tau_alpha {
                    Some(t) => *t,
                    None if *theta_beta > 0.0 => theta_alpha * tau_beta / theta_beta,
                    None => return invalid("[layout] tau_alpha is required when theta_beta = 0"),
                };
                nested_layout(*theta_alpha, tau_alpha, *theta_beta, *tau_beta, self.phases)?
            }
            LayoutSpec::Points(points) => {
                let points = points
                    .iter()
                    .map(|&(atom, index, phase, delay)| {
                        Ok(CouplingPoint {
                            atom,
                            index,
                            phase_coord: phase,
                            delay_coord: delay,
                            coupling_phase: self.phases.get(giant_atoms::PointId::new(atom, index))?,
                        })
                    })
                    .collect::<Result<Vec<_>, giant_atoms::Error>>()?;
                Layout::from_points(points)?
            }
        };
        Ok(layout)
    }

    /// Copy with one sweep parameter set to `value`.
    pub fn with_axis(&self, axis: AxisName, value: f64) -> Scenario {
        let mut s = self.clone();
        match (axis, &mut s.layout) {
            (AxisName::Theta0, LayoutSpec::Standard { theta0, .. }) => *theta0 = value,
            (AxisName::Tau0, LayoutSpec::Standard { tau0, .. }) => *tau0 = value,
            (AxisName::ThetaAlpha, LayoutSpec::Nested { theta_alpha, .. }) => *theta_alpha = value,
            (AxisName::PhiA1, _) => s.phases.a1 = value,
            (AxisName::PhiA2, _) => s.phases.a2 = value,
            (AxisName::PhiB1, _) => s.phases.b1 = value,
            (AxisName::PhiB2, _) => s.phases.b2 = value,
            (AxisName::InitPhase, _) => s.initial = InitialSpec::Phase(value),
            _ => unreachable!("axis compatibility is checked on load"),
        }
        s
    }
}

fn resolve_layout(raw: RawLayout) -> Result<LayoutSpec, ConfigError> {
    let nested_keys =
        raw.theta_alpha.is_some() || raw.tau_alpha.is_some() || raw.theta_beta.is_some() || raw.tau_beta.is_some();
    let standard_keys = raw.theta0.is_some() || raw.tau0.is_some();
    if let Some(points) = raw.points {
        if nested_keys || standard_keys {
            return invalid("[layout] explicit points cannot be combined with theta/tau keys");
        }
        let points: Vec<_> = points
            .iter()
            .map(|p| (p.atom.0, p.index, p.phase.0, p.delay.0))
            .collect();
        let spec = LayoutSpec::Points(points);
        if let Some(topology) = raw.topology {
            let probe = Scenario {
                layout: spec.clone(),
                phases: CouplingPhases::uniform(0.0),
                initial: InitialSpec::Plus,
                t_end: 0.0,
                dt: DEFAULT_DT,
                window: DEFAULT_WINDOW,
                sweep: None,
            };
            let found = probe.build_layout()?.topology();
            if found != topology {
                return invalid(format!("[layout] points form a {found} layout, not {topology}"));
            }
        }
        return Ok(spec);
    }
    if nested_keys {
        if standard_keys {
            return invalid("[layout] use either theta0/tau0 or the nested theta_alpha/theta_beta keys");
        }
        if raw.topology.is_some_and(|t| t != Topology::Nested) {
            return invalid("[layout] theta_alpha/theta_beta keys need topology = \"nested\"");
        }
        let (Some(theta_alpha), Some(theta_beta), Some(tau_beta)) = (raw.theta_alpha, raw.theta_beta, raw.tau_beta)
        else {
            return invalid("[layout] nested form needs theta_alpha, theta_beta and tau_beta");
        };
        return Ok(LayoutSpec::Nested {
            theta_alpha: theta_alpha.0,
            tau_alpha: raw.tau_alpha.map(|t| t.0),
            theta_beta: theta_beta.0,
            tau_beta: tau_beta.0,
        });
    }
    let Some(topology) = raw.topology else {
        return invalid("[layout] needs topology, nested theta_alpha/theta_beta keys, or [[layout.points]]");
    };
    let Some(theta0) = raw.theta0 else {
        return invalid("[layout] needs theta0");
    };
    Ok(LayoutSpec::Standard {
        topology,
        theta0: theta0.0,
        tau0: raw.tau0.map_or(0.0, |t| t.0),
    })
}

fn resolve_phases(raw: RawPhases) -> Result<CouplingPhases, ConfigError> {
    let base = raw.preset.map(PhasePreset::phases);
    let get = |value: Option<Angle>, preset: Option<f64>, key: &str| match (value, preset) {
        (Some(a), _) => Ok(a.0),
        (None, Some(p)) => Ok(p),
        (None, None) => invalid(format!("[phases] needs a preset or a value for {key}")),
    };
    Ok(CouplingPhases::new(
        get(raw.a1, base.map(|b| b.a1), "a1")?,
        get(raw.a2, base.map(|b| b.a2), "a2")?,
        get(raw.b1, base.map(|b| b.b1), "b1")?,
        get(raw.b2, base.map(|b| b.b2), "b2")?,
    ))
}
