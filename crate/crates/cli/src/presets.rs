//! Shipped figure presets. Each preset is one or more sweep configs plus a
//! gnuplot script that reads their CSV output.

use std::path::{Path, PathBuf};

use crate::config::{ConfigError, Scenario};
use crate::run;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig4,
    Fig5,
    Fig7,
    Fig8,
}

macro_rules! panel {
    ($name:literal) => {
        ($name, include_str!(concat!("../presets/", $name, ".toml")))
    };
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Fig3a,
        Preset::Fig3b,
        Preset::Fig3c,
        Preset::Fig3d,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig7,
        Preset::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig3c => "fig3c",
            Preset::Fig3d => "fig3d",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
        }
    }

    /// (panel name, config text)
    pub fn panels(self) -> Vec<(&'static str, &'static str)> {
        match self {
            Preset::Fig3a => vec![panel!("fig3a")],
            Preset::Fig3b => vec![panel!("fig3b")],
            Preset::Fig3c => vec![panel!("fig3c")],
            Preset::Fig3d => vec![panel!("fig3d")],
            Preset::Fig4 => vec![panel!("fig4")],
            Preset::Fig5 => vec![panel!("fig5_tau0"), panel!("fig5_tau1p5"), panel!("fig5_tau3")],
            Preset::Fig7 => vec![panel!("fig7a"), panel!("fig7b"), panel!("fig7c"), panel!("fig7d")],
            Preset::Fig8 => vec![
                panel!("fig8a"),
                panel!("fig8b"),
                panel!("fig8c"),
                panel!("fig8d"),
                panel!("fig8d_steady"),
            ],
        }
    }

    pub fn script(self) -> &'static str {
        match self {
            Preset::Fig3a => include_str!("../presets/fig3a.gp"),
            Preset::Fig3b => include_str!("../presets/fig3b.gp"),
            Preset::Fig3c => include_str!("../presets/fig3c.gp"),
            Preset::Fig3d => include_str!("../presets/fig3d.gp"),
            Preset::Fig4 => include_str!("../presets/fig4.gp"),
            Preset::Fig5 => include_str!("../presets/fig5.gp"),
            Preset::Fig7 => include_str!("../presets/fig7.gp"),
            Preset::Fig8 => include_str!("../presets/fig8.gp"),
        }
    }

    pub fn scenarios(self) -> Result<Vec<(&'static str, Scenario)>, ConfigError> {
        self.panels()
            .into_iter()
            .map(|(name, text)| {
                Scenario::from_toml(text)
                    .map(|s| (name, s))
                    .map_err(|e| ConfigError::Invalid(format!("preset panel {name}: {e}")))
            })
            .collect()
    }
}

/// Runs every panel of `preset` and writes `<panel>.csv`, the panel configs
/// and `<preset>.gp` into `out_dir`. Returns the files written.
pub fn write_preset(preset: Preset, out_dir: &Path) -> Result<Vec<PathBuf>, ConfigError> {
    let io = |path: &Path, source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(out_dir).map_err(|e| io(out_dir, e))?;
    let mut written = Vec::new();
    for ((name, text), (_, scenario)) in preset.panels().into_iter().zip(preset.scenarios()?) {
        let csv = run::sweep(&scenario, 1.0)?;
        for (file, contents) in [(format!("{name}.csv"), csv.as_str()), (format!("{name}.toml"), text)] {
            let path = out_dir.join(file);
            std::fs::write(&path, contents).map_err(|e| io(&path, e))?;
            written.push(path);
        }
    }
    let script = out_dir.join(format!("{}.gp", preset.name()));
    std::fs::write(&script, preset.script()).map_err(|e| io(&script, e))?;
    written.push(script);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_shipped_config_parses_as_a_sweep() {
        for preset in Preset::ALL {
            for (name, s) in preset.scenarios().unwrap() {
                assert!(s.sweep.is_some(), "{name}");
            }
            assert!(preset.script().contains(preset.name()), "{}", preset.name());
        }
    }
}
