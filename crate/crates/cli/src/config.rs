//! Case configuration file. Relative paths resolve against the directory
//! holding the config file.

use std::path::{Path, PathBuf};
use std::time::Duration;

use optigraph::drivers::{Mode, RunPlan};
use optigraph::power::{LayerSchedule, ReserveScenario, Schedule};
use optigraph::SolveOptions;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Files {
    pub network: PathBuf,
    pub generators: PathBuf,
    pub demand_da: PathBuf,
    pub demand_rt: PathBuf,
    /// Optional when the case has no renewable units.
    pub renewables: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerOverride {
    pub delta_h: Option<f64>,
    pub horizon_h: Option<f64>,
    pub period_h: Option<f64>,
}

impl LayerOverride {
    fn apply(&self, base: &mut LayerSchedule) {
        base.delta_h = self.delta_h.unwrap_or(base.delta_h);
        base.horizon_h = self.horizon_h.unwrap_or(base.horizon_h);
        base.period_h = self.period_h.unwrap_or(base.period_h);
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleOverrides {
    #[serde(default)]
    pub da: LayerOverride,
    #[serde(default)]
    pub st: LayerOverride,
    #[serde(default)]
    pub ha: LayerOverride,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub da_gap: f64,
    pub st_gap: f64,
    pub ha_gap: f64,
    pub monolithic_gap: f64,
    /// Per solve, seconds.
    pub time_limit_s: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let plan = RunPlan::default();
        Self {
            da_gap: plan.da.mip_gap,
            st_gap: plan.st.mip_gap,
            ha_gap: plan.ha.mip_gap,
            monolithic_gap: plan.monolithic.mip_gap,
            time_limit_s: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub files: Files,
    #[serde(default)]
    pub reserves: ReserveScenario,
    #[serde(default)]
    pub schedule: ScheduleOverrides,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Directory of the config file; not read from the file.
    #[serde(skip)]
    pub base: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl CaseConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: CaseConfig = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.message().to_string(),
        })?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate(path)?;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn output(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    pub fn schedule(&self) -> Schedule {
        let mut s = Schedule::default();
        self.schedule.da.apply(&mut s.da);
        self.schedule.st.apply(&mut s.st);
        self.schedule.ha.apply(&mut s.ha);
        s
    }

    fn options(&self, gap: f64) -> SolveOptions {
        SolveOptions {
            time_limit: self.solver.time_limit_s.map(Duration::from_secs_f64),
            ..SolveOptions::with_gap(gap)
        }
    }

    pub fn plan(&self, mode: Mode, days: usize) -> RunPlan {
        RunPlan {
            mode,
            days,
            schedule: self.schedule(),
            da: self.options(self.solver.da_gap),
            st: self.options(self.solver.st_gap),
            ha: self.options(self.solver.ha_gap),
            monolithic: self.options(self.solver.monolithic_gap),
            reserves: Some(self.reserves),
        }
    }

    fn validate(&self, path: &Path) -> Result<(), CliError> {
        let bad = |message: String| CliError::Config {
            path: path.display().to_string(),
            message,
        };
        let f = &self.files;
        let listed = [
            ("network", Some(&f.network)),
            ("generators", Some(&f.generators)),
            ("demand_da", Some(&f.demand_da)),
            ("demand_rt", Some(&f.demand_rt)),
            ("renewables", f.renewables.as_ref()),
        ];
        for (key, p) in listed {
            if let Some(p) = p {
                let full = self.resolve(p);
                if !full.is_file() {
                    return Err(bad(format!(
                        "files.{key}: {} does not exist",
                        full.display()
                    )));
                }
            }
        }
        self.schedule().validate().map_err(|e| bad(e.to_string()))?;
        for (key, v) in [("uc", self.reserves.uc), ("ed", self.reserves.ed)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(bad(format!("reserves.{key} = {v} outside [0, 1]")));
            }
        }
        if let Some(t) = self.solver.time_limit_s {
            if !(t > 0.0 && t.is_finite()) {
                return Err(bad(format!("solver.time_limit_s = {t} must be positive")));
            }
        }
        self.plan(Mode::Receding, 1)
            .validate()
            .map_err(|e| bad(e.to_string()))
    }
}
