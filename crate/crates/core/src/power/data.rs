use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Layer;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub label: String,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Cost of unmet demand, $/MWh.
    pub unmet_cost: f64,
}

/// Line from bus `from` to bus `to`; positive flow runs `from -> to`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    /// MW per radian of angle difference.
    pub susceptance: f64,
    pub f_min: f64,
    pub f_max: f64,
}

/// Which layer commits the unit. Renewables are never committed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "d")]
    DayAhead,
    #[serde(rename = "s")]
    ShortTerm,
    #[serde(rename = "r")]
    Renewable,
}

impl Category {
    pub fn is_conventional(self) -> bool {
        self != Category::Renewable
    }

    /// The layer owning this unit's commitment decisions.
    pub fn commit_layer(self) -> Option<Layer> {
        match self {
            Category::DayAhead => Some(Layer::Da),
            Category::ShortTerm => Some(Layer::St),
            Category::Renewable => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorData {
    pub label: String,
    pub bus: usize,
    pub category: Category,
    /// Startup cost, $.
    pub phi_s: f64,
    /// No-load cost, $/h.
    pub phi_f: f64,
    /// Variable cost, $/MWh.
    pub phi_v: f64,
    /// Overgeneration cost, $/MWh.
    pub phi_o: f64,
    /// Curtailment cost, $/MWh.
    pub phi_c: f64,
    pub c_min: f64,
    pub c_max: f64,
    /// MW/h.
    pub ramp_up: f64,
    /// MW/h.
    pub ramp_down: f64,
    pub startup_lim: f64,
    pub shutdown_lim: f64,
    pub min_up_h: f64,
    pub min_down_h: f64,
    /// Dispatch band around upstream schedules in the HA layer, MW.
    pub eps: f64,
    /// Dispatch band around the DA schedule in the ST layer, MW.
    pub eps_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkData {
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<GeneratorData>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("line {line} references unknown bus {bus}")]
    UnknownLineBus { line: usize, bus: usize },
    #[error("generator `{0}` references an unknown bus")]
    UnknownGeneratorBus(String),
    #[error("{what}: lower bound {lower} exceeds upper bound {upper}")]
    Bounds {
        what: String,
        lower: f64,
        upper: f64,
    },
    #[error("generator `{name}`: {field} must be finite and nonnegative")]
    Negative { name: String, field: &'static str },
    #[error("duplicate label `{0}`")]
    Duplicate(String),
    #[error("{series} for `{name}`: {message}")]
    Series {
        series: &'static str,
        name: String,
        message: String,
    },
    #[error("invalid schedule: {0}")]
    Schedule(String),
}

impl NetworkData {
    pub fn validate(&self) -> Result<(), DataError> {
        let mut seen = std::collections::HashSet::new();
        for b in &self.buses {
            if !seen.insert(b.label.as_str()) {
                return Err(DataError::Duplicate(b.label.clone()));
            }
            if b.theta_min > b.theta_max {
                return Err(DataError::Bounds {
                    what: format!("bus `{}` angle", b.label),
                    lower: b.theta_min,
                    upper: b.theta_max,
                });
            }
            if !(b.unmet_cost >= 0.0 && b.unmet_cost.is_finite()) {
                return Err(DataError::Negative {
                    name: b.label.clone(),
                    field: "unmet_cost",
                });
            }
        }
        for (k, l) in self.lines.iter().enumerate() {
            for bus in [l.from, l.to] {
                if bus >= self.buses.len() {
                    return Err(DataError::UnknownLineBus { line: k, bus });
                }
            }
            if l.f_min > l.f_max {
                return Err(DataError::Bounds {
                    what: format!("line {k} flow"),
                    lower: l.f_min,
                    upper: l.f_max,
                });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for g in &self.generators {
            if !seen.insert(g.label.as_str()) {
                return Err(DataError::Duplicate(g.label.clone()));
            }
            if g.bus >= self.buses.len() {
                return Err(DataError::UnknownGeneratorBus(g.label.clone()));
            }
            let fields = [
                ("phi_s", g.phi_s),
                ("phi_f", g.phi_f),
                ("phi_v", g.phi_v),
                ("phi_o", g.phi_o),
                ("phi_c", g.phi_c),
                ("c_min", g.c_min),
                ("c_max", g.c_max),
                ("ramp_up", g.ramp_up),
                ("ramp_down", g.ramp_down),
                ("startup_lim", g.startup_lim),
                ("shutdown_lim", g.shutdown_lim),
                ("min_up_h", g.min_up_h),
                ("min_down_h", g.min_down_h),
                ("eps", g.eps),
                ("eps_s", g.eps_s),
            ];
            for (field, v) in fields {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(DataError::Negative {
                        name: g.label.clone(),
                        field,
                    });
                }
            }
            if g.c_min > g.c_max {
                return Err(DataError::Bounds {
                    what: format!("generator `{}` capacity", g.label),
                    lower: g.c_min,
                    upper: g.c_max,
                });
            }
        }
        Ok(())
    }

    pub fn bus_index(&self, label: &str) -> Option<usize> {
        self.buses.iter().position(|b| b.label == label)
    }

    /// Generator indices attached to `bus`, in input order.
    pub fn generators_at(&self, bus: usize) -> impl Iterator<Item = usize> + '_ {
        self.generators
            .iter()
            .enumerate()
            .filter(move |(_, g)| g.bus == bus)
            .map(|(k, _)| k)
    }

    pub fn of_category(&self, c: Category) -> impl Iterator<Item = usize> + '_ {
        self.generators
            .iter()
            .enumerate()
            .filter(move |(_, g)| g.category == c)
            .map(|(k, _)| k)
    }
}

/// Reserve requirement as a fraction of demand, per layer family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReserveScenario {
    /// DA and ST layers.
    pub uc: f64,
    /// HA layer.
    pub ed: f64,
}

impl ReserveScenario {
    pub const LOW: ReserveScenario = ReserveScenario {
        uc: 0.10,
        ed: 0.025,
    };
    pub const VERY_LOW: ReserveScenario = ReserveScenario {
        uc: 0.05,
        ed: 0.0125,
    };

    pub fn fraction(&self, layer: Layer) -> f64 {
        match layer {
            Layer::Da | Layer::St => self.uc,
            Layer::Ha => self.ed,
        }
    }
}

impl Default for ReserveScenario {
    fn default() -> Self {
        Self::LOW
    }
}

/// Hourly input series. Quarter-hour values are interpolated linearly
/// between hourly samples and hold the last sample past the end.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DemandData {
    /// `[bus][hour]`, day-ahead forecast, MW.
    pub day_ahead: Vec<Vec<f64>>,
    /// `[bus][hour]`, realized demand, MW.
    pub real_time: Vec<Vec<f64>>,
    /// `[generator][hour]` availability; empty for conventional units.
    pub renewable: Vec<Vec<f64>>,
    pub reserves: ReserveScenario,
}

/// Linear interpolation of an hourly series at time `hours`, holding the
/// first and last samples outside the series.
pub fn interpolate(series: &[f64], hours: f64) -> f64 {
    let Some(&last) = series.last() else {
        return 0.0;
    };
    if hours <= 0.0 {
        return series[0];
    }
    let h = hours.floor();
    let frac = hours - h;
    let h = h as usize;
    if h + 1 >= series.len() {
        return if h < series.len() && frac == 0.0 {
            series[h]
        } else {
            last
        };
    }
    series[h] + frac * (series[h + 1] - series[h])
}

/// Sample of the hour containing `hours`, holding the ends.
pub fn hourly(series: &[f64], hours: f64) -> f64 {
    let Some(&last) = series.last() else {
        return 0.0;
    };
    let h = hours.max(0.0).floor() as usize;
    series.get(h).copied().unwrap_or(last)
}

impl DemandData {
    pub fn hours(&self) -> usize {
        self.day_ahead.first().map_or(0, Vec::len)
    }

    pub fn validate(&self, net: &NetworkData) -> Result<(), DataError> {
        let hours = self.hours();
        for (series, data) in [
            ("day-ahead demand", &self.day_ahead),
            ("real-time demand", &self.real_time),
        ] {
            if data.len() != net.buses.len() {
                return Err(DataError::Series {
                    series,
                    name: "network".into(),
                    message: format!("expected {} buses, found {}", net.buses.len(), data.len()),
                });
            }
            for (b, row) in data.iter().enumerate() {
                check_row(series, &net.buses[b].label, row, hours)?;
            }
        }
        if self.renewable.len() != net.generators.len() {
            return Err(DataError::Series {
                series: "renewable availability",
                name: "network".into(),
                message: "one entry per generator required".into(),
            });
        }
        for (g, row) in self.renewable.iter().enumerate() {
            let gen = &net.generators[g];
            if gen.category == Category::Renewable {
                check_row("renewable availability", &gen.label, row, hours)?;
            } else if !row.is_empty() {
                return Err(DataError::Series {
                    series: "renewable availability",
                    name: gen.label.clone(),
                    message: "conventional unit has an availability series".into(),
                });
            }
        }
        for f in [self.reserves.uc, self.reserves.ed] {
            if !(0.0..=1.0).contains(&f) {
                return Err(DataError::Series {
                    series: "reserves",
                    name: "scenario".into(),
                    message: format!("fraction {f} outside [0, 1]"),
                });
            }
        }
        Ok(())
    }

    /// Demand forecast seen by `layer` at bus `bus`, `hours` after the
    /// start of the data.
    /// DA reads hourly day-ahead samples, ST the mean of day-ahead and
    /// real-time, HA the real-time series; ST and HA are interpolated.
    pub fn demand(&self, layer: Layer, bus: usize, hours: f64) -> f64 {
        let da = &self.day_ahead[bus];
        let rt = &self.real_time[bus];
        match layer {
            Layer::Da => hourly(da, hours),
            Layer::St => 0.5 * (interpolate(da, hours) + interpolate(rt, hours)),
            Layer::Ha => interpolate(rt, hours),
        }
    }

    pub fn reserve(&self, layer: Layer, bus: usize, hours: f64) -> f64 {
        self.reserves.fraction(layer) * self.demand(layer, bus, hours)
    }

    pub fn availability(&self, layer: Layer, generator: usize, hours: f64) -> f64 {
        let s = &self.renewable[generator];
        match layer {
            Layer::Da => hourly(s, hours),
            Layer::St | Layer::Ha => interpolate(s, hours),
        }
    }
}

fn check_row(series: &'static str, name: &str, row: &[f64], hours: usize) -> Result<(), DataError> {
    if row.len() != hours || hours == 0 {
        return Err(DataError::Series {
            series,
            name: name.into(),
            message: format!("expected {hours} hourly samples, found {}", row.len()),
        });
    }
    if let Some(v) = row.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(DataError::Series {
            series,
            name: name.into(),
            message: format!("negative or non-finite value {v}"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_points() {
        let s = [100.0, 200.0];
        let q: Vec<f64> = (0..6).map(|t| interpolate(&s, 0.25 * t as f64)).collect();
        assert_eq!(q, vec![100.0, 125.0, 150.0, 175.0, 200.0, 200.0]);
        assert_eq!(interpolate(&[100.0; 3], 1.75), 100.0);
        assert_eq!(hourly(&s, 1.75), 200.0);
        assert_eq!(hourly(&s, 25.0), 200.0);
    }

    #[test]
    fn st_demand_is_mean() {
        let d = DemandData {
            day_ahead: vec![vec![100.0]],
            real_time: vec![vec![120.0]],
            renewable: vec![],
            reserves: ReserveScenario::LOW,
        };
        assert_eq!(d.demand(Layer::St, 0, 0.0), 110.0);
        assert!((d.reserve(Layer::Ha, 0, 0.0) - 3.0).abs() < 1e-12);
        assert!((d.reserve(Layer::Da, 0, 0.0) - 10.0).abs() < 1e-12);
    }
}
