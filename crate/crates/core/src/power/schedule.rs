use serde::{Deserialize, Serialize};

use super::data::DataError;
use super::Layer;

/// Resolution, horizon and solve period of one layer, in hours.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSchedule {
    pub delta_h: f64,
    pub horizon_h: f64,
    pub period_h: f64,
}

/// Timing of all three layers. The HA resolution defines the tick.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub da: LayerSchedule,
    pub st: LayerSchedule,
    pub ha: LayerSchedule,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            da: LayerSchedule {
                delta_h: 1.0,
                horizon_h: 24.0,
                period_h: 24.0,
            },
            st: LayerSchedule {
                delta_h: 0.25,
                horizon_h: 4.0,
                period_h: 3.0,
            },
            ha: LayerSchedule {
                delta_h: 0.25,
                horizon_h: 1.25,
                period_h: 0.25,
            },
        }
    }
}

pub const DAY_HOURS: f64 = 24.0;

fn ratio(num: f64, den: f64, what: &str) -> Result<i64, DataError> {
    let r = num / den;
    let k = r.round();
    if !(num > 0.0 && den > 0.0) || (r - k).abs() > 1e-9 || k < 1.0 {
        return Err(DataError::Schedule(format!(
            "{what}: {num} is not a positive multiple of {den}"
        )));
    }
    Ok(k as i64)
}

impl Schedule {
    pub fn layer(&self, layer: Layer) -> &LayerSchedule {
        match layer {
            Layer::Da => &self.da,
            Layer::St => &self.st,
            Layer::Ha => &self.ha,
        }
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let tick = self.ha.delta_h;
        ratio(DAY_HOURS, tick, "ticks per day")?;
        if self.ha.period_h != tick {
            return Err(DataError::Schedule(
                "HA subproblems must be solved once per HA time step".into(),
            ));
        }
        if self.st.delta_h != tick {
            return Err(DataError::Schedule(
                "ST and HA layers must share one time step".into(),
            ));
        }
        if self.da.horizon_h != DAY_HOURS || self.da.period_h != DAY_HOURS {
            return Err(DataError::Schedule(
                "DA horizon and period must be 24 h".into(),
            ));
        }
        ratio(DAY_HOURS, self.da.delta_h, "DA points per day")?;
        ratio(self.da.delta_h, tick, "DA step")?;
        ratio(DAY_HOURS, self.st.period_h, "ST solves per day")?;
        ratio(self.st.period_h, tick, "ST period")?;
        ratio(self.st.horizon_h, tick, "ST horizon")?;
        ratio(self.ha.horizon_h, tick, "HA horizon")?;
        // each HA horizon must lie inside its parent ST horizon
        if self.st.horizon_h + 1e-9 < self.st.period_h + self.ha.horizon_h - tick {
            return Err(DataError::Schedule(
                "ST horizon too short to cover the HA problems it parents".into(),
            ));
        }
        Ok(())
    }

    pub fn tick_hours(&self) -> f64 {
        self.ha.delta_h
    }

    fn ticks(&self, hours: f64) -> i64 {
        (hours / self.tick_hours()).round() as i64
    }

    pub fn ticks_per_day(&self) -> i64 {
        self.ticks(DAY_HOURS)
    }

    pub fn delta(&self, layer: Layer) -> f64 {
        self.layer(layer).delta_h
    }

    /// Time step of `layer` in ticks.
    pub fn step(&self, layer: Layer) -> i64 {
        self.ticks(self.layer(layer).delta_h)
    }

    /// Subproblems of `layer` per day.
    pub fn count(&self, layer: Layer) -> usize {
        (DAY_HOURS / self.layer(layer).period_h).round() as usize
    }

    /// Time points per subproblem of `layer`.
    pub fn points(&self, layer: Layer) -> usize {
        let l = self.layer(layer);
        (l.horizon_h / l.delta_h).round() as usize
    }

    pub fn start(&self, layer: Layer, index: usize) -> i64 {
        index as i64 * self.ticks(self.layer(layer).period_h)
    }

    /// Tick of every time point of subproblem `index`.
    pub fn point_ticks(&self, layer: Layer, index: usize) -> Vec<i64> {
        let s = self.start(layer, index);
        let step = self.step(layer);
        (0..self.points(layer) as i64)
            .map(|k| s + k * step)
            .collect()
    }

    /// DA time point containing `tick`; `None` before the day starts.
    /// Ticks past the last DA point map to it.
    pub fn da_point(&self, tick: i64) -> Option<usize> {
        if tick < 0 {
            return None;
        }
        let p = (tick / self.step(Layer::Da)) as usize;
        Some(p.min(self.points(Layer::Da) - 1))
    }

    /// The ST subproblem an HA subproblem reads commitments from.
    pub fn parent_st(&self, ha: usize) -> usize {
        (self.start(Layer::Ha, ha) / self.ticks(self.st.period_h)) as usize
    }

    /// Latest ST subproblem with index `<= latest` whose horizon contains
    /// `tick`; `None` for ticks before the day.
    pub fn st_covering(&self, tick: i64, latest: usize) -> Option<usize> {
        if tick < 0 {
            return None;
        }
        let span = self.points(Layer::St) as i64 * self.step(Layer::St);
        (0..=latest).rev().find(|&j| {
            let s = self.start(Layer::St, j);
            s <= tick && tick < s + span
        })
    }
}
