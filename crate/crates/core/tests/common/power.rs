//! Fixed upstream schedules and independent forecast arithmetic.

use optigraph::expr::LinExpr;
use optigraph::power::{
    toy, Bus, Category, Commitment, DemandData, GeneratorData, NetworkData, ReserveScenario,
    Upstream,
};
use optigraph::VariableRef;

/// Upstream returning the same constants everywhere.
pub struct FixedUp {
    pub commit: f64,
    pub da_output: f64,
    pub st_output: f64,
    pub realized: f64,
    /// Commitment is zero at day ticks in `[off.0, off.1)`.
    pub off: (i64, i64),
}

impl FixedUp {
    pub fn all(commit: f64, output: f64) -> Self {
        Self {
            commit,
            da_output: output,
            st_output: output,
            realized: output,
            off: (0, 0),
        }
    }
}

impl Upstream for FixedUp {
    fn commitment(&self, _g: usize, tick: i64, _latest: usize) -> Commitment {
        let on = if (self.off.0..self.off.1).contains(&tick) {
            0.0
        } else {
            self.commit
        };
        Commitment::fixed(on)
    }

    fn da_output(&self, _g: usize, _tick: i64) -> LinExpr<VariableRef> {
        LinExpr::constant(self.da_output)
    }

    fn st_output(&self, _g: usize, _st: usize, _tick: i64) -> LinExpr<VariableRef> {
        LinExpr::constant(self.st_output)
    }

    fn realized(&self, _g: usize, _tick: i64) -> LinExpr<VariableRef> {
        LinExpr::constant(self.realized)
    }
}

/// Straight-line interpolation between hourly samples, written out by
/// hand rather than shared with the library.
pub fn lerp_hourly(series: &[f64], hours: f64) -> f64 {
    let n = series.len();
    let h0 = hours.floor() as usize;
    if h0 + 1 >= n {
        return series[n - 1];
    }
    let w = hours - h0 as f64;
    series[h0] * (1.0 - w) + series[h0 + 1] * w
}

/// One bus, no lines, one unit, flat demand `d` for `hours` hours.
pub fn single_bus(
    unit: GeneratorData,
    d: f64,
    hours: usize,
    reserves: ReserveScenario,
) -> (NetworkData, DemandData) {
    let net = NetworkData {
        buses: vec![Bus {
            label: "A".into(),
            theta_min: -1.0,
            theta_max: 1.0,
            unmet_cost: 1000.0,
        }],
        lines: vec![],
        generators: vec![GeneratorData { bus: 0, ..unit }],
    };
    let demand = DemandData {
        day_ahead: vec![vec![d; hours]],
        real_time: vec![vec![d; hours]],
        renewable: vec![vec![]],
        reserves,
    };
    (net, demand)
}

pub const NO_RESERVE: ReserveScenario = ReserveScenario { uc: 0.0, ed: 0.0 };

/// Three-bus case with the solar unit dark all day.
pub fn three_bus_dark() -> toy::Case {
    let mut c = toy::three_bus(1);
    for (g, u) in c.network.generators.iter().enumerate() {
        if u.category == Category::Renewable {
            c.demand.renewable[g].iter_mut().for_each(|v| *v = 0.0);
        }
    }
    c
}
