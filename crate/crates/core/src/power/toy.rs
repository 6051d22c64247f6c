//! Small synthetic systems for tests, benches and demos.

use std::f64::consts::PI;

use super::data::{Bus, Category, DemandData, GeneratorData, Line, NetworkData, ReserveScenario};

#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub network: NetworkData,
    pub demand: DemandData,
}

fn bus(label: &str) -> Bus {
    Bus {
        label: label.into(),
        theta_min: -1.0,
        theta_max: 1.0,
        unmet_cost: 1000.0,
    }
}

fn line(from: usize, to: usize) -> Line {
    Line {
        from,
        to,
        susceptance: 500.0,
        f_min: -100.0,
        f_max: 100.0,
    }
}

/// Mid-merit unit committed a day ahead.
pub fn base_unit(bus: usize) -> GeneratorData {
    GeneratorData {
        label: "G1".into(),
        bus,
        category: Category::DayAhead,
        phi_s: 500.0,
        phi_f: 100.0,
        phi_v: 20.0,
        phi_o: 5.0,
        phi_c: 0.0,
        c_min: 20.0,
        c_max: 150.0,
        ramp_up: 60.0,
        ramp_down: 60.0,
        startup_lim: 80.0,
        shutdown_lim: 80.0,
        min_up_h: 3.0,
        min_down_h: 2.0,
        eps: 20.0,
        eps_s: 20.0,
    }
}

/// Fast peaker committed in the short-term layer.
pub fn peaker(bus: usize) -> GeneratorData {
    GeneratorData {
        label: "P1".into(),
        bus,
        category: Category::ShortTerm,
        phi_s: 50.0,
        phi_f: 30.0,
        phi_v: 45.0,
        phi_o: 5.0,
        phi_c: 0.0,
        c_min: 5.0,
        c_max: 60.0,
        ramp_up: 120.0,
        ramp_down: 120.0,
        startup_lim: 60.0,
        shutdown_lim: 60.0,
        min_up_h: 1.0,
        min_down_h: 1.0,
        eps: 20.0,
        eps_s: 20.0,
    }
}

pub fn solar(bus: usize) -> GeneratorData {
    GeneratorData {
        label: "W1".into(),
        bus,
        category: Category::Renewable,
        phi_s: 0.0,
        phi_f: 0.0,
        phi_v: 0.0,
        phi_o: 0.0,
        phi_c: 2.0,
        c_min: 0.0,
        c_max: 80.0,
        ramp_up: 0.0,
        ramp_down: 0.0,
        startup_lim: 0.0,
        shutdown_lim: 0.0,
        min_up_h: 0.0,
        min_down_h: 0.0,
        eps: 0.0,
        eps_s: 0.0,
    }
}

/// System-wide demand in MW at hour `h` of the day: 60 MW at 03:00,
/// 170 MW at 15:00.
pub fn load_shape(h: f64) -> f64 {
    115.0 - 55.0 * (2.0 * PI * (h - 3.0) / 24.0).cos()
}

/// Solar availability in MW: zero at night, `peak` at noon.
pub fn solar_shape(h: f64, peak: f64) -> f64 {
    (peak * (PI * (h - 6.0) / 12.0).sin()).max(0.0)
}

/// Deterministic forecast error of a few percent.
fn realized(da: f64, h: usize, bus: usize) -> f64 {
    da * (1.0 + 0.04 * (1.7 * h as f64 + 2.3 * bus as f64).sin())
}

fn series(
    days: usize,
    shares: &[f64],
    scale: f64,
    solar_peak: f64,
    gens: &[GeneratorData],
) -> DemandData {
    let hours = 24 * days.max(1);
    let da: Vec<Vec<f64>> = shares
        .iter()
        .map(|s| {
            (0..hours)
                .map(|h| scale * s * load_shape((h % 24) as f64))
                .collect()
        })
        .collect();
    let rt = da
        .iter()
        .enumerate()
        .map(|(b, row)| {
            row.iter()
                .enumerate()
                .map(|(h, &v)| realized(v, h, b))
                .collect()
        })
        .collect();
    let renewable = gens
        .iter()
        .map(|g| match g.category {
            Category::Renewable => (0..hours)
                .map(|h| solar_shape((h % 24) as f64, solar_peak.min(g.c_max)))
                .collect(),
            _ => Vec::new(),
        })
        .collect();
    DemandData {
        day_ahead: da,
        real_time: rt,
        renewable,
        reserves: ReserveScenario::LOW,
    }
}

/// Three buses in a triangle: base unit at A, peaker at B, solar at C.
pub fn three_bus(days: usize) -> Case {
    let network = NetworkData {
        buses: vec![bus("A"), bus("B"), bus("C")],
        lines: vec![line(0, 1), line(1, 2), line(0, 2)],
        generators: vec![base_unit(0), peaker(1), solar(2)],
    };
    let demand = series(days, &[0.2, 0.4, 0.4], 1.0, 80.0, &network.generators);
    Case { network, demand }
}

/// The three-bus system with no load and no sun.
pub fn zero_demand(days: usize) -> Case {
    let mut c = three_bus(days);
    for row in c
        .demand
        .day_ahead
        .iter_mut()
        .chain(c.demand.real_time.iter_mut())
        .chain(c.demand.renewable.iter_mut())
    {
        row.iter_mut().for_each(|v| *v = 0.0);
    }
    c
}

/// The three-bus system with load scaled past total capacity at the
/// evening peak, so some demand is always shed.
pub fn shortage(days: usize) -> Case {
    let mut c = three_bus(days);
    c.demand = series(days, &[0.2, 0.4, 0.4], 1.45, 40.0, &c.network.generators);
    c
}

/// `n >= 2` buses on a ring (a single line when `n == 2`) with the same
/// three units spread over the first buses.
pub fn ring(n: usize, days: usize) -> Case {
    assert!(n >= 2, "ring needs at least two buses");
    let labels: Vec<String> = (0..n).map(|k| format!("B{k}")).collect();
    let buses = labels.iter().map(|l| bus(l)).collect();
    let lines = if n == 2 {
        vec![line(0, 1)]
    } else {
        (0..n).map(|k| line(k, (k + 1) % n)).collect()
    };
    let generators = vec![base_unit(0), peaker(1 % n), solar(2 % n)];
    let shares = vec![1.0 / n as f64; n];
    let demand = series(days, &shares, 1.0, 80.0, &generators);
    Case {
        network: NetworkData {
            buses,
            lines,
            generators,
        },
        demand,
    }
}

/// Second day-ahead unit, only worth starting near the peak.
pub fn mid_unit(bus: usize) -> GeneratorData {
    GeneratorData {
        label: "G2".into(),
        c_min: 10.0,
        c_max: 60.0,
        phi_s: 800.0,
        phi_f: 150.0,
        phi_v: 30.0,
        min_up_h: 2.0,
        min_down_h: 2.0,
        ..base_unit(bus)
    }
}

/// Realized load runs `miss` above the day-ahead forecast everywhere, and
/// the short-term peaker is small. Whatever the day-ahead layer leaves
/// uncommitted cannot be made up later.
pub fn under_forecast(days: usize, miss: f64) -> Case {
    let network = NetworkData {
        buses: vec![bus("A"), bus("B"), bus("C")],
        lines: vec![line(0, 1), line(1, 2), line(0, 2)],
        generators: vec![
            GeneratorData {
                c_max: 110.0,
                ..base_unit(0)
            },
            mid_unit(1),
            GeneratorData {
                c_max: 10.0,
                ..peaker(1)
            },
            solar(2),
        ],
    };
    let mut demand = series(days, &[0.2, 0.4, 0.4], 1.0, 40.0, &network.generators);
    demand.real_time = demand
        .day_ahead
        .iter()
        .map(|row| row.iter().map(|v| v * (1.0 + miss)).collect())
        .collect();
    Case { network, demand }
}
