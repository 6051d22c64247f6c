//! CSV ingestion.
//!
//! * `network.csv`: headerless records `bus,label,theta_min,theta_max,unmet_cost`
//!   and `line,from,to,susceptance,f_min,f_max` (bus labels), `#` comments.
//! * `generators.csv`: header row naming every [`GeneratorData`] field, `bus`
//!   by label, `category` one of `d`, `s`, `r`.
//! * `demand_da.csv`, `demand_rt.csv`: header `bus,<t0>,<t1>,...`, one row per
//!   bus with hourly MW.
//! * `renewables.csv`: header `generator,<t0>,...`, one row per renewable unit.
//!
//! Every error names the file, line and field. Nothing is returned unless
//! all files parse and the assembled data validate.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use csv::{ReaderBuilder, StringRecord};
use optigraph::power::{
    Bus, Category, DataError, DemandData, GeneratorData, Line, NetworkData, ReserveScenario,
};
use serde::{Deserialize, Serialize};

use crate::config::CaseConfig;
use crate::error::CliError;

/// Source line of every bus, line and generator, for error reports.
#[derive(Default)]
struct Origins {
    network: PathBuf,
    generators: PathBuf,
    buses: Vec<u64>,
    lines: Vec<u64>,
    gens: Vec<u64>,
}

fn reader(path: &Path, headers: bool) -> Result<csv::Reader<std::fs::File>, CliError> {
    ReaderBuilder::new()
        .has_headers(headers)
        .flexible(!headers)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(path, e))
}

fn line_of(rec: &StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn csv_error(path: &Path, e: csv::Error, headers: Option<&StringRecord>) -> CliError {
    let line = e.position().map_or(0, |p| p.line());
    let field = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err
            .field()
            .and_then(|k| headers.and_then(|h| h.get(k as usize)))
            .unwrap_or("record")
            .to_string(),
        _ => "record".to_string(),
    };
    let message = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err.kind().to_string(),
        _ => e.to_string(),
    };
    CliError::input(path, line, field, message)
}

fn number(path: &Path, rec: &StringRecord, k: usize, field: &str) -> Result<f64, CliError> {
    let raw = rec
        .get(k)
        .ok_or_else(|| CliError::input(path, line_of(rec), field, "missing value"))?;
    let v: f64 = raw.parse().map_err(|_| {
        CliError::input(
            path,
            line_of(rec),
            field,
            format!("`{raw}` is not a number"),
        )
    })?;
    if !v.is_finite() {
        return Err(CliError::input(path, line_of(rec), field, "must be finite"));
    }
    Ok(v)
}

fn read_network(path: &Path, origins: &mut Origins) -> Result<(Vec<Bus>, Vec<Line>), CliError> {
    let mut buses = Vec::new();
    let mut pending = Vec::new();
    for rec in reader(path, false)?.records() {
        let rec = rec.map_err(|e| csv_error(path, e, None))?;
        let line = line_of(&rec);
        let expect = |n: usize, kind: &str| {
            if rec.len() == n {
                Ok(())
            } else {
                Err(CliError::input(
                    path,
                    line,
                    kind,
                    format!("expected {n} fields, found {}", rec.len()),
                ))
            }
        };
        match &rec[0] {
            "bus" => {
                expect(5, "bus")?;
                buses.push(Bus {
                    label: rec[1].to_string(),
                    theta_min: number(path, &rec, 2, "theta_min")?,
                    theta_max: number(path, &rec, 3, "theta_max")?,
                    unmet_cost: number(path, &rec, 4, "unmet_cost")?,
                });
                origins.buses.push(line);
            }
            "line" => {
                expect(6, "line")?;
                pending.push((rec.clone(), line));
            }
            "kind" => {}
            other => {
                return Err(CliError::input(
                    path,
                    line,
                    "kind",
                    format!("unknown record `{other}`; expected bus or line"),
                ))
            }
        }
    }
    let index: HashMap<&str, usize> = buses
        .iter()
        .enumerate()
        .map(|(k, b)| (b.label.as_str(), k))
        .collect();
    let mut lines = Vec::with_capacity(pending.len());
    for (rec, line) in &pending {
        let bus = |k: usize, field: &str| {
            index.get(&rec[k]).copied().ok_or_else(|| {
                CliError::input(path, *line, field, format!("unknown bus `{}`", &rec[k]))
            })
        };
        lines.push(Line {
            from: bus(1, "from")?,
            to: bus(2, "to")?,
            susceptance: number(path, rec, 3, "susceptance")?,
            f_min: number(path, rec, 4, "f_min")?,
            f_max: number(path, rec, 5, "f_max")?,
        });
        origins.lines.push(*line);
    }
    if buses.is_empty() {
        return Err(CliError::input(path, 0, "bus", "no buses defined"));
    }
    Ok((buses, lines))
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GeneratorRow {
    label: String,
    bus: String,
    /// `d`, `s` or `r`; parsed by hand so errors can name the column.
    category: String,
    phi_s: f64,
    phi_f: f64,
    phi_v: f64,
    phi_o: f64,
    phi_c: f64,
    c_min: f64,
    c_max: f64,
    ramp_up: f64,
    ramp_down: f64,
    startup_lim: f64,
    shutdown_lim: f64,
    min_up_h: f64,
    min_down_h: f64,
    eps: f64,
    eps_s: f64,
}

fn read_generators(
    path: &Path,
    buses: &[Bus],
    origins: &mut Origins,
) -> Result<Vec<GeneratorData>, CliError> {
    let mut rdr = reader(path, true)?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e, None))?.clone();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e, Some(&headers)))?;
        let line = line_of(&rec);
        let row: GeneratorRow = rec
            .deserialize(Some(&headers))
            .map_err(|e| csv_error(path, e, Some(&headers)))?;
        let bus = buses
            .iter()
            .position(|b| b.label == row.bus)
            .ok_or_else(|| {
                CliError::input(path, line, "bus", format!("unknown bus `{}`", row.bus))
            })?;
        let category = match row.category.as_str() {
            "d" => Category::DayAhead,
            "s" => Category::ShortTerm,
            "r" => Category::Renewable,
            other => {
                return Err(CliError::input(
                    path,
                    line,
                    "category",
                    format!("`{other}` is not one of d, s, r"),
                ))
            }
        };
        out.push(GeneratorData {
            label: row.label,
            bus,
            category,
            phi_s: row.phi_s,
            phi_f: row.phi_f,
            phi_v: row.phi_v,
            phi_o: row.phi_o,
            phi_c: row.phi_c,
            c_min: row.c_min,
            c_max: row.c_max,
            ramp_up: row.ramp_up,
            ramp_down: row.ramp_down,
            startup_lim: row.startup_lim,
            shutdown_lim: row.shutdown_lim,
            min_up_h: row.min_up_h,
            min_down_h: row.min_down_h,
            eps: row.eps,
            eps_s: row.eps_s,
        });
        origins.gens.push(line);
    }
    Ok(out)
}

/// Rows of an `entity × hour` matrix keyed by the first column, in the
/// order of `names`.
fn read_matrix(path: &Path, key: &str, names: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rdr = reader(path, true)?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e, None))?.clone();
    if headers.get(0) != Some(key) {
        return Err(CliError::input(
            path,
            1,
            key,
            format!("first column must be `{key}`"),
        ));
    }
    let hours = headers.len() - 1;
    if hours == 0 {
        return Err(CliError::input(path, 1, "header", "no hourly columns"));
    }
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; names.len()];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e, Some(&headers)))?;
        let line = line_of(&rec);
        let name = &rec[0];
        let slot = names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| CliError::input(path, line, key, format!("unknown {key} `{name}`")))?;
        if rows[slot].is_some() {
            return Err(CliError::input(
                path,
                line,
                key,
                format!("`{name}` listed twice"),
            ));
        }
        let mut values = Vec::with_capacity(hours);
        for k in 1..=hours {
            let v = number(path, &rec, k, &headers[k])?;
            if v < 0.0 {
                return Err(CliError::input(
                    path,
                    line,
                    &headers[k],
                    format!("{v} is negative"),
                ));
            }
            values.push(v);
        }
        rows[slot] = Some(values);
    }
    rows.into_iter()
        .zip(names)
        .map(|(r, n)| r.ok_or_else(|| CliError::input(path, 0, key, format!("no row for `{n}`"))))
        .collect()
}

/// Pins a validation failure on the record it came from.
fn locate(e: DataError, net: &NetworkData, o: &Origins) -> CliError {
    let bus_line = |label: &str| {
        net.buses
            .iter()
            .rposition(|b| b.label == label)
            .map_or(0, |k| o.buses[k])
    };
    let gen_line = |label: &str| {
        net.generators
            .iter()
            .rposition(|g| g.label == label)
            .map_or(0, |k| o.gens[k])
    };
    match &e {
        DataError::Duplicate(label) => {
            if net.generators.iter().filter(|g| &g.label == label).count() > 1 {
                CliError::input(&o.generators, gen_line(label), "label", e.to_string())
            } else {
                CliError::input(&o.network, bus_line(label), "label", e.to_string())
            }
        }
        DataError::Negative { name, field } if *field == "unmet_cost" => {
            CliError::input(&o.network, bus_line(name), *field, e.to_string())
        }
        DataError::Negative { name, field } => {
            CliError::input(&o.generators, gen_line(name), *field, e.to_string())
        }
        DataError::Bounds { what, .. } => {
            if let Some(k) = what
                .strip_prefix("line ")
                .and_then(|s| s.split(' ').next())
                .and_then(|s| s.parse::<usize>().ok())
            {
                CliError::input(&o.network, o.lines[k], "f_min", e.to_string())
            } else if let Some(label) = what
                .strip_prefix("generator `")
                .and_then(|s| s.split('`').next())
            {
                CliError::input(&o.generators, gen_line(label), "c_min", e.to_string())
            } else if let Some(label) = what.strip_prefix("bus `").and_then(|s| s.split('`').next())
            {
                CliError::input(&o.network, bus_line(label), "theta_min", e.to_string())
            } else {
                CliError::input(&o.network, 0, "record", e.to_string())
            }
        }
        _ => CliError::input(&o.network, 0, "record", e.to_string()),
    }
}

pub fn ingest(cfg: &CaseConfig) -> Result<(NetworkData, DemandData), CliError> {
    let f = &cfg.files;
    let mut origins = Origins {
        network: cfg.resolve(&f.network),
        generators: cfg.resolve(&f.generators),
        ..Origins::default()
    };
    let (buses, lines) = read_network(&origins.network.clone(), &mut origins)?;
    let generators = read_generators(&origins.generators.clone(), &buses, &mut origins)?;
    let net = NetworkData {
        buses,
        lines,
        generators,
    };
    net.validate().map_err(|e| locate(e, &net, &origins))?;

    let bus_names: Vec<&str> = net.buses.iter().map(|b| b.label.as_str()).collect();
    let da_path = cfg.resolve(&f.demand_da);
    let rt_path = cfg.resolve(&f.demand_rt);
    let day_ahead = read_matrix(&da_path, "bus", &bus_names)?;
    let real_time = read_matrix(&rt_path, "bus", &bus_names)?;
    let hours = day_ahead[0].len();
    if real_time[0].len() != hours {
        return Err(CliError::input(
            &rt_path,
            1,
            "header",
            format!(
                "{} hourly columns, day-ahead file has {hours}",
                real_time[0].len()
            ),
        ));
    }
    let renewable_names: Vec<&str> = net
        .generators
        .iter()
        .filter(|g| g.category == Category::Renewable)
        .map(|g| g.label.as_str())
        .collect();
    let mut renewable_rows = match (&f.renewables, renewable_names.is_empty()) {
        (Some(p), _) => {
            let path = cfg.resolve(p);
            let rows = read_matrix(&path, "generator", &renewable_names)?;
            if rows.first().is_some_and(|r| r.len() != hours) {
                return Err(CliError::input(
                    &path,
                    1,
                    "header",
                    format!("expected {hours} hourly columns"),
                ));
            }
            rows
        }
        (None, true) => Vec::new(),
        (None, false) => {
            return Err(CliError::input(
                &origins.generators,
                0,
                "category",
                "renewable units present but no renewables file configured",
            ))
        }
    }
    .into_iter();
    let renewable = net
        .generators
        .iter()
        .map(|g| match g.category {
            Category::Renewable => renewable_rows.next().expect("one row per renewable unit"),
            _ => Vec::new(),
        })
        .collect();
    let demand = DemandData {
        day_ahead,
        real_time,
        renewable,
        reserves: ReserveScenario {
            uc: cfg.reserves.uc,
            ed: cfg.reserves.ed,
        },
    };
    demand
        .validate(&net)
        .map_err(|e| CliError::input(&da_path, 0, "series", e.to_string()))?;
    Ok((net, demand))
}

fn csv_file(path: &Path) -> Result<csv::Writer<std::fs::File>, CliError> {
    csv::WriterBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::io(path, e))
}

fn write_matrix(path: &Path, key: &str, rows: &[(&str, &[f64])]) -> Result<(), CliError> {
    let fail = |e: csv::Error| CliError::io(path, e);
    let mut w = csv_file(path)?;
    let hours = rows.first().map_or(0, |(_, r)| r.len());
    let mut header = vec![key.to_string()];
    header.extend((0..hours).map(|h| format!("h{h}")));
    w.write_record(&header).map_err(fail)?;
    for (name, values) in rows {
        let mut rec = vec![name.to_string()];
        rec.extend(values.iter().map(f64::to_string));
        w.write_record(&rec).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn by_bus<'a>(net: &'a NetworkData, m: &'a [Vec<f64>]) -> Vec<(&'a str, &'a [f64])> {
    net.buses
        .iter()
        .zip(m)
        .map(|(b, r)| (b.label.as_str(), r.as_slice()))
        .collect()
}

/// Writes a case in the layout [`ingest`] reads, plus a `config.toml`
/// pointing at it. Numbers are written in shortest round-trip form, so
/// reading the directory back yields identical data.
pub fn write_case(net: &NetworkData, demand: &DemandData, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;

    let path = dir.join("network.csv");
    let fail = |e: csv::Error| CliError::io(&path, e);
    let mut w = csv_file(&path)?;
    w.write_record([
        "kind",
        "label|from",
        "theta_min|to",
        "theta_max|susceptance",
        "unmet_cost|f_min",
        "f_max",
    ])
    .map_err(fail)?;
    for b in &net.buses {
        w.write_record([
            "bus".to_string(),
            b.label.clone(),
            b.theta_min.to_string(),
            b.theta_max.to_string(),
            b.unmet_cost.to_string(),
        ])
        .map_err(fail)?;
    }
    for l in &net.lines {
        w.write_record([
            "line".to_string(),
            net.buses[l.from].label.clone(),
            net.buses[l.to].label.clone(),
            l.susceptance.to_string(),
            l.f_min.to_string(),
            l.f_max.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;

    let path = dir.join("generators.csv");
    let mut w = csv_file(&path)?;
    for g in &net.generators {
        w.serialize(GeneratorRow {
            label: g.label.clone(),
            bus: net.buses[g.bus].label.clone(),
            category: match g.category {
                Category::DayAhead => "d",
                Category::ShortTerm => "s",
                Category::Renewable => "r",
            }
            .to_string(),
            phi_s: g.phi_s,
            phi_f: g.phi_f,
            phi_v: g.phi_v,
            phi_o: g.phi_o,
            phi_c: g.phi_c,
            c_min: g.c_min,
            c_max: g.c_max,
            ramp_up: g.ramp_up,
            ramp_down: g.ramp_down,
            startup_lim: g.startup_lim,
            shutdown_lim: g.shutdown_lim,
            min_up_h: g.min_up_h,
            min_down_h: g.min_down_h,
            eps: g.eps,
            eps_s: g.eps_s,
        })
        .map_err(|e| CliError::io(&path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;

    write_matrix(
        &dir.join("demand_da.csv"),
        "bus",
        &by_bus(net, &demand.day_ahead),
    )?;
    write_matrix(
        &dir.join("demand_rt.csv"),
        "bus",
        &by_bus(net, &demand.real_time),
    )?;
    let renewables: Vec<(&str, &[f64])> = net
        .generators
        .iter()
        .zip(&demand.renewable)
        .filter(|(g, _)| g.category == Category::Renewable)
        .map(|(g, r)| (g.label.as_str(), r.as_slice()))
        .collect();
    let mut config = String::from("[files]\nnetwork = \"network.csv\"\ngenerators = \"generators.csv\"\ndemand_da = \"demand_da.csv\"\ndemand_rt = \"demand_rt.csv\"\n");
    if !renewables.is_empty() {
        write_matrix(&dir.join("renewables.csv"), "generator", &renewables)?;
        config.push_str("renewables = \"renewables.csv\"\n");
    }
    config.push_str(&format!(
        "\n[reserves]\nuc = {}\ned = {}\n",
        demand.reserves.uc, demand.reserves.ed
    ));
    let path = dir.join("config.toml");
    std::fs::write(&path, config).map_err(|e| CliError::io(&path, e))
}
