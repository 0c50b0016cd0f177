//! Scenario files.
//!
//! Scenarios are written in TOML. Every dimensional field is a string with
//! its unit (`"781 km"`, `"100 kbps"`, `"500 ms"`, `"0.2 MB"`, `"1 GHz"`,
//! `"250 m/s"`); angles and coordinates are plain numbers in degrees.
//! Omitted blocks fall back to the built-in defaults: the ten Iridium-Next
//! gateways, the four IFECS services, the ARM task model and processors.
//!
//! [`emit_scenario`] writes a fully resolved document in SI units such that
//! parsing it yields the same [`Scenario`] bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::demand::{ProcessorSpec, Service, TaskModel};
use crate::error::ConfigError;
use crate::geom::{FlightRoute, GeodeticPoint, OrbitShell};
use crate::optimizer::SolveLimits;
use crate::topology::{Flight, Gateway, Scenario, Visibility};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Length,
    Time,
    Rate,
    Size,
    Frequency,
    Speed,
}

impl Dimension {
    fn base_unit(self) -> &'static str {
        match self {
            Dimension::Length => "m",
            Dimension::Time => "s",
            Dimension::Rate => "bit/s",
            Dimension::Size => "bit",
            Dimension::Frequency => "Hz",
            Dimension::Speed => "m/s",
        }
    }

    fn factor(self, unit: &str) -> Option<f64> {
        let f = match (self, unit) {
            (Dimension::Length, "m") => 1.0,
            (Dimension::Length, "km") => 1e3,
            (Dimension::Time, "s") => 1.0,
            (Dimension::Time, "ms") => 1e-3,
            (Dimension::Time, "min") => 60.0,
            (Dimension::Time, "h") => 3600.0,
            (Dimension::Rate, "bit/s" | "bps") => 1.0,
            (Dimension::Rate, "kbps" | "kbit/s") => 1e3,
            (Dimension::Rate, "Mbps" | "Mbit/s") => 1e6,
            (Dimension::Rate, "Gbps" | "Gbit/s") => 1e9,
            (Dimension::Size, "bit") => 1.0,
            (Dimension::Size, "B") => 8.0,
            (Dimension::Size, "kB") => 8e3,
            (Dimension::Size, "MB") => 8e6,
            (Dimension::Frequency, "Hz") => 1.0,
            (Dimension::Frequency, "MHz") => 1e6,
            (Dimension::Frequency, "GHz") => 1e9,
            (Dimension::Speed, "m/s") => 1.0,
            (Dimension::Speed, "km/h") => 1.0 / 3.6,
            _ => return None,
        };
        Some(f)
    }
}

/// Parse `"<number> <unit>"` into SI.
fn quantity(key: &str, text: &str, dim: Dimension) -> Result<f64, ConfigError> {
    let err = |reason: String| ConfigError::Quantity {
        key: key.to_string(),
        value: text.to_string(),
        reason,
    };
    let trimmed = text.trim();
    let split = trimmed
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .or_else(|| trimmed.find(' '))
        .ok_or_else(|| err(format!("missing unit, expected e.g. `{}`", dim.base_unit())))?;
    let (num, unit) = trimmed.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| err(format!("`{}` is not a number", num.trim())))?;
    let unit = unit.trim();
    let factor = dim
        .factor(unit)
        .ok_or_else(|| err(format!("unknown unit `{unit}`")))?;
    if !value.is_finite() {
        return Err(err("not finite".into()));
    }
    Ok(if factor == 1.0 { value } else { value * factor })
}

fn emit(value: f64, dim: Dimension) -> String {
    format!("{value:?} {}", dim.base_unit())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationConfig {
    pub planes: usize,
    pub sats_per_plane: usize,
    pub altitude: String,
    /// degrees
    pub inclination: f64,
    /// degrees
    pub raan_spacing: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raan_offset: Option<f64>,
    /// degrees; defaults to half the in-plane slot spacing
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epoch: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GatewayConfig {
    pub name: String,
    pub latitude: f64,
    pub longitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlightConfig {
    pub name: String,
    /// [latitude, longitude] in degrees
    pub origin: [f64; 2],
    pub destination: [f64; 2],
    pub departure: String,
    pub speed: String,
    pub altitude: String,
    pub passengers: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay_bound: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utilization: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet_size: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instructions: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task_size: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadline: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessorConfig {
    pub frequency: String,
    pub ipc: f64,
    pub cores: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessorsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub satellite: Option<ProcessorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mec: Option<ProcessorConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisibilityConfig {
    /// degrees
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sat_ground_mask: Option<f64>,
    /// degrees
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub air_ground_mask: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub air_air_range: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clearance_altitude: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub require_optimal: Option<bool>,
}

/// On-disk scenario document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_interval: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passenger_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mec_aircraft_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<f64>>,
    /// tasks/s
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    pub constellation: ConstellationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visibility: Option<VisibilityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gateways: Option<Vec<GatewayConfig>>,
    #[serde(default)]
    pub flights: Vec<FlightConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub services: Option<Vec<ServiceConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task_model: Option<TaskModelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub processors: Option<ProcessorsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<LimitsConfig>,
}

fn opt_quantity(
    key: &str,
    text: &Option<String>,
    dim: Dimension,
    default: f64,
) -> Result<f64, ConfigError> {
    text.as_deref()
        .map_or(Ok(default), |t| quantity(key, t, dim))
}

fn point(key: &str, ll: [f64; 2], altitude: f64) -> Result<GeodeticPoint, ConfigError> {
    GeodeticPoint::new(ll[0], ll[1], altitude)
        .map_err(|e| ConfigError::Invalid(format!("{key}: {e}")))
}

fn processor(key: &str, p: &ProcessorConfig) -> Result<ProcessorSpec, ConfigError> {
    Ok(ProcessorSpec {
        freq: quantity(
            &format!("{key}.frequency"),
            &p.frequency,
            Dimension::Frequency,
        )?,
        ipc: p.ipc,
        cores: p.cores,
    })
}

fn resolve_services(overrides: &[ServiceConfig]) -> Result<Vec<Service>, ConfigError> {
    let defaults = Service::defaults();
    let mut out: Vec<Service> = Vec::with_capacity(overrides.len());
    for o in overrides {
        let key = format!("services.{}", o.name);
        if out.iter().any(|s| s.name == o.name) {
            return Err(ConfigError::Invalid(format!("{key}: listed twice")));
        }
        let base = defaults.iter().find(|s| s.name == o.name);
        let field = |what: &str| -> Result<(), ConfigError> {
            match base {
                Some(_) => Ok(()),
                None => Err(ConfigError::Invalid(format!(
                    "{key}: `{what}` is required for a service without built-in defaults"
                ))),
            }
        };
        let bandwidth = match &o.bandwidth {
            Some(t) => quantity(&format!("{key}.bandwidth"), t, Dimension::Rate)?,
            None => {
                field("bandwidth")?;
                base.unwrap().bandwidth_per_user
            }
        };
        let delay_bound = match &o.delay_bound {
            Some(t) => quantity(&format!("{key}.delay_bound"), t, Dimension::Time)?,
            None => {
                field("delay_bound")?;
                base.unwrap().delay_bound
            }
        };
        let utilization = match o.utilization {
            Some(u) => u,
            None => {
                field("utilization")?;
                base.unwrap().utilization
            }
        };
        let packet_size = match &o.packet_size {
            Some(t) => quantity(&format!("{key}.packet_size"), t, Dimension::Size)?,
            None => {
                field("packet_size")?;
                base.unwrap().packet_size
            }
        };
        out.push(Service {
            name: o.name.clone(),
            bandwidth_per_user: bandwidth,
            delay_bound,
            utilization,
            packet_size,
        });
    }
    Ok(out)
}

impl ScenarioConfig {
    /// Apply defaults and units; the result is validated.
    pub fn resolve(&self) -> Result<Scenario, ConfigError> {
        let defaults = Scenario::default();
        let c = &self.constellation;
        let slot_spacing = if c.sats_per_plane > 0 {
            360.0 / c.sats_per_plane as f64
        } else {
            0.0
        };
        let shell = OrbitShell {
            plane_count: c.planes,
            sats_per_plane: c.sats_per_plane,
            altitude: quantity("constellation.altitude", &c.altitude, Dimension::Length)?,
            inclination: c.inclination,
            raan_spacing: c.raan_spacing,
            raan_offset: c.raan_offset.unwrap_or(0.0),
            phase_offset: c.phase_offset.unwrap_or(slot_spacing / 2.0),
            epoch: opt_quantity("constellation.epoch", &c.epoch, Dimension::Time, 0.0)?,
        };

        let vis_cfg = self.visibility.clone().unwrap_or_default();
        let dv = Visibility::default();
        let visibility = Visibility {
            sat_ground_mask: vis_cfg.sat_ground_mask.unwrap_or(dv.sat_ground_mask),
            air_ground_mask: vis_cfg.air_ground_mask.unwrap_or(dv.air_ground_mask),
            air_air_range: opt_quantity(
                "visibility.air_air_range",
                &vis_cfg.air_air_range,
                Dimension::Length,
                dv.air_air_range,
            )?,
            clearance_altitude: opt_quantity(
                "visibility.clearance_altitude",
                &vis_cfg.clearance_altitude,
                Dimension::Length,
                dv.clearance_altitude,
            )?,
        };

        let gateways = match &self.gateways {
            None => defaults.gateways.clone(),
            Some(list) => list
                .iter()
                .map(|g| {
                    Ok(Gateway {
                        name: g.name.clone(),
                        location: point(
                            &format!("gateways.{}", g.name),
                            [g.latitude, g.longitude],
                            0.0,
                        )?,
                    })
                })
                .collect::<Result<_, ConfigError>>()?,
        };

        let mut flights = Vec::with_capacity(self.flights.len());
        for f in &self.flights {
            let key = format!("flights.{}", f.name);
            let altitude = quantity(&format!("{key}.altitude"), &f.altitude, Dimension::Length)?;
            let route = FlightRoute {
                origin: point(&format!("{key}.origin"), f.origin, altitude)?,
                destination: point(&format!("{key}.destination"), f.destination, altitude)?,
                cruise_altitude: altitude,
                departure: quantity(&format!("{key}.departure"), &f.departure, Dimension::Time)?,
                speed: quantity(&format!("{key}.speed"), &f.speed, Dimension::Speed)?,
            };
            flights.push(Flight {
                name: f.name.clone(),
                route,
                passengers: f.passengers,
            });
        }

        let services = match &self.services {
            None => defaults.services.clone(),
            Some(list) => resolve_services(list)?,
        };

        let tm = self.task_model.clone().unwrap_or_default();
        let dt = TaskModel::default();
        let task_model = TaskModel {
            instructions: tm.instructions.unwrap_or(dt.instructions),
            task_size: opt_quantity(
                "task_model.task_size",
                &tm.task_size,
                Dimension::Size,
                dt.task_size,
            )?,
            deadline: opt_quantity(
                "task_model.deadline",
                &tm.deadline,
                Dimension::Time,
                dt.deadline,
            )?,
        };

        let procs = self.processors.clone().unwrap_or_default();
        let satellite_processor = match &procs.satellite {
            Some(p) => processor("processors.satellite", p)?,
            None => defaults.satellite_processor,
        };
        let mec_processor = match &procs.mec {
            Some(p) => processor("processors.mec", p)?,
            None => defaults.mec_processor,
        };

        let lim = self.limits.clone().unwrap_or_default();
        let dl = SolveLimits::default();
        let limits = SolveLimits {
            node_budget: lim.node_budget.unwrap_or(dl.node_budget),
            time_budget: opt_quantity(
                "limits.time_budget",
                &lim.time_budget,
                Dimension::Time,
                dl.time_budget,
            )?,
            require_optimal: lim.require_optimal.unwrap_or(dl.require_optimal),
        };

        let scenario = Scenario {
            shell,
            gateways,
            flights,
            services,
            task_model,
            satellite_processor,
            mec_processor,
            passenger_ratio: self.passenger_ratio.unwrap_or(defaults.passenger_ratio),
            mec_aircraft_ratio: self
                .mec_aircraft_ratio
                .unwrap_or(defaults.mec_aircraft_ratio),
            horizon: opt_quantity("horizon", &self.horizon, Dimension::Time, defaults.horizon)?,
            snapshot_interval: opt_quantity(
                "snapshot_interval",
                &self.snapshot_interval,
                Dimension::Time,
                defaults.snapshot_interval,
            )?,
            rng_seed: self.seed.unwrap_or(defaults.rng_seed),
            visibility,
            lambdas: self.lambdas.clone().unwrap_or(defaults.lambdas),
            ratios: self.ratios.clone().unwrap_or(defaults.ratios),
            limits,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Fully explicit document for a scenario, every quantity in SI.
    pub fn from_scenario(s: &Scenario) -> ScenarioConfig {
        let proc_cfg = |p: &ProcessorSpec| ProcessorConfig {
            frequency: emit(p.freq, Dimension::Frequency),
            ipc: p.ipc,
            cores: p.cores,
        };
        ScenarioConfig {
            seed: Some(s.rng_seed),
            horizon: Some(emit(s.horizon, Dimension::Time)),
            snapshot_interval: Some(emit(s.snapshot_interval, Dimension::Time)),
            passenger_ratio: Some(s.passenger_ratio),
            mec_aircraft_ratio: Some(s.mec_aircraft_ratio),
            ratios: Some(s.ratios.clone()),
            lambdas: Some(s.lambdas.clone()),
            constellation: ConstellationConfig {
                planes: s.shell.plane_count,
                sats_per_plane: s.shell.sats_per_plane,
                altitude: emit(s.shell.altitude, Dimension::Length),
                inclination: s.shell.inclination,
                raan_spacing: s.shell.raan_spacing,
                raan_offset: Some(s.shell.raan_offset),
                phase_offset: Some(s.shell.phase_offset),
                epoch: Some(emit(s.shell.epoch, Dimension::Time)),
            },
            visibility: Some(VisibilityConfig {
                sat_ground_mask: Some(s.visibility.sat_ground_mask),
                air_ground_mask: Some(s.visibility.air_ground_mask),
                air_air_range: Some(emit(s.visibility.air_air_range, Dimension::Length)),
                clearance_altitude: Some(emit(s.visibility.clearance_altitude, Dimension::Length)),
            }),
            gateways: Some(
                s.gateways
                    .iter()
                    .map(|g| GatewayConfig {
                        name: g.name.clone(),
                        latitude: g.location.latitude,
                        longitude: g.location.longitude,
                    })
                    .collect(),
            ),
            flights: s
                .flights
                .iter()
                .map(|f| FlightConfig {
                    name: f.name.clone(),
                    origin: [f.route.origin.latitude, f.route.origin.longitude],
                    destination: [f.route.destination.latitude, f.route.destination.longitude],
                    departure: emit(f.route.departure, Dimension::Time),
                    speed: emit(f.route.speed, Dimension::Speed),
                    altitude: emit(f.route.cruise_altitude, Dimension::Length),
                    passengers: f.passengers,
                })
                .collect(),
            services: Some(
                s.services
                    .iter()
                    .map(|v| ServiceConfig {
                        name: v.name.clone(),
                        bandwidth: Some(emit(v.bandwidth_per_user, Dimension::Rate)),
                        delay_bound: Some(emit(v.delay_bound, Dimension::Time)),
                        utilization: Some(v.utilization),
                        packet_size: Some(emit(v.packet_size, Dimension::Size)),
                    })
                    .collect(),
            ),
            task_model: Some(TaskModelConfig {
                instructions: Some(s.task_model.instructions),
                task_size: Some(emit(s.task_model.task_size, Dimension::Size)),
                deadline: Some(emit(s.task_model.deadline, Dimension::Time)),
            }),
            processors: Some(ProcessorsConfig {
                satellite: Some(proc_cfg(&s.satellite_processor)),
                mec: Some(proc_cfg(&s.mec_processor)),
            }),
            limits: Some(LimitsConfig {
                node_budget: Some(s.limits.node_budget),
                time_budget: Some(emit(s.limits.time_budget, Dimension::Time)),
                require_optimal: Some(s.limits.require_optimal),
            }),
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parse and resolve a scenario document held in memory.
pub fn parse_scenario_str(text: &str) -> Result<Scenario, ConfigError> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().trim().to_string();
        match e.span() {
            Some(span) => ConfigError::Parse(format!("line {}: {msg}", line_of(text, span.start))),
            None => ConfigError::Parse(msg),
        }
    })?;
    cfg.resolve()
}

pub fn parse_scenario(path: impl AsRef<Path>) -> Result<Scenario, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario_str(&text)
}

/// Fully resolved TOML for `scenario`.
pub fn emit_scenario(scenario: &Scenario) -> String {
    toml::to_string(&ScenarioConfig::from_scenario(scenario)).expect("scenario config serializes")
}

const DESK_SCENARIO: &str = include_str!("../scenarios/desk.toml");

/// Desk-scale scenario: one 11-satellite polar plane over Europe, four
/// gateways, ten staggered European flights, 2 h horizon at 5 min steps.
pub fn desk_scenario() -> Scenario {
    parse_scenario_str(DESK_SCENARIO).expect("built-in desk scenario is valid")
}

pub fn desk_scenario_text() -> &'static str {
    DESK_SCENARIO
}
