//! Per-snapshot network graphs: node sets, inter-satellite links and
//! visibility-gated access links with their tabulated capacities.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::demand::{keyed_rng, ProcessorSpec, Service, TaskModel, DEFAULT_PASSENGER_RATIO};
use crate::error::ConfigError;
use crate::geom::{
    distance, elevation_angle, geodetic_to_ecef, line_of_sight, propagate_aircraft,
    propagate_satellite, EcefPosition, FlightRoute, GeodeticPoint, OrbitShell,
};
use crate::optimizer::SolveLimits;

/// Stable node identifier. The derived order (satellites, then aircraft,
/// then gateways) is the tie-breaking order used everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeId {
    Satellite { plane: u16, slot: u16 },
    Aircraft(u32),
    Gateway(u32),
}

impl NodeId {
    pub fn is_satellite(&self) -> bool {
        matches!(self, NodeId::Satellite { .. })
    }

    pub fn is_aircraft(&self) -> bool {
        matches!(self, NodeId::Aircraft(_))
    }

    pub fn is_gateway(&self) -> bool {
        matches!(self, NodeId::Gateway(_))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Satellite { plane, slot } => write!(f, "S{plane}.{slot}"),
            NodeId::Aircraft(i) => write!(f, "A{i}"),
            NodeId::Gateway(i) => write!(f, "G{i}"),
        }
    }
}

impl FromStr for NodeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("malformed node id `{s}`");
        let (tag, rest) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        match tag {
            "S" => {
                let (p, q) = rest.split_once('.').ok_or_else(bad)?;
                Ok(NodeId::Satellite {
                    plane: p.parse().map_err(|_| bad())?,
                    slot: q.parse().map_err(|_| bad())?,
                })
            }
            "A" => rest.parse().map(NodeId::Aircraft).map_err(|_| bad()),
            "G" => rest.parse().map(NodeId::Gateway).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LinkType {
    SatSat,
    SatAir,
    SatGw,
    AirAir,
    AirGw,
}

impl LinkType {
    pub const ALL: [LinkType; 5] = [
        LinkType::SatSat,
        LinkType::SatAir,
        LinkType::SatGw,
        LinkType::AirAir,
        LinkType::AirGw,
    ];

    /// Capacity in bits/s.
    pub fn capacity(self) -> f64 {
        match self {
            LinkType::SatSat => 125e6,
            LinkType::SatAir => 112e6,
            LinkType::SatGw => 500e6,
            LinkType::AirAir => 45e6,
            LinkType::AirGw => 75e6,
        }
    }

    /// Link type between two node kinds; `None` for gateway pairs.
    pub fn between(a: NodeId, b: NodeId) -> Option<LinkType> {
        use NodeId::*;
        match (a, b) {
            (Satellite { .. }, Satellite { .. }) => Some(LinkType::SatSat),
            (Satellite { .. }, Aircraft(_)) | (Aircraft(_), Satellite { .. }) => {
                Some(LinkType::SatAir)
            }
            (Satellite { .. }, Gateway(_)) | (Gateway(_), Satellite { .. }) => {
                Some(LinkType::SatGw)
            }
            (Aircraft(_), Aircraft(_)) => Some(LinkType::AirAir),
            (Aircraft(_), Gateway(_)) | (Gateway(_), Aircraft(_)) => Some(LinkType::AirGw),
            (Gateway(_), Gateway(_)) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gateway {
    pub name: String,
    pub location: GeodeticPoint,
}

impl Gateway {
    fn new(name: &str, lat: f64, lon: f64) -> Self {
        Self {
            name: name.to_string(),
            location: GeodeticPoint {
                latitude: lat,
                longitude: lon,
                altitude: 0.0,
            },
        }
    }

    /// The ten Iridium-Next ground stations.
    pub fn iridium_next() -> Vec<Gateway> {
        vec![
            Gateway::new("Beijing", 39.92, 116.388),
            Gateway::new("Fairbanks", 64.838, -147.716),
            Gateway::new("Iqaluit", 63.733, -68.5),
            Gateway::new("Ischewsk", 56.85, 53.204),
            Gateway::new("Longyearbyen", 79.0, 17.66),
            Gateway::new("Punta Arenas", -53.315, -71.58),
            Gateway::new("Rome", 41.9, 12.483),
            Gateway::new("Tempe", 33.415, -111.909),
            Gateway::new("Wahiawa", 21.503, -158.024),
            Gateway::new("Yellowknife", 62.45, -114.35),
        ]
    }
}

pub const MIN_PASSENGERS: u32 = 132;
pub const MAX_PASSENGERS: u32 = 853;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flight {
    pub name: String,
    pub route: FlightRoute,
    pub passengers: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeKind {
    Satellite {
        plane: u16,
        slot: u16,
    },
    Aircraft {
        name: String,
        passengers: u32,
        has_mec: bool,
        route: FlightRoute,
    },
    Gateway {
        name: String,
        location: GeodeticPoint,
        has_mec: bool,
    },
}

impl NodeKind {
    pub fn has_mec(&self) -> bool {
        match self {
            NodeKind::Satellite { .. } => false,
            NodeKind::Aircraft { has_mec, .. } | NodeKind::Gateway { has_mec, .. } => *has_mec,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub position: EcefPosition,
}

/// Undirected physical link; `a < b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub a: NodeId,
    pub b: NodeId,
    pub link_type: LinkType,
    /// meters
    pub distance: f64,
    /// bits/s, applies to each direction independently
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub index: usize,
    /// seconds
    pub time: f64,
    /// sorted by id
    pub nodes: Vec<Node>,
    /// sorted by (a, b)
    pub links: Vec<Link>,
}

impl Snapshot {
    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes
            .binary_search_by(|n| n.id.cmp(&id))
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn link(&self, u: NodeId, v: NodeId) -> Option<&Link> {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.links
            .binary_search_by(|l| (l.a, l.b).cmp(&(a, b)))
            .ok()
            .map(|i| &self.links[i])
    }

    pub fn mec_nodes(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|n| n.kind.has_mec())
            .map(|n| n.id)
            .collect()
    }

    /// Structured-text export (JSON): nodes with kind and position, links
    /// with type, distance and capacity.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }

    pub fn from_json(text: &str) -> Result<Snapshot, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Visibility {
    /// degrees, satellite seen from a gateway or aircraft
    pub sat_ground_mask: f64,
    /// degrees, aircraft seen from a gateway
    pub air_ground_mask: f64,
    /// meters
    pub air_air_range: f64,
    /// meters above the sphere a satellite-satellite ray must clear
    pub clearance_altitude: f64,
}

impl Default for Visibility {
    fn default() -> Self {
        Self {
            sat_ground_mask: 10.0,
            air_ground_mask: 5.0,
            air_air_range: 400_000.0,
            clearance_altitude: 80_000.0,
        }
    }
}

/// Everything needed to regenerate a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub shell: OrbitShell,
    pub gateways: Vec<Gateway>,
    pub flights: Vec<Flight>,
    pub services: Vec<Service>,
    pub task_model: TaskModel,
    pub satellite_processor: ProcessorSpec,
    pub mec_processor: ProcessorSpec,
    pub passenger_ratio: f64,
    pub mec_aircraft_ratio: f64,
    /// seconds
    pub horizon: f64,
    /// seconds
    pub snapshot_interval: f64,
    pub rng_seed: u64,
    pub visibility: Visibility,
    /// task arrival rates (tasks/s) swept by offloading runs
    pub lambdas: Vec<f64>,
    /// aerial MEC deployment ratios swept by experiments
    pub ratios: Vec<f64>,
    pub limits: SolveLimits,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            shell: OrbitShell::iridium_next(),
            gateways: Gateway::iridium_next(),
            flights: Vec::new(),
            services: Service::defaults(),
            task_model: TaskModel::default(),
            satellite_processor: ProcessorSpec::CORTEX_A8,
            mec_processor: ProcessorSpec::CORTEX_A73,
            passenger_ratio: DEFAULT_PASSENGER_RATIO,
            mec_aircraft_ratio: 0.0,
            horizon: 4.0 * 3600.0,
            snapshot_interval: 300.0,
            rng_seed: 1,
            visibility: Visibility::default(),
            lambdas: vec![72.0, 76.0, 80.0],
            ratios: vec![0.0, 0.2, 0.4],
            limits: SolveLimits::default(),
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        self.shell.validate()?;
        for g in &self.gateways {
            g.location.validate()?;
        }
        for f in &self.flights {
            f.route.validate()?;
            if !(MIN_PASSENGERS..=MAX_PASSENGERS).contains(&f.passengers) {
                return invalid(format!(
                    "flight {}: passengers {} out of [{MIN_PASSENGERS}, {MAX_PASSENGERS}]",
                    f.name, f.passengers
                ));
            }
        }
        for s in &self.services {
            s.validate().map_err(ConfigError::Invalid)?;
        }
        if !(0.0..=1.0).contains(&self.mec_aircraft_ratio) {
            return invalid("mec_aircraft_ratio out of [0,1]".into());
        }
        if let Some(r) = self.ratios.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return invalid(format!("ratio {r} out of [0,1]"));
        }
        if !(self.passenger_ratio > 0.0 && self.passenger_ratio <= 1.0) {
            return invalid("passenger_ratio out of (0,1]".into());
        }
        if !(self.snapshot_interval > 0.0) {
            return invalid("snapshot_interval must be positive".into());
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return invalid("horizon must be a non-negative duration".into());
        }
        if self.lambdas.iter().any(|l| !(*l >= 0.0)) {
            return invalid("task arrival rates must be non-negative".into());
        }
        let t = &self.task_model;
        if !(t.instructions > 0.0 && t.task_size > 0.0 && t.deadline > 0.0) {
            return invalid("task model fields must be positive".into());
        }
        for p in [&self.satellite_processor, &self.mec_processor] {
            if !(p.freq > 0.0 && p.ipc > 0.0 && p.cores > 0) {
                return invalid("processor fields must be positive".into());
            }
        }
        if self.limits.node_budget == 0 || !(self.limits.time_budget > 0.0) {
            return invalid("solver budgets must be positive".into());
        }
        Ok(())
    }

    pub fn snapshot_count(&self) -> usize {
        (self.horizon / self.snapshot_interval + 1e-9).floor() as usize + 1
    }

    pub fn aircraft_ids(&self) -> Vec<NodeId> {
        (0..self.flights.len() as u32)
            .map(NodeId::Aircraft)
            .collect()
    }
}

/// Same-plane ring plus same-slot links to adjacent planes (no seam wrap).
pub fn select_isls(shell: &OrbitShell) -> Vec<(NodeId, NodeId)> {
    let sat = |p: usize, s: usize| NodeId::Satellite {
        plane: p as u16,
        slot: s as u16,
    };
    let n = shell.sats_per_plane;
    let mut out = BTreeSet::new();
    for p in 0..shell.plane_count {
        for s in 0..n {
            let next = (s + 1) % n;
            if next != s {
                let (a, b) = (sat(p, s), sat(p, next));
                out.insert(if a < b { (a, b) } else { (b, a) });
            }
            if p + 1 < shell.plane_count {
                out.insert((sat(p, s), sat(p + 1, s)));
            }
        }
    }
    out.into_iter().collect()
}

/// Aircraft carrying a MEC server for this run: a prefix of one seeded
/// permutation, so larger ratios give supersets.
pub fn assign_mec_aircraft(scenario: &Scenario) -> BTreeSet<NodeId> {
    let mut ids = scenario.aircraft_ids();
    let mut rng = keyed_rng(scenario.rng_seed, &[0x4d45_43]);
    ids.shuffle(&mut rng);
    let take = (scenario.mec_aircraft_ratio * ids.len() as f64 + 1e-9).floor() as usize;
    ids.into_iter()
        .take(take.min(scenario.flights.len()))
        .collect()
}

fn positioned_nodes(scenario: &Scenario, t: f64) -> Vec<Node> {
    let mec = assign_mec_aircraft(scenario);
    let shell = &scenario.shell;
    let mut nodes = Vec::new();
    for p in 0..shell.plane_count {
        for s in 0..shell.sats_per_plane {
            nodes.push(Node {
                id: NodeId::Satellite {
                    plane: p as u16,
                    slot: s as u16,
                },
                kind: NodeKind::Satellite {
                    plane: p as u16,
                    slot: s as u16,
                },
                position: propagate_satellite(shell, p, s, t).expect("indices in range"),
            });
        }
    }
    for (i, f) in scenario.flights.iter().enumerate() {
        let id = NodeId::Aircraft(i as u32);
        if let Some(position) = propagate_aircraft(&f.route, t) {
            nodes.push(Node {
                id,
                kind: NodeKind::Aircraft {
                    name: f.name.clone(),
                    passengers: f.passengers,
                    has_mec: mec.contains(&id),
                    route: f.route.clone(),
                },
                position,
            });
        }
    }
    for (i, g) in scenario.gateways.iter().enumerate() {
        nodes.push(Node {
            id: NodeId::Gateway(i as u32),
            kind: NodeKind::Gateway {
                name: g.name.clone(),
                location: g.location,
                has_mec: true,
            },
            position: geodetic_to_ecef(&g.location),
        });
    }
    nodes.sort_by_key(|n| n.id);
    nodes
}

/// Visibility rule for a non-ISL pair, applied with `a < b` in id order.
fn visible(a: &Node, b: &Node, vis: &Visibility) -> bool {
    let clear = vis.clearance_altitude;
    if !line_of_sight(&a.position, &b.position, clear) {
        return false;
    }
    match LinkType::between(a.id, b.id) {
        // a is the satellite (satellites sort first)
        Some(LinkType::SatAir) | Some(LinkType::SatGw) => {
            elevation_angle(&b.position, &a.position) >= vis.sat_ground_mask
        }
        Some(LinkType::AirGw) => elevation_angle(&b.position, &a.position) >= vis.air_ground_mask,
        Some(LinkType::AirAir) => distance(&a.position, &b.position) <= vis.air_air_range,
        _ => false,
    }
}

fn make_link(a: &Node, b: &Node, link_type: LinkType) -> Link {
    Link {
        a: a.id,
        b: b.id,
        link_type,
        distance: distance(&a.position, &b.position),
        capacity: link_type.capacity(),
    }
}

pub fn build_snapshot(scenario: &Scenario, index: usize) -> Snapshot {
    let time = index as f64 * scenario.snapshot_interval;
    let nodes = positioned_nodes(scenario, time);
    let at = |id: NodeId| nodes.binary_search_by(|n| n.id.cmp(&id)).ok();

    let mut links = Vec::new();
    for (u, v) in select_isls(&scenario.shell) {
        let (a, b) = (&nodes[at(u).unwrap()], &nodes[at(v).unwrap()]);
        links.push(make_link(a, b, LinkType::SatSat));
    }
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            match LinkType::between(a.id, b.id) {
                None | Some(LinkType::SatSat) => continue,
                Some(t) => {
                    if visible(a, b, &scenario.visibility) {
                        links.push(make_link(a, b, t));
                    }
                }
            }
        }
    }
    links.sort_by_key(|x| (x.a, x.b));
    Snapshot {
        index,
        time,
        nodes,
        links,
    }
}

pub fn snapshot_series(scenario: &Scenario) -> Vec<Snapshot> {
    (0..scenario.snapshot_count())
        .map(|r| build_snapshot(scenario, r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::EARTH_RADIUS;
    use std::collections::BTreeMap;

    fn degree_map(edges: &[(NodeId, NodeId)]) -> BTreeMap<NodeId, usize> {
        let mut deg = BTreeMap::new();
        for (a, b) in edges {
            *deg.entry(*a).or_default() += 1;
            *deg.entry(*b).or_default() += 1;
        }
        deg
    }

    fn shell(planes: usize, slots: usize) -> OrbitShell {
        OrbitShell {
            plane_count: planes,
            sats_per_plane: slots,
            ..OrbitShell::iridium_next()
        }
    }

    #[test]
    fn node_id_roundtrip_and_order() {
        for id in [
            NodeId::Satellite { plane: 3, slot: 10 },
            NodeId::Aircraft(17),
            NodeId::Gateway(2),
        ] {
            assert_eq!(id.to_string().parse::<NodeId>().unwrap(), id);
        }
        assert!(NodeId::Satellite { plane: 9, slot: 9 } < NodeId::Aircraft(0));
        assert!(NodeId::Aircraft(99) < NodeId::Gateway(0));
        assert!("X1".parse::<NodeId>().is_err());
        assert!("S1".parse::<NodeId>().is_err());
    }

    #[test]
    fn isl_single_plane_ring() {
        let isls = select_isls(&shell(1, 4));
        assert_eq!(isls.len(), 4);
        assert!(degree_map(&isls).values().all(|&d| d == 2));
    }

    #[test]
    fn isl_iridium_degrees() {
        let isls = select_isls(&shell(6, 11));
        let deg = degree_map(&isls);
        for (id, d) in deg {
            let NodeId::Satellite { plane, .. } = id else {
                unreachable!()
            };
            let expected = if plane == 0 || plane == 5 { 3 } else { 4 };
            assert_eq!(d, expected, "{id}");
        }
    }

    #[test]
    fn isl_two_by_two() {
        // slots 0 and 1 are each other's +1 and -1 neighbor: one intra link
        // per plane, plus the same-slot inter-plane link
        let isls = select_isls(&shell(2, 2));
        assert_eq!(isls.len(), 4);
        assert!(degree_map(&isls).values().all(|&d| d == 2));
    }

    #[test]
    fn single_plane_ring_is_one_cycle() {
        let isls = select_isls(&shell(1, 11));
        assert_eq!(isls.len(), 11);
        // walk the ring from slot 0
        let mut seen = BTreeSet::new();
        let mut cur = NodeId::Satellite { plane: 0, slot: 0 };
        let mut prev = None;
        loop {
            seen.insert(cur);
            let next = isls
                .iter()
                .filter_map(|&(a, b)| {
                    if a == cur {
                        Some(b)
                    } else if b == cur {
                        Some(a)
                    } else {
                        None
                    }
                })
                .find(|n| Some(*n) != prev)
                .unwrap();
            prev = Some(cur);
            cur = next;
            if cur == (NodeId::Satellite { plane: 0, slot: 0 }) {
                break;
            }
        }
        assert_eq!(seen.len(), 11);
    }

    fn overhead_scenario() -> Scenario {
        // polar single plane, slot 0 starts over (0 N, 0 E)
        let mut sc = Scenario {
            shell: OrbitShell {
                plane_count: 1,
                sats_per_plane: 11,
                inclination: 90.0,
                ..OrbitShell::iridium_next()
            },
            gateways: vec![
                Gateway::new("Null Island", 0.0, 0.0),
                Gateway::new("Antipode", 0.0, 180.0),
            ],
            ..Scenario::default()
        };
        sc.horizon = 600.0;
        sc
    }

    #[test]
    fn overhead_gateway_link() {
        let snap = build_snapshot(&overhead_scenario(), 0);
        let link = snap
            .link(NodeId::Satellite { plane: 0, slot: 0 }, NodeId::Gateway(0))
            .expect("overhead link");
        assert_eq!(link.link_type, LinkType::SatGw);
        assert!((link.distance - 781_000.0).abs() < 1e-6);
        assert_eq!(link.capacity, 500e6);
    }

    #[test]
    fn gateway_without_satellite_has_no_links() {
        let mut sc = overhead_scenario();
        // plane at RAAN 0 passes over lon 0/180; lon 90 on the equator is
        // 90 degrees away from every satellite
        sc.gateways = vec![Gateway::new("Side", 0.0, 90.0)];
        let snap = build_snapshot(&sc, 0);
        assert!(snap.links.iter().all(|l| l.b != NodeId::Gateway(0)));
    }

    fn flight(name: &str, lat: f64, lon: f64) -> Flight {
        Flight {
            name: name.into(),
            route: FlightRoute {
                origin: GeodeticPoint::new(lat, lon, 0.0).unwrap(),
                destination: GeodeticPoint::new(lat, lon + 10.0, 0.0).unwrap(),
                cruise_altitude: 11_000.0,
                departure: 0.0,
                speed: 250.0,
            },
            passengers: 180,
        }
    }

    #[test]
    fn air_air_link_within_range() {
        let mut sc = overhead_scenario();
        let sep = 350_000.0 / (EARTH_RADIUS + 11_000.0);
        sc.flights = vec![flight("a", 0.0, 40.0), flight("b", sep.to_degrees(), 40.0)];
        let snap = build_snapshot(&sc, 0);
        let l = snap
            .link(NodeId::Aircraft(0), NodeId::Aircraft(1))
            .expect("air-air");
        assert_eq!(l.link_type, LinkType::AirAir);
        assert_eq!(l.capacity, 45e6);
        assert!(l.distance < 400_000.0);
    }

    #[test]
    fn snapshot_invariants() {
        let mut sc = Scenario {
            flights: vec![
                flight("a", 45.0, 5.0),
                flight("b", 47.0, 8.0),
                flight("c", 41.0, 12.0),
            ],
            ..Scenario::default()
        };
        sc.horizon = 3600.0;
        sc.mec_aircraft_ratio = 0.4;
        for snap in snapshot_series(&sc) {
            for l in &snap.links {
                assert!(l.a < l.b);
                assert_eq!(l.capacity, l.link_type.capacity());
                assert!(l.distance > 0.0);
                assert!(snap.node(l.a).is_some() && snap.node(l.b).is_some());
                assert!(!(l.a.is_gateway() && l.b.is_gateway()));
            }
        }
        assert_eq!(build_snapshot(&sc, 3), build_snapshot(&sc, 3));
    }

    #[test]
    fn series_lengths() {
        let mut sc = Scenario::default();
        sc.horizon = 4.0 * 3600.0;
        assert_eq!(sc.snapshot_count(), 49);
        sc.horizon = sc.snapshot_interval;
        assert_eq!(snapshot_series(&sc).len(), 2);
    }

    #[test]
    fn mec_assignment() {
        let mut sc = Scenario {
            flights: (0..20)
                .map(|i| flight(&format!("f{i}"), 10.0, i as f64))
                .collect(),
            ..Scenario::default()
        };
        sc.rng_seed = 42;
        sc.mec_aircraft_ratio = 0.0;
        assert!(assign_mec_aircraft(&sc).is_empty());
        sc.mec_aircraft_ratio = 1.0;
        assert_eq!(assign_mec_aircraft(&sc).len(), 20);
        sc.mec_aircraft_ratio = 0.2;
        let a = assign_mec_aircraft(&sc);
        assert_eq!(a.len(), 4);
        assert_eq!(a, assign_mec_aircraft(&sc));
        sc.mec_aircraft_ratio = 0.4;
        assert!(a.is_subset(&assign_mec_aircraft(&sc)));
    }

    #[test]
    fn snapshot_json_roundtrip() {
        let snap = build_snapshot(&overhead_scenario(), 1);
        assert_eq!(Snapshot::from_json(&snap.to_json()).unwrap(), snap);
    }
}
