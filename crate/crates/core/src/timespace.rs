//! Daily cyclic time-space network of one fleet type in one month.
//!
//! Nodes are departure and arrival-ready events merged by (station, time).
//! Each station's nodes are chained by ground arcs in time order, closed by
//! an overnight wraparound arc. An arc counts towards the aircraft total if
//! it spans the count time.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{FleetId, Instance, LegId, MonthId, StationId, MINUTES_PER_DAY};

pub const DEFAULT_COUNT_TIME: u32 = 180;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Departure,
    ArrivalReady,
    /// A departure and an arrival-ready event at the same minute.
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventNode {
    pub station: StationId,
    pub time: u32,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LegArc {
    pub leg: LegId,
    pub from: NodeId,
    pub to: NodeId,
    /// Minutes from departure until the aircraft is ready again.
    pub duration: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundArc {
    pub from: NodeId,
    pub to: NodeId,
    pub duration: u32,
    pub wraparound: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Adjacency {
    /// Indices into `leg_arcs`.
    pub legs_out: Vec<usize>,
    pub legs_in: Vec<usize>,
    /// Indices into `ground_arcs`.
    pub ground_out: Vec<usize>,
    pub ground_in: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("unknown node {0}")]
    UnknownNode(usize),
}

#[derive(Debug, Clone)]
pub struct TimeSpaceNetwork {
    pub month: MonthId,
    pub fleet: FleetId,
    pub nodes: Vec<EventNode>,
    pub leg_arcs: Vec<LegArc>,
    pub ground_arcs: Vec<GroundArc>,
    pub count_time: u32,
    /// Indices into `leg_arcs`.
    pub leg_crossers: Vec<usize>,
    /// Indices into `ground_arcs`.
    pub ground_crossers: Vec<usize>,
    adjacency: Vec<Adjacency>,
}

/// Whether an arc leaving at `start` and lasting `duration` minutes spans
/// the count time, treating the arc as the half-open interval
/// (start, start + duration].
pub fn crosses(start: u32, duration: u32, count_time: u32) -> bool {
    let x = (start + MINUTES_PER_DAY - count_time % MINUTES_PER_DAY) % MINUTES_PER_DAY;
    x + duration >= MINUTES_PER_DAY
}

/// Builds the network of fleet type `f` in month `m` over the legs `f` can
/// fly (those with an operating cost). Stations without events are omitted.
pub fn build_network(inst: &Instance, m: MonthId, f: FleetId, count_time: u32) -> TimeSpaceNetwork {
    let turn = inst.fleet(f).min_turn_time;
    let legs: Vec<LegId> = inst
        .legs_in_month(m)
        .iter()
        .copied()
        .filter(|&l| inst.profit(l, f).is_some())
        .collect();

    // (station, time) -> (has departure, has arrival)
    let mut events: BTreeMap<(StationId, u32), (bool, bool)> = BTreeMap::new();
    let ready = |l: LegId| (inst.leg(l).arrival + turn) % MINUTES_PER_DAY;
    for &l in &legs {
        events.entry((inst.leg_origin(l), inst.leg(l).departure)).or_default().0 = true;
        events.entry((inst.leg_destination(l), ready(l))).or_default().1 = true;
    }
    let mut index = BTreeMap::new();
    let nodes: Vec<EventNode> = events
        .iter()
        .enumerate()
        .map(|(i, (&(station, time), &(dep, arr)))| {
            index.insert((station, time), NodeId(i));
            EventNode {
                station,
                time,
                kind: match (dep, arr) {
                    (true, true) => NodeKind::Both,
                    (true, false) => NodeKind::Departure,
                    _ => NodeKind::ArrivalReady,
                },
            }
        })
        .collect();

    let leg_arcs: Vec<LegArc> = legs
        .iter()
        .map(|&l| LegArc {
            leg: l,
            from: index[&(inst.leg_origin(l), inst.leg(l).departure)],
            to: index[&(inst.leg_destination(l), ready(l))],
            duration: inst.leg(l).block_minutes() + turn,
        })
        .collect();

    // nodes are sorted by (station, time), so each station is a run
    let mut ground_arcs = Vec::new();
    let mut start = 0;
    while start < nodes.len() {
        let station = nodes[start].station;
        let mut end = start;
        while end < nodes.len() && nodes[end].station == station {
            end += 1;
        }
        for i in start..end {
            let wraparound = i + 1 == end;
            let j = if wraparound { start } else { i + 1 };
            let duration = if i == j {
                MINUTES_PER_DAY
            } else {
                (nodes[j].time + MINUTES_PER_DAY - nodes[i].time) % MINUTES_PER_DAY
            };
            ground_arcs.push(GroundArc {
                from: NodeId(i),
                to: NodeId(j),
                duration,
                wraparound,
            });
        }
        start = end;
    }

    let leg_crossers = leg_arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| crosses(inst.leg(a.leg).departure, a.duration, count_time))
        .map(|(i, _)| i)
        .collect();
    let ground_crossers = ground_arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| crosses(nodes[a.from.0].time, a.duration, count_time))
        .map(|(i, _)| i)
        .collect();

    let mut adjacency = vec![Adjacency::default(); nodes.len()];
    for (i, a) in leg_arcs.iter().enumerate() {
        adjacency[a.from.0].legs_out.push(i);
        adjacency[a.to.0].legs_in.push(i);
    }
    for (i, a) in ground_arcs.iter().enumerate() {
        adjacency[a.from.0].ground_out.push(i);
        adjacency[a.to.0].ground_in.push(i);
    }

    TimeSpaceNetwork {
        month: m,
        fleet: f,
        nodes,
        leg_arcs,
        ground_arcs,
        count_time,
        leg_crossers,
        ground_crossers,
        adjacency,
    }
}

impl TimeSpaceNetwork {
    pub fn adjacency(&self, n: NodeId) -> Result<&Adjacency, NetworkError> {
        self.adjacency.get(n.0).ok_or(NetworkError::UnknownNode(n.0))
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn leg_arc(&self, l: LegId) -> Option<&LegArc> {
        self.leg_arcs.iter().find(|a| a.leg == l)
    }

    /// Graphviz rendering for debugging.
    pub fn to_dot(&self, inst: &Instance) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "digraph \"{}_{}\" {{",
            inst.month_name(self.month),
            inst.fleet(self.fleet).id
        );
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(
                s,
                "  n{i} [label=\"{}@{:02}:{:02}\"];",
                inst.station_name(n.station),
                n.time / 60,
                n.time % 60
            );
        }
        for (i, a) in self.leg_arcs.iter().enumerate() {
            let style = if self.leg_crossers.contains(&i) { ", color=red" } else { "" };
            let _ = writeln!(
                s,
                "  n{} -> n{} [label=\"{}\"{style}];",
                a.from.0,
                a.to.0,
                inst.leg(a.leg).id
            );
        }
        for (i, a) in self.ground_arcs.iter().enumerate() {
            let style = if self.ground_crossers.contains(&i) { ", color=red" } else { "" };
            let _ = writeln!(s, "  n{} -> n{} [style=dashed{style}];", a.from.0, a.to.0);
        }
        s.push_str("}\n");
        s
    }
}
