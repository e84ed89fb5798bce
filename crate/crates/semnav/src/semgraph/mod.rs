//! The semantic triplet graph.
//!
//! Nodes are places ([`PlaceId`]), directed edges are triplets
//! `from --behavior--> to`. A graph extracted from a floor plan also carries
//! a geometry table so the planner can thread positions along corridors
//! (an office entrance ahead of you is reachable; one behind you is not).

mod extract;
pub mod io;
mod plan;

pub use extract::{extract_graph, ExtractionError};
pub use plan::{plan_route, Plan, PlanError};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::floorplan::CellRect;
use crate::places::{PlaceId, Side};

/// The closed catalog of navigational behavior codes.
///
/// `Ooc` (leave the office crossing straight to the opposite entrance) is
/// admitted alongside the directional pair even though it only applies when
/// two office doors face each other across a corridor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BehaviorCode {
    Ool,
    Oor,
    Ooc,
    Cf,
    Iol,
    Ior,
    Chs,
    Chl,
    Chr,
    Ccc,
    Ccl,
    Ccr,
}

impl BehaviorCode {
    pub const ALL: [BehaviorCode; 12] = [
        BehaviorCode::Ool,
        BehaviorCode::Oor,
        BehaviorCode::Ooc,
        BehaviorCode::Cf,
        BehaviorCode::Iol,
        BehaviorCode::Ior,
        BehaviorCode::Chs,
        BehaviorCode::Chl,
        BehaviorCode::Chr,
        BehaviorCode::Ccc,
        BehaviorCode::Ccl,
        BehaviorCode::Ccr,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BehaviorCode::Ool => "ool",
            BehaviorCode::Oor => "oor",
            BehaviorCode::Ooc => "ooc",
            BehaviorCode::Cf => "cf",
            BehaviorCode::Iol => "iol",
            BehaviorCode::Ior => "ior",
            BehaviorCode::Chs => "chs",
            BehaviorCode::Chl => "chl",
            BehaviorCode::Chr => "chr",
            BehaviorCode::Ccc => "ccc",
            BehaviorCode::Ccl => "ccl",
            BehaviorCode::Ccr => "ccr",
        }
    }
}

impl fmt::Display for BehaviorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown behavior code {0:?}")]
pub struct ParseBehaviorError(pub String);

impl FromStr for BehaviorCode {
    type Err = ParseBehaviorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BehaviorCode::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| ParseBehaviorError(s.to_string()))
    }
}

/// A directed edge `from --behavior--> to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triplet {
    pub from: PlaceId,
    pub behavior: BehaviorCode,
    pub to: PlaceId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("behavior {behavior} incompatible with endpoints {from} -> {to}")]
pub struct TripletTypeError {
    pub from: PlaceId,
    pub behavior: BehaviorCode,
    pub to: PlaceId,
}

impl Triplet {
    /// Build a triplet, enforcing endpoint-kind compatibility.
    pub fn new(
        from: PlaceId,
        behavior: BehaviorCode,
        to: PlaceId,
    ) -> Result<Triplet, TripletTypeError> {
        let ok = match behavior {
            BehaviorCode::Ool | BehaviorCode::Oor => from.is_office() && to.is_corridor(),
            BehaviorCode::Ooc => from.is_office() && to.is_entrance(),
            BehaviorCode::Cf => from.is_corridor() && (to.is_hall() || to.is_entrance()),
            BehaviorCode::Iol | BehaviorCode::Ior => from.is_entrance() && to.is_office(),
            BehaviorCode::Chs | BehaviorCode::Chl | BehaviorCode::Chr => {
                from.is_hall() && to.is_corridor()
            }
            BehaviorCode::Ccc | BehaviorCode::Ccl | BehaviorCode::Ccr => {
                from.is_corridor() && to.is_corridor()
            }
        };
        if ok {
            Ok(Triplet { from, behavior, to })
        } else {
            Err(TripletTypeError { from, behavior, to })
        }
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} --{}--> {}", self.from, self.behavior, self.to)
    }
}

/// Geometry of one corridor as seen by the planner.
#[derive(Debug, Clone, PartialEq)]
pub struct CorridorGeom {
    pub horizontal: bool,
    pub rect: CellRect,
    /// What each end (indexed `[L, R]`) connects to.
    pub ends: [EndConnection; 2],
    /// World axis coordinate of each end `[L, R]`.
    pub end_pos: [f64; 2],
}

impl CorridorGeom {
    pub fn end(&self, side: Side) -> &EndConnection {
        &self.ends[side as usize]
    }

    pub fn end_axis_pos(&self, side: Side) -> f64 {
        self.end_pos[side as usize]
    }

    /// Unit heading of travel in direction `side`.
    pub fn heading(&self, side: Side) -> (i64, i64) {
        match (self.horizontal, side) {
            (true, Side::R) => (1, 0),
            (true, Side::L) => (-1, 0),
            (false, Side::R) => (0, 1),
            (false, Side::L) => (0, -1),
        }
    }

    /// World coordinate of the corridor center line on the perpendicular axis.
    pub fn perp_center(&self, cell_size: f64) -> f64 {
        if self.horizontal {
            (self.rect.y0 + self.rect.y1) as f64 / 2.0 * cell_size
        } else {
            (self.rect.x0 + self.rect.x1) as f64 / 2.0 * cell_size
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndConnection {
    DeadEnd,
    Hall(u32),
    /// Index into [`GraphGeometry::junctions`].
    Junction(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfficeGeom {
    pub corridor: u32,
    /// World coordinate of the door center along the corridor axis.
    pub axis_pos: f64,
    /// Doorway cell.
    pub door: (usize, usize),
    /// Unit step from the door cell into the corridor.
    pub door_normal: (i64, i64),
    /// Office interior rect.
    pub rect: CellRect,
    /// Office directly across the corridor, if the doors face each other.
    pub opposite: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HallGeom {
    pub rect: CellRect,
    /// Corridors whose ends open into this hall: `(corridor id, which end)`.
    pub connections: Vec<(u32, Side)>,
}

/// A corridor-corridor junction (no hall): the ends meeting at one block.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionGeom {
    pub members: Vec<(u32, Side)>,
    /// World center of the junction block.
    pub center: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphGeometry {
    pub cell_size: f64,
    pub corridors: BTreeMap<u32, CorridorGeom>,
    pub offices: BTreeMap<u32, OfficeGeom>,
    pub halls: BTreeMap<u32, HallGeom>,
    pub junctions: Vec<JunctionGeom>,
}

/// Node and edge sets plus optional geometry.
///
/// Graphs built by [`extract_graph`] carry geometry; graphs parsed from
/// triplet files are topology-only, and the planner falls back to plain
/// type-compatible traversal on them.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticGraph {
    nodes: BTreeSet<PlaceId>,
    edges: Vec<Triplet>,
    adjacency: BTreeMap<PlaceId, Vec<usize>>,
    pub geometry: Option<GraphGeometry>,
}

impl SemanticGraph {
    /// Build from explicit parts. Edges are deduplicated and kept sorted by
    /// `(from, behavior, to)`.
    pub fn from_parts(
        extra_nodes: impl IntoIterator<Item = PlaceId>,
        triplets: impl IntoIterator<Item = Triplet>,
        geometry: Option<GraphGeometry>,
    ) -> SemanticGraph {
        let mut nodes: BTreeSet<PlaceId> = extra_nodes.into_iter().collect();
        let mut set: BTreeSet<Triplet> = BTreeSet::new();
        for t in triplets {
            nodes.insert(t.from);
            nodes.insert(t.to);
            set.insert(t);
        }
        let edges: Vec<Triplet> = set.into_iter().collect();
        let mut adjacency: BTreeMap<PlaceId, Vec<usize>> = BTreeMap::new();
        for (i, t) in edges.iter().enumerate() {
            adjacency.entry(t.from).or_default().push(i);
        }
        // Deterministic expansion order for the planner: by behavior code
        // string, then target place string.
        for list in adjacency.values_mut() {
            list.sort_by(|&a, &b| {
                (edges[a].behavior.as_str(), edges[a].to.to_string())
                    .cmp(&(edges[b].behavior.as_str(), edges[b].to.to_string()))
            });
        }
        SemanticGraph {
            nodes,
            edges,
            adjacency,
            geometry,
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = PlaceId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn has_node(&self, p: PlaceId) -> bool {
        self.nodes.contains(&p)
    }

    pub fn edges(&self) -> &[Triplet] {
        &self.edges
    }

    pub fn contains(&self, t: &Triplet) -> bool {
        self.edges.binary_search(t).is_ok()
    }

    /// Outgoing triplets of a node in deterministic planner order.
    pub fn outgoing(&self, from: PlaceId) -> impl Iterator<Item = &Triplet> {
        self.adjacency
            .get(&from)
            .into_iter()
            .flatten()
            .map(move |&i| &self.edges[i])
    }

    pub fn offices(&self) -> impl Iterator<Item = u32> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            PlaceId::Office(k) => Some(*k),
            _ => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn behavior_codes_round_trip() {
        for code in BehaviorCode::ALL {
            assert_eq!(code.as_str().parse::<BehaviorCode>().unwrap(), code);
        }
        assert!("xyz".parse::<BehaviorCode>().is_err());
        assert!("CF".parse::<BehaviorCode>().is_err());
    }

    #[test]
    fn triplet_type_compatibility() {
        use crate::places::PlaceId::*;
        assert!(Triplet::new(Office(1), BehaviorCode::Oor, Corridor(1, Side::R)).is_ok());
        assert!(Triplet::new(Office(1), BehaviorCode::Ooc, Entrance(3)).is_ok());
        assert!(Triplet::new(Corridor(1, Side::R), BehaviorCode::Cf, Hall(1)).is_ok());
        assert!(Triplet::new(Entrance(8), BehaviorCode::Ior, Office(8)).is_ok());
        // oor must not leave from a corridor; cf must not end at an office.
        assert!(
            Triplet::new(Corridor(1, Side::R), BehaviorCode::Oor, Corridor(2, Side::L)).is_err()
        );
        assert!(Triplet::new(Corridor(1, Side::R), BehaviorCode::Cf, Office(2)).is_err());
        assert!(Triplet::new(Hall(1), BehaviorCode::Iol, Office(2)).is_err());
    }

    #[test]
    fn graph_dedups_and_sorts() {
        let t = |f, b, to| Triplet::new(f, b, to).unwrap();
        use crate::places::PlaceId::*;
        let g = SemanticGraph::from_parts(
            [],
            [
                t(Office(1), BehaviorCode::Oor, Corridor(1, Side::R)),
                t(Office(1), BehaviorCode::Oor, Corridor(1, Side::R)),
                t(Office(1), BehaviorCode::Ool, Corridor(1, Side::L)),
            ],
            None,
        );
        assert_eq!(g.edges().len(), 2);
        assert!(g.contains(&t(Office(1), BehaviorCode::Oor, Corridor(1, Side::R))));
        let order: Vec<_> = g.outgoing(Office(1)).map(|t| t.behavior).collect();
        assert_eq!(order, vec![BehaviorCode::Ool, BehaviorCode::Oor]);
    }
}
