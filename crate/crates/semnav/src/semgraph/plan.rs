//! Minimum-hop route planning over the triplet graph.
//!
//! Plans are computed by breadth-first search over `(place, context)`
//! states. The context threads just enough geometry to keep chains
//! physically consistent: the entry position when traveling a corridor
//! (so only entrances ahead of it are reachable by `cf`), the arrival
//! heading at a hall (so the `ch` turn code matches), and the approach
//! direction at an entrance (so the `io` turn side matches). Ties between
//! equal-hop routes break lexicographically by `(behavior code, to place)`
//! through the graph's deterministic adjacency order.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use super::extract::{turn_between, Turn};
use super::{BehaviorCode, EndConnection, GraphGeometry, SemanticGraph, Triplet};
use crate::places::PlaceId;

/// An ordered triplet chain from a start office to a goal office.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub start: PlaceId,
    pub goal: PlaceId,
    pub triplets: Vec<Triplet>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("place {0} is not an office node of the graph")]
    UnknownPlace(PlaceId),
    #[error("no route from {start} to {goal}")]
    NoRoute { start: PlaceId, goal: PlaceId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Ctx {
    Plain,
    /// Entered a corridor-direction node at this axis position (micrometers,
    /// for exact hashing).
    OnCorridor { entry_um: i64 },
    /// Arrived at an entrance; only this io code is consistent.
    AtEntrance { io: BehaviorCode },
    /// Arrived at a hall with this heading.
    AtHall { heading: (i64, i64) },
}

fn um(v: f64) -> i64 {
    (v * 1e6).round() as i64
}

/// Minimum-hop plan between two offices.
pub fn plan_route(
    graph: &SemanticGraph,
    start: PlaceId,
    goal: PlaceId,
) -> Result<Plan, PlanError> {
    for p in [start, goal] {
        if !p.is_office() || !graph.has_node(p) {
            return Err(PlanError::UnknownPlace(p));
        }
    }
    if start == goal {
        return Ok(Plan {
            start,
            goal,
            triplets: Vec::new(),
        });
    }

    let init = (start, Ctx::Plain);
    let mut visited: HashSet<(PlaceId, Ctx)> = HashSet::new();
    let mut parent: HashMap<(PlaceId, Ctx), ((PlaceId, Ctx), Triplet)> = HashMap::new();
    let mut queue: VecDeque<(PlaceId, Ctx)> = VecDeque::new();
    visited.insert(init);
    queue.push_back(init);

    while let Some(state) = queue.pop_front() {
        if state.0 == goal {
            let mut triplets = Vec::new();
            let mut cur = state;
            while cur != init {
                let (prev, t) = parent[&cur];
                triplets.push(t);
                cur = prev;
            }
            triplets.reverse();
            return Ok(Plan {
                start,
                goal,
                triplets,
            });
        }
        for (t, next_ctx) in successors(graph, state.0, state.1) {
            let next = (t.to, next_ctx);
            if visited.insert(next) {
                parent.insert(next, (state, t));
                queue.push_back(next);
            }
        }
    }

    Err(PlanError::NoRoute { start, goal })
}

/// Consistent `(edge, next context)` expansions of a state, in the graph's
/// deterministic adjacency order.
fn successors(graph: &SemanticGraph, place: PlaceId, ctx: Ctx) -> Vec<(Triplet, Ctx)> {
    let geom = graph.geometry.as_ref();
    let mut out = Vec::new();
    for t in graph.outgoing(place) {
        let next = match geom {
            Some(g) => consistent_step(g, t, ctx),
            None => Some(Ctx::Plain),
        };
        if let Some(next_ctx) = next {
            out.push((*t, next_ctx));
        }
    }
    out
}

fn consistent_step(g: &GraphGeometry, t: &Triplet, ctx: Ctx) -> Option<Ctx> {
    match t.behavior {
        BehaviorCode::Ool | BehaviorCode::Oor => {
            let PlaceId::Office(k) = t.from else { return None };
            let og = g.offices.get(&k)?;
            Some(Ctx::OnCorridor {
                entry_um: um(og.axis_pos),
            })
        }
        BehaviorCode::Ooc => Some(Ctx::AtEntrance {
            io: BehaviorCode::Ior,
        }),
        BehaviorCode::Cf => {
            let Ctx::OnCorridor { entry_um } = ctx else {
                return None;
            };
            let PlaceId::Corridor(j, d) = t.from else { return None };
            let cg = g.corridors.get(&j)?;
            match t.to {
                PlaceId::Entrance(m) => {
                    let og = g.offices.get(&m)?;
                    if og.corridor != j {
                        return None;
                    }
                    // Strictly ahead of the entry point, with half a cell of
                    // slack so the entrance just exited is not a target.
                    let margin = um(0.4 * g.cell_size);
                    let pos = um(og.axis_pos);
                    let ahead = match d {
                        crate::places::Side::R => pos > entry_um + margin,
                        crate::places::Side::L => pos < entry_um - margin,
                    };
                    if !ahead {
                        return None;
                    }
                    let enter = (-og.door_normal.0, -og.door_normal.1);
                    let io = match turn_between(cg.heading(d), enter)? {
                        Turn::Left => BehaviorCode::Iol,
                        Turn::Right => BehaviorCode::Ior,
                        Turn::Straight => return None,
                    };
                    Some(Ctx::AtEntrance { io })
                }
                PlaceId::Hall(h) => {
                    if *cg.end(d) != EndConnection::Hall(h) {
                        return None;
                    }
                    Some(Ctx::AtHall {
                        heading: cg.heading(d),
                    })
                }
                _ => None,
            }
        }
        BehaviorCode::Iol | BehaviorCode::Ior => {
            let Ctx::AtEntrance { io } = ctx else {
                return None;
            };
            if t.behavior != io {
                return None;
            }
            Some(Ctx::Plain)
        }
        BehaviorCode::Chs | BehaviorCode::Chl | BehaviorCode::Chr => {
            let Ctx::AtHall { heading } = ctx else {
                return None;
            };
            let PlaceId::Corridor(j, d) = t.to else { return None };
            let cg = g.corridors.get(&j)?;
            let code = match turn_between(heading, cg.heading(d))? {
                Turn::Straight => BehaviorCode::Chs,
                Turn::Left => BehaviorCode::Chl,
                Turn::Right => BehaviorCode::Chr,
            };
            if code != t.behavior {
                return None;
            }
            Some(Ctx::OnCorridor {
                entry_um: um(cg.end_axis_pos(d.opposite())),
            })
        }
        BehaviorCode::Ccc | BehaviorCode::Ccl | BehaviorCode::Ccr => {
            let Ctx::OnCorridor { .. } = ctx else {
                return None;
            };
            let PlaceId::Corridor(j, d) = t.to else { return None };
            let cg = g.corridors.get(&j)?;
            Some(Ctx::OnCorridor {
                entry_um: um(cg.end_axis_pos(d.opposite())),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::{generate_floorplan, GenConfig};
    use crate::semgraph::extract_graph;

    #[test]
    fn start_equals_goal_gives_empty_plan() {
        let plan = generate_floorplan(1, &GenConfig::default()).unwrap();
        let graph = extract_graph(&plan).unwrap();
        let o = graph.offices().next().unwrap();
        let route = plan_route(&graph, PlaceId::Office(o), PlaceId::Office(o)).unwrap();
        assert!(route.is_empty());
    }

    #[test]
    fn unknown_place_is_reported() {
        let plan = generate_floorplan(1, &GenConfig::default()).unwrap();
        let graph = extract_graph(&plan).unwrap();
        let o = graph.offices().next().unwrap();
        assert_eq!(
            plan_route(&graph, PlaceId::Office(999), PlaceId::Office(o)),
            Err(PlanError::UnknownPlace(PlaceId::Office(999)))
        );
        assert_eq!(
            plan_route(&graph, PlaceId::Hall(1), PlaceId::Office(o)),
            Err(PlanError::UnknownPlace(PlaceId::Hall(1)))
        );
    }

    #[test]
    fn all_office_pairs_reachable_on_generated_maps() {
        for seed in 0..30u64 {
            let plan = generate_floorplan(seed, &GenConfig::default()).unwrap();
            let graph = extract_graph(&plan).unwrap();
            let offices: Vec<u32> = graph.offices().collect();
            for &a in &offices {
                for &b in &offices {
                    let route =
                        plan_route(&graph, PlaceId::Office(a), PlaceId::Office(b)).unwrap();
                    if a != b {
                        assert!(!route.is_empty());
                        assert_eq!(route.triplets.last().unwrap().to, PlaceId::Office(b));
                        assert_eq!(route.triplets[0].from, PlaceId::Office(a));
                    }
                }
            }
        }
    }

    #[test]
    fn plans_are_deterministic() {
        let plan = generate_floorplan(9, &GenConfig::default()).unwrap();
        let graph = extract_graph(&plan).unwrap();
        let offices: Vec<u32> = graph.offices().collect();
        let (a, b) = (offices[0], offices[offices.len() - 1]);
        let r1 = plan_route(&graph, PlaceId::Office(a), PlaceId::Office(b)).unwrap();
        let r2 = plan_route(&graph, PlaceId::Office(a), PlaceId::Office(b)).unwrap();
        assert_eq!(r1, r2);
    }
}
