//! Graph extraction from a known floor plan.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{
    BehaviorCode, CorridorGeom, EndConnection, GraphGeometry, HallGeom, JunctionGeom, OfficeGeom,
    SemanticGraph, Triplet,
};
use crate::floorplan::{CellType, FloorPlan, RoomKind};
use crate::grid::CARDINALS;
use crate::places::{PlaceId, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractionError {
    #[error("office {0} has no doorway cell")]
    OfficeWithoutDoor(u32),
    #[error("door of office {0} does not open onto a corridor")]
    OfficeNotOnCorridor(u32),
    #[error("corridor {0} rect is degenerate")]
    DegenerateCorridor(u32),
}

/// Relative turn between two axis-aligned unit headings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Turn {
    Straight,
    Left,
    Right,
}

pub(crate) fn rot_ccw(v: (i64, i64)) -> (i64, i64) {
    (-v.1, v.0)
}

pub(crate) fn rot_cw(v: (i64, i64)) -> (i64, i64) {
    (v.1, -v.0)
}

/// Classify `h_out` relative to `h_in`; `None` for a U-turn.
pub(crate) fn turn_between(h_in: (i64, i64), h_out: (i64, i64)) -> Option<Turn> {
    if h_out == h_in {
        Some(Turn::Straight)
    } else if h_out == rot_ccw(h_in) {
        Some(Turn::Left)
    } else if h_out == rot_cw(h_in) {
        Some(Turn::Right)
    } else {
        None
    }
}

/// Derive the triplet graph (with geometry) from a plan's known layout.
pub fn extract_graph(plan: &FloorPlan) -> Result<SemanticGraph, ExtractionError> {
    let geometry = extract_geometry(plan)?;
    let mut triplets: Vec<Triplet> = Vec::new();
    let mut push = |from, behavior, to| {
        // Geometry-derived edges are type-correct by construction.
        triplets.push(Triplet::new(from, behavior, to).expect("extracted edge type-checks"));
    };

    // Office edges: oo{l,r} onto the corridor directions, ooc across to an
    // opposite entrance, io{l,r} back in from the entrance (one io code per
    // approach direction; both are emitted and the planner picks the one
    // consistent with its travel direction).
    for (&office, og) in &geometry.offices {
        let corridor = &geometry.corridors[&og.corridor];
        let exit_heading = og.door_normal;
        for side in [Side::L, Side::R] {
            let axis_heading = corridor.heading(side);
            let code = match turn_between(exit_heading, axis_heading) {
                Some(Turn::Left) => BehaviorCode::Ool,
                Some(Turn::Right) => BehaviorCode::Oor,
                _ => continue,
            };
            push(
                PlaceId::Office(office),
                code,
                PlaceId::Corridor(og.corridor, side),
            );

            // Entering this office while traveling `side`: the door is on
            // the side opposite the exit heading.
            let enter_heading = (-exit_heading.0, -exit_heading.1);
            let io = match turn_between(axis_heading, enter_heading) {
                Some(Turn::Left) => BehaviorCode::Iol,
                Some(Turn::Right) => BehaviorCode::Ior,
                _ => continue,
            };
            push(PlaceId::Entrance(office), io, PlaceId::Office(office));
        }
        if let Some(opposite) = og.opposite {
            push(
                PlaceId::Office(office),
                BehaviorCode::Ooc,
                PlaceId::Entrance(opposite),
            );
            // Convention for the perpendicular approach after ooc: enter on
            // the right.
            push(
                PlaceId::Entrance(office),
                BehaviorCode::Ior,
                PlaceId::Office(office),
            );
        }
    }

    // Corridor-follow edges: from each direction node to every entrance on
    // the corridor (the planner prunes the ones behind the entry point) and
    // to the hall at that direction's end.
    for (&cid, cg) in &geometry.corridors {
        for side in [Side::L, Side::R] {
            let from = PlaceId::Corridor(cid, side);
            for (&office, og) in &geometry.offices {
                if og.corridor == cid {
                    push(from, BehaviorCode::Cf, PlaceId::Entrance(office));
                }
            }
            match cg.end(side) {
                EndConnection::Hall(h) => push(from, BehaviorCode::Cf, PlaceId::Hall(*h)),
                EndConnection::Junction(j) => {
                    // Change-corridor edges straight from the direction node.
                    let junction = &geometry.junctions[*j];
                    let h_in = cg.heading(side);
                    for &(out_c, out_end) in &junction.members {
                        if out_c == cid {
                            continue;
                        }
                        let out_dir = out_end.opposite();
                        let h_out = geometry.corridors[&out_c].heading(out_dir);
                        let code = match turn_between(h_in, h_out) {
                            Some(Turn::Straight) => BehaviorCode::Ccc,
                            Some(Turn::Left) => BehaviorCode::Ccl,
                            Some(Turn::Right) => BehaviorCode::Ccr,
                            None => continue,
                        };
                        push(from, code, PlaceId::Corridor(out_c, out_dir));
                    }
                }
                EndConnection::DeadEnd => {}
            }
        }
    }

    // Cross-hall edges: one per (incoming corridor, outgoing corridor) pair
    // whose headings are not a U-turn.
    for (&hid, hg) in &geometry.halls {
        for &(in_c, in_end) in &hg.connections {
            let h_in = geometry.corridors[&in_c].heading(in_end);
            for &(out_c, out_end) in &hg.connections {
                if out_c == in_c {
                    continue;
                }
                let out_dir = out_end.opposite();
                let h_out = geometry.corridors[&out_c].heading(out_dir);
                let code = match turn_between(h_in, h_out) {
                    Some(Turn::Straight) => BehaviorCode::Chs,
                    Some(Turn::Left) => BehaviorCode::Chl,
                    Some(Turn::Right) => BehaviorCode::Chr,
                    None => continue,
                };
                push(PlaceId::Hall(hid), code, PlaceId::Corridor(out_c, out_dir));
            }
        }
    }

    // Every taxonomy place is a node even when no edge touches it.
    let mut nodes = Vec::new();
    for &office in geometry.offices.keys() {
        nodes.push(PlaceId::Office(office));
        nodes.push(PlaceId::Entrance(office));
    }
    for &cid in geometry.corridors.keys() {
        nodes.push(PlaceId::Corridor(cid, Side::L));
        nodes.push(PlaceId::Corridor(cid, Side::R));
    }
    for &hid in geometry.halls.keys() {
        nodes.push(PlaceId::Hall(hid));
    }

    Ok(SemanticGraph::from_parts(nodes, triplets, Some(geometry)))
}

fn extract_geometry(plan: &FloorPlan) -> Result<GraphGeometry, ExtractionError> {
    let cs = plan.cell_size;
    let mut corridors: BTreeMap<u32, CorridorGeom> = BTreeMap::new();
    for room in plan.rooms_of_kind(RoomKind::Corridor) {
        let rect = room.rect;
        if rect.width() < 1 || rect.height() < 1 {
            return Err(ExtractionError::DegenerateCorridor(room.id));
        }
        let horizontal = rect.width() >= rect.height();
        let end_pos = if horizontal {
            [rect.x0 as f64 * cs, rect.x1 as f64 * cs]
        } else {
            [rect.y0 as f64 * cs, rect.y1 as f64 * cs]
        };
        corridors.insert(
            room.id,
            CorridorGeom {
                horizontal,
                rect,
                ends: [EndConnection::DeadEnd, EndConnection::DeadEnd],
                end_pos,
            },
        );
    }

    // Hall connections: a corridor end touching the hall rect.
    let mut halls: BTreeMap<u32, HallGeom> = BTreeMap::new();
    for room in plan.rooms_of_kind(RoomKind::Hall) {
        halls.insert(
            room.id,
            HallGeom {
                rect: room.rect,
                connections: Vec::new(),
            },
        );
    }
    // Junction grouping: the w-wide block at a non-hall corridor end; two
    // ends meeting at one lattice node share the block exactly.
    let mut blocks: BTreeMap<(usize, usize, usize, usize), Vec<(u32, Side)>> = BTreeMap::new();

    for (&cid, cg) in corridors.iter() {
        let rect = cg.rect;
        let w = if cg.horizontal {
            rect.height()
        } else {
            rect.width()
        };
        for side in [Side::L, Side::R] {
            // Probe the cells just beyond this end for a hall.
            let probe: Vec<(i64, i64)> = if cg.horizontal {
                let x = match side {
                    Side::L => rect.x0 as i64 - 1,
                    Side::R => rect.x1 as i64,
                };
                (rect.y0..rect.y1).map(|y| (x, y as i64)).collect()
            } else {
                let y = match side {
                    Side::L => rect.y0 as i64 - 1,
                    Side::R => rect.y1 as i64,
                };
                (rect.x0..rect.x1).map(|x| (x as i64, y)).collect()
            };
            let hall = probe.iter().find_map(|&(x, y)| {
                if plan.grid.in_bounds(x, y) {
                    match plan.grid.get(x as usize, y as usize) {
                        CellType::Hall(h) => Some(*h),
                        _ => None,
                    }
                } else {
                    None
                }
            });
            if let Some(h) = hall {
                if let Some(hg) = halls.get_mut(&h) {
                    hg.connections.push((cid, side));
                }
                continue;
            }
            // Otherwise file the end block for junction grouping.
            let block = if cg.horizontal {
                match side {
                    Side::L => (rect.x0, rect.y0, rect.x0 + w, rect.y1),
                    Side::R => (rect.x1 - w, rect.y0, rect.x1, rect.y1),
                }
            } else {
                match side {
                    Side::L => (rect.x0, rect.y0, rect.x1, rect.y0 + w),
                    Side::R => (rect.x0, rect.y1 - w, rect.x1, rect.y1),
                }
            };
            blocks.entry(block).or_default().push((cid, side));
        }
    }

    let mut junctions: Vec<JunctionGeom> = Vec::new();
    for (block, members) in &blocks {
        if members.len() < 2 {
            continue; // dead end
        }
        junctions.push(JunctionGeom {
            members: members.clone(),
            center: (
                (block.0 + block.2) as f64 / 2.0 * cs,
                (block.1 + block.3) as f64 / 2.0 * cs,
            ),
        });
    }
    // Wire end connections.
    for (ji, j) in junctions.iter().enumerate() {
        for &(cid, side) in &j.members {
            corridors.get_mut(&cid).unwrap().ends[side as usize] = EndConnection::Junction(ji);
        }
    }
    for (hid, hg) in &halls {
        for &(cid, side) in &hg.connections {
            corridors.get_mut(&cid).unwrap().ends[side as usize] = EndConnection::Hall(*hid);
        }
    }

    // Offices: door cell, owning corridor, axis position, opposite partner.
    let mut offices: BTreeMap<u32, OfficeGeom> = BTreeMap::new();
    for room in plan.rooms_of_kind(RoomKind::Office) {
        let &door = room
            .doors
            .first()
            .ok_or(ExtractionError::OfficeWithoutDoor(room.id))?;
        let (normal, corridor) = CARDINALS
            .into_iter()
            .find_map(|(ox, oy)| {
                let (nx, ny) = (door.0 as i64 + ox, door.1 as i64 + oy);
                if plan.grid.in_bounds(nx, ny) {
                    match plan.grid.get(nx as usize, ny as usize) {
                        CellType::Corridor(c) => Some(((ox, oy), *c)),
                        _ => None,
                    }
                } else {
                    None
                }
            })
            .ok_or(ExtractionError::OfficeNotOnCorridor(room.id))?;
        // The grid block at a junction may carry another corridor's id; the
        // owning corridor is the one whose rect contains the neighbor cell.
        let neighbor = (
            (door.0 as i64 + normal.0) as usize,
            (door.1 as i64 + normal.1) as usize,
        );
        let corridor = corridors
            .iter()
            .find(|(_, cg)| cg.rect.contains(neighbor.0, neighbor.1))
            .map(|(id, _)| *id)
            .unwrap_or(corridor);
        let cg = &corridors[&corridor];
        let axis_pos = if cg.horizontal {
            (door.0 as f64 + 0.5) * cs
        } else {
            (door.1 as f64 + 0.5) * cs
        };
        offices.insert(
            room.id,
            OfficeGeom {
                corridor,
                axis_pos,
                door,
                door_normal: normal,
                rect: room.rect,
                opposite: None,
            },
        );
    }
    // Opposite pairs: same corridor, same axis cell, facing normals.
    let ids: Vec<u32> = offices.keys().copied().collect();
    for &a in &ids {
        for &b in &ids {
            if a == b {
                continue;
            }
            let (oa, ob) = (&offices[&a], &offices[&b]);
            if oa.corridor == ob.corridor
                && (oa.axis_pos - ob.axis_pos).abs() < 1e-9
                && oa.door_normal == (-ob.door_normal.0, -ob.door_normal.1)
            {
                offices.get_mut(&a).unwrap().opposite = Some(b);
            }
        }
    }

    Ok(GraphGeometry {
        cell_size: cs,
        corridors,
        offices,
        halls,
        junctions,
    })
}
