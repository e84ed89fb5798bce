//! Random floor plan generation.
//!
//! The layout is a corridor backbone grown on a coarse junction lattice:
//! each corridor is a straight strip between two lattice nodes, halls are
//! placed at a random subset of the junction nodes (nodes where two or more
//! corridors meet), and offices attach left/right of corridor strips with a
//! single doorway each. Everything is carved out of a solid wall grid, so
//! connectivity holds by construction; the validator re-checks it anyway.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{CellRect, CellType, FloorPlan, Landmark, Room, RoomKind, DEFAULT_MAX_LANDMARKS};
use crate::grid::Grid2;
use crate::places::{PlaceId, Side};

/// Office interior edge length in cells.
const OFFICE_SIZE: usize = 4;
/// Distance between consecutive office slots along a corridor.
const OFFICE_PITCH: usize = 5;
/// Half edge length of a hall (halls are 2*HALL_HALF square).
const HALL_HALF: i64 = 3;
/// Free margin around the carved structure.
const MARGIN: i64 = 8;

/// Generation parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub n_corridors: u32,
    pub offices_per_corridor: u32,
    pub n_halls: u32,
    pub corridor_width_cells: u32,
    /// Landmark library budget (offices + halls + 2 per corridor must fit).
    pub max_landmarks: usize,
    /// Attempts before giving up on an over-constrained config.
    pub max_retries: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_corridors: 5,
            offices_per_corridor: 4,
            n_halls: 2,
            corridor_width_cells: 2,
            max_landmarks: DEFAULT_MAX_LANDMARKS,
            max_retries: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerationError {
    #[error("invalid generation config: {0}")]
    InvalidConfig(&'static str),
    #[error("floor plan generation failed after {attempts} attempts: {reason}")]
    Failed { attempts: u32, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    H,
    V,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: (i64, i64),
    b: (i64, i64),
    axis: Axis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeKind {
    DeadEnd,
    Junction,
    Hall(u32),
}

/// Generate a floor plan. Identical `(seed, config)` inputs produce
/// identical plans.
pub fn generate_floorplan(seed: u64, config: &GenConfig) -> Result<FloorPlan, GenerationError> {
    if config.n_corridors < 1 {
        return Err(GenerationError::InvalidConfig("n_corridors must be >= 1"));
    }
    if config.offices_per_corridor < 1 {
        return Err(GenerationError::InvalidConfig(
            "offices_per_corridor must be >= 1",
        ));
    }
    if config.corridor_width_cells < 2 {
        return Err(GenerationError::InvalidConfig(
            "corridor_width_cells must be >= 2",
        ));
    }
    let landmark_count = config.n_corridors as usize * config.offices_per_corridor as usize
        + config.n_halls as usize
        + 2 * config.n_corridors as usize;
    if landmark_count > config.max_landmarks {
        return Err(GenerationError::Failed {
            attempts: 0,
            reason: format!(
                "config implies {landmark_count} landmarks, budget is {}",
                config.max_landmarks
            ),
        });
    }

    let mut last_reason = String::new();
    for attempt in 0..config.max_retries.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        match try_generate(&mut rng, seed, config) {
            Ok(plan) => return Ok(plan),
            Err(reason) => last_reason = reason,
        }
    }
    Err(GenerationError::Failed {
        attempts: config.max_retries.max(1),
        reason: last_reason,
    })
}

fn try_generate(rng: &mut ChaCha8Rng, seed: u64, config: &GenConfig) -> Result<FloorPlan, String> {
    // --- grow the lattice skeleton -------------------------------------
    let mut nodes: Vec<(i64, i64)> = vec![(0, 0)];
    let mut degree: Vec<u32> = vec![0];
    let mut segments: Vec<Segment> = Vec::new();

    for _ in 0..config.n_corridors {
        let mut candidates = Vec::new();
        for (ni, &node) in nodes.iter().enumerate() {
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let nb = (node.0 + dx, node.1 + dy);
                if !nodes.contains(&nb) {
                    candidates.push((ni, nb));
                }
            }
        }
        if candidates.is_empty() {
            return Err("no free lattice direction to grow a corridor".into());
        }
        let &(ni, nb) = candidates.choose(rng).unwrap();
        let from = nodes[ni];
        degree[ni] += 1;
        nodes.push(nb);
        degree.push(1);
        let (a, b) = if (nb.0, nb.1) < (from.0, from.1) {
            (nb, from)
        } else {
            (from, nb)
        };
        let axis = if a.1 == b.1 { Axis::H } else { Axis::V };
        segments.push(Segment { a, b, axis });
    }

    // --- choose hall nodes among the junctions --------------------------
    let mut junction_idx: Vec<usize> = (0..nodes.len()).filter(|&i| degree[i] >= 2).collect();
    if (junction_idx.len() as u32) < config.n_halls {
        return Err(format!(
            "only {} junctions for {} halls",
            junction_idx.len(),
            config.n_halls
        ));
    }
    junction_idx.shuffle(rng);
    let mut kinds: Vec<NodeKind> = degree
        .iter()
        .map(|&d| {
            if d >= 2 {
                NodeKind::Junction
            } else {
                NodeKind::DeadEnd
            }
        })
        .collect();
    for (hall_id, &idx) in junction_idx.iter().take(config.n_halls as usize).enumerate() {
        kinds[idx] = NodeKind::Hall(hall_id as u32 + 1);
    }

    // --- rasterize -------------------------------------------------------
    let w = config.corridor_width_cells as i64;
    let half_lo = w / 2;
    let slots_per_side = (config.offices_per_corridor as usize).div_ceil(2);
    let spacing = 15 + (OFFICE_PITCH * slots_per_side) as i64;

    let min_x = nodes.iter().map(|n| n.0).min().unwrap();
    let min_y = nodes.iter().map(|n| n.1).min().unwrap();
    let max_x = nodes.iter().map(|n| n.0).max().unwrap();
    let max_y = nodes.iter().map(|n| n.1).max().unwrap();
    let width = (2 * MARGIN + (max_x - min_x) * spacing + 1) as usize;
    let height = (2 * MARGIN + (max_y - min_y) * spacing + 1) as usize;
    let center = |n: (i64, i64)| -> (i64, i64) {
        (
            MARGIN + (n.0 - min_x) * spacing,
            MARGIN + (n.1 - min_y) * spacing,
        )
    };

    let mut grid = Grid2::filled(width, height, CellType::Wall);
    let mut rooms: Vec<Room> = Vec::new();

    // Halls first.
    for (i, &node) in nodes.iter().enumerate() {
        if let NodeKind::Hall(hall_id) = kinds[i] {
            let (cx, cy) = center(node);
            let rect = CellRect::new(
                (cx - HALL_HALF) as usize,
                (cy - HALL_HALF) as usize,
                (cx + HALL_HALF) as usize,
                (cy + HALL_HALF) as usize,
            );
            for (x, y) in rect.cells() {
                grid.set(x, y, CellType::Hall(hall_id));
            }
            rooms.push(Room {
                id: hall_id,
                kind: RoomKind::Hall,
                rect,
                doors: Vec::new(),
            });
        }
    }

    // Corridor strips. Strips stop at hall boundaries and run through the
    // shared junction block otherwise; block cells keep the lower corridor id.
    let node_kind = |n: (i64, i64)| kinds[nodes.iter().position(|&m| m == n).unwrap()];
    let reach = |kind: NodeKind, toward_positive: bool| -> i64 {
        match kind {
            NodeKind::Hall(_) => HALL_HALF,
            // Cover the w-wide junction block centred like the strip rows.
            _ => {
                if toward_positive {
                    -half_lo
                } else {
                    -(w - half_lo)
                }
            }
        }
    };
    let mut corridor_rects: Vec<(CellRect, Axis, NodeKind, NodeKind)> = Vec::new();
    for (ci, seg) in segments.iter().enumerate() {
        let id = ci as u32 + 1;
        let (ac, bc) = (center(seg.a), center(seg.b));
        let (ka, kb) = (node_kind(seg.a), node_kind(seg.b));
        let rect = match seg.axis {
            Axis::H => {
                let x0 = ac.0 + reach(ka, true);
                let x1 = bc.0 - reach(kb, false);
                let y0 = ac.1 - half_lo;
                CellRect::new(x0 as usize, y0 as usize, x1 as usize, (y0 + w) as usize)
            }
            Axis::V => {
                let y0 = ac.1 + reach(ka, true);
                let y1 = bc.1 - reach(kb, false);
                let x0 = ac.0 - half_lo;
                CellRect::new(x0 as usize, y0 as usize, (x0 + w) as usize, y1 as usize)
            }
        };
        for (x, y) in rect.cells() {
            if matches!(grid.get(x, y), CellType::Wall) {
                grid.set(x, y, CellType::Corridor(id));
            }
        }
        corridor_rects.push((rect, seg.axis, ka, kb));
        rooms.push(Room {
            id,
            kind: RoomKind::Corridor,
            rect,
            doors: Vec::new(),
        });
    }

    // Offices along each corridor, random (slot, side) picks. Slot spans
    // keep clear of junction blocks so doors always open onto cells owned
    // by their own corridor.
    let mut office_id = 0u32;
    for (ci, &(rect, axis, ka, kb)) in corridor_rects.iter().enumerate() {
        let corridor_id = ci as u32 + 1;
        let end_margin = |kind: NodeKind| -> i64 {
            match kind {
                NodeKind::Hall(_) => 2,
                _ => w + 1,
            }
        };
        let (lo, hi) = match axis {
            Axis::H => (rect.x0 as i64 + end_margin(ka), rect.x1 as i64 - end_margin(kb)),
            Axis::V => (rect.y0 as i64 + end_margin(ka), rect.y1 as i64 - end_margin(kb)),
        };
        let mut slot_positions = Vec::new();
        let mut s = lo;
        while s + OFFICE_SIZE as i64 <= hi {
            slot_positions.push(s);
            s += OFFICE_PITCH as i64;
        }
        let mut pair_slots: Vec<(i64, bool)> = slot_positions
            .iter()
            .flat_map(|&p| [(p, false), (p, true)])
            .collect();
        pair_slots.shuffle(rng);

        let mut placed = 0;
        for (slot, far_side) in pair_slots {
            if placed == config.offices_per_corridor {
                break;
            }
            if try_place_office(&mut grid, rect, axis, slot, far_side, office_id + 1, corridor_id) {
                office_id += 1;
                placed += 1;
                let (interior, door) = office_geometry(rect, axis, slot, far_side);
                rooms.push(Room {
                    id: office_id,
                    kind: RoomKind::Office,
                    rect: interior,
                    doors: vec![door],
                });
            }
        }
        if placed < config.offices_per_corridor {
            return Err(format!(
                "corridor {corridor_id} fits only {placed} of {} offices",
                config.offices_per_corridor
            ));
        }
    }

    rooms.sort_by_key(|r| (r.kind, r.id));
    let mut plan = FloorPlan {
        cell_size: 1.0,
        grid,
        rooms,
        landmarks: Vec::new(),
        seed,
    };
    place_landmarks(&mut plan)?;
    Ok(plan)
}

/// Interior rect and doorway cell for an office at `slot` on the given side
/// of a corridor strip. `far_side` means greater perpendicular coordinate.
fn office_geometry(strip: CellRect, axis: Axis, slot: i64, far_side: bool) -> (CellRect, (usize, usize)) {
    let os = OFFICE_SIZE as i64;
    match axis {
        Axis::H => {
            let (wall_row, rows) = if far_side {
                (strip.y1 as i64, (strip.y1 as i64 + 1, strip.y1 as i64 + 1 + os))
            } else {
                (strip.y0 as i64 - 1, (strip.y0 as i64 - 1 - os, strip.y0 as i64 - 1))
            };
            (
                CellRect::new(slot as usize, rows.0 as usize, (slot + os) as usize, rows.1 as usize),
                ((slot + 1) as usize, wall_row as usize),
            )
        }
        Axis::V => {
            let (wall_col, cols) = if far_side {
                (strip.x1 as i64, (strip.x1 as i64 + 1, strip.x1 as i64 + 1 + os))
            } else {
                (strip.x0 as i64 - 1, (strip.x0 as i64 - 1 - os, strip.x0 as i64 - 1))
            };
            (
                CellRect::new(cols.0 as usize, slot as usize, cols.1 as usize, (slot + os) as usize),
                (wall_col as usize, (slot + 1) as usize),
            )
        }
    }
}

fn try_place_office(
    grid: &mut Grid2<CellType>,
    strip: CellRect,
    axis: Axis,
    slot: i64,
    far_side: bool,
    id: u32,
    corridor_id: u32,
) -> bool {
    let (interior, door) = office_geometry(strip, axis, slot, far_side);
    // The interior plus a one-cell ring (which contains the door) must be
    // untouched wall so rooms never merge.
    let ring = (
        interior.x0 as i64 - 1,
        interior.y0 as i64 - 1,
        interior.x1 as i64 + 1,
        interior.y1 as i64 + 1,
    );
    for y in ring.1..ring.3 {
        for x in ring.0..ring.2 {
            if !grid.in_bounds(x, y) || !matches!(grid.get(x as usize, y as usize), CellType::Wall)
            {
                return false;
            }
        }
    }
    // The door must open onto a cell the owning corridor carved.
    let (ddx, ddy) = door_to_corridor(axis, far_side);
    let (nx, ny) = (door.0 as i64 + ddx, door.1 as i64 + ddy);
    if !grid.in_bounds(nx, ny)
        || !matches!(grid.get(nx as usize, ny as usize), CellType::Corridor(c) if *c == corridor_id)
    {
        return false;
    }
    for (x, y) in interior.cells() {
        grid.set(x, y, CellType::Office(id));
    }
    grid.set(door.0, door.1, CellType::Doorway(id));
    true
}

/// Unit step from a door cell toward its corridor.
fn door_to_corridor(axis: Axis, far_side: bool) -> (i64, i64) {
    match (axis, far_side) {
        (Axis::H, true) => (0, -1),
        (Axis::H, false) => (0, 1),
        (Axis::V, true) => (-1, 0),
        (Axis::V, false) => (1, 0),
    }
}

/// Place one landmark per office entrance, hall, and corridor endpoint.
fn place_landmarks(plan: &mut FloorPlan) -> Result<(), String> {
    let cs = plan.cell_size;
    let mut landmarks = Vec::new();
    let mut next_id = 1u32;
    let mut push = |lms: &mut Vec<Landmark>, pos: (f64, f64), normal: (f64, f64), owner: PlaceId| {
        lms.push(Landmark {
            id: next_id,
            pos,
            normal,
            owner,
        });
        next_id += 1;
    };

    let offices: Vec<Room> = plan.rooms_of_kind(RoomKind::Office).cloned().collect();
    for office in &offices {
        let (dx, dy) = office.doors[0];
        let (ox, oy) = corridor_side_of_door(plan, (dx, dy))
            .ok_or_else(|| format!("door of office {} has no corridor neighbor", office.id))?;
        // Wall cell next to the door, along the wall.
        let (px, py) = (oy.abs(), ox.abs()); // perpendicular direction
        let candidates = [
            (dx as i64 + px, dy as i64 + py),
            (dx as i64 - px, dy as i64 - py),
        ];
        let wall = candidates
            .into_iter()
            .find(|&(x, y)| {
                plan.grid.in_bounds(x, y)
                    && matches!(plan.grid.get(x as usize, y as usize), CellType::Wall)
            })
            .ok_or_else(|| format!("no wall cell flanks the door of office {}", office.id))?;
        let pos = (
            (wall.0 as f64 + 0.5 + 0.5 * ox as f64) * cs,
            (wall.1 as f64 + 0.5 + 0.5 * oy as f64) * cs,
        );
        push(
            &mut landmarks,
            pos,
            (ox as f64, oy as f64),
            PlaceId::Entrance(office.id),
        );
    }

    let halls: Vec<Room> = plan.rooms_of_kind(RoomKind::Hall).cloned().collect();
    for hall in &halls {
        // First wall cell on the boundary row north of the hall.
        let y = hall.rect.y1;
        let x = (hall.rect.x0..hall.rect.x1)
            .find(|&x| matches!(plan.grid.get(x, y), CellType::Wall))
            .ok_or_else(|| format!("hall {} has no north wall cell", hall.id))?;
        push(
            &mut landmarks,
            ((x as f64 + 0.5) * cs, y as f64 * cs),
            (0.0, -1.0),
            PlaceId::Hall(hall.id),
        );
    }

    let corridors: Vec<Room> = plan.rooms_of_kind(RoomKind::Corridor).cloned().collect();
    for corridor in &corridors {
        for side in [Side::L, Side::R] {
            let lm = corridor_end_landmark(plan, &corridor.rect, side)
                .ok_or_else(|| format!("no wall for end landmark of corridor {}", corridor.id))?;
            push(
                &mut landmarks,
                lm.0,
                lm.1,
                PlaceId::Corridor(corridor.id, side),
            );
        }
    }

    plan.landmarks = landmarks;
    Ok(())
}

fn corridor_side_of_door(plan: &FloorPlan, door: (usize, usize)) -> Option<(i64, i64)> {
    crate::grid::CARDINALS.into_iter().find(|&(ox, oy)| {
        let (nx, ny) = (door.0 as i64 + ox, door.1 as i64 + oy);
        plan.grid.in_bounds(nx, ny)
            && matches!(plan.grid.get(nx as usize, ny as usize), CellType::Corridor(_))
    })
}

/// Landmark on a side wall near the `side` end of a corridor strip, facing
/// into the strip. Scans inward from the end until a wall cell is free.
fn corridor_end_landmark(
    plan: &FloorPlan,
    strip: &CellRect,
    side: Side,
) -> Option<((f64, f64), (f64, f64))> {
    let cs = plan.cell_size;
    let horizontal = strip.width() >= strip.height();
    let is_wall = |x: i64, y: i64| {
        plan.grid.in_bounds(x, y) && matches!(plan.grid.get(x as usize, y as usize), CellType::Wall)
    };
    let span = if horizontal {
        strip.x0 as i64..strip.x1 as i64
    } else {
        strip.y0 as i64..strip.y1 as i64
    };
    let axis_positions: Vec<i64> = match side {
        Side::R => span.rev().take(6).collect(),
        Side::L => span.take(6).collect(),
    };
    for p in axis_positions {
        if horizontal {
            // Above then below the strip.
            let above = (p, strip.y1 as i64);
            let below = (p, strip.y0 as i64 - 1);
            if is_wall(above.0, above.1) {
                return Some((
                    ((p as f64 + 0.5) * cs, strip.y1 as f64 * cs),
                    (0.0, -1.0),
                ));
            }
            if is_wall(below.0, below.1) {
                return Some((
                    ((p as f64 + 0.5) * cs, strip.y0 as f64 * cs),
                    (0.0, 1.0),
                ));
            }
        } else {
            let right = (strip.x1 as i64, p);
            let left = (strip.x0 as i64 - 1, p);
            if is_wall(right.0, right.1) {
                return Some((
                    (strip.x1 as f64 * cs, (p as f64 + 0.5) * cs),
                    (-1.0, 0.0),
                ));
            }
            if is_wall(left.0, left.1) {
                return Some((
                    (strip.x0 as f64 * cs, (p as f64 + 0.5) * cs),
                    (1.0, 0.0),
                ));
            }
        }
    }
    None
}
