//! Procedurally generated office-building floor plans.
//!
//! A [`FloorPlan`] is a grid of typed cells (walls, offices, corridors,
//! halls, doorways) plus room records and uniquely placed wall landmarks.
//! Plans come from [`generate_floorplan`] or from the ASCII map format in
//! [`io`]. [`inflate_cspace`] rasterizes a plan into a configuration-space
//! occupancy grid for path planning.

mod cspace;
mod gen;
pub mod io;

pub use cspace::{inflate_cspace, OccupancyGrid};
pub use gen::{generate_floorplan, GenConfig, GenerationError};

use std::collections::BTreeSet;

use crate::grid::{Grid2, CARDINALS};
use crate::places::PlaceId;

/// What occupies a single grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellType {
    Wall,
    Office(u32),
    Corridor(u32),
    Hall(u32),
    /// A navigable opening in an office wall; carries the office id.
    Doorway(u32),
}

impl CellType {
    pub fn is_free(&self) -> bool {
        !matches!(self, CellType::Wall)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RoomKind {
    Office,
    Corridor,
    Hall,
}

/// Half-open cell rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl CellRect {
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        assert!(x0 < x1 && y0 < y1, "degenerate rect");
        CellRect { x0, y0, x1, y1 }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }

    /// Center in cell units.
    pub fn center(&self) -> (f64, f64) {
        (
            (self.x0 + self.x1) as f64 / 2.0,
            (self.y0 + self.y1) as f64 / 2.0,
        )
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.y0..self.y1).flat_map(move |y| (self.x0..self.x1).map(move |x| (x, y)))
    }
}

/// One room record. Ids are per-kind (office 1..=n, corridor 1..=m, ...).
///
/// Corridor rects of two corridors meeting at a junction overlap in the
/// junction block; the grid assigns those cells to the lower corridor id.
#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    pub id: u32,
    pub kind: RoomKind,
    pub rect: CellRect,
    /// Doorway cells (offices only; empty for corridors and halls).
    pub doors: Vec<(usize, usize)>,
}

/// A visual landmark hung on a wall face.
#[derive(Debug, Clone, PartialEq)]
pub struct Landmark {
    pub id: u32,
    /// World position of the landmark on the wall surface, in meters.
    pub pos: (f64, f64),
    /// Unit normal of the wall face, pointing into navigable space.
    pub normal: (f64, f64),
    /// The place this landmark identifies when detected.
    pub owner: PlaceId,
}

/// A generated (or parsed) office-building floor plan.
#[derive(Debug, Clone, PartialEq)]
pub struct FloorPlan {
    pub cell_size: f64,
    pub grid: Grid2<CellType>,
    pub rooms: Vec<Room>,
    pub landmarks: Vec<Landmark>,
    pub seed: u64,
}

impl FloorPlan {
    pub fn width(&self) -> usize {
        self.grid.width()
    }

    pub fn height(&self) -> usize {
        self.grid.height()
    }

    /// World extent in meters.
    pub fn world_size(&self) -> (f64, f64) {
        (
            self.grid.width() as f64 * self.cell_size,
            self.grid.height() as f64 * self.cell_size,
        )
    }

    /// Cell containing the world point, or None if out of bounds.
    pub fn cell_at(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if x < 0.0 || y < 0.0 {
            return None;
        }
        let cx = (x / self.cell_size) as usize;
        let cy = (y / self.cell_size) as usize;
        if cx < self.width() && cy < self.height() {
            Some((cx, cy))
        } else {
            None
        }
    }

    /// Cell type at a world point; out-of-bounds reads as wall.
    pub fn cell_type_at(&self, x: f64, y: f64) -> CellType {
        match self.cell_at(x, y) {
            Some((cx, cy)) => *self.grid.get(cx, cy),
            None => CellType::Wall,
        }
    }

    pub fn rooms_of_kind(&self, kind: RoomKind) -> impl Iterator<Item = &Room> {
        self.rooms.iter().filter(move |r| r.kind == kind)
    }

    pub fn room(&self, kind: RoomKind, id: u32) -> Option<&Room> {
        self.rooms.iter().find(|r| r.kind == kind && r.id == id)
    }

    pub fn landmark(&self, id: u32) -> Option<&Landmark> {
        self.landmarks.iter().find(|l| l.id == id)
    }

    /// Landmark whose owner is the given place, if any.
    pub fn landmark_for(&self, owner: PlaceId) -> Option<&Landmark> {
        self.landmarks.iter().find(|l| l.owner == owner)
    }
}

/// A named invariant violation found by [`validate_floorplan`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Office has no doorway cell adjacent to a corridor cell.
    NoDoor(u32),
    /// Free cell unreachable from the first free cell.
    Disconnected { cell: (usize, usize) },
    /// Landmark id appears more than once.
    DuplicateLandmark(u32),
    /// Two landmarks claim the same owning place.
    DuplicateOwner(PlaceId),
    /// More landmarks than the configured library size.
    TooManyLandmarks { count: usize, max: usize },
    /// A place that must own a landmark does not.
    MissingLandmark(PlaceId),
    /// A landmark owner that no room backs.
    StrayLandmark(u32),
    /// Grid cell disagrees with the room records covering it.
    RoomCellMismatch { x: usize, y: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NoDoor(id) => write!(f, "office O{id} has no doorway onto a corridor"),
            Violation::Disconnected { cell } => {
                write!(f, "free cell ({}, {}) unreachable", cell.0, cell.1)
            }
            Violation::DuplicateLandmark(id) => write!(f, "landmark id {id} duplicated"),
            Violation::DuplicateOwner(p) => write!(f, "place {p} owns more than one landmark"),
            Violation::TooManyLandmarks { count, max } => {
                write!(f, "{count} landmarks exceed library size {max}")
            }
            Violation::MissingLandmark(p) => write!(f, "place {p} owns no landmark"),
            Violation::StrayLandmark(id) => write!(f, "landmark {id} owned by unknown place"),
            Violation::RoomCellMismatch { x, y } => {
                write!(f, "cell ({x}, {y}) disagrees with room records")
            }
        }
    }
}

/// Default landmark library size.
pub const DEFAULT_MAX_LANDMARKS: usize = 80;

/// The set of places that must each own exactly one landmark: every office
/// entrance, every hall, and both travel directions of every corridor.
pub fn expected_landmark_owners(plan: &FloorPlan) -> BTreeSet<PlaceId> {
    let mut owners = BTreeSet::new();
    for room in &plan.rooms {
        match room.kind {
            RoomKind::Office => {
                owners.insert(PlaceId::Entrance(room.id));
            }
            RoomKind::Hall => {
                owners.insert(PlaceId::Hall(room.id));
            }
            RoomKind::Corridor => {
                owners.insert(PlaceId::Corridor(room.id, crate::places::Side::L));
                owners.insert(PlaceId::Corridor(room.id, crate::places::Side::R));
            }
        }
    }
    owners
}

/// Check every `FloorPlan` invariant, returning one violation per breach.
pub fn validate_floorplan(plan: &FloorPlan) -> Vec<Violation> {
    validate_floorplan_with(plan, DEFAULT_MAX_LANDMARKS)
}

/// [`validate_floorplan`] with an explicit landmark budget.
pub fn validate_floorplan_with(plan: &FloorPlan, max_landmarks: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    let grid = &plan.grid;

    // Every office needs a doorway adjacent to a corridor cell.
    for room in plan.rooms_of_kind(RoomKind::Office) {
        let has_door = room.doors.iter().any(|&(dx, dy)| {
            matches!(grid.get(dx, dy), CellType::Doorway(id) if *id == room.id)
                && CARDINALS.iter().any(|&(ox, oy)| {
                    let (nx, ny) = (dx as i64 + ox, dy as i64 + oy);
                    grid.in_bounds(nx, ny)
                        && matches!(grid.get(nx as usize, ny as usize), CellType::Corridor(_))
                })
        });
        if !has_door {
            out.push(Violation::NoDoor(room.id));
        }
    }

    // Connectivity: flood fill from the first free cell.
    let mut seen = Grid2::filled(grid.width(), grid.height(), false);
    if let Some((sx, sy, _)) = grid.iter_cells().find(|(_, _, c)| c.is_free()) {
        let mut queue = std::collections::VecDeque::new();
        queue.push_back((sx, sy));
        seen.set(sx, sy, true);
        while let Some((x, y)) = queue.pop_front() {
            for (ox, oy) in CARDINALS {
                let (nx, ny) = (x as i64 + ox, y as i64 + oy);
                if grid.in_bounds(nx, ny) {
                    let (nx, ny) = (nx as usize, ny as usize);
                    if grid.get(nx, ny).is_free() && !*seen.get(nx, ny) {
                        seen.set(nx, ny, true);
                        queue.push_back((nx, ny));
                    }
                }
            }
        }
        for (x, y, c) in grid.iter_cells() {
            if c.is_free() && !*seen.get(x, y) {
                out.push(Violation::Disconnected { cell: (x, y) });
                break; // one representative cell is enough
            }
        }
    }

    // Landmark uniqueness, budget, and coverage.
    let mut ids = BTreeSet::new();
    let mut owners = BTreeSet::new();
    for lm in &plan.landmarks {
        if !ids.insert(lm.id) {
            out.push(Violation::DuplicateLandmark(lm.id));
        }
        if !owners.insert(lm.owner) {
            out.push(Violation::DuplicateOwner(lm.owner));
        }
    }
    if plan.landmarks.len() > max_landmarks {
        out.push(Violation::TooManyLandmarks {
            count: plan.landmarks.len(),
            max: max_landmarks,
        });
    }
    let expected = expected_landmark_owners(plan);
    for missing in expected.difference(&owners) {
        out.push(Violation::MissingLandmark(*missing));
    }
    for lm in &plan.landmarks {
        if !expected.contains(&lm.owner) {
            out.push(Violation::StrayLandmark(lm.id));
        }
    }

    // Rooms vs grid: office and hall interiors must carry their own id;
    // corridor rect cells may carry any corridor id (junction overlap) or a
    // doorway (office doors sit in corridor-adjacent walls, not in corridor
    // rects, so plain corridor/hall checks suffice).
    for room in &plan.rooms {
        for (x, y) in room.rect.cells() {
            if !grid.in_bounds(x as i64, y as i64) {
                out.push(Violation::RoomCellMismatch { x, y });
                break;
            }
            let cell = *grid.get(x, y);
            let ok = match room.kind {
                RoomKind::Office => cell == CellType::Office(room.id),
                RoomKind::Hall => cell == CellType::Hall(room.id),
                RoomKind::Corridor => matches!(cell, CellType::Corridor(_)),
            };
            if !ok {
                out.push(Violation::RoomCellMismatch { x, y });
                break;
            }
        }
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_plan_is_valid() {
        let plan = generate_floorplan(1, &GenConfig::default()).unwrap();
        assert_eq!(validate_floorplan(&plan), vec![]);
    }

    #[test]
    fn minimal_config_two_offices_one_corridor() {
        // 1 corridor, 2 offices, 0 halls: both offices need doors onto the corridor.
        let cfg = GenConfig {
            n_corridors: 1,
            offices_per_corridor: 2,
            n_halls: 0,
            ..GenConfig::default()
        };
        let plan = generate_floorplan(1, &cfg).unwrap();
        assert_eq!(validate_floorplan(&plan), vec![]);
        assert_eq!(plan.rooms_of_kind(RoomKind::Office).count(), 2);
        assert_eq!(plan.rooms_of_kind(RoomKind::Corridor).count(), 1);
        assert_eq!(plan.rooms_of_kind(RoomKind::Hall).count(), 0);
        for office in plan.rooms_of_kind(RoomKind::Office) {
            assert!(!office.doors.is_empty());
        }
    }

    #[test]
    fn walling_a_door_is_detected() {
        let mut plan = generate_floorplan(3, &GenConfig::default()).unwrap();
        let (dx, dy) = plan.rooms_of_kind(RoomKind::Office).next().unwrap().doors[0];
        let office_id = plan.rooms_of_kind(RoomKind::Office).next().unwrap().id;
        plan.grid.set(dx, dy, CellType::Wall);
        let violations = validate_floorplan(&plan);
        assert!(
            violations.contains(&Violation::NoDoor(office_id)),
            "got {violations:?}"
        );
        // Walling the only door also cuts the office off the free component.
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::Disconnected { .. })));
    }

    #[test]
    fn duplicated_landmark_id_is_detected() {
        let mut plan = generate_floorplan(5, &GenConfig::default()).unwrap();
        let dup = plan.landmarks[0].clone();
        plan.landmarks.push(dup);
        let violations = validate_floorplan(&plan);
        assert!(violations.contains(&Violation::DuplicateLandmark(plan.landmarks[0].id)));
    }

    #[test]
    fn landmark_budget_is_enforced() {
        let plan = generate_floorplan(2, &GenConfig::default()).unwrap();
        let n = plan.landmarks.len();
        let violations = validate_floorplan_with(&plan, n - 1);
        assert!(violations.contains(&Violation::TooManyLandmarks {
            count: n,
            max: n - 1
        }));
    }
}
