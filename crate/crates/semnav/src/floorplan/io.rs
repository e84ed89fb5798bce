//! ASCII map format.
//!
//! A map is two text documents: the grid (one char per cell, row `y` on line
//! `y`: `#` wall, `.` corridor, `O` office, `H` hall, `D` doorway) and a
//! metadata sidecar of `key=value` lines carrying the seed, cell size, room
//! rectangles, doorway cells, and landmarks. Room identity cannot be read
//! off the grid chars alone, so the parser rebuilds the typed grid from the
//! sidecar records and then insists it matches the chars exactly; the pair
//! round-trips losslessly.
//!
//! Sidecar lines (`#` starts a comment):
//!
//! ```text
//! seed=<u64>
//! cell_size=<f64>
//! room=<id>,<office|corridor|hall>,<x0>,<y0>,<x1>,<y1>
//! door=<office_id>,<x>,<y>
//! landmark=<id>,<x>,<y>,<nx>,<ny>,<owner place>
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::{CellRect, CellType, FloorPlan, Landmark, Room, RoomKind};
use crate::grid::Grid2;
use crate::places::PlaceId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapParseError {
    #[error("grid line {0}: unknown cell char {1:?}")]
    BadCellChar(usize, char),
    #[error("grid is empty or has uneven line widths")]
    BadGridShape,
    #[error("sidecar line {0}: {1}")]
    BadSidecarLine(usize, String),
    #[error("missing sidecar key {0}")]
    MissingKey(&'static str),
    #[error("grid cell ({0}, {1}) disagrees with sidecar room records")]
    GridMetaMismatch(usize, usize),
    #[error("room record out of grid bounds")]
    RoomOutOfBounds,
    #[error("door record for office {0} at ({1}, {2}) not inside a wall-adjacent position")]
    BadDoor(u32, usize, usize),
}

fn cell_char(cell: CellType) -> char {
    match cell {
        CellType::Wall => '#',
        CellType::Corridor(_) => '.',
        CellType::Office(_) => 'O',
        CellType::Hall(_) => 'H',
        CellType::Doorway(_) => 'D',
    }
}

/// Serialize the grid half of the map format.
pub fn grid_to_string(plan: &FloorPlan) -> String {
    let mut out = String::with_capacity((plan.width() + 1) * plan.height());
    for y in 0..plan.height() {
        for x in 0..plan.width() {
            out.push(cell_char(*plan.grid.get(x, y)));
        }
        out.push('\n');
    }
    out
}

/// Serialize the metadata sidecar in canonical order.
pub fn sidecar_to_string(plan: &FloorPlan) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "seed={}", plan.seed);
    let _ = writeln!(out, "cell_size={}", plan.cell_size);
    let mut rooms = plan.rooms.clone();
    rooms.sort_by_key(|r| (r.kind, r.id));
    for room in &rooms {
        let kind = match room.kind {
            RoomKind::Office => "office",
            RoomKind::Corridor => "corridor",
            RoomKind::Hall => "hall",
        };
        let r = room.rect;
        let _ = writeln!(out, "room={},{},{},{},{},{}", room.id, kind, r.x0, r.y0, r.x1, r.y1);
    }
    let mut doors: Vec<(u32, usize, usize)> = rooms
        .iter()
        .filter(|r| r.kind == RoomKind::Office)
        .flat_map(|r| r.doors.iter().map(move |&(x, y)| (r.id, x, y)))
        .collect();
    doors.sort();
    for (id, x, y) in doors {
        let _ = writeln!(out, "door={id},{x},{y}");
    }
    let mut landmarks = plan.landmarks.clone();
    landmarks.sort_by_key(|l| l.id);
    for lm in &landmarks {
        let _ = writeln!(
            out,
            "landmark={},{},{},{},{},{}",
            lm.id, lm.pos.0, lm.pos.1, lm.normal.0, lm.normal.1, lm.owner
        );
    }
    out
}

/// Parse the two halves of the map format back into a [`FloorPlan`].
pub fn parse_map(grid_text: &str, sidecar_text: &str) -> Result<FloorPlan, MapParseError> {
    // --- grid chars ------------------------------------------------------
    let lines: Vec<&str> = grid_text.lines().collect();
    if lines.is_empty() {
        return Err(MapParseError::BadGridShape);
    }
    let width = lines[0].chars().count();
    if width == 0 || lines.iter().any(|l| l.chars().count() != width) {
        return Err(MapParseError::BadGridShape);
    }
    let height = lines.len();
    let mut chars = Vec::with_capacity(width * height);
    for (y, line) in lines.iter().enumerate() {
        for ch in line.chars() {
            if !matches!(ch, '#' | '.' | 'O' | 'H' | 'D') {
                return Err(MapParseError::BadCellChar(y, ch));
            }
            chars.push(ch);
        }
    }

    // --- sidecar ---------------------------------------------------------
    let mut seed: Option<u64> = None;
    let mut cell_size: Option<f64> = None;
    let mut rooms: Vec<Room> = Vec::new();
    let mut doors: Vec<(u32, usize, usize)> = Vec::new();
    let mut landmarks: Vec<Landmark> = Vec::new();

    for (ln, raw) in sidecar_text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| MapParseError::BadSidecarLine(ln, msg.to_string());
        let (key, value) = line.split_once('=').ok_or_else(|| bad("missing '='"))?;
        match key {
            "seed" => {
                seed = Some(value.parse().map_err(|_| bad("bad seed"))?);
            }
            "cell_size" => {
                let v: f64 = value.parse().map_err(|_| bad("bad cell_size"))?;
                if !(v.is_finite() && v > 0.0) {
                    return Err(bad("cell_size must be finite and positive"));
                }
                cell_size = Some(v);
            }
            "room" => {
                let parts: Vec<&str> = value.split(',').collect();
                if parts.len() != 6 {
                    return Err(bad("room needs 6 fields"));
                }
                let id: u32 = parts[0].parse().map_err(|_| bad("bad room id"))?;
                let kind = match parts[1] {
                    "office" => RoomKind::Office,
                    "corridor" => RoomKind::Corridor,
                    "hall" => RoomKind::Hall,
                    _ => return Err(bad("unknown room kind")),
                };
                let nums: Vec<usize> = parts[2..]
                    .iter()
                    .map(|p| p.parse().map_err(|_| bad("bad room rect")))
                    .collect::<Result<_, _>>()?;
                if nums[0] >= nums[2] || nums[1] >= nums[3] {
                    return Err(bad("degenerate room rect"));
                }
                rooms.push(Room {
                    id,
                    kind,
                    rect: CellRect::new(nums[0], nums[1], nums[2], nums[3]),
                    doors: Vec::new(),
                });
            }
            "door" => {
                let parts: Vec<&str> = value.split(',').collect();
                if parts.len() != 3 {
                    return Err(bad("door needs 3 fields"));
                }
                let id: u32 = parts[0].parse().map_err(|_| bad("bad door office id"))?;
                let x: usize = parts[1].parse().map_err(|_| bad("bad door x"))?;
                let y: usize = parts[2].parse().map_err(|_| bad("bad door y"))?;
                doors.push((id, x, y));
            }
            "landmark" => {
                let parts: Vec<&str> = value.split(',').collect();
                if parts.len() != 6 {
                    return Err(bad("landmark needs 6 fields"));
                }
                let id: u32 = parts[0].parse().map_err(|_| bad("bad landmark id"))?;
                let fs: Vec<f64> = parts[1..5]
                    .iter()
                    .map(|p| p.parse().map_err(|_| bad("bad landmark float")))
                    .collect::<Result<_, _>>()?;
                if fs.iter().any(|f| !f.is_finite()) {
                    return Err(bad("landmark floats must be finite"));
                }
                let owner: PlaceId = parts[5].parse().map_err(|_| bad("bad landmark owner"))?;
                landmarks.push(Landmark {
                    id,
                    pos: (fs[0], fs[1]),
                    normal: (fs[2], fs[3]),
                    owner,
                });
            }
            _ => return Err(bad("unknown key")),
        }
    }

    let seed = seed.ok_or(MapParseError::MissingKey("seed"))?;
    let cell_size = cell_size.ok_or(MapParseError::MissingKey("cell_size"))?;

    // --- rebuild the typed grid from records and check it matches --------
    let mut grid = Grid2::filled(width, height, CellType::Wall);
    // Corridors first so office/hall ids win nothing; overlapping corridor
    // junction blocks keep the lower id because of sorted insertion order.
    let mut sorted = rooms.clone();
    sorted.sort_by_key(|r| (r.kind, r.id));
    for room in sorted.iter().rev() {
        if room.rect.x1 > width || room.rect.y1 > height {
            return Err(MapParseError::RoomOutOfBounds);
        }
        let cell = match room.kind {
            RoomKind::Office => CellType::Office(room.id),
            RoomKind::Corridor => CellType::Corridor(room.id),
            RoomKind::Hall => CellType::Hall(room.id),
        };
        for (x, y) in room.rect.cells() {
            grid.set(x, y, cell);
        }
    }
    for &(id, x, y) in &doors {
        let known_office = rooms
            .iter()
            .any(|r| r.kind == RoomKind::Office && r.id == id);
        if !known_office || x >= width || y >= height {
            return Err(MapParseError::BadDoor(id, x, y));
        }
        if !matches!(grid.get(x, y), CellType::Wall) {
            return Err(MapParseError::BadDoor(id, x, y));
        }
        grid.set(x, y, CellType::Doorway(id));
    }
    for (i, &ch) in chars.iter().enumerate() {
        let (x, y) = (i % width, i / width);
        if cell_char(*grid.get(x, y)) != ch {
            return Err(MapParseError::GridMetaMismatch(x, y));
        }
    }

    // Attach door records to their office rooms.
    for room in rooms.iter_mut().filter(|r| r.kind == RoomKind::Office) {
        room.doors = doors
            .iter()
            .filter(|&&(id, _, _)| id == room.id)
            .map(|&(_, x, y)| (x, y))
            .collect();
    }
    rooms.sort_by_key(|r| (r.kind, r.id));
    landmarks.sort_by_key(|l| l.id);

    Ok(FloorPlan {
        cell_size,
        grid,
        rooms,
        landmarks,
        seed,
    })
}

/// Write `map_path` (grid) and `map_path + ".meta"` (sidecar).
pub fn save_map(plan: &FloorPlan, map_path: &std::path::Path) -> std::io::Result<()> {
    std::fs::write(map_path, grid_to_string(plan))?;
    let meta = map_path.with_extension(meta_extension(map_path));
    std::fs::write(meta, sidecar_to_string(plan))
}

/// Read a map written by [`save_map`].
pub fn load_map(map_path: &std::path::Path) -> Result<FloorPlan, LoadError> {
    let grid_text = std::fs::read_to_string(map_path)?;
    let meta = map_path.with_extension(meta_extension(map_path));
    let sidecar_text = std::fs::read_to_string(meta)?;
    Ok(parse_map(&grid_text, &sidecar_text)?)
}

fn meta_extension(path: &std::path::Path) -> String {
    match path.extension() {
        Some(ext) => format!("{}.meta", ext.to_string_lossy()),
        None => "meta".to_string(),
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parse(#[from] MapParseError),
}
