//! Configuration-space occupancy grids.
//!
//! [`inflate_cspace`] thickens walls by the robot radius so the planner
//! keeps clearance and routes favor corridor centers. A subcell is occupied
//! when the Euclidean distance from its center to the nearest wall cell
//! rectangle is at most the inflation radius, which makes inflation monotone
//! in the radius by construction.

use super::{CellType, FloorPlan};

/// Boolean occupancy grid at a finer resolution than the source plan.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    /// Subcells per meter.
    pub resolution: u32,
    pub inflation_radius: f64,
    width: usize,
    height: usize,
    world_w: f64,
    world_h: f64,
    occupied: Vec<bool>,
}

impl OccupancyGrid {
    /// Build directly from a boolean grid; used by tests and synthetic rooms.
    pub fn from_cells(
        resolution: u32,
        width: usize,
        height: usize,
        inflation_radius: f64,
        occupied: Vec<bool>,
    ) -> Self {
        assert_eq!(occupied.len(), width * height);
        OccupancyGrid {
            resolution,
            inflation_radius,
            width,
            height,
            world_w: width as f64 / resolution as f64,
            world_h: height as f64 / resolution as f64,
            occupied,
        }
    }

    /// An empty rectangular room with a one-subcell occupied border.
    pub fn empty_room(width_m: f64, height_m: f64, resolution: u32) -> Self {
        let w = (width_m * resolution as f64).round() as usize;
        let h = (height_m * resolution as f64).round() as usize;
        let mut occ = vec![false; w * h];
        for x in 0..w {
            occ[x] = true;
            occ[(h - 1) * w + x] = true;
        }
        for y in 0..h {
            occ[y * w] = true;
            occ[y * w + w - 1] = true;
        }
        OccupancyGrid::from_cells(resolution, w, h, 0.0, occ)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn world_size(&self) -> (f64, f64) {
        (self.world_w, self.world_h)
    }

    pub fn is_occupied_cell(&self, x: usize, y: usize) -> bool {
        self.occupied[y * self.width + x]
    }

    /// Occupancy at a world point. Out-of-bounds points are occupied.
    pub fn is_occupied_point(&self, x: f64, y: f64) -> bool {
        if x < 0.0 || y < 0.0 || x >= self.world_w || y >= self.world_h {
            return true;
        }
        let cx = (x * self.resolution as f64) as usize;
        let cy = (y * self.resolution as f64) as usize;
        let cx = cx.min(self.width - 1);
        let cy = cy.min(self.height - 1);
        self.occupied[cy * self.width + cx]
    }

    /// True when the straight segment stays in free space, checked by dense
    /// sampling at half-subcell steps.
    pub fn segment_free(&self, a: (f64, f64), b: (f64, f64)) -> bool {
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len = (dx * dx + dy * dy).sqrt();
        let step = 0.5 / self.resolution as f64;
        let n = ((len / step).ceil() as usize).max(1);
        (0..=n).all(|i| {
            let t = i as f64 / n as f64;
            !self.is_occupied_point(a.0 + t * dx, a.1 + t * dy)
        })
    }
}

/// Rasterize a plan into an occupancy grid with walls inflated by `radius`
/// meters, at `resolution` subcells per meter.
pub fn inflate_cspace(plan: &FloorPlan, radius: f64, resolution: u32) -> OccupancyGrid {
    assert!(radius >= 0.0, "inflation radius must be non-negative");
    assert!(resolution >= 1);
    let cs = plan.cell_size;
    let width = (plan.width() as f64 * cs * resolution as f64).round() as usize;
    let height = (plan.height() as f64 * cs * resolution as f64).round() as usize;
    let mut occupied = vec![false; width * height];

    // A point within `radius` of some wall rect can only be near wall cells
    // in a small neighborhood of its containing plan cell.
    let reach = (radius / cs).ceil() as i64 + 1;
    let sub = resolution as f64;

    for sy in 0..height {
        for sx in 0..width {
            let px = (sx as f64 + 0.5) / sub;
            let py = (sy as f64 + 0.5) / sub;
            let cx = (px / cs) as i64;
            let cy = (py / cs) as i64;
            let mut near_wall = false;
            'walls: for wy in (cy - reach)..=(cy + reach) {
                for wx in (cx - reach)..=(cx + reach) {
                    let is_wall = if plan.grid.in_bounds(wx, wy) {
                        matches!(plan.grid.get(wx as usize, wy as usize), CellType::Wall)
                    } else {
                        true
                    };
                    if is_wall && dist_point_rect(px, py, wx as f64 * cs, wy as f64 * cs, cs) <= radius
                    {
                        near_wall = true;
                        break 'walls;
                    }
                }
            }
            if near_wall {
                occupied[sy * width + sx] = true;
            }
        }
    }

    OccupancyGrid {
        resolution,
        inflation_radius: radius,
        width,
        height,
        world_w: width as f64 / sub,
        world_h: height as f64 / sub,
        occupied,
    }
}

/// Euclidean distance from a point to the cell rectangle at `(rx, ry)` with
/// edge `cs` (zero inside the rectangle).
fn dist_point_rect(px: f64, py: f64, rx: f64, ry: f64, cs: f64) -> f64 {
    let dx = (rx - px).max(px - (rx + cs)).max(0.0);
    let dy = (ry - py).max(py - (ry + cs)).max(0.0);
    (dx * dx + dy * dy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::{generate_floorplan, GenConfig};

    fn brute_force_occupied(plan: &FloorPlan, radius: f64, resolution: u32) -> Vec<bool> {
        let cs = plan.cell_size;
        let width = (plan.width() as f64 * cs * resolution as f64).round() as usize;
        let height = (plan.height() as f64 * cs * resolution as f64).round() as usize;
        let walls: Vec<(f64, f64)> = plan
            .grid
            .iter_cells()
            .filter(|(_, _, c)| matches!(c, CellType::Wall))
            .map(|(x, y, _)| (x as f64 * cs, y as f64 * cs))
            .collect();
        let mut occ = vec![false; width * height];
        for sy in 0..height {
            for sx in 0..width {
                let px = (sx as f64 + 0.5) / resolution as f64;
                let py = (sy as f64 + 0.5) / resolution as f64;
                occ[sy * width + sx] = walls
                    .iter()
                    .any(|&(rx, ry)| dist_point_rect(px, py, rx, ry, cs) <= radius);
            }
        }
        occ
    }

    #[test]
    fn zero_radius_matches_rasterized_walls() {
        let cfg = GenConfig {
            n_corridors: 2,
            offices_per_corridor: 2,
            n_halls: 0,
            ..GenConfig::default()
        };
        let plan = generate_floorplan(4, &cfg).unwrap();
        let grid = inflate_cspace(&plan, 0.0, 2);
        for sy in 0..grid.height() {
            for sx in 0..grid.width() {
                let px = (sx as f64 + 0.5) / 2.0;
                let py = (sy as f64 + 0.5) / 2.0;
                let wall = matches!(plan.cell_type_at(px, py), CellType::Wall);
                assert_eq!(grid.is_occupied_cell(sx, sy), wall, "at ({px}, {py})");
            }
        }
    }

    #[test]
    fn matches_brute_force_distance_transform() {
        let cfg = GenConfig {
            n_corridors: 1,
            offices_per_corridor: 2,
            n_halls: 0,
            ..GenConfig::default()
        };
        let plan = generate_floorplan(9, &cfg).unwrap();
        for radius in [0.0, 0.3, 0.9] {
            let grid = inflate_cspace(&plan, radius, 2);
            let oracle = brute_force_occupied(&plan, radius, 2);
            for (i, &expect) in oracle.iter().enumerate() {
                assert_eq!(
                    grid.occupied[i], expect,
                    "radius {radius} subcell {i} disagrees with brute force"
                );
            }
        }
    }

    #[test]
    fn corridor_free_band_width() {
        // A 2 m corridor inflated by 0.3 m leaves a 1.4 m free band centered
        // on the corridor axis.
        let cfg = GenConfig {
            n_corridors: 1,
            offices_per_corridor: 1,
            n_halls: 0,
            ..GenConfig::default()
        };
        let plan = generate_floorplan(2, &cfg).unwrap();
        let corridor = plan
            .rooms_of_kind(crate::floorplan::RoomKind::Corridor)
            .next()
            .unwrap();
        let rect = corridor.rect;
        let horizontal = rect.width() >= rect.height();
        assert!(horizontal || rect.width() == 2);
        let resolution = 10u32; // probe at 0.1 m
        let grid = inflate_cspace(&plan, 0.3, resolution);
        // Probe across the corridor at an x far from the ends and any door.
        let (axis_mid, perp_lo) = if horizontal {
            ((rect.x0 + rect.x1) / 2, rect.y0 as f64)
        } else {
            ((rect.y0 + rect.y1) / 2, rect.x0 as f64)
        };
        let mut free_span = 0;
        for i in 0..(2 * resolution) {
            let perp = perp_lo + (i as f64 + 0.5) / resolution as f64;
            let (px, py) = if horizontal {
                (axis_mid as f64 + 0.05, perp)
            } else {
                (perp, axis_mid as f64 + 0.05)
            };
            if !grid.is_occupied_point(px, py) {
                free_span += 1;
            }
        }
        assert_eq!(free_span, 14, "free band should be 1.4 m of 2.0 m");
    }

    #[test]
    fn large_radius_fills_corridor() {
        let cfg = GenConfig {
            n_corridors: 1,
            offices_per_corridor: 1,
            n_halls: 0,
            ..GenConfig::default()
        };
        let plan = generate_floorplan(2, &cfg).unwrap();
        let grid = inflate_cspace(&plan, 1.0, 2);
        let corridor = plan
            .rooms_of_kind(crate::floorplan::RoomKind::Corridor)
            .next()
            .unwrap();
        for (x, y) in corridor.rect.cells() {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            assert!(
                grid.is_occupied_point(px, py),
                "corridor cell ({x}, {y}) should be occupied at radius >= half width"
            );
        }
    }

    #[test]
    fn inflation_is_monotone_in_radius() {
        let plan = generate_floorplan(6, &GenConfig::default()).unwrap();
        let small = inflate_cspace(&plan, 0.2, 2);
        let large = inflate_cspace(&plan, 0.5, 2);
        for i in 0..small.occupied.len() {
            assert!(
                !small.occupied[i] || large.occupied[i],
                "occupied({}) at r=0.2 must stay occupied at r=0.5",
                i
            );
        }
    }
}
