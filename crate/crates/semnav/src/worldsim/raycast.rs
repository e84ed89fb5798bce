//! Exact grid raycasting (Amanatides & Woo cell traversal).

use crate::floorplan::{CellType, FloorPlan};

/// Distance along the ray from `origin` at `angle` to the first wall cell
/// boundary, saturated at `range_max`. Out-of-grid space counts as wall.
pub fn raycast(plan: &FloorPlan, origin: (f64, f64), angle: f64, range_max: f64) -> f64 {
    let cs = plan.cell_size;
    let (dx, dy) = (angle.cos(), angle.sin());
    // Work in cell units.
    let ox = origin.0 / cs;
    let oy = origin.1 / cs;
    let max_t = range_max / cs;

    let mut cx = ox.floor() as i64;
    let mut cy = oy.floor() as i64;

    let is_wall = |x: i64, y: i64| -> bool {
        if plan.grid.in_bounds(x, y) {
            matches!(plan.grid.get(x as usize, y as usize), CellType::Wall)
        } else {
            true
        }
    };
    if is_wall(cx, cy) {
        return 0.0;
    }

    let step_x: i64 = if dx > 0.0 { 1 } else { -1 };
    let step_y: i64 = if dy > 0.0 { 1 } else { -1 };
    let t_delta_x = if dx != 0.0 { (1.0 / dx).abs() } else { f64::INFINITY };
    let t_delta_y = if dy != 0.0 { (1.0 / dy).abs() } else { f64::INFINITY };
    let mut t_max_x = if dx > 0.0 {
        (cx as f64 + 1.0 - ox) / dx
    } else if dx < 0.0 {
        (cx as f64 - ox) / dx
    } else {
        f64::INFINITY
    };
    let mut t_max_y = if dy > 0.0 {
        (cy as f64 + 1.0 - oy) / dy
    } else if dy < 0.0 {
        (cy as f64 - oy) / dy
    } else {
        f64::INFINITY
    };

    loop {
        let t = if t_max_x < t_max_y {
            cx += step_x;
            let t = t_max_x;
            t_max_x += t_delta_x;
            t
        } else {
            cy += step_y;
            let t = t_max_y;
            t_max_y += t_delta_y;
            t
        };
        if t > max_t {
            return range_max;
        }
        if is_wall(cx, cy) {
            return t * cs;
        }
    }
}
