//! Continuous 2D kinematic simulation inside a floor plan.
//!
//! The robot is a disc of radius `robot_radius` moving holonomically
//! (forward, lateral, and angular velocity in the robot frame). Each tick it
//! perceives a 180-degree depth raycast fan, an RxR grid of region
//! descriptors (landmark descriptors where a landmark projects, seeded
//! distractors elsewhere), and a place-type hint with optional label noise.

mod descriptors;
mod observe;
pub mod raycast;

pub use descriptors::DescriptorLibrary;
pub use observe::{DescriptorGrid, Observation, PlaceType, VisibleLandmark};

use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::floorplan::{CellType, FloorPlan};

/// Wrap an angle to `[-pi, pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t >= PI {
        t -= 2.0 * PI;
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Pose {
        Pose {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub fn heading(&self) -> (f64, f64) {
        (self.theta.cos(), self.theta.sin())
    }

    pub fn distance_to(&self, other: (f64, f64)) -> f64 {
        ((self.x - other.0).powi(2) + (self.y - other.1).powi(2)).sqrt()
    }
}

/// Velocity command in the robot frame: `vx` forward, `vy` left, `omega`
/// counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Action {
    pub vx: f64,
    pub vy: f64,
    pub omega: f64,
}

impl Action {
    pub fn clamped(self, v_max: f64, omega_max: f64) -> Action {
        Action {
            vx: self.vx.clamp(-v_max, v_max),
            vy: self.vy.clamp(-v_max, v_max),
            omega: self.omega.clamp(-omega_max, omega_max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldConfig {
    pub dt: f64,
    pub v_max: f64,
    pub omega_max: f64,
    pub n_rays: usize,
    pub fov: f64,
    pub range_max: f64,
    pub robot_radius: f64,
    /// Descriptor grid edge (RxR regions).
    pub grid_r: usize,
    /// Descriptor dimension D.
    pub descriptor_dim: usize,
    /// Gaussian noise added to landmark descriptors before renormalizing.
    pub sigma: f64,
    /// Probability the place hint flips to a uniformly wrong label.
    pub eps_pd: f64,
    /// Physical landmark half-extent, for projection footprints.
    pub landmark_half_size: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            dt: 0.1,
            v_max: 1.0,
            omega_max: PI / 2.0,
            n_rays: 61,
            fov: PI,
            range_max: 10.0,
            robot_radius: 0.3,
            grid_r: 7,
            descriptor_dim: 64,
            sigma: 0.05,
            eps_pd: 0.0,
            landmark_half_size: 0.3,
        }
    }
}

/// One robot in one plan, with its own RNG stream.
#[derive(Debug, Clone)]
pub struct World {
    plan: Arc<FloorPlan>,
    library: Arc<DescriptorLibrary>,
    config: WorldConfig,
    pose: Pose,
    rng: ChaCha8Rng,
    tick: u64,
}

impl World {
    pub fn new(
        plan: Arc<FloorPlan>,
        library: Arc<DescriptorLibrary>,
        config: WorldConfig,
        pose: Pose,
        seed: u64,
        stream: u64,
    ) -> World {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        World {
            plan,
            library,
            config,
            pose,
            rng,
            tick: 0,
        }
    }

    pub fn plan(&self) -> &FloorPlan {
        &self.plan
    }

    pub fn plan_arc(&self) -> Arc<FloorPlan> {
        Arc::clone(&self.plan)
    }

    pub fn library(&self) -> &DescriptorLibrary {
        &self.library
    }

    pub fn library_arc(&self) -> Arc<DescriptorLibrary> {
        Arc::clone(&self.library)
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn config_mut(&mut self) -> &mut WorldConfig {
        &mut self.config
    }

    pub fn pose(&self) -> Pose {
        self.pose
    }

    pub fn set_pose(&mut self, pose: Pose) {
        self.pose = pose;
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub(crate) fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Minimum distance from a point to any nearby wall cell rectangle.
    /// Larger than any clearance of interest when no wall is in range.
    pub fn wall_distance(&self, x: f64, y: f64) -> f64 {
        wall_distance(&self.plan, x, y)
    }

    /// A disc position is valid when it keeps `robot_radius` clearance.
    pub fn position_valid(&self, x: f64, y: f64) -> bool {
        self.wall_distance(x, y) >= self.config.robot_radius - 1e-9
    }

    /// Ground-truth place type at the robot position.
    pub fn place_truth(&self) -> PlaceType {
        match self.plan.cell_type_at(self.pose.x, self.pose.y) {
            CellType::Office(_) | CellType::Doorway(_) => PlaceType::Office,
            CellType::Hall(_) => PlaceType::Hall,
            // Collision resolution keeps the center out of wall cells.
            CellType::Corridor(_) | CellType::Wall => PlaceType::Corridor,
        }
    }

    /// Advance the robot by one step of `dt` seconds under `action`.
    ///
    /// First-order integration in the robot frame; on contact the position
    /// projects back along the motion vector, then slides along whichever
    /// axis remains free. Heading integrates regardless.
    pub fn step(&mut self, action: Action, dt: f64) {
        assert!(dt > 0.0, "dt must be positive");
        let a = action.clamped(self.config.v_max, self.config.omega_max);
        let (c, s) = (self.pose.theta.cos(), self.pose.theta.sin());
        let dx = (a.vx * c - a.vy * s) * dt;
        let dy = (a.vx * s + a.vy * c) * dt;

        let (x0, y0) = (self.pose.x, self.pose.y);
        let (mut x, mut y) = self.try_move(x0, y0, dx, dy);
        if (x - x0).hypot(y - y0) + 1e-12 < dx.hypot(dy) {
            // Blocked: slide along the free axis with the remaining motion.
            let (rx, ry) = (dx - (x - x0), dy - (y - y0));
            let slid = self.try_move(x, y, rx, 0.0);
            let slid = self.try_move(slid.0, slid.1, 0.0, ry);
            x = slid.0;
            y = slid.1;
        }
        self.pose = Pose::new(x, y, self.pose.theta + a.omega * dt);
        self.tick += 1;
    }

    /// Move as far along `(dx, dy)` as validity allows (binary search for
    /// the contact parameter).
    fn try_move(&self, x: f64, y: f64, dx: f64, dy: f64) -> (f64, f64) {
        if dx == 0.0 && dy == 0.0 {
            return (x, y);
        }
        if self.position_valid(x + dx, y + dy) {
            return (x + dx, y + dy);
        }
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            if self.position_valid(x + mid * dx, y + mid * dy) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (x + lo * dx, y + lo * dy)
    }
}

/// Shared by the world and the planners' spawn helpers.
pub fn wall_distance(plan: &FloorPlan, x: f64, y: f64) -> f64 {
    let cs = plan.cell_size;
    let cx = (x / cs).floor() as i64;
    let cy = (y / cs).floor() as i64;
    let mut best = f64::MAX;
    for wy in (cy - 2)..=(cy + 2) {
        for wx in (cx - 2)..=(cx + 2) {
            let is_wall = if plan.grid.in_bounds(wx, wy) {
                matches!(plan.grid.get(wx as usize, wy as usize), CellType::Wall)
            } else {
                true
            };
            if is_wall {
                let ddx = (wx as f64 * cs - x).max(x - (wx + 1) as f64 * cs).max(0.0);
                let ddy = (wy as f64 * cs - y).max(y - (wy + 1) as f64 * cs).max(0.0);
                best = best.min((ddx * ddx + ddy * ddy).sqrt());
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::{generate_floorplan, GenConfig, RoomKind};

    fn test_world() -> World {
        let cfg = GenConfig {
            n_corridors: 1,
            offices_per_corridor: 2,
            n_halls: 0,
            ..GenConfig::default()
        };
        let plan = Arc::new(generate_floorplan(1, &cfg).unwrap());
        let library = Arc::new(DescriptorLibrary::for_plan(&plan, 99));
        let corridor = plan.rooms_of_kind(RoomKind::Corridor).next().unwrap();
        let (cx, cy) = corridor.rect.center();
        let pose = Pose::new(cx, cy, 0.0);
        World::new(plan, library, WorldConfig::default(), pose, 7, 0)
    }

    #[test]
    fn zero_action_leaves_pose_unchanged() {
        let mut w = test_world();
        let before = w.pose();
        w.step(Action::default(), 0.1);
        assert_eq!(w.pose().x, before.x);
        assert_eq!(w.pose().y, before.y);
        assert_eq!(w.pose().theta, before.theta);
    }

    #[test]
    fn forward_step_integrates_exactly() {
        let mut w = test_world();
        let before = w.pose();
        w.step(
            Action {
                vx: 1.0,
                vy: 0.0,
                omega: 0.0,
            },
            0.1,
        );
        assert!((w.pose().x - (before.x + 0.1)).abs() < 1e-12);
        assert!((w.pose().y - before.y).abs() < 1e-12);
    }

    #[test]
    fn actions_are_clamped() {
        let mut w = test_world();
        let before = w.pose();
        w.step(
            Action {
                vx: 50.0,
                vy: 0.0,
                omega: 0.0,
            },
            0.1,
        );
        assert!((w.pose().x - (before.x + w.config().v_max * 0.1)).abs() < 1e-9);
    }

    #[test]
    fn stops_at_wall_contact_like_fine_stepping() {
        // Drive into the corridor side wall; the coarse-step world must stop
        // where a 1000x finer stepping oracle stops, with no penetration.
        let mut w = test_world();
        let mut pose = w.pose();
        pose.theta = wrap_angle(std::f64::consts::FRAC_PI_2);
        w.set_pose(pose);
        let action = Action {
            vx: 1.0,
            vy: 0.0,
            omega: 0.0,
        };
        let mut oracle = w.clone();
        for _ in 0..30 {
            w.step(action, 0.1);
        }
        for _ in 0..30_000 {
            oracle.step(action, 0.1 / 1000.0);
        }
        assert!((w.pose().y - oracle.pose().y).abs() < 1e-3);
        assert!(w.wall_distance(w.pose().x, w.pose().y) >= w.config().robot_radius - 1e-6);
        assert!(w.pose().y > pose.y, "should have moved before contact");
    }

    #[test]
    fn never_inside_wall_under_random_actions() {
        use rand::Rng;
        let mut w = test_world();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let action = Action {
                vx: rng.gen_range(-1.0..1.0),
                vy: rng.gen_range(-1.0..1.0),
                omega: rng.gen_range(-1.6..1.6),
            };
            w.step(action, 0.1);
            let cell = w.plan().cell_type_at(w.pose().x, w.pose().y);
            assert!(cell.is_free(), "robot center inside wall at {:?}", w.pose());
            assert!(w.wall_distance(w.pose().x, w.pose().y) >= w.config().robot_radius - 1e-6);
        }
    }

    #[test]
    fn theta_wraps_into_range() {
        for t in [0.0, PI, -PI, 3.0 * PI, -3.0 * PI, 10.0, -10.0] {
            let w = wrap_angle(t);
            assert!((-PI..PI).contains(&w), "{t} wrapped to {w}");
        }
        assert_eq!(wrap_angle(0.0), 0.0);
    }
}
