//! Per-tick observation assembly.

use rand::Rng;

use super::raycast::raycast;
use super::{wrap_angle, World};

/// The three place categories the place detector distinguishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaceType {
    Office,
    Corridor,
    Hall,
}

impl PlaceType {
    pub const ALL: [PlaceType; 3] = [PlaceType::Office, PlaceType::Corridor, PlaceType::Hall];
}

/// RxR grid of D-dimensional unit descriptors, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorGrid {
    r: usize,
    dim: usize,
    data: Vec<f64>,
}

impl DescriptorGrid {
    pub fn new(r: usize, dim: usize) -> DescriptorGrid {
        DescriptorGrid {
            r,
            dim,
            data: vec![0.0; r * r * dim],
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cell(&self, row: usize, col: usize) -> &[f64] {
        let i = (row * self.r + col) * self.dim;
        &self.data[i..i + self.dim]
    }

    pub fn cell_mut(&mut self, row: usize, col: usize) -> &mut [f64] {
        let i = (row * self.r + col) * self.dim;
        &mut self.data[i..i + self.dim]
    }

    /// All region descriptors in row-major order.
    pub fn regions(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.data
    }
}

/// Ground-truth landmark visibility, exposed for test harnesses and dataset
/// generation only; policies must not read it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibleLandmark {
    pub id: u32,
    pub distance: f64,
    /// Bearing relative to the heading, positive to the left.
    pub bearing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    /// Depth readings across the fan, index 0 at `-fov/2` (rightmost) up to
    /// `+fov/2` (leftmost), saturated at `range_max`.
    pub rays: Vec<f64>,
    pub descriptor_grid: DescriptorGrid,
    /// Place type at the robot position, with `eps_pd` label noise.
    pub place_hint: PlaceType,
    /// Ground truth for harnesses.
    pub visible_landmarks: Vec<VisibleLandmark>,
}

impl Observation {
    /// Bearing of ray `i`.
    pub fn ray_bearing(&self, i: usize, fov: f64) -> f64 {
        let n = self.rays.len();
        -fov / 2.0 + fov * i as f64 / (n - 1) as f64
    }
}

impl World {
    /// Assemble the observation for the current pose, consuming RNG for
    /// distractors, descriptor noise, and place label noise. Replaying the
    /// same world (same seed and stream) reproduces the same observations.
    pub fn observe(&mut self) -> Observation {
        let config = self.config().clone();
        let pose = self.pose();
        let plan = self.plan_arc();

        // Depth fan.
        let mut rays = Vec::with_capacity(config.n_rays);
        for i in 0..config.n_rays {
            let rel = -config.fov / 2.0 + config.fov * i as f64 / (config.n_rays - 1) as f64;
            rays.push(raycast(
                &plan,
                (pose.x, pose.y),
                pose.theta + rel,
                config.range_max,
            ));
        }

        // Landmark visibility: in range, inside the fan, facing the robot,
        // and the ray to the surface point is unobstructed.
        let mut visible: Vec<VisibleLandmark> = Vec::new();
        for lm in &plan.landmarks {
            let (dx, dy) = (lm.pos.0 - pose.x, lm.pos.1 - pose.y);
            let distance = dx.hypot(dy);
            if distance > config.range_max || distance < 1e-9 {
                continue;
            }
            let bearing = wrap_angle(dy.atan2(dx) - pose.theta);
            if bearing.abs() > config.fov / 2.0 + 1e-12 {
                continue;
            }
            // The robot must be on the face side of the wall.
            if dx * lm.normal.0 + dy * lm.normal.1 > -1e-9 {
                continue;
            }
            let hit = raycast(&plan, (pose.x, pose.y), dy.atan2(dx), config.range_max);
            if hit + 1e-6 < distance {
                continue;
            }
            visible.push(VisibleLandmark {
                id: lm.id,
                distance,
                bearing,
            });
        }
        // Far landmarks first so closer projections overwrite contested cells.
        visible.sort_by(|a, b| b.distance.total_cmp(&a.distance));

        // Descriptor grid: distractors everywhere, then landmark footprints.
        let r = config.grid_r;
        let dim = config.descriptor_dim;
        let mut grid = DescriptorGrid::new(r, dim);
        {
            let library = self.library_arc();
            let rng = self.rng_mut();
            for row in 0..r {
                for col in 0..r {
                    let d = library.distractor(rng);
                    grid.cell_mut(row, col).copy_from_slice(&d);
                }
            }
            for v in &visible {
                // Continuous fan coordinate: column 0 starts at -fov/2,
                // matching the ray indexing.
                let frac = (v.bearing + config.fov / 2.0) / config.fov;
                let col_center = frac * r as f64;
                let half_w =
                    (config.landmark_half_size / v.distance).atan() / config.fov * r as f64;
                let col_lo = (col_center - half_w).floor().max(0.0) as usize;
                let col_hi = ((col_center + half_w).floor() as usize).min(r - 1);
                let row_center = (r - 1) / 2;
                let row_span = half_w.floor() as usize;
                let row_lo = row_center.saturating_sub(row_span);
                let row_hi = (row_center + row_span).min(r - 1);
                for row in row_lo..=row_hi {
                    for col in col_lo..=col_hi {
                        if config.sigma == 0.0 {
                            grid.cell_mut(row, col)
                                .copy_from_slice(library.ground_truth(v.id).unwrap());
                        } else {
                            let d = library.noisy_landmark(v.id, config.sigma, rng);
                            grid.cell_mut(row, col).copy_from_slice(&d);
                        }
                    }
                }
            }
        }

        // Place hint with label noise.
        let truth = self.place_truth();
        let place_hint = {
            let rng = self.rng_mut();
            if config.eps_pd > 0.0 && rng.gen_range(0.0..1.0) < config.eps_pd {
                let others: Vec<PlaceType> = PlaceType::ALL
                    .into_iter()
                    .filter(|p| *p != truth)
                    .collect();
                others[rng.gen_range(0..others.len())]
            } else {
                truth
            }
        };

        // Visible list sorted nearest-first for harness convenience.
        visible.sort_by(|a, b| a.distance.total_cmp(&b.distance));

        Observation {
            rays,
            descriptor_grid: grid,
            place_hint,
            visible_landmarks: visible,
        }
    }
}
