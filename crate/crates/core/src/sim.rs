//! Synthetic 2D-LiDAR scene simulator.
//!
//! A static sensor at the origin ray-casts against a rectangular room,
//! circular obstacles and two leg-circles per person. Person legs sit
//! perpendicular to the walking direction and swing sinusoidally along it,
//! which reproduces the inter-leg pass-through effect that makes naive
//! per-beam temporal fusion fail. Motion is a pure function of time
//! (reflective walls via triangle-wave folding), so rendering the same scene
//! at a higher frame rate yields a superset of the same frames.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scan::{sanitize_scan, Annotation, LidarConfig, Scan, ScanSequence};

/// Swing amplitude as a fraction of leg separation.
const GAIT_SWING_RATIO: f64 = 0.4;
/// One full gait cycle per this many meters walked.
const GAIT_STRIDE_M: f64 = 0.6;

/// One simulated person: straight-line motion with reflective walls.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PersonSpec {
    /// Initial position in meters (sensor frame).
    pub position: [f64; 2],
    /// Velocity in m/s.
    pub velocity: [f64; 2],
    /// Radius of each leg circle in meters.
    pub leg_radius: f64,
    /// Distance between leg centers in meters.
    pub leg_separation: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
}

/// Full scene description; rendering is deterministic given `rng_seed`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneSpec {
    /// Room half-extents in meters; walls at `x = ±room[0]`, `y = ±room[1]`.
    pub room: [f64; 2],
    #[serde(default)]
    pub persons: Vec<PersonSpec>,
    #[serde(default)]
    pub static_obstacles: Vec<Circle>,
    /// Gaussian range noise sigma in meters.
    #[serde(default)]
    pub noise_sigma: f64,
    /// Probability that a given leg returns no hits in a given frame.
    #[serde(default)]
    pub leg_dropout_prob: f64,
    pub frame_rate: f64,
    pub duration: f64,
    #[serde(default)]
    pub rng_seed: u64,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.room[0] > 0.0 && self.room[1] > 0.0) {
            return Err(Error::Validation("room half-extents must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.leg_dropout_prob) {
            return Err(Error::Validation(format!(
                "leg_dropout_prob must be in [0, 1), got {}",
                self.leg_dropout_prob
            )));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::Validation("noise_sigma must be >= 0".into()));
        }
        if !(self.frame_rate > 0.0) {
            return Err(Error::Validation("frame_rate must be > 0".into()));
        }
        if !(self.duration > 0.0) {
            return Err(Error::Validation("duration must be > 0".into()));
        }
        for (i, p) in self.persons.iter().enumerate() {
            if !(p.leg_radius > 0.0) {
                return Err(Error::Validation(format!(
                    "person {i}: leg_radius must be > 0"
                )));
            }
            if !(p.leg_separation >= 0.0) {
                return Err(Error::Validation(format!(
                    "person {i}: leg_separation must be >= 0"
                )));
            }
            let margin = person_margin(p);
            for axis in 0..2 {
                let limit = self.room[axis] - margin;
                if limit <= 0.0 {
                    return Err(Error::Validation(format!(
                        "person {i}: room too small for the leg footprint"
                    )));
                }
                if p.position[axis].abs() > limit {
                    return Err(Error::Validation(format!(
                        "person {i} starts outside the room"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn num_frames(&self) -> usize {
        (self.duration * self.frame_rate).round() as usize
    }
}

/// Clearance the person center keeps from the walls.
fn person_margin(p: &PersonSpec) -> f64 {
    p.leg_separation / 2.0 + p.leg_radius + GAIT_SWING_RATIO * p.leg_separation
}

/// Triangle-wave fold of `u` into `[lo, hi]`; returns (position, direction
/// sign of the derivative).
fn fold(u: f64, lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    if span <= 0.0 {
        return (lo, 1.0);
    }
    let period = 2.0 * span;
    let m = (u - lo).rem_euclid(period);
    if m <= span {
        (lo + m, 1.0)
    } else {
        (hi - (m - span), -1.0)
    }
}

/// Person center and (possibly wall-reflected) velocity at time `t`.
fn person_state(spec: &SceneSpec, p: &PersonSpec, t: f64) -> ([f64; 2], [f64; 2]) {
    let margin = person_margin(p);
    let mut pos = [0.0; 2];
    let mut vel = [0.0; 2];
    for axis in 0..2 {
        let limit = spec.room[axis] - margin;
        let (x, sign) = fold(p.position[axis] + p.velocity[axis] * t, -limit, limit);
        pos[axis] = x;
        vel[axis] = sign * p.velocity[axis];
    }
    (pos, vel)
}

/// Leg circles of a person at time `t`.
fn person_legs(spec: &SceneSpec, p: &PersonSpec, t: f64) -> [Circle; 2] {
    let (pos, vel) = person_state(spec, p, t);
    let speed = (vel[0] * vel[0] + vel[1] * vel[1]).sqrt();
    let (forward, side) = if speed > 1e-9 {
        let f = [vel[0] / speed, vel[1] / speed];
        ([f[0], f[1]], [-f[1], f[0]])
    } else {
        // Standing person: split the legs along y.
        ([1.0, 0.0], [0.0, 1.0])
    };
    let half_sep = p.leg_separation / 2.0;
    let swing = if speed > 1e-9 {
        let phase = std::f64::consts::TAU * speed * t / GAIT_STRIDE_M;
        GAIT_SWING_RATIO * p.leg_separation * phase.sin()
    } else {
        0.0
    };
    let leg = |s: f64, w: f64| Circle {
        center: [
            pos[0] + s * side[0] + w * forward[0],
            pos[1] + s * side[1] + w * forward[1],
        ],
        radius: p.leg_radius,
    };
    [leg(half_sep, swing), leg(-half_sep, -swing)]
}

/// Nearest positive ray-circle intersection distance for a ray from the
/// origin along `dir` (unit length).
fn ray_circle(dir: [f64; 2], c: &Circle) -> Option<f64> {
    let proj = dir[0] * c.center[0] + dir[1] * c.center[1];
    let d2 = c.center[0] * c.center[0] + c.center[1] * c.center[1];
    let disc = proj * proj - d2 + c.radius * c.radius;
    if disc < 0.0 {
        return None;
    }
    let sqrt = disc.sqrt();
    let t0 = proj - sqrt;
    let t1 = proj + sqrt;
    if t0 > 1e-9 {
        Some(t0)
    } else if t1 > 1e-9 {
        Some(t1)
    } else {
        None
    }
}

/// Distance from the origin to the room walls along `dir`.
fn ray_walls(dir: [f64; 2], room: [f64; 2]) -> f64 {
    let mut t = f64::INFINITY;
    for axis in 0..2 {
        if dir[axis].abs() > 1e-12 {
            let wall = if dir[axis] > 0.0 { room[axis] } else { -room[axis] };
            let cand = wall / dir[axis];
            if cand > 0.0 {
                // The other coordinate must lie within the wall segment;
                // for a closed rectangle around the origin it always does
                // at the *nearest* of the candidate planes, so min suffices.
                t = t.min(cand);
            }
        }
    }
    t
}

/// Renders an annotated sequence. Deterministic given the spec's seed.
pub fn render_sequence(spec: &SceneSpec, config: &LidarConfig) -> Result<ScanSequence> {
    spec.validate()?;
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let frames = spec.num_frames();
    if frames == 0 {
        return Err(Error::Validation(
            "duration and frame_rate yield zero frames".into(),
        ));
    }

    let mut scans = Vec::with_capacity(frames);
    let mut annotations = Vec::with_capacity(frames);
    for k in 0..frames {
        let t = k as f64 / spec.frame_rate;

        // RNG draw order is fixed: per person two dropout draws, then one
        // noise draw per beam. Zero-probability stages draw nothing so that
        // noise-free renders are independent of the frame count.
        let mut circles: Vec<Circle> = spec.static_obstacles.clone();
        let mut centers = Vec::with_capacity(spec.persons.len());
        for p in &spec.persons {
            let legs = person_legs(spec, p, t);
            let (pos, _) = person_state(spec, p, t);
            centers.push(pos);
            for leg in legs {
                let dropped =
                    spec.leg_dropout_prob > 0.0 && rng.gen::<f64>() < spec.leg_dropout_prob;
                if !dropped {
                    circles.push(leg);
                }
            }
        }

        let mut ranges = Vec::with_capacity(config.num_points);
        for n in 0..config.num_points {
            let a = config.beam_angle(n);
            let dir = [a.cos(), a.sin()];
            let mut r = ray_walls(dir, spec.room);
            for c in &circles {
                if let Some(hit) = ray_circle(dir, c) {
                    r = r.min(hit);
                }
            }
            if spec.noise_sigma > 0.0 {
                // Box-Muller from two uniform draws keeps the dependency
                // surface small and the draw count per beam fixed.
                let u1: f64 = rng.gen::<f64>().max(1e-18);
                let u2: f64 = rng.gen::<f64>();
                let g = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
                r += spec.noise_sigma * g;
            }
            ranges.push(r);
        }

        scans.push(Scan {
            ranges: sanitize_scan(&ranges, config),
            timestamp: t,
            sequence_index: k as i64,
        });
        annotations.push(Some(
            centers.into_iter().map(|center| Annotation { center }).collect(),
        ));
    }
    ScanSequence::new(*config, scans, annotations)
}

/// Renders the same scene at two angular resolutions.
///
/// The configs must differ only in `num_points`; use zero noise when the
/// outputs are compared against each other.
pub fn render_dual_resolution(
    spec: &SceneSpec,
    config_a: &LidarConfig,
    config_b: &LidarConfig,
) -> Result<(ScanSequence, ScanSequence)> {
    if config_a.fov != config_b.fov || config_a.max_range != config_b.max_range {
        return Err(Error::Validation(
            "dual-resolution configs must differ only in num_points".into(),
        ));
    }
    Ok((
        render_sequence(spec, config_a)?,
        render_sequence(spec, config_b)?,
    ))
}
