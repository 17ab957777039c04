//! Planar geometric optics through a unit-radius sphere with signed
//! refractive indices. A left-handed medium gets a negative index, so rays
//! entering it refract to the same side of the normal.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::medium::{classify_handedness, HandednessClass, Medium};

/// Length of the free segments drawn before the sphere is hit and after exit.
const FREE_RUN: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Vec2 {
        self * (1.0 / self.norm())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// `sign · √(Re ε · Re μ)` with sign `-1` for left-handed media.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedIndex {
    value: f64,
}

impl SignedIndex {
    pub fn of(medium: &Medium) -> Result<Self> {
        let sign = match classify_handedness(medium).class {
            HandednessClass::RightHanded => 1.0,
            HandednessClass::LeftHanded => -1.0,
            HandednessClass::Mixed => return Err(Error::MixedHandedness),
        };
        let magnitude = (medium.epsilon().re * medium.mu().re).sqrt();
        Ok(Self {
            value: sign * magnitude,
        })
    }

    pub fn new(value: f64) -> Result<Self> {
        if value == 0.0 || !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "index must be finite and nonzero, got {value}"
            )));
        }
        Ok(Self { value })
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec2,
    direction: Vec2,
}

impl Ray {
    pub fn new(origin: Vec2, direction: Vec2) -> Result<Self> {
        let len = direction.norm();
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::InvalidParameter("ray direction must be nonzero".into()));
        }
        Ok(Self {
            origin,
            direction: direction * (1.0 / len),
        })
    }

    pub fn direction(&self) -> Vec2 {
        self.direction
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Exited,
    MaxBounces,
    TotalInternalReflection,
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::Exited => "exited",
            Termination::MaxBounces => "max_bounces",
            Termination::TotalInternalReflection => "total_internal_reflection",
        }
    }
}

/// What happened where a path met the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceEvent {
    pub point: Vec2,
    /// Unit normal pointing back into the incident medium.
    pub normal: Vec2,
    pub incident: Vec2,
    pub outgoing: Vec2,
    pub n_from: f64,
    pub n_to: f64,
    pub reflected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayPath {
    pub points: Vec<Vec2>,
    pub events: Vec<InterfaceEvent>,
    pub termination: Termination,
}

impl RayPath {
    /// Interior segments, in order.
    pub fn chords(&self) -> Vec<(Vec2, Vec2)> {
        self.events.windows(2).map(|w| (w[0].point, w[1].point)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Refraction {
    Transmitted(Vec2),
    TotalInternalReflection,
}

/// Signed Snell's law: the tangential component scales by `n_from / n_to`,
/// so an index sign change flips it. `normal` must face the incoming ray.
pub fn refract(dir: Vec2, normal: Vec2, n_from: SignedIndex, n_to: SignedIndex) -> Result<Refraction> {
    let cos_i = -dir.dot(normal);
    if !(cos_i > 0.0) {
        return Err(Error::InvalidParameter(
            "ray must approach the interface against the normal".into(),
        ));
    }
    let r = n_from.value / n_to.value;
    let tangential = dir + normal * cos_i;
    let sin_t2 = r * r * tangential.dot(tangential);
    if sin_t2 > 1.0 {
        return Ok(Refraction::TotalInternalReflection);
    }
    Ok(Refraction::Transmitted(tangential * r - normal * (1.0 - sin_t2).sqrt()))
}

fn reflect(dir: Vec2, normal: Vec2) -> Vec2 {
    dir - normal * (2.0 * dir.dot(normal))
}

/// Forward distance from `origin` to the unit circle, if the ray meets it.
fn hit_distance(origin: Vec2, dir: Vec2) -> Option<f64> {
    let b = origin.dot(dir);
    let c = origin.dot(origin) - 1.0;
    let disc = b * b - c;
    if disc <= 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let near = -b - root;
    let far = -b + root;
    if near > 1e-12 {
        Some(near)
    } else if far > 1e-12 {
        Some(far)
    } else {
        None
    }
}

/// Follows a ray from outside the sphere through every interface until it
/// leaves, or until `max_bounces` internal reflections have occurred.
pub fn trace_ray(ray: &Ray, interior: SignedIndex, exterior: SignedIndex, max_bounces: u32) -> RayPath {
    let mut points = vec![ray.origin];
    let mut events = Vec::new();
    let mut dir = ray.direction;

    let Some(t) = hit_distance(ray.origin, dir) else {
        points.push(ray.origin + dir * FREE_RUN);
        return RayPath {
            points,
            events,
            termination: Termination::Exited,
        };
    };
    let mut at = (ray.origin + dir * t).normalized();
    points.push(at);
    let normal = at;
    match refract(dir, normal, exterior, interior).expect("entering ray faces the surface") {
        Refraction::Transmitted(out) => {
            events.push(InterfaceEvent {
                point: at,
                normal,
                incident: dir,
                outgoing: out,
                n_from: exterior.value,
                n_to: interior.value,
                reflected: false,
            });
            dir = out;
        }
        Refraction::TotalInternalReflection => {
            let out = reflect(dir, normal);
            events.push(InterfaceEvent {
                point: at,
                normal,
                incident: dir,
                outgoing: out,
                n_from: exterior.value,
                n_to: exterior.value,
                reflected: true,
            });
            points.push(at + out * FREE_RUN);
            return RayPath {
                points,
                events,
                termination: Termination::TotalInternalReflection,
            };
        }
    }

    let mut bounces = 0;
    loop {
        // Chord of the unit circle starting on it.
        let length = -2.0 * at.dot(dir);
        at = (at + dir * length).normalized();
        points.push(at);
        let normal = -at;
        match refract(dir, normal, interior, exterior).expect("interior ray faces the surface") {
            Refraction::Transmitted(out) => {
                events.push(InterfaceEvent {
                    point: at,
                    normal,
                    incident: dir,
                    outgoing: out,
                    n_from: interior.value,
                    n_to: exterior.value,
                    reflected: false,
                });
                points.push(at + out * FREE_RUN);
                return RayPath {
                    points,
                    events,
                    termination: Termination::Exited,
                };
            }
            Refraction::TotalInternalReflection => {
                let out = reflect(dir, normal);
                events.push(InterfaceEvent {
                    point: at,
                    normal,
                    incident: dir,
                    outgoing: out,
                    n_from: interior.value,
                    n_to: interior.value,
                    reflected: true,
                });
                dir = out;
                bounces += 1;
                if bounces >= max_bounces {
                    let termination = if max_bounces == 0 {
                        Termination::TotalInternalReflection
                    } else {
                        Termination::MaxBounces
                    };
                    return RayPath {
                        points,
                        events,
                        termination,
                    };
                }
            }
        }
    }
}

/// Traces `fan_count` rays from `source`, spread evenly (at cell centres)
/// over the cone that subtends the sphere.
pub fn trace_fan(
    source: Vec2,
    interior: &Medium,
    exterior: &Medium,
    fan_count: u32,
    max_bounces: u32,
) -> Result<Vec<RayPath>> {
    if fan_count == 0 {
        return Err(Error::InvalidParameter("fan_count must be >= 1".into()));
    }
    let distance = source.norm();
    if !(distance > 1.0 && distance.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "source must lie outside the unit sphere, got |source| = {distance}"
        )));
    }
    let n_in = SignedIndex::of(interior)?;
    let n_out = SignedIndex::of(exterior)?;
    let axis = (-source).normalized();
    let half = (1.0 / distance).asin();
    (0..fan_count)
        .map(|i| {
            let angle = half * ((2 * i + 1) as f64 / fan_count as f64 - 1.0);
            let (s, c) = angle.sin_cos();
            let dir = Vec2::new(axis.x * c - axis.y * s, axis.x * s + axis.y * c);
            Ok(trace_ray(&Ray::new(source, dir)?, n_in, n_out, max_bounces))
        })
        .collect()
}

/// Grid resolution of [`focusing_metric`] per axis.
pub const METRIC_GRID: usize = 201;

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).norm()
}

/// How tightly the first interior chords of a fan bunch together: the
/// smallest RMS distance from any point of the disk to all chords. A fan that
/// crosses near one point scores low; a spreading fan scores high.
pub fn focusing_metric(paths: &[RayPath]) -> Option<f64> {
    let chords: Vec<(Vec2, Vec2)> = paths.iter().filter_map(|p| p.chords().first().copied()).collect();
    if chords.len() < 2 {
        return None;
    }
    let mut best = f64::INFINITY;
    let step = 2.0 / (METRIC_GRID - 1) as f64;
    for i in 0..METRIC_GRID {
        for j in 0..METRIC_GRID {
            let p = Vec2::new(-1.0 + step * i as f64, -1.0 + step * j as f64);
            if p.dot(p) >= 1.0 {
                continue;
            }
            let mean_sq = chords
                .iter()
                .map(|&(a, b)| segment_distance(p, a, b).powi(2))
                .sum::<f64>()
                / chords.len() as f64;
            best = best.min(mean_sq.sqrt());
        }
    }
    Some(best)
}
