//! Poisson point fields with Rayleigh fading marks, and the shot noise they produce.
//!
//! The plane is truncated to a [`SimulationRegion`] disk. Node layout is fixed: the relay
//! sits at the origin, the source at `(-d_sr, 0)` and the destination at `(d_rd, 0)`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance_squared(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_squared(other).sqrt()
    }
}

/// Which transmitter population a field represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitterClass {
    /// Co-channel interferers (Φ), seen by the relay and the destination in active mode.
    Interferer,
    /// High-power ambient carrier emitters (Ψ), the energy and backscatter source.
    CarrierEmitter,
}

/// Disk inside which point fields are simulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationRegion {
    center: Point,
    radius: f64,
}

impl SimulationRegion {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("r_max", format!("radius must be positive and finite, got {radius}")));
        }
        Ok(SimulationRegion { center, radius })
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.center.distance_squared(p) <= self.radius * self.radius
    }

    /// Uniform point in the disk.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let r = self.radius * rng.random::<f64>().sqrt();
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        Point {
            x: self.center.x + r * theta.cos(),
            y: self.center.y + r * theta.sin(),
        }
    }
}

/// One realization of a marked PPP: positions plus one unit-mean exponential power gain per point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointField {
    class: EmitterClass,
    region: SimulationRegion,
    points: Vec<Point>,
    marks: Vec<f64>,
}

impl PointField {
    /// Builds a field from explicit points and marks. Used for hand-constructed scenarios.
    pub fn from_parts(
        class: EmitterClass,
        region: SimulationRegion,
        points: Vec<Point>,
        marks: Vec<f64>,
    ) -> Result<Self> {
        if points.len() != marks.len() {
            return Err(Error::invalid(
                "marks",
                format!("{} points but {} marks", points.len(), marks.len()),
            ));
        }
        if let Some(m) = marks.iter().find(|m| !(**m >= 0.0)) {
            return Err(Error::invalid("marks", format!("fading gain {m} is negative")));
        }
        if let Some(p) = points.iter().find(|p| !region.contains(p)) {
            return Err(Error::invalid(
                "points",
                format!("({}, {}) lies outside the simulation disk", p.x, p.y),
            ));
        }
        Ok(PointField {
            class,
            region,
            points,
            marks,
        })
    }

    pub fn empty(class: EmitterClass, region: SimulationRegion) -> Self {
        PointField {
            class,
            region,
            points: Vec::new(),
            marks: Vec::new(),
        }
    }

    pub fn class(&self) -> EmitterClass {
        self.class
    }

    pub fn region(&self) -> &SimulationRegion {
        &self.region
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn marks(&self) -> &[f64] {
        &self.marks
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same points, fresh independent fading marks (the field as seen by a second receiver).
    pub fn with_fresh_marks<R: Rng + ?Sized>(&self, rng: &mut R) -> PointField {
        PointField {
            class: self.class,
            region: self.region,
            points: self.points.clone(),
            marks: self.points.iter().map(|_| Exp1.sample(rng)).collect(),
        }
    }

    /// Splits the field in two by a predicate on the points.
    pub fn partition(&self, mut pred: impl FnMut(&Point) -> bool) -> (PointField, PointField) {
        let mut a = PointField::empty(self.class, self.region);
        let mut b = PointField::empty(self.class, self.region);
        for (p, m) in self.points.iter().zip(&self.marks) {
            let side = if pred(p) { &mut a } else { &mut b };
            side.points.push(*p);
            side.marks.push(*m);
        }
        (a, b)
    }
}

/// Samples a homogeneous PPP of the given density (points per m²) on the region, with
/// Rayleigh fading power marks.
pub fn sample_ppp<R: Rng + ?Sized>(
    density: f64,
    region: SimulationRegion,
    class: EmitterClass,
    rng: &mut R,
) -> Result<PointField> {
    if !(density >= 0.0 && density.is_finite()) {
        return Err(Error::invalid("density", format!("must be nonnegative and finite, got {density}")));
    }
    let mean = density * region.area();
    if mean == 0.0 {
        return Ok(PointField::empty(class, region));
    }
    let count = Poisson::new(mean)
        .map_err(|e| Error::invalid("density", e.to_string()))?
        .sample(rng) as usize;
    let mut points = Vec::with_capacity(count);
    let mut marks = Vec::with_capacity(count);
    for _ in 0..count {
        points.push(region.sample_point(rng));
        marks.push(Exp1.sample(rng));
    }
    Ok(PointField {
        class,
        region,
        points,
        marks,
    })
}

/// Aggregate received power `tx_power * sum(mark * d^-exponent)` at `receiver`.
pub fn shot_noise(field: &PointField, receiver: Point, tx_power: f64, path_loss_exp: f64) -> Result<f64> {
    if !(path_loss_exp > 2.0) {
        return Err(Error::NonIntegrablePathLoss {
            exponent: path_loss_exp,
        });
    }
    let half = -0.5 * path_loss_exp;
    let mut sum = 0.0;
    for (p, m) in field.points.iter().zip(&field.marks) {
        let d2 = p.distance_squared(&receiver);
        if d2 == 0.0 {
            return Err(Error::SingularDistance { x: p.x, y: p.y });
        }
        sum += m * path_gain_sq(d2, half);
    }
    Ok(tx_power * sum)
}

/// `d2^half` with fast paths for the integer exponents used in practice.
#[inline]
fn path_gain_sq(d2: f64, half: f64) -> f64 {
    if half == -2.0 {
        1.0 / (d2 * d2)
    } else if half == -1.5 {
        1.0 / (d2 * d2.sqrt())
    } else {
        d2.powf(half)
    }
}
