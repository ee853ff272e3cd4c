//! Supported spatial domains and their boundary sampling.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("point {0:?} is outside the domain closure")]
    OutOfDomain(Vec<f64>),
    #[error("vector field is invalid: {0}")]
    InvalidField(String),
    #[error("field dimension {field} does not match domain dimension {domain}")]
    DimensionMismatch { field: usize, domain: usize },
    #[error("boundary segment {0} has both signs of m·nu; cannot snap a partition to it")]
    MixedSignSegment(String),
    #[error("m·nu > 0 on the whole boundary: the Dirichlet part would have zero measure")]
    EmptyDirichlet,
    #[error("unknown boundary segment name {0:?}")]
    UnknownSegment(String),
}

/// Names for the structural boundary pieces a partition can be snapped to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentId {
    Left,
    Right,
    Bottom,
    Top,
    /// Maximal same-sign arc of a disk boundary, indexed by discovery order.
    Arc(usize),
}

impl std::fmt::Display for SegmentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SegmentId::Left => write!(f, "left"),
            SegmentId::Right => write!(f, "right"),
            SegmentId::Bottom => write!(f, "bottom"),
            SegmentId::Top => write!(f, "top"),
            SegmentId::Arc(k) => write!(f, "arc{k}"),
        }
    }
}

impl SegmentId {
    pub fn parse(name: &str) -> Result<Self, GeometryError> {
        match name {
            "left" => Ok(SegmentId::Left),
            "right" => Ok(SegmentId::Right),
            "bottom" => Ok(SegmentId::Bottom),
            "top" => Ok(SegmentId::Top),
            other => Err(GeometryError::UnknownSegment(other.to_string())),
        }
    }
}

/// One boundary quadrature point with exact outward unit normal.
#[derive(Debug, Clone)]
pub struct BoundarySample {
    pub pos: [f64; 2],
    pub nu: [f64; 2],
    pub weight: f64,
    pub segment: SegmentId,
    /// Arc-length style coordinate along the segment, used for ordering.
    pub coord: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Interval1D { x_left: f64, x_right: f64 },
    Rectangle2D { x_min: f64, x_max: f64, y_min: f64, y_max: f64 },
    Disk2D { center: [f64; 2], radius: f64 },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval1D { .. } => 1,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let ok = match self {
            Domain::Interval1D { x_left, x_right } => x_right > x_left,
            Domain::Rectangle2D { x_min, x_max, y_min, y_max } => x_max > x_min && y_max > y_min,
            Domain::Disk2D { radius, .. } => *radius > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(GeometryError::InvalidDomain("extents must be positive".into()))
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Interval1D { x_left, x_right } => x_right - x_left,
            Domain::Rectangle2D { x_min, x_max, y_min, y_max } => {
                ((x_max - x_min).powi(2) + (y_max - y_min).powi(2)).sqrt()
            }
            Domain::Disk2D { radius, .. } => 2.0 * radius,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = 1e-9 * self.diameter();
        match self {
            Domain::Interval1D { x_left, x_right } => {
                x[0] >= x_left - tol && x[0] <= x_right + tol
            }
            Domain::Rectangle2D { x_min, x_max, y_min, y_max } => {
                x[0] >= x_min - tol && x[0] <= x_max + tol && x[1] >= y_min - tol && x[1] <= y_max + tol
            }
            Domain::Disk2D { center, radius } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                (dx * dx + dy * dy).sqrt() <= radius + tol
            }
        }
    }

    /// Fixed structural segments; a disk's arcs are discovered per field.
    pub fn fixed_segments(&self) -> Vec<SegmentId> {
        match self {
            Domain::Interval1D { .. } => vec![SegmentId::Left, SegmentId::Right],
            Domain::Rectangle2D { .. } => {
                vec![SegmentId::Left, SegmentId::Right, SegmentId::Bottom, SegmentId::Top]
            }
            Domain::Disk2D { .. } => vec![],
        }
    }

    /// Boundary quadrature points at roughly `per_unit` samples per unit
    /// length. Interval endpoints carry counting-measure weight 1.
    pub fn boundary_samples(&self, per_unit: f64) -> Vec<BoundarySample> {
        match *self {
            Domain::Interval1D { x_left, x_right } => vec![
                BoundarySample {
                    pos: [x_left, 0.0],
                    nu: [-1.0, 0.0],
                    weight: 1.0,
                    segment: SegmentId::Left,
                    coord: 0.0,
                },
                BoundarySample {
                    pos: [x_right, 0.0],
                    nu: [1.0, 0.0],
                    weight: 1.0,
                    segment: SegmentId::Right,
                    coord: 0.0,
                },
            ],
            Domain::Rectangle2D { x_min, x_max, y_min, y_max } => {
                let mut out = Vec::new();
                let edge = |seg: SegmentId,
                                start: [f64; 2],
                                end: [f64; 2],
                                nu: [f64; 2],
                                out: &mut Vec<BoundarySample>| {
                    let len = ((end[0] - start[0]).powi(2) + (end[1] - start[1]).powi(2)).sqrt();
                    let n = ((len * per_unit).ceil() as usize).max(2);
                    let h = len / n as f64;
                    for i in 0..=n {
                        let t = i as f64 / n as f64;
                        let w = if i == 0 || i == n { 0.5 * h } else { h };
                        out.push(BoundarySample {
                            pos: [
                                start[0] + t * (end[0] - start[0]),
                                start[1] + t * (end[1] - start[1]),
                            ],
                            nu,
                            weight: w,
                            segment: seg,
                            coord: t * len,
                        });
                    }
                };
                edge(SegmentId::Left, [x_min, y_min], [x_min, y_max], [-1.0, 0.0], &mut out);
                edge(SegmentId::Right, [x_max, y_min], [x_max, y_max], [1.0, 0.0], &mut out);
                edge(SegmentId::Bottom, [x_min, y_min], [x_max, y_min], [0.0, -1.0], &mut out);
                edge(SegmentId::Top, [x_min, y_max], [x_max, y_max], [0.0, 1.0], &mut out);
                out
            }
            Domain::Disk2D { center, radius } => {
                let circ = 2.0 * std::f64::consts::PI * radius;
                let n = ((circ * per_unit).ceil() as usize).max(16);
                let w = circ / n as f64;
                (0..n)
                    .map(|k| {
                        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                        let nu = [theta.cos(), theta.sin()];
                        BoundarySample {
                            pos: [center[0] + radius * nu[0], center[1] + radius * nu[1]],
                            nu,
                            weight: w,
                            segment: SegmentId::Arc(0),
                            coord: theta,
                        }
                    })
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_samples_cover_perimeter() {
        let dom = Domain::Rectangle2D { x_min: 0.0, x_max: 2.0, y_min: 0.0, y_max: 1.0 };
        let samples = dom.boundary_samples(64.0);
        let total: f64 = samples.iter().map(|s| s.weight).sum();
        assert!((total - 6.0).abs() < 1e-12);
    }

    #[test]
    fn disk_samples_cover_circumference() {
        let dom = Domain::Disk2D { center: [1.0, -0.5], radius: 0.75 };
        let samples = dom.boundary_samples(100.0);
        let total: f64 = samples.iter().map(|s| s.weight).sum();
        assert!((total - 2.0 * std::f64::consts::PI * 0.75).abs() < 1e-10);
        for s in &samples {
            let r = ((s.pos[0] - 1.0).powi(2) + (s.pos[1] + 0.5).powi(2)).sqrt();
            assert!((r - 0.75).abs() < 1e-12);
        }
    }
}
