//! Boundary partitions compatible with the damping field.
//!
//! The damped part must satisfy m·ν ≥ 0, the clamped part m·ν ≤ 0, the
//! clamped part must carry positive measure, and at every point where the
//! two parts meet the conormal pointing out of the damped part must satisfy
//! m·n ≤ 0.

use serde::Serialize;

use super::domain::{BoundarySample, Domain, GeometryError, SegmentId};
use super::field::{m_dot_nu, VectorFieldSpec};

pub const SIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryTag {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaggedSample {
    pub pos: [f64; 2],
    pub nu: [f64; 2],
    pub m_dot_nu: f64,
    pub weight: f64,
    pub segment: SegmentId,
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentSummary {
    pub id: SegmentId,
    pub tag: BoundaryTag,
    pub length: f64,
    pub min_m_dot_nu: f64,
    pub max_m_dot_nu: f64,
    /// Angle range for disk arcs, in radians.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle_range: Option<(f64, f64)>,
}

/// A point where the damped and clamped parts meet. `conormal` points out of
/// the damped part along the boundary.
#[derive(Debug, Clone, Serialize)]
pub struct InterfacePoint {
    pub pos: [f64; 2],
    pub conormal: [f64; 2],
    pub m_dot_conormal: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryPartition {
    pub samples: Vec<TaggedSample>,
    pub segments: Vec<SegmentSummary>,
    pub interfaces: Vec<InterfacePoint>,
    pub dirichlet_measure: f64,
    pub neumann_measure: f64,
    pub deviations: Vec<String>,
}

impl BoundaryPartition {
    pub fn tag_of(&self, id: SegmentId) -> Option<BoundaryTag> {
        self.segments.iter().find(|s| s.id == id).map(|s| s.tag)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    /// Worst m·ν over Dirichlet samples (should be ≤ tol) and worst −m·ν
    /// over Neumann samples (should be ≤ tol), as signed violations.
    pub worst_dirichlet_violation: f64,
    pub worst_neumann_violation: f64,
    pub worst_interface_violation: f64,
    pub dirichlet_measure: f64,
    pub violations: usize,
    pub passed: bool,
}

fn tag_samples(
    spec: &VectorFieldSpec,
    samples: &[BoundarySample],
    tags: impl Fn(&BoundarySample, f64) -> BoundaryTag,
) -> Result<Vec<TaggedSample>, GeometryError> {
    samples
        .iter()
        .map(|s| {
            let dim = spec.dim();
            let v = m_dot_nu(spec, &s.pos[..dim], &s.nu[..dim])?;
            Ok(TaggedSample {
                pos: s.pos,
                nu: s.nu,
                m_dot_nu: v,
                weight: s.weight,
                segment: s.segment,
                tag: tags(s, v),
            })
        })
        .collect()
}

fn domain_deviations(dom: &Domain) -> Vec<String> {
    match dom {
        Domain::Interval1D { .. } => vec!["one-dimensional domain".into()],
        Domain::Rectangle2D { .. } => vec!["rectangle corners are not smooth".into()],
        Domain::Disk2D { .. } => vec![],
    }
}

/// Proposes the partition {m·ν > 0} → damped, {m·ν ≤ 0} → clamped, snapped
/// to whole segments (edges, endpoints, or maximal disk arcs). Samples with
/// m·ν = 0 go to the damped side; they carry no damping weight.
pub fn partition_boundary(
    spec: &VectorFieldSpec,
    dom: &Domain,
    resolution: f64,
) -> Result<BoundaryPartition, GeometryError> {
    dom.validate()?;
    let scale = spec_scale(spec, dom);
    let tol = SIGN_TOL * scale.max(1.0);
    let samples = dom.boundary_samples(resolution);

    match dom {
        Domain::Disk2D { .. } => propose_disk(spec, dom, &samples, tol),
        _ => {
            // decide each fixed segment from its samples
            let evaluated = tag_samples(spec, &samples, |_, v| {
                if v > tol {
                    BoundaryTag::Neumann
                } else {
                    BoundaryTag::Dirichlet
                }
            })?;
            let mut segments = Vec::new();
            for id in dom.fixed_segments() {
                let seg: Vec<&TaggedSample> =
                    evaluated.iter().filter(|s| s.segment == id).collect();
                let min = seg.iter().map(|s| s.m_dot_nu).fold(f64::INFINITY, f64::min);
                let max = seg.iter().map(|s| s.m_dot_nu).fold(f64::NEG_INFINITY, f64::max);
                let tag = if min >= -tol {
                    BoundaryTag::Neumann
                } else if max <= tol {
                    BoundaryTag::Dirichlet
                } else {
                    return Err(GeometryError::MixedSignSegment(id.to_string()));
                };
                let length = seg.iter().map(|s| s.weight).sum();
                segments.push(SegmentSummary {
                    id,
                    tag,
                    length,
                    min_m_dot_nu: min,
                    max_m_dot_nu: max,
                    angle_range: None,
                });
            }
            finish_fixed(spec, dom, samples, segments)
        }
    }
}

/// Builds a partition from explicit segment tags and verifies nothing here;
/// run `verify_partition` on the result to audit the sign conditions.
pub fn partition_from_tags(
    spec: &VectorFieldSpec,
    dom: &Domain,
    resolution: f64,
    dirichlet: &[SegmentId],
    neumann: &[SegmentId],
) -> Result<BoundaryPartition, GeometryError> {
    dom.validate()?;
    let fixed = dom.fixed_segments();
    if fixed.is_empty() {
        return Err(GeometryError::InvalidDomain(
            "explicit partitions need named segments; disks support only automatic partitioning"
                .into(),
        ));
    }
    for id in dirichlet.iter().chain(neumann) {
        if !fixed.contains(id) {
            return Err(GeometryError::UnknownSegment(id.to_string()));
        }
    }
    let samples = dom.boundary_samples(resolution);
    let mut segments = Vec::new();
    for id in fixed {
        let tag = if dirichlet.contains(&id) {
            BoundaryTag::Dirichlet
        } else if neumann.contains(&id) {
            BoundaryTag::Neumann
        } else {
            return Err(GeometryError::UnknownSegment(format!("{id} left untagged")));
        };
        let seg_samples: Vec<&BoundarySample> =
            samples.iter().filter(|s| s.segment == id).collect();
        let dim = spec.dim();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for s in &seg_samples {
            let v = m_dot_nu(spec, &s.pos[..dim], &s.nu[..dim])?;
            min = min.min(v);
            max = max.max(v);
        }
        segments.push(SegmentSummary {
            id,
            tag,
            length: seg_samples.iter().map(|s| s.weight).sum(),
            min_m_dot_nu: min,
            max_m_dot_nu: max,
            angle_range: None,
        });
    }
    finish_fixed(spec, dom, samples, segments)
}

fn finish_fixed(
    spec: &VectorFieldSpec,
    dom: &Domain,
    samples: Vec<BoundarySample>,
    segments: Vec<SegmentSummary>,
) -> Result<BoundaryPartition, GeometryError> {
    let tag_for = |id: SegmentId| {
        segments.iter().find(|s| s.id == id).map(|s| s.tag).unwrap_or(BoundaryTag::Dirichlet)
    };
    let tagged = tag_samples(spec, &samples, |s, _| tag_for(s.segment))?;
    let dirichlet_measure: f64 =
        segments.iter().filter(|s| s.tag == BoundaryTag::Dirichlet).map(|s| s.length).sum();
    let neumann_measure: f64 =
        segments.iter().filter(|s| s.tag == BoundaryTag::Neumann).map(|s| s.length).sum();
    if dirichlet_measure <= 0.0 {
        return Err(GeometryError::EmptyDirichlet);
    }
    let interfaces = rectangle_interfaces(spec, dom, &segments)?;
    Ok(BoundaryPartition {
        samples: tagged,
        segments,
        interfaces,
        dirichlet_measure,
        neumann_measure,
        deviations: domain_deviations(dom),
    })
}

/// Interface points between differently-tagged rectangle edges: the shared
/// corners. The conormal is the outward tangent of the damped edge, which at
/// a corner is simply the edge direction leaving the edge's interior.
fn rectangle_interfaces(
    spec: &VectorFieldSpec,
    dom: &Domain,
    segments: &[SegmentSummary],
) -> Result<Vec<InterfacePoint>, GeometryError> {
    let Domain::Rectangle2D { x_min, x_max, y_min, y_max } = *dom else {
        return Ok(Vec::new()); // 1-D boundaries are isolated points: no interfaces
    };
    let tag_of = |id: SegmentId| segments.iter().find(|s| s.id == id).map(|s| s.tag);
    // corner → (edge a, conormal of a at corner, edge b, conormal of b)
    let corners = [
        ([x_min, y_min], SegmentId::Left, [0.0, -1.0], SegmentId::Bottom, [-1.0, 0.0]),
        ([x_min, y_max], SegmentId::Left, [0.0, 1.0], SegmentId::Top, [-1.0, 0.0]),
        ([x_max, y_min], SegmentId::Right, [0.0, -1.0], SegmentId::Bottom, [1.0, 0.0]),
        ([x_max, y_max], SegmentId::Right, [0.0, 1.0], SegmentId::Top, [1.0, 0.0]),
    ];
    let mut out = Vec::new();
    let scale = spec_scale(spec, dom);
    for (pos, ea, ca, eb, cb) in corners {
        let (Some(ta), Some(tb)) = (tag_of(ea), tag_of(eb)) else { continue };
        if ta == tb {
            continue;
        }
        let conormal = if ta == BoundaryTag::Neumann { ca } else { cb };
        let v = m_dot_nu(spec, &pos, &conormal)?;
        out.push(InterfacePoint {
            pos,
            conormal,
            m_dot_conormal: v,
            ok: v <= SIGN_TOL * scale.max(1.0),
        });
    }
    Ok(out)
}

fn propose_disk(
    spec: &VectorFieldSpec,
    dom: &Domain,
    samples: &[BoundarySample],
    tol: f64,
) -> Result<BoundaryPartition, GeometryError> {
    let tagged = tag_samples(spec, samples, |_, v| {
        if v > tol {
            BoundaryTag::Neumann
        } else {
            BoundaryTag::Dirichlet
        }
    })?;
    // group circular runs of equal tag into arcs
    let n = tagged.len();
    let first_tag = tagged[0].tag;
    let mut start = 0usize;
    // rotate so index 0 starts a run
    while start < n && tagged[(start + n - 1) % n].tag == first_tag && tagged[start].tag == first_tag
    {
        if start == 0 && tagged[n - 1].tag != first_tag {
            break;
        }
        if tagged.iter().all(|s| s.tag == first_tag) {
            break;
        }
        start += 1;
        if tagged[start % n].tag != first_tag {
            break;
        }
    }
    let uniform = tagged.iter().all(|s| s.tag == first_tag);
    let mut segments = Vec::new();
    let mut interfaces = Vec::new();
    let mut sample_tags = tagged.clone();
    if uniform {
        segments.push(SegmentSummary {
            id: SegmentId::Arc(0),
            tag: first_tag,
            length: tagged.iter().map(|s| s.weight).sum(),
            min_m_dot_nu: tagged.iter().map(|s| s.m_dot_nu).fold(f64::INFINITY, f64::min),
            max_m_dot_nu: tagged.iter().map(|s| s.m_dot_nu).fold(f64::NEG_INFINITY, f64::max),
            angle_range: Some((0.0, 2.0 * std::f64::consts::PI)),
        });
        for (s, t) in sample_tags.iter_mut().zip(segments.iter().cycle()) {
            s.segment = t.id;
        }
    } else {
        // walk the circle from a run boundary
        let mut run_start = start % n;
        let mut arc_idx = 0usize;
        let mut visited = 0usize;
        while visited < n {
            let tag = tagged[run_start].tag;
            let mut len = 0usize;
            while len < n && tagged[(run_start + len) % n].tag == tag {
                len += 1;
            }
            let idxs: Vec<usize> = (0..len).map(|o| (run_start + o) % n).collect();
            let weight: f64 = idxs.iter().map(|&i| tagged[i].weight).sum();
            let theta0 = tagged[idxs[0]].nu[1].atan2(tagged[idxs[0]].nu[0]);
            let theta1 = tagged[*idxs.last().unwrap()].nu[1].atan2(tagged[*idxs.last().unwrap()].nu[0]);
            let id = SegmentId::Arc(arc_idx);
            for &i in &idxs {
                sample_tags[i].segment = id;
            }
            segments.push(SegmentSummary {
                id,
                tag,
                length: weight,
                min_m_dot_nu: idxs.iter().map(|&i| tagged[i].m_dot_nu).fold(f64::INFINITY, f64::min),
                max_m_dot_nu: idxs
                    .iter()
                    .map(|&i| tagged[i].m_dot_nu)
                    .fold(f64::NEG_INFINITY, f64::max),
                angle_range: Some((theta0, theta1)),
            });
            arc_idx += 1;
            visited += len;
            run_start = (run_start + len) % n;
        }
        // interfaces sit between consecutive arcs; conormal is the tangent
        // leaving the damped arc
        let scale = spec_scale(spec, dom);
        for w in 0..segments.len() {
            let cur = &segments[w];
            let next = &segments[(w + 1) % segments.len()];
            if cur.tag == next.tag {
                continue;
            }
            let (damped, theta, dir) = if cur.tag == BoundaryTag::Neumann {
                (cur, cur.angle_range.unwrap().1, 1.0)
            } else {
                (next, next.angle_range.unwrap().0, -1.0)
            };
            let _ = damped;
            let Domain::Disk2D { center, radius } = *dom else { unreachable!() };
            let pos = [center[0] + radius * theta.cos(), center[1] + radius * theta.sin()];
            let conormal = [-dir * theta.sin(), dir * theta.cos()];
            let v = m_dot_nu(spec, &pos, &conormal)?;
            interfaces.push(InterfacePoint {
                pos,
                conormal,
                m_dot_conormal: v,
                ok: v <= SIGN_TOL * scale.max(1.0),
            });
        }
    }
    let dirichlet_measure: f64 =
        segments.iter().filter(|s| s.tag == BoundaryTag::Dirichlet).map(|s| s.length).sum();
    let neumann_measure: f64 =
        segments.iter().filter(|s| s.tag == BoundaryTag::Neumann).map(|s| s.length).sum();
    if dirichlet_measure <= 0.0 {
        return Err(GeometryError::EmptyDirichlet);
    }
    Ok(BoundaryPartition {
        samples: sample_tags,
        segments,
        interfaces,
        dirichlet_measure,
        neumann_measure,
        deviations: domain_deviations(dom),
    })
}

/// Re-checks the sign conditions and the interface condition for a given
/// partition. Violations are reported, never thrown.
pub fn verify_partition(
    spec: &VectorFieldSpec,
    dom: &Domain,
    part: &BoundaryPartition,
) -> PartitionReport {
    let scale = spec_scale(spec, dom);
    let tol = SIGN_TOL * scale.max(1.0);
    let mut worst_d = 0.0f64;
    let mut worst_n = 0.0f64;
    let mut violations = 0usize;
    for s in &part.samples {
        match s.tag {
            BoundaryTag::Dirichlet => {
                let v = s.m_dot_nu; // must be ≤ tol
                if v > tol {
                    violations += 1;
                }
                worst_d = worst_d.max(v);
            }
            BoundaryTag::Neumann => {
                let v = -s.m_dot_nu; // must be ≤ tol
                if v > tol {
                    violations += 1;
                }
                worst_n = worst_n.max(v);
            }
        }
    }
    let worst_interface =
        part.interfaces.iter().map(|i| i.m_dot_conormal).fold(0.0f64, f64::max);
    let interface_bad = part.interfaces.iter().filter(|i| i.m_dot_conormal > tol).count();
    PartitionReport {
        worst_dirichlet_violation: worst_d,
        worst_neumann_violation: worst_n,
        worst_interface_violation: worst_interface,
        dirichlet_measure: part.dirichlet_measure,
        violations: violations + interface_bad,
        passed: violations + interface_bad == 0 && part.dirichlet_measure > 0.0,
    }
}

/// Crude magnitude of m over the domain, for sign tolerances.
fn spec_scale(spec: &VectorFieldSpec, dom: &Domain) -> f64 {
    match spec {
        VectorFieldSpec::Affine { a, .. } => {
            let mut norm = 0.0f64;
            for i in 0..a.n {
                for j in 0..a.n {
                    norm = norm.max(a.get(i, j).abs());
                }
            }
            norm * dom.diameter()
        }
        VectorFieldSpec::Perturbed { d, .. } => d * dom.diameter(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::field::MatN;

    fn radial(x0: Vec<f64>, n: usize) -> VectorFieldSpec {
        VectorFieldSpec::affine(MatN::identity(n), x0).unwrap()
    }

    #[test]
    fn rectangle_partition_by_edge_signs() {
        let dom = Domain::Rectangle2D { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0 };
        // m = x - (-0.5, 0.5): left edge has m·ν = -0.5 → Dirichlet, others damped
        let spec = radial(vec![-0.5, 0.5], 2);
        let part = partition_boundary(&spec, &dom, 32.0).unwrap();
        assert_eq!(part.tag_of(SegmentId::Left), Some(BoundaryTag::Dirichlet));
        assert_eq!(part.tag_of(SegmentId::Right), Some(BoundaryTag::Neumann));
        assert_eq!(part.tag_of(SegmentId::Bottom), Some(BoundaryTag::Neumann));
        assert_eq!(part.tag_of(SegmentId::Top), Some(BoundaryTag::Neumann));
        assert!((part.dirichlet_measure - 1.0).abs() < 1e-12);
        // interfaces at the two left corners; conormal points out of the damped edge
        assert_eq!(part.interfaces.len(), 2);
        let report = verify_partition(&spec, &dom, &part);
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn radial_field_on_disk_has_no_dirichlet_part() {
        let dom = Domain::Disk2D { center: [0.2, 0.1], radius: 1.0 };
        let spec = radial(vec![0.2, 0.1], 2);
        assert!(matches!(
            partition_boundary(&spec, &dom, 32.0),
            Err(GeometryError::EmptyDirichlet)
        ));
    }

    #[test]
    fn interval_partition_from_field_signs() {
        let dom = Domain::Interval1D { x_left: 0.0, x_right: 1.0 };
        // m = x + 0.25: at x=0, m·ν = -0.25 → Dirichlet; at x=1, 1.25 → damped
        let spec = radial(vec![-0.25], 1);
        let part = partition_boundary(&spec, &dom, 8.0).unwrap();
        assert_eq!(part.tag_of(SegmentId::Left), Some(BoundaryTag::Dirichlet));
        assert_eq!(part.tag_of(SegmentId::Right), Some(BoundaryTag::Neumann));
        assert!(part.interfaces.is_empty());
        assert!(verify_partition(&spec, &dom, &part).passed);
    }

    #[test]
    fn swapped_tags_fail_verification() {
        let dom = Domain::Interval1D { x_left: 0.0, x_right: 1.0 };
        let spec = radial(vec![-0.25], 1);
        let part = partition_from_tags(
            &spec,
            &dom,
            8.0,
            &[SegmentId::Right],
            &[SegmentId::Left],
        )
        .unwrap();
        let report = verify_partition(&spec, &dom, &part);
        assert!(!report.passed);
        assert!(report.violations >= 2);
    }

    #[test]
    fn disk_with_offset_center_splits_into_arcs() {
        let dom = Domain::Disk2D { center: [0.0, 0.0], radius: 1.0 };
        // m = x - (2, 0): m·ν = cosθ·(cosθ-2) + sin²θ = 1 - 2cosθ → sign change
        let spec = radial(vec![2.0, 0.0], 2);
        let part = partition_boundary(&spec, &dom, 64.0).unwrap();
        assert!(part.segments.len() >= 2);
        assert!(part.dirichlet_measure > 0.0);
        assert!(part.neumann_measure > 0.0);
        assert!(!part.interfaces.is_empty());
    }
}
