//! Multiplier-field geometry: domains, admissibility constants, and
//! boundary partitions compatible with the damping direction.

mod domain;
mod field;
mod partition;

pub use domain::{BoundarySample, Domain, GeometryError, SegmentId};
pub use field::{
    check_admissibility, field_eval, m_dot_nu, AdmissibilityReport, FieldEval, MatN, SampledField,
    VectorFieldSpec,
};
pub use partition::{
    partition_boundary, partition_from_tags, verify_partition, BoundaryPartition, BoundaryTag,
    InterfacePoint, PartitionReport, SegmentSummary, TaggedSample, SIGN_TOL,
};
