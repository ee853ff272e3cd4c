//! Uniform finite-difference grids over intervals and rectangles, with
//! boundary nodes carrying exact damping coefficients.

use thiserror::Error;

use crate::geometry::{
    field_eval, BoundaryPartition, BoundaryTag, Domain, GeometryError, SegmentId, VectorFieldSpec,
};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("unsupported domain for the grid solver: {0}")]
    UnsupportedDomain(String),
    #[error("CFL violation: dt = {dt} exceeds the stability bound {bound}")]
    CflViolation { dt: f64, bound: f64 },
    #[error("delay under-resolved: atom at tau = {tau} is below dt = {dt}")]
    DelayUnderResolved { tau: f64, dt: f64 },
    #[error("history buffer does not cover a requested sample (internal bug guard)")]
    HistoryExhausted,
    #[error("solution blew up at t = {t}")]
    BlowUp { t: f64 },
    #[error("bad initial data: {0}")]
    BadInitialData(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeClass {
    Interior,
    Dirichlet,
    /// Damped boundary node; payload indexes `Grid::neumann`.
    Neumann(usize),
}

/// One outward boundary direction of a node: axis, sign, and m·ν for the
/// unit normal along that direction.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryDirection {
    pub axis: usize,
    pub sign: f64,
    pub m_dot_nu: f64,
    /// Tangential quadrature weight attributed to this node on the edge
    /// whose normal this is (counting measure 1 in one dimension).
    pub surface_weight: f64,
}

#[derive(Debug, Clone)]
pub struct NeumannNode {
    pub node: usize,
    pub pos: [f64; 2],
    pub directions: Vec<BoundaryDirection>,
    /// Σ over directions of m·ν / h_axis — the implicit-solve coefficient.
    pub gamma_coef: f64,
    /// Σ over directions of surface_weight · m·ν — the energy weight.
    pub damping_surface: f64,
}

#[derive(Debug, Clone)]
pub struct Grid {
    pub domain: Domain,
    pub dim: usize,
    pub origin: [f64; 2],
    pub h: [f64; 2],
    /// Nodes per axis; `shape[1] == 1` in one dimension.
    pub shape: [usize; 2],
    pub node_class: Vec<NodeClass>,
    pub neumann: Vec<NeumannNode>,
    /// Total boundary measure of the damped part seen by this grid.
    pub neumann_measure: f64,
}

impl Grid {
    pub fn node_count(&self) -> usize {
        self.shape[0] * self.shape[1]
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.shape[0] + i
    }

    pub fn position(&self, idx: usize) -> [f64; 2] {
        let i = idx % self.shape[0];
        let j = idx / self.shape[0];
        [self.origin[0] + i as f64 * self.h[0], self.origin[1] + j as f64 * self.h[1]]
    }

    /// Stability bound on dt for unit wave speed.
    pub fn cfl_bound(&self, cfl_target: f64) -> f64 {
        let mut inv = 1.0 / (self.h[0] * self.h[0]);
        if self.dim == 2 {
            inv += 1.0 / (self.h[1] * self.h[1]);
        }
        cfl_target / inv.sqrt()
    }

    pub fn build(
        domain: &Domain,
        field: &VectorFieldSpec,
        partition: &BoundaryPartition,
        h_request: f64,
    ) -> Result<Self, SolverError> {
        if !(h_request > 0.0) {
            return Err(SolverError::UnsupportedDomain("grid spacing must be positive".into()));
        }
        let (origin, extent) = match *domain {
            Domain::Interval1D { x_left, x_right } => ([x_left, 0.0], [x_right - x_left, 0.0]),
            Domain::Rectangle2D { x_min, x_max, y_min, y_max } => {
                ([x_min, y_min], [x_max - x_min, y_max - y_min])
            }
            Domain::Disk2D { .. } => {
                return Err(SolverError::UnsupportedDomain(
                    "disk domains are supported for field analysis only; the grid solver needs \
                     an interval or rectangle"
                        .into(),
                ))
            }
        };
        let dim = domain.dim();
        let mut shape = [1usize; 2];
        let mut h = [1.0f64; 2];
        for axis in 0..dim {
            let cells = ((extent[axis] / h_request).round() as usize).max(2);
            shape[axis] = cells + 1;
            h[axis] = extent[axis] / cells as f64;
        }

        let tag_of = |id: SegmentId| partition.tag_of(id).unwrap_or(BoundaryTag::Dirichlet);
        let nx = shape[0] - 1;
        let ny = shape[1] - 1;
        let n_nodes = shape[0] * shape[1];
        let mut node_class = vec![NodeClass::Interior; n_nodes];
        let mut neumann: Vec<NeumannNode> = Vec::new();

        for j in 0..shape[1] {
            for i in 0..shape[0] {
                let mut edges: Vec<(SegmentId, usize, f64)> = Vec::new(); // segment, axis, sign
                if i == 0 {
                    edges.push((SegmentId::Left, 0, -1.0));
                }
                if i == nx {
                    edges.push((SegmentId::Right, 0, 1.0));
                }
                if dim == 2 && j == 0 {
                    edges.push((SegmentId::Bottom, 1, -1.0));
                }
                if dim == 2 && j == ny {
                    edges.push((SegmentId::Top, 1, 1.0));
                }
                if edges.is_empty() {
                    continue;
                }
                let idx = j * shape[0] + i;
                // a node on any clamped edge is clamped (corners included)
                if edges.iter().any(|&(seg, _, _)| tag_of(seg) == BoundaryTag::Dirichlet) {
                    node_class[idx] = NodeClass::Dirichlet;
                    continue;
                }
                let pos = [
                    origin[0] + i as f64 * h[0],
                    origin[1] + j as f64 * h[1],
                ];
                let eval = field_eval(field, &pos[..dim])?;
                let mut directions = Vec::with_capacity(edges.len());
                let at_corner = edges.len() == 2;
                for &(_, axis, sign) in &edges {
                    let m_dot_nu = eval.m[axis] * sign;
                    let surface_weight = if dim == 1 {
                        1.0
                    } else {
                        let tang = 1 - axis;
                        let at_edge_end = if tang == 0 {
                            i == 0 || i == nx
                        } else {
                            j == 0 || j == ny
                        };
                        h[tang] * if at_edge_end && !at_corner { 0.5 } else if at_corner { 0.5 } else { 1.0 }
                    };
                    directions.push(BoundaryDirection { axis, sign, m_dot_nu, surface_weight });
                }
                let gamma_coef = directions.iter().map(|d| d.m_dot_nu / h[d.axis]).sum();
                let damping_surface =
                    directions.iter().map(|d| d.surface_weight * d.m_dot_nu).sum();
                node_class[idx] = NodeClass::Neumann(neumann.len());
                neumann.push(NeumannNode { node: idx, pos, directions, gamma_coef, damping_surface });
            }
        }

        let neumann_measure = neumann
            .iter()
            .map(|n| n.directions.iter().map(|d| d.surface_weight).sum::<f64>())
            .sum();
        Ok(Grid {
            domain: domain.clone(),
            dim,
            origin,
            h,
            shape,
            node_class,
            neumann,
            neumann_measure,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{partition_boundary, MatN};

    #[test]
    fn interval_grid_nodes() {
        let dom = Domain::Interval1D { x_left: 0.0, x_right: 1.0 };
        let spec = VectorFieldSpec::affine(MatN::identity(1), vec![-0.25]).unwrap();
        let part = partition_boundary(&spec, &dom, 8.0).unwrap();
        let grid = Grid::build(&dom, &spec, &part, 0.125).unwrap();
        assert_eq!(grid.shape, [9, 1]);
        assert_eq!(grid.node_class[0], NodeClass::Dirichlet);
        assert!(matches!(grid.node_class[8], NodeClass::Neumann(_)));
        assert_eq!(grid.neumann.len(), 1);
        // m(1)·ν = 1.25
        assert!((grid.neumann[0].damping_surface - 1.25).abs() < 1e-12);
    }

    #[test]
    fn rectangle_corner_between_tags_is_clamped() {
        let dom = Domain::Rectangle2D { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0 };
        let spec = VectorFieldSpec::affine(MatN::identity(2), vec![-0.3, -0.3]).unwrap();
        let part = partition_boundary(&spec, &dom, 32.0).unwrap();
        let grid = Grid::build(&dom, &spec, &part, 0.25).unwrap();
        // left and bottom are clamped; (right, top) damped; corner (1,1) is N-N
        let nx = grid.shape[0] - 1;
        let ny = grid.shape[1] - 1;
        assert_eq!(grid.node_class[grid.index(0, 0)], NodeClass::Dirichlet);
        assert_eq!(grid.node_class[grid.index(nx, 0)], NodeClass::Dirichlet); // right-bottom corner: bottom is D
        assert!(matches!(grid.node_class[grid.index(nx, ny)], NodeClass::Neumann(_)));
        let corner = grid
            .neumann
            .iter()
            .find(|n| n.node == grid.index(nx, ny))
            .expect("N-N corner present");
        assert_eq!(corner.directions.len(), 2);
    }
}
