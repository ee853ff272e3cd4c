//! Multiplier vector fields and the admissibility constants they induce.
//!
//! A field qualifies when `inf div(m) > sup(div(m) - 2λ_m)`, where `λ_m` is
//! the smallest eigenvalue of the symmetrized Jacobian. The half-difference
//! of those two numbers is the coercivity constant `c(m)`; the half-sum is
//! the multiplier coefficient `a0`.

use serde::{Deserialize, Serialize};

use super::domain::{Domain, GeometryError};

/// Small dense square matrix, dimension 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatN {
    pub n: usize,
    a: [[f64; 2]; 2],
}

impl MatN {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self, GeometryError> {
        let n = rows.len();
        if !(n == 1 || n == 2) || rows.iter().any(|r| r.len() != n) {
            return Err(GeometryError::InvalidField(format!(
                "matrix must be 1x1 or 2x2, got {n} rows"
            )));
        }
        let mut a = [[0.0; 2]; 2];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(GeometryError::InvalidField("non-finite matrix entry".into()));
                }
                a[i][j] = v;
            }
        }
        Ok(Self { n, a })
    }

    pub fn identity(n: usize) -> Self {
        let mut a = [[0.0; 2]; 2];
        for (i, row) in a.iter_mut().enumerate().take(n) {
            row[i] = 1.0;
        }
        Self { n, a }
    }

    pub fn zero(n: usize) -> Self {
        Self { n, a: [[0.0; 2]; 2] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.a[i][i]).sum()
    }

    pub fn add(&self, other: &MatN) -> MatN {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out.a[i][j] += other.a[i][j];
            }
        }
        out
    }

    pub fn scaled(&self, k: f64) -> MatN {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out.a[i][j] *= k;
            }
        }
        out
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.a[i][j] * v[j]).sum())
            .collect()
    }

    pub fn is_skew(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| (self.a[i][j] + self.a[j][i]).abs() <= 1e-12 * self.norm_inf().max(1.0))
        })
    }

    fn norm_inf(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max(self.a[i][j].abs());
            }
        }
        m
    }

    /// Smallest eigenvalue of the symmetric part (closed form for n ≤ 2).
    pub fn sym_min_eig(&self) -> f64 {
        match self.n {
            1 => self.a[0][0],
            _ => {
                let p = self.a[0][0];
                let r = self.a[1][1];
                let q = 0.5 * (self.a[0][1] + self.a[1][0]);
                0.5 * (p + r) - (0.25 * (p - r) * (p - r) + q * q).sqrt()
            }
        }
    }

    /// Spectral norm of the symmetric part.
    pub fn sym_norm(&self) -> f64 {
        match self.n {
            1 => self.a[0][0].abs(),
            _ => {
                let p = self.a[0][0];
                let r = self.a[1][1];
                let q = 0.5 * (self.a[0][1] + self.a[1][0]);
                let mid = 0.5 * (p + r);
                let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
                (mid + rad).abs().max((mid - rad).abs())
            }
        }
    }
}

impl Serialize for MatN {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> =
            (0..self.n).map(|i| (0..self.n).map(|j| self.a[i][j]).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatN {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        MatN::new(&rows).map_err(serde::de::Error::custom)
    }
}

/// A vector field sampled on a regular grid with its Jacobians, for the
/// perturbed field variant. Values between samples interpolate bilinearly.
#[derive(Debug, Clone)]
pub struct SampledField {
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<[f64; 2]>,
    pub jacobians: Vec<MatN>,
}

impl SampledField {
    fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn sample_points(&self) -> impl Iterator<Item = ([f64; 2], usize)> + '_ {
        (0..=self.ny).flat_map(move |j| {
            (0..=self.nx).map(move |i| {
                (
                    [
                        self.origin[0] + i as f64 * self.spacing[0],
                        self.origin[1] + j as f64 * self.spacing[1],
                    ],
                    self.idx(i, j),
                )
            })
        })
    }

    fn locate(&self, x: &[f64]) -> Option<(usize, usize, f64, f64)> {
        let tx = (x[0] - self.origin[0]) / self.spacing[0];
        let ty = (x[1] - self.origin[1]) / self.spacing[1];
        let eps = 1e-9;
        if tx < -eps || ty < -eps || tx > self.nx as f64 + eps || ty > self.ny as f64 + eps {
            return None;
        }
        let i = (tx.floor() as usize).min(self.nx.saturating_sub(1));
        let j = (ty.floor() as usize).min(self.ny.saturating_sub(1));
        Some((i, j, (tx - i as f64).clamp(0.0, 1.0), (ty - j as f64).clamp(0.0, 1.0)))
    }

    fn value_at(&self, x: &[f64]) -> Option<[f64; 2]> {
        let (i, j, fx, fy) = self.locate(x)?;
        let v00 = self.values[self.idx(i, j)];
        let v10 = self.values[self.idx(i + 1, j)];
        let v01 = self.values[self.idx(i, j + 1)];
        let v11 = self.values[self.idx(i + 1, j + 1)];
        let mut out = [0.0; 2];
        for (k, o) in out.iter_mut().enumerate() {
            *o = (1.0 - fx) * (1.0 - fy) * v00[k]
                + fx * (1.0 - fy) * v10[k]
                + (1.0 - fx) * fy * v01[k]
                + fx * fy * v11[k];
        }
        Some(out)
    }

    fn jacobian_at(&self, x: &[f64]) -> Option<MatN> {
        let (i, j, fx, fy) = self.locate(x)?;
        let g00 = self.jacobians[self.idx(i, j)];
        let g10 = self.jacobians[self.idx(i + 1, j)];
        let g01 = self.jacobians[self.idx(i, j + 1)];
        let g11 = self.jacobians[self.idx(i + 1, j + 1)];
        let mut rows = vec![vec![0.0; 2]; 2];
        for (r, row) in rows.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = (1.0 - fx) * (1.0 - fy) * g00.get(r, c)
                    + fx * (1.0 - fy) * g10.get(r, c)
                    + (1.0 - fx) * fy * g01.get(r, c)
                    + fx * fy * g11.get(r, c);
            }
        }
        MatN::new(&rows).ok()
    }
}

#[derive(Debug, Clone)]
pub enum VectorFieldSpec {
    /// m(x) = A (x - x0); admissible exactly when the symmetric part of A is
    /// positive definite.
    Affine { a: MatN, x0: Vec<f64> },
    /// m(x) = (dI + A)(x - x0) + F(x) with skew A and a sampled C¹ field F
    /// obeying sup‖(∇F)ˢ‖ < d/n.
    Perturbed { d: f64, a_skew: MatN, x0: Vec<f64>, f: SampledField, lipschitz: Option<f64> },
}

impl VectorFieldSpec {
    pub fn affine(a: MatN, x0: Vec<f64>) -> Result<Self, GeometryError> {
        if x0.len() != a.n {
            return Err(GeometryError::InvalidField("x0 length must match matrix size".into()));
        }
        Ok(Self::Affine { a, x0 })
    }

    pub fn perturbed(
        d: f64,
        a_skew: MatN,
        x0: Vec<f64>,
        f: SampledField,
        lipschitz: Option<f64>,
    ) -> Result<Self, GeometryError> {
        if !(d > 0.0) {
            return Err(GeometryError::InvalidField("d must be positive".into()));
        }
        if a_skew.n != 2 || x0.len() != 2 {
            return Err(GeometryError::InvalidField("perturbed fields are 2-D".into()));
        }
        if !a_skew.is_skew() {
            return Err(GeometryError::InvalidField("A must be skew-symmetric".into()));
        }
        let bound = d / 2.0;
        let worst = f.jacobians.iter().map(MatN::sym_norm).fold(0.0, f64::max);
        if worst >= bound {
            return Err(GeometryError::InvalidField(format!(
                "sup of the symmetric Jacobian norm of F is {worst}, must stay below d/n = {bound}"
            )));
        }
        Ok(Self::Perturbed { d, a_skew, x0, f, lipschitz })
    }

    pub fn dim(&self) -> usize {
        match self {
            VectorFieldSpec::Affine { a, .. } => a.n,
            VectorFieldSpec::Perturbed { .. } => 2,
        }
    }

    pub fn scaled(&self, t: f64) -> VectorFieldSpec {
        match self {
            VectorFieldSpec::Affine { a, x0 } => {
                VectorFieldSpec::Affine { a: a.scaled(t), x0: x0.clone() }
            }
            VectorFieldSpec::Perturbed { d, a_skew, x0, f, lipschitz } => {
                let mut f = f.clone();
                for v in &mut f.values {
                    v[0] *= t;
                    v[1] *= t;
                }
                for g in &mut f.jacobians {
                    *g = g.scaled(t);
                }
                VectorFieldSpec::Perturbed {
                    d: d * t,
                    a_skew: a_skew.scaled(t),
                    x0: x0.clone(),
                    f,
                    lipschitz: lipschitz.map(|l| l * t),
                }
            }
        }
    }
}

/// Pointwise field data: the vector, its divergence, and the smallest
/// eigenvalue of the symmetrized Jacobian.
#[derive(Debug, Clone)]
pub struct FieldEval {
    pub m: Vec<f64>,
    pub div: f64,
    pub lambda_min: f64,
}

pub fn field_eval(spec: &VectorFieldSpec, x: &[f64]) -> Result<FieldEval, GeometryError> {
    match spec {
        VectorFieldSpec::Affine { a, x0 } => {
            let shifted: Vec<f64> = x.iter().zip(x0).map(|(xi, x0i)| xi - x0i).collect();
            Ok(FieldEval { m: a.apply(&shifted), div: a.trace(), lambda_min: a.sym_min_eig() })
        }
        VectorFieldSpec::Perturbed { d, a_skew, x0, f, .. } => {
            let fv = f.value_at(x).ok_or_else(|| GeometryError::OutOfDomain(x.to_vec()))?;
            let fj = f.jacobian_at(x).ok_or_else(|| GeometryError::OutOfDomain(x.to_vec()))?;
            let shifted = [x[0] - x0[0], x[1] - x0[1]];
            let linear = MatN::identity(2).scaled(*d).add(a_skew);
            let mv = linear.apply(&shifted);
            let jac = linear.add(&fj);
            Ok(FieldEval {
                m: vec![mv[0] + fv[0], mv[1] + fv[1]],
                div: jac.trace(),
                lambda_min: jac.sym_min_eig(),
            })
        }
    }
}

/// m(x)·ν at a boundary point.
pub fn m_dot_nu(spec: &VectorFieldSpec, pos: &[f64], nu: &[f64]) -> Result<f64, GeometryError> {
    let eval = field_eval(spec, pos)?;
    Ok(eval.m.iter().zip(nu).map(|(a, b)| a * b).sum())
}

/// Admissibility constants. `c_m`/`a0` are present only when admissible.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub inf_div: f64,
    pub sup_div_minus_2lam: f64,
    pub margin: f64,
    pub admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    /// Assumption deviations that apply to this domain (corners, n = 1).
    pub deviations: Vec<String>,
}

pub fn check_admissibility(
    spec: &VectorFieldSpec,
    dom: &Domain,
) -> Result<AdmissibilityReport, GeometryError> {
    dom.validate()?;
    if spec.dim() != dom.dim() {
        return Err(GeometryError::DimensionMismatch { field: spec.dim(), domain: dom.dim() });
    }
    let mut deviations = Vec::new();
    match dom {
        Domain::Interval1D { .. } => deviations.push("one-dimensional domain".to_string()),
        Domain::Rectangle2D { .. } => {
            deviations.push("rectangle corners are not smooth".to_string())
        }
        Domain::Disk2D { .. } => {}
    }

    let (inf_div, sup_g) = match spec {
        VectorFieldSpec::Affine { a, .. } => {
            let div = a.trace();
            (div, div - 2.0 * a.sym_min_eig())
        }
        VectorFieldSpec::Perturbed { f, lipschitz, .. } => {
            let mut inf_div = f64::INFINITY;
            let mut sup_g = f64::NEG_INFINITY;
            let mut samples = 0usize;
            for (pos, _) in f.sample_points() {
                if !dom.contains(&pos) {
                    continue;
                }
                let eval = field_eval(spec, &pos)?;
                inf_div = inf_div.min(eval.div);
                sup_g = sup_g.max(eval.div - 2.0 * eval.lambda_min);
                samples += 1;
            }
            if samples == 0 {
                return Err(GeometryError::InvalidField(
                    "sample grid does not cover the domain".into(),
                ));
            }
            let delta = f.spacing[0].hypot(f.spacing[1]);
            let lip = lipschitz.unwrap_or_else(|| estimate_lipschitz(spec, f));
            let slack = 0.5 * lip * delta;
            deviations.push(format!(
                "sample-based bounds with Lipschitz slack {slack:.3e} (L = {lip:.3e})"
            ));
            (inf_div - slack, sup_g + slack)
        }
    };

    let margin = inf_div - sup_g;
    let admissible = margin > 0.0;
    Ok(AdmissibilityReport {
        inf_div,
        sup_div_minus_2lam: sup_g,
        margin,
        admissible,
        c_m: admissible.then_some(0.5 * margin),
        a0: admissible.then_some(0.5 * (inf_div + sup_g)),
        deviations,
    })
}

/// Finite-difference Lipschitz estimate of div and div − 2λ over the
/// sample grid, taken over horizontally and vertically adjacent samples.
fn estimate_lipschitz(spec: &VectorFieldSpec, f: &SampledField) -> f64 {
    let quantities = |pos: [f64; 2]| -> Option<(f64, f64)> {
        field_eval(spec, &pos).ok().map(|e| (e.div, e.div - 2.0 * e.lambda_min))
    };
    let mut lip = 0.0f64;
    for j in 0..=f.ny {
        for i in 0..=f.nx {
            let p = [f.origin[0] + i as f64 * f.spacing[0], f.origin[1] + j as f64 * f.spacing[1]];
            let Some((d0, g0)) = quantities(p) else { continue };
            if i < f.nx {
                let q = [p[0] + f.spacing[0], p[1]];
                if let Some((d1, g1)) = quantities(q) {
                    lip = lip.max((d1 - d0).abs() / f.spacing[0]);
                    lip = lip.max((g1 - g0).abs() / f.spacing[0]);
                }
            }
            if j < f.ny {
                let q = [p[0], p[1] + f.spacing[1]];
                if let Some((d1, g1)) = quantities(q) {
                    lip = lip.max((d1 - d0).abs() / f.spacing[1]);
                    lip = lip.max((g1 - g0).abs() / f.spacing[1]);
                }
            }
        }
    }
    lip
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Domain {
        Domain::Rectangle2D { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0 }
    }

    #[test]
    fn identity_field() {
        let spec = VectorFieldSpec::affine(MatN::identity(2), vec![0.0, 0.0]).unwrap();
        let eval = field_eval(&spec, &[0.3, 0.7]).unwrap();
        assert_eq!(eval.div, 2.0);
        assert_eq!(eval.lambda_min, 1.0);
        assert_eq!(eval.m, vec![0.3, 0.7]);
        let rep = check_admissibility(&spec, &unit_square()).unwrap();
        assert!(rep.admissible);
        assert_eq!(rep.c_m, Some(1.0));
        assert_eq!(rep.a0, Some(1.0));
    }

    #[test]
    fn skew_part_drops_out() {
        let a = MatN::new(&[vec![2.0, -1.0], vec![1.0, 1.0]]).unwrap(); // diag(2,1) + rotation
        let spec = VectorFieldSpec::affine(a, vec![0.0, 0.0]).unwrap();
        let eval = field_eval(&spec, &[0.0, 0.0]).unwrap();
        assert_eq!(eval.div, 3.0);
        assert!((eval.lambda_min - 1.0).abs() < 1e-14);
        let rep = check_admissibility(&spec, &unit_square()).unwrap();
        assert_eq!(rep.c_m, Some(1.0));
        assert_eq!(rep.a0, Some(2.0));
    }

    #[test]
    fn indefinite_field_inadmissible() {
        let a = MatN::new(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let spec = VectorFieldSpec::affine(a, vec![0.0, 0.0]).unwrap();
        let eval = field_eval(&spec, &[0.0, 0.0]).unwrap();
        assert_eq!(eval.lambda_min, -1.0);
        let rep = check_admissibility(&spec, &unit_square()).unwrap();
        assert!(!rep.admissible);
        assert!(rep.c_m.is_none() && rep.a0.is_none());
    }

    #[test]
    fn perturbed_requires_small_symmetric_jacobian() {
        let f = SampledField {
            origin: [0.0, 0.0],
            spacing: [0.5, 0.5],
            nx: 2,
            ny: 2,
            values: vec![[0.0, 0.0]; 9],
            jacobians: vec![MatN::new(&[vec![0.9, 0.0], vec![0.0, 0.9]]).unwrap(); 9],
        };
        // d = 1, bound d/2 = 0.5 < 0.9
        assert!(VectorFieldSpec::perturbed(1.0, MatN::zero(2), vec![0.0, 0.0], f, None).is_err());
    }
}
