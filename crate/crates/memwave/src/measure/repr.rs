//! Signed Borel measures on ℝ⁺ as atoms plus piecewise densities.
//!
//! The representation class — point masses, sign-definite polynomial pieces
//! and exponential pieces — evaluates exactly on intervals and is closed
//! under total variation and under the tail operator (see `transform`).

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::calculus::{em1, integral_power_exp, poly_degree, poly_eval, poly_integral, poly_trim};

/// Highest polynomial degree accepted in user-constructed pieces.
pub const USER_MAX_DEGREE: usize = 8;
/// Highest polynomial degree an operator application may produce.
///
/// Iterating the tail operator raises the degree by one per application,
/// so this bound caps the iteration depth rather than user input.
pub const INTERNAL_MAX_DEGREE: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("invalid atom: {0}")]
    InvalidAtom(String),
    #[error("invalid density piece: {0}")]
    InvalidPiece(String),
    #[error("density piece changes sign on [{a}, {b})")]
    SignChangingDensity { a: f64, b: f64 },
    #[error("density pieces overlap near s = {0}")]
    OverlappingPieces(f64),
    #[error("exponential moment diverges: alpha = {alpha} >= rate = {rate} on an infinite piece")]
    DivergentMoment { alpha: f64, rate: f64 },
    #[error("measure is not strictly dominated: exp-moment {mass} >= mu0 = {mu0}")]
    NotStrictlyDominated { mass: f64, mu0: f64 },
    #[error("no positive rate yields a finite exponential moment")]
    NoFiniteMoment,
    #[error("operator output would exceed polynomial degree {max}")]
    DegreeOverflow { max: usize },
    #[error("measure has unbounded support")]
    UnboundedSupport,
}

/// Point mass at `tau > 0` with nonzero signed `weight`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub tau: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PieceKind {
    /// Density c0 + c1 s + … on a finite interval.
    Polynomial { coeffs: Vec<f64> },
    /// Density `amplitude · e^{-rate·s}`, the only kind allowed on an
    /// infinite interval.
    Exponential { amplitude: f64, rate: f64 },
}

/// One density piece on `[a, b)`; `b` may be `f64::INFINITY` for the
/// exponential kind.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPiece {
    pub a: f64,
    pub b: f64,
    pub kind: PieceKind,
    /// +1 nonnegative, -1 nonpositive on the interval; 0 when produced by an
    /// operator whose output is only certified nonnegative as a whole.
    sign: i8,
}

impl DensityPiece {
    pub fn polynomial(a: f64, b: f64, coeffs: Vec<f64>) -> Result<Self, MeasureError> {
        if !(a >= 0.0 && b > a && b.is_finite()) {
            return Err(MeasureError::InvalidPiece(format!(
                "polynomial piece needs 0 <= a < b < inf, got [{a}, {b})"
            )));
        }
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(MeasureError::InvalidPiece("non-finite or empty coefficients".into()));
        }
        if poly_degree(&coeffs) > USER_MAX_DEGREE {
            return Err(MeasureError::InvalidPiece(format!(
                "polynomial degree {} exceeds {USER_MAX_DEGREE}",
                poly_degree(&coeffs)
            )));
        }
        let mut coeffs = coeffs;
        poly_trim(&mut coeffs);
        let sign = match sign_on_interval(&coeffs, a, b) {
            Some(s) => s,
            None => return Err(MeasureError::SignChangingDensity { a, b }),
        };
        Ok(Self { a, b, kind: PieceKind::Polynomial { coeffs }, sign })
    }

    pub fn exponential(a: f64, b: f64, amplitude: f64, rate: f64) -> Result<Self, MeasureError> {
        if !(a >= 0.0 && b > a) {
            return Err(MeasureError::InvalidPiece(format!(
                "exponential piece needs 0 <= a < b, got [{a}, {b})"
            )));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(MeasureError::InvalidPiece(format!("rate must be positive, got {rate}")));
        }
        if !amplitude.is_finite() {
            return Err(MeasureError::InvalidPiece("non-finite amplitude".into()));
        }
        let sign = if amplitude >= 0.0 { 1 } else { -1 };
        Ok(Self { a, b, kind: PieceKind::Exponential { amplitude, rate }, sign })
    }

    pub(crate) fn raw(a: f64, b: f64, kind: PieceKind, sign: i8) -> Self {
        Self { a, b, kind, sign }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            PieceKind::Polynomial { coeffs } => coeffs.is_empty(),
            PieceKind::Exponential { amplitude, .. } => *amplitude == 0.0,
        }
    }

    pub fn density_at(&self, s: f64) -> f64 {
        if s < self.a || s >= self.b {
            return 0.0;
        }
        self.density_unclipped(s)
    }

    /// Evaluates the density formula without the support indicator; for
    /// quadrature at endpoints of ranges already clipped to `[a, b)`.
    pub fn density_unclipped(&self, s: f64) -> f64 {
        match &self.kind {
            PieceKind::Polynomial { coeffs } => poly_eval(coeffs, s),
            PieceKind::Exponential { amplitude, rate } => amplitude * (-rate * s).exp(),
        }
    }

    /// ∫ over `[lo, hi) ∩ [a, b)`; `hi` may be infinite.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        let lo = lo.max(self.a);
        let hi = hi.min(self.b);
        if hi <= lo {
            return 0.0;
        }
        match &self.kind {
            PieceKind::Polynomial { coeffs } => poly_integral(coeffs, lo, hi),
            PieceKind::Exponential { amplitude, rate } => {
                if hi.is_infinite() {
                    amplitude * (-rate * lo).exp() / rate
                } else {
                    let h = hi - lo;
                    amplitude * (-rate * lo).exp() * h * em1(rate * h)
                }
            }
        }
    }

    /// ∫ s^n · density over `[a, b)` (full piece).
    pub fn power_moment(&self, n: usize) -> f64 {
        match &self.kind {
            PieceKind::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    c / (n + k + 1) as f64
                        * (self.b.powi((n + k + 1) as i32) - self.a.powi((n + k + 1) as i32))
                })
                .sum(),
            PieceKind::Exponential { amplitude, rate } => {
                amplitude * integral_power_exp(n, -rate, self.a, self.b)
            }
        }
    }

    /// ∫ e^{αs} · density over `[a, b)`.
    pub fn exp_moment(&self, alpha: f64) -> Result<f64, MeasureError> {
        match &self.kind {
            PieceKind::Polynomial { coeffs } => Ok(coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c * integral_power_exp(k, alpha, self.a, self.b))
                .sum()),
            PieceKind::Exponential { amplitude, rate } => {
                if self.b.is_infinite() && alpha >= *rate {
                    return Err(MeasureError::DivergentMoment { alpha, rate: *rate });
                }
                Ok(amplitude * integral_power_exp(0, alpha - rate, self.a, self.b))
            }
        }
    }

    fn abs(&self) -> Self {
        let mut out = self.clone();
        if self.sign < 0 {
            match &mut out.kind {
                PieceKind::Polynomial { coeffs } => coeffs.iter_mut().for_each(|c| *c = -*c),
                PieceKind::Exponential { amplitude, .. } => *amplitude = -*amplitude,
            }
            out.sign = 1;
        }
        out
    }

    fn scaled(&self, k: f64) -> Self {
        let mut out = self.clone();
        match &mut out.kind {
            PieceKind::Polynomial { coeffs } => coeffs.iter_mut().for_each(|c| *c *= k),
            PieceKind::Exponential { amplitude, .. } => *amplitude *= k,
        }
        out.sign = if k > 0.0 {
            self.sign
        } else if k < 0.0 {
            -self.sign
        } else {
            1
        };
        out
    }
}

/// A signed measure: ordered atoms plus density pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRepr {
    atoms: Vec<Atom>,
    pieces: Vec<DensityPiece>,
    /// Whole-measure nonnegativity certificate. Set for user measures with
    /// nonnegative parts and preserved by nonnegative-coefficient algebra;
    /// operator outputs rely on it because their individual pieces may carry
    /// mixed signs even though the total density is nonnegative.
    nonneg: bool,
}

impl MeasureRepr {
    pub fn zero() -> Self {
        Self { atoms: Vec::new(), pieces: Vec::new(), nonneg: true }
    }

    pub fn new(atoms: Vec<Atom>, pieces: Vec<DensityPiece>) -> Result<Self, MeasureError> {
        for a in &atoms {
            if !(a.tau > 0.0 && a.tau.is_finite()) {
                return Err(MeasureError::InvalidAtom(format!(
                    "location must be strictly positive and finite, got {}",
                    a.tau
                )));
            }
            if !(a.weight != 0.0 && a.weight.is_finite()) {
                return Err(MeasureError::InvalidAtom(format!(
                    "weight must be nonzero and finite, got {}",
                    a.weight
                )));
            }
        }
        let mut atoms = atoms;
        atoms.sort_by(|x, y| x.tau.total_cmp(&y.tau));
        if atoms.windows(2).any(|w| w[0].tau == w[1].tau) {
            return Err(MeasureError::InvalidAtom("locations must be strictly increasing".into()));
        }

        let mut pieces: Vec<DensityPiece> = pieces.into_iter().filter(|p| !p.is_zero()).collect();
        pieces.sort_by(|x, y| x.a.total_cmp(&y.a).then(x.b.total_cmp(&y.b)));
        for w in pieces.windows(2) {
            let same_interval = w[0].a == w[1].a && w[0].b == w[1].b;
            if !(w[0].b <= w[1].a || same_interval) {
                return Err(MeasureError::OverlappingPieces(w[1].a));
            }
        }
        if pieces.iter().rev().skip(1).any(|p| p.b.is_infinite()) {
            return Err(MeasureError::InvalidPiece(
                "at most one infinite piece is allowed and it must extend furthest".into(),
            ));
        }

        let nonneg = atoms.iter().all(|a| a.weight > 0.0) && pieces.iter().all(|p| p.sign >= 0);
        Ok(Self { atoms, pieces, nonneg })
    }

    /// Internal constructor for operator outputs: skips per-piece sign and
    /// disjointness checks, trusting the caller's nonnegativity knowledge.
    pub(crate) fn from_raw(atoms: Vec<Atom>, mut pieces: Vec<DensityPiece>, nonneg: bool) -> Self {
        pieces.retain(|p| !p.is_zero());
        pieces.sort_by(|x, y| x.a.total_cmp(&y.a).then(x.b.total_cmp(&y.b)));
        Self { atoms, pieces, nonneg }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.pieces.is_empty()
    }

    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }

    /// μ([lo, hi)) — half-open; `hi` may be infinite.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        let atom_part: f64 = self
            .atoms
            .iter()
            .filter(|a| a.tau >= lo && a.tau < hi)
            .map(|a| a.weight)
            .sum();
        let piece_part: f64 = self.pieces.iter().map(|p| p.mass(lo, hi)).sum();
        atom_part + piece_part
    }

    pub fn total_mass(&self) -> f64 {
        self.mass(0.0, f64::INFINITY)
    }

    /// μ([s, ∞)) — closed at `s`, so an atom exactly at `s` is included.
    pub fn tail(&self, s: f64) -> f64 {
        self.mass(s, f64::INFINITY)
    }

    /// μ([lo, hi]) — closed at both ends.
    pub fn mass_closed(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        self.mass(lo, hi) + self.atom_weight_at(hi)
    }

    pub fn atom_weight_at(&self, s: f64) -> f64 {
        self.atoms.iter().filter(|a| a.tau == s).map(|a| a.weight).sum()
    }

    /// Pointwise density (the absolutely continuous part only).
    pub fn density_at(&self, s: f64) -> f64 {
        self.pieces.iter().map(|p| p.density_at(s)).sum()
    }

    /// Supremum of the support; infinite when an unbounded piece exists.
    pub fn support_bound(&self) -> f64 {
        let atom_max = self.atoms.last().map(|a| a.tau).unwrap_or(0.0);
        let piece_max = self.pieces.iter().map(|p| p.b).fold(0.0, f64::max);
        atom_max.max(piece_max)
    }

    pub fn min_atom_delay(&self) -> Option<f64> {
        self.atoms.first().map(|a| a.tau)
    }

    /// ∫ e^{αs} dμ(s) in closed form.
    pub fn exp_moment(&self, alpha: f64) -> Result<f64, MeasureError> {
        let mut total: f64 = self.atoms.iter().map(|a| a.weight * (alpha * a.tau).exp()).sum();
        for p in &self.pieces {
            total += p.exp_moment(alpha)?;
        }
        Ok(total)
    }

    /// ∫ s^n dμ(s) in closed form.
    pub fn power_moment(&self, n: usize) -> f64 {
        let atom_part: f64 = self.atoms.iter().map(|a| a.weight * a.tau.powi(n as i32)).sum();
        let piece_part: f64 = self.pieces.iter().map(|p| p.power_moment(n)).sum();
        atom_part + piece_part
    }

    /// |μ|: atom weights and sign-definite pieces replaced by absolute values.
    pub fn total_variation(&self) -> Self {
        if self.nonneg {
            return self.clone();
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { tau: a.tau, weight: a.weight.abs() })
            .collect();
        let pieces = self.pieces.iter().map(|p| p.abs()).collect();
        Self { atoms, pieces, nonneg: true }
    }

    pub fn scale(&self, k: f64) -> Self {
        if k == 0.0 {
            return Self::zero();
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { tau: a.tau, weight: k * a.weight })
            .collect();
        let pieces = self.pieces.iter().map(|p| p.scaled(k)).collect();
        Self { atoms, pieces, nonneg: self.nonneg && k > 0.0 }
    }

    /// Sum of two measures, consolidating coincident atoms and pieces.
    pub fn add(&self, other: &Self) -> Self {
        let mut atoms: Vec<Atom> = Vec::with_capacity(self.atoms.len() + other.atoms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.atoms.len() || j < other.atoms.len() {
            let pick_left = match (self.atoms.get(i), other.atoms.get(j)) {
                (Some(x), Some(y)) => x.tau <= y.tau,
                (Some(_), None) => true,
                _ => false,
            };
            let a = if pick_left {
                i += 1;
                self.atoms[i - 1]
            } else {
                j += 1;
                other.atoms[j - 1]
            };
            match atoms.last_mut() {
                Some(last) if last.tau == a.tau => last.weight += a.weight,
                _ => atoms.push(a),
            }
        }
        atoms.retain(|a| a.weight != 0.0);

        let mut pieces: Vec<DensityPiece> = Vec::new();
        for p in self.pieces.iter().chain(other.pieces.iter()) {
            if let Some(existing) = pieces.iter_mut().find(|q| q.a == p.a && q.b == p.b) {
                match (&mut existing.kind, &p.kind) {
                    (PieceKind::Polynomial { coeffs: c1 }, PieceKind::Polynomial { coeffs: c2 }) => {
                        if c1.len() < c2.len() {
                            c1.resize(c2.len(), 0.0);
                        }
                        for (t, &s) in c1.iter_mut().zip(c2.iter()) {
                            *t += s;
                        }
                        poly_trim(c1);
                        existing.sign = if existing.sign == p.sign { existing.sign } else { 0 };
                        continue;
                    }
                    (
                        PieceKind::Exponential { amplitude: a1, rate: r1 },
                        PieceKind::Exponential { amplitude: a2, rate: r2 },
                    ) if r1 == r2 => {
                        *a1 += a2;
                        existing.sign = if existing.sign == p.sign { existing.sign } else { 0 };
                        continue;
                    }
                    _ => {}
                }
            }
            pieces.push(p.clone());
        }
        Self::from_raw(atoms, pieces, self.nonneg && other.nonneg)
    }
}

// ---------------------------------------------------------------------------
// Sign-definiteness of a polynomial on an interval, via Bernstein bounds.
// ---------------------------------------------------------------------------

fn binom(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v *= (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Power-basis coefficients on [a, b] → Bernstein coefficients on [0, 1].
fn bernstein_on_interval(coeffs: &[f64], a: f64, b: f64) -> Vec<f64> {
    let len = b - a;
    // substitute s = a + len·t
    let n = coeffs.len() - 1;
    let mut ct = vec![0.0; n + 1];
    for (k, &c) in coeffs.iter().enumerate() {
        // c (a + len t)^k = c Σ_j C(k,j) a^{k-j} len^j t^j
        for j in 0..=k {
            ct[j] += c * binom(k, j) * a.powi((k - j) as i32) * len.powi(j as i32);
        }
    }
    let mut bern = vec![0.0; n + 1];
    for i in 0..=n {
        let mut acc = 0.0;
        for k in 0..=i {
            acc += binom(i, k) / binom(n, k) * ct[k];
        }
        bern[i] = acc;
    }
    bern
}

fn decasteljau_split(b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = b.len();
    let mut work = b.to_vec();
    let mut left = Vec::with_capacity(n);
    let mut right = vec![0.0; n];
    left.push(work[0]);
    right[n - 1] = work[n - 1];
    for level in 1..n {
        for i in 0..n - level {
            work[i] = 0.5 * (work[i] + work[i + 1]);
        }
        left.push(work[0]);
        right[n - 1 - level] = work[n - 1 - level];
    }
    (left, right)
}

/// Sign class: +1 (≥ -tol with some value > tol), -1 symmetric, 0 (|p| ≤ tol).
fn sign_class(bern: &[f64], tol: f64, depth: usize) -> Option<i8> {
    let lo = bern.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = bern.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo >= -tol && hi <= tol {
        return Some(0);
    }
    if lo >= -tol {
        return Some(1);
    }
    if hi <= tol {
        return Some(-1);
    }
    // endpoint Bernstein coefficients are exact values
    let (va, vb) = (bern[0], bern[bern.len() - 1]);
    if (va > tol && vb < -tol) || (va < -tol && vb > tol) {
        return None;
    }
    if depth >= 40 {
        return None;
    }
    let (l, r) = decasteljau_split(bern);
    let sl = sign_class(&l, tol, depth + 1)?;
    let sr = sign_class(&r, tol, depth + 1)?;
    match (sl, sr) {
        (0, s) | (s, 0) => Some(s),
        (x, y) if x == y => Some(x),
        _ => None,
    }
}

/// Returns +1 / -1 when the polynomial is sign-definite on [a, b], else None.
pub(crate) fn sign_on_interval(coeffs: &[f64], a: f64, b: f64) -> Option<i8> {
    if coeffs.iter().all(|&c| c == 0.0) {
        return Some(1);
    }
    let bern = bernstein_on_interval(coeffs, a, b);
    let scale = bern.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(f64::MIN_POSITIVE);
    match sign_class(&bern, 1e-12 * scale, 0) {
        Some(0) => Some(1),
        other => other,
    }
}

// ---------------------------------------------------------------------------
// JSON wire format.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct AtomWire {
    tau: f64,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BoundWire {
    Finite(f64),
    Inf(String),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum PieceBody {
    #[serde(rename = "poly")]
    Poly { coeffs: Vec<f64> },
    #[serde(rename = "exp")]
    Exp { c: f64, beta: f64 },
}

#[derive(Serialize, Deserialize)]
struct PieceWire {
    a: f64,
    b: BoundWire,
    #[serde(flatten)]
    body: PieceBody,
}

#[derive(Serialize, Deserialize)]
struct MeasureWire {
    atoms: Vec<AtomWire>,
    pieces: Vec<PieceWire>,
}

impl Serialize for MeasureRepr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let wire = MeasureWire {
            atoms: self.atoms.iter().map(|a| AtomWire { tau: a.tau, weight: a.weight }).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceWire {
                    a: p.a,
                    b: if p.b.is_finite() {
                        BoundWire::Finite(p.b)
                    } else {
                        BoundWire::Inf("inf".into())
                    },
                    body: match &p.kind {
                        PieceKind::Polynomial { coeffs } => PieceBody::Poly { coeffs: coeffs.clone() },
                        PieceKind::Exponential { amplitude, rate } => {
                            PieceBody::Exp { c: *amplitude, beta: *rate }
                        }
                    },
                })
                .collect(),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MeasureRepr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = MeasureWire::deserialize(deserializer)?;
        let atoms = wire.atoms.into_iter().map(|a| Atom { tau: a.tau, weight: a.weight }).collect();
        let mut pieces = Vec::new();
        for p in wire.pieces {
            let b = match p.b {
                BoundWire::Finite(v) => v,
                BoundWire::Inf(s) if s == "inf" => f64::INFINITY,
                BoundWire::Inf(s) => {
                    return Err(D::Error::custom(format!("bad interval bound {s:?}, expected \"inf\"")))
                }
            };
            let piece = match p.body {
                PieceBody::Poly { coeffs } => DensityPiece::polynomial(p.a, b, coeffs),
                PieceBody::Exp { c, beta } => DensityPiece::exponential(p.a, b, c, beta),
            }
            .map_err(D::Error::custom)?;
            pieces.push(piece);
        }
        MeasureRepr::new(atoms, pieces).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn dirac(tau: f64, weight: f64) -> MeasureRepr {
        MeasureRepr::new(vec![Atom { tau, weight }], vec![]).unwrap()
    }

    #[test]
    fn total_variation_of_atoms() {
        let mu = MeasureRepr::new(
            vec![Atom { tau: 1.0, weight: 0.5 }, Atom { tau: 2.0, weight: -0.2 }],
            vec![],
        )
        .unwrap();
        let tv = mu.total_variation();
        assert_eq!(tv.total_mass(), 0.7);
        assert_eq!(mu.total_mass(), 0.3);
    }

    #[test]
    fn total_variation_of_exponential() {
        let mu = MeasureRepr::new(
            vec![],
            vec![DensityPiece::exponential(0.0, f64::INFINITY, -1.0, 1.0).unwrap()],
        )
        .unwrap();
        let tv = mu.total_variation();
        assert!((tv.total_mass() - 1.0).abs() < 1e-15);
        assert!((mu.total_mass() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn total_variation_of_piecewise_constants() {
        let mu = MeasureRepr::new(
            vec![],
            vec![
                DensityPiece::polynomial(0.0, 1.0, vec![-2.0]).unwrap(),
                DensityPiece::polynomial(1.0, 2.0, vec![3.0]).unwrap(),
            ],
        )
        .unwrap();
        assert!((mu.total_variation().total_mass() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn dirac_tail() {
        let mu = dirac(1.5, 1.0);
        assert_eq!(mu.tail(1.0), 1.0);
        assert_eq!(mu.tail(1.5), 1.0); // closed at s
        assert_eq!(mu.tail(1.5 + 1e-12), 0.0);
        assert_eq!(mu.tail(0.0), mu.total_mass());
    }

    #[test]
    fn exponential_tail_closed_form() {
        let mu = MeasureRepr::new(
            vec![],
            vec![DensityPiece::exponential(0.0, f64::INFINITY, 1.0, 2.0).unwrap()],
        )
        .unwrap();
        let expect = (-2.0f64).exp() / 2.0;
        assert!((mu.tail(1.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn uniform_piece_tail() {
        let mu = MeasureRepr::new(
            vec![],
            vec![DensityPiece::polynomial(1.0, 3.0, vec![1.0]).unwrap()],
        )
        .unwrap();
        assert!((mu.tail(2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exp_moment_examples() {
        // atom: μ1 e^{α τ}
        let mu = dirac(2.0, 0.3);
        let alpha = 0.7;
        assert!((mu.exp_moment(alpha).unwrap() - 0.3 * (alpha * 2.0f64).exp()).abs() < 1e-15);
        // zero rate → total mass
        assert_eq!(mu.exp_moment(0.0).unwrap(), mu.total_mass());
        // e^{-s} ds with α = 0.5 → 2
        let mu = MeasureRepr::new(
            vec![],
            vec![DensityPiece::exponential(0.0, f64::INFINITY, 1.0, 1.0).unwrap()],
        )
        .unwrap();
        assert!((mu.exp_moment(0.5).unwrap() - 2.0).abs() < 1e-12);
        // divergent when α ≥ β on infinite piece
        assert!(matches!(
            mu.exp_moment(1.0),
            Err(MeasureError::DivergentMoment { .. })
        ));
    }

    #[test]
    fn atom_at_origin_rejected() {
        assert!(MeasureRepr::new(vec![Atom { tau: 0.0, weight: 1.0 }], vec![]).is_err());
    }

    #[test]
    fn sign_changing_polynomial_rejected() {
        // s - 1 changes sign on [0, 2)
        assert!(matches!(
            DensityPiece::polynomial(0.0, 2.0, vec![-1.0, 1.0]),
            Err(MeasureError::SignChangingDensity { .. })
        ));
        // (s - 1)² touches zero but stays nonnegative
        let p = DensityPiece::polynomial(0.0, 2.0, vec![1.0, -2.0, 1.0]).unwrap();
        assert_eq!(p.sign(), 1);
        // -(s - 1)² is nonpositive
        let p = DensityPiece::polynomial(0.0, 2.0, vec![-1.0, 2.0, -1.0]).unwrap();
        assert_eq!(p.sign(), -1);
    }

    #[test]
    fn overlapping_pieces_rejected() {
        let p1 = DensityPiece::polynomial(0.0, 1.5, vec![1.0]).unwrap();
        let p2 = DensityPiece::polynomial(1.0, 2.0, vec![1.0]).unwrap();
        assert!(matches!(
            MeasureRepr::new(vec![], vec![p1, p2]),
            Err(MeasureError::OverlappingPieces(_))
        ));
    }

    #[test]
    fn infinite_piece_must_be_last_and_unique() {
        let p1 = DensityPiece::exponential(0.0, f64::INFINITY, 1.0, 1.0).unwrap();
        let p2 = DensityPiece::exponential(5.0, 6.0, 1.0, 1.0).unwrap();
        assert!(MeasureRepr::new(vec![], vec![p1, p2]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mu = MeasureRepr::new(
            vec![Atom { tau: 0.5, weight: 0.4 }],
            vec![
                DensityPiece::polynomial(0.0, 1.0, vec![0.6, -0.3]).unwrap(),
                DensityPiece::exponential(2.0, f64::INFINITY, 0.1, 2.0).unwrap(),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&mu).unwrap();
        assert!(json.contains("\"tau\":0.5"));
        assert!(json.contains("\"kind\":\"poly\""));
        assert!(json.contains("\"b\":\"inf\""));
        let back: MeasureRepr = serde_json::from_str(&json).unwrap();
        assert_eq!(mu, back);
    }

    #[test]
    fn wire_format_field_names() {
        let json = r#"{"atoms":[{"tau":1.0,"weight":-0.25}],
                       "pieces":[{"a":0.0,"b":2.0,"kind":"poly","coeffs":[1.0,0.5]},
                                 {"a":2.0,"b":"inf","kind":"exp","c":0.3,"beta":1.5}]}"#;
        let mu: MeasureRepr = serde_json::from_str(json).unwrap();
        assert_eq!(mu.atoms().len(), 1);
        assert_eq!(mu.pieces().len(), 2);
        assert!(mu.pieces()[1].b.is_infinite());
    }

    #[test]
    fn add_consolidates() {
        let mu = dirac(1.0, 0.5);
        let nu = dirac(1.0, 0.25).add(&dirac(2.0, 0.1));
        let sum = mu.add(&nu);
        assert_eq!(sum.atoms().len(), 2);
        assert!((sum.total_mass() - 0.85).abs() < 1e-15);
        // piece consolidation
        let p = MeasureRepr::new(vec![], vec![DensityPiece::polynomial(0.0, 1.0, vec![1.0]).unwrap()])
            .unwrap();
        let q = p.add(&p);
        assert_eq!(q.pieces().len(), 1);
        assert!((q.total_mass() - 2.0).abs() < 1e-15);
    }
}
