//! Stem functions `F = F₁ + ιF₂` on symmetric plane domains and the slice
//! functions `f(α + βJ) = F₁(α, β) + J F₂(α, β)` they induce.

use std::sync::Arc;

use nalgebra::{Complex, DMatrix, SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{Cl3Element, Quaternion, DIM};
use crate::cone::{in_root_sphere, root_from_pair, sample_root_sphere_with, slice_coords};
use crate::error::{Error, Result};
use crate::tolerance;
use crate::topology::DomainGrid;

/// Value of a stem function at one point of the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StemValue {
    pub f1: Cl3Element,
    pub f2: Cl3Element,
}

impl StemValue {
    /// Euclidean norm on `ℝ₃ ⊗ ℂ ≅ ℝ¹⁶`.
    pub fn norm(&self) -> f64 {
        (self.f1.norm_sqr() + self.f2.norm_sqr()).sqrt()
    }

    /// `F₁ + J F₂`.
    pub fn at(&self, j: &Cl3Element) -> Cl3Element {
        self.f1 + *j * self.f2
    }

    pub fn sub(&self, o: &StemValue) -> StemValue {
        StemValue {
            f1: self.f1 - o.f1,
            f2: self.f2 - o.f2,
        }
    }

    /// `(a + ι b) · F` for a complex scalar.
    pub fn scale_complex(&self, c: Complex<f64>) -> StemValue {
        StemValue {
            f1: self.f1 * c.re - self.f2 * c.im,
            f2: self.f2 * c.re + self.f1 * c.im,
        }
    }
}

/// A slice polynomial `Σ x^k a_k` with right coefficients.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SlicePolynomial {
    pub coeffs: Vec<Cl3Element>,
}

impl SlicePolynomial {
    pub fn new(coeffs: Vec<Cl3Element>) -> Self {
        SlicePolynomial { coeffs }
    }

    /// Polynomial with real coefficients `c_k` (times `e0`).
    pub fn real(coeffs: &[f64]) -> Self {
        SlicePolynomial::new(coeffs.iter().map(|c| Cl3Element::scalar(*c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Stem value at `z = α + ιβ`: `Σ z^k a_k` split into real and
    /// imaginary parts of `z^k`.
    pub fn stem(&self, alpha: f64, beta: f64) -> StemValue {
        let z = Complex::new(alpha, beta);
        let mut zk = Complex::new(1.0, 0.0);
        let mut out = StemValue::default();
        for a in &self.coeffs {
            out.f1 += *a * zk.re;
            out.f2 += *a * zk.im;
            zk *= z;
        }
        out
    }

    /// Direct evaluation `Σ x^k a_k` by Horner's rule with left
    /// multiplication by `x`.
    pub fn eval(&self, x: &Cl3Element) -> Cl3Element {
        let mut acc = Cl3Element::ZERO;
        for a in self.coeffs.iter().rev() {
            acc = *x * acc + *a;
        }
        acc
    }

    /// `A^c`: conjugated coefficients.
    pub fn conj(&self) -> Self {
        SlicePolynomial::new(self.coeffs.iter().map(|a| a.conj()).collect())
    }

    /// Product of stems, `(Σ z^k a_k)(Σ z^m b_m) = Σ z^(k+m) a_k b_m`.
    pub fn stem_product(&self, other: &SlicePolynomial) -> SlicePolynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return SlicePolynomial::default();
        }
        let mut out = vec![Cl3Element::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (k, a) in self.coeffs.iter().enumerate() {
            for (m, b) in other.coeffs.iter().enumerate() {
                out[k + m] += *a * *b;
            }
        }
        SlicePolynomial::new(out)
    }

    pub fn add(&self, other: &SlicePolynomial) -> SlicePolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &SlicePolynomial, i: usize| p.coeffs.get(i).copied().unwrap_or_default();
        SlicePolynomial::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn has_real_coefficients(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.non_real_magnitude() <= tol)
    }
}

/// A pole of a rational slice function, or the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pole {
    /// A real point `α`.
    Real {
        alpha: f64,
    },
    /// The sphere `{α + βJ : J ∈ 𝕊}` with `β > 0`.
    Sphere {
        alpha: f64,
        beta: f64,
    },
    Infinity,
}

impl Pole {
    /// Real monic factor vanishing on the pole: `z - α` or `(z - α)² + β²`,
    /// as ascending coefficients. Empty for infinity.
    pub fn factor(&self) -> Vec<f64> {
        match *self {
            Pole::Real { alpha } => vec![-alpha, 1.0],
            Pole::Sphere { alpha, beta } => vec![alpha * alpha + beta * beta, -2.0 * alpha, 1.0],
            Pole::Infinity => Vec::new(),
        }
    }

    /// Plane point `(α, β)` representing the pole.
    pub fn plane_point(&self) -> Option<(f64, f64)> {
        match *self {
            Pole::Real { alpha } => Some((alpha, 0.0)),
            Pole::Sphere { alpha, beta } => Some((alpha, beta)),
            Pole::Infinity => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RationalSpec {
    #[serde(rename = "A")]
    a: SlicePolynomial,
    #[serde(rename = "B")]
    b: SlicePolynomial,
}

/// `ℐ((A^c A)⁻¹ A^c B)` with `A^c A` real and not identically zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RationalSpec", into = "RationalSpec")]
pub struct RationalSliceFunction {
    a: SlicePolynomial,
    b: SlicePolynomial,
    /// Real coefficients of `A^c A`, ascending.
    denominator: Vec<f64>,
    /// `A^c B`.
    numerator: SlicePolynomial,
    poles: Vec<Pole>,
    /// Largest non-real coefficient of `A^c A`.
    realness_residual: f64,
}

impl TryFrom<RationalSpec> for RationalSliceFunction {
    type Error = Error;
    fn try_from(s: RationalSpec) -> Result<Self> {
        rational_build(s.a, s.b)
    }
}

impl From<RationalSliceFunction> for RationalSpec {
    fn from(r: RationalSliceFunction) -> Self {
        RationalSpec { a: r.a, b: r.b }
    }
}

impl RationalSliceFunction {
    pub fn a(&self) -> &SlicePolynomial {
        &self.a
    }

    pub fn b(&self) -> &SlicePolynomial {
        &self.b
    }

    pub fn denominator(&self) -> &[f64] {
        &self.denominator
    }

    pub fn numerator(&self) -> &SlicePolynomial {
        &self.numerator
    }

    /// Real zeros and zero spheres of `A^c A`.
    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn realness_residual(&self) -> f64 {
        self.realness_residual
    }

    pub fn stem(&self, alpha: f64, beta: f64) -> Result<StemValue> {
        let z = Complex::new(alpha, beta);
        let mut p = Complex::new(0.0, 0.0);
        let mut scale = 0.0;
        let mut zk = Complex::new(1.0, 0.0);
        for c in &self.denominator {
            p += zk * *c;
            scale += c.abs() * zk.norm();
            zk *= z;
        }
        if p.norm() <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::OutOfDomain { alpha, beta });
        }
        Ok(self.numerator.stem(alpha, beta).scale_complex(p.inv()))
    }
}

/// Builds `a⁻¹b = ℐ((A^c A)⁻¹ A^c B)` and locates its poles.
pub fn rational_build(a: SlicePolynomial, b: SlicePolynomial) -> Result<RationalSliceFunction> {
    let ac = a.conj();
    let aca = ac.stem_product(&a);
    let scale = aca.coeffs.iter().fold(0.0f64, |m, c| m.max(c.max_abs()));
    let residual = aca
        .coeffs
        .iter()
        .fold(0.0f64, |m, c| m.max(c.non_real_magnitude()));
    if residual > tolerance::REAL_DENOMINATOR * scale.max(1.0) {
        return Err(Error::NotRealDenominator { residual });
    }
    let mut denominator: Vec<f64> = aca.coeffs.iter().map(|c| c.real_part()).collect();
    while denominator
        .last()
        .is_some_and(|c| c.abs() <= tolerance::REAL_DENOMINATOR * scale.max(1.0))
    {
        denominator.pop();
    }
    if denominator.is_empty() {
        return Err(Error::ZeroDenominator);
    }
    let numerator = ac.stem_product(&b);
    let poles = real_polynomial_poles(&denominator);
    Ok(RationalSliceFunction {
        a,
        b,
        denominator,
        numerator,
        poles,
        realness_residual: residual,
    })
}

/// Complex roots of a real polynomial (ascending coefficients) via the
/// companion matrix, polished by Newton steps.
pub fn real_polynomial_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -coeffs[i] / lead;
    }
    let eval = |z: Complex<f64>| {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        let mut scale = 0.0;
        for c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + *c;
            scale = scale * z.norm() + c.abs();
        }
        (p, dp, scale)
    };
    let initial: Vec<Complex<f64>> =
        match nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, 100 * n) {
            Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
            None => aberth_roots(coeffs),
        };
    initial
        .into_iter()
        .map(|z0| {
            let mut z = z0;
            for _ in 0..8 {
                let (p, dp, scale) = eval(z);
                if p.norm() <= 4.0 * f64::EPSILON * scale {
                    break;
                }
                let next = z - p / dp;
                // Near multiple roots Newton steps are unreliable; keep only improvements.
                if !(next.re.is_finite() && next.im.is_finite()) || eval(next).0.norm() >= p.norm()
                {
                    break;
                }
                z = next;
            }
            z
        })
        .collect()
}

/// Simultaneous Aberth–Ehrlich iteration; used when the companion matrix
/// is too defective for the Schur iteration to converge.
fn aberth_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .fold(0.0f64, |m, c| m.max((c / lead).abs()));
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|k| Complex::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (mut p, mut dp) = (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
            for c in coeffs.iter().rev() {
                dp = dp * z[k] + p;
                p = p * z[k] + *c;
            }
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex<f64> = (0..n)
                .filter(|j| *j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let w = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            if w.re.is_finite() && w.im.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved <= 1e-15 {
            break;
        }
    }
    z
}

/// Newton on the `(m-1)`-th derivative, where a root of multiplicity `m`
/// is simple.
fn polish_multiple(coeffs: &[f64], z0: Complex<f64>, m: usize) -> Complex<f64> {
    let mut d = coeffs.to_vec();
    for _ in 1..m {
        d = d
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
    }
    let eval = |z: Complex<f64>| {
        let (mut p, mut dp) = (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
        for c in d.iter().rev() {
            dp = dp * z + p;
            p = p * z + *c;
        }
        (p, dp)
    };
    let mut z = z0;
    for _ in 0..20 {
        let (p, dp) = eval(z);
        let next = z - p / dp;
        if !(next.re.is_finite() && next.im.is_finite()) || eval(next).0.norm() >= p.norm() {
            break;
        }
        z = next;
    }
    z
}

/// Relative radius within which computed roots are one pole.
const ROOT_CLUSTER: f64 = 1e-3;

fn real_polynomial_poles(coeffs: &[f64]) -> Vec<Pole> {
    // A root of multiplicity m scatters by about eps^(1/m); cluster first and
    // classify the centroid, which is accurate to working precision.
    let mut clusters: Vec<(Complex<f64>, usize)> = Vec::new();
    for z in real_polynomial_roots(coeffs) {
        let tol = ROOT_CLUSTER * (1.0 + z.norm());
        match clusters
            .iter_mut()
            .find(|(sum, n)| (*sum / *n as f64 - z).norm() <= tol)
        {
            Some((sum, n)) => {
                *sum += z;
                *n += 1;
            }
            None => clusters.push((z, 1)),
        }
    }
    let mut poles: Vec<Pole> = Vec::new();
    for (sum, n) in clusters {
        let z = polish_multiple(coeffs, sum / n as f64, n);
        let pole = if z.im.abs() <= 1e-6 * (1.0 + z.norm()) {
            Pole::Real { alpha: z.re }
        } else {
            Pole::Sphere {
                alpha: z.re,
                beta: z.im.abs(),
            }
        };
        let duplicate = poles.iter().any(|q| match (q, &pole) {
            (Pole::Sphere { alpha: a, beta: c }, Pole::Sphere { alpha: b, beta: d }) => {
                (a - b).abs() + (c - d).abs() <= ROOT_CLUSTER * (1.0 + a.abs() + c.abs())
            }
            _ => false,
        });
        if !duplicate {
            poles.push(pole);
        }
    }
    poles.sort_by(|p, q| {
        let (a, b) = p.plane_point().unwrap_or_default();
        let (c, d) = q.plane_point().unwrap_or_default();
        a.total_cmp(&c).then(b.total_cmp(&d))
    });
    poles
}

/// Stem values tabulated at the cell centres of a domain grid and
/// interpolated bilinearly between them.
#[derive(Clone, Debug)]
pub struct TabulatedStem {
    grid: Arc<DomainGrid>,
    values: Vec<Option<StemValue>>,
}

impl TabulatedStem {
    /// Samples `stem` at every cell centre of the grid's upper half
    /// (including the symmetry row) and mirrors it with the stem symmetry.
    pub fn from_fn<F>(grid: Arc<DomainGrid>, mut stem: F) -> Self
    where
        F: FnMut(f64, f64) -> Option<StemValue>,
    {
        let (nx, ny) = (grid.nx(), grid.ny());
        let h = grid.axis_row();
        let mut values = vec![None; nx * ny];
        for j in h..ny {
            for i in 0..nx {
                if !grid.cell(i, j) {
                    continue;
                }
                let (x, y) = grid.cell_center(i, j);
                let v = stem(x, y).map(|mut v| {
                    if j == h {
                        v.f2 = Cl3Element::ZERO;
                    }
                    v
                });
                values[j * nx + i] = v;
                let mj = grid.mirror_row(j);
                values[mj * nx + i] = v.map(|v| StemValue {
                    f1: v.f1,
                    f2: -v.f2,
                });
            }
        }
        TabulatedStem { grid, values }
    }

    pub fn stem(&self, alpha: f64, beta: f64) -> Result<StemValue> {
        let g = &self.grid;
        let (fx, fy) = g.fractional_index(alpha, beta);
        let (i0, j0) = (fx.floor(), fy.floor());
        let (tx, ty) = (fx - i0, fy - j0);
        let out = Error::OutOfDomain { alpha, beta };
        if i0 < 0.0 || j0 < 0.0 {
            return Err(out);
        }
        let (i0, j0) = (i0 as usize, j0 as usize);
        let get = |i: usize, j: usize| -> Result<StemValue> {
            if i >= g.nx() || j >= g.ny() {
                return Err(out.clone());
            }
            self.values[j * g.nx() + i].ok_or(out.clone())
        };
        let mut acc = StemValue::default();
        for (di, wx) in [(0, 1.0 - tx), (1, tx)] {
            for (dj, wy) in [(0, 1.0 - ty), (1, ty)] {
                let w = wx * wy;
                if w == 0.0 {
                    continue;
                }
                let v = get(i0 + di, j0 + dj)?;
                acc.f1 += v.f1 * w;
                acc.f2 += v.f2 * w;
            }
        }
        Ok(acc)
    }
}

/// The concrete representation of a stem function.
#[derive(Clone, Debug)]
pub enum StemKind {
    Polynomial(SlicePolynomial),
    Rational(RationalSliceFunction),
    Tabulated(TabulatedStem),
}

/// A stem function, optionally restricted to a rasterised domain.
#[derive(Clone, Debug)]
pub struct StemFunction {
    pub kind: StemKind,
    pub domain: Option<Arc<DomainGrid>>,
}

impl StemFunction {
    pub fn eval(&self, alpha: f64, beta: f64) -> Result<StemValue> {
        if let Some(d) = &self.domain {
            if !d.contains_point(alpha, beta) {
                return Err(Error::OutOfDomain { alpha, beta });
            }
        }
        match &self.kind {
            StemKind::Polynomial(p) => Ok(p.stem(alpha, beta)),
            StemKind::Rational(r) => r.stem(alpha, beta),
            StemKind::Tabulated(t) => t.stem(alpha, beta),
        }
    }

    /// Holomorphic kinds; tabulated stems carry no such guarantee.
    pub fn is_holomorphic(&self) -> bool {
        !matches!(self.kind, StemKind::Tabulated(_))
    }
}

/// The slice function `ℐ(F)` induced by a stem function.
#[derive(Clone, Debug)]
pub struct SliceFunction {
    pub stem: StemFunction,
}

impl SliceFunction {
    pub fn polynomial(p: SlicePolynomial) -> Self {
        SliceFunction {
            stem: StemFunction {
                kind: StemKind::Polynomial(p),
                domain: None,
            },
        }
    }

    pub fn rational(r: RationalSliceFunction) -> Self {
        SliceFunction {
            stem: StemFunction {
                kind: StemKind::Rational(r),
                domain: None,
            },
        }
    }

    pub fn tabulated(t: TabulatedStem) -> Self {
        let domain = Some(t.grid.clone());
        SliceFunction {
            stem: StemFunction {
                kind: StemKind::Tabulated(t),
                domain,
            },
        }
    }

    pub fn with_domain(mut self, domain: Arc<DomainGrid>) -> Self {
        self.stem.domain = Some(domain);
        self
    }

    pub fn stem_at(&self, alpha: f64, beta: f64) -> Result<StemValue> {
        self.stem.eval(alpha, beta)
    }

    /// `f(α + βJ)` for any real `β`; `J` is trusted to be a root of `-1`.
    pub fn eval_at(&self, alpha: f64, beta: f64, j: &Cl3Element) -> Result<Cl3Element> {
        Ok(self.stem.eval(alpha, beta)?.at(j))
    }

    /// Slice regular: holomorphic stem.
    pub fn is_slice_regular(&self) -> bool {
        self.stem.is_holomorphic()
    }
}

/// Evaluates a slice function at a cone point.
pub fn slice_eval(f: &SliceFunction, x: &Cl3Element) -> Result<Cl3Element> {
    let sc = slice_coords(x, tolerance::CONE)?;
    let v = f.stem.eval(sc.alpha, sc.beta)?;
    match sc.j {
        Some(j) => Ok(v.at(&j)),
        None => {
            debug_assert!(
                v.f2.max_abs() <= tolerance::RECONSTRUCT * (1.0 + v.f1.max_abs()),
                "odd stem component does not vanish on the real axis"
            );
            Ok(v.f1)
        }
    }
}

/// Representation formula: reconstructs `f(α + βI)` from the values of `f`
/// at `α ± βJ`.
pub fn representation_eval(
    f: &SliceFunction,
    alpha: f64,
    beta: f64,
    i: &Cl3Element,
    j: &Cl3Element,
) -> Result<Cl3Element> {
    for u in [i, j] {
        if !in_root_sphere(u, tolerance::CONE)? {
            return Err(Error::NotRootSphere);
        }
    }
    let plus = f.eval_at(alpha, beta, j)?;
    let minus = f.eval_at(alpha, -beta, j)?;
    Ok((plus + minus) * 0.5 + *i * (*j * (minus - plus)) * 0.5)
}

/// The three terms of the stem/slice norm sandwich at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormBounds {
    /// `‖F(α + iβ)‖ / √2`.
    pub lhs: f64,
    /// `max(|f(α + βJ)|, |f(α − βJ)|)`.
    pub mid: f64,
    /// `√2 ‖F(α + iβ)‖`.
    pub rhs: f64,
}

impl NormBounds {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.mid + slack && self.mid <= self.rhs + slack
    }
}

pub fn norm_bounds(f: &SliceFunction, alpha: f64, beta: f64, j: &Cl3Element) -> Result<NormBounds> {
    if !in_root_sphere(j, tolerance::CONE)? {
        return Err(Error::NotRootSphere);
    }
    let stem = f.stem_at(alpha, beta)?;
    let plus = stem.at(j).norm();
    let minus = f.eval_at(alpha, -beta, j)?.norm();
    let n = stem.norm();
    let b = NormBounds {
        lhs: n / std::f64::consts::SQRT_2,
        mid: plus.max(minus),
        rhs: n * std::f64::consts::SQRT_2,
    };
    debug_assert!(b.holds(tolerance::SANDWICH_SLACK * (1.0 + n)));
    Ok(b)
}

fn intrinsic_samples(
    f: &SliceFunction,
    n_samples: usize,
    seed: u64,
) -> Vec<(f64, f64, Cl3Element)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_samples);
    let mut attempts = 0;
    while out.len() < n_samples && attempts < 50 * n_samples.max(1) {
        attempts += 1;
        let (alpha, beta) = match &f.stem.domain {
            Some(d) => match d.random_cell_center(&mut rng) {
                Some(p) => p,
                None => break,
            },
            None => (rng.random_range(-2.0..2.0), rng.random_range(0.05..2.0)),
        };
        let i = sample_root_sphere_with(&mut rng);
        if f.stem_at(alpha, beta).is_ok() && f.stem_at(alpha, -beta).is_ok() {
            out.push((alpha, beta, i));
        }
    }
    out
}

/// Tests `f(α − Iβ) = conj(f(α + Iβ))` on sampled points.
pub fn is_intrinsic(f: &SliceFunction, n_samples: usize, seed: u64) -> bool {
    let samples = intrinsic_samples(f, n_samples.max(1), seed);
    !samples.is_empty()
        && samples.iter().all(|(alpha, beta, i)| {
            let (Ok(a), Ok(b)) = (f.eval_at(*alpha, -*beta, i), f.eval_at(*alpha, *beta, i)) else {
                return false;
            };
            a.max_abs_diff(&b.conj()) <= tolerance::RECONSTRUCT * (1.0 + b.max_abs())
        })
}

/// Tests whether both stem components are real-valued on sampled points.
pub fn stem_is_real(f: &SliceFunction, n_samples: usize, seed: u64) -> bool {
    let samples = intrinsic_samples(f, n_samples.max(1), seed);
    !samples.is_empty()
        && samples
            .iter()
            .all(|(alpha, beta, _)| match f.stem_at(*alpha, *beta) {
                Ok(v) => {
                    let s = tolerance::RECONSTRUCT * (1.0 + v.norm());
                    v.f1.non_real_magnitude() <= s && v.f2.non_real_magnitude() <= s
                }
                Err(_) => false,
            })
}

/// An orthonormal completion `(I₁ = I, I₂, I₃)` satisfying
/// `I_r I_s + I_s I_r = -2 δ_rs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompletionBasis {
    pub units: [Cl3Element; 3],
}

fn orthogonal_unit(u: &Quaternion) -> Quaternion {
    let v = [u.x, u.y, u.z];
    // Cross with the axis least aligned with u.
    let axis = (0..3)
        .min_by(|a, b| v[*a].abs().total_cmp(&v[*b].abs()))
        .unwrap_or(0);
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let c = [
        v[1] * e[2] - v[2] * e[1],
        v[2] * e[0] - v[0] * e[2],
        v[0] * e[1] - v[1] * e[0],
    ];
    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    Quaternion::new(0.0, c[0] / n, c[1] / n, c[2] / n)
}

impl CompletionBasis {
    /// Completes `I` factorwise: with `I = ω₊u + ω₋v`, picks unit imaginary
    /// `u₂ ⊥ u`, `v₂ ⊥ v` and sets `I₂ = ω₊u₂ + ω₋v₂`,
    /// `I₃ = ω₊(u u₂) − ω₋(v v₂)`.
    pub fn complete(i: &Cl3Element) -> Result<Self> {
        if !in_root_sphere(i, tolerance::CONE)? {
            return Err(Error::NotRootSphere);
        }
        let s = i.split();
        let (u, v) = (s.q, s.p);
        let (u2, v2) = (orthogonal_unit(&u), orthogonal_unit(&v));
        let basis = CompletionBasis {
            units: [
                *i,
                root_from_pair(u2, v2),
                root_from_pair(u * u2, -(v * v2)),
            ],
        };
        basis.validate()?;
        Ok(basis)
    }

    pub fn new(units: [Cl3Element; 3]) -> Result<Self> {
        let b = CompletionBasis { units };
        b.validate()?;
        Ok(b)
    }

    /// Largest deviation from the anticommutation relations, plus a check
    /// that the eight products `I_A` span the algebra.
    pub fn validate(&self) -> Result<()> {
        let mut residual = 0.0f64;
        for r in 0..3 {
            for s in 0..3 {
                let (a, b) = (self.units[r], self.units[s]);
                let mut target = Cl3Element::ZERO;
                if r == s {
                    target = Cl3Element::scalar(-2.0);
                }
                residual = residual.max((a * b + b * a).max_abs_diff(&target));
            }
        }
        if residual > tolerance::REL {
            return Err(Error::BadBasis { residual });
        }
        if self.products_matrix().determinant().abs() < 1e-6 {
            return Err(Error::BadBasis {
                residual: f64::INFINITY,
            });
        }
        Ok(())
    }

    /// `I_A` for `A ⊆ {1,2,3}` in the order `∅, 1, 2, 3, 12, 13, 23, 123`.
    pub fn products(&self) -> [Cl3Element; DIM] {
        let [i1, i2, i3] = self.units;
        [
            Cl3Element::ONE,
            i1,
            i2,
            i3,
            i1 * i2,
            i1 * i3,
            i2 * i3,
            i1 * i2 * i3,
        ]
    }

    fn products_matrix(&self) -> SMatrix<f64, DIM, DIM> {
        let prods = self.products();
        SMatrix::<f64, DIM, DIM>::from_fn(|row, col| prods[col].coeffs()[row])
    }

    /// Real coordinates `r_A` with `x = Σ r_A I_A`.
    pub fn coordinates(&self, x: &Cl3Element) -> Result<[f64; DIM]> {
        let lu = self.products_matrix().lu();
        let sol = lu
            .solve(&SVector::<f64, DIM>::from_column_slice(x.coeffs()))
            .ok_or(Error::Singular)?;
        let mut out = [0.0; DIM];
        out.copy_from_slice(sol.as_slice());
        Ok(out)
    }
}

/// Index pairs `(B, 1∪B)` into [`CompletionBasis::products`] for
/// `B = ∅, {2}, {3}, {2,3}`.
pub const REFINED_PAIRS: [(usize, usize); 4] = [(0, 1), (2, 4), (3, 5), (6, 7)];

/// The four `ℂ_I`-valued components `F_B`, `B ⊆ {2,3}`, of
/// `f_I = Σ_B F_B I_B` at each sample, with `F_B = a + bI` stored as the
/// complex number `a + ib`. Their eight real parts are the coordinates of
/// `f_I` on the basis `I_A`, `A ⊆ {1,2,3}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinedSplit {
    pub points: Vec<(f64, f64)>,
    pub components: Vec<[Complex<f64>; 4]>,
    pub max_residual: f64,
}

impl RefinedSplit {
    /// `[r_∅, r_1, r_2, r_3, r_12, r_13, r_23, r_123]` at sample `k`.
    pub fn real_components(&self, k: usize) -> [f64; DIM] {
        let mut r = [0.0; DIM];
        for (b, (lo, hi)) in REFINED_PAIRS.iter().enumerate() {
            r[*lo] = self.components[k][b].re;
            r[*hi] = self.components[k][b].im;
        }
        r
    }
}

/// Reassembles `Σ_B (a_B + b_B I) I_B` from the refined components.
pub fn refined_reassemble(basis: &CompletionBasis, comps: &[Complex<f64>; 4]) -> Cl3Element {
    let prods = basis.products();
    REFINED_PAIRS
        .iter()
        .zip(comps.iter())
        .fold(Cl3Element::ZERO, |acc, ((lo, hi), c)| {
            acc + prods[*lo] * c.re + prods[*hi] * c.im
        })
}

/// Splits the restriction of `f` to the slice `ℂ_I` into the refined
/// components over a completion basis of `I`. `samples` are plane points
/// `(α, β)`, evaluated at `α + βI`.
pub fn refined_split_components(
    f: &SliceFunction,
    i: &Cl3Element,
    basis: &CompletionBasis,
    samples: &[(f64, f64)],
) -> Result<RefinedSplit> {
    basis.validate()?;
    if basis.units[0].max_abs_diff(i) > tolerance::RECONSTRUCT {
        return Err(Error::BadBasis {
            residual: basis.units[0].max_abs_diff(i),
        });
    }
    let lu = basis.products_matrix().lu();
    let mut components = Vec::with_capacity(samples.len());
    let mut max_residual = 0.0f64;
    for &(alpha, beta) in samples {
        let value = f.eval_at(alpha, beta, i)?;
        let sol = lu
            .solve(&SVector::<f64, DIM>::from_column_slice(value.coeffs()))
            .ok_or(Error::Singular)?;
        let mut comps = [Complex::new(0.0, 0.0); 4];
        for (b, (lo, hi)) in REFINED_PAIRS.iter().enumerate() {
            comps[b] = Complex::new(sol[*lo], sol[*hi]);
        }
        let rebuilt = refined_reassemble(basis, &comps);
        max_residual = max_residual.max(rebuilt.max_abs_diff(&value));
        components.push(comps);
    }
    Ok(RefinedSplit {
        points: samples.to_vec(),
        components,
        max_residual,
    })
}
