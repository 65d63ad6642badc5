//! Least-squares approximation of slice functions by slice polynomials and
//! by rational slice functions with prescribed poles, with sup-norm error
//! estimates on sampled compact sets.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::Cl3Element;
use crate::cone::{sample_root_sphere, sample_root_sphere_with};
use crate::error::{Error, Result};
use crate::runge::{analyze_grids, rasterize_pair};
use crate::stem::{CompletionBasis, Pole, SliceFunction, StemKind, StemValue, REFINED_PAIRS};
use crate::topology::{cells_by_label, nearest_to_centroid, DomainGrid, DomainSpec};

/// Minimum distance, in cells, between a sample and the boundary of `D`.
pub const SAMPLE_MARGIN_CELLS: usize = 2;

/// Sampling parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SamplerConfig {
    /// Minimum number of plane samples, conjugates included.
    pub plane_samples: usize,
    pub unit_samples: usize,
    /// Distance from `∂D` to `K`, in plane units.
    pub erosion: f64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            plane_samples: 400,
            unit_samples: 16,
            erosion: 0.25,
            seed: 0,
        }
    }
}

/// A sampled compact symmetric set `K ⊂ D` and sampled imaginary units.
#[derive(Clone, Debug)]
pub struct CompactSampler {
    pub domain: Arc<DomainGrid>,
    /// Plane points; every point with `β ≠ 0` appears with its conjugate.
    pub plane: Vec<(f64, f64)>,
    pub units: Vec<Cl3Element>,
    pub seed: u64,
}

impl CompactSampler {
    /// `K` is `D` eroded by `config.erosion` (at least two cells). All
    /// boundary cells of `K` are sampled, plus evenly strided interior cells.
    pub fn from_domain(domain: Arc<DomainGrid>, config: &SamplerConfig) -> Result<Self> {
        let cells =
            ((config.erosion * domain.frame().resolution).ceil() as usize).max(SAMPLE_MARGIN_CELLS);
        let k = domain.erode(cells);
        let (nx, h) = (k.nx(), k.axis_row());
        let mut boundary = Vec::new();
        let mut interior = Vec::new();
        for j in h..k.ny() {
            for i in 0..nx {
                if !k.cell(i, j) {
                    continue;
                }
                let edge = [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .any(|(di, dj)| {
                        let (a, b) = (i as isize + di, j as isize + dj);
                        a < 0
                            || b < 0
                            || a >= nx as isize
                            || b >= k.ny() as isize
                            || !k.cell(a as usize, b as usize)
                    });
                if edge {
                    boundary.push((i, j));
                } else {
                    interior.push((i, j));
                }
            }
        }
        // Axis-row samples have no separate conjugate.
        let axis = boundary
            .iter()
            .chain(&interior)
            .filter(|&&(_, j)| j == h)
            .count();
        let upper_target = config.plane_samples.div_ceil(2) + axis.div_ceil(2);
        let mut chosen = boundary;
        if chosen.len() < upper_target && !interior.is_empty() {
            let want = upper_target - chosen.len();
            let stride = (interior.len() as f64 / want as f64).max(1.0);
            let mut t = 0.0;
            while (t as usize) < interior.len() {
                chosen.push(interior[t as usize]);
                t += stride;
            }
        }
        chosen.sort_by_key(|&(i, j)| (j, i));
        let mut plane = Vec::with_capacity(2 * chosen.len());
        for (i, j) in chosen {
            let (x, y) = k.cell_center(i, j);
            plane.push((x, y));
            if j > h {
                plane.push((x, -y));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let units = (0..config.unit_samples.max(1))
            .map(|_| sample_root_sphere_with(&mut rng))
            .collect();
        Ok(CompactSampler {
            domain,
            plane,
            units,
            seed: config.seed,
        })
    }

    /// Explicit plane points; conjugates are added. Each point must be at
    /// least two cells inside `D`.
    pub fn from_points(
        domain: Arc<DomainGrid>,
        points: &[(f64, f64)],
        unit_samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let inner = domain.erode(SAMPLE_MARGIN_CELLS);
        let mut plane = Vec::with_capacity(2 * points.len());
        for &(x, y) in points {
            if !inner.contains_point(x, y) || !inner.contains_point(x, -y) {
                return Err(Error::SampleOutsideDomain { x, y });
            }
            plane.push((x, y));
            if y != 0.0 {
                plane.push((x, -y));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let units = (0..unit_samples.max(1))
            .map(|_| sample_root_sphere_with(&mut rng))
            .collect();
        Ok(CompactSampler {
            domain,
            plane,
            units,
            seed,
        })
    }

    /// Sup over samples of `|g(α + βJ)|` and of `‖G(α + iβ)‖` for a stem
    /// given at the plane samples.
    pub fn sup_norms(&self, values: &[StemValue]) -> (f64, f64) {
        let mut sup = 0.0f64;
        let mut stem = 0.0f64;
        for v in values {
            stem = stem.max(v.norm());
            for u in &self.units {
                sup = sup.max(v.at(u).norm());
            }
        }
        (sup, stem)
    }
}

/// One column of the approximation family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisFunction {
    /// `(z / scale)^k`.
    Monomial { k: usize, scale: f64 },
    /// `(scale / (z − a))^j`.
    RealPole { a: f64, j: usize, scale: f64 },
    /// `((z − α)/s)^e (s² / Q(z))^j` with `Q = (z − α)² + β²`.
    SpherePole {
        alpha: f64,
        beta: f64,
        e: usize,
        j: usize,
        scale: f64,
    },
}

impl BasisFunction {
    pub fn eval(&self, z: Complex<f64>) -> Complex<f64> {
        match *self {
            BasisFunction::Monomial { k, scale } => (z / scale).powi(k as i32),
            BasisFunction::RealPole { a, j, scale } => {
                (Complex::new(scale, 0.0) / (z - a)).powi(j as i32)
            }
            BasisFunction::SpherePole {
                alpha,
                beta,
                e,
                j,
                scale,
            } => {
                let w = z - alpha;
                let q = w * w + beta * beta;
                (w / scale).powi(e as i32) * (Complex::new(scale * scale, 0.0) / q).powi(j as i32)
            }
        }
    }
}

/// A fitted function `Σ φ_m(z) c_m` with real-coefficient basis functions
/// `φ_m` and right coefficients `c_m ∈ ℝ₃`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Approximant {
    pub basis: Vec<BasisFunction>,
    pub coeffs: Vec<Cl3Element>,
}

impl Approximant {
    pub fn stem(&self, alpha: f64, beta: f64) -> StemValue {
        let z = Complex::new(alpha, beta);
        let mut out = StemValue::default();
        for (phi, c) in self.basis.iter().zip(&self.coeffs) {
            let v = phi.eval(z);
            out.f1 += *c * v.re;
            out.f2 += *c * v.im;
        }
        out
    }

    pub fn eval_at(&self, alpha: f64, beta: f64, j: &Cl3Element) -> Cl3Element {
        self.stem(alpha, beta).at(j)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxResult {
    pub degree: usize,
    pub sup_error: f64,
    pub stem_error: f64,
    pub approximant: Approximant,
}

fn family(poles: &[Pole], degree: usize, sampler: &CompactSampler) -> Vec<BasisFunction> {
    let zs = sampler.plane.iter().map(|&(a, b)| Complex::new(a, b));
    let radius = zs.clone().fold(0.0f64, |m, z| m.max(z.norm())).max(1e-300);
    let mut basis: Vec<BasisFunction> = (0..=degree)
        .map(|k| BasisFunction::Monomial { k, scale: radius })
        .collect();
    for pole in poles {
        match *pole {
            Pole::Infinity => {}
            Pole::Real { alpha } => {
                let scale = zs
                    .clone()
                    .fold(f64::INFINITY, |m, z| m.min((z - alpha).norm()));
                basis.extend((1..=degree).map(|j| BasisFunction::RealPole { a: alpha, j, scale }));
            }
            Pole::Sphere { alpha, beta } => {
                let scale = zs
                    .clone()
                    .fold(f64::INFINITY, |m, z| {
                        let w = z - alpha;
                        m.min((w * w + beta * beta).norm())
                    })
                    .sqrt();
                for j in 1..=degree {
                    for e in 0..2 {
                        basis.push(BasisFunction::SpherePole {
                            alpha,
                            beta,
                            e,
                            j,
                            scale,
                        });
                    }
                }
            }
        }
    }
    basis
}

/// Stem values of `f` at the plane samples.
pub fn sample_stem(f: &SliceFunction, sampler: &CompactSampler) -> Result<Vec<StemValue>> {
    sampler
        .plane
        .iter()
        .map(|&(a, b)| f.stem_at(a, b))
        .collect()
}

/// Rejects poles lying in `D`. Poles on the boundary are allowed; since
/// boundary cells are ambiguous at raster scale, only poles in `D` eroded by
/// one cell count as inside.
fn check_poles(f: &SliceFunction, poles: &[Pole], sampler: &CompactSampler) -> Result<()> {
    let inner = sampler.domain.erode(1);
    let own: &[Pole] = match &f.stem.kind {
        StemKind::Rational(r) => r.poles(),
        _ => &[],
    };
    for p in poles.iter().chain(own) {
        if let Some((alpha, beta)) = p.plane_point() {
            if inner.contains_point(alpha, beta) {
                return Err(Error::PoleInsideDomain { alpha, beta });
            }
        }
    }
    Ok(())
}

/// Fits the family on the slice `ℂ_I` through the four `ℂ_I`-valued refined
/// components; since the samples are closed under conjugation this is the
/// least-squares problem for the stem itself.
fn fit(
    targets: &[StemValue],
    sampler: &CompactSampler,
    basis_fns: Vec<BasisFunction>,
    degree: usize,
) -> Result<ApproxResult> {
    let rows = sampler.plane.len();
    let cols = basis_fns.len();
    if cols > rows {
        return Err(Error::DegreeTooLargeForSamples {
            degree,
            unknowns: cols,
            equations: rows,
        });
    }
    let i = sample_root_sphere(sampler.seed ^ 0x9e37_79b9_7f4a_7c15);
    let basis = CompletionBasis::complete(&i)?;
    let products = basis.products();
    let mut a = DMatrix::<Complex<f64>>::zeros(rows, cols);
    for (r, &(x, y)) in sampler.plane.iter().enumerate() {
        let z = Complex::new(x, y);
        for (c, phi) in basis_fns.iter().enumerate() {
            a[(r, c)] = phi.eval(z);
        }
    }
    let mut col_scale = vec![1.0; cols];
    for (c, s) in col_scale.iter_mut().enumerate() {
        let m = a.column(c).iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if m > 0.0 {
            *s = m;
            a.column_mut(c).iter_mut().for_each(|v| *v /= m);
        }
    }
    let mut b = DMatrix::<Complex<f64>>::zeros(rows, 4);
    for (r, t) in targets.iter().enumerate() {
        let coords = basis.coordinates(&t.at(&i))?;
        for (k, (lo, hi)) in REFINED_PAIRS.iter().enumerate() {
            b[(r, k)] = Complex::new(coords[*lo], coords[*hi]);
        }
    }
    let sol = least_squares(a, &b)?;
    let coeffs = (0..cols)
        .map(|c| {
            (0..4).fold(Cl3Element::ZERO, |acc, k| {
                let g = sol[(c, k)] / col_scale[c];
                let (lo, hi) = REFINED_PAIRS[k];
                // (Re γ + I Im γ) I_B
                acc + products[lo] * g.re + products[hi] * g.im
            })
        })
        .collect();
    let approximant = Approximant {
        basis: basis_fns,
        coeffs,
    };
    let residuals: Vec<StemValue> = sampler
        .plane
        .iter()
        .zip(targets)
        .map(|(&(x, y), t)| t.sub(&approximant.stem(x, y)))
        .collect();
    let (sup_error, stem_error) = sampler.sup_norms(&residuals);
    Ok(ApproxResult {
        degree,
        sup_error,
        stem_error,
        approximant,
    })
}

/// Least squares by Householder QR; falls back to a truncated SVD when the
/// triangular factor is singular.
fn least_squares(
    a: DMatrix<Complex<f64>>,
    b: &DMatrix<Complex<f64>>,
) -> Result<DMatrix<Complex<f64>>> {
    let qr = a.clone().qr();
    let rhs = qr.q().adjoint() * b;
    let r = qr.r();
    let rmax = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let well_posed = r.diagonal().iter().all(|v| v.norm() > 1e-13 * rmax);
    if well_posed {
        if let Some(x) = r.solve_upper_triangular(&rhs) {
            return Ok(x);
        }
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    svd.solve(b, smax * 1e-14).map_err(|_| Error::Singular)
}

/// Least-squares slice polynomial of the given degree.
pub fn poly_approx(
    f: &SliceFunction,
    sampler: &CompactSampler,
    degree: usize,
) -> Result<ApproxResult> {
    rational_approx(f, sampler, &[Pole::Infinity], degree)
}

/// Least-squares rational slice function with poles only at the prescribed
/// points: polynomial part of the given degree plus principal parts of
/// order up to `degree` at each finite pole.
pub fn rational_approx(
    f: &SliceFunction,
    sampler: &CompactSampler,
    poles: &[Pole],
    degree: usize,
) -> Result<ApproxResult> {
    check_poles(f, poles, sampler)?;
    let targets = sample_stem(f, sampler)?;
    fit(&targets, sampler, family(poles, degree, sampler), degree)
}

fn rational_approx_sampled(
    targets: &[StemValue],
    sampler: &CompactSampler,
    poles: &[Pole],
    degree: usize,
) -> Result<ApproxResult> {
    fit(targets, sampler, family(poles, degree, sampler), degree)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentVerdict {
    Convergent,
    Stalled,
    Inconclusive,
}

/// Threshold on last-quartile errors for a convergent verdict.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-5;
/// Fit-noise floor when `f` is not in the approximation family.
pub const DEFAULT_NOISE_FLOOR: f64 = 1e-12;
/// A stall needs every error to be at least this multiple of the floor.
pub const STALL_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorRow {
    pub degree: usize,
    pub sup_error: f64,
    pub stem_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub rows: Vec<ErrorRow>,
    pub verdict: ExperimentVerdict,
    pub noise_floor: f64,
    pub poles: Vec<Pole>,
    pub runge_pair: bool,
    /// Convergent exactly when the pair is a Runge pair.
    pub agrees: bool,
    pub plane_samples: usize,
    pub unit_samples: usize,
}

/// Classifies an error curve.
pub fn classify(errors: &[f64], noise_floor: f64) -> ExperimentVerdict {
    if errors.is_empty() {
        return ExperimentVerdict::Inconclusive;
    }
    let start = errors.len() - errors.len().div_ceil(4);
    if errors[start..].iter().all(|e| *e < CONVERGENCE_THRESHOLD) {
        return ExperimentVerdict::Convergent;
    }
    let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
    if min >= STALL_FACTOR * noise_floor {
        ExperimentVerdict::Stalled
    } else {
        ExperimentVerdict::Inconclusive
    }
}

/// One pole per bounded complement component of `D₁` (mirror pairs share a
/// sphere): the centre of the component cell nearest its centroid, plus `∞`.
pub fn pole_representatives(d1: &DomainGrid) -> Vec<Pole> {
    let labels = d1.labels();
    let nx = d1.nx();
    let comps = cells_by_label(nx, &labels.complement, labels.n_complement);
    let mut poles = Vec::new();
    let mut seen = vec![false; labels.n_complement];
    for (l, cells) in comps.iter().enumerate() {
        if !labels.complement_bounded[l] || seen[l] {
            continue;
        }
        let (i, j) = cells[0];
        let mirror = labels.complement[d1.mirror_row(j) * nx + i] as usize;
        seen[l] = true;
        seen[mirror] = true;
        let [x, y] = nearest_to_centroid(d1, cells).expect("nonempty");
        poles.push(if y == 0.0 {
            Pole::Real { alpha: x }
        } else {
            Pole::Sphere {
                alpha: x,
                beta: y.abs(),
            }
        });
    }
    poles.push(Pole::Infinity);
    poles
}

fn noise_floor(
    f: &SliceFunction,
    targets: &[StemValue],
    sampler: &CompactSampler,
    poles: &[Pole],
    max_degree: usize,
) -> Result<f64> {
    let in_family = match &f.stem.kind {
        StemKind::Polynomial(p) => p.degree() <= max_degree,
        StemKind::Rational(r) => r.poles().iter().all(|p| {
            let (a, b) = p.plane_point().expect("finite pole");
            poles.iter().any(|q| match q.plane_point() {
                Some((c, d)) => (a - c).abs() + (b - d).abs() <= 1e-6 * (1.0 + a.abs() + b.abs()),
                None => false,
            })
        }),
        StemKind::Tabulated(_) => false,
    };
    if !in_family {
        return Ok(DEFAULT_NOISE_FLOOR);
    }
    Ok(rational_approx_sampled(targets, sampler, poles, max_degree)?.sup_error)
}

/// Approximates `f` on a compact subset of `D` by functions regular on the
/// larger domain `D₁` and compares the outcome with the Runge verdict.
pub fn runge_experiment(
    d: &DomainSpec,
    d1: &DomainSpec,
    f: &SliceFunction,
    degrees: &[usize],
    config: &SamplerConfig,
) -> Result<ExperimentRecord> {
    let (gd, gd1) = rasterize_pair(d, d1)?;
    let report = analyze_grids(&gd, &gd1)?;
    let poles = pole_representatives(&gd1);
    let sampler = CompactSampler::from_domain(Arc::new(gd), config)?;
    check_poles(f, &[], &sampler)?;
    let targets = sample_stem(f, &sampler)?;
    let results: Vec<Result<ApproxResult>> = degrees
        .par_iter()
        .map(|&deg| rational_approx_sampled(&targets, &sampler, &poles, deg))
        .collect();
    let mut rows = Vec::with_capacity(degrees.len());
    for r in results {
        let r = r?;
        rows.push(ErrorRow {
            degree: r.degree,
            sup_error: r.sup_error,
            stem_error: r.stem_error,
        });
    }
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let floor = noise_floor(f, &targets, &sampler, &poles, max_degree)?;
    let errors: Vec<f64> = rows.iter().map(|r| r.sup_error).collect();
    let verdict = classify(&errors, floor);
    let agrees = match verdict {
        ExperimentVerdict::Convergent => report.runge_pair,
        ExperimentVerdict::Stalled => !report.runge_pair,
        ExperimentVerdict::Inconclusive => false,
    };
    Ok(ExperimentRecord {
        rows,
        verdict,
        noise_floor: floor,
        poles,
        runge_pair: report.runge_pair,
        agrees,
        plane_samples: sampler.plane.len(),
        unit_samples: sampler.units.len(),
    })
}

impl ExperimentRecord {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,sup_error,stem_error\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{:e},{:e}", r.degree, r.sup_error, r.stem_error);
        }
        out
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>6}  {:>12}  {:>12}",
            "degree", "sup_error", "stem_error"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>6}  {:>12.4e}  {:>12.4e}",
                r.degree, r.sup_error, r.stem_error
            );
        }
        let v = match self.verdict {
            ExperimentVerdict::Convergent => "convergent",
            ExperimentVerdict::Stalled => "stalled",
            ExperimentVerdict::Inconclusive => "inconclusive",
        };
        let _ = writeln!(out, "verdict      {v}");
        let _ = writeln!(out, "noise floor  {:.3e}", self.noise_floor);
        let _ = writeln!(
            out,
            "runge pair   {}",
            if self.runge_pair { "yes" } else { "no" }
        );
        let _ = writeln!(
            out,
            "agrees       {}",
            if self.agrees { "yes" } else { "no" }
        );
        out
    }
}

/// Default degree list `0..=40`.
pub fn default_degrees() -> Vec<usize> {
    (0..=40).collect()
}
