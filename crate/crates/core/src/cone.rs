//! The quadratic cone (elements with real trace and real norm), its sphere of
//! square roots of `-1`, and slice coordinates `x = α + β J`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::clifford::{Cl3Element, QuatPair, Quaternion, E0, E1, E12, E123, E13, E2, E23, E3};
use crate::error::{Error, Result};

/// Non-real residuals of a membership test, computed two ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeResiduals {
    /// Largest non-real coefficient of `t(x)`.
    pub trace: f64,
    /// Largest non-real coefficient of `n(x)`.
    pub norm: f64,
    /// `|x123|`.
    pub trivector: f64,
    /// `|x2 x13 - x1 x23 - x3 x12|`.
    pub quadric: f64,
    /// `tol` multiplier, `1 + |x| + |x|^2`.
    pub scale: f64,
}

pub fn cone_residuals(x: &Cl3Element) -> ConeResiduals {
    let c = x.coeffs();
    let r = x.norm();
    ConeResiduals {
        trace: x.trace().non_real_magnitude(),
        norm: x.norm_form().non_real_magnitude(),
        trivector: c[E123].abs(),
        quadric: (c[E2] * c[E13] - c[E1] * c[E23] - c[E3] * c[E12]).abs(),
        scale: 1.0 + r + r * r,
    }
}

fn check_finite(x: &Cl3Element) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Cone membership through `t(x), n(x) ∈ ℝ`. The inequality `4n > t²` is
/// implied for this algebra and is not tested.
pub fn in_cone(x: &Cl3Element, tol: f64) -> Result<bool> {
    check_finite(x)?;
    let r = cone_residuals(x);
    Ok(r.trace.max(r.norm) <= tol * r.scale)
}

/// Cone membership through the algebraic equations
/// `x123 = 0` and `x2 x13 - x1 x23 - x3 x12 = 0`.
///
/// The residuals are doubled so both tests compare the same quantities as
/// [`in_cone`] on the locus `x123 = 0`, where `t` and `n` reduce to
/// `2 x123` and `2 (x2 x13 - x1 x23 - x3 x12)`.
pub fn in_cone_algebraic(x: &Cl3Element, tol: f64) -> Result<bool> {
    check_finite(x)?;
    let r = cone_residuals(x);
    Ok(2.0 * r.trivector.max(r.quadric) <= tol * r.scale)
}

/// `x² = -1` within `tol`.
pub fn in_root_sphere(x: &Cl3Element, tol: f64) -> Result<bool> {
    check_finite(x)?;
    let sq = *x * *x + Cl3Element::ONE;
    Ok(sq.max_abs() <= tol * (1.0 + x.norm_sqr()))
}

/// Both split components are unit imaginary quaternions within `tol`.
pub fn in_root_sphere_split(x: &Cl3Element, tol: f64) -> Result<bool> {
    check_finite(x)?;
    let QuatPair { q, p } = x.split();
    let unit_imag = |u: &Quaternion| u.w.abs() <= tol && (u.norm_sqr() - 1.0).abs() <= tol;
    Ok(unit_imag(&q) && unit_imag(&p))
}

/// `ω₊ I₁ + ω₋ I₂` for unit imaginary quaternions `I₁, I₂`.
pub fn root_from_pair(i1: Quaternion, i2: Quaternion) -> Cl3Element {
    QuatPair::new(i1, i2).unsplit()
}

fn unit_imaginary<R: rand::Rng>(rng: &mut R) -> Quaternion {
    loop {
        let v: [f64; 3] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-8 {
            return Quaternion::new(0.0, v[0] / n, v[1] / n, v[2] / n);
        }
    }
}

/// Draws a point of the root sphere from `S² × S²` with independent
/// uniform factors.
pub fn sample_root_sphere(seed: u64) -> Cl3Element {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_root_sphere_with(&mut rng)
}

pub fn sample_root_sphere_with<R: rand::Rng>(rng: &mut R) -> Cl3Element {
    let i1 = unit_imaginary(rng);
    let i2 = unit_imaginary(rng);
    root_from_pair(i1, i2)
}

/// Whether `ℂ_J ∩ ℂ_K` is only the real line: `a + bJ = c + dK` forces
/// `b = d = 0` exactly when the imaginary parts of `J` and `K` are linearly
/// independent, i.e. their Gram determinant is positive.
pub fn slices_meet_only_on_reals(j: &Cl3Element, k: &Cl3Element) -> bool {
    let mut jv = *j.coeffs();
    let mut kv = *k.coeffs();
    jv[E0] = 0.0;
    kv[E0] = 0.0;
    let dot = |a: &[f64; 8], b: &[f64; 8]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let (jj, kk, jk) = (dot(&jv, &jv), dot(&kv, &kv), dot(&jv, &kv));
    jj * kk - jk * jk > 1e-12 * jj * kk
}

/// Slice coordinates of a cone point. `j` is `None` for real points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceCoords {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "J")]
    pub j: Option<Cl3Element>,
}

impl SliceCoords {
    pub fn point(&self) -> Cl3Element {
        match self.j {
            Some(j) => Cl3Element::scalar(self.alpha) + j * self.beta,
            None => Cl3Element::scalar(self.alpha),
        }
    }
}

/// Writes a cone point as `α + β J` with `β ≥ 0`.
pub fn slice_coords(x: &Cl3Element, tol: f64) -> Result<SliceCoords> {
    if !in_cone(x, tol)? {
        let r = cone_residuals(x);
        return Err(Error::NotInCone {
            residual: r.trace.max(r.norm),
        });
    }
    let alpha = 0.5 * x.trace().real_part();
    let n = x.norm_form().real_part();
    let beta = (n - alpha * alpha).max(0.0).sqrt();
    if beta <= tol {
        return Ok(SliceCoords {
            alpha,
            beta: 0.0,
            j: None,
        });
    }
    let raw = (*x - Cl3Element::scalar(alpha)) * (1.0 / beta);
    Ok(SliceCoords {
        alpha,
        beta,
        j: Some(normalize_root(&raw)),
    })
}

/// Projects an approximate square root of `-1` back onto the root sphere by
/// normalising the imaginary parts of both split components.
pub fn normalize_root(x: &Cl3Element) -> Cl3Element {
    let QuatPair { q, p } = x.split();
    let fix = |u: Quaternion| {
        let n = u.imag_norm();
        if n == 0.0 {
            u
        } else {
            Quaternion::new(0.0, u.x / n, u.y / n, u.z / n)
        }
    };
    root_from_pair(fix(q), fix(p))
}

/// Ranks of the homology of the root sphere `S² × S²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SphereHomologyTable {
    /// `ranks[k]` is the rank of `H_k` for `k = 0..=6`.
    pub ranks: [usize; 7],
}

impl SphereHomologyTable {
    /// Künneth product of two copies of the homology of `S²`. All groups are
    /// free, so ranks convolve.
    pub fn compute() -> Self {
        let s2 = [1usize, 0, 1];
        let mut ranks = [0usize; 7];
        for (a, ra) in s2.iter().enumerate() {
            for (b, rb) in s2.iter().enumerate() {
                ranks[a + b] += ra * rb;
            }
        }
        SphereHomologyTable { ranks }
    }

    pub fn rank(&self, k: usize) -> usize {
        self.ranks.get(k).copied().unwrap_or(0)
    }

    /// Euler characteristic, `χ(S²)² = 4`.
    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(k, r)| if k % 2 == 0 { *r as i64 } else { -(*r as i64) })
            .sum()
    }
}
