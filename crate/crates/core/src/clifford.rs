//! Arithmetic in the real Clifford algebra on three anticommuting generators
//! `e1, e2, e3` with `e_i e_j + e_j e_i = -2 δ_ij`.
//!
//! Elements are stored as eight coefficients on the fixed basis
//! `[e0, e1, e2, e3, e12, e13, e23, e123]`. The multiplication table is
//! generated at compile time by normalising generator words, and the even
//! subalgebra is identified with the quaternions through an embedding whose
//! signs are also searched at compile time.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::tolerance;

/// Number of real coefficients of an element.
pub const DIM: usize = 8;

/// Generator bitmask of each basis blade, in coefficient order
/// (bit 0 = e1, bit 1 = e2, bit 2 = e3).
pub const BASIS_MASKS: [u8; DIM] = [0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111];

pub const BASIS_NAMES: [&str; DIM] = ["e0", "e1", "e2", "e3", "e12", "e13", "e23", "e123"];

pub const E0: usize = 0;
pub const E1: usize = 1;
pub const E2: usize = 2;
pub const E3: usize = 3;
pub const E12: usize = 4;
pub const E13: usize = 5;
pub const E23: usize = 6;
pub const E123: usize = 7;

const fn index_of_mask(mask: u8) -> usize {
    let mut i = 0;
    while i < DIM {
        if BASIS_MASKS[i] == mask {
            return i;
        }
        i += 1;
    }
    panic!("mask outside the basis");
}

/// Multiplies two basis blades by concatenating their generator words,
/// bubble-sorting with one sign flip per transposition, and cancelling
/// adjacent equal generators with `e_i e_i = -1`.
const fn blade_product(a: usize, b: usize) -> (i8, usize) {
    let mut word = [0u8; 6];
    let mut len = 0;
    let mut g = 0;
    while g < 3 {
        if BASIS_MASKS[a] & (1 << g) != 0 {
            word[len] = g as u8;
            len += 1;
        }
        g += 1;
    }
    g = 0;
    while g < 3 {
        if BASIS_MASKS[b] & (1 << g) != 0 {
            word[len] = g as u8;
            len += 1;
        }
        g += 1;
    }

    let mut sign: i8 = 1;
    let mut swapped = true;
    while swapped {
        swapped = false;
        let mut k = 0;
        while k + 1 < len {
            if word[k] > word[k + 1] {
                let t = word[k];
                word[k] = word[k + 1];
                word[k + 1] = t;
                sign = -sign;
                swapped = true;
            }
            k += 1;
        }
    }

    let mut mask = 0u8;
    let mut k = 0;
    while k < len {
        if k + 1 < len && word[k] == word[k + 1] {
            sign = -sign;
            k += 2;
        } else {
            mask |= 1 << word[k];
            k += 1;
        }
    }
    (sign, index_of_mask(mask))
}

/// Signed structure constants: `e_a e_b = sign(a, b) * e_index(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductTable {
    entries: [[(i8, usize); DIM]; DIM],
}

impl ProductTable {
    pub const fn generate() -> Self {
        let mut entries = [[(0i8, 0usize); DIM]; DIM];
        let mut a = 0;
        while a < DIM {
            let mut b = 0;
            while b < DIM {
                entries[a][b] = blade_product(a, b);
                b += 1;
            }
            a += 1;
        }
        ProductTable { entries }
    }

    #[inline]
    pub fn entry(&self, a: usize, b: usize) -> (i8, usize) {
        self.entries[a][b]
    }

    /// Returns a copy with the sign of `e_a e_b` flipped. Only useful as a
    /// negative control for the identity checks.
    pub fn with_flipped_sign(mut self, a: usize, b: usize) -> Self {
        self.entries[a][b].0 = -self.entries[a][b].0;
        self
    }

    pub fn mul(&self, x: &Cl3Element, y: &Cl3Element) -> Cl3Element {
        let mut out = [0.0; DIM];
        for (a, &xa) in x.0.iter().enumerate() {
            if xa == 0.0 {
                continue;
            }
            for (b, &yb) in y.0.iter().enumerate() {
                if yb == 0.0 {
                    continue;
                }
                let (s, idx) = self.entries[a][b];
                out[idx] += f64::from(s) * xa * yb;
            }
        }
        Cl3Element(out)
    }
}

/// The product table of the algebra, generated at compile time.
pub const PRODUCT_TABLE: ProductTable = ProductTable::generate();

/// Signs `(s_i, s_j, s_k)` of the embedding `i ↦ s_i e23, j ↦ s_j e13,
/// k ↦ s_k e12` of the quaternions onto the even subalgebra.
pub const EMBED_SIGNS: [i8; 3] = search_embedding();

const EMBED_TARGETS: [usize; 3] = [E23, E13, E12];

const fn search_embedding() -> [i8; 3] {
    let table = ProductTable::generate();
    let mut code = 0;
    while code < 8 {
        let s = [
            if code & 4 == 0 { 1i8 } else { -1 },
            if code & 2 == 0 { 1i8 } else { -1 },
            if code & 1 == 0 { 1i8 } else { -1 },
        ];
        // ij = k, jk = i, ki = j.
        let checks = [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)];
        let mut ok = true;
        let mut c = 0;
        while c < 3 {
            let (u, v, w) = checks[c];
            let (sign, idx) = table.entries[EMBED_TARGETS[u]][EMBED_TARGETS[v]];
            if idx != EMBED_TARGETS[w] || s[u] * s[v] * sign != s[w] {
                ok = false;
            }
            c += 1;
        }
        if ok {
            return s;
        }
        code += 1;
    }
    panic!("no multiplicative embedding of the quaternions found");
}

/// An element of the algebra as eight real coefficients in the order
/// `[x0, x1, x2, x3, x12, x13, x23, x123]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cl3Element(pub [f64; DIM]);

impl Cl3Element {
    pub const ZERO: Cl3Element = Cl3Element([0.0; DIM]);
    pub const ONE: Cl3Element = Cl3Element([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    pub const fn new(coeffs: [f64; DIM]) -> Self {
        Cl3Element(coeffs)
    }

    pub fn basis(index: usize) -> Self {
        let mut c = [0.0; DIM];
        c[index] = 1.0;
        Cl3Element(c)
    }

    pub fn scalar(a: f64) -> Self {
        let mut c = [0.0; DIM];
        c[E0] = a;
        Cl3Element(c)
    }

    /// `x0 e0 + x1 e1 + x2 e2 + x3 e3`.
    pub fn paravector(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Cl3Element([x0, x1, x2, x3, 0.0, 0.0, 0.0, 0.0])
    }

    pub fn coeffs(&self) -> &[f64; DIM] {
        &self.0
    }

    pub fn real_part(&self) -> f64 {
        self.0[E0]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Clifford conjugation: fixes `e0` and `e123`, negates vectors and bivectors.
    pub fn conj(&self) -> Self {
        let c = &self.0;
        Cl3Element([c[0], -c[1], -c[2], -c[3], -c[4], -c[5], -c[6], c[7]])
    }

    /// `t(x) = x + conj(x)`.
    pub fn trace(&self) -> Self {
        *self + self.conj()
    }

    /// `n(x) = x conj(x)`.
    pub fn norm_form(&self) -> Self {
        *self * self.conj()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    /// Largest absolute coefficient outside `e0`.
    pub fn non_real_magnitude(&self) -> f64 {
        self.0[1..].iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Coefficientwise closeness at the crate's relative tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        let scale = self.max_abs().max(other.max_abs());
        self.0
            .iter()
            .zip(other.0.iter())
            .all(|(a, b)| tolerance::close_scaled(*a, *b, scale))
    }

    /// Even part `x0 + x12 e12 + x13 e13 + x23 e23`.
    pub fn even_part(&self) -> Self {
        let c = &self.0;
        Cl3Element([c[0], 0.0, 0.0, 0.0, c[4], c[5], c[6], 0.0])
    }

    pub fn mul_with(&self, other: &Self, table: &ProductTable) -> Self {
        table.mul(self, other)
    }

    /// Decomposes `x = ω₊ q + ω₋ p`.
    pub fn split(&self) -> QuatPair {
        // x = a + e123 b with a, b even; e123 ω± = ±ω±, so q = a + b, p = a - b.
        let a = Quaternion::from_even(&self.even_part());
        let b = Quaternion::from_even(&(pseudoscalar() * *self).even_part());
        QuatPair { q: a + b, p: a - b }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Cl3Element::ONE;
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }
}

pub fn pseudoscalar() -> Cl3Element {
    Cl3Element::basis(E123)
}

/// `ω₊ = (e0 + e123) / 2`.
pub fn omega_plus() -> Cl3Element {
    let mut c = [0.0; DIM];
    c[E0] = 0.5;
    c[E123] = 0.5;
    Cl3Element(c)
}

/// `ω₋ = (e0 - e123) / 2`.
pub fn omega_minus() -> Cl3Element {
    let mut c = [0.0; DIM];
    c[E0] = 0.5;
    c[E123] = -0.5;
    Cl3Element(c)
}

impl Add for Cl3Element {
    type Output = Cl3Element;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.0;
        c.iter_mut().zip(rhs.0.iter()).for_each(|(a, b)| *a += b);
        Cl3Element(c)
    }
}

impl AddAssign for Cl3Element {
    fn add_assign(&mut self, rhs: Self) {
        self.0
            .iter_mut()
            .zip(rhs.0.iter())
            .for_each(|(a, b)| *a += b);
    }
}

impl Sub for Cl3Element {
    type Output = Cl3Element;
    fn sub(self, rhs: Self) -> Self {
        let mut c = self.0;
        c.iter_mut().zip(rhs.0.iter()).for_each(|(a, b)| *a -= b);
        Cl3Element(c)
    }
}

impl Neg for Cl3Element {
    type Output = Cl3Element;
    fn neg(self) -> Self {
        Cl3Element(self.0.map(|c| -c))
    }
}

impl Mul for Cl3Element {
    type Output = Cl3Element;
    fn mul(self, rhs: Self) -> Self {
        PRODUCT_TABLE.mul(&self, &rhs)
    }
}

impl Mul<f64> for Cl3Element {
    type Output = Cl3Element;
    fn mul(self, rhs: f64) -> Self {
        Cl3Element(self.0.map(|c| c * rhs))
    }
}

impl Mul<Cl3Element> for f64 {
    type Output = Cl3Element;
    fn mul(self, rhs: Cl3Element) -> Cl3Element {
        rhs * self
    }
}

impl fmt::Display for Cl3Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, name) in self.0.iter().zip(BASIS_NAMES) {
            if *c == 0.0 {
                continue;
            }
            if first {
                write!(f, "{c}{name}")?;
                first = false;
            } else if *c < 0.0 {
                write!(f, " - {}{name}", -c)?;
            } else {
                write!(f, " + {c}{name}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A quaternion `w + x i + y j + z k` with `ij = k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 4]> for Quaternion {
    fn from(v: [f64; 4]) -> Self {
        Quaternion::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        [q.w, q.x, q.y, q.z]
    }
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn conj(&self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    /// `q + q^c`, a real number.
    pub fn trace(&self) -> f64 {
        2.0 * self.w
    }

    /// `q q^c = |q|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn imag_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Image in the even subalgebra under the fixed embedding.
    pub fn embed(&self) -> Cl3Element {
        let mut c = [0.0; DIM];
        c[E0] = self.w;
        c[EMBED_TARGETS[0]] = f64::from(EMBED_SIGNS[0]) * self.x;
        c[EMBED_TARGETS[1]] = f64::from(EMBED_SIGNS[1]) * self.y;
        c[EMBED_TARGETS[2]] = f64::from(EMBED_SIGNS[2]) * self.z;
        Cl3Element(c)
    }

    /// Inverse of [`Quaternion::embed`] on the even part of `x`.
    pub fn from_even(x: &Cl3Element) -> Self {
        let c = &x.0;
        Quaternion::new(
            c[E0],
            f64::from(EMBED_SIGNS[0]) * c[EMBED_TARGETS[0]],
            f64::from(EMBED_SIGNS[1]) * c[EMBED_TARGETS[1]],
            f64::from(EMBED_SIGNS[2]) * c[EMBED_TARGETS[2]],
        )
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        (self.w - o.w)
            .abs()
            .max((self.x - o.x).abs())
            .max((self.y - o.y).abs())
            .max((self.z - o.z).abs())
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, r: Self) -> Self {
        Quaternion::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, r: Self) -> Self {
        Quaternion::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, r: Self) -> Self {
        let (a, b) = (self, r);
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

/// The image `(q, p)` of an element under the idempotent splitting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuatPair {
    pub q: Quaternion,
    pub p: Quaternion,
}

impl QuatPair {
    pub fn new(q: Quaternion, p: Quaternion) -> Self {
        QuatPair { q, p }
    }

    /// `ω₊ embed(q) + ω₋ embed(p)`.
    pub fn unsplit(&self) -> Cl3Element {
        omega_plus() * self.q.embed() + omega_minus() * self.p.embed()
    }

    pub fn conj(&self) -> Self {
        QuatPair::new(self.q.conj(), self.p.conj())
    }
}

impl Mul for QuatPair {
    type Output = QuatPair;
    fn mul(self, r: Self) -> Self {
        QuatPair::new(self.q * r.q, self.p * r.p)
    }
}

pub fn split(x: &Cl3Element) -> QuatPair {
    x.split()
}

pub fn unsplit(qp: &QuatPair) -> Cl3Element {
    qp.unsplit()
}
