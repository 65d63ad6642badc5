//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use cone_runge::topology::fixtures::{
    annulus, conjugate_disks, disk, disk_domain, rect, spec, two_holes,
};
use cone_runge::topology::{DomainSpec, HalfPlane, Shape, ShapeEntry};
use cone_runge::Cl3Element;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Hamilton product on `[w, x, y, z]`.
pub fn hamilton(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// Matrix-free model of `ℝ₃` as `ℍ ⊕ ℍ`, generated by
/// `e1 ↦ (i, −i)`, `e2 ↦ (j, −j)`, `e3 ↦ (k, −k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairModel {
    pub a: [f64; 4],
    pub b: [f64; 4],
}

impl PairModel {
    pub fn from_coeffs(c: &[f64; 8]) -> Self {
        let [x0, x1, x2, x3, x12, x13, x23, x123] = *c;
        PairModel {
            a: [x0 - x123, x1 + x23, x2 - x13, x3 + x12],
            b: [x0 + x123, -x1 + x23, -x2 - x13, -x3 + x12],
        }
    }

    pub fn to_coeffs(self) -> [f64; 8] {
        let (a, b) = (self.a, self.b);
        [
            (a[0] + b[0]) / 2.0,
            (a[1] - b[1]) / 2.0,
            (a[2] - b[2]) / 2.0,
            (a[3] - b[3]) / 2.0,
            (a[3] + b[3]) / 2.0,
            -(a[2] + b[2]) / 2.0,
            (a[1] + b[1]) / 2.0,
            (b[0] - a[0]) / 2.0,
        ]
    }

    pub fn mul(&self, o: &PairModel) -> PairModel {
        PairModel {
            a: hamilton(self.a, o.a),
            b: hamilton(self.b, o.b),
        }
    }

    pub fn conj(&self) -> PairModel {
        let c = |q: [f64; 4]| [q[0], -q[1], -q[2], -q[3]];
        PairModel {
            a: c(self.a),
            b: c(self.b),
        }
    }
}

pub fn oracle_mul(x: &Cl3Element, y: &Cl3Element) -> Cl3Element {
    let p = PairModel::from_coeffs(x.coeffs()).mul(&PairModel::from_coeffs(y.coeffs()));
    Cl3Element::new(p.to_coeffs())
}

pub fn oracle_conj(x: &Cl3Element) -> Cl3Element {
    Cl3Element::new(PairModel::from_coeffs(x.coeffs()).conj().to_coeffs())
}

pub fn random_element(rng: &mut ChaCha8Rng) -> Cl3Element {
    let mut c = [0.0; 8];
    for v in &mut c {
        *v = rng.random_range(-2.0..2.0);
    }
    Cl3Element::new(c)
}

pub fn random_unit_imaginary(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// The element whose pair model is `(u, v)` for unit imaginary `u`, `v`.
pub fn root_from_model(u: [f64; 3], v: [f64; 3]) -> Cl3Element {
    Cl3Element::new(
        PairModel {
            a: [0.0, u[0], u[1], u[2]],
            b: [0.0, v[0], v[1], v[2]],
        }
        .to_coeffs(),
    )
}

/// Labels of a mask under 4- or 8-connectivity by explicit stack search.
pub fn flood_labels(
    nx: usize,
    ny: usize,
    mask: &[bool],
    value: bool,
    eight: bool,
) -> (Vec<Option<usize>>, usize) {
    let mut labels = vec![None; nx * ny];
    let mut n = 0;
    for start in 0..nx * ny {
        if mask[start] != value || labels[start].is_some() {
            continue;
        }
        let mut stack = vec![start];
        labels[start] = Some(n);
        while let Some(c) = stack.pop() {
            let (i, j) = ((c % nx) as i64, (c / nx) as i64);
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if (di == 0 && dj == 0) || (!eight && di != 0 && dj != 0) {
                        continue;
                    }
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= nx as i64 || b >= ny as i64 {
                        continue;
                    }
                    let k = b as usize * nx + a as usize;
                    if mask[k] == value && labels[k].is_none() {
                        labels[k] = Some(n);
                        stack.push(k);
                    }
                }
            }
        }
        n += 1;
    }
    (labels, n)
}

/// Component count of the domain and of bounded complement components.
pub fn flood_b0_b1(nx: usize, ny: usize, mask: &[bool]) -> (usize, usize) {
    let (_, b0) = flood_labels(nx, ny, mask, true, false);
    let (labels, n) = flood_labels(nx, ny, mask, false, true);
    let mut touches = vec![false; n];
    for j in 0..ny {
        for i in 0..nx {
            if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
                if let Some(l) = labels[j * nx + i] {
                    touches[l] = true;
                }
            }
        }
    }
    (b0, touches.iter().filter(|t| !**t).count())
}

/// `V − E + F` of the complex with a vertex per cell, an edge per 4-adjacent
/// pair and a square per full 2×2 block.
pub fn cell_complex_euler(nx: usize, ny: usize, mask: &[bool]) -> i64 {
    let at = |i: usize, j: usize| mask[j * nx + i];
    let mut chi = 0i64;
    for j in 0..ny {
        for i in 0..nx {
            if !at(i, j) {
                continue;
            }
            chi += 1;
            if i + 1 < nx && at(i + 1, j) {
                chi -= 1;
            }
            if j + 1 < ny && at(i, j + 1) {
                chi -= 1;
            }
            if i + 1 < nx && j + 1 < ny && at(i + 1, j) && at(i, j + 1) && at(i + 1, j + 1) {
                chi += 1;
            }
        }
    }
    chi
}

/// A random union/difference of disks and rectangles inside the window.
pub fn random_spec(rng: &mut ChaCha8Rng, resolution: f64) -> DomainSpec {
    let mut shapes = Vec::new();
    let n = rng.random_range(1..=5);
    for k in 0..n {
        let c = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let shape = if rng.random_bool(0.7) {
            disk(c[0], c[1], rng.random_range(0.4..1.6))
        } else {
            let (w, h) = (rng.random_range(0.4..2.0), rng.random_range(0.4..2.0));
            cone_runge::topology::fixtures::rect(c[0] - w, c[1] - h, c[0] + w, c[1] + h)
        };
        shapes.push(if k == 0 || rng.random_bool(0.65) {
            ShapeEntry::add(shape)
        } else {
            ShapeEntry::subtract(shape)
        });
    }
    spec(resolution, shapes)
}

/// What happens to a hole of `D` in the larger domain `D₁`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoleFate {
    Kept,
    Shrunk,
    Filled,
}

#[derive(Clone, Debug)]
pub struct NestedPair {
    pub d: DomainSpec,
    pub d1: DomainSpec,
    pub fates: Vec<HoleFate>,
}

impl NestedPair {
    /// Runge exactly when no hole of `D` is filled in `D₁`.
    pub fn expected_runge(&self) -> bool {
        self.fates.iter().all(|f| *f != HoleFate::Filled)
    }
}

/// A disk with well separated round holes, each on the axis or clear of its
/// mirror image, and a larger domain keeping, shrinking or filling each hole.
pub fn random_nested_pair(rng: &mut ChaCha8Rng, resolution: f64) -> NestedPair {
    let outer = rng.random_range(3.2..4.2);
    let mut holes: Vec<([f64; 2], f64)> = Vec::new();
    let target = rng.random_range(0..=4);
    let mut attempts = 0;
    while holes.len() < target && attempts < 200 {
        attempts += 1;
        let r = rng.random_range(0.25..0.8);
        let on_axis = rng.random_bool(0.5);
        let c: [f64; 2] = [
            rng.random_range(-2.6..2.6),
            if on_axis {
                0.0
            } else {
                rng.random_range(0.0..2.6)
            },
        ];
        if !on_axis && c[1] < r + 0.3 {
            continue;
        }
        if (c[0] * c[0] + c[1] * c[1]).sqrt() + r > outer - 0.4 {
            continue;
        }
        let clear = holes.iter().all(|(o, s)| {
            [o[1], -o[1]]
                .iter()
                .all(|oy| ((c[0] - o[0]).powi(2) + (c[1] - oy).powi(2)).sqrt() > r + s + 0.3)
        });
        if clear {
            holes.push((c, r));
        }
    }
    let fates: Vec<HoleFate> = holes
        .iter()
        .map(|_| match rng.random_range(0..3) {
            0 => HoleFate::Kept,
            1 => HoleFate::Shrunk,
            _ => HoleFate::Filled,
        })
        .collect();
    let outer1 = if rng.random_bool(0.5) {
        outer
    } else {
        outer + rng.random_range(0.1..0.6)
    };
    let mut d = vec![ShapeEntry::add(disk(0.0, 0.0, outer))];
    let mut d1 = vec![ShapeEntry::add(disk(0.0, 0.0, outer1))];
    for ((c, r), fate) in holes.iter().zip(&fates) {
        d.push(ShapeEntry::subtract(disk(c[0], c[1], *r)));
        match fate {
            HoleFate::Kept => d1.push(ShapeEntry::subtract(disk(c[0], c[1], *r))),
            HoleFate::Shrunk => d1.push(ShapeEntry::subtract(disk(
                c[0],
                c[1],
                r * rng.random_range(0.45..0.75),
            ))),
            HoleFate::Filled => {}
        }
    }
    NestedPair {
        d: spec(resolution, d),
        d1: spec(resolution, d1),
        fates,
    }
}

/// `Σ_{k ≥ 0} r^{-4k-4}`: squared mean-square distance, on the circle
/// `|z| = r`, between `1/(z² + 1)` and any polynomial.
pub fn laurent_gap_sq(r: f64) -> f64 {
    let q = r.powi(-4);
    q / (1.0 - q)
}

/// Taylor tail of `1/(z² + b²)` truncated after degree `d`, on `|z| ≤ rho`.
pub fn taylor_tail(rho: f64, b: f64, d: usize) -> f64 {
    let m = d / 2 + 1;
    let t = (rho / b).powi(2);
    t.powi(m as i32) / (b * b * (1.0 - t))
}

fn add(s: Shape) -> ShapeEntry {
    ShapeEntry::add(s)
}

fn sub(s: Shape) -> ShapeEntry {
    ShapeEntry::subtract(s)
}

/// Hand-built nested pairs with the Runge verdict known by construction.
pub fn curated_pairs(res: f64) -> Vec<(&'static str, DomainSpec, DomainSpec, bool)> {
    let holes3 = |r: [Option<f64>; 3]| {
        let mut v = vec![add(disk(0.0, 0.0, 3.2))];
        for (x, r) in [-2.0, 0.0, 2.0].iter().zip(r) {
            if let Some(r) = r {
                v.push(sub(disk(*x, 0.0, r)));
            }
        }
        spec(res, v)
    };
    let mixed = |axis: Option<f64>, off: Option<f64>| {
        let mut v = vec![add(disk(0.0, 0.0, 3.0))];
        if let Some(r) = axis {
            v.push(sub(disk(1.5, 0.0, r)));
        }
        if let Some(r) = off {
            v.push(sub(disk(-1.0, 1.5, r)));
        }
        spec(res, v)
    };
    let with_pair = |inner: Option<f64>| {
        let mut v = vec![add(disk(0.0, 0.0, 3.0)), add(disk(0.0, 4.0, 0.5))];
        if let Some(r) = inner {
            v.push(sub(disk(0.0, 0.0, r)));
        }
        spec(res, v)
    };
    let ring_pair = |inner: Option<f64>| {
        let mut v = vec![add(disk(0.0, 2.5, 1.0))];
        if let Some(r) = inner {
            v.push(sub(disk(0.0, 2.5, r)));
        }
        spec(res, v)
    };
    let framed = |outer: f64, hole: [f64; 2]| {
        spec(
            res,
            vec![
                add(rect(-outer, -outer * 0.7, outer, outer * 0.7)),
                sub(rect(-hole[0], -hole[1], hole[0], hole[1])),
            ],
        )
    };
    let one_hole_filled = spec(
        res,
        vec![add(disk(0.0, 0.0, 3.0)), sub(disk(1.5, 0.0, 0.5))],
    );
    let cut = |hole: bool| {
        let mut v = vec![
            add(disk(0.0, 0.0, 3.0)),
            sub(Shape::HalfPlane(HalfPlane {
                normal: [-1.0, 0.0],
                offset: -2.0,
            })),
        ];
        if hole {
            v.push(sub(disk(0.0, 0.0, 0.5)));
        }
        spec(res, v)
    };
    let lens = spec(
        res,
        vec![add(disk(0.0, 0.0, 3.0)), sub(disk(0.0, 0.6, 0.8))],
    );
    let split_hole = spec(
        res,
        vec![
            add(disk(0.0, 0.0, 3.0)),
            sub(disk(-0.6, 0.0, 0.3)),
            sub(disk(0.6, 0.0, 0.3)),
        ],
    );
    vec![
        (
            "annulus self",
            annulus(1.0, 3.0, res),
            annulus(1.0, 3.0, res),
            true,
        ),
        (
            "annulus smaller hole",
            annulus(1.0, 3.0, res),
            annulus(0.5, 3.0, res),
            true,
        ),
        (
            "annulus filled",
            annulus(1.0, 3.0, res),
            disk_domain(3.0, res),
            false,
        ),
        (
            "annulus wider",
            annulus(1.0, 3.0, res),
            annulus(1.0, 4.0, res),
            true,
        ),
        (
            "annulus in bigger disk",
            annulus(1.0, 3.0, res),
            disk_domain(4.0, res),
            false,
        ),
        (
            "annulus wider smaller hole",
            annulus(1.0, 3.0, res),
            annulus(0.5, 4.0, res),
            true,
        ),
        (
            "thin annulus in thick",
            annulus(1.0, 2.0, res),
            annulus(0.4, 3.0, res),
            true,
        ),
        (
            "disk in disk",
            disk_domain(2.0, res),
            disk_domain(3.0, res),
            true,
        ),
        (
            "disk self",
            disk_domain(2.0, res),
            disk_domain(2.0, res),
            true,
        ),
        (
            "two holes shrunk",
            two_holes(1.5, 0.5, 3.0, res),
            two_holes(1.5, 0.3, 3.0, res),
            true,
        ),
        (
            "two holes one filled",
            two_holes(1.5, 0.5, 3.0, res),
            one_hole_filled.clone(),
            false,
        ),
        (
            "two holes both filled",
            two_holes(1.5, 0.5, 3.0, res),
            disk_domain(3.0, res),
            false,
        ),
        (
            "two holes wider",
            two_holes(1.5, 0.5, 3.0, res),
            two_holes(1.5, 0.5, 4.0, res),
            true,
        ),
        (
            "one hole in disk",
            one_hole_filled,
            disk_domain(3.0, res),
            false,
        ),
        (
            "conjugate disks self",
            conjugate_disks(1.5, 0.5, res),
            conjugate_disks(1.5, 0.5, res),
            true,
        ),
        (
            "conjugate disks grown",
            conjugate_disks(1.5, 0.5, res),
            conjugate_disks(1.5, 0.8, res),
            true,
        ),
        (
            "conjugate disks in disk",
            conjugate_disks(1.5, 0.5, res),
            disk_domain(3.0, res),
            true,
        ),
        (
            "off-axis holes filled",
            mixed(None, Some(0.5)),
            mixed(None, None),
            false,
        ),
        (
            "off-axis holes shrunk",
            mixed(None, Some(0.5)),
            mixed(None, Some(0.3)),
            true,
        ),
        (
            "off-axis holes self",
            mixed(None, Some(0.5)),
            mixed(None, Some(0.5)),
            true,
        ),
        (
            "mixed holes, off-axis filled",
            mixed(Some(0.5), Some(0.5)),
            mixed(Some(0.5), None),
            false,
        ),
        (
            "mixed holes, axis filled",
            mixed(Some(0.5), Some(0.5)),
            mixed(None, Some(0.5)),
            false,
        ),
        (
            "mixed holes shrunk",
            mixed(Some(0.5), Some(0.5)),
            mixed(Some(0.3), Some(0.3)),
            true,
        ),
        (
            "framed hole filled",
            framed(3.0, [1.0, 0.5]),
            spec(res, vec![add(rect(-3.0, -2.1, 3.0, 2.1))]),
            false,
        ),
        (
            "framed hole shrunk",
            framed(3.0, [1.0, 0.5]),
            framed(3.5, [0.5, 0.25]),
            true,
        ),
        (
            "one hole over two",
            spec(
                res,
                vec![add(disk(0.0, 0.0, 3.0)), sub(disk(0.0, 0.0, 1.2))],
            ),
            split_hole,
            true,
        ),
        (
            "annulus with satellites filled",
            with_pair(Some(1.0)),
            with_pair(None),
            false,
        ),
        (
            "annulus with satellites shrunk",
            with_pair(Some(1.0)),
            with_pair(Some(0.5)),
            true,
        ),
        (
            "ring pair filled",
            ring_pair(Some(0.4)),
            ring_pair(None),
            false,
        ),
        (
            "ring pair shrunk",
            ring_pair(Some(0.4)),
            ring_pair(Some(0.2)),
            true,
        ),
        (
            "three holes middle filled",
            holes3([Some(0.4); 3]),
            holes3([Some(0.4), None, Some(0.4)]),
            false,
        ),
        (
            "three holes shrunk",
            holes3([Some(0.4); 3]),
            holes3([Some(0.3), Some(0.2), Some(0.3)]),
            true,
        ),
        (
            "cut disk with hole",
            cut(true),
            spec(
                res,
                vec![add(disk(0.0, 0.0, 3.0)), sub(disk(0.0, 0.0, 0.5))],
            ),
            true,
        ),
        ("cut disk in disk", cut(false), disk_domain(3.0, res), true),
        ("lens hole filled", lens, disk_domain(3.0, res), false),
    ]
}
