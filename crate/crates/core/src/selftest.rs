//! Identity suites for the algebra and the cone, run against a given
//! product table so that a corrupted table can serve as a negative control.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::clifford::{Cl3Element, ProductTable, BASIS_NAMES, DIM, E1, E123, E2, E3};
use crate::cone::{
    in_cone, in_root_sphere, in_root_sphere_split, sample_root_sphere_with, slice_coords,
    SphereHomologyTable,
};
use crate::tolerance;

/// Counterexamples kept per check.
pub const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub max_error: f64,
    pub counterexamples: Vec<String>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            cases: 0,
            failures: 0,
            max_error: 0.0,
            counterexamples: Vec::new(),
        }
    }

    fn record(&mut self, error: f64, ok: bool, example: impl FnOnce() -> String) {
        self.cases += 1;
        if error.is_finite() {
            self.max_error = self.max_error.max(error);
        }
        if !ok {
            self.failures += 1;
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(example());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed() { "ok  " } else { "FAIL" };
            out.push_str(&format!(
                "{status} {:<34} {:>7} cases  max error {:.2e}\n",
                c.name, c.cases, c.max_error
            ));
            for e in &c.counterexamples {
                out.push_str(&format!("     {e}\n"));
            }
        }
        out.push_str(if self.passed {
            "all identities hold\n"
        } else {
            "identity failures found\n"
        });
        out
    }
}

fn random_element<R: Rng>(rng: &mut R) -> Cl3Element {
    let mut c = [0.0; DIM];
    for v in &mut c {
        *v = rng.sample(StandardNormal);
    }
    Cl3Element::new(c)
}

fn rel_close(a: &Cl3Element, b: &Cl3Element, scale: f64) -> (f64, bool) {
    let e = a.max_abs_diff(b);
    (e, e <= tolerance::REL * scale + tolerance::ABS_FLOOR)
}

/// Exact checks over basis elements.
#[allow(clippy::needless_range_loop)]
pub fn basis_checks(table: &ProductTable) -> Vec<CheckResult> {
    let mul = |a: &Cl3Element, b: &Cl3Element| table.mul(a, b);
    let e = |i: usize| Cl3Element::basis(i);

    let mut assoc = CheckResult::new("associativity (basis triples)");
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                let l = mul(&mul(&e(a), &e(b)), &e(c));
                let r = mul(&e(a), &mul(&e(b), &e(c)));
                let err = l.max_abs_diff(&r);
                assoc.record(err, err == 0.0, || {
                    format!(
                        "({} {}) {} != {} ({} {})",
                        BASIS_NAMES[a],
                        BASIS_NAMES[b],
                        BASIS_NAMES[c],
                        BASIS_NAMES[a],
                        BASIS_NAMES[b],
                        BASIS_NAMES[c]
                    )
                });
            }
        }
    }

    let mut anti = CheckResult::new("conjugation anti-automorphism");
    for a in 0..DIM {
        for b in 0..DIM {
            let l = mul(&e(a), &e(b)).conj();
            let r = mul(&e(b).conj(), &e(a).conj());
            let err = l.max_abs_diff(&r);
            anti.record(err, err == 0.0, || {
                format!(
                    "conj({} {}) != conj({}) conj({})",
                    BASIS_NAMES[a], BASIS_NAMES[b], BASIS_NAMES[b], BASIS_NAMES[a]
                )
            });
        }
    }

    let mut gens = CheckResult::new("generator relations");
    for (i, gi) in [E1, E2, E3].iter().enumerate() {
        let sq = mul(&e(*gi), &e(*gi));
        let err = sq.max_abs_diff(&-Cl3Element::ONE);
        gens.record(err, err == 0.0, || format!("{}^2 != -e0", BASIS_NAMES[*gi]));
        for gj in [E1, E2, E3].iter().skip(i + 1) {
            let s = mul(&e(*gi), &e(*gj)) + mul(&e(*gj), &e(*gi));
            let err = s.max_abs();
            gens.record(err, err == 0.0, || {
                format!(
                    "{} {} + {} {} != 0",
                    BASIS_NAMES[*gi], BASIS_NAMES[*gj], BASIS_NAMES[*gj], BASIS_NAMES[*gi]
                )
            });
        }
    }
    let p = e(E123);
    let err = mul(&p, &p).max_abs_diff(&Cl3Element::ONE);
    gens.record(err, err == 0.0, || "e123^2 != e0".to_string());
    for a in 0..DIM {
        let err = mul(&p, &e(a)).max_abs_diff(&mul(&e(a), &p));
        gens.record(err, err == 0.0, || {
            format!("e123 does not commute with {}", BASIS_NAMES[a])
        });
    }
    vec![assoc, anti, gens]
}

/// Randomised checks on `samples` pairs.
pub fn random_checks(table: &ProductTable, samples: usize, seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mul = |a: &Cl3Element, b: &Cl3Element| table.mul(a, b);
    let norm = |x: &Cl3Element| mul(x, &x.conj());

    let mut assoc = CheckResult::new("associativity (random)");
    let mut nmul = CheckResult::new("norm multiplicativity");
    let mut split = CheckResult::new("split homomorphism");
    let mut conj = CheckResult::new("conjugation (random)");
    let mut sphere = CheckResult::new("root sphere samples");
    let mut split_sphere = CheckResult::new("root sphere split criterion");
    let mut cone = CheckResult::new("slice coordinates round trip");

    for _ in 0..samples {
        let x = random_element(&mut rng);
        let y = random_element(&mut rng);
        let z = random_element(&mut rng);
        let (nx, ny, nz) = (x.norm(), y.norm(), z.norm());

        let (err, ok) = rel_close(
            &mul(&mul(&x, &y), &z),
            &mul(&x, &mul(&y, &z)),
            8.0 * nx * ny * nz,
        );
        assoc.record(err, ok, || format!("x={x} y={y} z={z}"));

        let (err, ok) = rel_close(
            &norm(&mul(&x, &y)),
            &mul(&norm(&x), &norm(&y)),
            64.0 * (nx * ny).powi(2),
        );
        nmul.record(err, ok, || format!("x={x} y={y}"));

        let lhs = mul(&x, &y).split();
        let rhs = x.split() * y.split();
        let err = lhs.q.max_abs_diff(&rhs.q).max(lhs.p.max_abs_diff(&rhs.p));
        let ok = err <= tolerance::REL * 8.0 * nx * ny + tolerance::ABS_FLOOR;
        split.record(err, ok, || format!("x={x} y={y}"));

        let (err, ok) = rel_close(
            &mul(&x, &y).conj(),
            &mul(&y.conj(), &x.conj()),
            8.0 * nx * ny,
        );
        conj.record(err, ok, || format!("x={x} y={y}"));

        let j = sample_root_sphere_with(&mut rng);
        let sq = mul(&j, &j);
        let err = sq.max_abs_diff(&-Cl3Element::ONE);
        let ok = err <= 1e-10 && in_root_sphere(&j, 1e-10).unwrap_or(false);
        sphere.record(err, ok, || format!("J={j}"));
        split_sphere.record(
            0.0,
            in_root_sphere_split(&j, 1e-10).unwrap_or(false),
            || format!("J={j}"),
        );

        let alpha: f64 = rng.sample(StandardNormal);
        let beta: f64 = rng.random_range(0.01..3.0);
        let point = Cl3Element::scalar(alpha) + j * beta;
        let (err, ok) = match slice_coords(&point, tolerance::CONE) {
            Ok(sc) if in_cone(&point, tolerance::CONE).unwrap_or(false) => {
                let err = sc.point().max_abs_diff(&point);
                (err, err <= tolerance::RECONSTRUCT * (1.0 + point.max_abs()))
            }
            _ => (f64::INFINITY, false),
        };
        cone.record(err, ok, || format!("x={point}"));
    }

    let mut homology = CheckResult::new("sphere homology table");
    let table = SphereHomologyTable::compute();
    homology.record(0.0, table.ranks == [1, 0, 2, 0, 1, 0, 0], || {
        format!("ranks {:?}", table.ranks)
    });

    vec![
        assoc,
        nmul,
        split,
        conj,
        sphere,
        split_sphere,
        cone,
        homology,
    ]
}

pub fn run_selftest(table: &ProductTable, samples: usize, seed: u64) -> SelftestReport {
    let mut checks = basis_checks(table);
    checks.extend(random_checks(table, samples, seed));
    SelftestReport {
        passed: checks.iter().all(CheckResult::passed),
        samples,
        seed,
        checks,
    }
}

/// Parses a basis name such as `e12`.
pub fn basis_index(name: &str) -> Option<usize> {
    BASIS_NAMES.iter().position(|n| *n == name)
}
