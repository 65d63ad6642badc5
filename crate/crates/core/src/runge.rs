//! Runge-pair conditions for nested symmetric domains `D ⊆ D₁` and the
//! homology ranks of the axially symmetric set swept by `D`.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cone::{sample_root_sphere_with, slice_coords};
use crate::error::{Error, Result};
use crate::tolerance;
use crate::topology::{
    cells_by_label, nearest_to_centroid, rasterize, rasterize_on, DomainGrid, DomainSpec,
    GridFrame, TopoSummary,
};

/// Outcome of one condition, with witness points in the plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub witnesses: Vec<[f64; 2]>,
}

impl Verdict {
    pub fn witness(&self) -> Option<[f64; 2]> {
        self.witnesses.first().copied()
    }
}

/// Incidence-rank form of the map `H₁(D) → H₁(D₁)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition3 {
    pub holds: bool,
    /// Rows: bounded complement components of `D₁`; columns: those of `D`.
    pub incidence: Vec<Vec<i64>>,
    pub rank: usize,
    pub witnesses: Vec<[f64; 2]>,
}

/// Every bounded complement component of `D` must contain a cell outside `D₁`.
pub fn check_condition5(d: &DomainGrid, d1: &DomainGrid) -> Result<Verdict> {
    d.check_nested_in(d1)?;
    let labels = d.labels();
    let nx = d.nx();
    let holes = cells_by_label(nx, &labels.complement, labels.n_complement);
    let mut witnesses = Vec::new();
    for (l, cells) in holes.iter().enumerate() {
        if !labels.complement_bounded[l] {
            continue;
        }
        if cells.iter().all(|&(i, j)| d1.cell(i, j)) {
            witnesses.push(nearest_to_centroid(d, cells).expect("nonempty"));
        }
    }
    Ok(Verdict {
        holds: witnesses.is_empty(),
        witnesses,
    })
}

/// Rank of an integer matrix by fraction-free Gaussian elimination.
pub fn integer_rank(m: &[Vec<i64>]) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|v| *v as i128).collect())
        .collect();
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                a[r][k] = (a[rank][c] * a[r][k] - a[r][c] * a[rank][k]) / prev;
            }
            a[r][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Injectivity of `H₁(D) → H₁(D₁)`. Each hole of `D₁` lies in exactly one
/// complement component of `D`; the induced incidence map between hole
/// generators is injective iff it has full column rank.
pub fn check_condition3(d: &DomainGrid, d1: &DomainGrid) -> Result<Condition3> {
    d.check_nested_in(d1)?;
    let (ld, ld1) = (d.labels(), d1.labels());
    let nx = d.nx();
    let d_holes: Vec<usize> = (0..ld.n_complement)
        .filter(|l| ld.complement_bounded[*l])
        .collect();
    let d1_cells = cells_by_label(nx, &ld1.complement, ld1.n_complement);
    let column = |label: u32| d_holes.iter().position(|h| *h as u32 == label);
    let mut incidence = Vec::new();
    for (l, cells) in d1_cells.iter().enumerate() {
        if !ld1.complement_bounded[l] {
            continue;
        }
        let mut row = vec![0i64; d_holes.len()];
        let (i, j) = cells[0];
        if let Some(c) = column(ld.complement[j * nx + i]) {
            row[c] = 1;
        }
        incidence.push(row);
    }
    let rank = integer_rank(&incidence);
    let d_cells = cells_by_label(nx, &ld.complement, ld.n_complement);
    let witnesses = (0..d_holes.len())
        .filter(|c| incidence.iter().all(|row| row[*c] == 0))
        .map(|c| nearest_to_centroid(d, &d_cells[d_holes[c]]).expect("nonempty"))
        .collect::<Vec<_>>();
    Ok(Condition3 {
        holds: rank == d_holes.len(),
        incidence,
        rank,
        witnesses,
    })
}

/// Number of imaginary units sampled per plane cell in condition 6.
pub const CONDITION6_UNITS: usize = 2;

/// Condition 5 lifted to the cone: each bounded complement component of the
/// swept set corresponds to a mirror class of bounded plane holes. The class
/// is swept over sampled imaginary units and every point is mapped back to
/// the plane through its slice coordinates, where membership in `D₁` is
/// decided.
pub fn check_condition6(d: &DomainGrid, d1: &DomainGrid) -> Result<Verdict> {
    d.check_nested_in(d1)?;
    let labels = d.labels();
    let nx = d.nx();
    let holes = cells_by_label(nx, &labels.complement, labels.n_complement);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let units: Vec<_> = (0..CONDITION6_UNITS)
        .map(|_| sample_root_sphere_with(&mut rng))
        .collect();
    let mut seen = vec![false; labels.n_complement];
    let mut witnesses = Vec::new();
    for (l, cells) in holes.iter().enumerate() {
        if !labels.complement_bounded[l] || seen[l] {
            continue;
        }
        let (i, j) = cells[0];
        let mirror = labels.complement[d.mirror_row(j) * nx + i] as usize;
        seen[l] = true;
        seen[mirror] = true;
        let class: Vec<(usize, usize)> = if mirror == l {
            cells.clone()
        } else {
            cells.iter().chain(holes[mirror].iter()).copied().collect()
        };
        let mut escapes = false;
        'cells: for &(i, j) in &class {
            let (alpha, beta) = d.cell_center(i, j);
            for u in &units {
                let x = crate::clifford::Cl3Element::scalar(alpha) + *u * beta;
                let sc = slice_coords(&x, tolerance::CONE)?;
                if !d1.contains_point(sc.alpha, sc.beta) || !d1.contains_point(sc.alpha, -sc.beta) {
                    escapes = true;
                    break 'cells;
                }
            }
        }
        if !escapes {
            let upper: Vec<_> = class
                .iter()
                .copied()
                .filter(|&(_, j)| j >= d.axis_row())
                .collect();
            witnesses.push(
                nearest_to_centroid(d, &upper).expect("symmetric class meets the upper half"),
            );
        }
    }
    Ok(Verdict {
        holds: witnesses.is_empty(),
        witnesses,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    /// A component meeting the real axis.
    Symmetric,
    /// A component above the axis together with its mirror image.
    ConjugatePair,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentBetti {
    pub kind: ComponentKind,
    /// First Betti number of the plane component (of the upper piece for a pair).
    pub b1_plane: usize,
    /// `b0(C ∩ ℝ) − 1`; zero for pairs.
    pub r: usize,
    pub contribution: [usize; 5],
}

/// Betti numbers `b1..b5` of the swept set, plus the ranks of `H₂`, `H₄`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaBetti {
    pub b: [usize; 5],
    pub h2: usize,
    pub h4: usize,
    pub components: Vec<ComponentBetti>,
    /// `b5 = b1(D⁺) + rank Ĥ₀(D_ℝ)` and `b3 = 2 b5`.
    pub sequence_check: bool,
    /// Hole count agrees with `b0 − χ`.
    pub euler_check: bool,
}

pub fn betti_omega(d: &DomainGrid) -> Result<OmegaBetti> {
    betti_from_summary(&d.summarize())
}

pub fn betti_from_summary(s: &TopoSummary) -> Result<OmegaBetti> {
    let mut b = [0usize; 5];
    let mut components = Vec::new();
    let mut symmetric = 0;
    for c in &s.components {
        let entry = if c.axis_runs > 0 {
            symmetric += 1;
            let r = c.axis_runs - 1;
            if c.b1 < r || (c.b1 - r) % 2 != 0 {
                return Err(Error::ParityViolation {
                    component: c.label as usize,
                    b1: c.b1,
                    r,
                });
            }
            ComponentBetti {
                kind: ComponentKind::Symmetric,
                b1_plane: c.b1,
                r,
                contribution: [(c.b1 - r) / 2, 0, c.b1 + r, 0, (c.b1 + r) / 2],
            }
        } else if c.upper {
            let p = c.b1;
            ComponentBetti {
                kind: ComponentKind::ConjugatePair,
                b1_plane: p,
                r: 0,
                contribution: [p, 2, 2 * p, 1, p],
            }
        } else {
            continue;
        };
        for (t, v) in b.iter_mut().zip(entry.contribution) {
            *t += v;
        }
        components.push(entry);
    }
    let reduced_h0 = s.b0_dreal.saturating_sub(symmetric);
    let sequence_check = b[4] == s.b1_dplus + reduced_h0
        && b[2] == 2 * b[4]
        && symmetric == s.b0_dplus - s.k_offreal;
    Ok(OmegaBetti {
        b,
        h2: 2 * s.k_offreal,
        h4: s.k_offreal,
        components,
        sequence_check,
        euler_check: s.euler_consistent(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RungeReport {
    pub runge_pair: bool,
    pub cond3: Condition3,
    pub cond5: Verdict,
    pub cond6: Verdict,
    pub cond4_derived: bool,
    #[serde(rename = "betti_D")]
    pub betti_d: OmegaBetti,
    #[serde(rename = "betti_D1")]
    pub betti_d1: OmegaBetti,
    pub witnesses: Vec<[f64; 2]>,
    pub consistency: bool,
}

/// Common lattice for a pair of specs: union window, finer resolution.
pub fn common_frame(d: &DomainSpec, d1: &DomainSpec) -> Result<GridFrame> {
    d.validate()?;
    d1.validate()?;
    GridFrame::from_window(d.union_window(d1), d.resolution.max(d1.resolution))
}

/// Rasterises both specs on their common lattice.
pub fn rasterize_pair(d: &DomainSpec, d1: &DomainSpec) -> Result<(DomainGrid, DomainGrid)> {
    let frame = common_frame(d, d1)?;
    Ok((rasterize_on(d, frame)?, rasterize_on(d1, frame)?))
}

pub fn analyze_pair(d: &DomainSpec, d1: &DomainSpec) -> Result<RungeReport> {
    let (gd, gd1) = rasterize_pair(d, d1)?;
    analyze_grids(&gd, &gd1)
}

pub fn analyze_grids(d: &DomainGrid, d1: &DomainGrid) -> Result<RungeReport> {
    d.check_nested_in(d1)?;
    let cond3 = check_condition3(d, d1)?;
    let cond5 = check_condition5(d, d1)?;
    let cond6 = check_condition6(d, d1)?;
    let betti_d = betti_omega(d)?;
    let betti_d1 = betti_omega(d1)?;
    let cond4_derived = cond3.holds;
    let consistency = cond3.holds == cond5.holds && cond5.holds == cond6.holds;
    Ok(RungeReport {
        runge_pair: cond5.holds,
        witnesses: cond5.witnesses.clone(),
        cond3,
        cond5,
        cond6,
        cond4_derived,
        betti_d,
        betti_d1,
        consistency,
    })
}

/// Topology and Betti data for a single domain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainReport {
    pub summary: TopoSummary,
    pub betti: OmegaBetti,
    pub warnings: Vec<String>,
}

pub fn analyze_domain(spec: &DomainSpec) -> Result<DomainReport> {
    let g = rasterize(spec)?;
    analyze_domain_grid(&g)
}

pub fn analyze_domain_grid(g: &DomainGrid) -> Result<DomainReport> {
    let summary = g.summarize();
    let betti = betti_from_summary(&summary)?;
    Ok(DomainReport {
        summary,
        betti,
        warnings: g.warnings().to_vec(),
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn fmt_points(p: &[[f64; 2]]) -> String {
    if p.is_empty() {
        return "-".into();
    }
    p.iter()
        .map(|[x, y]| format!("({x:.4}, {y:.4})"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn fmt_betti(out: &mut String, name: &str, b: &OmegaBetti) {
    let _ = writeln!(
        out,
        "{name:<10} b1..b5 = {:?}  h2 = {}  h4 = {}",
        b.b, b.h2, b.h4
    );
}

impl RungeReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "runge pair   {}", yes_no(self.runge_pair));
        let _ = writeln!(out, "{:<12} {:<6} witnesses", "condition", "holds");
        let _ = writeln!(
            out,
            "{:<12} {:<6} {}",
            "3",
            yes_no(self.cond3.holds),
            fmt_points(&self.cond3.witnesses)
        );
        let _ = writeln!(
            out,
            "{:<12} {:<6} (from 3)",
            "4",
            yes_no(self.cond4_derived)
        );
        let _ = writeln!(
            out,
            "{:<12} {:<6} {}",
            "5",
            yes_no(self.cond5.holds),
            fmt_points(&self.cond5.witnesses)
        );
        let _ = writeln!(
            out,
            "{:<12} {:<6} {}",
            "6",
            yes_no(self.cond6.holds),
            fmt_points(&self.cond6.witnesses)
        );
        fmt_betti(&mut out, "D", &self.betti_d);
        fmt_betti(&mut out, "D1", &self.betti_d1);
        let _ = writeln!(out, "consistent   {}", yes_no(self.consistency));
        out
    }
}

impl DomainReport {
    pub fn render_text(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(out, "components          {}", s.b0_d);
        let _ = writeln!(out, "holes               {}", s.b1_d);
        let _ = writeln!(out, "euler b1            {}", s.b1_euler);
        let _ = writeln!(out, "real trace runs     {}", s.b0_dreal);
        let _ = writeln!(out, "upper components    {}", s.b0_dplus);
        let _ = writeln!(out, "off-axis components {}", s.k_offreal);
        for h in &s.bounded_complement_components {
            let _ = writeln!(
                out,
                "hole at             ({:.4}, {:.4})",
                h.representative[0], h.representative[1]
            );
        }
        fmt_betti(&mut out, "betti", &self.betti);
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}
