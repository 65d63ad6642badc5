//! Rasterised symmetric plane domains and their combinatorial topology.
//!
//! A domain is a bitmask of open square cells on a lattice whose middle row
//! is centred on the real axis. Domain cells are connected through edges
//! (4-connectivity) and complement cells through edges or corners
//! (8-connectivity), so that holes of the domain are exactly the bounded
//! complement components.

use std::collections::VecDeque;
use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest accepted number of cells per unit length.
pub const MIN_RESOLUTION: f64 = 8.0;
/// Cells cleared along every window edge.
pub const BORDER_MARGIN: usize = 2;
/// Thinnest shape feature, in cells.
pub const MIN_FEATURE_CELLS: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeOpKind {
    Add,
    Subtract,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disk {
    pub c: [f64; 2],
    pub r: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

/// The open half plane `normal · p < offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfPlane {
    pub normal: [f64; 2],
    pub offset: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Disk(Disk),
    Rect(Rect),
    HalfPlane(HalfPlane),
}

impl Shape {
    /// Membership in the open shape.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Shape::Disk(d) => {
                let (dx, dy) = (x - d.c[0], y - d.c[1]);
                dx * dx + dy * dy < d.r * d.r
            }
            Shape::Rect(r) => x > r.min[0] && x < r.max[0] && y > r.min[1] && y < r.max[1],
            Shape::HalfPlane(h) => h.normal[0] * x + h.normal[1] * y < h.offset,
        }
    }

    /// Membership in the closed shape.
    pub fn contains_closed(&self, x: f64, y: f64) -> bool {
        match self {
            Shape::Disk(d) => {
                let (dx, dy) = (x - d.c[0], y - d.c[1]);
                dx * dx + dy * dy <= d.r * d.r
            }
            Shape::Rect(r) => x >= r.min[0] && x <= r.max[0] && y >= r.min[1] && y <= r.max[1],
            Shape::HalfPlane(h) => h.normal[0] * x + h.normal[1] * y <= h.offset,
        }
    }
}

/// One entry of a domain spec: `{"op": "add", "disk": {...}}`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeEntry {
    pub op: Option<ShapeOpKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disk: Option<Disk>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rect: Option<Rect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfplane: Option<HalfPlane>,
}

impl ShapeEntry {
    pub fn add(shape: Shape) -> Self {
        Self::with_op(ShapeOpKind::Add, shape)
    }

    pub fn subtract(shape: Shape) -> Self {
        Self::with_op(ShapeOpKind::Subtract, shape)
    }

    pub fn with_op(op: ShapeOpKind, shape: Shape) -> Self {
        let mut e = ShapeEntry {
            op: Some(op),
            ..Default::default()
        };
        match shape {
            Shape::Disk(d) => e.disk = Some(d),
            Shape::Rect(r) => e.rect = Some(r),
            Shape::HalfPlane(h) => e.halfplane = Some(h),
        }
        e
    }

    fn shape(&self, index: usize) -> Result<(ShapeOpKind, Shape)> {
        let invalid = |field: &str, reason: &str| Error::InvalidSpec {
            pointer: format!("/shapes/{index}{field}"),
            reason: reason.to_string(),
        };
        let op = self.op.ok_or_else(|| invalid("/op", "missing operation"))?;
        let mut shapes = Vec::new();
        if let Some(d) = self.disk {
            shapes.push(Shape::Disk(d));
        }
        if let Some(r) = self.rect {
            shapes.push(Shape::Rect(r));
        }
        if let Some(h) = self.halfplane {
            shapes.push(Shape::HalfPlane(h));
        }
        if shapes.len() != 1 {
            return Err(invalid("", "expected exactly one of disk, rect, halfplane"));
        }
        let shape = shapes[0];
        match shape {
            Shape::Disk(d) => {
                if !(d.c[0].is_finite() && d.c[1].is_finite()) {
                    return Err(invalid("/disk/c", "centre must be finite"));
                }
                if !d.r.is_finite() || d.r <= 0.0 {
                    return Err(invalid("/disk/r", "radius must be positive and finite"));
                }
            }
            Shape::Rect(r) => {
                if !r.min.iter().chain(r.max.iter()).all(|v| v.is_finite()) {
                    return Err(invalid("/rect", "corners must be finite"));
                }
                if r.min[0] >= r.max[0] || r.min[1] >= r.max[1] {
                    return Err(invalid(
                        "/rect/max",
                        "max must exceed min in both coordinates",
                    ));
                }
            }
            Shape::HalfPlane(h) => {
                if !(h.normal.iter().all(|v| v.is_finite()) && h.offset.is_finite()) {
                    return Err(invalid("/halfplane", "values must be finite"));
                }
                if h.normal[0] == 0.0 && h.normal[1] == 0.0 {
                    return Err(invalid("/halfplane/normal", "normal must be nonzero"));
                }
            }
        }
        Ok((op, shape))
    }
}

fn default_true() -> bool {
    true
}

/// JSON ingestion format for a symmetric plane domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    /// `[xmin, xmax, ymin, ymax]`.
    pub window: [f64; 4],
    /// Cells per unit length.
    pub resolution: f64,
    pub shapes: Vec<ShapeEntry>,
    #[serde(default = "default_true")]
    pub symmetrize: bool,
}

impl DomainSpec {
    pub fn new(window: [f64; 4], resolution: f64, shapes: Vec<ShapeEntry>) -> Self {
        DomainSpec {
            window,
            resolution,
            shapes,
            symmetrize: true,
        }
    }

    /// Checks every field and returns the parsed shapes.
    pub fn validate(&self) -> Result<Vec<(ShapeOpKind, Shape)>> {
        let w = self.window;
        if !w.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidSpec {
                pointer: "/window".into(),
                reason: "window must be finite".into(),
            });
        }
        if w[1] <= w[0] || w[3] <= w[2] {
            return Err(Error::EmptyWindow);
        }
        if !self.resolution.is_finite() {
            return Err(Error::InvalidSpec {
                pointer: "/resolution".into(),
                reason: "resolution must be finite".into(),
            });
        }
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::ResolutionTooLow {
                resolution: self.resolution,
                minimum: MIN_RESOLUTION,
            });
        }
        if !self.symmetrize {
            return Err(Error::InvalidSpec {
                pointer: "/symmetrize".into(),
                reason: "domains are always symmetrised".into(),
            });
        }
        self.shapes
            .iter()
            .enumerate()
            .map(|(i, s)| s.shape(i))
            .collect()
    }

    /// Smallest window containing both windows.
    pub fn union_window(&self, other: &DomainSpec) -> [f64; 4] {
        let (a, b) = (self.window, other.window);
        [
            a[0].min(b[0]),
            a[1].max(b[1]),
            a[2].min(b[2]),
            a[3].max(b[3]),
        ]
    }
}

/// Lattice geometry shared by grids that are compared cellwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridFrame {
    pub x0: f64,
    pub resolution: f64,
    pub nx: usize,
    /// Index of the row centred on the real axis; there are `2h + 1` rows.
    pub h: usize,
}

impl GridFrame {
    pub fn from_window(window: [f64; 4], resolution: f64) -> Result<Self> {
        if !window.iter().all(|v| v.is_finite()) || window[1] <= window[0] || window[3] <= window[2]
        {
            return Err(Error::EmptyWindow);
        }
        if !resolution.is_finite() || resolution < MIN_RESOLUTION {
            return Err(Error::ResolutionTooLow {
                resolution,
                minimum: MIN_RESOLUTION,
            });
        }
        let nx = ((window[1] - window[0]) * resolution).round() as usize;
        let ymax = window[2].abs().max(window[3].abs());
        let h = (ymax * resolution).round() as usize;
        if nx <= 2 * BORDER_MARGIN || h <= BORDER_MARGIN {
            return Err(Error::EmptyWindow);
        }
        Ok(GridFrame {
            x0: window[0],
            resolution,
            nx,
            h,
        })
    }

    pub fn cell_size(&self) -> f64 {
        1.0 / self.resolution
    }

    pub fn ny(&self) -> usize {
        2 * self.h + 1
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        let cs = self.cell_size();
        (
            self.x0 + (i as f64 + 0.5) * cs,
            (j as f64 - self.h as f64) * cs,
        )
    }

    /// Cell containing a point, if inside the lattice.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fi = ((x - self.x0) * self.resolution).floor();
        let fj = (y * self.resolution + 0.5).floor() + self.h as f64;
        if fi < 0.0 || fj < 0.0 || fi >= self.nx as f64 || fj >= self.ny() as f64 {
            return None;
        }
        Some((fi as usize, fj as usize))
    }
}

/// Connected-component labels of a grid and of its complement.
#[derive(Clone, Debug)]
pub struct Labeling {
    pub domain: Vec<u32>,
    pub n_domain: usize,
    pub complement: Vec<u32>,
    pub n_complement: usize,
    /// Indexed by complement label.
    pub complement_bounded: Vec<bool>,
}

pub const NO_LABEL: u32 = u32::MAX;

/// Immutable rasterised symmetric domain.
#[derive(Debug)]
pub struct DomainGrid {
    frame: GridFrame,
    mask: Vec<bool>,
    warnings: Vec<String>,
    labels: OnceLock<Labeling>,
}

impl Clone for DomainGrid {
    fn clone(&self) -> Self {
        DomainGrid::from_mask(self.frame, self.mask.clone(), self.warnings.clone())
    }
}

impl PartialEq for DomainGrid {
    fn eq(&self, other: &Self) -> bool {
        self.frame == other.frame && self.mask == other.mask
    }
}

/// Rasterises a spec on its own window.
pub fn rasterize(spec: &DomainSpec) -> Result<DomainGrid> {
    spec.validate()?;
    let frame = GridFrame::from_window(spec.window, spec.resolution)?;
    rasterize_on(spec, frame)
}

/// Rasterises a spec on a prescribed lattice.
pub fn rasterize_on(spec: &DomainSpec, frame: GridFrame) -> Result<DomainGrid> {
    let shapes = spec.validate()?;
    let cs = frame.cell_size();
    for (index, (_, shape)) in shapes.iter().enumerate() {
        let thickness = match shape {
            Shape::Disk(d) => 2.0 * d.r,
            Shape::Rect(r) => (r.max[0] - r.min[0]).min(r.max[1] - r.min[1]),
            Shape::HalfPlane(_) => f64::INFINITY,
        };
        let cells = thickness / cs;
        if cells < MIN_FEATURE_CELLS {
            return Err(Error::FeatureTooThin { index, cells });
        }
    }
    let (nx, ny) = (frame.nx, frame.ny());
    let mut mask = vec![false; nx * ny];
    for (op, shape) in &shapes {
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = frame.cell_center(i, j);
                // Added shapes are open, subtracted shapes closed, so the
                // result stays an open set.
                match op {
                    ShapeOpKind::Add => {
                        if shape.contains(x, y) || shape.contains(x, -y) {
                            mask[j * nx + i] = true;
                        }
                    }
                    ShapeOpKind::Subtract => {
                        if shape.contains_closed(x, y) || shape.contains_closed(x, -y) {
                            mask[j * nx + i] = false;
                        }
                    }
                }
            }
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            if i < BORDER_MARGIN
                || j < BORDER_MARGIN
                || i + BORDER_MARGIN >= nx
                || j + BORDER_MARGIN >= ny
            {
                mask[j * nx + i] = false;
            }
        }
    }
    let mut warnings = Vec::new();
    if !mask.iter().any(|c| *c) {
        warnings.push("domain is empty".to_string());
    }
    Ok(DomainGrid::from_mask(frame, mask, warnings))
}

impl DomainGrid {
    fn from_mask(frame: GridFrame, mask: Vec<bool>, warnings: Vec<String>) -> Self {
        DomainGrid {
            frame,
            mask,
            warnings,
            labels: OnceLock::new(),
        }
    }

    /// Builds a grid from a cell predicate; the result is symmetrised and
    /// the border margin cleared.
    pub fn from_predicate<F: Fn(usize, usize) -> bool>(frame: GridFrame, pred: F) -> Self {
        let (nx, ny) = (frame.nx, frame.ny());
        let mut mask = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let inside = i >= BORDER_MARGIN
                    && j >= BORDER_MARGIN
                    && i + BORDER_MARGIN < nx
                    && j + BORDER_MARGIN < ny;
                mask[j * nx + i] = inside && (pred(i, j) || pred(i, ny - 1 - j));
            }
        }
        DomainGrid::from_mask(frame, mask, Vec::new())
    }

    pub fn frame(&self) -> GridFrame {
        self.frame
    }

    pub fn nx(&self) -> usize {
        self.frame.nx
    }

    pub fn ny(&self) -> usize {
        self.frame.ny()
    }

    pub fn axis_row(&self) -> usize {
        self.frame.h
    }

    pub fn cell_size(&self) -> f64 {
        self.frame.cell_size()
    }

    pub fn mirror_row(&self, j: usize) -> usize {
        self.ny() - 1 - j
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn cell(&self, i: usize, j: usize) -> bool {
        self.mask[j * self.frame.nx + i]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        self.frame.cell_center(i, j)
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|c| **c).count()
    }

    /// Continuous cell-centre coordinates of a point.
    pub fn fractional_index(&self, x: f64, y: f64) -> (f64, f64) {
        let r = self.frame.resolution;
        ((x - self.frame.x0) * r - 0.5, y * r + self.frame.h as f64)
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        self.frame
            .cell_of(x, y)
            .is_some_and(|(i, j)| self.cell(i, j))
    }

    /// Uniformly chosen centre of a domain cell strictly above the axis.
    pub fn random_cell_center<R: Rng>(&self, rng: &mut R) -> Option<(f64, f64)> {
        let cells: Vec<usize> = (0..self.mask.len())
            .filter(|&k| self.mask[k] && k / self.frame.nx > self.frame.h)
            .collect();
        if cells.is_empty() {
            return None;
        }
        let k = cells[rng.random_range(0..cells.len())];
        Some(self.cell_center(k % self.frame.nx, k / self.frame.nx))
    }

    /// Reflection across the real axis.
    pub fn mirror(&self) -> DomainGrid {
        let (nx, ny) = (self.nx(), self.ny());
        let mut mask = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                mask[(ny - 1 - j) * nx + i] = self.cell(i, j);
            }
        }
        DomainGrid::from_mask(self.frame, mask, self.warnings.clone())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.ny())
            .all(|j| (0..self.nx()).all(|i| self.cell(i, j) == self.cell(i, self.mirror_row(j))))
    }

    /// Removes every cell within `k` cells (Chebyshev distance) of the
    /// complement.
    pub fn erode(&self, k: usize) -> DomainGrid {
        let (nx, ny) = (self.nx() as isize, self.ny() as isize);
        let k = k as isize;
        let mut mask = self.mask.clone();
        for j in 0..ny {
            for i in 0..nx {
                if !self.mask[(j * nx + i) as usize] {
                    continue;
                }
                'search: for dj in -k..=k {
                    for di in -k..=k {
                        let (a, b) = (i + di, j + dj);
                        if a < 0 || b < 0 || a >= nx || b >= ny || !self.mask[(b * nx + a) as usize]
                        {
                            mask[(j * nx + i) as usize] = false;
                            break 'search;
                        }
                    }
                }
            }
        }
        DomainGrid::from_mask(self.frame, mask, Vec::new())
    }

    /// First cell of `self` missing from `other`, or `GridMismatch`.
    pub fn first_cell_outside(&self, other: &DomainGrid) -> Result<Option<(usize, usize)>> {
        if self.frame != other.frame {
            return Err(Error::GridMismatch);
        }
        Ok((0..self.mask.len())
            .find(|&k| self.mask[k] && !other.mask[k])
            .map(|k| (k % self.nx(), k / self.nx())))
    }

    /// Errors with `NotNested` unless `self ⊆ other` cellwise.
    pub fn check_nested_in(&self, other: &DomainGrid) -> Result<()> {
        match self.first_cell_outside(other)? {
            None => Ok(()),
            Some((i, j)) => {
                let (x, y) = self.cell_center(i, j);
                Err(Error::NotNested { x, y })
            }
        }
    }

    /// Cached component labels.
    pub fn labels(&self) -> &Labeling {
        self.labels.get_or_init(|| self.compute_labels())
    }

    fn compute_labels(&self) -> Labeling {
        let (domain, n_domain) =
            label_cells(self.nx(), self.ny(), &self.mask, true, Connectivity::Four);
        let (complement, n_complement) =
            label_cells(self.nx(), self.ny(), &self.mask, false, Connectivity::Eight);
        let mut complement_bounded = vec![true; n_complement];
        let (nx, ny) = (self.nx(), self.ny());
        for j in 0..ny {
            for i in 0..nx {
                if i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
                    let l = complement[j * nx + i];
                    if l != NO_LABEL {
                        complement_bounded[l as usize] = false;
                    }
                }
            }
        }
        Labeling {
            domain,
            n_domain,
            complement,
            n_complement,
            complement_bounded,
        }
    }

    /// Euler characteristic `V − E + F` of the cubical complex with a vertex
    /// per cell, an edge per 4-adjacent pair and a square per full 2×2 block,
    /// restricted to cells accepted by `keep`.
    pub fn euler_characteristic_where<F: Fn(usize, usize) -> bool>(&self, keep: F) -> i64 {
        let (nx, ny) = (self.nx(), self.ny());
        let on = |i: usize, j: usize| self.cell(i, j) && keep(i, j);
        let mut chi = 0i64;
        for j in 0..ny {
            for i in 0..nx {
                if !on(i, j) {
                    continue;
                }
                chi += 1;
                let right = i + 1 < nx && on(i + 1, j);
                let up = j + 1 < ny && on(i, j + 1);
                if right {
                    chi -= 1;
                }
                if up {
                    chi -= 1;
                }
                if right && up && on(i + 1, j + 1) {
                    chi += 1;
                }
            }
        }
        chi
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.euler_characteristic_where(|_, _| true)
    }

    /// Summary of the planar topology.
    pub fn summarize(&self) -> TopoSummary {
        summarize(self)
    }

    /// Binary PGM (P5); domain cells white, top row is the largest `y`.
    pub fn to_pgm(&self) -> Vec<u8> {
        let (nx, ny) = (self.nx(), self.ny());
        let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
        for j in (0..ny).rev() {
            out.extend((0..nx).map(|i| if self.cell(i, j) { 255u8 } else { 0u8 }));
        }
        out
    }

    pub fn write_pgm(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_pgm())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

/// Breadth-first labeling of the cells whose mask value equals `value`.
pub fn label_cells(
    nx: usize,
    ny: usize,
    mask: &[bool],
    value: bool,
    conn: Connectivity,
) -> (Vec<u32>, usize) {
    let mut labels = vec![NO_LABEL; nx * ny];
    let mut n = 0u32;
    let mut queue = VecDeque::new();
    const N4: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    const N8: [(isize, isize); 8] = [
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (1, -1),
        (-1, 1),
        (-1, -1),
    ];
    let nbrs: &[(isize, isize)] = match conn {
        Connectivity::Four => &N4,
        Connectivity::Eight => &N8,
    };
    for start in 0..nx * ny {
        if mask[start] != value || labels[start] != NO_LABEL {
            continue;
        }
        labels[start] = n;
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            let (i, j) = ((k % nx) as isize, (k / nx) as isize);
            for (di, dj) in nbrs {
                let (a, b) = (i + di, j + dj);
                if a < 0 || b < 0 || a >= nx as isize || b >= ny as isize {
                    continue;
                }
                let m = b as usize * nx + a as usize;
                if mask[m] == value && labels[m] == NO_LABEL {
                    labels[m] = n;
                    queue.push_back(m);
                }
            }
        }
        n += 1;
    }
    (labels, n as usize)
}

/// A bounded component of the complement of `D`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hole {
    pub label: u32,
    pub cells: usize,
    /// Centre of the hole cell nearest to the hole's centroid.
    pub representative: [f64; 2],
    pub meets_axis: bool,
}

/// Per-component data of `D`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentInfo {
    pub label: u32,
    pub cells: usize,
    pub euler: i64,
    /// `1 − χ`: number of holes of this component.
    pub b1: usize,
    /// Runs of this component along the symmetry row; 0 off the axis.
    pub axis_runs: usize,
    /// Whether the component lies strictly above the axis.
    pub upper: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopoSummary {
    pub b0_d: usize,
    /// Number of bounded complement components.
    pub b1_d: usize,
    /// `b0 − χ`, to be compared with `b1_d`.
    pub b1_euler: i64,
    pub euler: i64,
    pub b0_dreal: usize,
    pub b0_dplus: usize,
    pub b1_dplus: usize,
    pub k_offreal: usize,
    pub bounded_complement_components: Vec<Hole>,
    pub components: Vec<ComponentInfo>,
}

impl TopoSummary {
    pub fn euler_consistent(&self) -> bool {
        self.b1_euler == self.b1_d as i64
    }
}

/// Centre of the cell (from `cells`) nearest the centroid of `cells`.
pub fn nearest_to_centroid(grid: &DomainGrid, cells: &[(usize, usize)]) -> Option<[f64; 2]> {
    if cells.is_empty() {
        return None;
    }
    let n = cells.len() as f64;
    let (sx, sy) = cells
        .iter()
        .fold((0.0, 0.0), |(a, b), &(i, j)| (a + i as f64, b + j as f64));
    let (cx, cy) = (sx / n, sy / n);
    let &(i, j) = cells
        .iter()
        .min_by(|p, q| {
            let d = |&(i, j): &(usize, usize)| (i as f64 - cx).powi(2) + (j as f64 - cy).powi(2);
            d(p).total_cmp(&d(q))
                .then(p.1.cmp(&q.1))
                .then(p.0.cmp(&q.0))
        })
        .expect("nonempty");
    let (x, y) = grid.cell_center(i, j);
    Some([x, y])
}

/// Cells of each label, in row-major order.
pub fn cells_by_label(nx: usize, labels: &[u32], n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new(); n];
    for (k, l) in labels.iter().enumerate() {
        if *l != NO_LABEL {
            out[*l as usize].push((k % nx, k / nx));
        }
    }
    out
}

pub fn summarize(grid: &DomainGrid) -> TopoSummary {
    let labels = grid.labels();
    let (nx, h) = (grid.nx(), grid.axis_row());
    let euler = grid.euler_characteristic();

    let comp_cells = cells_by_label(nx, &labels.domain, labels.n_domain);
    let components = comp_cells
        .iter()
        .enumerate()
        .map(|(l, cells)| {
            let l = l as u32;
            let chi = grid.euler_characteristic_where(|i, j| labels.domain[j * nx + i] == l);
            let axis_runs = count_runs(nx, |i| labels.domain[h * nx + i] == l);
            ComponentInfo {
                label: l,
                cells: cells.len(),
                euler: chi,
                b1: (1 - chi).max(0) as usize,
                axis_runs,
                upper: cells.iter().all(|&(_, j)| j > h),
            }
        })
        .collect();

    let hole_cells = cells_by_label(nx, &labels.complement, labels.n_complement);
    let bounded_complement_components: Vec<Hole> = hole_cells
        .iter()
        .enumerate()
        .filter(|(l, _)| labels.complement_bounded[*l])
        .map(|(l, cells)| Hole {
            label: l as u32,
            cells: cells.len(),
            representative: nearest_to_centroid(grid, cells).expect("labels are nonempty"),
            meets_axis: cells.iter().any(|&(_, j)| j == h),
        })
        .collect();

    let b0_dreal = count_runs(nx, |i| grid.cell(i, h));

    // D⁺ includes the symmetry row.
    let plus: Vec<bool> = grid
        .mask()
        .iter()
        .enumerate()
        .map(|(k, c)| *c && k / nx >= h)
        .collect();
    let (plus_labels, b0_dplus) = label_cells(nx, grid.ny(), &plus, true, Connectivity::Four);
    let mut touches = vec![false; b0_dplus];
    for i in 0..nx {
        let l = plus_labels[h * nx + i];
        if l != NO_LABEL {
            touches[l as usize] = true;
        }
    }
    let k_offreal = touches.iter().filter(|t| !**t).count();
    let chi_plus = grid.euler_characteristic_where(|_, j| j >= h);
    let b1_dplus = (b0_dplus as i64 - chi_plus).max(0) as usize;

    TopoSummary {
        b0_d: labels.n_domain,
        b1_d: bounded_complement_components.len(),
        b1_euler: labels.n_domain as i64 - euler,
        euler,
        b0_dreal,
        b0_dplus,
        b1_dplus,
        k_offreal,
        bounded_complement_components,
        components,
    }
}

fn count_runs<F: Fn(usize) -> bool>(n: usize, on: F) -> usize {
    let mut runs = 0;
    let mut prev = false;
    for i in 0..n {
        let c = on(i);
        if c && !prev {
            runs += 1;
        }
        prev = c;
    }
    runs
}

/// Spec helpers for common fixtures.
pub mod fixtures {
    use super::*;

    pub fn disk(cx: f64, cy: f64, r: f64) -> Shape {
        Shape::Disk(Disk { c: [cx, cy], r })
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Shape {
        Shape::Rect(Rect {
            min: [x0, y0],
            max: [x1, y1],
        })
    }

    pub const WINDOW: [f64; 4] = [-5.0, 5.0, -5.0, 5.0];

    pub fn spec(resolution: f64, shapes: Vec<ShapeEntry>) -> DomainSpec {
        DomainSpec::new(WINDOW, resolution, shapes)
    }

    /// `inner < |z| < outer`.
    pub fn annulus(inner: f64, outer: f64, resolution: f64) -> DomainSpec {
        spec(
            resolution,
            vec![
                ShapeEntry::add(disk(0.0, 0.0, outer)),
                ShapeEntry::subtract(disk(0.0, 0.0, inner)),
            ],
        )
    }

    pub fn disk_domain(r: f64, resolution: f64) -> DomainSpec {
        spec(resolution, vec![ShapeEntry::add(disk(0.0, 0.0, r))])
    }

    /// Two disks of radius `r` centred at `±i·c`.
    pub fn conjugate_disks(c: f64, r: f64, resolution: f64) -> DomainSpec {
        spec(resolution, vec![ShapeEntry::add(disk(0.0, c, r))])
    }

    /// Disk `|z| < outer` with round holes of radius `r` at `±c` on the real axis.
    pub fn two_holes(c: f64, r: f64, outer: f64, resolution: f64) -> DomainSpec {
        spec(
            resolution,
            vec![
                ShapeEntry::add(disk(0.0, 0.0, outer)),
                ShapeEntry::subtract(disk(-c, 0.0, r)),
                ShapeEntry::subtract(disk(c, 0.0, r)),
            ],
        )
    }
}
