mod common;

use common::{cell_complex_euler, flood_b0_b1, flood_labels, random_spec};
use cone_runge::topology::fixtures::{
    annulus, conjugate_disks, disk, disk_domain, rect, spec, two_holes,
};
use cone_runge::topology::{DomainSpec, ShapeEntry, TopoSummary};
use cone_runge::{rasterize, DomainGrid, Error};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn counts(s: &TopoSummary) -> (usize, usize, usize, usize, usize) {
    (s.b0_d, s.b1_d, s.b0_dreal, s.b0_dplus, s.k_offreal)
}

fn oracle_counts(g: &DomainGrid) -> (usize, usize) {
    flood_b0_b1(g.nx(), g.ny(), g.mask())
}

#[test]
fn unit_disk_on_small_window() {
    let s = DomainSpec::new(
        [-2.0, 2.0, -2.0, 2.0],
        16.0,
        vec![ShapeEntry::add(disk(0.0, 0.0, 1.0))],
    );
    let g = rasterize(&s).unwrap();
    assert!(g.is_symmetric());
    assert_eq!(oracle_counts(&g), (1, 0));
    assert_eq!(counts(&g.summarize()), (1, 0, 1, 1, 0));
}

#[test]
fn annulus_has_one_hole() {
    let g = rasterize(&annulus(1.0, 3.0, 16.0)).unwrap();
    assert!(g.is_symmetric());
    assert_eq!(oracle_counts(&g), (1, 1));
    let s = g.summarize();
    assert_eq!(counts(&s), (1, 1, 2, 1, 0));
    assert!(s.euler_consistent());
    let hole = &s.bounded_complement_components[0];
    assert!(hole.representative[0].hypot(hole.representative[1]) < 1.0);
    assert!(hole.meets_axis);
}

#[test]
fn off_axis_disk_is_mirrored() {
    let g = rasterize(&conjugate_disks(1.5, 0.5, 16.0)).unwrap();
    assert!(g.is_symmetric());
    assert!(g.contains_point(0.0, 1.5) && g.contains_point(0.0, -1.5));
    assert!(!g.contains_point(0.0, 0.0));
    assert_eq!(oracle_counts(&g), (2, 0));
    assert_eq!(counts(&g.summarize()), (2, 0, 0, 1, 1));
}

#[test]
fn full_window_domain() {
    let s = spec(16.0, vec![ShapeEntry::add(rect(-6.0, -6.0, 6.0, 6.0))]);
    let g = rasterize(&s).unwrap();
    let labels = g.labels();
    assert_eq!(labels.n_domain, 1);
    assert_eq!(labels.n_complement, 1);
    assert!(!labels.complement_bounded[0]);
    let ny = g.ny();
    for i in 0..g.nx() {
        assert!(!g.cell(i, 0) && !g.cell(i, 1) && !g.cell(i, ny - 1) && !g.cell(i, ny - 2));
    }
}

#[test]
fn grid_errors_and_warnings() {
    assert!(matches!(
        rasterize(&annulus(1.0, 3.0, 4.0)),
        Err(Error::ResolutionTooLow { .. })
    ));
    let mut s = annulus(1.0, 3.0, 16.0);
    s.window = [1.0, 1.0, -1.0, 1.0];
    assert!(matches!(rasterize(&s), Err(Error::EmptyWindow)));
    assert!(matches!(
        rasterize(&spec(16.0, vec![ShapeEntry::add(disk(0.0, 0.0, 0.05))])),
        Err(Error::FeatureTooThin { index: 0, .. })
    ));
    let empty = rasterize(&spec(
        16.0,
        vec![
            ShapeEntry::add(disk(0.0, 0.0, 1.0)),
            ShapeEntry::subtract(disk(0.0, 0.0, 2.0)),
        ],
    ))
    .unwrap();
    assert_eq!(empty.count(), 0);
    assert!(!empty.warnings().is_empty());
}

#[test]
fn json_ingestion_and_pointers() {
    let text = r#"{"window":[-5,5,-5,5],"resolution":16,"shapes":[
        {"op":"add","disk":{"c":[0,0],"r":3}},
        {"op":"subtract","disk":{"c":[0,0],"r":1}}]}"#;
    let s: DomainSpec = serde_json::from_str(text).unwrap();
    assert_eq!(s, annulus(1.0, 3.0, 16.0));
    let back: DomainSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);

    let bad = r#"{"window":[-5,5,-5,5],"resolution":16,"shapes":[{"op":"add","disk":{"c":[0,0],"r":-1}}]}"#;
    let s: DomainSpec = serde_json::from_str(bad).unwrap();
    match rasterize(&s) {
        Err(Error::InvalidSpec { pointer, .. }) => assert_eq!(pointer, "/shapes/0/disk/r"),
        other => panic!("{other:?}"),
    }
    let two = r#"{"window":[-5,5,-5,5],"resolution":16,"shapes":[{"op":"add","disk":{"c":[0,0],"r":1},"rect":{"min":[0,0],"max":[1,1]}}]}"#;
    let s: DomainSpec = serde_json::from_str(two).unwrap();
    assert!(matches!(rasterize(&s), Err(Error::InvalidSpec { .. })));
    assert!(serde_json::from_str::<DomainSpec>(
        r#"{"window":[0,1,0,1],"resolution":8,"shapes":[],"extra":1}"#
    )
    .is_err());
}

#[test]
fn halfplane_shapes() {
    let text = r#"{"window":[-5,5,-5,5],"resolution":16,"shapes":[
        {"op":"add","disk":{"c":[0,0],"r":3}},
        {"op":"subtract","halfplane":{"normal":[-1,0],"offset":-1}}]}"#;
    let s: DomainSpec = serde_json::from_str(text).unwrap();
    let g = rasterize(&s).unwrap();
    assert!(g.contains_point(0.0, 0.0));
    assert!(!g.contains_point(2.0, 0.0));
    assert_eq!(oracle_counts(&g), (1, 0));
}

#[test]
fn fixture_summaries_match_oracles() {
    for (name, s) in [
        ("disk", disk_domain(2.0, 16.0)),
        ("annulus", annulus(1.0, 3.0, 16.0)),
        ("conjugate disks", conjugate_disks(1.5, 0.5, 16.0)),
        ("two holes", two_holes(1.5, 0.5, 3.0, 16.0)),
    ] {
        let g = rasterize(&s).unwrap();
        let s = g.summarize();
        let (b0, b1) = oracle_counts(&g);
        let chi = cell_complex_euler(g.nx(), g.ny(), g.mask());
        assert_eq!((s.b0_d, s.b1_d), (b0, b1), "{name}");
        assert_eq!(s.euler, chi, "{name}");
        assert_eq!(b0 as i64 - chi, b1 as i64, "{name}");
    }
}

#[test]
fn euler_matches_flood_fill_on_random_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for n in 0..200 {
        let s = random_spec(&mut rng, 16.0);
        let g = rasterize(&s).unwrap();
        let sum = g.summarize();
        let (b0, b1) = oracle_counts(&g);
        let chi = cell_complex_euler(g.nx(), g.ny(), g.mask());
        assert_eq!((sum.b0_d, sum.b1_d, sum.euler), (b0, b1, chi), "spec {n}");
        assert_eq!(b0 as i64 - chi, b1 as i64, "spec {n}");
        assert!(sum.euler_consistent());
    }
}

#[test]
fn upper_half_counts_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..50 {
        let g = rasterize(&random_spec(&mut rng, 16.0)).unwrap();
        let (nx, h) = (g.nx(), g.axis_row());
        let upper: Vec<bool> = (0..g.ny())
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| j >= h && g.cell(i, j))
            .collect();
        let (labels, n) = flood_labels(nx, g.ny(), &upper, true, false);
        let on_axis: std::collections::BTreeSet<usize> =
            (0..nx).filter_map(|i| labels[h * nx + i]).collect();
        let runs = (0..nx)
            .filter(|&i| g.cell(i, h) && (i == 0 || !g.cell(i - 1, h)))
            .count();
        let s = g.summarize();
        assert_eq!(s.b0_dplus, n);
        assert_eq!(s.k_offreal, n - on_axis.len());
        assert_eq!(s.b0_dreal, runs);
    }
}

#[test]
fn resolution_doubling_keeps_topology() {
    for s in [
        disk_domain(2.0, 16.0),
        annulus(1.0, 3.0, 16.0),
        conjugate_disks(1.5, 0.5, 16.0),
        two_holes(1.5, 0.5, 3.0, 16.0),
        spec(
            16.0,
            vec![
                ShapeEntry::add(rect(-3.0, -2.0, 3.0, 2.0)),
                ShapeEntry::subtract(disk(-1.5, 1.0, 0.5)),
                ShapeEntry::subtract(disk(1.5, 0.0, 0.4)),
            ],
        ),
    ] {
        let a = rasterize(&s).unwrap().summarize();
        let mut fine = s.clone();
        fine.resolution *= 2.0;
        let b = rasterize(&fine).unwrap().summarize();
        assert_eq!(counts(&a), counts(&b));
        assert_eq!(
            (a.b1_dplus, a.components.len()),
            (b.b1_dplus, b.components.len())
        );
    }
}

#[test]
fn pgm_export() {
    let g = rasterize(&annulus(1.0, 3.0, 8.0)).unwrap();
    let pgm = g.to_pgm();
    let header = format!("P5\n{} {}\n255\n", g.nx(), g.ny());
    assert!(pgm.starts_with(header.as_bytes()));
    assert_eq!(pgm.len(), header.len() + g.nx() * g.ny());
    let dir = std::env::temp_dir().join(format!("cone-runge-pgm-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("annulus.pgm");
    g.write_pgm(&path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), pgm);
    std::fs::remove_dir_all(&dir).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn summary_is_mirror_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = rasterize(&random_spec(&mut rng, 12.0)).unwrap();
        let m = g.mirror();
        prop_assert!(g.is_symmetric());
        prop_assert_eq!(m.mask(), g.mask());
        prop_assert_eq!(m.summarize(), g.summarize());
    }

    #[test]
    fn euler_duality(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = rasterize(&random_spec(&mut rng, 12.0)).unwrap();
        let (b0, b1) = oracle_counts(&g);
        prop_assert_eq!(b0 as i64 - cell_complex_euler(g.nx(), g.ny(), g.mask()), b1 as i64);
        prop_assert!(g.summarize().euler_consistent());
    }

    #[test]
    fn erosion_shrinks(seed in any::<u64>(), k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = rasterize(&random_spec(&mut rng, 12.0)).unwrap();
        let e = g.erode(k);
        prop_assert!(e.check_nested_in(&g).is_ok());
        prop_assert!(e.is_symmetric());
    }
}
