use leapfrog_core::orbits::{classify_sale_regime, iterate_sale_orbit, sign_blocks};
use leapfrog_core::*;

const SETS: [(f64, f64, f64, f64); 4] = [
    (0.16, 0.9, 0.46, 0.7),
    (0.7, 0.45, 0.7, 0.4),
    (0.9, 0.6, 0.7, 0.46),
    (0.95, 0.35, 0.85, 0.15),
];

fn published_cells() -> Vec<Params> {
    let mut cells = Vec::new();
    for (a, b, alpha, beta) in SETS {
        let cs: &[f64] = if a == 0.16 {
            &[20.0, 105.0, 200.0]
        } else {
            &[10.0, 20.0, 150.0]
        };
        for &c in cs {
            cells.push(Params::new(a, b, alpha, beta, c).unwrap());
        }
    }
    cells
}

#[test]
fn identical_configs_are_bit_identical() {
    let cfg = Config::default();
    let opts = ClassifyOptions::default();
    for p in published_cells() {
        let tp = p.transform();
        let a = iterate_orbit(&cfg, &tp).unwrap();
        let b = iterate_orbit(&cfg, &tp).unwrap();
        assert!(a
            .z
            .iter()
            .zip(&b.z)
            .all(|(x, y)| x.to_bits() == y.to_bits()));
        assert!(a
            .w
            .iter()
            .zip(&b.w)
            .all(|(x, y)| x.to_bits() == y.to_bits()));
        let ra = classify_regime(&tp, &cfg, &opts).unwrap();
        let rb = classify_regime(&tp, &cfg, &opts).unwrap();
        assert_eq!(ra.label, rb.label);
        assert_eq!(ra.lyapunov.to_bits(), rb.lyapunov.to_bits());
    }
    // parallel sweeps assemble in input order regardless of scheduling
    let cells = published_cells();
    let first = regime_grid(&cells, &cfg, &opts);
    let second = regime_grid(&cells, &cfg, &opts);
    assert_eq!(first, second);
}

#[test]
fn doubling_the_transient_keeps_periodic_labels() {
    let opts = ClassifyOptions::default();
    let short = Config::default();
    let long = Config {
        n_transient: 2 * short.n_transient,
        ..short
    };
    let mut periodic = 0;
    for p in published_cells() {
        let tp = p.transform();
        let a = classify_regime(&tp, &short, &opts).unwrap();
        if a.period.is_none() {
            continue;
        }
        periodic += 1;
        let b = classify_regime(&tp, &long, &opts).unwrap();
        assert_eq!((a.label, a.period), (b.label, b.period), "{p:?}");
    }
    assert!(periodic >= 4);
}

#[test]
fn labels_agree_between_coordinate_systems() {
    let cfg = Config::default();
    let opts = ClassifyOptions::default();
    for p in published_cells() {
        let zw = classify_regime(&p.transform(), &cfg, &opts).unwrap();
        let xy = classify_sale_regime(&p, &cfg, &opts).unwrap();
        assert_eq!(zw.label, xy.label, "{p:?}");
        assert_eq!(zw.period, xy.period, "{p:?}");
    }
}

#[test]
fn sale_orbit_matches_transformed_orbit_on_periodic_sets() {
    let cfg = Config::default();
    let p = Params::new(0.9, 0.6, 0.7, 0.46, 150.0).unwrap();
    let zw = iterate_orbit(&cfg, &p.transform()).unwrap();
    let xy = iterate_sale_orbit(&cfg, &p).unwrap();
    for (a, b) in zw.z.iter().zip(&xy.z) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn leapfrogging_sign_blocks_are_bounded_by_the_period() {
    let cfg = Config::default();
    let opts = ClassifyOptions::default();
    let mut seen = 0;
    for p in published_cells() {
        let tp = p.transform();
        let report = classify_regime(&tp, &cfg, &opts).unwrap();
        if report.label != RegimeLabel::Leapfrogging {
            continue;
        }
        seen += 1;
        let orbit = iterate_orbit(&cfg, &tp).unwrap();
        let blocks = sign_blocks(&orbit.z, opts.deadband);
        assert!(blocks.len() >= 3, "{p:?}");
        // interior blocks are complete; the first and last may be cut off
        let limit = report.period.unwrap_or(orbit.len());
        for b in &blocks[1..blocks.len() - 1] {
            assert!(*b <= limit, "{p:?}: block {b} > {limit}");
        }
        if let Some(period) = report.period {
            assert!(report.sign_changes_per_period >= 2);
            assert!(period >= 2);
        }
    }
    assert!(seen >= 5);
}

#[test]
fn sale_sum_stays_positive_on_published_sets() {
    let cells = published_cells();
    let out = regime_grid(&cells, &Config::default(), &ClassifyOptions::default());
    for cell in out {
        let report = cell.report.unwrap();
        assert!(report.min_w > 0.0, "{:?}: {}", cell.params, report.min_w);
    }
}

#[test]
fn leapfrogging_grid_over_published_elasticities() {
    let sets: Vec<Params> = SETS[1..]
        .iter()
        .map(|&(a, b, alpha, beta)| Params::new(a, b, alpha, beta, 0.0).unwrap())
        .collect();
    let cells = orbits::grid_cells(&sets, &[10.0, 20.0, 150.0]).unwrap();
    let out = regime_grid(&cells, &Config::default(), &ClassifyOptions::default());
    assert_eq!(out.len(), 9);
    for cell in &out {
        let r = cell.report.as_ref().unwrap();
        assert!(r.min_w > 0.0);
        if cell.params.c() >= 20.0 {
            assert_eq!(r.label, RegimeLabel::Leapfrogging, "{:?}", cell.params);
        }
    }
}

#[test]
fn monopoly_set_regimes() {
    let cfg = Config::default();
    let opts = ClassifyOptions::default();
    for c in [20.0, 200.0] {
        let tp = Params::new(0.16, 0.9, 0.46, 0.7, c).unwrap().transform();
        let r = classify_regime(&tp, &cfg, &opts).unwrap();
        assert!(matches!(
            r.label,
            RegimeLabel::MonopolyY | RegimeLabel::PeriodicOneSided
        ));
        assert_eq!(r.sign_changes_per_period, 0);
    }
}
