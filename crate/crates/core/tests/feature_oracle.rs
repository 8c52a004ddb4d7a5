mod common;

use common::brute::{self, Th};
use common::random_windows;
use myorec::features::{compute_feature, FeatureId, FeatureSetSpec, SetName, Thresholds, WindowCatalog};
use myorec::preprocess::{Window, WindowMeta};

fn th() -> (Thresholds, Th) {
    let t = Thresholds::default();
    let b = Th {
        zc: t.zc_thresh,
        ssc: t.ssc_thresh,
        wamp: t.wamp_thresh,
        myop: t.myop_thresh,
    };
    (t, b)
}

fn window(channels: Vec<Vec<f64>>) -> Window {
    Window {
        samples: channels,
        meta: WindowMeta {
            subject: "S".into(),
            movement: myorec::dataset::MovementLabel::T,
            trial: 1,
            index: 0,
        },
        window_ms: 0.0,
    }
}

#[test]
fn every_catalog_feature_matches_reference() {
    let (t, b) = th();
    let windows = random_windows(1000, 7);
    let mut mismatches = Vec::new();
    for (i, x) in windows.iter().enumerate() {
        for order in [4, 6] {
            for f in FeatureId::catalog() {
                if matches!(f, FeatureId::Ar(k) if usize::from(k) > order) {
                    continue;
                }
                let got = compute_feature(f, x, &t, order).unwrap();
                let want = brute::feature(&f.name(), x, &b, order);
                if !brute::close(got, want) {
                    mismatches.push(format!("window {i} {}: {got} vs {want}", f.name()));
                }
            }
        }
    }
    assert!(mismatches.is_empty(), "{:#?}", &mismatches[..mismatches.len().min(10)]);
}

#[test]
fn named_sets_match_reference_through_extract_and_gather() {
    let (t, b) = th();
    let windows = random_windows(200, 11);
    for pair in windows.chunks(2) {
        let n = pair[0].len().min(pair[1].len());
        let w = window(vec![pair[0][..n].to_vec(), pair[1][..n].to_vec()]);
        let catalog = WindowCatalog::compute(&w, &t).unwrap();
        for name in SetName::REGISTRY {
            let set = FeatureSetSpec::named(name).unwrap();
            let order = set.ar_order();
            let extracted = set.extract(&w).unwrap().values;
            let gathered = set.gather(&catalog).unwrap();
            let mut k = 0;
            for x in &w.samples {
                for f in &set.features {
                    let want = brute::feature(&f.name(), x, &b, order);
                    assert!(brute::close(extracted[k], want), "{name:?} {}", f.name());
                    assert!(brute::close(gathered[k], want), "{name:?} {}", f.name());
                    k += 1;
                }
            }
            assert_eq!(k, extracted.len());
        }
    }
}

#[test]
fn irregularity_factor_of_sampled_sine() {
    let fs = 2000.0;
    let x: Vec<f64> = (0..500)
        .map(|i| (2.0 * std::f64::consts::PI * 100.0 * i as f64 / fs).sin())
        .collect();
    let (t, _) = th();
    let got = compute_feature(FeatureId::IrregularityFactor, &x, &t, 4).unwrap();
    let want = brute::tdpsd(&x)[4];
    assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{got} vs {want}");
    assert!(got.abs() < 0.05);
}
