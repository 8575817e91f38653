use sparse_embed::harness::{bench, reverify, BenchConfig, InstanceFamily, Pipeline};

fn config(pipeline: Pipeline, family: InstanceFamily) -> BenchConfig {
    BenchConfig {
        family,
        pipeline,
        sizes: vec![16, 32, 64],
        m: 1,
        n: 3,
        seed: 3,
        timings: false,
    }
}

#[test]
fn reports_are_deterministic_and_reverify() {
    for (pipeline, family) in [
        (Pipeline::Sparse, InstanceFamily::RandomRegularGraph { degree: 4 }),
        (Pipeline::WidthNatural, InstanceFamily::Path),
        (Pipeline::WidthSweep, InstanceFamily::Cycle),
    ] {
        let cfg = config(pipeline, family);
        let a = bench(&cfg).unwrap();
        let b = bench(&cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.records.windows(2).all(|w| w[0].v < w[1].v));
        assert!(a.records.iter().all(|r| r.certificate.skeletal_ok && r.runtime_ms.is_none()));
        assert_eq!(a.fit.residuals.len(), 3);
        assert!(reverify(&a).unwrap());

        let json = serde_json::to_value(&a).unwrap();
        let back: sparse_embed::harness::BenchReport = serde_json::from_value(json).unwrap();
        assert!(reverify(&back).unwrap());
    }
}

#[test]
fn tampered_report_fails_reverification() {
    let mut r = bench(&config(Pipeline::Sparse, InstanceFamily::Cycle)).unwrap();
    r.records[1].certificate.max_simplices_per_plane += 1;
    assert!(!reverify(&r).unwrap());
}

#[test]
fn timings_are_opt_in() {
    let mut cfg = config(Pipeline::Sparse, InstanceFamily::Path);
    cfg.timings = true;
    assert!(bench(&cfg).unwrap().records.iter().all(|r| r.runtime_ms.is_some()));
}
