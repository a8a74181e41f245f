use rankmod::presets::Preset;
use rankmod::sim::*;

#[test]
fn runs_are_reproducible() {
    let cfg = SimConfig::new("con1", 30.0, 50, 17);
    let (a, logs_a) = simulate_with_log(&cfg).unwrap();
    let (b, logs_b) = simulate_with_log(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(logs_a, logs_b);
    let other = simulate(&SimConfig { seed: 18, ..cfg }).unwrap();
    assert_ne!(other.writes, a.writes);
}

#[test]
fn uncoded_baseline_wears_out_sooner() {
    let con1 = simulate(&SimConfig::new("con1", 22.0, 1000, 4)).unwrap();
    let uncoded = simulate(&SimConfig::new("uncoded-3-2", 22.0, 1000, 4)).unwrap();
    assert_eq!(con1.gamma_first, uncoded.gamma_first);
    assert!(uncoded.mean_writes < con1.mean_writes, "{} vs {}", uncoded.mean_writes, con1.mean_writes);
    assert!(uncoded.cost_histogram.len() == 3);
}

#[test]
fn lifetime_lower_bound() {
    for (name, max_level) in [("con1", 15.0), ("uncoded-3-2", 15.0), ("con2-example3", 12.5), ("con3-scripted", 9.0)] {
        let report = simulate(&SimConfig::new(name, max_level, 40, 2)).unwrap();
        let bound = ((max_level - report.gamma_first) / report.r as f64).floor() as usize;
        assert!(report.min_writes >= bound, "{name}: {} < {bound}", report.min_writes);
        assert_eq!(report.encode_failures, 0, "{name}");
        assert_eq!(report.decode_errors, 0, "{name}");
        assert!(report.cost_histogram.len() <= report.r + 1);
    }
}

#[test]
fn report_fields_are_consistent() {
    let (report, logs) = simulate_with_log(&SimConfig::new("con1", 12.0, 25, 9)).unwrap();
    assert_eq!(report.writes.len(), 25);
    assert_eq!(report.cost_histogram.iter().sum::<u64>() as usize, report.writes.iter().sum::<usize>());
    let expect = report.mean_writes * 30f64.log2() / 6.0;
    assert!((report.bits_per_cell - expect).abs() < 1e-12);
    assert!(logs.iter().all(|l| l.stop == StopReason::LevelLimit));
    let csv = costs_csv(&logs);
    assert_eq!(csv.lines().count(), 1 + report.writes.iter().sum::<usize>());
    let text = serde_json::to_string(&report).unwrap();
    assert!(text.contains("\"k_r\":\"30\""));
}

#[test]
fn write_cap_stops_runaway_trials() {
    let cfg = SimConfig { max_writes: 5, ..SimConfig::new("con1", 1e6, 3, 1) };
    let (report, logs) = simulate_with_log(&cfg).unwrap();
    assert_eq!(report.max_writes, 5);
    assert!(logs.iter().all(|l| l.stop == StopReason::WriteCap));
}

#[test]
fn custom_scheme() {
    let code = Preset::Uncoded { q: 4, z: 1 }.build().unwrap();
    let cfg = SimConfig::new("uncoded-4-1", 20.0, 10, 3);
    let (report, _) = simulate_code(code.as_ref(), &cfg).unwrap();
    assert_eq!((report.q, report.z, report.r), (4, 1, 3));
    assert!(report.min_writes >= ((20.0 - report.gamma_first) / 3.0).floor() as usize);
}
