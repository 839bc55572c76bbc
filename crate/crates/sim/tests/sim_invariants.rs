//! Cross-cutting simulator invariants: time conservation, workload
//! correctness, config plumbing.

use oscar_sim::{run_scenario, Mode, Preset, ScenarioConfig};

#[test]
fn state_times_conserve_duration() {
    for preset in [Preset::Gen16, Preset::Gen32] {
        for mode in [Mode::Oscar, Mode::DtlsPsk] {
            let cfg = ScenarioConfig::preset(preset, mode, 8, 3);
            let report = run_scenario(&cfg).unwrap();
            for node in &report.nodes {
                let e = &node.energy;
                assert!(
                    (e.cpu_active_s + e.cpu_lpm_s - cfg.duration_s).abs() < 1e-6,
                    "{}: cpu states must sum to the duration",
                    node.label
                );
                assert!(
                    e.radio_rx_s + e.radio_tx_s <= cfg.duration_s + 1e-6,
                    "{}: radio busy time exceeds the duration",
                    node.label
                );
            }
        }
    }
}

#[test]
fn workload_mean_interarrival_within_ten_percent() {
    // Aggregate over all clients of a 3 h run: the per-client processes
    // target a 120 s mean inter-arrival.
    let cfg = ScenarioConfig::gen16(Mode::Oscar, 16, 11);
    let report = run_scenario(&cfg).unwrap();
    let per_client = report.completed_requests as f64 / cfg.n_clients as f64;
    let mean_interarrival = cfg.duration_s / per_client;
    assert!(
        (mean_interarrival - 120.0).abs() <= 12.0,
        "mean inter-arrival {mean_interarrival:.1}s vs 120s"
    );
}

#[test]
fn scenario_file_reproduces_preset_run() {
    let text = "\
[scenario]
preset = gen16
mode = dtls
clients = 5
slots = 3
beta_s = 60
duration_s = 3600
seed = 21
";
    let parsed = ScenarioConfig::parse_str(text).unwrap();
    let mut built = ScenarioConfig::gen16(Mode::DtlsPsk, 5, 21);
    built.duration_s = 3600.0;
    assert_eq!(parsed, built);
    assert_eq!(run_scenario(&parsed).unwrap(), run_scenario(&built).unwrap());
}

#[test]
fn beacon_runs_include_pan_node() {
    let cfg = ScenarioConfig::gen32(Mode::Oscar, 2, 1);
    let report = run_scenario(&cfg).unwrap();
    let labels: Vec<&str> = report.nodes.iter().map(|n| n.label.as_str()).collect();
    assert_eq!(labels, vec!["server", "c1", "c2", "pan"]);
    // The coordinator transmits beacons all run long.
    assert!(report.nodes[3].energy.radio_tx_s > 0.0);

    let cfg = ScenarioConfig::gen16(Mode::Oscar, 2, 1);
    let report = run_scenario(&cfg).unwrap();
    assert_eq!(report.nodes.len(), 3);
}

#[test]
fn cheaper_signing_moves_the_crossover_earlier() {
    use oscar_sim::sweep_crossover;
    // A lighter signing load (large beta) favors the object-security mode,
    // so its energy crossover happens at a lower client/slot ratio than
    // under a heavy load (small beta).
    let counts = [3, 4, 6, 8, 12, 16];
    let seeds = [1, 2];
    let crossover_at = |beta: f64| {
        let mut base = ScenarioConfig::gen16(Mode::Oscar, 1, 1);
        base.beta_s = beta;
        sweep_crossover(&base, &counts, &seeds)
            .unwrap()
            .crossover_ratio
            .unwrap_or(f64::INFINITY)
    };
    let heavy = crossover_at(30.0);
    let medium = crossover_at(60.0);
    let light = crossover_at(120.0);
    assert!(light <= medium && medium <= heavy, "crossovers not ordered: {light} / {medium} / {heavy}");
}

#[test]
fn lossy_link_recovers_via_retransmission() {
    for mode in [Mode::Oscar, Mode::DtlsPsk] {
        let mut cfg = ScenarioConfig::gen16(mode, 4, 17);
        cfg.duration_s = 3600.0;
        cfg.link.loss_prob = 0.05;
        let report = run_scenario(&cfg).unwrap();
        assert!(report.counts.retransmissions > 0, "{mode:?}: 5% loss must trigger retransmissions");
        // The retransmission budget absorbs this loss rate almost always.
        let expected = cfg.n_clients as f64 * cfg.duration_s / 120.0;
        assert!(
            report.completed_requests as f64 > 0.9 * expected,
            "{mode:?}: only {} of ~{expected:.0} requests completed",
            report.completed_requests
        );
        assert_eq!(report.latency.samples as u64, report.completed_requests);
    }
}
