use pulsecell::{run, RunOutput, ScenarioConfig};

fn fig8b() -> RunOutput {
    run(&ScenarioConfig::preset("fig8b").unwrap()).unwrap()
}

fn last_quarter(out: &RunOutput) -> &[pulsecell::RunRecord] {
    let n = out.records.len();
    &out.records[3 * n / 4..]
}

#[test]
fn blocks_stay_decoupled_and_split_matches_totals() {
    let out = fig8b();
    for r in &out.records {
        let pc = r.photocell.as_ref().unwrap();
        assert!(pc.inter_block_coherence <= 1e-10, "t {}", r.thermo.t);
        let s = &pc.split;
        let th = &r.thermo;
        assert!((s.p_d - th.power).abs() <= 1e-12);
        assert!((s.e_d + s.e_a - th.energy).abs() <= 1e-12);
        assert!((s.j_d + s.j_a - th.heat_current).abs() <= 1e-12);
        assert_eq!(pc.electrical.donor_power, s.p_d);
    }
    assert!(out.summary.min_eigenvalue > -1e-6);
}

#[test]
fn cycle_flux_is_conserved_in_steady_operation() {
    let cfg = ScenarioConfig::preset("fig8b").unwrap();
    let p = cfg.photocell;
    let n_ph = p.phonon_occupation();
    let out = run(&cfg).unwrap();
    let tail = last_quarter(&out);
    let (mut inflow, mut outflow) = (0.0, 0.0);
    for r in tail {
        let (rho11, rho22) = (r.rho[(1, 1)].re, r.rho[(2, 2)].re);
        inflow += p.gamma12 * ((n_ph + 1.0) * rho11 - n_ph * rho22);
        outflow += p.big_gamma * rho22;
        assert!((r.photocell.as_ref().unwrap().electrical.current - p.big_gamma * rho22).abs() < 1e-15);
    }
    assert!(outflow > 0.0);
    assert!((inflow - outflow).abs() <= 0.02 * outflow, "in {inflow} out {outflow}");
}

#[test]
fn open_circuit_still_populates_the_acceptor() {
    let cfg = ScenarioConfig::preset("fig8b")
        .unwrap()
        .with_override("photocell.big-gamma", 0.0)
        .unwrap();
    let out = run(&cfg).unwrap();
    let tail = last_quarter(&out);
    let mean22 = tail.iter().map(|r| r.rho[(2, 2)].re).sum::<f64>() / tail.len() as f64;
    assert!(mean22 > 0.0);
    for r in &out.records {
        assert_eq!(r.photocell.as_ref().unwrap().electrical.current, 0.0);
    }
}

#[test]
fn efficiency_does_not_depend_on_step_size() {
    let coarse = fig8b();
    let mut cfg = ScenarioConfig::preset("fig8b").unwrap();
    cfg.integration.dt = 0.01;
    cfg.integration.record_every = 20;
    let fine = run(&cfg).unwrap();
    assert_eq!(coarse.records.len(), fine.records.len());
    let a = coarse.summary.final_efficiency.unwrap();
    let b = fine.summary.final_efficiency.unwrap();
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn voltage_follows_population_ratio() {
    let out = fig8b();
    let p = ScenarioConfig::preset("fig8b").unwrap().photocell;
    for r in last_quarter(&out) {
        let e = &r.photocell.as_ref().unwrap().electrical;
        let (rho22, rho33) = (r.rho[(2, 2)].re, r.rho[(3, 3)].re);
        let v = e.voltage.unwrap();
        let oracle = p.acceptor_gap + p.thermal_energy() * (rho22 / rho33).ln();
        assert!((v - oracle).abs() < 1e-12);
        let pout = e.output_power.unwrap();
        assert!((pout - e.current * v / p.donor_gap).abs() < 1e-15);
    }
}
