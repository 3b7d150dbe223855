use super::*;
use crate::pvbs::GeneratorCoeffs;
use crate::C64;

fn cfg(n: usize, g: f64, initial: InitialState, steps: usize, obs: &[Observable]) -> RunConfig {
    RunConfig {
        params: ModelParams::paper(g, n).unwrap(),
        initial,
        steps,
        observables: obs.to_vec(),
        shots: 0,
        noise: None,
        seed: 7,
    }
}

fn m_ratio(n: usize, steps: usize) -> f64 {
    let s = evolve(&cfg(n, 1.0, InitialState::Aqmbs { k: 1, phi: 0.0 }, steps, &[Observable::MTotal])).unwrap();
    let m = s.column("m_total").unwrap();
    m[steps] / m[0]
}

fn w_state(n: usize) -> StateVector {
    crate::scars::SingleExcitationState::normalized(vec![C64::new(1.0, 0.0); n])
        .unwrap()
        .to_state_vector()
        .unwrap()
}

#[test]
fn vacuum_is_a_fixed_point() {
    let mut c = cfg(8, 1.0, InitialState::Vacuum, 10, &[Observable::MTotal]);
    for gens in [
        (GeneratorCoeffs::paper_even(), GeneratorCoeffs::paper_odd()),
        (GeneratorCoeffs::new(0.3, -1.2, C64::new(0.4, 2.0)), GeneratorCoeffs::sigma_z()),
    ] {
        c.params.gen_even = gens.0;
        c.params.gen_odd = gens.1;
        let s = evolve(&c).unwrap();
        assert_eq!(s.t, (0..=10).collect::<Vec<_>>());
        assert!(s.column("m_total").unwrap().iter().all(|&m| m == 8.0));
    }
}

#[test]
fn all_ones_thermalises() {
    let s = evolve(&cfg(12, 1.0, InitialState::Ones, 10, &[Observable::MTotal])).unwrap();
    let m = s.column("m_total").unwrap();
    assert_eq!(m[0], -12.0);
    for &v in &m[5..] {
        assert!(v / 12.0 < 0.2, "{v}");
    }
}

#[test]
fn aqmbs_magnetisation_decays_slower_with_size() {
    assert!(m_ratio(16, 10) > m_ratio(8, 10));
}

#[test]
fn aqmbs_trends_over_sizes() {
    let ratios: Vec<f64> = [8, 12, 16, 20].iter().map(|&n| m_ratio(n, 10)).collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
    let fid: Vec<f64> = [8, 12, 16]
        .iter()
        .map(|&n| {
            let s = evolve(&cfg(n, 1.0, InitialState::Aqmbs { k: 1, phi: 0.0 }, 10, &[Observable::Fidelity])).unwrap();
            s.column("fidelity").unwrap()[10]
        })
        .collect();
    assert!(fid.windows(2).all(|w| w[1] > w[0]), "{fid:?}");
}

#[test]
fn norm_is_conserved_over_long_runs() {
    let c = cfg(10, 1.3, InitialState::Ones, 100, &[]);
    let (mut state, _) = initial_and_reference(&c).unwrap();
    let stepper = crate::pvbs::FloquetStepper::new(&c.params);
    for _ in 0..100 {
        stepper.step(&mut state).unwrap();
    }
    assert!((state.norm() - 1.0).abs() < 1e-10);
    let s = evolve(&cfg(8, 1.0, InitialState::Aqmbs { k: 2, phi: 0.4 }, 0, &[Observable::Fidelity])).unwrap();
    assert!((s.column("fidelity").unwrap()[0] - 1.0).abs() < 1e-12);
}

#[test]
fn scar_states_are_stationary() {
    let obs = [Observable::MTotal, Observable::Imbalance, Observable::HalfEntropy];
    for &g in &[2.0 / 3.0, 1.0, 1.5, 2.0, -1.0] {
        for gens in [
            (GeneratorCoeffs::paper_even(), GeneratorCoeffs::paper_odd()),
            (GeneratorCoeffs::new(1.1, 0.2, C64::new(-0.3, 0.9)), GeneratorCoeffs::new(-0.5, 0.0, C64::new(2.0, 0.0))),
        ] {
            for init in [InitialState::Vacuum, InitialState::Boundary] {
                let mut c = cfg(8, 1.0, init, 50, &obs);
                c.params = ModelParams::new(C64::new(g, 0.0), 8, gens.0, gens.1).unwrap();
                let s = evolve(&c).unwrap();
                for o in obs {
                    let col = s.column(o.name()).unwrap();
                    let drift = col.iter().map(|v| (v - col[0]).abs()).fold(0.0, f64::max);
                    assert!(drift < 1e-10, "g = {g}, {init:?}, {}: {drift}", o.name());
                }
            }
        }
    }
}

#[test]
fn profile_rows_and_localisation() {
    let c = cfg(14, 2.0, InitialState::LeftEdge, 10, &[]);
    let prof = site_resolved_profile(&c).unwrap();
    assert_eq!(prof.len(), 14);
    assert!(prof.iter().all(|row| row.len() == 11));
    assert_eq!(prof[0][0], -1.0);
    assert!(prof[1..].iter().all(|row| row[0] == 1.0));
    let weight = |p: &Vec<Vec<f64>>| (1.0 - p[0][10]) / 2.0;
    let w2 = weight(&prof);
    let w23 = weight(&site_resolved_profile(&cfg(14, 2.0 / 3.0, InitialState::LeftEdge, 10, &[])).unwrap());
    assert!(w2 > 0.5, "{w2}");
    assert!(w2 > w23);
}

#[test]
fn light_cone_from_left_edge() {
    let prof = site_resolved_profile(&cfg(14, 1.0, InitialState::LeftEdge, 6, &[])).unwrap();
    let front = |t: usize| (0..14).rev().find(|&n| (1.0 - prof[n][t]) / 2.0 > 0.05).unwrap();
    let fronts: Vec<usize> = (0..=6).map(front).collect();
    assert_eq!(fronts[0], 0);
    for t in 1..=6 {
        // one even and one odd layer per period: at most two sites per period
        assert!(fronts[t] <= 2 * t && fronts[t] >= fronts[t - 1], "{fronts:?}");
    }
    assert!(fronts[6] >= 6, "{fronts:?}");
}

#[test]
fn sampling_examples() {
    let vac = StateVector::basis(5, 0).unwrap();
    let counts = sample_measurements(&vac, 100, 1);
    assert_eq!(counts.len(), 1);
    assert_eq!(counts["00000"], 100);

    let counts = sample_measurements(&w_state(4), 100_000, 9);
    assert_eq!(counts.len(), 4);
    for key in ["1000", "0100", "0010", "0001"] {
        let f = counts[key] as f64 / 1e5;
        assert!((f - 0.25).abs() < 0.01, "{key}: {f}");
    }
    assert_eq!(sample_measurements(&w_state(4), 500, 3), sample_measurements(&w_state(4), 500, 3));
    assert_ne!(sample_measurements(&w_state(4), 500, 3), sample_measurements(&w_state(4), 500, 4));
    assert!(sample_measurements(&w_state(4), 0, 3).is_empty());
}

#[test]
fn estimators_converge_at_binomial_rate() {
    let exact = evolve(&cfg(8, 1.0, InitialState::Ones, 3, &[Observable::MTotal, Observable::MSites])).unwrap();
    let m_exact = exact.column("m_total").unwrap()[3];
    let mut errors = Vec::new();
    for shots in [100, 1_000, 10_000] {
        let mut c = cfg(8, 1.0, InitialState::Ones, 3, &[Observable::MTotal, Observable::MSites]);
        c.shots = shots;
        let s = evolve(&c).unwrap();
        let (m, se) = (s.column("m_total").unwrap()[3], s.stderr("m_total").unwrap()[3]);
        assert!((m - m_exact).abs() < 4.0 * se, "{shots}: {m} vs {m_exact} (se {se})");
        let sites = s.sites.as_ref().unwrap();
        let sites_se = s.sites_stderr.as_ref().unwrap();
        for q in 0..8 {
            let z = exact.sites.as_ref().unwrap()[3][q];
            assert!((sites[3][q] - z).abs() < 4.0 * sites_se[3][q] + 1e-12);
        }
        assert_eq!(s.counts.as_ref().unwrap()[3].values().sum::<u64>(), shots as u64);
        errors.push(se);
    }
    // standard error shrinks like 1/sqrt(shots)
    for w in errors.windows(2) {
        let r = w[0] / w[1];
        assert!((r - 10f64.sqrt()).abs() < 0.8, "{errors:?}");
    }
}

#[test]
fn shot_mode_is_deterministic_across_thread_counts() {
    let mut c = cfg(8, 1.5, InitialState::Aqmbs { k: 1, phi: 0.0 }, 5, &Observable::ALL);
    c.shots = 300;
    let a = evolve(&c).unwrap();
    assert_eq!(a, evolve(&c).unwrap());
    c.noise = Some(NoiseModel { p1: 1e-2, p2: 2e-2, p_spam: 1e-2 });
    let pool = |k| rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap();
    let one = pool(1).install(|| evolve(&c).unwrap());
    let eight = pool(8).install(|| evolve(&c).unwrap());
    assert_eq!(one.to_csv(), eight.to_csv());
    assert_eq!(one, eight);
    c.seed += 1;
    assert_ne!(one, evolve(&c).unwrap());
}

#[test]
fn zero_noise_matches_ideal() {
    let mut c = cfg(8, 1.0, InitialState::Ones, 6, &[Observable::MTotal, Observable::Fidelity]);
    let exact = evolve(&c).unwrap();
    c.shots = 4000;
    c.noise = Some(NoiseModel { p1: 0.0, p2: 0.0, p_spam: 0.0 });
    let noisy = evolve(&c).unwrap();
    for name in ["m_total", "fidelity"] {
        let (e, v, se) = (exact.column(name).unwrap(), noisy.column(name).unwrap(), noisy.stderr(name).unwrap());
        for t in 0..=6 {
            assert!((e[t] - v[t]).abs() <= 4.0 * se[t] + 1e-12, "{name} t = {t}: {} vs {}", e[t], v[t]);
        }
    }
}

#[test]
fn depolarizing_droop_from_vacuum() {
    let mut c = cfg(12, 1.0, InitialState::Vacuum, 10, &[Observable::MTotal]);
    c.shots = 4000;
    c.noise = Some(NoiseModel { p1: 0.0, p2: 2e-3, p_spam: 0.0 });
    let s = evolve(&c).unwrap();
    let m: Vec<f64> = s.column("m_total").unwrap().iter().map(|v| v / 12.0).collect();
    assert_eq!(m[0], 1.0);
    assert!(m.windows(2).all(|w| w[1] <= w[0]), "{m:?}");
    assert!(m[10] < 1.0);
}

#[test]
fn spam_only_shifts_initial_magnetisation() {
    let p = 0.01;
    let mut c = cfg(8, 1.0, InitialState::Vacuum, 0, &[Observable::MTotal]);
    c.shots = 20_000;
    c.noise = Some(NoiseModel { p1: 0.0, p2: 0.0, p_spam: p });
    let s = evolve(&c).unwrap();
    let (m, se) = (s.column("m_total").unwrap()[0], s.stderr("m_total").unwrap()[0]);
    assert!((m - 8.0 * (1.0 - 2.0 * p)).abs() < 4.0 * se, "{m} ± {se}");
    let q = spam_flip_probability(p);
    assert!((2.0 * q * (1.0 - q) - p).abs() < 1e-15);
}

#[test]
fn configuration_errors() {
    let mut c = cfg(8, 1.0, InitialState::Vacuum, 1, &[]);
    c.noise = Some(NoiseModel::DEVICE);
    assert!(matches!(evolve(&c), Err(DynamicsError::ExactWithNoise)));
    c.shots = 10;
    c.noise = Some(NoiseModel { p1: 1.5, p2: 0.0, p_spam: 0.0 });
    assert!(matches!(evolve(&c), Err(DynamicsError::BadProbability { name: "p1", .. })));
    assert!(matches!("m_tot".parse::<Observable>(), Err(DynamicsError::UnknownObservable(_))));
    assert_eq!("half_entropy".parse::<Observable>().unwrap(), Observable::HalfEntropy);
    c.params.n_qubits = 26;
    assert!(matches!(evolve(&c), Err(DynamicsError::SizeCap(26))));
    let mut c = cfg(10, 1.0, InitialState::Prepared { k: 1, phi: 0.0, fixture: true }, 1, &[]);
    assert!(evolve(&c).is_err());
    c.initial = InitialState::Prepared { k: 2, phi: 0.0, fixture: false };
    assert!(evolve(&c).is_ok());
}

#[test]
fn prepared_initial_states() {
    for fixture in [false, true] {
        let c = cfg(8, 1.0, InitialState::Prepared { k: 1, phi: 0.0, fixture }, 2, &[Observable::Fidelity]);
        let f0 = evolve(&c).unwrap().column("fidelity").unwrap()[0];
        assert!(f0 > if fixture { 0.999 } else { 1.0 - 1e-10 }, "{f0}");
    }
    let mut c = cfg(8, 1.0, InitialState::Prepared { k: 1, phi: 0.0, fixture: true }, 2, &[Observable::Fidelity]);
    c.shots = 50;
    c.noise = Some(NoiseModel::DEVICE);
    let s = evolve(&c).unwrap();
    assert!(s.column("fidelity").unwrap()[0] > 0.99);
}

#[test]
fn csv_layout_and_round_trip() {
    let mut c = cfg(6, 2.0 / 3.0, InitialState::LeftEdge, 4, &[Observable::MSites, Observable::Fidelity, Observable::MTotal]);
    let s = evolve(&c).unwrap();
    let header = s.csv_header();
    assert_eq!(&header[..3], ["t", "m_total", "fidelity"]);
    assert_eq!(header[3..].to_vec(), (0..6).map(|n| format!("z_{n}")).collect::<Vec<_>>());
    let table = parse_csv(&s.to_csv()).unwrap();
    assert_eq!(table.rows.len(), 5);
    assert_eq!(table.column("m_total").unwrap(), s.column("m_total").unwrap());
    assert_eq!(table.column("z_3").unwrap(), (0..5).map(|t| s.sites.as_ref().unwrap()[t][3]).collect::<Vec<_>>());

    c.shots = 20;
    let s = evolve(&c).unwrap();
    let header = s.csv_header();
    assert_eq!(&header[..5], ["t", "m_total", "m_total_se", "fidelity", "fidelity_se"]);
    assert_eq!(header.len(), 5 + 12);
    assert!(parse_csv(&s.to_csv()).is_ok());
    let json = s.to_json();
    assert_eq!(serde_json::from_value::<TimeSeries>(json).unwrap(), s);

    assert_eq!(csv_file_name("run", 12, C64::new(1.0, 0.0)), "run_12_1.csv");
    assert_eq!(csv_file_name("r", 8, C64::new(0.5, -0.25)), "r_8_0.5-0.25i.csv");
    assert!(parse_csv("t,a\n0,1,2\n").is_err());
}

#[test]
fn gate_counts_follow_the_compiled_templates() {
    let g = C64::new(1.0, 0.0);
    assert_eq!(gate_noise_counts(g, &GeneratorCoeffs::paper_even()).unwrap().zz, 2);
    assert!(gate_noise_counts(g, &GeneratorCoeffs::new(0.4, 0.1, C64::new(1.0, 1.0))).unwrap().zz <= 3);
}
