use super::*;
use crate::pvbs::{preset, reference_hamiltonian, GeneratorCoeffs};
use crate::scars::{aqmbs_energy, aqmbs_state, boundary_state, product_vacuum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{LN_2, PI};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn preset_params(name: &str, g: f64, n: usize) -> ModelParams {
    let (e, o) = preset(name).unwrap();
    ModelParams::new(c(g, 0.0), n, e, o).unwrap()
}

fn random_coeffs(rng: &mut ChaCha8Rng) -> GeneratorCoeffs {
    GeneratorCoeffs::new(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
    )
}

#[test]
fn floquet_fixed_points_at_zero_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = ModelParams::new(c(2.0, 0.0), 4, random_coeffs(&mut rng), random_coeffs(&mut rng)).unwrap();
    let sp = floquet_spectrum(&p).unwrap();
    assert_eq!(sp.len(), 16);
    assert!(sp.values().iter().filter(|v| v.abs() < 1e-10).count() >= 2);
    assert!(sp.values().iter().all(|v| *v > -PI && *v <= PI));

    let z = GeneratorCoeffs::ZERO;
    let sp = floquet_spectrum(&ModelParams::new(c(1.3, 0.0), 6, z, z).unwrap()).unwrap();
    assert!(sp.values().iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn degenerate_family_has_zero_cluster() {
    let sp = resolved_spectrum(&preset_params("smF-deg", 1.0, 8), SpectrumKind::Floquet).unwrap();
    assert!(sp.zero_levels().len() >= 2);
}

#[test]
fn size_cap_enforced() {
    let p = ModelParams::paper(1.0, 14).unwrap();
    assert!(matches!(floquet_spectrum(&p), Err(SpectraError::SizeCap { n: 14, cap: 12 })));
    assert!(matches!(zero_mode_count(&p, 1e-10), Err(SpectraError::SizeCap { .. })));
}

#[test]
fn resolved_matches_full_and_labels_agree() {
    let n = 8;
    let p = preset_params("smF-nodeg", 1.0, n);
    let resolved = resolved_spectrum(&p, SpectrumKind::Floquet).unwrap();
    let mut full = floquet_spectrum(&p).unwrap();
    symmetry_resolve(&mut full, p.g).unwrap();

    // completeness, and the explicit orbit count (2^N + 2^{N/2}) / 2 for the even sector
    let (e, o, none) = resolved.sector_dims();
    assert_eq!((e + o, none), (1 << n, 0));
    assert_eq!(e, ((1 << n) + (1 << (n / 2))) / 2);
    assert_eq!(full.sector_dims(), resolved.sector_dims());

    let sorted = |sp: &Spectrum, s: Sector| {
        let mut v: Vec<f64> = sp.records.iter().filter(|r| r.sector == s).map(|r| r.value).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    for s in [Sector::Even, Sector::Odd] {
        let (a, b) = (sorted(&resolved, s), sorted(&full, s));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
    }

    // eigenpairs of the resolved route are genuine
    let u = floquet_unitary(&p).unwrap();
    for j in (0..resolved.len()).step_by(17) {
        let v = resolved.eigenvector(j);
        let uv = u.apply(&v);
        let e = C64::from_polar(1.0, resolved.records[j].value);
        let res: f64 = uv.iter().zip(&v).map(|(a, b)| (a - e * b).norm_sqr()).sum::<f64>().sqrt();
        assert!(res < 1e-9);
    }
}

#[test]
fn scar_sector_labels() {
    // vacuum is even under Pi R, the W state odd
    let n = 8;
    let op = SymmetryOp::ParityReflection;
    let v = product_vacuum(n).unwrap();
    assert_eq!(op.apply(v.amplitudes(), n), v.amplitudes().to_vec());
    let w = boundary_state(c(1.0, 0.0), n).unwrap().to_state_vector().unwrap();
    let sw = op.apply(w.amplitudes(), n);
    assert!(sw.iter().zip(w.amplitudes()).all(|(a, b)| (a + b).norm() < 1e-15));

    let mut sp = resolved_spectrum(&preset_params("smF-nodeg", 1.0, n), SpectrumKind::Floquet).unwrap();
    sp.split_degenerate_by_magnetization().unwrap();
    for j in sp.zero_levels() {
        let vec = sp.eigenvector(j);
        let ov_v: f64 = vec[0].norm();
        let ov_w: f64 = vec.iter().zip(w.amplitudes()).map(|(a, b)| a.conj() * b).sum::<C64>().norm();
        if ov_v > 0.999 {
            assert_eq!(sp.records[j].sector, Sector::Even);
        }
        if ov_w > 0.999 {
            assert_eq!(sp.records[j].sector, Sector::Odd);
        }
    }
}

#[test]
fn symmetry_resolve_requires_symmetric_point() {
    let p = preset_params("smF-nodeg", 1.5, 4);
    let mut sp = floquet_spectrum(&p).unwrap();
    assert!(matches!(symmetry_resolve(&mut sp, p.g), Err(SpectraError::NoSymmetry(_))));
    assert!(matches!(
        resolved_spectrum(&p, SpectrumKind::Floquet),
        Err(SpectraError::NoSymmetry(_))
    ));
}

#[test]
fn reflection_at_minus_one() {
    let p = preset_params("smF-nodeg", -1.0, 6);
    let mut full = floquet_spectrum(&p).unwrap();
    symmetry_resolve(&mut full, p.g).unwrap();
    let resolved = resolved_spectrum(&p, SpectrumKind::Floquet).unwrap();
    assert_eq!(full.sector_dims(), resolved.sector_dims());
}

#[test]
fn poisson_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let st = level_stats_from_values(&poisson_levels(4000, &mut rng), false).unwrap();
    assert!((st.mean_r - R_POISSON).abs() < 0.02, "{}", st.mean_r);
}

#[test]
fn cue_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let st = level_stats_from_values(&cue_phases(2000, &mut rng).unwrap(), true).unwrap();
    assert!((st.mean_r - R_GUE).abs() < 0.02, "{}", st.mean_r);
    let h = &st.histogram;
    let integral: f64 = h.densities.iter().zip(h.edges.windows(2)).map(|(d, e)| d * (e[1] - e[0])).sum();
    assert!((integral - 1.0).abs() < 1e-6);
    assert!(st.mean_r >= 0.0 && st.mean_r <= 1.0);
}

#[test]
fn stats_exclusions_and_errors() {
    let mut v: Vec<f64> = (1..=300).map(|k| k as f64 * 0.01 - 1.505).collect();
    assert!(matches!(
        level_stats_from_values(&v[..100], false),
        Err(SpectraError::TooFewLevels { got: 100, need: MIN_LEVELS })
    ));
    let clean = level_stats_from_values(&v, false).unwrap();
    assert_eq!(clean.excluded, 0);
    // an evenly spaced ladder has r = 1
    assert!((clean.mean_r - 1.0).abs() < 1e-9);
    v.extend([0.0, 1e-12, -1e-12]);
    let st = level_stats_from_values(&v, false).unwrap();
    assert_eq!((st.excluded, st.n_levels), (3, 300));
    // a lone zero is a level like any other
    v.truncate(301);
    assert_eq!(level_stats_from_values(&v, false).unwrap().excluded, 0);
    assert_eq!(mean_r(&[1.0, 2.0, 1.0]), 0.5);
}

#[test]
fn entanglement_outliers_small_chain() {
    let n = 8;
    let mut sp = resolved_spectrum(&preset_params("smF-deg", 1.0, n), SpectrumKind::Floquet).unwrap();
    sp.split_degenerate_by_magnetization().unwrap();
    entanglement_scan(&mut sp).unwrap();
    let zs: Vec<f64> = sp.zero_levels().iter().map(|&j| sp.records[j].entanglement.unwrap()).collect();
    assert!(zs.iter().any(|s| s.abs() < 1e-10));
    assert!(zs.iter().any(|s| (s - LN_2).abs() < 1e-10));
    let cap = (n / 2) as f64 * LN_2 + 1e-9;
    assert!(sp.records.iter().all(|r| {
        let s = r.entanglement.unwrap();
        (-1e-12..=cap).contains(&s)
    }));
    assert!(bulk_median_entropy(&sp).unwrap() > 1.0);
    assert!((page_entropy(12) - (12.0 * LN_2 - 1.0) / 2.0).abs() < 1e-15);
}

#[test]
fn zero_mode_counts() {
    assert_eq!(zero_mode_count(&preset_params("smH-zero", 1.0, 8), DEFAULT_ZERO_TOL).unwrap(), 16);
    assert_eq!(zero_mode_count(&preset_params("smH-zero", 1.0, 10), DEFAULT_ZERO_TOL).unwrap(), 32);
    // adding a sigma_z component lifts the degeneracy down to the two exact scars
    let (_, o) = preset("smH-zero").unwrap();
    let p = ModelParams::new(c(1.0, 0.0), 8, GeneratorCoeffs::from_sigma(1.0, 2.0, 1.0), o).unwrap();
    assert_eq!(zero_mode_count(&p, DEFAULT_ZERO_TOL).unwrap(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let p = ModelParams::new(c(1.5, 0.3), 8, random_coeffs(&mut rng), random_coeffs(&mut rng)).unwrap();
    assert_eq!(zero_mode_count(&p, DEFAULT_ZERO_TOL).unwrap(), 2);
    assert!(zero_mode_count(&p, 0.0).is_err());
}

#[test]
fn sector_eigenvalues_match_full() {
    let p = preset_params("smH-zero", 1.0, 8);
    let a = hamiltonian_eigenvalues(&p).unwrap();
    let b = eigvals_hermitian(&hamiltonian(&p).unwrap()).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));
    let hs = resolved_spectrum(&p, SpectrumKind::Hamiltonian).unwrap();
    let mut v = hs.values();
    v.sort_by(f64::total_cmp);
    assert!(v.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));
}

#[test]
fn tight_binding_critical_spectrum() {
    for n in [8, 64, 1000] {
        let tb = TightBinding::new(C64::from_polar(1.0, 0.4), n).unwrap();
        for k in 0..4 {
            assert!((tb.eigenvalue(k) - aqmbs_energy(k, n)).abs() < 1e-10);
        }
    }
    let vals = single_excitation_spectrum(c(1.0, 0.0), 8).unwrap();
    for (k, v) in vals.iter().enumerate() {
        assert!((v - (1.0 - (k as f64 * PI / 8.0).cos())).abs() < 1e-10);
    }
    assert!((vals[1] - 0.076_120_467_488_713_2).abs() < 1e-10);
}

#[test]
fn tight_binding_ground_state_is_boundary_state() {
    for g in [c(0.3, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(-0.7, 1.2), C64::from_polar(1.0, 2.0)] {
        for n in [4, 9, 50] {
            let tb = TightBinding::new(g, n).unwrap();
            let b = boundary_state(g, n).unwrap();
            let hb = tb.apply(b.amplitudes());
            assert!(hb.iter().all(|x| x.norm() < 1e-14));
            assert!(tb.eigenvalue(0).abs() < 1e-12);
            let (_, vecs) = tb.lowest(1).unwrap();
            assert!(vecs[0].inner(&b).norm() > 1.0 - 1e-10);
        }
    }
}

#[test]
fn tight_binding_first_excitation_is_aqmbs() {
    for phi in [0.0, 1.1] {
        for n in [8, 40, 500] {
            let (_, vecs) = single_excitation_solver(C64::from_polar(1.0, phi), n, 2).unwrap();
            let a1 = aqmbs_state(1, phi, n).unwrap();
            assert!(vecs[1].inner(&a1).norm() > 1.0 - 1e-10);
        }
    }
}

#[test]
fn tight_binding_is_a_block_of_the_reference_model() {
    for n in [4, 6, 8, 10] {
        for g in [c(0.6, 0.0), c(1.0, 0.0), c(1.4, -0.5)] {
            let z = GeneratorCoeffs::ZERO;
            let full = eigvals_hermitian(&reference_hamiltonian(&ModelParams::new(g, n, z, z).unwrap()).unwrap()).unwrap();
            let tb = TightBinding::new(g, n).unwrap();
            // dense cross-check of the chain itself
            let dense = eigvals_hermitian(&tb.dense()).unwrap();
            for e in tb.eigenvalues() {
                assert!(full.iter().any(|f| (f - e).abs() < 1e-10));
                assert!(dense.iter().any(|f| (f - e).abs() < 1e-12));
            }
            // embedding: H_+ restricted to one excitation equals the chain
            let vec0 = tb.lowest(3).unwrap().1;
            let p = ModelParams::new(g, n, z, z).unwrap();
            for v in vec0 {
                let sv = v.to_state_vector().unwrap();
                let lhs = crate::pvbs::apply_reference_hamiltonian(&p, &sv).unwrap();
                let rhs = crate::scars::SingleExcitationState::normalized(tb.apply(v.amplitudes()));
                if let Ok(r) = rhs {
                    let scale: f64 = tb.apply(v.amplitudes()).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                    let full_rhs = r.to_state_vector().unwrap();
                    assert!(lhs.iter().zip(full_rhs.amplitudes()).all(|(a, b)| (a - b * scale).norm() < 1e-12));
                }
            }
        }
    }
}

#[test]
fn gap_curve_properties() {
    let d = gap_curve(&[1.0], 16).unwrap()[0].1;
    assert!((d - (1.0 - (PI / 16.0).cos())).abs() < 1e-12);
    assert!((d - 0.019_214_719).abs() < 1e-9);
    for g in [0.3, 0.8, 1.7, 3.5] {
        let a = gap_curve(&[g, 1.0 / g], 20).unwrap();
        assert!((a[0].1 - a[1].1).abs() < 1e-10);
    }
    let grid: Vec<f64> = (0..64).map(|k| 0.25 + 3.75 * k as f64 / 63.0).collect();
    let curve = gap_curve(&grid, 256).unwrap();
    let argmin = curve.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
    let nearest = *grid.iter().min_by(|a, b| (*a - 1.0).abs().total_cmp(&(*b - 1.0).abs())).unwrap();
    assert_eq!(argmin, nearest);
    let mut prev = f64::INFINITY;
    for n in [8, 16, 32, 64] {
        let d = gap_curve(&[1.0], n).unwrap()[0].1;
        assert!(d < prev);
        prev = d;
    }
    assert!(gap_curve(&[-1.0], 8).is_err());
}

#[test]
fn frustration_free_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let p = ModelParams::new(c(2.0, 0.0), 10, random_coeffs(&mut rng), random_coeffs(&mut rng)).unwrap();
    let v = product_vacuum(10).unwrap();
    let b = boundary_state(c(2.0, 0.0), 10).unwrap().to_state_vector().unwrap();
    for mode in [ResidualMode::Hamiltonian, ResidualMode::Circuit] {
        assert!(verify_frustration_free(&p, &v, mode).unwrap() < 1e-12);
        assert!(verify_frustration_free(&p, &b, mode).unwrap() < 1e-12);
    }
    let paper = ModelParams::paper(1.0, 8).unwrap();
    let r = verify_aqmbs_scaling(&paper, 1, &[8, 12, 16, 20], ResidualMode::Circuit).unwrap();
    assert_eq!(r.len(), 4);
    match verify_aqmbs_scaling(&paper, 1, &[12, 8], ResidualMode::Hamiltonian) {
        Err(SpectraError::NonMonotone { sizes, residuals }) => {
            assert_eq!(sizes, vec![12, 8]);
            assert!(residuals[1] > residuals[0]);
        }
        other => panic!("{other:?}"),
    }
}
