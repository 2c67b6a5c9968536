use std::f64::consts::PI;

use faer::Mat;
use localdiss::linalg::{c, eigenvalues, hermitian_eigenvalues, hermiticity_defect, identity_defect, max_abs_diff, CMat, I};
use localdiss::{
    build_chain, build_hofstadter, build_ring_flux, diagonalize_coupled, dynamical_matrix,
    evolve::evolve_rk4_modes, exact_dynamical_spectrum, intermediate_correlations, ring_analytics,
    site_dynamical_matrix, steady_state, to_site_basis, Basis, BathSpec, DynamicalSpectrum, EigenSystem,
    ExactPropagator, GaussianState, LatticeModel, Rk4Options, C64,
};
use proptest::prelude::*;

fn spectrum(es: &EigenSystem, gamma: f64) -> DynamicalSpectrum {
    exact_dynamical_spectrum(&dynamical_matrix(es, gamma).unwrap(), es, gamma).unwrap()
}

fn sorted_by_re(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn any_model() -> impl Strategy<Value = LatticeModel> {
    prop_oneof![
        (2usize..12, prop::collection::vec(-2.0f64..2.0, 12), 0usize..12).prop_map(|(n, pot, d)| {
            build_chain(n, 1.0, &pot[..n]).unwrap().with_drain(d % n).unwrap()
        }),
        (3usize..14, 0.0f64..PI, 0usize..14)
            .prop_map(|(n, flux, d)| build_ring_flux(n, 1.0, flux).unwrap().with_drain(d % n).unwrap()),
        (1usize..5, 1usize..5, 0.0f64..PI).prop_map(|(nx, ny, flux)| build_hofstadter(nx, ny, 1.0, flux).unwrap()),
    ]
}

fn decaying_chain() -> impl Strategy<Value = LatticeModel> {
    // end drain on a chain with mild disorder: every mode touches the drain
    (3usize..10, prop::collection::vec(-0.5f64..0.5, 10)).prop_map(|(n, pot)| build_chain(n, 1.0, &pot[..n]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn builders_are_hermitian(model in any_model()) {
        prop_assert!(hermiticity_defect(model.hamiltonian.as_ref()) <= 1e-12);
        prop_assert!(model.drain < model.n_sites);
    }

    #[test]
    fn hofstadter_gauge_invariance(nx in 1usize..6, ny in 1usize..6, flux in 0.0f64..PI,
                                   phases in prop::collection::vec(0.0f64..2.0 * PI, 36)) {
        let model = build_hofstadter(nx, ny, 1.0, flux).unwrap();
        let n = model.n_sites;
        let d: Vec<C64> = phases[..n].iter().map(|&p| C64::from_polar(1.0, p)).collect();
        let h = &model.hamiltonian;
        let gauged: CMat = Mat::from_fn(n, n, |a, b| d[a] * h[(a, b)] * d[b].conj());
        let s1 = hermitian_eigenvalues(h.as_ref()).unwrap();
        let s2 = hermitian_eigenvalues(gauged.as_ref()).unwrap();
        for (x, y) in s1.iter().zip(&s2) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_flux_ring_cosine_band(n in 3usize..40, j in 0.2f64..3.0) {
        let s = hermitian_eigenvalues(build_ring_flux(n, j, 0.0).unwrap().hamiltonian.as_ref()).unwrap();
        let mut expect: Vec<f64> = (0..n).map(|k| -2.0 * j * (2.0 * PI * k as f64 / n as f64).cos()).collect();
        expect.sort_by(f64::total_cmp);
        for (x, y) in s.iter().zip(&expect) {
            prop_assert!((x - y).abs() < 1e-10 * j.max(1.0));
        }
    }

    #[test]
    fn eigensystem_invariants(model in any_model()) {
        let es = diagonalize_coupled(&model).unwrap();
        prop_assert!(es.energies.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(es.weight.iter().all(|&w| w > 1e-12));
        prop_assert!((es.total_drain_weight() - 1.0).abs() < 1e-10);
        let g = es.wavefunctions.adjoint() * &es.wavefunctions;
        prop_assert!(identity_defect(g.as_ref()) < 1e-10);
        let h = es.reconstruct_hamiltonian();
        prop_assert!(max_abs_diff(h.as_ref(), model.hamiltonian.as_ref()) < 1e-9);
        prop_assert_eq!(es.n_modes() + es.n_dropped(), model.n_sites);
    }

    #[test]
    fn spectrum_invariants(model in any_model(), gamma in 0.01f64..10.0) {
        let es = diagonalize_coupled(&model).unwrap();
        let ds = spectrum(&es, gamma);
        let m = es.n_modes();
        // passivity
        prop_assert!(ds.lambdas.iter().all(|l| l.im <= 1e-10));
        // trace sum rule
        let sum: C64 = ds.lambdas.iter().sum();
        let w: f64 = es.weight.iter().sum();
        prop_assert!((sum - C64::new(es.energies.iter().sum(), -gamma / 2.0 * w)).norm() < 1e-9 * m as f64);
        // same operator in the site basis
        let site = site_dynamical_matrix(&model.hamiltonian, model.drain, gamma).unwrap();
        let site_vals = sorted_by_re(eigenvalues(site.as_ref()).unwrap());
        let mut mode_vals: Vec<C64> = ds.lambdas.clone();
        mode_vals.extend(es.dropped_energies.iter().map(|&e| c(e)));
        let mode_vals = sorted_by_re(mode_vals);
        for l in &mode_vals {
            let nearest = site_vals.iter().map(|s| (s - l).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest < 1e-9, "eigenvalue {} missing from site route", l);
        }
    }

    #[test]
    fn commutator_of_dynamical_modes(model in decaying_chain(), gamma in 0.1f64..6.0) {
        let es = diagonalize_coupled(&model).unwrap();
        let ds = spectrum(&es, gamma);
        let v = &ds.vectors.as_ref().unwrap().left;
        let vv = v * v.adjoint();
        let m = es.n_modes();
        let expect = Mat::from_fn(m, m, |i, j| I / (ds.lambdas[j].conj() - ds.lambdas[i]));
        let scale = localdiss::linalg::max_abs(expect.as_ref());
        prop_assert!(max_abs_diff(vv.as_ref(), expect.as_ref()) < 1e-8 * scale.max(1.0));
    }

    #[test]
    fn zeno_monotonicity(model in decaying_chain()) {
        let es = diagonalize_coupled(&model).unwrap();
        let onset = (0..es.n_modes()).map(|i| 3.0 * es.spacing[i] / es.weight[i]).fold(0.0, f64::max) * 1.01;
        let lo = spectrum(&es, onset);
        let hi = spectrum(&es, 2.0 * onset);
        let fastest = (0..es.n_modes()).max_by(|&a, &b| hi.rates[a].total_cmp(&hi.rates[b])).unwrap();
        for i in (0..es.n_modes()).filter(|&i| i != fastest) {
            prop_assert!(hi.rates[i] < lo.rates[i], "mode {} rate {} -> {}", i, lo.rates[i], hi.rates[i]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn exact_matches_oracle(model in decaying_chain(), gamma in 0.3f64..3.0, nbar in 0.0f64..2.0) {
        let es = diagonalize_coupled(&model).unwrap();
        let bath = BathSpec::pure_squeezing(nbar, gamma).unwrap();
        let ds = spectrum(&es, gamma);
        let vac = GaussianState::vacuum(es.n_modes(), Basis::Eigenmode);
        let prop = ExactPropagator::new(&ds, &bath, &vac).unwrap();
        for t in [1.0, 10.0, 50.0] {
            let oracle = evolve_rk4_modes(&es, &bath, &vac, t, &Rk4Options::default()).unwrap();
            prop_assert!(prop.state_at(t).unwrap().distance(&oracle) < 1e-6);
        }
    }

    #[test]
    fn trajectories_stay_physical(model in any_model(), gamma in 0.1f64..4.0, nbar in 0.0f64..2.0, phase in 0.0f64..2.0 * PI) {
        let es = diagonalize_coupled(&model).unwrap();
        let m = C64::from_polar((nbar * (nbar + 1.0)).sqrt(), phase);
        let bath = BathSpec::new(nbar, m, gamma).unwrap();
        let ds = spectrum(&es, gamma);
        let prop = ExactPropagator::new(&ds, &bath, &GaussianState::vacuum(es.n_modes(), Basis::Eigenmode)).unwrap();
        for k in 0..20 {
            let s = prop.state_at(2.0 * k as f64).unwrap();
            prop_assert!(s.gram_min_eigenvalue().unwrap() >= -1e-8);
            prop_assert!(s.hermiticity_defect() < 1e-10);
            prop_assert!(s.symmetry_defect() < 1e-10);
            let site = to_site_basis(&s, &es).unwrap();
            prop_assert!(site.hermiticity_defect() < 1e-10 && site.symmetry_defect() < 1e-10);
            if es.n_dropped() == 0 {
                prop_assert!((site.particle_number() - s.particle_number()).abs() < 1e-10 * s.particle_number().max(1.0));
            }
        }
    }
}

#[test]
fn steady_state_and_intermediate_blocks_are_symmetric() {
    let es = diagonalize_coupled(&build_chain(9, 1.0, &[]).unwrap()).unwrap();
    let bath = BathSpec::pure_squeezing(1.0, 1.5).unwrap();
    let ss = steady_state(&spectrum(&es, 1.5), &bath).unwrap();
    assert!(ss.hermiticity_defect() < 1e-10 && ss.symmetry_defect() < 1e-10);
    assert!(ss.gram_min_eigenvalue().unwrap() >= -1e-8);
    let mid = intermediate_correlations(&es, &bath, 1.0, 4.0).unwrap();
    assert!(mid.hermiticity_defect() < 1e-10 && mid.symmetry_defect() < 1e-10);
}

#[test]
fn convergence_to_steady_state_rate() {
    for model in [build_chain(6, 1.0, &[]).unwrap(), build_ring_flux(10, 1.0, PI / 2.0).unwrap()] {
        let es = diagonalize_coupled(&model).unwrap();
        let bath = BathSpec::pure_squeezing(1.0, 1.0).unwrap();
        let ds = spectrum(&es, 1.0);
        let ss = steady_state(&ds, &bath).unwrap();
        let prop = ExactPropagator::new(&ds, &bath, &GaussianState::vacuum(es.n_modes(), Basis::Eigenmode)).unwrap();
        let g = ds.min_rate();
        let times: Vec<f64> = (0..40).map(|k| (4.0 + 8.0 * k as f64 / 39.0) / g).collect();
        let logs: Vec<f64> = times.iter().map(|&t| prop.state_at(t).unwrap().distance(&ss).ln()).collect();
        let (slope, _) = localdiss::fit_front_speed(&times, &logs).unwrap();
        assert!((-slope - g).abs() < 0.2 * g, "{}: fitted {} vs min rate {}", model.label, -slope, g);
    }
}

#[test]
fn four_stage_correlation_growth() {
    let n = 400;
    let es = diagonalize_coupled(&build_ring_flux(n, 1.0, PI / 2.0).unwrap()).unwrap();
    let bath = BathSpec::pure_squeezing(1.0, 1.0).unwrap();
    let ds = spectrum(&es, 1.0);
    let prop = ExactPropagator::new(&ds, &bath, &GaussianState::vacuum(n, Basis::Eigenmode)).unwrap();
    for (i, j) in [(200, 206), (200, 210)] {
        let de = es.energies[j] - es.energies[i];
        let corr = |t: f64| prop.normal_entry(t, i, j);

        // linear stage
        let early: Vec<f64> = (0..20).map(|k| 1.0 + (0.3 / de.abs() - 1.0) * k as f64 / 19.0).collect();
        let slopes: Vec<f64> = early.iter().map(|&t| corr(t).norm() / t).collect();
        let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
        assert!(slopes.iter().all(|s| (s / mean - 1.0).abs() < 0.1), "pair ({i},{j}) not linear: {slopes:?}");

        // plateau: constant plus a term rotating at the energy difference
        let late: Vec<f64> = (0..200).map(|k| 3.0 / de.abs() + (0.3 * n as f64 - 3.0 / de.abs()) * k as f64 / 199.0).collect();
        let values: Vec<C64> = late.iter().map(|&t| corr(t)).collect();
        let rot: Vec<C64> = late.iter().map(|&t| (-I * de * t).exp()).collect();
        let (plateau, swing) = fit_constant_plus(&values, &rot);
        let resid = values.iter().zip(&rot).map(|(v, r)| (v - plateau - swing * r).norm()).fold(0.0, f64::max);
        assert!(resid < 0.05 * plateau.norm(), "pair ({i},{j}) residual {resid}");
        let saturation = mean / de.abs();
        assert!((plateau.norm() / saturation - 1.0).abs() < 0.1, "pair ({i},{j}) plateau {} vs {saturation}", plateau.norm());
    }
}

/// Least squares for `v ≈ a + b·r`.
fn fit_constant_plus(v: &[C64], r: &[C64]) -> (C64, C64) {
    let n = c(v.len() as f64);
    let sr: C64 = r.iter().sum();
    let srr: C64 = r.iter().map(|x| x.norm_sqr()).sum::<f64>().into();
    let sv: C64 = v.iter().sum();
    let srv: C64 = r.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
    // [[n, sr], [sr*, srr]] [a, b] = [sv, srv]
    let det = n * srr - sr * sr.conj();
    let a = (srr * sv - sr * srv) / det;
    let b = (n * srv - sr.conj() * sv) / det;
    (a, b)
}

#[test]
fn ring_rates_converge_with_size() {
    let mut errors = Vec::new();
    for n in [100, 200, 400] {
        let es = diagonalize_coupled(&build_ring_flux(n, 1.0, PI / 2.0).unwrap()).unwrap();
        let ds = spectrum(&es, 1.0);
        let ra = ring_analytics(n, 1.0, 1.0).unwrap();
        let k_c = ra.k_c.unwrap();
        let worst = ra
            .momenta()
            .iter()
            .enumerate()
            .filter(|(_, k)| (k.abs() - k_c).abs() > 0.2)
            .map(|(i, _)| (ds.rates[i] - ra.gamma_of_mode[i]).abs() / ra.gamma_of_mode[i])
            .fold(0.0, f64::max);
        errors.push(worst);
    }
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}
