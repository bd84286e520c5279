use num_complex::Complex;
use proptest::prelude::*;
use qbounds_core::models::{GaussianPrior, PhaseModel, Prior};
use qbounds_core::operator::{eig_hermitian, real_trace_form, GeneralOperator, HermitianOperator, SUPPORT_TOL};
use qbounds_core::phase_bounds::{mmse_gaussian, qcrb_bayes, qfi, qwwb_phase};
use qbounds_core::validation::{random_density, random_hermitian};
use qbounds_core::ww::solve_l_hermitian;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn zero() -> Complex<f64> {
    Complex::new(0.0, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), dim in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(&mut rng, dim);
        let back = eig_hermitian(&a).reconstruct();
        let diff = back.checked_sub(a.as_general()).unwrap();
        prop_assert!(diff.max_abs() < 1e-12);
    }

    /// Adding `i N` with `N` commuting with rho, or anything supported on the
    /// kernel of rho, never lowers `tr(L^H L rho)`.
    #[test]
    fn hermitian_score_is_minimal(seed in any::<u64>(), dim in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rank = rng.gen_range(1..=dim);
        let rho = random_density(&mut rng, dim, rank);
        let eig = eig_hermitian(&rho);
        let support = eig.support_mask(SUPPORT_TOL);
        let u = &eig.eigenvectors;
        let raw = random_hermitian(&mut rng, dim).as_general().in_basis(u).unwrap();
        let d_eig = GeneralOperator::from_fn(dim, |a, b| if support[a] || support[b] { raw.get(a, b) } else { zero() });
        let d = HermitianOperator::symmetrized(&(&(u * &d_eig) * &u.adjoint()));
        let tilde = solve_l_hermitian(&rho, &d).unwrap().op;

        let n_diag: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let n = &(u * &GeneralOperator::diagonal(&n_diag)) * &u.adjoint();
        let kernel = GeneralOperator::from_fn(dim, |a, b| {
            if a == b && !support[a] { Complex::new(1.0, 0.0) } else { zero() }
        });
        let kernel = &(u * &kernel) * &u.adjoint();
        let b = GeneralOperator::from_fn(dim, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let other = &(&tilde + &n.scale_complex(Complex::new(0.0, 1.0))) + &(&b * &kernel);

        let base = real_trace_form(&tilde, &tilde, &rho).unwrap();
        let alt = real_trace_form(&other, &other, &rho).unwrap();
        prop_assert!(alt >= base - 1e-10, "{alt} < {base}");
    }

    #[test]
    fn pure_state_qfi_is_four_variances(seed in any::<u64>(), dim in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: Vec<Complex<f64>> = (0..dim).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let psi: Vec<Complex<f64>> = psi.iter().map(|c| c / norm).collect();
        let h = random_hermitian(&mut rng, dim);
        let hpsi = h.as_general().apply(&psi).unwrap();
        let mean: f64 = psi.iter().zip(&hpsi).map(|(a, b)| (a.conj() * b).re).sum();
        let second: f64 = hpsi.iter().map(|c| c.norm_sqr()).sum();
        let f = qfi(&HermitianOperator::projector(&psi), &h).unwrap();
        prop_assert!((f - 4.0 * (second - mean * mean)).abs() < 1e-9 * (1.0 + f));
    }

    /// Every bound sits below the attainable error and above the Bayesian QCRB's h -> 0 value.
    #[test]
    fn qubit_qwwb_is_a_valid_bound(energy in 0.5f64..200.0, sigma in 0.05f64..1.0, hs in 0.01f64..10.0, s in 0.05f64..0.95) {
        let model = PhaseModel::qubit(energy, 1).unwrap();
        let gauss = GaussianPrior::centered(sigma).unwrap();
        let prior = Prior::Gaussian(gauss);
        let mmse = mmse_gaussian(&model, &gauss).unwrap();
        match qwwb_phase(&model, &prior, s, hs * sigma) {
            Ok(w) => prop_assert!(w <= mmse * (1.0 + 1e-9) + 1e-15, "qwwb {w} > mmse {mmse}"),
            Err(qbounds_core::BoundsError::DegenerateTestPoint(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
        prop_assert!(qcrb_bayes(&model, &gauss) <= mmse * (1.0 + 1e-12));
    }

    /// The bounds depend on the prior only through its width.
    #[test]
    fn prior_mean_is_irrelevant(mean in -5.0f64..5.0, hs in 0.1f64..5.0) {
        let model = PhaseModel::bosonic(0.1, 10, 3).unwrap();
        let centered = Prior::Gaussian(GaussianPrior::centered(0.5).unwrap());
        let shifted = Prior::Gaussian(GaussianPrior::new(mean, 0.5).unwrap());
        let a = qwwb_phase(&model, &centered, 0.5, hs * 0.5).unwrap();
        let b = qwwb_phase(&model, &shifted, 0.5, hs * 0.5).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }
}

#[test]
fn single_precision_tracks_double() {
    let m64 = PhaseModel::<f64>::qubit(10.0, 1).unwrap();
    let m32 = PhaseModel::<f32>::qubit(10.0, 1).unwrap();
    let p64 = GaussianPrior::<f64>::centered(0.1).unwrap();
    let p32 = GaussianPrior::<f32>::centered(0.1).unwrap();
    let c64 = qcrb_bayes(&m64, &p64);
    let c32 = qcrb_bayes(&m32, &p32) as f64;
    assert!(((c32 - c64) / c64).abs() < 1e-5);
    let w64 = qwwb_phase(&m64, &Prior::Gaussian(p64), 0.5, 0.2).unwrap();
    let w32 = qwwb_phase(&m32, &Prior::Gaussian(p32), 0.5f32, 0.2f32).unwrap() as f64;
    assert!(((w32 - w64) / w64).abs() < 1e-4);
}
