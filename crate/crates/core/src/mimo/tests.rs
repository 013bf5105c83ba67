use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::*;
use crate::channel::{Geometry, PathLoss, Stream, StreamSampler};
use crate::linalg::kron;
use crate::siso::{self, SisoChannel};

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn noise() -> NoiseModel<f64> {
    NoiseModel::new(1e-6).unwrap()
}

fn budgets() -> PowerBudget<f64> {
    PowerBudget::new(0.5, 0.1).unwrap()
}

fn channels(trial: u64, r: usize, ratio: f64) -> ChannelRealization<f64> {
    let geom = Geometry::new(10.0, ratio).unwrap();
    StreamSampler::new(2024)
        .realize(trial, &geom, &PathLoss::default(), r)
        .unwrap()
}

fn problem(trial: u64, r: usize, rho: f64, variant: Variant) -> MimoProblem<f64> {
    MimoBase::new(channels(trial, r, 0.5), budgets(), noise(), variant)
        .at(rho)
        .unwrap()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector<f64> {
    let v = (0..n)
        .map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    Vector::new(v).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn harvested_power_example() {
    let ch = ChannelRealization::new(Vector::from_real(&[1.0]), Vector::from_real(&[2.0_f64.sqrt()])).unwrap();
    let p_r = harvested_power(0.5, &ch, &budgets());
    assert!((p_r - 0.55).abs() < 1e-15);
    let no_ef = harvested_power(0.5, &ch, &budgets().without_energy_flow());
    assert!((no_ef - 0.05).abs() < 1e-15);
}

#[test]
fn problem_rejects_boundary_rho() {
    let base = MimoBase::new(channels(0, 2, 0.5), budgets(), noise(), Variant::Efa);
    assert!(base.at(0.0).is_err());
    assert!(base.at(1.0).is_err());
    assert!(base.at(0.3).is_ok());
}

#[test]
fn operators_match_transposed_kronecker_definitions() {
    for r in [1, 2, 3] {
        let p = problem(3, r, 0.4, Variant::Efa);
        let ops = assemble_operators(&p).unwrap();
        let h_rs = p.channels.h_rs();
        let h_dr = p.channels.h_dr();
        let k_ref = kron(&Matrix::outer(h_rs, h_rs), &Matrix::outer(h_dr, h_dr)).transpose();
        let j_ref = kron(&Matrix::identity(r), &Matrix::outer(h_dr, h_dr)).transpose();
        assert!((&ops.k - &k_ref).frobenius_norm() <= 1e-12 * k_ref.frobenius_norm());
        assert!((&ops.j - &j_ref).frobenius_norm() <= 1e-12 * j_ref.frobenius_norm());
        assert!(ops.j_tilde.is_hermitian(1e-12 * ops.j_tilde.frobenius_norm()));
    }
}

#[test]
fn operators_collapse_to_scalars_for_one_antenna() {
    let p = problem(1, 1, 0.3, Variant::Efa);
    let ops = assemble_operators(&p).unwrap();
    let g_rs = p.channels.h_rs().norm_sqr();
    let g_dr = p.channels.h_dr().norm_sqr();
    let pb = budgets();
    assert!(rel(ops.k[(0, 0)].re, g_rs * g_dr) < 1e-12);
    assert!(rel(ops.j[(0, 0)].re, g_dr) < 1e-12);
    let q = g_rs * pb.p_s + g_dr * pb.p_d;
    assert!(rel(ops.q_tilde[(0, 0)].re, q) < 1e-12);
}

#[test]
fn covariance_is_rank_one_without_energy_flow() {
    let p = problem(4, 3, 0.5, Variant::NoEf);
    let q = p.forwarded_covariance();
    let s = crate::linalg::svd(&q).unwrap();
    assert!(s.singular_values[1] <= 1e-12 * s.singular_values[0]);
    let h = p.channels.h_rs();
    assert!(rel(s.singular_values[0], h.norm_sqr() * budgets().p_s) < 1e-12);
}

#[test]
fn k_acts_as_rank_one() {
    let p = problem(5, 3, 0.5, Variant::Efa);
    let ops = assemble_operators(&p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = random_vector(&mut rng, 9);
    let direct = ops.k.mul_vec(&f);
    let factored = ops.k_vec.scale_complex(ops.k_vec.inner(&f));
    assert!((&direct - &factored).norm() <= 1e-12 * direct.norm());
}

#[test]
fn forwarded_power_special_cases() {
    let p = problem(6, 3, 0.4, Variant::Efa);
    assert_eq!(forwarded_power(&Matrix::zeros(3, 3), &p).unwrap(), 0.0);
    assert!(forwarded_power(&Matrix::zeros(2, 2), &p).is_err());

    // Q = qI gives ((1−ρ)q + σ²)·r for F = I.
    let q = 0.7;
    let ch = ChannelRealization::new(Vector::from_real(&[1.0, 0.0]), Vector::from_real(&[0.0, 1.0])).unwrap();
    let pb = PowerBudget::new(q, q).unwrap();
    let p = MimoBase::new(ch, pb, noise(), Variant::Efa).at(0.4).unwrap();
    let got = forwarded_power(&Matrix::identity(2), &p).unwrap();
    assert!(rel(got, 2.0 * (0.6 * q + 1e-6)) < 1e-14);
}

#[test]
fn forwarded_power_matrix_and_vector_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..20 {
        let r = 1 + (trial as usize % 4);
        let p = problem(trial, r, 0.2 + 0.03 * trial as f64, Variant::Efa);
        let ops = assemble_operators(&p).unwrap();
        let f = random_vector(&mut rng, r * r);
        let fm = Matrix::unvec(&f, r, r).unwrap();
        let a = forwarded_power(&fm, &p).unwrap();
        let b = ops.forwarded_power(&f);
        assert!(rel(a, b) < 1e-10, "{a} {b}");
    }
}

#[test]
fn snr_rejects_zero_and_off_budget_vectors() {
    let p = problem(7, 2, 0.5, Variant::Efa);
    assert!(matches!(
        snr_gamma2(&Vector::zeros(4), &p),
        Err(Error::ConstraintViolated { .. })
    ));
    let sol = optimize_relay_matrix(&p).unwrap();
    assert!(snr_gamma2(&sol.f, &p).is_ok());
    assert!(matches!(
        snr_gamma2(&sol.f.scale(1.01), &p),
        Err(Error::ConstraintViolated { .. })
    ));
}

#[test]
fn one_antenna_matches_single_antenna_model() {
    for trial in 0..10 {
        let p = problem(trial, 1, 0.35, Variant::Efa);
        let sol = optimize_relay_matrix(&p).unwrap();
        let ch = SisoChannel::new(p.channels.h_rs()[0], p.channels.h_rd()[0]).unwrap();
        let expected = siso::evaluate_at(0.35, &ch, &budgets(), &noise());
        assert!(rel(sol.gamma2, expected.gamma1) < 1e-9);
        assert!(rel(sol.f[0].norm_sqr(), expected.f_sq) < 1e-9);
    }
}

#[test]
fn matrix_and_quadratic_snr_forms_agree_at_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..20 {
        let p = problem(trial, 3, 0.6, Variant::Efa);
        let ops = assemble_operators(&p).unwrap();
        let f = ops.scale_to_budget(&random_vector(&mut rng, 9)).unwrap();
        let forms = gamma2_forms(&f, &p).unwrap();
        assert!(forms.constraint_residual < 1e-12);
        assert!(rel(forms.matrix_form, forms.quadratic_form) < 1e-9);
    }
}

#[test]
fn optimum_attains_the_dominant_eigenvalue() {
    for trial in 0..10 {
        let p = problem(trial, 4, 0.5, Variant::Efa);
        let sol = optimize_relay_matrix(&p).unwrap();
        let (_, _, eigenvalue) = sol.whitened().unwrap();
        let ops = assemble_operators(&p).unwrap();
        assert!(rel(ops.whitened_objective(&sol.f), eigenvalue) < 1e-9);
        let expected_gamma = budgets().p_s * eigenvalue / noise().sigma_n_sq;
        assert!(rel(sol.gamma2, expected_gamma) < 1e-9);
    }
}

#[test]
fn rank_one_shortcut_agrees_with_eigen_path() {
    for trial in 0..10 {
        for variant in [Variant::Efa, Variant::NoEf, Variant::GenieEfa] {
            let p = problem(trial, 3, 0.45, variant);
            let a = optimize_relay_matrix(&p).unwrap();
            let b = optimize_relay_matrix_rank_one(&p).unwrap();
            assert!(rel(a.gamma2, b.gamma2) < 1e-8);
            let phase = b.f.inner(&a.f);
            let aligned = b.f.scale_complex(phase / phase.norm());
            assert!((&aligned - &a.f).norm() <= 1e-6 * a.f.norm());
        }
    }
}

#[test]
fn synthetic_identity_whitening() {
    // With J̃ = I the whitened operator is K̃ itself and its eigenvector is k_vec.
    let k = Vector::new(vec![c(1.0, 0.5), c(-0.2, 0.3), c(0.0, 1.0), c(2.0, 0.0)]).unwrap();
    let m = Matrix::outer(&k, &k).scale(0.5);
    let pair = crate::linalg::dominant_eigenpair(&m, 1e-12, 10_000).unwrap();
    assert!(rel(pair.value, 0.5 * k.norm_sqr()) < 1e-12);
    assert!(rel(pair.vector.inner(&k).norm(), k.norm()) < 1e-12);
}

#[test]
fn random_directions_never_beat_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for trial in 0..5 {
        let p = problem(trial, 3, 0.5, Variant::Efa);
        let sol = optimize_relay_matrix(&p).unwrap();
        let ops = assemble_operators(&p).unwrap();
        for _ in 0..200 {
            let f = ops.scale_to_budget(&random_vector(&mut rng, 9)).unwrap();
            let gamma = snr_gamma2(&f, &p).unwrap();
            assert!(gamma <= sol.gamma2 * (1.0 + 1e-8));
        }
    }
}

#[test]
fn snr_is_phase_invariant_and_increasing_in_gain() {
    let p = problem(8, 3, 0.5, Variant::Efa);
    let sol = optimize_relay_matrix(&p).unwrap();
    let rotated = sol.f.scale_complex(Complex::from_polar(1.0, 1.234));
    assert!(rel(snr_gamma2(&rotated, &p).unwrap(), sol.gamma2) < 1e-12);
    let mut last = 0.0;
    for s in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let fm = Matrix::unvec(&sol.f.scale(s), 3, 3).unwrap();
        let g = snr_from_matrix(&fm, &p);
        assert!(g > last);
        last = g;
    }
}

#[test]
fn grid_helpers() {
    let g: Vec<f64> = default_ps_grid();
    assert_eq!(g.len(), 99);
    assert!((g[0] - 0.01).abs() < 1e-15 && (g[98] - 0.99).abs() < 1e-15);
    assert_eq!(ps_grid(0.5, 0.1, 0.5), vec![0.5]);
    assert!(ps_grid(0.5, 0.1, 0.4).is_empty());
    let base = MimoBase::new(channels(0, 2, 0.5), budgets(), noise(), Variant::Efa);
    assert!(grid_search_ps(&base, &[]).is_err());
    let single = grid_search_ps(&base, &[0.37]).unwrap();
    assert_eq!(single.rho, 0.37);
}

#[test]
fn rate_is_unimodal_on_the_grid() {
    for trial in 0..5 {
        let base = MimoBase::new(channels(trial, 3, 0.5), budgets(), noise(), Variant::Efa);
        let rates: Vec<f64> = default_ps_grid()
            .into_iter()
            .map(|rho| solve_at(&base.at(rho).unwrap()).unwrap().rate)
            .collect();
        let peak = rates
            .iter()
            .enumerate()
            .fold(0, |best, (i, &r)| if r > rates[best] { i } else { best });
        assert!(rates[..=peak].windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
        assert!(rates[peak..].windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        let best = grid_search_ps(&base, &default_ps_grid()).unwrap();
        assert_eq!(best.rate, rates[peak]);
    }
}

#[test]
fn genie_bounds_energy_flow_and_harvests_the_same() {
    for trial in 0..10 {
        let efa = problem(trial, 3, 0.5, Variant::Efa);
        let genie = efa.with_variant(Variant::GenieEfa);
        assert_eq!(efa.harvested_power(), genie.harvested_power());
        let ops = genie_operators(&genie).unwrap();
        let expected_q = Matrix::outer(efa.channels.h_rs(), efa.channels.h_rs()).scale(budgets().p_s);
        assert!((&ops.q_r - &expected_q).frobenius_norm() <= 1e-15);
        let a = optimize_relay_matrix(&efa).unwrap();
        let b = optimize_relay_matrix(&genie).unwrap();
        assert!(b.gamma2 >= a.gamma2 * (1.0 - 1e-10));
    }
    assert!(genie_operators(&problem(0, 2, 0.5, Variant::Efa)).is_err());
}

#[test]
fn mrcmrt_matrix_structure() {
    let ch = channels(2, 3, 0.5);
    let zero = mrcmrt_matrix(0.0, &ch).unwrap();
    assert_eq!(zero.frobenius_norm(), 0.0);
    let f = mrcmrt_matrix(1.7, &ch).unwrap();
    assert!(rel(f.frobenius_norm(), 1.7) < 1e-14);
    let s = crate::linalg::svd(&f).unwrap();
    assert!(s.singular_values[1] <= 1e-12 * s.singular_values[0]);

    // One antenna: |F′| = η with phase −(∠h_DR + ∠h_RS).
    let one = channels(2, 1, 0.5);
    let f1 = mrcmrt_matrix(2.0, &one).unwrap()[(0, 0)];
    let expected = -(one.h_dr()[0].arg() + one.h_rs()[0].arg());
    assert!((f1.norm() - 2.0).abs() < 1e-14);
    assert!((Complex::from_polar(1.0, f1.arg()) - Complex::from_polar(1.0, expected)).norm() < 1e-12);
}

#[test]
fn mrcmrt_without_energy_flow_is_optimal() {
    for trial in 0..10 {
        let no_ef = problem(trial, 3, 0.5, Variant::NoEf);
        let mrc = no_ef.with_variant(Variant::MrcMrtNoEf);
        let a = optimize_relay_matrix(&no_ef).unwrap();
        let b = optimize_mrcmrt(&mrc).unwrap();
        assert!(rel(b.gamma2, a.gamma2) < 1e-8, "{} {}", a.gamma2, b.gamma2);
    }
}

#[test]
fn mrcmrt_scalarized_snr_matches_matrix_evaluation() {
    for variant in [Variant::MrcMrtEfa, Variant::MrcMrtNoEf] {
        for trial in 0..10 {
            let p = problem(trial, 4, 0.3, variant);
            let sol = optimize_mrcmrt(&p).unwrap();
            let generic = snr_gamma2(&sol.f, &p).unwrap();
            assert!(rel(generic, sol.gamma2) < 1e-9);
        }
    }
}

#[test]
fn mrcmrt_never_beats_the_optimized_matrix() {
    for trial in 0..10 {
        let p = problem(trial, 3, 0.5, Variant::Efa);
        let a = optimize_relay_matrix(&p).unwrap();
        let b = optimize_mrcmrt(&p.with_variant(Variant::MrcMrtEfa)).unwrap();
        assert!(b.gamma2 <= a.gamma2 * (1.0 + 1e-9));
    }
}

#[test]
fn mrcmrt_closed_form_ratio_beats_grid() {
    for trial in 0..5 {
        let base = MimoBase::new(channels(trial, 3, 0.5), budgets(), noise(), Variant::MrcMrtEfa);
        let exact = optimize_mrcmrt_ps(&base).unwrap();
        let grid = grid_search_ps(&base, &default_ps_grid()).unwrap();
        assert!(exact.rate >= grid.rate * (1.0 - 1e-12));
        assert!(exact.rate <= grid.rate * (1.0 + 1e-3));
    }
}

#[test]
fn optimized_path_rejects_mrcmrt_variants() {
    let p = problem(0, 2, 0.5, Variant::MrcMrtEfa);
    assert!(optimize_relay_matrix(&p).is_err());
    assert!(optimize_mrcmrt(&p.with_variant(Variant::Efa)).is_err());
}

#[test]
fn variant_names_round_trip() {
    for v in Variant::ALL {
        assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        assert_eq!(v.name().to_lowercase().parse::<Variant>().unwrap(), v);
    }
    assert!("bogus".parse::<Variant>().is_err());
}

#[test]
fn diagnostics_of_aligned_matrix() {
    let ch = channels(1, 3, 0.5);
    let f = mrcmrt_matrix(1.0, &ch).unwrap();
    let d = diagnostics(&f, &ch, &budgets(), 0.5).unwrap();
    assert!((d.xi_1[0] - 1.0).abs() < 1e-12);
    assert!((d.xi_2[0] - 1.0).abs() < 1e-12);
    assert!((d.singular_values[0] - 1.0).abs() < 1e-12);
    assert!(diagnostics(&Matrix::zeros(3, 3), &ch, &budgets(), 0.5).is_err());
}

#[test]
fn diagnostics_are_normalized_and_reproduce_the_objective() {
    for trial in 0..10 {
        let p = problem(trial, 4, 0.4, Variant::Efa);
        let sol = optimize_relay_matrix(&p).unwrap();
        let d = diagnostics(&sol.relay, &p.channels, &budgets(), p.rho).unwrap();
        let lam_sq: f64 = d.singular_values.iter().map(|l| l * l).sum();
        assert!((lam_sq - 1.0).abs() < 1e-12);
        for xi in [&d.xi_1, &d.xi_2, &d.xi_3] {
            let s: f64 = xi.iter().map(|x| x * x).sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
        let ops = assemble_operators(&p).unwrap();
        let direct = ops.whitened_objective(&sol.f);
        let angular = angular_objective(&d, &p.channels, &noise());
        assert!(rel(angular, direct) < 1e-9, "angular {angular} direct {direct}");
    }
}

#[test]
fn optimal_matrix_aligns_with_channels() {
    let mut aligned = 0;
    let n = 1000;
    for trial in 0..n {
        let p = problem(trial, 3, 0.5, Variant::Efa);
        let sol = optimize_relay_matrix(&p).unwrap();
        let d = diagnostics(&sol.relay, &p.channels, &budgets(), p.rho).unwrap();
        if d.xi_1[0] >= d.xi_1[1] && d.xi_2[0] >= d.xi_2[1] {
            aligned += 1;
        }
    }
    assert!(aligned * 10 >= n * 9, "{aligned} of {n}");
}

#[test]
fn oracle_stream_is_disjoint_from_channel_streams() {
    let s = StreamSampler::new(1);
    let mut a = s.stream(0, Stream::Oracle);
    let mut b = s.stream(0, Stream::SourceRelay);
    let x: f64 = StandardNormal.sample(&mut a);
    let y: f64 = StandardNormal.sample(&mut b);
    assert_ne!(x, y);
}
