use dunkl_core::dunkl::{
    apply_dunkl, log_weight_closed_form, log_weight_recurrence, right_inverse, shift_hypercyclicity_diagnostic,
};
use dunkl_core::dynamics::orbit_at_zero;
use dunkl_core::means::{mean_p_fast, Exponent};
use dunkl_core::numeric::{log_gamma, log_scaled_sum, relative_error, LogScaled};
use dunkl_core::series::{read_series, write_series};
use dunkl_core::{DunklWeights, HighComplex, TruncatedSeries, WeightedShift};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

const P: u32 = 192;

fn poly(seed: u64, degree: usize, trunc: usize) -> TruncatedSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TruncatedSeries::random_polynomial(&mut rng, degree, trunc, P).unwrap()
}

fn close(a: &HighComplex, b: &HighComplex, tol: f64) -> bool {
    let diff = (a - b).abs();
    let scale = b.abs().max(&Float::with_val(P, 1e-300));
    (diff / scale).to_f64() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_gamma_satisfies_the_shift_recurrence(x in 0.01f64..300.0) {
        let x = Float::with_val(P, x);
        let lhs = log_gamma(&Float::with_val(P, &x + 1u32)).unwrap();
        let rhs = log_gamma(&x).unwrap() + Float::with_val(P, x.ln_ref());
        prop_assert!(Float::with_val(P, &lhs - &rhs).abs() < 1e-50);
    }

    #[test]
    fn log_scaled_sum_ignores_order(
        logs in prop::collection::vec((-400.0f64..400.0, any::<bool>()), 1..24),
        seed in any::<u64>(),
    ) {
        let terms: Vec<LogScaled> = logs
            .iter()
            .map(|&(l, s)| LogScaled::from_log(if s { 1 } else { -1 }, Float::with_val(P, l)))
            .collect();
        let mut shuffled = terms.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.gen_range(0..=i));
        }
        let a = log_scaled_sum(&terms);
        let b = log_scaled_sum(&shuffled);
        prop_assert_eq!(a.sign(), b.sign());
        if !a.is_zero() {
            let d = Float::with_val(P, a.log_mag() - b.log_mag()).abs();
            prop_assert!(d < 1e-40, "{}", d);
        }
    }

    #[test]
    fn powers_compose(alpha in -0.49f64..4.0, j in 0usize..12, k in 0usize..12, seed in any::<u64>()) {
        let w = DunklWeights::from_f64(alpha, 48, P).unwrap();
        let f = poly(seed, 48, 48);
        let twice = apply_dunkl(&apply_dunkl(&f, &w, j), &w, k);
        let once = apply_dunkl(&f, &w, j + k);
        for (a, b) in twice.coeffs().iter().zip(once.coeffs()) {
            prop_assert!(close(a, b, 1e-50));
        }
    }

    #[test]
    fn right_inverse_is_undone(alpha in -0.49f64..4.0, n in 0usize..20, seed in any::<u64>()) {
        let w = DunklWeights::from_f64(alpha, 64, P).unwrap();
        let f = poly(seed, 40, 64);
        let g = right_inverse(&f, &w, n).unwrap();
        let back = apply_dunkl(&g, &w, n);
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            prop_assert!(close(a, b, 1e-50));
        }
    }

    #[test]
    fn orbit_values_are_constant_terms(alpha in -0.49f64..4.0, seed in any::<u64>()) {
        let w = DunklWeights::from_f64(alpha, 40, P).unwrap();
        let f = poly(seed, 40, 40);
        let rep = orbit_at_zero(&f, &w, 40);
        for n in 0..=40 {
            let image = apply_dunkl(&f, &w, n);
            prop_assert!(close(&rep.values[n], &image.coeffs()[0], 1e-50), "n={}", n);
        }
    }

    #[test]
    fn closed_form_matches_recurrence(alpha in -0.499f64..6.0, n in 0usize..3000) {
        let a = Float::with_val(P, alpha);
        let closed = log_weight_closed_form(&a, n).unwrap();
        let rec = log_weight_recurrence(&a, n);
        prop_assert!(Float::with_val(P, &closed - &rec).abs() < 1e-45);
    }

    #[test]
    fn power_means_increase_with_p(seed in any::<u64>(), r in 0.1f64..8.0) {
        let f = poly(seed, 20, 20);
        let terms = f.circle_terms(&Float::with_val(P, r));
        let m1 = mean_p_fast(&terms, P, Exponent::Finite(1.0), None);
        let m2 = mean_p_fast(&terms, P, Exponent::Finite(2.0), None);
        let m_inf = mean_p_fast(&terms, P, Exponent::Infinity, None);
        let slack = 1.0 + 1e-9;
        prop_assert!(m1.to_f64() <= m2.to_f64() * slack);
        prop_assert!(m2.to_f64() <= m_inf.to_f64() * slack);
    }

    #[test]
    fn series_files_round_trip(alpha in -0.49f64..3.0, seed in any::<u64>()) {
        let f = poly(seed, 30, 32);
        let a = Float::with_val(P, alpha);
        let mut buf = Vec::new();
        write_series(&mut buf, &a, &f).unwrap();
        let back = read_series(buf.as_slice()).unwrap();
        prop_assert_eq!(&back.alpha, &a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..20 {
            let z = HighComplex::from_f64(P, rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let (u, v) = (f.evaluate(&z), back.series.evaluate(&z));
            prop_assert!(u.re == v.re && u.im == v.im);
        }
    }
}

#[test]
fn weights_are_continuous_at_the_lower_end() {
    let prec = 256;
    let near = Float::with_val(prec, -0.5) + Float::with_val(prec, 1e-40);
    let edge = Float::with_val(prec, -0.5);
    for n in [1usize, 2, 7, 100, 1001] {
        let closed = log_weight_closed_form(&near, n).unwrap();
        let at_edge = log_weight_recurrence(&edge, n);
        // Shifting alpha by 1e-40 moves ln d_n by less than n * 1e-40.
        let d = Float::with_val(prec, &closed - &at_edge).abs();
        assert!(d < 1e-40 * n as f64 * 2.0, "n={n}: {d}");
        assert!(d > 0, "n={n}");
    }
}

#[test]
fn dunkl_shift_root_test_diverges() {
    let w = DunklWeights::from_f64(1.0, 1000, P).unwrap();
    let s = WeightedShift::dunkl(&w).unwrap();
    let diag = shift_hypercyclicity_diagnostic(&s, 1000);
    let g = diag.g.last().unwrap().to_f64();
    assert!(g > 300.0, "g_1000 = {g}");
    assert!(diag.running_max.windows(2).all(|p| p[1] >= p[0]));
}

#[test]
fn unit_weights_stay_bounded() {
    let s = WeightedShift::constant(&HighComplex::one(P), 500).unwrap();
    let diag = shift_hypercyclicity_diagnostic(&s, 500);
    assert!(diag.g.iter().all(|v| relative_error(v, &Float::with_val(P, 1)) < 1e-50));
}
