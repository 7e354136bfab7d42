use fbplab::angular_modes::{t1, AngularFunction, BucklingMode, Interval};
use fbplab::epiperimetric::profile::CHI_EPS_C2;
use fbplab::epiperimetric::removal::c2_norm;
use fbplab::epiperimetric::single::{f_delta, f_eps_second_closed, f_eps_second_fd, SINGLE_MODE_EPS};
use fbplab::epiperimetric::*;
use fbplab::quad::simpson;
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

#[test]
fn q_form_closed_forms() {
    for l in [-8.0, -1.0, 1.0, 4.0, 100.0] {
        assert!((q_form(&DecayProfile::constant(1.0), l, 6.0) - l / 2.0).abs() < 1e-10);
    }
    assert_eq!(q_form(&DecayProfile::constant(0.0), 3.0, 6.0), 0.0);
    let e = DecayProfile::new("exp", |t: f64| {
        let e = (-t).exp();
        [e, -e, e]
    }, f64::INFINITY, 0.0, vec![]);
    // ∫e^{−2t}(e^{−2t} + 2e^{−2t}) = 3/4
    assert!((q_form(&e, 0.0, 1.0) - 0.75).abs() < 1e-12);
}

#[test]
fn chi_eps_equilibrium_and_bounds() {
    for eps in [0.01, 0.05, 0.1] {
        let chi = chi_eps(eps).unwrap();
        assert_eq!(chi.f0(), 1.0);
        assert_eq!(chi.fp0(), 0.0);
        let m = simpson(|t| (-2.0 * t).exp() * (chi.value(t) - (1.0 - eps)), 0.0, 40.0, 200_000);
        assert!(m.abs() < 1e-10, "ε = {eps}: {m}");
        let sup = (0..20_000)
            .map(|k| {
                let d = chi.eval(k as f64 * 1e-3);
                d[1].abs() + d[2].abs()
            })
            .fold(0.0, f64::max);
        assert!(sup <= 9.0 * eps * CHI_EPS_C2);
    }
    assert!(chi_eps(0.2).is_err());
}

#[test]
fn c0_partial_sums_and_tail() {
    let a = compute_c0(&[PI], 32).unwrap();
    let b = compute_c0(&[PI], 64).unwrap();
    assert!(b.partial > a.partial);
    let bound: f64 = (33..200_000).map(|n| 8.0 / (n as f64).powi(2)).sum();
    assert!(a.tail_estimate < bound);
    assert!((a.c0 - b.c0).abs() < 1e-3);
    let full = compute_c0(&[0.5 * PI, PI, TAU], 64).unwrap();
    assert_eq!(full.argmax_omega, TAU);
}

#[test]
fn single_mode_function_f() {
    for th in [PI, t1()] {
        assert_eq!(f_delta(th, 0.0), 0.0);
    }
    let fd = f_eps_second_fd(PI, 0.05, 1e-3).unwrap();
    let ex = f_eps_second_closed(0.05);
    assert!(((fd - ex) / ex).abs() < 1e-3, "{fd} vs {ex}");
}

#[test]
fn single_mode_gap() {
    for th in [PI, t1()] {
        for d in [-0.02, -0.01, 0.01, 0.02] {
            let omega = th * (1.0 + d);
            let a = (1.0 / (1.0 + d)).sqrt();
            let r = single_mode_energy_gap(th, a, omega, SINGLE_MODE_EPS).unwrap();
            assert!((r.g_u - 0.5 * th - 0.5 * f_delta(th, d)).abs() < 1e-12);
            assert!(r.gap <= 1e-12, "Θ = {th}, δ = {d}: {r:?}");
            assert!(r.quadrature_check < 1e-6, "{r:?}");
        }
    }
}

#[test]
fn double_sector() {
    let (r, f) = double_sector_competitor(1.0, 1.0, 0.98 * PI, 0.98 * PI, 0.02 * PI).unwrap();
    assert!(r.gap <= 1e-12, "{r:?}");
    assert!(r.min_separation >= 0.0);
    assert!(((r.g_c1 + r.g_c2) - r.g_stitched).abs() < 1e-6, "{r:?}");
    let (res_u, res_v) = f.boundary_residual(997);
    assert!(res_u < 1e-8 && res_v < 1e-8);
    let (s, _) = double_sector_competitor(1.0, 1.0, PI, PI, 0.0).unwrap();
    assert!(s.min_separation >= 0.0);
}

#[test]
fn profile_searches() {
    let c0 = compute_c0(&[TAU], 64).unwrap().c0_upper;
    let p = positive_profile_search(c0).unwrap();
    let f = p.profile.clone().unwrap();
    assert!(p.eta > 0.0);
    assert!(f.compact_support());
    assert_eq!(f.f0(), 1.0);
    assert_eq!(f.fp0(), 0.0);
    assert!(p.est_i.0 <= p.est_i.1);
    assert!(p.large_lambda_limit < 1.0);
    let m = moments(&f);
    for k in 0..=60 {
        let l = 10f64.powf(k as f64 / 10.0);
        assert!(m.q(l, c0) <= (1.0 - p.eta) * l / 2.0 + 1e-14);
    }
    let cand = moments(&positive_profile(0.1, f64::INFINITY));
    assert!(cand.q(1.0, c0) / 0.5 < 1.0 - 0.0025);

    let n = negative_profile_search(c0).unwrap();
    let h = n.profile.clone().unwrap();
    assert_eq!(h.f0(), 1.0);
    assert!(h.fp0().abs() < 1e-15);
    assert!(q_form(&h, -1.0, c0) <= -0.5);
    assert!(n.mass.0 >= n.mass.1);
    let eps: f64 = 0.01;
    let m = moments(&negative_profile(eps, f64::INFINITY)).d0;
    assert!((m - (0.5 + eps * eps / 4.0)).abs() < 1e-6);
}

#[test]
fn chi_omega_orthogonality() {
    let c = chi_omega(PI).unwrap();
    let p = c.profile();
    for n in 1..=3 {
        let k = BucklingMode::new(n, PI).unwrap().mu.cbrt();
        // independent Simpson on a grid aligned with the pieces
        let r = simpson(|t| t * (-(2.0 + k) * t).exp() * p.value(t), 0.0, 1.0, 16_000);
        assert!(r.abs() < 1e-10, "n = {n}: {r}");
    }
    assert_eq!(p.value(0.05), 1.0);
    assert_eq!(p.value(1.2), 0.0);
    let norms: Vec<f64> = (0..=15)
        .map(|k| c2_norm(chi_omega(0.5 * PI + 1.5 * PI * k as f64 / 15.0).unwrap().profile()))
        .collect();
    let max = norms.iter().cloned().fold(0.0, f64::max);
    let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max.is_finite() && max < 2.0 * min, "{norms:?}");
    assert_eq!(chi_omega(0.3 * PI).unwrap().omega_used, 0.5 * PI);
}

#[test]
fn derivative_removal() {
    let u = BucklingMode::new(1, PI).unwrap().placed(0.0);
    let (r0, _) = derivative_removal_gap(&u, &AngularFunction::zero(), PI).unwrap();
    assert!((r0.actual - r0.g_u).abs() < 1e-10);
    for c in r0.cross_low {
        assert!(c.abs() < 1e-10);
    }
    let v = BucklingMode::new(2, PI).unwrap().placed(0.0).scale(0.1);
    let (r, f) = derivative_removal_gap(&u, &v, PI).unwrap();
    assert!(r.actual <= r.bound_general);
    let imp = r.bound_improved.unwrap();
    assert!(r.actual <= imp + 1e-12);
    assert!((imp - r.g_u - (r.k2 + r.k3) * r.grad_v.powi(2)).abs() < 1e-9);
    let (res_u, res_v) = f.boundary_residual(1000);
    assert!(res_u < 1e-8 && res_v < 1e-8, "{res_u} {res_v}");
}

#[test]
fn biharmonic_rows() {
    let z = Complex64::new(0.0, 0.0);
    let mut x = vec![z; 9];
    x[7] = Complex64::new(1.0, 0.0);
    let r = biharmonic_comparison(&x, &vec![z; 9]).unwrap();
    assert!((r.terms[7].ratio_y0.unwrap() - 0.8).abs() < 1e-15);
    let r = biharmonic_comparison(&vec![z; 9], &vec![z; 9]).unwrap();
    assert_eq!(r.g_v_minus_pi, 0.0);
    assert_eq!(r.g_v0_minus_pi, 0.0);
}

fn b_one() -> AngularFunction {
    AngularFunction::from_fn(
        |t| {
            if (0.0..=PI).contains(&t) {
                let s = t.sin();
                [0.5 * s * s, s * t.cos(), (2.0 * t).cos()]
            } else {
                [0.0; 3]
            }
        },
        vec![Interval::new(0.0, PI)],
    )
}

#[test]
fn epiperimetric_pipeline() {
    let z = AngularFunction::zero();
    let r = epiperimetric_report(&b_one(), &z, PI, None).unwrap();
    assert!(r.decay_holds);
    assert!((r.g_u - 0.5 * PI).abs() < 1e-8);

    let u = b_one().add(&BucklingMode::new(3, PI).unwrap().placed(0.0).scale(0.02));
    let r = epiperimetric_report(&u, &z, PI, Some((r.g_u + 0.01, r.g_u + 0.005))).unwrap();
    assert!(r.decay_holds, "{r:?}");
    assert!(r.eta_empirical.unwrap() > 0.0);

    let t = t1();
    let b2 = BucklingMode::new(2, t).unwrap().placed(0.0);
    let u = b2.add(&BucklingMode::new(4, t).unwrap().placed(0.0).scale(0.02));
    let r = epiperimetric_report(&u, &z, t, None).unwrap();
    assert!(r.decay_holds, "{r:?}");

    let v = BucklingMode::new(2, PI).unwrap().placed(0.0).scale(0.05);
    let r = epiperimetric_report(&b_one(), &v, PI, None).unwrap();
    assert!(r.decay_holds, "{r:?}");
    assert!(r.grad_v_sq > 0.0);

    let m = BucklingMode::new(1, 0.98 * PI).unwrap();
    let u = m.placed(0.0).add(&m.placed(PI));
    let r = epiperimetric_report(&u, &z, TAU, None).unwrap();
    assert_eq!(r.components.len(), 2);
    assert!(r.decay_holds, "{r:?}");
    assert!(r.eta_empirical.unwrap() > 0.0);

    let wide = BucklingMode::new(1, 1.3 * PI).unwrap().placed(0.0);
    assert!(epiperimetric_report(&wide, &z, PI, None).is_err());
}
