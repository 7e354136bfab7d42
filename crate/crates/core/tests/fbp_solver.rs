use fbplab::angular_modes::{homogeneous_profile, ProfileKind, ProfileParams};
use fbplab::error::Error;
use fbplab::fbp_solver::*;
use fbplab::weiss_energy::*;
use std::f64::consts::PI;

fn profile_data(kind: ProfileKind) -> BoundaryData {
    let p = homogeneous_profile(kind, ProfileParams::default()).unwrap();
    BoundaryData::from_jet(format!("{kind:?}"), 16, move |r, t| p.jet(r, t))
}

fn config(lambda: f64, n_r: usize) -> SolverConfig {
    SolverConfig {
        lambda,
        n_r,
        n_theta: 64,
        ..Default::default()
    }
}

/// ∫_ρ^1 (u'' + u'/r)² 2πr dr from central differences of the value alone.
fn fd_bending(s: &RadialSolution, rho: f64) -> f64 {
    let n = 20_000;
    let h = (1.0 - rho) / n as f64;
    let d = 2e-3 * (1.0 - rho);
    let mut acc = 0.0;
    for i in 0..n {
        let r = rho + (i as f64 + 0.5) * h;
        // stay on the annulus
        let d = d.min(0.5 * (r - rho));
        let (a, b, c) = (s.value(r - d), s.value(r), s.value(r + d));
        let lap = (c - 2.0 * b + a) / (d * d) + (c - a) / (2.0 * d * r);
        acc += lap * lap * 2.0 * PI * r * h;
    }
    acc
}

#[test]
fn radial_oracle_examples() {
    let z = radial_oracle(0.0, 0.0, 1.0);
    assert_eq!(z.support, RadialSupport::Empty);
    assert_eq!(z.energy, 0.0);

    let s = radial_oracle(1e-3, 0.0, 1.0);
    assert_eq!(s.support, RadialSupport::Annulus);
    let rho = s.rho.unwrap();
    assert!(rho > 0.5 && rho < 1.0, "{rho}");
    assert_eq!(s.value(0.4), 0.0);

    let f = radial_oracle(0.3, -0.2, 0.0);
    assert_eq!(f.support, RadialSupport::Full);
    assert!((f.energy - 4.0 * PI * 0.04).abs() < 1e-12);
}

#[test]
fn radial_oracle_against_finite_differences() {
    for (g0, h0, lam) in [(1e-3, 0.0, 1.0), (0.02, 0.05, 1.0), (0.1, -0.1, 4.0)] {
        let s = radial_oracle(g0, h0, lam);
        let Some(rho) = s.rho else { continue };
        let b = fd_bending(&s, rho);
        assert!((b - s.bending).abs() < 1e-5 * (1.0 + b), "{b} {}", s.bending);
        // clamped data on both circles
        let [u0, du0, _] = s.jet(rho + 1e-13);
        let [u1, du1, _] = s.jet(1.0);
        assert!(u0.abs() < 1e-9 && du0.abs() < 1e-9);
        assert!((u1 - g0).abs() < 1e-12 && (du1 - h0).abs() < 1e-12);
        // optimality in ρ gives |Δu|² = λ on the free boundary
        let lap = s.jet(rho + 1e-12)[2];
        assert!((lap * lap - lam).abs() < 1e-3 * lam, "{} vs {lam}", lap * lap);
        for d in [-1e-2, 1e-2] {
            assert!(annulus_energy(rho + d, g0, h0, lam) > s.energy);
        }
    }
}

#[test]
fn radial_support_shrinks_with_lambda() {
    for (g0, h0) in [(1e-2, 0.0), (0.05, 0.02), (0.2, -0.1)] {
        let mut prev = f64::INFINITY;
        for k in 0..30 {
            let lam = 0.05 * 1.3f64.powi(k);
            let a = radial_oracle(g0, h0, lam).support_area;
            assert!(a <= prev + 1e-9, "({g0}, {h0}) λ = {lam}: {a} > {prev}");
            prev = a;
        }
    }
}

#[test]
fn zero_lambda_gives_biharmonic_extension() {
    let tr = BoundaryTrace::from_fn(1.0, 3, 64, |t| {
        [
            0.3 + 0.2 * (2.0 * t).cos() + 0.1 * (3.0 * t).sin(),
            0.1 * t.sin() - 0.2 * (2.0 * t).cos(),
            0.0,
        ]
    });
    let want = biharmonic_extension_energy(&tr).unwrap() - PI;
    let b = BoundaryData::from_trace("mixed", tr).unwrap();
    let errs: Vec<f64> = [32, 64]
        .iter()
        .map(|&n| {
            let r = minimize_energy(&b, &config(0.0, n)).unwrap();
            assert_eq!(r.energy_history.len(), 1);
            (r.energy - want).abs()
        })
        .collect();
    assert!(errs[1] < 1e-2 && errs[1] < errs[0], "{errs:?}");
}

#[test]
fn small_data_vanishes_on_half_disk() {
    for eps in [1e-3, 1e-4] {
        let r = minimize_energy(&BoundaryData::radial(eps, 0.0), &config(1.0, 48)).unwrap();
        assert_eq!(r.mesh.support_within(0.5), 0);
        assert_eq!(r.mesh.max_abs_within(0.5), 0.0);
        assert!(r.field.center_flat());
    }
}

#[test]
fn radial_data_energy_converges_at_first_order() {
    let o = radial_oracle(1e-3, 0.0, 1.0);
    for rule in [SupportUpdateRule::CellwiseThreshold, SupportUpdateRule::RadialExact] {
        let err = |n| {
            let cfg = SolverConfig {
                support_update_rule: rule,
                ..config(1.0, n)
            };
            (minimize_energy(&BoundaryData::radial(1e-3, 0.0), &cfg).unwrap().energy - o.energy).abs()
        };
        let (e1, e2) = (err(32), err(64));
        println!("{rule:?}: {e1:.4e} {e2:.4e} ratio {:.3}", e1 / e2);
        assert!(e1 / e2 >= 1.5);
    }
}

#[test]
fn energy_history_is_nonincreasing() {
    for (b, lam) in [
        (BoundaryData::radial(0.05, 0.1), 1.0),
        (profile_data(ProfileKind::Angular), 1.0),
        (BoundaryData::radial(0.2, 0.0), 10.0),
    ] {
        let r = minimize_energy(&b, &config(lam, 24)).unwrap();
        assert!(r.energy_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*r.energy_history.last().unwrap(), r.energy);
        assert!((0.0..=PI + 1e-9).contains(&r.support_area));
        assert!(r.converged);
    }
}

#[test]
fn nodal_data_observation() {
    // the full-support candidate is expected, not asserted
    let r = minimize_energy(&profile_data(ProfileKind::Nodal), &config(1.0, 32)).unwrap();
    println!("nodal: E = {:.5}, area = {:.4}, W = {:?}", r.energy, r.support_area, r.w_profile);
    assert!(r.energy.is_finite());
}

#[test]
fn seeded_runs_are_reproducible() {
    let b = profile_data(ProfileKind::Flat);
    let cfg = SolverConfig { seed: 7, ..config(1.0, 20) };
    let a = minimize_energy(&b, &cfg).unwrap();
    let c = minimize_energy(&b, &cfg).unwrap();
    assert_eq!(a.energy_history, c.energy_history);
    assert_eq!(a.mesh.support, c.mesh.support);
}

#[test]
fn config_is_validated() {
    let b = BoundaryData::radial(1.0, 0.0);
    for cfg in [
        SolverConfig { n_r: 8, ..Default::default() },
        SolverConfig { n_theta: 15, ..Default::default() },
        SolverConfig { tol_energy: 0.0, ..Default::default() },
        SolverConfig { lambda: -1.0, ..Default::default() },
    ] {
        assert!(matches!(minimize_energy(&b, &cfg), Err(Error::Domain(_))));
    }
    assert_eq!("radial-exact".parse::<SupportUpdateRule>().unwrap(), SupportUpdateRule::RadialExact);
    assert!("sweep".parse::<SupportUpdateRule>().is_err());
}

#[test]
fn blow_ups_of_homogeneous_fields() {
    let p = homogeneous_profile(ProfileKind::Nodal, ProfileParams::default()).unwrap();
    let u = DiskField::from_profile(PolarGrid::uniform(128, 256), &p).unwrap();
    let radii = [0.3, 0.5, 0.8];
    let seq = blow_up_sequence(&u, 1.0, (0.0, 0.0), &radii, 96, 192).unwrap();
    for b in &seq {
        for (x, y) in [(0.3, 0.1), (-0.5, 0.4), (0.1, -0.9)] {
            let want = p.jet(f64::hypot(x, y), f64::atan2(y, x))[0];
            assert!((b.field.sample_xy(x, y) - want).abs() < 1e-4, "r = {}", b.radius);
        }
        let w1 = b.w1.unwrap();
        let wr = weiss_w_lambda(&u, b.radius, 1.0).unwrap();
        assert!((w1 - wr).abs() < 1e-2 * (1.0 + wr.abs()), "{w1} {wr}");
    }
}

#[test]
fn blow_ups_at_a_flat_free_boundary_point() {
    let p = homogeneous_profile(ProfileKind::Flat, ProfileParams::default()).unwrap();
    let u = DiskField::from_profile(PolarGrid::uniform(128, 256), &p).unwrap();
    let seq = blow_up_sequence(&u, 1.0, (0.3, 0.0), &[0.4, 0.2, 0.1], 32, 64).unwrap();
    for b in &seq {
        for (x, y) in [(0.2, 0.5), (-0.6, 0.3), (0.0, -0.4)] {
            let want = p.jet(f64::hypot(x, y), f64::atan2(y, x))[0];
            assert!((b.field.sample_xy(x, y) - want).abs() < 1e-3, "r = {}", b.radius);
        }
    }
    assert!(matches!(
        blow_up_sequence(&u, 1.0, (0.3, 0.0), &[1e-4], 32, 64),
        Err(Error::Resolution(_))
    ));
}

#[test]
fn monotonicity_on_homogeneous_and_solver_fields() {
    let p = homogeneous_profile(ProfileKind::Nodal, ProfileParams::default()).unwrap();
    let u = DiskField::from_profile(PolarGrid::uniform(128, 256), &p).unwrap();
    let grid: Vec<f64> = (1..=9).map(|k| 0.1 * k as f64).collect();
    let rep = monotonicity_experiment(&u, 1.0, &grid).unwrap();
    assert!(rep.monotone, "{:?}", rep.violations);
    let spread = rep.w.iter().fold(0.0f64, |m, w| m.max((w - PI).abs()));
    assert!(spread < 1e-2 * PI);

    let r = minimize_energy(&profile_data(ProfileKind::Nodal), &config(1.0, 32)).unwrap();
    if r.field.center_flat() {
        let rep = monotonicity_experiment(&r.field, 1.0, &grid).unwrap();
        assert!(rep.monotone, "{:?}", rep.violations);
    }

    let g = DiskField::from_jet(PolarGrid::uniform(32, 64), |r, _| [1.0 + r * r, 2.0 * r, 2.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(matches!(
        monotonicity_experiment(&g, 1.0, &grid),
        Err(Error::Precondition(_))
    ));
}
