use fbplab::angular_modes::{homogeneous_profile, t1, ProfileKind, ProfileParams};
use fbplab::weiss_energy::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn profile_field(kind: ProfileKind, params: ProfileParams, n_r: usize, n_t: usize) -> DiskField {
    let p = homogeneous_profile(kind, params).unwrap();
    DiskField::from_profile(PolarGrid::uniform(n_r, n_t), &p).unwrap()
}

#[test]
fn homogeneous_profiles_have_constant_w() {
    let iso = ProfileParams {
        abc: (1.0, 0.3, 0.0),
        ..Default::default()
    };
    let cases = [
        (ProfileKind::Flat, ProfileParams::default(), PI / 2.0),
        (ProfileKind::Angular, ProfileParams::default(), t1() / 2.0),
        (ProfileKind::Nodal, ProfileParams::default(), PI),
        (ProfileKind::Isolated, iso, PI),
    ];
    for (kind, params, want) in cases {
        let f = profile_field(kind, params, 256, 512);
        for r in [0.2, 0.4, 0.6, 0.8] {
            let w = weiss_w(&f, r).unwrap();
            println!("{kind:?} r={r} W={w} want={want}");
            assert!((w - want).abs() / want < 1e-2);
            let dkv = corrector_dkv(&f, r).unwrap();
            assert!((dkv - corrector(&f, r).unwrap()).abs() < 1e-6 * (1.0 + dkv.abs()));
        }
    }
}

#[test]
fn energy_of_flat_profile() {
    let f = profile_field(ProfileKind::Flat, ProfileParams::default(), 256, 512);
    let e = energy_e(&f, 1.0, 1.0);
    assert!((e - PI).abs() < 2e-2, "{e}");
    assert_eq!(energy_e(&f, 1.0, 0.0), 0.0);
}

#[test]
fn energy_of_isolated_profile() {
    let a = 0.7;
    let g = PolarGrid::uniform(128, 256);
    let f = DiskField::from_jet(g, |r, _| [a * r * r, 2.0 * a * r, 0.0, 2.0 * a, 0.0, 0.0]).unwrap();
    let e = energy_e(&f, 1.0, 1.0);
    assert!((e - (16.0 * a * a * PI + PI)).abs() < 1e-3 * e, "{e}");
}

#[test]
fn nodal_n_functional() {
    let f = profile_field(ProfileKind::Nodal, ProfileParams::default(), 256, 512);
    for r in [0.3, 0.7] {
        let n = n_functional(&f, r).unwrap();
        assert!((n - 7.0 * PI / 16.0).abs() < 1e-6, "{n}");
    }
}

#[test]
fn goursat_matches_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3 {
        let c = GoursatCoefficients::random(&mut rng, 8, true);
        let f = c.to_field(PolarGrid::uniform(256, 512)).unwrap();
        for r in [0.3, 0.6, 0.9] {
            let w = weiss_w_lambda(&f, r, 0.0).unwrap();
            let w0 = c.w0(r);
            println!("r={r} grid={w} closed={w0}");
            assert!((w - w0).abs() / (1.0 + w0.abs()) < 1e-3);
            let b = weiss_breakdown(&f, r, 0.0).unwrap();
            println!("{b:?} res={}", b.identity_residual());
            assert!(b.identity_residual() < 1e-3 * (1.0 + b.w.abs()));
            assert!((b.n_prime_fd - b.n_prime_closed).abs() < 1e-3 * (1.0 + b.n_prime_fd.abs()));
        }
    }
}

#[test]
fn cylinder_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = GoursatCoefficients::random(&mut rng, 4, true);
    let f = c.to_field(PolarGrid::refined(400, 256, 200, 1e-4)).unwrap();
    let v = to_cylinder(&f, 20.0).unwrap();
    for r in [0.3f64, 0.5, 0.8] {
        let a = weiss_w_lambda(&f, r, 1.0).unwrap();
        let b = cylinder_w(&v, -r.ln()).unwrap();
        println!("r={r} disk={a} cyl={b}");
        assert!((a - b).abs() < 1e-3 * (1.0 + a.abs()));
        let tau = -r.ln();
        let d = 1e-3;
        let fd = (cylinder_w(&v, tau + d).unwrap() - cylinder_w(&v, tau - d).unwrap()) / (2.0 * d);
        let slope = cylinder::cylinder_w_slope(&v, tau).unwrap();
        println!("fd={fd} slope={slope}");
    }
}
