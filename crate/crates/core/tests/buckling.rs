use fbplab::buckling::*;
use fbplab::Error;

mod common;
use common::radial_buckling_oracle as radial_oracle;

#[test]
fn disk_matches_the_radial_oracle() {
    let oracle = radial_oracle(10_000);
    let coarse = radial_oracle(2_500);
    // second order: the fine value is already far inside the tolerance
    assert!((oracle - coarse).abs() < 1e-5, "{oracle} {coarse}");
    let l = lambda1_disk(1e-12).unwrap();
    assert!((l - oracle).abs() < 1e-3, "{l} vs {oracle}");
    assert!((l - 14.6819).abs() < 1e-3);
    // the oracle minimizer is a zero of J₁ squared
    let j = oracle.sqrt();
    assert!(bessel_j(1, j).abs() < 1e-4);
}

#[test]
fn disk_scaling_and_residual() {
    let one = disk_eig(1.0, 1e-10).unwrap();
    let two = disk_eig(2.0, 1e-10).unwrap();
    assert!((two.lambda1 - one.lambda1 / 4.0).abs() < 1e-12);
    assert!(one.rayleigh_residual <= 1e-10 && two.rayleigh_residual <= 1e-10);
    assert!(matches!(disk_eig(-1.0, 1e-8), Err(Error::Domain(_))));
    assert!(matches!(lambda1_disk(0.0), Err(Error::Domain(_))));
}

#[test]
fn numeric_disk_converges() {
    let exact = lambda1_disk(1e-14).unwrap();
    let d = PlateDomain::disk(1.0).unwrap();
    let l: Vec<f64> = [64, 128, 256].iter().map(|&m| lambda1_numeric(&d, m).unwrap().lambda1).collect();
    let (d1, d2) = ((l[0] - l[1]).abs(), (l[1] - l[2]).abs());
    assert!(d1 / d2 >= 3.0, "refinement ratio {}", d1 / d2);
    assert!((l[2] - exact).abs() / exact < 1e-4);
    let e = lambda1_numeric(&d, 64).unwrap();
    assert!(e.rayleigh_residual < 1e-10);
    assert!(e.pencil_residual < 1e-10);
}

#[test]
fn mesh_is_validated() {
    let d = PlateDomain::disk(1.0).unwrap();
    assert!(matches!(lambda1_numeric(&d, 32), Err(Error::Domain(_))));
    assert!(matches!(lambda1_numeric(&d, 65), Err(Error::Domain(_))));
    assert!(PlateDomain::star(0.2, &[(1.0, 0.0)]).is_err());
    assert!(PlateDomain::ellipse(1.0, 0.0).is_err());
}

#[test]
fn unit_ratio_ellipse_is_the_disk() {
    let e = lambda1_numeric(&PlateDomain::ellipse_with_ratio(1.0).unwrap(), 64).unwrap();
    let d = lambda1_numeric(&PlateDomain::disk(1.0).unwrap(), 64).unwrap();
    assert!((e.lambda1 - d.lambda1).abs() < 1e-9);
}

#[test]
fn scale_invariance_on_a_star_domain() {
    let star = PlateDomain::star(1.0, &[(0.0, 0.1), (0.08, 0.0)]).unwrap();
    let base = lambda1_numeric(&star, 96).unwrap().lambda1;
    for t in [0.5, 2.0, 3.0] {
        let l = lambda1_numeric(&star.scaled(t).unwrap(), 96).unwrap().lambda1;
        assert!((t * t * l - base).abs() / base < 1e-8, "t = {t}");
    }
}

#[test]
fn inclusion_lowers_lambda() {
    let small = lambda1_numeric(&PlateDomain::disk(0.9).unwrap(), 64).unwrap().lambda1;
    let big = lambda1_numeric(&PlateDomain::disk(1.0).unwrap(), 64).unwrap().lambda1;
    assert!(big < small);
    // ellipse (1.2, 1) contains the unit disk
    let ell = lambda1_numeric(&PlateDomain::ellipse(1.2, 1.0).unwrap(), 64).unwrap().lambda1;
    assert!(ell < big);
}

#[test]
fn ellipse_scan_ranks_the_disk_first() {
    let family = ellipse_family(&[1.0, 1.1, 1.25, 1.5]).unwrap();
    for mesh in [64, 128] {
        let t = disk_optimality_scan(&family, mesh, 4).unwrap();
        assert!(t.disk_minimal && t.argmin == 1.0, "mesh {mesh}");
        for r in &t.rows {
            assert!((r.area - std::f64::consts::PI).abs() < 1e-12);
            assert!((r.area_lambda1 - r.area * r.lambda1).abs() < 1e-12);
        }
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# schema=fbplab.buckling-scan.v1"));
        assert_eq!(lines.next(), Some("family_param,area,lambda1,area_lambda1,mesh,residual"));
        assert_eq!(lines.count(), 4);
    }
}

#[test]
fn scan_is_independent_of_jobs() {
    let family = ellipse_family(&[1.0, 1.3]).unwrap();
    let a = disk_optimality_scan(&family, 64, 1).unwrap();
    let b = disk_optimality_scan(&family, 64, 3).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert!(disk_optimality_scan(&[], 64, 1).is_err());
}

#[test]
fn zero_perturbation_has_zero_margin() {
    let eig = lambda1_numeric(&PlateDomain::disk(1.0).unwrap(), 64).unwrap();
    let lib = bump_library((0.3, 0.0), 0.1, 0.0);
    let rep = quasiminimality_check(&eig, &lib, ((0.3, 0.0), 0.1), 10.0).unwrap();
    assert_eq!(rep.margins.len(), 15);
    assert!(rep.margins.iter().all(|m| m.margin == 0.0));
    assert!(rep.passed);
}

#[test]
fn bumps_must_sit_inside_the_disk() {
    let eig = lambda1_numeric(&PlateDomain::disk(1.0).unwrap(), 64).unwrap();
    let bump = Bump {
        center: (0.3, 0.0),
        width: 0.05,
        amplitude: 1e-3,
    };
    let r = quasiminimality_check(&eig, &[bump], ((0.0, 0.0), 0.3), 1.0);
    assert!(matches!(r, Err(Error::Domain(_))));
}

#[test]
fn quasiminimality_sweep_reports_per_radius() {
    let eig = lambda1_numeric(&PlateDomain::disk(1.0).unwrap(), 128).unwrap();
    for p in [(0.0, 0.0), (0.5, 0.2), (0.9, 0.0)] {
        let reps = quasiminimality_sweep(&eig, p, &[0.05, 0.1, 0.2], 1e-3).unwrap();
        assert_eq!(reps.len(), 3);
        for rep in &reps {
            assert_eq!(rep.mu, 1.0 / rep.radius);
            for m in &rep.margins {
                assert!(m.slope.is_finite());
                assert!(m.l2 > 0.0);
            }
        }
        // small bumps at the smallest radius
        assert!(reps[0].passed, "p = {p:?}, worst {}", reps[0].worst_margin);
    }
}
