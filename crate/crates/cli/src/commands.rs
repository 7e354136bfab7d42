use crate::config::{parse_number, Config};
use crate::output::OutDir;
use crate::CliError;
use fbplab::angular_modes::{homogeneous_profile, t1, AngularFunction, BucklingMode, HomogeneousProfile, ProfileKind, ProfileParams};
use fbplab::buckling::{
    disk_optimality_scan, ellipse_family, lambda1_disk, lambda1_numeric, quasiminimality_sweep, PlateDomain, ScanTable,
};
use fbplab::epiperimetric::epiperimetric_report;
use fbplab::fbp_solver::{blow_up_sequence, minimize_energy, BoundaryData, SolverConfig};
use fbplab::quad::simpson;
use fbplab::weiss_energy::io::{read_csv, sidecar_path, write_csv};
use fbplab::weiss_energy::{weiss_breakdown, weiss_w_lambda, DiskField, GoursatCoefficients, PolarGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

pub struct Ctx {
    pub cfg: Config,
    pub jobs: usize,
    pub seed: u64,
    pub force: bool,
    pub out: PathBuf,
    /// files read by the run, hashed into the manifest
    pub inputs: Vec<PathBuf>,
}

/// Applies f to every item, `jobs` at a time, keeping the input order.
fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let mut out = Vec::with_capacity(items.len());
    for chunk in items.chunks(jobs.max(1)) {
        std::thread::scope(|s| {
            let hs: Vec<_> = chunk.iter().map(|it| s.spawn(|| f(it))).collect();
            out.extend(hs.into_iter().map(|h| h.join().expect("worker panicked")));
        });
    }
    out
}

fn csv_header(schema: &str, cols: &str) -> String {
    format!("# schema={schema}\n{cols}\n")
}

fn profile(cfg: &Config) -> Result<HomogeneousProfile, CliError> {
    let kind = match cfg.str("profile") {
        "flat" => ProfileKind::Flat,
        "angular" => ProfileKind::Angular,
        "nodal" => ProfileKind::Nodal,
        "isolated" => ProfileKind::Isolated,
        other => return Err(CliError::Usage(format!("unknown profile '{other}'"))),
    };
    let lambda = if cfg.values.contains_key("lambda") { cfg.f64("lambda")? } else { 1.0 };
    let params = ProfileParams {
        sign: cfg.f64("sign")?,
        rotation: cfg.f64("rotation")?,
        lambda,
        abc: (cfg.f64("a")?, cfg.f64("b")?, cfg.f64("c")?),
    };
    Ok(homogeneous_profile(kind, params)?)
}

pub fn modes(ctx: &mut Ctx) -> Result<OutDir, CliError> {
    let omega = ctx.cfg.f64("omega")?;
    let n_max = ctx.cfg.usize("n_max")?;
    let out = OutDir::prepare(&ctx.out, vec!["modes.csv".into()], ctx.force)?;
    let ns: Vec<usize> = (1..=n_max).collect();
    let rows = par_map(&ns, ctx.jobs, |&n| -> Result<String, CliError> {
        let m = BucklingMode::new(n, omega)?;
        let norm = simpson(|t| m.derivs(t)[1].powi(2), 0.0, omega, 4096);
        Ok(format!("{n},{},{},{}\n", m.mu, norm, m.l2_norm_sq() * m.mu))
    });
    let mut s = csv_header("fbplab.modes.v1", "n,mu,norm,l2norm_mu");
    for r in rows {
        s.push_str(&r?);
    }
    out.write("modes.csv", &s)?;
    Ok(out)
}

#[derive(Serialize)]
struct ProfileSummary {
    kind: ProfileKind,
    params: ProfileParams,
    weiss_value: f64,
    support_measure: f64,
}

pub fn homog(ctx: &mut Ctx) -> Result<OutDir, CliError> {
    let p = profile(&ctx.cfg)?;
    let samples = ctx.cfg.usize("samples")?.max(2);
    let out = OutDir::prepare(&ctx.out, vec!["profile.csv".into(), "profile.json".into()], ctx.force)?;
    let mut s = csv_header("fbplab.profile.v1", "theta,b,db,d2b");
    for k in 0..samples {
        let t = TAU * k as f64 / (samples - 1) as f64;
        let [b, db, d2b] = p.angular.eval(t);
        s.push_str(&format!("{t},{b},{db},{d2b}\n"));
    }
    out.write("profile.csv", &s)?;
    out.write_json(
        "profile.json",
        &ProfileSummary {
            kind: p.kind,
            params: p.params,
            weiss_value: p.weiss_value(),
            support_measure: p.angular.support_measure(),
        },
    )?;
    Ok(out)
}

pub fn weiss(ctx: &mut Ctx) -> Result<OutDir, CliError> {
    let lambda = ctx.cfg.f64("lambda")?;
    let radii = ctx.cfg.list("radii")?;
    let field: DiskField = if ctx.cfg.str("field").is_empty() {
        let p = profile(&ctx.cfg)?;
        DiskField::from_profile(PolarGrid::uniform(ctx.cfg.usize("n_r")?, ctx.cfg.usize("n_theta")?), &p)?
    } else {
        let path = PathBuf::from(ctx.cfg.str("field"));
        ctx.inputs.push(path.clone());
        ctx.inputs.push(sidecar_path(&path));
        read_csv(&path)?
    };
    let out = OutDir::prepare(&ctx.out, vec!["weiss.csv".into()], ctx.force)?;
    let rows = par_map(&radii, ctx.jobs, |&r| weiss_breakdown(&field, r, lambda));
    let mut s = csv_header("fbplab.weiss.v1", "r,W,N,R,E_over_r2,n_prime,identity_residual");
    for b in rows {
        let b = b?;
        s.push_str(&format!(
            "{},{},{},{},{},{},{:e}\n",
            b.r,
            b.w,
            b.n,
            b.r_term,
            b.e_over_r2,
            b.n_prime_fd,
            b.identity_residual()
        ));
    }
    out.write("weiss.csv", &s)?;
    Ok(out)
}

pub fn goursat(ctx: &mut Ctx) -> Result<OutDir, CliError> {
    let radii = ctx.cfg.list("radii")?;
    let grid = PolarGrid::uniform(ctx.cfg.usize("n_r")?, ctx.cfg.usize("n_theta")?);
    let sets: Vec<GoursatCoefficients> = if ctx.cfg.str("coefficients").is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let (n_max, flat) = (ctx.cfg.usize("n_max")?, ctx.cfg.bool("center_flat")?);
        (0..ctx.cfg.usize("count")?)
            .map(|_| GoursatCoefficients::random(&mut rng, n_max, flat))
            .collect()
    } else {
        let path = PathBuf::from(ctx.cfg.str("coefficients"));
        ctx.inputs.push(path.clone());
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        vec![GoursatCoefficients::from_json(&text)?]
    };
    let out = OutDir::prepare(&ctx.out, vec!["goursat.csv".into()], ctx.force)?;
    let rows = par_map(&sets, ctx.jobs, |c| -> Result<String, CliError> {
        let f = c.to_field(grid.clone())?;
        let mut s = String::new();
        for &r in &radii {
            let w0 = c.w0(r);
            let w = weiss_w_lambda(&f, r, 0.0)?;
            s.push_str(&format!("{r},{w0},{w},{:e}", (w - w0).abs() / (1.0 + w0.abs())));
            s.push('\n');
        }
        Ok(s)
    });
    let mut s = csv_header("fbplab.goursat.v1", "set,r,w0_closed,w0_grid,rel_gap");
    for (i, r) in rows.into_iter().enumerate() {
        for line in r?.lines() {
            s.push_str(&format!("{i},{line}\n"));
        }
    }
    out.write("goursat.csv", &s)?;
    Ok(out)
}

fn mode_term(n: usize, theta: f64, amp: f64) -> Result<AngularFunction, CliError> {
    if n == 0 || amp == 0.0 {
        return Ok(AngularFunction::zero());
    }
    Ok(BucklingMode::new(n, theta)?.placed(0.0).scale(amp))
}

#[derive(Serialize)]
struct EpiOutput {
    /// 𝒢(u, 0) − Θ/2
    gap: f64,
    report: fbplab::epiperimetric::EpiReport,
}

pub fn epi(ctx: &mut Ctx) -> Result<OutDir, CliError> {
    let p = profile(&ctx.cfg)?;
    let theta = match ctx.cfg.str("theta") {
        "auto" => match p.kind {
            ProfileKind::Flat => PI,
            ProfileKind::Angular => t1(),
            ProfileKind::Nodal | ProfileKind::Isolated => TAU,
        },
        s => parse_number(s).ok_or_else(|| CliError::Usage(format!("invalid theta '{s}'")))?,
    };
    let u = p.angular.add(&mode_term(
        ctx.cfg.usize("perturb_n")?,
        theta,
        ctx.cfg.f64("perturb_amp")?,
    )?);
    let v = mode_term(ctx.cfg.usize("v_n")?, theta, ctx.cfg.f64("v_amp")?)?;
    let w = ctx.cfg.list("w_values")?;
    let w_values = match w.len() {
        0 => None,
        2 => Some((w[0], w[1])),
        _ => return Err(CliError::Usage("w_values takes two numbers".into())),
    };
    let out = OutDir::prepare(&ctx.out, vec!["epi.json".into()], ctx.force)?;
    let report = epiperimetric_report(&u, &v, theta, w_values)?;
    out.write_json(
        "epi.json",
        &EpiOutput {
            gap: report.g_u - 0.5 * theta,
            report,
        },
    )?;
    Ok(out)
}

#[derive(Serialize)]
struct SolveOutput {
    summary: fbplab::fbp_solver::SolveSummary,
    inner_radius: f64,
    support_nodes_inside: usize,
    max_abs_inside: f64,
}

pub fn solve(ctx: &mut Ctx) -> Result<OutDir, CliError> {
    let cfg = &ctx.cfg;
    let boundary = match cfg.str("boundary") {
        "radial" => BoundaryData::radial(cfg.f64("g0")?, cfg.f64("h0")?),
        "profile" => {
            let p = profile(cfg)?;
            let label = format!("{:?} profile", p.kind).to_lowercase();
            BoundaryData::from_jet(label, cfg.usize("trace_modes")?, move |r, t| p.jet(r, t))
        }
        other => return Err(CliError::Usage(format!("unknown boundary '{other}'"))),
    };
    let config = SolverConfig {
        lambda: cfg.f64("lambda")?,
        n_r: cfg.usize("n_r")?,
        n_theta: cfg.usize("n_theta")?,
        max_outer_iters: cfg.usize("max_outer_iters")?,
        support_update_rule: cfg.str("rule").parse()?,
        tol_energy: cfg.f64("tol_energy")?,
        seed: ctx.seed,
    };
    let inner = cfg.f64("inner_radius")?;
    let blow_p = cfg.list("blowup_point")?;
    let blow = match blow_p.len() {
        0 => None,
        2 => Some((blow_p[0], blow_p[1])),
        _ => return Err(CliError::Usage("blowup_point takes x,y".into())),
    };
    let blow_radii = cfg.list("blowup_radii")?;
    let blow_grid = (cfg.usize("blowup_n_r")?, cfg.usize("blowup_n_theta")?);
    let mut names = vec!["field.csv".to_string(), "field.csv.json".into(), "solve.json".into()];
    if blow.is_some() {
        names.push("blowups.csv".into());
    }
    let out = OutDir::prepare(&ctx.out, names, ctx.force)?;
    let res = minimize_energy(&boundary, &config)?;
    let blowups = match blow {
        Some(p) => Some(blow_up_sequence(&res.field, config.lambda, p, &blow_radii, blow_grid.0, blow_grid.1)?),
        None => None,
    };
    write_csv(&res.field, &out.path("field.csv"))?;
    out.write_json(
        "solve.json",
        &SolveOutput {
            summary: res.summary(&boundary),
            inner_radius: inner,
            support_nodes_inside: res.mesh.support_within(inner),
            max_abs_inside: res.mesh.max_abs_within(inner),
        },
    )?;
    if let Some(seq) = blowups {
        let mut s = csv_header("fbplab.blowups.v1", "radius,w1");
        for b in seq {
            let w = b.w1.map(|w| w.to_string()).unwrap_or_default();
            s.push_str(&format!("{},{w}\n", b.radius));
        }
        out.write("blowups.csv", &s)?;
    }
    Ok(out)
}

#[derive(Serialize)]
struct BucklingSummary {
    family: String,
    lambda1_unit_disk: f64,
    tables: Vec<TableSummary>,
    quasimin: Vec<fbplab::buckling::QuasiminReport>,
}

#[derive(Serialize)]
struct TableSummary {
    mesh: usize,
    argmin: f64,
    disk_minimal: bool,
    /// spread of t²Λ₁(tΩ) relative to its mean, star family only
    scale_spread: Option<f64>,
}

pub fn buckling(ctx: &mut Ctx) -> Result<OutDir, CliError> {
    let cfg = &ctx.cfg;
    let meshes: Vec<usize> = cfg
        .str("meshes")
        .split(',')
        .map(|m| m.trim().parse().map_err(|_| CliError::Usage(format!("invalid mesh '{m}'"))))
        .collect::<Result<_, _>>()?;
    let family_name = cfg.str("family").to_string();
    let family: Vec<(f64, PlateDomain)> = match family_name.as_str() {
        "ellipse" => ellipse_family(&cfg.list("ratios")?)?,
        "star" => {
            let c = cfg.list("star_modes")?;
            if c.len() % 2 != 0 {
                return Err(CliError::Usage("star_modes needs pairs a_k,b_k".into()));
            }
            let modes: Vec<(f64, f64)> = c.chunks(2).map(|p| (p[0], p[1])).collect();
            let star = PlateDomain::star(cfg.f64("r0")?, &modes)?;
            cfg.list("scales")?
                .into_iter()
                .map(|t| Ok((t, star.scaled(t)?)))
                .collect::<Result<_, fbplab::Error>>()?
        }
        other => return Err(CliError::Usage(format!("unknown family '{other}'"))),
    };
    let q_radii = cfg.list("quasimin_radii")?;
    let q_points: Vec<(f64, f64)> = cfg
        .str("quasimin_points")
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let v: Vec<f64> = s.split(',').filter_map(parse_number).collect();
            match v.as_slice() {
                [x, y] => Ok((*x, *y)),
                _ => Err(CliError::Usage(format!("invalid point '{s}'"))),
            }
        })
        .collect::<Result<_, _>>()?;
    let amp = cfg.f64("quasimin_amplitude")?;
    let mut names: Vec<String> = meshes.iter().map(|m| format!("scan_mesh{m}.csv")).collect();
    names.push("buckling.json".into());
    let out = OutDir::prepare(&ctx.out, names, ctx.force)?;

    let scans: Vec<ScanTable> = meshes
        .iter()
        .map(|&m| disk_optimality_scan(&family, m, ctx.jobs))
        .collect::<Result<_, _>>()?;
    let mut tables = Vec::new();
    for (&m, t) in meshes.iter().zip(&scans) {
        let scale_spread = (family_name == "star").then(|| {
            let v: Vec<f64> = t.rows.iter().map(|r| r.family_param.powi(2) * r.lambda1).collect();
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max) / mean
        });
        tables.push(TableSummary {
            mesh: m,
            argmin: t.argmin,
            disk_minimal: t.disk_minimal,
            scale_spread,
        });
    }
    let mut quasimin = Vec::new();
    if !q_radii.is_empty() {
        let eig = lambda1_numeric(&PlateDomain::disk(1.0)?, meshes.first().copied().unwrap_or(128))?;
        for p in &q_points {
            quasimin.extend(quasiminimality_sweep(&eig, *p, &q_radii, amp)?);
        }
    }
    for (&m, t) in meshes.iter().zip(&scans) {
        out.write(&format!("scan_mesh{m}.csv"), &t.to_csv())?;
    }
    out.write_json(
        "buckling.json",
        &BucklingSummary {
            family: family_name,
            lambda1_unit_disk: lambda1_disk(1e-14)?,
            tables,
            quasimin,
        },
    )?;
    Ok(out)
}
