//! Subcommand implementations. Each returns a [`Report`] or an error message.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use cutlocus::cutlocus::{
    injectivity_check, s_function, CutSample, ModelSpace, Point, SubmanifoldSpec, UnitNormal,
};
use cutlocus::flow::{sample_trajectory, FlowKind};
use cutlocus::upq::{self, Signature, UpqElement};
use cutlocus::verify::{self, CheckResult, VerifyConfig};
use cutlocus::{leftinv, matfun, orthodist, random, ComplexMatrix, MatrixJson, RealMatrix};
use serde_json::json;

use crate::output::{matrix_trajectory_report, num, trajectory_report, Format, Record, Report};
use crate::{FlowArgs, RunConfig, Sig, Target};

type CmdResult<T> = Result<T, String>;

fn err(e: cutlocus::Error) -> String {
    e.to_string()
}

/// Reads a matrix JSON document from a file, or stdin for `-`.
fn read_matrix_json(path: &Path) -> CmdResult<MatrixJson> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| format!("stdin: {e}"))?;
    } else {
        let f = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
        BufReader::new(f)
            .read_to_string(&mut text)
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    serde_json::from_str(&text)
        .map_err(|e| format!("{}: malformed matrix JSON: {e}", path.display()))
}

fn read_real(path: &Path) -> CmdResult<RealMatrix> {
    read_matrix_json(path)?.to_real().map_err(err)
}

fn read_complex(path: &Path) -> CmdResult<ComplexMatrix> {
    read_matrix_json(path)?.to_complex().map_err(err)
}

fn require_square(a: &RealMatrix) -> CmdResult<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(err(cutlocus::Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        }))
    }
}

pub fn nearest_orth(path: &Path) -> CmdResult<Report> {
    let a = read_real(path)?;
    require_square(&a)?;
    let q = orthodist::nearest_orthogonal(&a).map_err(err)?;
    let d2 = orthodist::dist_sq_to_on(&a).map_err(err)?;
    let rank = matfun::svd(&a).rank();
    Ok(Record::new()
        .real_matrix("nearest", &q)
        .scalar("dist_sq", d2)
        .scalar("distance", d2.max(0.0).sqrt())
        .count("rank", rank)
        .flag("unique", rank == a.nrows())
        .into_report())
}

pub fn dist_on(path: &Path) -> CmdResult<Report> {
    let a = read_real(path)?;
    require_square(&a)?;
    let d2 = orthodist::dist_sq_to_on(&a).map_err(err)?;
    let rank = matfun::svd(&a).rank();
    let differentiable = rank == a.nrows();
    let mut rec = Record::new()
        .scalar("dist_sq", d2)
        .scalar("distance", d2.max(0.0).sqrt())
        .count("rank", rank)
        .flag("differentiable", differentiable);
    if differentiable {
        rec = rec.real_matrix("gradient", &orthodist::grad_dist_sq(&a).map_err(err)?);
    }
    Ok(rec.into_report())
}

fn matrix_path(
    path: &Path,
    grid: &[f64],
    f: impl Fn(&RealMatrix, f64) -> cutlocus::Result<RealMatrix>,
) -> CmdResult<Report> {
    let a = read_real(path)?;
    require_square(&a)?;
    let mats = grid
        .iter()
        .map(|&t| f(&a, t))
        .collect::<cutlocus::Result<Vec<_>>>()
        .map_err(err)?;
    Ok(matrix_trajectory_report(grid, &mats))
}

pub fn flow_on(path: &Path, grid: &[f64]) -> CmdResult<Report> {
    matrix_path(path, grid, orthodist::flow_closed_form)
}

pub fn retraction(path: &Path, grid: &[f64]) -> CmdResult<Report> {
    matrix_path(path, grid, orthodist::linear_retraction)
}

pub fn leftinv_dist(path: &Path) -> CmdResult<Report> {
    let a = read_real(path)?;
    let r = leftinv::dist_to_son_report(&a).map_err(err)?;
    Ok(Record::new()
        .scalar("distance", r.distance)
        .scalar("dist_sq", r.distance * r.distance)
        .scalar("sigma_min", r.sigma_min)
        .into_report())
}

pub fn leftinv_geodesic(path: &Path, grid: &[f64]) -> CmdResult<Report> {
    matrix_path(path, grid, leftinv::geodesic_to_son)
}

fn upq_input(path: &Path, sig: Sig) -> CmdResult<(ComplexMatrix, Signature)> {
    let m = read_complex(path)?;
    let sig = Signature::new(sig.0, sig.1).map_err(err)?;
    if m.shape() != (sig.n(), sig.n()) {
        return Err(format!(
            "matrix is {}x{} but the signature needs {}x{}",
            m.nrows(),
            m.ncols(),
            sig.n(),
            sig.n()
        ));
    }
    Ok((m, sig))
}

pub fn upq_check(path: &Path, sig: Sig) -> CmdResult<Report> {
    let (m, sig) = upq_input(path, sig)?;
    let mem = upq::is_upq(&m, sig, upq::GROUP_TOL).map_err(err)?;
    Ok(Record::new()
        .flag("member", mem.member)
        .scalar("residual", mem.residual)
        .scalar("tolerance", upq::GROUP_TOL)
        .into_report())
}

pub fn upq_decompose(path: &Path, sig: Sig) -> CmdResult<Report> {
    let (m, sig) = upq_input(path, sig)?;
    let a = UpqElement::new(m, sig).map_err(err)?;
    let polar = upq::polar_upq(&a).map_err(err)?;
    let recon = (polar.u.mat() * matfun::exp_hermitian(&polar.y).map_err(err)? - a.mat()).norm();
    let mut rec = Record::new()
        .complex_matrix("u", polar.u.mat())
        .complex_matrix("y", &polar.y)
        .scalar("polar_residual", recon)
        .scalar("dist_sq", upq::dist_sq_upq(&a).map_err(err)?);
    rec = match upq::exp_surjectivity_roundtrip(&a) {
        Ok(r) => rec
            .complex_matrix("z", &r.z)
            .scalar("exp_residual", r.reconstruction_residual),
        Err(e) => rec.text("z_error", &e.to_string()),
    };
    Ok(rec.into_report())
}

pub fn upq_dist(path: &Path, sig: Sig) -> CmdResult<Report> {
    let (m, sig) = upq_input(path, sig)?;
    let a = UpqElement::new(m, sig).map_err(err)?;
    let d2 = upq::dist_sq_upq(&a).map_err(err)?;
    Ok(Record::new()
        .scalar("dist_sq", d2)
        .scalar("distance", d2.max(0.0).sqrt())
        .into_report())
}

fn parse_sphere_point(n: usize, coords: &[f64]) -> CmdResult<Point> {
    if coords.len() != n + 1 {
        return Err(format!(
            "a point of S^{n} needs {} coordinates, got {}",
            n + 1,
            coords.len()
        ));
    }
    let p = Point::from_column_slice(coords);
    let norm = p.norm();
    if !norm.is_finite() || norm < 1e-12 {
        return Err("point must be a finite nonzero vector".into());
    }
    Ok(p / norm)
}

/// Resolves a target into its model space and submanifold.
pub fn geometry(target: &Target) -> CmdResult<(ModelSpace, SubmanifoldSpec)> {
    let (model, sub) = match target {
        Target::SpherePoint { n, p } => {
            if *n == 0 {
                return Err("sphere dimension must be at least 1".into());
            }
            let p = match p {
                Some(c) => parse_sphere_point(*n, c)?,
                None => Point::from_fn(n + 1, |i, _| if i == 0 { 1.0 } else { 0.0 }),
            };
            (
                ModelSpace::RoundSphere { n: *n },
                SubmanifoldSpec::SpherePoint { p },
            )
        }
        Target::Equator { n, k } => (
            ModelSpace::RoundSphere { n: *n },
            SubmanifoldSpec::Equator { k: *k },
        ),
        Target::Clifford => (
            ModelSpace::RoundSphere { n: 3 },
            SubmanifoldSpec::LinkedCircles,
        ),
        Target::Ellipse { a, b } => (
            ModelSpace::EuclideanPlane,
            SubmanifoldSpec::Ellipse { a: *a, b: *b },
        ),
    };
    sub.validate(model).map_err(err)?;
    Ok((model, sub))
}

fn target_json(model: ModelSpace, sub: &SubmanifoldSpec) -> serde_json::Value {
    let submanifold = match sub {
        SubmanifoldSpec::SpherePoint { p } => json!({ "kind": "sphere-point", "p": p.as_slice() }),
        SubmanifoldSpec::Equator { k } => json!({ "kind": "equator", "k": k }),
        SubmanifoldSpec::LinkedCircles => json!({ "kind": "clifford" }),
        SubmanifoldSpec::Ellipse { a, b } => json!({ "kind": "ellipse", "a": a, "b": b }),
    };
    json!({ "model": model, "submanifold": submanifold })
}

/// Unit normals for `cut`: a uniform angle grid through the vertices for the
/// ellipse, seeded random draws otherwise.
fn cut_normals(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    count: usize,
    seed: u64,
) -> CmdResult<Vec<UnitNormal>> {
    if count == 0 {
        return Err("--normals must be at least 1".into());
    }
    match sub {
        SubmanifoldSpec::Ellipse { a, b } => {
            let m = count.div_ceil(4) * 4;
            (0..m)
                .map(|i| {
                    UnitNormal::ellipse_inward(*a, *b, std::f64::consts::TAU * i as f64 / m as f64)
                        .map_err(err)
                })
                .collect()
        }
        _ => {
            let mut r = random::rng(seed);
            Ok((0..count)
                .map(|_| sub.sample_unit_normal(model, &mut r))
                .collect())
        }
    }
}

pub fn cut(
    target: &Target,
    normals: usize,
    injectivity: bool,
    cfg: &RunConfig,
) -> CmdResult<Report> {
    let (model, sub) = geometry(target)?;
    let dim = model.ambient_dim();
    let samples: Vec<CutSample> = cut_normals(model, &sub, normals, cfg.seed)?
        .iter()
        .map(|v| s_function(model, &sub, v, cfg.tol))
        .collect::<cutlocus::Result<_>>()
        .map_err(err)?;

    let coords = |prefix: &'static str| (0..dim).map(move |i| format!("{prefix}{i}"));
    let header = std::iter::once("index".to_string())
        .chain(coords("base"))
        .chain(coords("dir"))
        .chain([
            "s_value".to_string(),
            "cause".to_string(),
            "focal_time".to_string(),
        ])
        .chain(coords("cut"))
        .collect();
    let rows = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            std::iter::once(i.to_string())
                .chain(s.normal.base.iter().copied().map(num))
                .chain(s.normal.dir.iter().copied().map(num))
                .chain([
                    num(s.s_value),
                    s.cause.as_str().to_string(),
                    s.focal_time.map(num).unwrap_or_default(),
                ])
                .chain(s.cut_point.iter().copied().map(num))
                .collect()
        })
        .collect();

    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.s_value), hi.max(s.s_value))
        });
    let entries: Vec<_> = samples
        .iter()
        .map(|s| {
            json!({
                "base": s.normal.base.as_slice(),
                "dir": s.normal.dir.as_slice(),
                "s_value": s.s_value,
                "cause": s.cause.as_str(),
                "focal_time": s.focal_time,
                "cut_point": s.cut_point.as_slice(),
                "bracket_width": s.bracket_width,
            })
        })
        .collect();
    let mut doc = target_json(model, &sub);
    doc["tol"] = json!(cfg.tol);
    doc["seed"] = json!(cfg.seed);
    doc["s_min"] = json!(lo);
    doc["s_max"] = json!(hi);
    doc["samples"] = json!(entries);

    if injectivity {
        let rep = injectivity_check(model, &sub, cfg.samples, cfg.seed, cfg.tol).map_err(err)?;
        if cfg.format.unwrap_or(Format::Csv) == Format::Csv {
            eprintln!(
                "injectivity: {} samples, {} pairs, {} collisions, min separation {:e}",
                rep.samples, rep.pairs_checked, rep.collisions, rep.min_image_separation
            );
        }
        doc["injectivity"] = serde_json::to_value(&rep).expect("serializable");
    }
    Ok(Report {
        json: doc,
        header,
        rows,
    })
}

pub fn flow(args: &FlowArgs, kind: FlowKind, cfg: &RunConfig) -> CmdResult<Report> {
    let (model, sub) = geometry(&args.target)?;
    if args.point.is_empty() {
        return Err("--point is required".into());
    }
    let q = match model {
        ModelSpace::RoundSphere { n } => parse_sphere_point(n, &args.point)?,
        ModelSpace::EuclideanPlane => {
            if args.point.len() != 2 || args.point.iter().any(|x| !x.is_finite()) {
                return Err("a point of the plane needs 2 finite coordinates".into());
            }
            Point::from_column_slice(&args.point)
        }
    };
    let default = match kind {
        FlowKind::ToSubmanifold => "0:2:21",
        FlowKind::ToCutLocus => "0:1:11",
    };
    let grid = match &args.t_grid {
        Some(g) => g.0.clone(),
        None => {
            default
                .parse::<crate::TimeGrid>()
                .expect("valid default grid")
                .0
        }
    };
    let tr = sample_trajectory(model, &sub, &q, &grid, kind, cfg.tol).map_err(err)?;
    Ok(trajectory_report(&tr))
}

fn verify_config(cfg: &RunConfig) -> VerifyConfig {
    VerifyConfig {
        seed: cfg.seed,
        tol: cfg.tol,
        samples: cfg.samples,
    }
}

/// Runs every check. Stdout content depends only on the inputs; timings go to stderr.
pub fn verify_all(cfg: &RunConfig) -> CmdResult<(Vec<u8>, ExitCode)> {
    let vcfg = verify_config(cfg);
    let mut results: Vec<CheckResult> = Vec::new();
    let total = Instant::now();
    for (id, name) in verify::check_names() {
        let r = verify::run_check(id, &vcfg).expect("listed check exists");
        eprintln!(
            "[{:>2}] {:<40} {} {:>8.2}s (budget {}s)",
            id,
            name,
            if r.passed { "PASS" } else { "FAIL" },
            r.elapsed.as_secs_f64(),
            r.budget_secs
        );
        results.push(r);
    }
    eprintln!("total {:.2}s", total.elapsed().as_secs_f64());

    let failed = results.iter().filter(|r| !r.passed).count();
    let out = match cfg.format {
        None => verify_table(&results, cfg),
        Some(Format::Json) => {
            let mut v = serde_json::to_vec_pretty(&json!({
                "seed": cfg.seed,
                "tol": cfg.tol,
                "samples": cfg.samples,
                "passed": failed == 0,
                "checks": results,
            }))
            .expect("serializable");
            v.push(b'\n');
            v
        }
        Some(Format::Csv) => {
            let report = Report {
                json: json!(null),
                header: ["id", "name", "status", "budget_secs", "detail"]
                    .map(String::from)
                    .to_vec(),
                rows: results
                    .iter()
                    .map(|r| {
                        vec![
                            r.id.to_string(),
                            r.name.to_string(),
                            status(r).to_string(),
                            num(r.budget_secs),
                            r.detail.clone(),
                        ]
                    })
                    .collect(),
            };
            let mut buf = Vec::new();
            report
                .write(Format::Csv, &mut buf)
                .map_err(|e| e.to_string())?;
            buf
        }
    };
    Ok((
        out,
        if failed == 0 {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        },
    ))
}

fn status(r: &CheckResult) -> &'static str {
    if r.passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verify_table(results: &[CheckResult], cfg: &RunConfig) -> Vec<u8> {
    let width = results
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(4)
        .max(5);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "verify all (seed {}, tol {:e}, samples {})",
        cfg.seed, cfg.tol, cfg.samples
    );
    let _ = writeln!(
        s,
        "{:>2}  {:<width$}  {:<6}  detail",
        "id", "check", "status"
    );
    for r in results {
        let _ = writeln!(
            s,
            "{:>2}  {:<width$}  {:<6}  {}",
            r.id,
            r.name,
            status(r),
            r.detail
        );
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let _ = writeln!(s, "{passed}/{} checks passed", results.len());
    s.into_bytes()
}

pub fn verify_list(cfg: &RunConfig) -> CmdResult<Vec<u8>> {
    let names = verify::check_names();
    Ok(match cfg.format {
        Some(Format::Json) => {
            let v: Vec<_> = names
                .iter()
                .map(|(id, name)| json!({ "id": id, "name": name }))
                .collect();
            let mut buf = serde_json::to_vec_pretty(&v).expect("serializable");
            buf.push(b'\n');
            buf
        }
        _ => names
            .iter()
            .map(|(id, name)| format!("{id:>2}  {name}\n"))
            .collect::<String>()
            .into_bytes(),
    })
}
