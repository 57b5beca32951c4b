use std::collections::BTreeMap;
use std::path::Path;

use lagtop::discriminant::{
    a3_isolated_check, classify_special_points, component_membership, sample_delta_c, sample_g2_branch, BranchSample,
    IsolationFamily, IsolationReport, Membership, StratumPoint, DISC_TOL,
};
use lagtop::periods::{action_i1, action_i1_cubic, residue_check};
use lagtop::spectral::{identity_residual, levels_from_spectral, spectral_from_levels, spectral_from_state, SpectralCoeffs};
use lagtop::topsys::{first_integrals, integrate, write_trajectory_csv, Integrals, LevelVector, TopState};
use lagtop::tracking::{
    gamma_sub_basis_g2, monodromy_actions_g1_with, monodromy_with, named_loop, named_loop_at,
    picard_lefschetz_route_with, Chart, MonodromyResult, ParameterLoop, VanishingData, ROUNDING_THRESHOLD,
    TRANSPORT_TOL,
};
use lagtop::Exec;
use serde::Serialize;

use crate::config::{parse_list, parse_points, resolve_tol, FileConfig};
use crate::error::CliError;
use crate::{
    ActionsArgs, Cli, Command, DiscriminantArgs, MonodromyArgs, SimulateArgs, SpectralArgs, StateArgs, SCHEMA_VERSION,
};

type Tolerances = BTreeMap<&'static str, f64>;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    tolerances: Tolerances,
    #[serde(flatten)]
    body: T,
}

struct Ctx {
    file: FileConfig,
    out: Option<std::path::PathBuf>,
    tol: Option<f64>,
    exec: Exec,
}

impl Ctx {
    fn tol(&self, default: f64) -> Result<f64, CliError> {
        resolve_tol(self.tol, self.file.tol, default)
    }

    fn emit<T: Serialize>(&self, command: &str, tolerances: Tolerances, body: T) -> Result<(), CliError> {
        let doc = Envelope { schema_version: SCHEMA_VERSION, command, tolerances, body };
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))? + "\n";
        write_text(self.out.as_deref(), &text)
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn list_flag(flag: &Option<String>, file: &Option<Vec<f64>>, what: &str) -> Result<Option<Vec<f64>>, CliError> {
    match flag {
        Some(s) => parse_list(s).map(Some).map_err(|e| CliError::Usage(format!("--{what}: {e}"))),
        None => Ok(file.clone()),
    }
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let sequential = cli.sequential || file.sequential.unwrap_or(false);
    let out = cli.out.or_else(|| file.out.clone().map(Into::into));
    let ctx = Ctx { exec: if sequential { Exec::Sequential } else { Exec::Parallel }, tol: cli.tol, out, file };
    match &cli.command {
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Invariants(a) => invariants(&ctx, a),
        Command::Spectral(a) => spectral(&ctx, a),
        Command::Discriminant(a) => discriminant(&ctx, a),
        Command::Monodromy(a) => monodromy(&ctx, a),
        Command::Actions(a) => actions(&ctx, a),
    }
}

fn top_state(ctx: &Ctx, a: &StateArgs) -> Result<TopState, CliError> {
    let x = list_flag(&a.state, &ctx.file.state, "state")?.ok_or_else(|| CliError::Usage("--state is required".into()))?;
    if x.len() < 3 || x.len() % 3 != 0 {
        return Err(CliError::Usage(format!("--state needs 3 + 3g numbers, got {}", x.len())));
    }
    let g = a.g.or(ctx.file.g).unwrap_or(x.len() / 3 - 1);
    if x.len() != 3 + 3 * g {
        return Err(CliError::Usage(format!("--state needs {} numbers for g = {g}, got {}", 3 + 3 * g, x.len())));
    }
    let m = a.m.or(ctx.file.m).unwrap_or(0.0);
    let omega = [x[0], x[1], x[2]];
    let gamma = x[3..].chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
    TopState::new(g, m, omega, gamma).map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Serialize)]
struct DriftReport {
    g: usize,
    m: f64,
    t: f64,
    dt: f64,
    samples: usize,
    drift: Vec<f64>,
    max_drift: f64,
    conserved: bool,
}

fn simulate(ctx: &Ctx, a: &SimulateArgs) -> Result<(), CliError> {
    let s0 = top_state(ctx, &a.state)?;
    let t = a.t.or(ctx.file.t).unwrap_or(10.0);
    let dt = a.dt.or(ctx.file.dt).unwrap_or(1e-3);
    let every = a.sample_every.or(ctx.file.sample_every).unwrap_or(100);
    let tol = ctx.tol(1e-8)?;
    let traj = integrate(&s0, t, dt, every).map_err(CliError::numeric)?;
    let mut buf = Vec::new();
    write_trajectory_csv(&traj, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    write_text(ctx.out.as_deref(), &String::from_utf8(buf).expect("ascii"))?;
    let max_drift = traj.drift.iter().copied().fold(0.0, f64::max);
    let report = DriftReport {
        g: s0.g,
        m: s0.m,
        t,
        dt,
        samples: traj.states.len(),
        drift: traj.drift.clone(),
        max_drift,
        conserved: max_drift < tol,
    };
    let doc = Envelope { schema_version: SCHEMA_VERSION, command: "simulate", tolerances: [("drift_tol", tol)].into(), body: report };
    let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    match a.report.clone().or_else(|| ctx.file.report.clone().map(Into::into)) {
        Some(p) => write_text(Some(&p), &text),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct InvariantsBody {
    g: usize,
    m: f64,
    state: TopState,
    integrals: Integrals,
}

fn invariants(ctx: &Ctx, a: &StateArgs) -> Result<(), CliError> {
    let s = top_state(ctx, a)?;
    let integrals = first_integrals(&s);
    ctx.emit("invariants", Tolerances::new(), InvariantsBody { g: s.g, m: s.m, integrals, state: s })
}

#[derive(Serialize)]
struct SpectralBody {
    source: &'static str,
    g: usize,
    coefficients: Vec<f64>,
    levels: LevelVector,
    identity_residual: Option<f64>,
    identity_ok: Option<bool>,
    component: Option<Membership>,
}

fn spectral(ctx: &Ctx, a: &SpectralArgs) -> Result<(), CliError> {
    let levels = list_flag(&a.levels, &ctx.file.levels, "levels")?;
    let params = list_flag(&a.parameters, &ctx.file.parameters, "parameters")?;
    let has_state = a.state.state.is_some() || ctx.file.state.is_some();
    let given = [has_state, levels.is_some(), params.is_some()].iter().filter(|&&b| b).count();
    if given != 1 {
        return Err(CliError::Usage("give exactly one of --state, --levels, --parameters".into()));
    }
    let tol = ctx.tol(1e-12)?;
    let m = a.state.m.or(ctx.file.m).unwrap_or(0.0);
    let even = |v: &[f64], what: &str| {
        if v.len() >= 2 && v.len() % 2 == 0 {
            Ok(())
        } else {
            Err(CliError::Usage(format!("--{what} needs an even number (at least 2) of values")))
        }
    };
    let (source, f, lv, residual) = if has_state {
        let s = top_state(ctx, &a.state)?;
        let f = spectral_from_state(&s);
        (("state"), f, first_integrals(&s).levels, Some(identity_residual(&s)))
    } else if let Some(h) = levels {
        even(&h, "levels")?;
        let lv = LevelVector { g: h.len() / 2 - 1, m, values: h };
        ("levels", spectral_from_levels(&lv), lv, None)
    } else {
        let p = params.expect("checked above");
        even(&p, "parameters")?;
        let f = SpectralCoeffs::new(p);
        let lv = levels_from_spectral(&f, m);
        ("parameters", f, lv, None)
    };
    let component = if f.g == 1 { component_membership(&f).ok() } else { None };
    let body = SpectralBody {
        source,
        g: f.g,
        coefficients: f.a.clone(),
        levels: lv,
        identity_ok: residual.map(|r| r < tol),
        identity_residual: residual,
        component,
    };
    ctx.emit("spectral", [("identity_tol", tol), ("disc_tol", DISC_TOL)].into(), body)
}

#[derive(Serialize)]
struct DiscriminantBody {
    c: f64,
    special_points: Vec<StratumPoint>,
    section_samples: usize,
    section_csv: Option<String>,
    g2_branch: Option<Vec<BranchSample>>,
    isolation: Option<Vec<IsolationReport>>,
}

fn discriminant(ctx: &Ctx, a: &DiscriminantArgs) -> Result<(), CliError> {
    let f = &ctx.file;
    let c = a.c.or(f.c).unwrap_or(0.0);
    let (u0, u1) = (a.u_min.or(f.u_min).unwrap_or(-3.0), a.u_max.or(f.u_max).unwrap_or(3.0));
    let n = a.samples.or(f.samples).unwrap_or(200);
    if n < 2 || u0 >= u1 {
        return Err(CliError::Usage("need --samples >= 2 and --u-min < --u-max".into()));
    }
    let us: Vec<f64> = (0..n).map(|k| u0 + (u1 - u0) * k as f64 / (n - 1) as f64).collect();
    let samples = sample_delta_c(c, &us);
    let csv_path = a.csv.clone().or_else(|| f.csv.clone().map(Into::into));
    if let Some(p) = &csv_path {
        let mut w = csv::Writer::from_path(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        for s in &samples {
            w.serialize(s).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::io(p, e))?;
    }
    let c2 = list_flag(&a.c2, &f.c2, "c2")?;
    let g2_branch = c2.map(|v| [1.0, -1.0].iter().flat_map(|&s| sample_g2_branch(&v, s)).collect());
    let radius = a.isolation_radius.or(f.isolation_radius);
    let grid = a.grid.or(f.grid).unwrap_or(100);
    let isolation = radius.map(|r| {
        [IsolationFamily::QuarticPencil, IsolationFamily::AffineShift]
            .into_iter()
            .map(|fam| a3_isolated_check(r, grid, fam, ctx.exec))
            .collect()
    });
    let body = DiscriminantBody {
        c,
        special_points: classify_special_points(c),
        section_samples: samples.len(),
        section_csv: csv_path.map(|p| p.display().to_string()),
        g2_branch,
        isolation,
    };
    ctx.emit("discriminant", [("disc_tol", DISC_TOL)].into(), body)
}

#[derive(Serialize)]
struct LoopInfo {
    name: String,
    genus: usize,
    orientation: i32,
    base: Vec<f64>,
}

#[derive(Serialize)]
struct MonodromyBody {
    route: String,
    basis: String,
    #[serde(rename = "loop")]
    loop_info: LoopInfo,
    result: MonodromyResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    period_result: Option<MonodromyResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vanishing: Option<Vec<VanishingData>>,
}

fn build_loop(ctx: &Ctx, a: &MonodromyArgs) -> Result<ParameterLoop, CliError> {
    let f = &ctx.file;
    let name = a.loop_name.clone().or_else(|| f.loop_name.clone());
    let waypoints = match &a.waypoints {
        Some(s) => Some(parse_points(s).map_err(|e| CliError::Usage(format!("--waypoints: {e}")))?),
        None => f.waypoints.clone(),
    };
    let base = list_flag(&a.base, &f.base, "base")?;
    let g = a.g.or(f.g);
    let mut lp = match (name, waypoints) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --loop or --waypoints, not both".into())),
        (None, None) => return Err(CliError::Usage("one of --loop or --waypoints is required".into())),
        (Some(name), None) => {
            let lp = match &base {
                Some(b) => named_loop_at(&name, b),
                None => named_loop(&name),
            };
            lp.ok_or_else(|| CliError::Usage(format!("unknown loop {name:?} or base point not of length 3")))?
        }
        (None, Some(pts)) => {
            if base.is_some() {
                return Err(CliError::Usage("--base only applies to named loops".into()));
            }
            let g = g.ok_or_else(|| CliError::Usage("--g is required with --waypoints".into()))?;
            let dim = pts.first().map_or(0, Vec::len);
            if pts.len() < 3 || pts.iter().any(|p| p.len() != dim) {
                return Err(CliError::Usage("--waypoints needs at least 3 points of equal length".into()));
            }
            let chart = match (g, dim) {
                (1, 3) => Chart::G1Reduced,
                (2, 3) => Chart::G2Reduced,
                (g, d) if d == 2 * g + 2 => Chart::Full { g },
                _ => return Err(CliError::Usage(format!("waypoints of length {dim} do not fit g = {g}"))),
            };
            let lp = ParameterLoop::polyline(chart, &pts, 1, Some("waypoints".into()));
            if !lp.is_closed() {
                return Err(CliError::Usage("--waypoints must end where they start".into()));
            }
            lp
        }
    };
    if let Some(o) = a.orientation.or(f.orientation) {
        if o != 1 && o != -1 {
            return Err(CliError::Usage("--orientation must be 1 or -1".into()));
        }
        lp.orientation = o;
    }
    if let Some(g) = g {
        if g != lp.genus() {
            return Err(CliError::Usage(format!("loop has genus {}, but --g {g} was given", lp.genus())));
        }
    }
    Ok(lp)
}

fn monodromy(ctx: &Ctx, a: &MonodromyArgs) -> Result<(), CliError> {
    let lp = build_loop(ctx, a)?;
    let g = lp.genus();
    let tol = ctx.tol(TRANSPORT_TOL)?;
    let route = a.route.clone().or_else(|| ctx.file.route.clone()).unwrap_or_else(|| "periods".into());
    let mut basis = a.basis.clone().or_else(|| ctx.file.basis.clone()).unwrap_or_else(|| "auto".into());
    if basis == "auto" {
        basis = match g {
            1 => "actions",
            2 => "gamma",
            _ => "periods",
        }
        .into();
    }
    let extended = match basis.as_str() {
        "actions" if g == 1 => true,
        "gamma" if g == 2 => false,
        "periods" => false,
        "extended" => true,
        "actions" | "gamma" => return Err(CliError::Usage(format!("basis {basis:?} is not available for g = {g}"))),
        _ => return Err(CliError::Usage(format!("unknown basis {basis:?}"))),
    };
    let (raw, vanishing) = match route.as_str() {
        "periods" if basis == "actions" => (monodromy_actions_g1_with(&lp, tol, ctx.exec), None),
        "periods" => (monodromy_with(&lp, extended, tol, ctx.exec), None),
        "picard-lefschetz" if basis == "actions" => {
            return Err(CliError::Usage("the actions basis is only computed on the periods route".into()))
        }
        "picard-lefschetz" => match picard_lefschetz_route_with(&lp, extended) {
            Ok((r, v)) => (Ok(r), Some(v)),
            Err(e) => (Err(e), None),
        },
        _ => return Err(CliError::Usage(format!("unknown route {route:?}"))),
    };
    let raw = raw.map_err(CliError::numeric)?;
    let (result, period_result) = if basis == "gamma" {
        let sub = gamma_sub_basis_g2(&raw.matrix, [0, 1, 2]).map_err(CliError::numeric)?;
        let r = MonodromyResult {
            basis: vec!["gamma1".into(), "gamma3".into(), "gamma_inf".into()],
            matrix: sub,
            ..raw.clone()
        };
        (r, Some(raw))
    } else {
        (raw, None)
    };
    let loop_info = LoopInfo { name: result.name.clone(), genus: g, orientation: lp.orientation, base: lp.base() };
    let body = MonodromyBody { route, basis, loop_info, result, period_result, vanishing };
    ctx.emit("monodromy", [("transport_tol", tol), ("rounding_threshold", ROUNDING_THRESHOLD)].into(), body)
}

#[derive(Serialize)]
struct ActionsBody {
    parameters: [f64; 3],
    big_a: f64,
    i1: f64,
    i2: f64,
    i3: f64,
    i1_cubic: f64,
    cross_check_residual: f64,
    residue_residual: f64,
    consistent: bool,
}

fn actions(ctx: &Ctx, a: &ActionsArgs) -> Result<(), CliError> {
    let p = list_flag(&a.parameters, &ctx.file.parameters, "parameters")?
        .ok_or_else(|| CliError::Usage("--parameters a1,a2,a3 is required".into()))?;
    let p: [f64; 3] = p.try_into().map_err(|_| CliError::Usage("--parameters needs exactly 3 values".into()))?;
    let big_a = a.big_a.or(ctx.file.big_a).unwrap_or(1.0);
    let tol = ctx.tol(1e-8)?;
    let i1 = action_i1(p, big_a).map_err(CliError::numeric)?;
    let i1_cubic = action_i1_cubic(p, big_a).map_err(CliError::numeric)?;
    let residue_residual = residue_check(&[p[0], p[1], p[2], 1.0]).map_err(CliError::numeric)?;
    let cross = (i1 - i1_cubic).abs();
    let body = ActionsBody {
        parameters: p,
        big_a,
        i1,
        i2: big_a * p[0] / 2.0,
        i3: big_a * p[2] / 2.0,
        i1_cubic,
        cross_check_residual: cross,
        residue_residual,
        consistent: cross < tol && residue_residual < tol,
    };
    ctx.emit("actions", [("cross_check_tol", tol)].into(), body)
}
