use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use kfun::io::{read_graph, read_pattern, read_state};
use kfun::scenarios::{evaluate, grid, write_csv};
use kfun::{
    apply_uniform_loss, cat_bell, herald, pattern_probability, subtract, sweep, CMatrix,
    GaussianPureState, GraphSpec, KKernel, Method, PhotonPattern, Scenario,
};
use serde_json::{json, Map, Value};

use crate::{
    Command, MethodArg, OutArgs, PatternArgs, PointArgs, ScenarioCommand, StateArgs, StateKind,
    SweepMethod, SweepScenario, TargetArgs,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(kfun::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl From<kfun::Error> for CliError {
    fn from(e: kfun::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Kfunc { state, at, out } => kfunc(&state, at.as_deref(), &out),
        Command::Subtract {
            state,
            m,
            tau,
            target,
            out,
        } => subtract_cmd(&state, &m, &tau, &target, &out),
        Command::Gbs {
            state,
            pattern,
            loss,
            out,
        } => gbs(&state, &pattern, loss, &out),
        Command::Herald {
            state,
            pattern,
            fock_max,
            target,
            out,
        } => herald_cmd(&state, &pattern, fock_max, &target, &out),
        Command::Scenario { which } => match which {
            ScenarioCommand::Five { point, pgamma, out } => scenario_five(&point, pgamma, &out),
            ScenarioCommand::Compare { point, out } => scenario_compare(&point, &out),
        },
        Command::Sweep {
            scenario,
            qgamma,
            grid,
            tau_grid,
            method,
            out,
        } => sweep_cmd(scenario, qgamma, &grid, tau_grid.as_deref(), method, &out),
    }
}

fn emit(out: &OutArgs, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &out.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            // A closed pipe (`| head`) is not an error.
            match body(&mut w).and_then(|_| Ok(w.flush()?)) {
                Err(e) if e.to_string().contains("Broken pipe") => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn emit_json(out: &OutArgs, value: Value) -> Result<()> {
    emit(out, |w| {
        serde_json::to_writer_pretty(&mut *w, &value).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    })
}

fn state_params(args: &StateArgs) -> Map<String, Value> {
    let mut p = Map::new();
    let kind = match args.state {
        StateKind::Vacuum => "vacuum",
        StateKind::Sv => "sv",
        StateKind::Tmsv => "tmsv",
        StateKind::Cluster => "cluster",
        StateKind::File => "file",
    };
    p.insert("state".into(), json!(kind));
    if let Some(r) = args.r {
        p.insert("r".into(), json!(r));
    }
    if let Some(g) = &args.graph {
        p.insert("graph".into(), json!(g.display().to_string()));
    }
    if let Some(path) = &args.path {
        p.insert("path".into(), json!(path.display().to_string()));
    }
    if args.state == StateKind::Vacuum {
        p.insert("n_modes".into(), json!(args.n_modes));
    }
    p
}

fn require_r(args: &StateArgs) -> Result<f64> {
    args.r
        .ok_or_else(|| CliError::Usage("--r is required for this state".into()))
}

/// Checks flag combinations without touching any file or doing any numerics.
fn validate_state(args: &StateArgs) -> Result<()> {
    match args.state {
        StateKind::Vacuum if args.n_modes == 0 => Err(CliError::Usage("--n-modes must be positive".into())),
        StateKind::Sv | StateKind::Tmsv => require_r(args).map(|_| ()),
        StateKind::Cluster if args.graph.is_none() => {
            Err(CliError::Usage("--graph is required for --state cluster".into()))
        }
        StateKind::File if args.path.is_none() => {
            Err(CliError::Usage("--path is required for --state file".into()))
        }
        _ => Ok(()),
    }
}

fn build_state(args: &StateArgs) -> Result<GaussianPureState> {
    Ok(match args.state {
        StateKind::Vacuum => GaussianPureState::vacuum(args.n_modes),
        StateKind::Sv => GaussianPureState::squeezed_vacuum(require_r(args)?),
        StateKind::Tmsv => GaussianPureState::two_mode_squeezed(require_r(args)?),
        StateKind::Cluster => cluster_spec(args)?.covariance()?,
        StateKind::File => read_state(args.path.as_ref().expect("validated"))?,
    })
}

fn cluster_spec(args: &StateArgs) -> Result<GraphSpec> {
    let mut spec = read_graph(args.graph.as_ref().expect("validated"))?;
    if let Some(r) = args.r {
        spec.r = r;
    }
    Ok(spec)
}

fn build_kernel(args: &StateArgs) -> Result<KKernel> {
    match args.state {
        StateKind::Cluster => Ok(cluster_spec(args)?.kernel()?),
        _ => Ok(build_state(args)?.kernel()?),
    }
}

fn complex_matrix(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn kfunc(state: &StateArgs, at: Option<&[f64]>, out: &OutArgs) -> Result<()> {
    validate_state(state)?;
    let mut params = state_params(state);
    if let Some(x) = at {
        params.insert("at".into(), json!(x));
    }
    let kernel = build_kernel(state)?;
    let norm = kernel.norm();
    let mut body = json!({
        "command": "kfunc",
        "params": params,
        "n_modes": kernel.n_modes(),
        "det_gamma": kernel.det_gamma(),
        "norm": [norm.re, norm.im],
        "displacement": kernel.displacement().iter().cloned().collect::<Vec<f64>>(),
        "B": complex_matrix(kernel.b()),
    });
    if let Some(x) = at {
        let k = kfun::k_eval(&kernel, x)?;
        body["value"] = json!([k.re, k.im]);
    }
    emit_json(out, body)
}

fn broadcast_tau(tau: &[f64], n: usize) -> Result<Vec<f64>> {
    match tau.len() {
        1 => Ok(vec![tau[0]; n]),
        k if k == n => Ok(tau.to_vec()),
        k => Err(CliError::Usage(format!("--tau has {k} values for {n} modes"))),
    }
}

fn target_params(params: &mut Map<String, Value>, target: &TargetArgs) {
    if let Some(q) = target.qgamma {
        params.insert("qgamma".into(), json!(q));
        params.insert("pgamma".into(), json!(target.pgamma));
    }
}

fn subtract_cmd(
    state: &StateArgs,
    m: &[u32],
    tau: &[f64],
    target: &TargetArgs,
    out: &OutArgs,
) -> Result<()> {
    validate_state(state)?;
    let mut params = state_params(state);
    params.insert("m".into(), json!(m));
    params.insert("tau".into(), json!(tau));
    target_params(&mut params, target);
    let tau = broadcast_tau(tau, m.len())?;

    let kernel = build_kernel(state)?;
    let s = subtract(&kernel, m, &tau)?;
    let p = s.success_probability()?;
    let mut body = json!({"command": "subtract", "params": params, "p_success": p});
    if let Some(q) = target.qgamma {
        body["fidelity"] = json!(s.normalized()?.fidelity(&cat_bell(q, target.pgamma))?);
    }
    emit_json(out, body)
}

fn pattern_params(params: &mut Map<String, Value>, args: &PatternArgs) {
    if let Some(p) = &args.pattern {
        params.insert("pattern".into(), json!(p));
    }
    if let Some(m) = &args.modes {
        params.insert("modes".into(), json!(m));
    }
    if let Some(f) = &args.pattern_file {
        params.insert("pattern_file".into(), json!(f.display().to_string()));
    }
}

fn validate_pattern(args: &PatternArgs) -> Result<()> {
    if args.pattern.is_none() && args.pattern_file.is_none() {
        return Err(CliError::Usage("one of --pattern or --pattern-file is required".into()));
    }
    if args.modes.is_some() && args.pattern.is_none() {
        return Err(CliError::Usage("--modes needs --pattern".into()));
    }
    if let (Some(p), Some(m)) = (&args.pattern, &args.modes) {
        if p.len() != m.len() {
            return Err(CliError::Usage(format!(
                "--pattern has {} counts but --modes lists {} modes",
                p.len(),
                m.len()
            )));
        }
        if m.contains(&0) {
            return Err(CliError::Usage("--modes are numbered from 1".into()));
        }
    }
    Ok(())
}

fn build_pattern(args: &PatternArgs) -> Result<PhotonPattern> {
    if let Some(path) = &args.pattern_file {
        return Ok(read_pattern(path)?);
    }
    let counts = args.pattern.clone().expect("validated");
    Ok(match &args.modes {
        Some(modes) => PhotonPattern::new(counts, modes.iter().map(|m| m - 1).collect())?,
        None => PhotonPattern::full(counts),
    })
}

fn gbs(state: &StateArgs, pattern: &PatternArgs, loss: Option<f64>, out: &OutArgs) -> Result<()> {
    validate_state(state)?;
    validate_pattern(pattern)?;
    let mut params = state_params(state);
    pattern_params(&mut params, pattern);
    if let Some(t) = loss {
        params.insert("loss".into(), json!(t));
    }

    let kernel = build_kernel(state)?;
    let pat = build_pattern(pattern)?;
    pat.validate(kernel.n_modes())?;
    let probability = if loss.is_none() && pat.is_full(kernel.n_modes()) {
        pattern_probability(&kernel, &pat.dense(kernel.n_modes()))?
    } else {
        apply_uniform_loss(&kernel, loss.unwrap_or(1.0))?.lossy_pattern_probability(&pat)?
    };
    emit_json(
        out,
        json!({"command": "gbs", "params": params, "probability": probability}),
    )
}

/// All tuples in `0..=max` over `n` modes, first mode slowest.
fn fock_tuples(n: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..=max).map(move |k| {
                    let mut t = t.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    out
}

fn herald_cmd(
    state: &StateArgs,
    pattern: &PatternArgs,
    fock_max: u32,
    target: &TargetArgs,
    out: &OutArgs,
) -> Result<()> {
    validate_state(state)?;
    validate_pattern(pattern)?;
    let mut params = state_params(state);
    pattern_params(&mut params, pattern);
    params.insert("fock_max".into(), json!(fock_max));
    target_params(&mut params, target);

    let kernel = build_kernel(state)?;
    let pat = build_pattern(pattern)?;
    let (heralded, p) = herald(&kernel, &pat)?;
    let remaining: Vec<usize> = (0..kernel.n_modes())
        .filter(|k| !pat.modes.contains(k))
        .map(|k| k + 1)
        .collect();
    let mut body = json!({
        "command": "herald",
        "params": params,
        "probability": p,
        "heralded_modes": remaining,
    });
    if p > 0.0 {
        let dist: Vec<Value> = fock_tuples(heralded.n_modes(), fock_max)
            .into_iter()
            .map(|n| {
                heralded
                    .fock_amplitude(&n)
                    .map(|a| json!({"n": n, "probability": a.norm_sqr()}))
            })
            .collect::<kfun::Result<_>>()?;
        body["fock_distribution"] = Value::Array(dist);
        if let Some(q) = target.qgamma {
            body["fidelity"] = json!(heralded.fidelity(&cat_bell(q, target.pgamma))?);
        }
    }
    emit_json(out, body)
}

fn methods(m: MethodArg) -> Vec<Method> {
    match m {
        MethodArg::Closed => vec![Method::ClosedForm],
        MethodArg::Engine => vec![Method::Engine],
        MethodArg::Both => vec![Method::ClosedForm, Method::Engine],
    }
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Closed => "closed",
        MethodArg::Engine => "engine",
        MethodArg::Both => "both",
    }
}

fn scenario_five(point: &PointArgs, pgamma: f64, out: &OutArgs) -> Result<()> {
    let mut results = Vec::new();
    for m in methods(point.method) {
        results.push(evaluate(Scenario::FiveFive, m, point.qgamma, pgamma, point.r, point.tau)?);
    }
    let body = json!({
        "command": "scenario five",
        "params": {
            "qgamma": point.qgamma,
            "pgamma": pgamma,
            "r": point.r,
            "tau": point.tau,
            "method": method_name(point.method),
        },
        "results": serde_json::to_value(&results).map_err(|e| CliError::Io(e.to_string()))?,
    });
    emit_json(out, body)
}

fn scenario_compare(point: &PointArgs, out: &OutArgs) -> Result<()> {
    let mut results = Vec::new();
    for m in methods(point.method) {
        for s in [Scenario::SplitCatI, Scenario::JointSubtractIi] {
            results.push(evaluate(s, m, point.qgamma, 0.0, point.r, point.tau)?);
        }
    }
    let body = json!({
        "command": "scenario compare",
        "params": {
            "qgamma": point.qgamma,
            "pgamma": 0.0,
            "r": point.r,
            "tau": point.tau,
            "method": method_name(point.method),
        },
        "results": serde_json::to_value(&results).map_err(|e| CliError::Io(e.to_string()))?,
    });
    emit_json(out, body)
}

fn parse_grid(spec: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("grid {spec:?} is not start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.trim().parse().map_err(|_| bad())?;
    }
    Ok((v[0], v[1], v[2]))
}

fn sweep_cmd(
    scenario: SweepScenario,
    qgamma: f64,
    grid_spec: &str,
    tau_grid: Option<&str>,
    method: SweepMethod,
    out: &OutArgs,
) -> Result<()> {
    let (a, b, s) = parse_grid(grid_spec)?;
    let tau_spec = match tau_grid {
        Some(t) => parse_grid(t)?,
        None => (a, b, s),
    };
    let r_axis = grid(a, b, s)?;
    let tau_axis = grid(tau_spec.0, tau_spec.1, tau_spec.2)?;
    let scenarios: &[Scenario] = match scenario {
        SweepScenario::I => &[Scenario::SplitCatI],
        SweepScenario::Ii => &[Scenario::JointSubtractIi],
        SweepScenario::Both => &[Scenario::SplitCatI, Scenario::JointSubtractIi],
    };
    let method = match method {
        SweepMethod::Closed => Method::ClosedForm,
        SweepMethod::Engine => Method::Engine,
    };
    let rows = sweep(scenarios, qgamma, &r_axis, &tau_axis, method)?;
    emit(out, |w| Ok(write_csv(&rows, w)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_parsing() {
        assert_eq!(parse_grid("0.01:1:0.01").unwrap(), (0.01, 1.0, 0.01));
        assert!(matches!(parse_grid("0:1"), Err(CliError::Usage(_))));
        assert!(matches!(parse_grid("a:1:0.1"), Err(CliError::Usage(_))));
    }

    #[test]
    fn tau_broadcast() {
        assert_eq!(broadcast_tau(&[0.4], 2).unwrap(), vec![0.4, 0.4]);
        assert_eq!(broadcast_tau(&[0.4, 0.5], 2).unwrap(), vec![0.4, 0.5]);
        assert!(broadcast_tau(&[0.4, 0.5], 3).is_err());
    }

    #[test]
    fn fock_tuple_order() {
        assert_eq!(
            fock_tuples(2, 1),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(fock_tuples(0, 3), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Domain(kfun::Error::ZeroNorm).exit_code(), 1);
        assert_eq!(
            CliError::Domain(kfun::Error::ZeroNorm).to_string(),
            "zero-norm: the conditional state vanishes identically"
        );
    }
}
