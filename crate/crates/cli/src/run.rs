//! Dispatch from a resolved config to the experiments, producing tables and
//! charts.

use std::time::Instant;

use nilrig::joinings::{
    analyze, counterexample_joining, diagonal_joining, graph_joining, tt_drift, Classification, PointMap,
};
use nilrig::rigidity::{default_catalog, rigidity_sweep, subnil_diameter, SubnilDescriptor, SubnilKind, SweepConfig};
use nilrig::seminorms::{u1, uk_cube, uk_recursive, SeminormEstimate};
use nilrig::systems::haar_integral;
use nilrig::{Error as CoreError, GroupElement, NilPoint, Space};

use crate::config::{resolve, Command, Diagnostic, EstimatorChoice, JoiningKind, Resolved, RunConfig};
use crate::output::{Cell, Chart, Payload, ResultEnvelope, Series, Table};

pub const TOOL: &str = "nilrig";

#[derive(Debug)]
pub enum RunError {
    Config(Vec<Diagnostic>),
    Core(CoreError),
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        RunError::Core(e)
    }
}

/// Validates and runs `cfg` as `command`.
pub fn run(cfg: &RunConfig, command: Command) -> Result<(ResultEnvelope, Vec<Chart>), RunError> {
    let resolved = resolve(cfg, command).map_err(RunError::Config)?;
    let started = Instant::now();
    let (payload, charts) = execute(cfg, &resolved)?;
    let mut echo = cfg.clone();
    echo.command = Some(command);
    Ok((
        ResultEnvelope {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.name().into(),
            seed: cfg.sampling.seed,
            config: echo,
            payload,
            wall_clock_s: started.elapsed().as_secs_f64(),
        },
        charts,
    ))
}

fn execute(cfg: &RunConfig, r: &Resolved) -> Result<(Payload, Vec<Chart>), CoreError> {
    let mut charts = Vec::new();
    let tables = match r.command {
        Command::Orbit => vec![orbit(cfg, r)],
        Command::Integrate => vec![integrate(cfg, r)],
        Command::Seminorm => seminorm(cfg, r)?,
        Command::Joining => vec![joining(cfg, r)?],
        Command::RigiditySweep => sweep(cfg, r, &mut charts)?,
        Command::SubnilProbe => subnil(cfg, r)?,
    };
    Ok((Payload { tables }, charts))
}

const COORDS: [&str; 3] = ["x", "y", "z"];

fn orbit(cfg: &RunConfig, r: &Resolved) -> Table {
    let d = r.system.space.dim();
    let mut cols = vec!["k"];
    cols.extend(&COORDS[..d]);
    let mut t = Table::new("orbit", &cols);
    for (k, p) in r.system.orbit(&r.start, cfg.sampling.orbit_len).iter().enumerate() {
        let mut row = vec![Cell::int(k as i64)];
        row.extend(p.coords().iter().map(|c| Cell::num(*c)));
        t.push(row);
    }
    t
}

fn integrate(cfg: &RunConfig, r: &Resolved) -> Table {
    let mut t = Table::new(
        "integrals",
        &[
            "observable",
            "continuity",
            "n",
            "birkhoff_re",
            "birkhoff_im",
            "haar_re",
            "haar_im",
            "haar_se",
            "abs_diff",
        ],
    );
    let n = cfg.sampling.n;
    for f in &r.observables {
        let b = r.system.birkhoff_avg(f, &r.start, n);
        let (h, se) = haar_integral(r.system.space, f, n, cfg.sampling.seed);
        let cont = serde_json::to_value(f.continuity(r.system.space)).expect("enum serializes");
        t.push(vec![
            Cell::str(f.id()),
            Cell::str(cont.as_str().unwrap_or_default()),
            Cell::int(n as i64),
            Cell::num(b.re),
            Cell::num(b.im),
            Cell::num(h.re),
            Cell::num(h.im),
            Cell::num(se),
            Cell::num((b - h).norm()),
        ]);
    }
    t
}

fn estimate_row(id: &str, e: &SeminormEstimate) -> Vec<Cell> {
    let est = serde_json::to_value(e.estimator).expect("enum serializes");
    vec![
        Cell::str(id),
        Cell::str(est.as_str().unwrap_or_default()),
        Cell::int(i64::from(e.k)),
        Cell::num(e.value),
        Cell::num(e.stability),
        Cell::num(e.raw),
        Cell::num(e.raw_se),
        Cell::num(e.imag),
        Cell::int(e.n_side as i64),
        Cell::int(e.n_base as i64),
        e.seed.map_or(Cell::Null, |s| Cell::int(s as i64)),
    ]
}

fn seminorm(cfg: &RunConfig, r: &Resolved) -> Result<Vec<Table>, CoreError> {
    let sm = &cfg.seminorm;
    let mut t = Table::new(
        "seminorm",
        &[
            "observable",
            "estimator",
            "k",
            "value",
            "stability",
            "raw",
            "raw_se",
            "imag",
            "n_side",
            "n_base",
            "seed",
        ],
    );
    let mut agree = Table::new(
        "agreement",
        &["observable", "k", "abs_diff", "combined_stability", "agree"],
    );
    for f in &r.observables {
        let id = f.id();
        if sm.k == 1 {
            t.push(estimate_row(&id, &u1(&r.system, f, r.n_base)?));
            continue;
        }
        let rec = matches!(sm.estimator, EstimatorChoice::Recursive | EstimatorChoice::Both)
            .then(|| uk_recursive(&r.system, f, sm.k, r.n_outer, r.n_base, &r.guard))
            .transpose()?;
        let cube = matches!(sm.estimator, EstimatorChoice::Cube | EstimatorChoice::Both)
            .then(|| uk_cube(&r.system, f, sm.k, r.n_side, r.n_mc, cfg.sampling.seed, &r.guard))
            .transpose()?;
        for e in rec.iter().chain(cube.iter()) {
            t.push(estimate_row(&id, e));
        }
        if let (Some(a), Some(b)) = (&rec, &cube) {
            let diff = (a.value - b.value).abs();
            let tol = a.stability + b.stability;
            agree.push(vec![
                Cell::str(&id),
                Cell::int(i64::from(sm.k)),
                Cell::num(diff),
                Cell::num(tol),
                Cell::Bool(diff <= tol),
            ]);
        }
    }
    let mut out = vec![t];
    if !agree.rows.is_empty() {
        out.push(agree);
    }
    Ok(out)
}

fn class_name(c: Classification) -> String {
    serde_json::to_value(c)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

fn joining(cfg: &RunConfig, r: &Resolved) -> Result<Table, CoreError> {
    let (n, seed, scheme) = (cfg.sampling.n, cfg.sampling.seed, cfg.sampling.scheme);
    let sys = &r.system;
    let (m, param) = match cfg.joining.kind {
        JoiningKind::Diagonal => (diagonal_joining(sys, n, scheme, seed)?, Cell::Null),
        JoiningKind::Vertical => (
            graph_joining(sys, PointMap::VerticalRotation(r.u), n, scheme, seed)?,
            Cell::num(r.u),
        ),
        JoiningKind::Translation => {
            let mut v = [0.0; 3];
            v[..r.v.len()].copy_from_slice(&r.v);
            let g = GroupElement::new(v[0], v[1], v[2]);
            let label = r.v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";");
            (graph_joining(sys, PointMap::Translation(g), n, scheme, seed)?, Cell::str(label))
        }
        JoiningKind::Counterexample => (counterexample_joining(sys, r.s, n, scheme, seed)?, Cell::num(r.s)),
    };
    let diag = diagonal_joining(sys, n, scheme, seed)?;
    let rep = analyze(&m, &diag, &sys.metric, &r.analysis)?;
    let drift = tt_drift(&m, sys, &r.analysis.family)?;
    let kind = serde_json::to_value(cfg.joining.kind).expect("enum serializes");
    let scheme_name = serde_json::to_value(scheme).expect("enum serializes");
    let mut t = Table::new(
        "joining",
        &[
            "kind",
            "param",
            "scheme",
            "n",
            "seed",
            "dist_to_diagonal",
            "graphness",
            "marginal_error_1",
            "marginal_error_2",
            "tt_drift",
            "classification",
            "graph_like_max",
            "non_graph_min",
        ],
    );
    t.push(vec![
        Cell::str(kind.as_str().unwrap_or_default()),
        param,
        Cell::str(scheme_name.as_str().unwrap_or_default()),
        Cell::int(n as i64),
        Cell::int(seed as i64),
        Cell::num(rep.dist_to_diagonal),
        Cell::opt(rep.graphness),
        Cell::num(rep.marginal_error_1),
        Cell::num(rep.marginal_error_2),
        Cell::num(drift),
        Cell::str(class_name(rep.classification)),
        Cell::num(rep.thresholds.graph_like_max),
        Cell::num(rep.thresholds.non_graph_min),
    ]);
    Ok(t)
}

fn sweep(cfg: &RunConfig, r: &Resolved, charts: &mut Vec<Chart>) -> Result<Vec<Table>, CoreError> {
    let sc = SweepConfig {
        u_grid: r.u_grid.clone(),
        s_grid: r.s_grid.clone(),
        n: cfg.sampling.n,
        seed: cfg.sampling.seed,
        scheme: cfg.sampling.scheme,
        u_star: r.u_star,
        analysis: r.analysis.clone(),
    };
    let rep = rigidity_sweep(&r.system, &sc)?;
    let cols = [
        "param",
        "dist_to_diagonal",
        "graphness",
        "marginal_error_1",
        "marginal_error_2",
        "classification",
    ];
    let family = |name: &str, recs: &[nilrig::rigidity::SweepRecord]| {
        let mut t = Table::new(name, &cols);
        for rec in recs {
            t.push(vec![
                Cell::num(rec.param),
                Cell::num(rec.report.dist_to_diagonal),
                Cell::opt(rec.report.graphness),
                Cell::num(rec.report.marginal_error_1),
                Cell::num(rec.report.marginal_error_2),
                Cell::str(class_name(rec.report.classification)),
            ]);
        }
        t
    };
    let graph = family("graph_family", &rep.graph_family);
    let nongraph = family("nongraph_family", &rep.nongraph_family);
    let mut summary = Table::new(
        "summary",
        &[
            "delta_hat",
            "neighborhood_u",
            "u_star",
            "max_graph_dist",
            "margin",
            "noise",
            "all_classified",
            "separated",
            "margin_exceeds_twice_noise",
        ],
    );
    summary.push(vec![
        Cell::opt(rep.delta_hat),
        Cell::opt(rep.neighborhood_u),
        Cell::num(rep.u_star),
        Cell::opt(rep.max_graph_dist),
        Cell::opt(rep.margin),
        Cell::num(rep.noise),
        Cell::Bool(rep.all_classified),
        Cell::Bool(rep.separated),
        Cell::Bool(rep.margin_exceeds_twice_noise),
    ]);

    let curve: Vec<(f64, f64)> = rep
        .graph_family
        .iter()
        .filter(|rec| rec.param > 0.0)
        .map(|rec| (rec.param.log2(), rec.report.dist_to_diagonal))
        .collect();
    let mut series = vec![Series {
        label: "graph joinings".into(),
        points: curve.clone(),
        dashed: false,
    }];
    if let (Some(d), Some(lo), Some(hi)) = (
        rep.delta_hat,
        curve.iter().map(|p| p.0).reduce(f64::min),
        curve.iter().map(|p| p.0).reduce(f64::max),
    ) {
        series.push(Series {
            label: "non-graph minimum".into(),
            points: vec![(lo, d), (hi, d)],
            dashed: true,
        });
    }
    charts.push(Chart {
        name: "dist_to_diagonal".into(),
        title: "Weak-* distance to the diagonal joining".into(),
        x_label: "log2 u".into(),
        y_label: "distance".into(),
        series,
    });
    Ok(vec![graph, nongraph, summary])
}

fn subnil(cfg: &RunConfig, r: &Resolved) -> Result<Vec<Table>, CoreError> {
    let sn = &cfg.subnil;
    let seed = cfg.sampling.seed;
    let metric = &r.system.metric;
    let catalog = default_catalog(sn.sample_count, sn.n_translates, seed);
    let mut t = Table::new(
        "diameters",
        &["index", "space", "kind", "q1", "q2", "base_x", "base_y", "base_z", "diameter"],
    );
    let mut min_d = f64::INFINITY;
    let mut fiber = None;
    let mut spread = 0.0f64;
    let mut translated = Vec::new();
    for (i, d) in catalog.iter().enumerate() {
        let diam = subnil_diameter(d, metric, seed)?;
        min_d = min_d.min(diam);
        let (kind, q, base) = match &d.kind {
            SubnilKind::CentralFiber => {
                fiber = Some(diam);
                ("central-fiber", None, None)
            }
            SubnilKind::Subtorus { q1, q2 } => ("subtorus", Some((*q1, *q2)), None),
            SubnilKind::TranslatedCentralFiber { base } => {
                translated.push(diam);
                ("translated-central-fiber", None, Some(*base))
            }
            SubnilKind::Singleton { point } => ("singleton", None, Some(*point)),
        };
        let coord = |b: Option<NilPoint>, j: usize| b.map_or(Cell::Null, |p| Cell::num(p.lift().to_array()[j]));
        t.push(vec![
            Cell::int(i as i64),
            Cell::str(d.space.to_string()),
            Cell::str(kind),
            q.map_or(Cell::Null, |q| Cell::int(q.0)),
            q.map_or(Cell::Null, |q| Cell::int(q.1)),
            coord(base, 0),
            coord(base, 1),
            coord(base, 2),
            Cell::num(diam),
        ]);
    }
    if let Some(c) = fiber {
        for d in &translated {
            spread = spread.max((d - c).abs() / c);
        }
    }
    let singleton = subnil_diameter(&SubnilDescriptor::singleton(Space::Heisenberg.base_point()), metric, seed)?;
    let mut summary = Table::new(
        "summary",
        &["descriptors", "min_diameter", "central_fiber", "translate_rel_spread", "singleton"],
    );
    summary.push(vec![
        Cell::int(catalog.len() as i64),
        Cell::num(min_d),
        Cell::opt(fiber),
        Cell::num(spread),
        Cell::num(singleton),
    ]);
    Ok(vec![t, summary])
}
