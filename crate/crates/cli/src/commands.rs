use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use sawcount::connconst::{
    conn_profile, lattice_bounds_table, z2_branching_matrix, Ordering, Pruning, RootSelection,
};
use sawcount::counting::{oracle_marginal, oracle_z, partition_hc, partition_md, PartitionResult};
use sawcount::decay::{decay_factor_hc, decay_factor_md};
use sawcount::recurrence::{marginal_adaptive, marginal_interval};
use sawcount::{
    generate, BoundaryCondition, DepthSchedule, Error, Graph, GraphKind, ModelParams, Pin, RNG_NAME,
};

use crate::output::{sig, Failure, Format, Output};
use crate::{
    Command, ConnConstArgs, DecayTableArgs, GenArgs, HcCountArgs, HcMarginalArgs, Kind,
    MarginalOpts, MdCountArgs, MdMarginalArgs, Model, OracleArgs, OrderingArg, PruningArg,
    Schedule, Z2Args,
};

type Outcome = Result<Output, Failure>;

pub fn run(cmd: &Command, threads: usize) -> Outcome {
    match cmd {
        Command::HcCount(a) => hc_count(a, threads),
        Command::MdCount(a) => md_count(a, threads),
        Command::HcMarginal(a) => hc_marginal(a, threads),
        Command::MdMarginal(a) => md_marginal(a, threads),
        Command::DecayTable(a) => decay_table(a, threads),
        Command::ConnConst(a) => conn_const(a, threads),
        Command::Z2Branching(a) => z2_branching(a, threads),
        Command::LatticeBounds => lattice_bounds(threads),
        Command::Gen(a) => gen(a, threads),
        Command::Oracle(a) => oracle(a, threads),
    }
}

/// Resolved flags plus the execution settings every run echoes.
fn config<T: Serialize>(args: &T, threads: usize) -> Map<String, Value> {
    let mut map = match serde_json::to_value(args).expect("serializable flags") {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    map.insert("threads".into(), json!(threads));
    map.insert("parallel".into(), json!(cfg!(feature = "parallel")));
    map.insert("rng".into(), json!(RNG_NAME));
    map
}

fn output(command: &'static str, config: Map<String, Value>, result: Value) -> Output {
    Output {
        command,
        config,
        result,
        partial: None,
        default_format: Format::Json,
        text: None,
        body: None,
    }
}

fn read_graph(path: &Path, config: &mut Map<String, Value>) -> Result<Graph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let g = Graph::parse_edge_list(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    config.insert("graph_vertices".into(), json!(g.n()));
    config.insert("graph_edges".into(), json!(g.edge_count()));
    Ok(g)
}

fn boundary(g: &Graph, occupied: &[usize], unoccupied: &[usize]) -> Result<Option<BoundaryCondition>, Failure> {
    if occupied.is_empty() && unoccupied.is_empty() {
        return Ok(None);
    }
    let mut pins = BTreeMap::new();
    for &v in occupied {
        pins.insert(v, Pin::Occupied);
    }
    for &v in unoccupied {
        if pins.insert(v, Pin::Unoccupied).is_some() {
            return Err(Failure::Usage(format!("vertex {v} pinned both ways")));
        }
    }
    Ok(Some(BoundaryCondition::new(g, pins)?))
}

fn partition_output(command: &'static str, config: Map<String, Value>, r: PartitionResult) -> Output {
    let partial = r.failed.then(|| {
        format!(
            "budget exhausted at {} vertices; the interval is certified but wider than eps",
            r.failed_vertices.len()
        )
    });
    let mut out = output(command, config, serde_json::to_value(&r).expect("serializable"));
    out.partial = partial;
    out
}

fn hc_count(a: &HcCountArgs, threads: usize) -> Outcome {
    let mut cfg = config(a, threads);
    let g = read_graph(&a.graph, &mut cfg)?;
    let r = partition_hc(&g, a.lambda, a.eps, a.budget)?;
    Ok(partition_output("hc-count", cfg, r))
}

fn md_count(a: &MdCountArgs, threads: usize) -> Outcome {
    let mut cfg = config(a, threads);
    let g = read_graph(&a.graph, &mut cfg)?;
    let r = partition_md(&g, a.gamma, a.eps, a.budget)?;
    Ok(partition_output("md-count", cfg, r))
}

fn schedule(s: Schedule) -> DepthSchedule {
    match s {
        Schedule::Doubling => DepthSchedule::Doubling,
        Schedule::Increment => DepthSchedule::Increment,
    }
}

fn marginal(
    command: &'static str,
    cfg: Map<String, Value>,
    g: &Graph,
    v: usize,
    params: ModelParams,
    bc: Option<&BoundaryCondition>,
    opts: &MarginalOpts,
) -> Outcome {
    // (lo, hi, depth, nodes, exact)
    let (lo, hi, depth, nodes, exact, partial) = match opts.depth {
        Some(depth) => {
            let b = marginal_interval(g, v, params, bc, depth, opts.budget)?;
            (b.lo, b.hi, b.depth, b.nodes, Some(b.exact), None)
        }
        None => match marginal_adaptive(g, v, params, bc, opts.tol, opts.budget, schedule(opts.schedule)) {
            Ok(r) => (r.lo, r.hi, r.depth, r.nodes, None, None),
            Err(Error::Unconverged { lo, hi, depth, nodes }) => (
                lo,
                hi,
                depth,
                nodes,
                None,
                Some(format!("budget exhausted before tolerance {} was reached", opts.tol)),
            ),
            Err(e) => return Err(e.into()),
        },
    };
    let mut result = json!({
        "vertex": v,
        "model": params,
        "value": 0.5 * (lo + hi),
        "lo": lo,
        "hi": hi,
        "width": hi - lo,
        "depth": depth,
        "nodes": nodes,
        "budget": opts.budget,
    });
    let obj = result.as_object_mut().expect("object");
    match params {
        ModelParams::HardCore { .. } => {
            obj.insert("quantity".into(), json!("occupation_ratio"));
            let p = |r: f64| if r.is_infinite() { 1.0 } else { r / (1.0 + r) };
            obj.insert(
                "probability".into(),
                json!({ "value": 0.5 * (p(lo) + p(hi)), "lo": p(lo), "hi": p(hi) }),
            );
        }
        ModelParams::MonomerDimer { .. } => {
            obj.insert("quantity".into(), json!("monomer_probability"));
        }
    }
    if opts.depth.is_none() {
        obj.insert("tolerance".into(), json!(opts.tol));
    }
    if let Some(e) = exact {
        obj.insert("exact".into(), json!(e));
    }
    let mut out = output(command, cfg, result);
    out.partial = partial;
    Ok(out)
}

fn hc_marginal(a: &HcMarginalArgs, threads: usize) -> Outcome {
    let mut cfg = config(a, threads);
    let g = read_graph(&a.graph, &mut cfg)?;
    let bc = boundary(&g, &a.occupied, &a.unoccupied)?;
    let params = ModelParams::hard_core(a.lambda)?;
    marginal("hc-marginal", cfg, &g, a.vertex, params, bc.as_ref(), &a.opts)
}

fn md_marginal(a: &MdMarginalArgs, threads: usize) -> Outcome {
    let mut cfg = config(a, threads);
    let g = read_graph(&a.graph, &mut cfg)?;
    let params = ModelParams::monomer_dimer(a.gamma)?;
    marginal("md-marginal", cfg, &g, a.vertex, params, None, &a.opts)
}

fn decay_table(a: &DecayTableArgs, threads: usize) -> Outcome {
    let mut rows = Vec::new();
    for &act in &a.activity {
        for &delta in &a.delta {
            let r = match a.model {
                Model::HardCore => decay_factor_hc(act, delta)?,
                Model::MonomerDimer => decay_factor_md(act, delta)?,
            };
            rows.push(serde_json::to_value(r).expect("serializable"));
        }
    }
    let mut out = output("decay-table", config(a, threads), json!({ "rows": rows }));
    out.default_format = Format::Text;
    Ok(out)
}

fn conn_const(a: &ConnConstArgs, threads: usize) -> Outcome {
    let mut cfg = config(a, threads);
    let g = read_graph(&a.graph, &mut cfg)?;
    let roots = match a.roots {
        Some(m) => RootSelection::Sample { m, seed: a.seed },
        None => RootSelection::All,
    };
    let p = conn_profile(&g, a.l_max, roots, a.budget)?;
    let partial = p
        .truncated
        .then(|| "walk budget reached before l_max for some roots".to_string());
    let mut out = output("conn-const", cfg, serde_json::to_value(&p).expect("serializable"));
    out.partial = partial;
    out.default_format = Format::Text;
    Ok(out)
}

fn z2_branching(a: &Z2Args, threads: usize) -> Outcome {
    let ordering = match a.ordering {
        OrderingArg::Relative => Ordering::Relative,
        OrderingArg::Uniform => Ordering::Uniform,
    };
    let pruning = match a.pruning {
        PruningArg::None => Pruning::None,
        PruningArg::Weitz => Pruning::Weitz,
    };
    let cfg = config(a, threads);
    let b = match z2_branching_matrix(a.memory, ordering, pruning, a.state_cap) {
        Ok(b) => b,
        Err(Error::StateCap { cap }) => {
            let result = json!({
                "memory": a.memory,
                "ordering": ordering,
                "pruning": pruning,
                "states_reached": cap,
            });
            let mut out = output("z2-branching", cfg, result);
            out.partial = Some(format!("state space exceeded the cap of {cap} states"));
            out.default_format = Format::Text;
            return Ok(out);
        }
        Err(e) => return Err(e.into()),
    };
    let s = b.spectral(a.tol)?;
    let gelfand: Vec<Value> = s
        .gelfand
        .iter()
        .map(|&(l, g)| json!({ "power": l, "bound": g }))
        .collect();
    let mut result = json!({
        "memory": a.memory,
        "ordering": ordering,
        "pruning": pruning,
        "states": b.k,
        "raw_states": b.raw_states,
        "nonzeros": b.matrix.nnz(),
        "eigenvalue": s.eigenvalue,
        "converged": s.converged,
        "iterations": s.iterations,
        "gelfand": gelfand,
    });
    if a.walks > 0 {
        let walks: Vec<f64> = (1..=a.walks).map(|l| b.walk_count(l)).collect();
        result["walk_counts"] = json!(walks);
    }
    let mut out = output("z2-branching", cfg, result);
    if !s.converged {
        out.partial = Some("power method hit its iteration cap".into());
    }
    out.default_format = Format::Text;
    Ok(out)
}

fn lattice_bounds(threads: usize) -> Outcome {
    let table = lattice_bounds_table();
    let shown: Vec<Value> = table
        .iter()
        .map(|r| {
            json!({
                "lattice": r.lattice,
                "max_degree": r.max_degree,
                "connective_constant": r.connective_constant,
                "lambda_c": sig(r.lambda_bound),
                "ssm_bound": format!("{:.3}", r.lambda_bound_3dp),
            })
        })
        .collect();
    let rows = serde_json::to_value(&table).expect("serializable");
    let mut out = output("lattice-bounds", config(&json!({}), threads), json!({ "rows": rows }));
    out.default_format = Format::Text;
    out.body = Some(crate::output::table(&shown));
    Ok(out)
}

fn need<T: Copy>(x: Option<T>, flag: &str, kind: &str) -> Result<T, Failure> {
    x.ok_or_else(|| Failure::Usage(format!("--kind {kind} needs --{flag}")))
}

fn gen(a: &GenArgs, threads: usize) -> Outcome {
    let kind = match a.kind {
        Kind::Cycle => GraphKind::Cycle { n: need(a.n, "n", "cycle")? },
        Kind::Complete => GraphKind::Complete { n: need(a.n, "n", "complete")? },
        Kind::Grid => GraphKind::Grid {
            width: need(a.width, "width", "grid")?,
            height: need(a.height, "height", "grid")?,
        },
        Kind::DaryTree => GraphKind::DaryTree {
            d: need(a.arity, "arity", "dary-tree")?,
            depth: need(a.depth, "depth", "dary-tree")?,
        },
        Kind::Gnp => GraphKind::Gnp {
            n: need(a.n, "n", "gnp")?,
            d: need(a.d, "d", "gnp")?,
        },
    };
    let g = generate(kind, a.seed)?;
    let cfg = config(a, threads);
    let mut text = g.to_edge_list();
    // the `# n` header must stay first
    let header = format!(
        "# {}\n",
        cfg.iter()
            .filter(|(_, v)| !v.is_null())
            .map(|(k, v)| format!("{k}={}", v.as_str().map_or(v.to_string(), str::to_string)))
            .collect::<Vec<_>>()
            .join(" ")
    );
    let split = text.find('\n').map_or(text.len(), |i| i + 1);
    text.insert_str(split, &header);

    let (deg_max, deg_mean) = g.degree_stats();
    let mut result = json!({
        "vertices": g.n(),
        "edges": g.edge_count(),
        "max_degree": deg_max,
        "mean_degree": deg_mean,
    });
    let mut out_text = None;
    match &a.out {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            result["out"] = json!(path.display().to_string());
        }
        None => {
            let edges: Vec<[usize; 2]> = g.edges().map(|(u, v)| [u, v]).collect();
            result["edge_list"] = json!(edges);
            out_text = Some(text);
        }
    }
    let mut out = output("gen", cfg, result);
    out.default_format = Format::Text;
    out.text = out_text;
    Ok(out)
}

fn oracle(a: &OracleArgs, threads: usize) -> Outcome {
    let mut cfg = config(a, threads);
    let g = read_graph(&a.graph, &mut cfg)?;
    let params = match (a.lambda, a.gamma) {
        (Some(lambda), None) => ModelParams::hard_core(lambda)?,
        (None, Some(gamma)) => ModelParams::monomer_dimer(gamma)?,
        _ => return Err(Failure::Usage("give exactly one of --lambda and --gamma".into())),
    };
    let bc = boundary(&g, &a.occupied, &a.unoccupied)?;
    if bc.is_some() && a.vertex.is_none() {
        return Err(Failure::Usage("pins only apply to --vertex marginals".into()));
    }
    let z = oracle_z(&g, &params)?;
    let mut result = json!({ "model": params, "z": z, "log_z": z.ln() });
    if let Some(v) = a.vertex {
        let m = oracle_marginal(&g, v, &params, bc.as_ref())?;
        result["marginal"] = json!({
            "vertex": v,
            "probability": m.probability,
            "ratio": m.ratio,
        });
    }
    Ok(output("oracle", cfg, result))
}
