use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::Path;

use ergm_core::estimation::{FitMethod, FitResult};
use ergm_core::io::{
    parse_group_summary, read_attributes, read_network, read_result, read_weight_matrix, threshold_matrix,
    write_edge_list, write_result, ResultBody, ResultDocument, ThresholdSummary,
};
use ergm_core::netmetrics::descriptive_metrics;
use ergm_core::selection::{group_compare, AicStrategy, GroupInput, LikelihoodSource, SelectionMethod, VarianceModel};
use ergm_core::{Error, Result};
use ergm_service::engine::{self, JobControl, Network};
use ergm_service::ServiceConfig;

use crate::table;
use crate::*;

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Fit(a) => fit(cli, a),
        Command::Simulate(a) => simulate(cli, a),
        Command::Gof(a) => gof(cli, a),
        Command::Select(a) => select(cli, a),
        Command::Compare(a) => compare(cli, a),
        Command::Threshold(a) => threshold(cli, a),
        Command::Metrics(a) => metrics(cli, a),
        Command::Serve(a) => serve(a),
    }
}

fn load_network(args: &NetworkArgs) -> Result<Network> {
    let loaded = read_network(&args.network, args.format.parse()?)?;
    for w in &loaded.warnings {
        eprintln!("warning: {}: {w}", args.network.display());
    }
    let attrs = args
        .attrs
        .as_ref()
        .map(|p| read_attributes(p, Some(loaded.graph.node_count())))
        .transpose()?;
    Ok(Network::new(loaded.graph, attrs))
}

fn job_control(cli: &Cli, args: &ControlArgs) -> Result<JobControl> {
    let mut c = match &args.control {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)
            .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?,
        None => JobControl::default(),
    };
    if let Some(seed) = cli.seed {
        c.seed = seed;
    }
    if let Some(b) = args.burn_in {
        c.estimation.mcmc.burn_in = b;
        c.simulation.burn_in = b;
    }
    if let Some(i) = args.interval {
        c.estimation.mcmc.interval = i;
        c.simulation.interval = i;
    }
    Ok(c)
}

fn emit(doc: &ResultDocument, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_result(doc, p),
        None => {
            std::io::stdout().write_all(doc.to_json().as_bytes())?;
            Ok(())
        }
    }
}

fn read_fit(path: &Path) -> Result<FitResult> {
    match read_result(path)?.result {
        ResultBody::Fit(f) => Ok(f),
        other => Err(Error::Schema(format!(
            "{}: expected a fit document, found `{}`",
            path.display(),
            other.kind()
        ))),
    }
}

fn fit(cli: &Cli, a: &FitArgs) -> Result<()> {
    let net = load_network(&a.network)?;
    let model = engine::parse_model(&a.terms, a.tau)?;
    let mut c = job_control(cli, &a.control)?;
    c.method = Some(match a.method {
        MethodArg::Mple => FitMethod::Mple,
        MethodArg::Mcmc => FitMethod::McmcMle,
        MethodArg::Exact => FitMethod::Exact,
    });
    if let Some(s) = a.samples {
        c.estimation.mcmc.sample_count = s;
    }
    if let Some(b) = a.bridges {
        c.estimation.bridge_count = b;
    }
    let doc = engine::run_fit(&model, &net, &c)?;
    emit(&doc, a.out.as_deref())?;
    if a.out.is_some() {
        if let ResultBody::Fit(f) = &doc.result {
            print!("{}", table::fit(f));
        }
    }
    Ok(())
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<()> {
    let model = engine::parse_model(&a.terms, a.tau)?;
    let theta = engine::parse_theta(&a.theta)?;
    let attrs = a.attrs.as_ref().map(|p| read_attributes(p, Some(a.nodes))).transpose()?;
    let mut c = job_control(cli, &a.control)?;
    c.simulation.sample_count = a.samples;
    let (doc, batch) = engine::run_simulate(&model, &theta, a.nodes, attrs.as_ref(), &c)?;
    fs::create_dir_all(&a.out)?;
    write_result(&doc, a.out.join("summary.json"))?;
    let width = batch.graphs.len().to_string().len().max(3);
    for (k, g) in batch.graphs.iter().enumerate() {
        fs::write(a.out.join(format!("network_{:0width$}.txt", k + 1)), write_edge_list(g))?;
    }
    if let ResultBody::Simulation(s) = &doc.result {
        print!("{}", table::simulation(s));
    }
    Ok(())
}

fn gof(cli: &Cli, a: &GofArgs) -> Result<()> {
    let fit = read_fit(&a.fit)?;
    let net = load_network(&a.network)?;
    let mut c = job_control(cli, &a.control)?;
    if let Some(s) = a.samples {
        c.simulation.sample_count = s;
    }
    let report = engine::run_gof(&fit, &net, &c)?;
    print!("{}", table::gof(&report));
    let (full, plot) = engine::gof_documents(report, c.seed);
    write_result(&plot, &a.out)?;
    if let Some(r) = &a.report {
        write_result(&full, r)?;
    }
    Ok(())
}

fn select(cli: &Cli, a: &SelectArgs) -> Result<()> {
    let net = load_network(&a.network)?;
    let mut c = job_control(cli, &a.control)?;
    c.selection = Some(match a.method {
        SelectMethodArg::Pvalue => SelectionMethod::Pvalue,
        SelectMethodArg::Aic => SelectionMethod::Aic,
        SelectMethodArg::Graphical => SelectionMethod::Graphical,
    });
    c.alpha = a.alpha;
    c.strategy = match a.strategy {
        StrategyArg::Stepwise => AicStrategy::BackwardStepwise,
        StrategyArg::Exhaustive => AicStrategy::Exhaustive,
    };
    c.likelihood = match a.likelihood {
        LikelihoodArg::Bridge => LikelihoodSource::Bridge,
        LikelihoodArg::Exact => LikelihoodSource::Exact,
    };
    if let Some(m) = &a.models {
        c.models = Some(m.split(';').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect());
    }
    if a.attribute.is_some() {
        c.attribute = a.attribute.clone();
    }
    let candidates = engine::candidate_set(a.candidates.as_deref(), a.tau, &c)?;
    let trace = engine::run_select(&candidates, a.tau, &net, &c)?;
    let report = table::selection(&trace, &candidates.terms);
    emit(&ResultDocument::new(ResultBody::Selection(trace), Some(c.seed)), a.out.as_deref())?;
    if a.out.is_some() {
        print!("{report}");
    } else {
        eprint!("{report}");
    }
    Ok(())
}

fn compare(cli: &Cli, a: &CompareArgs) -> Result<()> {
    let (ga, gb) = match &a.summary {
        Some(path) => {
            let (terms, ca, cb) = parse_group_summary(&fs::read_to_string(path)?)?;
            (
                GroupInput::Summary {
                    terms: Some(terms.clone()),
                    coordinates: ca,
                },
                GroupInput::Summary {
                    terms: Some(terms),
                    coordinates: cb,
                },
            )
        }
        None => {
            let load = |paths: &[std::path::PathBuf]| paths.iter().map(|p| read_fit(p)).collect::<Result<Vec<_>>>();
            (GroupInput::Fits(load(&a.group_a)?), GroupInput::Fits(load(&a.group_b)?))
        }
    };
    let variance = match a.variance {
        VarianceArg::Welch => VarianceModel::Welch,
        VarianceArg::Pooled => VarianceModel::Pooled,
    };
    let cmp = group_compare(&ga, &gb, variance)?;
    print!("{}", table::comparison(&cmp));
    if let Some(out) = &a.out {
        write_result(&ResultDocument::new(ResultBody::Comparison(cmp), Some(cli.seed.unwrap_or(0))), out)?;
    }
    Ok(())
}

fn threshold(cli: &Cli, a: &ThresholdArgs) -> Result<()> {
    let w = read_weight_matrix(&a.matrix)?;
    let r = threshold_matrix(&w, a.s, a.absolute)?;
    let summary = ThresholdSummary::new(&r, a.s, a.absolute);
    print!("{}", table::threshold(&summary));
    if let Some(p) = &a.edges {
        fs::write(p, write_edge_list(&r.graph))?;
    }
    if let Some(out) = &a.out {
        write_result(&ResultDocument::new(ResultBody::Threshold(summary), Some(cli.seed.unwrap_or(0))), out)?;
    }
    Ok(())
}

fn metrics(cli: &Cli, a: &MetricsArgs) -> Result<()> {
    let net = load_network(&a.network)?;
    let m = descriptive_metrics(&net.graph);
    print!("{}", table::metrics(&m));
    if let Some(out) = &a.out {
        write_result(&ResultDocument::new(ResultBody::Metrics(m), Some(cli.seed.unwrap_or(0))), out)?;
    }
    Ok(())
}

fn serve(a: &ServeArgs) -> Result<()> {
    let config = ServiceConfig {
        workers: a.workers,
        results_dir: a.results_dir.clone(),
    };
    let addr = SocketAddr::new(a.host, a.port);
    eprintln!("serving on http://{addr}");
    ergm_service::serve_blocking(addr, config)?;
    Ok(())
}
