use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use ncc_core::dynamics::{build_wpc_network, series_stats, Symmetrize};
use ncc_core::exec::{self, Exec};
use ncc_core::generators::{
    dcbm_from_degree, gen_dcbm, gen_er, gen_lcd, DcbmParams, DegreeDesign, ErParams, LcdParams, ThetaLaw, ThetaSpec,
};
use ncc_core::inference::{power_experiment_with, rho_confidence_interval, two_sample_test};
use ncc_core::io::{
    read_edge_list, read_series, read_sponsorship_csv, write_edge_list, write_series_csv, EdgeListFile,
};
use ncc_core::sampling::{evaluate_samplers, replicate_seed, sample, SampleMethod, SampleSpec};
use ncc_core::theory::{self, classify_model};
use ncc_core::{graph_stats, Graph, GraphStats};

use crate::output::{cell, opt_cell, with_meta, Meta, Sink, Table};
use crate::{
    Command, EgoArgs, GenCommand, GenCommon, GenDcbmArgs, RuleArg, SampleArgs, SeriesArgs, StatsArgs, Status,
    TestCommand, TheoryCommand, ThetaKind, WpcArgs,
};

pub fn run(command: Command, sink: &Sink) -> Result<Status> {
    match command {
        Command::Stats(a) => stats(&a, sink),
        Command::Ego(a) => ego(&a, sink),
        Command::Gen(g) => generate(&g, sink),
        Command::Theory(t) => theory_cmd(&t, sink),
        Command::Test(t) => test_cmd(&t, sink),
        Command::Sample(a) => sample_cmd(&a, sink),
        Command::Series(a) => series(&a, sink),
        Command::Wpc(a) => wpc(&a, sink),
    }
}

fn load(path: &Path) -> Result<EdgeListFile> {
    let file = read_edge_list(path).with_context(|| format!("reading {}", path.display()))?;
    if file.self_loops + file.duplicates > 0 {
        log::info!(
            "{}: dropped {} self-loops, merged {} duplicate edges",
            path.display(),
            file.self_loops,
            file.duplicates
        );
    }
    Ok(file)
}

fn stats_header() -> Vec<&'static str> {
    vec![
        "n",
        "edges",
        "wedges",
        "triangles",
        "e_hat",
        "v_hat",
        "t_hat",
        "rho_hat",
        "cc_hat",
        "cc_ratio",
    ]
}

fn stats_row(s: &GraphStats) -> Vec<String> {
    vec![
        cell(s.n),
        cell(s.edges),
        cell(s.wedges),
        cell(s.triangles),
        cell(s.e_hat),
        cell(s.v_hat),
        cell(s.t_hat),
        opt_cell(s.rho_hat),
        opt_cell(s.cc_hat),
        opt_cell(s.cc_ratio),
    ]
}

fn status_of(rho: Option<f64>) -> Status {
    if rho.is_some() {
        Status::Success
    } else {
        Status::Degenerate
    }
}

fn stats(a: &StatsArgs, sink: &Sink) -> Result<Status> {
    let file = load(&a.input)?;
    let s = graph_stats(&file.graph).with_context(|| format!("{}", a.input.display()))?;
    let meta = Meta::new("stats", None, a);
    sink.emit(&meta, s, || {
        let mut t = Table::new(&stats_header());
        t.push(stats_row(&s));
        t
    })?;
    if s.rho_hat.is_none() {
        log::warn!("{}: no wedges, rho_hat is undefined", a.input.display());
    }
    Ok(status_of(s.rho_hat))
}

#[derive(Debug, Serialize)]
struct EgoRow {
    center: String,
    degree: usize,
    ego_n: usize,
    ego_edges: usize,
    rho_hat: Option<f64>,
    cc_hat: Option<f64>,
    model: theory::ModelKind,
}

fn ego_row(file: &EdgeListFile, v: usize, hw: f64) -> Result<EgoRow> {
    let sub = file.graph.ego_network(v)?;
    let stats = match graph_stats(&sub.graph) {
        Ok(s) => Some(s),
        Err(ncc_core::Error::DegenerateGraph { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let rho_hat = stats.and_then(|s| s.rho_hat);
    Ok(EgoRow {
        center: file.name_of(v),
        degree: file.graph.degree(v),
        ego_n: sub.graph.n(),
        ego_edges: sub.graph.edge_count(),
        rho_hat,
        cc_hat: stats.and_then(|s| s.cc_hat),
        model: classify_model(rho_hat, hw).kind,
    })
}

fn ego_table(rows: &[EgoRow]) -> Table {
    let mut t = Table::new(&["center", "degree", "ego_n", "ego_edges", "rho_hat", "cc_hat", "model"]);
    for r in rows {
        t.push(vec![
            r.center.clone(),
            cell(r.degree),
            cell(r.ego_n),
            cell(r.ego_edges),
            opt_cell(r.rho_hat),
            opt_cell(r.cc_hat),
            format!("{:?}", r.model),
        ]);
    }
    t
}

fn ego(a: &EgoArgs, sink: &Sink) -> Result<Status> {
    let file = load(&a.input)?;
    let meta = Meta::new("ego", None, a);
    if let Some(center) = &a.center {
        let v = file
            .resolve(center)
            .with_context(|| format!("node {center:?} not found in {}", a.input.display()))?;
        let row = ego_row(&file, v, a.er_halfwidth)?;
        let status = status_of(row.rho_hat);
        let rows = [row];
        sink.emit(&meta, &rows[0], || ego_table(&rows))?;
        return Ok(status);
    }
    let min_degree = a.min_degree.unwrap_or(0);
    let centers: Vec<usize> = (0..file.graph.n())
        .filter(|&v| file.graph.degree(v) >= min_degree)
        .collect();
    let rows = exec::map_indexed(centers.len(), Exec::default(), |i| {
        ego_row(&file, centers[i], a.er_halfwidth)
    });
    let rows: Vec<EgoRow> = rows.into_iter().collect::<Result<_>>()?;
    sink.emit(&meta, json!({ "rows": &rows }), || ego_table(&rows))?;
    Ok(Status::Success)
}

fn theta_from_args(a: &GenDcbmArgs) -> Result<ThetaSpec> {
    let mut spec = match a.theta {
        ThetaKind::Constant => ThetaSpec::constant(),
        ThetaKind::TwoPoint => {
            if a.theta_values.is_empty() {
                bail!("--theta two-point needs --theta-values and --theta-probs");
            }
            ThetaSpec::two_point(a.theta_values.clone(), a.theta_probs.clone())
        }
        ThetaKind::PowerLaw => ThetaSpec {
            law: ThetaLaw::PowerLaw {
                shape: a.theta_shape,
                lower: a.theta_lower,
            },
            normalize_second_moment: true,
        },
    };
    if let Some(norm) = a.theta_normalize {
        spec.normalize_second_moment = norm;
    }
    spec.validate()?;
    Ok(spec)
}

fn sidecar_path(common: &GenCommon, sink: &Sink) -> Option<PathBuf> {
    common.sidecar.clone().or_else(|| {
        sink.output.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".meta.json");
            PathBuf::from(s)
        })
    })
}

fn write_generated(sink: &Sink, meta: &Meta, g: &Graph, extra: serde_json::Value, common: &GenCommon) -> Result<()> {
    let mut w = sink.writer()?;
    writeln!(w, "# ncc {} {} seed={}", meta.version, meta.command, common.seed)?;
    write_edge_list(g, &mut w)?;
    w.flush()?;
    if let Some(path) = sidecar_path(common, sink) {
        let mut body = json!({ "n": g.n(), "edges": g.edge_count() });
        if let (Some(b), serde_json::Value::Object(x)) = (body.as_object_mut(), extra) {
            b.extend(x);
        }
        let doc = with_meta(meta, body);
        let mut f = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        serde_json::to_writer(&mut f, &doc)?;
        writeln!(f)?;
        f.flush()?;
    }
    Ok(())
}

fn generate(cmd: &GenCommand, sink: &Sink) -> Result<Status> {
    match cmd {
        GenCommand::Er(a) => {
            let g = gen_er(&ErParams {
                n: a.n,
                p: a.p,
                seed: a.common.seed,
            })?;
            let meta = Meta::new("gen er", Some(a.common.seed), a);
            write_generated(sink, &meta, &g, json!({}), &a.common)?;
        }
        GenCommand::Dcbm(a) => {
            let theta = theta_from_args(a)?;
            let seed = a.common.seed;
            let params = match (a.p, a.q, a.r, a.lambda) {
                (Some(p), Some(q), None, None) => {
                    let mut params = DcbmParams::balanced(a.n, a.k, p, q, theta, seed);
                    if let Some(pi) = &a.pi {
                        params.pi = pi.clone();
                    }
                    params
                }
                (None, None, Some(r), Some(lambda)) => dcbm_from_degree(a.n, a.k, r, lambda, theta, seed)?,
                _ => bail!("give either --p and --q, or --r and --lambda"),
            };
            let sample = gen_dcbm(&params)?;
            if sample.clamped_pairs > 0 {
                log::warn!("{} node pairs had probability clamped to 1", sample.clamped_pairs);
            }
            let meta = Meta::new("gen dcbm", Some(seed), a);
            let extra = json!({
                "p": params.p,
                "q": params.q,
                "labels": sample.labels.labels(),
                "theta": sample.theta,
                "clamped_pairs": sample.clamped_pairs,
            });
            write_generated(sink, &meta, &sample.graph, extra, &a.common)?;
        }
        GenCommand::Lcd(a) => {
            let sample = gen_lcd(&LcdParams {
                n: a.n,
                m: a.m,
                seed: a.common.seed,
            })?;
            let meta = Meta::new("gen lcd", Some(a.common.seed), a);
            let extra = json!({ "multigraph_edges": sample.draft.edge_count() });
            write_generated(sink, &meta, &sample.graph, extra, &a.common)?;
        }
    }
    Ok(Status::Success)
}

fn one_row_table(pairs: &[(&str, String)]) -> Table {
    let mut t = Table::new(&pairs.iter().map(|(k, _)| *k).collect::<Vec<_>>());
    t.push(pairs.iter().map(|(_, v)| v.clone()).collect());
    t
}

fn theory_cmd(cmd: &TheoryCommand, sink: &Sink) -> Result<Status> {
    let name = match cmd {
        TheoryCommand::RhoOfR { .. } => "theory rho-of-r",
        TheoryCommand::ROfRho { .. } => "theory r-of-rho",
        TheoryCommand::LcdM { .. } => "theory lcd-m",
        TheoryCommand::LcdRho { .. } => "theory lcd-rho",
        TheoryCommand::Dcbm { .. } => "theory dcbm",
        TheoryCommand::Classify { .. } => "theory classify",
    };
    let meta = Meta::new(name, None, cmd);
    match *cmd {
        TheoryCommand::RhoOfR { r, k } => {
            let rho = theory::rho_of_r(r, k)?;
            let d = theory::rho_of_r_derivative(r, k)?;
            sink.emit(&meta, json!({ "r": r, "k": k, "rho": rho, "derivative": d }), || {
                one_row_table(&[
                    ("r", cell(r)),
                    ("k", cell(k)),
                    ("rho", cell(rho)),
                    ("derivative", cell(d)),
                ])
            })?;
        }
        TheoryCommand::ROfRho { rho, k } => {
            let r = theory::r_of_rho(rho, k)?;
            sink.emit(&meta, json!({ "rho": rho, "k": k, "r": r }), || {
                one_row_table(&[("rho", cell(rho)), ("k", cell(k)), ("r", cell(r))])
            })?;
        }
        TheoryCommand::LcdM { rho } => {
            let m = theory::m_of_rho(rho)?;
            let asym = theory::lcd_rho_asymptote(m);
            sink.emit(&meta, json!({ "rho": rho, "m": m, "asymptote": asym }), || {
                one_row_table(&[("rho", cell(rho)), ("m", cell(m)), ("asymptote", cell(asym))])
            })?;
        }
        TheoryCommand::LcdRho { m } => {
            if m == 0 {
                bail!("m must be at least 1");
            }
            let rho = theory::lcd_rho_asymptote(m);
            sink.emit(&meta, json!({ "m": m, "rho": rho }), || {
                one_row_table(&[("m", cell(m)), ("rho", cell(rho))])
            })?;
        }
        TheoryCommand::Dcbm { p, q, k, mean_theta } => {
            let c = theory::dcbm_population(p, q, k, mean_theta)?;
            sink.emit(&meta, c, || {
                one_row_table(&[
                    ("p", cell(c.p)),
                    ("q", cell(c.q)),
                    ("k", cell(c.k)),
                    ("mean_theta", cell(c.mean_theta)),
                    ("e_pop", cell(c.e_pop)),
                    ("v_pop", cell(c.v_pop)),
                    ("t_pop", cell(c.t_pop)),
                    ("rho_pop", cell(c.rho_pop)),
                    ("cc_pop", cell(c.cc_pop)),
                ])
            })?;
        }
        TheoryCommand::Classify { rho, er_halfwidth } => {
            let c = classify_model(Some(rho), er_halfwidth);
            sink.emit(&meta, c, || {
                one_row_table(&[
                    ("rho", cell(rho)),
                    ("kind", format!("{:?}", c.kind)),
                    ("pa_upper", cell(c.bands.pa_upper)),
                    ("er_lower", cell(c.bands.er_lower)),
                    ("er_upper", cell(c.bands.er_upper)),
                ])
            })?;
        }
    }
    Ok(Status::Success)
}

/// A network family in a power configuration: either by average degree
/// (`n, k, r, lambda[, theta]`) or by edge probabilities (`n, k, p, q[, pi, theta]`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkSpec {
    Degree(DegreeDesign),
    Direct {
        n: usize,
        k: usize,
        p: f64,
        q: f64,
        #[serde(default)]
        pi: Option<Vec<f64>>,
        #[serde(default)]
        theta: ThetaSpec,
    },
}

impl NetworkSpec {
    fn params(&self, seed: u64) -> ncc_core::Result<DcbmParams> {
        match self {
            NetworkSpec::Degree(d) => d.params(seed),
            NetworkSpec::Direct { n, k, p, q, pi, theta } => {
                let mut params = DcbmParams::balanced(*n, *k, *p, *q, theta.clone(), seed);
                if let Some(pi) = pi {
                    params.pi = pi.clone();
                }
                params.validate()?;
                Ok(params)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerConfig {
    pub first: NetworkSpec,
    pub second: NetworkSpec,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_alpha() -> f64 {
    0.05
}

fn default_reps() -> usize {
    100
}

fn k_or_default(k: Option<usize>) -> usize {
    k.unwrap_or_else(|| {
        log::warn!("number of communities not given; assuming K = 2");
        2
    })
}

fn test_cmd(cmd: &TestCommand, sink: &Sink) -> Result<Status> {
    match cmd {
        TestCommand::TwoSample {
            first,
            second,
            k,
            alpha,
        } => {
            let k = k_or_default(*k);
            let (g1, g2) = (load(first)?.graph, load(second)?.graph);
            let t = two_sample_test(&g1, &g2, k, *alpha)?;
            let meta = Meta::new("test two-sample", None, cmd);
            sink.emit(&meta, t, || {
                one_row_table(&[
                    ("rho1_hat", cell(t.rho1_hat)),
                    ("rho2_hat", cell(t.rho2_hat)),
                    ("d1", cell(t.d1)),
                    ("d2", cell(t.d2)),
                    ("k", cell(t.k)),
                    ("alpha", cell(t.alpha)),
                    ("threshold", cell(t.threshold)),
                    ("statistic", cell(t.statistic)),
                    ("reject", cell(t.reject)),
                    ("plugin_z", opt_cell(t.plugin_z)),
                ])
            })?;
        }
        TestCommand::Ci { input, alpha } => {
            let g = load(input)?.graph;
            let e = rho_confidence_interval(&g, *alpha)?;
            let meta = Meta::new("test ci", None, cmd);
            sink.emit(&meta, e, || {
                one_row_table(&[
                    ("rho_hat", cell(e.rho_hat)),
                    ("n", cell(e.n)),
                    ("triangles", cell(e.triangles)),
                    ("std_err", cell(e.std_err)),
                    ("alpha", cell(e.alpha)),
                    ("z", cell(e.z)),
                    ("ci_low", cell(e.ci_low)),
                    ("ci_high", cell(e.ci_high)),
                ])
            })?;
        }
        TestCommand::Power { config, reps, seed } => {
            let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg: PowerConfig =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
            if let Some(r) = reps {
                cfg.reps = *r;
            }
            let seed = seed.or(cfg.seed).unwrap_or(crate::DEFAULT_SEED);
            cfg.seed = Some(seed);
            let k = k_or_default(cfg.k);
            cfg.k = Some(k);
            // fail fast on an unusable family
            cfg.first.params(seed)?;
            cfg.second.params(seed)?;
            let report = power_experiment_with(cfg.reps, seed, k, cfg.alpha, |s, which| {
                if which == 0 {
                    cfg.first.params(s)
                } else {
                    cfg.second.params(s)
                }
            })?;
            let meta = Meta::new("test power", Some(seed), &cfg);
            sink.emit(&meta, &report, || {
                one_row_table(&[
                    ("reps", cell(report.reps)),
                    ("rejections", cell(report.rejections)),
                    ("degenerate", cell(report.degenerate)),
                    ("power", cell(report.power)),
                    ("master_seed", cell(report.master_seed)),
                ])
            })?;
        }
    }
    Ok(Status::Success)
}

fn parse_methods(names: &[String]) -> Result<Vec<SampleMethod>> {
    if names.iter().any(|n| n.eq_ignore_ascii_case("all")) {
        return Ok(SampleMethod::ALL.to_vec());
    }
    names
        .iter()
        .map(|n| n.parse::<SampleMethod>().map_err(anyhow::Error::from))
        .collect()
}

fn write_subgraph(path: &Path, file: &EdgeListFile, sub: &ncc_core::Subgraph) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for (i, &parent) in sub.mapping.iter().enumerate() {
        writeln!(w, "# map {i} {}", file.name_of(parent as usize))?;
    }
    write_edge_list(&sub.graph, &mut w)?;
    w.flush()?;
    Ok(())
}

fn sample_cmd(a: &SampleArgs, sink: &Sink) -> Result<Status> {
    let file = load(&a.input)?;
    let specs: Vec<SampleSpec> = parse_methods(&a.method)?
        .into_iter()
        .map(|m| SampleSpec {
            flyback_p: a.flyback_p,
            jump_p: a.jump_p,
            forward_p: a.forward_p,
            max_stall_steps: a.max_stall_steps,
            ..SampleSpec::new(m, a.fraction, a.seed)
        })
        .collect();
    let report = evaluate_samplers(&file.graph, &specs, a.reps, a.seed)?;
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let jobs = specs.len() * a.reps;
        let subs = exec::map_indexed(jobs, Exec::default(), |job| {
            let (si, rep) = (job / a.reps, job % a.reps);
            sample(&file.graph, &specs[si].with_seed(replicate_seed(a.seed, si, rep)))
        });
        for (job, sub) in subs.into_iter().enumerate() {
            let (si, rep) = (job / a.reps, job % a.reps);
            let path = dir.join(format!("{}_{rep:04}.edges", specs[si].method));
            write_subgraph(&path, &file, &sub?)?;
        }
    }
    let meta = Meta::new("sample", Some(a.seed), a);
    sink.emit(&meta, &report, || {
        if a.per_replicate {
            let mut t = Table::new(&["method", "fraction", "rep", "rho_hat", "original_rho"]);
            for m in &report.methods {
                for (rep, v) in m.values.iter().enumerate() {
                    t.push(vec![
                        m.method.to_string(),
                        cell(m.fraction),
                        cell(rep),
                        opt_cell(*v),
                        opt_cell(report.original_rho),
                    ]);
                }
            }
            t
        } else {
            let mut t = Table::new(&[
                "method",
                "fraction",
                "reps",
                "defined",
                "undefined",
                "mean",
                "sd",
                "abs_bias",
                "original_rho",
            ]);
            for m in &report.methods {
                t.push(vec![
                    m.method.to_string(),
                    cell(m.fraction),
                    cell(m.reps),
                    cell(m.defined),
                    cell(m.undefined),
                    opt_cell(m.mean),
                    opt_cell(m.sd),
                    opt_cell(m.abs_bias),
                    opt_cell(report.original_rho),
                ]);
            }
            t
        }
    })?;
    Ok(Status::Success)
}

fn series(a: &SeriesArgs, sink: &Sink) -> Result<Status> {
    let s = read_series(&a.manifest).with_context(|| format!("reading series {}", a.manifest.display()))?;
    let rows = series_stats(&s);
    let meta = Meta::new("series", None, a);
    match sink.format {
        crate::output::Format::Csv => {
            let mut w = sink.writer()?;
            write_series_csv(&rows, &mut w)?;
            w.flush()?;
        }
        crate::output::Format::Json => sink.emit(&meta, json!({ "rows": rows }), Table::default)?,
    }
    Ok(Status::Success)
}

fn wpc(a: &WpcArgs, sink: &Sink) -> Result<Status> {
    let records = read_sponsorship_csv(&a.records).with_context(|| format!("reading {}", a.records.display()))?;
    let rule = match a.rule {
        RuleArg::Or => Symmetrize::Or,
        RuleArg::And => Symmetrize::And,
    };
    let net = build_wpc_network(&records, a.threshold, rule)?;
    if let Some(path) = &a.edges_out {
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        writeln!(w, "# wpc threshold={} rule={:?}", a.threshold, a.rule)?;
        for (u, v) in net.graph.edges() {
            writeln!(w, "{} {}", net.names[u as usize], net.names[v as usize])?;
        }
        for (v, name) in net.names.iter().enumerate() {
            if net.graph.degree(v) == 0 {
                writeln!(w, "# isolated {name}")?;
            }
        }
        w.flush()?;
    }
    let stats = graph_stats(&net.graph).ok();
    let rho_hat = stats.and_then(|s| s.rho_hat);
    let body = json!({
        "n": net.graph.n(),
        "edges": net.graph.edge_count(),
        "rho_hat": rho_hat,
        "cc_hat": stats.and_then(|s| s.cc_hat),
        "records": records.len(),
    });
    let meta = Meta::new("wpc", None, a);
    sink.emit(&meta, body, || {
        one_row_table(&[
            ("n", cell(net.graph.n())),
            ("edges", cell(net.graph.edge_count())),
            ("rho_hat", opt_cell(rho_hat)),
            ("cc_hat", opt_cell(stats.and_then(|s| s.cc_hat))),
            ("records", cell(records.len())),
        ])
    })?;
    Ok(Status::Success)
}
