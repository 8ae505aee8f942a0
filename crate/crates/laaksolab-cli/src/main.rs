//! Batch CLI over the laaksolab crate: construction, metrics, moduli,
//! certified bounds, embeddings, certification and combined reports.
//!
//! Commands are single-process and deterministic: all randomness is seeded
//! through flags, outputs are byte-stable across runs, and every command
//! drops a run manifest next to its outputs. `LAAKSOLAB_BUDGET` overrides
//! the default edge-count budget. Failures exit nonzero with a
//! machine-readable error object on stderr.

mod manifest;

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use laaksolab::certifier::{amplify, lower_bound};
use laaksolab::convexity::{
    modulus_for_target, parse_target, LensSearchConfig, ModulusEntry, RoundBallModulus,
    TargetDescriptor,
};
use laaksolab::embedder::{minimize_distortion, OptimizerConfig, Target};
use laaksolab::spaces::{
    build_chain, build_gamma, build_linf_set, build_scaled_union, build_tree,
};
use laaksolab::{io, Budget, Dyadic};

use manifest::Manifest;

#[derive(Parser)]
#[command(name = "laaksolab", version, about = "metric-geometry laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a level graph (--level) or a glued chain (--chain).
    Gamma {
        #[arg(long, conflicts_with = "chain")]
        level: Option<u32>,
        #[arg(long)]
        chain: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the exact path metric of a graph file.
    Metric {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the complete binary tree of the given depth.
    Tree {
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the recursive sup-norm point set of the given depth.
    Linf {
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the scaled union of levels 1..=N and emit its metric.
    Scaled {
        #[arg(long)]
        levels: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit a round-ball modulus table for a target.
    Modulus {
        #[arg(long)]
        target: String,
        /// Comma-separated epsilon grid, e.g. 0.1,0.2,0.5.
        #[arg(long)]
        eps: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit certified distortion lower bounds over a level range.
    Bound {
        #[arg(long)]
        target: String,
        /// Inclusive range, e.g. 1..4.
        #[arg(long)]
        levels: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for a low-distortion embedding of a metric file.
    Embed {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        p: f64,
        /// Target dimension; defaults to the number of points.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output prefix: writes <prefix>.csv and <prefix>.json.
        #[arg(long)]
        out: String,
    },
    /// Run the amplification trace of an embedding over a graph.
    Certify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Combine embedding sidecars into a lower-bound vs empirical report.
    Report {
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "hilbert")]
        target: String,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli.command) {
        let kind = err
            .downcast_ref::<laaksolab::Error>()
            .map(|e| e.kind())
            .unwrap_or("error");
        let obj = json!({ "error": { "kind": kind, "message": format!("{err:#}") } });
        eprintln!("{obj}");
        std::process::exit(1);
    }
}

fn run(command: Command) -> Result<()> {
    let budget = Budget::from_env()?;
    match command {
        Command::Gamma { level, chain, out } => cmd_gamma(level, chain, &out, budget),
        Command::Metric { input, out } => cmd_metric(&input, &out),
        Command::Tree { depth, out } => cmd_tree(depth, &out, budget),
        Command::Linf { depth, out } => cmd_linf(depth, &out, budget),
        Command::Scaled { levels, out } => cmd_scaled(levels, &out, budget),
        Command::Modulus { target, eps, out } => cmd_modulus(&target, &eps, &out),
        Command::Bound {
            target,
            levels,
            out,
        } => cmd_bound(&target, &levels, &out),
        Command::Embed {
            space,
            p,
            dim,
            restarts,
            seed,
            out,
        } => cmd_embed(&space, p, dim, restarts, seed, &out),
        Command::Certify {
            graph,
            embedding,
            target,
            out,
        } => cmd_certify(&graph, &embedding, &target, &out),
        Command::Report {
            inputs,
            out,
            target,
        } => cmd_report(&inputs, &out, &target),
    }
}

fn manifest_path_for(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    name.push_str(".manifest.json");
    out.with_file_name(name)
}

fn cmd_gamma(level: Option<u32>, chain: Option<u32>, out: &Path, budget: Budget) -> Result<()> {
    let (params, graph) = match (level, chain) {
        (Some(n), None) => (json!({"level": n, "out": out.display().to_string()}),
            build_gamma(n, budget)?),
        (None, Some(n)) => (json!({"chain": n, "out": out.display().to_string()}),
            build_chain(n, budget)?),
        _ => bail!("gamma needs exactly one of --level or --chain"),
    };
    let mut m = Manifest::new("gamma", params);
    io::write_graph(&graph, out)?;
    m.record_output(out);
    m.write(&manifest_path_for(out))
}

fn cmd_metric(input: &Path, out: &Path) -> Result<()> {
    let mut m = Manifest::new(
        "metric",
        json!({"in": input.display().to_string(), "out": out.display().to_string()}),
    );
    let graph = io::read_graph(input)?;
    m.record_input(input);
    let metric = graph.path_metric()?;
    io::write_metric(&metric, out)?;
    m.record_output(out);
    m.write(&manifest_path_for(out))
}

fn cmd_tree(depth: u32, out: &Path, budget: Budget) -> Result<()> {
    let mut m = Manifest::new(
        "tree",
        json!({"depth": depth, "out": out.display().to_string()}),
    );
    let tree = build_tree(depth, budget)?;
    io::write_tree(&tree, out)?;
    m.record_output(out);
    m.write(&manifest_path_for(out))
}

fn cmd_linf(depth: u32, out: &Path, budget: Budget) -> Result<()> {
    let mut m = Manifest::new(
        "linf",
        json!({"depth": depth, "out": out.display().to_string()}),
    );
    let set = build_linf_set(depth, budget)?;
    io::write_linf(&set, out)?;
    m.record_output(out);
    m.write(&manifest_path_for(out))
}

fn cmd_scaled(levels: u32, out: &Path, budget: Budget) -> Result<()> {
    let mut m = Manifest::new(
        "scaled",
        json!({"levels": levels, "out": out.display().to_string()}),
    );
    let metric = build_scaled_union(levels, budget)?;
    io::write_metric(&metric, out)?;
    m.record_output(out);
    m.write(&manifest_path_for(out))
}

fn parse_eps_list(eps: &str) -> Result<Vec<f64>> {
    let grid: Vec<f64> = eps
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad epsilon `{s}`"))
        })
        .collect::<Result<_>>()?;
    if grid.is_empty() {
        bail!("empty epsilon list");
    }
    Ok(grid)
}

fn cmd_modulus(target: &str, eps: &str, out: &Path) -> Result<()> {
    let mut m = Manifest::new(
        "modulus",
        json!({"target": target, "eps": eps, "out": out.display().to_string()}),
    );
    let grid = parse_eps_list(eps)?;
    let entries: Vec<ModulusEntry> = match parse_target(target)? {
        TargetDescriptor::Hilbert => {
            let mut grid = grid;
            grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
            grid.iter()
                .map(|&epsilon| {
                    laaksolab::convexity::hilbert_modulus(epsilon).map(|delta| ModulusEntry {
                        epsilon,
                        delta,
                        error_bar: 0.0,
                    })
                })
                .collect::<laaksolab::Result<_>>()?
        }
        TargetDescriptor::Lp { .. } => {
            let modulus = modulus_for_target(target, &grid, &LensSearchConfig::default())?;
            modulus.entries().expect("tabulated").to_vec()
        }
    };
    std::fs::write(out, io::modulus_table_to_csv(&entries))?;
    m.record_output(out);
    m.write(&manifest_path_for(out))
}

fn parse_level_range(levels: &str) -> Result<(u32, u32)> {
    let (a, b) = levels
        .split_once("..")
        .ok_or_else(|| anyhow!("level range must look like a..b, got `{levels}`"))?;
    let lo: u32 = a.trim().parse().context("bad range start")?;
    let hi: u32 = b.trim().parse().context("bad range end")?;
    if lo == 0 || hi < lo {
        bail!("level range must satisfy 1 <= a <= b");
    }
    Ok((lo, hi))
}

fn modulus_for(target: &str) -> Result<RoundBallModulus> {
    Ok(modulus_for_target(
        target,
        &laaksolab::convexity::default_epsilon_grid(),
        &LensSearchConfig::default(),
    )?)
}

fn cmd_bound(target: &str, levels: &str, out: &Path) -> Result<()> {
    let mut m = Manifest::new(
        "bound",
        json!({"target": target, "levels": levels, "out": out.display().to_string()}),
    );
    let (lo, hi) = parse_level_range(levels)?;
    let modulus = modulus_for(target)?;
    let rows: Vec<_> = (lo..=hi)
        .map(|n| lower_bound(n, &modulus))
        .collect::<laaksolab::Result<_>>()?;
    std::fs::write(out, io::bounds_to_csv(&rows))?;
    m.record_output(out);
    m.write(&manifest_path_for(out))
}

fn cmd_embed(
    space_file: &Path,
    p: f64,
    dim: Option<usize>,
    restarts: usize,
    seed: u64,
    out_prefix: &str,
) -> Result<()> {
    let mut m = Manifest::new(
        "embed",
        json!({
            "space": space_file.display().to_string(),
            "p": p,
            "dim": dim,
            "restarts": restarts,
            "seed": seed,
            "out": out_prefix,
        }),
    );
    let space = io::read_metric(space_file)?;
    m.record_input(space_file);
    let dim = dim.unwrap_or(space.len());
    let cfg = OptimizerConfig {
        restarts,
        seed,
        ..OptimizerConfig::default()
    };
    let embedding = minimize_distortion(&space, Target::new(p, dim)?, &cfg)?;
    let csv_path = PathBuf::from(format!("{out_prefix}.csv"));
    let sidecar_path = PathBuf::from(format!("{out_prefix}.json"));
    io::write_embedding(&embedding, &csv_path)?;
    io::write_json(
        &io::embedding_sidecar(&embedding, &cfg, &space_file.display().to_string()),
        &sidecar_path,
    )?;
    m.record_output(&csv_path);
    m.record_output(&sidecar_path);
    m.write(&PathBuf::from(format!("{out_prefix}.manifest.json")))
}

fn cmd_certify(graph: &Path, embedding: &Path, target: &str, out: &Path) -> Result<()> {
    let mut m = Manifest::new(
        "certify",
        json!({
            "graph": graph.display().to_string(),
            "embedding": embedding.display().to_string(),
            "target": target,
            "out": out.display().to_string(),
        }),
    );
    let modulus = modulus_for(target)?;
    let p = match parse_target(target)? {
        TargetDescriptor::Hilbert => 2.0,
        TargetDescriptor::Lp { p, .. } => match p {
            laaksolab::convexity::PNorm::Finite(v) => v,
            laaksolab::convexity::PNorm::Inf => unreachable!("rejected by modulus dispatch"),
        },
    };
    let g = io::read_graph(graph)?;
    m.record_input(graph);
    let metric = g.path_metric()?;
    let e = io::read_embedding(embedding, &metric, p)?;
    m.record_input(embedding);
    let trace = amplify(&g, &e, &modulus)?;
    io::write_json(&io::trace_to_json(&trace), out)?;
    m.record_output(out);
    m.write(&manifest_path_for(out))
}

/// One report row: a sidecar's statistics joined with the certified floor
/// when the space is recognizably a level graph.
fn report_row(sidecar_path: &Path, modulus: &RoundBallModulus) -> Result<Value> {
    let text = std::fs::read_to_string(sidecar_path)?;
    let sidecar: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", sidecar_path.display()))?;
    let stats = sidecar
        .get("statistics")
        .ok_or_else(|| anyhow!("{}: missing statistics", sidecar_path.display()))?;
    let distortion = stats
        .get("distortion")
        .and_then(Value::as_f64)
        .ok_or_else(|| anyhow!("{}: missing distortion", sidecar_path.display()))?;
    let l_sym = stats.get("l_sym").and_then(Value::as_f64).unwrap_or(f64::NAN);
    let space_file = sidecar
        .get("space")
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();

    // Classify the space from the metric itself: level graphs have
    // (2*4^n + 4)/3 points and diameter 2^n; trees have 2^(d+1) - 1 points
    // and diameter 2d.
    let mut kind = "other".to_string();
    let mut level: Option<u32> = None;
    let mut points: Option<usize> = None;
    let space_path = {
        let p = PathBuf::from(&space_file);
        if p.is_relative() {
            sidecar_path.parent().map(|d| d.join(&p)).unwrap_or(p)
        } else {
            p
        }
    };
    if space_path.is_file() {
        if let Ok(space) = io::read_metric(&space_path) {
            points = Some(space.len());
            if let Some(diam) = space.diameter() {
                for n in 1..=32u32 {
                    if diam == Dyadic::from_int(1 << n)
                        && space.len() as u64 == (2 * 4u64.pow(n) + 4) / 3
                    {
                        kind = "gamma".to_string();
                        level = Some(n);
                        break;
                    }
                    if diam == Dyadic::from_int(2 * n as i64)
                        && space.len() as u64 == 2u64.pow(n + 1) - 1
                    {
                        kind = "tree".to_string();
                        level = Some(n);
                        break;
                    }
                }
            }
        }
    }
    let bound = match (kind.as_str(), level) {
        ("gamma", Some(n)) => Some(lower_bound(n, modulus)?),
        _ => None,
    };
    Ok(json!({
        "input": sidecar_path.display().to_string(),
        "space": space_file,
        "kind": kind,
        "level": level,
        "points": points,
        "distortion": distortion,
        "l_sym": l_sym,
        "l_star": bound.as_ref().map(|b| b.l_star),
        "d_star": bound.as_ref().map(|b| b.d_star),
        "gap": bound.as_ref().map(|b| distortion / b.d_star),
    }))
}

fn cmd_report(inputs: &[PathBuf], out_dir: &Path, target: &str) -> Result<()> {
    let mut m = Manifest::new(
        "report",
        json!({
            "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "out": out_dir.display().to_string(),
            "target": target,
        }),
    );
    std::fs::create_dir_all(out_dir)?;
    let modulus = modulus_for(target)?;
    let mut rows = Vec::new();
    for input in inputs {
        rows.push(report_row(input, &modulus)?);
        m.record_input(input);
    }
    let json_path = out_dir.join("report.json");
    io::write_json(
        &json!({"modulus": modulus.descriptor(), "rows": rows}),
        &json_path,
    )?;
    let mut csv = String::from("input,space,kind,level,points,distortion,l_sym,l_star,d_star,gap\n");
    let cell = |v: &Value| -> String {
        match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    };
    for row in &rows {
        let fields = [
            "input", "space", "kind", "level", "points", "distortion", "l_sym", "l_star",
            "d_star", "gap",
        ];
        let line: Vec<String> = fields.iter().map(|f| cell(&row[*f])).collect();
        csv.push_str(&line.join(","));
        csv.push('\n');
    }
    let csv_path = out_dir.join("report.csv");
    std::fs::write(&csv_path, csv)?;
    m.record_output(&json_path);
    m.record_output(&csv_path);
    m.write(&out_dir.join("manifest.json"))
}
