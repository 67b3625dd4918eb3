use clap::{Args, Parser, Subcommand, ValueEnum};
use kcore::graph::{gen_ba, gen_cube, gen_er, gen_grid, gen_hcns, load_binary, load_edge_list, save_binary, GRAPH_MAGIC};
use kcore::oracle::verify_coreness;
use kcore::{bz_coreness, decompose, kcore_subgraph, BucketStrategy, CorenessArray, CsrGraph, PeelConfig, PeelKind, PeelStats, SamplingParams};
use serde::Serialize;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kcore", version, about = "Parallel k-core decomposition")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic graph and write it as binary CSR.
    Gen(GenArgs),
    /// Compute coreness (or a k'-core) of a graph.
    Run(RunArgs),
    /// Check a coreness file against the sequential oracle.
    Verify {
        graph: PathBuf,
        coreness: PathBuf,
    },
    /// Time a set of configurations after verifying each one.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Grid,
    Cube,
    Hcns,
    Ba,
    Er,
}

#[derive(Args)]
struct GenArgs {
    kind: Kind,
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long)]
    h: Option<usize>,
    #[arg(long)]
    x: Option<usize>,
    #[arg(long)]
    y: Option<usize>,
    #[arg(long)]
    z: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    /// Average degree (er only).
    #[arg(long)]
    avg: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long, default_value = "online")]
    peel: String,
    /// Defaults to on for online peeling and off for offline.
    #[arg(long)]
    sampling: Option<OnOff>,
    /// Sampling confidence constant.
    #[arg(long)]
    c: Option<u32>,
    /// Local queue capacity; 0 disables local search. Defaults to 128 for
    /// online peeling and 0 for offline.
    #[arg(long)]
    vgc: Option<usize>,
    #[arg(long, default_value = "auto")]
    bucketing: String,
    /// Worker threads; 0 means one per hardware thread.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    input: PathBuf,
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Emit the vertices of the maximum k'-core instead of coreness.
    #[arg(long)]
    kprime: Option<u32>,
    /// Coreness file (KCC1), or the k'-core vertex list with --kprime.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Stats JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    input: PathBuf,
    /// Comma-separated config labels such as `online:vgc128:sampling:hbs`;
    /// defaults to every legal combination.
    #[arg(long, value_delimiter = ',')]
    configs: Vec<String>,
    #[arg(long, default_value_t = 5)]
    repeat: usize,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report JSON.
    #[arg(short, long)]
    report: Option<PathBuf>,
}

enum Fail {
    Mismatch(String),
    Format(String),
    Param(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Mismatch(_) => 1,
            Fail::Format(_) => 2,
            Fail::Param(_) => 3,
        }
    }
}

impl From<kcore::Error> for Fail {
    fn from(e: kcore::Error) -> Self {
        use kcore::Error::*;
        let msg = e.to_string();
        match e {
            Parse { .. } | Format(_) | InputRange { .. } | LengthMismatch { .. } | Io(_) => Fail::Format(msg),
            Capacity(_) | Parameter(_) | Config(_) | BagOverflow { .. } => Fail::Param(msg),
        }
    }
}

type Res<T> = Result<T, Fail>;

fn open(path: &Path) -> Res<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Fail::Format(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Res<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Fail::Param(format!("{}: {e}", path.display())))
}

/// Binary CSR when the file starts with the graph magic, else a text edge list.
fn load_graph(path: &Path) -> Res<CsrGraph> {
    let mut r = open(path)?;
    let binary = r.fill_buf().map_err(kcore::Error::from)?.starts_with(GRAPH_MAGIC);
    if binary {
        Ok(load_binary(r)?)
    } else {
        Ok(kcore::graph::from_edges(&load_edge_list(r)?)?)
    }
}

fn need(v: Option<usize>, name: &str) -> Res<usize> {
    v.ok_or_else(|| Fail::Param(format!("missing --{name}")))
}

fn cmd_gen(a: GenArgs) -> Res<()> {
    let g = match a.kind {
        Kind::Grid => gen_grid(need(a.w, "w")?, need(a.h, "h")?)?,
        Kind::Cube => gen_cube(need(a.x, "x")?, need(a.y, "y")?, need(a.z, "z")?)?,
        Kind::Hcns => gen_hcns(need(a.kmax, "kmax")?, a.seed)?,
        Kind::Ba => gen_ba(need(a.n, "n")?, need(a.a, "a")?, a.seed)?,
        Kind::Er => gen_er(need(a.n, "n")?, a.avg.ok_or_else(|| Fail::Param("missing --avg".into()))?, a.seed)?,
    };
    let mut w = create(&a.out)?;
    save_binary(&g, &mut w)?;
    w.flush().map_err(kcore::Error::from)?;
    println!("n = {}, m2 = {}", g.n(), g.m2());
    Ok(())
}

fn build_config(a: &ConfigArgs) -> Res<PeelConfig> {
    let peel: PeelKind = a.peel.parse()?;
    let online = peel == PeelKind::Online;
    let sampling = a.sampling.map_or(online, |s| s == OnOff::On);
    let mut params = SamplingParams::default();
    if let Some(c) = a.c {
        params.c = c as f64;
    }
    let cfg = PeelConfig {
        peel,
        sampling: sampling.then_some(params),
        vgc: a.vgc.unwrap_or(if online { kcore::engine::DEFAULT_VGC } else { 0 }),
        bucketing: a.bucketing.parse::<BucketStrategy>()?,
        threads: a.threads,
        seed: a.seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Res<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(|e| Fail::Param(e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Fail::Param(e.to_string()))
}

fn cmd_run(a: RunArgs) -> Res<()> {
    let cfg = build_config(&a.cfg)?;
    let g = load_graph(&a.input)?;
    if let Some(kp) = a.kprime {
        let vs = kcore_subgraph(&g, kp, &cfg)?;
        println!("{}-core: {} vertices", kp, vs.len());
        let text: String = vs.iter().map(|v| format!("{v}\n")).collect();
        match &a.out {
            Some(p) => create(p)?.write_all(text.as_bytes()).map_err(kcore::Error::from)?,
            None => print!("{text}"),
        }
        return Ok(());
    }
    let (k, stats) = decompose(&g, &cfg)?;
    println!(
        "kmax = {} ({} rounds, {} subrounds, {} restarts, {:.1} ms)",
        stats.kmax, stats.rounds, stats.subrounds, stats.restarts, stats.wall_ms
    );
    if let Some(p) = &a.out {
        let mut w = create(p)?;
        k.save(&mut w)?;
        w.flush().map_err(kcore::Error::from)?;
    }
    if let Some(p) = &a.stats {
        write_json(p, &stats)?;
    }
    Ok(())
}

fn cmd_verify(graph: &Path, coreness: &Path) -> Res<()> {
    let g = load_graph(graph)?;
    let mut buf = Vec::new();
    open(coreness)?.read_to_end(&mut buf).map_err(kcore::Error::from)?;
    let k = CorenessArray::load(&buf[..])?;
    match verify_coreness(&g, &k)? {
        None => {
            println!("ok: {} vertices, kmax = {}", k.len(), k.kmax());
            Ok(())
        }
        Some(m) => Err(Fail::Mismatch(format!("vertex {} has coreness {}, expected {}", m.vertex, m.got, m.expected))),
    }
}

#[derive(Serialize)]
struct BenchRecord {
    label: String,
    verified: bool,
    mean_wall_ms: f64,
    runs: Vec<PeelStats>,
}

fn cmd_bench(a: BenchArgs) -> Res<()> {
    let g = load_graph(&a.input)?;
    let cfgs: Vec<PeelConfig> = if a.configs.is_empty() {
        PeelConfig::matrix()
    } else {
        a.configs.iter().map(|l| PeelConfig::from_label(l)).collect::<kcore::Result<_>>()?
    };
    if a.repeat == 0 {
        return Err(Fail::Param("--repeat must be at least 1".into()));
    }
    let truth = bz_coreness(&g);
    let mut report = Vec::new();
    println!("{:<36} {:>10} {:>8} {:>10}", "config", "mean ms", "rounds", "subrounds");
    for cfg in cfgs {
        let cfg = cfg.with_threads(a.threads).with_seed(a.seed);
        let (k, _) = decompose(&g, &cfg)?;
        if k != truth {
            let v = (0..k.len()).find(|&v| k.values[v] != truth.values[v]).unwrap_or(0);
            return Err(Fail::Mismatch(format!("{}: vertex {v} has coreness {}, expected {}", cfg.label(), k.values[v], truth.values[v])));
        }
        let runs = (0..a.repeat).map(|_| decompose(&g, &cfg).map(|r| r.1)).collect::<kcore::Result<Vec<_>>>()?;
        let mean = runs.iter().map(|s| s.wall_ms).sum::<f64>() / runs.len() as f64;
        println!("{:<36} {:>10.2} {:>8} {:>10}", cfg.label(), mean, runs[0].rounds, runs[0].subrounds);
        report.push(BenchRecord { label: cfg.label(), verified: true, mean_wall_ms: mean, runs });
    }
    if let Some(p) = &a.report {
        write_json(p, &report)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    let r = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Run(a) => cmd_run(a),
        Cmd::Verify { graph, coreness } => cmd_verify(&graph, &coreness),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Fail::Mismatch(m) | Fail::Format(m) | Fail::Param(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
