//! End-to-end acceptance suite. One PASS/FAIL line per criterion; the
//! process exits nonzero if any hard criterion fails.

use kcore::bucketing::BucketStrategy;
use kcore::graph::{gen_ba, gen_cube, gen_er, gen_grid, gen_hcns};
use kcore::oracle::{bz_coreness, CorenessArray};
use kcore::sampler::coin;
use kcore::{
    decompose, decompose_once, decompose_traced, kcore_subgraph, CsrGraph, HashBag, PeelConfig, PeelStats,
    SamplingParams, Vertex,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::ExitCode;
use std::time::Instant;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

struct Suite {
    graphs: Vec<(String, CsrGraph)>,
    truth: Vec<CorenessArray>,
}

fn suite() -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut graphs = Vec::new();
    for i in 0..500 {
        let n = rng.gen_range(1..=256);
        let avg = [1.0, 4.0, 16.0][i % 3];
        let seed = rng.gen();
        graphs.push((format!("er(n={n},avg={avg},seed={seed})"), gen_er(n, avg, seed).unwrap()));
    }
    graphs.push(("grid(64,64)".into(), gen_grid(64, 64).unwrap()));
    graphs.push(("cube(8,8,8)".into(), gen_cube(8, 8, 8).unwrap()));
    graphs.push(("hcns(100)".into(), gen_hcns(100, 1).unwrap()));
    graphs.push(("ba(5000,8)".into(), gen_ba(5000, 8, 2).unwrap()));
    let truth = graphs.iter().map(|(_, g)| bz_coreness(g)).collect();
    Suite { graphs, truth }
}

/// The legal matrix plus a sampling config whose gate small graphs actually
/// cross, with a sample target small enough to force recoveries.
fn configs() -> Vec<PeelConfig> {
    let mut m = PeelConfig::matrix();
    let eager = SamplingParams { threshold: 0.5, mu_override: Some(6), ..Default::default() };
    for b in [BucketStrategy::Single, BucketStrategy::Hbs] {
        m.push(PeelConfig::online(kcore::engine::DEFAULT_VGC, Some(eager), b));
        m.push(PeelConfig::online(0, Some(eager), b));
    }
    m
}

fn work_witness(g: &CsrGraph, k: &CorenessArray, s: &PeelStats, sampled: bool) -> std::result::Result<(), String> {
    let expect: u64 = k.values.iter().map(|&c| 1 + c as u64).sum();
    ensure!(s.sum_active == expect, "sum_active {} != {}", s.sum_active, expect);
    ensure!(s.sum_active <= (g.n() + g.m2()) as u64, "sum_active {} > n + m2", s.sum_active);
    if !sampled {
        ensure!(s.decrements <= g.m2() as u64, "decrements {} > m2 {}", s.decrements, g.m2());
    }
    Ok(())
}

/// Criteria 1 and 3 share their runs.
fn matrix_runs(s: &Suite) -> (Check, Check) {
    let cfgs = configs();
    let mut runs = 0u64;
    let mut restarts = 0u64;
    let mut first_bad: Option<String> = None;
    let mut first_witness: Option<String> = None;
    for ((name, g), truth) in s.graphs.iter().zip(&s.truth) {
        for cfg in &cfgs {
            for t in [1, 4, 8] {
                let cfg = cfg.clone().with_threads(t).with_seed(runs);
                runs += 1;
                let (k, st) = match decompose(g, &cfg) {
                    Ok(x) => x,
                    Err(e) => {
                        first_bad.get_or_insert(format!("{name} {} t={t}: {e}", cfg.label()));
                        continue;
                    }
                };
                restarts += st.restarts;
                if &k != truth && first_bad.is_none() {
                    let v = (0..k.len()).find(|&v| k.values[v] != truth.values[v]).unwrap_or(0);
                    first_bad = Some(format!("{name} {} t={t}: vertex {v}", cfg.label()));
                }
                if let Err(e) = work_witness(g, &k, &st, cfg.sampling.is_some()) {
                    first_witness.get_or_insert(format!("{name} {} t={t}: {e}", cfg.label()));
                }
            }
        }
    }
    let c1 = match first_bad {
        Some(b) => Err(b),
        None => Ok(format!("{runs} runs over {} graphs x {} configs x 3 thread counts ({restarts} recovered restarts)", s.graphs.len(), cfgs.len())),
    };
    let c3 = match first_witness {
        Some(b) => Err(b),
        None => Ok(format!("{runs} runs")),
    };
    (c1, c3)
}

fn kmax_profiles() -> Check {
    let cfg = PeelConfig::default();
    let (k, _) = decompose(&gen_grid(300, 300).map_err(err)?, &cfg).map_err(err)?;
    ensure!(k.kmax() == 2, "grid kmax {}", k.kmax());
    let (k, _) = decompose(&gen_cube(40, 40, 40).map_err(err)?, &cfg).map_err(err)?;
    ensure!(k.kmax() == 3, "cube kmax {}", k.kmax());
    for kk in [1usize, 2, 10, 100, 500] {
        let (k, _) = decompose(&gen_hcns(kk, 7).map_err(err)?, &cfg).map_err(err)?;
        ensure!(k.kmax() as usize == kk, "hcns({kk}) kmax {}", k.kmax());
        let mut hist = vec![0usize; kk + 1];
        for &c in &k.values {
            hist[c as usize] += 1;
        }
        ensure!(hist[0] == 0 && hist[1..kk].iter().all(|&h| h == 1), "hcns({kk}) profile {:?}", &hist[..kk.min(10)]);
        ensure!(hist[kk] == kk + 1, "hcns({kk}) has {} vertices of coreness {kk}", hist[kk]);
    }
    Ok("grid 2, cube 3, hcns K for K in {1,2,10,100,500}".into())
}

fn vgc_reduction() -> Check {
    let g = gen_grid(1000, 1000).map_err(err)?;
    let run = |vgc| decompose(&g, &PeelConfig::online(vgc, None, BucketStrategy::default()));
    let (a, sa) = run(128).map_err(err)?;
    let (b, sb) = run(0).map_err(err)?;
    ensure!(a == b, "outputs differ");
    ensure!(sa.subrounds * 5 <= sb.subrounds, "subrounds {} (vgc128) vs {} (vgc0)", sa.subrounds, sb.subrounds);
    Ok(format!("subrounds {} vs {} ({:.1}x)", sa.subrounds, sb.subrounds, sb.subrounds as f64 / sa.subrounds as f64))
}

fn coin_lemma() -> std::result::Result<String, String> {
    let (n, c) = (1000f64, 2.0);
    let tp = 4.0 * c * n.ln();
    let p = 0.05;
    let t = (tp / p).ceil() as u32;
    let trials = 100_000u64;
    let low = (0..trials)
        .filter(|&trial| {
            let s = (0..t).filter(|&i| coin(trial, 0, i, p)).count() as f64;
            s < t as f64 * p / 4.0
        })
        .count();
    let freq = low as f64 / trials as f64;
    ensure!(freq < 1e-3, "low-sample frequency {freq}");
    Ok(format!("{low}/{trials} trials below tp/4"))
}

fn ba_sampling() -> std::result::Result<String, String> {
    let g = gen_ba(100_000, 20, 11).map_err(err)?;
    let truth = bz_coreness(&g);
    let mut samples = 0;
    for seed in 0..20 {
        let cfg = PeelConfig::default().with_seed(seed);
        let (k, s) = decompose(&g, &cfg).map_err(err)?;
        ensure!(s.restarts == 0, "seed {seed}: {} restarts", s.restarts);
        ensure!(k == truth, "seed {seed}: output differs from oracle");
        samples += s.samples;
    }
    ensure!(samples > 0, "sampling never engaged");
    Ok(format!("20 seeds, 0 restarts, {samples} heads total"))
}

/// Hub joined to leaves; a tiny sample target leaves the hub with too few
/// heads to notice the leaves are gone.
fn failure_injection() -> std::result::Result<String, String> {
    let leaves = 100u32;
    let edges = (1..=leaves).map(|l| (0, l)).collect();
    let g = kcore::graph::from_edges(&kcore::EdgeList { n: leaves as usize + 1, edges }).map_err(err)?;
    let truth = bz_coreness(&g);
    let p = SamplingParams { threshold: 2.0, mu_override: Some(4), ..Default::default() };
    let mut detected = 0;
    for seed in 0..256 {
        let cfg = PeelConfig::online(0, Some(p), BucketStrategy::Single).with_seed(seed);
        if let Err(d) = decompose_once(&g, &cfg).map_err(err)? {
            ensure!(d.vertex == 0, "detected on vertex {}", d.vertex);
            detected += 1;
            let (k, s) = decompose(&g, &cfg).map_err(err)?;
            ensure!(s.restarts >= 1, "seed {seed}: no restart recorded");
            ensure!(k == truth, "seed {seed}: recovered output differs");
        }
    }
    ensure!(detected > 0, "no seed triggered detection");
    Ok(format!("{detected}/256 seeds detected and recovered"))
}

fn sampling_stats() -> Check {
    let a = coin_lemma().map_err(|e| format!("(a) {e}"))?;
    let b = ba_sampling().map_err(|e| format!("(b) {e}"))?;
    let c = failure_injection().map_err(|e| format!("(c) {e}"))?;
    Ok(format!("(a) {a}; (b) {b}; (c) {c}"))
}

fn contention() -> Check {
    let g = gen_ba(100_000, 20, 3).map_err(err)?;
    let (a, on) = decompose(&g, &PeelConfig::default()).map_err(err)?;
    let (b, off) = decompose(&g, &PeelConfig { sampling: None, ..Default::default() }).map_err(err)?;
    ensure!(a == b, "outputs differ");
    ensure!(
        on.max_hot_updates * 10 <= off.max_hot_updates,
        "max hot updates {} (sampling) vs {} (plain)",
        on.max_hot_updates,
        off.max_hot_updates
    );
    Ok(format!("max hot updates {} vs {} (dmax {})", on.max_hot_updates, off.max_hot_updates, g.max_degree()))
}

fn bucketing(s: &Suite) -> Check {
    let mk = |b| PeelConfig::online(0, None, b);
    let strategies = [BucketStrategy::Single, BucketStrategy::Fixed(16), BucketStrategy::Hbs];
    for (name, g) in &s.graphs {
        let mut traces = Vec::new();
        for b in strategies {
            let (_, _, t) = decompose_traced(g, &mk(b)).map_err(err)?;
            traces.push(t);
        }
        for (i, t) in traces.iter().enumerate().skip(1) {
            ensure!(t.frontiers == traces[0].frontiers, "{name}: {} frontiers differ from single", strategies[i]);
        }
        let ins = traces[2].hbs_inserts.as_ref().ok_or("hbs produced no insert counts")?;
        for (v, &count) in ins.iter().enumerate() {
            let bound = 9 + (g.degree(v as Vertex) as f64 + 1.0).log2().ceil() as u32;
            ensure!(count <= bound, "{name}: vertex {v} inserted {count} times > {bound}");
        }
    }
    Ok(format!("{} graphs, 3 strategies", s.graphs.len()))
}

fn hashbag() -> Check {
    let per = 100_000u32;
    for seed in 0..100 {
        let mut bag = HashBag::new(8 * per as usize, seed);
        std::thread::scope(|sc| {
            for t in 0..8 {
                let bag = &bag;
                sc.spawn(move || {
                    for i in 0..per {
                        bag.insert(t * per + i).unwrap();
                    }
                });
            }
        });
        let mut out = bag.extract_all();
        out.sort_unstable();
        ensure!(out.len() == 8 * per as usize, "seed {seed}: {} elements", out.len());
        ensure!(out.iter().enumerate().all(|(i, &x)| x == i as u32), "seed {seed}: wrong multiset");
        ensure!(bag.extract_all().is_empty(), "seed {seed}: not reset");
    }
    Ok("100 seeds x 8 threads x 100000".into())
}

fn subgraphs(s: &Suite) -> Check {
    let cfgs = [PeelConfig::default(), PeelConfig::online(0, None, BucketStrategy::Single), PeelConfig::offline(BucketStrategy::Single)];
    let mut checked = 0;
    for ((name, g), truth) in s.graphs.iter().zip(&s.truth) {
        let km = truth.kmax();
        for kp in [0, 1, 2, km, km + 1] {
            let want = truth.at_least(kp);
            for cfg in &cfgs {
                let mut got = kcore_subgraph(g, kp, cfg).map_err(err)?;
                got.sort_unstable();
                ensure!(got == want, "{name} k'={kp} {}: {} vs {} vertices", cfg.label(), got.len(), want.len());
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} extractions"))
}

fn speedup() -> (bool, String) {
    let g = gen_ba(1_000_000, 16, 5).unwrap();
    let time = |t| {
        let cfg = PeelConfig::default().with_threads(t);
        decompose(&g, &cfg).unwrap();
        let t0 = Instant::now();
        decompose(&g, &cfg).unwrap();
        t0.elapsed().as_secs_f64()
    };
    let (one, eight) = (time(1), time(8));
    let ratio = eight / one;
    let msg = format!(
        "8 threads {:.0} ms vs 1 thread {:.0} ms (ratio {ratio:.2}, {} hardware threads)",
        eight * 1e3,
        one * 1e3,
        kcore::hardware_threads()
    );
    (ratio <= 0.6, msg)
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: u32, name: &str, r: Check, t: Instant| {
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(m) => println!("PASS {id:>2} {name}: {m} [{secs:.1}s]"),
            Err(m) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {m} [{secs:.1}s]");
            }
        }
    };
    let t = Instant::now();
    let s = suite();
    let (c1, c3) = matrix_runs(&s);
    report(1, "oracle equivalence", c1, t);
    report(2, "kmax profiles", kmax_profiles(), Instant::now());
    report(3, "work-efficiency witness", c3, t);
    let t = Instant::now();
    report(4, "local search subround reduction", vgc_reduction(), t);
    let t = Instant::now();
    report(5, "sampling statistics", sampling_stats(), t);
    let t = Instant::now();
    report(6, "contention reduction", contention(), t);
    let t = Instant::now();
    report(7, "bucketing equivalence and copy bound", bucketing(&s), t);
    let t = Instant::now();
    report(8, "hash bag multiset", hashbag(), t);
    let t = Instant::now();
    report(9, "k'-core subgraph", subgraphs(&s), t);
    let t = Instant::now();
    let (ok, msg) = speedup();
    let secs = t.elapsed().as_secs_f64();
    println!("{} 10 parallel speedup (soft): {msg} [{secs:.1}s]", if ok { "PASS" } else { "WARN" });
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
