//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Criterion 7 is the slow one. By default each run stops once it is light
//! enough for the period check, and no further batch starts once some run
//! has met the weight threshold. Neither can change the verdict, since
//! best-so-far weights only decrease. Set `INSTANTON_FULL_ACCEPTANCE=1` to
//! spend the whole budget on every run, and `INSTANTON_ACCEPTANCE_ONLY=1,9`
//! to run a subset.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use instanton::code::{build_tanner_155, build_toy};
use instanton::decoder::{decode, withstand_count, Message, OutcomeKind, Withstand};
use instanton::render::{cut_tone, detect_sign_period, render_trace, tone_byte, trace_tone};
use instanton::search::{self, perturb, Attached, Budget, Damped, SearchConfig, TimerKind};
use instanton::{NoiseVector, TannerGraph};
use num_rational::{BigRational, Rational64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn toy_instanton() -> Vec<f64> {
    [10.0, 6.0, 4.0, 4.0].iter().map(|x| x / 7.0).collect()
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize, sigma: f64) -> Vec<f64> {
    (0..n).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn signs<T: Message>(row: &[T]) -> Vec<i8> {
    row.iter().map(|m| (*m > T::zero()) as i8 - (*m < T::zero()) as i8).collect()
}

fn c1_cycling_table() -> Verdict {
    const HEAD: [[f64; 4]; 9] = [
        [-3.0, 1.0, 3.0, 3.0],
        [2.0, -2.0, 6.0, 2.0],
        [4.0, 8.0, -2.0, 6.0],
        [8.0, 4.0, 12.0, -2.0],
        [-2.0, 12.0, 4.0, 20.0],
        [30.0, -2.0, 14.0, 4.0],
        [4.0, 38.0, -2.0, 18.0],
        [20.0, 4.0, 48.0, -2.0],
        [-2.0, 24.0, 4.0, 56.0],
    ];
    let out = decode(&build_toy(), &[-3.0, 1.0, 3.0, 3.0], 203, true).unwrap();
    let trace = out.trace.unwrap();
    if out.kind != OutcomeKind::Survived(203) {
        return verdict(false, format!("outcome {}", out.kind));
    }
    for (k, expect) in HEAD.iter().enumerate() {
        if trace[k] != expect {
            return verdict(false, format!("row {k}: {:?}", trace[k]));
        }
    }
    for n in 1..=50 {
        let f = n as f64;
        let expect = [
            [-2.0, 12.0 * f, 4.0, 36.0 * f - 16.0],
            [36.0 * f - 6.0, -2.0, 12.0 * f + 2.0, 4.0],
            [4.0, 36.0 * f + 2.0, -2.0, 12.0 * f + 6.0],
            [12.0 * f + 8.0, 4.0, 36.0 * f + 12.0, -2.0],
        ];
        for (j, row) in expect.iter().enumerate() {
            let k = 4 * n + j;
            if trace[k] != row {
                return verdict(false, format!("row {k}: {:?} != {:?}", trace[k], row));
            }
        }
    }
    verdict(true, "rows 0..=8 and closed forms for n = 1..=50 match exactly")
}

fn c2_toy_instanton() -> Verdict {
    let g = build_toy();
    let xi = toy_instanton();
    let w = NoiseVector::new(xi.clone()).weight();
    let rel = (w - 24.0 / 7.0).abs() / (24.0 / 7.0);

    let start = Instant::now();
    let h: Vec<Rational64> = [-3, 1, 3, 3].iter().map(|&x| Rational64::new(x, 7)).collect();
    let exact = decode(&g, &h, 10_000, false).unwrap().kind;
    let secs = start.elapsed().as_secs_f64();
    let float = withstand_count(&g, &xi, 10_000).unwrap();

    let pass = rel < 1e-12 && exact == OutcomeKind::Survived(10_000) && secs < 1.0;
    verdict(
        pass,
        format!(
            "w rel. error {rel:.1e}; exact-rational decode: {exact} in {secs:.3}s; \
             f64 decode withstands {float} (the cycle amplifies rounding about 2x per iteration)"
        ),
    )
}

/// Dense GF(2) elimination, independent of the library's bitset version.
fn oracle_rank(graph: &TannerGraph) -> usize {
    let mut rows: Vec<Vec<u8>> = graph
        .check_to_bits()
        .iter()
        .map(|bits| {
            let mut r = vec![0u8; graph.n_bits()];
            for &b in bits {
                r[b] = 1;
            }
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..graph.n_bits() {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][col] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && r[col] == 1 {
                r.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
            }
        }
        rank += 1;
    }
    rank
}

fn c3_tanner_construction() -> Verdict {
    let g = build_tanner_155();
    let rank = g.gf2_rank();
    let oracle = oracle_rank(&g);
    let pass = g.n_checks() == 93
        && g.n_bits() == 155
        && g.bit_degrees().iter().all(|&d| d == 3)
        && g.check_degrees().iter().all(|&d| d == 5)
        && rank == 91
        && oracle == 91;
    verdict(
        pass,
        format!(
            "{} checks x {} bits, rank {rank} (oracle {oracle}), k = {}",
            g.n_checks(),
            g.n_bits(),
            g.n_bits() - rank
        ),
    )
}

fn c4_scalability() -> Verdict {
    let graphs = [build_toy(), build_tanner_155()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
    let n_max = 200;
    let mut long_runs = 0;
    let mut float_agree = 0;
    for trial in 0..100 {
        let g = &graphs[trial % 2];
        let sigma = rng.random_range(0.3..1.2);
        let h: Vec<f64> = gaussian(&mut rng, g.n_bits(), sigma).iter().map(|x| 1.0 - x).collect();
        let lambda = 10f64.powf(rng.random_range(-3.0..3.0));

        // Exact: the f64 inputs and lambda converted without rounding.
        let hq: Vec<BigRational> = h.iter().map(|&x| BigRational::from_float(x).unwrap()).collect();
        let lq = BigRational::from_float(lambda).unwrap();
        let scaled: Vec<BigRational> = hq.iter().map(|x| x * &lq).collect();
        let a = decode(g, &hq, n_max, true).unwrap();
        let b = decode(g, &scaled, n_max, true).unwrap();
        if a.kind.last_iteration() >= 20 {
            long_runs += 1;
        }
        let (ta, tb) = (a.trace.unwrap(), b.trace.unwrap());
        let same_signs = ta.len() == tb.len() && ta.iter().zip(&tb).all(|(x, y)| signs(x) == signs(y));
        let scaled_values = ta.iter().zip(&tb).all(|(x, y)| x.iter().zip(y).all(|(p, q)| p * &lq == *q));
        if a.kind != b.kind || !same_signs || !scaled_values {
            return verdict(
                false,
                format!("trial {trial}: lambda {lambda:.4e}: {} vs {}", a.kind, b.kind),
            );
        }

        let hs: Vec<f64> = h.iter().map(|x| lambda * x).collect();
        let fa = decode(g, &h, n_max, true).unwrap();
        let fb = decode(g, &hs, n_max, true).unwrap();
        let (fta, ftb) = (fa.trace.unwrap(), fb.trace.unwrap());
        if fa.kind == fb.kind && fta.len() == ftb.len() && fta.iter().zip(&ftb).all(|(x, y)| signs(x) == signs(y)) {
            float_agree += 1;
        }
    }
    verdict(
        true,
        format!(
            "100 triples agree in exact arithmetic, traces scale by lambda ({long_runs} ran >= 20 iterations); \
             f64 agrees on {float_agree}/100"
        ),
    )
}

fn consistent(small: OutcomeKind, large: OutcomeKind, n1: usize) -> bool {
    match large {
        OutcomeKind::Survived(_) => small == OutcomeKind::Survived(n1),
        stop if stop.last_iteration() <= n1 => small == stop,
        _ => small == OutcomeKind::Survived(n1),
    }
}

fn c5_monotonicity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x30d0);
    let mut checked = 0;
    for g in [build_toy(), build_tanner_155()] {
        for i in 0..100 {
            let xi = if g.n_bits() == 4 && i == 0 {
                toy_instanton().iter().map(|x| 0.99 * x).collect()
            } else {
                let sigma = rng.random_range(0.4..1.0);
                gaussian(&mut rng, g.n_bits(), sigma)
            };
            let h = instanton::channel::llr_from_noise(&xi);
            let n2 = 300;
            let large = decode(&g, &h, n2, false).unwrap().kind;
            let w = large.withstand();
            let member: Vec<bool> = (0..=n2).map(|n| w.withstands(n)).collect();
            if member.windows(2).any(|p| !p[0] && p[1]) {
                return verdict(false, format!("E(n) membership increases for {w:?}"));
            }
            for n1 in [0, 1, 2, 5, 17, 64, 299] {
                let small = decode(&g, &h, n1, false).unwrap().kind;
                if !consistent(small, large, n1) {
                    return verdict(false, format!("cap {n1}: {small} vs cap {n2}: {large}"));
                }
                checked += 1;
            }
        }
    }
    verdict(true, format!("{checked} cap pairs consistent over 200 vectors"))
}

fn c6_toy_search() -> Verdict {
    let g = build_toy();
    let threshold = 24.0 / 7.0 * 1.01;
    let seeds = [11u64, 12, 13, 14, 15];
    let mut hits = 0;
    let mut parts = Vec::new();
    for &seed in &seeds {
        let mut cfg = SearchConfig::new(Arc::new(Attached), 100, Budget::Seconds(60.0), seed);
        cfg.target_weight = Some(threshold);
        let out = search::run(&g, cfg).unwrap();
        let w = out.array.top_weight();
        if w <= threshold {
            hits += 1;
        }
        parts.push(format!("seed {seed}: w={w:.6} at {:.3}s", out.seconds));
    }
    verdict(hits >= 4, format!("{hits}/5 reached {threshold:.6} ({})", parts.join("; ")))
}

struct TannerRun {
    seed: u64,
    scheme: &'static str,
    best: f64,
    seconds: f64,
    xi: NoiseVector,
}

fn tanner_run(graph: &TannerGraph, seed: u64, damped: bool, target: Option<f64>) -> TannerRun {
    let scheme: Arc<dyn search::AmplitudeScheme> = if damped { Arc::new(Damped::default()) } else { Arc::new(Attached) };
    let mut cfg = SearchConfig::new(scheme, 100, Budget::Seconds(1800.0), seed);
    cfg.timer = TimerKind::preferred();
    cfg.target_weight = target;
    let out = search::run(graph, cfg).unwrap();
    TannerRun {
        seed,
        scheme: if damped { "D" } else { "A" },
        best: out.array.top_weight(),
        seconds: out.seconds,
        xi: out.array.slot(100).xi.clone(),
    }
}

/// Lag in `2..=30` maximizing the autocorrelation of the count of negative
/// outputs per iteration, from `k0` on. Diagnostic only.
fn dominant_lag(trace: &[Vec<f64>], k0: usize) -> usize {
    let counts: Vec<f64> = trace[k0.min(trace.len())..]
        .iter()
        .map(|r| r.iter().filter(|&&m| m < 0.0).count() as f64)
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len().max(1) as f64;
    let x: Vec<f64> = counts.iter().map(|c| c - mean).collect();
    (2..=30usize.min(x.len().saturating_sub(2)))
        .map(|p| {
            let n = x.len() - p;
            let c = (0..n).map(|k| x[k] * x[k + p]).sum::<f64>() / n as f64;
            (p, c)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(0, |(p, _)| p)
}

fn c7_tanner_search() -> Verdict {
    let full = std::env::var("INSTANTON_FULL_ACCEPTANCE").is_ok_and(|v| v == "1");
    let g = build_tanner_155();
    let threshold = 12.45;
    let parallel = std::thread::available_parallelism().map_or(1, |n| n.get());
    // Seeds 1..=5 with scheme A, 6..=10 with scheme D.
    let plan: Vec<(u64, bool)> = (1..=10).map(|s| (s, s > 5)).collect();
    let period_weight = 11.6;
    // Stopping at the period-check weight still settles the threshold verdict.
    let target = (!full).then_some(period_weight);

    let mut runs: Vec<TannerRun> = Vec::new();
    for batch in plan.chunks(parallel) {
        let g = &g;
        let done: Vec<TannerRun> = std::thread::scope(|s| {
            let hs: Vec<_> = batch
                .iter()
                .map(|&(seed, damped)| s.spawn(move || tanner_run(g, seed, damped, target)))
                .collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for r in &done {
            println!(
                "    criterion 7 run: seed {} scheme {}: w={:.6} after {:.1} CPU-s",
                r.seed, r.scheme, r.best, r.seconds
            );
        }
        runs.extend(done);
        if !full && runs.iter().any(|r| r.best <= threshold) {
            break;
        }
    }

    let best = runs.iter().min_by(|a, b| a.best.total_cmp(&b.best)).unwrap();
    let out_dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let _ = std::fs::write(out_dir.join("tanner_best.txt"), instanton::channel::save_noise(&best.xi));

    let mut period_note = String::from("period check not exercised (no run reached 11.6)");
    let mut period_ok = true;
    let mut notes = Vec::new();
    for r in runs.iter().filter(|r| r.best <= period_weight) {
        let trace = render_trace(&g, &r.xi, 100).unwrap();
        let p = detect_sign_period(&trace.trace, 40).unwrap();
        period_ok &= p == Some(12);
        notes.push(format!(
            "seed {}: exact sign period after iteration 40: {}; dominant recurrence lag {} (stopped: {})",
            r.seed,
            p.map_or("none".to_string(), |p| p.to_string()),
            dominant_lag(&trace.trace, 40),
            trace.outcome
        ));
    }
    if !notes.is_empty() {
        period_note = notes.join("; ");
    }
    let mode = if full { "full budget" } else { "early stop" };
    verdict(
        best.best <= threshold && period_ok,
        format!(
            "best of {} runs ({mode}): w={:.6} (seed {}, scheme {}); {period_note}",
            runs.len(),
            best.best,
            best.seed,
            best.scheme
        ),
    )
}

fn c8_perturbation_mean() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);
    let tanner_xi = NoiseVector::new(gaussian(&mut rng, 155, 0.35));
    let cases = [(NoiseVector::new(toy_instanton()), 0.1), (tanner_xi, 0.05)];
    let draws = 100_000;
    let mut parts = Vec::new();
    let mut pass = true;
    for (xi, a) in cases {
        let w = xi.weight();
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..draws {
            let y = perturb(&xi, a, &mut rng).expect("feasible amplitude").weight();
            sum += y;
            sum_sq += y * y;
        }
        let mean = sum / draws as f64;
        let var = (sum_sq / draws as f64 - mean * mean) * draws as f64 / (draws - 1) as f64;
        let se = (var / draws as f64).sqrt();
        let z = (mean - w) / se;
        pass &= z.abs() <= 3.0;
        parts.push(format!("N={}: w={w:.6} mean={mean:.6} z={z:+.2}", xi.len()));
    }
    verdict(pass, parts.join("; "))
}

fn c9_tones() -> Verdict {
    let cut: Vec<u8> = [
        Withstand::ImmediateDecode,
        Withstand::Count(0),
        Withstand::Count(1),
        Withstand::Count(2),
        Withstand::Count(512),
        Withstand::Infinite,
    ]
    .into_iter()
    .map(|w| tone_byte(cut_tone(w)))
    .collect();
    let trace: Vec<u8> = [-10.0, 0.0, 10.0].into_iter().map(|m| tone_byte(trace_tone(m))).collect();
    verdict(
        cut == [255, 232, 209, 186, 0, 0] && trace == [0, 128, 255],
        format!("cut {cut:?}, trace {trace:?}"),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_instanton"))
        .current_dir(dir)
        .args(args)
        .output()
        .is_ok_and(|o| o.status.success())
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_default()
}

fn weight_column(csv: &[u8]) -> Vec<String> {
    String::from_utf8_lossy(csv)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.rsplit(',').next().unwrap_or("").to_string())
        .collect()
}

fn c10_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("anchor.txt"), instanton::channel::save_noise(&toy_instanton())).unwrap();
    let search = [
        "search", "--code", "tanner155", "--n-max", "50", "--scheme", "A", "--sweeps", "300", "--seed", "9",
        "--checkpoint", "c.txt", "--progress-csv", "p.csv", "--log-every", "10",
    ];
    let cut = [
        "render-cut", "--code", "toy", "--anchor", "anchor.txt", "--third-random", "3", "--res", "64x48", "--cap",
        "128", "-o", "cut.pgm", "--tone-csv", "cut.csv",
    ];
    let files = ["c.txt", "p.csv.manifest.json", "cut.pgm", "cut.csv", "cut.pgm.manifest.json"];
    let mut first = Vec::new();
    for round in 0..2 {
        if !run_cli(d, &search) || !run_cli(d, &cut) {
            return verdict(false, "CLI invocation failed");
        }
        let snapshot: Vec<Vec<u8>> = files.iter().map(|f| read(d, f)).collect();
        let w = weight_column(&read(d, "p.csv"));
        if round == 0 {
            first = vec![(snapshot, w)];
        } else {
            let (s0, w0) = &first[0];
            for (i, f) in files.iter().enumerate() {
                if s0[i].is_empty() || s0[i] != snapshot[i] {
                    return verdict(false, format!("{f} differs between runs"));
                }
            }
            if *w0 != w || w.len() < 3 {
                return verdict(false, "progress weights differ between runs");
            }
        }
    }
    verdict(
        true,
        "checkpoint, PGM, tone CSV and manifests byte-identical; progress weights identical (timestamps excluded)",
    )
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture` or a filter; a
    // filter that does not name this suite skips it.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }

    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("toy cycling table replay", c1_cycling_table),
        ("toy instanton weight and survival", c2_toy_instanton),
        ("Tanner code construction", c3_tanner_construction),
        ("scalability", c4_scalability),
        ("withstand monotonicity", c5_monotonicity),
        ("toy search convergence", c6_toy_search),
        ("Tanner search", c7_tanner_search),
        ("perturbation mean weight", c8_perturbation_mean),
        ("renderer tone bytes", c9_tones),
        ("CLI determinism", c10_determinism),
    ];
    // `INSTANTON_ACCEPTANCE_ONLY=1,9` runs a subset.
    let only: Option<Vec<usize>> = std::env::var("INSTANTON_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!v.pass);
        println!(
            "criterion {:>2} [{status}] {name} ({:.1}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
