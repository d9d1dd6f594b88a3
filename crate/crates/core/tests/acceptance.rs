//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use partial_knn::baselines::aknn_decide;
use partial_knn::bench::{self, ExperimentConfig, Method, RunOptions, Source};
use partial_knn::dataset::{PartialDataset, PartialExample};
use partial_knn::distribution::{bayes_rule, DiscreteDistribution};
use partial_knn::plaknn::{classify, classify_batch, threshold, EliminationTrace};
use partial_knn::preprocess::{smoothing_weights, FittedPipeline, PipelineConfig};
use partial_knn::synth::{analytic_scenario, rng_stream, ScenarioParams};
use partial_knn::theory::{
    advantage, find_ambiguous_pair, flip_distribution, is_label_aligned_dist, is_reconstructible, DEFAULT_RANK_TOL,
};
use partial_knn::{Bag, LabelSpace, NeighborIndex, PlaknnConfig};
use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use common::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// Fastest of a few runs, to keep scheduler noise out of sub-millisecond budgets.
fn best_time<F: FnMut() -> bool>(runs: usize, mut f: F) -> (bool, Duration) {
    let mut ok = true;
    let mut best = Duration::MAX;
    for _ in 0..runs {
        let start = Instant::now();
        ok &= f();
        best = best.min(start.elapsed());
    }
    (ok, best)
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn non_identifiable_fixture() -> Verdict {
    let mut detail = String::new();
    let (ok, t) = best_time(5, || {
        let (p, q) = non_identifiable_pair();
        let want = [2.0 / 9.0, 3.0 / 9.0, 4.0 / 9.0];
        let (mp, mq) = (p.bag_marginal(0).unwrap(), q.bag_marginal(0).unwrap());
        let gap = max_gap(&mp, &want).max(max_gap(&mq, &want));
        detail = format!("marginal gap {gap:.1e}, bayes {:?} vs {:?}", bayes_rule(&p), bayes_rule(&q));
        gap <= 1e-12 && bayes_differs(&p, &q)
    });
    verdict(ok && t < Duration::from_millis(1), format!("{detail}, {t:?}"))
}

fn alignment_fixture() -> Verdict {
    let mut detail = String::new();
    let (ok, t) = best_time(5, || {
        let (p1, p2) = alignment_pair();
        let flipped = flip_distribution(&p2);
        let gap = max_gap(&flipped.bag_marginal(0).unwrap(), &p2.bag_marginal(0).unwrap());
        detail = format!(
            "aligned P1={} P2={} flip={}, marginal gap {gap:.1e}",
            is_label_aligned_dist(&p1),
            is_label_aligned_dist(&p2),
            is_label_aligned_dist(&flipped)
        );
        is_label_aligned_dist(&p1) && !is_label_aligned_dist(&p2) && is_label_aligned_dist(&flipped) && gap <= 1e-12
    });
    verdict(ok && t < Duration::from_millis(1), format!("{detail}, {t:?}"))
}

fn reconstruction_roundtrip() -> Verdict {
    let start = Instant::now();
    let mut rng = rng(2024);
    let mut failures = 0;
    let mut worst_gap = 0.0f64;
    for i in 0..1000 {
        let c = rng.random_range(2..=6);
        let s = space(c);
        let deficient = i % 2 == 1;
        let m = if deficient { rank_deficient_baggen(s, &mut rng) } else { random_baggen(s, &mut rng) };
        let reconstructible = is_reconstructible(&m, DEFAULT_RANK_TOL).unwrap();
        let pair = find_ambiguous_pair(&m, DEFAULT_RANK_TOL).unwrap();
        let mut ok = reconstructible == pair.is_none() && reconstructible != deficient;
        if let Some((q1, q2)) = pair {
            let gap = max_gap(&m.apply(q1.probs()), &m.apply(q2.probs()));
            worst_gap = worst_gap.max(gap);
            ok &= gap <= 1e-7 && q1.argmax() != q2.argmax();
        }
        failures += usize::from(!ok);
    }
    let t = start.elapsed();
    verdict(
        failures == 0 && t < Duration::from_secs(5),
        format!("{failures} exceptions in 1000 matrices, worst pair gap {worst_gap:.1e}, {t:?}"),
    )
}

fn line_dataset(bags: &[u64], c: usize) -> (PartialDataset, NeighborIndex) {
    let s = LabelSpace::new(c).unwrap();
    let examples: Vec<PartialExample> = bags
        .iter()
        .enumerate()
        .map(|(i, &m)| PartialExample { x: vec![(i + 1) as f64], bag: Bag::from_mask(m, s).unwrap(), truth: None })
        .collect();
    let ds = PartialDataset::new(examples, s).unwrap();
    let index = NeighborIndex::build(&ds.features()).unwrap();
    (ds, index)
}

fn hand_trace() -> Verdict {
    let (ds, index) = line_dataset(&[0b01, 0b01, 0b11], 2);
    let cfg = PlaknnConfig { max_iter: 3, ..PlaknnConfig::default() };
    let mut detail = String::new();
    let (ok, t) = best_time(5, || {
        let (label, trace) = classify(&ds, &index, &[0.0], &cfg).unwrap();
        let removed_at = trace.iterations.iter().find(|it| !it.survivors.contains(2)).map(|it| (it.k, it.threshold));
        detail = format!("label {label}, label 2 removed at {removed_at:?}");
        matches!(removed_at, Some((2, d)) if (d - 0.71540).abs() <= 1e-4) && label == 1 && trace.iterations.len() == 2
    });
    verdict(ok && t < Duration::from_millis(1), format!("{detail}, {t:?}"))
}

fn scenario_config(name: &str, n: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(Source::Scenario { name: name.into(), n_samples: n });
    cfg.methods = vec![Method::Plaknn];
    cfg.repetitions = 20;
    cfg.seed = 1000;
    cfg
}

fn mean_error(cfg: &ExperimentConfig, method: Method) -> f64 {
    let out = bench::run(cfg, RunOptions::default()).unwrap();
    out.summary.iter().find(|s| s.method == method).unwrap().mean_error
}

/// Training size `n`, error measured on a fresh 10000-point test sample per
/// repetition that is shared across all `n`.
fn consistency_trend() -> Verdict {
    let start = Instant::now();
    let scenario = analytic_scenario("two_gaussians", &ScenarioParams::default()).unwrap();
    let oracle = scenario.oracle().bayes_risk;
    let exact = Normal::new(0.0, 1.0).unwrap().cdf(-1.0);
    let sizes = [500, 2000, 8000];
    let cfg = PlaknnConfig::default();
    let mut totals = [0.0; 3];
    for rep in 0..20u64 {
        let test = scenario.sample(10_000, &mut rng_stream(1000 + rep, 7));
        let queries: Vec<Vec<f64>> = test.iter().map(|s| s.x.clone()).collect();
        for (total, &n) in totals.iter_mut().zip(&sizes) {
            let train = scenario.sample_dataset(n, &mut rng_stream(1000 + rep, 0)).unwrap();
            let index = NeighborIndex::build(&train.features()).unwrap();
            let labels = classify_batch(&train, &index, &queries, &cfg).unwrap();
            let wrong = labels.iter().zip(&test).filter(|(l, s)| **l != s.y).count();
            *total += wrong as f64 / test.len() as f64 / 20.0;
        }
    }
    let errors = totals.to_vec();
    let monotone = errors.windows(2).all(|w| w[1] <= w[0]);
    let close = (errors[2] - oracle).abs() <= 0.05;
    let t = start.elapsed();
    verdict(
        monotone && close && (oracle - exact).abs() < 1e-4 && t < Duration::from_secs(300),
        format!("errors {errors:.4?} at n=500/2000/8000, Bayes risk {oracle:.5}, {t:.1?}"),
    )
}

fn relaxed_bound() -> Verdict {
    let start = Instant::now();
    let params = ScenarioParams::default();
    let oracle = analytic_scenario("relaxed", &params).unwrap().oracle();
    let bound = oracle.bayes_risk + params.theta * params.region_mass + 0.03;
    let err = mean_error(&scenario_config("relaxed", 8000), Method::Plaknn);
    let t = start.elapsed();
    verdict(
        err <= bound && t < Duration::from_secs(300),
        format!("error {err:.4}, Bayes risk {:.5}, bound {bound:.5}, {t:.1?}", oracle.bayes_risk),
    )
}

fn baseline_ordering() -> Verdict {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(Source::Scenario { name: "clusters".into(), n_samples: 5000 });
    cfg.methods = vec![Method::Plaknn, Method::FixedK];
    cfg.k = 10;
    cfg.noise = vec![0.0, 0.3];
    cfg.repetitions = 50;
    cfg.seed = 5000;
    let out = bench::run(&cfg, RunOptions::default()).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for &nu in &cfg.noise {
        let errs = |m: Method| -> Vec<f64> {
            out.rows.iter().filter(|r| r.method == m && r.noise == nu).map(|r| r.error_rate).collect()
        };
        let (pl, knn) = (errs(Method::Plaknn), errs(Method::FixedK));
        let diffs: Vec<f64> = pl.iter().zip(&knn).map(|(a, b)| a - b).collect();
        let n = diffs.len() as f64;
        let mean = diffs.iter().sum::<f64>() / n;
        let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let upper = mean + 1.96 * sd / n.sqrt();
        let (mpl, mknn) = (pl.iter().sum::<f64>() / n, knn.iter().sum::<f64>() / n);
        pass &= mpl <= mknn && upper <= 0.01;
        parts.push(format!("nu={nu}: PL {mpl:.4} vs 10-NN {mknn:.4}, diff CI upper {upper:.4}"));
    }
    let t = start.elapsed();
    verdict(pass, format!("{}, {t:.1?}", parts.join("; ")))
}

fn singleton_stream<R: Rng>(profile: &[f64], n: usize, rng: &mut R) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut y = profile.len();
            for (i, p) in profile.iter().enumerate() {
                acc += p;
                if u < acc {
                    y = i + 1;
                    break;
                }
            }
            1u64 << (y - 1)
        })
        .collect()
}

fn elimination_k(trace: &EliminationTrace, label: usize) -> Option<usize> {
    trace.iterations.iter().find(|it| !it.survivors.contains(label)).map(|it| it.k)
}

fn elimination_contrast() -> Verdict {
    let start = Instant::now();
    let n = 10_000;
    let cfg = PlaknnConfig { max_iter: n, ..PlaknnConfig::default() };
    let mut r = rng(88);
    let mut wins = 0;
    let mut ks = (0usize, 0usize, 0usize);
    for _ in 0..200 {
        let (d1, i1) = line_dataset(&singleton_stream(&[0.50, 0.49, 0.01], n, &mut r), 3);
        let (d2, i2) = line_dataset(&singleton_stream(&[0.40, 0.30, 0.30], n, &mut r), 3);
        let (_, trace) = classify(&d1, &i1, &[0.0], &cfg).unwrap();
        let a1 = aknn_decide(&d1, &i1, &[0.0], &cfg).unwrap();
        let a2 = aknn_decide(&d2, &i2, &[0.0], &cfg).unwrap();
        let pl = elimination_k(&trace, 3);
        let first_a = |o: partial_knn::baselines::AknnOutcome| if o.qualified { o.k } else { usize::MAX };
        if let Some(k) = pl {
            if k < first_a(a1) && k < first_a(a2) {
                wins += 1;
            }
            ks.0 += k;
        }
        ks.1 += a1.k;
        ks.2 += a2.k;
    }
    let t = start.elapsed();
    verdict(
        wins * 100 >= 95 * 200,
        format!(
            "{wins}/200 trials; mean k: PL elimination {:.1}, A-kNN {:.1} and {:.1}, {t:.1?}",
            ks.0 as f64 / 200.0,
            ks.1 as f64 / 200.0,
            ks.2 as f64 / 200.0
        ),
    )
}

fn survivor_property(trace: &EliminationTrace, bags: &[Bag]) -> bool {
    let c = trace.iterations.first().map_or(0, |it| it.counts.len());
    let mut counts = vec![0u32; c];
    let mut alive = trace.iterations.first().map(|it| it.candidates);
    for it in &trace.iterations {
        if Some(it.candidates) != alive || !it.survivors.is_subset(it.candidates) {
            return false;
        }
        for y in bags[it.neighbor].labels() {
            counts[y - 1] += 1;
        }
        if counts != it.counts {
            return false;
        }
        let m1 = it.candidates.labels().map(|y| counts[y - 1]).max().unwrap();
        for y in it.candidates.labels() {
            let eliminated = (m1 - counts[y - 1]) as f64 / it.k as f64 >= it.threshold;
            if counts[y - 1] == m1 && !it.survivors.contains(y) {
                return false;
            }
            if eliminated == it.survivors.contains(y) {
                return false;
            }
        }
        alive = Some(it.survivors);
    }
    trace.survivors.contains(trace.label)
}

fn invariant_suites() -> Verdict {
    let start = Instant::now();
    let mut r = rng(9);
    let mut failed = Vec::new();

    let cfg = PlaknnConfig::default();
    let monotone = (0..10_000).all(|_| {
        let n = r.random_range(1..100_000);
        let k = r.random_range(1..1000);
        let delta = r.random_range(0.001..0.999);
        let c = r.random_range(2..20);
        let base = threshold(n, k, delta, c, &cfg).unwrap();
        threshold(n, k + 1, delta, c, &cfg).unwrap() < base && threshold(n + 1, k, delta, c, &cfg).unwrap() >= base
    });
    if !monotone {
        failed.push("threshold monotonicity");
    }

    let mut traces = 0;
    let survivors_ok = (0..40).all(|_| {
        let c = r.random_range(2..6);
        let s = space(c);
        let n = r.random_range(20..300);
        let examples: Vec<PartialExample> = (0..n)
            .map(|_| {
                let y = r.random_range(1..=c);
                let mut bag = Bag::singleton(y);
                for o in 1..=c {
                    if r.random::<f64>() < 0.3 {
                        bag = bag.with(o);
                    }
                }
                PartialExample { x: vec![r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)], bag, truth: Some(y) }
            })
            .collect();
        let ds = PartialDataset::new(examples, s).unwrap();
        let bags: Vec<Bag> = ds.bags().collect();
        let index = NeighborIndex::build(&ds.features()).unwrap();
        let cfg = PlaknnConfig { max_iter: r.random_range(1..=n), ..PlaknnConfig::default() };
        (0..25).all(|_| {
            traces += 1;
            let q = [r.random_range(-1.5..1.5), r.random_range(-1.5..1.5)];
            let (_, trace) = classify(&ds, &index, &q, &cfg).unwrap();
            survivor_property(&trace, &bags)
        })
    });
    if !survivors_ok {
        failed.push("survivor property");
    }

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let c = r.random_range(2..=4);
        let d: DiscreteDistribution = random_distribution(10, c, 2, &mut r);
        let cap = [1.0, 0.5, 0.2][r.random_range(0..3)];
        for i in 0..d.len() {
            let got = advantage(&d, i, cap).unwrap().advantage;
            worst = worst.max((got - brute_force_advantage(&d, i, cap)).abs());
        }
    }
    if worst > 1e-9 {
        failed.push("advantage brute force");
    }

    let weights_ok = (0..1000).all(|_| {
        let len = r.random_range(1..15);
        let d: Vec<f64> = (0..len).map(|_| r.random_range(0.0..3.0)).collect();
        let w = smoothing_weights(&d);
        (w.iter().sum::<f64>() - 1.0).abs() <= 1e-9 && w.iter().all(|&x| x >= 0.0)
    });
    let train: Vec<Vec<f64>> = (0..200).map(|_| (0..3).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
    let test: Vec<Vec<f64>> = (0..30).map(|_| (0..3).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
    let leakage_ok = [PipelineConfig::vision(), PipelineConfig::realworld()].iter().all(|p| {
        let fitted = FittedPipeline::fit(&train, p).unwrap();
        let before = fitted.train_output().to_vec();
        let all = fitted.transform(&test).unwrap();
        let alone: Vec<Vec<f64>> = test.iter().map(|x| fitted.transform(std::slice::from_ref(x)).unwrap().remove(0)).collect();
        let refit = FittedPipeline::fit(&train, p).unwrap();
        fitted.train_output() == before.as_slice() && all == alone && refit.train_output() == before.as_slice()
    });
    if !(weights_ok && leakage_ok) {
        failed.push("preprocessing");
    }

    let mut det = ExperimentConfig::new(Source::Scenario { name: "clusters".into(), n_samples: 400 });
    det.noise = vec![0.0, 0.2];
    det.repetitions = 4;
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let out = bench::run(&det, RunOptions::default()).unwrap();
        bench::emit(&out, dir.path(), false).unwrap();
    }
    let same = ["results.csv", "summary.csv"].iter().all(|f| {
        std::fs::read(dirs[0].path().join(f)).unwrap() == std::fs::read(dirs[1].path().join(f)).unwrap()
    });
    if !same {
        failed.push("seed determinism");
    }

    let t = start.elapsed();
    let detail = if failed.is_empty() {
        format!("all suites hold ({traces} traces, advantage gap {worst:.1e}), {t:.1?}")
    } else {
        format!("failed: {}", failed.join(", "))
    };
    verdict(failed.is_empty(), detail)
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        ("non-identifiable pair shares its bag marginal", non_identifiable_fixture),
        ("alignment fixture and flip", alignment_fixture),
        ("reconstructibility roundtrip", reconstruction_roundtrip),
        ("elimination hand trace", hand_trace),
        ("consistency trend on two Gaussians", consistency_trend),
        ("relaxed alignment error bound", relaxed_bound),
        ("PL A-kNN versus 10-NN on clusters", baseline_ordering),
        ("early elimination versus A-kNN qualification", elimination_contrast),
        ("invariant suites", invariant_suites),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        failures += usize::from(!v.pass);
        println!("{} criterion {}: {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
