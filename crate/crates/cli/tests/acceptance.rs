//! Acceptance criteria, one test per criterion. Each test writes a single
//! `criterion N: PASS|FAIL ...` line to stdout (uncaptured) and then asserts.

#[path = "../../core/tests/common/brute.rs"]
mod brute;

use std::io::Write;
use std::path::Path;
use std::process::Command;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardUniform};
use statrs::distribution::{ContinuousCDF, Normal as StatNormal};
use toplag::lattice::to_rotated;
use toplag::pathsel::BoundarySpec;
use toplag::stats::{
    free_energy_ensemble, median, moving_window_scan, path_to_lags, quantile, rho_metric, signal_map,
    temperature_profile, AnalysisConfig, HistogramSpec, MapConfig, MapGrid,
};
use toplag::synth::{gen_pair, rng, PaperModel, RandomModelSpec};
use toplag::{DistanceKind, DistanceMatrix, Landscape, Method, TimeSeries};

/// Emits the criterion line past the test harness' output capture.
fn report(n: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {n}: {verdict} {detail}").unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {n} failed: {detail}");
}

fn tops_t2() -> AnalysisConfig {
    AnalysisConfig {
        temperature: 2.0,
        method: Method::Tops,
        distance: DistanceKind::Minus,
        boundary: BoundarySpec::axes(30),
    }
}

/// 5x5 grid over [0.1, 1] on both axes.
fn reduced_grid() -> MapGrid {
    MapGrid::linspace(0.1, 1.0, 5)
}

fn axis_index(axis: &[f64], v: f64) -> usize {
    axis.iter().position(|&g| (g - v).abs() < 1e-12).expect("value on grid")
}

#[test]
fn criterion_1_brute_force_equivalence() {
    const CASES: usize = 200;
    const TOL: f64 = 1e-9;
    let mut r = rng(1, 0);
    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let n = r.random_range(3..=6);
        let temp = [0.5, 1.0, 2.0][r.random_range(0..3)];
        let e: Vec<f64> = (0..n * n).map(|_| 4.0 * r.random::<f64>()).collect();
        let m = DistanceMatrix::from_raw(n, e).unwrap();
        let land = Landscape::new(&m, temp).unwrap();
        let s = (r.random_range(0..n / 2 + 1), r.random_range(0..n / 2 + 1));
        let t = (r.random_range(n / 2..n), r.random_range(n / 2..n));
        for (s, t) in [((0, 0), (n - 1, n - 1)), (s, t)] {
            if s.0 > t.0 || s.1 > t.1 {
                continue;
            }
            let start = to_rotated(s.0, s.1, n).unwrap();
            let end = to_rotated(t.0, t.1, n).unwrap();
            for method in [Method::Top, Method::Tops] {
                let got = land.path(method, start, end).unwrap();
                let want = brute::brute_path(&m, temp, method, s, t);
                worst = worst.max((got.free_energy - want.free_energy).abs());
                assert_eq!(got.xs.len(), want.xs.len());
                for (a, b) in got.xs.iter().zip(&want.xs) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    report(
        1,
        worst <= TOL,
        &format!("{CASES} matrices, N in 3..=6, max abs error {worst:.2e} (tolerance {TOL:e})"),
    );
}

#[test]
fn criterion_2_piecewise_lags_recovered() {
    const TOL: f64 = 3.0;
    let (ar1, model) = PaperModel::A.build(2);
    let pair = gen_pair(&ar1, &model).unwrap();
    let sel = tops_t2().select(&pair.x, &pair.y).unwrap();
    let lags = path_to_lags(&sel.best, pair.y.len());

    let mut begin = 0;
    let mut rows = Vec::new();
    let mut pass = true;
    for seg in &model.segments {
        let len = seg.end - begin;
        // Interior 60%: drop the first and last 20% of the segment.
        let lo = begin + len / 5;
        let hi = seg.end - len / 5;
        // Plotted convention: a lagging second series is negative.
        let shown: Vec<f64> = lags.lags[lo..hi].iter().map(|&l| (-l) as f64).collect();
        let want = (-seg.lag) as f64;
        let got = median(&shown);
        pass &= (got - want).abs() <= TOL;
        rows.push(format!("{want}->{got}"));
        begin = seg.end;
    }
    report(
        2,
        pass,
        &format!("segment medians (true->recovered) [{}], tolerance +-{TOL}", rows.join(", ")),
    );
}

fn uniform_series(r: &mut impl Rng, n: usize) -> TimeSeries {
    TimeSeries::new(StandardUniform.sample_iter(r).take(n).collect()).unwrap()
}

/// `max_t |q95(t) + q5(2N-2-t)|` and the band width at mid-lattice.
fn reversal_asymmetry(profiles: &[Vec<f64>], n: usize) -> (f64, f64) {
    let levels = 2 * n - 1;
    let q = |tau: f64| -> Vec<f64> {
        (0..levels)
            .map(|t| quantile(&profiles.iter().map(|p| p[t]).collect::<Vec<_>>(), tau))
            .collect()
    };
    let (q5, q95) = (q(0.05), q(0.95));
    let mid = n - 1;
    let width = q95[mid] - q5[mid];
    let asym = (0..levels)
        .map(|t| (q95[t] + q5[levels - 1 - t]).abs())
        .fold(0.0, f64::max);
    (asym, width)
}

#[test]
fn criterion_3_time_reversal_symmetry() {
    const PAIRS: usize = 200;
    const N: usize = 100;
    const FRACTION: f64 = 0.15;
    let mut r = rng(3, 0);
    let pairs: Vec<(TimeSeries, TimeSeries)> = (0..PAIRS)
        .map(|_| (uniform_series(&mut r, N), uniform_series(&mut r, N)))
        .collect();
    let measure = |method: Method| {
        let cfg = AnalysisConfig { method, ..tops_t2() };
        let profiles: Vec<Vec<f64>> = pairs
            .iter()
            .map(|(x, y)| cfg.select(x, y).unwrap().best.profile())
            .collect();
        reversal_asymmetry(&profiles, N)
    };
    let (tops_asym, tops_w) = measure(Method::Tops);
    let (top_asym, top_w) = measure(Method::Top);
    let tops_ok = tops_asym <= FRACTION * tops_w;
    let top_fails = top_asym > FRACTION * top_w;
    report(
        3,
        tops_ok && top_fails,
        &format!(
            "TOPS asymmetry {tops_asym:.3} vs bound {:.3}; TOP asymmetry {top_asym:.3} vs bound {:.3} (must exceed)",
            FRACTION * tops_w,
            FRACTION * top_w
        ),
    );
}

#[test]
fn criterion_4_rho_calibration() {
    const DRAWS: usize = 100_000;
    const TOL: f64 = 0.01;
    let oracle = 2.0 * StatNormal::standard().cdf(-2.0);
    let mut r = rng(4, 0);
    let unit = Normal::new(0.0, 1.0).unwrap();
    let a: Vec<f64> = (0..DRAWS).map(|_| unit.sample(&mut r)).collect();
    let b: Vec<f64> = (0..DRAWS).map(|_| 4.0 + unit.sample(&mut r)).collect();

    let same = rho_metric(&a, &a, HistogramSpec::FreedmanDiaconis).unwrap().rho;
    let apart = rho_metric(&a, &b, HistogramSpec::FreedmanDiaconis).unwrap().rho;
    report(
        4,
        same == 1.0 && (apart - oracle).abs() <= TOL,
        &format!("identical rho = {same}; separated rho = {apart:.4} vs 2*Phi(-2) = {oracle:.4} +- {TOL}"),
    );
}

#[test]
fn criterion_5_signal_map_spot_checks() {
    const ENSEMBLE: usize = 200;
    let grid = reduced_grid();
    let cfg = MapConfig {
        ensemble: ENSEMBLE,
        seed: 5,
        ..MapConfig::default()
    };
    let map = signal_map(&grid, &cfg).unwrap();
    let at = |a: f64, f: f64| map.get(axis_index(&grid.a, a), axis_index(&grid.f, f));

    let strong = at(1.0, 0.1);
    let weak = at(0.1, 1.0);
    let coupled_max = grid
        .a
        .iter()
        .filter(|&&a| a > 0.5)
        .flat_map(|&a| grid.f.iter().map(move |&f| (a, f)))
        .map(|(a, f)| at(a, f))
        .fold(0.0, f64::max);
    report(
        5,
        strong <= 0.05 && weak >= 0.2 && coupled_max <= 0.15,
        &format!(
            "T=2, ensemble {ENSEMBLE}: rho(1, 0.1) = {strong:.3} (<= 0.05), rho(0.1, 1) = {weak:.3} (>= 0.2), \
             max rho over a > 0.5 = {coupled_max:.3} (<= 0.15)"
        ),
    );
}

#[test]
fn criterion_6_temperature_profile_minimum() {
    const ENSEMBLE: usize = 40;
    const TEMPS: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
    let grid = reduced_grid();
    let maps: Vec<_> = TEMPS
        .iter()
        .map(|&temperature| {
            let cfg = MapConfig {
                temperature,
                ensemble: ENSEMBLE,
                seed: 6,
                ..MapConfig::default()
            };
            signal_map(&grid, &cfg).unwrap()
        })
        .collect();
    let profile = temperature_profile(&maps).unwrap();
    let lowest = profile.iter().map(|p| p.mean).fold(f64::INFINITY, f64::min);
    // Every temperature tying the minimum counts as a minimizer.
    let minimizers: Vec<f64> = profile
        .iter()
        .filter(|p| p.mean <= lowest + 1e-12)
        .map(|p| p.temperature)
        .collect();
    let interior = minimizers
        .iter()
        .all(|&t| t != TEMPS[0] && t != TEMPS[TEMPS.len() - 1] && (1.5..=2.5).contains(&t));
    let rows: Vec<String> = profile
        .iter()
        .map(|p| format!("{}:{:.4}", p.temperature, p.mean))
        .collect();
    report(
        6,
        interior,
        &format!(
            "ensemble {ENSEMBLE}, mean rho by T [{}], minimizing T {minimizers:?} (must lie in [1.5, 2.5], no endpoint)",
            rows.join(", ")
        ),
    );
}

#[test]
fn criterion_7_moving_window_self_consistency() {
    const SEEDS: u64 = 10;
    const WINDOW: usize = 100;
    const WINDOWS: usize = 401;
    let cfg = tops_t2();
    let (mut synced, mut plain) = (0usize, 0usize);
    for seed in 0..SEEDS {
        let (ar1, mut model) = PaperModel::A.build(700 + seed);
        model.a = 0.7;
        let pair = gen_pair(&ar1, &model).unwrap();
        let sel = cfg.select(&pair.x, &pair.y).unwrap();
        let scan = moving_window_scan(&pair.x, &pair.y, &sel.best, WINDOW, 1, None).unwrap();
        assert_eq!(scan.synchronized.len(), WINDOWS);
        assert_eq!(scan.plain.len(), WINDOWS);
        let (s, p) = scan.significant_counts();
        synced += s;
        plain += p;
    }
    let (s, p) = (synced as f64 / SEEDS as f64, plain as f64 / SEEDS as f64);
    report(
        7,
        s >= 320.0 && p <= 80.0,
        &format!(
            "{SEEDS} seeds, a = 0.7: mean significant windows synchronized {s:.1}/{WINDOWS} (>= 320), \
             plain {p:.1}/{WINDOWS} (<= 80)"
        ),
    );
}

#[test]
fn criterion_8_free_energy_ordering() {
    const ENSEMBLE: usize = 100;
    let s = free_energy_ensemble(&RandomModelSpec::default(), 0.7, &tops_t2(), ENSEMBLE, 8).unwrap();
    let top_sep = median(&s.top_signal) < quantile(&s.top_random, 0.05);
    let tops_sep = median(&s.tops_signal) < quantile(&s.tops_random, 0.05);
    let ordered = median(&s.tops_signal) < median(&s.top_signal);
    report(
        8,
        top_sep && tops_sep && ordered,
        &format!(
            "{ENSEMBLE} models at T=2: TOP signal median {:.4} vs random q5 {:.4}; TOPS signal median {:.4} vs \
             random q5 {:.4}; signal median TOPS {:.4} < TOP {:.4}",
            median(&s.top_signal),
            quantile(&s.top_random, 0.05),
            median(&s.tops_signal),
            quantile(&s.tops_random, 0.05),
            median(&s.tops_signal),
            median(&s.top_signal),
        ),
    );
}

fn toplag(args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_toplag"))
        .args(args)
        .status()
        .expect("spawn toplag");
    assert!(status.success(), "toplag {args:?} exited with {status}");
}

fn output_digests(manifest: &Path) -> Vec<(String, String)> {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(manifest).unwrap()).unwrap();
    v["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| (o["file"].as_str().unwrap().to_owned(), o["sha256"].as_str().unwrap().to_owned()))
        .collect()
}

#[test]
fn criterion_9_end_to_end_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let d = |p: &str| dir.path().join(p).to_str().unwrap().to_owned();
    toplag(&["synth", "--paper-model", "A", "--seed", "9", "--out", &d("synth")]);
    let (x, y) = (d("synth/x.csv"), d("synth/y.csv"));
    for run in ["run1", "run2"] {
        let out = d(run);
        toplag(&["analyze", &x, &y, "--transform", "none", "--windows", "100", "--seed", "9", "--out", &out]);
    }
    let first = output_digests(&dir.path().join("run1/manifest.json"));
    let second = output_digests(&dir.path().join("run2/manifest.json"));
    let files: Vec<&str> = first.iter().map(|(f, _)| f.as_str()).collect();
    report(
        9,
        !first.is_empty() && first == second,
        &format!(
            "synth -> analyze twice, output digests identical for {files:?}; \
             the housing-market study is not reproducible here because its series are not bundled"
        ),
    );
}
