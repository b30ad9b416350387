//! Desk-scale acceptance suite. One test per shipped guarantee; each prints a
//! single summary line on success and panics with the offending numbers
//! otherwise. Run with `cargo test -p modsel-cli --test acceptance -- --nocapture`
//! to see the lines.

use std::process::Command;
use std::time::{Duration, Instant};

use modsel_core::bounds::{self, Norm};
use modsel_core::linalg::{dot, RealVector, Subspace};
use modsel_core::models::{
    build_histogram_collection, build_pp_collection, build_trig_collection, IntervalPartition,
    ModelCollection, ModelDescriptor, TrigMode,
};
use modsel_core::noise::{NoiseKind, NoiseSpec};
use modsel_core::selection::{compute_u, default_z};
use modsel_core::simulate::{
    ChiTailPlan, CounterExamplePlan, CounterThreshold, MeanSupPlan, OraclePlan, SupNormPlan,
};
use modsel_core::stats;
use rand::Rng;
use rand_distr::StandardNormal;

// ------------------------------------------------------------------ helpers

/// Largest entry of |B^T B - I| over the stored basis.
fn gram_max_dev(space: &Subspace) -> f64 {
    let basis = space.basis();
    let mut worst = 0.0f64;
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(bi.as_slice(), bj.as_slice()) - want).abs());
        }
    }
    worst
}

/// Direct evaluation of (max_i |P e_i|_2, max_i |P e_i|_1) from the basis:
/// column i of the projection matrix is sum_k b_k[i] b_k.
fn direct_lambdas(space: &Subspace) -> (f64, f64) {
    let n = space.ambient_dim();
    let basis = space.basis();
    let mut max_l2 = 0.0f64;
    let mut max_l1 = 0.0f64;
    let mut col = vec![0.0f64; n];
    for i in 0..n {
        col.iter_mut().for_each(|v| *v = 0.0);
        for b in basis {
            let w = b.as_slice()[i];
            if w != 0.0 {
                for (c, &bv) in col.iter_mut().zip(b.as_slice()) {
                    *c += w * bv;
                }
            }
        }
        let l2: f64 = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        let l1: f64 = col.iter().map(|v| v.abs()).sum();
        max_l2 = max_l2.max(l2);
        max_l1 = max_l1.max(l1);
    }
    (max_l2, max_l1)
}

fn span_first(n: usize, d: usize) -> Subspace {
    let basis: Vec<RealVector> = (0..d)
        .map(|k| {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            RealVector::new(v).unwrap()
        })
        .collect();
    Subspace::from_orthonormal(n, basis).unwrap()
}

/// Deterministic cloud of `num` points in the unit ball of the given norm:
/// Gaussian direction, radius u^(1/dim), rescaled so the chosen norm length
/// equals the radius.
fn unit_ball_cloud(dim: usize, num: usize, norm: Norm, seed: u64, stream: u64) -> Vec<RealVector> {
    let mut rng = NoiseSpec::rng(seed, stream);
    let origin = vec![0.0; dim];
    (0..num)
        .map(|_| {
            let g: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let u: f64 = rng.random();
            let radius = u.powf(1.0 / dim as f64);
            let len = norm.dist(&g, &origin);
            let v: Vec<f64> = if len > 0.0 {
                g.iter().map(|x| x * radius / len).collect()
            } else {
                vec![0.0; dim]
            };
            RealVector::new(v).unwrap()
        })
        .collect()
}

fn f_from_blocks(n: usize, block_values: &[f64]) -> RealVector {
    let len = n / block_values.len();
    let mut data = Vec::with_capacity(n);
    for &v in block_values {
        data.extend(std::iter::repeat_n(v, len));
    }
    RealVector::new(data).unwrap()
}

fn shipped_collections() -> Vec<(String, ModelCollection)> {
    let mut out = Vec::new();
    let hist = IntervalPartition::equal_blocks(256, 8).unwrap();
    out.push((
        "histogram n=256".to_string(),
        build_histogram_collection(&hist).unwrap(),
    ));
    let pp = IntervalPartition::equal_blocks(240, 10).unwrap();
    for d in 0..=3usize {
        out.push((
            format!("piecewise-poly d={d} n=240"),
            build_pp_collection(&pp, d).unwrap(),
        ));
    }
    out.push((
        "trigonometric dbar=8 n=256".to_string(),
        build_trig_collection(256, 8, TrigMode::Nested).unwrap(),
    ));
    out
}

// ----------------------------------------------------------------- criteria

#[test]
fn c01_bases_are_orthonormal() {
    let t0 = Instant::now();
    let mut models = 0usize;
    let mut worst = 0.0f64;
    for (name, coll) in shipped_collections() {
        for entry in &coll.items {
            let dev = gram_max_dev(&entry.space);
            assert!(
                dev <= 1e-9,
                "{name} model {} gram deviation {dev:.3e} above 1e-9",
                entry.label
            );
            worst = worst.max(dev);
            models += 1;
        }
    }
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(5), "basis check took {dt:?}, budget 5 s");
    println!(
        "PASS c01 basis orthonormality: {models} models, max |G - I| = {worst:.3e} ({} ms)",
        dt.as_millis()
    );
}

#[test]
fn c02_metric_quantities_match_identities() {
    let t0 = Instant::now();
    let tol = 1e-12;
    // Histograms: exact identities.
    let hist = IntervalPartition::equal_blocks(256, 8).unwrap();
    let coll = build_histogram_collection(&hist).unwrap();
    let mut hist_models = 0usize;
    for entry in &coll.items {
        if entry.space.dim() == 0 {
            continue;
        }
        let min_len = match &entry.descriptor {
            ModelDescriptor::Blocks(p) => p.min_block_len(),
            other => panic!("histogram model with descriptor {other:?}"),
        };
        let (l2, l1) = direct_lambdas(&entry.space);
        let want_sq = 1.0 / min_len as f64;
        assert!(
            (l2 * l2 - want_sq).abs() <= tol,
            "model {}: Lambda2^2 = {} vs 1/min|I| = {want_sq}",
            entry.label,
            l2 * l2
        );
        assert!(
            ((entry.space.lambda2().powi(2)) - want_sq).abs() <= tol,
            "model {}: stored Lambda2 disagrees with 1/min|I|",
            entry.label
        );
        assert!(
            (l1 - 1.0).abs() <= tol,
            "model {}: LambdaInf = {l1} should be 1",
            entry.label
        );
        hist_models += 1;
    }
    // Piecewise polynomials: LambdaInf <= 2(d+1).
    let pp = IntervalPartition::equal_blocks(240, 10).unwrap();
    let mut pp_models = 0usize;
    for d in 0..=3usize {
        let coll = build_pp_collection(&pp, d).unwrap();
        for entry in &coll.items {
            if entry.space.dim() == 0 {
                continue;
            }
            let (_, l1) = direct_lambdas(&entry.space);
            let cap = 2.0 * (d as f64 + 1.0);
            assert!(
                l1 <= cap + tol,
                "pp d={d} model {}: LambdaInf = {l1} above {cap}",
                entry.label
            );
            pp_models += 1;
        }
    }
    // Trigonometric: Lambda2^2 <= 2 dim / n.
    let coll = build_trig_collection(256, 8, TrigMode::Nested).unwrap();
    let mut trig_models = 0usize;
    for entry in &coll.items {
        if entry.space.dim() == 0 {
            continue;
        }
        let (l2, _) = direct_lambdas(&entry.space);
        let cap = 2.0 * entry.space.dim() as f64 / 256.0;
        assert!(
            l2 * l2 <= cap + tol,
            "trig model {}: Lambda2^2 = {} above {cap}",
            entry.label,
            l2 * l2
        );
        trig_models += 1;
    }
    println!(
        "PASS c02 metric identities: {hist_models} histogram models exact, \
         {pp_models} pp models and {trig_models} trig models dominated ({} ms)",
        t0.elapsed().as_millis()
    );
}

#[test]
fn c03_closed_constants() {
    let t0 = Instant::now();
    let ck = bounds::constant_ck(2.0).unwrap();
    assert_eq!(ck, 10.0, "C(2) must be exactly 10, got {ck}");
    let mut cells = 0usize;
    let mut tightest = f64::INFINITY;
    for d in 1..=50usize {
        for (v, b) in [(0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            let rep = bounds::h_constant_check(d, v, b).unwrap();
            assert!(
                rep.series < rep.pair_majorant,
                "d={d} v={v} b={b}: series {} not below {}",
                rep.series,
                rep.pair_majorant
            );
            assert!(rep.pass, "d={d} v={v} b={b}: majorant check failed");
            tightest = tightest.min(rep.pair_majorant / rep.series);
            cells += 1;
        }
    }
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(1), "constants check took {dt:?}, budget 1 s");
    println!(
        "PASS c03 constants: C(2) = 10 exactly, series below majorant in {cells} cells \
         (tightest ratio {tightest:.3}) ({} ms)",
        dt.as_millis()
    );
}

#[test]
fn c04_greedy_nets_obey_covering_law() {
    let norms = [Norm::L2, Norm::L1, Norm::LInf];
    let deltas = [1.0, 0.5, 0.25];
    let mut nets = 0usize;
    for dim in 1..=3usize {
        for cloud_idx in 0..10u64 {
            let norm = norms[cloud_idx as usize % norms.len()];
            let points = unit_ball_cloud(dim, 60, norm, 9000 + cloud_idx, dim as u64);
            for &delta in &deltas {
                let net = bounds::covering_greedy(&points, delta, norm).unwrap();
                for (a, &i) in net.iter().enumerate() {
                    for &j in &net[a + 1..] {
                        let d = norm.dist(points[i].as_slice(), points[j].as_slice());
                        assert!(
                            d > delta,
                            "dim {dim} cloud {cloud_idx} delta {delta}: net points {i},{j} at distance {d}"
                        );
                    }
                }
                for (idx, p) in points.iter().enumerate() {
                    let nearest = net
                        .iter()
                        .map(|&i| norm.dist(points[i].as_slice(), p.as_slice()))
                        .fold(f64::INFINITY, f64::min);
                    assert!(
                        nearest <= delta,
                        "dim {dim} cloud {cloud_idx} delta {delta}: point {idx} uncovered (nearest {nearest})"
                    );
                }
                let cap = (1.0 + 2.0 / delta).powi(dim as i32);
                assert!(
                    (net.len() as f64) <= cap + 1e-9,
                    "dim {dim} cloud {cloud_idx} delta {delta}: net size {} above {cap}",
                    net.len()
                );
                nets += 1;
            }
        }
    }
    println!("PASS c04 covering law: {nets} nets separated, covering, and within the volume cap");
}

#[test]
fn c05_tail_bounds_dominate_monte_carlo() {
    let t0 = Instant::now();
    let reps = 100_000u64;
    let presets = [
        ("gaussian(1)", NoiseSpec::gaussian(1.0).unwrap()),
        ("laplace(1)", NoiseSpec::laplace(1.0).unwrap()),
        ("centered_poisson(1)", NoiseSpec::centered_poisson(1.0).unwrap()),
    ];
    let hist = build_histogram_collection(&IntervalPartition::equal_blocks(128, 8).unwrap()).unwrap();
    let trig = build_trig_collection(128, 2, TrigMode::Nested).unwrap();
    let spaces = [("histogram D=8 n=128", &hist), ("trig D=5 n=128", &trig)];
    let mut chi_rows = 0usize;
    let mut sup_rows = 0usize;
    let mut chi_exceed = 0u64;
    let mut sup_exceed = 0u64;
    let mut cell = 0u64;
    for (family_name, coll) in spaces {
        let lam = coll.lambdas().unwrap();
        let entry = coll.items.iter().max_by_key(|e| e.space.dim()).unwrap();
        for (noise_name, noise) in &presets {
            let u = compute_u(
                noise.sigma(),
                noise.c(),
                lam.lambda_bar_inf,
                lam.lambda2,
                coll.n,
                default_z(coll.n, 1.0),
            )
            .unwrap();
            let chi = ChiTailPlan {
                space: &entry.space,
                noise: *noise,
                xs: vec![0.5, 1.0, 2.0],
                u,
                reps,
                seed: 1000 + cell,
            }
            .run_serial();
            for row in &chi.rows {
                assert!(
                    row.pass,
                    "{family_name} {noise_name} chi x={}: freq CI [{:.2e},{:.2e}] vs bound {:.2e}",
                    row.x, row.ci_lo, row.ci_hi, row.bound
                );
                assert_eq!(
                    row.exceed, 0,
                    "{family_name} {noise_name} chi x={}: threshold crossed {} times",
                    row.x, row.exceed
                );
                chi_exceed += row.exceed;
                chi_rows += 1;
            }
            let sup = SupNormPlan {
                space: &entry.space,
                noise: *noise,
                xs: vec![0.5, 1.0, 2.0],
                reps,
                seed: 2000 + cell,
            }
            .run_serial();
            for row in &sup.rows {
                assert!(
                    row.pass,
                    "{family_name} {noise_name} supnorm x={}: CI [{:.2e},{:.2e}] vs bound {:.2e}",
                    row.x, row.ci_lo, row.ci_hi, row.bound
                );
                sup_exceed += row.exceed;
                sup_rows += 1;
            }
            cell += 1;
        }
    }
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(120), "tail suite took {dt:?}, budget 2 min");
    println!(
        "PASS c05 tail dominance: {chi_rows} chi rows (exceed {chi_exceed}) and \
         {sup_rows} supnorm rows (exceed {sup_exceed}) all dominated ({:.1} s)",
        dt.as_secs_f64()
    );
}

#[test]
fn c06_projected_norm_mean_matches_chi_mean() {
    let noise = NoiseSpec::gaussian(1.0).unwrap();
    let mut lines = Vec::new();
    for (idx, d) in [1usize, 4, 16].into_iter().enumerate() {
        let space = span_first(64, d);
        let rep = MeanSupPlan {
            space: &space,
            noise,
            reps: 100_000,
            seed: 3000 + idx as u64,
        }
        .run_serial()
        .unwrap();
        let exact = stats::chi_mean(d);
        let gap = (rep.mean - exact).abs();
        assert!(
            gap <= 3.0 * rep.stderr,
            "D={d}: mean {} vs exact {exact}, gap {gap:.2e} above 3 se = {:.2e}",
            rep.mean,
            3.0 * rep.stderr
        );
        assert!(
            rep.mean <= (d as f64).sqrt(),
            "D={d}: mean {} above sqrt(D) = {}",
            rep.mean,
            (d as f64).sqrt()
        );
        assert!(rep.pass, "D={d}: report verdict failed");
        lines.push(format!("D={d} |mean-exact| = {:.1} se", gap / rep.stderr.max(1e-300)));
    }
    println!("PASS c06 mean of projected norm: {}", lines.join(", "));
}

#[test]
fn c07_selected_estimator_risk_within_oracle_bound() {
    let t0 = Instant::now();
    let finest = IntervalPartition::equal_blocks(256, 8).unwrap();
    let coll = build_histogram_collection(&finest).unwrap();
    let f = f_from_blocks(256, &[2.0, -2.0, 1.0, -1.0]);
    assert_eq!(
        f.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs())),
        2.0,
        "regression function sup norm drifted"
    );
    let true_label = "1-64|65-128|129-192|193-256";
    let z = default_z(256, 1.0);
    let mut lines = Vec::new();
    for (idx, (name, noise)) in [
        ("gaussian(1)", NoiseSpec::gaussian(1.0).unwrap()),
        ("centered_poisson(1)", NoiseSpec::centered_poisson(1.0).unwrap()),
    ]
    .into_iter()
    .enumerate()
    {
        let plan = OraclePlan::new(
            &coll,
            noise,
            &f,
            2.0,
            z,
            1000,
            4000 + idx as u64,
            Some(true_label.to_string()),
        )
        .unwrap();
        let rep = plan.run_serial();
        assert!(
            rep.pass,
            "{name}: risk {} (se {}) above bound {}",
            rep.lhs_mean, rep.lhs_stderr, rep.rhs
        );
        lines.push(format!(
            "{name} risk {:.1} <= bound {:.1}",
            rep.lhs_mean, rep.rhs
        ));
    }
    // Structure recovery at small noise: reported, not gating.
    let quiet = OraclePlan::new(
        &coll,
        NoiseSpec::gaussian(0.1).unwrap(),
        &f,
        2.0,
        z,
        1000,
        4100,
        Some(true_label.to_string()),
    )
    .unwrap()
    .run_serial();
    let rate = quiet.recovery_rate.unwrap_or(0.0);
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(180), "oracle suite took {dt:?}, budget 3 min");
    println!(
        "PASS c07 oracle inequality: {}; recovery at sigma=0.1 {:.1}% ({}, non-gating) ({:.1} s)",
        lines.join("; "),
        100.0 * rate,
        if rate >= 0.5 { "meets 50%" } else { "below 50%" },
        dt.as_secs_f64()
    );
}

#[test]
fn c08_mixture_defeats_mean_centered_bound() {
    let t0 = Instant::now();
    let u = (4.0f64).ln();
    let mixture = CounterExamplePlan {
        dim: 10_000,
        p: 0.5,
        us: vec![u],
        rule: CounterThreshold::Hypothetical { c: 1.0 },
        reps: 10_000,
        seed: 5000,
    }
    .run_serial()
    .unwrap();
    assert!(mixture.violation_found, "mixture failed to defeat the bound");
    let row = &mixture.rows[0];
    assert!(
        row.ci_lo > 0.25,
        "lower CI endpoint {:.4} not above e^-u = 0.25",
        row.ci_lo
    );
    let control = CounterExamplePlan {
        dim: 10_000,
        p: 1.0,
        us: vec![u],
        rule: CounterThreshold::GaussianConcentration,
        reps: 10_000,
        seed: 5001,
    }
    .run_serial()
    .unwrap();
    assert!(
        !control.violation_found,
        "pure Gaussian control flagged a violation"
    );
    assert!(
        control.rows.iter().all(|r| r.pass),
        "pure Gaussian control exceeded the concentration threshold"
    );
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(60), "counter-example took {dt:?}, budget 1 min");
    println!(
        "PASS c08 mixture counter-example: freq CI low {:.4} > 0.25, control CI high {:.4} within bound ({:.1} s)",
        row.ci_lo,
        control.rows[0].ci_hi,
        dt.as_secs_f64()
    );
}

#[test]
fn c09_noise_presets_certify() {
    let presets = [
        ("gaussian(1)", NoiseSpec::gaussian(1.0).unwrap()),
        ("laplace(1)", NoiseSpec::laplace(1.0).unwrap()),
        ("centered_poisson(1)", NoiseSpec::centered_poisson(1.0).unwrap()),
        ("centered_gamma(2,1)", NoiseSpec::centered_gamma(2.0, 1.0).unwrap()),
        ("bounded_uniform(1)", NoiseSpec::bounded_uniform(1.0).unwrap()),
    ];
    for (name, spec) in &presets {
        let rep = spec.certify(1000);
        assert!(
            rep.pass,
            "{name} failed certification: violation {} at lambda {}",
            rep.max_violation, rep.worst_lambda
        );
    }
    let bogus = NoiseSpec::with_claim(NoiseKind::Laplace { scale: 1.0 }, 1.0, 0.0).unwrap();
    let rep = bogus.certify(1000);
    assert!(
        !rep.pass,
        "laplace(1) with claimed (sigma=1, c=0) should fail certification"
    );
    println!(
        "PASS c09 noise certification: 5 presets certified, understated claim rejected \
         (violation {:.3} at lambda {:.3})",
        rep.max_violation, rep.worst_lambda
    );
}

// ------------------------------------------------- determinism across threads

struct BinRun {
    code: i32,
    files: Vec<(String, Vec<u8>)>,
}

fn run_bin(config: &std::path::Path, sub: &str, out: &std::path::Path, threads: u32) -> BinRun {
    let status = Command::new(env!("CARGO_BIN_EXE_modsel"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--threads")
        .arg(threads.to_string())
        .arg(sub)
        .output()
        .expect("binary failed to launch");
    let code = status.status.code().expect("binary killed by signal");
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out)
        .expect("output dir missing")
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort_by(|a, b| a.0.cmp(&b.0));
    BinRun { code, files }
}

fn assert_thread_invariant(dir: &std::path::Path, config_name: &str, toml: &str, sub: &str) -> usize {
    let config = dir.join(config_name);
    std::fs::write(&config, toml).unwrap();
    let out1 = dir.join(format!("{config_name}.t1"));
    let out8 = dir.join(format!("{config_name}.t8"));
    std::fs::create_dir_all(&out1).unwrap();
    std::fs::create_dir_all(&out8).unwrap();
    let r1 = run_bin(&config, sub, &out1, 1);
    let r8 = run_bin(&config, sub, &out8, 8);
    assert_eq!(
        r1.code, r8.code,
        "{config_name} {sub}: exit codes differ between thread counts"
    );
    assert_eq!(
        r1.files.len(),
        r8.files.len(),
        "{config_name} {sub}: artifact sets differ"
    );
    for ((name1, bytes1), (name8, bytes8)) in r1.files.iter().zip(&r8.files) {
        assert_eq!(name1, name8, "{config_name} {sub}: artifact names differ");
        assert!(
            bytes1 == bytes8,
            "{config_name} {sub}: artifact {name1} differs between --threads 1 and --threads 8"
        );
    }
    r1.files.len()
}

#[test]
fn c10_reports_identical_across_thread_counts() {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut artifacts = 0usize;

    let noise_sections = [
        ("gaussian", "kind = \"gaussian\"\nsigma = 1.0"),
        ("laplace", "kind = \"laplace\"\nscale = 1.0"),
        ("poisson", "kind = \"centered_poisson\"\nmean = 1.0"),
    ];
    let family_sections = [
        ("hist", "kind = \"histogram\"\nn = 128\nblocks = 8"),
        ("trig", "kind = \"trigonometric\"\nn = 128\ndbar = 2"),
    ];
    for (fam_name, fam) in &family_sections {
        for (noise_name, noise) in &noise_sections {
            let toml = format!(
                "[run]\nseed = 6000\nreps = 100000\n\n[family]\n{fam}\n\n[noise]\n{noise}\n\n\
                 [experiment]\nxs = [0.5, 1.0, 2.0]\n",
            );
            for sub in ["run-chi", "run-supnorm"] {
                artifacts += assert_thread_invariant(
                    dir.path(),
                    &format!("{fam_name}_{noise_name}_{}.toml", sub.replace('-', "_")),
                    &toml,
                    sub,
                );
            }
        }
    }

    for (noise_name, noise) in [
        ("gaussian", "kind = \"gaussian\"\nsigma = 1.0"),
        ("poisson", "kind = \"centered_poisson\"\nmean = 1.0"),
    ] {
        let toml = format!(
            "[run]\nseed = 6100\nreps = 1000\n\n[family]\nkind = \"histogram\"\nn = 256\nblocks = 8\n\n\
             [noise]\n{noise}\n\n[selection]\nk = 2.0\n\n[experiment]\n\
             f_blocks = [2.0, -2.0, 1.0, -1.0]\ntrue_label = \"1-64|65-128|129-192|193-256\"\n",
        );
        artifacts +=
            assert_thread_invariant(dir.path(), &format!("oracle_{noise_name}.toml"), &toml, "run-oracle");
    }

    let counter = "[run]\nseed = 6200\n\n[counterexample]\ndim = 10000\np = 0.5\nc = 1.0\n\
                   us = [1.3862943611198906]\nreps = 10000\nrule = \"hypothetical\"\n";
    artifacts += assert_thread_invariant(dir.path(), "counter.toml", counter, "run-counterexample");
    let control = "[run]\nseed = 6201\n\n[counterexample]\ndim = 10000\np = 1.0\nc = 1.0\n\
                   us = [1.3862943611198906]\nreps = 10000\nrule = \"gaussian_concentration\"\n";
    artifacts += assert_thread_invariant(dir.path(), "counter_control.toml", control, "run-counterexample");

    // The mean check has no subcommand; compare a serial run against an
    // 8-thread in-process run of the same plan.
    use modsel_core::simulate::RepKernel;
    use rayon::prelude::*;
    let space = span_first(64, 4);
    let plan = MeanSupPlan {
        space: &space,
        noise: NoiseSpec::gaussian(1.0).unwrap(),
        reps: 100_000,
        seed: 6300,
    };
    let serial = plan.run_serial().unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    let outs: Vec<f64> =
        pool.install(|| (0..plan.reps).into_par_iter().map(|r| plan.kernel(r)).collect());
    let threaded = plan.summarize(&outs);
    assert_eq!(serial, threaded, "mean report differs between serial and 8-thread runs");
    assert!(
        serde_json::to_vec(&serial).unwrap() == serde_json::to_vec(&threaded).unwrap(),
        "serialized mean reports differ between serial and 8-thread runs"
    );
    artifacts += 1;

    println!(
        "PASS c10 determinism: {artifacts} artifacts byte-identical between --threads 1 and --threads 8 ({:.1} s)",
        t0.elapsed().as_secs_f64()
    );
}
