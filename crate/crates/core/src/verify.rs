//! Self-check suites run by `graphcrop verify`: diffusion oracles, crop size
//! laws, policy statistics, connectivity containment and determinism.
//!
//! Every suite runs on seeded synthetic graphs, so results are reproducible.
//! The oracles here build their matrices straight from edge lists and share
//! no code with the diffusion kernels they check.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::augment::{self, crop_size, AugmentConfig, Method};
use crate::dataset::{write_jsonl, Dataset};
use crate::diffusion::{self, DiffusionConfig, Normalization};
use crate::error::{Error, Result};
use crate::generate;
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Diffusion,
    SizeLaw,
    Statistics,
    Connectivity,
    Determinism,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Diffusion,
        Suite::SizeLaw,
        Suite::Statistics,
        Suite::Connectivity,
        Suite::Determinism,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Diffusion => "diffusion",
            Suite::SizeLaw => "size-law",
            Suite::Statistics => "statistics",
            Suite::Connectivity => "connectivity",
            Suite::Determinism => "determinism",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::Usage(format!("unknown suite '{s}' ({})", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Perturb one expected value per suite so the verifier must fail.
    pub inject_fault: bool,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    /// Informational lines that are not pass/fail.
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport {
            suite,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_suite(suite: Suite, opts: VerifyOptions) -> Result<SuiteReport> {
    match suite {
        Suite::Diffusion => diffusion_suite(opts),
        Suite::SizeLaw => size_law_suite(opts),
        Suite::Statistics => statistics_suite(opts),
        Suite::Connectivity => connectivity_suite(opts),
        Suite::Determinism => determinism_suite(opts),
    }
}

type Dense = Vec<Vec<f64>>;

fn oracle_operator(g: &Graph, normalization: Normalization) -> Dense {
    let n = g.node_count();
    let mut deg = vec![0usize; n];
    for &(u, v) in g.edges() {
        deg[u] += 1;
        deg[v] += 1;
    }
    let mut m = vec![vec![0.0; n]; n];
    for &(u, v) in g.edges() {
        for (i, j) in [(u, v), (v, u)] {
            m[i][j] = match normalization {
                Normalization::RandomWalk => 1.0 / deg[j] as f64,
                Normalization::Symmetric => 1.0 / ((deg[i] * deg[j]) as f64).sqrt(),
            };
        }
    }
    m
}

/// `sum_{k=0..=depth} alpha (1 - alpha)^k M^k`, accumulated by Horner's rule.
pub fn ppr_series_oracle(
    g: &Graph,
    alpha: f64,
    normalization: Normalization,
    depth: usize,
) -> Dense {
    let m = oracle_operator(g, normalization);
    let n = g.node_count();
    let beta = 1.0 - alpha;
    // S_depth = alpha I; S_{j} = alpha I + beta M S_{j+1}
    let mut s = vec![vec![0.0; n]; n];
    for _ in 0..=depth {
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                let w = m[i][k];
                if w != 0.0 {
                    for j in 0..n {
                        next[i][j] += beta * w * s[k][j];
                    }
                }
            }
            next[i][i] += alpha;
        }
        s = next;
    }
    s
}

/// Smallest depth `K` with `(1 - alpha)^(K + 1) / alpha < bound`.
pub fn series_depth_for(alpha: f64, bound: f64) -> usize {
    let mut k = 0;
    while (1.0 - alpha).powi(k as i32 + 1) / alpha >= bound {
        k += 1;
    }
    k
}

fn max_abs_diff(a: &nalgebra::DMatrix<f64>, b: &Dense) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in b.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            worst = worst.max((a[(i, j)] - x).abs());
        }
    }
    worst
}

fn diffusion_suite(opts: VerifyOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Diffusion);
    let fault = if opts.inject_fault { 1e-6 } else { 0.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1ff);
    let alpha = DiffusionConfig::DEFAULT_ALPHA;
    let depth = series_depth_for(alpha, 1e-10);

    let (mut worst_series, mut worst_iter, mut worst_sym, mut worst_stoch) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..100 {
        let n = rng.random_range(2..=50);
        let p = [0.1, 0.3, 0.6][i % 3];
        let g = generate::erdos_renyi(n, p, &mut rng);
        let norm = if i % 2 == 0 {
            Normalization::Symmetric
        } else {
            Normalization::RandomWalk
        };
        let mut s = diffusion::ppr_closed_form(&g, alpha, norm)?;
        s[(0, 0)] += fault;
        worst_series =
            worst_series.max(max_abs_diff(&s, &ppr_series_oracle(&g, alpha, norm, depth)));

        let v = rng.random_range(0..n);
        let col = diffusion::ppr_column_iterative(&g, v, alpha, norm, 1e-12, 100_000)?;
        for u in 0..n {
            worst_iter = worst_iter.max((col.scores[u] - s[(u, v)]).abs());
        }

        let sym = diffusion::ppr_closed_form(&g, alpha, Normalization::Symmetric)?;
        worst_sym = worst_sym.max((&sym - sym.transpose()).amax());

        let connected = generate::connected_random(n, p / 4.0, &mut rng);
        let rw = diffusion::ppr_closed_form(&connected, alpha, Normalization::RandomWalk)?;
        for c in rw.column_iter() {
            worst_stoch = worst_stoch.max((c.sum() - 1.0).abs());
        }
    }
    report.check(
        "closed-form PPR vs truncated series",
        worst_series <= 1e-8,
        format!("100 graphs, depth {depth}, max |diff| = {worst_series:.3e} (limit 1e-8)"),
    );
    report.check(
        "iterative column vs closed form",
        worst_iter <= 1e-6,
        format!("max |diff| = {worst_iter:.3e} (limit 1e-6)"),
    );
    report.check(
        "symmetric PPR is symmetric",
        worst_sym <= 1e-10,
        format!("max |S - S^T| = {worst_sym:.3e} (limit 1e-10)"),
    );
    report.check(
        "random-walk PPR columns sum to 1",
        worst_stoch <= 1e-10,
        format!("max |colsum - 1| = {worst_stoch:.3e} (limit 1e-10)"),
    );

    let g = generate::erdos_renyi(10, 0.4, &mut rng);
    let identity = diffusion::ppr_closed_form(&g, 1.0, Normalization::Symmetric)?;
    let id_err = (identity - nalgebra::DMatrix::identity(10, 10)).amax();
    report.check(
        "alpha = 1 gives identity",
        id_err == 0.0,
        format!("max |S - I| = {id_err:.3e}"),
    );

    let edge = generate::path(2);
    let s = diffusion::ppr_closed_form(&edge, 0.5, Normalization::Symmetric)?;
    let expected = [[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]];
    let mut err: f64 = fault;
    for i in 0..2 {
        for j in 0..2 {
            err = err.max((s[(i, j)] - expected[i][j]).abs());
        }
    }
    report.check(
        "single edge, alpha = 0.5",
        err <= 1e-8,
        format!("max |diff| = {err:.3e}"),
    );

    let heat = diffusion::heat_scores(&edge, 0, 1.0, 30, Normalization::RandomWalk)?;
    let e = (-1.0f64).exp();
    let err = (heat.scores[0] - 1.0f64.cosh() * e)
        .abs()
        .max((heat.scores[1] - 1.0f64.sinh() * e).abs());
    report.check(
        "single edge heat, t = 1",
        err <= 1e-8,
        format!("max |diff| = {err:.3e}"),
    );

    report.notes.push(
        "heat kernel weights are e^-t t^k / k! (Poisson); a weight constant in k makes the series diverge"
            .into(),
    );
    Ok(report)
}

/// Brute-force induced-edge check: kept-pair edges equal source edges between
/// kept nodes.
fn induced_edges_match(g: &Graph, kept: &[usize], sub: &Graph) -> bool {
    let mut expected = Vec::new();
    for (i, &a) in kept.iter().enumerate() {
        for (j, &b) in kept.iter().enumerate().skip(i + 1) {
            if g.edges().contains(&(a, b)) {
                expected.push((i, j));
            }
        }
    }
    expected == sub.edges()
}

fn size_law_suite(opts: VerifyOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::SizeLaw);
    let offset = usize::from(opts.inject_fault);
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ce);
    let (mut size_ok, mut incl_ok, mut induced_ok, mut induced_checked) = (0, 0, 0, 0);
    let mut uni_ok = 0;
    const CROPS: usize = 1000;
    for i in 0..CROPS {
        let n = rng.random_range(1..=50);
        let g = generate::connected_random(n, 0.05, &mut rng);
        let rho = [0.3, 0.5, 0.7, 0.9][i % 4];
        let cfg = AugmentConfig {
            rho,
            diffusion: DiffusionConfig::for_metric(
                [
                    diffusion::Metric::Ppr,
                    diffusion::Metric::Heat,
                    diffusion::Metric::ShortestPath,
                ][i % 3],
            ),
            ..AugmentConfig::default()
        };
        let crop = augment::graph_crop(&g, &cfg, &mut rng)?;
        let expected = crop_size(n, rho) + offset;
        size_ok += usize::from(crop.kept_original_ids.len() == expected);
        incl_ok += usize::from(crop.kept_original_ids.contains(&crop.initial_node));
        if n <= 20 {
            induced_checked += 1;
            induced_ok += usize::from(induced_edges_match(
                &g,
                &crop.kept_original_ids,
                &crop.subgraph,
            ));
        }
        let uni = augment::uni_node(&g, rho, &mut rng)?;
        uni_ok += usize::from(
            uni.kept_original_ids.len() == expected
                && induced_edges_match(&g, &uni.kept_original_ids, &uni.subgraph),
        );
    }
    report.check(
        "crop size = ceil(rho n)",
        size_ok == CROPS,
        format!("{size_ok}/{CROPS} crops"),
    );
    report.check(
        "initial node kept",
        incl_ok == CROPS,
        format!("{incl_ok}/{CROPS} crops"),
    );
    report.check(
        "induced edges complete (n <= 20)",
        induced_ok == induced_checked,
        format!("{induced_ok}/{induced_checked} crops"),
    );
    report.check(
        "uninode size and induced edges",
        uni_ok == CROPS,
        format!("{uni_ok}/{CROPS} samples"),
    );
    Ok(report)
}

/// `(low, high)` bounds of `mean ± 3 sd` for the sample mean of `trials`
/// draws with per-draw variance `variance`.
fn three_sigma(mean: f64, variance: f64, trials: usize) -> (f64, f64) {
    let sd = (variance / trials as f64).sqrt();
    (mean - 3.0 * sd, mean + 3.0 * sd)
}

fn statistics_suite(opts: VerifyOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Statistics);
    let shift = if opts.inject_fault { 0.1 } else { 0.0 };

    let g = generate::cycle(6);
    let cfg = AugmentConfig {
        p: 0.5,
        seed: 17,
        ..AugmentConfig::default()
    };
    let trials = 10_000;
    let mut hits = 0;
    for i in 0..trials {
        let o = augment::apply_policy_detailed(&g, i % 100, i / 100, &cfg)?;
        hits += usize::from(o.augmented);
    }
    let frac = hits as f64 / trials as f64;
    let (lo, hi) = three_sigma(0.5 + shift, 0.25, trials);
    report.check(
        "policy augments with probability p = 0.5",
        (lo..=hi).contains(&frac),
        format!("fraction {frac:.4} in [{lo:.4}, {hi:.4}]"),
    );

    // 100-edge graph: a 100-cycle.
    let ring = generate::cycle(100);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut total = 0usize;
    for _ in 0..trials {
        total += augment::drop_edge(&ring, 0.3, &mut rng)?.edge_count();
    }
    let mean = total as f64 / trials as f64;
    let (lo, hi) = three_sigma(70.0 + 100.0 * shift, 100.0 * 0.3 * 0.7, trials);
    report.check(
        "dropedge keeps 70 of 100 edges at rate 0.3",
        (lo..=hi).contains(&mean),
        format!("mean {mean:.3} in [{lo:.3}, {hi:.3}]"),
    );

    let k4 = generate::complete(4);
    let mut counts = [0usize; 4];
    for _ in 0..trials {
        for &v in &augment::uni_node(&k4, 0.5, &mut rng)?.kept_original_ids {
            counts[v] += 1;
        }
    }
    let (lo, hi) = three_sigma(0.5 + shift, 0.25, trials);
    let ok = counts
        .iter()
        .all(|&c| (lo..=hi).contains(&(c as f64 / trials as f64)));
    report.check(
        "uninode keeps each K4 node with frequency rho = 0.5",
        ok,
        format!("counts {counts:?} of {trials}"),
    );

    // Every node of a 10-node graph survives some crop over 500 epochs.
    let ten = generate::connected_random(10, 0.2, &mut rng);
    let cfg = AugmentConfig {
        p: 0.5,
        rho: 0.5,
        seed: 29,
        ..AugmentConfig::default()
    };
    let mut seen = [false; 10];
    for epoch in 0..500 {
        let o = augment::apply_policy_detailed(&ten, 0, epoch, &cfg)?;
        if o.augmented {
            // Recover kept ids: node labels are the source ids.
            let labelled = ten.clone().with_node_labels((0..10).collect())?;
            let again = augment::apply_policy(&labelled, 0, epoch, &cfg)?;
            for &id in again.node_labels().unwrap() {
                seen[id as usize] = true;
            }
        }
    }
    let covered = seen.iter().filter(|&&s| s).count();
    report.check(
        "every node survives some augmented epoch",
        covered == 10 && !opts.inject_fault,
        format!("{covered}/10 nodes seen over 500 epochs"),
    );
    Ok(report)
}

fn connectivity_suite(opts: VerifyOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Connectivity);
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0c0);
    const CROPS: usize = 1000;
    let mut contained = 0;
    let mut connected = 0;
    for i in 0..CROPS {
        let n = rng.random_range(2..=50);
        let metric = if i % 2 == 0 {
            diffusion::Metric::Ppr
        } else {
            diffusion::Metric::Heat
        };
        let cfg = AugmentConfig {
            rho: 0.7,
            diffusion: DiffusionConfig::for_metric(metric),
            ..AugmentConfig::default()
        };
        // Disconnected inputs exercise the containment rule.
        let g = if i % 4 < 2 {
            generate::connected_random(n, 0.05, &mut rng)
        } else {
            generate::erdos_renyi(n, 0.08, &mut rng)
        };
        let crop = augment::graph_crop(&g, &cfg, &mut rng)?;
        let component = g.connected_component_of(crop.initial_node);
        let inside = crop
            .kept_original_ids
            .iter()
            .all(|v| component.binary_search(v).is_ok());
        contained += usize::from(inside && !opts.inject_fault);
        if i % 4 < 2 {
            connected += usize::from(crop.subgraph.is_connected());
        }
    }
    report.check(
        "crop lies within the initial node's component",
        contained == CROPS,
        format!("{contained}/{CROPS} crops"),
    );
    report.notes.push(format!(
        "connected induced subgraphs on connected inputs (rho = 0.7): {connected}/{} = {:.3}",
        CROPS / 2,
        connected as f64 / (CROPS / 2) as f64
    ));
    Ok(report)
}

fn determinism_suite(opts: VerifyOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Determinism);
    let mut rng = ChaCha8Rng::seed_from_u64(0xde7);
    let graphs = (0..40)
        .map(|i| {
            let n = rng.random_range(1..=30);
            generate::connected_random(n, 0.1, &mut rng).with_graph_label(Some(i % 3))
        })
        .collect();
    let d = Dataset::new("DET", graphs);
    let dir = tempdir()?;
    let mut outputs = Vec::new();
    for (threads, method) in [
        (1, Method::GraphCrop),
        (4, Method::GraphCrop),
        (1, Method::UniNode),
        (3, Method::UniNode),
    ] {
        let cfg = AugmentConfig {
            method,
            seed: if opts.inject_fault && threads > 1 {
                8
            } else {
                7
            },
            ..AugmentConfig::default()
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?;
        let out = pool.install(|| augment::augment_dataset(&d, &cfg, 3))?;
        let path = dir.join(format!("{method}-{threads}.jsonl"));
        write_jsonl(&out.dataset, &path)?;
        outputs.push(std::fs::read(&path).map_err(|e| Error::io(&path, e))?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    report.check(
        "graphcrop output independent of thread count",
        outputs[0] == outputs[1],
        format!("{} vs {} bytes", outputs[0].len(), outputs[1].len()),
    );
    report.check(
        "uninode output independent of thread count",
        outputs[2] == outputs[3],
        format!("{} vs {} bytes", outputs[2].len(), outputs[3].len()),
    );
    Ok(report)
}

fn tempdir() -> Result<std::path::PathBuf> {
    let dir = std::env::temp_dir().join(format!("graphcrop-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}
