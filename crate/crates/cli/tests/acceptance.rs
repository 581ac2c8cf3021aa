//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;

use ahp_cli::output::*;
use ahp_core::consistency::{check_consistency, estimate_random_index, RandomIndexTable};
use ahp_core::model::{upper_pairs, Alternative, CriterionNode, Judgment, SaatyJudgment, GOAL_ID};
use ahp_core::priority::{derive_geometric_mean, Derivation};
use ahp_core::store::{ModelSettings, FORMAT_VERSION};
use ahp_core::synthesis::{sensitivity_scan, SensitivityQuery};
use ahp_core::{
    build_matrix, derive, evaluate, global_weights, load_model, save_model, score_alternatives, DecisionHierarchy,
    DerivationSettings, EvaluationOptions, JudgmentMatrix, JudgmentSet, Method, ModelDocument, PriorityVector,
    WeightedModel,
};

type Outcome = Result<String, String>;

const CASES: u32 = 1000;
const REFERENCE_TOLERANCE: f64 = 0.005;

/// Reference global weights (two decimals) per criterion, leaves in declaration order.
const REFERENCE_GLOBALS: [(&str, &[(&str, f64)]); 3] = [
    (
        "functionality",
        &[
            ("automation", 0.14),
            ("error_handling", 0.07),
            ("fault_tolerance", 0.02),
            ("performance_quality", 0.04),
            ("unit_testing", 0.28),
        ],
    ),
    ("governance", &[("data_encryption", 0.02), ("monitoring", 0.07), ("security", 0.01), ("role_based_access", 0.03)]),
    (
        "accessibility",
        &[("availability", 0.02), ("ease_of_use", 0.17), ("integration", 0.04), ("interoperability", 0.08)],
    ),
];

const REFERENCE_SCORES: [(&str, f64); 3] = [("csp1", 0.28), ("csp2", 0.19), ("csp3", 0.53)];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load_fixture(name: &str) -> ModelDocument {
    load_model(&std::fs::read(fixture(name)).expect("fixture readable")).expect("fixture loads")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn matrix_from(n: usize, idx: &[usize]) -> JudgmentMatrix {
    let canon: Vec<SaatyJudgment> = SaatyJudgment::canonical().collect();
    let entries = upper_pairs(n).zip(idx).map(|((i, j), &k)| Judgment::new(i, j, canon[k])).collect();
    build_matrix(&JudgmentSet::new("m", entries), n).expect("complete canonical set")
}

fn property<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Outcome {
    let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    let mut runner = TestRunner::new_with_rng(config, rng);
    runner.run(&strategy, test).map(|()| format!("{CASES} cases, 0 failures")).map_err(|e| e.to_string())
}

fn matrix_strategy() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (3usize..=9).prop_flat_map(|n| (Just(n), prop::collection::vec(0usize..17, n * (n - 1) / 2)))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// ---- criteria ----

fn global_weight_reproduction() -> Outcome {
    let doc = load_fixture("cloud_platform.ahp.json");
    let parents: Vec<f64> = REFERENCE_GLOBALS.iter().map(|(_, leaves)| leaves.iter().map(|l| l.1).sum()).collect();
    let mut local = BTreeMap::new();
    local.insert(GOAL_ID.to_string(), PriorityVector::normalized(parents.clone()).map_err(|e| e.to_string())?);
    for ((id, leaves), parent) in REFERENCE_GLOBALS.iter().zip(&parents) {
        let v = leaves.iter().map(|l| l.1 / parent).collect();
        local.insert(id.to_string(), PriorityVector::new(v).map_err(|e| format!("{id}: {e}"))?);
    }
    let wm = WeightedModel::new(doc.hierarchy.clone(), local, DerivationSettings::default());
    let computed = global_weights(&wm).map_err(|e| e.to_string())?;
    ensure(computed.len() == 13, || format!("{} leaves, expected 13", computed.len()))?;

    let mut worst = 0.0f64;
    for (_, leaves) in REFERENCE_GLOBALS {
        for (id, expected) in leaves {
            let d = (computed[*id] - expected).abs();
            ensure(d <= REFERENCE_TOLERANCE, || format!("{id}: {:.4} vs {expected}", computed[*id]))?;
            worst = worst.max(d);
        }
    }
    let sum: f64 = computed.values().sum();
    ensure((sum - 1.0).abs() <= 1e-9, || format!("sum {sum}"))?;

    // the fixture's own judgments must land on the same table
    let eval = evaluate(&doc, &EvaluationOptions::from_document(&doc)).map_err(|e| e.to_string())?;
    let from_judgments = global_weights(&eval.model).map_err(|e| e.to_string())?;
    let mut worst_j = 0.0f64;
    for (_, leaves) in REFERENCE_GLOBALS {
        for (id, expected) in leaves {
            let d = (from_judgments[*id] - expected).abs();
            ensure(d <= REFERENCE_TOLERANCE, || format!("fixture {id}: {:.4} vs {expected}", from_judgments[*id]))?;
            worst_j = worst_j.max(d);
        }
    }
    let sum_j: f64 = from_judgments.values().sum();
    ensure((sum_j - 1.0).abs() <= 1e-9, || format!("fixture sum {sum_j}"))?;
    Ok(format!(
        "max |diff| {worst:.4} (back-derived), {worst_j:.4} (fixture judgments); sum-1 = {:.1e}",
        sum - 1.0
    ))
}

fn alternative_score_fixture() -> Outcome {
    let doc = load_fixture("cloud_platform.ahp.json");
    let eval = evaluate(&doc, &EvaluationOptions::from_document(&doc)).map_err(|e| e.to_string())?;
    let r = score_alternatives(&eval.model).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (id, expected) in REFERENCE_SCORES {
        let s = r.score(id).ok_or_else(|| format!("no score for {id}"))?;
        ensure((s - expected).abs() <= REFERENCE_TOLERANCE, || format!("{id}: {s:.4} vs {expected}"))?;
        worst = worst.max((s - expected).abs());
    }
    let sum: f64 = r.alternatives.iter().map(|a| a.score).sum();
    ensure((sum - 1.0).abs() <= 1e-9, || format!("scores sum to {sum}"))?;
    ensure(r.ranking == ["csp3", "csp1", "csp2"], || format!("ranking {:?}", r.ranking))?;

    let out = ahp(&["rank", fixture("cloud_platform.ahp.json").to_str().unwrap(), "--format", "json"]);
    ensure(code(&out) == 0, || format!("rank exited {}", code(&out)))?;
    let rank: RankOutput = parse(&out)?;
    ensure(rank.most_suitable.as_deref() == Some("csp3"), || format!("most suitable {:?}", rank.most_suitable))?;
    let text = ahp(&["rank", fixture("cloud_platform.ahp.json").to_str().unwrap()]);
    let top = String::from_utf8_lossy(&text.stdout).lines().nth(1).unwrap_or_default().to_string();
    ensure(top.contains("CSP3") && top.contains("most suitable"), || format!("top line {top:?}"))?;
    Ok(format!("CSP3 > CSP1 > CSP2, max |diff| {worst:.4}, CSP3 most suitable"))
}

fn consistent_matrix_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let settings = DerivationSettings::default();
    let (mut dw, mut dl, mut dc, mut dm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for case in 0..CASES as usize {
        let n = 3 + case % 7;
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..9.0)).collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let m = JudgmentMatrix::from_weights(&w).map_err(|e| e.to_string())?;
        let d = derive(&m, &settings).map_err(|e| e.to_string())?;
        let gm = derive_geometric_mean(&m);
        let report = check_consistency(&m, &settings, 0.1).map_err(|e| e.to_string())?;
        dw = dw.max(max_abs_diff(d.weights.weights(), &w));
        dl = dl.max((d.lambda_max - n as f64).abs());
        dc = dc.max(report.cr.abs());
        dm = dm.max(max_abs_diff(d.weights.weights(), gm.weights()));
    }
    ensure(dw <= 1e-6, || format!("weight error {dw:.2e}"))?;
    ensure(dl <= 1e-8, || format!("lambda_max error {dl:.2e}"))?;
    ensure(dc <= 1e-8, || format!("cr {dc:.2e}"))?;
    ensure(dm <= 1e-8, || format!("method disagreement {dm:.2e}"))?;
    Ok(format!("{CASES} cases; max errors: weights {dw:.1e}, lambda {dl:.1e}, cr {dc:.1e}, methods {dm:.1e}"))
}

fn random_index_verification() -> Outcome {
    let seed = 0;
    let mut parts = Vec::new();
    let mut misses = Vec::new();
    for n in 3..=9 {
        let est = estimate_random_index(n, 100_000, seed).map_err(|e| e.to_string())?;
        let table = RandomIndexTable::get(n).expect("n in table");
        parts.push(format!("n={n} {est:.4}/{table:.2}"));
        if (est - table).abs() > 0.05 {
            misses.push(format!("n={n} off by {:+.4}", est - table));
        }
    }
    let detail = parts.join(", ");
    if misses.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{} outside +-0.05 ({detail})", misses.join("; ")))
    }
}

/// Dominant eigenpair from a dense general eigensolver, independent of power iteration.
fn dense_oracle(rows: &[[f64; 3]; 3]) -> (f64, Vec<f64>) {
    let a = DMatrix::from_fn(3, 3, |i, j| rows[i][j]);
    let lambda = a.clone().complex_eigenvalues().iter().map(|c| c.re).fold(f64::MIN, f64::max);
    let shifted = &a - DMatrix::identity(3, 3) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let k = svd.singular_values.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).unwrap().0;
    let v: Vec<f64> = v_t.row(k).iter().copied().collect();
    let s: f64 = v.iter().sum();
    (lambda, v.iter().map(|x| x / s).collect())
}

fn known_inconsistent_case() -> Outcome {
    let rows = [[1.0, 2.0, 5.0], [0.5, 1.0, 3.0], [0.2, 1.0 / 3.0, 1.0]];
    let m = JudgmentMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).map_err(|e| e.to_string())?;
    let d: Derivation = derive(&m, &DerivationSettings::default()).map_err(|e| e.to_string())?;
    let report = check_consistency(&m, &DerivationSettings::default(), 0.10).map_err(|e| e.to_string())?;
    let w = d.weights.weights();

    let (lambda, ov) = dense_oracle(&rows);
    ensure(max_abs_diff(w, &ov) <= 1e-9, || format!("weights {w:?} vs oracle {ov:?}"))?;
    ensure((d.lambda_max - lambda).abs() <= 1e-9, || format!("lambda {} vs oracle {lambda}", d.lambda_max))?;
    let oracle_cr = (lambda - 3.0) / 2.0 / 0.58;
    ensure((report.cr - oracle_cr).abs() <= 1e-9, || format!("cr {} vs oracle {oracle_cr}", report.cr))?;

    ensure(max_abs_diff(w, &[0.582, 0.309, 0.109]) < 0.0005, || format!("weights {w:?}"))?;
    ensure((report.cr - 0.003).abs() < 0.0005, || format!("cr {}", report.cr))?;
    ensure(report.consistent, || "reported inconsistent".into())?;
    Ok(format!("w=({:.4}, {:.4}, {:.4}) cr={:.5} consistent; dense oracle agrees", w[0], w[1], w[2], report.cr))
}

// ---- property suites ----

fn permutation_equivariance() -> Outcome {
    let strategy = matrix_strategy().prop_flat_map(|(n, idx)| {
        (Just(n), Just(idx), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    });
    property(strategy, |(n, idx, perm)| {
        let m = matrix_from(n, &idx);
        for method in [Method::Eigenvector, Method::GeometricMean] {
            let s = DerivationSettings::with_method(method);
            let w = derive(&m, &s).unwrap().weights;
            let wp = derive(&m.permuted(&perm), &s).unwrap().weights;
            for a in 0..n {
                prop_assert!((wp.get(a) - w.get(perm[a])).abs() <= 1e-9, "{method} component {a}");
            }
        }
        Ok(())
    })
}

fn reciprocity_by_construction() -> Outcome {
    property((matrix_strategy(), 0usize..36, 1.01f64..3.0), |((n, idx), pick, bump)| {
        let m = matrix_from(n, &idx);
        for i in 0..n {
            prop_assert_eq!(m.get(i, i), 1.0);
            for j in 0..n {
                prop_assert!((m.get(i, j) * m.get(j, i) - 1.0).abs() <= 1e-12);
            }
        }
        // breaking one side of a pair must be rejected
        let (i, j) = upper_pairs(n).nth(pick % (n * (n - 1) / 2)).unwrap();
        let mut rows = m.rows();
        rows[i][j] *= bump;
        prop_assert!(JudgmentMatrix::from_rows(rows).is_err());
        Ok(())
    })
}

/// Random criteria forest: at most `max_depth` levels, 1..=9 children per node.
fn random_criteria(rng: &mut ChaCha8Rng, depth: usize, max_depth: usize, next: &mut usize) -> Vec<CriterionNode> {
    let k = rng.gen_range(1..=9);
    (0..k)
        .map(|_| {
            *next += 1;
            let id = format!("c{next}");
            if depth < max_depth && rng.gen_bool(0.3) {
                let children = random_criteria(rng, depth + 1, max_depth, next);
                CriterionNode::branch(id.clone(), format!("Criterion {id}"), children)
            } else {
                CriterionNode::leaf(id.clone(), format!("Criterion {id}"))
            }
        })
        .collect()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> PriorityVector {
    PriorityVector::normalized((0..n).map(|_| rng.gen_range(0.01..1.0)).collect()).unwrap()
}

fn random_weighted_model(seed: u64) -> WeightedModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next = 0;
    let criteria = random_criteria(&mut rng, 1, 4, &mut next);
    let alternatives = (0..rng.gen_range(2..=6)).map(|k| Alternative::new(format!("a{k}"), format!("A{k}"))).collect();
    let h = DecisionHierarchy::new("Random goal", criteria, alternatives);
    let mut local = BTreeMap::new();
    for node in h.comparison_nodes() {
        if node.members.len() > 1 {
            local.insert(node.id.to_string(), random_vector(&mut rng, node.members.len()));
        }
    }
    WeightedModel::new(h, local, DerivationSettings::default())
}

fn global_weight_normalization() -> Outcome {
    property(any::<u64>(), |seed| {
        let wm = random_weighted_model(seed);
        let g = global_weights(&wm).unwrap();
        prop_assert_eq!(g.len(), wm.hierarchy.leaves().len());
        prop_assert!(g.values().all(|w| *w > 0.0));
        let sum: f64 = g.values().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9, "sum {}", sum);
        Ok(())
    })
}

fn score_normalization() -> Outcome {
    property(any::<u64>(), |seed| {
        let wm = random_weighted_model(seed);
        let r = score_alternatives(&wm).unwrap();
        let sum: f64 = r.alternatives.iter().map(|a| a.score).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9, "sum {}", sum);
        Ok(())
    })
}

fn dominance_preservation() -> Outcome {
    property((any::<u64>(), any::<prop::sample::Index>(), any::<prop::sample::Index>()), |(seed, x, y)| {
        let mut wm = random_weighted_model(seed);
        let m = wm.hierarchy.alternatives.len();
        let (a, b) = (x.index(m), y.index(m));
        prop_assume!(a != b);
        for leaf in wm.hierarchy.leaves() {
            let v = wm.local.get_mut(&leaf.id).unwrap();
            let mut w = v.weights().to_vec();
            if w[a] < w[b] {
                w.swap(a, b);
            }
            *v = PriorityVector::new(w).unwrap();
        }
        let r = score_alternatives(&wm).unwrap();
        let (sa, sb) = (r.alternatives[a].score, r.alternatives[b].score);
        prop_assert!(sa >= sb - 1e-12, "{} < {}", sa, sb);
        Ok(())
    })
}

fn geometric_mean_monotonicity() -> Outcome {
    property((matrix_strategy(), any::<prop::sample::Index>(), 1usize..17), |((n, mut idx), pick, step)| {
        let p = pick.index(idx.len());
        idx[p] = idx[p].min(15);
        let before = matrix_from(n, &idx);
        idx[p] = (idx[p] + step).min(16);
        let after = matrix_from(n, &idx);
        let (i, j) = upper_pairs(n).nth(p).unwrap();
        let w0 = derive_geometric_mean(&before);
        let w1 = derive_geometric_mean(&after);
        let r0 = w0.get(i) / w0.get(j);
        let r1 = w1.get(i) / w1.get(j);
        prop_assert!(r1 > r0, "ratio {} -> {} at ({}, {})", r0, r1, i, j);
        Ok(())
    })
}

const NAMES: [&str; 6] = ["Option", "Café \"au lait\"", "日本語", "tab\tseparated", "back\\slash", "  padded  "];

fn random_document(seed: u64) -> ModelDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let canon: Vec<SaatyJudgment> = SaatyJudgment::canonical().collect();
    let mut next = 0;
    let criteria = random_criteria(&mut rng, 1, 3, &mut next);
    let alternatives = (0..rng.gen_range(2..=5))
        .map(|k| Alternative::new(format!("alt{k}"), format!("{} {k}", NAMES[rng.gen_range(0..NAMES.len())])))
        .collect();
    let mut doc = ModelDocument::new(DecisionHierarchy::new(NAMES[rng.gen_range(0..NAMES.len())], criteria, alternatives));
    let nodes: Vec<(String, usize)> =
        doc.hierarchy.comparison_nodes().iter().map(|c| (c.id.to_string(), c.members.len())).collect();
    for (id, n) in nodes {
        if n < 2 || rng.gen_bool(0.2) {
            continue;
        }
        let mut entries = Vec::new();
        for (i, j) in upper_pairs(n) {
            if rng.gen_bool(0.8) {
                entries.push(Judgment::new(i, j, canon[rng.gen_range(0..canon.len())]));
            }
        }
        if !entries.is_empty() {
            doc.judgments.insert(id.clone(), JudgmentSet::new(id, entries));
        }
    }
    doc.settings = ModelSettings {
        method: if rng.gen_bool(0.5) { Method::Eigenvector } else { Method::GeometricMean },
        tolerance: [1e-12, 1e-10, 1e-8][rng.gen_range(0..3)],
        max_iterations: rng.gen_range(100..=20_000),
        cr_threshold: rng.gen_range(0.01..0.5),
    };
    doc
}

fn store_round_trip() -> Outcome {
    property(any::<u64>(), |seed| {
        let doc = random_document(seed);
        prop_assert_eq!(doc.version, FORMAT_VERSION);
        let bytes = save_model(&doc);
        let back = load_model(&bytes).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(save_model(&back), bytes);
        Ok(())
    })
}

fn sensitivity_crossover() -> Outcome {
    let steps = 1000;
    let doc = load_fixture("crossover.ahp.json");
    let eval = evaluate(&doc, &EvaluationOptions::from_document(&doc)).map_err(|e| e.to_string())?;
    let current = eval.model.local[GOAL_ID].get(0);
    let q = SensitivityQuery { target_node: "l1".into(), new_weight: current };
    let scan = sensitivity_scan(&eval.model, &q, steps).map_err(|e| e.to_string())?;
    ensure(scan.points.len() == steps, || format!("{} points", scan.points.len()))?;
    ensure(scan.reversals.len() == 1, || format!("{} reversals", scan.reversals.len()))?;
    let w = scan.reversals[0].weight;
    ensure((w - 0.5).abs() <= 1.0 / steps as f64, || format!("reversal at {w}"))?;
    Ok(format!("reversal at {w:.6} (|diff| {:.1e}, bound {:.1e})", (w - 0.5).abs(), 1.0 / steps as f64))
}

// ---- CLI contract ----

fn ahp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ahp"))
        .args(args)
        .env_remove("AHP_CR_THRESHOLD")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn parse<T: DeserializeOwned>(o: &Output) -> Result<T, String> {
    serde_json::from_slice(&o.stdout).map_err(|e| format!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn mutated_canonical(dir: &Path, name: &str, f: impl FnOnce(&mut serde_json::Value)) -> String {
    let mut v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(fixture("cloud_platform.ahp.json")).unwrap()).unwrap();
    f(&mut v);
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_vec_pretty(&v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn schema_check<T: DeserializeOwned>(
    args: &[String],
    want: i32,
    tag: impl Fn(&T) -> &str,
    schema: &str,
) -> Result<(), String> {
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = ahp(&args);
    ensure(code(&o) == want, || format!("{args:?} exited {} (want {want})", code(&o)))?;
    let doc: T = parse(&o)?;
    ensure(tag(&doc) == schema, || format!("{args:?}: schema {:?}", tag(&doc)))
}

fn cli_contract() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let canonical = fixture("cloud_platform.ahp.json").to_string_lossy().into_owned();
    let uniform = fixture("uniform.ahp.json").to_string_lossy().into_owned();
    let wild = fixture("wild.ahp.json").to_string_lossy().into_owned();
    let crossover = fixture("crossover.ahp.json").to_string_lossy().into_owned();

    let missing_pair = mutated_canonical(d, "missing.ahp.json", |v| {
        v["judgments"]["governance"].as_array_mut().unwrap().remove(0);
    });
    let missing_leaf = mutated_canonical(d, "leaf.ahp.json", |v| {
        v["judgments"].as_object_mut().unwrap().remove("monitoring");
    });
    let duplicate = mutated_canonical(d, "dup.ahp.json", |v| v["alternatives"][2]["id"] = "csp1".into());
    let non_canonical = mutated_canonical(d, "nc.ahp.json", |v| v["judgments"]["goal"][0]["value"] = "2.5".into());
    let future = mutated_canonical(d, "future.ahp.json", |v| v["version"] = 2.into());
    let unknown_field = mutated_canonical(d, "field.ahp.json", |v| v["extra"] = true.into());
    let truncated = d.join("trunc.ahp.json");
    std::fs::write(&truncated, b"{\"version\": 1, \"goal\": \"x\", \"criteria\": [").unwrap();
    let truncated = truncated.to_string_lossy().into_owned();

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["validate", &canonical], 0),
        (vec!["weights", &canonical], 0),
        (vec!["check", &canonical], 0),
        (vec!["rank", &canonical], 0),
        (vec!["export", &canonical], 0),
        (vec!["sensitivity", &canonical, "--node", "unit_testing"], 0),
        (vec!["rank", &uniform], 0),
        (vec!["sensitivity", &crossover, "--node", "l1", "--steps", "1000"], 0),
        (vec!["ri", "--n", "4", "--samples", "1000"], 0),
        (vec!["validate", &missing_pair], 1),
        (vec!["weights", &missing_pair], 1),
        (vec!["rank", &missing_leaf], 1),
        (vec!["validate", &duplicate], 1),
        (vec!["check", &non_canonical], 1),
        (vec!["sensitivity", &canonical, "--node", "nonexistent"], 1),
        (vec!["check", &truncated], 2),
        (vec!["check", &future], 2),
        (vec!["check", &unknown_field], 2),
        (vec!["check", "/nonexistent/model.ahp.json"], 2),
        (vec!["sensitivity", &crossover, "--node", "l1", "--steps", "1"], 2),
        (vec!["ri", "--n", "11"], 2),
        (vec!["rank"], 2),
        (vec!["check", &wild], 3),
        (vec!["rank", &wild], 3),
        (vec!["weights", &wild], 3),
    ];
    for (args, want) in &cases {
        let o = ahp(args);
        ensure(code(&o) == *want, || {
            format!("{args:?} exited {} (want {want}): {}", code(&o), String::from_utf8_lossy(&o.stderr).trim())
        })?;
    }
    let wild_rank = ahp(&["rank", &wild]);
    ensure(!wild_rank.stdout.is_empty(), || "inconsistent rank printed nothing".into())?;

    let json = |args: &[&str]| -> Vec<String> {
        args.iter().chain(&["--format", "json"]).map(|s| s.to_string()).collect()
    };
    schema_check::<ValidateOutput>(&json(&["validate", &canonical]), 0, |o| &o.schema, VALIDATE_SCHEMA)?;
    schema_check::<ValidateOutput>(&json(&["validate", &missing_pair]), 1, |o| &o.schema, VALIDATE_SCHEMA)?;
    schema_check::<WeightsOutput>(&json(&["weights", &canonical]), 0, |o| &o.schema, WEIGHTS_SCHEMA)?;
    schema_check::<CheckOutput>(&json(&["check", &wild]), 3, |o| &o.schema, CHECK_SCHEMA)?;
    schema_check::<RankOutput>(&json(&["rank", &canonical]), 0, |o| &o.schema, RANK_SCHEMA)?;
    let sens = json(&["sensitivity", &crossover, "--node", "l1"]);
    schema_check::<SensitivityOutput>(&sens, 0, |o| &o.schema, SENSITIVITY_SCHEMA)?;
    schema_check::<RiOutput>(&json(&["ri", "--n", "3", "--samples", "1000"]), 0, |o| &o.schema, RI_SCHEMA)?;
    Ok(format!("{} exit-code cases, 7 schema round-trips", cases.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("global weight table reproduction", global_weight_reproduction),
        ("alternative score fixture", alternative_score_fixture),
        ("consistent-matrix oracle", consistent_matrix_oracle),
        ("random index verification", random_index_verification),
        ("known inconsistent case", known_inconsistent_case),
        ("property: permutation equivariance", permutation_equivariance),
        ("property: reciprocity by construction", reciprocity_by_construction),
        ("property: global-weight normalization", global_weight_normalization),
        ("property: score normalization", score_normalization),
        ("property: dominance preservation", dominance_preservation),
        ("property: geometric-mean monotonicity", geometric_mean_monotonicity),
        ("property: store round-trip", store_round_trip),
        ("sensitivity crossover", sensitivity_crossover),
        ("cli contract", cli_contract),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({ms} ms): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} ({ms} ms): {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
