//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use civiclink::analytics::{delta_words, lda_fit_with, LdaConfig};
use civiclink::corpus::{candidate_pairs, generate_synthetic_corpus, Meeting, Split, SynthParams, DEFAULT_WINDOW_DAYS};
use civiclink::learn::{gradient_check, LabeledExample, TrainConfig};
use civiclink::meetings::{
    assign_comments, comment_space, evaluate_transition_model, find_public_commenters, peg_agenda, split_meetings,
    train_transition_model, CommentConfig, DEFAULT_LIKELIHOOD_THRESHOLD,
};
use civiclink::newsworthy::{
    generate_newsworthy_dataset, rank_metrics, run_cutoff_grid, run_section_grid, GridRow, GridSettings, MrrMode,
    NewsworthySynthParams, PromptSections, ScoredPrompt, F1_THRESHOLD,
};
use civiclink::prmlink::{
    ablate_chain, build_standard_chain, calibrate_lambda, evaluate_links, evaluation_universe, gold_pairs,
    run_funnel, ChainConfig, API_KEY_VAR, ENDPOINT_VAR, MODEL_VAR,
};
use civiclink::textvec::{fit_tfidf, tokenize_with, SparseVector, TokenizerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn funnel_ablation() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    pool.install(|| {
        let start = Instant::now();
        let corpus = generate_synthetic_corpus(42, &SynthParams::default()).map_err(|e| e.to_string())?;
        let store = corpus.store().map_err(|e| e.to_string())?;
        let pairs = candidate_pairs(store.articles(), store.policies(), &store.meeting_dates(), DEFAULT_WINDOW_DAYS)
            .map_err(|e| e.to_string())?;
        let trained =
            build_standard_chain(&store, &corpus.annotations, &ChainConfig::default(), None).map_err(|e| e.to_string())?;
        let (train_gold, test_gold) = (gold_pairs(&corpus.gold, Split::Train), gold_pairs(&corpus.gold, Split::Test));
        let mut f1s = Vec::new();
        for k in 0..=3 {
            let chain = ablate_chain(&trained.chain, k).map_err(|e| e.to_string())?;
            let scores = run_funnel(&chain, &store, &pairs).map_err(|e| e.to_string())?;
            let cal = calibrate_lambda(&evaluation_universe(&scores, &corpus.gold, Split::Train), &train_gold)
                .map_err(|e| e.to_string())?;
            let test = evaluate_links(&evaluation_universe(&scores, &corpus.gold, Split::Test), &test_gold, cal.lambda)
                .map_err(|e| e.to_string())?;
            f1s.push(test.f1);
        }
        let secs = start.elapsed().as_secs_f64();
        let monotone = f1s.windows(2).all(|w| w[1] >= w[0]);
        check(
            corpus.gold.len() == 50 && monotone && f1s[3] >= 0.90 && f1s[0] <= 0.60 && secs < 60.0,
            format!("F1 by chain length {:?}, {} gold links, {secs:.1}s on one thread", rounded(&f1s), corpus.gold.len()),
        )
    })
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1000.0).round() / 1000.0).collect()
}

fn metric_fixture(seed: u64) -> Vec<ScoredPrompt> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let levels: Vec<f64> = (0..r.random_range(1..=12)).map(|i| i as f64 / 11.0).collect();
    let mut out = Vec::new();
    for m in 0..r.random_range(1..=5) {
        for p in 0..r.random_range(1..=20) {
            out.push(ScoredPrompt {
                meeting_id: format!("M{m}"),
                policy_id: format!("P{m}{p:02}"),
                score: levels[r.random_range(0..levels.len())],
                label: r.random_bool(0.25),
            });
        }
    }
    if !out.iter().any(|s| s.label) {
        out[0].label = true;
    }
    out
}

fn oracle_metrics(s: &[ScoredPrompt], k: usize) -> [f64; 4] {
    let tp = s.iter().filter(|x| x.label && x.score >= F1_THRESHOLD).count() as f64;
    let pred = s.iter().filter(|x| x.score >= F1_THRESHOLD).count() as f64;
    let gold = s.iter().filter(|x| x.label).count() as f64;
    let f1 = if tp == 0.0 {
        0.0
    } else {
        let (p, r) = (tp / pred, tp / gold);
        2.0 * p * r / (p + r)
    };

    let (mut wins, mut pairs) = (0.0, 0.0);
    for a in s.iter().filter(|x| x.label) {
        for b in s.iter().filter(|x| !x.label) {
            pairs += 1.0;
            wins += if a.score > b.score { 1.0 } else if a.score == b.score { 0.5 } else { 0.0 };
        }
    }
    let auc = if pairs == 0.0 { 0.5 } else { wins / pairs };

    let mut meetings: BTreeMap<&str, Vec<&ScoredPrompt>> = BTreeMap::new();
    for x in s {
        meetings.entry(&x.meeting_id).or_default().push(x);
    }
    let (mut recalls, mut rr) = (Vec::new(), Vec::new());
    for group in meetings.values() {
        let mut ranks: Vec<usize> = group
            .iter()
            .filter(|x| x.label)
            .map(|x| {
                1 + group
                    .iter()
                    .filter(|y| y.score > x.score || (y.score == x.score && y.policy_id < x.policy_id))
                    .count()
            })
            .collect();
        if ranks.is_empty() {
            continue;
        }
        ranks.sort_unstable();
        recalls.push(ranks.iter().filter(|&&r| r <= k).count() as f64 / ranks.len() as f64);
        rr.extend(ranks.iter().map(|&r| 1.0 / r as f64));
    }
    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    [f1, auc, avg(&recalls), avg(&rr)]
}

fn metric_oracles() -> Outcome {
    let mut mismatches = Vec::new();
    for seed in 0..200 {
        let s = metric_fixture(seed);
        let m = rank_metrics(&s, 10, MrrMode::PerPositive).map_err(|e| e.to_string())?;
        if [m.f1, m.roc_auc, m.recall_at_10, m.mrr] != oracle_metrics(&s, 10) {
            mismatches.push(seed);
        }
    }
    check(
        mismatches.is_empty(),
        format!("200 fixtures, exact mismatches at seeds {mismatches:?}"),
    )
}

fn gradient() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let dim = r.random_range(2..12);
        let examples: Vec<LabeledExample> = (0..r.random_range(3..25))
            .map(|i| {
                let entries: Vec<(usize, f64)> = (0..dim)
                    .filter_map(|j| r.random_bool(0.5).then(|| (j, r.random_range(-2.0..2.0))))
                    .collect();
                LabeledExample::new(format!("x{i}"), SparseVector::from_pairs(entries), r.random_bool(0.5))
            })
            .collect();
        let config = TrainConfig {
            l2_lambda: r.random_range(0.0..0.1),
            seed,
            ..Default::default()
        };
        worst = worst.max(gradient_check(&examples, dim, &config));
    }
    check(worst <= 1e-4, format!("max |analytic - central difference| = {worst:.2e} over 20 fixtures"))
}

struct AlignFixture {
    linked: civiclink::corpus::SyntheticCorpus,
    dropped: civiclink::corpus::SyntheticCorpus,
    train: Vec<Meeting>,
    held: BTreeSet<String>,
}

fn align_fixture() -> Result<AlignFixture, String> {
    let params = |drop: f64| SynthParams {
        n_articles: 100,
        n_policies: 250,
        n_days: 364,
        hyperlink_drop_rate: drop,
        ..SynthParams::default()
    };
    let linked = generate_synthetic_corpus(7, &params(0.0)).map_err(|e| e.to_string())?;
    let dropped = generate_synthetic_corpus(7, &params(0.3)).map_err(|e| e.to_string())?;
    let (train_ids, held) = split_meetings(&linked.meetings, 0.3, 7);
    let train_ids: BTreeSet<String> = train_ids.into_iter().collect();
    let train = linked.meetings.iter().filter(|m| train_ids.contains(&m.id)).cloned().collect();
    Ok(AlignFixture {
        linked,
        dropped,
        train,
        held: held.into_iter().collect(),
    })
}

fn pegging(f: &AlignFixture) -> Outcome {
    let model = train_transition_model(&f.train, TrainConfig::default()).map_err(|e| e.to_string())?;
    let (mut total, mut correct, mut fallback) = (0, 0, 0);
    for m in f.dropped.meetings.iter().filter(|m| f.held.contains(&m.id)) {
        let truth = &f.dropped.truth.meetings[&m.id];
        let pegged = peg_agenda(m, &model, DEFAULT_LIKELIHOOD_THRESHOLD);
        for (i, item) in pegged.items.iter().enumerate() {
            let t = item.timestamp_s.unwrap_or(f64::NAN);
            if truth.grouped[i] && t == truth.item_timestamps[i] {
                fallback += 1;
            }
            if truth.dropped[i] {
                total += 1;
                correct += usize::from(t == truth.item_timestamps[i]);
            }
        }
    }
    let acc = correct as f64 / total.max(1) as f64;
    check(
        total > 0 && acc >= 0.95 && fallback > 0,
        format!("{correct}/{total} removed timestamps restored ({acc:.3}); fallback used on {fallback} items"),
    )
}

fn transitions(f: &AlignFixture) -> Outcome {
    let model = train_transition_model(&f.train, TrainConfig::default()).map_err(|e| e.to_string())?;
    let held: Vec<Meeting> = f.linked.meetings.iter().filter(|m| f.held.contains(&m.id)).cloned().collect();
    let report = evaluate_transition_model(&model, &held, 0.5);
    check(report.f1 >= 0.80, format!("held-out F1 {:.3} on {} meetings", report.f1, held.len()))
}

fn commenters(f: &AlignFixture) -> Outcome {
    let c = &f.linked;
    let space = comment_space(&c.meetings, &c.policies).map_err(|e| e.to_string())?;
    let by_id: HashMap<&str, _> = c.policies.iter().map(|p| (p.id.as_str(), p)).collect();
    let (mut exact, mut assigned, mut right) = (0, 0, 0);
    for m in &c.meetings {
        let truth = &c.truth.meetings[&m.id];
        let flagged = find_public_commenters(m);
        let got: BTreeSet<&str> = flagged.iter().map(|p| p.speaker_id.as_str()).collect();
        let want: BTreeSet<&str> = truth.commenters.iter().map(|p| p.speaker_id.as_str()).collect();
        exact += usize::from(got == want);
        let pols: Vec<_> = m.policy_ids().filter_map(|id| by_id.get(id).copied()).collect();
        for a in assign_comments(m, &flagged, &pols, &space, CommentConfig::default()) {
            assigned += 1;
            let planted = truth.commenters.iter().find(|p| p.speaker_id == a.speaker_id);
            right += usize::from(planted.and_then(|p| p.policy_id.as_deref()) == Some(a.policy_id.as_str()));
        }
    }
    let precision = right as f64 / assigned.max(1) as f64;
    check(
        exact == c.meetings.len() && assigned > 0 && precision >= 0.9,
        format!(
            "commenter sets exact in {exact}/{} meetings; assignment precision {right}/{assigned} = {precision:.3}",
            c.meetings.len()
        ),
    )
}

fn rocs(rows: &[GridRow]) -> Option<Vec<f64>> {
    rows.iter().map(|r| r.metrics.as_ref().map(|m| m.roc_auc)).collect()
}

fn stationarity() -> Outcome {
    let data = generate_newsworthy_dataset(11, &NewsworthySynthParams::default()).map_err(|e| e.to_string())?;
    let rows = run_cutoff_grid(&data, &[2017, 2018, 2019, 2020, 2021], &GridSettings::default()).map_err(|e| e.to_string())?;
    let r = rocs(&rows).ok_or("a cutoff cell was invalid")?;
    let spread = r.iter().cloned().fold(f64::MIN, f64::max) - r.iter().cloned().fold(f64::MAX, f64::min);
    check(
        r.len() == 5 && spread < 0.10,
        format!("ROC by cutoff {:?}, spread {spread:.3}", rounded(&r)),
    )
}

fn prompt_ablation() -> Outcome {
    let data = generate_newsworthy_dataset(12, &NewsworthySynthParams::default()).map_err(|e| e.to_string())?;
    let full = PromptSections::FULL;
    let grid = [full, full.without_policy(), full.without_public()];
    let rows = run_section_grid(&data, &grid, &GridSettings::default()).map_err(|e| e.to_string())?;
    let r = rocs(&rows).ok_or("a section cell was invalid")?;
    let (drop_policy, drop_public) = (r[0] - r[1], (r[0] - r[2]).abs());
    check(
        drop_policy >= 0.15 && drop_public < 0.05,
        format!("ROC full {:.3}; without (1) drops {drop_policy:.3}; without (3) changes {drop_public:.3}", r[0]),
    )
}

fn run_binary(dir: &Path, args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_civiclink"))
        .args(args)
        .current_dir(dir)
        .env_remove(ENDPOINT_VAR)
        .env_remove(API_KEY_VAR)
        .env_remove(MODEL_VAR)
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&status.stderr)))
    }
}

fn pipeline(dir: &Path, jobs: &str) -> Result<(), String> {
    fs::write(dir.join("run.toml"), "seed = 42\n[newsworthy.split]\ncutoff = \"2020-07-01\"\n").map_err(|e| e.to_string())?;
    let g = |out: &'static str| ["--config", "run.toml", "--jobs", jobs, "--out", out];
    let steps: Vec<Vec<&str>> = vec![
        [&g("corpus")[..], &["synth"]].concat(),
        [&g("link")[..], &["link", "--corpus", "corpus", "--calibrate", "--external", "--ablate"]].concat(),
        [&g("align")[..], &["align", "--corpus", "corpus"]].concat(),
        [&g("dataset")[..], &["newsworthy", "build", "--corpus", "corpus", "--links", "link/links.csv", "--meetings", "align/aligned_meetings.jsonl"]].concat(),
        [&g("model")[..], &["newsworthy", "train", "--dataset", "dataset/dataset.jsonl"]].concat(),
        [&g("eval")[..], &["newsworthy", "eval", "--dataset", "dataset/dataset.jsonl", "--model", "model/ranker.json"]].concat(),
        [&g("stub_eval")[..], &["newsworthy", "eval", "--dataset", "dataset/dataset.jsonl", "--external"]].concat(),
        [&g("ablate")[..], &["newsworthy", "ablate", "--dataset", "dataset/dataset.jsonl"]].concat(),
        [&g("analytics")[..], &["analyze", "--corpus", "corpus", "--links", "link/links.csv", "--dataset", "dataset/dataset.jsonl"]].concat(),
        [&g("report")[..], &["report", "--run", "link", "--run", "align", "--run", "eval", "--run", "analytics"]].concat(),
    ];
    for s in steps {
        run_binary(dir, &s)?;
    }
    Ok(())
}

fn artifacts(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for e in fs::read_dir(dir).into_iter().flatten().flatten() {
            let p = e.path();
            if p.is_dir() {
                walk(root, &p, out);
            } else if p.file_name().is_some_and(|n| n != "run_manifest.json") {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap_or_default());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    fs::create_dir_all(&a).and_then(|_| fs::create_dir_all(&b)).map_err(|e| e.to_string())?;
    pipeline(&a, "1")?;
    pipeline(&b, "4")?;
    let (fa, fb) = (artifacts(&a), artifacts(&b));
    let differing: Vec<String> = fa
        .keys()
        .chain(fb.keys())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|k| fa.get(*k) != fb.get(*k))
        .map(|k| k.display().to_string())
        .collect();
    let n_data = fa.keys().filter(|k| k.extension().is_some_and(|e| e == "csv" || e == "json" || e == "jsonl")).count();
    check(
        differing.is_empty() && n_data > 20,
        format!("{} files ({n_data} CSV/JSON) compared across --jobs 1 and 4; differing: {differing:?}", fa.len()),
    )
}

fn conservation() -> Outcome {
    let corpus = generate_synthetic_corpus(42, &SynthParams::default()).map_err(|e| e.to_string())?;
    let linked: BTreeSet<&str> = corpus.gold.iter().map(|g| g.policy_id.as_str()).collect();
    let (pos, neg): (Vec<String>, Vec<String>) = {
        let (p, n): (Vec<_>, Vec<_>) = corpus.policies.iter().partition(|p| linked.contains(p.id.as_str()));
        (p.iter().map(|p| p.text()).collect(), n.iter().map(|p| p.text()).collect())
    };
    let delta = delta_words(&pos, &neg, TokenizerConfig::default()).map_err(|e| e.to_string())?;
    let delta_sum = delta.sum();

    let tok = TokenizerConfig::default().with_stopwords_removed();
    let docs: Vec<Vec<String>> = corpus.policies.iter().map(|p| tokenize_with(&p.text(), tok)).collect();
    let n_tokens: usize = docs.iter().map(Vec::len).sum();
    let mut bad_sweeps = 0;
    let mut sweeps = 0;
    let config = LdaConfig {
        iterations: 50,
        seed: 3,
        ..LdaConfig::default()
    };
    lda_fit_with(&docs, &config, |_, m| {
        sweeps += 1;
        if m.conserved_tokens() != Some(n_tokens) {
            bad_sweeps += 1;
        }
    })
    .map_err(|e| e.to_string())?;

    let texts: Vec<String> = corpus.articles.iter().map(|a| a.text()).collect();
    let space = fit_tfidf(&texts).map_err(|e| e.to_string())?;
    let probes = texts.iter().map(String::as_str).chain(["", "zzzz qqqq", "the of and"]);
    let bad_norms = probes
        .map(|t| space.transform(t).norm())
        .filter(|&n| n != 0.0 && (n - 1.0).abs() > 1e-9)
        .count();
    check(
        delta_sum.abs() <= 1e-4 && bad_sweeps == 0 && sweeps == 50 && bad_norms == 0,
        format!(
            "delta sum {delta_sum:.2e}; LDA conserved {n_tokens} tokens in {}/{sweeps} sweeps; {bad_norms} bad TF-IDF norms over {} vectors",
            sweeps - bad_sweeps,
            texts.len() + 3
        ),
    )
}

fn main() {
    let fixture = align_fixture();
    let align = |f: fn(&AlignFixture) -> Outcome| match &fixture {
        Ok(fx) => f(fx),
        Err(e) => Err(e.clone()),
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("funnel ablation direction", funnel_ablation()),
        ("metric oracle equivalence", metric_oracles()),
        ("logistic gradient check", gradient()),
        ("agenda pegging", align(pegging)),
        ("transition classifier", align(transitions)),
        ("public commenter attribution", align(commenters)),
        ("newsworthiness stationarity", stationarity()),
        ("prompt section ablation", prompt_ablation()),
        ("pipeline determinism", determinism()),
        ("conservation invariants", conservation()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail}", i + 1);
    }
    println!("{} of {} acceptance criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
