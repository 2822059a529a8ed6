//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod oracle_tables;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fer_probe::backend::{run_inference, BackendConfig, BackendKind, MockBackend, ResponseCache};
use fer_probe::cli::RunConfig;
use fer_probe::cli::{cmd_run, DatasetConfig};
use fer_probe::datasets::{
    majority_label, Dataset, DatasetSpec, Layout, MajorityOutcome, VoteRecord, DROP_LABELS,
};
use fer_probe::lexicon::{load_lexicon, LexiconSource, Precedence};
use fer_probe::metrics::{cross_dataset_mean, ConfusionMatrix, Scores};
use fer_probe::report::{PublishedKind, PUBLISHED_RESULTS};
use fer_probe::vocab::{
    canonical_class_order, BasicExpression, GroundTruthLabel, ImageRef, PredictedClass, PromptId,
    Sample,
};
use fer_probe::{render_prompt, Lexicon};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(
        elapsed < limit,
        format!("took {elapsed:?}, limit {limit:?}"),
    )
}

// 1. Mean column of the published table from its per-dataset cells.
fn published_means() -> Outcome {
    let start = Instant::now();
    let rows = oracle_tables::VLM_ROWS;
    check(
        rows.len() == 28,
        format!("expected 28 VLM rows, found {}", rows.len()),
    )?;
    let mut worst: f64 = 0.0;
    for group in [oracle_tables::VLM_ROWS, oracle_tables::BASELINES] {
        for (model, setting, cells, printed) in group {
            let scores: Vec<Scores> = cells
                .iter()
                .flatten()
                .map(|&(war, uar)| Scores { war, uar })
                .collect();
            let mean = cross_dataset_mean(&scores).map_err(|e| e.to_string())?;
            let dw = (mean.war - printed.0).abs();
            let du = (mean.uar - printed.1).abs();
            worst = worst.max(dw).max(du);
            check(
                dw <= 0.01 + 1e-9 && du <= 0.01 + 1e-9,
                format!(
                    "{model} {setting}: mean {:.4}/{:.4} vs printed {:.2}/{:.2}",
                    mean.war, mean.uar, printed.0, printed.1
                ),
            )?;
        }
    }
    // The library's copy of the table matches the independent transcription.
    let vlm: Vec<_> = PUBLISHED_RESULTS
        .iter()
        .filter(|r| r.kind == PublishedKind::Vlm)
        .collect();
    check(
        vlm.len() == rows.len(),
        "library table has a different row count",
    )?;
    for (lib, (model, setting, cells, mean)) in vlm.iter().zip(rows) {
        check(
            lib.model == *model
                && lib.setting == *setting
                && lib.datasets == *cells
                && lib.mean == *mean,
            format!(
                "library row {} {} differs from transcription",
                lib.model, lib.setting
            ),
        )?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("28 VLM rows + 4 baselines, max |diff| {worst:.4}"))
}

// 2. Matrix metrics versus per-sample brute force.
fn metrics_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let pool = [
        "anger",
        "disgust",
        "fear",
        "happiness",
        "sadness",
        "surprise",
        "neutral",
        "contempt",
    ];
    let preds = canonical_class_order();
    for instance in 0..1000 {
        let k = rng.random_range(1..=8);
        let classes: Vec<&str> = pool[..k].to_vec();
        let n = rng.random_range(1..=200);
        let samples: Vec<(&str, PredictedClass)> = (0..n)
            .map(|_| {
                (
                    classes[rng.random_range(0..k)],
                    preds[rng.random_range(0..preds.len())],
                )
            })
            .collect();
        let cm = ConfusionMatrix::accumulate(
            classes.iter().map(|c| GroundTruthLabel::new(c)).collect(),
            samples.iter().copied(),
        )
        .map_err(|e| e.to_string())?;

        // Brute force: tally each class directly from the sample list.
        let correct = |gt: &str, p: PredictedClass| match p {
            PredictedClass::Expression(e) => e.name() == gt,
            PredictedClass::Unknown => false,
        };
        let mut recalls = Vec::new();
        for c in &classes {
            let of_class: Vec<_> = samples.iter().filter(|(g, _)| g == c).collect();
            if !of_class.is_empty() {
                let hit = of_class.iter().filter(|(g, p)| correct(g, *p)).count();
                recalls.push(hit as f64 / of_class.len() as f64);
            }
        }
        let uar = recalls.iter().sum::<f64>() / recalls.len() as f64;
        let hits = samples.iter().filter(|(g, p)| correct(g, *p)).count();
        let accuracy = hits as f64 / n as f64;

        let got_uar = cm.uar().map_err(|e| e.to_string())?;
        let got_war = cm.war().map_err(|e| e.to_string())?;
        check(
            (got_uar - uar).abs() <= 1e-12,
            format!("instance {instance}: uar {got_uar} vs {uar}"),
        )?;
        check(
            (got_war - accuracy).abs() <= 1e-12,
            format!("instance {instance}: war {got_war} vs {accuracy}"),
        )?;
        check(
            got_war == accuracy,
            format!("instance {instance}: war {got_war} != accuracy {accuracy}"),
        )?;
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok("1000 random instances agree with brute force".into())
}

// 3. Every published synonym maps to its row; one conflict on the built-in table.
fn lexicon_fidelity() -> Outcome {
    let start = Instant::now();
    let (lexicon, conflicts) =
        load_lexicon(&LexiconSource::BuiltIn, &Precedence::default()).map_err(|e| e.to_string())?;
    check(
        conflicts.len() == 1,
        format!("expected exactly one conflict, got {conflicts:?}"),
    )?;
    let c = &conflicts[0];
    check(
        c.synonym == "slightly surprised"
            && c.claimants == [BasicExpression::Surprise, BasicExpression::Neutral].into()
            && c.resolution == BasicExpression::Surprise,
        format!("unexpected conflict {c:?}"),
    )?;
    let mut checked = 0;
    for (expr, synonym) in oracle_tables::SYNONYMS {
        let want = BasicExpression::from_name(expr).ok_or(format!("bad expression {expr}"))?;
        let got = lexicon.map_answer(synonym);
        let ok = if *synonym == c.synonym {
            // The duplicated entry maps to the precedence winner.
            got.class == PredictedClass::Expression(c.resolution) && c.claimants.contains(&want)
        } else {
            got.class == PredictedClass::Expression(want)
        };
        check(
            ok,
            format!("{synonym:?}: expected {expr}, got {}", got.class),
        )?;
        checked += 1;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "{checked} synonyms; conflict {:?} resolved to {}",
        c.synonym, c.resolution
    ))
}

const REFUSALS: [&str; 2] = [
    "Sorry, as a base VLM I am not trained to answer this question",
    "The image is too blurry to determine the person's emotion",
];

// 4. Refusals land in the Unknown column.
fn refusals() -> Outcome {
    let lexicon = Lexicon::builtin();
    for r in REFUSALS {
        let p = lexicon.map_answer(r);
        check(
            p.class == PredictedClass::Unknown,
            format!("{r:?} mapped to {} via {:?}", p.class, p.matched_synonym),
        )?;
    }
    let classes = vec![
        GroundTruthLabel::new("anger"),
        GroundTruthLabel::new("happiness"),
    ];
    let pairs = [
        ("anger", REFUSALS[0]),
        ("happiness", REFUSALS[1]),
        ("happiness", "happy"),
    ]
    .map(|(g, a)| (g, lexicon.map_answer(a).class));
    let cm = ConfusionMatrix::accumulate(classes, pairs).map_err(|e| e.to_string())?;
    check(
        cm.count("anger", PredictedClass::Unknown) == 1,
        "anger refusal not in Unk",
    )?;
    check(
        cm.count("happiness", PredictedClass::Unknown) == 1,
        "happiness refusal not in Unk",
    )?;
    check(
        cm.unknown_total() == 2,
        format!("Unk column total {}", cm.unknown_total()),
    )?;
    let csv = cm.to_csv();
    check(
        csv.lines().nth(1).is_some_and(|l| l.ends_with(",1")),
        "Unk column missing from CSV",
    )?;
    Ok("both refusals scored as Unknown".into())
}

/// (gt, scripted answers or `None` for a backend error)
fn fixture_plan() -> Vec<(&'static str, Vec<Option<&'static str>>)> {
    let rep = |n: usize, a: &'static str| std::iter::repeat_n(Some(a), n);
    vec![
        (
            "anger",
            rep(7, "angry")
                .chain([Some("Mad."), Some("sad"), Some(REFUSALS[0])])
                .collect(),
        ),
        (
            "disgust",
            rep(4, "disgusted")
                .chain(rep(2, "grossed out"))
                .chain(rep(3, "angry"))
                .chain([None])
                .collect(),
        ),
        (
            "fear",
            rep(5, "fearful")
                .chain(rep(3, "surprised"))
                .chain(rep(2, "neutral"))
                .collect(),
        ),
        (
            "happiness",
            rep(6, "happy")
                .chain(rep(2, "Smiling"))
                .chain([Some("he is sticking out his tongue"), Some(REFUSALS[1])])
                .collect(),
        ),
        (
            "neutral",
            rep(8, "neutral")
                .chain([Some("calm"), Some("I cannot determine the emotion.")])
                .collect(),
        ),
        (
            "sadness",
            rep(6, "sad")
                .chain(rep(2, "crying"))
                .chain([Some("neutral"), None])
                .collect(),
        ),
        (
            "surprise",
            rep(7, "surprised")
                .chain([Some("Slightly Surprised")])
                .chain(rep(2, "fearful"))
                .collect(),
        ),
    ]
}

fn write_fixture(dir: &Path) -> std::io::Result<()> {
    let images = dir.join("images");
    std::fs::create_dir_all(&images)?;
    let mut manifest = String::new();
    let mut script = String::new();
    for (gt, answers) in fixture_plan() {
        for (i, answer) in answers.iter().enumerate() {
            let id = format!("{gt}_{i:02}");
            std::fs::write(
                images.join(format!("{id}.png")),
                format!("image bytes for {id}"),
            )?;
            manifest +=
                &serde_json::json!({"id": id, "image": format!("images/{id}.png"), "label": gt})
                    .to_string();
            manifest.push('\n');
            let line = match answer {
                Some(text) => serde_json::json!({"sample_id": id, "answer_text": text}),
                None => serde_json::json!({"sample_id": id, "error": "connection reset"}),
            };
            script += &line.to_string();
            script.push('\n');
        }
    }
    std::fs::write(dir.join("manifest.jsonl"), manifest)?;
    std::fs::write(dir.join("mock.jsonl"), script)
}

// 5. End-to-end mock run against the hand-tallied oracle.
async fn end_to_end() -> Outcome {
    use BasicExpression::*;
    use PredictedClass::{Expression as E, Unknown as U};
    let start = Instant::now();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_fixture(tmp.path()).map_err(|e| e.to_string())?;
    let mut cfg = RunConfig {
        prompts: vec!["emoq1".into()],
        cache_dir: tmp.path().join("cache"),
        out_dir: tmp.path().join("run1"),
        backend: BackendConfig {
            kind: BackendKind::Mock,
            model: "mock-vlm".into(),
            fixture: Some(tmp.path().join("mock.jsonl")),
            retries: 1,
            backoff_ms: 1,
            ..Default::default()
        },
        datasets: vec![DatasetConfig::from_flag(&format!(
            "rafdb={}",
            tmp.path().join("manifest.jsonl").display()
        ))
        .map_err(|e| e.to_string())?],
        ..Default::default()
    };
    let first = cmd_run(&cfg).await.map_err(|e| e.to_string())?;
    check(first.exit_code() == 0, "first run exit code")?;
    let rec = &first.records[0];
    check(
        rec.answers.len() == 68 && rec.failures.len() == 2,
        format!(
            "{} answers, {} failures",
            rec.answers.len(),
            rec.failures.len()
        ),
    )?;

    // Hand-tallied confusion rows (alphabetical GT order).
    let expected: [(&str, &[(PredictedClass, u64)]); 7] = [
        ("anger", &[(E(Anger), 8), (E(Sadness), 1), (U, 1)]),
        ("disgust", &[(E(Disgust), 6), (E(Anger), 3)]),
        ("fear", &[(E(Fear), 5), (E(Surprise), 3), (E(Neutral), 2)]),
        ("happiness", &[(E(Happiness), 9), (U, 1)]),
        ("neutral", &[(E(Neutral), 9), (U, 1)]),
        ("sadness", &[(E(Sadness), 8), (E(Neutral), 1)]),
        ("surprise", &[(E(Surprise), 8), (E(Fear), 2)]),
    ];
    let cell_dir = std::fs::read_dir(cfg.out_dir.join("cells"))
        .map_err(|e| e.to_string())?
        .next()
        .ok_or("no cell directory")?
        .map_err(|e| e.to_string())?
        .path();
    let csv = std::fs::read_to_string(cell_dir.join("confusion.csv")).map_err(|e| e.to_string())?;
    let header: Vec<&str> = canonical_class_order().iter().map(|p| p.name()).collect();
    let mut want_csv = format!("gt,{}\n", header.join(","));
    for (gt, cells) in &expected {
        let mut row = [0u64; 8];
        for (p, n) in cells.iter() {
            row[p.index()] = *n;
        }
        want_csv += &format!("{gt},{}\n", row.map(|n| n.to_string()).join(","));
    }
    check(
        csv == want_csv,
        format!("confusion matrix differs:\n{csv}\nexpected:\n{want_csv}"),
    )?;

    let m = first.cells[0].metrics.as_ref().ok_or("no metrics")?;
    let recalls: [f64; 7] = [
        8.0 / 10.0,
        6.0 / 9.0,
        5.0 / 10.0,
        9.0 / 10.0,
        9.0 / 10.0,
        8.0 / 9.0,
        8.0 / 10.0,
    ];
    for ((g, r), want) in m.per_class_recall.iter().zip(recalls) {
        check(*r == want, format!("recall {g}: {r} vs {want}"))?;
    }
    check(m.war == 53.0 / 68.0, format!("WAR {} vs 53/68", m.war))?;
    check(
        m.uar == recalls.iter().sum::<f64>() / 7.0,
        format!("UAR {} vs 491/630", m.uar),
    )?;
    check((m.uar - 491.0 / 630.0).abs() < 1e-15, "UAR not 491/630")?;

    // Rerun into a second directory: answers come from the cache, only
    // the two failed samples go back to the backend.
    let report1 = std::fs::read(cfg.out_dir.join("report.md")).map_err(|e| e.to_string())?;
    let csv1 = std::fs::read(cfg.out_dir.join("report.csv")).map_err(|e| e.to_string())?;
    cfg.out_dir = tmp.path().join("run2");
    let second = cmd_run(&cfg).await.map_err(|e| e.to_string())?;
    let rec2 = &second.records[0];
    check(
        rec2.cache_hits() == 68 && rec2.answers.len() == 68,
        format!("rerun cache hits {}", rec2.cache_hits()),
    )?;
    check(rec2.failures.len() == 2, "rerun failures")?;
    let report2 = std::fs::read(cfg.out_dir.join("report.md")).map_err(|e| e.to_string())?;
    let csv2 = std::fs::read(cfg.out_dir.join("report.csv")).map_err(|e| e.to_string())?;
    check(report1 == report2 && csv1 == csv2, "rerun reports differ")?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "WAR 53/68 = {:.4}, UAR 491/630 = {:.4}; rerun 68/68 cached",
        m.war, m.uar
    ))
}

// 6. Frozen prompt strings.
fn frozen_prompts() -> Outcome {
    let expected = [
        (PromptId::Emoq0, "In a single word, is the person angry, disgusted, happy, sad, fearful, surprised or neutral?"),
        (PromptId::Emoq1, "In a single word, what is the facial expression of the person?"),
        (PromptId::Emoq2, "In a single word, what facial expression is the person displaying?"),
        (PromptId::Emoq3, "In a single word, what basic facial expression is the person displaying?"),
    ];
    for (id, text) in expected {
        let spec = render_prompt(&id).map_err(|e| e.to_string())?;
        check(
            spec.text.as_bytes() == text.as_bytes(),
            format!("{id}: {:?}", spec.text),
        )?;
    }
    Ok("emoq0..emoq3 byte-equal".into())
}

// 7. In-flight bound.
async fn concurrency_bound() -> Outcome {
    let spec = DatasetSpec::new("rafdb", "mem", Layout::JsonlManifest);
    let samples: Vec<Sample> = (0..1000)
        .map(|i| Sample {
            id: format!("s{i:04}"),
            image: ImageRef::Bytes(Arc::from(format!("bytes {i}").into_bytes())),
            gt: GroundTruthLabel::new("happiness"),
        })
        .collect();
    let dataset = Dataset::from_samples(spec, samples).map_err(|e| e.to_string())?;
    let prompt = render_prompt(&PromptId::Emoq1).map_err(|e| e.to_string())?;
    let mut seen = Vec::new();
    for p in [1usize, 4, 16] {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let cache = ResponseCache::open(tmp.path()).map_err(|e| e.to_string())?;
        let mock = MockBackend::new().with_default_answer("happy");
        let cfg = BackendConfig {
            kind: BackendKind::Mock,
            model: "mock".into(),
            parallelism: p,
            ..Default::default()
        };
        let rec = run_inference(&mock, &cfg, &dataset, &prompt, &cache)
            .await
            .map_err(|e| e.to_string())?;
        check(
            rec.answers.len() == 1000 && mock.calls() == 1000,
            "not every sample was queried",
        )?;
        let peak = mock.max_in_flight();
        check(peak <= p, format!("parallelism {p}: peak {peak}"))?;
        check(
            p == 1 || peak == p,
            format!("parallelism {p}: pool never filled (peak {peak})"),
        )?;
        seen.push(format!("p={p} peak={peak}"));
    }
    Ok(seen.join(", "))
}

// 8. Vote aggregation versus brute force; scaling invariance; drop rule.
fn vote_aggregation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    let vocab: Vec<String> = [
        "anger",
        "contempt",
        "disgust",
        "fear",
        "happiness",
        "neutral",
        "sadness",
        "surprise",
    ]
    .map(String::from)
    .to_vec();
    let mut tie_break = vocab.clone();
    tie_break.extend(DROP_LABELS.map(String::from));
    let labels = tie_break.clone();
    let mut dropped = 0;
    for case in 0..10_000 {
        let mut counts = BTreeMap::new();
        for l in &labels {
            // Small counts so ties are frequent.
            let c = if rng.random_bool(0.5) {
                rng.random_range(0..4)
            } else {
                0
            };
            counts.insert(l.clone(), c);
        }
        if counts.values().all(|c| *c == 0) {
            counts.insert(labels[rng.random_range(0..labels.len())].clone(), 1);
        }
        // Brute force: highest count, first in tie-break order.
        let max = *counts.values().max().unwrap();
        let winner = tie_break
            .iter()
            .find(|l| counts[*l] == max)
            .unwrap()
            .clone();
        let expected = if DROP_LABELS.contains(&winner.as_str()) {
            dropped += 1;
            MajorityOutcome::Dropped(winner.clone())
        } else {
            MajorityOutcome::Label(GroundTruthLabel::new(&winner))
        };
        let record = VoteRecord {
            sample_id: format!("v{case}"),
            counts: counts.clone(),
        };
        let got = majority_label(&record, &tie_break).map_err(|e| e.to_string())?;
        check(
            got == expected,
            format!("case {case}: {counts:?} gave {got:?}, expected {expected:?}"),
        )?;
        let k = rng.random_range(2..=10u32);
        let scaled = VoteRecord {
            sample_id: record.sample_id.clone(),
            counts: counts.iter().map(|(l, c)| (l.clone(), c * k)).collect(),
        };
        let got_scaled = majority_label(&scaled, &tie_break).map_err(|e| e.to_string())?;
        check(
            got_scaled == got,
            format!("case {case}: scaling by {k} changed the outcome"),
        )?;
    }
    check(dropped > 0, "random suite never exercised the drop rule")?;
    Ok(format!("10000 vote vectors ({dropped} dropped)"))
}

fn main() {
    let rt = tokio::runtime::Runtime::new().expect("runtime");
    let results: Vec<(&str, Outcome)> = vec![
        ("1 published mean column", published_means()),
        ("2 metrics oracle equivalence", metrics_oracle()),
        ("3 lexicon fidelity", lexicon_fidelity()),
        ("4 refusal handling", refusals()),
        ("5 end-to-end mock run", rt.block_on(end_to_end())),
        ("6 prompt freezing", frozen_prompts()),
        ("7 concurrency bound", rt.block_on(concurrency_bound())),
        ("8 vote aggregation", vote_aggregation()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
