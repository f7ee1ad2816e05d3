//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topicfuse::classifier::io::{from_bytes, to_bytes};
use topicfuse::classifier::{EncodedDoc, LinearDualModel, SparseFeatureVector, TrainConfig};
use topicfuse::cli::{evaluate_documents, predict_documents, predictions_to_jsonl, train_with_chatter};
use topicfuse::constraints::{
    brute_force_marginals, build_factor_graph, calibrate, exclusion_potential,
    inclusion_potential, run_belief_propagation, BpConfig, ConstraintSet,
};
use topicfuse::eval::{average_precision, label_prior_baseline, violation_count};
use topicfuse::synth::{generate, SynthConfig, SyntheticData};
use topicfuse::{
    load_model, partition_chatter, save_model, split_user_disjoint, Corpus, Document,
    FeatureToggles, LabelSource, MultiHot, TopicSpace,
};

fn report(criterion: u32, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("[{status}] criterion {criterion}: {detail}");
    assert!(ok, "criterion {criterion} failed: {detail}");
}

/// Random tree over `n` variables: node `i > 0` attaches to a random
/// earlier node with a random constraint kind and direction.
fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> ConstraintSet {
    let mut set = ConstraintSet::new(n);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        match rng.gen_range(0..3) {
            0 => set.add_inclusion(j, i).unwrap(),
            1 => set.add_inclusion(i, j).unwrap(),
            _ => set.add_exclusion(i, j).unwrap(),
        }
    }
    set
}

/// Random (possibly loopy) constraint set without conflicting pairs.
fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> ConstraintSet {
    let mut set = ConstraintSet::new(n);
    let edges = rng.gen_range(1..=n * 2);
    for _ in 0..edges {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        // Duplicate or self pairs are rejected; skip them.
        let _ = if rng.gen_bool(0.5) {
            set.add_inclusion(a, b)
        } else {
            set.add_exclusion(a, b)
        };
    }
    set
}

#[test]
fn criterion_1_bp_matches_enumeration_on_trees() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let config = BpConfig::default();
    let mut worst = 0.0f64;
    let mut unconverged = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=12);
        let set = random_tree(&mut rng, n);
        let probs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let exact = brute_force_marginals(&probs, &set, config.clamp).unwrap();
        let mut graph = build_factor_graph(&probs, &set, &config).unwrap();
        let bp = run_belief_propagation(&mut graph, &config).unwrap();
        unconverged += usize::from(!bp.converged);
        for (&t, &m) in graph.topics().iter().zip(&bp.marginals) {
            worst = worst.max((m - exact[t]).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        worst <= 1e-9 && secs < 10.0 && unconverged == 0,
        &format!("200 trees, max |BP - exact| = {worst:.3e}, {unconverged} unconverged, {secs:.2}s"),
    );
}

#[test]
fn criterion_2_potential_matrices_are_exact() {
    let bits64 = |m: [[f64; 2]; 2]| m.map(|r| r.map(f64::to_bits));
    let bits32 = |m: [[f32; 2]; 2]| m.map(|r| r.map(f32::to_bits));
    let ok = bits64(inclusion_potential::<f64>().0) == bits64([[0.5, 0.0], [0.5, 10.0]])
        && bits64(exclusion_potential::<f64>().0) == bits64([[0.5, 0.5], [0.5, 0.0]])
        && bits32(inclusion_potential::<f32>().0) == bits32([[0.5, 0.0], [0.5, 10.0]])
        && bits32(exclusion_potential::<f32>().0) == bits32([[0.5, 0.5], [0.5, 0.0]]);
    report(2, ok, "inclusion [[0.5,0],[0.5,10]], exclusion [[0.5,0.5],[0.5,0]], bit-exact in f64 and f32");
}

#[test]
fn criterion_3_worked_calibration_oracles() {
    let config = BpConfig::default();
    let mut worst = 0.0f64;
    let mut check = |probs: &[f64], set: &ConstraintSet, expected: &[f64]| {
        let exact = calibrate(probs, set, &config).unwrap().probs;
        let mut graph = build_factor_graph(probs, set, &config).unwrap();
        let bp = run_belief_propagation(&mut graph, &config).unwrap().marginals;
        for i in 0..expected.len() {
            worst = worst.max((exact[i] - expected[i]).abs());
            if set.len() < 3 {
                // Tree cases: belief propagation is exact as well.
                worst = worst.max((bp[i] - expected[i]).abs());
            }
        }
    };

    let mut inclusion = ConstraintSet::new(2);
    inclusion.add_inclusion(0, 1).unwrap();
    check(&[0.3, 0.9], &inclusion, &[0.987273, 0.981818]);

    let mut exclusion = ConstraintSet::new(2);
    exclusion.add_exclusion(0, 1).unwrap();
    check(&[0.8, 0.8], &exclusion, &[0.444444, 0.444444]);

    let mut triangle = ConstraintSet::new(3);
    triangle.add_inclusion(0, 1).unwrap();
    triangle.add_inclusion(0, 2).unwrap();
    triangle.add_exclusion(1, 2).unwrap();
    check(&[0.5, 0.8, 0.7], &triangle, &[0.992228, 0.621762, 0.362694]);

    report(3, worst <= 1e-6, &format!("three worked examples, max deviation {worst:.3e}"));
}

#[test]
fn criterion_4_exact_calibration_is_consistent() {
    // Exact arithmetic gives Pr(parent) >= Pr(child) and Pr(a) + Pr(b) <= 1;
    // the slack only absorbs summation rounding.
    const SLACK: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let config = BpConfig::default();
    let mut probability_violations = 0;
    let mut thresholded = 0;
    for _ in 0..500 {
        let n = rng.gen_range(2..=10);
        let set = random_graph(&mut rng, n);
        let probs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let out = calibrate(&probs, &set, &config).unwrap();
        assert_eq!(out.bp_components, 0);
        let p = &out.probs;
        for (broad, narrow) in set.inclusions() {
            probability_violations += usize::from(p[narrow] > p[broad] + SLACK);
        }
        for (a, b) in set.exclusions() {
            probability_violations += usize::from(p[a] + p[b] > 1.0 + SLACK);
        }
        for tau in [0.3, 0.5, 0.9] {
            let v = violation_count(std::slice::from_ref(p), &set, tau);
            thresholded += v.inclusion;
            if tau >= 0.5 {
                thresholded += v.exclusion;
            }
        }
    }
    report(
        4,
        probability_violations == 0 && thresholded == 0,
        &format!(
            "500 calibrations: {probability_violations} probability-level violations, \
             {thresholded} thresholded violations at 0.3/0.5/0.9"
        ),
    );
}

fn sparse(rng: &mut ChaCha8Rng, dim: usize) -> SparseFeatureVector<f64> {
    let mut indices: Vec<u32> = (0..dim as u32).filter(|_| rng.gen_bool(0.2)).collect();
    if indices.is_empty() {
        indices.push(rng.gen_range(0..dim as u32));
    }
    let values = indices.iter().map(|_| rng.gen_range(0.5..1.5)).collect();
    SparseFeatureVector::new(indices, values, dim).unwrap()
}

fn loss(model: &LinearDualModel<f64>, x: &EncodedDoc<f64>, y: &MultiHot, w: &[f64]) -> f64 {
    topicfuse::classifier::weighted_bce_loss(&model.probabilities_encoded(x), y, w).unwrap()
}

fn bias_mut(model: &mut LinearDualModel<f64>, author: bool) -> &mut [f64] {
    if author {
        model.author_mut().bias_mut()
    } else {
        model.content_mut().bias_mut()
    }
}

#[test]
fn criterion_5_gradients_match_finite_differences() {
    const H: f64 = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..50 {
        let topics = rng.gen_range(1..=4);
        let dim = rng.gen_range(4..=64);
        let names: Vec<String> = (0..topics).map(|t| format!("t{t}")).collect();
        let space = TopicSpace::new(names).unwrap();
        let mut model = LinearDualModel::<f64>::zeros(space, dim, FeatureToggles::all());
        for author_head in [false, true] {
            for t in 0..topics {
                bias_mut(&mut model, author_head)[t] = rng.gen_range(-1.0..1.0);
                for f in 0..dim as u32 {
                    let head = if author_head { model.author_mut() } else { model.content_mut() };
                    head.set_weight(t, f, rng.gen_range(-0.5..0.5));
                }
            }
        }
        let x = EncodedDoc {
            content: sparse(&mut rng, dim),
            author: sparse(&mut rng, dim),
        };
        let y = MultiHot::from_bits((0..topics).map(|_| rng.gen_bool(0.5)).collect());
        let w: Vec<f64> = (0..topics).map(|_| rng.gen_range(1.0..5.0)).collect();
        let grad = model.gradient(&x, &y, &w).unwrap();

        let mut compare = |analytic: f64, numeric: f64| {
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-12);
            worst = worst.max(rel);
            checked += 1;
        };
        for t in 0..topics {
            for &f in x.content.indices() {
                let base = model.content().weight(t, f);
                model.content_mut().set_weight(t, f, base + H);
                let up = loss(&model, &x, &y, &w);
                model.content_mut().set_weight(t, f, base - H);
                let down = loss(&model, &x, &y, &w);
                model.content_mut().set_weight(t, f, base);
                compare(grad.content_weight(t, f), (up - down) / (2.0 * H));
            }
            for &f in x.author.indices() {
                let base = model.author().weight(t, f);
                model.author_mut().set_weight(t, f, base + H);
                let up = loss(&model, &x, &y, &w);
                model.author_mut().set_weight(t, f, base - H);
                let down = loss(&model, &x, &y, &w);
                model.author_mut().set_weight(t, f, base);
                compare(grad.author_weight(t, f), (up - down) / (2.0 * H));
            }
            for author_head in [false, true] {
                let base = bias_mut(&mut model, author_head)[t];
                bias_mut(&mut model, author_head)[t] = base + H;
                let up = loss(&model, &x, &y, &w);
                bias_mut(&mut model, author_head)[t] = base - H;
                let down = loss(&model, &x, &y, &w);
                bias_mut(&mut model, author_head)[t] = base;
                compare(grad.bias()[t], (up - down) / (2.0 * H));
            }
        }
    }
    report(
        5,
        worst <= 1e-4,
        &format!("50 models, {checked} partial derivatives, max relative error {worst:.3e}"),
    );
}

/// Precision at the rank of each positive, ranks assigned by descending
/// score with earlier indices first among equal scores.
fn reference_ap(scores: &[f64], labels: &[bool]) -> f64 {
    let n = scores.len();
    let rank = |i: usize| {
        1 + (0..n)
            .filter(|&j| scores[j] > scores[i] || (scores[j] == scores[i] && j < i))
            .count()
    };
    let positives: Vec<usize> = (0..n).filter(|&i| labels[i]).collect();
    positives
        .iter()
        .map(|&i| {
            let r = rank(i);
            let hits = positives.iter().filter(|&&j| rank(j) <= r).count();
            hits as f64 / r as f64
        })
        .sum::<f64>()
        / positives.len() as f64
}

#[test]
fn criterion_6_average_precision_oracle() {
    let mut cases = 0usize;
    let mut worst = 0.0f64;
    for n in 1..=6usize {
        // Scores drawn from three levels cover every tie pattern.
        for code in 0..3usize.pow(n as u32) {
            let scores: Vec<f64> = (0..n).map(|i| ((code / 3usize.pow(i as u32)) % 3) as f64).collect();
            for mask in 1..(1u32 << n) {
                let labels: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                let ap = average_precision(&scores, &labels).unwrap();
                worst = worst.max((ap - reference_ap(&scores, &labels)).abs());
                cases += 1;
            }
        }
    }
    let worked: f64 = average_precision(&[0.9, 0.8, 0.7, 0.6], &[true, false, true, false]).unwrap();
    let ok = worst <= 1e-12 && (worked - 0.833333).abs() <= 1e-6 && (worked - 5.0 / 6.0).abs() <= 1e-9;
    report(
        6,
        ok,
        &format!("{cases} arrangements, max deviation {worst:.3e}; worked example {worked:.9}"),
    );
}

struct Pipeline {
    data: SyntheticData,
    weak: Corpus,
    chatter: Corpus,
    test: Corpus,
    train_targets: Vec<MultiHot>,
}

fn pipeline(config: &SynthConfig) -> Pipeline {
    let data = generate(config).unwrap();
    let rules = data.rule_set().unwrap();
    let split = split_user_disjoint(&data.corpus, [0.8, 0.1, 0.1], config.seed).unwrap();
    let (weak, chatter) = partition_chatter(&split.train, &rules);
    let train_targets = weak
        .iter()
        .map(|d| data.space.encode(d.weak_labels.as_ref().unwrap()).unwrap())
        .collect();
    Pipeline {
        data,
        weak,
        chatter,
        test: split.test,
        train_targets,
    }
}

fn median_for(p: &Pipeline, toggles: FeatureToggles, with_chatter: bool) -> (f64, usize) {
    let config = TrainConfig {
        toggles,
        ..TrainConfig::default()
    };
    let chatter = with_chatter.then_some(&p.chatter);
    let (model, _) =
        train_with_chatter(&p.weak, LabelSource::Weak, chatter, &p.data.space, &config, None).unwrap();
    let preds = predict_documents(&model, &p.test.documents, None, &BpConfig::default(), None).unwrap();
    let docs: Vec<&Document> = p.test.iter().collect();
    let scores: Vec<&[f64]> = preds.iter().map(|r| r.combined.as_slice()).collect();
    let report = evaluate_documents(&p.data.space, &docs, &scores, &[], None, 0.9).unwrap();
    (report.median_aps.unwrap(), report.chatter_count)
}

#[test]
fn criterion_7_end_to_end_directional() {
    let start = Instant::now();
    let p = pipeline(&SynthConfig {
        documents: 2000,
        seed: 7,
        ..SynthConfig::default()
    });
    assert_eq!(p.data.space.len(), 10);

    let (full, chatter_with) = median_for(&p, FeatureToggles::all(), true);
    let (_, chatter_without) = median_for(&p, FeatureToggles::all(), false);
    let (text_only, _) = median_for(&p, FeatureToggles::text_only(), true);
    let with_author = FeatureToggles {
        author: true,
        ..FeatureToggles::text_only()
    };
    let (text_author, _) = median_for(&p, with_author, true);

    let docs: Vec<&Document> = p.test.iter().collect();
    let baseline = label_prior_baseline::<f64>(&p.train_targets, docs.len(), 7);
    let scores: Vec<&[f64]> = baseline.iter().map(Vec::as_slice).collect();
    let prior = evaluate_documents(&p.data.space, &docs, &scores, &[], None, 0.9)
        .unwrap()
        .median_aps
        .unwrap();

    let secs = start.elapsed().as_secs_f64();
    let a = full - prior >= 0.2;
    let b = text_author > text_only;
    let c = chatter_with < chatter_without;
    report(
        7,
        a && b && c && secs < 120.0,
        &format!(
            "(a) median APS {full:.4} vs label-prior {prior:.4}; \
             (b) text {text_only:.4} -> +author {text_author:.4}; \
             (c) chatter above 0.9: {chatter_without} -> {chatter_with} with chatter training; {secs:.1}s"
        ),
    );
}

fn deterministic_run() -> (Vec<u8>, String, String) {
    let p = pipeline(&SynthConfig {
        documents: 600,
        authors: 40,
        seed: 8,
        ..SynthConfig::default()
    });
    let config = TrainConfig {
        seed: 3,
        ..TrainConfig::default()
    };
    let (model, _) =
        train_with_chatter(&p.weak, LabelSource::Weak, Some(&p.chatter), &p.data.space, &config, None)
            .unwrap();
    let constraints = p.data.constraint_set().unwrap();
    let preds =
        predict_documents(&model, &p.test.documents, Some(&constraints), &BpConfig::default(), Some(2))
            .unwrap();
    let docs: Vec<&Document> = p.test.iter().collect();
    let scores: Vec<&[f64]> = preds.iter().map(|r| r.calibrated.as_slice()).collect();
    let report =
        evaluate_documents(&p.data.space, &docs, &scores, &[], Some(&constraints), 0.9).unwrap();
    (to_bytes(&model), predictions_to_jsonl(&preds), report.to_json())
}

#[test]
fn criterion_8_runs_are_byte_identical() {
    let (m1, p1, r1) = deterministic_run();
    let (m2, p2, r2) = deterministic_run();
    report(
        8,
        m1 == m2 && p1 == p2 && r1 == r2,
        &format!(
            "model {} bytes, predictions {} bytes, report {} bytes identical across runs",
            m1.len(),
            p1.len(),
            r1.len()
        ),
    );
}

#[test]
fn criterion_9_model_round_trip() {
    let p = pipeline(&SynthConfig {
        documents: 600,
        authors: 40,
        seed: 9,
        ..SynthConfig::default()
    });
    let docs: Vec<&Document> = p.data.corpus.iter().take(100).collect();
    let dir = tempfile::tempdir().unwrap();

    let config = TrainConfig {
        epochs: 2,
        ..TrainConfig::default()
    };
    let (model, _) =
        train_with_chatter(&p.weak, LabelSource::Weak, Some(&p.chatter), &p.data.space, &config, None)
            .unwrap();
    let path = dir.path().join("model.bin");
    save_model(&model, &path).unwrap();
    let loaded = load_model::<f64>(&path).unwrap();
    let same64 = docs.iter().all(|d| {
        let a = model.predict_probabilities(d);
        let b = loaded.predict_probabilities(d);
        a.iter().map(|v| v.to_bits()).eq(b.iter().map(|v| v.to_bits()))
    });

    let (model32, _) = topicfuse::classifier::train::<f32>(
        &p.weak,
        LabelSource::Weak,
        &p.data.space,
        &config,
        None,
    )
    .unwrap();
    let loaded32: LinearDualModel<f32> = from_bytes(&to_bytes(&model32)).unwrap();
    let same32 = docs.iter().all(|d| {
        let a = model32.predict_probabilities(d);
        let b = loaded32.predict_probabilities(d);
        a.iter().map(|v| v.to_bits()).eq(b.iter().map(|v| v.to_bits()))
    });

    report(
        9,
        docs.len() == 100 && same64 && same32 && loaded == model,
        "save -> load gives bit-identical predictions on 100 documents (f64 file, f32 bytes)",
    );
}
