//! End-to-end acceptance checks, one test per headline behavior, each with
//! an explicit wall-clock budget. Every test prints a `pass` line with its
//! number so a full run reads as a checklist.

use std::collections::BTreeMap;
use std::fs;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fidel_core::ethiopic::{char_class, normalize_homophones, CharClass, HomophoneTable};
use fidel_core::fst::{FeatureStructure, Fst, Transduction, Value};
use fidel_core::morph::template::{expand_template, orthographic_surface, TemplateError};
use fidel_core::morph::{Analyzer, PosTag};
use fidel_core::pipeline::{run_pipeline, PipelineConfig};
use fidel_core::sera::{from_sera, to_sera, SeraTable};
use fidel_core::stats::{count_ngrams, NgramTable};

fn finish(name: &str, budget_ms: u64, start: Instant) {
    let elapsed = start.elapsed();
    let budget = Duration::from_millis(budget_ms);
    println!("acceptance {name}: pass in {elapsed:?} (budget {budget:?})");
    assert!(elapsed <= budget, "{name}: exceeded time budget: {elapsed:?} > {budget:?}");
}

/// 1. The full pipeline on the worked example sentence reproduces the golden
/// annotated XML byte for byte.
#[test]
fn full_pipeline_reproduces_the_golden_annotated_sentence() {
    let start = Instant::now();
    let table = SeraTable::embedded();
    let text = from_sera("bezihu yedereja zrzr 'andm 'ityoPyawi 'altekatetem ::", table).unwrap();
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("doc.txt"), &text).unwrap();
    let mut config = PipelineConfig::default();
    config.inputs = vec![dir.path().join("doc.txt").to_string_lossy().into_owned()];
    config.output_dir = dir.path().join("out");
    let summary = run_pipeline(config).unwrap();
    assert_eq!(summary.documents, 1);
    assert_eq!(summary.sentences, 1);
    assert_eq!(summary.tokens, 6);
    assert_eq!(summary.unc_count, 0);
    assert!(summary.errors.is_empty());
    let xml = fs::read_to_string(dir.path().join("out/doc.xml")).unwrap();
    assert_eq!(xml, include_str!("data/golden-sentence.xml"), "golden XML must match exactly");
    finish("1 golden annotated sentence", 1000, start);
}

/// 2. Subject agreement: prefix and suffix features intersect to a unique
/// reading, and an inconsistent suffix kills the parse.
#[test]
fn subject_agreement_constrains_verb_readings() {
    let start = Instant::now();
    let analyzer = Analyzer::embedded();
    let analyses = analyzer.analyze("tfelligiyalleS");
    let verbs: Vec<_> = analyses.iter().filter(|a| a.pos == PosTag::V).collect();
    assert_eq!(verbs.len(), 1, "expected exactly one verb reading, got {analyses:#?}");
    let expected = FeatureStructure::parse("[sb:[p:2,n:sg,g:f]]").unwrap();
    assert_eq!(
        verbs[0].features.get("sb"),
        expected.get("sb"),
        "agreement must resolve to second person singular feminine: {:?}",
        verbs[0].features
    );
    // Swap the second-person suffix complex for a first-person ending: the
    // prefix t- (second/third person) contradicts it, so no verb survives.
    let mutated = analyzer.analyze("tfelligallehu");
    assert!(
        mutated.iter().all(|a| a.pos != PosTag::V),
        "inconsistent agreement must yield zero verb readings, got {mutated:#?}"
    );
    finish("2 subject agreement", 1000, start);
}

/// 3. Homophone normalization: all 35 deprecated cells map exactly, and the
/// mapping is idempotent and length-preserving on random Ethiopic text.
#[test]
fn homophone_normalization_is_exact_idempotent_and_length_preserving() {
    let start = Instant::now();
    let table = HomophoneTable::embedded();
    let families = [('ሐ', 'ሀ'), ('ኀ', 'ሀ'), ('ሠ', 'ሰ'), ('ዐ', 'አ'), ('ፀ', 'ጸ')];
    let mut checked = 0;
    for (deprecated, canonical) in families {
        for order in 0..7u32 {
            let d = char::from_u32(deprecated as u32 + order).unwrap();
            let c = char::from_u32(canonical as u32 + order).unwrap();
            assert_eq!(
                normalize_homophones(&d.to_string(), table),
                c.to_string(),
                "{d} must normalize to {c}"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 35);
    let mut rng = ChaCha8Rng::seed_from_u64(0x4f5244);
    for _ in 0..10_000 {
        let len = rng.gen_range(0..30);
        let s: String =
            (0..len).map(|_| char::from_u32(rng.gen_range(0x1200..=0x137C)).unwrap()).collect();
        let once = normalize_homophones(&s, table);
        assert_eq!(once.chars().count(), s.chars().count(), "length preserved: {s:?}");
        assert_eq!(normalize_homophones(&once, table), once, "idempotent: {s:?}");
    }
    finish("3 homophone suite", 5000, start);
}

/// 4. Romanization round-trips every syllable cell the table ships, and the
/// worked-example words romanize exactly.
#[test]
fn romanization_round_trips_every_syllable_cell() {
    let start = Instant::now();
    let table = SeraTable::embedded();
    let mut cells = 0;
    for cp in 0x1200u32..=0x137Fu32 {
        let c = char::from_u32(cp).unwrap();
        if char_class(c) != CharClass::Syllable {
            continue;
        }
        let s = c.to_string();
        // Cells outside the normalized inventory (deprecated homophone rows,
        // relic syllables) are not in the table and correctly fail to map.
        if let Ok(latin) = to_sera(&s, table) {
            assert_eq!(from_sera(&latin, table).unwrap(), s, "{c} -> {latin} must round-trip");
            cells += 1;
        }
    }
    assert!(cells >= 224, "expected the full normalized syllabary, saw only {cells} cells");
    assert_eq!(to_sera("በዚሁ", table).unwrap(), "bezihu");
    assert_eq!(to_sera("ዝርዝር", table).unwrap(), "zrzr");
    finish("4 romanization round trip", 1000, start);
}

const SYMBOLS: [&str; 3] = ["a", "b", "c"];

fn random_weight(rng: &mut ChaCha8Rng) -> FeatureStructure {
    const POOL: [&str; 8] =
        ["[]", "[x:1]", "[x:2]", "[x:{1,2}]", "[y:a]", "[y:b]", "[x:1,y:a]", "[z:[w:1]]"];
    FeatureStructure::parse(POOL[rng.gen_range(0..POOL.len())]).unwrap()
}

/// A random machine with ≤6 states over a 3-symbol alphabet. Epsilon-input
/// arcs always move strictly forward in state order, so epsilon chains are
/// bounded by the state count and the traversal budget is never the
/// deciding factor.
fn random_machine(rng: &mut ChaCha8Rng) -> Fst {
    let n_states = rng.gen_range(1..=6);
    let mut fst = Fst::new();
    for _ in 0..n_states {
        fst.add_state();
    }
    fst.set_start(rng.gen_range(0..n_states));
    for _ in 0..rng.gen_range(1..=n_states) {
        fst.set_final(rng.gen_range(0..n_states), random_weight(rng));
    }
    for _ in 0..rng.gen_range(0..=10) {
        let eps_input = n_states > 1 && rng.gen_bool(0.25);
        let (from, to) = if eps_input {
            let from = rng.gen_range(0..n_states - 1);
            (from, rng.gen_range(from + 1..n_states))
        } else {
            (rng.gen_range(0..n_states), rng.gen_range(0..n_states))
        };
        let input = if eps_input { None } else { Some(SYMBOLS[rng.gen_range(0..3)]) };
        let output = if rng.gen_bool(0.25) { None } else { Some(SYMBOLS[rng.gen_range(0..3)]) };
        fst.add_arc(from, to, input, output, random_weight(rng));
    }
    fst
}

/// Every input over [`SYMBOLS`] of length ≤ `max_len`.
fn all_inputs(max_len: usize) -> Vec<Vec<&'static str>> {
    let mut inputs: Vec<Vec<&'static str>> = vec![vec![]];
    let mut frontier = inputs.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for prefix in &frontier {
            for sym in SYMBOLS {
                let mut input = prefix.clone();
                input.push(sym);
                next.push(input);
            }
        }
        inputs.extend(next.iter().cloned());
        frontier = next;
    }
    inputs
}

/// Relational composition spelled out: feed every first-stage output through
/// the second machine, unifying the two path weights.
fn two_stage_compose(f: &Fst, g: &Fst, input: &[&str]) -> std::collections::BTreeSet<Transduction> {
    let mut out = std::collections::BTreeSet::new();
    for first in f.transduce(input).unwrap() {
        let mid: Vec<&str> = first.output.iter().map(String::as_str).collect();
        for second in g.transduce(&mid).unwrap() {
            if let Some(weight) = first.weight.unify(&second.weight) {
                out.insert(Transduction { output: second.output.clone(), weight });
            }
        }
    }
    out
}

/// 5. On random machines, transduction agrees with the exhaustive path
/// enumeration, and composition agrees with its two-stage definition.
#[test]
fn transduction_and_composition_agree_with_their_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x465354);
    let machines: Vec<Fst> = (0..500).map(|_| random_machine(&mut rng)).collect();
    let inputs = all_inputs(5);
    let compose_inputs = all_inputs(4);
    let mut accepted = 0u64;
    let mut composed_nonempty = 0u64;
    for (i, machine) in machines.iter().enumerate() {
        // Group the enumeration oracle's paths by consumed input.
        let mut by_input: BTreeMap<Vec<String>, std::collections::BTreeSet<Transduction>> =
            BTreeMap::new();
        for path in machine.enumerate_paths(5) {
            by_input
                .entry(path.input)
                .or_default()
                .insert(Transduction { output: path.output, weight: path.weight });
        }
        for input in &inputs {
            let got = machine.transduce(input).unwrap();
            let owned: Vec<String> = input.iter().map(|s| s.to_string()).collect();
            let expected = by_input.get(&owned).cloned().unwrap_or_default();
            assert_eq!(got, expected, "machine {i}, input {input:?}");
            accepted += got.len() as u64;
        }
        let partner = &machines[(i + 1) % machines.len()];
        let composed = machine.compose(partner);
        for input in &compose_inputs {
            let got = composed.transduce(input).unwrap();
            let expected = two_stage_compose(machine, partner, input);
            assert_eq!(got, expected, "composition of machines {i}, {}", (i + 1) % machines.len());
            composed_nonempty += got.len() as u64;
        }
    }
    assert!(accepted > 0, "the random machines accepted nothing; the check is vacuous");
    assert!(composed_nonempty > 0, "no composition accepted anything; the check is vacuous");
    finish("5 transducer oracle equivalence", 60_000, start);
}

fn random_value(rng: &mut ChaCha8Rng, depth: usize) -> Value {
    const ATOMS: [&str; 4] = ["1", "2", "a", "b"];
    if depth == 0 || rng.gen_bool(0.6) {
        if rng.gen_bool(0.7) {
            Value::atom(ATOMS[rng.gen_range(0..ATOMS.len())])
        } else {
            let n = rng.gen_range(1..=ATOMS.len());
            let mut picks: Vec<&str> = ATOMS.to_vec();
            for _ in 0..ATOMS.len() - n {
                picks.remove(rng.gen_range(0..picks.len()));
            }
            Value::set_of(picks)
        }
    } else {
        Value::Node(random_structure(rng, depth - 1))
    }
}

fn random_structure(rng: &mut ChaCha8Rng, depth: usize) -> FeatureStructure {
    let mut f = FeatureStructure::top();
    for attr in ["p", "q", "r"] {
        if rng.gen_bool(0.5) {
            f.set(attr, random_value(rng, depth));
        }
    }
    f
}

/// 6. Unification obeys its lattice laws on random structure pairs.
#[test]
fn unification_laws_hold_on_random_structures() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x554e49);
    let top = FeatureStructure::top();
    let mut failures = 0u64;
    for _ in 0..10_000 {
        let a = random_structure(&mut rng, 3);
        let b = random_structure(&mut rng, 3);
        let c = random_structure(&mut rng, 3);
        assert_eq!(a.unify(&a), Some(a.clone()), "idempotence: {a}");
        assert_eq!(a.unify(&b), b.unify(&a), "commutativity: {a} ⊓ {b}");
        let ab_c = a.unify(&b).and_then(|ab| ab.unify(&c));
        let a_bc = b.unify(&c).and_then(|bc| a.unify(&bc));
        assert_eq!(ab_c, a_bc, "associativity: {a}, {b}, {c}");
        assert_eq!(a.unify(&top), Some(a.clone()), "top identity: {a}");
        match a.unify(&b) {
            Some(u) => {
                assert!(a.subsumes(&u), "{a} must subsume {u}");
                assert!(b.subsumes(&u), "{b} must subsume {u}");
            }
            None => {
                failures += 1;
                // Failure absorbs: a third operand cannot rescue the pair.
                assert_eq!(ab_c, None, "failure absorption: {a}, {b}, {c}");
                assert_eq!(
                    c.unify(&a).and_then(|ca| ca.unify(&b)),
                    None,
                    "failure absorption: {c}, {a}, {b}"
                );
            }
        }
    }
    assert!(failures > 0, "no random pair failed to unify; the absorption law went untested");
    finish("6 unification laws", 10_000, start);
}

/// 7. Root-and-template expansion produces the lexical stem with its
/// gemination marker, the orthographic form drops the marker, and a template
/// digit past the root's radicals is an error.
#[test]
fn template_expansion_matches_the_worked_stem() {
    let start = Instant::now();
    let expanded = expand_template("ktt", "te1a2_e3").unwrap();
    assert_eq!(expanded, "tekat_et");
    assert_eq!(orthographic_surface(&expanded), "tekatet");
    assert_eq!(
        expand_template("ktt", "1e2e3e4"),
        Err(TemplateError::DigitOverflow { digit: 4, radicals: 3 })
    );
    finish("7 template expansion", 1000, start);
}

/// 8. N-gram counting matches a brute-force recount on the shipped corpus,
/// occurrence identities hold, smoothed conditionals are distributions, and
/// partitioned counting merges to the whole-corpus table.
#[test]
fn ngram_statistics_match_a_brute_force_oracle() {
    let start = Instant::now();
    let src = include_str!("data/synthetic-sentences.txt");
    let sentences: Vec<Vec<&str>> = src.lines().map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(sentences.len(), 100, "the shipped corpus is 100 sentences");
    let table = count_ngrams(&sentences);

    // Independent recount: nested loops over every window.
    let mut expected: Vec<BTreeMap<Vec<String>, u64>> = vec![BTreeMap::new(); 3];
    for sentence in &sentences {
        for n in 1..=3 {
            if sentence.len() < n {
                continue;
            }
            for window in sentence.windows(n) {
                let key: Vec<String> = window.iter().map(|t| t.to_string()).collect();
                *expected[n - 1].entry(key).or_insert(0) += 1;
            }
        }
    }
    for n in 1..=3 {
        let got: BTreeMap<Vec<String>, u64> =
            table.ngrams(n).map(|(key, count)| (key.to_vec(), count)).collect();
        assert_eq!(got, expected[n - 1], "order {n} counts");
    }
    let report = table.report();
    assert_eq!(report.sentences, 100);
    assert_eq!(report.tokens, sentences.iter().map(|s| s.len() as u64).sum::<u64>());
    assert_eq!(report.distinct, (0..3).map(|i| expected[i].len() as u64).collect::<Vec<_>>());

    // Occurrence identities: Σ n-gram occurrences = Σ max(len − n + 1, 0).
    for n in 1..=3usize {
        let total: u64 = table.ngrams(n).map(|(_, count)| count).sum();
        let windows: u64 = sentences.iter().map(|s| s.len().saturating_sub(n - 1) as u64).sum();
        assert_eq!(total, windows, "order {n} occurrence identity");
    }

    // Smoothed conditionals form a distribution over vocabulary + one
    // out-of-vocabulary event, for seen, partial, and unseen histories.
    let vocab: Vec<&str> = expected[0].keys().map(|k| k[0].as_str()).collect();
    let mut histories: Vec<Vec<&str>> = vec![vec![], vec!["no-such-token"]];
    histories.extend(vocab.iter().take(10).map(|w| vec![*w]));
    histories.extend(expected[1].keys().take(10).map(|k| vec![k[0].as_str(), k[1].as_str()]));
    for k in [0.5, 1.0] {
        for history in &histories {
            let mut mass: f64 =
                vocab.iter().map(|w| table.conditional_logprob(history, w, k).exp()).sum();
            mass += table.conditional_logprob(history, "\u{1}oov", k).exp();
            assert!((mass - 1.0).abs() < 1e-9, "history {history:?}, k {k}: mass {mass}");
        }
    }

    // Counting a partition and merging equals counting the whole corpus.
    let mut merged = NgramTable::new(3);
    for chunk in [&sentences[..13], &sentences[13..60], &sentences[60..]] {
        merged.merge(&count_ngrams(chunk));
    }
    assert_eq!(merged, table, "partitioned counting must merge to the whole");
    finish("8 statistics oracle", 10_000, start);
}

/// 9. A parallel run produces byte-identical output to a serial one.
#[test]
fn parallel_and_serial_runs_are_byte_identical() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let vocabulary = [
        "ቤት",
        "ቤቱ",
        "የቤት",
        "በቤት",
        "ሰው",
        "ሰላም",
        "ሠላም",
        "ሀገር",
        "ዝርዝር",
        "የደረጃ",
        "አንድም",
        "ዐንድም",
        "ኢትዮጵያዊ",
        "ኢትዮጵያ",
        "አልተካተተም",
        "ወደ",
        "እና",
        "ሁለት",
        "ትልቅ",
        "በጣም",
        "ኮምፒውተር",
        "ፕሮግራም",
        "«ቤት»",
        "፣",
        "ቤትሰው",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x504152);
    for doc in 0..20 {
        let mut text = String::new();
        for _ in 0..50 {
            for _ in 0..rng.gen_range(1..=8) {
                text.push_str(vocabulary[rng.gen_range(0..vocabulary.len())]);
                text.push(' ');
            }
            text.push_str(if rng.gen_bool(0.8) { "። " } else { "? " });
        }
        fs::write(dir.path().join(format!("doc{doc:02}.txt")), text).unwrap();
    }
    let run = |workers: usize, out: &str| {
        let mut config = PipelineConfig::default();
        config.inputs = vec![dir.path().join("doc*.txt").to_string_lossy().into_owned()];
        config.output_dir = dir.path().join(out);
        config.workers = workers;
        config.spell = true;
        run_pipeline(config).unwrap()
    };
    let serial = run(1, "serial");
    let parallel = run(8, "parallel");
    assert_eq!(serial, parallel, "run summaries must match");
    assert_eq!(serial.documents, 20);
    assert_eq!(serial.sentences, 1000);

    let names = |out: &str| -> Vec<String> {
        let mut names: Vec<String> = fs::read_dir(dir.path().join(out))
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        names
    };
    let serial_names = names("serial");
    assert_eq!(serial_names, names("parallel"), "same set of output files");
    assert_eq!(serial_names.len(), 22, "20 documents plus report and counts");
    for name in &serial_names {
        let a = fs::read(dir.path().join("serial").join(name)).unwrap();
        let b = fs::read(dir.path().join("parallel").join(name)).unwrap();
        assert_eq!(a, b, "{name} must be byte-identical across worker counts");
    }
    finish("9 parallel determinism", 30_000, start);
}
