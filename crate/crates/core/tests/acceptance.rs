//! Acceptance suite: one test per release criterion, each printing a single
//! PASS line (a failed assertion is the FAIL line). Criteria cover the flagship
//! cell/molecule model, soundness and precision over the whole corpus, the
//! randomized theorem check, determinism, round-tripping, and per-rule oracles.

use bioamb::ast::{alpha_equal, AmbientId, CanonicalName};
use bioamb::cfa::{analyze, closed_under, generate_constraints};
use bioamb::output::site_texts;
use bioamb::parser::parse;
use bioamb::semantics::{normalize, step};
use bioamb::verify::{generate_terms, measure_precision};
use std::process::Command;
use std::time::Instant;

const BIN: &str = env!("CARGO_BIN_EXE_bioamb");

const CORPUS: [&str; 9] = [
    "cell_mol",
    "enter_accept",
    "exit_expel",
    "merge",
    "comm_local",
    "comm_p2c",
    "comm_c2p",
    "comm_s2s",
    "rec_unfold",
];

fn corpus_path(name: &str) -> String {
    format!("{}/tests/corpus/{name}.bioamb", env!("CARGO_MANIFEST_DIR"))
}

fn corpus_term(name: &str) -> bioamb::ast::Process {
    let src = std::fs::read_to_string(corpus_path(name)).expect("corpus file");
    parse(&src).expect("corpus parses")
}

fn amb(label: &str) -> AmbientId {
    AmbientId::Label(label.to_string())
}

/// The canonical name bound by the binder spelled `text` in the term.
fn bound(term: &bioamb::ast::Process, text: &str) -> CanonicalName {
    let table = site_texts(term);
    let (id, _) = table
        .iter()
        .find(|(_, t)| t.as_str() == text)
        .unwrap_or_else(|| panic!("no binder spelled {text}"));
    CanonicalName::Bound(*id)
}

#[test]
fn criterion_1_cell_mol_positive_facts() {
    let start = Instant::now();
    let p = corpus_term("cell_mol");
    let result = analyze(&p).unwrap();
    let top = AmbientId::Top;
    assert!(result.contains(&amb("cell"), &amb("mol")), "mol may be inside cell");
    assert!(result.contains(&amb("cell"), &amb("D")), "D may be inside cell");
    assert!(result.contains(&amb("mol"), &amb("D")), "D may be inside mol");
    assert!(result.contains(&top, &amb("mol")), "mol may be at top");
    assert!(result.contains(&top, &amb("cell")), "cell may be at top");
    assert!(
        result.binds(&bound(&p, "x"), &bound(&p, "cell3")),
        "x may receive cell3"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1s");
    println!("PASS criterion 1: cell/mol positive facts in {elapsed:?}");
}

#[test]
fn criterion_2_cell_mol_negative_facts() {
    let p = corpus_term("cell_mol");
    let result = analyze(&p).unwrap();
    assert!(!result.contains(&amb("mol"), &amb("cell")), "cell never enters mol");
    assert!(!result.contains(&amb("D"), &amb("cell")), "cell never enters D");
    println!("PASS criterion 2: cell/mol negative facts (no inverted containment)");
}

#[test]
fn criterion_3_corpus_holds_at_depth_6() {
    let start = Instant::now();
    for name in CORPUS {
        let out = Command::new(BIN)
            .args(["verify", "--depth", "6", &corpus_path(name)])
            .output()
            .expect("binary runs");
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
        assert!(String::from_utf8_lossy(&out.stdout).contains("violations: none"), "{name}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, budget 10s");
    println!(
        "PASS criterion 3: theorem holds on all {} corpus models at depth 6 in {elapsed:?}",
        CORPUS.len()
    );
}

#[test]
fn criterion_4_random_batch_holds_and_covers_families() {
    let start = Instant::now();
    let out = Command::new(BIN)
        .args(["verify", "--random", "100", "--seed", "42", "--depth", "5", "--json"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(doc["payload"]["total_violations"], 0);
    let families: Vec<&str> = doc["payload"]["families"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(
        families,
        vec![
            "comm_c2p",
            "comm_local",
            "comm_p2c",
            "comm_s2s",
            "enter_accept",
            "exit_expel",
            "merge",
            "rec_unfold",
        ],
        "every rule family must occur in the batch"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget 60s");
    println!("PASS criterion 4: 100 random terms, 0 violations, 8/8 families in {elapsed:?}");
}

#[test]
fn criterion_5_nothing_missed_on_corpus() {
    for name in CORPUS {
        let p = corpus_term(name);
        let report = measure_precision(&p, 6, 10_000).unwrap();
        assert!(!report.truncated, "{name}: exploration must complete");
        assert!(
            report.missed.is_empty(),
            "{name}: observed containment outside the prediction: {:?}",
            report.missed
        );
    }
    println!("PASS criterion 5: no observed containment escapes the prediction (corpus)");
}

#[test]
fn criterion_6_fixpoint_and_determinism() {
    for name in CORPUS {
        let p = corpus_term(name);
        let constraints = generate_constraints(&p, &AmbientId::Top).unwrap();
        let result = analyze(&p).unwrap();
        assert!(closed_under(&result, &constraints), "{name}: result must be a fixpoint");
    }
    let run = || {
        Command::new(BIN)
            .args(["analyze", "--json", &corpus_path("cell_mol")])
            .output()
            .expect("binary runs")
            .stdout
    };
    assert_eq!(run(), run(), "repeated runs must be byte-identical");
    println!("PASS criterion 6: solutions are fixpoints; repeated runs byte-identical");
}

#[test]
fn criterion_7_pretty_parse_round_trip() {
    let terms = generate_terms(42, 1000);
    for (i, term) in terms.iter().enumerate() {
        let printed = term.to_string();
        let reparsed = parse(&printed)
            .unwrap_or_else(|e| panic!("term {i} failed to reparse: {e}\n{printed}"));
        assert!(
            alpha_equal(term, &reparsed),
            "term {i} changed under print+parse:\n{printed}"
        );
    }
    println!("PASS criterion 7: print/parse round-trip exact on 1000 generated terms");
}

#[test]
fn criterion_8_per_rule_successor_oracles() {
    // Each corpus model has a hand-computed successor set.
    let oracles: [(&str, &str, &str); 8] = [
        ("enter_accept", "enter_accept", "[[0]^a | 0]^b"),
        ("exit_expel", "exit_expel", "[0]^a | [0]^b"),
        ("merge", "merge", "[p!{p}. 0 | q!{q}. 0 | [0]^inner]^a"),
        ("comm_local", "comm_local", "m!{m}. 0"),
        ("comm_p2c", "comm_p2c", "[m!{m}. 0]^a"),
        ("comm_c2p", "comm_c2p", "[0]^a | m!{m}. 0"),
        ("comm_s2s", "comm_s2s", "[0]^a | [m!{m}. 0]^b"),
        ("rec_unfold", "rec_unfold", "rec X. c!{v}. X"),
    ];
    for (name, family, expected) in oracles {
        let p = corpus_term(name);
        let successors: Vec<_> = step(&p)
            .into_iter()
            .map(|(r, q)| (r.family(), normalize(&q)))
            .collect();
        let want = normalize(&parse(expected).unwrap());
        assert_eq!(successors.len(), 1, "{name}: expected exactly one successor");
        assert_eq!(successors[0].0, family, "{name}");
        assert_eq!(successors[0].1, want, "{name}");
    }
    println!("PASS criterion 8: hand-derived successor sets match for all 8 rule families");
}
