//! Machine-checking of the analysis correctness property at desk scale, precision
//! metrics for the over-approximation, and a seeded random term generator.

use crate::ast::{AmbientId, Process};
use crate::cfa::{analyze, violations, AnalysisResult, Violation};
use crate::parser::{parse, pretty, WellFormednessError};
use crate::semantics::{explore, StateSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Result of re-validating the analysis judgment at every explored state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerificationReport {
    /// The checked process, pretty-printed.
    pub process: String,
    pub states_checked: usize,
    /// Depth bound the exploration ran with.
    pub depth: usize,
    /// States whose judgment failed — expected empty; any entry is a bug in the
    /// solver or the semantics, not in the checked process.
    pub violations: Vec<StateViolation>,
    pub truncated: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StateViolation {
    /// Index into the exploration's state list.
    pub state: usize,
    /// The offending state, pretty-printed.
    pub term: String,
    /// Which judgment rules failed there.
    pub failures: Vec<Violation>,
}

/// Containment precision of the analysis against the explored truth.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrecisionReport {
    /// Parent-child ambient pairs observed in some explored state.
    pub exact: BTreeSet<(AmbientId, AmbientId)>,
    /// Ambient-ambient memberships the analysis predicts.
    pub predicted: BTreeSet<(AmbientId, AmbientId)>,
    /// Predicted but never observed: the cost of over-approximation.
    pub spurious: BTreeSet<(AmbientId, AmbientId)>,
    /// Observed but not predicted — empty whenever the exploration completed;
    /// anything here disproves soundness.
    pub missed: BTreeSet<(AmbientId, AmbientId)>,
    pub truncated: bool,
}

/// Analyze `p` once, explore its state space, and re-validate the judgment at
/// every reachable state. Truncation is reported, not treated as failure.
pub fn check_theorem(
    p: &Process,
    depth: usize,
    max_states: usize,
) -> Result<VerificationReport, WellFormednessError> {
    let result = analyze(p)?;
    let space = explore(p, depth, max_states);
    Ok(VerificationReport {
        process: pretty(p),
        states_checked: space.states.len(),
        depth,
        violations: violated_states(&result, &space),
        truncated: space.truncated,
    })
}

fn violated_states(result: &AnalysisResult, space: &StateSpace) -> Vec<StateViolation> {
    let mut out = Vec::new();
    for (i, state) in space.states.iter().enumerate() {
        let failures = violations(result, state, &result.top);
        if !failures.is_empty() {
            out.push(StateViolation { state: i, term: pretty(state), failures });
        }
    }
    out
}

/// Compare the predicted containment pairs against those concretely observed
/// across the explored states.
pub fn measure_precision(
    p: &Process,
    depth: usize,
    max_states: usize,
) -> Result<PrecisionReport, WellFormednessError> {
    let result = analyze(p)?;
    let space = explore(p, depth, max_states);
    let mut exact = BTreeSet::new();
    for state in &space.states {
        observed_pairs(state, &result.top, &mut exact);
    }
    let predicted = result.ambient_pairs();
    let spurious = predicted.difference(&exact).cloned().collect();
    let missed = exact.difference(&predicted).cloned().collect();
    Ok(PrecisionReport { exact, predicted, spurious, missed, truncated: space.truncated })
}

/// Parent-child pairs of the ambients actually standing in `p` — those reachable
/// from the root through parallel composition and restriction, not the ones still
/// guarded behind prefixes, choices, or recursion binders.
fn observed_pairs(
    p: &Process,
    parent: &AmbientId,
    out: &mut BTreeSet<(AmbientId, AmbientId)>,
) {
    match p {
        Process::Ambient(id, body) => {
            out.insert((parent.clone(), id.clone()));
            observed_pairs(body, id, out);
        }
        Process::Parallel(l, r) => {
            observed_pairs(l, parent, out);
            observed_pairs(r, parent, out);
        }
        Process::Restriction(_, body) => observed_pairs(body, parent, out),
        Process::Zero
        | Process::Var(_)
        | Process::Prefix(..)
        | Process::Choice(..)
        | Process::Rec(..) => {}
    }
}

// ---------------------------------------------------------------------------
// Random term generation
// ---------------------------------------------------------------------------

/// Deterministic batch of small closed terms. Each term is built around one of
/// eight interaction gadgets — cycled so every batch of eight consecutive terms
/// covers every transition rule family — then decorated with a little
/// independent parallel noise. Budgets: at most 4 ambients and 8 prefixes.
pub fn generate_terms(seed: u64, count: usize) -> Vec<Process> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let src = gadget_source(i % 8, &mut rng);
            parse(&src).unwrap_or_else(|e| panic!("generator emitted {src:?}: {e}"))
        })
        .collect()
}

const CHANNELS: [&str; 3] = ["k", "s", "t"];
const VALUES: [&str; 3] = ["u", "v", "w"];
const LABELS: [&str; 4] = ["A", "B", "C", "M"];

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool[rng.gen_range(0..pool.len())]
}

fn residue(rng: &mut ChaCha8Rng) -> &'static str {
    if rng.gen_bool(0.5) {
        "0"
    } else {
        "jw!{jw}. 0"
    }
}

fn junk(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..5) {
        0 => "ja!{jb}. 0".to_string(),
        1 => "ja?{y}. 0".to_string(),
        2 => "[jc!{jc}. 0]^J".to_string(),
        3 => "rec Y. jb?{z}. Y".to_string(),
        _ => "enter jd. 0 + jb!{jb}. 0".to_string(),
    }
}

fn gadget_source(family: usize, rng: &mut ChaCha8Rng) -> String {
    let k = pick(rng, &CHANNELS);
    let v = pick(rng, &VALUES);
    let a = pick(rng, &LABELS);
    let b = loop {
        let b = pick(rng, &LABELS);
        if b != a {
            break b;
        }
    };
    let r1 = residue(rng);
    let r2 = residue(rng);
    let core = match family {
        0 => format!("[enter {k}. {r1}]^{a} | [accept {k}. {r2}]^{b}"),
        1 => format!("[[exit {k}. {r1}]^{a} | expel {k}. {r2}]^{b}"),
        2 => format!("[merge+ {k}. {r1}]^{a} | [merge- {k}. {r2}]^{b}"),
        3 => format!("{k}!{{{v}}}. {r1} | {k}?{{x}}. {r2}"),
        4 => format!("{k}!v{{{v}}}. {r1} | [{k}?^{{x}}. {r2}]^{a}"),
        5 => format!("[{k}!^{{{v}}}. {r1}]^{a} | {k}?v{{x}}. {r2}"),
        6 => format!("[{k}!#{{{v}}}. {r1}]^{a} | [{k}?#{{x}}. {r2}]^{b}"),
        _ => format!("(rec X. {k}!{{{v}}}. X) | {k}?{{x}}. {r1}"),
    };
    let mut out = core;
    for _ in 0..rng.gen_range(0..=2) {
        out = format!("{out} | {}", junk(rng));
    }
    if rng.gen_bool(0.3) {
        out = format!("({k}) ({out})", k = pick(rng, &CHANNELS));
    }
    out
}

/// The transition rule families exercised across the terms' explorations.
pub fn covered_families(terms: &[Process], depth: usize, max_states: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for term in terms {
        let space = explore(term, depth, max_states);
        for (_, redex, _) in &space.edges {
            out.insert(redex.family().to_string());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{parse_ok, CELL_MOL, ENTER_PAIR};

    fn amb(s: &str) -> AmbientId {
        AmbientId::label(s)
    }

    #[test]
    fn zero_passes_trivially() {
        let report = check_theorem(&Process::Zero, 10, 100).unwrap();
        assert_eq!(report.states_checked, 1);
        assert!(report.violations.is_empty());
        assert!(!report.truncated);
        let precision = measure_precision(&Process::Zero, 10, 100).unwrap();
        assert!(precision.exact.is_empty());
        assert!(precision.predicted.is_empty());
        assert!(precision.spurious.is_empty());
        assert!(precision.missed.is_empty());
    }

    #[test]
    fn cell_mol_theorem_holds() {
        let report = check_theorem(&parse_ok(CELL_MOL), 6, 10_000).unwrap();
        assert_eq!(report.states_checked, 6);
        assert!(report.violations.is_empty());
        assert!(!report.truncated);
    }

    #[test]
    fn enter_pair_precision_is_exact() {
        let p = parse_ok(ENTER_PAIR);
        let precision = measure_precision(&p, 5, 100).unwrap();
        let expected: BTreeSet<_> = [
            (AmbientId::Top, amb("a")),
            (AmbientId::Top, amb("b")),
            (amb("b"), amb("a")),
        ]
        .into_iter()
        .collect();
        assert_eq!(precision.exact, expected);
        assert_eq!(precision.predicted, expected);
        assert!(precision.spurious.is_empty());
        assert!(precision.missed.is_empty());
        assert!(!precision.truncated);
    }

    #[test]
    fn cell_mol_precision() {
        let precision = measure_precision(&parse_ok(CELL_MOL), 6, 10_000).unwrap();
        assert!(precision.missed.is_empty(), "missed: {:?}", precision.missed);
        // The one spurious pair: the analysis cannot rule out D surfacing at the
        // top, though concretely D only ever exits mol while mol sits in cell.
        let spurious: Vec<_> = precision.spurious.iter().collect();
        assert_eq!(spurious, vec![&(AmbientId::Top, amb("D"))]);
        // cell never moves into anything: its only predicted parent is the top.
        assert!(precision
            .predicted
            .iter()
            .filter(|(_, child)| *child == amb("cell"))
            .all(|(parent, _)| *parent == AmbientId::Top));
    }

    #[test]
    fn generated_terms_are_reproducible_and_bounded() {
        let a = generate_terms(42, 24);
        let b = generate_terms(42, 24);
        assert_eq!(a, b);
        assert_ne!(a, generate_terms(43, 24));
        for term in &a {
            assert!(count_ambients(term) <= 4, "{term}");
            assert!(count_prefixes(term) <= 8, "{term}");
        }
    }

    #[test]
    fn generator_covers_every_rule_family() {
        let terms = generate_terms(42, 100);
        let families = covered_families(&terms, 5, 2_000);
        for family in [
            "enter_accept",
            "exit_expel",
            "merge",
            "comm_local",
            "comm_p2c",
            "comm_c2p",
            "comm_s2s",
            "rec_unfold",
        ] {
            assert!(families.contains(family), "missing {family}: {families:?}");
        }
    }

    #[test]
    fn theorem_holds_on_random_batch() {
        for (i, term) in generate_terms(42, 100).iter().enumerate() {
            let report = check_theorem(term, 5, 2_000).unwrap();
            assert!(
                report.violations.is_empty(),
                "term {i} ({}): {:?}",
                report.process,
                report.violations
            );
        }
    }

    #[test]
    fn soundness_on_random_batch() {
        for (i, term) in generate_terms(7, 40).iter().enumerate() {
            let precision = measure_precision(term, 5, 2_000).unwrap();
            if !precision.truncated {
                assert!(precision.missed.is_empty(), "term {i}: {:?}", precision.missed);
            }
        }
    }

    fn count_ambients(p: &Process) -> usize {
        match p {
            Process::Ambient(_, b) => 1 + count_ambients(b),
            Process::Parallel(l, r) | Process::Choice(l, r) => {
                count_ambients(l) + count_ambients(r)
            }
            Process::Restriction(_, b) | Process::Rec(_, b) => count_ambients(b),
            Process::Prefix(_, k) => count_ambients(k),
            Process::Zero | Process::Var(_) => 0,
        }
    }

    fn count_prefixes(p: &Process) -> usize {
        match p {
            Process::Prefix(_, k) => 1 + count_prefixes(k),
            Process::Parallel(l, r) | Process::Choice(l, r) => {
                count_prefixes(l) + count_prefixes(r)
            }
            Process::Restriction(_, b) | Process::Rec(_, b) | Process::Ambient(_, b) => {
                count_prefixes(b)
            }
            Process::Zero | Process::Var(_) => 0,
        }
    }
}
