//! Reduction semantics: congruence-normal forms, one-step successors, and bounded
//! exhaustive exploration.
//!
//! Redexes are found against a region view of the term. A region is the body of one
//! ambient (or the top level): its restrictions, its guarded alternatives, and its
//! child ambients, read through parallel composition and through `rec` unfoldings.
//! Unfolding is a transition-context device, not a congruence: a folded `rec` only
//! unfolds in a successor when one of its prefixes took part in the step.
//!
//! Restrictions float freely across parallel composition inside their region, but
//! never across a membrane. A step that would let content escape the scope of a
//! restriction it mentions (an exiting ambient, or a communicated payload leaving
//! its ambient) is therefore not enabled.

use crate::ast::{
    free_names, substitute, substitute_proc, AmbientId, Capability, Direction, Name, NameSite,
    Process,
};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// How deep a single surface resolution will unfold nested `rec` binders. Guarded
/// recursion needs exactly one level; the bound only matters for degenerate bodies
/// like `rec X. (X | P)`, whose redex supply is genuinely infinite.
const REC_UNFOLD_BOUND: usize = 8;

/// The interaction axiom behind a transition.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Rule {
    EnterAccept,
    ExitExpel,
    Merge,
    CommLocal,
    CommP2c,
    CommC2p,
    CommS2s,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::EnterAccept => "enter_accept",
            Rule::ExitExpel => "exit_expel",
            Rule::Merge => "merge",
            Rule::CommLocal => "comm_local",
            Rule::CommP2c => "comm_p2c",
            Rule::CommC2p => "comm_c2p",
            Rule::CommS2s => "comm_s2s",
        }
    }
}

/// One enabled transition: which axiom fired, where, and on which two prefixes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Redex {
    pub rule: Rule,
    /// True when a participating prefix or ambient only exists in a `rec`
    /// unfolding, i.e. the step also unfolded a recursion.
    pub via_rec: bool,
    /// Structural path of the first participant's region entry, prefixed by the
    /// entry paths of the ambients descended into from the root.
    pub locus: Vec<usize>,
    /// The two consumed prefixes, rendered.
    pub participants: [String; 2],
}

impl Redex {
    /// The rule family for reporting: the axiom name, or `rec_unfold` when the
    /// step was enabled by unfolding a recursion.
    pub fn family(&self) -> &'static str {
        if self.via_rec {
            "rec_unfold"
        } else {
            self.rule.name()
        }
    }
}

/// Unfold `rec X. P` one level: `P[rec X. P / X]`. Returns `None` on other terms.
pub fn unfold_once(p: &Process) -> Option<Process> {
    match p {
        Process::Rec(v, body) => Some(substitute_proc(body, p, v)),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Congruence-normal form
// ---------------------------------------------------------------------------

/// A canonical representative of `p`'s congruence class: parallel compositions are
/// flattened and sorted with `0` units dropped, choices flattened and sorted,
/// restrictions hoisted to their region head, sorted, and dropped when unused, and
/// every bound spelling is renamed by its site. Alpha-variant inputs and
/// parallel/choice rearrangements map to the identical term.
pub fn normalize(p: &Process) -> Process {
    structure(&respell(p))
}

/// Rename every bound name and process identifier to a spelling derived from its
/// binder site, so alpha-variants become byte-identical.
fn respell(p: &Process) -> Process {
    let name = |n: &Name| match n.site {
        NameSite::Free => n.clone(),
        NameSite::Bound(id) => Name { text: format!("n{}", id.0), site: n.site },
    };
    match p {
        Process::Zero => Process::Zero,
        Process::Var(v) => Process::Var(match v.site {
            NameSite::Free => v.clone(),
            NameSite::Bound(id) => {
                crate::ast::ProcVar { text: format!("X{}", id.0), site: v.site }
            }
        }),
        Process::Restriction(n, b) => Process::restriction(name(n), respell(b)),
        Process::Ambient(id, b) => Process::ambient(id.clone(), respell(b)),
        Process::Rec(v, b) => {
            let v = match v.site {
                NameSite::Free => v.clone(),
                NameSite::Bound(id) => {
                    crate::ast::ProcVar { text: format!("X{}", id.0), site: v.site }
                }
            };
            Process::rec(v, respell(b))
        }
        Process::Prefix(cap, k) => {
            let cap = match cap {
                Capability::Enter(n) => Capability::Enter(name(n)),
                Capability::Accept(n) => Capability::Accept(name(n)),
                Capability::Exit(n) => Capability::Exit(name(n)),
                Capability::Expel(n) => Capability::Expel(name(n)),
                Capability::MergePlus(n) => Capability::MergePlus(name(n)),
                Capability::MergeMinus(n) => Capability::MergeMinus(name(n)),
                Capability::Output { dir, channel, payload } => Capability::Output {
                    dir: *dir,
                    channel: name(channel),
                    payload: name(payload),
                },
                Capability::Input { dir, channel, binder } => Capability::Input {
                    dir: *dir,
                    channel: name(channel),
                    binder: name(binder),
                },
            };
            Process::prefix(cap, respell(k))
        }
        Process::Parallel(l, r) => Process::parallel(respell(l), respell(r)),
        Process::Choice(l, r) => Process::choice(respell(l), respell(r)),
    }
}

/// Every non-binding name occurrence's site.
fn occurrence_sites(p: &Process, out: &mut BTreeSet<NameSite>) {
    match p {
        Process::Zero | Process::Var(_) => {}
        Process::Restriction(_, b) | Process::Ambient(_, b) | Process::Rec(_, b) => {
            occurrence_sites(b, out)
        }
        Process::Prefix(cap, k) => {
            match cap {
                Capability::Enter(n)
                | Capability::Accept(n)
                | Capability::Exit(n)
                | Capability::Expel(n)
                | Capability::MergePlus(n)
                | Capability::MergeMinus(n) => {
                    out.insert(n.site);
                }
                Capability::Output { channel, payload, .. } => {
                    out.insert(channel.site);
                    out.insert(payload.site);
                }
                Capability::Input { channel, .. } => {
                    out.insert(channel.site);
                }
            }
            occurrence_sites(k, out);
        }
        Process::Parallel(l, r) | Process::Choice(l, r) => {
            occurrence_sites(l, out);
            occurrence_sites(r, out);
        }
    }
}

fn structure(p: &Process) -> Process {
    match p {
        Process::Zero | Process::Var(_) => p.clone(),
        Process::Prefix(cap, k) => Process::prefix(cap.clone(), structure(k)),
        Process::Rec(v, b) => Process::rec(v.clone(), structure(b)),
        Process::Ambient(id, b) => Process::ambient(id.clone(), structure(b)),
        Process::Choice(..) => {
            let mut branches = Vec::new();
            flatten_choice_terms(p, &mut branches);
            let mut branches: Vec<Process> = branches.iter().map(structure).collect();
            branches.sort();
            branches
                .into_iter()
                .rev()
                .reduce(|acc, b| Process::choice(b, acc))
                .unwrap_or(Process::Zero)
        }
        Process::Parallel(..) | Process::Restriction(..) => {
            let mut restrictions = Vec::new();
            let mut components = Vec::new();
            flatten_region(p, &mut restrictions, &mut components);
            let mut components: Vec<Process> = components.iter().map(structure).collect();
            components.sort();
            let body = components
                .into_iter()
                .rev()
                .reduce(|acc, c| Process::parallel(c, acc));
            let Some(mut body) = body else { return Process::Zero };
            let mut used = BTreeSet::new();
            occurrence_sites(&body, &mut used);
            restrictions.retain(|n| used.contains(&n.site));
            restrictions.sort();
            restrictions.dedup();
            for n in restrictions.into_iter().rev() {
                body = Process::restriction(n, body);
            }
            body
        }
    }
}

fn flatten_choice_terms(p: &Process, out: &mut Vec<Process>) {
    match p {
        Process::Choice(l, r) => {
            flatten_choice_terms(l, out);
            flatten_choice_terms(r, out);
        }
        other => out.push(other.clone()),
    }
}

fn flatten_region(p: &Process, restrictions: &mut Vec<Name>, components: &mut Vec<Process>) {
    match p {
        Process::Zero => {}
        Process::Parallel(l, r) => {
            flatten_region(l, restrictions, components);
            flatten_region(r, restrictions, components);
        }
        Process::Restriction(n, b) => {
            restrictions.push(n.clone());
            flatten_region(b, restrictions, components);
        }
        other => components.push(other.clone()),
    }
}

// ---------------------------------------------------------------------------
// Region view
// ---------------------------------------------------------------------------

/// One entry at the surface of a region, in source order.
#[derive(Clone, Debug)]
enum Entry {
    /// A restriction binder passed on the way to deeper entries.
    Restr(Name),
    /// A child ambient with its interior term.
    Amb { id: AmbientId, body: Process },
    /// A guarded alternative set: a prefix or a choice of prefixes.
    Alts { term: Process },
    /// Something inert: a free process variable, or recursion past the unfold
    /// budget.
    Opaque { term: Process },
    /// The unfolded view of one `rec`. Materializes in a successor only when a
    /// step consumed something inside it; otherwise the original stands.
    Group { original: Process, entries: Vec<Entry> },
}

fn resolve(p: &Process, depth: usize) -> Vec<Entry> {
    let mut out = Vec::new();
    resolve_into(p, depth, &mut out);
    out
}

fn resolve_into(p: &Process, depth: usize, out: &mut Vec<Entry>) {
    match p {
        Process::Zero => {}
        Process::Parallel(l, r) => {
            resolve_into(l, depth, out);
            resolve_into(r, depth, out);
        }
        Process::Restriction(n, b) => {
            out.push(Entry::Restr(n.clone()));
            resolve_into(b, depth, out);
        }
        Process::Ambient(id, b) => {
            out.push(Entry::Amb { id: id.clone(), body: (**b).clone() });
        }
        Process::Prefix(..) | Process::Choice(..) => {
            out.push(Entry::Alts { term: p.clone() });
        }
        Process::Var(_) => out.push(Entry::Opaque { term: p.clone() }),
        Process::Rec(..) => {
            if depth >= REC_UNFOLD_BOUND {
                out.push(Entry::Opaque { term: p.clone() });
            } else {
                let unfolded = unfold_once(p).expect("rec unfolds");
                let entries = resolve(&unfolded, depth + 1);
                out.push(Entry::Group { original: p.clone(), entries });
            }
        }
    }
}

type Path = Vec<usize>;

#[derive(Clone, Debug)]
enum Act {
    Remove,
    Replace(Process),
}

/// Reassemble a region after a step. Restrictions are hoisted to the region head
/// (plain scope extrusion over parallel), untouched `rec` groups re-fold to their
/// originals, and `appends` join the region as fresh parallel components under
/// every restriction.
fn rebuild(entries: &[Entry], acts: &BTreeMap<Path, Act>, appends: &[Process]) -> Process {
    fn walk(
        entries: &[Entry],
        prefix: &mut Path,
        acts: &BTreeMap<Path, Act>,
        restrs: &mut Vec<Name>,
        terms: &mut Vec<Process>,
    ) {
        for (i, entry) in entries.iter().enumerate() {
            prefix.push(i);
            match entry {
                Entry::Restr(n) => restrs.push(n.clone()),
                Entry::Amb { id, body } => place(
                    Process::ambient(id.clone(), body.clone()),
                    prefix,
                    acts,
                    terms,
                ),
                Entry::Alts { term } | Entry::Opaque { term } => {
                    place(term.clone(), prefix, acts, terms)
                }
                Entry::Group { original, entries } => {
                    let touched = acts
                        .keys()
                        .any(|k| k.len() > prefix.len() && k.starts_with(prefix));
                    if touched {
                        walk(entries, prefix, acts, restrs, terms);
                    } else {
                        terms.push(original.clone());
                    }
                }
            }
            prefix.pop();
        }
    }
    fn place(dflt: Process, path: &Path, acts: &BTreeMap<Path, Act>, terms: &mut Vec<Process>) {
        match acts.get(path) {
            None => terms.push(dflt),
            Some(Act::Remove) => {}
            Some(Act::Replace(t)) => terms.push(t.clone()),
        }
    }
    let mut restrs = Vec::new();
    let mut terms = Vec::new();
    walk(entries, &mut Vec::new(), acts, &mut restrs, &mut terms);
    terms.extend(appends.iter().cloned());
    terms.retain(|t| !matches!(t, Process::Zero));
    let Some(mut body) = terms.into_iter().rev().reduce(|acc, t| Process::parallel(t, acc))
    else {
        return Process::Zero;
    };
    for n in restrs.into_iter().rev() {
        body = Process::restriction(n, body);
    }
    body
}

/// A guarded alternative set at the surface of a region.
#[derive(Clone, Debug)]
struct ActiveAlts {
    path: Path,
    via_rec: bool,
    alts: Vec<(Capability, Process)>,
}

/// An ambient at the surface of a region.
#[derive(Clone, Debug)]
struct ActiveAmb {
    path: Path,
    via_rec: bool,
    id: AmbientId,
    body: Process,
}

fn actives(entries: &[Entry]) -> (Vec<ActiveAmb>, Vec<ActiveAlts>) {
    fn walk(
        entries: &[Entry],
        prefix: &mut Path,
        via: bool,
        ambs: &mut Vec<ActiveAmb>,
        alts: &mut Vec<ActiveAlts>,
    ) {
        for (i, entry) in entries.iter().enumerate() {
            prefix.push(i);
            match entry {
                Entry::Restr(_) | Entry::Opaque { .. } => {}
                Entry::Amb { id, body } => ambs.push(ActiveAmb {
                    path: prefix.clone(),
                    via_rec: via,
                    id: id.clone(),
                    body: body.clone(),
                }),
                Entry::Alts { term } => {
                    let mut list = Vec::new();
                    flatten_alts(term, &mut list);
                    alts.push(ActiveAlts { path: prefix.clone(), via_rec: via, alts: list });
                }
                Entry::Group { entries, .. } => walk(entries, prefix, true, ambs, alts),
            }
            prefix.pop();
        }
    }
    let (mut ambs, mut alts) = (Vec::new(), Vec::new());
    walk(entries, &mut Vec::new(), false, &mut ambs, &mut alts);
    (ambs, alts)
}

fn flatten_alts(p: &Process, out: &mut Vec<(Capability, Process)>) {
    match p {
        Process::Prefix(cap, k) => out.push((cap.clone(), (**k).clone())),
        Process::Choice(l, r) => {
            flatten_alts(l, out);
            flatten_alts(r, out);
        }
        // Anything else under a choice is ill-formed; it offers nothing.
        _ => {}
    }
}

fn restriction_sites(entries: &[Entry]) -> BTreeSet<NameSite> {
    let mut out = BTreeSet::new();
    fn walk(entries: &[Entry], out: &mut BTreeSet<NameSite>) {
        for entry in entries {
            match entry {
                Entry::Restr(n) => {
                    out.insert(n.site);
                }
                Entry::Group { entries, .. } => walk(entries, out),
                _ => {}
            }
        }
    }
    walk(entries, &mut out);
    out
}

/// A region-surface ambient with its own region resolved one level down.
struct AmbView {
    amb: ActiveAmb,
    entries: Vec<Entry>,
    child_ambs: Vec<ActiveAmb>,
    alts: Vec<ActiveAlts>,
    restr_sites: BTreeSet<NameSite>,
}

impl AmbView {
    fn new(amb: ActiveAmb) -> Self {
        let entries = resolve(&amb.body, 0);
        let (child_ambs, alts) = actives(&entries);
        let restr_sites = restriction_sites(&entries);
        AmbView { amb, entries, child_ambs, alts, restr_sites }
    }

    /// The ambient after consuming one of its surface alternatives.
    fn consumed(&self, alt_path: &Path, continuation: Process, extra: &[Process]) -> Process {
        let mut acts = BTreeMap::new();
        acts.insert(alt_path.clone(), Act::Replace(continuation));
        Process::ambient(self.amb.id.clone(), rebuild(&self.entries, &acts, extra))
    }
}

// ---------------------------------------------------------------------------
// One-step successors
// ---------------------------------------------------------------------------

/// All transitions enabled in `p`, each with its successor term. Deterministic in
/// enumeration order; successors are not normalized.
pub fn step(p: &Process) -> Vec<(Redex, Process)> {
    let entries = resolve(p, 0);
    let mut out = Vec::new();
    region_steps(&entries, &mut out);
    // Recurse into each surface ambient: redexes anchored in deeper regions.
    let (ambs, _) = actives(&entries);
    for amb in ambs {
        for (mut redex, body2) in step(&amb.body) {
            redex.via_rec |= amb.via_rec;
            let mut locus = amb.path.clone();
            locus.extend(redex.locus);
            redex.locus = locus;
            let mut acts = BTreeMap::new();
            acts.insert(
                amb.path.clone(),
                Act::Replace(Process::ambient(amb.id.clone(), body2)),
            );
            out.push((redex, rebuild(&entries, &acts, &[])));
        }
    }
    out
}

/// Does this name escape the given restriction scopes if it leaves them?
fn payload_escapes(payload: &Name, scopes: &BTreeSet<NameSite>) -> bool {
    scopes.contains(&payload.site)
}

/// Do the free names of `term` intersect the given restriction scopes?
fn content_escapes(term: &Process, scopes: &BTreeSet<NameSite>) -> bool {
    free_names(term).iter().any(|n| scopes.contains(&n.site))
}

fn region_steps(entries: &[Entry], out: &mut Vec<(Redex, Process)>) {
    let (ambs, alts) = actives(entries);
    let views: Vec<AmbView> = ambs.into_iter().map(AmbView::new).collect();

    let push = |out: &mut Vec<(Redex, Process)>,
                rule: Rule,
                via: bool,
                locus: &Path,
                a: &Capability,
                b: &Capability,
                acts: BTreeMap<Path, Act>,
                appends: &[Process]| {
        let redex = Redex {
            rule,
            via_rec: via,
            locus: locus.clone(),
            participants: [a.to_string(), b.to_string()],
        };
        out.push((redex, rebuild(entries, &acts, appends)));
    };

    // Local communication: two distinct parallel alternative sets in this region.
    for (i, sender) in alts.iter().enumerate() {
        for (cap_out, cont_out) in &sender.alts {
            let Capability::Output { dir: Direction::Local, channel, payload } = cap_out else {
                continue;
            };
            for (j, receiver) in alts.iter().enumerate() {
                if i == j {
                    continue;
                }
                for (cap_in, cont_in) in &receiver.alts {
                    let Capability::Input { dir: Direction::Local, channel: ch2, binder } =
                        cap_in
                    else {
                        continue;
                    };
                    if channel.canonical() != ch2.canonical() {
                        continue;
                    }
                    let mut acts = BTreeMap::new();
                    acts.insert(sender.path.clone(), Act::Replace(cont_out.clone()));
                    acts.insert(
                        receiver.path.clone(),
                        Act::Replace(substitute(cont_in, payload, binder)),
                    );
                    push(
                        out,
                        Rule::CommLocal,
                        sender.via_rec || receiver.via_rec,
                        &sender.path,
                        cap_out,
                        cap_in,
                        acts,
                        &[],
                    );
                }
            }
        }
    }

    // Parent-to-child: a down-output beside an ambient, an up-input inside it.
    for sender in &alts {
        for (cap_out, cont_out) in &sender.alts {
            let Capability::Output { dir: Direction::Down, channel, payload } = cap_out else {
                continue;
            };
            for child in &views {
                for inner in &child.alts {
                    for (cap_in, cont_in) in &inner.alts {
                        let Capability::Input { dir: Direction::Up, channel: ch2, binder } =
                            cap_in
                        else {
                            continue;
                        };
                        if channel.canonical() != ch2.canonical() {
                            continue;
                        }
                        let mut acts = BTreeMap::new();
                        acts.insert(sender.path.clone(), Act::Replace(cont_out.clone()));
                        acts.insert(
                            child.amb.path.clone(),
                            Act::Replace(child.consumed(
                                &inner.path,
                                substitute(cont_in, payload, binder),
                                &[],
                            )),
                        );
                        push(
                            out,
                            Rule::CommP2c,
                            sender.via_rec || child.amb.via_rec || inner.via_rec,
                            &sender.path,
                            cap_out,
                            cap_in,
                            acts,
                            &[],
                        );
                    }
                }
            }
        }
    }

    // Child-to-parent: an up-output inside an ambient, a down-input beside it.
    // The payload must not be private to the child's interior.
    for child in &views {
        for inner in &child.alts {
            for (cap_out, cont_out) in &inner.alts {
                let Capability::Output { dir: Direction::Up, channel, payload } = cap_out else {
                    continue;
                };
                if payload_escapes(payload, &child.restr_sites) {
                    continue;
                }
                for receiver in &alts {
                    for (cap_in, cont_in) in &receiver.alts {
                        let Capability::Input { dir: Direction::Down, channel: ch2, binder } =
                            cap_in
                        else {
                            continue;
                        };
                        if channel.canonical() != ch2.canonical() {
                            continue;
                        }
                        let mut acts = BTreeMap::new();
                        acts.insert(
                            child.amb.path.clone(),
                            Act::Replace(child.consumed(&inner.path, cont_out.clone(), &[])),
                        );
                        acts.insert(
                            receiver.path.clone(),
                            Act::Replace(substitute(cont_in, payload, binder)),
                        );
                        push(
                            out,
                            Rule::CommC2p,
                            child.amb.via_rec || inner.via_rec || receiver.via_rec,
                            &child.amb.path,
                            cap_out,
                            cap_in,
                            acts,
                            &[],
                        );
                    }
                }
            }
        }
    }

    // Sibling-to-sibling: marked output in one ambient, marked input in another.
    for (ci, c1) in views.iter().enumerate() {
        for inner_out in &c1.alts {
            for (cap_out, cont_out) in &inner_out.alts {
                let Capability::Output { dir: Direction::Sibling, channel, payload } = cap_out
                else {
                    continue;
                };
                if payload_escapes(payload, &c1.restr_sites) {
                    continue;
                }
                for (cj, c2) in views.iter().enumerate() {
                    if ci == cj {
                        continue;
                    }
                    for inner_in in &c2.alts {
                        for (cap_in, cont_in) in &inner_in.alts {
                            let Capability::Input {
                                dir: Direction::Sibling,
                                channel: ch2,
                                binder,
                            } = cap_in
                            else {
                                continue;
                            };
                            if channel.canonical() != ch2.canonical() {
                                continue;
                            }
                            let mut acts = BTreeMap::new();
                            acts.insert(
                                c1.amb.path.clone(),
                                Act::Replace(c1.consumed(&inner_out.path, cont_out.clone(), &[])),
                            );
                            acts.insert(
                                c2.amb.path.clone(),
                                Act::Replace(c2.consumed(
                                    &inner_in.path,
                                    substitute(cont_in, payload, binder),
                                    &[],
                                )),
                            );
                            push(
                                out,
                                Rule::CommS2s,
                                c1.amb.via_rec
                                    || inner_out.via_rec
                                    || c2.amb.via_rec
                                    || inner_in.via_rec,
                                &c1.amb.path,
                                cap_out,
                                cap_in,
                                acts,
                                &[],
                            );
                        }
                    }
                }
            }
        }
    }

    // Enter/accept: one sibling ambient moves into another.
    for (ai, a) in views.iter().enumerate() {
        for inner_a in &a.alts {
            for (cap_enter, cont_enter) in &inner_a.alts {
                let Capability::Enter(n) = cap_enter else { continue };
                for (bi, b) in views.iter().enumerate() {
                    if ai == bi {
                        continue;
                    }
                    for inner_b in &b.alts {
                        for (cap_accept, cont_accept) in &inner_b.alts {
                            let Capability::Accept(m) = cap_accept else { continue };
                            if n.canonical() != m.canonical() {
                                continue;
                            }
                            let moved = a.consumed(&inner_a.path, cont_enter.clone(), &[]);
                            let host =
                                b.consumed(&inner_b.path, cont_accept.clone(), &[moved]);
                            let mut acts = BTreeMap::new();
                            acts.insert(a.amb.path.clone(), Act::Remove);
                            acts.insert(b.amb.path.clone(), Act::Replace(host));
                            push(
                                out,
                                Rule::EnterAccept,
                                a.amb.via_rec
                                    || inner_a.via_rec
                                    || b.amb.via_rec
                                    || inner_b.via_rec,
                                &a.amb.path,
                                cap_enter,
                                cap_accept,
                                acts,
                                &[],
                            );
                        }
                    }
                }
            }
        }
    }

    // Merge: the minus side's membrane dissolves into the plus side.
    for (ai, a) in views.iter().enumerate() {
        for inner_a in &a.alts {
            for (cap_plus, cont_plus) in &inner_a.alts {
                let Capability::MergePlus(n) = cap_plus else { continue };
                for (bi, b) in views.iter().enumerate() {
                    if ai == bi {
                        continue;
                    }
                    for inner_b in &b.alts {
                        for (cap_minus, cont_minus) in &inner_b.alts {
                            let Capability::MergeMinus(m) = cap_minus else { continue };
                            if n.canonical() != m.canonical() {
                                continue;
                            }
                            let mut inner_acts = BTreeMap::new();
                            inner_acts
                                .insert(inner_b.path.clone(), Act::Replace(cont_minus.clone()));
                            let poured = rebuild(&b.entries, &inner_acts, &[]);
                            let merged =
                                a.consumed(&inner_a.path, cont_plus.clone(), &[poured]);
                            let mut acts = BTreeMap::new();
                            acts.insert(a.amb.path.clone(), Act::Replace(merged));
                            acts.insert(b.amb.path.clone(), Act::Remove);
                            push(
                                out,
                                Rule::Merge,
                                a.amb.via_rec
                                    || inner_a.via_rec
                                    || b.amb.via_rec
                                    || inner_b.via_rec,
                                &a.amb.path,
                                cap_plus,
                                cap_minus,
                                acts,
                                &[],
                            );
                        }
                    }
                }
            }
        }
    }

    // Exit/expel: a grandchild leaves its host, landing beside it in this region.
    // The exiting ambient must not mention names private to the host's interior.
    for host in &views {
        let exiting: Vec<AmbView> =
            host.child_ambs.iter().cloned().map(AmbView::new).collect();
        for child in &exiting {
            for inner_c in &child.alts {
                for (cap_exit, cont_exit) in &inner_c.alts {
                    let Capability::Exit(n) = cap_exit else { continue };
                    for inner_h in &host.alts {
                        for (cap_expel, cont_expel) in &inner_h.alts {
                            let Capability::Expel(m) = cap_expel else { continue };
                            if n.canonical() != m.canonical() {
                                continue;
                            }
                            let escaped =
                                child.consumed(&inner_c.path, cont_exit.clone(), &[]);
                            if content_escapes(&escaped, &host.restr_sites) {
                                continue;
                            }
                            let mut host_acts = BTreeMap::new();
                            host_acts.insert(child.amb.path.clone(), Act::Remove);
                            host_acts
                                .insert(inner_h.path.clone(), Act::Replace(cont_expel.clone()));
                            let remaining = Process::ambient(
                                host.amb.id.clone(),
                                rebuild(&host.entries, &host_acts, &[]),
                            );
                            let mut acts = BTreeMap::new();
                            acts.insert(host.amb.path.clone(), Act::Replace(remaining));
                            push(
                                out,
                                Rule::ExitExpel,
                                host.amb.via_rec
                                    || child.amb.via_rec
                                    || inner_c.via_rec
                                    || inner_h.via_rec,
                                &child.amb.path,
                                cap_exit,
                                cap_expel,
                                acts,
                                &[escaped],
                            );
                        }
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Bounded exploration
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StateSpace {
    /// The normalized initial state; also `states[0]`.
    pub initial: Process,
    /// Distinct reachable states in discovery order, congruence-normalized.
    pub states: Vec<Process>,
    /// `(source index, transition, target index)`, deduplicated.
    pub edges: Vec<(usize, Redex, usize)>,
    /// Depth of the deepest stored state.
    pub depth_reached: usize,
    /// True iff the depth bound or the state cap cut the exploration short.
    pub truncated: bool,
}

pub const DEFAULT_MAX_DEPTH: usize = 64;
pub const DEFAULT_MAX_STATES: usize = 100_000;

/// Breadth-first closure of `step` up to `max_depth` transitions and at most
/// `max_states` distinct states. States are identified up to congruence by
/// `normalize`. Two runs on the same input produce identical spaces.
pub fn explore(p: &Process, max_depth: usize, max_states: usize) -> StateSpace {
    let initial = normalize(p);
    let mut states = vec![initial.clone()];
    let mut depth_of = vec![0usize];
    let mut index: HashMap<Process, usize> = HashMap::new();
    index.insert(initial.clone(), 0);
    let mut edges = Vec::new();
    let mut edge_seen: BTreeSet<(usize, Redex, usize)> = BTreeSet::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    queue.push_back(0);
    let mut truncated = false;
    let mut depth_reached = 0;

    while let Some(s) = queue.pop_front() {
        let depth = depth_of[s];
        let successors = step(&states[s].clone());
        if depth == max_depth {
            if !successors.is_empty() {
                truncated = true;
            }
            continue;
        }
        for (redex, raw) in successors {
            let q = normalize(&raw);
            let target = match index.get(&q) {
                Some(&t) => t,
                None => {
                    if states.len() >= max_states {
                        truncated = true;
                        continue;
                    }
                    let t = states.len();
                    states.push(q.clone());
                    depth_of.push(depth + 1);
                    depth_reached = depth_reached.max(depth + 1);
                    index.insert(q, t);
                    queue.push_back(t);
                    t
                }
            };
            if edge_seen.insert((s, redex.clone(), target)) {
                edges.push((s, redex, target));
            }
        }
    }
    StateSpace { initial, states, edges, depth_reached, truncated }
}

/// Re-validate every edge of an explored space by recomputing the enabled steps of
/// its source and re-matching rule, participants, and target. Returns the indices
/// of edges that fail.
pub fn audit(space: &StateSpace) -> Vec<usize> {
    let mut bad = Vec::new();
    for (i, (src, redex, dst)) in space.edges.iter().enumerate() {
        let ok = step(&space.states[*src])
            .into_iter()
            .any(|(r, q)| r == *redex && normalize(&q) == space.states[*dst]);
        if !ok {
            bad.push(i);
        }
    }
    bad
}
