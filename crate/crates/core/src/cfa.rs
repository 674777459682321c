//! Flow analysis of ambient contents (𝒥) and name bindings (ℛ): constraint
//! generation, closure solving to a least fixpoint, and a judgment checker.
//!
//! The analysis abstracts names by their canonical identities and ambients by
//! their labels, with a distinguished top ambient enclosing the whole process.
//! Each ambient's abstract contents hold both the ambients and the capabilities
//! that may come to reside directly inside it; the binding relation records which
//! values each name may take on through communication. Capability memberships are
//! quantified over the binding relation, so the result stays valid as
//! communication substitutes names — that is exactly what the verifier checks.

use crate::ast::{
    free_names, AmbientId, CanonicalName, Capability, Direction, Name, Process,
};
use crate::parser::{check_well_formed, WellFormednessError};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

/// A capability over canonical names: an element of an ambient's abstract
/// contents. Input capabilities carry their binder's canonical name; the channel
/// (and, for outputs, the payload) has already been resolved through ℛ.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum AbstractCap {
    Enter(CanonicalName),
    Accept(CanonicalName),
    Exit(CanonicalName),
    Expel(CanonicalName),
    MergePlus(CanonicalName),
    MergeMinus(CanonicalName),
    Output { dir: Direction, channel: CanonicalName, payload: CanonicalName },
    Input { dir: Direction, channel: CanonicalName, binder: CanonicalName },
}

impl fmt::Display for AbstractCap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbstractCap::Enter(n) => write!(f, "enter {n}"),
            AbstractCap::Accept(n) => write!(f, "accept {n}"),
            AbstractCap::Exit(n) => write!(f, "exit {n}"),
            AbstractCap::Expel(n) => write!(f, "expel {n}"),
            AbstractCap::MergePlus(n) => write!(f, "merge+ {n}"),
            AbstractCap::MergeMinus(n) => write!(f, "merge- {n}"),
            AbstractCap::Output { dir, channel, payload } => {
                write!(f, "{channel}!{}{{{payload}}}", dir.mark())
            }
            AbstractCap::Input { dir, channel, binder } => {
                write!(f, "{channel}?{}{{{binder}}}", dir.mark())
            }
        }
    }
}

/// One element of an ambient's abstract contents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Item {
    Amb(AmbientId),
    Cap(AbstractCap),
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Amb(a) => write!(f, "{a}"),
            Item::Cap(c) => write!(f, "{c}"),
        }
    }
}

/// 𝒥: what each ambient may contain. Every ambient in the universe has a key.
pub type ContentsRelation = BTreeMap<AmbientId, BTreeSet<Item>>;

/// ℛ: which canonical values each canonical name may take on.
pub type BindingRelation = BTreeMap<CanonicalName, BTreeSet<CanonicalName>>;

/// The syntactic shape of a capability before its names are resolved through ℛ.
/// `channel` (and `payload`) are canonical keys to quantify over; an input's
/// `binder` is carried into the abstract capability as-is.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CapShape {
    Enter(CanonicalName),
    Accept(CanonicalName),
    Exit(CanonicalName),
    Expel(CanonicalName),
    MergePlus(CanonicalName),
    MergeMinus(CanonicalName),
    Output { dir: Direction, channel: CanonicalName, payload: CanonicalName },
    Input { dir: Direction, channel: CanonicalName, binder: CanonicalName },
}

/// One constraint of the analysis.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Constraint {
    /// μ may directly contain the ambient labeled `child`.
    Nested { parent: AmbientId, child: AmbientId },
    /// ⌊n⌋ ∈ ℛ(⌊n⌋): a restriction binder or a free name denotes itself.
    SelfBinding(CanonicalName),
    /// For every resolution of the shape's channel (and payload) through ℛ, the
    /// resulting abstract capability is in 𝒥(star).
    CapAt { star: AmbientId, shape: CapShape },
}

pub type ConstraintSet = BTreeSet<Constraint>;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SolveStats {
    /// Number of generated constraints.
    pub constraints: usize,
    /// Fixpoint rounds until nothing changed.
    pub iterations: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AnalysisResult {
    pub top: AmbientId,
    pub contents: ContentsRelation,
    pub bindings: BindingRelation,
    pub stats: SolveStats,
}

impl AnalysisResult {
    /// Is the ambient labeled `child` possibly directly inside `parent`?
    pub fn contains(&self, parent: &AmbientId, child: &AmbientId) -> bool {
        self.contents
            .get(parent)
            .is_some_and(|s| s.contains(&Item::Amb(child.clone())))
    }

    /// May `name` take on the value `value`?
    pub fn binds(&self, name: &CanonicalName, value: &CanonicalName) -> bool {
        self.bindings.get(name).is_some_and(|s| s.contains(value))
    }

    /// Ambient-to-ambient containment pairs, `(parent, child)`.
    pub fn ambient_pairs(&self) -> BTreeSet<(AmbientId, AmbientId)> {
        let mut out = BTreeSet::new();
        for (parent, items) in &self.contents {
            for item in items {
                if let Item::Amb(child) = item {
                    out.insert((parent.clone(), child.clone()));
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Constraint generation
// ---------------------------------------------------------------------------

fn cap_shape(cap: &Capability) -> CapShape {
    let key = |n: &Name| n.canonical();
    match cap {
        Capability::Enter(n) => CapShape::Enter(key(n)),
        Capability::Accept(n) => CapShape::Accept(key(n)),
        Capability::Exit(n) => CapShape::Exit(key(n)),
        Capability::Expel(n) => CapShape::Expel(key(n)),
        Capability::MergePlus(n) => CapShape::MergePlus(key(n)),
        Capability::MergeMinus(n) => CapShape::MergeMinus(key(n)),
        Capability::Output { dir, channel, payload } => {
            CapShape::Output { dir: *dir, channel: key(channel), payload: key(payload) }
        }
        Capability::Input { dir, channel, binder } => {
            CapShape::Input { dir: *dir, channel: key(channel), binder: key(binder) }
        }
    }
}

/// Constraints describing `p` with `top` as its enclosing ambient: structural
/// recursion over the term plus self-binding seeds for every free name.
pub fn generate_constraints(
    p: &Process,
    top: &AmbientId,
) -> Result<ConstraintSet, WellFormednessError> {
    check_well_formed(p)?;
    let mut out = ConstraintSet::new();
    for n in free_names(p) {
        out.insert(Constraint::SelfBinding(n.canonical()));
    }
    fn walk(p: &Process, star: &AmbientId, out: &mut ConstraintSet) {
        match p {
            Process::Zero | Process::Var(_) => {}
            Process::Restriction(n, body) => {
                out.insert(Constraint::SelfBinding(n.canonical()));
                walk(body, star, out);
            }
            Process::Ambient(id, body) => {
                out.insert(Constraint::Nested { parent: star.clone(), child: id.clone() });
                walk(body, id, out);
            }
            Process::Prefix(cap, cont) => {
                out.insert(Constraint::CapAt { star: star.clone(), shape: cap_shape(cap) });
                walk(cont, star, out);
            }
            Process::Parallel(l, r) | Process::Choice(l, r) => {
                walk(l, star, out);
                walk(r, star, out);
            }
            Process::Rec(_, body) => walk(body, star, out),
        }
    }
    walk(p, top, &mut out);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

struct Solver {
    j: ContentsRelation,
    r: BindingRelation,
    caps: Vec<(AmbientId, CapShape)>,
    /// Canonical key → indices of capability constraints watching it.
    watch: BTreeMap<CanonicalName, Vec<usize>>,
    /// Newly added ℛ facts not yet pushed through `watch`.
    pending: VecDeque<(CanonicalName, CanonicalName)>,
    changed: bool,
}

impl Solver {
    fn new(constraints: &ConstraintSet, top: &AmbientId) -> Self {
        let mut solver = Solver {
            j: ContentsRelation::new(),
            r: BindingRelation::new(),
            caps: Vec::new(),
            watch: BTreeMap::new(),
            pending: VecDeque::new(),
            changed: false,
        };
        solver.j.entry(top.clone()).or_default();
        for c in constraints {
            match c {
                Constraint::Nested { parent, child } => {
                    solver.add_member(parent.clone(), Item::Amb(child.clone()));
                }
                Constraint::SelfBinding(n) => solver.add_binding(n.clone(), n.clone()),
                Constraint::CapAt { star, shape } => {
                    let idx = solver.caps.len();
                    for key in shape_keys(shape) {
                        solver.watch.entry(key).or_default().push(idx);
                    }
                    solver.caps.push((star.clone(), shape.clone()));
                }
            }
        }
        solver
    }

    fn add_member(&mut self, parent: AmbientId, item: Item) {
        if let Item::Amb(child) = &item {
            self.j.entry(child.clone()).or_default();
        }
        if self.j.entry(parent).or_default().insert(item) {
            self.changed = true;
        }
    }

    fn add_binding(&mut self, name: CanonicalName, value: CanonicalName) {
        if self.r.entry(name.clone()).or_default().insert(value.clone()) {
            self.changed = true;
            self.pending.push_back((name, value));
        }
    }

    fn r_values(&self, key: &CanonicalName) -> Vec<CanonicalName> {
        self.r.get(key).map(|s| s.iter().cloned().collect()).unwrap_or_default()
    }

    /// Push pending ℛ deltas through the watching capability constraints,
    /// materializing the abstract capabilities they now resolve to.
    fn fire_watchers(&mut self) {
        while let Some((key, value)) = self.pending.pop_front() {
            let indices = self.watch.get(&key).cloned().unwrap_or_default();
            for idx in indices {
                let (star, shape) = self.caps[idx].clone();
                for cap in resolve_shape(&shape, &key, &value, |k| self.r_values(k)) {
                    self.add_member(star.clone(), Item::Cap(cap));
                }
            }
        }
    }

    /// One round of the closure conditions over the current relations.
    fn close_once(&mut self) {
        // parent sets: child ambient → ambients it may sit in.
        let mut parents: BTreeMap<AmbientId, BTreeSet<AmbientId>> = BTreeMap::new();
        let mut caps_at: Vec<(AmbientId, AbstractCap)> = Vec::new();
        for (parent, items) in &self.j {
            for item in items {
                match item {
                    Item::Amb(child) => {
                        parents.entry(child.clone()).or_default().insert(parent.clone());
                    }
                    Item::Cap(c) => caps_at.push((parent.clone(), c.clone())),
                }
            }
        }
        let parents_of = |a: &AmbientId| parents.get(a).cloned().unwrap_or_default();
        let share_parent = |a: &AmbientId, b: &AmbientId| {
            let pa = parents_of(a);
            parents_of(b).iter().any(|p| pa.contains(p))
        };

        let mut new_members: Vec<(AmbientId, Item)> = Vec::new();
        let mut new_bindings: Vec<(CanonicalName, CanonicalName)> = Vec::new();

        for (mu1, cap1) in &caps_at {
            match cap1 {
                // Enter/accept: both ambients under a common parent; the one
                // entering ends up inside the acceptor.
                AbstractCap::Enter(n) => {
                    for (mu2, cap2) in &caps_at {
                        if matches!(cap2, AbstractCap::Accept(m) if m == n)
                            && share_parent(mu1, mu2)
                        {
                            new_members.push((mu2.clone(), Item::Amb(mu1.clone())));
                        }
                    }
                }
                // Exit/expel: the inner ambient surfaces beside its host.
                AbstractCap::Exit(n) => {
                    for (mu2, cap2) in &caps_at {
                        if matches!(cap2, AbstractCap::Expel(m) if m == n)
                            && parents_of(mu1).contains(mu2)
                        {
                            for mu in parents_of(mu2) {
                                new_members.push((mu, Item::Amb(mu1.clone())));
                            }
                        }
                    }
                }
                // Merge: everything the minus side may contain, the plus side
                // may contain too (its whole body is poured over).
                AbstractCap::MergePlus(n) => {
                    for (mu2, cap2) in &caps_at {
                        if matches!(cap2, AbstractCap::MergeMinus(m) if m == n)
                            && share_parent(mu1, mu2)
                        {
                            if let Some(items) = self.j.get(mu2) {
                                for item in items {
                                    new_members.push((mu1.clone(), item.clone()));
                                }
                            }
                        }
                    }
                }
                AbstractCap::Output { dir, channel, payload } => {
                    for (mu2, cap2) in &caps_at {
                        let AbstractCap::Input { dir: din, channel: ch2, binder } = cap2
                        else {
                            continue;
                        };
                        if channel != ch2 {
                            continue;
                        }
                        let placed = match (dir, din) {
                            // To local: sender and receiver in the same ambient.
                            (Direction::Local, Direction::Local) => mu1 == mu2,
                            // To child: receiver's ambient inside the sender's.
                            (Direction::Down, Direction::Up) => {
                                parents_of(mu2).contains(mu1)
                            }
                            // To parent: sender's ambient inside the receiver's.
                            (Direction::Up, Direction::Down) => {
                                parents_of(mu1).contains(mu2)
                            }
                            // To sibling: both under a common parent.
                            (Direction::Sibling, Direction::Sibling) => {
                                share_parent(mu1, mu2)
                            }
                            _ => false,
                        };
                        if placed {
                            new_bindings.push((binder.clone(), payload.clone()));
                        }
                    }
                }
                _ => {}
            }
        }

        for (parent, item) in new_members {
            self.add_member(parent, item);
        }
        for (name, value) in new_bindings {
            self.add_binding(name, value);
        }
    }
}

/// The ℛ keys a capability shape quantifies over.
fn shape_keys(shape: &CapShape) -> Vec<CanonicalName> {
    match shape {
        CapShape::Enter(n)
        | CapShape::Accept(n)
        | CapShape::Exit(n)
        | CapShape::Expel(n)
        | CapShape::MergePlus(n)
        | CapShape::MergeMinus(n) => vec![n.clone()],
        CapShape::Output { channel, payload, .. } => vec![channel.clone(), payload.clone()],
        CapShape::Input { channel, .. } => vec![channel.clone()],
    }
}

/// The abstract capabilities a shape yields when `key` has just gained `value`,
/// with the shape's other key (if any) ranging over current ℛ values.
fn resolve_shape(
    shape: &CapShape,
    key: &CanonicalName,
    value: &CanonicalName,
    values_of: impl Fn(&CanonicalName) -> Vec<CanonicalName>,
) -> Vec<AbstractCap> {
    match shape {
        CapShape::Enter(n) if n == key => vec![AbstractCap::Enter(value.clone())],
        CapShape::Accept(n) if n == key => vec![AbstractCap::Accept(value.clone())],
        CapShape::Exit(n) if n == key => vec![AbstractCap::Exit(value.clone())],
        CapShape::Expel(n) if n == key => vec![AbstractCap::Expel(value.clone())],
        CapShape::MergePlus(n) if n == key => vec![AbstractCap::MergePlus(value.clone())],
        CapShape::MergeMinus(n) if n == key => vec![AbstractCap::MergeMinus(value.clone())],
        CapShape::Input { dir, channel, binder } if channel == key => {
            vec![AbstractCap::Input {
                dir: *dir,
                channel: value.clone(),
                binder: binder.clone(),
            }]
        }
        CapShape::Output { dir, channel, payload } => {
            let mut out = Vec::new();
            if channel == key {
                for vm in values_of(payload) {
                    out.push(AbstractCap::Output {
                        dir: *dir,
                        channel: value.clone(),
                        payload: vm,
                    });
                }
            }
            if payload == key {
                for vn in values_of(channel) {
                    out.push(AbstractCap::Output {
                        dir: *dir,
                        channel: vn,
                        payload: value.clone(),
                    });
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

/// Least (𝒥, ℛ) closed under the generated constraints and the closure
/// conditions. Terminates because the canonical universe is finite and every
/// rule is monotone; deterministic because all iteration follows sorted orders.
pub fn solve(constraints: &ConstraintSet, top: &AmbientId) -> AnalysisResult {
    saturate(constraints, top, true)
}

/// The relations implied by the constraints alone, without the closure
/// conditions: the initial structure of the process (nesting plus the
/// capabilities resolvable through seeded bindings).
pub fn initial_structure(constraints: &ConstraintSet, top: &AmbientId) -> ContentsRelation {
    saturate(constraints, top, false).contents
}

fn saturate(constraints: &ConstraintSet, top: &AmbientId, closures: bool) -> AnalysisResult {
    let mut solver = Solver::new(constraints, top);
    let mut iterations = 0;
    loop {
        iterations += 1;
        solver.changed = false;
        solver.fire_watchers();
        if closures {
            solver.close_once();
        }
        if !solver.changed {
            break;
        }
    }
    AnalysisResult {
        top: top.clone(),
        contents: solver.j,
        bindings: solver.r,
        stats: SolveStats { constraints: constraints.len(), iterations },
    }
}

/// Generate and solve at the distinguished top ambient.
pub fn analyze(p: &Process) -> Result<AnalysisResult, WellFormednessError> {
    let top = AmbientId::Top;
    let constraints = generate_constraints(p, &top)?;
    Ok(solve(&constraints, &top))
}

/// Does one more application of the constraints and closure conditions add
/// nothing? True exactly on fixpoints (idempotence), false on any defect —
/// including after removing a single fact from a least solution (minimality).
pub fn closed_under(result: &AnalysisResult, constraints: &ConstraintSet) -> bool {
    let mut solver = Solver::new(constraints, &result.top);
    // Nested/SelfBinding constraints were applied by `new`; if the result lacks
    // one of those facts it cannot absorb the re-application below.
    solver.j = merged_contents(&solver.j, &result.contents);
    solver.r = merged_bindings(&solver.r, &result.bindings);
    let before = (solver.j.clone(), solver.r.clone());
    if before.0 != result.contents || before.1 != result.bindings {
        return false;
    }
    solver.pending.clear();
    for (name, values) in &result.bindings {
        for value in values {
            solver.pending.push_back((name.clone(), value.clone()));
        }
    }
    solver.changed = false;
    solver.fire_watchers();
    solver.close_once();
    (solver.j, solver.r) == before
}

fn merged_contents(a: &ContentsRelation, b: &ContentsRelation) -> ContentsRelation {
    let mut out = a.clone();
    for (k, items) in b {
        out.entry(k.clone()).or_default().extend(items.iter().cloned());
    }
    out
}

fn merged_bindings(a: &BindingRelation, b: &BindingRelation) -> BindingRelation {
    let mut out = a.clone();
    for (k, values) in b {
        out.entry(k.clone()).or_default().extend(values.iter().cloned());
    }
    out
}

// ---------------------------------------------------------------------------
// Judgment checking
// ---------------------------------------------------------------------------

/// One failed judgment rule at one spot of the term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    /// Which judgment rule failed: `restriction`, `ambient`, or a capability
    /// kind such as `enter` or `output`.
    pub rule: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rule: {}", self.rule, self.detail)
    }
}

/// Every judgment rule `p` breaks against `result` with `star` enclosing.
/// Checked directly, with no solving.
pub fn violations(result: &AnalysisResult, p: &Process, star: &AmbientId) -> Vec<Violation> {
    let mut out = Vec::new();
    judge(result, p, star, &mut out);
    out
}

/// Does `(𝒥, ℛ)` satisfy the judgment of `p` at `star`?
pub fn validate(result: &AnalysisResult, p: &Process, star: &AmbientId) -> bool {
    violations(result, p, star).is_empty()
}

fn judge(result: &AnalysisResult, p: &Process, star: &AmbientId, out: &mut Vec<Violation>) {
    match p {
        Process::Zero | Process::Var(_) => {}
        Process::Restriction(n, body) => {
            let key = n.canonical();
            if !result.binds(&key, &key) {
                out.push(Violation {
                    rule: "restriction",
                    detail: format!("{key} ∉ ℛ({key})"),
                });
            }
            judge(result, body, star, out);
        }
        Process::Ambient(id, body) => {
            if !result.contains(star, id) {
                out.push(Violation {
                    rule: "ambient",
                    detail: format!("{id} ∉ 𝒥({star})"),
                });
            }
            judge(result, body, id, out);
        }
        Process::Prefix(cap, cont) => {
            judge_cap(result, cap, star, out);
            judge(result, cont, star, out);
        }
        Process::Parallel(l, r) | Process::Choice(l, r) => {
            judge(result, l, star, out);
            judge(result, r, star, out);
        }
        Process::Rec(_, body) => judge(result, body, star, out),
    }
}

fn judge_cap(result: &AnalysisResult, cap: &Capability, star: &AmbientId, out: &mut Vec<Violation>) {
    let values = |n: &Name| -> Vec<CanonicalName> {
        result
            .bindings
            .get(&n.canonical())
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default()
    };
    let has = |item: AbstractCap| -> bool {
        result
            .contents
            .get(star)
            .is_some_and(|s| s.contains(&Item::Cap(item)))
    };
    let mut require = |rule: &'static str, item: AbstractCap| {
        if !has(item.clone()) {
            out.push(Violation { rule, detail: format!("{item} ∉ 𝒥({star})") });
        }
    };
    match cap {
        Capability::Enter(n) => {
            for v in values(n) {
                require("enter", AbstractCap::Enter(v));
            }
        }
        Capability::Accept(n) => {
            for v in values(n) {
                require("accept", AbstractCap::Accept(v));
            }
        }
        Capability::Exit(n) => {
            for v in values(n) {
                require("exit", AbstractCap::Exit(v));
            }
        }
        Capability::Expel(n) => {
            for v in values(n) {
                require("expel", AbstractCap::Expel(v));
            }
        }
        Capability::MergePlus(n) => {
            for v in values(n) {
                require("merge+", AbstractCap::MergePlus(v));
            }
        }
        Capability::MergeMinus(n) => {
            for v in values(n) {
                require("merge-", AbstractCap::MergeMinus(v));
            }
        }
        Capability::Output { dir, channel, payload } => {
            for vn in values(channel) {
                for vm in values(payload) {
                    require(
                        "output",
                        AbstractCap::Output {
                            dir: *dir,
                            channel: vn.clone(),
                            payload: vm,
                        },
                    );
                }
            }
        }
        Capability::Input { dir, channel, binder } => {
            for vn in values(channel) {
                require(
                    "input",
                    AbstractCap::Input {
                        dir: *dir,
                        channel: vn,
                        binder: binder.canonical(),
                    },
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ProcVar;
    use crate::fixtures::{parse_ok, CELL_MOL, ENTER_PAIR};
    use crate::semantics::{explore, normalize, step};

    fn top() -> AmbientId {
        AmbientId::Top
    }

    fn amb(s: &str) -> AmbientId {
        AmbientId::label(s)
    }

    /// Canonical name of the unique input binder in `p`.
    fn input_binder(p: &Process) -> CanonicalName {
        fn find(p: &Process, out: &mut Vec<CanonicalName>) {
            match p {
                Process::Prefix(Capability::Input { binder, .. }, k) => {
                    out.push(binder.canonical());
                    find(k, out);
                }
                Process::Prefix(_, k) => find(k, out),
                Process::Restriction(_, b) | Process::Ambient(_, b) | Process::Rec(_, b) => {
                    find(b, out)
                }
                Process::Parallel(l, r) | Process::Choice(l, r) => {
                    find(l, out);
                    find(r, out);
                }
                Process::Zero | Process::Var(_) => {}
            }
        }
        let mut found = Vec::new();
        find(p, &mut found);
        assert_eq!(found.len(), 1, "expected exactly one input binder");
        found.pop().unwrap()
    }

    /// Canonical name of the unique output payload in `p`.
    fn output_payload(p: &Process) -> CanonicalName {
        fn find(p: &Process, out: &mut Vec<CanonicalName>) {
            match p {
                Process::Prefix(Capability::Output { payload, .. }, k) => {
                    out.push(payload.canonical());
                    find(k, out);
                }
                Process::Prefix(_, k) => find(k, out),
                Process::Restriction(_, b) | Process::Ambient(_, b) | Process::Rec(_, b) => {
                    find(b, out)
                }
                Process::Parallel(l, r) | Process::Choice(l, r) => {
                    find(l, out);
                    find(r, out);
                }
                Process::Zero | Process::Var(_) => {}
            }
        }
        let mut found = Vec::new();
        find(p, &mut found);
        assert_eq!(found.len(), 1, "expected exactly one output");
        found.pop().unwrap()
    }

    #[test]
    fn zero_analyzes_to_seeded_structure_only() {
        let result = analyze(&Process::Zero).unwrap();
        assert_eq!(result.contents.len(), 1);
        assert!(result.contents[&top()].is_empty());
        assert!(result.bindings.is_empty());
    }

    #[test]
    fn single_ambient_constraints() {
        let p = parse_ok("[enter n. 0]^a");
        let constraints = generate_constraints(&p, &top()).unwrap();
        assert_eq!(constraints.len(), 3);
        assert!(constraints.contains(&Constraint::Nested { parent: top(), child: amb("a") }));
        assert!(constraints.contains(&Constraint::SelfBinding(CanonicalName::free("n"))));
        assert!(constraints.contains(&Constraint::CapAt {
            star: amb("a"),
            shape: CapShape::Enter(CanonicalName::free("n")),
        }));
    }

    #[test]
    fn enter_pair_derives_containment() {
        let result = analyze(&parse_ok(ENTER_PAIR)).unwrap();
        assert!(result.contains(&top(), &amb("a")));
        assert!(result.contains(&top(), &amb("b")));
        assert!(result.contains(&amb("b"), &amb("a")));
        assert!(!result.contains(&amb("a"), &amb("b")));
        let pairs = result.ambient_pairs();
        assert_eq!(pairs.len(), 3);
    }

    #[test]
    fn local_communication_binds_payload() {
        let p = parse_ok("n!{m}. 0 | n?{p}. 0");
        let result = analyze(&p).unwrap();
        let binder = input_binder(&p);
        assert!(result.binds(&binder, &CanonicalName::free("m")));
        // The semantics agrees: the step substitutes m for p.
        assert_eq!(step(&p).len(), 1);
    }

    #[test]
    fn direction_mismatch_binds_nothing() {
        // A down-output never pairs with a local or sibling input.
        for src in ["n!v{m}. 0 | n?{p}. 0", "n!v{m}. 0 | [n?#{p}. 0]^a"] {
            let p = parse_ok(src);
            let result = analyze(&p).unwrap();
            let binder = input_binder(&p);
            assert!(
                !result.bindings.contains_key(&binder),
                "{src}: {:?}",
                result.bindings
            );
        }
    }

    #[test]
    fn cell_mol_positive_facts() {
        let p = parse_ok(CELL_MOL);
        let result = analyze(&p).unwrap();
        let cell = amb("cell");
        let mol = amb("mol");
        let d = amb("D");
        assert!(result.contains(&cell, &mol), "mol ∈ 𝒥(cell)");
        assert!(result.contains(&cell, &d), "D ∈ 𝒥(cell)");
        assert!(result.contains(&mol, &d), "D ∈ 𝒥(mol)");
        assert!(result.contains(&top(), &mol), "mol ∈ 𝒥(⊤)");
        assert!(result.contains(&top(), &cell), "cell ∈ 𝒥(⊤)");
        // The name sent on c reaches the receiving binder.
        let x = input_binder(&p);
        let cell3 = output_payload(&p);
        assert!(result.binds(&x, &cell3), "⌊cell3⌋ ∈ ℛ(⌊x⌋)");
    }

    #[test]
    fn cell_mol_negative_facts() {
        let result = analyze(&parse_ok(CELL_MOL)).unwrap();
        assert!(!result.contains(&amb("mol"), &amb("cell")), "no cell ∈ 𝒥(mol)");
        assert!(!result.contains(&amb("D"), &amb("cell")), "no cell ∈ 𝒥(D)");
    }

    #[test]
    fn analysis_is_alpha_invariant() {
        let p = parse_ok("(n) n!{n}. 0 | c?{x}. x!{x}. 0");
        let q = parse_ok("(zz) zz!{zz}. 0 | c?{w}. w!{w}. 0");
        assert_eq!(analyze(&p).unwrap(), analyze(&q).unwrap());
    }

    #[test]
    fn flow_insensitive_to_prefix_order() {
        let a = analyze(&parse_ok("[enter a. exit b. 0]^x | c!{c}. 0")).unwrap();
        let b = analyze(&parse_ok("[exit b. enter a. 0]^x | c!{c}. 0")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn open_terms_are_rejected() {
        let open = Process::Var(ProcVar { text: "X".into(), site: crate::ast::NameSite::Free });
        assert!(analyze(&open).is_err());
    }

    #[test]
    fn validate_accepts_own_analysis() {
        for src in [CELL_MOL, ENTER_PAIR, "n!{m}. 0 | n?{p}. p!{p}. 0"] {
            let p = parse_ok(src);
            let result = analyze(&p).unwrap();
            assert!(validate(&result, &p, &top()), "{src}");
        }
    }

    #[test]
    fn validate_rejects_missing_ambient() {
        let p = parse_ok("[0]^a");
        let empty = AnalysisResult {
            top: top(),
            contents: ContentsRelation::new(),
            bindings: BindingRelation::new(),
            stats: SolveStats { constraints: 0, iterations: 0 },
        };
        let found = violations(&empty, &p, &top());
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].rule, "ambient");
    }

    #[test]
    fn analysis_survives_reduction() {
        // The theorem, checked directly here on the richest fixture.
        let p = parse_ok(CELL_MOL);
        let result = analyze(&p).unwrap();
        let space = explore(&p, 6, 10_000);
        assert!(!space.truncated);
        for state in &space.states {
            let bad = violations(&result, state, &top());
            assert!(bad.is_empty(), "state {state}: {bad:?}");
        }
    }

    #[test]
    fn fixpoint_is_idempotent() {
        for src in [CELL_MOL, ENTER_PAIR, "n!{m}. 0 | n?{p}. p!{p}. 0"] {
            let p = parse_ok(src);
            let constraints = generate_constraints(&p, &top()).unwrap();
            let result = solve(&constraints, &top());
            assert!(closed_under(&result, &constraints), "{src}");
        }
    }

    #[test]
    fn solution_is_minimal_on_small_terms() {
        // Dropping any single fact from the least solution breaks closure.
        for src in [
            ENTER_PAIR,
            "[[exit n. 0]^a | expel n. 0]^b",
            "[merge+ n. 0]^a | [merge- n. 0]^b",
            "n!{m}. 0 | n?{p}. 0",
            "[n!^{m}. 0]^a | n?v{p}. 0",
        ] {
            let p = parse_ok(src);
            let constraints = generate_constraints(&p, &top()).unwrap();
            let result = solve(&constraints, &top());
            for (parent, items) in &result.contents {
                for item in items {
                    let mut poked = result.clone();
                    poked.contents.get_mut(parent).unwrap().remove(item);
                    assert!(
                        !closed_under(&poked, &constraints),
                        "{src}: dropping {item} from 𝒥({parent}) went unnoticed"
                    );
                }
            }
            for (name, values) in &result.bindings {
                for value in values {
                    let mut poked = result.clone();
                    poked.bindings.get_mut(name).unwrap().remove(value);
                    assert!(
                        !closed_under(&poked, &constraints),
                        "{src}: dropping {value} from ℛ({name}) went unnoticed"
                    );
                }
            }
        }
    }

    #[test]
    fn merge_flows_all_contents() {
        let p = parse_ok("[merge+ n. 0]^a | [merge- n. c!{c}. 0 | [0]^inner]^b");
        let result = analyze(&p).unwrap();
        assert!(result.contains(&amb("a"), &amb("inner")));
        // The minus side's capabilities flow too.
        let flowed = result.contents[&amb("a")]
            .iter()
            .any(|i| matches!(i, Item::Cap(AbstractCap::Output { .. })));
        assert!(flowed);
    }

    #[test]
    fn initial_structure_misses_derived_facts() {
        let p = parse_ok(ENTER_PAIR);
        let constraints = generate_constraints(&p, &top()).unwrap();
        let base = initial_structure(&constraints, &top());
        assert!(!base[&amb("b")].contains(&Item::Amb(amb("a"))));
        assert!(base[&top()].contains(&Item::Amb(amb("a"))));
        let full = solve(&constraints, &top());
        assert!(full.contents[&amb("b")].contains(&Item::Amb(amb("a"))));
    }

    #[test]
    fn determinism_across_runs() {
        let p = parse_ok(CELL_MOL);
        let a = analyze(&p).unwrap();
        let b = analyze(&p).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.stats.iterations, b.stats.iterations);
    }

    #[test]
    fn binder_identity_is_site_based() {
        // Two inputs with the same spelling are distinct binders.
        let p = parse_ok("a?{x}. 0 | b?{x}. 0 | a!{m}. 0 | b!{k}. 0");
        let result = analyze(&p).unwrap();
        let mut binder_keys: Vec<CanonicalName> = result
            .bindings
            .keys()
            .filter(|k| matches!(k, CanonicalName::Bound(_)))
            .cloned()
            .collect();
        binder_keys.sort();
        assert_eq!(binder_keys.len(), 2);
        let first = &binder_keys[0];
        let second = &binder_keys[1];
        assert!(result.binds(first, &CanonicalName::free("m")));
        assert!(!result.binds(first, &CanonicalName::free("k")));
        assert!(result.binds(second, &CanonicalName::free("k")));
    }

    #[test]
    fn rec_body_constraints_count_once() {
        let p = parse_ok("rec X. enter n. X");
        let constraints = generate_constraints(&p, &top()).unwrap();
        // SelfBinding(n) + one capability constraint: the recursion adds nothing.
        assert_eq!(constraints.len(), 2);
        let result = analyze(&p).unwrap();
        assert!(validate(&result, &p, &top()));
        if let Some(unfolded) = crate::semantics::unfold_once(&p) {
            assert!(validate(&result, &normalize(&unfolded), &top()));
        }
    }
}
