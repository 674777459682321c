//! Process terms and names. Name identity is carried by binder sites, so canonical
//! names and capture-free substitution fall out of the representation.

use std::collections::BTreeSet;
use std::fmt;

/// Identity of one binding occurrence (a restriction binder, an input binder, or a
/// `rec` binder). Allocated once by an [`IdGen`] and never reassigned afterwards:
/// alpha-renaming changes spelling, not the site.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BinderId(pub u32);

/// Where a name occurrence gets its identity: from a binder, or from its own text.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum NameSite {
    /// No enclosing binder introduced this name; its text is its identity.
    Free,
    /// Introduced by the binder with this id.
    Bound(BinderId),
}

/// A channel-name occurrence. Two occurrences are the same name iff both their text
/// and their site agree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Name {
    pub text: String,
    pub site: NameSite,
}

impl Name {
    pub fn free(text: impl Into<String>) -> Self {
        Name { text: text.into(), site: NameSite::Free }
    }

    pub fn bound(text: impl Into<String>, id: BinderId) -> Self {
        Name { text: text.into(), site: NameSite::Bound(id) }
    }

    /// The spelling-independent identity of this name.
    pub fn canonical(&self) -> CanonicalName {
        match self.site {
            NameSite::Free => CanonicalName::Free(self.text.clone()),
            NameSite::Bound(id) => CanonicalName::Bound(id),
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Identity of a name up to alpha-renaming: free names collapse to their text, bound
/// names to their binder site. All occurrences introduced by one binder share one
/// canonical name, even across the copies made by recursion unfolding.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CanonicalName {
    Free(String),
    Bound(BinderId),
}

impl CanonicalName {
    pub fn free(text: impl Into<String>) -> Self {
        CanonicalName::Free(text.into())
    }
}

impl fmt::Display for CanonicalName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonicalName::Free(text) => f.write_str(text),
            CanonicalName::Bound(id) => write!(f, "#{}", id.0),
        }
    }
}

/// A process-identifier occurrence (`X` in `rec X. P`). Process identifiers live in
/// their own namespace, disjoint from channel names, and use the same site-based
/// identity discipline.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ProcVar {
    pub text: String,
    pub site: NameSite,
}

impl ProcVar {
    pub fn free(text: impl Into<String>) -> Self {
        ProcVar { text: text.into(), site: NameSite::Free }
    }

    pub fn bound(text: impl Into<String>, id: BinderId) -> Self {
        ProcVar { text: text.into(), site: NameSite::Bound(id) }
    }
}

impl fmt::Display for ProcVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// An ambient identity. Labels are annotations: they are never communicated,
/// restricted, or substituted, and distinct ambients may share a label. The
/// distinguished [`AmbientId::Top`] stands for the implicit outermost region and
/// cannot be written in source programs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum AmbientId {
    Top,
    Label(String),
}

impl AmbientId {
    pub fn label(text: impl Into<String>) -> Self {
        AmbientId::Label(text.into())
    }
}

impl fmt::Display for AmbientId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmbientId::Top => f.write_str("⊤"),
            AmbientId::Label(text) => f.write_str(text),
        }
    }
}

/// Direction of a communication prefix. `Down` appears only on the parent side of a
/// parent/child exchange, `Up` only on the child side; `Local` pairs within one
/// region and `Sibling` across two ambients sharing a parent.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Direction {
    Local,
    Down,
    Up,
    Sibling,
}

impl Direction {
    /// The concrete-syntax mark written between `!`/`?` and the payload braces.
    pub fn mark(self) -> &'static str {
        match self {
            Direction::Local => "",
            Direction::Down => "v",
            Direction::Up => "^",
            Direction::Sibling => "#",
        }
    }
}

/// A capability prefix: the guard of `M. P`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Capability {
    Enter(Name),
    Accept(Name),
    Exit(Name),
    Expel(Name),
    MergePlus(Name),
    MergeMinus(Name),
    Output { dir: Direction, channel: Name, payload: Name },
    /// The binder is a binding occurrence scoping over the prefix's continuation.
    Input { dir: Direction, channel: Name, binder: Name },
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capability::Enter(n) => write!(f, "enter {n}"),
            Capability::Accept(n) => write!(f, "accept {n}"),
            Capability::Exit(n) => write!(f, "exit {n}"),
            Capability::Expel(n) => write!(f, "expel {n}"),
            Capability::MergePlus(n) => write!(f, "merge+ {n}"),
            Capability::MergeMinus(n) => write!(f, "merge- {n}"),
            Capability::Output { dir, channel, payload } => {
                write!(f, "{channel}!{}{{{payload}}}", dir.mark())
            }
            Capability::Input { dir, channel, binder } => {
                write!(f, "{channel}?{}{{{binder}}}", dir.mark())
            }
        }
    }
}

/// A process term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Process {
    Zero,
    /// `(n) P` — n is the binding occurrence, scoping over all of `P`.
    Restriction(Name, Box<Process>),
    /// `[P]^id`
    Ambient(AmbientId, Box<Process>),
    /// `M. P`
    Prefix(Capability, Box<Process>),
    Parallel(Box<Process>, Box<Process>),
    Choice(Box<Process>, Box<Process>),
    /// `rec X. P`
    Rec(ProcVar, Box<Process>),
    Var(ProcVar),
}

impl Process {
    pub fn restriction(n: Name, p: Process) -> Self {
        Process::Restriction(n, Box::new(p))
    }

    pub fn ambient(id: AmbientId, p: Process) -> Self {
        Process::Ambient(id, Box::new(p))
    }

    pub fn prefix(cap: Capability, p: Process) -> Self {
        Process::Prefix(cap, Box::new(p))
    }

    pub fn parallel(l: Process, r: Process) -> Self {
        Process::Parallel(Box::new(l), Box::new(r))
    }

    pub fn choice(l: Process, r: Process) -> Self {
        Process::Choice(Box::new(l), Box::new(r))
    }

    pub fn rec(v: ProcVar, p: Process) -> Self {
        Process::Rec(v, Box::new(p))
    }
}

/// Allocator for binder sites. Name binders and process-identifier binders draw from
/// separate counters, so restriction/input sites stay dense in parse order.
#[derive(Clone, Debug, Default)]
pub struct IdGen {
    next_name: u32,
    next_proc: u32,
}

impl IdGen {
    pub fn new() -> Self {
        IdGen::default()
    }

    pub fn name_binder(&mut self) -> BinderId {
        let id = BinderId(self.next_name);
        self.next_name += 1;
        id
    }

    pub fn proc_binder(&mut self) -> BinderId {
        let id = BinderId(self.next_proc);
        self.next_proc += 1;
        id
    }
}

/// The names with no enclosing binder in `p`.
pub fn free_names(p: &Process) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    collect_free(p, &mut bound, &mut out);
    out
}

fn collect_free(p: &Process, bound: &mut Vec<NameSite>, out: &mut BTreeSet<Name>) {
    let note = |n: &Name, bound: &Vec<NameSite>, out: &mut BTreeSet<Name>| {
        let is_bound = matches!(n.site, NameSite::Bound(_)) && bound.contains(&n.site);
        if !is_bound {
            out.insert(n.clone());
        }
    };
    match p {
        Process::Zero | Process::Var(_) => {}
        Process::Restriction(n, body) => {
            bound.push(n.site);
            collect_free(body, bound, out);
            bound.pop();
        }
        Process::Ambient(_, body) | Process::Rec(_, body) => collect_free(body, bound, out),
        Process::Prefix(cap, cont) => match cap {
            Capability::Enter(n)
            | Capability::Accept(n)
            | Capability::Exit(n)
            | Capability::Expel(n)
            | Capability::MergePlus(n)
            | Capability::MergeMinus(n) => {
                note(n, bound, out);
                collect_free(cont, bound, out);
            }
            Capability::Output { channel, payload, .. } => {
                note(channel, bound, out);
                note(payload, bound, out);
                collect_free(cont, bound, out);
            }
            Capability::Input { channel, binder, .. } => {
                note(channel, bound, out);
                bound.push(binder.site);
                collect_free(cont, bound, out);
                bound.pop();
            }
        },
        Process::Parallel(l, r) | Process::Choice(l, r) => {
            collect_free(l, bound, out);
            collect_free(r, bound, out);
        }
    }
}

/// The canonical name of every name occurrence in `p`, binding occurrences included,
/// in preorder. Alpha-variant terms produce identical sequences.
pub fn canonical_occurrences(p: &Process) -> Vec<CanonicalName> {
    let mut out = Vec::new();
    collect_canonical(p, &mut out);
    out
}

fn collect_canonical(p: &Process, out: &mut Vec<CanonicalName>) {
    match p {
        Process::Zero | Process::Var(_) => {}
        Process::Restriction(n, body) => {
            out.push(n.canonical());
            collect_canonical(body, out);
        }
        Process::Ambient(_, body) | Process::Rec(_, body) => collect_canonical(body, out),
        Process::Prefix(cap, cont) => {
            match cap {
                Capability::Enter(n)
                | Capability::Accept(n)
                | Capability::Exit(n)
                | Capability::Expel(n)
                | Capability::MergePlus(n)
                | Capability::MergeMinus(n) => out.push(n.canonical()),
                Capability::Output { channel, payload, .. } => {
                    out.push(channel.canonical());
                    out.push(payload.canonical());
                }
                Capability::Input { channel, binder, .. } => {
                    out.push(channel.canonical());
                    out.push(binder.canonical());
                }
            }
            collect_canonical(cont, out);
        }
        Process::Parallel(l, r) | Process::Choice(l, r) => {
            collect_canonical(l, out);
            collect_canonical(r, out);
        }
    }
}

/// True iff `variable` occurs free in `p`. A binder equal to `variable` (same text
/// and site, as produced by recursion unfolding) shadows the subterm below it.
fn occurs_free(p: &Process, variable: &Name) -> bool {
    match p {
        Process::Zero | Process::Var(_) => false,
        Process::Restriction(n, body) => n != variable && occurs_free(body, variable),
        Process::Ambient(_, body) | Process::Rec(_, body) => occurs_free(body, variable),
        Process::Prefix(cap, cont) => match cap {
            Capability::Enter(n)
            | Capability::Accept(n)
            | Capability::Exit(n)
            | Capability::Expel(n)
            | Capability::MergePlus(n)
            | Capability::MergeMinus(n) => n == variable || occurs_free(cont, variable),
            Capability::Output { channel, payload, .. } => {
                channel == variable || payload == variable || occurs_free(cont, variable)
            }
            Capability::Input { channel, binder, .. } => {
                channel == variable || (binder != variable && occurs_free(cont, variable))
            }
        },
        Process::Parallel(l, r) | Process::Choice(l, r) => {
            occurs_free(l, variable) || occurs_free(r, variable)
        }
    }
}

fn collect_texts(p: &Process, out: &mut BTreeSet<String>) {
    let mut each = |n: &Name| {
        out.insert(n.text.clone());
    };
    match p {
        Process::Zero | Process::Var(_) => {}
        Process::Restriction(n, body) => {
            each(n);
            collect_texts(body, out);
        }
        Process::Ambient(_, body) | Process::Rec(_, body) => collect_texts(body, out),
        Process::Prefix(cap, cont) => {
            match cap {
                Capability::Enter(n)
                | Capability::Accept(n)
                | Capability::Exit(n)
                | Capability::Expel(n)
                | Capability::MergePlus(n)
                | Capability::MergeMinus(n) => each(n),
                Capability::Output { channel, payload, .. } => {
                    each(channel);
                    each(payload);
                }
                Capability::Input { channel, binder, .. } => {
                    each(channel);
                    each(binder);
                }
            }
            collect_texts(cont, out);
        }
        Process::Parallel(l, r) | Process::Choice(l, r) => {
            collect_texts(l, out);
            collect_texts(r, out);
        }
    }
}

/// Rename the spelling of every occurrence belonging to binder `site` within `p` to
/// `new_text`, keeping sites untouched. Stops at a nested binder for the same site:
/// occurrences below it belong to that copy.
fn rename_site_text(p: &Process, site: NameSite, new_text: &str) -> Process {
    let ren = |n: &Name| {
        if n.site == site {
            Name { text: new_text.to_string(), site: n.site }
        } else {
            n.clone()
        }
    };
    match p {
        Process::Zero | Process::Var(_) => p.clone(),
        Process::Restriction(n, body) => {
            if n.site == site {
                p.clone()
            } else {
                Process::restriction(n.clone(), rename_site_text(body, site, new_text))
            }
        }
        Process::Ambient(id, body) => {
            Process::ambient(id.clone(), rename_site_text(body, site, new_text))
        }
        Process::Rec(v, body) => Process::rec(v.clone(), rename_site_text(body, site, new_text)),
        Process::Prefix(cap, cont) => {
            let (cap, stop) = match cap {
                Capability::Enter(n) => (Capability::Enter(ren(n)), false),
                Capability::Accept(n) => (Capability::Accept(ren(n)), false),
                Capability::Exit(n) => (Capability::Exit(ren(n)), false),
                Capability::Expel(n) => (Capability::Expel(ren(n)), false),
                Capability::MergePlus(n) => (Capability::MergePlus(ren(n)), false),
                Capability::MergeMinus(n) => (Capability::MergeMinus(ren(n)), false),
                Capability::Output { dir, channel, payload } => (
                    Capability::Output { dir: *dir, channel: ren(channel), payload: ren(payload) },
                    false,
                ),
                Capability::Input { dir, channel, binder } => (
                    Capability::Input { dir: *dir, channel: ren(channel), binder: binder.clone() },
                    binder.site == site,
                ),
            };
            let cont = if stop { (**cont).clone() } else { rename_site_text(cont, site, new_text) };
            Process::Prefix(cap, Box::new(cont))
        }
        Process::Parallel(l, r) => Process::parallel(
            rename_site_text(l, site, new_text),
            rename_site_text(r, site, new_text),
        ),
        Process::Choice(l, r) => Process::choice(
            rename_site_text(l, site, new_text),
            rename_site_text(r, site, new_text),
        ),
    }
}

/// Replace every free occurrence of `variable` in `p` by `value`.
///
/// Sites make the replacement capture-free by construction; in addition, any binder
/// spelled like `value` that would textually capture an inserted occurrence is
/// re-spelled (keeping its site), so the printed form of the result still reads
/// correctly.
pub fn substitute(p: &Process, value: &Name, variable: &Name) -> Process {
    if !occurs_free(p, variable) {
        return p.clone();
    }
    let mut used = BTreeSet::new();
    collect_texts(p, &mut used);
    used.insert(value.text.clone());
    used.insert(variable.text.clone());
    subst(p, value, variable, &mut used)
}

fn fresh_text(base: &str, used: &mut BTreeSet<String>) -> String {
    let mut k = 2u32;
    loop {
        let candidate = format!("{base}{k}");
        if used.insert(candidate.clone()) {
            return candidate;
        }
        k += 1;
    }
}

fn subst(p: &Process, value: &Name, variable: &Name, used: &mut BTreeSet<String>) -> Process {
    let repl = |n: &Name| if n == variable { value.clone() } else { n.clone() };
    // Rename a binder that would textually capture inserted occurrences of `value`.
    let needs_rename = |binder: &Name, scope: &Process| {
        binder.text == value.text && binder.site != value.site && occurs_free(scope, variable)
    };
    match p {
        Process::Zero | Process::Var(_) => p.clone(),
        Process::Restriction(n, body) => {
            if n == variable {
                p.clone()
            } else if needs_rename(n, body) {
                let text = fresh_text(&n.text, used);
                let body = rename_site_text(body, n.site, &text);
                let n = Name { text, site: n.site };
                Process::restriction(n, subst(&body, value, variable, used))
            } else {
                Process::restriction(n.clone(), subst(body, value, variable, used))
            }
        }
        Process::Ambient(id, body) => {
            Process::ambient(id.clone(), subst(body, value, variable, used))
        }
        Process::Rec(v, body) => Process::rec(v.clone(), subst(body, value, variable, used)),
        Process::Prefix(cap, cont) => match cap {
            Capability::Enter(n) => {
                Process::prefix(Capability::Enter(repl(n)), subst(cont, value, variable, used))
            }
            Capability::Accept(n) => {
                Process::prefix(Capability::Accept(repl(n)), subst(cont, value, variable, used))
            }
            Capability::Exit(n) => {
                Process::prefix(Capability::Exit(repl(n)), subst(cont, value, variable, used))
            }
            Capability::Expel(n) => {
                Process::prefix(Capability::Expel(repl(n)), subst(cont, value, variable, used))
            }
            Capability::MergePlus(n) => {
                Process::prefix(Capability::MergePlus(repl(n)), subst(cont, value, variable, used))
            }
            Capability::MergeMinus(n) => {
                Process::prefix(Capability::MergeMinus(repl(n)), subst(cont, value, variable, used))
            }
            Capability::Output { dir, channel, payload } => Process::prefix(
                Capability::Output { dir: *dir, channel: repl(channel), payload: repl(payload) },
                subst(cont, value, variable, used),
            ),
            Capability::Input { dir, channel, binder } => {
                let channel = repl(channel);
                if binder == variable {
                    Process::prefix(
                        Capability::Input { dir: *dir, channel, binder: binder.clone() },
                        (**cont).clone(),
                    )
                } else if needs_rename(binder, cont) {
                    let text = fresh_text(&binder.text, used);
                    let cont = rename_site_text(cont, binder.site, &text);
                    let binder = Name { text, site: binder.site };
                    Process::prefix(
                        Capability::Input { dir: *dir, channel, binder },
                        subst(&cont, value, variable, used),
                    )
                } else {
                    Process::prefix(
                        Capability::Input { dir: *dir, channel, binder: binder.clone() },
                        subst(cont, value, variable, used),
                    )
                }
            }
        },
        Process::Parallel(l, r) => Process::parallel(
            subst(l, value, variable, used),
            subst(r, value, variable, used),
        ),
        Process::Choice(l, r) => Process::choice(
            subst(l, value, variable, used),
            subst(r, value, variable, used),
        ),
    }
}

/// Replace every free occurrence of the process identifier `var` in `p` by `value`.
/// Identity is site-based, so no capture is possible; spellings are left alone and
/// the printer re-spells binders if it ever has to.
pub(crate) fn substitute_proc(p: &Process, value: &Process, var: &ProcVar) -> Process {
    match p {
        Process::Zero => Process::Zero,
        Process::Var(v) => {
            if v == var {
                value.clone()
            } else {
                p.clone()
            }
        }
        Process::Rec(v, body) => {
            if v == var {
                p.clone()
            } else {
                Process::rec(v.clone(), substitute_proc(body, value, var))
            }
        }
        Process::Restriction(n, body) => {
            Process::restriction(n.clone(), substitute_proc(body, value, var))
        }
        Process::Ambient(id, body) => {
            Process::ambient(id.clone(), substitute_proc(body, value, var))
        }
        Process::Prefix(cap, cont) => {
            Process::prefix(cap.clone(), substitute_proc(cont, value, var))
        }
        Process::Parallel(l, r) => {
            Process::parallel(substitute_proc(l, value, var), substitute_proc(r, value, var))
        }
        Process::Choice(l, r) => {
            Process::choice(substitute_proc(l, value, var), substitute_proc(r, value, var))
        }
    }
}

/// Structural equality up to the choice of bound spellings and binder-site numbers.
/// Free names must agree on text; ambient labels, capability kinds, and directions
/// must match exactly.
pub fn alpha_equal(p: &Process, q: &Process) -> bool {
    let mut names = Vec::new();
    let mut procs = Vec::new();
    alpha_eq(p, q, &mut names, &mut procs)
}

type PairEnv = Vec<(NameSite, NameSite)>;

fn sites_correspond(a: NameSite, b: NameSite, env: &PairEnv) -> bool {
    for (l, r) in env.iter().rev() {
        let la = *l == a;
        let rb = *r == b;
        if la || rb {
            return la && rb;
        }
    }
    // Neither side is bound within the compared terms.
    a == b || matches!((a, b), (NameSite::Free, NameSite::Free))
}

fn name_eq(a: &Name, b: &Name, env: &PairEnv) -> bool {
    match (a.site, b.site) {
        (NameSite::Free, NameSite::Free) => a.text == b.text,
        _ => sites_correspond(a.site, b.site, env),
    }
}

fn bind_pair(a: NameSite, b: NameSite, env: &mut PairEnv) -> bool {
    match (a, b) {
        (NameSite::Bound(_), NameSite::Bound(_)) => {
            env.push((a, b));
            true
        }
        // Degenerate hand-built binders with no site bind nothing; texts must agree.
        (NameSite::Free, NameSite::Free) => true,
        _ => false,
    }
}

fn cap_eq(a: &Capability, b: &Capability, env: &PairEnv) -> Option<Option<(NameSite, NameSite)>> {
    use Capability::*;
    match (a, b) {
        (Enter(x), Enter(y))
        | (Accept(x), Accept(y))
        | (Exit(x), Exit(y))
        | (Expel(x), Expel(y))
        | (MergePlus(x), MergePlus(y))
        | (MergeMinus(x), MergeMinus(y)) => name_eq(x, y, env).then_some(None),
        (
            Output { dir: d1, channel: c1, payload: m1 },
            Output { dir: d2, channel: c2, payload: m2 },
        ) => (d1 == d2 && name_eq(c1, c2, env) && name_eq(m1, m2, env)).then_some(None),
        (
            Input { dir: d1, channel: c1, binder: b1 },
            Input { dir: d2, channel: c2, binder: b2 },
        ) => {
            // Binder spellings are irrelevant; the continuation is compared under
            // the paired sites.
            if d1 == d2 && name_eq(c1, c2, env) {
                Some(Some((b1.site, b2.site)))
            } else {
                None
            }
        }
        _ => None,
    }
}

fn alpha_eq(p: &Process, q: &Process, names: &mut PairEnv, procs: &mut PairEnv) -> bool {
    match (p, q) {
        (Process::Zero, Process::Zero) => true,
        (Process::Restriction(n1, b1), Process::Restriction(n2, b2)) => {
            let depth = names.len();
            if !bind_pair(n1.site, n2.site, names) {
                return false;
            }
            let ok = alpha_eq(b1, b2, names, procs);
            names.truncate(depth);
            ok
        }
        (Process::Ambient(i1, b1), Process::Ambient(i2, b2)) => {
            i1 == i2 && alpha_eq(b1, b2, names, procs)
        }
        (Process::Prefix(c1, k1), Process::Prefix(c2, k2)) => match cap_eq(c1, c2, names) {
            None => false,
            Some(None) => alpha_eq(k1, k2, names, procs),
            Some(Some((s1, s2))) => {
                let depth = names.len();
                if !bind_pair(s1, s2, names) {
                    return false;
                }
                let ok = alpha_eq(k1, k2, names, procs);
                names.truncate(depth);
                ok
            }
        },
        (Process::Parallel(l1, r1), Process::Parallel(l2, r2))
        | (Process::Choice(l1, r1), Process::Choice(l2, r2)) => {
            alpha_eq(l1, l2, names, procs) && alpha_eq(r1, r2, names, procs)
        }
        (Process::Rec(v1, b1), Process::Rec(v2, b2)) => {
            let depth = procs.len();
            if !bind_pair(v1.site, v2.site, procs) {
                return false;
            }
            let ok = alpha_eq(b1, b2, names, procs);
            procs.truncate(depth);
            ok
        }
        (Process::Var(v1), Process::Var(v2)) => match (v1.site, v2.site) {
            (NameSite::Free, NameSite::Free) => v1.text == v2.text,
            _ => sites_correspond(v1.site, v2.site, procs),
        },
        _ => false,
    }
}
