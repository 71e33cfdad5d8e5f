//! Rewriting moves on singular patterns and the normalization drivers.
//!
//! Atomic moves:
//!
//! - [`Move::CreateCuspPair`]: birth of a matching pair of cusps on a fold arc
//!   (swallow's tail homotopy), `+2` cusps.
//! - [`Move::EliminateMatchingPair`]: removal of a matching pair with the four
//!   abutting fold arcs reconnected pairwise by absolute index, `−2` cusps.
//! - [`Move::ToggleParity`]: flips the cusp parity of a component in even
//!   dimension by adding one cusp to it and one cusp on a new circle, `+2`.
//! - [`Move::MergeComponents`]: a pair creation on each of two components
//!   followed by eliminating across, leaving one joined component, `+2`.
//!
//! References to arcs and cusps are ordinals within a component: the `k`-th
//! arc sits at sequence position `2k`, the `k`-th cusp at `2k + 1`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariants::{chi_plus_sigma, SignAssignment};
use crate::morse_model::{alternating_count, parity_sign};
use crate::singular_pattern::{Component, ComponentKind, Cusp, Element, FoldArc, PatternError, SingularPattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CuspRef {
    pub component: usize,
    pub cusp: usize,
}

impl CuspRef {
    pub fn new(component: usize, cusp: usize) -> Self {
        Self { component, cusp }
    }
}

/// How the four fold ends left by an elimination are rejoined.
///
/// `Split` joins the left end of the first cusp to the right end of the
/// second and vice versa; on a single component this cuts off a piece.
/// `Stay` joins left to left and right to right; on a single component the
/// component stays connected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reconnection {
    Split,
    Stay,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Move {
    CreateCuspPair {
        component: usize,
        arc: usize,
        i: i64,
        #[serde(default)]
        reversed: bool,
    },
    EliminateMatchingPair {
        first: CuspRef,
        second: CuspRef,
        reconnection: Reconnection,
        #[serde(default)]
        assume_removable: bool,
    },
    ToggleParity {
        component: usize,
        arc: usize,
    },
    MergeComponents {
        first: usize,
        first_arc: usize,
        second: usize,
        second_arc: usize,
        #[serde(default)]
        flip_second: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveTrace {
    pub initial: SingularPattern,
    pub moves: Vec<Move>,
    #[serde(rename = "final")]
    pub final_pattern: SingularPattern,
}

impl MoveTrace {
    pub fn empty(p: &SingularPattern) -> Self {
        Self { initial: p.clone(), moves: Vec::new(), final_pattern: p.clone() }
    }

    pub fn replay(&self) -> Result<SingularPattern, MoveError> {
        let mut p = self.initial.clone();
        for m in &self.moves {
            p = apply_move(&p, m)?;
        }
        Ok(p)
    }

    /// Replays the moves and compares with the recorded final pattern.
    pub fn verify(&self) -> bool {
        self.replay().map(|p| p == self.final_pattern).unwrap_or(false)
    }

    fn push(&mut self, m: Move) -> Result<(), MoveError> {
        self.final_pattern = apply_move(&self.final_pattern, &m)?;
        self.moves.push(m);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionKind {
    ParityMismatch,
    SignSumNonzero,
}

/// The violated relation `lhs ≡ rhs (mod modulus)`, or `lhs = rhs` when
/// `modulus` is absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub lhs: i64,
    pub rhs: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signed_sum: Option<i64>,
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeOutcome {
    Normalized(MoveTrace),
    Obstructed(Obstruction),
}

impl NormalizeOutcome {
    pub fn trace(&self) -> Option<&MoveTrace> {
        match self {
            NormalizeOutcome::Normalized(t) => Some(t),
            NormalizeOutcome::Obstructed(_) => None,
        }
    }

    pub fn obstruction(&self) -> Option<&Obstruction> {
        match self {
            NormalizeOutcome::Obstructed(o) => Some(o),
            NormalizeOutcome::Normalized(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("no component {0}")]
    NoSuchComponent(usize),
    #[error("component {component} has no arc {arc}")]
    NoSuchArc { component: usize, arc: usize },
    #[error("component {} has no cusp {}", .0.component, .0.cusp)]
    NoSuchCusp(CuspRef),
    #[error("index i = {i} outside [0, {max}]")]
    IndexOutOfRange { i: i64, max: i64 },
    #[error("arc has tau {found}, index i = {i} needs tau {expected}")]
    ArcIndexMismatch { i: i64, expected: i64, found: i64 },
    #[error("cusps with I = {first} and I = {second} are not a matching pair in dimension {n}")]
    NotMatching { first: i64, second: i64, n: i64 },
    #[error("a cusp cannot be paired with itself")]
    SameCusp,
    #[error("in dimension 2 removability is not automatic; assume_removable is required")]
    RemovabilityRequired,
    #[error("reconnection {requested:?} joins arcs of different index; compatible: {compatible:?}")]
    IncompatibleReconnection { requested: Reconnection, compatible: Vec<Reconnection> },
    #[error("operation requires {expected} dimension, got n = {n}")]
    WrongParity { n: i64, expected: &'static str },
    #[error("component {0} is not an interval")]
    NotInterval(usize),
    #[error("components must differ")]
    SameComponent,
    #[error("precondition failed: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum End {
    Terminal(String),
    Port(usize, Side),
}

#[derive(Debug, Clone)]
struct Strand {
    elems: Vec<Element>,
    ends: [End; 2],
}

impl Strand {
    fn oriented(&self, start: usize) -> (Vec<Element>, End) {
        if start == 0 {
            (self.elems.clone(), self.ends[1].clone())
        } else {
            (self.elems.iter().rev().cloned().collect(), self.ends[0].clone())
        }
    }
}

fn fuse(a: &FoldArc, b: &FoldArc) -> FoldArc {
    assert_eq!(a.tau, b.tau, "fold arcs of different index glued");
    FoldArc { id: a.id.clone().or_else(|| b.id.clone()), tau: a.tau }
}

fn arc_of(e: &Element) -> &FoldArc {
    e.as_arc().expect("strand ends are arcs")
}

fn append(chain: &mut Vec<Element>, mut elems: Vec<Element>) {
    if chain.is_empty() {
        *chain = elems;
        return;
    }
    let last = chain.pop().expect("non-empty chain");
    let first = elems.remove(0);
    chain.push(Element::Arc(fuse(arc_of(&last), arc_of(&first))));
    chain.extend(elems);
}

/// Cuts a component at the given `(position, label)` cusps.
fn cut(comp: &Component, mut cuts: Vec<(usize, usize)>) -> Vec<Strand> {
    cuts.sort_unstable();
    let seq = &comp.sequence;
    match comp.kind {
        ComponentKind::Interval => {
            let [x0, x1] = comp.endpoints.clone().expect("validated interval");
            let mut out = Vec::new();
            let mut prev = End::Terminal(x0);
            let mut start = 0;
            for (q, w) in cuts {
                out.push(Strand { elems: seq[start..q].to_vec(), ends: [prev, End::Port(w, Side::Left)] });
                prev = End::Port(w, Side::Right);
                start = q + 1;
            }
            out.push(Strand { elems: seq[start..].to_vec(), ends: [prev, End::Terminal(x1)] });
            out
        }
        ComponentKind::Circle => {
            let len = seq.len();
            let k = cuts.len();
            let mut out = Vec::new();
            // the strand through position 0 comes first
            for j in (0..k).map(|j| (j + k - 1) % k) {
                let (q, w) = cuts[j];
                let (q_next, w_next) = cuts[(j + 1) % k];
                let mut elems = Vec::new();
                let mut pos = (q + 1) % len;
                while pos != q_next {
                    elems.push(seq[pos].clone());
                    pos = (pos + 1) % len;
                }
                out.push(Strand { elems, ends: [End::Port(w, Side::Right), End::Port(w_next, Side::Left)] });
            }
            out
        }
    }
}

/// Rejoins strands along `glue`; chains between terminals become intervals,
/// closed loops become circles.
fn reassemble(strands: &[Strand], glue: &HashMap<End, End>) -> Vec<Component> {
    let mut by_end: HashMap<&End, (usize, usize)> = HashMap::new();
    for (s, strand) in strands.iter().enumerate() {
        for (e, end) in strand.ends.iter().enumerate() {
            by_end.insert(end, (s, e));
        }
    }
    let mut visited = vec![false; strands.len()];
    let mut out = Vec::new();
    let follow = |chain: &mut Vec<Element>, mut cur: End, stop: Option<&End>, visited: &mut Vec<bool>| -> End {
        loop {
            let next = match &cur {
                End::Terminal(_) => return cur,
                port => glue[port].clone(),
            };
            if Some(&next) == stop {
                return next;
            }
            let (t, e) = by_end[&next];
            visited[t] = true;
            let (elems, other) = strands[t].oriented(e);
            append(chain, elems);
            cur = other;
        }
    };
    for s in 0..strands.len() {
        for e in 0..2 {
            if visited[s] {
                continue;
            }
            if let End::Terminal(x0) = &strands[s].ends[e] {
                visited[s] = true;
                let (mut chain, other) = strands[s].oriented(e);
                let last = follow(&mut chain, other, None, &mut visited);
                let End::Terminal(x1) = last else { unreachable!("chains end at terminals") };
                out.push(Component::interval(x0.clone(), x1, chain));
            }
        }
    }
    for s in 0..strands.len() {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        let start = strands[s].ends[0].clone();
        let (mut chain, other) = strands[s].oriented(0);
        follow(&mut chain, other, Some(&start), &mut visited);
        if chain.len() > 1 {
            let last = chain.pop().expect("loop has arcs");
            chain[0] = Element::Arc(fuse(arc_of(&chain[0]), arc_of(&last)));
        }
        out.push(Component::circle(chain));
    }
    out
}

fn component(p: &SingularPattern, c: usize) -> Result<&Component, MoveError> {
    p.components.get(c).ok_or(MoveError::NoSuchComponent(c))
}

fn arc_pos(p: &SingularPattern, c: usize, arc: usize) -> Result<usize, MoveError> {
    let comp = component(p, c)?;
    if arc < comp.arc_count() {
        Ok(2 * arc)
    } else {
        Err(MoveError::NoSuchArc { component: c, arc })
    }
}

fn cusp_pos(p: &SingularPattern, r: CuspRef) -> Result<usize, MoveError> {
    let comp = component(p, r.component)?;
    if r.cusp < comp.cusp_count() {
        Ok(2 * r.cusp + 1)
    } else {
        Err(MoveError::NoSuchCusp(r))
    }
}

fn cusp_at(p: &SingularPattern, r: CuspRef) -> Result<&Cusp, MoveError> {
    let pos = cusp_pos(p, r)?;
    Ok(p.components[r.component].sequence[pos].as_cusp().expect("odd positions hold cusps"))
}

fn arc_at(p: &SingularPattern, c: usize, arc: usize) -> Result<&FoldArc, MoveError> {
    let pos = arc_pos(p, c, arc)?;
    Ok(p.components[c].sequence[pos].as_arc().expect("even positions hold arcs"))
}

/// Replaces the arc at `pos` by `arc, inserted…, arc'`; on a single-arc circle
/// the two outer pieces are the same arc.
fn split_arc(comp: &mut Component, pos: usize, inserted: Vec<Element>) {
    let arc = comp.sequence[pos].as_arc().expect("arc position").clone();
    let mut replacement = vec![Element::Arc(arc.clone())];
    replacement.extend(inserted);
    let single_circle = comp.is_circle() && comp.sequence.len() == 1;
    if !single_circle {
        replacement.push(Element::Arc(FoldArc { id: None, tau: arc.tau }));
    }
    comp.sequence.splice(pos..=pos, replacement);
}

fn require_even(n: i64) -> Result<(), MoveError> {
    if n % 2 != 0 {
        return Err(MoveError::WrongParity { n, expected: "even" });
    }
    Ok(())
}

fn require_odd(n: i64) -> Result<(), MoveError> {
    if n % 2 == 0 {
        return Err(MoveError::WrongParity { n, expected: "odd" });
    }
    Ok(())
}

/// Birth of a matching pair on arc `arc` of component `c`:
/// `arc(τ) → arc(τ), cusp(i), arc(max{i+1, n−2−i}), cusp(n−2−i), arc(τ)`,
/// with the two cusps in the opposite order when `reversed`.
pub fn create_cusp_pair_oriented(
    p: &SingularPattern,
    c: usize,
    arc: usize,
    i: i64,
    reversed: bool,
) -> Result<SingularPattern, MoveError> {
    let n = p.n;
    if !(0..=n - 2).contains(&i) {
        return Err(MoveError::IndexOutOfRange { i, max: n - 2 });
    }
    let tau = arc_at(p, c, arc)?.tau;
    let expected = i.max(n - 1 - i);
    if tau != expected {
        return Err(MoveError::ArcIndexMismatch { i, expected, found: tau });
    }
    let pos = arc_pos(p, c, arc)?;
    let inner = (i + 1).max(n - 2 - i);
    let (first, second) = if reversed { (n - 2 - i, i) } else { (i, n - 2 - i) };
    let mut out = p.clone();
    split_arc(&mut out.components[c], pos, vec![Element::cusp(first), Element::arc(inner), Element::cusp(second)]);
    Ok(out)
}

pub fn create_cusp_pair(p: &SingularPattern, c: usize, arc: usize, i: i64) -> Result<SingularPattern, MoveError> {
    create_cusp_pair_oriented(p, c, arc, i, false)
}

/// Absolute indices of the arcs on the left and right of a cusp.
fn side_taus(p: &SingularPattern, r: CuspRef) -> Result<(i64, i64), MoveError> {
    let pos = cusp_pos(p, r)?;
    let comp = &p.components[r.component];
    let (l, rr) = comp.neighbours(pos).expect("cusps are interior");
    Ok((arc_of(&comp.sequence[l]).tau, arc_of(&comp.sequence[rr]).tau))
}

fn check_matching(p: &SingularPattern, c1: CuspRef, c2: CuspRef) -> Result<(), MoveError> {
    if c1 == c2 {
        return Err(MoveError::SameCusp);
    }
    let (i1, i2) = (cusp_at(p, c1)?.normal_index, cusp_at(p, c2)?.normal_index);
    if i1 + i2 != p.n - 2 {
        return Err(MoveError::NotMatching { first: i1, second: i2, n: p.n });
    }
    Ok(())
}

/// Reconnections that glue only arcs of equal absolute index.
pub fn compatible_reconnections(p: &SingularPattern, c1: CuspRef, c2: CuspRef) -> Result<Vec<Reconnection>, MoveError> {
    check_matching(p, c1, c2)?;
    let (l1, r1) = side_taus(p, c1)?;
    let (l2, r2) = side_taus(p, c2)?;
    let mut out = Vec::new();
    if l1 == r2 && r1 == l2 {
        out.push(Reconnection::Split);
    }
    if l1 == l2 && r1 == r2 {
        out.push(Reconnection::Stay);
    }
    Ok(out)
}

/// Removes a matching pair and rejoins the four fold ends.
///
/// Component bookkeeping: the first resulting component takes the place of
/// `c1`'s component; a second result takes the place of `c2`'s component if
/// that differs, otherwise it is appended. Two components joined into one
/// leave `c2`'s slot removed.
pub fn eliminate_matching_pair(
    p: &SingularPattern,
    c1: CuspRef,
    c2: CuspRef,
    reconnection: Reconnection,
    assume_removable: bool,
) -> Result<SingularPattern, MoveError> {
    let compatible = compatible_reconnections(p, c1, c2)?;
    if p.n == 2 && !assume_removable {
        return Err(MoveError::RemovabilityRequired);
    }
    if !compatible.contains(&reconnection) {
        return Err(MoveError::IncompatibleReconnection { requested: reconnection, compatible });
    }
    let (q1, q2) = (cusp_pos(p, c1)?, cusp_pos(p, c2)?);
    let mut strands;
    if c1.component == c2.component {
        strands = cut(&p.components[c1.component], vec![(q1, 0), (q2, 1)]);
    } else {
        strands = cut(&p.components[c1.component], vec![(q1, 0)]);
        strands.extend(cut(&p.components[c2.component], vec![(q2, 1)]));
    }
    let pairs = match reconnection {
        Reconnection::Split => [((0, Side::Left), (1, Side::Right)), ((0, Side::Right), (1, Side::Left))],
        Reconnection::Stay => [((0, Side::Left), (1, Side::Left)), ((0, Side::Right), (1, Side::Right))],
    };
    let mut glue = HashMap::new();
    for ((a, sa), (b, sb)) in pairs {
        glue.insert(End::Port(a, sa), End::Port(b, sb));
        glue.insert(End::Port(b, sb), End::Port(a, sa));
    }
    let mut results = reassemble(&strands, &glue).into_iter();
    let mut out = p.clone();
    out.components[c1.component] = results.next().expect("at least one component survives");
    let mut removed = None;
    if c1.component != c2.component {
        match results.next() {
            Some(second) => out.components[c2.component] = second,
            None => removed = Some(c2.component),
        }
    }
    out.components.extend(results);
    if let Some(r) = removed {
        out.components.remove(r);
    }
    debug_assert!(out.validate().is_valid(), "elimination broke validity: {}", out.validate());
    Ok(out)
}

fn apply_toggle(p: &SingularPattern, c: usize, arc: usize) -> Result<SingularPattern, MoveError> {
    let n = p.n;
    require_even(n)?;
    let half = n / 2;
    let found = arc_at(p, c, arc)?.tau;
    if found != half {
        return Err(MoveError::ArcIndexMismatch { i: half - 1, expected: half, found });
    }
    let pos = arc_pos(p, c, arc)?;
    let mut out = p.clone();
    split_arc(&mut out.components[c], pos, vec![Element::cusp(half - 1)]);
    out.components.push(Component::circle(vec![Element::arc(half), Element::cusp(half - 1)]));
    Ok(out)
}

fn apply_merge(
    p: &SingularPattern,
    first: usize,
    first_arc: usize,
    second: usize,
    second_arc: usize,
    flip_second: bool,
) -> Result<SingularPattern, MoveError> {
    let n = p.n;
    require_odd(n)?;
    if first == second {
        return Err(MoveError::SameComponent);
    }
    let m = (n - 1) / 2;
    let q = create_cusp_pair_oriented(p, first, first_arc, m, false)?;
    let q = create_cusp_pair_oriented(&q, second, second_arc, m, flip_second)?;
    let c1 = CuspRef::new(first, first_arc);
    // the created cusp of index n − 2 − m on the second component
    let c2 = CuspRef::new(second, if flip_second { second_arc } else { second_arc + 1 });
    let wiring = compatible_reconnections(&q, c1, c2)?;
    let [reconnection] = wiring.as_slice() else {
        return Err(MoveError::Precondition(format!("merge wiring is not forced: {wiring:?}")));
    };
    eliminate_matching_pair(&q, c1, c2, *reconnection, true)
}

pub fn apply_move(p: &SingularPattern, m: &Move) -> Result<SingularPattern, MoveError> {
    match *m {
        Move::CreateCuspPair { component, arc, i, reversed } => create_cusp_pair_oriented(p, component, arc, i, reversed),
        Move::EliminateMatchingPair { first, second, reconnection, assume_removable } => {
            eliminate_matching_pair(p, first, second, reconnection, assume_removable)
        }
        Move::ToggleParity { component, arc } => apply_toggle(p, component, arc),
        Move::MergeComponents { first, first_arc, second, second_arc, flip_second } => {
            apply_merge(p, first, first_arc, second, second_arc, flip_second)
        }
    }
}

/// Emits creations walking down the index ladder on component `c` until it
/// has an arc of index `target`; returns that arc's ordinal.
fn ladder(trace: &mut MoveTrace, c: usize, target: i64) -> Result<usize, MoveError> {
    let n = trace.final_pattern.n;
    let comp = component(&trace.final_pattern, c)?;
    let arcs: Vec<i64> = comp.sequence.iter().filter_map(|e| e.as_arc().map(|a| a.tau)).collect();
    if let Some(k) = arcs.iter().position(|&t| t == target) {
        return Ok(k);
    }
    let (mut k, mut tau) = arcs
        .iter()
        .enumerate()
        .min_by_key(|(_, &t)| t)
        .map(|(k, &t)| (k, t))
        .ok_or_else(|| MoveError::Precondition(format!("component {c} has no arcs")))?;
    while tau > target {
        trace.push(Move::CreateCuspPair { component: c, arc: k, i: n - 1 - tau, reversed: false })?;
        k += 1;
        tau -= 1;
    }
    Ok(k)
}

/// Flips the cusp parity of interval `c` (even `n`).
pub fn toggle_parity(p: &SingularPattern, c: usize) -> Result<MoveTrace, MoveError> {
    require_even(p.n)?;
    p.ensure_valid()?;
    if !component(p, c)?.is_interval() {
        return Err(MoveError::NotInterval(c));
    }
    let mut trace = MoveTrace::empty(p);
    let arc = ladder(&mut trace, c, p.n / 2)?;
    trace.push(Move::ToggleParity { component: c, arc })?;
    Ok(trace)
}

/// Joins components `a` and `b` (odd `n`); for two intervals the start
/// endpoints of both end up on one interval.
pub fn merge_components(p: &SingularPattern, a: usize, b: usize) -> Result<MoveTrace, MoveError> {
    merge_components_joining(p, a, 0, b, 0)
}

/// As [`merge_components`], joining endpoint `end_a` of `a` with endpoint
/// `end_b` of `b` when both are intervals.
pub fn merge_components_joining(
    p: &SingularPattern,
    a: usize,
    end_a: usize,
    b: usize,
    end_b: usize,
) -> Result<MoveTrace, MoveError> {
    require_odd(p.n)?;
    p.ensure_valid()?;
    let mut trace = MoveTrace::empty(p);
    merge_into(&mut trace, a, end_a, b, end_b)?;
    Ok(trace)
}

fn merge_into(trace: &mut MoveTrace, a: usize, end_a: usize, b: usize, end_b: usize) -> Result<(), MoveError> {
    if a == b {
        return Err(MoveError::SameComponent);
    }
    let p = &trace.final_pattern;
    let both_intervals = component(p, a)?.is_interval() && component(p, b)?.is_interval();
    let target = (p.n - 1) / 2;
    let first_arc = ladder(trace, a, target)?;
    let second_arc = ladder(trace, b, target)?;
    let flip_second = both_intervals && end_a == end_b;
    trace.push(Move::MergeComponents { first: a, first_arc, second: b, second_arc, flip_second })
}

fn check_sigma(p: &SingularPattern, sigma: &SignAssignment) -> Result<(), MoveError> {
    p.ensure_valid()?;
    sigma.check_domain(&p.boundary_points).map_err(PatternError::from)?;
    Ok(())
}

/// Rewrites the pattern so every component satisfies
/// `#cusps + ½ Σ σ ≡ 0 (mod 2)`, or certifies `χ(V) ≢ χ₊(g;σ) (mod 2)`.
pub fn normalize_even(
    p: &SingularPattern,
    sigma: &SignAssignment,
    chi_v: i64,
    assume_removable: bool,
) -> Result<NormalizeOutcome, MoveError> {
    let n = p.n;
    require_even(n)?;
    check_sigma(p, sigma)?;
    if p.boundary_points.len() % 2 != 0 {
        return Err(PatternError::OddBoundaryCount(p.boundary_points.len()).into());
    }
    if !p.lemma51_unchecked(chi_v) {
        return Err(MoveError::Precondition(format!(
            "cusp count {} is not congruent to chi_V {} + {} (mod 2)",
            p.total_cusps(),
            chi_v,
            p.boundary_points.len() / 2
        )));
    }
    let chi_plus = chi_plus_sigma(&p.boundary_points, sigma).map_err(PatternError::from)?;
    if (chi_v - chi_plus).rem_euclid(2) != 0 {
        return Ok(NormalizeOutcome::Obstructed(Obstruction {
            kind: ObstructionKind::ParityMismatch,
            witness: Witness {
                lhs: chi_v.rem_euclid(2),
                rhs: chi_plus.rem_euclid(2),
                modulus: Some(2),
                signed_sum: None,
                relation: "chi_V == chi_plus (mod 2)".into(),
            },
        }));
    }
    let mut trace = MoveTrace::empty(p);
    let violating: Vec<usize> = p
        .conditions_even_unchecked(sigma)
        .iter()
        .enumerate()
        .filter(|&(c, ok)| !ok && p.components[c].is_interval())
        .map(|(c, _)| c)
        .collect();
    for c in violating {
        let arc = ladder(&mut trace, c, n / 2)?;
        trace.push(Move::ToggleParity { component: c, arc })?;
    }
    let exception = n / 2 - 1;
    loop {
        let q = &trace.final_pattern;
        let odd: Vec<usize> = (0..q.components.len())
            .filter(|&c| q.components[c].is_circle() && q.components[c].cusp_count() % 2 == 1)
            .collect();
        match odd.len() {
            0 => break,
            1 => return Err(MoveError::Precondition("odd number of odd circles after parity fixing".into())),
            _ => {}
        }
        if n == 2 && !assume_removable {
            return Err(MoveError::RemovabilityRequired);
        }
        let (a, b) = (odd[0], odd[1]);
        let find = |c: usize| {
            q.components[c]
                .sequence
                .iter()
                .filter_map(Element::as_cusp)
                .position(|cusp| cusp.normal_index == exception)
                .map(|k| CuspRef::new(c, k))
                .ok_or_else(|| MoveError::Precondition(format!("odd circle {c} has no cusp of index {exception}")))
        };
        let (c1, c2) = (find(a)?, find(b)?);
        trace.push(Move::EliminateMatchingPair {
            first: c1,
            second: c2,
            reconnection: Reconnection::Split,
            assume_removable: n == 2,
        })?;
        if n == 2 {
            while trace.final_pattern.components[a].cusp_count() >= 2 {
                trace.push(Move::EliminateMatchingPair {
                    first: CuspRef::new(a, 0),
                    second: CuspRef::new(a, 1),
                    reconnection: Reconnection::Stay,
                    assume_removable: true,
                })?;
            }
        }
    }
    debug_assert!(trace.final_pattern.check_condition_even(sigma).map(|v| v.iter().all(|&b| b)).unwrap_or(false));
    Ok(NormalizeOutcome::Normalized(trace))
}

/// Rewrites the pattern so every component satisfies `Σ (−1)^μ σ = 0`, or
/// certifies `χ(∂V)/2 ≠ χ₊(g;σ)`.
pub fn normalize_odd(p: &SingularPattern, sigma: &SignAssignment) -> Result<NormalizeOutcome, MoveError> {
    require_odd(p.n)?;
    check_sigma(p, sigma)?;
    let eps = |id: &str| {
        let point = p.boundary_point(id).expect("validated endpoint");
        parity_sign(point.mu) * sigma.get(id).expect("domain checked").value()
    };
    let total: i64 = p.boundary_points.iter().map(|x| eps(&x.id)).sum();
    if total != 0 {
        let chi_plus = chi_plus_sigma(&p.boundary_points, sigma).map_err(PatternError::from)?;
        return Ok(NormalizeOutcome::Obstructed(Obstruction {
            kind: ObstructionKind::SignSumNonzero,
            witness: Witness {
                lhs: alternating_count(&p.boundary_points) / 2,
                rhs: chi_plus,
                modulus: None,
                signed_sum: Some(total),
                relation: "chi(dV)/2 == chi_plus".into(),
            },
        }));
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for comp in &p.components {
        let Some([x0, x1]) = &comp.endpoints else { continue };
        if eps(x0) + eps(x1) == 0 {
            continue;
        }
        for x in [x0, x1] {
            if eps(x) > 0 {
                plus.push(x.clone());
            } else {
                minus.push(x.clone());
            }
        }
    }
    plus.sort();
    minus.sort();
    let mut trace = MoveTrace::empty(p);
    for (x, y) in plus.iter().zip(&minus) {
        let q = &trace.final_pattern;
        let a = q.component_of_endpoint(x).expect("endpoint present");
        let b = q.component_of_endpoint(y).expect("endpoint present");
        if a == b {
            continue;
        }
        let end = |c: usize, id: &str| {
            let [x0, _] = q.components[c].endpoints.as_ref().expect("interval");
            usize::from(x0 != id)
        };
        let (end_a, end_b) = (end(a, x), end(b, y));
        merge_into(&mut trace, a, end_a, b, end_b)?;
    }
    debug_assert!(trace.final_pattern.check_condition_odd(sigma).map(|v| v.iter().all(|&b| b)).unwrap_or(false));
    Ok(NormalizeOutcome::Normalized(trace))
}

/// Every atomic move applicable to `p`; merges use the first arc of the
/// middle index on each component.
pub fn enumerate_moves(p: &SingularPattern, assume_removable: bool) -> Vec<Move> {
    let n = p.n;
    let mut out = Vec::new();
    for (c, comp) in p.components.iter().enumerate() {
        for (k, arc) in comp.sequence.iter().filter_map(Element::as_arc).enumerate() {
            let mut choices = vec![n - 1 - arc.tau, arc.tau];
            choices.retain(|i| (0..=n - 2).contains(i));
            choices.dedup();
            for i in choices {
                for reversed in [false, true] {
                    out.push(Move::CreateCuspPair { component: c, arc: k, i, reversed });
                }
            }
            if n % 2 == 0 && arc.tau == n / 2 {
                out.push(Move::ToggleParity { component: c, arc: k });
            }
        }
    }
    if n > 2 || assume_removable {
        let cusps: Vec<CuspRef> = p
            .components
            .iter()
            .enumerate()
            .flat_map(|(c, comp)| (0..comp.cusp_count()).map(move |k| CuspRef::new(c, k)))
            .collect();
        for (j, &c1) in cusps.iter().enumerate() {
            for &c2 in &cusps[j + 1..] {
                if let Ok(wirings) = compatible_reconnections(p, c1, c2) {
                    for reconnection in wirings {
                        out.push(Move::EliminateMatchingPair { first: c1, second: c2, reconnection, assume_removable });
                    }
                }
            }
        }
    }
    if n % 2 == 1 {
        let middle = (n - 1) / 2;
        let arcs: Vec<Option<usize>> = p
            .components
            .iter()
            .map(|comp| comp.sequence.iter().filter_map(Element::as_arc).position(|a| a.tau == middle))
            .collect();
        for a in 0..arcs.len() {
            for b in 0..arcs.len() {
                if let (true, Some(fa), Some(fb)) = (a != b, arcs[a], arcs[b]) {
                    for flip_second in [false, true] {
                        out.push(Move::MergeComponents { first: a, first_arc: fa, second: b, second_arc: fb, flip_second });
                    }
                }
            }
        }
    }
    out
}
