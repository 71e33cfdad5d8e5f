//! Exhaustive enumeration of small singular patterns, built from the
//! transition rules directly rather than through the library validator.

use std::collections::BTreeSet;

use cuspcobord::morse_model::{BoundaryCriticalPoint, Sign};
use cuspcobord::{Component, Element, SignAssignment, SingularPattern};

/// Arc/cusp word: arcs as `tau`, cusps as `CUSP + I`.
type Word = Vec<i64>;
const CUSP: i64 = 100;

fn transition(n: i64, normal_index: i64) -> (i64, i64) {
    let tau = normal_index.max(n - 2 - normal_index);
    if n % 2 == 0 && tau == n / 2 - 1 {
        (n / 2, n / 2)
    } else {
        (tau, tau + 1)
    }
}

/// All words starting at an arc of index `start` with exactly `cusps` cusps.
fn words(n: i64, start: i64, cusps: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack = vec![(vec![start], cusps)];
    while let Some((w, left)) = stack.pop() {
        if left == 0 {
            out.push(w);
            continue;
        }
        let tau = *w.last().unwrap();
        for i in 0..=n - 2 {
            let (lo, hi) = transition(n, i);
            let next: Vec<i64> = if lo == hi {
                if tau == lo { vec![lo] } else { vec![] }
            } else if tau == lo {
                vec![hi]
            } else if tau == hi {
                vec![lo]
            } else {
                vec![]
            };
            for t in next {
                let mut v = w.clone();
                v.extend([CUSP + i, t]);
                stack.push((v, left - 1));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Shape {
    Interval { mu0: i64, word: Word, mu1: i64 },
    Circle(Word),
}

fn endpoint_tau(n: i64, mu: i64) -> i64 {
    mu.max(n - 1 - mu)
}

/// Component shapes with at most `max_cusps` cusps, one per isomorphism class
/// (intervals up to reversal, circles up to rotation and reflection).
pub fn shapes(n: i64, max_cusps: usize) -> Vec<Shape> {
    let mut set = BTreeSet::new();
    for mu0 in 0..n {
        for mu1 in 0..n {
            for k in 0..=max_cusps {
                for w in words(n, endpoint_tau(n, mu0), k) {
                    if *w.last().unwrap() != endpoint_tau(n, mu1) {
                        continue;
                    }
                    let rev: Word = w.iter().rev().copied().collect();
                    let a = Shape::Interval { mu0, word: w, mu1 };
                    let b = Shape::Interval { mu0: mu1, word: rev, mu1: mu0 };
                    set.insert(a.min(b));
                }
            }
        }
    }
    for tau in n / 2..n {
        set.insert(Shape::Circle(vec![tau]));
        for k in 1..=max_cusps {
            if n % 2 == 1 && k % 2 == 1 {
                continue;
            }
            for w in words(n, tau, k) {
                if *w.last().unwrap() != tau {
                    continue;
                }
                let body = &w[..w.len() - 1];
                let mut best: Option<Word> = None;
                for r in (0..body.len()).step_by(2) {
                    let rot: Word = body[r..].iter().chain(&body[..r]).copied().collect();
                    let mut refl: Word = rot.iter().rev().copied().collect();
                    refl.rotate_right(1);
                    for cand in [rot, refl] {
                        if best.as_ref().is_none_or(|b| cand < *b) {
                            best = Some(cand);
                        }
                    }
                }
                set.insert(Shape::Circle(best.unwrap()));
            }
        }
    }
    set.into_iter().collect()
}

fn elements(word: &[i64]) -> Vec<Element> {
    word.iter().map(|&v| if v >= CUSP { Element::cusp(v - CUSP) } else { Element::arc(v) }).collect()
}

/// A pattern with all boundary signs `+1`; ids are `p0, p1, …`.
pub fn build(n: i64, shapes: &[&Shape]) -> SingularPattern {
    let mut points = Vec::new();
    let mut comps = Vec::new();
    for s in shapes {
        match s {
            Shape::Interval { mu0, word, mu1 } => {
                let (a, b) = (format!("p{}", points.len()), format!("p{}", points.len() + 1));
                points.push(BoundaryCriticalPoint::new(a.clone(), *mu0, Sign::Plus));
                points.push(BoundaryCriticalPoint::new(b.clone(), *mu1, Sign::Plus));
                comps.push(Component::interval(a, b, elements(word)));
            }
            Shape::Circle(word) => comps.push(Component::circle(elements(word))),
        }
    }
    SingularPattern::new(n, points, comps)
}

/// Every multiset of at most `max_components` shapes.
pub fn patterns(n: i64, max_components: usize, max_cusps: usize) -> Vec<SingularPattern> {
    let shapes = shapes(n, max_cusps);
    let mut out = vec![build(n, &[])];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_components {
        let mut next = Vec::new();
        for combo in &frontier {
            let from = combo.last().copied().unwrap_or(0);
            for k in from..shapes.len() {
                let mut c = combo.clone();
                c.push(k);
                let picked: Vec<&Shape> = c.iter().map(|&i| &shapes[i]).collect();
                out.push(build(n, &picked));
                next.push(c);
            }
        }
        frontier = next;
    }
    out
}

/// All `2^k` sign assignments on the boundary points, by bit mask.
pub fn sign_assignment(p: &SingularPattern, mask: u32) -> SignAssignment {
    p.boundary_points
        .iter()
        .enumerate()
        .map(|(k, b)| (b.id.clone(), if mask >> k & 1 == 0 { Sign::Plus } else { Sign::Minus }))
        .collect()
}

/// Overwrites `sigma` with the assignment for `mask`.
pub fn set_mask(p: &SingularPattern, sigma: &mut SignAssignment, mask: u32) {
    for (k, b) in p.boundary_points.iter().enumerate() {
        sigma.set(&b.id, if mask >> k & 1 == 0 { Sign::Plus } else { Sign::Minus });
    }
}
