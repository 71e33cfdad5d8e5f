//! Direct arithmetic for the per-component conditions and the global
//! relations, written against the raw pattern data.

use cuspcobord::{Sign, SignAssignment, SingularPattern};

fn sign(sigma: &SignAssignment, id: &str) -> i64 {
    match sigma.get(id) {
        Some(Sign::Plus) => 1,
        Some(Sign::Minus) => -1,
        None => panic!("sign for {id} missing"),
    }
}

fn mu(p: &SingularPattern, id: &str) -> i64 {
    p.boundary_points.iter().find(|b| b.id == id).expect("endpoint listed").mu
}

fn pow_minus_one(k: i64) -> i64 {
    if k % 2 == 0 { 1 } else { -1 }
}

pub struct ComponentFacts {
    pub cusps: i64,
    /// `σ` at the endpoints, empty for circles.
    pub signs: Vec<i64>,
    /// `(−1)^μ σ` at the endpoints.
    pub weighted: Vec<i64>,
}

pub fn facts(p: &SingularPattern, sigma: &SignAssignment) -> Vec<ComponentFacts> {
    p.components
        .iter()
        .map(|c| {
            let cusps = c.sequence.iter().filter(|e| e.is_cusp()).count() as i64;
            let ids: Vec<&String> = c.endpoints.iter().flatten().collect();
            ComponentFacts {
                cusps,
                signs: ids.iter().map(|id| sign(sigma, id)).collect(),
                weighted: ids.iter().map(|id| pow_minus_one(mu(p, id)) * sign(sigma, id)).collect(),
            }
        })
        .collect()
}

/// Per-component cusp counts and endpoint `(position, μ)` pairs, for
/// evaluating facts directly from a sign bit mask.
pub struct Skeleton(Vec<(i64, Vec<(usize, i64)>)>);

impl Skeleton {
    pub fn new(p: &SingularPattern) -> Self {
        let position = |id: &String| p.boundary_points.iter().position(|b| &b.id == id).expect("endpoint listed");
        Skeleton(
            p.components
                .iter()
                .map(|c| {
                    let cusps = c.sequence.iter().filter(|e| e.is_cusp()).count() as i64;
                    (cusps, c.endpoints.iter().flatten().map(|id| (position(id), mu(p, id))).collect())
                })
                .collect(),
        )
    }

    /// Facts under the assignment whose bit `k` set means `σ = −1` at point `k`.
    pub fn facts(&self, mask: u32) -> Vec<ComponentFacts> {
        let sign = |k: usize| if mask >> k & 1 == 0 { 1 } else { -1 };
        self.0
            .iter()
            .map(|(cusps, ends)| ComponentFacts {
                cusps: *cusps,
                signs: ends.iter().map(|&(k, _)| sign(k)).collect(),
                weighted: ends.iter().map(|&(k, mu)| pow_minus_one(mu) * sign(k)).collect(),
            })
            .collect()
    }
}

/// `#cusps + ½ Σσ ≡ 0 (mod 2)`.
pub fn even_condition(f: &ComponentFacts) -> bool {
    (f.cusps + f.signs.iter().sum::<i64>() / 2).rem_euclid(2) == 0
}

/// `Σ (−1)^μ σ = 0`.
pub fn odd_condition(f: &ComponentFacts) -> bool {
    f.weighted.iter().sum::<i64>() == 0
}

/// A non-vanishing field along the component with the prescribed ends exists.
pub fn field_exists(f: &ComponentFacts) -> bool {
    let even = f.cusps % 2 == 0;
    match f.signs.as_slice() {
        [a, b] => even == (a != b),
        _ => even,
    }
}

pub fn chi_plus(p: &SingularPattern, sigma: &SignAssignment) -> i64 {
    p.boundary_points.iter().filter(|b| sign(sigma, &b.id) == 1).map(|b| pow_minus_one(b.mu)).sum()
}

pub fn signed_sum(p: &SingularPattern, sigma: &SignAssignment) -> i64 {
    p.boundary_points.iter().map(|b| pow_minus_one(b.mu) * sign(sigma, &b.id)).sum()
}

pub fn alternating_count(p: &SingularPattern) -> i64 {
    p.boundary_points.iter().map(|b| pow_minus_one(b.mu)).sum()
}

/// The pattern satisfies the componentwise condition for its parity.
pub fn normalized(p: &SingularPattern, sigma: &SignAssignment) -> bool {
    let fs = facts(p, sigma);
    if p.n % 2 == 0 {
        fs.iter().all(even_condition)
    } else {
        fs.iter().all(odd_condition)
    }
}
