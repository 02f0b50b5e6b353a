//! Exhaustive validator for the groupoid, meet-groupoid and fullness axioms.
//!
//! Every quantified clause is checked over all tuples; the report keeps the
//! first witness found for each violated clause.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::groupoid::{MeetGroupoid, EMPTY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axiom {
    /// `∅⁻¹ = ∅ = ∅·∅`; `∅·A`, `A·∅` undefined for `A ≠ ∅`.
    #[serde(rename = "empty")]
    Empty,
    #[serde(rename = "meet-commutative")]
    MeetCommutative,
    #[serde(rename = "meet-associative")]
    MeetAssociative,
    #[serde(rename = "meet-idempotent")]
    MeetIdempotent,
    /// `∅ ∧ A = ∅`.
    #[serde(rename = "meet-least")]
    MeetLeast,
    #[serde(rename = "inverse-involution")]
    InverseInvolution,
    /// `(A·B)·C = A·(B·C)`, both sides or neither defined.
    #[serde(rename = "a")]
    Associativity,
    /// `A·A⁻¹` and `A⁻¹·A` defined.
    #[serde(rename = "b")]
    InversesDefined,
    /// `A·B·B⁻¹ = A` and `A⁻¹·A·B = B` when `A·B` is defined.
    #[serde(rename = "c")]
    Cancellation,
    /// `U ∧ V ≠ ∅` for non-empty idempotents.
    #[serde(rename = "idempotent-meet")]
    IdempotentMeet,
    /// `A ⊆ B ⇔ A⁻¹ ⊆ B⁻¹`.
    #[serde(rename = "d")]
    InverseOrder,
    /// `(A₀∧A₁)·(B₀∧B₁) = A₀·B₀ ∧ A₁·B₁`.
    #[serde(rename = "e")]
    MeetProduct,
    /// Monotonicity of the product.
    #[serde(rename = "f")]
    Monotone,
    /// Level up: a unique left (right) `V` *coset above each left (right) `U` *coset.
    #[serde(rename = "g")]
    LevelUp,
    /// Level down: at least two left (right) `U` *cosets below each left (right) `V` *coset, `U ⊊ V`.
    #[serde(rename = "h")]
    LevelDown,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = serde_json::to_value(self).unwrap();
        f.write_str(tag.as_str().unwrap())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn violated(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

struct Recorder {
    violations: Vec<Violation>,
}

impl Recorder {
    fn flag(&mut self, axiom: Axiom, witness: &[usize]) {
        if !self.violations.iter().any(|v| v.axiom == axiom) {
            self.violations.push(Violation {
                axiom,
                witness: witness.to_vec(),
            });
        }
    }

    fn seen(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

type Clause = fn(&MeetGroupoid, &mut Recorder);

/// Clauses in increasing order of cost; fullness comes last in the quadratic group.
fn clauses(fullness: bool) -> Vec<Clause> {
    let mut out: Vec<Clause> = vec![
        check_empty,
        check_meet_pairs,
        check_inverses,
        check_cancellation,
        check_idempotent_meet,
        check_inverse_order,
    ];
    if fullness {
        out.push(check_fullness);
    }
    out.extend([
        check_meet_associative as Clause,
        check_associativity,
        check_meet_product,
    ]);
    out
}

/// Runs every clause; with `fullness` also the level-up and level-down clauses.
pub fn check_axioms(m: &MeetGroupoid, fullness: bool) -> ValidationReport {
    let mut r = Recorder {
        violations: Vec::new(),
    };
    for clause in clauses(fullness) {
        clause(m, &mut r);
    }
    let mut violations = r.violations;
    violations.sort_by_key(|v| v.axiom);
    ValidationReport {
        passed: violations.is_empty(),
        violations,
    }
}

/// Stops at the first clause that fails, cheapest clauses first. Agrees with
/// [`check_axioms`] on whether `m` passes, at a fraction of the cost when it does not.
pub fn first_violation(m: &MeetGroupoid, fullness: bool) -> Option<Violation> {
    let mut r = Recorder {
        violations: Vec::new(),
    };
    for clause in clauses(fullness) {
        clause(m, &mut r);
        if let Some(v) = r.violations.pop() {
            return Some(v);
        }
    }
    None
}

fn check_inverses(m: &MeetGroupoid, r: &mut Recorder) {
    for a in 0..m.size() {
        if m.inv(m.inv(a)) != a {
            r.flag(Axiom::InverseInvolution, &[a]);
        }
        let ai = m.inv(a);
        if m.mul(a, ai).is_none() || m.mul(ai, a).is_none() {
            r.flag(Axiom::InversesDefined, &[a]);
        }
    }
}

// (a)
fn check_associativity(m: &MeetGroupoid, r: &mut Recorder) {
    let n = m.size();
    for a in 0..n {
        for b in 0..n {
            let ab = m.mul(a, b);
            for c in 0..n {
                let left = ab.and_then(|ab| m.mul(ab, c));
                let right = m.mul(b, c).and_then(|bc| m.mul(a, bc));
                if left != right {
                    r.flag(Axiom::Associativity, &[a, b, c]);
                    return;
                }
            }
        }
    }
}

// (c)
fn check_cancellation(m: &MeetGroupoid, r: &mut Recorder) {
    for (a, b, ab) in m.defined_products() {
        let right = m.mul(ab, m.inv(b));
        let left = m.mul(m.inv(a), a).and_then(|u| m.mul(u, b));
        if right != Some(a) || left != Some(b) {
            r.flag(Axiom::Cancellation, &[a, b]);
            return;
        }
    }
}

fn check_idempotent_meet(m: &MeetGroupoid, r: &mut Recorder) {
    let idempotents = m.idempotents();
    for &u in &idempotents {
        for &v in &idempotents {
            if m.wedge(u, v) == EMPTY {
                r.flag(Axiom::IdempotentMeet, &[u, v]);
                return;
            }
        }
    }
}

// (d)
fn check_inverse_order(m: &MeetGroupoid, r: &mut Recorder) {
    let n = m.size();
    for a in 0..n {
        for b in 0..n {
            if m.leq(a, b) != m.leq(m.inv(a), m.inv(b)) {
                r.flag(Axiom::InverseOrder, &[a, b]);
                return;
            }
        }
    }
}

// (e) and (f) over pairs of defined products
fn check_meet_product(m: &MeetGroupoid, r: &mut Recorder) {
    let products: Vec<(usize, usize, usize)> = m.defined_products().collect();
    for &(a0, b0, p0) in &products {
        for &(a1, b1, p1) in &products {
            let a = m.wedge(a0, a1);
            let b = m.wedge(b0, b1);
            if !r.seen(Axiom::MeetProduct)
                && a != EMPTY
                && b != EMPTY
                && m.mul(a, b) != Some(m.wedge(p0, p1))
            {
                r.flag(Axiom::MeetProduct, &[a0, a1, b0, b1]);
            }
            if !r.seen(Axiom::Monotone) && m.leq(a0, a1) && m.leq(b0, b1) && !m.leq(p0, p1) {
                r.flag(Axiom::Monotone, &[a0, a1, b0, b1]);
            }
        }
        if r.seen(Axiom::MeetProduct) && r.seen(Axiom::Monotone) {
            return;
        }
    }
}

fn check_empty(m: &MeetGroupoid, r: &mut Recorder) {
    if m.inv(EMPTY) != EMPTY {
        r.flag(Axiom::Empty, &[EMPTY]);
    }
    if m.mul(EMPTY, EMPTY) != Some(EMPTY) {
        r.flag(Axiom::Empty, &[EMPTY, EMPTY]);
    }
    for a in 1..m.size() {
        if m.mul(EMPTY, a).is_some() {
            r.flag(Axiom::Empty, &[EMPTY, a]);
        }
        if m.mul(a, EMPTY).is_some() {
            r.flag(Axiom::Empty, &[a, EMPTY]);
        }
    }
}

fn check_meet_pairs(m: &MeetGroupoid, r: &mut Recorder) {
    let n = m.size();
    for a in 0..n {
        if m.wedge(a, a) != a {
            r.flag(Axiom::MeetIdempotent, &[a]);
        }
        if m.wedge(EMPTY, a) != EMPTY {
            r.flag(Axiom::MeetLeast, &[a]);
        }
        for b in 0..n {
            if m.wedge(a, b) != m.wedge(b, a) {
                r.flag(Axiom::MeetCommutative, &[a, b]);
            }
        }
    }
}

fn check_meet_associative(m: &MeetGroupoid, r: &mut Recorder) {
    let n = m.size();
    for a in 0..n {
        for b in 0..n {
            let ab = m.wedge(a, b);
            for c in 0..n {
                if m.wedge(ab, c) != m.wedge(a, m.wedge(b, c)) {
                    r.flag(Axiom::MeetAssociative, &[a, b, c]);
                    return;
                }
            }
        }
    }
}

fn check_fullness(m: &MeetGroupoid, r: &mut Recorder) {
    let idempotents = m.idempotents();
    let left: Vec<Vec<usize>> = idempotents.iter().map(|&u| m.lc(u)).collect();
    let right: Vec<Vec<usize>> = idempotents.iter().map(|&u| m.rc(u)).collect();
    for (i, &u) in idempotents.iter().enumerate() {
        for (j, &v) in idempotents.iter().enumerate() {
            if !m.leq(u, v) {
                continue;
            }
            for cosets in [(&left[i], &left[j]), (&right[i], &right[j])] {
                let (below, above) = cosets;
                // (g)
                for &a in below {
                    let count = above.iter().filter(|&&b| m.leq(a, b)).count();
                    if count != 1 {
                        r.flag(Axiom::LevelUp, &[u, v, a]);
                    }
                }
                // (h)
                if u != v {
                    for &b in above {
                        let count = below.iter().filter(|&&a| m.leq(a, b)).count();
                        if count < 2 {
                            r.flag(Axiom::LevelDown, &[u, v, b]);
                        }
                    }
                }
            }
        }
    }
}
