//! Finite meet groupoids stored as explicit tables.
//!
//! Element id 0 is reserved for the least element ∅. Products are partial:
//! an undefined product is an ordinary outcome ([`Product::Undefined`]), not
//! an error; only out-of-range ids are errors.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Id of the least element ∅.
pub const EMPTY: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Product {
    Defined(usize),
    Undefined,
}

impl Product {
    pub fn defined(self) -> Option<usize> {
        match self {
            Product::Defined(c) => Some(c),
            Product::Undefined => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeetGroupoid {
    size: usize,
    inverse: Vec<usize>,
    meet: Vec<usize>,
    product: Vec<Option<usize>>,
    labels: Option<Vec<String>>,
}

/// JSON interchange format. `product` lists only the defined triples `[a, b, a·b]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidJson {
    pub size: usize,
    pub inverse: Vec<usize>,
    pub meet: Vec<Vec<usize>>,
    pub product: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl MeetGroupoid {
    /// Assembles a groupoid from tables, checking only shapes and id ranges;
    /// the algebraic axioms are the business of [`check_axioms`](crate::axioms::check_axioms).
    pub fn from_tables(
        size: usize,
        inverse: Vec<usize>,
        meet: Vec<Vec<usize>>,
        product: &[[usize; 3]],
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::Malformed("carrier must contain ∅".into()));
        }
        if inverse.len() != size {
            return Err(Error::Malformed(format!(
                "inverse has {} entries, expected {size}",
                inverse.len()
            )));
        }
        if meet.len() != size || meet.iter().any(|row| row.len() != size) {
            return Err(Error::Malformed(format!(
                "meet table must be {size}×{size}"
            )));
        }
        if let Some(l) = &labels {
            if l.len() != size {
                return Err(Error::Malformed(format!(
                    "{} labels for {size} elements",
                    l.len()
                )));
            }
        }
        let check = |id: usize| {
            if id < size {
                Ok(id)
            } else {
                Err(Error::InvalidId { id, size })
            }
        };
        for &x in &inverse {
            check(x)?;
        }
        let mut flat_meet = Vec::with_capacity(size * size);
        for row in &meet {
            for &x in row {
                flat_meet.push(check(x)?);
            }
        }
        let mut table = vec![None; size * size];
        for &[a, b, c] in product {
            check(a)?;
            check(b)?;
            check(c)?;
            if table[a * size + b].replace(c).is_some_and(|old| old != c) {
                return Err(Error::Malformed(format!(
                    "conflicting products for ({a}, {b})"
                )));
            }
        }
        Ok(MeetGroupoid {
            size,
            inverse,
            meet: flat_meet,
            product: table,
            labels,
        })
    }

    pub(crate) fn from_flat(
        size: usize,
        inverse: Vec<usize>,
        meet: Vec<usize>,
        product: Vec<Option<usize>>,
        labels: Option<Vec<String>>,
    ) -> Self {
        debug_assert_eq!(meet.len(), size * size);
        debug_assert_eq!(product.len(), size * size);
        MeetGroupoid {
            size,
            inverse,
            meet,
            product,
            labels,
        }
    }

    pub fn from_json(json: &GroupoidJson) -> Result<Self> {
        MeetGroupoid::from_tables(
            json.size,
            json.inverse.clone(),
            json.meet.clone(),
            &json.product,
            json.labels.clone(),
        )
    }

    pub fn to_json(&self) -> GroupoidJson {
        GroupoidJson {
            size: self.size,
            inverse: self.inverse.clone(),
            meet: self.meet.chunks(self.size).map(<[usize]>::to_vec).collect(),
            product: self.defined_products().map(|(a, b, c)| [a, b, c]).collect(),
            labels: self.labels.clone(),
        }
    }

    /// A one-object groupoid: ∅ and a single idempotent.
    pub fn single_idempotent() -> Self {
        MeetGroupoid::from_flat(
            2,
            vec![0, 1],
            vec![0, 0, 0, 1],
            vec![Some(0), None, None, Some(1)],
            None,
        )
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, a: usize) -> String {
        match &self.labels {
            Some(l) => l[a].clone(),
            None if a == EMPTY => "∅".into(),
            None => a.to_string(),
        }
    }

    fn check_id(&self, id: usize) -> Result<()> {
        if id < self.size {
            Ok(())
        } else {
            Err(Error::InvalidId {
                id,
                size: self.size,
            })
        }
    }

    pub fn product(&self, a: usize, b: usize) -> Result<Product> {
        self.check_id(a)?;
        self.check_id(b)?;
        Ok(match self.mul(a, b) {
            Some(c) => Product::Defined(c),
            None => Product::Undefined,
        })
    }

    pub fn meet(&self, a: usize, b: usize) -> Result<usize> {
        self.check_id(a)?;
        self.check_id(b)?;
        Ok(self.wedge(a, b))
    }

    pub fn inverse(&self, a: usize) -> Result<usize> {
        self.check_id(a)?;
        Ok(self.inverse[a])
    }

    pub(crate) fn mul(&self, a: usize, b: usize) -> Option<usize> {
        self.product[a * self.size + b]
    }

    pub(crate) fn wedge(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size + b]
    }

    pub(crate) fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `a ⊆ b`, i.e. `a ∧ b = a`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.wedge(a, b) == a
    }

    pub fn defined_products(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.product
            .iter()
            .enumerate()
            .filter_map(move |(k, c)| c.map(|c| (k / self.size, k % self.size, c)))
    }

    pub fn is_idempotent(&self, a: usize) -> bool {
        a != EMPTY && self.mul(a, a) == Some(a)
    }

    /// All non-empty `U` with `U·U = U`, ascending.
    pub fn idempotents(&self) -> Vec<usize> {
        (1..self.size).filter(|&a| self.is_idempotent(a)).collect()
    }

    /// `LC(U) = {A : A·U = A}`.
    pub fn left_star_cosets(&self, u: usize) -> Result<Vec<usize>> {
        self.check_id(u)?;
        if !self.is_idempotent(u) {
            return Err(Error::NotIdempotent(u));
        }
        Ok(self.lc(u))
    }

    /// `RC(U) = {B : U·B = B}`.
    pub fn right_star_cosets(&self, u: usize) -> Result<Vec<usize>> {
        self.check_id(u)?;
        if !self.is_idempotent(u) {
            return Err(Error::NotIdempotent(u));
        }
        Ok(self.rc(u))
    }

    pub(crate) fn lc(&self, u: usize) -> Vec<usize> {
        (1..self.size)
            .filter(|&a| self.mul(a, u) == Some(a))
            .collect()
    }

    pub(crate) fn rc(&self, u: usize) -> Vec<usize> {
        (1..self.size)
            .filter(|&b| self.mul(u, b) == Some(b))
            .collect()
    }

    /// `(U, V)` with `A` a left `U` and right `V` *coset: `U = A⁻¹·A`, `V = A·A⁻¹`.
    pub fn coset_frame(&self, a: usize) -> Result<(usize, usize)> {
        self.check_id(a)?;
        if a == EMPTY {
            return Err(Error::EmptyElement);
        }
        let ai = self.inv(a);
        match (self.mul(ai, a), self.mul(a, ai)) {
            (Some(u), Some(v)) => Ok((u, v)),
            _ => Err(Error::Malformed(format!(
                "{} · {}⁻¹ is undefined",
                self.label(a),
                self.label(a)
            ))),
        }
    }

    /// The unique left `V` *coset above `A`. Fails (rather than guessing)
    /// when there is none or more than one, i.e. when `M` is not full.
    pub fn level_up(&self, a: usize, v: usize) -> Result<usize> {
        let (u, _) = self.coset_frame(a)?;
        self.check_id(v)?;
        if !self.is_idempotent(v) {
            return Err(Error::NotIdempotent(v));
        }
        if !self.leq(u, v) {
            return Err(Error::NotFull(format!(
                "frame {} of {} is not below {}",
                self.label(u),
                self.label(a),
                self.label(v)
            )));
        }
        let above: Vec<usize> = self.lc(v).into_iter().filter(|&b| self.leq(a, b)).collect();
        match above.as_slice() {
            [b] => Ok(*b),
            _ => Err(Error::NotFull(format!(
                "{} left *cosets of {} lie above {}",
                above.len(),
                self.label(v),
                self.label(a)
            ))),
        }
    }

    /// Number of elements below `a` (including ∅ and `a`).
    pub fn down_set_size(&self, a: usize) -> usize {
        (0..self.size).filter(|&x| self.leq(x, a)).count()
    }

    /// Graphviz rendering of the idempotents ordered by inclusion, with an
    /// edge `U -> V` for each covering pair `U ⊊ V`.
    pub fn idempotent_dot(&self) -> String {
        let ids = self.idempotents();
        let mut out = String::from("digraph idempotents {\n  rankdir=BT;\n");
        for &u in &ids {
            let _ = writeln!(
                out,
                "  n{u} [label=\"{}\"];",
                self.label(u).replace('"', "\\\"")
            );
        }
        for &u in &ids {
            for &v in &ids {
                if u == v || !self.leq(u, v) {
                    continue;
                }
                let covered = ids
                    .iter()
                    .any(|&w| w != u && w != v && self.leq(u, w) && self.leq(w, v));
                if !covered {
                    let _ = writeln!(out, "  n{u} -> n{v};");
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// Applies a single-entry edit to a copy of the tables.
    pub fn mutated(&self, m: &Mutation) -> MeetGroupoid {
        let mut out = self.clone();
        match *m {
            Mutation::Product { a, b, value } => out.product[a * self.size + b] = value,
            Mutation::Meet { a, b, value } => out.meet[a * self.size + b] = value,
            Mutation::Inverse { a, value } => out.inverse[a] = value,
        }
        out
    }

    /// A uniformly chosen table cell set to a different value. For product
    /// cells the alternatives include "undefined".
    pub fn random_mutation<R: Rng>(&self, rng: &mut R) -> Mutation {
        let m = self.size;
        assert!(
            m >= 2,
            "a one-element carrier has no distinct alternative values"
        );
        let cells = m * m * 2 + m;
        let k = rng.gen_range(0..cells);
        let other = |rng: &mut R, current: usize| {
            let x = rng.gen_range(0..m - 1);
            if x >= current {
                x + 1
            } else {
                x
            }
        };
        if k < m * m {
            let (a, b) = (k / m, k % m);
            let current = self.mul(a, b);
            // m + 1 choices: every id or undefined
            let value = loop {
                let x = rng.gen_range(0..=m);
                let candidate = (x < m).then_some(x);
                if candidate != current {
                    break candidate;
                }
            };
            Mutation::Product { a, b, value }
        } else if k < 2 * m * m {
            let k = k - m * m;
            let (a, b) = (k / m, k % m);
            Mutation::Meet {
                a,
                b,
                value: other(rng, self.wedge(a, b)),
            }
        } else {
            let a = k - 2 * m * m;
            Mutation::Inverse {
                a,
                value: other(rng, self.inv(a)),
            }
        }
    }
}

/// A single-entry edit of a groupoid's tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "table", rename_all = "lowercase")]
pub enum Mutation {
    Product {
        a: usize,
        b: usize,
        value: Option<usize>,
    },
    Meet {
        a: usize,
        b: usize,
        value: usize,
    },
    Inverse {
        a: usize,
        value: usize,
    },
}

/// Checks that `map` is a bijection of carriers preserving product
/// (including undefinedness), inverse and meet; returns a description of the
/// first failure.
pub fn check_isomorphism(m: &MeetGroupoid, n: &MeetGroupoid, map: &[usize]) -> Result<()> {
    let fail = |msg: String| Err(Error::NotAnIsomorphism(msg));
    if m.size() != n.size() || map.len() != m.size() {
        return fail(format!("carrier sizes {} and {}", m.size(), n.size()));
    }
    let mut seen = vec![false; n.size()];
    for &y in map {
        if y >= n.size() || std::mem::replace(&mut seen[y], true) {
            return fail("map is not a bijection".into());
        }
    }
    for a in 0..m.size() {
        if map[m.inv(a)] != n.inv(map[a]) {
            return fail(format!("inverse of {}", m.label(a)));
        }
        for b in 0..m.size() {
            if map[m.wedge(a, b)] != n.wedge(map[a], map[b]) {
                return fail(format!("meet of ({}, {})", m.label(a), m.label(b)));
            }
            if m.mul(a, b).map(|c| map[c]) != n.mul(map[a], map[b]) {
                return fail(format!("product of ({}, {})", m.label(a), m.label(b)));
            }
        }
    }
    Ok(())
}

/// Searches for an isomorphism `m → n`. Elements are matched only within
/// classes of equal invariants (idempotency, sizes of the down-set, up-set
/// and frame down-sets); every assignment propagates the images it forces
/// through meets, products and inverses before branching further.
pub fn find_isomorphism(
    m: &MeetGroupoid,
    n: &MeetGroupoid,
    caps: &crate::Caps,
) -> Result<Option<Vec<usize>>> {
    if m.size() > caps.isomorphism_carrier {
        return Err(Error::CapExceeded {
            what: "carrier size for the isomorphism search",
            limit: caps.isomorphism_carrier,
            actual: m.size(),
        });
    }
    if m.size() != n.size() {
        return Ok(None);
    }
    let (im, inn) = (invariants(m), invariants(n));
    let mut sorted_m = im.clone();
    let mut sorted_n = inn.clone();
    sorted_m.sort();
    sorted_n.sort();
    if sorted_m != sorted_n {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..m.size()).collect();
    order.sort_by_key(|&a| (std::cmp::Reverse(im[a]), a));
    let state = IsoState {
        map: vec![None; m.size()],
        used: vec![false; n.size()],
        assigned: Vec::new(),
    };
    Ok(extend_iso(m, n, &im, &inn, &order, state))
}

type Invariant = (bool, usize, usize, usize, usize);

fn invariants(m: &MeetGroupoid) -> Vec<Invariant> {
    let up = |a: usize| (0..m.size()).filter(|&x| m.leq(a, x)).count();
    (0..m.size())
        .map(|a| {
            let (l, r) = if a == EMPTY {
                (0, 0)
            } else {
                (
                    m.mul(m.inv(a), a).map_or(0, |u| m.down_set_size(u)),
                    m.mul(a, m.inv(a)).map_or(0, |u| m.down_set_size(u)),
                )
            };
            (m.is_idempotent(a), m.down_set_size(a), up(a), l, r)
        })
        .collect()
}

#[derive(Clone)]
struct IsoState {
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    assigned: Vec<usize>,
}

fn assign(
    m: &MeetGroupoid,
    n: &MeetGroupoid,
    im: &[Invariant],
    inn: &[Invariant],
    s: &mut IsoState,
    a: usize,
    x: usize,
) -> bool {
    let mut queue = vec![(a, x)];
    while let Some((a, x)) = queue.pop() {
        match s.map[a] {
            Some(y) if y == x => continue,
            Some(_) => return false,
            None => {}
        }
        if s.used[x] || im[a] != inn[x] {
            return false;
        }
        s.map[a] = Some(x);
        s.used[x] = true;
        s.assigned.push(a);
        queue.push((m.inv(a), n.inv(x)));
        for k in 0..s.assigned.len() {
            let b = s.assigned[k];
            let y = s.map[b].unwrap();
            queue.push((m.wedge(a, b), n.wedge(x, y)));
            for ((p, q), (pn, qn)) in [((a, b), (x, y)), ((b, a), (y, x))] {
                match (m.mul(p, q), n.mul(pn, qn)) {
                    (Some(c), Some(z)) => queue.push((c, z)),
                    (None, None) => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

fn extend_iso(
    m: &MeetGroupoid,
    n: &MeetGroupoid,
    im: &[Invariant],
    inn: &[Invariant],
    order: &[usize],
    state: IsoState,
) -> Option<Vec<usize>> {
    let Some(&a) = order.iter().find(|&&a| state.map[a].is_none()) else {
        let map: Vec<usize> = state.map.iter().map(|x| x.unwrap()).collect();
        return check_isomorphism(m, n, &map).is_ok().then_some(map);
    };
    for x in 0..n.size() {
        if state.used[x] || im[a] != inn[x] {
            continue;
        }
        let mut next = state.clone();
        if assign(m, n, im, inn, &mut next, a, x) {
            if let Some(found) = extend_iso(m, n, im, inn, order, next) {
                return Some(found);
            }
        }
    }
    None
}
