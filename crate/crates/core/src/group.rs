//! Fully enumerated finite permutation groups.
//!
//! Elements are addressed by their position in the canonical (lexicographic)
//! element order, so index 0 is always the identity.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::perm::Perm;

/// Multiplication tables are cached up to this order.
const TABLE_LIMIT: usize = 512;

#[derive(Clone)]
pub struct PermGroup {
    name: String,
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    table: Option<Vec<u32>>,
    inverses: Vec<usize>,
}

/// On-disk group format: `{"degree": n, "generators": [[images...], ...], "name": str}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
    #[serde(default)]
    pub name: String,
}

/// The subgroup generated by `gens`, enumerated by breadth-first closure.
pub fn close_generators(degree: usize, gens: &[Perm], caps: &Caps) -> Result<PermGroup> {
    PermGroup::generate(degree, gens, caps)
}

impl PermGroup {
    pub fn generate(degree: usize, gens: &[Perm], caps: &Caps) -> Result<Self> {
        for g in gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
        }
        let identity = Perm::identity(degree);
        let mut seen: HashSet<Perm> = HashSet::from([identity.clone()]);
        let mut frontier = vec![identity];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = g.compose_unchecked(&x);
                if !seen.contains(&y) {
                    if seen.len() >= caps.closure {
                        return Err(Error::CapExceeded {
                            what: "generator closure",
                            limit: caps.closure,
                            actual: seen.len() + 1,
                        });
                    }
                    seen.insert(y.clone());
                    frontier.push(y);
                }
            }
        }
        let mut elements: Vec<Perm> = seen.into_iter().collect();
        elements.sort();
        let mut generators: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        generators.dedup();
        Ok(PermGroup::assemble(
            String::new(),
            degree,
            generators,
            elements,
        ))
    }

    /// Wraps an explicit element list, checking that it is a group.
    /// A small generating set is chosen greedily in element order.
    pub fn from_elements(degree: usize, elements: Vec<Perm>) -> Result<Self> {
        let mut elements = elements;
        elements.sort();
        elements.dedup();
        if let Some(p) = elements.iter().find(|p| p.degree() != degree) {
            return Err(Error::DegreeMismatch {
                left: degree,
                right: p.degree(),
            });
        }
        if elements.first().is_none_or(|p| !p.is_identity()) {
            return Err(Error::NotASubgroup(
                "element list lacks the identity".into(),
            ));
        }
        let generators = greedy_generators(degree, &elements)?;
        Ok(PermGroup::assemble(
            String::new(),
            degree,
            generators,
            elements,
        ))
    }

    fn assemble(name: String, degree: usize, generators: Vec<Perm>, elements: Vec<Perm>) -> Self {
        let index: HashMap<Perm, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let inverses = elements.iter().map(|p| index[&p.inverse()]).collect();
        let n = elements.len();
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(n * n);
            for a in &elements {
                for b in &elements {
                    t.push(index[&a.compose_unchecked(b)] as u32);
                }
            }
            t
        });
        PermGroup {
            name,
            degree,
            generators,
            elements,
            index,
            table,
            inverses,
        }
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::assemble(
            "trivial".into(),
            degree,
            Vec::new(),
            vec![Perm::identity(degree)],
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains_key(p)
    }

    /// Index of `elements[a] ∘ elements[b]`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.elements.len() + b] as usize,
            None => self.index[&self.elements[a].compose_unchecked(&self.elements[b])],
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// `g h g⁻¹`.
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().all(|a| {
            self.generators
                .iter()
                .all(|b| a.compose_unchecked(b) == b.compose_unchecked(a))
        })
    }

    /// Indices of the centre Z(G), by brute force.
    pub fn center(&self) -> Vec<usize> {
        (0..self.order())
            .filter(|&z| (0..self.order()).all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }

    /// Indices of the subgroup generated by the given element indices.
    pub fn generated_by(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut frontier = vec![0];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(g, x);
                if !seen[y] {
                    seen[y] = true;
                    frontier.push(y);
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }

    pub fn to_spec(&self) -> GroupSpec {
        GroupSpec {
            degree: self.degree,
            generators: self
                .generators
                .iter()
                .map(|g| g.images().to_vec())
                .collect(),
            name: self.name.clone(),
        }
    }

    pub fn from_spec(spec: &GroupSpec, caps: &Caps) -> Result<Self> {
        let gens = spec
            .generators
            .iter()
            .map(|g| Perm::new(g.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(PermGroup::generate(spec.degree, &gens, caps)?.with_name(spec.name.clone()))
    }

    /// Left regular representation: `g` acts on element indices by `i ↦ index(g·eᵢ)`.
    pub fn regular_representation(&self) -> Result<PermGroup> {
        let n = self.order();
        let elements = (0..n)
            .map(|g| Perm::from_images_unchecked((0..n).map(|i| self.mul(g, i)).collect()))
            .collect();
        Ok(PermGroup::from_elements(n, elements)?.with_name(self.name.clone()))
    }
}

/// Picks generators in element order; fails as soon as a product leaves the set.
fn greedy_generators(degree: usize, elements: &[Perm]) -> Result<Vec<Perm>> {
    let members: HashSet<&Perm> = elements.iter().collect();
    let mut gens: Vec<Perm> = Vec::new();
    let mut span: HashSet<Perm> = HashSet::from([Perm::identity(degree)]);
    for p in elements {
        if span.contains(p) {
            continue;
        }
        gens.push(p.clone());
        let mut frontier: Vec<Perm> = span.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = g.compose_unchecked(&x);
                if !span.contains(&y) {
                    if !members.contains(&y) {
                        return Err(Error::NotASubgroup(format!(
                            "product {g} * {x} falls outside the set"
                        )));
                    }
                    span.insert(y.clone());
                    frontier.push(y);
                }
            }
        }
    }
    Ok(gens)
}

impl std::fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PermGroup")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

/// A homomorphism between two enumerated groups, stored as a map of element indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHom {
    map: Vec<usize>,
}

impl GroupHom {
    /// Validates `map(xy) = map(x)map(y)` over all pairs.
    pub fn new(source: &PermGroup, target: &PermGroup, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.order() {
            return Err(Error::NotHomomorphism(format!(
                "map has {} entries for a group of order {}",
                map.len(),
                source.order()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= target.order()) {
            return Err(Error::NotAMember(bad));
        }
        for x in 0..source.order() {
            for y in 0..source.order() {
                if map[source.mul(x, y)] != target.mul(map[x], map[y]) {
                    return Err(Error::NotHomomorphism(format!(
                        "fails on the pair ({}, {})",
                        source.element(x),
                        source.element(y)
                    )));
                }
            }
        }
        Ok(GroupHom { map })
    }

    pub(crate) fn from_map_unchecked(map: Vec<usize>) -> Self {
        GroupHom { map }
    }

    /// The homomorphism sending `source`'s generators to `images` (element
    /// indices of `target`), extended along the Cayley graph and then validated.
    pub fn from_generator_images(
        source: &PermGroup,
        target: &PermGroup,
        images: &[usize],
    ) -> Result<Self> {
        let gens: Vec<usize> = source
            .generators()
            .iter()
            .map(|g| source.index_of(g).expect("generator is an element"))
            .collect();
        if gens.len() != images.len() {
            return Err(Error::NotHomomorphism(format!(
                "{} generator images for {} generators",
                images.len(),
                gens.len()
            )));
        }
        let mut map = vec![usize::MAX; source.order()];
        map[source.identity()] = target.identity();
        let mut frontier = vec![source.identity()];
        while let Some(x) = frontier.pop() {
            for (&s, &t) in gens.iter().zip(images) {
                let y = source.mul(s, x);
                if map[y] == usize::MAX {
                    map[y] = target.mul(t, map[x]);
                    frontier.push(y);
                }
            }
        }
        GroupHom::new(source, target, map)
    }

    pub fn is_surjective(&self, target: &PermGroup) -> bool {
        let mut seen = vec![false; target.order()];
        for &y in &self.map {
            seen[y] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn identity(group: &PermGroup) -> Self {
        GroupHom {
            map: (0..group.order()).collect(),
        }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.map.len()];
        self.map
            .iter()
            .all(|&y| y < seen.len() && !std::mem::replace(&mut seen[y], true))
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &GroupHom) -> GroupHom {
        GroupHom {
            map: other.map.iter().map(|&x| self.map[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Option<GroupHom> {
        if !self.is_bijective() {
            return None;
        }
        let mut map = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            map[y] = x;
        }
        Some(GroupHom { map })
    }
}

/// Transports `group` along a relabelling `sigma` of its points:
/// returns `σGσ⁻¹` and the isomorphism `g ↦ σgσ⁻¹`.
pub fn relabel(group: &PermGroup, sigma: &Perm) -> Result<(PermGroup, GroupHom)> {
    if sigma.degree() != group.degree() {
        return Err(Error::DegreeMismatch {
            left: group.degree(),
            right: sigma.degree(),
        });
    }
    let images: Vec<Perm> = group
        .elements()
        .iter()
        .map(|g| sigma.conjugate_unchecked(g))
        .collect();
    let target = PermGroup::from_elements(group.degree(), images.clone())?
        .with_name(format!("{}'", group.name()));
    let map = images.iter().map(|p| target.index_of(p).unwrap()).collect();
    Ok((target, GroupHom { map }))
}
