//! Subgroups as sorted sets of element indices, their cosets, and families of
//! subgroups used as bases.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::PermGroup;

/// A subgroup of some parent group, as the sorted indices of its elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    /// Checks that `elements` is a subgroup of `group`.
    pub fn new(group: &PermGroup, elements: Vec<usize>) -> Result<Self> {
        let mut elements = elements;
        elements.sort_unstable();
        elements.dedup();
        if let Some(&bad) = elements.iter().find(|&&x| x >= group.order()) {
            return Err(Error::NotAMember(bad));
        }
        if elements.first() != Some(&0) {
            return Err(Error::NotASubgroup("missing the identity".into()));
        }
        let set = Subgroup { elements };
        for &a in &set.elements {
            if !set.contains(group.inv(a)) {
                return Err(Error::NotASubgroup(format!(
                    "not closed under inverse at {a}"
                )));
            }
            for &b in &set.elements {
                if !set.contains(group.mul(a, b)) {
                    return Err(Error::NotASubgroup(format!(
                        "not closed under product at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(set)
    }

    #[cfg(test)]
    pub(crate) fn from_sorted_unchecked(elements: Vec<usize>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        Subgroup { elements }
    }

    pub fn whole(group: &PermGroup) -> Self {
        Subgroup {
            elements: (0..group.order()).collect(),
        }
    }

    pub fn trivial() -> Self {
        Subgroup { elements: vec![0] }
    }

    pub fn generated(group: &PermGroup, gens: &[usize]) -> Self {
        Subgroup {
            elements: group.generated_by(gens),
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        Subgroup {
            elements: self
                .elements
                .iter()
                .copied()
                .filter(|&x| other.contains(x))
                .collect(),
        }
    }

    pub fn is_normal_in(&self, group: &PermGroup) -> bool {
        (0..group.order()).all(|g| {
            self.elements
                .iter()
                .all(|&h| self.contains(group.conjugate(g, h)))
        })
    }
}

/// All subgroups, sorted by (order, element list).
///
/// Every subgroup is reached from the trivial one by repeatedly adjoining a
/// single element, so the search closes a frontier under `H ↦ ⟨H, g⟩`.
pub fn enumerate_subgroups(group: &PermGroup, caps: &Caps) -> Result<Vec<Subgroup>> {
    if group.order() > caps.subgroups {
        return Err(Error::CapExceeded {
            what: "group order for subgroup enumeration",
            limit: caps.subgroups,
            actual: group.order(),
        });
    }
    let mut found: BTreeSet<Subgroup> = BTreeSet::new();
    let trivial = Subgroup::trivial();
    found.insert(trivial.clone());
    let mut frontier = vec![trivial];
    while let Some(h) = frontier.pop() {
        for g in 0..group.order() {
            if h.contains(g) {
                continue;
            }
            let mut gens = h.elements.clone();
            gens.push(g);
            let k = Subgroup::generated(group, &gens);
            if found.insert(k.clone()) {
                frontier.push(k);
            }
        }
    }
    let mut out: Vec<Subgroup> = found.into_iter().collect();
    out.sort_by(|a, b| {
        a.order()
            .cmp(&b.order())
            .then_with(|| a.elements.cmp(&b.elements))
    });
    Ok(out)
}

/// Left coset `gH` as a sorted index set.
pub fn left_coset(group: &PermGroup, g: usize, h: &Subgroup) -> Vec<usize> {
    let mut set: Vec<usize> = h.elements.iter().map(|&x| group.mul(g, x)).collect();
    set.sort_unstable();
    set
}

/// Partition of the group into left cosets `gH`, each sorted, ordered by
/// representative (the least element index, i.e. the lexicographically least
/// permutation in the coset).
pub fn left_cosets(group: &PermGroup, h: &Subgroup) -> Result<Vec<Vec<usize>>> {
    Subgroup::new(group, h.elements.clone())?;
    let mut covered = vec![false; group.order()];
    let mut out = Vec::with_capacity(group.order() / h.order());
    for g in 0..group.order() {
        if covered[g] {
            continue;
        }
        let coset = left_coset(group, g, h);
        for &x in &coset {
            covered[x] = true;
        }
        out.push(coset);
    }
    Ok(out)
}

/// `gHg⁻¹`.
pub fn conjugate_subgroup(group: &PermGroup, g: usize, h: &Subgroup) -> Result<Subgroup> {
    if g >= group.order() {
        return Err(Error::NotAMember(g));
    }
    if let Some(&bad) = h.elements.iter().find(|&&x| x >= group.order()) {
        return Err(Error::NotAMember(bad));
    }
    let mut elements: Vec<usize> = h.elements.iter().map(|&x| group.conjugate(g, x)).collect();
    elements.sort_unstable();
    Ok(Subgroup { elements })
}

/// Number of double cosets `H g K`.
pub fn double_coset_count(group: &PermGroup, h: &Subgroup, k: &Subgroup) -> usize {
    let mut covered = vec![false; group.order()];
    let mut count = 0;
    for g in 0..group.order() {
        if covered[g] {
            continue;
        }
        count += 1;
        for &a in h.elements() {
            let ag = group.mul(a, g);
            for &b in k.elements() {
                covered[group.mul(ag, b)] = true;
            }
        }
    }
    count
}

/// A subgroup is Roelcke precompact when it has finitely many double cosets
/// in the ambient group; for a finite group the count is always finite, so
/// this returns the count as the witness.
pub fn roelcke_precompact_witness(group: &PermGroup, h: &Subgroup) -> Option<usize> {
    Some(double_coset_count(group, h, h))
}

/// A family of subgroups with recomputed closure flags.
///
/// Members are deduplicated and kept in canonical order: order descending,
/// then element list ascending. That order fixes the carrier numbering of
/// coset groupoids and the Ω labelling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupFamily {
    members: Vec<Subgroup>,
    meet_closed: bool,
    conjugation_closed: bool,
    separating: bool,
}

impl SubgroupFamily {
    pub fn new(group: &PermGroup, members: Vec<Subgroup>) -> Result<Self> {
        let mut members = members
            .into_iter()
            .map(|m| Subgroup::new(group, m.elements))
            .collect::<Result<Vec<_>>>()?;
        members.sort_by(|a, b| {
            b.order()
                .cmp(&a.order())
                .then_with(|| a.elements.cmp(&b.elements))
        });
        members.dedup();
        let set: HashSet<&Subgroup> = members.iter().collect();
        let meet_closed = members
            .iter()
            .all(|a| members.iter().all(|b| set.contains(&a.intersect(b))));
        let conjugation_closed = members.iter().all(|h| {
            (0..group.order()).all(|g| set.contains(&conjugate_subgroup(group, g, h).unwrap()))
        });
        let separating = !members.is_empty() && Self::intersection_of(&members).is_trivial();
        Ok(SubgroupFamily {
            members,
            meet_closed,
            conjugation_closed,
            separating,
        })
    }

    /// Every subgroup of the group.
    pub fn all_subgroups(group: &PermGroup, caps: &Caps) -> Result<Self> {
        SubgroupFamily::new(group, enumerate_subgroups(group, caps)?)
    }

    /// `{G, {e}}`.
    pub fn minimal(group: &PermGroup) -> Result<Self> {
        SubgroupFamily::new(group, vec![Subgroup::whole(group), Subgroup::trivial()])
    }

    /// The derived series of the group with the trivial subgroup appended: a
    /// chain of characteristic subgroups, hence meet-, conjugation- and
    /// automorphism-invariant, and separating.
    pub fn derived_chain(group: &PermGroup) -> Result<Self> {
        let mut chain = vec![Subgroup::whole(group)];
        loop {
            let last = chain.last().unwrap();
            let commutators: Vec<usize> = last
                .elements()
                .iter()
                .flat_map(|&a| last.elements().iter().map(move |&b| (a, b)))
                .map(|(a, b)| group.mul(group.mul(a, b), group.mul(group.inv(a), group.inv(b))))
                .collect();
            let next = Subgroup::generated(group, &commutators);
            if next == *last {
                break;
            }
            chain.push(next);
        }
        chain.push(Subgroup::trivial());
        SubgroupFamily::new(group, chain)
    }

    pub fn members(&self) -> &[Subgroup] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn meet_closed(&self) -> bool {
        self.meet_closed
    }

    pub fn conjugation_closed(&self) -> bool {
        self.conjugation_closed
    }

    pub fn separating(&self) -> bool {
        self.separating
    }

    pub fn position(&self, h: &Subgroup) -> Option<usize> {
        self.members.iter().position(|m| m == h)
    }

    /// `⋂ members`; for a conjugation-closed family this is a normal subgroup.
    pub fn intersection(&self) -> Subgroup {
        Self::intersection_of(&self.members)
    }

    fn intersection_of(members: &[Subgroup]) -> Subgroup {
        let mut it = members.iter();
        match it.next() {
            None => Subgroup::trivial(),
            Some(first) => it.fold(first.clone(), |acc, m| acc.intersect(m)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;
    use proptest::prelude::*;

    fn gen(n: usize, gens: &[&str]) -> PermGroup {
        let gens: Vec<Perm> = gens
            .iter()
            .map(|s| Perm::parse_cycles(n, s).unwrap())
            .collect();
        PermGroup::generate(n, &gens, &Caps::default()).unwrap()
    }

    fn s3() -> PermGroup {
        gen(3, &["(0 1)", "(0 1 2)"])
    }

    fn idx(g: &PermGroup, s: &str) -> usize {
        g.index_of(&Perm::parse_cycles(g.degree(), s).unwrap())
            .unwrap()
    }

    /// Independent oracle: every subset closed under the product that contains
    /// the identity, by bitmask enumeration.
    fn subsets_oracle(g: &PermGroup) -> Vec<Vec<usize>> {
        let n = g.order();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask & 1 == 0 {
                continue;
            }
            let els: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if els
                .iter()
                .all(|&a| els.iter().all(|&b| mask >> g.mul(a, b) & 1 == 1))
            {
                out.push(els);
            }
        }
        out
    }

    #[test]
    fn cyclic_four_subgroups() {
        let g = gen(4, &["(0 1 2 3)"]);
        let subs = enumerate_subgroups(&g, &Caps::default()).unwrap();
        let orders: Vec<usize> = subs.iter().map(Subgroup::order).collect();
        assert_eq!(orders, vec![1, 2, 4]);
        assert_eq!(subs.len(), subsets_oracle(&g).len());
    }

    #[test]
    fn trivial_group_subgroups() {
        let g = PermGroup::trivial(1);
        let subs = enumerate_subgroups(&g, &Caps::default()).unwrap();
        assert_eq!(subs, vec![Subgroup::trivial()]);
    }

    #[test]
    fn s3_subgroups() {
        let g = s3();
        let subs = enumerate_subgroups(&g, &Caps::default()).unwrap();
        let orders: Vec<usize> = subs.iter().map(Subgroup::order).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 3, 6]);
        let mut oracle = subsets_oracle(&g);
        oracle.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let ours: Vec<Vec<usize>> = subs.iter().map(|s| s.elements().to_vec()).collect();
        assert_eq!(ours, oracle);
    }

    #[test]
    fn subgroup_cap() {
        let g = s3();
        let caps = Caps {
            subgroups: 5,
            ..Caps::default()
        };
        assert!(matches!(
            enumerate_subgroups(&g, &caps),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn cosets_of_z4() {
        // Z/4 indexed so element k is rotation by k
        let g = gen(4, &["(0 1 2 3)"]);
        let h = Subgroup::new(&g, vec![0, 2]).unwrap();
        assert_eq!(left_cosets(&g, &h).unwrap(), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(
            left_cosets(&g, &Subgroup::whole(&g)).unwrap(),
            vec![vec![0, 1, 2, 3]]
        );
    }

    #[test]
    fn cosets_of_order_two_in_s3() {
        let g = s3();
        let h = Subgroup::generated(&g, &[idx(&g, "(0 1)")]);
        let cosets = left_cosets(&g, &h).unwrap();
        assert_eq!(cosets.len(), 3);
        assert!(cosets.iter().all(|c| c.len() == 2));
    }

    #[test]
    fn left_cosets_rejects_non_subgroup() {
        let g = s3();
        let bogus = Subgroup::from_sorted_unchecked(vec![0, 1, 2]);
        assert!(left_cosets(&g, &bogus).is_err());
    }

    #[test]
    fn conjugation_examples() {
        let g = s3();
        let h = Subgroup::generated(&g, &[idx(&g, "(0 1)")]);
        assert_eq!(conjugate_subgroup(&g, 0, &h).unwrap(), h);
        let expected = Subgroup::generated(&g, &[idx(&g, "(1 2)")]);
        assert_eq!(
            conjugate_subgroup(&g, idx(&g, "(0 1 2)"), &h).unwrap(),
            expected
        );
        let z4 = gen(4, &["(0 1 2 3)"]);
        let k = Subgroup::new(&z4, vec![0, 2]).unwrap();
        for x in 0..4 {
            assert_eq!(conjugate_subgroup(&z4, x, &k).unwrap(), k);
        }
    }

    #[test]
    fn family_flags() {
        let g = s3();
        let all = SubgroupFamily::all_subgroups(&g, &Caps::default()).unwrap();
        assert!(all.meet_closed() && all.conjugation_closed() && all.separating());
        assert_eq!(all.members()[0].order(), 6);
        let h = Subgroup::generated(&g, &[idx(&g, "(0 1)")]);
        let lone = SubgroupFamily::new(&g, vec![h]).unwrap();
        assert!(lone.meet_closed());
        assert!(!lone.conjugation_closed());
        assert!(!lone.separating());
        let a3 = Subgroup::generated(&g, &[idx(&g, "(0 1 2)")]);
        let chain = SubgroupFamily::derived_chain(&g).unwrap();
        assert_eq!(
            chain.members(),
            &[Subgroup::whole(&g), a3, Subgroup::trivial()]
        );
    }

    #[test]
    fn double_cosets_are_finite() {
        let g = s3();
        let h = Subgroup::generated(&g, &[idx(&g, "(0 1)")]);
        // S3 = H ∪ H(0 2)H
        assert_eq!(double_coset_count(&g, &h, &h), 2);
        assert_eq!(
            roelcke_precompact_witness(&g, &Subgroup::trivial()),
            Some(6)
        );
    }

    proptest! {
        #[test]
        fn cosets_partition_group(pick in 0usize..10) {
            let g = gen(4, &["(0 1 2 3)", "(0 2)"]);
            let subs = enumerate_subgroups(&g, &Caps::default()).unwrap();
            let h = &subs[pick % subs.len()];
            let cosets = left_cosets(&g, h).unwrap();
            let mut all: Vec<usize> = cosets.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..g.order()).collect::<Vec<_>>());
            prop_assert!(cosets.iter().all(|c| c.len() == h.order()));
            prop_assert_eq!(cosets.len() * h.order(), g.order());
        }

        #[test]
        fn conjugation_round_trip(pick in 0usize..30, g_idx in 0usize..24) {
            let g = gen(4, &["(0 1)", "(0 1 2 3)"]);
            let subs = enumerate_subgroups(&g, &Caps::default()).unwrap();
            let h = &subs[pick % subs.len()];
            let x = g_idx % g.order();
            let there = conjugate_subgroup(&g, g.inv(x), h).unwrap();
            prop_assert_eq!(&conjugate_subgroup(&g, x, &there).unwrap(), h);
        }
    }
}
