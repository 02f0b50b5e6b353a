//! The coset meet groupoid `W(G)` of a group with a basis of subgroups.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{GroupHom, GroupSpec, PermGroup};
use crate::groupoid::{check_isomorphism, GroupoidJson, MeetGroupoid, EMPTY};
use crate::subgroup::{conjugate_subgroup, Subgroup, SubgroupFamily};

/// Smallest family containing `raw` that is closed under pairwise
/// intersection and conjugation.
pub fn close_basis(group: &PermGroup, raw: &[Subgroup], caps: &Caps) -> Result<SubgroupFamily> {
    if raw.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut members: Vec<Subgroup> = Vec::new();
    let mut queue: Vec<Subgroup> = Vec::new();
    for h in raw {
        let h = Subgroup::new(group, h.elements().to_vec())?;
        if seen.insert(h.elements().to_vec()) {
            queue.push(h);
        }
    }
    while let Some(h) = queue.pop() {
        let mut fresh = Vec::new();
        for g in 0..group.order() {
            fresh.push(conjugate_subgroup(group, g, &h)?);
        }
        for m in &members {
            fresh.push(h.intersect(m));
        }
        members.push(h);
        for k in fresh {
            if seen.insert(k.elements().to_vec()) {
                if seen.len() > caps.closure {
                    return Err(Error::CapExceeded {
                        what: "basis closure",
                        limit: caps.closure,
                        actual: seen.len(),
                    });
                }
                queue.push(k);
            }
        }
    }
    SubgroupFamily::new(group, members)
}

/// Position of a coset: family member and least element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetKey {
    pub member: usize,
    pub representative: usize,
}

#[derive(Debug, Clone)]
pub struct CosetGroupoid {
    groupoid: MeetGroupoid,
    group: PermGroup,
    family: SubgroupFamily,
    keys: Vec<CosetKey>,
    /// `coset_of[i][g]` is the id of `gU_i`.
    coset_of: Vec<Vec<usize>>,
    /// `conj[i][g]` is the member index of `gU_ig⁻¹`.
    conj: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub group: GroupSpec,
    pub basis: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CosetGroupoidJson {
    #[serde(flatten)]
    pub groupoid: GroupoidJson,
    pub provenance: Provenance,
}

/// Builds `W(G)` over the basis `family`, which must be meet- and conjugation-closed.
pub fn build_w(group: &PermGroup, family: &SubgroupFamily) -> Result<CosetGroupoid> {
    if family.is_empty() {
        return Err(Error::EmptyBasis);
    }
    if !family.meet_closed() || !family.conjugation_closed() {
        return Err(Error::BasisNotClosed(format!(
            "meet-closed: {}, conjugation-closed: {}",
            family.meet_closed(),
            family.conjugation_closed()
        )));
    }
    let n = group.order();
    let members = family.members();

    let mut keys = Vec::new();
    let mut coset_of = vec![vec![usize::MAX; n]; members.len()];
    for (i, h) in members.iter().enumerate() {
        for g in 0..n {
            if coset_of[i][g] != usize::MAX {
                continue;
            }
            let id = keys.len() + 1;
            keys.push(CosetKey {
                member: i,
                representative: g,
            });
            for &u in h.elements() {
                coset_of[i][group.mul(g, u)] = id;
            }
        }
    }

    let mut conj = vec![vec![0; n]; members.len()];
    for (i, h) in members.iter().enumerate() {
        for g in 0..n {
            let k = conjugate_subgroup(group, g, h)?;
            conj[i][g] = family
                .position(&k)
                .ok_or_else(|| Error::BasisNotClosed("conjugate missing".into()))?;
        }
    }
    let meet_member: Vec<Vec<usize>> = members
        .iter()
        .map(|a| {
            members
                .iter()
                .map(|b| family.position(&a.intersect(b)).unwrap())
                .collect()
        })
        .collect();

    let size = keys.len() + 1;
    let elements_of = |id: usize| -> Vec<usize> {
        let key = keys[id - 1];
        members[key.member]
            .elements()
            .iter()
            .map(|&u| group.mul(key.representative, u))
            .collect()
    };

    let mut inverse = vec![EMPTY; size];
    // member index of the right frame `gUg⁻¹`
    let mut right_member = vec![usize::MAX; size];
    for id in 1..size {
        let CosetKey {
            member,
            representative: g,
        } = keys[id - 1];
        let c = conj[member][g];
        right_member[id] = c;
        inverse[id] = coset_of[c][group.inv(g)];
    }

    let mut product = vec![None; size * size];
    product[0] = Some(EMPTY);
    for a in 1..size {
        let ka = keys[a - 1];
        for b in 1..size {
            if right_member[b] != ka.member {
                continue;
            }
            // a·U·b = (ab)·(b⁻¹Ub)
            let kb = keys[b - 1];
            product[a * size + b] =
                Some(coset_of[kb.member][group.mul(ka.representative, kb.representative)]);
        }
    }

    let mut meet = vec![EMPTY; size * size];
    let sets: Vec<Vec<usize>> = (0..size)
        .map(|id| if id == 0 { vec![] } else { elements_of(id) })
        .collect();
    for a in 1..size {
        let ka = keys[a - 1];
        for b in a..size {
            let kb = keys[b - 1];
            let common = sets[a].iter().find(|&&x| coset_of[kb.member][x] == b);
            let value = match common {
                Some(&x) => coset_of[meet_member[ka.member][kb.member]][x],
                None => EMPTY,
            };
            meet[a * size + b] = value;
            meet[b * size + a] = value;
        }
    }

    let labels = sets
        .iter()
        .enumerate()
        .map(|(id, s)| {
            if id == 0 {
                "∅".to_string()
            } else {
                let mut s = s.clone();
                s.sort_unstable();
                let body: Vec<String> = s.iter().map(usize::to_string).collect();
                format!("{{{}}}", body.join(","))
            }
        })
        .collect();

    Ok(CosetGroupoid {
        groupoid: MeetGroupoid::from_flat(size, inverse, meet, product, Some(labels)),
        group: group.clone(),
        family: family.clone(),
        keys,
        coset_of,
        conj,
    })
}

impl CosetGroupoid {
    pub fn groupoid(&self) -> &MeetGroupoid {
        &self.groupoid
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn family(&self) -> &SubgroupFamily {
        &self.family
    }

    pub fn size(&self) -> usize {
        self.groupoid.size()
    }

    /// Family member and least element of coset `id`; `None` for ∅.
    pub fn key(&self, id: usize) -> Option<CosetKey> {
        id.checked_sub(1).and_then(|k| self.keys.get(k)).copied()
    }

    /// Id of the left coset `gU` for the family member `member`.
    pub fn coset_id(&self, member: usize, g: usize) -> usize {
        self.coset_of[member][g]
    }

    /// Id of the member subgroup itself.
    pub fn idempotent_of(&self, member: usize) -> usize {
        self.coset_of[member][self.group.identity()]
    }

    /// Member index of `gU_ig⁻¹`.
    pub fn conjugate_member(&self, member: usize, g: usize) -> usize {
        self.conj[member][g]
    }

    /// Sorted group elements of coset `id`.
    pub fn elements(&self, id: usize) -> Vec<usize> {
        match self.key(id) {
            None => Vec::new(),
            Some(key) => {
                let mut out: Vec<usize> = self.family.members()[key.member]
                    .elements()
                    .iter()
                    .map(|&u| self.group.mul(key.representative, u))
                    .collect();
                out.sort_unstable();
                out
            }
        }
    }

    /// Id of a set of group elements, if it is ∅ or a coset of a basis member.
    pub fn id_of_set(&self, set: &[usize]) -> Option<usize> {
        let &first = set.first()?;
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let member = (0..self.family.len()).find(|&i| {
            self.family.members()[i].order() == sorted.len()
                && self.elements(self.coset_of[i][first]) == sorted
        })?;
        Some(self.coset_of[member][first])
    }

    /// Left translation `A ↦ gA`.
    pub fn translate(&self, g: usize, id: usize) -> usize {
        match self.key(id) {
            None => EMPTY,
            Some(key) => self.coset_of[key.member][self.group.mul(g, key.representative)],
        }
    }

    pub fn to_json(&self) -> CosetGroupoidJson {
        CosetGroupoidJson {
            groupoid: self.groupoid.to_json(),
            provenance: Provenance {
                group: self.group.to_spec(),
                basis: self
                    .family
                    .members()
                    .iter()
                    .map(|h| h.elements().to_vec())
                    .collect(),
            },
        }
    }
}

/// The carrier bijection `A ↦ α(A)` induced by an isomorphism `α: G → H`.
pub fn w_on_morphism(
    alpha: &GroupHom,
    mg: &CosetGroupoid,
    mh: &CosetGroupoid,
) -> Result<Vec<usize>> {
    let (g, h) = (mg.group(), mh.group());
    if g.order() != h.order() || !alpha.is_bijective() {
        return Err(Error::NotAnIsomorphism("α is not a bijection".into()));
    }
    if mg.family().len() != mh.family().len() {
        return Err(Error::NotInvariant("bases have different sizes".into()));
    }
    let mut member_image = Vec::with_capacity(mg.family().len());
    let mut hit = HashSet::new();
    for sub in mg.family().members() {
        let image = Subgroup::new(h, sub.elements().iter().map(|&x| alpha.apply(x)).collect())?;
        let j = mh.family().position(&image).ok_or_else(|| {
            Error::NotInvariant(format!(
                "α maps the basis member {:?} outside the target basis",
                sub.elements()
            ))
        })?;
        hit.insert(j);
        member_image.push(j);
    }
    let mut map = vec![EMPTY; mg.size()];
    for (id, slot) in map.iter_mut().enumerate().skip(1) {
        let key = mg.key(id).unwrap();
        *slot = mh.coset_id(member_image[key.member], alpha.apply(key.representative));
    }
    check_isomorphism(mg.groupoid(), mh.groupoid(), &map)?;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::check_axioms;
    use crate::perm::Perm;

    fn gen(n: usize, gens: &[&str]) -> PermGroup {
        let gens: Vec<Perm> = gens
            .iter()
            .map(|s| Perm::parse_cycles(n, s).unwrap())
            .collect();
        PermGroup::generate(n, &gens, &Caps::default()).unwrap()
    }

    fn all(g: &PermGroup) -> SubgroupFamily {
        SubgroupFamily::all_subgroups(g, &Caps::default()).unwrap()
    }

    #[test]
    fn sizes_match_index_sums() {
        let z2 = gen(2, &["(0 1)"]);
        assert_eq!(build_w(&z2, &all(&z2)).unwrap().size(), 4);
        let z4 = gen(4, &["(0 1 2 3)"]);
        assert_eq!(build_w(&z4, &all(&z4)).unwrap().size(), 8);
        let s3 = gen(3, &["(0 1)", "(0 1 2)"]);
        assert_eq!(build_w(&s3, &all(&s3)).unwrap().size(), 19);
    }

    #[test]
    fn coset_groupoids_are_full() {
        for g in [
            gen(2, &["(0 1)"]),
            gen(4, &["(0 1 2 3)"]),
            gen(3, &["(0 1)", "(0 1 2)"]),
            gen(4, &["(0 1)", "(2 3)"]),
        ] {
            let w = build_w(&g, &all(&g)).unwrap();
            let report = check_axioms(w.groupoid(), true);
            assert!(report.passed, "{report:?}");
        }
    }

    #[test]
    fn idempotents_are_the_basis() {
        let s3 = gen(3, &["(0 1)", "(0 1 2)"]);
        let w = build_w(&s3, &all(&s3)).unwrap();
        let idem: Vec<Vec<usize>> = w
            .groupoid()
            .idempotents()
            .iter()
            .map(|&u| w.elements(u))
            .collect();
        let mut basis: Vec<Vec<usize>> = w
            .family()
            .members()
            .iter()
            .map(|h| h.elements().to_vec())
            .collect();
        let mut idem_sorted = idem.clone();
        idem_sorted.sort();
        basis.sort();
        assert_eq!(idem_sorted, basis);
    }

    /// Products, inverses and meets against direct set arithmetic.
    #[test]
    fn tables_match_set_arithmetic() {
        let s3 = gen(3, &["(0 1)", "(0 1 2)"]);
        let w = build_w(&s3, &all(&s3)).unwrap();
        let m = w.groupoid();
        let set = |id| w.elements(id).into_iter().collect::<BTreeSet<usize>>();
        for a in 1..m.size() {
            let inv: BTreeSet<usize> = set(a).iter().map(|&x| s3.inv(x)).collect();
            assert_eq!(set(m.inverse(a).unwrap()), inv);
            for b in 1..m.size() {
                let inter: BTreeSet<usize> = set(a).intersection(&set(b)).copied().collect();
                assert_eq!(set(m.meet(a, b).unwrap()), inter);
                let (sa, sb) = (set(a), set(b));
                let a_left = sa.iter().all(|&x| {
                    sa.iter().all(|&y| {
                        let q = s3.mul(s3.inv(x), y);
                        sa.iter().all(|&z| sa.contains(&s3.mul(z, q)))
                    })
                });
                assert!(a_left);
                let prod: BTreeSet<usize> = sa
                    .iter()
                    .flat_map(|&x| sb.iter().map(move |&y| (x, y)))
                    .map(|(x, y)| s3.mul(x, y))
                    .collect();
                // defined iff a·a⁻¹... frames agree: A⁻¹A = BB⁻¹ as sets
                let frame = |s: &BTreeSet<usize>, left: bool| -> BTreeSet<usize> {
                    s.iter()
                        .flat_map(|&x| s.iter().map(move |&y| (x, y)))
                        .map(|(x, y)| {
                            if left {
                                s3.mul(s3.inv(x), y)
                            } else {
                                s3.mul(x, s3.inv(y))
                            }
                        })
                        .collect()
                };
                let defined = frame(&sa, true) == frame(&sb, false);
                match m.mul(a, b) {
                    Some(c) => {
                        assert!(defined);
                        assert_eq!(set(c), prod);
                    }
                    None => assert!(!defined),
                }
            }
        }
    }

    #[test]
    fn close_basis_examples() {
        let s3 = gen(3, &["(0 1)", "(0 1 2)"]);
        let t = Subgroup::generated(
            &s3,
            &[s3.index_of(&Perm::parse_cycles(3, "(0 1)").unwrap())
                .unwrap()],
        );
        let closed = close_basis(&s3, &[t], &Caps::default()).unwrap();
        assert_eq!(closed.len(), 4);
        assert!(closed.members().iter().all(|h| h.order() <= 2));
        assert!(closed.meet_closed() && closed.conjugation_closed());

        let everything = all(&s3);
        let again = close_basis(&s3, everything.members(), &Caps::default()).unwrap();
        assert_eq!(again, everything);

        let z4 = gen(4, &["(0 1 2 3)"]);
        let half = Subgroup::generated(&z4, &[2]);
        assert_eq!(
            close_basis(&z4, &[half], &Caps::default()).unwrap().len(),
            1
        );
        assert!(matches!(
            close_basis(&z4, &[], &Caps::default()),
            Err(Error::EmptyBasis)
        ));
    }

    #[test]
    fn unclosed_basis_rejected() {
        let s3 = gen(3, &["(0 1)", "(0 1 2)"]);
        let t = Subgroup::generated(&s3, &[1]);
        let fam = SubgroupFamily::new(&s3, vec![Subgroup::whole(&s3), t]).unwrap();
        assert!(matches!(build_w(&s3, &fam), Err(Error::BasisNotClosed(_))));
    }

    #[test]
    fn morphisms_are_functorial() {
        let s3 = gen(3, &["(0 1)", "(0 1 2)"]);
        let w = build_w(&s3, &all(&s3)).unwrap();
        let id = w_on_morphism(&GroupHom::identity(&s3), &w, &w).unwrap();
        assert_eq!(id, (0..w.size()).collect::<Vec<_>>());
        let conj = |g: usize| {
            GroupHom::new(&s3, &s3, (0..6).map(|h| s3.conjugate(g, h)).collect()).unwrap()
        };
        for a in 0..6 {
            for b in 0..6 {
                let wa = w_on_morphism(&conj(a), &w, &w).unwrap();
                let wb = w_on_morphism(&conj(b), &w, &w).unwrap();
                let wab = w_on_morphism(&conj(a).after(&conj(b)), &w, &w).unwrap();
                let composed: Vec<usize> = wb.iter().map(|&x| wa[x]).collect();
                assert_eq!(wab, composed);
            }
        }
    }

    #[test]
    fn relabelled_groups_transport() {
        let s3 = gen(3, &["(0 1)", "(0 1 2)"]);
        let (t, alpha) =
            crate::group::relabel(&s3, &Perm::parse_cycles(3, "(0 2)").unwrap()).unwrap();
        let (wg, wh) = (
            build_w(&s3, &all(&s3)).unwrap(),
            build_w(&t, &all(&t)).unwrap(),
        );
        w_on_morphism(&alpha, &wg, &wh).unwrap();
        let minimal = build_w(&t, &SubgroupFamily::minimal(&t).unwrap()).unwrap();
        assert!(w_on_morphism(&alpha, &wg, &minimal).is_err());
    }

    #[test]
    fn json_has_provenance() {
        let z2 = gen(2, &["(0 1)"]);
        let w = build_w(&z2, &all(&z2)).unwrap();
        let v = serde_json::to_value(w.to_json()).unwrap();
        assert_eq!(v["size"], 4);
        assert_eq!(v["provenance"]["basis"], serde_json::json!([[0, 1], [0]]));
    }
}
