//! Reconstruction of a group from a full meet groupoid: the group `𝒢(M)`
//! of meet-preserving permutations commuting with right multiplication,
//! computed through coherent filters, and the hat map `A ↦ Â`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::axioms::check_axioms;
use crate::error::{Error, Result};
use crate::group::{GroupHom, PermGroup};
use crate::groupoid::{check_isomorphism, MeetGroupoid, EMPTY};
use crate::perm::Perm;

/// A coherent choice of one left `U` *coset for every idempotent `U`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FullFilter {
    choice: BTreeMap<usize, usize>,
}

impl FullFilter {
    pub fn new(choice: BTreeMap<usize, usize>) -> Self {
        FullFilter { choice }
    }

    pub fn choice(&self, u: usize) -> Option<usize> {
        self.choice.get(&u).copied()
    }

    pub fn choices(&self) -> &BTreeMap<usize, usize> {
        &self.choice
    }

    /// The filter as a set: everything above some chosen coset.
    pub fn upward_closure(&self, m: &MeetGroupoid) -> Vec<usize> {
        (1..m.size())
            .filter(|&b| self.choice.values().any(|&a| m.leq(a, b)))
            .collect()
    }

    /// Every idempotent has a choice in `LC(U)`; inclusions and meets are respected.
    pub fn is_coherent(&self, m: &MeetGroupoid) -> bool {
        let idem = m.idempotents();
        if self.choice.len() != idem.len() {
            return false;
        }
        for &u in &idem {
            let Some(a) = self.choice(u) else {
                return false;
            };
            if a == EMPTY || a >= m.size() || m.mul(a, u) != Some(a) {
                return false;
            }
        }
        idem.iter().all(|&u| {
            idem.iter().all(|&v| {
                let (cu, cv) = (self.choice[&u], self.choice[&v]);
                let w = m.wedge(u, v);
                (!m.leq(u, v) || m.leq(cu, cv)) && self.choice(w) == Some(m.wedge(cu, cv))
            })
        })
    }
}

/// Why a carrier permutation fails to be in `𝒢(M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AutViolation {
    NotBijection,
    MovesEmpty,
    Meet { a: usize, b: usize },
    Product { a: usize, b: usize },
}

/// `None` when `p` fixes ∅, preserves `∧` and satisfies `p(A·B) = p(A)·B`
/// whenever `A·B` is defined; otherwise the first failing clause.
pub fn groupoid_aut_violation(m: &MeetGroupoid, p: &[usize]) -> Option<AutViolation> {
    let n = m.size();
    let mut seen = vec![false; n];
    if p.len() != n
        || p.iter()
            .any(|&x| x >= n || std::mem::replace(&mut seen[x], true))
    {
        return Some(AutViolation::NotBijection);
    }
    if p[EMPTY] != EMPTY {
        return Some(AutViolation::MovesEmpty);
    }
    for a in 0..n {
        for b in 0..n {
            if p[m.wedge(a, b)] != m.wedge(p[a], p[b]) {
                return Some(AutViolation::Meet { a, b });
            }
        }
    }
    for (a, b, c) in m.defined_products() {
        if m.mul(p[a], b) != Some(p[c]) {
            return Some(AutViolation::Product { a, b });
        }
    }
    None
}

pub fn is_groupoid_aut(m: &MeetGroupoid, p: &[usize]) -> bool {
    groupoid_aut_violation(m, p).is_none()
}

/// All coherent filters, in canonical (sorted) order. Idempotents are
/// decided from the largest down; each new choice must lie below the choices
/// of its superiors and agree with the meets of earlier choices.
pub fn enumerate_full_filters(m: &MeetGroupoid) -> Result<Vec<FullFilter>> {
    let report = check_axioms(m, true);
    if !report.passed {
        let tags: Vec<String> = report
            .violations
            .iter()
            .map(|v| v.axiom.to_string())
            .collect();
        return Err(Error::NotFull(format!("violated: {}", tags.join(", "))));
    }
    let mut order = m.idempotents();
    order.sort_by_key(|&u| (std::cmp::Reverse(m.down_set_size(u)), u));
    let candidates: Vec<Vec<usize>> = order.iter().map(|&u| m.lc(u)).collect();
    let mut position = vec![usize::MAX; m.size()];
    for (k, &u) in order.iter().enumerate() {
        position[u] = k;
    }

    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(order.len());
    search(m, &order, &candidates, &position, &mut chosen, &mut out);
    out.sort();
    Ok(out)
}

fn search(
    m: &MeetGroupoid,
    order: &[usize],
    candidates: &[Vec<usize>],
    position: &[usize],
    chosen: &mut Vec<usize>,
    out: &mut Vec<FullFilter>,
) {
    let k = chosen.len();
    if k == order.len() {
        out.push(FullFilter::new(
            order.iter().copied().zip(chosen.iter().copied()).collect(),
        ));
        return;
    }
    let u = order[k];
    'cand: for &a in &candidates[k] {
        for (j, &v) in order[..k].iter().enumerate() {
            let cv = chosen[j];
            if m.leq(u, v) && !m.leq(a, cv) {
                continue 'cand;
            }
            let w = m.wedge(u, v);
            let pw = position[w];
            if pw < k && chosen[pw] != m.wedge(a, cv) {
                continue 'cand;
            }
        }
        chosen.push(a);
        search(m, order, candidates, position, chosen, out);
        chosen.pop();
    }
}

/// `p(B) = choice(U)·B` for each right `U` *coset `B`.
pub fn filter_to_aut(m: &MeetGroupoid, filter: &FullFilter) -> Result<Vec<usize>> {
    let mut p = vec![EMPTY; m.size()];
    for (b, slot) in p.iter_mut().enumerate().skip(1) {
        let u = m.mul(b, m.inv(b)).ok_or_else(|| {
            Error::IncoherentFilter(format!("{}·{}⁻¹ undefined", m.label(b), m.label(b)))
        })?;
        let a = filter
            .choice(u)
            .ok_or_else(|| Error::IncoherentFilter(format!("no choice for {}", m.label(u))))?;
        *slot = m.mul(a, b).ok_or_else(|| {
            Error::IncoherentFilter(format!("{}·{} undefined", m.label(a), m.label(b)))
        })?;
    }
    if let Some(v) = groupoid_aut_violation(m, &p) {
        return Err(Error::IncoherentFilter(format!("extension fails: {v:?}")));
    }
    Ok(p)
}

/// `choice(U) = p(U)`.
pub fn aut_to_filter(m: &MeetGroupoid, p: &[usize]) -> Result<FullFilter> {
    if let Some(v) = groupoid_aut_violation(m, p) {
        return Err(Error::NotAnAutomorphism(format!("{v:?}")));
    }
    Ok(FullFilter::new(
        m.idempotents().into_iter().map(|u| (u, p[u])).collect(),
    ))
}

/// `𝒢(M)` as a permutation group on the carrier ids of `M`.
pub fn g_of_m(m: &MeetGroupoid) -> Result<PermGroup> {
    let perms = enumerate_full_filters(m)?
        .iter()
        .map(|f| filter_to_aut(m, f).map(Perm::from_images_unchecked))
        .collect::<Result<Vec<_>>>()?;
    Ok(PermGroup::from_elements(m.size(), perms)?.with_name("G(M)"))
}

/// `𝒢(θ)(p) = θ∘p∘θ⁻¹` for a groupoid isomorphism `θ: M → N`.
pub fn g_on_morphism(
    m: &MeetGroupoid,
    n: &MeetGroupoid,
    theta: &[usize],
    gm: &PermGroup,
    gn: &PermGroup,
) -> Result<GroupHom> {
    check_isomorphism(m, n, theta)?;
    let theta = Perm::new(theta.to_vec())?;
    let map = gm
        .elements()
        .iter()
        .map(|p| {
            let q = theta.conjugate_unchecked(p);
            gn.index_of(&q)
                .ok_or_else(|| Error::NotAnIsomorphism("θ∘p∘θ⁻¹ is not in 𝒢(N)".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let hom = GroupHom::new(gm, gn, map)?;
    if !hom.is_bijective() || gm.order() != gn.order() {
        return Err(Error::NotAnIsomorphism(
            "induced map is not bijective".into(),
        ));
    }
    Ok(hom)
}

/// `Â = {p ∈ 𝒢(M) : p(U) = A}` for `A` a left `U` *coset, as sorted element
/// indices of `gm`; `∅̂ = ∅`.
pub fn hat(m: &MeetGroupoid, gm: &PermGroup, a: usize) -> Result<Vec<usize>> {
    if a == EMPTY {
        m.inverse(a)?;
        return Ok(Vec::new());
    }
    let (u, _) = m.coset_frame(a)?;
    Ok((0..gm.order())
        .filter(|&i| gm.element(i).apply(u) == a)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::functor_w::build_w;
    use crate::subgroup::{Subgroup, SubgroupFamily};

    fn gen(n: usize, gens: &[&str]) -> PermGroup {
        let gens: Vec<Perm> = gens
            .iter()
            .map(|s| Perm::parse_cycles(n, s).unwrap())
            .collect();
        PermGroup::generate(n, &gens, &Caps::default()).unwrap()
    }

    fn w_all(g: &PermGroup) -> crate::functor_w::CosetGroupoid {
        build_w(
            g,
            &SubgroupFamily::all_subgroups(g, &Caps::default()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn filter_counts() {
        let z2 = gen(2, &["(0 1)"]);
        assert_eq!(
            enumerate_full_filters(w_all(&z2).groupoid()).unwrap().len(),
            2
        );
        let s3 = gen(3, &["(0 1)", "(0 1 2)"]);
        assert_eq!(
            enumerate_full_filters(w_all(&s3).groupoid()).unwrap().len(),
            6
        );
        let z4 = gen(4, &["(0 1 2 3)"]);
        let top = build_w(
            &z4,
            &SubgroupFamily::new(&z4, vec![Subgroup::whole(&z4)]).unwrap(),
        )
        .unwrap();
        assert_eq!(enumerate_full_filters(top.groupoid()).unwrap().len(), 1);
        let half = SubgroupFamily::new(
            &z4,
            vec![Subgroup::whole(&z4), Subgroup::generated(&z4, &[2])],
        )
        .unwrap();
        assert_eq!(
            enumerate_full_filters(build_w(&z4, &half).unwrap().groupoid())
                .unwrap()
                .len(),
            2
        );
    }

    #[test]
    fn translation_filters_in_z4() {
        let z4 = gen(4, &["(0 1 2 3)"]);
        let w = w_all(&z4);
        let m = w.groupoid();
        let sub = |s: &[usize]| w.id_of_set(s).unwrap();
        let filter = FullFilter::new(
            [
                (sub(&[0, 1, 2, 3]), sub(&[0, 1, 2, 3])),
                (sub(&[0, 2]), sub(&[1, 3])),
                (sub(&[0]), sub(&[1])),
            ]
            .into_iter()
            .collect(),
        );
        assert!(filter.is_coherent(m));
        let p = filter_to_aut(m, &filter).unwrap();
        for a in 0..m.size() {
            assert_eq!(p[a], w.translate(1, a));
        }
        assert!(is_groupoid_aut(m, &p));
        assert_eq!(aut_to_filter(m, &p).unwrap(), filter);
    }

    #[test]
    fn identity_and_bad_maps() {
        let z4 = gen(4, &["(0 1 2 3)"]);
        let w = w_all(&z4);
        let m = w.groupoid();
        let id: Vec<usize> = (0..m.size()).collect();
        assert!(is_groupoid_aut(m, &id));
        let mut swap = id.clone();
        let (top, half) = (
            w.id_of_set(&[0, 1, 2, 3]).unwrap(),
            w.id_of_set(&[0, 2]).unwrap(),
        );
        swap.swap(top, half);
        assert!(matches!(
            groupoid_aut_violation(m, &swap),
            Some(AutViolation::Meet { .. })
        ));
        assert!(aut_to_filter(m, &swap).is_err());
    }

    #[test]
    fn filter_round_trips() {
        let s3 = gen(3, &["(0 1)", "(0 1 2)"]);
        let w = w_all(&s3);
        let m = w.groupoid();
        for f in enumerate_full_filters(m).unwrap() {
            assert!(f.is_coherent(m));
            let p = filter_to_aut(m, &f).unwrap();
            assert_eq!(aut_to_filter(m, &p).unwrap(), f);
        }
        let g = g_of_m(m).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        for p in g.elements() {
            let f = aut_to_filter(m, p.images()).unwrap();
            assert_eq!(filter_to_aut(m, &f).unwrap(), p.images());
        }
    }

    #[test]
    fn trivial_groupoid() {
        let m = MeetGroupoid::single_idempotent();
        assert_eq!(g_of_m(&m).unwrap().order(), 1);
    }

    #[test]
    fn hat_lemmas_on_s3() {
        let s3 = gen(3, &["(0 1)", "(0 1 2)"]);
        let w = w_all(&s3);
        let m = w.groupoid();
        let g = g_of_m(m).unwrap();
        let hats: Vec<Vec<usize>> = (0..m.size()).map(|a| hat(m, &g, a).unwrap()).collect();
        assert_eq!(hats[1].len(), 6);
        for a in 1..m.size() {
            assert!(!hats[a].is_empty());
            let inv: Vec<usize> = {
                let mut v: Vec<usize> = hats[a].iter().map(|&x| g.inv(x)).collect();
                v.sort_unstable();
                v
            };
            assert_eq!(hats[m.inv(a)], inv);
            for b in 1..m.size() {
                let both: Vec<usize> = hats[a]
                    .iter()
                    .filter(|x| hats[b].contains(x))
                    .copied()
                    .collect();
                assert_eq!(hats[m.wedge(a, b)], both);
                assert_eq!(m.leq(a, b), hats[a].iter().all(|x| hats[b].contains(x)));
                if let Some(c) = m.mul(a, b) {
                    let mut prod: Vec<usize> = hats[a]
                        .iter()
                        .flat_map(|&x| hats[b].iter().map(move |&y| (x, y)))
                        .map(|(x, y)| g.mul(x, y))
                        .collect();
                    prod.sort_unstable();
                    prod.dedup();
                    assert_eq!(hats[c], prod);
                }
            }
        }
    }

    #[test]
    fn conjugation_transports_g() {
        let s3 = gen(3, &["(0 1)", "(0 1 2)"]);
        let w = w_all(&s3);
        let m = w.groupoid();
        let g = g_of_m(m).unwrap();
        let alpha = GroupHom::new(&s3, &s3, (0..6).map(|h| s3.conjugate(3, h)).collect()).unwrap();
        let theta = crate::functor_w::w_on_morphism(&alpha, &w, &w).unwrap();
        let hom = g_on_morphism(m, m, &theta, &g, &g).unwrap();
        assert!(hom.is_bijective());
        let id: Vec<usize> = (0..m.size()).collect();
        assert_eq!(
            g_on_morphism(m, m, &id, &g, &g).unwrap(),
            GroupHom::identity(&g)
        );
    }

    #[test]
    fn filters_serialize_as_maps() {
        let f = FullFilter::new([(1, 1), (2, 3)].into_iter().collect());
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"{"1":1,"2":3}"#);
    }
}
