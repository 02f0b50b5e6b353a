//! The unit maps `η_G: G → 𝒢(W(G))` and `η_M: M → W(𝒢(M))`, the object
//! condition for reconstructible groupoids, and exhaustive naturality checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aut_topology::inn_out;
use crate::axioms::check_axioms;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::functor_g::{enumerate_full_filters, g_of_m, g_on_morphism, hat};
use crate::functor_w::{build_w, w_on_morphism, CosetGroupoid};
use crate::group::{relabel, GroupHom, PermGroup};
use crate::groupoid::{check_isomorphism, MeetGroupoid, EMPTY};
use crate::perm::Perm;
use crate::subgroup::{roelcke_precompact_witness, Subgroup, SubgroupFamily};

/// `W(G)` together with `𝒢(W(G))` and `η_G`.
#[derive(Debug, Clone)]
pub struct GroupDuality {
    pub w: CosetGroupoid,
    pub g: PermGroup,
    pub eta: GroupHom,
}

impl GroupDuality {
    pub fn new(group: &PermGroup, family: &SubgroupFamily) -> Result<Self> {
        let w = build_w(group, family)?;
        let g = g_of_m(w.groupoid())?;
        let eta = eta_g(&w, &g)?;
        Ok(GroupDuality { w, g, eta })
    }
}

/// `η_G(g)(A) = gA`, checked to be an isomorphism onto `𝒢(W(G))`.
pub fn eta_g(w: &CosetGroupoid, gm: &PermGroup) -> Result<GroupHom> {
    let group = w.group();
    if !w.family().separating() {
        return Err(Error::NonSeparating {
            kernel_order: w.family().intersection().order(),
        });
    }
    let map = (0..group.order())
        .map(|g| {
            let p = Perm::new((0..w.size()).map(|a| w.translate(g, a)).collect())?;
            gm.index_of(&p).ok_or_else(|| {
                Error::NotAnIsomorphism(format!(
                    "translation by {} is not in 𝒢(W(G))",
                    group.element(g)
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let hom = GroupHom::new(group, gm, map)?;
    if group.order() != gm.order() || !hom.is_bijective() {
        return Err(Error::NotAnIsomorphism(format!(
            "|G| = {} but |𝒢(W(G))| = {}",
            group.order(),
            gm.order()
        )));
    }
    Ok(hom)
}

/// Finite reading of the object condition: `M` is full and `{Û : U idempotent}`
/// is a meet- and conjugation-closed, separating family of subgroups of `𝒢(M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectCondition {
    pub full: bool,
    pub subgroups: bool,
    pub meet_closed: bool,
    pub conjugation_closed: bool,
    pub separating: bool,
}

impl ObjectCondition {
    pub fn holds(&self) -> bool {
        self.full
            && self.subgroups
            && self.meet_closed
            && self.conjugation_closed
            && self.separating
    }
}

pub fn object_condition(m: &MeetGroupoid) -> ObjectCondition {
    let mut out = ObjectCondition {
        full: check_axioms(m, true).passed,
        subgroups: false,
        meet_closed: false,
        conjugation_closed: false,
        separating: false,
    };
    if !out.full {
        return out;
    }
    let Ok(gm) = g_of_m(m) else { return out };
    if let Ok(family) = hat_family(m, &gm) {
        out.subgroups = true;
        out.meet_closed = family.meet_closed();
        out.conjugation_closed = family.conjugation_closed();
        out.separating = family.separating();
    }
    out
}

pub fn is_object_of_mm(m: &MeetGroupoid) -> bool {
    object_condition(m).holds()
}

/// `{Û : U idempotent}` as a family of subgroups of `𝒢(M)`.
pub fn hat_family(m: &MeetGroupoid, gm: &PermGroup) -> Result<SubgroupFamily> {
    let members = m
        .idempotents()
        .into_iter()
        .map(|u| Subgroup::new(gm, hat(m, gm, u)?))
        .collect::<Result<Vec<_>>>()?;
    SubgroupFamily::new(gm, members)
}

/// `η_M: A ↦ Â` into `W(𝒢(M))` built over `{Û}`.
#[derive(Debug, Clone)]
pub struct EtaM {
    pub target: CosetGroupoid,
    pub map: Vec<usize>,
}

pub fn eta_m(m: &MeetGroupoid, gm: &PermGroup) -> Result<EtaM> {
    let family = hat_family(m, gm)?;
    if !family.separating() {
        return Err(Error::NonSeparating {
            kernel_order: family.intersection().order(),
        });
    }
    let target = build_w(gm, &family)?;
    let map = (0..m.size())
        .map(|a| {
            let h = hat(m, gm, a)?;
            if a == EMPTY {
                return Ok(EMPTY);
            }
            target.id_of_set(&h).ok_or_else(|| {
                Error::NotAnIsomorphism(format!("Â is not a basis coset for A = {}", m.label(a)))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    check_isomorphism(m, target.groupoid(), &map)?;
    Ok(EtaM { target, map })
}

/// Checks every hat identity exhaustively; returns the first failure.
pub fn hat_lemma_violation(m: &MeetGroupoid, gm: &PermGroup) -> Result<Option<String>> {
    let hats = (0..m.size())
        .map(|a| hat(m, gm, a))
        .collect::<Result<Vec<_>>>()?;
    let n = gm.order();
    let mask = |s: &[usize]| {
        let mut v = vec![false; n];
        for &x in s {
            v[x] = true;
        }
        v
    };
    let masks: Vec<Vec<bool>> = hats.iter().map(|h| mask(h)).collect();
    let sorted = |mut v: Vec<usize>| {
        v.sort_unstable();
        v.dedup();
        v
    };
    for a in 1..m.size() {
        if hats[a].is_empty() {
            return Ok(Some(format!("Â is empty for A = {}", m.label(a))));
        }
        let inv = sorted(hats[a].iter().map(|&x| gm.inv(x)).collect());
        if hats[m.inv(a)] != inv {
            return Ok(Some(format!("(A⁻¹)^ ≠ Â⁻¹ for A = {}", m.label(a))));
        }
        let (u, _) = m.coset_frame(a)?;
        let p = hats[a][0];
        if sorted(hats[u].iter().map(|&x| gm.mul(p, x)).collect()) != hats[a] {
            return Ok(Some(format!(
                "Â is not a left coset of Û for A = {}",
                m.label(a)
            )));
        }
    }
    for a in 0..m.size() {
        for b in 0..m.size() {
            let both: Vec<usize> = hats[a].iter().copied().filter(|&x| masks[b][x]).collect();
            if hats[m.wedge(a, b)] != both {
                return Ok(Some(format!(
                    "(A∧B)^ ≠ Â∩B̂ for ({}, {})",
                    m.label(a),
                    m.label(b)
                )));
            }
            let contained = hats[a].iter().all(|&x| masks[b][x]);
            if contained != m.leq(a, b) {
                return Ok(Some(format!(
                    "order not reflected for ({}, {})",
                    m.label(a),
                    m.label(b)
                )));
            }
            if a != b && hats[a] == hats[b] {
                return Ok(Some(format!(
                    "hat not injective on ({}, {})",
                    m.label(a),
                    m.label(b)
                )));
            }
        }
    }
    for (a, b, c) in m.defined_products() {
        let prod = sorted(
            hats[a]
                .iter()
                .flat_map(|&x| hats[b].iter().map(move |&y| (x, y)))
                .map(|(x, y)| gm.mul(x, y))
                .collect(),
        );
        if prod != hats[c] {
            return Ok(Some(format!(
                "(A·B)^ ≠ Â·B̂ for ({}, {})",
                m.label(a),
                m.label(b)
            )));
        }
    }
    for u in m.idempotents() {
        if Subgroup::new(gm, hats[u].clone()).is_err() {
            return Ok(Some(format!("Û is not a subgroup for U = {}", m.label(u))));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaturalitySquare {
    pub name: String,
    pub commutes: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl NaturalitySquare {
    fn new(name: &str, witness: Option<String>) -> Self {
        NaturalitySquare {
            name: name.to_string(),
            commutes: witness.is_none(),
            witness,
        }
    }
}

/// `𝒢(W(α))(η_G(g)) = η_H(α(g))` for all `g`, compared pointwise on the carrier of `W(H)`.
pub fn check_naturality_g(
    alpha: &GroupHom,
    dg: &GroupDuality,
    dh: &GroupDuality,
) -> Result<NaturalitySquare> {
    let theta = w_on_morphism(alpha, &dg.w, &dh.w)?;
    let upsilon = g_on_morphism(dg.w.groupoid(), dh.w.groupoid(), &theta, &dg.g, &dh.g)?;
    let theta_inv = Perm::new(theta.clone())?.inverse();
    let group = dg.w.group();
    for g in 0..group.order() {
        let left = dh.g.element(upsilon.apply(dg.eta.apply(g)));
        let right = dh.g.element(dh.eta.apply(alpha.apply(g)));
        let direct = dg.g.element(dg.eta.apply(g));
        for b in 0..dh.w.size() {
            let conj = theta[direct.apply(theta_inv.apply(b))];
            if left.apply(b) != right.apply(b) || conj != right.apply(b) {
                return Ok(NaturalitySquare::new(
                    "eta-g",
                    Some(format!(
                        "g = {}, point {}",
                        group.element(g),
                        dh.w.groupoid().label(b)
                    )),
                ));
            }
        }
    }
    Ok(NaturalitySquare::new("eta-g", None))
}

/// `η_N(θ(A)) = 𝒢(θ)(Â)` for all `A`, as subsets of `𝒢(N)`.
pub fn check_naturality_m(
    theta: &[usize],
    m: &MeetGroupoid,
    gm: &PermGroup,
    n: &MeetGroupoid,
    gn: &PermGroup,
) -> Result<NaturalitySquare> {
    let upsilon = g_on_morphism(m, n, theta, gm, gn)?;
    for a in 0..m.size() {
        let mut moved: Vec<usize> = hat(m, gm, a)?
            .into_iter()
            .map(|p| upsilon.apply(p))
            .collect();
        moved.sort_unstable();
        if hat(n, gn, theta[a])? != moved {
            return Ok(NaturalitySquare::new(
                "eta-m",
                Some(format!("A = {}", m.label(a))),
            ));
        }
    }
    Ok(NaturalitySquare::new("eta-m", None))
}

/// `α(S_G)` as a family in the target group.
pub fn transport_family(
    alpha: &GroupHom,
    family: &SubgroupFamily,
    target: &PermGroup,
) -> Result<SubgroupFamily> {
    let members = family
        .members()
        .iter()
        .map(|h| {
            Subgroup::new(
                target,
                h.elements().iter().map(|&x| alpha.apply(x)).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    SubgroupFamily::new(target, members)
}

/// An isomorphic copy of `(G, S)`: a random relabelling of the points
/// composed with a random automorphism.
#[derive(Debug, Clone)]
pub struct SampledIsomorphism {
    pub target: PermGroup,
    pub family: SubgroupFamily,
    pub alpha: GroupHom,
}

pub fn sample_isomorphisms(
    group: &PermGroup,
    family: &SubgroupFamily,
    count: usize,
    seed: u64,
    caps: &Caps,
) -> Result<Vec<SampledIsomorphism>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let aut = inn_out(group, caps)?.aut;
    (0..count)
        .map(|_| {
            let mut images: Vec<usize> = (0..group.degree()).collect();
            images.shuffle(&mut rng);
            let sigma = Perm::new(images)?;
            let (target, relabelling) = relabel(group, &sigma)?;
            let phi = aut.element(rng.gen_range(0..aut.order()));
            let alpha = relabelling.after(&GroupHom::new(group, group, phi.images().to_vec())?);
            let family = transport_family(&alpha, family, &target)?;
            Ok(SampledIsomorphism {
                target,
                family,
                alpha,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    fn new(name: &str, witness: Option<String>) -> Self {
        Check {
            name: name.to_string(),
            passed: witness.is_none(),
            witness,
        }
    }

    fn from_result(name: &str, r: Result<Option<String>>) -> Self {
        Check::new(name, r.unwrap_or_else(|e| Some(e.to_string())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub group: String,
    pub order: usize,
    pub basis_size: usize,
    pub carrier: usize,
    pub filters: usize,
    pub aut: usize,
    pub out: usize,
    pub samples: usize,
    pub seed: u64,
    /// The basis chosen for `𝒢(M)` when checking `η_M`.
    pub assumption: String,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Both unit maps, the hat identities, ICB invariance, the double-coset
/// predicate and both naturality squares over `samples` random isomorphisms.
pub fn round_trip(
    group: &PermGroup,
    family: &SubgroupFamily,
    samples: usize,
    seed: u64,
    caps: &Caps,
) -> Result<RoundTripReport> {
    if !family.separating() {
        return Err(Error::NonSeparating {
            kernel_order: family.intersection().order(),
        });
    }
    let w = build_w(group, family)?;
    let m = w.groupoid();
    let filters = enumerate_full_filters(m)?.len();
    let gm = g_of_m(m)?;
    let aut = inn_out(group, caps)?;
    let mut checks = Vec::new();

    let dual = match eta_g(&w, &gm) {
        Ok(eta) => {
            checks.push(Check::new("eta-g-isomorphism", None));
            Some(GroupDuality {
                w: w.clone(),
                g: gm.clone(),
                eta,
            })
        }
        Err(e) => {
            checks.push(Check::new("eta-g-isomorphism", Some(e.to_string())));
            None
        }
    };
    checks.push(Check::new(
        "filter-count",
        (filters != group.order())
            .then(|| format!("{filters} filters for a group of order {}", group.order())),
    ));
    checks.push(Check::from_result(
        "eta-m-isomorphism",
        eta_m(m, &gm).map(|_| None),
    ));
    checks.push(Check::from_result(
        "hat-lemmas",
        hat_lemma_violation(m, &gm),
    ));
    let condition = object_condition(m);
    checks.push(Check::new(
        "object-condition",
        (!condition.holds()).then(|| format!("{condition:?}")),
    ));
    let rp = family
        .members()
        .iter()
        .find(|h| roelcke_precompact_witness(group, h).is_none())
        .map(|h| format!("{:?} has infinitely many double cosets", h.elements()));
    checks.push(Check::new("double-coset-finite", rp));

    let sampled = sample_isomorphisms(group, family, samples, seed, caps)?;
    let mut square_g = None;
    let mut square_m = None;
    let mut icb = None;
    let all_subgroups = family.len() == crate::subgroup::enumerate_subgroups(group, caps)?.len();
    if let Some(dual) = &dual {
        for s in &sampled {
            if icb.is_none() && all_subgroups {
                let all = SubgroupFamily::all_subgroups(&s.target, caps)?;
                if all != s.family {
                    icb = Some(format!(
                        "α does not map the basis onto the basis of {}",
                        s.target.name()
                    ));
                }
            }
            let dh = GroupDuality::new(&s.target, &s.family)?;
            if square_g.is_none() {
                let sq = check_naturality_g(&s.alpha, dual, &dh)?;
                square_g = sq.witness;
            }
            if square_m.is_none() {
                let theta = w_on_morphism(&s.alpha, &dual.w, &dh.w)?;
                let sq = check_naturality_m(&theta, m, &gm, dh.w.groupoid(), &dh.g)?;
                square_m = sq.witness;
            }
        }
    } else {
        square_g = Some("η_G unavailable".into());
        square_m = Some("η_G unavailable".into());
    }
    checks.push(Check::new("icb-invariance", icb));
    checks.push(Check::new("naturality-g", square_g));
    checks.push(Check::new("naturality-m", square_m));

    let passed = checks.iter().all(|c| c.passed);
    Ok(RoundTripReport {
        group: group.name().to_string(),
        order: group.order(),
        basis_size: family.len(),
        carrier: m.size(),
        filters,
        aut: aut.aut.order(),
        out: aut.out_reps.len(),
        samples,
        seed,
        assumption: "basis of G(M) is {hat(U) : U idempotent}".into(),
        checks,
        passed,
    })
}
