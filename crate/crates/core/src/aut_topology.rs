//! The left-translation embedding `Θ: G → Sym(Ω)` on the set Ω of basis
//! cosets, the section `Δ: Aut(G) → N(Ĝ)`, the retraction `Γ: N(Ĝ) → Aut(G)`,
//! and exhaustive checks of the identities relating them.

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::functor_w::{build_w, CosetGroupoid, CosetKey};
use crate::group::{GroupHom, PermGroup};
use crate::oracle::{brute_automorphisms, centralizer_in_sym, conjugation_map, normalizer_in_sym};
use crate::perm::Perm;
use crate::subgroup::SubgroupFamily;

/// Position `k` of Ω holds the basis coset with carrier id `k + 1` in `W(G)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaLabeling {
    pub entries: Vec<CosetKey>,
}

#[derive(Debug, Clone)]
pub struct ThetaEmbedding {
    w: CosetGroupoid,
    labeling: OmegaLabeling,
    image: PermGroup,
    /// `Θ(g)` as an index into `image`.
    map: Vec<usize>,
}

/// `Θ(g)`: the permutation `k ↦ ρ⁻¹(g·ρ(k))` of Ω.
pub fn theta(group: &PermGroup, family: &SubgroupFamily) -> Result<ThetaEmbedding> {
    let w = build_w(group, family)?;
    let omega = w.size() - 1;
    let labeling = OmegaLabeling {
        entries: (1..=omega).map(|id| w.key(id).unwrap()).collect(),
    };
    let perms: Vec<Perm> = (0..group.order())
        .map(|g| {
            Perm::from_images_unchecked((0..omega).map(|k| w.translate(g, k + 1) - 1).collect())
        })
        .collect();
    let mut distinct = perms.clone();
    distinct.sort();
    distinct.dedup();
    let image =
        PermGroup::from_elements(omega, distinct)?.with_name(format!("Θ({})", group.name()));
    let map = perms.iter().map(|p| image.index_of(p).unwrap()).collect();
    Ok(ThetaEmbedding {
        w,
        labeling,
        image,
        map,
    })
}

impl ThetaEmbedding {
    pub fn group(&self) -> &PermGroup {
        self.w.group()
    }

    pub fn family(&self) -> &SubgroupFamily {
        self.w.family()
    }

    pub fn coset_groupoid(&self) -> &CosetGroupoid {
        &self.w
    }

    pub fn labeling(&self) -> &OmegaLabeling {
        &self.labeling
    }

    pub fn omega(&self) -> usize {
        self.labeling.entries.len()
    }

    /// `Ĝ` as a permutation group on Ω.
    pub fn image(&self) -> &PermGroup {
        &self.image
    }

    pub fn apply(&self, g: usize) -> &Perm {
        self.image.element(self.map[g])
    }

    /// `Θ` as a homomorphism onto `Ĝ`.
    pub fn as_hom(&self) -> GroupHom {
        GroupHom::new(self.group(), &self.image, self.map.clone())
            .expect("left translation is a homomorphism")
    }

    pub fn kernel(&self) -> Vec<usize> {
        (0..self.group().order())
            .filter(|&g| self.map[g] == self.image.identity())
            .collect()
    }

    pub fn is_injective(&self) -> bool {
        self.image.order() == self.group().order()
    }

    /// Group elements of the coset at Ω position `k`.
    pub fn coset_elements(&self, k: usize) -> Vec<usize> {
        self.w.elements(k + 1)
    }

    fn require_separating(&self) -> Result<()> {
        if self.is_injective() {
            Ok(())
        } else {
            Err(Error::NonSeparating {
                kernel_order: self.kernel().len(),
            })
        }
    }
}

/// `Δ(φ)(rU) = φ(r)φ(U)` on Ω.
pub fn delta(emb: &ThetaEmbedding, phi: &GroupHom) -> Result<Perm> {
    let (group, family) = (emb.group(), emb.family());
    if phi.map().len() != group.order() || !phi.is_bijective() {
        return Err(Error::NotAnAutomorphism("φ is not a bijection of G".into()));
    }
    let member_image = family
        .members()
        .iter()
        .map(|h| {
            let mut image: Vec<usize> = h.elements().iter().map(|&x| phi.apply(x)).collect();
            image.sort_unstable();
            family
                .members()
                .iter()
                .position(|k| k.elements() == image.as_slice())
                .ok_or_else(|| {
                    Error::NotInvariant(format!(
                        "φ moves the basis member {:?} outside the basis",
                        h.elements()
                    ))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let images = emb
        .labeling
        .entries
        .iter()
        .map(|key| {
            emb.w
                .coset_id(member_image[key.member], phi.apply(key.representative))
                - 1
        })
        .collect();
    Ok(Perm::from_images_unchecked(images))
}

/// `Γ(α)(g) = Θ⁻¹(α Θ(g) α⁻¹)`.
pub fn gamma(emb: &ThetaEmbedding, alpha: &Perm) -> Result<GroupHom> {
    emb.require_separating()?;
    let map = gamma_map(emb, alpha)?;
    GroupHom::new(emb.group(), emb.group(), map)
}

fn gamma_map(emb: &ThetaEmbedding, alpha: &Perm) -> Result<Vec<usize>> {
    if alpha.degree() != emb.omega() {
        return Err(Error::DegreeMismatch {
            left: emb.omega(),
            right: alpha.degree(),
        });
    }
    let a = alpha.images();
    let mut conj = vec![0; a.len()];
    (0..emb.group().order())
        .map(|g| {
            let t = emb.apply(g).images();
            for k in 0..a.len() {
                conj[a[k]] = a[t[k]];
            }
            let c = Perm::from_images_unchecked(conj.clone());
            emb.image
                .index_of(&c)
                .map(|i| emb.map.iter().position(|&x| x == i).unwrap())
                .ok_or_else(|| {
                    Error::NotNormalizing(format!(
                        "α Θ(g) α⁻¹ is outside Ĝ for g = {}",
                        emb.group().element(g)
                    ))
                })
        })
        .collect()
}

/// `Aut(G)` with its inner automorphisms and a transversal of `Inn(G)`.
#[derive(Debug, Clone)]
pub struct AutPresentation {
    pub aut: PermGroup,
    /// Indices into `aut`, sorted.
    pub inn: Vec<usize>,
    /// Least element of each left coset of `inn` in `aut`.
    pub out_reps: Vec<usize>,
    /// `|Z(G)|`, computed directly.
    pub center_order: usize,
}

impl AutPresentation {
    pub fn automorphism(&self, i: usize) -> GroupHom {
        GroupHom::from_map_unchecked(self.aut.element(i).images().to_vec())
    }
}

pub fn inn_out(group: &PermGroup, caps: &Caps) -> Result<AutPresentation> {
    let aut = brute_automorphisms(group, caps)?;
    let mut inn: Vec<usize> = (0..group.order())
        .map(|g| {
            let c = conjugation_map(group, g);
            aut.index_of(&c).ok_or_else(|| {
                Error::NotAnAutomorphism(format!(
                    "conjugation by {} is missing from Aut",
                    group.element(g)
                ))
            })
        })
        .collect::<Result<_>>()?;
    inn.sort_unstable();
    inn.dedup();
    let inn_set: HashSet<usize> = inn.iter().copied().collect();
    let mut covered = vec![false; aut.order()];
    let mut out_reps = Vec::new();
    for a in 0..aut.order() {
        if covered[a] {
            continue;
        }
        out_reps.push(a);
        for &i in &inn_set {
            covered[aut.mul(a, i)] = true;
        }
    }
    let center_order = group.center().len();
    Ok(AutPresentation {
        aut,
        inn,
        out_reps,
        center_order,
    })
}

/// `{Φ ∈ Aut(G) : Φ(Aᵢ) = Aᵢ for all i}` for cosets given by Ω position;
/// returns indices into `aut`.
pub fn basis_subgroup(
    emb: &ThetaEmbedding,
    aut: &PermGroup,
    cosets: &[usize],
) -> Result<Vec<usize>> {
    let sets = cosets
        .iter()
        .map(|&k| {
            if k < emb.omega() {
                Ok(emb.coset_elements(k))
            } else {
                Err(Error::InvalidId {
                    id: k,
                    size: emb.omega(),
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..aut.order())
        .filter(|&i| {
            let phi = aut.element(i);
            sets.iter().all(|s| {
                let mut image: Vec<usize> = s.iter().map(|&x| phi.apply(x)).collect();
                image.sort_unstable();
                image == *s
            })
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cardinalities {
    pub aut: usize,
    pub inn: usize,
    pub out: usize,
    pub omega: usize,
    pub centralizer: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub cardinalities: Cardinalities,
}

/// Everything the identity checks share: `Θ`, `Aut(G)`, `H = Δ(Aut G)` and
/// `C = C_Sym(Ω)(Ĝ)`.
#[derive(Debug)]
pub struct AutContext {
    emb: ThetaEmbedding,
    aut: AutPresentation,
    deltas: Vec<Perm>,
    centralizer: PermGroup,
    /// `Γ(h·c)` as an index into `aut`, for `h` in `H` and `c` in `C`.
    gammas: OnceLock<std::result::Result<Vec<u32>, String>>,
}

impl AutContext {
    pub fn new(group: &PermGroup, family: &SubgroupFamily, caps: &Caps) -> Result<Self> {
        let emb = theta(group, family)?;
        emb.require_separating()?;
        let aut = inn_out(group, caps)?;
        let deltas = (0..aut.aut.order())
            .map(|i| delta(&emb, &aut.automorphism(i)))
            .collect::<Result<Vec<_>>>()?;
        let centralizer = centralizer_in_sym(emb.omega(), emb.image(), caps)?;
        Ok(AutContext {
            emb,
            aut,
            deltas,
            centralizer,
            gammas: OnceLock::new(),
        })
    }

    pub fn embedding(&self) -> &ThetaEmbedding {
        &self.emb
    }

    pub fn aut(&self) -> &AutPresentation {
        &self.aut
    }

    /// `Δ(φ)` for each element of `Aut(G)`, in the same order.
    pub fn deltas(&self) -> &[Perm] {
        &self.deltas
    }

    pub fn centralizer(&self) -> &PermGroup {
        &self.centralizer
    }

    pub fn cardinalities(&self) -> Cardinalities {
        Cardinalities {
            aut: self.aut.aut.order(),
            inn: self.aut.inn.len(),
            out: self.aut.out_reps.len(),
            omega: self.emb.omega(),
            centralizer: self.centralizer.order(),
        }
    }

    fn report(&self, name: &str, witness: Option<String>) -> CheckReport {
        CheckReport {
            name: name.to_string(),
            passed: witness.is_none(),
            witness,
            cardinalities: self.cardinalities(),
        }
    }

    /// `Γ(Δ(φ)) = φ` and `Δ` is an injective homomorphism normalizing `Ĝ`.
    pub fn check_section(&self) -> CheckReport {
        let aut = &self.aut.aut;
        let witness = (|| {
            for (i, d) in self.deltas.iter().enumerate() {
                match gamma_map(&self.emb, d) {
                    Ok(map) if map == aut.element(i).images() => {}
                    Ok(_) => return Some(format!("Γ(Δ(φ)) ≠ φ for φ = {}", aut.element(i))),
                    Err(e) => return Some(e.to_string()),
                }
            }
            for i in 0..aut.order() {
                for j in 0..aut.order() {
                    let dij = self.deltas[i].compose_unchecked(&self.deltas[j]);
                    if dij != self.deltas[aut.mul(i, j)] {
                        return Some(format!(
                            "Δ is not multiplicative at ({}, {})",
                            aut.element(i),
                            aut.element(j)
                        ));
                    }
                }
            }
            let distinct: HashSet<&Perm> = self.deltas.iter().collect();
            (distinct.len() != self.deltas.len()).then(|| "Δ is not injective".to_string())
        })();
        self.report("section", witness)
    }

    /// `Γ(Θ(g))` is conjugation by `g`.
    pub fn check_inner(&self) -> CheckReport {
        let g = self.emb.group();
        let witness = (0..g.order()).find_map(|x| match gamma_map(&self.emb, self.emb.apply(x)) {
            Ok(map) if map == conjugation_map(g, x).images() => None,
            Ok(_) => Some(format!(
                "Γ(Θ(g)) is not conjugation by g = {}",
                g.element(x)
            )),
            Err(e) => Some(e.to_string()),
        });
        self.report("inner", witness)
    }

    /// Conjugation `G/Z(G) → Aut(G)` is injective onto `Inn(G)`: `|Inn| = [G : Z(G)]`.
    pub fn check_inn_center(&self) -> CheckReport {
        let g = self.emb.group();
        let (inn, out, aut) = (
            self.aut.inn.len(),
            self.aut.out_reps.len(),
            self.aut.aut.order(),
        );
        let witness = if inn * self.aut.center_order != g.order() {
            Some(format!(
                "|Inn| = {inn} but [G : Z(G)] = {}",
                g.order() / self.aut.center_order
            ))
        } else if inn * out != aut {
            Some(format!("|Inn|·|Out| = {} ≠ |Aut| = {aut}", inn * out))
        } else {
            None
        };
        self.report("inn-center", witness)
    }

    fn gammas(&self) -> std::result::Result<&[u32], String> {
        self.gammas
            .get_or_init(|| {
                let aut = &self.aut.aut;
                let mut out = Vec::with_capacity(self.deltas.len() * self.centralizer.order());
                for h in &self.deltas {
                    for c in self.centralizer.elements() {
                        let alpha = h.compose_unchecked(c);
                        let map = gamma_map(&self.emb, &alpha).map_err(|e| e.to_string())?;
                        let i = aut
                            .index_of(&Perm::from_images_unchecked(map))
                            .ok_or_else(|| format!("Γ({alpha}) is not an automorphism"))?;
                        out.push(i as u32);
                    }
                }
                Ok(out)
            })
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    /// `C = {α ∈ Δ(Aut G)·C : Γ(α) = id}`.
    pub fn check_centralizer_kernel(&self) -> CheckReport {
        let witness = match self.gammas() {
            Err(e) => Some(e),
            Ok(gammas) => {
                let c = &self.centralizer;
                let mut kernel = 0;
                let mut bad = None;
                for (h, d) in self.deltas.iter().enumerate() {
                    for (j, x) in c.elements().iter().enumerate() {
                        if gammas[h * c.order() + j] as usize != self.aut.aut.identity() {
                            continue;
                        }
                        kernel += 1;
                        let alpha = d.compose_unchecked(x);
                        if bad.is_none() && !c.contains(&alpha) {
                            bad = Some(format!("Γ({alpha}) = id but it is not in C"));
                        }
                    }
                }
                bad.or_else(|| {
                    (kernel != c.order())
                        .then(|| format!("kernel has {kernel} elements, C has {}", c.order()))
                })
            }
        };
        self.report("centralizer-kernel", witness)
    }

    /// `H ∩ C = {1}`; `H` normalizes `C`, so `H·C` is a group; `H` and `C`
    /// normalize `Ĝ`; with `|Ω| ≤ caps.normalizer_omega` also `H·C = N(Ĝ)`.
    pub fn check_split_extension(&self, caps: &Caps) -> CheckReport {
        let c = &self.centralizer;
        let ghat = self.emb.image();
        let normalizes = |a: &Perm| {
            ghat.generators()
                .iter()
                .all(|g| ghat.contains(&a.conjugate_unchecked(g)))
        };
        let witness = (|| {
            for d in &self.deltas {
                if !d.is_identity() && c.contains(d) {
                    return Some(format!("{d} lies in H ∩ C"));
                }
                if !normalizes(d) {
                    return Some(format!("{d} in H does not normalize Ĝ"));
                }
                for x in c.generators() {
                    if !c.contains(&d.conjugate_unchecked(x)) {
                        return Some(format!("{d} in H does not normalize C"));
                    }
                }
            }
            if let Some(x) = c.generators().iter().find(|x| !normalizes(x)) {
                return Some(format!("{x} in C does not normalize Ĝ"));
            }
            if self.emb.omega() <= caps.normalizer_omega {
                let n = match normalizer_in_sym(self.emb.omega(), ghat, caps) {
                    Ok(n) => n,
                    Err(e) => return Some(e.to_string()),
                };
                let product: HashSet<Perm> = self
                    .deltas
                    .iter()
                    .flat_map(|d| c.elements().iter().map(move |x| d.compose_unchecked(x)))
                    .collect();
                if product.len() != n.order() || !n.elements().iter().all(|x| product.contains(x)) {
                    return Some(format!(
                        "|H·C| = {} but |N(Ĝ)| = {}",
                        product.len(),
                        n.order()
                    ));
                }
            }
            None
        })();
        self.report("split-extension", witness)
    }

    /// For every choice of at most `max_cosets` cosets `A₁..Aₙ` (as a set),
    /// every `α ∈ H·C` satisfies `Γ(α) ∈ 𝒜 ⇔ α ∈ C·𝒰`, where `𝒜` stabilizes
    /// each `Aᵢ` and `𝒰` fixes each `Aᵢ` and its subgroup `Uᵢ` pointwise.
    pub fn check_biconditional(&self, max_cosets: usize) -> CheckReport {
        let witness = match self.gammas() {
            Err(e) => Some(e),
            Ok(gammas) => self.biconditional_witness(gammas, max_cosets),
        };
        self.report("basis-biconditional", witness)
    }

    fn biconditional_witness(&self, gammas: &[u32], max_cosets: usize) -> Option<String> {
        let omega = self.emb.omega();
        let c = &self.centralizer;
        let subgroup_point = |k: usize| {
            let key = self.emb.labeling.entries[k];
            self.emb.w.idempotent_of(key.member) - 1
        };
        let mut choices: Vec<Vec<usize>> = vec![vec![]];
        if max_cosets >= 1 {
            choices.extend((0..omega).map(|k| vec![k]));
        }
        if max_cosets >= 2 {
            for a in 0..omega {
                choices.extend((a + 1..omega).map(|b| vec![a, b]));
            }
        }
        for cosets in choices {
            let stab: HashSet<usize> = match basis_subgroup(&self.emb, &self.aut.aut, &cosets) {
                Ok(s) => s.into_iter().collect(),
                Err(e) => return Some(e.to_string()),
            };
            let mut points: Vec<usize> = cosets
                .iter()
                .flat_map(|&k| [k, subgroup_point(k)])
                .collect();
            points.sort_unstable();
            points.dedup();
            let key = |f: &dyn Fn(usize) -> usize| {
                points
                    .iter()
                    .fold(0u64, |acc, &p| acc * omega as u64 + f(p) as u64)
            };
            let restrictions: HashSet<u64> =
                c.elements().iter().map(|x| key(&|p| x.apply(p))).collect();
            for (h, d) in self.deltas.iter().enumerate() {
                for (j, x) in c.elements().iter().enumerate() {
                    let lhs = stab.contains(&(gammas[h * c.order() + j] as usize));
                    let rhs = restrictions.contains(&key(&|p| d.apply(x.apply(p))));
                    if lhs != rhs {
                        return Some(format!(
                            "α = {} with cosets {:?}: Γ(α) ∈ 𝒜 is {lhs}, α ∈ C·𝒰 is {rhs}",
                            d.compose_unchecked(x),
                            cosets
                        ));
                    }
                }
            }
        }
        None
    }

    /// The single-coset stabilizers intersect to the identity of `Aut(G)`.
    pub fn check_stabilizers_separate(&self) -> CheckReport {
        let aut = &self.aut.aut;
        let mut left: HashSet<usize> = (0..aut.order()).collect();
        for k in 0..self.emb.omega() {
            let s: HashSet<usize> = basis_subgroup(&self.emb, aut, &[k])
                .unwrap()
                .into_iter()
                .collect();
            left.retain(|x| s.contains(x));
        }
        let witness = (left.len() != 1)
            .then(|| format!("{} automorphisms fix every basis coset", left.len()));
        self.report("stabilizers-separate", witness)
    }

    /// Every check, with the biconditional over single and double coset choices.
    pub fn run_all(&self, caps: &Caps) -> Vec<CheckReport> {
        vec![
            self.check_section(),
            self.check_inner(),
            self.check_inn_center(),
            self.check_centralizer_kernel(),
            self.check_split_extension(caps),
            self.check_biconditional(2),
            self.check_stabilizers_separate(),
        ]
    }
}
