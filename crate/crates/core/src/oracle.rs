//! Exhaustive reference computations: automorphism groups, and centralizers
//! and normalizers inside a full symmetric group.

use std::collections::HashSet;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Perm;

/// `Aut(G)` as a group of permutations of `G`'s element indices.
///
/// Each assignment of generator images (restricted to elements of matching
/// order) is extended along the Cayley graph; an assignment survives when
/// every edge is consistent and the extension is bijective.
pub fn brute_automorphisms(group: &PermGroup, caps: &Caps) -> Result<PermGroup> {
    let n = group.order();
    if n > caps.automorphisms {
        return Err(Error::CapExceeded {
            what: "group order for the automorphism oracle",
            limit: caps.automorphisms,
            actual: n,
        });
    }
    let gens: Vec<usize> = group
        .generators()
        .iter()
        .map(|g| group.index_of(g).expect("generator is an element"))
        .collect();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            let order = group.element_order(s);
            (0..n)
                .filter(|&x| group.element_order(x) == order)
                .collect()
        })
        .collect();

    let mut found = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    loop {
        let images: Vec<usize> = choice
            .iter()
            .zip(&candidates)
            .map(|(&c, cands)| cands[c])
            .collect();
        if let Some(map) = extend_on_generators(group, &gens, &images) {
            found.push(Perm::from_images_unchecked(map));
        }
        // odometer over the candidate lists
        let mut k = 0;
        loop {
            if k == gens.len() {
                return PermGroup::from_elements(n, found)
                    .map(|g| g.with_name(format!("Aut({})", group.name())));
            }
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn extend_on_generators(group: &PermGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let n = group.order();
    let mut map = vec![usize::MAX; n];
    map[0] = 0;
    let mut frontier = vec![0];
    while let Some(x) = frontier.pop() {
        for (&s, &t) in gens.iter().zip(images) {
            let y = group.mul(s, x);
            let v = group.mul(t, map[x]);
            if map[y] == usize::MAX {
                map[y] = v;
                frontier.push(y);
            } else if map[y] != v {
                return None;
            }
        }
    }
    let mut seen = vec![false; n];
    for &v in &map {
        if v == usize::MAX || std::mem::replace(&mut seen[v], true) {
            return None;
        }
    }
    Some(map)
}

/// The inner automorphism `h ↦ g h g⁻¹` as a permutation of element indices.
pub fn conjugation_map(group: &PermGroup, g: usize) -> Perm {
    Perm::from_images_unchecked((0..group.order()).map(|h| group.conjugate(g, h)).collect())
}

/// `C_Sym(Ω)(H)` by backtracking over orbit representatives.
///
/// A centralizing α is fixed on an orbit once the image of its
/// representative is chosen (`α(h·r) = h·α(r)`), so the search branches only
/// on those images and rejects any choice that breaks an edge of the orbit's
/// Schreier graph or collides with an earlier orbit.
pub fn centralizer_in_sym(omega_size: usize, h: &PermGroup, caps: &Caps) -> Result<PermGroup> {
    if omega_size > caps.centralizer_omega {
        return Err(Error::CapExceeded {
            what: "|Ω| for the centralizer search",
            limit: caps.centralizer_omega,
            actual: omega_size,
        });
    }
    if h.degree() != omega_size {
        return Err(Error::DegreeMismatch {
            left: omega_size,
            right: h.degree(),
        });
    }
    let gens = h.generators();
    let orbits = schreier_orbits(omega_size, gens);
    let mut search = CentralizerSearch {
        gens,
        orbits: &orbits,
        image: vec![usize::MAX; omega_size],
        used: vec![false; omega_size],
        found: Vec::new(),
        limit: caps.sym_elements,
    };
    search.run(0)?;
    PermGroup::from_elements(omega_size, search.found)
}

/// One orbit: representative first, then `(point, parent, generator)` in BFS order.
struct Orbit {
    rep: usize,
    tree: Vec<(usize, usize, usize)>,
    points: Vec<usize>,
}

fn schreier_orbits(n: usize, gens: &[Perm]) -> Vec<Orbit> {
    let mut seen = vec![false; n];
    let mut orbits = Vec::new();
    for rep in 0..n {
        if seen[rep] {
            continue;
        }
        seen[rep] = true;
        let mut points = vec![rep];
        let mut tree = Vec::new();
        let mut head = 0;
        while head < points.len() {
            let x = points[head];
            head += 1;
            for (k, g) in gens.iter().enumerate() {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    points.push(y);
                    tree.push((y, x, k));
                }
            }
        }
        orbits.push(Orbit { rep, tree, points });
    }
    orbits
}

struct CentralizerSearch<'a> {
    gens: &'a [Perm],
    orbits: &'a [Orbit],
    image: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Perm>,
    limit: usize,
}

impl CentralizerSearch<'_> {
    fn run(&mut self, depth: usize) -> Result<()> {
        if depth == self.orbits.len() {
            if self.found.len() >= self.limit {
                return Err(Error::CapExceeded {
                    what: "centralizer order",
                    limit: self.limit,
                    actual: self.found.len() + 1,
                });
            }
            self.found
                .push(Perm::from_images_unchecked(self.image.clone()));
            return Ok(());
        }
        let orbit = &self.orbits[depth];
        for target in 0..self.image.len() {
            if self.used[target] {
                continue;
            }
            if self.assign(orbit, target) {
                self.run(depth + 1)?;
            }
            for &p in &orbit.points {
                if self.image[p] != usize::MAX {
                    self.used[self.image[p]] = false;
                    self.image[p] = usize::MAX;
                }
            }
        }
        Ok(())
    }

    /// Propagates `α(rep) = target` over the orbit; false on any conflict.
    fn assign(&mut self, orbit: &Orbit, target: usize) -> bool {
        self.image[orbit.rep] = target;
        self.used[target] = true;
        for &(y, parent, k) in &orbit.tree {
            let v = self.gens[k].apply(self.image[parent]);
            if self.used[v] {
                return false;
            }
            self.image[y] = v;
            self.used[v] = true;
        }
        orbit.points.iter().all(|&x| {
            self.gens
                .iter()
                .all(|g| self.image[g.apply(x)] == g.apply(self.image[x]))
        })
    }
}

/// `N_Sym(Ω)(H)` by scanning every permutation of Ω.
pub fn normalizer_in_sym(omega_size: usize, h: &PermGroup, caps: &Caps) -> Result<PermGroup> {
    if omega_size > caps.normalizer_omega {
        return Err(Error::CapExceeded {
            what: "|Ω| for the exhaustive normalizer",
            limit: caps.normalizer_omega,
            actual: omega_size,
        });
    }
    if h.degree() != omega_size {
        return Err(Error::DegreeMismatch {
            left: omega_size,
            right: h.degree(),
        });
    }
    let mut found = Vec::new();
    for_each_permutation(omega_size, |alpha| {
        // conjugation is injective, so mapping the generators into H suffices
        if h.generators()
            .iter()
            .all(|g| h.contains(&alpha.conjugate_unchecked(g)))
        {
            found.push(alpha.clone());
        }
    });
    PermGroup::from_elements(omega_size, found)
}

/// Visits all `n!` permutations (Heap's algorithm).
pub(crate) fn for_each_permutation(n: usize, mut visit: impl FnMut(&Perm)) {
    let mut images: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    visit(&Perm::from_images_unchecked(images.clone()));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                images.swap(0, i);
            } else {
                images.swap(c[i], i);
            }
            visit(&Perm::from_images_unchecked(images.clone()));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Elementwise check that a set of permutations is closed under composition.
pub fn is_closed(elements: &[Perm]) -> bool {
    let set: HashSet<&Perm> = elements.iter().collect();
    elements.iter().all(|a| {
        elements
            .iter()
            .all(|b| set.contains(&a.compose_unchecked(b)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(n: usize, gens: &[&str]) -> PermGroup {
        let gens: Vec<Perm> = gens
            .iter()
            .map(|s| Perm::parse_cycles(n, s).unwrap())
            .collect();
        PermGroup::generate(n, &gens, &Caps::default()).unwrap()
    }

    /// Independent oracle: bijections of G that preserve every product.
    fn automorphism_count_oracle(g: &PermGroup) -> usize {
        let mut count = 0;
        for_each_permutation(g.order(), |f| {
            let ok = (0..g.order()).all(|a| {
                (0..g.order()).all(|b| f.apply(g.mul(a, b)) == g.mul(f.apply(a), f.apply(b)))
            });
            if ok {
                count += 1;
            }
        });
        count
    }

    #[test]
    fn automorphisms_of_small_cyclic_groups() {
        let caps = Caps::default();
        let z3 = gen(3, &["(0 1 2)"]);
        assert_eq!(brute_automorphisms(&z3, &caps).unwrap().order(), 2);
        assert_eq!(automorphism_count_oracle(&z3), 2);
        let trivial = PermGroup::trivial(1);
        assert_eq!(brute_automorphisms(&trivial, &caps).unwrap().order(), 1);
        // units mod 8 = {1, 3, 5, 7}
        let z8 = gen(8, &["(0 1 2 3 4 5 6 7)"]);
        let aut = brute_automorphisms(&z8, &caps).unwrap();
        assert_eq!(aut.order(), 4);
        let mut multipliers: Vec<usize> = aut.elements().iter().map(|f| f.apply(1)).collect();
        multipliers.sort_unstable();
        assert_eq!(multipliers, vec![1, 3, 5, 7]);
    }

    #[test]
    fn automorphisms_match_exhaustive_oracle() {
        let caps = Caps::default();
        for g in [
            gen(3, &["(0 1)", "(0 1 2)"]),
            gen(4, &["(0 1)", "(2 3)"]),
            gen(4, &["(0 1 2 3)"]),
        ] {
            assert_eq!(
                brute_automorphisms(&g, &caps).unwrap().order(),
                automorphism_count_oracle(&g)
            );
        }
    }

    #[test]
    fn automorphisms_contain_conjugations() {
        let g = gen(4, &["(0 1 2 3)", "(0 2)"]);
        let aut = brute_automorphisms(&g, &Caps::default()).unwrap();
        for x in 0..g.order() {
            assert!(aut.contains(&conjugation_map(&g, x)));
        }
        assert!(is_closed(aut.elements()));
    }

    #[test]
    fn automorphism_cap() {
        let s4 = gen(4, &["(0 1)", "(0 1 2 3)"]);
        let caps = Caps {
            automorphisms: 23,
            ..Caps::default()
        };
        assert!(matches!(
            brute_automorphisms(&s4, &caps),
            Err(Error::CapExceeded { .. })
        ));
    }

    /// Independent oracle: scan Sym(n) for commuting permutations.
    fn centralizer_oracle(h: &PermGroup) -> Vec<Perm> {
        let mut out = Vec::new();
        for_each_permutation(h.degree(), |a| {
            if h.elements()
                .iter()
                .all(|x| a.compose_unchecked(x) == x.compose_unchecked(a))
            {
                out.push(a.clone());
            }
        });
        out.sort();
        out
    }

    #[test]
    fn centralizer_examples() {
        let caps = Caps::default();
        let trivial = PermGroup::trivial(3);
        assert_eq!(centralizer_in_sym(3, &trivial, &caps).unwrap().order(), 6);
        let z2 = gen(2, &["(0 1)"]);
        assert_eq!(centralizer_in_sym(2, &z2, &caps).unwrap().order(), 2);
        // Z/2 acting on its cosets {G, {e}, {g}}: one fixed point and a 2-orbit
        let theta_z2 = gen(3, &["(1 2)"]);
        assert_eq!(centralizer_in_sym(3, &theta_z2, &caps).unwrap().order(), 2);
    }

    #[test]
    fn centralizer_matches_oracle() {
        let caps = Caps::default();
        for h in [
            gen(7, &["(3 4 5 6)(1 2)"]),
            gen(6, &["(0 1 2)", "(3 4 5)"]),
            gen(6, &["(0 1)(2 3)(4 5)"]),
            gen(5, &["(1 2)(3 4)", "(1 3)(2 4)"]),
            gen(6, &["(0 1 2)(3 4 5)", "(0 3)(1 5)(2 4)"]),
        ] {
            let ours = centralizer_in_sym(h.degree(), &h, &caps).unwrap();
            assert_eq!(ours.elements(), centralizer_oracle(&h).as_slice());
        }
    }

    #[test]
    fn normalizer_examples() {
        let caps = Caps::default();
        let s4 = gen(4, &["(0 1)", "(0 1 2 3)"]);
        assert_eq!(normalizer_in_sym(4, &s4, &caps).unwrap().order(), 24);
        let trivial = PermGroup::trivial(4);
        assert_eq!(normalizer_in_sym(4, &trivial, &caps).unwrap().order(), 24);
    }

    #[test]
    fn normalizer_of_embedded_z4() {
        // Z/4 acting on its 7 cosets: a 4-cycle, a 2-cycle and a fixed point.
        // Oracle over all 5040 permutations: α commutes with the generator θ
        // (centralizer) or conjugates it to θ or θ³ (normalizer).
        let caps = Caps::default();
        let h = gen(7, &["(3 4 5 6)(1 2)"]);
        let theta = h.generators()[0].clone();
        let theta_cubed = theta.compose(&theta).unwrap().compose(&theta).unwrap();
        let (mut c, mut nn) = (0, 0);
        for_each_permutation(7, |a| {
            let conj = a.conjugate_unchecked(&theta);
            if conj == theta {
                c += 1;
            }
            if conj == theta || conj == theta_cubed {
                nn += 1;
            }
        });
        assert_eq!((c, nn), (8, 16));
        let n = normalizer_in_sym(7, &h, &caps).unwrap();
        let cen = centralizer_in_sym(7, &h, &caps).unwrap();
        assert_eq!(n.order(), nn);
        assert_eq!(cen.order(), c);
        for x in cen.elements() {
            assert!(n.contains(x));
            for y in n.elements() {
                assert!(cen.contains(&y.conjugate_unchecked(x)));
            }
        }
    }

    #[test]
    fn normalizer_cap() {
        let h = PermGroup::trivial(9);
        assert!(matches!(
            normalizer_in_sym(9, &h, &Caps::default()),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn heap_visits_every_permutation_once() {
        let mut seen = HashSet::new();
        for_each_permutation(5, |p| {
            assert!(seen.insert(p.clone()));
        });
        assert_eq!(seen.len(), 120);
    }
}
