//! Towers of finite groups `G₀ ← G₁ ← …` with their chain of kernels as a
//! basis: level-indexed cosets, truncations, and filters refined level by level.

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::functor_g::enumerate_full_filters;
use crate::functor_w::{build_w, CosetGroupoid};
use crate::group::{GroupHom, GroupSpec, PermGroup};
use crate::groupoid::{check_isomorphism, MeetGroupoid, EMPTY};
use crate::perm::Perm;
use crate::subgroup::{Subgroup, SubgroupFamily};

/// Deepest level of the built-in 2-adic tower.
pub const TWO_ADIC_MAX_DEPTH: usize = 8;

/// A finite inverse system; `maps[d]` is the surjection `G_{d+1} → G_d`.
#[derive(Debug, Clone)]
pub struct InverseSystem {
    levels: Vec<PermGroup>,
    maps: Vec<GroupHom>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InverseSystemJson {
    pub levels: Vec<GroupSpec>,
    pub maps: Vec<Vec<usize>>,
}

impl InverseSystem {
    pub fn new(levels: Vec<PermGroup>, maps: Vec<GroupHom>) -> Result<Self> {
        if levels.is_empty() || maps.len() + 1 != levels.len() {
            return Err(Error::Tower(format!(
                "{} levels need {} maps",
                levels.len(),
                levels.len().saturating_sub(1)
            )));
        }
        for (d, map) in maps.iter().enumerate() {
            let checked = GroupHom::new(&levels[d + 1], &levels[d], map.map().to_vec())
                .map_err(|e| Error::Tower(format!("map {d}: {e}")))?;
            if !checked.is_surjective(&levels[d]) {
                return Err(Error::Tower(format!(
                    "map {} → {d} is not surjective",
                    d + 1
                )));
            }
        }
        Ok(InverseSystem { levels, maps })
    }

    pub fn from_json(json: &InverseSystemJson, caps: &Caps) -> Result<Self> {
        let levels = json
            .levels
            .iter()
            .map(|s| PermGroup::from_spec(s, caps))
            .collect::<Result<Vec<_>>>()?;
        let maps = json
            .maps
            .iter()
            .enumerate()
            .map(|(d, m)| {
                let src = levels
                    .get(d + 1)
                    .ok_or_else(|| Error::Tower("more maps than levels".into()))?;
                GroupHom::new(src, &levels[d], m.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        InverseSystem::new(levels, maps)
    }

    pub fn to_json(&self) -> InverseSystemJson {
        InverseSystemJson {
            levels: self.levels.iter().map(PermGroup::to_spec).collect(),
            maps: self.maps.iter().map(|m| m.map().to_vec()).collect(),
        }
    }

    /// `Z/2^d` for `d = 0..=depth`, each acting regularly, with reduction maps.
    pub fn two_adic(depth: usize) -> Result<Self> {
        if depth > TWO_ADIC_MAX_DEPTH {
            return Err(Error::Depth {
                depth,
                max: TWO_ADIC_MAX_DEPTH,
            });
        }
        let caps = Caps::default();
        let levels = (0..=depth)
            .map(|d| {
                let n = 1usize << d;
                let gens: Vec<Perm> = if n == 1 {
                    vec![]
                } else {
                    vec![Perm::new((0..n).map(|i| (i + 1) % n).collect())?]
                };
                Ok(PermGroup::generate(n, &gens, &caps)?.with_name(format!("Z{n}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let maps = (0..depth)
            .map(|d| {
                let target_gen = if d == 0 { vec![0] } else { vec![1] };
                GroupHom::from_generator_images(&levels[d + 1], &levels[d], &target_gen)
            })
            .collect::<Result<Vec<_>>>()?;
        InverseSystem::new(levels, maps)
    }

    /// `1 ← Z/2 ← D4 ← D8` (orders 1, 2, 8, 16), each acting regularly:
    /// `D4 → Z/2` has the rotations as kernel and `D8 → D4` kills the
    /// rotation by a half turn.
    pub fn dihedral(depth: usize) -> Result<Self> {
        if depth > 3 {
            return Err(Error::Depth { depth, max: 3 });
        }
        let caps = Caps::default();
        let natural = [
            PermGroup::trivial(1),
            PermGroup::generate(2, &[Perm::parse_cycles(2, "(0 1)")?], &caps)?,
            PermGroup::generate(
                4,
                &[
                    Perm::parse_cycles(4, "(0 1 2 3)")?,
                    Perm::parse_cycles(4, "(1 3)")?,
                ],
                &caps,
            )?,
            PermGroup::generate(
                8,
                &[
                    Perm::parse_cycles(8, "(0 1 2 3 4 5 6 7)")?,
                    Perm::parse_cycles(8, "(1 7)(2 6)(3 5)")?,
                ],
                &caps,
            )?,
        ];
        let names = ["trivial", "Z2", "D4", "D8"];
        let idx = |g: &PermGroup, cycles: &str| {
            g.index_of(&Perm::parse_cycles(g.degree(), cycles).unwrap())
                .unwrap()
        };
        let natural_maps = [
            GroupHom::from_generator_images(&natural[1], &natural[0], &[0])?,
            GroupHom::from_generator_images(
                &natural[2],
                &natural[1],
                &[0, idx(&natural[1], "(0 1)")],
            )?,
            GroupHom::from_generator_images(
                &natural[3],
                &natural[2],
                &[idx(&natural[2], "(0 1 2 3)"), idx(&natural[2], "(1 3)")],
            )?,
        ];
        let mut levels = Vec::new();
        let mut isos = Vec::new();
        for (g, name) in natural.iter().zip(names).take(depth + 1) {
            let (reg, iso) = regular_with_iso(g)?;
            levels.push(reg.with_name(name));
            isos.push(iso);
        }
        let maps = (0..depth)
            .map(|d| {
                let inv = isos[d + 1].inverse().unwrap();
                GroupHom::new(
                    &levels[d + 1],
                    &levels[d],
                    isos[d].after(&natural_maps[d]).after(&inv).map().to_vec(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        InverseSystem::new(levels, maps)
    }

    pub fn depth(&self) -> usize {
        self.maps.len()
    }

    pub fn level(&self, d: usize) -> Result<&PermGroup> {
        self.levels.get(d).ok_or(Error::Depth {
            depth: d,
            max: self.depth(),
        })
    }

    fn check_depth(&self, d: usize) -> Result<()> {
        if d > self.depth() {
            Err(Error::Depth {
                depth: d,
                max: self.depth(),
            })
        } else {
            Ok(())
        }
    }

    /// Image of `x ∈ G_from` in `G_to`, `to ≤ from`.
    pub fn project(&self, from: usize, to: usize, mut x: usize) -> usize {
        debug_assert!(to <= from && from <= self.depth());
        for d in (to..from).rev() {
            x = self.maps[d].apply(x);
        }
        x
    }

    /// `ker(G_d → G_j)`.
    pub fn kernel(&self, d: usize, j: usize) -> Result<Subgroup> {
        self.check_depth(d)?;
        if j > d {
            return Err(Error::Depth { depth: j, max: d });
        }
        let g = &self.levels[d];
        let e = self.levels[j].identity();
        Subgroup::new(
            g,
            (0..g.order())
                .filter(|&x| self.project(d, j, x) == e)
                .collect(),
        )
    }

    /// `G_d` with the chain of kernels `{ker(G_d → G_j) : j ≤ d}`.
    pub fn truncate(&self, d: usize) -> Result<(PermGroup, SubgroupFamily)> {
        self.check_depth(d)?;
        let g = self.levels[d].clone();
        let members = (0..=d)
            .map(|j| self.kernel(d, j))
            .collect::<Result<Vec<_>>>()?;
        let family = SubgroupFamily::new(&g, members)?;
        Ok((g, family))
    }

    /// Whether `G_{j} → G_{j-1}` is injective, so level `j` adds no new cosets.
    fn step_is_iso(&self, j: usize) -> bool {
        self.levels[j].order() == self.levels[j - 1].order()
    }

    /// Moves a coset down to the least level at which it is a full preimage.
    pub fn canonical(&self, c: LevelCoset) -> Result<LevelCoset> {
        self.check_depth(c.level)?;
        if c.element >= self.levels[c.level].order() {
            return Err(Error::InvalidId {
                id: c.element,
                size: self.levels[c.level].order(),
            });
        }
        let mut c = c;
        while c.level > 0 && self.step_is_iso(c.level) {
            c = LevelCoset {
                level: c.level - 1,
                element: self.maps[c.level - 1].apply(c.element),
            };
        }
        Ok(c)
    }

    /// Intersection: the coarser coset contains the finer one or misses it.
    pub fn meet(&self, a: Option<LevelCoset>, b: Option<LevelCoset>) -> Result<Option<LevelCoset>> {
        let (Some(a), Some(b)) = (a, b) else {
            return Ok(None);
        };
        let (a, b) = (self.canonical(a)?, self.canonical(b)?);
        let (coarse, fine) = if a.level <= b.level { (a, b) } else { (b, a) };
        Ok(
            (self.project(fine.level, coarse.level, fine.element) == coarse.element)
                .then_some(fine),
        )
    }

    /// Defined exactly when both cosets belong to the same kernel; kernels
    /// are normal, so left and right cosets coincide.
    pub fn product(
        &self,
        a: Option<LevelCoset>,
        b: Option<LevelCoset>,
    ) -> Result<Option<Option<LevelCoset>>> {
        match (a, b) {
            (None, None) => Ok(Some(None)),
            (None, Some(x)) | (Some(x), None) => {
                self.canonical(x)?;
                Ok(None)
            }
            (Some(a), Some(b)) => {
                let (a, b) = (self.canonical(a)?, self.canonical(b)?);
                if a.level != b.level {
                    return Ok(None);
                }
                let g = &self.levels[a.level];
                Ok(Some(Some(LevelCoset {
                    level: a.level,
                    element: g.mul(a.element, b.element),
                })))
            }
        }
    }

    pub fn inverse(&self, a: Option<LevelCoset>) -> Result<Option<LevelCoset>> {
        a.map(|a| {
            let a = self.canonical(a)?;
            Ok(LevelCoset {
                level: a.level,
                element: self.levels[a.level].inv(a.element),
            })
        })
        .transpose()
    }

    /// The meet groupoid of all canonical cosets of level at most `d`,
    /// with every table entry computed by the level operations.
    pub fn lazy_truncation(&self, d: usize) -> Result<LazyTruncation> {
        self.check_depth(d)?;
        let mut carrier: Vec<Option<LevelCoset>> = vec![None];
        for j in 0..=d {
            if j > 0 && self.step_is_iso(j) {
                continue;
            }
            carrier.extend((0..self.levels[j].order()).map(|x| {
                Some(LevelCoset {
                    level: j,
                    element: x,
                })
            }));
        }
        let size = carrier.len();
        let position = |c: Option<LevelCoset>| -> usize {
            carrier
                .iter()
                .position(|&x| x == c)
                .expect("canonical coset in carrier")
        };
        let mut inverse = vec![EMPTY; size];
        let mut meet = vec![EMPTY; size * size];
        let mut product = vec![None; size * size];
        for a in 0..size {
            inverse[a] = position(self.inverse(carrier[a])?);
            for b in 0..size {
                meet[a * size + b] = position(self.meet(carrier[a], carrier[b])?);
                product[a * size + b] = self.product(carrier[a], carrier[b])?.map(position);
            }
        }
        let labels = carrier
            .iter()
            .map(|c| match c {
                None => "∅".to_string(),
                Some(c) => format!("{}@{}", c.element, c.level),
            })
            .collect();
        Ok(LazyTruncation {
            depth: d,
            carrier,
            groupoid: MeetGroupoid::from_flat(size, inverse, meet, product, Some(labels)),
        })
    }

    /// For each coset of the lazy truncation at depth `d`, the carrier id of
    /// the same set of elements of `G_d` in the eager `W(truncate(d))`.
    pub fn lazy_to_eager(
        &self,
        lazy: &LazyTruncation,
        eager: &CosetGroupoid,
    ) -> Result<Vec<usize>> {
        let d = lazy.depth;
        let g = &self.levels[d];
        lazy.carrier
            .iter()
            .map(|c| match c {
                None => Ok(EMPTY),
                Some(c) => {
                    let set: Vec<usize> = (0..g.order())
                        .filter(|&x| self.project(d, c.level, x) == c.element)
                        .collect();
                    eager.id_of_set(&set).ok_or_else(|| {
                        Error::Tower(format!(
                            "coset {}@{} has no eager counterpart",
                            c.element, c.level
                        ))
                    })
                }
            })
            .collect()
    }

    /// Checks that the lazy and eager groupoids at depth `d` agree element for element.
    pub fn lazy_eager_agree(&self, d: usize) -> Result<()> {
        let lazy = self.lazy_truncation(d)?;
        let (g, family) = self.truncate(d)?;
        let eager = build_w(&g, &family)?;
        let map = self.lazy_to_eager(&lazy, &eager)?;
        check_isomorphism(&lazy.groupoid, eager.groupoid(), &map)
    }

    /// All lifts of a depth-`d` filter to depth `target`, refining one level at a time.
    pub fn refine_filter(&self, partial: &LevelFilter, target: usize) -> Result<Vec<LevelFilter>> {
        self.check_depth(target)?;
        partial.validate(self)?;
        if target < partial.depth() {
            return Err(Error::Depth {
                depth: target,
                max: partial.depth(),
            });
        }
        let mut frontier = vec![partial.clone()];
        for d in partial.depth()..target {
            let map = &self.maps[d];
            let mut next = Vec::new();
            for f in &frontier {
                let top = *f.choice.last().unwrap();
                for y in (0..self.levels[d + 1].order()).filter(|&y| map.apply(y) == top) {
                    let mut choice = f.choice.clone();
                    choice.push(y);
                    next.push(LevelFilter { choice });
                }
            }
            frontier = next;
        }
        frontier.sort_by_key(|f| f.top());
        Ok(frontier)
    }

    /// `(d+1, x) ↦ (d, π(x))`, identity on coarser levels: the carrier map
    /// from the depth-`d+1` truncation onto the depth-`d` one.
    pub fn quotient_map(&self, d: usize) -> Result<(LazyTruncation, LazyTruncation, Vec<usize>)> {
        self.check_depth(d + 1)?;
        let fine = self.lazy_truncation(d + 1)?;
        let coarse = self.lazy_truncation(d)?;
        let map = fine
            .carrier
            .iter()
            .map(|c| {
                let image = c.map(|c| {
                    if c.level <= d {
                        c
                    } else {
                        LevelCoset {
                            level: d,
                            element: self.maps[d].apply(c.element),
                        }
                    }
                });
                let image = image.map(|x| self.canonical(x)).transpose()?;
                coarse
                    .carrier
                    .iter()
                    .position(|&x| x == image)
                    .ok_or_else(|| Error::Tower("quotient image missing".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((fine, coarse, map))
    }

    /// The quotient map is surjective, monotone, preserves products and
    /// inverses, and sends each finest coset to the coset above it one level up.
    pub fn check_quotient(&self, d: usize) -> Result<Option<String>> {
        let (fine, coarse, q) = self.quotient_map(d)?;
        let (m, n) = (&fine.groupoid, &coarse.groupoid);
        let mut hit = vec![false; n.size()];
        for &y in &q {
            hit[y] = true;
        }
        if !hit.iter().all(|&h| h) {
            return Ok(Some("quotient map is not surjective".into()));
        }
        for a in 0..m.size() {
            if q[m.inv(a)] != n.inv(q[a]) {
                return Ok(Some(format!("inverse of {}", m.label(a))));
            }
            for b in 0..m.size() {
                if m.leq(a, b) && !n.leq(q[a], q[b]) {
                    return Ok(Some(format!("order at ({}, {})", m.label(a), m.label(b))));
                }
                if let Some(c) = m.mul(a, b) {
                    if n.mul(q[a], q[b]) != Some(q[c]) {
                        return Ok(Some(format!("product at ({}, {})", m.label(a), m.label(b))));
                    }
                }
            }
        }
        let kernel_d = self.levels[d].identity();
        let u_d = fine
            .carrier
            .iter()
            .position(|&c| {
                c == Some(
                    self.canonical(LevelCoset {
                        level: d,
                        element: kernel_d,
                    })
                    .unwrap(),
                )
            })
            .unwrap();
        for (a, c) in fine.carrier.iter().enumerate() {
            if let Some(c) = c {
                if c.level == d + 1 {
                    let up = m.level_up(a, u_d)?;
                    if fine.carrier[up].map(|x| self.canonical(x).unwrap()) != coarse.carrier[q[a]]
                    {
                        return Ok(Some(format!("level-up disagrees at {}", m.label(a))));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Number of full filters of the depth-`d` truncation.
    pub fn filter_count(&self, d: usize) -> Result<usize> {
        Ok(enumerate_full_filters(&self.lazy_truncation(d)?.groupoid)?.len())
    }
}

fn regular_with_iso(g: &PermGroup) -> Result<(PermGroup, GroupHom)> {
    let reg = g.regular_representation()?;
    let map = (0..g.order())
        .map(|x| {
            let p = Perm::new((0..g.order()).map(|i| g.mul(x, i)).collect())?;
            Ok(reg.index_of(&p).unwrap())
        })
        .collect::<Result<Vec<_>>>()?;
    let iso = GroupHom::new(g, &reg, map)?;
    Ok((reg, iso))
}

/// The preimage in the limit of `element ∈ G_level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelCoset {
    pub level: usize,
    pub element: usize,
}

/// A coherent choice of one element per level `0..=depth`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelFilter {
    pub choice: Vec<usize>,
}

impl LevelFilter {
    /// The filter determined by `x ∈ G_d`.
    pub fn from_element(sys: &InverseSystem, d: usize, x: usize) -> Result<Self> {
        sys.check_depth(d)?;
        Ok(LevelFilter {
            choice: (0..=d).map(|j| sys.project(d, j, x)).collect(),
        })
    }

    pub fn depth(&self) -> usize {
        self.choice.len() - 1
    }

    pub fn top(&self) -> usize {
        *self.choice.last().unwrap()
    }

    fn validate(&self, sys: &InverseSystem) -> Result<()> {
        if self.choice.is_empty() {
            return Err(Error::IncoherentFilter("a filter needs level 0".into()));
        }
        sys.check_depth(self.depth())?;
        for d in 0..self.depth() {
            if sys.maps[d].apply(self.choice[d + 1]) != self.choice[d] {
                return Err(Error::IncoherentFilter(format!(
                    "levels {d} and {} disagree",
                    d + 1
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LazyTruncation {
    pub depth: usize,
    /// Carrier in id order; `None` is ∅.
    pub carrier: Vec<Option<LevelCoset>>,
    pub groupoid: MeetGroupoid,
}
