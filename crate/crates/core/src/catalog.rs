//! Built-in groups and basis policies.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::functor_w::close_basis;
use crate::group::{GroupSpec, PermGroup};
use crate::perm::Perm;
use crate::subgroup::{Subgroup, SubgroupFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisPolicy {
    /// Every subgroup.
    All,
    /// Derived series down to `{e}`.
    Chain,
    /// `{G, {e}}`.
    Minimal,
    /// Subgroups read from a file, then closed.
    File,
}

impl FromStr for BasisPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(BasisPolicy::All),
            "chain" => Ok(BasisPolicy::Chain),
            "minimal" => Ok(BasisPolicy::Minimal),
            "file" => Ok(BasisPolicy::File),
            other => Err(Error::Parse(format!("unknown basis policy {other:?}"))),
        }
    }
}

impl fmt::Display for BasisPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisPolicy::All => "all",
            BasisPolicy::Chain => "chain",
            BasisPolicy::Minimal => "minimal",
            BasisPolicy::File => "file",
        })
    }
}

/// Builds the basis for one of the computed policies. [`BasisPolicy::File`]
/// needs explicit subgroups; use [`basis_from_raw`].
pub fn basis_for(group: &PermGroup, policy: BasisPolicy, caps: &Caps) -> Result<SubgroupFamily> {
    match policy {
        BasisPolicy::All => SubgroupFamily::all_subgroups(group, caps),
        BasisPolicy::Chain => SubgroupFamily::derived_chain(group),
        BasisPolicy::Minimal => SubgroupFamily::minimal(group),
        BasisPolicy::File => Err(Error::Parse(
            "the file policy needs a list of subgroups".into(),
        )),
    }
}

/// Closes a list of element-index sets into a basis.
pub fn basis_from_raw(
    group: &PermGroup,
    raw: &[Vec<usize>],
    caps: &Caps,
) -> Result<SubgroupFamily> {
    let subgroups = raw
        .iter()
        .map(|s| Subgroup::new(group, s.clone()))
        .collect::<Result<Vec<_>>>()?;
    close_basis(group, &subgroups, caps)
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub spec: GroupSpec,
    pub default_basis: BasisPolicy,
    /// Only available with the large flag.
    pub large: bool,
}

impl CatalogEntry {
    pub fn group(&self, caps: &Caps) -> Result<PermGroup> {
        PermGroup::from_spec(&self.spec, caps)
    }
}

fn cycles(degree: usize, gens: &[&str]) -> Vec<Vec<usize>> {
    gens.iter()
        .map(|g| {
            Perm::parse_cycles(degree, g)
                .expect("catalog generator")
                .images()
                .to_vec()
        })
        .collect()
}

fn entry(
    name: &'static str,
    degree: usize,
    generators: Vec<Vec<usize>>,
    large: bool,
) -> CatalogEntry {
    CatalogEntry {
        name,
        spec: GroupSpec {
            degree,
            generators,
            name: name.to_string(),
        },
        default_basis: BasisPolicy::All,
        large,
    }
}

/// Every entry, small ones first.
pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        entry("trivial", 1, vec![], false),
        entry("Z2", 2, cycles(2, &["(0 1)"]), false),
        entry("Z3", 3, cycles(3, &["(0 1 2)"]), false),
        entry("Z4", 4, cycles(4, &["(0 1 2 3)"]), false),
        entry("Z8", 8, cycles(8, &["(0 1 2 3 4 5 6 7)"]), false),
        entry("Z2xZ2", 4, cycles(4, &["(0 1)", "(2 3)"]), false),
        entry("S3", 3, cycles(3, &["(0 1)", "(0 1 2)"]), false),
        entry("D4", 4, cycles(4, &["(0 1 2 3)", "(0 2)"]), false),
        // regular representation of the quaternions
        entry(
            "Q8",
            8,
            vec![vec![2, 3, 1, 0, 6, 7, 5, 4], vec![4, 5, 7, 6, 1, 0, 2, 3]],
            false,
        ),
        entry("S4", 4, cycles(4, &["(0 1)", "(0 1 2 3)"]), true),
    ]
}

/// The entries available with or without the large flag.
pub fn available(large: bool) -> Vec<CatalogEntry> {
    catalog()
        .into_iter()
        .filter(|e| large || !e.large)
        .collect()
}

pub fn lookup(name: &str, large: bool) -> Result<CatalogEntry> {
    let e = catalog()
        .into_iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownGroup(name.to_string()))?;
    if e.large && !large {
        return Err(Error::UnknownGroup(format!(
            "{name} (requires the large flag)"
        )));
    }
    Ok(e)
}
