use serde::{Deserialize, Serialize};

/// Size limits for the exhaustive algorithms. Exceeding one is a hard
/// [`Error::CapExceeded`](crate::Error::CapExceeded), never a silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Elements produced by generator closure; also members of a closed basis.
    pub closure: usize,
    /// Group order for subgroup enumeration.
    pub subgroups: usize,
    /// Group order for the automorphism oracle.
    pub automorphisms: usize,
    /// Size of Ω for the centralizer backtracker.
    pub centralizer_omega: usize,
    /// Size of Ω for the exhaustive normalizer scan.
    pub normalizer_omega: usize,
    /// Elements of a materialized subgroup of Sym(Ω) (centralizers, products H·C).
    pub sym_elements: usize,
    /// Carrier size for meet groupoid isomorphism search.
    pub isomorphism_carrier: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            closure: 10_000,
            subgroups: 64,
            automorphisms: 24,
            centralizer_omega: 16,
            normalizer_omega: 8,
            sym_elements: 2_000_000,
            isomorphism_carrier: 200,
        }
    }
}

impl Caps {
    /// Caps used by the automorphism-topology suite. The centralizer
    /// backtracker works orbit by orbit, so its cost follows the order of the
    /// centralizer rather than |Ω|; the catalog needs |Ω| up to 35 (D4).
    pub fn aut_suite() -> Self {
        Caps {
            centralizer_omega: 256,
            ..Caps::default()
        }
    }
}
