use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("cycle notation parse error: {0}")]
    Parse(String),

    #[error("{what} exceeds cap: {actual} > {limit}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("element {0} is not a member of the group")]
    NotAMember(usize),

    #[error("invalid element id {id} (carrier size {size})")]
    InvalidId { id: usize, size: usize },

    #[error("element {0} is not an idempotent")]
    NotIdempotent(usize),

    #[error("the empty element has no coset frame")]
    EmptyElement,

    #[error("meet groupoid is not full: {0}")]
    NotFull(String),

    #[error("malformed meet groupoid: {0}")]
    Malformed(String),

    #[error("subgroup family is not closed: {0}")]
    BasisNotClosed(String),

    #[error("empty subgroup family")]
    EmptyBasis,

    #[error("automorphism does not preserve the basis: {0}")]
    NotInvariant(String),

    #[error("permutation does not normalize the embedded group: {0}")]
    NotNormalizing(String),

    #[error("basis is not separating: intersection has order {kernel_order}; only G/K with |K| = {kernel_order} can be reconstructed")]
    NonSeparating { kernel_order: usize },

    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),

    #[error("not an isomorphism: {0}")]
    NotAnIsomorphism(String),

    #[error("incoherent filter: {0}")]
    IncoherentFilter(String),

    #[error("depth {depth} exceeds tower depth {max}")]
    Depth { depth: usize, max: usize },

    #[error("malformed inverse system: {0}")]
    Tower(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownGroup(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
