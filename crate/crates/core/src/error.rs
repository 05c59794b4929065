use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which axiom a structure failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axiom {
    /// A relation index never occurs in the label matrix.
    EmptyRelation,
    /// The identity relation is not exactly the diagonal.
    Diagonal,
    /// No involution `i -> i-bar` is compatible with transposition.
    Involution,
    /// Composition counts depend on more than the relation of the endpoints.
    Counting,
    /// A kernel row does not sum to one or has a negative entry.
    Stochastic,
    /// Generalized scheme axiom (1): underlying counting condition.
    GeneralizedCounting,
    /// Generalized scheme axiom (2): kernel support equals the relation.
    Support,
    /// Generalized scheme axiom (3): products stay in the span of the kernels.
    Span,
    /// Generalized scheme axiom (4): identity kernel.
    IdentityKernel,
    /// Generalized scheme axiom (5): adjoint relation against `omega_X`.
    Adjoint,
    /// Hypergroup: negative coefficient or mass different from one.
    ProbabilityPreserving,
    /// Hypergroup: the identity element does not act trivially.
    HypergroupIdentity,
    /// Hypergroup: `e` in the support of `x * y` exactly when `y = x-bar`.
    IdentityInSupport,
    /// Hypergroup: `(x * y)^- = y-bar * x-bar`.
    InvolutionAntihom,
    /// Hypergroup: associativity of the convolution.
    Associativity,
}

impl Axiom {
    /// Stable identifier used in reports.
    pub fn id(self) -> &'static str {
        match self {
            Axiom::EmptyRelation => "scheme.nonempty",
            Axiom::Diagonal => "scheme.diagonal",
            Axiom::Involution => "scheme.involution",
            Axiom::Counting => "scheme.counting",
            Axiom::Stochastic => "generalized.stochastic",
            Axiom::GeneralizedCounting => "generalized.1",
            Axiom::Support => "generalized.2",
            Axiom::Span => "generalized.3",
            Axiom::IdentityKernel => "generalized.4",
            Axiom::Adjoint => "generalized.5",
            Axiom::ProbabilityPreserving => "hypergroup.probability",
            Axiom::HypergroupIdentity => "hypergroup.identity",
            Axiom::IdentityInSupport => "hypergroup.3",
            Axiom::InvolutionAntihom => "hypergroup.involution",
            Axiom::Associativity => "hypergroup.associativity",
        }
    }

    /// Axiom number for generalized association schemes, if this is one.
    pub fn generalized_number(self) -> Option<u8> {
        match self {
            Axiom::GeneralizedCounting => Some(1),
            Axiom::Support => Some(2),
            Axiom::Span => Some(3),
            Axiom::IdentityKernel => Some(4),
            Axiom::Adjoint => Some(5),
            _ => None,
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Indices pinpointing a failed axiom. Relation/element indices are `i, j, k, l`;
/// points are `x, y` and, for counting failures, the reference pair `x_ref, y_ref`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_ref: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_ref: Option<usize>,
}

impl Witness {
    pub fn relations(i: usize, j: usize, k: usize) -> Self {
        Self { i: Some(i), j: Some(j), k: Some(k), ..Self::default() }
    }

    pub fn relation(i: usize) -> Self {
        Self { i: Some(i), ..Self::default() }
    }

    pub fn pair(x: usize, y: usize) -> Self {
        Self { x: Some(x), y: Some(y), ..Self::default() }
    }

    pub fn with_pair(mut self, x: usize, y: usize) -> Self {
        self.x = Some(x);
        self.y = Some(y);
        self
    }

    pub fn with_reference(mut self, x: usize, y: usize) -> Self {
        self.x_ref = Some(x);
        self.y_ref = Some(y);
        self
    }

    pub fn with_l(mut self, l: usize) -> Self {
        self.l = Some(l);
        self
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fields = [
            ("i", self.i),
            ("j", self.j),
            ("k", self.k),
            ("l", self.l),
            ("x", self.x),
            ("y", self.y),
            ("x'", self.x_ref),
            ("y'", self.y_ref),
        ];
        let parts: Vec<String> = fields.iter().filter_map(|(n, v)| v.map(|v| format!("{n}={v}"))).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("axiom {axiom} violated at {witness}: {detail}")]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub witness: Witness,
    pub detail: String,
}

impl AxiomViolation {
    pub fn new(axiom: Axiom, witness: Witness, detail: impl Into<String>) -> Self {
        Self { axiom, witness, detail: detail.into() }
    }

    pub fn generalized_number(&self) -> Option<u8> {
        self.axiom.generalized_number()
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Axiom(Box<AxiomViolation>),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("scheme is not unimodular: valency of {relation} differs from that of its involute")]
    NotUnimodular { relation: usize },
    #[error("hypergroup is not commutative")]
    NotCommutative,
    #[error("joint diagonalization failed after {attempts} attempts (eigenvalue gap {gap:e})")]
    DegenerateSpectrum { attempts: usize, gap: f64 },
    #[error("not a positive semicharacter: {reason} (residual {residual:e})")]
    NotASemicharacter { reason: String, residual: f64 },
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("quadrature did not converge (last estimate change {delta:e})")]
    QuadratureFailure { delta: f64 },
    #[error("ball of radius {radius} has {vertices} vertices, above the cap of {cap}")]
    BallTooLarge { radius: usize, vertices: u128, cap: usize },
    #[error("vertex {vertex} has several nearest ray points: {minimizers:?}")]
    NonUniqueMinimizer { vertex: usize, minimizers: Vec<usize> },
    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),
    #[error("support would grow to {needed}, above the cap of {cap}")]
    SupportCap { needed: usize, cap: usize },
    #[error("walk could leave the interior of the ball: needs {needed} levels, radius is {radius}")]
    WalkWouldExitBall { needed: usize, radius: usize },
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
}

impl From<AxiomViolation> for Error {
    fn from(v: AxiomViolation) -> Self {
        Error::Axiom(Box::new(v))
    }
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
