use thiserror::Error;

use crate::kernel::atom::Symbol;
use crate::kernel::belief::BeliefState;
use crate::kernel::validate::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: {message}")]
    Record { line: usize, message: String },

    #[error("invalid system ({} problem(s)): {}", .0.len(), .0.first().map(|d| d.to_string()).unwrap_or_default())]
    Invalid(Vec<Diagnostic>),

    #[error("context {context}: operation `{op}` is not in the management base")]
    UndeclaredOperation { context: usize, op: Symbol },

    #[error("context {context}: operation `{op}` has no management semantics")]
    UnsupportedOperation { context: usize, op: Symbol },

    #[error("context {context}: `{formula}` is next-wrapped and cannot be applied directly")]
    NextWrapped { context: usize, formula: String },

    #[error("context {context}: `{atom}` is outside the context's vocabulary")]
    Vocabulary { context: usize, atom: String },

    #[error("inconsistent ontology: bottom derived for `{individual}`")]
    Inconsistent { individual: String },

    #[error("context {context} ({kind}) is not reducible")]
    NotReducible { context: usize, kind: &'static str },

    #[error("context {context} ({kind}) has no least belief set")]
    NotNormal { context: usize, kind: &'static str },

    #[error("context {context} ({kind}) does not accept exactly one belief set per knowledge base")]
    NotDeterministic { context: usize, kind: &'static str },

    #[error("system is not definite: {0}")]
    NotDefinite(String),

    #[error("context {context}: operation `{op}` is not known to be monotone")]
    NonMonotoneOperation { context: usize, op: Symbol },

    #[error("context {context}: knowledge base shrank during monotone iteration")]
    Shrinking { context: usize },

    #[error("{what}: no fixpoint within {cap} iterations")]
    IterationCap { what: &'static str, cap: usize },

    #[error("belief state has {found} components, system has {expected} contexts")]
    Shape { expected: usize, found: usize },

    #[error("instant {instant}: no grounded equilibrium (gamma orbit: {})", fmt_orbit(.orbit))]
    NoGroundedEquilibrium { instant: usize, orbit: Vec<BeliefState> },

    #[error("instant {instant}: {count} grounded equilibria, evolving grounded equilibrium is not unique")]
    AmbiguousGroundedEquilibrium { instant: usize, count: usize },

    #[error("instant {instant}: {message}")]
    Instant { instant: usize, message: String },

    #[error("candidate universe of 2^{atoms} belief states exceeds the bound of 2^{bound_log2}")]
    UniverseTooLarge { atoms: usize, bound_log2: usize },

    #[error("requested size {size} exceeds the {available} available observation instants")]
    SizeExceedsObservations { size: usize, available: usize },
}

fn fmt_orbit(orbit: &[BeliefState]) -> String {
    orbit.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" -> ")
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Input problems (syntax, shape, vocabulary) as opposed to semantic
    /// verdicts such as a missing grounded equilibrium.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Record { .. }
                | Error::Invalid(_)
                | Error::Vocabulary { .. }
                | Error::Shape { .. }
                | Error::Instant { .. }
                | Error::SizeExceedsObservations { .. }
                | Error::UndeclaredOperation { .. }
                | Error::UnsupportedOperation { .. }
                | Error::NextWrapped { .. }
        )
    }
}
