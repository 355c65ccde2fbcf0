//! One error type for the whole pipeline, with the CLI exit-code mapping.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    ParseSyntax { pos: usize, msg: String },
    #[error("division by zero literal at byte {pos}")]
    ParseDivZero { pos: usize },
    #[error("non-polynomial input at byte {pos}: {msg}")]
    ParseNonPoly { pos: usize, msg: String },
    #[error("the unknown y does not occur (degree zero in y)")]
    ZeroDegreeInY,
    #[error("bad input: {0}")]
    BadInput(String),

    #[error("degenerate family: {0}")]
    DegenerateFamily(String),
    #[error("point too close to the branch locus (min root separation {min_sep:.3e} <= {sep_tol:.3e})")]
    NearBranchLocus { min_sep: f64, sep_tol: f64 },
    #[error("root finder did not converge after {iters} iterations (best residual {residual:.3e})")]
    RootsNoConverge {
        iters: u32,
        residual: f64,
        /// Best iterate, one (re, im) pair per root.
        best: Vec<(f64, f64)>,
    },
    #[error("tracking step collapsed below minimum step near t = {at}")]
    StepCollapse { at: String },
    #[error("ambiguous fiber matching: {0}")]
    AmbiguousMatching(String),
    #[error("loop construction failed: {0}")]
    LoopConstruction(String),
    #[error("local monodromy did not stabilize after {shrinks} radius halvings")]
    NonStabilized { shrinks: u32 },

    #[error("group enumeration exceeded cap {cap}")]
    CapExceeded { cap: usize },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("quotient is not abelian")]
    NotAbelian,
    #[error("permutation degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("resolvent component failed its eigenvector check (residual {residual:.3e})")]
    EigenCheckFailed { residual: f64 },
    #[error("no rational fit up to total degree {cap}")]
    NoFit { cap: usize },
    #[error("verification failed: max residual {residual:.3e} above tolerance {tol:.3e}")]
    VerificationFailed { residual: f64, tol: f64 },
    #[error("wrong derived-series terminal: {0}")]
    WrongTerminal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad file schema: {0}")]
    Schema(String),
}

impl Error {
    /// CLI exit codes: 0 ok, 2 parse, 3 numeric failure, 4 cap exceeded,
    /// 5 verification failure; 1 for environment errors.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            ParseSyntax { .. } | ParseDivZero { .. } | ParseNonPoly { .. } | ZeroDegreeInY
            | BadInput(_) | Schema(_) => 2,
            DegenerateFamily(_)
            | NearBranchLocus { .. }
            | RootsNoConverge { .. }
            | StepCollapse { .. }
            | AmbiguousMatching(_)
            | LoopConstruction(_)
            | NonStabilized { .. }
            | NotNormal
            | NotAbelian
            | DegreeMismatch(..)
            | EigenCheckFailed { .. }
            | NoFit { .. }
            | WrongTerminal(_) => 3,
            CapExceeded { .. } => 4,
            VerificationFailed { .. } => 5,
            Io(_) | Json(_) => 1,
        }
    }

    /// Short machine-readable kind for the JSON error object.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            ParseSyntax { .. } => "parse_syntax",
            ParseDivZero { .. } => "parse_div_zero",
            ParseNonPoly { .. } => "parse_non_polynomial",
            ZeroDegreeInY => "zero_degree_in_y",
            BadInput(_) => "bad_input",
            DegenerateFamily(_) => "degenerate_family",
            NearBranchLocus { .. } => "near_branch_locus",
            RootsNoConverge { .. } => "roots_no_converge",
            StepCollapse { .. } => "step_collapse",
            AmbiguousMatching(_) => "ambiguous_matching",
            LoopConstruction(_) => "loop_construction",
            NonStabilized { .. } => "non_stabilized",
            CapExceeded { .. } => "cap_exceeded",
            NotNormal => "not_normal",
            NotAbelian => "not_abelian",
            DegreeMismatch(..) => "degree_mismatch",
            EigenCheckFailed { .. } => "eigen_check_failed",
            NoFit { .. } => "no_fit",
            VerificationFailed { .. } => "verification_failed",
            WrongTerminal(_) => "wrong_terminal",
            Io(_) => "io",
            Json(_) => "json",
            Schema(_) => "schema",
        }
    }
}
