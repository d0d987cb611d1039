use spectral_sk::periods::PeriodError;
use spectral_sk::quad2d::QuadError;
use spectral_sk::riemann::RiemannError;
use spectral_sk::skmetric::SkError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Assertion(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Config(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Assertion(_) => "assertion",
            CliError::NonConvergence(_) => "non-convergence",
            CliError::Config(_) => "config",
        }
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::InvalidTolerance(_) | QuadError::SectionDegree { .. } => {
                CliError::Config(e.to_string())
            }
            QuadError::NonIntegrable(_) | QuadError::NonFinite { .. } | QuadError::BudgetExhausted { .. } => {
                CliError::NonConvergence(e.to_string())
            }
        }
    }
}

impl From<PeriodError> for CliError {
    fn from(e: PeriodError) -> Self {
        match e {
            PeriodError::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            PeriodError::SingularA | PeriodError::InvalidBasis(_) => CliError::Assertion(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<RiemannError> for CliError {
    fn from(e: RiemannError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SkError> for CliError {
    fn from(e: SkError) -> Self {
        match e {
            SkError::Quad(q) => q.into(),
            SkError::Period(p) => p.into(),
            SkError::Riemann(r) => r.into(),
            SkError::NoiseDominated { .. } => CliError::NonConvergence(e.to_string()),
            SkError::NonPositiveMetric(_) => CliError::Assertion(e.to_string()),
            SkError::Step { .. } | SkError::Dimension { .. } | SkError::WrongStratum { .. } | SkError::Input(_) => {
                CliError::Config(e.to_string())
            }
        }
    }
}
