use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("radius {radius} exceeds the represented horizon {horizon}")]
    HorizonExceeded { radius: f64, horizon: f64 },
    #[error("generation {generation} out of range (horizon {horizon})")]
    GenerationOutOfRange { generation: usize, horizon: usize },
    #[error("invalid point address: {0}")]
    InvalidAddress(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("truncation insufficient: need cut radius >= {needed}, have {cut}")]
    TruncationInsufficient { needed: f64, cut: f64 },
    #[error("evaluation radius {radius} outside [{lo}, {hi}]")]
    OutOfDomain { radius: f64, lo: f64, hi: f64 },
    #[error("time must satisfy 0 < t <= {t_max}, got {t}")]
    InvalidTime { t: f64, t_max: f64 },
    #[error("requested {requested} modes but the grid only has {available} unknowns")]
    TooManyModes { requested: usize, available: usize },
    #[error("full-graph discretization needs {nodes} nodes, budget is {budget}")]
    NodeBudget { nodes: usize, budget: usize },
    #[error("ground state became nonpositive at r = {0}")]
    NonPositiveGroundState(f64),
    #[error("eigen solver failed to converge: {0}")]
    NoConvergence(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}
