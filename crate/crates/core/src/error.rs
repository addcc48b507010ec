use thiserror::Error;

use crate::exactalg::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("tangency certificate failed: generator {generator} has component `{component}` = {value} on the slice")]
    Tangency {
        generator: usize,
        component: String,
        value: String,
    },

    #[error("polynomial-module involutivity unknown: bracket of generators {0} and {1} is not in the module")]
    InvolutivityUnknown(usize, usize),

    #[error("frame is dependent modulo the leaf ideal; relation {}", fmt_relation(.0))]
    DependentFrame(Vec<Rational>),

    #[error("flow diverged ({reason}) at t = {time}; last state {state:?}")]
    Divergence {
        reason: String,
        time: f64,
        state: Vec<f64>,
    },

    #[error("lift residual {residual:e} above tolerance; singular values {singular_values:?}")]
    RankDeficient {
        residual: f64,
        singular_values: Vec<f64>,
    },

    #[error("outside the validity box: {0}")]
    ValidityBox(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

fn fmt_relation(c: &[Rational]) -> String {
    let parts: Vec<String> = c.iter().map(|r| r.to_string()).collect();
    format!("({})", parts.join(", "))
}
