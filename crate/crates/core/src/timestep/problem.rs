use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::mesh::Point;

/// Reaction terms `f(u)` with their derivative and a Lipschitz bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Reaction {
    Zero,
    /// `f(u) = lambda u`.
    Linear { lambda: f64 },
    /// `f(u) = u^3 - u`.
    AllenCahn,
    /// `f(u) = 1 / (1 + u^2)`.
    Rational,
    /// `f(u) = sin u`.
    Sine,
    /// `f(u) = u^2`.
    Square,
}

impl Reaction {
    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        match *self {
            Reaction::Zero => 0.0,
            Reaction::Linear { lambda } => lambda * u,
            Reaction::AllenCahn => u * u * u - u,
            Reaction::Rational => 1.0 / (1.0 + u * u),
            Reaction::Sine => u.sin(),
            Reaction::Square => u * u,
        }
    }

    #[inline]
    pub fn df(&self, u: f64) -> f64 {
        match *self {
            Reaction::Zero => 0.0,
            Reaction::Linear { lambda } => lambda,
            Reaction::AllenCahn => 3.0 * u * u - 1.0,
            Reaction::Rational => {
                let d = 1.0 + u * u;
                -2.0 * u / (d * d)
            }
            Reaction::Sine => u.cos(),
            Reaction::Square => 2.0 * u,
        }
    }

    /// Global Lipschitz constant where one exists; `AllenCahn` and `Square`
    /// report the bound on `[-1.1, 1.1]`.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            Reaction::Zero => 0.0,
            Reaction::Linear { lambda } => lambda.abs(),
            Reaction::AllenCahn => 3.0 * 1.1 * 1.1 - 1.0,
            // max |2u / (1 + u^2)^2| at u = 1/sqrt(3)
            Reaction::Rational => 3.0 * 3f64.sqrt() / 8.0,
            Reaction::Sine => 1.0,
            Reaction::Square => 2.2,
        }
    }
}

impl fmt::Display for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reaction::Zero => write!(f, "0"),
            Reaction::Linear { lambda } => write!(f, "{lambda} u"),
            Reaction::AllenCahn => write!(f, "u^3 - u"),
            Reaction::Rational => write!(f, "1/(1+u^2)"),
            Reaction::Sine => write!(f, "sin(u)"),
            Reaction::Square => write!(f, "u^2"),
        }
    }
}

pub type SpaceFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;

/// `u_t - eps Lap u + f(u) = g` with homogeneous Neumann data.
#[derive(Clone)]
pub struct ProblemSpec {
    pub reaction: Reaction,
    pub eps: f64,
    pub source: Option<SpaceTimeFn>,
    pub initial: SpaceFn,
    pub exact: Option<SpaceTimeFn>,
}

impl ProblemSpec {
    pub fn new(reaction: Reaction, eps: f64, initial: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        ProblemSpec {
            reaction,
            eps,
            source: None,
            initial: Arc::new(initial),
            exact: None,
        }
    }

    pub fn with_source(mut self, g: impl Fn(Point, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Some(Arc::new(g));
        self
    }

    pub fn with_exact(mut self, u: impl Fn(Point, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(u));
        self
    }
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("reaction", &self.reaction)
            .field("eps", &self.eps)
            .field("source", &self.source.is_some())
            .field("exact", &self.exact.is_some())
            .finish()
    }
}
