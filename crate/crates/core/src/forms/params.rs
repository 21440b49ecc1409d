use std::fmt;

use crate::error::{Error, Result};

/// The three O3 parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Kinematic viscosity η₀.
    pub eta0: f64,
    /// Relaxation time λ₁.
    pub lambda1: f64,
    /// μ₁ = a λ₁ for slip parameter a ∈ [-1, 1].
    pub mu1: f64,
}

/// Named members of the O3 family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    /// Upper-convected Maxwell, μ₁ = λ₁.
    Ucm,
    /// Corotational Maxwell, μ₁ = 0.
    Corotational,
    /// General slip parameter `a`, μ₁ = a λ₁.
    Slip(f64),
}

impl Model {
    pub fn slip(self) -> f64 {
        match self {
            Model::Ucm => 1.0,
            Model::Corotational => 0.0,
            Model::Slip(a) => a,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ucm" => Ok(Model::Ucm),
            "corotational" | "corot" => Ok(Model::Corotational),
            other => Err(Error::InvalidParameters(format!(
                "unknown model {other:?} (expected ucm or corotational)"
            ))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Ucm => f.write_str("ucm"),
            Model::Corotational => f.write_str("corotational"),
            Model::Slip(a) => write!(f, "slip(a={a})"),
        }
    }
}

impl ModelParams {
    pub fn new(eta0: f64, lambda1: f64, mu1: f64) -> Result<Self> {
        let p = ModelParams { eta0, lambda1, mu1 };
        p.validate()?;
        Ok(p)
    }

    pub fn from_model(eta0: f64, lambda1: f64, model: Model) -> Result<Self> {
        let a = model.slip();
        if !(-1.0..=1.0).contains(&a) {
            return Err(Error::InvalidParameters(format!(
                "slip parameter a = {a} outside [-1, 1]"
            )));
        }
        Self::new(eta0, lambda1, a * lambda1)
    }

    pub fn ucm(eta0: f64, lambda1: f64) -> Result<Self> {
        Self::from_model(eta0, lambda1, Model::Ucm)
    }

    pub fn corotational(eta0: f64, lambda1: f64) -> Result<Self> {
        Self::from_model(eta0, lambda1, Model::Corotational)
    }

    /// Newtonian limit λ₁ = μ₁ = 0.
    pub fn newtonian(eta0: f64) -> Result<Self> {
        Self::new(eta0, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "eta0 = {} must be positive",
                self.eta0
            )));
        }
        if !(self.lambda1 >= 0.0 && self.lambda1.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "lambda1 = {} must be non-negative",
                self.lambda1
            )));
        }
        if !(self.mu1.abs() <= self.lambda1) {
            return Err(Error::InvalidParameters(format!(
                "|mu1| = {} exceeds lambda1 = {}",
                self.mu1.abs(),
                self.lambda1
            )));
        }
        Ok(())
    }
}
