use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Invariant,
    NotInvariant,
    Indeterminate,
}

impl Verdict {
    pub fn from_bool(invariant: bool) -> Self {
        if invariant {
            Verdict::Invariant
        } else {
            Verdict::NotInvariant
        }
    }

    pub fn is_decided(self) -> bool {
        self != Verdict::Indeterminate
    }
}

/// Which computable route produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// Residual of composed basis vectors after projection onto the model space.
    Projection,
    /// Zero-multiplicity comparison for Blaschke products.
    Multiplicity,
    /// Agreement of two routes tied by an equivalence theorem.
    Equivalence,
    /// Membership in an explicit closed-form family of symbols.
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicityCheck {
    pub zero: String,
    pub multiplicity: u32,
    pub composed: u32,
}

/// Verdict with its supporting numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub theta: String,
    pub phi: String,
    #[serde(rename = "N_levels")]
    pub n_levels: Vec<usize>,
    pub residuals: Vec<f64>,
    pub verdict: Verdict,
    pub criterion: Criterion,
    /// Per-basis-direction residuals, one row per truncation level.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub direction_residuals: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub multiplicities: Vec<MultiplicityCheck>,
    /// Boundary sup estimate of the quotient `(θ∘φ)/θ` when it is holomorphic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient_sup: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl InvarianceReport {
    pub fn is_invariant(&self) -> bool {
        self.verdict == Verdict::Invariant
    }

    /// Residual at the finest truncation level, if any.
    pub fn final_residual(&self) -> Option<f64> {
        self.residuals.last().copied()
    }
}
