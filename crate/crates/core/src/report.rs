//! Named pass/fail checks with located witnesses.

use alloc::string::String;
use alloc::vec::Vec;

use crate::jet::Jet;
use crate::tensor::{Scalar, Tensor};

/// Where a failing check first went wrong.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Tensor multi-index of the first offending entry.
    pub indices: Vec<usize>,
    /// Lowest offending monomial of that entry, for jet-valued checks.
    pub multidegree: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub witness: Option<Witness>,
}

/// Ordered list of checks; order is the order in which they were run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    checks: Vec<Check>,
}

/// Entry types whose residuals can be located down to a monomial.
pub trait Locate: Scalar {
    fn first_multidegree(&self) -> Option<Vec<u32>>;
}

impl Locate for Jet {
    fn first_multidegree(&self) -> Option<Vec<u32>> {
        self.terms().next().map(|(m, _)| m.exponents().to_vec())
    }
}

impl Locate for crate::Rational {
    fn first_multidegree(&self) -> Option<Vec<u32>> {
        None
    }
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, witness: Option<Witness>) {
        self.checks.push(Check {
            name: name.into(),
            passed: witness.is_none(),
            witness,
        });
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.push(name, None);
    }

    pub fn fail(&mut self, name: impl Into<String>, indices: Vec<usize>) {
        self.push(
            name,
            Some(Witness {
                indices,
                multidegree: None,
            }),
        );
    }

    /// Records whether `residual` vanishes entrywise.
    pub fn zero<S: Locate>(&mut self, name: impl Into<String>, residual: &Tensor<S>) {
        self.push(name, zero_witness(residual));
    }

    /// Records whether two tensors agree entrywise.
    pub fn equal<S: Locate>(&mut self, name: impl Into<String>, a: &Tensor<S>, b: &Tensor<S>) {
        let witness = match a.try_sub(b) {
            Ok(d) => zero_witness(&d),
            Err(_) => Some(Witness {
                indices: Vec::new(),
                multidegree: None,
            }),
        };
        self.push(name, witness);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub(crate) fn zero_witness<S: Locate>(t: &Tensor<S>) -> Option<Witness> {
    t.first_nonzero().map(|idx| Witness {
        multidegree: t.get(&idx).first_multidegree(),
        indices: idx,
    })
}
