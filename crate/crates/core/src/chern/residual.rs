use std::fmt;

use crate::exterior::{Form, MatrixForm};

/// Below this scale a residual is judged absolutely.
pub const SCALE_FLOOR: f64 = 1e-6;
/// Pass threshold for residuals judged absolutely.
pub const ABSOLUTE_TOLERANCE: f64 = 1e-12;

/// Max coefficient difference between two sides of an identity, together
/// with the magnitude it is measured against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub abs: f64,
    pub scale: f64,
}

impl Residual {
    pub fn exact() -> Self {
        Residual { abs: 0.0, scale: 0.0 }
    }

    /// Compares on the common truncation order. `input_scale` is the size of
    /// the forms the two sides were built from.
    pub fn between(lhs: &Form, rhs: &Form, input_scale: f64) -> Self {
        let order = lhs.order().min(rhs.order());
        let (l, r) = (lhs.truncate(order), rhs.truncate(order));
        let abs = (&l - &r).max_abs();
        Residual { abs, scale: l.max_abs().max(r.max_abs()).max(input_scale) }
    }

    pub fn between_matrices(lhs: &MatrixForm, rhs: &MatrixForm, input_scale: f64) -> Self {
        let order = lhs.order().min(rhs.order());
        let l = lhs.map(|f| f.truncate(order));
        let r = rhs.map(|f| f.truncate(order));
        let abs = (&l - &r).max_abs();
        Residual { abs, scale: l.max_abs().max(r.max_abs()).max(input_scale) }
    }

    /// A quantity that should vanish.
    pub fn of_zero(form: &Form, input_scale: f64) -> Self {
        Residual { abs: form.max_abs(), scale: input_scale }
    }

    pub fn is_relative(&self) -> bool {
        self.scale >= SCALE_FLOOR
    }

    /// Relative residual, or the absolute one when the scale is negligible.
    pub fn value(&self) -> f64 {
        if self.is_relative() {
            self.abs / self.scale
        } else {
            self.abs
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        if self.is_relative() {
            self.abs / self.scale <= tol
        } else {
            self.abs <= ABSOLUTE_TOLERANCE
        }
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_relative() {
            write!(f, "{:.3e} (rel, scale {:.3e})", self.value(), self.scale)
        } else {
            write!(f, "{:.3e} (abs)", self.abs)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: Residual,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResidualReport {
    pub checks: Vec<Check>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, residual: Residual) {
        self.checks.push(Check { name: name.into(), residual });
    }

    pub fn extend_prefixed(&mut self, prefix: &str, other: ResidualReport) {
        for c in other.checks {
            self.push(format!("{prefix}{}", c.name), c.residual);
        }
    }

    pub fn get(&self, name: &str) -> Option<&Residual> {
        self.checks.iter().find(|c| c.name == name).map(|c| &c.residual)
    }

    pub fn max_value(&self) -> f64 {
        self.checks.iter().map(|c| c.residual.value()).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.checks.iter().all(|c| c.residual.passes(tol))
    }

    pub fn failures(&self, tol: f64) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.residual.passes(tol)).collect()
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<48} {}", c.name, c.residual)?;
        }
        Ok(())
    }
}
