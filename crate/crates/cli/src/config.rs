use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chern_core::chern::orders;

/// One family of identities the verifier can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    DescentK2,
    DescentK3,
    DescentK4,
    AscentK2,
    AscentK3,
    Bc1,
    Bc2,
    Bc3,
    Positivity,
    Cocycle,
    Structural,
}

impl CheckKind {
    pub const ALL: [CheckKind; 11] = [
        CheckKind::DescentK2,
        CheckKind::DescentK3,
        CheckKind::DescentK4,
        CheckKind::AscentK2,
        CheckKind::AscentK3,
        CheckKind::Bc1,
        CheckKind::Bc2,
        CheckKind::Bc3,
        CheckKind::Positivity,
        CheckKind::Cocycle,
        CheckKind::Structural,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::DescentK2 => "descent_k2",
            CheckKind::DescentK3 => "descent_k3",
            CheckKind::DescentK4 => "descent_k4",
            CheckKind::AscentK2 => "ascent_k2",
            CheckKind::AscentK3 => "ascent_k3",
            CheckKind::Bc1 => "bc1",
            CheckKind::Bc2 => "bc2",
            CheckKind::Bc3 => "bc3",
            CheckKind::Positivity => "positivity",
            CheckKind::Cocycle => "cocycle",
            CheckKind::Structural => "structural",
        }
    }

    /// The `∂̄∂ bc₃` comparison goes through the deepest expression trees.
    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckKind::Bc3 => 1e-8,
            _ => 1e-9,
        }
    }

    pub fn default_plan(self) -> Plan {
        let plan = |ranks: &[usize], dims: &[usize], order: u32| Plan {
            ranks: ranks.to_vec(),
            dims: dims.to_vec(),
            order,
            max_samples: None,
        };
        match self {
            CheckKind::DescentK2 => plan(&[1, 2, 3], &[3], orders::DESCENT),
            CheckKind::DescentK3 => plan(&[1, 2, 3], &[5], orders::DESCENT),
            // a single n = 7 chain takes seconds; two draws keep the default run short
            CheckKind::DescentK4 => Plan { max_samples: Some(2), ..plan(&[2], &[7], orders::DESCENT) },
            CheckKind::AscentK2 => plan(&[1, 2, 3], &[2], orders::ASCENT_K2),
            CheckKind::AscentK3 => plan(&[2, 3], &[3], orders::ASCENT_K3),
            CheckKind::Bc1 => plan(&[1, 2, 3], &[2, 3], orders::bottchern(1)),
            CheckKind::Bc2 => plan(&[1, 2, 3], &[2], orders::bottchern(2)),
            CheckKind::Bc3 => plan(&[2, 3], &[3], orders::bottchern(3)),
            CheckKind::Positivity => plan(&[2, 3], &[2, 3], orders::FRAME),
            CheckKind::Cocycle => plan(&[2, 3], &[2], orders::COCYCLE),
            CheckKind::Structural => plan(&[1, 2, 3], &[2, 3], orders::DESCENT),
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        CheckKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<&str> = CheckKind::ALL.iter().map(|k| k.name()).collect();
            format!("unknown check `{s}` (expected one of {})", names.join(", "))
        })
    }
}

/// Shapes of the random metrics drawn for one check. Sample `i` uses
/// `ranks[i % ranks.len()]` and `dims[i % dims.len()]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub ranks: Vec<usize>,
    pub dims: Vec<usize>,
    pub order: u32,
    pub max_samples: Option<usize>,
}

impl Plan {
    pub fn shape(&self, sample: usize) -> (usize, usize) {
        (self.ranks[sample % self.ranks.len()], self.dims[sample % self.dims.len()])
    }

    pub fn sample_count(&self, samples: usize) -> usize {
        self.max_samples.map_or(samples, |m| m.min(samples))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckKind>,
    pub tolerances: BTreeMap<CheckKind, f64>,
    pub plans: BTreeMap<CheckKind, Plan>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            samples: 10,
            checks: CheckKind::ALL.to_vec(),
            tolerances: CheckKind::ALL.iter().map(|&k| (k, k.default_tolerance())).collect(),
            plans: CheckKind::ALL.iter().map(|&k| (k, k.default_plan())).collect(),
        }
    }
}

impl VerifyConfig {
    pub fn tolerance(&self, kind: CheckKind) -> f64 {
        self.tolerances.get(&kind).copied().unwrap_or_else(|| kind.default_tolerance())
    }

    pub fn plan(&self, kind: CheckKind) -> Plan {
        self.plans.get(&kind).cloned().unwrap_or_else(|| kind.default_plan())
    }

    /// Applies a `name=value` override.
    pub fn set_tolerance(&mut self, spec: &str) -> Result<(), String> {
        let (name, value) = spec.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{spec}`"))?;
        let kind: CheckKind = name.trim().parse()?;
        let tol: f64 = value.trim().parse().map_err(|_| format!("invalid tolerance `{}`", value.trim()))?;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(format!("tolerance for {kind} must be positive, got {tol}"));
        }
        self.tolerances.insert(kind, tol);
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.samples == 0 {
            return Err("samples must be at least 1".into());
        }
        if self.checks.is_empty() {
            return Err("no checks selected".into());
        }
        for k in &self.checks {
            let plan = self.plan(*k);
            if plan.ranks.is_empty() || plan.dims.is_empty() {
                return Err(format!("plan for {k} has no shapes"));
            }
        }
        Ok(())
    }
}

pub fn parse_check_list(list: &str) -> Result<Vec<CheckKind>, String> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let k: CheckKind = name.parse()?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    Ok(out)
}
