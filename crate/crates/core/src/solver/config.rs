use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amfit::InnerPolicy;
use crate::error::{Error, Result};
use crate::linalg::DEFAULT_RANK_TOL;

/// Rule for the extrapolation weight `a_k` in `Y_k = X_k + a_k (X_k - X_{k-1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InertialRule {
    #[default]
    Zero,
    Constant { a: f64 },
    /// `a_k = (k - 1) / (k + d)`
    FistaLike { d: f64 },
    /// `a_k = min{a, c / (k^(1+delta) ||X_k - X_{k-1}||^2)}`
    Online { a: f64, c: f64, delta: f64 },
}

impl InertialRule {
    /// `a_k` for `k >= 1`. `step_norm_prev` is `||X_k - X_{k-1}||`; the online
    /// rule returns its cap `a` when that norm is zero.
    pub fn value(&self, k: usize, step_norm_prev: f64) -> f64 {
        let k = k.max(1) as f64;
        match *self {
            InertialRule::Zero => 0.0,
            InertialRule::Constant { a } => a,
            InertialRule::FistaLike { d } => (k - 1.0) / (k + d),
            InertialRule::Online { a, c, delta } => {
                let denom = k.powf(1.0 + delta) * step_norm_prev * step_norm_prev;
                if denom == 0.0 {
                    a
                } else {
                    a.min(c / denom)
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            InertialRule::Zero => true,
            InertialRule::Constant { a } => (0.0..1.0).contains(&a),
            InertialRule::FistaLike { d } => d > 2.0,
            InertialRule::Online { a, c, delta } => (0.0..=1.0).contains(&a) && c > 0.0 && delta > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid inertial rule {self:?}")))
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            InertialRule::Zero => "a_k = 0".to_string(),
            InertialRule::Constant { a } => format!("a_k = {a}"),
            InertialRule::FistaLike { d } => format!("a_k = (k-1)/(k+{d})"),
            InertialRule::Online { a, c, delta } => {
                format!("a_k = min{{{a}, {c}/(k^(1+{delta}) ||X_k - X_(k-1)||^2)}}")
            }
        }
    }
}

pub fn inertial_value(rule: &InertialRule, k: usize, step_norm_prev: f64) -> f64 {
    rule.value(k, step_norm_prev)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Continuation {
    pub enabled: bool,
    /// Iterations before the first rank update.
    pub burn_in: usize,
    /// Iterations between rank updates.
    pub cadence: usize,
    /// Relative singular-value tolerance for `rank(U)` and for the traced
    /// iterate rank.
    pub rank_tol: f64,
}

impl Default for Continuation {
    fn default() -> Self {
        Continuation { enabled: false, burn_in: 20, cadence: 10, rank_tol: DEFAULT_RANK_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopRule {
    /// Threshold on `||X_{k+1} - X_k||`.
    pub step_tol: f64,
    /// Divide the step by `max(||X_k||, 1)` before comparing.
    pub relative: bool,
    pub max_iter: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { step_tol: 1e-10, relative: false, max_iter: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TraceLevel {
    /// Rank and step norm only.
    #[default]
    Light,
    /// Also the objective, which costs one SVD per iteration.
    Full,
}

impl FromStr for TraceLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "light" => Ok(TraceLevel::Light),
            "full" => Ok(TraceLevel::Full),
            other => Err(Error::InvalidConfig(format!("unknown trace level {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Step size; `None` means `1/L`.
    pub gamma: Option<f64>,
    pub rule: InertialRule,
    pub inner: InnerPolicy,
    /// Initial factor rank `r`.
    pub rank: usize,
    pub continuation: Continuation,
    pub stop: StopRule,
    pub trace: TraceLevel,
    /// Also record `rank(svt(Z_k, tau*gamma))` each iteration (costs an SVD).
    pub exact_prox_probe: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gamma: None,
            rule: InertialRule::Zero,
            inner: InnerPolicy::default(),
            rank: 10,
            continuation: Continuation::default(),
            stop: StopRule::default(),
            trace: TraceLevel::Light,
            exact_prox_probe: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(gamma) = self.gamma {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(Error::InvalidConfig(format!("step size must be positive, got {gamma}")));
            }
        }
        self.rule.validate()?;
        self.inner.validate()?;
        if self.rank == 0 {
            return Err(Error::InvalidConfig("factor rank must be at least 1".into()));
        }
        if self.continuation.cadence == 0 {
            return Err(Error::InvalidConfig("continuation cadence must be at least 1".into()));
        }
        if !(self.continuation.rank_tol > 0.0 && self.continuation.rank_tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rank tolerance must lie in (0,1), got {}",
                self.continuation.rank_tol
            )));
        }
        if !(self.stop.step_tol >= 0.0) {
            return Err(Error::InvalidConfig("step tolerance must be nonnegative".into()));
        }
        if self.stop.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "prograamme")]
    Prograamme,
    #[serde(rename = "prograamme-rc")]
    PrograammeRc,
    #[serde(rename = "pgd")]
    Pgd,
    #[serde(rename = "fista")]
    Fista,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::Prograamme, Algorithm::PrograammeRc, Algorithm::Pgd, Algorithm::Fista];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Prograamme => "prograamme",
            Algorithm::PrograammeRc => "prograamme-rc",
            Algorithm::Pgd => "pgd",
            Algorithm::Fista => "fista",
        }
    }

    pub fn uses_svd(&self) -> bool {
        matches!(self, Algorithm::Pgd | Algorithm::Fista)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inertial_examples() {
        let fista = InertialRule::FistaLike { d: 20.0 };
        assert_eq!(inertial_value(&fista, 1, 3.0), 0.0);
        assert_eq!(inertial_value(&fista, 21, 3.0), 20.0 / 41.0);
        assert_eq!(inertial_value(&InertialRule::Zero, 5, 1.0), 0.0);
        assert_eq!(inertial_value(&InertialRule::Constant { a: 0.25 }, 5, 1.0), 0.25);

        let online = InertialRule::Online { a: 0.5, c: 1.0, delta: 1.0 };
        assert!(inertial_value(&online, 3, 1e3) < 0.5);
        assert_eq!(inertial_value(&online, 3, 1e3), 1.0 / (9.0 * 1e6));
        assert_eq!(inertial_value(&online, 3, 1e-6), 0.5);
        assert_eq!(inertial_value(&online, 3, 0.0), 0.5);
    }

    #[test]
    fn rule_validation() {
        assert!(InertialRule::Constant { a: 1.0 }.validate().is_err());
        assert!(InertialRule::Constant { a: 0.75 }.validate().is_ok());
        assert!(InertialRule::FistaLike { d: 2.0 }.validate().is_err());
        assert!(InertialRule::Online { a: 0.5, c: 0.0, delta: 1.0 }.validate().is_err());
    }

    #[test]
    fn describes_fista_rule() {
        assert_eq!(InertialRule::FistaLike { d: 20.0 }.describe(), "a_k = (k-1)/(k+20)");
    }

    #[test]
    fn config_json_round_trip_with_defaults() {
        let cfg: SolverConfig = serde_json::from_str(
            r#"{"rank": 50, "rule": {"kind": "constant", "a": 0.5},
                "inner": {"kind": "tolerance", "eps": 1e-4, "max_inner": 20},
                "continuation": {"enabled": true}}"#,
        )
        .unwrap();
        assert_eq!(cfg.rank, 50);
        assert_eq!(cfg.continuation.cadence, 10);
        assert_eq!(cfg.continuation.burn_in, 20);
        assert_eq!(cfg.stop.step_tol, 1e-10);
        assert_eq!(cfg.inner, InnerPolicy::EPSILON_DEFAULT);
        let back: SolverConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{a}\""));
        }
        assert!("svt".parse::<Algorithm>().is_err());
    }
}
