//! Residual bookkeeping for identity checks.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Both sides of an identity at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
}

impl Comparison {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Comparison { lhs, rhs }
    }

    pub fn residual(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn abs(&self) -> f64 {
        self.residual().abs()
    }

    /// `|lhs - rhs| / max(|lhs|, |rhs|, 1)`.
    pub fn rel(&self) -> f64 {
        let r = self.abs();
        if r.is_nan() {
            return f64::INFINITY;
        }
        r / self.lhs.abs().max(self.rhs.abs()).max(1.0)
    }
}

/// Aggregate of one identity over many points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub family: String,
    pub params: serde_json::Value,
    pub points: usize,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub worst_point: Vec<f64>,
    /// Exact residual in rational mode, as a fraction string like `-3/4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_residual: Option<String>,
    /// Measured quantities that are reported but not asserted.
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub observations: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
}

impl IdentityReport {
    pub fn new(identity: &str, family: &str, params: serde_json::Value) -> Self {
        IdentityReport {
            identity: identity.to_string(),
            family: family.to_string(),
            params,
            points: 0,
            max_abs_residual: 0.0,
            max_rel_residual: 0.0,
            worst_point: Vec::new(),
            exact_residual: None,
            observations: serde_json::Map::new(),
            tolerance: None,
            passed: None,
        }
    }

    pub fn record(&mut self, point: &[f64], c: Comparison) {
        self.points += 1;
        let (a, r) = (c.abs(), c.rel());
        let a = if a.is_nan() { f64::INFINITY } else { a };
        if r > self.max_rel_residual || self.worst_point.is_empty() {
            self.max_rel_residual = self.max_rel_residual.max(r);
            self.worst_point = point.to_vec();
        }
        self.max_abs_residual = self.max_abs_residual.max(a);
    }

    /// Record an exact residual. The first nonzero residual is kept.
    pub fn record_exact<S: Scalar>(&mut self, point: &[S], residual: &S) {
        let f = residual.to_f64().abs();
        let c = Comparison::new(f, 0.0);
        self.record(&point.iter().map(Scalar::to_f64).collect::<Vec<_>>(), c);
        let keep = match &self.exact_residual {
            None => true,
            Some(s) => s == "0",
        };
        if keep {
            self.exact_residual = Some(format_exact(residual));
        }
    }

    pub fn observe(&mut self, key: &str, value: serde_json::Value) {
        self.observations.insert(key.to_string(), value);
    }

    pub fn merge(&mut self, other: IdentityReport) {
        if other.points == 0 {
            return;
        }
        if other.max_rel_residual > self.max_rel_residual || self.worst_point.is_empty() {
            self.worst_point = other.worst_point;
        }
        self.points += other.points;
        self.max_abs_residual = self.max_abs_residual.max(other.max_abs_residual);
        self.max_rel_residual = self.max_rel_residual.max(other.max_rel_residual);
        match (&self.exact_residual, other.exact_residual) {
            (None, e) => self.exact_residual = e,
            (Some(s), Some(e)) if s == "0" => self.exact_residual = Some(e),
            _ => {}
        }
        self.observations.extend(other.observations);
    }

    /// Set `tolerance` and `passed`. Exact reports pass only on residual 0.
    pub fn judge(&mut self, tolerance: f64) -> bool {
        let ok = match &self.exact_residual {
            Some(s) => s == "0",
            None => self.max_rel_residual <= tolerance,
        } && self.points > 0;
        self.tolerance = Some(tolerance);
        self.passed = Some(ok);
        ok
    }
}

fn format_exact<S: Scalar>(v: &S) -> String {
    if S::EXACT {
        v.to_string()
    } else {
        format!("{:e}", v.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn relative_residual_floor() {
        let c = Comparison::new(1e-3, 1e-3 + 1e-12);
        assert!((c.rel() - 1e-12).abs() < 1e-20);
        let c = Comparison::new(1e6, 1e6 + 1.0);
        assert!((c.rel() - 1e-6).abs() < 1e-12);
        assert_eq!(Comparison::new(f64::NAN, 0.0).rel(), f64::INFINITY);
    }

    #[test]
    fn merge_and_judge() {
        let mut a = IdentityReport::new("x", "A", serde_json::json!({}));
        a.record(&[1.0], Comparison::new(1.0, 1.0 + 1e-10));
        let mut b = IdentityReport::new("x", "A", serde_json::json!({}));
        b.record(&[2.0], Comparison::new(1.0, 1.0 + 1e-9));
        a.merge(b);
        assert_eq!(a.points, 2);
        assert_eq!(a.worst_point, vec![2.0]);
        assert!(a.judge(1e-8));
        assert!(!a.clone().judge(1e-10));
    }

    #[test]
    fn exact_residuals() {
        let mut r = IdentityReport::new("lemma2", "B", serde_json::json!({}));
        r.record_exact(&[int(1), int(2)], &int(0));
        assert_eq!(r.exact_residual.as_deref(), Some("0"));
        assert!(r.judge(0.0));
        r.record_exact(&[int(1), int(3)], &rat(1, 3));
        assert!(!r.judge(1.0));
        assert_eq!(r.points, 2);
    }
}
