use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub warn: f64,
    pub alert: f64,
}

impl Threshold {
    pub const fn new(warn: f64, alert: f64) -> Self {
        Threshold { warn, alert }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Larger values are worse: warn at `value ≥ warn`, alert at `value ≥ alert`.
    HigherIsWorse,
    /// Smaller values are worse: warn at `value < warn`, alert at `value < alert`.
    LowerIsWorse,
}

/// Warn/alert levels per summary metric. Missing fields in a config file
/// fall back to the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdConfig {
    pub collision_rate_pct: Threshold,
    pub consecutive_repeats_pct: Threshold,
    pub leaked_target_pct: Threshold,
    pub cold_items_pct: Threshold,
    pub cold_users_pct: Threshold,
    pub timegap_ks: Threshold,
    pub position_ks: Threshold,
    pub min_eval_users: Threshold,
    pub min_eval_interactions: Threshold,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            collision_rate_pct: Threshold::new(1.0, 20.0),
            consecutive_repeats_pct: Threshold::new(1.0, 10.0),
            leaked_target_pct: Threshold::new(0.1, 5.0),
            cold_items_pct: Threshold::new(5.0, 25.0),
            cold_users_pct: Threshold::new(10.0, 50.0),
            timegap_ks: Threshold::new(0.1, 0.3),
            position_ks: Threshold::new(0.1, 0.3),
            min_eval_users: Threshold::new(1000.0, 100.0),
            min_eval_interactions: Threshold::new(1000.0, 100.0),
        }
    }
}

impl ThresholdConfig {
    /// (metric name, direction, threshold) in card order.
    pub fn entries(&self) -> [(&'static str, Direction, Threshold); 9] {
        use Direction::*;
        [
            ("collision_rate_pct", HigherIsWorse, self.collision_rate_pct),
            ("consecutive_repeats_pct", HigherIsWorse, self.consecutive_repeats_pct),
            ("leaked_target_pct", HigherIsWorse, self.leaked_target_pct),
            ("cold_items_pct", HigherIsWorse, self.cold_items_pct),
            ("cold_users_pct", HigherIsWorse, self.cold_users_pct),
            ("timegap_ks", HigherIsWorse, self.timegap_ks),
            ("position_ks", HigherIsWorse, self.position_ks),
            ("min_eval_users", LowerIsWorse, self.min_eval_users),
            ("min_eval_interactions", LowerIsWorse, self.min_eval_interactions),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, dir, t) in self.entries() {
            if !t.warn.is_finite() || !t.alert.is_finite() {
                return Err(Error::InvalidThresholds(format!("{name}: levels must be finite")));
            }
            let ordered = match dir {
                Direction::HigherIsWorse => t.warn <= t.alert,
                Direction::LowerIsWorse => t.warn >= t.alert,
            };
            if !ordered {
                return Err(Error::InvalidThresholds(format!(
                    "{name}: warn {} and alert {} are in the wrong order",
                    t.warn, t.alert
                )));
            }
        }
        Ok(())
    }

    /// Accepts either a versioned document or a bare (possibly partial)
    /// threshold object.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
        let config = if value.get("schema_version").is_some() {
            match super::schema::from_json(text.as_bytes())? {
                super::schema::Document::Thresholds(t) => t,
                other => {
                    return Err(Error::MalformedDocument(format!(
                        "expected a thresholds document, found `{}`",
                        other.kind()
                    )))
                }
            }
        } else {
            serde_json::from_value(value).map_err(|e| Error::MalformedDocument(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_ordered() {
        ThresholdConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_override() {
        let t = ThresholdConfig::from_json_str(r#"{"leaked_target_pct": {"warn": 1, "alert": 10}}"#).unwrap();
        assert_eq!(t.leaked_target_pct, Threshold::new(1.0, 10.0));
        assert_eq!(t.collision_rate_pct, ThresholdConfig::default().collision_rate_pct);
    }

    #[test]
    fn misordered_levels_rejected() {
        let err = ThresholdConfig::from_json_str(r#"{"min_eval_users": {"warn": 10, "alert": 100}}"#);
        assert!(matches!(err, Err(Error::InvalidThresholds(_))));
    }
}
