//! Per-policy aggregation of run metrics.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::planner::Policy;

use super::run::RunMetrics;

/// Percentage rounded to one decimal; zero when the denominator is zero.
pub fn rate(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        round1(100.0 * num as f64 / den as f64)
    }
}

pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRow {
    pub policy: Policy,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_steps: f64,
    pub mean_sim_time: f64,
    pub mean_cost_units: f64,
    pub total_ui_actions: usize,
    pub total_api_actions: usize,
    pub total_advanced_api_actions: usize,
    /// api / (api + ui), percent.
    pub api_usage_rate: f64,
    /// advanced / api, percent.
    pub advanced_api_usage_rate: f64,
}

impl PolicyRow {
    /// Recomputes both rates from the raw counters.
    pub fn rates_consistent(&self) -> bool {
        self.api_usage_rate == rate(self.total_api_actions, self.total_api_actions + self.total_ui_actions)
            && self.advanced_api_usage_rate == rate(self.total_advanced_api_actions, self.total_api_actions)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub rows: Vec<PolicyRow>,
    pub runs: Vec<RunMetrics>,
}

/// Aggregates per policy. Runs are sorted by (task, policy) first so the
/// result does not depend on input order.
pub fn aggregate(metrics: &[RunMetrics]) -> Result<BenchSummary, String> {
    if metrics.is_empty() {
        return Err("no runs to aggregate".into());
    }
    let mut runs = metrics.to_vec();
    runs.sort_by(|a, b| a.task_id.cmp(&b.task_id).then(a.policy.as_str().cmp(b.policy.as_str())));
    let mut by_policy: BTreeMap<&str, Vec<&RunMetrics>> = BTreeMap::new();
    for r in &runs {
        by_policy.entry(r.policy.as_str()).or_default().push(r);
    }
    let rows = by_policy
        .into_values()
        .map(|rs| {
            let n = rs.len();
            let mean = |f: &dyn Fn(&RunMetrics) -> f64| round3(rs.iter().map(|r| f(r)).sum::<f64>() / n as f64);
            let ui: usize = rs.iter().map(|r| r.ui_actions).sum();
            let api: usize = rs.iter().map(|r| r.api_actions).sum();
            let adv: usize = rs.iter().map(|r| r.advanced_api_actions).sum();
            let ok = rs.iter().filter(|r| r.success).count();
            PolicyRow {
                policy: rs[0].policy,
                runs: n,
                successes: ok,
                success_rate: rate(ok, n),
                mean_steps: mean(&|r| r.steps as f64),
                mean_sim_time: mean(&|r| r.sim_time),
                mean_cost_units: mean(&|r| r.cost_units),
                total_ui_actions: ui,
                total_api_actions: api,
                total_advanced_api_actions: adv,
                api_usage_rate: rate(api, api + ui),
                advanced_api_usage_rate: rate(adv, api),
            }
        })
        .collect();
    Ok(BenchSummary { rows, runs })
}

impl BenchSummary {
    pub fn row(&self, policy: Policy) -> Option<&PolicyRow> {
        self.rows.iter().find(|r| r.policy == policy)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    /// Two tables: effectiveness (time, success, steps, cost) and action
    /// usage.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:>5} {:>10} {:>9} {:>7} {:>7}",
            "policy", "runs", "sim_time", "success", "steps", "cost"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<10} {:>5} {:>9.1}s {:>8.1}% {:>7.2} {:>7.1}",
                r.policy.as_str(),
                r.runs,
                r.mean_sim_time,
                r.success_rate,
                r.mean_steps,
                r.mean_cost_units
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<10} {:>6} {:>6} {:>9} {:>10}",
            "policy", "ui", "api", "api_rate", "adv_rate"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<10} {:>6} {:>6} {:>8.1}% {:>9.1}%",
                r.policy.as_str(),
                r.total_ui_actions,
                r.total_api_actions,
                r.api_usage_rate,
                r.advanced_api_usage_rate
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(policy: Policy, ui: usize, api: usize, adv: usize) -> RunMetrics {
        RunMetrics {
            task_id: "t".into(),
            policy,
            success: true,
            steps: 1,
            ui_actions: ui,
            api_actions: api,
            advanced_api_actions: adv,
            sim_time: 1.0,
            planner_calls: 1,
            cost_units: 1.0,
            final_digest: String::new(),
            log: Vec::new(),
        }
    }

    #[test]
    fn single_api_action_is_full_rate() {
        let s = aggregate(&[run(Policy::ApiFirst, 0, 1, 0)]).unwrap();
        assert_eq!(s.rows[0].api_usage_rate, 100.0);
        assert!(s.rows[0].rates_consistent());
    }

    #[test]
    fn naive_rate_on_reported_counts() {
        // Independent arithmetic: 39 / 87 = 0.44827...
        let s = aggregate(&[run(Policy::ApiFirst, 48, 39, 0)]).unwrap();
        assert_eq!(s.rows[0].api_usage_rate, 44.8);
        let s = aggregate(&[run(Policy::UiOnly, 103, 9, 0)]).unwrap();
        assert_eq!(s.rows[0].api_usage_rate, 8.0);
    }

    #[test]
    fn order_independent() {
        let a = run(Policy::UiOnly, 3, 0, 0);
        let mut b = run(Policy::ApiFirst, 0, 1, 1);
        b.task_id = "u".into();
        assert_eq!(aggregate(&[a.clone(), b.clone()]), aggregate(&[b, a]));
    }

    #[test]
    fn empty_is_an_error() {
        assert!(aggregate(&[]).is_err());
    }
}
