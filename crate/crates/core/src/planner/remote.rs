//! HTTP text-completion backend.
//!
//! Request: `POST $AXIS_PLANNER_URL` with JSON
//! `{"model", "temperature", "role", "prompt", "max_response_bytes"}` and,
//! when `AXIS_PLANNER_TOKEN` is set, `Authorization: Bearer <token>`.
//! Response: JSON `{"text": "..."}` where the text contains one fenced JSON
//! `PlannerResponse`.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::prompt::extract_fenced;
use super::query::{PlannerQuery, PlannerResponse};
use super::{BackendError, PlannerBackend};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteConfig {
    pub url: String,
    #[serde(default, skip_serializing)]
    pub token: Option<String>,
    pub model: String,
    pub temperature: String,
    pub timeout_secs: u64,
}

impl RemoteConfig {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            token: None,
            model: "default".into(),
            temperature: "0".into(),
            timeout_secs: 60,
        }
    }

    /// Reads `AXIS_PLANNER_URL` (required), `AXIS_PLANNER_TOKEN`,
    /// `AXIS_PLANNER_MODEL` and `AXIS_PLANNER_TEMPERATURE`.
    pub fn from_env() -> Result<Self, String> {
        let url = std::env::var("AXIS_PLANNER_URL").map_err(|_| "AXIS_PLANNER_URL is not set".to_string())?;
        let mut c = Self::new(url);
        c.token = std::env::var("AXIS_PLANNER_TOKEN").ok().filter(|t| !t.is_empty());
        if let Ok(m) = std::env::var("AXIS_PLANNER_MODEL") {
            c.model = m;
        }
        if let Ok(t) = std::env::var("AXIS_PLANNER_TEMPERATURE") {
            c.temperature = t;
        }
        Ok(c)
    }
}

#[derive(Serialize)]
struct RequestBody<'a> {
    model: &'a str,
    temperature: &'a str,
    role: &'a str,
    prompt: &'a str,
    max_response_bytes: usize,
}

#[derive(Deserialize)]
struct ResponseBody {
    text: String,
}

pub struct RemotePlanner {
    config: RemoteConfig,
    agent: ureq::Agent,
}

impl RemotePlanner {
    pub fn new(config: RemoteConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .build()
            .into();
        Self { config, agent }
    }
}

/// Parses the completion text into a response.
pub fn parse_completion(text: &str) -> Result<PlannerResponse, BackendError> {
    let body = extract_fenced(text).ok_or_else(|| BackendError::Protocol("no fenced payload".into()))?;
    serde_json::from_str(body).map_err(|e| BackendError::Protocol(format!("payload does not parse: {e}")))
}

impl PlannerBackend for RemotePlanner {
    fn name(&self) -> &str {
        "remote"
    }

    fn respond(&mut self, query: &PlannerQuery, prompt: &str) -> Result<PlannerResponse, BackendError> {
        let body = RequestBody {
            model: &self.config.model,
            temperature: &self.config.temperature,
            role: query.role.as_str(),
            prompt,
            max_response_bytes: query.budget.max_response_bytes,
        };
        let mut req = self.agent.post(&self.config.url);
        if let Some(t) = &self.config.token {
            req = req.header("Authorization", &format!("Bearer {t}"));
        }
        let mut resp = req
            .send_json(&body)
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let parsed: ResponseBody = resp
            .body_mut()
            .read_json()
            .map_err(|e| BackendError::Protocol(format!("response body: {e}")))?;
        parse_completion(&parsed.text)
    }
}
