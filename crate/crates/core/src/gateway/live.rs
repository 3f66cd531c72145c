use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{
    CompletionGateway, CompletionRequest, CompletionResponse, FinishReason, GatewayError, Message,
    Usage,
};

pub const ENV_API_BASE: &str = "CWGEN_API_BASE";
pub const ENV_API_KEY: &str = "CWGEN_API_KEY";
pub const DEFAULT_API_BASE: &str = "https://api.openai.com/v1";

/// Exponential backoff: `base * 2^(retry-1)`, capped at `max_delay`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(20),
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (1-based).
    pub fn delay_for(&self, retry: u32) -> Duration {
        let shift = retry.saturating_sub(1).min(31);
        self.base_delay
            .saturating_mul(1u32 << shift)
            .min(self.max_delay)
    }
}

/// Posts OpenAI-compatible `/chat/completions` requests.
pub struct LiveGateway {
    base_url: String,
    api_key: Option<String>,
    retry: RetryPolicy,
    client: reqwest::blocking::Client,
    attempts: AtomicU64,
}

#[derive(Serialize)]
struct ChatPayload<'a> {
    model: &'a str,
    messages: &'a [Message],
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct ChatReply {
    choices: Vec<ChatChoice>,
    #[serde(default)]
    usage: Option<ChatUsage>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
    #[serde(default)]
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct ChatMessage {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Deserialize)]
struct ChatUsage {
    prompt_tokens: u32,
    completion_tokens: u32,
}

enum Attempt {
    Done(CompletionResponse),
    Retry(String),
    Fatal(GatewayError),
}

impl LiveGateway {
    pub fn new(base_url: impl Into<String>, api_key: Option<String>) -> Self {
        LiveGateway {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key,
            retry: RetryPolicy::default(),
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(120))
                .build()
                .expect("http client builds"),
            attempts: AtomicU64::new(0),
        }
    }

    /// Reads `CWGEN_API_BASE` and `CWGEN_API_KEY`.
    pub fn from_env() -> Self {
        let base = std::env::var(ENV_API_BASE).unwrap_or_else(|_| DEFAULT_API_BASE.to_string());
        let key = std::env::var(ENV_API_KEY).ok().filter(|k| !k.is_empty());
        Self::new(base, key)
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn has_credential(&self) -> bool {
        self.api_key.is_some()
    }

    /// Total HTTP attempts made by this gateway, retries included.
    pub fn attempts(&self) -> u64 {
        self.attempts.load(Ordering::Relaxed)
    }

    fn attempt(&self, key: &str, req: &CompletionRequest) -> Attempt {
        self.attempts.fetch_add(1, Ordering::Relaxed);
        let payload = ChatPayload {
            model: &req.model,
            messages: &req.messages,
            temperature: req.temperature,
            max_tokens: req.max_output_tokens,
        };
        let sent = self
            .client
            .post(format!("{}/chat/completions", self.base_url))
            .bearer_auth(key)
            .json(&payload)
            .send();
        let resp = match sent {
            Ok(resp) => resp,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        let status = resp.status();
        let body = match resp.text() {
            Ok(body) => body,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        if status.as_u16() == 429 || status.is_server_error() {
            return Attempt::Retry(format!("HTTP {}", status.as_u16()));
        }
        if !status.is_success() {
            return Attempt::Fatal(GatewayError::Http {
                status: status.as_u16(),
                body,
            });
        }
        match parse_reply(&body) {
            Ok(r) => Attempt::Done(r),
            Err(e) => Attempt::Fatal(e),
        }
    }
}

fn parse_reply(body: &str) -> Result<CompletionResponse, GatewayError> {
    let reply: ChatReply = serde_json::from_str(body)
        .map_err(|e| GatewayError::MalformedUpstreamResponse(e.to_string()))?;
    let choice = reply
        .choices
        .into_iter()
        .next()
        .ok_or_else(|| GatewayError::MalformedUpstreamResponse("no choices".into()))?;
    let content = choice
        .message
        .content
        .ok_or_else(|| GatewayError::MalformedUpstreamResponse("choice has no content".into()))?;
    let finish_reason = match choice.finish_reason.as_deref() {
        Some("length") => FinishReason::Length,
        _ => FinishReason::Stop,
    };
    Ok(CompletionResponse {
        content,
        finish_reason,
        usage: reply.usage.map(|u| Usage {
            prompt_tokens: u.prompt_tokens,
            completion_tokens: u.completion_tokens,
        }),
    })
}

impl CompletionGateway for LiveGateway {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResponse, GatewayError> {
        req.validate()?;
        let key = self
            .api_key
            .as_deref()
            .ok_or(GatewayError::MissingCredential)?;
        let mut retries = 0;
        loop {
            match self.attempt(key, req) {
                Attempt::Done(resp) => return Ok(resp),
                Attempt::Fatal(e) => return Err(e),
                Attempt::Retry(message) => {
                    if retries >= self.retry.max_retries {
                        return Err(GatewayError::Transport {
                            attempts: retries + 1,
                            message,
                        });
                    }
                    retries += 1;
                    std::thread::sleep(self.retry.delay_for(retries));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_doubles_then_caps() {
        let p = RetryPolicy {
            max_retries: 10,
            base_delay: Duration::from_millis(100),
            max_delay: Duration::from_millis(700),
        };
        let delays: Vec<u128> = (1..=6).map(|r| p.delay_for(r).as_millis()).collect();
        assert_eq!(delays, vec![100, 200, 400, 700, 700, 700]);
    }

    #[test]
    fn missing_credential() {
        let gw = LiveGateway::new("http://127.0.0.1:9", None);
        let err = gw.complete(&CompletionRequest::user("m", "x")).unwrap_err();
        assert!(matches!(err, GatewayError::MissingCredential));
        assert_eq!(gw.attempts(), 0);
    }

    #[test]
    fn parses_first_choice() {
        let body = r#"{"choices":[{"message":{"role":"assistant","content":"hi"},"finish_reason":"length"},{"message":{"content":"no"}}],"usage":{"prompt_tokens":4,"completion_tokens":1,"total_tokens":5}}"#;
        let r = parse_reply(body).unwrap();
        assert_eq!(r.content, "hi");
        assert_eq!(r.finish_reason, FinishReason::Length);
        assert_eq!(
            r.usage,
            Some(Usage {
                prompt_tokens: 4,
                completion_tokens: 1
            })
        );
        assert!(matches!(
            parse_reply("{\"choices\":[]}"),
            Err(GatewayError::MalformedUpstreamResponse(_))
        ));
    }
}
