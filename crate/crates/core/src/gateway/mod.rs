//! Chat-completion gateway.
//!
//! Every pipeline talks to models through [`CompletionGateway`]. Two backends
//! ship: [`LiveGateway`] posts OpenAI-compatible chat payloads with retry, and
//! [`ReplayGateway`] answers from a recorded [`Transcript`] so runs are
//! deterministic and offline. [`RecordingGateway`] wraps a live backend and
//! captures a transcript as it goes.

mod live;
mod transcript;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use live::{LiveGateway, RetryPolicy, DEFAULT_API_BASE, ENV_API_BASE, ENV_API_KEY};
pub use transcript::{
    RecordingGateway, ReplayGateway, ScriptedGateway, Transcript, TranscriptEntry,
};

/// Default sampling temperature for every pipeline call.
pub const DEFAULT_TEMPERATURE: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Message {
            role: Role::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Message {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Message {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model: String,
    pub messages: Vec<Message>,
    pub temperature: f64,
    pub max_output_tokens: u32,
}

impl CompletionRequest {
    /// A single user turn at the default temperature.
    pub fn user(model: impl Into<String>, prompt: impl Into<String>) -> Self {
        CompletionRequest {
            model: model.into(),
            messages: vec![Message::user(prompt)],
            temperature: DEFAULT_TEMPERATURE,
            max_output_tokens: 1024,
        }
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.messages.is_empty() {
            return Err(GatewayError::InvalidRequest(
                "messages must not be empty".into(),
            ));
        }
        if let Some(first) = self.messages.iter().find(|m| m.role != Role::System) {
            if first.role != Role::User {
                return Err(GatewayError::InvalidRequest(
                    "first non-system message must be from the user".into(),
                ));
            }
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(GatewayError::InvalidRequest(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if self.max_output_tokens == 0 {
            return Err(GatewayError::InvalidRequest(
                "max_output_tokens must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Stable SHA-256 over the canonical JSON of (model, messages,
    /// temperature). `max_output_tokens` is deliberately left out.
    pub fn fingerprint(&self) -> Fingerprint {
        #[derive(Serialize)]
        struct Canonical<'a> {
            model: &'a str,
            messages: &'a [Message],
            temperature: f64,
        }
        let canonical = Canonical {
            model: &self.model,
            messages: &self.messages,
            temperature: self.temperature,
        };
        let bytes = serde_json::to_vec(&canonical).expect("canonical request serializes");
        Fingerprint(hex::encode(Sha256::digest(&bytes)))
    }
}

/// Lowercase hex SHA-256 of a request's canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fingerprint(pub String);

impl std::fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FinishReason {
    Stop,
    Length,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u32,
    pub completion_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionResponse {
    pub content: String,
    pub finish_reason: FinishReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage: Option<Usage>,
}

impl CompletionResponse {
    pub fn stop(content: impl Into<String>) -> Self {
        CompletionResponse {
            content: content.into(),
            finish_reason: FinishReason::Stop,
            usage: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("no API credential configured (set {ENV_API_KEY})")]
    MissingCredential,
    #[error("transport failed after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("upstream returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("no transcript entry for fingerprint {0}")]
    ReplayMiss(Fingerprint),
    #[error("malformed upstream response: {0}")]
    MalformedUpstreamResponse(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("transcript i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("transcript line {line}: {message}")]
    TranscriptFormat { line: usize, message: String },
}

/// Anything that can answer a chat-completion request.
pub trait CompletionGateway: Send + Sync {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResponse, GatewayError>;
}

impl<G: CompletionGateway + ?Sized> CompletionGateway for &G {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResponse, GatewayError> {
        (**self).complete(req)
    }
}

impl<G: CompletionGateway + ?Sized> CompletionGateway for std::sync::Arc<G> {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResponse, GatewayError> {
        (**self).complete(req)
    }
}

impl<G: CompletionGateway + ?Sized> CompletionGateway for Box<G> {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResponse, GatewayError> {
        (**self).complete(req)
    }
}
