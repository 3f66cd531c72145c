use std::collections::{BTreeMap, VecDeque};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use super::{CompletionGateway, CompletionRequest, CompletionResponse, Fingerprint, GatewayError};

/// One line of a transcript file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub fingerprint: Fingerprint,
    pub response: CompletionResponse,
}

/// Recorded responses keyed by request fingerprint.
///
/// On disk this is JSONL sorted by fingerprint, so saving the same transcript
/// twice produces identical bytes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    entries: BTreeMap<Fingerprint, CompletionResponse>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn record(&mut self, req: &CompletionRequest, resp: CompletionResponse) {
        self.entries.insert(req.fingerprint(), resp);
    }

    pub fn insert(&mut self, fingerprint: Fingerprint, resp: CompletionResponse) {
        self.entries.insert(fingerprint, resp);
    }

    pub fn lookup(&self, req: &CompletionRequest) -> Option<&CompletionResponse> {
        self.entries.get(&req.fingerprint())
    }

    pub fn get(&self, fingerprint: &Fingerprint) -> Option<&CompletionResponse> {
        self.entries.get(fingerprint)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Fingerprint, &CompletionResponse)> {
        self.entries.iter()
    }

    pub fn merge(&mut self, other: Transcript) {
        self.entries.extend(other.entries);
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (fingerprint, response) in &self.entries {
            let entry = TranscriptEntry {
                fingerprint: fingerprint.clone(),
                response: response.clone(),
            };
            serde_json::to_writer(&mut out, &entry)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self, GatewayError> {
        let mut transcript = Transcript::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: TranscriptEntry =
                serde_json::from_str(&line).map_err(|e| GatewayError::TranscriptFormat {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            transcript.entries.insert(entry.fingerprint, entry.response);
        }
        Ok(transcript)
    }

    pub fn save(&self, path: &Path) -> Result<(), GatewayError> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, GatewayError> {
        Self::read_from(BufReader::new(fs::File::open(path)?))
    }
}

/// Answers strictly from a transcript; never touches the network.
#[derive(Debug, Clone, Default)]
pub struct ReplayGateway {
    transcript: Transcript,
}

impl ReplayGateway {
    pub fn new(transcript: Transcript) -> Self {
        ReplayGateway { transcript }
    }

    pub fn load(path: &Path) -> Result<Self, GatewayError> {
        Ok(Self::new(Transcript::load(path)?))
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }
}

impl CompletionGateway for ReplayGateway {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResponse, GatewayError> {
        req.validate()?;
        let fingerprint = req.fingerprint();
        self.transcript
            .get(&fingerprint)
            .cloned()
            .ok_or(GatewayError::ReplayMiss(fingerprint))
    }
}

/// Forwards to an inner gateway and records every successful exchange.
pub struct RecordingGateway<G> {
    inner: G,
    transcript: Mutex<Transcript>,
}

impl<G: CompletionGateway> RecordingGateway<G> {
    pub fn new(inner: G) -> Self {
        RecordingGateway {
            inner,
            transcript: Mutex::new(Transcript::new()),
        }
    }

    pub fn transcript(&self) -> Transcript {
        self.transcript.lock().clone()
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript.into_inner()
    }
}

impl<G: CompletionGateway> CompletionGateway for RecordingGateway<G> {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResponse, GatewayError> {
        let resp = self.inner.complete(req)?;
        self.transcript.lock().record(req, resp.clone());
        Ok(resp)
    }
}

/// Returns queued responses in order regardless of the request. Handy for
/// authoring transcripts: wrap it in a [`RecordingGateway`], run a pipeline,
/// and save what was recorded.
#[derive(Default)]
pub struct ScriptedGateway {
    queue: Mutex<VecDeque<CompletionResponse>>,
    seen: Mutex<Vec<CompletionRequest>>,
}

impl ScriptedGateway {
    pub fn new<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedGateway {
            queue: Mutex::new(
                responses
                    .into_iter()
                    .map(|s| CompletionResponse::stop(s))
                    .collect(),
            ),
            seen: Mutex::new(Vec::new()),
        }
    }

    pub fn requests(&self) -> Vec<CompletionRequest> {
        self.seen.lock().clone()
    }

    pub fn remaining(&self) -> usize {
        self.queue.lock().len()
    }
}

impl CompletionGateway for ScriptedGateway {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResponse, GatewayError> {
        req.validate()?;
        self.seen.lock().push(req.clone());
        self.queue
            .lock()
            .pop_front()
            .ok_or_else(|| GatewayError::ReplayMiss(req.fingerprint()))
    }
}
