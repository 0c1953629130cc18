//! Objectives evaluated by a child process over newline-delimited JSON.
//!
//! The child writes a handshake line `{"protocol":"nawoa-extobj","version":1}`
//! on startup, then answers each request line `{"id":<int>,"x":[<reals>]}` with
//! either `{"id":<int>,"fitness":<real>}` or `{"id":<int>,"error":"<text>"}`.
//! One request is in flight at a time. Coordinates are written with 17
//! significant digits so they parse back to the same `f64`. Fitness is always
//! minimized; evaluators negate scores that should be maximized.

use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::EvalError;
use crate::objective::{Objective, ObjectiveSpec};
use crate::space::SearchSpace;

pub const PROTOCOL_NAME: &str = "nawoa-extobj";
pub const PROTOCOL_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalObjectiveDescriptor {
    pub program: PathBuf,
    #[serde(default)]
    pub args: Vec<String>,
    pub space: SearchSpace,
    /// Per-evaluation (and handshake) timeout.
    #[serde(with = "secs_f64")]
    pub timeout: Duration,
    #[serde(default)]
    pub max_restarts: u32,
}

mod secs_f64 {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}

impl ExternalObjectiveDescriptor {
    pub fn new(program: impl Into<PathBuf>, space: SearchSpace) -> Self {
        Self {
            program: program.into(),
            args: Vec::new(),
            space,
            timeout: Duration::from_secs(30),
            max_restarts: 0,
        }
    }

    pub fn with_args<I, S>(mut self, args: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.args = args.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_max_restarts(mut self, max_restarts: u32) -> Self {
        self.max_restarts = max_restarts;
        self
    }

    fn command_line(&self) -> String {
        std::iter::once(self.program.display().to_string())
            .chain(self.args.iter().cloned())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRequest {
    pub id: u64,
    pub x: Vec<f64>,
}

impl EvalRequest {
    /// The request as one protocol line (without the newline).
    pub fn to_line(&self) -> String {
        let coords: Vec<String> = self.x.iter().map(|v| format_coordinate(*v)).collect();
        format!("{{\"id\":{},\"x\":[{}]}}", self.id, coords.join(","))
    }
}

/// 17 significant digits, which round-trips every finite `f64`.
pub fn format_coordinate(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResponse {
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Deserialize)]
struct Handshake {
    protocol: String,
    version: u64,
}

#[derive(Debug, Error)]
pub enum ExternalError {
    #[error("could not start `{command}`")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },

    #[error("no handshake from `{command}` within {timeout:?}")]
    HandshakeTimeout { command: String, timeout: Duration },

    #[error("bad handshake from `{command}`: {detail}")]
    Handshake { command: String, detail: String },

    #[error("evaluator speaks protocol version {found}, expected {expected}")]
    VersionMismatch { expected: u64, found: u64 },

    #[error("request {id} timed out after {timeout:?}")]
    Timeout { id: u64, timeout: Duration },

    #[error("evaluator exited while handling request {id} (restarts used: {restarts})")]
    SessionDead { id: u64, restarts: u32 },

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("evaluator reported an error for request {id}: {message}")]
    Remote { id: u64, message: String },

    #[error("request {id}: point has {actual} coordinates, the tuning box has {expected}")]
    Dimension {
        id: u64,
        expected: usize,
        actual: usize,
    },

    #[error("evaluator I/O")]
    Io(#[from] std::io::Error),
}

/// Why one round trip did not produce a fitness.
enum RoundTrip {
    Exited,
    Failed(ExternalError),
}

struct Process {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

impl Process {
    fn spawn(desc: &ExternalObjectiveDescriptor) -> Result<Self, ExternalError> {
        let command = desc.command_line();
        let mut child = Command::new(&desc.program)
            .args(&desc.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| ExternalError::Spawn {
                command: command.clone(),
                source,
            })?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, lines) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        let mut process = Self {
            child,
            stdin,
            lines,
        };
        if let Err(e) = process.handshake(&command, desc.timeout) {
            process.kill();
            return Err(e);
        }
        Ok(process)
    }

    fn handshake(&mut self, command: &str, timeout: Duration) -> Result<(), ExternalError> {
        let bad = |detail: String| ExternalError::Handshake {
            command: command.to_string(),
            detail,
        };
        let line = match self.lines.recv_timeout(timeout) {
            Ok(line) => line?,
            Err(RecvTimeoutError::Timeout) => {
                return Err(ExternalError::HandshakeTimeout {
                    command: command.to_string(),
                    timeout,
                })
            }
            Err(RecvTimeoutError::Disconnected) => {
                return Err(bad("evaluator exited before the handshake".into()))
            }
        };
        let hello: Handshake =
            serde_json::from_str(line.trim()).map_err(|e| bad(format!("{e} in {line:?}")))?;
        if hello.protocol != PROTOCOL_NAME {
            return Err(bad(format!("unknown protocol `{}`", hello.protocol)));
        }
        if hello.version != PROTOCOL_VERSION {
            return Err(ExternalError::VersionMismatch {
                expected: PROTOCOL_VERSION,
                found: hello.version,
            });
        }
        Ok(())
    }

    fn round_trip(&mut self, request: &EvalRequest, timeout: Duration) -> Result<f64, RoundTrip> {
        let line = request.to_line() + "\n";
        if self
            .stdin
            .write_all(line.as_bytes())
            .and_then(|_| self.stdin.flush())
            .is_err()
        {
            return Err(RoundTrip::Exited);
        }
        let deadline = Instant::now() + timeout;
        loop {
            let remaining = deadline.saturating_duration_since(Instant::now());
            let line = match self.lines.recv_timeout(remaining) {
                Ok(Ok(line)) => line,
                Ok(Err(e)) => return Err(RoundTrip::Failed(e.into())),
                Err(RecvTimeoutError::Disconnected) => return Err(RoundTrip::Exited),
                Err(RecvTimeoutError::Timeout) => {
                    return Err(RoundTrip::Failed(ExternalError::Timeout {
                        id: request.id,
                        timeout,
                    }))
                }
            };
            if line.trim().is_empty() {
                continue;
            }
            let response: EvalResponse = serde_json::from_str(line.trim()).map_err(|e| {
                RoundTrip::Failed(ExternalError::Protocol(format!(
                    "unparseable response {line:?}: {e}"
                )))
            })?;
            if response.id < request.id {
                // late answer to a request that already timed out
                continue;
            }
            if response.id > request.id {
                return Err(RoundTrip::Failed(ExternalError::Protocol(format!(
                    "response id {} while request {} is pending",
                    response.id, request.id
                ))));
            }
            return match (response.fitness, response.error) {
                (_, Some(message)) => Err(RoundTrip::Failed(ExternalError::Remote {
                    id: request.id,
                    message,
                })),
                (Some(fitness), None) => Ok(fitness),
                (None, None) => Err(RoundTrip::Failed(ExternalError::Protocol(format!(
                    "response {} has neither fitness nor error",
                    request.id
                )))),
            };
        }
    }

    fn kill(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// A live evaluator child process.
///
/// Request ids increase by one per evaluation. If the child dies, it is
/// respawned (up to `max_restarts` times) and the pending request is replayed
/// once. A timed-out child is killed; the next evaluation respawns it if the
/// restart budget allows.
pub struct ExternalSession {
    desc: ExternalObjectiveDescriptor,
    process: Option<Process>,
    next_id: u64,
    restarts: u32,
}

/// Starts the evaluator and completes the handshake.
pub fn spawn_evaluator(
    desc: ExternalObjectiveDescriptor,
) -> Result<ExternalSession, ExternalError> {
    if desc.timeout.is_zero() {
        return Err(ExternalError::Protocol("timeout must be positive".into()));
    }
    let process = Process::spawn(&desc)?;
    Ok(ExternalSession {
        desc,
        process: Some(process),
        next_id: 1,
        restarts: 0,
    })
}

impl ExternalSession {
    pub fn descriptor(&self) -> &ExternalObjectiveDescriptor {
        &self.desc
    }

    pub fn restarts(&self) -> u32 {
        self.restarts
    }

    /// Id the next request will carry.
    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    pub fn is_alive(&self) -> bool {
        self.process.is_some()
    }

    fn respawn(&mut self, pending: u64) -> Result<(), ExternalError> {
        if let Some(mut old) = self.process.take() {
            old.kill();
        }
        if self.restarts >= self.desc.max_restarts {
            return Err(ExternalError::SessionDead {
                id: pending,
                restarts: self.restarts,
            });
        }
        self.restarts += 1;
        self.process = Some(Process::spawn(&self.desc)?);
        Ok(())
    }

    /// Sends one request and waits for its answer.
    pub fn evaluate_external(&mut self, x: &[f64]) -> Result<f64, ExternalError> {
        let id = self.next_id;
        self.next_id += 1;
        if x.len() != self.desc.space.dim() {
            return Err(ExternalError::Dimension {
                id,
                expected: self.desc.space.dim(),
                actual: x.len(),
            });
        }
        let request = EvalRequest { id, x: x.to_vec() };
        if self.process.is_none() {
            self.respawn(id)?;
        }
        let timeout = self.desc.timeout;
        let first = self
            .process
            .as_mut()
            .expect("process is live")
            .round_trip(&request, timeout);
        match first {
            Ok(f) => Ok(f),
            Err(RoundTrip::Failed(e)) => {
                if matches!(e, ExternalError::Timeout { .. }) {
                    if let Some(mut p) = self.process.take() {
                        p.kill();
                    }
                }
                Err(e)
            }
            Err(RoundTrip::Exited) => {
                self.respawn(id)?;
                match self
                    .process
                    .as_mut()
                    .expect("respawned")
                    .round_trip(&request, timeout)
                {
                    Ok(f) => Ok(f),
                    Err(RoundTrip::Failed(e)) => Err(e),
                    Err(RoundTrip::Exited) => {
                        self.process = None;
                        Err(ExternalError::SessionDead {
                            id,
                            restarts: self.restarts,
                        })
                    }
                }
            }
        }
    }

    /// Wraps the session as a minimization objective over its tuning box.
    pub fn into_spec(self) -> ObjectiveSpec<Self> {
        let space = self.desc.space.clone();
        let label = format!("external:{}", self.desc.program.display());
        ObjectiveSpec::new(space, self).with_label(label)
    }
}

impl Objective for ExternalSession {
    fn evaluate(&mut self, x: &[f64]) -> Result<f64, EvalError> {
        Ok(self.evaluate_external(x)?)
    }
}

impl Drop for ExternalSession {
    fn drop(&mut self) {
        if let Some(mut p) = self.process.take() {
            // closing stdin lets well-behaved evaluators exit on their own
            drop(p.stdin);
            let _ = p.child.kill();
            let _ = p.child.wait();
        }
    }
}
