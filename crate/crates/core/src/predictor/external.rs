use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;
use std::time::Duration;

use crate::mask::BinaryMask;

use super::wire::{decode_response, WireRequest};
use super::{check_request, PredictError, PredictRequest, Predictor};

struct Pipe {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

/// Long-running child process speaking one JSON request per line on stdin
/// and one JSON response per line on stdout. Calls are serialized.
pub struct SubprocessPredictor {
    command: String,
    pipe: Mutex<Option<Pipe>>,
}

impl SubprocessPredictor {
    /// `command` is run through `sh -c`; the process is started lazily.
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            pipe: Mutex::new(None),
        }
    }

    fn spawn(&self) -> Result<Pipe, PredictError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| PredictError::Transport(format!("spawn {:?}: {e}", self.command)))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Pipe {
            child,
            stdin,
            stdout,
        })
    }
}

impl Predictor for SubprocessPredictor {
    fn id(&self) -> String {
        format!("external:{}", self.command)
    }

    fn predict(&self, req: &PredictRequest<'_>) -> Result<BinaryMask, PredictError> {
        check_request(req)?;
        let line = serde_json::to_string(&WireRequest::from_request(req)?)
            .map_err(|e| PredictError::InvalidRequest(e.to_string()))?;
        let mut guard = self.pipe.lock().unwrap_or_else(|p| p.into_inner());
        if guard.is_none() {
            *guard = Some(self.spawn()?);
        }
        let pipe = guard.as_mut().expect("spawned");
        let io = (|| {
            pipe.stdin.write_all(line.as_bytes())?;
            pipe.stdin.write_all(b"\n")?;
            pipe.stdin.flush()?;
            let mut resp = String::new();
            let n = pipe.stdout.read_line(&mut resp)?;
            Ok::<_, std::io::Error>((n, resp))
        })();
        let resp = match io {
            Ok((0, _)) => {
                *guard = None;
                return Err(PredictError::Transport("predictor closed its output".into()));
            }
            Ok((_, resp)) => resp,
            Err(e) => {
                // Restart on the next call.
                *guard = None;
                return Err(PredictError::Transport(e.to_string()));
            }
        };
        decode_response(&resp, req.image.width(), req.image.height())
    }
}

impl Drop for SubprocessPredictor {
    fn drop(&mut self) {
        if let Ok(mut g) = self.pipe.lock() {
            if let Some(mut p) = g.take() {
                let _ = p.child.kill();
                let _ = p.child.wait();
            }
        }
    }
}

/// Remote predictor reached by `POST {base}/predict` with the wire request as
/// the JSON body.
pub struct HttpPredictor {
    url: String,
    agent: ureq::Agent,
}

impl HttpPredictor {
    pub fn new(base: &str) -> Self {
        let base = base.trim_end_matches('/');
        let url = if base.ends_with("/predict") {
            base.to_string()
        } else {
            format!("{base}/predict")
        };
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .into();
        Self { url, agent }
    }

    pub fn url(&self) -> &str {
        &self.url
    }
}

impl Predictor for HttpPredictor {
    fn id(&self) -> String {
        format!("http:{}", self.url)
    }

    fn predict(&self, req: &PredictRequest<'_>) -> Result<BinaryMask, PredictError> {
        check_request(req)?;
        let body = serde_json::to_string(&WireRequest::from_request(req)?)
            .map_err(|e| PredictError::InvalidRequest(e.to_string()))?;
        let mut resp = self
            .agent
            .post(&self.url)
            .content_type("application/json")
            .send(&body)
            .map_err(|e| PredictError::Transport(e.to_string()))?;
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| PredictError::Transport(e.to_string()))?;
        decode_response(&text, req.image.width(), req.image.height())
    }
}
