//! Objective backed by an external process speaking a line protocol:
//!
//! ```text
//! -> H <d>            <- OK
//! -> E <x_1> ... <x_d> <- <f>   |   ERR <message>
//! ```
//!
//! Numbers are written in shortest round-trip decimal form. One request is in
//! flight per process at a time.

use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use super::{Domain, Objective, ObjectiveFn};
use crate::trace::format_decimal;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SubprocessCommand {
    pub program: PathBuf,
    pub args: Vec<String>,
    /// Per-request timeout, including the handshake.
    pub timeout: Duration,
    /// Initial search region; defaults to `[-1, 1]^d`.
    pub domain: Option<Domain>,
}

impl SubprocessCommand {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        SubprocessCommand {
            program: program.into(),
            args: Vec::new(),
            timeout: Duration::from_secs(30),
            domain: None,
        }
    }

    pub fn arg(mut self, arg: impl Into<String>) -> Self {
        self.args.push(arg.into());
        self
    }

    pub fn timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn domain(mut self, domain: Domain) -> Self {
        self.domain = Some(domain);
        self
    }
}

struct Channel {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    // set once the stream can no longer be trusted to be in sync
    broken: Option<String>,
}

impl Channel {
    fn request(&mut self, line: &str, timeout: Duration) -> std::result::Result<String, String> {
        if let Some(reason) = &self.broken {
            return Err(format!("process unusable after earlier failure: {reason}"));
        }
        let reply = self.exchange(line, timeout);
        if let Err(e) = &reply {
            self.broken = Some(e.clone());
        }
        reply
    }

    fn exchange(&mut self, line: &str, timeout: Duration) -> std::result::Result<String, String> {
        writeln!(self.stdin, "{line}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| format!("write to process failed: {e}"))?;
        match self.lines.recv_timeout(timeout) {
            Ok(Ok(reply)) => Ok(reply.trim_end().to_string()),
            Ok(Err(e)) => Err(format!("read from process failed: {e}")),
            Err(RecvTimeoutError::Timeout) => Err(format!("no response within {timeout:?}")),
            Err(RecvTimeoutError::Disconnected) => {
                let status = self
                    .child
                    .wait()
                    .map(|s| s.to_string())
                    .unwrap_or_else(|e| e.to_string());
                Err(format!("process exited ({status})"))
            }
        }
    }
}

impl Drop for Channel {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

struct SubprocessFn {
    channel: Mutex<Channel>,
    timeout: Duration,
}

impl ObjectiveFn for SubprocessFn {
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let mut request = String::with_capacity(2 + 24 * x.len());
        request.push('E');
        for v in x {
            request.push(' ');
            request.push_str(&format_decimal(*v));
        }
        let mut channel = self.channel.lock().unwrap_or_else(|p| p.into_inner());
        let reply = channel
            .request(&request, self.timeout)
            .map_err(|message| Error::Evaluation { index: 0, message })?;
        parse_response(&reply)
    }

    fn concurrent(&self) -> bool {
        false
    }
}

fn parse_response(reply: &str) -> Result<f64> {
    if let Some(msg) = reply.strip_prefix("ERR") {
        return Err(Error::Evaluation {
            index: 0,
            message: format!("process reported error: {}", msg.trim()),
        });
    }
    reply.trim().parse::<f64>().map_err(|_| Error::Evaluation {
        index: 0,
        message: format!("malformed response '{reply}'"),
    })
}

/// Spawns `command`, performs the handshake for dimension `dim` and returns a
/// counted objective that forwards every query to the process.
pub fn subprocess_objective(command: &SubprocessCommand, dim: usize) -> Result<Objective> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let domain = match &command.domain {
        Some(d) if d.dim() != dim => {
            return Err(Error::invalid("subprocess domain dimension does not match"))
        }
        Some(d) => d.clone(),
        None => Domain::hypercube(dim, -1.0, 1.0)?,
    };

    let mut child = Command::new(&command.program)
        .args(&command.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| Error::Setup(format!("cannot spawn {}: {e}", command.program.display())))?;
    let stdin = child.stdin.take().expect("stdin is piped");
    let stdout = child.stdout.take().expect("stdout is piped");

    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for line in BufReader::new(stdout).lines() {
            let stop = line.is_err();
            if tx.send(line).is_err() || stop {
                break;
            }
        }
    });

    let mut channel = Channel {
        child,
        stdin,
        lines: rx,
        broken: None,
    };
    match channel.request(&format!("H {dim}"), command.timeout) {
        Ok(reply) if reply.trim() == "OK" => {}
        Ok(reply) => return Err(Error::Setup(format!("handshake rejected: '{reply}'"))),
        Err(e) => return Err(Error::Setup(format!("handshake failed: {e}"))),
    }

    let label = command
        .program
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "subprocess".into());
    let func = SubprocessFn {
        channel: Mutex::new(channel),
        timeout: command.timeout,
    };
    Ok(Objective::new(label, domain, Arc::new(func)))
}
