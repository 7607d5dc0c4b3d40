//! Subprocess escape hatch for user-supplied oracles.
//!
//! Line protocol: the engine writes one SMILES per line to the child's
//! stdin and reads one decimal score per line from its stdout. Timeouts,
//! dead children and non-numeric replies are run-fatal.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::molgraph::MolGraph;
use crate::scalar::Scalar;
use crate::smiles;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

struct Pipes {
    child: Child,
    stdin: ChildStdin,
    replies: Receiver<std::io::Result<String>>,
}

/// Oracle backed by a long-running child process speaking the line
/// protocol. The command is run through `sh -c`.
pub struct ExternalOracle {
    name: String,
    command: String,
    timeout: Duration,
    pipes: Mutex<Pipes>,
}

impl ExternalOracle {
    pub fn spawn(command: &str) -> Result<ExternalOracle> {
        ExternalOracle::spawn_with_timeout(command, DEFAULT_TIMEOUT)
    }

    pub fn spawn_with_timeout(command: &str, timeout: Duration) -> Result<ExternalOracle> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Oracle(format!("failed to spawn {command:?}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let replies = reader_thread(stdout);
        Ok(ExternalOracle {
            name: format!("external:{command}"),
            command: command.to_string(),
            timeout,
            pipes: Mutex::new(Pipes {
                child,
                stdin,
                replies,
            }),
        })
    }

    fn exchange(&self, line: &str) -> Result<String> {
        let mut pipes = self
            .pipes
            .lock()
            .map_err(|_| Error::Oracle("oracle mutex poisoned".into()))?;
        writeln!(pipes.stdin, "{line}")
            .and_then(|_| pipes.stdin.flush())
            .map_err(|e| Error::Oracle(format!("{}: write failed: {e}", self.command)))?;
        match pipes.replies.recv_timeout(self.timeout) {
            Ok(Ok(reply)) => Ok(reply),
            Ok(Err(e)) => Err(Error::Oracle(format!("{}: read failed: {e}", self.command))),
            Err(RecvTimeoutError::Timeout) => Err(Error::Oracle(format!(
                "{}: no reply within {:?}",
                self.command, self.timeout
            ))),
            Err(RecvTimeoutError::Disconnected) => Err(Error::Oracle(format!(
                "{}: child closed its output",
                self.command
            ))),
        }
    }
}

impl Drop for ExternalOracle {
    fn drop(&mut self) {
        if let Ok(mut pipes) = self.pipes.lock() {
            let _ = pipes.child.kill();
            let _ = pipes.child.wait();
        }
    }
}

impl<F: Scalar> crate::oracles::Oracle<F> for ExternalOracle {
    fn name(&self) -> &str {
        &self.name
    }

    fn score(&self, mol: &MolGraph) -> Result<F> {
        let line = smiles::write(mol)?;
        let reply = self.exchange(&line)?;
        let value: f64 = reply.trim().parse().map_err(|_| {
            Error::Oracle(format!(
                "{}: non-numeric reply {reply:?} for {line}",
                self.command
            ))
        })?;
        if !value.is_finite() {
            return Err(Error::Oracle(format!(
                "{}: non-finite score {value} for {line}",
                self.command
            )));
        }
        Ok(F::from_config(value))
    }
}

fn reader_thread(stdout: ChildStdout) -> Receiver<std::io::Result<String>> {
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let reader = BufReader::new(stdout);
        for line in reader.lines() {
            if tx.send(line).is_err() {
                break;
            }
        }
    });
    rx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::Oracle;
    use crate::smiles::parse;

    #[test]
    fn echo_length_scorer() {
        // replies with the byte length of each SMILES line
        let oracle =
            ExternalOracle::spawn("while read line; do echo ${#line}; done").unwrap();
        let g = parse("CCO").unwrap();
        let s: f64 = oracle.score(&g).unwrap();
        assert_eq!(s, smiles::write(&g).unwrap().len() as f64);
        // stays usable across calls
        let s2: f64 = oracle.score(&parse("C").unwrap()).unwrap();
        assert_eq!(s2, 1.0);
    }

    #[test]
    fn non_numeric_reply_is_fatal() {
        let oracle = ExternalOracle::spawn("while read line; do echo nope; done").unwrap();
        let out: Result<f64> = oracle.score(&parse("C").unwrap());
        assert!(matches!(out, Err(Error::Oracle(_))));
    }

    #[test]
    fn silent_child_times_out() {
        let oracle = ExternalOracle::spawn_with_timeout(
            "while read line; do sleep 10; done",
            Duration::from_millis(150),
        )
        .unwrap();
        let out: Result<f64> = oracle.score(&parse("C").unwrap());
        match out {
            Err(Error::Oracle(msg)) => assert!(msg.contains("no reply")),
            other => panic!("expected timeout, got {other:?}"),
        }
    }

    #[test]
    fn dead_child_reports_disconnect() {
        let oracle = ExternalOracle::spawn("true").unwrap();
        std::thread::sleep(Duration::from_millis(50));
        let out: Result<f64> = oracle.score(&parse("C").unwrap());
        assert!(matches!(out, Err(Error::Oracle(_))));
    }
}
