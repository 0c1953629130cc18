//! Reference external evaluator: the sphere function over the line protocol.
//!
//! Options (for exercising failure paths):
//!   --sleep-ms N      wait N ms before every response
//!   --garbage         print a non-JSON handshake
//!   --version N       announce protocol version N
//!   --die-once PATH   if PATH does not exist, create it and exit without
//!                     answering the Kth request (K from --die-at, default 3)
//!   --die-at K

use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::time::Duration;

use nawoa::extobj::{EvalRequest, EvalResponse, PROTOCOL_NAME, PROTOCOL_VERSION};

struct Options {
    sleep: Duration,
    garbage: bool,
    version: u64,
    die_once: Option<PathBuf>,
    die_at: u64,
}

fn parse_args() -> Result<Options, String> {
    let mut opts = Options {
        sleep: Duration::ZERO,
        garbage: false,
        version: PROTOCOL_VERSION,
        die_once: None,
        die_at: 3,
    };
    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        let mut value = |name: &str| args.next().ok_or_else(|| format!("{name} needs a value"));
        match arg.as_str() {
            "--sleep-ms" => {
                opts.sleep =
                    Duration::from_millis(value("--sleep-ms")?.parse().map_err(|e| format!("{e}"))?)
            }
            "--garbage" => opts.garbage = true,
            "--version" => {
                opts.version = value("--version")?.parse().map_err(|e| format!("{e}"))?
            }
            "--die-once" => opts.die_once = Some(PathBuf::from(value("--die-once")?)),
            "--die-at" => opts.die_at = value("--die-at")?.parse().map_err(|e| format!("{e}"))?,
            other => return Err(format!("unknown option {other}")),
        }
    }
    Ok(opts)
}

fn main() {
    let opts = match parse_args() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("sphere-eval: {e}");
            std::process::exit(2);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if opts.garbage {
        writeln!(out, "hello there").ok();
    } else {
        writeln!(
            out,
            r#"{{"protocol":"{PROTOCOL_NAME}","version":{}}}"#,
            opts.version
        )
        .ok();
    }
    out.flush().ok();

    let die_now = opts.die_once.as_ref().is_some_and(|p| !p.exists());
    let mut seen = 0u64;
    for line in io::stdin().lock().lines() {
        let Ok(line) = line else { break };
        if line.trim().is_empty() {
            continue;
        }
        seen += 1;
        if die_now && seen == opts.die_at {
            std::fs::write(opts.die_once.as_ref().unwrap(), b"died").ok();
            std::process::exit(3);
        }
        let response = match serde_json::from_str::<EvalRequest>(&line) {
            Ok(req) => EvalResponse {
                id: req.id,
                fitness: Some(req.x.iter().map(|v| v * v).sum()),
                error: None,
            },
            Err(e) => EvalResponse {
                id: serde_json::from_str::<serde_json::Value>(&line)
                    .ok()
                    .and_then(|v| v["id"].as_u64())
                    .unwrap_or(0),
                fitness: None,
                error: Some(format!("malformed request: {e}")),
            },
        };
        if !opts.sleep.is_zero() {
            std::thread::sleep(opts.sleep);
        }
        let text = serde_json::to_string(&response).expect("response serializes");
        if writeln!(out, "{text}").and_then(|_| out.flush()).is_err() {
            break;
        }
    }
}
