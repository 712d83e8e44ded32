//! Reference objective process: answers the line protocol with `sum x_i^2`.
//!
//! Flags (for exercising error paths):
//!   --dim <n>         reject handshakes for any other dimension
//!   --garbage         answer every evaluation with "abc"
//!   --exit-after <k>  exit after answering k evaluations
//!   --silent          never answer evaluations

use std::io::{self, BufRead, Write};

fn main() {
    let mut expected_dim: Option<usize> = None;
    let mut garbage = false;
    let mut silent = false;
    let mut exit_after: Option<usize> = None;
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        match a.as_str() {
            "--dim" => expected_dim = args.next().and_then(|v| v.parse().ok()),
            "--garbage" => garbage = true,
            "--silent" => silent = true,
            "--exit-after" => exit_after = args.next().and_then(|v| v.parse().ok()),
            other => {
                eprintln!("unknown flag {other}");
                std::process::exit(2);
            }
        }
    }

    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    let mut dim = 0usize;
    let mut answered = 0usize;
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        let mut parts = line.split_whitespace();
        let reply = match parts.next() {
            Some("H") => match parts.next().and_then(|v| v.parse::<usize>().ok()) {
                Some(d) if expected_dim.is_none_or(|e| e == d) => {
                    dim = d;
                    "OK".to_string()
                }
                Some(d) => format!("ERR dimension {d} not supported"),
                None => "ERR bad handshake".to_string(),
            },
            Some("E") => {
                if exit_after.is_some_and(|k| answered >= k) {
                    return;
                }
                if silent {
                    continue;
                }
                answered += 1;
                let xs: Result<Vec<f64>, _> = parts.map(str::parse::<f64>).collect();
                match xs {
                    _ if garbage => "abc".to_string(),
                    Ok(xs) if xs.len() == dim => {
                        format!("{:?}", xs.iter().map(|v| v * v).sum::<f64>())
                    }
                    Ok(xs) => format!("ERR expected {dim} values, got {}", xs.len()),
                    Err(e) => format!("ERR {e}"),
                }
            }
            _ => "ERR unknown request".to_string(),
        };
        if writeln!(out, "{reply}").and_then(|_| out.flush()).is_err() {
            break;
        }
    }
}
