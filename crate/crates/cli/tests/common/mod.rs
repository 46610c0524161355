#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn preset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("presets")
        .join(name)
}

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qho-relax"))
        .args(args)
        .env_remove("QHO_RELAX_TRUNCATION")
        .output()
        .expect("binary runs")
}

pub fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub struct Csv {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Csv {
    pub fn parse(text: &str) -> Self {
        let mut lines = text.lines();
        let headers = lines.next().unwrap().split(',').map(String::from).collect();
        let rows = lines
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect();
        Self { headers, rows }
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        let k = self
            .headers
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name} in {:?}", self.headers));
        self.rows.iter().map(|r| r[k]).collect()
    }
}

/// Interior extrema: sign changes of successive differences above `noise`.
pub fn extrema(values: &[f64], noise: f64) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d.abs() <= noise {
            continue;
        }
        if last != 0.0 && d.signum() != last {
            count += 1;
        }
        last = d.signum();
    }
    count
}
