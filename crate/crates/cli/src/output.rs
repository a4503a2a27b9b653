use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde::Serialize;

use quadrom_core::FloatMap;

/// Writes pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

/// Floating map coefficients as `[re, im]` pairs.
#[derive(Debug, Serialize)]
pub struct FloatMapJson {
    pub z1: [f64; 2],
    pub r: f64,
    pub u: Vec<[f64; 2]>,
}

impl From<&FloatMap> for FloatMapJson {
    fn from(m: &FloatMap) -> Self {
        let pair = |c: &Complex64| [c.re, c.im];
        FloatMapJson { z1: pair(&m.z1), r: m.r, u: m.u.iter().map(pair).collect() }
    }
}
