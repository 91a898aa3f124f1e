//! Flat `key=value` configuration: a file, then command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use nstr_core::trcore::{HessianMode, RadiusRule, TrParams};

/// Parsed keys not yet consumed by a command. Whatever is left when the
/// command finishes reading is reported as unknown.
#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            cfg.insert_pair(line)
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse_text(&text).with_context(|| format!("in {}", path.display()))
    }

    /// `key=value`; later values win.
    pub fn insert_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got {pair:?}"))?;
        let k = k.trim();
        if k.is_empty() {
            bail!("empty key in {pair:?}");
        }
        self.entries.insert(k.to_string(), v.trim().to_string());
        Ok(())
    }

    pub fn take_str(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| anyhow!("bad value {v:?} for {key}: {e}")),
        }
    }

    pub fn take_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.take(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn take_list<T: FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(v) = self.entries.remove(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|s| {
                let s = s.trim();
                s.parse()
                    .map_err(|e| anyhow!("bad entry {s:?} in {key}: {e}"))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    pub fn take_path(&mut self, key: &str) -> Option<PathBuf> {
        self.entries.remove(key).map(PathBuf::from)
    }

    /// Overrides every `TrParams` field that is present.
    pub fn apply_tr(&mut self, p: &mut TrParams) -> Result<()> {
        macro_rules! field {
            ($($name:ident),*) => {$(
                if let Some(v) = self.take(stringify!($name))? {
                    p.$name = v;
                }
            )*};
        }
        field!(
            delta_min,
            eta1,
            eta2,
            beta1,
            beta2,
            mu,
            delta0,
            max_iter,
            tol_stationarity,
            tol_step,
            delta_stationary,
            tol_zero_subgradient,
            c_h
        );
        if let Some(v) = self.take_str("hessian") {
            p.hessian = match v.as_str() {
                "bfgs" => HessianMode::Bfgs,
                "zero" => HessianMode::Zero,
                _ => bail!("hessian must be bfgs or zero, got {v:?}"),
            };
        }
        if let Some(v) = self.take_str("radius_rule") {
            p.radius_rule = match v.as_str() {
                "floored" => RadiusRule::Floored,
                "unfloored" => RadiusRule::Unfloored,
                _ => bail!("radius_rule must be floored or unfloored, got {v:?}"),
            };
        }
        Ok(())
    }

    /// Errors on leftovers.
    pub fn finish(self) -> Result<()> {
        if self.entries.is_empty() {
            return Ok(());
        }
        let keys: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        bail!("unknown key(s): {}", keys.join(", "))
    }
}

/// `NSTR_WORKERS`, else the `workers` key, else available parallelism.
pub fn worker_count(from_config: Option<usize>) -> Result<usize> {
    let n = match std::env::var("NSTR_WORKERS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|e| anyhow!("NSTR_WORKERS={v:?}: {e}"))?,
        Err(_) => from_config
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
    };
    if n == 0 {
        bail!("worker count must be positive");
    }
    Ok(n)
}
