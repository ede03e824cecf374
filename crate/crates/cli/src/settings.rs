//! Search settings: preset, then config file, then command-line flags.

use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use cdtools::cache::{CacheOrdering, CachePolicy};
use cdtools::enumerate::GeneratorKind;
use cdtools::formula::Formula;
use cdtools::sgcd::{Preset, SearchConfig, SearchMode, StopMode};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Goal,
    Axiom,
    Blended,
}

impl FromStr for ModeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "goal" | "goal-driven" => Ok(ModeArg::Goal),
            "axiom" | "axiom-driven" => Ok(ModeArg::Axiom),
            "blended" => Ok(ModeArg::Blended),
            _ => Err(format!("unknown mode `{s}` (expected goal, axiom or blended)")),
        }
    }
}

fn parse_ordering(s: &str) -> Result<CacheOrdering, String> {
    match s.to_ascii_lowercase().as_str() {
        "height-size" | "height" => Ok(CacheOrdering::HeightSize),
        "size-height" | "size" => Ok(CacheOrdering::SizeHeight),
        _ => Err(format!("unknown ordering `{s}` (expected height-size or size-height)")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, found `{s}`")),
    }
}

/// Explicitly set search parameters. Unset fields keep the preset's value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub preset: Option<Preset>,
    pub generator: Option<GeneratorKind>,
    pub mode: Option<ModeArg>,
    pub lookahead: Option<usize>,
    /// `Some(None)` removes the capacity limit.
    pub capacity: Option<Option<usize>>,
    pub dim_limit: Option<Option<f64>>,
    pub subsumption: Option<bool>,
    pub residual: Option<bool>,
    pub ordering: Option<CacheOrdering>,
    pub max_level: Option<usize>,
    pub timeout: Option<f64>,
    pub alternates: Option<bool>,
}

fn optional<T: FromStr>(v: &str) -> Result<Option<T>, String> {
    if matches!(v.to_ascii_lowercase().as_str(), "none" | "off" | "unlimited") {
        return Ok(None);
    }
    v.parse().map(Some).map_err(|_| format!("bad value `{v}`"))
}

fn number<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("bad number `{v}`"))
}

impl Settings {
    /// Sets one parameter by its flag name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key.trim().replace('_', "-").as_str() {
            "preset" => self.preset = Some(v.parse()?),
            "generator" => self.generator = Some(v.parse()?),
            "mode" => self.mode = Some(v.parse()?),
            "lookahead" => self.lookahead = Some(number(v)?),
            "capacity" => self.capacity = Some(optional(v)?),
            "dim-limit" => self.dim_limit = Some(optional(v)?),
            "subsumption" => self.subsumption = Some(parse_bool(v)?),
            "residual" => self.residual = Some(parse_bool(v)?),
            "ordering" => self.ordering = Some(parse_ordering(v)?),
            "max-level" => self.max_level = Some(number(v)?),
            "timeout" => self.timeout = Some(number(v)?),
            "alternates" => self.alternates = Some(parse_bool(v)?),
            other => return Err(format!("unknown setting `{other}`")),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = crate::input::read_file(path)?;
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("{}:{}: expected `key = value`", path.display(), i + 1)))?;
            s.set(k, v).map_err(|e| CliError::Input(format!("{}:{}: {e}", path.display(), i + 1)))?;
        }
        Ok(s)
    }

    /// `other`'s explicit values win.
    pub fn overlay(mut self, other: &Settings) -> Settings {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(preset, generator, mode, lookahead, capacity, dim_limit, subsumption, residual, ordering, max_level, timeout, alternates);
        self
    }

    pub fn build(&self, goals: Vec<Formula>) -> Result<(SearchConfig, CachePolicy), CliError> {
        let preset = self.preset.unwrap_or(Preset::Sgcd1);
        let (mut cfg, mut policy) = preset.config(goals);
        if let Some(g) = self.generator {
            cfg.generator = g;
        }
        if let Some(m) = self.mode {
            cfg.mode = match m {
                ModeArg::Goal => SearchMode::GoalDrivenOnly,
                ModeArg::Axiom => SearchMode::AxiomDrivenOnly,
                ModeArg::Blended => SearchMode::Blended,
            };
        }
        if let Some(l) = self.lookahead {
            cfg.lookahead = l;
        }
        if let Some(c) = self.capacity {
            policy.capacity = c;
        }
        if let Some(f) = self.dim_limit {
            policy.dim_limit_factor = f;
        }
        if let Some(s) = self.subsumption {
            policy.subsumption_delete = s;
        }
        if let Some(r) = self.residual {
            policy.keep_residual = r;
        }
        if let Some(o) = self.ordering {
            policy.ordering = o;
        }
        if let Some(m) = self.max_level {
            cfg.max_level = Some(m);
        }
        if let Some(t) = self.timeout {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Input(format!("timeout must be positive, found {t}")));
            }
            cfg.timeout = Some(Duration::from_secs_f64(t));
        }
        if self.alternates == Some(true) {
            cfg.stop = StopMode::EnumerateAlternates;
        }
        policy.validate().map_err(CliError::Input)?;
        cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
        log::info!(
            "preset {}: generator={} mode={:?} lookahead={} max_level={:?} timeout={:?} capacity={:?} dim_limit={:?} subsumption={} residual={} ordering={:?}",
            preset.name(),
            cfg.generator,
            cfg.mode,
            cfg.lookahead,
            cfg.max_level,
            cfg.timeout,
            policy.capacity,
            policy.dim_limit_factor,
            policy.subsumption_delete,
            policy.keep_residual,
            policy.ordering
        );
        Ok((cfg, policy))
    }
}
