//! Run configuration: a flat `key = value` file overlaid by command-line flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use popsi::data::{Column, ColumnSchema, SplitSpec};
use popsi::model::FitConfig;
use popsi::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub delimiter: u8,
    pub header: bool,
    pub columns: Vec<Column>,
    /// Slice order; empty means "infer from the data, target first".
    pub behaviors: Vec<String>,
    pub target_behavior: String,
    pub split: [f64; 3],
    pub seed: u64,
    pub r: usize,
    pub p: f64,
    pub use_si: bool,
    pub use_pop: bool,
    pub k: Vec<usize>,
    pub oversampling: usize,
    pub power_iters: usize,
    pub svd_tol: Option<f64>,
    pub max_iters: usize,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let fit = FitConfig::default();
        let schema = ColumnSchema::default();
        Self {
            input: None,
            delimiter: schema.delimiter,
            header: schema.has_header,
            columns: schema.columns,
            behaviors: Vec::new(),
            target_behavior: "purchase".into(),
            split: [0.8, 0.1, 0.1],
            seed: 0,
            r: fit.rank,
            p: fit.popular_fraction,
            use_si: fit.use_si,
            use_pop: fit.use_pop,
            k: vec![20, 50],
            oversampling: fit.oversampling,
            power_iters: fit.power_iters,
            svd_tol: fit.svd_tol,
            max_iters: fit.max_iters,
            out: PathBuf::from("popsi-out"),
        }
    }
}

fn list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| anyhow!("`{s}`: {e}")))
        .collect()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn parse_delimiter(value: &str) -> Result<u8> {
    match value {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        "space" => Ok(b' '),
        s if s.len() == 1 => Ok(s.as_bytes()[0]),
        s => bail!("delimiter must be a single byte, `tab` or `space`, got `{s}`"),
    }
}

fn delimiter_name(d: u8) -> String {
    match d {
        b'\t' => "tab".into(),
        b' ' => "space".into(),
        other => (other as char).to_string(),
    }
}

fn boolean(value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => bail!("expected a boolean, got `{other}`"),
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| -> Result<f64> { v.parse().with_context(|| format!("`{v}` is not a number")) };
        let int = |v: &str| -> Result<usize> { v.parse().with_context(|| format!("`{v}` is not a count")) };
        match key {
            "input" => self.input = (!value.is_empty()).then(|| PathBuf::from(value)),
            "delimiter" => self.delimiter = parse_delimiter(value)?,
            "header" => self.header = boolean(value)?,
            "columns" => self.columns = list(value)?,
            "behaviors" => self.behaviors = list(value)?,
            "target_behavior" => self.target_behavior = value.to_string(),
            "split" => {
                let parts: Vec<f64> = list(value)?;
                self.split = parts
                    .try_into()
                    .map_err(|_| anyhow!("split needs three ratios train,val,test"))?;
            }
            "seed" => self.seed = value.parse().with_context(|| format!("`{value}` is not a seed"))?,
            "r" => self.r = int(value)?,
            "p" => self.p = num(value)?,
            "use_si" => self.use_si = boolean(value)?,
            "use_pop" => self.use_pop = boolean(value)?,
            "k" => self.k = list(value)?,
            "oversampling" => self.oversampling = int(value)?,
            "power_iters" => self.power_iters = int(value)?,
            "svd_tol" => self.svd_tol = if value == "none" { None } else { Some(num(value)?) },
            "max_iters" => self.max_iters = int(value)?,
            "out" => self.out = PathBuf::from(value),
            other => bail!("unknown configuration key `{other}`"),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
            self.set(key.trim(), value.trim()).with_context(|| format!("line {}", n + 1))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        config.apply_text(text)?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# popsi run configuration\n");
        let mut line = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        line("input", self.input.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
        line("delimiter", delimiter_name(self.delimiter));
        line("header", self.header.to_string());
        line("columns", join(&self.columns));
        line("behaviors", self.behaviors.join(","));
        line("target_behavior", self.target_behavior.clone());
        line("split", join(&self.split));
        line("seed", self.seed.to_string());
        line("r", self.r.to_string());
        line("p", self.p.to_string());
        line("use_si", self.use_si.to_string());
        line("use_pop", self.use_pop.to_string());
        line("k", join(&self.k));
        line("oversampling", self.oversampling.to_string());
        line("power_iters", self.power_iters.to_string());
        line("svd_tol", self.svd_tol.map_or("none".into(), |t| t.to_string()));
        line("max_iters", self.max_iters.to_string());
        line("out", self.out.display().to_string());
        s
    }

    /// Writes the effective configuration and checks that it reads back unchanged.
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = self.to_text();
        if Self::parse(&text)? != *self {
            bail!("configuration does not survive a write/read round trip");
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 1 {
            bail!("r must be at least 1");
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            bail!("p must lie strictly between 0 and 1, got {}", self.p);
        }
        if self.k.is_empty() || self.k.contains(&0) {
            bail!("K values must be non-empty and at least 1");
        }
        if self.target_behavior.is_empty() {
            bail!("target behavior is empty");
        }
        self.split_spec()?;
        Ok(())
    }

    pub fn schema(&self) -> ColumnSchema {
        ColumnSchema { delimiter: self.delimiter, has_header: self.header, columns: self.columns.clone() }
    }

    pub fn split_spec(&self) -> Result<SplitSpec> {
        let [train, val, test] = self.split;
        Ok(SplitSpec::new(train, val, test, seed::derive(self.seed, seed::stream::SPLIT))?)
    }

    pub fn fit_config(&self) -> FitConfig {
        FitConfig {
            rank: self.r,
            popular_fraction: self.p,
            use_si: self.use_si,
            use_pop: self.use_pop,
            oversampling: self.oversampling,
            power_iters: self.power_iters,
            svd_tol: self.svd_tol,
            max_iters: self.max_iters,
            seed: self.seed,
        }
    }

    /// Configured labels with the target moved to the front.
    pub fn labels(&self) -> Vec<String> {
        let mut labels = vec![self.target_behavior.clone()];
        labels.extend(self.behaviors.iter().filter(|b| **b != self.target_behavior).cloned());
        labels
    }
}
