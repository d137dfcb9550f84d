use std::str::FromStr;

use super::{PopsiVariant, Registry};
use crate::data::{item_popularity, HoldoutSets};
use crate::metrics::{evaluate, EvalReport, RunMeta};
use crate::model::FitConfig;
use crate::{Error, Result};

/// A named strategy together with the fit flags its name implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineSpec {
    pub name: String,
    /// `(use_si, use_pop)`; `None` for non-model baselines.
    pub flags: Option<(bool, bool)>,
}

impl BaselineSpec {
    pub fn popsi(use_si: bool, use_pop: bool) -> Self {
        let v = PopsiVariant::from_flags(use_si, use_pop);
        Self { name: v.name.to_owned(), flags: Some((v.use_si, v.use_pop)) }
    }

    /// Checks the name is known and the flags agree with it.
    pub fn validate(&self) -> Result<()> {
        let expected = Self::from_str(&self.name)?;
        if expected.flags != self.flags {
            return Err(Error::InvalidArgument(format!(
                "flags {:?} inconsistent with strategy `{}`",
                self.flags, self.name
            )));
        }
        Ok(())
    }
}

impl FromStr for BaselineSpec {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        if name == "itempop" {
            return Ok(Self { name: name.to_owned(), flags: None });
        }
        PopsiVariant::ALL
            .iter()
            .find(|v| v.name == name)
            .map(|v| Self { name: name.to_owned(), flags: Some((v.use_si, v.use_pop)) })
            .ok_or_else(|| Error::UnknownStrategy(name.to_owned()))
    }
}

/// Which held-out positives to score against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalSplit {
    Validation,
    #[default]
    Test,
}

impl FromStr for EvalSplit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "val" | "validation" => Ok(Self::Validation),
            "test" => Ok(Self::Test),
            other => Err(Error::InvalidArgument(format!("unknown split `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantParams {
    /// Rank, fraction, SVD settings and seed; the flags come from the spec.
    pub fit: FitConfig,
    pub ks: Vec<usize>,
    pub split: EvalSplit,
    pub exclude_train: bool,
}

impl Default for VariantParams {
    fn default() -> Self {
        Self { fit: FitConfig::default(), ks: vec![20, 50], split: EvalSplit::Test, exclude_train: true }
    }
}

/// Fits the named strategy on the training tensor and evaluates it.
pub fn run_variant(spec: &BaselineSpec, data: &HoldoutSets, params: &VariantParams) -> Result<EvalReport> {
    run_variant_with(&Registry::builtin(), spec, data, params)
}

pub fn run_variant_with(
    registry: &Registry,
    spec: &BaselineSpec,
    data: &HoldoutSets,
    params: &VariantParams,
) -> Result<EvalReport> {
    let strategy = registry.get(&spec.name)?;
    if strategy.flags() != spec.flags {
        return Err(Error::InvalidArgument(format!(
            "flags {:?} inconsistent with strategy `{}`",
            spec.flags, spec.name
        )));
    }
    let scorer = strategy.fit(&data.train, &params.fit)?;
    let positives = match params.split {
        EvalSplit::Validation => &data.val_positives,
        EvalSplit::Test => &data.test_positives,
    };
    let pop = item_popularity(data.train.target());
    let exclude = params.exclude_train.then(|| data.train.target());
    let metrics = evaluate(scorer.as_ref(), positives, exclude, &pop, &params.ks)?;
    let (use_si, use_pop) = spec.flags.unwrap_or((false, false));
    Ok(EvalReport {
        metrics,
        config: RunMeta {
            variant: spec.name.clone(),
            r: params.fit.rank,
            p: params.fit.popular_fraction,
            use_si,
            use_pop,
            seed: params.fit.seed,
        },
    })
}
