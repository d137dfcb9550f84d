use std::io::Read;

use log::warn;

use crate::{Error, Result};

/// One raw interaction line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionRecord {
    pub user_id: String,
    pub item_id: String,
    pub behavior: String,
    /// Seconds; kept for provenance only.
    pub timestamp: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    User,
    Item,
    Behavior,
    Timestamp,
    Ignore,
}

impl std::str::FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "user" | "user_id" => Ok(Column::User),
            "item" | "item_id" => Ok(Column::Item),
            "behavior" => Ok(Column::Behavior),
            "ts" | "timestamp" => Ok(Column::Timestamp),
            "_" | "skip" => Ok(Column::Ignore),
            other => Err(Error::InvalidArgument(format!("unknown column `{other}`"))),
        }
    }
}

impl std::fmt::Display for Column {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Column::User => "user",
            Column::Item => "item",
            Column::Behavior => "behavior",
            Column::Timestamp => "ts",
            Column::Ignore => "_",
        })
    }
}

/// Layout of a delimited interaction file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSchema {
    pub delimiter: u8,
    pub has_header: bool,
    pub columns: Vec<Column>,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        Self {
            delimiter: b',',
            has_header: false,
            columns: vec![Column::User, Column::Item, Column::Behavior, Column::Timestamp],
        }
    }
}

impl ColumnSchema {
    fn position(&self, col: Column) -> Option<usize> {
        self.columns.iter().position(|&c| c == col)
    }

    fn validate(&self) -> Result<()> {
        for required in [Column::User, Column::Item, Column::Behavior] {
            if self.position(required).is_none() {
                return Err(Error::InvalidArgument(format!("schema lacks a {required:?} column")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseOutcome {
    pub records: Vec<InteractionRecord>,
    /// Lines with missing fields, empty ids or a non-integer timestamp.
    pub malformed: usize,
    /// Lines whose behavior is not among the accepted labels.
    pub unknown_behavior: usize,
}

impl ParseOutcome {
    pub fn warnings(&self) -> usize {
        self.malformed + self.unknown_behavior
    }
}

/// Reads delimited interaction records.
///
/// When `labels` is `Some`, records with any other behavior are skipped and
/// tallied. Trailing columns beyond the schema are allowed; a missing trailing
/// timestamp column is accepted as `None`.
pub fn parse_interactions<R: Read>(
    input: R,
    schema: &ColumnSchema,
    labels: Option<&[String]>,
) -> Result<ParseOutcome> {
    schema.validate()?;
    let user_at = schema.position(Column::User).unwrap();
    let item_at = schema.position(Column::Item).unwrap();
    let behavior_at = schema.position(Column::Behavior).unwrap();
    let ts_at = schema.position(Column::Timestamp);

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(schema.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let mut out = ParseOutcome::default();
    for row in reader.records() {
        let row = match row {
            Ok(row) => row,
            Err(e) => match e.kind() {
                csv::ErrorKind::Io(_) => return Err(Error::Parse(e.to_string())),
                _ => {
                    out.malformed += 1;
                    continue;
                }
            },
        };
        if row.len() == 1 && row.get(0) == Some("") {
            continue;
        }
        let field = |i: usize| row.get(i).filter(|s| !s.is_empty());
        let (Some(user), Some(item), Some(behavior)) = (field(user_at), field(item_at), field(behavior_at))
        else {
            out.malformed += 1;
            continue;
        };
        let timestamp = match ts_at.and_then(field) {
            None => None,
            Some(raw) => match raw.parse::<i64>() {
                Ok(t) => Some(t),
                Err(_) => {
                    out.malformed += 1;
                    continue;
                }
            },
        };
        if let Some(labels) = labels {
            if !labels.iter().any(|l| l == behavior) {
                out.unknown_behavior += 1;
                continue;
            }
        }
        out.records.push(InteractionRecord {
            user_id: user.to_owned(),
            item_id: item.to_owned(),
            behavior: behavior.to_owned(),
            timestamp,
        });
    }
    if out.warnings() > 0 {
        warn!(
            "skipped {} malformed and {} unknown-behavior lines",
            out.malformed, out.unknown_behavior
        );
    }
    Ok(out)
}
