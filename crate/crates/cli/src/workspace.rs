//! File layout of a run directory and the small text formats stored in it.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use popsi::data::{IdIndex, InteractionTensor};
use popsi::model::PreferenceModel;

pub const TENSOR: &str = "tensor.txt";
pub const USERS: &str = "users.txt";
pub const ITEMS: &str = "items.txt";
pub const BEHAVIORS: &str = "behaviors.txt";
pub const STATS: &str = "stats.json";
pub const CONFIG: &str = "config.txt";
pub const TRAIN: &str = "train.txt";
pub const VAL: &str = "val.txt";
pub const TEST: &str = "test.txt";
pub const MODEL: &str = "model.bin";
pub const FIT_LOG: &str = "fit.log";
pub const REPORT: &str = "report.json";
pub const SWEEP: &str = "sweep.csv";

pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    pub fn new(root: &Path) -> Self {
        Self { root: root.to_path_buf() }
    }

    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self::new(root))
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn open(&self, name: &str) -> Result<BufReader<File>> {
        let path = self.path(name);
        let file = File::open(&path).with_context(|| format!("opening {} (run `popsi ingest` / `popsi fit` first?)", path.display()))?;
        Ok(BufReader::new(file))
    }

    fn create_file(&self, name: &str) -> Result<BufWriter<File>> {
        let path = self.path(name);
        Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
    }

    pub fn write_lines<'a>(&self, name: &str, lines: impl IntoIterator<Item = &'a str>) -> Result<()> {
        let mut w = self.create_file(name)?;
        for line in lines {
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_lines(&self, name: &str) -> Result<Vec<String>> {
        self.open(name)?.lines().collect::<std::io::Result<_>>().with_context(|| format!("reading {name}"))
    }

    pub fn read_index(&self, name: &str) -> Result<IdIndex> {
        Ok(IdIndex::from_tokens(self.read_lines(name)?)?)
    }

    pub fn write_tensor(&self, name: &str, tensor: &InteractionTensor) -> Result<()> {
        let mut w = self.create_file(name)?;
        tensor.write_triples(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_tensor(&self, name: &str) -> Result<InteractionTensor> {
        let labels = self.read_lines(BEHAVIORS)?;
        InteractionTensor::read_triples(self.open(name)?, labels).with_context(|| format!("reading {name}"))
    }

    /// Held-out positives as `# popsi-holdout <users>` followed by `u v` lines.
    pub fn write_holdout(&self, name: &str, positives: &[Vec<usize>]) -> Result<()> {
        let mut w = self.create_file(name)?;
        writeln!(w, "# popsi-holdout {}", positives.len())?;
        for (u, items) in positives.iter().enumerate() {
            for v in items {
                writeln!(w, "{u} {v}")?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_holdout(&self, name: &str) -> Result<Vec<Vec<usize>>> {
        let lines = self.read_lines(name)?;
        let Some(users) = lines.first().and_then(|h| h.strip_prefix("# popsi-holdout ")) else {
            bail!("{name}: missing `# popsi-holdout` header");
        };
        let mut positives = vec![Vec::new(); users.trim().parse().with_context(|| format!("{name}: bad header"))?];
        for (n, line) in lines.iter().enumerate().skip(1) {
            let mut fields = line.split_whitespace().map(str::parse::<usize>);
            let (Some(Ok(u)), Some(Ok(v)), None) = (fields.next(), fields.next(), fields.next()) else {
                bail!("{name}:{}: expected `user item`", n + 1);
            };
            positives.get_mut(u).with_context(|| format!("{name}:{}: user {u} out of range", n + 1))?.push(v);
        }
        Ok(positives)
    }

    pub fn write_model(&self, model: &PreferenceModel) -> Result<()> {
        let mut w = self.create_file(MODEL)?;
        model.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_model(&self) -> Result<PreferenceModel> {
        PreferenceModel::read_from(self.open(MODEL)?).context("reading model.bin")
    }

    pub fn write_string(&self, name: &str, text: &str) -> Result<()> {
        let path = self.path(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holdout_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::new(dir.path());
        let positives = vec![vec![3, 1], vec![], vec![0]];
        ws.write_holdout(TEST, &positives).unwrap();
        assert_eq!(ws.read_holdout(TEST).unwrap(), positives);
    }

    #[test]
    fn holdout_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::new(dir.path());
        ws.write_string(TEST, "# popsi-holdout 1\n0 x\n").unwrap();
        assert!(ws.read_holdout(TEST).is_err());
        ws.write_string(TEST, "# popsi-holdout 1\n4 0\n").unwrap();
        assert!(ws.read_holdout(TEST).is_err());
    }
}
