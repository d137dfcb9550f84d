use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use super::InteractionRecord;
use crate::linalg::SparseMatrix;
use crate::{Error, Result};

/// Bijection between opaque tokens and dense indices `0..len`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdIndex {
    forward: HashMap<String, usize>,
    tokens: Vec<String>,
}

impl IdIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_tokens<I: IntoIterator<Item = String>>(tokens: I) -> Result<Self> {
        let mut index = Self::new();
        for t in tokens {
            if index.forward.contains_key(&t) {
                return Err(Error::Parse(format!("duplicate token `{t}` in index")));
            }
            index.intern(&t);
        }
        Ok(index)
    }

    /// Index of `token`, assigning the next free one on first sight.
    pub fn intern(&mut self, token: &str) -> usize {
        if let Some(&i) = self.forward.get(token) {
            return i;
        }
        let i = self.tokens.len();
        self.forward.insert(token.to_owned(), i);
        self.tokens.push(token.to_owned());
        i
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.forward.get(token).copied()
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.tokens.get(index).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Binary user × item × behavior tensor stored as one sparse slice per
/// behavior. Slice 0 is the target behavior.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTensor {
    users: usize,
    items: usize,
    labels: Vec<String>,
    slices: Vec<SparseMatrix>,
}

impl InteractionTensor {
    pub fn new(users: usize, items: usize, labels: Vec<String>, slices: Vec<SparseMatrix>) -> Result<Self> {
        if labels.is_empty() || labels.len() != slices.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} slices",
                labels.len(),
                slices.len()
            )));
        }
        for s in &slices {
            if s.rows() != users || s.cols() != items {
                return Err(Error::DimensionMismatch {
                    context: "slice shape",
                    expected: users * items,
                    found: s.rows() * s.cols(),
                });
            }
            if s.iter().any(|(_, _, v)| v != 1.0) {
                return Err(Error::InvalidArgument("tensor slices must be binary".into()));
            }
        }
        Ok(Self { users, items, labels, slices })
    }

    /// Builds a tensor from `(user, item, slice)` coordinates; repeats collapse.
    pub fn from_coords(
        users: usize,
        items: usize,
        labels: Vec<String>,
        coords: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut per_slice = vec![BTreeSet::new(); n];
        for (u, v, k) in coords {
            if k >= n {
                return Err(Error::IndexOutOfRange { what: "behaviors", index: k, len: n });
            }
            per_slice[k].insert((u, v));
        }
        let slices = per_slice
            .into_iter()
            .map(|set| SparseMatrix::from_pattern(users, items, &set.into_iter().collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(users, items, labels, slices)
    }

    /// `(m1, m2, n)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.users, self.items, self.slices.len())
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn slices(&self) -> &[SparseMatrix] {
        &self.slices
    }

    pub fn slice(&self, k: usize) -> &SparseMatrix {
        &self.slices[k]
    }

    pub fn target(&self) -> &SparseMatrix {
        &self.slices[0]
    }

    pub fn nnz(&self) -> usize {
        self.slices.iter().map(SparseMatrix::nnz).sum()
    }

    /// Single-slice tensor holding only the target behavior.
    pub fn target_only(&self) -> Self {
        Self {
            users: self.users,
            items: self.items,
            labels: vec![self.labels[0].clone()],
            slices: vec![self.slices[0].clone()],
        }
    }

    /// Entries as `(user, item, slice)` sorted lexicographically.
    pub fn coords(&self) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<_> = self
            .slices
            .iter()
            .enumerate()
            .flat_map(|(k, s)| s.iter().map(move |(u, v, _)| (u, v, k)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Writes the coordinate-triple text format: a `# popsi-tensor m1 m2 n`
    /// header then one `u v k` line per entry, 0-based, sorted.
    pub fn write_triples<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# popsi-tensor {} {} {}", self.users, self.items, self.slices.len())?;
        for (u, v, k) in self.coords() {
            writeln!(w, "{u} {v} {k}")?;
        }
        Ok(())
    }

    /// Reads the format produced by [`write_triples`](Self::write_triples).
    pub fn read_triples<R: BufRead>(r: R, labels: Vec<String>) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("missing tensor header".into()))??;
        let dims: Vec<usize> = header
            .strip_prefix("# popsi-tensor")
            .ok_or_else(|| Error::Parse(format!("bad tensor header `{header}`")))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad tensor header `{header}`"))))
            .collect::<Result<_>>()?;
        let [m1, m2, n] = dims[..] else {
            return Err(Error::Parse(format!("bad tensor header `{header}`")));
        };
        if n != labels.len() {
            return Err(Error::DimensionMismatch { context: "tensor behaviors vs labels", expected: labels.len(), found: n });
        }
        let mut coords = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("line {}: `{line}`", lineno + 2))))
                .collect::<Result<_>>()?;
            let [u, v, k] = parts[..] else {
                return Err(Error::Parse(format!("line {}: expected `u v k`", lineno + 2)));
            };
            coords.push((u, v, k));
        }
        Self::from_coords(m1, m2, labels, coords)
    }
}

/// Indexes raw records into a binary tensor.
///
/// `labels` fixes the slice order, target behavior first. Records with other
/// behaviors are ignored. Users and items are indexed in order of first
/// appearance.
pub fn build_tensor(
    records: &[InteractionRecord],
    labels: &[String],
) -> Result<(InteractionTensor, IdIndex, IdIndex)> {
    if labels.is_empty() {
        return Err(Error::InvalidArgument("behavior label list is empty".into()));
    }
    let slot: HashMap<&str, usize> = labels.iter().enumerate().map(|(k, l)| (l.as_str(), k)).collect();
    let mut users = IdIndex::new();
    let mut items = IdIndex::new();
    let mut coords = Vec::with_capacity(records.len());
    for rec in records {
        let Some(&k) = slot.get(rec.behavior.as_str()) else {
            continue;
        };
        coords.push((users.intern(&rec.user_id), items.intern(&rec.item_id), k));
    }
    if coords.is_empty() {
        return Err(Error::NoRecords);
    }
    let tensor = InteractionTensor::from_coords(users.len(), items.len(), labels.to_vec(), coords)?;
    Ok((tensor, users, items))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(u: &str, i: &str, b: &str) -> InteractionRecord {
        InteractionRecord { user_id: u.into(), item_id: i.into(), behavior: b.into(), timestamp: None }
    }

    fn labels() -> Vec<String> {
        vec!["purchase".into(), "click".into()]
    }

    #[test]
    fn duplicates_collapse() {
        let records = vec![rec("u1", "i1", "purchase"); 3];
        let (t, _, _) = build_tensor(&records, &labels()).unwrap();
        assert_eq!(t.target().nnz(), 1);
        assert_eq!(t.target().get(0, 0), 1.0);
    }

    #[test]
    fn counts_dims_and_entries() {
        let records = vec![
            rec("u1", "i1", "purchase"),
            rec("u2", "i2", "purchase"),
            rec("u1", "i2", "click"),
            rec("u2", "i1", "click"),
        ];
        let (t, users, items) = build_tensor(&records, &labels()).unwrap();
        assert_eq!(t.dims(), (2, 2, 2));
        assert_eq!(t.nnz(), 4);
        assert_eq!(users.get("u2"), Some(1));
        assert_eq!(items.token(1), Some("i2"));
    }

    #[test]
    fn empty_records_rejected() {
        assert!(matches!(build_tensor(&[], &labels()), Err(Error::NoRecords)));
    }

    #[test]
    fn triples_round_trip() {
        let t = InteractionTensor::from_coords(3, 2, labels(), [(2, 1, 0), (0, 0, 1), (0, 1, 0)]).unwrap();
        let mut buf = Vec::new();
        t.write_triples(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "# popsi-tensor 3 2 2\n0 0 1\n0 1 0\n2 1 0\n");
        let back = InteractionTensor::read_triples(buf.as_slice(), labels()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn non_binary_slices_rejected() {
        let s = SparseMatrix::from_triplets(1, 1, vec![(0, 0, 2.0)]).unwrap();
        assert!(InteractionTensor::new(1, 1, vec!["purchase".into()], vec![s]).is_err());
    }
}
