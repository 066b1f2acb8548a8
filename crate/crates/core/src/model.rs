//! Canonical interaction data model.
//!
//! User and item identifiers are opaque strings externally. Internally each
//! log holds two sorted vocabularies and stores dense `u32` handles, so the
//! handle order equals the string order and canonical sorting never touches
//! the strings. Logs derived from one another (preprocessing output, split
//! subsets) share their parent's vocabularies.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Epoch milliseconds, UTC.
pub type Timestamp = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetRole {
    Raw,
    Preprocessed,
    Train,
    ValInput,
    ValTarget,
    TestInput,
    TestTarget,
}

impl SubsetRole {
    pub const ALL: [SubsetRole; 7] = [
        SubsetRole::Raw,
        SubsetRole::Preprocessed,
        SubsetRole::Train,
        SubsetRole::ValInput,
        SubsetRole::ValTarget,
        SubsetRole::TestInput,
        SubsetRole::TestTarget,
    ];

    /// The five roles that make up a split bundle, in file order.
    pub const SPLIT: [SubsetRole; 5] = [
        SubsetRole::Train,
        SubsetRole::ValInput,
        SubsetRole::ValTarget,
        SubsetRole::TestInput,
        SubsetRole::TestTarget,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SubsetRole::Raw => "raw",
            SubsetRole::Preprocessed => "preprocessed",
            SubsetRole::Train => "train",
            SubsetRole::ValInput => "val_input",
            SubsetRole::ValTarget => "val_target",
            SubsetRole::TestInput => "test_input",
            SubsetRole::TestTarget => "test_target",
        }
    }
}

impl fmt::Display for SubsetRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SubsetRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SubsetRole::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown subset role `{s}`"))
    }
}

/// One (user, item, timestamp) event plus its position in the source file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interaction {
    pub user_id: String,
    pub item_id: String,
    pub timestamp: Timestamp,
    pub ordinal: u64,
}

impl Interaction {
    pub fn new(user_id: impl Into<String>, item_id: impl Into<String>, timestamp: Timestamp, ordinal: u64) -> Self {
        Interaction {
            user_id: user_id.into(),
            item_id: item_id.into(),
            timestamp,
            ordinal,
        }
    }
}

/// Borrowed view of one interaction of a log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InteractionRef<'a> {
    pub user_id: &'a str,
    pub item_id: &'a str,
    pub timestamp: Timestamp,
    pub ordinal: u64,
}

impl InteractionRef<'_> {
    pub fn to_owned(&self) -> Interaction {
        Interaction::new(self.user_id, self.item_id, self.timestamp, self.ordinal)
    }
}

/// Sorted, de-duplicated identifier table. Handles are indexes into it.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Vocab {
    names: Vec<String>,
}

impl Vocab {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub(crate) fn name(&self, handle: u32) -> &str {
        &self.names[handle as usize]
    }

    pub(crate) fn lookup(&self, name: &str) -> Option<u32> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| i as u32)
    }

    /// Union of several vocabularies, still sorted.
    pub(crate) fn merge(vocabs: &[&Vocab]) -> Vocab {
        let mut names: Vec<String> = vocabs.iter().flat_map(|v| v.names.iter().cloned()).collect();
        names.sort_unstable();
        names.dedup();
        Vocab { names }
    }

    /// Handle remapping into `superset`. Monotone because both sides are sorted.
    pub(crate) fn remap_into(&self, superset: &Vocab) -> Vec<u32> {
        self.names
            .iter()
            .map(|n| superset.lookup(n).expect("superset vocabulary"))
            .collect()
    }
}

/// Builds a vocabulary in arrival order, then sorts it.
#[derive(Default)]
pub(crate) struct Interner {
    index: HashMap<String, u32>,
    names: Vec<String>,
}

impl Interner {
    pub(crate) fn intern(&mut self, name: &str) -> u32 {
        if let Some(&h) = self.index.get(name) {
            return h;
        }
        let h = self.names.len() as u32;
        self.index.insert(name.to_owned(), h);
        self.names.push(name.to_owned());
        h
    }

    /// Returns the sorted vocabulary and the arrival-handle → sorted-handle map.
    pub(crate) fn finish(self) -> (Vocab, Vec<u32>) {
        let mut order: Vec<u32> = (0..self.names.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| self.names[a as usize].cmp(&self.names[b as usize]));
        let mut remap = vec![0u32; self.names.len()];
        for (sorted, &arrival) in order.iter().enumerate() {
            remap[arrival as usize] = sorted as u32;
        }
        let mut names = self.names;
        let mut sorted_names = Vec::with_capacity(names.len());
        for &arrival in &order {
            sorted_names.push(std::mem::take(&mut names[arrival as usize]));
        }
        (Vocab { names: sorted_names }, remap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Record {
    pub user: u32,
    pub timestamp: Timestamp,
    pub ordinal: u64,
    pub item: u32,
}

impl Record {
    /// Canonical sort key: (user, timestamp, ordinal).
    #[inline]
    pub(crate) fn key(&self) -> (u32, Timestamp, u64) {
        (self.user, self.timestamp, self.ordinal)
    }

    /// Global chronological key: (timestamp, ordinal).
    #[inline]
    pub(crate) fn time_key(&self) -> (Timestamp, u64) {
        (self.timestamp, self.ordinal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct UserSlice {
    pub user: u32,
    pub start: usize,
    pub end: usize,
}

impl UserSlice {
    pub(crate) fn range(&self) -> Range<usize> {
        self.start..self.end
    }
}

/// A canonically ordered collection of interactions with a per-user index.
///
/// Construct through [`InteractionLog::from_interactions`] or the ingest
/// functions; both sort into canonical order. The unchecked constructor
/// exists only so externally produced data can be inspected by
/// [`crate::ingest::validate_log`].
#[derive(Debug, Clone)]
pub struct InteractionLog {
    users: Arc<Vocab>,
    items: Arc<Vocab>,
    records: Vec<Record>,
    user_index: Vec<UserSlice>,
    role: SubsetRole,
}

impl InteractionLog {
    pub fn from_interactions<I>(interactions: I, role: SubsetRole) -> Result<Self>
    where
        I: IntoIterator<Item = Interaction>,
    {
        let (users, items, records) = intern_all(interactions);
        let mut seen = std::collections::HashSet::with_capacity(records.len());
        for r in &records {
            if r.timestamp < 0 {
                return Err(Error::NegativeTimestamp {
                    ordinal: r.ordinal,
                    timestamp: r.timestamp,
                });
            }
            if !seen.insert(r.ordinal) {
                return Err(Error::DuplicateOrdinal(r.ordinal));
            }
        }
        Ok(Self::from_records(Arc::new(users), Arc::new(items), records, role))
    }

    /// Keeps the given order as-is. The result may violate every log
    /// invariant; use it to feed `validate_log`.
    pub fn from_interactions_unchecked<I>(interactions: I, role: SubsetRole) -> Self
    where
        I: IntoIterator<Item = Interaction>,
    {
        let (users, items, records) = intern_all(interactions);
        let user_index = index_runs(&records);
        InteractionLog {
            users: Arc::new(users),
            items: Arc::new(items),
            records,
            user_index,
            role,
        }
    }

    pub(crate) fn from_records(
        users: Arc<Vocab>,
        items: Arc<Vocab>,
        mut records: Vec<Record>,
        role: SubsetRole,
    ) -> Self {
        if !records.windows(2).all(|w| w[0].key() < w[1].key()) {
            records.sort_unstable_by_key(Record::key);
        }
        let user_index = index_runs(&records);
        InteractionLog {
            users,
            items,
            records,
            user_index,
            role,
        }
    }

    /// A new log over the same vocabularies.
    pub(crate) fn derive(&self, records: Vec<Record>, role: SubsetRole) -> Self {
        Self::from_records(self.users.clone(), self.items.clone(), records, role)
    }

    /// An empty log sharing this log's vocabularies.
    pub fn empty_like(&self, role: SubsetRole) -> Self {
        self.derive(Vec::new(), role)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn role(&self) -> SubsetRole {
        self.role
    }

    pub fn with_role(mut self, role: SubsetRole) -> Self {
        self.role = role;
        self
    }

    pub fn n_users(&self) -> usize {
        self.user_index.len()
    }

    pub fn n_items(&self) -> usize {
        let mut seen = vec![false; self.items.len()];
        let mut n = 0;
        for r in &self.records {
            if !std::mem::replace(&mut seen[r.item as usize], true) {
                n += 1;
            }
        }
        n
    }

    /// Earliest and latest timestamp, if any.
    pub fn time_range(&self) -> Option<(Timestamp, Timestamp)> {
        let mut it = self.records.iter().map(|r| r.timestamp);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), t| (lo.min(t), hi.max(t))))
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = InteractionRef<'_>> + '_ {
        self.records.iter().map(move |r| self.view(r))
    }

    pub fn to_interactions(&self) -> Vec<Interaction> {
        self.iter().map(|i| i.to_owned()).collect()
    }

    /// User ids with their interactions, in canonical order.
    pub fn user_sequences(&self) -> impl Iterator<Item = (&str, Vec<InteractionRef<'_>>)> + '_ {
        self.user_index.iter().map(move |s| {
            (
                self.users.name(s.user),
                self.records[s.range()].iter().map(|r| self.view(r)).collect(),
            )
        })
    }

    pub(crate) fn records(&self) -> &[Record] {
        &self.records
    }

    pub(crate) fn user_slices(&self) -> &[UserSlice] {
        &self.user_index
    }

    /// Per-user record slices in canonical order.
    pub(crate) fn sequences(&self) -> impl Iterator<Item = (u32, &[Record])> + '_ {
        self.user_index.iter().map(move |s| (s.user, &self.records[s.range()]))
    }

    pub(crate) fn users_vocab(&self) -> &Arc<Vocab> {
        &self.users
    }

    pub(crate) fn items_vocab(&self) -> &Arc<Vocab> {
        &self.items
    }

    pub(crate) fn shares_vocab_with(&self, other: &InteractionLog) -> bool {
        Arc::ptr_eq(&self.users, &other.users) && Arc::ptr_eq(&self.items, &other.items)
    }

    /// Re-express this log over superset vocabularies. Order is preserved
    /// because the remapping is monotone.
    pub(crate) fn rebase(&self, users: &Arc<Vocab>, items: &Arc<Vocab>) -> InteractionLog {
        if Arc::ptr_eq(&self.users, users) && Arc::ptr_eq(&self.items, items) {
            return self.clone();
        }
        let umap = self.users.remap_into(users);
        let imap = self.items.remap_into(items);
        let records = self
            .records
            .iter()
            .map(|r| Record {
                user: umap[r.user as usize],
                item: imap[r.item as usize],
                ..*r
            })
            .collect::<Vec<_>>();
        let user_index = self
            .user_index
            .iter()
            .map(|s| UserSlice {
                user: umap[s.user as usize],
                ..s.clone()
            })
            .collect();
        InteractionLog {
            users: users.clone(),
            items: items.clone(),
            records,
            user_index,
            role: self.role,
        }
    }

    fn view<'a>(&'a self, r: &Record) -> InteractionRef<'a> {
        InteractionRef {
            user_id: self.users.name(r.user),
            item_id: self.items.name(r.item),
            timestamp: r.timestamp,
            ordinal: r.ordinal,
        }
    }
}

impl PartialEq for InteractionLog {
    fn eq(&self, other: &Self) -> bool {
        if self.role != other.role || self.records.len() != other.records.len() {
            return false;
        }
        if self.shares_vocab_with(other) {
            return self.records == other.records;
        }
        self.iter().eq(other.iter())
    }
}

impl Eq for InteractionLog {}

/// Put several logs onto one pair of vocabularies so their handles agree.
pub(crate) fn align(logs: &[&InteractionLog]) -> Vec<InteractionLog> {
    let Some(first) = logs.first() else {
        return Vec::new();
    };
    if logs.iter().all(|l| l.shares_vocab_with(first)) {
        return logs.iter().map(|l| (*l).clone()).collect();
    }
    let users = Arc::new(Vocab::merge(&logs.iter().map(|l| l.users.as_ref()).collect::<Vec<_>>()));
    let items = Arc::new(Vocab::merge(&logs.iter().map(|l| l.items.as_ref()).collect::<Vec<_>>()));
    logs.iter().map(|l| l.rebase(&users, &items)).collect()
}

fn intern_all<I>(interactions: I) -> (Vocab, Vocab, Vec<Record>)
where
    I: IntoIterator<Item = Interaction>,
{
    let mut users = Interner::default();
    let mut items = Interner::default();
    let mut records: Vec<Record> = interactions
        .into_iter()
        .map(|i| Record {
            user: users.intern(&i.user_id),
            item: items.intern(&i.item_id),
            timestamp: i.timestamp,
            ordinal: i.ordinal,
        })
        .collect();
    let (users, umap) = users.finish();
    let (items, imap) = items.finish();
    for r in &mut records {
        r.user = umap[r.user as usize];
        r.item = imap[r.item as usize];
    }
    (users, items, records)
}

/// One index entry per maximal run of equal users.
fn index_runs(records: &[Record]) -> Vec<UserSlice> {
    let mut out: Vec<UserSlice> = Vec::new();
    for (i, r) in records.iter().enumerate() {
        match out.last_mut() {
            Some(s) if s.user == r.user => s.end = i + 1,
            _ => out.push(UserSlice {
                user: r.user,
                start: i,
                end: i + 1,
            }),
        }
    }
    out
}
