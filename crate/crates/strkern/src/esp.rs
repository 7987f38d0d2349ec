//! Edit-sensitive parsing: balanced 2/3-ary parse trees over a shared
//! label dictionary, built so that strings with small edit distance with
//! moves get trees whose label-count vectors are close in L1.
//!
//! Each level of a tree is a label sequence. A level is split into spans:
//! runs of equal labels and short mixed stretches are paired left to right
//! (`lpp_parse`), while long repetition-free stretches are cut at
//! landmarks chosen from an alphabet-reduced copy of the stretch
//! (`alphabet_reduction` + `select_landmarks`). Landmark positions depend
//! only on a bounded neighborhood, so a substring shared by two strings is
//! mostly cut the same way in both; that locality is what keeps the L1
//! distance between count vectors tied to the edit distance.
//!
//! The dictionary maps (arity, children) signatures to dense integer
//! labels and is shared across a corpus; building trees mutates it and is
//! single-writer by design. Everything downstream of a frozen dictionary
//! is pure.

use crate::features::CharacteristicVector;
use crate::{Error, Result};
use std::collections::HashMap;
use std::ops::Range;

pub type Label = u32;

// ============================================================================
// Label dictionary
// ============================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct NodeSig {
    arity: u8,
    // children[2] is 0 for arity-2 nodes; arity disambiguates.
    children: [Label; 3],
}

/// Bijection between parse-node signatures and dense label ids.
///
/// Leaf symbols occupy ids `[0, alphabet_len())` in sorted byte order and
/// are never reassigned; internal nodes get ids in first-seen order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDictionary {
    alphabet: Vec<u8>,
    leaf_of: [Label; 256],
    nodes: Vec<NodeSig>,
    index: HashMap<NodeSig, Label>,
}

const NO_LEAF: Label = Label::MAX;

impl LabelDictionary {
    pub fn new<I: IntoIterator<Item = u8>>(alphabet: I) -> Self {
        let mut alphabet: Vec<u8> = alphabet.into_iter().collect();
        alphabet.sort_unstable();
        alphabet.dedup();
        let mut leaf_of = [NO_LEAF; 256];
        for (id, &b) in alphabet.iter().enumerate() {
            leaf_of[b as usize] = id as Label;
        }
        Self {
            alphabet,
            leaf_of,
            nodes: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet.len()
    }

    /// Total number of assigned labels (leaves plus internal nodes).
    pub fn len(&self) -> usize {
        self.alphabet.len() + self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn leaf(&self, symbol: u8) -> Result<Label> {
        let id = self.leaf_of[symbol as usize];
        if id == NO_LEAF {
            return Err(Error::UnknownSymbol(symbol));
        }
        Ok(id)
    }

    /// Children of an internal node, `None` for leaves and unknown ids.
    pub fn children(&self, id: Label) -> Option<&[Label]> {
        let k = (id as usize).checked_sub(self.alphabet.len())?;
        let sig = self.nodes.get(k)?;
        Some(&sig.children[..sig.arity as usize])
    }

    pub fn pair(&mut self, a: Label, b: Label) -> Label {
        self.intern(NodeSig {
            arity: 2,
            children: [a, b, 0],
        })
    }

    pub fn triple(&mut self, a: Label, b: Label, c: Label) -> Label {
        self.intern(NodeSig {
            arity: 3,
            children: [a, b, c],
        })
    }

    fn intern(&mut self, sig: NodeSig) -> Label {
        let next = self.len() as Label;
        debug_assert!(sig.children[..sig.arity as usize].iter().all(|&c| c < next));
        *self.index.entry(sig).or_insert_with(|| {
            self.nodes.push(sig);
            next
        })
    }
}

// ============================================================================
// Span categorization
// ============================================================================

/// Span kinds within one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanCategory {
    /// No two adjacent labels equal, length >= 5.
    Distinct,
    /// All labels equal, length >= 5.
    Repeat,
    /// Everything else.
    Mixed,
}

/// Partition `seq` into ordered, maximal spans.
///
/// Equal runs of length >= 5 are claimed first, so a position that could
/// either end a repetition-free stretch or start a long run always goes to
/// the run.
pub fn categorize(seq: &[Label]) -> Vec<(SpanCategory, Range<usize>)> {
    let n = seq.len();
    let mut long_run = vec![false; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && seq[j] == seq[i] {
            j += 1;
        }
        if j - i >= 5 {
            long_run[i..j].iter_mut().for_each(|p| *p = true);
        }
        i = j;
    }

    let mut spans = Vec::new();
    let mut mixed_start: Option<usize> = None;
    let flush = |mixed_start: &mut Option<usize>, end: usize, spans: &mut Vec<_>| {
        if let Some(s) = mixed_start.take() {
            spans.push((SpanCategory::Mixed, s..end));
        }
    };

    let mut i = 0;
    while i < n {
        if long_run[i] {
            flush(&mut mixed_start, i, &mut spans);
            let mut j = i + 1;
            while j < n && seq[j] == seq[i] {
                j += 1;
            }
            spans.push((SpanCategory::Repeat, i..j));
            i = j;
            continue;
        }
        // repetition-free stretch, stopping before any long run
        let mut w = i + 1;
        while w < n && !long_run[w] && seq[w] != seq[w - 1] {
            w += 1;
        }
        if w - i >= 5 {
            flush(&mut mixed_start, i, &mut spans);
            spans.push((SpanCategory::Distinct, i..w));
        } else if mixed_start.is_none() {
            mixed_start = Some(i);
        }
        i = w;
    }
    flush(&mut mixed_start, n, &mut spans);
    spans
}

// ============================================================================
// Pairing and reduction primitives
// ============================================================================

/// Pair labels left to right; odd lengths end in one triple.
///
/// Even n: n/2 pairs. Odd n: (n-3)/2 pairs, then a triple over the final
/// three labels.
pub fn lpp_parse(seq: &[Label], dict: &mut LabelDictionary) -> Result<Vec<Label>> {
    let n = seq.len();
    if n < 2 {
        return Err(Error::TooShort(n));
    }
    let mut out = Vec::with_capacity(n / 2);
    let pairs = if n % 2 == 0 { n / 2 } else { (n - 3) / 2 };
    for k in 0..pairs {
        out.push(dict.pair(seq[2 * k], seq[2 * k + 1]));
    }
    if n % 2 == 1 {
        out.push(dict.triple(seq[n - 3], seq[n - 2], seq[n - 1]));
    }
    Ok(out)
}

/// Label for a position from its left neighbor: twice the index of the
/// least-significant differing bit, plus this position's bit there.
fn reduction_label(prev: u64, cur: u64) -> u64 {
    debug_assert_ne!(prev, cur);
    let p = (prev ^ cur).trailing_zeros() as u64;
    2 * p + ((cur >> p) & 1)
}

/// Shrink a repetition-free sequence to the alphabet {0,1,2}.
///
/// Each pass relabels every position that has a left neighbor and drops
/// the leading position, preserving the no-adjacent-equal property; passes
/// repeat until all values are <= 5, then 3, 4 and 5 are eliminated in
/// that order by the least value in {0,1,2} differing from both current
/// neighbors. The output is `k` shorter than the input, where `k` is the
/// number of passes; callers account for the dropped prefix when mapping
/// positions back.
pub fn alphabet_reduction(seq: &[Label]) -> Result<Vec<u8>> {
    if seq.len() < 2 {
        return Err(Error::TooShort(seq.len()));
    }
    if let Some(i) = (1..seq.len()).find(|&i| seq[i] == seq[i - 1]) {
        return Err(Error::AdjacentEqual(i));
    }

    let mut cur: Vec<u64> = seq.iter().map(|&l| u64::from(l)).collect();
    let mut rounds = 0;
    while cur.iter().max().copied().unwrap_or(0) > 5 {
        if cur.len() == 1 {
            // no left context remains; squash into range
            cur[0] %= 3;
            break;
        }
        rounds += 1;
        if rounds > 64 {
            return Err(Error::ReductionDiverged);
        }
        cur = (1..cur.len())
            .map(|i| reduction_label(cur[i - 1], cur[i]))
            .collect();
    }

    for target in [3u64, 4, 5] {
        for i in 0..cur.len() {
            if cur[i] == target {
                let left = i.checked_sub(1).map(|k| cur[k]);
                let right = cur.get(i + 1).copied();
                cur[i] = (0..3)
                    .find(|&v| Some(v) != left && Some(v) != right)
                    .expect("three candidates, at most two neighbors");
            }
        }
    }

    debug_assert!(cur.iter().all(|&v| v <= 2));
    debug_assert!((1..cur.len()).all(|i| cur[i] != cur[i - 1]));
    Ok(cur.into_iter().map(|v| v as u8).collect())
}

/// Landmark positions in a {0,1,2} sequence with no equal neighbors.
///
/// All interior local maxima are selected first; then interior local
/// minima are scanned left to right and selected unless adjacent to an
/// already chosen landmark. Successive landmarks end up 2 or 3 apart.
pub fn select_landmarks(seq: &[u8]) -> Vec<usize> {
    let n = seq.len();
    if n < 3 {
        return Vec::new();
    }
    let mut chosen = vec![false; n];
    for i in 1..n - 1 {
        if seq[i - 1] < seq[i] && seq[i] > seq[i + 1] {
            chosen[i] = true;
        }
    }
    for i in 1..n - 1 {
        if seq[i - 1] > seq[i] && seq[i] < seq[i + 1] && !chosen[i - 1] && !chosen[i + 1] {
            chosen[i] = true;
        }
    }
    chosen
        .iter()
        .enumerate()
        .filter_map(|(i, &c)| c.then_some(i))
        .collect()
}

// ============================================================================
// One parsing round
// ============================================================================

enum JobKind {
    Lpp,
    // core = the repetition-free span; the job range may additionally
    // carry an attached leftover label on either side.
    Landmark { core: Range<usize> },
}

struct Job {
    kind: JobKind,
    range: Range<usize>,
}

/// Parse one level into the next: every label joins exactly one block of
/// 2 or 3, so the output length is within [ceil(n/3), floor(n/2)].
pub fn esp_parse_level(seq: &[Label], dict: &mut LabelDictionary) -> Result<Vec<Label>> {
    let n = seq.len();
    if n < 2 {
        return Err(Error::TooShort(n));
    }

    let spans = categorize(seq);
    let mut jobs: Vec<Job> = Vec::with_capacity(spans.len());
    // A length-1 Mixed span cannot form a block on its own: attach it to
    // the following span when one exists, otherwise to the preceding job.
    let mut pending: Option<usize> = None;
    for (k, (cat, span)) in spans.iter().enumerate() {
        if *cat == SpanCategory::Mixed && span.len() == 1 {
            if k + 1 < spans.len() {
                pending = Some(span.start);
            } else {
                let last = jobs.last_mut().expect("level of length >= 2");
                last.range.end = span.end;
            }
            continue;
        }
        let start = pending.take().unwrap_or(span.start);
        let kind = match cat {
            SpanCategory::Distinct => JobKind::Landmark { core: span.clone() },
            _ => JobKind::Lpp,
        };
        jobs.push(Job {
            kind,
            range: start..span.end,
        });
    }
    debug_assert!(pending.is_none());
    debug_assert_eq!(jobs.first().map(|j| j.range.start), Some(0));
    debug_assert_eq!(jobs.last().map(|j| j.range.end), Some(n));

    let mut out = Vec::with_capacity(n / 2 + 1);
    for job in jobs {
        match job.kind {
            JobKind::Lpp => out.extend(lpp_parse(&seq[job.range], dict)?),
            JobKind::Landmark { core } => {
                parse_distinct_span(seq, core, job.range, dict, &mut out)?
            }
        }
    }
    Ok(out)
}

/// Cut a repetition-free span into blocks at landmark midpoints.
///
/// `core` is the span itself; `full` adds any attached leftover labels,
/// which only widen the first and last blocks. Reduction shortens the span
/// by its dropped prefix `k`; the prefix is folded into the first block.
fn parse_distinct_span(
    seq: &[Label],
    core: Range<usize>,
    full: Range<usize>,
    dict: &mut LabelDictionary,
    out: &mut Vec<Label>,
) -> Result<()> {
    debug_assert!(full.start <= core.start && core.end <= full.end);
    let reduced = alphabet_reduction(&seq[core.clone()])?;
    let k = core.len() - reduced.len();
    let landmarks = select_landmarks(&reduced);

    // Too little structure to place interior cuts: the whole range is one
    // run of pairs (and possibly a final triple).
    if reduced.len() < 5 || landmarks.len() < 2 {
        out.extend(lpp_parse(&seq[full], dict)?);
        return Ok(());
    }

    let mut bounds = Vec::with_capacity(landmarks.len() + 1);
    bounds.push(full.start);
    for w in landmarks.windows(2) {
        // midpoint in reduced coordinates; +k aligns to the original span
        bounds.push(core.start + k + (w[0] + w[1]) / 2 + 1);
    }
    bounds.push(full.end);
    debug_assert!(bounds.windows(2).all(|b| b[1] - b[0] >= 2));

    for b in bounds.windows(2) {
        out.extend(lpp_parse(&seq[b[0]..b[1]], dict)?);
    }
    Ok(())
}

// ============================================================================
// Trees and characteristic vectors
// ============================================================================

/// Parse tree stored as its per-level label sequences; level 0 is the
/// input string as leaf labels, the last level is the single root.
#[derive(Debug, Clone, PartialEq)]
pub struct EspTree {
    levels: Vec<Vec<Label>>,
}

impl EspTree {
    pub fn levels(&self) -> &[Vec<Label>] {
        &self.levels
    }

    /// Number of parsing rounds; 0 for a single-character string.
    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn root(&self) -> Label {
        self.levels.last().expect("nonempty tree")[0]
    }

    /// Total number of nodes across all levels, leaves included.
    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }
}

/// Parse `s` bottom-up until a single root remains, recording every level.
pub fn build_esp_tree(s: &[u8], dict: &mut LabelDictionary) -> Result<EspTree> {
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    let level0 = s.iter().map(|&b| dict.leaf(b)).collect::<Result<Vec<_>>>()?;
    let mut levels = vec![level0];
    while levels.last().unwrap().len() > 1 {
        let next = esp_parse_level(levels.last().unwrap(), dict)?;
        debug_assert!(next.len() < levels.last().unwrap().len());
        levels.push(next);
    }
    Ok(EspTree { levels })
}

/// Count every label over all levels of `tree`, leaves and root included.
pub fn characteristic_vector(tree: &EspTree, dict: &LabelDictionary) -> CharacteristicVector {
    let ids = tree
        .levels
        .iter()
        .flat_map(|level| level.iter().map(|&l| u64::from(l)));
    CharacteristicVector::from_counts(ids, dict.len() as u64)
        .expect("tree labels are within the dictionary")
}

/// Embed a corpus: build each tree in input order against the shared
/// dictionary (single writer), then emit vectors sized to the final
/// dictionary so the whole corpus shares one feature space.
pub fn embed_corpus<S: AsRef<[u8]>>(
    strings: &[S],
    dict: &mut LabelDictionary,
) -> Result<Vec<CharacteristicVector>> {
    let mut trees = Vec::with_capacity(strings.len());
    for s in strings {
        trees.push(build_esp_tree(s.as_ref(), dict)?);
    }
    let dim = dict.len() as u64;
    Ok(crate::par::map_slice(&trees, |tree| {
        let ids = tree
            .levels
            .iter()
            .flat_map(|level| level.iter().map(|&l| u64::from(l)));
        CharacteristicVector::from_counts(ids, dim).expect("tree labels are within the dictionary")
    }))
}
