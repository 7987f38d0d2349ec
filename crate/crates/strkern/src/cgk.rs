//! Random-walk embedding of strings into fixed-length Hamming space, and
//! recoding of the walked strings as 0.5-valued characteristic vectors so
//! Hamming distance becomes an exact L1 distance.

use crate::features::CharacteristicVector;
use crate::{seed, Error, Result};

/// Symbols of a walked string: a raw byte, or [`PAD`] once the input is
/// exhausted.
pub type CgkSymbol = u16;
pub const PAD: CgkSymbol = 256;

/// Seeded advancement table R[step][symbol] in {0,1}, evaluated lazily.
///
/// One instance must be shared by every string in a corpus: distances are
/// only meaningful between strings walked with the same table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CgkRandomness {
    seed: u64,
}

impl CgkRandomness {
    pub fn from_seed(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// R[step][symbol]: how far the input cursor moves after emitting
    /// `symbol` at output position `step`.
    pub fn advance(&self, step: usize, symbol: CgkSymbol) -> usize {
        let h = seed::mix64(
            self.seed
                ^ (step as u64).wrapping_mul(0x9e3779b97f4a7c15)
                ^ (u64::from(symbol) + 1).wrapping_mul(0xc2b2ae3d27d4eb4f),
        );
        (h & 1) as usize
    }
}

/// A walked string: exactly `L_out` symbols over bytes plus [`PAD`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CgkString {
    symbols: Vec<CgkSymbol>,
}

impl CgkString {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[CgkSymbol] {
        &self.symbols
    }

    /// Number of differing positions.
    pub fn hamming(&self, other: &CgkString) -> Result<u64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(self
            .symbols
            .iter()
            .zip(&other.symbols)
            .filter(|(a, b)| a != b)
            .count() as u64)
    }
}

/// Walk `s` into a string of exactly `l_out` symbols.
///
/// A cursor starts at the first input character; each output step emits
/// the character under the cursor (or [`PAD`] once past the end) and
/// advances the cursor by `rnd.advance(step, emitted)`.
pub fn cgk_embed(s: &[u8], rnd: &CgkRandomness, l_out: usize) -> Result<CgkString> {
    if s.len() > l_out {
        return Err(Error::InputTooLong {
            len: s.len(),
            limit: l_out,
        });
    }
    let mut symbols = Vec::with_capacity(l_out);
    let mut cursor = 0usize;
    for step in 0..l_out {
        if cursor < s.len() {
            let sym = CgkSymbol::from(s[cursor]);
            symbols.push(sym);
            cursor += rnd.advance(step, sym);
        } else {
            symbols.push(PAD);
        }
    }
    Ok(CgkString { symbols })
}

/// Recode a walked string as a sparse vector with one 0.5 entry per
/// position: position `j` holding symbol code `c` sets index
/// `j*(sigma+1) + c`, where codes order the alphabet bytes and the pad
/// takes the extra slot. Differing positions then contribute exactly 1 to
/// the L1 distance, so Hamming distance transfers to L1 unchanged.
pub fn cgk_characteristic_vector(
    s: &CgkString,
    alphabet: &[u8],
) -> Result<CharacteristicVector> {
    debug_assert!(alphabet.windows(2).all(|w| w[0] < w[1]), "sorted, deduped");
    let sigma = alphabet.len() as u64;
    let mut entries = Vec::with_capacity(s.len());
    for (j, &sym) in s.symbols.iter().enumerate() {
        let code = if sym == PAD {
            sigma
        } else {
            alphabet
                .binary_search(&(sym as u8))
                .map_err(|_| Error::UnknownSymbol(sym as u8))? as u64
        };
        entries.push((j as u64 * (sigma + 1) + code, 0.5));
    }
    CharacteristicVector::from_sorted(entries, s.len() as u64 * (sigma + 1))
}

/// Walk and recode a whole corpus against one shared table.
pub fn cgk_embed_corpus<S: AsRef<[u8]> + Sync>(
    strings: &[S],
    rnd: &CgkRandomness,
    l_out: usize,
    alphabet: &[u8],
) -> Result<Vec<CharacteristicVector>> {
    crate::par::map_slice(strings, |s| {
        cgk_characteristic_vector(&cgk_embed(s.as_ref(), rnd, l_out)?, alphabet)
    })
    .into_iter()
    .collect()
}

/// Sequential variant of [`cgk_embed_corpus`] with identical output.
pub fn cgk_embed_corpus_seq<S: AsRef<[u8]>>(
    strings: &[S],
    rnd: &CgkRandomness,
    l_out: usize,
    alphabet: &[u8],
) -> Result<Vec<CharacteristicVector>> {
    strings
        .iter()
        .map(|s| cgk_characteristic_vector(&cgk_embed(s.as_ref(), rnd, l_out)?, alphabet))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Table forced to a constant, for hand-walked expectations.
    struct Forced(usize);

    impl Forced {
        fn embed(&self, s: &[u8], l_out: usize) -> Vec<CgkSymbol> {
            let mut out = Vec::new();
            let mut cursor = 0;
            for _ in 0..l_out {
                if cursor < s.len() {
                    out.push(CgkSymbol::from(s[cursor]));
                    cursor += self.0;
                } else {
                    out.push(PAD);
                }
            }
            out
        }
    }

    #[test]
    fn empty_input_is_all_pads() {
        let rnd = CgkRandomness::from_seed(9);
        let out = cgk_embed(b"", &rnd, 5).unwrap();
        assert_eq!(out.symbols(), &[PAD; 5]);
    }

    #[test]
    fn forced_advancement_walks_straight_through() {
        // cursor moves every step: "AB" then pads
        let out = Forced(1).embed(b"AB", 4);
        assert_eq!(
            out,
            vec![CgkSymbol::from(b'A'), CgkSymbol::from(b'B'), PAD, PAD]
        );
    }

    #[test]
    fn embedding_is_deterministic_and_fixed_length() {
        let rnd = CgkRandomness::from_seed(123);
        let a = cgk_embed(b"ACGTACGT", &rnd, 24).unwrap();
        let b = cgk_embed(b"ACGTACGT", &rnd, 24).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 24);
        assert_eq!(a.hamming(&b).unwrap(), 0);
    }

    #[test]
    fn rejects_input_longer_than_output() {
        let rnd = CgkRandomness::from_seed(1);
        assert!(matches!(
            cgk_embed(b"ABCDEF", &rnd, 5),
            Err(Error::InputTooLong { len: 6, limit: 5 })
        ));
    }

    #[test]
    fn advance_is_binary_and_varies() {
        let rnd = CgkRandomness::from_seed(77);
        let mut seen = [false; 2];
        for step in 0..64 {
            for sym in [CgkSymbol::from(b'A'), PAD] {
                seen[rnd.advance(step, sym)] = true;
            }
        }
        assert!(seen[0] && seen[1], "table should not be constant");
    }

    #[test]
    fn recode_blocks_match_symbol_positions() {
        // alphabet {1,2,3}: symbol 1 -> first slot, 3 -> third, pad -> fourth
        let s = CgkString {
            symbols: vec![1, 3, PAD],
        };
        let v = cgk_characteristic_vector(&s, &[1, 2, 3]).unwrap();
        assert_eq!(v.entries(), &[(0, 0.5), (4 + 2, 0.5), (8 + 3, 0.5)]);
        assert_eq!(v.dim(), 12);
        assert_eq!(v.nnz(), 3);
    }

    #[test]
    fn hamming_equals_l1_of_recodings() {
        let rnd = CgkRandomness::from_seed(5);
        let alphabet = b"ACGT";
        let a = cgk_embed(b"ACGTGTCA", &rnd, 30).unwrap();
        let b = cgk_embed(b"ACTTGTAA", &rnd, 30).unwrap();
        let va = cgk_characteristic_vector(&a, alphabet).unwrap();
        let vb = cgk_characteristic_vector(&b, alphabet).unwrap();
        let l1 = crate::kernel::l1_distance(&va, &vb);
        assert_eq!(a.hamming(&b).unwrap() as f64, l1);
    }

    #[test]
    fn corpus_embedding_matches_sequential() {
        let rnd = CgkRandomness::from_seed(31);
        let strings = [b"ACGT".as_slice(), b"TTTT", b"A", b""];
        let par = cgk_embed_corpus(&strings, &rnd, 12, b"ACGT").unwrap();
        let seq = cgk_embed_corpus_seq(&strings, &rnd, 12, b"ACGT").unwrap();
        assert_eq!(par, seq);
    }
}
