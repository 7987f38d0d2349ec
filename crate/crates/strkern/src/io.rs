//! Readers and writers for every artifact the pipeline persists:
//! sparse characteristic vectors, dense feature vectors, parse
//! dictionaries, projector seeds, random-walk parameters, Gram matrices,
//! linear models, and the error-report CSV.
//!
//! Text formats print floats with `Display`, which emits the shortest
//! string that parses back to the same bits, so write-read round-trips
//! are exact. Binary formats are little-endian with a 4-byte magic and a
//! u32 version.

use crate::classify::LinearModel;
use crate::esp::LabelDictionary;
use crate::features::CharacteristicVector;
use crate::kernel::GramMatrix;
use crate::sfm::{HashSeeds, RffVector};
use crate::{Error, Result};
use std::io::{BufRead, Read, Write};

const DICT_MAGIC: &[u8; 4] = b"ESPD";
const SEEDS_MAGIC: &[u8; 4] = b"SFMS";
const CGK_MAGIC: &[u8; 4] = b"CGKR";
const VERSION: u32 = 1;

/// Header line of the error-report CSV.
pub const ERROR_CSV_HEADER: &str = "method,D,beta,mean_error,std_error";

// ============================================================================
// Sparse characteristic vectors (text)
// ============================================================================

/// One line per vector: `label idx:val ...` with indices 1-based and
/// strictly ascending.
pub fn write_sparse(
    w: &mut impl Write,
    vectors: &[CharacteristicVector],
    labels: &[u8],
) -> Result<()> {
    if vectors.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: vectors.len(),
            got: labels.len(),
        });
    }
    for (v, label) in vectors.iter().zip(labels) {
        write!(w, "{label}")?;
        for &(idx, val) in v.entries() {
            write!(w, " {}:{}", idx + 1, val)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Inverse of [`write_sparse`]. The shared dimension is the largest index
/// seen anywhere in the file.
pub fn read_sparse(r: &mut impl BufRead) -> Result<(Vec<CharacteristicVector>, Vec<u8>)> {
    let mut rows: Vec<(u8, Vec<(u64, f64)>)> = Vec::new();
    let mut dim = 0u64;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let parse = |msg: String| Error::Parse { line: lineno, msg };
        let mut fields = line.split(' ');
        let label: u8 = fields
            .next()
            .unwrap()
            .parse()
            .map_err(|e| parse(format!("bad label: {e}")))?;
        let mut entries = Vec::new();
        for field in fields {
            let (idx, val) = field
                .split_once(':')
                .ok_or_else(|| parse(format!("expected idx:val, got {field:?}")))?;
            let idx: u64 = idx
                .parse()
                .map_err(|e| parse(format!("bad index: {e}")))?;
            if idx == 0 {
                return Err(parse("indices are 1-based".into()));
            }
            let val: f64 = val
                .parse()
                .map_err(|e| parse(format!("bad value: {e}")))?;
            entries.push((idx - 1, val));
            dim = dim.max(idx);
        }
        rows.push((label, entries));
    }
    let mut vectors = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for (label, entries) in rows {
        vectors.push(CharacteristicVector::from_sorted(entries, dim)?);
        labels.push(label);
    }
    Ok((vectors, labels))
}

// ============================================================================
// Dense feature vectors (text)
// ============================================================================

/// One line per vector: `label v1 v2 ... vD`.
pub fn write_dense(w: &mut impl Write, zs: &[RffVector], labels: &[u8]) -> Result<()> {
    if zs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: zs.len(),
            got: labels.len(),
        });
    }
    for (z, label) in zs.iter().zip(labels) {
        write!(w, "{label}")?;
        for v in z.values() {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Inverse of [`write_dense`]; all rows must share one dimension.
pub fn read_dense(r: &mut impl BufRead) -> Result<(Vec<RffVector>, Vec<u8>)> {
    let mut zs: Vec<RffVector> = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let parse = |msg: String| Error::Parse { line: lineno, msg };
        let mut fields = line.split(' ');
        let label: u8 = fields
            .next()
            .unwrap()
            .parse()
            .map_err(|e| parse(format!("bad label: {e}")))?;
        let values = fields
            .map(|f| f.parse::<f64>().map_err(|e| parse(format!("bad value: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = zs.first() {
            if values.len() != first.dim() {
                return Err(parse(format!(
                    "row has {} values, expected {}",
                    values.len(),
                    first.dim()
                )));
            }
        }
        zs.push(RffVector::from_values(values)?);
        labels.push(label);
    }
    Ok((zs, labels))
}

// ============================================================================
// Binary helpers
// ============================================================================

fn bad(what: &'static str, detail: impl Into<String>) -> Error {
    Error::FileFormat {
        what,
        detail: detail.into(),
    }
}

fn read_chunk<const N: usize>(r: &mut impl Read, what: &'static str) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|_| bad(what, "truncated file"))?;
    Ok(buf)
}

fn read_u32(r: &mut impl Read, what: &'static str) -> Result<u32> {
    Ok(u32::from_le_bytes(read_chunk(r, what)?))
}

fn read_u64(r: &mut impl Read, what: &'static str) -> Result<u64> {
    Ok(u64::from_le_bytes(read_chunk(r, what)?))
}

fn read_f64(r: &mut impl Read, what: &'static str) -> Result<f64> {
    Ok(f64::from_le_bytes(read_chunk(r, what)?))
}

fn expect_header(r: &mut impl Read, magic: &[u8; 4], what: &'static str) -> Result<()> {
    let got: [u8; 4] = read_chunk(r, what)?;
    if &got != magic {
        return Err(bad(what, format!("bad magic {got:?}")));
    }
    let ver = read_u32(r, what)?;
    if ver != VERSION {
        return Err(bad(what, format!("unsupported version {ver}")));
    }
    Ok(())
}

// ============================================================================
// Parse dictionary (binary)
// ============================================================================

/// Layout: magic, version, alphabet length + bytes, node count, then per
/// node in id order its arity and child ids.
pub fn write_dictionary(w: &mut impl Write, dict: &LabelDictionary) -> Result<()> {
    w.write_all(DICT_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    let alpha = dict.alphabet();
    w.write_all(&(alpha.len() as u32).to_le_bytes())?;
    w.write_all(alpha)?;
    let node_count = dict.len() - dict.alphabet_len();
    w.write_all(&(node_count as u64).to_le_bytes())?;
    for id in dict.alphabet_len()..dict.len() {
        let children = dict.children(id as u32).expect("internal node");
        w.write_all(&[children.len() as u8])?;
        for &c in children {
            w.write_all(&c.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Inverse of [`write_dictionary`]: nodes are re-interned in id order, so
/// the rebuilt dictionary assigns identical labels.
pub fn read_dictionary(r: &mut impl Read) -> Result<LabelDictionary> {
    const WHAT: &str = "dictionary";
    expect_header(r, DICT_MAGIC, WHAT)?;
    let alpha_len = read_u32(r, WHAT)? as usize;
    let mut alpha = vec![0u8; alpha_len];
    r.read_exact(&mut alpha).map_err(|_| bad(WHAT, "truncated alphabet"))?;
    if !alpha.windows(2).all(|w| w[0] < w[1]) {
        return Err(bad(WHAT, "alphabet not strictly ascending"));
    }
    let mut dict = LabelDictionary::new(alpha);
    let node_count = read_u64(r, WHAT)?;
    for k in 0..node_count {
        let expected_id = (alpha_len as u64 + k) as u32;
        let [arity] = read_chunk::<1>(r, WHAT)?;
        let mut kids = [0u32; 3];
        for kid in kids.iter_mut().take(arity as usize) {
            *kid = read_u32(r, WHAT)?;
            if *kid >= expected_id {
                return Err(bad(WHAT, format!("node {expected_id} references child {kid}")));
            }
        }
        let id = match arity {
            2 => dict.pair(kids[0], kids[1]),
            3 => dict.triple(kids[0], kids[1], kids[2]),
            a => return Err(bad(WHAT, format!("arity {a} is not 2 or 3"))),
        };
        if id != expected_id {
            return Err(bad(WHAT, format!("duplicate node at id {expected_id}")));
        }
    }
    Ok(dict)
}

// ============================================================================
// Projector seeds (binary)
// ============================================================================

/// Layout: magic, version, d, beta, then the two u64 seed arrays.
pub fn write_seeds(w: &mut impl Write, seeds: &HashSeeds) -> Result<()> {
    w.write_all(SEEDS_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(seeds.d() as u64).to_le_bytes())?;
    w.write_all(&seeds.beta().to_le_bytes())?;
    let (a1, a2) = seeds.arrays();
    for arr in [a1, a2] {
        for &x in arr {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Inverse of [`write_seeds`].
pub fn read_seeds(r: &mut impl Read) -> Result<HashSeeds> {
    const WHAT: &str = "seeds";
    expect_header(r, SEEDS_MAGIC, WHAT)?;
    let d = read_u64(r, WHAT)? as usize;
    let beta = read_f64(r, WHAT)?;
    let mut arrays = [Vec::with_capacity(d), Vec::with_capacity(d)];
    for arr in &mut arrays {
        for _ in 0..d {
            arr.push(read_u64(r, WHAT)?);
        }
    }
    let [a1, a2] = arrays;
    HashSeeds::from_parts(a1, a2, beta)
}

// ============================================================================
// Random-walk parameters (binary)
// ============================================================================

/// Everything needed to redo a random-walk embedding: the walk seed, the
/// output length, and the alphabet the codes were ranked against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CgkParams {
    pub seed: u64,
    pub l_out: usize,
    pub alphabet: Vec<u8>,
}

/// Layout: magic, version, seed, l_out, alphabet length + bytes.
pub fn write_cgk_params(w: &mut impl Write, params: &CgkParams) -> Result<()> {
    w.write_all(CGK_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&params.seed.to_le_bytes())?;
    w.write_all(&(params.l_out as u64).to_le_bytes())?;
    w.write_all(&(params.alphabet.len() as u32).to_le_bytes())?;
    w.write_all(&params.alphabet)?;
    Ok(())
}

/// Inverse of [`write_cgk_params`].
pub fn read_cgk_params(r: &mut impl Read) -> Result<CgkParams> {
    const WHAT: &str = "walk parameters";
    expect_header(r, CGK_MAGIC, WHAT)?;
    let seed = read_u64(r, WHAT)?;
    let l_out = read_u64(r, WHAT)? as usize;
    let alpha_len = read_u32(r, WHAT)? as usize;
    let mut alphabet = vec![0u8; alpha_len];
    r.read_exact(&mut alphabet)
        .map_err(|_| bad(WHAT, "truncated alphabet"))?;
    if !alphabet.windows(2).all(|w| w[0] < w[1]) {
        return Err(bad(WHAT, "alphabet not strictly ascending"));
    }
    Ok(CgkParams {
        seed,
        l_out,
        alphabet,
    })
}

// ============================================================================
// Gram matrix (text)
// ============================================================================

/// Line 1 is N; each following line is one row of space-separated values.
pub fn write_gram(w: &mut impl Write, gram: &GramMatrix) -> Result<()> {
    writeln!(w, "{}", gram.n())?;
    for row in gram.rows() {
        let mut first = true;
        for v in row {
            if first {
                write!(w, "{v}")?;
                first = false;
            } else {
                write!(w, " {v}")?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Inverse of [`write_gram`]; returns the order and the row-major data
/// (bandwidth and provenance are not stored in the file).
pub fn read_gram(r: &mut impl BufRead) -> Result<(usize, Vec<f64>)> {
    let mut lines = r.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| bad("gram", "empty file"))?;
    let n: usize = first?
        .trim()
        .parse()
        .map_err(|e| Error::Parse {
            line: 1,
            msg: format!("bad matrix order: {e}"),
        })?;
    let mut data = Vec::with_capacity(n * n);
    for (lineno, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let start = data.len();
        for field in line.split(' ') {
            data.push(field.parse::<f64>().map_err(|e| Error::Parse {
                line: lineno + 1,
                msg: format!("bad entry: {e}"),
            })?);
        }
        if data.len() - start != n {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("row has {} entries, expected {n}", data.len() - start),
            });
        }
    }
    if data.len() != n * n {
        return Err(bad("gram", format!("{} rows for order {n}", data.len() / n.max(1))));
    }
    Ok((n, data))
}

// ============================================================================
// Linear model (text)
// ============================================================================

/// Line 1: dimension. Line 2: bias. Line 3: weights, space-separated.
pub fn write_model(w: &mut impl Write, model: &LinearModel) -> Result<()> {
    writeln!(w, "{}", model.dim())?;
    writeln!(w, "{}", model.bias())?;
    let mut first = true;
    for v in model.weights() {
        if first {
            write!(w, "{v}")?;
            first = false;
        } else {
            write!(w, " {v}")?;
        }
    }
    writeln!(w)?;
    Ok(())
}

/// Inverse of [`write_model`].
pub fn read_model(r: &mut impl BufRead) -> Result<LinearModel> {
    let mut lines = r.lines();
    let mut next = |line: usize| -> Result<String> {
        lines
            .next()
            .ok_or_else(|| bad("model", "truncated file"))?
            .map_err(Error::from)
            .and_then(|s| {
                if s.is_empty() {
                    Err(Error::Parse {
                        line,
                        msg: "empty line".into(),
                    })
                } else {
                    Ok(s)
                }
            })
    };
    let d: usize = next(1)?.parse().map_err(|e| Error::Parse {
        line: 1,
        msg: format!("bad dimension: {e}"),
    })?;
    let bias: f64 = next(2)?.parse().map_err(|e| Error::Parse {
        line: 2,
        msg: format!("bad bias: {e}"),
    })?;
    let weights = next(3)?
        .split(' ')
        .map(|f| {
            f.parse::<f64>().map_err(|e| Error::Parse {
                line: 3,
                msg: format!("bad weight: {e}"),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    if weights.len() != d {
        return Err(Error::Parse {
            line: 3,
            msg: format!("{} weights for dimension {d}", weights.len()),
        });
    }
    LinearModel::from_parts(weights, bias)
}

// ============================================================================
// Error-report CSV
// ============================================================================

/// Append one `method,D,beta,mean_error,std_error` row.
pub fn write_error_csv_row(
    w: &mut impl Write,
    method: &str,
    d_out: usize,
    beta: f64,
    mean_error: f64,
    std_error: f64,
) -> Result<()> {
    writeln!(w, "{method},{d_out},{beta},{mean_error},{std_error}")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{exact_gram, GramSource};
    use crate::sfm;

    fn cv(entries: Vec<(u64, f64)>, dim: u64) -> CharacteristicVector {
        CharacteristicVector::from_sorted(entries, dim).unwrap()
    }

    #[test]
    fn sparse_round_trip_preserves_everything() {
        let vectors = vec![
            cv(vec![(0, 2.0), (4, 0.5)], 6),
            cv(vec![], 6),
            cv(vec![(5, 123456789.000001)], 6),
        ];
        let labels = vec![1, 0, 1];
        let mut buf = Vec::new();
        write_sparse(&mut buf, &vectors, &labels).unwrap();
        let (rv, rl) = read_sparse(&mut buf.as_slice()).unwrap();
        assert_eq!(rl, labels);
        assert_eq!(rv.len(), 3);
        for (a, b) in vectors.iter().zip(&rv) {
            assert_eq!(a.entries(), b.entries());
            assert_eq!(b.dim(), 6); // max index seen
        }
    }

    #[test]
    fn sparse_indices_are_one_based_on_disk() {
        let vectors = vec![cv(vec![(0, 3.0)], 1)];
        let mut buf = Vec::new();
        write_sparse(&mut buf, &vectors, &[1]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1 1:3\n");
        assert!(matches!(
            read_sparse(&mut "1 0:3\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn sparse_rejects_malformed_fields() {
        assert!(matches!(
            read_sparse(&mut "x 1:3\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_sparse(&mut "1 nonsense\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn dense_round_trip_is_bit_exact() {
        let seeds = HashSeeds::generate(4, 1.0, 17).unwrap();
        let vectors = vec![cv(vec![(1, 3.0)], 4), cv(vec![(0, 1.0), (3, 2.0)], 4)];
        let zs = sfm::project_corpus(&vectors, 6, &seeds).unwrap();
        let mut buf = Vec::new();
        write_dense(&mut buf, &zs, &[0, 1]).unwrap();
        let (rz, rl) = read_dense(&mut buf.as_slice()).unwrap();
        assert_eq!(rl, vec![0, 1]);
        assert_eq!(rz, zs);
    }

    #[test]
    fn dense_rejects_ragged_rows() {
        let text = "0 0.5 0.5\n1 0.5\n";
        assert!(matches!(
            read_dense(&mut text.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn dictionary_round_trip_reassigns_identical_labels() {
        let mut dict = LabelDictionary::new(b"AB".to_vec());
        let trees: Vec<_> = ["ABAB", "BBBBBBA", "ABBA"]
            .iter()
            .map(|s| crate::esp::build_esp_tree(s.as_bytes(), &mut dict).unwrap())
            .collect();
        let mut buf = Vec::new();
        write_dictionary(&mut buf, &dict).unwrap();
        let rebuilt = read_dictionary(&mut buf.as_slice()).unwrap();
        assert_eq!(rebuilt.len(), dict.len());
        assert_eq!(rebuilt.alphabet(), dict.alphabet());
        for id in rebuilt.alphabet_len()..rebuilt.len() {
            assert_eq!(rebuilt.children(id as u32), dict.children(id as u32));
        }
        // a tree rebuilt against the reloaded dictionary allocates nothing
        let before = rebuilt.len();
        let mut rebuilt = rebuilt;
        for (s, tree) in ["ABAB", "BBBBBBA", "ABBA"].iter().zip(&trees) {
            let again = crate::esp::build_esp_tree(s.as_bytes(), &mut rebuilt).unwrap();
            assert_eq!(again.root(), tree.root());
        }
        assert_eq!(rebuilt.len(), before);
    }

    #[test]
    fn dictionary_rejects_corruption() {
        let mut dict = LabelDictionary::new(b"AB".to_vec());
        crate::esp::build_esp_tree(b"ABAB", &mut dict).unwrap();
        let mut buf = Vec::new();
        write_dictionary(&mut buf, &dict).unwrap();

        let mut wrong_magic = buf.clone();
        wrong_magic[0] = b'X';
        assert!(matches!(
            read_dictionary(&mut wrong_magic.as_slice()),
            Err(Error::FileFormat { .. })
        ));

        let mut truncated = buf.clone();
        truncated.truncate(buf.len() - 3);
        assert!(matches!(
            read_dictionary(&mut truncated.as_slice()),
            Err(Error::FileFormat { .. })
        ));
    }

    #[test]
    fn seeds_round_trip() {
        let seeds = HashSeeds::generate(7, 42.5, 3).unwrap();
        let mut buf = Vec::new();
        write_seeds(&mut buf, &seeds).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 8 + 8 + 7 * 16);
        let back = read_seeds(&mut buf.as_slice()).unwrap();
        assert_eq!(back, seeds);
    }

    #[test]
    fn cgk_params_round_trip() {
        let params = CgkParams {
            seed: 99,
            l_out: 300,
            alphabet: b"ACGT".to_vec(),
        };
        let mut buf = Vec::new();
        write_cgk_params(&mut buf, &params).unwrap();
        assert_eq!(read_cgk_params(&mut buf.as_slice()).unwrap(), params);
    }

    #[test]
    fn gram_round_trip() {
        let vectors = vec![cv(vec![(0, 1.0)], 2), cv(vec![(1, 2.0)], 2)];
        let gram = exact_gram(&vectors, 1.5).unwrap();
        let mut buf = Vec::new();
        write_gram(&mut buf, &gram).unwrap();
        let (n, data) = read_gram(&mut buf.as_slice()).unwrap();
        let back = GramMatrix::from_data(n, 1.5, GramSource::Exact, data).unwrap();
        assert_eq!(back, gram);
    }

    #[test]
    fn model_round_trip() {
        let model = LinearModel::from_parts(vec![0.25, -1.5, 3.0000000001], 0.125).unwrap();
        let mut buf = Vec::new();
        write_model(&mut buf, &model).unwrap();
        let back = read_model(&mut buf.as_slice()).unwrap();
        assert_eq!(back.weights(), model.weights());
        assert_eq!(back.bias(), model.bias());
        assert!(matches!(
            read_model(&mut "2\n0.5\n1.0\n".as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn error_csv_row_shape() {
        let mut buf = Vec::new();
        write_error_csv_row(&mut buf, "sfm", 128, 1.0, 0.0705, 0.005).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "sfm,128,1,0.0705,0.005\n"
        );
    }
}
