//! Probability-table quantization and a packed binary model format.
//!
//! Two codebooks:
//!
//! * `fixed` — `bits`-bit fixed point: probabilities snap to multiples of
//!   `1/M` with `M = 2^bits - 1`.  Small values can round to zero, and
//!   such entries are dropped.
//! * `log` — powers of two: a probability snaps to `2^round(log2 p)`,
//!   with the exponent clamped to `[-(2^bits - 1), 0]`.  Nothing rounds
//!   to zero, but dynamic range saturates instead.
//!
//! After snapping, each row is renormalized so the table is still a
//! probability table.  Renormalization can move values off the codebook,
//! so snap-and-normalize is repeated until the row stops changing; the
//! resulting fixed point makes quantization exactly idempotent —
//! quantizing a quantized table is a no-op — which is what lets quantized
//! models round-trip through the packed format bit for bit.  Convergence
//! is quick (a handful of iterations); the loop is capped at 64 as a
//! safety net.
//!
//! The packed format stores each entry as a `bits`-wide index into the
//! codebook instead of an 8-byte float, which is where the size win
//! comes from.  Row argmaxes may drift under coarse codebooks (entries
//! that differed can snap to the same code); that is expected, and it is
//! why decode quality of a quantized model is measured rather than
//! assumed.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toymt::LexTable;

const MAGIC: &[u8; 4] = b"LXQ1";
const MAX_RENORM_ITERS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantMode {
    Fixed,
    Log,
}

impl QuantMode {
    pub fn name(&self) -> &'static str {
        match self {
            QuantMode::Fixed => "fixed",
            QuantMode::Log => "log",
        }
    }

    fn code(&self) -> u8 {
        match self {
            QuantMode::Fixed => 0,
            QuantMode::Log => 1,
        }
    }

    fn from_code(c: u8) -> Option<QuantMode> {
        match c {
            0 => Some(QuantMode::Fixed),
            1 => Some(QuantMode::Log),
            _ => None,
        }
    }
}

impl std::str::FromStr for QuantMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fixed" => Ok(QuantMode::Fixed),
            "log" => Ok(QuantMode::Log),
            other => Err(format!(
                "unknown quantization mode {other:?} (expected fixed or log)"
            )),
        }
    }
}

fn check_bits(bits: u8) -> Result<()> {
    if !(1..=16).contains(&bits) {
        return Err(Error::InvalidArg(format!(
            "quantization bits must be 1..=16, got {bits}"
        )));
    }
    Ok(())
}

/// Snap one probability to the codebook.  Zero stays zero; under `fixed`
/// small values round *to* zero.
pub fn map_value(mode: QuantMode, bits: u8, p: f64) -> f64 {
    match mode {
        QuantMode::Fixed => {
            let m = ((1u32 << bits) - 1) as f64;
            (p * m).round() / m
        }
        QuantMode::Log => {
            if p == 0.0 {
                return 0.0;
            }
            let e_min = -(((1u32 << bits) - 1) as f64);
            let e = p.log2().round().clamp(e_min, 0.0);
            e.exp2()
        }
    }
}

/// The representable nonzero values, ascending.  At most `2^bits`
/// entries, so packed indices fit in `bits` bits.
pub fn codebook(mode: QuantMode, bits: u8) -> Vec<f64> {
    match mode {
        QuantMode::Fixed => {
            let m = (1u32 << bits) - 1;
            (1..=m).map(|k| k as f64 / m as f64).collect()
        }
        QuantMode::Log => {
            let e_min = -(((1u32 << bits) - 1) as i32);
            (e_min..=0).map(|e| (e as f64).exp2()).collect()
        }
    }
}

/// Index of a (post-quantization) probability's codebook value.
fn code_of(mode: QuantMode, bits: u8, p: f64) -> u32 {
    match mode {
        QuantMode::Fixed => {
            let m = ((1u32 << bits) - 1) as f64;
            (p * m).round() as u32 - 1
        }
        QuantMode::Log => {
            let e_min = -(((1u32 << bits) - 1) as f64);
            let e = p.log2().round().clamp(e_min, 0.0);
            (e - e_min) as u32
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantStats {
    pub mode: QuantMode,
    pub bits: u8,
    pub rows: usize,
    /// Entries surviving quantization.
    pub entries: usize,
    /// Input entries that rounded to zero and were removed.
    pub dropped: usize,
    /// Distinct codebook values in use across the table (at most 2^bits).
    pub distinct_values: usize,
    /// Mean absolute difference from the input probabilities, dropped
    /// entries included.
    pub mae: f64,
}

/// Snap one row to the codebook and renormalize, iterating to a fixed
/// point.  Returns the converged row; empty if everything rounded away.
fn quantize_row(row: &BTreeMap<String, f64>, mode: QuantMode, bits: u8) -> BTreeMap<String, f64> {
    let mut values: Vec<f64> = row.values().copied().collect();
    for _ in 0..MAX_RENORM_ITERS {
        let mapped: Vec<f64> = values.iter().map(|&p| map_value(mode, bits, p)).collect();
        let sum: f64 = mapped.iter().sum();
        if sum == 0.0 {
            return BTreeMap::new();
        }
        let normalized: Vec<f64> = mapped.iter().map(|&p| p / sum).collect();
        if normalized == values {
            break;
        }
        values = normalized;
    }
    // The map_value check matters only if the loop hit its iteration cap:
    // a not-quite-converged value could still round to zero, and every
    // stored value must map onto the codebook.
    row.keys()
        .zip(&values)
        .filter(|(_, &p)| p > 0.0 && map_value(mode, bits, p) > 0.0)
        .map(|(e, &p)| (e.clone(), p))
        .collect()
}

/// Quantize a lexical table.  The result is idempotent under the same
/// mode and bits: `quantize(quantize(t)) == quantize(t)`.
pub fn quantize(table: &LexTable, mode: QuantMode, bits: u8) -> Result<(LexTable, QuantStats)> {
    check_bits(bits)?;
    let mut rows = BTreeMap::new();
    let mut distinct: std::collections::BTreeSet<u32> = std::collections::BTreeSet::new();
    let mut abs_err = 0.0;
    let mut input_entries = 0usize;
    let mut output_entries = 0usize;
    for (f, row) in &table.rows {
        input_entries += row.len();
        let quantized = quantize_row(row, mode, bits);
        for (e, &p_in) in row {
            let p_out = quantized.get(e).copied().unwrap_or(0.0);
            abs_err += (p_out - p_in).abs();
        }
        for &p in quantized.values() {
            distinct.insert(code_of(mode, bits, p));
        }
        output_entries += quantized.len();
        if !quantized.is_empty() {
            rows.insert(f.clone(), quantized);
        }
    }
    let stats = QuantStats {
        mode,
        bits,
        rows: rows.len(),
        entries: output_entries,
        dropped: input_entries - output_entries,
        distinct_values: distinct.len(),
        mae: if input_entries == 0 {
            0.0
        } else {
            abs_err / input_entries as f64
        },
    };
    Ok((LexTable { rows }, stats))
}

struct BitWriter {
    out: Vec<u8>,
    acc: u32,
    filled: u32,
}

impl BitWriter {
    fn new() -> Self {
        BitWriter {
            out: Vec::new(),
            acc: 0,
            filled: 0,
        }
    }

    fn push(&mut self, code: u32, bits: u8) {
        self.acc = (self.acc << bits) | code;
        self.filled += u32::from(bits);
        while self.filled >= 8 {
            self.out.push((self.acc >> (self.filled - 8)) as u8);
            self.filled -= 8;
            self.acc &= (1 << self.filled) - 1;
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.filled > 0 {
            self.out.push((self.acc << (8 - self.filled)) as u8);
        }
        self.out
    }
}

struct BitReader<'a> {
    data: &'a [u8],
    at: usize,
    acc: u32,
    filled: u32,
}

impl<'a> BitReader<'a> {
    fn new(data: &'a [u8]) -> Self {
        BitReader {
            data,
            at: 0,
            acc: 0,
            filled: 0,
        }
    }

    fn pull(&mut self, bits: u8) -> Option<u32> {
        while self.filled < u32::from(bits) {
            let byte = *self.data.get(self.at)?;
            self.at += 1;
            self.acc = (self.acc << 8) | u32::from(byte);
            self.filled += 8;
        }
        self.filled -= u32::from(bits);
        let code = self.acc >> self.filled;
        self.acc &= (1 << self.filled) - 1;
        Some(code)
    }
}

/// Quantize (a no-op for already-quantized input) and serialize a
/// table: header, codebook, vocabulary, then all probabilities as
/// `bits`-wide codebook indices packed MSB-first.  Layout:
///
/// ```text
/// "LXQ1"  mode:u8  bits:u8  reserved:u16
/// codebook_len:u32  codebook:f64 x len
/// row_count:u32
///   per row: f_len:u16 f:bytes entry_count:u32 (e_len:u16 e:bytes) x count
/// total_entries:u64  packed codes: ceil(total*bits/8) bytes
/// ```
///
/// All integers little-endian, strings UTF-8, rows and entries in
/// ascending order.
pub fn to_packed_bytes(table: &LexTable, mode: QuantMode, bits: u8) -> Result<Vec<u8>> {
    check_bits(bits)?;
    let (table, _) = quantize(table, mode, bits)?;
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(mode.code());
    out.push(bits);
    out.extend_from_slice(&0u16.to_le_bytes());
    let cb = codebook(mode, bits);
    out.extend_from_slice(&(cb.len() as u32).to_le_bytes());
    for v in &cb {
        out.extend_from_slice(&v.to_le_bytes());
    }

    let rows: Vec<(&String, &BTreeMap<String, f64>)> = table
        .rows
        .iter()
        .filter(|(_, row)| !row.is_empty())
        .collect();
    out.extend_from_slice(&(rows.len() as u32).to_le_bytes());
    let mut total = 0u64;
    let push_str = |out: &mut Vec<u8>, s: &str| -> Result<()> {
        let bytes = s.as_bytes();
        if bytes.len() > u16::MAX as usize {
            return Err(Error::InvalidArg(format!(
                "word too long to pack: {} bytes",
                bytes.len()
            )));
        }
        out.extend_from_slice(&(bytes.len() as u16).to_le_bytes());
        out.extend_from_slice(bytes);
        Ok(())
    };
    for (f, row) in &rows {
        push_str(&mut out, f)?;
        out.extend_from_slice(&(row.len() as u32).to_le_bytes());
        for e in row.keys() {
            push_str(&mut out, e)?;
        }
        total += row.len() as u64;
    }
    out.extend_from_slice(&total.to_le_bytes());

    let mut writer = BitWriter::new();
    for (_, row) in &rows {
        for &p in row.values() {
            writer.push(code_of(mode, bits, p), bits);
        }
    }
    out.extend_from_slice(&writer.finish());
    Ok(out)
}

struct Cursor<'a> {
    data: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.at + n > self.data.len() {
            return Err(Error::InvalidArg("packed model truncated".into()));
        }
        let s = &self.data[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let len = self.u16()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| Error::InvalidArg("packed model has invalid UTF-8".into()))
    }
}

/// Deserialize a packed table.  Rows are renormalized from the codebook
/// values, which reproduces the quantized table exactly.
pub fn from_packed_bytes(data: &[u8]) -> Result<(LexTable, QuantMode, u8)> {
    let mut c = Cursor { data, at: 0 };
    let bad = |message: &str| Error::InvalidArg(format!("packed model: {message}"));

    if c.take(4)? != MAGIC {
        return Err(bad("bad magic (not a packed model file)"));
    }
    let mode = QuantMode::from_code(c.u8()?).ok_or_else(|| bad("unknown mode"))?;
    let bits = c.u8()?;
    check_bits(bits)?;
    if c.u16()? != 0 {
        return Err(bad("nonzero reserved field"));
    }
    let cb_len = c.u32()? as usize;
    if cb_len == 0 || cb_len > (1usize << bits) {
        return Err(bad("codebook length does not fit the bit width"));
    }
    let mut cb = Vec::with_capacity(cb_len);
    for _ in 0..cb_len {
        let v = c.f64()?;
        if !(v.is_finite() && v > 0.0) {
            return Err(bad("codebook value out of range"));
        }
        cb.push(v);
    }

    let row_count = c.u32()? as usize;
    let mut names: Vec<(String, Vec<String>)> = Vec::with_capacity(row_count);
    let mut expected_total = 0u64;
    for _ in 0..row_count {
        let f = c.string()?;
        let entry_count = c.u32()? as usize;
        if entry_count == 0 {
            return Err(bad("empty row"));
        }
        let mut es = Vec::with_capacity(entry_count);
        for _ in 0..entry_count {
            es.push(c.string()?);
        }
        expected_total += entry_count as u64;
        names.push((f, es));
    }
    if c.u64()? != expected_total {
        return Err(bad("entry count mismatch"));
    }
    let packed_len = ((expected_total as usize) * usize::from(bits)).div_ceil(8);
    let packed = c.take(packed_len)?;
    if c.at != data.len() {
        return Err(bad("trailing bytes"));
    }

    let mut reader = BitReader::new(packed);
    let mut rows = BTreeMap::new();
    for (f, es) in names {
        let mut raw = BTreeMap::new();
        for e in es {
            let code = reader
                .pull(bits)
                .ok_or_else(|| bad("ran out of packed codes"))? as usize;
            let v = *cb
                .get(code)
                .ok_or_else(|| bad("code outside the codebook"))?;
            if raw.insert(e, v).is_some() {
                return Err(bad("duplicate entry in row"));
            }
        }
        let quantized = quantize_row(&raw, mode, bits);
        if rows.insert(f, quantized).is_some() {
            return Err(bad("duplicate row"));
        }
    }
    Ok((LexTable { rows }, mode, bits))
}

pub fn save_packed(table: &LexTable, mode: QuantMode, bits: u8, path: &Path) -> Result<()> {
    let bytes = to_packed_bytes(table, mode, bits)?;
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_packed(path: &Path) -> Result<(LexTable, QuantMode, u8)> {
    let data = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_packed_bytes(&data).map_err(|e| match e {
        Error::InvalidArg(message) => Error::Format {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeReport {
    pub entries: usize,
    pub text_bytes: usize,
    pub packed_bytes: usize,
    /// `packed / text`, smaller is better.
    pub ratio: f64,
}

/// Compare the plain-text footprint of a table against its packed form.
pub fn size_report(table: &LexTable, mode: QuantMode, bits: u8) -> Result<SizeReport> {
    let text_bytes = table.to_tsv().len();
    let packed_bytes = to_packed_bytes(table, mode, bits)?.len();
    Ok(SizeReport {
        entries: table.entry_count(),
        text_bytes,
        packed_bytes,
        ratio: if text_bytes == 0 {
            0.0
        } else {
            packed_bytes as f64 / text_bytes as f64
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table(rows: &[(&str, &[(&str, f64)])]) -> LexTable {
        let mut t = LexTable::default();
        for (f, entries) in rows {
            t.rows.insert(
                f.to_string(),
                entries.iter().map(|(e, p)| (e.to_string(), *p)).collect(),
            );
        }
        t
    }

    fn random_table(rows: usize, cols: usize, seed: u64) -> LexTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = LexTable::default();
        for i in 0..rows {
            let mut raw: Vec<f64> = (0..cols).map(|_| rng.gen_range(0.01..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.iter_mut().for_each(|v| *v /= sum);
            t.rows.insert(
                format!("f{i}"),
                raw.iter()
                    .enumerate()
                    .map(|(j, &p)| (format!("e{j}"), p))
                    .collect(),
            );
        }
        t
    }

    #[test]
    fn fixed_point_snaps_to_multiples() {
        // 4 bits: M = 15; 0.5 * 15 = 7.5 rounds half away from zero
        assert_eq!(map_value(QuantMode::Fixed, 4, 0.5), 8.0 / 15.0);
        assert!((map_value(QuantMode::Fixed, 4, 0.7) - 11.0 / 15.0).abs() < 1e-15);
        assert_eq!(map_value(QuantMode::Fixed, 4, 0.0), 0.0);
        // below half a step rounds away entirely
        assert_eq!(map_value(QuantMode::Fixed, 4, 0.02), 0.0);
    }

    #[test]
    fn log_mode_snaps_to_powers_of_two() {
        assert_eq!(map_value(QuantMode::Log, 4, 0.5), 0.5);
        assert_eq!(map_value(QuantMode::Log, 4, 0.3), 0.25);
        assert_eq!(map_value(QuantMode::Log, 4, 1.0), 1.0);
        // clamped at the bottom of the 2-bit range: e_min = -3
        assert_eq!(map_value(QuantMode::Log, 2, 1e-9), 0.125);
        assert_eq!(map_value(QuantMode::Log, 4, 0.0), 0.0);
    }

    #[test]
    fn codebooks_fit_their_bit_width() {
        for mode in [QuantMode::Fixed, QuantMode::Log] {
            for bits in 1..=8u8 {
                let cb = codebook(mode, bits);
                assert!(cb.len() <= 1 << bits, "{mode:?} {bits}");
                assert!(cb.windows(2).all(|w| w[0] < w[1]), "ascending");
                assert_eq!(*cb.last().unwrap(), 1.0);
                // every codebook value is its own code
                for (i, &v) in cb.iter().enumerate() {
                    assert_eq!(code_of(mode, bits, v), i as u32, "{mode:?} {bits} {v}");
                }
            }
        }
    }

    #[test]
    fn rows_stay_normalized_after_quantization() {
        let t = random_table(20, 7, 3);
        for mode in [QuantMode::Fixed, QuantMode::Log] {
            for bits in [2, 4, 8] {
                let (q, _) = quantize(&t, mode, bits).unwrap();
                for (f, row) in &q.rows {
                    let sum: f64 = row.values().sum();
                    assert!(
                        (sum - 1.0).abs() < 1e-12,
                        "{mode:?}/{bits} row {f} sums to {sum}"
                    );
                }
            }
        }
    }

    #[test]
    fn quantization_is_idempotent() {
        let t = random_table(50, 9, 17);
        for mode in [QuantMode::Fixed, QuantMode::Log] {
            for bits in 1..=8u8 {
                let (once, _) = quantize(&t, mode, bits).unwrap();
                let (twice, _) = quantize(&once, mode, bits).unwrap();
                assert_eq!(once, twice, "{mode:?} {bits} bits");
            }
        }
    }

    #[test]
    fn worked_example_fixed_4_bit() {
        let t = table(&[("a", &[("x", 0.7), ("y", 0.3)])]);
        let (q, stats) = quantize(&t, QuantMode::Fixed, 4).unwrap();
        // 0.7/0.3 snap to 11/15 and 5/15, renormalize to 11/16 and 5/16,
        // then resnap-normalize to the stable 10/15, 5/15 -> 2/3, 1/3
        assert!((q.rows["a"]["x"] - 2.0 / 3.0).abs() < 1e-15);
        assert!((q.rows["a"]["y"] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(stats.distinct_values, 2);
        assert_eq!(stats.dropped, 0);
        let expected_mae = ((2.0 / 3.0 - 0.7f64).abs() + (1.0 / 3.0 - 0.3f64).abs()) / 2.0;
        assert!((stats.mae - expected_mae).abs() < 1e-15);
    }

    #[test]
    fn worked_example_log_4_bit() {
        let t = table(&[("a", &[("x", 0.5), ("y", 0.3), ("z", 0.2)])]);
        let (q, _) = quantize(&t, QuantMode::Log, 4).unwrap();
        assert_eq!(q.rows["a"]["x"], 0.5);
        assert_eq!(q.rows["a"]["y"], 0.25);
        assert_eq!(q.rows["a"]["z"], 0.25);
    }

    #[test]
    fn tiny_fixed_point_entries_are_dropped() {
        let t = table(&[("a", &[("x", 0.99), ("y", 0.01)])]);
        let (q, stats) = quantize(&t, QuantMode::Fixed, 4).unwrap();
        assert_eq!(q.rows["a"].len(), 1);
        assert_eq!(q.rows["a"]["x"], 1.0);
        assert_eq!(stats.dropped, 1);
        // log mode never drops
        let (q, stats) = quantize(&t, QuantMode::Log, 4).unwrap();
        assert_eq!(q.rows["a"].len(), 2);
        assert_eq!(stats.dropped, 0);
    }

    #[test]
    fn more_bits_mean_less_error() {
        let t = random_table(30, 8, 99);
        let mut last = f64::INFINITY;
        for bits in 2..=8u8 {
            let (_, stats) = quantize(&t, QuantMode::Fixed, bits).unwrap();
            assert!(
                stats.mae <= last + 1e-12,
                "MAE went up at {bits} bits: {} -> {}",
                last,
                stats.mae
            );
            last = stats.mae;
        }
    }

    #[test]
    fn distinct_values_respect_the_bit_budget() {
        let t = random_table(100, 10, 5);
        for bits in 1..=6u8 {
            let (_, stats) = quantize(&t, QuantMode::Fixed, bits).unwrap();
            assert!(stats.distinct_values <= 1 << bits);
        }
    }

    #[test]
    fn packed_round_trip_is_exact() {
        let t = random_table(40, 6, 7);
        for mode in [QuantMode::Fixed, QuantMode::Log] {
            let (q, _) = quantize(&t, mode, 4).unwrap();
            let bytes = to_packed_bytes(&q, mode, 4).unwrap();
            let (back, back_mode, back_bits) = from_packed_bytes(&bytes).unwrap();
            assert_eq!(back, q, "{mode:?}");
            assert_eq!(back_mode, mode);
            assert_eq!(back_bits, 4);
        }
    }

    #[test]
    fn packed_files_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.lxq");
        let (q, _) = quantize(&random_table(10, 4, 1), QuantMode::Log, 3).unwrap();
        save_packed(&q, QuantMode::Log, 3, &path).unwrap();
        let (back, mode, bits) = load_packed(&path).unwrap();
        assert_eq!(back, q);
        assert_eq!(mode, QuantMode::Log);
        assert_eq!(bits, 3);
    }

    #[test]
    fn packing_shrinks_the_table() {
        let t = random_table(50, 8, 23);
        let (q, _) = quantize(&t, QuantMode::Fixed, 4).unwrap();
        let report = size_report(&q, QuantMode::Fixed, 4).unwrap();
        assert!(report.packed_bytes < report.text_bytes);
        assert!(report.ratio < 1.0);
    }

    #[test]
    fn four_bit_indices_pack_two_per_byte() {
        let t = table(&[("a", &[("w", 0.25), ("x", 0.25), ("y", 0.25), ("z", 0.25)])]);
        let (q, _) = quantize(&t, QuantMode::Fixed, 4).unwrap();
        let with_4 = to_packed_bytes(&q, QuantMode::Fixed, 4).unwrap();
        let (q8, _) = quantize(&t, QuantMode::Fixed, 8).unwrap();
        let with_8 = to_packed_bytes(&q8, QuantMode::Fixed, 8).unwrap();
        // same vocabulary bytes; the 8-bit file needs 2 more code bytes
        // but carries a much larger codebook
        let count = |bytes: &[u8]| bytes.len();
        assert!(count(&with_4) < count(&with_8));
    }

    #[test]
    fn corrupted_files_are_rejected() {
        let (q, _) = quantize(&random_table(5, 3, 2), QuantMode::Fixed, 4).unwrap();
        let good = to_packed_bytes(&q, QuantMode::Fixed, 4).unwrap();

        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(from_packed_bytes(&bad_magic).is_err());

        let mut bad_mode = good.clone();
        bad_mode[4] = 9;
        assert!(from_packed_bytes(&bad_mode).is_err());

        let truncated = &good[..good.len() - 1];
        assert!(from_packed_bytes(truncated).is_err());

        let mut trailing = good.clone();
        trailing.push(0);
        assert!(from_packed_bytes(&trailing).is_err());

        assert!(from_packed_bytes(b"LXQ").is_err());
    }

    #[test]
    fn bit_writer_reader_round_trip() {
        for bits in 1..=16u8 {
            let codes: Vec<u32> = (0..37).map(|i| (i * 7) % (1 << bits)).collect();
            let mut w = BitWriter::new();
            for &c in &codes {
                w.push(c, bits);
            }
            let bytes = w.finish();
            assert_eq!(bytes.len(), (codes.len() * bits as usize).div_ceil(8));
            let mut r = BitReader::new(&bytes);
            for &c in &codes {
                assert_eq!(r.pull(bits), Some(c), "{bits} bits");
            }
        }
    }

    #[test]
    fn bits_out_of_range_are_rejected() {
        let t = random_table(2, 2, 0);
        assert!(quantize(&t, QuantMode::Fixed, 0).is_err());
        assert!(quantize(&t, QuantMode::Fixed, 17).is_err());
    }
}
