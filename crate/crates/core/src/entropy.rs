//! Bit packing of the latent code and an adaptive order-0 arithmetic coder.
//!
//! The coder follows the classic Witten/Neal/Cleary integer scheme with
//! 32-bit `low`/`high` registers and underflow ("follow") bits. The model
//! starts every byte value at frequency 1, adds 1 after each coded symbol and
//! halves all counts (rounding up) once the total reaches 2¹⁶. There is no
//! end-of-stream symbol: the decoder is told how many symbols to produce.
//!
//! All bits are written most-significant first, both in [`pack_bits`] and in
//! the coder output.

use crate::error::{Error, Result};
use crate::quant::{check_bits, LatentCode};

/// Number of 8-bit symbols needed for `elements` codes of `bits` bits each.
pub fn symbol_count(elements: usize, bits: u32) -> usize {
    (elements * bits as usize).div_ceil(8)
}

/// Linearizes the latent in (channel, row, column) order and packs each
/// value's `n` bits MSB-first, zero-padding the final byte.
pub fn pack_bits(code: &LatentCode) -> Vec<u8> {
    let n = code.bits();
    let mut out = Vec::with_capacity(symbol_count(code.len(), n));
    let mut acc: u32 = 0;
    let mut filled = 0u32;
    for &v in code.values() {
        acc = (acc << n) | v as u32;
        filled += n;
        while filled >= 8 {
            filled -= 8;
            out.push((acc >> filled) as u8);
        }
        acc &= (1 << filled) - 1;
    }
    if filled > 0 {
        out.push((acc << (8 - filled)) as u8);
    }
    out
}

/// Inverse of [`pack_bits`]. Rejects streams of the wrong length and
/// streams whose padding bits are not zero.
pub fn unpack_bits(bytes: &[u8], dims: (usize, usize, usize), bits: u32) -> Result<LatentCode> {
    check_bits(bits)?;
    let (c, h, w) = dims;
    let count = c * h * w;
    let expected = symbol_count(count, bits);
    if bytes.len() != expected {
        return Err(Error::CorruptStream(format!(
            "{} symbols for {count} {bits}-bit codes, expected {expected}",
            bytes.len()
        )));
    }
    let mask = (1u32 << bits) - 1;
    let mut values = Vec::with_capacity(count);
    let mut acc: u32 = 0;
    let mut filled = 0u32;
    let mut src = bytes.iter();
    for _ in 0..count {
        while filled < bits {
            acc = (acc << 8) | *src.next().expect("length checked") as u32;
            filled += 8;
        }
        filled -= bits;
        values.push(((acc >> filled) & mask) as u16);
        acc &= (1 << filled) - 1;
    }
    if acc != 0 {
        return Err(Error::CorruptStream("non-zero padding bits".into()));
    }
    LatentCode::new(bits, c, h, w, values)
}

const SYMBOLS: usize = 256;
/// Counts are halved once their total reaches this value.
pub const MAX_TOTAL: u32 = 1 << 16;

const TOP: u64 = 0xFFFF_FFFF;
const FIRST_QTR: u64 = 1 << 30;
const HALF: u64 = 1 << 31;
const THIRD_QTR: u64 = 3 << 30;

/// Adaptive byte-frequency table with Fenwick-tree cumulative lookups.
#[derive(Clone, Debug)]
pub struct FrequencyModel {
    counts: [u32; SYMBOLS],
    tree: [u32; SYMBOLS + 1],
    total: u32,
}

impl Default for FrequencyModel {
    fn default() -> Self {
        Self::new()
    }
}

impl FrequencyModel {
    pub fn new() -> Self {
        let mut m = FrequencyModel {
            counts: [1; SYMBOLS],
            tree: [0; SYMBOLS + 1],
            total: 0,
        };
        m.rebuild();
        m
    }

    fn rebuild(&mut self) {
        self.tree = [0; SYMBOLS + 1];
        for (i, &c) in self.counts.iter().enumerate() {
            let mut j = i + 1;
            while j <= SYMBOLS {
                self.tree[j] += c;
                j += j & j.wrapping_neg();
            }
        }
        self.total = self.counts.iter().sum();
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn count(&self, symbol: u8) -> u32 {
        self.counts[symbol as usize]
    }

    /// Sum of the counts of all symbols below `symbol`.
    pub fn cum_low(&self, symbol: u8) -> u32 {
        let mut j = symbol as usize;
        let mut s = 0;
        while j > 0 {
            s += self.tree[j];
            j &= j - 1;
        }
        s
    }

    /// Symbol whose cumulative interval contains `target`, with its
    /// `cum_low`. `target` must be below `total`.
    pub fn find(&self, target: u32) -> (u8, u32) {
        debug_assert!(target < self.total);
        let mut pos = 0usize;
        let mut rem = target;
        let mut step = SYMBOLS;
        while step > 0 {
            let next = pos + step;
            if next <= SYMBOLS && self.tree[next] <= rem {
                rem -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        (pos as u8, target - rem)
    }

    pub fn update(&mut self, symbol: u8) {
        self.counts[symbol as usize] += 1;
        let mut j = symbol as usize + 1;
        while j <= SYMBOLS {
            self.tree[j] += 1;
            j += j & j.wrapping_neg();
        }
        self.total += 1;
        if self.total >= MAX_TOTAL {
            for c in self.counts.iter_mut() {
                *c = c.div_ceil(2);
            }
            self.rebuild();
        }
    }
}

/// MSB-first bit sink.
#[derive(Default)]
struct BitWriter {
    out: Vec<u8>,
    cur: u8,
    filled: u8,
}

impl BitWriter {
    #[inline]
    fn push(&mut self, bit: bool) {
        self.cur = (self.cur << 1) | bit as u8;
        self.filled += 1;
        if self.filled == 8 {
            self.out.push(self.cur);
            self.cur = 0;
            self.filled = 0;
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.filled > 0 {
            self.out.push(self.cur << (8 - self.filled));
        }
        self.out
    }
}

/// Streaming adaptive arithmetic encoder.
pub struct Encoder {
    low: u64,
    high: u64,
    pending: u64,
    coded: usize,
    model: FrequencyModel,
    bits: BitWriter,
}

impl Default for Encoder {
    fn default() -> Self {
        Self::new()
    }
}

impl Encoder {
    pub fn new() -> Self {
        Encoder {
            low: 0,
            high: TOP,
            pending: 0,
            coded: 0,
            model: FrequencyModel::new(),
            bits: BitWriter::default(),
        }
    }

    #[inline]
    fn emit(&mut self, bit: bool) {
        self.bits.push(bit);
        for _ in 0..self.pending {
            self.bits.push(!bit);
        }
        self.pending = 0;
    }

    pub fn encode(&mut self, symbol: u8) {
        let range = self.high - self.low + 1;
        let total = self.model.total() as u64;
        let cum_low = self.model.cum_low(symbol) as u64;
        let cum_high = cum_low + self.model.count(symbol) as u64;
        self.high = self.low + range * cum_high / total - 1;
        self.low += range * cum_low / total;
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= FIRST_QTR && self.high < THIRD_QTR {
                self.pending += 1;
                self.low -= FIRST_QTR;
                self.high -= FIRST_QTR;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
        self.model.update(symbol);
        self.coded += 1;
    }

    /// Flushes the final interval and returns the payload. An encoder that
    /// saw no symbols produces an empty payload.
    pub fn finish(mut self) -> Vec<u8> {
        if self.coded == 0 {
            return Vec::new();
        }
        self.pending += 1;
        let bit = self.low >= FIRST_QTR;
        self.emit(bit);
        self.bits.finish()
    }
}

/// Decoder for payloads produced by [`Encoder`].
pub struct Decoder<'a> {
    payload: &'a [u8],
    bit_pos: usize,
    low: u64,
    high: u64,
    value: u64,
    shifts: usize,
    model: FrequencyModel,
}

impl<'a> Decoder<'a> {
    pub fn new(payload: &'a [u8]) -> Self {
        let mut d = Decoder {
            payload,
            bit_pos: 0,
            low: 0,
            high: TOP,
            value: 0,
            shifts: 0,
            model: FrequencyModel::new(),
        };
        for _ in 0..32 {
            d.value = (d.value << 1) | d.next_bit();
        }
        d
    }

    /// Bits past the end of the payload read as zero.
    #[inline]
    fn next_bit(&mut self) -> u64 {
        let pos = self.bit_pos;
        self.bit_pos += 1;
        match self.payload.get(pos / 8) {
            Some(b) => ((b >> (7 - pos % 8)) & 1) as u64,
            None => 0,
        }
    }

    pub fn decode(&mut self) -> Result<u8> {
        if self.value < self.low || self.value > self.high {
            return Err(Error::CorruptStream("code value left the coding interval".into()));
        }
        let range = self.high - self.low + 1;
        let total = self.model.total() as u64;
        let target = ((self.value - self.low + 1) * total - 1) / range;
        if target >= total {
            return Err(Error::CorruptStream("cumulative target out of range".into()));
        }
        let (symbol, cum_low) = self.model.find(target as u32);
        let cum_low = cum_low as u64;
        let cum_high = cum_low + self.model.count(symbol) as u64;
        self.high = self.low + range * cum_high / total - 1;
        self.low += range * cum_low / total;
        loop {
            if self.high < HALF {
            } else if self.low >= HALF {
                self.low -= HALF;
                self.high -= HALF;
                self.value -= HALF;
            } else if self.low >= FIRST_QTR && self.high < THIRD_QTR {
                self.low -= FIRST_QTR;
                self.high -= FIRST_QTR;
                self.value -= FIRST_QTR;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | self.next_bit();
            self.shifts += 1;
        }
        self.model.update(symbol);
        Ok(symbol)
    }

    /// Checks that the payload ends exactly where the encoder's flush would
    /// have put it, with zero padding.
    pub fn finish(self) -> Result<()> {
        let used_bits = self.shifts + 2;
        if self.payload.len() != used_bits.div_ceil(8) {
            return Err(Error::CorruptStream(format!(
                "payload is {} bytes, decoded symbols account for {}",
                self.payload.len(),
                used_bits.div_ceil(8)
            )));
        }
        let pad = self.payload.len() * 8 - used_bits;
        if pad > 0 && self.payload[self.payload.len() - 1] & ((1u8 << pad) - 1) != 0 {
            return Err(Error::CorruptStream("non-zero padding bits".into()));
        }
        Ok(())
    }
}

pub fn aac_encode(symbols: &[u8]) -> Vec<u8> {
    let mut enc = Encoder::new();
    for &s in symbols {
        enc.encode(s);
    }
    enc.finish()
}

pub fn aac_decode(payload: &[u8], count: usize) -> Result<Vec<u8>> {
    if count == 0 {
        if !payload.is_empty() {
            return Err(Error::CorruptStream("payload present for an empty stream".into()));
        }
        return Ok(Vec::new());
    }
    if payload.is_empty() {
        return Err(Error::CorruptStream("empty payload for a non-empty stream".into()));
    }
    let mut dec = Decoder::new(payload);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(dec.decode()?);
    }
    dec.finish()?;
    Ok(out)
}
