//! Lossless stage: zigzag scan, DC differential prediction, AC run-length
//! symbols and Huffman coding with the fixed baseline luminance tables.
//!
//! The bitstream is MSB-first and zero-padded to a whole byte. There are no
//! markers and no byte stuffing; the block count comes from the enclosing
//! record.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Natural (row-major) index of the i-th coefficient in zigzag order.
#[rustfmt::skip]
pub const ZIGZAG: [usize; 64] = [
     0,  1,  8, 16,  9,  2,  3, 10,
    17, 24, 32, 25, 18, 11,  4,  5,
    12, 19, 26, 33, 40, 48, 41, 34,
    27, 20, 13,  6,  7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36,
    29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46,
    53, 60, 61, 54, 47, 55, 62, 63,
];

/// Largest DC difference category the luminance DC table codes.
pub const MAX_DC_CATEGORY: u32 = 11;
/// Largest AC magnitude category the luminance AC table codes.
pub const MAX_AC_CATEGORY: u32 = 10;

pub const DC_LUMA_BITS: [u8; 16] = [0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0];
pub const DC_LUMA_VALS: [u8; 12] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

pub const AC_LUMA_BITS: [u8; 16] = [0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d];
#[rustfmt::skip]
pub const AC_LUMA_VALS: [u8; 162] = [
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07,
    0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52, 0xd1, 0xf0,
    0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49,
    0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69,
    0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7,
    0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5,
    0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2,
    0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8,
    0xf9, 0xfa,
];

const EOB: u8 = 0x00;
const ZRL: u8 = 0xf0;

/// Canonical Huffman table built from a BITS/VALS pair.
#[derive(Debug)]
pub struct HuffmanTable {
    code: [u16; 256],
    size: [u8; 256],
    // decoder: per code length 1..=16
    min_code: [i32; 17],
    max_code: [i32; 17],
    val_ptr: [usize; 17],
    vals: Vec<u8>,
}

impl HuffmanTable {
    pub fn new(bits: &[u8; 16], vals: &[u8]) -> Self {
        let mut t = HuffmanTable {
            code: [0; 256],
            size: [0; 256],
            min_code: [0; 17],
            max_code: [-1; 17],
            val_ptr: [0; 17],
            vals: vals.to_vec(),
        };
        let mut code = 0u32;
        let mut k = 0usize;
        for len in 1..=16 {
            let count = bits[len - 1] as usize;
            if count > 0 {
                t.val_ptr[len] = k;
                t.min_code[len] = code as i32;
                for _ in 0..count {
                    let sym = vals[k] as usize;
                    t.code[sym] = code as u16;
                    t.size[sym] = len as u8;
                    code += 1;
                    k += 1;
                }
                t.max_code[len] = code as i32 - 1;
            }
            code <<= 1;
        }
        t
    }

    fn encode(&self, w: &mut BitWriter, symbol: u8) {
        let s = self.size[symbol as usize];
        debug_assert!(s > 0, "symbol {symbol:#x} has no code");
        w.put(u32::from(self.code[symbol as usize]), u32::from(s));
    }

    fn decode(&self, r: &mut BitReader<'_>) -> Result<u8> {
        let mut code = 0i32;
        for len in 1..=16 {
            code = (code << 1) | r.bit()? as i32;
            if code <= self.max_code[len] {
                return Ok(self.vals[self.val_ptr[len] + (code - self.min_code[len]) as usize]);
            }
        }
        Err(Error::Corrupt("invalid Huffman code".into()))
    }

    /// Code length of `symbol`, 0 if it has none.
    pub fn code_len(&self, symbol: u8) -> u8 {
        self.size[symbol as usize]
    }
}

pub fn dc_table() -> &'static HuffmanTable {
    static T: OnceLock<HuffmanTable> = OnceLock::new();
    T.get_or_init(|| HuffmanTable::new(&DC_LUMA_BITS, &DC_LUMA_VALS))
}

pub fn ac_table() -> &'static HuffmanTable {
    static T: OnceLock<HuffmanTable> = OnceLock::new();
    T.get_or_init(|| HuffmanTable::new(&AC_LUMA_BITS, &AC_LUMA_VALS))
}

pub struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    nbits: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        BitWriter {
            out: Vec::new(),
            acc: 0,
            nbits: 0,
        }
    }

    /// Appends the low `n` bits of `v`, MSB first.
    pub fn put(&mut self, v: u32, n: u32) {
        debug_assert!(n <= 32);
        if n == 0 {
            return;
        }
        self.acc = (self.acc << n) | u64::from(v & ((1u64 << n) - 1) as u32);
        self.nbits += n;
        while self.nbits >= 8 {
            self.nbits -= 8;
            self.out.push((self.acc >> self.nbits) as u8);
        }
        self.acc &= (1u64 << self.nbits) - 1;
    }

    /// Flushes with zero padding.
    pub fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.out.push((self.acc << (8 - self.nbits)) as u8);
        }
        self.out
    }
}

impl Default for BitWriter {
    fn default() -> Self {
        Self::new()
    }
}

pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        BitReader { data, pos: 0 }
    }

    pub fn bit(&mut self) -> Result<u32> {
        let byte = self
            .data
            .get(self.pos / 8)
            .ok_or_else(|| Error::Corrupt("bitstream ended early".into()))?;
        let b = (byte >> (7 - self.pos % 8)) & 1;
        self.pos += 1;
        Ok(u32::from(b))
    }

    pub fn bits(&mut self, n: u32) -> Result<u32> {
        let mut v = 0;
        for _ in 0..n {
            v = (v << 1) | self.bit()?;
        }
        Ok(v)
    }

    pub fn bits_consumed(&self) -> usize {
        self.pos
    }
}

/// Magnitude category: number of bits needed for |v|.
pub fn category(v: i32) -> u32 {
    32 - v.unsigned_abs().leading_zeros()
}

fn put_magnitude(w: &mut BitWriter, v: i32, size: u32) {
    let bits = if v < 0 { v - 1 } else { v };
    w.put(bits as u32, size);
}

fn extend(bits: u32, size: u32) -> i32 {
    if size == 0 {
        return 0;
    }
    let v = bits as i32;
    if v < 1 << (size - 1) {
        v - (1 << size) + 1
    } else {
        v
    }
}

/// Entropy-codes quantized blocks (natural order) in raster order.
pub fn encode_blocks(blocks: &[[i32; 64]]) -> Result<Vec<u8>> {
    let (dc, ac) = (dc_table(), ac_table());
    let mut w = BitWriter::new();
    let mut pred = 0i32;
    for (bi, block) in blocks.iter().enumerate() {
        let diff = block[0] - pred;
        pred = block[0];
        let size = category(diff);
        if size > MAX_DC_CATEGORY {
            return Err(Error::Validation(format!(
                "block {bi}: DC difference {diff} exceeds the codable range"
            )));
        }
        dc.encode(&mut w, size as u8);
        put_magnitude(&mut w, diff, size);

        let mut run = 0u32;
        for (k, &zz) in ZIGZAG.iter().enumerate().skip(1) {
            let v = block[zz];
            if v == 0 {
                run += 1;
                continue;
            }
            let size = category(v);
            if size > MAX_AC_CATEGORY {
                return Err(Error::Validation(format!(
                    "block {bi}: AC coefficient {v} at zigzag {k} exceeds the codable range"
                )));
            }
            while run > 15 {
                ac.encode(&mut w, ZRL);
                run -= 16;
            }
            ac.encode(&mut w, ((run << 4) | size) as u8);
            put_magnitude(&mut w, v, size);
            run = 0;
        }
        if run > 0 {
            ac.encode(&mut w, EOB);
        }
    }
    Ok(w.finish())
}

/// Decodes exactly `count` blocks; the payload must be consumed to its last
/// (padded) byte.
pub fn decode_blocks(payload: &[u8], count: usize) -> Result<Vec<[i32; 64]>> {
    let (dc, ac) = (dc_table(), ac_table());
    let mut r = BitReader::new(payload);
    let mut blocks = Vec::with_capacity(count);
    let mut pred = 0i32;
    for bi in 0..count {
        let mut block = [0i32; 64];
        let size = u32::from(dc.decode(&mut r)?);
        let diff = extend(r.bits(size)?, size);
        pred += diff;
        block[0] = pred;

        let mut k = 1usize;
        while k < 64 {
            let sym = ac.decode(&mut r)?;
            let run = usize::from(sym >> 4);
            let size = u32::from(sym & 0x0f);
            if size == 0 {
                if sym == EOB {
                    break;
                }
                // ZRL
                k += 16;
                if k > 63 {
                    return Err(Error::Corrupt(format!("block {bi}: zero run past end")));
                }
                continue;
            }
            k += run;
            if k > 63 {
                return Err(Error::Corrupt(format!(
                    "block {bi}: coefficient index overflow"
                )));
            }
            block[ZIGZAG[k]] = extend(r.bits(size)?, size);
            k += 1;
        }
        blocks.push(block);
    }
    let used = r.bits_consumed().div_ceil(8);
    if used != payload.len() {
        return Err(Error::Corrupt(format!(
            "payload has {} bytes, blocks used {used}",
            payload.len()
        )));
    }
    Ok(blocks)
}
