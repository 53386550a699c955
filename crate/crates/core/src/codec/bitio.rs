//! MSB-first bit packing shared by the built-in coders.

#[derive(Debug, Default)]
pub(crate) struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    nbits: u32,
}

impl BitWriter {
    pub fn with_capacity(bytes: usize) -> Self {
        Self {
            out: Vec::with_capacity(bytes),
            acc: 0,
            nbits: 0,
        }
    }

    /// Appends the low `len` bits of `code`, most significant first. `len <= 32`.
    #[inline]
    pub fn write(&mut self, code: u32, len: u32) {
        debug_assert!(len <= 32);
        if len == 0 {
            return;
        }
        self.acc = (self.acc << len) | (u64::from(code) & ((1u64 << len) - 1));
        self.nbits += len;
        while self.nbits >= 8 {
            self.nbits -= 8;
            self.out.push((self.acc >> self.nbits) as u8);
        }
    }

    #[inline]
    pub fn write_bit(&mut self, bit: bool) {
        self.write(u32::from(bit), 1);
    }

    /// Pads the final partial byte with zero bits.
    pub fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.out.push((self.acc << (8 - self.nbits)) as u8);
        }
        self.out
    }
}

#[derive(Debug)]
pub(crate) struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    acc: u64,
    nbits: u32,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self {
            data,
            pos: 0,
            acc: 0,
            nbits: 0,
        }
    }

    #[inline]
    fn refill(&mut self) {
        while self.nbits <= 56 && self.pos < self.data.len() {
            self.acc = (self.acc << 8) | u64::from(self.data[self.pos]);
            self.pos += 1;
            self.nbits += 8;
        }
    }

    /// Reads `len <= 32` bits; `None` once the input is exhausted.
    #[inline]
    pub fn read(&mut self, len: u32) -> Option<u32> {
        if self.nbits < len {
            self.refill();
            if self.nbits < len {
                return None;
            }
        }
        self.nbits -= len;
        Some(((self.acc >> self.nbits) & ((1u64 << len) - 1)) as u32)
    }

    #[inline]
    pub fn read_bit(&mut self) -> Option<u32> {
        self.read(1)
    }

    /// Reads one bit, yielding zero past the end of input.
    #[inline]
    pub fn read_bit_or_zero(&mut self) -> u32 {
        self.read(1).unwrap_or(0)
    }
}
