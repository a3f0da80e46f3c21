//! Stable 64-bit digests for ids and split assignment.
//!
//! The algorithm is FNV-1a (64-bit) over the UTF-8 bytes of each field, with
//! fields joined by the ASCII unit separator `0x1F`. It is fixed so that fact
//! ids, set ids and dataset splits reproduce across runs and machines.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Field separator used in canonical concatenations.
pub const FIELD_SEPARATOR: u8 = 0x1f;

#[derive(Clone, Copy, Debug)]
pub struct Fnv64(u64);

impl Default for Fnv64 {
    fn default() -> Self {
        Fnv64(FNV_OFFSET)
    }
}

impl Fnv64 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

/// Digest of `fields` joined by [`FIELD_SEPARATOR`].
pub fn digest_fields(fields: &[&str]) -> u64 {
    let mut h = Fnv64::new();
    for (i, field) in fields.iter().enumerate() {
        if i > 0 {
            h.write(&[FIELD_SEPARATOR]);
        }
        h.write(field.as_bytes());
    }
    h.finish()
}

/// SplitMix64 finalizer; spreads FNV output evenly over all 64 bits.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Maps a key to `[0, 1)` using the top 53 bits of its mixed digest.
pub fn unit_interval(key: &str) -> f64 {
    let bits = mix64(digest_fields(&[key])) >> 11;
    bits as f64 / (1u64 << 53) as f64
}
