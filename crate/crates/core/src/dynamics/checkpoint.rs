//! Binary checkpoints for resuming long runs.
//!
//! Little-endian, fixed-width layout:
//!
//! | offset | size | field                                   |
//! |-------:|-----:|-----------------------------------------|
//! | 0      | 8    | magic `SOCMCKPT`                        |
//! | 8      | 4    | version (`u32`, currently 1)            |
//! | 12     | 4    | reserved, zero                          |
//! | 16     | 8    | step counter `t` (`u64`)                |
//! | 24     | 8    | agent count `N` (`u64`)                 |
//! | 32     | 32   | ChaCha8 seed                            |
//! | 64     | 8    | ChaCha8 stream (`u64`)                  |
//! | 72     | 16   | ChaCha8 word position (`u128`)          |
//! | 88     | 8    | unit scale (`f64`)                      |
//! | 96     | 8    | running price sum (`f64`)               |
//! | 104    | 8    | renormalization level (`f64`)           |
//! | 112    | 8·N  | prices (`f64` each)                     |

use std::io::{Read, Write};

use crate::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"SOCMCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;
const FIXED_LEN: usize = 112;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub t: u64,
    pub rng_seed: [u8; 32],
    pub rng_stream: u64,
    pub rng_word_pos: u128,
    pub scale: f64,
    pub price_sum: f64,
    pub renorm_level: f64,
    pub prices: Vec<f64>,
}

impl Checkpoint {
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = Vec::with_capacity(FIXED_LEN + 8 * self.prices.len());
        buf.extend_from_slice(CHECKPOINT_MAGIC);
        buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        buf.extend_from_slice(&0u32.to_le_bytes());
        buf.extend_from_slice(&self.t.to_le_bytes());
        buf.extend_from_slice(&(self.prices.len() as u64).to_le_bytes());
        buf.extend_from_slice(&self.rng_seed);
        buf.extend_from_slice(&self.rng_stream.to_le_bytes());
        buf.extend_from_slice(&self.rng_word_pos.to_le_bytes());
        buf.extend_from_slice(&self.scale.to_le_bytes());
        buf.extend_from_slice(&self.price_sum.to_le_bytes());
        buf.extend_from_slice(&self.renorm_level.to_le_bytes());
        for p in &self.prices {
            buf.extend_from_slice(&p.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut head = [0u8; FIXED_LEN];
        input
            .read_exact(&mut head)
            .map_err(|e| Error::Checkpoint(format!("short header: {e}")))?;
        if &head[0..8] != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(head[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(head[o..o + 8].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(head[o..o + 8].try_into().unwrap());
        let version = u32_at(8);
        if version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let n = u64_at(24) as usize;
        let mut body = vec![0u8; 8 * n];
        input
            .read_exact(&mut body)
            .map_err(|e| Error::Checkpoint(format!("short body: {e}")))?;
        let prices = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Checkpoint {
            t: u64_at(16),
            rng_seed: head[32..64].try_into().unwrap(),
            rng_stream: u64_at(64),
            rng_word_pos: u128::from_le_bytes(head[72..88].try_into().unwrap()),
            scale: f64_at(88),
            price_sum: f64_at(96),
            renorm_level: f64_at(104),
            prices,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_round_trip() {
        let ck = Checkpoint {
            t: 42,
            rng_seed: [7; 32],
            rng_stream: 3,
            rng_word_pos: 1 << 70,
            scale: 0.5,
            price_sum: 31.5,
            renorm_level: 1e-5,
            prices: vec![10.0, 10.5, 11.0],
        };
        let mut buf = Vec::new();
        ck.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 112 + 24);
        assert_eq!(&buf[..8], b"SOCMCKPT");
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 42);
        assert_eq!(Checkpoint::read_from(buf.as_slice()).unwrap(), ck);

        buf[8] = 9;
        assert!(Checkpoint::read_from(buf.as_slice()).is_err());
        assert!(Checkpoint::read_from(&b"SOCMCKPT"[..]).is_err());
    }
}
