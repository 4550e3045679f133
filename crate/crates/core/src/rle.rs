//! Row-major run-length encoding of binary masks.
//!
//! Runs alternate background/foreground and always start with the count of
//! leading background pixels (possibly zero). Runs sum to `width × height`.

use crate::error::{Error, Result};
use crate::mask::BinaryMask;

pub fn encode(mask: &BinaryMask) -> Vec<u32> {
    let mut runs = Vec::new();
    let mut current = false;
    let mut n = 0u32;
    for &v in mask.data() {
        if v != current {
            runs.push(n);
            n = 0;
            current = v;
        }
        n += 1;
    }
    runs.push(n);
    runs
}

pub fn decode(runs: &[u32], width: usize, height: usize) -> Result<BinaryMask> {
    let total: u64 = runs.iter().map(|&r| r as u64).sum();
    if total != (width * height) as u64 {
        return Err(Error::Rle(format!(
            "runs sum to {total}, expected {} for {width}x{height}",
            width * height
        )));
    }
    let mut data = Vec::with_capacity(width * height);
    for (i, &r) in runs.iter().enumerate() {
        data.extend(std::iter::repeat(i % 2 == 1).take(r as usize));
    }
    BinaryMask::from_vec(width, height, data)
}
