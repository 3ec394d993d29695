//! Seeded, counter-addressed random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Samples are drawn in fixed-size blocks; block `i` always uses stream `i` of the seed,
/// so results do not depend on how blocks are distributed over workers.
pub const BLOCK: usize = 4096;

pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Number of blocks covering `n` samples and the length of block `b`.
pub fn blocks(n: usize) -> impl Iterator<Item = (u64, usize)> {
    let nb = n.div_ceil(BLOCK);
    (0..nb).map(move |b| (b as u64, BLOCK.min(n - b * BLOCK)))
}
