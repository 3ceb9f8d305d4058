use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Channel shared by the full and the reduced run when coupling is on.
pub const COUPLED_CHANNEL: u64 = 0;
/// Channel the reduced run draws from when coupling is off.
pub const INDEPENDENT_CHANNEL: u64 = 1;

/// Counter-addressed Wiener increments. The normal draw for
/// `(path, fine step, j)` is read at a fixed position of a ChaCha stream, so
/// it does not depend on evaluation order, thread count or `J`.
///
/// A coarse step is the sum of `substeps` fine increments, which couples a run
/// at `dt` to a run at `dt / substeps` on the same Brownian path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WienerIncrements {
    seed: u64,
    dt: f64,
    substeps: u32,
}

impl WienerIncrements {
    pub fn new(seed: u64, dt: f64) -> Self {
        Self::refined(seed, dt, 1)
    }

    pub fn refined(seed: u64, dt: f64, substeps: u32) -> Self {
        Self {
            seed,
            dt,
            substeps: substeps.max(1),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn path(&self, path: usize, channel: u64) -> PathNoise {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((path as u64) << 1) | (channel & 1));
        PathNoise {
            rng,
            substeps: self.substeps as usize,
            fine_scale: (self.dt / self.substeps as f64).sqrt(),
        }
    }
}

pub struct PathNoise {
    rng: ChaCha8Rng,
    substeps: usize,
    fine_scale: f64,
}

impl PathNoise {
    fn standard(&mut self, fine_step: usize, j: usize) -> f64 {
        // 64 words per key leaves room for ziggurat rejections.
        let key = (((fine_step as u128) << 32) | j as u128) << 6;
        self.rng.set_word_pos(key);
        self.rng.sample(StandardNormal)
    }

    /// `ΔW^j` over coarse step `step`.
    pub fn increment(&mut self, step: usize, j: usize) -> f64 {
        (0..self.substeps)
            .map(|s| self.fine_scale * self.standard(step * self.substeps + s, j))
            .sum()
    }

    pub fn increments(&mut self, step: usize, noise_dim: usize) -> Vec<f64> {
        (0..noise_dim).map(|j| self.increment(step, j)).collect()
    }
}
