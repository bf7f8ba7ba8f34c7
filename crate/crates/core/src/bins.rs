//! The online two-player balls-and-bins game.
//!
//! Player 1 drops at most `k` balls per turn; Player 2 empties the largest bin
//! (lowest id on ties). In the randomized variant Player 2 also draws
//! `i ∈ [1, k]` and empties the bin that received Player 1's `i`-th ball of the
//! last turn, when that ball exists.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bucket::BucketCounter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BinsError {
    #[error("{placed} balls placed in one turn, at most {k} allowed")]
    TooManyBalls { placed: usize, k: usize },
    #[error("bin {bin} out of range for {bins} bins")]
    BadBin { bin: usize, bins: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Deterministic,
    Randomized,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "det" | "deterministic" => Ok(Variant::Deterministic),
            "rand" | "randomized" => Ok(Variant::Randomized),
            _ => Err(format!("unknown variant `{s}` (expected det|rand)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BinsGame {
    bins: BucketCounter,
    k: usize,
    last_turn: Vec<usize>,
    rng: ChaCha8Rng,
}

impl BinsGame {
    pub fn new(n_bins: usize, k: usize, seed: u64) -> Self {
        BinsGame {
            bins: BucketCounter::new(n_bins),
            k,
            last_turn: Vec::with_capacity(k),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn n_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bin(&self, id: usize) -> usize {
        self.bins.get(id)
    }

    pub fn bins(&self) -> &BucketCounter {
        &self.bins
    }

    pub fn max_bin(&self) -> usize {
        self.bins.max_value()
    }

    pub fn last_turn_placements(&self) -> &[usize] {
        &self.last_turn
    }

    /// Starts a new Player 1 turn with no balls placed yet.
    pub fn begin_turn(&mut self) {
        self.last_turn.clear();
    }

    /// Adds one ball to the current turn.
    pub fn place(&mut self, bin: usize) -> Result<(), BinsError> {
        if bin >= self.n_bins() {
            return Err(BinsError::BadBin { bin, bins: self.n_bins() });
        }
        if self.last_turn.len() >= self.k {
            return Err(BinsError::TooManyBalls { placed: self.last_turn.len() + 1, k: self.k });
        }
        self.bins.inc(bin);
        self.last_turn.push(bin);
        Ok(())
    }

    /// A whole Player 1 turn. Validated up front; on error nothing changes.
    pub fn player1_move(&mut self, placements: &[usize]) -> Result<(), BinsError> {
        if placements.len() > self.k {
            return Err(BinsError::TooManyBalls { placed: placements.len(), k: self.k });
        }
        if let Some(&bin) = placements.iter().find(|&&b| b >= self.n_bins()) {
            return Err(BinsError::BadBin { bin, bins: self.n_bins() });
        }
        self.begin_turn();
        for &b in placements {
            self.place(b)?;
        }
        Ok(())
    }

    pub fn empty_bin(&mut self, id: usize) {
        self.bins.reset(id);
    }

    /// Empties the largest bin and returns its id.
    pub fn player2_move_deterministic(&mut self) -> usize {
        let (_, id) = self.bins.max().expect("game has at least one bin");
        self.bins.reset(id);
        id
    }

    /// The randomized Player 2 move with the coin already drawn:
    /// `ball` is the 1-based index of Player 1's ball to chase.
    pub fn player2_move_with_draw(&mut self, ball: usize) -> (usize, Option<usize>) {
        let largest = self.player2_move_deterministic();
        let chased = ball.checked_sub(1).and_then(|i| self.last_turn.get(i).copied());
        if let Some(b) = chased {
            self.bins.reset(b);
        }
        (largest, chased)
    }

    pub fn player2_move_randomized(&mut self) -> (usize, Option<usize>) {
        let ball = self.rng.gen_range(1..=self.k.max(1));
        self.player2_move_with_draw(ball)
    }
}

/// A Player 1 strategy. Strategies see the bins but never Player 2's coins.
pub trait Adversary {
    fn name(&self) -> &str;
    fn placements(&mut self, bins: &BucketCounter, k: usize) -> Vec<usize>;
}

/// Puts every ball into bin 0.
#[derive(Debug, Default)]
pub struct FocusAdversary;

impl Adversary for FocusAdversary {
    fn name(&self) -> &str {
        "focus"
    }
    fn placements(&mut self, _bins: &BucketCounter, k: usize) -> Vec<usize> {
        vec![0; k]
    }
}

/// One ball per turn into the lowest-id empty bin.
#[derive(Debug, Default)]
pub struct FreshBinAdversary;

impl Adversary for FreshBinAdversary {
    fn name(&self) -> &str {
        "fresh"
    }
    fn placements(&mut self, bins: &BucketCounter, _k: usize) -> Vec<usize> {
        match bins.min() {
            Some((0, id)) => vec![id],
            _ => Vec::new(),
        }
    }
}

/// Spreads the `k` balls over the `k` currently smallest bins.
#[derive(Debug, Default)]
pub struct LevelingAdversary;

impl Adversary for LevelingAdversary {
    fn name(&self) -> &str {
        "leveling"
    }
    fn placements(&mut self, bins: &BucketCounter, k: usize) -> Vec<usize> {
        let mut out = bins.smallest(k);
        if out.is_empty() {
            return out;
        }
        let mut i = 0;
        while out.len() < k {
            out.push(out[i]);
            i += 1;
        }
        out
    }
}

/// Counts over `[0, n)` with prefix sums and order-statistic lookup.
#[derive(Debug, Clone, Default)]
struct Fenwick {
    tree: Vec<isize>,
}

impl Fenwick {
    fn ones(n: usize) -> Self {
        let mut tree = vec![0isize; n + 1];
        for i in 1..=n {
            tree[i] += 1;
            let j = i + (i & i.wrapping_neg());
            if j <= n {
                tree[j] += tree[i];
            }
        }
        Fenwick { tree }
    }

    fn add(&mut self, i: usize, delta: isize) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Smallest index whose prefix count exceeds `rank` (0-based).
    fn select(&self, mut rank: isize) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            if pos + step <= n && self.tree[pos + step] <= rank {
                pos += step;
                rank -= self.tree[pos];
            }
            step >>= 1;
        }
        pos
    }
}

/// The phase strategy behind the `k·H(N)` lower bound: keep a shrinking set of
/// surviving bins, feed them round-robin in id order, and drop whichever bin
/// Player 2 empties. A phase restarts once at most `k` survivors remain.
///
/// Player 2 can only empty the largest bin or one that received a ball last
/// turn, so only those are re-examined.
#[derive(Debug, Default)]
pub struct HarmonicAdversary {
    alive: Vec<bool>,
    live: usize,
    index: Fenwick,
    expected: Vec<usize>,
    watch: Vec<usize>,
    cursor: usize,
}

impl HarmonicAdversary {
    fn restart(&mut self, n: usize) {
        self.alive = vec![true; n];
        self.live = n;
        self.index = Fenwick::ones(n);
        self.cursor = 0;
    }
}

impl Adversary for HarmonicAdversary {
    fn name(&self) -> &str {
        "harmonic"
    }
    fn placements(&mut self, bins: &BucketCounter, k: usize) -> Vec<usize> {
        let n = bins.len();
        if self.expected.len() != n {
            self.expected = bins.values().to_vec();
            self.watch.clear();
            self.alive = vec![false; n];
            self.live = 0;
        }
        // A survivor holding fewer balls than we left it with was emptied.
        for b in std::mem::take(&mut self.watch) {
            if self.alive[b] && bins.get(b) < self.expected[b] {
                self.alive[b] = false;
                self.live -= 1;
                self.index.add(b, -1);
            }
            self.expected[b] = bins.get(b);
        }
        if self.live <= k {
            self.restart(n);
        }
        if n == 0 {
            return Vec::new();
        }
        let out: Vec<usize> = (0..k)
            .map(|_| {
                let b = self.index.select((self.cursor % self.live) as isize);
                self.cursor += 1;
                self.expected[b] += 1;
                b
            })
            .collect();
        // Largest bin once these balls land, lowest id on ties.
        let (pre_max, pre_id) = bins.max().unwrap_or((0, 0));
        let top = out.iter().map(|&b| self.expected[b]).max().unwrap_or(0).max(pre_max);
        let mut argmax = out.iter().copied().filter(|&b| self.expected[b] == top).min();
        if pre_max == top && bins.get(pre_id) == self.expected[pre_id] {
            argmax = Some(argmax.map_or(pre_id, |b| b.min(pre_id)));
        }
        self.watch.extend(argmax);
        self.watch.extend(out.iter().copied());
        self.watch.sort_unstable();
        self.watch.dedup();
        out
    }
}

pub fn adversary_by_name(name: &str) -> Option<Box<dyn Adversary + Send>> {
    match name {
        "focus" => Some(Box::new(FocusAdversary)),
        "fresh" => Some(Box::new(FreshBinAdversary)),
        "leveling" => Some(Box::new(LevelingAdversary)),
        "harmonic" => Some(Box::new(HarmonicAdversary::default())),
        _ => None,
    }
}

pub const ADVERSARIES: [&str; 4] = ["focus", "fresh", "leveling", "harmonic"];

/// Plays `steps` turns and records the largest bin right after each Player 1
/// move, which is the peak load of that turn.
pub fn run_adversary(
    n_bins: usize,
    k: usize,
    steps: usize,
    adversary: &mut dyn Adversary,
    variant: Variant,
    seed: u64,
) -> Result<Vec<usize>, BinsError> {
    let mut game = BinsGame::new(n_bins, k, seed);
    let mut trace = Vec::with_capacity(steps);
    for _ in 0..steps {
        let moves = adversary.placements(game.bins(), k);
        game.player1_move(&moves)?;
        trace.push(game.max_bin());
        match variant {
            Variant::Deterministic => {
                game.player2_move_deterministic();
            }
            Variant::Randomized => {
                game.player2_move_randomized();
            }
        }
    }
    Ok(trace)
}
