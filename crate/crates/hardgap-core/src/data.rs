//! Hard-gap dataset generation.
//!
//! A dataset is a collection of rollouts together with per-cell visibility
//! masks. Under the `AllTimesteps` policy a position is unsupervised at
//! transition `t -> t+1` whenever its neighbourhood at step `t` matches a
//! hidden pattern; under `LeakyT1Only` only the first transition is masked.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ca::{evolve, Rollout, Row, Rule};
use crate::error::{HardgapError, Result};

/// The set of hidden neighbourhood patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenSet {
    rule_radius: usize,
    patterns: BTreeSet<usize>,
}

impl HiddenSet {
    /// Explicit pattern list; duplicates and out-of-range indices rejected.
    pub fn explicit(radius: usize, patterns: &[usize]) -> Result<Self> {
        let max = 1usize << (2 * radius + 1);
        let mut set = BTreeSet::new();
        for &p in patterns {
            if p >= max {
                return Err(HardgapError::PatternOutOfRange(p, radius));
            }
            if !set.insert(p) {
                return Err(HardgapError::DuplicatePattern(p));
            }
        }
        Ok(Self { rule_radius: radius, patterns: set })
    }

    /// `k` distinct patterns drawn uniformly without replacement,
    /// deterministic given `seed`.
    pub fn random(rule: &Rule, k: usize, seed: u64) -> Result<Self> {
        let max = rule.pattern_count();
        if k >= max {
            return Err(HardgapError::HiddenCountOutOfRange { k, radius: rule.radius() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Vec<usize> = (0..max).collect();
        // Fisher-Yates prefix shuffle.
        for i in 0..k {
            let j = rng.gen_range(i..max);
            pool.swap(i, j);
        }
        Self::explicit(rule.radius(), &pool[..k])
    }

    pub fn radius(&self) -> usize {
        self.rule_radius
    }

    pub fn k(&self) -> usize {
        self.patterns.len()
    }

    pub fn contains(&self, pattern: usize) -> bool {
        self.patterns.contains(&pattern)
    }

    pub fn patterns(&self) -> impl Iterator<Item = usize> + '_ {
        self.patterns.iter().copied()
    }
}

/// Which transitions the hidden-pattern mask applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskPolicy {
    AllTimesteps,
    LeakyT1Only,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

/// One rollout plus its `T x W` visibility matrix. `visibility[t][i]` is true
/// when the prediction of cell `i` at step `t+1` is supervised.
#[derive(Debug, Clone)]
pub struct Sample {
    pub rollout: Rollout,
    pub visibility: Vec<Vec<bool>>,
}

impl Sample {
    pub fn width(&self) -> usize {
        self.rollout.width()
    }

    pub fn timesteps(&self) -> usize {
        self.rollout.steps()
    }
}

/// An immutable collection of samples sharing rule, hidden set, and shape.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub width: usize,
    pub timesteps: usize,
    pub rule: Rule,
    pub hidden: HiddenSet,
    pub policy: MaskPolicy,
    pub split: Split,
}

/// Sorted positions whose periodic neighbourhood pattern is hidden.
pub fn pattern_occurrences(row: &Row, hidden: &HiddenSet) -> Vec<usize> {
    (0..row.width())
        .filter(|&i| hidden.contains(row.neighbourhood(i, hidden.radius())))
        .collect()
}

fn visibility_for(rollout: &Rollout, hidden: &HiddenSet, policy: MaskPolicy) -> Vec<Vec<bool>> {
    let t_steps = rollout.steps();
    let w = rollout.width();
    let mut vis = vec![vec![true; w]; t_steps];
    match policy {
        MaskPolicy::None => {}
        MaskPolicy::AllTimesteps => {
            for t in 0..t_steps {
                for i in pattern_occurrences(rollout.row(t), hidden) {
                    vis[t][i] = false;
                }
            }
        }
        MaskPolicy::LeakyT1Only => {
            for i in pattern_occurrences(rollout.row(0), hidden) {
                vis[0][i] = false;
            }
        }
    }
    vis
}

/// Generates a dataset of i.i.d. Bernoulli(`init_density`) initial rows
/// evolved under `rule`, with visibility built per `policy`. Train and test
/// splits draw from disjoint seed streams.
#[allow(clippy::too_many_arguments)]
pub fn generate_dataset(
    rule: &Rule,
    hidden: &HiddenSet,
    policy: MaskPolicy,
    width: usize,
    timesteps: usize,
    n_samples: usize,
    seed: u64,
    init_density: f64,
    split: Split,
) -> Result<Dataset> {
    if !(init_density > 0.0 && init_density < 1.0) {
        return Err(HardgapError::InvalidDensity(init_density));
    }
    if width < 2 * rule.radius() + 1 {
        return Err(HardgapError::WidthTooSmall { width, radius: rule.radius() });
    }
    // Disjoint streams: the split selects a fixed high-bit offset.
    let stream = match split {
        Split::Train => 0x5eed_0000_0000_0000u64,
        Split::Test => 0x7e57_0000_0000_0000u64,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stream);
    let mut samples = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let cells = (0..width).map(|_| rng.gen::<f64>() < init_density).collect();
        let rollout = evolve(&Row::new(cells), rule, timesteps)?;
        let visibility = visibility_for(&rollout, hidden, policy);
        samples.push(Sample { rollout, visibility });
    }
    Ok(Dataset {
        samples,
        width,
        timesteps,
        rule: rule.clone(),
        hidden: hidden.clone(),
        policy,
        split,
    })
}

const MAGIC: &[u8; 8] = b"HARDGAP1";
const VERSION: u32 = 1;

fn pack_bits(bits: impl Iterator<Item = bool>, out: &mut Vec<u8>) {
    let mut byte = 0u8;
    let mut n = 0;
    for b in bits {
        byte |= u8::from(b) << n;
        n += 1;
        if n == 8 {
            out.push(byte);
            byte = 0;
            n = 0;
        }
    }
    if n > 0 {
        out.push(byte);
    }
}

fn unpack_bits(bytes: &[u8], count: usize) -> Vec<bool> {
    (0..count).map(|i| (bytes[i / 8] >> (i % 8)) & 1 == 1).collect()
}

impl Dataset {
    /// Serializes to the binary container: header followed by packed rollout
    /// bits and packed visibility bits, all little-endian.
    pub fn write_container<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.width as u32).to_le_bytes())?;
        w.write_all(&(self.timesteps as u32).to_le_bytes())?;
        w.write_all(&(self.rule.radius() as u32).to_le_bytes())?;
        let mut table = Vec::new();
        pack_bits(self.rule.table().iter().copied(), &mut table);
        w.write_all(&(table.len() as u32).to_le_bytes())?;
        w.write_all(&table)?;
        w.write_all(&(self.hidden.k() as u32).to_le_bytes())?;
        for p in self.hidden.patterns() {
            w.write_all(&(p as u32).to_le_bytes())?;
        }
        let policy = match self.policy {
            MaskPolicy::AllTimesteps => 0u32,
            MaskPolicy::LeakyT1Only => 1,
            MaskPolicy::None => 2,
        };
        w.write_all(&policy.to_le_bytes())?;
        let split = match self.split {
            Split::Train => 0u32,
            Split::Test => 1,
        };
        w.write_all(&split.to_le_bytes())?;
        w.write_all(&(self.samples.len() as u64).to_le_bytes())?;
        let mut body = Vec::new();
        for s in &self.samples {
            pack_bits(
                s.rollout.rows().iter().flat_map(|r| r.cells().iter().copied()),
                &mut body,
            );
            pack_bits(s.visibility.iter().flatten().copied(), &mut body);
        }
        w.write_all(&body)?;
        Ok(())
    }

    pub fn read_container<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(HardgapError::Container("bad magic".into()));
        }
        let mut u32buf = [0u8; 4];
        let mut read_u32 = |r: &mut R| -> Result<u32> {
            r.read_exact(&mut u32buf)?;
            Ok(u32::from_le_bytes(u32buf))
        };
        let version = read_u32(r)?;
        if version != VERSION {
            return Err(HardgapError::Container(format!("unsupported version {version}")));
        }
        let width = read_u32(r)? as usize;
        let timesteps = read_u32(r)? as usize;
        let radius = read_u32(r)? as usize;
        let table_bytes = read_u32(r)? as usize;
        let mut table_raw = vec![0u8; table_bytes];
        r.read_exact(&mut table_raw)?;
        let table = unpack_bits(&table_raw, 1 << (2 * radius + 1));
        let rule = Rule::from_table(radius, table, "from_container")?;
        let k = read_u32(r)? as usize;
        let mut patterns = Vec::with_capacity(k);
        for _ in 0..k {
            patterns.push(read_u32(r)? as usize);
        }
        let hidden = HiddenSet::explicit(radius, &patterns)?;
        let policy = match read_u32(r)? {
            0 => MaskPolicy::AllTimesteps,
            1 => MaskPolicy::LeakyT1Only,
            2 => MaskPolicy::None,
            other => return Err(HardgapError::Container(format!("bad policy tag {other}"))),
        };
        let split = match read_u32(r)? {
            0 => Split::Train,
            1 => Split::Test,
            other => return Err(HardgapError::Container(format!("bad split tag {other}"))),
        };
        let mut u64buf = [0u8; 8];
        r.read_exact(&mut u64buf)?;
        let n_samples = u64::from_le_bytes(u64buf) as usize;
        let row_bits = (timesteps + 1) * width;
        let row_bytes = row_bits.div_ceil(8);
        let vis_bits = timesteps * width;
        let vis_bytes = vis_bits.div_ceil(8);
        let mut samples = Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            let mut raw = vec![0u8; row_bytes];
            r.read_exact(&mut raw)?;
            let flat = unpack_bits(&raw, row_bits);
            let rollout_rows: Vec<Row> =
                flat.chunks(width).map(|c| Row::new(c.to_vec())).collect();
            let rollout = Rollout::from_rows(rollout_rows);
            let mut raw = vec![0u8; vis_bytes];
            r.read_exact(&mut raw)?;
            let flat = unpack_bits(&raw, vis_bits);
            let visibility = flat.chunks(width).map(|c| c.to_vec()).collect();
            samples.push(Sample { rollout, visibility });
        }
        Ok(Dataset { samples, width, timesteps, rule, hidden, policy, split })
    }

    /// JSON debug export: rows and visibility as '0'/'1' strings.
    pub fn to_debug_json(&self) -> serde_json::Value {
        serde_json::json!({
            "width": self.width,
            "timesteps": self.timesteps,
            "radius": self.rule.radius(),
            "rule": self.rule.name(),
            "rule_table": self.rule.table().iter().map(|&b| u8::from(b)).collect::<Vec<_>>(),
            "hidden_patterns": self.hidden.patterns().collect::<Vec<_>>(),
            "policy": self.policy,
            "split": self.split,
            "samples": self.samples.iter().map(|s| serde_json::json!({
                "rows": s.rollout.rows().iter().map(|r| r.to_bit_string()).collect::<Vec<_>>(),
                "visibility": s.visibility.iter().map(|v| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::step;

    fn rule150() -> Rule {
        Rule::from_wolfram(150).unwrap()
    }

    #[test]
    fn explicit_hidden_set_passes_through() {
        let h = HiddenSet::explicit(1, &[2]).unwrap();
        assert_eq!(h.k(), 1);
        assert!(h.contains(2));
    }

    #[test]
    fn empty_hidden_set_masks_nothing() {
        let h = HiddenSet::explicit(1, &[]).unwrap();
        let ds = generate_dataset(
            &rule150(), &h, MaskPolicy::AllTimesteps, 16, 2, 8, 1, 0.5, Split::Train,
        )
        .unwrap();
        assert!(ds.samples.iter().all(|s| s.visibility.iter().flatten().all(|&v| v)));
    }

    #[test]
    fn duplicate_explicit_pattern_rejected() {
        assert!(HiddenSet::explicit(1, &[3, 3]).is_err());
    }

    #[test]
    fn random_hidden_set_reproducible() {
        let d = Rule::from_formula("D").unwrap();
        let a = HiddenSet::random(&d, 8, 42).unwrap();
        let b = HiddenSet::random(&d, 8, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.k(), 8);
        assert!(a.patterns().all(|p| p < 32));
    }

    #[test]
    fn hidden_k_out_of_range_rejected() {
        assert!(HiddenSet::random(&rule150(), 8, 0).is_err());
    }

    #[test]
    fn pattern_occurrences_hand_case() {
        // Row 00100, hidden {2 (=010)}: neighbourhoods are
        // i=0:000 i=1:001 i=2:010 i=3:100 i=4:000 -> only i=2.
        let h = HiddenSet::explicit(1, &[2]).unwrap();
        assert_eq!(pattern_occurrences(&Row::from_bits("00100"), &h), vec![2]);
    }

    #[test]
    fn pattern_occurrences_all_patterns_hidden() {
        let h = HiddenSet::explicit(1, &(0..8).collect::<Vec<_>>()).unwrap();
        assert_eq!(pattern_occurrences(&Row::from_bits("01011"), &h), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn policy_none_is_all_visible() {
        let h = HiddenSet::explicit(1, &[2]).unwrap();
        let ds = generate_dataset(
            &rule150(), &h, MaskPolicy::None, 32, 3, 4, 7, 0.5, Split::Train,
        )
        .unwrap();
        assert!(ds.samples.iter().all(|s| s.visibility.iter().flatten().all(|&v| v)));
    }

    #[test]
    fn leaky_policy_masks_only_first_transition() {
        let h = HiddenSet::explicit(1, &[2]).unwrap();
        let ds = generate_dataset(
            &rule150(), &h, MaskPolicy::LeakyT1Only, 32, 4, 16, 9, 0.5, Split::Train,
        )
        .unwrap();
        for s in &ds.samples {
            for t in 1..4 {
                assert!(s.visibility[t].iter().all(|&v| v));
            }
            let occ = pattern_occurrences(s.rollout.row(0), &ds.hidden);
            for i in 0..32 {
                assert_eq!(s.visibility[0][i], !occ.contains(&i));
            }
        }
    }

    #[test]
    fn mask_matches_recomputed_occurrences() {
        let h = HiddenSet::explicit(1, &[2, 5]).unwrap();
        let ds = generate_dataset(
            &rule150(), &h, MaskPolicy::AllTimesteps, 24, 3, 32, 5, 0.5, Split::Train,
        )
        .unwrap();
        for s in &ds.samples {
            for t in 0..3 {
                let occ = pattern_occurrences(s.rollout.row(t), &h);
                for i in 0..24 {
                    assert_eq!(s.visibility[t][i], !occ.contains(&i), "t={t} i={i}");
                }
            }
        }
    }

    #[test]
    fn rollouts_obey_rule() {
        let h = HiddenSet::explicit(1, &[2]).unwrap();
        let ds = generate_dataset(
            &rule150(), &h, MaskPolicy::AllTimesteps, 16, 3, 8, 3, 0.5, Split::Train,
        )
        .unwrap();
        for s in &ds.samples {
            for t in 0..3 {
                assert_eq!(
                    step(s.rollout.row(t), &ds.rule).unwrap(),
                    *s.rollout.row(t + 1)
                );
            }
        }
    }

    #[test]
    fn masked_positions_per_transition_near_w_over_8() {
        // Rule 150, hidden {2}, width 101, density 0.5: expect ~101/8 = 12.6
        // masked positions per transition.
        let h = HiddenSet::explicit(1, &[2]).unwrap();
        let ds = generate_dataset(
            &rule150(), &h, MaskPolicy::AllTimesteps, 101, 1, 1000, 11, 0.5, Split::Train,
        )
        .unwrap();
        let total: usize = ds
            .samples
            .iter()
            .map(|s| s.visibility[0].iter().filter(|&&v| !v).count())
            .sum();
        let mean = total as f64 / 1000.0;
        assert!((mean - 12.625).abs() < 0.5, "mean masked {mean}");
    }

    #[test]
    fn occurrence_rate_within_three_standard_errors() {
        let h = HiddenSet::explicit(1, &[2, 5]).unwrap();
        let n = 2000usize;
        let w = 101usize;
        let ds = generate_dataset(
            &rule150(), &h, MaskPolicy::AllTimesteps, w, 1, n, 13, 0.5, Split::Train,
        )
        .unwrap();
        let masked: usize = ds
            .samples
            .iter()
            .map(|s| s.visibility[0].iter().filter(|&&v| !v).count())
            .sum();
        let cells = (n * w) as f64;
        let p = 2.0 / 8.0;
        let se = (p * (1.0 - p) / cells).sqrt();
        let rate = masked as f64 / cells;
        assert!((rate - p).abs() < 3.0 * se, "rate {rate} expected {p} +- {}", 3.0 * se);
    }

    #[test]
    fn invalid_density_rejected() {
        let h = HiddenSet::explicit(1, &[2]).unwrap();
        assert!(generate_dataset(
            &rule150(), &h, MaskPolicy::AllTimesteps, 16, 2, 4, 1, 0.0, Split::Train
        )
        .is_err());
        assert!(generate_dataset(
            &rule150(), &h, MaskPolicy::AllTimesteps, 16, 2, 4, 1, 1.0, Split::Train
        )
        .is_err());
    }

    #[test]
    fn train_test_initial_rows_disjoint() {
        let h = HiddenSet::explicit(1, &[2]).unwrap();
        let train = generate_dataset(
            &rule150(), &h, MaskPolicy::AllTimesteps, 64, 1, 500, 17, 0.5, Split::Train,
        )
        .unwrap();
        let test = generate_dataset(
            &rule150(), &h, MaskPolicy::AllTimesteps, 64, 1, 500, 17, 0.5, Split::Test,
        )
        .unwrap();
        let train_rows: std::collections::HashSet<String> = train
            .samples
            .iter()
            .map(|s| s.rollout.row(0).to_bit_string())
            .collect();
        let collisions = test
            .samples
            .iter()
            .filter(|s| train_rows.contains(&s.rollout.row(0).to_bit_string()))
            .count();
        assert_eq!(collisions, 0);
    }

    #[test]
    fn container_round_trip() {
        let h = HiddenSet::explicit(1, &[2, 5]).unwrap();
        let ds = generate_dataset(
            &rule150(), &h, MaskPolicy::AllTimesteps, 19, 3, 12, 23, 0.5, Split::Test,
        )
        .unwrap();
        let mut buf = Vec::new();
        ds.write_container(&mut buf).unwrap();
        let back = Dataset::read_container(&mut buf.as_slice()).unwrap();
        assert_eq!(back.width, ds.width);
        assert_eq!(back.timesteps, ds.timesteps);
        assert_eq!(back.rule.table(), ds.rule.table());
        assert_eq!(back.hidden, ds.hidden);
        assert_eq!(back.policy, ds.policy);
        assert_eq!(back.split, ds.split);
        assert_eq!(back.samples.len(), ds.samples.len());
        for (a, b) in back.samples.iter().zip(&ds.samples) {
            assert_eq!(a.rollout, b.rollout);
            assert_eq!(a.visibility, b.visibility);
        }
    }

    #[test]
    fn debug_json_has_samples() {
        let h = HiddenSet::explicit(1, &[2]).unwrap();
        let ds = generate_dataset(
            &rule150(), &h, MaskPolicy::AllTimesteps, 8, 2, 3, 1, 0.5, Split::Train,
        )
        .unwrap();
        let v = ds.to_debug_json();
        assert_eq!(v["samples"].as_array().unwrap().len(), 3);
    }
}
