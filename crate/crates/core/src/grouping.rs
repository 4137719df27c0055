//! Partitioning words into groups, the unit of coordinated variation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;
use crate::layout::WordleLayout;
use crate::rng::{streams, SplitMix64};

/// Smallest positional group count at entropy 0.
pub const POSITIONAL_MIN_GROUPS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupingError {
    #[error("group count {groups} outside [1, {words}]")]
    GroupCountOutOfRange { groups: usize, words: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupingStrategy {
    Random,
    Positional,
}

impl GroupingStrategy {
    pub fn name(self) -> &'static str {
        match self {
            GroupingStrategy::Random => "random",
            GroupingStrategy::Positional => "positional",
        }
    }
}

impl fmt::Display for GroupingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupingStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(GroupingStrategy::Random),
            "positional" => Ok(GroupingStrategy::Positional),
            _ => Err(format!("unknown grouping strategy {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAssignment {
    pub group_count: usize,
    pub group_of: Vec<usize>,
}

impl GroupAssignment {
    pub fn members(&self, group: usize) -> impl Iterator<Item = usize> + '_ {
        self.group_of.iter().enumerate().filter(move |(_, &g)| g == group).map(|(i, _)| i)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.group_count];
        for &g in &self.group_of {
            sizes[g] += 1;
        }
        sizes
    }

    /// Every index in range and every group non-empty.
    pub fn is_partition(&self) -> bool {
        self.group_of.iter().all(|&g| g < self.group_count) && self.sizes().iter().all(|&s| s > 0)
    }
}

/// `round_half_up(g_min + entropy * (n - g_min))`, clamped to `[1, n]`.
pub fn group_count_for_entropy(strategy: GroupingStrategy, n_words: usize, entropy: f64) -> usize {
    let n = n_words.max(1);
    let g_min = match strategy {
        GroupingStrategy::Random => 1,
        GroupingStrategy::Positional => POSITIONAL_MIN_GROUPS.min(n),
    };
    let e = entropy.clamp(0.0, 1.0);
    let raw = g_min as f64 + e * (n - g_min) as f64;
    ((raw + 0.5).floor() as usize).clamp(1, n)
}

fn check_range(g: usize, n: usize) -> Result<(), GroupingError> {
    if g == 0 || g > n {
        return Err(GroupingError::GroupCountOutOfRange { groups: g, words: n });
    }
    Ok(())
}

/// Seeded Fisher-Yates shuffle of word indices dealt round-robin into `g` groups.
/// The shuffle consumes the [`streams::GROUPING`] stream of `seed`.
pub fn group_random(n_words: usize, g: usize, seed: u64) -> Result<GroupAssignment, GroupingError> {
    check_range(g, n_words)?;
    let mut order: Vec<usize> = (0..n_words).collect();
    SplitMix64::new(seed).split(streams::GROUPING).shuffle(&mut order);
    let mut group_of = vec![0; n_words];
    for (slot, &word) in order.iter().enumerate() {
        group_of[word] = slot % g;
    }
    Ok(GroupAssignment { group_count: g, group_of })
}

/// Farthest-point seeds over word anchors, then nearest-seed assignment.
///
/// The first seed is the word nearest the canvas center. Each further seed is
/// the word whose distance to its closest chosen seed is largest. Ties go to
/// the lower word index, and assignment ties go to the lower seed index. Group
/// `k` is the group of the `k`-th seed.
pub fn group_positional(layout: &WordleLayout, g: usize) -> Result<GroupAssignment, GroupingError> {
    let anchors: Vec<Point> = layout.words.iter().map(|w| w.anchor).collect();
    group_points(&anchors, layout.canvas.center(), g)
}

pub fn group_points(anchors: &[Point], center: Point, g: usize) -> Result<GroupAssignment, GroupingError> {
    let n = anchors.len();
    check_range(g, n)?;

    let argmax = |score: &dyn Fn(usize) -> f64| {
        let mut best = 0;
        for i in 1..n {
            if score(i) > score(best) {
                best = i;
            }
        }
        best
    };

    let first = argmax(&|i| -anchors[i].distance_sq(&center));
    let mut seeds = vec![first];
    let mut nearest: Vec<f64> = anchors.iter().map(|a| a.distance_sq(&anchors[first])).collect();
    while seeds.len() < g {
        let next = argmax(&|i| if seeds.contains(&i) { f64::NEG_INFINITY } else { nearest[i] });
        seeds.push(next);
        for (i, a) in anchors.iter().enumerate() {
            nearest[i] = nearest[i].min(a.distance_sq(&anchors[next]));
        }
    }

    let group_of = anchors
        .iter()
        .map(|a| {
            let mut best = 0;
            for (k, &s) in seeds.iter().enumerate().skip(1) {
                if a.distance_sq(&anchors[s]) < a.distance_sq(&anchors[seeds[best]]) {
                    best = k;
                }
            }
            best
        })
        .collect();
    Ok(GroupAssignment { group_count: g, group_of })
}
