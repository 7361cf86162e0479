//! Leader links and the leader-aware collective movements of weighted FSS.
//!
//! Each fish follows at most one heavier leader. Followers drift with their
//! leader's last displacement and contract toward (or spread from) the
//! weighted midpoint of themselves and their leader, which splits the school
//! into sub-schools around different leaders.

use rand::Rng;

use crate::fss::{volitive_move, Fish, School};
use crate::problem::Interval;

/// Follower -> leader links. Always a forest: out-degree at most one and no
/// cycles.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkGraph {
    leader_of: Vec<Option<usize>>,
    follower_weight_sum: Vec<f64>,
}

impl LinkGraph {
    pub fn new(n: usize) -> Self {
        Self {
            leader_of: vec![None; n],
            follower_weight_sum: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.leader_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leader_of.is_empty()
    }

    pub fn leader(&self, i: usize) -> Option<usize> {
        self.leader_of[i]
    }

    /// Sum of the weights of the direct followers of `i`.
    pub fn follower_weight_sum(&self, i: usize) -> f64 {
        self.follower_weight_sum[i]
    }

    pub fn link_count(&self) -> usize {
        self.leader_of.iter().flatten().count()
    }

    /// `(follower, leader)` pairs.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.leader_of
            .iter()
            .enumerate()
            .filter_map(|(a, l)| l.map(|l| (a, l)))
    }

    /// True if linking `a -> b` would close a cycle.
    pub fn would_cycle(&self, a: usize, b: usize) -> bool {
        let mut cur = Some(b);
        let mut steps = 0;
        while let Some(c) = cur {
            if c == a {
                return true;
            }
            steps += 1;
            if steps > self.leader_of.len() {
                return true;
            }
            cur = self.leader_of[c];
        }
        false
    }

    pub fn is_forest(&self) -> bool {
        self.leader_of
            .iter()
            .enumerate()
            .all(|(a, l)| match *l {
                None => true,
                Some(l) => l != a && l < self.len() && !self.reaches(l, a),
            })
    }

    fn reaches(&self, from: usize, target: usize) -> bool {
        let mut cur = Some(from);
        for _ in 0..=self.len() {
            match cur {
                None => return false,
                Some(c) if c == target => return true,
                Some(c) => cur = self.leader_of[c],
            }
        }
        true
    }

    fn refresh_sums(&mut self, weights: &[f64]) {
        self.follower_weight_sum.iter_mut().for_each(|s| *s = 0.0);
        for a in 0..self.leader_of.len() {
            if let Some(l) = self.leader_of[a] {
                self.follower_weight_sum[l] += weights[a];
            }
        }
    }

    fn set_leader(&mut self, a: usize, leader: Option<usize>, weights: &[f64]) {
        if let Some(old) = self.leader_of[a] {
            self.follower_weight_sum[old] -= weights[a];
        }
        if let Some(new) = leader {
            self.follower_weight_sum[new] += weights[a];
        }
        self.leader_of[a] = leader;
    }
}

/// One pass of link formation followed by the break pass.
///
/// For each fish `a` in index order a random `b != a` is drawn. A leaderless
/// `a` follows a heavier `b`. A fish already following `c` switches to `b`
/// when the weight sum of its own followers exceeds `b`'s weight. Links that
/// would close a cycle are refused. Afterwards every link whose follower is
/// heavier than its leader is broken.
pub fn link_formator<R: Rng + ?Sized>(links: &mut LinkGraph, weights: &[f64], rng: &mut R) {
    let n = weights.len();
    assert_eq!(links.len(), n, "link graph and school size differ");
    links.refresh_sums(weights);
    if n < 2 {
        return;
    }
    for a in 0..n {
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let target = match links.leader(a) {
            None if weights[b] > weights[a] => Some(b),
            Some(c) if c != b && links.follower_weight_sum(a) > weights[b] => Some(b),
            _ => None,
        };
        if let Some(b) = target {
            if !links.would_cycle(a, b) {
                links.set_leader(a, Some(b), weights);
            }
        }
    }
    for a in 0..n {
        if let Some(l) = links.leader(a) {
            if weights[a] > weights[l] {
                links.set_leader(a, None, weights);
            }
        }
    }
}

/// Drift vector of fish `i`: its own displacement blended with its leader's,
/// weighted by score improvement. Zero when the improvements cancel.
pub fn instinctive_with_leader(fishes: &[Fish], links: &LinkGraph, i: usize) -> Vec<f64> {
    let f = &fishes[i];
    let mut num: Vec<f64> = f.displacement.iter().map(|d| d * f.delta_score).collect();
    let mut den = f.delta_score;
    if let Some(l) = links.leader(i) {
        let lf = &fishes[l];
        den += lf.delta_score;
        for (n, d) in num.iter_mut().zip(&lf.displacement) {
            *n += d * lf.delta_score;
        }
    }
    if den == 0.0 {
        return vec![0.0; num.len()];
    }
    num.iter_mut().for_each(|v| *v /= den);
    num
}

/// Applies `x += rho * I_i` to every fish, with all drifts computed from the
/// state before any fish moves.
pub fn leader_instinctive(school: &mut School, links: &LinkGraph, rho: f64, bounds: &[Interval]) {
    let drifts: Vec<Vec<f64>> = (0..school.len())
        .map(|i| instinctive_with_leader(&school.fishes, links, i))
        .collect();
    for (f, drift) in school.fishes.iter_mut().zip(drifts) {
        for ((x, d), b) in f.position.iter_mut().zip(drift).zip(bounds) {
            *x = b.clamp(*x + rho * d);
        }
    }
}

/// Weighted midpoint of fish `i` and its leader; the fish's own position when
/// it has no leader.
pub fn local_barycenter(fishes: &[Fish], links: &LinkGraph, i: usize) -> Vec<f64> {
    let f = &fishes[i];
    match links.leader(i) {
        None => f.position.clone(),
        Some(l) => {
            let lf = &fishes[l];
            let total = f.weight + lf.weight;
            f.position
                .iter()
                .zip(&lf.position)
                .map(|(x, y)| (x * f.weight + y * lf.weight) / total)
                .collect()
        }
    }
}

/// Volitive movement of every fish relative to its local barycenter.
pub fn leader_volitive<R, G>(
    school: &mut School,
    links: &LinkGraph,
    step: &[f64],
    weight_increased: bool,
    bounds: &[Interval],
    mut rng_for: G,
) where
    R: Rng,
    G: FnMut(usize) -> R,
{
    let centers: Vec<Vec<f64>> = (0..school.len())
        .map(|i| local_barycenter(&school.fishes, links, i))
        .collect();
    for (i, (f, center)) in school.fishes.iter_mut().zip(centers).enumerate() {
        if links.leader(i).is_none() {
            continue;
        }
        let mut rng = rng_for(i);
        volitive_move(&mut f.position, &center, step, weight_increased, bounds, &mut rng);
    }
}
