//! Per-balancing-area aggregation of non-intermittent existing generators by
//! 1-D K-means on variable cost.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::{GeneratorAsset, GeneratorKind};

/// Replaces the non-intermittent existing generators of each balancing area
/// with `min(k, count)` capacity-conserving aggregates. Intermittent and
/// candidate assets pass through untouched. Deterministic for a fixed seed.
pub fn cluster_generators(
    gens: &[GeneratorAsset],
    k: usize,
    seed: u64,
) -> Result<Vec<GeneratorAsset>> {
    if k < 1 {
        return Err(Error::Argument("cluster count k must be >= 1".into()));
    }
    let mut passthrough = Vec::new();
    let mut by_ba: BTreeMap<&str, Vec<&GeneratorAsset>> = BTreeMap::new();
    for g in gens {
        if g.kind == GeneratorKind::Existing && !g.is_intermittent() {
            by_ba.entry(&g.balancing_area).or_default().push(g);
        } else {
            passthrough.push(g.clone());
        }
    }

    let mut out = passthrough;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (ba, members) in by_ba {
        let costs: Vec<f64> = members.iter().map(|g| g.variable_cost).collect();
        let assignment = kmeans_1d(&costs, k.min(members.len()), &mut rng);
        let n_clusters = assignment.iter().copied().max().map_or(0, |m| m + 1);
        let mut groups: Vec<Vec<&GeneratorAsset>> = vec![Vec::new(); n_clusters];
        for (g, &c) in members.iter().zip(&assignment) {
            groups[c].push(g);
        }
        // Order aggregates by ascending cost for stable naming.
        groups.sort_by(|a, b| {
            let ca = a.iter().map(|g| g.variable_cost).fold(f64::INFINITY, f64::min);
            let cb = b.iter().map(|g| g.variable_cost).fold(f64::INFINITY, f64::min);
            ca.total_cmp(&cb)
        });
        for (rank, group) in groups.iter().enumerate() {
            debug_assert!(!group.is_empty());
            out.push(aggregate(ba, rank, group));
        }
    }
    Ok(out)
}

fn aggregate(ba: &str, rank: usize, members: &[&GeneratorAsset]) -> GeneratorAsset {
    let total_cap: f64 = members.iter().map(|g| g.capacity_mw).sum();
    let weighted = |f: fn(&GeneratorAsset) -> f64| -> f64 {
        if total_cap > 0.0 {
            members.iter().map(|g| f(g) * g.capacity_mw).sum::<f64>() / total_cap
        } else {
            members.iter().map(|g| f(g)).sum::<f64>() / members.len() as f64
        }
    };
    // Technology label follows the largest member (ties: lowest id).
    let lead = members
        .iter()
        .max_by(|a, b| {
            a.capacity_mw
                .total_cmp(&b.capacity_mw)
                .then_with(|| b.id.cmp(&a.id))
        })
        .expect("non-empty cluster");
    GeneratorAsset {
        id: format!("{ba}-agg{rank}"),
        balancing_area: ba.to_string(),
        technology: lead.technology,
        capacity_mw: total_cap,
        variable_cost: weighted(|g| g.variable_cost),
        fom_cost: weighted(|g| g.fom_cost),
        ramp_rate: weighted(|g| g.ramp_rate),
        kind: GeneratorKind::Existing,
        max_invest_mw: 0.0,
        invest_cost: 0.0,
    }
}

/// Lloyd's algorithm on scalars with k-means++ seeding. Returns a cluster
/// index per point.
fn kmeans_1d(points: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    if k >= n {
        // Singletons, ranked by value.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
        let mut assignment = vec![0; n];
        for (rank, &i) in order.iter().enumerate() {
            assignment[i] = rank;
        }
        return assignment;
    }

    // k-means++ seeding.
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.gen_range(0..n)]);
    while centroids.len() < k {
        let d2: Vec<f64> = points
            .iter()
            .map(|&p| {
                centroids
                    .iter()
                    .map(|&c| (p - c) * (p - c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = d2.iter().sum();
        let next = if total <= 0.0 {
            // All points coincide with a centroid; any point works.
            points[rng.gen_range(0..n)]
        } else {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = points[n - 1];
            for (&p, &w) in points.iter().zip(&d2) {
                if target < w {
                    chosen = p;
                    break;
                }
                target -= w;
            }
            chosen
        };
        centroids.push(next);
    }

    let mut assignment = vec![0usize; n];
    for _ in 0..200 {
        let mut changed = false;
        for (i, &p) in points.iter().enumerate() {
            let nearest = centroids
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| (p - *a).abs().total_cmp(&(p - *b).abs()))
                .map(|(idx, _)| idx)
                .unwrap();
            if assignment[i] != nearest {
                assignment[i] = nearest;
                changed = true;
            }
        }
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (&p, &c) in points.iter().zip(&assignment) {
            sums[c] += p;
            counts[c] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c] / counts[c] as f64;
            } else {
                // Re-seed an empty cluster at the point farthest from its centroid.
                let far = points
                    .iter()
                    .enumerate()
                    .max_by(|(i, &a), (j, &b)| {
                        let da = (a - centroids[assignment[*i]]).abs();
                        let db = (b - centroids[assignment[*j]]).abs();
                        da.total_cmp(&db)
                    })
                    .map(|(i, _)| i)
                    .unwrap();
                centroids[c] = points[far];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Compact cluster ids (drop empties) in order of first occurrence.
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    let mut next = 0;
    for c in assignment.iter_mut() {
        let id = *remap.entry(*c).or_insert_with(|| {
            let id = next;
            next += 1;
            id
        });
        *c = id;
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Technology;

    fn gen(id: &str, ba: &str, cost: f64, cap: f64) -> GeneratorAsset {
        GeneratorAsset {
            id: id.into(),
            balancing_area: ba.into(),
            technology: Technology::Gas,
            capacity_mw: cap,
            variable_cost: cost,
            fom_cost: 2.0 * cost,
            ramp_rate: 0.5,
            kind: GeneratorKind::Existing,
            max_invest_mw: 0.0,
            invest_cost: 0.0,
        }
    }

    /// Brute force: best partition of points into at most k groups by
    /// within-cluster sum of squares. 1-D optimum uses contiguous groups of
    /// the sorted sequence, so enumerate contiguous splits.
    fn brute_force_wcss(points: &[f64], k: usize) -> Vec<Vec<f64>> {
        let mut sorted = points.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let wcss = |range: &[f64]| -> f64 {
            let mean = range.iter().sum::<f64>() / range.len() as f64;
            range.iter().map(|p| (p - mean) * (p - mean)).sum()
        };
        fn splits(n: usize, k: usize) -> Vec<Vec<usize>> {
            // All ways to choose k-1 cut points in 1..n.
            fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if left == 0 {
                    out.push(cur.clone());
                    return;
                }
                for cut in start..n {
                    cur.push(cut);
                    rec(cut + 1, n, left - 1, cur, out);
                    cur.pop();
                }
            }
            let mut out = Vec::new();
            rec(1, n, k - 1, &mut Vec::new(), &mut out);
            out
        }
        let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
        for cuts in splits(n, k.min(n)) {
            let mut groups = Vec::new();
            let mut prev = 0;
            for &cut in cuts.iter().chain(std::iter::once(&n)) {
                groups.push(sorted[prev..cut].to_vec());
                prev = cut;
            }
            let score: f64 = groups.iter().map(|g| wcss(g)).sum();
            if best.as_ref().map_or(true, |(s, _)| score < *s) {
                best = Some((score, groups));
            }
        }
        best.unwrap().1
    }

    #[test]
    fn five_generator_fixture_matches_brute_force() {
        let costs = [10.0, 11.0, 50.0, 52.0, 90.0];
        let gens: Vec<_> = costs
            .iter()
            .enumerate()
            .map(|(i, &c)| gen(&format!("g{i}"), "ba1", c, 100.0))
            .collect();

        let oracle = brute_force_wcss(&costs, 3);
        assert_eq!(oracle, vec![vec![10.0, 11.0], vec![50.0, 52.0], vec![90.0]]);

        let clustered = cluster_generators(&gens, 3, 42).unwrap();
        assert_eq!(clustered.len(), 3);
        let mut caps: Vec<f64> = clustered.iter().map(|g| g.capacity_mw).collect();
        let mut vcs: Vec<f64> = clustered.iter().map(|g| g.variable_cost).collect();
        caps.sort_by(f64::total_cmp);
        vcs.sort_by(f64::total_cmp);
        assert_eq!(caps, vec![100.0, 200.0, 200.0]);
        assert_eq!(vcs, vec![10.5, 51.0, 90.0]);
    }

    #[test]
    fn fewer_points_than_clusters_stay_singletons() {
        let gens = vec![gen("a", "ba1", 10.0, 50.0), gen("b", "ba1", 90.0, 70.0)];
        let clustered = cluster_generators(&gens, 3, 0).unwrap();
        assert_eq!(clustered.len(), 2);
        let mut costs: Vec<f64> = clustered.iter().map(|g| g.variable_cost).collect();
        costs.sort_by(f64::total_cmp);
        assert_eq!(costs, vec![10.0, 90.0]);
    }

    #[test]
    fn capacity_conserved_per_ba_and_weighted_cost_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut gens = Vec::new();
        for ba in ["a", "b", "c"] {
            for i in 0..12 {
                gens.push(gen(
                    &format!("{ba}{i}"),
                    ba,
                    rng.gen_range(5.0..120.0),
                    rng.gen_range(1.0..500.0),
                ));
            }
        }
        let clustered = cluster_generators(&gens, 3, 99).unwrap();
        for ba in ["a", "b", "c"] {
            let cap_in: f64 = gens
                .iter()
                .filter(|g| g.balancing_area == ba)
                .map(|g| g.capacity_mw)
                .sum();
            let cap_out: f64 = clustered
                .iter()
                .filter(|g| g.balancing_area == ba)
                .map(|g| g.capacity_mw)
                .sum();
            assert!((cap_in - cap_out).abs() <= 1e-9 * cap_in);

            let wmean = |gs: &[GeneratorAsset]| -> f64 {
                let cap: f64 = gs.iter().map(|g| g.capacity_mw).sum();
                gs.iter().map(|g| g.variable_cost * g.capacity_mw).sum::<f64>() / cap
            };
            let in_ba: Vec<_> = gens
                .iter()
                .filter(|g| g.balancing_area == ba)
                .cloned()
                .collect();
            let out_ba: Vec<_> = clustered
                .iter()
                .filter(|g| g.balancing_area == ba)
                .cloned()
                .collect();
            assert!(
                (wmean(&in_ba) - wmean(&out_ba)).abs() <= 1e-9 * wmean(&in_ba).abs(),
                "capacity-weighted mean cost drifted in {ba}"
            );
        }
    }

    #[test]
    fn empty_input_is_empty_output() {
        assert!(cluster_generators(&[], 3, 0).unwrap().is_empty());
    }

    #[test]
    fn k_zero_rejected() {
        assert!(cluster_generators(&[], 0, 0).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let gens: Vec<_> = (0..20)
            .map(|i| gen(&format!("g{i}"), "ba1", (i * 7 % 13) as f64, 10.0 + i as f64))
            .collect();
        let a = cluster_generators(&gens, 3, 123).unwrap();
        let b = cluster_generators(&gens, 3, 123).unwrap();
        assert_eq!(a, b);
    }
}
