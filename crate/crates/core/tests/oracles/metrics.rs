//! Ranking metrics by counting and threshold enumeration.

/// Position of item `i` in a descending ranking where equal scores keep
/// input order, computed by counting.
pub fn rank_of(scores: &[f64], i: usize) -> usize {
    (0..scores.len())
        .filter(|&j| scores[j] > scores[i] || (scores[j] == scores[i] && j <= i))
        .count()
}

pub fn brute_ap(scores: &[f64], labels: &[bool]) -> f64 {
    let pos: Vec<usize> = (0..scores.len()).filter(|&i| labels[i]).collect();
    pos.iter()
        .map(|&i| {
            let r = rank_of(scores, i);
            let hits = pos.iter().filter(|&&j| rank_of(scores, j) <= r).count();
            hits as f64 / r as f64
        })
        .sum::<f64>()
        / pos.len() as f64
}

/// (threshold, recall, precision) at every distinct score, high to low.
pub fn brute_pr(scores: &[f64], labels: &[bool]) -> Vec<(f64, f64, f64)> {
    let mut thresholds = scores.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let p = labels.iter().filter(|&&l| l).count() as f64;
    thresholds
        .into_iter()
        .map(|t| {
            let sel: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] >= t).collect();
            let tp = sel.iter().filter(|&&i| labels[i]).count() as f64;
            (t, tp / p, tp / sel.len() as f64)
        })
        .collect()
}
