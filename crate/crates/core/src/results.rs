//! Tournament analytics: normalized scores, rankings, wins, pairwise payoff
//! and cooperation matrices, morality metrics and boxplot summaries.
//!
//! A strategy's normalized score in a repetition is its total payoff against
//! other strategies divided by the number of turns it played against them;
//! self-play is excluded there and from wins, but counts toward raw totals,
//! the matrices and the morality metrics. Quantiles use linear interpolation
//! between order statistics (position `(n - 1) * q`).

use serde::Serialize;
use thiserror::Error;

use crate::tournament::{InteractionArchive, TournamentSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResultsError {
    #[error("archive contains no matches")]
    EmptyArchive,
    #[error("archive has {archive} strategies but the tournament has {spec}")]
    PlayerCountMismatch { archive: usize, spec: usize },
    #[error("entry references player {index} but only {players} exist")]
    UnknownPlayer { index: usize, players: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultSet {
    pub names: Vec<String>,
    pub repetitions: usize,
    /// Per strategy, one value per repetition in which it met another strategy.
    pub normalized_scores: Vec<Vec<f64>>,
    /// Strategy indices by descending median normalized score.
    pub ranking: Vec<usize>,
    /// Per strategy, matches won in each repetition.
    pub wins: Vec<Vec<u32>>,
    /// Mean per-turn payoff of row against column; `None` if they never met.
    pub payoff_matrix: Vec<Vec<Option<f64>>>,
    /// Fraction of C plays by row against column; `None` if they never met.
    pub cooperation_rates: Vec<Vec<Option<f64>>>,
    /// Raw payoff summed over every match, self-play included.
    pub total_scores: Vec<f64>,
    cooperations: Vec<Vec<u64>>,
    plays: Vec<Vec<u64>>,
    participations: Vec<u64>,
    good_partner: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Morality {
    pub cooperation_rating: f64,
    pub good_partner_rating: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear-interpolation quantile of sorted data; `None` for empty input.
pub fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn median(values: &[f64]) -> Option<f64> {
    quantile(&sorted(values), 0.5)
}

pub fn five_number_summary(values: &[f64]) -> Option<FiveNumber> {
    let v = sorted(values);
    Some(FiveNumber {
        min: *v.first()?,
        q1: quantile(&v, 0.25)?,
        median: quantile(&v, 0.5)?,
        q3: quantile(&v, 0.75)?,
        max: *v.last()?,
    })
}

/// Indices ordered by descending key; `None` sorts last, ties keep index order.
fn order_descending<K: PartialOrd + Copy>(keys: &[Option<K>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&i, &j| match (keys[i], keys[j]) {
        (Some(a), Some(b)) => b.partial_cmp(&a).unwrap_or(std::cmp::Ordering::Equal),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    idx
}

fn ratio(num: f64, den: u64) -> Option<f64> {
    (den > 0).then(|| num / den as f64)
}

impl ResultSet {
    /// Aggregates an archive over `repetitions` repetitions.
    pub fn from_archive(archive: &InteractionArchive, repetitions: usize) -> Result<ResultSet, ResultsError> {
        if archive.is_empty() {
            return Err(ResultsError::EmptyArchive);
        }
        let n = archive.names.len();
        let repetitions = repetitions.max(archive.repetitions());
        let mut total_scores = vec![0.0; n];
        let mut rep_scores = vec![vec![0.0; repetitions]; n];
        let mut rep_turns = vec![vec![0u64; repetitions]; n];
        let mut wins = vec![vec![0u32; repetitions]; n];
        let mut payoffs = vec![vec![0.0; n]; n];
        let mut cooperations = vec![vec![0u64; n]; n];
        let mut plays = vec![vec![0u64; n]; n];
        let mut participations = vec![0u64; n];
        let mut good_partner = vec![0u64; n];

        for e in &archive.entries {
            let (a, b, rec) = (e.a, e.b, &e.record);
            for index in [a, b] {
                if index >= n {
                    return Err(ResultsError::UnknownPlayer { index, players: n });
                }
            }
            let len = rec.length() as u64;
            let (ca, cb) = (rec.cooperations_a() as u64, rec.cooperations_b() as u64);

            total_scores[a] += rec.score_a;
            total_scores[b] += rec.score_b;
            payoffs[a][b] += rec.score_a;
            payoffs[b][a] += rec.score_b;
            cooperations[a][b] += ca;
            cooperations[b][a] += cb;
            plays[a][b] += len;
            plays[b][a] += len;
            participations[a] += 1;
            participations[b] += 1;
            good_partner[a] += u64::from(ca >= cb);
            good_partner[b] += u64::from(cb >= ca);

            if a != b {
                rep_scores[a][e.repetition] += rec.score_a;
                rep_scores[b][e.repetition] += rec.score_b;
                rep_turns[a][e.repetition] += len;
                rep_turns[b][e.repetition] += len;
                if rec.score_a > rec.score_b {
                    wins[a][e.repetition] += 1;
                } else if rec.score_b > rec.score_a {
                    wins[b][e.repetition] += 1;
                }
            }
        }

        let normalized_scores: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..repetitions).filter_map(|r| ratio(rep_scores[i][r], rep_turns[i][r])).collect())
            .collect();
        let medians: Vec<Option<f64>> = normalized_scores.iter().map(|v| median(v)).collect();
        let payoff_matrix = (0..n).map(|i| (0..n).map(|j| ratio(payoffs[i][j], plays[i][j])).collect()).collect();
        let cooperation_rates =
            (0..n).map(|i| (0..n).map(|j| ratio(cooperations[i][j] as f64, plays[i][j])).collect()).collect();

        Ok(ResultSet {
            names: archive.names.clone(),
            repetitions,
            ranking: order_descending(&medians),
            normalized_scores,
            wins,
            payoff_matrix,
            cooperation_rates,
            total_scores,
            cooperations,
            plays,
            participations,
            good_partner,
        })
    }

    pub fn median_normalized_scores(&self) -> Vec<Option<f64>> {
        self.normalized_scores.iter().map(|v| median(v)).collect()
    }

    pub fn total_wins(&self) -> Vec<u32> {
        self.wins.iter().map(|w| w.iter().sum()).collect()
    }

    /// C plays by `i` against `j`, and the turns `i` played against `j`.
    pub fn cooperation_counts(&self, i: usize, j: usize) -> (u64, u64) {
        (self.cooperations[i][j], self.plays[i][j])
    }
}

pub fn build_result_set(archive: &InteractionArchive, spec: &TournamentSpec) -> Result<ResultSet, ResultsError> {
    if !archive.names.is_empty() && archive.names.len() != spec.players.len() {
        return Err(ResultsError::PlayerCountMismatch { archive: archive.names.len(), spec: spec.players.len() });
    }
    ResultSet::from_archive(archive, spec.repetitions)
}

/// `(name, median normalized score)` from best to worst.
pub fn rank_strategies(rs: &ResultSet) -> Vec<(String, Option<f64>)> {
    let medians = rs.median_normalized_scores();
    rs.ranking.iter().map(|&i| (rs.names[i].clone(), medians[i])).collect()
}

/// `(name, total wins)` from most to fewest wins; ties keep roster order.
pub fn rank_by_wins(rs: &ResultSet) -> Vec<(String, u32)> {
    let totals = rs.total_wins();
    let keys: Vec<Option<u32>> = totals.iter().copied().map(Some).collect();
    order_descending(&keys).into_iter().map(|i| (rs.names[i].clone(), totals[i])).collect()
}

/// Cooperation rating (share of C plays) and good-partner rating (share of
/// matches in which the strategy cooperated at least as often as its opponent).
pub fn morality_metrics(rs: &ResultSet) -> Vec<Morality> {
    (0..rs.names.len())
        .map(|i| {
            let c: u64 = rs.cooperations[i].iter().sum();
            let p: u64 = rs.plays[i].iter().sum();
            Morality {
                cooperation_rating: ratio(c as f64, p).unwrap_or(0.0),
                good_partner_rating: ratio(rs.good_partner[i] as f64, rs.participations[i]).unwrap_or(0.0),
            }
        })
        .collect()
}

/// Five-number summary of each strategy's normalized scores.
pub fn emit_boxplot_data(rs: &ResultSet) -> Vec<Option<FiveNumber>> {
    rs.normalized_scores.iter().map(|v| five_number_summary(v)).collect()
}
