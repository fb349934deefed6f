//! Ordered suspiciousness rankings with max tie-breaking.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::matrix::MethodId;

/// Per-method suspiciousness scores.
pub type ScoreMap = BTreeMap<MethodId, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedMethod {
    pub rank: usize,
    pub method: MethodId,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ranking {
    entries: Vec<RankedMethod>,
}

impl Ranking {
    pub fn entries(&self) -> &[RankedMethod] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rank_of(&self, method: &str) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.method.as_str() == method)
            .map(|e| e.rank)
    }

    pub fn score_of(&self, method: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.method.as_str() == method)
            .map(|e| e.score)
    }

    /// Entries whose rank is at most `k`. Tie groups straddling `k` are dropped whole.
    pub fn top(&self, k: usize) -> Ranking {
        Ranking {
            entries: self.entries.iter().filter(|e| e.rank <= k).cloned().collect(),
        }
    }

    /// `rank,method,score` with a header line and `\n` endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,method,score\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{}\n",
                e.rank,
                csv_field(e.method.as_str()),
                format_score(e.score)
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("ranking serialises");
        s.push('\n');
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Sorts methods by descending score. Every member of a tie group gets the
/// group's worst position; members are listed by method name.
pub fn rank(scores: &ScoreMap) -> Ranking {
    let mut sorted: Vec<(&MethodId, f64)> = scores.iter().map(|(m, &s)| (m, s)).collect();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut entries = Vec::with_capacity(sorted.len());
    let mut start = 0;
    while start < sorted.len() {
        let score = sorted[start].1;
        let end = sorted[start..]
            .iter()
            .position(|(_, s)| *s != score)
            .map_or(sorted.len(), |off| start + off);
        for (method, score) in &sorted[start..end] {
            entries.push(RankedMethod {
                rank: end,
                method: (*method).clone(),
                score: *score,
            });
        }
        start = end;
    }
    Ranking { entries }
}

/// Six significant digits, trailing zeros trimmed, like C's `%g`.
pub fn format_score(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    const SIG: i32 = 6;
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..SIG).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores(pairs: &[(&str, f64)]) -> ScoreMap {
        pairs.iter().map(|(m, s)| (MethodId::new(*m), *s)).collect()
    }

    fn triples(r: &Ranking) -> Vec<(String, f64, usize)> {
        r.entries()
            .iter()
            .map(|e| (e.method.to_string(), e.score, e.rank))
            .collect()
    }

    #[test]
    fn strict_order() {
        let r = rank(&scores(&[("b", 4.0), ("a", 5.0)]));
        assert_eq!(triples(&r), [("a".into(), 5.0, 1), ("b".into(), 4.0, 2)]);
    }

    #[test]
    fn ties_take_the_worst_position() {
        let r = rank(&scores(&[("b", 1.0), ("c", 0.0), ("a", 1.0)]));
        assert_eq!(
            triples(&r),
            [
                ("a".into(), 1.0, 2),
                ("b".into(), 1.0, 2),
                ("c".into(), 0.0, 3)
            ]
        );
    }

    #[test]
    fn empty_scores() {
        assert!(rank(&ScoreMap::new()).is_empty());
    }

    #[test]
    fn top_k_drops_partial_tie_groups() {
        let r = rank(&scores(&[("a", 3.0), ("b", 2.0), ("c", 2.0)]));
        assert_eq!(r.top(2).len(), 1);
        assert_eq!(r.top(3).len(), 3);
    }

    #[test]
    fn score_formatting() {
        assert_eq!(format_score(5.0), "5");
        assert_eq!(format_score(4.005001), "4.005");
        assert_eq!(format_score(32.07604), "32.076");
        assert_eq!(format_score(0.5), "0.5");
        assert_eq!(format_score(1e-9), "1e-09");
        assert_eq!(format_score(1234567.0), "1.23457e+06");
        assert_eq!(format_score(0.000123456789), "0.000123457");
        assert_eq!(format_score(0.0), "0");
    }

    #[test]
    fn csv_output() {
        let r = rank(&scores(&[("getType", 5.0), ("resolveType", 4.0)]));
        assert_eq!(r.to_csv(), "rank,method,score\n1,getType,5\n2,resolveType,4\n");
    }
}
