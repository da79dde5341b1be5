//! Progress logs of `w(slot n_max)` over time, and their aggregation into
//! empirical distributions across independent runs.

use std::fmt::Write as _;

use super::SearchError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgressRecord {
    pub seconds: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProgressLog {
    /// `key=value` pairs written as comment lines above the CSV header.
    pub header: Vec<(String, String)>,
    pub records: Vec<ProgressRecord>,
}

impl ProgressLog {
    pub fn push(&mut self, seconds: f64, w: f64) {
        self.records.push(ProgressRecord { seconds, w });
    }

    pub fn final_weight(&self) -> Option<f64> {
        self.records.last().map(|r| r.w)
    }

    /// Best known weight at time `t`: the last record at or before `t`.
    pub fn weight_at(&self, t: f64) -> Option<f64> {
        self.records
            .iter()
            .take_while(|r| r.seconds <= t)
            .map(|r| r.w)
            .fold(None, |best: Option<f64>, w| Some(best.map_or(w, |b| b.min(w))))
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            writeln!(out, "# {k}={v}").unwrap();
        }
        out.push_str("seconds,w_nmax\n");
        for r in &self.records {
            writeln!(out, "{:?},{:?}", r.seconds, r.w).unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, SearchError> {
        let bad = |line: usize, message: String| SearchError::Progress { line, message };
        let mut log = ProgressLog::default();
        let mut seen_header = false;
        for (i, line) in text.lines().enumerate() {
            let ln = i + 1;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(c) = t.strip_prefix('#') {
                if let Some((k, v)) = c.trim().split_once('=') {
                    log.header.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if !seen_header {
                if t != "seconds,w_nmax" {
                    return Err(bad(ln, format!("expected header \"seconds,w_nmax\", found {t:?}")));
                }
                seen_header = true;
                continue;
            }
            let (s, w) = t
                .split_once(',')
                .ok_or_else(|| bad(ln, format!("expected two columns, found {t:?}")))?;
            let seconds = s.trim().parse().map_err(|_| bad(ln, format!("bad seconds {s:?}")))?;
            let w = w.trim().parse().map_err(|_| bad(ln, format!("bad weight {w:?}")))?;
            log.push(seconds, w);
        }
        if !seen_header {
            return Err(bad(1, "missing \"seconds,w_nmax\" header".into()));
        }
        Ok(log)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfRow {
    pub t: f64,
    pub w: f64,
    pub fraction: f64,
}

/// Distinct weights appearing in any log, ascending: the jump points of
/// every empirical distribution built from those logs.
pub fn weight_grid(logs: &[ProgressLog]) -> Vec<f64> {
    let mut ws: Vec<f64> = logs.iter().flat_map(|l| l.records.iter().map(|r| r.w)).collect();
    ws.sort_by(f64::total_cmp);
    ws.dedup();
    ws
}

/// For each time `t` and grid weight `w`, the fraction of runs whose best
/// weight at `t` is `<= w`. Runs with no record by `t` count as not reached.
pub fn aggregate_progress(logs: &[ProgressLog], times: &[f64], grid: &[f64]) -> Vec<CdfRow> {
    let n = logs.len().max(1) as f64;
    let mut rows = Vec::with_capacity(times.len() * grid.len());
    for &t in times {
        let at_t: Vec<Option<f64>> = logs.iter().map(|l| l.weight_at(t)).collect();
        for &w in grid {
            let hits = at_t.iter().filter(|x| x.is_some_and(|x| x <= w)).count();
            rows.push(CdfRow {
                t,
                w,
                fraction: hits as f64 / n,
            });
        }
    }
    rows
}

pub fn cdf_csv(rows: &[CdfRow]) -> String {
    let mut out = String::from("t_seconds,w,fraction\n");
    for r in rows {
        writeln!(out, "{:?},{:?},{:?}", r.t, r.w, r.fraction).unwrap();
    }
    out
}
