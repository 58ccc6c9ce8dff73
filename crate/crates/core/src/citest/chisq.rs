use std::collections::HashMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::data::Dataset;
use crate::Scalar;

use super::{check_alpha, CiError, CiOutcome, CiQuery, CiTest};

/// Strata smaller than this are skipped.
const MIN_STRATUM: usize = 10;

/// Pearson chi-square test stratified by every configuration of the
/// conditioning set, with per-stratum statistics and degrees of freedom
/// summed.
#[derive(Debug, Clone)]
pub struct ChiSquare {
    index: HashMap<String, usize>,
    /// Dense level codes per column.
    codes: Vec<Vec<u32>>,
    levels: Vec<usize>,
    alpha: f64,
}

impl ChiSquare {
    /// Fails if any column holds a non-integer value.
    pub fn new<T: Scalar>(data: &Dataset<T>, alpha: f64) -> Result<Self, CiError> {
        let alpha = check_alpha(alpha)?;
        let mut codes = Vec::with_capacity(data.n_cols());
        let mut levels = Vec::with_capacity(data.n_cols());
        for (j, name) in data.columns().iter().enumerate() {
            let raw: Vec<f64> = data
                .column_at(j)
                .iter()
                .map(|&v| {
                    // Adding zero folds -0.0 into 0.0.
                    let f = v.to_f64_lossy() + 0.0;
                    if f.fract() == 0.0 {
                        Ok(f)
                    } else {
                        Err(CiError::NotCategorical {
                            column: name.clone(),
                            value: v.to_string(),
                        })
                    }
                })
                .collect::<Result<_, _>>()?;
            let mut distinct = raw.clone();
            distinct.sort_unstable_by(f64::total_cmp);
            distinct.dedup();
            codes.push(
                raw.iter()
                    .map(|v| distinct.binary_search_by(|d| d.total_cmp(v)).expect("value present") as u32)
                    .collect(),
            );
            levels.push(distinct.len());
        }
        let index = data
            .columns()
            .iter()
            .enumerate()
            .map(|(j, c)| (c.clone(), j))
            .collect();
        Ok(ChiSquare {
            index,
            codes,
            levels,
            alpha,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of distinct values observed in a column.
    pub fn support(&self, column: &str) -> Option<usize> {
        self.index.get(column).map(|&j| self.levels[j])
    }

    fn col(&self, name: &str) -> Result<usize, CiError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| CiError::UnknownVariable(name.to_string()))
    }

    /// Dense stratum id per row and the number of strata. Ids are
    /// re-densified after each conditioning column so keys never overflow.
    fn strata(&self, cond: &[usize]) -> (Vec<u32>, usize) {
        let n = self.codes.first().map_or(0, Vec::len);
        let mut ids = vec![0u32; n];
        let mut count = 1usize;
        for &c in cond {
            let radix = self.levels[c] as u64;
            let mut remap: HashMap<u64, u32> = HashMap::new();
            for (id, &code) in ids.iter_mut().zip(&self.codes[c]) {
                let key = *id as u64 * radix + code as u64;
                let next = remap.len() as u32;
                *id = *remap.entry(key).or_insert(next);
            }
            count = remap.len();
        }
        (ids, count)
    }
}

/// Groups of original levels per margin after pooling.
type Groups = Vec<Vec<usize>>;

fn nonempty(totals: &[u64]) -> (Groups, Vec<u64>) {
    totals
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > 0)
        .map(|(i, &t)| (vec![i], t))
        .unzip()
}

/// Index of the smallest total and of the next smallest, first index on ties.
fn two_smallest(totals: &[u64]) -> (usize, usize) {
    let mut order: Vec<usize> = (0..totals.len()).collect();
    order.sort_by_key(|&i| (totals[i], i));
    (order[0], order[1])
}

/// Merges the rarest level of either margin into the next rarest level of
/// the same margin until every expected cell count is at least one. Empty
/// levels are dropped.
fn pool_levels(row_tot: &[u64], col_tot: &[u64], n: f64) -> (Groups, Groups) {
    let (mut rows, mut rt) = nonempty(row_tot);
    let (mut cols, mut ct) = nonempty(col_tot);
    while rows.len() >= 2 && cols.len() >= 2 {
        let (r0, r1) = two_smallest(&rt);
        let (c0, c1) = two_smallest(&ct);
        if (rt[r0] * ct[c0]) as f64 / n >= 1.0 {
            break;
        }
        let (groups, totals, from, into) = if rt[r0] <= ct[c0] {
            (&mut rows, &mut rt, r0, r1)
        } else {
            (&mut cols, &mut ct, c0, c1)
        };
        let moved = groups.remove(from);
        let t = totals.remove(from);
        let into = if into > from { into - 1 } else { into };
        groups[into].extend(moved);
        totals[into] += t;
    }
    (rows, cols)
}

/// Pearson statistic and degrees of freedom of one stratum, or `None` when
/// the stratum is unusable.
fn stratum_statistic(table: &[u64], rows: usize, cols: usize) -> Option<(f64, usize)> {
    let row_tot: Vec<u64> = (0..rows).map(|r| table[r * cols..(r + 1) * cols].iter().sum()).collect();
    let col_tot: Vec<u64> = (0..cols).map(|c| (0..rows).map(|r| table[r * cols + c]).sum()).collect();
    let total: u64 = row_tot.iter().sum();
    if (total as usize) < MIN_STRATUM {
        return None;
    }
    let n = total as f64;
    let (rg, cg) = pool_levels(&row_tot, &col_tot, n);
    let (r, c) = (rg.len(), cg.len());
    if r < 2 || c < 2 {
        return None;
    }
    let pooled: Vec<f64> = rg
        .iter()
        .flat_map(|g| {
            cg.iter().map(move |h| {
                g.iter()
                    .flat_map(|&i| h.iter().map(move |&j| table[i * cols + j]))
                    .sum::<u64>() as f64
            })
        })
        .collect();
    let pr: Vec<f64> = (0..r).map(|i| pooled[i * c..(i + 1) * c].iter().sum()).collect();
    let pc: Vec<f64> = (0..c).map(|j| (0..r).map(|i| pooled[i * c + j]).sum()).collect();
    let mut stat = 0.0;
    for i in 0..r {
        for j in 0..c {
            let e = pr[i] * pc[j] / n;
            let d = pooled[i * c + j] - e;
            stat += d * d / e;
        }
    }
    Some((stat, (r - 1) * (c - 1)))
}

impl CiTest for ChiSquare {
    fn test(&self, q: &CiQuery) -> Result<CiOutcome, CiError> {
        let (a, b) = (self.col(q.a())?, self.col(q.b())?);
        let cond = q.cond().iter().map(|c| self.col(c)).collect::<Result<Vec<_>, _>>()?;
        let (ids, k) = self.strata(&cond);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (row, &s) in ids.iter().enumerate() {
            members[s as usize].push(row);
        }
        let (ra, cb) = (self.levels[a], self.levels[b]);
        let mut table = vec![0u64; ra * cb];
        let mut stat = 0.0;
        let mut dof = 0usize;
        for rows in members.iter().filter(|m| m.len() >= MIN_STRATUM) {
            table.iter_mut().for_each(|v| *v = 0);
            for &row in rows {
                table[self.codes[a][row] as usize * cb + self.codes[b][row] as usize] += 1;
            }
            if let Some((s, d)) = stratum_statistic(&table, ra, cb) {
                stat += s;
                dof += d;
            }
        }
        if dof == 0 {
            return Ok(CiOutcome::inconclusive());
        }
        let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        Ok(CiOutcome::from_p_value(dist.sf(stat), stat, self.alpha))
    }
}
