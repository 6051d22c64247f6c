//! Sparse LU factorization of a simplex basis with product-form updates.
//!
//! Pivots are chosen by a Markowitz search with threshold partial pivoting,
//! so singleton rows and columns (slack columns, network rows) are
//! eliminated without fill. Basis changes append eta columns until the
//! caller refactorizes.

// Dense kernels walk several parallel arrays by the same index.
#![allow(clippy::needless_range_loop)]

const THRESHOLD: f64 = 0.1;
const ABS_PIVOT_TOL: f64 = 1e-11;
const SEARCH_CANDIDATES: usize = 4;

#[derive(Debug)]
pub(crate) struct Singular {
    /// Basis positions left without a pivot.
    pub positions: Vec<usize>,
    /// Rows left without a pivot; pairing them with `positions` in any
    /// order and inserting logical columns yields a nonsingular basis.
    pub rows: Vec<usize>,
}

#[derive(Debug, Default, Clone)]
pub(crate) struct LuFactor {
    m: usize,
    prow: Vec<usize>,
    pcol: Vec<usize>,
    piv: Vec<f64>,
    l_start: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    u_start: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<f64>,
    eta_pos: Vec<usize>,
    eta_piv: Vec<f64>,
    eta_start: Vec<usize>,
    eta_idx: Vec<usize>,
    eta_val: Vec<f64>,
}

struct Buckets {
    lists: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(m: usize) -> Self {
        Self {
            lists: vec![Vec::new(); m + 2],
        }
    }

    fn push(&mut self, count: usize, item: usize) {
        if count < self.lists.len() {
            self.lists[count].push(item);
        }
    }
}

impl LuFactor {
    /// Factorizes the `m x m` matrix whose column `k` is `cols[k]`, given as
    /// `(row, value)` pairs with distinct rows.
    pub fn factorize(m: usize, cols: &[Vec<(usize, f64)>]) -> Result<Self, Singular> {
        debug_assert_eq!(cols.len(), m);
        let mut col_entries: Vec<Vec<(usize, f64)>> = cols
            .iter()
            .map(|c| c.iter().copied().filter(|&(_, v)| v != 0.0).collect())
            .collect();
        let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (j, c) in col_entries.iter().enumerate() {
            for &(i, _) in c {
                row_cols[i].push(j);
            }
        }
        let mut row_active = vec![true; m];
        let mut col_active = vec![true; m];
        let mut col_buckets = Buckets::new(m);
        let mut row_buckets = Buckets::new(m);
        for j in 0..m {
            col_buckets.push(col_entries[j].len(), j);
        }
        for i in 0..m {
            row_buckets.push(row_cols[i].len(), i);
        }

        let mut f = LuFactor {
            m,
            l_start: vec![0],
            u_start: vec![0],
            eta_start: vec![0],
            ..Default::default()
        };
        let mut scratch = vec![usize::MAX; m];
        let mut lrows: Vec<(usize, f64)> = Vec::new();
        let mut urow: Vec<(usize, f64)> = Vec::new();

        for _step in 0..m {
            let Some((p, q)) = find_pivot(
                &col_entries,
                &row_cols,
                &col_active,
                &row_active,
                &mut col_buckets,
                &mut row_buckets,
            ) else {
                break;
            };
            let pv = col_entries[q]
                .iter()
                .find(|&&(i, _)| i == p)
                .map(|&(_, v)| v)
                .expect("pivot entry present");

            // L multipliers from column q.
            lrows.clear();
            for &(i, v) in &col_entries[q] {
                if i != p {
                    lrows.push((i, v / pv));
                }
            }
            for &(i, _) in &lrows {
                if let Some(k) = row_cols[i].iter().position(|&c| c == q) {
                    row_cols[i].swap_remove(k);
                }
            }
            col_entries[q].clear();
            col_active[q] = false;
            row_active[p] = false;

            // U row from row p, eliminating it from the active submatrix.
            urow.clear();
            let pcols = std::mem::take(&mut row_cols[p]);
            for &j in &pcols {
                if j == q {
                    continue;
                }
                let col = &mut col_entries[j];
                let k = col.iter().position(|&(i, _)| i == p).expect("row entry");
                let (_, apj) = col.swap_remove(k);
                urow.push((j, apj));
                if lrows.is_empty() {
                    continue;
                }
                for (k, &(i, _)) in col.iter().enumerate() {
                    scratch[i] = k;
                }
                for &(i, l) in &lrows {
                    let delta = -l * apj;
                    if scratch[i] != usize::MAX {
                        col[scratch[i]].1 += delta;
                    } else {
                        col.push((i, delta));
                        row_cols[i].push(j);
                    }
                }
                for &(i, _) in col.iter() {
                    scratch[i] = usize::MAX;
                }
            }
            for &(j, _) in &urow {
                col_buckets.push(col_entries[j].len(), j);
            }
            for &(i, _) in &lrows {
                row_buckets.push(row_cols[i].len(), i);
            }

            f.prow.push(p);
            f.pcol.push(q);
            f.piv.push(pv);
            for &(i, l) in &lrows {
                f.l_idx.push(i);
                f.l_val.push(l);
            }
            f.l_start.push(f.l_idx.len());
            for &(j, u) in &urow {
                if u != 0.0 {
                    f.u_idx.push(j);
                    f.u_val.push(u);
                }
            }
            f.u_start.push(f.u_idx.len());
        }

        if f.prow.len() < m {
            return Err(Singular {
                positions: (0..m).filter(|&j| col_active[j]).collect(),
                rows: (0..m).filter(|&i| row_active[i]).collect(),
            });
        }
        Ok(f)
    }

    pub fn num_etas(&self) -> usize {
        self.eta_pos.len()
    }

    pub fn eta_nnz(&self) -> usize {
        self.eta_idx.len()
    }

    pub fn factor_nnz(&self) -> usize {
        self.l_idx.len() + self.u_idx.len() + self.m
    }

    /// Solves `B x = b`. `b` is indexed by row and is consumed as scratch;
    /// `x` is indexed by basis position.
    pub fn ftran(&self, b: &mut [f64], x: &mut [f64]) {
        for k in 0..self.prow.len() {
            let v = b[self.prow[k]];
            if v != 0.0 {
                for t in self.l_start[k]..self.l_start[k + 1] {
                    b[self.l_idx[t]] -= self.l_val[t] * v;
                }
            }
        }
        for k in (0..self.prow.len()).rev() {
            let mut v = b[self.prow[k]];
            for t in self.u_start[k]..self.u_start[k + 1] {
                v -= self.u_val[t] * x[self.u_idx[t]];
            }
            x[self.pcol[k]] = v / self.piv[k];
        }
        for e in 0..self.eta_pos.len() {
            let p = self.eta_pos[e];
            let xp = x[p] / self.eta_piv[e];
            if xp != 0.0 {
                for t in self.eta_start[e]..self.eta_start[e + 1] {
                    x[self.eta_idx[t]] -= self.eta_val[t] * xp;
                }
            }
            x[p] = xp;
        }
    }

    /// Solves `B^T y = c`. `c` is indexed by basis position and is consumed
    /// as scratch; `y` is indexed by row.
    pub fn btran(&self, c: &mut [f64], y: &mut [f64]) {
        for e in (0..self.eta_pos.len()).rev() {
            let p = self.eta_pos[e];
            let mut v = c[p];
            for t in self.eta_start[e]..self.eta_start[e + 1] {
                v -= self.eta_val[t] * c[self.eta_idx[t]];
            }
            c[p] = v / self.eta_piv[e];
        }
        for k in 0..self.prow.len() {
            let w = c[self.pcol[k]] / self.piv[k];
            y[self.prow[k]] = w;
            if w != 0.0 {
                for t in self.u_start[k]..self.u_start[k + 1] {
                    c[self.u_idx[t]] -= self.u_val[t] * w;
                }
            }
        }
        for k in (0..self.prow.len()).rev() {
            let r = self.prow[k];
            let mut v = y[r];
            for t in self.l_start[k]..self.l_start[k + 1] {
                v -= self.l_val[t] * y[self.l_idx[t]];
            }
            y[r] = v;
        }
    }

    /// Records the replacement of basis position `p` by a column whose
    /// ftran image is `alpha`.
    pub fn update(&mut self, p: usize, alpha: &[f64]) {
        self.eta_pos.push(p);
        self.eta_piv.push(alpha[p]);
        for (i, &a) in alpha.iter().enumerate() {
            if i != p && a.abs() > 1e-13 {
                self.eta_idx.push(i);
                self.eta_val.push(a);
            }
        }
        self.eta_start.push(self.eta_idx.len());
    }
}

fn col_max(col: &[(usize, f64)]) -> f64 {
    col.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()))
}

fn find_pivot(
    col_entries: &[Vec<(usize, f64)>],
    row_cols: &[Vec<usize>],
    col_active: &[bool],
    row_active: &[bool],
    col_buckets: &mut Buckets,
    row_buckets: &mut Buckets,
) -> Option<(usize, usize)> {
    let m = col_entries.len();
    let mut best: Option<(usize, usize, usize, f64)> = None; // (cost, p, q, |v|)
    let mut examined = 0usize;
    let better = |best: &Option<(usize, usize, usize, f64)>, cost: usize, mag: f64| match best {
        None => true,
        Some((c, _, _, b)) => cost < *c || (cost == *c && mag > *b),
    };
    for count in 1..=m {
        // columns with `count` entries
        let mut idx = 0;
        while idx < col_buckets.lists[count].len() {
            let j = col_buckets.lists[count][idx];
            if !col_active[j] || col_entries[j].len() != count {
                col_buckets.lists[count].swap_remove(idx);
                continue;
            }
            idx += 1;
            let cmax = col_max(&col_entries[j]);
            if cmax <= ABS_PIVOT_TOL {
                continue;
            }
            for &(i, v) in &col_entries[j] {
                let mag = v.abs();
                if mag >= THRESHOLD * cmax && mag > ABS_PIVOT_TOL {
                    let cost = (row_cols[i].len() - 1) * (count - 1);
                    if better(&best, cost, mag) {
                        best = Some((cost, i, j, mag));
                    }
                }
            }
            examined += 1;
            if done(&best, examined, count) {
                return best.map(|b| (b.1, b.2));
            }
        }
        // rows with `count` entries
        let mut idx = 0;
        while idx < row_buckets.lists[count].len() {
            let i = row_buckets.lists[count][idx];
            if !row_active[i] || row_cols[i].len() != count {
                row_buckets.lists[count].swap_remove(idx);
                continue;
            }
            idx += 1;
            for &j in &row_cols[i] {
                let col = &col_entries[j];
                let Some(&(_, v)) = col.iter().find(|&&(r, _)| r == i) else {
                    continue;
                };
                let mag = v.abs();
                if mag > ABS_PIVOT_TOL && mag >= THRESHOLD * col_max(col) {
                    let cost = (count - 1) * (col.len() - 1);
                    if better(&best, cost, mag) {
                        best = Some((cost, i, j, mag));
                    }
                }
            }
            examined += 1;
            if done(&best, examined, count) {
                return best.map(|b| (b.1, b.2));
            }
        }
        if let Some(b) = best {
            if b.0 <= count * count {
                return Some((b.1, b.2));
            }
        }
    }
    best.map(|b| (b.1, b.2))
}

fn done(best: &Option<(usize, usize, usize, f64)>, examined: usize, count: usize) -> bool {
    match best {
        Some((cost, ..)) => *cost <= (count - 1) * (count - 1) || examined >= SEARCH_CANDIDATES,
        None => false,
    }
}
