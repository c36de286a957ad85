//! Jack polynomials evaluated on eigenvalue spectra.
//!
//! Internally everything works with the scaled value `T_k(x) = C_k(x) / |k|!`,
//! which stays within floating-point range far longer than `C` or `J`.
//! For `n` variables it satisfies the branching recurrence
//!
//! ```text
//! T_k(x_1..x_n) = sum_mu R(k, mu) * prod_i x_n^{d_i} / d_i! * T_mu(x_1..x_{n-1})
//! ```
//!
//! over partitions `mu` obtained from `k` by removing a horizontal strip with
//! `d_i = k_i - mu_i` cells in row `i`. `R` is a product over the cells of
//! `mu` of lower-hook ratios (columns the strip misses) and upper-hook ratios
//! (columns it meets), so `0 < R <= 1`.
//!
//! Two variables use the explicit form `T_(a,b) = T_(a-b) * prod_s alpha x_1 x_2 / (s (1 + alpha (a - b + s)))`
//! since the strip count grows like `K^4` there and the CDF series need
//! degrees in the hundreds.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::algebra::DivisionAlgebra;
use crate::error::{domain, Result};
use crate::partition::{enumerate_partitions, ln_hook_product, Partition};
use crate::special::{ln_factorial, ln_pochhammer_pos};

/// Eigenvalues standing in for a Hermitian matrix argument, sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralArgument {
    eigs: Vec<f64>,
}

impl SpectralArgument {
    pub fn new(mut eigs: Vec<f64>) -> Result<Self> {
        if eigs.is_empty() {
            return domain("a spectral argument needs at least one eigenvalue");
        }
        if let Some(bad) = eigs.iter().find(|v| !v.is_finite()) {
            return domain(format!("eigenvalues must be finite (got {bad})"));
        }
        for v in eigs.iter_mut() {
            // -0.0 and 0.0 must hash and sort identically.
            if *v == 0.0 {
                *v = 0.0;
            }
        }
        eigs.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { eigs })
    }

    pub fn from_slice(eigs: &[f64]) -> Result<Self> {
        Self::new(eigs.to_vec())
    }

    pub fn ones(m: usize) -> Self {
        Self { eigs: vec![1.0; m.max(1)] }
    }

    pub fn zeros(m: usize) -> Self {
        Self { eigs: vec![0.0; m.max(1)] }
    }

    pub fn len(&self) -> usize {
        self.eigs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigs
    }

    pub fn trace(&self) -> f64 {
        self.eigs.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.eigs.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn abs_sum(&self) -> f64 {
        self.eigs.iter().map(|v| v.abs()).sum()
    }

    /// Eigenvalue-wise map, re-sorted.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.eigs.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }
}

/// Partitions of one degree plus, for the recurrence, their strip lists.
struct DegreeBlock {
    parts: Vec<Partition>,
    lens: Vec<u8>,
    // strips of local partition idx live in strip_start[idx]..strip_start[idx + 1]
    strip_start: Vec<usize>,
    mu: Vec<u32>,
    coeff: Vec<f64>,
    // m entries per strip: cells removed from each row
    drops: Vec<u16>,
}

#[derive(Clone)]
struct Plan {
    m: usize,
    max_degree: usize,
    with_strips: bool,
    degree_start: Vec<usize>,
    blocks: Vec<Arc<DegreeBlock>>,
}

impl Plan {
    fn empty(m: usize, with_strips: bool) -> Plan {
        let block = DegreeBlock {
            parts: vec![Partition::empty()],
            lens: vec![0],
            strip_start: vec![0, 0],
            mu: Vec::new(),
            coeff: Vec::new(),
            drops: Vec::new(),
        };
        Plan { m, max_degree: 0, with_strips, degree_start: vec![0, 1], blocks: vec![Arc::new(block)] }
    }

    fn degree_range(&self, k: usize) -> std::ops::Range<usize> {
        self.degree_start[k]..self.degree_start[k + 1]
    }

    /// Global index of `p`, located by binary search in its (reverse-lex sorted) degree block.
    fn index_of(&self, p: &Partition) -> usize {
        let k = p.weight() as usize;
        let local =
            self.blocks[k].parts.binary_search_by(|q| p.parts().cmp(q.parts())).expect("partition present in plan");
        self.degree_start[k] + local
    }

    /// A copy of `self` extended to every degree `<= max_degree`. Existing blocks are shared.
    fn extended(&self, max_degree: usize, alpha: f64) -> Plan {
        let mut plan = self.clone();
        if max_degree <= plan.max_degree {
            return plan;
        }
        let mut builder = plan.with_strips.then(|| StripBuilder::new(&plan, max_degree, alpha));
        for k in plan.max_degree + 1..=max_degree {
            let parts = enumerate_partitions(k as u32, plan.m, None);
            let first = *plan.degree_start.last().unwrap();
            let mut block = DegreeBlock {
                lens: parts.iter().map(|p| p.len() as u8).collect(),
                strip_start: vec![0],
                mu: Vec::new(),
                coeff: Vec::new(),
                drops: Vec::new(),
                parts,
            };
            if let Some(b) = builder.as_mut() {
                for (off, p) in block.parts.iter().enumerate() {
                    b.register(p, first + off);
                }
                let parts = std::mem::take(&mut block.parts);
                for p in &parts {
                    b.push_strips(p, &mut block);
                }
                block.parts = parts;
            }
            plan.degree_start.push(first + block.parts.len());
            plan.blocks.push(Arc::new(block));
        }
        plan.max_degree = max_degree;
        plan
    }
}

/// Builds strip lists. For a horizontal strip `kappa / mu`, column `j` in
/// block `r` (columns `kappa_{r+1} < j <= kappa_r`, all of height `r`) is met
/// by the strip iff `j > mu_r`, so every hook ratio over a run of cells in one
/// row and one block is a ratio of products `prod_t (c + alpha t)`, read off
/// prefix tables of logs.
struct StripBuilder {
    m: usize,
    // ln_prod[c][t] = sum_{s=1}^{t} ln(c + alpha s)
    ln_prod: Vec<Vec<f64>>,
    index: PartIndex,
}

enum PartIndex {
    Dense { base: usize, slots: Vec<u32> },
    Sparse(HashMap<Vec<u32>, u32>),
}

impl StripBuilder {
    fn new(plan: &Plan, max_degree: usize, alpha: f64) -> Self {
        let m = plan.m;
        let ln_prod = (0..=m + 1)
            .map(|c| {
                let mut v = vec![0.0; max_degree + 3];
                for t in 1..v.len() {
                    v[t] = v[t - 1] + (c as f64 + alpha * t as f64).ln();
                }
                v
            })
            .collect();
        let base = max_degree + 1;
        let index = match base.checked_pow(m as u32) {
            Some(n) if n <= 1 << 24 => PartIndex::Dense { base, slots: vec![u32::MAX; n] },
            _ => PartIndex::Sparse(HashMap::new()),
        };
        let mut b = StripBuilder { m, ln_prod, index };
        for (k, block) in plan.blocks.iter().enumerate() {
            for (off, p) in block.parts.iter().enumerate() {
                b.register(p, plan.degree_start[k] + off);
            }
        }
        b
    }

    fn register(&mut self, p: &Partition, idx: usize) {
        match &mut self.index {
            PartIndex::Dense { base, slots } => {
                let key = dense_key(p.parts(), *base);
                slots[key] = idx as u32;
            }
            PartIndex::Sparse(map) => {
                map.insert(p.parts().to_vec(), idx as u32);
            }
        }
    }

    fn lookup(&self, mu: &[u32]) -> u32 {
        match &self.index {
            PartIndex::Dense { base, slots } => slots[dense_key(mu, *base)],
            PartIndex::Sparse(map) => {
                let l = mu.iter().rposition(|&v| v > 0).map_or(0, |i| i + 1);
                map[&mu[..l]]
            }
        }
    }

    /// `sum_{t=ta}^{tb} ln(c + alpha t)`; `c >= 1` whenever `ta == 0`.
    fn span(&self, c: usize, ta: i64, tb: i64) -> f64 {
        if ta > tb {
            return 0.0;
        }
        let row = &self.ln_prod[c];
        if ta >= 1 {
            row[tb as usize] - row[ta as usize - 1]
        } else {
            (c as f64).ln() + row[tb as usize]
        }
    }

    fn push_strips(&self, kappa: &Partition, block: &mut DegreeBlock) {
        let l = kappa.len();
        let k: Vec<i64> = (0..=l).map(|i| kappa.part(i) as i64).collect();
        let mut mu = vec![0u32; self.m];
        self.recurse(&k, 0, 0.0, &mut mu, block);
        block.strip_start.push(block.mu.len());
    }

    // Rows are fixed top to bottom; choosing mu_r settles every factor that
    // involves block r, i.e. cells (i, j) with i <= r and j in block r.
    fn recurse(&self, k: &[i64], r: usize, acc: f64, mu: &mut Vec<u32>, block: &mut DegreeBlock) {
        let l = k.len() - 1;
        if r == l {
            block.mu.push(self.lookup(mu));
            block.coeff.push(acc.exp());
            for (i, &mi) in mu.iter().enumerate().take(self.m) {
                block.drops.push((k.get(i).copied().unwrap_or(0) - mi as i64) as u16);
            }
            return;
        }
        let (lo, hi) = (k[r + 1], k[r]);
        for mr in (lo..=hi).rev() {
            mu[r] = mr as u32;
            let mut a = acc;
            // row r inside its own block: unchanged columns kappa_{r+1} < j <= mu_r
            // (1 + alpha (mu_r - j)) / (1 + alpha (kappa_r - j))
            a += self.span(1, 0, mr - lo - 1) - self.span(1, hi - mr, hi - lo - 1);
            // rows i < r across block r (1-based heights: row i+1, block r+1)
            for i in 0..r {
                let mi = mu[i] as i64;
                let ki = k[i];
                let c_u = r - i + 1;
                // unchanged columns lo < j <= mr
                a += self.span(c_u, mi - mr, mi - lo - 1) - self.span(c_u, ki - mr, ki - lo - 1);
                // changed columns mr < j <= hi:
                // (r - 1 - i + alpha (mu_i - j + 1)) / (r - i + alpha (kappa_i - j + 1))
                a += self.span(r - i - 1, mi - hi + 1, mi - mr) - self.span(r - i, ki - hi + 1, ki - mr);
            }
            self.recurse(k, r + 1, a, mu, block);
        }
        mu[r] = 0;
    }
}

fn dense_key(parts: &[u32], base: usize) -> usize {
    parts.iter().rev().fold(0usize, |acc, &p| acc * base + p as usize)
}

/// Memoized evaluation plans for one algebra, keyed by the number of variables.
///
/// Plans only ever grow; indices of existing partitions never move, so an
/// evaluator holding an older plan stays consistent with a newer one.
pub struct JackTable {
    algebra: DivisionAlgebra,
    plans: Mutex<HashMap<(usize, bool), Arc<Plan>>>,
}

impl JackTable {
    pub fn new(algebra: DivisionAlgebra) -> Self {
        Self { algebra, plans: Mutex::new(HashMap::new()) }
    }

    /// Process-wide table for `algebra`.
    pub fn shared(algebra: DivisionAlgebra) -> &'static JackTable {
        static TABLES: [OnceLock<JackTable>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
        let slot = match algebra.beta() {
            1 => 0,
            2 => 1,
            4 => 2,
            _ => 3,
        };
        TABLES[slot].get_or_init(|| JackTable::new(algebra))
    }

    pub fn algebra(&self) -> DivisionAlgebra {
        self.algebra
    }

    fn plan(&self, m: usize, degree: usize, recurrence: bool) -> Arc<Plan> {
        let mut plans = self.plans.lock().unwrap_or_else(|e| e.into_inner());
        let key = (m, recurrence);
        if let Some(p) = plans.get(&key) {
            if p.max_degree >= degree {
                return Arc::clone(p);
            }
        }
        let base = plans.get(&key).cloned().unwrap_or_else(|| Arc::new(Plan::empty(m, recurrence)));
        let target = degree.max(base.max_degree + base.max_degree / 4 + 4).max(INITIAL_DEGREE);
        let plan = Arc::new(base.extended(target, self.algebra.alpha_f64()));
        plans.insert(key, Arc::clone(&plan));
        plan
    }

    /// Degree-by-degree evaluator of all `T_k(x)` with `l(k) <= len(x)`.
    pub fn evaluator(&self, x: &SpectralArgument) -> JackEvaluator<'_> {
        JackEvaluator::new(self, x, false)
    }

    /// Evaluator that uses the branching recurrence for every variable count.
    pub fn recurrence_evaluator(&self, x: &SpectralArgument) -> JackEvaluator<'_> {
        JackEvaluator::new(self, x, true)
    }

    /// `C_k(x) / |k|!`.
    pub fn scaled(&self, p: &Partition, x: &SpectralArgument) -> f64 {
        if p.len() > x.len() {
            return 0.0;
        }
        let mut ev = self.evaluator(x);
        ev.value(p)
    }

    pub fn jack_c(&self, p: &Partition, x: &SpectralArgument) -> f64 {
        let t = self.scaled(p, x);
        if t == 0.0 {
            return 0.0;
        }
        t * ln_factorial(p.weight()).exp()
    }

    pub fn jack_j(&self, p: &Partition, x: &SpectralArgument) -> f64 {
        if p.is_empty() {
            return 1.0;
        }
        let t = self.scaled(p, x);
        if t == 0.0 {
            return 0.0;
        }
        let alpha = self.algebra.alpha_f64();
        t * (ln_hook_product(p, alpha) - p.weight() as f64 * alpha.ln()).exp()
    }
}

enum Mode {
    One,
    Two,
    Recurrence,
}

/// Incremental evaluator producing `T_k(x)` one total degree at a time.
pub struct JackEvaluator<'t> {
    table: &'t JackTable,
    plan: Arc<Plan>,
    mode: Mode,
    m: usize,
    alpha: f64,
    x: Vec<f64>,
    next: usize,
    values: Vec<f64>,
    // recurrence state: levels[n][idx] = T_idx(x_1..x_n); pow[n][d] = x_{n+1}^d / d!
    levels: Vec<Vec<f64>>,
    pow: Vec<Vec<f64>>,
    // two-variable state
    row: Vec<f64>,
    chain: Vec<f64>,
    ln_ratio: Vec<f64>,
    ln_poch: Vec<f64>,
}

const INITIAL_DEGREE: usize = 8;

impl<'t> JackEvaluator<'t> {
    fn new(table: &'t JackTable, x: &SpectralArgument, force_recurrence: bool) -> Self {
        let m = x.len();
        let mode = match m {
            1 if !force_recurrence => Mode::One,
            2 if !force_recurrence => Mode::Two,
            _ => Mode::Recurrence,
        };
        let recurrence = matches!(mode, Mode::Recurrence);
        let plan = table.plan(m, INITIAL_DEGREE, recurrence);
        let mut ev = Self {
            table,
            plan,
            mode,
            m,
            alpha: table.algebra.alpha_f64(),
            x: x.eigenvalues().to_vec(),
            next: 0,
            values: Vec::new(),
            levels: Vec::new(),
            pow: vec![vec![1.0]; m],
            row: Vec::new(),
            chain: Vec::new(),
            ln_ratio: vec![0.0],
            ln_poch: vec![0.0],
        };
        if recurrence {
            ev.levels = vec![Vec::new(); m + 1];
        }
        ev
    }

    pub fn num_vars(&self) -> usize {
        self.m
    }

    /// Number of degrees evaluated so far.
    pub fn degrees_done(&self) -> usize {
        self.next
    }

    pub fn partitions(&self, k: usize) -> &[Partition] {
        &self.plan.blocks[k].parts
    }

    /// Values of degree `k`, aligned with [`partitions`](Self::partitions). `k` must already be evaluated.
    pub fn values(&self, k: usize) -> &[f64] {
        assert!(k < self.next, "degree {k} not evaluated yet");
        &self.values[self.plan.degree_range(k)]
    }

    /// Evaluates the next degree and returns it.
    pub fn advance(&mut self) -> usize {
        let k = self.next;
        if k > self.plan.max_degree {
            let recurrence = matches!(self.mode, Mode::Recurrence);
            self.plan = self.table.plan(self.m, k, recurrence);
        }
        let total = self.plan.degree_start[k + 1];
        self.values.resize(total, 0.0);
        match self.mode {
            Mode::One => self.step_one(k),
            Mode::Two => self.step_two(k),
            Mode::Recurrence => self.step_recurrence(k),
        }
        self.next += 1;
        k
    }

    pub fn advance_to(&mut self, k: usize) {
        while self.next <= k {
            self.advance();
        }
    }

    /// `T_p(x)`; zero if `p` has more parts than variables.
    pub fn value(&mut self, p: &Partition) -> f64 {
        if p.len() > self.m {
            return 0.0;
        }
        self.advance_to(p.weight() as usize);
        self.values[self.plan.index_of(p)]
    }

    fn step_one(&mut self, k: usize) {
        let v = if k == 0 { 1.0 } else { self.values[k - 1] * self.x[0] / k as f64 };
        self.values[k] = v;
    }

    fn step_two(&mut self, k: usize) {
        let (x1, x2) = (self.x[0], self.x[1]);
        let ia = 1.0 / self.alpha;
        if k > 0 {
            let t = (k - 1) as f64;
            let lr = self.ln_ratio[k - 1] + ((ia + t) / (t + 1.0)).ln();
            self.ln_ratio.push(lr);
            self.ln_poch.push(self.ln_poch[k - 1] + (ia + t).ln());
        }
        // T_(k)(x1, x2) = sum_j (ia)_j (ia)_{k-j} / ((ia)_k j! (k-j)!) x1^j x2^{k-j}
        let (l1, l2) = (x1.abs().ln(), x2.abs().ln());
        let mut sum = Neumaier::default();
        for j in 0..=k {
            let (e1, e2) = (j, k - j);
            if (e1 > 0 && x1 == 0.0) || (e2 > 0 && x2 == 0.0) {
                continue;
            }
            let mut lg = self.ln_ratio[e1] + self.ln_ratio[e2] - self.ln_poch[k];
            if e1 > 0 {
                lg += e1 as f64 * l1;
            }
            if e2 > 0 {
                lg += e2 as f64 * l2;
            }
            let neg = (e1 % 2 == 1 && x1 < 0.0) != (e2 % 2 == 1 && x2 < 0.0);
            let t = lg.exp();
            sum.add(if neg { -t } else { t });
        }
        self.row.push(sum.total());
        self.chain.push(1.0);
        let base = self.plan.degree_start[k];
        let prod = x1 * x2;
        for b in 0..=k / 2 {
            let d = k - 2 * b;
            if b > 0 {
                let step = self.alpha * prod / (b as f64 * (1.0 + self.alpha * (d + b) as f64));
                self.chain[d] *= step;
            }
            self.values[base + b] = self.row[d] * self.chain[d];
        }
    }

    fn step_recurrence(&mut self, k: usize) {
        let m = self.m;
        let total = self.values.len();
        for lvl in self.levels.iter_mut() {
            lvl.resize(total, 0.0);
        }
        if k == 0 {
            for lvl in self.levels.iter_mut() {
                lvl[0] = 1.0;
            }
            self.values[0] = 1.0;
            return;
        }
        for (n, p) in self.pow.iter_mut().enumerate() {
            let xn = self.x[n];
            let prev = p[k - 1];
            p.push(prev * xn / k as f64);
        }
        let plan = Arc::clone(&self.plan);
        let block = &plan.blocks[k];
        let range = plan.degree_range(k);
        let first = range.start;
        for (off, &l) in block.lens.iter().enumerate() {
            if l <= 1 {
                self.levels[1][first + off] = self.pow[0][k];
            }
        }
        for n in 2..=m {
            let (lower, upper) = self.levels.split_at_mut(n);
            let prev = &lower[n - 1];
            let cur = &mut upper[0];
            let pw = &self.pow[n - 1];
            for (off, &l) in block.lens.iter().enumerate() {
                let l = l as usize;
                let idx = first + off;
                if l > n {
                    cur[idx] = 0.0;
                    continue;
                }
                let mut acc = Neumaier::default();
                for s in block.strip_start[off]..block.strip_start[off + 1] {
                    // prev is zero for mu with n or more parts
                    let t = prev[block.mu[s] as usize];
                    if t == 0.0 {
                        continue;
                    }
                    let mut f = block.coeff[s];
                    for &d in &block.drops[s * m..s * m + l] {
                        if d > 0 {
                            f *= pw[d as usize];
                        }
                    }
                    acc.add(f * t);
                }
                cur[idx] = acc.total();
            }
        }
        for idx in range {
            self.values[idx] = self.levels[m][idx];
        }
    }
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `J_k(x)`: the Jack polynomial in the J normalization.
pub fn jack_j(p: &Partition, x: &SpectralArgument, algebra: DivisionAlgebra) -> f64 {
    JackTable::shared(algebra).jack_j(p, x)
}

/// `C_k(x)`: normalized so that the polynomials of degree `k` sum to `tr(x)^k`.
pub fn jack_c(p: &Partition, x: &SpectralArgument, algebra: DivisionAlgebra) -> f64 {
    JackTable::shared(algebra).jack_c(p, x)
}

/// `ln C_k(I_m)` from the closed form; `-inf` when `l(k) > m`.
pub fn ln_jack_c_at_identity(p: &Partition, m: usize, algebra: DivisionAlgebra) -> f64 {
    if p.len() > m {
        return f64::NEG_INFINITY;
    }
    if p.is_empty() {
        return 0.0;
    }
    let alpha = algebra.alpha_f64();
    let k = p.weight();
    let mut acc = 2.0 * k as f64 * alpha.ln() + ln_factorial(k) - ln_hook_product(p, alpha);
    for (i, &ki) in p.parts().iter().enumerate() {
        acc += ln_pochhammer_pos((m - i) as f64 / alpha, ki);
    }
    acc
}

/// `C_k(I_m)` without running the recurrence.
pub fn jack_c_at_identity(p: &Partition, m: usize, algebra: DivisionAlgebra) -> f64 {
    if p.len() > m {
        return 0.0;
    }
    ln_jack_c_at_identity(p, m, algebra).exp()
}
