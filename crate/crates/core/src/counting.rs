//! Exact sublevel counts N_k = #{x in (O/t^k)^n : val f_i(x) >= k for all i}.
//!
//! Two enumerators: `Flat` visits every residue mod t^k, `Pruned` walks the
//! lifting tree and discards a residue mod t^j as soon as some generator is
//! nonzero mod t^j. Both run data-parallel over residue prefixes.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::mpoly::MPoly;
use crate::ring::{mul_truncated, OElem, RingCtx, Valuation};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Flat,
    Pruned,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Flat => "flat",
            Strategy::Pruned => "pruned",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "flat" => Ok(Strategy::Flat),
            "pruned" => Ok(Strategy::Pruned),
            other => Err(format!("unknown strategy `{other}` (expected flat or pruned)")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    pub strategy: Strategy,
    pub workers: usize,
    pub node_budget: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { strategy: Strategy::Pruned, workers: 1, node_budget: DEFAULT_NODE_BUDGET }
    }
}

impl CountOptions {
    pub fn with_strategy(strategy: Strategy) -> Self {
        CountOptions { strategy, ..Default::default() }
    }
}

/// Generators translated to the origin, plus a fingerprint of the original input.
#[derive(Clone, Debug)]
pub struct IdealSpec {
    ctx: RingCtx,
    n: usize,
    original: Vec<MPoly>,
    generators: Vec<MPoly>,
    x0: Vec<OElem>,
    radius_j: u32,
    precision: u32,
    fingerprint: String,
}

impl IdealSpec {
    /// Count over x0 + t^j O^n by substituting x -> x0 + t^j x.
    pub fn new(generators: Vec<MPoly>, x0: Option<Vec<OElem>>, radius_j: u32) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::PreconditionViolated("an ideal needs at least one generator".into()))?;
        let ctx = first.ctx().clone();
        let n = first.n();
        if generators.iter().any(|g| g.n() != n || g.ctx() != &ctx) {
            return Err(Error::PreconditionViolated("generators live in different rings".into()));
        }
        let x0 = x0.unwrap_or_else(|| vec![ctx.zero(); n]);
        if x0.len() != n {
            return Err(Error::PreconditionViolated(format!(
                "base point has {} coordinates, expected {n}",
                x0.len()
            )));
        }
        if generators.iter().all(|g| g.is_zero()) {
            return Err(Error::IndeterminateInput("every generator vanishes at this precision".into()));
        }
        let translated = if radius_j == 0 && x0.iter().all(|c| c.is_zero()) {
            generators.clone()
        } else {
            let scale = ctx.t_pow(radius_j);
            let images: Vec<MPoly> = (0..n)
                .map(|i| {
                    &MPoly::constant(&ctx, n, x0[i].clone()) + &MPoly::var(&ctx, n, i).scale(&scale)
                })
                .collect();
            generators.iter().map(|g| g.compose(&images)).collect::<Result<Vec<_>>>()?
        };
        let precision = generators.iter().map(|g| g.precision()).min().unwrap();
        let fingerprint = fingerprint(&ctx, n, &generators, &x0, radius_j);
        Ok(IdealSpec {
            ctx,
            n,
            original: generators,
            generators: translated,
            x0,
            radius_j,
            precision,
            fingerprint,
        })
    }

    pub fn single(f: MPoly) -> Result<Self> {
        Self::new(vec![f], None, 0)
    }

    pub fn ctx(&self) -> &RingCtx {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.ctx.q()
    }

    /// Generators as supplied.
    pub fn original(&self) -> &[MPoly] {
        &self.original
    }

    /// Generators after translation to the origin; these are what is counted.
    pub fn generators(&self) -> &[MPoly] {
        &self.generators
    }

    pub fn x0(&self) -> &[OElem] {
        &self.x0
    }

    pub fn radius_j(&self) -> u32 {
        self.radius_j
    }

    /// Largest k for which N_k is determined by the input.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    fn check_depth(&self, k: u32) -> Result<()> {
        if k > self.precision {
            return Err(Error::PrecisionExceeded { requested: k, available: self.precision });
        }
        Ok(())
    }
}

/// Canonical text of (field, generators, base point, radius), hashed with SHA-256.
pub fn canonical_input(ctx: &RingCtx, n: usize, gens: &[MPoly], x0: &[OElem], j: u32) -> String {
    let field = ctx.field();
    let modulus: Vec<String> = field.modulus().iter().map(|c| c.to_string()).collect();
    let gens: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    let x0: Vec<String> = x0.iter().map(|c| ctx.format(c)).collect();
    format!(
        "p={};e={};modulus=[{}];gen={};n={n};f=[{}];x0=[{}];j={j}",
        field.p(),
        field.e(),
        modulus.join(","),
        field.generator_symbol(),
        gens.join("; "),
        x0.join("; "),
    )
}

fn fingerprint(ctx: &RingCtx, n: usize, gens: &[MPoly], x0: &[OElem], j: u32) -> String {
    hex::encode(Sha256::digest(canonical_input(ctx, n, gens, x0, j).as_bytes()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub k: u32,
    pub count: u64,
}

/// N_k for k = 1..=k_max (N_0 = 1 implicitly).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub rows: Vec<CountRow>,
    pub q: u32,
    pub n: usize,
    pub fingerprint: String,
    pub strategy: Strategy,
}

impl CountTable {
    pub fn k_max(&self) -> u32 {
        self.rows.last().map(|r| r.k).unwrap_or(0)
    }

    pub fn count(&self, k: u32) -> Option<u64> {
        if k == 0 {
            return Some(1);
        }
        self.rows.iter().find(|r| r.k == k).map(|r| r.count)
    }

    /// (N_k, nk): the exact volume N_k q^{-nk}.
    pub fn volume(&self, k: u32) -> Option<(u64, u32)> {
        self.count(k).map(|c| (c, self.n as u32 * k))
    }

    pub fn volume_f64(&self, k: u32) -> Option<f64> {
        self.volume(k).map(|(c, e)| c as f64 * (self.q as f64).powi(-(e as i32)))
    }

    /// N_0, N_1, ..., N_kmax.
    pub fn counts(&self) -> Vec<u64> {
        std::iter::once(1).chain(self.rows.iter().map(|r| r.count)).collect()
    }
}

/// Generators flattened for the inner loop: `vanishes` answers
/// "f_i(x) = 0 mod t^k for every i" without allocating.
struct Compiled {
    field: FieldSpec,
    n: usize,
    gens: Vec<Vec<(Vec<u32>, Vec<FieldElem>)>>,
    max_exp: Vec<u32>,
}

struct Scratch {
    k: usize,
    powers: Vec<Vec<Vec<FieldElem>>>,
    acc: Vec<FieldElem>,
    term: Vec<FieldElem>,
    tmp: Vec<FieldElem>,
}

impl Compiled {
    fn new(spec: &IdealSpec) -> Self {
        let n = spec.n;
        let mut max_exp = vec![0; n];
        let gens = spec
            .generators
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| {
                g.terms()
                    .map(|(e, c)| {
                        for (m, &x) in max_exp.iter_mut().zip(e) {
                            *m = (*m).max(x);
                        }
                        (e.to_vec(), c.coeffs().to_vec())
                    })
                    .collect()
            })
            .collect();
        Compiled { field: spec.ctx.field().clone(), n, gens, max_exp }
    }

    fn scratch(&self, k: usize) -> Scratch {
        Scratch {
            k,
            powers: self
                .max_exp
                .iter()
                .map(|&m| vec![vec![FieldElem::ZERO; k]; m as usize + 1])
                .collect(),
            acc: vec![FieldElem::ZERO; k],
            term: vec![FieldElem::ZERO; k],
            tmp: vec![FieldElem::ZERO; k],
        }
    }

    /// `digits[i*k + d]` is the t^d coefficient of x_i.
    fn vanishes(&self, digits: &[u32], s: &mut Scratch) -> bool {
        let k = s.k;
        let f = &self.field;
        for i in 0..self.n {
            let pw = &mut s.powers[i];
            pw[0].fill(FieldElem::ZERO);
            pw[0][0] = FieldElem::ONE;
            if pw.len() > 1 {
                for d in 0..k {
                    pw[1][d] = FieldElem(digits[i * k + d]);
                }
            }
            for e in 2..pw.len() {
                let (lo, hi) = pw.split_at_mut(e);
                mul_truncated(f, &lo[e - 1], &lo[1], &mut hi[0]);
            }
        }
        for g in &self.gens {
            s.acc.fill(FieldElem::ZERO);
            for (e, c) in g {
                s.term[..].copy_from_slice(&c[..k]);
                for (i, &x) in e.iter().enumerate() {
                    if x > 0 {
                        mul_truncated(f, &s.term, &s.powers[i][x as usize], &mut s.tmp);
                        std::mem::swap(&mut s.term, &mut s.tmp);
                    }
                }
                for d in 0..k {
                    s.acc[d] = f.add(s.acc[d], s.term[d]);
                }
            }
            if s.acc.iter().any(|c| !c.is_zero()) {
                return false;
            }
        }
        true
    }
}

/// Residue prefixes mod t^{split_depth} covering (O/t^k)^n exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionPlan {
    pub split_depth: u32,
    /// Each cell holds n * split_depth digits, coordinate-major.
    pub cells: Vec<Vec<u32>>,
}

pub fn partition(spec: &IdealSpec, k: u32, split_depth: u32) -> Result<PartitionPlan> {
    spec.check_depth(k)?;
    if split_depth > k {
        return Err(Error::PreconditionViolated(format!("split depth {split_depth} exceeds k = {k}")));
    }
    let q = spec.q() as u64;
    let width = spec.n * split_depth as usize;
    let total = q.checked_pow(width as u32).filter(|&c| c <= 1 << 24).ok_or_else(|| {
        Error::CapExceeded(format!("{q}^{width} partition cells"))
    })?;
    let cells = (0..total)
        .map(|mut idx| {
            (0..width)
                .map(|_| {
                    let d = (idx % q) as u32;
                    idx /= q;
                    d
                })
                .collect()
        })
        .collect();
    Ok(PartitionPlan { split_depth, cells })
}

/// Flat count of the points of one cell: all residues mod t^k whose low
/// `split_depth` digits match the prefix.
fn count_cell_compiled(c: &Compiled, q: u32, k: u32, split: u32, cell: &[u32]) -> u64 {
    let (n, k, split) = (c.n, k as usize, split as usize);
    let mut digits = vec![0u32; n * k];
    for i in 0..n {
        digits[i * k..i * k + split].copy_from_slice(&cell[i * split..(i + 1) * split]);
    }
    let free: Vec<usize> = (0..n).flat_map(|i| (split..k).map(move |d| i * k + d)).collect();
    let mut scratch = c.scratch(k);
    let mut count = 0u64;
    loop {
        if c.vanishes(&digits, &mut scratch) {
            count += 1;
        }
        let mut pos = 0;
        loop {
            if pos == free.len() {
                return count;
            }
            let slot = &mut digits[free[pos]];
            *slot += 1;
            if *slot < q {
                break;
            }
            *slot = 0;
            pos += 1;
        }
    }
}

pub fn count_cell(spec: &IdealSpec, k: u32, plan: &PartitionPlan, cell: usize) -> Result<u64> {
    spec.check_depth(k)?;
    let c = Compiled::new(spec);
    Ok(count_cell_compiled(&c, spec.q(), k, plan.split_depth, &plan.cells[cell]))
}

/// Sum of per-cell partial counts.
pub fn merge(partials: &[u64]) -> u64 {
    partials.iter().sum()
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::PreconditionViolated(format!("cannot start worker pool: {e}")))
}

/// Smallest split depth giving at least 8 cells per worker (0 for one worker).
fn split_depth_for(q: u32, n: usize, k: u32, workers: usize) -> u32 {
    if workers <= 1 {
        return 0;
    }
    let target = 8 * workers as u64;
    let mut depth = 0;
    while depth < k && (q as u64).saturating_pow(n as u32 * depth) < target {
        depth += 1;
    }
    depth
}

fn flat_level(c: &Compiled, spec: &IdealSpec, k: u32, pool: &rayon::ThreadPool, workers: usize) -> Result<u64> {
    let split = split_depth_for(spec.q(), spec.n, k, workers);
    let plan = partition(spec, k, split)?;
    let q = spec.q();
    let partials: Vec<u64> = pool.install(|| {
        plan.cells.par_iter().map(|cell| count_cell_compiled(c, q, k, split, cell)).collect()
    });
    Ok(merge(&partials))
}

fn budget_error(spec: &IdealSpec, budget: u64, rows: Vec<CountRow>, strategy: Strategy) -> Error {
    Error::BudgetExceeded {
        budget,
        partial: Box::new(CountTable {
            rows,
            q: spec.q(),
            n: spec.n,
            fingerprint: spec.fingerprint.clone(),
            strategy,
        }),
    }
}

fn flat_table(spec: &IdealSpec, k_max: u32, opts: &CountOptions) -> Result<Vec<CountRow>> {
    let c = Compiled::new(spec);
    let pool = pool(opts.workers)?;
    let mut used = 0u64;
    let mut rows = Vec::new();
    for k in 1..=k_max {
        let cost = (spec.q() as u64).checked_pow(spec.n as u32 * k);
        match cost.and_then(|x| x.checked_add(used)) {
            Some(total) if total <= opts.node_budget => used = total,
            _ => return Err(budget_error(spec, opts.node_budget, rows, Strategy::Flat)),
        }
        rows.push(CountRow { k, count: flat_level(&c, spec, k, &pool, opts.workers)? });
    }
    Ok(rows)
}

/// Survivors of one frontier chunk, as digits of stride n*(j+1).
fn expand_chunk(c: &Compiled, q: u32, j: usize, chunk: &[u32]) -> Vec<u32> {
    let n = c.n;
    let width = n * j;
    let child_k = j + 1;
    let mut scratch = c.scratch(child_k);
    let mut child = vec![0u32; n * child_k];
    let mut out = Vec::new();
    let nodes = chunk.len().checked_div(width).unwrap_or(1);
    for node in 0..nodes {
        let parent = &chunk[node * width..(node + 1) * width];
        for i in 0..n {
            child[i * child_k..i * child_k + j].copy_from_slice(&parent[i * j..(i + 1) * j]);
            child[i * child_k + j] = 0;
        }
        loop {
            if c.vanishes(&child, &mut scratch) {
                out.extend_from_slice(&child);
            }
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                let slot = &mut child[i * child_k + j];
                *slot += 1;
                if *slot < q {
                    break;
                }
                *slot = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    out
}

fn pruned_table(spec: &IdealSpec, k_max: u32, opts: &CountOptions) -> Result<Vec<CountRow>> {
    let c = Compiled::new(spec);
    let pool = pool(opts.workers)?;
    let n = spec.n;
    let q = spec.q();
    let fan = (q as u64).pow(n as u32);
    let mut frontier: Vec<u32> = Vec::new();
    let mut size = 1u64;
    let mut used = 0u64;
    let mut rows = Vec::new();
    for j in 0..k_max as usize {
        match size.checked_mul(fan).and_then(|x| x.checked_add(used)) {
            Some(total) if total <= opts.node_budget => used = total,
            _ => return Err(budget_error(spec, opts.node_budget, rows, Strategy::Pruned)),
        }
        let width = n * j;
        frontier = if width == 0 || size <= 64 {
            expand_chunk(&c, q, j, &frontier)
        } else {
            let per = (size as usize).div_ceil(8 * opts.workers.max(1)).max(16);
            let parts: Vec<Vec<u32>> = pool.install(|| {
                frontier.par_chunks(per * width).map(|ch| expand_chunk(&c, q, j, ch)).collect()
            });
            parts.concat()
        };
        size = (frontier.len() / (n * (j + 1))) as u64;
        rows.push(CountRow { k: j as u32 + 1, count: size });
        if size == 0 {
            for k in j as u32 + 2..=k_max {
                rows.push(CountRow { k, count: 0 });
            }
            break;
        }
    }
    Ok(rows)
}

/// N_k for k = 1..=k_max.
pub fn count_table(spec: &IdealSpec, k_max: u32, opts: &CountOptions) -> Result<CountTable> {
    spec.check_depth(k_max)?;
    if n_is_degenerate(spec) {
        return Err(Error::PreconditionViolated("counting needs at least one variable".into()));
    }
    let rows = match opts.strategy {
        Strategy::Flat => flat_table(spec, k_max, opts)?,
        Strategy::Pruned => pruned_table(spec, k_max, opts)?,
    };
    Ok(CountTable {
        rows,
        q: spec.q(),
        n: spec.n,
        fingerprint: spec.fingerprint.clone(),
        strategy: opts.strategy,
    })
}

fn n_is_degenerate(spec: &IdealSpec) -> bool {
    spec.n == 0
}

/// N_k alone.
pub fn count_nk(spec: &IdealSpec, k: u32, opts: &CountOptions) -> Result<u64> {
    spec.check_depth(k)?;
    if k == 0 {
        return Ok(1);
    }
    match opts.strategy {
        Strategy::Flat => {
            let cost = (spec.q() as u64).checked_pow(spec.n as u32 * k);
            if cost.is_none_or(|c| c > opts.node_budget) {
                return Err(budget_error(spec, opts.node_budget, Vec::new(), Strategy::Flat));
            }
            flat_level(&Compiled::new(spec), spec, k, &pool(opts.workers)?, opts.workers)
        }
        Strategy::Pruned => Ok(count_table(spec, k, opts)?.count(k).unwrap()),
    }
}

/// The exact volume of {x in O^n : min_i val f_i(x) >= k} as (N_k, nk).
pub fn sublevel_volume(spec: &IdealSpec, k: u32, opts: &CountOptions) -> Result<(u64, u32)> {
    Ok((count_nk(spec, k, opts)?, spec.n as u32 * k))
}

/// One row of a small-ball check: N_k^d q^k <= d^d q^{nkd}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmallBallRow {
    pub k: u32,
    pub count: u64,
    #[serde(serialize_with = "ser_big")]
    pub lhs: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub rhs: BigUint,
    pub pass: bool,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallBallReport {
    pub d: u32,
    pub n: usize,
    pub q: u32,
    pub rows: Vec<SmallBallRow>,
    pub all_pass: bool,
}

/// mu_k <= d q^{-k/d}, cross-multiplied to integers.
pub fn small_ball_rows(table: &CountTable, d: u32) -> SmallBallReport {
    let q = BigUint::from(table.q);
    let n = table.n as u32;
    let dd = BigUint::from(d).pow(d);
    let rows: Vec<SmallBallRow> = table
        .rows
        .iter()
        .map(|r| {
            let lhs = BigUint::from(r.count).pow(d) * q.pow(r.k);
            let rhs = &dd * q.pow(n * r.k * d);
            SmallBallRow { k: r.k, count: r.count, pass: lhs <= rhs, lhs, rhs }
        })
        .collect();
    let all_pass = rows.iter().all(|r| r.pass);
    SmallBallReport { d, n: table.n, q: table.q, rows, all_pass }
}

/// x_n-degree d of a polynomial monic in x_n: the x_n^d coefficient is exactly 1.
fn monic_degree(f: &MPoly) -> Option<u32> {
    let d = f.degree_in_last()?;
    let n = f.n();
    let mut top = f.terms().filter(|(e, _)| e[n - 1] == d);
    let (e, c) = top.next()?;
    (top.next().is_none() && c.is_one() && e[..n - 1].iter().all(|&x| x == 0)).then_some(d)
}

pub fn verify_remez_monic(f: &MPoly, k_max: u32, opts: &CountOptions) -> Result<SmallBallReport> {
    if f.n() != 1 {
        return Err(Error::PreconditionViolated("expected a univariate polynomial".into()));
    }
    let d = monic_degree(f)
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::PreconditionViolated("polynomial is not monic of positive degree".into()))?;
    let table = count_table(&IdealSpec::single(f.clone())?, k_max, opts)?;
    Ok(small_ball_rows(&table, d))
}

pub fn verify_weierstrass_smallball(f: &MPoly, k_max: u32, opts: &CountOptions) -> Result<SmallBallReport> {
    if f.n() == 0 {
        return Err(Error::PreconditionViolated("expected at least one variable".into()));
    }
    let d = monic_degree(f)
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::PreconditionViolated("polynomial is not monic in the last variable".into()))?;
    if f.gauss_val() != Valuation::Finite(0) {
        return Err(Error::PreconditionViolated("Weierstrass polynomial must have Gauss norm 1".into()));
    }
    let table = count_table(&IdealSpec::single(f.clone())?, k_max, opts)?;
    Ok(small_ball_rows(&table, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u32, m: u32) -> RingCtx {
        RingCtx::new(FieldSpec::prime(p).unwrap(), m).unwrap()
    }

    fn spec(c: &RingCtx, n: usize, gens: &[&str]) -> IdealSpec {
        IdealSpec::new(gens.iter().map(|s| parse_poly(s, c, n).unwrap()).collect(), None, 0).unwrap()
    }

    fn table(s: &IdealSpec, k: u32, strategy: Strategy) -> Vec<u64> {
        count_table(s, k, &CountOptions::with_strategy(strategy)).unwrap().counts()
    }

    /// Oracle: evaluate through MPoly::evaluate on every residue.
    fn brute(s: &IdealSpec, k: u32) -> u64 {
        let c = s.ctx();
        let residues = c.enumerate(k).unwrap();
        let n = s.n();
        let total = residues.len().pow(n as u32);
        (0..total)
            .filter(|&idx| {
                let mut r = idx;
                let pt: Vec<OElem> = (0..n)
                    .map(|_| {
                        let x = residues[r % residues.len()].clone();
                        r /= residues.len();
                        x
                    })
                    .collect();
                s.generators().iter().all(|g| {
                    let v = c.truncate(&g.evaluate(&pt).unwrap(), k);
                    v.is_zero()
                })
            })
            .count() as u64
    }

    #[test]
    fn count_examples() {
        let c = ctx(2, 4);
        let opts = CountOptions::default();
        assert_eq!(count_nk(&spec(&c, 1, &["x1"]), 3, &opts).unwrap(), 1);
        assert_eq!(count_nk(&spec(&c, 1, &["x1^2"]), 3, &opts).unwrap(), 2);
        assert_eq!(count_nk(&spec(&c, 2, &["x1*x2"]), 2, &opts).unwrap(), 8);
        assert_eq!(table(&spec(&c, 1, &["1"]), 4, Strategy::Pruned), vec![1, 0, 0, 0, 0]);
        assert_eq!(table(&spec(&c, 1, &["1"]), 4, Strategy::Flat), vec![1, 0, 0, 0, 0]);
        assert_eq!(
            table(&spec(&c, 1, &["0", "x1"]), 4, Strategy::Pruned),
            table(&spec(&c, 1, &["x1"]), 4, Strategy::Pruned)
        );
        assert!(matches!(
            IdealSpec::new(vec![MPoly::zero(&c, 1)], None, 0),
            Err(Error::IndeterminateInput(_))
        ));
        assert!(matches!(
            count_nk(&spec(&c, 1, &["x1"]), 5, &opts),
            Err(Error::PrecisionExceeded { requested: 5, available: 4 })
        ));
    }

    #[test]
    fn quartic_closed_form() {
        let c = ctx(2, 12);
        let s = spec(&c, 1, &["x1^4"]);
        let expect: Vec<u64> = (0..=12u32).map(|k| 1 << (k - k.div_ceil(4))).collect();
        assert_eq!(table(&s, 12, Strategy::Pruned), expect);
        assert_eq!(table(&s, 12, Strategy::Flat), expect);
        assert_eq!(expect[4], 8);
    }

    #[test]
    fn volumes() {
        let c = ctx(2, 4);
        let opts = CountOptions::default();
        assert_eq!(sublevel_volume(&spec(&c, 1, &["x1^2"]), 2, &opts).unwrap(), (2, 2));
        assert_eq!(sublevel_volume(&spec(&c, 1, &["x1"]), 3, &opts).unwrap(), (1, 3));
    }

    #[test]
    fn remez_examples() {
        let c = ctx(2, 6);
        let opts = CountOptions::default();
        let r = verify_remez_monic(&parse_poly("x1^2", &c, 1).unwrap(), 2, &opts).unwrap();
        assert!(r.all_pass);
        // mu_2 = 1/2 against the bound 1.
        assert_eq!(r.rows[1].lhs, BigUint::from(16u32));
        assert_eq!(r.rows[1].rhs, BigUint::from(64u32));
        let r = verify_remez_monic(&parse_poly("x1", &c, 1).unwrap(), 6, &opts).unwrap();
        assert!(r.rows.iter().all(|row| row.pass && row.lhs == row.rhs));
        let r = verify_remez_monic(&parse_poly("x1^2 + t", &c, 1).unwrap(), 6, &opts).unwrap();
        assert!(r.all_pass);
        assert!(r.rows[1..].iter().all(|row| row.count == 0));
        assert!(verify_remez_monic(&parse_poly("t*x1^2", &c, 1).unwrap(), 2, &opts).is_err());
    }

    #[test]
    fn smallball_examples() {
        let c = ctx(2, 6);
        let opts = CountOptions::default();
        let f = parse_poly("x2^2 + t*x1*x2 + t", &c, 2).unwrap();
        assert!(verify_weierstrass_smallball(&f, 3, &opts).unwrap().all_pass);
        let r = verify_weierstrass_smallball(&parse_poly("x2", &c, 2).unwrap(), 4, &opts).unwrap();
        assert!(r.rows.iter().all(|row| row.lhs == row.rhs));
        let r = verify_weierstrass_smallball(&parse_poly("x2^2", &c, 2).unwrap(), 5, &opts).unwrap();
        for row in &r.rows {
            assert_eq!(row.count, 1 << (2 * row.k - row.k.div_ceil(2)));
        }
        assert!(r.all_pass);
    }

    #[test]
    fn partition_examples() {
        let c = ctx(2, 4);
        let s = spec(&c, 1, &["x1"]);
        let plan = partition(&s, 2, 0).unwrap();
        assert_eq!(plan.cells.len(), 1);
        assert_eq!(count_cell(&s, 2, &plan, 0).unwrap(), 1);
        let plan = partition(&s, 2, 1).unwrap();
        let parts: Vec<u64> = (0..2).map(|i| count_cell(&s, 2, &plan, i).unwrap()).collect();
        assert_eq!(parts, vec![1, 0]);
        assert_eq!(merge(&parts), 1);

        let s = spec(&ctx(3, 4), 2, &["x1^2 - x2^3", "x1*x2 + t"]);
        let plan = partition(&s, 3, 1).unwrap();
        let mut parts: Vec<u64> = (0..plan.cells.len()).map(|i| count_cell(&s, 3, &plan, i).unwrap()).collect();
        let total = merge(&parts);
        parts.reverse();
        assert_eq!(merge(&parts), total);
        assert_eq!(total, count_nk(&s, 3, &CountOptions::default()).unwrap());
    }

    fn random_poly(rng: &mut ChaCha8Rng, c: &RingCtx, n: usize) -> MPoly {
        let terms = rng.gen_range(1..4);
        crate::mpoly::tests::random_poly(rng, c, n, 3, terms)
    }

    #[test]
    fn strategies_agree_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..30 {
            let p = [2, 3, 5][i % 3];
            let n = rng.gen_range(1..=2);
            let c = ctx(p, 4);
            let k_max: u32 = match (p, n) {
                (2, 1) => 4,
                (2, 2) => 4,
                (3, 1) => 4,
                (3, 2) => 2,
                (_, 1) => 3,
                _ => 2,
            };
            let mut gens = vec![random_poly(&mut rng, &c, n)];
            if rng.gen_bool(0.3) {
                gens.push(random_poly(&mut rng, &c, n));
            }
            let Ok(s) = IdealSpec::new(gens, None, 0) else { continue };
            let flat = table(&s, k_max, Strategy::Flat);
            let pruned = table(&s, k_max, Strategy::Pruned);
            assert_eq!(flat, pruned);
            assert_eq!(flat[k_max as usize], brute(&s, k_max));
            let fan = (p as u64).pow(n as u32);
            for w in flat.windows(2) {
                assert!(w[1] <= fan * w[0]);
            }
        }
    }

    #[test]
    fn residue_well_definedness() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = ctx(3, 6);
        for _ in 0..200 {
            let n = rng.gen_range(1..=3);
            let f = random_poly(&mut rng, &c, n);
            let k = rng.gen_range(1..=6);
            let x = crate::mpoly::tests::random_point(&mut rng, &c, n);
            let noise = crate::mpoly::tests::random_point(&mut rng, &c, n);
            let y: Vec<OElem> =
                x.iter().zip(&noise).map(|(a, b)| c.add(a, &c.shift_up(b, k))).collect();
            let at = |p: &[OElem]| c.val(&f.evaluate(p).unwrap()).is_at_least(k);
            assert_eq!(at(&x), at(&y));
        }
    }

    #[test]
    fn more_generators_never_increase_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = ctx(2, 5);
        for _ in 0..30 {
            let f = random_poly(&mut rng, &c, 2);
            let g = random_poly(&mut rng, &c, 2);
            let Ok(one) = IdealSpec::new(vec![f.clone()], None, 0) else { continue };
            let two = IdealSpec::new(vec![f, g], None, 0).unwrap();
            let a = table(&one, 4, Strategy::Pruned);
            let b = table(&two, 4, Strategy::Pruned);
            assert!(a.iter().zip(&b).all(|(x, y)| y <= x));
        }
    }

    #[test]
    fn translation_matches_explicit_substitution() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = ctx(3, 5);
        for _ in 0..20 {
            let f = random_poly(&mut rng, &c, 2);
            if f.is_zero() {
                continue;
            }
            let x0 = crate::mpoly::tests::random_point(&mut rng, &c, 2);
            let j = rng.gen_range(0..=2);
            let ball = IdealSpec::new(vec![f.clone()], Some(x0.clone()), j).unwrap();
            let images: Vec<MPoly> = (0..2)
                .map(|i| {
                    &MPoly::constant(&c, 2, x0[i].clone()) + &MPoly::var(&c, 2, i).scale(&c.t_pow(j))
                })
                .collect();
            let moved = f.compose(&images).unwrap();
            if moved.is_zero() {
                continue;
            }
            let explicit = IdealSpec::single(moved).unwrap();
            assert_eq!(table(&ball, 3, Strategy::Pruned), table(&explicit, 3, Strategy::Flat));
            assert_ne!(ball.fingerprint(), explicit.fingerprint());
        }
    }

    #[test]
    fn parallel_counts_are_bit_exact() {
        let c = ctx(2, 8);
        let s = spec(&c, 2, &["x1*x2 + t*x1^3", "x1^2 + x2^2"]);
        let serial = count_table(&s, 6, &CountOptions::with_strategy(Strategy::Flat)).unwrap();
        for workers in [2, 3, 4] {
            for strategy in [Strategy::Flat, Strategy::Pruned] {
                let t = count_table(&s, 6, &CountOptions { strategy, workers, ..Default::default() }).unwrap();
                assert_eq!(t.rows, serial.rows);
            }
        }
    }

    #[test]
    fn budget_reports_partial_table() {
        let c = ctx(2, 10);
        let s = spec(&c, 2, &["x1*x2"]);
        let opts = CountOptions { node_budget: 200, ..Default::default() };
        match count_table(&s, 10, &opts) {
            Err(Error::BudgetExceeded { budget: 200, partial }) => {
                assert!(!partial.rows.is_empty());
                let full = count_table(&s, 10, &CountOptions::default()).unwrap();
                assert_eq!(partial.rows[..], full.rows[..partial.rows.len()]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let opts = CountOptions { node_budget: 10, strategy: Strategy::Flat, ..Default::default() };
        assert!(matches!(count_table(&s, 3, &opts), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn fingerprint_is_stable_and_input_sensitive() {
        let c = ctx(2, 4);
        let a = spec(&c, 1, &["x1^2"]);
        let b = spec(&c, 1, &["x1^2"]);
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
        assert_ne!(a.fingerprint(), spec(&c, 1, &["x1^3"]).fingerprint());
        assert_ne!(a.fingerprint(), spec(&ctx(3, 4), 1, &["x1^2"]).fingerprint());
    }
}
