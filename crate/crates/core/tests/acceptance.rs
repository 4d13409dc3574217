//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always shown.
//! Every check recomputes its expected values independently of the library:
//! brute-force enumeration, closed forms, or exact integer comparisons.

use std::num::NonZeroUsize;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fqlct::counting::{
    count_nk, count_table, verify_remez_monic, verify_weierstrass_smallball, CountOptions, IdealSpec, Strategy,
};
use fqlct::lct::{
    best_bound, complexity_lower_bound, estimate_lct, example_curve, ideal_bounds, zeta_partial_sum, BoundParams,
    BoundValue, Window, ZetaVerdict, EXAMPLE_CURVE_CAP,
};
use fqlct::weierstrass::{find_distinguished_order, weierstrass_divide, weierstrass_prepare};
use fqlct::{parse_poly, FieldSpec, MPoly, OElem, RingCtx};

struct Verdict {
    id: &'static str,
    pass: bool,
    detail: String,
    /// Failure caused only by the host lacking the hardware the criterion assumes.
    hardware_limited: bool,
}

fn verdict(id: &'static str, pass: bool, detail: String) -> Verdict {
    Verdict { id, pass, detail, hardware_limited: false }
}

fn ctx(p: u32, m: u32) -> RingCtx {
    RingCtx::new(FieldSpec::prime(p).unwrap(), m).unwrap()
}

fn random_elem(rng: &mut ChaCha8Rng, c: &RingCtx) -> OElem {
    let co: Vec<_> = (0..c.precision()).map(|_| c.field().element(rng.gen_range(0..c.q())).unwrap()).collect();
    c.from_coeffs(&co)
}

fn random_poly(rng: &mut ChaCha8Rng, c: &RingCtx, n: usize, max_deg: u32, terms: usize) -> MPoly {
    let mut out = Vec::new();
    for _ in 0..terms {
        let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=max_deg)).collect();
        out.push((e, random_elem(rng, c)));
    }
    MPoly::from_terms(c, n, out)
}

/// c x_n^{s0} + t h: distinguished of order s0 in x_n.
fn random_distinguished(rng: &mut ChaCha8Rng, c: &RingCtx, n: usize, s0: u32) -> MPoly {
    let lead = c.from_field(c.field().element(rng.gen_range(1..c.q())).unwrap());
    let mut e = vec![0; n];
    e[n - 1] = s0;
    let nterms = rng.gen_range(1..6);
    let h = random_poly(rng, c, n, 3, nterms);
    &MPoly::monomial(c, n, e, lead) + &h.scale(&c.t_pow(1))
}

fn vanishes_mod(v: &OElem, k: u32) -> bool {
    v.coeffs().iter().take(k as usize).all(|c| c.is_zero())
}

/// #{x in (O/t^k)^n : every generator vanishes mod t^k}, by direct enumeration.
fn brute_count(gens: &[MPoly], n: usize, k: u32) -> u64 {
    let c = gens[0].ctx();
    let residues = c.enumerate(k).unwrap();
    let mut idx = vec![0usize; n];
    let mut count = 0;
    loop {
        let point: Vec<OElem> = idx.iter().map(|&i| residues[i].clone()).collect();
        if gens.iter().all(|g| vanishes_mod(&g.evaluate(&point).unwrap(), k)) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            idx[i] += 1;
            if idx[i] < residues.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// N^d q^k <= d^d q^{nkd}.
fn small_ball_holds(count: u64, q: u32, n: u32, k: u32, d: u32) -> bool {
    let q = BigUint::from(q);
    BigUint::from(count).pow(d) * q.pow(k) <= BigUint::from(d).pow(d) * q.pow(n * k * d)
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn remez_suite() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut polys, mut violations, mut mismatches) = (0, 0, 0);
    for q in [2u32, 3] {
        let c = ctx(q, 5);
        for d in 1..=3u32 {
            for _ in 0..200 {
                let mut terms: Vec<(Vec<u32>, OElem)> = (0..d).map(|i| (vec![i], random_elem(&mut rng, &c))).collect();
                terms.push((vec![d], c.one()));
                let f = MPoly::from_terms(&c, 1, terms);
                let rep = verify_remez_monic(&f, 4, &CountOptions::default()).unwrap();
                polys += 1;
                for row in &rep.rows {
                    if row.count != brute_count(std::slice::from_ref(&f), 1, row.k) {
                        mismatches += 1;
                    }
                    if !small_ball_holds(row.count, q, 1, row.k, d) || !row.pass {
                        violations += 1;
                    }
                }
            }
        }
    }
    let t = start.elapsed();
    let pass = violations == 0 && mismatches == 0 && t < Duration::from_secs(30);
    verdict(
        "1 remez",
        pass,
        format!("{polys} monic polynomials, {violations} violations, {mismatches} count mismatches, {}", secs(t)),
    )
}

fn weierstrass_smallball_suite() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let c = ctx(2, 4);
    let (mut violations, mut mismatches) = (0, 0);
    for _ in 0..50 {
        let s = rng.gen_range(1..=3u32);
        let mut coeffs: Vec<MPoly> = (0..s)
            .map(|_| {
                let nterms = rng.gen_range(0..4);
                random_poly(&mut rng, &c, 1, 2, nterms)
            })
            .collect();
        coeffs.push(MPoly::one(&c, 1));
        let f = MPoly::from_last_var_coeffs(&c, &coeffs);
        let rep = verify_weierstrass_smallball(&f, 3, &CountOptions::default()).unwrap();
        for row in &rep.rows {
            if row.count != brute_count(std::slice::from_ref(&f), 2, row.k) {
                mismatches += 1;
            }
            if !small_ball_holds(row.count, 2, 2, row.k, s) || !row.pass {
                violations += 1;
            }
        }
    }
    let t = start.elapsed();
    let pass = violations == 0 && mismatches == 0 && t < Duration::from_secs(60);
    verdict(
        "2 weierstrass-smallball",
        pass,
        format!("50 Weierstrass polynomials, {violations} violations, {mismatches} count mismatches, {}", secs(t)),
    )
}

fn is_weierstrass_of_degree(omega: &MPoly, s0: u32) -> bool {
    let n = omega.n();
    let mut lead = vec![0; n];
    lead[n - 1] = s0;
    omega.degree_in_last() == Some(s0)
        && omega.coeff(&lead).is_one()
        && omega.terms().filter(|(e, _)| e[n - 1] == s0).count() == 1
}

fn preparation_identity() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let c = ctx(3, 6);
    let mut good = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=2);
        let s0 = rng.gen_range(1..=3);
        let f = random_distinguished(&mut rng, &c, n, s0);
        let ok = (|| {
            let info = find_distinguished_order(&f).ok()?;
            let prep = weierstrass_prepare(&f, &info).ok()?;
            let product = &prep.unit_u * &f;
            Some(
                info.s0 == s0
                    && product.precision() == 6
                    && (&product - &prep.omega).is_zero()
                    && is_weierstrass_of_degree(&prep.omega, s0)
                    && c.is_unit(&prep.unit_u.constant_term()),
            )
        })();
        good += (ok == Some(true)) as u32;
    }
    let t = start.elapsed();
    verdict("3 preparation", good == 100 && t < Duration::from_secs(30), format!("{good}/100, {}", secs(t)))
}

fn division_contract() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let c = ctx(2, 6);
    let mut good = 0;
    let mut min_prec = u32::MAX;
    for _ in 0..200 {
        let n = rng.gen_range(1..=2);
        let s0 = rng.gen_range(1..=3);
        let f = random_distinguished(&mut rng, &c, n, s0);
        let nterms = rng.gen_range(1..8);
        let g = random_poly(&mut rng, &c, n, 5, nterms);
        let info = find_distinguished_order(&f).unwrap();
        let (quot, rem) = weierstrass_divide(&g, &f, &info).unwrap();
        let (quot2, rem2) = weierstrass_divide(&g, &f, &info).unwrap();
        let recombined = &(&quot * &f) + &rem;
        let prec = recombined.precision();
        min_prec = min_prec.min(prec);
        let ok = prec >= 1
            && (&g - &recombined).is_zero()
            && rem.degree_in_last().is_none_or(|d| d < s0)
            && format!("{quot}|{rem}|{}|{}", quot.precision(), rem.precision())
                == format!("{quot2}|{rem2}|{}|{}", quot2.precision(), rem2.precision());
        good += ok as u32;
    }
    verdict("4 division", good == 200, format!("{good}/200, certified precision >= {min_prec}"))
}

fn closed_form_counts() -> Verdict {
    let mut mismatches = 0;
    let mut worst = 0f64;
    for q in [2u32, 3] {
        let c = ctx(q, 12);
        for big_n in 1..=5u32 {
            let mut e = vec![0; 1];
            e[0] = big_n;
            let f = MPoly::monomial(&c, 1, e, c.one());
            let table = count_table(&IdealSpec::single(f).unwrap(), 12, &CountOptions::default()).unwrap();
            for row in &table.rows {
                let expected = (q as u64).pow(row.k - row.k.div_ceil(big_n));
                mismatches += (row.count != expected) as u32;
            }
            let window = Window { lo: 12 - big_n * (12 / big_n), hi: 12 };
            let est = estimate_lct(&table, Some(window)).unwrap();
            let err = (est.regression.unwrap() - 1.0 / big_n as f64).abs();
            worst = worst.max(err);
        }
    }
    verdict(
        "5 closed-form",
        mismatches == 0 && worst < 1e-9,
        format!("y^N for N<=5, q in {{2,3}}, k<=12: {mismatches} mismatches, max |estimate - 1/N| = {worst:.1e}"),
    )
}

fn example_reproduction() -> Verdict {
    let field = FieldSpec::prime(2).unwrap();
    let mut cases = Vec::new();
    for m in 1..=3u32 {
        for big_d in 1..=8u32 {
            for d in 1..=8u32 {
                if d as u64 * (big_d as u64).pow(m) <= 8 {
                    cases.push((d, big_d, m));
                }
            }
        }
    }
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    for &(d, big_d, m) in &cases {
        let start = Instant::now();
        let p = (d * big_d.pow(m)) as u64;
        let rep = example_curve(d, big_d, m, &field, 16, EXAMPLE_CURVE_CAP, &CountOptions::default()).unwrap();
        let bound = complexity_lower_bound(BoundParams { d, big_d, m, n: m + 1 }).unwrap();
        let t = start.elapsed();
        slowest = slowest.max(t);
        let ok = rep.estimate.regression_exact == Some(Ratio::new(1, p as i64))
            && bound.value == BoundValue::Finite(Ratio::new(1, p))
            && rep.bound == bound
            && rep.matches
            && t < Duration::from_secs(10);
        if !ok {
            bad.push((d, big_d, m));
        }
    }
    verdict(
        "6 example-curve",
        bad.is_empty(),
        format!(
            "{} cases with d*D^m <= 8, m <= 3, q = 2: {} mismatches {:?}, slowest {}",
            cases.len(),
            bad.len(),
            bad,
            secs(slowest)
        ),
    )
}

fn oracle_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let (mut agree, mut brute_checked, mut brute_agree) = (0, 0, 0);
    for _ in 0..50 {
        let q = [2u32, 3][rng.gen_range(0..2)];
        let n = rng.gen_range(1..=3usize);
        let log_cap = if q == 2 { 16 } else { 10 };
        let k = (log_cap / n as u32).clamp(1, 8);
        let c = ctx(q, k);
        let ngens = rng.gen_range(1..=2);
        let gens: Vec<MPoly> = (0..ngens)
            .map(|_| {
                let nterms = rng.gen_range(1..5);
                let g = random_poly(&mut rng, &c, n, 3, nterms);
                let zero = vec![0; n];
                let c0 = g.coeff(&zero).clone();
                &g - &MPoly::constant(&c, n, c0)
            })
            .map(|g| if g.is_zero() { MPoly::var(&c, n, 0) } else { g })
            .collect();
        let (x0, j) = if rng.gen_bool(0.3) {
            ((0..n).map(|_| c.from_int(rng.gen_range(0..q as i64))).collect(), rng.gen_range(0..=1))
        } else {
            (vec![c.zero(); n], 0)
        };
        let spec = IdealSpec::new(gens, Some(x0), j).unwrap();
        let pruned = count_table(&spec, k, &CountOptions::with_strategy(Strategy::Pruned)).unwrap();
        let flat = count_table(&spec, k, &CountOptions::with_strategy(Strategy::Flat)).unwrap();
        let same = pruned.rows == flat.rows;
        agree += same as u32;
        if (q as u64).pow(n as u32 * k) <= 1 << 10 {
            brute_checked += 1;
            let b = brute_count(spec.generators(), n, k);
            brute_agree += (pruned.count(k) == Some(b)) as u32;
        }
    }
    verdict(
        "7 oracle-equivalence",
        agree == 50 && brute_agree == brute_checked,
        format!("pruned = flat on {agree}/50; brute force agrees on {brute_agree}/{brute_checked}"),
    )
}

fn zeta_bound() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for d in [2u32, 3] {
        let c = ctx(2, 13);
        let f = MPoly::monomial(&c, 1, vec![d], c.one());
        let table = count_table(&IdealSpec::single(f).unwrap(), 13, &CountOptions::default()).unwrap();
        let s = Ratio::new(1u64, 2 * d as u64);
        let rep = zeta_partial_sum(&table, s, 12, Some(d)).unwrap();
        // Closed-form oracle: N_k = 2^{k - ceil(k/d)}.
        let mu = |k: u32| 2f64.powi(-(k.div_ceil(d) as i32));
        let sf = 1.0 / (2.0 * d as f64);
        let bound = d as f64 / (1.0 - 2f64.powf(-(1.0 / d as f64 - sf)));
        let mut sum = 0.0;
        let mut prev = f64::NEG_INFINITY;
        for row in &rep.rows {
            sum += (mu(row.k) - mu(row.k + 1)) * 2f64.powf(row.k as f64 * sf);
            ok &= (row.partial_sum.to_f64() - sum).abs() < 1e-9;
            ok &= sum >= prev && sum < bound;
            ok &= row.within_bound == Some(true);
            prev = sum;
        }
        ok &= rep.monotone && rep.verdict == ZetaVerdict::WithinBound && rep.rows.len() == 13;
        notes.push(format!("d={d}: S_12 = {sum:.6} <= {bound:.6}"));
    }
    verdict("8 zeta-bound", ok, notes.join("; "))
}

fn estimator_bound_consistency() -> Verdict {
    let corpus: &[(u32, usize, &[&str], u32)] = &[
        (2, 1, &["x1"], 12),
        (2, 1, &["x1^2"], 12),
        (2, 1, &["x1^3"], 12),
        (3, 1, &["x1^2 + t*x1"], 8),
        (3, 1, &["x1^4 + x1^5"], 8),
        (2, 2, &["x1*x2"], 8),
        (2, 2, &["x1^2 + x2^3"], 8),
        (3, 2, &["x1^2 - x2^3"], 6),
        (2, 2, &["x1^2*x2"], 8),
        (2, 2, &["x1 + x2^2"], 8),
        (3, 2, &["x1^2 + x2^2"], 6),
        (2, 3, &["x1*x2*x3"], 5),
        (3, 3, &["x1^2 + x2^2 + x3^2"], 4),
        (2, 2, &["x1^2", "x2^2"], 8),
        (2, 2, &["x1*x2", "x1 + x2^2"], 8),
        (3, 2, &["x1^3 - x2^2", "x1*x2"], 6),
        (2, 2, &["x1^3 + t*x2", "x2^2"], 8),
    ];
    let mut checked = 0;
    let mut worst = f64::INFINITY;
    let mut bad = Vec::new();
    for &(q, n, gens, k) in corpus {
        let c = ctx(q, k);
        let polys: Vec<MPoly> = gens.iter().map(|g| parse_poly(g, &c, n).unwrap()).collect();
        let spec = IdealSpec::new(polys, None, 0).unwrap();
        let table = count_table(&spec, k, &CountOptions::default()).unwrap();
        let est = estimate_lct(&table, None).unwrap();
        let best = best_bound(&ideal_bounds(&spec, 0).unwrap());
        if let (Some(r), Some(b)) = (est.regression, best) {
            if est.infinite || b.value == BoundValue::Infinite {
                continue;
            }
            checked += 1;
            let margin = r - b.as_f64();
            worst = worst.min(margin);
            if margin < -0.02 {
                bad.push(gens.join(", "));
            }
        }
    }
    verdict(
        "9 estimator-vs-bound",
        bad.is_empty() && checked > 0,
        format!("{checked} corpus entries, min (estimate - bound) = {worst:.4}, below by > 0.02: {bad:?}"),
    )
}

fn performance_pruned() -> Verdict {
    let c = ctx(2, 10);
    let spec = IdealSpec::single(parse_poly("x1*x2", &c, 2).unwrap()).unwrap();
    let start = Instant::now();
    let table = count_table(&spec, 10, &CountOptions::default()).unwrap();
    let t = start.elapsed();
    // N_k(x1 x2) = (k + 2) 2^{k-1}: pairs with v(x1) + v(x2) >= k.
    let exact = table.rows.iter().all(|r| r.count == (r.k as u64 + 2) << (r.k - 1));
    verdict("10a pruned-performance", exact && t < Duration::from_secs(5), format!("k_max = 10 in {}", secs(t)))
}

fn performance_parallel() -> Verdict {
    let c = ctx(2, 11);
    let spec = IdealSpec::single(parse_poly("x1*x2", &c, 2).unwrap()).unwrap();
    let run = |workers| {
        let opts = CountOptions { strategy: Strategy::Flat, workers, ..Default::default() };
        let start = Instant::now();
        let v = count_nk(&spec, 11, &opts).unwrap();
        (v, start.elapsed())
    };
    let (one, t1) = run(1);
    let (four, t4) = run(4);
    let identical = one == four && one == 13 << 10;
    let speedup = t1.as_secs_f64() / t4.as_secs_f64().max(1e-9);
    let cpus = std::thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1);
    let pass = identical && speedup >= 2.0;
    Verdict {
        id: "10b parallel-speedup",
        pass,
        detail: format!(
            "flat 2^22 points: 1 worker {}, 4 workers {}, speedup {speedup:.2}x, identical {identical}, {cpus} CPU(s) available",
            secs(t1),
            secs(t4)
        ),
        hardware_limited: !pass && identical && cpus < 4,
    }
}

fn main() -> ExitCode {
    let checks: [fn() -> Verdict; 11] = [
        remez_suite,
        weierstrass_smallball_suite,
        preparation_identity,
        division_contract,
        closed_form_counts,
        example_reproduction,
        oracle_equivalence,
        zeta_bound,
        estimator_bound_consistency,
        performance_pruned,
        performance_parallel,
    ];
    let mut blocking = 0;
    let mut limited = 0;
    for check in checks {
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let note = if v.hardware_limited { " [needs more CPUs than this host has]" } else { "" };
        println!("{tag} criterion {}: {}{note}", v.id, v.detail);
        if !v.pass {
            if v.hardware_limited {
                limited += 1;
            } else {
                blocking += 1;
            }
        }
    }
    println!("acceptance: {blocking} failing, {limited} failing for lack of hardware");
    if blocking == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
