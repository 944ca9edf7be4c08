use std::f64::consts::PI;

use critline_core::acceptance::{self, Context, CACHE_TOP, GONEK_CAP, IBP_TOL, LEADING_COEFF_TOL, WEIGHTED_MEAN_TOL, STIELTJES_TOL};
use critline_core::argument::{s_of_t_counting, s_of_t_path, ArgPath};
use critline_core::dirichlet_mean::{
    empirical_weighted_integral, main_term, short_interval_difference, DirichletPoly, PrimeCoeff,
};
use critline_core::selberg::{exceedance_measure, loglog_level, r_of_t, sieve, ExceedanceSpec, PrimeTable};
use critline_core::sums_integrals::{
    f_sum, gonek_main_term, gonek_shifted_sum, ibp_identity_check, mean_square_main_term, moment2, moment4,
    moment4_deriv, p4_fit, stieltjes_identity_check, weighted_integral_s, GonekSpec, Interval, TestFunction,
};
use critline_core::zeros::{count_zeros_nt, ingest_zero_table, scan_zeros, write_cache, ZeroCache};
use critline_core::zeta_engine::{theta, zeta, EvalRequest, ThetaMode};
use critline_core::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::args::*;
use crate::output::{col, fmt_num, verdict_word, Report, ResultTable};
use crate::store::ZeroStore;

/// Largest prime the CLI sieves for.
const PRIME_LIMIT: u64 = 1_000_000;

pub fn run(command: &Command, store: &ZeroStore) -> Result<Report> {
    match command {
        Command::ZetaEval(a) => zeta_eval(a),
        Command::ZerosScan(a) => zeros_scan(a, store),
        Command::ZerosIngest(a) => zeros_ingest(a, store),
        Command::NtCheck(a) => nt_check(a, store),
        Command::Sfunc(a) => sfunc(a, store),
        Command::Exceedance(a) => exceedance(a, store),
        Command::Fsum(a) => fsum(a, store),
        Command::Gonek(a) => gonek(a, store),
        Command::Wint(a) => wint(a, store),
        Command::Moments(a) => moments(a),
        Command::P4fit(a) => p4fit(a),
        Command::Mvt(a) => mvt(a),
        Command::Identity(a) => identity(a, store),
        Command::Report(a) => report(a, store),
    }
}

fn primes_for(y: f64) -> Result<PrimeTable> {
    sieve(PRIME_LIMIT.min((y.max(2.0)).ceil() as u64).max(2))
}

fn interval(a: &IntervalArgs) -> Result<Interval> {
    let iv = Interval::new(a.height, a.length)?;
    if iv.h < iv.theorem_h() {
        eprintln!(
            "warning: H = {} is below T^(2/3) log^4 T = {} (the constant B is unspecified; B = 1 assumed)",
            fmt_num(iv.h),
            fmt_num(iv.theorem_h())
        );
    }
    Ok(iv)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn log_log(t: f64) -> f64 {
    t.ln().ln()
}

fn zeta_eval(a: &ZetaEvalArgs) -> Result<Report> {
    let heights = match a.t_end {
        Some(end) if a.points >= 2 && end > a.height => linspace(a.height, end, a.points),
        Some(_) => return Err(Error::Parameter("a profile needs --t-end > --t and --points >= 2".into())),
        None if a.points == 1 => vec![a.height],
        None => return Err(Error::Parameter("--points > 1 needs --t-end".into())),
    };
    let on_line = a.sigma == 0.5;
    let mut columns = vec![
        col("t", "imaginary part of s"),
        col("re_zeta", "Re ζ(σ+it)"),
        col("im_zeta", "Im ζ(σ+it)"),
        col("abs_zeta", "|ζ(σ+it)|"),
        col("theta", "Riemann–Siegel theta ϑ(t)"),
    ];
    if on_line {
        columns.push(col("hardy_z", "Z(t) = e^{iϑ(t)} ζ(1/2+it)"));
    }
    let rows: Vec<Result<Vec<f64>>> = heights
        .par_iter()
        .map(|&t| {
            let th = theta(t, ThetaMode::Exact)?.theta;
            let req = EvalRequest::new(Complex64::new(a.sigma, t), a.target, a.method.into())?;
            let z = zeta(&req)?;
            let mut row = vec![t, z.re, z.im, z.norm(), th];
            if on_line {
                row.push((Complex64::from_polar(1.0, th) * z).re);
            }
            Ok(row)
        })
        .collect();
    let mut table = ResultTable::new(columns);
    for row in rows {
        table.push(row?)?;
    }
    let mut rep = Report::new(table);
    rep.note_num("sigma", a.sigma);
    Ok(rep)
}

fn zeros_scan(a: &ZerosScanArgs, store: &ZeroStore) -> Result<Report> {
    let spec = a.scan.spec();
    let fresh = scan_zeros(a.from, a.to, &spec)?;
    let (cache, path) = match &a.out {
        Some(p) => (fresh, p.clone()),
        None if a.from == 0.0 => (fresh, store.path.clone()),
        None => {
            let mut existing = store.load()?.ok_or_else(|| {
                Error::Coverage(format!("no cache at {} to extend; scan from 0 or pass --out", store.path.display()))
            })?;
            existing.extend(fresh)?;
            (existing, store.path.clone())
        }
    };
    write_cache(&cache, &path)?;
    let mut rep = zero_listing(&cache, a.list)?;
    if a.to >= 10.0 {
        let expected = count_zeros_nt(a.to)?.count;
        let found = cache.count_le(a.to)?;
        rep.note("N", found.to_string());
        rep.verdict = Some(found == expected);
    }
    rep.note("cache", path.display().to_string());
    Ok(rep)
}

fn zero_listing(cache: &ZeroCache, list: bool) -> Result<Report> {
    let mut table;
    if list {
        table = ResultTable::new(vec![
            col("index", "rank among zeros with positive ordinate"),
            col("gamma", "ordinate of the zero"),
            col("tol", "width of the final sign-change bracket"),
            col("z_prime_abs", "|Z'(γ)|"),
        ]);
        for r in &cache.records {
            table.push(vec![r.index as f64, r.gamma, r.tol, r.z_prime_abs])?;
        }
    } else {
        table = ResultTable::new(vec![
            col("t_min", "start of the covered range"),
            col("t_max", "end of the covered range"),
            col("count_below", "zeros at or below t_min"),
            col("zeros", "zeros in (t_min, t_max]"),
        ]);
        table.push(vec![
            cache.t_min,
            cache.t_max_verified,
            cache.count_below as f64,
            cache.len() as f64,
        ])?;
    }
    Ok(Report::new(table))
}

fn zeros_ingest(a: &ZerosIngestArgs, store: &ZeroStore) -> Result<Report> {
    let cache = ingest_zero_table(&a.input)?;
    let path = a.out.clone().unwrap_or_else(|| store.path.clone());
    write_cache(&cache, &path)?;
    let mut rep = zero_listing(&cache, false)?;
    if cache.t_max_verified >= 10.0 {
        let expected = count_zeros_nt(cache.t_max_verified)?.count;
        rep.verdict = Some(cache.count_le(cache.t_max_verified)? == expected);
    }
    rep.note("cache", path.display().to_string());
    Ok(rep)
}

fn nt_check(a: &NtCheckArgs, store: &ZeroStore) -> Result<Report> {
    let top = a.heights.iter().copied().fold(0.0, f64::max);
    let cache = store.covering(top)?;
    let mut table = ResultTable::new(vec![
        col("T", "height"),
        col("theta_over_pi", "ϑ(T)/π"),
        col("S", "S(T) from the argument path"),
        col("raw", "ϑ(T)/π + 1 + S(T)"),
        col("N_formula", "raw count rounded to an integer"),
        col("N_scan", "zeros found by the sign-change scan"),
    ]);
    let mut all = true;
    for &t in &a.heights {
        let th = theta(t, ThetaMode::Exact)?.theta / PI;
        let s = s_of_t_path(t, &ArgPath::default())?;
        let count = count_zeros_nt(t)?;
        let scanned = cache.count_le(t)?;
        all &= scanned == count.count;
        table.push(vec![t, th, s, count.raw, count.count as f64, scanned as f64])?;
    }
    let mut rep = Report::new(table);
    if let [t] = a.heights[..] {
        rep.note("N", cache.count_le(t)?.to_string());
    } else {
        for &t in &a.heights {
            rep.note(format!("N({})", fmt_num(t)), cache.count_le(t)?.to_string());
        }
    }
    rep.verdict = Some(all);
    Ok(rep)
}

fn sfunc(a: &SfuncArgs, store: &ZeroStore) -> Result<Report> {
    if a.points < 2 {
        return Err(Error::Parameter("--points must be at least 2".into()));
    }
    let iv = Interval::new(a.interval.height, a.interval.length)?;
    let cache = store.covering(iv.end())?;
    let params = a.selberg.params(iv.t)?;
    let primes = primes_for(params.y)?;
    let mut columns = vec![
        col("t", "height"),
        col("S", "S(t) = N(t) - 1 - ϑ(t)/π, right-continuous"),
        col("R", "S(t) + (1/π) Σ_{p≤y} p^{-1/2} sin(t log p)"),
    ];
    if a.path {
        columns.push(col("S_path", "S(t) by continuous variation of arg ζ"));
    }
    let rows: Vec<Result<Vec<f64>>> = linspace(iv.t, iv.end(), a.points)
        .par_iter()
        .map(|&t| {
            let mut row = vec![t, s_of_t_counting(t, &cache)?, r_of_t(t, &params, &primes, &cache)?];
            if a.path {
                row.push(s_of_t_path(t, &ArgPath::default())?);
            }
            Ok(row)
        })
        .collect();
    let mut table = ResultTable::new(columns);
    for row in rows {
        table.push(row?)?;
    }
    let mut rep = Report::new(table);
    rep.note_num("y", params.y);
    Ok(rep)
}

fn exceedance(a: &ExceedanceArgs, store: &ZeroStore) -> Result<Report> {
    let (t, h) = (a.interval.height, a.interval.length);
    let levels: Vec<f64> = if !a.levels.is_empty() {
        a.levels.clone()
    } else if !a.multiples.is_empty() {
        a.multiples.iter().map(|&c| loglog_level(c, t)).collect::<Result<_>>()?
    } else {
        return Err(Error::Parameter("give levels with --V or --c".into()));
    };
    let cache = store.covering(t + h)?;
    let params = a.selberg.params(t)?;
    let primes = primes_for(params.y)?;
    let quad = a.quad.spec()?;
    let mut table = ResultTable::new(vec![
        col("V", "level"),
        col("m", "moment order; the certificate uses R^{2m}"),
        col("measure", "grid measure of {t in [T, T+H] : |R(t)| >= V}"),
        col("certificate", "V^{-2m} ∫ R^{2m}"),
        col("grid_certificate", "V^{-2m} times the grid sum of R^{2m}"),
        col("slack", "one grid cell plus the grid/quadrature gap"),
        col("holds", "1 when measure <= certificate + slack"),
    ]);
    let mut all = true;
    for &level in &levels {
        for &m in &a.orders {
            let spec = ExceedanceSpec {
                level,
                m,
                grid_step: a.grid_step,
            };
            let e = exceedance_measure(t, h, &spec, &params, &primes, &cache, &quad)?;
            let holds = e.chebyshev_holds();
            all &= holds;
            table.push(vec![
                level,
                m as f64,
                e.measure,
                e.certificate,
                e.grid_certificate,
                e.slack,
                holds as u8 as f64,
            ])?;
        }
    }
    let mut rep = Report::new(table);
    rep.note_num("y", params.y);
    rep.verdict = Some(all);
    Ok(rep)
}

fn fsum(a: &FsumArgs, store: &ZeroStore) -> Result<Report> {
    let iv = interval(&a.interval)?;
    let cache = store.covering(iv.end())?;
    let f = f_sum(&iv, &cache)?;
    let mut table = ResultTable::new(vec![
        col("T", "start of the interval"),
        col("H", "length of the interval"),
        col("zeros", "zeros in (T, T+H]"),
        col("value", "F(T, H), sum over zeros off the critical line"),
        col("noise_bound", "Σ (2 tol |Z'(γ)|)², the refinement noise floor"),
    ]);
    table.push(vec![iv.t, iv.h, f.zeros as f64, f.value, f.noise_bound])?;
    let mut rep = Report::new(table);
    rep.note_num("value", f.value);
    rep.note_num("noise_bound", f.noise_bound);
    rep.verdict = Some(f.consistent_with_rh());
    Ok(rep)
}

fn gonek(a: &GonekArgs, store: &ZeroStore) -> Result<Report> {
    let cache = store.covering(a.height)?;
    let scale = a.height * a.height.ln();
    let mut table = ResultTable::new(vec![
        col("fraction", "shift as a fraction of L = log(T/2π)/2π"),
        col("alpha", "alpha = fraction times L"),
        col("shifted_sum", "Σ_{0<γ≤T} |ζ(1/2 + i(γ + alpha/L))|²"),
        col("main_term", "(1 - (sin πα / πα)²) (T/2π) log² T"),
        col("difference", "shifted_sum - main_term"),
        col("normalized", "difference / (T log T)"),
    ]);
    let mut all = true;
    for &c in &a.fractions {
        let spec = GonekSpec::with_fraction(a.height, c)?;
        let sum = gonek_shifted_sum(&spec, &cache)?;
        let main = gonek_main_term(&spec);
        let norm = (sum - main) / scale;
        all &= norm.abs() <= GONEK_CAP;
        table.push(vec![c, spec.alpha, sum, main, sum - main, norm])?;
    }
    let mut rep = Report::new(table);
    rep.note_num("cap", GONEK_CAP);
    rep.verdict = Some(all);
    Ok(rep)
}

fn wint(a: &WintArgs, store: &ZeroStore) -> Result<Report> {
    let iv = interval(&a.interval)?;
    let cache = store.covering(iv.end())?;
    let quad = a.quad.spec()?;
    let (l, ll) = (iv.t.ln(), log_log(iv.t));
    let mut table = ResultTable::new(vec![
        col("k", "power of S"),
        col("value", "∫_T^{T+H} |ζ(1/2+it)|² S(t)^k dt"),
        col("abs_integral", "∫ of the absolute integrand"),
        col("change", "quadrature self-convergence estimate"),
        col("normalized", "value / (H log T (log log T)^k)"),
    ]);
    for &k in &a.powers {
        let r = weighted_integral_s(&iv, k, &quad, &cache)?;
        let norm = r.value / (iv.h * l * ll.powi(k as i32));
        table.push(vec![k as f64, r.value, r.abs_integral, r.change, norm])?;
    }
    Ok(Report::new(table))
}

/// T log⁴T / (2π²), zero at the origin.
fn fourth_main(t: f64) -> f64 {
    if t <= 1.0 {
        0.0
    } else {
        t * t.ln().powi(4) / (2.0 * PI * PI)
    }
}

fn moments(a: &MomentsArgs) -> Result<Report> {
    let quad = a.quad.spec()?;
    let mut columns = vec![
        col("from", "lower limit"),
        col("to", "upper limit"),
        col("m2", "∫|ζ(1/2+it)|² dt"),
        col("m2_ratio", "m2 over the difference of T(log(T/2π) + 2C₀ - 1)"),
        col("m4", "∫|ζ(1/2+it)|⁴ dt"),
        col("m4_ratio", "m4 over the difference of T log⁴T / (2π²)"),
    ];
    if a.deriv {
        columns.push(col("m4_deriv", "∫|ζ'(1/2+it)|⁴ dt"));
    }
    let mut table = ResultTable::new(columns);
    for &hi in &a.upper {
        let m2 = moment2(a.from, hi, &quad)?.value;
        let m4 = moment4(a.from, hi, &quad)?.value;
        let main2 = mean_square_main_term(hi) - if a.from > 0.0 { mean_square_main_term(a.from) } else { 0.0 };
        let main4 = fourth_main(hi) - fourth_main(a.from);
        let mut row = vec![a.from, hi, m2, m2 / main2, m4, m4 / main4];
        if a.deriv {
            row.push(moment4_deriv(a.from, hi, &quad)?.value);
        }
        table.push(row)?;
    }
    Ok(Report::new(table))
}

fn p4fit(a: &P4fitArgs) -> Result<Report> {
    if a.samples < 2 || !(a.from > 1.0 && a.to > a.from) {
        return Err(Error::Parameter("need --samples >= 2 and 1 < --from < --to".into()));
    }
    let quad = a.quad.spec()?;
    let ratio = a.to / a.from;
    let heights: Vec<f64> = (0..a.samples)
        .map(|i| a.from * ratio.powf(i as f64 / (a.samples - 1) as f64))
        .collect();
    let values = critline_core::sums_integrals::moment4_cumulative(&heights, &quad)?;
    let samples: Vec<(f64, f64)> = heights.iter().copied().zip(values).collect();
    let fit = p4_fit(&samples)?;
    let mut table = ResultTable::new(vec![
        col("T", "sample height"),
        col("m4", "∫_0^T |ζ(1/2+it)|⁴ dt"),
        col("mean", "m4 / T"),
        col("residual", "mean minus the fitted quartic in log T"),
    ]);
    for (&(t, v), &r) in samples.iter().zip(&fit.residuals) {
        table.push(vec![t, v, v / t, r])?;
    }
    let target = 1.0 / (2.0 * PI * PI);
    let mut rep = Report::new(table);
    for (j, c) in fit.coefficients.iter().enumerate() {
        rep.note_num(format!("c{j}"), *c);
    }
    rep.note_num("leading_target", target);
    rep.note_num("condition", fit.condition);
    rep.note_num("rms_residual", fit.rms_residual());
    rep.verdict = Some((fit.leading() / target - 1.0).abs() <= LEADING_COEFF_TOL);
    Ok(rep)
}

fn mvt_poly(a: &MvtArgs) -> Result<DirichletPoly> {
    match (&a.poly, a.primes_up_to) {
        (Some(path), None) => DirichletPoly::load(path),
        (None, Some(y)) => {
            let weight = match a.coeff {
                CoeffArg::Logp => PrimeCoeff::LogP,
                CoeffArg::Unit => PrimeCoeff::Unit,
            };
            DirichletPoly::on_primes(y, weight, &primes_for(y)?)
        }
        (None, None) => Ok(DirichletPoly::unit()),
        (Some(_), Some(_)) => Err(Error::Parameter("--poly and --primes-up-to exclude each other".into())),
    }
}

fn mvt(a: &MvtArgs) -> Result<Report> {
    let poly = mvt_poly(a)?;
    if a.main_only {
        let m = main_term(a.height, &poly)?;
        let mut table = ResultTable::new(vec![
            col("T", "height"),
            col("M", "length of the Dirichlet polynomial"),
            col("total", "main term of ∫_0^T |ζ A|² dt"),
            col("diagonal", "contribution of k = l"),
            col("off_diagonal", "contribution of k != l"),
            col("diagonal_share", "diagonal / total"),
        ]);
        table.push(vec![a.height, poly.len() as f64, m.total, m.diagonal, m.off_diagonal, m.diagonal_share()])?;
        return Ok(Report::new(table));
    }
    let quad = a.quad.spec()?;
    let (lo, hi, cmp) = match a.length {
        Some(h) => (a.height, a.height + h, short_interval_difference(a.height, h, &poly, &quad)?),
        None => (0.0, a.height, empirical_weighted_integral(a.height, &poly, &quad)?),
    };
    let rel = cmp.error.abs() / cmp.main.abs();
    let mut table = ResultTable::new(vec![
        col("from", "lower limit"),
        col("to", "upper limit"),
        col("empirical", "quadrature of |ζ(1/2+it) A(1/2+it)|²"),
        col("main", "main term from the coefficient sums"),
        col("error", "empirical - main"),
        col("relative", "|error| / main"),
        col("quadrature_change", "quadrature self-convergence estimate"),
    ]);
    table.push(vec![lo, hi, cmp.empirical, cmp.main, cmp.error, rel, cmp.quadrature_change])?;
    let mut rep = Report::new(table);
    rep.note_num("tolerance", WEIGHTED_MEAN_TOL);
    rep.verdict = Some(rel < WEIGHTED_MEAN_TOL);
    Ok(rep)
}

fn identity(a: &IdentityArgs, store: &ZeroStore) -> Result<Report> {
    let iv = Interval::new(a.interval.height, a.interval.length)?;
    let cache = store.covering(iv.end())?;
    let quad = a.quad.spec()?;
    let mut table = ResultTable::new(vec![
        col("case", "0: f = 1, 1: f = t, 2: bump on [T, T+H] (Stieltjes); 3: |ζ|² against R (parts)"),
        col("left", "sum over zeros side"),
        col("right", "integral side"),
        col("residual", "left - right"),
        col("relative", "residual over the scale of the terms"),
    ]);
    let mut all = true;
    if matches!(a.which, IdentityKind::Stieltjes | IdentityKind::All) {
        let fns = [
            TestFunction::One,
            TestFunction::Linear,
            TestFunction::Bump {
                lo: iv.t,
                hi: iv.end(),
            },
        ];
        for (case, f) in fns.iter().enumerate() {
            let c = stieltjes_identity_check(&iv, f, &quad, &cache)?;
            all &= c.relative() < STIELTJES_TOL;
            table.push(vec![case as f64, c.lhs, c.lhs - c.residual, c.residual, c.relative()])?;
        }
    }
    if matches!(a.which, IdentityKind::Ibp | IdentityKind::All) {
        let params = a.selberg.params(iv.t)?;
        let primes = primes_for(params.y)?;
        let c = ibp_identity_check(&iv, &quad, &cache, &params, &primes)?;
        all &= c.relative() < IBP_TOL;
        table.push(vec![3.0, c.direct, c.by_parts, c.residual, c.relative()])?;
    }
    let mut rep = Report::new(table);
    rep.verdict = Some(all);
    Ok(rep)
}

fn report(a: &ReportArgs, store: &ZeroStore) -> Result<Report> {
    let ctx = Context::with_zeros(store.covering(CACHE_TOP)?)?;
    let ids: Vec<u8> = if a.only.is_empty() { (1..=12).collect() } else { a.only.clone() };
    let mut table = ResultTable::new(vec![
        col("criterion", "acceptance criterion number"),
        col("passed", "1 on PASS, 0 on FAIL"),
    ]);
    let mut rep_notes = Vec::new();
    let mut all = true;
    for id in ids {
        let outcome = acceptance::run_criterion(&ctx, id)?;
        eprintln!("{}", outcome.line());
        all &= outcome.passed;
        table.push(vec![id as f64, outcome.passed as u8 as f64])?;
        rep_notes.push((
            format!("criterion {id}"),
            format!("{} {}: {}", verdict_word(outcome.passed), outcome.name, outcome.detail),
        ));
    }
    let mut rep = Report::new(table);
    rep.summary = rep_notes;
    rep.verdict = Some(all);
    Ok(rep)
}
