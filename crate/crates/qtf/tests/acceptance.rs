//! Acceptance gate for the crate: seven criteria, one test each, every test
//! printing a single `criterion N: PASS/FAIL` line with its headline numbers.
//! Tolerances are pinned here in code; exact checks use rational equality.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qtf::{
    analyze, analyze_filter, build_e_matrix, canonical_shift_rep, construct_differencing,
    construct_directional, construct_vm_linear, construct_vm_sos, factor_hermitian, fixture,
    fixture_names, make_context, nabla_decompose, nabla_reconstruct, nabla_delta, rat_to_f64,
    sample_refinable, signed_squares_vm, smoothness_l2, spot_check_frequency, squares_reconstruct,
    synthesize, verify_bank, vm_ceiling, DilationContext, DirectionalOpts, LaurentMatrix, QtfBank,
    Rat, RationalLaurent, ScaledFilter, Sign, SmoothnessOpts, VmLinearOpts, Vmo,
};

fn r(p: i64, q: i64) -> Rat {
    Rat::new(p.into(), q.into())
}

fn report(n: usize, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n}: {status} - {detail}");
}

fn haar() -> (DilationContext, RationalLaurent) {
    let ctx = make_context(&[vec![2]]).unwrap();
    let a = RationalLaurent::from_table_1d(0, &[r(1, 2), r(1, 2)]);
    (ctx, a)
}

/// Distinct `(dilation, lowpass)` pairs across the bundled banks, in catalog
/// order; two fixture files share the interpolatory filter and two share the
/// 5x5 quincunx filter.
fn unique_lowpasses() -> Vec<(String, DilationContext, RationalLaurent)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for name in fixture_names() {
        let bank = fixture(name).unwrap();
        let key = format!("{:?}|{:?}", bank.ctx().matrix(), bank.lowpass());
        if seen.insert(key) {
            out.push((name.to_string(), bank.ctx().clone(), bank.lowpass().clone()));
        }
    }
    out
}

#[test]
fn criterion_1_fixture_verification() {
    let t0 = Instant::now();
    let mut problems = Vec::new();
    let names = fixture_names();
    for name in &names {
        let bank = fixture(name).unwrap();
        match verify_bank(&bank) {
            Ok(rep) => {
                if !rep.passes || !rep.residual.is_zero() {
                    problems.push(format!("{name}: verification failed ({rep:?})"));
                }
                let drift = spot_check_frequency(&bank, 32);
                if drift >= 1e-10 {
                    problems.push(format!("{name}: frequency drift {drift:e}"));
                }
            }
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    let elapsed = t0.elapsed();
    let ok = problems.is_empty() && elapsed < Duration::from_secs(5);
    report(
        1,
        ok,
        &format!(
            "{} bundled banks verify with zero residual in {:.2?}",
            names.len(),
            elapsed
        ),
    );
    assert!(problems.is_empty(), "{problems:#?}");
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
}

#[test]
fn criterion_2_directional_reproduction() {
    let opts = DirectionalOpts::default();

    let reference13 = fixture("dyadic_dir13").unwrap();
    let t0 = Instant::now();
    let built13 = construct_directional(reference13.ctx(), reference13.lowpass(), &opts).unwrap();
    let t13 = t0.elapsed();
    let match13 = qtf::same_bank_multiset(built13.highpass(), reference13.highpass());
    let tight13 = built13.is_tight();

    let reference7 = fixture("interp_dir7").unwrap();
    let t1 = Instant::now();
    let built7 = construct_directional(reference7.ctx(), reference7.lowpass(), &opts).unwrap();
    let t7 = t1.elapsed();
    let match7 = qtf::same_bank_multiset(built7.highpass(), reference7.highpass());
    let plus = built7.highpass().iter().filter(|(_, s)| *s == Sign::Plus).count();
    let minus = built7.highpass().len() - plus;

    let ok = match13
        && tight13
        && built13.highpass().len() == 13
        && match7
        && plus == 4
        && minus == 3
        && t13 < Duration::from_secs(1)
        && t7 < Duration::from_secs(1);
    report(
        2,
        ok,
        &format!(
            "13-filter tight bank and 7-filter bank with signs (+x4, -x3) rebuilt in {t13:.2?} / {t7:.2?}"
        ),
    );
    assert!(match13, "13-filter bank multiset mismatch");
    assert!(tight13);
    assert!(match7, "7-filter bank multiset mismatch");
    assert_eq!((plus, minus), (4, 3));
    assert!(t13 < Duration::from_secs(1) && t7 < Duration::from_secs(1));
}

#[test]
fn criterion_3_counts_and_conditions() {
    let i4 = fixture("interp_dir7").unwrap();
    let rep_i4 = analyze_filter(i4.ctx(), i4.lowpass());

    let dir13 = fixture("dyadic_dir13").unwrap();
    let rep_13 = analyze_filter(dir13.ctx(), dir13.lowpass());

    let qcx = fixture("quincunx_dir8").unwrap();
    let rep_qcx = analyze_filter(qcx.ctx(), qcx.lowpass());

    let sq3 = fixture("sqrt3_dir18").unwrap();
    let rep_sq3 = analyze_filter(sq3.ctx(), sq3.lowpass());

    let vm7 = fixture("quincunx_vm7").unwrap();
    let rep_vm7 = analyze_filter(vm7.ctx(), vm7.lowpass());

    let d19 = fixture("quincunx_diff19").unwrap();
    let rep_d19 = analyze_filter(d19.ctx(), d19.lowpass());

    let ok = rep_i4.predicted_s == Some(7)
        && rep_qcx.predicted_s == Some(8)
        && rep_sq3.predicted_s == Some(18)
        && rep_13.tightness_condition
        && !rep_i4.tightness_condition
        && rep_i4.sr == 4
        && rep_i4.vmo_ua == Vmo::Finite(4)
        && rep_vm7.sr == 2
        && rep_vm7.vmo_ua == Vmo::Finite(4)
        && rep_d19.sr == 2
        && rep_d19.vmo_ua == Vmo::Finite(4);
    report(
        3,
        ok,
        "predicted counts 7/8/18, tightness condition (true, false), sr/vmo pairs (4,4) (2,4) (2,4)",
    );
    assert_eq!(rep_i4.predicted_s, Some(7));
    assert_eq!(rep_qcx.predicted_s, Some(8));
    assert_eq!(rep_sq3.predicted_s, Some(18));
    assert!(rep_13.tightness_condition);
    assert!(!rep_i4.tightness_condition);
    assert_eq!((rep_i4.sr, rep_i4.vmo_ua), (4, Vmo::Finite(4)));
    assert_eq!((rep_vm7.sr, rep_vm7.vmo_ua), (2, Vmo::Finite(4)));
    assert_eq!((rep_d19.sr, rep_d19.vmo_ua), (2, Vmo::Finite(4)));
}

#[test]
fn criterion_4_vanishing_moment_constructions() {
    let mut problems = Vec::new();
    let mut constructions = 0usize;
    let mut slowest = Duration::ZERO;

    for (name, ctx, a) in unique_lowpasses() {
        let (ceiling, _) = vm_ceiling(&ctx, &a);
        for m in 1..=ceiling {
            let t0 = Instant::now();
            match construct_vm_sos(&ctx, &a, m) {
                Ok(bank) => {
                    let dt = t0.elapsed();
                    slowest = slowest.max(dt);
                    constructions += 1;
                    if dt >= Duration::from_secs(30) {
                        problems.push(format!("{name} m={m}: took {dt:?}"));
                    }
                    let rep = verify_bank(&bank).unwrap();
                    if !rep.passes {
                        problems.push(format!("{name} m={m}: verification failed"));
                    }
                    if !rep.min_vmo.is_some_and(|v| v.at_least(m)) {
                        problems.push(format!("{name} m={m}: min vmo {:?}", rep.min_vmo));
                    }
                }
                Err(e) => problems.push(format!("{name} m={m}: {e}")),
            }
        }
        if ctx.dim() == 1 {
            let t0 = Instant::now();
            match construct_differencing(&ctx, &a, ceiling) {
                Ok(bank) => {
                    let dt = t0.elapsed();
                    slowest = slowest.max(dt);
                    constructions += 1;
                    if dt >= Duration::from_secs(30) {
                        problems.push(format!("{name} differencing: took {dt:?}"));
                    }
                    let rep = verify_bank(&bank).unwrap();
                    if !rep.passes {
                        problems.push(format!("{name} differencing: verification failed"));
                    }
                }
                Err(e) => problems.push(format!("{name} differencing: {e}")),
            }
        }
    }

    // The interpolatory 4-tap at m = 2 must land on the reference sign and
    // vanishing-moment multisets.
    let i4 = fixture("interp_diff9").unwrap();
    let built = construct_differencing(i4.ctx(), i4.lowpass(), 2).unwrap();
    let mut signs: Vec<i64> = built.highpass().iter().map(|(_, s)| s.value()).collect();
    signs.sort_unstable();
    let mut vmos: Vec<usize> = built
        .highpass()
        .iter()
        .filter_map(|(f, _)| f.vmo().finite())
        .collect();
    vmos.sort_unstable();
    let signs_ok = signs == [-1, -1, -1, 1, 1, 1, 1, 1, 1];
    let vmos_ok = vmos == [2, 2, 3, 3, 3, 3, 3, 3, 3];
    if !signs_ok {
        problems.push(format!("interpolatory differencing signs {signs:?}"));
    }
    if !vmos_ok {
        problems.push(format!("interpolatory differencing vmos {vmos:?}"));
    }

    let ok = problems.is_empty();
    report(
        4,
        ok,
        &format!(
            "{constructions} constructions verified exactly, slowest {slowest:.2?}, reference multisets matched"
        ),
    );
    assert!(problems.is_empty(), "{problems:#?}");
}

#[test]
fn criterion_5_haar_pipeline() {
    let (ctx, a) = haar();
    let bank = construct_vm_linear(&ctx, &a, 1, &VmLinearOpts::default()).unwrap();
    let one_filter = bank.highpass().len() == 1;
    let (f, sign) = &bank.highpass()[0];
    let expected = ScaledFilter::new(
        r(1, 4),
        RationalLaurent::from_table_1d(0, &[r(1, 1), r(-1, 1)]),
    )
    .unwrap();
    let canonical = canonical_shift_rep(f);
    let reference = canonical_shift_rep(&expected);
    let matches = canonical.scale_sq() == reference.scale_sq()
        && canonical.base() == reference.base()
        && *sign == Sign::Plus;
    let verifies = verify_bank(&bank).unwrap().passes;
    let ok = one_filter && matches && verifies;
    report(
        5,
        ok,
        "Haar linear pipeline yields the single half-difference filter with sign +1",
    );
    assert!(one_filter, "expected 1 filter, got {}", bank.highpass().len());
    assert!(matches, "got scale_sq {:?} base {:?}", f.scale_sq(), f.base());
    assert!(verifies);
}

#[test]
fn criterion_6_smoothness_targets() {
    let t0 = Instant::now();
    let targets = [
        ("dyadic_dir13", 0.992335),
        ("interp_dir7", 2.440765),
        ("quincunx_dir8", 1.577645),
        ("sqrt3_dir18", 1.657138),
        ("quincunx_vm7", 0.235724),
        ("quincunx_diff19", 1.801593),
        ("dyadic2d_vm5", 0.885296),
    ];
    let opts = SmoothnessOpts::default();
    let mut problems = Vec::new();
    let mut max_dev = 0.0f64;
    for (name, expected) in targets {
        let bank = fixture(name).unwrap();
        match smoothness_l2(bank.ctx(), bank.lowpass(), &opts) {
            Ok(est) => {
                let dev = (est.sm2 - expected).abs();
                max_dev = max_dev.max(dev);
                if dev >= 5e-3 {
                    problems.push(format!("{name}: sm2 {} vs {expected}", est.sm2));
                }
            }
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }

    let (hctx, ha) = haar();
    let haar_est = smoothness_l2(&hctx, &ha, &opts).unwrap();
    if (haar_est.sm2 - 0.5).abs() >= 1e-9 {
        problems.push(format!("haar: sm2 {}", haar_est.sm2));
    }

    // Cross-method agreement on the one-dimensional filters.
    let mut max_gap = haar_est.stability_gap;
    for name in ["dyadic_qt2", "dyadic_dir13", "interp_dir7"] {
        let bank = fixture(name).unwrap();
        let est = smoothness_l2(bank.ctx(), bank.lowpass(), &opts).unwrap();
        max_gap = max_gap.max(est.stability_gap);
        if est.stability_gap >= 1e-4 {
            problems.push(format!("{name}: method gap {:e}", est.stability_gap));
        }
    }

    let elapsed = t0.elapsed();
    let ok = problems.is_empty() && elapsed < Duration::from_secs(60);
    report(
        6,
        ok,
        &format!(
            "seven reference exponents within 5e-3 (max dev {max_dev:.2e}), haar exact to 1e-9, 1-D method gap <= {max_gap:.2e}, {elapsed:.2?}"
        ),
    );
    assert!(problems.is_empty(), "{problems:#?}");
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
}

// ---- criterion 7: property suites ----

fn random_laurent(rng: &mut ChaCha8Rng, dim: usize, max_abs: i64, terms: usize) -> RationalLaurent {
    let mut u = RationalLaurent::zero(dim);
    for _ in 0..terms {
        let k: Vec<i64> = (0..dim).map(|_| rng.random_range(-max_abs..=max_abs)).collect();
        let c = r(rng.random_range(-9..=9), rng.random_range(1..=9));
        u = u
            .try_add(&RationalLaurent::monomial(k, c))
            .expect("same dim");
    }
    u
}

fn ring_and_coset_suite(problems: &mut Vec<String>) {
    let contexts = [
        make_context(&[vec![2]]).unwrap(),
        make_context(&[vec![1, 1], vec![1, -1]]).unwrap(),
        make_context(&[vec![1, -2], vec![2, -1]]).unwrap(),
        make_context(&[vec![2, 0], vec![0, 2]]).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x51a3);
    for ctx in &contexts {
        for i in 0..200 {
            let d = ctx.dim();
            let u = random_laurent(&mut rng, d, 3, 4);
            let v = random_laurent(&mut rng, d, 3, 4);
            let w = random_laurent(&mut rng, d, 3, 4);
            let lhs = u.try_add(&v).unwrap().try_mul(&w).unwrap();
            let rhs = u.try_mul(&w).unwrap().try_add(&v.try_mul(&w).unwrap()).unwrap();
            if lhs != rhs {
                problems.push(format!("distributivity failed (d={d}, case {i})"));
            }
            if u.try_mul(&v).unwrap() != v.try_mul(&u).unwrap() {
                problems.push(format!("commutativity failed (d={d}, case {i})"));
            }
            let adj = u.try_mul(&v).unwrap().adjoint();
            let adj2 = u.adjoint().try_mul(&v.adjoint()).unwrap();
            if adj != adj2 {
                problems.push(format!("adjoint homomorphism failed (d={d}, case {i})"));
            }
            let parts = u.coset_split(ctx);
            let back = RationalLaurent::reassemble(ctx, &parts).unwrap();
            if back != u {
                problems.push(format!("coset reassembly failed (d={d}, case {i})"));
            }
        }
    }
}

fn specfact_suite(problems: &mut Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfac7);
    for i in 0..100 {
        let rows = rng.random_range(1..=4usize);
        let dim = rng.random_range(1..=2usize);
        let mut entries = Vec::new();
        for _ in 0..rows * rows {
            entries.push(random_laurent(&mut rng, dim, 3, 3));
        }
        let b = LaurentMatrix::from_entries(rows, rows, entries).unwrap();
        let a = b.add(&b.adjoint()).unwrap();
        let fact = match factor_hermitian(&a) {
            Ok(f) => f,
            Err(e) => {
                problems.push(format!("specfact case {i}: {e}"));
                continue;
            }
        };
        let back = fact.reconstruct(dim);
        if back != a {
            problems.push(format!("specfact reconstruction mismatch (case {i})"));
        }
    }
}

fn vmdecomp_suite(problems: &mut Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xdeed);
    for i in 0..100 {
        let dim = rng.random_range(1..=2usize);
        let m = rng.random_range(1..=3usize);
        // Build an input with the required vanishing moments by construction.
        let mut v = RationalLaurent::zero(dim);
        for mu in qtf::multi_indices(dim, m) {
            let g = random_laurent(&mut rng, dim, 2, 3);
            v = v.try_add(&nabla_delta(&mu).try_mul(&g).unwrap()).unwrap();
        }
        match nabla_decompose(&v, m) {
            Ok(parts) => {
                let back = nabla_reconstruct(dim, &parts);
                if back != v {
                    problems.push(format!("difference decomposition mismatch (case {i})"));
                }
            }
            Err(e) => problems.push(format!("difference decomposition case {i}: {e}")),
        }

        // Hermitian input with vmo >= 2m, again by construction.
        let mut u = RationalLaurent::zero(dim);
        for j in 0..rng.random_range(1..=3usize) {
            let mu = {
                let choices = qtf::multi_indices(dim, m);
                choices[rng.random_range(0..choices.len())].clone()
            };
            let c = random_laurent(&mut rng, dim, 2, 2);
            let w = nabla_delta(&mu).try_mul(&c).unwrap();
            let sq = w.adjoint().try_mul(&w).unwrap();
            let signed = if (i + j) % 3 == 0 {
                sq.scale(&r(-1, 1))
            } else {
                sq
            };
            u = u.try_add(&signed).unwrap();
        }
        if u.is_zero() {
            continue;
        }
        match signed_squares_vm(&u, m) {
            Ok(terms) => {
                let back = squares_reconstruct(dim, &terms);
                if back != u {
                    problems.push(format!("signed squares mismatch (case {i})"));
                }
            }
            Err(e) => problems.push(format!("signed squares case {i}: {e}")),
        }
    }
}

/// Float spot-check of the coset/frequency bridge: for any filter `b` and any
/// admissible half-lattice phase `beta`,
/// `F(xi) D(xi) F*(xi) = dm * E(M^T xi)` where `D` is the twisted diagonal of
/// `b` over frequency cosets and `F` collects the coset phases.
fn e_matrix_suite(problems: &mut Vec<String>) {
    let contexts = [
        make_context(&[vec![2]]).unwrap(),
        make_context(&[vec![1, 1], vec![1, -1]]).unwrap(),
        make_context(&[vec![2, 0], vec![0, 2]]).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xe3a7);
    let tau = std::f64::consts::TAU;
    for ctx in &contexts {
        let dm = ctx.dm();
        let d = ctx.dim();
        let omegas: Vec<Vec<f64>> = ctx
            .omega()
            .iter()
            .map(|w| w.iter().map(rat_to_f64).collect())
            .collect();
        for case in 0..6 {
            let b = random_laurent(&mut rng, d, 2, 4);
            for beta_idx in 0..dm {
                let beta = ctx.omega()[beta_idx].clone();
                let e = match build_e_matrix(ctx, &b, &beta) {
                    Ok(e) => e,
                    Err(err) => {
                        problems.push(format!("bridge build failed (d={d} case {case}): {err}"));
                        continue;
                    }
                };
                let xi: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
                // D entries: row w, the unique column h with w + beta - h integral.
                let beta_f: Vec<f64> = ctx.omega()[beta_idx].iter().map(rat_to_f64).collect();
                let mut dmat = vec![vec![Complex64::zero(); dm]; dm];
                for (wi, w) in omegas.iter().enumerate() {
                    for (hi, h) in omegas.iter().enumerate() {
                        let integral = (0..d).all(|t| {
                            let v = w[t] + beta_f[t] - h[t];
                            (v - v.round()).abs() < 1e-12
                        });
                        if integral {
                            let shifted: Vec<f64> =
                                (0..d).map(|t| xi[t] + tau * w[t]).collect();
                            dmat[wi][hi] = b.eval_complex(&shifted);
                        }
                    }
                }
                // F entries: gamma row j against frequency column k.
                let gammas = ctx.gamma();
                let f = |j: usize, k: usize| -> Complex64 {
                    let dot: f64 = (0..d)
                        .map(|t| gammas[j][t] as f64 * (xi[t] + tau * omegas[k][t]))
                        .sum();
                    Complex64::new(0.0, -dot).exp()
                };
                // M^T xi for the right-hand side.
                let mat = ctx.matrix();
                let mtxi: Vec<f64> = (0..d)
                    .map(|i| (0..d).map(|j| mat[j][i] as f64 * xi[j]).sum())
                    .collect();
                let rhs = e.eval_complex(&mtxi);
                let mut max_err = 0.0f64;
                for (j, rhs_row) in rhs.iter().enumerate() {
                    for (k, rv) in rhs_row.iter().enumerate() {
                        let mut lhs = Complex64::zero();
                        for (p, drow) in dmat.iter().enumerate() {
                            for (q, dv) in drow.iter().enumerate() {
                                lhs += f(j, p) * dv * f(k, q).conj();
                            }
                        }
                        let diff = (lhs - rv * dm as f64).norm();
                        max_err = max_err.max(diff);
                    }
                }
                if max_err >= 1e-10 {
                    problems.push(format!(
                        "bridge identity drift {max_err:e} (d={d} case {case} beta {beta_idx})"
                    ));
                }
            }
        }
    }
}

fn perfect_reconstruction_suite(problems: &mut Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e7);
    for name in fixture_names() {
        let bank = fixture(name).unwrap();
        let d = bank.ctx().dim();
        for case in 0..10 {
            let v = random_laurent(&mut rng, d, 8, 12);
            let levels = rng.random_range(1..=3usize);
            let dec = analyze(&bank, &v, levels).unwrap();
            let back = synthesize(&bank, &dec).unwrap();
            if back != v {
                problems.push(format!("reconstruction mismatch ({name} case {case})"));
            }
        }
    }
}

/// Every bank resident in the run obeys the vanishing-moment ceiling.
fn ceiling_bound_suite(problems: &mut Vec<String>) {
    let mut banks: Vec<(String, QtfBank)> = fixture_names()
        .iter()
        .map(|n| (n.to_string(), fixture(n).unwrap()))
        .collect();
    for (name, ctx, a) in unique_lowpasses() {
        if let Ok(b) = construct_directional(&ctx, &a, &DirectionalOpts::default()) {
            banks.push((format!("{name}+directional"), b));
        }
        let (ceiling, _) = vm_ceiling(&ctx, &a);
        if ceiling >= 1 {
            if let Ok(b) = construct_vm_sos(&ctx, &a, ceiling) {
                banks.push((format!("{name}+sos"), b));
            }
        }
    }
    for (name, bank) in banks {
        let rep = verify_bank(&bank).unwrap();
        let Some(Vmo::Finite(min)) = rep.min_vmo else {
            continue;
        };
        if min > rep.vm_ceiling {
            problems.push(format!(
                "{name}: min vmo {min} above ceiling {}",
                rep.vm_ceiling
            ));
        }
    }
}

#[test]
fn criterion_7_property_suites() {
    let t0 = Instant::now();
    let mut problems = Vec::new();
    ring_and_coset_suite(&mut problems);
    specfact_suite(&mut problems);
    vmdecomp_suite(&mut problems);
    e_matrix_suite(&mut problems);
    perfect_reconstruction_suite(&mut problems);
    ceiling_bound_suite(&mut problems);
    let elapsed = t0.elapsed();
    let ok = problems.is_empty() && elapsed < Duration::from_secs(120);
    report(
        7,
        ok,
        &format!(
            "ring/coset, factorization, decomposition, frequency-bridge, reconstruction, and ceiling suites in {elapsed:.2?}"
        ),
    );
    assert!(problems.is_empty(), "{problems:#?}");
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
}

// A couple of cross-module sanity checks that do not belong to a numbered
// criterion but guard the same contracts end to end.

#[test]
fn constructed_banks_round_trip_through_json() {
    let (ctx, a) = haar();
    let bank = construct_vm_sos(&ctx, &a, 1).unwrap();
    let doc = qtf::json::bank_to_value(&bank);
    let back = qtf::json::parse_bank_value(&doc).unwrap();
    assert!(qtf::same_bank_multiset(bank.highpass(), back.highpass()));
    assert_eq!(bank.lowpass(), back.lowpass());
}

#[test]
fn sampler_mass_converges_on_fixture_filters() {
    for name in ["dyadic_qt2", "interp_dir7"] {
        let bank = fixture(name).unwrap();
        let phi = sample_refinable(bank.ctx(), bank.lowpass(), 8).unwrap();
        let dm = bank.ctx().dm() as i64;
        let total: Rat = phi
            .values
            .terms()
            .fold(Rat::zero(), |acc, (_, c)| acc + c)
            / Rat::from_integer(dm.pow(8).into());
        assert!(Rat::one() == total, "{name}: sample mass {total}");
    }
}
