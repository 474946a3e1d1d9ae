//! Acceptance gate. One test per criterion; each prints a single
//! `[PASS]`/`[FAIL]` line to stderr, bypassing the harness capture.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use gramstab::matcrit::{theorem1_verdicts, trace_power_sums};
use gramstab::mech::{
    circulatory_verdicts, example_charged_particle, gyro_reduced_polynomial,
    gyroscopic_verdict_thm4,
};
use gramstab::oracle::{check_sufficiency, find_roots, verify_instability, Context};
use gramstab::polycrit::{gram_determinant, newton_power_sums, power_sums_from_roots, prop1_verdicts};
use gramstab::sweep::{emit_csv, run_sweep, run_sweep_with_workers, Family, SweepConfig};
use gramstab::{CriterionVerdict, GyroscopicSystem, RealSquareMatrix};
use rand::Rng;

const BAND: f64 = 1e-6;

fn report(id: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr().lock(), "[{tag}] {id}: {detail}");
    assert!(pass, "{id} failed: {detail}");
}

fn in_band(v: &CriterionVerdict) -> bool {
    v.margin.abs() <= BAND
}

#[test]
fn ac1_circulatory_example_regions() {
    let start = Instant::now();
    let result = run_sweep(&SweepConfig::new(Family::Circulatory3)).unwrap();
    let elapsed = start.elapsed();

    let closed: [fn(f64, f64) -> f64; 3] = [circ_cond_i, circ_cond_ii, circ_cond_iii];
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for cell in &result.cells {
        for (p, form) in closed.iter().enumerate() {
            let value = form(cell.k, cell.c);
            if value.abs() <= BAND {
                continue;
            }
            checked += 1;
            if cell.fired[p] != (value > 0.0) {
                mismatches.push((p, cell.k, cell.c, value));
            }
        }
    }
    let fired: Vec<usize> = ["thm2-i", "thm2-ii", "thm2-iii"]
        .iter()
        .map(|id| result.fired_count(id))
        .collect();

    // (ii) and (iii) each reach cells outside the (i) region
    let only_ii = result.cells.iter().filter(|c| c.fired[1] && !c.fired[0]).count();
    let only_iii = result.cells.iter().filter(|c| c.fired[2] && !c.fired[0]).count();

    let pass = result.cells.len() == 401 * 401
        && mismatches.is_empty()
        && only_ii > 0
        && only_iii > 0
        && elapsed < Duration::from_secs(5);
    report(
        "AC1 circulatory regions",
        pass,
        format!(
            "{checked} cell/criterion checks, {} mismatches, fired {fired:?}, outside-(i): ii={only_ii} iii={only_iii}, {:.2?}",
            mismatches.len(),
            elapsed
        ),
    );
}

#[test]
fn ac2_charged_particle_regions() {
    let result = run_sweep(&SweepConfig::new(Family::ChargedParticle)).unwrap();
    let thm4 = result.fired_count("thm4");

    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for cell in result.cells.iter().filter(|c| !c.excluded) {
        assert!(cell.error.is_none(), "{:?}", cell.error);
        let ii = charged_cond_ii(cell.k, cell.c);
        if ii.abs() > BAND {
            checked += 1;
            if cell.fired[1] != (ii < 0.0) {
                mismatches.push(("prop2-ii", cell.k, cell.c));
            }
        }
        let iii = charged_cond_iii(cell.k, cell.c);
        if iii.abs() > BAND {
            checked += 1;
            if cell.fired[2] != (cell.k < 0.0 && iii > 0.0) {
                mismatches.push(("prop2-iii", cell.k, cell.c));
            }
        }
    }

    let mut rng = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let k: f64 = rng.gen_range(-3.0..=3.0);
        let c: f64 = rng.gen_range(-3.0..=3.0);
        let q = gyro_reduced_polynomial(&example_charged_particle(k, c)).unwrap();
        let expected = [c * c + k, -k * k, -k * k * k];
        for (a, b) in q.coeffs().iter().zip(expected) {
            worst = worst.max((a - b).abs());
        }
    }

    let pass = thm4 == 0 && mismatches.is_empty() && checked > 0 && worst <= 1e-9;
    report(
        "AC2 charged-particle regions",
        pass,
        format!(
            "thm4 fired in {thm4} cells, {checked} checks, {} mismatches {:?}, prop2-ii {} cells, prop2-iii {} cells, max coeff error {worst:e}",
            mismatches.len(),
            mismatches.iter().take(3).collect::<Vec<_>>(),
            result.fired_count("prop2-ii"),
            result.fired_count("prop2-iii"),
        ),
    );
}

#[test]
fn ac3_sufficiency() {
    let start = Instant::now();
    let mut rng = rng(3);
    let mut systems = 0usize;
    let mut fired = 0usize;
    let mut failures = Vec::new();
    for trial in 0..10_000 {
        let n = rng.gen_range(2..=6);
        let (verdicts, spectrum, context) = if trial % 2 == 0 {
            let sys = random_circulatory(&mut rng, n);
            (
                circulatory_verdicts(&sys).to_vec(),
                verify_instability(&sys).unwrap(),
                Context::Circulatory,
            )
        } else {
            let sys = random_gyroscopic(&mut rng, n);
            (
                vec![gyroscopic_verdict_thm4(&sys)],
                verify_instability(&sys).unwrap(),
                Context::Gyroscopic,
            )
        };
        systems += 1;
        fired += verdicts.iter().filter(|v| v.fired).count();
        let on_p = check_sufficiency(&verdicts, &spectrum.lambda, context);
        let on_q = check_sufficiency(&verdicts, &spectrum.reduced, Context::Poly);
        for v in on_p.violations.into_iter().chain(on_q.violations) {
            failures.push(format!("trial {trial}: {v}"));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(60);
    report(
        "AC3 sufficiency",
        pass,
        format!(
            "{systems} systems, {fired} fired verdicts, {} failures {:?}, {:.2?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>(),
            elapsed
        ),
    );
}

#[test]
fn ac4_real_roots_never_give_negative_grams() {
    let mut rng = rng(4);
    let mut grams = 0usize;
    let mut worst = f64::INFINITY;
    let mut failures = 0usize;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=8);
        let roots: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..=3.0)).collect();
        let poly = poly_from_roots(&real(&roots));
        let ps = newton_power_sums(&poly, (2 * (n - 1)).max(1)).unwrap();
        for size in 1..=3.min(n) {
            for_each_subset(n, size, |indices| {
                let g = gram_determinant(&ps, indices).unwrap();
                let entry = indices
                    .iter()
                    .flat_map(|&p| indices.iter().map(move |&q| p + q))
                    .map(|k| ps.s(k).abs())
                    .fold(0.0, f64::max);
                let scale = (1.0 + entry).powi(size as i32);
                grams += 1;
                worst = worst.min(g / scale);
                if g < -1e-8 * scale {
                    failures += 1;
                }
            });
        }
    }
    report(
        "AC4 Gram determinants of real-rooted polynomials",
        failures == 0,
        format!("{grams} determinants, {failures} below -1e-8*scale, min scaled value {worst:e}"),
    );
}

fn for_each_subset(n: usize, size: usize, mut f: impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, f);
            cur.pop();
        }
    }
    rec(0, n, size, &mut Vec::new(), &mut f);
}

#[test]
fn ac5_identity_cross_checks() {
    let mut rng = rng(5);

    // Newton sums vs direct sums of known roots
    let mut newton_worst = 0.0f64;
    for _ in 0..2_000 {
        let n = rng.gen_range(1..=8);
        let roots = random_conjugate_closed(&mut rng, n, 3.0);
        let poly = poly_from_roots(&roots);
        let kmax = (2 * n - 2).max(1);
        let newton = newton_power_sums(&poly, kmax).unwrap();
        let (direct, _) = power_sums_from_roots(&roots, kmax).unwrap();
        for k in 1..=kmax {
            let scale: f64 = roots.iter().map(|r| r.norm().powi(k as i32)).sum::<f64>().max(1.0);
            newton_worst = newton_worst.max((newton.s(k) - direct.s(k)).abs() / scale);
        }
    }

    // Tr(Mᵏ) vs symmetric/skew identities
    let mut trace_worst = 0.0f64;
    for _ in 0..1_000 {
        let n = rng.gen_range(1..=10);
        let m = RealSquareMatrix::new(uniform_matrix(&mut rng, n)).unwrap();
        let t = trace_power_sums(&m).unwrap();
        trace_worst = trace_worst.max(t.max_relative_gap(m.frobenius_sq().sqrt()));
    }

    // Remark form vs thm2-ii
    let mut remark_checked = 0usize;
    let mut remark_mismatch = 0usize;
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=6);
        let v = circulatory_verdicts(&random_circulatory(&mut rng, n));
        let (thm, alt) = (&v[1], &v[3]);
        if in_band(thm) || in_band(alt) {
            continue;
        }
        remark_checked += 1;
        if thm.fired != alt.fired {
            remark_mismatch += 1;
        }
    }

    // thm4 vs prop1-i on the reduced polynomial
    let mut thm4_checked = 0usize;
    let mut thm4_mismatch = 0usize;
    let mut thm4_fired = 0usize;
    for i in 0..1_000 {
        let n = rng.gen_range(2..=6);
        // alternate plain and gyroscopically dominated systems so both outcomes occur
        let sys = if i % 2 == 0 {
            random_gyroscopic(&mut rng, n)
        } else {
            let g = random_skew(&mut rng, n).into_dmatrix() * 3.0;
            GyroscopicSystem::new(RealSquareMatrix::new(g).unwrap(), random_symmetric(&mut rng, n))
                .unwrap()
        };
        let thm4 = gyroscopic_verdict_thm4(&sys);
        let q = gyro_reduced_polynomial(&sys).unwrap();
        let p1 = &prop1_verdicts(&newton_power_sums(&q, 4).unwrap()).unwrap()[0];
        if in_band(&thm4) || in_band(p1) {
            continue;
        }
        thm4_checked += 1;
        thm4_fired += usize::from(thm4.fired);
        if thm4.fired != p1.fired {
            thm4_mismatch += 1;
        }
    }

    let pass = newton_worst < 1e-9
        && trace_worst < 1e-10
        && remark_mismatch == 0
        && thm4_mismatch == 0
        && remark_checked > 9_000
        && thm4_checked > 900;
    report(
        "AC5 identity cross-checks",
        pass,
        format!(
            "newton rel err {newton_worst:e}; trace rel err {trace_worst:e}; remark {remark_mismatch}/{remark_checked} mismatches; thm4 {thm4_mismatch}/{thm4_checked} mismatches ({thm4_fired} fired)"
        ),
    );
}

#[test]
fn ac6_gyroscopic_benchmark() {
    let system = |g: f64| {
        let k = RealSquareMatrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let gm = RealSquareMatrix::from_rows(&[vec![0.0, g], vec![-g, 0.0]]).unwrap();
        GyroscopicSystem::new(gm, k).unwrap()
    };
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for i in -400..=400 {
        let g = i as f64 * 0.01;
        if ((g.abs()) - 2.0).abs() <= BAND {
            continue;
        }
        checked += 1;
        let fired = gyroscopic_verdict_thm4(&system(g)).fired;
        let derived = 4.0 * g.powi(4) - 16.0 * g * g < 0.0;
        if fired != derived || fired != (g != 0.0 && g.abs() < 2.0) {
            mismatches.push(g);
        }
    }
    let confirmed: Vec<bool> = [0.5, 1.0, 1.5]
        .iter()
        .map(|&g| verify_instability(&system(g)).unwrap().unstable())
        .collect();
    let pass = mismatches.is_empty() && confirmed.iter().all(|&u| u);
    report(
        "AC6 n=2 gyroscopic benchmark",
        pass,
        format!(
            "{checked} values of g, mismatches {mismatches:?}, oracle at g=0.5,1,1.5: {confirmed:?}"
        ),
    );
}

#[test]
fn ac7_determinism() {
    let mut outputs = Vec::new();
    for family in [Family::Circulatory3, Family::ChargedParticle] {
        let cfg = SweepConfig {
            nk: 121,
            nc: 121,
            oracle: true,
            ..SweepConfig::new(family)
        };
        for workers in [1, 3, 8] {
            let r = run_sweep_with_workers(&cfg, workers).unwrap();
            let mut csv = Vec::new();
            emit_csv(&r, &mut csv).unwrap();
            outputs.push((family, workers, csv));
        }
    }
    let identical = outputs
        .chunks(3)
        .all(|runs| runs.iter().all(|(_, _, csv)| csv == &runs[0].2));
    report(
        "AC7 determinism",
        identical,
        format!(
            "{} sweeps over 2 families with 1/3/8 workers, CSV sizes {:?}",
            outputs.len(),
            outputs.iter().map(|o| o.2.len()).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn ac_matrix_criteria_are_confirmed_too() {
    // Matrix-context sufficiency rides along with AC3: matrix criteria on
    // random dense matrices must only fire with a non-real eigenvalue.
    let mut rng = rng(8);
    let mut fired = 0usize;
    let mut failures = 0usize;
    for _ in 0..2_000 {
        let n = rng.gen_range(2..=6);
        let m = RealSquareMatrix::new(uniform_matrix(&mut rng, n)).unwrap();
        let v = theorem1_verdicts(&m);
        fired += v.iter().filter(|x| x.fired).count();
        let roots = find_roots(&gramstab::matcrit::char_poly(&m).unwrap()).unwrap();
        let report_ = gramstab::oracle::classify_spectrum(&roots);
        failures += check_sufficiency(&v, &report_, Context::Matrix).violations.len();
    }
    report(
        "AC3b matrix-context sufficiency",
        failures == 0,
        format!("2000 matrices, {fired} fired verdicts, {failures} failures"),
    );
}
