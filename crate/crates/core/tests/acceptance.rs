//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines always reach the console.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use quadrange::certs::{
    check_sign_clauses, solve_slemma, solve_sprocedure, sproc_refutation,
    verify_slemma_certificate, QuadCriterion, SLemmaOutcome, SLemmaVerification, SProcInstance,
};
use quadrange::linalg::{classify_definiteness, min_eigenvalue, Definiteness, DEFAULT_PSD_TOL};
use quadrange::numrange::{convexity_defect, sample_range};
use quadrange::pencil::{
    find_pd_combination, find_pd_combination3, hull_separation_oracle, HullDecision, PencilOutcome,
};
use quadrange::quadmap::{evaluate_tuple, homogenize_pair, PencilTransform};
use quadrange::rng::{gaussian_vec, random_gram, random_symmetric, seeded};
use quadrange::{Domain, QuadForm, SymMatrix};

type Fail = Box<dyn std::error::Error>;
type Outcome = Result<String, Fail>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), Fail> {
    if ok {
        Ok(())
    } else {
        Err(msg.into().into())
    }
}

fn within(elapsed: Duration, budget: u64) -> Result<(), Fail> {
    check(
        elapsed <= Duration::from_secs(budget),
        format!("took {:.1}s, budget {budget}s", elapsed.as_secs_f64()),
    )
}

fn three_form_convexity() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..200u64 {
        let n = 3 + (i % 6) as usize;
        let mut rng = seeded(1000 + i);
        let ops = [random_symmetric(&mut rng, n), random_symmetric(&mut rng, n)];
        let sample = sample_range(&ops, Domain::Sphere, 400, i)?;
        let report = convexity_defect(&sample, &ops, 40, i + 1)?;
        check(
            report.defect <= 1e-4,
            format!("pair {i} (n = {n}): defect {:.3e}", report.defect),
        )?;
        worst = worst.max(report.defect);
    }
    let t = start.elapsed();
    within(t, 60)?;
    Ok(format!(
        "200 pairs, worst defect {worst:.2e}, {:.1}s",
        t.as_secs_f64()
    ))
}

fn planar_failure() -> Outcome {
    let a1 = SymMatrix::diagonal(&[1.0, -1.0])?;
    let a2 = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])?;
    let ops = [a1, a2];
    let sample = sample_range(&ops, Domain::Sphere, 2000, 3)?;
    for p in &sample.points {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        check(
            (r - 1.0).abs() <= 1e-9,
            format!("sample off the circle: radius {r}"),
        )?;
    }
    let report = convexity_defect(&sample, &ops, 200, 4)?;
    check(
        report.defect >= 0.9 && (report.defect - 1.0).abs() <= 0.05,
        format!("defect {:.4}", report.defect),
    )?;
    Ok(format!("defect {:.4}", report.defect))
}

fn gap_decay() -> Outcome {
    let start = Instant::now();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = quadrange::cli::run_with(
        [
            "quadrange",
            "counterexample",
            "--family",
            "vanishing",
            "--truncations",
            "10,20,40,80,160",
            "--seed",
            "7",
        ],
        &mut out,
        &mut err,
    );
    let t = start.elapsed();
    check(code == 0, format!("exit code {code}"))?;
    let text = String::from_utf8(out)?;
    let mut prev = f64::INFINITY;
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let n: f64 = cols[0].parse().map_err(|_| format!("bad row {line}"))?;
        let r: f64 = cols[1].parse().map_err(|_| format!("bad row {line}"))?;
        check(r > 0.0, format!("N = {n}: residual {r} not positive"))?;
        check(
            r <= 1.0 / n + 1e-9,
            format!("N = {n}: residual {r} above 1/N"),
        )?;
        check(
            r <= prev,
            format!("N = {n}: residual {r} increased from {prev}"),
        )?;
        prev = r;
        rows += 1;
    }
    check(rows == 5, format!("{rows} rows"))?;
    within(t, 30)?;
    Ok(format!("r(160) = {prev:.3e}, {:.1}s", t.as_secs_f64()))
}

fn pencil_cross_oracle() -> Outcome {
    let (mut yes, mut no, mut band) = (0, 0, 0);
    for i in 0..300u64 {
        let n = 1 + (i % 6) as usize;
        let mut rng = seeded(5000 + i);
        let shift = -1.0 + 5.0 * (i as f64 / 300.0);
        let a1 = random_symmetric(&mut rng, n);
        let a2 = random_symmetric(&mut rng, n).add(&SymMatrix::identity(n).scaled(shift))?;
        let found = find_pd_combination(&a1, &a2, 720, 60)?;
        let oracle = hull_separation_oracle(&a1, &a2, 2000, i)?;
        if found.is_indeterminate() {
            band += 1;
            continue;
        }
        let separated = oracle.decision == HullDecision::OriginSeparated;
        check(
            found.is_certificate() == separated,
            format!(
                "pair {i}: pencil margin {:.3e}, oracle {:?} at {:.3e}",
                found.margin(),
                oracle.decision,
                oracle.distance
            ),
        )?;
        if separated {
            yes += 1;
        } else {
            no += 1;
        }
    }
    Ok(format!(
        "{yes} separated, {no} not, {band} in the indeterminate band"
    ))
}

fn block_inverse_chain() -> Outcome {
    let mut done = 0;
    let mut worst = 0.0f64;
    let mut seed = 9000u64;
    while done < 100 {
        seed += 1;
        let n = 1 + (done % 8) as usize;
        let mut rng = seeded(seed);
        let a1 = random_symmetric(&mut rng, n);
        let a2 = random_symmetric(&mut rng, n).add(&SymMatrix::identity(n).scaled(2.5))?;
        let PencilOutcome::Certificate(c) = find_pd_combination(&a1, &a2, 720, 60)? else {
            continue;
        };
        let phi1 = QuadForm::new(a1, gaussian_vec(&mut rng, n), gaussian_vec(&mut rng, 1)[0])?;
        let phi2 = QuadForm::new(a2, gaussian_vec(&mut rng, n), gaussian_vec(&mut rng, 1)[0])?;
        let t = PencilTransform::from_rows([-c.mu[1], c.mu[0]], [c.mu[0], c.mu[1]])?;
        let h = homogenize_pair(&phi1, &phi2, &t, 1.0)?;
        check(
            (h.mu3 - h.mu3_bound - 1.0).abs() <= 1e-12 * (1.0 + h.mu3.abs()),
            "mu3 is not bound + 1",
        )?;
        let z = h.z.as_dense();
        check(
            classify_definiteness(&z, DEFAULT_PSD_TOL) == Definiteness::PositiveDefinite,
            format!("instance {seed}: Z not positive definite"),
        )?;
        check(
            cholesky_ok(&z.to_rows(), 0.0),
            format!("instance {seed}: Cholesky failed"),
        )?;
        let prod = matmul(&z.to_rows(), &h.z_inverse.as_dense().to_rows());
        let res = max_abs_diff(&prod, &identity(n + 1));
        check(res <= 1e-9, format!("instance {seed}: residual {res:.3e}"))?;
        worst = worst.max(res);
        done += 1;
    }
    Ok(format!("100 instances, worst residual {worst:.2e}"))
}

fn cone_property() -> Outcome {
    let mut done = 0;
    let mut worst = 0.0f64;
    let mut seed = 20000u64;
    while done < 50 {
        seed += 1;
        let n = 3 + (done % 4) as usize;
        let mut rng = seeded(seed);
        let ops = [
            random_symmetric(&mut rng, n),
            random_symmetric(&mut rng, n),
            random_symmetric(&mut rng, n).add(&SymMatrix::identity(n).scaled(2.0))?,
        ];
        if !find_pd_combination3(&ops[0], &ops[1], &ops[2], 20000, 60)?.is_certificate() {
            continue;
        }
        let forms: Vec<QuadForm> = ops.iter().cloned().map(QuadForm::homogeneous).collect();
        let sample = sample_range(&ops, Domain::FullSpace, 400, seed)?;
        for (p, g) in sample.points.iter().zip(&sample.generators) {
            for t in [0.5f64, 2.0] {
                let x: Vec<f64> = g.iter().map(|v| v * t.sqrt()).collect();
                let out = evaluate_tuple(&forms, &x)?;
                for (a, b) in out.iter().zip(p) {
                    check(
                        (a - t * b).abs() <= 1e-8 * (1.0 + (t * b).abs()),
                        format!(
                            "triple {seed}: scaling identity off by {}",
                            (a - t * b).abs()
                        ),
                    )?;
                }
            }
        }
        let report = convexity_defect(&sample, &ops, 40, seed)?;
        check(
            report.defect <= 1e-4,
            format!("triple {seed}: defect {:.3e}", report.defect),
        )?;
        worst = worst.max(report.defect);
        done += 1;
    }
    Ok(format!("50 triples, worst defect {worst:.2e}"))
}

fn sproc_instance(seed: u64, n: usize) -> SProcInstance {
    let mut rng = seeded(seed);
    let al = gaussian_vec(&mut rng, 2);
    SProcInstance {
        a0: random_symmetric(&mut rng, n),
        a1: random_symmetric(&mut rng, n),
        a2: random_gram(&mut rng, n, 0.5),
        alpha0: 0.0,
        alpha1: 0.5 + al[0].abs(),
        alpha2: 0.5 + al[1].abs(),
        slater: Some(vec![0.0; n]),
    }
}

fn sproc_equivalence() -> Outcome {
    let (mut certs, mut refuted, mut band) = (0, 0, 0);
    for i in 0..100u64 {
        let n = 3 + (i % 3) as usize;
        let mut inst = sproc_instance(30000 + i, n);
        let rows = [inst.a0.to_rows(), inst.a1.to_rows(), inst.a2.to_rows()];
        let forms = [&rows[0], &rows[1], &rows[2]];
        let alphas = [0.0, inst.alpha1, inst.alpha2];
        let (sup, _) = sproc_ray_oracle(forms, alphas, 2000, i).ok_or("unbounded ray")?;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        inst.alpha0 = sup + sign * 0.05 * (1.0 + sup.abs());

        let out = solve_sprocedure(&inst)?;
        let pair = out.pair();
        if pair.value.abs() <= 1e-6 {
            band += 1;
            continue;
        }
        let (excess, x) = sproc_ray_oracle(
            forms,
            [inst.alpha0, inst.alpha1, inst.alpha2],
            100_000,
            1 << 20 | i,
        )
        .ok_or("unbounded ray")?;
        if excess > 0.0 {
            check(
                !out.is_certificate(),
                format!("instance {i}: certificate despite violator"),
            )?;
            let mut rng = Mix(i);
            let mut candidates = vec![pair.tau];
            candidates.extend((0..20).map(|_| [5.0 * rng.uniform(), 5.0 * rng.uniform()]));
            for tau in candidates {
                let r = sproc_refutation(&inst, &x, tau, false)
                    .ok_or(format!("instance {i}: oracle point is not a violator"))?;
                let split = r.operator_term + r.constraint_term + r.scalar_term;
                check(
                    (split - r.excess).abs() <= 1e-9 * (1.0 + r.excess.abs()) && r.refutes(),
                    format!("instance {i}: tau {tau:?} not refuted"),
                )?;
            }
            refuted += 1;
        } else {
            check(
                out.is_certificate(),
                format!("instance {i}: no certificate, value {:.3e}", pair.value),
            )?;
            let (op, sc) = inst.slacks(pair.tau);
            check(
                op >= -1e-8 * inst.operator_scale() && sc >= -1e-8 * inst.scalar_scale(),
                format!("instance {i}: slacks {op:.3e}, {sc:.3e}"),
            )?;
            certs += 1;
        }
    }
    Ok(format!(
        "{certs} certified, {refuted} refuted by violators, {band} in the band"
    ))
}

fn slemma_verification() -> Outcome {
    let mut applied = [0usize; 4];
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let n = 1 + (i % 5) as usize;
        let kind = i % 5;
        let seed = 40000 + i;
        let mut rng = seeded(seed);
        let (alpha, beta) = match kind {
            0 => (0.3, 2.0),
            1 => (2.0, 0.3),
            3 => (0.7, -1.0),
            _ => (0.5 + rng_uniform(seed), 0.5 + rng_uniform(seed ^ 1)),
        };
        let (mut phi1, mut phi2) = planted_pair(seed, n, alpha, beta);
        if kind == 0 {
            // indefinite first form, positive definite second
            phi1.matrix = indefinite(seed, n);
            phi2.matrix = random_gram(&mut rng, n, 0.3);
        } else if kind == 1 {
            phi2.matrix = indefinite(seed, n);
            phi1.matrix = random_gram(&mut rng, n, 0.3);
        }
        let (alpha, beta) = if kind <= 1 {
            dominant_multipliers(&phi1.matrix, &phi2.matrix, kind == 0)
        } else {
            (alpha, beta)
        };
        let rho = 0.5 + rng_uniform(seed ^ 2);
        let (theta, v) = match kind {
            2 => (
                SymMatrix::diagonal(&[0.0, rho])?,
                [alpha, gaussian_vec(&mut rng, 1)[0]],
            ),
            3 => (
                SymMatrix::diagonal(&[rho, 0.0])?,
                [gaussian_vec(&mut rng, 1)[0], beta],
            ),
            _ => {
                let g = gaussian_vec(&mut rng, 2);
                (random_gram(&mut rng, 2, 0.2), [g[0], g[1]])
            }
        };
        let probe = QuadCriterion::new(theta.clone(), v, 0.0)?;
        let j0 = joint_min(&probe, &phi1, &phi2, alpha, beta, seed);
        let crit = QuadCriterion::new(theta, v, j0 - 0.1)?;

        let cert = match solve_slemma(&crit, &phi1, &phi2, 2000, seed)? {
            SLemmaOutcome::Certificate(c) => c,
            other => return Err(format!("instance {i} (kind {kind}): {other:?}").into()),
        };
        let closed = match verify_slemma_certificate(cert.alpha, cert.beta, &crit, &phi1, &phi2)? {
            SLemmaVerification::Verified {
                min_over_z,
                min_over_x,
            } => min_over_z + min_over_x,
            SLemmaVerification::Refuted { value, .. } => {
                return Err(format!("instance {i}: certificate refuted at {value:.3e}").into())
            }
        };
        let joint = joint_min(&crit, &phi1, &phi2, cert.alpha, cert.beta, seed ^ 99);
        let gap = (closed - joint).abs();
        check(
            gap <= 1e-6 * crit.scale(),
            format!("instance {i}: closed form {closed:.9} vs joint {joint:.9}"),
        )?;
        worst = worst.max(gap / crit.scale());
        let report = check_sign_clauses(&cert, &phi1, &phi2, &crit);
        for (k, c) in report.checks.iter().enumerate() {
            if c.applies {
                applied[k] += 1;
            }
        }
        check(
            report.all_hold,
            format!("instance {i}: sign clauses {:?}", report.checks),
        )?;
    }
    Ok(format!(
        "50 certificates, worst relative gap {worst:.2e}, clause applications {applied:?}"
    ))
}

fn rng_uniform(seed: u64) -> f64 {
    Mix(seed).uniform()
}

fn indefinite(seed: u64, n: usize) -> SymMatrix {
    let mut rng = Mix(seed ^ 0x5151);
    let mut d: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    d[0] = d[0].abs() + 0.2;
    if n > 1 {
        d[1] = -d[1].abs() - 0.2;
    } else {
        d[0] = 0.0;
    }
    SymMatrix::diagonal(&d).unwrap()
}

/// Multipliers with the definite operator weighted enough to dominate.
fn dominant_multipliers(a1: &SymMatrix, a2: &SymMatrix, second_definite: bool) -> (f64, f64) {
    let (indef, def) = if second_definite { (a1, a2) } else { (a2, a1) };
    let small = 0.3;
    let big = (small * indef.max_abs() * indef.dim() as f64 + 0.5) / min_eigenvalue(def);
    if second_definite {
        (small, big)
    } else {
        (big, small)
    }
}

// Golden files -----------------------------------------------------------

struct Case {
    name: &'static str,
    args: Vec<String>,
    plot: bool,
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn cases() -> Vec<Case> {
    let input = |f: &str| golden_dir().join("inputs").join(f).display().to_string();
    let c = |name, args: &[&str], plot| Case {
        name,
        args: args.iter().map(|s| s.to_string()).collect(),
        plot,
    };
    let circle = [input("circle_a1.json"), input("circle_a2.json")];
    let triple = [input("t1.csv"), input("t2.csv"), input("t3.csv")];
    vec![
        c(
            "numrange_circle",
            &[
                "numrange", &circle[0], &circle[1], "--count", "300", "--probes", "40", "--seed",
                "1",
            ],
            true,
        ),
        c(
            "numrange_triple_csv",
            &[
                "numrange", &triple[0], &triple[1], &triple[2], "--mode", "full", "--count", "200",
                "--probes", "20", "--seed", "2", "--format", "csv",
            ],
            false,
        ),
        c("pencil_pair", &["pencil", &triple[0], &triple[2]], false),
        c("pencil_circle", &["pencil", &circle[0], &circle[1]], false),
        c(
            "pencil_three",
            &[
                "pencil", &triple[0], &triple[1], &triple[2], "--three", "--grid", "4000",
            ],
            false,
        ),
        c(
            "counterexample_vanishing",
            &[
                "counterexample",
                "--family",
                "vanishing",
                "--truncations",
                "10,20,40",
                "--restarts",
                "4",
                "--iterations",
                "200",
                "--seed",
                "3",
            ],
            true,
        ),
        c(
            "counterexample_convergent_json",
            &[
                "counterexample",
                "--family",
                "convergent",
                "--truncations",
                "10,20",
                "--restarts",
                "4",
                "--iterations",
                "200",
                "--seed",
                "3",
                "--format",
                "json",
            ],
            false,
        ),
        c(
            "sproc_certificate",
            &["sproc", &input("sproc_cert.json"), "--seed", "4"],
            false,
        ),
        c(
            "sproc_violator",
            &[
                "sproc",
                &input("sproc_violated.json"),
                "--seed",
                "4",
                "--directions",
                "5000",
            ],
            false,
        ),
        c(
            "sproc_equality",
            &[
                "sproc",
                &input("sproc_eq.json"),
                "--equality",
                "--seed",
                "4",
                "--directions",
                "5000",
            ],
            false,
        ),
        c(
            "sproc_equality_no_slater",
            &[
                "sproc",
                &input("sproc_cert.json"),
                "--equality",
                "--seed",
                "4",
            ],
            false,
        ),
        c(
            "slemma_certificate",
            &[
                "slemma",
                &input("slemma_interval.json"),
                "--samples",
                "500",
                "--seed",
                "5",
            ],
            false,
        ),
        c(
            "slemma_counterexample",
            &[
                "slemma",
                &input("slemma_bad.json"),
                "--samples",
                "500",
                "--seed",
                "5",
            ],
            false,
        ),
        c(
            "slemma_inconclusive",
            &["slemma", &input("slemma_curve.json"), "--seed", "3"],
            false,
        ),
        c(
            "tls_demo",
            &[
                "tls-demo",
                "--matrix",
                &input("tls_a.json"),
                "--rhs",
                &input("tls_b.json"),
                "--rho",
                "0.1",
                "--starts",
                "4",
                "--iterations",
                "500",
                "--seed",
                "6",
            ],
            false,
        ),
    ]
}

fn run_case(case: &Case, scratch: &Path) -> Result<(String, Option<String>), Fail> {
    let plot = scratch.join(format!("{}.svg", case.name));
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_quadrange"));
    cmd.args(&case.args)
        .env_remove("QUADRANGE_TOL_ATTAIN")
        .env_remove("QUADRANGE_TOL_DEFECT");
    if case.plot {
        cmd.arg("--plot").arg(&plot);
    }
    let out = cmd.output()?;
    let root = golden_dir().join("inputs").display().to_string();
    let tidy = |b: &[u8]| String::from_utf8_lossy(b).replace(&root, "<inputs>");
    let text = format!(
        "exit: {}\n--- stdout\n{}--- stderr\n{}",
        out.status.code().unwrap_or(-1),
        tidy(&out.stdout),
        tidy(&out.stderr)
    );
    let svg = if case.plot {
        Some(std::fs::read_to_string(&plot).map_err(|e| format!("{}: {e}", case.name))?)
    } else {
        None
    };
    Ok((text, svg))
}

fn golden_determinism() -> Outcome {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let dir = golden_dir();
    let scratch = tempfile::tempdir()?;
    let cases = cases();
    for case in &cases {
        let first = run_case(case, scratch.path())?;
        let second = run_case(case, scratch.path())?;
        check(first == second, format!("{}: two runs differ", case.name))?;
        let text_path = dir.join(format!("{}.txt", case.name));
        let svg_path = dir.join(format!("{}.svg", case.name));
        if update {
            std::fs::write(&text_path, &first.0)?;
            if let Some(svg) = &first.1 {
                std::fs::write(&svg_path, svg)?;
            }
            continue;
        }
        let want = std::fs::read_to_string(&text_path)
            .map_err(|e| format!("{}: {e} (run with UPDATE_GOLDEN=1)", text_path.display()))?;
        check(
            want == first.0,
            format!("{}: report differs from golden", case.name),
        )?;
        if let Some(svg) = &first.1 {
            let want = std::fs::read_to_string(&svg_path)?;
            check(
                &want == svg,
                format!("{}: figure differs from golden", case.name),
            )?;
        }
    }
    Ok(format!(
        "{} cases byte-stable{}",
        cases.len(),
        if update { " (goldens rewritten)" } else { "" }
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("three-form convexity, 200 pairs", three_form_convexity),
        ("dimension-2 defect", planar_failure),
        ("counterexample gap decay", gap_decay),
        ("pencil vs hull oracle", pencil_cross_oracle),
        ("homogenization and block inverse", block_inverse_chain),
        ("cone property", cone_property),
        ("S-procedure equivalence", sproc_equivalence),
        ("S-lemma verification", slemma_verification),
        ("CLI golden determinism", golden_determinism),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", k + 1);
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|p| id.ends_with(p.as_str()) || name.contains(p.as_str()))
        {
            continue;
        }
        let start = Instant::now();
        let res = f();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("{id}: PASS  {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("{id}: FAIL  {name}: {why} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
