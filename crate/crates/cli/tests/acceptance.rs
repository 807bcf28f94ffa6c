//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use finsler_cli::report::strip_header;
use finsler_core::catalog::{lookup, CATALOG, CORE_INSTANCES};
use finsler_core::geodesics::{compare_geodesics, IntegratorConfig};
use finsler_core::verify::{run_checks, CheckSpec, Expectation, ResidualReport, SamplePlan};

const POINTS: usize = 100;
const SEED: u64 = 20240601;
const GEODESIC_STARTS: usize = 10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(instance: &str, checks: &[(&str, Expectation)]) -> Vec<ResidualReport> {
    let entry = lookup(instance).unwrap_or_else(|| panic!("catalog lacks {instance}"));
    let bundle = entry.bundle().expect("catalog entries build");
    let specs: Vec<CheckSpec> = checks
        .iter()
        .map(|(id, e)| CheckSpec::new(id).expect("registered check").with_expectation(*e))
        .collect();
    let plan = SamplePlan::new(instance, POINTS, SEED, entry.dimension);
    run_checks(&bundle, &specs, &plan).expect("instance has admissible points")
}

fn below(ids: &[&str], tol: f64) -> Vec<(&'static str, Expectation)> {
    ids.iter()
        .map(|id| (check_id(id), Expectation::AtMost(tol)))
        .collect()
}

fn check_id(id: &str) -> &'static str {
    finsler_core::verify::check_def(id).expect("registered check").id
}

/// Runs `checks` on every instance and summarizes the worst result.
fn over(instances: &[&str], checks: &[(&str, Expectation)]) -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for inst in instances {
        for r in run(inst, checks) {
            pass &= r.pass;
            if !r.pass {
                notes.push(format!("{}@{} max={:.3e}", r.id, inst, r.max));
            }
        }
    }
    let detail = if notes.is_empty() {
        format!("{} check(s) on {} instance(s)", checks.len(), instances.len())
    } else {
        notes.join("; ")
    };
    Outcome { pass, detail }
}

fn merge(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        pass: parts.iter().all(|p| p.pass),
        detail: parts.into_iter().map(|p| p.detail).collect::<Vec<_>>().join(" | "),
    }
}

fn max_of(instance: &str, id: &str) -> f64 {
    run(instance, &[(check_id(id), Expectation::AtMost(f64::INFINITY))])[0].max
}

/// Largest path deviation over seeded starts.
fn deviations(instance: &str) -> Vec<f64> {
    let entry = lookup(instance).unwrap();
    let bundle = entry.bundle().unwrap();
    let plan = SamplePlan::new(instance, GEODESIC_STARTS, SEED, entry.dimension);
    plan.points(entry.dimension)
        .iter()
        .map(|p| {
            compare_geodesics(&bundle, &p.x, &p.y, 1.0, &IntegratorConfig::default())
                .expect("geodesics integrate")
                .max_deviation
        })
        .collect()
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let mut o = over(&CORE_INSTANCES, &below(&["eq12_star_metric"], 1e-9));
    let secs = start.elapsed().as_secs_f64();
    o.pass &= secs < 30.0;
    o.detail = format!("{} in {secs:.2} s", o.detail);
    o
}

fn criterion6() -> Outcome {
    let parts = ["prop3_a", "prop3_b", "prop3_c"];
    merge(vec![
        over(&["conformal_const_b", "euclid_curl_b"], &below(&parts, 1e-6)),
        over(&["euclid_flat"], &below(&parts, 1e-11)),
    ])
}

fn criterion7() -> Outcome {
    let holds = over(
        &["euclid_const_b"],
        &[
            ("theorem1_nabla_omega", Expectation::AtMost(1e-10)),
            ("theorem1_B", Expectation::AtMost(1e-9)),
        ],
    );
    let witness = over(
        &["conformal_const_b"],
        &[
            ("theorem1_nabla_omega", Expectation::AtLeast(1e-3)),
            ("eq15", Expectation::AtMost(1e-8)),
        ],
    );
    merge(vec![holds, witness])
}

fn criterion8() -> Outcome {
    let n_closed = max_of("euclid_closed_b", "theorem2_N_zero");
    let n_curl = max_of("euclid_curl_b", "theorem2_N_zero");
    let dev_closed = deviations("euclid_closed_b").into_iter().fold(0.0, f64::max);
    let dev_curl = deviations("euclid_curl_b").into_iter().fold(0.0, f64::max);
    let pass = n_closed < 1e-9 && dev_closed < 1e-6 && n_curl > 1e-3 && dev_curl > 1e-3;
    Outcome {
        pass,
        detail: format!(
            "closed: max|N|={n_closed:.3e} (<1e-9: {}), path deviation={dev_closed:.3e} (<1e-6: {}); \
             curl: max|N|={n_curl:.3e}, path deviation={dev_curl:.3e}",
            n_closed < 1e-9,
            dev_closed < 1e-6
        ),
    }
}

fn criterion12() -> Outcome {
    let dir = tempfile::tempdir().expect("temporary directory");
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "dimension = 2\ninstance = \"conformal_const_b\"\n\n[sample]\ncount = 40\nseed = 7\n",
    )
    .unwrap();
    let mut texts = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("report{i}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_finsler"))
            .args(["verify", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .expect("binary runs")
            .status;
        if status.code() != Some(0) {
            return Outcome {
                pass: false,
                detail: format!("verify exited with {status}"),
            };
        }
        let text = std::fs::read_to_string(&out).unwrap();
        let body = serde_json::to_string(&strip_header(&text).unwrap()).unwrap();
        texts.push(body);
    }
    Outcome {
        pass: texts[0] == texts[1],
        detail: format!("report bodies of {} bytes", texts[0].len()),
    }
}

fn main() -> ExitCode {
    let all: Vec<&str> = CATALOG.iter().map(|e| e.id).collect();
    let criteria: Vec<(&str, fn(&[&str]) -> Outcome)> = vec![
        ("1 starred tensors vs engine", |_| criterion1()),
        ("2 A and T* closed forms", |_| {
            over(&CORE_INSTANCES, &below(&["prop4_A", "cor3_tstar"], 1e-8))
        }),
        ("3 trace of C*", |_| over(&CORE_INSTANCES, &below(&["lemma5_trace"], 1e-9))),
        ("4 N0, N, B closed forms", |_| {
            over(&CORE_INSTANCES, &below(&["eq14_N0", "eq14_N", "eq14_B"], 1e-7))
        }),
        ("5 identity suite", |_| {
            over(
                &CORE_INSTANCES,
                &below(&["lemma1", "prop1", "lemma3", "prop2", "cor1", "cor2c_symmetry", "eq15"], 1e-8),
            )
        }),
        ("6 curvature relations", |_| criterion6()),
        ("7 parallel b", |_| criterion7()),
        ("8 closed b and geodesics", |_| criterion8()),
        ("9 Berwald, Landsberg, flatness", |_| {
            over(
                &["euclid_const_b"],
                &[
                    ("theorem3_berwald_star", Expectation::AtMost(1e-7)),
                    ("theorem4_landsberg_star", Expectation::AtMost(1e-7)),
                    ("prop5_rstar", Expectation::AtMost(1e-8)),
                ],
            )
        }),
        ("10 trace form under closed b", |_| {
            over(&["euclid_closed_b"], &below(&["theorem6_prop6_closed"], 1e-7))
        }),
        ("11 engine invariants", |all| {
            over(
                all,
                &[
                    ("homogeneity", Expectation::AtMost(1e-9)),
                    ("euler_identities", Expectation::AtMost(1e-10)),
                    ("cartan_axioms", Expectation::AtMost(1e-9)),
                ],
            )
        }),
        ("12 deterministic reports", |_| criterion12()),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f(&all);
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of 12 criteria pass", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
