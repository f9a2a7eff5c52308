//! Acceptance gate. Run with `cargo test -p qtwist --test acceptance`; prints
//! one line per criterion and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qtwist::cgtwist::{associator_block, cg_decompose, solve_twist_block_tol};
use qtwist::liftalg::{induce_action, lift_action, random_spins, roundtrip_instance, LiftConfig, LiftResult};
use qtwist::linalg::dense::random_noise;
use qtwist::linalg::{Mat, Residual};
use qtwist::qnum::{Cplx, QScalar};
use qtwist::repcore::{irrep_su2, vector_rep_sln, verify_relations, Generator, RelationReport, Rep};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWIST_TOL: f64 = 1e-10;
const ASSOC_TOL: f64 = 1e-8;
const LIFT_TOL: f64 = 1e-8;
const NOISE: f64 = 1e-2;
const DETECT: f64 = 1e-4;
const SEEDS: u64 = 20;

fn q(s: &str) -> QScalar {
    s.parse().unwrap()
}

fn all_exact_zero(r: &RelationReport) -> bool {
    r.entries
        .iter()
        .all(|e| matches!(&e.residual, Residual::Exact(x) if x.is_zero()))
}

fn exact_zero(r: &Residual) -> bool {
    matches!(r, Residual::Exact(x) if x.is_zero())
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn run(id: u32, title: &str, limit: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let ok = out.ok && in_time;
    println!(
        "criterion {id} {}: {title}: {} [{:.2}s / {}s]",
        if ok { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    ok
}

/// `K` on `V_n` is `diag(q^n, q^{n-2}, ..., q^{-n})`.
fn k_oracle(r: &Rep, n: u32, qv: &QScalar) -> bool {
    let k = &r.k[0];
    (0..=n as usize).all(|m| {
        (0..=n as usize).all(|l| {
            let expect = if m == l {
                qv.pow(n as i64 - 2 * m as i64)
            } else {
                QScalar::zero()
            };
            k[(m, l)] == expect
        })
    })
}

fn criterion_1() -> Outcome {
    for qs in ["1/2", "2/3", "3"] {
        let qv = q(qs);
        for n in 0..=8 {
            let r = match irrep_su2(n, &qv) {
                Ok(r) => r,
                Err(e) => return fail(format!("irrep n={n} q={qs}: {e}")),
            };
            let rep = match verify_relations(&r) {
                Ok(rep) => rep,
                Err(e) => return fail(format!("verify n={n} q={qs}: {e}")),
            };
            if !all_exact_zero(&rep) {
                let bad: Vec<_> = rep.failing(0.0).map(|e| e.relation).collect();
                return fail(format!("n={n} q={qs} nonzero: {bad:?}"));
            }
            if !k_oracle(&r, n, &qv) {
                return fail(format!("n={n} q={qs}: K spectrum"));
            }
        }
    }
    pass("27 irreps, every residual exactly 0")
}

/// `E_i^2 E_j - [2] E_i E_j E_i + E_j E_i^2` for adjacent simply-laced nodes.
fn serre_oracle(xi: &Mat<QScalar>, xj: &Mat<QScalar>, qv: &QScalar) -> bool {
    let two = qv + &qv.recip().unwrap();
    let xii = xi.matmul(xi);
    let mut s = xii.matmul(xj);
    s.sub_assign(&xi.matmul(xj).matmul(xi).scale(&two));
    s.add_assign(&xj.matmul(&xii));
    s.is_zero()
}

fn criterion_2() -> Outcome {
    let mut serre_checked = 0;
    for n in [3usize, 4] {
        for qs in ["1/2", "2"] {
            let qv = q(qs);
            let r = match vector_rep_sln(n, &qv) {
                Ok(r) => r,
                Err(e) => return fail(format!("sl{n} q={qs}: {e}")),
            };
            let rep = match verify_relations(&r) {
                Ok(rep) => rep,
                Err(e) => return fail(format!("verify sl{n} q={qs}: {e}")),
            };
            if !all_exact_zero(&rep) {
                let bad: Vec<_> = rep.failing(0.0).map(|e| e.relation).collect();
                return fail(format!("sl{n} q={qs} nonzero: {bad:?}"));
            }
            for i in 0..n - 1 {
                for j in 0..n - 1 {
                    if i.abs_diff(j) != 1 {
                        continue;
                    }
                    let listed = ["serre_e", "serre_f"]
                        .iter()
                        .all(|name| rep.get(name, Some(i + 1), Some(j + 1)).is_some());
                    if !listed || !serre_oracle(&r.e[i], &r.e[j], &qv) || !serre_oracle(&r.f[i], &r.f[j], &qv) {
                        return fail(format!("sl{n} q={qs}: Serre ({}, {})", i + 1, j + 1));
                    }
                    serre_checked += 1;
                }
            }
        }
    }
    pass(format!("4 reps exact, {serre_checked} adjacent Serre pairs checked"))
}

fn criterion_3() -> Outcome {
    for qs in ["1/2", "2/3", "3", "1"] {
        let qv = q(qs);
        for a in 0..=6u32 {
            for b in 0..=6u32 {
                let cg = match cg_decompose(a, b, &qv) {
                    Ok(cg) => cg,
                    Err(e) => return fail(format!("({a},{b}) q={qs}: {e}")),
                };
                let expect: Vec<u32> = (a.abs_diff(b)..=a + b).step_by(2).collect();
                if cg.labels() != expect {
                    return fail(format!("({a},{b}) q={qs}: labels {:?}", cg.labels()));
                }
                let dim: u32 = cg.labels().iter().map(|c| c + 1).sum();
                if dim != (a + 1) * (b + 1) {
                    return fail(format!("({a},{b}) q={qs}: dimension {dim}"));
                }
                if !exact_zero(&cg.completeness) {
                    return fail(format!("({a},{b}) q={qs}: completeness {:?}", cg.completeness));
                }
            }
        }
    }
    pass("196 decompositions, multiplicity-free, completeness exactly 0")
}

fn criterion_4() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    for qs in ["1/2", "2/3"] {
        let qv = q(qs);
        for a in 0..=4 {
            for b in 0..=4 {
                let t = match solve_twist_block_tol(a, b, &qv, f64::INFINITY) {
                    Ok(t) => t,
                    Err(e) => return fail(format!("({a},{b}) q={qs}: {e}")),
                };
                worst.0 = worst.0.max(t.unitarity_residual);
                worst.1 = worst.1.max(t.intertwine_residual);
                if !(t.unitarity_residual <= TWIST_TOL && t.intertwine_residual <= TWIST_TOL) {
                    return fail(format!(
                        "({a},{b}) q={qs}: unitarity {:e}, intertwining {:e}",
                        t.unitarity_residual, t.intertwine_residual
                    ));
                }
            }
        }
    }
    pass(format!(
        "50 blocks, max unitarity {:.1e}, max intertwining {:.1e}",
        worst.0, worst.1
    ))
}

fn criterion_5() -> Outcome {
    let qv = q("1/2");
    let mut worst = (0.0f64, 0.0f64);
    for a in 0..=3 {
        for b in 0..=3 {
            for c in 0..=3 {
                let phi = match associator_block(a, b, c, &qv) {
                    Ok(phi) => phi,
                    Err(e) => return fail(format!("({a},{b},{c}): {e}")),
                };
                worst.0 = worst.0.max(phi.commutation_residual);
                if !(phi.commutation_residual <= ASSOC_TOL) {
                    return fail(format!("({a},{b},{c}): commutation {:e}", phi.commutation_residual));
                }
                if b == 0 {
                    worst.1 = worst.1.max(phi.identity_residual);
                    if !(phi.identity_residual <= ASSOC_TOL) {
                        return fail(format!("({a},0,{c}): identity {:e}", phi.identity_residual));
                    }
                }
            }
        }
    }
    pass(format!(
        "64 triples, max commutation {:.1e}, max |Phi - I| at b=0 {:.1e}",
        worst.0, worst.1
    ))
}

/// Lifts one seeded round-trip instance and compares against the source.
fn roundtrip(seed: u64, qs: &str) -> Result<LiftResult, String> {
    let qv = q(qs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spins = random_spins(3, 4, &mut rng);
    let inst = roundtrip_instance(&spins, &qv, &mut rng).map_err(|e| format!("seed {seed}: {e}"))?;
    let cfg = LiftConfig { tol: LIFT_TOL };
    let lift = lift_action(&inst.action, &cfg).map_err(|e| format!("seed {seed} spins {spins:?}: {e}"))?;
    if let Some((name, r)) = lift.residuals.iter().find(|(_, r)| !(**r <= LIFT_TOL)) {
        return Err(format!("seed {seed} spins {spins:?}: {name} = {r:e}"));
    }
    Ok(lift)
}

fn roundtrip_sweep(qs_for_seed: impl Fn(u64) -> &'static str, expect_inverted: bool) -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..SEEDS {
        match roundtrip(seed, qs_for_seed(seed)) {
            Ok(lift) => {
                if lift.inverted != expect_inverted {
                    return fail(format!("seed {seed}: inverted = {}", lift.inverted));
                }
                worst = lift.residuals.values().fold(worst, |m, r| m.max(*r));
            }
            Err(e) => return fail(e),
        }
    }
    pass(format!("{SEEDS}/{SEEDS} instances lifted, max residual {worst:.1e}"))
}

fn criterion_6() -> Outcome {
    roundtrip_sweep(|seed| if seed % 2 == 0 { "1/2" } else { "2/3" }, false)
}

fn criterion_7() -> Outcome {
    roundtrip_sweep(|_| "2", true)
}

fn criterion_8() -> Outcome {
    let r = match vector_rep_sln(3, &q("1/2")) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let action = match induce_action(&r, &[3]) {
        Ok(a) => a,
        Err(e) => return fail(e.to_string()),
    };
    let lift = match lift_action(&action, &LiftConfig { tol: LIFT_TOL }) {
        Ok(l) => l,
        Err(e) => return fail(e.to_string()),
    };
    let x = lift.residuals["serre_x"];
    let y = lift.residuals["serre_y"];
    if x <= LIFT_TOL && y <= LIFT_TOL && lift.passes() {
        pass(format!("serre_x {x:.1e}, serre_y {y:.1e}"))
    } else {
        fail(format!("serre_x {x:e}, serre_y {y:e}, failing {:?}", lift.failing()))
    }
}

fn pick_generator(rng: &mut ChaCha8Rng) -> Generator {
    Generator::ALL[rng.random_range(0..3)]
}

fn corrupt(m: &mut Mat<Cplx>, rng: &mut ChaCha8Rng) {
    let noise = random_noise(m.rows(), m.cols(), NOISE, rng);
    m.add_assign(&noise);
}

fn corrupted_rep_detected(seed: u64) -> Result<bool, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let qs = if rng.random_bool(0.5) { "1/2" } else { "2/3" };
    let n = rng.random_range(1..=4);
    let mut r = irrep_su2(n, &q(qs))
        .and_then(|r| r.to_orthonormal())
        .map_err(|e| e.to_string())?;
    let x = pick_generator(&mut rng);
    let m = match x {
        Generator::E => &mut r.e[0],
        Generator::F => &mut r.f[0],
        Generator::K => &mut r.k[0],
    };
    corrupt(m, &mut rng);
    Ok(match verify_relations(&r) {
        Ok(rep) => rep.max_residual() > DETECT,
        Err(_) => true,
    })
}

fn corrupted_action_detected(seed: u64) -> Result<bool, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
    let qs = ["1/2", "2/3", "2"][rng.random_range(0..3)];
    let spins = random_spins(3, 3, &mut rng);
    let mut inst = roundtrip_instance(&spins, &q(qs), &mut rng).map_err(|e| e.to_string())?;
    let x = pick_generator(&mut rng);
    let m = match x {
        Generator::E => &mut inst.action.e[0],
        Generator::F => &mut inst.action.f[0],
        Generator::K => &mut inst.action.k[0],
    };
    corrupt(m, &mut rng);
    Ok(match lift_action(&inst.action, &LiftConfig { tol: LIFT_TOL }) {
        Ok(lift) => lift.residuals.values().any(|r| !(*r <= DETECT)),
        Err(_) => true,
    })
}

fn criterion_9() -> Outcome {
    let mut reps = 0;
    let mut actions = 0;
    for seed in 0..SEEDS {
        match corrupted_rep_detected(seed) {
            Ok(true) => reps += 1,
            Ok(false) => {}
            Err(e) => return fail(format!("rep seed {seed}: {e}")),
        }
        match corrupted_action_detected(seed) {
            Ok(true) => actions += 1,
            Ok(false) => {}
            Err(e) => return fail(format!("action seed {seed}: {e}")),
        }
    }
    let detail = format!("representations {reps}/{SEEDS}, actions {actions}/{SEEDS} rejected");
    if reps == SEEDS && actions == SEEDS {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let secs = Duration::from_secs;
    let results = [
        run(1, "exact relations for irreps n <= 8", secs(10), criterion_1),
        run(2, "Serre relations for sl3, sl4", secs(5), criterion_2),
        run(3, "q-independent CG multiplicities", secs(30), criterion_3),
        run(4, "twist blocks a, b <= 4", secs(60), criterion_4),
        run(5, "associator commutation and normalization", secs(120), criterion_5),
        run(6, "lift round trip, q in {1/2, 2/3}", secs(120), criterion_6),
        run(7, "lift round trip, q = 2", secs(120), criterion_7),
        run(8, "Serre elements vanish in the sl3 lift", secs(120), criterion_8),
        run(9, "negative controls", secs(120), criterion_9),
    ];
    let passed = results.iter().filter(|ok| **ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
