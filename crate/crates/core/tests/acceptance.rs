//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use degradable::channel::{self, amplitude_damping, depolarizing, lift_filtered, lift_max_entangled, QuantumChannel};
use degradable::filter::DEFAULT_SLACK_TOL;
use degradable::linalg::{self, c, cr};
use degradable::rank_one::{self, RankOneVerdict};
use degradable::sdp::{build_constraints, solve_feasibility, verify_channel, ConstraintScope, Stage};
use degradable::state::{self, TripartiteState};
use degradable::{decide, ComplexMatrix, ComplexVector, DecideConfig, Direction, KrausSet, SolverConfig, Status};
use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const GOLDEN_TOL: f64 = 1e-12;
const VERIFY_TOL: f64 = 1e-7;
const CONTRACT_TOL: f64 = 1e-9;
const CLOSED_FORM_TOL: f64 = 1e-10;
const QBER_TOL: f64 = 0.007;
/// Raw residual of the full counterexample system at the solver's final
/// point (unit-weight blocks, 20000 iterations), measured once and pinned.
const SEC4_BASELINE: f64 = 6.0827e-2;
const SEC4_BAND: f64 = 0.5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed < limit;
    let pass = out.pass && in_time;
    println!(
        "{} {name}: {} [{:.3} s, limit {} s]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn m(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(rows, cols, &entries.iter().map(|&x| cr(x)).collect::<Vec<_>>())
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
}

fn unit(rng: &mut ChaCha8Rng, d: usize) -> ComplexVector {
    let v = gaussian(rng, d, 1).column(0).into_owned();
    v.unscale(v.norm())
}

/// `ρ_AE` (trace over B) and `ρ_AB` (trace over E) by direct summation.
fn oracle_reductions(s: &TripartiteState) -> (ComplexMatrix, ComplexMatrix) {
    let (n, p, q) = s.dims();
    let mut ae = ComplexMatrix::zeros(n * q, n * q);
    let mut ab = ComplexMatrix::zeros(n * p, n * p);
    for i in 0..n {
        for i2 in 0..n {
            for j in 0..p {
                for k in 0..q {
                    for k2 in 0..q {
                        ae[(i * q + k, i2 * q + k2)] += s.amplitude(i, j, k) * s.amplitude(i2, j, k2).conj();
                    }
                }
            }
            for k in 0..q {
                for j in 0..p {
                    for j2 in 0..p {
                        ab[(i * p + j, i2 * p + j2)] += s.amplitude(i, j, k) * s.amplitude(i2, j2, k).conj();
                    }
                }
            }
        }
    }
    (ae, ab)
}

/// `Σ_j (I_n ⊗ F_j) X (I_n ⊗ F_j)*` through explicit Kronecker products.
fn oracle_local(ops: &[ComplexMatrix], x: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let id = ComplexMatrix::identity(n, n);
    let d = n * ops[0].nrows();
    let mut out = ComplexMatrix::zeros(d, d);
    for f in ops {
        let big = id.kronecker(f);
        out += &big * x * big.adjoint();
    }
    out
}

fn oracle_completeness(ops: &[ComplexMatrix]) -> f64 {
    let q = ops[0].ncols();
    let sum = ops.iter().fold(ComplexMatrix::zeros(q, q), |acc, f| acc + f.adjoint() * f);
    (sum - ComplexMatrix::identity(q, q)).norm()
}

/// Trace norm from the eigenvalues `±σ_i` of the Hermitian dilation
/// `[[0, σ], [σ*, 0]]`, through nalgebra's symmetric eigensolver.
fn oracle_trace_norm(s: &ComplexMatrix) -> f64 {
    let (r, c) = s.shape();
    let mut h = ComplexMatrix::zeros(r + c, r + c);
    h.view_mut((0, r), (r, c)).copy_from(s);
    h.view_mut((r, 0), (c, r)).copy_from(&s.adjoint());
    SymmetricEigen::new(h).eigenvalues.iter().map(|l| l.abs()).sum::<f64>() / 2.0
}

fn example2_golden() -> Outcome {
    let (a, b) = (0.5, 0.5);
    let s = state::example2(a, b).unwrap();
    let expected_x: Vec<f64> = vec![a, 0.0, b, 0.0, 0.0, a, 0.0, -b];
    let amp_err = s.amplitudes().iter().zip(&expected_x).map(|(z, &e)| (z - cr(e)).norm()).fold(0.0, f64::max);

    let (a2, b2, ab) = (a * a, b * b, a * b);
    let x2 = m(4, 4, &[a2 + b2, 0.0, 0.0, a2 - b2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, a2 - b2, 0.0, 0.0, a2 + b2]);
    let x3 = m(4, 4, &[a2, ab, 0.0, 0.0, ab, b2, 0.0, 0.0, 0.0, 0.0, a2, -ab, 0.0, 0.0, -ab, b2]);
    let red = s.reduced_densities();
    let (ae, abm) = oracle_reductions(&s);
    let x_err = [(&red.x2 - &x2).norm(), (&red.x3 - &x3).norm(), (&ae - &x2).norm(), (&abm - &x3).norm()]
        .into_iter()
        .fold(0.0, f64::max);

    let f1 = m(2, 2, &[a, a, b, -b]);
    let f2 = m(2, 2, &[a, -a, b, b]);
    let ops = vec![f1, f2];
    let tp = oracle_completeness(&ops);
    let t_err = (oracle_local(&ops, &x2, 2) - &x3).norm();

    let t = Instant::now();
    let out = decide(&s, Direction::EveToBob, &DecideConfig::default()).unwrap();
    let decide_time = t.elapsed();
    let ver = out
        .certificate
        .as_ref()
        .map(|k| {
            let (src, tgt) = oracle_reductions(&s.normalized().unwrap());
            (oracle_local(k.ops(), &src, 2) - tgt).norm().max(oracle_completeness(k.ops()))
        })
        .unwrap_or(f64::INFINITY);
    let pass = amp_err <= GOLDEN_TOL
        && x_err <= GOLDEN_TOL
        && tp <= GOLDEN_TOL
        && t_err <= GOLDEN_TOL
        && out.status == Status::Feasible
        && ver <= VERIFY_TOL
        && decide_time < Duration::from_secs(1);
    Outcome {
        pass,
        detail: format!(
            "|X2,X3 − displayed| = {x_err:.1e}, ‖ΣF*F − I‖ = {tp:.1e}, ‖T(X2) − X3‖ = {t_err:.1e} (tol {GOLDEN_TOL:e}); \
             decide E→B {:?} at {:?}, certificate residual {ver:.1e} (tol {VERIFY_TOL:e}), decide {:.1} ms",
            out.status,
            out.stage,
            decide_time.as_secs_f64() * 1e3
        ),
    }
}

fn two_way() -> Outcome {
    let (a, b) = (0.5, 0.5);
    let s = state::example2(a, b).unwrap();
    let (x2, x3) = oracle_reductions(&s);
    let g = m(2, 2, &[a, b, a, -b]) * cr(2f64.sqrt());
    let l_err = (oracle_local(&[g], &x3, 2) - &x2).norm();

    let mut bad = Vec::new();
    let mut seen = Vec::new();
    for a_sq in [0.36, 0.1, 0.2, 0.3, 0.45] {
        let (a, b) = (f64::sqrt(a_sq), f64::sqrt(0.5 - a_sq));
        let s = state::example2(a, b).unwrap();
        for use_rank_one in [true, false] {
            let config = DecideConfig { use_rank_one, ..DecideConfig::default() };
            let out = decide(&s, Direction::BobToEve, &config).unwrap();
            seen.push(format!("{:?}/{:?}", out.status, out.stage));
            if out.is_verified_feasible() {
                bad.push(a_sq);
            }
        }
    }
    seen.sort();
    seen.dedup();
    Outcome {
        pass: l_err <= GOLDEN_TOL && bad.is_empty(),
        detail: format!(
            "‖L(X3) − X2‖ = {l_err:.1e} (tol {GOLDEN_TOL:e}); B→E for a² ∈ {{0.36, 0.1, 0.2, 0.3, 0.45}} with and without \
             the rank-one path: verified-Feasible {} times, outcomes {}",
            bad.len(),
            seen.join(", ")
        ),
    }
}

fn depolarizing_threshold() -> Outcome {
    let scan = channel::epsilon_scan(0.05, 0.45, 0.01, DEFAULT_SLACK_TOL, None).unwrap();
    let mut worst = 0.0f64;
    for row in &scan.rows {
        let alpha = (1.0 - row.epsilon).sqrt();
        let beta = (row.epsilon / 3.0).sqrt();
        worst = worst
            .max((row.d_r - 2.0 * beta * (alpha + beta)).abs())
            .max((row.d_s - (alpha + beta) * (alpha - beta)).abs());
    }
    let Some((lo, hi)) = scan.bracket() else {
        return Outcome { pass: false, detail: "no bracket found".into() };
    };
    let q_lo = scan.rows.iter().find(|r| r.epsilon == lo).unwrap().qber;
    let q_hi = scan.rows.iter().find(|r| r.epsilon == hi).unwrap().qber;
    let q_cross = (q_lo + q_hi) / 2.0;
    let pass = lo < 0.25
        && 0.25 <= hi
        && hi - lo <= 0.01 + 1e-12
        && (q_cross - 1.0 / 6.0).abs() <= QBER_TOL
        && worst <= CLOSED_FORM_TOL;
    Outcome {
        pass,
        detail: format!(
            "bracket ({lo}, {hi}] width {:.3} ∋ 0.25, QBER crossing {q_cross:.4} vs 1/6 (±{QBER_TOL}), \
             max closed-form error over {} points {worst:.1e} (tol {CLOSED_FORM_TOL:e})",
            hi - lo,
            scan.rows.len()
        ),
    }
}

/// Random `p × q` Kraus operators with `Σ F*F = I`.
fn random_kraus(rng: &mut ChaCha8Rng, p: usize, q: usize, r: usize) -> Vec<ComplexMatrix> {
    let gs: Vec<ComplexMatrix> = (0..r).map(|_| gaussian(rng, p, q)).collect();
    let h = gs.iter().fold(ComplexMatrix::zeros(q, q), |acc, g| acc + g.adjoint() * g);
    let eig = SymmetricEigen::new(h);
    let inv_sqrt = &eig.eigenvectors
        * ComplexMatrix::from_diagonal(&eig.eigenvalues.map(|l| cr(1.0 / l.sqrt())))
        * eig.eigenvectors.adjoint();
    gs.iter().map(|g| g * &inv_sqrt).collect()
}

fn contractivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    let mut oracle_gap = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for _ in 0..1000 {
        let q: usize = rng.random_range(1..=4);
        let p = rng.random_range(1..=4);
        let r = rng.random_range(q.div_ceil(p)..=4.max(q.div_ceil(p)));
        let ops = random_kraus(&mut rng, p, q, r);
        let sigma = gaussian(&mut rng, q, q);
        let set = KrausSet::new(ops.clone()).unwrap();
        let (before, after) = degradable::filter::contractivity_check(&set, &sigma).unwrap();
        let image = oracle_local(&ops, &sigma, 1);
        oracle_gap = oracle_gap
            .max((before - oracle_trace_norm(&sigma)).abs() / before)
            .max((after - oracle_trace_norm(&image)).abs() / before);
        worst_ratio = worst_ratio.max(after / before);
        if after > before + CONTRACT_TOL {
            violations += 1;
        }
    }

    let mut bound_violations = 0;
    for _ in 0..200 {
        let q: usize = rng.random_range(1..=3);
        let p = rng.random_range(1..=3);
        let r = rng.random_range(q.div_ceil(p)..=4.max(q.div_ceil(p)));
        let ops = random_kraus(&mut rng, p, q, r);
        let sigma = gaussian(&mut rng, q, q);
        let b = oracle_local(&ops, &sigma, 1);
        let lhs = linalg::trace_norm(&ComplexMatrix::identity(r, r).kronecker(&b)).unwrap();
        let mut padded = ComplexMatrix::zeros(p * r, p * r);
        padded.view_mut((0, 0), (q, q)).copy_from(&sigma);
        let rhs = r as f64 * linalg::trace_norm(&padded).unwrap();
        if lhs > rhs + CONTRACT_TOL * rhs.max(1.0) {
            bound_violations += 1;
        }
    }
    Outcome {
        pass: violations == 0 && bound_violations == 0 && oracle_gap < 1e-10,
        detail: format!(
            "{violations}/1000 contractivity violations (max ‖F(σ)‖₁/‖σ‖₁ = {worst_ratio:.4}, tol {CONTRACT_TOL:e}), \
             {bound_violations}/200 violations of ‖I_r ⊗ F(σ)‖₁ ≤ r‖σ ⊕ 0‖₁, trace norm vs oracle {oracle_gap:.1e}"
        ),
    }
}

fn counterexample() -> Outcome {
    let s = state::sec4(0.8f64.sqrt(), 0.65f64.sqrt()).unwrap();
    let diag_config = DecideConfig { scope: ConstraintScope::DiagonalOnly, ..DecideConfig::default() };
    let diag = decide(&s, Direction::EveToBob, &diag_config).unwrap();
    let diag_res = diag.verification_residual.unwrap_or(f64::INFINITY);

    let full_config = DecideConfig::default();
    let full = decide(&s, Direction::EveToBob, &full_config).unwrap();
    let full_solver_only = decide(&s, Direction::EveToBob, &DecideConfig { witness_count: 0, ..full_config.clone() }).unwrap();

    // stagnation baseline: the projection solver alone on the full system
    let blocks = s.normalized().unwrap().blocks().unwrap();
    let system = build_constraints(&blocks, Direction::EveToBob, ConstraintScope::Full).unwrap();
    let mut residuals = Vec::new();
    for max_iter in [10_000, 20_000] {
        let run = solve_feasibility(&system, &SolverConfig { max_iter, ..SolverConfig::default() }).unwrap();
        residuals.push(system.raw_residual_of(&run.point));
    }
    let in_band = |r: f64| (r - SEC4_BASELINE).abs() <= SEC4_BAND * SEC4_BASELINE;
    let pass = diag.is_verified_feasible()
        && diag_res <= VERIFY_TOL
        && !full.is_verified_feasible()
        && !full_solver_only.is_verified_feasible()
        && residuals.iter().all(|&r| in_band(r));
    Outcome {
        pass,
        detail: format!(
            "diagonal-only {:?} (residual {diag_res:.1e}, tol {VERIFY_TOL:e}); full {:?} at {:?}, without random witnesses \
             {:?} at {:?}; stagnation residual {:.4e} / {:.4e} at 10000 / 20000 iterations vs baseline {SEC4_BASELINE:.4e} ±{}%",
            diag.status,
            full.status,
            full.stage,
            full_solver_only.status,
            full_solver_only.stage,
            residuals[0],
            residuals[1],
            SEC4_BAND * 100.0
        ),
    }
}

fn product_state(u: &[ComplexVector], v: &[ComplexVector], d: &[f64]) -> TripartiteState {
    let (n, p, q) = (u.len(), v[0].len(), u[0].len());
    let mut amps = Vec::with_capacity(n * p * q);
    for i in 0..n {
        for j in 0..p {
            for k in 0..q {
                amps.push(v[i][j] * u[i][k] * d[i]);
            }
        }
    }
    TripartiteState::new((n, p, q), amps).unwrap()
}

/// Rank-one states: even seeds satisfy the correlation condition by
/// construction (`u_i` realizes the Gram matrix of `v_i ⊗ γ_i`), odd seeds
/// are generic.
fn random_rank_one_state(rng: &mut ChaCha8Rng, constructed: bool) -> TripartiteState {
    let n = rng.random_range(2..=3);
    let p = rng.random_range(1..=3);
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..1.0)).collect();
    if constructed {
        let q = rng.random_range(n..=3);
        let v: Vec<_> = (0..n).map(|_| unit(rng, p)).collect();
        let g: Vec<_> = (0..n).map(|_| unit(rng, 2)).collect();
        let w: Vec<ComplexVector> = (0..n).map(|i| v[i].kronecker(&g[i])).collect();
        let basis = linalg::svd(&ComplexMatrix::from_columns(&w), 1e-12).unwrap().u;
        let unitary = linalg::svd(&gaussian(rng, q, q), 0.0).unwrap().u;
        let u: Vec<_> = w
            .iter()
            .map(|x| {
                let mut y = ComplexVector::zeros(q);
                y.rows_mut(0, basis.ncols()).copy_from(&(basis.adjoint() * x));
                &unitary * y
            })
            .collect();
        product_state(&u, &v, &d)
    } else {
        let q = rng.random_range(1..=3);
        let v: Vec<_> = (0..n).map(|_| unit(rng, p)).collect();
        let u: Vec<_> = (0..n).map(|_| unit(rng, q)).collect();
        product_state(&u, &v, &d)
    }
}

fn oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let solver_only = DecideConfig { use_rank_one: false, ..DecideConfig::default() };
    let (mut yes, mut no, mut inconclusive) = (0, 0, 0);
    let mut disagreements = Vec::new();
    for k in 0..50 {
        let s = random_rank_one_state(&mut rng, k % 2 == 0);
        let blocks = s.normalized().unwrap().blocks().unwrap();
        let dec = rank_one::detect_rank_one(&blocks, linalg::DEFAULT_RANK_TOL).expect("rank one by construction");
        for dir in [Direction::EveToBob, Direction::BobToEve] {
            let e = rank_one::check_condition_e(&dec.oriented(dir), &SolverConfig::default()).unwrap();
            let sdp = decide(&s, dir, &solver_only).unwrap();
            match e.verdict {
                RankOneVerdict::Yes => {
                    yes += 1;
                    if !sdp.is_verified_feasible() {
                        disagreements.push(format!("#{k} {dir}: Yes vs {:?}/{:?}", sdp.status, sdp.termination));
                    }
                }
                RankOneVerdict::No => {
                    no += 1;
                    if sdp.is_verified_feasible() {
                        disagreements.push(format!("#{k} {dir}: No vs verified Feasible"));
                    }
                }
                RankOneVerdict::Inconclusive => inconclusive += 1,
            }
        }
    }
    Outcome {
        pass: disagreements.is_empty() && yes > 0 && no > 0,
        detail: format!(
            "50 states × 2 directions: {yes} Yes, {no} No, {inconclusive} inconclusive; disagreements {}",
            if disagreements.is_empty() { "none".to_string() } else { disagreements.join("; ") }
        ),
    }
}

fn filtered_channel_inputs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let config = DecideConfig::default();
    let channels: Vec<(&str, QuantumChannel, Direction)> = vec![
        ("depolarizing 0.3", depolarizing(0.3).unwrap(), Direction::EveToBob),
        ("depolarizing 0.5", depolarizing(0.5).unwrap(), Direction::EveToBob),
        ("amplitude damping 0.5", amplitude_damping(0.5).unwrap(), Direction::EveToBob),
        ("amplitude damping 0.5", amplitude_damping(0.5).unwrap(), Direction::BobToEve),
    ];
    let mut worst = 0.0f64;
    let mut missing = Vec::new();
    let mut singular = 0;
    for (name, ch, dir) in &channels {
        let out = decide(&lift_max_entangled(ch), *dir, &config).unwrap();
        let Some(cert) = out.certificate.filter(|_| out.status == Status::Feasible) else {
            missing.push(format!("{name} {dir}"));
            continue;
        };
        for t in 0..20 {
            let k = if t % 4 == 3 {
                // rank one: not invertible
                singular += 1;
                gaussian(&mut rng, 2, 1) * gaussian(&mut rng, 1, 2)
            } else {
                gaussian(&mut rng, 2, 2)
            };
            let filtered = lift_filtered(ch, &k).unwrap().normalized().unwrap();
            let (src, tgt) = oracle_reductions(&filtered);
            let (src, tgt) = if *dir == Direction::EveToBob { (src, tgt) } else { (tgt, src) };
            let oracle = (oracle_local(cert.ops(), &src, 2) - tgt).norm();
            worst = worst.max(oracle).max(verify_channel(&cert, &filtered, *dir).unwrap());
        }
    }

    let dep = depolarizing(0.1).unwrap();
    let mut feasible = 0;
    let mut stages = Vec::new();
    let mut max_cond = 0.0f64;
    let mut tried = 0;
    while tried < 20 {
        let w = gaussian(&mut rng, 2, 2);
        let cond = channel::condition_number(&w).unwrap();
        if cond > channel::COND_TOL {
            continue;
        }
        tried += 1;
        max_cond = max_cond.max(cond);
        let out = decide(&lift_filtered(&dep, &w).unwrap(), Direction::EveToBob, &config).unwrap();
        if out.is_verified_feasible() {
            feasible += 1;
        }
        stages.push(match (out.status, out.stage) {
            (Status::RuledOut, Stage::Filter) => "filter",
            (Status::RuledOut, _) => "other proof",
            (Status::Inconclusive, _) => "inconclusive",
            (Status::Feasible, _) => "feasible",
        });
    }
    stages.sort();
    stages.dedup();
    Outcome {
        pass: missing.is_empty() && worst <= VERIFY_TOL && feasible == 0,
        detail: format!(
            "lift certificates for 4 channel/direction pairs on 20 filtered inputs each ({singular} rank-one filters): \
             max residual {worst:.1e} (tol {VERIFY_TOL:e}){}; depolarizing 0.1 through 20 invertible W (max cond {max_cond:.1}): \
             {feasible} verified-Feasible, outcomes {}",
            if missing.is_empty() { String::new() } else { format!(", no certificate for {}", missing.join(", ")) },
            stages.join(", ")
        ),
    }
}

fn main() {
    let results = [
        check("1 example2 fixture golden", Duration::from_secs(1), example2_golden),
        check("2 two-way condition", Duration::from_secs(5), two_way),
        check("3 depolarizing threshold", Duration::from_secs(10), depolarizing_threshold),
        check("4 contractivity", Duration::from_secs(30), contractivity),
        check("5 counterexample regression", Duration::from_secs(60), counterexample),
        check("6 rank-one / solver agreement", Duration::from_secs(120), oracle_agreement),
        check("7 filtered inputs", Duration::from_secs(120), filtered_channel_inputs),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
