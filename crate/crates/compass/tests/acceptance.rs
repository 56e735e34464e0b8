//! Acceptance suite. Each criterion prints one line with its verdict,
//! the measured quantities and the elapsed time. Lines go straight to
//! stderr so they show up without `--nocapture`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use compass_core::finite_metric::{certify_curvature, validate_metric, GateFailure};
use compass_core::gromov_hausdorff::{gh_distance_exact, invert_approximation, PointMap, DEFAULT_SIZE_LIMIT};
use compass_core::jacobi_riccati::{compare_riccati, rauch_ratio, CurvatureProfile, RauchKind, RiccatiInit, SolverOptions};
use compass_core::lattice_short_basis::{count_vs_bound, filtration_check, short_basis, Lattice};
use compass_core::model_space::{self, Hinge};
use compass_core::semiconcave_flow::{
    busemann_eval, contraction_report, gradient, petrunin_report, Branch, PiecewiseMinFunction, Ray,
};
use compass_core::volume_comparison::{
    annulus_bound, bg_monotonicity_report, model_ball_volume, packing_multiplicity_bound, short_basis_bound, EmpiricalVolumeCurve,
    ShortBasisRegime,
};
use compass_core::{Curvature, DistanceMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

fn say(line: &str) {
    let mut e = std::io::stderr().lock();
    let _ = writeln!(e, "{line}");
}

fn criterion(id: u32, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let ok = o.ok && elapsed < limit;
    say(&format!(
        "[{}] criterion {id:>2} {name}: {} ({:.3} s, limit {} s)",
        if ok { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    ));
    ok
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn matrix(points: &[Vec<f64>], d: impl Fn(&[f64], &[f64]) -> f64) -> DistanceMatrix {
    let rows: Vec<Vec<f64>> =
        points.iter().enumerate().map(|(i, p)| points.iter().enumerate().map(|(j, q)| if i == j { 0.0 } else { d(p, q) }).collect()).collect();
    validate_metric(Vec::new(), &rows).unwrap()
}

fn euclid(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn sphere_dist(p: &[f64], q: &[f64]) -> f64 {
    let c = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
    euclid(&c, &[0.0; 3]).atan2(p[0] * q[0] + p[1] * q[1] + p[2] * q[2])
}

fn hyperbolic_dist(p: &[f64], q: &[f64]) -> f64 {
    let d: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    2.0 * (0.5 * (d[1] * d[1] + d[2] * d[2] - d[0] * d[0]).max(0.0).sqrt()).asinh()
}

// 1 ------------------------------------------------------------------------

fn trig_identities() -> Outcome {
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for kv in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let k = Curvature(kv);
        // no conjugate point for κ ≤ 0; sample up to t = 3 there
        let top = 0.95 * model_space::model_diameter(k).min(3.0 / 0.95);
        for i in 0..=400 {
            let t = 0.05 + (top - 0.05) * i as f64 / 400.0;
            let d = |f: &dyn Fn(f64) -> f64| (f(t + h) - f(t - h)) / (2.0 * h);
            let sn = |x| model_space::sn(k, x);
            let cs = |x| model_space::cs(k, x);
            let ct = |x| model_space::ct(k, x);
            let r1 = (d(&sn) - cs(t)).abs();
            let r2 = (d(&cs) + kv * sn(t)).abs();
            let r3 = (d(&ct) + ct(t) * ct(t) + kv).abs();
            worst = worst.max(r1).max(r2).max(r3);
        }
    }
    outcome(worst <= 1e-5, format!("max finite-difference residual {worst:.2e} <= 1e-5"))
}

// 2 ------------------------------------------------------------------------

fn cosine_law_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for kv in [-1.0, 0.0, 1.0] {
        let k = Curvature(kv);
        let side_max = if kv > 0.0 { 0.5 * PI } else { 3.0 };
        for _ in 0..10_000 {
            let angle = rng.gen_range(0.05..PI - 0.05);
            let b = rng.gen_range(0.05..side_max);
            let c = rng.gen_range(0.05..side_max);
            let a = model_space::model_side(k, Hinge::new(angle, b, c)).unwrap();
            let back = model_space::model_angle(k, a, b, c).unwrap();
            worst = worst.max((back - angle).abs());
        }
    }
    let mut gap: f64 = 0.0;
    for (a, b, c) in [(1.0, 1.0, 1.0), (0.3, 1.2, 1.4), (2.0, 1.5, 0.9), (0.01, 0.02, 0.025)] {
        let flat = model_space::model_angle(Curvature(0.0), a, b, c).unwrap();
        for kv in [-1e-6, 1e-6] {
            gap = gap.max((model_space::model_angle(Curvature(kv), a, b, c).unwrap() - flat).abs());
        }
    }
    outcome(
        worst <= 1e-9 && gap <= 1e-5,
        format!("30000 hinges, max angle error {worst:.2e} <= 1e-9; flat-limit gap {gap:.2e} <= 1e-5"),
    )
}

// 3 ------------------------------------------------------------------------

fn riccati_rauch() -> Outcome {
    let opts = SolverOptions { tolerance: 0.0, ..SolverOptions::default() };
    let top = PI - 0.01;
    let cmp = compare_riccati(
        &CurvatureProfile::constant(1.0, top),
        &CurvatureProfile::constant(0.0, top),
        RiccatiInit::PoleAtZero,
        RiccatiInit::PoleAtZero,
        1e-3,
        &opts,
    )
    .unwrap();
    // worst is max(cot t − 1/t) over the grid, so the margin is −worst
    let cot_ok = cmp.passed;
    let sinc = rauch_ratio(&CurvatureProfile::constant(1.0, top), Curvature(0.0), RauchKind::RauchI, 1e-4, 1e-10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ordered = 0;
    for _ in 0..100 {
        let base: f64 = rng.gen_range(0.25..2.0);
        let (amp, freq, phase) = (rng.gen_range(0.0..1.5), rng.gen_range(0.3..5.0), rng.gen_range(0.0..6.3));
        let horizon = PI / base.sqrt() + 0.05;
        let p = CurvatureProfile::from_fn(move |t: f64| base + amp * (1.0 + (freq * t + phase).sin()), horizon);
        let run = rauch_ratio(&p, Curvature(base), RauchKind::RauchI, 1e-3, 1e-9).unwrap();
        if let (Some(z), Some(m)) = (run.first_zero, run.model_first_zero) {
            if run.report.passed && z <= m + 1e-9 {
                ordered += 1;
            }
        }
    }
    outcome(
        cot_ok && sinc.report.passed && ordered == 100,
        format!(
            "cot t - 1/t <= {:.3e} on [{:.0e}, pi - 0.01]; largest upward step of sin t/t {:.2e} <= 1e-10; first-zero order {ordered}/100",
            cmp.worst, 1e-3, sinc.report.worst
        ),
    )
}

// 4 ------------------------------------------------------------------------

fn four_point_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let plane: Vec<Vec<f64>> = (0..20).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    let sphere: Vec<Vec<f64>> = (0..20)
        .map(|_| {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..2.0 * PI);
            let s = (1.0 - z * z).sqrt();
            vec![s * phi.cos(), s * phi.sin(), z]
        })
        .collect();
    let hyp: Vec<Vec<f64>> = (0..20)
        .map(|_| {
            let r: f64 = rng.gen_range(0.0..2.0);
            let phi: f64 = rng.gen_range(0.0..2.0 * PI);
            vec![r.cosh(), r.sinh() * phi.cos(), r.sinh() * phi.sin()]
        })
        .collect();
    let cases = [
        ("R2", 0.0, matrix(&plane, euclid)),
        ("S2", 1.0, matrix(&sphere, sphere_dist)),
        ("H2", -1.0, matrix(&hyp, hyperbolic_dist)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, k, m) in &cases {
        let rep = certify_curvature(Curvature(*k), m, 1e-9);
        ok &= rep.passed() && rep.gate.is_none();
        parts.push(format!("{name} {} violations/{} quadruples ({} skipped)", rep.violations.len(), rep.checked, rep.skipped.len()));
    }
    let tripod = validate_metric(
        Vec::new(),
        &[vec![0.0, 1.0, 1.0, 1.0], vec![1.0, 0.0, 2.0, 2.0], vec![1.0, 2.0, 0.0, 2.0], vec![1.0, 2.0, 2.0, 0.0]],
    )
    .unwrap();
    let rep = certify_curvature(Curvature(0.0), &tripod, 1e-9);
    let defect = rep.violations.first().map(|v| v.1).unwrap_or(f64::NAN);
    ok &= (defect - PI).abs() <= 1e-12;
    parts.push(format!("tripod defect pi{:+.1e}", defect - PI));
    outcome(ok, parts.join("; "))
}

// 5 ------------------------------------------------------------------------

/// All metrics on `n` labeled points with entries in {1, 2, 3}, one per
/// isometry class.
fn small_spaces(n: usize) -> Vec<DistanceMatrix> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for code in 0..3usize.pow(pairs.len() as u32) {
        let mut d = vec![vec![0u8; n]; n];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let v = (code / 3usize.pow(k as u32) % 3 + 1) as u8;
            d[i][j] = v;
            d[j][i] = v;
        }
        let metric = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| i == j || d[i][j] <= d[i][k] + d[k][j] || k == i || k == j)));
        if !metric {
            continue;
        }
        let canon = perms.iter().map(|p| pairs.iter().map(|&(i, j)| d[p[i]][p[j]]).collect::<Vec<u8>>()).min().unwrap();
        if seen.insert(canon) {
            let rows: Vec<Vec<f64>> = d.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            out.push(validate_metric(Vec::new(), &rows).unwrap());
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn gh_machinery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let point = validate_metric(Vec::new(), &[vec![0.0]]).unwrap();
    let mut half_diam_ok = true;
    for n in 1..=DEFAULT_SIZE_LIMIT {
        for _ in 0..20 {
            let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]).collect();
            let x = matrix(&pts, euclid);
            let b = gh_distance_exact(&x, &point, DEFAULT_SIZE_LIMIT).unwrap();
            half_diam_ok &= b.lower == 0.5 * x.diameter() && b.upper == 0.5 * x.diameter();
        }
    }
    let two = |d: f64| validate_metric(Vec::new(), &[vec![0.0, d], vec![d, 0.0]]).unwrap();
    let pair = gh_distance_exact(&two(1.0), &two(3.0), DEFAULT_SIZE_LIMIT).unwrap();
    let pair_ok = pair.lower == 1.0 && pair.upper == 1.0;

    let mut spaces = small_spaces(3);
    spaces.extend(small_spaces(4));
    let s = spaces.len();
    let mut table = vec![vec![0.0; s]; s];
    for i in 0..s {
        for j in i + 1..s {
            let d = gh_distance_exact(&spaces[i], &spaces[j], DEFAULT_SIZE_LIMIT).unwrap().upper;
            table[i][j] = d;
            table[j][i] = d;
        }
    }
    let mut worst = f64::NEG_INFINITY;
    for x in 0..s {
        for y in 0..s {
            for z in 0..s {
                worst = worst.max(table[x][z] - table[x][y] - table[y][z]);
            }
        }
    }

    let mut inverted = 0;
    for trial in 0..1000 {
        let nx = rng.gen_range(2..12);
        let ny = rng.gen_range(2..10);
        let xp: Vec<Vec<f64>> = (0..nx).map(|_| vec![rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)]).collect();
        // every other trial uses a perturbed copy so that ε is small
        let yp: Vec<Vec<f64>> = if trial % 2 == 0 {
            xp.iter().map(|p| vec![p[0] + rng.gen_range(-0.05..0.05), p[1] + rng.gen_range(-0.05..0.05)]).collect()
        } else {
            (0..ny).map(|_| vec![rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)]).collect()
        };
        let (x, y) = (matrix(&xp, euclid), matrix(&yp, euclid));
        let assignment: Vec<usize> =
            if trial % 2 == 0 { (0..x.len()).collect() } else { (0..x.len()).map(|_| rng.gen_range(0..y.len())).collect() };
        let f = PointMap::new(&x, &y, assignment).unwrap();
        let eps = f.distortion().0.max(f.density().0);
        if invert_approximation(&f, eps).map(|inv| inv.report.passed).unwrap_or(false) {
            inverted += 1;
        }
    }
    outcome(
        half_diam_ok && pair_ok && worst <= 1e-12 && inverted == 1000,
        format!(
            "point vs X = diam/2 exact: {half_diam_ok}; d=1 vs d=3 gives {}; triangle inequality over {s} classes ({} triples), worst excess {worst:.1e}; inversion at 7 eps {inverted}/1000",
            pair.upper,
            s * s * s
        ),
    )
}

// 6 ------------------------------------------------------------------------

fn volume_constants() -> Outcome {
    let mut worst: f64 = 0.0;
    for r in [0.05, 0.3, 1.0, 1.7, 2.5, 3.0] {
        let v = |n, k: f64| model_ball_volume(n, Curvature(k), r).unwrap();
        let expected = [
            (1, -1.0, 2.0 * r),
            (1, 0.0, 2.0 * r),
            (1, 1.0, 2.0 * r),
            (2, -1.0, 2.0 * PI * (r.cosh() - 1.0)),
            (2, 0.0, PI * r * r),
            (2, 1.0, 2.0 * PI * (1.0 - r.cos())),
            (3, -1.0, PI * ((2.0 * r).sinh() - 2.0 * r)),
            (3, 0.0, 4.0 / 3.0 * PI * r.powi(3)),
            (3, 1.0, PI * (2.0 * r - (2.0 * r).sin())),
        ];
        for (n, k, e) in expected {
            worst = worst.max(rel(v(n, k), e));
        }
    }
    let c2 = short_basis_bound(2, ShortBasisRegime::Nonnegative).unwrap();
    let l2 = packing_multiplicity_bound(2).unwrap();
    let l2_err = rel(l2, (3f64.cosh() - 1.0) / (0.5f64.cosh() - 1.0));
    let mut annulus_ok = true;
    for i in 1..1000 {
        let eps = i as f64 / 1000.0;
        let (bound, exact) = annulus_bound(2, eps).unwrap();
        annulus_ok &= rel(exact, 4.0 * PI * eps.sin()) <= 1e-10 && exact <= bound && rel(bound, 4.0 * PI * eps) <= 1e-14;
    }
    let radii: Vec<f64> = (1..=1000).map(|i| 3.0 * i as f64 / 1000.0).collect();
    let mut bg_ok = true;
    for (n, space, model) in [(2, 1.0, 0.0), (2, 0.0, -1.0), (3, 1.0, -1.0), (3, 0.0, -1.0)] {
        let curve = EmpiricalVolumeCurve::model(n, Curvature(space), &radii).unwrap();
        bg_ok &= bg_monotonicity_report(&curve, n, Curvature(model), true, 1e-12).unwrap().passed;
    }
    outcome(
        worst <= 1e-10 && c2 == 6.0 && l2_err <= 1e-10 && annulus_ok && bg_ok,
        format!(
            "closed forms rel err {worst:.1e}; C(2) = {c2}; L(2) = {l2:.6} (rel err {l2_err:.1e}); annulus 4pi sin eps <= 4pi eps: {annulus_ok}; Bishop-Gromov ratio non-increasing: {bg_ok}"
        ),
    )
}

// 7 ------------------------------------------------------------------------

fn short_basis_checks() -> Outcome {
    let z2 = short_basis(&Lattice::integer(2).unwrap());
    let count = count_vs_bound(&z2, 2).unwrap();
    let z2_ok = z2.lengths == [1.0, 1.0] && count.passed;
    let hex = short_basis(&Lattice::hexagonal());
    let v = &hex.vectors;
    let angle = ((v[0][0] * v[1][0] + v[0][1] * v[1][1]) / (hex.lengths[0] * hex.lengths[1])).acos();
    let hex_err = (angle - PI / 3.0).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut lattices = 0;
    let mut passed = 0;
    while lattices < 100 {
        let a: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-6..=6));
        if a[0] * a[3] - a[1] * a[2] == 0 {
            continue;
        }
        lattices += 1;
        let lat = Lattice::new(vec![vec![a[0] as f64, a[1] as f64], vec![a[2] as f64, a[3] as f64]]).unwrap();
        let sb = short_basis(&lat);
        let (l1, l2) = (sb.lengths[0], *sb.lengths.last().unwrap());
        let radii = [0.5 * l1, l1, 0.5 * (l1 + l2), l2, 2.0 * l2];
        if radii.iter().all(|&r| filtration_check(&lat, r).unwrap().passed) {
            passed += 1;
        }
    }
    outcome(
        z2_ok && hex_err <= 1e-12 && passed == 100,
        format!(
            "Z^2 lengths {:?}, count {} <= 6; hexagonal angle pi/3{:+.1e}; filtration G(r) = Gamma(r) on {passed}/100 lattices x 5 radii",
            z2.lengths,
            z2.len(),
            angle - PI / 3.0
        ),
    )
}

// 8 ------------------------------------------------------------------------

fn affine_min(rng: &mut impl Rng, count: usize, max_norm: f64) -> PiecewiseMinFunction {
    let branches = (0..count)
        .map(|_| {
            let a: f64 = rng.gen_range(0.0..2.0 * PI);
            let r: f64 = rng.gen_range(0.1..max_norm);
            Branch::affine(vec![r * a.cos(), r * a.sin()], rng.gen_range(-1.0..1.0))
        })
        .collect();
    PiecewiseMinFunction::new(branches).unwrap()
}

fn concave_mix(rng: &mut impl Rng) -> PiecewiseMinFunction {
    let mut branches = affine_min(rng, 2, 1.5).branches().to_vec();
    for _ in 0..2 {
        let (p, q) = (rng.gen_range(-1.0..-0.05), rng.gen_range(-1.0..-0.05));
        let s = rng.gen_range(-0.04..0.04);
        branches.push(Branch::quadratic(
            vec![vec![p, s], vec![s, q]],
            vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            rng.gen_range(-1.0..1.0),
        ));
    }
    PiecewiseMinFunction::new(branches).unwrap()
}

fn gradients_and_flows() -> Outcome {
    let minxy = PiecewiseMinFunction::new(vec![Branch::affine(vec![1.0, 0.0], 0.0), Branch::affine(vec![0.0, 1.0], 0.0)]).unwrap();
    let diag_ok = [-3.0, -0.5, 0.0, 0.25, 1.0, 7.0].iter().all(|&t| gradient(&minxy, &[t, t]).unwrap() == [0.5, 0.5]);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pt = |rng: &mut ChaCha8Rng| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
    let mut contraction = 0;
    for _ in 0..1000 {
        let f = concave_mix(&mut rng);
        let (p, q) = (pt(&mut rng), pt(&mut rng));
        if contraction_report(&f, &p, &q, 1.0, 0.01).unwrap().passed {
            contraction += 1;
        }
    }
    let mut petrunin = 0;
    for _ in 0..1000 {
        let f = affine_min(&mut rng, 3, 1.0);
        let (p, q) = (pt(&mut rng), pt(&mut rng));
        let (s, t) = (rng.gen_range(0.0..1.5), rng.gen_range(0.0..1.5));
        if petrunin_report(&f, &p, &q, s, t, 0.01).unwrap().passed {
            petrunin += 1;
        }
    }
    let mut equality: f64 = 0.0;
    for _ in 0..100 {
        let a: f64 = rng.gen_range(0.0..2.0 * PI);
        let f = PiecewiseMinFunction::new(vec![Branch::affine(vec![a.cos(), a.sin()], rng.gen_range(-1.0..1.0))]).unwrap();
        let r = petrunin_report(&f, &pt(&mut rng), &pt(&mut rng), rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0), 0.01).unwrap();
        equality = equality.max(r.worst.abs());
    }
    outcome(
        diag_ok && contraction == 1000 && petrunin == 1000 && equality <= 1e-9,
        format!(
            "grad min(x,y) on the diagonal = (1/2, 1/2): {diag_ok}; contraction {contraction}/1000; Petrunin {petrunin}/1000; linear case |lhs - rhs| <= {equality:.1e}"
        ),
    )
}

// 9 ------------------------------------------------------------------------

fn busemann() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut along: f64 = 0.0;
    let mut lipschitz = f64::NEG_INFINITY;
    let mut monotone = true;
    for _ in 0..200 {
        let a: f64 = rng.gen_range(0.0..2.0 * PI);
        let ray = Ray::new(vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)], vec![a.cos(), a.sin()]).unwrap();
        for s in [0.0, 0.5, 3.0, 40.0] {
            let v = busemann_eval(&ray, &ray.at(s), 1e6).unwrap();
            along = along.max((v.value + s).abs() / s.max(1.0));
        }
        let x = vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let y = vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let d = euclid(&x, &y);
        let (bx, by) = (busemann_eval(&ray, &x, 1e5).unwrap(), busemann_eval(&ray, &y, 1e5).unwrap());
        lipschitz = lipschitz.max((bx.value - by.value).abs() - d).max((bx.closed_form - by.closed_form).abs() - d);
        let mut prev = f64::INFINITY;
        for horizon in [1.0, 2.0, 5.0, 10.0, 100.0, 1e3, 1e4, 1e6] {
            let v = busemann_eval(&ray, &x, horizon).unwrap();
            monotone &= v.value <= prev + 1e-12 && v.value >= v.lower - 1e-12;
            prev = v.value;
        }
    }
    outcome(
        along <= 1e-12 && lipschitz <= 1e-12 && monotone,
        format!("along-ray |b + s| <= {along:.1e}; Lipschitz excess {lipschitz:.1e}; bracket monotone in T: {monotone}"),
    )
}

// 10 -----------------------------------------------------------------------

fn myers_gate() -> Outcome {
    // 150 points on a segment of length 4: enumeration would take minutes
    let pts: Vec<Vec<f64>> = (0..150).map(|i| vec![4.0 * i as f64 / 149.0]).collect();
    let m = matrix(&pts, euclid);
    let rep = certify_curvature(Curvature(1.0), &m, 1e-9);
    let gated = matches!(rep.gate, Some(GateFailure::Myers { .. }));
    outcome(gated && rep.checked == 0 && !rep.passed(), format!("gate {:?}, {} quadruples enumerated", rep.gate, rep.checked))
}

// 11 -----------------------------------------------------------------------

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_compass");
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let sample = |seed: &str| run(&["sample", "--space", "sphere", "--n", "20", "--seed", seed]).stdout;
    let first = sample("7");
    let mut same = first == sample("7") && first != sample("8");
    let file = dir.path().join("s.json");
    std::fs::write(&file, &first).unwrap();
    let file = file.to_str().unwrap();
    let reports: Vec<Vec<u8>> = ["1", "1", "3"]
        .iter()
        .map(|t| run(&["certify", "--kappa", "1", "--input", file, "--seed", "7", "--threads", t]).stdout)
        .collect();
    same &= reports.windows(2).all(|w| w[0] == w[1]) && !reports[0].is_empty();

    let mut codes_ok = true;
    let mut corpus = 0;
    for entry in std::fs::read_dir(data.join("malformed")).unwrap() {
        let path = entry.unwrap().path();
        let out = run(&["certify", "--input", path.to_str().unwrap()]);
        codes_ok &= out.status.code() == Some(2) && out.stdout.is_empty();
        corpus += 1;
    }
    let tripod = data.join("tripod.json");
    let cube = data.join("cube.json");
    let expect = [
        (vec!["certify", "--kappa", "0", "--input", tripod.to_str().unwrap()], 1),
        (vec!["certify", "--kappa", "0", "--input", cube.to_str().unwrap()], 0),
        (vec!["certify", "--input", cube.to_str().unwrap(), "--tolerance", "-1"], 2),
        (vec!["certify", "--input", cube.to_str().unwrap(), "--format", "xml"], 2),
        (vec!["model", "--kappa", "1"], 2),
        (vec!["nonsense"], 2),
    ];
    for (args, code) in &expect {
        codes_ok &= run(args).status.code() == Some(*code);
    }
    outcome(
        same && codes_ok,
        format!("byte-identical reports with fixed seed: {same}; exit codes on {corpus} malformed files and {} invocations: {codes_ok}", expect.len()),
    )
}

#[test]
fn acceptance_suite() {
    let s = Duration::from_secs;
    let results = [
        criterion(1, "model trig identities", s(1), trig_identities),
        criterion(2, "cosine-law round trip", s(5), cosine_law_round_trip),
        criterion(3, "Riccati and Rauch comparison", s(10), riccati_rauch),
        criterion(4, "four-point exactness", s(5), four_point_exactness),
        criterion(5, "Gromov-Hausdorff machinery", s(60), gh_machinery),
        criterion(6, "volume constants", s(5), volume_constants),
        criterion(7, "short basis", s(10), short_basis_checks),
        criterion(8, "gradients and flows", s(30), gradients_and_flows),
        criterion(9, "Busemann functions", s(1), busemann),
        criterion(10, "Myers gate", s(1), myers_gate),
        criterion(11, "CLI determinism and exit codes", s(5), cli_determinism),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    say(&format!("acceptance: {passed}/{} criteria passed", results.len()));
    assert_eq!(passed, results.len());
}
