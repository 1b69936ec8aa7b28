//! Acceptance criteria, one test each. Every test writes a single
//! `criterion N: PASS|FAIL` line straight to stdout so the summary shows up
//! even when libtest captures output.

use std::io::Write as _;
use std::time::{Duration, Instant};

use nilrig::joinings::{
    analyze, counterexample_joining, diagonal_joining, fiber_reference, graph_joining, graphness, marginal_error,
    tt_drift, weakstar_dist, AnalysisConfig, Classification, GraphnessConfig, PointMap, Provenance,
    TestFunctionFamily,
};
use nilrig::nilgroup::{circle_dist, GroupElement, NilPoint, Space};
use nilrig::rigidity::{default_catalog, rigidity_sweep, subnil_diameter, SubnilKind, SweepConfig};
use nilrig::seminorms::{u1, uk_cube, uk_recursive, CostGuard, SeminormEstimate};
use nilrig::systems::{default_shear, haar_integral, project_torus_factor, vertical_average, vertical_rotate};
use nilrig::{haar_sample, heis_inv, heis_mul, reduce, MetricConfig, NilSystem, Observable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smallest `dist_to_diagonal` seen for the default counterexample at the
/// reference run (n = 10⁵, seed 0, direct sampling), rounded down.
const DELTA_HAT_BASELINE: f64 = 0.320;

struct Checks {
    id: &'static str,
    start: Instant,
    limit: Duration,
    items: Vec<(String, bool)>,
}

impl Checks {
    fn new(id: &'static str, limit_s: u64) -> Self {
        Self {
            id,
            start: Instant::now(),
            limit: Duration::from_secs(limit_s),
            items: Vec::new(),
        }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.items.push((label.into(), ok));
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        self.check(
            format!("runtime {:.1}s <= {}s", elapsed.as_secs_f64(), self.limit.as_secs()),
            elapsed <= self.limit,
        );
        let pass = self.items.iter().all(|(_, ok)| *ok);
        let failed: Vec<&str> = self.items.iter().filter(|(_, ok)| !ok).map(|(l, _)| l.as_str()).collect();
        let line = if pass {
            format!("criterion {}: PASS ({} checks)\n", self.id, self.items.len())
        } else {
            format!("criterion {}: FAIL [{}]\n", self.id, failed.join("; "))
        };
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(line.as_bytes());
        for (label, ok) in &self.items {
            let _ = writeln!(out, "    {} {}", if *ok { "ok  " } else { "FAIL" }, label);
        }
        let _ = out.flush();
        assert!(pass, "criterion {} failed: {:?}", self.id, failed);
    }
}

/// Distance of `a⁻¹ b` from the lattice: zero exactly when `a` and `b`
/// name the same coset.
fn coset_gap(space: Space, a: GroupElement, b: GroupElement) -> f64 {
    let w = space.mul(space.inv(a), b);
    w.to_array()[..space.dim()].iter().map(|v| (v - v.round()).abs()).fold(0.0, f64::max)
}

fn random_element(rng: &mut ChaCha8Rng, r: f64) -> GroupElement {
    GroupElement::new(rng.random_range(-r..r), rng.random_range(-r..r), rng.random_range(-r..r))
}

#[test]
fn criterion_1_group_algebra() {
    let mut c = Checks::new("1", 5);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100_000;
    let tol = 1e-9;
    let (mut assoc, mut inverse, mut idem, mut coset, mut lattice) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut resampled = 0;
    for _ in 0..n {
        let (g, h, k) = (random_element(&mut rng, 10.0), random_element(&mut rng, 10.0), random_element(&mut rng, 10.0));
        let lhs = heis_mul(heis_mul(g, h), k);
        let rhs = heis_mul(g, heis_mul(h, k));
        assoc = assoc.max(lhs.max_abs_diff(&rhs) / (1.0 + lhs.z.abs()));
        inverse = inverse.max(heis_mul(g, heis_inv(g)).max_abs_diff(&GroupElement::IDENTITY));
        inverse = inverse.max(heis_mul(heis_inv(g), g).max_abs_diff(&GroupElement::IDENTITY));

        // Points within tol of a cell wall may legitimately reduce to either side.
        let mut g = g;
        let mut p = reduce(g);
        while p.boundary_margin() < tol {
            g = random_element(&mut rng, 10.0);
            p = reduce(g);
            resampled += 1;
        }
        let again = reduce(p.lift());
        idem = idem.max(p.lift().max_abs_diff(&again.lift()));
        lattice = lattice.max(coset_gap(Space::Heisenberg, g, p.lift()));

        let gamma = GroupElement::new(
            rng.random_range(-5..=5) as f64,
            rng.random_range(-5..=5) as f64,
            rng.random_range(-5..=5) as f64,
        );
        let q = reduce(heis_mul(g, gamma));
        coset = coset.max(p.lift().max_abs_diff(&q.lift()));
    }
    c.check(format!("associativity {assoc:.1e}"), assoc <= tol);
    c.check(format!("inverse {inverse:.1e}"), inverse <= tol);
    c.check(format!("reduction idempotent {idem:.1e}"), idem <= tol);
    c.check(format!("reduction stays in the coset {lattice:.1e}"), lattice <= tol);
    c.check(format!("coset invariance {coset:.1e} ({resampled} resampled)"), coset <= tol);
    c.finish();
}

fn heisenberg_battery() -> Vec<Observable> {
    vec![
        Observable::constant(1.0.into()),
        Observable::character(&[1, 0, 0]),
        Observable::character(&[0, 1, 0]),
        Observable::vertical_character(),
        Observable::bump(),
    ]
}

#[test]
fn criterion_2_equidistribution() {
    let mut c = Checks::new("2", 30);
    let torus = NilSystem::torus_default(1).unwrap();
    let a = torus.birkhoff_avg(&Observable::character(&[1]), &torus.base_point(), 100_000).norm();
    c.check(format!("circle |avg e(x)| = {a:.2e} <= 0.01"), a <= 0.01);

    let heis = NilSystem::heisenberg_default();
    let e = heis.base_point();
    let ax = heis.birkhoff_avg(&Observable::character(&[1, 0, 0]), &e, 1_000_000).norm();
    let ay = heis.birkhoff_avg(&Observable::character(&[0, 1, 0]), &e, 1_000_000).norm();
    c.check(format!("heisenberg |avg e(x)| = {ax:.2e} <= 0.02"), ax <= 0.02);
    c.check(format!("heisenberg |avg e(y)| = {ay:.2e} <= 0.02"), ay <= 0.02);

    for f in heisenberg_battery() {
        let b = heis.birkhoff_avg(&f, &e, 100_000);
        let (h, _) = haar_integral(Space::Heisenberg, &f, 100_000, 5);
        let gap = (b - h).norm();
        c.check(format!("birkhoff vs haar {} gap {gap:.2e} <= 0.02", f.id()), gap <= 0.02);
    }
    c.finish();
}

fn overlap(a: &SeminormEstimate, b: &SeminormEstimate) -> bool {
    (a.value - b.value).abs() <= a.stability + b.stability
}

#[test]
fn criterion_3_seminorms() {
    let mut c = Checks::new("3", 180);
    let guard = CostGuard::default();
    let circle = NilSystem::torus_default(1).unwrap();
    let ex = Observable::character(&[1]);

    let a = u1(&circle, &ex, 100_000).unwrap();
    c.check(format!("circle U1 e(x) = {:.2e} <= 0.01", a.value), a.value <= 0.01);

    let rec = uk_recursive(&circle, &ex, 2, 1000, 100_000, &guard).unwrap();
    let cube = uk_cube(&circle, &ex, 2, 512, 256, 0, &guard).unwrap();
    for (name, e) in [("recursive", &rec), ("cube", &cube)] {
        c.check(
            format!("circle U2 e(x) {name} = {:.4} in [0.95, 1.02]", e.value),
            (0.95..=1.02).contains(&e.value),
        );
    }
    c.check(
        format!(
            "circle U2 bars overlap: {:.4}±{:.4} vs {:.4}±{:.4}",
            rec.value, rec.stability, cube.value, cube.stability
        ),
        overlap(&rec, &cube),
    );

    let heis = NilSystem::heisenberg_default();
    let vchar = Observable::vertical_character();
    let sides = [32, 64, 128];
    let vals: Vec<f64> = sides
        .iter()
        .map(|&n| uk_cube(&heis, &vchar, 2, n, 256, 0, &guard).unwrap().value)
        .collect();
    c.check(
        format!("heisenberg U2 e(z) at n_side {sides:?} = {vals:.4?}, all <= 0.1"),
        vals.iter().all(|v| *v <= 0.1),
    );
    c.check(
        format!("heisenberg U2 e(z) strictly decreasing in n_side: {vals:.4?}"),
        vals.windows(2).all(|w| w[1] < w[0]),
    );

    let t3 = Instant::now();
    let u3: Vec<f64> = (0..5)
        .map(|seed| uk_cube(&heis, &vchar, 3, 64, 200, seed, &guard).unwrap().value)
        .collect();
    let mean = u3.iter().sum::<f64>() / u3.len() as f64;
    let spread = u3.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - u3.iter().cloned().fold(f64::INFINITY, f64::min);
    c.check(format!("heisenberg U3 e(z) over 5 seeds {u3:.4?} positive"), u3.iter().all(|v| *v > 0.0));
    c.check(
        format!("heisenberg U3 relative spread {:.3} <= 0.10", spread / mean),
        spread <= 0.1 * mean,
    );
    c.check(
        format!("U3 runs took {:.1}s", t3.elapsed().as_secs_f64()),
        t3.elapsed() <= Duration::from_secs(180),
    );
    c.finish();
}

#[test]
fn criterion_4_counterexample() {
    let mut c = Checks::new("4", 60);
    let heis = NilSystem::heisenberg_default();
    let s = default_shear();
    let n = 100_000;
    let fam = TestFunctionFamily::default();
    let cx = counterexample_joining(&heis, s, n, Provenance::DirectHaar, 0).unwrap();
    let cx_orbit = counterexample_joining(&heis, s, n, Provenance::OrbitPushforward, 0).unwrap();
    let diag = diagonal_joining(&heis, n, Provenance::DirectHaar, 0).unwrap();

    for which in [1, 2] {
        let m = marginal_error(&cx, which, &fam, n).unwrap();
        c.check(format!("marginal {which} error {m:.4} <= 0.02"), m <= 0.02);
    }
    let drift = tt_drift(&cx_orbit, &heis, &fam).unwrap();
    c.check(format!("T x T drift {drift:.1e} <= 0.02"), drift <= 0.02);
    let schemes = weakstar_dist(&cx, &cx_orbit, &fam).unwrap();
    c.check(format!("direct vs orbit scheme {schemes:.1e} <= 0.02"), schemes <= 0.02);

    let metric = heis.metric;
    let cw = fiber_reference(Space::Heisenberg, &metric);
    let g = graphness(&cx, &GraphnessConfig::default(), &metric).unwrap();
    c.check(format!("graphness {g:.4} >= 0.8 * {cw:.4}"), g >= 0.8 * cw);
    let d = weakstar_dist(&cx, &diag, &fam).unwrap();
    c.check(format!("dist to diagonal {d:.4} >= {DELTA_HAT_BASELINE}"), d >= DELTA_HAT_BASELINE);
    c.finish();
}

#[test]
fn criterion_5_vertical_rotation_family() {
    let mut c = Checks::new("5", 60);
    let heis = NilSystem::heisenberg_default();
    let n = 100_000;
    let cfg = AnalysisConfig::standard(&heis, n);
    let diag = diagonal_joining(&heis, n, Provenance::DirectHaar, 0).unwrap();
    let diag1 = diagonal_joining(&heis, n, Provenance::DirectHaar, 1).unwrap();
    let noise = weakstar_dist(&diag, &diag1, &cfg.family).unwrap();

    let mut dists = Vec::new();
    for k in 1..=8 {
        let u = 0.5f64.powi(k);
        let m = graph_joining(&heis, PointMap::VerticalRotation(u), n, Provenance::DirectHaar, 0).unwrap();
        let r = analyze(&m, &diag, &heis.metric, &cfg).unwrap();
        c.check(
            format!("u = 2^-{k}: graphness {:?} graph-like", r.graphness.map(|g| (g * 1e6).round() / 1e6)),
            r.classification == Classification::GraphLike,
        );
        dists.push(r.dist_to_diagonal);
    }
    c.check(
        format!("distances {dists:.4?} decrease within noise {noise:.1e}"),
        dists.windows(2).all(|w| w[1] <= w[0] + noise),
    );
    c.check(
        format!("d(2^-8) = {:.4} <= 0.25 * d(2^-1) = {:.4}", dists[7], 0.25 * dists[0]),
        dists[7] <= 0.25 * dists[0],
    );
    c.finish();
}

#[test]
fn criterion_6_default_sweep() {
    let mut c = Checks::new("6", 120);
    let heis = NilSystem::heisenberg_default();
    let r = rigidity_sweep(&heis, &SweepConfig::standard(&heis)).unwrap();
    c.check("every joining classified", r.all_classified);
    c.check(
        format!(
            "delta_hat {:?} > max graph dist {:?} for u <= {}",
            r.delta_hat, r.max_graph_dist, r.u_star
        ),
        r.separated && r.margin.is_some_and(|m| m > 0.0),
    );
    c.check(
        format!("margin {:?} >= 2 * noise {:.2e}", r.margin, r.noise),
        r.margin.is_some_and(|m| m >= 2.0 * r.noise),
    );
    c.finish();
}

#[test]
fn criterion_7_subnilmanifold_diameters() {
    let mut c = Checks::new("7", 30);
    let metric = MetricConfig::default();
    let catalog = default_catalog(1000, 10, 0);
    let diams: Vec<f64> = catalog.iter().map(|d| subnil_diameter(d, &metric, 0).unwrap()).collect();
    let min = diams.iter().cloned().fold(f64::INFINITY, f64::min);
    c.check(format!("min diameter over {} descriptors {min:.4} >= 0.2", catalog.len()), min >= 0.2);

    let central = diams[0];
    let worst = catalog
        .iter()
        .zip(&diams)
        .filter(|(d, _)| matches!(d.kind, SubnilKind::TranslatedCentralFiber { .. }))
        .map(|(_, v)| (v - central).abs() / central)
        .fold(0.0, f64::max);
    c.check(format!("translated fibers within {:.2}% of {central:.4}", worst * 100.0), worst <= 0.01);

    let single = nilrig::rigidity::SubnilDescriptor::singleton(NilPoint::heisenberg(0.3, 0.6, 0.1).unwrap());
    let d0 = subnil_diameter(&single, &metric, 0).unwrap();
    c.check(format!("singleton diameter {d0}"), d0 == 0.0);
    c.finish();
}

#[test]
fn criterion_8_equivariance() {
    let mut c = Checks::new("8", 5);
    let heis = NilSystem::heisenberg_default();
    let factor = heis.factor_rotation().unwrap();
    let pts = haar_sample(Space::Heisenberg, 10_000, 21);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let (mut pt, mut vt, mut pv, mut avg) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let vchar = Observable::vertical_character();
    for p in &pts {
        let u: f64 = rng.random();
        let tp = heis.nilrotate(p);
        let lhs = project_torus_factor(&tp).unwrap();
        let rhs = factor.nilrotate(&project_torus_factor(p).unwrap());
        pt = pt.max(circle_dist(lhs.x(), rhs.x()).max(circle_dist(lhs.y(), rhs.y())));

        let a = vertical_rotate(&tp, u);
        let b = heis.nilrotate(&vertical_rotate(p, u));
        vt = vt.max(coset_gap(Space::Heisenberg, a.lift(), b.lift()));

        let q = project_torus_factor(&vertical_rotate(p, u)).unwrap();
        let r = project_torus_factor(p).unwrap();
        pv = pv.max(circle_dist(q.x(), r.x()).max(circle_dist(q.y(), r.y())));

        avg = avg.max(vertical_average(&vchar, p, 16).norm());
    }
    c.check(format!("p T = S p: {pt:.1e} <= 1e-9"), pt <= 1e-9);
    c.check(format!("V_u T = T V_u: {vt:.1e} <= 1e-9"), vt <= 1e-9);
    c.check(format!("p V_u = p: {pv:.1e} <= 1e-9"), pv <= 1e-9);
    c.check(format!("vertical average of e(z) on 16 points {avg:.1e} <= 1e-10"), avg <= 1e-10);
    c.finish();
}

#[test]
fn criterion_9_reproducibility_and_abelian_battery() {
    let mut c = Checks::new("9", 120);
    let heis = NilSystem::heisenberg_default();
    let mut cfg = SweepConfig::standard(&heis);
    cfg.n = 20_000;
    cfg.analysis = AnalysisConfig::standard(&heis, 20_000);
    cfg.seed = 7;
    let first = serde_json::to_string(&rigidity_sweep(&heis, &cfg).unwrap()).unwrap();
    let second = serde_json::to_string(&rigidity_sweep(&heis, &cfg).unwrap()).unwrap();
    c.check("sweep rerun is byte-identical", first == second);

    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let threaded = pool.install(|| serde_json::to_string(&rigidity_sweep(&heis, &cfg).unwrap()).unwrap());
        c.check("sweep on a 3-thread pool is byte-identical", first == threaded);
    }

    let report: nilrig::rigidity::RigidityReport = serde_json::from_str(&first).unwrap();
    let back = serde_json::to_string(&report).unwrap();
    c.check("report JSON round trip is lossless", back == first);
    let sys_json = serde_json::to_string(&heis).unwrap();
    let sys_back: NilSystem = serde_json::from_str(&sys_json).unwrap();
    c.check("system JSON round trip is lossless", sys_back == heis);

    let torus = NilSystem::torus_default(2).unwrap();
    let n = 100_000;
    let acfg = AnalysisConfig::standard(&torus, n);
    let diag = diagonal_joining(&torus, n, Provenance::OrbitPushforward, 0).unwrap();
    for (v1, v2) in [(0.5f64.sqrt(), 1.0 / 3.0), (0.25, 0.75), (0.1, 0.0), (0.0, 0.9), (0.618, 0.382)] {
        let v = GroupElement::new(v1, v2, 0.0);
        let m = graph_joining(&torus, PointMap::Translation(v), n, Provenance::OrbitPushforward, 0).unwrap();
        let r = analyze(&m, &diag, &torus.metric, &acfg).unwrap();
        c.check(
            format!("torus translation ({v1:.3}, {v2:.3}) graphness {:?}", r.graphness),
            r.classification == Classification::GraphLike,
        );
    }
    c.finish();
}
