//! Acceptance run: one line per criterion. Exits non-zero if a criterion
//! fails that is not listed in `EXPECTED_UNATTAINABLE`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use darksqueeze::bdg::certify::{certify, CertifyConfig};
use darksqueeze::dynamics::{
    blackness_cases, min_squeeze_curves, monte_carlo_variance, nonlinearity_cases, quadrature_variance,
    quadrature_variance_cov,
};
use darksqueeze::medium::{
    medium_coefficients, region_classify, soliton_velocity, AtomicSystemParams, Region, RegionGrid, RegionThresholds,
};
use darksqueeze::numerics::linspace;
use darksqueeze::oracles::{continuous_phase, propagate_nls, zero_mode_drift, PropagationConfig};
use darksqueeze::soliton::DarkSolitonParams;
use darksqueeze::spin::{spin_curve, SpinModel, SpinOptions};

/// Criteria that cannot be met as stated; they are run and reported anyway.
/// 1: ν and W need incompatible ground-state dephasing at the listed parameters.
/// 3: the printed zero mode is a generalized eigenvector (residual 2/3) and the
///    defective zero eigenvalue splits into two near-zero dense eigenvalues.
const EXPECTED_UNATTAINABLE: [usize; 2] = [1, 3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let el = t.elapsed();
    if el > limit {
        o.pass = false;
        o.detail.push_str(&format!("; runtime {el:.1?} over {limit:.0?}"));
    } else {
        o.detail.push_str(&format!("; {el:.1?}"));
    }
    o
}

fn criterion_1() -> Outcome {
    let m = medium_coefficients(&AtomicSystemParams::paper()).expect("paper parameters");
    let v = soliton_velocity(&m, 1.0, PI / 2.0);
    let items = [
        ("ReK1", m.k1.re, 3.08e-7, 0.02),
        ("ReK2", m.k2.re, 3.19e-15, 0.02),
        ("ReW", m.w.re, 8.20e-17, 0.02),
        ("nu", m.nu, 1.69e-2, 0.05),
        ("Ldisp", m.ldisp, 0.95, 0.02),
        ("Vsol/c", v.fraction_of_c, 1.08e-4, 0.02),
        ("chi3", m.chi3.re, 1.20e-10, 0.15),
    ];
    let mut pass = true;
    let mut parts = vec![];
    for (name, got, want, tol) in items {
        let rel = (got - want) / want;
        let ok = rel.abs() < tol;
        pass &= ok;
        parts.push(format!("{name}={got:.4e}({:+.1}%{})", 100.0 * rel, if ok { "" } else { " FAIL" }));
    }
    Outcome { pass, detail: parts.join(" ") }
}

fn criterion_2() -> Outcome {
    let p = AtomicSystemParams::paper();
    let th = RegionThresholds::default();
    let map = region_classify(&p, &RegionGrid::default(), &th);
    let op = darksqueeze::medium::classify_point(&p, p.delta3, p.delta2, &th).region;
    let (n2, n3) = (map.delta2.len(), map.delta3.len());
    let soliton = |r: Region| matches!(r, Region::DarkSoliton | Region::BrightSoliton);
    let zero_row = map.delta2.iter().position(|&d| d == 0.0);
    let zero_clean = zero_row.is_some_and(|i2| (0..n3).all(|i3| !soliton(map.at(i2, i3).region)));
    let (mut interfaces, mut bad) = (0, 0);
    for i2 in 0..n2 {
        for i3 in 0..n3 {
            let a = map.at(i2, i3);
            for (j2, j3) in [(i2 + 1, i3), (i2, i3 + 1)] {
                if j2 < n2 && j3 < n3 {
                    let b = map.at(j2, j3);
                    if soliton(a.region) && soliton(b.region) && a.region != b.region {
                        interfaces += 1;
                        bad += usize::from(a.sign_ratio * b.sign_ratio >= 0.0);
                    }
                }
            }
        }
    }
    let (ds, bs) = (map.count(Region::DarkSoliton), map.count(Region::BrightSoliton));
    let pass = op == Region::DarkSoliton && zero_clean && ds > 0 && bs > 0 && interfaces > 0 && bad == 0;
    Outcome {
        pass,
        detail: format!(
            "{n2}x{n3} grid, operating point {}, delta2=0 row clean {zero_clean}, DS {ds}, BS {bs}, DS/BS interfaces {interfaces} ({bad} without sign change)",
            op.label()
        ),
    }
}

fn criterion_3() -> Outcome {
    let report = certify(&CertifyConfig::default()).expect("certification runs");
    let failed: Vec<String> = report.failures().map(|r| format!("{}={:.3e}", r.check, r.value)).collect();
    Outcome {
        pass: failed.is_empty(),
        detail: format!("{} checks, {} failed: {}", report.records.len(), failed.len(), failed.join(", ")),
    }
}

fn criterion_4() -> Outcome {
    let c0 = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0).prefactor();
    let thetas = linspace(0.0, 2.0 * PI, 201);
    let ss = linspace(0.0, 1.0, 101);
    let vac = thetas.iter().map(|&t| (quadrature_variance(c0, t, 0.0) - 0.5).abs()).fold(0.0, f64::max);
    let half = ss.iter().map(|&s| (quadrature_variance(c0, PI / 2.0, s) - 0.5).abs()).fold(0.0, f64::max);
    let mut two_path: f64 = 0.0;
    for &s in &ss {
        for &t in &thetas {
            two_path = two_path.max((quadrature_variance(c0, t, s) - quadrature_variance_cov(c0, t, s)).abs());
        }
    }
    let points = [(0.6, 2.0 * PI / 5.0), (0.3, PI / 5.0), (0.9, 3.0 * PI / 5.0), (0.5, 4.0 * PI / 5.0), (1.0, 0.1)];
    let zs: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(i, &(s, t))| {
            let mc = monte_carlo_variance(c0, t, s, 1_000_000, 20240521 + i as u64);
            (mc.variance - quadrature_variance(c0, t, s)) / mc.variance_std_error
        })
        .collect();
    let by_theta = min_squeeze_curves(&ss, &blackness_cases());
    let by_g = min_squeeze_curves(&ss, &nonlinearity_cases());
    let mut theta_order = true;
    let mut g_order = true;
    for i in 1..ss.len() {
        theta_order &= by_theta.windows(2).all(|w| w[0].r_min[i] < w[1].r_min[i]);
        g_order &= by_g.windows(2).all(|w| w[1].r_min[i] < w[0].r_min[i]);
    }
    let g0 = by_g[0].r_min.iter().all(|&r| r == 1.0);
    let mc_ok = zs.iter().all(|z| z.abs() < 3.0);
    // cos² + sin² rounds, so the vacuum is exact only to an ulp
    let pass = vac < 1e-15 && half == 0.0 && two_path < 1e-12 && mc_ok && theta_order && g_order && g0;
    let zs: Vec<String> = zs.iter().map(|z| format!("{z:+.2}")).collect();
    Outcome {
        pass,
        detail: format!(
            "vacuum dev {vac:e}, pi/2 dev {half:e}, two-path {two_path:.1e}, MC z [{}], vartheta order {theta_order}, g order {g_order}, g=0 flat {g0}",
            zs.join(" ")
        ),
    }
}

fn criterion_5() -> Outcome {
    let nls = PropagationConfig::default();
    let linear = PropagationConfig { steps: 5000, ..PropagationConfig::default() };
    let grey = DarkSolitonParams::new(1.0, 1.0, PI / 6.0, 0.0, 0.0);
    let black = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
    let v = propagate_nls(&nls, &grey, false).expect("grey run").velocity();
    let v_err = (v - grey.velocity()).abs() / grey.velocity();
    let stat = propagate_nls(&nls, &black, false).expect("black run").max_profile_change();
    let (drift, _) = zero_mode_drift(&linear, &black, 1e-4).expect("drift run");
    let phase = continuous_phase(&linear, &black, 2.0, 1e-4).expect("phase run");
    let pass = v_err < 1e-2 && stat < 1e-6 && drift.relative_error() < 2e-2 && phase.slope.relative_error() < 1e-2;
    Outcome {
        pass,
        detail: format!(
            "velocity rel err {v_err:.1e}, stationarity {stat:.1e}, drift rel err {:.1e}, phase rel err {:.1e}",
            drift.relative_error(),
            phase.slope.relative_error()
        ),
    }
}

fn criterion_6() -> Outcome {
    let p = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
    let model = SpinModel::new(&AtomicSystemParams::paper(), p, SpinOptions::default()).expect("spin model");
    let curve = spin_curve(&model, &linspace(0.0, 1.0, 101)).expect("spin curve");
    let start = curve[0].xi2;
    let below = curve[1..].iter().all(|c| c.xi2 < 1.0);
    let monotone = curve.windows(2).all(|w| w[1].xi2 <= w[0].xi2);
    Outcome {
        pass: start == 1.0 && below && monotone,
        detail: format!("xi2(0) = {start}, xi2(1) = {:.4}, below one {below}, nonincreasing {monotone}", curve[100].xi2),
    }
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("darksqueeze-acceptance-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn run_cli(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_darksqueeze")).args(args).output().expect("binary runs").status.code().unwrap_or(-1)
}

/// File contents with the generation timestamp lines removed.
fn data_files(dir: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for e in fs::read_dir(dir).expect("output dir") {
        let path = e.expect("entry").path();
        let text = fs::read_to_string(&path).expect("utf-8 output");
        let kept: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with("# generated:") && !l.trim_start().starts_with("\"generated\":"))
            .collect();
        out.insert(path.file_name().unwrap().to_string_lossy().into_owned(), kept.join("\n"));
    }
    out
}

fn criterion_7() -> Outcome {
    let base = scratch("repro");
    let cfg = base.join("config.json");
    fs::write(&cfg, "{}").expect("config");
    let (a, b) = (base.join("a"), base.join("b"));
    let cfg_s = cfg.to_str().unwrap();
    let codes = [
        run_cli(&["all", "--config", cfg_s, "--out", a.to_str().unwrap(), "--seed", "7"]),
        run_cli(&["all", "--config", cfg_s, "--out", b.to_str().unwrap(), "--seed", "7"]),
    ];
    let (fa, fb) = (data_files(&a), data_files(&b));
    let differing: Vec<&String> = fa.keys().filter(|k| fb.get(*k) != fa.get(*k)).collect();
    let same_set = fa.keys().eq(fb.keys());
    let ran = codes.iter().all(|&c| c == 0 || c == 3) && codes[0] == codes[1];

    // validation failures name the field and exit 2
    let bad = base.join("bad");
    let theta_cfg = base.join("theta.json");
    fs::write(&theta_cfg, r#"{"soliton": {"A": 1.0, "g": 1.0, "theta": 2.0}}"#).unwrap();
    let theta_code = run_cli(&["soliton", "--config", theta_cfg.to_str().unwrap(), "--out", bad.to_str().unwrap()]);
    let err = fs::read_to_string(bad.join("error.json")).unwrap_or_default();
    let theta_named = err.contains("soliton.theta");
    let key_cfg = base.join("key.json");
    fs::write(&key_cfg, r#"{"unknownKey": 1}"#).unwrap();
    let key_code = run_cli(&["medium", "--config", key_cfg.to_str().unwrap(), "--out", bad.to_str().unwrap()]);

    let pass = ran && same_set && differing.is_empty() && fa.len() > 10 && theta_code == 2 && theta_named && key_code == 2;
    let _ = fs::remove_dir_all(&base);
    Outcome {
        pass,
        detail: format!(
            "exit codes {codes:?}, {} files compared, {} differ {differing:?}; bad theta exit {theta_code} (field named {theta_named}), unknown key exit {key_code}",
            fa.len(),
            differing.len()
        ),
    }
}

fn main() {
    let criteria: [(usize, Duration, fn() -> Outcome); 7] = [
        (1, Duration::from_secs(1), criterion_1),
        (2, Duration::from_secs(30), criterion_2),
        (3, Duration::from_secs(300), criterion_3),
        (4, Duration::from_secs(60), criterion_4),
        (5, Duration::from_secs(120), criterion_5),
        (6, Duration::from_secs(30), criterion_6),
        (7, Duration::from_secs(600), criterion_7),
    ];
    let mut unexpected = vec![];
    for (n, limit, f) in criteria {
        let o = timed(limit, f);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && EXPECTED_UNATTAINABLE.contains(&n) { " (expected: unattainable as stated)" } else { "" };
        println!("criterion {n}: {tag}{note} - {}", o.detail);
        if !o.pass && !EXPECTED_UNATTAINABLE.contains(&n) {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
