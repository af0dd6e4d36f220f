//! One PASS/FAIL line per acceptance criterion, with the measured numbers
//! and timings. Runs as a plain binary (`harness = false`).
//!
//! A failing criterion is reported but does not fail `cargo test` unless
//! `ZSTAB_ACCEPTANCE_STRICT=1` is set.

use std::path::Path;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use zstab::ScenarioConfig;
use zstab_core::fem1d::{assemble_1d, solve_1d};
use zstab_core::fem2d::stencil::{compare_patch, uniform_patch, z_stencil};
use zstab_core::fem2d::{
    assemble_2d, axis_profile, centreline_overshoot, oscillation_metric, reference_factor,
    refined_reference_2d, solve_2d, ElementCoeffs, RegionMap2D,
};
use zstab_core::oracle::{analytic_solve, peak_error, PulseLayout};
use zstab_core::ztan::poly::{rat, ratio};
use zstab_core::ztan::proof::verify_factorizations_with;
use zstab_core::ztan::{
    analyze, has_pole_line, polys_2d, tf_1d, tf_2d, verify_identity_denominator, verify_identity_numerator,
    Analysis, PecletValue, PoleZeroReport, RootValue, Var,
};
use zstab_core::{FieldProfile, Material, Mesh2D, Scheme};

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion(n: u32, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    println!(
        "{} [{n}] {title}: {} ({:.2} s)",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        t.elapsed().as_secs_f64()
    );
    o.pass
}

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

fn oracle_equivalence() -> Outcome {
    let printed = [
        (Scheme::Galerkin, 200.0, 0.20, 12, 38),
        (Scheme::ElementAveraged, 2.0, 0.25, 9, 30),
        (Scheme::ElementAveraged, 400.0, 0.17, 15, 46),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (scheme, pe, dz, m_c, m_bd) in printed {
        let t = Instant::now();
        let layout = PulseLayout::new(m_bd, m_c, m_bd).unwrap();
        let mesh = layout.mesh(dz).unwrap();
        let material = Material::for_peclet(pe, dz, 1.0, 1.0).unwrap();
        let sol =
            solve_1d(&assemble_1d(&mesh, &material, &layout.profile(dz, 1.0), scheme).unwrap()).unwrap();
        let exact = analytic_solve(pe, dz, 1.0, m_bd, m_c, m_bd, scheme)
            .unwrap()
            .nodal();
        // relative to the largest nodal value: upstream nodes decay towards
        // zero like r^-n and carry no relative information of their own
        let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = sol
            .a_y
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs() / scale)
            .fold(0.0, f64::max);
        let elapsed = t.elapsed();
        pass &= err <= 1e-8 && elapsed < Duration::from_secs(1);
        parts.push(format!("{scheme} Pe={pe}: max rel {err:.1e}"));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn peak_error_curve() -> Outcome {
    let t = Instant::now();
    let mut config = ScenarioConfig::load(&configs().join("fig1c_sweep.json")).unwrap();
    let sweep = config.sweep.as_mut().unwrap();
    sweep.include.clear();
    let (lo, hi) = (sweep.pe_min, sweep.pe_max);
    let rows = zstab::sweep_rows(&config, &Scheme::ALL).unwrap();
    let elapsed = t.elapsed();

    let proposed = Scheme::ElementAveraged;
    let k = (0..rows.len())
        .max_by(|&a, &b| {
            rows[a].measured[&proposed]
                .abs()
                .total_cmp(&rows[b].measured[&proposed].abs())
        })
        .unwrap();
    let near = |i: usize| rows.get(i).map(|r| r.pe);
    let lo_ok = near(k.wrapping_sub(1)).map_or(true, |p| p <= 2.0);
    let hi_ok = near(k + 1).map_or(true, |p| p >= 2.0);
    let top = &rows[k];
    let dev35 = (top.measured[&proposed] - peak_error(proposed, top.pe, 1.0).unwrap()).abs();
    let worst36 = rows
        .iter()
        .map(|r| (r.measured[&Scheme::Galerkin] - r.formula[&Scheme::Galerkin]).abs())
        .fold(0.0, f64::max);
    let last = rows.last().unwrap();
    let third = (last.measured[&Scheme::Galerkin] / (1.0 / 3.0) - 1.0).abs();
    let pass = lo_ok
        && hi_ok
        && dev35 <= 1e-6
        && worst36 <= 1e-6
        && (last.pe - 1000.0).abs() < 1e-9
        && third <= 0.005
        && elapsed < Duration::from_secs(30)
        && rows.first().map(|r| r.pe) == Some(lo)
        && (last.pe - hi).abs() < 1e-9;
    Outcome {
        pass,
        detail: format!(
            "{} points; proposed max |err| {:.7} at Pe={:.4} (1/27 = {:.7}), |measured - eq35| {dev35:.1e}; \
             Galerkin max |measured - eq36| {worst36:.1e}, Pe=1000 error {:.5} ({:.2}% from 1/3)",
            rows.len(),
            top.measured[&proposed].abs(),
            top.pe,
            1.0 / 27.0,
            last.measured[&Scheme::Galerkin],
            100.0 * third
        ),
    }
}

fn symbolic_identities() -> Outcome {
    let den = verify_identity_denominator();
    let num = verify_identity_numerator();
    let fac = verify_factorizations_with(&polys_2d());
    let n1 = fac
        .checks
        .iter()
        .find(|c| c.name.starts_with("N1"))
        .is_some_and(|c| c.passed);
    let zero = den.to_string().contains("LHS - RHS = 0");
    let divides = num
        .checks
        .iter()
        .filter(|c| c.name.contains("divides"))
        .all(|c| c.passed);
    Outcome {
        pass: den.passed() && num.passed() && n1 && zero && divides,
        detail: format!(
            "denominator identity exact zero: {zero}; (Zn+1)^2 and Zn^2+4Zn+1 divide S3 N1 - Q1 R1: {divides}; N1 factorization: {n1}"
        ),
    }
}

fn report(scheme: Scheme, pe: PecletValue) -> PoleZeroReport {
    match analyze(&tf_1d(scheme, &pe, &ratio(1, 5)).unwrap()).unwrap() {
        Analysis::Univariate(r) => r,
        other => panic!("unexpected {other:?}"),
    }
}

fn pole_zero_certificates() -> Outcome {
    let g = report(Scheme::Galerkin, PecletValue::Infinite);
    let poles_ok = g.poles.len() == 2 && g.has_pole_at(&rat(1)) && g.has_pole_at(&rat(-1));
    let mut zeros: Vec<f64> = g
        .zeros
        .iter()
        .filter(|z| matches!(z.value, RootValue::Surd { .. }))
        .map(|z| z.value.approx().re)
        .collect();
    zeros.sort_by(f64::total_cmp);
    let zeros_ok = zeros.len() == 2
        && (zeros[0] - (-2.0 - 3f64.sqrt())).abs() < 1e-12
        && (zeros[1] - (-2.0 + 3f64.sqrt())).abs() < 1e-12
        && format!("{:.2}", zeros[0]) == "-3.73"
        && format!("{:.2}", zeros[1]) == "-0.27";
    let a = report(Scheme::ElementAveraged, PecletValue::Infinite);
    let cancel_ok = a.cancelled_at(&rat(-1)) && !a.has_pole_at(&rat(-1));
    let p = polys_2d();
    let minus_one: BigRational = rat(-1);
    let g2 = tf_2d(Scheme::Galerkin, &p, &rat(1)).unwrap();
    let a2 = tf_2d(Scheme::ElementAveraged, &p, &rat(1)).unwrap();
    let g_line = has_pole_line(&g2.tf, Var::Zn, &minus_one).unwrap();
    let a_line = has_pole_line(&a2.tf, Var::Zn, &minus_one).unwrap();
    Outcome {
        pass: poles_ok && zeros_ok && cancel_ok && g_line && !a_line,
        detail: format!(
            "1D Galerkin poles {{+1, -1}}: {poles_ok}, zeros {:.2}/{:.2}: {zeros_ok}; 1D proposed Z=-1 cancelled: {cancel_ok}; \
             2D pole line Zn=-1 Galerkin: {g_line}, proposed: {a_line}",
            zeros.first().copied().unwrap_or(f64::NAN),
            zeros.last().copied().unwrap_or(f64::NAN)
        ),
    }
}

fn centreline(
    config: &ScenarioConfig,
    pe: f64,
    scheme: Scheme,
    profile: &FieldProfile,
) -> (Vec<(f64, f64)>, Duration) {
    let t = Instant::now();
    let (mesh, regions) = config.sheet().unwrap();
    let material = config.material_for(pe).unwrap();
    let sol = solve_2d(&assemble_2d(&mesh, &material, &regions, profile, scheme).unwrap()).unwrap();
    (axis_profile(&sol, &mesh).unwrap(), t.elapsed())
}

fn stabilization_2d() -> Outcome {
    let config = ScenarioConfig::load(&configs().join("fig4b_smooth_circle.json")).unwrap();
    let profile = config.profile.profile();
    let amp = profile.amplitude();
    let (mesh, regions) = config.sheet().unwrap();
    let mut slowest = Duration::ZERO;

    let (g, tg) = centreline(&config, 60.0, Scheme::Galerkin, &profile);
    let (a, ta) = centreline(&config, 60.0, Scheme::ElementAveraged, &profile);
    let mg = oscillation_metric(&g, amp).unwrap();
    let ma = oscillation_metric(&a, amp).unwrap();

    let (a2, t2) = centreline(&config, 2.0, Scheme::ElementAveraged, &profile);
    let t = Instant::now();
    let factor = reference_factor(2.0);
    let reference = refined_reference_2d(
        &mesh,
        &config.material_for(2.0).unwrap(),
        &regions,
        &profile,
        factor,
    )
    .unwrap();
    let tr = t.elapsed();
    let overshoot = centreline_overshoot(&a2, &reference, amp).unwrap();
    for d in [tg, ta, t2, tr] {
        slowest = slowest.max(d);
    }

    let oscillation_ok = ma <= 0.01 && mg >= 0.1 && mg > 10.0 * ma;
    let overshoot_ok = overshoot <= 0.05;
    let time_ok = slowest < Duration::from_secs(120);

    // Same sheet under the sharp rectangular field, for comparison.
    let rect = FieldProfile::RectPulse2D {
        a: 0.65,
        b: 0.65,
        amplitude: 1.0,
    };
    let (rg, _) = centreline(&config, 60.0, Scheme::Galerkin, &rect);
    let (ra, _) = centreline(&config, 60.0, Scheme::ElementAveraged, &rect);
    let upstream = |t: &[(f64, f64)]| {
        let w: Vec<(f64, f64)> = t.iter().copied().filter(|(z, _)| *z < -1.0).collect();
        oscillation_metric(&w, 1.0).unwrap()
    };

    Outcome {
        pass: oscillation_ok && overshoot_ok && time_ok,
        detail: format!(
            "{} nodes; smooth circle Pe=60 oscillation metric proposed {ma:.4} (need <= 0.01), Galerkin {mg:.4} \
             (need >= 0.1, ratio {:.2}); Pe=2 proposed centreline deviation from {factor}x z-refined reference \
             {:.2}% (need <= 5%): {}; slowest solve {:.1} s. [info] rect field Pe=60: metric Galerkin {:.3} / \
             proposed {:.3}, upstream of the field Galerkin {:.3} / proposed {:.1e}",
            mesh.node_count(),
            mg / ma,
            100.0 * overshoot,
            if overshoot_ok { "ok" } else { "exceeded" },
            slowest.as_secs_f64(),
            oscillation_metric(&rg, 1.0).unwrap(),
            oscillation_metric(&ra, 1.0).unwrap(),
            upstream(&rg),
            upstream(&ra),
        ),
    }
}

fn stencil_consistency() -> Outcome {
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let triples = [
        (q(1, 5), q(7, 2), q(3, 1)),
        (q(1, 4), q(2, 1), q(5, 1)),
        (q(3, 7), q(11, 3), q(1, 9)),
    ];
    let mut mismatches = 0;
    let mut rhs_ok = true;
    for (h, ms, u) in &triples {
        let coeffs = ElementCoeffs {
            hz: h.clone(),
            hy: h.clone(),
            mu_sigma: ms.clone(),
            u_z: u.clone(),
            air_phi_weight: std::array::from_fn(|_| q(1, 1)),
            conducting: true,
        };
        let patch = uniform_patch(5, 5, &coeffs);
        mismatches += compare_patch(&patch, &z_stencil(h, ms, u)).len();
        let b = vec![q(-5, 3); 25];
        rhs_ok &= patch.rhs(Scheme::Galerkin, &b) == patch.rhs(Scheme::ElementAveraged, &b);
    }
    let mesh = Mesh2D::new(7, 0.2, vec![0.2; 6], 0.0, -0.6).unwrap();
    let regions = RegionMap2D::uniform(&mesh, 1.0);
    let material = Material::for_peclet(60.0, 0.2, 7.21e6, zstab_core::MU_0).unwrap();
    let zero = FieldProfile::SmoothCircle2D {
        radius: 0.4,
        amplitude: 0.0,
    };
    let mut zero_ok = true;
    for s in Scheme::ALL {
        let sol = solve_2d(&assemble_2d(&mesh, &material, &regions, &zero, s).unwrap()).unwrap();
        zero_ok &= sol.phi.iter().chain(&sol.a_y).chain(&sol.a_z).all(|v| *v == 0.0);
    }
    Outcome {
        pass: mismatches == 0 && rhs_ok && zero_ok,
        detail: format!(
            "5x5 exact patches x{}: {mismatches} mismatching entries; constant-B RHS identical: {rhs_ok}; zero input -> zero solution: {zero_ok}",
            triples.len()
        ),
    }
}

fn main() {
    let results = [
        criterion(1, "oracle equivalence", oracle_equivalence),
        criterion(2, "peak-error curve", peak_error_curve),
        criterion(3, "symbolic identities", symbolic_identities),
        criterion(4, "pole-zero certificates", pole_zero_certificates),
        criterion(5, "2D stabilization", stabilization_2d),
        criterion(6, "stencil consistency", stencil_consistency),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed < results.len() && std::env::var_os("ZSTAB_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
