use zstab_core::fem2d::{
    assemble_2d, axis_profile, centreline_overshoot, oscillation_metric, refined_reference_2d, solve_2d,
    RegionMap2D,
};
use zstab_core::{FieldProfile, Material, Mesh2D, Scheme, MU_0};

fn sheet(dz: f64, length: f64) -> (Mesh2D, RegionMap2D) {
    let d = 1.3;
    let nz = (length / dz).round() as usize + 1;
    let mesh = Mesh2D::sheet(nz, dz, -2.6, d, 8, 5.0 * d, 6, 1.3).unwrap();
    let regions = RegionMap2D::sheet(&mesh, d).unwrap();
    (mesh, regions)
}

fn trace(
    mesh: &Mesh2D,
    regions: &RegionMap2D,
    pe: f64,
    profile: &FieldProfile,
    scheme: Scheme,
) -> Vec<(f64, f64)> {
    let material = Material::for_peclet(pe, mesh.dz(), 7.21e6, MU_0).unwrap();
    let sys = assemble_2d(mesh, &material, regions, profile, scheme).unwrap();
    let sol = solve_2d(&sys).unwrap();
    axis_profile(&sol, mesh).unwrap()
}

#[test]
fn galerkin_alternates_on_a_sharp_pulse() {
    let (mesh, regions) = sheet(0.1, 8.0);
    let profile = FieldProfile::RectPulse2D {
        a: 0.65,
        b: 0.65,
        amplitude: 1.0,
    };
    let g = trace(&mesh, &regions, 60.0, &profile, Scheme::Galerkin);
    let a = trace(&mesh, &regions, 60.0, &profile, Scheme::ElementAveraged);
    // upstream of the pulse: node-to-node alternation only under Galerkin
    let upstream = |t: &[(f64, f64)]| {
        let w: Vec<(f64, f64)> = t.iter().copied().filter(|(z, _)| *z < -1.0).collect();
        oscillation_metric(&w, 1.0).unwrap()
    };
    assert!(upstream(&g) > 0.1, "{}", upstream(&g));
    assert!(upstream(&a) < 1e-3, "{}", upstream(&a));
    // the averaged plateau sits close to full expulsion
    let mid = a.iter().find(|(z, _)| z.abs() < 0.1).unwrap().1;
    assert!(mid < -0.85 && mid > -1.05, "{mid}");
}

#[test]
fn smooth_input_low_pe_stays_close_to_reference() {
    let (mesh, regions) = sheet(0.1, 8.0);
    let profile = FieldProfile::SmoothCircle2D {
        radius: 0.65,
        amplitude: 1.0,
    };
    let material = Material::for_peclet(2.0, mesh.dz(), 7.21e6, MU_0).unwrap();
    let reference = refined_reference_2d(&mesh, &material, &regions, &profile, 4).unwrap();
    for scheme in Scheme::ALL {
        let t = trace(&mesh, &regions, 2.0, &profile, scheme);
        let dev = centreline_overshoot(&t, &reference, 1.0).unwrap();
        assert!(dev < 0.05, "{scheme}: {dev}");
    }
}

#[test]
fn amplitude_scales_linearly() {
    let (mesh, regions) = sheet(0.2, 6.0);
    let one = FieldProfile::SmoothCircle2D {
        radius: 0.65,
        amplitude: 1.0,
    };
    let three = FieldProfile::SmoothCircle2D {
        radius: 0.65,
        amplitude: -3.0,
    };
    let a = trace(&mesh, &regions, 10.0, &one, Scheme::ElementAveraged);
    let b = trace(&mesh, &regions, 10.0, &three, Scheme::ElementAveraged);
    for (x, y) in a.iter().zip(&b) {
        assert!((y.1 + 3.0 * x.1).abs() < 1e-9, "{} vs {}", x.1, y.1);
    }
}
