//! Grid-refinement studies: residuals that vanish in the continuum must
//! shrink fourfold when the spacing halves.

use cartan_core::defects::{
    build_coframe, build_connection, burgers_vector, core_disk, torsion, with_background, DefectConfiguration,
    DefectSpec,
};
use cartan_core::field_theory::{bianchi_residuals, u1_sources, Couplings, InteriorRegion, Refinement};
use cartan_core::forms::{Coframe, ConnectionField, FormField, ValueType};
use cartan_core::GridSpec;

fn slab(n: usize) -> GridSpec {
    GridSpec::new(vec![[-1.5, 1.5], [-1.5, 1.5], [0.0, 1.0]], vec![n, n, n / 3]).unwrap()
}

fn superposition(n: usize) -> DefectConfiguration {
    DefectConfiguration::new(
        slab(n),
        vec![DefectSpec::screw(0.4, 0.0, 1.0, 0.1), DefectSpec::wedge(-0.4, 0.0, 0.1, 0.1)],
    )
    .unwrap()
}

#[test]
fn canonical_bianchi_residuals_vanish_on_the_grid() {
    let cfg = superposition(48);
    let (dr, dt) = bianchi_residuals(
        &build_coframe(&cfg).unwrap(),
        &build_connection(&cfg).unwrap(),
        Some(&InteriorRegion::for_configuration(&cfg)),
    )
    .unwrap();
    assert!(dr.max_norm < 1e-12 && dt.max_norm < 1e-12, "{} {}", dr.max_norm, dt.max_norm);
}

#[test]
fn bianchi_residuals_converge_at_second_order_with_background() {
    let norms = |n: usize| {
        let cfg = superposition(n);
        let (e, w) = with_background(&build_coframe(&cfg).unwrap(), &build_connection(&cfg).unwrap(), 0.2).unwrap();
        let region = InteriorRegion::for_configuration(&cfg).with_layers(vec![2, 2, 2]);
        let (dr, dt) = bianchi_residuals(&e, &w, Some(&region)).unwrap();
        (dr.l2_norm, dt.l2_norm)
    };
    let (c, f) = (norms(48), norms(96));
    let r_dr = Refinement::compare(c.0, f.0);
    let r_dt = Refinement::compare(c.1, f.1);
    assert!(matches!(r_dr, Refinement::Ratio(_)) && r_dr.is_second_order(), "{r_dr:?}");
    assert!(matches!(r_dt, Refinement::Ratio(_)) && r_dt.is_second_order(), "{r_dt:?}");
}

/// `e^1 = dx + f dy + f^2 dz` with `f = f(x, w)`: torsion-free of `T ^ T` in
/// the continuum, so `dJ1` is pure truncation error.
fn sheared_coframe_4d(n: usize) -> Coframe {
    let g = GridSpec::new(vec![[-1.0, 1.0], [0.0, 1.0], [0.0, 1.0], [-1.0, 1.0]], vec![n, 4, 4, n]).unwrap();
    let e = FormField::from_fn(&g, 1, ValueType::FrameVector(4), |p, out| {
        let f = 0.3 * (1.3 * p[0]).sin() * (0.9 * p[3] + 0.2).cos();
        for a in 0..4 {
            out[a * 4 + a] = 1.0;
        }
        out[1] += f;
        out[2] += f * f;
    })
    .unwrap();
    Coframe::new(e).unwrap()
}

#[test]
fn dj1_converges_at_second_order() {
    let norm = |n: usize| {
        let e = sheared_coframe_4d(n);
        let w = ConnectionField::zero(e.form().grid(), 4).unwrap();
        let region = InteriorRegion::boundary(4, 2).with_layers(vec![2, 0, 0, 2]);
        u1_sources(&e, &w, &Couplings::default(), Some(&region)).unwrap().dj1.unwrap().l2_norm
    };
    let r = Refinement::compare(norm(16), norm(32));
    assert!(matches!(r, Refinement::Ratio(_)) && r.is_second_order(), "{r:?}");
}

#[test]
fn off_core_burgers_flux_is_truncation_error() {
    let flux = |n: usize| {
        let g = GridSpec::new(vec![[-1.5, 1.5], [-1.5, 1.5], [0.0, 0.2]], vec![n, n, 4]).unwrap();
        let cfg = DefectConfiguration::new(g.clone(), vec![DefectSpec::screw(0.0, 0.0, 1.0, 0.05)]).unwrap();
        let t = torsion(&build_coframe(&cfg).unwrap(), &build_connection(&cfg).unwrap()).unwrap();
        burgers_vector(&t, &core_disk(&g, [0.8, 0.5], 0.3), (256, 256)).unwrap()[2]
    };
    let (c, f) = (flux(64), flux(128));
    assert!(f.abs() < 1e-4, "{f}");
    let r = Refinement::compare(c.abs(), f.abs());
    assert!(r.is_second_order(), "{c} {f}");
}
