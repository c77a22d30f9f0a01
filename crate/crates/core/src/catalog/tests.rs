use std::collections::BTreeMap;

use super::hyperkahler::{gh_monopole, tod_potential};
use super::util::{chart, On};
use super::*;

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn every_registry_entry_builds_and_closes() {
    for e in REGISTRY {
        let b = build_default(e.name).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        assert_eq!(b.kind, e.kind, "{}", e.name);
        let r = b.verify(&b.sample(12, 7), 1e-8).unwrap_or_else(|err| panic!("{err}"));
        assert!(r.max() < 1e-8, "{}: {}", e.name, r.max());
    }
}

#[test]
fn printed_metrics_match() {
    for name in ["nil24_spin7", "perturbed_glps", "constant_II", "gh_spin7", "tod_spin7", "log_example", "airy_example", "glps_su4"] {
        let b = build_default(name).unwrap();
        for x in b.sample(10, 3) {
            let r = b.printed_metric_residual(&x).unwrap().unwrap();
            assert!(r < 1e-12, "{name}: {r:e} at {x:?}");
        }
    }
}

#[test]
fn glps_matches_constant_i_under_identification() {
    let g = build_default("glps_spin7").unwrap();
    let id = g.identification.clone().unwrap();
    let c = build(&id.target, &id.target_params).unwrap();
    for x in g.sample(10, 11) {
        let r = g.identification_residual(&c, &x).unwrap();
        assert!(r < 1e-12, "{r:e}");
    }
}

#[test]
fn spin7_entries_have_normalized_four_form() {
    for name in ["glps_spin7", "constant_I", "tod_spin7", "airy_example"] {
        let b = build_default(name).unwrap();
        for x in b.sample(4, 5) {
            let r = b.phi_squared_ratio(&x).unwrap().unwrap();
            assert!((r - 14.0).abs() < 1e-9, "{name}: {r}");
        }
    }
}

#[test]
fn constant_i_rejects_bad_parameters() {
    let e = build("constant_I", &params(&[("a", 3.0)])).unwrap_err();
    assert!(matches!(&e, CatalogError::Params { violated, .. } if violated == "p + qs > |a + bs|"), "{e}");
    let e = build("constant_I", &params(&[("c", -1.0)])).unwrap_err();
    assert!(matches!(&e, CatalogError::Params { violated, .. } if violated == "s + c > 0"), "{e}");
    assert!(matches!(build("constant_I", &params(&[("zeta", 1.0)])), Err(CatalogError::UnknownParam { .. })));
    assert!(matches!(build_default("nope"), Err(CatalogError::UnknownEntry(_))));
}

#[test]
fn constant_i_general_parameters_close() {
    let p = params(&[("A", 2.0), ("c", 0.5), ("a", 0.3), ("b", -0.2), ("p", 1.0), ("q", 0.7)]);
    let b = build("constant_I", &p).unwrap();
    b.verify(&b.sample(10, 1), 1e-8).unwrap();
}

#[test]
fn perturbed_glps_rejects_domain_past_threshold() {
    let e = build("perturbed_glps", &params(&[("s_lo", 0.1)])).unwrap_err();
    assert!(matches!(&e, CatalogError::Params { violated, .. } if violated == "v(s) < 1"), "{e}");
}

#[test]
fn hyperkahler_triples_satisfy_identities() {
    let m = chart("m4", &["a", "b", "c", "d"], &[]);
    let flat = flat_hyperkahler(&m).unwrap();
    flat.verify(&super::sample_box(&[(-1.0, 1.0); 4], 5, 1), 1e-14).unwrap();

    let boxes = [(-1.0, 1.0), (0.5, 1.5), (0.5, 1.5)];
    let (v, a) = gh_monopole(0.0, 1.0);
    let hk = gibbons_hawking_triple(&v, &a, &boxes).unwrap();
    let mut d = boxes.to_vec();
    d.push((-1.0, 1.0));
    hk.verify(&super::sample_box(&d, 10, 2), 1e-10).unwrap();

    let (v, a) = tod_potential(2.0, 1.0);
    let hk = tod_triple(2.0, 1.0, &[(-1.0, 1.0), (-1.0, 0.5), (-1.0, 1.0)]).unwrap();
    let _ = (v, a);
    hk.verify(&super::sample_box(&[(-1.0, 1.0), (-1.0, 0.5), (-1.0, 1.0), (-1.0, 1.0)], 10, 3), 1e-10).unwrap();
}

#[test]
fn gibbons_hawking_constant_and_linear_potentials() {
    let r3 = On(chart("r3", &["x", "y", "z"], &[]));
    let hk = gibbons_hawking_triple(&r3.c(1.0), &DifferentialForm::zero(&r3.0, 1), &[(-1.0, 1.0); 3]).unwrap();
    hk.verify(&super::sample_box(&[(-1.0, 1.0); 4], 4, 4), 1e-15).unwrap();
    // V = x, a = −y dz
    let a = r3.one(&[(2, -r3.x(1))]);
    let bx = [(0.5, 1.5), (-1.0, 1.0), (-1.0, 1.0)];
    let hk = gibbons_hawking_triple(&r3.x(0), &a, &bx).unwrap();
    hk.verify(&super::sample_box(&[(0.5, 1.5), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)], 8, 5), 1e-10).unwrap();
}

#[test]
fn gibbons_hawking_rejects_non_harmonic_potential() {
    let r3 = On(chart("r3", &["x", "y", "z"], &[]));
    let v = 1.0 + &r3.x(0) * &r3.x(0);
    let e = gibbons_hawking_triple(&v, &DifferentialForm::zero(&r3.0, 1), &[(-1.0, 1.0); 3]).unwrap_err();
    assert!(format!("{e}").contains("harmonic V"), "{e}");
    let e = gibbons_hawking_triple(&r3.c(1.0), &r3.one(&[(2, r3.x(1))]), &[(-1.0, 1.0); 3]).unwrap_err();
    assert!(format!("{e}").contains("*dV"), "{e}");
}

#[test]
fn constant_ii_connection_curvatures_on_a_slice() {
    let b = build_default("constant_II").unwrap();
    let d = b.second.as_ref().unwrap();
    let (c, q) = (1.0, 1.0);
    let x = [0.3, -0.4, 1.2, 0.9, 0.1, 0.2, 0.0, 0.0];
    // components with neither dy nor ds
    let on_slice = |f: &DifferentialForm, n: usize| -> BTreeMap<u32, f64> {
        let v = f.d().eval_at(&x[..n], 0).unwrap().values();
        v.into_iter().filter(|(m, c)| m & 0b1100 == 0 && *c != 0.0).collect()
    };
    assert_eq!(on_slice(&d.alpha, 6), BTreeMap::from([(0b11, c * q)]));
    assert!(on_slice(&d.kappa, 6).is_empty());
    assert_eq!(on_slice(&d.xi, 7), BTreeMap::from([(0b100001, 1.0)]));
    assert_eq!(on_slice(&d.eta, 8), BTreeMap::from([(0b10010, 1.0)]));
}

#[test]
fn descriptor_serializes() {
    let b = build_default("constant_II").unwrap();
    let s = serde_json::to_string(&b.descriptor()).unwrap();
    assert!(s.contains("\"name\":\"constant_II\"") && s.contains("\"provenance\":\"§11\""), "{s}");
}

#[test]
fn holonomy_ranks_of_nilmanifold_entries() {
    use crate::curvature::curvature_operator_rank;
    for (name, want) in [("glps_spin7", 21), ("nil24_spin7", 21), ("glps_g2", 14), ("flat_spin7", 0), ("glps_su4", 15), ("glps_cy", 8)] {
        let b = build_default(name).unwrap();
        let cert = curvature_operator_rank(b.metric(), &b.sample(3, 17)).unwrap();
        assert_eq!(cert.operator_rank, want, "{name}");
        assert!(b.expected_holonomy_rank.admits(want), "{name}");
        assert!(cert.gap_ratio > 1e6, "{name}: gap {:e}", cert.gap_ratio);
    }
}

#[test]
fn spin7_entries_are_ricci_flat() {
    use crate::curvature::curvature_at;
    for e in REGISTRY.iter().filter(|e| e.kind == Kind::Spin7) {
        let b = build_default(e.name).unwrap();
        for x in b.sample(3, 23) {
            let c = curvature_at(b.metric(), &x).unwrap();
            assert!(c.ricci_ratio() < 1e-6, "{}: {:e}", e.name, c.ricci_ratio());
        }
    }
}

#[test]
fn glps_closure_system_selects_half_power_in_third_condition() {
    let b = build("glps_spin7", &BTreeMap::new()).unwrap();
    let data = b.reduction.as_ref().unwrap();
    let mut dom = vec![(-1.0, 1.0); 5];
    dom.push((0.5, 2.0));
    let rep = crate::structures::su3_torsion(data, &sample_box(&dom, 20, 11)).unwrap();
    assert!(rep.residuals.get("condition3_half") < 1e-12);
    assert!(rep.residuals.get("condition3") > 1e-3);
}
