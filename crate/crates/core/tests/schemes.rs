mod common;

use std::collections::BTreeSet;

use omcs::compression::{build_scheme, export_scheme, import_scheme, verify_scheme, CompressionScheme};
use omcs::reconstruct::{build_com_map, build_om_map, verify_reconstructible, BuildSession};
use omcs::tope_graph::{vc_dimension, TopeGraph};
use omcs::SignVector;

/// Direct check of a proper unlabeled scheme over every sample below a tope.
fn check_scheme(topes: &[SignVector], scheme: &CompressionScheme, k: usize) {
    let members: BTreeSet<SignVector> = topes.iter().copied().collect();
    let n = topes[0].len();
    let mut samples = 0;
    for s in SignVector::all(n) {
        if !topes.iter().any(|t| s.below(t)) {
            assert!(scheme.alpha(&s).is_err());
            continue;
        }
        samples += 1;
        let v = scheme.alpha(&s).unwrap();
        assert!(v.len() <= k, "|alpha({s})| = {}", v.len());
        assert!(v.is_subset(s.support()), "alpha({s}) leaves the sample");
        let t = scheme.beta(v).unwrap();
        assert!(members.contains(&t) && s.below(&t), "beta(alpha({s})) = {t}");
    }
    assert_eq!(samples, scheme.alpha.len());
}

#[test]
fn om_maps_verify_and_give_schemes() {
    for case in common::om_suite() {
        let om = case.om().unwrap();
        let map = build_om_map(om).unwrap();
        let report = verify_reconstructible(&map);
        assert!(report.passed(), "{}: {:?}", case.key, report.violations);
        let vc = vc_dimension(&TopeGraph::new(om.topes()).unwrap()).vc;
        assert_eq!(map.vc(), vc);
        assert!(report.max_image <= vc);
        let scheme = build_scheme(&map, om.system().ground().clone()).unwrap();
        check_scheme(om.topes(), &scheme, vc);
        assert!(verify_scheme(om.topes(), &scheme, vc).passed(), "{}", case.key);
    }
}

#[test]
fn com_maps_verify_on_the_suite() {
    for case in common::suite() {
        let system = case.system();
        let map = build_com_map(&system).unwrap();
        let report = verify_reconstructible(&map);
        assert!(report.passed(), "{}: {:?}", case.key, report.violations);
        let topes = system.topes();
        let scheme = build_scheme(&map, system.ground().clone()).unwrap();
        check_scheme(&topes, &scheme, map.vc());
    }
}

#[test]
fn affine_maps_record_their_programs() {
    for key in ["unif(3,4)", "cube(3)"] {
        let case = common::om_suite().into_iter().find(|c| c.key == key).unwrap();
        let mut session = BuildSession::default();
        let map = session.om_map(case.om().unwrap()).unwrap();
        assert!(verify_reconstructible(&map).passed());
        assert!(!session.programs.is_empty(), "{key}");
        for record in &session.case_two {
            let program = &session.programs[record.program];
            assert_eq!(program.solution, record.solution);
            // The feasible cell at the solution lies in its corner.
            for t in &record.cell_topes {
                assert!(record.corner.contains(t), "{key} at {}", record.solution);
            }
            assert_eq!(record.image.len(), record.map.vc());
        }
        assert!(session.uniqueness.iter().all(|u| u.cocircuits == 1));
        assert!(session.trace_text().lines().all(|l| l.starts_with("event=")));
    }
}

#[test]
fn builds_are_deterministic() {
    let case = common::om_suite().into_iter().find(|c| c.key == "unif(3,5)").unwrap();
    let om = case.om().unwrap();
    let a = export_scheme(&build_scheme(&build_om_map(om).unwrap(), om.system().ground().clone()).unwrap());
    let b = export_scheme(&build_scheme(&build_om_map(om).unwrap(), om.system().ground().clone()).unwrap());
    assert_eq!(a, b);
    assert_eq!(export_scheme(&import_scheme(&a).unwrap()), a);
}
