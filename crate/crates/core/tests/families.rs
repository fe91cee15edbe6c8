use circuit_descartes::bounds::{assemble_report, finiteness_check, mfrcsd_condition, Finiteness, Parity, ParityClass};
use circuit_descartes::circuit::circuit_profile;
use circuit_descartes::exact::rat;
use circuit_descartes::forge::{family_prs, family_prs_modified, stabilize_eps, FlipVariant};
use circuit_descartes::gale::{analyze_gale, s_alpha};
use circuit_descartes::oracle::{count_positive_solutions, reduce_to_univariate, CountResult};

fn finite(v: usize) -> CountResult {
    CountResult::Finite {
        distinct: v,
        with_multiplicity: v,
    }
}

#[test]
fn prs_reaches_n_plus_one() {
    for n in 2..=5 {
        let inst = family_prs(n, &rat(1, 4)).unwrap();
        let count = count_positive_solutions(&inst.config, &inst.coefficients).unwrap();
        assert_eq!(count, finite(n + 1), "n = {n}");
        let g = analyze_gale(&inst.coefficients);
        let profile = circuit_profile(&inst.config);
        let s = s_alpha(&g, &profile).unwrap();
        let r = assemble_report(&profile, &g, &s).unwrap();
        assert_eq!(r.combined, n + 1);
        assert_eq!(r.k_minus_1, n + 1);
    }
}

#[test]
fn prs_n3_report() {
    let inst = family_prs(3, &rat(1, 4)).unwrap();
    let g = analyze_gale(&inst.coefficients);
    let profile = circuit_profile(&inst.config);
    let s = s_alpha(&g, &profile).unwrap();
    let r = assemble_report(&profile, &g, &s).unwrap();
    assert_eq!((r.combined, r.k_minus_1, r.signature_bound), (4, 4, 4));
    assert_eq!(r.parity, Parity::Applies { expected: ParityClass::Even });
    assert_eq!(r.finiteness, Finiteness::Finite);
}

#[test]
fn prs_n2_finiteness_and_mfrcsd() {
    let inst = family_prs(2, &rat(1, 4)).unwrap();
    let g = analyze_gale(&inst.coefficients);
    let s = s_alpha(&g, &circuit_profile(&inst.config)).unwrap();
    assert!(finiteness_check(&g, &s, &g.basis().column(0)).unwrap());
    assert!(!mfrcsd_condition(&inst.config, &inst.coefficients));
    let model = reduce_to_univariate(&inst.config, &g).unwrap();
    assert_eq!(model.h().degree(), Some(3));
}

#[test]
fn modified_families_hit_every_value() {
    for n in 2..=5 {
        for r in 0..=n {
            for variant in [FlipVariant::Alternating, FlipVariant::Single] {
                let st = stabilize_eps(&rat(1, 4), 30, |e| family_prs_modified(n, r, e, variant)).unwrap();
                assert_eq!(st.count, finite(r + 1), "n={n} r={r} {variant:?} eps={}", st.eps);
                let g = analyze_gale(&st.instance.coefficients);
                let s = s_alpha(&g, &circuit_profile(&st.instance.config)).unwrap();
                if variant == FlipVariant::Alternating {
                    assert_eq!(s.sgnvar, r + 1, "n={n} r={r}");
                }
            }
        }
    }
}
