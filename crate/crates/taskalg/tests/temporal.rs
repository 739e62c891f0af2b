//! LTL/CTL correspondence and duality properties, plus self-validation of
//! every counterexample and witness the checkers return.

mod common;

use proptest::prelude::*;

use common::{arb_model, arb_prop, try_trace_set, GenOptions};
use proptest::test_runner::TestCaseError;
use taskalg::ast::resolve;
use taskalg::modelcheck::{
    build_prefix_tree, check_ctl, check_ltl, ltl_holds_on, CtlFormula, LtlFormula,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ag_matches_universal_globally(
        model in arb_model(3, GenOptions::full()),
        p in arb_prop(2),
    ) {
        let resolved = resolve(model).expect("resolve");
        let Some(ts) = try_trace_set(&resolved, 2) else {
            return Err(TestCaseError::reject("trace explosion"));
        };
        let tree = build_prefix_tree(&ts);

        let ltl = check_ltl(&ts, &LtlFormula::Globally(Box::new(p.to_ltl()))).unwrap();
        let ctl = check_ctl(&tree, &CtlFormula::Ag(Box::new(p.to_ctl()))).unwrap();
        prop_assert_eq!(ltl.holds, ctl.holds);
    }

    #[test]
    fn ef_matches_existential_finally(
        model in arb_model(3, GenOptions::full()),
        p in arb_prop(2),
    ) {
        let resolved = resolve(model).expect("resolve");
        let Some(ts) = try_trace_set(&resolved, 2) else {
            return Err(TestCaseError::reject("trace explosion"));
        };
        let tree = build_prefix_tree(&ts);

        let ctl = check_ctl(&tree, &CtlFormula::Ef(Box::new(p.to_ctl()))).unwrap();
        let some_trace_finally = ts
            .iter()
            .any(|t| ltl_holds_on(t, &LtlFormula::Finally(Box::new(p.to_ltl()))).unwrap());
        prop_assert_eq!(ctl.holds, some_trace_finally);
    }

    #[test]
    fn ltl_duality_not_finally(
        model in arb_model(3, GenOptions::full()),
        p in arb_prop(2),
    ) {
        let resolved = resolve(model).expect("resolve");
        let Some(ts) = try_trace_set(&resolved, 2) else {
            return Err(TestCaseError::reject("trace explosion"));
        };
        let not_f = LtlFormula::Not(Box::new(LtlFormula::Finally(Box::new(p.to_ltl()))));
        let g_not = LtlFormula::Globally(Box::new(LtlFormula::Not(Box::new(p.to_ltl()))));
        prop_assert_eq!(
            check_ltl(&ts, &not_f).unwrap().holds,
            check_ltl(&ts, &g_not).unwrap().holds
        );
    }

    #[test]
    fn ctl_duality_not_ef(
        model in arb_model(3, GenOptions::full()),
        p in arb_prop(2),
    ) {
        let resolved = resolve(model).expect("resolve");
        let Some(ts) = try_trace_set(&resolved, 2) else {
            return Err(TestCaseError::reject("trace explosion"));
        };
        let tree = build_prefix_tree(&ts);
        let not_ef = CtlFormula::Not(Box::new(CtlFormula::Ef(Box::new(p.to_ctl()))));
        let ag_not = CtlFormula::Ag(Box::new(CtlFormula::Not(Box::new(p.to_ctl()))));
        prop_assert_eq!(
            check_ctl(&tree, &not_ef).unwrap().holds,
            check_ctl(&tree, &ag_not).unwrap().holds
        );
    }

    #[test]
    fn evidence_self_validates(
        model in arb_model(3, GenOptions::full()),
        p in arb_prop(2),
    ) {
        let resolved = resolve(model).expect("resolve");
        let Some(ts) = try_trace_set(&resolved, 2) else {
            return Err(TestCaseError::reject("trace explosion"));
        };
        let tree = build_prefix_tree(&ts);

        // LTL counterexamples violate their formula on their own
        for formula in [
            LtlFormula::Globally(Box::new(p.to_ltl())),
            LtlFormula::Finally(Box::new(p.to_ltl())),
            p.to_ltl(),
        ] {
            let verdict = check_ltl(&ts, &formula).unwrap();
            if let Some(trace) = &verdict.evidence {
                prop_assert!(!verdict.holds);
                prop_assert!(!ltl_holds_on(trace, &formula).unwrap());
                prop_assert!(ts.keys().contains(&trace.key()));
            }
        }

        // CTL witnesses satisfy, counterexamples violate, on the single
        // path read back as a one-trace set
        for formula in [
            CtlFormula::Ef(Box::new(p.to_ctl())),
            CtlFormula::Ag(Box::new(p.to_ctl())),
            CtlFormula::Af(Box::new(p.to_ctl())),
            CtlFormula::Eg(Box::new(p.to_ctl())),
        ] {
            let verdict = check_ctl(&tree, &formula).unwrap();
            if let Some(trace) = &verdict.evidence {
                prop_assert!(ts.keys().contains(&trace.key()));
                let singleton = taskalg::TraceSet::canonical(
                    vec![trace.clone()],
                    Default::default(),
                );
                let chain = build_prefix_tree(&singleton);
                let chain_verdict = check_ctl(&chain, &formula).unwrap();
                prop_assert_eq!(chain_verdict.holds, verdict.holds);
            }
        }
    }

    #[test]
    fn universal_failures_produce_counterexamples(
        model in arb_model(3, GenOptions::full()),
        p in arb_prop(2),
    ) {
        let resolved = resolve(model).expect("resolve");
        let Some(ts) = try_trace_set(&resolved, 2) else {
            return Err(TestCaseError::reject("trace explosion"));
        };
        let tree = build_prefix_tree(&ts);
        let formula = CtlFormula::Ag(Box::new(p.to_ctl()));
        let verdict = check_ctl(&tree, &formula).unwrap();
        if !verdict.holds {
            prop_assert!(verdict.evidence.is_some());
        }
        let witness = check_ctl(&tree, &CtlFormula::Ef(Box::new(p.to_ctl()))).unwrap();
        if witness.holds && !ts.is_empty() {
            prop_assert!(witness.evidence.is_some());
        }
    }
}
