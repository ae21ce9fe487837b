mod common;

use common::anchor_curve;
use proptest::prelude::*;
use prospector_eval::engine::{combine_and, combine_independent, combine_or, infer_links, odds, propagate, LinkRole};
use prospector_eval::{LinkParams, RuleSet};

/// A link whose prior equals the mixture of its two conditionals.
fn consistent_link() -> impl Strategy<Value = LinkParams> {
    (0.001f64..0.999, 0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(p_e, p_ce, p_cne)| {
        let p_c = p_e * p_ce + (1.0 - p_e) * p_cne;
        LinkParams::new(p_c, p_e, p_ce, p_cne).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn propagation_passes_through_the_anchors(link in consistent_link()) {
        prop_assert!((propagate(&link, 0.0) - link.p_c_given_not_e).abs() <= 1e-12);
        prop_assert!((propagate(&link, link.p_e) - link.p_c).abs() <= 1e-12);
        prop_assert!((propagate(&link, 1.0) - link.p_c_given_e).abs() <= 1e-12);
    }

    #[test]
    fn propagation_is_the_anchor_curve(link in consistent_link(), x in 0.0f64..=1.0) {
        let expected = anchor_curve(link.p_c_given_not_e, link.p_e, link.p_c, link.p_c_given_e, x);
        prop_assert!((propagate(&link, x) - expected).abs() <= 1e-12);
        let lo = link.p_c_given_e.min(link.p_c_given_not_e) - 1e-12;
        let hi = link.p_c_given_e.max(link.p_c_given_not_e) + 1e-12;
        prop_assert!((lo..=hi).contains(&propagate(&link, x)));
    }

    #[test]
    fn unchanged_evidence_leaves_the_prior(p_c in 0.001f64..0.999, k in 1usize..5) {
        let (p, trace) = combine_independent(&vec![p_c; k], p_c);
        prop_assert!((p - p_c).abs() <= 1e-12);
        for step in &trace.steps {
            prop_assert!((step.likelihood_ratio - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn independence_combination_is_symmetric(a in 0.0f64..=1.0, b in 0.0f64..=1.0, p_c in 0.001f64..0.999) {
        let (ab, _) = combine_independent(&[a, b], p_c);
        let (ba, _) = combine_independent(&[b, a], p_c);
        prop_assert!((ab - ba).abs() <= 1e-12);
    }

    #[test]
    fn independence_trace_is_consistent(posteriors in prop::collection::vec(0.0f64..=1.0, 1..5), p_c in 0.001f64..0.999) {
        let (p, trace) = combine_independent(&posteriors, p_c);
        prop_assert_eq!(trace.rule, RuleSet::Independent);
        prop_assert_eq!(trace.steps.len(), posteriors.len());
        prop_assert!((trace.prior_odds - odds(p_c)).abs() <= 1e-12 * trace.prior_odds.max(1.0));
        let mut product = trace.prior_odds;
        for (i, step) in trace.steps.iter().enumerate() {
            prop_assert_eq!(step.link, LinkRole::Evidence(i));
            prop_assert_eq!(step.posterior, posteriors[i]);
            prop_assert!((step.odds - odds(posteriors[i])).abs() <= 1e-9 * step.odds.max(1.0));
            prop_assert!((step.likelihood_ratio * trace.prior_odds / step.odds - 1.0).abs() <= 1e-12);
            product *= step.likelihood_ratio;
        }
        prop_assert!((product / trace.combined_odds - 1.0).abs() <= 1e-12);
        prop_assert!((trace.combined_odds / (1.0 + trace.combined_odds) - p).abs() <= 1e-15);
        prop_assert_eq!(trace.probability, p);
        let extreme = posteriors.iter().any(|x| !(1e-12..=1.0 - 1e-12).contains(x));
        prop_assert_eq!(trace.clamped, extreme);
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn min_and_max_select_an_input(values in prop::collection::vec(0.0f64..=1.0, 1..6)) {
        let lo = combine_and(&values).unwrap();
        let hi = combine_or(&values).unwrap();
        prop_assert!(values.contains(&lo) && values.contains(&hi));
        prop_assert!(values.iter().all(|&v| lo <= v && v <= hi));
    }

    #[test]
    fn logical_rules_use_the_selected_link(l1 in consistent_link(), l2 in consistent_link(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let l2 = LinkParams { p_c: l1.p_c, ..l2 };
        let links = [l1, l2];
        let (p, trace) = infer_links(&links, RuleSet::Conjunctive, &[a, b]).unwrap();
        let chosen = if b < a { 1 } else { 0 };
        prop_assert_eq!(trace.steps[0].link, LinkRole::Evidence(chosen));
        prop_assert_eq!(p, propagate(&links[chosen], a.min(b)));
        prop_assert_eq!(trace.tie, a == b);
        let (p, trace) = infer_links(&links, RuleSet::Disjunctive, &[a, b]).unwrap();
        let chosen = if b > a { 1 } else { 0 };
        prop_assert_eq!(trace.steps[0].link, LinkRole::Evidence(chosen));
        prop_assert_eq!(p, propagate(&links[chosen], a.max(b)));
    }
}
