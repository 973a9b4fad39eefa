//! Randomised properties across modules, checked against enumeration.

use netcap::cuts::{check_validity, cutset_inequality, CutsetSpec};
use netcap::formulate::build;
use netcap::projlab::{project, similar_projections_agree, Variant, DEFAULT_BOX_LIMIT};
use netcap::solver::accommodates;
use netcap::{CapacityVector, Error, FacilityMenu, Instance, ModelKind, Network, Rational, TrafficMatrix, VarRef};
use proptest::prelude::*;

fn quarter() -> impl Strategy<Value = Rational> {
    (0i64..=8).prop_map(|n| Rational::new(n, 4))
}

fn triangle_traffic() -> impl Strategy<Value = TrafficMatrix> {
    proptest::collection::vec(quarter(), 6).prop_map(|v| {
        let net = Network::complete(&["1", "2", "3"]).unwrap();
        let mut t = TrafficMatrix::for_network(&net);
        let pairs = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];
        for ((i, j), x) in pairs.into_iter().zip(v) {
            t.set_index(i, j, x).unwrap();
        }
        t
    })
}

fn kind() -> impl Strategy<Value = ModelKind> {
    prop_oneof![Just(ModelKind::Undirected), Just(ModelKind::Bidirected), Just(ModelKind::Directed)]
}

fn unit_instance(t: TrafficMatrix) -> Instance {
    let net = Network::complete(t.nodes()).unwrap();
    Instance::bare(net, FacilityMenu::single(1).unwrap(), t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn accommodation_is_upward_closed(t in triangle_traffic(), k in kind(), low in proptest::collection::vec(0u64..3, 6), bump in proptest::collection::vec(0u64..2, 6)) {
        let inst = unit_instance(t);
        let model = build(&inst, k).unwrap();
        let vars: Vec<VarRef> = model.capacity_vars().collect();
        let y = CapacityVector::from_pairs(vars.iter().copied().zip(low.iter().copied()));
        let z = CapacityVector::from_pairs(vars.iter().copied().zip(low.iter().zip(&bump).map(|(a, b)| a + b)));
        prop_assert!(y.le(&z));
        if accommodates(&inst, k, &y).unwrap() {
            prop_assert!(accommodates(&inst, k, &z).unwrap());
        }
    }

    #[test]
    fn pairwise_similar_traffic_has_the_same_projection(t in triangle_traffic(), shares in proptest::collection::vec(0i64..=4, 3)) {
        let mut other = TrafficMatrix::new(t.nodes());
        for ((u, v), share) in [(0, 1), (0, 2), (1, 2)].into_iter().zip(shares) {
            let sigma = t.get(u, v) + t.get(v, u);
            let part = &sigma * &Rational::new(share, 4);
            other.set_index(v, u, &sigma - &part).unwrap();
            other.set_index(u, v, part).unwrap();
        }
        let inst = unit_instance(t);
        prop_assert!(similar_projections_agree(&inst, &other, 3, DEFAULT_BOX_LIMIT).unwrap());
    }

    #[test]
    fn bidirected_projection_contains_undirected(t in triangle_traffic()) {
        // Every undirected design also works when each direction gets the full capacity.
        let inst = unit_instance(t);
        let u = project(&inst, ModelKind::Undirected, Variant::Plain, Some(3), DEFAULT_BOX_LIMIT).unwrap();
        let b = project(&inst, ModelKind::Bidirected, Variant::Plain, Some(3), DEFAULT_BOX_LIMIT).unwrap();
        for y in &u.minimal {
            prop_assert!(b.contains(y));
        }
    }

    #[test]
    fn two_node_cuts_are_valid(
        t12 in quarter(), t21 in quarter(),
        caps in prop_oneof![Just(vec![1]), Just(vec![1, 2]), Just(vec![2, 3]), Just(vec![1, 4])],
        q_mask in 1usize..4, plus in any::<bool>(), minus in any::<bool>(), s in 0usize..2,
    ) {
        let net = Network::complete(&["1", "2"]).unwrap();
        let t = TrafficMatrix::for_network(&net).with("1", "2", t12).unwrap().with("2", "1", t21).unwrap();
        let inst = Instance::bare(net.clone(), FacilityMenu::new(caps.clone()).unwrap(), t).unwrap();
        let spec = CutsetSpec {
            side_u: [0].into(),
            commodities: (0..2).filter(|k| q_mask & (1 << k) != 0).collect(),
            s_plus: if plus { [net.arc_index(0, 1).unwrap()].into() } else { Default::default() },
            s_minus: if minus { [net.arc_index(1, 0).unwrap()].into() } else { Default::default() },
            facility: s % caps.len(),
        };
        match cutset_inequality(&inst, &spec) {
            Err(Error::VacuousCut) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
            Ok(cut) => {
                let model = build(&inst, ModelKind::Directed).unwrap();
                let report = check_validity(&model, &cut, 3, DEFAULT_BOX_LIMIT).unwrap();
                prop_assert!(report.is_valid(), "{:?}", report.violations);
            }
        }
    }
}
