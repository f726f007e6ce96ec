use std::collections::BTreeSet;

use proptest::prelude::*;
use rado::behavior::{
    self, classify_binary, classify_unary, compose_types, is_canonical_partitioned, minimal_representatives, minimality_class, reachable_types,
    term_type, AlgebraError, BinaryType, TypeTerm, UnaryKind,
};
use rado::behavior::algebra::realize_term_sample;
use rado::operations::{self, BinaryTypeSpec, Combine, FunctionSample, Slice};
use rado::{induced_subgraph, Vertex};

fn range(n: u64) -> Vec<Vertex> {
    (0..n).map(Vertex::new).collect()
}

fn t(s: &str) -> TypeTerm {
    TypeTerm::parse(s).unwrap()
}

fn subsets(universe: u64, size: usize, mut visit: impl FnMut(&[Vertex])) {
    fn go(start: u64, universe: u64, size: usize, acc: &mut Vec<Vertex>, visit: &mut dyn FnMut(&[Vertex])) {
        if acc.len() == size {
            visit(acc);
            return;
        }
        for x in start..universe {
            acc.push(Vertex::new(x));
            go(x + 1, universe, size, acc, visit);
            acc.pop();
        }
    }
    go(0, universe, size, &mut Vec::new(), &mut visit);
}

fn unary_constructors_classify(universe: u64) -> usize {
    let mut checked = 0;
    subsets(universe, 6, |s| {
        let g = induced_subgraph(s);
        if g.edge_count() == 0 || g.edge_count() == 15 {
            return;
        }
        assert_eq!(classify_unary(&operations::make_eE(s), &g), Ok(UnaryKind::EE));
        assert_eq!(classify_unary(&operations::make_eN(s), &g), Ok(UnaryKind::EN));
        assert_eq!(classify_unary(&operations::make_minus(s), &g), Ok(UnaryKind::Minus));
        assert_eq!(classify_unary(&operations::make_constant(s, &s[0]), &g), Ok(UnaryKind::Constant));
        assert_eq!(classify_unary(&FunctionSample::identity(s), &g), Ok(UnaryKind::Identity));
        checked += 1;
    });
    checked
}

#[test]
fn unary_constructors_on_six_subsets_of_twelve() {
    // 924 subsets, 28 of them cliques or independent sets
    assert_eq!(unary_constructors_classify(12), 896);
}

#[test]
#[ignore = "every 6-subset of 0..=30; several minutes in debug builds"]
fn unary_constructors_on_six_subsets_of_thirty_one() {
    unary_constructors_classify(31);
}

#[test]
fn one_sided_graphs_are_under_witnessed() {
    let k = range(3);
    let g = induced_subgraph(&[Vertex::new(0), Vertex::new(1), Vertex::new(3)]);
    assert_eq!(g.edge_count(), 3);
    assert!(classify_unary(&FunctionSample::identity(&k), &g).is_err());
}

#[test]
fn partitioned_switch() {
    let s = range(12);
    let g = induced_subgraph(&s);
    for pivot in [0u64, 3, 7] {
        let f = operations::make_switch(&[Vertex::new(pivot)].into(), &s).unwrap();
        let p = pivot as usize;
        let rest: Vec<usize> = (0..12).filter(|&i| i != p).collect();
        let table = is_canonical_partitioned(&f, &g, &[vec![p], rest.clone()]).unwrap();
        assert!(table.canonical);
        assert_eq!(table.get(1, 1).unwrap().kind(), Some(UnaryKind::Identity));
        assert_eq!(table.get(0, 1).unwrap().kind(), Some(UnaryKind::Minus));
        let whole = is_canonical_partitioned(&f, &g, &[(0..12).collect()]).unwrap();
        assert!(!whole.canonical);
    }
}

/// The representatives are closed under duals, so the extra four are the
/// coordinate-swapped forms of the last four classes.
fn all_specs_with_duals() -> Vec<BinaryTypeSpec> {
    let reps = minimal_representatives();
    for spec in reps {
        assert!(reps.contains(&spec.dual()));
    }
    let mut specs = reps.to_vec();
    specs.extend([
        BinaryTypeSpec::uniform(Combine::P2, Slice::E, Slice::E),
        BinaryTypeSpec::uniform(Combine::P2, Slice::N, Slice::N),
        BinaryTypeSpec::uniform(Combine::P1, Slice::Id, Slice::E),
        BinaryTypeSpec::uniform(Combine::P1, Slice::Id, Slice::N),
    ]);
    specs
}

#[test]
fn round_trip_minimal_and_duals() {
    let specs = all_specs_with_duals();
    assert_eq!(specs.len(), 13);
    let s = range(6);
    for spec in specs {
        let f = operations::make_binary_injection(&spec, &s, &s);
        let ty = classify_binary(&f).unwrap();
        assert_eq!(ty.spec(), Some(spec));
        assert_eq!(ty, BinaryType::from_spec(&spec));
        assert!(minimality_class(&ty).unwrap().is_some());
    }
}

#[test]
fn round_trip_on_shifted_grids() {
    let a: Vec<Vertex> = [2, 5, 6, 9, 11].map(Vertex::new).to_vec();
    let b: Vec<Vertex> = [0, 1, 4, 8, 13].map(Vertex::new).to_vec();
    for spec in all_specs_with_duals() {
        let f = operations::make_binary_injection(&spec, &a, &b);
        assert_eq!(classify_binary(&f).unwrap().spec(), Some(spec));
    }
}

#[test]
fn dual_samples_classify_to_dual_types() {
    let s = range(6);
    for spec in minimal_representatives() {
        let d = operations::dual(&operations::make_binary_injection(&spec, &s, &s)).unwrap();
        assert_eq!(classify_binary(&d).unwrap().spec(), Some(spec.dual()), "{spec}");
    }
}

#[test]
fn non_minimal_types() {
    use Combine::*;
    for spec in [
        BinaryTypeSpec::new(Max, Min, Slice::Id, Slice::Id),
        BinaryTypeSpec::new(P1, P2, Slice::Id, Slice::Id),
        BinaryTypeSpec::new(Min, Max, Slice::E, Slice::E),
    ] {
        assert_eq!(behavior::minimality_class_of_spec(&spec), None, "{spec}");
    }
}

/// Prediction against the concrete composite on a 6x6 grid.
fn sound(term: &TypeTerm, specs: &[BinaryTypeSpec]) -> Result<BinaryType, AlgebraError> {
    let types: Vec<BinaryType> = specs.iter().map(BinaryType::from_spec).collect();
    let predicted = term_type(term, &types)?;
    let s = range(6);
    let sample = realize_term_sample(term, specs, &s, &s).unwrap();
    let observed = classify_binary(&sample).unwrap();
    assert_eq!(predicted, observed, "{term} over {:?}", specs.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    Ok(predicted)
}

#[test]
fn skew_identities_hold_concretely() {
    let f = BinaryTypeSpec::uniform(Combine::P2, Slice::E, Slice::Id);
    for term in ["f(v,u)", "f(u,f(u,v))", "f(v,f(u,v))", "f(f(u,v),v)", "f(f(u,v),u)", "f(f(u,v),f(v,u))"] {
        let ty = sound(&t(term), &[f]).unwrap();
        assert_eq!(ty.straight, ty.twisted);
    }
    let g = sound(&t("f(v,u)"), &[f]).unwrap();
    assert_eq!((g.straight, g.neq_eq, g.eq_neq), (Some(Combine::P1), Some(Slice::Id), Some(Slice::E)));
}

#[test]
fn mixed_type_eliminations_hold_concretely() {
    for pi in [Combine::P1, Combine::P2] {
        let f = BinaryTypeSpec::new(Combine::Max, pi, Slice::Id, Slice::Id);
        let g = sound(&t("f(f(u,v), f(u,a(v)))"), &[f]).unwrap();
        assert_eq!((g.straight, g.twisted), (Some(Combine::Max), Some(Combine::Max)));
    }
    let f = BinaryTypeSpec::new(Combine::Max, Combine::Min, Slice::Id, Slice::Id);
    let h = sound(&t("f(f(u,v), a(v))"), &[f]).unwrap();
    assert_eq!((h.straight, h.twisted), (Some(Combine::P2), Some(Combine::P2)));
    let outer = BinaryType::from_spec(&f);
    assert_eq!(compose_types(&outer, &t("f(u,v)"), &t("a(v)"), &[]).unwrap(), h);
}

#[test]
fn projection_with_domination_reaches_skew_class() {
    let f = BinaryTypeSpec::uniform(Combine::P1, Slice::E, Slice::E);
    let g = sound(&t("f(u,f(u,v))"), &[f]).unwrap();
    assert_eq!(minimality_class(&g).unwrap(), Some(8));
    let n = BinaryTypeSpec::uniform(Combine::P1, Slice::N, Slice::N);
    let g = sound(&t("f(u,f(u,v))"), &[n]).unwrap();
    assert_eq!(minimality_class(&g).unwrap(), Some(9));
}

#[test]
fn reachable_classes_from_each_minimal_type() {
    let expected: [&[u8]; 9] = [&[1], &[2], &[3], &[4], &[5], &[6, 8], &[7, 9], &[8], &[9]];
    for (spec, classes) in minimal_representatives().iter().zip(expected) {
        let reachable = reachable_types(&BinaryType::from_spec(spec), 4).unwrap();
        let found: BTreeSet<u8> = reachable.iter().filter_map(|g| minimality_class(g).unwrap()).collect();
        assert_eq!(found, classes.iter().copied().collect::<BTreeSet<u8>>(), "{spec}");
        assert!(reachable.iter().all(|g| minimality_class(g).unwrap().is_some()), "{spec}");
    }
}

fn arb_term(depth: u32) -> impl Strategy<Value = TypeTerm> {
    let leaf = prop_oneof![Just(TypeTerm::U), Just(TypeTerm::V)];
    leaf.prop_recursive(depth, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(TypeTerm::alpha),
            (inner.clone(), inner).prop_map(|(l, r)| TypeTerm::apply(0, l, r)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn algebra_agrees_with_realized_terms(term in arb_term(3), index in 0usize..13) {
        let spec = all_specs_with_duals()[index];
        match sound(&term, &[spec]) {
            Ok(_) | Err(AlgebraError::NotEssential) | Err(AlgebraError::NotInjective) => {}
            Err(e) => prop_assert!(false, "{term}: {e}"),
        }
    }
}
