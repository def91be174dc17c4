use darboux_py::{casoratian, potential_from_casoratians, run_example, Chain, DarbouxStep, Seed, Sequence};
use pyo3::prelude::*;

fn with_py<R>(f: impl FnOnce(Python<'_>) -> R) -> R {
    Python::initialize();
    Python::attach(f)
}

fn free_seeds(py: Python<'_>, backend: &str) -> (Sequence, Seed, Seed) {
    let v0 = Sequence::from_expr("0", 0, 30, backend).unwrap();
    let num = |s: &str| s.into_pyobject(py).unwrap().into_any();
    let s1 = Seed::generate(&v0, &num("0"), &num("1"), &num("2")).unwrap();
    let s2 = Seed::generate(&v0, &num("-1/4"), &num("2"), &num("8/3")).unwrap();
    (v0, s1, s2)
}

#[test]
fn single_step_over_the_free_particle() {
    with_py(|py| {
        let (v0, s1, _) = free_seeds(py, "rational");
        let step = DarbouxStep::new(&v0, &s1).unwrap();
        assert_eq!(step.f1().at(0).unwrap(), "1");
        assert_eq!(step.v1().at(0).unwrap(), "1/3");
        assert_eq!(step.residuals().unwrap(), ("0".to_string(), "0".to_string()));
        let image = step.transform(&Sequence::from_expr("3 + 2*n", 0, 30, "rational").unwrap()).unwrap();
        assert_eq!(image.at(4).unwrap(), "1/5");
    });
}

#[test]
fn chain_and_casoratian_forms_agree() {
    with_py(|py| {
        let (v0, s1, s2) = free_seeds(py, "rational");
        let chain = Chain::new(&v0, None).extend(&s1).unwrap().extend(&s2).unwrap();
        assert_eq!(chain.k(), 2);
        let v2 = chain.potential(2).unwrap();
        assert_eq!(v2.at(0).unwrap(), "71/12");
        let closed = potential_from_casoratians(vec![s1.psi(), s2.psi()], &v0, None).unwrap();
        for n in closed.lo()..=closed.hi() {
            assert_eq!(closed.at(n).unwrap(), v2.at(n).unwrap());
        }
        // det [[1, 2], [2, 8/3]]
        assert_eq!(casoratian(vec![s1.psi(), s2.psi()], 0).unwrap(), "-4/3");
        assert!(chain.verify(None).unwrap().contains("\"passed\":true"));
        assert!(chain.superpotential(0).is_err());
        assert!(chain.potential(3).is_err());
    });
}

#[test]
fn backends_do_not_mix() {
    with_py(|py| {
        let (v0, _, _) = free_seeds(py, "rational");
        let (_, f1, _) = free_seeds(py, "float");
        assert!(DarbouxStep::new(&v0, &f1).is_err());
        assert_eq!(f1.psi().backend(), "float");
    });
}

#[test]
fn examples_report_as_json() {
    let text = run_example("3").unwrap();
    assert!(text.contains("\"passed\":true"));
    assert!(run_example("nope").is_err());
}
