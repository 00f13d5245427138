use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

fn with_module(code: &std::ffi::CStr) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "stresslift").unwrap();
        stresslift_py::stresslift_py(&m).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("sl", m).unwrap();
        globals.set_item("DATA", concat!(env!("CARGO_MANIFEST_DIR"), "/../../data")).unwrap();
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn k4_lifting_from_python() {
    with_module(
        cr#"
fw = sl.Framework(2, [(1, [0.0, 0.0]), (2, [4.0, 0.0]), (3, [2.0, 3.0]), (4, [2.0, 1.0])],
                  [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)])
basis = fw.self_stress_basis()
assert len(basis) == 1
s = basis[0]
assert s.is_self_stress(fw)
dl = sl.differential_lifting_2d(fw, s)
assert len(dl.chambers()) == 4
outer = [f for (_, bounded, f) in dl.chambers() if not bounded][0]
assert outer.max_abs() == 0.0
back = sl.recover_stress(fw, dl)
assert all(abs(w - back.get(*e)) < 1e-9 for e, w in s.items())
pl = sl.polyhedral_lifting(fw, s)
assert pl.continuity_defect() < 1e-9
assert abs(pl.value_at(10.0, 10.0)) < 1e-12
assert pl.to_obj().count("\nv ") == 4
"#,
    );
}

#[test]
fn errors_become_exceptions() {
    with_module(
        cr#"
try:
    sl.Framework(2, [(1, [0.0, 0.0]), (2, [0.0, 0.0])], [(1, 2)])
    raise AssertionError("coincident vertices accepted")
except sl.StressliftError as e:
    assert "same point" in str(e)
fw = sl.Framework(2, [(1, [0.0, 0.0]), (2, [1.0, 0.0]), (3, [0.0, 1.0])], [(1, 2), (2, 3), (1, 3)])
s = sl.Stress(fw, {(1, 2): 1.0})
assert not s.is_self_stress(fw)
try:
    sl.differential_lifting_2d(fw, s)
    raise AssertionError("non-equilibrium stress accepted")
except ValueError:
    pass
"#,
    );
}

#[test]
fn forms_and_grassmann_identities() {
    with_module(
        cr#"
import json, os
fw, s = sl.Framework.from_json(open(os.path.join(DATA, "k5.json")).read())
forms = sl.elementary_forms(fw, s)
assert len(forms) == 10
w = sl.lifting_of_word(fw, s, [(1, 2, 1), (1, 2, -1)])
assert w.max_abs() < 1e-12
assert abs(sl.flat_distance([[0, 0, 0]], [[0, 0, 1], [1, 0, 1], [0, 1, 1]]) + 1.0) < 1e-12
assert abs(sl.trivalent_monodromy_identity(0.3, 1.1, 0.2, -0.4, 0.7, 0.5, 2.0)) < 1e-9
a = [[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]]
b = [[0.5, 0, -1], [0.5, 0, 1], [3, 0, 1], [3, 0, -1]]
assert abs(sl.linking_number(a, b)) == 1
c, w = sl.PolytopalComplex.from_json(open(os.path.join(DATA, "cube_pair.json")).read())
assert c.num_polytopes == 24 and w is None
basis = c.forceload_basis()
assert len(basis) == 1
w = basis[0]
assert all(c.facet_monodromy(w, f).max_abs() < 1e-8 for f in range(c.num_facets))
path = json.load(open(os.path.join(DATA, "cube_pair_path.json")))["samples"]
v = c.grassmann_lifting(path, w)
assert v == v
report = sl.verify([("k5", fw.to_json(s))], seed=1)
assert report.exit_code == 0 and all(ok for _, ok, _ in report.checks())
"#,
    );
}
