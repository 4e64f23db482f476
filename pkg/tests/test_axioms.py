import json

import pytest

from poissontp.axioms import (
    DEFAULT_TOLERANCES,
    SuiteConfig,
    run_cm_suite,
    run_lattice_suite,
    run_qm_suite,
    run_reconstruction_suite,
)
from poissontp.errors import InvalidSpace
from poissontp.schemas import REPORT
from poissontp.states import StateSpace

import jsonschema

FAST = dict(trials=8, rk4_trials=1, qm2_samples=10)


def assert_consistent(rep):
    doc = rep.to_json()
    jsonschema.validate(doc, REPORT)
    assert doc["pass"] == all(c["pass"] for c in doc["checks"])
    keys = [(-1 if c["sector"] is None else c["sector"], c["name"]) for c in doc["checks"]]
    assert keys == sorted(keys)


def test_qm_suite_qubit():
    rep = run_qm_suite(StateSpace.quantum(2), SuiteConfig(seed=7, **FAST))
    assert rep.passed, rep.failures()
    assert rep.get("qm3_leaf_rank", 0).worst == 0
    assert rep.get("unitarity_exact", 0).worst <= 1e-10
    assert "model property" in rep.get("flow_invariance_any_observable", 0).note
    assert_consistent(rep)


def test_qm_suite_two_sectors():
    rep = run_qm_suite(StateSpace.quantum(2, 3), SuiteConfig(**FAST))
    assert rep.passed, rep.failures()
    assert "leaf rank 2 " in rep.get("qm3_leaf_rank", 0).note
    assert "leaf rank 4 " in rep.get("qm3_leaf_rank", 1).note
    assert rep.get("qm3_cross_sector_zero").worst == 0
    assert rep.get("qm2_cross_sector").worst == 0


def test_qm_suite_dim1_sector_skips():
    rep = run_qm_suite(StateSpace.quantum(1, 2), SuiteConfig(**FAST))
    assert rep.passed
    q = rep.get("qm2", 0)
    assert q.trials == 0 and q.worst is None and q.note.startswith("skipped")
    assert "leaf rank 0 " in rep.get("qm3_leaf_rank", 0).note
    assert rep.get("qm3_leaf_rank", 0).worst == 0


def test_cm_suite():
    rep = run_cm_suite(StateSpace.classical([f"x{i}" for i in range(5)]), SuiteConfig(**FAST))
    assert rep.passed, rep.failures()
    assert "5" in rep.get("cm_sectors").note
    assert "informational" in rep.get("canonical_bracket_qp").note
    one = run_cm_suite(StateSpace.classical(["only"]), SuiteConfig(**FAST))
    assert one.passed
    assert_consistent(one)


def test_suite_preconditions():
    with pytest.raises(InvalidSpace):
        run_qm_suite(StateSpace.classical("ab"))
    with pytest.raises(InvalidSpace):
        run_cm_suite(StateSpace.quantum(2))
    with pytest.raises(InvalidSpace):
        run_reconstruction_suite(StateSpace.quantum(9))
    with pytest.raises(ValueError):
        SuiteConfig(trials=0)
    with pytest.raises(ValueError):
        SuiteConfig(tolerances={"qm2": 0.0})


def test_reconstruction_suite_equal_hbar():
    rep = run_reconstruction_suite(StateSpace.quantum(2, 2), SuiteConfig(trials=5))
    assert rep.passed, rep.failures()
    assert "[2, 2]" in rep.get("algebra_blocks").note
    for k in (0, 1):
        assert rep.get("hbar_roundtrip", k).worst <= 1e-9


def test_reconstruction_suite_distinct_hbar():
    rep = run_reconstruction_suite(StateSpace.quantum(2, 3, hbar=(1.0, 2.0)), SuiteConfig(trials=5))
    assert rep.passed, rep.failures()
    assert rep.get("hbar_roundtrip", 1).worst <= 1e-9
    assert "true hbar 2" in rep.get("hbar_roundtrip", 1).note
    assert rep.get("hbar_sector_consistency").note.startswith("informational")


def test_reconstruction_dim6_associativity():
    rep = run_reconstruction_suite(StateSpace.quantum(6), SuiteConfig(trials=5))
    assert rep.get("star_associativity", 0).worst <= 1e-9
    assert rep.passed


def test_lattice_suite():
    rep = run_lattice_suite(4, 50, SuiteConfig(trials=10), atoms=50)
    assert rep.passed
    assert rep.get("lattice_orthomodular", 0).trials == 50


def test_determinism_and_jobs():
    space = StateSpace.quantum(2, 3)
    a = json.dumps(run_qm_suite(space, SuiteConfig(seed=3, **FAST)).to_json())
    b = json.dumps(run_qm_suite(space, SuiteConfig(seed=3, **FAST)).to_json())
    c = json.dumps(run_qm_suite(space, SuiteConfig(seed=3, jobs=4, **FAST)).to_json())
    assert a == b == c
    d = json.dumps(run_qm_suite(space, SuiteConfig(seed=4, **FAST)).to_json())
    assert a != d


def test_monotone_in_trials():
    space = StateSpace.quantum(3)
    small = run_qm_suite(space, SuiteConfig(trials=5, rk4_trials=1, qm2_samples=5))
    large = run_qm_suite(space, SuiteConfig(trials=12, rk4_trials=1, qm2_samples=5))
    assert small.passed and large.passed
    for rec in small.checks:
        other = large.get(rec.name, rec.sector)
        if rec.worst is not None and rec.trials != other.trials:
            # earlier trials are replayed, so the running worst can only grow
            assert other.worst >= rec.worst


def test_tolerance_override_can_fail():
    rep = run_qm_suite(StateSpace.quantum(2), SuiteConfig(tolerances={"unitarity_rk4": 1e-300}, **FAST))
    assert not rep.passed
    assert [c.name for c in rep.failures()] == ["unitarity_rk4"]
    assert rep.to_json()["pass"] is False


def test_every_default_tolerance_is_used():
    names = set()
    for rep in (
        run_qm_suite(StateSpace.quantum(2, 2), SuiteConfig(**FAST)),
        run_cm_suite(StateSpace.classical("ab"), SuiteConfig(**FAST)),
        run_reconstruction_suite(StateSpace.quantum(2, 2), SuiteConfig(trials=2)),
        run_lattice_suite(2, 5, SuiteConfig(trials=2)),
    ):
        names |= {c.name for c in rep.checks}
    assert names == set(DEFAULT_TOLERANCES)
