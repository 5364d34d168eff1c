import pytest

from chrotop.errors import BadArity
from chrotop.simplicial import CarrierMap, Complex, Simplex, Vertex
from chrotop.tasks import (
    Task,
    inputless_consensus,
    load_task_json,
    set_agreement,
    validate_task,
)


def test_consensus_two_processes():
    task = inputless_consensus(2)
    assert len(task.inputs.facets) == 1
    assert len(task.outputs.facets) == 2
    left = Simplex([Vertex(0, 0)])
    image = task.delta(left)
    assert image.facets == (Simplex([Vertex(0, 0)]),)
    full = task.inputs.facets[0]
    assert task.delta(full).facets == task.outputs.facets


def test_consensus_three_processes_pair_face():
    task = inputless_consensus(3)
    pair = Simplex([Vertex(0, 0), Vertex(1, 1)])
    image = task.delta(pair)
    expected = {
        Simplex([Vertex(0, v), Vertex(1, v)]) for v in (0, 1)
    }
    assert set(image.facets) == expected


def test_consensus_agreement_and_validity_invariant():
    task = inputless_consensus(3)
    for face in task.inputs.simplexes():
        inputs = {v.label for v in face}
        for facet in task.delta(face).facets:
            values = {v.label for v in facet}
            assert len(values) == 1
            assert values <= inputs


def test_set_agreement_two_matches_boundary():
    task = set_agreement(2)
    assert {f.dim for f in task.outputs.facets} == {0}
    assert len(task.outputs.facets) == 2


def test_set_agreement_three_structure():
    task = set_agreement(3)
    facets = task.outputs.facets
    assert len(facets) == 3
    assert all(f.dim == 1 for f in facets)
    assert len(task.outputs.simplexes()) == 6
    solo = Simplex([Vertex(0, 0)])
    assert task.delta(solo).facets == (Simplex([Vertex(0, 0)]),)
    full = task.inputs.facets[0]
    assert task.delta(full).facets == facets


def test_set_agreement_never_all_values():
    task = set_agreement(3)
    for s in task.outputs.simplexes():
        assert len({v.label for v in s}) < 3


def test_constructors_validate():
    assert validate_task(inputless_consensus(2)).valid
    assert validate_task(inputless_consensus(3)).valid
    assert validate_task(set_agreement(3)).valid


def test_bad_arity():
    with pytest.raises(BadArity):
        inputless_consensus(1)
    with pytest.raises(BadArity):
        set_agreement(0)


def test_broken_delta_monotonicity_witnessed():
    base = inputless_consensus(2)
    images = dict(base.delta.images)
    full = base.inputs.facets[0]
    # shrink the image of the full simplex below a vertex image
    images[full] = Complex([Simplex([Vertex(0, 0)])])
    images[Simplex([Vertex(1, 1)])] = base.outputs
    broken = Task("broken", base.inputs, base.outputs, CarrierMap(images))
    report = validate_task(broken)
    assert not report.valid
    assert report.carrier.witness is not None
    tau, tau2 = report.carrier.witness
    assert tau.issubset(tau2)


def test_json_round_trip():
    task = inputless_consensus(2)
    import json

    text = json.dumps(task.to_json_obj())
    loaded = load_task_json(text)
    assert loaded.inputs.facets == task.inputs.facets
    assert loaded.outputs.facets == task.outputs.facets
    for s in task.inputs.simplexes():
        assert loaded.delta(s).facets == task.delta(s).facets
    assert validate_task(loaded).valid
