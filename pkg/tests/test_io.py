import json

import pytest

from nesscrit.errors import ModelValidationError
from nesscrit.io import dump_model, dumps, format_csv, load_model, model_from_dict, model_to_dict, read_csv, write_csv

BASE = {
    "generators": [{"span": 2, "odd": [{"nu": 1, "g": 0}, {"nu": 1, "g": 0.1}],
                    "even": [{"nu": 0}, {"nu": 0}]}],
}


def test_round_trip():
    model = model_from_dict(BASE)
    again = model_from_dict(json.loads(dump_model(model)))
    assert model_to_dict(again) == model_to_dict(model)
    assert model_to_dict(model)["chain"] == "infinite"


def test_finite_chain_and_hamiltonian():
    data = dict(BASE, chain={"finite": {"L": 8, "periodic": False}},
                hamiltonian={"couplings": [{"offset": 1, "species": ["odd", "even"], "value": 0.5}]})
    model = model_from_dict(data)
    assert model.is_finite and model.chain.L == 8 and not model.chain.periodic
    out = model_to_dict(model)
    assert out["hamiltonian"]["couplings"][0]["value"] == 0.5


@pytest.mark.parametrize(
    "bad",
    [
        {},
        dict(BASE, extra=1),
        {"generators": [{"span": 0, "odd": [], "even": []}]},
        {"generators": [{"span": 2, "odd": [{"nu": 1}], "even": [{"nu": 0}, {"nu": 0}]}]},
        {"generators": [{"span": 1, "odd": [{"nu": -1}], "even": [{"nu": 0}]}]},
        {"generators": [{"span": 1, "odd": [{"nu": 0}], "even": [{"nu": 0}]}]},
        dict(BASE, chain={"finite": {"L": 0}}),
        dict(BASE, chain="circle"),
    ],
)
def test_invalid_models(bad):
    with pytest.raises(ModelValidationError):
        model_from_dict(bad)


def test_load_model_errors(tmp_path):
    with pytest.raises(ModelValidationError):
        load_model(tmp_path / "missing.json")
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ModelValidationError):
        load_model(p)


def test_dumps_canonical():
    text = dumps({"b": float("inf"), "a": complex(1, 2)})
    assert text == '{\n  "a": [\n    1.0,\n    2.0\n  ],\n  "b": null\n}\n'


def test_csv_format_and_read(tmp_path):
    text = format_csv(("d", "re", "im"), [(0, 1.0, 0.0), (1, 0.5, None)], {"method": "x"})
    assert text.splitlines()[0] == "# method: x"
    assert text.splitlines()[1] == "d,re,im"
    assert "\r" not in text
    p = write_csv(tmp_path / "a.csv", ("d", "re", "im"), [(0, 1.0, 0.0)], {"k": 1})
    assert read_csv(p) == [{"d": 0.0, "re": 1.0, "im": 0.0}]
