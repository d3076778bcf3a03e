"""Tests for ifslab.config."""

import json

import pytest

from ifslab.config import (
    SystemSpec,
    emit_config,
    load_config,
    parse_config,
    spec_hash,
)
from ifslab.errors import ParseError, ValidationError

ROTATION = {"type": "rotation", "theta": 0.25}


def _doc(**overrides) -> str:
    data = {"maps": [ROTATION, {"type": "rotation", "theta": 0.5}], "probs": [0.5, 0.5]}
    data.update(overrides)
    return json.dumps(data)


class TestParsing:
    """Tests for reading config documents."""

    def test_minimal_document_gets_defaults(self):
        """Test that omitted sections are filled in."""
        spec = parse_config(_doc())
        assert spec.budgets.node_budget == 2**24
        assert spec.stationary.count == 100000
        assert spec.eprop.deltas == [0.1, 0.01, 0.001, 0.0001]
        assert len(spec.observables) == 1
        assert spec.build_ifs().k == 2

    def test_bad_json_reports_position(self):
        """Test line and column on malformed JSON."""
        with pytest.raises(ParseError) as exc_info:
            parse_config('{\n  "maps": ,\n}')
        assert exc_info.value.line == 2
        assert exc_info.value.column is not None
        assert "line 2" in str(exc_info.value)

    def test_bad_type_reports_field(self):
        """Test the field path on a type error."""
        with pytest.raises(ParseError) as exc_info:
            parse_config(_doc(probs=[0.5, "half"]))
        assert exc_info.value.field == "probs.1"

    def test_unknown_key_rejected(self):
        """Test that extra keys are errors."""
        with pytest.raises(ParseError) as exc_info:
            parse_config(_doc(bogus=1))
        assert exc_info.value.field == "bogus"

    def test_unknown_map_type(self):
        """Test the map discriminator."""
        with pytest.raises(ParseError):
            parse_config(_doc(maps=[{"type": "tent", "theta": 0.1}, ROTATION]))

    def test_load_from_file(self, demo_config_path):
        """Test loading the bundled demo config."""
        spec = load_config(demo_config_path)
        assert [m.type for m in spec.maps] == ["arnold", "arnold"]
        assert [o.type for o in spec.observables] == ["harmonic", "pwl"]


class TestInvariants:
    """Tests for post-parse validation."""

    def test_probs_sum(self):
        """Test weights that do not sum to one."""
        with pytest.raises(ValidationError) as exc_info:
            parse_config(_doc(probs=[0.5, 0.6]))
        assert exc_info.value.invariant == "probs_sum"

    def test_probs_length(self):
        """Test one weight per map."""
        with pytest.raises(ValidationError) as exc_info:
            parse_config(_doc(probs=[1.0]))
        assert exc_info.value.invariant == "probs_length"

    def test_probs_positive(self):
        """Test that zero weights are rejected."""
        with pytest.raises(ValidationError) as exc_info:
            parse_config(_doc(probs=[1.0, 0.0]))
        assert exc_info.value.invariant == "probs_positive"

    def test_non_monotone_map(self):
        """Test an Arnold map past the diffeomorphism range."""
        maps = [{"type": "arnold", "theta": 0.0, "eps": 1.5}, ROTATION]
        with pytest.raises(ValidationError) as exc_info:
            parse_config(_doc(maps=maps))
        assert exc_info.value.invariant == "homeo_valid[0]"

    def test_understated_lipschitz(self):
        """Test an observable whose declared constant is too small."""
        observables = [{"type": "harmonic", "a": [1.0], "lipschitz": 1.0}]
        with pytest.raises(ValidationError) as exc_info:
            parse_config(_doc(observables=observables))
        assert exc_info.value.invariant == "observable_lipschitz[0]"

    def test_observable_index(self):
        """Test lookup past the last observable."""
        spec = parse_config(_doc())
        with pytest.raises(ValidationError) as exc_info:
            spec.observable(3)
        assert exc_info.value.invariant == "observable_index"


class TestEmit:
    """Tests for emitting and hashing configs."""

    def test_round_trip(self, demo_config_path):
        """Test that the emitted document parses back to the same spec."""
        spec = load_config(demo_config_path)
        again = parse_config(emit_config(spec))
        assert again == spec
        assert spec_hash(again) == spec_hash(spec)

    def test_hash_ignores_key_order(self):
        """Test that the hash depends on content only."""
        a = parse_config('{"maps": [{"type": "rotation", "theta": 0.25}], "probs": [1.0]}')
        b = parse_config('{"probs": [1.0], "maps": [{"theta": 0.25, "type": "rotation"}]}')
        assert spec_hash(a) == spec_hash(b)

    def test_hash_tracks_parameters(self):
        """Test that changing a section parameter changes the hash."""
        a = parse_config(_doc())
        b = parse_config(_doc(simulate={"n": 10}))
        assert spec_hash(a) != spec_hash(b)
        assert len(spec_hash(a)) == 64

    def test_emitted_is_defaulted(self):
        """Test that every section appears in the emitted document."""
        data = json.loads(emit_config(SystemSpec.model_validate(json.loads(_doc()))))
        for section in ("budgets", "simulate", "couple", "chi"):
            assert section in data
