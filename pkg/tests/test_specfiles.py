import pytest

from cantordim.errors import ParameterDomainError, SpecFormatError
from cantordim.gauges import Interpolated, LogReciprocal, Power, PowerLog
from cantordim.sequences import Explicit, Geometric, Halved, PowerLaw
from cantordim.specfiles import (load_config, load_sequence_spec, parse_gauge,
                                 parse_sequence_spec, split_gauges)


def test_power_spec_with_comment(data_dir):
    spec = load_sequence_spec(data_dir / "power_half.spec")
    assert isinstance(spec.sequence, PowerLaw) and spec.sequence.dimension == 0.5
    assert spec.text == (data_dir / "power_half.spec").read_bytes().decode()


def test_halved_spec_resolves_inner_path(data_dir):
    spec = load_sequence_spec(data_dir / "halved_power.spec")
    assert isinstance(spec.sequence, Halved)
    assert isinstance(spec.sequence.inner, PowerLaw)


def test_explicit_spec_reads_terms(data_dir):
    seq = load_sequence_spec(data_dir / "small.spec").sequence
    assert isinstance(seq, Explicit) and seq.max_index == 3


def test_geometric_spec(data_dir):
    seq = load_sequence_spec(data_dir / "geometric_e1.spec").sequence
    assert isinstance(seq, Geometric)


@pytest.mark.parametrize("text", [
    "param.s = 0.5",
    "family = power_law\nparam.s = half",
    "family = power_law\nbogus = 1",
    "family = power_law\nparam.s 0.5",
    "family = explicit",
    "family = geometric\nparam.ratio = 0.5\nterms_file = x.terms",
])
def test_malformed_specs(text):
    with pytest.raises(SpecFormatError):
        parse_sequence_spec(text)


def test_out_of_domain_parameter():
    with pytest.raises(ParameterDomainError):
        parse_sequence_spec("family = power_law\nparam.s = 2")


def test_missing_spec_file(tmp_path):
    with pytest.raises(SpecFormatError):
        load_sequence_spec(tmp_path / "nope.spec")


def test_parse_gauges(data_dir):
    assert parse_gauge("power(0.5)") == Power(0.5)
    assert parse_gauge("logrec(1,1)") == LogReciprocal(1.0, 1.0)
    assert parse_gauge(" powerlog(0.5, 1) ") == PowerLog(0.5, 1.0)
    gauge = parse_gauge("associated(power_half.spec, 1000)", data_dir)
    assert isinstance(gauge, Interpolated) and gauge.spec() == "associated(power_half.spec,1000)"


@pytest.mark.parametrize("text", ["power", "power(x)", "spline(1)", "power(1,2,3)",
                                  "associated(a.spec)"])
def test_malformed_gauges(text):
    with pytest.raises(SpecFormatError):
        parse_gauge(text)


def test_split_gauges():
    assert split_gauges(["power(0.5); logrec(1,1)", "power(0.3)"]) == [
        "power(0.5)", "logrec(1,1)", "power(0.3)"]


def test_config_alias(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("h = power(0.5)\nmax-n = 1000\n")
    assert load_config(cfg) == {"gauge": "power(0.5)", "max_n": "1000"}
