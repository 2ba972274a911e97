import numpy as np
import pytest

from fracbvp import ONE, PowerSum, WeightSpec, solve_linear
from fracbvp.cli import (
    EXIT_CONDITION_H,
    EXIT_NO_CONVERGENCE,
    EXIT_OK,
    EXIT_PARSE,
    WeightParseError,
    format_weight,
    main,
    parse_forcing,
    parse_nonlinearity,
    parse_weight,
)

from helpers import forcing


def _read_csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


# --- grammar -------------------------------------------------------------------


def test_parse_weight_bare_power():
    w = parse_weight("power:1.2")
    assert w.beta == 1.2
    assert w.regular == ONE


def test_parse_weight_zero_is_constant_weight():
    w = parse_weight("power:0")
    assert w.beta == 0.0
    assert w(0.5) == 1.0


def test_parse_weight_with_sum():
    w = parse_weight("power:0*sum:1,0.6")
    assert w.beta == 0.0
    assert w.regular.terms == ((1.0, 0.6),)
    w = parse_weight("power:0.5*sum:2,0;-1,1.5")
    assert w.regular.terms == ((2.0, 0.0), (-1.0, 1.5))


@pytest.mark.parametrize(
    "text,pos",
    [
        ("pow:1.2", 0),
        ("power:", 6),
        ("power:-1", 6),
        ("power:1.2*sum", 9),
        ("power:0*sum:1", 13),
        ("power:0*sum:1,-0.5", 14),
        ("power:0*sum:1,0.5;;", 18),
    ],
)
def test_parse_weight_errors_carry_positions(text, pos):
    with pytest.raises(WeightParseError) as err:
        parse_weight(text)
    assert err.value.position == pos


def test_weight_format_round_trip_is_canonical():
    for text in ("power:1.2", "power:0*sum:1,0.6", "power:0.5*sum:-1,1.5;2,0"):
        canon = format_weight(parse_weight(text))
        assert format_weight(parse_weight(canon)) == canon


def test_parse_forcing_accepts_both_grammars():
    a = parse_forcing("power:0.7*sum:-0.5,0;1,1")
    assert a.beta == 0.7
    b = parse_forcing("-0.5*t^-0.7 + 1*t^0.3")
    assert b.beta == pytest.approx(0.7)
    s = np.array([0.3, 0.9])
    assert a(s) == pytest.approx(b(s), rel=1e-12)


def test_parse_nonlinearity():
    assert parse_nonlinearity("const:1").kind == "constant"
    assert parse_nonlinearity("linear:2.5").params == (2.5,)
    assert parse_nonlinearity("power:0.5").params == (0.5,)
    assert parse_nonlinearity("affine:0.5,1").params == (0.5, 1.0)
    for bad in ("cubic:1", "affine:1", "power:0", "const:1x"):
        with pytest.raises(WeightParseError):
            parse_nonlinearity(bad)


# --- solve command ----------------------------------------------------------------


def test_solve_classical_csv(tmp_path):
    out = tmp_path / "classical.csv"
    code = main([
        "solve", "--alpha", "2", "--weight", "power:0", "--f", "const:1",
        "--n", "128", "--out", str(out),
    ])
    assert code == EXIT_OK
    header, rows = _read_csv(out)
    assert header == ["t", "u", "du", "q"]
    assert len(rows) == 129
    t = np.array([float(r[0]) for r in rows])
    u = np.array([float(r[1]) for r in rows])
    assert np.max(np.abs(u - t * (1.0 - t) / 2.0)) <= 1e-8
    assert rows[0][2] == "" and rows[-1][2] == ""
    assert float(rows[0][3]) == 0.0


def test_solve_forcing_csv_round_trips_bit_exactly(tmp_path):
    out = tmp_path / "u3.csv"
    g = forcing("u3")
    text = " + ".join(f"{c!r}*t^{lam!r}" for c, lam in g)
    code = main([
        "solve", "--alpha", "1.5", "--forcing", text,
        "--n", "128", "--out", str(out),
    ])
    assert code == EXIT_OK
    _, rows = _read_csv(out)
    reread = np.array([float(r[1]) for r in rows])
    sol = solve_linear(g, 1.5, 128)
    assert np.array_equal(reread, sol.values)
    # and the text form itself is stable under rewrite
    for r in rows:
        assert format(float(r[1]), ".17g") == r[1]


def test_solve_recovers_u3_within_tolerance(tmp_path):
    out = tmp_path / "u3.csv"
    g = forcing("u3")
    text = " + ".join(f"{c!r}*t^{lam!r}" for c, lam in g)
    code = main([
        "solve", "--alpha", "1.5", "--forcing", text,
        "--n", "512", "--out", str(out),
    ])
    assert code == EXIT_OK
    _, rows = _read_csv(out)
    t = np.array([float(r[0]) for r in rows])
    u = np.array([float(r[1]) for r in rows])
    exact = t**0.2 * (1.0 - t)
    assert np.max(np.abs(u - exact)) <= 2e-3


def test_solve_condition_h_violation_exit_code(tmp_path, capsys):
    code = main([
        "solve", "--alpha", "1.5", "--weight", "power:1.6",
        "--out", str(tmp_path / "x.csv"),
    ])
    assert code == EXIT_CONDITION_H
    err = capsys.readouterr().err
    assert "-0.1" in err


def test_solve_parse_error_exit_code(tmp_path):
    code = main([
        "solve", "--alpha", "1.5", "--weight", "power:abc",
        "--out", str(tmp_path / "x.csv"),
    ])
    assert code == EXIT_PARSE
    code = main([
        "solve", "--alpha", "2.5", "--weight", "power:0",
        "--out", str(tmp_path / "x.csv"),
    ])
    assert code == EXIT_PARSE
    code = main(["solve", "--alpha", "1.5", "--out", str(tmp_path / "x.csv")])
    assert code == EXIT_PARSE


def test_solve_nonconvergence_exit_code_with_csv(tmp_path):
    out = tmp_path / "diverge.csv"
    code = main([
        "solve", "--alpha", "1.5", "--weight", "power:0",
        "--f", "linear:25", "--max-iter", "40", "--out", str(out),
    ])
    assert code == EXIT_NO_CONVERGENCE
    assert out.exists()


def test_solve_rejects_signed_weight_on_nonlinear_path(tmp_path):
    code = main([
        "solve", "--alpha", "1.5", "--weight", "power:0*sum:-1,0",
        "--f", "power:0.5", "--out", str(tmp_path / "x.csv"),
    ])
    assert code == EXIT_PARSE


# --- classify command --------------------------------------------------------------


def test_classify_command(tmp_path, capsys):
    out = tmp_path / "cls.csv"
    code = main([
        "classify", "--alpha", "1.6", "--weight", "power:1.2",
        "--n", "256", "--out", str(out),
    ])
    assert code == EXIT_OK
    text = capsys.readouterr().out
    assert "in_E_alpha=yes" in text
    assert "in_C1_2ma=no" in text
    header, rows = _read_csv(out)
    assert header == ["t", "q", "p"]
    assert len(rows) == 20


def test_classify_continuous_weight(tmp_path, capsys):
    code = main([
        "classify", "--alpha", "1.6", "--weight", "power:0",
        "--n", "256", "--out", str(tmp_path / "cls.csv"),
    ])
    assert code == EXIT_OK
    assert "in_C1_2ma=yes" in capsys.readouterr().out


def test_classify_signed_forcing_lands_in_both_spaces(tmp_path, capsys):
    g = forcing("u2")
    text = " + ".join(f"{c!r}*t^{lam!r}" for c, lam in g)
    code = main([
        "classify", "--alpha", "1.5", "--forcing", text,
        "--n", "512", "--out", str(tmp_path / "cls.csv"),
    ])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "in_E_alpha=yes" in out
    assert "in_C1_2ma=yes" in out


# --- figure command ------------------------------------------------------------------


def test_figure1_outputs(tmp_path):
    out_dir = tmp_path / "fig"
    code = main(["figure1", "--n", "128", "--out", str(out_dir)])
    assert code == EXIT_OK
    csvs = sorted(out_dir.glob("*.csv"))
    assert len(csvs) == 4
    for path in csvs:
        _, rows = _read_csv(path)
        u = np.array([float(r[1]) for r in rows])
        assert u[0] == 0.0 and u[-1] == 0.0
        assert np.min(u) >= 0.0
    svg = (out_dir / "figure1.svg").read_text(encoding="utf-8")
    assert svg.startswith("<svg")
    assert svg.count("<polyline") == 4
