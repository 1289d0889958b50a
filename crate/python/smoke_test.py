"""Smoke test for the Python bindings. Run after `pip install -e crates/py`."""

from fractions import Fraction

import moran_spectra as ms


def main():
    config = ms.Config([(4, 2, 1), (2, 2, 3)])
    word = ms.Word.parse("1;2")
    assert config.violations() == []

    verdict = ms.classify(config, word)
    assert verdict["kind"] == "NotSpectral", verdict
    assert verdict["clause"] == "Pi_l" and verdict["j"] == 2

    assert ms.classify(config, ms.Word([], [1, 2]))["spectral"]

    mu = ms.truncate(config, word, 2)
    atoms = mu.atoms()
    assert len(atoms) == 4
    assert sum(w for _, w in atoms) == 1
    assert [a for a, _ in atoms] == [0, Fraction(1, 4), Fraction(3, 8), Fraction(5, 8)]

    cantor = ms.Config([(4, 2, 1)])
    constant = ms.Word([], [1])
    tower = ms.tower_spectrum(cantor, constant, 2)
    assert tower == [0, 2, 8, 10]
    report = ms.verify_spectrum(cantor, constant, 2)
    assert report["passed"] and report["unitarity_residual"] < 1e-9
    bad = ms.verify_spectrum(cantor, constant, 2, points=[0, 1, 2, 3])
    assert not bad["passed"] and bad["offending_pair"] == (0, 1)

    value, bound = ms.mu_hat(cantor, constant, 2.0, depth=20)
    assert abs(value) < 1e-12 and bound >= 0
    assert ms.zero_set_contains(cantor, constant, Fraction(2))
    assert not ms.zero_set_contains(cantor, constant, "1/3")
    assert ms.support_hull(cantor, constant) == (0, Fraction(1, 3))

    d = ms.two_stage(2, 3, 4, 6, 3)
    assert d["spectral"] and d["tiles"] and d["divides"]
    assert ms.two_stage(2, 3, 4, 5, 3)["clause"] == "step_divisibility"

    letter = ms.StagePair(2, 2, 3)
    assert letter.is_admissible() and letter.canonical_l() == [0, 1]
    assert ms.is_compatible(2, letter.digits(), [0, 1])
    assert [0, 1] in ms.search_compatible_l(2, 2, 3, 12)

    assert ms.zero_set_empty(ms.Config([(2, 2, 3)]), constant) is False
    r = ms.row_constancy([[Fraction(1, 2), Fraction(1, 2)]], [["1/2", "1/2"]])
    assert r["equivalent"] and not r["left"]

    try:
        ms.StagePair(1, 2, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid stage accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
