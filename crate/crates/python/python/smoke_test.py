"""Smoke test for the pytamewild extension.

Build and run from the repository root:

    cargo build -p tamewild-python --release --features extension-module
    cp target/release/libpytamewild.so crates/python/python/pytamewild.so
    python3 crates/python/python/smoke_test.py
"""

import pytamewild as tw


def main():
    c = tw.Matrix(2, [[0, 1], [1, 1]])
    assert c.invariant_factors_str() == "(1, x^2+x+1)"
    assert c.char_poly() == [1, 1, 1]
    assert c.spectrum() == []
    assert c.rank() == 2 and c.det() == 1

    zero = tw.Matrix(2, [[0, 0], [0, 0]])
    assert zero.invariant_factors() == [[0, 1], [0, 1]]

    a = tw.Matrix(3, [[1, 2], [0, 1]])
    s = tw.Matrix(3, [[2, 1], [1, 1]])
    b = s @ a @ s.inverse()
    assert tw.similar(a, b)
    found = tw.similar_bruteforce(a, b)
    assert found @ a @ found.inverse() == b
    assert tw.similar_bruteforce(zero, tw.Matrix.identity(2, 2)) is None
    assert tw.similar(a.rational_canonical_form(), a)

    assert tw.sim_similar([zero, zero], [zero, tw.Matrix.identity(2, 2)]) is None
    assert tw.orbit_count("single", 2, 2) == 6
    assert tw.orbit_count("pairs", 2, 2) == 56

    v = tw.falsify(tw.Transform("2 2 1\nx1\n"))
    assert v.label == "FailsCondition2" and v.falsified
    left, right = v.witness()
    assert tw.sim_similar(left, right) is None

    v = tw.falsify(tw.Transform("2 2 1\nx1x2 - x2x1\n"))
    assert v.label == "DegenerateOnScalars"
    assert "# begin left" in v.report()

    (img,), steps = tw.Transform("2 2 1\nx1x2\n").apply(
        [tw.Matrix(2, [[0, 1], [0, 0]]), tw.Matrix(2, [[0, 0], [1, 0]])]
    )
    assert img == tw.Matrix(2, [[1, 0], [0, 0]]) and steps == 12

    assert tw.interpolate(5, [(0, 1), (1, 3)]) == [1, 2]

    try:
        tw.Matrix(4, [[1]])
    except ValueError:
        pass
    else:
        raise AssertionError("composite modulus accepted")

    print("pytamewild smoke test passed")


if __name__ == "__main__":
    main()
