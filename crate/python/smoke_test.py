"""Smoke test for the cmvscat extension module.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/cmvscat-*.whl
"""

import cmath
import math

import cmvscat


def close(a, b, tol):
    return abs(a - b) < tol


def main():
    bs = cmvscat.bernstein(0.5)
    assert bs.alphas == [0.5] and bs.alpha_minus_one == -1
    assert cmvscat.VerblunskyData.from_json(bs.to_json()).alphas == bs.alphas

    w = cmvscat.spectral_density(bs)
    assert close(w[0], 3.0, 1e-10) and close(w[len(w) // 2], 1.0 / 3.0, 1e-10)

    sd = cmvscat.scattering_function(bs)
    assert sd.index == 0 and close(sd.coefficient(-1), -0.5, 1e-12)
    assert close(sd.d_coefficient(0), math.sqrt(0.75), 1e-12)

    phi = cmvscat.schur_inverse(bs)
    back, degeneracy = cmvscat.schur_forward(phi, 1)
    assert degeneracy is None and close(back.alphas[0], 0.5, 1e-12)

    inv = cmvscat.inverse_scattering(sd.s, depth=4)
    assert inv.report["verdict"] == "canonical"
    assert close(inv.data.alphas[0], 0.5, 1e-6) and inv.match_error < 1e-8

    minus_t = cmvscat.polyweight([1])["s"]
    try:
        cmvscat.inverse_scattering(minus_t)
        raise AssertionError("inverse accepted s = -t")
    except cmvscat.NonCanonicalError:
        pass
    family = cmvscat.noncanonical_family(minus_t, [1, 1j, -1])
    assert len(family) == 3 and all(f["match_error"] < 1e-8 for f in family)

    geo = cmvscat.geometric(0.5, 10)
    residual, _ = cmvscat.glm_residual(geo, 32)
    assert residual < 1e-6
    widom = cmvscat.widom_check(bs, 64)
    assert close(widom["det"], 0.75, 1e-8) and close(widom["trace"], 0.25, 1e-8)
    assert cmvscat.model_gram_defect(bs, 16, "e") < 1e-6

    verdicts = {
        name: cmvscat.canonical_test(s)["verdict"]
        for name, s in [("one", [1.0] * 4096), ("bernstein", sd.s), ("minus_t", minus_t)]
    }
    assert verdicts == {"one": "canonical", "bernstein": "canonical", "minus_t": "noncanonical"}

    jac = cmvscat.jacobi(2.0, 0.0, 3)
    assert [round(a.real, 12) for a in jac.alphas] == [round(-2 / 3, 12), -0.5, -0.4]

    grid = [2 * math.pi * j / 4096 for j in range(4096)]
    hs = cmvscat.hs_generator([0.0] * 4096, [0.8 * math.cos(x) for x in grid])
    spectrum = cmvscat.hankel_spectrum(hs["s"], 128)
    assert spectrum["top_gap"] < 1e-4
    assert all(close(abs(z), 1.0, 1e-12) for z in hs["s"])

    report = cmvscat.classify(data=cmvscat.geometric(0.5, 20))
    assert report["evidence"]["gi"] == "positive"
    trace = cmvscat.a2_supremum(cmvscat.spectral_density(geo))
    assert trace[-1][1] < 100

    cmv = cmvscat.cmv_matrix(bs, 6)
    assert close(cmv[0][0], -bs.alpha_minus_one * 0.5, 1e-15)
    f = cmvscat.caratheodory(bs, [0.0, 0.5j])
    assert close(f[0], 1.0, 1e-12)
    assert cmath.isfinite(f[1])

    print("cmvscat smoke test passed")


if __name__ == "__main__":
    main()
