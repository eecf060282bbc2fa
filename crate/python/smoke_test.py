"""Smoke test for the pyhyperhelfrich extension.

Build with `cargo build --release -p hyperhelfrich-py`, then run
`python3 python/smoke_test.py`. The script loads the shared library from
target/release when the module is not installed.
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys


def load():
    try:
        import pyhyperhelfrich

        return pyhyperhelfrich
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for name in ("libpyhyperhelfrich.so", "libpyhyperhelfrich.dylib", "pyhyperhelfrich.dll"):
        path = root / "target" / "release" / name
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("pyhyperhelfrich", str(path))
            spec = importlib.util.spec_from_file_location("pyhyperhelfrich", str(path), loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("pyhyperhelfrich not built; run cargo build --release -p hyperhelfrich-py")


def main():
    hh = load()

    oracle = hh.hemisphere_oracle(1.0, 1.0)
    assert abs(oracle["G_R"] - 2 * math.pi) < 1e-12, oracle
    numeric = hh.hemisphere_energies(1.0, 1.0)
    assert abs(numeric["A_R"] + 2 * math.pi) < 1e-8, numeric

    circle = hh.integrate_profile(0.0, 1.0)
    assert abs(circle.r_b - 1.0) < 1e-8 and abs(circle.sigma_b - math.pi / 2) < 1e-8
    last = circle.samples()[-1]
    assert abs(last[1] - 1.0) < 1e-8 and last[2] == 0.0

    params = hh.ModelParams(1.0, abs_tol=1e-11, rel_tol=1e-11)
    prof = hh.integrate_profile(1.0, 2.0, params)
    vertices, faces = prof.mesh(16, 8)
    assert len(vertices) == 1 + 16 * 8 and len(faces) == 16 * (2 * 8 - 1)

    branches = hh.find_equilibria(1.0, 6)
    assert len(branches) == 6
    assert all(b["verification"]["all_pass"] for b in branches)
    assert all(-b["energies"]["G_R"] >= 0 for b in branches)

    assert hh.to_ball_model(0.0, 0.0, 1.0) == (0.0, 0.0, 0.0)
    try:
        hh.integrate_profile(1.0, -0.5)
    except ValueError:
        pass
    else:
        raise AssertionError("forbidden initial height accepted")

    print("smoke test passed:", [round(b["z0_root"], 6) for b in branches])


if __name__ == "__main__":
    main()
