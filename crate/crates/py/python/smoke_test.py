"""Builds the extension module with cargo, imports it and checks a few values.

Run from anywhere: python3 crates/py/python/smoke_test.py
"""

import importlib.util
import json
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[3]


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "sandwich-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / ("libsandwich_py.dylib" if sys.platform == "darwin" else "libsandwich_py.so")
    out = pathlib.Path(tempfile.mkdtemp()) / "sandwich_py.so"
    shutil.copy(lib, out)
    return out


def load(path):
    spec = importlib.util.spec_from_file_location("sandwich_py", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    sp = load(build())
    pi2 = math.pi**2

    ev = sp.spectrum("square", "neumann", 3)
    assert len(ev) == 4 and abs(ev[0]) < 1e-8, ev
    assert all(close(a, b, 0.01) for a, b in zip(ev[1:], [pi2, pi2, 2 * pi2])), ev

    assert close(sp.box_eigenvalues([1.0, 1.0], "dirichlet", 1)[0], 2 * pi2, 1e-12)
    assert close(sp.disk_eigenvalues(1.0, "neumann", 2)[1], 3.3900, 1e-3)
    tri = sp.polygon_spectrum([(0, 0), (1, 0), (0, 1)], "neumann", 1)
    assert tri[1] > 0

    cert = json.loads(sp.certify("square", 2))["certificate"]
    assert cert["l"] == 1 and cert["lambda_lower"] <= cert["fem_lambda"], cert

    part = json.loads(sp.partition("box:2x1", 3))
    assert part["l"] == 3 and len(part["piece_diameters"]) == 3

    rep = json.loads(sp.verify("stein", 1))
    assert rep["summary"]["failed"] == 0 and "timestamp" not in rep

    for bad in (lambda: sp.spectrum("circle"), lambda: sp.certify("square", 1), lambda: sp.verify("nope")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
