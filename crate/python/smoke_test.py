"""Smoke test for the Python bindings.

Build first with `cargo build --release -p orvidx-py`, or install the module
with maturin; the test falls back to the cargo artifact when the module is not
importable.
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys


def load():
    try:
        import orvidx_py

        return orvidx_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "liborvidx_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("orvidx_py", str(lib))
            spec = importlib.util.spec_from_file_location("orvidx_py", lib, loader=loader)
            mod = importlib.util.module_from_spec(spec)
            loader.exec_module(mod)
            return mod
    sys.exit("orvidx_py not built; run `cargo build --release -p orvidx-py`")


def main():
    ox = load()

    rep = json.loads(ox.analyze_seq("gevrey:alpha=2"))
    assert abs(rep["gamma"] - 2.0) <= 0.05, rep["gamma"]
    assert rep["srs"] == "holds"

    rep = json.loads(ox.analyze_seq("counterexample"))
    assert rep["gamma_omega"] == "inf"

    rep = json.loads(ox.analyze_fn("gevrey_fn:s=0.5"))
    assert abs(rep["gamma"] - 2.0) <= 0.1, rep["gamma"]

    rep = json.loads(ox.verify("legendre"))
    assert rep["summary"]["contradictions"] == 0

    for bad in (lambda: ox.analyze_seq("nosuch:x=1"), lambda: ox.verify("nope"), lambda: ox.analyze_seq("gevrey:alpha=2", tol=0.9)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    assert "all" in ox.SUITES
    print("smoke test ok")


if __name__ == "__main__":
    main()
