"""Smoke test for the duts extension module.

Uses an installed `duts` if there is one, otherwise the library from
`cargo build --release -p duts-py` (or a debug build).
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import duts

        return duts
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libduts.so"
        if lib.exists():
            tmp = pathlib.Path(tempfile.mkdtemp())
            shutil.copy(lib, tmp / "duts.so")
            spec = importlib.util.spec_from_file_location("duts", tmp / "duts.so")
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("duts not found; run: cargo build --release -p duts-py")


def main():
    duts = load()

    p = duts.Polynomial(0.5, [1, 2, 3])
    q = p.recenter(-1j)
    assert abs(q(0.3 + 0.2j) - p(0.3 + 0.2j)) < 1e-12
    assert p.partial_sum(1).coeffs == [1, 2]

    disk = duts.Set.disk(0, 1)
    pts = disk.sample(20)
    z8 = [z**8 for z in pts]
    poly, info = duts.solve_window([("disk", pts, z8)], 0, 7)
    assert abs(info["objective"] - 1.0) < 1e-8, info
    _, lp = duts.solve_window([("disk", pts, z8)], 0, 7, method="lp")
    assert abs(lp["objective"] - info["objective"]) <= 0.05 * lp["objective"] + 1e-9

    r = duts.check_ratio("n^2", 1000)
    assert r["diverging"], r
    assert not duts.check_ratio("3*n", 1000)["diverging"]

    args = dict(
        zeta0=0,
        epsilon=1e-2,
        s=100,
        L=(duts.Set.disk(0, 0.5), 20),
        K1=(duts.Set.disk(3, 0.5), 20),
        K2=(duts.Set.segment(2j, 3j), 40),
        g=duts.Target.zero(),
        f1=duts.Target.constant(1),
        f2=duts.Target.identity(),
        omega=duts.Set.disk(0, 1),
    )
    cert = duts.construct(sequence="n^2", **args)
    assert (cert.n0, cert.mu, cert.lambda_mu) == (4, 16, 256)
    assert max(cert.residuals) < 1e-2
    again = duts.Certificate.from_text(cert.to_text())
    report = again.verify(4.0)
    assert report["passed"], report
    head = cert.f.partial_sum(cert.mu).coeffs
    assert head[: len(cert.p.coeffs)] == cert.p.coeffs

    try:
        duts.construct(sequence="n+7", **args)
    except duts.RefusedError as e:
        assert "limsup" in str(e)
    else:
        raise AssertionError("bounded ratio was not refused")

    d = duts.d_estimate(duts.Target.pole(4), duts.Set.disk(1.5, 0.25), duts.Set.disk(0, 1), 12, 2)
    assert 0 < d < 1
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
