"""Acceptance criteria 1-10.

Each test records one ``PASS``/``FAIL`` line (echoed in the terminal
summary). Run alone with ``pytest tests/test_acceptance.py`` or
``python3 tests/test_acceptance.py``.
"""

import contextlib
import sys
import time

import numpy as np
import pytest

from fredholm_lab import cli
from fredholm_lab import extension as ex
from fredholm_lab import family as fa
from fredholm_lab import grassmann as gr
from fredholm_lab import homotopy as ho
from fredholm_lab import instances as ins
from fredholm_lab import symplectic as sy
from fredholm_lab.family import SampledLoop
from fredholm_lab.grassmann import Subspace
from fredholm_lab.numeric import spectral_norm
from fredholm_lab.suites import planted_lagrangian_pair

from conftest import ACCEPTANCE_LINES

SEED = 20240611
TWO_PI = 2 * np.pi


@contextlib.contextmanager
def criterion(number, title):
    """Record one result line; ``detail`` is filled in by the body."""
    detail = {}
    start = time.perf_counter()
    try:
        yield detail
    except BaseException as exc:
        status, note = "FAIL", f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        raise
    else:
        status, note = "PASS", ", ".join(f"{k}={v}" for k, v in detail.items())
    finally:
        text = f"[{number:>2}] {status} {title} ({time.perf_counter() - start:.2f}s) {note}".rstrip()
        ACCEPTANCE_LINES.append(text)
        print(text)


def rng_for(label, i):
    return ins.trial_rng(SEED, i, label)


def operator_instances(count=500):
    for i in range(count):
        r = rng_for("operator", i)
        op = ins.random_operator_pair(r, int(r.integers(1, 9)))
        p = ex.graphs(op)
        yield op, p, ins.random_beta_subspace(p, r)


# The reports are computed once and shared by criteria 1 and 2.
_POINT_REPORTS = {}


def point_reports():
    if not _POINT_REPORTS:
        start = time.perf_counter()
        reps = [ex.verify_point_index_formula(op, l, pair=p, strict=False) for op, p, l in operator_instances()]
        _POINT_REPORTS.update(reps=reps, seconds=time.perf_counter() - start)
    return _POINT_REPORTS


def failures_of(reports, name):
    return [i for i, rep in enumerate(reports) for c in rep.checks if c.name == name and not c.passed]


def test_01_point_index_formula():
    with criterion(1, "pointwise index formula, 500 operator pairs, n <= 8, < 10 s") as d:
        data = point_reports()
        reps = data["reps"]
        bad = failures_of(reps, "ind A_L = ind_beta(L, C) + dim ker A - dim coker A'")
        checked = sum(any(c.name.startswith("ind A_L = ind_beta") for c in r.checks) for r in reps)
        d.update(instances=len(reps), failures=len(bad), seconds=round(data["seconds"], 2))
        assert checked == 500 and not bad, f"failing instances {bad[:10]}"
        assert data["seconds"] < 10.0


def test_02_exact_sequences():
    with criterion(2, "kernel/cokernel sequences, same 500 instances") as d:
        reps = point_reports()["reps"]
        bad_ker = failures_of(reps, "dim ker A_L = dim ker A + dim(L & C)")
        bad_coker = failures_of(reps, "dim coker A_L = dim coker A' + codim_beta(L + C)")
        d.update(instances=len(reps), ker_failures=len(bad_ker), coker_failures=len(bad_coker))
        assert not bad_ker and not bad_coker


def test_03_relative_calculus():
    with criterion(3, "push/pull calculus and transversality, 500 nested pairs, ambient <= 12") as d:
        failed, transversal_cases, worst = [], 0, 0.0
        for i in range(500):
            r = rng_for("nested", i)
            p = ins.random_nested_pair(r, int(r.integers(1, 13)))
            room = p.gamma_min.dim > 0 or p.f_comp.dim > 0
            m = ins.random_non_transversal(p, r) if room and i % 2 else ins.random_transversal(p, r)
            l = ins.random_beta_subspace(p, r)
            rep = ex.verify_relative_calculus(p, m, l, strict=False)
            transversal_cases += rep.values["m_transversal"]
            worst = max(worst, rep.values["round_trip_gap"])
            if not rep.passed:
                failed.append(i)
        d.update(instances=500, transversal=transversal_cases, max_round_trip_gap=f"{worst:.1e}",
                 failures=len(failed))
        assert not failed, f"failing instances {failed[:10]}"
        assert worst <= 1e-8 and 150 <= transversal_cases < 500


def test_04_canonical_homotopy():
    with criterion(4, "canonical path, 100 transversal instances, 32 samples") as d:
        failed, worst = [], 0.0
        for i in range(100):
            r = rng_for("path", i)
            p = ins.random_nested_pair(r, int(r.integers(1, 13)))
            m, l = ins.random_transversal(p, r), ins.random_beta_subspace(p, r)
            rep = ho.verify_path(p, m, l, samples=32, strict=False)
            worst = max(worst, rep.values["max_trace_gap"])
            if not rep.passed:
                failed.append(i)
        d.update(instances=100, max_trace_gap=f"{worst:.1e}", failures=len(failed))
        assert not failed and worst <= 1e-8, f"failing instances {failed[:10]}"


def test_05_defect_identity():
    with criterion(5, "K/K' defect identity, 200 non-transversal instances") as d:
        failed, done, i = [], 0, 0
        while done < 200:
            r = rng_for("defect", i)
            i += 1
            p = ins.random_nested_pair(r, int(r.integers(2, 13)))
            if p.gamma_min.dim == 0 and p.f_comp.dim == 0:
                continue
            m = ins.random_non_transversal(p, r)
            rep = ex.kk_defect(p, m, ins.random_beta_subspace(p, r), strict=False)
            assert not rep.values["transversal"]
            done += 1
            if not rep.passed:
                failed.append(i - 1)
        d.update(instances=done, failures=len(failed))
        assert not failed, f"failing instances {failed[:10]}"


def test_06_cayley_coherence():
    with criterion(6, "kappa(graph A) = cayley(A) for 100 Hermitian A, n <= 8; H -> -1, V -> +1") as d:
        worst, worst_axes = 0.0, 0.0
        for i in range(100):
            r = rng_for("cayley", i)
            n = int(r.integers(1, 9))
            sp = sy.standard_symplectic(n)
            a = ins.random_hermitian(n, r)
            worst = max(worst, spectral_norm(sy.kappa(sp, sy.hermitian_graph(a)) - sy.cayley(a)))
        for n in range(1, 9):
            sp = sy.standard_symplectic(n)
            worst_axes = max(worst_axes, spectral_norm(sy.kappa(sp, ex.horizontal(n)) + np.eye(n)),
                             spectral_norm(sy.kappa(sp, ex.vertical(n)) - np.eye(n)))
        d.update(max_cayley_error=f"{worst:.1e}", max_axis_error=f"{worst_axes:.1e}")
        assert worst <= 1e-10 and worst_axes <= 1e-12


def test_07_lagrangian_pairs():
    with criterion(7, "Lagrangian pair arithmetic, 200 planted pairs") as d:
        failed = []
        for i in range(200):
            r = rng_for("lagrangian", i)
            n = int(r.integers(1, 6))
            sp = sy.standard_symplectic(n)
            meet = int(r.integers(0, n + 1))
            l, m = planted_lagrangian_pair(sp, r, meet)
            pi = gr.pair_index(l, m)
            mult = sy.intersection_multiplicity(sy.kappa_rel(sp, l, m))
            if not (pi.dim_cap == pi.codim_sum == mult == meet):
                failed.append(i)
        d.update(pairs=200, failures=len(failed))
        assert not failed, f"failing pairs {failed[:10]}"


def test_08_k1_theorem():
    with criterion(8, "K1 loop theorem, 50 planted loops in C^8 + operator instance, < 30 s") as d:
        start = time.perf_counter()
        failed, planted_ok = [], 0
        sp = sy.standard_symplectic(4)
        for i in range(50):
            r = rng_for("k1", i)
            w = i % 5 - 2
            g = ins.random_isotropic(sp, 1 + i % 2, r)
            p = sy.isotropic_pair(sp, g)
            m = ins.random_lagrangian_transversal(sp, p, r)
            loop = fa.planted_lagrangian_loop(sy.boundary_form(sp, p), p, ex.push_forward(p, m), w, 128, r)
            rep = fa.verify_theorem_k1(sp, g, m, loop, strict=False)
            planted_ok += rep.values["winding_boundary"] == w
            if not rep.passed:
                failed.append(i)
        # A = 1 on span{e1} inside C^2; its minimal graph is isotropic in C^4
        op = ex.make_operator_pair(np.eye(2), dom_min=Subspace.coordinate(2, [0]))
        sp2 = sy.standard_symplectic(2)
        g = ex.graph(op.action, op.dom_min)
        p = sy.isotropic_pair(sp2, g)
        h = ex.horizontal(2)
        op_windings = []
        for w in (-2, 1, 2):
            loop = fa.planted_lagrangian_loop(sy.boundary_form(sp2, p), p, ex.push_forward(p, h), w, 128,
                                              rng_for("k1-operator", w + 2))
            rep = fa.verify_theorem_k1(sp2, g, h, loop, strict=False)
            op_windings.append((rep.values["winding_ambient"], rep.values["winding_boundary"]))
        seconds = time.perf_counter() - start
        d.update(loops=50, failures=len(failed), planted_recovered=planted_ok, operator=op_windings,
                 seconds=round(seconds, 2))
        assert not failed, f"failing loops {failed[:10]}"
        assert planted_ok == 50
        assert op_windings == [(-2, -2), (1, 1), (2, 2)]
        assert seconds < 30.0


def _loop(fn, samples=128):
    ts = np.linspace(0.0, 1.0, samples)
    return SampledLoop(tuple(fn(t) for t in ts[:-1]) + (fn(0.0),), ts)


def test_09_winding_engine():
    with criterion(9, "winding engine: e^{it}, diag(e^{it}, e^{-it}), reversal, concatenation") as d:
        exp_it = _loop(lambda t: np.array([[np.exp(1j * TWO_PI * t)]]))
        balanced = _loop(lambda t: np.diag([np.exp(1j * TWO_PI * t), np.exp(-1j * TWO_PI * t)]))
        triple = _loop(lambda t: np.array([[np.exp(3j * TWO_PI * t)]]))
        cases = {
            "exp": (fa.winding_number(exp_it), 1),
            "diag": (fa.winding_number(balanced), 0),
            "reversed": (fa.winding_number(exp_it.reversed()), -1),
            "concat": (fa.winding_number(fa.concatenate(exp_it, triple)), 4),
        }
        worst = max(abs(rep.total_phase / TWO_PI - rep.winding) for rep, _ in cases.values())
        got = {k: rep.winding for k, (rep, _) in cases.items()}
        d.update(**got, max_phase_error=f"{worst:.1e}")
        assert got == {k: want for k, (_, want) in cases.items()}
        assert worst <= 1e-6


def test_10_determinism(tmp_path):
    with criterion(10, "verify reports byte-identical across runs and thread counts") as d:
        outs = []
        for name, jobs in (("a", 1), ("b", 1), ("c", 4), ("d", 3)):
            path = tmp_path / f"{name}.json"
            code = cli.main(["verify", "--trials", "12", "--seed", "987654321", "--jobs", str(jobs),
                             "--out", str(path)])
            assert code == 0
            outs.append(path.read_bytes())
        d.update(runs=len(outs), bytes=len(outs[0]))
        assert all(o == outs[0] for o in outs)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
