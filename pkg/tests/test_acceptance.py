"""Acceptance suite: one test per criterion, each with its runtime budget.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import itertools
import json
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_setup
from quiverstab.cli import run
from quiverstab.dmin import (
    adhm_dmin_closed_form,
    d_min,
    hom_dims,
    polygon_dmin_table,
    strictly_short_level,
)
from quiverstab.homotopy import homotopy_report, moduli_dimension, pg_homotopy
from quiverstab.io import parse_quiver_file, parse_representation, serialize_quiver, serialize_representation
from quiverstab.moment import endomorphism_dimension, energy, energy_gradient, flow
from quiverstab.quiver import DimensionVector, Quiver, QuiverSetup, Representation, StabilityParameter
from quiverstab.quiver import gen_adhm, gen_polygon
from quiverstab.slope import destabilizing_dimension_vectors
from quiverstab.subrep import (
    ProjectionTuple,
    Verdict,
    find_subrepresentation,
    haar_unitary,
    plant_instance,
    round_projections,
    stability_verdict,
    subrep_residual,
)

SQUARE = gen_polygon([1, 1, 1, 1])


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f}s, budget {seconds}s"


def test_adhm_hom_dimensions():
    """[1] ADHM Hom0/Hom1 real dimensions match the closed forms, k<=5, n<=4"""
    with budget(1):
        for k in range(1, 6):
            for n in range(1, 5):
                s = gen_adhm(k, n)
                for k1 in range(0, k):
                    hd = hom_dims(s.quiver, s.dims, s.dimension_vector([k1, 1]))
                    assert (hd.hom0_real, hd.hom1_real) == (2 * k1 * (k - k1), 4 * k1 * (k - k1) + 2 * n * (k - k1))
                for k1 in range(1, k + 1):
                    hd = hom_dims(s.quiver, s.dims, s.dimension_vector([k1, 0]))
                    assert (hd.hom0_real, hd.hom1_real) == (2 * k1 * (k - k1), 4 * k1 * (k - k1) + 2 * n * k1)


def test_adhm_dmin():
    """[2] ADHM exhaustive d_min equals 2(k+n-1), 1<=k,n<=4"""
    with budget(1):
        for k in range(1, 5):
            for n in range(1, 5):
                assert d_min(gen_adhm(k, n)).d_min == 2 * (k + n - 1) == adhm_dmin_closed_form(k, n)


def _has_tie(sides):
    total = sum(sides)
    return any(
        2 * sum(c) == total for r in range(1, len(sides)) for c in itertools.combinations(sides, r)
    )


def test_polygon_table():
    """[3] polygon level -> table agrees with exhaustive d_min (3 named + 20 random side vectors)"""
    with budget(5):
        for sides, expected in [((3, 1, 1, 1), 0), ((1, 1, 1, 1), 2), ((1, 1, 1, 1, 1), 4)]:
            assert polygon_dmin_table(strictly_short_level(sides)) == expected
            assert d_min(gen_polygon(sides)).d_min == expected
        rng = np.random.default_rng(2024)
        checked = 0
        levels = set()
        while checked < 20:
            n = int(rng.integers(3, 8))
            # alternate wide and narrow spreads so every table row is reached
            hi = 20 if checked % 2 else 3
            sides = [Fraction(int(rng.integers(1, hi + 1)) * 7 + int(rng.integers(0, 7)), 7) for _ in range(n)]
            if _has_tie(sides):
                continue
            level = strictly_short_level(sides)
            assert d_min(gen_polygon(sides)).d_min == polygon_dmin_table(level), sides
            levels.add(min(level, 2))
            checked += 1
        assert levels == {0, 1, 2}


def test_homotopy_conclusions():
    """[4] adhm(2,2) gives pi_2 = pi_4 = Z; square polygon is connected at n=0 only"""
    with budget(1):
        report = homotopy_report(gen_adhm(2, 2), 4)
        groups = {e.degree: str(e.moduli_group) for e in report.entries if e.conclusive}
        assert groups[2] == "Z" and groups[4] == "Z"
        report = homotopy_report(SQUARE, 3)
        assert [e.conclusive for e in report.entries] == [True, False, False, False]
        assert str(report.entries[0].moduli_group) == "0"
        assert report.entries[0].stable_locus_group.is_trivial


def _quotient_by_row(values):
    """Z^m / <row> by integer column operations down to one entry."""
    row = [x for x in values if x != 0]
    while sum(1 for x in row if x != 0) > 1:
        nz = sorted((abs(x), i) for i, x in enumerate(row) if x != 0)
        _, p = nz[0]
        for _, i in nz[1:]:
            row[i] -= (row[i] // row[p]) * row[p]
    g = abs(sum(row))
    free = len(row) - 1
    parts = ([] if free == 0 else ["Z" if free == 1 else f"Z^{free}"]) + ([f"Z/{g}"] if g > 1 else [])
    return " + ".join(parts) or "0"


def test_pi1_pg():
    """[5] pi_1(PG_v) for (2), (2,1,1,1,1), (6,10,15), (2,4)"""
    with budget(1):
        for values, expected in [((2,), "Z/2"), ((2, 1, 1, 1, 1), "Z^4"), ((6, 10, 15), "Z^2"), ((2, 4), "Z + Z/2")]:
            v = DimensionVector(tuple(str(i) for i in range(len(values))), values)
            assert str(pg_homotopy(v, 1)) == expected == _quotient_by_row(values)


def test_moduli_dimension():
    """[6] moduli dimensions: pentagon 2, adhm(k,n) k^2+2kn"""
    with budget(1):
        s = gen_polygon([1] * 5)
        assert moduli_dimension(s.quiver, s.dims) == 2
        for k in range(1, 4):
            for n in range(1, 4):
                s = gen_adhm(k, n)
                assert moduli_dimension(s.quiver, s.dims) == k * k + 2 * k * n


def test_gradient_finite_differences():
    """[7] analytic gradient vs central differences at 100 random points, rel err < 1e-6"""
    with budget(10):
        setups = [gen_adhm(2, 1), gen_polygon([1, 1, 1, 1]), gen_polygon([1, 1, 1, 1, 1])]
        rng = np.random.default_rng(77)
        h = 1e-5
        worst = 0.0
        for i in range(100):
            setup = setups[i % 3]
            rep = plant_instance(setup, None, int(rng.integers(1 << 31)))
            d = [rng.standard_normal(m.shape) + 1j * rng.standard_normal(m.shape) for m in rep.matrices]
            fp = energy(rep.replace([a + h * x for a, x in zip(rep.matrices, d)]), setup.alpha)
            fm = energy(rep.replace([a - h * x for a, x in zip(rep.matrices, d)]), setup.alpha)
            analytic = sum(np.vdot(g, x).real for g, x in zip(energy_gradient(rep, setup.alpha), d))
            worst = max(worst, abs((fp - fm) / (2 * h) - analytic) / abs(analytic))
        assert worst < 1e-6, worst


def test_flow_behaviour():
    """[8] 20 generic square-polygon flows reach energy < 1e-10 within 1e5 steps, monotone"""
    with budget(60):
        for seed in range(20):
            result = flow(plant_instance(SQUARE, None, 1000 + seed), SQUARE.alpha, max_steps=100_000)
            energies = [f for _, f in result.energy_trace]
            assert result.iterations <= 100_000
            assert result.final_energy < 1e-10, (seed, result.final_energy)
            assert all(b <= a for a, b in zip(energies, energies[1:]))


def _planted_cases():
    one_vertex = QuiverSetup(
        Quiver(("a",), (("a", "a"), ("a", "a"))), DimensionVector(("a",), (4,)), StabilityParameter.zero(("a",))
    )
    chain = Quiver(("a", "b", "c"), (("a", "b"), ("b", "c"), ("c", "a"), ("a", "b")))
    chain = QuiverSetup(chain, DimensionVector(("a", "b", "c"), (3, 4, 2)), StabilityParameter.zero(("a", "b", "c")))
    return [gen_adhm(3, 2), gen_adhm(4, 1), gen_polygon([1, 1, 1, 1]), gen_polygon([1, 1, 1, 1, 1]), one_vertex, chain]


def test_planted_recovery():
    """[9] planted subrepresentations recovered in >= 95% of 50 instances, each certified"""
    with budget(120):
        cases = _planted_cases()
        rng = np.random.default_rng(9)
        successes = 0
        for i in range(50):
            setup = cases[i % len(cases)]
            while True:
                sub = setup.dimension_vector([int(rng.integers(0, d + 1)) for d in setup.dims.values])
                if not sub.is_zero() and sub != setup.dims:
                    break
            rep = plant_instance(setup, sub, seed=i)
            found = find_subrepresentation(rep, sub, restarts=20, tol=1e-8, seed=i)
            if found is None:
                continue
            proj, residual = found
            rounded = round_projections(proj)
            assert rounded.max_defect() < 1e-10
            scale = rep.norm_squared() or 1.0
            assert subrep_residual(rep, rounded) / scale < 1e-8
            assert residual < 1e-8
            successes += 1
        assert successes >= 48, successes


def _parallel_pair(seed):
    rng = np.random.default_rng(seed)
    xs = [rng.standard_normal(2) + 1j * rng.standard_normal(2) for _ in range(3)]
    xs.insert(1, (0.5 + rng.random()) * np.exp(2j * np.pi * rng.random()) * xs[0])
    return Representation(SQUARE.quiver, SQUARE.dims, [x.reshape(2, 1) for x in xs])


def test_verdict_consistency():
    """[10] 20 generic square instances Stable with End = 1 and flow < 1e-8; 10 parallel pairs StrictlySemistable"""
    with budget(120):
        for seed in range(20):
            rep = plant_instance(SQUARE, None, 500 + seed)
            v = stability_verdict(rep, SQUARE, seed=seed)
            assert v.verdict is Verdict.STABLE, seed
            assert endomorphism_dimension(rep) == 1
            assert v.flow_energy < 1e-8
        for seed in range(10):
            v = stability_verdict(_parallel_pair(seed), SQUARE, seed=seed, flow_steps=0)
            assert v.verdict is Verdict.STRICTLY_SEMISTABLE, seed
            assert v.evidence.sub.values == (1, 1, 1, 0, 0)


def test_invariance():
    """[11] shift/scale invariance on 10 random setups; gauge equivariance on 20 unitary transforms"""
    with budget(10):
        rng = np.random.default_rng(11)
        for _ in range(10):
            s = random_setup(rng)
            base = [(sub, rep.slope) for sub, rep in destabilizing_dimension_vectors(s)]
            base_dmin = d_min(s)
            c = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))
            lam = Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 5)))
            for alpha, factor in ((s.alpha.shifted(c), 1), (s.alpha.scaled(lam), lam)):
                other = QuiverSetup(s.quiver, s.dims, alpha)
                moved = [(sub, rep.slope) for sub, rep in destabilizing_dimension_vectors(other)]
                assert [x for x, _ in moved] == [x for x, _ in base]
                assert [y for _, y in moved] == [y * factor for _, y in base]
                dm = d_min(other)
                assert (dm.d_min, dm.witness) == (base_dmin.d_min, base_dmin.witness)
        setups = [gen_adhm(2, 2), SQUARE, gen_polygon([1, 2, 2, 3, 1])]
        for i in range(20):
            setup = setups[i % 3]
            rep = plant_instance(setup, None, i)
            g = [haar_unitary(rng, d) for d in rep.dims.values]
            moved = rep.replace([g[h] @ a @ g[t].conj().T for (t, h), a in zip(rep.quiver.edge_indices, rep.matrices)])
            e0, e1 = energy(rep, setup.alpha), energy(moved, setup.alpha)
            assert abs(e0 - e1) <= 1e-10 * e0
            sub = setup.dimension_vector([max(d - 1, 0) if j == 0 else d // 2 for j, d in enumerate(setup.dims.values)])
            frames = [haar_unitary(rng, d)[:, :r] for d, r in zip(setup.dims.values, sub.values)]
            p = ProjectionTuple(sub, tuple(f @ f.conj().T for f in frames))
            pg = ProjectionTuple(sub, tuple(u @ x @ u.conj().T for u, x in zip(g, p.projections)))
            r0, r1 = subrep_residual(rep, p), subrep_residual(moved, pg)
            assert abs(r0 - r1) <= 1e-10 * r0


def test_round_trips_and_determinism(tmp_path):
    """[12] byte-stable quiver/representation round-trips and deterministic CLI output"""
    with budget(1):
        for setup in [SQUARE, gen_adhm(3, 2), gen_polygon(["1/2", "3/4", 1, 1, "5/3"])]:
            text = serialize_quiver(setup)
            assert serialize_quiver(parse_quiver_file(text)) == text
            rep = plant_instance(setup, None, 3)
            blob = serialize_representation(rep)
            assert serialize_representation(parse_representation(blob, setup)) == blob
        qfile = tmp_path / "sq.quiver"
        qfile.write_text(serialize_quiver(SQUARE))
        outputs = []
        for i in range(2):
            rfile = tmp_path / f"rep{i}.json"
            run(["plant", str(qfile), "--sub", "0=1", "1=1", "2=1", "--seed", "6", "-o", str(rfile)])
            stab = run(["stability", str(qfile), "--rep", str(rfile), "--seed", "3", "--flow-steps", "200", "--json"])
            dm = run(["dmin", str(qfile), "--json"])
            outputs.append((rfile.read_bytes(), stab.render(True), dm.render(True)))
        assert outputs[0] == outputs[1]
        assert json.loads(outputs[0][1])["verdict"] == "StrictlySemistable"
