import sys
from pathlib import Path

import numpy as np
import pytest

from aoakit.arrays import Array, cyclic_oa, is_oa, tolerance, unbalance
from aoakit.ipmodel import (
    IpInstance,
    add_symmetry,
    arrange_canonical,
    build_model,
    canonical_assignment,
    canonical_head,
    emit_lp,
    emit_mps,
    evaluate_model,
    exhaustive_optimum,
    parse_lp,
    parse_solution,
    solve_with_command,
    verify_solution,
)


def oa_8_4_2() -> Array:
    """Strength-2 OA with 8 runs: full 2^3 factorial plus the parity column."""
    rows = []
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                rows.append((a + 1, b + 1, c + 1, (a + b + c) % 2 + 1))
    return Array(np.array(rows), 2)


class TestInstance:
    def test_validation(self):
        with pytest.raises(ValueError):
            IpInstance(s=1, k=3)
        with pytest.raises(ValueError):
            IpInstance(s=2, k=2)
        with pytest.raises(ValueError):
            IpInstance(s=2, k=3, p=3)
        with pytest.raises(ValueError):
            IpInstance(s=2, k=3, epsilon=0)
        with pytest.raises(ValueError):
            IpInstance(s=2, k=3, symmetry="mirror")
        with pytest.raises(ValueError):
            IpInstance(s=3, k=4, symmetry="semicyclic")  # missing m_bar
        with pytest.raises(ValueError):
            IpInstance(s=3, k=4, symmetry="semicyclic", m_bar=4)
        with pytest.raises(ValueError):
            IpInstance(s=2, k=3, symmetry="klein")  # k >= 4 needed

    def test_shape_properties(self):
        inst = IpInstance(s=3, k=5, lam=2)
        assert inst.n_runs == 18
        assert list(inst.free_columns) == [3, 4, 5]
        assert list(inst.column_pairs) == [(3, 4), (3, 5), (4, 5)]
        assert inst.delta_lower == -1  # max(-lam, -eps) with eps = 1


class TestCanonicalHead:
    def test_lexicographic_factorial(self):
        head = canonical_head(2, 1)
        assert head.tolist() == [[1, 1], [1, 2], [2, 1], [2, 2]]

    def test_stacked_copies(self):
        head = canonical_head(2, 2)
        assert head.tolist() == [
            [1, 1], [1, 2], [2, 1], [2, 2],
            [1, 1], [1, 2], [2, 1], [2, 2],
        ]

    def test_arrange_canonical_reorders(self):
        a = cyclic_oa(2)
        shuffled = Array(a.cells[::-1].copy(), 2)
        arranged = arrange_canonical(shuffled)
        assert arranged.cells[:, :2].tolist() == canonical_head(2, 1).tolist()
        # Same rows, new order.
        assert sorted(map(tuple, arranged.cells)) == sorted(map(tuple, a.cells))

    def test_arrange_canonical_rejects_unbalanced_prefix(self):
        bad = Array(np.array([[1, 1, 1], [1, 1, 2], [2, 1, 1], [2, 2, 2]]), 2)
        with pytest.raises(ValueError):
            arrange_canonical(bad)


class TestModelShape:
    def test_variable_counts_2_4_1(self):
        inst = IpInstance(s=2, k=4, p=1)
        model = build_model(inst)
        names = [v.name for v in model.variables]
        x = [n for n in names if n.startswith("x_")]
        z = [n for n in names if n.startswith("z_")]
        assert len(x) == 4 * 2 * 2  # runs * free columns * levels
        assert len(z) == 4 * 1 * 4  # runs * pairs * level combinations
        assert len([n for n in names if n.startswith("d1_")]) >= 2
        model.validate()

    def test_variable_counts_3_5_1(self):
        inst = IpInstance(s=3, k=5, p=2)
        model = build_model(inst)
        names = {v.name for v in model.variables}
        assert sum(n.startswith("x_") for n in names) == 9 * 3 * 3
        assert sum(n.startswith("z_") for n in names) == 9 * 3 * 9
        assert sum(n.startswith("d0_") for n in names) == 3 * 9
        assert sum(n.startswith("d1_") for n in names) == 3
        assert sum(n.startswith("d2_") for n in names) == 9 * 3
        assert sum(n.startswith("d3_") for n in names) == 9 * 3

    def test_p1_gets_split_variables_and_linear_objective(self):
        inst = IpInstance(s=2, k=4, p=1)
        model = build_model(inst)
        names = {v.name for v in model.variables}
        assert any(n.startswith("d0p_") for n in names)
        assert any(n.startswith("d0m_") for n in names)
        assert model.linear_objective and not model.quadratic_objective

    def test_p2_quadratic_objective(self):
        inst = IpInstance(s=2, k=4, p=2)
        model = build_model(inst)
        assert model.quadratic_objective and not model.linear_objective
        names = {v.name for v in model.variables}
        assert not any("p_" in n or "m_" in n for n in names if n[:2] == "d0")

    def test_delta_bounds(self):
        inst = IpInstance(s=2, k=4, lam=2, epsilon=3)
        model = build_model(inst)
        by_name = {v.name: v for v in model.variables}
        d0 = next(v for n, v in by_name.items() if n.startswith("d0_"))
        assert (d0.lower, d0.upper) == (-2, 3)  # max(-lam,-eps) .. eps
        d1 = next(v for n, v in by_name.items() if n.startswith("d1_"))
        assert (d1.lower, d1.upper) == (-4, 4)  # -lam*s .. lam*s^2 - lam*s


class TestFeasibility:
    @pytest.mark.parametrize("builder,s,k,lam", [
        (lambda: cyclic_oa(2), 2, 3, 1),
        (lambda: cyclic_oa(3), 3, 3, 1),
        (lambda: cyclic_oa(2, 2), 2, 3, 2),
        (oa_8_4_2, 2, 4, 2),
    ])
    def test_orthogonal_array_is_feasible_with_zero_objective(
        self, builder, s, k, lam
    ):
        inst = IpInstance(s=s, k=k, lam=lam, p=2)
        model = build_model(inst)
        assignment = canonical_assignment(inst, builder())
        check = evaluate_model(model, assignment)
        assert not check.violations
        assert check.objective == 0

    def test_violations_reported(self):
        inst = IpInstance(s=2, k=3, p=2)
        model = build_model(inst)
        assignment = canonical_assignment(inst, cyclic_oa(2))
        assignment["x_1_3_1"], assignment["x_1_3_2"] = (
            assignment["x_1_3_2"],
            assignment["x_1_3_1"],
        )
        check = evaluate_model(model, assignment)
        assert check.violations


class TestExhaustive:
    def test_minimum_2_4_1(self):
        for p in (1, 2):
            inst = IpInstance(s=2, k=4, p=p, epsilon=1)
            result = exhaustive_optimum(inst)
            assert result.value == 4
            assert result.states > 0
            assert result.feasible_states > 0
            for w in result.witnesses:
                assert unbalance(w, 2, p) == 4

    def test_oa_reachable_means_zero(self):
        inst = IpInstance(s=2, k=3, p=2)
        result = exhaustive_optimum(inst)
        assert result.value == 0
        assert any(is_oa(w, 2) for w in result.witnesses)

    def test_rejects_symmetry(self):
        inst = IpInstance(s=3, k=4, symmetry="semicyclic", m_bar=2)
        with pytest.raises(ValueError):
            exhaustive_optimum(inst)

    def test_state_guard(self):
        inst = IpInstance(s=3, k=6)
        with pytest.raises(ValueError):
            exhaustive_optimum(inst, max_states=10)


class TestVerifySolution:
    def _assignment(self, inst, a):
        return canonical_assignment(inst, a)

    def test_round_trip(self):
        inst = IpInstance(s=2, k=3, p=2)
        a = arrange_canonical(cyclic_oa(2))
        report = verify_solution(inst, self._assignment(inst, a))
        assert report.ok
        assert report.array == a
        assert report.unbalance == 0
        assert report.objective == 0
        assert report.identity_ok and report.z_ok and report.deltas_match

    def test_identity_objective_minus_lastcol_term(self):
        # The model objective counts last-column level deviations separately;
        # subtracting them recovers the pair unbalance exactly.
        inst = IpInstance(s=2, k=4, p=1, epsilon=2)
        rows = [
            [1, 1, 1, 1],
            [1, 2, 1, 1],
            [2, 1, 2, 2],
            [2, 2, 2, 1],
        ]
        a = Array(np.array(rows), 2)
        report = verify_solution(inst, self._assignment(inst, a))
        assert report.identity_ok
        assert report.objective - report.delta1_term == unbalance(a, 2, 1)

    def test_missing_cell_rejected(self):
        inst = IpInstance(s=2, k=3, p=2)
        assignment = self._assignment(inst, arrange_canonical(cyclic_oa(2)))
        del assignment["x_1_3_1"]
        del assignment["x_1_3_2"]
        with pytest.raises(ValueError):
            verify_solution(inst, assignment)

    def test_double_level_rejected(self):
        inst = IpInstance(s=2, k=3, p=2)
        assignment = self._assignment(inst, arrange_canonical(cyclic_oa(2)))
        assignment["x_1_3_1"] = 1.0
        assignment["x_1_3_2"] = 1.0
        with pytest.raises(ValueError):
            verify_solution(inst, assignment)

    def test_tampered_z_detected(self):
        inst = IpInstance(s=2, k=4, lam=2, p=2)
        assignment = self._assignment(inst, oa_8_4_2())
        flipped = [n for n, v in assignment.items() if n.startswith("z_1_") and v]
        assignment[flipped[0]] = 0.0
        report = verify_solution(inst, assignment)
        assert not report.z_ok
        assert not report.ok

    def test_wrong_delta_claim_detected(self):
        inst = IpInstance(s=2, k=4, lam=2, p=2)
        assignment = self._assignment(inst, oa_8_4_2())
        name = next(n for n in assignment if n.startswith("d0_"))
        assignment[name] += 1.0
        report = verify_solution(inst, assignment)
        assert not report.deltas_match
        assert not report.ok


class TestSymmetryConstraints:
    def test_semicyclic_tie_count(self):
        inst = IpInstance(s=3, k=5, symmetry="semicyclic", m_bar=2)
        model = add_symmetry(build_model(inst), inst)
        sims = [c for c in model.constraints if c.name.startswith("sim")]
        assert len(sims) == 78

    def test_m_bar_equal_s_means_no_ties(self):
        inst = IpInstance(s=3, k=4, symmetry="semicyclic", m_bar=3)
        model = add_symmetry(build_model(inst), inst)
        assert not [c for c in model.constraints if c.name.startswith("sim")]

    def test_klein_tie_count(self):
        inst = IpInstance(s=2, k=5, symmetry="klein")
        model = add_symmetry(build_model(inst), inst)
        sims = [c.name for c in model.constraints if c.name.startswith("sim")]
        assert sum(n.startswith("sim03_") for n in sims) == 4 * 2
        assert sum(n.startswith("sim04_") for n in sims) == 4 * 2
        assert sum(n.startswith("sim034_") for n in sims) == 2 * 1 * 2

    def test_klein_symmetric_array_satisfies_ties(self):
        # Column 3 reads the first prefix coordinate, column 4 the second:
        # swapping the first two columns and the last two maps rows to rows.
        inst = IpInstance(s=2, k=4, symmetry="klein", p=2, epsilon=2)
        rows = [[1, 1, 1, 1], [1, 2, 1, 2], [2, 1, 2, 1], [2, 2, 2, 2]]
        a = Array(np.array(rows), 2)
        model = add_symmetry(build_model(inst), inst)
        assignment = canonical_assignment(inst, a)
        check = evaluate_model(model, assignment)
        assert not [v for v in check.violations if "sim" in v]

    def test_asymmetric_array_violates_ties(self):
        inst = IpInstance(s=2, k=4, symmetry="klein", p=2, epsilon=2)
        rows = [[1, 1, 1, 1], [1, 2, 1, 1], [2, 1, 2, 1], [2, 2, 2, 2]]
        a = Array(np.array(rows), 2)
        model = add_symmetry(build_model(inst), inst)
        check = evaluate_model(model, canonical_assignment(inst, a))
        assert [v for v in check.violations if "sim" in v]

    def test_requires_declared_symmetry(self):
        inst = IpInstance(s=2, k=4)
        with pytest.raises(ValueError):
            add_symmetry(build_model(inst), inst)


class TestLpFormat:
    @pytest.mark.parametrize("kwargs", [
        dict(s=2, k=4, p=1),
        dict(s=2, k=4, p=2),
        dict(s=3, k=5, p=2, symmetry="semicyclic", m_bar=2),
        dict(s=2, k=5, p=1, symmetry="klein"),
        dict(s=3, k=5, p=1, lam=2, symmetry="both", m_bar=2),
    ])
    def test_roundtrip_byte_identical(self, kwargs):
        inst = IpInstance(**kwargs)
        model = build_model(inst)
        if inst.symmetry is not None:
            model = add_symmetry(model, inst)
        text = emit_lp(model)
        again = emit_lp(parse_lp(text))
        assert again == text

    def test_line_length_and_charset(self):
        inst = IpInstance(s=4, k=6, p=2)
        text = emit_lp(build_model(inst))
        assert all(len(line) <= 255 for line in text.splitlines())
        text.encode("ascii")

    def test_sections_present(self):
        inst = IpInstance(s=2, k=4, p=2)
        text = emit_lp(build_model(inst))
        for keyword in ("Minimize", "Subject To", "Bounds", "Generals",
                        "Binaries", "End"):
            assert keyword in text
        assert "^2" in text and "] / 2" in text

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_lp("Maximize\n obj: x\nEnd")


class TestMpsFormat:
    def test_sections_and_markers(self):
        inst = IpInstance(s=2, k=4, p=2)
        text = emit_mps(build_model(inst))
        for section in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"):
            assert section in text
        assert "MARKER" in text and "INTORG" in text and "INTEND" in text
        assert "QMATRIX" in text  # quadratic objective diagonal

    def test_linear_case_has_no_qmatrix(self):
        inst = IpInstance(s=2, k=4, p=1)
        text = emit_mps(build_model(inst))
        assert "QMATRIX" not in text


class TestSolutionIo:
    def test_parse_solution(self):
        text = "# objective 4\nx_1_3_1 1\nx_1_3_2 0.0\n\nd1_1 -1\n"
        values = parse_solution(text)
        assert values == {"x_1_3_1": 1.0, "x_1_3_2": 0.0, "d1_1": -1.0}

    def test_parse_solution_rejects_malformed(self):
        with pytest.raises(ValueError):
            parse_solution("x_1_3_1\n")
        with pytest.raises(ValueError):
            parse_solution("x_1_3_1 one\n")

    def test_solve_with_command(self, tmp_path):
        # A stand-in solver: copies variable names out of the LP file and
        # declares everything zero.
        helper = tmp_path / "fake_solver.py"
        helper.write_text(
            "import re, sys\n"
            "lp, sol = sys.argv[1], sys.argv[2]\n"
            "text = open(lp).read()\n"
            "start = text.index('Binaries')\n"
            "names = text[start:].split()[1:-1]\n"
            "open(sol, 'w').write(''.join(f'{n} 0\\n' for n in names))\n"
        )
        inst = IpInstance(s=2, k=3, p=2)
        model = build_model(inst)
        values = solve_with_command(
            model, f"{sys.executable} {helper} {{lp}} {{sol}}"
        )
        assert values
        assert all(v == 0.0 for v in values.values())
        assert any(n.startswith("x_") for n in values)
