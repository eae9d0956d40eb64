"""Rewiring engine: synthesis conditions, exact sign tracking, branches."""

import itertools

import numpy as np
import pytest

from rewire.codes import catalog_code
from rewire.errors import EngineInvariantError, SynthesisError
from rewire.pauli import PauliOperator, commutes, multiply, parse_pauli
from rewire.rewiring import (
    BranchReport,
    LogicalAction,
    RewiringPair,
    TableauState,
    canonical_signed_form,
    check_pair,
    classify_t_type,
    elementary_rewiring,
    extract_logical_action,
    find_first_observable,
    find_second_observable,
    fix_sign,
    lemma1_update,
    measurement_step,
    simulate_all_branches,
    solution_to_observable,
    sqrt_action,
    synthesize_pair,
)

TOY_PAIR = RewiringPair(
    m=1,
    g=parse_pauli("+IX"),
    g_prime=parse_pauli("+YZ"),
    targets=((0, 1),),
)


class TestFindObservables:
    def test_toy2_first_solutions(self):
        toy2 = catalog_code("toy2")
        space = find_first_observable(toy2, 1)
        found = {str(solution_to_observable(v)) for v in space}
        assert found == {"+IX", "+ZY"}

    def test_toy2_first_matches_brute_force(self):
        # oracle: scan all 16 two-qubit Paulis for the defining conditions
        toy2 = catalog_code("toy2")
        space = find_first_observable(toy2, 1)
        found = {str(solution_to_observable(v)) for v in space}
        brute = set()
        for bits in itertools.product([0, 1], repeat=4):
            op = PauliOperator(2, np.dot(bits[:2], bits[2:]) % 2, bits[:2], bits[2:])
            if (
                commutes(op, toy2.generators[0]) == 1
                and commutes(op, toy2.logical_xs[0]) == 0
                and commutes(op, toy2.logical_zs[0]) == 0
            ):
                brute.add(str(op))
        assert found == brute

    def test_toy2_second_is_yz(self):
        toy2 = catalog_code("toy2")
        space = find_second_observable(toy2, 1, parse_pauli("+IX"), [(0, 1)])
        assert space.dimension == 0
        assert str(solution_to_observable(space.particular)) == "+YZ"

    def test_steane_every_sampled_g_valid(self):
        steane = catalog_code("steane")
        space = find_first_observable(steane, 6)
        rng = np.random.default_rng(67)
        for _ in range(25):
            g = solution_to_observable(space.member(int(rng.integers(space.size))))
            for j, gen in enumerate(steane.generators, start=1):
                assert commutes(g, gen) == (1 if j == 6 else 0)
            assert commutes(g, steane.logical_xs[0]) == 0
            assert commutes(g, steane.logical_zs[0]) == 0

    def test_five_m4(self):
        five = catalog_code("five")
        space = find_first_observable(five, 4)
        assert space.size >= 1
        for v in itertools.islice(space, 8):
            g = solution_to_observable(v)
            assert commutes(g, five.logical_xs[0]) == 0
            assert commutes(g, five.logical_zs[0]) == 0

    def test_identity_targets_give_commuting_gprime(self):
        for name in ("toy2", "five", "steane"):
            code = catalog_code(name)
            m = code.num_generators
            pair = synthesize_pair(code, m, [(0, 0)] * code.k)
            for lx, lz in zip(code.logical_xs, code.logical_zs):
                assert commutes(pair.g_prime, lx) == 0
                assert commutes(pair.g_prime, lz) == 0

    def test_bad_m_rejected(self):
        with pytest.raises(ValueError):
            find_first_observable(catalog_code("toy2"), 2)

    def test_second_rejects_invalid_alpha(self):
        toy2 = catalog_code("toy2")
        with pytest.raises(SynthesisError):
            find_second_observable(toy2, 1, parse_pauli("+XI"), [(0, 1)])


class TestLemma1Update:
    def test_toy2_first_step(self):
        state = TableauState.from_code(catalog_code("toy2"))
        new = lemma1_update(state, parse_pauli("+IX"), parse_pauli("+ZZ"))
        assert [str(g) for g in new.generators] == ["+IX"]
        assert str(new.logical_xs[0]) == "+XX"
        assert str(new.logical_zs[0]) == "+ZI"

    def test_toy2_second_step(self):
        state = TableauState.from_code(catalog_code("toy2"))
        state = lemma1_update(state, parse_pauli("+IX"), parse_pauli("+ZZ"))
        state = lemma1_update(state, parse_pauli("+YZ"), parse_pauli("+IX"))
        # c(+YZ, +ZI) = 1, so Z_L picks up the correction: (+IX)(+ZI) = +ZX
        assert str(state.logical_zs[0]) == "+ZX"
        assert str(state.logical_xs[0]) == "+XX"

    def test_untouched_operators_bit_identical(self):
        state = TableauState.from_code(catalog_code("steane"))
        pair = synthesize_pair(catalog_code("steane"), 6, [(0, 0)])
        new = lemma1_update(state, pair.g, state.generators[5])
        for old, fresh in zip(state.logical_xs + state.logical_zs, new.logical_xs + new.logical_zs):
            assert old == fresh

    def test_named_errors(self):
        state = TableauState.from_code(catalog_code("toy2"))
        with pytest.raises(SynthesisError, match="not anticommuting with designated"):
            lemma1_update(state, parse_pauli("+XX"), parse_pauli("+ZZ"))
        ff4 = TableauState.from_code(catalog_code("ff4"))
        with pytest.raises(SynthesisError, match="second generator"):
            lemma1_update(ff4, parse_pauli("+XZII"), ff4.generators[1])
        with pytest.raises(SynthesisError, match="not a current generator"):
            lemma1_update(state, parse_pauli("+IX"), parse_pauli("+ZI"))


class TestElementaryRewiring:
    def test_toy2_worked_example(self):
        state = TableauState.from_code(catalog_code("toy2"))
        final, action = elementary_rewiring(state, TOY_PAIR)
        assert str(action.x_images[0]) == "+X"
        assert str(action.z_images[0]) == "-Y"
        assert classify_t_type(action) == ("X", "t_sqrt", 0)
        # group restored with signs
        assert canonical_signed_form(final.generators) == canonical_signed_form(state.generators)

    def test_identity_targets_identity_action(self):
        for name in ("toy2", "ff4", "five", "steane"):
            code = catalog_code(name)
            pair = synthesize_pair(code, code.num_generators, [(0, 0)] * code.k)
            _, action = elementary_rewiring(TableauState.from_code(code), pair)
            assert action == LogicalAction.identity(code.k)

    def test_steane_11_swaps_x_and_z(self):
        code = catalog_code("steane")
        pair = synthesize_pair(code, 6, [(1, 1)])
        _, action = elementary_rewiring(TableauState.from_code(code), pair)
        axis, variant, q = classify_t_type(action)
        assert axis == "Y" and q == 0
        # X -> +/-Z and Z -> -/+X with opposite signs
        sx = action.x_images[0].sign_exponent() // 2
        sz = action.z_images[0].sign_exponent() // 2
        assert sx != sz

    def test_invalid_pair_rejected(self):
        code = catalog_code("toy2")
        bad = RewiringPair(1, parse_pauli("+XI"), parse_pauli("+YZ"), ((0, 1),))
        with pytest.raises(SynthesisError):
            elementary_rewiring(TableauState.from_code(code), bad)


class TestExtractLogicalAction:
    def test_worked_reduction(self):
        action = extract_logical_action(
            [parse_pauli("+XX")],
            [parse_pauli("+ZI")],
            [parse_pauli("+XX")],
            [parse_pauli("-XY")],
            [parse_pauli("+ZZ")],
        )
        assert str(action.z_images[0]) == "-Y"
        assert str(action.x_images[0]) == "+X"

    def test_identity(self):
        code = catalog_code("five")
        action = extract_logical_action(
            code.logical_xs, code.logical_zs, code.logical_xs, code.logical_zs, code.generators
        )
        assert action == LogicalAction.identity(1)

    def test_stabilizer_multiple_same_action(self):
        code = catalog_code("five")
        dressed = multiply(code.logical_xs[0], code.generators[2])
        action = extract_logical_action(
            code.logical_xs, code.logical_zs, [dressed], code.logical_zs, code.generators
        )
        assert action == LogicalAction.identity(1)

    def test_leak_detected(self):
        code = catalog_code("toy2")
        with pytest.raises(EngineInvariantError, match="leaked"):
            extract_logical_action(
                code.logical_xs, code.logical_zs,
                [parse_pauli("+XI")], code.logical_zs, code.generators,
            )


class TestBranches:
    def test_toy2_all_branches_agree(self):
        report = simulate_all_branches(TableauState.from_code(catalog_code("toy2")), TOY_PAIR)
        assert isinstance(report, BranchReport)
        assert report.ok and not report.divergent

    def test_steane_identity_pair_branches(self):
        code = catalog_code("steane")
        pair = synthesize_pair(code, 6, [(0, 0)])
        report = simulate_all_branches(TableauState.from_code(code), pair)
        assert report.ok
        assert report.action == LogicalAction.identity(1)

    def test_missing_correction_diverges(self):
        # negative control: skip the correction on the second measurement
        code = catalog_code("toy2")
        state = TableauState.from_code(code)
        gm = state.generators[0]
        complete, broken = [], []
        for outcomes in itertools.product((+1, -1), repeat=3):
            st_ok = state
            st_bad = state
            for step, (measured, o) in enumerate(zip((TOY_PAIR.g, TOY_PAIR.g_prime, gm), outcomes)):
                st_ok = measurement_step(st_ok, measured, o, apply_correction=True)
                st_bad = measurement_step(st_bad, measured, o, apply_correction=(step != 1))
            complete.append([str(op) for op in st_ok.generators + st_ok.logical_xs + st_ok.logical_zs])
            broken.append([str(op) for op in st_bad.generators + st_bad.logical_xs + st_bad.logical_zs])
        assert all(c == complete[0] for c in complete)
        assert any(b != broken[0] for b in broken)


class TestFixSign:
    def test_worked_example(self):
        code = catalog_code("toy2")
        fixed = fix_sign(code, TOY_PAIR, "sqrt")
        assert fixed.g_prime == TOY_PAIR.g_prime.negated()
        _, action = elementary_rewiring(TableauState.from_code(code), fixed)
        assert str(action.z_images[0]) == "+Y"
        assert classify_t_type(action) == ("X", "sqrt", 0)

    def test_already_correct_unchanged(self):
        code = catalog_code("toy2")
        assert fix_sign(code, TOY_PAIR, "t_sqrt") is TOY_PAIR

    def test_involution(self):
        assert TOY_PAIR.negated_second().negated_second() == TOY_PAIR

    def test_identity_rejected(self):
        code = catalog_code("five")
        pair = synthesize_pair(code, 4, [(0, 0)])
        with pytest.raises(SynthesisError):
            fix_sign(code, pair, "sqrt")


class TestTableOne:
    EXPECTED = {(0, 0): "identity", (0, 1): "X", (1, 0): "Z", (1, 1): "Y"}

    @pytest.mark.parametrize("name", ["toy2", "five", "steane"])
    def test_classification_rows(self, name):
        code = catalog_code(name)
        for (a, b), expected in self.EXPECTED.items():
            pair = synthesize_pair(code, code.num_generators, [(a, b)])
            _, action = elementary_rewiring(TableauState.from_code(code), pair)
            axis, _, _ = classify_t_type(action)
            axis = "identity" if axis == "identity" else axis
            assert axis == expected, f"{name} targets {(a, b)}"

    @pytest.mark.parametrize("name", ["toy2", "five", "steane"])
    def test_bottom_row_never_fixes_x(self, name):
        # targets (1,1): the image of X_L is always +/-Z_L, never +/-X_L,
        # and the two image signs are opposite
        code = catalog_code(name)
        first = find_first_observable(code, code.num_generators)
        rng = np.random.default_rng(71)
        for _ in range(10):
            g = solution_to_observable(first.member(int(rng.integers(first.size))))
            second = find_second_observable(code, code.num_generators, g, [(1, 1)])
            g2 = solution_to_observable(second.member(int(rng.integers(second.size))))
            pair = RewiringPair(code.num_generators, g, g2, ((1, 1),))
            _, action = elementary_rewiring(TableauState.from_code(code), pair)
            ximg = action.x_images[0]
            assert not ximg.x.any() and ximg.z.any()  # Z-type image
            assert action.x_images[0].sign_exponent() != action.z_images[0].sign_exponent()


class TestRandomizedSyntheses:
    def test_group_restoration_and_symplecticity(self):
        rng = np.random.default_rng(73)
        codes = [catalog_code(n) for n in ("toy2", "ff4", "five", "steane")]
        for _ in range(120):
            code = codes[int(rng.integers(len(codes)))]
            m = int(rng.integers(1, code.num_generators + 1))
            targets = [(int(rng.integers(2)), int(rng.integers(2))) for _ in range(code.k)]
            first = find_first_observable(code, m)
            g = solution_to_observable(first.member(int(rng.integers(first.size))))
            second = find_second_observable(code, m, g, targets)
            g2 = solution_to_observable(second.member(int(rng.integers(second.size))))
            pair = RewiringPair(m, g, g2, tuple(targets))
            assert check_pair(code, pair) == []
            state = TableauState.from_code(code)
            final, action = elementary_rewiring(state, pair)
            assert canonical_signed_form(final.generators) == canonical_signed_form(state.generators)
            assert action.is_symplectic()


class TestLogicalActionValue:
    def test_compose_and_apply(self):
        s = sqrt_action(1, 0, "Z", "sqrt")
        assert str(s.image(parse_pauli("+X"))) == "+Y"
        s2 = s.then(s)
        # sqrt(Z) twice is the Pauli Z action: X -> -X
        assert str(s2.image(parse_pauli("+X"))) == "-X"
        assert str(s2.image(parse_pauli("+Z"))) == "+Z"

    def test_json_roundtrip(self):
        action = sqrt_action(2, 1, "Y", "t_sqrt")
        again = LogicalAction.from_json(action.to_json())
        assert again == action

    def test_symplectic_invariant(self):
        action = sqrt_action(2, 0, "X", "sqrt").then(sqrt_action(2, 1, "Z", "t_sqrt"))
        assert action.is_symplectic()
