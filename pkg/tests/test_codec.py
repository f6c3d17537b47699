import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sirpool import (
    Status,
    Verdict,
    assemble_matrix,
    build_saffron_submatrix,
    code_width,
    decode_group,
    decode_round,
    evaluate_tests,
)
from tests.test_sir import make_state


def group_results(eta, infected_positions):
    """Evaluate one group's code block directly against an infected subset."""
    block = build_saffron_submatrix(range(eta))
    hit = np.zeros(eta, dtype=bool)
    hit[list(infected_positions)] = True
    return (block & hit).any(axis=1)


class TestSubmatrixConstruction:
    def test_eta_4_hand_checked(self):
        block = build_saffron_submatrix([10, 11, 12, 13])
        assert block.shape == (4, 4)
        # top-half columns spell 00, 01, 10, 11 (most significant bit first)
        assert block[:2].astype(int).T.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
        assert np.array_equal(block[2:], ~block[:2])

    def test_eta_2(self):
        block = build_saffron_submatrix([0, 1])
        assert block.astype(int).tolist() == [[0, 1], [1, 0]]

    def test_eta_5_shape_and_codes(self):
        block = build_saffron_submatrix(range(5))
        assert block.shape == (6, 5)
        weights = 1 << np.arange(2, -1, -1)
        assert (weights @ block[:3].astype(int)).tolist() == [0, 1, 2, 3, 4]
        assert np.array_equal(block[3:], ~block[:3])

    def test_rejects_tiny_groups(self):
        for eta in (0, 1):
            with pytest.raises(ValueError):
                build_saffron_submatrix(range(eta))

    @pytest.mark.parametrize("eta,width", [(2, 1), (3, 2), (4, 2), (5, 3), (8, 3),
                                           (9, 4), (16, 4), (17, 5), (1000, 10)])
    def test_code_width(self, eta, width):
        assert code_width(eta) == width


class TestDecodeGroup:
    def test_single_infection_hand_example(self):
        # member at position 2 of 4 lights rows {0, 3}: code 10 plus complement 01
        results = group_results(4, [2])
        assert np.flatnonzero(results).tolist() == [0, 3]
        verdict = decode_group(results, [20, 21, 22, 23])
        assert verdict.verdict is Verdict.SINGLE
        assert verdict.member == 22

    def test_all_negative(self):
        verdict = decode_group(group_results(4, []), [0, 1, 2, 3])
        assert verdict.verdict is Verdict.ALL_NEGATIVE

    def test_two_infections_is_multiple(self):
        results = group_results(4, [1, 2])
        assert int(results.sum()) > code_width(4)
        assert decode_group(results, [0, 1, 2, 3]).verdict is Verdict.MULTIPLE

    def test_rejects_malformed_slice(self):
        with pytest.raises(ValueError):
            decode_group([1, 0, 0], [0, 1, 2, 3])

    @pytest.mark.parametrize("eta", range(2, 17))
    def test_exhaustive_zero_and_one(self, eta):
        members = list(range(100, 100 + eta))
        assert decode_group(group_results(eta, []), members).verdict is Verdict.ALL_NEGATIVE
        for pos in range(eta):
            verdict = decode_group(group_results(eta, [pos]), members)
            assert verdict.verdict is Verdict.SINGLE
            assert verdict.member == members[pos]

    @pytest.mark.parametrize("eta", range(2, 17))
    def test_exhaustive_pairs_are_multiple(self, eta):
        members = list(range(eta))
        for pair in itertools.combinations(range(eta), 2):
            assert decode_group(group_results(eta, pair), members).verdict is Verdict.MULTIPLE

    @given(st.integers(min_value=3, max_value=16), st.data())
    @settings(max_examples=200, deadline=None)
    def test_larger_subsets_never_misdecode(self, eta, data):
        k = data.draw(st.integers(min_value=3, max_value=eta))
        infected = data.draw(st.sets(st.integers(0, eta - 1), min_size=k, max_size=k))
        verdict = decode_group(group_results(eta, infected), list(range(eta)))
        assert verdict.verdict is not Verdict.ALL_NEGATIVE
        if verdict.verdict is Verdict.SINGLE:
            assert verdict.member in infected


class TestEvaluateTests:
    def test_no_infected_all_negative(self):
        matrix = assemble_matrix(8, [range(4)], [5, 6])
        state = make_state(8, infected_idx=())
        assert not evaluate_tests(matrix, state).any()

    def test_identity_rows_on_infected(self):
        matrix = assemble_matrix(6, [], [0, 1, 2, 3, 4, 5])
        state = make_state(6, infected_idx=[1, 4])
        assert evaluate_tests(matrix, state).tolist() == [False, True, False, False, True, False]

    def test_isolated_contribute_negative(self):
        matrix = assemble_matrix(4, [range(4)], [])
        state = make_state(4, infected_idx=(), isolated_idx=[0, 1, 2, 3])
        assert not evaluate_tests(matrix, state).any()

    def test_matches_brute_force_oracle(self):
        # Independent oracle: the literal double loop OR over the dense matrix.
        rng = np.random.default_rng(99)
        for _ in range(300):
            n = int(rng.integers(4, 13))
            eta = int(rng.integers(2, min(n, 5) + 1))
            members = rng.choice(n, size=eta, replace=False)
            others = np.setdiff1d(np.arange(n), members)
            singles = rng.choice(others, size=min(others.size, int(rng.integers(0, 3))),
                                 replace=False)
            matrix = assemble_matrix(n, [members], singles)
            if matrix.rows > 8:
                continue
            statuses = rng.integers(0, 3, size=n).astype(np.int8)
            state = make_state(n, infected_idx=np.flatnonzero(statuses == Status.INFECTED),
                               isolated_idx=np.flatnonzero(statuses == Status.ISOLATED))
            dense = matrix.entries
            expected = []
            for i in range(matrix.rows):
                row = False
                for j in range(n):
                    row = row or (bool(dense[i, j])
                                  and state.statuses[j] == Status.INFECTED)
                expected.append(row)
            assert evaluate_tests(matrix, state).tolist() == expected

    def test_rejects_population_mismatch(self):
        matrix = assemble_matrix(8, [], [0])
        with pytest.raises(ValueError):
            evaluate_tests(matrix, make_state(9, infected_idx=()))


class TestMatrixLayout:
    def test_group_blocks_and_singles(self):
        matrix = assemble_matrix(20, [[3, 4, 5, 6, 7], [10, 11]], [0, 19])
        assert matrix.rows == 6 + 2 + 2
        assert matrix.groups[0].row_start == 0
        assert matrix.groups[0].row_stop == 6
        assert matrix.groups[1].row_start == 6
        assert matrix.individual_rows == [(8, 0), (9, 19)]

    def test_dense_entries_match_structure(self):
        matrix = assemble_matrix(12, [[2, 3, 4, 5]], [0, 11])
        dense = matrix.entries
        assert dense.shape == (6, 12)
        assert np.array_equal(dense[0:4][:, [2, 3, 4, 5]], build_saffron_submatrix(range(4)))
        untouched = np.setdiff1d(np.arange(12), [2, 3, 4, 5])
        assert not dense[0:4][:, untouched].any()
        assert dense[4, 0] and dense[5, 11]
        assert dense[4].sum() == 1 and dense[5].sum() == 1

    def test_singleton_rows_have_one_entry(self):
        matrix = assemble_matrix(30, [], np.arange(7))
        for row, individual in matrix.individual_rows:
            assert matrix.entries[row].sum() == 1
            assert matrix.entries[row, individual]


class TestDecodeRound:
    def test_collects_groups_and_singles(self):
        matrix = assemble_matrix(20, [[0, 1, 2, 3], [4, 5, 6, 7]], [9, 10])
        state = make_state(20, infected_idx=[2, 9])
        outcome = decode_round(matrix, evaluate_tests(matrix, state))
        assert outcome.identified.tolist() == [2, 9]
        assert outcome.decoded[0].verdict is Verdict.SINGLE
        assert outcome.decoded[1].verdict is Verdict.ALL_NEGATIVE

    def test_multiple_group_yields_nothing(self):
        matrix = assemble_matrix(8, [[0, 1, 2, 3]], [])
        state = make_state(8, infected_idx=[0, 3])
        outcome = decode_round(matrix, evaluate_tests(matrix, state))
        assert outcome.identified.size == 0
        assert outcome.decoded[0].verdict is Verdict.MULTIPLE

    def test_deduplicates_single_and_singleton(self):
        # individual 2 is both the group's single infection and singleton-tested
        matrix = assemble_matrix(8, [[0, 1, 2, 3]], [2])
        state = make_state(8, infected_idx=[2])
        outcome = decode_round(matrix, evaluate_tests(matrix, state))
        assert outcome.identified.tolist() == [2]
