import itertools

import numpy as np
import pytest

from qugame import cgame, qgames
from qugame.cgame import Bimatrix, CharacteristicGame, Imputation, MixedStrategy
from qugame.errors import DomainError


def spin_flip_payoff_table() -> Bimatrix:
    # Alice rows {1, sigma_x}, Bob columns are his four move pairs
    payoffs = [[-1, 1, 1, -1], [1, -1, -1, 1]]
    return Bimatrix.zero_sum(["1", "X"], ["11", "1X", "X1", "XX"], payoffs)


class TestExpectedPayoff:
    def test_spin_flip_uniform_is_fair(self):
        g = spin_flip_payoff_table()
        value = cgame.expected_payoff(g, MixedStrategy.uniform(2), MixedStrategy.uniform(4))
        assert value == (0.0, 0.0)

    def test_pd_defect_defect(self):
        g = qgames.prisoners_dilemma_payoffs()
        value = cgame.expected_payoff(g, MixedStrategy.pure(1, 2), MixedStrategy.pure(1, 2))
        assert value == (1.0, 1.0)

    def test_bos_interior_value(self):
        alpha, beta, gamma = 5.0, 2.0, 0.5
        g = qgames.battle_of_sexes_payoffs(alpha, beta, gamma)
        denom = alpha + beta - 2 * gamma
        p = (alpha - gamma) / denom
        q = (beta - gamma) / denom
        va, vb = cgame.expected_payoff(
            g, MixedStrategy([p, 1 - p]), MixedStrategy([q, 1 - q])
        )
        expected = (alpha * beta - gamma**2) / denom
        assert abs(va - expected) < 1e-12 and abs(vb - expected) < 1e-12

    def test_bilinearity(self, gen):
        g = Bimatrix(["a", "b", "c"], ["x", "y"], gen.normal(size=(3, 2)), gen.normal(size=(3, 2)))
        p1 = MixedStrategy(np.array([0.2, 0.5, 0.3]))
        p2 = MixedStrategy(np.array([0.6, 0.1, 0.3]))
        q = MixedStrategy(np.array([0.7, 0.3]))
        lam = 0.37
        blend = MixedStrategy(lam * p1.probs + (1 - lam) * p2.probs)
        left = cgame.expected_payoff(g, blend, q)
        right1 = cgame.expected_payoff(g, p1, q)
        right2 = cgame.expected_payoff(g, p2, q)
        for k in range(2):
            assert abs(left[k] - (lam * right1[k] + (1 - lam) * right2[k])) < 1e-12

    def test_zero_sum_payoffs_cancel(self, gen):
        g = spin_flip_payoff_table()
        for _ in range(10):
            pa = gen.dirichlet(np.ones(2))
            pb = gen.dirichlet(np.ones(4))
            va, vb = cgame.expected_payoff(g, MixedStrategy(pa), MixedStrategy(pb))
            assert abs(va + vb) < 1e-12

    def test_length_mismatch(self):
        g = qgames.prisoners_dilemma_payoffs()
        with pytest.raises(DomainError):
            cgame.expected_payoff(g, MixedStrategy([1.0]), MixedStrategy.uniform(2))


def brute_force_nash(g: Bimatrix, tol=1e-9):
    """Oracle: enumerate joint best responses directly."""
    cells = []
    m, n = g.shape
    for i in range(m):
        for j in range(n):
            row_ok = all(g.payoff_row[i, j] >= g.payoff_row[i2, j] - tol for i2 in range(m))
            col_ok = all(g.payoff_col[i, j] >= g.payoff_col[i, j2] - tol for j2 in range(n))
            if row_ok and col_ok:
                cells.append((i, j))
    return cells


class TestPureNash:
    def test_prisoners_dilemma(self):
        assert cgame.pure_nash(qgames.prisoners_dilemma_payoffs()) == [(1, 1)]

    def test_battle_of_sexes_two_equilibria(self):
        assert cgame.pure_nash(qgames.battle_of_sexes_payoffs()) == [(0, 0), (1, 1)]

    def test_quantum_pd_four_move_grid(self):
        table = qgames.ewl_table(qgames.move_set("I,X,H,Z"), qgames.prisoners_dilemma_payoffs())
        assert cgame.pure_nash(table) == [(3, 3)]

    def test_matches_brute_force_oracle(self, gen):
        for _ in range(200):
            m = int(gen.integers(1, 6))
            n = int(gen.integers(1, 6))
            a = gen.integers(-3, 6, size=(m, n)).astype(float)
            b = gen.integers(-3, 6, size=(m, n)).astype(float)
            g = Bimatrix([str(i) for i in range(m)], [str(j) for j in range(n)], a, b)
            assert cgame.pure_nash(g) == brute_force_nash(g)


class TestDominance:
    def test_prisoners_dilemma(self):
        rows, cols = cgame.dominant_moves(qgames.prisoners_dilemma_payoffs())
        assert rows == [1] and cols == [1]

    def test_newcomb_dominant_row(self):
        # Alice's payoffs only; the predictor column player has no own table
        alice = [[1_000_000, 0], [1_001_000, 1_000]]
        g = Bimatrix(["only-B2", "both"], ["predict-B2", "predict-both"], alice,
                     [[0, 0], [0, 0]])
        rows, _ = cgame.dominant_moves(g)
        assert rows == [1]

    def test_bos_has_none(self):
        rows, cols = cgame.dominant_moves(qgames.battle_of_sexes_payoffs())
        assert rows == [] and cols == []


class TestPareto:
    def test_prisoners_dilemma_cells(self):
        flags = cgame.pareto_analysis(qgames.prisoners_dilemma_payoffs())
        assert flags.cell(1, 1) == (True, False)   # (1,1) dominated by (3,3)
        assert flags.cell(0, 0) == (False, True)   # (3,3) Pareto optimal

    def test_single_cell_game(self):
        g = Bimatrix(["only"], ["only"], [[2.0]], [[5.0]])
        assert cgame.pareto_analysis(g).cell(0, 0) == (False, True)

    def test_quantum_pd_four_move_corner(self):
        table = qgames.ewl_table(qgames.move_set("I,X,H,Z"), qgames.prisoners_dilemma_payoffs())
        assert cgame.pareto_analysis(table).cell(3, 3) == (False, True)


class TestMixedNash2x2:
    def test_bos_formulas_random_triples(self, gen):
        for _ in range(20):
            gamma = float(gen.uniform(0, 2))
            beta = gamma + float(gen.uniform(0.1, 2))
            alpha = beta + float(gen.uniform(0.1, 2))
            g = qgames.battle_of_sexes_payoffs(alpha, beta, gamma)
            result = cgame.mixed_nash_2x2(g)
            denom = alpha + beta - 2 * gamma
            assert result.interior
            assert abs(result.p - (alpha - gamma) / denom) < 1e-12
            assert abs(result.q - (beta - gamma) / denom) < 1e-12
            assert abs(result.payoffs[0] - (alpha * beta - gamma**2) / denom) < 1e-12

    def test_quantum_bos_corner_submatrix(self):
        alpha, beta = 3.0, 2.0
        table = qgames.ewl_table(qgames.move_set("I,X,H,Z"), qgames.battle_of_sexes_payoffs())
        corner = Bimatrix(
            ["I", "Z"], ["I", "Z"],
            [[table.payoff_row[i][j] for j in (0, 3)] for i in (0, 3)],
            [[table.payoff_col[i][j] for j in (0, 3)] for i in (0, 3)],
        )
        result = cgame.mixed_nash_2x2(corner)
        assert abs(result.p - 0.5) < 1e-12 and abs(result.q - 0.5) < 1e-12
        assert abs(result.payoffs[0] - (alpha + beta) / 2) < 1e-12
        assert abs(result.payoffs[1] - (alpha + beta) / 2) < 1e-12

    def test_pd_degenerate(self):
        g = qgames.prisoners_dilemma_payoffs()
        result = cgame.mixed_nash_2x2(g)
        assert not result.interior
        assert result.pure_equilibria == ((1, 1),)
        # grid-search oracle: no interior profile is a joint best response
        grid = np.linspace(0.05, 0.95, 19)
        for p, q in itertools.product(grid, grid):
            pa = MixedStrategy([p, 1 - p])
            pb = MixedStrategy([q, 1 - q])
            base_a, base_b = cgame.expected_payoff(g, pa, pb)
            best_a = max(cgame.expected_payoff(g, MixedStrategy.pure(i, 2), pb)[0] for i in range(2))
            best_b = max(cgame.expected_payoff(g, pa, MixedStrategy.pure(j, 2))[1] for j in range(2))
            assert best_a > base_a + 1e-9 or best_b > base_b + 1e-9


class TestZeroSum:
    def test_matching_pennies(self):
        g = Bimatrix.zero_sum(["H", "T"], ["H", "T"], [[1, -1], [-1, 1]])
        value, pa, pb = cgame.zero_sum_value_2x2(g)
        assert abs(value) < 1e-12
        assert np.allclose(pa.probs, [0.5, 0.5])
        assert np.allclose(pb.probs, [0.5, 0.5])

    def test_asymmetric_game(self):
        g = Bimatrix.zero_sum(["a", "b"], ["x", "y"], [[2, 0], [0, 1]])
        value, pa, pb = cgame.zero_sum_value_2x2(g)
        assert abs(value - 2 / 3) < 1e-12
        assert np.allclose(pa.probs, [1 / 3, 2 / 3])
        # independent check: fine-grid maximin
        grid = np.linspace(0, 1, 2001)
        payoff = np.minimum(2 * grid, 0 * grid + (1 - grid))
        assert abs(payoff.max() - value) < 1e-3

    def test_saddle_point(self):
        g = Bimatrix.zero_sum(["a", "b"], ["x", "y"], [[2, 1], [0, -1]])
        value, pa, pb = cgame.zero_sum_value_2x2(g)
        assert value == 1.0
        assert np.allclose(pa.probs, [1, 0]) and np.allclose(pb.probs, [0, 1])

    def test_spin_flip_reduction(self):
        # the four Bob move-pair columns collapse to the two distinct ones
        full = spin_flip_payoff_table()
        assert np.array_equal(full.payoff_row[:, 0], full.payoff_row[:, 3])
        assert np.array_equal(full.payoff_row[:, 1], full.payoff_row[:, 2])
        reduced = Bimatrix.zero_sum(["1", "X"], ["keep", "flip"], full.payoff_row[:, :2])
        value, pa, pb = cgame.zero_sum_value_2x2(reduced)
        assert abs(value) < 1e-12
        assert np.allclose(pa.probs, [0.5, 0.5]) and np.allclose(pb.probs, [0.5, 0.5])

    def test_non_zero_sum_rejected(self):
        with pytest.raises(DomainError):
            cgame.zero_sum_value_2x2(qgames.prisoners_dilemma_payoffs())


class TestRepeatedPayoffs:
    def test_three_games_fair_coin(self):
        dist = cgame.repeated_payoff_distribution(3, 0.5)
        assert [pay for pay, _ in dist] == [-3, -1, 1, 3]
        assert np.allclose([p for _, p in dist], [1 / 8, 3 / 8, 3 / 8, 1 / 8])

    def test_single_game(self):
        assert cgame.repeated_payoff_distribution(1, 0.3) == [(-1, 0.7), (1, 0.3)]

    def test_fair_expectation_any_length(self):
        for n in range(1, 12):
            dist = cgame.repeated_payoff_distribution(n, 0.5)
            assert abs(sum(pay * p for pay, p in dist)) < 1e-12

    def test_probabilities_sum_to_one(self):
        for n in range(1, 31):
            dist = cgame.repeated_payoff_distribution(n, 0.37)
            assert abs(sum(p for _, p in dist) - 1.0) < 1e-12


class TestESS:
    def test_pd_defect_is_ess(self):
        g = qgames.prisoners_dilemma_payoffs()
        result = cgame.ess_test(g, incumbent=1, mutant=0, eta=0.2)
        assert result.stable
        assert result.invasion_barrier > 0.999

    def test_quantum_invasion_sequence(self):
        table = qgames.ewl_table(qgames.move_set("I,X,H,Z"), qgames.prisoners_dilemma_payoffs())
        assert not cgame.ess_test(table, incumbent=1, mutant=2, eta=0.01).stable
        assert not cgame.ess_test(table, incumbent=2, mutant=3, eta=0.01).stable
        # the final sigma_z population resists the classical moves
        assert cgame.ess_test(table, incumbent=3, mutant=1, eta=0.1).stable

    def test_small_eta_matches_best_response(self, gen):
        for _ in range(50):
            a = gen.integers(-3, 6, size=(3, 3)).astype(float)
            g = Bimatrix(["0", "1", "2"], ["0", "1", "2"], a, a.T)
            for i in range(3):
                for j in range(3):
                    if i == j:
                        continue
                    result = cgame.ess_test(g, i, j, eta=1e-7)
                    if a[i, i] > a[j, i]:
                        assert result.stable
                    if a[i, i] < a[j, i]:
                        assert not result.stable

    def test_asymmetric_rejected(self):
        g = Bimatrix(["a", "b"], ["x", "y"], [[1, 2], [3, 4]], [[0, 0], [0, 0]])
        with pytest.raises(DomainError):
            cgame.ess_test(g, 0, 1, 0.1)

    def test_barrier_bisection(self):
        # gap flips sign at eta = 0.5 for this hand-built game
        a = np.array([[2.0, 0.0], [1.0, 3.0]])
        g = Bimatrix(["i", "j"], ["i", "j"], a, a.T)
        result = cgame.ess_test(g, 0, 1, eta=0.1)
        assert result.stable
        assert abs(result.invasion_barrier - 0.25) < 1e-5  # (2-1)/(2-1+3-0)


class TestCore:
    def test_pseudo_telepathy_probability_vectors(self, gen):
        game = CharacteristicGame(4, {(0, 1, 2, 3): 1.0})
        for _ in range(20):
            allocation = gen.dirichlet(np.ones(4))
            assert cgame.core_check(game, Imputation(allocation))

    def test_efficiency_violation(self):
        game = CharacteristicGame(3, {(0, 1, 2): 1.0})
        assert not cgame.core_check(game, Imputation([0.3, 0.3, 0.3]))

    def test_empty_core_game(self):
        # v({0,1}) = 2 exceeds v(N) = 1: no allocation can satisfy both
        game = CharacteristicGame(3, {(0, 1): 2.0, (0, 1, 2): 1.0})
        steps = np.linspace(0, 1, 21)
        for x in steps:
            for y in steps:
                if x + y > 1:
                    continue
                imp = Imputation([x, y, 1 - x - y])
                assert not cgame.core_check(game, imp)

    def test_empty_coalition_must_be_zero(self):
        with pytest.raises(DomainError):
            CharacteristicGame(2, {(): 1.0})
