import numpy as np
import pytest

from cooclab.chains import (
    EdgeList,
    HmmSpec,
    barbell,
    barbell_adjacency,
    erdos_renyi_walk,
    from_edge_list,
    hmm_joint_chain,
    load_matrix_or_edges,
    read_edge_list,
    read_hmm,
    stationary_from_degrees,
    winning_streak,
)
from cooclab.cooccurrence import project_states
from cooclab.errors import BadIndexError, CliqueTooSmallError, IsolatedVertexError
from cooclab.markov import (
    is_reversible,
    mixing_time,
    regularity_check,
    stationary_distribution,
)


class TestBarbell:
    def test_single_edge_configuration(self):
        P = barbell(50, 0)
        assert P.shape == (100, 100)
        for v in range(49):  # non-bridge left clique vertices
            row = P[v]
            assert np.count_nonzero(row) == 49
            np.testing.assert_allclose(row[row > 0], 1 / 49)
        assert P[49, 50] == pytest.approx(1 / 50)

    def test_path_variant_size(self):
        assert barbell(33, 34).shape == (100, 100)

    def test_small_by_hand(self):
        A = np.zeros((7, 7))
        for block in ([0, 1, 2], [4, 5, 6]):
            for i in block:
                for j in block:
                    if i != j:
                        A[i, j] = 1
        A[2, 3] = A[3, 2] = A[3, 4] = A[4, 3] = 1
        np.testing.assert_array_equal(barbell_adjacency(3, 1), A)
        P = barbell(3, 1)
        np.testing.assert_array_equal(P[3], [0, 0, 0.5, 0, 0.5, 0, 0])

    def test_clique_too_small(self):
        with pytest.raises(CliqueTooSmallError):
            barbell(2, 0)

    @pytest.mark.parametrize("k,path", [(3, 0), (5, 2), (10, 7)])
    def test_reversible_with_degree_stationary(self, k, path):
        A = barbell_adjacency(k, path)
        P = barbell(k, path)
        pi = stationary_from_degrees(A)
        F = pi[:, None] * P
        assert np.max(np.abs(F - F.T)) <= 1e-12
        np.testing.assert_allclose(stationary_distribution(P), pi, atol=1e-10)


class TestWinningStreak:
    def test_rows(self):
        P = winning_streak(5)
        np.testing.assert_array_equal(P[1], [0.5, 0, 0.5, 0, 0])
        np.testing.assert_array_equal(P[4], [0.5, 0, 0, 0, 0.5])
        np.testing.assert_array_equal(P.sum(axis=1), np.ones(5))

    def test_mixing_independent_of_n(self):
        taus = [mixing_time(winning_streak(n), 1 / 8) for n in (5, 50, 100)]
        assert taus[0] == taus[1] == taus[2] <= 3


class TestErdosRenyi:
    def test_hundred_vertex_sparse_graph(self):
        P, attempts = erdos_renyi_walk(100, 0.1, 7, return_attempts=True)
        assert P.shape == (100, 100)
        assert regularity_check(P).regular
        assert 1 <= attempts <= 100

    def test_deterministic(self):
        a = erdos_renyi_walk(30, 0.2, 11)
        b = erdos_renyi_walk(30, 0.2, 11)
        assert a.tobytes() == b.tobytes()
        assert a.tobytes() != erdos_renyi_walk(30, 0.2, 12).tobytes()

    def test_dense_limit(self):
        # a row drops 2+ of its 9 edges with probability ~3.4e-3, so over 200 rows
        # a few short rows are expected; require the bulk to have support >= n - 2
        short = 0
        for seed in range(20):
            P = erdos_renyi_walk(10, 0.99, seed)
            assert regularity_check(P).regular
            short += int(np.sum(np.count_nonzero(P, axis=1) < 8))
        assert short <= 5

    def test_reversible(self):
        P = erdos_renyi_walk(40, 0.2, 3)
        assert is_reversible(P, stationary_distribution(P))


class TestEdgeList:
    def test_triangle(self):
        P = from_edge_list(EdgeList(3, [(0, 1), (1, 2), (0, 2)]))
        for row in P:
            assert sorted(row) == [0, 0.5, 0.5]

    def test_single_edge_periodic(self):
        P = from_edge_list(EdgeList(2, [(0, 1)]))
        np.testing.assert_array_equal(P, [[0, 1], [1, 0]])
        assert regularity_check(P).period == 2

    def test_duplicates_merged(self):
        e = EdgeList(3, [(0, 1, 1.0), (1, 0, 2.0), (1, 2)])
        assert e.edges == [(0, 1, 3.0), (1, 2, 1.0)]
        P = from_edge_list(e)
        assert P[1, 0] == pytest.approx(0.75)

    def test_errors(self):
        with pytest.raises(BadIndexError):
            EdgeList(2, [(0, 2)])
        with pytest.raises(IsolatedVertexError):
            from_edge_list(EdgeList(3, [(0, 1)]))

    def test_weighted_reversible(self):
        e = EdgeList(4, [(0, 1, 2.0), (1, 2, 0.5), (2, 3, 1.5), (3, 0, 1.0), (0, 2, 0.25)])
        A = e.adjacency()
        P = from_edge_list(e)
        assert is_reversible(P, stationary_from_degrees(A))

    def test_file_round_trip(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("# n=4\n0 1\n1 2 2.5\n2 3\n3 0\n0 2\n")
        e = read_edge_list(p)
        assert e.n == 4 and (1, 2, 2.5) in e.edges
        P = load_matrix_or_edges(p)
        assert P.shape == (4, 4)
        m = tmp_path / "m.txt"
        m.write_text("2\n0.5 0.5\n0.25 0.75\n")
        np.testing.assert_array_equal(load_matrix_or_edges(m), [[0.5, 0.5], [0.25, 0.75]])


class TestHmm:
    H = np.array([[0.9, 0.1], [0.2, 0.8]])
    E = np.array([[0.7, 0.3], [0.4, 0.6]])

    def test_single_hidden_state_is_iid(self):
        E = np.array([[0.2, 0.5, 0.3]])
        P, obs = hmm_joint_chain(HmmSpec(np.array([[1.0]]), E))
        for row in P:
            np.testing.assert_allclose(row, E[0])
        np.testing.assert_array_equal(obs, [0, 1, 2])

    def test_identity_emission(self):
        H = np.array([[0.3, 0.7, 0.0], [0.1, 0.4, 0.5], [0.6, 0.0, 0.4]])
        P, obs = hmm_joint_chain(HmmSpec(H, np.eye(3)))
        # only diagonal pairs (y = x) are reachable; restricted to them P equals H
        diag = [y * 3 + y for y in range(3)]
        np.testing.assert_allclose(P[np.ix_(diag, diag)], H)

    def test_two_by_two_by_hand(self):
        P, obs = hmm_joint_chain(HmmSpec(self.H, self.E))
        for y in range(2):
            for x in range(2):
                for y2 in range(2):
                    for x2 in range(2):
                        assert P[y * 2 + x, y2 * 2 + x2] == pytest.approx(self.H[x, x2] * self.E[x2, y2])
        np.testing.assert_allclose(P.sum(axis=1), 1, atol=1e-15)
        np.testing.assert_array_equal(obs, [0, 0, 1, 1])

    def test_marginal_is_observable_stationary(self):
        P, obs = hmm_joint_chain(HmmSpec(self.H, self.E))
        pi = stationary_distribution(P)
        marginal = np.bincount(obs, weights=pi)
        hidden_pi = stationary_distribution(self.H)
        np.testing.assert_allclose(marginal, hidden_pi @ self.E, atol=1e-12)
        # projection of Pi P (pair law) onto observables has the same marginals
        J = project_states(pi[:, None] * P, obs)
        np.testing.assert_allclose(J.sum(axis=1), marginal, atol=1e-12)

    def test_file(self, tmp_path):
        p = tmp_path / "h.txt"
        p.write_text("2\n0.9 0.1\n0.2 0.8\n\n2\n0.7 0.3\n0.4 0.6\n")
        h = read_hmm(p)
        np.testing.assert_array_equal(h.emission, self.E)
