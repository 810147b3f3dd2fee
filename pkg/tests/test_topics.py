from datetime import date

import numpy as np
import pytest
import scipy.sparse as sp

from newslens.topics import (
    NmfFactors,
    agenda_profile,
    nmf_factorize,
    reconstruction_error,
    top_keywords,
    topic_weight_series,
)
from newslens.vectorize import Vocabulary, build_vocabulary, tfidf_matrix

from conftest import make_article


def random_nonneg(rng, d, t):
    return rng.random((d, t))


class TestNmfFactorize:
    def test_deterministic_for_seed(self):
        x = np.random.default_rng(7).random((12, 9))
        a = nmf_factorize(x, n_topics=3, seed=42)
        b = nmf_factorize(x, n_topics=3, seed=42)
        assert np.array_equal(a.H, b.H)
        assert np.array_equal(a.W, b.W)
        assert np.array_equal(a.errors, b.errors)
        c = nmf_factorize(x, n_topics=3, seed=43)
        assert not np.array_equal(a.H, c.H)

    def test_rank_one_recovered_exactly(self):
        rng = np.random.default_rng(3)
        x = np.outer(rng.random(30) + 0.1, rng.random(20) + 0.1)
        factors = nmf_factorize(x, n_topics=1, seed=0, tol=1e-12, max_iter=2000)
        assert factors.final_error < 1e-6

    def test_error_history_non_increasing(self):
        rng = np.random.default_rng(11)
        for trial in range(10):
            d = int(rng.integers(4, 12))
            t = int(rng.integers(4, 12))
            k = int(rng.integers(1, min(d, t) + 1))
            x = random_nonneg(rng, d, t)
            factors = nmf_factorize(x, n_topics=k, seed=trial)
            e = factors.errors
            assert np.all(e[1:] <= e[:-1] * (1 + 1e-12))

    def test_error_history_shape(self):
        x = np.random.default_rng(5).random((8, 6))
        factors = nmf_factorize(x, n_topics=2, seed=1)
        assert len(factors.errors) == factors.iterations + 1
        assert factors.errors[-1] == factors.final_error
        # the first entry predates any update, so it reflects the random init
        assert factors.errors[0] > factors.final_error

    def test_factors_non_negative_and_readonly(self):
        x = np.random.default_rng(9).random((10, 7))
        factors = nmf_factorize(x, n_topics=3, seed=2)
        assert factors.H.min() >= 0.0
        assert factors.W.min() >= 0.0
        with pytest.raises(ValueError):
            factors.H[0, 0] = 1.0
        with pytest.raises(ValueError):
            factors.W[0, 0] = 1.0

    def test_w_rows_unit_norm(self):
        x = np.random.default_rng(13).random((10, 8))
        factors = nmf_factorize(x, n_topics=4, seed=3)
        assert np.allclose(np.linalg.norm(factors.W, axis=1), 1.0)

    def test_normalization_preserves_product(self):
        x = np.random.default_rng(17).random((9, 9))
        factors = nmf_factorize(x, n_topics=3, seed=4)
        direct = float(np.linalg.norm(factors.H @ factors.W - x))
        assert direct == pytest.approx(factors.final_error, rel=1e-9)

    def test_accepts_sparse_and_doc_term_matrix(self):
        arts = [
            make_article(id=f"a{i}", title="", body="apple pear kiwi mango " * (i + 1))
            for i in range(4)
        ]
        vocab = build_vocabulary(arts, min_df=1)
        dtm = tfidf_matrix(arts, vocab)
        f1 = nmf_factorize(dtm, n_topics=2, seed=5)
        f2 = nmf_factorize(dtm.matrix, n_topics=2, seed=5)
        f3 = nmf_factorize(dtm.matrix.toarray(), n_topics=2, seed=5)
        assert np.array_equal(f1.H, f2.H)
        assert np.array_equal(f2.H, f3.H)
        assert f1.doc_ids == dtm.doc_ids
        assert f1.vocab is vocab
        assert f2.vocab is None

    def test_rank_bounds_enforced(self):
        x = np.ones((4, 5))
        with pytest.raises(ValueError, match="n_topics"):
            nmf_factorize(x, n_topics=0, seed=0)
        with pytest.raises(ValueError, match="n_topics"):
            nmf_factorize(x, n_topics=5, seed=0)
        nmf_factorize(x, n_topics=4, seed=0)  # boundary is allowed

    def test_negative_input_rejected(self):
        x = np.ones((3, 3))
        x[1, 2] = -0.5
        with pytest.raises(ValueError, match="non-negative"):
            nmf_factorize(x, n_topics=1, seed=0)

    def test_parameter_validation(self):
        x = np.ones((3, 3))
        with pytest.raises(ValueError, match="tol"):
            nmf_factorize(x, n_topics=1, seed=0, tol=0.0)
        with pytest.raises(ValueError, match="max_iter"):
            nmf_factorize(x, n_topics=1, seed=0, max_iter=0)

    def test_reconstruction_error_matches_dense_norm(self):
        rng = np.random.default_rng(23)
        x = rng.random((7, 5))
        factors = nmf_factorize(x, n_topics=2, seed=6)
        expected = float(np.linalg.norm(factors.H @ factors.W - x))
        assert reconstruction_error(x, factors) == pytest.approx(expected, rel=1e-12)

    def test_error_on_large_matrix_uses_trace_form(self):
        # d * t above the dense cutoff exercises the expanded trace formula
        rng = np.random.default_rng(29)
        d = t = 2049
        x = sp.random(d, t, density=2e-4, random_state=31, format="csr")
        h = rng.random((d, 2))
        w = rng.random((2, t))
        errors = np.array([0.0])
        factors = NmfFactors(
            H=h, W=w, n_topics=2, final_error=0.0, iterations=0,
            errors=errors, doc_ids=tuple(str(i) for i in range(d)),
        )
        got = reconstruction_error(x, factors)
        expected = float(np.linalg.norm(h @ w - x.toarray()))
        assert got == pytest.approx(expected, rel=1e-9)

    def test_shape_mismatch_rejected(self):
        x = np.ones((4, 4))
        factors = nmf_factorize(np.ones((3, 3)), n_topics=1, seed=0)
        with pytest.raises(ValueError, match="shape"):
            reconstruction_error(x, factors)


class TestTopKeywords:
    def make_factors(self, w, terms):
        return NmfFactors(
            H=np.ones((1, w.shape[0])),
            W=w,
            n_topics=w.shape[0],
            final_error=0.0,
            iterations=0,
            errors=np.array([0.0]),
            doc_ids=("a1",),
            vocab=Vocabulary(tuple(terms)),
        )

    def test_ordering_and_ties(self):
        terms = ("apple", "mango", "pear", "zebra")
        w = np.array([[0.2, 0.9, 0.9, 0.1]])
        factors = self.make_factors(w, terms)
        assert top_keywords(factors, k=3) == [["mango", "pear", "apple"]]

    def test_k_truncates(self):
        terms = ("aa", "bb", "cc")
        w = np.array([[3.0, 2.0, 1.0], [1.0, 2.0, 3.0]])
        factors = self.make_factors(w, terms)
        assert top_keywords(factors, k=2) == [["aa", "bb"], ["cc", "bb"]]

    def test_requires_vocabulary(self):
        factors = nmf_factorize(np.ones((3, 3)), n_topics=1, seed=0)
        with pytest.raises(ValueError, match="vocabulary"):
            top_keywords(factors)


def coverage_fixture(window_days=1, mode="per_day_share", drop=()):
    """Two topics, two docs on consecutive days, hand-sized lengths."""
    arts = [
        make_article(id="a1", day=date(2021, 3, 1), title="", body="apple pear kiwi"),
        make_article(id="a2", day=date(2021, 3, 2), title="", body="apple pear"),
    ]
    h = np.array([[1.0, 0.5], [0.2, 0.8]])
    factors = NmfFactors(
        H=h,
        W=np.ones((2, 4)),
        n_topics=2,
        final_error=0.0,
        iterations=0,
        errors=np.array([0.0]),
        doc_ids=("a1", "a2"),
    )
    return arts, factors, topic_weight_series(
        factors, arts, window_days=window_days, mode=mode, drop=drop
    )


class TestTopicWeightSeries:
    def test_three_doc_share_case(self):
        # lengths 10, 20, 30 and loadings (1,0), (.5,.5), (0,1) on one day:
        # raw weights (10*1 + 20*.5, 20*.5 + 30*1) = (20, 40), shares (1/3, 2/3)
        bodies = {
            "a1": " ".join(["word"] * 10),
            "a2": " ".join(["word"] * 20),
            "a3": " ".join(["word"] * 30),
        }
        arts = [
            make_article(id=k, day=date(2021, 3, 1), title="", body=v)
            for k, v in bodies.items()
        ]
        factors = NmfFactors(
            H=np.array([[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]]),
            W=np.ones((2, 30)),
            n_topics=2,
            final_error=0.0,
            iterations=0,
            errors=np.array([0.0]),
            doc_ids=("a1", "a2", "a3"),
        )
        cov = topic_weight_series(factors, arts, window_days=1, mode="per_day_share")
        assert [s.values[0] for s in cov.raw] == [20.0, 40.0]
        assert cov.topics[0].values[0] == 1.0 / 3.0
        assert cov.topics[1].values[0] == 2.0 / 3.0

    def test_raw_weights_by_hand(self):
        _, _, cov = coverage_fixture(mode="none")
        # doc a1 has 3 tokens, a2 has 2
        assert np.allclose(cov.raw[0].values, [3.0 * 1.0, 2.0 * 0.2])
        assert np.allclose(cov.raw[1].values, [3.0 * 0.5, 2.0 * 0.8])
        assert cov.raw[0].start == date(2021, 3, 1)

    def test_per_day_share_columns_sum_to_one(self):
        _, _, cov = coverage_fixture(mode="per_day_share")
        stack = np.stack([s.values for s in cov.topics])
        assert np.allclose(stack.sum(axis=0), 1.0)
        assert np.allclose(stack[:, 0], [3.0 / 4.5, 1.5 / 4.5])
        assert np.allclose(stack[:, 1], [0.4 / 2.0, 1.6 / 2.0])

    def test_per_topic_area_rows_sum_to_one(self):
        _, _, cov = coverage_fixture(mode="per_topic_area")
        stack = np.stack([s.values for s in cov.topics])
        assert np.allclose(stack.sum(axis=1), 1.0)

    def test_mode_none_equals_smoothed_raw(self):
        from newslens.series import sliding_mean

        _, _, cov = coverage_fixture(window_days=2, mode="none")
        for raw, topic in zip(cov.raw, cov.topics):
            assert np.allclose(topic.values, sliding_mean(raw, 2).values)

    def test_drop_happens_before_normalization(self):
        _, _, cov = coverage_fixture(mode="per_day_share", drop=(1,))
        assert cov.topic_ids == (0,)
        # the surviving topic owns the full share on every covered day
        assert np.allclose(cov.topics[0].values, 1.0)

    def test_gap_days_stay_zero(self):
        arts = [
            make_article(id="a1", day=date(2021, 3, 1), title="", body="apple pear"),
            make_article(id="a2", day=date(2021, 3, 4), title="", body="apple pear"),
        ]
        factors = NmfFactors(
            H=np.array([[1.0], [1.0]]),
            W=np.ones((1, 3)),
            n_topics=1,
            final_error=0.0,
            iterations=0,
            errors=np.array([0.0]),
            doc_ids=("a1", "a2"),
        )
        cov = topic_weight_series(factors, arts, window_days=1, mode="per_day_share")
        vals = cov.topics[0].values
        assert len(vals) == 4
        assert vals[1] == 0.0 and vals[2] == 0.0
        assert np.all(np.isfinite(vals))

    def test_validation_errors(self):
        arts, factors, _ = coverage_fixture()
        with pytest.raises(ValueError, match="mode"):
            topic_weight_series(factors, arts, mode="sideways")
        with pytest.raises(ValueError, match="window_days"):
            topic_weight_series(factors, arts, window_days=0)
        with pytest.raises(ValueError, match="drop"):
            topic_weight_series(factors, arts, drop=(5,))
        with pytest.raises(ValueError, match="all topics"):
            topic_weight_series(factors, arts, drop=(0, 1))
        with pytest.raises(ValueError, match="missing"):
            topic_weight_series(factors, arts[:1])


class TestAgendaProfile:
    def test_shares_from_raw_sums(self):
        _, _, cov = coverage_fixture(mode="per_day_share")
        profile = agenda_profile(cov)
        raw_totals = np.array([3.4, 3.1])  # 3.0 + 0.4, 1.5 + 1.6
        assert np.allclose(profile, raw_totals / raw_totals.sum())
        assert profile.sum() == pytest.approx(1.0)

    def test_respects_drop(self):
        _, _, cov = coverage_fixture(drop=(1,))
        profile = agenda_profile(cov)
        assert profile.shape == (1,)
        assert profile[0] == pytest.approx(1.0)

    def test_unsmoothed_even_when_topics_smoothed(self):
        _, _, smooth = coverage_fixture(window_days=2)
        _, _, sharp = coverage_fixture(window_days=1)
        assert np.allclose(agenda_profile(smooth), agenda_profile(sharp))
