import math

import pytest

from evseq import (
    NgramScorer,
    OracleScorer,
    RandomScorer,
    TokenizedInput,
    UniformScorer,
    decoding_vocab,
    load_scorer,
    oracle_scorer,
    parse_schema,
    save_scorer,
    train_ngram,
    uniform_scorer,
)

EMPTY = TokenizedInput.from_text("")


def assert_is_distribution(dist, tol=1e-9):
    assert dist, "distribution is empty"
    assert all(p >= 0.0 for p in dist.values())
    assert sum(dist.values()) == pytest.approx(1.0, abs=tol)


def test_decoding_vocab(fig_schema, fig_input):
    vocab = decoding_vocab(fig_schema, fig_input)
    for token in ("(", ")", "<bos>", "<eos>", "Transport", "Arrest", "Jail",
                  "Artifact", "bounty", "."):
        assert token in vocab
    assert "Arrest-Jail" not in vocab  # labels enter split into word tokens
    without_input = decoding_vocab(fig_schema)
    assert "bounty" not in without_input


def test_uniform_scorer():
    scorer = uniform_scorer(["b", "a", "a"])
    dist = scorer.next_distribution(EMPTY, ("<bos>",))
    assert dist == {"a": 0.5, "b": 0.5}
    assert_is_distribution(dist)
    with pytest.raises(ValueError):
        UniformScorer([])


def test_oracle_scorer_on_and_off_target():
    scorer = OracleScorer(("(", ")"), epsilon=0.2, vocab=["x", "y"])
    on = scorer.next_distribution(EMPTY, ("<bos>", "("))
    assert on[")"] == pytest.approx(0.8)
    others = {t: p for t, p in on.items() if t != ")"}
    assert set(others) == {"(", "<bos>", "<eos>", "x", "y"}
    assert all(p == pytest.approx(0.2 / 5) for p in others.values())
    assert_is_distribution(on)
    off = scorer.next_distribution(EMPTY, ("<bos>", "y"))
    assert all(p == pytest.approx(1 / 6) for p in off.values())
    past_end = scorer.next_distribution(EMPTY, ("<bos>", "(", ")", "<eos>", "x"))
    assert_is_distribution(past_end)


def test_oracle_scorer_validates_epsilon():
    with pytest.raises(ValueError):
        OracleScorer(("(",), epsilon=1.0)
    with pytest.raises(ValueError):
        OracleScorer(("(",), epsilon=-0.1)


def test_random_scorer_is_deterministic():
    scorer_a = RandomScorer(["x", "y", "z"], seed=7)
    scorer_b = RandomScorer(["x", "y", "z"], seed=7)
    prefix = ("<bos>", "(")
    assert scorer_a.next_distribution(EMPTY, prefix) == scorer_b.next_distribution(
        EMPTY, prefix
    )
    assert_is_distribution(scorer_a.next_distribution(EMPTY, prefix))
    # Different prefixes and different seeds give different weights.
    assert scorer_a.next_distribution(EMPTY, prefix) != scorer_a.next_distribution(
        EMPTY, ("<bos>", ")")
    )
    assert scorer_a.next_distribution(EMPTY, prefix) != RandomScorer(
        ["x", "y", "z"], seed=8
    ).next_distribution(EMPTY, prefix)
    with pytest.raises(ValueError):
        RandomScorer([], seed=0)


# ------------------------------------------------------------------- n-gram


def one_item_corpus():
    return [(EMPTY, ("(", ")"))]


@pytest.mark.parametrize("alpha", [0.1, 0.5, 2.0])
def test_ngram_smoothed_bigram_closed_form(alpha):
    # Training stream <bos> ( ) <eos> has vocabulary size 4; after "(" the
    # only observed continuation is ")", so its smoothed probability is
    # (1 + a) / (1 + 4a) and each unseen token gets a / (1 + 4a).
    scorer = train_ngram(one_item_corpus(), n=2, alpha=alpha)
    dist = scorer.next_distribution(EMPTY, ("<bos>", "("))
    assert dist[")"] == pytest.approx((1 + alpha) / (1 + 4 * alpha), rel=1e-12)
    assert dist["("] == pytest.approx(alpha / (1 + 4 * alpha), rel=1e-12)
    assert_is_distribution(dist)


def test_ngram_count_tables():
    scorer = train_ngram(one_item_corpus(), n=2)
    assert scorer.counts[1] == {
        (): {"<bos>": 1, "(": 1, ")": 1, "<eos>": 1}
    }
    assert scorer.counts[2] == {
        ("<bos>",): {"(": 1},
        ("(",): {")": 1},
        (")",): {"<eos>": 1},
    }
    assert scorer.vocab == frozenset({"<bos>", "(", ")", "<eos>"})


def test_ngram_counts_accumulate_across_sequences():
    corpus = [(EMPTY, ("(", ")")), (EMPTY, ("(", "(", "T", "x", ")", ")"))]
    scorer = train_ngram(corpus, n=2)
    assert scorer.counts[1][()]["("] == 3
    assert scorer.counts[1][()][")"] == 3
    assert scorer.counts[1][()]["<bos>"] == 2
    assert scorer.counts[2][("(",)] == {")": 1, "(": 1, "T": 1}
    assert scorer.counts[2][(")",)] == {"<eos>": 2, ")": 1}


def test_ngram_backoff_equals_lower_order():
    corpus = [
        (EMPTY, ("(", "(", "T", "x", ")", ")")),
        (EMPTY, ("(", ")")),
    ]
    tri = train_ngram(corpus, n=3)
    bi = train_ngram(corpus, n=2)
    # ("zzz", "(") was never seen as a trigram context; the trigram model
    # must fall back to exactly the bigram distribution after "(".
    prefix = ("zzz", "(")
    assert tri.next_distribution(EMPTY, prefix) == bi.next_distribution(EMPTY, prefix)
    # And with no usable context at all, down to the unigram.
    uni = train_ngram(corpus, n=1)
    assert tri.next_distribution(EMPTY, ("zzz",)) == uni.next_distribution(
        EMPTY, ("zzz",)
    )


def test_ngram_uses_longest_seen_context():
    corpus = [
        (EMPTY, ("a", "b", "c")),
        (EMPTY, ("x", "b", "d")),
    ]
    scorer = train_ngram(corpus, n=3, alpha=0.1)
    after_ab = scorer.next_distribution(EMPTY, ("<bos>", "a", "b"))
    after_xb = scorer.next_distribution(EMPTY, ("<bos>", "x", "b"))
    # The bigram table after "b" mixes c and d, the trigram tables do not.
    assert after_ab["c"] > after_ab["d"]
    assert after_xb["d"] > after_xb["c"]


def test_ngram_copy_boost_scales_input_tokens():
    corpus = [(EMPTY, ("a", "b")), (EMPTY, ("a", "c"))]
    scorer = train_ngram(corpus, n=2, alpha=0.5, copy_boost=3.0)
    inp = TokenizedInput.from_tokens(["b"])
    dist = scorer.next_distribution(inp, ("<bos>", "a"))
    # b and c have equal counts after "a"; the boost triples b's score
    # before normalization, so the ratio is exactly the boost.
    assert dist["b"] / dist["c"] == pytest.approx(3.0, rel=1e-12)
    unboosted = train_ngram(corpus, n=2, alpha=0.5, copy_boost=1.0)
    flat = unboosted.next_distribution(inp, ("<bos>", "a"))
    assert flat["b"] == pytest.approx(flat["c"], rel=1e-12)


def test_ngram_extends_vocabulary_with_input_tokens():
    scorer = train_ngram(one_item_corpus(), n=2)
    inp = TokenizedInput.from_tokens(["novel", "words"])
    dist = scorer.next_distribution(inp, ("<bos>",))
    assert dist["novel"] > 0.0
    assert_is_distribution(dist)
    without = scorer.next_distribution(EMPTY, ("<bos>",))
    assert "novel" not in without


def test_ngram_extra_vocab_gets_smoothing_mass():
    scorer = train_ngram(one_item_corpus(), n=2, extra_vocab=["Transport"])
    dist = scorer.next_distribution(EMPTY, ("<bos>",))
    assert dist["Transport"] > 0.0
    plain = train_ngram(one_item_corpus(), n=2)
    assert "Transport" not in plain.next_distribution(EMPTY, ("<bos>",))


def test_ngram_large_alpha_approaches_uniform():
    corpus = [(EMPTY, ("(", "(", "T", "x", ")", ")"))]
    scorer = train_ngram(corpus, n=2, alpha=1e9)
    dist = scorer.next_distribution(EMPTY, ("<bos>", "("))
    values = list(dist.values())
    assert max(values) - min(values) < 1e-9
    assert_is_distribution(dist)


def test_ngram_distributions_sum_to_one(fig_input, fig_seq):
    scorer = train_ngram([(fig_input, fig_seq)], n=3)
    stream = ("<bos>", *fig_seq)
    for i in range(1, len(stream) + 1):
        assert_is_distribution(scorer.next_distribution(fig_input, stream[:i]))


def test_ngram_parameter_validation():
    counts = {1: {(): {"x": 1}}}
    with pytest.raises(ValueError):
        NgramScorer(0, counts)
    with pytest.raises(ValueError):
        NgramScorer(1, counts, alpha=0.0)
    with pytest.raises(ValueError):
        NgramScorer(1, counts, copy_boost=0.5)
    with pytest.raises(ValueError):
        train_ngram([])


def test_ngram_defaults():
    scorer = train_ngram(one_item_corpus())
    assert (scorer.order, scorer.alpha, scorer.copy_boost) == (3, 0.1, 4.0)


# -------------------------------------------------------------- persistence


def probe_prefixes(seq):
    stream = ("<bos>", *seq)
    return [stream[:i] for i in range(1, len(stream) + 1)]


def test_scorer_save_load_roundtrip(tmp_path, fig_input, fig_seq):
    scorer = train_ngram([(fig_input, fig_seq)], n=3, extra_vocab=["Extra"])
    path = tmp_path / "scorer.json"
    save_scorer(scorer, path)
    loaded = load_scorer(path)
    assert loaded.order == scorer.order
    assert loaded.alpha == scorer.alpha
    assert loaded.copy_boost == scorer.copy_boost
    assert loaded.vocab == scorer.vocab
    assert loaded.counts == scorer.counts
    for prefix in probe_prefixes(fig_seq):
        assert loaded.next_distribution(fig_input, prefix) == scorer.next_distribution(
            fig_input, prefix
        )


def test_scorer_serialization_is_byte_stable(tmp_path, fig_input, fig_seq):
    corpus = [(fig_input, fig_seq), (EMPTY, ("(", ")"))]
    path_a = tmp_path / "a.json"
    path_b = tmp_path / "b.json"
    save_scorer(train_ngram(corpus, n=3), path_a)
    save_scorer(train_ngram(list(corpus), n=3), path_b)
    assert path_a.read_bytes() == path_b.read_bytes()


def test_load_scorer_rejects_foreign_files(tmp_path):
    not_ours = tmp_path / "other.json"
    not_ours.write_text('{"format": "something-else"}\n')
    with pytest.raises(ValueError):
        load_scorer(not_ours)
    wrong_version = tmp_path / "future.json"
    save_scorer(train_ngram(one_item_corpus()), wrong_version)
    payload = wrong_version.read_text().replace('"version": 1', '"version": 99')
    wrong_version.write_text(payload)
    with pytest.raises(ValueError):
        load_scorer(wrong_version)


def test_oracle_factory_matches_class(fig_seq):
    a = oracle_scorer(fig_seq, epsilon=0.1)
    b = OracleScorer(fig_seq, epsilon=0.1)
    assert a.next_distribution(EMPTY, ("<bos>",)) == b.next_distribution(
        EMPTY, ("<bos>",)
    )
