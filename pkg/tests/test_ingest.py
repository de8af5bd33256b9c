import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adoptvec.ingest import (
    AdoptionEvent,
    ParseError,
    group_into_sequences,
    parse_adoption_log,
    parse_follower_network,
    parse_geo_labels,
    split_topics,
    write_adoption_log,
)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


class TestAdoptionLog:
    def test_single_line(self, tmp_path):
        path = write(tmp_path, "a.tsv", "hashtagA\tu1\t1396000000\n")
        assert list(parse_adoption_log(path)) == [AdoptionEvent("hashtagA", "u1", 1396000000)]

    def test_bad_timestamp_strict(self, tmp_path):
        path = write(tmp_path, "a.tsv", "hashtagA\tu1\tnotanumber\n")
        with pytest.raises(ParseError, match="non-integer timestamp"):
            list(parse_adoption_log(path, strict=True))

    def test_lenient_counts_skips(self, tmp_path):
        path = write(tmp_path, "a.tsv", "h\tu1\t5\nh\tu1\tx\nh\tu2\nh\tu3\t7\n")
        log = parse_adoption_log(path, strict=False)
        events = list(log)
        assert [e.user_id for e in events] == ["u1", "u3"]
        assert log.skipped == 2

    def test_three_lines_one_sequence(self, tmp_path):
        path = write(tmp_path, "a.tsv", "h\tu1\t1\nh\tu2\t2\nh\tu3\t3\n")
        seqs = group_into_sequences(parse_adoption_log(path))
        assert len(seqs["h"]) == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            parse_adoption_log(str(tmp_path / "nope.tsv"))

    def test_whitespace_in_id_rejected(self, tmp_path):
        path = write(tmp_path, "a.tsv", "h\tu 1\t1\n")
        with pytest.raises(ParseError):
            list(parse_adoption_log(path))


class TestGrouping:
    def test_interleaved_topics(self):
        evs = [AdoptionEvent("a", "u1", 5), AdoptionEvent("b", "u2", 3),
               AdoptionEvent("a", "u3", 1), AdoptionEvent("b", "u4", 9)]
        seqs = group_into_sequences(evs)
        assert list(seqs) == ["a", "b"]
        assert seqs["a"].users == ["u3", "u1"]
        assert seqs["b"].users == ["u2", "u4"]

    def test_ties_keep_input_order(self):
        evs = [AdoptionEvent("a", u, 10) for u in ("z", "y", "x")]
        assert group_into_sequences(evs)["a"].users == ["z", "y", "x"]

    def test_empty(self):
        assert group_into_sequences([]) == {}

    def test_first_adopters(self):
        evs = [AdoptionEvent("a", u, t) for t, u in enumerate("abacb")]
        assert group_into_sequences(evs)["a"].first_adopters() == ["a", "b", "c"]


event_lists = st.lists(
    st.tuples(st.sampled_from(["t1", "t2", "t3"]), st.sampled_from(["u1", "u2", "u3", "u4"]),
              st.integers(0, 50)),
    max_size=40)


@settings(max_examples=50, deadline=None)
@given(event_lists)
def test_roundtrip_and_sizes(tmp_path_factory, raw):
    events = [AdoptionEvent(*r) for r in raw]
    seqs = group_into_sequences(events)
    assert sum(len(s) for s in seqs.values()) == len(events)
    for s in seqs.values():
        ts = s.timestamps
        assert all(ts[i] <= ts[i + 1] for i in range(len(ts) - 1))
    path = str(tmp_path_factory.mktemp("rt") / "log.tsv")
    write_adoption_log(seqs.values(), path)
    again = group_into_sequences(parse_adoption_log(path))
    assert again == seqs


class TestSplit:
    def test_counts(self):
        sp = split_topics([f"t{i}" for i in range(10)], 0.8, 7)
        assert len(sp.train_topics) == 8 and len(sp.test_topics) == 2

    def test_deterministic(self):
        topics = [f"t{i}" for i in range(50)]
        assert split_topics(topics, 0.8, 3) == split_topics(topics, 0.8, 3)

    def test_too_few(self):
        with pytest.raises(ValueError):
            split_topics(["only"], 0.8, 0)

    def test_paper_scale_count(self):
        n = 3_617_312
        n_train = int(round(0.8 * n))
        assert n_train == 2_893_850
        assert abs(n_train / n - 0.8) < 0.001

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 200), st.floats(0.05, 0.95), st.integers(0, 2**31))
    def test_partition(self, n, frac, seed):
        topics = {f"t{i}" for i in range(n)}
        sp = split_topics(topics, frac, seed)
        assert not (sp.train_topics & sp.test_topics)
        assert sp.train_topics | sp.test_topics == topics


class TestFollowers:
    def test_edge(self, tmp_path):
        net = parse_follower_network(write(tmp_path, "f.tsv", "u1\tu2\n"))
        assert net.follows("u1", "u2") and not net.follows("u2", "u1")
        assert net.followers_of("u2") == {"u1"}

    def test_duplicate(self, tmp_path):
        net = parse_follower_network(write(tmp_path, "f.tsv", "u1\tu2\nu1\tu2\n"))
        assert net.num_edges == 1

    def test_self_loop(self, tmp_path):
        net = parse_follower_network(write(tmp_path, "f.tsv", "u1\tu1\n"))
        assert net.num_edges == 0 and net.dropped_self_loops == 1


class TestGeo:
    def test_label(self, tmp_path):
        geo = parse_geo_labels(write(tmp_path, "g.tsv", "u1\tAsia/Kolkata\n"))
        assert geo["u1"] == "Asia/Kolkata"

    def test_last_wins(self, tmp_path):
        geo = parse_geo_labels(write(tmp_path, "g.tsv", "u1\tA\nu1\tB\n"))
        assert geo["u1"] == "B" and geo.duplicates == 1

    def test_empty(self, tmp_path):
        assert len(parse_geo_labels(write(tmp_path, "g.tsv", ""))) == 0

    def test_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            parse_geo_labels(str(tmp_path / "x"))
