import functools
import random

import pytest

from conftest import all_matroids, split_matroids
from oracles import relabel
from r3matroids.cli import main
from r3matroids.core import braid_a3, example_dfnif, example_m2, fano
from r3matroids.permgroup import canonical_form
from r3matroids.represent import parse_battery
from r3matroids.store import (STORE_ENV, DuplicateKey, IncompleteClassification, MatroidRecord,
                              ParseError, UnknownField, basic_record, classify,
                              default_store_path, lookup, query, read_records, seed_cache,
                              terao_pipeline, tutte_unique_within, write_records)


@functools.lru_cache(maxsize=None)
def classified(n_max=8):
    cache = seed_cache([])
    return tuple(classify(M, cache=cache) for n in range(3, n_max + 1)
                 for M in split_matroids(n))


class TestRecords:
    def test_roundtrip_bytes(self, tmp_path):
        p, q = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        assert write_records(p, (basic_record(M) for M in all_matroids(9))) == 383
        recs = list(read_records(p))
        write_records(q, recs)
        assert p.read_bytes() == q.read_bytes()

    def test_roundtrip_classified(self, tmp_path):
        p, q = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_records(p, classified(7))
        recs = list(read_records(p))
        assert recs == list(classified(7))
        write_records(q, recs)
        assert p.read_bytes() == q.read_bytes()

    def test_field_order(self):
        line = classify(braid_a3()).to_json()
        keys = ["schema_version", "n", "blocks", "mv", "b2", "chi_roots", "tutte", "flags",
                "representability", "aut_order"]
        pos = [line.index(f'"{k}"') for k in keys]
        assert pos == sorted(pos)
        assert line.startswith('{"schema_version":1,"n":6,"blocks":[[1,2,3],')

    def test_parse_error_names_line(self, tmp_path):
        p = tmp_path / "bad.jsonl"
        good = basic_record(fano()).to_json()
        p.write_text(good + "\n" + "{not json\n")
        with pytest.raises(ParseError) as e:
            list(read_records(p))
        assert e.value.lineno == 2 and "line 2" in str(e.value)

    @pytest.mark.parametrize("line", ['{"schema_version":2,"n":3}', "[1,2]",
                                      '{"schema_version":1,"n":3}'])
    def test_parse_error_shapes(self, tmp_path, line):
        p = tmp_path / "bad.jsonl"
        p.write_text(line + "\n")
        with pytest.raises(ParseError):
            list(read_records(p))

    def test_duplicate_key(self, tmp_path):
        p = tmp_path / "d.jsonl"
        r = basic_record(fano())
        with pytest.raises(DuplicateKey):
            write_records(p, [r, r])
        write_records(p, [r])
        with pytest.raises(DuplicateKey):
            write_records(p, [basic_record(fano())], append=True)
        assert write_records(p, [basic_record(braid_a3())], append=True) == 1
        assert len(list(read_records(p))) == 2

    def test_lookup_relabeled_fano(self):
        recs = [basic_record(M) for M in all_matroids(7)]
        rnd = random.Random(1)
        for _ in range(10):
            p = list(range(1, 8))
            rnd.shuffle(p)
            M = fano().__class__(7, relabel(p, fano().blocks))
            hit = lookup(recs, M)
            assert hit is not None and hit.blocks == canonical_form(7, fano().blocks)
            assert hit.aut_order is None and hit.mv == [0, 7]

    def test_canonical_key_unique(self):
        keys = [r.key for r in classified()]
        assert len(keys) == len(set(keys))
        assert all(canonical_form(r.n, r.blocks) == r.blocks for r in classified())

    def test_default_path(self, monkeypatch):
        monkeypatch.setenv(STORE_ENV, "/x/y.jsonl")
        assert default_store_path() == "/x/y.jsonl"
        monkeypatch.delenv(STORE_ENV)
        assert default_store_path() == "matroids.jsonl"


class TestClassify:
    def test_braid(self):
        r = classify(braid_a3())
        assert all(r.flags[k] for k in ("supersolvable", "inductively_free", "divisionally_free"))
        assert r.chi_roots == (2, 3) and r.aut_order == 24 and r.representable

    def test_m2(self):
        r = classify(example_m2(), battery=parse_battery("5"))
        assert not any(r.flags[k] for k in
                       ("supersolvable", "inductively_free", "divisionally_free"))
        assert r.representability == {"battery": [5], "outcomes": ["found"]}

    def test_dfnif(self):
        r = classify(example_dfnif(), battery=None)
        assert r.flags["divisionally_free"] and not r.flags["inductively_free"]
        assert r.representability is None and r.chi_roots == (6, 7)

    def test_flag_chain(self):
        for r in classified():
            f = r.flags
            assert not f["supersolvable"] or f["inductively_free"]
            assert not f["inductively_free"] or f["divisionally_free"]
            assert not f["divisionally_free"] or r.chi_roots is not None

    def test_cache_agrees_with_fresh(self):
        for r in classified(7):
            assert classify(r.matroid(), battery=None).flags == r.flags


class TestQueries:
    def test_supersolvable_n7(self):
        assert query(classified(), "n == 7 and supersolvable", count=True) == 5

    def test_composition(self):
        recs = classified()
        a = query(recs, "n == 8 and not supersolvable", count=True)
        b = query(recs, "n == 8", count=True) - query(recs, "n == 8 and supersolvable", count=True)
        assert a == b
        assert query(recs, "n == 6 and (a == 2 or b == 2)", count=True) == \
            query(recs, "n == 6 and 2 in chi_roots", count=True)
        assert query(recs, "mv[0] == 3 and n == 6", count=True) == 1
        hits = query(recs, "n == 6 and chi_roots == [2, 3]")
        assert hits and all(r.chi_roots == (2, 3) for r in hits)

    def test_unknown_field(self):
        with pytest.raises(UnknownField):
            query(classified(), "colour == 3")

    def test_rejects_calls(self):
        with pytest.raises(ValueError):
            query(classified(), "__import__('os')")

    def test_null_comparisons_false(self):
        recs = [basic_record(M) for M in all_matroids(6)]
        assert query(recs, "aut_order > 1", count=True) == 0
        assert query(recs, "not classified", count=True) == len(recs)


class TestPipeline:
    def test_terao_n3(self):
        assert terao_pipeline(classified(), 3).counts == (1, 1, 0, 0)

    def test_terao_small(self):
        # table rows: every int-split matroid up to 8 atoms is representable, and
        # inductively free except one at n=7
        got = [terao_pipeline(classified(), n).counts for n in range(3, 9)]
        assert got == [(1, 1, 0, 0), (1, 1, 0, 0), (2, 2, 0, 0), (3, 3, 0, 0), (7, 7, 1, 0),
                       (7, 7, 0, 0)]

    def test_incomplete(self):
        recs = [basic_record(M) for M in split_matroids(5)]
        with pytest.raises(IncompleteClassification):
            terao_pipeline(recs, 5)

    @pytest.mark.parametrize("n, k", [(3, 1), (7, 7), (8, 5)])
    def test_tutte_unique(self, n, k):
        assert tutte_unique_within(classified(), n) == k


class TestCli:
    def run(self, capsys, *argv):
        code = main([str(a) for a in argv])
        out = capsys.readouterr()
        return code, out.out, out.err

    def test_pipeline(self, tmp_path, capsys):
        p = tmp_path / "s.jsonl"
        code, out, _ = self.run(capsys, "gen", "--n", 7, "--out", p)
        assert code == 0 and out.startswith("23 matroids")
        assert self.run(capsys, "classify", "--in", p)[0] == 0
        code, out, _ = self.run(capsys, "query", "--in", p, "--where", "supersolvable", "--count")
        assert out.strip() == "5"
        code, out, _ = self.run(capsys, "query", "--in", p, "--where", "int_split and n == 7")
        assert len(out.splitlines()) == 7
        code, out, _ = self.run(capsys, "terao", "--in", p, "--n", 7)
        assert code == 0 and "integrally splitting      7" in out
        code, out, _ = self.run(capsys, "stats", "--in", p)
        assert out.splitlines()[1].split() == ["7", "23", "7", "5", "6", "6", "7", "7"]

    def test_regeneration_deterministic(self, tmp_path, capsys):
        a, b, c = (tmp_path / f"{x}.jsonl" for x in "abc")
        self.run(capsys, "gen", "--n", 8, "--int-split", "--out", a)
        self.run(capsys, "gen", "--n", 8, "--int-split", "--out", b)
        self.run(capsys, "gen", "--n", 8, "--int-split", "--workers", 4, "--fifo-capacity", 2,
                 "--out", c)
        assert a.read_bytes() == b.read_bytes()
        assert sorted(a.read_text().splitlines()) == sorted(c.read_text().splitlines())

    def test_single_census(self, tmp_path, capsys):
        p = tmp_path / "m.jsonl"
        code, out, _ = self.run(capsys, "gen", "--n", 6, "--mv", "3,4", "--out", p)
        assert code == 0 and [r.blocks for r in read_records(p)] == \
            [canonical_form(6, braid_a3().blocks)]

    def test_env_default(self, tmp_path, capsys, monkeypatch):
        p = tmp_path / "env.jsonl"
        monkeypatch.setenv(STORE_ENV, str(p))
        assert self.run(capsys, "gen", "--n", 5)[0] == 0
        assert len(list(read_records(p))) == 4

    def test_errors(self, tmp_path, capsys):
        p = tmp_path / "e.jsonl"
        code, _, err = self.run(capsys, "gen", "--n", 6, "--mv", "1,1", "--out", p)
        assert code == 2 and "does not cover" in err
        self.run(capsys, "gen", "--n", 5, "--out", p)
        code, _, err = self.run(capsys, "query", "--in", p, "--where", "bogus")
        assert code == 2 and "bogus" in err
        code, _, err = self.run(capsys, "terao", "--in", p, "--n", 5)
        assert code == 1 and "not fully classified" in err
        code, _, err = self.run(capsys, "stats", "--in", tmp_path / "missing.jsonl")
        assert code == 2 and err.startswith("error:")
        code, _, err = self.run(capsys, "classify", "--in", p, "--battery", "6")
        assert code == 2

    def test_battery_flag(self, tmp_path, capsys):
        p = tmp_path / "b.jsonl"
        self.run(capsys, "gen", "--n", 5, "--out", p)
        assert self.run(capsys, "classify", "--in", p, "--battery", "2,3")[0] == 0
        assert all(r.representability["battery"] == [2, 3] for r in read_records(p))

    def test_classify_idempotent(self, tmp_path, capsys):
        p = tmp_path / "c.jsonl"
        self.run(capsys, "gen", "--n", 6, "--out", p)
        self.run(capsys, "classify", "--in", p, "--no-represent")
        _, out, _ = self.run(capsys, "classify", "--in", p, "--no-represent")
        assert out.startswith("classified 0 of 9")
        assert all(isinstance(r, MatroidRecord) and r.classified for r in read_records(p))
