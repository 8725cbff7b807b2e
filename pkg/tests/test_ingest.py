import json
import shutil
from pathlib import Path

import pytest
import requests

from bioevent.errors import ExclusionError, MissingFieldError, NetworkError, NotFoundError, SchemaChangeError
from bioevent.ingest import (
    GroupingConfig, HttpTransport, IdList, PersonRecord, RecordingTransport, ReplayTransport, Response, Transport,
    build_manifest, classify_group, fetch_biography, fetch_writers, harvest_writers, parse_bindings,
    partition_records, strip_wikitext,
)
from bioevent.ingest.wikipedia import MARKUP
from bioevent.pipeline import read_manifest

CASSETTES = Path(__file__).parent / "fixtures" / "cassettes"
PAGE = 3


@pytest.fixture
def replay():
    return ReplayTransport(CASSETTES)


@pytest.fixture
def config():
    return GroupingConfig.load()


def rec(pid="Q1", gender="Q6581097", country="Q30", year=1900, ethnic=()):
    return PersonRecord(pid, pid, gender, year, country, tuple(ethnic), ("Q36180",), pid)


def test_year_filter_and_pagination(replay, config):
    recs = list(fetch_writers(replay, config, page_size=PAGE))
    ids = [r.person_id for r in recs]
    assert "Q102" not in ids  # born 1790
    assert ids == ["Q101", "Q103", "Q104", "Q105", "Q106", "Q107", "Q108"]
    assert replay.calls == 3  # the third page is short


def test_first_page_keeps_two_of_three(replay, config):
    recs = list(fetch_writers(replay, config, page_size=PAGE, max_pages=1))
    assert [r.person_id for r in recs] == ["Q101", "Q103"]


def test_missing_gender_flagged_and_excluded(replay, config):
    recs = list(fetch_writers(replay, config, page_size=PAGE))
    q104 = next(r for r in recs if r.person_id == "Q104")
    assert "MISSING_FIELD:gender" in q104.flags
    part = partition_records(recs, config)
    assert part.excluded["MISSING_FIELD:gender"] == ["Q104"]
    assert part.excluded["MISSING_FIELD:country_of_birth"] == ["Q108"]
    assert part.excluded["UNMAPPED_GENDER"] == ["Q105"]


def test_partition_reconciles(replay, config):
    part = partition_records(list(fetch_writers(replay, config, page_size=PAGE)), config)
    assert part.reconciles()
    assert part.total == 7 and part.n_grouped == 4 and part.n_excluded == 3
    assert {k: [r.person_id for r in v] for k, v in part.groups.items()} == {
        "WM": ["Q101"], "WW": [], "TM": ["Q107"], "TW": ["Q103", "Q106"]}


def test_duplicates_reconcile(config):
    part = partition_records([rec("Q1"), rec("Q1"), rec("Q2", gender=None)], config)
    assert part.reconciles() and part.total == 3 and len(part.excluded["DUPLICATE"]) == 1


def test_schema_change_detected():
    payload = {"head": {"vars": ["item", "itemLabel"]}, "results": {"bindings": []}}
    with pytest.raises(SchemaChangeError):
        parse_bindings(payload)
    with pytest.raises(SchemaChangeError):
        parse_bindings({"unexpected": 1})


class Html(Transport):
    def get(self, url, params=None, headers=None):
        return Response(200, "<html>maintenance</html>")


def test_non_json_response_is_schema_change(config):
    with pytest.raises(SchemaChangeError):
        list(fetch_writers(Html(), config, page_size=PAGE))


def test_harvest_resumes_from_cursor(tmp_path, replay, config):
    out = tmp_path / "writers.jsonl"
    first = harvest_writers(replay, config, out, page_size=PAGE, max_pages=1)
    assert [r.person_id for r in first] == ["Q101", "Q103"]
    cursor = json.loads((tmp_path / "writers.jsonl.cursor").read_text())
    assert cursor["offset"] == PAGE and not cursor["done"]
    fresh = ReplayTransport(CASSETTES)
    full = harvest_writers(fresh, config, out, page_size=PAGE)
    assert fresh.calls == 2  # pages 2 and 3 only
    assert len(full) == 7 and len({r.person_id for r in full}) == 7
    again = ReplayTransport(CASSETTES)
    assert len(harvest_writers(again, config, out, page_size=PAGE)) == 7
    assert again.calls == 0


def test_record_round_trip():
    r = rec("Q9", ethnic=("Q49085",))
    assert PersonRecord.from_dict(json.loads(json.dumps(r.to_dict()))) == r


def test_classify_group_branches(config):
    assert classify_group(rec(country="Q30"), config).code == "WM"
    assert classify_group(rec(country="Q30", gender="Q6581072"), config).code == "WW"
    assert classify_group(rec(country="Q1033"), config).code == "TM"
    # Western birth country but a listed minority: transnational
    assert classify_group(rec(country="Q30", gender="Q6581072", ethnic=["Q49085"]), config).code == "TW"
    with pytest.raises(MissingFieldError):
        classify_group(rec(gender=None), config)
    with pytest.raises(ExclusionError) as exc:
        classify_group(rec(year=1790), config)
    assert exc.value.reason == "OUT_OF_SCOPE_BIRTH_YEAR"


def test_custom_lists_replace_defaults(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text("# version: 7\nQ1033\tNigeria\n")
    cfg = GroupingConfig.load(western=path)
    assert classify_group(rec(country="Q1033"), cfg).code == "WM"
    assert classify_group(rec(country="Q30"), cfg).code == "TM"
    assert cfg.versions()["western_countries"]["version"] == "7"
    with pytest.raises(ValueError):
        IdList.parse("# version: 1\n")


def test_biography_cache_makes_no_requests(tmp_path, replay):
    revid, text = fetch_biography("Q101", "Alan Western", replay, tmp_path)
    assert replay.calls == 1 and text.startswith("Alan Western")
    again = ReplayTransport(CASSETTES)
    assert fetch_biography("Q101", "Alan Western", again, tmp_path) == (revid, text)
    assert again.calls == 0
    assert (tmp_path / "Q101" / f"{revid}.txt").exists()


def test_missing_article_not_found(tmp_path, replay):
    with pytest.raises(NotFoundError, match="NOT_FOUND"):
        fetch_biography("Q103", "Ada Obi", replay, tmp_path)
    with pytest.raises(NotFoundError):
        fetch_biography("Q999", "", replay, tmp_path)


def test_unrecorded_request_fails(tmp_path, replay):
    with pytest.raises(NetworkError):
        fetch_biography("Q555", "Never Recorded", replay, tmp_path)


@pytest.mark.parametrize("pid,title", [("Q101", "Alan Western"), ("Q106", "Mae Brooks"), ("Q107", "Kofi Mensah")])
def test_stripped_text_has_no_markup(tmp_path, replay, pid, title):
    _, text = fetch_biography(pid, title, replay, tmp_path)
    assert text
    for delim in MARKUP:
        assert delim not in text, delim


def test_strip_wikitext_sections_and_links():
    text = strip_wikitext("'''X''' was a [[poet|writer]].\n== Works ==\nShe wrote it.\n== References ==\nR.\n")
    assert text == "X was a writer.\n\nShe wrote it."
    stripped = strip_wikitext(Path(CASSETTES.parent / "wikitext_sample.txt").read_text())
    assert "Nigerian writer" in stripped and "born in Bori" in stripped
    assert "Category" not in stripped and "References" not in stripped


def test_build_manifest(tmp_path, replay, config):
    part = partition_records(list(fetch_writers(replay, config, page_size=PAGE)), config)
    report = build_manifest(part, replay, tmp_path / "cache", tmp_path / "out", config)
    assert report["reconciles"]
    assert report["articles"]["fetched"] == 3
    assert [m["person_id"] for m in report["articles"]["missing"]] == ["Q103"]
    manifest = read_manifest(tmp_path / "out" / "manifest.jsonl")
    assert [(m.id, m.group.code) for m in manifest] == [("Q107", "TM"), ("Q106", "TW"), ("Q101", "WM")]


def test_recording_then_replay(tmp_path):
    class Echo(Transport):
        def get(self, url, params=None, headers=None):
            return Response(200, json.dumps(params))

    rec_t = RecordingTransport(Echo(), tmp_path)
    assert rec_t.get("http://x", {"a": "1"}).json() == {"a": "1"}
    assert ReplayTransport(tmp_path).get("http://x", {"a": "1"}).json() == {"a": "1"}


class FakeSession:
    def __init__(self, script):
        self.script = list(script)
        self.headers = {}

    def get(self, url, params=None, headers=None, timeout=None):
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        r = requests.Response()
        r.status_code, r._content = item
        return r


def test_http_retries_then_succeeds():
    s = FakeSession([requests.ConnectionError("down"), (503, b""), (200, b'{"ok": 1}')])
    t = HttpTransport(retries=3, backoff=0, session=s)
    assert t.get("http://x").json() == {"ok": 1}
    assert t.calls == 3


def test_http_gives_up():
    t = HttpTransport(retries=1, backoff=0, session=FakeSession([(429, b""), (500, b"")]))
    with pytest.raises(NetworkError):
        t.get("http://x")
