#!/usr/bin/env python3
"""Smoke test for the buildsatd_py extension module.

Builds nothing itself: it locates the cdylib produced by
`cargo build -p buildsatd-py` (debug or release), stages it under an
importable name, and exercises the bound API end to end.

Usage: python3 python/smoke_test.py
"""

import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def stage_module(tmp: Path) -> None:
    candidates = [
        REPO_ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libbuildsatd_py.so", "libbuildsatd_py.dylib", "buildsatd_py.dll")
    ]
    built = next((c for c in candidates if c.exists()), None)
    if built is None:
        sys.exit(
            "extension module not found; run `cargo build -p buildsatd-py` first"
        )
    suffix = ".pyd" if built.suffix == ".dll" else ".so"
    shutil.copy(built, tmp / f"buildsatd_py{suffix}")
    sys.path.insert(0, str(tmp))


def main() -> None:
    checks = 0

    def check(condition: bool, label: str) -> None:
        nonlocal checks
        if not condition:
            sys.exit(f"FAIL: {label}")
        checks += 1
        print(f"ok: {label}")

    with tempfile.TemporaryDirectory() as tmpdir:
        tmp = Path(tmpdir)
        stage_module(tmp)
        import buildsatd_py as bsd

        check(bsd.preprocess("Fixed issues") == ["fix", "issue"], "preprocess lemmatizes")
        check(
            bsd.preprocess("see https://issues.apache.org/jira/browse/MJARSIGNER-53 now")
            == ["see", "abstracturl", "now"],
            "preprocess abstracts hyperlinks",
        )

        w = bsd.ngram_idf_weight(1, 1, 8)
        check(abs(w - math.log(8)) < 1e-12, "ngram weight reduces to classic idf")

        n = bsd.representative_sample_size(248502, 0.95, 0.05)
        check(n == 384, "sample size matches the closed form")

        kappa = bsd.cohen_kappa(["a", "a", "b"], ["a", "a", "b"])
        check(kappa == 1.0, "kappa of identical raters is 1")

        ks = bsd.KeywordSet()
        is_satd, matched = ks.detect("XXX: workaround for an issue with maven-shade-plugin")
        check(is_satd and "workaround" in matched and "xxx" in matched, "keyword detection")
        check(not ks.detect("Licensed to the Apache Software Foundation")[0], "clean comment")

        links = bsd.extract_links("workaround https://github.com/eclipse/xtext/issues/1231")
        check(links == [("github_issue", "https://github.com/eclipse/xtext/issues/1231")],
              "link extraction")

        loc = bsd.classify_location(["project", "build", "plugins", "plugin"])
        check(loc == "Plugin configuration", "location classification")

        pom = (
            "<project>\n"
            "<!-- TODO drop this pin -->\n"
            "<dependencies>\n"
            "<!-- workaround for upstream -->\n"
            "<dependency/>\n"
            "</dependencies>\n"
            "</project>\n"
        )
        comments = bsd.extract_comments(pom)
        check(len(comments) == 2 and comments[1][2] == ["project", "dependencies"],
              "comment extraction with structure")
        loc_counts = bsd.measure_location_loc(pom)
        check(loc_counts.get("External dependencies configuration") == 4, "loc accounting")

        # A tiny on-disk corpus.
        corpus = tmp / "corpus" / "demo"
        corpus.mkdir(parents=True)
        (corpus / "pom.xml").write_text(pom)
        scan = bsd.scan_corpus(str(tmp / "corpus"))
        check(
            scan.n_comments == 2 and scan.n_satd == 2 and len(scan.records) == 2,
            "corpus scan counts",
        )
        record = scan.records[0]
        check(record.location == "Unclassified" or record.location, "record accessors")
        check(json.loads(record.to_json())["is_satd"] is True, "record json round trip")

        # Readiness triage against recorded payloads.
        fixtures = tmp / "forge"
        fixtures.mkdir()
        (fixtures / "repos_demo_lib_issues_7.json").write_text('{"state": "closed"}')
        (fixtures / "repos_demo_lib.json").write_text(
            '{"archived": false, "mirror_url": null}'
        )
        records_file = tmp / "records.jsonl"
        records_file.write_text(
            json.dumps({"id": "r1", "text": "workaround until demo/lib#7"}) + "\n"
            + json.dumps({"id": "r2", "text": "no links in this one"}) + "\n"
        )
        verdicts = bsd.assess_readiness_fixtures(str(records_file), str(fixtures))
        check(verdicts[0] == ("r1", "Ready", None), "readiness verdict (ready)")
        check(verdicts[1] == ("r2", "NoActionableLink", None), "readiness verdict (no link)")

    print(f"\nsmoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
