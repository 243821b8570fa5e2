from __future__ import annotations

import json
from pathlib import Path

import pytest

from maskstego.cli import main

from .conftest import CORPUS_DIR, VOCAB_PATH

KEY_BYTES = b"cli-test-key-0123456789"
COVER_TEXT = (
    "the little city near the river was quiet that morning , and visitors "
    "from the old village walked across the stone bridge toward the busy "
    "market square to hear music at the summer festival ."
)


@pytest.fixture
def workspace(tmp_path: Path) -> dict[str, Path]:
    key_file = tmp_path / "key.bin"
    key_file.write_bytes(KEY_BYTES)
    cover = tmp_path / "cover.txt"
    cover.write_text(COVER_TEXT + "\n", encoding="utf-8")
    payload = tmp_path / "payload.hex"
    payload.write_text("deadbeef\n", encoding="utf-8")
    return {
        "dir": tmp_path,
        "key": key_file,
        "cover": cover,
        "payload": payload,
        "stego": tmp_path / "stego.txt",
        "out": tmp_path / "recovered.hex",
        "report": tmp_path / "report.json",
    }


def base_flags(ws, extra=()):
    return [
        "--key-file", str(ws["key"]),
        "--vocab", str(VOCAB_PATH),
        "--f", "2",
        "--tp", "0.02",
        *extra,
    ]


def run_embed(ws, extra=()):
    return main(
        [
            "embed",
            "--cover", str(ws["cover"]),
            "--payload", str(ws["payload"]),
            "--out", str(ws["stego"]),
            "--report", str(ws["report"]),
            *base_flags(ws, extra),
        ]
    )


def run_extract(ws, extra=()):
    return main(
        [
            "extract",
            "--stego", str(ws["stego"]),
            "--out", str(ws["out"]),
            *base_flags(ws, extra),
        ]
    )


class TestEmbedExtract:
    def test_round_trip(self, workspace):
        assert run_embed(workspace) == 0
        assert run_extract(workspace) == 0
        assert workspace["out"].read_text().strip() == "deadbeef"

    def test_report_shape(self, workspace):
        run_embed(workspace)
        report = json.loads(workspace["report"].read_text())
        assert report["message_bits"] == 32
        assert report["total_bits"] >= 64  # header + message
        assert isinstance(report["bpw"], float)
        for record in report["records"]:
            assert set(record) == {"index", "candidates", "token", "code"}
        assert all("(" in a and a.endswith(")") for a in report["annotations"])

    def test_empty_payload_is_fine(self, workspace):
        workspace["payload"].write_text("")
        assert run_embed(workspace) == 0
        assert run_extract(workspace) == 0
        assert workspace["out"].read_text().strip() == ""

    def test_base64_payload(self, workspace):
        workspace["payload"].write_text("3q2+7w==")  # same deadbeef bytes
        assert run_embed(workspace, ["--payload-enc", "base64"]) == 0
        assert run_extract(workspace, ["--payload-enc", "base64"]) == 0
        assert workspace["out"].read_text().strip() == "3q2+7w=="

    def test_oversized_payload_exits_capacity(self, workspace, capsys):
        workspace["payload"].write_text("ff" * 400)
        assert run_embed(workspace) == 3
        report = json.loads(workspace["report"].read_text())
        assert report["error"] == "capacity"
        assert report["bits_consumed"] > 0

    def test_wrong_key_never_recovers_payload(self, workspace, tmp_path):
        # a mismatched key either trips the desync/truncation diagnostics
        # (exit 4) or emits garbage; it must never yield the true payload
        run_embed(workspace)
        exit_codes = []
        for i in range(10):
            other = tmp_path / f"other{i}.bin"
            other.write_bytes(b"wrong-key-%04d-xx" % i)
            workspace["out"].write_text("")
            code = main(
                [
                    "extract",
                    "--stego", str(workspace["stego"]),
                    "--out", str(workspace["out"]),
                    "--key-file", str(other),
                    "--vocab", str(VOCAB_PATH),
                    "--f", "2",
                    "--tp", "0.02",
                ]
            )
            exit_codes.append(code)
            if code == 0:
                assert workspace["out"].read_text().strip() != "deadbeef"
        assert 4 in exit_codes  # the desync diagnostic does fire

    def test_missing_key_is_config_error(self, workspace, capsys):
        code = main(
            [
                "embed",
                "--cover", str(workspace["cover"]),
                "--payload", str(workspace["payload"]),
                "--out", str(workspace["stego"]),
                "--vocab", str(VOCAB_PATH),
            ]
        )
        assert code == 2
        assert "key" in capsys.readouterr().err

    def test_key_from_environment(self, workspace, monkeypatch):
        monkeypatch.setenv("STEGO_KEY", KEY_BYTES.hex())
        code = main(
            [
                "embed",
                "--cover", str(workspace["cover"]),
                "--payload", str(workspace["payload"]),
                "--out", str(workspace["stego"]),
                "--key-env", "STEGO_KEY",
                "--vocab", str(VOCAB_PATH),
                "--f", "2",
            ]
        )
        assert code == 0

    def test_verbose_echoes_settings_but_not_key(self, workspace, capsys):
        run_embed(workspace, ["--verbose"])
        err = capsys.readouterr().err
        assert "f=2" in err
        assert "tp=0.02" in err
        assert KEY_BYTES.hex() not in err


class TestConfigFile:
    def test_file_values_used_and_flags_override(self, workspace, capsys):
        workspace["payload"].write_text("de\n")  # small payload: tp=0.03 shrinks capacity
        cfg = workspace["dir"] / "stego.cfg"
        cfg.write_text(
            f"f=4\ntp=0.03\nkey_file={workspace['key']}\nvocab={VOCAB_PATH}\n# comment\n"
        )
        code = main(
            [
                "embed",
                "--cover", str(workspace["cover"]),
                "--payload", str(workspace["payload"]),
                "--out", str(workspace["stego"]),
                "--config", str(cfg),
                "--f", "2",  # override the file's f=4
                "--verbose",
            ]
        )
        assert code == 0
        err = capsys.readouterr().err
        assert "f=2" in err and "tp=0.03" in err

    def test_unknown_key_rejected(self, workspace):
        cfg = workspace["dir"] / "bad.cfg"
        cfg.write_text("bogus=1\n")
        code = main(
            [
                "embed",
                "--cover", str(workspace["cover"]),
                "--payload", str(workspace["payload"]),
                "--out", str(workspace["stego"]),
                "--config", str(cfg),
                "--key-file", str(workspace["key"]),
            ]
        )
        assert code == 2


class TestInspect:
    def test_inspect_reports_plan_and_capacity(self, workspace):
        report_path = workspace["dir"] / "inspect.json"
        code = main(
            [
                "inspect",
                "--cover", str(workspace["cover"]),
                "--report", str(report_path),
                *base_flags(workspace),
            ]
        )
        assert code == 0
        info = json.loads(report_path.read_text())
        assert info["tokens"] == len(COVER_TEXT.split())
        assert info["masked_positions"] > 0
        assert info["capacity_bits_max"] >= info["capacity_bits_min"] > 0
        assert len(info["positions"]) == info["masked_positions"]


class TestBench:
    @pytest.fixture
    def small_corpus(self, tmp_path: Path) -> Path:
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        for i, source in enumerate(sorted(CORPUS_DIR.glob("*.txt"))[:4]):
            (corpus / f"t{i}.txt").write_text(source.read_text())
        (corpus / "short.txt").write_text("too short .\n")
        return corpus

    def test_grid_size_and_skipping(self, workspace, small_corpus, capsys):
        code = main(
            [
                "bench",
                "--corpus", str(small_corpus),
                "--json",
                "--no-ppl",
                "--f", "2,3,4",
                "--tp", "0.02",
                "--key-file", str(workspace["key"]),
                "--vocab", str(VOCAB_PATH),
            ]
        )
        assert code == 0
        captured = capsys.readouterr()
        payload = json.loads(captured.out)
        assert payload["skipped"] == 1
        assert len(payload["rows"]) == 12  # 3 f x 2 coders x 2 modes
        assert "skipping short text" in captured.err

    def test_payload_decreases_with_interval(self, workspace, small_corpus, capsys):
        code = main(
            [
                "bench",
                "--corpus", str(small_corpus),
                "--json",
                "--no-ppl",
                "--f", "2,4",
                "--tp", "0.02",
                "--key-file", str(workspace["key"]),
                "--vocab", str(VOCAB_PATH),
            ]
        )
        assert code == 0
        rows = json.loads(capsys.readouterr().out)["rows"]
        by_f = {
            (row["f"], row["coder"], row["mode"]): row["mean_bpw"] for row in rows
        }
        for coder in ("consistency", "block"):
            for mode in ("autoregressive", "parallel"):
                assert by_f[(2, coder, mode)] > by_f[(4, coder, mode)]
