"""Command-line front end: embed, extract, inspect, and bench over files.

Configuration comes from defaults, then an optional flat key=value config
file, then flags (flags win). The secret key is never taken as a flag
value; it is read from a file or a named environment variable.

Exit codes:
  0  success
  2  configuration or usage error
  3  insufficient capacity
  4  desynchronization (including a truncated recovered stream)
  5  transport failure talking to the inference service
  6  inference-service protocol or determinism violation
"""
from __future__ import annotations

import argparse
import json
import os
import random
import statistics
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import (
    CapacityError,
    ConfigError,
    DesyncError,
    DeterminismError,
    ProtocolError,
    StegoError,
    TransportError,
    TruncatedStreamError,
)
from .coding import select_candidates
from .lm import MaskedLM, ReferenceLM, RemoteLM
from .masking import plan_masks, temporary_text
from .metrics import is_countable, payload_bpw, pseudo_perplexity
from .pipeline import _build_codebook, _embed_stream, embed, extract
from .textcore import (
    SecretKey,
    StegoConfig,
    TokenSequence,
    apply_masks,
    decode_payload_text,
    encode_payload_text,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_DESYNC = 4
EXIT_TRANSPORT = 5
EXIT_LM_CONTRACT = 6

_CONFIG_KEYS = {
    "f",
    "tp",
    "coder",
    "mode",
    "lm",
    "endpoint",
    "vocab",
    "seed",
    "key_file",
    "key_env",
    "payload_enc",
}

_DEFAULTS = {
    "f": "3",
    "tp": "0.02",
    "coder": "consistency",
    "mode": "auto",
    "lm": "reference",
    "endpoint": "",
    "vocab": "",
    "seed": "42",
    "key_file": "",
    "key_env": "",
    "payload_enc": "hex",
}


@dataclass
class CliConfig:
    """Resolved settings for one command invocation."""

    stego: StegoConfig
    lm: MaskedLM
    payload_enc: str
    values: dict[str, str]  # effective settings for --verbose echoing
    f_values: list[int]
    tp_values: list[float]

    def echo(self):
        for key in sorted(self.values):
            print(f"{key}={self.values[key]}", file=sys.stderr)


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


def _load_key(values: dict[str, str]) -> SecretKey:
    key_file = values.get("key_file")
    key_env = values.get("key_env")
    if key_file and key_env:
        raise ConfigError("give either key_file or key_env, not both")
    if key_file:
        data = Path(key_file).read_bytes()
        if data.endswith(b"\r\n"):
            data = data[:-2]
        elif data.endswith(b"\n"):
            data = data[:-1]
        return SecretKey(data)
    if key_env:
        raw = os.environ.get(key_env)
        if raw is None:
            raise ConfigError(f"environment variable {key_env!r} is not set")
        try:
            return SecretKey(bytes.fromhex(raw.strip()))
        except ValueError as exc:
            raise ConfigError(f"environment key {key_env!r} is not valid hex") from exc
    raise ConfigError("a secret key is required: set --key-file or --key-env")


def _default_vocab_path() -> str:
    return str(resources.files("maskstego").joinpath("data/vocab64.txt"))


def _build_lm(values: dict[str, str]) -> tuple[MaskedLM, str]:
    backend = values["lm"]
    if backend == "reference":
        vocab_path = values["vocab"] or _default_vocab_path()
        seed = int(values["seed"])
        lm = ReferenceLM.from_vocab_file(vocab_path, seed)
        return lm, f"reference:{vocab_path}:{seed}"
    if backend == "remote":
        endpoint = values["endpoint"]
        if not endpoint:
            raise ConfigError("remote backend needs --endpoint")
        return RemoteLM(endpoint), f"remote:{endpoint}"
    raise ConfigError(f"unknown lm backend {backend!r}")


def resolve_config(args: argparse.Namespace, allow_grid: bool = False) -> CliConfig:
    values = dict(_DEFAULTS)
    if getattr(args, "config", None):
        values.update(_read_config_file(args.config))
    for key_name in _CONFIG_KEYS:
        flag_value = getattr(args, key_name, None)
        if flag_value is not None:
            values[key_name] = str(flag_value)

    try:
        f_values = [int(v) for v in values["f"].split(",")]
        tp_values = [float(v) for v in values["tp"].split(",")]
        seed_check = int(values["seed"])  # fail early on bad seeds
    except ValueError as exc:
        raise ConfigError(f"bad numeric setting: {exc}") from exc
    del seed_check
    if not allow_grid and (len(f_values) > 1 or len(tp_values) > 1):
        raise ConfigError("comma-separated f/tp grids are only valid for bench")
    f = f_values[0]
    t_p = tp_values[0]
    key = _load_key(values)
    lm, lm_spec = _build_lm(values)
    mode = "parallel" if values["mode"] == "parallel" else "autoregressive"
    if values["mode"] not in ("auto", "parallel", "autoregressive"):
        raise ConfigError(f"unknown mode {values['mode']!r}")
    if values["payload_enc"] not in ("hex", "base64"):
        raise ConfigError(f"unknown payload encoding {values['payload_enc']!r}")
    stego = StegoConfig(
        f=f, t_p=t_p, key=key, coder=values["coder"], mode=mode, lm_spec=lm_spec
    )
    echo = dict(values)
    echo["lm_spec"] = lm_spec
    if echo.get("key_file"):
        echo["key"] = f"file:{echo['key_file']}"
    else:
        echo["key"] = f"env:{echo.get('key_env', '')}"
    return CliConfig(
        stego=stego,
        lm=lm,
        payload_enc=values["payload_enc"],
        values=echo,
        f_values=f_values,
        tp_values=tp_values,
    )


def _write_report(report_dict: dict, path: str | None):
    text = json.dumps(report_dict, indent=2)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


# --- commands ---------------------------------------------------------------


def cmd_embed(args: argparse.Namespace) -> int:
    cli = resolve_config(args)
    if args.verbose:
        cli.echo()
    cover_raw = Path(args.cover).read_text(encoding="utf-8")
    cover = cli.lm.tokenize(cover_raw)
    payload_text = Path(args.payload).read_text(encoding="utf-8")
    bits = decode_payload_text(payload_text, cli.payload_enc)
    try:
        stego, report = embed(cover, bits, cli.stego, cli.lm)
    except CapacityError as exc:
        _write_report(
            {"error": "capacity", "message": str(exc), "bits_consumed": exc.bits_consumed},
            args.report,
        )
        raise
    Path(args.out).write_text(stego.text() + "\n", encoding="utf-8")
    report_dict = report.to_dict()
    report_dict["annotations"] = report.annotations()
    report_dict["message_bits"] = len(bits)
    _write_report(report_dict, args.report)
    return EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    cli = resolve_config(args)
    if args.verbose:
        cli.echo()
    stego_raw = Path(args.stego).read_text(encoding="utf-8")
    stego = TokenSequence.from_surfaces(stego_raw.split())
    bits = extract(stego, cli.stego, cli.lm)
    Path(args.out).write_text(
        encode_payload_text(bits, cli.payload_enc) + "\n", encoding="utf-8"
    )
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace) -> int:
    """Dry-run diagnostics: plan, per-position candidate counts, capacity bounds.

    Contexts are built as if every earlier position kept its original word,
    so the counts are an estimate; the real walk depends on the message.
    """
    cli = resolve_config(args)
    if args.verbose:
        cli.echo()
    cover_raw = Path(args.cover).read_text(encoding="utf-8")
    cover = cli.lm.tokenize(cover_raw)
    plan = plan_masks(cover, cli.stego.f, cli.stego.key)
    masked = apply_masks(cover, plan.indices)
    work = list(masked.tokens)
    positions = []
    cap_min = 0
    cap_max = 0
    for j, pos in enumerate(plan.indices):
        if cli.stego.mode == "autoregressive":
            temp = temporary_text(TokenSequence(work), plan, j)
        else:
            temp = masked
        dist = cli.lm.predict(temp, pos, cli.stego.t_p)
        cands = select_candidates(dist, cli.stego.t_p)
        entry = {"index": pos, "token": cover[pos].surface, "candidates": cands.size}
        if cands.size >= 2:
            book = _build_codebook(cands, cli.stego, pos)
            entry["code_len_min"] = book.min_code_len
            entry["code_len_max"] = book.max_code_len
            cap_min += book.min_code_len
            cap_max += book.max_code_len
        positions.append(entry)
        work[pos] = cover[pos]  # dry run: pretend the original was chosen
    info = {
        "tokens": len(cover),
        "countable_words": sum(1 for t in cover if is_countable(t)),
        "masked_positions": plan.size,
        "offset": plan.offset,
        "capacity_bits_min": cap_min,
        "capacity_bits_max": cap_max,
        "framing_overhead_bits": 32,
        "positions": positions,
    }
    _write_report(info, args.report)
    return EXIT_OK


def bench_corpus(
    texts: list[TokenSequence],
    lm: MaskedLM,
    key: SecretKey,
    f_values: list[int],
    tp_values: list[float],
    rng_seed: int,
    with_ppl: bool = True,
    coders: tuple[str, ...] = ("consistency", "block"),
    modes: tuple[str, ...] = ("autoregressive", "parallel"),
) -> list[dict]:
    """Measure mean payload (and optionally pseudo-perplexity) over a corpus.

    Each text is filled end to end with a key-independent pseudo-random bit
    stream (no framing), which mirrors how payload rates are usually quoted:
    capacity actually used, not message length plus envelope.
    """
    rows = []
    for f in f_values:
        for t_p in tp_values:
            for coder in coders:
                for mode in modes:
                    bpws = []
                    ppls = []
                    for idx, text in enumerate(texts):
                        rng = random.Random(rng_seed * 1_000_003 + idx)
                        stream = [rng.getrandbits(1) for _ in range(32768)]
                        config = StegoConfig(
                            f=f, t_p=t_p, key=key, coder=coder, mode=mode
                        )
                        stego, _, consumed = _embed_stream(text, stream, config, lm)
                        stats = payload_bpw(stego, min(consumed, len(stream)))
                        bpws.append(stats.bpw)
                        if with_ppl:
                            ppls.append(pseudo_perplexity(lm, stego))
                    row = {
                        "f": f,
                        "t_p": t_p,
                        "coder": coder,
                        "mode": mode,
                        "texts": len(texts),
                        "mean_bpw": statistics.fmean(bpws) if bpws else 0.0,
                    }
                    if with_ppl:
                        row["mean_ppl"] = statistics.fmean(ppls) if ppls else 0.0
                    rows.append(row)
    return rows


def cmd_bench(args: argparse.Namespace) -> int:
    cli = resolve_config(args, allow_grid=True)
    if args.verbose:
        cli.echo()
    corpus_dir = Path(args.corpus)
    texts = []
    skipped = 0
    for path in sorted(corpus_dir.glob("*.txt")):
        tokens = cli.lm.tokenize(path.read_text(encoding="utf-8"))
        if sum(1 for t in tokens if is_countable(t)) < 20:
            print(f"skipping short text {path.name}", file=sys.stderr)
            skipped += 1
            continue
        texts.append(tokens)
    if not texts:
        raise ConfigError(f"no usable texts in {corpus_dir}")
    rows = bench_corpus(
        texts,
        cli.lm,
        cli.stego.key,
        cli.f_values,
        cli.tp_values,
        rng_seed=int(cli.values["seed"]),
        with_ppl=not args.no_ppl,
    )
    if args.json:
        print(json.dumps({"skipped": skipped, "rows": rows}, indent=2))
        return EXIT_OK
    header = ["f", "t_p", "coder", "mode", "mean_bpw"] + (
        [] if args.no_ppl else ["mean_ppl"]
    )
    print("\t".join(header))
    for row in rows:
        cells = [str(row["f"]), f"{row['t_p']:g}", row["coder"], row["mode"], f"{row['mean_bpw']:.4f}"]
        if not args.no_ppl:
            cells.append(f"{row['mean_ppl']:.4f}")
        print("\t".join(cells))
    return EXIT_OK


# --- argument parsing -------------------------------------------------------


def _add_config_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--f", help="masking interval >= 1 (bench: comma list)")
    parser.add_argument("--tp", help="candidate probability threshold (bench: comma list)")
    parser.add_argument("--coder", choices=["consistency", "block"])
    parser.add_argument("--mode", choices=["auto", "parallel"])
    parser.add_argument("--lm", choices=["reference", "remote"])
    parser.add_argument("--endpoint", help="inference service URL (remote backend)")
    parser.add_argument("--vocab", help="vocabulary file (reference backend)")
    parser.add_argument("--seed", type=int, help="reference model seed")
    parser.add_argument("--key-file", dest="key_file", help="file holding the raw key bytes")
    parser.add_argument("--key-env", dest="key_env", help="env var holding the key as hex")
    parser.add_argument(
        "--payload-enc", dest="payload_enc", choices=["hex", "base64"],
        help="payload file encoding",
    )
    parser.add_argument("--verbose", action="store_true", help="echo effective settings")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maskstego",
        description="Hide and recover bitstreams in token sequences via a masked LM.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_embed = sub.add_parser("embed", help="embed a payload file into a cover text")
    p_embed.add_argument("--cover", required=True, help="cover text file")
    p_embed.add_argument("--payload", required=True, help="payload file (hex/base64)")
    p_embed.add_argument("--out", required=True, help="stego text output file")
    p_embed.add_argument("--report", help="write the JSON report here instead of stdout")
    _add_config_flags(p_embed)
    p_embed.set_defaults(func=cmd_embed)

    p_extract = sub.add_parser("extract", help="recover the payload from a stego text")
    p_extract.add_argument("--stego", required=True, help="stego text file")
    p_extract.add_argument("--out", required=True, help="payload output file")
    _add_config_flags(p_extract)
    p_extract.set_defaults(func=cmd_extract)

    p_inspect = sub.add_parser("inspect", help="show plan and capacity for a cover")
    p_inspect.add_argument("--cover", required=True, help="cover text file")
    p_inspect.add_argument("--report", help="write the JSON report here instead of stdout")
    _add_config_flags(p_inspect)
    p_inspect.set_defaults(func=cmd_inspect)

    p_bench = sub.add_parser("bench", help="payload/quality grid over a corpus dir")
    p_bench.add_argument("--corpus", required=True, help="directory of .txt cover files")
    p_bench.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    p_bench.add_argument("--no-ppl", dest="no_ppl", action="store_true",
                         help="skip pseudo-perplexity (faster)")
    _add_config_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (DesyncError, TruncatedStreamError) as exc:
        print(f"desync error: {exc}", file=sys.stderr)
        return EXIT_DESYNC
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except (ProtocolError, DeterminismError) as exc:
        print(f"lm contract error: {exc}", file=sys.stderr)
        return EXIT_LM_CONTRACT
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StegoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
