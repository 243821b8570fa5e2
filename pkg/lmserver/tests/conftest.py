from __future__ import annotations

import socket
import threading
import time

import pytest

from lmserver import ModelHost, create_app

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
WORDS = [
    "the", "a", "and", "was", "near", "city", "town", "nice", "wonderful",
    "little", "great", "small", "village", "place", "river", "house",
    "garden", "bright", "quiet", "old", "new", "busy", "calm", "happy",
    "lovely", "pretty", "good", "fine", "warm", "cold", "green", "blue",
    "market", "square", "street", "bridge", "tower", "castle", "harbor",
    "forest", "meadow", "valley", "hill", "lake", "coast", "island",
    "morning", "evening", "summer", "winter", "music", "festival",
]
SUBWORDS = ["##s", "##ing"]
PUNCT = [".", ",", "!", "?"]


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory) -> str:
    """A small randomly initialized masked LM saved to disk.

    Weights are seeded, so the directory is deterministic for one session;
    the server only promises per-instance determinism anyway. The tokenizer
    files are written directly: the cased WordPiece loads cleanly through
    the from_pretrained directory flow.
    """
    import json

    import torch
    from transformers import BertConfig, BertForMaskedLM

    path = tmp_path_factory.mktemp("tinybert")
    vocab = SPECIALS + WORDS + SUBWORDS + PUNCT
    (path / "vocab.txt").write_text("\n".join(vocab) + "\n", encoding="utf-8")
    (path / "tokenizer_config.json").write_text(
        json.dumps({"tokenizer_class": "BertTokenizer", "do_lower_case": False})
    )

    torch.manual_seed(20240901)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=128,
    )
    BertForMaskedLM(config).save_pretrained(path)
    return str(path)


@pytest.fixture(scope="session")
def model_host(tiny_model_dir) -> ModelHost:
    return ModelHost(tiny_model_dir)


@pytest.fixture(scope="session")
def client(model_host):
    from fastapi.testclient import TestClient

    return TestClient(create_app(model_host))


@pytest.fixture(scope="session")
def live_server(model_host):
    """A real uvicorn instance on a local port, for end-to-end runs."""
    import uvicorn

    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    config = uvicorn.Config(
        create_app(model_host), host="127.0.0.1", port=port, log_level="warning"
    )
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 30
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.05)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=10)
