"""Model loading and masked-position scoring.

One ModelHost owns a bidirectional masked LM and its tokenizer. Inference
is configured for per-instance determinism: eval mode, no gradients,
single-threaded math. The weight digest identifies model plus runtime so
communicating parties can confirm they are talking to the same model.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import torch
import transformers
from transformers import AutoModelForMaskedLM, AutoTokenizer


def format_decimal(value: float) -> str:
    """Serialize a probability as the shortest decimal that parses back exactly.

    Twelve significant digits sound plentiful but only bound the parse-back
    error at ~5e-12 relative, which is not enough when two parties must
    reconstruct identical floats from the wire; exact round-tripping is.
    """
    return repr(float(value))


@dataclass(frozen=True)
class Prediction:
    entries: list[tuple[str, float]]  # (token, prob), sorted for the wire
    total_mass: float


class MaskError(ValueError):
    """mask_index is out of range or does not hold the mask token."""


class ModelHost:
    def __init__(self, model_name_or_path: str):
        torch.set_num_threads(1)  # keeps repeated CPU runs bit-identical
        self.model_name = model_name_or_path
        self.tokenizer = AutoTokenizer.from_pretrained(model_name_or_path)
        self.model = AutoModelForMaskedLM.from_pretrained(model_name_or_path)
        self.model.eval()
        self.mask_token = self.tokenizer.mask_token
        self._id_to_token = {
            idx: tok for tok, idx in self.tokenizer.get_vocab().items()
        }
        self.model_digest = self._compute_digest()

    def _compute_digest(self) -> str:
        h = hashlib.sha256()
        for name, tensor in sorted(self.model.state_dict().items()):
            h.update(name.encode("utf-8"))
            h.update(tensor.contiguous().numpy().tobytes())
        for token, idx in sorted(self.tokenizer.get_vocab().items()):
            h.update(f"{token}\x1f{idx}\x1e".encode("utf-8"))
        h.update(f"torch={torch.__version__}".encode())
        h.update(f"transformers={transformers.__version__}".encode())
        return h.hexdigest()

    def tokenize(self, text: str) -> list[str]:
        return self.tokenizer.tokenize(text)

    def predict(self, tokens: list[str], mask_index: int, min_prob: float) -> Prediction:
        """Full-vocabulary distribution at the masked position.

        The softmax is computed once over the whole vocabulary in float64;
        entries below ``min_prob`` are dropped from the response but stay
        in the reported total mass.
        """
        if not 0 <= mask_index < len(tokens):
            raise MaskError(f"mask_index {mask_index} out of range for {len(tokens)} tokens")
        if tokens[mask_index] != self.mask_token:
            raise MaskError(
                f"token at mask_index is {tokens[mask_index]!r}, expected {self.mask_token!r}"
            )
        ids = self.tokenizer.convert_tokens_to_ids(tokens)
        input_ids = torch.tensor(
            [[self.tokenizer.cls_token_id, *ids, self.tokenizer.sep_token_id]]
        )
        with torch.no_grad():
            logits = self.model(input_ids=input_ids).logits
        position_logits = logits[0, mask_index + 1].double()  # skip [CLS]
        probs = torch.softmax(position_logits, dim=-1)
        values = probs.tolist()
        total_mass = sum(values)
        entries = [
            (self._id_to_token[i], p) for i, p in enumerate(values) if p >= min_prob
        ]
        entries.sort(key=lambda e: (-e[1], e[0].encode("utf-8")))
        return Prediction(entries=entries, total_mass=total_mass)
