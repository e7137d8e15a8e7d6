"""Sentence embedding providers behind one interface.

The default provider hashes lemma term frequencies into a fixed-width
vector (64-bit FNV-1a, bucket = hash mod dim, sign from the hash's top
bit) and L2-normalizes. It is deterministic across runs and platforms.
A remote provider speaks a small JSON protocol for transformer parity
runs; its model string is carried into reports for provenance.
"""

from __future__ import annotations

import json
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ProviderError
from .textproc import lemmatize, tokenize

BUILTIN = "builtin_tf"
REMOTE = "remote"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class EmbeddingVector:
    values: np.ndarray
    dim: int
    provider_id: str
    empty: bool = False     # input text had no word tokens

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ProviderError(f"non-finite embedding from {self.provider_id}")


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = BUILTIN
    dim: int = 1024                  # builtin only
    endpoint: str = ""               # remote only
    model: str = ""
    timeout: float = 10.0
    retries: int = 2

    def __post_init__(self):
        if self.kind not in (BUILTIN, REMOTE):
            raise InputError(f"unknown provider kind: {self.kind!r}")
        if self.kind == BUILTIN and self.dim < 64:
            raise InputError(f"builtin hash dimension must be >= 64, got {self.dim}")
        if self.kind == REMOTE and not self.endpoint:
            raise InputError("remote provider requires an endpoint")
        if self.timeout <= 0:
            raise InputError("timeout must be positive")
        if self.retries < 0:
            raise InputError("retry count must be >= 0")


def fnv1a64(text: str) -> int:
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def hash_bucket(lemma: str, dim: int) -> tuple[int, int]:
    """(bucket index, sign) for one lemma."""
    h = fnv1a64(lemma)
    sign = -1 if (h >> 63) & 1 else 1
    return h % dim, sign


def _word_lemmas(text: str) -> list[str]:
    lemmas = []
    for tok in tokenize(text):
        alnum = [c for c in tok if c.isalnum()]
        if not alnum or all(c.isdigit() for c in alnum):
            continue
        lemmas.append(lemmatize(tok))
    return lemmas


class BuiltinProvider:
    """Hashed lemma term-frequency vectors, L2-normalized."""

    def __init__(self, dim: int = 1024):
        if dim < 64:
            raise InputError(f"builtin hash dimension must be >= 64, got {dim}")
        self.dim = dim
        self.provider_id = f"builtin_tf:dim={dim}"

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        if not texts:
            raise InputError("embed requires at least one text")
        out = []
        for text in texts:
            vec = np.zeros(self.dim, dtype=np.float64)
            lemmas = _word_lemmas(text)
            for lemma in lemmas:
                bucket, sign = hash_bucket(lemma, self.dim)
                vec[bucket] += sign
            norm = float(np.linalg.norm(vec))
            if norm > 0.0:
                vec /= norm
            out.append(EmbeddingVector(
                values=vec, dim=self.dim,
                provider_id=self.provider_id, empty=not lemmas,
            ))
        return out


class RemoteProvider:
    """Client for the POST /v1/embed JSON protocol."""

    def __init__(self, endpoint: str, model: str, timeout: float = 10.0, retries: int = 2):
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.timeout = timeout
        self.retries = retries
        self.provider_id = f"remote:{model}" if model else "remote"

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        if not texts:
            raise InputError("embed requires at least one text")
        payload = json.dumps({"model": self.model, "texts": list(texts)}).encode("utf-8")
        body = self._post(payload)
        try:
            dim = int(body["dim"])
            vectors = body["vectors"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed embedding response: {exc}") from exc
        if len(vectors) != len(texts):
            raise ProviderError(
                f"provider returned {len(vectors)} vectors for {len(texts)} texts")
        out = []
        for text, values in zip(texts, vectors):
            arr = np.asarray(values, dtype=np.float64)
            if arr.shape != (dim,):
                raise ProviderError(
                    f"embedding dim mismatch: expected {dim}, got {arr.shape}")
            out.append(EmbeddingVector(
                values=arr, dim=dim,
                provider_id=self.provider_id, empty=not text.strip(),
            ))
        return out

    def _post(self, payload: bytes) -> dict:
        url = f"{self.endpoint}/v1/embed"
        last_error: Exception | None = None
        for _ in range(self.retries + 1):
            req = urllib.request.Request(
                url, data=payload, headers={"Content-Type": "application/json"})
            try:
                with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                    return json.loads(resp.read().decode("utf-8"))
            except urllib.error.HTTPError as exc:
                if 400 <= exc.code < 500:
                    raise ProviderError(f"embed request rejected: HTTP {exc.code}") from exc
                last_error = exc          # 5xx: retryable
            except (urllib.error.URLError, TimeoutError, OSError) as exc:
                last_error = exc
            except json.JSONDecodeError as exc:
                raise ProviderError(f"non-JSON embedding response: {exc}") from exc
            time.sleep(0.0)               # retries are immediate; no backoff needed
        raise ProviderError(f"embedding endpoint unreachable after "
                            f"{self.retries + 1} attempts: {last_error}")


def make_provider(config: ProviderConfig):
    if config.kind == BUILTIN:
        return BuiltinProvider(dim=config.dim)
    return RemoteProvider(config.endpoint, config.model, config.timeout, config.retries)


def embed(texts: list[str], config: ProviderConfig) -> list[EmbeddingVector]:
    return make_provider(config).embed(texts)


def cosine(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """dot(u,v)/(|u||v|); 0.0 when either norm is zero."""
    if u.dim != v.dim:
        raise InputError(f"cosine dim mismatch: {u.dim} != {v.dim}")
    return cosine_values(u.values, v.values)


def cosine_values(u: np.ndarray, v: np.ndarray) -> float:
    if u.shape != v.shape:
        raise InputError(f"cosine shape mismatch: {u.shape} != {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))
