"""TF-IDF features and a multinomial Naive Bayes acceptance model.

The same stack serves two roles: the curator's publication scorer
(trained on weekly view-percentile labels) and the proposer's learned
acceptance predictor (trained on its own submit/publish history).

Models serialize to a small versioned JSON text format; a load/save
round trip reproduces predictions bit for bit.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import SchemaError

_TOKEN_RE = re.compile(r"[a-z0-9]+")

MODEL_FORMAT = "pubgame-acceptance-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class FeaturizerConfig:
    """Vocabulary construction knobs.

    ``min_df`` drops tokens seen in fewer documents; ``min_token_len``
    drops short tokens (set to 1 to keep single characters).
    """

    min_df: int = 2
    min_token_len: int = 2

    def __post_init__(self) -> None:
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")


def tokenize(text: str, min_token_len: int = 2) -> list[str]:
    """Lowercase alphanumeric runs of at least ``min_token_len`` chars."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= min_token_len]


class TextFeaturizer:
    """Maps raw text to L2-normalized tf-idf weight vectors.

    idf(t) = ln((1 + N) / (1 + df_t)) + 1 over the fitted corpus; the
    vocabulary is sorted alphabetically so indices are reproducible.
    Transforms are returned sparsely as {token index: weight} dicts.
    """

    def __init__(
        self,
        vocabulary: dict[str, int],
        idf: np.ndarray,
        config: FeaturizerConfig,
    ):
        self.vocabulary = vocabulary
        self.idf = idf
        self.config = config

    @classmethod
    def fit(
        cls, corpus: Sequence[str], config: FeaturizerConfig = FeaturizerConfig()
    ) -> "TextFeaturizer":
        df: dict[str, int] = {}
        for doc in corpus:
            for token in set(tokenize(doc, config.min_token_len)):
                df[token] = df.get(token, 0) + 1
        kept = sorted(t for t, c in df.items() if c >= config.min_df)
        vocabulary = {t: i for i, t in enumerate(kept)}
        n = len(corpus)
        idf = np.array(
            [math.log((1 + n) / (1 + df[t])) + 1.0 for t in kept], dtype=np.float64
        )
        return cls(vocabulary, idf, config)

    @property
    def size(self) -> int:
        return len(self.vocabulary)

    def transform(self, texts: Sequence[str]) -> list[dict[int, float]]:
        out: list[dict[int, float]] = []
        for text in texts:
            counts: dict[int, int] = {}
            for token in tokenize(text, self.config.min_token_len):
                idx = self.vocabulary.get(token)
                if idx is not None:
                    counts[idx] = counts.get(idx, 0) + 1
            weights = {i: c * self.idf[i] for i, c in counts.items()}
            norm = math.sqrt(sum(w * w for w in weights.values()))
            if norm > 0:
                weights = {i: w / norm for i, w in weights.items()}
            out.append(weights)
        return out

    def to_payload(self) -> dict:
        tokens = sorted(self.vocabulary, key=self.vocabulary.get)
        return {
            "vocabulary": tokens,
            "idf": [float(v) for v in self.idf],
            "min_df": self.config.min_df,
            "min_token_len": self.config.min_token_len,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "TextFeaturizer":
        tokens = payload["vocabulary"]
        config = FeaturizerConfig(
            min_df=payload["min_df"], min_token_len=payload["min_token_len"]
        )
        return cls(
            {t: i for i, t in enumerate(tokens)},
            np.array(payload["idf"], dtype=np.float64),
            config,
        )


class AcceptanceModel:
    """Two-class multinomial Naive Bayes over tf-idf weights.

    tf-idf weights act as fractional counts with Laplace smoothing
    alpha = 1.  An untrained model predicts probability 1 for every
    input, which makes utility-weighted ranking collapse to plain
    utility ranking.
    """

    def __init__(
        self,
        featurizer: TextFeaturizer | None = None,
        class_log_prior: np.ndarray | None = None,
        feature_log_lik: np.ndarray | None = None,
        alpha: float = 1.0,
    ):
        self.featurizer = featurizer
        self.class_log_prior = class_log_prior
        self.feature_log_lik = feature_log_lik
        self.alpha = alpha

    @property
    def trained(self) -> bool:
        return self.feature_log_lik is not None

    def predict_proba(self, texts: Sequence[str]) -> np.ndarray:
        """P(label == 1) per text; all ones when untrained."""
        if not self.trained:
            return np.ones(len(texts), dtype=np.float64)
        assert self.featurizer is not None
        out = np.empty(len(texts), dtype=np.float64)
        fll = self.feature_log_lik
        for d, weights in enumerate(self.featurizer.transform(texts)):
            s0 = self.class_log_prior[0]
            s1 = self.class_log_prior[1]
            for i, w in weights.items():
                s0 += w * fll[0, i]
                s1 += w * fll[1, i]
            out[d] = 1.0 / (1.0 + math.exp(s0 - s1))
        return out

    def to_payload(self) -> dict:
        payload = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "trained": self.trained,
            "alpha": self.alpha,
        }
        if self.trained:
            payload["featurizer"] = self.featurizer.to_payload()
            payload["class_log_prior"] = [float(v) for v in self.class_log_prior]
            payload["feature_log_lik"] = [
                [float(v) for v in row] for row in self.feature_log_lik
            ]
        return payload

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_payload(), indent=2, sort_keys=True) + "\n"
        )

    @classmethod
    def from_payload(cls, payload: dict) -> "AcceptanceModel":
        if payload.get("format") != MODEL_FORMAT:
            raise SchemaError(f"not an acceptance model file: {payload.get('format')!r}")
        if payload.get("version") != MODEL_VERSION:
            raise SchemaError(
                f"unsupported model version {payload.get('version')!r}; "
                f"this build reads version {MODEL_VERSION}"
            )
        if not payload["trained"]:
            return cls(alpha=payload["alpha"])
        return cls(
            featurizer=TextFeaturizer.from_payload(payload["featurizer"]),
            class_log_prior=np.array(payload["class_log_prior"], dtype=np.float64),
            feature_log_lik=np.array(payload["feature_log_lik"], dtype=np.float64),
            alpha=payload["alpha"],
        )

    @classmethod
    def load(cls, path: str | Path) -> "AcceptanceModel":
        return cls.from_payload(json.loads(Path(path).read_text()))


def train_acceptance(
    history: Sequence[tuple],
    config: FeaturizerConfig = FeaturizerConfig(),
    alpha: float = 1.0,
) -> AcceptanceModel:
    """Fit the acceptance model on (question, accepted) pairs.

    Questions may be any objects with a ``text`` attribute, or plain
    strings.  Degenerate histories (empty, single-class, or an empty
    surviving vocabulary) yield an untrained model; callers decide
    whether to keep a previously trained one instead.
    """
    texts = [getattr(q, "text", q) for q, _ in history]
    labels = [1 if accepted else 0 for _, accepted in history]
    if not history or len(set(labels)) < 2:
        return AcceptanceModel(alpha=alpha)
    featurizer = TextFeaturizer.fit(texts, config)
    if featurizer.size == 0:
        return AcceptanceModel(alpha=alpha)

    v = featurizer.size
    counts = np.zeros((2, v), dtype=np.float64)
    n_class = [0, 0]
    for weights, label in zip(featurizer.transform(texts), labels):
        n_class[label] += 1
        row = counts[label]
        for i, w in weights.items():
            row[i] += w
    totals = counts.sum(axis=1)
    feature_log_lik = np.log(
        (alpha + counts) / (alpha * v + totals)[:, None]
    )
    class_log_prior = np.log(np.array(n_class, dtype=np.float64) / len(labels))
    return AcceptanceModel(featurizer, class_log_prior, feature_log_lik, alpha)
