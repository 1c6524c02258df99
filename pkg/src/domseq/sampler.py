"""A one-layer attention sampler for Prüfer codes and adjacency bit strings.

The attention layer is the plain multi-head form

    f(Y)_i = sum_j softmax(beta * (Y A_j Y^T)_i) Y B_j

with no scaling, no masking and no normalization of its own.  The
next-token model wraps it as

    Y = E[tokens] + P[:m];  H = Y + f_causal(Y);  logits = H W + b

and is trained with full-batch gradient descent on cross-entropy.
Every gradient is written out by hand and checked against finite
differences in the test suite.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

CHECKPOINT_FORMAT = "domseq-attention"
CHECKPOINT_VERSION = 1


def softmax(x: np.ndarray, beta: float = 1.0, axis: int = -1) -> np.ndarray:
    z = beta * np.asarray(x, dtype=np.float64)
    z = z - np.max(z, axis=axis, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=axis, keepdims=True)


@dataclass
class AttentionParams:
    A: np.ndarray  # (heads, dim, dim)
    B: np.ndarray  # (heads, dim, dim)
    beta: float
    embed: np.ndarray | None = None  # (vocab, dim)
    pos: np.ndarray | None = None  # (context, dim)
    out: np.ndarray | None = None  # (dim, vocab)
    bias: np.ndarray | None = None  # (vocab,)

    def __post_init__(self) -> None:
        self.A = np.asarray(self.A, dtype=np.float64)
        self.B = np.asarray(self.B, dtype=np.float64)
        if self.A.ndim == 2:
            self.A = self.A[None]
        if self.B.ndim == 2:
            self.B = self.B[None]
        if self.A.shape != self.B.shape or self.A.shape[1] != self.A.shape[2]:
            raise ValueError(f"head shapes differ: A {self.A.shape}, B {self.B.shape}")
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    @property
    def heads(self) -> int:
        return self.A.shape[0]

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    @property
    def vocab(self) -> int:
        return self.embed.shape[0]

    @property
    def context(self) -> int:
        return self.pos.shape[0]

    @property
    def end_token(self) -> int:
        return self.vocab - 1

    def arrays(self) -> dict[str, np.ndarray]:
        return {k: getattr(self, k) for k in ("A", "B", "embed", "pos", "out", "bias")}

    def copy(self) -> AttentionParams:
        return AttentionParams(beta=self.beta, **{k: v.copy() for k, v in self.arrays().items()})


def _causal_mask(m: int) -> np.ndarray:
    return np.tril(np.ones((m, m), dtype=bool))


def _check_shapes(Y: np.ndarray, params: AttentionParams) -> None:
    if Y.ndim != 2 or Y.shape[1] != params.dim:
        raise ValueError(f"Y has shape {Y.shape}; expected (m, {params.dim})")


def _head_weights(Y: np.ndarray, A: np.ndarray, beta: float, causal: bool) -> np.ndarray:
    scores = Y @ A @ Y.T
    if causal:
        scores = np.where(_causal_mask(len(Y)), scores, -np.inf)
    return softmax(scores, beta, axis=1)


def attention_forward(Y: np.ndarray, params: AttentionParams, causal: bool = False) -> np.ndarray:
    """Multi-head attention; with ``causal`` row i only attends to rows <= i."""
    Y = np.asarray(Y, dtype=np.float64)
    _check_shapes(Y, params)
    out = np.zeros_like(Y)
    for A, B in zip(params.A, params.B):
        out += _head_weights(Y, A, params.beta, causal) @ Y @ B
    return out


def attention_grad(
    Y: np.ndarray, params: AttentionParams, upstream: np.ndarray, causal: bool = False
) -> dict[str, np.ndarray]:
    """Gradients of <upstream, f(Y)> with respect to Y, every A_j and every B_j."""
    Y = np.asarray(Y, dtype=np.float64)
    G = np.asarray(upstream, dtype=np.float64)
    _check_shapes(Y, params)
    if G.shape != Y.shape:
        raise ValueError(f"upstream shape {G.shape} does not match Y {Y.shape}")
    dY = np.zeros_like(Y)
    dA = np.zeros_like(params.A)
    dB = np.zeros_like(params.B)
    for j, (A, B) in enumerate(zip(params.A, params.B)):
        P = _head_weights(Y, A, params.beta, causal)
        V = Y @ B
        dP = G @ V.T
        dV = P.T @ G
        dB[j] = Y.T @ dV
        dY += dV @ B.T
        # softmax backward, row-wise; masked entries have P = 0
        dS = params.beta * P * (dP - np.sum(dP * P, axis=1, keepdims=True))
        dA[j] = Y.T @ dS @ Y
        dY += dS @ Y @ A.T + dS.T @ Y @ A
    return {"Y": dY, "A": dA, "B": dB}


# --------------------------------------------------------------------------
# next-token model
# --------------------------------------------------------------------------


def init_params(vocab: int, context: int, dim: int, heads: int, beta: float, seed: int) -> AttentionParams:
    """Scaled-uniform initialization, U(-1/sqrt(dim), 1/sqrt(dim)), seeded."""
    rng = np.random.default_rng(seed)
    s = 1.0 / math.sqrt(dim)

    def u(*shape: int) -> np.ndarray:
        return rng.uniform(-s, s, size=shape)

    return AttentionParams(
        A=u(heads, dim, dim), B=u(heads, dim, dim), beta=beta,
        embed=u(vocab, dim), pos=u(context, dim), out=u(dim, vocab), bias=np.zeros(vocab),
    )


def _forward(params: AttentionParams, inputs: np.ndarray):
    Y = params.embed[inputs] + params.pos[: len(inputs)]
    H = Y + attention_forward(Y, params, causal=True)
    logits = H @ params.out + params.bias
    return Y, H, logits


def sequence_loss_and_grad(
    params: AttentionParams, seq: Sequence[int], weight: float = 1.0
) -> tuple[float, dict[str, np.ndarray]]:
    """Summed cross-entropy of next-token predictions along ``seq`` times ``weight``."""
    seq = np.asarray(seq)
    inputs, targets = seq[:-1], seq[1:]
    Y, H, logits = _forward(params, inputs)
    probs = softmax(logits, axis=1)
    rows = np.arange(len(targets))
    loss = -float(np.sum(np.log(probs[rows, targets]))) * weight
    dlogits = probs
    dlogits[rows, targets] -= 1.0
    dlogits *= weight
    grads = {
        "out": H.T @ dlogits,
        "bias": dlogits.sum(axis=0),
    }
    dH = dlogits @ params.out.T
    att = attention_grad(Y, params, dH, causal=True)
    dY = dH + att["Y"]
    grads["A"], grads["B"] = att["A"], att["B"]
    dembed = np.zeros_like(params.embed)
    np.add.at(dembed, inputs, dY)
    dpos = np.zeros_like(params.pos)
    dpos[: len(inputs)] = dY
    grads["embed"], grads["pos"] = dembed, dpos
    return loss, grads


def dataset_loss_and_grad(params: AttentionParams, data: Sequence[Sequence[int]]):
    """Mean per-token cross-entropy over the dataset and its gradient."""
    tokens = sum(len(s) - 1 for s in data)
    total = 0.0
    grads = {k: np.zeros_like(v) for k, v in params.arrays().items()}
    for seq in data:
        loss, g = sequence_loss_and_grad(params, seq, 1.0 / tokens)
        total += loss
        for k in grads:
            grads[k] += g[k]
    return total, grads


@dataclass(frozen=True)
class TokenDataset:
    sequences: tuple[tuple[int, ...], ...]  # bodies, without start/end markers
    vocab: int  # includes the end token, which is vocab - 1
    context: int

    def __post_init__(self) -> None:
        for s in self.sequences:
            if len(s) + 2 > self.context:
                raise ValueError(f"sequence of length {len(s)} exceeds context {self.context}")
            if any(not 0 <= tok < self.vocab - 1 for tok in s):
                raise ValueError(f"token out of range in {s}")

    @property
    def end_token(self) -> int:
        return self.vocab - 1

    def framed(self) -> list[list[int]]:
        e = self.end_token
        return [[e, *s, e] for s in self.sequences]


def tree_dataset(codes: Iterable[Sequence[int]], n: int) -> TokenDataset:
    """Prüfer codes on n vertices; vocabulary is the n labels plus an end token."""
    return TokenDataset(tuple(tuple(c) for c in codes), vocab=n + 1, context=n)


def graph_dataset(bitstrings: Iterable[Sequence[int]], n: int) -> TokenDataset:
    """Upper-triangle adjacency bits; vocabulary is {0, 1} plus an end token."""
    return TokenDataset(tuple(tuple(b) for b in bitstrings), vocab=3, context=n * (n - 1) // 2 + 2)


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.5
    steps: int = 500
    seed: int = 0
    dim: int = 16
    heads: int = 2
    beta: float = 1.0


def train(dataset: TokenDataset, hyper: TrainConfig | None = None) -> tuple[AttentionParams, list[float]]:
    """Plain gradient descent; returns the parameters and the per-step loss."""
    hyper = hyper or TrainConfig()
    if not dataset.sequences:
        raise ValueError("cannot train on an empty dataset")
    params = init_params(dataset.vocab, dataset.context, hyper.dim, hyper.heads, hyper.beta, hyper.seed)
    data = dataset.framed()
    losses = []
    for _ in range(hyper.steps):
        loss, grads = dataset_loss_and_grad(params, data)
        losses.append(loss)
        for k, arr in params.arrays().items():
            arr -= hyper.lr * grads[k]
    return params, losses


def sample(params: AttentionParams, count: int, seed: int, beta: float = 1.0) -> list[list[int]]:
    """Autoregressive samples at temperature 1/beta, one derived RNG stream per sample."""
    end = params.end_token
    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        seq = [end]
        while len(seq) < params.context:
            _, _, logits = _forward(params, np.asarray(seq))
            p = softmax(logits[-1], beta)
            tok = int(rng.choice(len(p), p=p))
            if tok == end:
                break
            seq.append(tok)
        out.append(seq[1:])
    return out


def greedy_decode(params: AttentionParams) -> list[int]:
    """Zero-temperature limit: always take the most likely next token."""
    end = params.end_token
    seq = [end]
    while len(seq) < params.context:
        _, _, logits = _forward(params, np.asarray(seq))
        tok = int(np.argmax(logits[-1]))
        if tok == end:
            break
        seq.append(tok)
    return seq[1:]


# --------------------------------------------------------------------------
# checkpoints
# --------------------------------------------------------------------------


def save_checkpoint(params: AttentionParams) -> str:
    arrays = params.arrays()
    return json.dumps({
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "beta": params.beta,
        "shapes": {k: list(v.shape) for k, v in arrays.items()},
        "arrays": {k: v.ravel().tolist() for k, v in arrays.items()},
    })


def load_checkpoint(text: str) -> AttentionParams:
    data = json.loads(text)
    if data.get("format") != CHECKPOINT_FORMAT or data.get("version") != CHECKPOINT_VERSION:
        raise ValueError("not a domseq attention checkpoint of a supported version")
    arrays = {k: np.asarray(v, dtype=np.float64).reshape(data["shapes"][k]) for k, v in data["arrays"].items()}
    return AttentionParams(beta=float(data["beta"]), **arrays)
