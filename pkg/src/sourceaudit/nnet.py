"""Bidirectional LSTM sequence classifier implemented directly in numpy.

The network embeds a padded id sequence, runs one LSTM over it left-to-right
and another over the (per-sample, length-aware) reversed sequence, concatenates
the two final hidden states, and maps them through a dense layer followed by
softmax. Both the forward pass and the full backward pass (BPTT) are written
out explicitly so that analytic gradients can be verified against central
finite differences.

Conventions:
- id 0 is PAD and is masked out of the recurrence; padded steps carry the
  previous state forward and contribute no gradient.
- parameters live in a flat ``dict[str, np.ndarray]`` with keys
  ``embedding``, ``{fwd,bwd}_wx``, ``{fwd,bwd}_wh``, ``{fwd,bwd}_b``,
  ``dense_w``, ``dense_b``.
- gate layout inside the fused ``(.., 4H)`` matrices is input, forget,
  cell-candidate, output.
"""

from __future__ import annotations

import numpy as np

PAD_ID = 0
UNK_ID = 1

PARAM_KEYS = (
    "embedding",
    "fwd_wx", "fwd_wh", "fwd_b",
    "bwd_wx", "bwd_wh", "bwd_b",
    "dense_w", "dense_b",
)


def init_params(vocab_size: int, embed_dim: int, hidden_dim: int,
                num_classes: int, rng: np.random.Generator,
                dtype=np.float32) -> dict[str, np.ndarray]:
    """Glorot-uniform initialization; forget-gate biases start at 1."""

    def glorot(fan_in, fan_out, shape):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=shape).astype(dtype)

    params: dict[str, np.ndarray] = {
        "embedding": glorot(vocab_size, embed_dim, (vocab_size, embed_dim)),
        "dense_w": glorot(2 * hidden_dim, num_classes, (2 * hidden_dim, num_classes)),
        "dense_b": np.zeros(num_classes, dtype=dtype),
    }
    for direction in ("fwd", "bwd"):
        params[f"{direction}_wx"] = glorot(embed_dim, hidden_dim, (embed_dim, 4 * hidden_dim))
        params[f"{direction}_wh"] = glorot(hidden_dim, hidden_dim, (hidden_dim, 4 * hidden_dim))
        bias = np.zeros(4 * hidden_dim, dtype=dtype)
        bias[hidden_dim:2 * hidden_dim] = 1.0  # forget gate
        params[f"{direction}_b"] = bias
    return params


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=-1, keepdims=True)


def reverse_by_length(ids: np.ndarray) -> np.ndarray:
    """Reverse each row's non-PAD prefix, keeping the padding on the right."""
    rev = ids.copy()
    lengths = (ids != PAD_ID).sum(axis=1)
    for row, length in enumerate(lengths):
        rev[row, :length] = ids[row, :length][::-1]
    return rev


def _lstm_pass(ids, x, wx, wh, b, keep_cache):
    """Masked LSTM over (B, T, E) inputs; returns final hidden state."""
    batch, steps, _ = x.shape
    hidden = wh.shape[0]
    dtype = x.dtype
    h = np.zeros((batch, hidden), dtype=dtype)
    c = np.zeros((batch, hidden), dtype=dtype)
    cache = [] if keep_cache else None
    for t in range(steps):
        m = (ids[:, t] != PAD_ID).astype(dtype)[:, None]
        a = x[:, t] @ wx + h @ wh + b
        i = _sigmoid(a[:, :hidden])
        f = _sigmoid(a[:, hidden:2 * hidden])
        g = np.tanh(a[:, 2 * hidden:3 * hidden])
        o = _sigmoid(a[:, 3 * hidden:])
        c_raw = f * c + i * g
        tanh_c = np.tanh(c_raw)
        h_raw = o * tanh_c
        h_new = m * h_raw + (1.0 - m) * h
        c_new = m * c_raw + (1.0 - m) * c
        if keep_cache:
            cache.append((m, i, f, g, o, tanh_c, h, c))
        h, c = h_new, c_new
    return h, cache


def _lstm_backward(ids, x, wx, wh, cache, dh_final):
    """BPTT through one masked LSTM pass.

    Returns (dx, dwx, dwh, db). Only the final hidden state receives an
    upstream gradient; interior steps get gradient through the recurrence.
    """
    batch, steps, _ = x.shape
    hidden = wh.shape[0]
    dtype = x.dtype
    dx = np.zeros_like(x)
    dwx = np.zeros_like(wx)
    dwh = np.zeros_like(wh)
    db = np.zeros(4 * hidden, dtype=dtype)
    dh = dh_final.astype(dtype)
    dc = np.zeros((batch, hidden), dtype=dtype)
    for t in range(steps - 1, -1, -1):
        m, i, f, g, o, tanh_c, h_prev, c_prev = cache[t]
        dh_raw = dh * m
        dc_raw = dc * m
        dh_carry = dh * (1.0 - m)
        dc_carry = dc * (1.0 - m)

        do = dh_raw * tanh_c
        dc_raw = dc_raw + dh_raw * o * (1.0 - tanh_c * tanh_c)
        di = dc_raw * g
        df = dc_raw * c_prev
        dg = dc_raw * i
        dc = dc_raw * f + dc_carry

        da = np.concatenate([
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ], axis=1)

        dwx += x[:, t].T @ da
        dwh += h_prev.T @ da
        db += da.sum(axis=0)
        dx[:, t] = da @ wx.T
        dh = da @ wh.T + dh_carry
    return dx, dwx, dwh, db


def forward(params: dict[str, np.ndarray], ids: np.ndarray) -> np.ndarray:
    """Class probabilities for a padded id batch of shape (B, T)."""
    probs, _ = forward_training(params, ids, keep_cache=False)
    return probs


def forward_training(params, ids, keep_cache=True):
    emb = params["embedding"]
    x_fwd = emb[ids]
    ids_rev = reverse_by_length(ids)
    x_bwd = emb[ids_rev]

    h_fwd, cache_fwd = _lstm_pass(ids, x_fwd, params["fwd_wx"], params["fwd_wh"],
                                  params["fwd_b"], keep_cache)
    h_bwd, cache_bwd = _lstm_pass(ids_rev, x_bwd, params["bwd_wx"], params["bwd_wh"],
                                  params["bwd_b"], keep_cache)
    features = np.concatenate([h_fwd, h_bwd], axis=1)
    logits = features @ params["dense_w"] + params["dense_b"]
    probs = softmax(logits)
    cache = None
    if keep_cache:
        cache = {
            "ids": ids, "ids_rev": ids_rev,
            "x_fwd": x_fwd, "x_bwd": x_bwd,
            "cache_fwd": cache_fwd, "cache_bwd": cache_bwd,
            "features": features, "probs": probs,
        }
    return probs, cache


def loss_and_gradients(params, ids, labels):
    """Mean cross-entropy over the batch plus gradients for every parameter."""
    probs, cache = forward_training(params, ids)
    batch = ids.shape[0]
    eps = np.finfo(probs.dtype).tiny
    loss = float(-np.log(np.maximum(probs[np.arange(batch), labels], eps)).mean())

    dlogits = probs.copy()
    dlogits[np.arange(batch), labels] -= 1.0
    dlogits /= batch

    grads: dict[str, np.ndarray] = {}
    grads["dense_w"] = cache["features"].T @ dlogits
    grads["dense_b"] = dlogits.sum(axis=0)
    dfeatures = dlogits @ params["dense_w"].T
    hidden = params["fwd_wh"].shape[0]
    dh_fwd = dfeatures[:, :hidden]
    dh_bwd = dfeatures[:, hidden:]

    dx_fwd, grads["fwd_wx"], grads["fwd_wh"], grads["fwd_b"] = _lstm_backward(
        cache["ids"], cache["x_fwd"], params["fwd_wx"], params["fwd_wh"],
        cache["cache_fwd"], dh_fwd)
    dx_bwd, grads["bwd_wx"], grads["bwd_wh"], grads["bwd_b"] = _lstm_backward(
        cache["ids_rev"], cache["x_bwd"], params["bwd_wx"], params["bwd_wh"],
        cache["cache_bwd"], dh_bwd)

    demb = np.zeros_like(params["embedding"])
    np.add.at(demb, cache["ids"], dx_fwd)
    np.add.at(demb, cache["ids_rev"], dx_bwd)
    grads["embedding"] = demb
    return loss, grads


class Adam:
    """Adam optimizer over a flat parameter dict."""

    def __init__(self, params, learning_rate=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self._m = {k: np.zeros_like(v) for k, v in params.items()}
        self._v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params, grads):
        self.step_count += 1
        bias1 = 1.0 - self.beta1 ** self.step_count
        bias2 = 1.0 - self.beta2 ** self.step_count
        for key, grad in grads.items():
            m = self._m[key]
            v = self._v[key]
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad * grad
            m_hat = m / bias1
            v_hat = v / bias2
            params[key] -= (self.lr * m_hat / (np.sqrt(v_hat) + self.eps)).astype(params[key].dtype)


def numeric_gradient(params, ids, labels, key, step=1e-5):
    """Central-difference gradient of the mean cross-entropy w.r.t. one tensor."""
    tensor = params[key]
    grad = np.zeros_like(tensor)
    flat = tensor.reshape(-1)
    gflat = grad.reshape(-1)
    batch = ids.shape[0]
    for idx in range(flat.size):
        original = flat[idx]
        flat[idx] = original + step
        probs_hi, _ = forward_training(params, ids, keep_cache=False)
        loss_hi = -np.log(probs_hi[np.arange(batch), labels]).mean()
        flat[idx] = original - step
        probs_lo, _ = forward_training(params, ids, keep_cache=False)
        loss_lo = -np.log(probs_lo[np.arange(batch), labels]).mean()
        flat[idx] = original
        gflat[idx] = (loss_hi - loss_lo) / (2.0 * step)
    return grad


def gradient_check(params, ids, labels, keys=None, step=1e-5):
    """Max elementwise relative error between analytic and numeric gradients.

    Returns a dict keyed by tensor name. Run with float64 parameters;
    float32 rounding swamps the finite-difference signal.
    """
    _, analytic = loss_and_gradients(params, ids, labels)
    errors = {}
    for key in keys or PARAM_KEYS:
        numeric = numeric_gradient(params, ids, labels, key, step=step)
        denom = np.maximum(np.abs(analytic[key]) + np.abs(numeric), 1e-6)
        errors[key] = float(np.max(np.abs(analytic[key] - numeric) / denom))
    return errors
