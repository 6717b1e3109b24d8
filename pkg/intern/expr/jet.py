"""
Second-order forward-mode jets.

A Jet2 carries an array of values together with its first and second partial
derivatives w.r.t. the n coordinates of a chart:

    value : shape S
    grad  : shape S + (n,)        or None
    hess  : shape S + (n, n)      or None

The order of a jet is 2 when both derivative parts are present, 1 without the
Hessian and 0 for bare values. Every operation returns the minimum order of
its operands, so quantities built from one derivative of a field degrade
gracefully instead of silently carrying wrong second derivatives.
"""

import numpy as np


class JetDomainError(ValueError):
    pass


class SingularJetError(JetDomainError):
    pass


_SINGULAR_COND = 1e12


def _outer(a, b):
    return a[..., :, None] * b[..., None, :]


class Jet2:
    __slots__ = ("value", "grad", "hess")
    __array_ufunc__ = None

    def __init__(self, value, grad=None, hess=None):
        self.value = np.asarray(value, dtype=float)
        self.grad = None if grad is None else np.asarray(grad, dtype=float)
        self.hess = None if (hess is None or grad is None) else np.asarray(hess, dtype=float)

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, value, n: int, order: int = 2) -> "Jet2":
        value = np.asarray(value, dtype=float)
        grad = np.zeros(value.shape + (n,)) if order >= 1 else None
        hess = np.zeros(value.shape + (n, n)) if order >= 2 else None
        return cls(value, grad, hess)

    @classmethod
    def variable(cls, point) -> "Jet2":
        """The coordinate functions themselves: value p, gradient Id."""
        point = np.asarray(point, dtype=float)
        n = point.shape[0]
        return cls(point, np.eye(n), np.zeros((n, n, n)))

    # -- shape and order ----------------------------------------------------

    @property
    def order(self) -> int:
        if self.grad is None:
            return 0
        return 1 if self.hess is None else 2

    @property
    def n(self):
        return None if self.grad is None else self.grad.shape[-1]

    @property
    def shape(self) -> tuple:
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    def truncate(self, order: int) -> "Jet2":
        if order >= self.order:
            return self
        return Jet2(self.value,
                    self.grad if order >= 1 else None,
                    self.hess if order >= 2 else None)

    def __repr__(self):
        return f"Jet2(order={self.order}, value={self.value!r})"

    def __getitem__(self, idx) -> "Jet2":
        if not isinstance(idx, tuple):
            idx = (idx,)
        if any(i is Ellipsis for i in idx):
            raise IndexError("Jet2 indexing does not support Ellipsis")
        return Jet2(self.value[idx],
                    None if self.grad is None else self.grad[idx],
                    None if self.hess is None else self.hess[idx])

    def __len__(self):
        return len(self.value)

    def __iter__(self):
        for i in range(len(self.value)):
            yield self[i]

    def expand(self, axis: int) -> "Jet2":
        if axis < 0:
            axis += self.ndim + 1
        return Jet2(np.expand_dims(self.value, axis),
                    None if self.grad is None else np.expand_dims(self.grad, axis),
                    None if self.hess is None else np.expand_dims(self.hess, axis))

    def swap(self, i: int = -2, j: int = -1) -> "Jet2":
        nd = self.ndim
        i, j = i % nd, j % nd
        return Jet2(np.swapaxes(self.value, i, j),
                    None if self.grad is None else np.swapaxes(self.grad, i, j),
                    None if self.hess is None else np.swapaxes(self.hess, i, j))

    @property
    def T(self) -> "Jet2":
        return self.swap(-2, -1)

    def sum(self, axis: int = 0) -> "Jet2":
        axis = axis % self.ndim
        return Jet2(self.value.sum(axis),
                    None if self.grad is None else self.grad.sum(axis),
                    None if self.hess is None else self.hess.sum(axis))

    def reshape(self, *shape) -> "Jet2":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        extra_g = () if self.grad is None else (self.n,)
        return Jet2(self.value.reshape(shape),
                    None if self.grad is None else self.grad.reshape(shape + extra_g),
                    None if self.hess is None else self.hess.reshape(shape + extra_g * 2))

    # -- derivative views ---------------------------------------------------

    def derivative(self, i: int) -> "Jet2":
        """Jet of the partial derivative along coordinate i (one order lower)."""
        if self.grad is None:
            raise JetDomainError("jet has no derivative information")
        return Jet2(self.grad[..., i],
                    None if self.hess is None else self.hess[..., i, :])

    def gradient_jet(self) -> "Jet2":
        """Jet whose value is the gradient: shape S + (n,), one order lower."""
        if self.grad is None:
            raise JetDomainError("jet has no derivative information")
        return Jet2(self.grad, self.hess)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        if self.grad is None:
            return Jet2(other)
        return Jet2.constant(other, self.n, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        order = min(self.order, other.order)
        return Jet2(self.value + other.value,
                    self.grad + other.grad if order >= 1 else None,
                    self.hess + other.hess if order >= 2 else None)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value,
                    None if self.grad is None else -self.grad,
                    None if self.hess is None else -self.hess)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            c = np.asarray(other, dtype=float)
            return Jet2(self.value * c,
                        None if self.grad is None else self.grad * c[..., None],
                        None if self.hess is None else self.hess * c[..., None, None])
        a, b = self, other
        order = min(a.order, b.order)
        grad = hess = None
        if order >= 1:
            grad = a.value[..., None] * b.grad + b.value[..., None] * a.grad
        if order >= 2:
            hess = (a.value[..., None, None] * b.hess + b.value[..., None, None] * a.hess
                    + _outer(a.grad, b.grad) + _outer(b.grad, a.grad))
        return Jet2(a.value * b.value, grad, hess)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            c = np.asarray(other, dtype=float)
            if np.any(c == 0):
                raise JetDomainError("division by zero")
            return self * (1.0 / c)
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, other):
        return power(self, other)

    def __rpow__(self, other):
        return power(self._coerce(other), self)


def _chain(a: Jet2, f0, f1, f2) -> Jet2:
    grad = hess = None
    if a.order >= 1:
        grad = f1[..., None] * a.grad
    if a.order >= 2:
        hess = f1[..., None, None] * a.hess + f2[..., None, None] * _outer(a.grad, a.grad)
    return Jet2(f0, grad, hess)


def _as_jet(x) -> Jet2:
    return x if isinstance(x, Jet2) else Jet2(x)


def _as_jets(*xs) -> list:
    """Plain arrays become constant jets matching the first jet among `xs`."""
    ref = next((x for x in xs if isinstance(x, Jet2) and x.grad is not None), None)
    if ref is None:
        return [_as_jet(x) for x in xs]
    return [ref._coerce(x) for x in xs]


def reciprocal(a: Jet2) -> Jet2:
    v = a.value
    if np.any(v == 0):
        raise JetDomainError("division by zero")
    inv = 1.0 / v
    return _chain(a, inv, -inv * inv, 2.0 * inv * inv * inv)


def exp(a) -> Jet2:
    a = _as_jet(a)
    e = np.exp(a.value)
    return _chain(a, e, e, e)


def log(a) -> Jet2:
    a = _as_jet(a)
    if np.any(a.value <= 0):
        raise JetDomainError("log of non-positive value")
    inv = 1.0 / a.value
    return _chain(a, np.log(a.value), inv, -inv * inv)


def sin(a) -> Jet2:
    a = _as_jet(a)
    s, c = np.sin(a.value), np.cos(a.value)
    return _chain(a, s, c, -s)


def cos(a) -> Jet2:
    a = _as_jet(a)
    s, c = np.sin(a.value), np.cos(a.value)
    return _chain(a, c, -s, -c)


def tan(a) -> Jet2:
    a = _as_jet(a)
    c = np.cos(a.value)
    if np.any(np.abs(c) < 1e-300):
        raise JetDomainError("tan at a pole")
    t = np.tan(a.value)
    sec2 = 1.0 + t * t
    return _chain(a, t, sec2, 2.0 * t * sec2)


def sqrt(a) -> Jet2:
    a = _as_jet(a)
    v = a.value
    if np.any(v < 0) or (a.order >= 1 and np.any(v == 0)):
        raise JetDomainError("sqrt of negative value" if np.any(v < 0) else "sqrt is not differentiable at 0")
    r = np.sqrt(v)
    with np.errstate(divide="ignore"):
        f1 = np.where(v > 0, 0.5 / np.where(v > 0, r, 1.0), 0.0)
        f2 = np.where(v > 0, -0.25 / np.where(v > 0, r * v, 1.0), 0.0)
    return _chain(a, r, f1, f2)


def fabs(a) -> Jet2:
    a = _as_jet(a)
    if a.order >= 1 and np.any(a.value == 0):
        raise JetDomainError("abs is not differentiable at 0")
    return _chain(a, np.abs(a.value), np.sign(a.value), np.zeros_like(a.value))


def atan2(y, x) -> Jet2:
    y, x = _as_jet(y), _as_jet(x)
    r2 = x.value ** 2 + y.value ** 2
    if np.any(r2 == 0):
        raise JetDomainError("atan2(0, 0) is undefined")
    value = np.arctan2(y.value, x.value)
    fy, fx = x.value / r2, -y.value / r2
    r4 = r2 * r2
    fyy = -2.0 * x.value * y.value / r4
    fxx = 2.0 * x.value * y.value / r4
    fxy = (y.value ** 2 - x.value ** 2) / r4
    order = min(x.order, y.order)
    grad = hess = None
    if order >= 1:
        grad = fy[..., None] * y.grad + fx[..., None] * x.grad
    if order >= 2:
        hess = (fy[..., None, None] * y.hess + fx[..., None, None] * x.hess
                + fyy[..., None, None] * _outer(y.grad, y.grad)
                + fxx[..., None, None] * _outer(x.grad, x.grad)
                + fxy[..., None, None] * (_outer(y.grad, x.grad) + _outer(x.grad, y.grad)))
    return Jet2(value, grad, hess)


def _is_constant(b: Jet2) -> bool:
    if b.grad is None:
        return True
    if np.any(b.grad != 0):
        return False
    return b.hess is None or not np.any(b.hess != 0)


def power(a, b) -> Jet2:
    a = _as_jet(a)
    if isinstance(b, Jet2) and not _is_constant(b):
        if np.any(a.value <= 0):
            raise JetDomainError("variable exponent needs a positive base")
        return exp(b * log(a))

    c = float(b.value) if isinstance(b, Jet2) else float(b)
    v = a.value
    if c.is_integer():
        k = int(c)
        if k < 0 and np.any(v == 0):
            raise JetDomainError("division by zero")
        f0 = v ** float(k)
        f1 = k * v ** float(k - 1) if k != 0 else np.zeros_like(v)
        f2 = k * (k - 1) * v ** float(k - 2) if k not in (0, 1) else np.zeros_like(v)
        return _chain(a, f0, f1, f2)

    if np.any(v < 0):
        raise JetDomainError("non-integer power of a negative value")
    if np.any(v == 0) and c < 2:
        raise JetDomainError("non-integer power is not twice differentiable at 0")
    return _chain(a, v ** c, c * v ** (c - 1), c * (c - 1) * v ** (c - 2))


# -- structure --------------------------------------------------------------

def stack(jets, axis: int = 0) -> Jet2:
    jets = _as_jets(*jets)
    order = min(j.order for j in jets)
    if order >= 1:
        ns = {j.n for j in jets}
        if len(ns) != 1:
            raise ValueError(f"cannot stack jets over different coordinate counts {sorted(ns)}")
    return Jet2(np.stack([j.value for j in jets], axis),
                np.stack([j.grad for j in jets], axis) if order >= 1 else None,
                np.stack([j.hess for j in jets], axis) if order >= 2 else None)


def concatenate(jets, axis: int = 0) -> Jet2:
    jets = _as_jets(*jets)
    order = min(j.order for j in jets)
    axis = axis % jets[0].ndim
    return Jet2(np.concatenate([j.value for j in jets], axis),
                np.concatenate([j.grad for j in jets], axis) if order >= 1 else None,
                np.concatenate([j.hess for j in jets], axis) if order >= 2 else None)


def matmul(a, b) -> Jet2:
    """Matrix-matrix or matrix-vector product for jets or plain arrays."""
    a, b = _as_jets(a, b)
    if a.ndim == 1 and b.ndim == 1:
        return (a * b).sum(0)
    if a.ndim == 2 and b.ndim == 1:
        return (a * b.expand(0)).sum(1)
    if a.ndim == 1 and b.ndim == 2:
        return (a.expand(1) * b).sum(0)
    if a.ndim == 2 and b.ndim == 2:
        return (a.expand(2) * b.expand(0)).sum(1)
    raise ValueError(f"matmul of shapes {a.shape} and {b.shape}")


def outer(u, v) -> Jet2:
    u, v = _as_jets(u, v)
    return u.expand(1) * v.expand(0)


def solve(A, b) -> Jet2:
    """Jet of x = A^-1 b, differentiating A x = b twice."""
    A, b = _as_jets(A, b)
    vector = b.ndim == 1
    if vector:
        b = b.expand(1)
    N, m = b.shape
    if A.shape != (N, N):
        raise ValueError(f"solve: matrix shape {A.shape} does not match rhs {b.shape}")
    if not np.all(np.isfinite(A.value)) or np.linalg.cond(A.value) > _SINGULAR_COND:
        raise SingularJetError("singular linear system")

    x = np.linalg.solve(A.value, b.value)
    order = min(A.order, b.order)
    x_g = x_h = None
    if order >= 1:
        n = b.n
        rhs = b.grad - np.einsum("ijk,jm->imk", A.grad, x)
        x_g = np.linalg.solve(A.value, rhs.reshape(N, m * n)).reshape(N, m, n)
    if order >= 2:
        rhs = (b.hess
               - np.einsum("ijkl,jm->imkl", A.hess, x)
               - np.einsum("ijk,jml->imkl", A.grad, x_g)
               - np.einsum("ijl,jmk->imkl", A.grad, x_g))
        x_h = np.linalg.solve(A.value, rhs.reshape(N, m * n * n)).reshape(N, m, n, n)

    out = Jet2(x, x_g, x_h)
    return out[:, 0] if vector else out


def compose(F: Jet2, Y: Jet2) -> Jet2:
    """
    Chain rule: F is a jet w.r.t. coordinates y evaluated at y = Y.value,
    Y is the jet of y (a vector of m functions) w.r.t. coordinates x.
    Returns the jet of F as a function of x.
    """
    order = min(F.order, Y.order)
    grad = hess = None
    if order >= 1:
        grad = np.einsum("...a,an->...n", F.grad, Y.grad)
    if order >= 2:
        hess = (np.einsum("...ab,an,bl->...nl", F.hess, Y.grad, Y.grad)
                + np.einsum("...a,anl->...nl", F.grad, Y.hess))
    return Jet2(F.value, grad, hess)
