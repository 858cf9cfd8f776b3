"""Brute-force transcription of the separability criterion.

Plain Python loops over instances and classes, indicator functions spelled
out, memberships in their ratio form. Shares no code with ``sepselect``.
"""

import math

EPS = 1e-12


def _sub(a, b):
    return [x - y for x, y in zip(a, b)]


def _norm(v):
    return math.sqrt(sum(x * x for x in v))


def _dcos(u, v):
    nu, nv = _norm(u), _norm(v)
    if nu < EPS or nv < EPS:
        return 1.0
    c = sum(x * y for x, y in zip(u, v)) / (nu * nv)
    return max(-1.0, min(1.0, c))


def _fcm(dists):
    """mu_j = 1 / sum_k (d_j / d_k)^2, hard split on coincidence."""
    hits = [j for j, dj in enumerate(dists) if dj < EPS]
    if hits:
        return [1.0 / len(hits) if j in hits else 0.0 for j in range(len(dists))]
    return [1.0 / sum((dj / dk) ** 2 for dk in dists) for dj in dists]


def centroids(rows, labels, p):
    t = len(rows[0])
    out = []
    for q in range(p):
        omega = [1 if labels[i] == q else 0 for i in range(len(rows))]
        s = [sum(rows[i][f] * omega[i] for i in range(len(rows))) for f in range(t)]
        out.append([v / sum(omega) for v in s])
    return out


def memberships(x, cents):
    return _fcm([_norm(_sub(x, c)) for c in cents])


def nearest(cents):
    p = len(cents)
    out = []
    for q in range(p):
        best, best_d = None, math.inf
        for r in range(p):
            if r == q:
                continue
            dr = _norm(_sub(cents[q], cents[r]))
            if dr < best_d * (1 - 1e-12) or best is None:
                best, best_d = r, dr
        out.append(best)
    return out


def centroid_memberships(cents, a):
    """Row ``a`` of mu-bar: self = 1, others normalized over classes != a."""
    p = len(cents)
    others = [b for b in range(p) if b != a]
    d = [_norm(_sub(cents[a], cents[b])) for b in others]
    hits = [k for k, dk in enumerate(d) if dk < EPS]
    row = [0.0] * p
    row[a] = 1.0
    for k, b in enumerate(others):
        if hits:
            row[b] = 1.0 / len(hits) if k in hits else 0.0
        else:
            row[b] = 1.0 / (1.0 + sum((d[k] / d[j]) ** 2 for j in range(len(others)) if j != k))
    return row


def score(X, labels, subset, alpha, beta, variant="full"):
    """Return (theta_dis, theta_dir, lambda_dis, lambda_dir, sep)."""
    n = len(X)
    p = max(labels) + 1
    if not subset:
        return (0.0, 0.0, 0.0, 0.0, 0.0)
    rows = [[X[i][f] for f in subset] for i in range(n)]
    C = centroids(rows, labels, p)

    theta_dis = 0.0
    for q in range(p):
        for i in range(n):
            omega = 1 if labels[i] == q else 0
            theta_dis += _norm(_sub(rows[i], C[q])) * omega
    theta_dis /= n

    theta_dir = 0.0
    for i in range(n):
        mu = memberships(rows[i], C)
        for q in range(p):
            omega = 1 if labels[i] == q else 0
            if not omega:
                continue
            v_own = _sub(C[q], rows[i])
            inner = 0.0
            for q2 in range(p):
                inner += mu[q2] * (1 - _dcos(v_own, _sub(C[q2], rows[i])))
            theta_dir += inner
    theta_dir /= n

    nn = nearest(C)
    lambda_dis = 0.0
    for q in range(p):
        for q1 in range(p):
            phi = 1 if nn[q] == q1 else 0
            lambda_dis += _norm(_sub(C[q], C[q1])) * phi
    lambda_dis /= p

    mubar = [centroid_memberships(C, a) for a in range(p)]
    lambda_dir = 0.0
    for q in range(p):
        outer = 0.0
        for q2 in range(p):
            tau = 1 if q2 in (q, nn[q]) else 0
            inner = 0.0
            for q1 in range(p):
                phi = 1 if nn[q] == q1 else 0
                if not phi:
                    continue
                inner += mubar[q1][q2] * (1 - _dcos(_sub(C[q1], C[q]), _sub(C[q2], C[q])))
            outer += inner * (1 - tau)
        lambda_dir += outer
    lambda_dir /= p

    if variant == "full":
        num, den = lambda_dis + beta * lambda_dir, theta_dis + alpha * theta_dir
    elif variant == "no-dir-within":
        num, den = lambda_dis + beta * lambda_dir, theta_dis
    elif variant == "no-dir-between":
        num, den = lambda_dis, theta_dis + alpha * theta_dir
    else:
        num, den = lambda_dis, theta_dis
    return (theta_dis, theta_dir, lambda_dis, lambda_dir, num / max(den, EPS))
