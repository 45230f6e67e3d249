"""Moment sequences of root and total configuration counts under both models.

Uniform model: sequences are stored Catalan-weighted, a_n = C_{n-1} E[.],
which makes every recurrence an integer convolution. Writing g = E[R]+1
("root count plus one") the full set is, for n >= 2 with C = Catalan,

    rt_n = sum_j rt_j rt_{n-j} + C_{n-1}                       (g)
    st_n = sum_j (st_j st_{n-j} + 2 rt_j rt_{n-j}) + C_{n-1}   (g^2)
    t_n  = 2 sum_j t_j C_{n-j-1} + r_n                         (total)
    vt_n = 2 sum_j vt_j rt_{n-j} + 2 sum_j t_j C_{n-j-1} + st_n - rt_n   (total*g)
    u_n  = 2 sum_j u_j C_{n-j-1} + 2 sum_j t_j t_{n-j} + 2 v_n - s_n     (total^2)

with r = rt - cat, s = st - 2r - cat, v = vt - t recovering the plain
moments. Yule model: the same identities hold with uniform split weights;
multiplying by (n-2)! turns them into integer recurrences over
h_n = (n-1)! E[.] with binomial and falling-factorial kernels.

Float mode runs the identical recurrences in the log domain (numpy
convolutions with max-factoring), since the raw values overflow doubles
long before the sizes where the asymptotic constants stabilize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError, TreeDomainError
from . import configs
from .numutil import log_fraction, pearson_from_exact
from .trees import catalan, enumerate_shapes
from .weights import UNIFORM, YULE, check_model, induced_distribution

DEFAULT_EXACT_CAP = 300
DEFAULT_FLOAT_CAP = 5000

_LOG2 = math.log(2.0)
_NEG_INF = float("-inf")

STATISTICS = ("r", "t", "r2", "tr", "t2")


# ---------------------------------------------------------------------------
# Exact integer sequences

@dataclass
class UniformSequences:
    """Catalan-weighted integer sequences; index n runs 1..n_max."""

    n_max: int
    cat: list    # C_{n-1}
    rt: list     # sum over plane trees of (root + 1)
    st: list     # ... of (root + 1)^2
    t: list      # ... of total
    vt: list     # ... of total * (root + 1)
    u: list      # ... of total^2

    def plain(self, name: str, n: int) -> int:
        """Unshifted sums: r, s = centered to R, v = total*root."""
        if name == "r":
            return self.rt[n] - self.cat[n]
        if name == "s":
            return self.st[n] - 2 * (self.rt[n] - self.cat[n]) - self.cat[n]
        if name == "v":
            return self.vt[n] - self.t[n]
        raise TreeDomainError("unknown plain sequence %r" % (name,))


def uniform_sequences(n_max: int) -> UniformSequences:
    cat = [0] * (n_max + 1)
    for n in range(1, n_max + 1):
        cat[n] = catalan(n - 1)
    rt = [0] * (n_max + 1)
    st = [0] * (n_max + 1)
    t = [0] * (n_max + 1)
    vt = [0] * (n_max + 1)
    u = [0] * (n_max + 1)
    rt[1] = 1
    st[1] = 1
    for n in range(2, n_max + 1):
        conv_rt = sum(rt[j] * rt[n - j] for j in range(1, n))
        conv_st = sum(st[j] * st[n - j] for j in range(1, n))
        conv_t_cat = sum(t[j] * cat[n - j] for j in range(1, n))
        conv_vt_rt = sum(vt[j] * rt[n - j] for j in range(1, n))
        conv_u_cat = sum(u[j] * cat[n - j] for j in range(1, n))
        conv_t_t = sum(t[j] * t[n - j] for j in range(1, n))
        rt[n] = conv_rt + cat[n]
        st[n] = conv_st + 2 * conv_rt + cat[n]
        r_n = rt[n] - cat[n]
        t[n] = 2 * conv_t_cat + r_n
        vt[n] = 2 * conv_vt_rt + 2 * conv_t_cat + st[n] - rt[n]
        v_n = vt[n] - t[n]
        s_n = st[n] - 2 * r_n - cat[n]
        u[n] = 2 * conv_u_cat + 2 * conv_t_t + 2 * v_n - s_n
    return UniformSequences(n_max, cat, rt, st, t, vt, u)


@dataclass
class YuleSequences:
    """Factorial-weighted integer sequences, h_n = (n-1)! E[.]."""

    n_max: int
    fact: list   # (n-1)!
    hr: list     # root
    hst: list    # (root + 1)^2
    ht: list     # total
    hv: list     # total * root
    hu: list     # total^2

    def plain(self, name: str, n: int) -> int:
        if name == "s":
            return self.hst[n] - 2 * self.hr[n] - self.fact[n]
        raise TreeDomainError("unknown plain sequence %r" % (name,))


def yule_sequences(n_max: int) -> YuleSequences:
    fact = [0] * (n_max + 1)
    for n in range(1, n_max + 1):
        fact[n] = math.factorial(n - 1)
    hr = [0] * (n_max + 1)
    hst = [0] * (n_max + 1)
    ht = [0] * (n_max + 1)
    hv = [0] * (n_max + 1)
    hu = [0] * (n_max + 1)
    hst[1] = 1
    for n in range(2, n_max + 1):
        binom = [0] + [math.comb(n - 2, j - 1) for j in range(1, n)]
        falling = [0] + [math.perm(n - 2, n - 1 - j) for j in range(1, n)]
        hrt = [hr[j] + fact[j] for j in range(n)]
        conv_r_r = sum(binom[j] * hr[j] * hr[n - j] for j in range(1, n))
        sum_r = sum(falling[j] * hr[j] for j in range(1, n))
        conv_st_st = sum(binom[j] * hst[j] * hst[n - j] for j in range(1, n))
        conv_rt_rt = sum(binom[j] * hrt[j] * hrt[n - j] for j in range(1, n))
        sum_t = sum(falling[j] * ht[j] for j in range(1, n))
        conv_v_r = sum(binom[j] * hv[j] * hr[n - j] for j in range(1, n))
        sum_v = sum(falling[j] * hv[j] for j in range(1, n))
        conv_t_r = sum(binom[j] * ht[j] * hr[n - j] for j in range(1, n))
        sum_u = sum(falling[j] * hu[j] for j in range(1, n))
        conv_t_t = sum(binom[j] * ht[j] * ht[n - j] for j in range(1, n))
        hr[n] = conv_r_r + 2 * sum_r + fact[n]
        hst[n] = conv_st_st + 2 * conv_rt_rt + fact[n]
        hs_n = hst[n] - 2 * hr[n] - fact[n]
        ht[n] = 2 * sum_t + hr[n]
        hv[n] = 2 * conv_v_r + 2 * sum_v + 2 * conv_t_r + 2 * sum_t + hs_n
        hu[n] = 2 * sum_u + 2 * conv_t_t + 2 * hv[n] - hs_n
    return YuleSequences(n_max, fact, hr, hst, ht, hv, hu)


# ---------------------------------------------------------------------------
# Tables

@dataclass
class MomentRow:
    n: int
    e_r: object
    e_t: object
    e_r2: object
    e_tr: object
    e_t2: object
    var_r: object
    var_t: object
    cov_tr: object
    rho_tr: object  # float or None when degenerate


@dataclass
class MomentTable:
    model: str
    mode: str                      # "exact" | "float"
    rows: list
    logs: dict                     # name -> list of log values (index = n)

    def row(self, n: int) -> MomentRow:
        return self.rows[n - 1]

    def sequence(self, stat: str) -> list:
        key = "e_" + stat
        return [getattr(row, key) for row in self.rows]

    def log_sequence(self, stat: str) -> list:
        """Log-domain moment sequence indexed from n=1; robust at any size."""
        key = "e_" + stat if not stat.startswith(("var", "cov", "e_")) else stat
        if key in self.logs:
            return self.logs[key][1:]
        raise TreeDomainError("no log sequence %r" % (stat,))


def _exact_logs(values) -> list:
    out = [_NEG_INF]
    for value in values:
        if value > 0:
            out.append(log_fraction(Fraction(value)))
        else:
            out.append(_NEG_INF)
    return out


def _rows_from_exact(model, e):
    rows = []
    n_max = len(e["r"])
    for i in range(n_max):
        e_r, e_t = e["r"][i], e["t"][i]
        e_r2, e_tr, e_t2 = e["r2"][i], e["tr"][i], e["t2"][i]
        var_r = e_r2 - e_r * e_r
        var_t = e_t2 - e_t * e_t
        cov = e_tr - e_t * e_r
        rho = pearson_from_exact(cov, var_t, var_r)
        rows.append(MomentRow(i + 1, e_r, e_t, e_r2, e_tr, e_t2, var_r, var_t, cov, rho))
    return rows


def _exact_table(model: str, n_max: int) -> MomentTable:
    e = {}
    if model == UNIFORM:
        seq = uniform_sequences(n_max)
        e["r"] = [Fraction(seq.plain("r", n), seq.cat[n]) for n in range(1, n_max + 1)]
        e["t"] = [Fraction(seq.t[n], seq.cat[n]) for n in range(1, n_max + 1)]
        e["r2"] = [Fraction(seq.plain("s", n), seq.cat[n]) for n in range(1, n_max + 1)]
        e["tr"] = [Fraction(seq.plain("v", n), seq.cat[n]) for n in range(1, n_max + 1)]
        e["t2"] = [Fraction(seq.u[n], seq.cat[n]) for n in range(1, n_max + 1)]
    else:
        seq = yule_sequences(n_max)
        e["r"] = [Fraction(seq.hr[n], seq.fact[n]) for n in range(1, n_max + 1)]
        e["t"] = [Fraction(seq.ht[n], seq.fact[n]) for n in range(1, n_max + 1)]
        e["r2"] = [Fraction(seq.plain("s", n), seq.fact[n]) for n in range(1, n_max + 1)]
        e["tr"] = [Fraction(seq.hv[n], seq.fact[n]) for n in range(1, n_max + 1)]
        e["t2"] = [Fraction(seq.hu[n], seq.fact[n]) for n in range(1, n_max + 1)]
    rows = _rows_from_exact(model, e)
    logs = {
        "e_" + stat: _exact_logs(e[stat]) for stat in STATISTICS
    }
    logs["var_t"] = [_NEG_INF] + [
        log_fraction(row.var_t) if row.var_t > 0 else _NEG_INF for row in rows
    ]
    logs["var_r"] = [_NEG_INF] + [
        log_fraction(row.var_r) if row.var_r > 0 else _NEG_INF for row in rows
    ]
    return MomentTable(model, "exact", rows, logs)


# ---------------------------------------------------------------------------
# Float (log-domain) engine

def _lconv(a, b, n):
    """log of sum_{j=1..n-1} exp(a_j) exp(b_{n-j})."""
    v = a[1:n] + b[n - 1:0:-1]
    m = v.max() if len(v) else _NEG_INF
    if m == _NEG_INF:
        return _NEG_INF
    with np.errstate(under="ignore"):
        return m + math.log(np.exp(v - m).sum())


def _lse(*values):
    m = max(values)
    if m == _NEG_INF:
        return _NEG_INF
    return m + math.log(sum(math.exp(v - m) for v in values))


def _lsub(a, b, *, slack=1e-9):
    """log(exp(a) - exp(b)); near-equal inputs collapse to -inf (exact zero)."""
    if b == _NEG_INF:
        return a
    if b >= a - slack:
        if b - a <= slack:
            return _NEG_INF
        raise ArithmeticError("log-subtraction of a larger value")
    return a + math.log1p(-math.exp(b - a))


def _log_catalan(n: int) -> float:
    # C_{n-1} = binom(2n-2, n-1) / n
    return math.lgamma(2 * n - 1) - 2 * math.lgamma(n) - math.log(n)


def _uniform_float_logs(n_max: int) -> dict:
    size = n_max + 1
    lcat = np.full(size, _NEG_INF)
    for n in range(1, size):
        lcat[n] = _log_catalan(n)
    lrt = np.full(size, _NEG_INF)
    lst = np.full(size, _NEG_INF)
    lt = np.full(size, _NEG_INF)
    lvt = np.full(size, _NEG_INF)
    lu = np.full(size, _NEG_INF)
    lr = np.full(size, _NEG_INF)
    ls = np.full(size, _NEG_INF)
    lv = np.full(size, _NEG_INF)
    lrt[1] = 0.0
    lst[1] = 0.0
    for n in range(2, size):
        conv_rt = _lconv(lrt, lrt, n)
        lrt[n] = _lse(conv_rt, lcat[n])
        lst[n] = _lse(_lconv(lst, lst, n), _LOG2 + conv_rt, lcat[n])
        lr[n] = _lsub(lrt[n], lcat[n])
        conv_t_cat = _lconv(lt, lcat, n)
        lt[n] = _lse(_LOG2 + conv_t_cat, lr[n])
        lvt[n] = _lse(
            _LOG2 + _lconv(lvt, lrt, n),
            _LOG2 + conv_t_cat,
            _lsub(lst[n], lrt[n]),
        )
        lv[n] = _lsub(lvt[n], lt[n])
        ls[n] = _lsub(lst[n], _lse(_LOG2 + lr[n], lcat[n]))
        lu[n] = _lse(
            _LOG2 + _lconv(lu, lcat, n),
            _LOG2 + _lconv(lt, lt, n),
            _lsub(_LOG2 + lv[n], ls[n]),
        )
    def normalized(arr):
        out = [_NEG_INF] * size
        for n in range(1, size):
            if arr[n] != _NEG_INF:
                out[n] = arr[n] - lcat[n]
        return out

    return {
        "e_r": normalized(lr),
        "e_t": normalized(lt),
        "e_r2": normalized(ls),
        "e_tr": normalized(lv),
        "e_t2": normalized(lu),
    }


def _yule_float_logs(n_max: int) -> dict:
    size = n_max + 1
    lone = np.zeros(size)
    lone[0] = _NEG_INF
    ler = np.full(size, _NEG_INF)
    lert = np.full(size, _NEG_INF)
    lest = np.full(size, _NEG_INF)
    les = np.full(size, _NEG_INF)
    let = np.full(size, _NEG_INF)
    lev = np.full(size, _NEG_INF)
    leu = np.full(size, _NEG_INF)
    lert[1] = 0.0
    lest[1] = 0.0
    for n in range(2, size):
        lw = math.log(n - 1)
        ler[n] = _lse(
            _lconv(ler, ler, n),
            _LOG2 + _lconv(ler, lone, n),
            lw,
        ) - lw
        lert[n] = _lse(ler[n], 0.0)
        lest[n] = _lse(
            _lconv(lest, lest, n),
            _LOG2 + _lconv(lert, lert, n),
            lw,
        ) - lw
        les[n] = _lsub(lest[n], _lse(_LOG2 + ler[n], 0.0))
        let[n] = _lse(_LOG2 + _lconv(let, lone, n), lw + ler[n]) - lw
        lev[n] = _lse(
            _LOG2 + _lconv(lev, ler, n),
            _LOG2 + _lconv(lev, lone, n),
            _LOG2 + _lconv(let, ler, n),
            _LOG2 + _lconv(let, lone, n),
            lw + les[n],
        ) - lw
        leu[n] = _lse(
            _LOG2 + _lconv(leu, lone, n),
            _LOG2 + _lconv(let, let, n),
            lw + _lsub(_LOG2 + lev[n], les[n]),
        ) - lw
    return {
        "e_r": list(ler),
        "e_t": list(let),
        "e_r2": list(les),
        "e_tr": list(lev),
        "e_t2": list(leu),
    }


def _signed_lsub(a, b, slack=1e-7):
    """(sign, log|exp(a) - exp(b)|); sign 0 when the two agree to slack."""
    if a == _NEG_INF and b == _NEG_INF:
        return 0, _NEG_INF
    if abs(a - b) <= slack:
        return 0, _NEG_INF
    if a > b:
        return 1, _lsub(a, b, slack=slack)
    return -1, _lsub(b, a, slack=slack)


def _float_table(model: str, n_max: int) -> MomentTable:
    logs = _uniform_float_logs(n_max) if model == UNIFORM else _yule_float_logs(n_max)
    logs["var_t"] = [_NEG_INF] * (n_max + 1)
    logs["var_r"] = [_NEG_INF] * (n_max + 1)
    logs["cov_tr"] = [_NEG_INF] * (n_max + 1)  # log |cov|; sign lives in the rows
    rows = []
    for n in range(1, n_max + 1):
        le_r, le_t = logs["e_r"][n], logs["e_t"][n]
        le_r2, le_tr, le_t2 = logs["e_r2"][n], logs["e_tr"][n], logs["e_t2"][n]
        _, lvar_t = _signed_lsub(le_t2, 2 * le_t)
        _, lvar_r = _signed_lsub(le_r2, 2 * le_r)
        cov_sign, lcov = _signed_lsub(le_tr, le_t + le_r)
        logs["var_t"][n] = lvar_t
        logs["var_r"][n] = lvar_r
        logs["cov_tr"][n] = lcov
        if lvar_t == _NEG_INF or lvar_r == _NEG_INF:
            rho = None
        else:
            rho = cov_sign * math.exp(lcov - 0.5 * (lvar_t + lvar_r))
        rows.append(MomentRow(
            n,
            _safe_exp(le_r), _safe_exp(le_t), _safe_exp(le_r2),
            _safe_exp(le_tr), _safe_exp(le_t2),
            _safe_exp(lvar_r), _safe_exp(lvar_t), cov_sign * _safe_exp(lcov),
            rho,
        ))
    return MomentTable(model, "float", rows, logs)


def _safe_exp(v: float) -> float:
    if v == _NEG_INF:
        return 0.0
    if v > 709.0:
        return math.inf
    return math.exp(v)


def uniform_moments(n_max: int, mode: str = "exact", cap: int | None = None) -> MomentTable:
    """Moment table for uniformly distributed plane trees (equivalently,
    uniformly distributed labeled topologies)."""
    return _moments(UNIFORM, n_max, mode, cap)


def yule_moments(n_max: int, mode: str = "exact", cap: int | None = None) -> MomentTable:
    """Moment table for uniformly distributed histories (equivalently,
    Yule-distributed labeled topologies)."""
    return _moments(YULE, n_max, mode, cap)


def _moments(model, n_max, mode, cap):
    check_model(model)
    if mode not in ("exact", "float"):
        raise TreeDomainError("mode must be 'exact' or 'float', got %r" % (mode,))
    if n_max < 1:
        raise TreeDomainError("n_max must be at least 1")
    limit = cap if cap is not None else (DEFAULT_EXACT_CAP if mode == "exact" else DEFAULT_FLOAT_CAP)
    if n_max > limit:
        raise CapacityError("%s mode capped at %d rows (asked %d)" % (mode, limit, n_max))
    if mode == "exact":
        return _exact_table(model, n_max)
    return _float_table(model, n_max)


# ---------------------------------------------------------------------------
# Independent enumeration oracle

def exhaustive_moments(n: int, model: str, statistic: str, cap: int = 16) -> Fraction:
    """Moment computed by brute enumeration over all shapes of size n.

    Statistics: 'r', 't', 'r2', 'tr', 't2'. Exact; the recurrences must
    reproduce these values identically.
    """
    check_model(model)
    if statistic not in STATISTICS:
        raise TreeDomainError("unknown statistic %r" % (statistic,))
    if n > cap:
        raise CapacityError("exhaustive moments capped at %d leaves (asked %d)" % (cap, n))
    total = Fraction(0)
    for shape, prob in induced_distribution(n, model).items():
        r = configs.root_configs(shape)
        t = configs.total_configs(shape)
        value = {"r": r, "t": t, "r2": r * r, "tr": t * r, "t2": t * t}[statistic]
        total += prob * value
    return total


# ---------------------------------------------------------------------------
# Tail estimation

@dataclass
class TailEstimate:
    value: float        # extrapolated limit
    diagnostic: float   # gap between the last two extrapolants
    plain: float        # last raw tail value, for trend checks


def _prepare_logs(values, log, first_n):
    """Strip the nonpositive head; return (ns, logs, raw-or-None)."""
    logs = []
    ns = []
    raw = []
    for i, v in enumerate(values):
        n = first_n + i
        if log:
            lv = float(v)
            if lv == _NEG_INF:
                logs.clear()
                ns.clear()
                continue
        else:
            if v is None or v <= 0:
                logs.clear()
                ns.clear()
                raw.clear()
                continue
            lv = log_fraction(v) if isinstance(v, Fraction) else math.log(v)
            raw.append(v)
        logs.append(lv)
        ns.append(n)
    return ns, logs, (raw if not log else None)


def _richardson(ns, xs, rounds=2):
    """Iterated Richardson extrapolation for expansions in powers of 1/n."""
    cur_ns = list(ns)
    cur = list(xs)
    for r in range(1, rounds + 1):
        nxt = []
        nxt_ns = []
        for i in range(1, len(cur)):
            n = cur_ns[i]
            nxt.append((n * cur[i] - (n - r) * cur[i - 1]) / r)
            nxt_ns.append(n)
        cur, cur_ns = nxt, nxt_ns
        if len(cur) < 2:
            break
    return cur


def estimate_exponential_order(values, *, log: bool = False, first_n: int = 1,
                               min_length: int = 50) -> TailEstimate:
    """Exponential order of a sequence from tail ratios a_{n+1}/a_n with
    second-order Richardson extrapolation.

    Ratios are formed in the input domain (plain division for linear
    input), so exactly geometric data yields the base exactly.
    """
    ns, logs, raw = _prepare_logs(values, log, first_n)
    if len(logs) < min_length:
        raise TreeDomainError(
            "need at least %d positive entries, have %d" % (min_length, len(logs))
        )
    if raw is not None:
        ratios = [float(raw[i + 1] / raw[i]) for i in range(len(raw) - 1)]
    else:
        ratios = [math.exp(logs[i + 1] - logs[i]) for i in range(len(logs) - 1)]
    ratio_ns = ns[1:]
    extr = _richardson(ratio_ns, ratios, rounds=2)
    return TailEstimate(extr[-1], abs(extr[-1] - extr[-2]), ratios[-1])


def estimate_subexp_constant(values, base: float, *, log: bool = False,
                             first_n: int = 1) -> TailEstimate:
    """Tail estimate of a_n / base^n, Richardson-extrapolated."""
    if base <= 0:
        raise TreeDomainError("base must be positive")
    ns, logs = _prepare_logs(values, log, first_n)
    if len(logs) < 3:
        raise TreeDomainError("need at least 3 positive entries")
    scaled = [math.exp(logs[i] - ns[i] * math.log(base)) for i in range(len(logs))]
    extr = _richardson(ns, scaled, rounds=2)
    if len(extr) < 2:
        return TailEstimate(scaled[-1], math.inf, scaled[-1])
    return TailEstimate(extr[-1], abs(extr[-1] - extr[-2]), scaled[-1])
