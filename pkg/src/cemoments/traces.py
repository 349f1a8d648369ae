"""Moments of traces over the upper-left M x M block of a COE matrix.

For power-sum observables p_lam(B) conj(p_mu(B)) the free block indices are
never summed numerically. Each z-factor t is an entry Z[i_t, i_{pi(t)}]
where pi is a fixed permutation of cycle type lam, so the column slot of
factor t and the row slot of factor pi(t) carry the same summed index; mu
plays the same role on the conjugate side. Overlaying those ties on a
diagram's delta pattern closes the external slots into disjoint index
cycles, and each cycle contributes a free sum over the block: a factor M.
The result is a truncated series in u = 1/(N+1) whose coefficients are
exact polynomials in M.

The final moment is a class function of (pi, pi'); any representative of
the cycle type gives the same series (there is a property test for that),
so the canonical consecutive-block permutation is used.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .algebra import MPolynomial, TruncatedSeries, _format_poly
from .partitions import (
    normalize_partition,
    partitions_no_ones_up_to_rank,
    permutation_of_type,
    rank,
    z_weight,
)
from .wick import get_diagram_sum


@dataclass(frozen=True)
class TraceMomentQuery:
    lam: tuple
    mu: tuple
    cap: int

    def __post_init__(self):
        object.__setattr__(self, "lam", normalize_partition(self.lam))
        object.__setattr__(self, "mu", normalize_partition(self.mu))
        if self.cap < sum(self.lam):
            raise ValueError(
                f"cap {self.cap} is below the leading order u^{sum(self.lam)}"
            )


@dataclass(frozen=True)
class TraceMomentResult:
    query: TraceMomentQuery
    series: TruncatedSeries
    selection_rule_zero: bool

    @property
    def n(self):
        return sum(self.query.lam)

    def value_at(self, N, M):
        if M > N:
            raise ValueError("block size M cannot exceed N")
        return self.series.eval_at(Fraction(1, N + 1), m=M)

    def format(self):
        if self.selection_rule_zero:
            return "0 (selection rule: |lambda| != |mu|)"
        pieces = []
        for k in range(self.n, self.query.cap + 1):
            poly = self.series.coefficient(k)
            u_txt = "u" if k == 1 else f"u^{k}"
            if isinstance(poly, Fraction) or not poly:
                pieces.append(("+", f"0{u_txt}"))
                continue
            body = str(poly)
            sign = "+"
            if body.startswith("-"):
                sign = "-"
                body = str(-poly)
            if "+" in body or "-" in body[1:]:
                pieces.append((sign, f"({body}){u_txt}"))
            else:
                pieces.append((sign, f"{body}{u_txt}"))
        if not pieces:
            return "0"
        sign, body = pieces[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self):
        data = {
            "lambda": list(self.query.lam),
            "mu": list(self.query.mu),
            "cap": self.query.cap,
            "series": [
                {
                    "u_power": k,
                    "M_poly": _poly_json(self.series.coefficient(k)),
                }
                for k in range(self.query.cap + 1)
            ],
        }
        if self.selection_rule_zero:
            data["selection_rule"] = "|lambda| != |mu| forces an exact zero"
        return data


def _poly_json(coeff):
    if isinstance(coeff, MPolynomial):
        return coeff.to_json()
    if coeff == 0:
        return []
    return [str(coeff)]


def _variable_ties(perm):
    """Involution on 2n slots tying col(z_f) to row(z_{perm(f)})."""
    ties = [0] * (2 * len(perm))
    for f, g in enumerate(perm):
        ties[2 * f + 1] = 2 * g
        ties[2 * g] = 2 * f + 1
    return ties


def index_cycle_count(pattern, varz, varbar):
    """Components of the union of pattern edges and variable ties.

    Every slot has exactly one edge of each kind, so components are simple
    cycles; each is one free block index, worth a factor M. The walk visits
    z-side slots in variable-tie pairs and hops across the conjugate side
    through the pattern and its inverse.
    """
    two_n = len(pattern)
    inv = [0] * two_n
    for s, w in enumerate(pattern):
        inv[w] = s
    visited = [False] * two_n
    cycles = 0
    for s in range(two_n):
        if visited[s]:
            continue
        cycles += 1
        cur = s
        while not visited[cur]:
            visited[cur] = True
            partner = varz[cur]
            visited[partner] = True
            cur = inv[varbar[pattern[partner]]]
    return cycles


def trace_moment(lam, mu, cap, workers=1):
    """Series for < p_lam(B) conj(p_mu(B)) > over the M x M block."""
    query = TraceMomentQuery(lam=tuple(lam), mu=tuple(mu), cap=cap)
    lam, mu = query.lam, query.mu
    n = sum(lam)
    if sum(mu) != n:
        # phase invariance: z and z-bar counts must match, term by term
        return TraceMomentResult(
            query=query,
            series=TruncatedSeries.zero(cap),
            selection_rule_zero=True,
        )
    varz = _variable_ties(permutation_of_type(lam, n))
    varbar = _variable_ties(permutation_of_type(mu, n))
    coeffs = [dict() for _ in range(cap + 1)]
    for vertex in partitions_no_ones_up_to_rank(cap - n):
        power = n + rank(vertex)
        weight = Fraction(-1, 2) ** len(vertex) / z_weight(vertex)
        ds = get_diagram_sum(1, n, vertex, workers=workers)
        for pattern, poly in ds.pattern_map.items():
            val = poly.eval_at(-1)
            if val == 0:
                continue
            k = index_cycle_count(pattern, varz, varbar)
            bucket = coeffs[power]
            bucket[k] = bucket.get(k, Fraction(0)) + weight * val
    terms = []
    for power, bucket in enumerate(coeffs):
        top = max(bucket) if bucket else 0
        poly = MPolynomial(
            bucket.get(j, Fraction(0)) for j in range(top + 1)
        )
        if poly.degree > power:
            raise AssertionError(
                "index cycles exceeded the series order; the M-degree bound "
                "deg <= k is violated"
            )
        if poly and poly.constant_term != 0:
            raise AssertionError("every term must carry at least one cycle")
        terms.append(poly)
    return TraceMomentResult(
        query=query,
        series=TruncatedSeries(cap, terms),
        selection_rule_zero=False,
    )


def _large_m_coefficients(series, n_start, xi_power=False):
    """Coefficients after substituting M = (1-u)/u (times xi, optionally).

    u^k M^j becomes u^(k-j) (1-u)^j, never a negative power here because
    coefficients at u^k have M-degree <= k. Entry m of the result is the
    u^m coefficient: a Fraction, or a tuple of Fraction by xi-power when
    xi_power is set.
    """
    cap = series.cap
    out = [dict() for _ in range(cap + 1)]
    for k in range(n_start, cap + 1):
        poly = series.coefficient(k)
        if isinstance(poly, Fraction):
            if poly != 0:
                raise AssertionError("bare rational coefficient in M-series")
            continue
        for j in range(0, poly.degree + 1):
            c = poly.coefficient(j)
            if c == 0:
                continue
            # expand u^(k-j) (1-u)^j
            for t in range(j + 1):
                m = k - j + t
                if m > cap:
                    break
                term = c * comb(j, t) * (-1) ** t
                key = j if xi_power else 0
                out[m][key] = out[m].get(key, Fraction(0)) + term
    return out


@dataclass(frozen=True)
class RegimeReport:
    regime: str
    leading: str
    indeterminate: bool
    cap: int
    final_below: int  # orders below this are untouchable by uncomputed terms


REGIMES = ("fixed-M", "M=N", "M=xiN")


def regime_asymptotics(lam, mu, regime, cap=None, workers=1):
    """Leading large-N behavior of the trace moment in one scaling regime.

    Uses only the computed truncation. For the substituted regimes (M=N and
    M=xiN) an uncomputed order k > cap could feed powers as low as
    u^(k - min(k, 2n)), so a leading term is only declared below the
    threshold cap+1-2n; otherwise the verdict is indeterminate at this cap.
    Fixed-M orders are never fed from above, so the first nonzero computed
    coefficient is always final.
    """
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}")
    lam = normalize_partition(lam)
    mu = normalize_partition(mu)
    n = sum(lam)
    if cap is None:
        cap = max(4, n + 1)
    result = trace_moment(lam, mu, cap, workers=workers)
    if result.selection_rule_zero:
        return RegimeReport(regime=regime, leading="0", indeterminate=False,
                            cap=cap, final_below=cap + 1)
    if regime == "fixed-M":
        for k in range(n, cap + 1):
            poly = result.series.coefficient(k)
            if isinstance(poly, MPolynomial) and poly:
                body = str(poly)
                if "+" in body or "-" in body[1:]:
                    body = f"({body})"
                tail = "/N" if k == 1 else f"/N^{k}"
                return RegimeReport(regime=regime, leading=body + tail,
                                    indeterminate=False, cap=cap,
                                    final_below=cap + 1)
        return RegimeReport(regime=regime,
                            leading="indeterminate at this cap",
                            indeterminate=True, cap=cap, final_below=cap + 1)
    threshold = max(0, cap + 1 - 2 * n)
    with_xi = regime == "M=xiN"
    subbed = _large_m_coefficients(result.series, n, xi_power=with_xi)
    for m in range(threshold):
        bucket = {k: v for k, v in subbed[m].items() if v != 0}
        if not bucket:
            continue
        if with_xi:
            top = max(bucket)
            body = _format_poly(
                [bucket.get(j, Fraction(0)) for j in range(top + 1)], "xi"
            )
            if "+" in body or "-" in body[1:]:
                body = f"({body})"
        else:
            body = str(bucket[0])
        if m == 0:
            leading = body
        elif m == 1:
            leading = f"{body}/N"
        else:
            leading = f"{body}/N^{m}"
        return RegimeReport(regime=regime, leading=leading,
                            indeterminate=False, cap=cap,
                            final_below=threshold)
    return RegimeReport(regime=regime, leading="indeterminate at this cap",
                        indeterminate=True, cap=cap, final_below=threshold)


def large_n_limit(lam, workers=1):
    """Constant term of the diagonal trace moment at full block size M = N.

    Substitutes M = (1-u)/u and reads the u^0 coefficient, computed at cap
    n+1 and recomputed at cap n+2; a disagreement means the truncation was
    too low and raises instead of guessing.
    """
    lam = normalize_partition(lam)
    n = sum(lam)

    def u0(cap):
        series = trace_moment(lam, lam, cap, workers=workers).series
        total = Fraction(0)
        for k in range(n, cap + 1):
            poly = series.coefficient(k)
            if isinstance(poly, MPolynomial):
                total += poly.coefficient(k)
        return total

    first = u0(n + 1)
    second = u0(n + 2)
    if first != second:
        raise ValueError(
            "constant term is not stable between caps "
            f"{n + 1} and {n + 2}: {first} vs {second}"
        )
    if first.denominator != 1:
        raise AssertionError(f"constant term {first} is not an integer")
    return int(first)
