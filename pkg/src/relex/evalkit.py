"""Quantitative evaluation: retrieval P/R/F1, text quality, correlation,
and diversity.

Text metrics share one tokenizer with the embedding backend (lowercase,
split on non-alphanumerics) so evaluation and scoring never drift apart.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .kgstore import Iri
from .patterns import ConnectionInstance
from .relevance import tokenize

BLEU_EPSILON = 1e-9
BLEU_MAX_ORDER = 4
ROUGE_BETA = 1.2
METEOR_FMEAN_WEIGHT = 10.0  # harmonic mean weighted 9:1 toward recall
METEOR_PENALTY_WEIGHT = 0.5
METEOR_PENALTY_POWER = 3
_METEOR_SEARCH_BUDGET = 200_000


class EvalError(Exception):
    pass


GoldKey = tuple[str, str, str]  # sorted entity pair + relationship type


def gold_key(e1: str, e2: str, relationship_type: str) -> GoldKey:
    a, b = sorted((e1, e2))
    return (a, b, relationship_type)


def connection_key(conn: ConnectionInstance) -> GoldKey:
    return gold_key(conn.entity1_id.value, conn.entity2_id.value, conn.relationship_type)


@dataclass
class GoldStandard:
    entries: set[GoldKey] = field(default_factory=set)
    references: dict[GoldKey, list[str]] = field(default_factory=dict)

    def add(self, e1: str, e2: str, relationship_type: str, reference: Optional[str] = None):
        key = gold_key(e1, e2, relationship_type)
        self.entries.add(key)
        if reference:
            self.references.setdefault(key, []).append(reference)


def _strip_brackets(token: str) -> str:
    if token.startswith("<") and token.endswith(">"):
        return token[1:-1]
    return token


def parse_gold_standard(source: str) -> GoldStandard:
    """`<e1> <e2> <type> TAB reference text` per line; repeated keys add
    references; '#' comments and blank lines ignored."""
    gold = GoldStandard()
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        head, sep, reference = line.partition("\t")
        fields = head.split()
        if len(fields) != 3:
            raise EvalError(f"gold line {lineno}: expected '<e1> <e2> <type>' before TAB")
        e1, e2, rtype = (_strip_brackets(f) for f in fields)
        gold.add(e1, e2, rtype, reference.strip() if sep else None)
    return gold


@dataclass
class MetricsReport:
    precision: float
    recall: float
    f1: float
    bleu: float
    rouge_l: float
    meteor: float
    spearman: float
    diversity_distinct1: float
    diversity_distinct2: float
    diversity_type_count: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "bleu": self.bleu,
            "rouge_l": self.rouge_l,
            "meteor": self.meteor,
            "spearman": self.spearman,
            "diversity_distinct1": self.diversity_distinct1,
            "diversity_distinct2": self.diversity_distinct2,
            "diversity_type_count": self.diversity_type_count,
        }

    def format_text(self) -> str:
        return "".join(f"{k}\t{v}\n" for k, v in self.to_dict().items())


# --- retrieval ---


def precision_recall_f1(
    retrieved: Sequence[ConnectionInstance], gold: GoldStandard
) -> tuple[float, float, float]:
    if not gold.entries:
        raise EvalError("empty gold standard")
    retrieved_keys = {connection_key(c) for c in retrieved}
    hits = len(retrieved_keys & gold.entries)
    p = hits / len(retrieved_keys) if retrieved_keys else 0.0
    r = hits / len(gold.entries)
    f1 = 2 * p * r / (p + r) if (p + r) > 0 else 0.0
    return (p, r, f1)


# --- text quality ---


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: Sequence[str], references: list[Sequence[str]]) -> float:
    """BLEU-4 with clipped counts and add-epsilon smoothing."""
    references = [r for r in references if r]
    if not candidate or not references:
        raise EvalError("bleu requires a non-empty candidate and at least one non-empty reference")
    log_sum = 0.0
    for n in range(1, BLEU_MAX_ORDER + 1):
        cand_counts = _ngrams(candidate, n)
        total = sum(cand_counts.values())
        clipped = 0
        if total:
            max_ref: Counter = Counter()
            for ref in references:
                for gram, count in _ngrams(ref, n).items():
                    max_ref[gram] = max(max_ref[gram], count)
            clipped = sum(min(count, max_ref[gram]) for gram, count in cand_counts.items())
        precision = clipped / total if total else 0.0
        log_sum += math.log(precision if precision > 0 else BLEU_EPSILON)
    c = len(candidate)
    r = min((len(ref) for ref in references), key=lambda l: (abs(l - c), l))
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    return bp * math.exp(log_sum / BLEU_MAX_ORDER)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        row = [0]
        for j, y in enumerate(b, start=1):
            row.append(prev[j - 1] + 1 if x == y else max(prev[j], row[j - 1]))
        prev = row
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> float:
    """LCS F-measure with beta = 1.2."""
    if not candidate or not reference:
        raise EvalError("rouge_l requires non-empty inputs")
    lcs = _lcs_length(candidate, reference)
    if lcs == 0:
        return 0.0
    p = lcs / len(candidate)
    r = lcs / len(reference)
    b2 = ROUGE_BETA**2
    return (1 + b2) * p * r / (r + b2 * p)


def _meteor_alignment(candidate: Sequence[str], reference: Sequence[str]) -> tuple[int, int]:
    """(matches, minimal chunk count) over exact-unigram alignments that
    maximize matches. Exact search with a node budget; greedy fallback."""
    cand_counts = Counter(candidate)
    ref_counts = Counter(reference)
    m = sum(min(cand_counts[t], ref_counts[t]) for t in cand_counts)
    if m == 0:
        return (0, 0)
    ref_positions: dict[str, list[int]] = {}
    for j, tok in enumerate(reference):
        ref_positions.setdefault(tok, []).append(j)

    best_chunks = m + 1
    budget = [_METEOR_SEARCH_BUDGET]
    used = [False] * len(reference)
    # remaining_possible[i] = max matches achievable from candidate position i,
    # ignoring reference availability (upper bound for pruning)
    suffix_counts: list[Counter] = [Counter() for _ in range(len(candidate) + 1)]
    for i in range(len(candidate) - 1, -1, -1):
        suffix_counts[i] = suffix_counts[i + 1].copy()
        suffix_counts[i][candidate[i]] += 1

    def upper_bound(i: int, avail: Counter) -> int:
        return sum(min(suffix_counts[i][t], avail[t]) for t in suffix_counts[i])

    avail = Counter(ref_counts)

    def rec(i: int, matched: int, chunks: int, prev_ref: int):
        nonlocal best_chunks
        if budget[0] <= 0 or chunks >= best_chunks:
            return
        budget[0] -= 1
        if matched + upper_bound(i, avail) < m:
            return
        if i == len(candidate):
            if matched == m:
                best_chunks = min(best_chunks, chunks)
            return
        tok = candidate[i]
        if avail[tok] > 0:
            # Prefer continuing the current chunk so good solutions are
            # found early and prune aggressively.
            positions = ref_positions[tok]
            ordered = sorted(
                (j for j in positions if not used[j]),
                key=lambda j: (j != prev_ref + 1, j),
            )
            for j in ordered:
                used[j] = True
                avail[tok] -= 1
                rec(i + 1, matched + 1, chunks + (0 if j == prev_ref + 1 else 1), j)
                avail[tok] += 1
                used[j] = False
        # Skipping this occurrence is only legal if enough matches remain.
        # An unmatched candidate token breaks chunk adjacency on the
        # candidate side, so the current chunk cannot continue past it.
        rec(i + 1, matched, chunks, -2)

    rec(0, 0, 0, -2)
    if best_chunks > m:
        # Budget exhausted before a full alignment: greedy left-to-right.
        best_chunks = _greedy_chunks(candidate, reference, ref_positions, m)
    return (m, best_chunks)


def _greedy_chunks(candidate, reference, ref_positions, m) -> int:
    used = [False] * len(reference)
    avail = Counter(Counter(reference))
    chunks = 0
    prev = -2
    matched = 0
    for tok in candidate:
        if matched >= m or avail[tok] <= 0:
            prev = -2
            continue
        free = [j for j in ref_positions.get(tok, []) if not used[j]]
        if not free:
            prev = -2
            continue
        j = min(free, key=lambda j: (j != prev + 1, j))
        used[j] = True
        avail[tok] -= 1
        chunks += 0 if j == prev + 1 else 1
        prev = j
        matched += 1
    return max(chunks, 1)


def meteor_lite(candidate: Sequence[str], reference: Sequence[str]) -> float:
    """Exact-match METEOR: Fmean weighted toward recall, chunk penalty."""
    if not candidate or not reference:
        raise EvalError("meteor_lite requires non-empty inputs")
    m, chunks = _meteor_alignment(candidate, reference)
    if m == 0:
        return 0.0
    p = m / len(candidate)
    r = m / len(reference)
    fmean = METEOR_FMEAN_WEIGHT * p * r / (r + (METEOR_FMEAN_WEIGHT - 1) * p)
    penalty = METEOR_PENALTY_WEIGHT * (chunks / m) ** METEOR_PENALTY_POWER
    return fmean * (1.0 - penalty)


# --- correlation and diversity ---


def _average_ranks(xs: Sequence[float]) -> np.ndarray:
    arr = np.asarray(xs, dtype=float)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=float)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation of average ranks."""
    if len(xs) != len(ys):
        raise EvalError("spearman requires equal-length sequences")
    if len(xs) < 2:
        raise EvalError("spearman requires at least 2 observations")
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        raise EvalError("spearman is undefined for constant input")
    rx = _average_ranks(xs)
    ry = _average_ranks(ys)
    return float(np.corrcoef(rx, ry)[0, 1])


def diversity(
    explanations: Sequence[str], connections: Sequence[ConnectionInstance]
) -> tuple[float, float, int]:
    """(distinct-unigram ratio, distinct-bigram ratio, relationship type count)."""
    tokens: list[str] = []
    for text in explanations:
        tokens.extend(tokenize(text))
    unigrams = list(_ngrams(tokens, 1).items())
    bigrams = list(_ngrams(tokens, 2).items())
    total1 = sum(c for _, c in unigrams)
    total2 = sum(c for _, c in bigrams)
    d1 = len(unigrams) / total1 if total1 else 0.0
    d2 = len(bigrams) / total2 if total2 else 0.0
    types = len({c.relationship_type for c in connections})
    return (d1, d2, types)


# --- full report ---


def evaluate_system(
    retrieved: Sequence[ConnectionInstance],
    explanations: Sequence[str],
    gold: GoldStandard,
    score_pairs: Optional[Sequence[tuple[float, float]]] = None,
) -> MetricsReport:
    """Assemble the full report.

    Text metrics are per-entry scores averaged over retrieved entries that
    have gold references (0 when none do); correlation comes from explicit
    (model score, relevance rating) pairs.
    """
    if len(retrieved) != len(explanations):
        raise EvalError("retrieved and explanations must align")
    p, r, f1 = precision_recall_f1(retrieved, gold)
    bleu_scores: list[float] = []
    rouge_scores: list[float] = []
    meteor_scores: list[float] = []
    for conn, text in zip(retrieved, explanations):
        refs = gold.references.get(connection_key(conn))
        if not refs:
            continue
        cand_tokens = tokenize(text)
        ref_tokens = [tokenize(ref) for ref in refs]
        ref_tokens = [rt for rt in ref_tokens if rt]
        if not cand_tokens or not ref_tokens:
            continue
        bleu_scores.append(bleu(cand_tokens, ref_tokens))
        rouge_scores.append(max(rouge_l(cand_tokens, rt) for rt in ref_tokens))
        meteor_scores.append(max(meteor_lite(cand_tokens, rt) for rt in ref_tokens))
    corr = 0.0
    if score_pairs:
        xs = [s for s, _ in score_pairs]
        ys = [rating for _, rating in score_pairs]
        try:
            corr = spearman(xs, ys)
        except EvalError:
            corr = 0.0
    d1, d2, type_count = diversity(explanations, retrieved)
    mean = lambda vals: sum(vals) / len(vals) if vals else 0.0
    return MetricsReport(
        precision=p,
        recall=r,
        f1=f1,
        bleu=mean(bleu_scores),
        rouge_l=mean(rouge_scores),
        meteor=mean(meteor_scores),
        spearman=corr,
        diversity_distinct1=d1,
        diversity_distinct2=d2,
        diversity_type_count=type_count,
    )
