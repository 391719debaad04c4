"""Seeded synthetic telco dataset with a planted pre-churn usage decline.

Every subscriber's randomness comes from its own stream keyed by
(master seed, segment, record index), so generation order (and hence any
parallel scheduling across subscribers) cannot change the output. The
planted signal: a churner's download/upload volume drops over the three
months before the termination month, scaled by ``signal_strength``;
payments weaken and billing credits become more frequent over the same
months, but deliberately less sharply than usage.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .data import (BillingMonthRecord, ServiceRequestRecord, SubscriberRecord,
                   TelcoDataset, UsageMonthRecord)
from .months import Month, month_range

# decline ramp, keyed by whole months until the termination month
_RAMP = {0: 0.95, 1: 0.9, 2: 0.6, 3: 0.3}

_LOCATIONS = ["AJP", "TLS", "KLC", "PNG", "JBU", "MLK", "KTN", "SRW"]
_LOCATION_W = [0.22, 0.18, 0.15, 0.12, 0.10, 0.09, 0.08, 0.06]
_REQUEST_CODES = ["CMPLNT", "TECH", "BILLQ", "INFO", "RELOC"]
_PRICES = {  # cents
    ("consumer", "voice_broadband"): (4900, 6900, 8900, 12900),
    ("sme", "voice"): (3900, 5900, 8900, 11900),
    ("sme", "voice_broadband"): (9900, 14900, 19900, 24900),
}


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    n_consumers: int = 1500
    n_smes: int = 100  # 15:1 consumer:SME default
    churn_rate: float = 0.08
    winback_rate: float = 0.15
    months_start: Month = Month(2011, 1)
    months_end: Month = Month(2011, 12)
    signal_strength: float = 0.8

    def validate(self):
        if self.n_consumers < 0 or self.n_smes < 0 or self.n_consumers + self.n_smes == 0:
            raise ValueError("need a positive number of subscribers")
        for name in ("churn_rate", "winback_rate"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0, 1), got {v}")
        if not 0.0 <= self.signal_strength <= 1.0:
            raise ValueError(f"signal_strength must be in [0, 1], got {self.signal_strength}")
        if self.months_end < self.months_start:
            raise ValueError("empty months range")
        if self.months_end.diff(self.months_start) < 5:
            raise ValueError("months range must cover at least 6 months")


def _decline(rng_month_to_term: int, strength: float) -> float:
    return 1.0 - strength * _RAMP.get(rng_month_to_term, 0.0)


@dataclass
class _ServiceBlock:
    """Everything one subscriber record contributes, drawn from its own stream."""

    record: SubscriberRecord
    first_month: Month  # first month with table rows
    last_month: Month   # last month with table rows (termination month for churners)
    dl: dict[Month, float]
    ul: dict[Month, float]
    vmin: dict[Month, float]
    vcalls: dict[Month, int]
    charge: dict[Month, int]  # cents billed for this service per month
    requests: list[ServiceRequestRecord]
    # account-level dynamics, used only when this record leads its billing account
    pay_ratio: dict[Month, float]
    pay_reversal: dict[Month, bool]
    credit: dict[Month, int]
    first_last_bill: int


def _ids(segment: str, cust_idx: int, bill_idx: int, svc_idx: int) -> tuple[str, str, str]:
    tag = "C" if segment == "consumer" else "S"
    return (f"{tag}{cust_idx:07d}", f"B{tag}{bill_idx:07d}", f"SV{tag}{svc_idx:07d}")


def _owners(i: int) -> tuple[int, int]:
    """(customer index, billing index) for record i, by index arithmetic.

    Records with i % 16 == 9 join the previous record's billing account
    (multi-service accounts); billing leaders with i % 12 == 11 join the
    previous record's customer (multi-billing customers). The residues are
    chosen so attachment chains never exceed one hop.
    """
    if i % 16 == 9:
        return _owners(i - 1)[0], i - 1
    if i % 12 == 11 and i > 0:
        return _owners(i - 1)[0], i
    return i, i


def _build_service(cfg: GeneratorConfig, segment: str, idx: int,
                   term_set: frozenset[int], back_set: frozenset[int]) -> _ServiceBlock:
    rng = np.random.default_rng((cfg.seed, 0 if segment == "consumer" else 1, idx))
    cov_start, cov_end = cfg.months_start, cfg.months_end
    n_cov = cov_end.diff(cov_start) + 1

    is_churner = idx in term_set
    service_type = "voice_broadband" if segment == "consumer" else ("voice" if idx % 2 == 0 else "voice_broadband")
    has_data = service_type == "voice_broadband"

    # --- subscriber profile ---------------------------------------------
    if is_churner or rng.random() < 0.88:
        act_month = cov_start.plus(-int(rng.integers(1, 61)))
    else:
        act_month = cov_start.plus(int(rng.integers(0, n_cov - 1)))
    activation = act_month.day(int(rng.integers(1, 29)))
    since = activation.replace(day=1)
    since = Month.of(since).plus(-int(rng.integers(0, 37))).day(min(activation.day, 28))
    contract = int(rng.choice([0, 12, 24, 36], p=[0.25, 0.35, 0.30, 0.10]))
    price = int(rng.choice(_PRICES[(segment, service_type)]))
    location = str(rng.choice(_LOCATIONS, p=_LOCATION_W))
    hsbb = int(rng.random() < 0.45)

    term_month = None
    termination = comeback = None
    if is_churner:
        n_term = n_cov  # termination months span [cov_start+3, cov_end+3]
        term_month = cov_start.plus(3 + int(rng.integers(0, n_term)))
        termination = term_month.day(int(rng.integers(1, 29)))
        if idx in back_set:
            comeback = term_month.plus(int(rng.integers(2, 7))).day(int(rng.integers(1, 29)))

    record = SubscriberRecord(
        "", "", "", segment, service_type, activation, since, contract, price,
        location, hsbb, termination, comeback)  # ids filled in by caller

    # --- monthly usage ----------------------------------------------------
    first = max(cov_start, act_month)
    last = min(cov_end, term_month) if term_month is not None else cov_end
    months = month_range(first, last) if not last < first else []

    dl_base = float(np.exp(rng.normal(7.2, 0.55))) if has_data else 0.0
    ul_ratio = float(np.exp(rng.normal(np.log(0.15), 0.3)))
    vmin_base = float(np.exp(rng.normal(5.3, 0.6)))
    call_min = float(np.clip(rng.normal(3.2, 0.7), 1.5, 6.0))  # minutes per call

    n_m = len(months)
    noise = np.exp(rng.normal(0.0, 0.18, size=(3, n_m))) if n_m else np.empty((3, 0))
    pay_noise = np.clip(rng.normal(1.0, 0.05, size=n_m), 0.7, 1.3) if n_m else np.empty(0)
    reversal_draw = rng.random(n_m) if n_m else np.empty(0)
    credit_draw = rng.random(n_m) if n_m else np.empty(0)
    credit_amt = rng.integers(100, 3000, size=n_m) if n_m else np.empty(0, dtype=int)
    req_extra = rng.random(n_m) if n_m else np.empty(0)
    req_days = rng.integers(1, 29, size=n_m) if n_m else np.empty(0, dtype=int)
    req_codes = rng.integers(0, len(_REQUEST_CODES), size=n_m) if n_m else np.empty(0, dtype=int)
    first_last_bill = price + int(rng.integers(0, 2000))

    dl, ul, vmin, vcalls, charge = {}, {}, {}, {}, {}
    pay_ratio, pay_reversal, credit = {}, {}, {}
    requests: list[ServiceRequestRecord] = []
    for j, m in enumerate(months):
        k = term_month.diff(m) if term_month is not None else 99
        mult = _decline(k, cfg.signal_strength)
        voice_mult = _decline(k, 0.5 * cfg.signal_strength)
        dl_m = round(dl_base * mult * noise[0, j], 3)
        ul_m = round(dl_base * ul_ratio * mult * noise[1, j], 3)
        vm = round(vmin_base * voice_mult * noise[2, j], 1)
        dl[m], ul[m], vmin[m] = dl_m, ul_m, vm
        vcalls[m] = int(round(vm / call_min))
        charge[m] = price + int(dl_m * 1.2) + int(vm * 3)

        ratio = pay_noise[j] * (1.0 - 0.35 * cfg.signal_strength * _RAMP.get(k, 0.0))
        pay_ratio[m] = float(ratio)
        pay_reversal[m] = bool(reversal_draw[j] < 0.01)
        credit_p = 0.07 + 0.10 * cfg.signal_strength * _RAMP.get(k, 0.0)
        credit[m] = -int(credit_amt[j]) if credit_draw[j] < credit_p else 0

        # service requests: sparse, slightly elevated before termination
        req_p = 0.06 * (1.0 + 2.5 * cfg.signal_strength * _RAMP.get(k, 0.0))
        if req_extra[j] < req_p:
            requests.append(ServiceRequestRecord(
                "", m.day(int(req_days[j])), _REQUEST_CODES[int(req_codes[j])]))

    return _ServiceBlock(record, first, last, dl, ul, vmin, vcalls, charge,
                         requests, pay_ratio, pay_reversal, credit, first_last_bill)


def _choose(rng: np.random.Generator, n: int, k: int) -> frozenset[int]:
    if k <= 0:
        return frozenset()
    return frozenset(int(i) for i in rng.choice(n, size=min(k, n), replace=False))


def generate(config: GeneratorConfig) -> TelcoDataset:
    """Generate a dataset; a pure function of the config (seed included)."""
    config.validate()
    ds = TelcoDataset()
    for segment, n in (("consumer", config.n_consumers), ("sme", config.n_smes)):
        if n == 0:
            continue
        seg_code = 0 if segment == "consumer" else 1
        pick = np.random.default_rng((config.seed, seg_code, 0xC4A11))
        term_set = _choose(pick, n, int(round(n * config.churn_rate)))
        back_set = _choose(pick, len(term_set), int(round(len(term_set) * config.winback_rate)))
        # back_set indexes into the sorted churner list for determinism
        churners_sorted = sorted(term_set)
        back_ids = frozenset(churners_sorted[i] for i in back_set)

        blocks = [_build_service(config, segment, i, term_set, back_ids) for i in range(n)]
        _assemble(ds, segment, blocks)
    return ds


def _assemble(ds: TelcoDataset, segment: str, blocks: list[_ServiceBlock]) -> None:
    """Stitch per-service blocks into tables. Pure; draws no randomness."""
    n = len(blocks)
    members: dict[int, list[int]] = {}
    for i in range(n):
        cust, bill = _owners(i)
        blk = blocks[i]
        cust_id, bill_id, svc_id = _ids(segment, cust, bill, i)
        blk.record.customer_id = cust_id
        blk.record.billing_id = bill_id
        blk.record.service_id = svc_id
        ds.subscribers.append(blk.record)
        for req in blk.requests:
            ds.service_requests.append(dataclasses.replace(req, customer_id=cust_id))
        members.setdefault(bill, []).append(i)

    for bill, idxs in members.items():
        leader = blocks[idxs[0]]
        bill_id = blocks[idxs[0]].record.billing_id
        first = min(blocks[i].first_month for i in idxs)
        last = max(blocks[i].last_month for i in idxs)
        if last < first:
            continue
        prev_current = None
        prev_unpaid = 0
        for m in month_range(first, last):
            active = [blocks[i] for i in idxs if m in blocks[i].charge]
            if not active:
                continue
            current = sum(b.charge[m] for b in active)
            last_bill = prev_current if prev_current is not None else leader.first_last_bill
            outstanding = prev_unpaid
            amt_2pay = current + outstanding
            if leader.pay_reversal.get(m, False):
                payment = -int(amt_2pay * 0.1)
            else:
                payment = int(amt_2pay * leader.pay_ratio.get(m, 1.0))
            credit = sum(b.credit.get(m, 0) for b in active)
            ds.billing.append(BillingMonthRecord(
                bill_id, m, current, last_bill, amt_2pay, outstanding, payment, credit))
            ds.usage.append(UsageMonthRecord(
                bill_id, m,
                float(round(sum(b.dl[m] for b in active), 3)),
                float(round(sum(b.ul[m] for b in active), 3)),
                float(round(sum(b.vmin[m] for b in active), 1)),
                int(sum(b.vcalls[m] for b in active))))
            prev_current = current
            # credits reduce what carries over; never carry negative balances
            prev_unpaid = max(0, amt_2pay - payment + credit)

    ds.subscribers.sort(key=lambda s: (s.customer_id, s.billing_id, s.service_id))
    ds.billing.sort(key=lambda r: (r.billing_id, r.month))
    ds.usage.sort(key=lambda r: (r.billing_id, r.month))
    ds.service_requests.sort(key=lambda r: (r.customer_id, r.request_date, r.request_code))
