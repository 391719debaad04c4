"""Relational telco schema and CSV persistence.

Four tables joined by billing ID (service requests join via customer ID):
subscribers, monthly billing, monthly usage, service requests. Monetary
amounts are integer cents so that file round-trips are exact.
"""

from __future__ import annotations

import csv
import datetime as dt
import os
from dataclasses import dataclass, field

from .months import Month

SEGMENTS = ("consumer", "sme")
SERVICE_TYPES = ("voice", "voice_broadband")


class DatasetFormatError(ValueError):
    """Raised for unreadable or invariant-violating table files."""


@dataclass
class SubscriberRecord:
    customer_id: str
    billing_id: str
    service_id: str
    segment: str
    service_type: str
    activation_date: dt.date
    customer_since: dt.date
    contract_period: int  # months
    price_start: int  # cents
    t_location: str
    hsbb_area: int  # 0/1
    termination_date: dt.date | None = None
    comeback_date: dt.date | None = None


@dataclass
class BillingMonthRecord:
    billing_id: str
    month: Month
    current_bill_amt: int
    last_bill_amt: int
    amt_2pay: int
    outstanding: int
    payment: int  # may be negative (reversals)
    credit_adj: int  # may be negative (credits)


@dataclass
class UsageMonthRecord:
    billing_id: str
    month: Month
    download_mb: float
    upload_mb: float
    voice_minutes: float
    voice_calls: int


@dataclass
class ServiceRequestRecord:
    customer_id: str
    request_date: dt.date
    request_code: str


@dataclass
class TelcoDataset:
    subscribers: list[SubscriberRecord] = field(default_factory=list)
    billing: list[BillingMonthRecord] = field(default_factory=list)
    usage: list[UsageMonthRecord] = field(default_factory=list)
    service_requests: list[ServiceRequestRecord] = field(default_factory=list)

    def covered_months(self) -> list[Month]:
        """Inclusive month span observed in the billing and usage tables."""
        months = {r.month for r in self.billing} | {r.month for r in self.usage}
        if not months:
            return []
        lo, hi = min(months), max(months)
        return [lo.plus(i) for i in range(hi.diff(lo) + 1)]


def check_integrity(dataset: TelcoDataset) -> None:
    """Validate cross-table referential integrity and per-record invariants."""
    billing_ids = {s.billing_id for s in dataset.subscribers}
    customer_ids = {s.customer_id for s in dataset.subscribers}
    for s in dataset.subscribers:
        if s.customer_since > s.activation_date:
            raise ValueError(f"{s.service_id}: customer_since after activation_date")
        if s.termination_date is not None and s.activation_date > s.termination_date:
            raise ValueError(f"{s.service_id}: activation after termination")
        if s.comeback_date is not None:
            if s.termination_date is None or s.comeback_date <= s.termination_date:
                raise ValueError(f"{s.service_id}: comeback without prior termination")
    for r in dataset.billing:
        if r.billing_id not in billing_ids:
            raise ValueError(f"billing row references unknown billing_id {r.billing_id}")
    for r in dataset.usage:
        if r.billing_id not in billing_ids:
            raise ValueError(f"usage row references unknown billing_id {r.billing_id}")
    for r in dataset.service_requests:
        if r.customer_id not in customer_ids:
            raise ValueError(f"service request references unknown customer_id {r.customer_id}")


# ---------------------------------------------------------------------------
# CSV round-trip
# ---------------------------------------------------------------------------

SUBSCRIBER_COLUMNS = [
    "customer_id", "billing_id", "service_id", "segment", "service_type",
    "activation_date", "customer_since", "contract_period", "price_start",
    "t_location", "hsbb_area", "termination_date", "comeback_date",
]
BILLING_COLUMNS = [
    "billing_id", "month", "current_bill_amt", "last_bill_amt", "amt_2pay",
    "outstanding", "payment", "credit_adj",
]
USAGE_COLUMNS = ["billing_id", "month", "download_mb", "upload_mb", "voice_minutes", "voice_calls"]
REQUEST_COLUMNS = ["customer_id", "request_date", "request_code"]

FILENAMES = {
    "subscribers": "subscribers.csv",
    "billing": "billing.csv",
    "usage": "usage.csv",
    "service_requests": "service_requests.csv",
}


def _date(d: dt.date | None) -> str:
    return d.isoformat() if d is not None else ""


def write_tables(dataset: TelcoDataset, directory: str) -> None:
    """Write the four tables as CSV, rows sorted by primary key.

    Output is byte-deterministic for a given dataset: fixed header order,
    sorted rows, LF line endings, UTF-8.
    """
    os.makedirs(directory, exist_ok=True)

    def _open(name):
        return open(os.path.join(directory, FILENAMES[name]), "w", encoding="utf-8", newline="")

    with _open("subscribers") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SUBSCRIBER_COLUMNS)
        for s in sorted(dataset.subscribers, key=lambda s: (s.customer_id, s.billing_id, s.service_id)):
            w.writerow([
                s.customer_id, s.billing_id, s.service_id, s.segment, s.service_type,
                s.activation_date.isoformat(), s.customer_since.isoformat(),
                s.contract_period, s.price_start, s.t_location, s.hsbb_area,
                _date(s.termination_date), _date(s.comeback_date),
            ])
    with _open("billing") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(BILLING_COLUMNS)
        for r in sorted(dataset.billing, key=lambda r: (r.billing_id, r.month)):
            w.writerow([r.billing_id, str(r.month), r.current_bill_amt, r.last_bill_amt,
                        r.amt_2pay, r.outstanding, r.payment, r.credit_adj])
    with _open("usage") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(USAGE_COLUMNS)
        for r in sorted(dataset.usage, key=lambda r: (r.billing_id, r.month)):
            w.writerow([r.billing_id, str(r.month), repr(float(r.download_mb)),
                        repr(float(r.upload_mb)), repr(float(r.voice_minutes)),
                        int(r.voice_calls)])
    with _open("service_requests") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(REQUEST_COLUMNS)
        for r in sorted(dataset.service_requests,
                        key=lambda r: (r.customer_id, r.request_date, r.request_code)):
            w.writerow([r.customer_id, r.request_date.isoformat(), r.request_code])


class _TableReader:
    """CSV reader that reports file name and line number on any defect."""

    def __init__(self, directory: str, name: str, columns: list[str]):
        self.path = os.path.join(directory, FILENAMES[name])
        self.columns = columns
        if not os.path.exists(self.path):
            raise DatasetFormatError(f"missing table file: {self.path}")

    def rows(self):
        with open(self.path, encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header != self.columns:
                raise DatasetFormatError(f"{self.path}:1: bad header {header!r}")
            for lineno, row in enumerate(reader, start=2):
                if len(row) != len(self.columns):
                    raise DatasetFormatError(
                        f"{self.path}:{lineno}: expected {len(self.columns)} fields, got {len(row)}")
                yield lineno, row

    def fail(self, lineno: int, message: str):
        raise DatasetFormatError(f"{self.path}:{lineno}: {message}")


def _parse_with(reader: _TableReader, lineno: int, parse, raw, what: str):
    try:
        return parse(raw)
    except (ValueError, TypeError):
        reader.fail(lineno, f"malformed {what}: {raw!r}")


def read_tables(directory: str) -> TelcoDataset:
    """Read the four tables, validating row-level invariants.

    Defective rows raise DatasetFormatError naming the file and line.
    """
    ds = TelcoDataset()

    r = _TableReader(directory, "subscribers", SUBSCRIBER_COLUMNS)
    for lineno, row in r.rows():
        (cust, bill, serv, segment, stype, act, since, period, price, loc, hsbb,
         term, back) = row
        if segment not in SEGMENTS:
            r.fail(lineno, f"unknown segment {segment!r}")
        if stype not in SERVICE_TYPES:
            r.fail(lineno, f"unknown service_type {stype!r}")
        rec = SubscriberRecord(
            cust, bill, serv, segment, stype,
            _parse_with(r, lineno, dt.date.fromisoformat, act, "activation_date"),
            _parse_with(r, lineno, dt.date.fromisoformat, since, "customer_since"),
            _parse_with(r, lineno, int, period, "contract_period"),
            _parse_with(r, lineno, int, price, "price_start"),
            loc,
            _parse_with(r, lineno, int, hsbb, "hsbb_area"),
            _parse_with(r, lineno, dt.date.fromisoformat, term, "termination_date") if term else None,
            _parse_with(r, lineno, dt.date.fromisoformat, back, "comeback_date") if back else None,
        )
        if rec.contract_period < 0:
            r.fail(lineno, f"negative contract_period {rec.contract_period}")
        if rec.price_start < 0:
            r.fail(lineno, f"negative price_start {rec.price_start}")
        ds.subscribers.append(rec)

    r = _TableReader(directory, "billing", BILLING_COLUMNS)
    seen: set[tuple[str, Month]] = set()
    for lineno, row in r.rows():
        month = _parse_with(r, lineno, Month.parse, row[1], "month")
        key = (row[0], month)
        if key in seen:
            r.fail(lineno, f"duplicate (billing_id, month) {row[0]}/{month}")
        seen.add(key)
        ints = [_parse_with(r, lineno, int, v, BILLING_COLUMNS[i + 2])
                for i, v in enumerate(row[2:])]
        if ints[0] < 0 or ints[1] < 0 or ints[2] < 0 or ints[3] < 0:
            r.fail(lineno, "negative bill amount")
        ds.billing.append(BillingMonthRecord(row[0], month, *ints))

    r = _TableReader(directory, "usage", USAGE_COLUMNS)
    seen = set()
    for lineno, row in r.rows():
        month = _parse_with(r, lineno, Month.parse, row[1], "month")
        key = (row[0], month)
        if key in seen:
            r.fail(lineno, f"duplicate (billing_id, month) {row[0]}/{month}")
        seen.add(key)
        dl = _parse_with(r, lineno, float, row[2], "download_mb")
        ul = _parse_with(r, lineno, float, row[3], "upload_mb")
        vmin = _parse_with(r, lineno, float, row[4], "voice_minutes")
        calls = _parse_with(r, lineno, int, row[5], "voice_calls")
        for name, value in (("download_mb", dl), ("upload_mb", ul),
                            ("voice_minutes", vmin), ("voice_calls", calls)):
            if not value >= 0 or value != value or value in (float("inf"),):
                r.fail(lineno, f"{name} must be finite and non-negative, got {value!r}")
        ds.usage.append(UsageMonthRecord(row[0], month, dl, ul, vmin, calls))

    r = _TableReader(directory, "service_requests", REQUEST_COLUMNS)
    for lineno, row in r.rows():
        ds.service_requests.append(ServiceRequestRecord(
            row[0], _parse_with(r, lineno, dt.date.fromisoformat, row[1], "request_date"), row[2]))

    return ds
