"""Concrete runners behind the management commands.

Each runner turns library results into flat report records and counts them;
the commands only parse flags, pick defaults and write the report.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable

from . import CATALOG_DIR
from ._base_Runner import BaseRunner
from .constexpr import TABLE_NAMES, load_table, verify_table
from .identities import DEFAULT_SEED, run_identities
from .modpoly import get_polynomial, load_polynomials, verify_relation_qseries
from .qalg import get_group
from .rsseries import SeriesSpec, certify, select_series
from .specfun import PrecisionContext

# certify() wants this many digits above the requested agreement
CERTIFY_HEADROOM = 20


def _certify_one(spec: SeriesSpec, digits: int, guard: int, recheck_delta: int):
    ctx = PrecisionContext(digits + CERTIFY_HEADROOM, guard, recheck_delta)
    return certify(spec, digits, ctx)


class CertifyRunner(BaseRunner):
    command = "certify"
    title = "Certification"

    def run(
        self,
        ids: Iterable[str] | str,
        digits: int,
        *,
        jobs: int = 1,
        guard: int = 20,
        recheck_delta: int = 16,
        catalog_dir: Path | str = CATALOG_DIR,
    ) -> list[dict]:
        specs = select_series(ids, catalog_dir)
        self.log(f"Certifying {len(specs)} series to {digits} digits (jobs={jobs})", "🔎")
        if jobs > 1 and len(specs) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_certify_one, spec, digits, guard, recheck_delta) for spec in specs]
                reports = [future.result() for future in futures]
        else:
            reports = [_certify_one(spec, digits, guard, recheck_delta) for spec in specs]

        for spec, report in zip(specs, reports):
            record = report.to_dict()
            record["group"] = spec.group.name
            record["N"] = spec.N
            self.add_record(record, passed=report.passed)
            if report.derivation_flagged:
                self.log(f"{spec.id}: derivation flagged ({report.error or report.derivation_residual})", "⚠️")
        return self.records


class IdentityRunner(BaseRunner):
    command = "verify_identities"
    title = "Identity"

    def run(
        self,
        names: Iterable[str] | None,
        order: int,
        digits: int,
        *,
        guard: int = 20,
        recheck_delta: int = 16,
        seed: int = DEFAULT_SEED,
    ) -> list[dict]:
        ctx = PrecisionContext(digits, guard, recheck_delta)
        self.log(f"Verifying identities through O(q^{order}) at {digits} digits", "🔎")
        for result in run_identities(names, order, ctx, seed):
            record = {
                "name": result.name,
                "kind": result.kind,
                "order": order,
                "digits": digits,
                "passed": result.passed,
                "flagged": result.flagged,
                "detail": result.detail,
                "error": result.error,
            }
            self.add_record(
                record,
                passed=result.passed,
                flagged=result.flagged,
                error=bool(result.error) and not result.flagged,
            )
        return self.records

    @property
    def all_passed(self) -> bool:
        return super().all_passed and not self.counters["flagged"]


class ModpolyRunner(BaseRunner):
    command = "modpoly"
    title = "Modular Polynomial"

    def run(
        self,
        group: str | None,
        level: int | None,
        order: int,
        *,
        catalog_dir: Path | str = CATALOG_DIR,
    ) -> list[dict]:
        if group is not None and level is not None:
            polynomials = [get_polynomial(group, level, catalog_dir)]
        else:
            symbol = get_group(group).hauptmodul if group is not None else None
            polynomials = [
                p
                for key, p in load_polynomials(catalog_dir).items()
                if (symbol is None or key[0] == symbol) and (level is None or key[1] == level)
            ]
        self.log(f"Checking {len(polynomials)} modular polynomials through O(q^{order})", "🔎")
        for p in polynomials:
            passed = verify_relation_qseries(p, order)
            record = {
                "id": str(p),
                "group": p.group.name,
                "hauptmodul": p.group.hauptmodul,
                "level": p.level,
                "order": order,
                "terms": len(p.terms),
                "symmetric": p.symmetric,
                "passed": passed,
            }
            self.add_record(record, passed=passed)
        return self.records


class TableRunner(BaseRunner):
    command = "tables"
    title = "Value Table"

    def run(
        self,
        names: Iterable[str] | None,
        digits: int,
        *,
        guard: int = 20,
        recheck_delta: int = 16,
        catalog_dir: Path | str = CATALOG_DIR,
    ) -> list[dict]:
        ctx = PrecisionContext(digits, guard, recheck_delta)
        selected = list(names) if names else list(TABLE_NAMES)
        tables = [load_table(name, catalog_dir) for name in selected]
        for table in tables:
            self.log(f"Table {table.name}: {len(table.rows)} rows at {digits} digits", "🔎")
            report = verify_table(table, ctx)
            for row in report.rows:
                record = {"id": f"{table.name}:{row.function}({row.point})", "table": table.name, **vars(row)}
                self.add_record(record, passed=row.passed, flagged=row.flagged, error=bool(row.error) and not row.flagged)
        return self.records
