"""Resumable region enumeration with an append-only JSON-lines checkpoint.

The file starts with a header record carrying a hash of the run
configuration.  Every batch of consecutive regions (in lineage order)
appends one record with the lineage range, a digest of the region
constraint sets and the running totals.  A resumed run validates the
header, drops a torn trailing line, and restarts enumeration just after
the last recorded lineage.
"""

from __future__ import annotations

import functools
import hashlib
import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .arrangement import iter_regions, reduce_iop
from .ehrhart import open_quasipolynomial, sum_quasipolynomials
from .errors import InsideOutError
from .gfun import Quasipolynomial, RationalGF, qp_to_gf
from .magic import MagicSpec, build_magic_iop

FORMAT_VERSION = 1


class CheckpointMismatch(InsideOutError):
    """The checkpoint file belongs to a different configuration or is corrupt."""


def config_hash(spec: MagicSpec, regions_only: bool, batch: int) -> str:
    cfg = {
        "format": FORMAT_VERSION,
        "n": spec.n,
        "variant": spec.variant,
        "regions_only": regions_only,
        "batch": batch,
    }
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def _dump(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def region_digest(regions) -> str:
    h = hashlib.sha256()
    for r in regions:
        h.update(r.lineage.encode())
        h.update(repr(r.polytope.canonical_key()).encode())
        h.update(b"\n")
    return h.hexdigest()


def read_checkpoint(path: str) -> tuple[dict | None, list[dict], int]:
    """``(header, batch_records, valid_bytes)``; a torn last line is ignored."""
    if not os.path.exists(path):
        return None, [], 0
    with open(path, "rb") as fh:
        data = fh.read()
    header, records, valid = None, [], 0
    pos = 0
    while pos < len(data):
        end = data.find(b"\n", pos)
        if end < 0:
            break
        try:
            rec = json.loads(data[pos:end])
        except ValueError:
            break
        if header is None:
            if rec.get("kind") != "header":
                raise CheckpointMismatch(f"{path}: first record is not a header")
            header = rec
        elif rec.get("kind") in ("batch", "done"):
            records.append(rec)
        pos = valid = end + 1
    return header, records, valid


@dataclass
class CheckpointSummary:
    spec: MagicSpec
    regions: int
    complete: bool
    last_lineage: str | None
    chain: str
    quasipolynomial: Quasipolynomial | None
    resumed_from: int = 0
    new_records: list = field(default_factory=list)

    @property
    def gf(self) -> RationalGF | None:
        if self.quasipolynomial is None:
            return None
        return qp_to_gf(self.quasipolynomial, start=1)


def run_checkpointed(
    spec: MagicSpec,
    path: str,
    batch: int = 64,
    max_regions: int | None = None,
    regions_only: bool = False,
    worker_budget: int = 1,
    extra: int = 1,
) -> CheckpointSummary:
    """Enumerate the regions of the magic inside-out polytope, checkpointing each batch.

    Unless ``regions_only`` is set, each batch also records the running sum
    of region quasipolynomials.  Stops after ``max_regions`` regions in
    total (across resumed runs) or when the enumeration is exhausted.
    """
    if batch < 1:
        raise ValueError("batch size must be positive")
    digest = config_hash(spec, regions_only, batch)
    header, records, valid = read_checkpoint(path)
    if header is not None and header.get("config") != digest:
        raise CheckpointMismatch(f"{path}: checkpoint was written by a different configuration")

    iop, emb = reduce_iop(build_magic_iop(spec))
    regions, last, chain = 0, None, ""
    qp = None if regions_only else Quasipolynomial.zero()
    done = False
    for rec in records:
        if rec["kind"] == "done":
            done = True
            continue
        regions, last, chain = rec["cumulative_regions"], rec["last"], rec["chain"]
        if not regions_only:
            qp = Quasipolynomial.from_record(rec["partial_sum"])
    summary = CheckpointSummary(spec, regions, done, last, chain, qp, resumed_from=regions)
    if done or (max_regions is not None and regions >= max_regions):
        return summary

    mode = "r+b" if header is not None else "wb"
    with open(path, mode) as fh:
        fh.truncate(valid)
        fh.seek(valid)

        def append(rec):
            line = _dump(rec)
            fh.write(line.encode() + b"\n")
            fh.flush()
            os.fsync(fh.fileno())
            summary.new_records.append(line)

        if header is None:
            append({
                "kind": "header",
                "config": digest,
                "n": spec.n,
                "variant": spec.variant,
                "regions_only": regions_only,
                "batch": batch,
                "hyperplanes": len(iop.hyperplanes),
                "reduced_dim": emb.reduced_dim,
                "modulus": emb.modulus,
            })
        pool = ProcessPoolExecutor(max_workers=worker_budget) if worker_budget > 1 else None
        try:
            index = sum(1 for r in records if r["kind"] == "batch")
            it = iter_regions(iop, after=last)
            exhausted = False
            while max_regions is None or regions < max_regions:
                want = batch if max_regions is None else min(batch, max_regions - regions)
                pending = list(itertools.islice(it, want))
                if pending:
                    rec = {
                        "kind": "batch",
                        "index": index,
                        "first": pending[0].lineage,
                        "last": pending[-1].lineage,
                        "regions": len(pending),
                        "digest": region_digest(pending),
                    }
                    regions += len(pending)
                    chain = hashlib.sha256((chain + rec["digest"]).encode()).hexdigest()
                    rec["cumulative_regions"] = regions
                    rec["chain"] = chain
                    if not regions_only:
                        polys = [r.polytope for r in pending]
                        fn = functools.partial(open_quasipolynomial, extra=extra)
                        qps = list(pool.map(fn, polys)) if pool else [fn(p) for p in polys]
                        part = sum_quasipolynomials(qps).restricted_to_multiples(emb.modulus)
                        qp = (qp + part).normalized()
                        rec["batch_sum"] = part.to_record()
                        rec["partial_sum"] = qp.to_record()
                    append(rec)
                    last = pending[-1].lineage
                    index += 1
                if len(pending) < want:
                    exhausted = True
                    break
            if exhausted:
                append({"kind": "done", "regions": regions, "chain": chain})
                done = True
        finally:
            if pool:
                pool.shutdown()
    summary.regions, summary.complete, summary.last_lineage = regions, done, last
    summary.chain, summary.quasipolynomial = chain, qp
    return summary
