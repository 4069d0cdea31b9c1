"""JSON instance and bid files.

Instance file::

    {"advertisers": [{"id": "a1", "capacity": 2}, ...],
     "batches": [[{"id": "i1", "weights": {"a1": 4.0}, "exchange": 0.9}, ...], ...],
     "bids": "bids.json",          # optional, unknown-exchange mode
     "meta": {...}}                # optional, generator provenance

Omitting ``"exchange"`` on every impression marks the instance unknown-exchange. A bid
file maps impression id -> list of bids; a relative ``"bids"`` path is resolved against
the instance file's directory.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .model import Advertiser, Impression, Instance


def instance_from_dict(doc: dict) -> Instance:
    advertisers = [Advertiser(str(a["id"]), a["capacity"]) for a in doc.get("advertisers", [])]
    batches = []
    for batch in doc.get("batches", []):
        imps = []
        for imp in batch:
            weights = {str(k): float(v) if isinstance(v, int) else v for k, v in imp.get("weights", {}).items()}
            ex = imp.get("exchange")
            imps.append(Impression(str(imp["id"]), weights, float(ex) if isinstance(ex, int) else ex))
        batches.append(tuple(imps))
    return Instance(advertisers, batches, dict(doc.get("meta", {})))


def instance_to_dict(inst: Instance, bids_ref: Optional[str] = None) -> dict:
    doc: dict = {
        "advertisers": [{"id": a.id, "capacity": a.capacity} for a in inst.advertisers],
        "batches": [
            [
                {"id": imp.id, "weights": dict(imp.weights),
                 **({} if imp.exchange_weight is None else {"exchange": imp.exchange_weight})}
                for imp in batch
            ]
            for batch in inst.batches
        ],
    }
    if bids_ref is not None:
        doc["bids"] = bids_ref
    if inst.meta:
        doc["meta"] = dict(inst.meta)
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_instance(path) -> Tuple[Instance, Optional[Path]]:
    """Read an instance file; also returns the referenced bid file path, if any."""
    path = Path(path)
    doc = json.loads(path.read_text())
    bids = doc.get("bids")
    bids_path = None
    if bids is not None:
        bids_path = Path(bids)
        if not bids_path.is_absolute():
            bids_path = path.parent / bids_path
    return instance_from_dict(doc), bids_path


def save_instance(inst: Instance, path, bids_ref: Optional[str] = None) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst, bids_ref)))


def load_bids(path) -> Dict[str, List[float]]:
    doc = json.loads(Path(path).read_text())
    return {str(k): [float(b) for b in v] for k, v in doc.items()}


def save_bids(profile: Dict[str, List[float]], path) -> None:
    Path(path).write_text(dumps(profile))
