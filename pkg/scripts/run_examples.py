"""Run every builtin quantum connection and toy model through the analysis pipeline."""

import argparse
import json
import time
from dataclasses import dataclass
from pathlib import Path

from fconn.cli import pipeline_summary
from fconn.quantumex import EXAMPLE_IDS, PipelineOptions, analyze_example, analyze_pipeline
from fconn.toymodel import TOY_INPUTS, toy_q_inverted_connection


@dataclass
class Config:
    order: int = 12
    out: Path = None


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=Config.order)
    ap.add_argument("--out", type=Path, default=None, help="directory for the JSON reports")
    cfg = Config(**vars(ap.parse_args()))
    if cfg.out:
        cfg.out.mkdir(parents=True, exist_ok=True)
    jobs = [(eid, lambda eid=eid: analyze_example(eid, cfg.order)) for eid in EXAMPLE_IDS]
    for name, mk in TOY_INPUTS.items():
        inp = mk()
        jobs.append((f"toy_{name}", lambda inp=inp: analyze_pipeline(
            toy_q_inverted_connection(inp), PipelineOptions(order=cfg.order, dim=inp.complex_dimension))))
    for name, job in jobs:
        start = time.perf_counter()
        rep = job().to_json()
        elapsed = time.perf_counter() - start
        slopes = {c: [s["slope"] for s in n["slopes"]] for c, n in rep.get("newton", {}).items()}
        print(f"{name:22s} {elapsed:6.2f}s  {pipeline_summary(rep)}  slopes={slopes}"
              + (f"  errors={sorted(rep['errors'])}" if rep.get("errors") else ""))
        if cfg.out:
            (cfg.out / f"{name}.json").write_text(json.dumps(rep, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
