"""
Benchmark Harness
Runs instance x configuration grids, writes one CSV row per run and
summarizes each configuration with shifted geometric means
"""

import concurrent.futures as futures
import csv
import logging
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from config.settings import get_settings
from models.instance_io import load_instance
from models.solver_config import preset
from services.bc_engine import BranchAndCutSolver
from services.preprocess import build_dominance_graph, dominance_statistics
from utils.helpers import shifted_geometric_mean

logger = logging.getLogger(__name__)

TIME_SHIFT = 1.0
NODE_SHIFT = 100.0


@dataclass
class BenchRow:
    instance: str
    config: str
    status: str
    time: float = math.nan
    nodes: int = 0
    fixings: float = 0.0
    pruned_overlap: int = 0
    propagation_time: float = 0.0
    gap: float = math.inf
    objective: float = math.nan
    root_bound: float = math.nan
    cuts: int = 0
    pct_dp: float = 0.0
    pct_ndi: float = 0.0
    error: str = ''

    @property
    def solved(self) -> bool:
        return self.status == 'OPTIMAL'


@dataclass
class BenchSummary:
    config: str
    instances: int
    solved: int
    time_sgm: float
    nodes_sgm: float


def _run_one(path: str, label: str, time_limit: float, node_limit: int) -> BenchRow:
    """Worker entry point; every failure becomes an ERROR row"""
    name = Path(path).stem
    try:
        inst = load_instance(path)
        cfg = preset(label, time_limit=time_limit, node_limit=node_limit)
        solver = BranchAndCutSolver(inst, cfg)
        stats = dominance_statistics(build_dominance_graph(inst, solver.qb, use_bar=True))
        report = solver.solve()
    except Exception as e:
        logger.warning('bench run %s / %s failed: %s', name, label, e)
        return BenchRow(instance=name, config=label, status='ERROR', error=str(e))
    return BenchRow(
        instance=inst.name,
        config=label,
        status=report.status.value,
        time=report.wall_time,
        nodes=report.nodes_explored,
        fixings=report.fixings_per_node,
        pruned_overlap=report.nodes_pruned.get('overlap', 0),
        propagation_time=report.propagation_time,
        gap=report.gap,
        objective=report.primal_bound,
        root_bound=report.root_bound if report.root_bound is not None else math.nan,
        cuts=report.cuts_added,
        pct_dp=stats['pct_dp'],
        pct_ndi=stats['pct_ndi'],
    )


def summarize(rows: Iterable[BenchRow]) -> List[BenchSummary]:
    by_config: Dict[str, List[BenchRow]] = {}
    for row in rows:
        by_config.setdefault(row.config, []).append(row)
    summary = []
    for label, group in by_config.items():
        finished = [r for r in group if r.status != 'ERROR']
        summary.append(BenchSummary(
            config=label,
            instances=len(group),
            solved=sum(r.solved for r in group),
            time_sgm=shifted_geometric_mean([r.time for r in finished], TIME_SHIFT),
            nodes_sgm=shifted_geometric_mean([r.nodes for r in finished], NODE_SHIFT),
        ))
    return summary


def write_csv(path: Union[str, Path], rows: Sequence[BenchRow], summary: Sequence[BenchSummary]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = [f.name for f in fields(BenchRow)]
    with path.open('w', newline='') as handle:
        writer = csv.DictWriter(handle, fieldnames=names, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow(asdict(row))
    summary_path = path.with_name(path.stem + '_summary.csv')
    with summary_path.open('w', newline='') as handle:
        writer = csv.DictWriter(handle, fieldnames=[f.name for f in fields(BenchSummary)], lineterminator='\n')
        writer.writeheader()
        for entry in summary:
            writer.writerow(asdict(entry))


def run_bench(directory: Union[str, Path], configs: Sequence[str], time_limit: Optional[float] = None,
              node_limit: Optional[int] = None, workers: Optional[int] = None,
              out: Optional[Union[str, Path]] = None) -> Tuple[List[BenchRow], List[BenchSummary]]:
    settings = get_settings()
    time_limit = time_limit or settings.time_limit
    node_limit = node_limit or settings.node_limit
    workers = workers or settings.bench_workers
    paths = sorted(str(p) for p in Path(directory).glob('*.json'))
    jobs = [(path, label) for path in paths for label in configs]
    logger.info('bench: %d instances x %d configs on %d worker(s)', len(paths), len(configs), workers)

    if workers > 1 and jobs:
        with futures.ProcessPoolExecutor(max_workers=workers) as pool:
            pending = [pool.submit(_run_one, path, label, time_limit, node_limit) for path, label in jobs]
            rows = [job.result() for job in pending]
    else:
        rows = [_run_one(path, label, time_limit, node_limit) for path, label in jobs]

    summary = summarize(rows)
    if out is not None:
        write_csv(out, rows, summary)
    return rows, summary
