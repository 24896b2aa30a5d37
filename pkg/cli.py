"""
Command Line Interface
solve / gen / oracle / bench / dominance commands; also mounted on the
Flask app as `flask ccp ...`
"""

import json
import sys
from pathlib import Path

import click

from config.logging_config import configure_logging
from config.settings import get_settings
from models.instance_io import load_instance, save_instance
from models.solver_config import (BRANCH_RULES, BRANCHING, CUTS, FORMULATIONS, NODE_SELECT, PROPAGATION,
                                  SolveStatus, SolverConfig, preset, preset_names, replay)
from services.bc_engine import BranchAndCutSolver
from services.bench_runner import run_bench
from services.instance_generator import FAMILIES, GenSpec, instance_generator
from services.oracle import ORACLE_MAX_N, brute_force_optimum
from services.preprocess import build_dominance_graph, dump_dominance
from utils.errors import CcpError
from utils.helpers import to_jsonable

EXIT_OPTIMAL = 0
EXIT_LIMIT = 2
EXIT_INFEASIBLE = 3
EXIT_INPUT = 10

EXIT_CODES = {
    SolveStatus.OPTIMAL: EXIT_OPTIMAL,
    SolveStatus.INFEASIBLE: EXIT_INFEASIBLE,
    SolveStatus.TIME_LIMIT: EXIT_LIMIT,
    SolveStatus.NODE_LIMIT: EXIT_LIMIT,
    SolveStatus.GAP_LIMIT: EXIT_LIMIT,
}


def _fail(message: str) -> None:
    click.echo(f'error: {message}', err=True)
    sys.exit(EXIT_INPUT)


@click.group('ccp')
@click.option('--log-level', default=None, help='Override CCP_LOG_LEVEL.')
def ccp_cli(log_level):
    """Branch-and-cut for chance-constrained programs."""
    configure_logging(log_level or get_settings().log_level)


@ccp_cli.command('solve')
@click.argument('instance_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--preset', 'preset_name', type=click.Choice(preset_names()), default=None)
@click.option('--branching', type=click.Choice(BRANCHING), default=None)
@click.option('--propagation', type=click.Choice(PROPAGATION), default=None)
@click.option('--cuts', type=click.Choice(CUTS), default=None)
@click.option('--node-select', type=click.Choice(NODE_SELECT), default=None)
@click.option('--branch-rule', type=click.Choice(BRANCH_RULES), default=None)
@click.option('--formulation', type=click.Choice(FORMULATIONS), default=None)
@click.option('--time-limit', type=float, default=None)
@click.option('--node-limit', type=int, default=None)
@click.option('--gap-limit', type=float, default=None, help='Relative gap in percent.')
@click.option('--replay-figure', type=click.IntRange(1, 3), default=None)
@click.option('--incumbent', type=float, default=None, help='Objective value injected at the root.')
@click.option('--trace', 'trace_file', type=click.Path(dir_okay=False), default=None)
@click.option('--dump-lp', 'lp_file', type=click.Path(dir_okay=False), default=None,
              help='Write the root master LP in MPS layout.')
@click.option('--json', 'as_json', is_flag=True, help='Print the full report as JSON.')
def solve_command(instance_file, preset_name, branching, propagation, cuts, node_select, branch_rule,
                  formulation, time_limit, node_limit, gap_limit, replay_figure, incumbent, trace_file, lp_file,
                  as_json):
    """Solve INSTANCE_FILE and print the report."""
    overrides = {
        key: value for key, value in dict(
            branching=branching, propagation=propagation, cuts=cuts, node_select=node_select,
            branch_rule=branch_rule, formulation=formulation, time_limit=time_limit,
            node_limit=node_limit, gap_limit=gap_limit,
        ).items() if value is not None
    }
    if trace_file:
        overrides['trace'] = True
    try:
        inst = load_instance(instance_file)
        if replay_figure is not None:
            if incumbent is None:
                if inst.n > ORACLE_MAX_N:
                    _fail('replay needs --incumbent for instances beyond the oracle size')
                incumbent = brute_force_optimum(inst).objective
            cfg = replay(replay_figure, incumbent, **overrides)
        elif preset_name is not None:
            cfg = preset(preset_name, initial_incumbent=incumbent, **overrides)
        else:
            cfg = SolverConfig(initial_incumbent=incumbent, **overrides).validate()
        solver = BranchAndCutSolver(inst, cfg)
        if lp_file:
            Path(lp_file).write_text(solver.master.lp.to_mps(), encoding='utf-8')
        report = solver.solve()
    except CcpError as e:
        _fail(str(e))

    if trace_file:
        Path(trace_file).write_text('\n'.join(report.trace_lines()) + '\n', encoding='utf-8')
    if as_json:
        click.echo(json.dumps(to_jsonable(report.to_dict()), indent=2))
    else:
        click.echo(f'status      {report.status.value}')
        click.echo(f'objective   {report.primal_bound:.10g}')
        click.echo(f'dual bound  {report.dual_bound:.10g}')
        click.echo(f'nodes       {report.nodes_explored}')
        click.echo(f'time        {report.wall_time:.3f}s')
        if report.incumbent is not None:
            click.echo(f'x           {" ".join(f"{t:.6g}" for t in report.incumbent.x)}')
            click.echo(f'violated    {" ".join(str(i) for i, z in enumerate(report.incumbent.z) if z > 0.5)}')
    sys.exit(EXIT_CODES[report.status])


@ccp_cli.command('gen')
@click.argument('family', type=click.Choice(FAMILIES))
@click.option('--n', 'n', type=int, required=True, help='Number of scenarios.')
@click.option('--eps', 'epsilon', required=True, help='Risk level as NUM/DEN.')
@click.option('--seed', type=int, default=0)
@click.option('--periods', '-T', type=int, default=None)
@click.option('--resources', type=int, default=None)
@click.option('--customers', type=int, default=None)
@click.option('-o', '--output', type=click.Path(dir_okay=False), required=True)
def gen_command(family, n, epsilon, seed, periods, resources, customers, output):
    """Generate a FAMILY instance and write it to --output."""
    try:
        spec = GenSpec(family=family, n=n, epsilon=epsilon, seed=seed, periods=periods,
                       resources=resources, customers=customers).validate()
        path = save_instance(instance_generator.generate(spec), output)
    except CcpError as e:
        _fail(str(e))
    click.echo(f'wrote {path}')


@ccp_cli.command('oracle')
@click.argument('instance_file', type=click.Path(exists=True, dir_okay=False))
def oracle_command(instance_file):
    """Brute-force optimum of a small instance."""
    try:
        result = brute_force_optimum(load_instance(instance_file))
    except CcpError as e:
        _fail(str(e))
    if result.status != 'OPTIMAL':
        click.echo(f'status      {result.status}')
        sys.exit(EXIT_INFEASIBLE)
    click.echo(f'objective   {result.objective:.10g}')
    click.echo(f'support     {" ".join(str(i) for i in result.support)}')
    click.echo(f'supports    {result.feasible_supports} feasible, {result.maximal_supports} maximal')
    sys.exit(EXIT_OPTIMAL)


@ccp_cli.command('bench')
@click.argument('directory', type=click.Path(exists=True, file_okay=False))
@click.option('--configs', default='bc+mix,db,db+opf', help='Comma-separated preset labels.')
@click.option('--out', type=click.Path(dir_okay=False), required=True)
@click.option('--time-limit', type=float, default=None)
@click.option('--node-limit', type=int, default=None)
@click.option('--workers', type=int, default=None)
def bench_command(directory, configs, out, time_limit, node_limit, workers):
    """Run every preset in --configs on every instance in DIRECTORY."""
    labels = [label.strip() for label in configs.split(',') if label.strip()]
    unknown = [label for label in labels if label not in preset_names()]
    if unknown:
        _fail(f'unknown presets: {", ".join(unknown)}')
    rows, summary = run_bench(directory, labels, time_limit, node_limit, workers, out)
    for entry in summary:
        click.echo(f'{entry.config:<14} solved {entry.solved}/{entry.instances}  '
                   f'time {entry.time_sgm:.3f}s  nodes {entry.nodes_sgm:.1f}')
    click.echo(f'wrote {len(rows)} rows to {out}')


@ccp_cli.command('dominance')
@click.argument('instance_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--raw', is_flag=True, help='Use the unstrengthened scenarios.')
def dominance_command(instance_file, raw):
    """Print the dominance edge list with %DP and %NDI."""
    try:
        graph = build_dominance_graph(load_instance(instance_file), use_bar=not raw)
    except CcpError as e:
        _fail(str(e))
    click.echo(dump_dominance(graph), nl=False)


if __name__ == '__main__':
    ccp_cli()
