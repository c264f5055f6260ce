"""Output files.

Every file is written to a temporary file in its target directory
and then renamed over the target, so a killed run never leaves a
truncated file under a final name.  Floats are written with `repr`,
which round-trips exactly and makes reruns bitwise identical.

"""
import os
import tempfile
from typing import (  # noqa: F401
    Any,
    Iterable,
    List,
    Sequence,
)

import numpy as np

from .config import get_logger
from .convex_plasticity import (
    YieldSurface,
    in_K,
)
from .diagnostics import COLUMNS
from .tensors import (
    deviator,
    norm,
)


logger = get_logger()

SNAPSHOT_DIRECTORY = 'snapshots'


def _number(value):
    # type: (Any) -> str
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def atomic_write(path, text):
    # type: (str, str) -> None
    """Write text to path through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle, temporary = tempfile.mkstemp(
        dir=directory, prefix='.' + os.path.basename(path), suffix='.tmp',
    )
    try:
        with os.fdopen(handle, 'w') as fout:
            fout.write(text)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.remove(temporary)
        raise
    logger.debug('wrote %s', path)


def csv_text(header, rows):
    # type: (Sequence[str], Iterable[Sequence[Any]]) -> str
    lines = [','.join(header)]
    for row in rows:
        lines.append(','.join(_number(value) for value in row))
    return '\n'.join(lines) + '\n'


def snapshot_steps(n_steps, every):
    # type: (int, int) -> List[int]
    """The output steps: every `every`-th step, plus the first and last."""
    steps = list(range(0, n_steps + 1, every))
    if steps[-1] != n_steps:
        steps.append(n_steps)
    return steps


def _cell_average(grid, values):
    # type: (Any, np.ndarray) -> np.ndarray
    return np.asarray(values).reshape(grid.n_cells, 4).mean(axis=1)


def vtk_text(result, index):
    # type: (Any, int) -> str
    """A legacy VTK STRUCTURED_POINTS file of one state.

    Point data: displacement, homogenized and physical temperature.
    Cell data (averaged over the Gauss points): the deviatoric
    stress norm, the plastic strain norm, the dissipation, and
    whether every Gauss point is admissible.

    """
    grid = result.grid
    state = result.trajectory[index]
    displacement = state.u.reshape(grid.n_nodes, 2)
    temperature = result.temperature(index)
    admissible = in_K(state.stress, YieldSurface(result.cfg.flow.k))

    lines = [
        '# vtk DataFile Version 3.0',
        'thermoplast step {} t = {}'.format(state.step, _number(state.t)),
        'ASCII',
        'DATASET STRUCTURED_POINTS',
        'DIMENSIONS {} {} 1'.format(grid.nx + 1, grid.ny + 1),
        'ORIGIN 0 0 0',
        'SPACING {0} {0} 1'.format(_number(grid.h)),
        'POINT_DATA {}'.format(grid.n_nodes),
        'VECTORS displacement double',
    ]
    lines.extend(
        '{} {} 0'.format(_number(ux), _number(uy)) for ux, uy in displacement
    )
    for name, values in (('theta', state.theta),
                         ('temperature', temperature)):
        lines.append('SCALARS {} double 1'.format(name))
        lines.append('LOOKUP_TABLE default')
        lines.extend(_number(value) for value in values)

    lines.append('CELL_DATA {}'.format(grid.n_cells))
    cell_fields = (
        ('deviatoric_stress',
         _cell_average(grid, norm(deviator(state.stress)))),
        ('plastic_strain', _cell_average(grid, norm(state.eps_p))),
        ('dissipation', _cell_average(grid, state.dissipation)),
        ('admissible', _cell_average(grid, admissible.astype(float))),
    )
    for name, values in cell_fields:
        lines.append('SCALARS {} double 1'.format(name))
        lines.append('LOOKUP_TABLE default')
        lines.extend(_number(value) for value in values)
    return '\n'.join(lines) + '\n'


SNAPSHOT_COLUMNS = ('node', 'x', 'y', 'ux', 'uy', 'theta', 'temperature')


def snapshot_csv_text(result, index):
    # type: (Any, int) -> str
    grid = result.grid
    state = result.trajectory[index]
    displacement = state.u.reshape(grid.n_nodes, 2)
    temperature = result.temperature(index)
    rows = (
        (node, x, y, ux, uy, theta, temp)
        for node, ((x, y), (ux, uy), theta, temp) in enumerate(zip(
            grid.node_coordinates, displacement, state.theta, temperature,
        ))
    )
    return csv_text(SNAPSHOT_COLUMNS, rows)


def write_snapshots(result, output, every):
    # type: (Any, str, int) -> List[int]
    """Write the VTK and CSV snapshots of a (possibly partial) result.

    Returns:
        The steps written.

    """
    directory = os.path.join(output, SNAPSHOT_DIRECTORY)
    os.makedirs(directory, exist_ok=True)
    written = []
    last = len(result.trajectory) - 1
    for index in snapshot_steps(last, every):
        step = result.trajectory[index].step
        stem = os.path.join(directory, 'step_{:06d}'.format(step))
        atomic_write(stem + '.vtk', vtk_text(result, index))
        atomic_write(stem + '.csv', snapshot_csv_text(result, index))
        written.append(step)
    return written


def write_diagnostics(report, path, steps):
    # type: (Any, str, Sequence[int]) -> None
    """Write one diagnostics row per output step."""
    wanted = set(steps)
    rows = (
        [row[name] for name in COLUMNS]
        for row in report.rows if row['step'] in wanted
    )
    atomic_write(path, csv_text(COLUMNS, rows))


def write_cauchy(sweep, path, steps):
    # type: (Any, str, Sequence[int]) -> None
    """Write the Cauchy table of a sweep, one row per output step."""
    header = ['step', 't'] + [
        'lambda_{}_vs_{}'.format(_number(a), _number(b))
        for a, b in sweep.pairs
    ]
    rows = (
        [step, sweep.times[step]] + list(sweep.metrics[step])
        for step in steps
    )
    atomic_write(path, csv_text(header, rows))


def write_lift(result, path):
    # type: (Any, str) -> None
    """Write the boundary-lift trajectory, one row per step."""
    header = ['step', 't'] + [
        'node_{}'.format(node) for node in range(result.grid.n_nodes)
    ]
    dt = result.cfg.time.dt
    rows = (
        [step, step * dt] + list(values)
        for step, values in enumerate(result.theta_tilde)
    )
    atomic_write(path, csv_text(header, rows))
