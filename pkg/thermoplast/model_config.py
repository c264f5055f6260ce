"""The model configuration: what is simulated.

A model configuration file is a list of `section.key = value`
lines.  Everything after a `#` is a comment, and blank lines are
ignored.  An optional `scenario = <name>` line applies the overrides
of a built-in scenario (see `scenarios.SCENARIOS`) before the
explicit keys, regardless of where it appears.  Every key has a
default; see README.md for the full list.

"""
from collections import OrderedDict
from dataclasses import (
    dataclass,
    field,
)
import math
from typing import (  # noqa: F401
    Any,
    Callable,
    Dict,
    Optional,
    Tuple,
)

from .coupled_solver import (
    F_KINDS,
    ThermalStressFunction,
)
from .errors import (
    AlphaWindowError,
    ConfigSyntaxError,
    DuplicateKeyError,
    InvalidValueError,
    MissingKeyError,
    NonPositiveParameterError,
    UnknownKeyError,
)
from .expression import compile_expression
from .grid_fem import Grid
from .scenarios import (
    FLUX_KINDS,
    FORCE_KINDS,
    SCENARIOS,
    TEMPERATURE_KINDS,
    BodyForceSpec,
    BoundaryFluxSpec,
    InitialTemperatureSpec,
)
from .tensors import ElasticityTensor
from .thermal_lift import step_count


@dataclass(frozen=True)
class GridSpec(object):
    nx: int = 16
    ny: int = 16
    lx: float = 1.0
    ly: float = 1.0

    def build(self):
        # type: () -> Grid
        return Grid(self.nx, self.ny, self.lx, self.ly)


@dataclass(frozen=True)
class MaterialSpec(object):
    lame_first: float = 1.0
    lame_second: float = 1.0

    def build(self):
        # type: () -> ElasticityTensor
        return ElasticityTensor(self.lame_first, self.lame_second)


@dataclass(frozen=True)
class FlowSpec(object):
    k: float = 1.0
    lam: float = 0.1
    f: ThermalStressFunction = field(default_factory=ThermalStressFunction)


@dataclass(frozen=True)
class ThermalSpec(object):
    flux: BoundaryFluxSpec = field(default_factory=BoundaryFluxSpec)
    theta0: InitialTemperatureSpec = field(
        default_factory=InitialTemperatureSpec,
    )


@dataclass(frozen=True)
class TimeSpec(object):
    T_end: float = 0.1
    dt: float = 0.01
    allow_large_dt: bool = False

    @property
    def n_steps(self):
        # type: () -> int
        return step_count(self.T_end, self.dt)


@dataclass(frozen=True)
class SolverSpec(object):
    picard_tol: float = 1e-8
    picard_max: int = 50
    picard_damping: float = 1.0
    picard_r: float = 1.2
    cg_tol: float = 1e-10
    # Zero means ten times the system size.
    cg_maxit: int = 0
    jacobi: bool = False


@dataclass(frozen=True)
class OutputSpec(object):
    snapshot_every: int = 1
    trunc_K: float = 5.0
    tail_C: float = 1.0
    balance_tol: float = 0.05
    seed: int = 0


@dataclass(frozen=True)
class ModelConfig(object):
    scenario: str = ''
    grid: GridSpec = field(default_factory=GridSpec)
    material: MaterialSpec = field(default_factory=MaterialSpec)
    flow: FlowSpec = field(default_factory=FlowSpec)
    thermal: ThermalSpec = field(default_factory=ThermalSpec)
    loads: BodyForceSpec = field(default_factory=BodyForceSpec)
    time: TimeSpec = field(default_factory=TimeSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)
    output: OutputSpec = field(default_factory=OutputSpec)


def _to_bool(raw):
    # type: (str) -> bool
    normalized = raw.lower()
    if normalized in ('true', 'yes', 'on', '1'):
        return True
    if normalized in ('false', 'no', 'off', '0'):
        return False
    raise ValueError(raw)


def _to_float(raw):
    # type: (str) -> float
    value = float(raw)
    if not math.isfinite(value):
        raise ValueError(raw)
    return value


_EXPECTED = {
    int: 'an integer',
    _to_float: 'a finite number',
    _to_bool: 'true or false',
    str: 'a string',
}  # type: Dict[Callable, str]


# Every key of the file format, with the attribute path it sets on a
# ModelConfig and the function converting its text.
KEYS = OrderedDict([
    ('grid.nx', (('grid', 'nx'), int)),
    ('grid.ny', (('grid', 'ny'), int)),
    ('grid.lx', (('grid', 'lx'), _to_float)),
    ('grid.ly', (('grid', 'ly'), _to_float)),
    ('material.lame_first', (('material', 'lame_first'), _to_float)),
    ('material.lame_second', (('material', 'lame_second'), _to_float)),
    ('flow.k', (('flow', 'k'), _to_float)),
    ('flow.lambda', (('flow', 'lam'), _to_float)),
    ('flow.f_kind', (('flow', 'f', 'kind'), str)),
    ('flow.a', (('flow', 'f', 'a'), _to_float)),
    ('flow.M', (('flow', 'f', 'M'), _to_float)),
    ('flow.alpha', (('flow', 'f', 'alpha'), _to_float)),
    ('flow.C_neg', (('flow', 'f', 'C_neg'), _to_float)),
    ('flow.f_expression', (('flow', 'f', 'expression'), str)),
    ('thermal.g_kind', (('thermal', 'flux', 'kind'), str)),
    ('thermal.g_value', (('thermal', 'flux', 'value'), _to_float)),
    ('thermal.g_frequency', (('thermal', 'flux', 'frequency'), _to_float)),
    ('thermal.theta0_kind', (('thermal', 'theta0', 'kind'), str)),
    ('thermal.theta0_value', (('thermal', 'theta0', 'value'), _to_float)),
    ('thermal.theta0_amplitude',
     (('thermal', 'theta0', 'amplitude'), _to_float)),
    ('thermal.theta0_width', (('thermal', 'theta0', 'width'), _to_float)),
    ('thermal.theta0_x', (('thermal', 'theta0', 'center_x'), _to_float)),
    ('thermal.theta0_y', (('thermal', 'theta0', 'center_y'), _to_float)),
    ('loads.kind', (('loads', 'kind'), str)),
    ('loads.fx', (('loads', 'fx'), _to_float)),
    ('loads.fy', (('loads', 'fy'), _to_float)),
    ('loads.width', (('loads', 'width'), _to_float)),
    ('loads.center_x', (('loads', 'center_x'), _to_float)),
    ('loads.center_y', (('loads', 'center_y'), _to_float)),
    ('time.T_end', (('time', 'T_end'), _to_float)),
    ('time.dt', (('time', 'dt'), _to_float)),
    ('time.allow_large_dt', (('time', 'allow_large_dt'), _to_bool)),
    ('solver.picard_tol', (('solver', 'picard_tol'), _to_float)),
    ('solver.picard_max', (('solver', 'picard_max'), int)),
    ('solver.picard_damping', (('solver', 'picard_damping'), _to_float)),
    ('solver.picard_r', (('solver', 'picard_r'), _to_float)),
    ('solver.cg_tol', (('solver', 'cg_tol'), _to_float)),
    ('solver.cg_maxit', (('solver', 'cg_maxit'), int)),
    ('solver.jacobi', (('solver', 'jacobi'), _to_bool)),
    ('output.snapshot_every', (('output', 'snapshot_every'), int)),
    ('output.trunc_K', (('output', 'trunc_K'), _to_float)),
    ('output.tail_C', (('output', 'tail_C'), _to_float)),
    ('output.balance_tol', (('output', 'balance_tol'), _to_float)),
    ('output.seed', (('output', 'seed'), int)),
])  # type: Dict[str, Tuple[Tuple[str, ...], Callable]]


def _flatten(cfg):
    # type: (ModelConfig) -> Dict[str, Any]
    values = OrderedDict()  # type: Dict[str, Any]
    for key, (path, _) in KEYS.items():
        value = cfg
        for attribute in path:
            value = getattr(value, attribute)
        values[key] = value
    return values


def _assemble(scenario, values):
    # type: (str, Dict[str, Any]) -> ModelConfig
    tree = dict()  # type: Dict[str, Any]
    for key, value in values.items():
        path, _ = KEYS[key]
        node = tree
        for attribute in path[:-1]:
            node = node.setdefault(attribute, dict())
        node[path[-1]] = value
    flow = dict(tree['flow'])
    f = ThermalStressFunction(**flow.pop('f'))
    return ModelConfig(
        scenario=scenario,
        grid=GridSpec(**tree['grid']),
        material=MaterialSpec(**tree['material']),
        flow=FlowSpec(f=f, **flow),
        thermal=ThermalSpec(
            flux=BoundaryFluxSpec(**tree['thermal']['flux']),
            theta0=InitialTemperatureSpec(**tree['thermal']['theta0']),
        ),
        loads=BodyForceSpec(**tree['loads']),
        time=TimeSpec(**tree['time']),
        solver=SolverSpec(**tree['solver']),
        output=OutputSpec(**tree['output']),
    )


def _convert(key, raw, line_number):
    # type: (str, str, int) -> Any
    _, converter = KEYS[key]
    try:
        return converter(raw)
    except ValueError:
        raise InvalidValueError(
            key, raw, _EXPECTED[converter], line_number,
        )


def parse_config(text):
    # type: (str) -> ModelConfig
    """Parse and validate a model configuration.

    Args:
        text: The contents of a configuration file.

    Raises:
        ConfigError: The first problem found, with the key and the
            line number where one applies.

    Returns:
        The validated configuration.

    """
    entries = OrderedDict()  # type: Dict[str, Tuple[str, int]]
    for line_number, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split('#', 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition('=')
        key = key.strip()
        value = value.strip()
        if not separator or not key or not value:
            raise ConfigSyntaxError(raw_line.strip(), line_number)
        if key in entries:
            raise DuplicateKeyError(key, line_number, entries[key][1])
        if key != 'scenario' and key not in KEYS:
            raise UnknownKeyError(key, line_number)
        entries[key] = (value, line_number)

    values = _flatten(ModelConfig())
    scenario = ''
    if 'scenario' in entries:
        scenario, line_number = entries.pop('scenario')
        if scenario not in SCENARIOS:
            raise InvalidValueError(
                'scenario', scenario, ' | '.join(sorted(SCENARIOS)),
                line_number,
            )
        values.update(SCENARIOS[scenario])

    lines = dict()  # type: Dict[str, int]
    for key, (raw, line_number) in entries.items():
        values[key] = _convert(key, raw, line_number)
        lines[key] = line_number
    cfg = _assemble(scenario, values)
    validate_config(cfg, lines)
    return cfg


def load_config(path):
    # type: (str) -> ModelConfig
    with open(path, 'r') as fin:
        return parse_config(fin.read())


def _positive(values, lines, *keys):
    for key in keys:
        if not values[key] > 0:
            raise NonPositiveParameterError(key, values[key], lines.get(key))


def _require(values, lines, key, condition, expected):
    if not condition:
        raise InvalidValueError(key, values[key], expected, lines.get(key))


def _one_of(values, lines, key, choices):
    _require(
        values, lines, key, values[key] in choices, ' | '.join(choices),
    )


def validate_config(cfg, lines=None):
    # type: (ModelConfig, Optional[Dict[str, int]]) -> None
    """Check every invariant of a model configuration.

    Args:
        cfg: The configuration.
        lines: The line number of each explicitly given key.

    Raises:
        ConfigError: The first violated invariant.

    """
    lines = lines or dict()
    values = _flatten(cfg)

    _require(values, lines, 'grid.nx', values['grid.nx'] >= 2, 'at least 2')
    _require(values, lines, 'grid.ny', values['grid.ny'] >= 2, 'at least 2')
    _positive(values, lines, 'grid.lx', 'grid.ly')
    h_x = values['grid.lx'] / values['grid.nx']
    h_y = values['grid.ly'] / values['grid.ny']
    _require(values, lines, 'grid.ly', abs(h_x - h_y) <= 1e-12 * h_x,
             'square cells, ly / ny == lx / nx')

    _positive(values, lines, 'material.lame_second')
    _require(
        values, lines, 'material.lame_first',
        values['material.lame_first'] > -2.0 * values['material.lame_second']
        / 3.0,
        'a value > -2/3 * lame_second',
    )

    _positive(values, lines, 'flow.k', 'flow.lambda')
    _one_of(values, lines, 'flow.f_kind', F_KINDS)
    alpha = values['flow.alpha']
    if not 0.5 < alpha < 5.0 / 6.0:
        raise AlphaWindowError('flow.alpha', alpha, lines.get('flow.alpha'))
    for key in ('flow.a', 'flow.M'):
        _require(values, lines, key, values[key] >= 0, 'a value >= 0')
    _positive(values, lines, 'flow.C_neg')
    if values['flow.f_kind'] == 'expression':
        if not values['flow.f_expression']:
            raise MissingKeyError(
                'flow.f_expression', 'flow.f_kind = expression',
            )
        try:
            compile_expression(values['flow.f_expression'])
        except ValueError as exc:
            raise InvalidValueError(
                'flow.f_expression', values['flow.f_expression'],
                'an expression in r ({})'.format(exc),
                lines.get('flow.f_expression'),
            )
    cfg.flow.f.check_growth()

    _one_of(values, lines, 'thermal.g_kind', FLUX_KINDS)
    _one_of(values, lines, 'thermal.theta0_kind', TEMPERATURE_KINDS)
    _positive(values, lines, 'thermal.theta0_width')
    _one_of(values, lines, 'loads.kind', FORCE_KINDS)
    _positive(values, lines, 'loads.width')

    _positive(values, lines, 'time.T_end', 'time.dt')
    try:
        step_count(values['time.T_end'], values['time.dt'])
    except InvalidValueError as exc:
        raise InvalidValueError(
            'time.dt', values['time.dt'],
            'a step dividing time.T_end', lines.get('time.dt'),
        ) from exc
    _require(
        values, lines, 'time.dt',
        values['time.dt'] <= values['flow.lambda']
        or values['time.allow_large_dt'],
        'dt <= flow.lambda = {!r} (or time.allow_large_dt = true)'.format(
            values['flow.lambda'],
        ),
    )

    _positive(values, lines, 'solver.picard_tol', 'solver.cg_tol')
    _require(values, lines, 'solver.picard_max',
             values['solver.picard_max'] >= 1, 'at least 1')
    _require(values, lines, 'solver.picard_damping',
             0.0 < values['solver.picard_damping'] <= 1.0,
             'a value in (0, 1]')
    _require(values, lines, 'solver.picard_r',
             1.0 < values['solver.picard_r'] < 2.0, 'a value in (1, 2)')
    _require(values, lines, 'solver.cg_maxit',
             values['solver.cg_maxit'] >= 0, 'a value >= 0')

    _require(values, lines, 'output.snapshot_every',
             values['output.snapshot_every'] >= 1, 'at least 1')
    _positive(values, lines, 'output.trunc_K', 'output.tail_C',
              'output.balance_tol')
    _require(values, lines, 'output.seed', values['output.seed'] >= 0,
             'a value >= 0')


def _format(value):
    # type: (Any) -> str
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(cfg):
    # type: (ModelConfig) -> str
    """Write every key of a configuration, in the file format.

    Parsing the output gives back an equal configuration.

    """
    lines = ['# thermoplast model configuration']
    if cfg.scenario:
        lines.append('scenario = {}'.format(cfg.scenario))
    section = None
    for key, value in _flatten(cfg).items():
        if isinstance(value, str) and not value:
            continue
        if key.split('.')[0] != section:
            section = key.split('.')[0]
            lines.append('')
        lines.append('{} = {}'.format(key, _format(value)))
    return '\n'.join(lines) + '\n'
