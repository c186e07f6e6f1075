from dataclasses import dataclass, field
from typing import Literal, Optional

from ..errors import ConfigError
from .grid import MIN_INTERVALS
from .solution import SampleKind, SolverChoice
from .stencil import Limit
from .system import Scheme

Command = Literal['solve', 'converge', 'basis-table', 'selftest']
COMMANDS: tuple[str, ...] = ('solve', 'converge', 'basis-table', 'selftest')


@dataclass
class CliConfig:
    """
    Everything one command-line invocation needs.
    """
    command: Command
    builtin: Optional[str] = None          # built-in problem name
    problem_path: Optional[str] = None     # problem file
    n: Optional[int] = None                # solve
    ns: list[int] = field(default_factory=list)  # converge
    scheme: Scheme = Scheme.LEAST_SQUARES
    solver: Optional[SolverChoice] = None  # None picks by scheme
    output: Optional[str] = None           # None writes to stdout
    sample: SampleKind = 'knots'
    dump_system: Optional[str] = None
    limit: Limit = 'left'                  # basis-table, order-7 row
    inject_fault: Optional[str] = None     # selftest hook
    verbose: bool = False

    @property
    def effective_solver(self) -> SolverChoice:
        return self.solver or SolverChoice.default_for(self.scheme)

    def validate(self) -> None:
        """Raise ConfigError before any work starts."""
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command '{self.command}'")
        if self.command in ('solve', 'converge'):
            if (self.builtin is None) == (self.problem_path is None):
                raise ConfigError("give exactly one of --builtin or --problem")
            if self.effective_solver is SolverChoice.BAND_LU and not self.scheme.is_square:
                raise ConfigError("solver band-lu needs a square scheme (square_drop_first or square_drop_last)")
        if self.command == 'solve':
            if self.n is None:
                raise ConfigError("solve needs --n")
            _check_mesh(self.n)
        if self.command == 'converge':
            if len(self.ns) < 2:
                raise ConfigError(f"converge needs at least 2 meshes in --ns, got {len(self.ns)}")
            for n in self.ns:
                _check_mesh(n)

    def to_dict(self) -> dict:
        return {
            'command': self.command,
            'builtin': self.builtin,
            'problem_path': self.problem_path,
            'n': self.n,
            'ns': list(self.ns),
            'scheme': self.scheme.value,
            'solver': self.solver.value if self.solver else None,
            'output': self.output,
            'sample': self.sample,
            'dump_system': self.dump_system,
            'limit': self.limit,
            'inject_fault': self.inject_fault,
            'verbose': self.verbose,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'CliConfig':
        solver = data.get('solver')
        return cls(
            command=data['command'],
            builtin=data.get('builtin'),
            problem_path=data.get('problem_path'),
            n=data.get('n'),
            ns=list(data.get('ns') or []),
            scheme=Scheme(data.get('scheme', Scheme.LEAST_SQUARES.value)),
            solver=SolverChoice(solver) if solver else None,
            output=data.get('output'),
            sample=data.get('sample', 'knots'),
            dump_system=data.get('dump_system'),
            limit=data.get('limit', 'left'),
            inject_fault=data.get('inject_fault'),
            verbose=data.get('verbose', False),
        )


def _check_mesh(n: int) -> None:
    if n < MIN_INTERVALS:
        raise ConfigError(f"n must be at least {MIN_INTERVALS} (n >= {MIN_INTERVALS} gate), got {n}")
