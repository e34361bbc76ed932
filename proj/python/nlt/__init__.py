"""Python access to the nlt particle simulator and verification harness.

Config options are passed as keyword arguments using the config key names,
either bare (``dt=1e-3``) or with the section spelled with a double
underscore (``solver__dt=1e-3``).
"""

from . import _nlt
from ._nlt import (
    ConfigError,
    DomainError,
    IoError,
    NumericalError,
    __version__,
    commands,
    convergence_cases,
    density_presets,
    dirac_correction,
    holder_seminorm,
    kernel_eval,
    kernel_grad,
    kernel_names,
    validate_kernel,
    zygmund_seminorm,
)


def _value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return ",".join(_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _overrides(options):
    return [f"{k.replace('__', '.')}={_value(v)}" for k, v in options.items()]


def simulate(**options):
    """Run one simulation; returns labels, rho0, final state, snapshots and monitors."""
    return _nlt.simulate(_overrides(options))


def continuity_sweep(**options):
    """Run a perturbation sweep (defaults: the shipped Holder configuration)."""
    return _nlt.continuity_sweep(_overrides(options))


def lemma_suite(trials=200, seed=0):
    return _nlt.lemma_suite(trials, seed)


def check_config(command, text="", **options):
    return _nlt.check_config(command, text, _overrides(options))


def run(command, text="", **options):
    """Run a CLI command in-process; outputs go to ``output_dir``. Returns the manifest."""
    return _nlt.run(command, text, _overrides(options))
