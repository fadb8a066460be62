"""
Experiment runner: YAML configs in, suites run, CSV/JSON artifacts and a
hashed manifest out. See `experiment_runner.cli` for the verbs.
"""

__version__ = '1.0.0'
