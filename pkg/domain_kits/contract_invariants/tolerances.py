"""
Acceptance tolerances

How far a computed quantity may sit from its reference before a suite fails.
"""


class ToleranceConfig:
    """Tolerances for one family of acceptance checks."""

    # DEFAULT: exact
    abs_tol = 0.0
    n_stderr = 0.0
    rel_tol = 0.0

    @classmethod
    def for_tree_oracle(cls):
        """
        Solver and value estimates against exhaustive enumeration.
        Same arithmetic up to roundoff.
        """
        config = cls()
        config.abs_tol = 1e-10
        return config

    @classmethod
    def for_monte_carlo(cls):
        """
        Sampled estimates: three standard errors plus a roundoff floor.
        """
        config = cls()
        config.abs_tol = 1e-12
        config.n_stderr = 3.0
        return config

    @classmethod
    def for_scheme(cls):
        """
        Grid orderings that must hold node-wise up to accumulated roundoff.
        """
        config = cls()
        config.abs_tol = 1e-9
        return config

    @classmethod
    def for_stability(cls):
        """
        Statistics that should not move much under one refinement (20 %).
        """
        config = cls()
        config.rel_tol = 0.2
        return config

    def bound(self, stderr: float = 0.0) -> float:
        """abs_tol + n_stderr * stderr."""
        return self.abs_tol + self.n_stderr * float(stderr)

    def to_dict(self) -> dict:
        return {
            'abs_tol': self.abs_tol,
            'n_stderr': self.n_stderr,
            'rel_tol': self.rel_tol,
        }
