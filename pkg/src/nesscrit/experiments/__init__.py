"""Reference models, parameter sweeps, exponent fits and cross-checks."""
