"""Shared builders for the test suite."""

import json

import divkit as dk


def builtin_generators():
    """One representative per built-in generator family."""
    return [
        dk.dpd_generator(0.5),
        dk.PowerGenerator(2.0, 1.5),
        dk.exp_generator(),
        dk.cosh_generator(),
        dk.shifted_log_generator(),
    ]


def uniform_pair(n=40001):
    """f = U(0,1), g = U(0,1/2) on the shared grid [0, 2]."""
    f = dk.uniform_density(1.0, hi=2.0, n=n)
    g = dk.uniform_density(2.0, hi=2.0, n=n)
    return f, g


def smooth_pair(n=4001):
    """Fixed two-bump pair on [0, 1]; strictly positive on the grid."""
    f = dk.bump_mixture(0.0, 1.0, n, means=(0.35, 0.7), sigmas=(0.12, 0.08),
                        weights=(0.6, 0.4))
    g = dk.bump_mixture(0.0, 1.0, n, means=(0.3, 0.75), sigmas=(0.1, 0.15),
                        weights=(0.45, 0.55))
    return f, g


def write_generator_spec(path, kind, **params):
    path.write_text(json.dumps({"kind": kind, "params": params}))
    return path


def write_pair_csvs(tmp_path, f, g, names=("f.csv", "g.csv")):
    pf, pg = tmp_path / names[0], tmp_path / names[1]
    dk.save_density_csv(f, pf)
    dk.save_density_csv(g, pg)
    return pf, pg
