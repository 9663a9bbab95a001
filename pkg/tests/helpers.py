import copy

BASE = {
    "schema_version": 1,
    "function": "x1",
    "domain": {"d": 2, "omega_lo": [0.0], "omega_hi": [1.0]},
    "path": {"kind": "PowerLaw", "param": 0.5, "eps_list": [0.2, 0.1, 0.05]},
    "scaling": {"kind": "Native"},
    "sampler": {"r": 0.25, "n_near": 20000, "n_far": 20000, "n_mu_samples": 4, "autoscale": False, "grid_n": 64},
    "seed": 0,
    "output": {"ndjson": "out.ndjson", "csv": "out.csv", "svg": "out.svg"},
}


def config_dict(**changes) -> dict:
    """BASE with top-level keys replaced; nested dicts are merged one level deep."""
    out = copy.deepcopy(BASE)
    for k, v in changes.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k].update(v)
        else:
            out[k] = v
    return out
