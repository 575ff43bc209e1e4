"""Bundled scenario files used by the CLI examples and the test suite."""

from importlib.resources import files

BUNDLED = [
    "sho_c1",
    "sho_c2",
    "ck",
    "lo",
    "driven_sho",
    "driven_ck",
    "negative_control",
]


def scenario_path(name: str) -> str:
    if name not in BUNDLED:
        raise KeyError(f"no bundled scenario {name!r}; have {', '.join(BUNDLED)}")
    return str(files(__package__) / f"{name}.json")
