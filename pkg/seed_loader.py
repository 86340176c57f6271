"""
File I/O for the cluster braiding verifier.
Loads and writes cluster seeds, y-value tuples and R-matrices in the JSON
schemas used by the command line and the HTTP service.
"""

import json
import logging
import os
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from braid_classical import build_braid_matrix
from cluster_core import ClusterSeed, ExchangeMatrix, YSeed, generic_y_seed, quiver_from_matrix
from exact_algebra import CycloMatrix, parse_ratfunc, variable_names

logger = logging.getLogger(__name__)

__all__ = [
    "parse_complex",
    "complex_to_json",
    "load_json",
    "save_json",
    "seed_to_dict",
    "seed_from_dict",
    "load_seed",
    "save_seed",
    "seed_summary",
    "load_y_values",
    "matrix_to_dict",
    "matrix_from_dict",
    "save_matrix",
    "load_matrix",
    "create_sample_files",
]

PathLike = Union[str, Path]
Seed = Union[ClusterSeed, YSeed]


def parse_complex(text: Union[str, float, int, complex, Sequence[float]]) -> complex:
    """
    Parse ``"0.3+0.1i"``, ``"2j"``, a number or an ``[re, im]`` pair.

    Raises:
        ValueError: If the value is not a complex number
    """
    if isinstance(text, (int, float, complex)) and not isinstance(text, bool):
        return complex(text)
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise ValueError(f"Expected an [re, im] pair, got {text!r}")
        return complex(float(text[0]), float(text[1]))
    if not isinstance(text, str):
        raise ValueError(f"Not a complex number: {text!r}")
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError:
        raise ValueError(f"Not a complex number: {text!r}")


def complex_to_json(value: complex) -> Union[float, List[float]]:
    """Real values as a float, everything else as ``[re, im]``."""
    value = complex(value)
    if value.imag == 0:
        return value.real
    return [value.real, value.imag]


def load_json(file_path: PathLike) -> object:
    """
    Read a JSON file.

    Raises:
        FileNotFoundError: If file doesn't exist
        ValueError: If the file is not valid JSON
    """
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Input file not found: {file_path}")
    try:
        with open(file_path, encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as e:
        raise ValueError(f"Error reading {file_path}: {e}")


def save_json(file_path: PathLike, data: object) -> str:
    path = Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True), encoding="utf-8")
    return str(path)


# ---------------------------------------------------------------------------
# seeds


def seed_to_dict(seed: Seed) -> Dict:
    """``{"size": n, "B": [[...]], "x" | "y": ["<ratfunc>", ...]}``"""
    key = "x" if isinstance(seed, ClusterSeed) else "y"
    return {
        "size": seed.size,
        "B": seed.B.to_list(),
        key: [value.to_string() for value in seed.variables()],
    }


def seed_from_dict(data: Dict) -> Seed:
    """
    Build a seed from its JSON form. ``"x"`` gives a cluster seed, ``"y"`` a
    y-seed; a missing variable list means the generic seed.

    Raises:
        ValueError: If the schema is violated (AlgebraError and SeedError included)
    """
    if not isinstance(data, dict) or "B" not in data:
        raise ValueError("Seed JSON needs an object with a 'B' matrix")
    if "x" in data and "y" in data:
        raise ValueError("Seed JSON may carry 'x' or 'y', not both")
    B = ExchangeMatrix(data["B"])
    size = data.get("size", B.size)
    if size != B.size:
        raise ValueError(f"Seed size {size} does not match B of size {B.size}")
    prefix = "x" if "x" in data else "y"
    texts = data.get(prefix) or list(variable_names(prefix, size))
    if len(texts) != size:
        raise ValueError(f"Seed has {len(texts)} variables but size {size}")
    names = variable_names(prefix, size)
    values = tuple(parse_ratfunc(str(text), names) for text in texts)
    return ClusterSeed(values, B) if prefix == "x" else YSeed(values, B)


def load_seed(file_path: PathLike) -> Seed:
    """
    Load a seed JSON file.

    Args:
        file_path (str): Path to the seed file

    Returns:
        ClusterSeed | YSeed: the parsed seed

    Raises:
        FileNotFoundError: If file doesn't exist
        ValueError: If the JSON does not follow the seed schema
    """
    seed = seed_from_dict(load_json(file_path))
    logger.debug("Loaded %s of size %d from %s", type(seed).__name__, seed.size, file_path)
    return seed


def save_seed(file_path: PathLike, seed: Seed) -> str:
    return save_json(file_path, seed_to_dict(seed))


def seed_summary(seed: Seed) -> Dict:
    """
    Summary of a seed for reports.

    Returns:
        dict: size, kind, arrow count of the quiver and the variables as strings
    """
    quiver = quiver_from_matrix(seed.B)
    return {
        "size": seed.size,
        "kind": "x" if isinstance(seed, ClusterSeed) else "y",
        "arrows": quiver.number_of_edges(),
        "variables": [value.to_string() for value in seed.variables()],
    }


# ---------------------------------------------------------------------------
# y-values


def load_y_values(file_path: PathLike) -> List[complex]:
    """
    Load numeric y-values from JSON (a list, or ``{"y": [...]}``) or from CSV
    with ``re``/``im`` columns.

    Raises:
        FileNotFoundError: If file doesn't exist
        ValueError: For unsupported formats or malformed values
    """
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Input file not found: {file_path}")
    file_extension = Path(file_path).suffix.lower()
    if file_extension == ".csv":
        try:
            df = pd.read_csv(file_path)
        except Exception as e:
            raise ValueError(f"Error reading file: {str(e)}")
        if "re" not in df.columns:
            raise ValueError("y-value CSV needs an 're' column")
        imag = df["im"] if "im" in df.columns else pd.Series(0.0, index=df.index)
        if df["re"].isnull().any() or imag.isnull().any():
            raise ValueError("y-value CSV has missing entries")
        return [complex(r, i) for r, i in zip(df["re"].astype(float), imag.astype(float))]
    if file_extension != ".json":
        raise ValueError(f"Unsupported file format: {file_extension}")
    data = load_json(file_path)
    if isinstance(data, dict):
        data = data.get("y")
    if not isinstance(data, list) or not data:
        raise ValueError("y-value JSON must be a non-empty list or {'y': [...]}")
    return [parse_complex(value) for value in data]


# ---------------------------------------------------------------------------
# matrices


def matrix_to_dict(M: Union[np.ndarray, CycloMatrix], N: int) -> Dict:
    """Row-major nested ``[re, im]`` pairs under an ``{"N", "dim"}`` header."""
    dense = M.to_numpy() if isinstance(M, CycloMatrix) else np.asarray(M, dtype=complex)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {dense.shape}")
    return {
        "N": N,
        "dim": int(dense.shape[0]),
        "entries": [[[float(v.real), float(v.imag)] for v in row] for row in dense],
    }


def matrix_from_dict(data: Dict) -> np.ndarray:
    """
    Inverse of ``matrix_to_dict``.

    Raises:
        ValueError: If the header and the entries disagree
    """
    try:
        dim = int(data["dim"])
        raw = np.asarray(data["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise ValueError(f"Malformed matrix JSON: {e}")
    if raw.shape != (dim, dim, 2):
        raise ValueError(f"Matrix JSON entries have shape {raw.shape}, header says dim {dim}")
    return raw[..., 0] + 1j * raw[..., 1]


def save_matrix(file_path: PathLike, M: Union[np.ndarray, CycloMatrix], N: int) -> str:
    return save_json(file_path, matrix_to_dict(M, N))


def load_matrix(file_path: PathLike) -> np.ndarray:
    return matrix_from_dict(load_json(file_path))


def create_sample_files(output_dir: PathLike = "samples") -> Dict[str, str]:
    """
    Write a generic braid y-seed for n=3 and a sample complex y-tuple.

    Args:
        output_dir (str): Directory for the sample files

    Returns:
        dict: ``{"seed": path, "y": path}``
    """
    out = Path(output_dir)
    seed_path = save_seed(out / "seed.json", generic_y_seed(build_braid_matrix(3)))
    rng = np.random.default_rng(42)
    values = rng.uniform(0.3, 1.5, 7) * np.exp(1j * rng.uniform(0.2, 1.2, 7))
    y_path = save_json(out / "y.json", {"y": [complex_to_json(v) for v in values]})
    logger.info("Sample inputs written to %s", out)
    return {"seed": seed_path, "y": y_path}
