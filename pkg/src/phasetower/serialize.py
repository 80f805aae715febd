"""JSON schemas for groups, systems, functions, cocycles, filtered groups
and relation systems, with validators that carry the location of the fault.
"""

from __future__ import annotations

from fractions import Fraction

from .abelian import FinAbGroup, TorusValue
from .filtered import FilteredEmbedding, FilteredGroup, RelationSystem
from .gowers import ComplexFunction
from .phasepoly import TorusFunction
from .systems import Cocycle, GammaSystem, TORUS, translation_system


class ValidationError(ValueError):
    """Malformed input with a located message."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


def _need(obj, key, path, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise ValidationError(path, f"missing field {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise ValidationError(f"{path}.{key}", f"expected {kind.__name__}")
    return val


def load_group(obj, path="group"):
    moduli = _need(obj, "moduli", path, list)
    if not moduli or not all(isinstance(m, int) and m >= 1 for m in moduli):
        raise ValidationError(f"{path}.moduli", "need a nonempty list of integers >= 1")
    try:
        return FinAbGroup(tuple(moduli))
    except (ValueError, OverflowError) as exc:
        raise ValidationError(f"{path}.moduli", str(exc))


def dump_group(group):
    return {"moduli": list(group.moduli)}


def load_element(group, obj, path="element"):
    coeffs = _need(obj, "coeffs", path, list)
    if len(coeffs) != group.rank:
        raise ValidationError(f"{path}.coeffs", "length does not match moduli")
    return group.element(coeffs)


def load_system(obj, path="system"):
    if "moduli" in obj:
        return translation_system(load_group(obj, path))
    n = _need(obj, "points", path, int)
    gamma = load_group(_need(obj, "gamma", path, dict), f"{path}.gamma")
    action = _need(obj, "action", path, list)
    if len(action) != gamma.rank:
        raise ValidationError(f"{path}.action", "need one permutation per generator")
    for i, perm in enumerate(action):
        if sorted(perm) != list(range(n)):
            raise ValidationError(f"{path}.action[{i}]", "not a permutation of the points")
    try:
        return GammaSystem(n, gamma, tuple(tuple(p) for p in action))
    except ValueError as exc:
        raise ValidationError(path, str(exc))


def dump_system(system):
    return {"points": system.n_points,
            "gamma": dump_group(system.gamma),
            "action": [list(p) for p in system.gen_perms]}


def _parse_torus(text, path):
    try:
        return TorusValue.parse(text)
    except (ValueError, AttributeError):
        raise ValidationError(path, f"expected a 'p/q' string, got {text!r}")


def load_torus_function(obj, path="fn"):
    system = load_system(_need(obj, "domain", path, dict), f"{path}.domain")
    values = _need(obj, "values", path, list)
    if len(values) != system.n_points:
        raise ValidationError(f"{path}.values", "length does not match the domain")
    vals = [_parse_torus(v, f"{path}.values[{i}]") for i, v in enumerate(values)]
    return TorusFunction(system, tuple(vals))


def load_complex_function(obj, path="fn"):
    system = load_system(_need(obj, "domain", path, dict), f"{path}.domain")
    values = _need(obj, "values", path, list)
    if len(values) != system.n_points:
        raise ValidationError(f"{path}.values", "length does not match the domain")
    out = []
    for i, v in enumerate(values):
        if isinstance(v, dict):
            out.append(complex(v.get("re", 0.0), v.get("im", 0.0)))
        elif isinstance(v, (int, float)):
            out.append(complex(v))
        else:
            raise ValidationError(f"{path}.values[{i}]",
                                  "expected a number or {re, im} object")
    return ComplexFunction(system, tuple(out))


def load_cocycle(obj, path="cocycle"):
    system = load_system(obj, path)
    target_spec = _need(obj, "target", path)
    tables = _need(obj, "tables", path, list)
    if len(tables) != system.gamma.rank:
        raise ValidationError(f"{path}.tables", "need one table per generator")
    if target_spec == "torus":
        parsed = []
        for i, t in enumerate(tables):
            if len(t) != system.n_points:
                raise ValidationError(f"{path}.tables[{i}]", "bad table length")
            parsed.append(tuple(_parse_torus(v, f"{path}.tables[{i}][{j}]")
                                for j, v in enumerate(t)))
        target = TORUS
    else:
        target = load_group(target_spec, f"{path}.target")
        parsed = []
        for i, t in enumerate(tables):
            if len(t) != system.n_points:
                raise ValidationError(f"{path}.tables[{i}]", "bad table length")
            parsed.append(tuple(target.element(v) for v in t))
    try:
        return Cocycle(system, target, tuple(parsed))
    except ValueError as exc:
        raise ValidationError(path, str(exc))


def load_filtered_group(obj, path="filtered"):
    group = load_group(obj, path)
    chain = obj.get("chain", [])
    try:
        return FilteredGroup.from_subgroup_gens(group, chain)
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"{path}.chain", str(exc))


def load_embedding(obj, path="embedding"):
    amb = load_filtered_group(_need(obj, "ambient", path, dict), f"{path}.ambient")
    gens = _need(obj, "sub_gens", path, list)
    elems = [amb.ambient.element(c) for c in gens]
    return FilteredEmbedding(amb, elems)


def load_relations(obj, path="relations"):
    n = _need(obj, "n", path, int)
    rels = _need(obj, "relations", path, list)
    parsed = []
    for i, r in enumerate(rels):
        m = _need(r, "m", f"{path}.relations[{i}]", list)
        j = _need(r, "j", f"{path}.relations[{i}]", int)
        parsed.append((tuple(m), j))
    try:
        return RelationSystem(n, tuple(parsed))
    except ValueError as exc:
        raise ValidationError(path, str(exc))


def fraction_str(value):
    if isinstance(value, TorusValue):
        return str(value)
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


def round_float(x):
    return float(f"{x:.12g}")


def jsonable(value):
    """Recursively convert report values: exact rationals become 'p/q'
    strings, floats are rounded to 12 significant digits, complex numbers
    become {re, im} objects."""
    if isinstance(value, (TorusValue, Fraction)):
        return fraction_str(value)
    if isinstance(value, bool) or isinstance(value, int) or value is None:
        return value
    if isinstance(value, float):
        return round_float(value)
    if isinstance(value, complex):
        return {"re": round_float(value.real), "im": round_float(value.imag)}
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")
