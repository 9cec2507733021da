"""Cross-checks between the closed local theta formulas and their re-derivation."""

from __future__ import annotations

from . import symbolic as sy


def _blocks_text(poly: sy.SymPoly) -> dict[str, str]:
    return {name: part.to_text() for name, part in sy.split_blocks(poly).items() if part.terms}


def _compare(a: sy.SymPoly, b: sy.SymPoly, reduce) -> dict:
    diff = reduce(sy.sympoly_diff(a, b))
    parts = sy.split_blocks(diff)
    asserted = all(not parts[name].terms for name in sy.ASSERTED_BLOCKS)
    return {"diff": diff.to_text(), "blocks": _blocks_text(diff), "asserted_match": asserted}


def special(r: int, n: int) -> sy.SymPoly | None:
    if r == 0:
        return sy.theta_local_r0()
    if r == 1:
        return sy.theta_local_r1(n)
    return None


def verify_local(r_max: int) -> dict:
    """Pole orders and formula-vs-derivation diffs for every 0 <= n <= r <= r_max.

    ``ok`` is True when the second-order, det(C) and c^2 blocks agree
    everywhere and the pole-order bounds hold; c-nabla residues are reported
    without being asserted.
    """
    if not isinstance(r_max, int) or r_max < 1:
        raise sy.ValidationError(f"r_max must be an integer >= 1, got {r_max!r}")
    entries = []
    ok = True
    for r in range(r_max + 1):
        for n in range(r + 1):
            general = sy.theta_local_general(r, n)
            derived = sy.derive_theta_local(r, n)
            entry = {
                "r": r,
                "n": n,
                "pole_order_general": sy.pole_order(general),
                "pole_order_derived": sy.pole_order(derived),
                "derived_vs_general": _compare(derived, general,
                                               lambda d, r=r: sy.on_weight_line(d, r)),
            }
            ok &= entry["pole_order_general"] <= 2
            ok &= entry["derived_vs_general"]["asserted_match"]
            cor = special(r, n)
            if cor is not None:
                at_k = lambda d, r=r: sy.specialize(d, r)
                entry["pole_order_special"] = sy.pole_order(cor)
                entry["general_vs_special"] = _compare(general, cor, at_k)
                entry["derived_vs_special"] = _compare(derived, cor, at_k)
                ok &= entry["pole_order_special"] == 1
                ok &= entry["general_vs_special"]["asserted_match"]
                ok &= entry["derived_vs_special"]["asserted_match"]
            entries.append(entry)
    return {"r_max": r_max, "ok": bool(ok), "entries": entries}
