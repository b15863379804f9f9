"""Regenerate src/counterwave/_dop853_tableau.py from scipy's DOP853 coefficients."""
from pathlib import Path

from scipy.integrate._ivp import dop853_coefficients as d

N = d.N_STAGES
lines = [
    '"""Dormand-Prince 8(5,3) tableau (Hairer & Wanner), generated by tools/gen_tableau.py."""',
    "",
    f"N_STAGES = {N}",
    "",
    "A = (",
]
for row in d.A[:N, :N]:
    lines.append("    (" + ", ".join(repr(float(v)) for v in row) + "),")
lines.append(")")
for name, arr in (("B", d.B), ("C", d.C[:N]), ("E3", d.E3), ("E5", d.E5)):
    lines.append("")
    lines.append(f"{name} = (")
    for v in arr:
        lines.append(f"    {float(v)!r},")
    lines.append(")")
out = Path(__file__).resolve().parents[1] / "src" / "counterwave" / "_dop853_tableau.py"
out.write_text("\n".join(lines) + "\n")
print(out)
