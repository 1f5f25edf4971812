"""Key rates of the three protocols against the repeaterless bound.

Sweeps scenario 2 (everything relevant stabilized) and scenario 3 (worst
mismatch) for both detector classes, reports where the twin-field
protocols cross the realistic repeaterless bound, and where decoy BB84
stops being competitive.

Run:  python demos/keyrate_sweeps.py
"""

import os

from tfqkd import SweepSpec, builtin_scenarios, emit_csv, run_sweep

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

labels = {p.id: p.label for p in builtin_scenarios()}

for sid, detector in ((2, "snspd"), (2, "spad"), (3, "snspd")):
    spec = SweepSpec(start=0.0, stop=100.0, step=1.0, detector=detector)
    rows = run_sweep(sid, spec)
    path = os.path.join(OUT, f"keyrates_scenario{sid}_{detector}.csv")
    emit_csv(rows, path)
    print(f"== scenario {sid} ({labels[sid]}), {detector} ==")
    print(f"   wrote {path}")

    beats = [r.x for r in rows if r.rates["sns_aopp"] > r.rates["plob_realistic"]]
    if beats:
        print(f"   odd-parity pairing beats realistic bound on "
              f"[{beats[0]:.0f}, {beats[-1]:.0f}] dB")
    beats = [r.x for r in rows if r.rates["cal"] > r.rates["plob_realistic"]]
    if beats:
        print(f"   phase encoding beats realistic bound on "
              f"[{beats[0]:.0f}, {beats[-1]:.0f}] dB")
    cross = next((r.x for r in rows
                  if r.x >= 5 and max(r.rates["sns_aopp"], r.rates["cal"])
                  > r.rates["bb84"]), None)
    print(f"   direct-link BB84 overtaken at {cross:.0f} dB" if cross
          else "   BB84 never overtaken in range")
    for proto in ("bb84", "sns_aopp", "cal"):
        reach = max((r.x for r in rows if r.rates[proto] > 0), default=None)
        print(f"   {proto:9s} positive up to {reach:.0f} dB")
    print()

print("The twin-field advantage shows up past ~40 dB: both protocols decay")
print("with the square root of the channel loss, while the direct link and")
print("the repeaterless bound fall linearly in it.")
