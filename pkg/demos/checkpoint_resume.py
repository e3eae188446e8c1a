"""
Interrupting and resuming a long table
======================================

Tables can checkpoint after every row.  A run that stops early and is then
resumed gives the same rows, bit for bit, as one that never stopped.
"""

import tempfile
from pathlib import Path

from nextprime import PrimeEngine
from nextprime.asymptotics import run_table
from nextprime.gapstats import accumulate_to, load_checkpoint, save_checkpoint

engine = PrimeEngine(20_000_000)
grid = [10**3, 10**4, 10**5, 10**6, 10**7]

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "harmonic.json"

    # stop after two rows, as if the job had been killed
    first = run_table(engine, "harmonic", grid, checkpoint=path, stop_after=2)
    print("rows before the stop:", [r.x for r in first])

    resumed = run_table(engine, "harmonic", grid, checkpoint=path, resume=True)
    straight = run_table(engine, "harmonic", grid)
    print("resumed == uninterrupted:", resumed == straight)

    # the raw gap aggregate can be saved and carried forward the same way
    agg_path = Path(tmp) / "gaps.json"
    save_checkpoint(accumulate_to(engine, 250_000), agg_path, engine.limit)
    later = accumulate_to(engine, 1_000_000, start=load_checkpoint(agg_path))
    print("carried forward:", later == accumulate_to(engine, 1_000_000))
    print(agg_path.read_text()[:200], "...")
