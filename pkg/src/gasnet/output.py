"""Snapshot records and deterministic CSV/JSON serialization."""

import csv
import io
import json

from .thermo import (
    GasConstants,
    Model,
    PipeState,
    pressure,
    thermo_quantities,
    total_energy,
)

CSV_COLUMNS = ["t", "pipe", "x", "rho", "q", "E", "p", "u", "s", "h", "c"]


def state_fields(state: PipeState, g: GasConstants):
    """Flat dict of primitive and derived quantities of one state."""
    tq = thermo_quantities(state, g)
    out = {
        "model": state.model.value,
        "rho": state.rho,
        "q": state.q,
        "E": total_energy(state, g),
        "p": pressure(state, g),
        "u": state.u,
        "s": tq.s,
        "h": tq.h,
        "c": tq.c,
    }
    if state.model.is_isentropic:
        out["kappa"] = state.kappa
    return out


def state_from_fields(fields, g: GasConstants):
    model = Model(fields["model"])
    if model is Model.M1:
        rho = fields["rho"]
        return PipeState(model, rho, fields["q"], E=fields["E"])
    return PipeState(model, fields["rho"], fields["q"], kappa=fields["kappa"])


def snapshot_record(time, pipe_samples, traces, diagnostics):
    """A plain-dict snapshot: sampled grids, trace states and diagnostics.

    ``pipe_samples`` maps pipe id -> {"x": [...], "states": [field dicts]};
    ``traces`` maps pipe id -> field dict.
    """
    return {
        "time": time,
        "pipes": pipe_samples,
        "traces": traces,
        "diagnostics": diagnostics,
    }


def write_csv(records, stream):
    """One row per (time, pipe, grid point); header always written."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        t = float(rec["time"])
        for pipe_id in rec["pipes"]:
            samples = rec["pipes"][pipe_id]
            for x, st in zip(samples["x"], samples["states"]):
                w.writerow([repr(t), pipe_id, repr(float(x))] +
                           [repr(float(st[c])) for c in CSV_COLUMNS[3:]])


def write_json(records, stream, summary=None):
    """Records nested by time then pipe; float formatting is repr-exact."""
    doc = {"records": records}
    if summary is not None:
        doc["summary"] = summary
    json.dump(doc, stream, indent=1, sort_keys=False)
    stream.write("\n")


def read_json(stream):
    doc = json.load(stream)
    return doc.get("records", []), doc.get("summary")


def render_csv(records):
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def render_json(records, summary=None):
    buf = io.StringIO()
    write_json(records, buf, summary)
    return buf.getvalue()
