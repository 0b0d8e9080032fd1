"""Experimental orders of convergence over a mesh sequence."""
from __future__ import annotations

import numpy as np
import pandas as pd

from ..errors import AnalysisError
from .norms import CSV_COLUMNS, FULL_COLUMNS, NORMS

EXACT = "EXACT"


class EocTable:
    """Errors per level (rows sorted by decreasing h) and rates between consecutive rows.

    ``rates`` holds NaN where a rate is undefined; ``exact`` flags the pairs in
    which one error is exactly zero.
    """

    def __init__(self, frame):
        self.errors = frame.sort_values("h", ascending=False, kind="stable").reset_index(drop=True)
        self.norms = [c for c in self.errors.columns if c in NORMS]
        self.rates, self.exact = self._rates()

    def _rates(self):
        e = self.errors
        rates = pd.DataFrame(index=e.index[1:], columns=self.norms, dtype=float)
        exact = pd.DataFrame(False, index=e.index[1:], columns=self.norms)
        h = e["h"].to_numpy(dtype=float)
        for col in self.norms:
            v = e[col].to_numpy(dtype=float)
            for i in range(1, len(e)):
                if v[i - 1] == 0.0 or v[i] == 0.0:
                    exact.loc[i, col] = True
                    continue
                if h[i - 1] == h[i]:
                    continue
                rates.loc[i, col] = np.log(v[i - 1] / v[i]) / np.log(h[i - 1] / h[i])
        return rates, exact

    def __len__(self):
        return len(self.errors)

    def final_rates(self):
        """Rates of the last segment; ``EXACT`` where an error vanished."""
        if len(self.errors) < 2:
            return {}
        last = self.rates.index[-1]
        return {col: (EXACT if self.exact.loc[last, col] else float(self.rates.loc[last, col]))
                for col in self.norms}

    def to_csv(self, path, columns=CSV_COLUMNS):
        cols = [c for c in columns if c in self.errors.columns]
        frame = self.errors[cols].copy()
        frame["dofs"] = frame["dofs"].astype(int)
        frame.to_csv(path, index=False, float_format="%.12e")
        return path

    def format_table(self, columns=None):
        """Console table: errors with the rate to the previous level in brackets."""
        columns = columns or [c for c in ("l2", "h1", "bnorm", "l2_rec", "h1_rec", "triple")
                              if c in self.norms]
        header = f"{'h':>10} {'dofs':>8} " + " ".join(f"{c:>20}" for c in columns)
        lines = [header, "-" * len(header)]
        for i, row in self.errors.iterrows():
            cells = []
            for c in columns:
                if i == 0:
                    rate = ""
                elif self.exact.loc[i, c]:
                    rate = f"({EXACT})"
                elif np.isnan(self.rates.loc[i, c]):
                    rate = "(  -  )"
                else:
                    rate = f"({self.rates.loc[i, c]:5.2f})"
                cells.append(f"{row[c]:.3e} {rate:>9}")
            lines.append(f"{row['h']:10.4f} {int(row['dofs']):8d} " + " ".join(f"{s:>20}" for s in cells))
        return "\n".join(lines)


def eoc(rows):
    """Build an EocTable from ErrorReports or mappings keyed by the CSV columns."""
    rows = list(rows)
    if not rows:
        raise AnalysisError("no rows to compute convergence rates from")
    records = [r.to_row() if hasattr(r, "to_row") else dict(r) for r in rows]
    frame = pd.DataFrame.from_records(records)
    missing = {"h", "dofs"} - set(frame.columns)
    if missing:
        raise AnalysisError(f"rows lack the columns {sorted(missing)}")
    if (frame["h"] <= 0).any():
        raise AnalysisError("mesh sizes must be positive")
    norm_cols = [c for c in frame.columns if c in NORMS]
    if (frame[norm_cols] < 0).any().any():
        raise AnalysisError("errors must be non-negative")
    return EocTable(frame[[c for c in FULL_COLUMNS if c in frame.columns]])
