#!/usr/bin/env python3
"""Re-derive the frozen oracle fixtures used by tests/test_acceptance.py.

Runs the direct Kirkwood-Dirac trace oracle over the 400-point (0, T] grid of
the reference configuration and prints the fixture block.  The committed
values are locked; run this only to audit them or after an intentional change
to the reference configuration.
"""

import numpy as np

from quasiwork import analysis, explore, model, schemes

GRID_POINTS = 400


def main() -> None:
    params = model.reference_params()
    rho = model.initial_state(model.reference_state_spec(), model.energy_basis(0.0, params))
    period = explore.time_window(params)
    times = np.linspace(period / GRID_POINTS, period, GRID_POINTS)

    aleph = np.empty(GRID_POINTS)
    w_mhq = np.empty(GRID_POINTS)
    w_tpm = np.empty(GRID_POINTS)
    z_minus_plus = np.empty(GRID_POINTS)
    for k, t in enumerate(times):
        q = schemes.kdq_direct(rho, float(t), params)
        aleph[k] = analysis.total_negativity(q.z) - 1.0
        w_mhq[k] = analysis.avg_work_mhq(q)
        w_tpm[k] = analysis.avg_work_tpm(schemes.scheme_tables(rho, float(t), params))
        z_minus_plus[k] = q.z[2, 0]

    print(f"GRID_POINTS = {GRID_POINTS}")
    print(f"PEAK_NEGATIVITY = {float(aleph.max())!r}")
    print(f"PEAK_INDEX = {int(np.argmax(aleph))}")
    print(f"MIN_W = {float(w_mhq.min())!r}")
    print(f"MIN_W_INDEX = {int(np.argmin(w_mhq))}")
    print(f"MIN_W_TPM = {float(w_tpm.min())!r}")
    print(f"MIN_W_TPM_INDEX = {int(np.argmin(w_tpm))}")
    print(f"EXTRACTION_RATIO = {float(w_mhq.min() / w_tpm.min())!r}")
    print(f"MIN_Z_MINUS_PLUS = {float(z_minus_plus.min())!r}")


if __name__ == "__main__":
    main()
