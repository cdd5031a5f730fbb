"""Closed-loop simulation inner loop.

The loop is written once as a plain-numpy function and compiled with numba
when available. Set DOBLAB_DISABLE_NUMBA=1 to force the interpreted path
(the benchmark in benchmarks/ times both).

All signal evaluation (reference, disturbance samples, substep-midpoint
disturbance values, measurement noise) happens outside; the kernel only sees
float64 arrays, so both paths are bit-identical.
"""

import os

import numpy as np

# Plant modes
MODE_DISCRETE = 0
MODE_CONTINUOUS = 1

# Observer kinds
OBS_NONE = 0
OBS_CONV = 1
OBS_HP = 2

# Kernel exit status
OK = -1  # any value >= 0 is the step index where the state diverged

_DIVERGE_LIMIT = 1e9


def _sim_loop(
    mode,
    # nominal discrete model (observer model; also the plant in discrete mode)
    an, bn, dn,
    # truth model propagated per substep (continuous mode only)
    ah, bh, dh, substeps,
    # signals
    tau_samples, tau_mid, ref_pos, ref_vel, noise,
    # lumped-disturbance coefficients
    c_w, c_u, c_tau,
    # controller
    kp, kd, deriv_on_error, u_max,
    # observer
    obs_kind, gl, gl1, gl2,
    # initial state
    x0,
    # outputs (n rows each)
    theta, omega, u_pd_out, u_out, tau_hat_out, tau_dn_out,
):
    n = theta.shape[0]
    th = x0[0]
    om = x0[1]

    # observer internal state (zero initial disturbance estimate)
    z = gl[0] * th + gl[1] * om
    z1 = gl1[0] * th + gl1[1] * om
    z2 = gl2[0] * th + gl2[1] * om

    ld = gl[0] * dn[0] + gl[1] * dn[1]
    l1d = gl1[0] * dn[0] + gl1[1] * dn[1]
    l2d = gl2[0] * dn[0] + gl2[1] * dn[1]
    lb = gl[0] * bn[0] + gl[1] * bn[1]
    l1b = gl1[0] * bn[0] + gl1[1] * bn[1]
    l2b = gl2[0] * bn[0] + gl2[1] * bn[1]

    for k in range(n):
        if np.abs(th) > _DIVERGE_LIMIT or np.abs(om) > _DIVERGE_LIMIT:
            return k
        om_meas = om + noise[k]

        if obs_kind == OBS_CONV:
            tau_hat = z - (gl[0] * th + gl[1] * om_meas)
        elif obs_kind == OBS_HP:
            tau_hat = z2 - (gl2[0] * th + gl2[1] * om_meas)
        else:
            tau_hat = 0.0

        if deriv_on_error:
            u_pd = kp * (ref_pos[k] - th) + kd * (ref_vel[k] - om_meas)
        else:
            u_pd = kp * (ref_pos[k] - th) - kd * om_meas
        u = u_pd + tau_hat
        if u > u_max:
            u = u_max
        elif u < -u_max:
            u = -u_max

        tau_dn = c_w * om + c_u * u + c_tau * tau_samples[k]

        theta[k] = th
        omega[k] = om
        u_pd_out[k] = u_pd
        u_out[k] = u
        tau_hat_out[k] = tau_hat
        tau_dn_out[k] = tau_dn

        if k == n - 1:
            break

        # advance observer with the measured state and applied input
        if obs_kind == OBS_CONV:
            lx = gl[0] * th + gl[1] * om_meas
            lax = gl[0] * (an[0, 0] * th + an[0, 1] * om_meas) + gl[1] * (
                an[1, 0] * th + an[1, 1] * om_meas
            )
            z = (1.0 - ld) * z + lax + ld * lx - lx + lb * u
        elif obs_kind == OBS_HP:
            l1x = gl1[0] * th + gl1[1] * om_meas
            l2x = gl2[0] * th + gl2[1] * om_meas
            l1ax = gl1[0] * (an[0, 0] * th + an[0, 1] * om_meas) + gl1[1] * (
                an[1, 0] * th + an[1, 1] * om_meas
            )
            l2ax = gl2[0] * (an[0, 0] * th + an[0, 1] * om_meas) + gl2[1] * (
                an[1, 0] * th + an[1, 1] * om_meas
            )
            z1_next = (1.0 - l1d) * z2 + l1b * u + (l1ax + l1d * l2x - l2x)
            z2_next = -z1 + (2.0 - l2d) * z2 + l2b * u + (l1x + l2ax + l2d * l2x - 2.0 * l2x)
            z1 = z1_next
            z2 = z2_next

        # advance plant
        if mode == MODE_DISCRETE:
            th_next = an[0, 0] * th + an[0, 1] * om + bn[0] * u - dn[0] * tau_dn
            om_next = an[1, 0] * th + an[1, 1] * om + bn[1] * u - dn[1] * tau_dn
            th = th_next
            om = om_next
        else:
            for s in range(substeps):
                td = tau_mid[k, s]
                th_next = ah[0, 0] * th + ah[0, 1] * om + bh[0] * u - dh[0] * td
                om_next = ah[1, 0] * th + ah[1, 1] * om + bh[1] * u - dh[1] * td
                th = th_next
                om = om_next

    return OK


sim_loop_py = _sim_loop

try:
    from numba import njit

    sim_loop_jit = njit(cache=True)(_sim_loop)
except ImportError:  # pragma: no cover
    sim_loop_jit = None

_disabled = os.environ.get("DOBLAB_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")
if sim_loop_jit is not None and not _disabled:
    sim_loop = sim_loop_jit
else:
    sim_loop = sim_loop_py
