"""Step response of the overdamped width flow and its quantum image.

Drives the classical analog with a smoothed step in the spring constant
and measures how long the width takes to settle into a 0.5 percent band
around the new equilibrium. The mapped quantum stiffness stays monotone
for a gentle step but overshoots when the step is sharp, because the
map's derivative term amplifies fast features.
"""

import numpy as np

from swifttrap import PhysConsts, evolve_variance, quantum_from_classical_t, step_protocol


def settling_time(traj, s_i, s_f):
    # time from leaving a 0.5% band around the old equilibrium to entering
    # the matching band around the new one for good
    band = 0.005 * abs(s_f - s_i)
    t, s = traj.t, traj.s
    out_i = np.where(np.abs(s - s_i) > band)[0]
    not_in_f = np.where(np.abs(s - s_f) > band)[0]
    t_depart = t[out_i[0] - 1] if out_i.size and out_i[0] > 0 else t[0]
    t_arrive = (t[not_in_f[-1] + 1]
                if not_in_f.size and not_in_f[-1] + 1 < t.size else t[-1])
    return float(t_arrive - t_depart)


def direction_changes(values):
    d = np.diff(values)
    d = d[np.abs(d) > 1e-6 * np.max(np.abs(values))]
    return int(np.sum(np.sign(d[1:]) != np.sign(d[:-1])))


def main():
    c = PhysConsts()
    cases = [("gentle (eps = 1.0)", 1.0, (0.0, 16.0)),
             ("sharp  (eps = 0.1)", 0.1, (6.0, 10.0))]
    for label, eps, span in cases:
        proto = step_protocol(2.0, 4.0, 8.0, eps, span, n=200_001)
        traj = evolve_variance(proto, 0.5, c)
        target = c.D * c.gamma / 4.0  # equilibrium width for the final value
        settle = settling_time(traj, 0.5, target)
        image = quantum_from_classical_t(proto, traj.s, c)
        flips = direction_changes(image.values)

        print(f"== {label} ==")
        print(f"   width {traj.s[0]:.3f} -> {traj.s[-1]:.4f} "
              f"(equilibrium {target:.3f})")
        print(f"   settling time (0.5% bands, depart -> arrive): {settle:.3f}")
        shape = "monotone" if flips == 0 else f"{flips} reversal(s)"
        print(f"   quantum image of the step: {shape}")
        print(f"   image range [{image.values.min():.3f}, "
              f"{image.values.max():.3f}], endpoint equilibria [2.000, 8.000]\n")


if __name__ == "__main__":
    main()
