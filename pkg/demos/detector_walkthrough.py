"""Trace the two-statistic detectors step by step on one stream.

Draws a scenario-3 stream that switches from the pre-change model to the
bad model at step 40, then walks the s-cusum and j-cusum state machines
over it, printing the statistic trajectories around the interesting
moments (resets, freezes, and the alarm).

Run:  python3 demos/detector_walkthrough.py
"""

from confusum import (
    DetectorConfig,
    DetectorKind,
    DetectorState,
    keyed_rng,
    make_stream,
    scenario_preset,
    step,
)

pre, confusing, bad = scenario_preset(3)
NU, HORIZON, B = 40, 400, 2.5

stream = make_stream(pre, bad, nu=NU, rng=keyed_rng(2016, 1, NU, 0, 0))
xs = stream.take(HORIZON).tolist()

for kind in (DetectorKind.S_CUSUM, DetectorKind.J_CUSUM):
    config = DetectorConfig(kind, pre, confusing, bad, b0=B, bC=B)
    state = DetectorState()
    events = []
    prev = state
    for x in xs:
        state = step(state, config, x)
        if state.w_frozen and not prev.w_frozen:
            events.append(f"t={state.t:3d}  W statistic froze at {state.w_stat:.3f} >= {B}")
        if prev.lam_stat > 0 and state.lam_stat == 0 and state.alarm_time is None:
            if kind is DetectorKind.J_CUSUM and state.w_stat == 0 and not state.w_frozen:
                events.append(f"t={state.t:3d}  Lambda statistic reset (W hit zero)")
            else:
                events.append(f"t={state.t:3d}  Lambda statistic reflected back to zero")
        if state.alarm_time is not None:
            events.append(
                f"t={state.t:3d}  ALARM: W={state.w_stat:.3f}, Lambda={state.lam_stat:.3f}"
            )
            break
        prev = state

    print(f"{kind.value} with b0 = bC = {B}, change at t = {NU}")
    for line in events[-8:]:
        print("  " + line)
    delay = state.alarm_time - NU if state.alarm_time is not None else None
    print(f"  detection delay past the change point: {delay}\n")

# The j-cusum runs both statistics from the start, so its Lambda statistic
# usually has a head start once W freezes; the s-cusum starts Lambda from
# zero at the freeze, which is exactly the gap in their delays.
