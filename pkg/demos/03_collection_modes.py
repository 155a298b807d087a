"""The three collection modes side by side on one seeded world.

Passive keeps everything it sees. Active-time watches the same stream for
the same wall-clock span but drops redundant frames, so it ends smaller
with the same instances. Active-size keeps watching a longer stream until
it has as many frames as passive, ending denser.
"""

import itertools

from framesieve import (
    PolicyConfig,
    Reason,
    collect_active_size,
    collect_active_time,
    collect_passive,
    generate,
    preset_config,
)

config = preset_config("stop_and_go", seed=7, n_frames=480)
policy = PolicyConfig(tau=0.98, density_boost=0.0)

# Passive and active-time share the first 120 frames (equal exposure);
# active-size continues over the same stream until 120 frames are kept.
passive = collect_passive(itertools.islice(generate(config), 120), stride=1)
active_time = collect_active_time(itertools.islice(generate(config), 120), policy)
active_size = collect_active_size(generate(config), policy, target_frames=120)

print(f"{'mode':>12} {'seen':>6} {'kept':>6} {'instances':>10} {'inst/frame':>11} {'wall clock':>11}")
for name, run in (("passive", passive), ("active-time", active_time), ("active-size", active_size)):
    s = run.stats
    print(
        f"{name:>12} {s.frames_seen:>6} {s.frames_kept:>6} {s.instances_kept:>10} "
        f"{s.instances_per_kept_frame:>11.3f} {s.wall_clock_equivalent:>10.1f}s"
    )

reduction = 1 - active_time.stats.frames_kept / passive.stats.frames_kept
gain = active_size.stats.instances_per_kept_frame / passive.stats.instances_per_kept_frame
print(f"\nequal time: {reduction:.1%} fewer frames, "
      f"{active_time.stats.instances_kept}/{passive.stats.instances_kept} instances retained")
print(f"equal size: {gain:.2f}x instance density at the same frame count")

# Why frames were dropped:
reasons = {}
for d in active_time.decisions:
    reasons[d.reason] = reasons.get(d.reason, 0) + 1
print("\nactive-time decision reasons:")
for reason, count in sorted(reasons.items(), key=lambda kv: -kv[1]):
    print(f"  {reason.value:>18}: {count}")

# Quality gates are available too: require two instances per kept frame.
gated = collect_active_time(
    itertools.islice(generate(config), 120),
    PolicyConfig(tau=0.98, density_boost=0.0, min_instances=2),
)
dropped_sparse = sum(1 for d in gated.decisions if d.reason is Reason.TOO_FEW_INSTANCES)
print(f"\nwith min_instances=2: kept {gated.stats.frames_kept}, "
      f"dropped {dropped_sparse} sparse frames, density {gated.stats.instances_per_kept_frame:.2f}")
