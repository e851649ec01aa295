"""Simulation constants shared across modules."""

TICK_SECONDS = 0.05          # 20 Hz authoritative tick
HUNTER_SPEED = 1.4           # m/s, standard walking pace
STEP_METERS = HUNTER_SPEED * TICK_SECONDS   # 0.07 m per tick
VALIDATION_TICKS = 40        # 2.0 s of simultaneous holding
POINTING_RANGE = 10.0        # m, max pointing ray length
PROTOCOL_VERSION = 1
MAX_FRAME_BYTES = 64 * 1024
CHECKPOINT_EVERY_TICKS = 100
