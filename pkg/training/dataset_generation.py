import logging
from typing import Tuple

import numpy as np

from WeakSINDy.ode_bench import NoiseSpec, OdeSystem, Trajectory, add_noise, make_system, simulate


def instance_seed(seed: int, level_index: int, instance_index: int) -> int:
    """Derive the noise seed of one (level, instance) cell.

    The seed is a pure function of its three arguments, so cells are
    independent of sweep size and evaluation order.
    """
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(level_index), int(instance_index)))
    return int(sequence.generate_state(1, np.uint64)[0])


def generate_clean(cfg) -> Tuple[OdeSystem, Trajectory]:
    """Simulate the clean trajectory of an experiment.

    Args:
        cfg: ExperimentConfig

    Returns:
        Tuple[OdeSystem, Trajectory]: benchmark system and its clean trajectory
    """
    system = make_system(cfg.system, cfg.params)
    clean = simulate(system, cfg.x0, cfg.T, cfg.fs)
    logging.info(f"simulated {system.name}: {clean.k} samples at {cfg.fs:g} Hz")
    return system, clean


def generate_instance(clean: Trajectory, noise_ratio: float, seed: int,
                      level_index: int, instance_index: int) -> Trajectory:
    return add_noise(clean, NoiseSpec(noise_ratio, instance_seed(seed, level_index, instance_index)))
