"""Parameter sweeps and figure presets."""
