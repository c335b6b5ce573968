"""Environment settings and logging setup for the Onsager lab."""
