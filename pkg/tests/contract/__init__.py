"""Contract/schema tests guarding the CSV tables a run writes."""
