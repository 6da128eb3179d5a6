"""Fixed-start runtime laboratory for OneMax."""
