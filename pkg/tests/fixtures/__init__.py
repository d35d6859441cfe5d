"""Define fixtures."""
